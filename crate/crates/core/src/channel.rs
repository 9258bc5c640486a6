//! User placement, pathloss, Rayleigh fading, pilot overhead and CSI errors.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{complex_normal, complex_normal_matrix, CMatrix, CVector};

/// Thermal noise density in dBm/Hz.
pub const NOISE_DENSITY_DBM_HZ: f64 = -174.0;
/// Bandwidth per user in Hz.
pub const BANDWIDTH_HZ: f64 = 20e6;
/// Coherence block length in symbols.
pub const COHERENCE_SYMBOLS: u32 = 15_000;
/// Pilot symbols spent per receive antenna.
pub const PILOT_SYMBOLS: u32 = 10;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Noise power in watts for a density in dBm/Hz over `bandwidth_hz`.
pub fn noise_power(density_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_watts(density_dbm_hz) * bandwidth_hz
}

/// The default receiver noise power, about 7.96e-14 W.
pub fn default_noise_power() -> f64 {
    noise_power(NOISE_DENSITY_DBM_HZ, BANDWIDTH_HZ)
}

/// Annular cell with a power-law pathloss `β = l0 · r^{-η0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    pub inner_radius_m: f64,
    pub outer_radius_m: f64,
    pub pathloss_exponent: f64,
    pub attenuation: f64,
}

impl CellGeometry {
    pub fn new(
        inner_radius_m: f64,
        outer_radius_m: f64,
        pathloss_exponent: f64,
        attenuation: f64,
    ) -> Result<Self> {
        let finite = [
            inner_radius_m,
            outer_radius_m,
            pathloss_exponent,
            attenuation,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite || inner_radius_m <= 0.0 {
            return Err(Error::InvalidGeometry(
                "radii must be positive and finite".into(),
            ));
        }
        if inner_radius_m >= outer_radius_m {
            return Err(Error::InvalidGeometry(format!(
                "inner radius {inner_radius_m} m must be below outer radius {outer_radius_m} m"
            )));
        }
        if pathloss_exponent <= 2.0 {
            return Err(Error::InvalidGeometry(format!(
                "pathloss exponent must exceed 2, got {pathloss_exponent}"
            )));
        }
        if attenuation <= 0.0 {
            return Err(Error::InvalidGeometry(
                "attenuation l0 must be positive".into(),
            ));
        }
        Ok(Self {
            inner_radius_m,
            outer_radius_m,
            pathloss_exponent,
            attenuation,
        })
    }

    /// 35–500 m cell, η0 = 3.76, l0 = 10^-3.53.
    pub fn macro_cell() -> Self {
        Self {
            inner_radius_m: 35.0,
            outer_radius_m: 500.0,
            pathloss_exponent: 3.76,
            attenuation: 10f64.powf(-3.53),
        }
    }

    /// 10–100 m cell, η0 = 3, l0 = 10^-3.7.
    pub fn micro_cell() -> Self {
        Self {
            inner_radius_m: 10.0,
            outer_radius_m: 100.0,
            pathloss_exponent: 3.0,
            attenuation: 10f64.powf(-3.7),
        }
    }

    /// Looks up a preset by name (`macro` or `micro`).
    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "macro" => Ok(Self::macro_cell()),
            "micro" => Ok(Self::micro_cell()),
            other => Err(Error::InvalidGeometry(format!("unknown preset `{other}`"))),
        }
    }

    pub fn beta(&self, distance_m: f64) -> f64 {
        self.attenuation * distance_m.powf(-self.pathloss_exponent)
    }

    pub fn link(&self, distance_m: f64) -> LinkGain {
        LinkGain {
            distance_m,
            beta: self.beta(distance_m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGain {
    pub distance_m: f64,
    /// Linear large-scale power gain.
    pub beta: f64,
}

/// Draws a user uniformly over the area of the annulus.
pub fn sample_user_position<R: Rng + ?Sized>(geometry: &CellGeometry, rng: &mut R) -> LinkGain {
    let a = geometry.inner_radius_m * geometry.inner_radius_m;
    let b = geometry.outer_radius_m * geometry.outer_radius_m;
    let u: f64 = rng.random();
    geometry.link((a + u * (b - a)).sqrt())
}

/// Channel of one served user: `h` is `L × M` with i.i.d. `CN(0, β)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannel {
    pub h: CMatrix,
    pub beta: f64,
}

impl UserChannel {
    pub fn antennas(&self) -> usize {
        self.h.ncols()
    }
}

/// The stacked channels of the users served in one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupChannel {
    pub users: Vec<UserChannel>,
    l: usize,
}

impl GroupChannel {
    /// Wraps existing matrices; every block must have `l` rows and the total
    /// column count may not exceed `l`.
    pub fn from_users(l: usize, users: Vec<UserChannel>) -> Result<Self> {
        if let Some(bad) = users.iter().find(|u| u.h.nrows() != l) {
            return Err(Error::InvalidConfiguration(format!(
                "channel block has {} rows, expected {l}",
                bad.h.nrows()
            )));
        }
        let total: usize = users.iter().map(UserChannel::antennas).sum();
        if total > l {
            return Err(Error::InfeasibleDimension {
                required: total,
                available: l,
            });
        }
        Ok(Self { users, l })
    }

    pub fn transmit_antennas(&self) -> usize {
        self.l
    }

    pub fn total_antennas(&self) -> usize {
        self.users.iter().map(UserChannel::antennas).sum()
    }

    /// Column offset of user `k` inside [`Self::stacked`].
    pub fn offset(&self, k: usize) -> usize {
        self.users[..k].iter().map(UserChannel::antennas).sum()
    }

    /// `[H_1, …, H_Q]`, an `L × M_ψ` matrix.
    pub fn stacked(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.l, self.total_antennas());
        let mut col = 0;
        for u in &self.users {
            out.columns_mut(col, u.antennas()).copy_from(&u.h);
            col += u.antennas();
        }
        out
    }
}

/// Draws a group channel. Fails when the users need more antennas than `l`.
pub fn sample_group_channel<R: Rng + ?Sized>(
    l: usize,
    antenna_counts: &[usize],
    betas: &[f64],
    rng: &mut R,
) -> Result<GroupChannel> {
    if antenna_counts.len() != betas.len() {
        return Err(Error::InvalidConfiguration(
            "antenna counts and pathloss values differ in length".into(),
        ));
    }
    let total: usize = antenna_counts.iter().sum();
    if total > l {
        return Err(Error::InfeasibleDimension {
            required: total,
            available: l,
        });
    }
    let users = antenna_counts
        .iter()
        .zip(betas)
        .map(|(&m, &beta)| UserChannel {
            h: complex_normal_matrix(rng, l, m, beta),
            beta,
        })
        .collect();
    Ok(GroupChannel { users, l })
}

/// Fraction of the coherence block left for data after downlink pilots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiOverhead {
    pub coherence_symbols: u32,
    pub pilot_symbols: u32,
    pub xi: f64,
}

pub fn csi_overhead(
    coherence_symbols: u32,
    pilot_symbols: u32,
    total_receive_antennas: usize,
) -> Result<CsiOverhead> {
    if coherence_symbols == 0 {
        return Err(Error::InvalidConfiguration(
            "coherence block must be positive".into(),
        ));
    }
    let xi = 1.0
        - f64::from(pilot_symbols) * total_receive_antennas as f64 / f64::from(coherence_symbols);
    if xi < 0.0 {
        return Err(Error::OverheadExceedsCoherence { xi });
    }
    Ok(CsiOverhead {
        coherence_symbols,
        pilot_symbols,
        xi,
    })
}

/// Error variances of the transmitter's channel estimate and of the
/// receiver's coupling-coefficient estimate. Zero means perfect knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CsiErrorModel {
    pub csit_variance: f64,
    pub csir_variance: f64,
}

impl CsiErrorModel {
    pub fn new(csit_variance: f64, csir_variance: f64) -> Result<Self> {
        if !(csit_variance >= 0.0 && csir_variance >= 0.0) {
            return Err(Error::InvalidConfiguration(
                "CSI error variances must be nonnegative".into(),
            ));
        }
        Ok(Self {
            csit_variance,
            csir_variance,
        })
    }

    pub fn is_perfect(&self) -> bool {
        self.csit_variance == 0.0 && self.csir_variance == 0.0
    }
}

/// Splits a true channel `h` (entries `CN(0, beta)`) into an estimate and an
/// error `h̃` with entries `CN(0, error_variance)` independent of the estimate.
///
/// `h̃` is drawn from its conditional law given `h`, so that `h = ĥ + h̃`
/// holds with the two parts uncorrelated.
pub fn corrupt_csit<R: Rng + ?Sized>(
    h: &CVector,
    beta: f64,
    error_variance: f64,
    rng: &mut R,
) -> Result<(CVector, CVector)> {
    if error_variance == 0.0 {
        return Ok((h.clone(), CVector::zeros(h.len())));
    }
    if !(error_variance > 0.0 && error_variance <= beta) {
        return Err(Error::InvalidConfiguration(format!(
            "CSIT error variance {error_variance} must lie in [0, {beta}]"
        )));
    }
    let ratio = error_variance / beta;
    let spread = error_variance * (1.0 - ratio);
    let tilde = CVector::from_iterator(
        h.len(),
        h.iter().map(|&x| x * ratio + complex_normal(rng, spread)),
    );
    let hat = h - &tilde;
    Ok((hat, tilde))
}

/// Splits a coupling coefficient into estimate and `CN(0, error_variance)` error.
pub fn corrupt_coupling<R: Rng + ?Sized>(
    a: Complex64,
    error_variance: f64,
    rng: &mut R,
) -> (Complex64, Complex64) {
    if error_variance == 0.0 {
        return (a, Complex64::new(0.0, 0.0));
    }
    let tilde = complex_normal(rng, error_variance);
    (a - tilde, tilde)
}
