use crate::caching::q_max_uniform;
use crate::channel::{
    csi_overhead, db_to_linear, dbm_to_watts, default_noise_power, watts_to_dbm, CellGeometry,
    COHERENCE_SYMBOLS, PILOT_SYMBOLS,
};
use crate::error::{Error, Result};

/// Which harness a scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// VCC against the cacheless baseline under BD-MRC and/or ZF with MMF.
    Rates,
    /// Multi-server bit-level baseline and its modified form.
    Msv,
    /// Equal-power ZF with CSIT and CSIR errors.
    ImperfectCsi,
}

/// Large-scale fading of the users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pathloss {
    /// Users dropped uniformly over a cell.
    Cell(CellGeometry),
    /// Every user has unit gain.
    Unit,
}

/// Users served per group: a fixed value or the best one per power point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QChoice {
    Fixed(usize),
    Optimize,
}

/// Power grid, given either as transmit power or as transmit SNR `P_tot/N0`.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerSweep {
    PtotDbm(Vec<f64>),
    SnrDb(Vec<f64>),
}

/// One point of the power grid in every unit the report needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint {
    pub watts: f64,
    pub dbm: f64,
    pub snr_db: f64,
}

impl PowerSweep {
    pub fn len(&self) -> usize {
        match self {
            PowerSweep::PtotDbm(v) | PowerSweep::SnrDb(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self, noise_watts: f64) -> Vec<PowerPoint> {
        match self {
            PowerSweep::PtotDbm(v) => v
                .iter()
                .map(|&dbm| {
                    let watts = dbm_to_watts(dbm);
                    PowerPoint {
                        watts,
                        dbm,
                        snr_db: 10.0 * (watts / noise_watts).log10(),
                    }
                })
                .collect(),
            PowerSweep::SnrDb(v) => v
                .iter()
                .map(|&snr_db| {
                    let watts = noise_watts * db_to_linear(snr_db);
                    PowerPoint {
                        watts,
                        dbm: watts_to_dbm(watts),
                        snr_db,
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schemes {
    pub bd_mrc: bool,
    pub zf: bool,
}

/// Everything that determines the numbers of a run. The worker count is not
/// part of it: results never depend on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ExperimentKind,
    pub pathloss: Pathloss,
    /// Transmit antennas.
    pub l: usize,
    /// Groups served at once, `G = Λγ + 1`.
    pub groups: usize,
    /// Receive antennas per user. Several values run as separate series.
    pub antennas: Vec<usize>,
    /// Users per group in VCC.
    pub q: QChoice,
    /// Users served by the cacheless baseline.
    pub q_base: QChoice,
    pub power: PowerSweep,
    pub schemes: Schemes,
    pub coherence_symbols: u32,
    pub pilot_symbols: u32,
    pub noise_watts: f64,
    /// CSIT error variance.
    pub csit_variance: f64,
    /// CSIR coupling-error variances, one series each.
    pub csir_variances: Vec<f64>,
    pub locations: usize,
    pub fadings: usize,
    pub seed: u64,
}

/// Users-per-group values swept by each scheme of a rate experiment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RateCandidates {
    pub bd_q: Vec<usize>,
    pub bd_q_base: Vec<usize>,
    pub zf_q: Vec<usize>,
    pub zf_q_base: Vec<usize>,
}

/// Default number of user-location draws.
pub const DEFAULT_LOCATIONS: usize = 1000;
/// Default number of fading draws per location.
pub const DEFAULT_FADINGS: usize = 20;

impl Default for Scenario {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Rates,
            pathloss: Pathloss::Cell(CellGeometry::macro_cell()),
            l: 32,
            groups: 6,
            antennas: vec![4],
            q: QChoice::Optimize,
            q_base: QChoice::Optimize,
            power: PowerSweep::PtotDbm(vec![20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0]),
            schemes: Schemes {
                bd_mrc: true,
                zf: false,
            },
            coherence_symbols: COHERENCE_SYMBOLS,
            pilot_symbols: PILOT_SYMBOLS,
            noise_watts: default_noise_power(),
            csit_variance: 0.0,
            csir_variances: Vec::new(),
            locations: DEFAULT_LOCATIONS,
            fadings: DEFAULT_FADINGS,
            seed: 1,
        }
    }
}

impl Scenario {
    /// Largest users-per-group BD-MRC can serve with `m` antennas each while
    /// keeping `Q·M ≤ L`.
    pub fn bd_cap(&self, m: usize) -> usize {
        q_max_uniform(self.l, m, self.l / m)
    }

    /// Largest users-per-group for which the ZF bounds exist (`Q·M < L`).
    pub fn zf_cap(&self, m: usize) -> usize {
        (self.l - 1) / m
    }

    /// Users-per-group cap of the single-antenna experiments: BD-MRC may fill
    /// all `L` dimensions, the ZF runs with channel errors keep one spare.
    pub fn symmetric_cap(&self) -> usize {
        match self.kind {
            ExperimentKind::ImperfectCsi => self.l - 1,
            _ => self.l,
        }
    }

    /// Candidate values of a [`QChoice`] under `cap`.
    pub fn candidates(&self, choice: QChoice, cap: usize, key: &str) -> Result<Vec<usize>> {
        match choice {
            QChoice::Fixed(q) if q == 0 || q > cap => Err(Error::InvalidConfiguration(format!(
                "{key} = {q} is not feasible here: allowed range is 1..={cap}"
            ))),
            QChoice::Fixed(q) => Ok(vec![q]),
            QChoice::Optimize if cap == 0 => Err(Error::InvalidConfiguration(format!(
                "{key}: no feasible number of users (cap is 0)"
            ))),
            QChoice::Optimize => Ok((1..=cap).collect()),
        }
    }

    /// `ξ` for `streams` pilot-trained receive antennas.
    pub fn xi(&self, streams: usize) -> Result<f64> {
        Ok(csi_overhead(self.coherence_symbols, self.pilot_symbols, streams)?.xi)
    }

    /// Users-per-group candidates of every scheme for `m` receive antennas.
    /// Lists of disabled schemes are empty.
    pub fn rate_candidates(&self, m: usize) -> Result<RateCandidates> {
        let mut c = RateCandidates::default();
        if self.schemes.bd_mrc {
            c.bd_q = self.candidates(self.q, self.bd_cap(m), "Q")?;
            c.bd_q_base = self.candidates(self.q_base, self.bd_cap(m), "Q_base")?;
        }
        if self.schemes.zf {
            c.zf_q = self.candidates(self.q, self.zf_cap(m), "Q")?;
            c.zf_q_base = self.candidates(self.q_base, self.zf_cap(m), "Q_base")?;
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfiguration(msg));
        if self.l == 0 {
            return bad("L must be positive".into());
        }
        if self.groups == 0 {
            return bad("G must be positive".into());
        }
        if self.antennas.is_empty() || self.antennas.contains(&0) {
            return bad("M must list positive antenna counts".into());
        }
        if let Some(&m) = self.antennas.iter().find(|&&m| m > self.l) {
            return Err(Error::InfeasibleDimension {
                required: m,
                available: self.l,
            });
        }
        if self.power.is_empty() {
            return bad("the power sweep is empty".into());
        }
        if self.locations == 0 || self.fadings == 0 {
            return bad("locations and fadings must be positive".into());
        }
        if !(self.noise_watts > 0.0) {
            return bad("noise power must be positive".into());
        }
        if !(self.csit_variance >= 0.0) || self.csir_variances.iter().any(|v| !(*v >= 0.0)) {
            return bad("CSI error variances must be nonnegative".into());
        }
        match self.kind {
            ExperimentKind::Rates => {
                if !self.schemes.bd_mrc && !self.schemes.zf {
                    return bad("schemes: select at least one of bd_mrc, zf".into());
                }
                for &m in &self.antennas {
                    let c = self.rate_candidates(m)?;
                    for (q, qb) in [(&c.bd_q, &c.bd_q_base), (&c.zf_q, &c.zf_q_base)] {
                        if let (Some(q), Some(qb)) = (q.last(), qb.last()) {
                            self.xi(self.groups * m * q)?;
                            self.xi(m * qb)?;
                        }
                    }
                }
            }
            ExperimentKind::Msv | ExperimentKind::ImperfectCsi => {
                if self.antennas != [1] {
                    return Err(Error::Unsupported(
                        "this experiment needs single-antenna users (M = 1)".into(),
                    ));
                }
                if self.pathloss != Pathloss::Unit {
                    return Err(Error::Unsupported(
                        "this experiment needs unit pathloss (geometry = symmetric)".into(),
                    ));
                }
                if self.kind == ExperimentKind::Msv && self.l < 2 {
                    return bad("L must be at least 2 for the multi-server baseline".into());
                }
                if self.kind == ExperimentKind::ImperfectCsi && self.csit_variance > 1.0 {
                    return bad("csit_variance cannot exceed the unit channel variance".into());
                }
                let cap = self.symmetric_cap();
                let q = self.candidates(self.q, cap, "Q")?;
                let qb = self.candidates(self.q_base, cap, "Q_base")?;
                self.xi(self.groups * q[q.len() - 1])?;
                self.xi(qb[qb.len() - 1])?;
                if self.kind == ExperimentKind::Msv {
                    self.xi(self.l - 1 + self.groups)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_units() {
        let pts = PowerSweep::PtotDbm(vec![30.0]).points(1e-3);
        assert!((pts[0].watts - 1.0).abs() < 1e-12);
        assert!((pts[0].snr_db - 30.0).abs() < 1e-9);
        let pts = PowerSweep::SnrDb(vec![10.0]).points(2.0);
        assert!((pts[0].watts - 20.0).abs() < 1e-12);
    }

    #[test]
    fn caps_and_candidates() {
        let s = Scenario::default();
        assert_eq!(s.bd_cap(4), 8);
        assert_eq!(s.zf_cap(4), 7);
        assert_eq!(
            s.candidates(QChoice::Optimize, 3, "Q").unwrap(),
            vec![1, 2, 3]
        );
        let err = s.candidates(QChoice::Fixed(9), 8, "Q").unwrap_err();
        assert!(err.to_string().contains("Q = 9"));
    }

    #[test]
    fn validation() {
        assert!(Scenario::default().validate().is_ok());
        let s = Scenario {
            kind: ExperimentKind::Msv,
            ..Scenario::default()
        };
        assert!(matches!(s.validate(), Err(Error::Unsupported(_))));
        let s = Scenario {
            antennas: vec![40],
            ..Scenario::default()
        };
        assert!(matches!(
            s.validate(),
            Err(Error::InfeasibleDimension { .. })
        ));
    }
}
