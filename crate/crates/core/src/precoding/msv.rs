//! Multi-server bit-level coded caching baseline.
//!
//! One stream carries an XOR-coded message for `G` multicast users and up to
//! `L − 1` streams carry unicast data. The multicast beamformer `f_0` avoids
//! all unicast users; unicast beamformer `f_k` avoids the first multicast user
//! and the other unicast users. The remaining multicast users strip unicast
//! interference with their caches.

use num_complex::Complex64;

use crate::channel::csi_overhead;
use crate::error::{Error, Result};
use crate::linalg::{gram, invert_gram, CMatrix, CVector};

#[derive(Debug, Clone)]
pub struct MsvSolution {
    pub f0: CVector,
    pub f: Vec<CVector>,
}

/// Builds `f_0` and `f_1..f_{Q_uc}` as the normalized zero-forcing columns of
/// `[h_mc,1, h_uc,1, …, h_uc,Q_uc]`. With no unicast users `f_0` is the
/// matched filter of the first multicast user.
pub fn msv_beamformers(h_mc: &[CVector], h_uc: &[CVector]) -> Result<MsvSolution> {
    let first = h_mc.first().ok_or_else(|| {
        Error::InvalidConfiguration("at least one multicast user is required".into())
    })?;
    let l = first.len();
    if h_uc.len() + 1 > l {
        return Err(Error::InfeasibleDimension {
            required: h_uc.len() + 1,
            available: l,
        });
    }
    let mut s = CMatrix::zeros(l, h_uc.len() + 1);
    s.set_column(0, first);
    for (k, h) in h_uc.iter().enumerate() {
        s.set_column(k + 1, h);
    }
    let ginv = invert_gram(&gram(&s)).ok_or(Error::NumericalSingularity)?;
    let w = s.map(|z| z.conj()) * ginv;
    let mut cols = w.column_iter().map(|c| {
        let n = c.norm();
        c.into_owned() / Complex64::new(n, 0.0)
    });
    let f0 = cols.next().expect("multicast column");
    Ok(MsvSolution {
        f0,
        f: cols.collect(),
    })
}

/// Effective total rate with equal power `P_tot / (Q_uc + 1)` per stream and
/// overhead factor `1 − Θ(Q_uc + G)/T`. For `Q_uc = L − 1` this is the
/// original scheme; smaller `Q_uc` gives the modified scheme.
pub fn msv_rates(
    solution: &MsvSolution,
    h_mc: &[CVector],
    h_uc: &[CVector],
    p_tot: f64,
    n0: f64,
    coherence_symbols: u32,
    pilot_symbols: u32,
) -> Result<f64> {
    let g = h_mc.len();
    let q_uc = h_uc.len();
    if solution.f.len() != q_uc {
        return Err(Error::InvalidConfiguration(
            "beamformer and unicast counts differ".into(),
        ));
    }
    let xi = csi_overhead(coherence_symbols, pilot_symbols, q_uc + g)?.xi;
    let p = p_tot / (q_uc + 1) as f64;
    let gain = |h: &CVector, f: &CVector| h.transpose().dot(&f.transpose()).norm_sqr();
    let worst = h_mc
        .iter()
        .map(|h| (p * gain(h, &solution.f0) / n0).ln_1p())
        .fold(f64::INFINITY, f64::min);
    let unicast: f64 = h_uc
        .iter()
        .zip(&solution.f)
        .map(|(h, f)| (p * gain(h, f) / n0).ln_1p())
        .sum();
    Ok(xi * (g as f64 * worst + unicast))
}

/// High-SNR limit of the original scheme's gain over the cacheless baseline,
/// `(L + Λγ) / L`.
pub fn msv_high_snr_gain_limit(l: usize, lambda_gamma: usize) -> f64 {
    (l + lambda_gamma) as f64 / l as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_normal_matrix;
    use crate::rng::SeedTree;

    fn vectors(seed: u64, l: usize, n: usize) -> Vec<CVector> {
        let mut rng = SeedTree::new(seed).stream(&[0]);
        (0..n)
            .map(|_| {
                complex_normal_matrix(&mut rng, l, 1, 1.0)
                    .column(0)
                    .into_owned()
            })
            .collect()
    }

    fn dot(h: &CVector, f: &CVector) -> Complex64 {
        h.iter().zip(f.iter()).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn orthogonality() {
        let mc = vectors(1, 8, 3);
        let uc = vectors(2, 8, 7);
        let sol = msv_beamformers(&mc, &uc).unwrap();
        assert!((sol.f0.norm() - 1.0).abs() < 1e-12);
        for (k, h) in uc.iter().enumerate() {
            assert!(dot(h, &sol.f0).norm() < 1e-9);
            assert!(dot(&mc[0], &sol.f[k]).norm() < 1e-9);
            for (j, f) in sol.f.iter().enumerate() {
                if j != k {
                    assert!(dot(h, f).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn no_unicast_users_gives_matched_filter() {
        let mc = vectors(3, 4, 2);
        let sol = msv_beamformers(&mc, &[]).unwrap();
        let mrt = mc[0].map(|z| z.conj()) / Complex64::new(mc[0].norm(), 0.0);
        assert!((sol.f0 - mrt).norm() < 1e-12);
    }

    #[test]
    fn two_antennas_one_unicast() {
        let mc = vectors(4, 2, 1);
        let uc = vectors(5, 2, 1);
        let sol = msv_beamformers(&mc, &uc).unwrap();
        // The null space of h_uc in C^2 is one-dimensional.
        let null = CVector::from_vec(vec![uc[0][1], -uc[0][0]]);
        let null = &null / Complex64::new(null.norm(), 0.0);
        assert!((null.adjoint() * &sol.f0)[(0, 0)].norm() > 1.0 - 1e-12);
    }

    #[test]
    fn too_many_unicast_users() {
        let mc = vectors(6, 3, 1);
        let uc = vectors(7, 3, 3);
        assert!(matches!(
            msv_beamformers(&mc, &uc),
            Err(Error::InfeasibleDimension { .. })
        ));
    }

    #[test]
    fn rates_vanish_without_power() {
        let mc = vectors(8, 4, 2);
        let uc = vectors(9, 4, 3);
        let sol = msv_beamformers(&mc, &uc).unwrap();
        assert_eq!(
            msv_rates(&sol, &mc, &uc, 0.0, 1.0, 15_000, 10).unwrap(),
            0.0
        );
        assert!(msv_rates(&sol, &mc, &uc, 10.0, 1.0, 15_000, 10).unwrap() > 0.0);
    }

    #[test]
    fn limit_value() {
        assert!((msv_high_snr_gain_limit(32, 5) - 1.15625).abs() < 1e-15);
    }
}
