//! Equal-power ZF over symmetric single-antenna channels with CSIT and CSIR
//! errors.

use super::report::RateReport;
use super::runner::{build_report, over_locations, Acc, Role};
use super::scenario::{ExperimentKind, Scenario};
use crate::channel::{corrupt_coupling, corrupt_csit};
use crate::error::{Error, Result};
use crate::linalg::{complex_normal_matrix, gram, invert_gram, CMatrix, CVector};
use crate::precoding::{zf_imperfect_csir_sinr, zf_imperfect_csit};
use crate::rng::{tag, SeedTree};
use num_complex::Complex64;

/// Series name of the CSIR variant with error variance `v`.
pub fn csir_series(prefix: &str, v: f64) -> String {
    format!("{prefix}_zf_csir_{v}")
}

/// VCC against cacheless ZF, both with power `P_tot` split equally over the
/// served users, under perfect CSI, imperfect CSIT and imperfect CSIT plus CSIR.
pub fn run_imperfect_csi(scenario: &Scenario, workers: usize) -> Result<RateReport> {
    if scenario.kind != ExperimentKind::ImperfectCsi {
        return Err(Error::InvalidConfiguration(
            "not an imperfect-CSI experiment".into(),
        ));
    }
    scenario.validate()?;
    let (l, g, n0) = (scenario.l, scenario.groups, scenario.noise_watts);
    let points = scenario.power.points(n0);
    let np = points.len();
    let cap = scenario.symmetric_cap();
    let q_vcc = scenario.candidates(scenario.q, cap, "Q")?;
    let q_base = scenario.candidates(scenario.q_base, cap, "Q_base")?;
    let users = q_vcc.iter().chain(&q_base).copied().max().unwrap_or(0);
    let seeds = SeedTree::new(scenario.seed);
    let var = scenario.csit_variance;

    let acc = over_locations(scenario, workers, |loc| {
        let mut acc = Acc::default();
        for f in 0..scenario.fadings {
            let (loc, f) = (loc as u64, f as u64);
            let mut h: Vec<Vec<CVector>> = Vec::with_capacity(g);
            let mut h_hat: Vec<Vec<CVector>> = Vec::with_capacity(g);
            for psi in 0..g as u64 {
                let mut row = Vec::with_capacity(users);
                let mut row_hat = Vec::with_capacity(users);
                for k in 0..users as u64 {
                    let mut rng = seeds.stream(&[loc, f, psi, k, tag::FADING]);
                    let v = complex_normal_matrix(&mut rng, l, 1, 1.0)
                        .column(0)
                        .into_owned();
                    let mut rng = seeds.stream(&[loc, f, psi, k, tag::CSIT_ERROR]);
                    row_hat.push(corrupt_csit(&v, 1.0, var, &mut rng)?.0);
                    row.push(v);
                }
                h.push(row);
                h_hat.push(row_hat);
            }

            for (prefix, groups, qs) in [("cacheless", 1, &q_base), ("vcc", g, &q_vcc)] {
                for &q in qs {
                    let xi = scenario.xi(groups * q)?;
                    let per_user = |p: &f64| p / (groups * q) as f64;
                    let mut perfect = vec![0.0; np];
                    let mut csit = vec![0.0; np];
                    let mut csir = vec![vec![0.0; np]; scenario.csir_variances.len()];
                    for psi in 0..groups {
                        let hs = &h[psi][..q];
                        let gains = zf_column_gains(hs)?;
                        for (i, p) in points.iter().enumerate() {
                            perfect[i] += gains
                                .iter()
                                .map(|g| (per_user(&p.watts) * g / n0).ln_1p())
                                .sum::<f64>();
                            let powers = vec![per_user(&p.watts); q];
                            let sinr = zf_imperfect_csit(&h_hat[psi][..q], hs, &powers, n0)?;
                            csit[i] += sinr.iter().map(|s| s.ln_1p()).sum::<f64>();
                        }
                        if csir.is_empty() {
                            continue;
                        }
                        let own = own_coupling(&h_hat[psi][..q], hs)?;
                        for (j, &v) in scenario.csir_variances.iter().enumerate() {
                            for (k, &a) in own.iter().enumerate() {
                                let mut rng = seeds.stream(&[
                                    loc,
                                    f,
                                    psi as u64,
                                    k as u64,
                                    tag::CSIR_ERROR,
                                    j as u64,
                                ]);
                                let (a_hat, _) = corrupt_coupling(a, v, &mut rng);
                                for (i, p) in points.iter().enumerate() {
                                    csir[j][i] +=
                                        zf_imperfect_csir_sinr(p.watts, groups, q, v, a_hat, n0)
                                            .ln_1p();
                                }
                            }
                        }
                    }
                    for i in 0..np {
                        acc.push(&format!("{prefix}_zf"), q, i, np, xi * perfect[i]);
                        acc.push(&format!("{prefix}_zf_csit"), q, i, np, xi * csit[i]);
                        for (j, &v) in scenario.csir_variances.iter().enumerate() {
                            acc.push(&csir_series(prefix, v), q, i, np, xi * csir[j][i]);
                        }
                    }
                }
            }
        }
        Ok(acc)
    })?;

    let mut variants = vec!["zf".to_string(), "zf_csit".to_string()];
    variants.extend(
        scenario
            .csir_variances
            .iter()
            .map(|v| format!("zf_csir_{v}")),
    );
    let mut layout = Vec::new();
    for v in &variants {
        let base = format!("cacheless_{v}");
        layout.push((base.clone(), Role::Base));
        layout.push((format!("vcc_{v}"), Role::Versus(base)));
    }
    Ok(build_report(scenario, &points, &acc, &layout))
}

/// `1/[(HᵀH*)⁻¹]_kk` for single-antenna channels `hs`.
fn zf_column_gains(hs: &[CVector]) -> Result<Vec<f64>> {
    let ginv = invert_gram(&gram(&CMatrix::from_columns(hs))).ok_or(Error::NumericalSingularity)?;
    Ok(ginv.diagonal().iter().map(|d| 1.0 / d.re).collect())
}

/// True coupling `h_kᵀ v̂_k` of every user with its own normalized ZF column
/// built from the estimates.
fn own_coupling(h_hat: &[CVector], h: &[CVector]) -> Result<Vec<Complex64>> {
    let est = CMatrix::from_columns(h_hat);
    let ginv = invert_gram(&gram(&est)).ok_or(Error::NumericalSingularity)?;
    let v = est.map(|z| z.conj()) * ginv;
    Ok(h.iter()
        .enumerate()
        .map(|(k, hk)| {
            let col = v.column(k);
            hk.iter()
                .zip(col.iter())
                .map(|(a, b)| a * b)
                .sum::<Complex64>()
                / col.norm()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::scenario::{Pathloss, PowerSweep};

    fn small(csit: f64, csir: Vec<f64>) -> Scenario {
        Scenario {
            kind: ExperimentKind::ImperfectCsi,
            pathloss: Pathloss::Unit,
            l: 6,
            groups: 3,
            antennas: vec![1],
            power: PowerSweep::SnrDb(vec![0.0, 20.0]),
            csit_variance: csit,
            csir_variances: csir,
            locations: 2,
            fadings: 3,
            seed: 9,
            ..Scenario::default()
        }
    }

    #[test]
    fn zero_errors_match_perfect() {
        let report = run_imperfect_csi(&small(0.0, vec![0.0]), 1).unwrap();
        for scheme in ["vcc", "cacheless"] {
            let perfect: Vec<_> = report.rows_for(&format!("{scheme}_zf")).collect();
            for other in [format!("{scheme}_zf_csit"), csir_series(scheme, 0.0)] {
                for (a, b) in perfect.iter().zip(report.rows_for(&other)) {
                    assert!(
                        (a.mean_rate_nats - b.mean_rate_nats).abs() < 1e-9 * a.mean_rate_nats,
                        "{other}"
                    );
                }
            }
        }
    }

    #[test]
    fn errors_cost_rate() {
        let report = run_imperfect_csi(&small(0.05, vec![0.05]), 2).unwrap();
        let perfect = report
            .find("cacheless_zf_opt", None, 1e9)
            .unwrap()
            .mean_rate_nats;
        let csit = report
            .find("cacheless_zf_csit_opt", None, 1e9)
            .unwrap()
            .mean_rate_nats;
        assert!(csit < perfect);
    }
}
