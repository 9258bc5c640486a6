//! VCC and the multi-server baseline over symmetric single-antenna channels.

use super::report::RateReport;
use super::runner::{build_report, over_locations, Acc, Role};
use super::scenario::{ExperimentKind, Scenario};
use crate::allocation::{mmf_bd_mrc, UserRateFunction};
use crate::channel::{GroupChannel, UserChannel};
use crate::error::{Error, Result};
use crate::linalg::{complex_normal_matrix, CMatrix, CVector};
use crate::precoding::{bd_mrc, msv_beamformers, msv_rates};
use crate::rng::{tag, SeedTree};

/// Cacheless and VCC BD-MRC with MMF against the original multi-server scheme
/// (`L − 1` unicast streams) and its modified form (unicast count swept).
pub fn run_msv(scenario: &Scenario, workers: usize) -> Result<RateReport> {
    if scenario.kind != ExperimentKind::Msv {
        return Err(Error::InvalidConfiguration(
            "not a multi-server experiment".into(),
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

    let acc = over_locations(scenario, workers, |loc| {
        let mut acc = Acc::default();
        for f in 0..scenario.fadings {
            let draw = |path: &[u64]| -> CVector {
                let mut rng = seeds.stream(path);
                complex_normal_matrix(&mut rng, l, 1, 1.0)
                    .column(0)
                    .into_owned()
            };
            let (loc, f) = (loc as u64, f as u64);
            let h: Vec<Vec<CVector>> = (0..g as u64)
                .map(|psi| {
                    (0..users as u64)
                        .map(|k| draw(&[loc, f, psi, k, tag::FADING]))
                        .collect()
                })
                .collect();
            let group = |psi: usize, q: usize| {
                let users = h[psi][..q]
                    .iter()
                    .map(|v| UserChannel {
                        h: CMatrix::from_column_slice(l, 1, v.as_slice()),
                        beta: 1.0,
                    })
                    .collect();
                GroupChannel::from_users(l, users)
            };
            let mut eigs: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; users + 1]; g];
            let mut bd = |psi: usize, q: usize| -> Result<Vec<f64>> {
                if eigs[psi][q].is_none() {
                    let sol = bd_mrc(&group(psi, q)?).map_err(|e| match e {
                        Error::BdInfeasible { user, .. } => {
                            Error::BdInfeasible { group: psi, user }
                        }
                        other => other,
                    })?;
                    eigs[psi][q] = Some(sol.users.iter().map(|u| u.eigenvalues[0]).collect());
                }
                Ok(eigs[psi][q].clone().expect("filled above"))
            };
            for (series, groups, qs) in
                [("cacheless_bd_mrc", 1, &q_base), ("vcc_bd_mrc", g, &q_vcc)]
            {
                for &q in qs {
                    let xi = scenario.xi(groups * q)?;
                    let mut funcs = Vec::with_capacity(groups * q);
                    for psi in 0..groups {
                        for lambda in bd(psi, q)? {
                            funcs.push(UserRateFunction::new(vec![lambda], n0, xi)?);
                        }
                    }
                    for (i, p) in points.iter().enumerate() {
                        acc.push(series, q, i, np, mmf_bd_mrc(&funcs, p.watts)?.sum_rate);
                    }
                }
            }

            let h_mc: Vec<CVector> = (0..g as u64)
                .map(|k| draw(&[loc, f, 0, k, tag::MSV_CHANNEL]))
                .collect();
            let h_uc: Vec<CVector> = (0..(l - 1) as u64)
                .map(|k| draw(&[loc, f, 1, k, tag::MSV_CHANNEL]))
                .collect();
            for q_uc in 1..l {
                let sol = msv_beamformers(&h_mc, &h_uc[..q_uc])?;
                for (i, p) in points.iter().enumerate() {
                    let r = msv_rates(
                        &sol,
                        &h_mc,
                        &h_uc[..q_uc],
                        p.watts,
                        n0,
                        scenario.coherence_symbols,
                        scenario.pilot_symbols,
                    )?;
                    acc.push("msv_modified", q_uc, i, np, r);
                    if q_uc == l - 1 {
                        acc.push("msv", q_uc, i, np, r);
                    }
                }
            }
        }
        Ok(acc)
    })?;

    let base = || Role::Versus("cacheless_bd_mrc".into());
    let layout = [
        ("cacheless_bd_mrc".to_string(), Role::Base),
        ("vcc_bd_mrc".to_string(), base()),
        ("msv_modified".to_string(), base()),
        ("msv".to_string(), base()),
    ];
    Ok(build_report(scenario, &points, &acc, &layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::scenario::{Pathloss, PowerSweep};

    fn small() -> Scenario {
        Scenario {
            kind: ExperimentKind::Msv,
            pathloss: Pathloss::Unit,
            l: 6,
            groups: 3,
            antennas: vec![1],
            power: PowerSweep::SnrDb(vec![0.0, 30.0]),
            locations: 2,
            fadings: 3,
            seed: 5,
            ..Scenario::default()
        }
    }

    #[test]
    fn modified_dominates_original() {
        let report = run_msv(&small(), 2).unwrap();
        let orig: Vec<_> = report.rows_for("msv").collect();
        let modified: Vec<_> = report.rows_for("msv_modified_opt").collect();
        assert_eq!(orig.len(), 2);
        for (o, m) in orig.iter().zip(modified) {
            assert!(m.mean_rate_nats >= o.mean_rate_nats);
            assert!(m.gain_optimized.unwrap() >= o.gain.unwrap());
        }
    }

    #[test]
    fn multi_antenna_is_unsupported() {
        let s = Scenario {
            antennas: vec![2],
            ..small()
        };
        assert!(matches!(run_msv(&s, 1), Err(Error::Unsupported(_))));
    }
}
