//! Monte Carlo driver for the rate experiments and shared plumbing.
//!
//! Every random draw comes from a substream addressed by its location,
//! fading and user indices, so each location is an independent task. Tasks
//! run on a private thread pool, are collected in location order and merged
//! sequentially, which keeps the output independent of the worker count.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::report::{Moments, RateReport, ReportRow};
use super::scenario::{ExperimentKind, Pathloss, PowerPoint, RateCandidates, Scenario};
use crate::allocation::{
    equal_gain_mmf, mmf_bd_mrc, mmf_massive_mimo, zf_mmf_bounds, ServedUser, UserRateFunction,
};
use crate::channel::{sample_user_position, GroupChannel, UserChannel};
use crate::error::{Error, Result};
use crate::linalg::complex_normal_matrix;
use crate::precoding::{bd_mrc, zf_gains};
use crate::rng::{tag, SeedTree};

/// Per-series, per-`q` moments over the power grid.
#[derive(Debug, Clone, Default)]
pub(crate) struct Acc {
    map: BTreeMap<(String, usize), Vec<Moments>>,
}

impl Acc {
    pub(crate) fn push(&mut self, series: &str, q: usize, point: usize, points: usize, x: f64) {
        let slot = self
            .map
            .entry((series.to_string(), q))
            .or_insert_with(|| vec![Moments::default(); points]);
        slot[point].push(x);
    }

    fn merge(&mut self, other: &Acc) {
        for (key, moments) in &other.map {
            match self.map.get_mut(key) {
                Some(mine) => mine.iter_mut().zip(moments).for_each(|(a, b)| a.merge(b)),
                None => {
                    self.map.insert(key.clone(), moments.clone());
                }
            }
        }
    }

    fn series(&self, name: &str) -> BTreeMap<usize, &Vec<Moments>> {
        self.map
            .iter()
            .filter(|((s, _), _)| s == name)
            .map(|((_, q), m)| (*q, m))
            .collect()
    }
}

/// How a series enters the report.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Role {
    /// A baseline: gets a companion `_opt` series, no gain columns.
    Base,
    /// Compared against the named baseline: `gain` on every row and an `_opt`
    /// series carrying the optimized gain.
    Versus(String),
    /// Reported as is.
    Plain,
}

/// Runs `task` for every location on `workers` threads and merges the
/// results in location order.
pub(crate) fn over_locations<F>(scenario: &Scenario, workers: usize, task: F) -> Result<Acc>
where
    F: Fn(usize) -> Result<Acc> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfiguration(format!("cannot start worker pool: {e}")))?;
    let parts: Vec<Result<Acc>> =
        pool.install(|| (0..scenario.locations).into_par_iter().map(&task).collect());
    let mut total = Acc::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total)
}

/// Turns merged moments into report rows, series in the given order.
pub(crate) fn build_report(
    scenario: &Scenario,
    points: &[PowerPoint],
    acc: &Acc,
    layout: &[(String, Role)],
) -> RateReport {
    let best = |series: &BTreeMap<usize, &Vec<Moments>>, i: usize| -> Option<(usize, Moments)> {
        let mut out: Option<(usize, Moments)> = None;
        for (&q, m) in series {
            if out.is_none_or(|(_, b)| m[i].mean() > b.mean()) {
                out = Some((q, m[i]));
            }
        }
        out
    };
    let row = |scheme: &str, i: usize, q: usize, m: &Moments| ReportRow {
        scheme: scheme.to_string(),
        ptot_dbm: points[i].dbm,
        snr_db: points[i].snr_db,
        q,
        mean_rate_nats: m.mean(),
        stderr: m.stderr(),
        gain: None,
        gain_optimized: None,
        n_locations: scenario.locations,
        n_fadings: scenario.fadings,
        seed: scenario.seed,
    };

    let mut rows = Vec::new();
    for (name, role) in layout {
        let series = acc.series(name);
        if series.is_empty() {
            continue;
        }
        let base = match role {
            Role::Versus(b) => Some(acc.series(b)),
            _ => None,
        };
        let base_best = |i: usize| {
            base.as_ref()
                .and_then(|b| best(b, i))
                .map(|(_, m)| m.mean())
        };
        for i in 0..points.len() {
            for (&q, m) in &series {
                let mut r = row(name, i, q, &m[i]);
                r.gain = base_best(i).map(|b| r.mean_rate_nats / b);
                rows.push(r);
            }
        }
        if *role != Role::Plain {
            let opt = format!("{name}_opt");
            for i in 0..points.len() {
                let (q, m) = best(&series, i).expect("series is nonempty");
                let mut r = row(&opt, i, q, &m);
                r.gain_optimized = base_best(i).map(|b| r.mean_rate_nats / b);
                rows.push(r);
            }
        }
    }
    RateReport { rows }
}

/// Runs the experiment selected by `scenario.kind`.
pub fn run_experiment(scenario: &Scenario, workers: usize) -> Result<RateReport> {
    match scenario.kind {
        ExperimentKind::Rates => run_rates(scenario, workers),
        ExperimentKind::Msv => super::msv::run_msv(scenario, workers),
        ExperimentKind::ImperfectCsi => super::imperfect::run_imperfect_csi(scenario, workers),
    }
}

/// VCC and cacheless BD-MRC with MMF, plus the large-array approximation.
pub fn run_vcc_bd_mrc(scenario: &Scenario, workers: usize) -> Result<RateReport> {
    let mut s = scenario.clone();
    s.schemes.bd_mrc = true;
    s.schemes.zf = false;
    run_rates(&s, workers)
}

/// VCC and cacheless ZF with pathloss-based MMF power allocation, plus the
/// analytic lower and upper bounds.
pub fn run_vcc_zf(scenario: &Scenario, workers: usize) -> Result<RateReport> {
    let mut s = scenario.clone();
    s.schemes.bd_mrc = false;
    s.schemes.zf = true;
    run_rates(&s, workers)
}

/// Plan for one receive-antenna count.
struct AntennaPlan {
    m: usize,
    suffix: String,
    c: RateCandidates,
    /// Users per group that need a channel.
    users: usize,
}

fn run_rates(scenario: &Scenario, workers: usize) -> Result<RateReport> {
    if scenario.kind != ExperimentKind::Rates {
        return Err(Error::InvalidConfiguration("not a rate experiment".into()));
    }
    scenario.validate()?;
    let points = scenario.power.points(scenario.noise_watts);
    let plans = scenario
        .antennas
        .iter()
        .map(|&m| {
            let c = scenario.rate_candidates(m)?;
            let users = [&c.bd_q, &c.bd_q_base, &c.zf_q, &c.zf_q_base]
                .iter()
                .filter_map(|v| v.last().copied())
                .max()
                .unwrap_or(0);
            let suffix = if scenario.antennas.len() > 1 {
                format!("_m{m}")
            } else {
                String::new()
            };
            Ok(AntennaPlan {
                m,
                suffix,
                c,
                users,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let seeds = SeedTree::new(scenario.seed);
    let acc = over_locations(scenario, workers, |loc| {
        rates_location(scenario, &seeds, &points, &plans, loc)
    })?;

    let mut layout = Vec::new();
    for p in &plans {
        let n = |s: &str| format!("{s}{}", p.suffix);
        if scenario.schemes.bd_mrc {
            layout.push((n("cacheless_bd_mrc"), Role::Base));
            layout.push((n("vcc_bd_mrc"), Role::Versus(n("cacheless_bd_mrc"))));
            layout.push((n("cacheless_bd_mrc_asymptotic"), Role::Base));
            layout.push((
                n("vcc_bd_mrc_asymptotic"),
                Role::Versus(n("cacheless_bd_mrc_asymptotic")),
            ));
        }
        if scenario.schemes.zf {
            layout.push((n("cacheless_zf"), Role::Base));
            layout.push((n("vcc_zf"), Role::Versus(n("cacheless_zf"))));
            for s in [
                "cacheless_zf_lower",
                "cacheless_zf_upper",
                "vcc_zf_lower",
                "vcc_zf_upper",
            ] {
                layout.push((n(s), Role::Plain));
            }
        }
    }
    Ok(build_report(scenario, &points, &acc, &layout))
}

fn rates_location(
    scenario: &Scenario,
    seeds: &SeedTree,
    points: &[PowerPoint],
    plans: &[AntennaPlan],
    loc: usize,
) -> Result<Acc> {
    let (l, g, n0) = (scenario.l, scenario.groups, scenario.noise_watts);
    let np = points.len();
    let max_users = plans.iter().map(|p| p.users).max().unwrap_or(0);
    let betas: Vec<Vec<f64>> = (0..g)
        .map(|psi| {
            (0..max_users)
                .map(|k| match &scenario.pathloss {
                    Pathloss::Cell(geom) => {
                        let mut rng =
                            seeds.stream(&[loc as u64, psi as u64, k as u64, tag::POSITION]);
                        sample_user_position(geom, &mut rng).beta
                    }
                    Pathloss::Unit => 1.0,
                })
                .collect()
        })
        .collect();
    let served = |groups: usize, q: usize, m: usize| -> Vec<ServedUser> {
        (0..groups)
            .flat_map(|psi| (0..q).map(move |k| (psi, k)))
            .map(|(psi, k)| ServedUser {
                beta: betas[psi][k],
                antennas: m,
                group: psi,
            })
            .collect()
    };

    let mut acc = Acc::default();
    for plan in plans {
        let m = plan.m;
        let name = |s: &str| format!("{s}{}", plan.suffix);
        // (series prefix, groups, candidates) for VCC and the cacheless baseline.
        let bd_runs = [
            ("vcc_bd_mrc", g, &plan.c.bd_q),
            ("cacheless_bd_mrc", 1, &plan.c.bd_q_base),
        ];
        let zf_runs = [
            ("vcc_zf", g, &plan.c.zf_q),
            ("cacheless_zf", 1, &plan.c.zf_q_base),
        ];

        for (prefix, groups, qs) in bd_runs {
            let series = name(&format!("{prefix}_asymptotic"));
            for &q in qs {
                let xi = scenario.xi(groups * q * m)?;
                let users = served(groups, q, m);
                for (i, p) in points.iter().enumerate() {
                    let r = mmf_massive_mimo(&users, l, xi, n0, p.watts)?.sum_rate;
                    acc.push(&series, q, i, np, r);
                }
            }
        }

        // ZF power depends on pathloss only: per (run, q, point) the power of
        // every stream, in served-user order.
        let mut zf_powers: Vec<BTreeMap<usize, Vec<Vec<f64>>>> = Vec::new();
        for (prefix, groups, qs) in zf_runs {
            let mut by_q = BTreeMap::new();
            for &q in qs {
                let xi = scenario.xi(groups * q * m)?;
                let users = served(groups, q, m);
                let mut per_point = Vec::with_capacity(np);
                for (i, p) in points.iter().enumerate() {
                    let (lower, upper) = zf_mmf_bounds(&users, l, xi, n0, p.watts)?;
                    acc.push(&name(&format!("{prefix}_lower")), q, i, np, lower.sum_rate);
                    acc.push(&name(&format!("{prefix}_upper")), q, i, np, upper.sum_rate);
                    let terms: Vec<(usize, f64)> = users
                        .iter()
                        .map(|u| (m, u.beta * (l - q * m) as f64))
                        .collect();
                    let alloc = equal_gain_mmf(&terms, xi, n0, p.watts)?;
                    per_point.push((0..users.len()).map(|u| alloc.symbol_power(u, m)).collect());
                }
                by_q.insert(q, per_point);
            }
            zf_powers.push(by_q);
        }

        for f in 0..scenario.fadings {
            let channels: Vec<Vec<UserChannel>> = (0..g)
                .map(|psi| {
                    (0..plan.users)
                        .map(|k| {
                            let mut rng = seeds.stream(&[
                                loc as u64,
                                f as u64,
                                psi as u64,
                                k as u64,
                                tag::FADING,
                            ]);
                            let beta = betas[psi][k];
                            UserChannel {
                                h: complex_normal_matrix(&mut rng, l, m, beta),
                                beta,
                            }
                        })
                        .collect()
                })
                .collect();
            let group =
                |psi: usize, q: usize| GroupChannel::from_users(l, channels[psi][..q].to_vec());

            // BD eigenvalues shared between VCC and the baseline: group 0 with
            // q users is the same problem in both.
            let mut eigs: BTreeMap<(usize, usize), Vec<Vec<f64>>> = BTreeMap::new();
            for (_, groups, qs) in bd_runs {
                for &q in qs {
                    for psi in 0..groups {
                        if eigs.contains_key(&(psi, q)) {
                            continue;
                        }
                        let sol = bd_mrc(&group(psi, q)?).map_err(|e| match e {
                            Error::BdInfeasible { user, .. } => {
                                Error::BdInfeasible { group: psi, user }
                            }
                            other => other,
                        })?;
                        eigs.insert(
                            (psi, q),
                            sol.users.into_iter().map(|u| u.eigenvalues).collect(),
                        );
                    }
                }
            }
            for (prefix, groups, qs) in bd_runs {
                let series = name(prefix);
                for &q in qs {
                    let xi = scenario.xi(groups * q * m)?;
                    let funcs = (0..groups)
                        .flat_map(|psi| eigs[&(psi, q)].iter())
                        .map(|e| UserRateFunction::new(e.clone(), n0, xi))
                        .collect::<Result<Vec<_>>>()?;
                    for (i, p) in points.iter().enumerate() {
                        acc.push(&series, q, i, np, mmf_bd_mrc(&funcs, p.watts)?.sum_rate);
                    }
                }
            }

            for ((prefix, groups, qs), powers) in zf_runs.iter().zip(&zf_powers) {
                let series = name(prefix);
                for &q in qs.iter() {
                    let xi = scenario.xi(groups * q * m)?;
                    let mut gains = Vec::with_capacity(groups * q * m);
                    for psi in 0..*groups {
                        gains.extend(zf_gains(&group(psi, q)?)?);
                    }
                    for i in 0..np {
                        let sym = &powers[&q][i];
                        let r: f64 = gains
                            .iter()
                            .enumerate()
                            .map(|(col, gain)| (sym[col / m] * gain / n0).ln_1p())
                            .sum();
                        acc.push(&series, q, i, np, xi * r);
                    }
                }
            }
        }
    }
    Ok(acc)
}
