//! Runs a resolved configuration and checks the report.

use std::fmt::Write as _;

use vcc_core::experiments::{run_experiment, RateReport, ReportRow};
use vcc_core::Result;

use crate::config::RunConfig;

/// Relative slack of the gain identity check; the identity is computed from
/// the same numbers, so only rounding separates the two sides.
const GAIN_IDENTITY_TOL: f64 = 1e-12;

pub struct Outcome {
    pub report: RateReport,
    pub csv: String,
    pub summary: String,
    /// Broken invariants; empty on a clean run.
    pub violations: Vec<String>,
}

pub fn run(config: &RunConfig, workers: usize) -> Result<Outcome> {
    let report = run_experiment(&config.scenario, workers)?;
    let csv = report.to_csv(&config.echo());
    let violations = check(&report);
    let summary = summarize(&report);
    Ok(Outcome {
        report,
        csv,
        summary,
        violations,
    })
}

/// Checks that must hold for every report regardless of sampling noise.
pub fn check(report: &RateReport) -> Vec<String> {
    let mut out = Vec::new();
    if report.rows.is_empty() {
        out.push("the report has no rows".to_string());
    }
    for r in &report.rows {
        let at = || format!("{} at {:.2} dBm, Q={}", r.scheme, r.ptot_dbm, r.q);
        if !(r.mean_rate_nats.is_finite() && r.mean_rate_nats >= 0.0) {
            out.push(format!(
                "{}: rate {} is not a finite nonnegative number",
                at(),
                r.mean_rate_nats
            ));
        }
        if !r.stderr.is_finite() {
            out.push(format!("{}: standard error is not finite", at()));
        }
        for g in [r.gain, r.gain_optimized].into_iter().flatten() {
            if !(g.is_finite() && g >= 0.0) {
                out.push(format!(
                    "{}: gain {g} is not a finite nonnegative number",
                    at()
                ));
            }
        }
    }
    // Optimized gain is the ratio of the two maxima.
    for opt in report.rows.iter().filter(|r| r.gain_optimized.is_some()) {
        let name = opt.scheme.trim_end_matches("_opt");
        let best = |scheme: &str| {
            report
                .rows_for(scheme)
                .filter(|r| r.ptot_dbm == opt.ptot_dbm)
                .map(|r| r.mean_rate_nats)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let gain_row = report
            .rows_for(name)
            .find(|r| r.ptot_dbm == opt.ptot_dbm && r.q == opt.q);
        let Some(ratio) = gain_row.and_then(|r| r.gain.map(|g| g / r.mean_rate_nats)) else {
            continue;
        };
        // `gain / rate` recovers 1 / best baseline.
        let expect = best(name) * ratio;
        let got = opt.gain_optimized.expect("filtered");
        if (got - expect).abs() > GAIN_IDENTITY_TOL * expect.abs().max(1.0) {
            out.push(format!(
                "{name}: optimized gain {got} differs from ratio of maxima {expect}"
            ));
        }
    }
    out
}

fn find<'a>(report: &'a RateReport, scheme: &str, row: &ReportRow) -> Option<&'a ReportRow> {
    report
        .rows_for(scheme)
        .find(|r| r.ptot_dbm == row.ptot_dbm && r.q == row.q)
}

/// Per-point best rates, gains and, for ZF, the analytic band.
pub fn summarize(report: &RateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<32} {:>9} {:>8} {:>3} {:>12} {:>9} {:>7} {:>7}  band",
        "scheme", "P_tot/dBm", "SNR/dB", "Q", "bit/s/Hz", "±se", "gain", "gain*"
    );
    for scheme in report.schemes() {
        if !scheme.ends_with("_opt") {
            continue;
        }
        let base = scheme.trim_end_matches("_opt");
        for r in report.rows_for(scheme) {
            let gain = find(report, base, r).and_then(|x| x.gain);
            let fmt = |g: Option<f64>| g.map(|g| format!("{g:.3}")).unwrap_or_else(|| "-".into());
            let band = match (
                find(report, &format!("{base}_lower"), r),
                find(report, &format!("{base}_upper"), r),
            ) {
                (Some(lo), Some(hi)) => format!(
                    "[{:.3}, {:.3}]",
                    lo.mean_rate_nats / std::f64::consts::LN_2,
                    hi.mean_rate_nats / std::f64::consts::LN_2
                ),
                _ => String::new(),
            };
            let _ = writeln!(
                out,
                "{:<32} {:>9.2} {:>8.2} {:>3} {:>12.4} {:>9.4} {:>7} {:>7}  {band}",
                base,
                r.ptot_dbm,
                r.snr_db,
                r.q,
                r.mean_rate_bits(),
                r.stderr / std::f64::consts::LN_2,
                fmt(gain),
                fmt(r.gain_optimized),
            );
        }
    }
    out
}
