use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Running first and second moments of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.sum / self.n as f64
    }

    /// Standard error of the mean, treating the samples as independent.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.mean();
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scheme: String,
    pub ptot_dbm: f64,
    pub snr_db: f64,
    pub q: usize,
    pub mean_rate_nats: f64,
    pub stderr: f64,
    pub gain: Option<f64>,
    pub gain_optimized: Option<f64>,
    pub n_locations: usize,
    pub n_fadings: usize,
    pub seed: u64,
}

impl ReportRow {
    pub fn mean_rate_bits(&self) -> f64 {
        self.mean_rate_nats / std::f64::consts::LN_2
    }
}

pub const CSV_HEADER: &str =
    "scheme,ptot_dbm,snr_db,q,mean_rate_nats,mean_rate_bits,stderr,gain,gain_optimized,n_locations,n_fadings,seed";

/// Averaged rates of every scheme at every (users-per-group, power) point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateReport {
    pub rows: Vec<ReportRow>,
}

/// Mean rate of one scheme per users-per-group value over the power grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub powers_dbm: Vec<f64>,
    pub by_q: BTreeMap<usize, Vec<f64>>,
}

/// How [`effective_gain`] picks the users-per-group values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainMode {
    Fixed {
        q: usize,
        q_base: usize,
    },
    /// Ratio of the per-point maxima over all values of each side.
    Optimized,
}

impl RateCurve {
    /// Best users-per-group value and its rate at every power point; ties go
    /// to the smaller value.
    pub fn optimize_q(&self) -> Vec<(usize, f64)> {
        (0..self.powers_dbm.len())
            .map(|i| {
                let mut best = (0, f64::NEG_INFINITY);
                for (&q, rates) in &self.by_q {
                    if rates[i] > best.1 {
                        best = (q, rates[i]);
                    }
                }
                best
            })
            .collect()
    }
}

/// Ratio of the mean rates of `vcc` and `base` at every power point.
pub fn effective_gain(vcc: &RateCurve, base: &RateCurve, mode: GainMode) -> Result<Vec<f64>> {
    if vcc.powers_dbm != base.powers_dbm {
        return Err(Error::GridMismatch);
    }
    match mode {
        GainMode::Fixed { q, q_base } => {
            let missing = |q| Error::InvalidConfiguration(format!("no rates recorded for Q = {q}"));
            let num = vcc.by_q.get(&q).ok_or_else(|| missing(q))?;
            let den = base.by_q.get(&q_base).ok_or_else(|| missing(q_base))?;
            Ok(num.iter().zip(den).map(|(a, b)| a / b).collect())
        }
        GainMode::Optimized => Ok(vcc
            .optimize_q()
            .iter()
            .zip(base.optimize_q())
            .map(|((_, a), (_, b))| a / b)
            .collect()),
    }
}

impl RateReport {
    pub fn rows_for<'a>(&'a self, scheme: &str) -> impl Iterator<Item = &'a ReportRow> + use<'a> {
        let scheme = scheme.to_string();
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }

    /// Row of `scheme` with users-per-group `q` at the power point closest to `ptot_dbm`.
    pub fn find(&self, scheme: &str, q: Option<usize>, ptot_dbm: f64) -> Option<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| r.scheme == scheme)
            .filter(|r| q.is_none_or(|q| r.q == q))
            .min_by(|a, b| {
                (a.ptot_dbm - ptot_dbm)
                    .abs()
                    .total_cmp(&(b.ptot_dbm - ptot_dbm).abs())
            })
    }

    pub fn schemes(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.scheme.as_str()) {
                out.push(&r.scheme);
            }
        }
        out
    }

    pub fn curve(&self, scheme: &str) -> Option<RateCurve> {
        let mut powers: Vec<f64> = Vec::new();
        let mut by_q: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in self.rows_for(scheme) {
            if !powers.contains(&r.ptot_dbm) {
                powers.push(r.ptot_dbm);
            }
            by_q.entry(r.q).or_default().push(r.mean_rate_nats);
        }
        if powers.is_empty() || by_q.values().any(|v| v.len() != powers.len()) {
            return None;
        }
        Some(RateCurve {
            powers_dbm: powers,
            by_q,
        })
    }

    /// CSV text: `# `-prefixed header lines, the column header, then the rows.
    pub fn to_csv(&self, header_lines: &[String]) -> String {
        let mut out = String::new();
        for line in header_lines {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.4},{:.4},{},{:.6},{:.6},{:.6},{},{},{},{},{}",
                r.scheme,
                r.ptot_dbm,
                r.snr_db,
                r.q,
                r.mean_rate_nats,
                r.mean_rate_bits(),
                r.stderr,
                opt(r.gain),
                opt(r.gain_optimized),
                r.n_locations,
                r.n_fadings,
                r.seed
            );
        }
        out
    }
}
