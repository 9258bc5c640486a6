//! Water-filling over the parallel streams of one user.

use crate::error::{Error, Result};

/// Optimal split of a power budget over streams with gains `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waterfill {
    /// Per-stream powers in the order of the input gains.
    pub powers: Vec<f64>,
    /// Water level `1/α`; every active stream has `p + N0/λ = level`.
    pub level: f64,
    /// Number of streams with positive power.
    pub active: usize,
}

/// Splits `budget` over streams with gains `eigenvalues` to maximize
/// `Σ ln(1 + p_q λ_q / N0)`.
pub fn waterfill(eigenvalues: &[f64], budget: f64, n0: f64) -> Waterfill {
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let mut powers = vec![0.0; eigenvalues.len()];
    if order.is_empty() {
        return Waterfill {
            powers,
            level: 0.0,
            active: 0,
        };
    }
    let floor = |i: usize| n0 / eigenvalues[order[i]];
    if budget <= 0.0 {
        return Waterfill {
            powers,
            level: floor(0),
            active: 0,
        };
    }
    let mut sum_floor = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for k in 0..order.len() {
        let candidate = (budget + sum_floor + floor(k)) / (k + 1) as f64;
        if candidate <= floor(k) {
            break;
        }
        sum_floor += floor(k);
        level = candidate;
        active = k + 1;
    }
    for &i in &order[..active] {
        powers[i] = (level - n0 / eigenvalues[i]).max(0.0);
    }
    Waterfill {
        powers,
        level,
        active,
    }
}

/// Rate of one user as a function of its power budget under water-filling,
/// `ξ Σ ln(1 + p_q λ_q / N0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UserRateFunction {
    eigenvalues: Vec<f64>,
    n0: f64,
    xi: f64,
    /// Prefix sums of `ln λ_q`, descending order.
    log_prefix: Vec<f64>,
}

impl UserRateFunction {
    pub fn new(mut eigenvalues: Vec<f64>, n0: f64, xi: f64) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidConfiguration(
                "stream gains must be positive and finite".into(),
            ));
        }
        if !(n0 > 0.0) || !(0.0..=1.0).contains(&xi) {
            return Err(Error::InvalidConfiguration(
                "noise must be positive and 0 ≤ ξ ≤ 1".into(),
            ));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let mut log_prefix = Vec::with_capacity(eigenvalues.len());
        let mut acc = 0.0;
        for &l in &eigenvalues {
            acc += l.ln();
            log_prefix.push(acc);
        }
        Ok(Self {
            eigenvalues,
            n0,
            xi,
            log_prefix,
        })
    }

    /// Gains in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn streams(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn allocate(&self, power: f64) -> Waterfill {
        waterfill(&self.eigenvalues, power, self.n0)
    }

    pub fn rate(&self, power: f64) -> f64 {
        let wf = self.allocate(power);
        self.xi
            * wf.powers
                .iter()
                .zip(&self.eigenvalues)
                .map(|(p, l)| (p * l / self.n0).ln_1p())
                .sum::<f64>()
    }

    /// Power needed to reach `rate`, in closed form.
    ///
    /// With the `k` strongest streams active the water level solves
    /// `Σ_{q≤k} ln(λ_q w / N0) = rate/ξ`; the right `k` is the smallest one
    /// whose level leaves stream `k+1` dry.
    pub fn inverse(&self, rate: f64) -> f64 {
        if rate <= 0.0 {
            return 0.0;
        }
        if self.xi == 0.0 {
            return f64::INFINITY;
        }
        let s = rate / self.xi;
        let j = self.eigenvalues.len();
        for k in 1..=j {
            // ln(w / N0)
            let log_level = (s - self.log_prefix[k - 1]) / k as f64;
            let last = k == j || (self.eigenvalues[k].ln() + log_level) <= 0.0;
            if last {
                return self.eigenvalues[..k]
                    .iter()
                    .map(|&l| self.n0 / l * (l.ln() + log_level).exp_m1())
                    .sum();
            }
        }
        unreachable!("the last stream always terminates the scan")
    }
}
