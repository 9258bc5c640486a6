//! Max-min fair power allocation across the users served in one shot.
//!
//! Users interfere with nobody after BD-MRC and cache-aided cancellation, so
//! the max-min optimum gives every user the same rate `R/N`, and `R` is the
//! root of `Σ_i f_i⁻¹(R/N) = P_tot` with `f_i` the water-filled rate of user
//! `i`. The root is bracketed by replacing every user's gains with its
//! smallest or its largest eigenvalue.

use super::bounds::equal_gain_mmf;
use super::waterfill::{UserRateFunction, Waterfill};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MmfSolution {
    /// Optimal sum of user rates, `N` times the common per-user rate.
    pub sum_rate: f64,
    pub per_user_rate: f64,
    /// Total power of every user.
    pub user_powers: Vec<f64>,
    /// Per-stream split inside every user.
    pub allocations: Vec<Waterfill>,
    /// Analytic `(lower, upper)` bounds on `sum_rate`.
    pub bracket: (f64, f64),
}

impl MmfSolution {
    pub fn total_power(&self) -> f64 {
        self.user_powers.iter().sum()
    }
}

/// Bounds on the MMF sum-rate from each user's smallest and largest gain.
pub fn mmf_brackets(users: &[UserRateFunction], p_tot: f64) -> Result<(f64, f64)> {
    let first = users
        .first()
        .ok_or_else(|| Error::InvalidConfiguration("no users to allocate power to".into()))?;
    let (xi, n0) = (first.xi(), first.n0());
    if users.iter().any(|u| u.xi() != xi || u.n0() != n0) {
        return Err(Error::InvalidConfiguration(
            "users must share ξ and N0".into(),
        ));
    }
    let lower: Vec<(usize, f64)> = users
        .iter()
        .map(|u| (u.streams(), u.lambda_min()))
        .collect();
    let upper: Vec<(usize, f64)> = users
        .iter()
        .map(|u| (u.streams(), u.lambda_max()))
        .collect();
    Ok((
        equal_gain_mmf(&lower, xi, n0, p_tot)?.sum_rate,
        equal_gain_mmf(&upper, xi, n0, p_tot)?.sum_rate,
    ))
}

const BISECTION_STEPS: usize = 400;

/// Max-min fair allocation of `p_tot` over `users`.
pub fn mmf_bd_mrc(users: &[UserRateFunction], p_tot: f64) -> Result<MmfSolution> {
    let bracket = mmf_brackets(users, p_tot)?;
    let n = users.len() as f64;
    if p_tot <= 0.0 || bracket.1 == 0.0 {
        return Ok(MmfSolution {
            sum_rate: 0.0,
            per_user_rate: 0.0,
            user_powers: vec![0.0; users.len()],
            allocations: users.iter().map(|u| u.allocate(0.0)).collect(),
            bracket,
        });
    }
    let total = |r: f64| users.iter().map(|u| u.inverse(r / n)).sum::<f64>();

    let (mut lo, mut hi) = bracket;
    // The bracket is exact in real arithmetic; nudge it if rounding put the
    // root just outside.
    while total(lo) > p_tot && lo > 0.0 {
        lo *= 1.0 - 1e-12;
    }
    while total(hi) < p_tot {
        hi *= 1.0 + 1e-12;
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) > p_tot {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let sum_rate = lo;
    let user_powers: Vec<f64> = users.iter().map(|u| u.inverse(sum_rate / n)).collect();
    let allocations = users
        .iter()
        .zip(&user_powers)
        .map(|(u, &p)| u.allocate(p))
        .collect();
    Ok(MmfSolution {
        sum_rate,
        per_user_rate: sum_rate / n,
        user_powers,
        allocations,
        bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn user(eigs: &[f64]) -> UserRateFunction {
        UserRateFunction::new(eigs.to_vec(), 1.0, 0.95).unwrap()
    }

    #[test]
    fn single_user_gets_everything() {
        let u = user(&[3.0, 1.0, 0.2]);
        let sol = mmf_bd_mrc(std::slice::from_ref(&u), 5.0).unwrap();
        assert!((sol.sum_rate - u.rate(5.0)).abs() < 1e-12 * sol.sum_rate);
    }

    #[test]
    fn identical_users_split_evenly() {
        let u = user(&[2.0, 0.5]);
        let sol = mmf_bd_mrc(&[u.clone(), u.clone()], 4.0).unwrap();
        assert!((sol.user_powers[0] - 2.0).abs() < 1e-10);
        assert!((sol.sum_rate - 2.0 * u.rate(2.0)).abs() < 1e-10);
    }

    #[test]
    fn equal_rates_and_budget() {
        let users = [user(&[5.0, 1.0]), user(&[0.3]), user(&[2.0, 2.0, 0.1])];
        let sol = mmf_bd_mrc(&users, 10.0).unwrap();
        assert!((sol.total_power() - 10.0).abs() < 1e-9 * 10.0);
        for (u, p) in users.iter().zip(&sol.user_powers) {
            assert!((u.rate(*p) - sol.per_user_rate).abs() < 1e-9 * sol.per_user_rate);
        }
        assert!(sol.bracket.0 <= sol.sum_rate && sol.sum_rate <= sol.bracket.1);
    }

    #[test]
    fn degenerate_bracket() {
        let users = [user(&[2.0, 2.0]), user(&[0.5, 0.5])];
        let (lo, hi) = mmf_brackets(&users, 3.0).unwrap();
        let sol = mmf_bd_mrc(&users, 3.0).unwrap();
        assert!((lo - hi).abs() < 1e-14 * hi);
        assert!((sol.sum_rate - lo).abs() < 1e-12 * lo);
    }

    #[test]
    fn zero_budget() {
        let sol = mmf_bd_mrc(&[user(&[1.0])], 0.0).unwrap();
        assert_eq!(sol.sum_rate, 0.0);
        assert_eq!(sol.user_powers, vec![0.0]);
    }
}
