//! Max-min fair allocation when every stream of a user sees the same gain.
//!
//! Replacing each user's stream gains by a single value `c_i` turns the MMF
//! condition into `Σ_i J_i N0/c_i · (exp(R/(N ξ J_i)) − 1) = P_tot` over the
//! `N` served users. The same equation yields the analytic brackets of the
//! exact BD-MRC optimum (`c_i = λ_min` or `λ_max`), the large-array
//! approximation (`c_i = β_i(L − M_ψ + M_i)`) and the zero-forcing bounds
//! (`c_i = β_i(L − M_ψ)` and `β_i(L − M_ψ + 1)`).

use crate::error::{Error, Result};

/// Solution of the equal-gain MMF equation.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualGainMmf {
    pub sum_rate: f64,
    /// Total power of every user, in input order.
    pub user_powers: Vec<f64>,
}

impl EqualGainMmf {
    /// Power of each stream of user `i`, given its stream count.
    pub fn symbol_power(&self, i: usize, streams: usize) -> f64 {
        self.user_powers[i] / streams as f64
    }
}

const BISECTION_STEPS: usize = 400;

/// Solves the equal-gain MMF equation for users `(J_i, c_i)`.
///
/// Closed form when all `J_i` agree:
/// `R = ξ N J ln(1 + P_tot / (N0 J Σ 1/c_i))`; bisection otherwise.
pub fn equal_gain_mmf(
    users: &[(usize, f64)],
    xi: f64,
    n0: f64,
    p_tot: f64,
) -> Result<EqualGainMmf> {
    if users.is_empty() {
        return Err(Error::InvalidConfiguration(
            "no users to allocate power to".into(),
        ));
    }
    if users.iter().any(|&(j, c)| j == 0 || !(c > 0.0)) {
        return Err(Error::InvalidConfiguration(
            "every user needs a stream and a positive gain".into(),
        ));
    }
    let n = users.len() as f64;
    let inv_gain_sum: f64 = users.iter().map(|&(_, c)| 1.0 / c).sum();
    let powers_at = |r: f64| -> Vec<f64> {
        users
            .iter()
            .map(|&(j, c)| j as f64 * n0 / c * (r / (n * xi * j as f64)).exp_m1())
            .collect()
    };
    if p_tot <= 0.0 || xi == 0.0 {
        return Ok(EqualGainMmf {
            sum_rate: 0.0,
            user_powers: vec![0.0; users.len()],
        });
    }

    let j0 = users[0].0;
    let sum_rate = if users.iter().all(|&(j, _)| j == j0) {
        let j = j0 as f64;
        xi * n * j * (p_tot / (n0 * j * inv_gain_sum)).ln_1p()
    } else {
        // exp_m1(x) ≥ x gives the upper end of the bracket.
        let total = |r: f64| powers_at(r).iter().sum::<f64>();
        let (mut lo, mut hi) = (0.0, p_tot * n * xi / (n0 * inv_gain_sum));
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
        0.5 * (lo + hi)
    };
    Ok(EqualGainMmf {
        sum_rate,
        user_powers: powers_at(sum_rate),
    })
}

/// A served user described by its pathloss, receive antennas and group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServedUser {
    pub beta: f64,
    pub antennas: usize,
    pub group: usize,
}

fn group_totals(users: &[ServedUser]) -> Vec<usize> {
    let groups = users.iter().map(|u| u.group + 1).max().unwrap_or(0);
    let mut totals = vec![0; groups];
    for u in users {
        totals[u.group] += u.antennas;
    }
    totals
}

/// Large-array approximation of the BD-MRC MMF optimum, with every stream of
/// user `i` at gain `β_i (L − M_ψ + M_i)` and equal power across its streams.
pub fn mmf_massive_mimo(
    users: &[ServedUser],
    l: usize,
    xi: f64,
    n0: f64,
    p_tot: f64,
) -> Result<EqualGainMmf> {
    let totals = group_totals(users);
    if let Some(&m) = totals.iter().find(|&&m| m > l) {
        return Err(Error::InfeasibleDimension {
            required: m,
            available: l,
        });
    }
    let terms: Vec<(usize, f64)> = users
        .iter()
        .map(|u| {
            (
                u.antennas,
                u.beta * (l - totals[u.group] + u.antennas) as f64,
            )
        })
        .collect();
    equal_gain_mmf(&terms, xi, n0, p_tot)
}

/// Lower and upper bounds of the fading-averaged ZF MMF sum-rate, from gains
/// `β(L − M_ψ)` and `β(L − M_ψ + 1)`. Requires `L > M_ψ` in every group.
pub fn zf_mmf_bounds(
    users: &[ServedUser],
    l: usize,
    xi: f64,
    n0: f64,
    p_tot: f64,
) -> Result<(EqualGainMmf, EqualGainMmf)> {
    let totals = group_totals(users);
    if let Some(&m) = totals.iter().find(|&&m| m >= l) {
        return Err(Error::InfeasibleDimension {
            required: m + 1,
            available: l,
        });
    }
    let with = |extra: usize| -> Vec<(usize, f64)> {
        users
            .iter()
            .map(|u| (u.antennas, u.beta * (l - totals[u.group] + extra) as f64))
            .collect()
    };
    Ok((
        equal_gain_mmf(&with(0), xi, n0, p_tot)?,
        equal_gain_mmf(&with(1), xi, n0, p_tot)?,
    ))
}

/// Bounds on one user's fading-averaged ZF rate for fixed per-stream powers:
/// `ξ Σ ln(1 + p β (L − M_ψ)/N0)` and the same with `L − M_ψ + 1`.
pub fn zf_rate_bounds_per_user(
    beta: f64,
    group_antennas: usize,
    l: usize,
    xi: f64,
    n0: f64,
    symbol_powers: &[f64],
) -> Result<(f64, f64)> {
    if group_antennas >= l {
        return Err(Error::InfeasibleDimension {
            required: group_antennas + 1,
            available: l,
        });
    }
    let at = |dof: f64| {
        xi * symbol_powers
            .iter()
            .map(|p| (p * beta * dof / n0).ln_1p())
            .sum::<f64>()
    };
    let dof = (l - group_antennas) as f64;
    Ok((at(dof), at(dof + 1.0)))
}
