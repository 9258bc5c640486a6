//! SINR of zero-forcing delivery with imperfect channel knowledge.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{gram, invert_gram, CMatrix, CVector};

/// SINR of every single-antenna user of one group when the precoder is built
/// from the estimates `h_hat` but the signal travels over `h`.
///
/// Residual intra-group leakage counts as interference; other groups are
/// assumed cancelled through the caches.
pub fn zf_imperfect_csit(
    h_hat: &[CVector],
    h: &[CVector],
    powers: &[f64],
    n0: f64,
) -> Result<Vec<f64>> {
    let q = h.len();
    if h_hat.len() != q || powers.len() != q {
        return Err(Error::InvalidConfiguration(
            "estimate, channel and power counts differ".into(),
        ));
    }
    if q == 0 {
        return Ok(Vec::new());
    }
    let l = h[0].len();
    if q > l {
        return Err(Error::InfeasibleDimension {
            required: q,
            available: l,
        });
    }
    let est = CMatrix::from_columns(h_hat);
    let ginv = invert_gram(&gram(&est)).ok_or(Error::NumericalSingularity)?;
    let mut v = est.map(|z| z.conj()) * &ginv;
    for mut col in v.column_iter_mut() {
        let n = col.norm();
        col /= Complex64::new(n, 0.0);
    }
    let coupling = CMatrix::from_columns(h).transpose() * v;
    Ok((0..q)
        .map(|k| {
            let signal = powers[k] * coupling[(k, k)].norm_sqr();
            let leak: f64 = (0..q)
                .filter(|&j| j != k)
                .map(|j| powers[j] * coupling[(k, j)].norm_sqr())
                .sum();
            signal / (n0 + leak)
        })
        .collect())
}

/// SINR with equal power `P_tot/(GQ)` per user when the receiver only knows
/// the coupling coefficient up to a `CN(0, β̃′)` error:
/// `(P/GQ)(|Â|² + β̃′) / (N0 + (P/GQ)·β̃′·(GQ − 1))`.
pub fn zf_imperfect_csir_sinr(
    p_tot: f64,
    g: usize,
    q: usize,
    csir_variance: f64,
    a_hat: Complex64,
    n0: f64,
) -> f64 {
    let users = (g * q) as f64;
    let p = p_tot / users;
    let interference = p * csir_variance * (users - 1.0);
    p * (a_hat.norm_sqr() + csir_variance) / (n0 + interference)
}
