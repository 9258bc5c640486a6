//! Zero-forcing precoding over all receive antennas of a group.

use num_complex::Complex64;

use crate::channel::GroupChannel;
use crate::error::{Error, Result};
use crate::linalg::{gram, invert_gram, CMatrix};

#[derive(Debug, Clone)]
pub struct ZfSolution {
    /// `L × M_ψ` precoder with unit-norm columns; column `offset(k) + q`
    /// carries stream `q` of user `k`.
    pub v: CMatrix,
    /// Effective power gain of every column, `1 / [(HᵀH*)⁻¹]_{ll}`.
    pub gains: Vec<f64>,
}

/// Normalized zero-forcing precoder `H*(HᵀH*)⁻¹` with unit-norm columns.
pub fn zf(group: &GroupChannel) -> Result<ZfSolution> {
    let h = group.stacked();
    let ginv = gram_inverse(group, &h)?;
    let gains = diagonal_gains(&ginv)?;
    let mut v = h.map(|z| z.conj()) * &ginv;
    for (mut col, g) in v.column_iter_mut().zip(&gains) {
        col *= Complex64::new(g.sqrt(), 0.0);
    }
    Ok(ZfSolution { v, gains })
}

/// Only the per-column gains of [`zf`], without forming the precoder.
pub fn zf_gains(group: &GroupChannel) -> Result<Vec<f64>> {
    let h = group.stacked();
    diagonal_gains(&gram_inverse(group, &h)?)
}

fn gram_inverse(group: &GroupChannel, h: &CMatrix) -> Result<CMatrix> {
    let l = group.transmit_antennas();
    if h.ncols() > l {
        return Err(Error::InfeasibleDimension {
            required: h.ncols(),
            available: l,
        });
    }
    invert_gram(&gram(h)).ok_or(Error::NumericalSingularity)
}

fn diagonal_gains(ginv: &CMatrix) -> Result<Vec<f64>> {
    ginv.diagonal()
        .iter()
        .map(|d| {
            if d.re > 0.0 {
                Ok(1.0 / d.re)
            } else {
                Err(Error::NumericalSingularity)
            }
        })
        .collect()
}
