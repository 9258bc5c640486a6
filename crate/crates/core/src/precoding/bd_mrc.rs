//! Block diagonalization with maximal-ratio combining.
//!
//! For user `k` the transmitter confines its streams to the null space of the
//! other users' channels, `T_{-k} = I − H*_{-k}(Hᵀ_{-k}H*_{-k})⁺Hᵀ_{-k}`, and
//! picks the eigenvectors `t` of the small `M_k × M_k` matrix
//! `E_k = Hᵀ_k T_{-k} H*_k`. Stream `q` is sent along `T_{-k}H*_k t_q` and
//! received with `r_q = Hᵀ_k v_q / ‖Hᵀ_k v_q‖`; the resulting streams are
//! mutually interference-free with gains equal to the eigenvalues of `E_k`.
//!
//! When the stacked Gram matrix `G = HᵀH*` is invertible, `E_k` is the inverse
//! of the `k`-th diagonal block of `G⁻¹` (a Schur complement), and
//! `T_{-k}H*_k = H*·G⁻¹[:, k]·E_k`, so no `L × L` matrix is ever formed.

use num_complex::Complex64;

use crate::channel::GroupChannel;
use crate::error::{Error, Result};
use crate::linalg::{gram, hermitian_eig, hermitian_pinv, invert_gram, CMatrix, RANK_TOL};

/// Orthogonal projector onto the complement of the span of `H*_{-k}`.
#[derive(Debug, Clone)]
pub struct ProjectionMatrix {
    pub t: CMatrix,
}

impl ProjectionMatrix {
    pub fn trace(&self) -> f64 {
        self.t.diagonal().iter().map(|z| z.re).sum()
    }
}

/// `T = I − H*(HᵀH*)⁺Hᵀ` for the `L × n` matrix `h_minus_k` (any rank).
pub fn projection(l: usize, h_minus_k: &CMatrix) -> Result<ProjectionMatrix> {
    let mut t = CMatrix::identity(l, l);
    if h_minus_k.ncols() == 0 {
        return Ok(ProjectionMatrix { t });
    }
    let hc = h_minus_k.map(|z| z.conj());
    let pinv = hermitian_pinv(&gram(h_minus_k))?;
    t -= &hc * pinv * h_minus_k.transpose();
    // Exact Hermitian symmetry keeps downstream eigen-solves clean.
    let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(ProjectionMatrix { t })
}

/// Streams of one user.
#[derive(Debug, Clone)]
pub struct UserPrecoder {
    /// `L × J` precoder with unit-norm columns.
    pub v: CMatrix,
    /// `M × J` combiner with unit-norm columns.
    pub r: CMatrix,
    /// Effective stream gains, descending, all positive.
    pub eigenvalues: Vec<f64>,
}

impl UserPrecoder {
    pub fn streams(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("at least one stream")
    }
}

#[derive(Debug, Clone)]
pub struct PrecoderSolution {
    pub users: Vec<UserPrecoder>,
}

/// BD-MRC precoders and combiners for every user of `group`.
///
/// Fails with [`Error::BdInfeasible`] (group index 0; callers re-tag it) when a
/// user has no interference-free direction left.
pub fn bd_mrc(group: &GroupChannel) -> Result<PrecoderSolution> {
    let l = group.transmit_antennas();
    let m_total = group.total_antennas();
    if m_total > l {
        return Err(Error::InfeasibleDimension {
            required: m_total,
            available: l,
        });
    }
    let h = group.stacked();
    let hc = h.map(|z| z.conj());
    let q = group.users.len();

    // Per user: E_k and T_{-k} H*_k.
    let blocks: Vec<(CMatrix, CMatrix)> = match (q > 1).then(|| invert_gram(&gram(&h))).flatten() {
        Some(ginv) => {
            let mut out = Vec::with_capacity(q);
            for k in 0..q {
                let o = group.offset(k);
                let m = group.users[k].antennas();
                let block = ginv.view((o, o), (m, m)).into_owned();
                let e = invert_hermitian_pd(&block).ok_or(Error::NumericalSingularity)?;
                let th = &hc * ginv.columns(o, m) * &e;
                out.push((e, th));
            }
            out
        }
        None => {
            let mut out = Vec::with_capacity(q);
            for k in 0..q {
                let hk = &group.users[k].h;
                let others = others_stacked(group, k);
                let t = projection(l, &others)?.t;
                let th = t * hk.map(|z| z.conj());
                let e = hk.transpose() * &th;
                let e = (&e + e.adjoint()) * Complex64::new(0.5, 0.0);
                out.push((e, th));
            }
            out
        }
    };

    let mut users = Vec::with_capacity(q);
    for (k, (e, th)) in blocks.into_iter().enumerate() {
        let hk = &group.users[k].h;
        let eig = hermitian_eig(&e)?;
        // Rank is judged against the unprojected channel energy so that a
        // fully nulled user shows up as rank zero.
        let floor = RANK_TOL * hk.norm_squared();
        let j = eig.values.iter().take_while(|&&x| x > floor).count();
        if j == 0 {
            return Err(Error::BdInfeasible { group: 0, user: k });
        }
        let mut v = CMatrix::zeros(l, j);
        let mut r = CMatrix::zeros(hk.ncols(), j);
        for s in 0..j {
            let dir = &th * eig.vectors.column(s);
            let vs = &dir / Complex64::new(dir.norm(), 0.0);
            let eff = hk.transpose() * &vs;
            let rs = &eff / Complex64::new(eff.norm(), 0.0);
            v.set_column(s, &vs);
            r.set_column(s, &rs);
        }
        users.push(UserPrecoder {
            v,
            r,
            eigenvalues: eig.values[..j].to_vec(),
        });
    }
    Ok(PrecoderSolution { users })
}

fn others_stacked(group: &GroupChannel, k: usize) -> CMatrix {
    let l = group.transmit_antennas();
    let cols = group.total_antennas() - group.users[k].antennas();
    let mut out = CMatrix::zeros(l, cols);
    let mut c = 0;
    for (i, u) in group.users.iter().enumerate() {
        if i != k {
            out.columns_mut(c, u.antennas()).copy_from(&u.h);
            c += u.antennas();
        }
    }
    out
}

fn invert_hermitian_pd(a: &CMatrix) -> Option<CMatrix> {
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let inv = nalgebra::linalg::Cholesky::new(sym)?.inverse();
    Some((&inv + inv.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Per-stream SINR `P·λ/N0`; `powers[k][q]` is the power of stream `q` of user `k`.
pub fn bd_mrc_sinr(solution: &PrecoderSolution, powers: &[Vec<f64>], n0: f64) -> Vec<Vec<f64>> {
    solution
        .users
        .iter()
        .zip(powers)
        .map(|(u, p)| {
            u.eigenvalues
                .iter()
                .zip(p)
                .map(|(lam, p)| p * lam / n0)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_group_channel, UserChannel};
    use crate::linalg::complex_normal_matrix;
    use crate::rng::SeedTree;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_antenna_single_user_is_mrt() {
        let h = CMatrix::from_column_slice(3, 1, &[c(1.0, 1.0), c(0.0, -2.0), c(0.5, 0.0)]);
        let norm2 = h.norm_squared();
        let g = GroupChannel::from_users(
            3,
            vec![UserChannel {
                h: h.clone(),
                beta: 1.0,
            }],
        )
        .unwrap();
        let sol = bd_mrc(&g).unwrap();
        let u = &sol.users[0];
        assert!((u.eigenvalues[0] - norm2).abs() < 1e-12 * norm2);
        let mrt = h.map(|z| z.conj()) / c(norm2.sqrt(), 0.0);
        let phase = (mrt.adjoint() * &u.v)[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!((u.r[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_user_matches_singular_values() {
        let mut rng = SeedTree::new(4).stream(&[1]);
        let g = sample_group_channel(4, &[2], &[1.0], &mut rng).unwrap();
        let sol = bd_mrc(&g).unwrap();
        let svd = g.users[0].h.clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in sol.users[0].eigenvalues.iter().zip(&sv) {
            assert!((a - b).abs() < 1e-10 * b);
        }
    }

    #[test]
    fn projection_examples() {
        let t = projection(4, &CMatrix::zeros(4, 0)).unwrap();
        assert_eq!(t.t, CMatrix::identity(4, 4));
        let mut rng = SeedTree::new(5).stream(&[0]);
        let h = complex_normal_matrix(&mut rng, 4, 1, 1.0);
        let p = projection(4, &h).unwrap();
        assert!((p.trace() - 3.0).abs() < 1e-10);
        assert!((&p.t * h.map(|z| z.conj())).norm() < 1e-10);
        let dup = CMatrix::from_fn(4, 2, |r, _| h[(r, 0)]);
        let p2 = projection(4, &dup).unwrap();
        assert!((p2.trace() - 3.0).abs() < 1e-9);
        assert!((&p2.t * &p2.t - &p2.t).norm() < 1e-9);
    }

    #[test]
    fn gram_and_projector_paths_agree() {
        let mut rng = SeedTree::new(6).stream(&[0]);
        let g = sample_group_channel(8, &[2, 2, 1], &[1.0, 0.5, 2.0], &mut rng).unwrap();
        let fast = bd_mrc(&g).unwrap();
        for k in 0..3 {
            let t = projection(8, &others_stacked(&g, k)).unwrap().t;
            let hk = &g.users[k].h;
            let e = hk.transpose() * t * hk.map(|z| z.conj());
            let eig = hermitian_eig(&((&e + e.adjoint()) * c(0.5, 0.0))).unwrap();
            for (a, b) in fast.users[k].eigenvalues.iter().zip(&eig.values) {
                assert!((a - b).abs() < 1e-9 * b);
            }
        }
    }

    #[test]
    fn rank_deficient_group_uses_pseudo_inverse() {
        // User 2 repeats user 1's channel, so the Gram matrix is singular and
        // neither user keeps an interference-free direction.
        let mut rng = SeedTree::new(7).stream(&[0]);
        let h = complex_normal_matrix(&mut rng, 4, 1, 1.0);
        let g = GroupChannel::from_users(
            4,
            vec![
                UserChannel {
                    h: h.clone(),
                    beta: 1.0,
                },
                UserChannel { h, beta: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(
            bd_mrc(&g).unwrap_err(),
            Error::BdInfeasible { group: 0, user: 0 }
        );
    }

    #[test]
    fn sinr_is_power_times_gain_over_noise() {
        let sol = PrecoderSolution {
            users: vec![UserPrecoder {
                v: CMatrix::identity(1, 1),
                r: CMatrix::identity(1, 1),
                eigenvalues: vec![1.0],
            }],
        };
        assert_eq!(bd_mrc_sinr(&sol, &[vec![2.0]], 2.0), vec![vec![1.0]]);
        assert_eq!(bd_mrc_sinr(&sol, &[vec![0.0]], 2.0), vec![vec![0.0]]);
    }
}
