//! Small dense complex linear algebra: the cyclic Jacobi Hermitian
//! eigensolver, Gram-matrix inversion with a pseudo-inverse fallback, and a
//! plain-text matrix dump used for cross-checking against external tools.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Input to [`hermitian_eig`] must satisfy `‖A − Aᴴ‖ ≤ HERMITIAN_TOL · ‖A‖`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Jacobi sweeps stop once the off-diagonal norm falls below this fraction of `‖A‖`.
pub const JACOBI_TOL: f64 = 1e-12;
/// Eigenvalues below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Gram matrices whose conditioning proxy falls below this go through the pseudo-inverse.
pub const GRAM_COND_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored column-wise, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Number of eigenvalues above `RANK_TOL · λ_max`.
    pub fn numerical_rank(&self) -> usize {
        let max = self.values.first().copied().unwrap_or(0.0);
        if max <= 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&v| v > RANK_TOL * max).count()
    }
}

fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Relative Hermitian deviation `‖A − Aᴴ‖ / max(‖A‖, tiny)`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let diff = a - a.adjoint();
    let scale = frobenius(a).max(f64::MIN_POSITIVE);
    frobenius(&diff) / scale
}

/// Cyclic Jacobi eigen-decomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies the
/// real symmetric Jacobi rotation. Ties keep solver order.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidConfiguration(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let deviation = hermitian_deviation(a);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    // Symmetrize so rounding noise in the input does not leak into rotations.
    let mut m: CMatrix = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v = CMatrix::identity(n, n);
    let scale = frobenius(&m);

    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&m) <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Skip pivots already negligible relative to their diagonal.
    if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let pc = phase.conj();
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -pc * s;
    let u_qq = pc * c;

    let n = m.nrows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * u_pp + mkq * u_qp;
        m[(k, q)] = mkp * u_pq + mkq * u_qq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = u_pp.conj() * mpk + u_qp.conj() * mqk;
        m[(q, k)] = u_pq.conj() * mpk + u_qq.conj() * mqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Moore–Penrose pseudo-inverse of a Hermitian positive semi-definite matrix.
pub fn hermitian_pinv(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let eig = hermitian_eig(a)?;
    let max = eig.values.first().copied().unwrap_or(0.0);
    let mut out = CMatrix::zeros(n, n);
    if max <= 0.0 {
        return Ok(out);
    }
    for (i, &lam) in eig.values.iter().enumerate() {
        if lam > RANK_TOL * max {
            let u = eig.vectors.column(i);
            out += (&u * u.adjoint()) * Complex64::new(1.0 / lam, 0.0);
        }
    }
    Ok(out)
}

/// `Hᵀ H*`, the Gram matrix of the channel columns as seen by the receivers.
pub fn gram(h: &CMatrix) -> CMatrix {
    h.transpose() * h.map(|z| z.conj())
}

/// Inverse of a Hermitian positive-definite Gram matrix via Cholesky.
///
/// Returns `None` when the factorization fails or the smallest pivot is
/// below `GRAM_COND_TOL` times the largest diagonal entry; callers then fall
/// back to [`hermitian_pinv`].
pub fn invert_gram(g: &CMatrix) -> Option<CMatrix> {
    let n = g.nrows();
    if n == 0 {
        return Some(CMatrix::zeros(0, 0));
    }
    let max_diag = (0..n).map(|i| g[(i, i)].re).fold(0.0_f64, f64::max);
    if max_diag <= 0.0 {
        return None;
    }
    let chol = nalgebra::linalg::Cholesky::new(g.clone())?;
    let l = chol.l_dirty();
    let min_pivot = (0..n)
        .map(|i| l[(i, i)].norm_sqr())
        .fold(f64::INFINITY, f64::min);
    if min_pivot < GRAM_COND_TOL * max_diag {
        return None;
    }
    Some(chol.inverse())
}

/// Draws a circularly-symmetric complex Gaussian with the given variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Matrix of i.i.d. `CN(0, variance)` entries.
pub fn complex_normal_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> CMatrix {
    // Column-major fill so the draw order is fixed by the layout.
    let mut out = CMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            out[(r, c)] = complex_normal(rng, variance);
        }
    }
    out
}

/// Writes a matrix as `rows cols` followed by one line per row of `re,im` pairs.
pub fn dump_matrix(m: &CMatrix) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| format!("{:e},{:e}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the output of [`dump_matrix`].
pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let bad = |what: &str| Error::InvalidConfiguration(format!("matrix dump: {what}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty input"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad("bad header")))
        .collect::<Result<_>>()?;
    if dims.len() != 2 {
        return Err(bad("header must be `rows cols`"));
    }
    let (rows, cols) = (dims[0], dims[1]);
    let mut out = CMatrix::zeros(rows, cols);
    for r in 0..rows {
        let line = lines.next().ok_or_else(|| bad("missing row"))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != cols {
            return Err(bad("wrong number of columns"));
        }
        for (c, e) in entries.iter().enumerate() {
            let (re, im) = e
                .split_once(',')
                .ok_or_else(|| bad("entry must be re,im"))?;
            out[(r, c)] = Complex64::new(
                re.parse().map_err(|_| bad("bad real part"))?,
                im.parse().map_err(|_| bad("bad imaginary part"))?,
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_psd(n: usize, seed: u64) -> CMatrix {
        let mut rng = SeedTree::new(seed).stream(&[n as u64]);
        let b = complex_normal_matrix(&mut rng, n, n, 1.0);
        &b * b.adjoint()
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let eig = hermitian_eig(&CMatrix::identity(3, 3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_matrix_sorted_descending() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(4.0, 0.0)]));
        let eig = hermitian_eig(&a).unwrap();
        assert_eq!(eig.values, vec![4.0, 1.0]);
        assert!((eig.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((eig.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_complex_case() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let a =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let eig = hermitian_eig(&a).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        for (n, seed) in [(6, 1), (6, 2), (9, 3), (1, 4)] {
            let a = random_psd(n, seed);
            let eig = hermitian_eig(&a).unwrap();
            let lam = CMatrix::from_diagonal(&CVector::from_iterator(
                n,
                eig.values.iter().map(|&x| c(x, 0.0)),
            ));
            let rec = &eig.vectors * lam * eig.vectors.adjoint();
            assert!(frobenius(&(&a - rec)) / frobenius(&a) <= 1e-8);
            let gram = eig.vectors.adjoint() * &eig.vectors;
            assert!(frobenius(&(gram - CMatrix::identity(n, n))) <= 1e-10);
            for i in 0..n {
                let u = eig.vectors.column(i);
                let res = &a * u - u * c(eig.values[i], 0.0);
                assert!(res.norm() <= 1e-8 * frobenius(&a));
            }
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn pinv_of_rank_one() {
        let h = CVector::from_vec(vec![c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.5)]);
        let a = &h * h.adjoint();
        let p = hermitian_pinv(&a).unwrap();
        // A A⁺ A = A
        let back = &a * &p * &a;
        assert!(frobenius(&(back - &a)) <= 1e-10 * frobenius(&a));
    }

    #[test]
    fn gram_inverse_matches_identity() {
        let g = random_psd(5, 11);
        let inv = invert_gram(&g).unwrap();
        assert!(frobenius(&(&g * inv - CMatrix::identity(5, 5))) < 1e-9);
        let h = CVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let rank_one = &h * h.adjoint();
        assert!(invert_gram(&rank_one).is_none());
    }

    #[test]
    fn dump_round_trip() {
        let a = random_psd(3, 5);
        let back = parse_matrix(&dump_matrix(&a)).unwrap();
        assert_eq!(a, back);
        assert!(parse_matrix("2 2\n1,0 0,0\n").is_err());
    }
}
