//! Dense symmetric eigenvalue routines.
//!
//! Eigenvalues are computed by Householder reduction to tridiagonal form
//! followed by implicit QL sweeps with Wilkinson-style shifts. Eigenvector
//! computations (needed only for the frame constructions) go through
//! nalgebra's symmetric eigendecomposition with an iteration cap.

use nalgebra::{DMatrix, SymmetricEigen, SymmetricTridiagonal};

use crate::error::{Error, Result};

/// Iteration cap per eigenvalue for the QL sweeps.
const QL_MAX_ITER: usize = 60;

/// Largest absolute asymmetry `|m_ij - m_ji|`.
pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
///
/// The matrix must be symmetric up to `tol * max|m_ij|`.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidParameter(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let asym = max_asymmetry(m);
    if asym > tol * max_abs(m).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }

    let (diag, off) = SymmetricTridiagonal::new(m.clone()).unpack_tridiagonal();
    let mut d: Vec<f64> = diag.iter().copied().collect();
    let e: Vec<f64> = off.iter().copied().collect();
    tridiagonal_ql(&mut d, &e)?;
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Implicit QL on a symmetric tridiagonal matrix with diagonal `d` and
/// sub-diagonal `offdiag` (length `d.len() - 1`). Eigenvalues overwrite `d`.
pub fn tridiagonal_ql(d: &mut [f64], offdiag: &[f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    debug_assert_eq!(offdiag.len(), n - 1);
    let mut e = Vec::with_capacity(n);
    e.extend_from_slice(offdiag);
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::Numeric(format!(
                    "QL iteration did not converge for eigenvalue {l}"
                )));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // underflow: split and restart
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Full eigendecomposition (eigenvalues and orthonormal eigenvectors).
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let n = m.nrows();
    SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100 * n.max(1))
        .ok_or_else(|| Error::Numeric("symmetric eigendecomposition did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let ev = symmetric_eigenvalues(&m, 1e-10).unwrap();
        assert_eq!(ev, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            symmetric_eigenvalues(&m, 1e-10),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn residuals_are_small() {
        // deterministic pseudo-random symmetric matrix
        let n = 40;
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let ev = symmetric_eigenvalues(&m, 1e-10).unwrap();
        let full = symmetric_eigen(&m).unwrap();
        let mut reference: Vec<f64> = full.eigenvalues.iter().copied().collect();
        reference.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in ev.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        // residual contract: |Mv - lambda v| <= tol * n * max|M|
        let bound = 1e-10 * n as f64 * max_abs(&m);
        for (idx, lambda) in full.eigenvalues.iter().enumerate() {
            let v = full.eigenvectors.column(idx);
            let r = &m * v - v * *lambda;
            assert!(r.norm() <= bound);
        }
    }

    #[test]
    fn trace_is_preserved() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let ev = symmetric_eigenvalues(&m, 1e-12).unwrap();
        let s = 2f64.sqrt();
        let expected = [2.0 - s, 2.0, 2.0 + s];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
