use super::DenseMatrix;
use crate::{Error, Result};

/// Thin SVD `M = U·diag(σ)·Vᵀ` with `σ` sorted descending and
/// `r = min(rows, cols)`.
///
/// For a rank-deficient input, columns of `U` (rows of `Vᵀ`) beyond the rank
/// are zero rather than an arbitrary orthonormal completion; every consumer
/// here rescales singular values, so zero directions stay zero.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub vt: DenseMatrix,
}

impl SvdResult {
    /// `U·diag(σ')·Vᵀ` for a replacement spectrum `σ'` (soft-thresholded or
    /// epigraph-projected singular values).
    pub fn recompose(&self, sigma: &[f64]) -> DenseMatrix {
        let rows = self.u.rows();
        let cols = self.vt.cols();
        let r = self.sigma.len();
        debug_assert_eq!(sigma.len(), r);
        let mut out = DenseMatrix::zeros(rows, cols);
        for j in 0..cols {
            let col = out.col_mut(j);
            for k in 0..r {
                let s = sigma[k] * self.vt.get(k, j);
                if s == 0.0 {
                    continue;
                }
                let uk = self.u.col(k);
                for i in 0..rows {
                    col[i] += s * uk[i];
                }
            }
        }
        out
    }
}

/// One-sided Jacobi thin SVD.
///
/// Orthogonalizes column pairs of the (tall) input by plane rotations until
/// convergence; column norms are the singular values, the accumulated
/// rotations give `V`. Deterministic: fixed sweep order, no randomness. Wide
/// inputs are handled by factoring the transpose.
pub fn svd_thin(m: &DenseMatrix) -> Result<SvdResult> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Shape("svd of an empty matrix".into()));
    }
    if !m.data().iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    if m.rows() >= m.cols() {
        Ok(jacobi_tall(m))
    } else {
        // M = UΣVᵀ  ⇔  Mᵀ = VΣUᵀ.
        let t = jacobi_tall(&m.transpose());
        Ok(SvdResult {
            u: t.vt.transpose(),
            sigma: t.sigma,
            vt: t.u.transpose(),
        })
    }
}

const MAX_SWEEPS: usize = 60;
const ORTH_TOL: f64 = 1e-15;

fn jacobi_tall(m: &DenseMatrix) -> SvdResult {
    let rows = m.rows();
    let cols = m.cols();
    let mut b = m.clone();
    let mut v = DenseMatrix::identity(cols);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in p + 1..cols {
                let (app, aqq, apq) = {
                    let bp = b.col(p);
                    let bq = b.col(q);
                    (super::dot(bp, bp), super::dot(bq, bq), super::dot(bp, bq))
                };
                if apq.abs() <= ORTH_TOL * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_cols(&mut b, p, q, c, s, rows);
                rotate_cols(&mut v, p, q, c, s, cols);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending, carrying U and
    // V columns along.
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols).map(|j| super::norm2(b.col(j))).collect();
    order.sort_by(|&a, &b_| norms[b_].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b_)));

    let mut u = DenseMatrix::zeros(rows, cols);
    let mut sigma = vec![0.0; cols];
    let mut vt = DenseMatrix::zeros(cols, cols);
    for (k, &j) in order.iter().enumerate() {
        sigma[k] = norms[j];
        if norms[j] > 0.0 {
            let inv = 1.0 / norms[j];
            let src = b.col(j);
            let dst = u.col_mut(k);
            for i in 0..rows {
                dst[i] = src[i] * inv;
            }
        }
        for i in 0..cols {
            vt.set(k, i, v.get(i, j));
        }
    }
    SvdResult { u, sigma, vt }
}

fn rotate_cols(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, rows: usize) {
    for i in 0..rows {
        let xp = m.get(i, p);
        let xq = m.get(i, q);
        m.set(i, p, c * xp - s * xq);
        m.set(i, q, s * xp + c * xq);
    }
}
