//! Dense column-major matrices, small-vector helpers, a one-sided Jacobi
//! thin SVD, and the linear-operator abstraction used by every solver.

mod matrix;
mod op;
mod svd;

pub use matrix::DenseMatrix;
pub use op::{
    adjoint_check, adjoint_residual, materialize, operator_norm, operator_norm_default, BlockOp,
    Chain, Diag, Identity, LinearOp, OpRef, Permutation, Scaled, Selection,
};
pub use svd::{svd_thin, SvdResult};

/// Inner product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Sum of absolute values.
pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Largest absolute value (0 for the empty slice).
pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Euclidean distance between two equal-length slices.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_helpers() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, -1.0]), 1.0);
        assert_eq!(norm2(&[3.0, 4.0]), 5.0);
        assert_eq!(norm1(&[3.0, -4.0]), 7.0);
        assert_eq!(norm_inf(&[3.0, -4.0]), 4.0);
        assert_eq!(norm_inf(&[]), 0.0);
        assert_eq!(dist2(&[1.0, 1.0], &[4.0, 5.0]), 5.0);
    }
}
