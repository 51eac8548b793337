use std::sync::Arc;

use super::{dot, norm2, DenseMatrix};
use crate::{Error, Result};

/// A linear map `F: ℝ^in_dim → ℝ^out_dim` together with its adjoint.
///
/// `apply` and `apply_t` overwrite their output slice completely. Structured
/// operators (differences, transforms, permutations) implement this trait
/// directly so the solver never materializes them.
pub trait LinearOp: Send + Sync {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;

    /// `out = F x`. `x.len() == in_dim`, `out.len() == out_dim`.
    fn apply(&self, x: &[f64], out: &mut [f64]);

    /// `out = Fᵀ y`. `y.len() == out_dim`, `out.len() == in_dim`.
    fn apply_t(&self, y: &[f64], out: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.out_dim()];
        self.apply(x, &mut out);
        out
    }

    fn apply_t_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.in_dim()];
        self.apply_t(y, &mut out);
        out
    }
}

/// Shared handle to a type-erased operator; assemblies store these.
pub type OpRef = Arc<dyn LinearOp>;

impl LinearOp for DenseMatrix {
    fn in_dim(&self) -> usize {
        self.cols()
    }
    fn out_dim(&self) -> usize {
        self.rows()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matvec(x, out);
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        self.matvec_t(y, out);
    }
}

/// `x ↦ x` on an `n`-dimensional space.
#[derive(Clone, Debug)]
pub struct Identity {
    n: usize,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        Identity { n }
    }
}

impl LinearOp for Identity {
    fn in_dim(&self) -> usize {
        self.n
    }
    fn out_dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
}

/// `x ↦ c·(F x)`; the adjoint picks up the same factor.
pub struct Scaled {
    c: f64,
    inner: OpRef,
}

impl Scaled {
    pub fn new(c: f64, inner: OpRef) -> Self {
        Scaled { c, inner }
    }
}

impl LinearOp for Scaled {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.inner.apply(x, out);
        for v in out.iter_mut() {
            *v *= self.c;
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        self.inner.apply_t(y, out);
        for v in out.iter_mut() {
            *v *= self.c;
        }
    }
}

/// `x ↦ diag(d)·x`; self-adjoint.
#[derive(Clone, Debug)]
pub struct Diag {
    d: Vec<f64>,
}

impl Diag {
    pub fn new(d: Vec<f64>) -> Self {
        Diag { d }
    }
}

impl LinearOp for Diag {
    fn in_dim(&self) -> usize {
        self.d.len()
    }
    fn out_dim(&self) -> usize {
        self.d.len()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for ((o, &xi), &di) in out.iter_mut().zip(x).zip(&self.d) {
            *o = di * xi;
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        self.apply(y, out);
    }
}

/// Composition `x ↦ outer(inner(x))`.
pub struct Chain {
    outer: OpRef,
    inner: OpRef,
}

impl Chain {
    pub fn new(outer: OpRef, inner: OpRef) -> Result<Self> {
        if outer.in_dim() != inner.out_dim() {
            return Err(Error::Shape(format!(
                "chain mismatch: outer takes {}, inner yields {}",
                outer.in_dim(),
                inner.out_dim()
            )));
        }
        Ok(Chain { outer, inner })
    }
}

impl LinearOp for Chain {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.outer.out_dim()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mid = self.inner.apply_vec(x);
        self.outer.apply(&mid, out);
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        let mid = self.outer.apply_t_vec(y);
        self.inner.apply_t(&mid, out);
    }
}

/// `out[i] = x[perm[i]]`: a relabeling of coordinates. The adjoint of a
/// permutation is its inverse, `out[perm[i]] = y[i]`.
#[derive(Clone, Debug)]
pub struct Permutation {
    perm: Vec<usize>,
}

impl Permutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidInput(format!(
                    "not a permutation of 0..{n}: index {p}"
                )));
            }
            seen[p] = true;
        }
        Ok(Permutation { perm })
    }
}

impl LinearOp for Permutation {
    fn in_dim(&self) -> usize {
        self.perm.len()
    }
    fn out_dim(&self) -> usize {
        self.perm.len()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, &p) in out.iter_mut().zip(&self.perm) {
            *o = x[p];
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        for (yi, &p) in y.iter().zip(&self.perm) {
            out[p] = *yi;
        }
    }
}

/// Row selection `out[k] = x[indices[k]]`. The adjoint scatter-adds, so a
/// repeated index accumulates, which is exactly Sᵀ for the 0/1 selection
/// matrix S.
#[derive(Clone, Debug)]
pub struct Selection {
    indices: Vec<usize>,
    in_dim: usize,
}

impl Selection {
    pub fn new(indices: Vec<usize>, in_dim: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= in_dim) {
            return Err(Error::InvalidInput(format!(
                "selection index {bad} out of range 0..{in_dim}"
            )));
        }
        Ok(Selection { indices, in_dim })
    }
}

impl LinearOp for Selection {
    fn in_dim(&self) -> usize {
        self.in_dim
    }
    fn out_dim(&self) -> usize {
        self.indices.len()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, &i) in out.iter_mut().zip(&self.indices) {
            *o = x[i];
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (yk, &i) in y.iter().zip(&self.indices) {
            out[i] += *yk;
        }
    }
}

/// Sparse block matrix of operators. Rows and columns partition the output
/// and input spaces; each occupied cell contributes `scale·op` acting from
/// its column slice into its row slice, and cells sharing a row accumulate.
pub struct BlockOp {
    row_offsets: Vec<usize>,
    col_offsets: Vec<usize>,
    blocks: Vec<(usize, usize, f64, OpRef)>,
}

impl BlockOp {
    pub fn new(row_dims: &[usize], col_dims: &[usize]) -> Self {
        let cumsum = |dims: &[usize]| {
            let mut off = vec![0usize; dims.len() + 1];
            for (i, &d) in dims.iter().enumerate() {
                off[i + 1] = off[i] + d;
            }
            off
        };
        BlockOp {
            row_offsets: cumsum(row_dims),
            col_offsets: cumsum(col_dims),
            blocks: Vec::new(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, scale: f64, op: OpRef) -> Result<()> {
        let (rn, cn) = (self.row_offsets.len() - 1, self.col_offsets.len() - 1);
        if r >= rn || c >= cn {
            return Err(Error::Shape(format!(
                "block ({r},{c}) outside {rn}x{cn} grid"
            )));
        }
        let rdim = self.row_offsets[r + 1] - self.row_offsets[r];
        let cdim = self.col_offsets[c + 1] - self.col_offsets[c];
        if op.out_dim() != rdim || op.in_dim() != cdim {
            return Err(Error::Shape(format!(
                "block ({r},{c}) wants {rdim}x{cdim}, operator is {}x{}",
                op.out_dim(),
                op.in_dim()
            )));
        }
        self.blocks.push((r, c, scale, op));
        Ok(())
    }

    /// Start of block-row `r` in the output vector.
    pub fn row_offset(&self, r: usize) -> usize {
        self.row_offsets[r]
    }

    /// Start of block-column `c` in the input vector.
    pub fn col_offset(&self, c: usize) -> usize {
        self.col_offsets[c]
    }
}

impl LinearOp for BlockOp {
    fn in_dim(&self) -> usize {
        *self.col_offsets.last().unwrap()
    }
    fn out_dim(&self) -> usize {
        *self.row_offsets.last().unwrap()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (r, c, scale, op) in &self.blocks {
            let xs = &x[self.col_offsets[*c]..self.col_offsets[*c + 1]];
            let ys = op.apply_vec(xs);
            let dst = &mut out[self.row_offsets[*r]..self.row_offsets[*r + 1]];
            for (d, v) in dst.iter_mut().zip(ys) {
                *d += scale * v;
            }
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (r, c, scale, op) in &self.blocks {
            let ys = &y[self.row_offsets[*r]..self.row_offsets[*r + 1]];
            let xs = op.apply_t_vec(ys);
            let dst = &mut out[self.col_offsets[*c]..self.col_offsets[*c + 1]];
            for (d, v) in dst.iter_mut().zip(xs) {
                *d += scale * v;
            }
        }
    }
}

/// Largest singular value of `op`, by power iteration on `FᵀF` from a fixed
/// seeded start, so estimates are reproducible. Converges to `‖F‖` up to
/// `tol` (relative) unless the top singular space is orthogonal to the start,
/// which the random start makes a measure-zero event.
pub fn operator_norm(op: &dyn LinearOp, max_iters: usize, tol: f64) -> f64 {
    use rand::{Rng, SeedableRng};
    let n = op.in_dim();
    if n == 0 || op.out_dim() == 0 {
        return 0.0;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let nx = norm2(&x);
    if nx == 0.0 {
        return 0.0;
    }
    for v in x.iter_mut() {
        *v /= nx;
    }
    let mut est = 0.0;
    for _ in 0..max_iters {
        let y = op.apply_vec(&x);
        let new_est = norm2(&y);
        if new_est == 0.0 {
            return 0.0;
        }
        let done = (new_est - est).abs() <= tol * new_est.max(1e-30);
        est = new_est;
        x = op.apply_t_vec(&y);
        let nx = norm2(&x);
        if nx == 0.0 {
            return est;
        }
        for v in x.iter_mut() {
            *v /= nx;
        }
        if done {
            break;
        }
    }
    est
}

/// `operator_norm` with the defaults used across the solvers.
pub fn operator_norm_default(op: &dyn LinearOp) -> f64 {
    operator_norm(op, 100, 1e-6)
}

/// Worst relative defect of `⟨Fx, y⟩ = ⟨x, Fᵀy⟩` over seeded random pairs.
pub fn adjoint_residual(op: &dyn LinearOp, trials: usize) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let x: Vec<f64> = (0..op.in_dim())
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        let y: Vec<f64> = (0..op.out_dim())
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        let a = dot(&op.apply_vec(&x), &y);
        let b = dot(&x, &op.apply_t_vec(&y));
        let scale = a.abs().max(b.abs()).max(1.0);
        worst = worst.max((a - b).abs() / scale);
    }
    worst
}

/// True when `apply_t` is numerically the adjoint of `apply`.
pub fn adjoint_check(op: &dyn LinearOp) -> bool {
    adjoint_residual(op, 20) <= 1e-8
}

/// Dense matrix of `op`, column by column; test and debugging aid.
pub fn materialize(op: &dyn LinearOp) -> DenseMatrix {
    let (m, n) = (op.out_dim(), op.in_dim());
    let mut out = DenseMatrix::zeros(m, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, out.col_mut(j));
        e[j] = 0.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_mat(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn dense_matrix_is_an_operator() {
        let m = rand_mat(4, 3, 1);
        assert!(adjoint_check(&m));
        assert_eq!(materialize(&m), m);
    }

    #[test]
    fn identity_scaled_diag() {
        let id = Identity::new(5);
        assert!(adjoint_check(&id));
        assert!((operator_norm_default(&id) - 1.0).abs() < 1e-6);

        let sc = Scaled::new(-2.5, Arc::new(Identity::new(3)));
        assert_eq!(sc.apply_vec(&[1.0, 0.0, 2.0]), vec![-2.5, 0.0, -5.0]);
        assert!(adjoint_check(&sc));

        let dg = Diag::new(vec![3.0, -1.0, 2.0]);
        assert!(adjoint_check(&dg));
        assert!((operator_norm_default(&dg) - 3.0).abs() < 1e-5);
    }

    #[test]
    fn chain_equals_matrix_product() {
        let a = rand_mat(4, 3, 2);
        let b = rand_mat(3, 5, 3);
        let chain = Chain::new(Arc::new(a.clone()), Arc::new(b.clone())).unwrap();
        let prod = a.mul(&b).unwrap();
        assert_eq!(materialize(&chain), prod);
        assert!(adjoint_check(&chain));
        assert!(Chain::new(Arc::new(rand_mat(2, 2, 4)), Arc::new(rand_mat(3, 3, 5))).is_err());
    }

    #[test]
    fn permutation_roundtrip_and_validation() {
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let x = [10.0, 20.0, 30.0, 40.0];
        let y = p.apply_vec(&x);
        assert_eq!(y, vec![30.0, 10.0, 40.0, 20.0]);
        assert_eq!(p.apply_t_vec(&y), x.to_vec());
        assert!(adjoint_check(&p));
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
    }

    #[test]
    fn selection_scatter_adds_repeats() {
        let s = Selection::new(vec![1, 3, 1], 4).unwrap();
        assert_eq!(s.apply_vec(&[5.0, 6.0, 7.0, 8.0]), vec![6.0, 8.0, 6.0]);
        assert_eq!(s.apply_t_vec(&[1.0, 2.0, 4.0]), vec![0.0, 5.0, 0.0, 2.0]);
        assert!(adjoint_check(&s));
        assert!(Selection::new(vec![4], 4).is_err());
    }

    #[test]
    fn block_op_matches_dense_assembly() {
        let a = rand_mat(2, 3, 6);
        let b = rand_mat(2, 2, 7);
        let c = rand_mat(4, 3, 8);
        let mut blk = BlockOp::new(&[2, 4], &[3, 2]);
        blk.set(0, 0, 1.0, Arc::new(a.clone())).unwrap();
        blk.set(0, 1, -2.0, Arc::new(b.clone())).unwrap();
        blk.set(1, 0, 0.5, Arc::new(c.clone())).unwrap();
        assert_eq!(blk.in_dim(), 5);
        assert_eq!(blk.out_dim(), 6);
        assert_eq!(blk.row_offset(1), 2);
        assert_eq!(blk.col_offset(1), 3);

        let dense = materialize(&blk);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(dense.get(i, j), a.get(i, j));
            }
            for j in 0..2 {
                assert_eq!(dense.get(i, 3 + j), -2.0 * b.get(i, j));
            }
        }
        for i in 0..4 {
            for j in 0..3 {
                assert_eq!(dense.get(2 + i, j), 0.5 * c.get(i, j));
            }
            for j in 0..2 {
                assert_eq!(dense.get(2 + i, 3 + j), 0.0);
            }
        }
        assert!(adjoint_check(&blk));

        // Two blocks in the same cell accumulate.
        let mut twice = BlockOp::new(&[3], &[3]);
        twice.set(0, 0, 1.0, Arc::new(Identity::new(3))).unwrap();
        twice.set(0, 0, 1.0, Arc::new(Identity::new(3))).unwrap();
        assert_eq!(twice.apply_vec(&[1.0, 2.0, 3.0]), vec![2.0, 4.0, 6.0]);

        // Shape validation.
        let mut bad = BlockOp::new(&[2], &[2]);
        assert!(bad.set(0, 0, 1.0, Arc::new(Identity::new(3))).is_err());
        assert!(bad.set(1, 0, 1.0, Arc::new(Identity::new(2))).is_err());
    }

    #[test]
    fn operator_norm_matches_svd() {
        for seed in 0..5 {
            let m = rand_mat(6, 4, 100 + seed);
            let top = super::super::svd_thin(&m).unwrap().sigma[0];
            let est = operator_norm_default(&m);
            assert!(
                (est - top).abs() <= 1e-4 * top,
                "power {est} vs svd {top}"
            );
        }
    }

    #[test]
    fn operator_norm_deterministic() {
        let m = rand_mat(8, 8, 42);
        assert_eq!(operator_norm_default(&m), operator_norm_default(&m));
    }

    #[test]
    fn adjoint_residual_catches_wrong_adjoint() {
        struct Broken;
        impl LinearOp for Broken {
            fn in_dim(&self) -> usize {
                2
            }
            fn out_dim(&self) -> usize {
                2
            }
            fn apply(&self, x: &[f64], out: &mut [f64]) {
                out[0] = x[0] + x[1];
                out[1] = x[1];
            }
            fn apply_t(&self, y: &[f64], out: &mut [f64]) {
                // Wrong on purpose: this is the map itself, not its adjoint.
                out[0] = y[0] + y[1];
                out[1] = y[1];
            }
        }
        assert!(!adjoint_check(&Broken));
    }
}
