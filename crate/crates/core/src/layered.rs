//! Layered mixed norms: description, classification, and mechanical
//! relaxation into a solvable split problem.
//!
//! A layered norm is a chain of block-wise maps. Layer `k` partitions its
//! input into groups and replaces each group by a weighted scalar norm of
//! it, so it maps `ℝ^{N_k} → ℝ^{N_{k+1}}` with `N_{k+1}` groups; the chain's
//! value is the sum of the outermost layer's group values. Classic examples:
//! `ℓ2,1` is an inner block-wise `ℓ2` under an outer sum, and the
//! structure-tensor norms used for images put per-patch nuclear norms under
//! a weighted outer sum.
//!
//! The composition is convex but rarely proximable as a whole. `relax`
//! rewrites `min_x Σ f_outer(f_inner(Ax)) + Σ_m g_m(B_m x)` by introducing
//! one auxiliary vector per layer boundary and replacing each coupling
//! equality `f^(k)(·) = z^(k+1)` with the epigraph constraint
//! `f^(k)(·) ≤ z^(k+1)`:
//!
//! ```text
//! min_{x, z²..z^K}  f^(K)(z^K) + Σ_m g_m(B_m x)
//!                   s.t.  f^(1)(Ax) ≤ z²,  f^(k)(z^k) ≤ z^(k+1)
//! ```
//!
//! which is exactly a `G(p) + H(Fp)` split: `H` is the outermost norm's
//! prox, the `g_m` proxes, and one block-wise epigraph projection per
//! relaxed layer; `F` stacks `A`, the `B_m`, and identities.
//!
//! When every layer above the innermost is strictly increasing (as a map on
//! nonnegative vectors), the relaxation is exact: the minimizing `x` sets
//! coincide and the auxiliaries equal the true layer values at any solution.
//! `validate_assumptions` classifies a description accordingly: `ℓp` for
//! `p < ∞` (and the `ε`-augmented max norm `‖·‖∞ + ε‖·‖₂`) preserve
//! solutions; the plain max norm is only non-decreasing, and the nuclear
//! norm is not monotone at all, so either of those above the innermost layer
//! demotes the relaxation to a plain convex relaxation.

use std::sync::Arc;

use crate::epigraph::{BlockEpigraph, BlockEpigraphInd, EpiKind, SchattenKind};
use crate::linalg::{norm1, norm2, norm_inf, svd_thin, BlockOp, DenseMatrix, Identity, OpRef};
use crate::pds::SplitProblem;
use crate::prox::{
    prox_l1, prox_l2, prox_linf, prox_nuclear, BlockSeparable, GroupStructure, Proximable, ZeroFn,
};
use crate::{Error, Result};

/// The scalar norm a layer applies to each of its groups.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BlockKind {
    L2,
    L1,
    LInf,
    /// `‖·‖∞ + ε·‖·‖₂`: the strictly increasing repair of the max norm.
    LInfEps(f64),
    /// Nuclear norm of the group reshaped as a column-major `rows×cols`
    /// matrix.
    Nuclear { rows: usize, cols: usize },
}

impl BlockKind {
    /// Strictly increasing on the nonnegative orthant: a strict increase of
    /// any input coordinate strictly increases the value.
    pub fn is_strictly_increasing(self) -> bool {
        match self {
            BlockKind::L2 | BlockKind::L1 | BlockKind::LInfEps(_) => true,
            BlockKind::LInf | BlockKind::Nuclear { .. } => false,
        }
    }

    /// Value of the norm on one group.
    pub fn value(self, v: &[f64]) -> f64 {
        match self {
            BlockKind::L2 => norm2(v),
            BlockKind::L1 => norm1(v),
            BlockKind::LInf => norm_inf(v),
            BlockKind::LInfEps(eps) => norm_inf(v) + eps * norm2(v),
            BlockKind::Nuclear { rows, cols } => {
                let m = DenseMatrix::from_data(rows, cols, v.to_vec())
                    .expect("finite matrix data");
                svd_thin(&m).expect("svd of finite matrix").sigma.iter().sum()
            }
        }
    }
}

/// One layer: a weighted partition of the input plus the norm applied per
/// group. Maps `ℝ^{gs.total()} → ℝ^{gs.len()}`, group `g` to
/// `weight(g)·kind(v_g)`.
#[derive(Clone, Debug)]
pub struct Layer {
    gs: GroupStructure,
    kind: BlockKind,
}

impl Layer {
    pub fn new(gs: GroupStructure, kind: BlockKind) -> Result<Self> {
        match kind {
            BlockKind::LInfEps(eps) => {
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(Error::Config(format!("linf-eps with eps {eps}")));
                }
            }
            BlockKind::Nuclear { rows, cols } => {
                if rows == 0 || cols == 0 {
                    return Err(Error::Config("nuclear blocks must be nonempty".into()));
                }
                for g in 0..gs.len() {
                    if gs.range(g).len() != rows * cols {
                        return Err(Error::Shape(format!(
                            "group {g} has {} entries, nuclear blocks need {rows}x{cols}",
                            gs.range(g).len()
                        )));
                    }
                }
            }
            _ => {}
        }
        Ok(Layer { gs, kind })
    }

    /// Equal-size groups sharing one weight.
    pub fn uniform(n_groups: usize, group_len: usize, weight: f64, kind: BlockKind) -> Result<Self> {
        Layer::new(GroupStructure::uniform(n_groups, group_len, weight)?, kind)
    }

    pub fn groups(&self) -> &GroupStructure {
        &self.gs
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.gs.total()
    }

    pub fn output_dim(&self) -> usize {
        self.gs.len()
    }

    /// Forward map: `weight(g)·kind(v_g)` per group.
    pub fn group_values(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.input_dim());
        (0..self.gs.len())
            .map(|g| self.gs.weight(g) * self.kind.value(&v[self.gs.range(g)]))
            .collect()
    }
}

/// A layered mixed norm: layers ordered innermost to outermost, with
/// matching dimensions. The value at `v` is the sum of the outermost
/// layer's group values of the forward chain.
#[derive(Clone, Debug)]
pub struct LayeredNorm {
    layers: Vec<Layer>,
}

impl LayeredNorm {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("a layered norm needs at least one layer".into()));
        }
        for k in 1..layers.len() {
            if layers[k].input_dim() != layers[k - 1].output_dim() {
                return Err(Error::Shape(format!(
                    "layer {} takes {} values, layer {} yields {}",
                    k + 1,
                    layers[k].input_dim(),
                    k,
                    layers[k - 1].output_dim()
                )));
            }
        }
        Ok(LayeredNorm { layers })
    }

    /// Number of layers `K`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// All intermediate layer outputs `[f^(1)(v), f^(2)(f^(1)(v)), …]`;
    /// `K` vectors, the last being the outermost group values.
    pub fn forward(&self, v: &[f64]) -> Vec<Vec<f64>> {
        let mut outs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        for (k, layer) in self.layers.iter().enumerate() {
            let input = if k == 0 { v } else { &outs[k - 1] };
            outs.push(layer.group_values(input));
        }
        outs
    }
}

/// Direct evaluation of the composition on its input (`v = Ax`, not `x`).
pub fn eval_layered(ln: &LayeredNorm, v: &[f64]) -> f64 {
    ln.forward(v).last().map(|vals| vals.iter().sum()).unwrap_or(0.0)
}

/// What the relaxation guarantees for a given description.
#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    /// Every layer above the innermost is strictly increasing: the relaxed
    /// problem has exactly the original minimizers.
    SolutionPreserving,
    /// Some upper layer is not strictly increasing: the relaxed problem is
    /// a convex relaxation whose minimizer is an estimate, not guaranteed
    /// equal.
    ConvexRelaxationOnly { reason: String },
    /// The description itself is inconsistent.
    Invalid { reason: String },
}

/// Classifies a layered norm by the monotonicity of its upper layers.
///
/// The innermost layer is exempt: it is applied to the raw input, not to
/// relaxed values, so exactness never depends on it. A zero group weight in
/// an upper layer also breaks strict increase (that group's input is
/// ignored).
pub fn validate_assumptions(ln: &LayeredNorm) -> Classification {
    for k in 1..ln.layers.len() {
        if ln.layers[k].input_dim() != ln.layers[k - 1].output_dim() {
            return Classification::Invalid {
                reason: format!("dimension break between layers {k} and {}", k + 1),
            };
        }
    }
    for (k, layer) in ln.layers.iter().enumerate().skip(1) {
        if !layer.kind.is_strictly_increasing() {
            let what = match layer.kind {
                BlockKind::LInf => "the max norm is non-decreasing but not strictly increasing",
                BlockKind::Nuclear { .. } => {
                    "the nuclear norm is not monotone in the entrywise order"
                }
                _ => unreachable!(),
            };
            return Classification::ConvexRelaxationOnly {
                reason: format!("layer {}: {what}", k + 1),
            };
        }
        for g in 0..layer.gs.len() {
            if layer.gs.weight(g) == 0.0 {
                return Classification::ConvexRelaxationOnly {
                    reason: format!(
                        "layer {}: group {g} has weight 0, so its input is ignored",
                        k + 1
                    ),
                };
            }
        }
    }
    Classification::SolutionPreserving
}

/// Outermost-layer prox: `z ↦ Σ_g weight(g)·kind(z_g)` with a per-group
/// closed-form prox.
struct OuterNorm {
    gs: GroupStructure,
    kind: BlockKind,
}

impl Proximable for OuterNorm {
    fn dim(&self) -> usize {
        self.gs.total()
    }
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for g in 0..self.gs.len() {
            let r = self.gs.range(g);
            let t = gamma * self.gs.weight(g);
            let sub = &x[r.clone()];
            let p = match self.kind {
                BlockKind::L2 => prox_l2(sub, t),
                BlockKind::L1 => prox_l1(sub, t),
                BlockKind::LInf => prox_linf(sub, t),
                BlockKind::Nuclear { rows, cols } => prox_nuclear(sub, rows, cols, t),
                BlockKind::LInfEps(_) => unreachable!("rejected at assembly"),
            };
            out[r].copy_from_slice(&p);
        }
        out
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (0..self.gs.len())
            .map(|g| self.gs.weight(g) * self.kind.value(&x[self.gs.range(g)]))
            .sum()
    }
    fn name(&self) -> String {
        format!("outer-{:?}x{}", self.kind, self.gs.len())
    }
}

/// A side term `g_m(B_m x)` of the objective.
pub struct GTerm {
    pub f: Box<dyn Proximable>,
    pub op: OpRef,
}

/// The relaxed problem together with the layout bookkeeping needed to seed
/// and inspect solves.
pub struct Relaxed {
    pub problem: SplitProblem,
    /// The description the problem was built from.
    pub norm: LayeredNorm,
    /// The inner operator `A` (the composition's input map).
    pub a_op: OpRef,
    /// Dimension of `x` inside the primal vector (always the prefix).
    pub x_dim: usize,
    /// Sizes of the auxiliary vectors `z^(2..K)` following `x`.
    pub aux_dims: Vec<usize>,
    /// Indices of the epigraph blocks within `problem.h_blocks()`.
    pub epi_h_indices: Vec<usize>,
}

impl Relaxed {
    /// Primal slice of the `i`-th auxiliary (0 ↔ `z^(2)`).
    pub fn aux_range(&self, i: usize) -> std::ops::Range<usize> {
        let start = self.x_dim + self.aux_dims[..i].iter().sum::<usize>();
        start..start + self.aux_dims[i]
    }

    /// Feasible warm start: `x₀` followed by the exact forward layer values,
    /// which satisfy every epigraph constraint with equality.
    pub fn init_primal(&self, x0: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x0.len(), self.x_dim);
        let mut p = x0.to_vec();
        let chain = self.norm.forward(&self.a_op.apply_vec(x0));
        for vals in chain.iter().take(self.norm.depth() - 1) {
            p.extend_from_slice(vals);
        }
        p
    }

    /// Largest epigraph-constraint violation of a primal vector; zero at any
    /// feasible point, and ≈0 at convergence.
    pub fn epi_violation(&self, primal: &[f64]) -> f64 {
        let fp = self.problem.f_op().apply_vec(primal);
        self.epi_h_indices
            .iter()
            .map(|&i| {
                let b = &self.problem.h_blocks()[i];
                let ind = b.f();
                // The block is a BlockEpigraphInd: its violation is the gap
                // between each group value and its bound.
                let slice = &fp[b.range()];
                // Reconstruct per-group violation through projection
                // distance: a projection fixed point means feasible.
                let proj = ind.prox(slice, 1.0);
                slice
                    .iter()
                    .zip(&proj)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max)
    }
}

/// Builds the epigraphically relaxed split problem for
/// `min_x  norm(Ax) + g_primal(x) + Σ_m g_m(B_m x)`.
///
/// Primal layout: `x` then `z^(2) … z^(K)`. `H` blocks in order: the
/// outermost norm (acting on `z^(K)`, or on `Ax` when `K = 1`), one block
/// per side term, one epigraph block per relaxed layer `k = 1 … K−1` acting
/// on the concatenation of the layer input and its bound vector.
///
/// Restrictions beyond classification: the outermost layer must have a
/// per-group prox (everything except `LInfEps`, which needs the dedicated
/// two-layer construction), inner layers must have projectable epigraphs
/// (`LInfEps` again excluded), and inner non-`ℓ2` layers must carry unit
/// weights (an `ℓ2` layer folds one uniform weight into the cone scale).
pub fn relax(
    ln: &LayeredNorm,
    a_op: OpRef,
    g_primal: Option<Box<dyn Proximable>>,
    g_terms: Vec<GTerm>,
) -> Result<Relaxed> {
    if let Classification::Invalid { reason } = validate_assumptions(ln) {
        return Err(Error::InvalidInput(format!("invalid layered norm: {reason}")));
    }
    if a_op.out_dim() != ln.input_dim() {
        return Err(Error::Shape(format!(
            "operator yields {}, norm takes {}",
            a_op.out_dim(),
            ln.input_dim()
        )));
    }
    let n = a_op.in_dim();
    if let Some(g) = &g_primal {
        if g.dim() != n {
            return Err(Error::Shape(format!(
                "primal function acts on {}, x has {n}",
                g.dim()
            )));
        }
    }
    for (m, t) in g_terms.iter().enumerate() {
        if t.op.in_dim() != n {
            return Err(Error::Shape(format!("side operator {m} takes {}", t.op.in_dim())));
        }
        if t.f.dim() != t.op.out_dim() {
            return Err(Error::Shape(format!(
                "side term {m}: function on {}, operator yields {}",
                t.f.dim(),
                t.op.out_dim()
            )));
        }
    }
    let k_layers = ln.depth();
    let outer = ln.layers().last().unwrap();
    if matches!(outer.kind(), BlockKind::LInfEps(_)) {
        return Err(Error::Unsupported(
            "the eps-augmented max norm has no per-group prox; use the dedicated \
             two-layer construction"
                .into(),
        ));
    }

    // Primal blocks: x, then one auxiliary per relaxed boundary.
    let aux_dims: Vec<usize> = ln.layers()[..k_layers - 1]
        .iter()
        .map(Layer::output_dim)
        .collect();
    let mut col_dims = vec![n];
    col_dims.extend(&aux_dims);

    // Dual row blocks and the H parts over them, built in lockstep.
    let mut row_dims: Vec<usize> = Vec::new();
    let mut h_parts: Vec<Box<dyn Proximable>> = Vec::new();
    struct Cell {
        row: usize,
        col: usize,
        scale: f64,
        op: OpRef,
    }
    let mut cells: Vec<Cell> = Vec::new();

    // Outermost norm block: on z^(K) (primal block K−1), or on Ax for K=1.
    row_dims.push(outer.input_dim());
    h_parts.push(Box::new(OuterNorm {
        gs: outer.groups().clone(),
        kind: outer.kind(),
    }));
    if k_layers == 1 {
        cells.push(Cell {
            row: 0,
            col: 0,
            scale: 1.0,
            op: a_op.clone(),
        });
    } else {
        cells.push(Cell {
            row: 0,
            col: k_layers - 1,
            scale: 1.0,
            op: Arc::new(Identity::new(outer.input_dim())),
        });
    }

    // Side terms.
    for t in g_terms {
        let row = row_dims.len();
        row_dims.push(t.op.out_dim());
        h_parts.push(t.f);
        cells.push(Cell {
            row,
            col: 0,
            scale: 1.0,
            op: t.op,
        });
    }

    // One epigraph block per relaxed layer: rows [input_k | z^(k+1)].
    let mut epi_h_indices = Vec::new();
    for (k, layer) in ln.layers()[..k_layers - 1].iter().enumerate() {
        let w0 = layer.groups().weight(0);
        let epi_kind = match layer.kind() {
            BlockKind::L2 => {
                if !layer.groups().has_uniform_weight(w0) || w0 <= 0.0 {
                    return Err(Error::Unsupported(format!(
                        "layer {}: cone scaling needs one positive uniform weight",
                        k + 1
                    )));
                }
                EpiKind::L2 { tau: w0 }
            }
            other => {
                if !layer.groups().has_uniform_weight(1.0) {
                    return Err(Error::Unsupported(format!(
                        "layer {}: only unit weights are supported for this norm",
                        k + 1
                    )));
                }
                match other {
                    BlockKind::L1 => EpiKind::L1,
                    BlockKind::LInf => EpiKind::LInf,
                    BlockKind::Nuclear { rows, cols } => EpiKind::Schatten {
                        kind: SchattenKind::One,
                        rows,
                        cols,
                    },
                    BlockKind::LInfEps(_) => {
                        return Err(Error::Unsupported(format!(
                            "layer {}: the eps-augmented max norm has no single epigraph \
                             projection; use the dedicated two-layer construction",
                            k + 1
                        )));
                    }
                    BlockKind::L2 => unreachable!(),
                }
            }
        };
        // Partition with weights stripped: scaling lives in the cone.
        let offsets: Vec<usize> = (0..=layer.groups().len())
            .map(|g| {
                if g == 0 {
                    0
                } else {
                    layer.groups().range(g - 1).end
                }
            })
            .collect();
        let unit_gs = GroupStructure::new(offsets, vec![1.0; layer.groups().len()])?;
        let be = BlockEpigraph::new(unit_gs, epi_kind)?;

        let vec_row = row_dims.len();
        row_dims.push(layer.input_dim());
        let bound_row = row_dims.len();
        row_dims.push(layer.output_dim());
        epi_h_indices.push(h_parts.len());
        h_parts.push(Box::new(BlockEpigraphInd(be)));

        if k == 0 {
            cells.push(Cell {
                row: vec_row,
                col: 0,
                scale: 1.0,
                op: a_op.clone(),
            });
        } else {
            cells.push(Cell {
                row: vec_row,
                col: k,
                scale: 1.0,
                op: Arc::new(Identity::new(layer.input_dim())),
            });
        }
        cells.push(Cell {
            row: bound_row,
            col: k + 1,
            scale: 1.0,
            op: Arc::new(Identity::new(layer.output_dim())),
        });
    }

    let mut f = BlockOp::new(&row_dims, &col_dims);
    for c in cells {
        f.set(c.row, c.col, c.scale, c.op)?;
    }

    // G: the primal function on x, nothing on the auxiliaries.
    let aux_total: usize = aux_dims.iter().sum();
    let g: Box<dyn Proximable> = match (g_primal, aux_total) {
        (None, _) => Box::new(ZeroFn { n: n + aux_total }),
        (Some(gp), 0) => gp,
        (Some(gp), _) => Box::new(BlockSeparable::new(vec![gp, Box::new(ZeroFn { n: aux_total })])),
    };

    let problem = SplitProblem::new(Arc::new(f), g, h_parts)?;
    Ok(Relaxed {
        problem,
        norm: ln.clone(),
        a_op,
        x_dim: n,
        aux_dims,
        epi_h_indices,
    })
}

/// The dedicated two-layer construction for the `ε`-augmented max norm:
///
/// ```text
/// min_x  ‖v(Ax)‖∞ + ε‖v(Ax)‖₂ + g(x),   v_g(u) = ‖u_g‖∞ + ε‖u_g‖₂
/// ```
///
/// Both the inner and outer norms are the strictly increasing
/// `‖·‖∞ + ε‖·‖₂`, so the relaxation keeps the minimizers, but neither has
/// a usable prox or epigraph projection as one piece. The fix is to split
/// every occurrence into its two summands: the relaxed bound `z` receives
/// the outer norm as two H terms on duplicated slices, and the inner
/// constraint `v(Ax) ≤ z` splits as `‖(Ax)_g‖∞ ≤ η₁`, `ε‖(Ax)_g‖₂ ≤ η₂`,
/// `η₁ + η₂ − z ≤ 0` with two fresh bound vectors.
///
/// Primal `p = [x | z | η₁ | η₂]`, `G = 0`, and `H` over `q = Fp`:
/// `‖q₁‖∞ + ε‖q₂‖₂ + g(q₃) + ι_epi‖·‖∞(q₄,q₅) + ι_epi ε‖·‖₂(q₆,q₇)
/// + ι_{(−∞,0]}(q₈)` where `q₁ = q₂ = z`, `q₃ = x`, `q₄ = q₆ = Ax`,
/// `q₅ = η₁`, `q₇ = η₂`, `q₈ = η₁ + η₂ − z`.
pub fn relax_modified_linf_2layer(
    a_op: OpRef,
    groups: &GroupStructure,
    eps: f64,
    g: Box<dyn Proximable>,
) -> Result<SplitProblem> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("eps {eps} must be positive")));
    }
    if !groups.has_uniform_weight(1.0) {
        return Err(Error::Unsupported(
            "weighted groups are not supported in the two-layer construction".into(),
        ));
    }
    if a_op.out_dim() != groups.total() {
        return Err(Error::Shape(format!(
            "operator yields {}, groups cover {}",
            a_op.out_dim(),
            groups.total()
        )));
    }
    let n = a_op.in_dim();
    if g.dim() != n {
        return Err(Error::Shape(format!("g acts on {}, x has {n}", g.dim())));
    }
    let n1 = groups.total();
    let n2 = groups.len();

    // Primal [x | z | η₁ | η₂], dual rows q₁..q₈.
    let mut f = BlockOp::new(&[n2, n2, n, n1, n2, n1, n2, n2], &[n, n2, n2, n2]);
    let id2 = || -> OpRef { Arc::new(Identity::new(n2)) };
    f.set(0, 1, 1.0, id2())?;
    f.set(1, 1, 1.0, id2())?;
    f.set(2, 0, 1.0, Arc::new(Identity::new(n)))?;
    f.set(3, 0, 1.0, a_op.clone())?;
    f.set(4, 2, 1.0, id2())?;
    f.set(5, 0, 1.0, a_op)?;
    f.set(6, 3, 1.0, id2())?;
    f.set(7, 1, -1.0, id2())?;
    f.set(7, 2, 1.0, id2())?;
    f.set(7, 3, 1.0, id2())?;

    let epi_linf = BlockEpigraph::new(groups.clone(), EpiKind::LInf)?;
    let epi_l2 = BlockEpigraph::new(groups.clone(), EpiKind::L2 { tau: eps })?;
    let h_parts: Vec<Box<dyn Proximable>> = vec![
        Box::new(crate::prox::LInfNorm { n: n2 }),
        Box::new(crate::prox::L2Norm { n: n2, scale: eps }),
        g,
        Box::new(BlockEpigraphInd(epi_linf)),
        Box::new(BlockEpigraphInd(epi_l2)),
        Box::new(crate::prox::NonPosInd { n: n2 }),
    ];
    SplitProblem::new(
        Arc::new(f),
        Box::new(ZeroFn { n: n + 3 * n2 }),
        h_parts,
    )
}

/// Parses the plain-text norm grammar used by the CLI, outermost first:
///
/// ```text
/// norm := kind | kind '(' 'group' INT ':' norm ')'
/// kind := 'l1' | 'l2' | 'linf' | 'linfeps' ('=' FLOAT)? | 'nuclear' INT 'x' INT
/// ```
///
/// `l1(group2:l2)` is the `ℓ1` of per-pair `ℓ2` values; nesting adds layers
/// (`l1(group4:linf(group2:l2))`). The group size after `group` is the size
/// of each inner block in entries of that layer's input; the outermost norm
/// spans its whole input. `linfeps` defaults to `ε = 1e-3`. All weights are
/// 1. `input_dim` fixes the innermost dimension; every grouping must divide
/// evenly.
pub fn parse_norm_spec(spec: &str, input_dim: usize) -> Result<LayeredNorm> {
    if input_dim == 0 {
        return Err(Error::Config("input dimension must be positive".into()));
    }
    // Outer-to-inner pass over the recursive syntax.
    let mut chain: Vec<(BlockKind, Option<usize>)> = Vec::new();
    let mut rest = spec.trim();
    let mut open = 0usize;
    loop {
        let (kind, after) = parse_kind(rest, spec)?;
        rest = after;
        if let Some(inner) = rest.strip_prefix('(') {
            open += 1;
            let inner = inner.trim_start();
            let Some(after_group) = inner.strip_prefix("group") else {
                return Err(parse_err(spec, "expected 'group<INT>:' after '('"));
            };
            let digits: String = after_group.chars().take_while(|c| c.is_ascii_digit()).collect();
            if digits.is_empty() {
                return Err(parse_err(spec, "expected a group size after 'group'"));
            }
            let size: usize = digits
                .parse()
                .map_err(|_| parse_err(spec, "group size out of range"))?;
            if size == 0 {
                return Err(parse_err(spec, "group size must be positive"));
            }
            let after_digits = &after_group[digits.len()..];
            let Some(next) = after_digits.strip_prefix(':') else {
                return Err(parse_err(spec, "expected ':' after the group size"));
            };
            chain.push((kind, Some(size)));
            rest = next.trim_start();
        } else {
            chain.push((kind, None));
            break;
        }
    }
    for _ in 0..open {
        rest = rest
            .trim_start()
            .strip_prefix(')')
            .ok_or_else(|| parse_err(spec, "missing ')'"))?;
    }
    if !rest.trim().is_empty() {
        return Err(parse_err(spec, "trailing input after the norm"));
    }

    // chain is outer→inner with the group size of each PARENT attached to
    // the parent entry: entry i's Some(size) is the block size of entry
    // i+1's layer. Build layers innermost-first.
    let mut layers: Vec<Layer> = Vec::new();
    let mut dim = input_dim;
    for i in (0..chain.len()).rev() {
        let (kind, _) = chain[i];
        let gs = if i == 0 {
            // Outermost: one group over the whole remaining input.
            GroupStructure::uniform(1, dim, 1.0)?
        } else {
            let size = chain[i - 1].1.expect("inner entries follow a group spec");
            if dim % size != 0 {
                return Err(Error::Shape(format!(
                    "group size {size} does not divide the layer input {dim}"
                )));
            }
            GroupStructure::uniform(dim / size, size, 1.0)?
        };
        if let BlockKind::Nuclear { rows, cols } = kind {
            if gs.range(0).len() != rows * cols {
                return Err(Error::Shape(format!(
                    "nuclear {rows}x{cols} needs groups of {} entries, got {}",
                    rows * cols,
                    gs.range(0).len()
                )));
            }
        }
        let out = gs.len();
        layers.push(Layer::new(gs, kind)?);
        dim = out;
    }
    LayeredNorm::new(layers)
}

fn parse_err(spec: &str, msg: &str) -> Error {
    Error::InvalidInput(format!("norm spec '{spec}': {msg}"))
}

fn parse_kind<'a>(s: &'a str, spec: &str) -> Result<(BlockKind, &'a str)> {
    let s = s.trim_start();
    // Longest-match order matters: 'linfeps' before 'linf', 'l1' after them.
    if let Some(rest) = s.strip_prefix("linfeps") {
        if let Some(eq) = rest.strip_prefix('=') {
            let len = eq
                .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == '-' || c == '+'))
                .unwrap_or(eq.len());
            let eps: f64 = eq[..len]
                .parse()
                .map_err(|_| parse_err(spec, "bad eps value"))?;
            return Ok((BlockKind::LInfEps(eps), &eq[len..]));
        }
        return Ok((BlockKind::LInfEps(1e-3), rest));
    }
    if let Some(rest) = s.strip_prefix("linf") {
        return Ok((BlockKind::LInf, rest));
    }
    if let Some(rest) = s.strip_prefix("l1") {
        return Ok((BlockKind::L1, rest));
    }
    if let Some(rest) = s.strip_prefix("l2") {
        return Ok((BlockKind::L2, rest));
    }
    if let Some(rest) = s.strip_prefix("nuclear") {
        let rows: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        let rest2 = &rest[rows.len()..];
        let Some(rest3) = rest2.strip_prefix('x') else {
            return Err(parse_err(spec, "nuclear needs ROWSxCOLS"));
        };
        let cols: String = rest3.chars().take_while(|c| c.is_ascii_digit()).collect();
        if rows.is_empty() || cols.is_empty() {
            return Err(parse_err(spec, "nuclear needs ROWSxCOLS"));
        }
        let (r, c): (usize, usize) = (
            rows.parse().map_err(|_| parse_err(spec, "rows out of range"))?,
            cols.parse().map_err(|_| parse_err(spec, "cols out of range"))?,
        );
        if r == 0 || c == 0 {
            return Err(parse_err(spec, "nuclear needs positive dimensions"));
        }
        return Ok((BlockKind::Nuclear { rows: r, cols: c }, &rest3[cols.len()..]));
    }
    Err(parse_err(spec, "unknown norm kind"))
}
