//! Proximity operators and convex projections.
//!
//! For a proper lower-semicontinuous convex `f` and step `γ > 0`,
//!
//! ```text
//! prox_{γf}(x) = argmin_u  f(u) + (1/2γ)·‖u − x‖₂²
//! ```
//!
//! which reduces to the metric projection when `f` is the indicator of a
//! closed convex set. Everything here is out-of-place over flat `&[f64]`
//! slices. The catalog covers the pieces the layered solvers need: the soft
//! threshold (`ℓ1`), block shrinkage (`ℓ2` and weighted groups), `ℓ∞` via its
//! conjugate, ball/box/halfspace/singleton projections, and the singular
//! value soft threshold (nuclear norm). Conjugate proxes come from the
//! Moreau decomposition
//!
//! ```text
//! prox_{γf*}(x) = x − γ·prox_{γ⁻¹f}(γ⁻¹x)
//! ```
//!
//! so only the primal operators are hand-written.

use crate::linalg::{norm1, norm2, norm_inf, svd_thin, DenseMatrix};
use crate::{Error, Result};

/// A partition of `0..total()` into contiguous groups, each with a
/// nonnegative weight. Group `g` is `offsets[g]..offsets[g+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupStructure {
    offsets: Vec<usize>,
    weights: Vec<f64>,
}

impl GroupStructure {
    pub fn new(offsets: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() || offsets[0] != 0 {
            return Err(Error::Config("group offsets must start at 0".into()));
        }
        if offsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "group offsets must be strictly increasing".into(),
            ));
        }
        if weights.len() != offsets.len() - 1 {
            return Err(Error::Config(format!(
                "{} weights for {} groups",
                weights.len(),
                offsets.len() - 1
            )));
        }
        if !weights.iter().all(|w| w.is_finite() && *w >= 0.0) {
            return Err(Error::Config("group weights must be finite and >= 0".into()));
        }
        Ok(GroupStructure { offsets, weights })
    }

    /// `n_groups` groups of equal `group_len`, all with the same weight.
    pub fn uniform(n_groups: usize, group_len: usize, weight: f64) -> Result<Self> {
        if group_len == 0 {
            return Err(Error::Config("group length must be positive".into()));
        }
        Self::new(
            (0..=n_groups).map(|g| g * group_len).collect(),
            vec![weight; n_groups],
        )
    }

    /// Concatenation: `self`'s groups followed by `other`'s, shifted past
    /// `self.total()`.
    pub fn concat(&self, other: &GroupStructure) -> GroupStructure {
        let shift = self.total();
        let mut offsets = self.offsets.clone();
        offsets.extend(other.offsets[1..].iter().map(|o| o + shift));
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        GroupStructure { offsets, weights }
    }

    /// Number of groups.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total dimension covered by the groups.
    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Index range of group `g`.
    pub fn range(&self, g: usize) -> std::ops::Range<usize> {
        self.offsets[g]..self.offsets[g + 1]
    }

    pub fn weight(&self, g: usize) -> f64 {
        self.weights[g]
    }

    /// True when every group has the same weight as `w` exactly.
    pub fn has_uniform_weight(&self, w: f64) -> bool {
        self.weights.iter().all(|&v| v == w)
    }
}

/// Soft threshold: componentwise `sign(v)·max(|v| − γ, 0)`; zeros stay zero.
pub fn prox_l1(x: &[f64], gamma: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let m = v.abs() - gamma;
            if m > 0.0 {
                v.signum() * m
            } else {
                0.0
            }
        })
        .collect()
}

/// Block shrinkage `(1 − γ/max{‖x‖₂, γ})·x`: scales the whole vector toward
/// the origin, to zero when `‖x‖₂ ≤ γ`.
pub fn prox_l2(x: &[f64], gamma: f64) -> Vec<f64> {
    let n = norm2(x);
    let factor = 1.0 - gamma / n.max(gamma);
    x.iter().map(|&v| factor * v).collect()
}

/// Group-wise shrinkage: each group `g` is shrunk with threshold
/// `γ·weight(g)`, the prox of `x ↦ Σ_g weight(g)·‖x_g‖₂`.
pub fn prox_group_l21(x: &[f64], gamma: f64, gs: &GroupStructure) -> Vec<f64> {
    debug_assert_eq!(x.len(), gs.total());
    let mut out = x.to_vec();
    for g in 0..gs.len() {
        let r = gs.range(g);
        let t = gamma * gs.weight(g);
        let n = norm2(&x[r.clone()]);
        let factor = 1.0 - t / n.max(t);
        for v in &mut out[r] {
            *v *= factor;
        }
    }
    out
}

/// Prox of the max norm through its conjugate, the unit `ℓ1` ball:
/// `x − γ·P_{B₁(0,1)}(x/γ)`.
pub fn prox_linf(x: &[f64], gamma: f64) -> Vec<f64> {
    let scaled: Vec<f64> = x.iter().map(|&v| v / gamma).collect();
    let p = project_l1_ball(&scaled, 1.0);
    x.iter().zip(p).map(|(&v, pi)| v - gamma * pi).collect()
}

/// Projection onto `{u : ‖u − center‖₂ ≤ radius}` by radial scaling.
pub fn project_l2_ball(x: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    debug_assert_eq!(x.len(), center.len());
    debug_assert!(radius >= 0.0);
    let d: Vec<f64> = x.iter().zip(center).map(|(&v, &c)| v - c).collect();
    let n = norm2(&d);
    if n <= radius {
        return x.to_vec();
    }
    let factor = radius / n;
    center.iter().zip(d).map(|(&c, di)| c + factor * di).collect()
}

/// Projection onto `{u : ‖u‖₁ ≤ radius}`.
///
/// When the constraint is active the projection is a soft threshold with the
/// level θ chosen so the result lands on the sphere; θ comes from the sorted
/// magnitudes in O(N log N).
pub fn project_l1_ball(x: &[f64], radius: f64) -> Vec<f64> {
    debug_assert!(radius >= 0.0);
    if norm1(x) <= radius {
        return x.to_vec();
    }
    // The sorted-threshold recursion below needs a strictly positive radius
    // (at radius zero the first candidate ties and the scan stops early).
    if radius == 0.0 {
        return vec![0.0; x.len()];
    }
    let mut u: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - radius) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    x.iter()
        .map(|&v| {
            let m = v.abs() - theta;
            if m > 0.0 {
                v.signum() * m
            } else {
                0.0
            }
        })
        .collect()
}

/// Singular value soft threshold: the prox of the nuclear norm of the
/// column-major `rows×cols` matrix stored in `x`.
pub fn prox_nuclear(x: &[f64], rows: usize, cols: usize, gamma: f64) -> Vec<f64> {
    let m = DenseMatrix::from_data(rows, cols, x.to_vec())
        .expect("finite column-major matrix data");
    let svd = svd_thin(&m).expect("svd of finite matrix");
    let sigma: Vec<f64> = svd.sigma.iter().map(|&s| (s - gamma).max(0.0)).collect();
    svd.recompose(&sigma).into_data()
}

/// Componentwise clamp onto `[lo, hi]`.
pub fn project_box(x: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    debug_assert!(lo <= hi);
    x.iter().map(|&v| v.clamp(lo, hi)).collect()
}

/// Projection onto the nonpositive orthant `{u : u ≤ 0}`.
pub fn project_halfspace_nonpos(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.min(0.0)).collect()
}

/// Projection onto `{target}`.
pub fn project_singleton(_x: &[f64], target: &[f64]) -> Vec<f64> {
    target.to_vec()
}

/// Prox of the Fenchel conjugate via the Moreau decomposition.
pub fn prox_conjugate(f: &dyn Proximable, x: &[f64], gamma: f64) -> Vec<f64> {
    debug_assert!(gamma > 0.0);
    let scaled: Vec<f64> = x.iter().map(|&v| v / gamma).collect();
    let p = f.prox(&scaled, 1.0 / gamma);
    x.iter().zip(p).map(|(&v, pi)| v - gamma * pi).collect()
}

/// A convex function with a computable proximity operator on `ℝ^dim`.
///
/// `eval` returns the finite part of the function value: for indicator
/// functions it is 0 everywhere (feasibility is tracked separately), so
/// objective traces stay finite.
pub trait Proximable: Send + Sync {
    fn dim(&self) -> usize;
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64>;
    fn eval(&self, x: &[f64]) -> f64;
    fn name(&self) -> String;
}

/// The zero function; its prox is the identity.
pub struct ZeroFn {
    pub n: usize,
}

impl Proximable for ZeroFn {
    fn dim(&self) -> usize {
        self.n
    }
    fn prox(&self, x: &[f64], _gamma: f64) -> Vec<f64> {
        x.to_vec()
    }
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "zero".into()
    }
}

/// `‖x‖₁`.
pub struct L1Norm {
    pub n: usize,
}

impl Proximable for L1Norm {
    fn dim(&self) -> usize {
        self.n
    }
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
        prox_l1(x, gamma)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        norm1(x)
    }
    fn name(&self) -> String {
        "l1".into()
    }
}

/// `scale·‖x‖₂`.
pub struct L2Norm {
    pub n: usize,
    pub scale: f64,
}

impl Proximable for L2Norm {
    fn dim(&self) -> usize {
        self.n
    }
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
        prox_l2(x, gamma * self.scale)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.scale * norm2(x)
    }
    fn name(&self) -> String {
        format!("{}*l2", self.scale)
    }
}

/// `‖x‖∞`.
pub struct LInfNorm {
    pub n: usize,
}

impl Proximable for LInfNorm {
    fn dim(&self) -> usize {
        self.n
    }
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
        prox_linf(x, gamma)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        norm_inf(x)
    }
    fn name(&self) -> String {
        "linf".into()
    }
}

/// Weighted group norm `Σ_g weight(g)·‖x_g‖₂` over a contiguous partition.
pub struct GroupL21 {
    pub gs: GroupStructure,
}

impl Proximable for GroupL21 {
    fn dim(&self) -> usize {
        self.gs.total()
    }
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
        prox_group_l21(x, gamma, &self.gs)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (0..self.gs.len())
            .map(|g| self.gs.weight(g) * norm2(&x[self.gs.range(g)]))
            .sum()
    }
    fn name(&self) -> String {
        "group-l2,1".into()
    }
}

/// Nuclear norm (sum of singular values) of a column-major `rows×cols`
/// matrix flattened into the vector.
pub struct NuclearNorm {
    rows: usize,
    cols: usize,
}

impl NuclearNorm {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "nuclear norm needs a nonempty matrix");
        NuclearNorm { rows, cols }
    }
}

impl Proximable for NuclearNorm {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
        prox_nuclear(x, self.rows, self.cols, gamma)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let m = DenseMatrix::from_data(self.rows, self.cols, x.to_vec())
            .expect("finite matrix data");
        svd_thin(&m).expect("svd of finite matrix").sigma.iter().sum()
    }
    fn name(&self) -> String {
        format!("nuclear{}x{}", self.rows, self.cols)
    }
}

/// `(1/2)·‖x − center‖₂²`; prox `(x + γ·center)/(1 + γ)`.
pub struct SqDist {
    pub center: Vec<f64>,
}

impl Proximable for SqDist {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .map(|(&v, &c)| (v + gamma * c) / (1.0 + gamma))
            .collect()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        0.5 * x
            .iter()
            .zip(&self.center)
            .map(|(&v, &c)| (v - c) * (v - c))
            .sum::<f64>()
    }
    fn name(&self) -> String {
        "sqdist".into()
    }
}

/// Indicator of the box `[lo, hi]^n`.
pub struct BoxInd {
    n: usize,
    lo: f64,
    hi: f64,
}

impl BoxInd {
    pub fn new(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::Config(format!("box with lo {lo} > hi {hi}")));
        }
        Ok(BoxInd { n, lo, hi })
    }
}

impl Proximable for BoxInd {
    fn dim(&self) -> usize {
        self.n
    }
    fn prox(&self, x: &[f64], _gamma: f64) -> Vec<f64> {
        project_box(x, self.lo, self.hi)
    }
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        format!("box[{},{}]", self.lo, self.hi)
    }
}

/// Indicator of `{u : ‖u − center‖₂ ≤ radius}`.
pub struct L2BallInd {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl L2BallInd {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("l2 ball radius {radius}")));
        }
        Ok(L2BallInd { center, radius })
    }
}

impl Proximable for L2BallInd {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn prox(&self, x: &[f64], _gamma: f64) -> Vec<f64> {
        project_l2_ball(x, &self.center, self.radius)
    }
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "l2-ball".into()
    }
}

/// Indicator of `{u : ‖u‖₁ ≤ radius}`.
pub struct L1BallInd {
    pub n: usize,
    pub radius: f64,
}

impl L1BallInd {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("l1 ball radius {radius}")));
        }
        Ok(L1BallInd { n, radius })
    }
}

impl Proximable for L1BallInd {
    fn dim(&self) -> usize {
        self.n
    }
    fn prox(&self, x: &[f64], _gamma: f64) -> Vec<f64> {
        project_l1_ball(x, self.radius)
    }
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "l1-ball".into()
    }
}

/// Indicator of the nonpositive orthant.
pub struct NonPosInd {
    pub n: usize,
}

impl Proximable for NonPosInd {
    fn dim(&self) -> usize {
        self.n
    }
    fn prox(&self, x: &[f64], _gamma: f64) -> Vec<f64> {
        project_halfspace_nonpos(x)
    }
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "nonpos".into()
    }
}

/// Indicator of `{target}`.
pub struct SingletonInd {
    pub target: Vec<f64>,
}

impl Proximable for SingletonInd {
    fn dim(&self) -> usize {
        self.target.len()
    }
    fn prox(&self, x: &[f64], _gamma: f64) -> Vec<f64> {
        project_singleton(x, &self.target)
    }
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "singleton".into()
    }
}

/// Concatenation of proximables acting on consecutive slices; its prox (and
/// value) separates across the parts.
pub struct BlockSeparable {
    parts: Vec<Box<dyn Proximable>>,
    n: usize,
}

impl BlockSeparable {
    pub fn new(parts: Vec<Box<dyn Proximable>>) -> Self {
        let n = parts.iter().map(|p| p.dim()).sum();
        BlockSeparable { parts, n }
    }
}

impl Proximable for BlockSeparable {
    fn dim(&self) -> usize {
        self.n
    }
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        let mut at = 0;
        for p in &self.parts {
            out.extend(p.prox(&x[at..at + p.dim()], gamma));
            at += p.dim();
        }
        out
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut at = 0;
        for p in &self.parts {
            total += p.eval(&x[at..at + p.dim()]);
            at += p.dim();
        }
        total
    }
    fn name(&self) -> String {
        "block-separable".into()
    }
}
