//! Projections onto epigraphs of norms.
//!
//! The epigraph of `f` is `epi f = {(v, η) : f(v) ≤ η}`. Replacing the
//! layer-coupling equalities `f(v) = z` of a composed norm by these convex
//! sets is what makes the relaxation solvable, so the projections here are
//! the workhorse of the whole crate. Each one takes the vector part and the
//! bound separately and returns the projected pair `(v*, η*)`:
//!
//! - `ℓ2` (scaled by τ): the second-order-cone projection, three closed-form
//!   cases.
//! - `ℓ1`: a soft threshold at level λ*, with λ* found in closed form from
//!   the sorted magnitudes (`epi_l1_lambda_star`).
//! - `ℓ∞`: a magnitude clamp at level ξ*, with ξ* found from the sorted
//!   magnitudes.
//! - Schatten-1/∞: reduce to the `ℓ1`/`ℓ∞` cases on the singular values;
//!   Schatten-2 is the `ℓ2` case on the flattened matrix.
//!
//! `epi_project_blockwise` applies one of these independently per group of a
//! partition, acting on a slice laid out as `[v₁ … v_G | ξ₁ … ξ_G]`, and
//! `BlockEpigraphInd` wraps that as a proximable indicator.

use crate::linalg::{norm1, norm2, norm_inf, svd_thin, DenseMatrix};
use crate::prox::{prox_l1, GroupStructure, Proximable};
use crate::{Error, Result};

/// Projection onto `{(v, η) : τ·‖v‖₂ ≤ η}`.
///
/// Feasible points are fixed; points in the polar cone (`‖v‖₂ ≤ −τη`) map to
/// the origin; otherwise the projection lands on the cone surface at
/// `(α·v, τ·α·‖v‖₂)` with `α = (1 + τξ/‖v‖₂)/(1 + τ²) ∈ (0, 1)`.
pub fn epi_project_l2(x: &[f64], xi: f64, tau: f64) -> (Vec<f64>, f64) {
    debug_assert!(tau >= 0.0);
    let nx = norm2(x);
    if tau * nx <= xi {
        return (x.to_vec(), xi);
    }
    if nx <= -tau * xi {
        return (vec![0.0; x.len()], 0.0);
    }
    let alpha = (1.0 + tau * xi / nx) / (1.0 + tau * tau);
    let out = x.iter().map(|&v| alpha * v).collect();
    (out, tau * alpha * nx)
}

/// The threshold λ* ≥ 0 such that the projection onto `epi ‖·‖₁` is the soft
/// threshold of the vector at λ* together with `η* = ξ + λ*`; 0 when `(x, ξ)`
/// is already feasible.
///
/// λ* is determined by which of N+1 consecutive intervals holds ξ. With the
/// magnitudes sorted descending as `v₁ ≥ … ≥ v_N` (and `v_{N+1} = 0`),
/// partial sums `S_k = v₁ + … + v_k`, and interval ends
/// `Ŝ_{k,m} = S_k − (k+1)·v_{k+m}`:
///
/// - `ξ < −v₁`: every entry is thresholded away, λ* = −ξ;
/// - `Ŝ_{k,0} ≤ ξ < Ŝ_{k,1}` (the intervals tile `[−v₁, ‖x‖₁)`): exactly `k`
///   entries stay active and λ* = (S_k − ξ)/(k+1).
pub fn epi_l1_lambda_star(x: &[f64], xi: f64) -> f64 {
    let l1 = norm1(x);
    if l1 <= xi {
        return 0.0;
    }
    let mut v: Vec<f64> = x.iter().map(|t| t.abs()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let n = v.len();
    if n == 0 || xi < -v[0] {
        return -xi;
    }
    // Exact interval hit, with a nearest-interval fallback in case rounding
    // opens a hairline gap between adjacent interval ends.
    let mut best = (f64::INFINITY, 0.0);
    let mut s = 0.0;
    for k in 1..=n {
        s += v[k - 1];
        let lambda = (s - xi) / (k as f64 + 1.0);
        let lo = s - (k as f64 + 1.0) * v[k - 1];
        let hi = s - (k as f64 + 1.0) * if k < n { v[k] } else { 0.0 };
        if lo <= xi && xi < hi {
            return lambda;
        }
        let d = if xi < lo { lo - xi } else { xi - hi };
        if d < best.0 {
            best = (d, lambda);
        }
    }
    best.1
}

/// Projection onto `{(v, η) : ‖v‖₁ ≤ η}`.
pub fn epi_project_l1(x: &[f64], xi: f64) -> (Vec<f64>, f64) {
    if norm1(x) <= xi {
        return (x.to_vec(), xi);
    }
    let lambda = epi_l1_lambda_star(x, xi);
    (prox_l1(x, lambda), xi + lambda)
}

/// Projection onto `{(v, η) : ‖v‖∞ ≤ η}`.
///
/// The projection clamps magnitudes at a level ξ* and sets `η* = ξ*`. With
/// the magnitudes sorted ascending as `v₁ ≤ … ≤ v_N` and sentinels
/// `v₀ = −∞`, `v_{N+1} = +∞`, the stationary level for a trailing active set
/// `{n̄, …, N}` is `(ξ + Σ_{n ≥ n̄} v_n)/(N − n̄ + 2)`; exactly one n̄ puts it
/// inside `[v_{n̄−1}, v_{n̄}]`, and clamping at 0 handles very negative ξ.
pub fn epi_project_linf(x: &[f64], xi: f64) -> (Vec<f64>, f64) {
    if norm_inf(x) <= xi {
        return (x.to_vec(), xi);
    }
    let n = x.len();
    let mut v: Vec<f64> = x.iter().map(|t| t.abs()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + v[k];
    }
    let mut t_star = xi;
    let mut best = f64::INFINITY;
    for nb in 1..=n + 1 {
        let t = (xi + suffix[nb - 1]) / ((n - nb + 2) as f64);
        let lo = if nb >= 2 { v[nb - 2] } else { f64::NEG_INFINITY };
        let hi = if nb <= n { v[nb - 1] } else { f64::INFINITY };
        if lo <= t && t <= hi {
            t_star = t;
            break;
        }
        let d = if t < lo { lo - t } else { t - hi };
        if d < best {
            best = d;
            t_star = t.clamp(lo, hi);
        }
    }
    let t = t_star.max(0.0);
    let out = x
        .iter()
        .map(|&u| if u.abs() <= t { u } else { u.signum() * t })
        .collect();
    (out, t)
}

/// Which Schatten norm an epigraph block constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchattenKind {
    /// Nuclear norm, the sum of singular values.
    One,
    /// Frobenius norm.
    Two,
    /// Spectral norm, the largest singular value.
    Inf,
}

/// Projection onto `{(V, η) : ‖σ(V)‖_p ≤ η}` for the column-major
/// `rows×cols` matrix stored in `x`.
///
/// Schatten-2 equals the Frobenius norm, so it is the `ℓ2` case on the flat
/// vector. For p ∈ {1, ∞} the projection transfers to the singular values:
/// project `(σ, ξ)` onto the vector-norm epigraph (which preserves order and
/// nonnegativity) and recompose with the same singular vectors.
pub fn epi_project_schatten(
    x: &[f64],
    xi: f64,
    rows: usize,
    cols: usize,
    kind: SchattenKind,
) -> (Vec<f64>, f64) {
    if kind == SchattenKind::Two {
        return epi_project_l2(x, xi, 1.0);
    }
    let m = DenseMatrix::from_data(rows, cols, x.to_vec())
        .expect("finite column-major matrix data");
    let svd = svd_thin(&m).expect("svd of finite matrix");
    let (sigma, eta) = match kind {
        SchattenKind::One => epi_project_l1(&svd.sigma, xi),
        SchattenKind::Inf => epi_project_linf(&svd.sigma, xi),
        SchattenKind::Two => unreachable!(),
    };
    (svd.recompose(&sigma).into_data(), eta)
}

/// The norm family an epigraph block constrains, per group.
#[derive(Clone, Debug)]
pub enum EpiKind {
    /// `τ·‖·‖₂` with a single τ > 0 shared by all groups.
    L2 { tau: f64 },
    L1,
    LInf,
    Schatten {
        kind: SchattenKind,
        rows: usize,
        cols: usize,
    },
}

/// A block-wise epigraph constraint: group `g` of the partition must satisfy
/// `f(v_g) ≤ ξ_g`, with one shared norm `f`. Operates on slices laid out as
/// all vector parts followed by all bounds, `[v | ξ]`, of length
/// `gs.total() + gs.len()`.
#[derive(Clone, Debug)]
pub struct BlockEpigraph {
    gs: GroupStructure,
    kind: EpiKind,
}

impl BlockEpigraph {
    pub fn new(gs: GroupStructure, kind: EpiKind) -> Result<Self> {
        if !gs.has_uniform_weight(1.0) {
            return Err(Error::Config(
                "epigraph groups must carry unit weights; fold scaling into the norm".into(),
            ));
        }
        match &kind {
            EpiKind::L2 { tau } => {
                if !(tau.is_finite() && *tau > 0.0) {
                    return Err(Error::Config(format!("epigraph l2 scale {tau}")));
                }
            }
            EpiKind::Schatten { rows, cols, .. } => {
                if *rows == 0 || *cols == 0 {
                    return Err(Error::Config("epigraph matrix blocks must be nonempty".into()));
                }
                for g in 0..gs.len() {
                    if gs.range(g).len() != rows * cols {
                        return Err(Error::Shape(format!(
                            "group {g} has {} entries, matrix blocks need {}",
                            gs.range(g).len(),
                            rows * cols
                        )));
                    }
                }
            }
            EpiKind::L1 | EpiKind::LInf => {}
        }
        Ok(BlockEpigraph { gs, kind })
    }

    pub fn groups(&self) -> &GroupStructure {
        &self.gs
    }

    pub fn kind(&self) -> &EpiKind {
        &self.kind
    }

    /// Dimension of the `[v | ξ]` slice this block acts on.
    pub fn dim(&self) -> usize {
        self.gs.total() + self.gs.len()
    }

    /// Per-group norm values `f(v_g)` for a `[v | ξ]` slice (ignores ξ).
    pub fn group_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.gs.len())
            .map(|g| {
                let v = &x[self.gs.range(g)];
                match &self.kind {
                    EpiKind::L2 { tau } => tau * norm2(v),
                    EpiKind::L1 => norm1(v),
                    EpiKind::LInf => norm_inf(v),
                    EpiKind::Schatten { kind, rows, cols } => {
                        let m = DenseMatrix::from_data(*rows, *cols, v.to_vec())
                            .expect("finite matrix data");
                        let sigma = svd_thin(&m).expect("svd of finite matrix").sigma;
                        match kind {
                            SchattenKind::One => sigma.iter().sum(),
                            SchattenKind::Two => norm2(&sigma),
                            SchattenKind::Inf => sigma.first().copied().unwrap_or(0.0),
                        }
                    }
                }
            })
            .collect()
    }

    /// Largest violation `max_g (f(v_g) − ξ_g)₊` of a `[v | ξ]` slice.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let total = self.gs.total();
        self.group_values(x)
            .iter()
            .enumerate()
            .fold(0.0f64, |m, (g, &val)| m.max(val - x[total + g]))
    }
}

/// Projection of a `[v | ξ]` slice onto a block-wise epigraph set, group by
/// group.
pub fn epi_project_blockwise(x: &[f64], gs: &GroupStructure, kind: &EpiKind) -> Vec<f64> {
    let total = gs.total();
    debug_assert_eq!(x.len(), total + gs.len());
    let mut out = vec![0.0; x.len()];
    for g in 0..gs.len() {
        let r = gs.range(g);
        let xi = x[total + g];
        let (v, eta) = match kind {
            EpiKind::L2 { tau } => epi_project_l2(&x[r.clone()], xi, *tau),
            EpiKind::L1 => epi_project_l1(&x[r.clone()], xi),
            EpiKind::LInf => epi_project_linf(&x[r.clone()], xi),
            EpiKind::Schatten { kind, rows, cols } => {
                epi_project_schatten(&x[r.clone()], xi, *rows, *cols, *kind)
            }
        };
        out[r].copy_from_slice(&v);
        out[total + g] = eta;
    }
    out
}

/// Indicator of a block-wise epigraph set as a proximable function; the prox
/// is the projection for every step size.
pub struct BlockEpigraphInd(pub BlockEpigraph);

impl Proximable for BlockEpigraphInd {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn prox(&self, x: &[f64], _gamma: f64) -> Vec<f64> {
        epi_project_blockwise(x, &self.0.gs, &self.0.kind)
    }
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        let kind = match &self.0.kind {
            EpiKind::L2 { tau } => format!("{tau}*l2"),
            EpiKind::L1 => "l1".into(),
            EpiKind::LInf => "linf".into(),
            EpiKind::Schatten { kind, rows, cols } => format!(
                "s{}[{rows}x{cols}]",
                match kind {
                    SchattenKind::One => "1",
                    SchattenKind::Two => "2",
                    SchattenKind::Inf => "inf",
                }
            ),
        };
        format!("epi-{kind}x{}", self.0.gs.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn l2_cone_three_cases() {
        // Feasible: untouched.
        let (v, eta) = epi_project_l2(&[1.0, 0.0], 2.0, 1.0);
        assert_eq!(v, vec![1.0, 0.0]);
        assert_eq!(eta, 2.0);
        // Polar cone: origin.
        let (v, eta) = epi_project_l2(&[0.3, 0.0], -1.0, 1.0);
        assert_eq!(v, vec![0.0, 0.0]);
        assert_eq!(eta, 0.0);
        // Surface case, τ = 1: (1, 0) → (1/2, 1/2).
        let (v, eta) = epi_project_l2(&[1.0], 0.0, 1.0);
        assert!(close(v[0], 0.5) && close(eta, 0.5));
        // Surface case, τ = 2: argmin (v−1)² + η² s.t. 2|v| ≤ η is (0.2, 0.4).
        let (v, eta) = epi_project_l2(&[1.0], 0.0, 2.0);
        assert!(close(v[0], 0.2) && close(eta, 0.4));
    }

    #[test]
    fn l1_lambda_star_known_values() {
        assert!(close(epi_l1_lambda_star(&[3.0, 1.0], 1.0), 1.0));
        assert!(close(epi_l1_lambda_star(&[5.0, 0.0, 0.0], 0.0), 2.5));
        assert!(close(epi_l1_lambda_star(&[1.0], -2.0), 2.0));
        assert!(close(epi_l1_lambda_star(&[1.0, 1.0], 3.0), 0.0));
    }

    #[test]
    fn l1_projection_lands_on_epigraph() {
        let (v, eta) = epi_project_l1(&[3.0, -1.0], 1.0);
        assert!(close(v[0], 2.0) && close(v[1], 0.0) && close(eta, 2.0));
        // Active constraint: ‖v‖₁ = η.
        assert!(close(norm1(&v), eta));
        // Idempotent.
        let (v2, eta2) = epi_project_l1(&v, eta);
        assert!(close(v2[0], v[0]) && close(eta2, eta));
        // Deep infeasible corner maps to the origin pair.
        let (v, eta) = epi_project_l1(&[1.0], -2.0);
        assert!(close(v[0], 0.0) && close(eta, 0.0));
    }

    #[test]
    fn linf_projection_known_values() {
        // argmin over max|v| ≤ η of (v−(3,1))² + η²: clamp at 1.5.
        let (v, eta) = epi_project_linf(&[3.0, 1.0], 0.0);
        assert!(close(v[0], 1.5) && close(v[1], 1.0) && close(eta, 1.5));
        // Very negative bound forces the origin.
        let (v, eta) = epi_project_linf(&[1.0], -3.0);
        assert!(close(v[0], 0.0) && close(eta, 0.0));
        // Feasible passthrough and idempotence.
        let (v, eta) = epi_project_linf(&[0.5, -0.2], 0.7);
        assert_eq!(v, vec![0.5, -0.2]);
        assert_eq!(eta, 0.7);
        let (v, eta) = epi_project_linf(&[2.0, -5.0, 0.1], 1.3);
        let (v2, eta2) = epi_project_linf(&v, eta);
        for i in 0..3 {
            assert!(close(v[i], v2[i]));
        }
        assert!(close(eta, eta2));
        assert!(norm_inf(&v) <= eta + 1e-12);
    }

    #[test]
    fn schatten_reduces_to_vector_cases_on_diagonals() {
        // diag(3, 1) column-major; nuclear epigraph = ℓ1 on (3, 1).
        let x = [3.0, 0.0, 0.0, 1.0];
        let (v, eta) = epi_project_schatten(&x, 1.0, 2, 2, SchattenKind::One);
        assert!(close(v[0], 2.0) && close(v[3], 0.0) && close(eta, 2.0));
        assert!(close(v[1], 0.0) && close(v[2], 0.0));
        // Spectral epigraph = ℓ∞ on (3, 1).
        let (v, eta) = epi_project_schatten(&x, 0.0, 2, 2, SchattenKind::Inf);
        assert!(close(v[0], 1.5) && close(v[3], 1.0) && close(eta, 1.5));
        // Frobenius epigraph = ℓ2 on the flat vector.
        let (v, eta) = epi_project_schatten(&x, 0.0, 2, 2, SchattenKind::Two);
        let (w, want) = epi_project_l2(&x, 0.0, 1.0);
        assert!(close(eta, want));
        for i in 0..4 {
            assert!(close(v[i], w[i]));
        }
    }

    #[test]
    fn blockwise_projection_is_group_independent() {
        let gs = GroupStructure::uniform(2, 2, 1.0).unwrap();
        // Layout [v1 v2 | ξ1 ξ2]: group 1 feasible, group 2 not.
        let x = [0.1, 0.1, 3.0, 4.0, 1.0, 0.0];
        let bw = epi_project_blockwise(&x, &gs, &EpiKind::L2 { tau: 1.0 });
        assert_eq!(&bw[0..2], &[0.1, 0.1]);
        assert_eq!(bw[4], 1.0);
        let (v, eta) = epi_project_l2(&[3.0, 4.0], 0.0, 1.0);
        assert!(close(bw[2], v[0]) && close(bw[3], v[1]) && close(bw[5], eta));

        let be = BlockEpigraph::new(gs, EpiKind::L2 { tau: 1.0 }).unwrap();
        assert_eq!(be.dim(), 6);
        assert!(be.violation(&bw) <= 1e-12);
        assert!(be.violation(&x) > 1.0);
        let ind = BlockEpigraphInd(be);
        // Projection is γ-invariant.
        assert_eq!(ind.prox(&x, 0.01), ind.prox(&x, 100.0));
        assert_eq!(ind.eval(&x), 0.0);
    }

    #[test]
    fn block_epigraph_validation() {
        let weighted = GroupStructure::uniform(2, 2, 0.5).unwrap();
        assert!(BlockEpigraph::new(weighted, EpiKind::L1).is_err());
        let gs = GroupStructure::uniform(2, 2, 1.0).unwrap();
        assert!(BlockEpigraph::new(gs.clone(), EpiKind::L2 { tau: 0.0 }).is_err());
        assert!(BlockEpigraph::new(
            gs.clone(),
            EpiKind::Schatten {
                kind: SchattenKind::One,
                rows: 3,
                cols: 1
            }
        )
        .is_err());
        assert!(BlockEpigraph::new(
            gs,
            EpiKind::Schatten {
                kind: SchattenKind::One,
                rows: 2,
                cols: 1
            }
        )
        .is_ok());
    }
}
