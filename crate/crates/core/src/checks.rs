//! Self-contained verification suites for the numerical primitives.
//!
//! Each suite checks a family of operators against an independent oracle:
//! proxes against brute-force argmin search, epigraph projections against a
//! certified one-dimensional minimization with independent ball projections,
//! the `ℓ1`-epigraph threshold against bisection, linear operators against
//! random adjoint probes, and prox/conjugate pairs against closed-form dual
//! projections through the Moreau decomposition. A final suite pins the two
//! counterexamples that justify the relaxation-only classification: the
//! nuclear norm is not entrywise monotone, and the spectral norm is not
//! strictly increasing in the singular values.
//!
//! Everything is deterministic (fixed seeds) so a failure reproduces.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::epigraph::{
    epi_l1_lambda_star, epi_project_l1, epi_project_l2, epi_project_linf, epi_project_schatten,
    SchattenKind,
};
use crate::image::{
    color_transform, diff_ops, grad3, measurement_op, patch_expand, permute_gradients,
    PatchConfig, PermVariant,
};
use crate::linalg::{
    adjoint_check, norm1, norm2, norm_inf, svd_thin, Chain, DenseMatrix, OpRef,
};
use crate::prox::{
    BlockSeparable, BoxInd, GroupL21, GroupStructure, L1BallInd, L1Norm, L2BallInd, L2Norm,
    LInfNorm, NonPosInd, NuclearNorm, Proximable, SingletonInd, SqDist, ZeroFn,
};
use crate::rpca::build_dft_split;
use crate::{Error, Result};

/// Result of one verification suite.
pub struct CheckOutcome {
    pub suite: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const SUITE_NAMES: [&str; 6] = [
    "prox",
    "epi",
    "lambda",
    "adjoint",
    "moreau",
    "counterexamples",
];

/// Runs every suite, or only the named one. Unknown names are an error.
pub fn run_all(filter: Option<&str>) -> Result<Vec<CheckOutcome>> {
    if let Some(name) = filter {
        if !SUITE_NAMES.contains(&name) {
            return Err(Error::InvalidInput(format!(
                "unknown suite {name:?}; valid: {}",
                SUITE_NAMES.join(", ")
            )));
        }
    }
    let mut out = Vec::new();
    for name in SUITE_NAMES {
        if filter.is_some_and(|f| f != name) {
            continue;
        }
        out.push(match name {
            "prox" => check_prox_oracle(),
            "epi" => check_epi_oracle(),
            "lambda" => check_lambda_star(),
            "adjoint" => check_adjoints(),
            "moreau" => check_moreau(),
            "counterexamples" => check_counterexamples(),
            _ => unreachable!(),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Prox argmin oracle
// ---------------------------------------------------------------------------

/// The feasible set of an indicator, with membership and an independent
/// pull-back used to generate feasible competitors. Pull-backs use their own
/// arithmetic (clamping, radial scaling, bisection), never the projection
/// under test.
enum FeasibleSet {
    All,
    Box { lo: f64, hi: f64 },
    L1Ball { radius: f64 },
    L2Ball { center: Vec<f64>, radius: f64 },
    NonPos,
    Singleton { target: Vec<f64> },
}

impl FeasibleSet {
    fn contains(&self, u: &[f64]) -> bool {
        let tol = 1e-9;
        match self {
            FeasibleSet::All => true,
            FeasibleSet::Box { lo, hi } => u.iter().all(|v| *v >= lo - tol && *v <= hi + tol),
            FeasibleSet::L1Ball { radius } => norm1(u) <= radius + tol,
            FeasibleSet::L2Ball { center, radius } => {
                let d: f64 = u
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d <= radius + tol
            }
            FeasibleSet::NonPos => u.iter().all(|v| *v <= tol),
            FeasibleSet::Singleton { target } => u
                .iter()
                .zip(target)
                .all(|(a, b)| (a - b).abs() <= tol),
        }
    }

    fn pull(&self, u: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::All => u.to_vec(),
            FeasibleSet::Box { lo, hi } => u.iter().map(|v| v.clamp(*lo, *hi)).collect(),
            FeasibleSet::L1Ball { radius } => pull_l1_ball(u, *radius),
            FeasibleSet::L2Ball { center, radius } => {
                let d: f64 = u
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if d <= *radius {
                    u.to_vec()
                } else {
                    let s = radius / d;
                    u.iter().zip(center).map(|(a, b)| b + s * (a - b)).collect()
                }
            }
            FeasibleSet::NonPos => u.iter().map(|v| v.min(0.0)).collect(),
            FeasibleSet::Singleton { target } => target.clone(),
        }
    }
}

/// Projection onto the `ℓ1` ball by threshold bisection — an independent
/// counterpart to the sorting implementation in prox-ops.
fn pull_l1_ball(u: &[f64], radius: f64) -> Vec<f64> {
    if norm1(u) <= radius {
        return u.to_vec();
    }
    if radius == 0.0 {
        return vec![0.0; u.len()];
    }
    let mut lo = 0.0;
    let mut hi = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..200 {
        let th = 0.5 * (lo + hi);
        let s: f64 = u.iter().map(|v| (v.abs() - th).max(0.0)).sum();
        if s > radius {
            lo = th;
        } else {
            hi = th;
        }
    }
    let th = 0.5 * (lo + hi);
    u.iter()
        .map(|&v| v.signum() * (v.abs() - th).max(0.0))
        .collect()
}

struct OracleCase {
    name: &'static str,
    f: Box<dyn Proximable>,
    set: FeasibleSet,
}

fn oracle_roster() -> Vec<OracleCase> {
    let gs = GroupStructure::new(vec![0, 2, 4], vec![1.0, 0.7]).expect("static groups");
    vec![
        OracleCase {
            name: "l1",
            f: Box::new(L1Norm { n: 4 }),
            set: FeasibleSet::All,
        },
        OracleCase {
            name: "l2",
            f: Box::new(L2Norm { n: 4, scale: 1.0 }),
            set: FeasibleSet::All,
        },
        OracleCase {
            name: "l2-scaled",
            f: Box::new(L2Norm { n: 3, scale: 1.7 }),
            set: FeasibleSet::All,
        },
        OracleCase {
            name: "linf",
            f: Box::new(LInfNorm { n: 4 }),
            set: FeasibleSet::All,
        },
        OracleCase {
            name: "group-l21",
            f: Box::new(GroupL21 { gs }),
            set: FeasibleSet::All,
        },
        OracleCase {
            name: "nuclear2x2",
            f: Box::new(NuclearNorm::new(2, 2)),
            set: FeasibleSet::All,
        },
        OracleCase {
            name: "sqdist",
            f: Box::new(SqDist {
                center: vec![0.4, -1.1, 0.9],
            }),
            set: FeasibleSet::All,
        },
        OracleCase {
            name: "zero",
            f: Box::new(ZeroFn { n: 3 }),
            set: FeasibleSet::All,
        },
        OracleCase {
            name: "box01",
            f: Box::new(BoxInd::new(4, 0.0, 1.0).expect("static box")),
            set: FeasibleSet::Box { lo: 0.0, hi: 1.0 },
        },
        OracleCase {
            name: "l1-ball",
            f: Box::new(L1BallInd::new(4, 1.3).expect("static ball")),
            set: FeasibleSet::L1Ball { radius: 1.3 },
        },
        OracleCase {
            name: "l1-ball-degenerate",
            f: Box::new(L1BallInd::new(3, 0.0).expect("static ball")),
            set: FeasibleSet::L1Ball { radius: 0.0 },
        },
        OracleCase {
            name: "l2-ball",
            f: Box::new(
                L2BallInd::new(vec![0.5, -0.2, 0.8], 0.8).expect("static ball"),
            ),
            set: FeasibleSet::L2Ball {
                center: vec![0.5, -0.2, 0.8],
                radius: 0.8,
            },
        },
        OracleCase {
            name: "nonpos",
            f: Box::new(NonPosInd { n: 4 }),
            set: FeasibleSet::NonPos,
        },
        OracleCase {
            name: "singleton",
            f: Box::new(SingletonInd {
                target: vec![0.3, -0.7, 1.2],
            }),
            set: FeasibleSet::Singleton {
                target: vec![0.3, -0.7, 1.2],
            },
        },
        OracleCase {
            name: "block-separable",
            f: Box::new(BlockSeparable::new(vec![
                Box::new(L1Norm { n: 2 }),
                Box::new(L2Norm { n: 2, scale: 0.9 }),
            ])),
            set: FeasibleSet::All,
        },
    ]
}

/// Largest prox-objective violation found for one case over `pairs` random
/// `(x, γ)` draws: for each draw the prox output must beat 500 random
/// feasible competitors plus a coordinate pattern search, in the objective
/// `γ·f(u) + ½‖u − x‖²` (indicators contribute feasibility instead of a
/// function term). Infeasible prox outputs count as an immediate violation.
fn prox_case_violation(case: &OracleCase, pairs: usize, rng: &mut ChaCha8Rng) -> f64 {
    let n = case.f.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let gamma = 10f64.powf(rng.random_range(-2.0..1.0));
        let p = case.f.prox(&x, gamma);
        if !case.set.contains(&p) {
            return f64::INFINITY;
        }
        let objective = |u: &[f64]| -> f64 {
            gamma * case.f.eval(u)
                + 0.5
                    * u.iter()
                        .zip(&x)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
        };
        let obj_p = objective(&p);
        let mut best = f64::INFINITY;
        for _ in 0..500 {
            let radius = 10f64.powf(rng.random_range(-6.0..0.5));
            let cand: Vec<f64> = p
                .iter()
                .map(|&v| v + radius * rng.random_range(-1.0..1.0))
                .collect();
            let cand = case.set.pull(&cand);
            best = best.min(objective(&cand));
        }
        // Coordinate pattern search seeded at the prox output.
        let mut cur = p.clone();
        let mut cur_obj = obj_p;
        let mut delta = 1e-2;
        while delta > 1e-9 {
            let mut improved = false;
            for i in 0..n {
                for sign in [1.0, -1.0] {
                    let mut cand = cur.clone();
                    cand[i] += sign * delta;
                    if !case.set.contains(&cand) {
                        continue;
                    }
                    let o = objective(&cand);
                    if o < cur_obj {
                        cur = cand;
                        cur_obj = o;
                        improved = true;
                    }
                }
            }
            if !improved {
                delta *= 0.25;
            }
        }
        best = best.min(cur_obj);
        worst = worst.max(obj_p - best);
    }
    worst
}

/// Every prox and projection must match the brute-force argmin oracle.
pub fn check_prox_oracle() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = (0.0f64, "");
    for case in &oracle_roster() {
        let v = prox_case_violation(case, 100, &mut rng);
        if v > worst.0 {
            worst = (v, case.name);
        }
    }
    CheckOutcome {
        suite: "prox",
        passed: worst.0 <= 1e-8,
        detail: format!(
            "max objective violation {:.2e} (worst case: {})",
            worst.0,
            if worst.1.is_empty() { "none" } else { worst.1 }
        ),
    }
}

// ---------------------------------------------------------------------------
// Epigraph projection oracle
// ---------------------------------------------------------------------------

fn golden_min(mut lo: f64, mut hi: f64, iters: usize, mut g: impl FnMut(f64) -> f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..iters {
        if gc < gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - phi * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + phi * (hi - lo);
            gd = g(d);
        }
    }
    0.5 * (lo + hi)
}

/// Oracle projection onto `{(v, η) : f(v) ≤ η}` by golden-section search
/// over η of `dist²(x, {f ≤ η}) + (η − ξ)²`, which is convex in η. The
/// sublevel-set projections are independent implementations: radial scaling
/// (ℓ2), threshold bisection (ℓ1), clamping (ℓ∞).
fn epi_oracle_vec(
    x: &[f64],
    xi: f64,
    norm_val: impl Fn(&[f64]) -> f64,
    ball: impl Fn(&[f64], f64) -> Vec<f64>,
) -> (Vec<f64>, f64) {
    let hi = norm_val(x).max(xi.abs()) + norm2(x) + 1.0;
    let g = |eta: f64| {
        let u = ball(x, eta);
        u.iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            + (eta - xi) * (eta - xi)
    };
    let eta = golden_min(0.0, hi, 200, g);
    (ball(x, eta), eta)
}

fn ball_l2(x: &[f64], radius: f64) -> Vec<f64> {
    let n = norm2(x);
    if n <= radius {
        x.to_vec()
    } else {
        x.iter().map(|&v| v * radius / n).collect()
    }
}

fn ball_linf(x: &[f64], radius: f64) -> Vec<f64> {
    x.iter().map(|&v| v.clamp(-radius, radius)).collect()
}

pub fn check_epi_oracle() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_dist: f64 = 0.0;
    let mut worst_feas: f64 = 0.0;
    let mut record = |lib: (&[f64], f64), oracle: (&[f64], f64), fval: f64| {
        let d = lib
            .0
            .iter()
            .zip(oracle.0)
            .map(|(a, b)| (a - b).abs())
            .fold((lib.1 - oracle.1).abs(), f64::max);
        worst_dist = worst_dist.max(d);
        worst_feas = worst_feas.max(fval - lib.1);
    };
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let xi = rng.random_range(-2.0..2.5);

        for tau in [1.0, 0.8] {
            let (pv, pe) = epi_project_l2(&x, xi, tau);
            let (ov, oe) = epi_oracle_vec(
                &x,
                xi,
                |u| tau * norm2(u),
                |u, eta| ball_l2(u, (eta / tau).max(0.0)),
            );
            record((&pv, pe), (&ov, oe), tau * norm2(&pv));
        }
        {
            let (pv, pe) = epi_project_l1(&x, xi);
            let (ov, oe) =
                epi_oracle_vec(&x, xi, norm1, |u, eta| pull_l1_ball(u, eta.max(0.0)));
            record((&pv, pe), (&ov, oe), norm1(&pv));
        }
        {
            let (pv, pe) = epi_project_linf(&x, xi);
            let (ov, oe) =
                epi_oracle_vec(&x, xi, norm_inf, |u, eta| ball_linf(u, eta.max(0.0)));
            record((&pv, pe), (&ov, oe), norm_inf(&pv));
        }
        // Schatten pairs on a 2×3 block (dim 6). The projection transfers to
        // singular values, so the oracle runs the vector search on σ and
        // recomposes with the fixed singular vectors.
        let xm: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        let m = DenseMatrix::from_data(2, 3, xm.clone()).expect("finite data");
        let svd = svd_thin(&m).expect("svd");
        for kind in [SchattenKind::One, SchattenKind::Inf] {
            let (pv, pe) = epi_project_schatten(&xm, xi, 2, 3, kind);
            let (os, oe) = match kind {
                SchattenKind::One => {
                    epi_oracle_vec(&svd.sigma, xi, norm1, |u, eta| pull_l1_ball(u, eta.max(0.0)))
                }
                SchattenKind::Inf => {
                    epi_oracle_vec(&svd.sigma, xi, norm_inf, |u, eta| {
                        ball_linf(u, eta.max(0.0))
                    })
                }
                SchattenKind::Two => unreachable!(),
            };
            let ov = svd.recompose(&os).into_data();
            let pm = DenseMatrix::from_data(2, 3, pv.clone()).expect("finite data");
            let ps = svd_thin(&pm).expect("svd").sigma;
            let fval = match kind {
                SchattenKind::One => ps.iter().sum::<f64>(),
                SchattenKind::Inf => ps.iter().fold(0.0f64, |m, s| m.max(*s)),
                SchattenKind::Two => unreachable!(),
            };
            record((&pv, pe), (&ov, oe), fval);
        }
    }
    CheckOutcome {
        suite: "epi",
        passed: worst_dist <= 1e-6 && worst_feas <= 1e-12,
        detail: format!(
            "max oracle distance {worst_dist:.2e}, max feasibility violation {worst_feas:.2e}"
        ),
    }
}

// ---------------------------------------------------------------------------
// ℓ1-epigraph threshold vs bisection
// ---------------------------------------------------------------------------

/// The interval formula for λ* must agree with a bisection root of
/// `φ(λ) = Σ max(|xᵢ| − λ, 0) − (ξ + λ)`, which is strictly decreasing.
pub fn check_lambda_star() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=16);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let xi = rng.random_range(-1.5..1.2) * norm1(&x).max(0.5);
        let lib = epi_l1_lambda_star(&x, xi);
        if norm1(&x) <= xi {
            worst = worst.max(lib.abs());
            continue;
        }
        let phi = |lambda: f64| -> f64 {
            x.iter().map(|v| (v.abs() - lambda).max(0.0)).sum::<f64>() - (xi + lambda)
        };
        let mut lo = 0.0;
        let mut hi = norm1(&x) + xi.abs() + 1.0;
        debug_assert!(phi(lo) > 0.0 && phi(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        worst = worst.max((lib - 0.5 * (lo + hi)).abs());
    }
    CheckOutcome {
        suite: "lambda",
        passed: worst <= 1e-10,
        detail: format!("max |λ*_formula − λ*_bisection| = {worst:.2e}"),
    }
}

// ---------------------------------------------------------------------------
// Adjoint probes over the operator zoo
// ---------------------------------------------------------------------------

pub fn check_adjoints() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let dense = DenseMatrix::from_fn(5, 3, |_, _| rng.random_range(-1.0..1.0));
    let (dv, dh) = diff_ops(4, 3);
    let color = color_transform(12);
    let chain: OpRef = Arc::new(
        Chain::new(grad3(4, 3, 3), color_transform(12)).expect("matching dims"),
    );
    let roster: Vec<(&str, OpRef)> = vec![
        ("dense", Arc::new(dense)),
        ("diff-v", dv),
        ("diff-h", dh),
        ("grad3", grad3(4, 3, 3)),
        ("color", color),
        ("perm-p1", permute_gradients(PermVariant::P1, 4, 3)),
        ("perm-p4", permute_gradients(PermVariant::P4, 4, 3)),
        (
            "patch",
            patch_expand(PatchConfig::new(3).expect("odd window"), 4, 4),
        ),
        (
            "measurement",
            measurement_op(6, 12, 11).expect("valid sampling"),
        ),
        ("chain", chain),
        (
            "dft-1d",
            Arc::new(build_dft_split(9, 2, 1).expect("valid dims")),
        ),
        (
            "dft-2d",
            Arc::new(build_dft_split(16, 1, 2).expect("square dims")),
        ),
    ];
    let failures: Vec<&str> = roster
        .iter()
        .filter(|(_, op)| !adjoint_check(op.as_ref()))
        .map(|(name, _)| *name)
        .collect();
    CheckOutcome {
        suite: "adjoint",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} operators pass random adjoint probes", roster.len())
        } else {
            format!("adjoint mismatch: {}", failures.join(", "))
        },
    }
}

// ---------------------------------------------------------------------------
// Moreau decomposition against closed-form duals
// ---------------------------------------------------------------------------

/// `prox_{γf}(x) + P_{(γf)*}(x) = x`, with the dual projection written in
/// closed form per family: the conjugate of a norm is its dual-ball
/// indicator, so `(γ‖·‖)*` projects onto the γ-scaled dual ball.
pub fn check_moreau() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let gs = GroupStructure::new(vec![0, 2, 5], vec![1.0, 0.6]).expect("static groups");
    let group = GroupL21 { gs: gs.clone() };
    let center = vec![0.7, -0.3, 1.1];
    let sq = SqDist {
        center: center.clone(),
    };
    let mut worst: f64 = 0.0;
    for t in 0..1000 {
        let gamma = 10f64.powf(rng.random_range(-1.3..0.7));
        let family = t % 6;
        let n = match family {
            0 | 1 | 2 => rng.random_range(1..=8),
            3 => 5,
            4 => 4,
            _ => 3,
        };
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let (p, dual): (Vec<f64>, Vec<f64>) = match family {
            0 => (
                L1Norm { n }.prox(&x, gamma),
                ball_linf(&x, gamma),
            ),
            1 => {
                let tau = 1.7;
                (
                    L2Norm { n, scale: tau }.prox(&x, gamma),
                    ball_l2(&x, gamma * tau),
                )
            }
            2 => (LInfNorm { n }.prox(&x, gamma), pull_l1_ball(&x, gamma)),
            3 => {
                let mut dual = x.clone();
                for g in 0..gs.len() {
                    let r = gs.range(g);
                    let b = ball_l2(&x[r.clone()], gamma * gs.weight(g));
                    dual[r].copy_from_slice(&b);
                }
                (group.prox(&x, gamma), dual)
            }
            4 => {
                let m = DenseMatrix::from_data(2, 2, x.clone()).expect("finite data");
                let svd = svd_thin(&m).expect("svd");
                let clamped: Vec<f64> = svd.sigma.iter().map(|s| s.min(gamma)).collect();
                (
                    NuclearNorm::new(2, 2).prox(&x, gamma),
                    svd.recompose(&clamped).into_data(),
                )
            }
            _ => (
                sq.prox(&x, gamma),
                x.iter()
                    .zip(&center)
                    .map(|(&v, &c)| gamma * (v - c) / (gamma + 1.0))
                    .collect(),
            ),
        };
        let res = p
            .iter()
            .zip(&dual)
            .zip(&x)
            .map(|((a, b), c)| (a + b - c).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(res);
    }
    CheckOutcome {
        suite: "moreau",
        passed: worst <= 1e-12,
        detail: format!("max decomposition residual {worst:.2e}"),
    }
}

// ---------------------------------------------------------------------------
// Monotonicity counterexamples
// ---------------------------------------------------------------------------

/// Nuclear norm of a 2×2 matrix in closed form: `√(‖Y‖_F² + 2|det Y|)`
/// (σ₁+σ₂ squared is the Frobenius square plus twice σ₁σ₂ = |det|).
fn nuclear_2x2_closed(m: &DenseMatrix) -> f64 {
    let fro2: f64 = m.data().iter().map(|v| v * v).sum();
    let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
    (fro2 + 2.0 * det.abs()).sqrt()
}

/// Two pinned counterexamples behind the relaxation-only classifications:
/// the nuclear norm decreases under an entrywise increase (so it is not
/// entrywise monotone), and the spectral norm stays flat under a strict
/// singular-value increase (so it is not strictly increasing).
pub fn check_counterexamples() -> CheckOutcome {
    let a = DenseMatrix::from_data(2, 2, vec![1.0, 1.0, 1.0, 0.9]).expect("finite data");
    let b = DenseMatrix::from_data(2, 2, vec![1.0, 1.0, 1.0, 1.0]).expect("finite data");
    let nuc = |m: &DenseMatrix| -> f64 { svd_thin(m).expect("svd").sigma.iter().sum() };
    let (na, nb) = (nuc(&a), nuc(&b));
    let closed_ok =
        (na - 4.01f64.sqrt()).abs() <= 1e-10 && (nb - 2.0).abs() <= 1e-10;
    let entrywise_le = a
        .data()
        .iter()
        .zip(b.data())
        .all(|(x, y)| x <= y && *x < y + 1.0);
    let nuclear_drops = na > nb + 1e-6;

    let c = DenseMatrix::from_data(2, 2, vec![1.0, 0.0, 0.0, 0.0]).expect("finite data");
    let d = DenseMatrix::from_data(2, 2, vec![1.0, 0.0, 0.0, 1.0]).expect("finite data");
    let spec = |m: &DenseMatrix| -> f64 {
        svd_thin(m)
            .expect("svd")
            .sigma
            .iter()
            .fold(0.0f64, |acc, s| acc.max(*s))
    };
    let specs_equal = (spec(&c) - spec(&d)).abs() <= 1e-12;
    let closed_match = (na - nuclear_2x2_closed(&a)).abs() <= 1e-10
        && (nb - nuclear_2x2_closed(&b)).abs() <= 1e-10;

    let passed = closed_ok && entrywise_le && nuclear_drops && specs_equal && closed_match;
    CheckOutcome {
        suite: "counterexamples",
        passed,
        detail: format!(
            "nuclear {na:.6} > {nb:.6} under entrywise increase; equal spectral norms {:.6}",
            spec(&c)
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let outcomes = run_all(None).unwrap();
        assert_eq!(outcomes.len(), SUITE_NAMES.len());
        for o in &outcomes {
            assert!(o.passed, "{}: {}", o.suite, o.detail);
        }
    }

    #[test]
    fn filter_selects_one_suite() {
        let outcomes = run_all(Some("lambda")).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].suite, "lambda");
        assert!(run_all(Some("nope")).is_err());
    }

    #[test]
    fn oracle_catches_a_sign_bug() {
        // A soft threshold that adds γ instead of subtracting it must blow
        // the objective-violation bound by a wide margin.
        struct BadL1;
        impl Proximable for BadL1 {
            fn dim(&self) -> usize {
                3
            }
            fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64> {
                x.iter().map(|&v| v.signum() * (v.abs() + gamma)).collect()
            }
            fn eval(&self, x: &[f64]) -> f64 {
                norm1(x)
            }
            fn name(&self) -> String {
                "bad-l1".into()
            }
        }
        let case = OracleCase {
            name: "bad-l1",
            f: Box::new(BadL1),
            set: FeasibleSet::All,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = prox_case_violation(&case, 10, &mut rng);
        assert!(v > 1e-3, "violation {v}");
    }

    #[test]
    fn independent_l1_pull_matches_sorting_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.random_range(1..=8);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let r = rng.random_range(0.0..2.0);
            let a = pull_l1_ball(&x, r);
            let b = crate::prox::project_l1_ball(&x, r);
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-10);
            }
        }
    }
}
