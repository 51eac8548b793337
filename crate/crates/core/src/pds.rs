//! Primal-dual splitting for `min_p G(p) + H(F p)`.
//!
//! `G` and `H` are proper lower-semicontinuous convex functions with
//! computable proximity operators and `F` is a linear operator. The iteration
//!
//! ```text
//! p⁽ⁿ⁺¹⁾ = prox_{γ₁G}[ p⁽ⁿ⁾ − γ₁·Fᵀz⁽ⁿ⁾ ]
//! z⁽ⁿ⁺¹⁾ = prox_{γ₂H*}[ z⁽ⁿ⁾ + γ₂·F(2p⁽ⁿ⁺¹⁾ − p⁽ⁿ⁾) ]
//! ```
//!
//! converges to a saddle point when the step sizes satisfy the bound below;
//! the conjugate prox never needs its own formula because the Moreau
//! decomposition reduces it to the prox of `H` itself. `H` is a sum of
//! independent blocks over contiguous slices of the dual variable, which is
//! exactly the shape the epigraphical relaxation produces.
//!
//! On step sizes: convergence analyses for this scheme require
//! `γ₁·γ₂·‖F‖²op ≤ 1`. A looser reading without the square circulates as
//! well; this implementation enforces the squared form, which is safe under
//! both readings, and `default_steps` saturates it only when the default
//! pair would violate it.

use std::sync::OnceLock;
use std::time::Instant;

use crate::linalg::{dist2, operator_norm_default, OpRef};
use crate::prox::{prox_conjugate, Proximable};
use crate::{Error, Result};

/// Primal and dual step sizes `(γ₁, γ₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSizes {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl StepSizes {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(gamma1 > 0.0 && gamma1.is_finite() && gamma2 > 0.0 && gamma2.is_finite()) {
            return Err(Error::Config(format!(
                "step sizes must be positive and finite, got ({gamma1}, {gamma2})"
            )));
        }
        Ok(StepSizes { gamma1, gamma2 })
    }

    /// `γ₁·γ₂·‖F‖² ≤ 1`, with a hairline slack so saturated defaults pass.
    pub fn satisfies_bound(&self, f_norm: f64) -> bool {
        self.gamma1 * self.gamma2 * f_norm * f_norm <= 1.0 + 1e-9
    }
}

/// The step sizes used across the experiments: `γ₁ = 0.01`,
/// `γ₂ = 1/(12·γ₁)`; when that pair would break the bound for this `f_norm`
/// (i.e. `‖F‖ > 2√3`), γ₂ shrinks to `1/(γ₁·‖F‖²)`.
pub fn default_steps(f_norm: f64) -> StepSizes {
    let f = f_norm.max(1e-8);
    let gamma1 = 0.01;
    let gamma2 = 1.0 / (12.0 * gamma1);
    let steps = StepSizes { gamma1, gamma2 };
    if steps.satisfies_bound(f) {
        steps
    } else {
        StepSizes {
            gamma1,
            gamma2: 1.0 / (gamma1 * f * f),
        }
    }
}

/// One additive piece of `H`, acting on the dual slice starting at `offset`.
pub struct HBlock {
    offset: usize,
    f: Box<dyn Proximable>,
}

impl HBlock {
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn f(&self) -> &dyn Proximable {
        self.f.as_ref()
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.f.dim()
    }
}

/// Objective evaluator logged in the trace; receives the current primal.
pub type ObjectiveFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A `min G(p) + H(Fp)` instance with block-separable `H`.
///
/// Blocks are given in order and tile the dual space exactly: block `i`
/// starts where block `i−1` ends and the last one ends at `F`'s output
/// dimension. When an `objective` evaluator is supplied the trace logs it
/// (typically the un-relaxed objective of the original problem); otherwise
/// the trace logs the relaxed objective `G(p) + Σ H_i((Fp)_i)`.
pub struct SplitProblem {
    f_op: OpRef,
    g: Box<dyn Proximable>,
    h_blocks: Vec<HBlock>,
    objective: Option<ObjectiveFn>,
    f_norm_cache: OnceLock<f64>,
}

impl SplitProblem {
    pub fn new(
        f_op: OpRef,
        g: Box<dyn Proximable>,
        h_parts: Vec<Box<dyn Proximable>>,
    ) -> Result<Self> {
        if f_op.in_dim() == 0 || f_op.out_dim() == 0 {
            return Err(Error::Shape("operator with an empty side".into()));
        }
        if g.dim() != f_op.in_dim() {
            return Err(Error::Shape(format!(
                "G acts on {} entries, operator takes {}",
                g.dim(),
                f_op.in_dim()
            )));
        }
        let mut h_blocks = Vec::with_capacity(h_parts.len());
        let mut offset = 0;
        for f in h_parts {
            let dim = f.dim();
            h_blocks.push(HBlock { offset, f });
            offset += dim;
        }
        if offset != f_op.out_dim() {
            return Err(Error::Shape(format!(
                "H blocks cover {offset} entries, operator yields {}",
                f_op.out_dim()
            )));
        }
        Ok(SplitProblem {
            f_op,
            g,
            h_blocks,
            objective: None,
            f_norm_cache: OnceLock::new(),
        })
    }

    pub fn with_objective(mut self, objective: ObjectiveFn) -> Self {
        self.objective = Some(objective);
        self
    }

    pub fn primal_dim(&self) -> usize {
        self.f_op.in_dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.f_op.out_dim()
    }

    pub fn f_op(&self) -> &OpRef {
        &self.f_op
    }

    pub fn g(&self) -> &dyn Proximable {
        self.g.as_ref()
    }

    pub fn h_blocks(&self) -> &[HBlock] {
        &self.h_blocks
    }

    /// `‖F‖op` estimate (power iteration), computed once and cached.
    pub fn f_norm(&self) -> f64 {
        *self
            .f_norm_cache
            .get_or_init(|| operator_norm_default(self.f_op.as_ref()))
    }

    /// Pins the operator norm used for the step-size check, skipping the
    /// power iteration; callers that know `‖F‖` exactly use this.
    pub fn with_f_norm(self, f_norm: f64) -> Self {
        let _ = self.f_norm_cache.set(f_norm);
        self
    }

    /// Relaxed objective `G(p) + Σ H_i((Fp)_i)` given `Fp`.
    fn relaxed_objective(&self, p: &[f64], fp: &[f64]) -> f64 {
        self.g.eval(p)
            + self
                .h_blocks
                .iter()
                .map(|b| b.f.eval(&fp[b.range()]))
                .sum::<f64>()
    }
}

/// How a solve ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// The fixed-point residual dropped to `eps_stop` or below.
    Converged,
    /// The iteration budget ran out first.
    MaxIter,
}

/// Per-iteration record: 1-based iteration index, primal fixed-point
/// residual, logged objective, and wall-clock milliseconds since the solve
/// started.
#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    pub iter: usize,
    pub residual: f64,
    pub objective: f64,
    pub elapsed_ms: f64,
}

/// Full convergence history of one solve; one entry per iteration taken.
#[derive(Clone, Debug, Default)]
pub struct SolveTrace {
    pub residual: Vec<f64>,
    pub objective: Vec<f64>,
    pub elapsed_ms: Vec<f64>,
}

impl SolveTrace {
    pub fn iters(&self) -> usize {
        self.residual.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = TraceRow> + '_ {
        (0..self.iters()).map(|i| TraceRow {
            iter: i + 1,
            residual: self.residual[i],
            objective: self.objective[i],
            elapsed_ms: self.elapsed_ms[i],
        })
    }

    fn push(&mut self, residual: f64, objective: f64, elapsed_ms: f64) {
        self.residual.push(residual);
        self.objective.push(objective);
        self.elapsed_ms.push(elapsed_ms);
    }
}

/// Final iterates plus the trace.
pub struct SolveOutcome {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub status: SolveStatus,
    pub trace: SolveTrace,
}

/// Runs the primal-dual iteration until the primal fixed-point residual
/// `‖p⁽ⁿ⁾ − p⁽ⁿ⁻¹⁾‖₂` drops to `eps_stop` or `max_iter` iterations elapse.
///
/// `init` seeds the primal and dual iterates (zeros when absent). Errors:
/// step sizes breaking `γ₁γ₂‖F‖² ≤ 1` are a configuration error; a
/// non-finite iterate aborts with a divergence error carrying the trace so
/// far.
pub fn pds_solve(
    prob: &SplitProblem,
    steps: StepSizes,
    eps_stop: f64,
    max_iter: usize,
    init: Option<(Vec<f64>, Vec<f64>)>,
) -> Result<SolveOutcome> {
    pds_solve_observed(prob, steps, eps_stop, max_iter, init, |_, _| {})
}

/// `pds_solve` with a per-iteration observer called as
/// `observer(iter, primal)` after each update; used for convergence studies
/// that track distance to a reference point.
pub fn pds_solve_observed(
    prob: &SplitProblem,
    steps: StepSizes,
    eps_stop: f64,
    max_iter: usize,
    init: Option<(Vec<f64>, Vec<f64>)>,
    mut observer: impl FnMut(usize, &[f64]),
) -> Result<SolveOutcome> {
    if !(eps_stop >= 0.0 && eps_stop.is_finite()) {
        return Err(Error::Config(format!("eps_stop {eps_stop}")));
    }
    if !steps.satisfies_bound(prob.f_norm()) {
        return Err(Error::Config(format!(
            "step sizes ({}, {}) violate gamma1*gamma2*|F|^2 <= 1 at |F| = {}",
            steps.gamma1,
            steps.gamma2,
            prob.f_norm()
        )));
    }
    let (pn, dn) = (prob.primal_dim(), prob.dual_dim());
    let (mut x, mut z) = match init {
        Some((x0, z0)) => {
            if x0.len() != pn || z0.len() != dn {
                return Err(Error::Shape(format!(
                    "init sizes ({}, {}) for a {pn}/{dn} problem",
                    x0.len(),
                    z0.len()
                )));
            }
            if !x0.iter().chain(&z0).all(|v| v.is_finite()) {
                return Err(Error::InvalidInput("non-finite init".into()));
            }
            (x0, z0)
        }
        None => (vec![0.0; pn], vec![0.0; dn]),
    };

    let start = Instant::now();
    let mut trace = SolveTrace::default();
    let mut status = SolveStatus::MaxIter;
    // F p is reused by the dual update and the objective, so each iteration
    // costs one F and one Fᵀ application.
    let mut fx = prob.f_op.apply_vec(&x);
    let mut t = vec![0.0; pn];

    for iter in 1..=max_iter {
        // Primal: p⁺ = prox_{γ₁G}(p − γ₁·Fᵀz).
        prob.f_op.apply_t(&z, &mut t);
        for (ti, &xi) in t.iter_mut().zip(&x) {
            *ti = xi - steps.gamma1 * *ti;
        }
        let x_next = prob.g.prox(&t, steps.gamma1);

        // Dual: z⁺ = prox_{γ₂H*}(z + γ₂·F(2p⁺ − p)), block by block through
        // the Moreau decomposition.
        let fx_next = prob.f_op.apply_vec(&x_next);
        let mut u = vec![0.0; dn];
        for i in 0..dn {
            u[i] = z[i] + steps.gamma2 * (2.0 * fx_next[i] - fx[i]);
        }
        for b in &prob.h_blocks {
            let r = b.range();
            let zb = prox_conjugate(b.f.as_ref(), &u[r.clone()], steps.gamma2);
            u[r].copy_from_slice(&zb);
        }
        let z_next = u;

        let residual = dist2(&x_next, &x);
        if !(residual.is_finite() && x_next.iter().chain(&z_next).all(|v| v.is_finite())) {
            return Err(Error::Diverged {
                iter,
                trace: Box::new(trace),
            });
        }
        let objective = match &prob.objective {
            Some(f) => f(&x_next),
            None => prob.relaxed_objective(&x_next, &fx_next),
        };
        trace.push(residual, objective, start.elapsed().as_secs_f64() * 1e3);

        x = x_next;
        fx = fx_next;
        z = z_next;
        observer(iter, &x);

        // Never stop on the first iteration: a zero-initialized dual leaves
        // the primal momentarily stationary (prox_G(p − γ₁Fᵀ·0) is often p
        // itself), which would read as a spurious fixed point.
        if iter >= 2 && residual <= eps_stop {
            status = SolveStatus::Converged;
            break;
        }
    }

    Ok(SolveOutcome {
        primal: x,
        dual: z,
        status,
        trace,
    })
}

/// Serializes a trace as CSV with header `iter,residual,objective,elapsed_ms`.
pub fn write_trace_csv(trace: &SolveTrace, w: &mut dyn std::io::Write) -> Result<()> {
    writeln!(w, "iter,residual,objective,elapsed_ms")?;
    for row in trace.rows() {
        writeln!(
            w,
            "{},{},{},{}",
            row.iter, row.residual, row.objective, row.elapsed_ms
        )?;
    }
    Ok(())
}
