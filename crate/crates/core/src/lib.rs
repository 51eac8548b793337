//! Layered mixed-norm minimization by epigraphical relaxation.
//!
//! Many structured regularizers are compositions of block-wise norms: an
//! inner norm collapses each block of a vector to a scalar, an outer norm
//! combines the per-block values, and so on for `K` layers. The composite is
//! convex but usually has no closed-form proximity operator, which locks it
//! out of proximal splitting solvers. This crate implements the epigraphical
//! relaxation (ERx) workaround: introduce one auxiliary vector per layer
//! boundary, replace each equality `f(v) = z` by the epigraph constraint
//! `f(v) ≤ z`, and solve the relaxed problem with a primal-dual splitting
//! (PDS) iteration built from cheap proximity operators and epigraphical
//! projections. When every layer above the innermost is strictly increasing,
//! the relaxation is exact: it has the same minimizers as the original
//! problem.
//!
//! The pieces:
//!
//! - [`linalg`]: dense column-major matrices, a one-sided Jacobi thin SVD,
//!   linear operators with combinators, power-iteration operator norms, and
//!   a randomized adjoint test.
//! - [`prox`]: proximity operators and convex projections (soft threshold,
//!   group shrinkage, `ℓ∞`, balls, box, nuclear, ...) plus the Moreau
//!   conjugate identity.
//! - [`epigraph`]: projections onto epigraphs of `ℓ2`, `ℓ1` (closed-form
//!   threshold), `ℓ∞`, and Schatten norms, applied block-wise.
//! - [`pds`]: the generic primal-dual solver over a `G(p) + H(Fp)` split
//!   with block-structured `H` and CSV-serializable traces.
//! - [`layered`]: describe a layered norm, classify it (solution-preserving
//!   vs. convex-relaxation-only), and mechanically assemble the relaxed
//!   split problem; includes the two-layer `‖·‖∞ + ε‖·‖₂` construction.
//! - [`image`]: image-domain operators (periodic differences, RGB
//!   luma/chroma decorrelation, gradient permutations, patch expansion,
//!   subsampled Walsh-Hadamard measurements), PPM/PGM I/O, PSNR, and a
//!   synthetic image generator.
//! - [`recovery`]: color-image recovery from compressed measurements under
//!   VTV / decorrelated VTV / decorrelated structure-tensor TV regularizers,
//!   plus the with/without-relaxation equivalence study.
//! - [`rpca`]: shift-robust PCA in the frequency domain via the amplitude
//!   spectrum nuclear norm, with the plain nuclear-norm baseline and the
//!   shifted synthetic generator.
//! - [`checks`]: self-contained oracle suites (numeric argmin, bisection,
//!   independent ball projections) used by the `check` CLI command and the
//!   acceptance tests.
//!
//! The `epirelax` binary drives batch experiments (`recover`, `rpca`), the
//! oracle suites (`check`), and norm classification (`classify`).

pub mod checks;
pub mod epigraph;
mod error;
pub mod image;
pub mod layered;
pub mod linalg;
pub mod pds;
pub mod prox;
pub mod recovery;
pub mod rpca;

pub use error::{Error, Result};
