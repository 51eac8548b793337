//! Batch experiment runner: image recovery, shift-robust PCA, verification
//! suites, and norm-spec classification. Outputs are files (images, CSV,
//! a JSON manifest per run); exit codes signal how a run ended:
//! 0 converged/passed, 2 iteration budget exhausted, 1 error, 64 usage.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_distr::Distribution;

use epirelax::checks::{run_all, SUITE_NAMES};
use epirelax::image::{load_ppm, measurement_op, psnr, save_ppm, synth_piecewise, ImagePlane, PatchConfig};
use epirelax::layered::{parse_norm_spec, validate_assumptions, Classification};
use epirelax::pds::{SolveStatus, SolveTrace};
use epirelax::recovery::{recover_full, vtv_pair_equivalence, RecoveryConfig, Regularizer};
use epirelax::rpca::{run_synthetic_cell, CellResult, RpcaMode};
use epirelax::{Error, Result};

#[derive(Parser)]
#[command(name = "epirelax", version, about = "Layered mixed-norm minimization via epigraphical relaxation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Recover a color image from compressive measurements.
    Recover(RecoverArgs),
    /// Decompose a matrix into low-rank and sparse parts, optionally sweeping
    /// the synthetic shift/noise grid.
    Rpca(RpcaArgs),
    /// Run the oracle verification suites.
    Check(CheckArgs),
    /// Parse a norm-spec string and report its relaxation classification.
    Classify(ClassifyArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RegChoice {
    Vtv,
    VtvDirect,
    Dvtv,
    Dstv,
    /// Convergence study: relaxed vs direct VTV against a tight reference.
    VtvPair,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Piecewise,
}

#[derive(Args)]
struct RecoverArgs {
    /// Regularizer (vtv, vtv-direct, dvtv, dstv) or the vtv-pair study.
    #[arg(long, value_enum)]
    reg: RegChoice,
    /// Ground-truth image (PPM, 3 channels).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generate the ground truth instead of loading one.
    #[arg(long, value_enum)]
    synthetic: Option<SynthKind>,
    /// Synthetic image width (ignored with --input).
    #[arg(long, default_value_t = 32)]
    width: usize,
    /// Synthetic image height (ignored with --input).
    #[arg(long, default_value_t = 32)]
    height: usize,
    /// Luma weight in DVTV/DSTV.
    #[arg(long, default_value_t = 0.5)]
    w: f64,
    /// Patch window side for DSTV (odd).
    #[arg(long, default_value_t = 3)]
    patch: usize,
    /// Measurement rate: rows are round(sampling × 3N).
    #[arg(long, default_value_t = 0.2)]
    sampling: f64,
    /// Standard deviation of the measurement noise.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1e-7)]
    eps_stop: f64,
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
    /// Prefix for output files (directories are created).
    #[arg(long, default_value = "out/recover_")]
    out_prefix: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeChoice {
    Signal,
    Freq,
}

impl From<ModeChoice> for RpcaMode {
    fn from(m: ModeChoice) -> RpcaMode {
        match m {
            ModeChoice::Signal => RpcaMode::SignalDomain,
            ModeChoice::Freq => RpcaMode::FrequencyDomain,
        }
    }
}

#[derive(Args)]
struct RpcaArgs {
    /// Low-rank surrogate: plain nuclear norm or its amplitude-spectrum form.
    #[arg(long, value_enum, default_value = "freq")]
    mode: ModeChoice,
    /// Per-column shift of the synthetic target.
    #[arg(long, default_value_t = 1)]
    shift: usize,
    /// Bernoulli noise probability.
    #[arg(long, default_value_t = 0.05)]
    p: f64,
    #[arg(long, default_value_t = 5)]
    seed: u64,
    #[arg(long, default_value_t = 1e-5)]
    eps_stop: f64,
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
    /// Run the full shift × p grid in both modes instead of one cell.
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value = "out/rpca_")]
    out_prefix: String,
}

#[derive(Args)]
struct CheckArgs {
    /// Run a single suite instead of all of them.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITE_NAMES))]
    suite: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Norm spec, outermost first, e.g. "l1(group6:nuclear3x2)".
    #[arg(long)]
    norm: String,
    /// Input dimension the innermost layer consumes.
    #[arg(long)]
    dim: usize,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let run = match cli.cmd {
        Cmd::Recover(a) => cmd_recover(a),
        Cmd::Rpca(a) => cmd_rpca(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Classify(a) => cmd_classify(a),
    };
    match run {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("epirelax: {e}");
            std::process::exit(1);
        }
    }
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct RunManifest {
    command: String,
    args: Vec<String>,
    seed: u64,
    version: String,
    started_unix_ms: u128,
    finished_unix_ms: u128,
}

fn now_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Writes through a temp file in the target directory, then renames, so a
/// crash never leaves a half-written file under the final name.
fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Creates the directory an output prefix points into, so image writers that
/// assume an existing parent can run.
fn ensure_prefix_dir(prefix: &str) -> Result<()> {
    if let Some(parent) = Path::new(&format!("{prefix}x")).parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}

fn write_manifest(prefix: &str, command: &str, seed: u64, started: u128) -> Result<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        args: std::env::args().skip(1).collect(),
        seed,
        version: format!("epirelax {}", env!("CARGO_PKG_VERSION")),
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::InvalidInput(format!("manifest serialization: {e}")))?;
    atomic_write(Path::new(&format!("{prefix}manifest.json")), json.as_bytes())
}

fn write_trace_csv(path: &Path, trace: &SolveTrace) -> Result<()> {
    let mut csv = String::from("iter,residual,objective,elapsed_ms\n");
    for i in 0..trace.residual.len() {
        csv.push_str(&format!(
            "{},{:.6e},{:.10e},{:.3}\n",
            i + 1,
            trace.residual[i],
            trace.objective[i],
            trace.elapsed_ms[i]
        ));
    }
    atomic_write(path, csv.as_bytes())
}

fn status_word(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIter => "max-iter",
    }
}

fn exit_for(s: SolveStatus) -> i32 {
    match s {
        SolveStatus::Converged => 0,
        SolveStatus::MaxIter => 2,
    }
}

// ---------------------------------------------------------------------------
// recover
// ---------------------------------------------------------------------------

fn cmd_recover(a: RecoverArgs) -> Result<i32> {
    let started = now_ms();
    ensure_prefix_dir(&a.out_prefix)?;
    let truth = match (&a.input, a.synthetic) {
        (Some(path), _) => {
            let img = load_ppm(path)?;
            if img.channels() != 3 {
                return Err(Error::InvalidInput(
                    "recovery expects a 3-channel PPM ground truth".into(),
                ));
            }
            img
        }
        (None, Some(SynthKind::Piecewise)) => synth_piecewise(a.width, a.height, a.seed)?,
        (None, None) => {
            eprintln!("epirelax: recover needs --input or --synthetic");
            return Ok(64);
        }
    };
    let (width, height) = (truth.width(), truth.height());
    let n3 = 3 * width * height;
    if !(a.sampling > 0.0 && a.sampling <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "sampling rate {} outside (0, 1]",
            a.sampling
        )));
    }
    let m = ((a.sampling * n3 as f64).round() as usize).clamp(1, n3);
    let phi = measurement_op(m, n3, a.seed)?;

    // y = Φx̂ + σ·noise; the fidelity radius is the oracle ‖Φx̂ − y‖₂.
    let clean = phi.apply_vec(truth.pixels());
    let mut y = clean.clone();
    if a.sigma > 0.0 {
        let normal = rand_distr::Normal::new(0.0, a.sigma)
            .map_err(|e| Error::Config(format!("noise sigma: {e}")))?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(0x9e3779b9));
        for v in &mut y {
            *v += normal.sample(&mut rng);
        }
    }
    let eps_fid = clean
        .iter()
        .zip(&y)
        .map(|(c, n)| (c - n) * (c - n))
        .sum::<f64>()
        .sqrt();

    let reg = match a.reg {
        RegChoice::Vtv | RegChoice::VtvPair => Regularizer::Vtv,
        RegChoice::VtvDirect => Regularizer::VtvDirect,
        RegChoice::Dvtv => Regularizer::Dvtv,
        RegChoice::Dstv => Regularizer::Dstv,
    };
    let mut cfg = RecoveryConfig::new(reg, width, height)?;
    cfg.w = a.w;
    cfg.patch = PatchConfig::new(a.patch)?;
    cfg.eps_fid = eps_fid;
    cfg.eps_stop = a.eps_stop;
    cfg.max_iter = a.max_iter;
    cfg.seed = a.seed;

    if a.reg == RegChoice::VtvPair {
        let (erx, direct) = vtv_pair_equivalence(&y, phi, &cfg)?;
        let mut csv = String::from("iter,dist_direct,dist_erx\n");
        for i in 0..erx.len().max(direct.len()) {
            let d = direct.get(i).map_or(String::new(), |v| format!("{v:.10e}"));
            let e = erx.get(i).map_or(String::new(), |v| format!("{v:.10e}"));
            csv.push_str(&format!("{},{d},{e}\n", i + 1));
        }
        atomic_write(Path::new(&format!("{}pair.csv", a.out_prefix)), csv.as_bytes())?;
        write_manifest(&a.out_prefix, "recover", a.seed, started)?;
        println!(
            "vtv-pair: direct {} iters (final dist {:.3e}), relaxed {} iters (final dist {:.3e})",
            direct.len(),
            direct.last().copied().unwrap_or(f64::NAN),
            erx.len(),
            erx.last().copied().unwrap_or(f64::NAN),
        );
        return Ok(0);
    }

    let ((img, trace), status) = recover_full(&y, phi, &cfg)?;
    let psnr_db = psnr(&img, &truth)?;

    save_ppm(Path::new(&format!("{}recovered.ppm", a.out_prefix)), &img)?;
    write_trace_csv(Path::new(&format!("{}trace.csv", a.out_prefix)), &trace)?;
    let metrics = format!(
        "reg,width,height,sampling,sigma,seed,psnr_db,iters,status\n{},{},{},{},{},{},{:.6},{},{}\n",
        reg_word(a.reg),
        width,
        height,
        a.sampling,
        a.sigma,
        a.seed,
        psnr_db,
        trace.residual.len(),
        status_word(status),
    );
    atomic_write(Path::new(&format!("{}metrics.csv", a.out_prefix)), metrics.as_bytes())?;
    write_manifest(&a.out_prefix, "recover", a.seed, started)?;
    println!(
        "recover {}: psnr {:.2} dB, {} iterations, {}",
        reg_word(a.reg),
        psnr_db,
        trace.residual.len(),
        status_word(status)
    );
    Ok(exit_for(status))
}

fn reg_word(r: RegChoice) -> &'static str {
    match r {
        RegChoice::Vtv => "vtv",
        RegChoice::VtvDirect => "vtv-direct",
        RegChoice::Dvtv => "dvtv",
        RegChoice::Dstv => "dstv",
        RegChoice::VtvPair => "vtv-pair",
    }
}

// ---------------------------------------------------------------------------
// rpca
// ---------------------------------------------------------------------------

fn mode_word(m: RpcaMode) -> &'static str {
    match m {
        RpcaMode::SignalDomain => "signal",
        RpcaMode::FrequencyDomain => "freq",
    }
}

fn save_matrix_pgm(path: &Path, data: &[f64], rows: usize, cols: usize) -> Result<()> {
    // Column-major matrix data is exactly the single-channel plane layout
    // (width = cols, height = rows).
    let img = ImagePlane::from_clamped(cols, rows, 1, data.to_vec())?;
    save_ppm(path, &img)
}

fn cell_row(mode: RpcaMode, shift: usize, p: f64, seed: u64, r: &CellResult) -> String {
    format!(
        "{},{},{},{},{:.6},{},{}\n",
        mode_word(mode),
        shift,
        p,
        seed,
        r.psnr_db,
        r.trace.residual.len(),
        status_word(r.status),
    )
}

fn cmd_rpca(a: RpcaArgs) -> Result<i32> {
    let started = now_ms();
    ensure_prefix_dir(&a.out_prefix)?;
    if a.sweep {
        let mut csv = String::from("mode,shift,p,seed,psnr_db,iters,status\n");
        let mut worst = SolveStatus::Converged;
        for mode in [RpcaMode::SignalDomain, RpcaMode::FrequencyDomain] {
            for shift in [0usize, 1, 2] {
                for p in [0.025f64, 0.05, 0.1] {
                    let seed = a.seed + shift as u64;
                    let r = run_synthetic_cell(mode, shift, p, seed, a.eps_stop, a.max_iter)?;
                    if r.status == SolveStatus::MaxIter {
                        worst = SolveStatus::MaxIter;
                    }
                    println!(
                        "{} shift={shift} p={p}: {:.2} dB ({} iters, {})",
                        mode_word(mode),
                        r.psnr_db,
                        r.trace.residual.len(),
                        status_word(r.status)
                    );
                    csv.push_str(&cell_row(mode, shift, p, seed, &r));
                }
            }
        }
        atomic_write(Path::new(&format!("{}sweep.csv", a.out_prefix)), csv.as_bytes())?;
        write_manifest(&a.out_prefix, "rpca", a.seed, started)?;
        return Ok(exit_for(worst));
    }

    let mode: RpcaMode = a.mode.into();
    let r = run_synthetic_cell(mode, a.shift, a.p, a.seed, a.eps_stop, a.max_iter)?;
    save_matrix_pgm(
        Path::new(&format!("{}L.pgm", a.out_prefix)),
        r.l.data(),
        r.l.rows(),
        r.l.cols(),
    )?;
    save_matrix_pgm(
        Path::new(&format!("{}S.pgm", a.out_prefix)),
        r.s.data(),
        r.s.rows(),
        r.s.cols(),
    )?;
    write_trace_csv(Path::new(&format!("{}trace.csv", a.out_prefix)), &r.trace)?;
    let metrics = format!(
        "mode,shift,p,seed,psnr_db,iters,status\n{}",
        cell_row(mode, a.shift, a.p, a.seed, &r)
    );
    atomic_write(Path::new(&format!("{}metrics.csv", a.out_prefix)), metrics.as_bytes())?;
    write_manifest(&a.out_prefix, "rpca", a.seed, started)?;
    println!(
        "rpca {} shift={} p={}: psnr {:.2} dB, {} iterations, {}",
        mode_word(mode),
        a.shift,
        a.p,
        r.psnr_db,
        r.trace.residual.len(),
        status_word(r.status)
    );
    Ok(exit_for(r.status))
}

// ---------------------------------------------------------------------------
// check / classify
// ---------------------------------------------------------------------------

fn cmd_check(a: CheckArgs) -> Result<i32> {
    let outcomes = run_all(a.suite.as_deref())?;
    let mut all_pass = true;
    for o in &outcomes {
        println!(
            "{}: {} — {}",
            o.suite,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        all_pass &= o.passed;
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_classify(a: ClassifyArgs) -> Result<i32> {
    let ln = parse_norm_spec(&a.norm, a.dim)?;
    println!("layers: {}, input dimension: {}", ln.depth(), ln.input_dim());
    match validate_assumptions(&ln) {
        Classification::SolutionPreserving => {
            println!("solution-preserving: relaxed minimizers match the original problem");
            Ok(0)
        }
        Classification::ConvexRelaxationOnly { reason } => {
            println!("convex relaxation only: {reason}");
            Ok(0)
        }
        Classification::Invalid { reason } => {
            println!("invalid: {reason}");
            Ok(1)
        }
    }
}
