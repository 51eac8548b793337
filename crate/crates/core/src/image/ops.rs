//! Linear operators on images: periodic differences, the RGB
//! luma/chroma decorrelation, gradient permutations, patch expansion, and
//! the subsampled Walsh-Hadamard measurement.
//!
//! All operators act on flat channel-major, column-major vectors (see the
//! module docs of [`super`]). Every operator here has an exact adjoint;
//! orthogonal ones (color transform, permutations, full Hadamard) are
//! norm-preserving.

use std::sync::Arc;

use rand::{Rng, SeedableRng};

use crate::linalg::{BlockOp, LinearOp, OpRef, Permutation, Selection};
use crate::{Error, Result};

/// Vertical forward difference with periodic boundary on one channel:
/// `(Dv x)(r,c) = x(r+1 mod H, c) − x(r,c)`.
struct DiffV {
    width: usize,
    height: usize,
}

/// Horizontal forward difference with periodic boundary on one channel.
struct DiffH {
    width: usize,
    height: usize,
}

impl LinearOp for DiffV {
    fn in_dim(&self) -> usize {
        self.width * self.height
    }
    fn out_dim(&self) -> usize {
        self.width * self.height
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let h = self.height;
        for c in 0..self.width {
            for r in 0..h {
                out[c * h + r] = x[c * h + (r + 1) % h] - x[c * h + r];
            }
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        let h = self.height;
        for c in 0..self.width {
            for r in 0..h {
                out[c * h + r] = y[c * h + (r + h - 1) % h] - y[c * h + r];
            }
        }
    }
}

impl LinearOp for DiffH {
    fn in_dim(&self) -> usize {
        self.width * self.height
    }
    fn out_dim(&self) -> usize {
        self.width * self.height
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let (w, h) = (self.width, self.height);
        for c in 0..w {
            for r in 0..h {
                out[c * h + r] = x[((c + 1) % w) * h + r] - x[c * h + r];
            }
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        let (w, h) = (self.width, self.height);
        for c in 0..w {
            for r in 0..h {
                out[c * h + r] = y[((c + w - 1) % w) * h + r] - y[c * h + r];
            }
        }
    }
}

/// The vertical and horizontal periodic difference operators on one
/// `width×height` channel.
pub fn diff_ops(width: usize, height: usize) -> (OpRef, OpRef) {
    assert!(width >= 2 && height >= 2, "differences need at least 2x2");
    (
        Arc::new(DiffV { width, height }),
        Arc::new(DiffH { width, height }),
    )
}

/// The stacked gradient over `channels` planes:
/// `[Dv x₁; Dh x₁; Dv x₂; …]`, mapping `ℝ^{cN} → ℝ^{2cN}`.
pub fn grad3(width: usize, height: usize, channels: usize) -> OpRef {
    assert!(channels >= 1);
    let (dv, dh) = diff_ops(width, height);
    let n = width * height;
    let mut b = BlockOp::new(&vec![n; 2 * channels], &vec![n; channels]);
    for c in 0..channels {
        b.set(2 * c, c, 1.0, dv.clone()).expect("dims match");
        b.set(2 * c + 1, c, 1.0, dh.clone()).expect("dims match");
    }
    Arc::new(b)
}

/// The orthonormal 3-point DCT across channels, per pixel (`C₀ ⊗ I`):
/// channel 0 of the output is luma, channels 1 and 2 are chroma.
struct ColorDct3 {
    n: usize,
}

fn dct3_rows() -> [[f64; 3]; 3] {
    let a = 1.0 / 3f64.sqrt();
    let b = 1.0 / 2f64.sqrt();
    let c = 1.0 / 6f64.sqrt();
    [[a, a, a], [b, 0.0, -b], [c, -2.0 * c, c]]
}

impl LinearOp for ColorDct3 {
    fn in_dim(&self) -> usize {
        3 * self.n
    }
    fn out_dim(&self) -> usize {
        3 * self.n
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let m = dct3_rows();
        for i in 0..self.n {
            for (k, row) in m.iter().enumerate() {
                out[k * self.n + i] =
                    row[0] * x[i] + row[1] * x[self.n + i] + row[2] * x[2 * self.n + i];
            }
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        let m = dct3_rows();
        for i in 0..self.n {
            for c in 0..3 {
                out[c * self.n + i] =
                    m[0][c] * y[i] + m[1][c] * y[self.n + i] + m[2][c] * y[2 * self.n + i];
            }
        }
    }
}

/// `C₀ ⊗ I` on an RGB image with `n_pixels` per channel.
pub fn color_transform(n_pixels: usize) -> OpRef {
    Arc::new(ColorDct3 { n: n_pixels })
}

/// Gradient reorderings of the stacked `6N` gradient vector
/// `[Dv x₁; Dh x₁; Dv x₂; Dh x₂; Dv x₃; Dh x₃]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PermVariant {
    /// `[channel-0 (v,h) pairs per pixel | channel-1/2 4-tuples per pixel]`:
    /// the luma/chroma split used after the color transform.
    P1,
    /// Per-pixel 6-tuples `(c₁v, c₁h, c₂v, c₂h, c₃v, c₃h)`: the grouping for
    /// plain vectorial TV.
    P4,
}

/// Builds the requested gradient permutation for a `width×height` image.
pub fn permute_gradients(variant: PermVariant, width: usize, height: usize) -> OpRef {
    let n = width * height;
    let mut perm = vec![0usize; 6 * n];
    match variant {
        PermVariant::P1 => {
            for i in 0..n {
                for d in 0..2 {
                    perm[2 * i + d] = d * n + i;
                    perm[2 * n + 4 * i + 2 * d] = (2 + d * 2) * n + i;
                    perm[2 * n + 4 * i + 2 * d + 1] = (3 + d * 2) * n + i;
                }
            }
        }
        PermVariant::P4 => {
            for i in 0..n {
                for c in 0..3 {
                    for d in 0..2 {
                        perm[6 * i + 2 * c + d] = (2 * c + d) * n + i;
                    }
                }
            }
        }
    }
    Arc::new(Permutation::new(perm).expect("permutation indices are a bijection"))
}

/// Patch geometry: an odd window side `w`, centered.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchConfig {
    w: usize,
}

impl PatchConfig {
    pub fn new(w: usize) -> Result<Self> {
        if w == 0 || w % 2 == 0 {
            return Err(Error::Config(format!("patch side {w} must be odd and positive")));
        }
        Ok(PatchConfig { w })
    }

    pub fn side(&self) -> usize {
        self.w
    }

    /// Window area `W²`.
    pub fn area(&self) -> usize {
        self.w * self.w
    }
}

/// The patch expansion `E : ℝ^{6N} → ℝ^{6W²N}` duplicating each pixel's
/// permuted gradients into every window that covers it (periodic wrap).
///
/// Input is the `P1` layout. The output is `N` channel-0 blocks of `2W²`
/// followed by, for each pixel, the channel-1 and channel-2 blocks of
/// `2W²`. Each block is the column-major `W²×2` matrix whose columns stack
/// the window's vertical, then horizontal, differences (window offsets
/// enumerated column-major). Every input coordinate appears in exactly `W²`
/// outputs, so `EᵀE = W²·I` and `‖E‖ = W`.
pub fn patch_expand(cfg: PatchConfig, width: usize, height: usize) -> OpRef {
    let n = width * height;
    let (w2, half) = (cfg.area(), (cfg.side() - 1) / 2);
    let mut idx = vec![0usize; 6 * w2 * n];
    let shifted = |i: usize, t: usize| -> usize {
        let (r, c) = (i % height, i / height);
        let (dr, dc) = (t % cfg.side(), t / cfg.side());
        let rr = (r + dr + height - half) % height;
        let cc = (c + dc + width - half) % width;
        cc * height + rr
    };
    for i in 0..n {
        for t in 0..w2 {
            let m = shifted(i, t);
            for d in 0..2 {
                // Channel-0 block of pixel i.
                idx[i * 2 * w2 + d * w2 + t] = 2 * m + d;
                // Chroma blocks of pixel i, channels 1 and 2.
                for ch in 0..2 {
                    idx[2 * w2 * n + (2 * i + ch) * 2 * w2 + d * w2 + t] = 2 * n + 4 * m + 2 * ch + d;
                }
            }
        }
    }
    Arc::new(Selection::new(idx, 6 * n).expect("indices lie in range"))
}

/// In-place normalized Walsh-Hadamard transform of a power-of-two block.
/// Self-inverse, orthonormal.
fn fwht_normalized(buf: &mut [f64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut len = 1;
    while len < n {
        let mut i = 0;
        while i < n {
            for j in i..i + len {
                let (a, b) = (buf[j], buf[j + len]);
                buf[j] = a + b;
                buf[j + len] = a - b;
            }
            i += 2 * len;
        }
        len *= 2;
    }
    let s = 1.0 / (n as f64).sqrt();
    for v in buf {
        *v *= s;
    }
}

/// Measurement `Φ = S · (±1 diagonal) · (block Walsh-Hadamard)`: random sign
/// flips, a normalized Hadamard per channel block, then a sorted uniform
/// row subselection. A row-subselection of an orthonormal matrix, so
/// `‖Φ‖ ≤ 1` with equality iff `m ≥ 1`.
struct SubsampledWht {
    n: usize,
    block: usize,
    signs: Vec<f64>,
    rows: Vec<usize>,
}

impl SubsampledWht {
    fn transform(&self, x: &[f64]) -> Vec<f64> {
        let mut buf: Vec<f64> = x.iter().zip(&self.signs).map(|(a, s)| a * s).collect();
        for b in buf.chunks_mut(self.block) {
            fwht_normalized(b);
        }
        buf
    }
}

impl LinearOp for SubsampledWht {
    fn in_dim(&self) -> usize {
        self.n
    }
    fn out_dim(&self) -> usize {
        self.rows.len()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let buf = self.transform(x);
        for (o, &r) in out.iter_mut().zip(&self.rows) {
            *o = buf[r];
        }
    }
    fn apply_t(&self, y: &[f64], out: &mut [f64]) {
        let mut buf = vec![0.0; self.n];
        for (v, &r) in y.iter().zip(&self.rows) {
            buf[r] = *v;
        }
        for b in buf.chunks_mut(self.block) {
            fwht_normalized(b); // self-inverse
        }
        for ((o, v), s) in out.iter_mut().zip(buf).zip(&self.signs) {
            *o = v * s;
        }
    }
}

/// Builds the seeded `m_rows × n_cols` measurement operator.
///
/// The Hadamard block size is inferred from `n_cols`: three channel blocks
/// of `n_cols/3` when that is a power of two, else one block of `n_cols`
/// when `n_cols` itself is (the two cases never overlap since `3·2^k` is
/// not a power of two). Signs are drawn before row indices; rows are
/// sampled without replacement and kept sorted.
pub fn measurement_op(m_rows: usize, n_cols: usize, seed: u64) -> Result<OpRef> {
    let block = if n_cols % 3 == 0 && (n_cols / 3).is_power_of_two() {
        n_cols / 3
    } else if n_cols.is_power_of_two() {
        n_cols
    } else {
        return Err(Error::Config(format!(
            "{n_cols} columns: need a power of two per channel block"
        )));
    };
    if m_rows == 0 || m_rows > n_cols {
        return Err(Error::Config(format!(
            "need 1 ≤ rows ≤ {n_cols}, got {m_rows}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let signs: Vec<f64> = (0..n_cols)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let mut all: Vec<usize> = (0..n_cols).collect();
    for i in 0..m_rows {
        let j = rng.random_range(i..n_cols);
        all.swap(i, j);
    }
    let mut rows = all[..m_rows].to_vec();
    rows.sort_unstable();
    Ok(Arc::new(SubsampledWht {
        n: n_cols,
        block,
        signs,
        rows,
    }))
}
