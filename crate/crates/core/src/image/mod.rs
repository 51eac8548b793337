//! Image containers, quality metrics, binary PNM I/O, and the linear
//! operators used by the color-recovery experiments.
//!
//! Images are stored channel-major, each channel column-major: the sample at
//! channel `c`, row `r`, column `j` of a `width×height` image lives at index
//! `c·N + j·height + r` with `N = width·height`. All pixel values live in
//! `[0,1]`; 8-bit files map by `/255`.

mod ops;
mod pnm;

pub use ops::{
    color_transform, diff_ops, grad3, measurement_op, patch_expand, permute_gradients,
    PatchConfig, PermVariant,
};
pub use pnm::{load_ppm, save_ppm};

use rand::{Rng, SeedableRng};

use crate::{Error, Result};

/// A `[0,1]`-valued image with 1 (gray) or 3 (RGB) channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    channels: usize,
    pixels: Vec<f64>,
}

impl ImagePlane {
    /// Wraps pixel data already in `[0,1]`.
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Shape("image dimensions must be positive".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::Shape(format!("{channels} channels; only 1 or 3")));
        }
        if pixels.len() != width * height * channels {
            return Err(Error::Shape(format!(
                "{} samples for a {width}x{height}x{channels} image",
                pixels.len()
            )));
        }
        if pixels.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::InvalidInput("pixel values must lie in [0,1]".into()));
        }
        Ok(ImagePlane {
            width,
            height,
            channels,
            pixels,
        })
    }

    /// Wraps arbitrary finite data, clamping into `[0,1]` (solver outputs).
    pub fn from_clamped(
        width: usize,
        height: usize,
        channels: usize,
        mut pixels: Vec<f64>,
    ) -> Result<Self> {
        if pixels.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput("pixel values must not be NaN".into()));
        }
        for v in &mut pixels {
            *v = v.clamp(0.0, 1.0);
        }
        ImagePlane::new(width, height, channels, pixels)
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Result<Self> {
        ImagePlane::new(width, height, channels, vec![0.0; width * height * channels])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Pixels per channel.
    pub fn n_pixels(&self) -> usize {
        self.width * self.height
    }

    /// Flat index of (channel, row, col).
    pub fn idx(&self, channel: usize, row: usize, col: usize) -> usize {
        debug_assert!(channel < self.channels && row < self.height && col < self.width);
        channel * self.n_pixels() + col * self.height + row
    }

    pub fn get(&self, channel: usize, row: usize, col: usize) -> f64 {
        self.pixels[self.idx(channel, row, col)]
    }

    pub fn set(&mut self, channel: usize, row: usize, col: usize, v: f64) {
        let i = self.idx(channel, row, col);
        self.pixels[i] = v;
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }
}

/// Peak signal-to-noise ratio in dB with peak 1.0, capped at 999 dB for
/// (numerically) identical inputs.
pub fn psnr(a: &ImagePlane, b: &ImagePlane) -> Result<f64> {
    if a.width != b.width || a.height != b.height || a.channels != b.channels {
        return Err(Error::Shape(format!(
            "psnr dims {}x{}x{} vs {}x{}x{}",
            a.width, a.height, a.channels, b.width, b.height, b.channels
        )));
    }
    let mse = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.pixels.len() as f64;
    let db = 10.0 * (1.0 / mse).log10();
    Ok(if db.is_finite() { db.min(999.0) } else { 999.0 })
}

/// Deterministic piecewise-smooth RGB test image: a gentle shared-luminance
/// ramp with a handful of flat rectangles layered on top. Each region carries
/// one luminance level plus a mild per-channel tint, so edges live mostly in
/// the luminance channel with weak chroma, as in natural scenes. Same seed,
/// same image.
pub fn synth_piecewise(width: usize, height: usize, seed: u64) -> Result<ImagePlane> {
    if width == 0 || height == 0 {
        return Err(Error::Shape("image dimensions must be positive".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = width * height;
    let mut px = vec![0.0f64; 3 * n];
    let base = rng.random::<f64>() * 0.3 + 0.3;
    let sx = (rng.random::<f64>() - 0.5) * 0.4;
    let sy = (rng.random::<f64>() - 0.5) * 0.4;
    let bg_tint: [f64; 3] = std::array::from_fn(|_| (rng.random::<f64>() - 0.5) * 0.12);
    for (c, tint) in bg_tint.iter().enumerate() {
        for col in 0..width {
            for row in 0..height {
                let u = col as f64 / width.max(2) as f64;
                let v = row as f64 / height.max(2) as f64;
                px[c * n + col * height + row] = base + sx * u + sy * v + tint;
            }
        }
    }
    let n_rects = 4 + (rng.random::<u32>() % 3) as usize;
    for _ in 0..n_rects {
        let r0 = rng.random_range(0..height);
        let c0 = rng.random_range(0..width);
        let rh = rng.random_range(1..=height.div_ceil(2));
        let cw = rng.random_range(1..=width.div_ceil(2));
        let luma = rng.random::<f64>() * 0.9 + 0.05;
        let tint: [f64; 3] = std::array::from_fn(|_| (rng.random::<f64>() - 0.5) * 0.16);
        for col in c0..(c0 + cw).min(width) {
            for row in r0..(r0 + rh).min(height) {
                for (c, t) in tint.iter().enumerate() {
                    px[c * n + col * height + row] = luma + t;
                }
            }
        }
    }
    for v in &mut px {
        *v = v.clamp(0.0, 1.0);
    }
    ImagePlane::new(width, height, 3, px)
}
