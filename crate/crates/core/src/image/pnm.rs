//! Binary PNM image I/O: P6 (RGB) and P5 (gray), maxval 255.
//!
//! Loading maps bytes to `[0,1]` by `/255`; saving rounds `v·255` to the
//! nearest byte, so a save/load round trip is the identity on 8-bit data.
//! Parse failures report the byte offset they were detected at. Saves are
//! atomic: data goes to a sibling temp file that is renamed over the target.

use std::path::Path;

use crate::{Error, Result};

use super::ImagePlane;

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    /// PNM whitespace: blanks, tabs, CR/LF, plus `#`-to-newline comments.
    fn skip_separators(&mut self) -> Result<()> {
        let start = self.pos;
        loop {
            match self.peek() {
                Some(b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c) => self.pos += 1,
                Some(b'#') => {
                    while !matches!(self.peek(), None | Some(b'\n')) {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        if self.pos == start {
            return self.err("expected whitespace");
        }
        Ok(())
    }

    fn read_int(&mut self) -> Result<usize> {
        let mut v: usize = 0;
        let mut any = false;
        while let Some(b) = self.peek() {
            if !b.is_ascii_digit() {
                break;
            }
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as usize))
                .ok_or(Error::Parse {
                    offset: self.pos,
                    msg: "integer overflows".into(),
                })?;
            self.pos += 1;
            any = true;
        }
        if !any {
            return self.err("expected a decimal integer");
        }
        Ok(v)
    }
}

/// Loads a binary P6 (3-channel) or P5 (1-channel) image with maxval 255.
pub fn load_ppm(path: impl AsRef<Path>) -> Result<ImagePlane> {
    let data = std::fs::read(path)?;
    let mut c = Cursor { data: &data, pos: 0 };
    let channels = match data.get(..2) {
        Some(b"P6") => 3,
        Some(b"P5") => 1,
        _ => return c.err("expected P5 or P6 magic"),
    };
    c.pos = 2;
    c.skip_separators()?;
    let width = c.read_int()?;
    c.skip_separators()?;
    let height = c.read_int()?;
    c.skip_separators()?;
    let maxval_at = c.pos;
    let maxval = c.read_int()?;
    if maxval != 255 {
        return Err(Error::Parse {
            offset: maxval_at,
            msg: format!("maxval {maxval}; only 255 is supported"),
        });
    }
    // Exactly one separator byte before the raster.
    match c.peek() {
        Some(b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c) => c.pos += 1,
        _ => return c.err("expected one whitespace byte before the raster"),
    }
    if width == 0 || height == 0 {
        return c.err("image dimensions must be positive");
    }
    let need = width * height * channels;
    let have = data.len() - c.pos;
    if have < need {
        c.pos = data.len();
        return c.err(format!("raster truncated: need {need} bytes, have {have}"));
    }
    if have > need {
        c.pos += need;
        return c.err(format!("{} trailing bytes after the raster", have - need));
    }
    let raster = &data[c.pos..];
    let n = width * height;
    let mut pixels = vec![0.0f64; n * channels];
    // File raster is row-major with interleaved channels.
    for row in 0..height {
        for col in 0..width {
            for ch in 0..channels {
                let byte = raster[(row * width + col) * channels + ch];
                pixels[ch * n + col * height + row] = byte as f64 / 255.0;
            }
        }
    }
    ImagePlane::new(width, height, channels, pixels)
}

/// Saves as binary P6 (3 channels) or P5 (1 channel), maxval 255, atomically.
pub fn save_ppm(path: impl AsRef<Path>, img: &ImagePlane) -> Result<()> {
    let path = path.as_ref();
    let magic = if img.channels() == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    for row in 0..img.height() {
        for col in 0..img.width() {
            for ch in 0..img.channels() {
                out.push((img.get(ch, row, col) * 255.0).round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, &out)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_path(name: &str) -> std::path::PathBuf {
        std::env::temp_dir().join(format!("epirelax-{}-{name}", std::process::id()))
    }

    fn load_bytes(name: &str, bytes: &[u8]) -> Result<ImagePlane> {
        let p = tmp_path(name);
        std::fs::write(&p, bytes).unwrap();
        let r = load_ppm(&p);
        std::fs::remove_file(&p).ok();
        r
    }

    #[test]
    fn white_pixel_p6() {
        let img = load_bytes("white.ppm", b"P6\n1 1\n255\n\xff\xff\xff").unwrap();
        assert_eq!(img.pixels(), &[1.0, 1.0, 1.0]);
        assert_eq!((img.width(), img.height(), img.channels()), (1, 1, 3));
    }

    #[test]
    fn header_comments_are_skipped() {
        let img = load_bytes(
            "comment.ppm",
            b"P6 # a comment\n# another\n2 1\n# last\n255\n\x00\x00\x00\xff\xff\xff",
        )
        .unwrap();
        assert_eq!(img.get(0, 0, 1), 1.0);
        assert_eq!(img.get(2, 0, 0), 0.0);
    }

    #[test]
    fn round_trip_is_lossless_at_8_bit() {
        // Values exactly on the 8-bit grid survive a save/load round trip.
        let n = 6 * 4;
        let px: Vec<f64> = (0..3 * n).map(|i| ((i * 37) % 256) as f64 / 255.0).collect();
        let img = ImagePlane::new(6, 4, 3, px).unwrap();
        let p = tmp_path("roundtrip.ppm");
        save_ppm(&p, &img).unwrap();
        let back = load_ppm(&p).unwrap();
        std::fs::remove_file(&p).ok();
        assert_eq!(img, back);
    }

    #[test]
    fn gray_round_trip() {
        let px: Vec<f64> = (0..12).map(|i| (i * 20) as f64 / 255.0).collect();
        let img = ImagePlane::new(4, 3, 1, px).unwrap();
        let p = tmp_path("gray.pgm");
        save_ppm(&p, &img).unwrap();
        let back = load_ppm(&p).unwrap();
        std::fs::remove_file(&p).ok();
        assert_eq!(img, back);
    }

    #[test]
    fn malformed_corpus_reports_offsets() {
        let offset_of = |name: &str, bytes: &[u8]| -> usize {
            match load_bytes(name, bytes) {
                Err(Error::Parse { offset, .. }) => offset,
                other => panic!("expected a parse error, got {other:?}"),
            }
        };
        assert_eq!(offset_of("empty.ppm", b""), 0);
        assert_eq!(offset_of("badmagic.ppm", b"P7\n1 1\n255\n"), 0);
        assert_eq!(offset_of("eof.ppm", b"P6"), 2);
        // Width missing: a '-' is not a digit.
        assert_eq!(offset_of("neg.ppm", b"P6\n-1 1\n255\n"), 3);
        // Bad maxval reported at the maxval field.
        assert_eq!(offset_of("maxval.ppm", b"P6\n1 1\n65535\n\xff\xff\xff"), 7);
        // Truncated raster reported at end of data.
        let short = b"P6\n2 1\n255\n\xff";
        assert_eq!(offset_of("short.ppm", short), short.len());
        // Trailing junk reported right after the raster.
        let long = b"P6\n1 1\n255\n\xff\xff\xffZZ";
        assert_eq!(offset_of("long.ppm", long), long.len() - 2);
        // Missing raster separator.
        assert!(matches!(
            load_bytes("nosep.ppm", b"P6\n1 1\n255"),
            Err(Error::Parse { .. })
        ));
    }
}
