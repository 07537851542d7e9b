//! Portable graymap reader (P2 and P5) and P5 writer.
//!
//! Pixel values map linearly onto `[0, 1]`. Image row 0 is the top of the
//! picture, which is grid row `ny - 1` (y = 1).

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::PgmParse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments.
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::PgmParse {
                offset: start,
                message: format!("{what} out of range"),
            })
    }
}

/// Decodes a P2 or P5 graymap.
pub fn decode_pgm(bytes: &[u8]) -> Result<ScalarField> {
    let mut cur = Cursor { bytes, pos: 0 };
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(cur.err("missing P2/P5 magic number")),
    };
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::PgmParse {
            offset: maxval_at,
            message: format!("maxval {maxval} not in 1..=65535"),
        });
    }
    let grid = Grid2D::new(width, height).map_err(|_| Error::PgmParse {
        offset: 2,
        message: format!("image {width}x{height} is smaller than 3x3"),
    })?;
    let n = width * height;
    let mut raw = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates maxval from the raster
        if !cur.bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(cur.err("expected whitespace before raster"));
        }
        cur.pos += 1;
        let sample = if maxval > 255 { 2 } else { 1 };
        let data = &bytes[cur.pos..];
        if data.len() < n * sample {
            cur.pos = bytes.len();
            return Err(cur.err(format!(
                "raster truncated: need {} bytes, found {}",
                n * sample,
                data.len()
            )));
        }
        for k in 0..n {
            let v = if sample == 2 {
                u16::from_be_bytes([data[2 * k], data[2 * k + 1]]) as usize
            } else {
                data[k] as usize
            };
            raw.push(v);
        }
    } else {
        for _ in 0..n {
            raw.push(cur.number("pixel value")?);
        }
    }
    if let Some(k) = raw.iter().position(|&v| v > maxval) {
        return Err(Error::PgmParse {
            offset: cur.pos,
            message: format!("pixel {k} exceeds maxval {maxval}"),
        });
    }

    let scale = 1.0 / maxval as f64;
    let mut values = vec![0.0; n];
    for (r, row) in raw.chunks(width).enumerate() {
        let j = height - 1 - r;
        for (i, &v) in row.iter().enumerate() {
            values[j * width + i] = v as f64 * scale;
        }
    }
    ScalarField::from_values(grid, values)
}

/// Encodes as binary P5 with maxval 255, clamping to `[0, 1]`.
pub fn encode_pgm(field: &ScalarField) -> Vec<u8> {
    let g = field.grid();
    let (w, h) = (g.nx(), g.ny());
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for r in 0..h {
        let j = h - 1 - r;
        for i in 0..w {
            let v = field.get(i, j).clamp(0.0, 1.0);
            out.push((v * 255.0).round() as u8);
        }
    }
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<ScalarField> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes)
}

/// Loads and checks the image against an expected grid.
pub fn load_pgm_on(path: impl AsRef<Path>, grid: &Grid2D) -> Result<ScalarField> {
    let field = load_pgm(path)?;
    grid.check_same(field.grid())?;
    Ok(field)
}

pub fn save_pgm(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(field)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn black_and_white_p5() {
        let mut img = b"P5\n4 3\n255\n".to_vec();
        img.extend([0u8; 12]);
        let f = decode_pgm(&img).unwrap();
        assert_eq!(f.max_abs(), 0.0);

        let mut img = b"P5 4 3 255\n".to_vec();
        img.extend([255u8; 12]);
        let f = decode_pgm(&img).unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn ascii_with_comments_and_orientation() {
        let img = b"P2\n# a comment\n3 3\n# another\n10\n0 0 0\n0 0 0\n10 5 0\n";
        let f = decode_pgm(img).unwrap();
        // last image row is the bottom grid row
        assert_eq!(f.get(0, 0), 1.0);
        assert_eq!(f.get(1, 0), 0.5);
        assert_eq!(f.get(0, 2), 0.0);
    }

    #[test]
    fn sixteen_bit_samples() {
        let mut img = b"P5\n3 3\n65535\n".to_vec();
        for _ in 0..9 {
            img.extend(65535u16.to_be_bytes());
        }
        let f = decode_pgm(&img).unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn malformed_header_reports_offset() {
        match decode_pgm(b"P5\n4 x\n255\n") {
            Err(Error::PgmParse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            decode_pgm(b"P6\n"),
            Err(Error::PgmParse { offset: 0, .. })
        ));
        assert!(matches!(
            decode_pgm(b"P5\n3 3\n255\n\x00\x00"),
            Err(Error::PgmParse { .. })
        ));
        assert!(matches!(
            decode_pgm(b"P2 3 3 70000 "),
            Err(Error::PgmParse { .. })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.pgm");
        save_pgm(&ScalarField::zeros(Grid2D::new(5, 4).unwrap()), &path).unwrap();
        let err = load_pgm_on(&path, &Grid2D::new(4, 5).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }

    #[test]
    fn save_clamps_out_of_range() {
        let g = Grid2D::new(3, 3).unwrap();
        let f = ScalarField::from_fn(g, |x, _| 3.0 * x - 1.0);
        let back = decode_pgm(&encode_pgm(&f)).unwrap();
        assert_eq!(back.get(0, 0), 0.0);
        assert_eq!(back.get(2, 0), 1.0);
    }

    proptest! {
        #[test]
        fn round_trip_within_quantization(
            vals in proptest::collection::vec(0.0f64..=1.0, 7 * 5)
        ) {
            let f = ScalarField::from_values(Grid2D::new(7, 5).unwrap(), vals).unwrap();
            let back = decode_pgm(&encode_pgm(&f)).unwrap();
            prop_assert!(back.max_abs_diff(&f) <= 1.0 / 255.0 + 1e-12);
        }
    }
}
