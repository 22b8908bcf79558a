//! Plain/binary PGM (P2/P5) reading and writing.
//!
//! Pixels are written as 16-bit samples (`maxval = 65535`) after clamping to
//! `[0, 1]`, and rescaled to `[0, 1]` on read.

use std::io::{Read, Write};
use std::path::Path;

use super::GrayImage;
use crate::error::{Error, Result};
use crate::Scalar;

const MAXVAL: u32 = 65535;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// ASCII samples.
    Plain,
    /// Big-endian binary samples.
    Binary,
}

fn quantize<T: Scalar>(v: T) -> u32 {
    let v = v.to_f64_lossy();
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (v * MAXVAL as f64).round() as u32
}

pub fn write_pgm<T: Scalar, W: Write>(img: &GrayImage<T>, format: PgmFormat, out: W) -> Result<()> {
    write_pgm_annotated(img, format, &[], out)
}

/// Like [`write_pgm`], with one `# ` comment line per entry after the magic number.
pub fn write_pgm_annotated<T: Scalar, W: Write>(
    img: &GrayImage<T>,
    format: PgmFormat,
    comments: &[String],
    mut out: W,
) -> Result<()> {
    let magic = match format {
        PgmFormat::Plain => "P2",
        PgmFormat::Binary => "P5",
    };
    writeln!(out, "{magic}")?;
    for c in comments {
        if c.contains('\n') {
            return Err(Error::invalid("PGM comment must be a single line"));
        }
        writeln!(out, "# {c}")?;
    }
    write!(out, "{} {}\n{MAXVAL}\n", img.width(), img.height())?;
    match format {
        PgmFormat::Plain => {
            for r in 0..img.height() {
                let row: Vec<String> = (0..img.width())
                    .map(|c| quantize(img.get(r, c)).to_string())
                    .collect();
                writeln!(out, "{}", row.join(" "))?;
            }
        }
        PgmFormat::Binary => {
            let mut buf = Vec::with_capacity(2 * img.len());
            for &p in img.pixels() {
                buf.extend_from_slice(&(quantize(p) as u16).to_be_bytes());
            }
            out.write_all(&buf)?;
        }
    }
    Ok(())
}

pub fn save_pgm<T: Scalar>(img: &GrayImage<T>, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_pgm(img, PgmFormat::Binary, std::io::BufWriter::new(file))
}

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).map_err(|e| Error::Parse(e.to_string()))?);
    }
    let binary = match tokens[0] {
        "P2" => false,
        "P5" => true,
        m => return Err(Error::Parse(format!("unsupported PGM magic '{m}'"))),
    };
    let num = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad PGM header field '{s}'")))
    };
    let (width, height, maxval) = (num(tokens[1])?, num(tokens[2])?, num(tokens[3])? as u32);
    if width == 0 || height == 0 || maxval == 0 || maxval > MAXVAL {
        return Err(Error::Parse("invalid PGM dimensions or maxval".into()));
    }
    // exactly one whitespace byte separates the header from binary data
    Ok(Header {
        binary,
        width,
        height,
        maxval,
        data_start: pos + 1,
    })
}

pub fn read_pgm<T: Scalar, R: Read>(mut input: R) -> Result<GrayImage<T>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let hdr = parse_header(&bytes)?;
    let n = hdr.width * hdr.height;
    let scale = 1.0 / hdr.maxval as f64;
    let samples: Vec<u32> = if hdr.binary {
        let data = bytes.get(hdr.data_start..).unwrap_or(&[]);
        let wide = hdr.maxval > 255;
        let need = if wide { 2 * n } else { n };
        if data.len() < need {
            return Err(Error::Parse("truncated PGM raster".into()));
        }
        if wide {
            data.chunks_exact(2)
                .take(n)
                .map(|c| u16::from_be_bytes([c[0], c[1]]) as u32)
                .collect()
        } else {
            data[..n].iter().map(|&b| b as u32).collect()
        }
    } else {
        let text = std::str::from_utf8(bytes.get(hdr.data_start.min(bytes.len())..).unwrap_or(&[]))
            .map_err(|e| Error::Parse(e.to_string()))?;
        let vals: std::result::Result<Vec<u32>, _> =
            text.split_ascii_whitespace().take(n).map(str::parse).collect();
        let vals = vals.map_err(|e| Error::Parse(format!("bad PGM sample: {e}")))?;
        if vals.len() < n {
            return Err(Error::Parse("truncated PGM raster".into()));
        }
        vals
    };
    GrayImage::new(
        hdr.width,
        hdr.height,
        samples
            .into_iter()
            .map(|s| T::lit(s.min(hdr.maxval) as f64 * scale))
            .collect(),
    )
}

pub fn load_pgm<T: Scalar>(path: impl AsRef<Path>) -> Result<GrayImage<T>> {
    let file = std::fs::File::open(path)?;
    read_pgm(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GrayImage<f64> {
        GrayImage::from_fn(5, 3, |r, c| (r * 5 + c) as f64 / 14.0)
    }

    #[test]
    fn round_trip_both_formats() {
        for fmt in [PgmFormat::Plain, PgmFormat::Binary] {
            let mut buf = Vec::new();
            write_pgm(&sample(), fmt, &mut buf).unwrap();
            let back: GrayImage<f64> = read_pgm(buf.as_slice()).unwrap();
            assert!(back.same_shape(&sample()));
            for (a, b) in back.pixels().iter().zip(sample().pixels()) {
                assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-12);
            }
        }
    }

    #[test]
    fn annotated_round_trip() {
        let mut buf = Vec::new();
        let notes = vec!["seed=3".to_string(), "hash=abc".to_string()];
        write_pgm_annotated(&sample(), PgmFormat::Binary, &notes, &mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n# seed=3\n# hash=abc\n5 3\n"));
        let back: GrayImage<f64> = read_pgm(buf.as_slice()).unwrap();
        assert!(back.same_shape(&sample()));
        assert!(write_pgm_annotated(&sample(), PgmFormat::Plain, &["a\nb".to_string()], Vec::new()).is_err());
    }

    #[test]
    fn reads_8bit_with_comments() {
        let text = b"P2\n# a comment\n2 1\n255\n0 255\n";
        let img: GrayImage<f64> = read_pgm(&text[..]).unwrap();
        assert_eq!(img.pixels(), &[0.0, 1.0]);
        let mut bin = b"P5 2 1 255\n".to_vec();
        bin.extend_from_slice(&[51, 255]);
        let img: GrayImage<f64> = read_pgm(bin.as_slice()).unwrap();
        assert!((img.get(0, 0) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn clamps_out_of_range_on_write() {
        let img = GrayImage::new(2, 1, vec![-0.5, 1.5]).unwrap();
        let mut buf = Vec::new();
        write_pgm(&img, PgmFormat::Plain, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("0 65535\n"));
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_pgm::<f64, _>(&b"P6 1 1 255\n\0\0\0"[..]).is_err());
        assert!(read_pgm::<f64, _>(&b"P5 2 2 255\n\0"[..]).is_err());
        assert!(read_pgm::<f64, _>(&b"P2 2"[..]).is_err());
    }
}
