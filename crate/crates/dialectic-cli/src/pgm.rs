//! Binary PGM (P5) reading and writing, 8- or 16-bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// A raw grayscale raster with its declared maximum intensity.
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub samples: Vec<u32>,
}

pub fn read_pgm(path: &Path) -> Result<Pgm> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pgm(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn parse_pgm(bytes: &[u8]) -> Result<Pgm> {
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        bail!("not a binary PGM (P5) file");
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comment lines
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            bail!("malformed PGM header");
        }
        *field = std::str::from_utf8(&bytes[start..pos])?.parse()?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        bail!("unsupported PGM geometry ({width}x{height}, maxval {maxval})");
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let count = width * height;
    let samples = if maxval < 256 {
        if bytes.len() < pos + count {
            bail!("truncated PGM raster");
        }
        bytes[pos..pos + count].iter().map(|&b| b as u32).collect()
    } else {
        if bytes.len() < pos + 2 * count {
            bail!("truncated PGM raster");
        }
        bytes[pos..pos + 2 * count]
            .chunks_exact(2)
            .map(|p| ((p[0] as u32) << 8) | p[1] as u32)
            .collect()
    };
    Ok(Pgm {
        width,
        height,
        maxval: maxval as u32,
        samples,
    })
}

pub fn write_pgm(path: &Path, width: usize, height: usize, maxval: u32, samples: &[u32]) -> Result<()> {
    if samples.len() != width * height {
        bail!("sample count does not match the raster size");
    }
    if maxval == 0 || maxval > 65535 {
        bail!("maxval must be in 1..=65535");
    }
    let mut out = Vec::with_capacity(32 + samples.len() * 2);
    write!(out, "P5\n{} {}\n{}\n", width, height, maxval)?;
    if maxval < 256 {
        out.extend(samples.iter().map(|&s| s.min(maxval) as u8));
    } else {
        for &s in samples {
            let s = s.min(maxval) as u16;
            out.extend_from_slice(&s.to_be_bytes());
        }
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
