//! Multiband image persistence: one binary PGM per band plus a plain-text
//! sidecar header (`.mb`) naming the composition, and label-map I/O.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dialectic::{Image64, LabelMap};

use crate::pgm::{read_pgm, write_pgm};

const BAND_MAXVAL: u32 = 65535;

/// Stacks per-band grayscale rasters into one multiband image, normalizing
/// each intensity by the band's declared maximum.
pub fn ingest_bands(paths: &[PathBuf]) -> Result<Image64> {
    if paths.is_empty() {
        bail!("no band files given");
    }
    let bands: Vec<_> = paths.iter().map(|p| read_pgm(p)).collect::<Result<_>>()?;
    let (h, w) = (bands[0].height, bands[0].width);
    if bands.iter().any(|b| b.height != h || b.width != w) {
        bail!("band rasters have mismatched dimensions");
    }
    let n = bands.len();
    let mut data = vec![0.0f64; h * w * n];
    for (j, band) in bands.iter().enumerate() {
        let scale = band.maxval as f64;
        for (u, &s) in band.samples.iter().enumerate() {
            data[u * n + j] = s as f64 / scale;
        }
    }
    Ok(Image64::new(h, w, n, data)?)
}

/// Writes `base.mb` plus `base_b<i>.pgm` for each band (16-bit).
pub fn write_multiband(base: &Path, image: &Image64) -> Result<()> {
    let stem = base
        .file_name()
        .and_then(|s| s.to_str())
        .context("multiband base name must be valid UTF-8")?;
    let dir = base.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).ok();
    let mut header = String::new();
    header.push_str("multiband 1\n");
    header.push_str(&format!("height {}\n", image.height()));
    header.push_str(&format!("width {}\n", image.width()));
    header.push_str(&format!("bands {}\n", image.bands()));
    for j in 0..image.bands() {
        let band_name = format!("{stem}_b{j}.pgm");
        let samples: Vec<u32> = (0..image.pixel_count())
            .map(|u| (image.pixel(u)[j] * BAND_MAXVAL as f64).round() as u32)
            .collect();
        write_pgm(&dir.join(&band_name), image.width(), image.height(), BAND_MAXVAL, &samples)?;
        header.push_str(&format!("band {j} {band_name}\n"));
    }
    fs::write(base.with_extension("mb"), header)?;
    Ok(())
}

/// Reads a `.mb` composition written by [`write_multiband`] (band paths are
/// relative to the header file).
pub fn read_multiband(path: &Path) -> Result<Image64> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut lines = text.lines();
    match lines.next() {
        Some("multiband 1") => {}
        _ => bail!("{} is not a multiband header (version 1)", path.display()),
    }
    let mut height = 0usize;
    let mut width = 0usize;
    let mut bands = 0usize;
    let mut files: Vec<(usize, PathBuf)> = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("height") => height = parts.next().context("height value")?.parse()?,
            Some("width") => width = parts.next().context("width value")?.parse()?,
            Some("bands") => bands = parts.next().context("bands value")?.parse()?,
            Some("band") => {
                let idx: usize = parts.next().context("band index")?.parse()?;
                let file = parts.next().context("band file")?;
                files.push((idx, dir.join(file)));
            }
            Some(other) => bail!("unknown header field {other:?}"),
            None => {}
        }
    }
    if files.len() != bands || bands == 0 {
        bail!("header declares {bands} bands but lists {}", files.len());
    }
    files.sort_by_key(|(i, _)| *i);
    let paths: Vec<PathBuf> = files.into_iter().map(|(_, p)| p).collect();
    let image = ingest_bands(&paths)?;
    if image.height() != height || image.width() != width {
        bail!("band rasters disagree with the declared dimensions");
    }
    Ok(image)
}

/// Loads either a `.mb` composition or a single `.pgm` band.
pub fn load_image(path: &Path) -> Result<Image64> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("mb") => read_multiband(path),
        _ => ingest_bands(&[path.to_path_buf()]),
    }
}

/// Label maps persist as PGM with one label per gray level.
pub fn write_labels(path: &Path, labels: &LabelMap, classes: usize) -> Result<()> {
    let maxval = (classes.max(2) - 1) as u32;
    let samples: Vec<u32> = labels.labels().iter().map(|&l| l as u32).collect();
    write_pgm(path, labels.width(), labels.height(), maxval, &samples)
}

pub fn read_labels(path: &Path) -> Result<LabelMap> {
    let pgm = read_pgm(path)?;
    Ok(LabelMap::new(
        pgm.height,
        pgm.width,
        pgm.samples.iter().map(|&s| s as usize).collect(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dialectic::MultibandImage;

    #[test]
    fn multiband_round_trip_preserves_quantized_values() {
        let dir = tempfile::tempdir().unwrap();
        let data: Vec<f64> = (0..2 * 3 * 2).map(|i| i as f64 / 15.0).collect();
        let img = MultibandImage::new(2, 3, 2, data).unwrap();
        let base = dir.path().join("test");
        write_multiband(&base, &img).unwrap();
        let back = read_multiband(&dir.path().join("test.mb")).unwrap();
        assert_eq!(back.height(), 2);
        assert_eq!(back.width(), 3);
        assert_eq!(back.bands(), 2);
        for (a, b) in img.as_slice().iter().zip(back.as_slice()) {
            // one 16-bit quantization step of tolerance
            assert!((a - b).abs() <= 0.5 / 65535.0);
        }
    }

    #[test]
    fn constant_255_band_normalizes_to_one() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.pgm");
        write_pgm(&p, 2, 2, 255, &[255, 255, 255, 255]).unwrap();
        let img = ingest_bands(&[p.clone(), p.clone(), p]).unwrap();
        assert!(img.pixels().all(|px| px == [1.0, 1.0, 1.0]));
    }

    #[test]
    fn mixed_intensities_normalize_by_maxval() {
        let dir = tempfile::tempdir().unwrap();
        let mut paths = Vec::new();
        for (i, v) in [0u32, 128, 255].iter().enumerate() {
            let p = dir.path().join(format!("b{i}.pgm"));
            write_pgm(&p, 1, 1, 255, &[*v]).unwrap();
            paths.push(p);
        }
        let img = ingest_bands(&paths).unwrap();
        assert_eq!(img.pixel(0), &[0.0, 128.0 / 255.0, 1.0]);
    }

    #[test]
    fn single_band_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("only.pgm");
        write_pgm(&p, 2, 1, 255, &[10, 20]).unwrap();
        let img = load_image(&p).unwrap();
        assert_eq!(img.bands(), 1);
    }

    #[test]
    fn mismatched_bands_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.pgm");
        let b = dir.path().join("b.pgm");
        write_pgm(&a, 2, 1, 255, &[0, 0]).unwrap();
        write_pgm(&b, 1, 1, 255, &[0]).unwrap();
        assert!(ingest_bands(&[a, b]).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.pgm");
        let labels = LabelMap::new(2, 2, vec![0, 1, 2, 1]).unwrap();
        write_labels(&p, &labels, 3).unwrap();
        let back = read_labels(&p).unwrap();
        assert_eq!(back.labels(), labels.labels());
    }
}
