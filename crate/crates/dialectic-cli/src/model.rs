//! Versioned plain-text model format: the method name plus the centroid
//! list. Floats use shortest round-trip formatting, so read-back is exact.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dialectic::Codebook64;

pub struct ModelFile {
    pub method: String,
    pub codebook: Codebook64,
}

pub fn write_model(path: &Path, method: &str, codebook: &Codebook64) -> Result<()> {
    let mut out = String::new();
    out.push_str("vqmodel 1\n");
    out.push_str(&format!("method {method}\n"));
    out.push_str(&format!("bands {}\n", codebook.dim()));
    out.push_str(&format!("classes {}\n", codebook.len()));
    for c in codebook.centroids() {
        let row: Vec<String> = c.iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("vqmodel 1") => {}
        _ => bail!("{} is not a model file (version 1)", path.display()),
    }
    let mut method = String::new();
    let mut bands = 0usize;
    let mut classes = 0usize;
    let mut centroids: Vec<Vec<f64>> = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("method ") {
            method = rest.to_string();
        } else if let Some(rest) = line.strip_prefix("bands ") {
            bands = rest.parse()?;
        } else if let Some(rest) = line.strip_prefix("classes ") {
            classes = rest.parse()?;
        } else {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().context("centroid component"))
                .collect::<Result<_>>()?;
            if row.len() != bands {
                bail!("centroid row has {} components, expected {bands}", row.len());
            }
            centroids.push(row);
        }
    }
    if centroids.len() != classes {
        bail!("model declares {classes} classes but lists {}", centroids.len());
    }
    Ok(ModelFile {
        method,
        codebook: Codebook64::new(centroids)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        let cb = Codebook64::new(vec![
            vec![0.1, 1.0 / 3.0, 0.9999999999999],
            vec![f64::MIN_POSITIVE, 0.5, 1.0],
        ])
        .unwrap();
        write_model(&path, "KO", &cb).unwrap();
        let back = read_model(&path).unwrap();
        assert_eq!(back.method, "KO");
        assert_eq!(back.codebook.centroids(), cb.centroids());
    }

    #[test]
    fn rejects_wrong_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "vqmodel 2\n").unwrap();
        assert!(read_model(&path).is_err());
    }
}
