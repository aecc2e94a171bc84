//! The experiment runner: trains every (method, noise, seed) cell, writes
//! image and model artifacts, accumulates the metrics CSV, and derives the
//! statistical similarity matrices and plot-data files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};

use dialectic::metrics::{equal_omran_weights, fidelity, validity};
use dialectic::stats::{chi2_similarity, f_test, IndexSample};
use dialectic::vq::{classify, quantize};
use dialectic::Image64;

use crate::csvio::{fmt_f64, MetricsRow, METRICS_HEADER};
use crate::mb::{ingest_bands, read_multiband, write_labels, write_multiband};
use crate::model::write_model;
use crate::phantom::{add_noise, generate_phantom};
use crate::presets::{train_method, Method};
use crate::spec::ExperimentSpec;

pub struct RunSummary {
    pub cells_total: usize,
    pub cells_failed: usize,
    pub csv_path: PathBuf,
}

/// Fidelity indices entering the similarity protocol, in table order.
const COMPARED_INDICES: [&str; 4] = ["me", "mae", "rmse", "psnr"];

fn index_value(row: &MetricsRow, index: &str) -> f64 {
    match index {
        "me" => row.me,
        "mae" => row.mae,
        "rmse" => row.rmse,
        "psnr" => row.psnr_db,
        "j_e" => row.j_e,
        "j_o" => row.j_o,
        _ => f64::NAN,
    }
}

fn noise_tag(noise: f64) -> String {
    format!("{noise}")
}

/// Runs the full grid. Cell failures are recorded and skipped; the summary
/// reports how many cells failed so the caller can choose the exit code.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<RunSummary> {
    let methods = spec.parsed_methods()?;
    fs::create_dir_all(out_dir)?;
    let images_dir = out_dir.join("images");
    let cells_dir = out_dir.join("cells");
    fs::create_dir_all(&images_dir)?;
    fs::create_dir_all(&cells_dir)?;

    // source image per (noise, seed), shared by every method
    let base_input: Option<Image64> = match &spec.input {
        None => None,
        Some(input) => Some(match (&input.bands, &input.mb) {
            (Some(bands), None) => ingest_bands(bands)?,
            (None, Some(mb)) => read_multiband(mb)?,
            _ => unreachable!("validated"),
        }),
    };
    let mut image_cache: BTreeMap<(String, u64), Image64> = BTreeMap::new();
    for &noise in &spec.noise_levels {
        for &seed in &spec.seeds {
            let key = (noise_tag(noise), seed);
            let name = format!("source_n{}_s{}", key.0, seed);
            let image = match (&spec.phantom, &base_input) {
                (Some(phantom), None) => {
                    let mut p = phantom.clone();
                    p.noise_percent = noise;
                    let (image, truth) = generate_phantom(&p, seed)?;
                    write_labels(
                        &images_dir.join(format!("{name}_truth.pgm")),
                        &truth,
                        p.clusters.len(),
                    )?;
                    image
                }
                (None, Some(base)) => add_noise(base, noise, seed)?,
                _ => unreachable!("validated"),
            };
            write_multiband(&images_dir.join(&name), &image)?;
            image_cache.insert(key, image);
        }
    }

    let mut rows: Vec<MetricsRow> = Vec::new();
    let mut failed = 0usize;
    let mut total = 0usize;
    for &method in &methods {
        let overrides = spec.overrides_for(method);
        for &noise in &spec.noise_levels {
            for &seed in &spec.seeds {
                total += 1;
                let tag = noise_tag(noise);
                let image = &image_cache[&(tag.clone(), seed)];
                let cell = cells_dir.join(format!("{}_n{}_s{}", method.name(), tag, seed));
                fs::create_dir_all(&cell)?;
                let started = Instant::now();
                match run_cell(method, image, seed, &overrides, spec, &cell) {
                    Ok(mut row) => {
                        row.noise_pct = noise;
                        row.seed = seed;
                        row.wall_ms = if spec.timing {
                            started.elapsed().as_millis() as u64
                        } else {
                            0
                        };
                        rows.push(row);
                    }
                    Err(err) => {
                        failed += 1;
                        fs::write(cell.join("error.txt"), format!("{err:#}\n"))?;
                        eprintln!("cell {} n={} s={} failed: {err:#}", method.name(), tag, seed);
                    }
                }
            }
        }
    }

    let csv_path = out_dir.join("metrics.csv");
    let mut csv = String::with_capacity(rows.len() * 128);
    csv.push_str(METRICS_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    fs::write(&csv_path, csv)?;

    write_similarity(&rows, &methods, &spec.noise_levels, &out_dir.join("similarity"))?;
    write_plot_data(&rows, &methods, &spec.noise_levels, &out_dir.join("plots"))?;

    Ok(RunSummary {
        cells_total: total,
        cells_failed: failed,
        csv_path,
    })
}

fn run_cell(
    method: Method,
    image: &Image64,
    seed: u64,
    overrides: &crate::presets::MethodOverrides,
    spec: &ExperimentSpec,
    cell: &Path,
) -> Result<MetricsRow> {
    let trained = train_method(method, image, seed, overrides)?;
    write_model(&cell.join("model.txt"), method.name(), &trained.codebook)?;

    let labels = classify(image, &trained.codebook)?;
    write_labels(&cell.join("labels.pgm"), &labels, trained.codebook.len())?;
    let reconstructed = quantize(image, &trained.codebook, &labels)?;
    write_multiband(&cell.join("quantized"), &reconstructed)?;

    if let Some(trace) = &trained.odm_trace {
        let mut out = String::from("iteration,phase,poles,f_c,f_h,evaluations\n");
        for r in &trace.iterations {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.iteration,
                r.phase,
                r.pole_count,
                fmt_f64(r.current_value),
                fmt_f64(r.historical_value),
                r.evaluations
            ));
        }
        fs::write(cell.join("trace.csv"), out)?;
    }
    if let Some(history) = &trained.odc_history {
        let mut out = String::from("phase,poles,mean_anticontradiction\n");
        for (i, rec) in history.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                i,
                rec.pole_count,
                fmt_f64(rec.mean_anticontradiction)
            ));
        }
        fs::write(cell.join("history.csv"), out)?;
    }

    let fid = fidelity(image, &reconstructed)?;
    let val = validity(
        image,
        &trained.codebook,
        &labels,
        spec.fuzziness,
        equal_omran_weights(),
        1.0,
    )?;
    Ok(MetricsRow {
        method: method.name().to_string(),
        noise_pct: 0.0,
        seed,
        me: fid.me,
        mae: fid.mae,
        mse: fid.mse,
        rmse: fid.rmse,
        nmse: fid.nmse,
        psnr_db: fid.psnr,
        snr_db: fid.snr,
        j_e: val.j_e,
        d_max: val.d_max,
        d_min: val.d_min,
        j_o: val.j_o,
        db: val.db,
        xb: val.xb,
        classes_final: trained.classes_final,
        evaluations: trained.evaluations,
        wall_ms: 0,
    })
}

/// Mean and mean absolute deviation of one fidelity index over the seeds of
/// a (method, noise) group.
fn aggregate(rows: &[&MetricsRow], index: &str) -> Option<IndexSample<f64>> {
    let values: Vec<f64> = rows.iter().map(|r| index_value(r, index)).collect();
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let md = values.iter().map(|v| (v - mean).abs()).sum::<f64>() / n;
    IndexSample::new(mean, md, values.len()).ok()
}

fn group(rows: &[MetricsRow], method: Method, noise: f64) -> Vec<&MetricsRow> {
    rows.iter()
        .filter(|r| r.method == method.name() && r.noise_pct == noise)
        .collect()
}

/// Pairwise chi-square and per-index F-test matrices, one directory per
/// noise level. Cells that cannot be computed (failed runs, zero variance,
/// infinite values) hold `nan`.
pub fn write_similarity(
    rows: &[MetricsRow],
    methods: &[Method],
    noise_levels: &[f64],
    dir: &Path,
) -> Result<()> {
    for &noise in noise_levels {
        let noise_dir = dir.join(format!("n{}", noise_tag(noise)));
        fs::create_dir_all(&noise_dir)?;

        // chi-square over the interleaved (mean, deviation) sequence of the
        // compared indices
        let samples: Vec<Option<Vec<IndexSample<f64>>>> = methods
            .iter()
            .map(|&m| {
                let g = group(rows, m, noise);
                if g.is_empty() {
                    return None;
                }
                COMPARED_INDICES
                    .iter()
                    .map(|ix| aggregate(&g, ix))
                    .collect()
            })
            .collect();
        let mut chi2 = String::from("method");
        for m in methods {
            chi2.push(',');
            chi2.push_str(m.name());
        }
        chi2.push('\n');
        for (i, mi) in methods.iter().enumerate() {
            chi2.push_str(mi.name());
            for j in 0..methods.len() {
                let cell = match (&samples[i], &samples[j]) {
                    (Some(o), Some(e)) => chi2_similarity(o, e)
                        .map(|r| r.p_value)
                        .unwrap_or(f64::NAN),
                    _ => f64::NAN,
                };
                chi2.push(',');
                chi2.push_str(&fmt_f64(cell));
            }
            chi2.push('\n');
        }
        fs::write(noise_dir.join("chi2.csv"), chi2)?;

        for index in COMPARED_INDICES {
            let per_method: Vec<Option<IndexSample<f64>>> = methods
                .iter()
                .map(|&m| {
                    let g = group(rows, m, noise);
                    if g.is_empty() {
                        None
                    } else {
                        aggregate(&g, index)
                    }
                })
                .collect();
            let mut out = String::from("method");
            for m in methods {
                out.push(',');
                out.push_str(m.name());
            }
            out.push('\n');
            for (i, mi) in methods.iter().enumerate() {
                out.push_str(mi.name());
                for j in 0..methods.len() {
                    let cell = match (&per_method[i], &per_method[j]) {
                        (Some(a), Some(b)) => {
                            f_test(a, b).map(|r| r.p_value).unwrap_or(f64::NAN)
                        }
                        _ => f64::NAN,
                    };
                    out.push(',');
                    out.push_str(&fmt_f64(cell));
                }
                out.push('\n');
            }
            fs::write(noise_dir.join(format!("ftest_{index}.csv")), out)?;
        }
    }
    Ok(())
}

/// Whitespace-separated value-vs-noise files, one per index: a noise column
/// followed by (mean, deviation) pairs per method.
pub fn write_plot_data(
    rows: &[MetricsRow],
    methods: &[Method],
    noise_levels: &[f64],
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    for index in ["me", "mae", "rmse", "psnr", "j_e", "j_o"] {
        let mut out = String::from("# noise");
        for m in methods {
            out.push_str(&format!(" {0}_mean {0}_dev", m.name()));
        }
        out.push('\n');
        for &noise in noise_levels {
            out.push_str(&noise_tag(noise));
            for &m in methods {
                let g = group(rows, m, noise);
                match aggregate(&g, index) {
                    Some(s) => {
                        out.push_str(&format!(" {} {}", fmt_f64(s.mean), fmt_f64(s.mean_deviation)))
                    }
                    None => out.push_str(" nan nan"),
                }
            }
            out.push('\n');
        }
        fs::write(dir.join(format!("{index}.dat")), out)
            .with_context(|| format!("writing plot data for {index}"))?;
    }
    Ok(())
}
