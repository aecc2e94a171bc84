//! Command-line front end: phantom generation, training, classification,
//! quantization, metric reports, statistical comparison and full
//! experiment runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dialectic::metrics::{equal_omran_weights, fidelity, validity};
use dialectic::vq::{classify, quantize};

use dialectic_cli::csvio::{fmt_f64, MetricsRow, METRICS_HEADER};
use dialectic_cli::experiment::{run_experiment, write_plot_data, write_similarity};
use dialectic_cli::mb::{ingest_bands, load_image, read_labels, write_labels, write_multiband};
use dialectic_cli::model::{read_model, write_model};
use dialectic_cli::phantom::{generate_phantom, PhantomSpec};
use dialectic_cli::presets::{train_method, Method, MethodOverrides};
use dialectic_cli::spec::ExperimentSpec;

/// Dialectical optimization and vector-quantization toolkit.
#[derive(Parser)]
#[command(name = "dialectic", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ImageArg {
    /// Input image: a .mb composition, a single .pgm band, or several
    /// bands given as repeated --band flags.
    #[arg(long, conflicts_with = "band")]
    image: Option<PathBuf>,
    /// Per-band grayscale raster (repeat per band, stacked in order).
    #[arg(long)]
    band: Vec<PathBuf>,
}

impl ImageArg {
    fn load(&self) -> Result<dialectic::Image64> {
        match (&self.image, self.band.is_empty()) {
            (Some(path), true) => load_image(path),
            (None, false) => ingest_bands(&self.band),
            _ => bail!("give exactly one of --image or --band..."),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic phantom image with ground-truth labels.
    Phantom {
        /// Phantom description (TOML).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the spec's noise percent.
        #[arg(long)]
        noise: Option<f64>,
        /// Output base path (writes <out>.mb, band PGMs and <out>_truth.pgm).
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a quantizer preset on an image and save the model.
    Train {
        #[command(flatten)]
        image: ImageArg,
        /// Method preset: KO, CM, KM, XM, ODC-CAN, ODC-PME, EQ-CAN-KM,
        /// IC-CAN-KM, EQ-PME-KM, IC-PME-KM.
        #[arg(long)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parameter override, key=value (repeatable).
        #[arg(long = "set")]
        set: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Optional optimizer trace CSV (dialectical methods).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Label every pixel with its nearest model centroid.
    Classify {
        #[command(flatten)]
        image: ImageArg,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct an image by substituting class centroids.
    Quantize {
        #[command(flatten)]
        image: ImageArg,
        #[arg(long)]
        model: PathBuf,
        /// Reuse an existing label map instead of classifying.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Output base path (writes <out>.mb plus band PGMs).
        #[arg(long)]
        out: PathBuf,
    },
    /// Fidelity and validity metrics for a quantization result.
    Metrics {
        /// Original image (.mb or .pgm).
        #[arg(long)]
        original: PathBuf,
        /// Reconstructed image; computed from --model when omitted.
        #[arg(long)]
        reconstructed: Option<PathBuf>,
        /// Model file; enables the validity indices.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Intensity scale for reporting (1 = normalized, 255 = 8-bit).
        #[arg(long, default_value_t = 1.0)]
        lmax: f64,
        /// Fuzziness for the XB index.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Append the CSV row here instead of printing only.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Pairwise F-test and chi-square similarity matrices from a metrics CSV.
    Compare {
        /// metrics.csv produced by `run` or `metrics`.
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a full experiment specification.
    Run {
        /// Experiment spec (TOML).
        #[arg(long)]
        spec: PathBuf,
        /// Output directory (overrides the spec and DIALECTIC_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_out_dir(flag: Option<PathBuf>, spec_out: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("DIALECTIC_OUT_DIR").map(PathBuf::from))
        .or(spec_out)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Phantom { spec, seed, noise, out } => {
            let text = fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let mut phantom: PhantomSpec = toml::from_str(&text)?;
            if let Some(n) = noise {
                phantom.noise_percent = n;
            }
            let (image, truth) = generate_phantom(&phantom, seed)?;
            write_multiband(&out, &image)?;
            let truth_path = truth_sibling(&out);
            write_labels(&truth_path, &truth, phantom.clusters.len())?;
            println!(
                "phantom {}x{}x{} noise {}% -> {}.mb",
                phantom.height,
                phantom.width,
                phantom.bands,
                phantom.noise_percent,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Train { image, method, seed, set, out, trace } => {
            let img = image.load()?;
            let mut overrides = MethodOverrides::default();
            for pair in &set {
                overrides.set(pair)?;
            }
            let trained = train_method(method, &img, seed, &overrides)?;
            write_model(&out, method.name(), &trained.codebook)?;
            if let Some(trace_path) = trace {
                match &trained.odm_trace {
                    Some(t) => {
                        let mut csv = String::from("iteration,phase,poles,f_c,f_h,evaluations\n");
                        for r in &t.iterations {
                            csv.push_str(&format!(
                                "{},{},{},{},{},{}\n",
                                r.iteration,
                                r.phase,
                                r.pole_count,
                                fmt_f64(r.current_value),
                                fmt_f64(r.historical_value),
                                r.evaluations
                            ));
                        }
                        fs::write(trace_path, csv)?;
                    }
                    None => eprintln!("note: {} produces no optimizer trace", method.name()),
                }
            }
            println!(
                "trained {} -> {} classes, {} pass-equivalents",
                method.name(),
                trained.classes_final,
                trained.evaluations
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { image, model, out } => {
            let img = image.load()?;
            let m = read_model(&model)?;
            let labels = classify(&img, &m.codebook)?;
            write_labels(&out, &labels, m.codebook.len())?;
            println!("labeled {} pixels into {} classes", img.pixel_count(), m.codebook.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Quantize { image, model, labels, out } => {
            let img = image.load()?;
            let m = read_model(&model)?;
            let label_map = match labels {
                Some(path) => read_labels(&path)?,
                None => classify(&img, &m.codebook)?,
            };
            let reconstructed = quantize(&img, &m.codebook, &label_map)?;
            write_multiband(&out, &reconstructed)?;
            println!("quantized -> {}.mb", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Metrics { original, reconstructed, model, lmax, q, csv } => {
            let img = load_image(&original)?;
            let model_file = model.map(|p| read_model(&p)).transpose()?;
            let recon = match (&reconstructed, &model_file) {
                (Some(path), _) => load_image(path)?,
                (None, Some(m)) => {
                    let labels = classify(&img, &m.codebook)?;
                    quantize(&img, &m.codebook, &labels)?
                }
                (None, None) => bail!("need --reconstructed or --model"),
            };
            let fid = fidelity(&img, &recon)?.scaled(lmax);
            let (val, classes) = match &model_file {
                Some(m) => {
                    let labels = classify(&img, &m.codebook)?;
                    (
                        Some(validity(&img, &m.codebook, &labels, q, equal_omran_weights(), 1.0)?),
                        m.codebook.len(),
                    )
                }
                None => (None, 0),
            };
            let row = MetricsRow {
                method: model_file.as_ref().map_or("-".into(), |m| m.method.clone()),
                noise_pct: 0.0,
                seed: 0,
                me: fid.me,
                mae: fid.mae,
                mse: fid.mse,
                rmse: fid.rmse,
                nmse: fid.nmse,
                psnr_db: fid.psnr,
                snr_db: fid.snr,
                j_e: val.as_ref().map_or(f64::NAN, |v| v.j_e),
                d_max: val.as_ref().map_or(f64::NAN, |v| v.d_max),
                d_min: val.as_ref().map_or(f64::NAN, |v| v.d_min),
                j_o: val.as_ref().map_or(f64::NAN, |v| v.j_o),
                db: val.as_ref().map_or(f64::NAN, |v| v.db),
                xb: val.as_ref().map_or(f64::NAN, |v| v.xb),
                classes_final: classes,
                evaluations: 0,
                wall_ms: 0,
            };
            println!("{METRICS_HEADER}");
            println!("{}", row.to_csv());
            if let Some(path) = csv {
                let mut text = if path.exists() {
                    fs::read_to_string(&path)?
                } else {
                    format!("{METRICS_HEADER}\n")
                };
                text.push_str(&row.to_csv());
                text.push('\n');
                fs::write(path, text)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { metrics, out } => {
            let text = fs::read_to_string(&metrics)
                .with_context(|| format!("reading {}", metrics.display()))?;
            let rows: Vec<MetricsRow> = text
                .lines()
                .skip(1)
                .filter_map(MetricsRow::parse)
                .collect();
            if rows.is_empty() {
                bail!("no metric rows in {}", metrics.display());
            }
            let mut methods: Vec<Method> = Vec::new();
            for row in &rows {
                let m: Method = row.method.parse()?;
                if !methods.contains(&m) {
                    methods.push(m);
                }
            }
            let mut noise_levels: Vec<f64> = Vec::new();
            for row in &rows {
                if !noise_levels.contains(&row.noise_pct) {
                    noise_levels.push(row.noise_pct);
                }
            }
            let out_dir = default_out_dir(out, None);
            write_similarity(&rows, &methods, &noise_levels, &out_dir.join("similarity"))?;
            write_plot_data(&rows, &methods, &noise_levels, &out_dir.join("plots"))?;
            println!(
                "compared {} methods across {} noise levels -> {}",
                methods.len(),
                noise_levels.len(),
                out_dir.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { spec, out } => {
            let text = fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let parsed = ExperimentSpec::from_toml(&text)?;
            let out_dir = default_out_dir(out, parsed.outputs.clone());
            let summary = run_experiment(&parsed, &out_dir)?;
            println!(
                "{} cells run, {} failed -> {}",
                summary.cells_total,
                summary.cells_failed,
                summary.csv_path.display()
            );
            if summary.cells_failed > 0 {
                Ok(ExitCode::from(2))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn truth_sibling(out: &Path) -> PathBuf {
    let stem = out.file_name().and_then(|s| s.to_str()).unwrap_or("phantom");
    out.with_file_name(format!("{stem}_truth.pgm"))
}
