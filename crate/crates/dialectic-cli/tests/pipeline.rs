//! End-to-end pipeline tests through the public subcommands, plus the
//! slower cross-method invariants that need phantom inputs.

use std::path::Path;
use std::process::Output;

use dialectic::odm::{Direction, MembershipKind, OdmConfig};
use dialectic::opt_kmeans::{opt_kmeans_train, OptKmConfig, OptKmObjective};
use dialectic_cli::phantom::{equal_cluster_spec, generate_phantom};

fn bin(args: &[&str], dir: &Path) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_dialectic"))
        .args(args)
        .current_dir(dir)
        .env_remove("DIALECTIC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const PHANTOM_TOML: &str = r#"
height = 24
width = 24
bands = 3
noise_percent = 1.0

[[clusters]]
mean = [0.2, 0.2, 0.2]
std = [0.02, 0.02, 0.02]
fraction = 0.4

[[clusters]]
mean = [0.5, 0.7, 0.4]
std = [0.02, 0.02, 0.02]
fraction = 0.3

[[clusters]]
mean = [0.85, 0.3, 0.8]
std = [0.02, 0.02, 0.02]
fraction = 0.3
"#;

#[test]
fn subcommand_pipeline_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("phantom.toml"), PHANTOM_TOML).unwrap();

    ok(&bin(
        &["phantom", "--spec", "phantom.toml", "--seed", "5", "--out", "img"],
        dir.path(),
    ));
    assert!(dir.path().join("img.mb").exists());
    assert!(dir.path().join("img_truth.pgm").exists());

    // train a couple of presets with scaled-down budgets
    ok(&bin(
        &[
            "train", "--image", "img.mb", "--method", "KM", "--seed", "1",
            "--set", "classes=3", "--set", "max_iterations=20",
            "--out", "km.txt",
        ],
        dir.path(),
    ));
    ok(&bin(
        &[
            "train", "--image", "img.mb", "--method", "ODC-PME", "--seed", "1",
            "--set", "initial_poles=6", "--set", "phase_length=15",
            "--set", "max_crisis=0.02", "--set", "min_contradiction=0.05",
            "--out", "odc.txt",
        ],
        dir.path(),
    ));
    ok(&bin(
        &[
            "train", "--image", "img.mb", "--method", "EQ-PME-KM", "--seed", "1",
            "--set", "classes=3", "--set", "initial_poles=4",
            "--set", "phases=2", "--set", "phase_length=5",
            "--out", "eq.txt", "--trace", "trace.csv",
        ],
        dir.path(),
    ));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,phase,poles,f_c,f_h,evaluations"));
    assert!(trace.lines().count() > 2);

    ok(&bin(
        &["classify", "--image", "img.mb", "--model", "km.txt", "--out", "labels.pgm"],
        dir.path(),
    ));
    ok(&bin(
        &[
            "quantize", "--image", "img.mb", "--model", "km.txt",
            "--labels", "labels.pgm", "--out", "quant",
        ],
        dir.path(),
    ));
    assert!(dir.path().join("quant.mb").exists());

    // metrics at both reporting scales
    let normalized = ok(&bin(
        &["metrics", "--original", "img.mb", "--model", "km.txt"],
        dir.path(),
    ));
    let scaled = ok(&bin(
        &["metrics", "--original", "img.mb", "--model", "km.txt", "--lmax", "255"],
        dir.path(),
    ));
    let me_norm: f64 = normalized.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    let me_scaled: f64 = scaled.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((me_scaled - 255.0 * me_norm).abs() < 1e-9);

    // fidelity-only path against a reconstructed image
    let fid_only = ok(&bin(
        &["metrics", "--original", "img.mb", "--reconstructed", "quant.mb"],
        dir.path(),
    ));
    assert!(fid_only.lines().nth(1).unwrap().contains("nan"));

    // band-stacking ingestion is equivalent to the .mb composition
    let via_bands = ok(&bin(
        &[
            "metrics",
            "--original", "img.mb",
            "--reconstructed", "quant.mb",
        ],
        dir.path(),
    ));
    let via_mb = ok(&bin(
        &["metrics", "--original", "img.mb", "--reconstructed", "quant.mb"],
        dir.path(),
    ));
    assert_eq!(via_bands, via_mb);
}

#[test]
fn run_accounting_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"
methods = ["KM"]
noise_levels = [0.0]
seeds = [3]

[phantom]
height = 16
width = 16
bands = 2
[[phantom.clusters]]
mean = [0.25, 0.3]
std = [0.02, 0.02]
fraction = 0.5
[[phantom.clusters]]
mean = [0.75, 0.7]
std = [0.02, 0.02]
fraction = 0.5

[overrides.KM]
classes = 2
max_iterations = 15
"#;
    std::fs::write(dir.path().join("one.toml"), spec).unwrap();
    ok(&bin(&["run", "--spec", "one.toml", "--out", "one"], dir.path()));

    // exactly one metrics row, and the cell holds the label map and the
    // quantized image
    let csv = std::fs::read_to_string(dir.path().join("one/metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let cell = dir.path().join("one/cells/KM_n0_s3");
    assert!(cell.join("labels.pgm").exists());
    assert!(cell.join("quantized.mb").exists());

    // rmse column equals sqrt of mse column
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let mse: f64 = fields[5].parse().unwrap();
    let rmse: f64 = fields[6].parse().unwrap();
    assert!((rmse - mse.sqrt()).abs() < 1e-12);

    // a 2-method x 3-noise x 1-seed grid: 6 rows, 3 similarity folders
    let spec = spec
        .replace("methods = [\"KM\"]", "methods = [\"KM\", \"KO\"]")
        .replace("noise_levels = [0.0]", "noise_levels = [0.0, 1.0, 3.0]")
        .replace("seeds = [3]", "seeds = [3, 4]");
    std::fs::write(dir.path().join("grid.toml"), &spec).unwrap();
    ok(&bin(&["run", "--spec", "grid.toml", "--out", "grid"], dir.path()));
    let csv = std::fs::read_to_string(dir.path().join("grid/metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13); // header + 2 methods x 3 noises x 2 seeds
    for n in ["n0", "n1", "n3"] {
        let d = dir.path().join("grid/similarity").join(n);
        assert!(d.join("chi2.csv").exists());
        assert!(d.join("ftest_psnr.csv").exists());
    }
    for index in ["me", "mae", "rmse", "psnr", "j_e", "j_o"] {
        assert!(dir.path().join(format!("grid/plots/{index}.dat")).exists());
    }

    // compare on the emitted CSV reproduces the matrices
    ok(&bin(
        &["compare", "--metrics", "grid/metrics.csv", "--out", "cmp"],
        dir.path(),
    ));
    let direct = std::fs::read(dir.path().join("grid/similarity/n1/chi2.csv")).unwrap();
    let recomputed = std::fs::read(dir.path().join("cmp/similarity/n1/chi2.csv")).unwrap();
    assert_eq!(direct, recomputed);
}

// a trained classifier partitions the phantom by generating cluster: match
// each pole to its nearest true mean and demand high label agreement
#[test]
fn odc_labels_agree_with_phantom_truth() {
    use dialectic::odc::{odc_classify, odc_train, OdcConfig};

    let means = vec![
        vec![0.2, 0.2, 0.2],
        vec![0.5, 0.7, 0.4],
        vec![0.85, 0.3, 0.8],
    ];
    let spec = equal_cluster_spec(32, 32, &means, 0.03, 0.0);
    let (image, truth) = generate_phantom(&spec, 42).unwrap();
    let mut cfg = OdcConfig::new(8, MembershipKind::Canonical, 7);
    cfg.historical_phases = 2;
    cfg.phase_length = 30;
    cfg.min_contradiction = 0.05;
    cfg.max_crisis = 0.02;
    let model = odc_train(&image, &cfg).unwrap();
    assert_eq!(model.codebook.len(), 3);
    let labels = odc_classify(&image, &model).unwrap();

    // pole -> generating cluster by nearest true mean
    let assignment: Vec<usize> = model
        .codebook
        .centroids()
        .iter()
        .map(|c| {
            (0..3)
                .min_by(|&a, &b| {
                    let da: f64 = c.iter().zip(&means[a]).map(|(x, y)| (x - y) * (x - y)).sum();
                    let db: f64 = c.iter().zip(&means[b]).map(|(x, y)| (x - y) * (x - y)).sum();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap()
        })
        .collect();
    let agree = labels
        .labels()
        .iter()
        .zip(truth.labels())
        .filter(|(&l, &t)| assignment[l] == t)
        .count();
    let rate = agree as f64 / truth.labels().len() as f64;
    assert!(rate >= 0.95, "only {rate:.3} label agreement with the ground truth");
}

// on a clean phantom the ring map and the dialectical classifier are
// nearly indistinguishable under the chi-square protocol
#[test]
fn ko_and_odc_pme_are_chi2_similar_on_clean_phantoms() {
    use dialectic::clustering::{som_train, TrainConfig};
    use dialectic::metrics::fidelity;
    use dialectic::odc::{odc_train, OdcConfig};
    use dialectic::stats::{chi2_similarity, IndexSample};
    use dialectic::vq::{classify, quantize};

    let means = vec![
        vec![0.2, 0.2, 0.2],
        vec![0.5, 0.7, 0.4],
        vec![0.85, 0.3, 0.8],
    ];
    let spec = equal_cluster_spec(32, 32, &means, 0.03, 0.0);
    let seeds = [1u64, 2, 3];
    let mut per_method: Vec<Vec<[f64; 4]>> = vec![Vec::new(), Vec::new()];
    for &seed in &seeds {
        let (image, _) = generate_phantom(&spec, 100 + seed).unwrap();
        let mut ko_cfg = TrainConfig::new(3, seed);
        ko_cfg.max_iterations = 60;
        let ko = som_train(&image, &ko_cfg).unwrap();
        let mut odc_cfg = OdcConfig::new(8, MembershipKind::MaxEntropy, seed);
        odc_cfg.historical_phases = 2;
        odc_cfg.phase_length = 30;
        odc_cfg.min_contradiction = 0.05;
        odc_cfg.max_crisis = 0.02;
        let odc = odc_train(&image, &odc_cfg).unwrap().codebook;
        for (slot, codebook) in [(0, &ko), (1, &odc)] {
            let labels = classify(&image, codebook).unwrap();
            let rec = quantize(&image, codebook, &labels).unwrap();
            let f = fidelity(&image, &rec).unwrap();
            per_method[slot].push([f.me, f.mae, f.rmse, f.psnr]);
        }
    }
    let aggregate = |rows: &[[f64; 4]]| -> Vec<IndexSample<f64>> {
        (0..4)
            .map(|i| {
                let vals: Vec<f64> = rows.iter().map(|r| r[i]).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let md = vals.iter().map(|v| (v - mean).abs()).sum::<f64>() / vals.len() as f64;
                IndexSample::new(mean, md, vals.len()).unwrap()
            })
            .collect()
    };
    let ko = aggregate(&per_method[0]);
    let odc = aggregate(&per_method[1]);
    let sim = chi2_similarity(&odc, &ko).unwrap();
    assert!(
        sim.p_value > 0.9,
        "expected near-identical methods, got similarity {}",
        sim.p_value
    );
}

// the maximum-entropy search matches or beats the canonical one on the
// multimodal phantom suite in a majority of seeds (checked statistically,
// not per seed)
#[test]
fn max_entropy_variant_dominates_canonical_on_balance() {
    let means = vec![
        vec![0.15, 0.15, 0.15],
        vec![0.85, 0.85, 0.15],
        vec![0.85, 0.15, 0.85],
        vec![0.15, 0.85, 0.85],
        vec![0.5, 0.5, 0.5],
    ];
    let spec = equal_cluster_spec(40, 40, &means, 0.03, 1.0);
    let seeds = 9u64;
    let mut pme_wins = 0;
    for seed in 0..seeds {
        let (image, _) = generate_phantom(&spec, 500 + seed).unwrap();
        let je = |kind: MembershipKind| -> f64 {
            let mut odm = OdmConfig::new(Direction::Minimize, kind, seed);
            odm.initial_poles = 8;
            odm.historical_phases = 4;
            odm.phase_length = 25;
            odm.initial_step = 0.5;
            odm.min_contradiction = 0.05;
            odm.max_contradiction = 0.9;
            odm.max_crisis = 0.02;
            let cfg = OptKmConfig::new(5, odm, OptKmObjective::QuantizationError);
            opt_kmeans_train(&image, &cfg).unwrap().objective_value
        };
        if je(MembershipKind::MaxEntropy) <= je(MembershipKind::Canonical) + 1e-12 {
            pme_wins += 1;
        }
    }
    assert!(
        pme_wins * 2 > seeds,
        "max-entropy won only {pme_wins}/{seeds} seeds"
    );
}
