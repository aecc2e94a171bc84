use dialectic::clustering::{som_train, TrainConfig};
use dialectic::metrics::fidelity;
use dialectic::odc::{odc_train, OdcConfig};
use dialectic::odm::MembershipKind;
use dialectic::stats::{chi2_similarity, IndexSample};
use dialectic::vq::{classify, quantize};
use dialectic_cli::phantom::{equal_cluster_spec, generate_phantom};

fn main() {
    // eight clusters along a smooth path through the cube: intensity
    // continuum like real multiband data
    let means: Vec<Vec<f64>> = (0..8)
        .map(|i| {
            let t = i as f64 / 7.0;
            vec![
                0.15 + 0.7 * t,
                0.2 + 0.6 * t * t,
                0.8 - 0.6 * t + 0.2 * t * t,
            ]
        })
        .collect();
    let spec = equal_cluster_spec(48, 48, &means, 0.02, 0.0);
    let mut per: Vec<Vec<[f64; 4]>> = vec![Vec::new(), Vec::new()];
    for seed in 0..5u64 {
        let (image, _) = generate_phantom(&spec, 100 + seed).unwrap();
        let mut ko_cfg = TrainConfig::new(13, seed);
        ko_cfg.max_iterations = 100;
        let ko = som_train(&image, &ko_cfg).unwrap();
        let mut odc_cfg = OdcConfig::new(14, MembershipKind::MaxEntropy, seed);
        odc_cfg.historical_phases = 2;
        odc_cfg.phase_length = 40;
        odc_cfg.min_contradiction = 0.01;
        odc_cfg.min_force = 0.02;
        odc_cfg.max_crisis = 0.02;
        odc_cfg.max_poles = 14;
        let model = odc_train(&image, &odc_cfg).unwrap();
        println!("seed {seed}: odc poles {}", model.codebook.len());
        for (slot, cb) in [(0, &ko), (1, &model.codebook)] {
            let labels = classify(&image, cb).unwrap();
            let rec = quantize(&image, cb, &labels).unwrap();
            let f = fidelity(&image, &rec).unwrap();
            per[slot].push([f.me, f.mae, f.rmse, f.psnr]);
        }
    }
    let agg = |rows: &[[f64; 4]]| -> Vec<IndexSample<f64>> {
        (0..4).map(|i| {
            let v: Vec<f64> = rows.iter().map(|r| r[i]).collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let d = v.iter().map(|x| (x - m).abs()).sum::<f64>() / v.len() as f64;
            IndexSample::new(m, d, v.len()).unwrap()
        }).collect()
    };
    let (ko, odc) = (agg(&per[0]), agg(&per[1]));
    println!("KO : {:?}", ko.iter().map(|s| (s.mean, s.mean_deviation)).collect::<Vec<_>>());
    println!("ODC: {:?}", odc.iter().map(|s| (s.mean, s.mean_deviation)).collect::<Vec<_>>());
    let sim = chi2_similarity(&odc, &ko).unwrap();
    println!("chi2 {} p {}", sim.statistic, sim.p_value);
}
