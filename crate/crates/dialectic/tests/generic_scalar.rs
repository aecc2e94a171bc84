//! The numeric core is generic over the scalar; exercise the f32
//! instantiations end to end alongside the default f64 aliases.

use dialectic::odm::{optimize, Direction, MembershipKind};
use dialectic::{classify, quantize, Codebook32, Image32, OdmConfig32, SearchBox32};

#[test]
fn sphere_optimization_in_f32() {
    let domain = SearchBox32::new(vec![-5.0f32, -5.0], vec![5.0, 5.0]).unwrap();
    let config = OdmConfig32::new(Direction::Minimize, MembershipKind::MaxEntropy, 12);
    let outcome = optimize(
        |w: &[f32]| w.iter().map(|&x| x * x).sum(),
        &domain,
        &config,
    )
    .unwrap();
    assert!(outcome.best_value < 1e-2, "got {}", outcome.best_value);
    let mut prev = f32::INFINITY;
    for rec in &outcome.trace.iterations {
        assert!(rec.historical_value <= prev);
        prev = rec.historical_value;
    }
}

#[test]
fn classify_and_quantize_in_f32() {
    let img = Image32::new(1, 4, 2, vec![0.1, 0.1, 0.2, 0.2, 0.8, 0.8, 0.9, 0.9]).unwrap();
    let cb = Codebook32::new(vec![vec![0.15, 0.15], vec![0.85, 0.85]]).unwrap();
    let labels = classify(&img, &cb).unwrap();
    assert_eq!(labels.labels(), &[0, 0, 1, 1]);
    let out = quantize(&img, &cb, &labels).unwrap();
    let again = classify(&out, &cb).unwrap();
    assert_eq!(again.labels(), labels.labels());
}

#[test]
fn memberships_normalize_at_f32_precision() {
    use dialectic::odm::{canonical_weights, max_entropy_weights};
    let objectives: Vec<f32> = (0..15).map(|i| (i as f32) * 0.37 - 2.0).collect();
    for mu in [
        canonical_weights(&objectives, 1.85),
        max_entropy_weights(&objectives, 1.85, 1.0 / 15.0),
    ] {
        let sum: f32 = mu.iter().sum();
        assert!((sum - 1.0).abs() < 1e-5);
    }
}
