//! Pixel-wise fidelity indices between an image and its reconstruction, and
//! cluster-validity indices over (image, codebook, labels) triples.
//!
//! The per-pixel "difference" is always the Euclidean norm of the band-vector
//! difference; accumulation runs in row-major pixel order so results are
//! bit-reproducible.

use crate::error::{Error, Result};
use crate::image::{LabelMap, MultibandImage};
use crate::real::{distance, distance_sq, Real};
use crate::vq::Codebook;

/// Pixel-wise fidelity statistics; `psnr`/`snr` are in dB and become
/// `+inf` at zero distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport<T> {
    pub me: T,
    pub mae: T,
    pub mse: T,
    pub rmse: T,
    pub nmse: T,
    pub psnr: T,
    pub snr: T,
}

impl<T: Real> FidelityReport<T> {
    /// Rescales the report from the normalized `[0,1]` domain to an
    /// integer intensity scale with maximum `l_max` (e.g. 255).
    /// `nmse`, `psnr` and `snr` are scale-invariant.
    pub fn scaled(&self, l_max: T) -> Self {
        Self {
            me: self.me * l_max,
            mae: self.mae * l_max,
            mse: self.mse * l_max * l_max,
            rmse: self.rmse * l_max,
            nmse: self.nmse,
            psnr: self.psnr,
            snr: self.snr,
        }
    }
}

/// Computes all seven fidelity indices between `original` and `reconstructed`,
/// with `L_max = 1` (normalized images).
pub fn fidelity<T: Real>(
    original: &MultibandImage<T>,
    reconstructed: &MultibandImage<T>,
) -> Result<FidelityReport<T>> {
    if original.height() != reconstructed.height()
        || original.width() != reconstructed.width()
        || original.bands() != reconstructed.bands()
    {
        return Err(Error::DimensionMismatch(
            "fidelity requires images of identical dimensions".into(),
        ));
    }
    let n = T::from_count(original.pixel_count());
    let mut me = T::zero();
    let mut sum_norm = T::zero();
    let mut sum_sq = T::zero();
    let mut signal_sq = T::zero();
    for (a, b) in original.pixels().zip(reconstructed.pixels()) {
        let d2 = distance_sq(a, b);
        let d = d2.sqrt();
        if d > me {
            me = d;
        }
        sum_norm = sum_norm + d;
        sum_sq = sum_sq + d2;
        signal_sq = signal_sq + a.iter().map(|&v| v * v).sum();
    }
    let mae = sum_norm / n;
    let mse = sum_sq / n;
    let rmse = mse.sqrt();
    let nmse = if signal_sq > T::zero() {
        sum_sq / signal_sq
    } else if sum_sq == T::zero() {
        T::zero()
    } else {
        return Err(Error::ZeroSignal);
    };
    let twenty = T::from_f64(20.0).unwrap();
    let ten = T::from_f64(10.0).unwrap();
    let psnr = if rmse > T::zero() {
        twenty * (T::one() / rmse).log10()
    } else {
        T::infinity()
    };
    let snr = if nmse > T::zero() {
        ten * (T::one() / nmse).log10()
    } else {
        T::infinity()
    };
    Ok(FidelityReport {
        me,
        mae,
        mse,
        rmse,
        nmse,
        psnr,
        snr,
    })
}

/// Cluster-validity statistics for one (image, codebook, labels) triple.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport<T> {
    pub j_e: T,
    pub d_max: T,
    pub d_min: T,
    pub j_o: T,
    pub db: T,
    pub xb: T,
    pub per_cluster_scatter: Vec<T>,
}

fn check_labels<T: Real>(
    image: &MultibandImage<T>,
    codebook: &Codebook<T>,
    labels: &LabelMap,
) -> Result<()> {
    if codebook.dim() != image.bands() {
        return Err(Error::DimensionMismatch(
            "codebook dimension != image band count".into(),
        ));
    }
    if labels.labels().len() != image.pixel_count() {
        return Err(Error::DimensionMismatch(
            "label map size differs from the image".into(),
        ));
    }
    if labels.max_label() >= codebook.len() {
        return Err(Error::DimensionMismatch(
            "label map references a class beyond the codebook".into(),
        ));
    }
    Ok(())
}

/// Per-cluster mean pixel-to-centroid distances `S_j` and their mean `J_e`.
///
/// Empty clusters contribute `S_j = 0` but still count in the `1/n_G`
/// normalization.
pub fn quantization_error<T: Real>(
    image: &MultibandImage<T>,
    codebook: &Codebook<T>,
    labels: &LabelMap,
) -> Result<(T, Vec<T>)> {
    check_labels(image, codebook, labels)?;
    let n_g = codebook.len();
    let mut sums = vec![T::zero(); n_g];
    let mut counts = vec![0usize; n_g];
    for (u, px) in image.pixels().enumerate() {
        let k = labels.label(u);
        sums[k] = sums[k] + distance(px, codebook.centroid(k));
        counts[k] += 1;
    }
    let scatter: Vec<T> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / T::from_count(c) } else { T::zero() })
        .collect();
    let j_e = scatter.iter().copied().sum::<T>() / T::from_count(n_g);
    Ok((j_e, scatter))
}

/// Maximum intra-cluster scatter and minimum inter-centroid distance.
pub fn separation_cohesion<T: Real>(
    image: &MultibandImage<T>,
    codebook: &Codebook<T>,
    labels: &LabelMap,
) -> Result<(T, T)> {
    if codebook.len() < 2 {
        return Err(Error::DegenerateMetric(
            "d_min needs at least two centroids",
        ));
    }
    let (_, scatter) = quantization_error(image, codebook, labels)?;
    let d_max = scatter
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    Ok((d_max, min_centroid_distance(codebook)))
}

fn min_centroid_distance<T: Real>(codebook: &Codebook<T>) -> T {
    let mut d_min = T::infinity();
    for i in 0..codebook.len() {
        for j in i + 1..codebook.len() {
            let d = distance(codebook.centroid(i), codebook.centroid(j));
            if d < d_min {
                d_min = d;
            }
        }
    }
    d_min
}

/// Omran combined index `J_o = w1 d_max + w2 (L_max - d_min) + w3 J_e`.
pub fn omran_index<T: Real>(
    image: &MultibandImage<T>,
    codebook: &Codebook<T>,
    labels: &LabelMap,
    weights: [T; 3],
    l_max: T,
) -> Result<T> {
    if weights.iter().any(|&w| w < T::zero()) {
        return Err(Error::InvalidConfig(
            "omran weights must be nonnegative".into(),
        ));
    }
    let (j_e, _) = quantization_error(image, codebook, labels)?;
    let (d_max, d_min) = separation_cohesion(image, codebook, labels)?;
    Ok(weights[0] * d_max + weights[1] * (l_max - d_min) + weights[2] * j_e)
}

/// Equal Omran weights `(1/3, 1/3, 1/3)`.
pub fn equal_omran_weights<T: Real>() -> [T; 3] {
    let third = T::one() / T::from_f64(3.0).unwrap();
    [third, third, third]
}

/// Davies-Bouldin index.
pub fn db_index<T: Real>(
    image: &MultibandImage<T>,
    codebook: &Codebook<T>,
    labels: &LabelMap,
) -> Result<T> {
    if codebook.len() < 2 {
        return Err(Error::DegenerateMetric("DB needs at least two clusters"));
    }
    let (_, scatter) = quantization_error(image, codebook, labels)?;
    let n_g = codebook.len();
    let mut acc = T::zero();
    for i in 0..n_g {
        let mut worst = T::neg_infinity();
        for j in 0..n_g {
            if i == j {
                continue;
            }
            let sep = distance(codebook.centroid(i), codebook.centroid(j));
            if sep == T::zero() {
                return Err(Error::DegenerateMetric("degenerate DB: coincident centroids"));
            }
            let ratio = (scatter[i] + scatter[j]) / sep;
            if ratio > worst {
                worst = ratio;
            }
        }
        acc = acc + worst;
    }
    Ok(acc / T::from_count(n_g))
}

/// Fuzzy memberships of one sample against a centroid list, with the
/// inverse-distance form of exponent `2/(1-q)` applied to Euclidean norms.
/// A sample sitting exactly on centroids shares membership equally among
/// those centroids and gives all others zero.
pub fn fcm_memberships<T: Real>(x: &[T], centroids: &[Vec<T>], q: T, out: &mut [T]) {
    debug_assert_eq!(out.len(), centroids.len());
    let mut zero_hits = 0usize;
    for (m, c) in out.iter_mut().zip(centroids) {
        *m = distance(x, c);
        if *m == T::zero() {
            zero_hits += 1;
        }
    }
    if zero_hits > 0 {
        let share = T::one() / T::from_count(zero_hits);
        for m in out.iter_mut() {
            *m = if *m == T::zero() { share } else { T::zero() };
        }
        return;
    }
    let expo = T::from_f64(2.0).unwrap() / (T::one() - q);
    let mut sum = T::zero();
    for m in out.iter_mut() {
        *m = m.powf(expo);
        sum = sum + *m;
    }
    for m in out.iter_mut() {
        *m = *m / sum;
    }
}

/// Xie-Beni index with FCM-form memberships of fuzziness `q`; the
/// denominator `n` counts pixels.
pub fn xb_index<T: Real>(image: &MultibandImage<T>, codebook: &Codebook<T>, q: T) -> Result<T> {
    if q <= T::one() {
        return Err(Error::InvalidConfig("XB requires fuzziness q > 1".into()));
    }
    if codebook.dim() != image.bands() {
        return Err(Error::DimensionMismatch(
            "codebook dimension != image band count".into(),
        ));
    }
    if codebook.len() < 2 {
        return Err(Error::DegenerateMetric("XB needs at least two centroids"));
    }
    let d_min = min_centroid_distance(codebook);
    if d_min == T::zero() {
        return Err(Error::DegenerateMetric("degenerate XB: coincident centroids"));
    }
    let mut mu = vec![T::zero(); codebook.len()];
    let mut num = T::zero();
    for px in image.pixels() {
        fcm_memberships(px, codebook.centroids(), q, &mut mu);
        for (i, &m) in mu.iter().enumerate() {
            num = num + m * m * distance_sq(px, codebook.centroid(i));
        }
    }
    let n = T::from_count(image.pixel_count());
    Ok(num / (n * d_min * d_min))
}

/// Convenience bundle of all validity indices for one triple.
pub fn validity<T: Real>(
    image: &MultibandImage<T>,
    codebook: &Codebook<T>,
    labels: &LabelMap,
    q: T,
    weights: [T; 3],
    l_max: T,
) -> Result<ValidityReport<T>> {
    let (j_e, per_cluster_scatter) = quantization_error(image, codebook, labels)?;
    let (d_max, d_min) = separation_cohesion(image, codebook, labels)?;
    let j_o = weights[0] * d_max + weights[1] * (l_max - d_min) + weights[2] * j_e;
    let db = db_index(image, codebook, labels)?;
    let xb = xb_index(image, codebook, q)?;
    Ok(ValidityReport {
        j_e,
        d_max,
        d_min,
        j_o,
        db,
        xb,
        per_cluster_scatter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vq::classify;

    fn image(pixels: &[&[f64]]) -> MultibandImage<f64> {
        let bands = pixels[0].len();
        let data: Vec<f64> = pixels.iter().flat_map(|p| p.iter().copied()).collect();
        MultibandImage::new(1, pixels.len(), bands, data).unwrap()
    }

    #[test]
    fn zero_distortion_report() {
        let img = image(&[&[0.3, 0.4], &[0.5, 0.6]]);
        let rep = fidelity(&img, &img).unwrap();
        assert_eq!(rep.me, 0.0);
        assert_eq!(rep.mae, 0.0);
        assert_eq!(rep.mse, 0.0);
        assert_eq!(rep.rmse, 0.0);
        assert_eq!(rep.nmse, 0.0);
        assert!(rep.psnr.is_infinite() && rep.psnr > 0.0);
        assert!(rep.snr.is_infinite() && rep.snr > 0.0);
    }

    #[test]
    fn one_pixel_hand_oracle() {
        let a = image(&[&[1.0]]);
        let b = image(&[&[0.5]]);
        let rep = fidelity(&a, &b).unwrap();
        assert_eq!(rep.me, 0.5);
        assert_eq!(rep.mae, 0.5);
        assert_eq!(rep.mse, 0.25);
        assert_eq!(rep.rmse, 0.5);
        assert_eq!(rep.nmse, 0.25);
        assert!((rep.psnr - 6.020599913279624).abs() < 1e-12);
        assert!((rep.snr - 6.020599913279624).abs() < 1e-12);
    }

    #[test]
    fn zero_signal_rejected() {
        let a = image(&[&[0.0]]);
        let b = image(&[&[0.5]]);
        assert!(matches!(fidelity(&a, &b), Err(Error::ZeroSignal)));
        // all-zero pair is fine: zero error
        let rep = fidelity(&a, &a).unwrap();
        assert_eq!(rep.nmse, 0.0);
    }

    #[test]
    fn quantization_error_examples() {
        // two clusters with per-cluster mean distances 0.1 and 0.3
        let img = image(&[&[0.1], &[0.3], &[0.8], &[1.0]]);
        let cb = Codebook::new(vec![vec![0.2], vec![0.6]]).unwrap();
        let labels = classify(&img, &cb).unwrap();
        let (j_e, s) = quantization_error(&img, &cb, &labels).unwrap();
        assert!((s[0] - 0.1).abs() < 1e-15);
        assert!((s[1] - 0.3).abs() < 1e-15);
        assert!((j_e - 0.2).abs() < 1e-15);

        // every pixel on its centroid
        let cb = Codebook::new(vec![vec![0.1], vec![0.3], vec![0.8], vec![1.0]]).unwrap();
        let labels = classify(&img, &cb).unwrap();
        let (j_e, _) = quantization_error(&img, &cb, &labels).unwrap();
        assert_eq!(j_e, 0.0);

        // single cluster collapses to S_1
        let cb = Codebook::new(vec![vec![0.45]]).unwrap();
        let labels = classify(&img, &cb).unwrap();
        let (j_e, s) = quantization_error(&img, &cb, &labels).unwrap();
        assert_eq!(j_e, s[0]);
    }

    #[test]
    fn separation_cohesion_examples() {
        let img = image(&[&[0.1, 0.1], &[0.9, 0.9]]);
        let cb = Codebook::new(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let labels = classify(&img, &cb).unwrap();
        let (_, d_min) = separation_cohesion(&img, &cb, &labels).unwrap();
        assert!((d_min - 5.0).abs() < 1e-15);

        let dup = Codebook::new(vec![vec![0.1, 0.1], vec![0.1, 0.1]]).unwrap();
        let labels = classify(&img, &dup).unwrap();
        let (_, d_min) = separation_cohesion(&img, &dup, &labels).unwrap();
        assert_eq!(d_min, 0.0);

        let single = Codebook::new(vec![vec![0.5, 0.5]]).unwrap();
        let labels = classify(&img, &single).unwrap();
        assert!(separation_cohesion(&img, &single, &labels).is_err());
    }

    #[test]
    fn omran_example() {
        // d_max=0.3, d_min=0.4, J_e=0.2 at equal weights
        // image: cluster 0 pixels at +-0.1 of 0.2 (S=0.1), cluster 1 at +-0.3 of 0.6... use 1-D
        let img = image(&[&[0.1], &[0.3], &[0.3], &[0.9]]);
        let cb = Codebook::new(vec![vec![0.2], vec![0.6]]).unwrap();
        let labels = classify(&img, &cb).unwrap();
        let (j_e, s) = quantization_error(&img, &cb, &labels).unwrap();
        assert!((s[0] - 0.1).abs() < 1e-15);
        assert!((s[1] - 0.3).abs() < 1e-15);
        assert!((j_e - 0.2).abs() < 1e-15);
        let j_o = omran_index(&img, &cb, &labels, equal_omran_weights(), 1.0).unwrap();
        assert!((j_o - (0.3 + (1.0 - 0.4) + 0.2) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn omran_vanishes_for_a_perfect_quantizer_with_unit_separation() {
        // every pixel on its centroid and d_min = L_max: all three terms zero
        let img = image(&[&[0.0], &[1.0]]);
        let cb = Codebook::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let labels = classify(&img, &cb).unwrap();
        let j_o = omran_index(&img, &cb, &labels, equal_omran_weights(), 1.0).unwrap();
        assert_eq!(j_o, 0.0);
    }

    #[test]
    fn db_symmetric_case() {
        // two clusters with S=(0,0): DB = 0
        let img = image(&[&[0.0], &[1.0]]);
        let cb = Codebook::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let labels = classify(&img, &cb).unwrap();
        assert_eq!(db_index(&img, &cb, &labels).unwrap(), 0.0);

        // S=(0.1,0.1), centroid distance 1 -> DB = 0.2
        let img = image(&[&[0.0], &[0.2], &[0.8], &[1.0]]);
        let cb = Codebook::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let labels = classify(&img, &cb).unwrap();
        let db = db_index(&img, &cb, &labels).unwrap();
        assert!((db - 0.2).abs() < 1e-15);

        let dup = Codebook::new(vec![vec![0.1], vec![0.1]]).unwrap();
        let labels = classify(&img, &dup).unwrap();
        assert!(db_index(&img, &dup, &labels).is_err());
    }

    #[test]
    fn xb_hand_fixture() {
        // pixels {0, 1}, centroids {0.25, 0.75}, q=2
        // mu(0) = (16, 16/9) normalized = (0.9, 0.1); same by symmetry for 1
        // numerator per pixel: 0.81*0.0625 + 0.01*0.5625 = 0.05625
        // XB = 2*0.05625 / (2 * 0.25) = 0.225
        let img = image(&[&[0.0], &[1.0]]);
        let cb = Codebook::new(vec![vec![0.25], vec![0.75]]).unwrap();
        let xb = xb_index(&img, &cb, 2.0).unwrap();
        assert!((xb - 0.225).abs() < 1e-12);
    }

    #[test]
    fn xb_zero_when_pixels_on_centroids() {
        let img = image(&[&[0.2], &[0.8]]);
        let cb = Codebook::new(vec![vec![0.2], vec![0.8]]).unwrap();
        assert_eq!(xb_index(&img, &cb, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn fcm_membership_degenerate_and_symmetric() {
        let centroids = vec![vec![0.2], vec![0.8]];
        let mut mu = vec![0.0f64; 2];
        // equidistant pixel
        fcm_memberships(&[0.5], &centroids, 2.0, &mut mu);
        assert!((mu[0] - 0.5).abs() < 1e-15);
        assert!((mu[1] - 0.5).abs() < 1e-15);
        // pixel exactly on a centroid
        fcm_memberships(&[0.2], &centroids, 2.0, &mut mu);
        assert_eq!(mu, vec![1.0, 0.0]);
    }

    #[test]
    fn scaled_report_matches_hand_arithmetic() {
        let a = image(&[&[1.0]]);
        let b = image(&[&[0.5]]);
        let rep = fidelity(&a, &b).unwrap().scaled(255.0);
        assert!((rep.me - 127.5).abs() < 1e-12);
        assert!((rep.mse - 0.25 * 255.0 * 255.0).abs() < 1e-9);
        // PSNR is scale-invariant
        assert!((rep.psnr - 6.020599913279624).abs() < 1e-12);
    }
}
