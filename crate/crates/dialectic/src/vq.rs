//! Codebooks and the pixel-wise quantization decision rule.

use crate::error::{Error, Result};
use crate::image::{LabelMap, MultibandImage};
use crate::real::{distance_sq, Real};

/// Ordered list of class centroids: the quantizer's decoder table.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T> {
    centroids: Vec<Vec<T>>,
}

impl<T: Real> Codebook<T> {
    pub fn new(centroids: Vec<Vec<T>>) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::InvalidConfig(
                "a codebook needs at least one centroid".into(),
            ));
        }
        let dim = centroids[0].len();
        if dim == 0 || centroids.iter().any(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch(
                "all centroids must share one positive dimension".into(),
            ));
        }
        Ok(Self { centroids })
    }

    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.centroids[0].len()
    }

    pub fn centroid(&self, k: usize) -> &[T] {
        &self.centroids[k]
    }

    pub fn centroids(&self) -> &[Vec<T>] {
        &self.centroids
    }

    /// Index of the nearest centroid under squared Euclidean distance,
    /// ties broken by the lowest index.
    pub fn nearest(&self, x: &[T]) -> usize {
        let mut best = 0;
        let mut best_d = distance_sq(x, &self.centroids[0]);
        for (k, c) in self.centroids.iter().enumerate().skip(1) {
            let d = distance_sq(x, c);
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        best
    }
}

/// Assigns every pixel the index of its nearest centroid.
///
/// The discriminant of the decision rule is maximal exactly where the
/// squared Euclidean distance is minimal, so the scan below realizes it
/// directly; pixels are visited in row-major order and ties go to the
/// lowest class index, making the result reproducible bit-for-bit.
pub fn classify<T: Real>(image: &MultibandImage<T>, codebook: &Codebook<T>) -> Result<LabelMap> {
    if codebook.dim() != image.bands() {
        return Err(Error::DimensionMismatch(format!(
            "codebook dimension {} != image band count {}",
            codebook.dim(),
            image.bands()
        )));
    }
    let labels = image.pixels().map(|px| codebook.nearest(px)).collect();
    LabelMap::new(image.height(), image.width(), labels)
}

/// Reconstructs the image by substituting each pixel with its class centroid.
pub fn quantize<T: Real>(
    image: &MultibandImage<T>,
    codebook: &Codebook<T>,
    labels: &LabelMap,
) -> Result<MultibandImage<T>> {
    if codebook.dim() != image.bands() {
        return Err(Error::DimensionMismatch(format!(
            "codebook dimension {} != image band count {}",
            codebook.dim(),
            image.bands()
        )));
    }
    if labels.height() != image.height() || labels.width() != image.width() {
        return Err(Error::DimensionMismatch(
            "label map dimensions differ from the image".into(),
        ));
    }
    if labels.max_label() >= codebook.len() {
        return Err(Error::DimensionMismatch(
            "label map references a class beyond the codebook".into(),
        ));
    }
    let mut data = Vec::with_capacity(image.pixel_count() * image.bands());
    for u in 0..image.pixel_count() {
        data.extend_from_slice(codebook.centroid(labels.label(u)));
    }
    MultibandImage::new(image.height(), image.width(), image.bands(), data)
}
