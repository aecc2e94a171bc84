//! Multiband raster types: the pixel data being classified and quantized.

use crate::error::{Error, Result};
use crate::real::Real;

/// An H×W raster of n-band feature vectors, every component in `[0, 1]`.
///
/// Pixels are stored row-major as one flat buffer of `height*width*bands`
/// scalars; pixel `(row, col)` occupies the `bands` slots starting at
/// `(row*width + col) * bands`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultibandImage<T> {
    height: usize,
    width: usize,
    bands: usize,
    data: Vec<T>,
}

impl<T: Real> MultibandImage<T> {
    /// Builds an image from a flat row-major buffer, validating the type
    /// invariants (component range and buffer length).
    pub fn new(height: usize, width: usize, bands: usize, data: Vec<T>) -> Result<Self> {
        if height == 0 || width == 0 || bands == 0 {
            return Err(Error::InvalidConfig(
                "image dimensions must be positive".into(),
            ));
        }
        if data.len() != height * width * bands {
            return Err(Error::DimensionMismatch(format!(
                "expected {} scalars for a {}x{}x{} image, got {}",
                height * width * bands,
                height,
                width,
                bands,
                data.len()
            )));
        }
        if data
            .iter()
            .any(|&v| !(v >= T::zero() && v <= T::one()))
        {
            return Err(Error::InvalidConfig(
                "pixel components must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            height,
            width,
            bands,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    /// Pixel vector at flat row-major index `u`.
    pub fn pixel(&self, u: usize) -> &[T] {
        let start = u * self.bands;
        &self.data[start..start + self.bands]
    }

    /// Iterator over pixel vectors in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.bands)
    }

    /// The flat scalar buffer.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Per-band min/max over all pixels (the bounding box of the data cloud).
    pub fn band_bounds(&self) -> (Vec<T>, Vec<T>) {
        let mut lo = vec![T::infinity(); self.bands];
        let mut hi = vec![T::neg_infinity(); self.bands];
        for px in self.pixels() {
            for (j, &v) in px.iter().enumerate() {
                if v < lo[j] {
                    lo[j] = v;
                }
                if v > hi[j] {
                    hi[j] = v;
                }
            }
        }
        (lo, hi)
    }
}

/// An H×W raster of class indices produced by classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    height: usize,
    width: usize,
    labels: Vec<usize>,
}

impl LabelMap {
    pub fn new(height: usize, width: usize, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "expected {} labels for a {}x{} map, got {}",
                height * width,
                height,
                width,
                labels.len()
            )));
        }
        Ok(Self {
            height,
            width,
            labels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> usize {
        self.labels[u]
    }

    /// Largest label present.
    pub fn max_label(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }
}
