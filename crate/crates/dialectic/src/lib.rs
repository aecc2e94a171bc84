//! Dialectical optimization and vector quantization over multiband images.
//!
//! The crate provides:
//!
//! - [`odm`]: the dialectical method as a general derivative-free box
//!   optimizer, with canonical and maximum-entropy membership strategies;
//! - [`odc`]: the dialectical classifier, an adaptive-class-count pixel
//!   clusterer;
//! - [`opt_kmeans`]: k-means retrained by dialectical search over
//!   concatenated-centroid candidates;
//! - [`clustering`]: baseline quantizers (online k-means, x-means sweep,
//!   fuzzy c-means, 1-D ring Kohonen map);
//! - [`metrics`]: image-fidelity indices (ME/MAE/MSE/RMSE/NMSE/PSNR/SNR) and
//!   cluster-validity indices (J_e, d_max, d_min, J_o, DB, XB);
//! - [`stats`]: the F-test / chi-square comparison protocol.
//!
//! All numerics are generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the aliases below pin the common concrete choices.

pub mod clustering;
pub mod error;
pub mod image;
pub mod metrics;
pub mod odc;
pub mod odm;
pub mod opt_kmeans;
pub mod real;
mod sampling;
pub mod search;
pub mod seed;
pub mod stats;
pub mod vq;

pub use error::{Error, Result};
pub use image::{LabelMap, MultibandImage};
pub use real::Real;
pub use search::{Pole, PoleSet, SearchBox};
pub use vq::{classify, quantize, Codebook};

/// `f64` concrete aliases (the default precision for experiments).
pub type Image64 = image::MultibandImage<f64>;
pub type Codebook64 = vq::Codebook<f64>;
pub type SearchBox64 = search::SearchBox<f64>;
pub type OdmConfig64 = odm::OdmConfig<f64>;
pub type OdcConfig64 = odc::OdcConfig<f64>;
pub type TrainConfig64 = clustering::TrainConfig<f64>;
pub type FidelityReport64 = metrics::FidelityReport<f64>;
pub type ValidityReport64 = metrics::ValidityReport<f64>;

/// `f32` concrete aliases.
pub type Image32 = image::MultibandImage<f32>;
pub type Codebook32 = vq::Codebook<f32>;
pub type SearchBox32 = search::SearchBox<f32>;
pub type OdmConfig32 = odm::OdmConfig<f32>;
pub type OdcConfig32 = odc::OdcConfig<f32>;
pub type TrainConfig32 = clustering::TrainConfig<f32>;
