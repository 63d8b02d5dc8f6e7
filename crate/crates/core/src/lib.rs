//! Simulation of attitude jitter in linear-array pushbroom imagery.
//!
//! The crate builds paired clean/degraded images: sinusoidal roll and pitch
//! jitter is sampled at several sub-line instants, turned into displacement
//! fields, and applied by backward bilinear warping in the linear-energy
//! domain, followed by sensor noise and gamma encoding. Noisy jitter
//! readings drive a pre-correction warp, and full-reference metrics score
//! the results.
//!
//! Module overview:
//!
//! - [`jitter`]: sinusoid sets, subdivision sampling, averaging, measurement error
//! - [`geometry`]: jitter maps, `grid_sample`, multi-subdivision deformation, pre-correction
//! - [`sensor`]: gamma, Poisson-Gaussian noise, quantization
//! - [`metrics`]: PSNR, SSIM, GMSD, spectral L1
//! - [`pipeline`]: dataset synthesis, batch pre-correction and evaluation
//! - [`sidecar`]: binary and CSV curve storage
//! - [`cli`]: the `lapjitter` command

pub mod cli;
pub mod error;
pub mod flowviz;
pub mod geometry;
pub mod image;
pub mod io;
pub mod jitter;
pub mod metrics;
pub mod pipeline;
pub mod plot;
pub mod scene;
pub mod seed;
pub mod sensor;
pub mod sidecar;

pub use error::{Error, Result};
pub use geometry::{BoundaryPolicy, Displacement, FlowField};
pub use image::Image;
pub use jitter::{
    Direction, JitterCurve, MeasurementErrorModel, SamplingGrid, SinusoidComponent, SinusoidSet,
};
pub use metrics::MetricReport;
pub use pipeline::DegradationConfig;
pub use sidecar::{CurvePair, Sidecar};
