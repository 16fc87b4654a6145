//! Simultaneous concentration of order statistics.
//!
//! The crate is organised bottom-up:
//!
//! * [`distributions`] — CDF, quantile and density for the supported families,
//!   with tail classification.
//! * [`sampler`] — sorted i.i.d. samples in linear time from normalized partial
//!   sums of exponentials, plus a sort-based reference sampler.
//! * [`theta`] — the θ_p metric on (0,1) and grid calibration of the moduli of
//!   continuity of the quantile function.
//! * [`envelopes`] — per-index bands around the reference points
//!   `F⁻¹(i/(n+1))` with nominal coverage.
//! * [`montecarlo`] — deterministic, parallel coverage and sup-deviation
//!   experiments.

pub mod distributions;
pub mod envelopes;
mod error;
pub mod montecarlo;
pub(crate) mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod theta;

pub use distributions::{DistributionModel, Family, TailClass};
pub use envelopes::{BandKind, Envelope};
pub use error::{Error, Result};
pub use montecarlo::{CoverageReport, DeviationSummary, ExperimentConfig};
pub use rng::SeedSpec;
pub use sampler::SortedSample;
pub use theta::ThetaParams;
