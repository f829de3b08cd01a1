//! Deterministic Dirac mixture approximation of densities on the unit
//! circle by matching projected cumulative distributions.
//!
//! ```no_run
//! use pcd_circle::{sample_circle, CircularDensity, DensitySpec, SamplerConfig};
//!
//! let density = CircularDensity::new(DensitySpec::VonMises { mu: 0.0, kappa: 1.0 })?;
//! let run = sample_circle(&density, &SamplerConfig::new(15).with_seed(7))?;
//! println!("{:?}", run.samples.angles());
//! # Ok::<(), pcd_circle::Error>(())
//! ```

pub mod angle;
pub mod bessel;
pub mod density;
pub mod error;
pub mod io;
pub mod metrics;
pub mod mixture;
pub mod projection;
pub mod rng;
pub mod sampler;
pub mod svg;
pub mod univariate;

pub use angle::Angle;
pub use density::{normalization_integral, CircularDensity, DensitySpec, Family, MixtureComponent};
pub use error::{Error, Result};
pub use mixture::DiracMixture;
pub use projection::{backproject_step, project_samples, Direction, ProjectionMode, UnivariateProjection};
pub use sampler::{
    init_samples, iteration_step, sample_circle, sample_circle_from, ConvergenceTrace, SamplerConfig,
    SamplingRun,
};
pub use univariate::{sample_projected, Density1d, PiecewiseCdf, UnivariateSampler};
