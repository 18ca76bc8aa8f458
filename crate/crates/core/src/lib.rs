//! Guaranteed lower and upper bounds on the Kullback-Leibler divergence,
//! cross-entropy and differential entropy of univariate mixtures of
//! exponential, Rayleigh, Gaussian and gamma densities.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.
//!
//! ```
//! use mixbound::{kl_bounds, ComponentParams, Mixture64, Weighted64};
//!
//! let m = Mixture64::new(vec![
//!     Weighted64::new(0.5, ComponentParams::gaussian(-1.0, 1.0)?)?,
//!     Weighted64::new(0.5, ComponentParams::gaussian(2.0, 0.5)?)?,
//! ])?;
//! let mp = Mixture64::single(ComponentParams::gaussian(0.0, 2.0)?)?;
//! let b = kl_bounds(&m, &mp)?;
//! assert!(b.adaptive.lower <= b.adaptive.upper);
//! # Ok::<(), mixbound::Error>(())
//! ```

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod envelope;
pub mod error;
pub mod families;
pub mod integrals;
pub mod montecarlo;
pub mod oracle;
pub mod presets;
pub mod rng;
pub mod scalar;

pub use bounds::{
    combinatorial_kl_bounds, cross_entropy_bounds, entropy_bounds, entropy_bounds_detailed,
    jeffreys_bounds, js_bounds, kl_bounds, kl_bounds_with, lse_bounds, meub, BoundInterval, BoundOptions,
    EntropyBounds, KlBounds,
};
pub use envelope::{
    build_partition, overlay, pairwise_intersections, EnvelopeMode, EnvelopePartition, Mixture,
    WeightedComponent,
};
pub use error::{Error, Result};
pub use families::{ComponentParams, FamilyTag, NaturalFamily, NaturalForm, SupportInterval};
pub use montecarlo::{mc_entropy, mc_kl, repetition_stats, sample_mixture, McEstimate};
pub use scalar::Real;

pub type Mixture64 = Mixture<f64>;
pub type Component64 = ComponentParams<f64>;
pub type Weighted64 = WeightedComponent<f64>;
pub type BoundInterval64 = BoundInterval<f64>;
pub type KlBounds64 = KlBounds<f64>;
pub type EntropyBounds64 = EntropyBounds<f64>;
pub type McEstimate64 = McEstimate<f64>;
