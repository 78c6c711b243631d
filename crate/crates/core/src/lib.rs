//! Numerical workbench for Epstein surfaces and W-volumes in the upper
//! half-space model of hyperbolic 3-space.
//!
//! The crate evaluates Epstein surfaces of conformal metrics on planar
//! annuli, computes W-volumes of the regions they bound (with caterpillar
//! and bending-line boundary terms), and implements the two explicit
//! models where everything has a closed form: the hyperbolic cusp on the
//! punctured disk and the symmetric projective tube. On top of those it
//! provides the renormalized-volume limits, the multicurve correction
//! term `max_m pi^3 sum 1/l_gamma`, and the quadratic-differential norm
//! values used alongside it.
//!
//! Sign conventions for the W-volume are fixed once in [`wvolume`] and
//! cross-validated against the cusp closed forms; see the module docs.

// negated comparisons are deliberate: `!(x > 0.0)` rejects NaN, `x <= 0.0`
// does not
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::type_complexity)]

pub mod acceptance;
pub mod adapted;
pub mod cusp;
pub mod epstein;
pub mod extrapolate;
pub mod field;
pub mod halfspace;
pub mod quadrature;
pub mod schwarzian;
pub mod tube;
pub mod wvolume;

mod error;

pub use error::CoreError;
pub use field::{ConformalMetric, Domain, Jet, LiouvilleField};
pub use halfspace::{hyp_distance, Complex, HyperbolicPoint3, MoebiusImage, MoebiusMap};
pub use quadrature::QuadratureConfig;
pub use wvolume::{RegionSpec, WVolumeReport};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
