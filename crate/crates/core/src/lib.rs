//! Rate-distortion analysis for two-encoder coding of a remote Gaussian
//! source whose descriptions must remain individually decodable, plus
//! discrete-alphabet counterparts.

pub mod discrete;
pub mod error;
pub mod gaussian;
pub mod numerics;
pub mod oracle;
pub mod regions;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` problem instance.
pub type Problem = gaussian::GaussianProblem<f64>;
/// `f64` derived constants.
pub type Constants = gaussian::DerivedConstants<f64>;
/// `f64` test-channel parameters.
pub type Params = gaussian::TestChannelParams<f64>;
/// `f64` rate-distortion point.
pub type Point = gaussian::RdPoint<f64>;
/// `f64` boundary polyline.
pub type Polyline = regions::BoundaryPolyline<f64>;
/// `f64` membership outcome with witness type `W`.
pub type Membership<W> = regions::MembershipResult<f64, W>;
