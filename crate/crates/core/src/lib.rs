//! Dirichlet characters and their L-functions, smoothing kernels, quadratic form
//! class groups and torsion-bound experiments.

pub mod arith;
pub mod characters;
pub mod charsums;
pub mod error;
pub mod fields;
pub mod harness;
pub mod kernels;
pub mod lfun;
pub mod scalar;

pub use error::{Error, Result};

/// Double-precision instances of the generic analytic types.
pub type LFunction64 = lfun::LFunction<f64>;
pub type Rect64 = lfun::Rect<f64>;
pub type ScanOptions64 = lfun::ScanOptions<f64>;
pub type ZeroScanReport64 = lfun::ZeroScanReport<f64>;
pub type SupNormReport64 = lfun::SupNormReport<f64>;
pub type CertifyParams64 = lfun::CertifyParams<f64>;
pub type ZeroFreeCertificate64 = lfun::ZeroFreeCertificate<f64>;
pub type GaussianSum64 = kernels::GaussianSum<f64>;
pub type WindowMass64 = kernels::WindowMass<f64>;
pub type ContourIntegral64 = kernels::ContourIntegral<f64>;
pub type QtPlan64 = kernels::QtPlan<f64>;
pub type HlgrCheck64 = harness::HlgrCheck<f64>;
