//! Gaussian-smoothed coefficient sums, the double-log kernel and its prime
//! sum, and parameter planners.

mod gaussian;
mod kernel;
mod plan;
mod series;

pub use gaussian::{
    contour_integral_gaussian, default_cap, gaussian_weighted_sum, window_mass, ContourIntegral,
    GaussianSum, WindowMass, EULER_LIMIT, QUADRATURE_BUDGET,
};
pub use kernel::{
    cubic_kernel_f, kernel_constant, weighted_prime_sum, zero_side_sum, AnnulusRow, CtConfig, ZeroSideSum,
};
pub use plan::{qt_plan, QtPlan};
pub use series::{CoefficientSeries, SeriesProduct};
