//! Numerical toolkit for representing real functions on the unit circle as
//! truncated inner analytic functions on the open unit disk.
//!
//! A real function with finitely many non-integrable singular points of finite
//! degree of hardness is handled by the chain: sectional integration until the
//! function becomes integrable, Fourier analysis of the integrable primitive,
//! the Taylor/Fourier coefficient bijection, angular differentiation back up
//! the integral-differential chain, boundary-limit recovery by radial
//! extrapolation, and optional subtraction of the Dirac-delta components that
//! circle-wide differentiation creates at jump discontinuities.
//!
//! Modules follow the pipeline:
//!
//! * [`coeffs`] — coefficient-level algebra: Taylor/Fourier maps, angular
//!   derivative and primitive as coefficient transforms, growth diagnostics.
//! * [`evalcore`] — series evaluation on the open disk, regulated Fourier
//!   sums, and extrapolated `rho -> 1` boundary values.
//! * [`sections`] — sectionally defined circle functions, adaptive quadrature,
//!   n-fold sectional integration, numeric Fourier coefficients, piecewise
//!   polynomials with jump bookkeeping.
//! * [`classify`] — numeric classification of singular points (soft /
//!   borderline hard / hard with degree).
//! * [`reconstruct`] — the full reconstruction pipeline and the extended
//!   Fourier coefficient relations.
//! * [`catalog`] — named corpus of test functions with oracle data.
//! * [`files`] — the versioned coefficient file format used by the CLI.
//!
//! All numerics are generic over the scalar type via [`Real`]; `f64` is the
//! precision the default tolerances are tuned for. Concrete aliases for the
//! main types live at the crate root ([`Taylor64`], [`Fourier64`], ...).

use std::fmt;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub mod catalog;
pub mod classify;
pub mod coeffs;
pub mod evalcore;
pub mod files;
pub mod reconstruct;
pub mod sections;

/// Scalar type the toolkit is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + fmt::Debug + fmt::Display + fmt::LowerExp + Send + Sync + 'static
{
    /// Shorthand for lossy conversion of an `f64` constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Shorthand for converting an index.
    fn of_usize(k: usize) -> Self {
        Self::from_usize(k).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex value over the generic scalar.
pub type C<T> = num_complex::Complex<T>;

pub use classify::{SingularityKind, SingularityRecord};
pub use coeffs::{FourierCoefficients, GrowthReport, TaylorCoefficients};
pub use evalcore::{BoundaryLimit, DiskPoint, RhoLadder};
pub use reconstruct::{DeltaComponent, ReconstructionResult};
pub use sections::{PiecewisePolynomial, PiecewisePrimitive, QuadratureConfig, SectionedFunction};

/// `f64` aliases for the main domain types.
pub type Taylor64 = TaylorCoefficients<f64>;
pub type Fourier64 = FourierCoefficients<f64>;
pub type Sectioned64 = SectionedFunction<f64>;
pub type Ladder64 = RhoLadder<f64>;

/// `f32` aliases, for callers that trade precision for size.
pub type Taylor32 = TaylorCoefficients<f32>;
pub type Fourier32 = FourierCoefficients<f32>;
pub type Sectioned32 = SectionedFunction<f32>;
pub type Ladder32 = RhoLadder<f32>;

/// Normalize an angle to the principal interval `(-pi, pi]`.
pub fn normalize_angle<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut x = theta - two_pi * ((theta + T::PI()) / two_pi).floor();
    // floor rounding can land exactly on -pi; the principal branch uses +pi
    if x <= -T::PI() {
        x = x + two_pi;
    }
    if x > T::PI() {
        x = x - two_pi;
    }
    x
}

/// Distance between two angles along the circle, in `[0, pi]`.
pub fn circle_distance<T: Real>(a: T, b: T) -> T {
    normalize_angle(a - b).abs()
}

/// Real functions defined on the unit circle except at finitely many
/// singular points. The evaluation contract is pointwise: `eval` is only
/// meaningful strictly inside the open arcs between singular points.
pub trait CircleFunction<T: Real> {
    fn eval(&self, theta: T) -> T;
    fn singular_points(&self) -> &[T];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_principal_branch() {
        assert_eq!(normalize_angle(std::f64::consts::PI), std::f64::consts::PI);
        assert_eq!(normalize_angle(-std::f64::consts::PI), std::f64::consts::PI);
        assert!((normalize_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(normalize_angle(0.0), 0.0);
        let x = normalize_angle(7.0_f64);
        assert!(x > -std::f64::consts::PI && x <= std::f64::consts::PI);
        assert!((x - (7.0 - 2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn circle_distance_wraps() {
        let d = circle_distance(3.0_f64, -3.0_f64);
        assert!((d - (2.0 * std::f64::consts::PI - 6.0)).abs() < 1e-12);
    }
}
