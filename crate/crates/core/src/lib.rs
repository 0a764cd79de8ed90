//! Numerical laboratory for the twisted paraproduct on the unit square:
//! dyadic martingale calculus, Gowers box norms, telescoping identities over
//! convex trees, the stopping-time decomposition, the fiber-wise
//! Calderón–Zygmund splitting, a periodic Fourier model with mollifier
//! families, endpoint counterexamples, and the three-dimensional forms.
//!
//! Everything lives at dyadic resolution `2^-N` on `[0,1)` powers, where all
//! integrals are exact cell sums and the identities of the theory can be
//! checked to rounding error. The grid math is generic over the scalar type
//! through [`scalar::Real`]; the `f64` aliases below are the usual entry
//! point.

pub mod box_forms;
pub mod continuous;
pub mod counterexamples;
pub mod cz;
pub mod decomposition;
pub mod dim3;
pub mod dyadic;
pub mod error;
pub mod haar;
pub mod martingale;
pub mod paraproduct;
pub mod random;
pub mod scalar;
pub mod step;
pub mod trees;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` step function on `[0,1)`.
pub type StepFn1 = step::StepFunction1D<f64>;
/// `f64` step function on `[0,1)²`.
pub type StepFn2 = step::StepFunction2D<f64>;
/// `f64` step function on `[0,1)³`.
pub type StepFn3 = dim3::StepFunction3D<f64>;
/// `f64` box-form result.
pub type BoxResult = box_forms::BoxFormResult<f64>;
/// `f64` mollifier family on the periodic lattice.
pub type Mollifiers = continuous::MollifierFamily<f64>;
