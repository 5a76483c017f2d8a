//! Higher-order fractional Laplacians defined through hypersingular
//! finite-difference integrals.
//!
//! The operator is
//!
//! ```text
//! L_{m,s} u(x) = c_{N,m,s} / 2 * int_{R^N} delta_m u(x, y) / |y|^{N+2s} dy,
//! ```
//!
//! where `delta_m` is the centred difference of order `2m` and `0 < s < m`.
//! The crate evaluates it pointwise by graded radial-angular quadrature,
//! computes the normalizing constants exactly where they are exact, and
//! provides independent checks: an FFT multiplier oracle, the direct energy
//! form, classical polyharmonic derivatives and an explicit s-harmonic family
//! on the unit ball.

pub mod constants;
pub mod energy;
pub mod error;
pub mod field;
pub mod harmonic;
pub mod jet;
pub mod operator;
pub mod quad;
pub mod spectral;
pub mod specialfn;
pub mod stencils;

pub use constants::{norm_constant, Branch, FracParams, NormConstant};
pub use error::{Error, Result};
pub use field::{Field, ScalarField};
pub use operator::{eval_lms, eval_lms_pv, EvalReport, QuadratureConfig};
pub use stencils::Stencil;
