use super::{eval_lms, EvalReport, QuadratureConfig};
use crate::constants::FracParams;
use crate::error::Result;
use crate::field::ScalarField;

/// `L_{m,s} f` at many points, in parallel when the `parallel` feature is on.
/// Results keep the order of `points`.
pub fn eval_points(
    f: &dyn ScalarField,
    points: &[Vec<f64>],
    p: &FracParams,
    cfg: &QuadratureConfig,
) -> Vec<Result<EvalReport>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points.par_iter().map(|x| eval_lms(f, x, p, cfg)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.iter().map(|x| eval_lms(f, x, p, cfg)).collect()
    }
}
