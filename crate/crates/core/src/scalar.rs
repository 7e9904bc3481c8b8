//! Scalar abstraction for the numeric core.
//!
//! Every algorithm in this crate is generic over [`Scalar`], a thin alias
//! over [`num_traits::Float`]. In practice `f64` is the working type (the
//! instance file format is IEEE-754 double precision) and `f32` is supported
//! for experimentation; the crate root exports concrete `f64` aliases.

use std::fmt::{Debug, Display};

use num_traits::{Float, NumCast};

/// Floating-point scalar usable by the index algorithms and solvers.
///
/// Blanket-implemented for any `Float` with the usual utility bounds, which
/// covers `f32` and `f64`.
pub trait Scalar: Float + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` constant (tolerances, literals) into `Self`.
    #[inline]
    fn from_f64(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 constant must be representable")
    }

    /// Widens to `f64` for reporting and error payloads.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must widen to f64")
    }
}

impl<T> Scalar for T where T: Float + Debug + Display + Send + Sync + 'static {}

/// Absolute per-row tolerance on transition-matrix row sums.
///
/// 1e-9 absorbs double-precision normalization round-off; the epsilon term
/// keeps the same check meaningful for narrower scalar types.
pub fn row_sum_tolerance<S: Scalar>(n: usize) -> S {
    let floor = S::from_f64(1e-9);
    let eps_scaled = S::from_f64(8.0 * n as f64) * S::epsilon();
    floor.max(eps_scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_tolerance_keeps_the_absolute_floor() {
        assert_eq!(row_sum_tolerance::<f64>(200), 1e-9);
    }

    #[test]
    fn f32_tolerance_scales_with_epsilon() {
        let tol = row_sum_tolerance::<f32>(200);
        assert!(tol > 1e-9);
        assert!(tol < 1e-3);
    }
}
