//! Numeric abstractions shared by the statistics kernels.
//!
//! Counting code works with integers; anything that divides is generic over
//! [`Scalar`], which is satisfied by `f32`, `f64` and the exact rationals
//! (`Ratio<i64>`, [`BigRational`](num_rational::BigRational)). Kernels that
//! need logarithms or sampling additionally require [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num};

/// Field-like scalar: closed under `+ - * /`, ordered, constructible from counts.
pub trait Scalar: Num + Clone + PartialOrd + Debug + FromPrimitive {
    /// Converts a count. Panics only if the scalar cannot represent it, which
    /// does not happen for the provided implementations.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite value representable in scalar type")
    }
}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + Debug + FromPrimitive {}

/// Floating-point scalar used by the sampler, TF-IDF and valence scoring.
pub trait Real: Scalar + Float + Copy + Display + Send + Sync + 'static {
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Scalar + Float + Copy + Display + Send + Sync + 'static {}

/// `a / b` with the convention that a zero denominator yields zero.
pub fn ratio_or_zero<S: Scalar>(num: u64, den: u64) -> S {
    if den == 0 {
        S::zero()
    } else {
        S::from_count(num) / S::from_count(den)
    }
}

/// Harmonic mean of two non-negative scalars; zero when both are zero.
pub fn harmonic_mean<S: Scalar>(a: &S, b: &S) -> S {
    let sum = a.clone() + b.clone();
    if sum.is_zero() {
        S::zero()
    } else {
        let two = S::one() + S::one();
        two * a.clone() * b.clone() / sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn ratio_zero_denominator() {
        assert_eq!(ratio_or_zero::<f64>(3, 0), 0.0);
        assert_eq!(ratio_or_zero::<f64>(1, 4), 0.25);
    }

    #[test]
    fn harmonic_mean_exact() {
        let p = BigRational::new(2.into(), 3.into());
        let r = BigRational::from_count(1);
        assert_eq!(harmonic_mean(&p, &r), BigRational::new(4.into(), 5.into()));
        assert_eq!(harmonic_mean(&0.0f64, &0.0), 0.0);
    }
}
