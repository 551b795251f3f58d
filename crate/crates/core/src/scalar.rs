//! Numeric abstraction for similarity scores, weights and thresholds.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// A number type similarity arithmetic can run on.
///
/// Implemented for `f32`, `f64` and exact `Ratio<i64>`. Scores are built
/// from small fractions (Jaccard ratios, weights, the fraction beta) so an
/// `i64` rational never comes close to overflowing for realistic strategies.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// `num / den`; `den` must be nonzero.
    fn from_fraction(num: u64, den: u64) -> Self;

    /// Converts a configuration value. Returns `None` for non-finite input
    /// or when the value has no representation in this type.
    fn from_config(value: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {
        $(
            impl Scalar for $t {
                fn from_fraction(num: u64, den: u64) -> Self {
                    num as $t / den as $t
                }

                fn from_config(value: f64) -> Option<Self> {
                    value.is_finite().then_some(value as $t)
                }

                fn to_f64(&self) -> f64 {
                    *self as f64
                }
            }
        )*
    };
}

impl_float_scalar!(f32, f64);

impl Scalar for Ratio<i64> {
    fn from_fraction(num: u64, den: u64) -> Self {
        Ratio::new(num as i64, den as i64)
    }

    fn from_config(value: f64) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        // Config values are short decimals (0.35, 50, 0.5); try a decimal
        // reading first so that 0.35 becomes exactly 7/20.
        for digits in 0..=9u32 {
            let scale = 10i64.pow(digits);
            let scaled = value * scale as f64;
            let rounded = scaled.round();
            if (scaled - rounded).abs() <= 1e-9 * scaled.abs().max(1.0) && rounded.abs() < 1e15 {
                return Some(Ratio::new(rounded as i64, scale));
            }
        }
        Ratio::approximate_float(value)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_config_values_are_exact() {
        assert_eq!(Ratio::<i64>::from_config(0.35), Some(Ratio::new(7, 20)));
        assert_eq!(Ratio::<i64>::from_config(0.5), Some(Ratio::new(1, 2)));
        assert_eq!(Ratio::<i64>::from_config(50.0), Some(Ratio::from_integer(50)));
        assert_eq!(Ratio::<i64>::from_config(f64::NAN), None);
    }

    #[test]
    fn fractions() {
        assert_eq!(Ratio::<i64>::from_fraction(1, 3), Ratio::new(1, 3));
        assert!((f64::from_fraction(1, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(Scalar::to_f64(&Ratio::<i64>::new(3, 4)), 0.75);
    }
}
