use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Arithmetic the simplex tableau runs on.
///
/// Floating-point comparisons take a tolerance; exact types ignore it.
pub(crate) trait Scalar: Clone + Debug + PartialOrd + Signed {
    fn from_f64(value: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;

    fn is_negligible(&self, tol: f64) -> bool;

    fn exceeds(&self, tol: f64) -> bool;

    /// Replaces values that are numerically zero with an exact zero.
    fn snap(&mut self);

    /// `self -= factor * other`
    fn sub_scaled(&mut self, factor: &Self, other: &Self);
}

/// Entries smaller than this are flushed to zero after each pivot.
const FLUSH: f64 = 1e-13;

impl Scalar for f64 {
    fn from_f64(value: f64) -> Option<Self> {
        value.is_finite().then_some(value)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    #[inline]
    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    #[inline]
    fn exceeds(&self, tol: f64) -> bool {
        *self > tol
    }

    #[inline]
    fn snap(&mut self) {
        if self.abs() < FLUSH {
            *self = 0.0;
        }
    }

    #[inline]
    fn sub_scaled(&mut self, factor: &Self, other: &Self) {
        *self -= factor * other;
    }
}

impl Scalar for BigRational {
    fn from_f64(value: f64) -> Option<Self> {
        // Converts through the decimal representation so that inputs such as
        // 0.1 mean 1/10 rather than the nearest binary fraction.
        if !value.is_finite() {
            return None;
        }
        if value.fract() == 0.0 && value.abs() < 1e15 {
            return <BigRational as FromPrimitive>::from_f64(value);
        }
        let text = format!("{value:e}");
        let (mantissa, exponent) = text.split_once('e')?;
        let exponent: i32 = exponent.parse().ok()?;
        let negative = mantissa.starts_with('-');
        let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
        let fraction_digits = mantissa.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
        let numerator: num_bigint::BigInt = digits.parse().ok()?;
        let ten = num_bigint::BigInt::from(10);
        let shift = exponent - fraction_digits;
        let mut result = BigRational::from_integer(numerator);
        if shift >= 0 {
            result *= BigRational::from_integer(num_traits::pow(ten, shift as usize));
        } else {
            result /= BigRational::from_integer(num_traits::pow(ten, (-shift) as usize));
        }
        Some(if negative { -result } else { result })
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn exceeds(&self, _tol: f64) -> bool {
        self.is_positive()
    }

    fn snap(&mut self) {}

    fn sub_scaled(&mut self, factor: &Self, other: &Self) {
        *self -= factor * other;
    }
}
