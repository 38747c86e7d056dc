//! Scalar abstraction for coefficient and rate arithmetic.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type used for coefficients, rates and likelihoods: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only for types that cannot represent finite doubles.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite constant")
    }

    /// Converts an integer edge weight.
    #[inline]
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable")
    }

    /// Relative tolerance used where an absolute `f64` tolerance would sit below machine precision.
    #[inline]
    fn tolerance(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(requested).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        let acc: CompensatedSum<f64> = values.iter().copied().collect();
        assert_eq!(acc.value(), 2.0);
        let naive: f64 = values.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn tolerance_floors_at_precision() {
        assert_eq!(<f64 as Scalar>::tolerance(1e-9), 1e-9);
        assert!(<f32 as Scalar>::tolerance(1e-9) > 1e-6);
    }
}
