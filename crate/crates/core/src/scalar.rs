//! Scalar abstractions shared by the rate formulas and the exact auditor.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, ToPrimitive, Zero};

/// Real scalar used by the closed-form rate evaluators: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts a small integer count into the scalar type.
    fn of(count: usize) -> Self {
        Self::from_usize(count).expect("count representable as float")
    }

    /// `floor` that tolerates representation error of decimal inputs, so that
    /// `1000 * (0.3 - 0.05)` floors to 250 rather than 249.
    fn floor_tol(self) -> Self {
        (self + Self::tolerance(self)).floor()
    }

    /// `ceil` counterpart of [`Real::floor_tol`].
    fn ceil_tol(self) -> Self {
        (self - Self::tolerance(self)).ceil()
    }

    #[doc(hidden)]
    fn tolerance(x: Self) -> Self {
        let rel = Self::from_f64(1e-9).unwrap();
        rel * x.abs().max(Self::one())
    }
}

impl Real for f32 {
    fn tolerance(x: Self) -> Self {
        1e-5 * x.abs().max(1.0)
    }
}

impl Real for f64 {}

/// Probability weight carried by enumerated atoms. `f64` for the fast path,
/// [`BigRational`] when the mass check must be exact.
pub trait Probability:
    Clone + Debug + Zero + One + Add<Output = Self> + Mul<Output = Self> + Send + Sync
{
    /// Builds the ratio `num / den`.
    fn ratio(num: u64, den: u64) -> Self;

    fn to_f64(&self) -> f64;
}

impl Probability for f64 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Probability for BigRational {
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Compensated summation for long streams of small probabilities.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl Extend<f64> for KahanSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}
