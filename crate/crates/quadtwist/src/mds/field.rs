//! Scalars for the correction-polynomial solver: exact rationals for GL(1),
//! complex floats otherwise.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Fails for an exact field when z is not an integer.
    fn from_complex(z: Complex64) -> Result<Self>;
    fn inv(&self) -> Self;
    fn magnitude(&self) -> f64;
    /// Zero up to the field's tolerance relative to `scale`.
    fn negligible(&self, scale: f64) -> bool;
    /// p^{i/2} for floats, 1 for exact fields; unknowns are scaled by it to
    /// keep the float system balanced.
    fn half_power(p: u64, i: usize) -> Self;
    fn to_complex(&self) -> Complex64;

    fn is_zero_exact(&self) -> bool {
        self.negligible(0.0)
    }
}

impl Field for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_complex(z: Complex64) -> Result<Self> {
        let r = z.re.round();
        if z.im.abs() > 1e-9 || (z.re - r).abs() > 1e-9 || r.abs() > 9e15 {
            return Err(Error::Numeric(format!("{z} is not an integer")));
        }
        Ok(Self::from_i64(r as i64))
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn half_power(_p: u64, _i: usize) -> Self {
        One::one()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// Relative tolerance below which a float entry counts as zero.
pub const FLOAT_TOL: f64 = 1e-9;

impl Field for Complex64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_complex(z: Complex64) -> Result<Self> {
        Ok(z)
    }
    fn inv(&self) -> Self {
        1.0 / self
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= FLOAT_TOL * scale
    }
    fn half_power(p: u64, i: usize) -> Self {
        Complex64::new((p as f64).powf(i as f64 / 2.0), 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

pub fn pow<F: Field>(x: &F, k: usize) -> F {
    let mut out = F::one();
    for _ in 0..k {
        out = out * x.clone();
    }
    out
}

pub fn sign<F: Field>(v: i8) -> F {
    F::from_i64(v as i64)
}
