//! Real scalars at a configurable binary precision.
//!
//! Every [`Scalar`] carries its own MPFR precision. Values built from
//! literals take the process-wide working precision (113 bits unless changed
//! with [`set_working_precision`]); binary operations round to the larger of
//! the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 113;
pub const MIN_PRECISION: u32 = 53;
pub const MAX_PRECISION: u32 = 4096;

static WORKING_PRECISION: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION);

/// Current working precision in bits.
pub fn working_precision() -> u32 {
    WORKING_PRECISION.load(AtomicOrdering::Relaxed)
}

/// Sets the working precision used for newly created scalars.
pub fn set_working_precision(bits: u32) -> Result<()> {
    if !(MIN_PRECISION..=MAX_PRECISION).contains(&bits) {
        return Err(Error::Domain(format!(
            "precision must lie in [{MIN_PRECISION}, {MAX_PRECISION}] bits, got {bits}"
        )));
    }
    WORKING_PRECISION.store(bits, AtomicOrdering::Relaxed);
    Ok(())
}

/// Unit roundoff of the working precision, `2^(1-p)`.
pub fn working_epsilon() -> Scalar {
    Scalar(Float::with_val(working_precision(), Float::u_exp(1, 1 - working_precision() as i32)))
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct Scalar(Float);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Float::new(working_precision()))
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_f64(x: f64) -> Self {
        Scalar(Float::with_val(working_precision(), x))
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar(Float::with_val(working_precision(), n))
    }

    /// Exact-as-possible `p/q`, rounded once.
    pub fn ratio(p: i64, q: i64) -> Self {
        let prec = working_precision();
        Scalar(Float::with_val(prec, p) / Float::with_val(prec, q))
    }

    pub fn pi() -> Self {
        Scalar(Float::with_val(working_precision(), Constant::Pi))
    }

    /// Parses a decimal string (`"1.5"`, `"-2e-3"`, `"1/3"` is not accepted).
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let parsed = Float::parse(trimmed)
            .map_err(|e| Error::Parse(format!("invalid decimal {trimmed:?}: {e}")))?;
        let value = Float::with_val(working_precision(), parsed);
        Scalar(value).finite()
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// The same value rounded to `bits` of precision.
    pub fn with_prec(&self, bits: u32) -> Self {
        Scalar(Float::with_val(bits, &self.0))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    /// Returns the value if finite, otherwise a non-finite error.
    pub fn finite(self) -> Result<Self> {
        if self.0.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn abs(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.abs_ref()))
    }

    pub fn sqrt(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.sqrt_ref()))
    }

    pub fn sin(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.sin_ref()))
    }

    pub fn cos(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.cos_ref()))
    }

    pub fn cot(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.cot_ref()))
    }

    pub fn exp(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.exp_ref()))
    }

    pub fn ln(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.ln_ref()))
    }

    pub fn acos(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.acos_ref()))
    }

    pub fn recip(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.recip_ref()))
    }

    pub fn square(&self) -> Self {
        Scalar(Float::with_val(self.prec(), self.0.square_ref()))
    }

    pub fn powi(&self, k: i32) -> Self {
        Scalar(Float::with_val(self.prec(), (&self.0).pow(k)))
    }

    /// Arithmetic-geometric mean.
    pub fn agm(&self, other: &Scalar) -> Self {
        let prec = self.prec().max(other.prec());
        Scalar(Float::with_val(prec, self.0.agm_ref(&other.0)))
    }

    pub fn max(self, other: Scalar) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Scalar) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// -1, 0 or +1.
    pub fn signum_i8(&self) -> i8 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    /// Total order used for sorting; NaN never occurs on checked paths.
    pub fn total_cmp(&self, other: &Scalar) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// Decimal digits needed to round-trip this precision.
    pub fn decimal_digits(&self) -> usize {
        (self.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
    }

    /// Precision-pinned decimal rendering used in every serialized document.
    pub fn to_decimal(&self) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        self.0.to_string_radix(10, Some(self.decimal_digits()))
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(20)))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(digits) => write!(f, "{}", self.0.to_string_radix(10, Some(digits.max(1)))),
            None => write!(f, "{}", self.to_decimal()),
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::from_f64(x)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_i64(n)
    }
}

impl From<i32> for Scalar {
    fn from(n: i32) -> Self {
        Scalar::from_i64(n as i64)
    }
}

impl PartialEq<f64> for Scalar {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Scalar {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                let prec = self.prec().max(rhs.prec());
                Scalar(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self $op &rhs
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                &self $op rhs
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                &self $op &rhs
            }
        }
        impl $tr<f64> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: f64) -> Scalar {
                Scalar(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<f64> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: f64) -> Scalar {
                &self $op rhs
            }
        }
        impl $tr<i64> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                Scalar(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<i64> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                &self $op rhs
            }
        }
        impl $tr<&Scalar> for f64 {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(Float::with_val(rhs.prec(), self $op &rhs.0))
            }
        }
        impl $tr<Scalar> for f64 {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self $op &rhs
            }
        }
        impl $tr<&Scalar> for i64 {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(Float::with_val(rhs.prec(), self $op &rhs.0))
            }
        }
        impl $tr<Scalar> for i64 {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self $op &rhs
            }
        }
        impl $assign_tr<&Scalar> for Scalar {
            fn $assign(&mut self, rhs: &Scalar) {
                *self = &*self $op rhs;
            }
        }
        impl $assign_tr<Scalar> for Scalar {
            fn $assign(&mut self, rhs: Scalar) {
                *self = &*self $op &rhs;
            }
        }
        impl $assign_tr<f64> for Scalar {
            fn $assign(&mut self, rhs: f64) {
                *self = &*self $op rhs;
            }
        }
        impl $assign_tr<i64> for Scalar {
            fn $assign(&mut self, rhs: i64) {
                *self = &*self $op rhs;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);
binop!(Div, div, DivAssign, div_assign, /);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(Float::with_val(self.prec(), -&self.0))
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string or a number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
                Scalar::parse(v).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                Scalar::from_f64(v).finite().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::from_i64(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                Ok(Scalar(Float::with_val(working_precision(), v)))
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

/// Maximum of `|x|` over an iterator, zero when empty.
pub fn max_abs<'a, I: IntoIterator<Item = &'a Scalar>>(values: I) -> Scalar {
    values
        .into_iter()
        .fold(Scalar::zero(), |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_at_default_precision() {
        let third = Scalar::ratio(1, 3);
        let back = &third * 3i64;
        assert!((back - 1i64).abs() < 1e-33);
        assert_eq!(third.prec(), DEFAULT_PRECISION);
    }

    #[test]
    fn cosine_of_integer_keeps_full_precision() {
        // cos(24) to 35 digits.
        let c = Scalar::from_i64(24).cos();
        let reference = Scalar::parse("0.42417900733699697594").unwrap();
        assert!((c - reference).abs() < 1e-20);
    }

    #[test]
    fn decimal_round_trip_is_exact() {
        let x = Scalar::pi() / 7i64;
        let y = Scalar::parse(&x.to_decimal()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn non_finite_is_rejected() {
        let inf = Scalar::one() / Scalar::zero();
        assert!(matches!(inf.finite(), Err(Error::NonFinite)));
        assert!(Scalar::parse("nan").is_err());
    }

    #[test]
    fn precision_bounds_are_enforced() {
        assert!(set_working_precision(20).is_err());
        assert!(set_working_precision(100_000).is_err());
    }

    #[test]
    fn serde_uses_decimal_strings() {
        let x = Scalar::ratio(3, 2);
        let json = serde_json::to_string(&x).unwrap();
        assert!(json.starts_with("\"1.5000000000"));
        let back: Scalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let from_number: Scalar = serde_json::from_str("2").unwrap();
        assert_eq!(from_number, 2.0);
    }
}
