//! Exact rationals with a machine-word fast path.
//!
//! Values that fit in `i64/i64` stay small; anything that overflows is
//! promoted to a big rational and demoted again when it fits.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Clone, Debug)]
enum Repr {
    Small(Ratio<i64>),
    Big(Box<BigRational>),
}

/// An exact rational number, always in lowest terms.
#[derive(Clone, Debug)]
pub struct Rational(Repr);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

fn small_ok(r: &Ratio<i64>) -> bool {
    *r.numer() != i64::MIN && *r.denom() != i64::MIN
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(Ratio::from_integer(0)))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(Ratio::from_integer(1)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational::from_big(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n/d`; panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rational::from_big(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            let s = Ratio::new_raw(n, d);
            if small_ok(&s) {
                return Rational(Repr::Small(s));
            }
        }
        Rational(Repr::Big(Box::new(r)))
    }

    fn from_small(r: Ratio<i64>) -> Self {
        if small_ok(&r) {
            Rational(Repr::Small(r))
        } else {
            Rational(Repr::Big(Box::new(to_big(&r))))
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => to_big(r),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.numer()),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.denom()),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.numer().is_zero(),
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.denom() == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(r) => Rational::from_small(Ratio::from_integer(r.numer().div_floor(r.denom()))),
            Repr::Big(b) => Rational::from_big(b.floor()),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(r) => Rational::from_small(r.recip()),
            Repr::Big(b) => Rational::from_big(b.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(r) => {
                if r.numer().unsigned_abs() < (1u64 << 53) && r.denom().unsigned_abs() < (1u64 << 53) {
                    *r.numer() as f64 / *r.denom() as f64
                } else {
                    to_big(r).to_f64().unwrap_or(f64::NAN)
                }
            }
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Exact value of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational::from_big)
    }

    /// Integer value when this is an integer fitting in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(r) if *r.denom() == 1 => Some(*r.numer()),
            Repr::Small(_) => None,
            Repr::Big(b) if b.is_integer() => b.numer().to_i64(),
            Repr::Big(_) => None,
        }
    }

    pub fn pow2(&self) -> Self {
        self * self
    }
}

fn to_big(r: &Ratio<i64>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

macro_rules! binop {
    ($fn_name:ident, $checked:ident, $op:tt) => {
        fn $fn_name(a: &Rational, b: &Rational) -> Rational {
            if let (Repr::Small(x), Repr::Small(y)) = (&a.0, &b.0) {
                if let Some(r) = x.$checked(y) {
                    return Rational::from_small(r);
                }
            }
            Rational::from_big(a.to_big() $op b.to_big())
        }
    };
}

binop!(add_impl, checked_add, +);
binop!(sub_impl, checked_sub, -);
binop!(mul_impl, checked_mul, *);

fn div_impl(a: &Rational, b: &Rational) -> Rational {
    assert!(!b.is_zero(), "division by zero");
    if let (Repr::Small(x), Repr::Small(y)) = (&a.0, &b.0) {
        if let Some(r) = x.checked_div(y) {
            return Rational::from_small(r);
        }
    }
    Rational::from_big(a.to_big() / b.to_big())
}

macro_rules! forward_ops {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $imp(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $imp(&self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $imp(&self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $imp(self, &rhs)
            }
        }
    };
}

forward_ops!(Add, add, add_impl);
forward_ops!(Sub, sub, sub_impl);
forward_ops!(Mul, mul, mul_impl);
forward_ops!(Div, div, div_impl);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(r) => Rational::from_small(-*r),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            // normalized: a small value never equals a big one
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(r) => {
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Repr::Big(b) => {
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => {
                let l = *a.numer() as i128 * *b.denom() as i128;
                let r = *b.numer() as i128 * *a.denom() as i128;
                l.cmp(&r)
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_small(Ratio::from_integer(n))
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from(n as i64)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        match i64::try_from(n) {
            Ok(v) => Rational::from(v),
            Err(_) => Rational::from_big(BigRational::from_integer(BigInt::from(n))),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Repr::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

/// Parses `-3/2`, `7`, `+4`, or an exact decimal such as `0.125` or `-.5`.
impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        if body.is_empty() {
            return Err(err());
        }
        let digits = |x: &str| !x.is_empty() && x.bytes().all(|c| c.is_ascii_digit());
        let value = if let Some((n, d)) = body.split_once('/') {
            if !digits(n) || !digits(d) {
                return Err(err());
            }
            let n: BigInt = n.parse().map_err(|_| err())?;
            let d: BigInt = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            BigRational::new(n, d)
        } else if let Some((ip, fp)) = body.split_once('.') {
            if (ip.is_empty() && fp.is_empty())
                || !(ip.is_empty() || digits(ip))
                || !(fp.is_empty() || digits(fp))
            {
                return Err(err());
            }
            let whole = format!("{}{}", ip, fp);
            let n: BigInt = if whole.is_empty() { BigInt::zero() } else { whole.parse().map_err(|_| err())? };
            let d = num_traits::pow(BigInt::from(10), fp.len());
            BigRational::new(n, d)
        } else {
            if !digits(body) {
                return Err(err());
            }
            BigRational::from_integer(body.parse().map_err(|_| err())?)
        };
        let value = if neg { -value } else { value };
        Ok(Rational::from_big(value))
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}
