//! Exact Gaussian-rational arithmetic: complex numbers `a + b i` with
//! arbitrary-precision rational real and imaginary parts. Every coefficient
//! in the engine is one of these; no floating point exists anywhere.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// A Gaussian rational `re + im·i`. `BigRational` keeps both parts in lowest
/// terms with positive denominators, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRat::new(BigRational::one(), BigRational::zero())
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// `a/b + (c/d)i` from integer parts.
    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        assert!(re_den != 0 && im_den != 0, "zero denominator");
        GaussRat::new(
            BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True when the number lies in `Q` (no imaginary part).
    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus `re² + im²`, a plain rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self, CoreError> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let n = self.norm_sq();
        Ok(GaussRat::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = GaussRat::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Canonical literal, e.g. `-2`, `3/4`, `i`, `-1/2i`, `5-2i`.
    /// `Display` uses the same format; `parse` accepts exactly these.
    pub fn to_literal(&self) -> String {
        fn rat(r: &BigRational) -> String {
            if r.denom().is_one() {
                format!("{}", r.numer())
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        fn imag(r: &BigRational) -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", rat(r))
            }
        }
        if self.is_zero() {
            "0".to_string()
        } else if self.im.is_zero() {
            rat(&self.re)
        } else if self.re.is_zero() {
            imag(&self.im)
        } else if self.im.is_negative() {
            format!("{}{}", rat(&self.re), imag(&self.im))
        } else {
            format!("{}+{}", rat(&self.re), imag(&self.im))
        }
    }

    /// Parses the literal syntax shared with the DSL: rationals `p/q`,
    /// imaginary unit `i`, e.g. `-3/2+1/4i`.
    pub fn parse_literal(s: &str) -> Result<Self, CoreError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(CoreError::ScalarSyntax(s.to_string()));
        }
        // Split into at most two signed parts.
        let bytes = compact.as_bytes();
        let mut split = None;
        for (k, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[k - 1] != b'/' {
                split = Some(k);
            }
        }
        let (a, b) = match split {
            Some(k) => (&compact[..k], Some(&compact[k..])),
            None => (compact.as_str(), None),
        };
        let pa = Self::parse_signed_part(a, s)?;
        let out = match b {
            Some(bs) => {
                let pb = Self::parse_signed_part(bs, s)?;
                &pa + &pb
            }
            None => pa,
        };
        Ok(out)
    }

    fn parse_signed_part(part: &str, whole: &str) -> Result<Self, CoreError> {
        let err = || CoreError::ScalarSyntax(whole.to_string());
        let (neg, body) = match part.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, part.strip_prefix('+').unwrap_or(part)),
        };
        let (is_imag, body) = match body.strip_suffix('i') {
            Some(r) => (true, r),
            None => (false, body),
        };
        let mag: BigRational = if body.is_empty() {
            if is_imag {
                BigRational::one()
            } else {
                return Err(err());
            }
        } else if let Some((n, d)) = body.split_once('/') {
            let n: BigInt = n.parse().map_err(|_| err())?;
            let d: BigInt = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            BigRational::new(n, d)
        } else {
            let n: BigInt = body.parse().map_err(|_| err())?;
            BigRational::from_integer(n)
        };
        let mag = if neg { -mag } else { mag };
        Ok(if is_imag {
            GaussRat::new(BigRational::zero(), mag)
        } else {
            GaussRat::new(mag, BigRational::zero())
        })
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Div for &GaussRat {
    type Output = GaussRat;
    fn div(self, o: &GaussRat) -> GaussRat {
        self * &o.inv().expect("division by zero")
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl Serialize for GaussRat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_literal())
    }
}

impl<'de> Deserialize<'de> for GaussRat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GaussRat::parse_literal(&s).map_err(serde::de::Error::custom)
    }
}

/// Coefficient rings the exterior algebra is generic over: Gaussian rationals
/// for concrete computations, polynomials over them for genericity proofs.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    /// Embeds a Gaussian rational (structure constants live there).
    fn from_rat(r: &GaussRat) -> Self;
}

impl Scalar for GaussRat {
    fn zero() -> Self {
        GaussRat::zero()
    }
    fn one() -> Self {
        GaussRat::one()
    }
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn from_rat(r: &GaussRat) -> Self {
        r.clone()
    }
}
