//! Exact arithmetic in Q and Q(i), the coefficient field of the whole pipeline.
//!
//! Every downstream computation (series products, linear solves, the CK
//! recursion) stays inside Q(i), so residuals can be required to be
//! exactly zero rather than small.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number. `BigRational` keeps the canonical form
/// (positive denominator, reduced fraction) after every operation.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from(BigInt::from(n))
}

/// Canonical text form of a rational: `p` when the denominator is 1,
/// otherwise `p/q` with `q > 0`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Parse(s.to_string()));
    }
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n).map_err(|_| Error::Parse(s.to_string()))?;
            let d = BigInt::from_str(d).map_err(|_| Error::Parse(s.to_string()))?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n = BigInt::from_str(&t).map_err(|_| Error::Parse(s.to_string()))?;
            Ok(BigRational::from(n))
        }
    }
}

/// An element of Q(i), stored as exact real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// Shorthand for (a/b) + (c/d)i.
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussianRational { re: rat(a, b), im: rat(c, d) }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        GaussianRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|^2 = z * conj(z), always a rational.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sq();
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// True iff the value is a strictly positive real number.
    pub fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                $trait::$method(&self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::div(self, rhs).expect("division by zero")
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_term = |im: &Rational| -> String {
            if im.is_one() {
                "i".to_string()
            } else if (-im).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", format_rational(im))
            }
        };
        if self.im.is_zero() {
            write!(f, "{}", format_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}", im_term(&self.im))
        } else if self.im.is_positive() {
            write!(f, "{}+{}", format_rational(&self.re), im_term(&self.im))
        } else {
            write!(f, "{}{}", format_rational(&self.re), im_term(&self.im))
        }
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `p/q`, `r/s*i`, `p/q+r/s*i`, bare `i`/`-i`, and `3i` style
    /// terms; whitespace-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse(s.to_string()));
        }
        // Split into at most two signed terms. A sign begins a new term
        // unless it is the leading character or follows '/'.
        let bytes = t.as_bytes();
        let mut split = None;
        for (k, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[k - 1] != b'/' {
                if split.is_some() {
                    return Err(Error::Parse(s.to_string()));
                }
                split = Some(k);
            }
        }
        let (first, second) = match split {
            Some(k) => (&t[..k], Some(&t[k..])),
            None => (&t[..], None),
        };
        let mut out = GaussianRational::zero();
        let (mut seen_re, mut seen_im) = (false, false);
        for term in std::iter::once(first).chain(second) {
            let (body, imag) = match term.strip_suffix('i') {
                Some(rest) => (rest.strip_suffix('*').unwrap_or(rest), true),
                None => (term, false),
            };
            let value = if imag && (body.is_empty() || body == "+") {
                Rational::one()
            } else if imag && body == "-" {
                -Rational::one()
            } else {
                parse_rational(body)?
            };
            if imag {
                if seen_im {
                    return Err(Error::Parse(s.to_string()));
                }
                seen_im = true;
                out.im = value;
            } else {
                if seen_re {
                    return Err(Error::Parse(s.to_string()));
                }
                seen_re = true;
                out.re = value;
            }
        }
        Ok(out)
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = GaussianRational;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a Gaussian rational string like \"1/2+1/3*i\" or an integer")
            }
            fn visit_str<E: serde::de::Error>(self, s: &str) -> std::result::Result<Self::Value, E> {
                s.parse().map_err(serde::de::Error::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, n: i64) -> std::result::Result<Self::Value, E> {
                Ok(GaussianRational::from_int(n))
            }
            fn visit_u64<E: serde::de::Error>(self, n: u64) -> std::result::Result<Self::Value, E> {
                i64::try_from(n)
                    .map(GaussianRational::from_int)
                    .map_err(serde::de::Error::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}
