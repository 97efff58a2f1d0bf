use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Arbitrary-precision exact rational. All densities, thresholds and verdict
/// comparisons in this crate go through this type; serialized as a `"p/q"`
/// string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i32) -> Self {
        Rational(self.0.pow(exp))
    }

    /// Smallest integer `>= self`.
    pub fn ceil_int(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Largest integer `<= self`.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `"p/q"` or a bare integer `"p"`. Decimal notation is rejected:
    /// thresholds must be exact.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('.') {
            return Err(Error::parse(format!(
                "decimal rationals are rejected, use p/q form: {s:?}"
            )));
        }
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|e| Error::parse(format!("bad numerator {num:?}: {e}")))?;
        let den: BigInt = den
            .parse()
            .map_err(|e| Error::parse(format!("bad denominator {den:?}: {e}")))?;
        if den.is_zero() {
            return Err(Error::parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

/// A comparison threshold of the form `scale * base^(1/root)`.
///
/// Fractional powers of a rational are irrational in general, so they are
/// never materialized; comparisons against a rational `r` are decided by
/// comparing integer powers (`(r/scale)^root` vs `base`), which keeps every
/// verdict exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    pub scale: Rational,
    pub base: Rational,
    pub root: u32,
}

impl Threshold {
    /// Plain rational threshold.
    pub fn exact(eps: Rational) -> Self {
        Threshold {
            scale: Rational::one(),
            base: eps,
            root: 1,
        }
    }

    /// `base^(1/root)`.
    pub fn root_of(base: Rational, root: u32) -> Self {
        assert!(root >= 1);
        assert!(!base.is_negative(), "root of a negative rational");
        Threshold {
            scale: Rational::one(),
            base,
            root,
        }
    }

    /// `scale * base^(1/root)`.
    pub fn scaled_root(scale: Rational, base: Rational, root: u32) -> Self {
        assert!(root >= 1);
        assert!(!base.is_negative(), "root of a negative rational");
        assert!(!scale.is_negative(), "negative scale");
        Threshold { scale, base, root }
    }

    /// Compares a nonnegative rational `r` with this threshold value.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        debug_assert!(!r.is_negative());
        if self.root == 1 {
            return r.cmp(&(&self.scale * &self.base));
        }
        if self.scale.is_zero() {
            return if r.is_zero() {
                Ordering::Equal
            } else {
                Ordering::Greater
            };
        }
        // r vs s*b^(1/k)  <=>  (r/s)^k vs b, all quantities nonnegative.
        let lhs = (r / &self.scale).pow(self.root as i32);
        lhs.cmp(&self.base)
    }

    pub fn le(&self, r: &Rational) -> bool {
        self.cmp_rational(r) != Ordering::Less
    }

    pub fn lt(&self, r: &Rational) -> bool {
        self.cmp_rational(r) == Ordering::Greater
    }

    /// True when the threshold value exceeds 1, which makes every density
    /// comparison vacuous.
    pub fn exceeds_one(&self) -> bool {
        self.cmp_rational(&Rational::one()) == Ordering::Less
    }

    /// Smallest integer `m >= threshold * n` with `0 <= m <= n`, i.e. the
    /// minimum admissible subset size of an `n`-element side. Returns `n + 1`
    /// when the threshold pushes past the whole side (no admissible subset).
    pub fn min_subset_size(&self, n: usize) -> usize {
        if self.root == 1 {
            let v = &self.scale * &self.base * Rational::from(n);
            if v.is_negative() {
                return 0;
            }
            let c = v.ceil_int();
            return c.to_usize().unwrap_or(n + 1).min(n + 1);
        }
        // Smallest m with m >= (s*n) * b^(1/k); sides are small, scan.
        let scaled = Threshold {
            scale: &self.scale * &Rational::from(n),
            base: self.base.clone(),
            root: self.root,
        };
        for m in 0..=n {
            if scaled.cmp_rational(&Rational::from(m)) != Ordering::Less {
                return m;
            }
        }
        n + 1
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root == 1 {
            let v = &self.scale * &self.base;
            write!(f, "{v}")
        } else if self.scale.is_one() {
            write!(f, "({})^(1/{})", self.base, self.root)
        } else {
            write!(f, "{}*({})^(1/{})", self.scale, self.base, self.root)
        }
    }
}
