//! Exact rational arithmetic with a word-sized fast path.
//!
//! Every value is kept reduced with a positive denominator. Values whose
//! numerator and denominator fit in `i64` are stored inline; anything larger
//! moves to a heap-allocated `BigRational`. Promotion and demotion are
//! automatic, so callers see a single arbitrary-precision type.

use alloc::boxed::Box;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone)]
enum Repr {
    // num, den: reduced, den > 0
    Small(i64, i64),
    // used only when the value does not fit Small
    Big(Box<BigRational>),
}

/// An exact rational number, always in lowest terms with positive denominator.
#[derive(Clone)]
pub struct Rational(Repr);

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

impl Rational {
    /// Builds `n / d`. Panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_i128_pair(n as i128, d as i128)
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    fn from_i128_pair(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Rational(Repr::Small(0, 1));
        }
        let g = gcd_i128(n.abs(), d);
        n /= g;
        d /= g;
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(sn), Ok(sd)) => Rational(Repr::Small(sn, sd)),
            _ => Rational(Repr::Big(Box::new(BigRational::new(
                BigInt::from(n),
                BigInt::from(d),
            )))),
        }
    }

    /// Wraps a `BigRational`, demoting to the inline form when it fits.
    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(r))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer_big(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom_big(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.numer().sign() == Sign::Minus,
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.numer().sign() == Sign::Plus,
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rational {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128_pair(*d as i128, *n as i128),
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    /// Nonnegative integer power by repeated squaring.
    pub fn pow(&self, exp: u32) -> Rational {
        let mut base = self.clone();
        let mut acc = Rational::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn floor_big(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(n.div_euclid(*d)),
            Repr::Big(b) => b.floor().to_integer(),
        }
    }

    pub fn ceil_big(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(-(-n).div_euclid(*d)),
            Repr::Big(b) => b.ceil().to_integer(),
        }
    }

    /// `⌊self⌋` as usize; `None` when negative or out of range.
    pub fn floor_usize(&self) -> Option<usize> {
        self.floor_big().to_usize()
    }

    /// `⌈self⌉` as usize; `None` when negative or out of range.
    pub fn ceil_usize(&self) -> Option<usize> {
        self.ceil_big().to_usize()
    }

    /// Exact value as usize if the rational is a representable nonnegative integer.
    pub fn to_usize_exact(&self) -> Option<usize> {
        if self.is_integer() {
            self.numer_big().to_usize()
        } else {
            None
        }
    }

    /// Nearest `f64`; for reporting only, never for decisions.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn min(self, other: Rational) -> Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Always renders as `p/q`, including `q = 1`.
    pub fn to_pq_string(&self) -> String {
        use alloc::format;
        match &self.0 {
            Repr::Small(n, d) => format!("{}/{}", n, d),
            Repr::Big(b) => format!("{}/{}", b.numer(), b.denom()),
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
            Repr::Small(n, d) => write!(f, "{}/{}", n, d),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        // canonical representation: a value is Small iff it fits
        match (&self.0, &other.0) {
            (Repr::Small(n1, d1), Repr::Small(n2, d2)) => n1 == n2 && d1 == d2,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
                (*n1 as i128 * *d2 as i128).cmp(&(*n2 as i128 * *d1 as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

macro_rules! small_binop {
    ($lhs:expr, $rhs:expr, $n1:ident, $d1:ident, $n2:ident, $d2:ident, $small:expr, $big:expr) => {
        match (&$lhs.0, &$rhs.0) {
            (Repr::Small($n1, $d1), Repr::Small($n2, $d2)) => $small,
            _ => {
                let a = $lhs.to_big();
                let b = $rhs.to_big();
                Rational::from_big($big(a, b))
            }
        }
    };
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        small_binop!(
            self,
            rhs,
            n1,
            d1,
            n2,
            d2,
            {
                let n = *n1 as i128 * *d2 as i128 + *n2 as i128 * *d1 as i128;
                let d = *d1 as i128 * *d2 as i128;
                Rational::from_i128_pair(n, d)
            },
            |a: BigRational, b: BigRational| a + b
        )
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        small_binop!(
            self,
            rhs,
            n1,
            d1,
            n2,
            d2,
            {
                let n = *n1 as i128 * *d2 as i128 - *n2 as i128 * *d1 as i128;
                let d = *d1 as i128 * *d2 as i128;
                Rational::from_i128_pair(n, d)
            },
            |a: BigRational, b: BigRational| a - b
        )
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        small_binop!(
            self,
            rhs,
            n1,
            d1,
            n2,
            d2,
            {
                // cross-reduce first so intermediates stay small
                let g1 = gcd_i128((*n1 as i128).abs(), *d2 as i128);
                let g2 = gcd_i128((*n2 as i128).abs(), *d1 as i128);
                let n = (*n1 as i128 / g1) * (*n2 as i128 / g2);
                let d = (*d1 as i128 / g2) * (*d2 as i128 / g1);
                Rational::from_i128_pair(n, d)
            },
            |a: BigRational, b: BigRational| a * b
        )
    }
}

impl Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        small_binop!(
            self,
            rhs,
            n1,
            d1,
            n2,
            d2,
            {
                let g1 = gcd_i128((*n1 as i128).abs(), (*n2 as i128).abs());
                let g2 = gcd_i128(*d2 as i128, *d1 as i128);
                let n = (*n1 as i128 / g1) * (*d2 as i128 / g2);
                let d = (*d1 as i128 / g2) * (*n2 as i128 / g1);
                Rational::from_i128_pair(n, d)
            },
            |a: BigRational, b: BigRational| a / b
        )
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational::from_i128_pair(-(*n as i128), *d as i128),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
        impl $assign_trait for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                *self = (&*self).$method(&rhs);
            }
        }
        impl $assign_trait<&Rational> for Rational {
            fn $assign_method(&mut self, rhs: &Rational) {
                *self = (&*self).$method(rhs);
            }
        }
    };
}

forward_owned!(Add, add, AddAssign, add_assign);
forward_owned!(Sub, sub, SubAssign, sub_assign);
forward_owned!(Mul, mul, MulAssign, mul_assign);
forward_owned!(Div, div, DivAssign, div_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        match i64::try_from(n) {
            Ok(v) => Rational::from_integer(v),
            Err(_) => Rational::from_big(BigRational::from_integer(BigInt::from(n))),
        }
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_big(BigRational::from_integer(n))
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl num_traits::Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl num_traits::One for Rational {
    fn one() -> Self {
        Rational::one()
    }
    fn is_one(&self) -> bool {
        Rational::is_one(self)
    }
}

/// Error from parsing a `p/q` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError;

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected an integer or p/q fraction")
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q` or a bare integer `p`, with optional sign, any size.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n = BigInt::from_str(num_str).map_err(|_| ParseRationalError)?;
        let d = BigInt::from_str(den_str).map_err(|_| ParseRationalError)?;
        if d.is_zero() {
            return Err(ParseRationalError);
        }
        Ok(Rational::from_big(BigRational::new(n, d)))
    }
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        acc = acc.lcm(&v.denom_big());
    }
    acc
}
