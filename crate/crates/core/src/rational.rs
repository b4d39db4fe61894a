//! Exact rationals, rational enclosures of reals, and the small arithmetic
//! toolkit shared by the counting and density engines.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or an integer string. Decimal notation is rejected.
/// A leading U+2212 minus sign is accepted as `-`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let cleaned = text.trim().replace('\u{2212}', "-");
    let bad = || Error::InvalidParameter(format!("not a rational number: {text:?}"));
    let (numer, denom) = match cleaned.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (cleaned.as_str(), "1"),
    };
    let numer: BigInt = numer.parse().map_err(|_| bad())?;
    let denom: BigInt = denom.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(Error::InvalidParameter(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(numer, denom))
}

/// Nearest `f64`, for human-readable reports only.
pub fn approx(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `"p/q"` in lowest terms, or just `"p"` for integers.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(value: Rational) -> Self {
        Interval {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn zero() -> Self {
        Interval::point(Rational::zero())
    }

    pub fn one() -> Self {
        Interval::point(Rational::one())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, value: &Rational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn strictly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Largest absolute value over the interval.
    pub fn magnitude(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn scale(&self, factor: &Rational) -> Interval {
        let a = &self.lo * factor;
        let b = &self.hi * factor;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    /// Widens symmetrically by `radius >= 0`.
    pub fn widen(&self, radius: &Rational) -> Interval {
        Interval::new(&self.lo - radius, &self.hi + radius)
    }

    pub fn pow(&self, exp: u32) -> Interval {
        (0..exp).fold(Interval::one(), |acc, _| &acc * self)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

impl<'a> Add<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }
}

impl<'a> Sub<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }
}

impl<'a> Mul<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        if self.is_point() && rhs.is_point() {
            return Interval::point(&self.lo * &rhs.lo);
        }
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().cloned().unwrap();
        let hi = products.iter().max().cloned().unwrap();
        Interval::new(lo, hi)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

/// Exact `r`-th root of a nonnegative rational if it exists.
fn exact_root(value: &Rational, r: u32) -> Option<Rational> {
    let p = value.numer();
    let q = value.denom();
    let pr = p.nth_root(r);
    let qr = q.nth_root(r);
    if num_traits::pow(pr.clone(), r as usize) == *p && num_traits::pow(qr.clone(), r as usize) == *q
    {
        Some(Rational::new(pr, qr))
    } else {
        None
    }
}

/// Encloses the real odd root `sign(x)·|x|^{1/r}` in a dyadic interval whose
/// width is at most `2^{-bits}` times the root's magnitude. Perfect powers
/// come back as point intervals.
pub fn odd_root_enclosure(value: &Rational, r: u32, bits: u32) -> Interval {
    assert!(r % 2 == 1, "odd_root_enclosure needs an odd degree");
    if value.is_zero() {
        return Interval::zero();
    }
    let negative = value.is_negative();
    let magnitude = value.abs();
    let enclosure = match exact_root(&magnitude, r) {
        Some(root) => Interval::point(root),
        None => {
            let p = magnitude.numer();
            let q = magnitude.denom();
            // The root is at least 2^{(bits(p) - bits(q) - 1)/r}; pad the scale
            // so that one unit in the last place is below 2^{-bits} relative.
            let deficit = (q.bits() as i64 - p.bits() as i64 + 1).max(0) as u64;
            let shift = bits as u64 + deficit.div_ceil(r as u64) + 2;
            let scaled: BigInt = (p << (shift * r as u64)) / q;
            let floor_root = scaled.nth_root(r);
            let unit = Rational::new(BigInt::one(), BigInt::one() << shift);
            let lo = Rational::from_integer(floor_root) * &unit;
            let hi = &lo + &unit;
            Interval::new(lo, hi)
        }
    };
    if negative {
        -enclosure
    } else {
        enclosure
    }
}

/// Minimal arithmetic needed by the summation engines: exact rationals,
/// plain counts, and rational intervals all qualify.
pub trait Weight: Clone + Send + Sync {
    fn empty_sum() -> Self;
    fn empty_product() -> Self;
    fn vanishes(&self) -> bool;
    fn from_count(count: u64) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn add_assign_ref(&mut self, other: &Self);
}

impl Weight for Rational {
    fn empty_sum() -> Self {
        Zero::zero()
    }
    fn empty_product() -> Self {
        One::one()
    }
    fn vanishes(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn from_count(count: u64) -> Self {
        Rational::from_integer(count.into())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

impl Weight for u128 {
    fn empty_sum() -> Self {
        0
    }
    fn empty_product() -> Self {
        1
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn from_count(count: u64) -> Self {
        count as u128
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.checked_mul(*other).expect("count overflow")
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.checked_add(*other).expect("count overflow");
    }
}

impl Weight for Interval {
    fn empty_sum() -> Self {
        Interval::zero()
    }
    fn empty_product() -> Self {
        Interval::one()
    }
    fn vanishes(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
    fn from_count(count: u64) -> Self {
        Interval::point(Rational::from_integer(count.into()))
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self = &*self + other;
    }
}

impl Weight for BigInt {
    fn empty_sum() -> Self {
        Zero::zero()
    }
    fn empty_product() -> Self {
        One::one()
    }
    fn vanishes(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn from_count(count: u64) -> Self {
        count.into()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1").unwrap(), int(-1));
        assert_eq!(parse_rational("\u{2212}1").unwrap(), int(-1));
        assert_eq!(parse_rational("6/-4").unwrap(), rat(-3, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&rat(-8, 2)), "-4");
        assert_eq!(format_rational(&int(0)), "0");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 3), 4);
        assert_eq!(binomial(227, 3), 1_923_825);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn exact_odd_roots_are_points() {
        let root = odd_root_enclosure(&int(-8), 3, 128);
        assert_eq!(root, Interval::point(int(-2)));
        let root = odd_root_enclosure(&rat(1, 32), 5, 64);
        assert_eq!(root, Interval::point(rat(1, 2)));
        assert_eq!(odd_root_enclosure(&int(1), 3, 8), Interval::one());
    }

    #[test]
    fn inexact_roots_are_tight_enclosures() {
        for (value, r) in [(int(2), 3u32), (rat(-5, 7), 3), (rat(1, 1000), 5), (int(123457), 3)] {
            let root = odd_root_enclosure(&value, r, 128);
            assert!(!root.is_point());
            let cubed = root.pow(r);
            assert!(cubed.contains(&value), "{value} not in {cubed}");
            let rel = root.width() / root.magnitude();
            assert!(rel < Rational::new(BigInt::one(), BigInt::one() << 127));
        }
    }

    #[test]
    fn interval_products_enclose() {
        let a = Interval::new(int(-1), int(2));
        let b = Interval::new(int(-3), int(1));
        let p = &a * &b;
        assert_eq!(p, Interval::new(int(-6), int(3)));
        assert_eq!((&a - &b), Interval::new(int(-2), int(5)));
    }
}
