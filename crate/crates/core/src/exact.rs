//! Exact integers, rationals, and polynomials in the formal degree `d`.
//!
//! Integers and rationals are the `num` types; everything here is exact and
//! nothing ever touches floating point.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use num_bigint::BigInt;

/// Reduced fraction of big integers with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("negative argument {0} is not allowed")]
    NegativeArgument(i64),
    #[error("duplicate interpolation abscissa {0}")]
    DuplicateAbscissa(String),
    #[error("cannot parse {0:?} as an exact number")]
    Parse(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_to_rat(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Parses `"p"` or `"p/q"`, reducing the result.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let s = s.trim();
    let err = || ExactError::Parse(s.to_string());
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| err()),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Returns the integer value if `r` has denominator 1.
pub fn to_integer(r: &Rational) -> Option<BigInt> {
    r.is_integer().then(|| r.to_integer())
}

/// `n!` for `n >= 0`.
pub fn factorial(n: i64) -> Result<BigInt, ExactError> {
    if n < 0 {
        return Err(ExactError::NegativeArgument(n));
    }
    Ok(factorial_u(n as u64))
}

pub(crate) fn factorial_u(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Binomial coefficient, zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> Result<BigInt, ExactError> {
    if n < 0 {
        return Err(ExactError::NegativeArgument(n));
    }
    Ok(binomial_u(n as u64, k))
}

pub(crate) fn binomial_u(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        // exact at every step: acc = C(n, i + 1) afterwards
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Polynomial in the formal variable `d` with rational coefficients, stored
/// densely in ascending degree with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPolyD {
    coeffs: Vec<Rational>,
}

impl UniPolyD {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `d`.
    pub fn d() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// `a d^2 + b d + c`
    pub fn quadratic(a: i64, b: i64, c: i64) -> Self {
        Self::from_ints(&[c, b, a])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, d: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * d + c)
    }

    pub fn eval_int(&self, d: i64) -> Rational {
        self.eval(&rat(d))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Unique polynomial of degree at most 2 through three points.
    pub fn interpolate_quadratic(points: &[(Rational, Rational); 3]) -> Result<Self, ExactError> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                if points[i].0 == points[j].0 {
                    return Err(ExactError::DuplicateAbscissa(points[i].0.to_string()));
                }
            }
        }
        let mut out = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Self::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    let factor = Self::from_coeffs(vec![-xj.clone(), Rational::one()]);
                    basis = &basis * &factor;
                    basis = basis.scale(&(Rational::one() / (xi - xj)));
                }
            }
            out = &out + &basis;
        }
        Ok(out)
    }
}

impl Add for &UniPolyD {
    type Output = UniPolyD;
    fn add(self, rhs: &UniPolyD) -> UniPolyD {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPolyD::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPolyD {
    type Output = UniPolyD;
    fn sub(self, rhs: &UniPolyD) -> UniPolyD {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPolyD::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPolyD {
    type Output = UniPolyD;
    fn mul(self, rhs: &UniPolyD) -> UniPolyD {
        if self.is_zero() || rhs.is_zero() {
            return UniPolyD::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPolyD::from_coeffs(out)
    }
}

impl Neg for &UniPolyD {
    type Output = UniPolyD;
    fn neg(self) -> UniPolyD {
        UniPolyD::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for UniPolyD {
            type Output = UniPolyD;
            fn $m(self, rhs: UniPolyD) -> UniPolyD {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Writes `c * <var>` with sign handling shared by every pretty-printer in the
/// crate: `first` controls whether a leading `+` is emitted.
pub(crate) fn write_term(
    f: &mut impl fmt::Write,
    c: &Rational,
    var: &str,
    first: bool,
) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    match (first, neg) {
        (true, true) => f.write_str("-")?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    if var.is_empty() {
        return write!(f, "{mag}");
    }
    if mag.is_one() {
        f.write_str(var)
    } else if mag.is_integer() {
        write!(f, "{mag}{var}")
    } else {
        write!(f, "({mag}){var}")
    }
}

impl fmt::Display for UniPolyD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "d".to_string(),
                _ => format!("d^{i}"),
            };
            write_term(f, c, &var, first)?;
            first = false;
        }
        Ok(())
    }
}

/// Coefficients serialize as an ascending array of `"p/q"` strings.
impl Serialize for UniPolyD {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniPolyD {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Self::from_coeffs(coeffs))
    }
}

/// Renders `r` rounded half away from zero to `places` decimals, computed
/// exactly on the integer numerator.
pub fn render_decimal(r: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = &scaled - Rational::from_integer(floor.clone());
    let rounded = if frac >= ratio(1, 2) { floor + 1 } else { floor };
    let int_part = &rounded / &scale;
    let frac_part = &rounded % &scale;
    let sign = if r.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int_part}");
    }
    let width = places as usize;
    format!("{sign}{int_part}.{:0>width$}", frac_part.to_string())
}
