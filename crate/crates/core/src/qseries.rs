//! Truncated power series in `q` over exact rationals, the quasi-modular
//! inputs of the Göttsche–Yau–Zaslow generating function, and the recovery of
//! the unknown series `B₁`, `B₂` from the node-polynomial table.
//!
//! # Channel decomposition
//!
//! Writing `t = DG₂` and `a_l = (-1)^{l-1}(l-1)!(D_l ∂ + E_l k + F_l s + G_l x)`,
//! the left-hand side of the generating function is
//! `Σ_r Z_r t^r = exp(Σ_l a_l t^l / l!)`, so its logarithm is
//! `Σ_l (-1)^{l-1}(D_l ∂ + E_l k + F_l s + G_l x) t^l / l`.
//!
//! On the right, Riemann–Roch and Noether give
//! `χ(L) = (∂ - k)/2 + χ(O_S)` and `χ(O_S) = (s + x)/12`. Taking logarithms
//! and matching the coefficient of each Chern number:
//!
//! | channel | identity |
//! |---------|----------|
//! | `∂` | `Σ (-1)^{l-1} D_l t^l/l = ½ log(DG₂/q)` |
//! | `k` | `Σ (-1)^{l-1} E_l t^l/l = -½ log(DG₂/q) + log B₂` |
//! | `s` | `Σ (-1)^{l-1} F_l t^l/l = 1/12 log(DG₂/q) + log B₁ - 1/24 log(ΔD²G₂/q²)` |
//! | `x` | `Σ (-1)^{l-1} G_l t^l/l = 1/12 log(DG₂/q) - 1/24 log(ΔD²G₂/q²)` |
//!
//! The `∂` and `x` rows involve only known series and are genuine checks of
//! the table. The `k` row defines `log B₂`. Subtracting the `x` row from the
//! `s` row defines `log B₁ = Σ (-1)^{l-1}(F_l - G_l) t^l / l`; consequently the
//! `s` residual (after subtracting that `log B₁`) coincides with the `x`
//! residual.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bell::bell_transform;
use crate::enumerator::{ATable, EnumeratorError};
use crate::exact::{rat, ratio, BigInt, Rational};

/// Truncation order used when none is given.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("exp needs a zero constant term, found {0}")]
    NonZeroConstant(String),
    #[error("log needs constant term 1, found {0}")]
    NonUnitConstant(String),
    #[error("series is not invertible (zero constant term)")]
    NotInvertible,
    #[error("series is not divisible by q^{0}")]
    NotDivisible(usize),
    #[error("substituted series must have zero constant term")]
    BadSubstitution,
    #[error("order {requested} needs table rows beyond a_{available}")]
    TableExhausted { requested: usize, available: usize },
    #[error("unknown channel {0:?} (expected one of d, k, s, x)")]
    UnknownChannel(String),
    #[error(transparent)]
    Table(#[from] EnumeratorError),
}

/// Coefficients `c_0 … c_T` of a series known modulo `q^{T+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// `coeffs.len() - 1` becomes the truncation order; an empty vector is
    /// treated as the zero series of order 0.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c q^n`, or zero if `n` exceeds the order.
    pub fn monomial(n: usize, c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if n <= order {
            s.coeffs[n] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `None` beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Option<&Rational> {
        self.coeffs.get(n)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `D = q d/dq`
    pub fn d_operator(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * rat(n as i64))
                .collect(),
        }
    }

    /// Divides by `q^k`; the order drops by `k`.
    pub fn shift_down(&self, k: usize) -> Result<Self, SeriesError> {
        if k > self.order() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(SeriesError::NotDivisible(k));
        }
        Ok(Self { coeffs: self.coeffs[k..].to_vec() })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = Rational::one() / c0;
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        out[0] = inv0.clone();
        for n in 1..out.len() {
            let s: Rational = (1..=n).map(|k| &self.coeffs[k] * &out[n - k]).sum();
            out[n] = -s * &inv0;
        }
        Ok(Self { coeffs: out })
    }

    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonZeroConstant(self.coeffs[0].to_string()));
        }
        // n b_n = Σ_{k=1}^{n} k a_k b_{n-k}
        let mut b = vec![Rational::zero(); self.coeffs.len()];
        b[0] = Rational::one();
        for n in 1..b.len() {
            let s: Rational = (1..=n)
                .map(|k| rat(k as i64) * &self.coeffs[k] * &b[n - k])
                .sum();
            b[n] = s / rat(n as i64);
        }
        Ok(Self { coeffs: b })
    }

    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::NonUnitConstant(self.coeffs[0].to_string()));
        }
        // D log u = Du / u
        let w = &self.d_operator() * &self.inverse()?;
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        for n in 1..out.len() {
            out[n] = &w.coeffs[n] / rat(n as i64);
        }
        Ok(Self { coeffs: out })
    }

    /// `self(t)` for a series `t` without constant term, via Horner.
    pub fn compose(&self, t: &PowerSeries) -> Result<Self, SeriesError> {
        if !t.coeffs[0].is_zero() {
            return Err(SeriesError::BadSubstitution);
        }
        let order = self.order().min(t.order());
        let t = t.truncate(order);
        let mut acc = Self::zero(order);
        for c in self.coeffs[..=order].iter().rev() {
            acc = &acc * &t;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }
}

fn zip_with(a: &PowerSeries, b: &PowerSeries, f: impl Fn(&Rational, &Rational) -> Rational) -> PowerSeries {
    let order = a.order().min(b.order());
    PowerSeries {
        coeffs: (0..=order).map(|i| f(&a.coeffs[i], &b.coeffs[i])).collect(),
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=order - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PowerSeries { coeffs: out }
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(&rat(-1))
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let var = match n {
                0 => String::new(),
                1 => "q".into(),
                _ => format!("q^{n}"),
            };
            crate::exact::write_term(f, c, &var, first)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

/// JSON array of `"p/q"` strings, ascending in the power of `q`.
impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        v.serialize(s)
    }
}

fn divisor_sum(n: usize) -> i64 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| d as i64).sum()
}

/// `G₂ = -1/24 + Σ σ(n) qⁿ`
pub fn eisenstein_g2(order: usize) -> PowerSeries {
    let mut coeffs = vec![ratio(-1, 24)];
    coeffs.extend((1..=order).map(|n| rat(divisor_sum(n))));
    PowerSeries::new(coeffs)
}

/// `Δ = q Π_{m≥1} (1 - q^m)^24`
pub fn discriminant(order: usize) -> PowerSeries {
    // accumulate Π (1 - q^m)^24 as integers, then shift by q
    let mut prod = vec![BigInt::zero(); order + 1];
    prod[0] = BigInt::one();
    for m in 1..=order {
        for _ in 0..24 {
            for i in (m..=order).rev() {
                let v = prod[i - m].clone();
                prod[i] -= v;
            }
        }
    }
    let mut coeffs = vec![Rational::zero(); order + 1];
    for n in 1..=order {
        coeffs[n] = Rational::from_integer(prod[n - 1].clone());
    }
    PowerSeries::new(coeffs)
}

pub fn d_operator(s: &PowerSeries) -> PowerSeries {
    s.d_operator()
}

pub fn series_exp(s: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    s.exp()
}

pub fn series_log(s: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    s.log()
}

pub fn series_pow(s: &PowerSeries, r: u32) -> PowerSeries {
    s.pow(r)
}

pub fn series_mul(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    a * b
}

/// `DG₂ = Σ n σ(n) qⁿ`
pub fn dg2(order: usize) -> PowerSeries {
    eisenstein_g2(order).d_operator()
}

/// `y_r(n)`: coefficient of `qⁿ` in `(DG₂)^r`.
pub fn dg2_power_coeff(r: u32, n: usize) -> Rational {
    dg2(n).pow(r).coeffs[n].clone()
}

/// `log(DG₂/q)` through `q^order`.
pub fn log_dg2_over_q(order: usize) -> PowerSeries {
    dg2(order + 1)
        .shift_down(1)
        .and_then(|s| s.log())
        .expect("DG2/q = 1 + 6q + ...")
}

/// `log(Δ·D²G₂/q²)` through `q^order`.
pub fn log_delta_d2g2_over_q2(order: usize) -> PowerSeries {
    let d2g2 = eisenstein_g2(order + 2).d_operator().d_operator();
    let prod = &discriminant(order + 2) * &d2g2;
    prod.shift_down(2)
        .and_then(|s| s.log())
        .expect("Δ·D²G₂/q² = 1 - 12q + ...")
}

/// One of the four Chern-number channels of the log generating function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    /// `∂ = L²`
    Partial,
    /// `k = L·K`
    K,
    /// `s = K²`
    S,
    /// `x = c₂`
    X,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::Partial, Channel::K, Channel::S, Channel::X];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Partial => "d",
            Channel::K => "k",
            Channel::S => "s",
            Channel::X => "x",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = SeriesError;
    fn from_str(s: &str) -> Result<Self, SeriesError> {
        match s.trim() {
            "d" | "∂" | "partial" => Ok(Channel::Partial),
            "k" => Ok(Channel::K),
            "s" => Ok(Channel::S),
            "x" => Ok(Channel::X),
            other => Err(SeriesError::UnknownChannel(other.to_string())),
        }
    }
}

fn check_order(order: usize, table: &ATable) -> Result<(), SeriesError> {
    if order > table.len() {
        return Err(SeriesError::TableExhausted { requested: order, available: table.len() });
    }
    Ok(())
}

/// Weights `w_l = (-1)^{l-1} X_l / l` for `l = 1..=order` as a series in `t`.
fn log_weights(order: usize, coeff: impl Fn(usize) -> Result<BigInt, EnumeratorError>) -> Result<PowerSeries, SeriesError> {
    let mut coeffs = vec![Rational::zero(); order + 1];
    for l in 1..=order {
        let sign = if l % 2 == 1 { 1 } else { -1 };
        coeffs[l] = Rational::new(coeff(l)? * sign, BigInt::from(l));
    }
    Ok(PowerSeries::new(coeffs))
}

/// `Σ_l (-1)^{l-1} X_l (DG₂)^l / l` with `X` selected by `channel`.
pub fn channel_log_side(channel: Channel, order: usize, table: &ATable) -> Result<PowerSeries, SeriesError> {
    check_order(order, table)?;
    let w = log_weights(order, |l| Ok(table.form(l)?.coefficient(channel).clone()))?;
    w.compose(&dg2(order))
}

/// `log B₁ = Σ_n c_n qⁿ` with `c_n = Σ_r y_r(n)(-1)^{r-1}(F_r - G_r)/r`.
pub fn recover_log_b1(order: usize, table: &ATable) -> Result<PowerSeries, SeriesError> {
    check_order(order, table)?;
    let t = dg2(order);
    let powers: Vec<PowerSeries> = (0..=order as u32).map(|r| t.pow(r)).collect();
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        for r in 1..=n {
            let form = table.form(r)?;
            let sign = if r % 2 == 1 { 1 } else { -1 };
            let weight = Rational::new((&form.f - &form.g) * sign, BigInt::from(r));
            *c += &powers[r].coeffs[n] * weight;
        }
    }
    Ok(PowerSeries::new(coeffs))
}

/// `log B₁` by substituting `t = DG₂` into `Σ (-1)^{l-1}(F_l - G_l) t^l / l`.
pub fn recover_log_b1_by_substitution(order: usize, table: &ATable) -> Result<PowerSeries, SeriesError> {
    check_order(order, table)?;
    let w = log_weights(order, |l| {
        let form = table.form(l)?;
        Ok(&form.f - &form.g)
    })?;
    w.compose(&dg2(order))
}

pub fn recover_b1(order: usize, table: &ATable) -> Result<PowerSeries, SeriesError> {
    let log = recover_log_b1(order, table)?;
    Ok(PowerSeries::new(bell_transform(&log.coeffs[1..])))
}

/// `log B₂ = ½ log(DG₂/q) + Σ (-1)^{l-1} E_l (DG₂)^l / l`.
pub fn recover_log_b2(order: usize, table: &ATable) -> Result<PowerSeries, SeriesError> {
    let side = channel_log_side(Channel::K, order, table)?;
    Ok(&side + &log_dg2_over_q(order).scale(&ratio(1, 2)))
}

pub fn recover_b2(order: usize, table: &ATable) -> Result<PowerSeries, SeriesError> {
    let log = recover_log_b2(order, table)?;
    Ok(PowerSeries::new(bell_transform(&log.coeffs[1..])))
}

/// Left-hand log side minus right-hand log side for one channel. The `∂` and
/// `x` residuals vanish exactly when the table agrees with the generating
/// function; `k` vanishes by construction of `log B₂`, and `s` equals the `x`
/// residual (see module docs).
pub fn gyz_channel_residual(channel: Channel, order: usize, table: &ATable) -> Result<PowerSeries, SeriesError> {
    let lhs = channel_log_side(channel, order, table)?;
    let ldg = log_dg2_over_q(order);
    let ldelta = log_delta_d2g2_over_q2(order);
    let rhs = match channel {
        Channel::Partial => ldg.scale(&ratio(1, 2)),
        Channel::K => &ldg.scale(&ratio(-1, 2)) + &recover_log_b2(order, table)?,
        Channel::S => {
            let base = &ldg.scale(&ratio(1, 12)) - &ldelta.scale(&ratio(1, 24));
            &base + &recover_log_b1(order, table)?
        }
        Channel::X => &ldg.scale(&ratio(1, 12)) - &ldelta.scale(&ratio(1, 24)),
    };
    Ok(&lhs - &rhs)
}

/// Indices `n` with a non-zero residual coefficient.
pub fn residual_support(residual: &PowerSeries) -> Vec<usize> {
    residual
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, _)| n)
        .collect()
}
