//! Truncated intersection-ring arithmetic on `F = S × Y`, `Y = |L|`.
//!
//! The general-surface ring is generated by `L`, `K`, `H` (weight 1) and the
//! second Chern class `x` (weight 2). Monomials whose surface part `L^a K^b x^c`
//! has weight `a + b + 2c > 2` vanish, as do powers of `H` beyond a cap.
//! Pushing down to `Y` and integrating against `H^{N-n}` reads the `H^n`
//! coefficient and sends `L², LK, K², x` to `∂, k, s, x`.
//!
//! [`P2Class`] is the same computation on `P²` with hyperplane class `l`,
//! `l³ = 0`, and the degree `d` kept as a formal variable.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bell::{eval_complete_bell, BellError};
use crate::exact::{binomial, factorial_u, int_to_rat, rat, ratio, to_integer, BigInt, Rational, UniPolyD};
use crate::partition::{enumerate_partitions, SetPartition};
use crate::surface::ChernNumbers;

pub const DEFAULT_H_CAP: u32 = 16;
/// Largest `n` for which `Q_n` is offered.
pub const MAX_Q_INDEX: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChowError {
    #[error("index {n} outside {min}..={max}")]
    IndexOutOfRange { n: usize, min: usize, max: usize },
    #[error("H^{n} exceeds the truncation cap {cap}")]
    BeyondCap { n: u32, cap: u32 },
    #[error("class with constant term zero is not invertible")]
    NotInvertible,
    #[error("no correction formula for C_{0} (known only for n <= 4)")]
    NoCorrectionFormula(usize),
    #[error("multiple-point formula only for 1 <= r <= 4, got {0}")]
    MultiplePointRange(usize),
    #[error(transparent)]
    Bell(#[from] BellError),
}

fn check_q_index(n: usize) -> Result<(), ChowError> {
    if n == 0 || n > MAX_Q_INDEX {
        return Err(ChowError::IndexOutOfRange { n, min: 1, max: MAX_Q_INDEX });
    }
    Ok(())
}

/// `L^l K^k x^x H^h`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub l: u32,
    pub k: u32,
    pub x: u32,
    pub h: u32,
}

impl Monomial {
    pub const fn new(l: u32, k: u32, x: u32, h: u32) -> Self {
        Self { l, k, x, h }
    }

    pub fn surface_degree(&self) -> u32 {
        self.l + self.k + 2 * self.x
    }

    pub fn degree(&self) -> u32 {
        self.surface_degree() + self.h
    }

    fn times(&self, o: &Self) -> Self {
        Self::new(self.l + o.l, self.k + o.k, self.x + o.x, self.h + o.h)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("L", self.l), ("K", self.k), ("x", self.x), ("H", self.h)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Element of the truncated ring in `L, K, x, H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedClass {
    cap: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedClass {
    pub fn zero(cap: u32) -> Self {
        Self { cap, terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, c: Rational, cap: u32) -> Self {
        let mut g = Self::zero(cap);
        g.add_term(m, c);
        g
    }

    pub fn constant(c: Rational, cap: u32) -> Self {
        Self::monomial(Monomial::new(0, 0, 0, 0), c, cap)
    }

    pub fn one(cap: u32) -> Self {
        Self::constant(Rational::one(), cap)
    }

    #[allow(non_snake_case)]
    pub fn L(cap: u32) -> Self {
        Self::monomial(Monomial::new(1, 0, 0, 0), Rational::one(), cap)
    }

    #[allow(non_snake_case)]
    pub fn K(cap: u32) -> Self {
        Self::monomial(Monomial::new(0, 1, 0, 0), Rational::one(), cap)
    }

    pub fn x(cap: u32) -> Self {
        Self::monomial(Monomial::new(0, 0, 1, 0), Rational::one(), cap)
    }

    #[allow(non_snake_case)]
    pub fn H(cap: u32) -> Self {
        Self::monomial(Monomial::new(0, 0, 0, 1), Rational::one(), cap)
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || m.surface_degree() > 2 || m.h > self.cap {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Homogeneous part of total weight `k`.
    pub fn degree_part(&self, k: u32) -> Self {
        Self {
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.cap);
        for (m, c) in &self.terms {
            out.add_term(*m, c * s);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.cap);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Inverse of a class with non-zero constant term, by the geometric
    /// series in its positive-degree part.
    pub fn inverse(&self) -> Result<Self, ChowError> {
        let c0 = self.coeff(Monomial::new(0, 0, 0, 0));
        if c0.is_zero() {
            return Err(ChowError::NotInvertible);
        }
        let inv0 = Rational::one() / &c0;
        // self = c0 (1 + n), n without constant term
        let n = &self.scale(&inv0) - &Self::one(self.cap);
        let mut out = Self::one(self.cap);
        let mut power = Self::one(self.cap);
        let mut sign = Rational::one();
        for _ in 0..(self.cap + 2) {
            power = &power * &n;
            if power.is_zero() {
                break;
            }
            sign = -sign;
            out = &out + &power.scale(&sign);
        }
        Ok(out.scale(&inv0))
    }

    /// `K → -3l`, `x → 3l²`, `L → d·l`.
    pub fn specialize_p2(&self) -> P2Class {
        let mut out = P2Class::zero(self.cap);
        for (m, c) in &self.terms {
            let mut coeff = UniPolyD::constant(c.clone());
            coeff = &coeff * &UniPolyD::d().pow(m.l);
            coeff = coeff.scale(&num_traits::pow(rat(-3), m.k as usize));
            coeff = coeff.scale(&num_traits::pow(rat(3), m.x as usize));
            out.add_term(m.surface_degree(), m.h, coeff);
        }
        out
    }
}

impl Add for &GradedClass {
    type Output = GradedClass;
    fn add(self, rhs: &GradedClass) -> GradedClass {
        let mut out = self.clone();
        out.cap = self.cap.min(rhs.cap);
        out.terms.retain(|m, _| m.h <= out.cap);
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &GradedClass {
    type Output = GradedClass;
    fn sub(self, rhs: &GradedClass) -> GradedClass {
        self + &rhs.scale(&rat(-1))
    }
}

impl Neg for &GradedClass {
    type Output = GradedClass;
    fn neg(self) -> GradedClass {
        self.scale(&rat(-1))
    }
}

impl Mul for &GradedClass {
    type Output = GradedClass;
    fn mul(self, rhs: &GradedClass) -> GradedClass {
        let mut out = GradedClass::zero(self.cap.min(rhs.cap));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let var = if m.degree() == 0 { String::new() } else { m.to_string() };
            crate::exact::write_term(f, c, &var, i == 0)?;
        }
        Ok(())
    }
}

/// JSON object keyed by monomial strings such as `"L^2*H^3"`.
impl Serialize for GradedClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            map.serialize_entry(&m.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

/// `ξ = (L+H)³ + K(L+H)² + x(L+H)`
pub fn critical_class() -> GradedClass {
    critical_class_with_cap(DEFAULT_H_CAP)
}

pub fn critical_class_with_cap(cap: u32) -> GradedClass {
    let v = &GradedClass::L(cap) + &GradedClass::H(cap);
    let v2 = &v * &v;
    let v3 = &v2 * &v;
    &(&v3 + &(&GradedClass::K(cap) * &v2)) + &(&GradedClass::x(cap) * &v)
}

/// `c(𝒫¹) = [(1+L+H)² + (1+L+H)K + x](1+L+H)`
pub fn chern_principal_parts() -> GradedClass {
    chern_principal_parts_with_cap(DEFAULT_H_CAP)
}

pub fn chern_principal_parts_with_cap(cap: u32) -> GradedClass {
    let u = &(&GradedClass::one(cap) + &GradedClass::L(cap)) + &GradedClass::H(cap);
    let inner = &(&(&u * &u) + &(&u * &GradedClass::K(cap))) + &GradedClass::x(cap);
    &inner * &u
}

/// `c(T)⁻¹ = 1 + K + K² - x`
pub fn inverse_tangent_chern() -> GradedClass {
    inverse_tangent_chern_with_cap(DEFAULT_H_CAP)
}

pub fn inverse_tangent_chern_with_cap(cap: u32) -> GradedClass {
    let k = GradedClass::K(cap);
    &(&(&GradedClass::one(cap) + &k) + &(&k * &k)) - &GradedClass::x(cap)
}

/// `c(T) = 1 - K + x`
pub fn tangent_chern(cap: u32) -> GradedClass {
    &(&GradedClass::one(cap) - &GradedClass::K(cap)) + &GradedClass::x(cap)
}

/// Linear form `c_∂ ∂ + c_k k + c_s s + c_x x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearForm {
    pub d: Rational,
    pub k: Rational,
    pub s: Rational,
    pub x: Rational,
}

impl LinearForm {
    pub fn new(d: Rational, k: Rational, s: Rational, x: Rational) -> Self {
        Self { d, k, s, x }
    }

    pub fn from_ints(d: i64, k: i64, s: i64, x: i64) -> Self {
        Self::new(rat(d), rat(k), rat(s), rat(x))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> [&Rational; 4] {
        [&self.d, &self.k, &self.s, &self.x]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(&self.d * s, &self.k * s, &self.s * s, &self.x * s)
    }

    pub fn eval(&self, chern: &ChernNumbers) -> Rational {
        let v = chern.as_rationals();
        &self.d * &v[0] + &self.k * &v[1] + &self.s * &v[2] + &self.x * &v[3]
    }

    /// Value on `(P², O(d))` as a polynomial in `d`.
    pub fn specialize_p2(&self) -> UniPolyD {
        UniPolyD::from_coeffs(vec![&self.s * rat(9) + &self.x * rat(3), &self.k * rat(-3), self.d.clone()])
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, o: &LinearForm) -> LinearForm {
        LinearForm::new(&self.d + &o.d, &self.k + &o.k, &self.s + &o.s, &self.x + &o.x)
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, o: &LinearForm) -> LinearForm {
        LinearForm::new(&self.d - &o.d, &self.k - &o.k, &self.s - &o.s, &self.x - &o.x)
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self.scale(&rat(-1))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, v) in self.coeffs().into_iter().zip(["∂", "k", "s", "x"]) {
            if c.is_zero() {
                continue;
            }
            crate::exact::write_term(f, c, v, first)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for LinearForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("d", &self.d.to_string())?;
        map.serialize_entry("k", &self.k.to_string())?;
        map.serialize_entry("s", &self.s.to_string())?;
        map.serialize_entry("x", &self.x.to_string())?;
        map.end()
    }
}

/// Coefficient of `H^n` in `c`, surface-degree-2 part, as a form in `∂, k, s, x`.
pub fn pushforward_to_y(c: &GradedClass, n: u32) -> Result<LinearForm, ChowError> {
    if n > c.cap {
        return Err(ChowError::BeyondCap { n, cap: c.cap });
    }
    Ok(LinearForm::new(
        c.coeff(Monomial::new(2, 0, 0, n)),
        c.coeff(Monomial::new(1, 1, 0, n)),
        c.coeff(Monomial::new(0, 2, 0, n)),
        c.coeff(Monomial::new(0, 0, 1, n)),
    ))
}

/// `M_r = c(𝒫¹)^{r-1} c(T)^{-(r-1)} ξ`
pub fn m_class_general(r: usize) -> GradedClass {
    let cap = DEFAULT_H_CAP;
    let e = r.saturating_sub(1) as u32;
    let p = chern_principal_parts_with_cap(cap).pow(e);
    let t = inverse_tangent_chern_with_cap(cap).pow(e);
    &(&p * &t) * &critical_class_with_cap(cap)
}

/// Equivalence `Q_n` of the small diagonal on a general surface.
pub fn q_general(n: usize) -> Result<LinearForm, ChowError> {
    check_q_index(n)?;
    pushforward_to_y(&m_class_general(n), n as u32)
}

/// Correction term `C_n` on a general surface; zero for `n ≤ 2`.
pub fn c_correction_general(n: usize) -> Result<LinearForm, ChowError> {
    match n {
        1 | 2 => Ok(LinearForm::zero()),
        3 => Ok(-&pushforward_to_y(&m_class_general(2), 3)?),
        4 => {
            let m3 = pushforward_to_y(&m_class_general(3), 4)?;
            let m2 = pushforward_to_y(&m_class_general(2), 4)?;
            Ok(-&(&m3.scale(&ratio(3, 2)) - &m2.scale(&rat(2))))
        }
        0 => Err(ChowError::IndexOutOfRange { n, min: 1, max: 4 }),
        _ => Err(ChowError::NoCorrectionFormula(n)),
    }
}

/// Element of the truncated ring in `l` (with `l³ = 0`) and `H`, with
/// coefficients polynomial in `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct P2Class {
    cap: u32,
    terms: BTreeMap<(u32, u32), UniPolyD>,
}

impl P2Class {
    pub fn zero(cap: u32) -> Self {
        Self { cap, terms: BTreeMap::new() }
    }

    pub fn term(l: u32, h: u32, c: UniPolyD, cap: u32) -> Self {
        let mut p = Self::zero(cap);
        p.add_term(l, h, c);
        p
    }

    pub fn constant(c: UniPolyD, cap: u32) -> Self {
        Self::term(0, 0, c, cap)
    }

    pub fn one(cap: u32) -> Self {
        Self::constant(UniPolyD::one(), cap)
    }

    pub fn l(cap: u32) -> Self {
        Self::term(1, 0, UniPolyD::one(), cap)
    }

    #[allow(non_snake_case)]
    pub fn H(cap: u32) -> Self {
        Self::term(0, 1, UniPolyD::one(), cap)
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Coefficient of `l^l H^h`.
    pub fn coeff(&self, l: u32, h: u32) -> UniPolyD {
        self.terms.get(&(l, h)).cloned().unwrap_or_else(UniPolyD::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &UniPolyD)> {
        self.terms.iter()
    }

    fn add_term(&mut self, l: u32, h: u32, c: UniPolyD) {
        if c.is_zero() || l > 2 || h > self.cap {
            return;
        }
        let slot = self.terms.entry((l, h)).or_insert_with(UniPolyD::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&(l, h));
        }
    }

    pub fn scale(&self, s: &UniPolyD) -> Self {
        let mut out = Self::zero(self.cap);
        for (&(l, h), c) in &self.terms {
            out.add_term(l, h, c * s);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.cap);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl Add for &P2Class {
    type Output = P2Class;
    fn add(self, rhs: &P2Class) -> P2Class {
        let mut out = P2Class::zero(self.cap.min(rhs.cap));
        for (&(l, h), c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(l, h, c.clone());
        }
        out
    }
}

impl Sub for &P2Class {
    type Output = P2Class;
    fn sub(self, rhs: &P2Class) -> P2Class {
        self + &rhs.scale(&UniPolyD::constant(rat(-1)))
    }
}

impl Mul for &P2Class {
    type Output = P2Class;
    fn mul(self, rhs: &P2Class) -> P2Class {
        let mut out = P2Class::zero(self.cap.min(rhs.cap));
        for (&(la, ha), ca) in &self.terms {
            for (&(lb, hb), cb) in &rhs.terms {
                out.add_term(la + lb, ha + hb, ca * cb);
            }
        }
        out
    }
}

fn p2_monomial_name(l: u32, h: u32) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("l", l), ("H", h)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for P2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&(l, h), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*{}", p2_monomial_name(l, h))?;
        }
        Ok(())
    }
}

/// JSON object keyed by monomial strings such as `"l^2*H^3"`; values are
/// ascending coefficient arrays in `d`.
impl Serialize for P2Class {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (&(l, h), c) in &self.terms {
            map.serialize_entry(&p2_monomial_name(l, h), c)?;
        }
        map.end()
    }
}

fn d_minus(a: i64) -> UniPolyD {
    UniPolyD::from_ints(&[-a, 1])
}

/// `1 - 3l + 6l²`
fn p2_inverse_tangent(cap: u32) -> P2Class {
    let l = P2Class::l(cap);
    let l2 = &l * &l;
    &(&P2Class::one(cap) - &l.scale(&UniPolyD::constant(rat(3)))) + &l2.scale(&UniPolyD::constant(rat(6)))
}

/// `H + (d-1)l`
fn p2_hyperplane_sum(cap: u32) -> P2Class {
    &P2Class::H(cap) + &P2Class::l(cap).scale(&d_minus(1))
}

/// `M_n(l, H, d) = (1+H+(d-1)l)^{3(n-1)} (1-3l+6l²)^{n-1} (H+(d-1)l)³`
pub fn m_poly_p2(n: usize) -> Result<P2Class, ChowError> {
    check_q_index(n)?;
    Ok(m_poly_p2_unchecked(n, DEFAULT_H_CAP))
}

fn m_poly_p2_unchecked(n: usize, cap: u32) -> P2Class {
    let e = (n - 1) as u32;
    let v = p2_hyperplane_sum(cap);
    let u = &P2Class::one(cap) + &v;
    &(&u.pow(3 * e) * &p2_inverse_tangent(cap).pow(e)) * &v.pow(3)
}

/// Coefficient of `l² Hⁿ` in `M_n`.
pub fn q_p2_extraction(n: usize) -> Result<UniPolyD, ChowError> {
    Ok(m_poly_p2(n)?.coeff(2, n as u32))
}

/// `Q_n = f_n d² + g_n d + h_n` from the binomial closed form.
pub fn q_p2_closed(n: usize) -> Result<UniPolyD, ChowError> {
    if n == 0 {
        return Err(ChowError::IndexOutOfRange { n, min: 1, max: usize::MAX });
    }
    let ni = n as i64;
    let b = |k: i64| int_to_rat(&binomial(3 * ni - 3, k).expect("3n-3 >= 0"));
    let (b1, b2, b3) = (b(ni - 1), b(ni - 2), b(ni - 3));
    let f = &b1 * rat(3) + &b2 * rat(3 * (2 * ni - 1)) + &b3 * rat(ni * (2 * ni - 1));
    let g = -(&b3 * rat(2 * ni * (5 * ni - 4))) - &b2 * rat(3 * (7 * ni - 5)) - &b1 * rat(6);
    let quad = ratio(25, 2) * rat(ni * ni) - ratio(29, 2) * rat(ni) + rat(3);
    let h = &b3 * quad + &b2 * rat(3 * (5 * ni - 4)) + &b1 * rat(3);
    Ok(UniPolyD::from_coeffs(vec![h, g, f]))
}

/// Correction term `C_n` on `P²`, from the same `M_r` coefficients.
pub fn c_correction_p2(n: usize) -> Result<UniPolyD, ChowError> {
    let coeff = |r: usize, h: u32| m_poly_p2_unchecked(r, DEFAULT_H_CAP).coeff(2, h);
    match n {
        1 | 2 => Ok(UniPolyD::zero()),
        3 => Ok(-&coeff(2, 3)),
        4 => {
            let inner = &coeff(3, 4).scale(&ratio(3, 2)) - &coeff(2, 4).scale(&rat(2));
            Ok(-&inner)
        }
        0 => Err(ChowError::IndexOutOfRange { n, min: 1, max: 4 }),
        _ => Err(ChowError::NoCorrectionFormula(n)),
    }
}

/// `(-1)^{i-1}(i-1)!(Q_i + C_i)` on `P²`.
pub fn multiple_point_argument_p2(i: usize) -> Result<UniPolyD, ChowError> {
    let sum = &q_p2_closed(i)? + &c_correction_p2(i)?;
    let f = int_to_rat(&factorial_u(i as u64 - 1));
    let sign = if i % 2 == 1 { rat(1) } else { rat(-1) };
    Ok(sum.scale(&(f * sign)))
}

/// `∫ f_* m_r` on `(P², O(d))`: `P_r` evaluated at the arguments
/// `(-1)^{i-1}(i-1)!(Q_i + C_i)`.
pub fn multiple_point_degree(r: usize, d: i64) -> Result<BigInt, ChowError> {
    if r == 0 || r > 4 {
        return Err(ChowError::MultiplePointRange(r));
    }
    let args: Vec<Rational> = (1..=r)
        .map(|i| multiple_point_argument_p2(i).map(|p| p.eval_int(d)))
        .collect::<Result<_, _>>()?;
    let v = eval_complete_bell(r, &args)?;
    Ok(to_integer(&v).expect("integer arguments give an integer"))
}

/// `Π_B Q_{|B|}` over the blocks of `π`, evaluated at `chern`.
pub fn equivalence_polydiagonal(pi: &SetPartition, chern: &ChernNumbers) -> Result<BigInt, ChowError> {
    let mut prod = Rational::one();
    for size in pi.block_sizes() {
        prod *= q_general(size)?.eval(chern);
    }
    Ok(to_integer(&prod).expect("Q_n has integer coefficients"))
}

/// Excess contribution to `X₁ ⋯ X_r` from the non-trivial polydiagonals:
/// `-Σ_{π ≠ 0̂} n_π Π_B Q_{|B|}`, grouped by block sizes (non-increasing).
/// For `r = 3` this is `3 Q₂Q₁ - 2 Q₃`.
pub fn diagonal_inclusion_exclusion(r: usize) -> Result<BTreeMap<Vec<usize>, BigInt>, ChowError> {
    let parts = enumerate_partitions(r).map_err(|_| ChowError::IndexOutOfRange { n: r, min: 1, max: 12 })?;
    let mut out: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    for pi in parts {
        if pi.num_blocks() == r {
            continue;
        }
        let mut sizes: Vec<usize> = pi.block_sizes().collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        *out.entry(sizes).or_insert_with(BigInt::zero) -= pi.mobius_coefficient();
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// `E_{A₁A₂}`: coefficient of `l²H³` in
/// `(1+(d-1)l+H)³ (1-3l+6l²) (2(d-3)l + 2H) ((d-1)l+H)³`.
pub fn excess_a1a2_p2() -> UniPolyD {
    let cap = 8;
    let v = p2_hyperplane_sum(cap);
    let u = &P2Class::one(cap) + &v;
    let normal = &P2Class::l(cap).scale(&d_minus(3).scale(&rat(2))) + &P2Class::H(cap).scale(&UniPolyD::constant(rat(2)));
    let total = &(&(&u.pow(3) * &p2_inverse_tangent(cap)) * &normal) * &v.pow(3);
    total.coeff(2, 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(l: u32, k: u32, x: u32, h: u32) -> Monomial {
        Monomial::new(l, k, x, h)
    }

    #[test]
    fn critical_class_terms() {
        let xi = critical_class();
        assert_eq!(xi.coeff(m(0, 0, 0, 3)), rat(1));
        assert_eq!(xi.coeff(m(2, 0, 0, 1)), rat(3));
        assert_eq!(xi.coeff(m(3, 0, 0, 0)), rat(0));
        assert!(xi.terms().all(|(mono, _)| mono.surface_degree() <= 2));
    }

    #[test]
    fn principal_parts_graded_pieces() {
        let c = chern_principal_parts();
        assert_eq!(c.degree_part(0), GradedClass::one(DEFAULT_H_CAP));
        assert_eq!(c.degree_part(3), critical_class());
        let expect = &(&GradedClass::L(DEFAULT_H_CAP) + &GradedClass::H(DEFAULT_H_CAP)).scale(&rat(3))
            + &GradedClass::K(DEFAULT_H_CAP);
        assert_eq!(c.degree_part(1), expect);
    }

    #[test]
    fn tangent_inverse() {
        let cap = DEFAULT_H_CAP;
        let t = inverse_tangent_chern();
        assert_eq!(&t * &tangent_chern(cap), GradedClass::one(cap));
        assert_eq!(tangent_chern(cap).inverse().unwrap(), t);
        assert_eq!(t.coeff(m(0, 0, 1, 0)), rat(-1));
        let p2 = t.specialize_p2();
        assert_eq!(p2.coeff(0, 0), UniPolyD::one());
        assert_eq!(p2.coeff(1, 0), UniPolyD::constant(rat(-3)));
        assert_eq!(p2.coeff(2, 0), UniPolyD::constant(rat(6)));
        assert!(GradedClass::H(cap).inverse().is_err());
    }

    #[test]
    fn pushforward_examples() {
        let cap = DEFAULT_H_CAP;
        assert_eq!(pushforward_to_y(&critical_class(), 1).unwrap(), LinearForm::from_ints(3, 2, 0, 1));
        for n in 1..5 {
            assert!(pushforward_to_y(&GradedClass::one(cap), n).unwrap().is_zero());
        }
        let xh2 = &GradedClass::x(cap) * &GradedClass::H(cap).pow(2);
        assert_eq!(pushforward_to_y(&xh2, 2).unwrap(), LinearForm::from_ints(0, 0, 0, 1));
        assert!(pushforward_to_y(&xh2, 17).is_err());
    }

    #[test]
    fn general_q_values() {
        let expect = [
            (3, 2, 0, 1),
            (18, 15, 2, 3),
            (150, 148, 30, 15),
            (1260, 1380, 339, 78),
            (10395, 12210, 3350, 411),
        ];
        for (n, &(d, k, s, x)) in expect.iter().enumerate() {
            assert_eq!(q_general(n + 1).unwrap(), LinearForm::from_ints(d, k, s, x), "n={}", n + 1);
        }
        assert!(q_general(0).is_err());
        assert!(q_general(9).is_err());
    }

    #[test]
    fn general_corrections() {
        assert_eq!(c_correction_general(3).unwrap(), LinearForm::from_ints(-30, -32, -7, -3));
        assert_eq!(c_correction_general(4).unwrap(), LinearForm::from_ints(-420, -475, -120, -26));
        assert!(c_correction_general(2).unwrap().is_zero());
        assert!(matches!(c_correction_general(5), Err(ChowError::NoCorrectionFormula(5))));
    }

    #[test]
    fn general_q_specializes_to_plane() {
        for n in 1..=6 {
            let g = q_general(n).unwrap().specialize_p2();
            assert_eq!(g, q_p2_extraction(n).unwrap(), "n={n}");
        }
        for n in 3..=4 {
            assert_eq!(c_correction_general(n).unwrap().specialize_p2(), c_correction_p2(n).unwrap());
        }
    }

    #[test]
    fn plane_class_of_first_m() {
        let m1 = m_poly_p2(1).unwrap();
        assert_eq!(m1.coeff(0, 3), UniPolyD::one());
        assert_eq!(m1.coeff(1, 2), d_minus(1).scale(&rat(3)));
        assert_eq!(m1.coeff(2, 1), d_minus(1).pow(2).scale(&rat(3)));
        assert_eq!(m1.terms().count(), 3);
        for n in 2..=5 {
            assert!(m_poly_p2(n).unwrap().coeff(0, 0).is_zero());
        }
        // l²H³ of M₂ is -C₃
        assert_eq!(m_poly_p2(2).unwrap().coeff(2, 3), UniPolyD::quadratic(30, -96, 72));
    }

    #[test]
    fn table_rows() {
        let q = [(3, -6, 3), (18, -45, 27), (150, -444, 315), (1260, -4140, 3285)];
        for (n, &(a, b, c)) in q.iter().enumerate() {
            let want = UniPolyD::quadratic(a, b, c);
            assert_eq!(q_p2_extraction(n + 1).unwrap(), want);
            assert_eq!(q_p2_closed(n + 1).unwrap(), want);
        }
        assert_eq!(c_correction_p2(3).unwrap(), -&UniPolyD::quadratic(30, -96, 72));
        assert_eq!(c_correction_p2(4).unwrap(), -&UniPolyD::quadratic(420, -1425, 1158));
        assert!(c_correction_p2(2).unwrap().is_zero());
        assert!(c_correction_p2(5).is_err());
        assert_eq!(q_p2_closed(3).unwrap().to_string(), "150d^2 - 444d + 315");
    }

    #[test]
    fn closed_form_matches_extraction() {
        for n in 1..=8 {
            assert_eq!(q_p2_closed(n).unwrap(), q_p2_extraction(n).unwrap(), "n={n}");
        }
        assert_eq!(q_p2_closed(5).unwrap(), UniPolyD::quadratic(10395, -36630, 31383));
        assert_eq!(q_p2_closed(8).unwrap(), UniPolyD::quadratic(5232600, -20721096, 20189115));
    }

    #[test]
    fn literal_constant_term_fails_table() {
        // dropping the factor n on 29/2 breaks Q₃
        let n = 3i64;
        let b = |k: i64| int_to_rat(&binomial(3 * n - 3, k).unwrap());
        let literal = b(n - 3) * (ratio(25, 2) * rat(n * n) - ratio(29, 2) + rat(3))
            + b(n - 2) * rat(3 * (5 * n - 4))
            + b(n - 1) * rat(3);
        assert_ne!(literal, rat(315));
        assert_eq!(q_p2_closed(3).unwrap().coeff(0), rat(315));
    }

    #[test]
    fn interpolation_round_trip() {
        for n in 1..=8 {
            let q = q_p2_extraction(n).unwrap();
            let pts = [5, 6, 7].map(|d| (rat(d), q.eval_int(d)));
            assert_eq!(UniPolyD::interpolate_quadratic(&pts).unwrap(), q);
        }
    }

    #[test]
    fn multiple_points() {
        assert_eq!(multiple_point_degree(1, 3).unwrap(), BigInt::from(12));
        assert_eq!(multiple_point_degree(2, 3).unwrap(), BigInt::from(90));
        for d in 1..6 {
            let q1 = q_p2_closed(1).unwrap().eval_int(d);
            let q2 = q_p2_closed(2).unwrap().eval_int(d);
            let q3 = &q_p2_closed(3).unwrap().eval_int(d) + &c_correction_p2(3).unwrap().eval_int(d);
            let p3 = &q1 * &q1 * &q1 - rat(3) * &q1 * &q2 + rat(2) * q3;
            assert_eq!(int_to_rat(&multiple_point_degree(3, d).unwrap()), p3);
        }
        assert!(multiple_point_degree(5, 3).is_err());
    }

    #[test]
    fn polydiagonal_products() {
        let c = ChernNumbers::p2(5);
        let q = |n: usize| q_general(n).unwrap().eval(&c);
        let bottom = SetPartition::bottom(3);
        assert_eq!(int_to_rat(&equivalence_polydiagonal(&bottom, &c).unwrap()), q(1) * q(1) * q(1));
        let pi: SetPartition = "12|3".parse().unwrap();
        assert_eq!(int_to_rat(&equivalence_polydiagonal(&pi, &c).unwrap()), q(2) * q(1));
    }

    #[test]
    fn inclusion_exclusion_three() {
        let coeffs = diagonal_inclusion_exclusion(3).unwrap();
        assert_eq!(coeffs.len(), 2);
        assert_eq!(coeffs[&vec![2, 1]], BigInt::from(3));
        assert_eq!(coeffs[&vec![3]], BigInt::from(-2));
    }

    #[test]
    fn excess_class() {
        let e = excess_a1a2_p2();
        assert_eq!(e, UniPolyD::quadratic(60, -192, 144));
        assert_eq!(e.eval_int(3), rat(108));
    }

    #[test]
    fn display_and_serialize() {
        let xi = critical_class_with_cap(3);
        let json = serde_json::to_string(&xi).unwrap();
        assert!(json.contains(r#""L^2*H":"3""#));
        assert_eq!(LinearForm::from_ints(18, 15, 2, 3).to_string(), "18∂ + 15k + 2s + 3x");
        assert_eq!(
            serde_json::to_string(&LinearForm::from_ints(3, 2, 0, 1)).unwrap(),
            r#"{"d":"3","k":"2","s":"0","x":"1"}"#
        );
        let p = serde_json::to_string(&m_poly_p2(1).unwrap()).unwrap();
        assert!(p.contains(r#""l^2*H":["3","-6","3"]"#));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn class() -> impl Strategy<Value = GradedClass> {
            proptest::collection::vec(((0u32..3, 0u32..3, 0u32..2, 0u32..6), -9i64..=9), 0..8).prop_map(|v| {
                let mut g = GradedClass::zero(6);
                for ((l, k, x, h), c) in v {
                    g = &g + &GradedClass::monomial(Monomial::new(l, k, x, h), rat(c), 6);
                }
                g
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn ring_laws(a in class(), b in class(), c in class()) {
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            }

            #[test]
            fn pushforward_is_linear(a in class(), b in class(), n in 0u32..6, s in -5i64..=5) {
                let lhs = pushforward_to_y(&(&a + &b.scale(&rat(s))), n).unwrap();
                let rhs = &pushforward_to_y(&a, n).unwrap() + &pushforward_to_y(&b, n).unwrap().scale(&rat(s));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
