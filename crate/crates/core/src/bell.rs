//! Complete and partial exponential Bell polynomials.
//!
//! `P_r` is read off the signature table of the partition lattice: the
//! monomial `Π x_i^{j_i}` carries the number of set partitions of `[r]` with
//! `j_i` blocks of size `i`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::{factorial_u, int_to_rat, Rational};
use crate::partition::{signature_count, signatures};
use crate::qseries::PowerSeries;

pub const MAX_BELL_INDEX: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BellError {
    #[error("Bell index {0} outside 1..={MAX_BELL_INDEX}")]
    IndexOutOfRange(usize),
    #[error("partial Bell block count {l} outside 1..={n}")]
    BlocksOutOfRange { n: usize, l: usize },
    #[error("need at least {needed} values, got {got}")]
    LengthMismatch { needed: usize, got: usize },
    #[error("evaluation paths disagree for P_{r}: {partitions} vs {series}")]
    PathsDisagree { r: usize, partitions: String, series: String },
}

/// Polynomial over the rationals in a fixed number of variables. Every key
/// has exactly `nvars` entries and no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The variable with 0-based index `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of {nvars}");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// Linear form `Σ c_i x_i`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exponents: &[u32]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: Rational) {
        assert_eq!(exponents.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exponents) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Self { nvars: self.nvars, terms: acc }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, values: &[Rational]) -> Result<Rational, BellError> {
        if values.len() < self.nvars {
            return Err(BellError::LengthMismatch { needed: self.nvars, got: values.len() });
        }
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (v, &k) in values.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(v.clone(), k as usize);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Replaces variable `i` by `images[i]`; all images share one ring.
    pub fn substitute(&self, images: &[SparsePoly]) -> Result<SparsePoly, BellError> {
        if images.len() < self.nvars {
            return Err(BellError::LengthMismatch { needed: self.nvars, got: images.len() });
        }
        let m = images.first().map_or(0, |p| p.nvars);
        let mut out = SparsePoly::zero(m);
        // cache powers per variable
        let mut powers: Vec<Vec<SparsePoly>> = images.iter().map(|p| vec![SparsePoly::one(p.nvars)]).collect();
        for (e, c) in &self.terms {
            let mut term = SparsePoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    term = term.mul(&powers[i][k as usize]);
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Renders with the given variable names, highest total degree first.
    pub fn display_with(&self, names: &[&str]) -> String {
        struct Named<'a>(&'a SparsePoly, &'a [&'a str]);
        impl fmt::Display for Named<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write_named(f, |i| self.1.get(i).map_or_else(|| format!("x{}", i + 1), |s| s.to_string()))
            }
        }
        Named(self, names).to_string()
    }

    fn write_named(&self, f: &mut fmt::Formatter<'_>, name: impl Fn(usize) -> String) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(ea, _), (eb, _)| {
            let da: u32 = ea.iter().sum();
            let db: u32 = eb.iter().sum();
            db.cmp(&da).then_with(|| eb.cmp(ea))
        });
        for (idx, (e, c)) in ordered.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { name(i) } else { format!("{}^{k}", name(i)) })
                .collect();
            crate::exact::write_term(f, c, &mono.join("*"), idx == 0)?;
        }
        Ok(())
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_named(f, |i| format!("x{}", i + 1))
    }
}

#[derive(Serialize)]
struct TermRecord {
    exponents: Vec<String>,
    coefficient: String,
}

/// Sequence of `{exponents, coefficient}` records in lexicographic order.
impl Serialize for SparsePoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&TermRecord {
                exponents: e.iter().map(u32::to_string).collect(),
                coefficient: c.to_string(),
            })?;
        }
        seq.end()
    }
}

fn check_index(r: usize) -> Result<(), BellError> {
    if r == 0 || r > MAX_BELL_INDEX {
        return Err(BellError::IndexOutOfRange(r));
    }
    Ok(())
}

fn bell_from_signatures(r: usize, keep: impl Fn(usize) -> bool) -> SparsePoly {
    let mut p = SparsePoly::zero(r);
    for sig in signatures(r) {
        if !keep(sig.num_blocks()) {
            continue;
        }
        let mut e = vec![0u32; r];
        for (i, &j) in sig.counts().iter().enumerate() {
            e[i] = j as u32;
        }
        let count = signature_count(r, &sig).expect("signature of r");
        p.add_term(e, int_to_rat(&count));
    }
    p
}

/// `P_r(x_1, …, x_r)`
pub fn complete_bell(r: usize) -> Result<SparsePoly, BellError> {
    check_index(r)?;
    Ok(bell_from_signatures(r, |_| true))
}

/// `P_{n,l}`: the part of `P_n` coming from partitions with `l` blocks.
pub fn partial_bell(n: usize, l: usize) -> Result<SparsePoly, BellError> {
    check_index(n)?;
    if l == 0 || l > n {
        return Err(BellError::BlocksOutOfRange { n, l });
    }
    Ok(bell_from_signatures(n, |blocks| blocks == l))
}

fn check_len(r: usize, values: &[Rational]) -> Result<(), BellError> {
    if values.len() < r {
        return Err(BellError::LengthMismatch { needed: r, got: values.len() });
    }
    Ok(())
}

/// `P_r(values)` as a sum over block signatures.
pub fn eval_complete_bell_via_partitions(r: usize, values: &[Rational]) -> Result<Rational, BellError> {
    check_len(r, values)?;
    if r == 0 {
        return Ok(Rational::one());
    }
    let mut total = Rational::zero();
    for sig in signatures(r) {
        let mut term = int_to_rat(&signature_count(r, &sig).expect("signature of r"));
        for (i, &j) in sig.counts().iter().enumerate() {
            if j > 0 {
                term *= num_traits::pow(values[i].clone(), j);
            }
        }
        total += term;
    }
    Ok(total)
}

/// `P_r(values)` as `r!` times the `t^r` coefficient of `exp(Σ x_l t^l / l!)`.
pub fn eval_complete_bell_via_exp(r: usize, values: &[Rational]) -> Result<Rational, BellError> {
    check_len(r, values)?;
    let mut coeffs = vec![Rational::zero(); r + 1];
    for l in 1..=r {
        coeffs[l] = &values[l - 1] / int_to_rat(&factorial_u(l as u64));
    }
    let e = PowerSeries::new(coeffs).exp().expect("zero constant term");
    Ok(e.coeff(r).expect("order r") * int_to_rat(&factorial_u(r as u64)))
}

/// Evaluates `P_r` both ways and insists they agree.
pub fn eval_complete_bell(r: usize, values: &[Rational]) -> Result<Rational, BellError> {
    let a = eval_complete_bell_via_partitions(r, values)?;
    let b = eval_complete_bell_via_exp(r, values)?;
    if a != b {
        return Err(BellError::PathsDisagree { r, partitions: a.to_string(), series: b.to_string() });
    }
    Ok(a)
}

/// `b_0 … b_n` with `Σ b_r q^r = exp(Σ c_l q^l)`, i.e.
/// `b_r = P_r(1!c_1, …, r!c_r)/r!`. `log_coeffs[l-1]` holds `c_l`.
pub fn bell_transform(log_coeffs: &[Rational]) -> Vec<Rational> {
    let n = log_coeffs.len();
    let mut b = vec![Rational::zero(); n + 1];
    b[0] = Rational::one();
    // r b_r = Σ_{k=1}^{r} k c_k b_{r-k}
    for r in 1..=n {
        let mut s = Rational::zero();
        for k in 1..=r {
            s += Rational::from_integer((k as i64).into()) * &log_coeffs[k - 1] * &b[r - k];
        }
        b[r] = s / Rational::from_integer((r as i64).into());
    }
    b
}

/// `Σ_r P_r(y_1, …, y_r) t^r / r!` as polynomials in the ring of the `y_l`,
/// for `r = 0..=n`. Used for symbolic node polynomials.
pub fn bell_sequence_symbolic(y: &[SparsePoly]) -> Vec<SparsePoly> {
    let n = y.len();
    let m = y.first().map_or(0, SparsePoly::nvars);
    // b_r = P_r/r! satisfies r b_r = Σ_k k (y_k/k!) b_{r-k}
    let mut b = vec![SparsePoly::one(m)];
    for r in 1..=n {
        let mut s = SparsePoly::zero(m);
        for k in 1..=r {
            let w = Rational::new((k as i64).into(), factorial_u(k as u64));
            s = s.add(&y[k - 1].mul(&b[r - k]).scale(&w));
        }
        b.push(s.scale(&Rational::new(1.into(), (r as i64).into())));
    }
    b
}
