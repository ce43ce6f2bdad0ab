//! Node polynomials and curve counts.
//!
//! The number of `r`-nodal curves in `|L|` through the right number of general
//! points is `N_r = P_r(a_1, …, a_r)/r!` where each `a_i` is a linear form in
//! the Chern numbers. The forms for `i ≤ 15` ship as `data/a_forms.json`.

use std::path::Path;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bell::{bell_sequence_symbolic, eval_complete_bell, BellError, SparsePoly};
use crate::chow::{c_correction_general, c_correction_p2, q_general, q_p2_closed, ChowError, LinearForm};
use crate::exact::{factorial_u, int_to_rat, rat, render_decimal, to_integer, BigInt, Rational, UniPolyD};
use crate::kazarian::{KazarianError, KazarianTable, MultisingularityType};
use crate::qseries::Channel;
use crate::surface::ChernNumbers;

const EMBEDDED: &str = include_str!("../data/a_forms.json");

pub const A_FORMS_FILE: &str = "a_forms.json";
pub const KAZARIAN_FILE: &str = "kazarian.json";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumeratorError {
    #[error("a_{0} is not available: table exhausted (rows 1..={1})")]
    TableExhausted(usize, usize),
    #[error("node index must be at least 1, got {0}")]
    IndexTooSmall(usize),
    #[error("P_{r}(a)/{r}! = {value} is not an integer")]
    NonIntegral { r: usize, value: String },
    #[error("bad table data: {0}")]
    Data(String),
    #[error("could not read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("decomposition check only for 2 <= i <= 4, got {0}")]
    DecompositionRange(usize),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error(transparent)]
    Chow(#[from] ChowError),
    #[error(transparent)]
    Kazarian(#[from] KazarianError),
}

/// `a_i = (-1)^{i-1}(i-1)!(D_i ∂ + E_i k + F_i s + G_i x)`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NodeLinearForm {
    pub i: usize,
    #[serde(serialize_with = "big_str")]
    pub d: BigInt,
    #[serde(serialize_with = "big_str")]
    pub e: BigInt,
    #[serde(serialize_with = "big_str")]
    pub f: BigInt,
    #[serde(serialize_with = "big_str")]
    pub g: BigInt,
}

fn big_str<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl NodeLinearForm {
    /// `(-1)^{i-1}(i-1)!`
    pub fn scale_factor(&self) -> BigInt {
        let f = factorial_u(self.i as u64 - 1);
        if self.i % 2 == 1 {
            f
        } else {
            -f
        }
    }

    pub fn coefficient(&self, channel: Channel) -> &BigInt {
        match channel {
            Channel::Partial => &self.d,
            Channel::K => &self.e,
            Channel::S => &self.f,
            Channel::X => &self.g,
        }
    }

    /// `a_i` as a form in `∂, k, s, x`.
    pub fn a_form(&self) -> LinearForm {
        let s = self.scale_factor();
        let c = |v: &BigInt| int_to_rat(&(v * &s));
        LinearForm::new(c(&self.d), c(&self.e), c(&self.f), c(&self.g))
    }

    pub fn a_coefficients(&self) -> [BigInt; 4] {
        let s = self.scale_factor();
        [&self.d * &s, &self.e * &s, &self.f * &s, &self.g * &s]
    }

    pub fn eval(&self, chern: &ChernNumbers) -> BigInt {
        let [a, b, c, d] = self.a_coefficients();
        a * &chern.partial + b * &chern.k + c * &chern.s + d * &chern.x
    }
}

#[derive(Deserialize)]
struct Row {
    i: usize,
    #[serde(rename = "D")]
    d: String,
    #[serde(rename = "E")]
    e: String,
    #[serde(rename = "F")]
    f: String,
    #[serde(rename = "G")]
    g: String,
    a: Option<[String; 4]>,
    a_tilde: Option<[String; 4]>,
}

/// The rows `a_1 … a_n`, plus the printed `a_i/(i-1)!` rows when present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ATable {
    forms: Vec<NodeLinearForm>,
    a_tilde: Vec<Option<[BigInt; 4]>>,
}

fn parse_big(s: &str) -> Result<BigInt, EnumeratorError> {
    s.trim().parse().map_err(|_| EnumeratorError::Data(format!("not an integer: {s:?}")))
}

impl ATable {
    pub fn embedded() -> Self {
        Self::from_json(EMBEDDED).expect("embedded table is valid")
    }

    /// Validates that rows are numbered 1, 2, … and that any `a` entries
    /// agree with `D, E, F, G` under the sign-and-factorial convention.
    pub fn from_json(text: &str) -> Result<Self, EnumeratorError> {
        let rows: Vec<Row> = serde_json::from_str(text).map_err(|e| EnumeratorError::Data(e.to_string()))?;
        let mut forms = Vec::with_capacity(rows.len());
        let mut a_tilde = Vec::with_capacity(rows.len());
        for (idx, row) in rows.into_iter().enumerate() {
            if row.i != idx + 1 {
                return Err(EnumeratorError::Data(format!("row {} has index {}", idx + 1, row.i)));
            }
            let form = NodeLinearForm {
                i: row.i,
                d: parse_big(&row.d)?,
                e: parse_big(&row.e)?,
                f: parse_big(&row.f)?,
                g: parse_big(&row.g)?,
            };
            if let Some(a) = &row.a {
                let expect = form.a_coefficients();
                for (printed, want) in a.iter().zip(expect.iter()) {
                    if &parse_big(printed)? != want {
                        return Err(EnumeratorError::Data(format!("a_{} entry {printed} disagrees with D,E,F,G", row.i)));
                    }
                }
            }
            let tilde = match &row.a_tilde {
                Some(t) => Some([parse_big(&t[0])?, parse_big(&t[1])?, parse_big(&t[2])?, parse_big(&t[3])?]),
                None => None,
            };
            forms.push(form);
            a_tilde.push(tilde);
        }
        Ok(Self { forms, a_tilde })
    }

    pub fn load(path: &Path) -> Result<Self, EnumeratorError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EnumeratorError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        Self::from_json(&text)
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn form(&self, i: usize) -> Result<&NodeLinearForm, EnumeratorError> {
        if i == 0 {
            return Err(EnumeratorError::IndexTooSmall(i));
        }
        self.forms.get(i - 1).ok_or(EnumeratorError::TableExhausted(i, self.forms.len()))
    }

    pub fn forms(&self) -> &[NodeLinearForm] {
        &self.forms
    }

    /// `N_r(S, L) = P_r(a_1, …, a_r)/r!`; non-integral results are errors.
    pub fn node_count(&self, r: usize, chern: &ChernNumbers) -> Result<BigInt, EnumeratorError> {
        if r == 0 {
            return Ok(BigInt::from(1));
        }
        let args: Vec<Rational> = (1..=r)
            .map(|i| self.form(i).map(|f| int_to_rat(&f.eval(chern))))
            .collect::<Result<_, _>>()?;
        let total = eval_complete_bell(r, &args)? / int_to_rat(&factorial_u(r as u64));
        to_integer(&total).ok_or(EnumeratorError::NonIntegral { r, value: total.to_string() })
    }

    /// `Z_r = P_r(a_1, …, a_r)/r!` as a polynomial in `∂, k, s, x`.
    pub fn node_polynomial(&self, r: usize) -> Result<NodePolynomial, EnumeratorError> {
        if r == 0 {
            return Err(EnumeratorError::IndexTooSmall(r));
        }
        let y: Vec<SparsePoly> = (1..=r)
            .map(|i| {
                self.form(i).map(|f| {
                    let a = f.a_form();
                    SparsePoly::linear(&[a.d, a.k, a.s, a.x])
                })
            })
            .collect::<Result<_, _>>()?;
        let seq = bell_sequence_symbolic(&y);
        Ok(NodePolynomial { r, poly: seq[r].clone() })
    }

    /// Cells of the printed `a_i/(i-1)!` rows that disagree with `a_i`.
    pub fn a_tilde_mismatches(&self) -> Vec<TildeMismatch> {
        let mut out = Vec::new();
        for (form, tilde) in self.forms.iter().zip(&self.a_tilde) {
            let Some(tilde) = tilde else { continue };
            let f = factorial_u(form.i as u64 - 1);
            for (cell, (a, printed)) in form.a_coefficients().iter().zip(tilde).enumerate() {
                let expect = a / &f;
                if &expect != printed || !(a % &f).is_zero() {
                    out.push(TildeMismatch {
                        i: form.i,
                        channel: Channel::ALL[cell],
                        expected: expect,
                        printed: printed.clone(),
                    });
                }
            }
        }
        out
    }
}

/// One disagreeing cell between `a_i/(i-1)!` and its printed value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TildeMismatch {
    pub i: usize,
    #[serde(serialize_with = "channel_str")]
    pub channel: Channel,
    #[serde(serialize_with = "big_str")]
    pub expected: BigInt,
    #[serde(serialize_with = "big_str")]
    pub printed: BigInt,
}

fn channel_str<S: serde::Serializer>(c: &Channel, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(c.name())
}

/// The printed `x` cell of `ã₁₄` has the wrong sign; it is the only cell
/// allowed to differ.
pub fn is_known_tilde_typo(m: &TildeMismatch) -> bool {
    m.i == 14 && m.channel == Channel::X && m.expected == -m.printed.clone()
}

/// `Z_r` in the variables `(∂, k, s, x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodePolynomial {
    pub r: usize,
    pub poly: SparsePoly,
}

impl NodePolynomial {
    pub const VARIABLES: [&'static str; 4] = ["∂", "k", "s", "x"];

    pub fn degree(&self) -> Option<u32> {
        self.poly.degree()
    }

    pub fn eval(&self, chern: &ChernNumbers) -> Rational {
        self.poly.eval(&chern.as_rationals()).expect("four variables")
    }
}

impl std::fmt::Display for NodePolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.poly.display_with(&Self::VARIABLES))
    }
}

pub fn a_form(i: usize) -> Result<NodeLinearForm, EnumeratorError> {
    ATable::embedded().form(i).cloned()
}

pub fn node_count(r: usize, chern: &ChernNumbers) -> Result<BigInt, EnumeratorError> {
    ATable::embedded().node_count(r, chern)
}

pub fn node_polynomial(r: usize) -> Result<NodePolynomial, EnumeratorError> {
    ATable::embedded().node_polynomial(r)
}

/// Count of `r`-nodal plane curves of degree `d`.
pub fn severi_degree_p2(d: i64, r: usize) -> Result<BigInt, EnumeratorError> {
    node_count(r, &ChernNumbers::p2(d))
}

/// Universal polynomials are known to count plane curves when `r ≤ 2d - 2`;
/// beyond that the value may be virtual.
pub fn ampleness_warning(d: i64, r: usize) -> Option<String> {
    if (r as i64) > 2 * d - 2 {
        Some(format!(
            "warning: r = {r} exceeds 2d - 2 = {} for d = {d}; the value may be virtual",
            2 * d - 2
        ))
    } else {
        None
    }
}

/// One line of the ratio table: `X_{n+1}/X_n` for `X = D, E, F, G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioRow {
    pub n: usize,
    pub ratios: [Option<Rational>; 4],
}

impl RatioRow {
    /// Two-decimal renderings; `---` where `X_n = 0`.
    pub fn rendered(&self) -> [String; 4] {
        self.ratios
            .clone()
            .map(|r| r.map_or_else(|| "---".to_string(), |v| render_decimal(&v, 2)))
    }
}

impl ATable {
    pub fn ratio_table(&self) -> Vec<RatioRow> {
        let mut out = Vec::new();
        for n in 1..self.len() {
            let (a, b) = (&self.forms[n - 1], &self.forms[n]);
            let ratios = Channel::ALL.map(|c| {
                let den = a.coefficient(c);
                if den.is_zero() {
                    None
                } else {
                    Some(Rational::new(b.coefficient(c).clone(), den.clone()))
                }
            });
            out.push(RatioRow { n, ratios });
        }
        out
    }
}

pub fn ratio_table() -> Vec<RatioRow> {
    ATable::embedded().ratio_table()
}

/// Both sides of
/// `a_i = (-1)^{i-1}(i-1)!(Q_i + C_i) - Σ_{α ∈ Γ_i°} i!/#Aut(α) S_α`,
/// where `Γ_i°` is every table type of codimension `i` other than `A₁^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub i: usize,
    pub general_lhs: LinearForm,
    pub general_rhs: LinearForm,
    pub p2_lhs: UniPolyD,
    pub p2_rhs: UniPolyD,
    pub terms: Vec<MultisingularityType>,
}

impl DecompositionReport {
    pub fn general_holds(&self) -> bool {
        self.general_lhs == self.general_rhs
    }

    pub fn p2_holds(&self) -> bool {
        self.p2_lhs == self.p2_rhs
    }
}

/// Evaluates the decomposition of `a_i` on a general surface and on `P²`. The
/// `P²` right-hand side uses the closed-form `Q_i` and the `P²` corrections,
/// so it shares no code with the general-surface side beyond the Kazarian data.
pub fn a_decomposition_check(i: usize, table: &ATable, kazarian: &KazarianTable) -> Result<DecompositionReport, EnumeratorError> {
    if !(2..=4).contains(&i) {
        return Err(EnumeratorError::DecompositionRange(i));
    }
    let lhs = table.form(i)?.a_form();
    let f = int_to_rat(&factorial_u(i as u64 - 1));
    let sign = if i % 2 == 1 { rat(1) } else { rat(-1) };
    let scale = &f * &sign;
    let fi = int_to_rat(&factorial_u(i as u64));

    let nodes = MultisingularityType::nodes(i);
    let terms: Vec<MultisingularityType> =
        kazarian.of_codim(i).into_iter().filter(|t| **t != nodes).cloned().collect();
    let mut s_sum = LinearForm::zero();
    for t in &terms {
        let w = &fi / int_to_rat(&t.aut_order());
        s_sum = &s_sum + &kazarian.s_alpha(t)?.scale(&w);
    }

    let qc = &q_general(i)? + &c_correction_general(i)?;
    let general_rhs = &qc.scale(&scale) - &s_sum;

    let qc_p2 = &q_p2_closed(i)? + &c_correction_p2(i)?;
    let p2_rhs = &qc_p2.scale(&scale) - &s_sum.specialize_p2();

    Ok(DecompositionReport {
        i,
        p2_lhs: lhs.specialize_p2(),
        general_lhs: lhs,
        general_rhs,
        p2_rhs,
        terms,
    })
}

/// Absolute value of a ratio, for comparison with magnitude-only tables.
pub fn ratio_magnitude(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn first_forms() {
        let t = ATable::embedded();
        assert_eq!(t.len(), 15);
        assert_eq!(t.form(1).unwrap().a_form(), LinearForm::from_ints(3, 2, 0, 1));
        assert_eq!(t.form(2).unwrap().a_form(), LinearForm::from_ints(-42, -39, -6, -7));
        let f5 = t.form(5).unwrap();
        assert_eq!(
            [&f5.d, &f5.e, &f5.f, &f5.g],
            [&BigInt::from(217728), &BigInt::from(321882), &BigInt::from(113475), &BigInt::from(3516)]
        );
        assert!(matches!(t.form(16), Err(EnumeratorError::TableExhausted(16, 15))));
        assert!(matches!(t.form(0), Err(EnumeratorError::IndexTooSmall(0))));
    }

    #[test]
    fn load_rejects_inconsistent_rows() {
        let bad = r#"[{"i":1,"D":"3","E":"2","F":"0","G":"1","a":["3","2","0","2"]}]"#;
        assert!(matches!(ATable::from_json(bad), Err(EnumeratorError::Data(_))));
        let gap = r#"[{"i":2,"D":"3","E":"2","F":"0","G":"1"}]"#;
        assert!(ATable::from_json(gap).is_err());
        let ok = r#"[{"i":1,"D":"3","E":"2","F":"0","G":"1"}]"#;
        assert_eq!(ATable::from_json(ok).unwrap().len(), 1);
    }

    #[test]
    fn counts() {
        assert_eq!(severi_degree_p2(3, 1).unwrap(), BigInt::from(12));
        assert_eq!(severi_degree_p2(4, 2).unwrap(), BigInt::from(225));
        assert_eq!(severi_degree_p2(1, 0).unwrap(), BigInt::from(1));
        assert_eq!(node_count(0, &ChernNumbers::new(1, 2, 3, 4)).unwrap(), BigInt::from(1));
        assert!(matches!(node_count(16, &ChernNumbers::p2(3)), Err(EnumeratorError::TableExhausted(..))));
        for d in 1..=10 {
            assert_eq!(severi_degree_p2(d, 1).unwrap(), BigInt::from(3 * (d - 1) * (d - 1)));
        }
        // quartic values
        let expect = [1, 27, 225, 675];
        for (r, &n) in expect.iter().enumerate() {
            assert_eq!(node_count(r, &ChernNumbers::new(16, -12, 9, 3)).unwrap(), BigInt::from(n));
        }
        assert_eq!(severi_degree_p2(3, 2).unwrap(), BigInt::from(21));
    }

    #[test]
    fn non_integral_is_reported() {
        let text = r#"[{"i":1,"D":"1","E":"0","F":"0","G":"0"},{"i":2,"D":"0","E":"0","F":"0","G":"0"}]"#;
        let t = ATable::from_json(text).unwrap();
        let err = t.node_count(2, &ChernNumbers::new(1, 0, 0, 0)).unwrap_err();
        assert!(matches!(err, EnumeratorError::NonIntegral { r: 2, .. }));
    }

    #[test]
    fn node_polynomials() {
        let t = ATable::embedded();
        let z1 = t.node_polynomial(1).unwrap();
        assert_eq!(z1.to_string(), "3∂ + 2k + x");
        let z2 = t.node_polynomial(2).unwrap();
        assert_eq!(z2.degree(), Some(2));
        let a1 = SparsePoly::linear(&[rat(3), rat(2), rat(0), rat(1)]);
        let a2 = SparsePoly::linear(&[rat(-42), rat(-39), rat(-6), rat(-7)]);
        let expect = a1.mul(&a1).add(&a2).scale(&ratio(1, 2));
        assert_eq!(z2.poly, expect);
        for r in 1..=8 {
            assert_eq!(t.node_polynomial(r).unwrap().degree(), Some(r as u32));
        }
    }

    #[test]
    fn tilde_rows() {
        let t = ATable::embedded();
        let m = t.a_tilde_mismatches();
        assert_eq!(m.len(), 1, "{m:?}");
        assert!(is_known_tilde_typo(&m[0]));
    }

    #[test]
    fn ratio_rows() {
        let rows = ratio_table();
        assert_eq!(rows.len(), 14);
        assert_eq!(rows[0].ratios[0], Some(rat(14)));
        assert_eq!(rows[0].ratios[1], Some(ratio(39, 2)));
        assert_eq!(rows[0].ratios[2], None);
        assert_eq!(rows[0].rendered(), ["14.00", "19.50", "---", "7.00"].map(String::from));
        assert_eq!(rows[13].rendered()[0], "19.46");
    }

    #[test]
    fn warnings() {
        assert!(ampleness_warning(4, 6).is_none());
        assert!(ampleness_warning(4, 7).is_some());
        assert!(ampleness_warning(1, 1).is_some());
    }

    #[test]
    fn decompositions() {
        let t = ATable::embedded();
        let k = KazarianTable::embedded();
        for i in 2..=4 {
            let rep = a_decomposition_check(i, &t, &k).unwrap();
            assert!(rep.general_holds(), "general i={i}: {} vs {}", rep.general_lhs, rep.general_rhs);
            assert!(rep.p2_holds(), "p2 i={i}: {} vs {}", rep.p2_lhs, rep.p2_rhs);
        }
        let r3 = a_decomposition_check(3, &t, &k).unwrap();
        assert_eq!(r3.p2_lhs, UniPolyD::quadratic(1380, -4728, 3798));
        let r4 = a_decomposition_check(4, &t, &k).unwrap();
        assert_eq!(r4.p2_lhs, UniPolyD::quadratic(-72360, 287010, -271242));
        assert!(a_decomposition_check(5, &t, &k).is_err());
    }
}
