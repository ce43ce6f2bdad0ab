//! Reproduction report over the published tables.

use serde::Serialize;

use crate::bell::complete_bell;
use crate::chow::{c_correction_p2, diagonal_inclusion_exclusion, excess_a1a2_p2, q_general, q_p2_closed, q_p2_extraction, LinearForm};
use crate::enumerator::{a_decomposition_check, is_known_tilde_typo, ATable};
use crate::exact::{parse_rational, rat, ratio, render_decimal, BigInt, Rational, UniPolyD};
use crate::kazarian::KazarianTable;
use crate::qseries::{gyz_channel_residual, recover_b1, recover_log_b1, recover_log_b1_by_substitution, residual_support, Channel};

/// `Q_n` on `P²` for `n = 1..=4`, as `(d², d, 1)` coefficients.
pub const TABLE_Q: [(i64, i64, i64); 4] = [(3, -6, 3), (18, -45, 27), (150, -444, 315), (1260, -4140, 3285)];
/// `-C_n` on `P²` for `n = 3, 4`.
pub const TABLE_MINUS_C: [(i64, i64, i64); 2] = [(30, -96, 72), (420, -1425, 1158)];

/// Printed ratio table (magnitudes, decimal comma).
pub const TABLE_RATIOS: [[&str; 4]; 14] = [
    ["14", "19,5", "---", "7"],
    ["16,43", "20,21", "31,33", "9,86"],
    ["17,48", "20,23", "25,57", "9,39"],
    ["18,05", "20,19", "23,61", "5,43"],
    ["18,42", "20,14", "22,62", "18,77"],
    ["18,67", "20,11", "22,04", "51,89"],
    ["18,86", "20,09", "21,67", "29,93"],
    ["19,01", "20,08", "21,40", "25,54"],
    ["19,12", "20,07", "21,21", "23,71"],
    ["19,21", "20,06", "21,06", "22,73"],
    ["19,29", "20,06", "20,95", "22,13"],
    ["19,36", "20,06", "20,85", "21,73"],
    ["19,41", "20,06", "20,78", "21,45"],
    ["19,46", "20,06", "20,72", "21,24"],
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckItem {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.passed)
    }
}

/// `"19,5"` → `39/2`; `None` for `---`.
pub fn parse_printed_ratio(cell: &str) -> Option<Rational> {
    if cell.trim() == "---" {
        return None;
    }
    Some(parse_decimal(&cell.replace(',', ".")))
}

fn parse_decimal(s: &str) -> Rational {
    match s.split_once('.') {
        None => parse_rational(s).expect("decimal"),
        Some((int, frac)) => {
            let den = BigInt::from(10).pow(frac.len() as u32);
            let num: BigInt = format!("{int}{frac}").parse().expect("decimal");
            Rational::new(num, den)
        }
    }
}

/// Compares the computed ratio table with the printed one at two decimals.
/// The printed table shows magnitudes.
pub fn ratio_table_mismatches(table: &ATable) -> Vec<(usize, Channel, String, String)> {
    let mut out = Vec::new();
    for (row, printed) in table.ratio_table().iter().zip(TABLE_RATIOS.iter()) {
        for (c, (value, cell)) in row.ratios.iter().zip(printed).enumerate() {
            let got = value.as_ref().map(|v| render_decimal(&num_traits::Signed::abs(v), 2));
            let want = parse_printed_ratio(cell).map(|v| render_decimal(&v, 2));
            if got != want {
                out.push((
                    row.n,
                    Channel::ALL[c],
                    got.unwrap_or_else(|| "---".into()),
                    want.unwrap_or_else(|| "---".into()),
                ));
            }
        }
    }
    out
}

fn quad(t: (i64, i64, i64)) -> UniPolyD {
    UniPolyD::quadratic(t.0, t.1, t.2)
}

/// Runs every table reproduction and consistency identity.
pub fn run_checks(table: &ATable, kazarian: &KazarianTable, order: usize) -> CheckReport {
    let mut items = Vec::new();

    let q1 = q_general(1).ok();
    items.push(CheckItem::new(
        "Q1 general",
        q1 == Some(LinearForm::from_ints(3, 2, 0, 1)),
        q1.map_or("error".into(), |q| q.to_string()),
    ));
    let q2 = q_general(2).ok();
    items.push(CheckItem::new(
        "Q2 general",
        q2 == Some(LinearForm::from_ints(18, 15, 2, 3)),
        q2.map_or("error".into(), |q| q.to_string()),
    ));

    for (n, &row) in TABLE_Q.iter().enumerate() {
        let want = quad(row);
        let ex = q_p2_extraction(n + 1).ok();
        let cl = q_p2_closed(n + 1).ok();
        let ok = ex.as_ref() == Some(&want) && cl.as_ref() == Some(&want);
        items.push(CheckItem::new(format!("Q{} on P2", n + 1), ok, want.to_string()));
    }
    for (j, &row) in TABLE_MINUS_C.iter().enumerate() {
        let n = j + 3;
        let want = -&quad(row);
        let got = c_correction_p2(n).ok();
        items.push(CheckItem::new(format!("C{n} on P2"), got.as_ref() == Some(&want), want.to_string()));
    }
    let oracle = (1..=8).all(|n| q_p2_closed(n).ok() == q_p2_extraction(n).ok());
    items.push(CheckItem::new("Q_n closed form = extraction, n <= 8", oracle, ""));

    let bell_ok = (1..=15).all(|r| {
        let full = complete_bell(r).ok();
        let sum = (1..=r).try_fold(crate::bell::SparsePoly::zero(r), |acc, l| {
            crate::bell::partial_bell(r, l).map(|p| acc.add(&p))
        });
        full.is_some() && full == sum.ok()
    });
    items.push(CheckItem::new("P_r = sum of partial Bell polynomials, r <= 15", bell_ok, ""));

    let ie = diagonal_inclusion_exclusion(3).ok();
    let ie_ok = ie.as_ref().is_some_and(|m| {
        m.len() == 2 && m.get(&vec![2, 1]) == Some(&BigInt::from(3)) && m.get(&vec![3]) == Some(&BigInt::from(-2))
    });
    items.push(CheckItem::new("r = 3 inclusion-exclusion 3Q1Q2 - 2Q3", ie_ok, ""));

    let mism = table.a_tilde_mismatches();
    let unexpected: Vec<_> = mism.iter().filter(|m| !is_known_tilde_typo(m)).collect();
    items.push(CheckItem::new(
        "a~_i = a_i/(i-1)!",
        unexpected.is_empty(),
        format!("{} unexpected, {} known sign typo(s)", unexpected.len(), mism.len() - unexpected.len()),
    ));

    for i in 2..=4 {
        match a_decomposition_check(i, table, kazarian) {
            Ok(rep) => {
                items.push(CheckItem::new(
                    format!("a_{i} decomposition (general surface)"),
                    rep.general_holds(),
                    format!("{} | {}", rep.general_lhs, rep.general_rhs),
                ));
                items.push(CheckItem::new(
                    format!("a_{i} decomposition (P2)"),
                    rep.p2_holds(),
                    format!("{} | {}", rep.p2_lhs, rep.p2_rhs),
                ));
            }
            Err(e) => items.push(CheckItem::new(format!("a_{i} decomposition"), false, e.to_string())),
        }
    }

    let e = excess_a1a2_p2();
    items.push(CheckItem::new("E_A1A2 on P2", e == UniPolyD::quadratic(60, -192, 144), e.to_string()));
    let s = |name: &str| kazarian.s_alpha(&name.parse().expect("label")).map(LinearForm::specialize_p2);
    let ex = match (s("A1A2"), s("A3")) {
        (Ok(a1a2), Ok(a3)) => a1a2 == (&e.scale(&ratio(1, 2)) + &a3).scale(&rat(-3)),
        _ => false,
    };
    items.push(CheckItem::new("S_A1A2 = -3(E/2 + S_A3) on P2", ex, ""));

    let ratios = ratio_table_mismatches(table);
    items.push(CheckItem::new(
        "ratio table at two decimals",
        ratios.is_empty(),
        ratios
            .iter()
            .map(|(n, c, got, want)| format!("n={n} {c}: {got} vs {want}"))
            .collect::<Vec<_>>()
            .join("; "),
    ));

    for ch in [Channel::Partial, Channel::X] {
        let (ok, detail) = match gyz_channel_residual(ch, order, table) {
            Ok(r) => {
                let support = residual_support(&r);
                let detail = support
                    .iter()
                    .map(|&n| format!("q^{n}: {}", r.coeff(n).expect("in range")))
                    .collect::<Vec<_>>()
                    .join(", ");
                (support.is_empty(), if detail.is_empty() { "0".into() } else { detail })
            }
            Err(e) => (false, e.to_string()),
        };
        items.push(CheckItem::new(format!("GYZ {ch}-channel residual through q^{order}"), ok, detail));
    }

    let b1 = match (recover_log_b1(order, table), recover_log_b1_by_substitution(order, table), recover_b1(order, table)) {
        (Ok(a), Ok(b), Ok(c)) => a == b && c.coeff(0) == Some(&rat(1)),
        _ => false,
    };
    items.push(CheckItem::new(format!("log B1 two derivations agree through q^{order}"), b1, ""));

    CheckReport { items }
}
