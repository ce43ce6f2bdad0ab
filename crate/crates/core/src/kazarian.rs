//! Thom polynomials `S_α` of multisingularity types up to codimension 4 and
//! the count of curves with a prescribed multisingularity.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chow::LinearForm;
use crate::exact::{factorial_u, int_to_rat, parse_rational, BigInt, Rational};
use crate::partition::Partitions;
use crate::surface::ChernNumbers;

const EMBEDDED: &str = include_str!("../data/kazarian.json");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KazarianError {
    #[error("cannot parse multisingularity type {0:?}")]
    Parse(String),
    #[error("type {0} is not in the table")]
    Missing(String),
    #[error("bad table data: {0}")]
    Data(String),
    #[error("could not read {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Singularity label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    A1,
    A2,
    A3,
    A4,
    D4,
}

impl Label {
    pub fn codim(self) -> usize {
        match self {
            Label::A1 => 1,
            Label::A2 => 2,
            Label::A3 => 3,
            Label::A4 | Label::D4 => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Label::A1 => "A1",
            Label::A2 => "A2",
            Label::A3 => "A3",
            Label::A4 => "A4",
            Label::D4 => "D4",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Multiset of labels, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultisingularityType {
    labels: Vec<Label>,
}

impl MultisingularityType {
    pub fn new(mut labels: Vec<Label>) -> Self {
        labels.sort_unstable();
        Self { labels }
    }

    /// `A₁^r`
    pub fn nodes(r: usize) -> Self {
        Self::new(vec![Label::A1; r])
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn codim(&self) -> usize {
        self.labels.iter().map(|l| l.codim()).sum()
    }

    fn multiplicities(&self) -> BTreeMap<Label, usize> {
        let mut m = BTreeMap::new();
        for &l in &self.labels {
            *m.entry(l).or_insert(0) += 1;
        }
        m
    }

    /// `Π (multiplicity)!`
    pub fn aut_order(&self) -> BigInt {
        self.multiplicities()
            .values()
            .fold(BigInt::one(), |acc, &m| acc * factorial_u(m as u64))
    }

    /// Sub-multiset picked out by 0-based positions.
    pub fn restrict(&self, positions: &[usize]) -> Self {
        Self::new(positions.iter().map(|&i| self.labels[i]).collect())
    }
}

impl fmt::Display for MultisingularityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .multiplicities()
            .into_iter()
            .map(|(l, m)| if m == 1 { l.to_string() } else { format!("{l}^{m}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Accepts `A1^2*A2`, `A1^2A2`, `A1A1A2` and spacing variants.
impl FromStr for MultisingularityType {
    type Err = KazarianError;
    fn from_str(s: &str) -> Result<Self, KazarianError> {
        let err = || KazarianError::Parse(s.to_string());
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut labels = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if chars[i] == '*' {
                i += 1;
                continue;
            }
            let label = match (chars.get(i), chars.get(i + 1)) {
                (Some('A'), Some('1')) => Label::A1,
                (Some('A'), Some('2')) => Label::A2,
                (Some('A'), Some('3')) => Label::A3,
                (Some('A'), Some('4')) => Label::A4,
                (Some('D'), Some('4')) => Label::D4,
                _ => return Err(err()),
            };
            i += 2;
            let mut mult = 1usize;
            if chars.get(i) == Some(&'^') {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                mult = digits.parse().map_err(|_| err())?;
                if mult == 0 {
                    return Err(err());
                }
            }
            labels.extend(std::iter::repeat_n(label, mult));
        }
        if labels.is_empty() {
            return Err(err());
        }
        Ok(Self::new(labels))
    }
}

impl Serialize for MultisingularityType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Deserialize)]
struct Row {
    labels: String,
    d: String,
    k: String,
    s: String,
    x: String,
}

/// `S_α` for every type in the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KazarianTable {
    rows: BTreeMap<MultisingularityType, LinearForm>,
}

impl KazarianTable {
    pub fn embedded() -> Self {
        Self::from_json(EMBEDDED).expect("embedded table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, KazarianError> {
        let rows: Vec<Row> = serde_json::from_str(text).map_err(|e| KazarianError::Data(e.to_string()))?;
        let mut out = BTreeMap::new();
        for row in rows {
            let ty: MultisingularityType = row.labels.parse()?;
            let p = |v: &str| parse_rational(v).map_err(|e| KazarianError::Data(e.to_string()));
            let form = LinearForm::new(p(&row.d)?, p(&row.k)?, p(&row.s)?, p(&row.x)?);
            if out.insert(ty.clone(), form).is_some() {
                return Err(KazarianError::Data(format!("duplicate row {ty}")));
            }
        }
        Ok(Self { rows: out })
    }

    pub fn load(path: &Path) -> Result<Self, KazarianError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KazarianError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn s_alpha(&self, alpha: &MultisingularityType) -> Result<&LinearForm, KazarianError> {
        self.rows.get(alpha).ok_or_else(|| KazarianError::Missing(alpha.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultisingularityType, &LinearForm)> {
        self.rows.iter()
    }

    /// Types of the given codimension, in table order.
    pub fn of_codim(&self, codim: usize) -> Vec<&MultisingularityType> {
        self.rows.keys().filter(|t| t.codim() == codim).collect()
    }

    /// `N_α = (1/#Aut α) Σ_{J₁ ⊔ … ⊔ J_l = [r]} Π S_{α_{J_i}}`, the sum running
    /// over unordered set partitions of the label positions.
    pub fn count_multisingular(&self, alpha: &MultisingularityType, chern: &ChernNumbers) -> Result<Rational, KazarianError> {
        if alpha.is_empty() {
            return Ok(Rational::one());
        }
        let mut total = Rational::zero();
        for pi in Partitions::new(alpha.len()) {
            let mut prod = Rational::one();
            for block in pi.blocks() {
                let positions: Vec<usize> = block.iter().map(|&e| e - 1).collect();
                prod *= self.s_alpha(&alpha.restrict(&positions))?.eval(chern);
            }
            total += prod;
        }
        Ok(total / int_to_rat(&alpha.aut_order()))
    }
}

pub fn s_alpha(alpha: &MultisingularityType) -> Result<LinearForm, KazarianError> {
    KazarianTable::embedded().s_alpha(alpha).cloned()
}

pub fn aut_order(alpha: &MultisingularityType) -> BigInt {
    alpha.aut_order()
}

pub fn count_multisingular(alpha: &MultisingularityType, chern: &ChernNumbers) -> Result<Rational, KazarianError> {
    KazarianTable::embedded().count_multisingular(alpha, chern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn ty(s: &str) -> MultisingularityType {
        s.parse().unwrap()
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!(ty("A1^2*A2"), MultisingularityType::new(vec![Label::A2, Label::A1, Label::A1]));
        assert_eq!(ty("A1A1A2"), ty("A1^2*A2"));
        assert_eq!(ty("A2 * A1^2").to_string(), "A1^2*A2");
        assert_eq!(ty("D4").codim(), 4);
        assert!("B2".parse::<MultisingularityType>().is_err());
        assert!("".parse::<MultisingularityType>().is_err());
        assert!("A1^0".parse::<MultisingularityType>().is_err());
    }

    #[test]
    fn table_rows() {
        let t = KazarianTable::embedded();
        assert_eq!(t.entries().count(), 12);
        assert_eq!(t.s_alpha(&ty("A1")).unwrap(), &LinearForm::from_ints(3, 2, 0, 1));
        assert_eq!(t.s_alpha(&ty("A1A2")).unwrap(), &LinearForm::from_ints(-240, -288, -72, -24));
        assert_eq!(
            t.s_alpha(&ty("A1^4")).unwrap(),
            &LinearForm::from_ints(-72360, -95670, -28842, -3888)
        );
        assert!(matches!(t.s_alpha(&ty("A1^5")), Err(KazarianError::Missing(_))));
        assert!(t.entries().all(|(k, _)| k.codim() <= 4));
        assert_eq!(t.of_codim(4).len(), 6);
    }

    #[test]
    fn automorphisms() {
        assert_eq!(ty("A1A2").aut_order(), BigInt::from(1));
        assert_eq!(ty("A1^2").aut_order(), BigInt::from(2));
        assert_eq!(ty("A1^4").aut_order(), BigInt::from(24));
        assert_eq!(ty("A1^2*A2^2").aut_order(), BigInt::from(4));
    }

    #[test]
    fn counts() {
        let t = KazarianTable::embedded();
        let c = ChernNumbers::p2(5);
        let s = |n: &str| t.s_alpha(&ty(n)).unwrap().eval(&c);
        assert_eq!(t.count_multisingular(&ty("A1"), &c).unwrap(), s("A1"));
        assert_eq!(t.count_multisingular(&ty("A1A2"), &c).unwrap(), s("A1") * s("A2") + s("A1A2"));
        let n2 = t.count_multisingular(&ty("A1^2"), &ChernNumbers::p2(4)).unwrap();
        assert_eq!(n2, rat(225));
    }

    #[test]
    fn agrees_with_ordered_partition_brute_force() {
        // sum over ordered set partitions, divided by l! for the block order
        fn ordered(t: &KazarianTable, alpha: &MultisingularityType, chern: &ChernNumbers) -> Rational {
            let r = alpha.len();
            let mut total = Rational::zero();
            // assign each position a block index, keep surjective assignments
            let mut assign = vec![0usize; r];
            loop {
                let l = assign.iter().max().map_or(0, |m| m + 1);
                let surjective = (0..l).all(|b| assign.contains(&b));
                if surjective {
                    let mut prod = Rational::one();
                    for b in 0..l {
                        let pos: Vec<usize> = (0..r).filter(|&i| assign[i] == b).collect();
                        prod *= t.s_alpha(&alpha.restrict(&pos)).unwrap().eval(chern);
                    }
                    total += prod / int_to_rat(&factorial_u(l as u64));
                }
                let mut i = 0;
                while i < r {
                    assign[i] += 1;
                    if assign[i] < r {
                        break;
                    }
                    assign[i] = 0;
                    i += 1;
                }
                if i == r {
                    break;
                }
            }
            total / int_to_rat(&alpha.aut_order())
        }
        let t = KazarianTable::embedded();
        let chern = ChernNumbers::new(7, -4, 3, 11);
        for (alpha, _) in t.entries() {
            assert_eq!(t.count_multisingular(alpha, &chern).unwrap(), ordered(&t, alpha, &chern), "{alpha}");
        }
    }
}
