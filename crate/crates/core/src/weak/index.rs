use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which weak moment: `x^j` (univariate), `x^alpha` (multi-index) or the
/// sum-of-squares moment `|x|^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentIndex {
    Power(u32),
    MultiIndex(Vec<u32>),
    RadialPower2,
}

impl MomentIndex {
    pub fn is_valid_for(&self, dim: usize) -> bool {
        match self {
            MomentIndex::Power(_) => dim == 1,
            MomentIndex::MultiIndex(a) => a.len() == dim,
            MomentIndex::RadialPower2 => dim >= 2,
        }
    }

    /// The test function as a polynomial in `dim` variables.
    pub fn polynomial(&self, dim: usize) -> TestPolynomial {
        match self {
            MomentIndex::Power(j) => TestPolynomial::monomial(vec![*j]),
            MomentIndex::MultiIndex(a) => TestPolynomial::monomial(a.clone()),
            MomentIndex::RadialPower2 => TestPolynomial {
                terms: (0..dim)
                    .map(|k| {
                        let mut e = vec![0; dim];
                        e[k] = 2;
                        (1.0, e)
                    })
                    .collect(),
            },
        }
    }

    #[inline]
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            MomentIndex::Power(j) => x[0].powi(*j as i32),
            MomentIndex::MultiIndex(a) => x.iter().zip(a).map(|(v, &e)| v.powi(e as i32)).product(),
            MomentIndex::RadialPower2 => x.iter().map(|v| v * v).sum(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            MomentIndex::Power(j) => *j,
            MomentIndex::MultiIndex(a) => a.iter().sum(),
            MomentIndex::RadialPower2 => 2,
        }
    }
}

impl fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentIndex::Power(j) => write!(f, "{j}"),
            MomentIndex::MultiIndex(a) => {
                let parts: Vec<String> = a.iter().map(u32::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            MomentIndex::RadialPower2 => write!(f, "radial2"),
        }
    }
}

impl std::str::FromStr for MomentIndex {
    type Err = Error;

    /// `"2"`, `"(1,0)"` / `"1:0"`, or `"radial2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("radial2") || s.eq_ignore_ascii_case("r2") {
            return Ok(MomentIndex::RadialPower2);
        }
        let inner = s.trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split([',', ':']).map(str::trim).collect();
        let nums: std::result::Result<Vec<u32>, _> = parts.iter().map(|p| p.parse::<u32>()).collect();
        match nums {
            Ok(v) if v.len() == 1 && !s.starts_with('(') => Ok(MomentIndex::Power(v[0])),
            Ok(v) if !v.is_empty() => Ok(MomentIndex::MultiIndex(v)),
            _ => Err(Error::InvalidInput(format!("cannot parse moment index {s:?}"))),
        }
    }
}

/// An ordered set of moment indices without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MomentIndex>", into = "Vec<MomentIndex>")]
pub struct MomentSet {
    indices: Vec<MomentIndex>,
}

impl MomentSet {
    pub fn new(indices: Vec<MomentIndex>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("moment set is empty".into()));
        }
        for (i, a) in indices.iter().enumerate() {
            if indices[..i].contains(a) {
                return Err(Error::InvalidInput(format!("duplicate moment index {a}")));
            }
        }
        Ok(Self { indices })
    }

    /// `{Power(j) : j in orders}`.
    pub fn powers(orders: &[u32]) -> Result<Self> {
        Self::new(orders.iter().map(|&j| MomentIndex::Power(j)).collect())
    }

    /// First-order multi-indices for every coordinate of R^d.
    pub fn first_moments(dim: usize) -> Self {
        let indices = (0..dim)
            .map(|k| {
                let mut e = vec![0; dim];
                e[k] = 1;
                MomentIndex::MultiIndex(e)
            })
            .collect();
        Self { indices }
    }

    pub fn indices(&self) -> &[MomentIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        match self.indices.iter().find(|a| !a.is_valid_for(dim)) {
            Some(a) => Err(Error::InvalidInput(format!("moment index {a} is not valid in dimension {dim}"))),
            None => Ok(()),
        }
    }

    pub fn parse_list(s: &str) -> Result<Self> {
        // split on ';' or on commas outside parentheses
        let mut items = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        for ch in s.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch)
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch)
                }
                ',' | ';' if depth == 0 => {
                    items.push(std::mem::take(&mut cur));
                }
                _ => cur.push(ch),
            }
        }
        items.push(cur);
        let parsed: Result<Vec<MomentIndex>> =
            items.iter().filter(|s| !s.trim().is_empty()).map(|s| s.parse()).collect();
        Self::new(parsed?)
    }
}

impl TryFrom<Vec<MomentIndex>> for MomentSet {
    type Error = Error;
    fn try_from(v: Vec<MomentIndex>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MomentSet> for Vec<MomentIndex> {
    fn from(s: MomentSet) -> Self {
        s.indices
    }
}

impl fmt::Display for MomentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A polynomial test function `sum_k c_k x^{e_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestPolynomial {
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl TestPolynomial {
    pub fn monomial(exponents: Vec<u32>) -> Self {
        Self { terms: vec![(1.0, exponents)] }
    }

    pub fn constant(dim: usize) -> Self {
        Self::monomial(vec![0; dim])
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, ea) in &self.terms {
            for (b, eb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                terms.push((a * b, e));
            }
        }
        Self { terms }
    }

    #[inline]
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * x.iter().zip(e).map(|(v, &k)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum()).max().unwrap_or(0)
    }
}
