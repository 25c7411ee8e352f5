use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

use crate::bits::BitSet;

use super::item::Item;
use super::relation::BinaryRelation;

/// An error bound in `[0, 1]`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Threshold(Ratio<u64>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("`{0}` is not a decimal number")]
    Syntax(String),
    #[error("`{0}` is outside [0, 1]")]
    Range(String),
}

impl Threshold {
    pub const ZERO: Threshold = Threshold(Ratio::new_raw(0, 1));

    pub fn new(numer: u64, denom: u64) -> Option<Self> {
        if denom == 0 || numer > denom {
            return None;
        }
        Some(Threshold(Ratio::new(numer, denom)))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    pub fn admits(self, report: &ErrorReport) -> bool {
        report.e3 <= self.0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl FromStr for Threshold {
    type Err = ThresholdError;

    /// Plain decimal notation (`0`, `0.25`, `1.0`, `.5`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let syntax = || ThresholdError::Syntax(s.to_string());
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(syntax());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| syntax())? };
        if int > 1 {
            return Err(ThresholdError::Range(s.to_string()));
        }
        let denom = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| syntax())? };
        Threshold::new(int * denom + frac, denom).ok_or_else(|| ThresholdError::Range(s.to_string()))
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_decimal(self.0))
    }
}

/// Six fractional digits with trailing zeros trimmed: `0`, `0.5`, `0.666667`.
pub fn format_decimal(r: Ratio<u64>) -> String {
    let scaled = (u128::from(*r.numer()) * 1_000_000 * 2 + u128::from(*r.denom()))
        / (u128::from(*r.denom()) * 2);
    let (int, frac) = (scaled / 1_000_000, scaled % 1_000_000);
    if frac == 0 {
        return int.to_string();
    }
    let digits = format!("{frac:06}");
    format!("{int}.{}", digits.trim_end_matches('0'))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorReport {
    /// Matches satisfying the LHS but not the RHS.
    pub violations: u64,
    pub match_count: u64,
    pub adom: u64,
    /// `violations / (match_count - adom)`, saturated at 1.
    pub e3: Ratio<u64>,
    /// `match_count <= adom`; `e3` is then 0 or 1 by whether violations exist.
    pub denominator_degenerate: bool,
}

impl ErrorReport {
    pub fn new(violations: u64, match_count: u64, adom: u64) -> Self {
        debug_assert!(violations <= match_count);
        let (e3, denominator_degenerate) = if match_count > adom {
            let raw = Ratio::new(violations, match_count - adom);
            (raw.min(Ratio::from_integer(1)), false)
        } else {
            (Ratio::from_integer(u64::from(violations > 0)), true)
        };
        Self {
            violations,
            match_count,
            adom,
            e3,
            denominator_degenerate,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.violations == 0
    }
}

/// 0 for an empty LHS, 2 if it holds a variable or id item, else 1.
pub fn adom<'a>(lhs: impl IntoIterator<Item = &'a Item>) -> u64 {
    lhs.into_iter().map(Item::adom).max().unwrap_or(0)
}

/// Error of `lhs -> rhs` over the relation's matches.
pub fn compute_e3(lhs: &BitSet, rhs: usize, relation: &BinaryRelation) -> ErrorReport {
    assert!(!lhs.contains(rhs), "rhs must not occur in the lhs");
    let mut violating = relation.column(rhs).clone();
    violating.complement();
    for item in lhs.iter() {
        violating.intersect_with(relation.column(item));
    }
    let universe = relation.universe();
    ErrorReport::new(
        violating.count() as u64,
        relation.match_count() as u64,
        adom(lhs.iter().map(|i| universe.item(i))),
    )
}
