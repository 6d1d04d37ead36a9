//! Closed forms and recurrences for pattern-avoiding comb extensions.
//!
//! Every known result lives in a [`FormulaRegistry`] entry that carries its
//! own validity domain and proof status, so callers can iterate the registry
//! mechanically and fall back to brute force wherever no entry applies.

use std::fmt;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::PatternSet;
use crate::poset::{CombShape, CombSpec, Family};
use crate::BigCount;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{spec} is outside the domain of {id} ({domain})")]
    Domain {
        id: String,
        spec: String,
        domain: String,
    },
    #[error("{0} has no closed form; only observed values are known")]
    NoEvaluator(String),
    #[error("no formula entry named {0}")]
    UnknownId(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Proven,
    Conjectured,
    ObservedOnly,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Proven => "proven",
            Status::Conjectured => "conjectured",
            Status::ObservedOnly => "observed-only",
        })
    }
}

/// Where an entry's formula is claimed to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Every comb with equal teeth.
    AnyEven,
    /// Equal teeth, `s > 1` and `t > 1`.
    SpineAndToothAbove1,
    /// Equal teeth, `t > 1`.
    ToothAbove1,
    /// Equal teeth, `t == 2`.
    ToothIs2,
    /// Equal teeth, `t > 2`.
    ToothAbove2,
    /// Any alpha comb, including uneven ones; parameters are `(s, n)`.
    AnyAlphaSize,
}

impl Domain {
    pub fn describe(&self) -> &'static str {
        match self {
            Domain::AnyEven => "s >= 1, t >= 1",
            Domain::SpineAndToothAbove1 => "s > 1, t > 1",
            Domain::ToothAbove1 => "s >= 1, t > 1",
            Domain::ToothIs2 => "s >= 1, t = 2",
            Domain::ToothAbove2 => "s >= 1, t > 2",
            Domain::AnyAlphaSize => "s >= 1, n >= 0 (uneven alpha combs)",
        }
    }

    fn accepts(&self, spec: &CombSpec) -> bool {
        if let Domain::AnyAlphaSize = self {
            return spec.family() == Family::Alpha;
        }
        let Some((s, t)) = spec.even_params() else {
            return false;
        };
        match self {
            Domain::AnyEven => true,
            Domain::SpineAndToothAbove1 => s > 1 && t > 1,
            Domain::ToothAbove1 => t > 1,
            Domain::ToothIs2 => t == 2,
            Domain::ToothAbove2 => t > 2,
            Domain::AnyAlphaSize => unreachable!(),
        }
    }
}

/// How an entry computes its value.
#[derive(Clone, Copy)]
pub enum Evaluator {
    /// From the teeth count and tooth length.
    Even(fn(u32, u32) -> BigCount),
    /// From the teeth count and total size of an alpha comb.
    AlphaSize(fn(u32, u32) -> BigCount),
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evaluator::Even(_) => "Even(..)",
            Evaluator::AlphaSize(_) => "AlphaSize(..)",
        })
    }
}

#[derive(Debug, Clone)]
pub struct FormulaEntry {
    pub id: &'static str,
    pub family: Family,
    pub patterns: PatternSet,
    pub domain: Domain,
    pub status: Status,
    /// The statement, in `A(patterns; comb) = value` form.
    pub statement: &'static str,
    pub evaluator: Option<Evaluator>,
}

/// Serializable description of an entry, without the evaluator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryInfo {
    pub id: String,
    pub family: Family,
    pub patterns: PatternSet,
    pub domain: String,
    pub status: Status,
    pub statement: String,
}

impl FormulaEntry {
    pub fn covers(&self, family: Family, patterns: &PatternSet, spec: &CombSpec) -> bool {
        self.family == family
            && spec.family() == family
            && &self.patterns == patterns
            && self.domain.accepts(spec)
    }

    pub fn in_domain(&self, spec: &CombSpec) -> bool {
        spec.family() == self.family && self.domain.accepts(spec)
    }

    /// Evaluates at the comb `spec`, refusing points outside the domain.
    pub fn evaluate_spec(&self, spec: &CombSpec) -> Result<BigCount, FormulaError> {
        let evaluator = self
            .evaluator
            .ok_or_else(|| FormulaError::NoEvaluator(self.id.to_string()))?;
        if !self.in_domain(spec) {
            return Err(FormulaError::Domain {
                id: self.id.to_string(),
                spec: spec.to_string(),
                domain: self.domain.describe().to_string(),
            });
        }
        Ok(match evaluator {
            Evaluator::Even(f) => {
                let (s, t) = spec.even_params().expect("domain checked");
                f(s, t)
            }
            Evaluator::AlphaSize(f) => match spec.shape() {
                CombShape::Even { s, t } => f(s, s * t),
                CombShape::UnevenAlpha { s, n } => f(s, n),
                CombShape::UnevenBeta { .. } => unreachable!("domain is alpha only"),
            },
        })
    }

    /// Evaluates at the comb with `s` teeth of length `t`.
    pub fn evaluate(&self, s: u32, t: u32) -> Result<BigCount, FormulaError> {
        let spec = CombSpec::even(self.family, s, t)
            .map_err(|e| FormulaError::BadParams(e.to_string()))?;
        self.evaluate_spec(&spec)
    }

    pub fn info(&self) -> EntryInfo {
        EntryInfo {
            id: self.id.to_string(),
            family: self.family,
            patterns: self.patterns.clone(),
            domain: self.domain.describe().to_string(),
            status: self.status,
            statement: self.statement.to_string(),
        }
    }
}

pub fn evaluate(entry: &FormulaEntry, s: u32, t: u32) -> Result<BigCount, FormulaError> {
    entry.evaluate(s, t)
}

fn pow(base: u32, exp: u32) -> BigCount {
    BigUint::from(base).pow(exp)
}

/// The `k`-th Catalan number.
pub fn catalan(k: u32) -> BigCount {
    let k = BigUint::from(k);
    binomial(BigUint::from(2u32) * &k, k.clone()) / (k + 1u32)
}

/// Number of `(t+1)`-ary trees on `s` nodes, `binom(s(t+1), s) / (ts + 1)`.
pub fn fuss_catalan(s: u32, t: u32) -> BigCount {
    let s_big = BigUint::from(s);
    let top = &s_big * (t as u64 + 1);
    binomial(top, s_big) / (BigUint::from(t) * s + 1u32)
}

/// Count of (231, 312)-avoiding extensions of the alpha comb with `s` teeth
/// and `n` elements:
/// 1 for `n <= s`, `2^(n-s)` below `2s`, else `2 f(n-1) - f(n-s-1)`.
pub fn recurrence_231_312_alpha(s: u32, n: u32) -> BigCount {
    assert!(s >= 1, "alpha combs have at least one tooth");
    let (s, n) = (s as usize, n as usize);
    let mut f: Vec<BigCount> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let v = if m <= s {
            BigUint::one()
        } else if m < 2 * s {
            pow(2, (m - s) as u32)
        } else {
            BigUint::from(2u32) * &f[m - 1] - &f[m - s - 1]
        };
        f.push(v);
    }
    f.pop().expect("n + 1 values")
}

fn zero(_: u32, _: u32) -> BigCount {
    BigUint::default()
}

fn one(_: u32, _: u32) -> BigCount {
    BigUint::one()
}

fn catalan_s(s: u32, _: u32) -> BigCount {
    catalan(s)
}

fn catalan_gap(s: u32, _: u32) -> BigCount {
    catalan(s + 1) - catalan(s)
}

fn t_pow(s: u32, t: u32) -> BigCount {
    pow(t, s - 1)
}

fn t1_pow(s: u32, t: u32) -> BigCount {
    pow(t + 1, s - 1)
}

fn two_pow(s: u32, _: u32) -> BigCount {
    pow(2, s - 1)
}

fn choose2_plus1(s: u32, _: u32) -> BigCount {
    BigUint::from(s as u64 * (s as u64 - 1) / 2 + 1)
}

fn grid_plus1(s: u32, t: u32) -> BigCount {
    BigUint::from((s as u64 - 1) * (t as u64 - 1) + 1)
}

fn fuss(s: u32, t: u32) -> BigCount {
    fuss_catalan(s, t)
}

fn conjecture_231_321(s: u32, _: u32) -> BigCount {
    BigUint::from(s - 1) * pow(2, s - 1) + 1u32
}

struct Row {
    id: &'static str,
    family: Family,
    patterns: &'static [&'static str],
    domain: Domain,
    status: Status,
    statement: &'static str,
    evaluator: Option<Evaluator>,
}

const fn row(
    id: &'static str,
    family: Family,
    patterns: &'static [&'static str],
    domain: Domain,
    status: Status,
    statement: &'static str,
    evaluator: Option<Evaluator>,
) -> Row {
    Row {
        id,
        family,
        patterns,
        domain,
        status,
        statement,
        evaluator,
    }
}

use Domain::*;
use Evaluator::{AlphaSize, Even};
use Family::{Alpha, Beta};
use Status::*;

const STANDARD: &[Row] = &[
    row(
        "alpha-123",
        Alpha,
        &["123"],
        SpineAndToothAbove1,
        Proven,
        "A(123; alpha s,t) = 0",
        Some(Even(zero)),
    ),
    row(
        "alpha-132",
        Alpha,
        &["132"],
        AnyEven,
        Proven,
        "A(132; alpha s,t) = 1",
        Some(Even(one)),
    ),
    row(
        "alpha-213",
        Alpha,
        &["213"],
        ToothAbove1,
        Proven,
        "A(213; alpha s,t) = C(s)",
        Some(Even(catalan_s)),
    ),
    row(
        "alpha-231",
        Alpha,
        &["231"],
        AnyEven,
        ObservedOnly,
        "A(231; alpha s,t): open",
        None,
    ),
    row(
        "alpha-312-t2",
        Alpha,
        &["312"],
        ToothIs2,
        Proven,
        "A(312; alpha s,2) = C(s+1) - C(s)",
        Some(Even(catalan_gap)),
    ),
    row(
        "alpha-312",
        Alpha,
        &["312"],
        ToothAbove2,
        ObservedOnly,
        "A(312; alpha s,t), t > 2: open",
        None,
    ),
    row(
        "alpha-321",
        Alpha,
        &["321"],
        AnyEven,
        ObservedOnly,
        "A(321; alpha s,t): open",
        None,
    ),
    row(
        "beta-123",
        Beta,
        &["123"],
        SpineAndToothAbove1,
        Proven,
        "A(123; beta s,t) = 0",
        Some(Even(zero)),
    ),
    row(
        "beta-132",
        Beta,
        &["132"],
        AnyEven,
        Proven,
        "A(132; beta s,t) = 1",
        Some(Even(one)),
    ),
    row(
        "beta-213",
        Beta,
        &["213"],
        AnyEven,
        Proven,
        "A(213; beta s,t) = t^(s-1)",
        Some(Even(t_pow)),
    ),
    row(
        "beta-231",
        Beta,
        &["231"],
        AnyEven,
        Proven,
        "A(231; beta s,t) = t^(s-1)",
        Some(Even(t_pow)),
    ),
    row(
        "beta-312",
        Beta,
        &["312"],
        ToothAbove1,
        Proven,
        "A(312; beta s,t) = binom(s(t+1), s) / (ts+1)",
        Some(Even(fuss)),
    ),
    row(
        "beta-321-t2",
        Beta,
        &["321"],
        ToothIs2,
        Proven,
        "A(321; beta s,2) = A(312; beta s,2)",
        Some(Even(fuss)),
    ),
    row(
        "beta-321",
        Beta,
        &["321"],
        ToothAbove2,
        ObservedOnly,
        "A(321; beta s,t), t > 2: open",
        None,
    ),
    row(
        "alpha-213-231",
        Alpha,
        &["213", "231"],
        ToothAbove1,
        Proven,
        "A(213,231; alpha s,t) = 2^(s-1)",
        Some(Even(two_pow)),
    ),
    row(
        "alpha-213-312",
        Alpha,
        &["213", "312"],
        ToothAbove1,
        Proven,
        "A(213,312; alpha s,t) = 2^(s-1)",
        Some(Even(two_pow)),
    ),
    row(
        "alpha-213-321",
        Alpha,
        &["213", "321"],
        ToothAbove1,
        Proven,
        "A(213,321; alpha s,t) = binom(s,2) + 1",
        Some(Even(choose2_plus1)),
    ),
    row(
        "alpha-231-312",
        Alpha,
        &["231", "312"],
        AnyAlphaSize,
        Proven,
        "A(231,312; alpha s,n) = 1 | 2^(n-s) | 2f(n-1) - f(n-s-1)",
        Some(AlphaSize(recurrence_231_312_alpha)),
    ),
    row(
        "alpha-231-321-t2",
        Alpha,
        &["231", "321"],
        ToothIs2,
        Conjectured,
        "A(231,321; alpha s,2) = (s-1) 2^(s-1) + 1",
        Some(Even(conjecture_231_321)),
    ),
    row(
        "alpha-312-321",
        Alpha,
        &["312", "321"],
        AnyAlphaSize,
        Proven,
        "A(312,321; alpha s,n) = same recurrence as (231,312)",
        Some(AlphaSize(recurrence_231_312_alpha)),
    ),
    row(
        "beta-213-231",
        Beta,
        &["213", "231"],
        AnyEven,
        Proven,
        "A(213,231; beta s,t) = 1",
        Some(Even(one)),
    ),
    row(
        "beta-213-312",
        Beta,
        &["213", "312"],
        ToothAbove1,
        Proven,
        "A(213,312; beta s,t) = 2^(s-1)",
        Some(Even(two_pow)),
    ),
    row(
        "beta-213-321",
        Beta,
        &["213", "321"],
        AnyEven,
        Proven,
        "A(213,321; beta s,t) = (s-1)(t-1) + 1",
        Some(Even(grid_plus1)),
    ),
    row(
        "beta-231-312",
        Beta,
        &["231", "312"],
        ToothAbove1,
        Proven,
        "A(231,312; beta s,t) = 2^(s-1)",
        Some(Even(two_pow)),
    ),
    row(
        "beta-231-321",
        Beta,
        &["231", "321"],
        AnyEven,
        Proven,
        "A(231,321; beta s,t) = t^(s-1)",
        Some(Even(t_pow)),
    ),
    row(
        "beta-312-321",
        Beta,
        &["312", "321"],
        ToothAbove1,
        Proven,
        "A(312,321; beta s,t) = (t+1)^(s-1)",
        Some(Even(t1_pow)),
    ),
];

/// The set of known results, in a fixed order.
#[derive(Debug, Clone)]
pub struct FormulaRegistry {
    entries: Vec<FormulaEntry>,
}

impl Default for FormulaRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl FormulaRegistry {
    pub fn standard() -> Self {
        let entries = STANDARD
            .iter()
            .map(|r| FormulaEntry {
                id: r.id,
                family: r.family,
                patterns: PatternSet::parse(r.patterns).expect("static patterns are valid"),
                domain: r.domain,
                status: r.status,
                statement: r.statement,
                evaluator: r.evaluator,
            })
            .collect();
        FormulaRegistry { entries }
    }

    pub fn from_entries(entries: Vec<FormulaEntry>) -> Self {
        FormulaRegistry { entries }
    }

    pub fn entries(&self) -> &[FormulaEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Result<&FormulaEntry, FormulaError> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| FormulaError::UnknownId(id.to_string()))
    }

    /// First entry with an evaluator covering the point whose status is in `allowed`.
    pub fn find(
        &self,
        patterns: &PatternSet,
        spec: &CombSpec,
        allowed: &[Status],
    ) -> Option<&FormulaEntry> {
        self.entries.iter().find(|e| {
            e.evaluator.is_some()
                && allowed.contains(&e.status)
                && e.covers(spec.family(), patterns, spec)
        })
    }

    /// The proven entry covering the point, if any.
    pub fn proven(&self, patterns: &PatternSet, spec: &CombSpec) -> Option<&FormulaEntry> {
        self.find(patterns, spec, &[Status::Proven])
    }

    pub fn infos(&self) -> Vec<EntryInfo> {
        self.entries.iter().map(FormulaEntry::info).collect()
    }
}
