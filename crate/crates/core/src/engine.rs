//! Interchangeable counting engines behind one trait, registered by name.
//!
//! Each engine answers "how many linear extensions of this comb avoid these
//! patterns" by its own route. The `auto` engine tries the others in priority
//! order and uses the first that supports the query.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::{count_avoiding, EnumerateError};
use crate::formulas::{FormulaError, FormulaRegistry};
use crate::gentree::{succession_profiles, GenTreeError};
use crate::perm::PatternSet;
use crate::poset::{CombShape, CombSpec, Family};
use crate::series::gf_231_alpha_t2;
use crate::BigCount;

/// Default largest comb the brute-force engine will enumerate.
pub const DEFAULT_BRUTE_LIMIT: u32 = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("brute force limited to {limit} elements; {spec} has {size}")]
    BudgetExceeded { spec: String, size: u32, limit: u32 },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("no proven formula covers {patterns} on {spec}")]
    NoFormula { patterns: String, spec: String },
    #[error("engine {engine} does not handle {patterns} on {spec}")]
    Unsupported {
        engine: &'static str,
        patterns: String,
        spec: String,
    },
    #[error("no engine can answer {patterns} on {spec}")]
    NoEngine { patterns: String, spec: String },
    #[error("unknown engine {0:?}")]
    UnknownEngine(String),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    GenTree(#[from] GenTreeError),
}

/// Which engine produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Formula,
    GenTree,
    Series,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Brute,
        Method::Formula,
        Method::GenTree,
        Method::Series,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Formula => "formula",
            Method::GenTree => "gentree",
            Method::Series => "series",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| EngineError::UnknownEngine(s.to_string()))
    }
}

/// One point to count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountQuery {
    pub comb: CombSpec,
    pub patterns: PatternSet,
}

impl CountQuery {
    pub fn new(comb: CombSpec, patterns: PatternSet) -> Self {
        CountQuery { comb, patterns }
    }

    fn unsupported(&self, engine: &'static str) -> EngineError {
        EngineError::Unsupported {
            engine,
            patterns: self.patterns.to_string(),
            spec: self.comb.to_string(),
        }
    }
}

/// A value together with the engine that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counted {
    pub value: BigCount,
    pub method: Method,
}

pub trait CountEngine: Send + Sync {
    fn method(&self) -> Method;

    /// Whether `count` is expected to succeed without exceeding budgets.
    fn supports(&self, query: &CountQuery) -> bool;

    fn count(&self, query: &CountQuery) -> Result<BigCount, EngineError>;
}

/// Exhaustive enumeration with prefix pruning.
#[derive(Debug, Clone)]
pub struct BruteEngine {
    limit: u32,
}

impl BruteEngine {
    pub fn new(limit: u32) -> Self {
        BruteEngine { limit }
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }
}

impl Default for BruteEngine {
    fn default() -> Self {
        BruteEngine::new(DEFAULT_BRUTE_LIMIT)
    }
}

impl CountEngine for BruteEngine {
    fn method(&self) -> Method {
        Method::Brute
    }

    fn supports(&self, query: &CountQuery) -> bool {
        query.comb.size() <= self.limit
    }

    fn count(&self, query: &CountQuery) -> Result<BigCount, EngineError> {
        let size = query.comb.size();
        if size > self.limit {
            return Err(EngineError::BudgetExceeded {
                spec: query.comb.to_string(),
                size,
                limit: self.limit,
            });
        }
        Ok(count_avoiding(&query.comb.build(), &query.patterns)?)
    }
}

/// Proven closed forms and recurrences from a [`FormulaRegistry`].
#[derive(Debug, Clone, Default)]
pub struct FormulaEngine {
    registry: FormulaRegistry,
}

impl FormulaEngine {
    pub fn new(registry: FormulaRegistry) -> Self {
        FormulaEngine { registry }
    }

    pub fn registry(&self) -> &FormulaRegistry {
        &self.registry
    }
}

impl CountEngine for FormulaEngine {
    fn method(&self) -> Method {
        Method::Formula
    }

    fn supports(&self, query: &CountQuery) -> bool {
        self.registry.proven(&query.patterns, &query.comb).is_some()
    }

    fn count(&self, query: &CountQuery) -> Result<BigCount, EngineError> {
        let entry = self
            .registry
            .proven(&query.patterns, &query.comb)
            .ok_or_else(|| EngineError::NoFormula {
                patterns: query.patterns.to_string(),
                spec: query.comb.to_string(),
            })?;
        Ok(entry.evaluate_spec(&query.comb)?)
    }
}

/// The 312-avoiding beta-comb succession rule. Works for uneven beta combs
/// too; tooth length one is excluded since the rule needs `t > 1`.
#[derive(Debug, Clone, Default)]
pub struct GenTreeEngine;

impl GenTreeEngine {
    fn tooth_and_size(query: &CountQuery) -> Option<(u32, u32)> {
        if query.comb.family() != Family::Beta
            || query.patterns != PatternSet::parse(&["312"]).ok()?
        {
            return None;
        }
        let t = match query.comb.shape() {
            CombShape::Even { t, .. } | CombShape::UnevenBeta { t, .. } => t,
            CombShape::UnevenAlpha { .. } => return None,
        };
        (t > 1).then(|| (t, query.comb.size()))
    }
}

impl CountEngine for GenTreeEngine {
    fn method(&self) -> Method {
        Method::GenTree
    }

    fn supports(&self, query: &CountQuery) -> bool {
        Self::tooth_and_size(query).is_some()
    }

    fn count(&self, query: &CountQuery) -> Result<BigCount, EngineError> {
        let (t, n) = Self::tooth_and_size(query).ok_or_else(|| query.unsupported("gentree"))?;
        let profiles = succession_profiles(t, n as usize)?;
        Ok(profiles[n as usize].total())
    }
}

/// Coefficients of the generating function matching 231-avoiding extensions
/// of alpha combs with teeth of length two. The match is observed, not proven,
/// so `auto` never selects this engine.
#[derive(Debug, Clone, Default)]
pub struct SeriesEngine;

impl SeriesEngine {
    fn spine(query: &CountQuery) -> Option<u32> {
        let (s, t) = query.comb.even_params()?;
        let wanted = PatternSet::parse(&["231"]).ok()?;
        (query.comb.family() == Family::Alpha && t == 2 && query.patterns == wanted).then_some(s)
    }
}

impl CountEngine for SeriesEngine {
    fn method(&self) -> Method {
        Method::Series
    }

    fn supports(&self, query: &CountQuery) -> bool {
        Self::spine(query).is_some()
    }

    fn count(&self, query: &CountQuery) -> Result<BigCount, EngineError> {
        let s = Self::spine(query).ok_or_else(|| query.unsupported("series"))?;
        let coeffs = gf_231_alpha_t2(s as usize + 1)
            .count_coeffs()
            .expect("generating function has nonnegative integer coefficients");
        Ok(coeffs[s as usize].clone())
    }
}

/// Engines by method, plus the `auto` selection order.
#[derive(Clone)]
pub struct EngineRegistry {
    engines: BTreeMap<Method, Arc<dyn CountEngine>>,
    auto_order: Vec<Method>,
}

impl fmt::Debug for EngineRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EngineRegistry")
            .field("engines", &self.engines.keys().collect::<Vec<_>>())
            .field("auto_order", &self.auto_order)
            .finish()
    }
}

impl EngineRegistry {
    pub fn empty() -> Self {
        EngineRegistry {
            engines: BTreeMap::new(),
            auto_order: Vec::new(),
        }
    }

    /// Brute force, proven formulas, the succession rule and the series.
    /// `auto` prefers a proven formula, then the generating tree, then brute force.
    pub fn standard(brute_limit: u32) -> Self {
        Self::with_formulas(FormulaRegistry::standard(), brute_limit)
    }

    pub fn with_formulas(formulas: FormulaRegistry, brute_limit: u32) -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(BruteEngine::new(brute_limit)));
        reg.register(Arc::new(FormulaEngine::new(formulas)));
        reg.register(Arc::new(GenTreeEngine));
        reg.register(Arc::new(SeriesEngine));
        reg.auto_order = vec![Method::Formula, Method::GenTree, Method::Brute];
        reg
    }

    pub fn register(&mut self, engine: Arc<dyn CountEngine>) {
        self.engines.insert(engine.method(), engine);
    }

    pub fn set_auto_order(&mut self, order: Vec<Method>) {
        self.auto_order = order;
    }

    pub fn get(&self, method: Method) -> Option<Arc<dyn CountEngine>> {
        self.engines.get(&method).cloned()
    }

    pub fn by_name(&self, name: &str) -> Result<Arc<dyn CountEngine>, EngineError> {
        let method: Method = name.parse()?;
        self.get(method)
            .ok_or_else(|| EngineError::UnknownEngine(name.to_string()))
    }

    pub fn methods(&self) -> Vec<Method> {
        self.engines.keys().copied().collect()
    }

    /// The engine `auto` would use for `query`.
    pub fn select(&self, query: &CountQuery) -> Option<Arc<dyn CountEngine>> {
        self.auto_order
            .iter()
            .filter_map(|m| self.engines.get(m))
            .find(|e| e.supports(query))
            .cloned()
    }

    pub fn count_auto(&self, query: &CountQuery) -> Result<Counted, EngineError> {
        let Some(engine) = self.select(query) else {
            // nothing applies; report the brute-force budget when that is why
            return Err(match self.engines.get(&Method::Brute) {
                Some(brute) => brute
                    .count(query)
                    .err()
                    .unwrap_or_else(|| self.no_engine(query)),
                None => self.no_engine(query),
            });
        };
        Ok(Counted {
            value: engine.count(query)?,
            method: engine.method(),
        })
    }

    fn no_engine(&self, query: &CountQuery) -> EngineError {
        EngineError::NoEngine {
            patterns: query.patterns.to_string(),
            spec: query.comb.to_string(),
        }
    }

    /// Counts with the named engine, or `auto` when `method` is `None`.
    pub fn count(
        &self,
        query: &CountQuery,
        method: Option<Method>,
    ) -> Result<Counted, EngineError> {
        match method {
            None => self.count_auto(query),
            Some(m) => {
                let engine = self
                    .get(m)
                    .ok_or_else(|| EngineError::UnknownEngine(m.to_string()))?;
                Ok(Counted {
                    value: engine.count(query)?,
                    method: m,
                })
            }
        }
    }
}

impl Default for EngineRegistry {
    fn default() -> Self {
        Self::standard(DEFAULT_BRUTE_LIMIT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn q(comb: CombSpec, ps: &[&str]) -> CountQuery {
        CountQuery::new(comb, PatternSet::parse(ps).unwrap())
    }

    #[test]
    fn auto_prefers_formula_then_gentree_then_brute() {
        let reg = EngineRegistry::default();
        let beta = q(CombSpec::beta(3, 2).unwrap(), &["312"]);
        assert_eq!(reg.select(&beta).unwrap().method(), Method::Formula);
        let uneven = q(CombSpec::uneven_beta(2, 7).unwrap(), &["312"]);
        assert_eq!(reg.select(&uneven).unwrap().method(), Method::GenTree);
        let open = q(CombSpec::alpha(3, 2).unwrap(), &["321"]);
        assert_eq!(reg.select(&open).unwrap().method(), Method::Brute);
        let too_big = q(CombSpec::alpha(5, 4).unwrap(), &["321"]);
        assert!(reg.select(&too_big).is_none());
        assert!(matches!(
            reg.count_auto(&too_big),
            Err(EngineError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn engines_agree_on_shared_points() {
        let reg = EngineRegistry::default();
        let query = q(CombSpec::beta(4, 3).unwrap(), &["312"]);
        for m in [Method::Brute, Method::Formula, Method::GenTree] {
            assert_eq!(
                reg.count(&query, Some(m)).unwrap().value,
                BigUint::from(140u32),
                "{m}"
            );
        }
        let series = q(CombSpec::alpha(4, 2).unwrap(), &["231"]);
        assert_eq!(
            reg.count(&series, Some(Method::Series)).unwrap().value,
            BigUint::from(44u32)
        );
        assert_eq!(
            reg.count(&series, Some(Method::Brute)).unwrap().value,
            BigUint::from(44u32)
        );
    }

    #[test]
    fn unsupported_queries_error() {
        let reg = EngineRegistry::default();
        let query = q(CombSpec::alpha(3, 3).unwrap(), &["231"]);
        assert!(matches!(
            reg.count(&query, Some(Method::Formula)),
            Err(EngineError::NoFormula { .. })
        ));
        assert!(matches!(
            reg.count(&query, Some(Method::GenTree)),
            Err(EngineError::Unsupported { .. })
        ));
        assert!(matches!(
            reg.count(&query, Some(Method::Series)),
            Err(EngineError::Unsupported { .. })
        ));
    }

    #[test]
    fn lookup_by_name() {
        let reg = EngineRegistry::default();
        assert_eq!(reg.by_name("gentree").unwrap().method(), Method::GenTree);
        assert!(matches!(
            reg.by_name("magic"),
            Err(EngineError::UnknownEngine(_))
        ));
        assert_eq!(reg.methods(), Method::ALL.to_vec());
    }

    #[test]
    fn brute_budget() {
        let brute = BruteEngine::new(6);
        let query = q(CombSpec::beta(4, 2).unwrap(), &["312"]);
        assert!(!brute.supports(&query));
        assert!(matches!(
            brute.count(&query),
            Err(EngineError::BudgetExceeded {
                size: 8,
                limit: 6,
                ..
            })
        ));
    }

    #[test]
    fn formula_engine_skips_conjectures() {
        let reg = EngineRegistry::default();
        let query = q(CombSpec::alpha(4, 2).unwrap(), &["231", "321"]);
        assert_eq!(reg.select(&query).unwrap().method(), Method::Brute);
        let formulas = reg.get(Method::Formula).unwrap();
        assert!(!formulas.supports(&query));
    }
}
