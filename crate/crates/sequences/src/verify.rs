//! Cross-engine verification of the formula registry and the published tables.

use std::collections::HashMap;
use std::fmt;

use combx_core::engine::{CountEngine, GenTreeEngine, SeriesEngine};
use combx_core::enumerate::count_avoiding;
use combx_core::formulas::{Evaluator, FormulaEntry, FormulaRegistry, Status};
use combx_core::{BigCount, CombSpec, CountQuery, Family, PatternSet};
use rayon::prelude::*;
use serde::Serialize;

use crate::fixtures::{Tag, TABLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// Disagreement on a result that is not claimed as proven.
    Finding,
    /// Nothing to compare against within the size limit.
    Skipped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Finding => "FINDING",
            Outcome::Skipped => "SKIP",
        })
    }
}

/// One comparison at one point.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub subject: String,
    pub point: String,
    /// Engine or source name and its value.
    pub values: Vec<(String, String)>,
    pub outcome: Outcome,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<7} {} {}",
            self.outcome.to_string(),
            self.subject,
            self.point
        )?;
        for (name, v) in &self.values {
            write!(f, " {name}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub max_n: u32,
    pub lines: Vec<CheckLine>,
}

impl VerificationReport {
    fn count(&self, outcome: Outcome) -> usize {
        self.lines.iter().filter(|l| l.outcome == outcome).count()
    }

    pub fn passed(&self) -> usize {
        self.count(Outcome::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| l.outcome == Outcome::Fail)
    }

    pub fn findings(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| l.outcome == Outcome::Finding)
    }

    /// True when no gated check failed.
    pub fn is_ok(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} passed, {} failed, {} findings, {} skipped (n <= {})",
            self.passed(),
            self.count(Outcome::Fail),
            self.count(Outcome::Finding),
            self.count(Outcome::Skipped),
            self.max_n
        )
    }

    /// Lines whose subject starts with `prefix`.
    pub fn about<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckLine> + 'a {
        self.lines
            .iter()
            .filter(move |l| l.subject.starts_with(prefix))
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        writeln!(f, "{}", self.summary())
    }
}

/// Brute-force counts shared by every check that needs them.
struct BruteCache {
    limit: u32,
    values: HashMap<(CombSpec, PatternSet), BigCount>,
}

impl BruteCache {
    fn fill(limit: u32, wanted: Vec<(CombSpec, PatternSet)>) -> Self {
        let mut wanted = wanted;
        wanted.retain(|(spec, _)| spec.size() <= limit);
        wanted.sort_by_key(|(spec, ps)| (spec.to_string(), ps.to_string()));
        wanted.dedup();
        let values = wanted
            .into_par_iter()
            .map(|(spec, ps)| {
                let v = count_avoiding(&spec.build(), &ps).expect("limit keeps combs small");
                ((spec, ps), v)
            })
            .collect();
        BruteCache { limit, values }
    }

    fn get(&self, spec: &CombSpec, ps: &PatternSet) -> Option<&BigCount> {
        if spec.size() > self.limit {
            return None;
        }
        self.values.get(&(*spec, ps.clone()))
    }
}

/// A point at which some reference values are compared.
struct Job {
    subject: String,
    spec: CombSpec,
    patterns: PatternSet,
    /// Values known before brute force: formula, published cell, other engines.
    claims: Vec<(String, BigCount)>,
    /// A reference value that could not be produced.
    broken: Option<String>,
    /// Outcome when the values disagree.
    on_mismatch: Outcome,
}

fn even_points(max_n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for s in 1..=max_n {
        for t in 1..=max_n / s {
            out.push((s, t));
        }
    }
    out
}

fn entry_specs(entry: &FormulaEntry, max_n: u32) -> Vec<CombSpec> {
    match entry.evaluator {
        Some(Evaluator::AlphaSize(_)) => (0..=max_n)
            .flat_map(|n| {
                (1..=n.max(1)).map(move |s| CombSpec::uneven_alpha(s, n).expect("s >= 1"))
            })
            .collect(),
        _ => even_points(max_n)
            .into_iter()
            .map(|(s, t)| CombSpec::even(entry.family, s, t).expect("s, t >= 1"))
            .filter(|spec| entry.in_domain(spec))
            .collect(),
    }
}

fn extra_engines(query: &CountQuery) -> Vec<(String, BigCount)> {
    let mut out = Vec::new();
    let engines: [&dyn CountEngine; 2] = [&GenTreeEngine, &SeriesEngine];
    for engine in engines {
        if engine.supports(query) {
            if let Ok(v) = engine.count(query) {
                out.push((engine.method().name().to_string(), v));
            }
        }
    }
    out
}

fn registry_jobs(formulas: &FormulaRegistry, max_n: u32) -> Vec<Job> {
    let mut jobs = Vec::new();
    for entry in formulas.entries() {
        if entry.evaluator.is_none() {
            continue;
        }
        let on_mismatch = match entry.status {
            Status::Proven => Outcome::Fail,
            _ => Outcome::Finding,
        };
        for spec in entry_specs(entry, max_n) {
            let mut claims = vec![];
            let mut broken = None;
            match entry.evaluate_spec(&spec) {
                Ok(v) => claims.push(("formula".to_string(), v)),
                Err(e) => broken = Some(format!("formula: {e}")),
            }
            claims.extend(extra_engines(&CountQuery::new(
                spec,
                entry.patterns.clone(),
            )));
            jobs.push(Job {
                subject: entry.id.to_string(),
                spec,
                patterns: entry.patterns.clone(),
                claims,
                broken,
                on_mismatch,
            });
        }
    }
    jobs
}

fn series_jobs(max_n: u32) -> Vec<Job> {
    let patterns = PatternSet::parse(&["231"]).expect("valid");
    (1..=max_n / 2)
        .map(|s| {
            let spec = CombSpec::alpha(s, 2).expect("s >= 1");
            let claims = extra_engines(&CountQuery::new(spec, patterns.clone()));
            // the series identity is an observed match, so a mismatch is a finding
            Job {
                subject: "series-alpha-231-t2".into(),
                spec,
                patterns: patterns.clone(),
                claims,
                broken: None,
                on_mismatch: Outcome::Finding,
            }
        })
        .collect()
}

fn fixture_jobs(formulas: &FormulaRegistry, max_n: u32) -> Vec<Job> {
    let mut jobs = Vec::new();
    for table in TABLES {
        let patterns = table.pattern_set();
        for cell in table.cells() {
            let spec = cell.spec(table.family);
            let mut claims = vec![(
                format!("table[{}]", tag_name(cell.tag)),
                BigCount::from(cell.value),
            )];
            let mut broken = None;
            if cell.tag == Tag::Filled {
                match formulas
                    .proven(&patterns, &spec)
                    .map(|e| (e.id, e.evaluate_spec(&spec)))
                {
                    Some((id, Ok(v))) => claims.push((format!("formula[{id}]"), v)),
                    Some((id, Err(e))) => broken = Some(format!("formula[{id}]: {e}")),
                    None => broken = Some("no proven formula".into()),
                }
            } else if spec.size() > max_n {
                continue;
            }
            jobs.push(Job {
                subject: format!("table:{}", table.id()),
                spec,
                patterns: patterns.clone(),
                claims,
                broken,
                on_mismatch: Outcome::Fail,
            });
        }
    }
    jobs
}

fn tag_name(tag: Tag) -> &'static str {
    match tag {
        Tag::Observed => "observed",
        Tag::Filled => "filled",
    }
}

/// Runs every check with combs of at most `max_n` elements.
pub fn verify_all(max_n: u32) -> VerificationReport {
    verify_with(&FormulaRegistry::standard(), max_n)
}

/// [`verify_all`] against an arbitrary registry.
pub fn verify_with(formulas: &FormulaRegistry, max_n: u32) -> VerificationReport {
    let mut jobs = registry_jobs(formulas, max_n);
    jobs.extend(series_jobs(max_n));
    jobs.extend(fixture_jobs(formulas, max_n));

    let wanted = jobs.iter().map(|j| (j.spec, j.patterns.clone())).collect();
    let brute = BruteCache::fill(max_n, wanted);

    let lines = jobs
        .into_iter()
        .map(|job| {
            let mut values = job.claims;
            if let Some(v) = brute.get(&job.spec, &job.patterns) {
                values.push(("brute".into(), v.clone()));
            }
            let outcome = if job.broken.is_some() {
                Outcome::Fail
            } else if values.len() < 2 {
                Outcome::Skipped
            } else if values.iter().all(|(_, v)| v == &values[0].1) {
                Outcome::Pass
            } else {
                job.on_mismatch
            };
            let mut values: Vec<(String, String)> = values
                .into_iter()
                .map(|(n, v)| (n, v.to_string()))
                .collect();
            if let Some(why) = job.broken {
                values.push(("error".into(), why));
            }
            CheckLine {
                subject: job.subject,
                point: format!("{} avoiding {}", job.spec, job.patterns),
                values,
                outcome,
            }
        })
        .collect();
    VerificationReport { max_n, lines }
}

/// Entries of the registry for `family`, for listing.
pub fn entries_for(formulas: &FormulaRegistry, family: Family) -> Vec<&FormulaEntry> {
    formulas
        .entries()
        .iter()
        .filter(|e| e.family == family)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn small_run_checks_the_two_by_two_combs() {
        let report = verify_all(4);
        assert!(report.is_ok(), "{report}");
        let at_2_2: Vec<_> = report
            .lines
            .iter()
            .filter(|l| l.point.contains("(s=2, t=2)"))
            .collect();
        assert!(at_2_2.len() >= 10);
        assert!(at_2_2.iter().all(|l| l.outcome == Outcome::Pass));
    }

    #[test]
    fn injected_fault_is_reported() {
        let mut entries = FormulaRegistry::standard().entries().to_vec();
        let target = entries.iter_mut().find(|e| e.id == "beta-213-321").unwrap();
        target.evaluator = Some(Evaluator::Even(|s, t| BigUint::from((s - 1) * (t - 1) + 2)));
        let report = verify_with(&FormulaRegistry::from_entries(entries), 6);
        assert!(!report.is_ok());
        let failing: Vec<_> = report.failures().collect();
        assert!(failing.iter().any(|l| l.subject == "beta-213-321"));
        assert!(failing.iter().any(|l| l.subject == "table:beta-213-321"));
        assert!(report.to_string().lines().any(|l| l.starts_with("FAIL")));
    }

    #[test]
    fn conjecture_mismatch_is_a_finding() {
        let mut entries = FormulaRegistry::standard().entries().to_vec();
        let target = entries
            .iter_mut()
            .find(|e| e.id == "alpha-231-321-t2")
            .unwrap();
        target.evaluator = Some(Evaluator::Even(|_, _| BigUint::from(0u32)));
        let report = verify_with(&FormulaRegistry::from_entries(entries), 6);
        assert!(report.is_ok());
        assert!(report.findings().any(|l| l.subject == "alpha-231-321-t2"));
    }
}
