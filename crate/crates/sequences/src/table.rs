//! Sequences of counts along one comb parameter, and their text forms.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use combx_core::{
    BigCount, CombSpec, CountQuery, EngineError, EngineRegistry, Family, Method, PatternSet,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixtures::{Table, Tag};

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("invalid range {0}..{1}: need 1 <= start <= end")]
    BadRange(u32, u32),
    #[error("fixed parameter must be at least 1")]
    BadFixed,
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("at {point}: {source}")]
    Engine {
        point: String,
        #[source]
        source: EngineError,
    },
    #[error("unknown output format {0:?}")]
    UnknownFormat(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// The parameter that varies along a sequence; the other one is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    VaryS { t: u32 },
    VaryT { s: u32 },
}

impl Axis {
    pub fn fixed(self) -> u32 {
        match self {
            Axis::VaryS { t } => t,
            Axis::VaryT { s } => s,
        }
    }

    /// `(s, t)` at position `k` of the varying parameter.
    pub fn point(self, k: u32) -> (u32, u32) {
        match self {
            Axis::VaryS { t } => (k, t),
            Axis::VaryT { s } => (s, k),
        }
    }
}

/// Inclusive range of the varying parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: u32,
    pub end: u32,
}

impl Span {
    pub fn new(start: u32, end: u32) -> Result<Self, SequenceError> {
        if start < 1 || start > end {
            return Err(SequenceError::BadRange(start, end));
        }
        Ok(Span { start, end })
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.start..=self.end
    }
}

impl FromStr for Span {
    type Err = SequenceError;

    /// `A..B`, or a single value.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SequenceError::BadRange(0, 0);
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
            None => (s, s),
        };
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        Span::new(a, b)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Identifies a sequence: family, patterns, which parameter varies and over what range.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SequenceKey {
    pub family: Family,
    pub patterns: PatternSet,
    pub axis: Axis,
    pub range: Span,
}

impl SequenceKey {
    pub fn new(
        family: Family,
        patterns: PatternSet,
        axis: Axis,
        range: Span,
    ) -> Result<Self, SequenceError> {
        if axis.fixed() < 1 {
            return Err(SequenceError::BadFixed);
        }
        Ok(SequenceKey {
            family,
            patterns,
            axis,
            range,
        })
    }

    pub fn points(&self) -> Vec<(u32, u32)> {
        self.range.iter().map(|k| self.axis.point(k)).collect()
    }

    pub fn spec(&self, (s, t): (u32, u32)) -> CombSpec {
        CombSpec::even(self.family, s, t).expect("validated key has s, t >= 1")
    }

    /// Compact JSON form; equal keys always give equal strings.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("keys always serialize")
    }
}

impl fmt::Display for SequenceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, fixed) = match self.axis {
            Axis::VaryS { t } => ("s", format!("t={t}")),
            Axis::VaryT { s } => ("t", format!("s={s}")),
        };
        write!(
            f,
            "{} avoiding {} with {fixed}, {name} in {}",
            self.family, self.patterns, self.range
        )
    }
}

/// Engine requested for a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Exact(Method),
}

impl MethodChoice {
    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::Auto => "auto",
            MethodChoice::Exact(m) => m.name(),
        }
    }

    fn as_option(self) -> Option<Method> {
        match self {
            MethodChoice::Auto => None,
            MethodChoice::Exact(m) => Some(m),
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodChoice {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(MethodChoice::Auto);
        }
        s.parse::<Method>()
            .map(MethodChoice::Exact)
            .map_err(|_| SequenceError::UnknownMethod(s.to_string()))
    }
}

impl Serialize for MethodChoice {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for MethodChoice {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where one term of a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Brute,
    Formula,
    GenTree,
    Series,
    /// Copied from a published table, counted directly there.
    Observed,
    /// Copied from a published table, filled in there from a formula.
    Filled,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Brute => "brute",
            Source::Formula => "formula",
            Source::GenTree => "gentree",
            Source::Series => "series",
            Source::Observed => "observed",
            Source::Filled => "filled",
        }
    }
}

impl From<Method> for Source {
    fn from(m: Method) -> Self {
        match m {
            Method::Brute => Source::Brute,
            Method::Formula => Source::Formula,
            Method::GenTree => Source::GenTree,
            Method::Series => Source::Series,
        }
    }
}

impl From<Tag> for Source {
    fn from(tag: Tag) -> Self {
        match tag {
            Tag::Observed => Source::Observed,
            Tag::Filled => Source::Filled,
        }
    }
}

mod decimal_vec {
    use combx_core::BigCount;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(terms: &[BigCount], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(terms.iter().map(|t| t.to_str_radix(10)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<BigCount>, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        raw.iter()
            .map(|s| {
                BigCount::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| serde::de::Error::custom(format!("not a decimal count: {s:?}")))
            })
            .collect()
    }
}

/// A computed (or transcribed) sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub key: SequenceKey,
    pub method: MethodChoice,
    #[serde(with = "decimal_vec")]
    pub terms: Vec<BigCount>,
    #[serde(with = "rfc3339")]
    pub computed_at: DateTime<Utc>,
    pub sources: Vec<Source>,
}

mod rfc3339 {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(at: &DateTime<Utc>, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&at.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(deserializer)?;
        DateTime::parse_from_rfc3339(&s)
            .map(|d| d.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)
    }
}

/// Current time truncated to whole seconds, so records survive a JSON round trip unchanged.
fn now() -> DateTime<Utc> {
    let stamp = Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true);
    DateTime::parse_from_rfc3339(&stamp)
        .expect("own output parses")
        .with_timezone(&Utc)
}

impl SequenceRecord {
    /// `(s, t, term, source)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (u32, u32, &BigCount, Source)> + '_ {
        self.key
            .points()
            .into_iter()
            .zip(self.terms.iter().zip(&self.sources))
            .map(|((s, t), (c, &src))| (s, t, c, src))
    }

    /// Column `t` of a published table as a record, if every requested cell was published.
    pub fn from_fixture(table: &Table, axis: Axis, range: Span) -> Option<SequenceRecord> {
        let key = SequenceKey::new(table.family, table.pattern_set(), axis, range).ok()?;
        let mut terms = Vec::new();
        let mut sources = Vec::new();
        for (s, t) in key.points() {
            let cell = table.cell(s, t)?;
            terms.push(BigCount::from(cell.value));
            sources.push(cell.tag.into());
        }
        Some(SequenceRecord {
            key,
            method: MethodChoice::Auto,
            terms,
            computed_at: now(),
            sources,
        })
    }
}

/// Computes every term of `key` with `engines`, one worker per point.
pub fn build_table_with(
    engines: &EngineRegistry,
    key: &SequenceKey,
    choice: MethodChoice,
) -> Result<SequenceRecord, SequenceError> {
    let points = key.points();
    let counted: Vec<(BigCount, Source)> = points
        .par_iter()
        .map(|&p| {
            let spec = key.spec(p);
            let query = CountQuery::new(spec, key.patterns.clone());
            engines
                .count(&query, choice.as_option())
                .map(|c| (c.value, Source::from(c.method)))
                .map_err(|source| SequenceError::Engine {
                    point: spec.to_string(),
                    source,
                })
        })
        .collect::<Result<_, _>>()?;
    let (terms, sources) = counted.into_iter().unzip();
    Ok(SequenceRecord {
        key: key.clone(),
        method: choice,
        terms,
        computed_at: now(),
        sources,
    })
}

/// [`build_table_with`] on the standard engines.
pub fn build_table(
    key: &SequenceKey,
    choice: MethodChoice,
) -> Result<SequenceRecord, SequenceError> {
    build_table_with(&EngineRegistry::default(), key, choice)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(SequenceError::UnknownFormat(s.to_string())),
        }
    }
}

pub fn render(records: &[SequenceRecord], format: Format) -> String {
    match format {
        Format::Text => to_text(records),
        Format::Csv => to_csv(records),
        Format::Json => to_json(records),
    }
}

/// Right-aligned columns `s t count method`.
pub fn to_text(records: &[SequenceRecord]) -> String {
    let mut rows = vec![["s".to_string(), "t".into(), "count".into(), "method".into()]];
    for r in records {
        for (s, t, c, src) in r.rows() {
            rows.push([
                s.to_string(),
                t.to_string(),
                c.to_string(),
                src.name().to_string(),
            ]);
        }
    }
    let mut widths = [0; 4];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let line = format!(
            "{:>w0$}  {:>w1$}  {:>w2$}  {}",
            row[0],
            row[1],
            row[2],
            row[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
        );
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn to_csv(records: &[SequenceRecord]) -> String {
    let mut out = String::from("s,t,count,method\n");
    for r in records {
        for (s, t, c, src) in r.rows() {
            out.push_str(&format!("{s},{t},{c},{}\n", src.name()));
        }
    }
    out
}

pub fn to_json(records: &[SequenceRecord]) -> String {
    let mut out = serde_json::to_string_pretty(records).expect("records always serialize");
    out.push('\n');
    out
}
