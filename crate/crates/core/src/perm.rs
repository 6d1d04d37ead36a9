//! Permutations, patterns and classical (non-consecutive) pattern containment.
//!
//! Patterns are ordinary [`Permutation`]s. Containment has two routes: a
//! backtracking matcher that works for any pattern, and linear stack scans
//! for each of the six patterns of length three. The two must always agree.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::BigCount;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("value {value} is outside 1..={len}")]
    OutOfRange { value: u32, len: usize },
    #[error("value {0} appears more than once")]
    Repeated(u32),
    #[error("invalid pattern string {0:?}: expected distinct digits 1..n with n <= 9")]
    BadDigits(String),
    #[error("empty pattern is not allowed in a pattern set")]
    EmptyPattern,
    #[error("pattern {0} listed twice")]
    DuplicatePattern(Permutation),
}

/// A rearrangement of `1..=n`. The empty permutation is allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(vals: Vec<u32>) -> Result<Self, PermError> {
        let n = vals.len();
        let mut seen = vec![false; n + 1];
        for &v in &vals {
            if v == 0 || v as usize > n {
                return Err(PermError::OutOfRange { value: v, len: n });
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(PermError::Repeated(v));
            }
        }
        Ok(Permutation(vals))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    pub fn empty() -> Self {
        Permutation(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// Values separated by single spaces, e.g. `1 3 4 2`.
    pub fn to_spaced(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        parts.join(" ")
    }

    /// Inserts the value `len + 1` so that it ends up at index `pos`.
    pub fn insert_max(&self, pos: usize) -> Permutation {
        let mut vals = self.0.clone();
        vals.insert(pos, self.0.len() as u32 + 1);
        Permutation(vals)
    }

    /// Every permutation of `1..=n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some(Permutation::identity(n));
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut v = cur.0.clone();
            if next_lex(&mut v) {
                next = Some(Permutation(v));
            }
            Some(cur)
        })
    }
}

fn next_lex(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = PermError;

    fn try_from(vals: Vec<u32>) -> Result<Self, Self::Error> {
        Permutation::new(vals)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// Parses the digit form, e.g. `"312"`. Only lengths up to 9 have one.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PermError::BadDigits(s.to_string());
        if s.len() > 9 {
            return Err(bad());
        }
        let vals = s
            .chars()
            .map(|c| c.to_digit(10).filter(|&d| d >= 1).ok_or_else(bad))
            .collect::<Result<Vec<u32>, _>>()?;
        Permutation::new(vals).map_err(|_| bad())
    }
}

impl fmt::Display for Permutation {
    /// Digit form for n <= 9, space separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 9 {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            f.write_str(&self.to_spaced())
        }
    }
}

/// A set of patterns kept in lexicographic order so equal sets compare and
/// hash identically.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternSet(Vec<Permutation>);

impl PatternSet {
    pub fn new(patterns: Vec<Permutation>) -> Result<Self, PermError> {
        let mut patterns = patterns;
        if patterns.iter().any(Permutation::is_empty) {
            return Err(PermError::EmptyPattern);
        }
        patterns.sort();
        if let Some(w) = patterns.windows(2).find(|w| w[0] == w[1]) {
            return Err(PermError::DuplicatePattern(w[0].clone()));
        }
        Ok(PatternSet(patterns))
    }

    pub fn empty() -> Self {
        PatternSet(Vec::new())
    }

    /// Parses digit strings such as `["213", "231"]`.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self, PermError> {
        let perms = items
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<Permutation>, _>>()?;
        PatternSet::new(perms)
    }

    pub fn single(w: Permutation) -> Self {
        PatternSet(vec![w])
    }

    pub fn patterns(&self) -> &[Permutation] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Digit strings in canonical order.
    pub fn labels(&self) -> Vec<String> {
        self.0.iter().map(Permutation::to_string).collect()
    }

    pub fn contains_pattern(&self, w: &Permutation) -> bool {
        self.0.binary_search(w).is_ok()
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labels().join(","))
    }
}

impl Serialize for PatternSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PatternSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(deserializer)?;
        PatternSet::parse(&items).map_err(serde::de::Error::custom)
    }
}

/// The six patterns of length three, each with a dedicated linear scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum S3 {
    P123,
    P132,
    P213,
    P231,
    P312,
    P321,
}

impl S3 {
    pub const ALL: [S3; 6] = [S3::P123, S3::P132, S3::P213, S3::P231, S3::P312, S3::P321];

    pub fn of(w: &[u32]) -> Option<S3> {
        match w {
            [1, 2, 3] => Some(S3::P123),
            [1, 3, 2] => Some(S3::P132),
            [2, 1, 3] => Some(S3::P213),
            [2, 3, 1] => Some(S3::P231),
            [3, 1, 2] => Some(S3::P312),
            [3, 2, 1] => Some(S3::P321),
            _ => None,
        }
    }

    pub fn permutation(self) -> Permutation {
        let v = match self {
            S3::P123 => vec![1, 2, 3],
            S3::P132 => vec![1, 3, 2],
            S3::P213 => vec![2, 1, 3],
            S3::P231 => vec![2, 3, 1],
            S3::P312 => vec![3, 1, 2],
            S3::P321 => vec![3, 2, 1],
        };
        Permutation(v)
    }

    /// Linear-time containment test.
    pub fn occurs_in(self, v: &[u32]) -> bool {
        match self {
            S3::P123 => has_increasing_triple(v.iter().copied()),
            S3::P321 => has_increasing_triple(v.iter().map(|&x| u32::MAX - x)),
            // 132 and its symmetry class: a stack scan looking for "low, high, middle"
            // read in the appropriate direction and value order.
            S3::P132 => has_low_high_mid(v.iter().rev().copied(), false),
            S3::P312 => has_low_high_mid(v.iter().rev().copied(), true),
            S3::P231 => has_low_high_mid(v.iter().copied(), false),
            S3::P213 => has_low_high_mid(v.iter().copied(), true),
        }
    }
}

fn has_increasing_triple(it: impl Iterator<Item = u32>) -> bool {
    let mut first = u32::MAX;
    let mut second = u32::MAX;
    for x in it {
        if x <= first {
            first = x;
        } else if x <= second {
            second = x;
        } else {
            return true;
        }
    }
    false
}

/// Scanning `it` in order, reports whether some later item is smaller than a
/// popped "middle" value, where a middle is popped by a later larger item.
/// `flip` reverses the value order.
fn has_low_high_mid(it: impl Iterator<Item = u32>, flip: bool) -> bool {
    let key = |x: u32| if flip { u32::MAX - x } else { x };
    let mut stack: Vec<u32> = Vec::new();
    let mut mid: Option<u32> = None;
    for x in it.map(key) {
        if mid.is_some_and(|m| x < m) {
            return true;
        }
        while let Some(&top) = stack.last() {
            if top < x {
                mid = Some(mid.map_or(top, |m| m.max(top)));
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(x);
    }
    false
}

/// Backtracking containment for an arbitrary pattern.
pub fn contains_generic(v: &[u32], w: &[u32]) -> bool {
    if w.is_empty() {
        return true;
    }
    if w.len() > v.len() {
        return false;
    }
    let mut chosen = Vec::with_capacity(w.len());
    extend_match(v, w, 0, &mut chosen, None)
}

/// True when an occurrence of `w` in `v` uses the last entry of `v`.
pub fn occurs_ending_at_last(v: &[u32], w: &[u32]) -> bool {
    if w.is_empty() || w.len() > v.len() {
        return false;
    }
    let mut chosen = Vec::with_capacity(w.len());
    extend_match(v, w, 0, &mut chosen, Some(v.len() - 1))
}

fn extend_match(
    v: &[u32],
    w: &[u32],
    start: usize,
    chosen: &mut Vec<usize>,
    last_at: Option<usize>,
) -> bool {
    let k = chosen.len();
    if k == w.len() {
        return true;
    }
    let remaining = w.len() - k;
    let end = v.len() + 1 - remaining;
    let range = match last_at {
        Some(last) if k + 1 == w.len() => last.max(start)..(last + 1).min(end),
        Some(last) => start..end.min(last),
        None => start..end,
    };
    for i in range {
        let fits = chosen
            .iter()
            .enumerate()
            .all(|(j, &ci)| (v[ci] < v[i]) == (w[j] < w[k]));
        if fits {
            chosen.push(i);
            if extend_match(v, w, i + 1, chosen, last_at) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Whether `v` contains `w` as a classical pattern.
pub fn contains(v: &Permutation, w: &Permutation) -> bool {
    match S3::of(w.as_slice()) {
        Some(p) => p.occurs_in(v.as_slice()),
        None => contains_generic(v.as_slice(), w.as_slice()),
    }
}

pub fn avoids(v: &Permutation, w: &Permutation) -> bool {
    !contains(v, w)
}

pub fn contains_any(v: &Permutation, ps: &PatternSet) -> bool {
    ps.patterns().iter().any(|w| contains(v, w))
}

/// Number of permutations of length `n` avoiding every pattern in `ps`, by
/// exhaustive listing. Only sensible for small `n`.
pub fn count_avoiders(n: usize, ps: &PatternSet) -> BigCount {
    let count = Permutation::all(n).filter(|v| !contains_any(v, ps)).count();
    BigUint::from(count)
}
