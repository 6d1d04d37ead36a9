//! Comb posets and forest posets.
//!
//! Elements are the integers `1..=n`. A comb has a spine (a chain) whose
//! every element starts a tooth (another chain). The alpha labeling puts the
//! spine on `1..=s` and fills the teeth level by level; the beta labeling fills
//! one tooth at a time so the spine holds `1, t+1, 2t+1, ...`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Permutation;
use crate::BigCount;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("comb needs at least one tooth and teeth of length at least one (got {0})")]
    DegenerateComb(String),
    #[error("cover ({0}, {1}) references an element outside 1..={2}")]
    UnknownElement(u32, u32, usize),
    #[error("cover ({0}, {0}) is a self loop")]
    SelfLoop(u32),
    #[error("cover relation contains a cycle")]
    Cyclic,
    #[error("element {0} has more than one lower cover; the Hasse diagram is not a forest")]
    NotForest(u32),
    #[error("permutation has length {got}, poset has {expected} elements")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Alpha,
    Beta,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Alpha => "alpha",
            Family::Beta => "beta",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "alpha" | "a" => Ok(Family::Alpha),
            "beta" | "b" => Ok(Family::Beta),
            other => Err(format!(
                "unknown comb family {other:?} (expected alpha or beta)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CombShape {
    /// `s` teeth of length `t`.
    Even { s: u32, t: u32 },
    /// `s` teeth holding `n` elements in total, filled level by level.
    UnevenAlpha { s: u32, n: u32 },
    /// Teeth of length `t` holding `n` elements; the last tooth may be short.
    UnevenBeta { t: u32, n: u32 },
}

/// Identifies one comb poset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CombSpec {
    family: Family,
    shape: CombShape,
}

impl CombSpec {
    pub fn even(family: Family, s: u32, t: u32) -> Result<Self, PosetError> {
        if s < 1 || t < 1 {
            return Err(PosetError::DegenerateComb(format!("s={s}, t={t}")));
        }
        Ok(CombSpec {
            family,
            shape: CombShape::Even { s, t },
        })
    }

    pub fn alpha(s: u32, t: u32) -> Result<Self, PosetError> {
        Self::even(Family::Alpha, s, t)
    }

    pub fn beta(s: u32, t: u32) -> Result<Self, PosetError> {
        Self::even(Family::Beta, s, t)
    }

    pub fn uneven_alpha(s: u32, n: u32) -> Result<Self, PosetError> {
        if s < 1 {
            return Err(PosetError::DegenerateComb(format!("s={s}")));
        }
        Ok(CombSpec {
            family: Family::Alpha,
            shape: CombShape::UnevenAlpha { s, n },
        })
    }

    pub fn uneven_beta(t: u32, n: u32) -> Result<Self, PosetError> {
        if t < 1 {
            return Err(PosetError::DegenerateComb(format!("t={t}")));
        }
        Ok(CombSpec {
            family: Family::Beta,
            shape: CombShape::UnevenBeta { t, n },
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn shape(&self) -> CombShape {
        self.shape
    }

    pub fn size(&self) -> u32 {
        match self.shape {
            CombShape::Even { s, t } => s * t,
            CombShape::UnevenAlpha { n, .. } | CombShape::UnevenBeta { n, .. } => n,
        }
    }

    /// `(s, t)` when the comb has equal teeth, including uneven shapes whose
    /// size happens to divide evenly.
    pub fn even_params(&self) -> Option<(u32, u32)> {
        match self.shape {
            CombShape::Even { s, t } => Some((s, t)),
            CombShape::UnevenAlpha { s, n } if n > 0 && n % s == 0 => Some((s, n / s)),
            CombShape::UnevenBeta { t, n } if n > 0 && n % t == 0 => Some((n / t, t)),
            _ => None,
        }
    }

    /// The same poset described by the uneven shape of its family.
    pub fn as_uneven(&self) -> CombSpec {
        let n = self.size();
        let shape = match (self.family, self.shape) {
            (Family::Alpha, CombShape::Even { s, .. }) => CombShape::UnevenAlpha { s, n },
            (Family::Beta, CombShape::Even { t, .. }) => CombShape::UnevenBeta { t, n },
            (_, shape) => shape,
        };
        CombSpec {
            family: self.family,
            shape,
        }
    }

    /// Builds the covers of this comb.
    pub fn build(&self) -> Poset {
        let mut covers = Vec::new();
        match (self.family, self.shape) {
            (Family::Alpha, CombShape::Even { s, t }) => alpha_covers(s, s * t, &mut covers),
            (Family::Alpha, CombShape::UnevenAlpha { s, n }) => alpha_covers(s, n, &mut covers),
            (Family::Beta, CombShape::Even { s, t }) => beta_covers(t, s * t, &mut covers),
            (Family::Beta, CombShape::UnevenBeta { t, n }) => beta_covers(t, n, &mut covers),
            _ => unreachable!("constructors pair each uneven shape with its family"),
        }
        Poset::new(self.size() as usize, covers).expect("comb covers form a forest")
    }
}

impl fmt::Display for CombSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            CombShape::Even { s, t } => write!(f, "{}(s={s}, t={t})", self.family),
            CombShape::UnevenAlpha { s, n } => write!(f, "alpha(s={s}, n={n})"),
            CombShape::UnevenBeta { t, n } => write!(f, "beta(t={t}, n={n})"),
        }
    }
}

// spine 1 < 2 < ... < s; tooth c < c+s < c+2s < ...
fn alpha_covers(s: u32, n: u32, out: &mut Vec<(u32, u32)>) {
    for c in 1..s.min(n) {
        out.push((c, c + 1));
    }
    for e in 1..=n {
        if e + s <= n {
            out.push((e, e + s));
        }
    }
}

// spine 1 < t+1 < 2t+1 < ...; tooth ct+1 < ct+2 < ... < ct+t
fn beta_covers(t: u32, n: u32, out: &mut Vec<(u32, u32)>) {
    for e in 2..=n {
        if (e - 1) % t == 0 {
            out.push((e - t, e));
        } else {
            out.push((e - 1, e));
        }
    }
}

pub fn build_comb(spec: &CombSpec) -> Poset {
    spec.build()
}

/// A finite poset on `1..=n` stored by its cover relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    covers: Vec<(u32, u32)>,
    up: Vec<Vec<u32>>,
    down: Vec<Vec<u32>>,
}

impl Poset {
    pub fn new(n: usize, covers: Vec<(u32, u32)>) -> Result<Self, PosetError> {
        let mut covers = covers;
        covers.sort_unstable();
        covers.dedup();
        let mut up = vec![Vec::new(); n + 1];
        let mut down = vec![Vec::new(); n + 1];
        for &(a, b) in &covers {
            if a == 0 || b == 0 || a as usize > n || b as usize > n {
                return Err(PosetError::UnknownElement(a, b, n));
            }
            if a == b {
                return Err(PosetError::SelfLoop(a));
            }
            up[a as usize].push(b);
            down[b as usize].push(a);
        }
        let poset = Poset {
            n,
            covers,
            up,
            down,
        };
        if poset.topological_order().len() != n {
            return Err(PosetError::Cyclic);
        }
        Ok(poset)
    }

    pub fn chain(n: usize) -> Self {
        let covers = (1..n as u32).map(|a| (a, a + 1)).collect();
        Poset::new(n, covers).expect("chain is acyclic")
    }

    pub fn antichain(n: usize) -> Self {
        Poset::new(n, Vec::new()).expect("antichain is acyclic")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn covers(&self) -> &[(u32, u32)] {
        &self.covers
    }

    /// Elements covering `e`.
    pub fn upper_covers(&self, e: u32) -> &[u32] {
        &self.up[e as usize]
    }

    /// Elements covered by `e`.
    pub fn lower_covers(&self, e: u32) -> &[u32] {
        &self.down[e as usize]
    }

    pub fn is_forest(&self) -> bool {
        (1..=self.n).all(|e| self.down[e].len() <= 1)
    }

    fn topological_order(&self) -> Vec<u32> {
        let mut indegree: Vec<usize> = self.down.iter().map(Vec::len).collect();
        let mut ready: Vec<u32> = (1..=self.n as u32)
            .filter(|&e| indegree[e as usize] == 0)
            .collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(e) = ready.pop() {
            order.push(e);
            for &b in &self.up[e as usize] {
                indegree[b as usize] -= 1;
                if indegree[b as usize] == 0 {
                    ready.push(b);
                }
            }
        }
        order
    }

    /// For each element, the size of the up-set it roots (itself included).
    /// Only meaningful on forests.
    pub fn subtree_sizes(&self) -> Result<Vec<u64>, PosetError> {
        if let Some(e) = (1..=self.n).find(|&e| self.down[e].len() > 1) {
            return Err(PosetError::NotForest(e as u32));
        }
        let mut sizes = vec![1u64; self.n + 1];
        for &e in self.topological_order().iter().rev() {
            for &b in &self.up[e as usize] {
                sizes[e as usize] += sizes[b as usize];
            }
        }
        sizes[0] = 0;
        Ok(sizes)
    }

    /// Whether `v` lists every element after all of its lower covers.
    pub fn is_extension(&self, v: &Permutation) -> Result<bool, PosetError> {
        if v.len() != self.n {
            return Err(PosetError::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let mut pos = vec![0usize; self.n + 1];
        for (i, &e) in v.as_slice().iter().enumerate() {
            pos[e as usize] = i;
        }
        Ok(self
            .covers
            .iter()
            .all(|&(a, b)| pos[a as usize] < pos[b as usize]))
    }

    /// Number of linear extensions of a forest poset, `n! / prod(d_i)` with
    /// `d_i` the size of the subtree rooted at element `i`.
    pub fn knuth_count(&self) -> Result<BigCount, PosetError> {
        let sizes = self.subtree_sizes()?;
        let mut numerator = BigUint::one();
        for k in 2..=self.n as u64 {
            numerator *= k;
        }
        let denominator = sizes[1..].iter().fold(BigUint::one(), |acc, &d| acc * d);
        Ok(numerator / denominator)
    }

    /// One `a<b` line per cover, sorted.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.covers {
            out.push_str(&format!("{a}<{b}\n"));
        }
        out
    }
}

pub fn is_extension(p: &Poset, v: &Permutation) -> Result<bool, PosetError> {
    p.is_extension(v)
}

pub fn knuth_count(p: &Poset) -> Result<BigCount, PosetError> {
    p.knuth_count()
}
