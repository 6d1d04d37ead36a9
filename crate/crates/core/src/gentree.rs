//! Generating trees for 312-avoiding extensions of beta combs and for the
//! lattice paths counted by Fuss–Catalan numbers.
//!
//! Three routes compute the same level profiles (multisets of child counts):
//!
//! * [`explicit_profiles`] builds the literal tree of permutations by inserting
//!   the next value wherever [`insertion_positions`] allows;
//! * [`succession_profiles`] runs the label-only succession rule;
//! * [`lattice_profiles`] tracks lattice points `(x, y)` and derives labels from
//!   geometry.
//!
//! Level `n` of the permutation tree holds extensions with `n` elements. The
//! lattice tree is aligned to it by a virtual root: the origin sits at level 1,
//! so level `n >= 1` holds paths whose last point has `x = n - 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::perm::{Permutation, S3};
use crate::poset::CombSpec;
use crate::BigCount;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenTreeError {
    #[error("tooth length must be at least 1")]
    ZeroTooth,
    #[error("{0} is not a 312-avoiding extension of the beta comb with teeth of length {1}")]
    NotAvoidingExtension(Permutation, u32),
}

/// Child-count label → number of nodes with that label, for one tree level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub level: usize,
    pub counts: BTreeMap<u64, BigCount>,
}

impl LevelProfile {
    fn new(level: usize) -> Self {
        LevelProfile {
            level,
            counts: BTreeMap::new(),
        }
    }

    fn add(&mut self, label: u64, count: &BigCount) {
        *self.counts.entry(label).or_insert_with(BigUint::zero) += count;
    }

    pub fn total(&self) -> BigCount {
        self.counts.values().sum()
    }

    /// Number of nodes one level down.
    pub fn children(&self) -> BigCount {
        self.counts.iter().map(|(&label, c)| c * label).sum()
    }
}

impl fmt::Display for LevelProfile {
    /// `level total {label:count,...}`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self
            .counts
            .iter()
            .map(|(l, c)| format!("{l}:{c}"))
            .collect();
        write!(f, "{} {} {{{}}}", self.level, self.total(), body.join(","))
    }
}

fn root_profile() -> LevelProfile {
    let mut p = LevelProfile::new(0);
    p.add(1, &BigUint::one());
    p
}

/// Positions (indices into the result) where `|v| + 1` may be inserted so the
/// result is again a 312-avoiding extension of the next uneven beta comb.
///
/// The new maximum must not be followed by an ascent, so it goes inside the
/// final decreasing run or after it. It must also follow the last spinal value
/// if it is itself spinal, or follow `|v|` otherwise.
pub fn insertion_positions(v: &Permutation, t: u32) -> Result<Vec<usize>, GenTreeError> {
    if t == 0 {
        return Err(GenTreeError::ZeroTooth);
    }
    let n = v.len() as u32;
    let spec = CombSpec::uneven_beta(t, n).expect("t >= 1");
    let valid = spec.build().is_extension(v).unwrap_or(false) && !S3::P312.occurs_in(v.as_slice());
    if !valid {
        return Err(GenTreeError::NotAvoidingExtension(v.clone(), t));
    }
    let vals = v.as_slice();
    let mut run_start = vals.len();
    while run_start > 0 && (run_start == vals.len() || vals[run_start - 1] > vals[run_start]) {
        run_start -= 1;
    }
    let anchor = if n.is_multiple_of(t) {
        // last spinal value present is (n/t - 1) t + 1, if any
        n.checked_sub(t).map(|_| n - t + 1)
    } else {
        Some(n)
    };
    let after_anchor = anchor.map_or(0, |a| {
        vals.iter().position(|&x| x == a).expect("anchor present") + 1
    });
    Ok((run_start.max(after_anchor)..=vals.len()).collect())
}

/// Builds the literal generating tree up to `max_level` and records each
/// node's child count.
pub fn explicit_profiles(t: u32, max_level: usize) -> Result<Vec<LevelProfile>, GenTreeError> {
    let mut out = Vec::with_capacity(max_level + 1);
    let mut level = vec![Permutation::empty()];
    for depth in 0..=max_level {
        let mut profile = LevelProfile::new(depth);
        let mut next = Vec::new();
        for v in &level {
            let positions = insertion_positions(v, t)?;
            profile.add(positions.len() as u64, &BigUint::one());
            if depth < max_level {
                next.extend(positions.into_iter().map(|p| v.insert_max(p)));
            }
        }
        out.push(profile);
        level = next;
    }
    Ok(out)
}

/// Level profiles of the 312-avoiding beta-comb tree from the succession rule
/// alone: a node labelled `m` at level `n` has children labelled `2..=m+1`
/// when `t` divides `n + 1`, else `1..=m`.
pub fn succession_profiles(t: u32, max_level: usize) -> Result<Vec<LevelProfile>, GenTreeError> {
    if t == 0 {
        return Err(GenTreeError::ZeroTooth);
    }
    let mut out = vec![root_profile()];
    for n in 0..max_level {
        let spinal_next = (n as u64 + 1).is_multiple_of(t as u64);
        let mut next = LevelProfile::new(n + 1);
        for (&m, count) in &out[n].counts {
            let labels = if spinal_next { 2..=m + 1 } else { 1..=m };
            for label in labels {
                next.add(label, count);
            }
        }
        out.push(next);
    }
    Ok(out)
}

/// Number of children of a path node ending at `(x, y)`: one step across,
/// then any number of steps up that stay on or below `y = x / t`.
fn lattice_label(t: u64, x: u64, y: u64) -> u64 {
    (x + 1) / t - y + 1
}

/// Level profiles of the lattice-path tree, computed over lattice points.
pub fn lattice_profiles(t: u32, max_level: usize) -> Result<Vec<LevelProfile>, GenTreeError> {
    if t == 0 {
        return Err(GenTreeError::ZeroTooth);
    }
    let t = t as u64;
    let mut out = vec![root_profile()];
    if max_level == 0 {
        return Ok(out);
    }
    // path counts by height at the current x
    let mut by_height: BTreeMap<u64, BigCount> = BTreeMap::from([(0, BigUint::one())]);
    for level in 1..=max_level {
        let x = level as u64 - 1;
        let mut profile = LevelProfile::new(level);
        for (&y, count) in &by_height {
            profile.add(lattice_label(t, x, y), count);
        }
        out.push(profile);
        let mut next: BTreeMap<u64, BigCount> = BTreeMap::new();
        for (&y, count) in &by_height {
            for up in 0..=(x + 1) / t - y {
                *next.entry(y + up).or_insert_with(BigUint::zero) += count;
            }
        }
        by_height = next;
    }
    Ok(out)
}

/// Paths of unit steps from `(0, 0)` to `(t s + 1, s)` that stay on or
/// below `y = x / t` and finish with a step across, by a grid DP. These are
/// exactly the root-to-leaf paths of the lattice tree at that width.
pub fn count_lattice_paths(t: u32, s: u32) -> BigCount {
    assert!(t >= 1, "tooth length must be at least 1");
    let (t, s) = (t as usize, s as usize);
    let width = t * s;
    // ways[x][y] for legal points, filled column by column
    let mut col: Vec<BigCount> = vec![BigUint::zero(); s + 1];
    col[0] = BigUint::one();
    for x in 0..=width {
        if x > 0 {
            // arriving from the left keeps col[y]; then sweep upwards
            for (y, c) in col.iter_mut().enumerate() {
                if t * y > x {
                    *c = BigUint::zero();
                }
            }
        }
        for y in 1..=s {
            if t * y <= x {
                let below = col[y - 1].clone();
                col[y] += below;
            }
        }
    }
    // final step across from (t s, s)
    col[s].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::fuss_catalan;

    fn perm(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn children(v: &[u32], t: u32) -> Vec<String> {
        let p = perm(v);
        insertion_positions(&p, t)
            .unwrap()
            .into_iter()
            .map(|i| p.insert_max(i).to_string())
            .collect()
    }

    #[test]
    fn insertion_examples() {
        assert_eq!(children(&[1, 2], 2), ["132", "123"]);
        assert_eq!(children(&[1, 3, 4, 2], 2), ["13542", "13452", "13425"]);
        assert_eq!(children(&[1], 2), ["12"]);
        assert_eq!(children(&[], 2), ["1"]);
        assert_eq!(children(&[1, 2, 3, 4], 2), ["12354", "12345"]);
        assert_eq!(children(&[1, 3, 2, 4], 2), ["13254", "13245"]);
    }

    #[test]
    fn insertion_rejects_bad_input() {
        assert!(matches!(
            insertion_positions(&perm(&[2, 1]), 2),
            Err(GenTreeError::NotAvoidingExtension(..))
        ));
        // with t = 1 the comb is a chain
        assert!(insertion_positions(&perm(&[1, 3, 2]), 1).is_err());
        assert_eq!(
            insertion_positions(&perm(&[1]), 0),
            Err(GenTreeError::ZeroTooth)
        );
    }

    fn profile(p: &LevelProfile) -> Vec<(u64, u64)> {
        p.counts
            .iter()
            .map(|(&l, c)| (l, u64::try_from(c).unwrap()))
            .collect()
    }

    #[test]
    fn succession_examples() {
        let prof = succession_profiles(2, 12).unwrap();
        assert_eq!(profile(&prof[0]), [(1, 1)]);
        assert_eq!(profile(&prof[4]), [(2, 2), (3, 1)]);
        assert_eq!(prof[4].total(), BigUint::from(3u32));
        assert_eq!(prof[6].total(), BigUint::from(12u32));
        let t3 = succession_profiles(3, 12).unwrap();
        assert_eq!(t3[12].total(), BigUint::from(140u32));
        assert_eq!(prof[4].to_string(), "4 3 {2:2,3:1}");
    }

    #[test]
    fn lattice_matches_figure_levels() {
        let lat = lattice_profiles(2, 5).unwrap();
        assert_eq!(lat[2], succession_profiles(2, 5).unwrap()[2]);
        assert_eq!(lat[4].total(), BigUint::from(3u32));
        // (3,1), (3,1), (3,0) with 2, 2 and 3 children
        assert_eq!(profile(&lat[4]), [(2, 2), (3, 1)]);
        assert_eq!(lat[5].total(), BigUint::from(7u32));
    }

    #[test]
    fn lattice_tree_with_unit_slope_gives_catalan() {
        let lat = lattice_profiles(1, 10).unwrap();
        for s in 0..=10u32 {
            assert_eq!(lat[s as usize].total(), fuss_catalan(s, 1));
        }
    }

    #[test]
    fn lattice_paths() {
        assert_eq!(count_lattice_paths(2, 2), BigUint::from(3u32));
        assert_eq!(count_lattice_paths(2, 3), BigUint::from(12u32));
        for t in 1..=4 {
            assert_eq!(count_lattice_paths(t, 0), BigUint::one());
        }
    }

    #[test]
    fn explicit_tree_matches_rule() {
        for t in [2, 3, 4] {
            assert_eq!(
                explicit_profiles(t, 9).unwrap(),
                succession_profiles(t, 9).unwrap()
            );
        }
    }

    #[test]
    fn children_total_is_next_level() {
        let prof = succession_profiles(3, 15).unwrap();
        for w in prof.windows(2) {
            assert_eq!(w[0].children(), w[1].total());
        }
    }

    #[test]
    fn zero_tooth_is_rejected() {
        assert!(succession_profiles(0, 3).is_err());
        assert!(lattice_profiles(0, 3).is_err());
    }
}
