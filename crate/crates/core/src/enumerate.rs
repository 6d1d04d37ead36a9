//! Backtracking over linear extensions with prefix pruning.
//!
//! A prefix that already contains a forbidden pattern cannot be completed to an
//! avoiding extension, so the search abandons it. For length-three patterns the
//! check is a single bit test: after each placement we update a mask of values
//! that would complete an occurrence if placed next. Other patterns fall back to
//! matching occurrences that end at the newly placed element.
//!
//! Values are tracked in `u128` masks, which caps posets at 128 elements.

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::perm::{occurs_ending_at_last, PatternSet, Permutation, S3};
use crate::poset::Poset;
use crate::BigCount;

pub const MAX_ELEMENTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("poset has {0} elements; enumeration supports at most {MAX_ELEMENTS}")]
    TooLarge(usize),
}

#[inline]
fn bit(v: u32) -> u128 {
    1u128 << (v - 1)
}

/// Values strictly below `v`.
#[inline]
fn below(v: u32) -> u128 {
    bit(v) - 1
}

/// Values strictly above `v`.
#[inline]
fn above(v: u32) -> u128 {
    !(below(v) | bit(v))
}

#[inline]
fn lowest(mask: u128) -> Option<u32> {
    (mask != 0).then(|| mask.trailing_zeros() + 1)
}

#[inline]
fn highest(mask: u128) -> Option<u32> {
    (mask != 0).then(|| 128 - mask.leading_zeros())
}

/// The values that complete an occurrence of `w` as its last entry when they
/// follow a prefix whose placed values were `placed` and whose last entry is
/// `x`. Only occurrences whose middle entry is `x` are new, so this is unioned
/// into the running mask after every placement.
fn newly_forbidden(w: S3, placed: u128, x: u32) -> u128 {
    let lower = placed & below(x);
    let upper = placed & above(x);
    match w {
        S3::P123 if lower != 0 => above(x),
        S3::P132 => match lowest(placed) {
            Some(m) if m < x => above(m) & below(x),
            _ => 0,
        },
        S3::P213 => lowest(upper).map_or(0, above),
        S3::P231 => highest(lower).map_or(0, below),
        S3::P312 => match highest(placed) {
            Some(m) if m > x => above(x) & below(m),
            _ => 0,
        },
        S3::P321 if upper != 0 => below(x),
        _ => 0,
    }
}

#[derive(Debug, Clone)]
struct Avoidance {
    short: Vec<S3>,
    general: Vec<Permutation>,
}

impl Avoidance {
    fn new(ps: &PatternSet) -> Self {
        let mut short = Vec::new();
        let mut general = Vec::new();
        for w in ps.patterns() {
            match S3::of(w.as_slice()) {
                Some(p) => short.push(p),
                None => general.push(w.clone()),
            }
        }
        Avoidance { short, general }
    }

    fn completes_general(&self, prefix: &[u32]) -> bool {
        self.general
            .iter()
            .any(|w| occurs_ending_at_last(prefix, w.as_slice()))
    }
}

/// Search state for one prefix.
#[derive(Debug, Clone)]
struct State {
    prefix: Vec<u32>,
    missing: Vec<u32>,
    available: u128,
    placed: u128,
    forbidden: u128,
}

#[derive(Debug, Clone, Copy)]
struct Saved {
    available: u128,
    placed: u128,
    forbidden: u128,
}

/// Shared read-only part of a search.
#[derive(Debug, Clone)]
struct Search<'p> {
    poset: &'p Poset,
    avoid: Avoidance,
}

impl<'p> Search<'p> {
    fn new(poset: &'p Poset, ps: &PatternSet) -> Result<Self, EnumerateError> {
        if poset.len() > MAX_ELEMENTS {
            return Err(EnumerateError::TooLarge(poset.len()));
        }
        Ok(Search {
            poset,
            avoid: Avoidance::new(ps),
        })
    }

    fn root(&self) -> State {
        let n = self.poset.len();
        let mut missing = vec![0u32; n + 1];
        let mut available = 0u128;
        for e in 1..=n as u32 {
            missing[e as usize] = self.poset.lower_covers(e).len() as u32;
            if missing[e as usize] == 0 {
                available |= bit(e);
            }
        }
        State {
            prefix: Vec::with_capacity(n),
            missing,
            available,
            placed: 0,
            forbidden: 0,
        }
    }

    fn candidates(&self, st: &State) -> u128 {
        st.available & !st.forbidden
    }

    /// Places `x`; returns the masks needed to undo, or `None` (with nothing
    /// changed) when the new prefix contains a general pattern.
    fn push(&self, st: &mut State, x: u32) -> Option<Saved> {
        st.prefix.push(x);
        if self.avoid.completes_general(&st.prefix) {
            st.prefix.pop();
            return None;
        }
        let saved = Saved {
            available: st.available,
            placed: st.placed,
            forbidden: st.forbidden,
        };
        for &w in &self.avoid.short {
            st.forbidden |= newly_forbidden(w, st.placed, x);
        }
        st.placed |= bit(x);
        st.available &= !bit(x);
        for &b in self.poset.upper_covers(x) {
            st.missing[b as usize] -= 1;
            if st.missing[b as usize] == 0 {
                st.available |= bit(b);
            }
        }
        Some(saved)
    }

    fn pop(&self, st: &mut State, saved: Saved) {
        let x = st.prefix.pop().expect("pop follows push");
        for &b in self.poset.upper_covers(x) {
            st.missing[b as usize] += 1;
        }
        st.available = saved.available;
        st.placed = saved.placed;
        st.forbidden = saved.forbidden;
    }

    fn count_from(&self, st: &mut State) -> u128 {
        if st.prefix.len() == self.poset.len() {
            return 1;
        }
        let mut cands = self.candidates(st);
        let mut total = 0u128;
        while cands != 0 {
            let x = cands.trailing_zeros() + 1;
            cands &= cands - 1;
            if let Some(saved) = self.push(st, x) {
                total += self.count_from(st);
                self.pop(st, saved);
            }
        }
        total
    }

    /// All live states `depth` levels below `st`.
    fn frontier(&self, st: &mut State, depth: usize, out: &mut Vec<State>) {
        if depth == 0 || st.prefix.len() == self.poset.len() {
            out.push(st.clone());
            return;
        }
        let mut cands = self.candidates(st);
        while cands != 0 {
            let x = cands.trailing_zeros() + 1;
            cands &= cands - 1;
            if let Some(saved) = self.push(st, x) {
                self.frontier(st, depth - 1, out);
                self.pop(st, saved);
            }
        }
    }
}

/// Lazily yields linear extensions in lexicographic order, skipping those that
/// contain a pattern from the avoidance set.
pub struct Extensions<'p> {
    search: Search<'p>,
    state: State,
    // one entry per depth: candidates not yet tried, plus how to undo the
    // element chosen at that depth
    frames: Vec<(u128, Option<Saved>)>,
    started: bool,
}

impl<'p> Extensions<'p> {
    fn new(poset: &'p Poset, ps: &PatternSet) -> Result<Self, EnumerateError> {
        let search = Search::new(poset, ps)?;
        let state = search.root();
        Ok(Extensions {
            search,
            state,
            frames: Vec::new(),
            started: false,
        })
    }
}

impl Iterator for Extensions<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let n = self.search.poset.len();
        if !self.started {
            self.started = true;
            if n == 0 {
                return Some(Permutation::empty());
            }
            let c = self.search.candidates(&self.state);
            self.frames.push((c, None));
        }
        loop {
            let (remaining, _) = self.frames.last_mut()?;
            if *remaining == 0 {
                let (_, undo) = self.frames.pop().expect("non-empty");
                if let Some(saved) = undo {
                    self.search.pop(&mut self.state, saved);
                }
                continue;
            }
            let x = remaining.trailing_zeros() + 1;
            *remaining &= *remaining - 1;
            let Some(saved) = self.search.push(&mut self.state, x) else {
                continue;
            };
            // the frame for the next depth owns the undo for this placement
            if self.state.prefix.len() == n {
                let out = Permutation::new(self.state.prefix.clone())
                    .expect("extension is a permutation");
                self.frames.push((0, Some(saved)));
                return Some(out);
            }
            let c = self.search.candidates(&self.state);
            self.frames.push((c, Some(saved)));
        }
    }
}

/// Every linear extension of `p`, in lexicographic order.
pub fn extensions(p: &Poset) -> Result<Extensions<'_>, EnumerateError> {
    Extensions::new(p, &PatternSet::empty())
}

/// Linear extensions of `p` avoiding every pattern of `ps`, in lexicographic order.
pub fn avoiding_extensions<'p>(
    p: &'p Poset,
    ps: &PatternSet,
) -> Result<Extensions<'p>, EnumerateError> {
    Extensions::new(p, ps)
}

pub fn list_avoiding(
    p: &Poset,
    ps: &PatternSet,
    limit: Option<usize>,
) -> Result<Vec<Permutation>, EnumerateError> {
    let it = avoiding_extensions(p, ps)?;
    Ok(match limit {
        Some(k) => it.take(k).collect(),
        None => it.collect(),
    })
}

/// Below this size the search runs on the calling thread.
const PARALLEL_THRESHOLD: usize = 11;
const SPLIT_DEPTH: usize = 5;

/// Exact number of linear extensions of `p` avoiding `ps`. Counting never
/// materializes permutations; large posets are split into subtrees that are
/// counted on the rayon pool.
pub fn count_avoiding(p: &Poset, ps: &PatternSet) -> Result<BigCount, EnumerateError> {
    let search = Search::new(p, ps)?;
    let mut root = search.root();
    let total = if p.len() < PARALLEL_THRESHOLD {
        search.count_from(&mut root)
    } else {
        let mut states = Vec::new();
        search.frontier(&mut root, SPLIT_DEPTH, &mut states);
        states
            .into_par_iter()
            .map(|mut st| search.count_from(&mut st))
            .sum()
    };
    Ok(BigUint::from(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::contains_any;
    use crate::poset::CombSpec;

    fn pats(items: &[&str]) -> PatternSet {
        PatternSet::parse(items).unwrap()
    }

    fn strings(v: Vec<Permutation>) -> Vec<String> {
        v.into_iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn hasse_example_extensions() {
        let p = Poset::new(4, vec![(1, 2), (1, 3), (2, 4), (3, 4)]).unwrap();
        let all: Vec<String> = extensions(&p).unwrap().map(|v| v.to_string()).collect();
        assert_eq!(all, ["1234", "1324"]);
    }

    #[test]
    fn chain_and_small_comb() {
        let chain: Vec<_> = extensions(&Poset::chain(3)).unwrap().collect();
        assert_eq!(strings(chain), ["123"]);
        let k22 = CombSpec::beta(2, 2).unwrap().build();
        assert_eq!(extensions(&k22).unwrap().count(), 3);
        assert_eq!(extensions(&Poset::antichain(0)).unwrap().count(), 1);
    }

    #[test]
    fn counting_examples() {
        let cases: [(CombSpec, &[&str], u32); 3] = [
            (CombSpec::beta(3, 2).unwrap(), &["312"], 12),
            (CombSpec::alpha(4, 2).unwrap(), &["213"], 14),
            (CombSpec::alpha(4, 3).unwrap(), &["231", "312"], 208),
        ];
        for (spec, ps, expected) in cases {
            let got = count_avoiding(&spec.build(), &pats(ps)).unwrap();
            assert_eq!(got, BigUint::from(expected), "{spec} {ps:?}");
        }
    }

    #[test]
    fn avoiding_132_leaves_identity_only() {
        for spec in [
            CombSpec::alpha(3, 3).unwrap(),
            CombSpec::beta(4, 2).unwrap(),
        ] {
            let p = spec.build();
            let got = list_avoiding(&p, &pats(&["132"]), None).unwrap();
            assert_eq!(got, vec![Permutation::identity(p.len())]);
        }
    }

    #[test]
    fn listing_examples() {
        let k22 = CombSpec::beta(2, 2).unwrap().build();
        assert_eq!(
            strings(list_avoiding(&k22, &pats(&["312"]), None).unwrap()),
            ["1234", "1324", "1342"]
        );
        assert_eq!(
            strings(list_avoiding(&k22, &pats(&["312"]), Some(2)).unwrap()),
            ["1234", "1324"]
        );
        assert_eq!(
            strings(list_avoiding(&Poset::chain(3), &pats(&["321"]), None).unwrap()),
            ["123"]
        );
        let a22 = CombSpec::alpha(2, 2).unwrap().build();
        assert!(list_avoiding(&a22, &pats(&["123"]), None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn iterator_output_is_sorted_and_valid() {
        let p = CombSpec::alpha(3, 3).unwrap().build();
        let all: Vec<Permutation> = extensions(&p).unwrap().collect();
        assert_eq!(all.len(), 280);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|v| p.is_extension(v).unwrap()));
    }

    #[test]
    fn general_patterns_are_pruned_correctly() {
        let p = CombSpec::beta(3, 3).unwrap().build();
        for ps in [
            pats(&["1324"]),
            pats(&["21"]),
            pats(&["2413", "312"]),
            pats(&["1"]),
        ] {
            let expected = extensions(&p)
                .unwrap()
                .filter(|v| !contains_any(v, &ps))
                .count();
            assert_eq!(
                count_avoiding(&p, &ps).unwrap(),
                BigUint::from(expected),
                "{ps}"
            );
            assert_eq!(avoiding_extensions(&p, &ps).unwrap().count(), expected);
        }
    }

    #[test]
    fn parallel_split_agrees_with_sequential() {
        let p = CombSpec::alpha(4, 3).unwrap().build();
        let ps = pats(&["321"]);
        let search = Search::new(&p, &ps).unwrap();
        let sequential = search.count_from(&mut search.root());
        assert_eq!(sequential, 3196);
        assert_eq!(count_avoiding(&p, &ps).unwrap(), BigUint::from(sequential));
    }

    #[test]
    fn rejects_oversized_posets() {
        let p = Poset::antichain(129);
        assert!(matches!(
            count_avoiding(&p, &PatternSet::empty()),
            Err(EnumerateError::TooLarge(129))
        ));
    }

    #[test]
    fn bit_helpers() {
        assert_eq!(above(128), 0);
        assert_eq!(below(1), 0);
        assert_eq!(highest(bit(128)), Some(128));
        assert_eq!(lowest(0), None);
    }
}
