//! Published tables of avoiding-extension counts, cell by cell.
//!
//! Every table has columns `t = 2, 3, 4` and one row per spine length. Cells
//! are either observed (counted directly) or filled in from a closed form;
//! a few cells were never published and are left out.

use combx_core::{CombSpec, Family, PatternSet};
use serde::{Deserialize, Serialize};

/// Where a published cell came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    /// Counted by enumeration.
    Observed,
    /// Filled in from a formula.
    Filled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub s: u32,
    pub t: u32,
    pub value: u64,
    pub tag: Tag,
}

impl Cell {
    pub fn spec(&self, family: Family) -> CombSpec {
        CombSpec::even(family, self.s, self.t).expect("table cells have s, t >= 1")
    }
}

#[derive(Clone, Copy)]
enum E {
    B(u64),
    R(u64),
    N,
}

use E::{B, N, R};

pub const COLUMNS: [u32; 3] = [2, 3, 4];

/// One published table.
pub struct Table {
    pub family: Family,
    pub patterns: &'static [&'static str],
    first_s: u32,
    rows: &'static [[E; 3]],
}

impl Table {
    /// `alpha-231-312` style name.
    pub fn id(&self) -> String {
        format!("{}-{}", self.family, self.patterns.join("-"))
    }

    pub fn pattern_set(&self) -> PatternSet {
        PatternSet::parse(self.patterns).expect("static patterns are valid")
    }

    pub fn spine_range(&self) -> (u32, u32) {
        (self.first_s, self.first_s + self.rows.len() as u32 - 1)
    }

    /// Published cells in row-major order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let s = self.first_s + i as u32;
            for (&t, e) in COLUMNS.iter().zip(row) {
                let (value, tag) = match *e {
                    B(v) => (v, Tag::Observed),
                    R(v) => (v, Tag::Filled),
                    N => continue,
                };
                out.push(Cell { s, t, value, tag });
            }
        }
        out
    }

    pub fn cell(&self, s: u32, t: u32) -> Option<Cell> {
        self.cells().into_iter().find(|c| c.s == s && c.t == t)
    }

    /// Published cells of column `t`, by increasing `s`.
    pub fn column(&self, t: u32) -> Vec<Cell> {
        self.cells().into_iter().filter(|c| c.t == t).collect()
    }
}

const fn table(
    family: Family,
    patterns: &'static [&'static str],
    first_s: u32,
    rows: &'static [[E; 3]],
) -> Table {
    Table {
        family,
        patterns,
        first_s,
        rows,
    }
}

use Family::{Alpha, Beta};

pub static TABLES: &[Table] = &[
    table(
        Beta,
        &["312"],
        1,
        &[
            [B(1), B(1), B(1)],
            [B(3), B(4), B(5)],
            [B(12), B(22), R(35)],
            [B(55), B(140), R(285)],
            [B(273), R(969), R(2530)],
            [B(1428), R(7084), R(23751)],
        ],
    ),
    table(
        Alpha,
        &["213"],
        2,
        &[
            [B(2), B(2), B(2)],
            [B(5), B(5), B(5)],
            [B(14), B(14), R(14)],
            [B(42), R(42), R(42)],
            [B(132), R(132), R(132)],
        ],
    ),
    table(
        Alpha,
        &["231"],
        2,
        &[
            [B(3), B(8), B(21)],
            [B(11), B(91), N],
            [B(44), B(1210), N],
            [B(185), N, N],
            [B(804), N, N],
        ],
    ),
    table(
        Alpha,
        &["312"],
        2,
        &[
            [B(3), B(8), B(21)],
            [B(9), B(73), N],
            [B(28), B(738), N],
            [B(90), N, N],
            [B(297), N, N],
        ],
    ),
    table(
        Alpha,
        &["321"],
        2,
        &[
            [B(3), B(10), B(35)],
            [B(13), B(161), N],
            [B(67), B(3196), N],
            [B(378), N, N],
            [B(2244), N, N],
        ],
    ),
    table(
        Beta,
        &["213"],
        2,
        &[
            [B(2), B(3), B(4)],
            [B(4), B(9), R(16)],
            [B(8), B(27), R(64)],
            [B(16), R(81), R(256)],
            [B(32), R(243), R(1024)],
        ],
    ),
    table(
        Beta,
        &["231"],
        2,
        &[
            [B(2), B(3), B(4)],
            [B(4), B(9), R(16)],
            [B(8), B(27), R(64)],
            [B(16), R(81), R(256)],
            [B(32), R(243), R(1024)],
        ],
    ),
    table(
        Beta,
        &["321"],
        2,
        &[
            [B(3), B(10), B(35)],
            [B(12), B(127), B(1222)],
            [B(55), B(1866), N],
            [B(273), N, N],
            [B(1428), N, N],
        ],
    ),
    table(
        Alpha,
        &["213", "231"],
        2,
        &[
            [B(2), B(2), R(2)],
            [B(4), B(4), R(4)],
            [B(8), B(8), R(8)],
            [B(16), R(16), R(16)],
            [B(32), R(32), R(32)],
        ],
    ),
    table(
        Alpha,
        &["213", "312"],
        2,
        &[
            [B(2), B(2), R(2)],
            [B(4), B(4), R(4)],
            [B(8), B(8), R(8)],
            [B(16), R(16), R(16)],
            [B(32), R(32), R(32)],
        ],
    ),
    table(
        Alpha,
        &["213", "321"],
        2,
        &[
            [B(2), B(2), R(2)],
            [B(4), B(4), R(4)],
            [B(7), B(7), R(7)],
            [B(11), R(11), R(11)],
            [B(16), R(16), R(16)],
        ],
    ),
    table(
        Alpha,
        &["231", "312"],
        2,
        &[
            [B(3), B(8), R(21)],
            [B(7), B(44), R(274)],
            [B(15), B(208), R(2872)],
            [B(31), R(912), R(26784)],
            [B(63), R(3840), R(233904)],
        ],
    ),
    table(
        Alpha,
        &["231", "321"],
        2,
        &[
            [B(3), B(8), N],
            [B(9), B(57), N],
            [B(25), B(349), N],
            [B(65), N, N],
            [N, N, N],
        ],
    ),
    table(
        Alpha,
        &["312", "321"],
        2,
        &[
            [B(3), B(8), R(21)],
            [B(7), B(44), R(274)],
            [B(15), B(208), R(2872)],
            [B(31), R(912), R(26784)],
            [B(63), R(3840), R(233904)],
        ],
    ),
    table(
        Beta,
        &["213", "312"],
        2,
        &[
            [B(2), B(2), B(2)],
            [B(4), B(4), B(4)],
            [B(8), R(8), R(8)],
            [B(16), R(16), R(16)],
            [B(32), R(32), R(32)],
        ],
    ),
    table(
        Beta,
        &["213", "321"],
        2,
        &[
            [B(2), B(3), B(4)],
            [B(3), B(5), R(7)],
            [B(4), R(7), R(10)],
            [B(5), R(9), R(13)],
            [B(6), R(11), R(16)],
        ],
    ),
    table(
        Beta,
        &["231", "312"],
        2,
        &[
            [B(2), B(2), B(2)],
            [B(4), B(4), R(4)],
            [B(8), R(8), R(8)],
            [B(16), R(16), R(16)],
            [B(32), R(32), R(32)],
        ],
    ),
    table(
        Beta,
        &["231", "321"],
        2,
        &[
            [B(2), B(3), B(4)],
            [B(4), B(9), R(16)],
            [B(8), R(27), R(64)],
            [B(16), R(81), R(256)],
            [B(32), R(243), R(1024)],
        ],
    ),
    table(
        Beta,
        &["312", "321"],
        2,
        &[
            [B(3), B(4), B(5)],
            [B(9), B(16), R(25)],
            [B(27), R(64), R(125)],
            [B(81), R(256), R(625)],
            [B(243), R(1024), R(3125)],
        ],
    ),
];

/// The table for `family` avoiding exactly `patterns`, if one was published.
pub fn find(family: Family, patterns: &PatternSet) -> Option<&'static Table> {
    TABLES
        .iter()
        .find(|t| t.family == family && &t.pattern_set() == patterns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_ids_are_unique() {
        let mut ids: Vec<String> = TABLES.iter().map(Table::id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), TABLES.len());
        assert_eq!(TABLES.len(), 19);
    }

    #[test]
    fn cells_skip_blanks_and_keep_tags() {
        let t = find(Alpha, &PatternSet::parse(&["231"]).unwrap()).unwrap();
        assert_eq!(t.cells().len(), 9);
        assert!(t.cells().iter().all(|c| c.tag == Tag::Observed));
        assert_eq!(t.cell(4, 3).unwrap().value, 1210);
        assert!(t.cell(3, 4).is_none());

        let b = find(Beta, &PatternSet::parse(&["312"]).unwrap()).unwrap();
        assert_eq!(b.spine_range(), (1, 6));
        assert_eq!(
            b.cell(6, 3),
            Some(Cell {
                s: 6,
                t: 3,
                value: 7084,
                tag: Tag::Filled
            })
        );
        let col: Vec<u64> = b.column(2).iter().map(|c| c.value).collect();
        assert_eq!(col, [1, 3, 12, 55, 273, 1428]);
    }

    #[test]
    fn observed_cells_are_small_enough_to_enumerate() {
        for t in TABLES {
            for c in t.cells() {
                if c.tag == Tag::Observed {
                    assert!(c.s * c.t <= 12, "{} {:?}", t.id(), c);
                }
            }
        }
    }
}
