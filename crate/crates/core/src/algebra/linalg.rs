//! Exact rank over the rationals.
//!
//! Rows are reduced one at a time against an echelon basis kept in sparse
//! form; the Macaulay matrices this serves are shifts of a few sparse rows,
//! so fill-in stays small.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::scalar::Rational;

/// Sparse row: column index to nonzero entry.
pub type SparseRow = BTreeMap<usize, Rational>;

/// Incremental row echelon basis.
#[derive(Default)]
pub struct Echelon {
    pivots: HashMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Adds a row; returns whether it was independent of the previous ones.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        while let Some((&lead, lv)) = row.iter().next() {
            let Some(p) = self.pivots.get(&lead) else {
                let inv = lv.recip();
                for v in row.values_mut() {
                    *v *= &inv;
                }
                self.pivots.insert(lead, row);
                return true;
            };
            let f = lv.clone();
            for (&c, pv) in p {
                let e = row.entry(c).or_insert_with(Rational::zero);
                *e -= &f * pv;
                if e.is_zero() {
                    row.remove(&c);
                }
            }
        }
        false
    }
}

/// Rank of a rational matrix given by dense rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect());
    }
    e.rank()
}
