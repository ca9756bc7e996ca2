//! Minterms: the satisfiable sign combinations of a finite predicate set.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;

use super::{Algebra, Cells, Pred};

/// Identifies the predicate set a minterm was generated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisId(u64);

impl BasisId {
    fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(0);
        BasisId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

/// One region of the partition induced by a predicate set.
#[derive(Clone, Debug)]
pub struct Minterm {
    positives: FixedBitSet,
    cells: Cells,
    source: BasisId,
}

impl Minterm {
    /// Indices (into [`MintermSet::predicates`]) of the predicates that occur
    /// non-negated in this minterm.
    pub fn positives(&self) -> impl Iterator<Item = usize> + '_ {
        self.positives.ones()
    }

    /// `φ ⊏ self`: predicate `i` occurs positively.
    pub fn has_positive(&self, i: usize) -> bool {
        self.positives.contains(i)
    }

    pub fn source_set_id(&self) -> BasisId {
        self.source
    }

    pub fn contains(&self, x: i64) -> bool {
        self.cells.contains(x)
    }
}

/// The minterms of a predicate set, together with the (semantically
/// deduplicated) predicates they are built from.
#[derive(Clone, Debug)]
pub struct MintermSet {
    id: BasisId,
    algebra: Algebra,
    preds: Vec<Pred>,
    pred_cells: Vec<Cells>,
    lookup: HashMap<Cells, usize>,
    minterms: Vec<Minterm>,
    under: Vec<Vec<usize>>,
}

impl MintermSet {
    pub fn new(algebra: Algebra, preds: &[Pred]) -> Self {
        let mut set = MintermSet {
            id: BasisId::fresh(),
            algebra,
            preds: Vec::new(),
            pred_cells: Vec::new(),
            lookup: HashMap::new(),
            minterms: Vec::new(),
            under: Vec::new(),
        };
        for p in preds {
            let cells = algebra.cells(p);
            if set.find(&cells).is_none() {
                set.lookup.insert(cells.clone(), set.preds.len());
                set.preds.push(p.clone());
                set.pred_cells.push(cells);
            }
        }
        let n = set.preds.len();
        let mut regions = vec![(FixedBitSet::with_capacity(n), algebra.cells(&Pred::True))];
        for (i, c) in set.pred_cells.iter().enumerate() {
            let negated = c.complement();
            let mut next = Vec::with_capacity(regions.len() * 2);
            for (pos, region) in regions {
                let inside = region.and(c);
                let outside = region.and(&negated);
                if !inside.is_empty() {
                    let mut p = pos.clone();
                    p.insert(i);
                    next.push((p, inside));
                }
                if !outside.is_empty() {
                    next.push((pos, outside));
                }
            }
            regions = next;
        }
        let id = set.id;
        set.minterms = regions
            .into_iter()
            .map(|(positives, cells)| Minterm { positives, cells, source: id })
            .collect();
        set.under = (0..n)
            .map(|i| (0..set.minterms.len()).filter(|&m| set.minterms[m].has_positive(i)).collect())
            .collect();
        set
    }

    fn find(&self, cells: &Cells) -> Option<usize> {
        if let Some(&i) = self.lookup.get(cells) {
            return Some(i);
        }
        self.pred_cells.iter().position(|c| c.xor(cells).is_empty())
    }

    pub fn id(&self) -> BasisId {
        self.id
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    /// The deduplicated source predicates.
    pub fn predicates(&self) -> &[Pred] {
        &self.preds
    }

    /// Index of the source predicate denoting the same set as `p`.
    pub fn index_of(&self, p: &Pred) -> Option<usize> {
        self.find(&self.algebra.cells(p))
    }

    pub fn len(&self) -> usize {
        self.minterms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minterms.is_empty()
    }

    pub fn get(&self, m: usize) -> &Minterm {
        &self.minterms[m]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Minterm> {
        self.minterms.iter()
    }

    /// Minterms in which source predicate `i` occurs positively.
    pub fn minterms_under(&self, i: usize) -> &[usize] {
        &self.under[i]
    }

    /// The unique minterm containing `x`.
    pub fn minterm_of(&self, x: i64) -> Option<usize> {
        self.minterms.iter().position(|m| m.contains(x))
    }

    /// The full conjunction of signed source predicates defining minterm `m`.
    pub fn conjunction(&self, m: usize) -> Pred {
        let pos = &self.minterms[m].positives;
        Pred::and_all(
            self.preds
                .iter()
                .enumerate()
                .map(|(i, p)| if pos.contains(i) { p.clone() } else { Pred::not(p.clone()) })
                .collect(),
        )
    }

    /// A shorter predicate with the same denotation as minterm `m`, obtained by
    /// dropping literals that do not change it.
    pub fn compact(&self, m: usize) -> Pred {
        let pos = &self.minterms[m].positives;
        let target = &self.minterms[m].cells;
        let mut keep: Vec<bool> = vec![true; self.preds.len()];
        let literal = |i: usize| if pos.contains(i) { self.pred_cells[i].clone() } else { self.pred_cells[i].complement() };
        for i in 0..self.preds.len() {
            keep[i] = false;
            let mut acc = self.algebra.cells(&Pred::True);
            for j in (0..self.preds.len()).filter(|&j| keep[j]) {
                acc = acc.and(&literal(j));
            }
            if acc.xor(target).is_empty() {
                continue;
            }
            keep[i] = true;
        }
        Pred::and_all(
            (0..self.preds.len())
                .filter(|&i| keep[i])
                .map(|i| if pos.contains(i) { self.preds[i].clone() } else { Pred::not(self.preds[i].clone()) })
                .collect(),
        )
    }

    /// `min(|[[m]]|, cap)`.
    pub fn size_capped(&self, m: usize, cap: u64) -> u64 {
        self.minterms[m].cells.count_capped(cap as u128) as u64
    }

    /// Least element of minterm `m` not in `excluded`.
    pub fn witness(&self, m: usize, excluded: &[i64]) -> Option<i64> {
        self.minterms[m].cells.without_points(self.algebra, excluded).least(self.algebra)
    }
}
