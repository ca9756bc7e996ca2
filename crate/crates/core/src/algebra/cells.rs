//! Exact finite representation of predicate denotations.
//!
//! A denotation is a partition of the universe into inclusive segments, each
//! carrying the set of residues modulo a shared modulus `L` whose members lie
//! in the set. Atoms and interval endpoints become segment boundaries, and
//! divisibility literals become residue masks, so every predicate of either
//! algebra has an exact representation closed under the Boolean connectives.

use fixedbitset::FixedBitSet;

use super::{Algebra, Pred};

/// Moduli beyond this bound are rejected rather than allocated.
pub(crate) const MAX_MODULUS: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Seg {
    lo: i64,
    hi: i64,
    mask: FixedBitSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Cells {
    modulus: u64,
    segs: Vec<Seg>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    let l = a / gcd(a, b) * b;
    assert!(l <= MAX_MODULUS, "modulus {l} exceeds the supported bound {MAX_MODULUS}");
    l
}

/// Number of `x` in `[lo, hi]` with `x ≡ r (mod m)`.
fn count_in(lo: i64, hi: i64, r: u64, m: u64) -> u128 {
    if lo > hi {
        return 0;
    }
    let (lo, hi, r, m) = (lo as i128, hi as i128, r as i128, m as i128);
    let up_to = |t: i128| (t - r).div_euclid(m);
    (up_to(hi) - up_to(lo - 1)) as u128
}

/// Least `x ≥ t` with `x ≡ r (mod m)`, as i128 to avoid overflow.
fn first_at_or_above(t: i64, r: u64, m: u64) -> i128 {
    let (t, r, m) = (t as i128, r as i128, m as i128);
    t + (r - t).rem_euclid(m)
}

/// Greatest `x ≤ t` with `x ≡ r (mod m)`.
fn last_at_or_below(t: i64, r: u64, m: u64) -> i128 {
    let (t, r, m) = (t as i128, r as i128, m as i128);
    t - (t - r).rem_euclid(m)
}

impl Cells {
    fn universe(alg: Algebra) -> (i64, i64) {
        match alg {
            Algebra::Unicode => (0, super::MAX_CODEPOINT),
            Algebra::Integer => (i64::MIN, i64::MAX),
        }
    }

    fn constant(alg: Algebra, value: bool) -> Cells {
        let (lo, hi) = Self::universe(alg);
        let mut mask = FixedBitSet::with_capacity(1);
        mask.set(0, value);
        Cells { modulus: 1, segs: vec![Seg { lo, hi, mask }] }
    }

    fn interval(alg: Algebra, lo: i64, hi: i64) -> Cells {
        let (ulo, uhi) = Self::universe(alg);
        let (lo, hi) = (lo.max(ulo), hi.min(uhi));
        if lo > hi {
            return Self::constant(alg, false);
        }
        let bit = |v: bool| {
            let mut m = FixedBitSet::with_capacity(1);
            m.set(0, v);
            m
        };
        let mut segs = Vec::with_capacity(3);
        if lo > ulo {
            segs.push(Seg { lo: ulo, hi: lo - 1, mask: bit(false) });
        }
        segs.push(Seg { lo, hi, mask: bit(true) });
        if hi < uhi {
            segs.push(Seg { lo: hi + 1, hi: uhi, mask: bit(false) });
        }
        Cells { modulus: 1, segs }
    }

    fn divisible(alg: Algebra, k: u64) -> Cells {
        if k == 0 {
            return Self::constant(alg, false);
        }
        assert!(k <= MAX_MODULUS, "modulus {k} exceeds the supported bound {MAX_MODULUS}");
        let (lo, hi) = Self::universe(alg);
        let mut mask = FixedBitSet::with_capacity(k as usize);
        mask.insert(0);
        let mut c = Cells { modulus: k, segs: vec![Seg { lo, hi, mask }] };
        c.normalize();
        c
    }

    pub(crate) fn of(alg: Algebra, p: &Pred) -> Cells {
        match p {
            Pred::False => Self::constant(alg, false),
            Pred::True => Self::constant(alg, true),
            Pred::Range { lo, hi } => Self::interval(alg, *lo, *hi),
            Pred::Atom(a) => Self::interval(alg, *a, *a),
            Pred::Div(k) => Self::divisible(alg, *k),
            Pred::Not(q) => Self::of(alg, q).complement(),
            Pred::And(ps) => ps
                .iter()
                .fold(Self::constant(alg, true), |acc, q| acc.and(&Self::of(alg, q))),
            Pred::Or(ps) => ps
                .iter()
                .fold(Self::constant(alg, false), |acc, q| acc.or(&Self::of(alg, q))),
        }
    }

    pub(crate) fn complement(&self) -> Cells {
        let segs = self
            .segs
            .iter()
            .map(|s| {
                let mut mask = s.mask.clone();
                mask.toggle_range(..);
                Seg { lo: s.lo, hi: s.hi, mask }
            })
            .collect();
        Cells { modulus: self.modulus, segs }
    }

    pub(crate) fn and(&self, other: &Cells) -> Cells {
        self.combine(other, |a, b| a & b)
    }

    pub(crate) fn or(&self, other: &Cells) -> Cells {
        self.combine(other, |a, b| a | b)
    }

    pub(crate) fn xor(&self, other: &Cells) -> Cells {
        self.combine(other, |a, b| a ^ b)
    }

    fn lift(mask: &FixedBitSet, from: u64, to: u64) -> FixedBitSet {
        if from == to {
            return mask.clone();
        }
        let mut out = FixedBitSet::with_capacity(to as usize);
        for r in mask.ones() {
            let mut i = r as u64;
            while i < to {
                out.insert(i as usize);
                i += from;
            }
        }
        out
    }

    fn combine(&self, other: &Cells, op: impl Fn(bool, bool) -> bool) -> Cells {
        let m = lcm(self.modulus, other.modulus);
        let mut segs = Vec::with_capacity(self.segs.len() + other.segs.len());
        let (mut i, mut j) = (0, 0);
        let mut lo = self.segs[0].lo;
        while i < self.segs.len() && j < other.segs.len() {
            let (a, b) = (&self.segs[i], &other.segs[j]);
            let hi = a.hi.min(b.hi);
            let ma = Self::lift(&a.mask, self.modulus, m);
            let mb = Self::lift(&b.mask, other.modulus, m);
            let mut mask = FixedBitSet::with_capacity(m as usize);
            for r in 0..m as usize {
                if op(ma.contains(r), mb.contains(r)) {
                    mask.insert(r);
                }
            }
            segs.push(Seg { lo, hi, mask });
            if a.hi == hi {
                i += 1;
            }
            if b.hi == hi {
                j += 1;
            }
            if hi == i64::MAX {
                break;
            }
            lo = hi + 1;
        }
        let mut c = Cells { modulus: m, segs };
        c.normalize();
        c
    }

    /// Shrinks the modulus to the least period shared by all masks and merges
    /// adjacent segments with equal masks.
    fn normalize(&mut self) {
        if self.modulus > 1 {
            let m = self.modulus;
            let period = (1..m).filter(|d| m % d == 0).find(|&d| {
                self.segs.iter().all(|s| {
                    (d as usize..m as usize).all(|r| s.mask.contains(r) == s.mask.contains(r % d as usize))
                })
            });
            if let Some(d) = period {
                for s in &mut self.segs {
                    let mut mask = FixedBitSet::with_capacity(d as usize);
                    for r in s.mask.ones().filter(|&r| r < d as usize) {
                        mask.insert(r);
                    }
                    s.mask = mask;
                }
                self.modulus = d;
            }
        }
        let mut merged: Vec<Seg> = Vec::with_capacity(self.segs.len());
        for s in self.segs.drain(..) {
            match merged.last_mut() {
                Some(prev) if prev.mask == s.mask => prev.hi = s.hi,
                _ => merged.push(s),
            }
        }
        self.segs = merged;
    }

    fn residues<'a>(&self, s: &'a Seg) -> impl Iterator<Item = u64> + 'a {
        s.mask.ones().map(|r| r as u64)
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.segs.iter().all(|s| self.residues(s).all(|r| count_in(s.lo, s.hi, r, self.modulus) == 0))
    }

    pub(crate) fn contains(&self, x: i64) -> bool {
        let i = self.segs.partition_point(|s| s.hi < x);
        match self.segs.get(i) {
            Some(s) if s.lo <= x => s.mask.contains((x as i128).rem_euclid(self.modulus as i128) as usize),
            _ => false,
        }
    }

    /// `min(|self|, cap)`.
    pub(crate) fn count_capped(&self, cap: u128) -> u128 {
        let mut total: u128 = 0;
        for s in &self.segs {
            for r in self.residues(s) {
                total = total.saturating_add(count_in(s.lo, s.hi, r, self.modulus));
                if total >= cap {
                    return cap;
                }
            }
        }
        total
    }

    /// The least element under the algebra's witness order: ascending for
    /// codepoints, and `0, 1, -1, 2, -2, …` for integers.
    pub(crate) fn least(&self, alg: Algebra) -> Option<i64> {
        let key = |x: i128| match alg {
            Algebra::Unicode => (x, false),
            Algebra::Integer => (x.abs(), x < 0),
        };
        let m = self.modulus;
        let mut best: Option<i128> = None;
        let mut offer = |x: i128| {
            if best.map_or(true, |b| key(x) < key(b)) {
                best = Some(x);
            }
        };
        for s in &self.segs {
            for r in self.residues(s) {
                let up = first_at_or_above(s.lo, r, m);
                let down = last_at_or_below(s.hi, r, m);
                if alg == Algebra::Unicode || s.lo >= 0 {
                    if up <= s.hi as i128 {
                        offer(up);
                    }
                } else if s.hi < 0 {
                    if down >= s.lo as i128 {
                        offer(down);
                    }
                } else {
                    let nonneg = first_at_or_above(0, r, m);
                    if nonneg <= s.hi as i128 {
                        offer(nonneg);
                    }
                    let neg = last_at_or_below(-1, r, m);
                    if neg >= s.lo as i128 {
                        offer(neg);
                    }
                }
            }
        }
        best.map(|x| x as i64)
    }

    pub(crate) fn without_points(&self, alg: Algebra, points: &[i64]) -> Cells {
        points
            .iter()
            .fold(self.clone(), |acc, &p| acc.and(&Self::interval(alg, p, p).complement()))
    }

    /// Members in ascending order. Only meaningful for finite denotations;
    /// empty segments are skipped, so they may be unbounded.
    pub(crate) fn elements(&self) -> impl Iterator<Item = i64> + '_ {
        let m = self.modulus as i128;
        self.segs.iter().filter(|s| !s.mask.is_clear()).flat_map(move |s| {
            let mask = &s.mask;
            (s.lo as i128..=s.hi as i128)
                .filter(move |x| mask.contains(x.rem_euclid(m) as usize))
                .map(|x| x as i64)
        })
    }
}
