//! The lattice of flats with covering relations and a lazily filled Möbius table.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matroid::{is_subset, Mask, Matroid};

pub type FlatId = usize;

#[derive(Debug)]
pub struct FlatLattice {
    flats: Vec<Mask>,
    ranks: Vec<usize>,
    by_rank: Vec<Vec<FlatId>>,
    index: Vec<u32>,
    up: Vec<Vec<FlatId>>,
    down: Vec<Vec<FlatId>>,
    moebius: Vec<OnceLock<Vec<i64>>>,
}

const NONE: u32 = u32::MAX;

impl FlatLattice {
    /// Enumerates flats by testing every subset for closedness.
    pub fn new(m: &Matroid) -> Self {
        let mut flats: Vec<Mask> = (0..=m.full()).filter(|&s| m.is_flat(s)).collect();
        flats.sort_by_key(|&f| (m.rank(f), f));
        let ranks: Vec<usize> = flats.iter().map(|&f| m.rank(f)).collect();
        let mut by_rank = vec![Vec::new(); m.rank_total() + 1];
        let mut index = vec![NONE; 1 << m.size()];
        for (i, &f) in flats.iter().enumerate() {
            by_rank[ranks[i]].push(i);
            index[f as usize] = i as u32;
        }
        let mut up = vec![Vec::new(); flats.len()];
        let mut down = vec![Vec::new(); flats.len()];
        for (i, &f) in flats.iter().enumerate() {
            if ranks[i] == m.rank_total() {
                continue;
            }
            for &j in &by_rank[ranks[i] + 1] {
                if is_subset(f, flats[j]) {
                    up[i].push(j);
                    down[j].push(i);
                }
            }
        }
        let moebius = (0..flats.len()).map(|_| OnceLock::new()).collect();
        FlatLattice { flats, ranks, by_rank, index, up, down, moebius }
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// Flats sorted by `(rank, mask)`.
    pub fn flats(&self) -> &[Mask] {
        &self.flats
    }

    pub fn flat(&self, id: FlatId) -> Mask {
        self.flats[id]
    }

    pub fn rank_of(&self, id: FlatId) -> usize {
        self.ranks[id]
    }

    pub fn of_rank(&self, k: usize) -> &[FlatId] {
        self.by_rank.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn rank_counts(&self) -> Vec<usize> {
        self.by_rank.iter().map(|v| v.len()).collect()
    }

    pub fn id(&self, f: Mask) -> Option<FlatId> {
        match self.index.get(f as usize) {
            Some(&i) if i != NONE => Some(i as usize),
            _ => None,
        }
    }

    pub fn bottom(&self) -> FlatId {
        0
    }

    pub fn top(&self) -> FlatId {
        self.flats.len() - 1
    }

    pub fn covers_up(&self, id: FlatId) -> &[FlatId] {
        &self.up[id]
    }

    pub fn covers_down(&self, id: FlatId) -> &[FlatId] {
        &self.down[id]
    }

    pub fn leq(&self, a: FlatId, b: FlatId) -> bool {
        is_subset(self.flats[a], self.flats[b])
    }

    /// Möbius function `mu(f, g)`.
    pub fn moebius(&self, f: FlatId, g: FlatId) -> Result<i64> {
        if !self.leq(f, g) {
            return Err(Error::NotComparable);
        }
        Ok(self.moebius_row(f)[g])
    }

    /// Row `mu(f, .)`, zero outside the upper interval of `f`.
    pub fn moebius_row(&self, f: FlatId) -> &[i64] {
        self.moebius[f].get_or_init(|| {
            let mut row = vec![0i64; self.flats.len()];
            row[f] = 1;
            let base = self.flats[f];
            for g in (f + 1)..self.flats.len() {
                let fg = self.flats[g];
                if !is_subset(base, fg) {
                    continue;
                }
                let mut s = 0i64;
                for h in f..g {
                    if row[h] != 0 && is_subset(self.flats[h], fg) {
                        s += row[h];
                    }
                }
                row[g] = -s;
            }
            row
        })
    }
}

/// Chains `0 < F_1 < ... < F_k` with exponents `1 <= a_i < rk F_i - rk F_(i-1)`, grouped by
/// total exponent `0..=max_degree`. The lattice must have the empty set as bottom.
pub fn nested_chains(lat: &FlatLattice, max_degree: usize) -> Vec<Vec<Vec<(FlatId, usize)>>> {
    let mut out = vec![Vec::new(); max_degree + 1];
    let mut stack = Vec::new();
    fn rec(
        lat: &FlatLattice,
        prev: FlatId,
        deg: usize,
        max_degree: usize,
        stack: &mut Vec<(FlatId, usize)>,
        out: &mut Vec<Vec<Vec<(FlatId, usize)>>>,
    ) {
        out[deg].push(stack.clone());
        let rp = lat.rank_of(prev);
        for g in (prev + 1)..lat.len() {
            let gap = lat.rank_of(g) - rp.min(lat.rank_of(g));
            if gap < 2 || !lat.leq(prev, g) {
                continue;
            }
            for a in 1..gap {
                if deg + a > max_degree {
                    break;
                }
                stack.push((g, a));
                rec(lat, g, deg + a, max_degree, stack, out);
                stack.pop();
            }
        }
    }
    rec(lat, lat.bottom(), 0, max_degree, &mut stack, &mut out);
    out
}
