//! Minkowski weights on the braid fan and Bergman classes of matroids.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lattice::FlatLattice;
use crate::linalg::rank_i64;
use crate::matroid::{full_mask, is_subset, Mask, Matroid};
use crate::quotient::principal_truncation;

/// Cone of the braid fan spanned by `u_S` for a chain of proper nonempty subsets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainCone(Vec<Mask>);

impl ChainCone {
    pub fn new(n: usize, chain: Vec<Mask>) -> Result<Self> {
        let full = full_mask(n);
        for (i, &s) in chain.iter().enumerate() {
            if s == 0 {
                return Err(Error::EmptySetMember);
            }
            if !is_subset(s, full) {
                return Err(Error::ElementOutOfRange { element: 31 - s.leading_zeros() as usize, size: n });
            }
            if s == full {
                return Err(Error::NotAProperFlat(s));
            }
            if i > 0 && (chain[i - 1] == s || !is_subset(chain[i - 1], s)) {
                return Err(Error::NotComparable);
            }
        }
        Ok(ChainCone(chain))
    }

    pub fn sets(&self) -> &[Mask] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Integer weights on the `dim`-dimensional cones of the braid fan on `n` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinkowskiWeight {
    n: usize,
    dim: usize,
    weights: BTreeMap<ChainCone, i64>,
}

impl MinkowskiWeight {
    pub fn zero(n: usize, dim: usize) -> Self {
        MinkowskiWeight { n, dim, weights: BTreeMap::new() }
    }

    pub fn from_weights(n: usize, dim: usize, weights: impl IntoIterator<Item = (Vec<Mask>, i64)>) -> Result<Self> {
        let mut w = Self::zero(n, dim);
        for (chain, v) in weights {
            if chain.len() != dim {
                return Err(Error::WrongDimension(chain.len()));
            }
            w.set(ChainCone::new(n, chain)?, v);
        }
        Ok(w)
    }

    pub fn set(&mut self, cone: ChainCone, v: i64) {
        if v == 0 {
            self.weights.remove(&cone);
        } else {
            self.weights.insert(cone, v);
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, chain: &[Mask]) -> i64 {
        self.weights.get(&ChainCone(chain.to_vec())).copied().unwrap_or(0)
    }

    pub fn weights(&self) -> &BTreeMap<ChainCone, i64> {
        &self.weights
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scale(&self, c: i64) -> Self {
        let mut out = Self::zero(self.n, self.dim);
        for (k, &v) in &self.weights {
            out.set(k.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, &v) in &other.weights {
            let cur = out.weights.get(k).copied().unwrap_or(0);
            out.set(k.clone(), cur + v);
        }
        out
    }
}

/// Chains of proper nonempty flats of a given length.
pub fn flat_chains(lat: &FlatLattice, full: Mask, len: usize) -> Vec<Vec<Mask>> {
    let proper: Vec<Mask> = lat.flats().iter().copied().filter(|&f| f != 0 && f != full).collect();
    let mut out = Vec::new();
    fn rec(proper: &[Mask], start: usize, len: usize, cur: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..proper.len() {
            let f = proper[i];
            if let Some(&last) = cur.last() {
                if last == f || !is_subset(last, f) {
                    continue;
                }
            }
            cur.push(f);
            rec(proper, i + 1, len, cur, out);
            cur.pop();
        }
    }
    rec(&proper, 0, len, &mut Vec::new(), &mut out);
    out
}

/// `Δ_M`: weight one on each chain of `rk M - 1` proper nonempty flats.
pub fn bergman_class(m: &Matroid) -> Result<MinkowskiWeight> {
    if !m.is_loopless() {
        return Err(Error::LoopyMatroid);
    }
    if m.rank_total() == 0 {
        return Err(Error::InvalidRank { r: 0, n: m.size() });
    }
    let d = m.rank_total() - 1;
    let lat = FlatLattice::new(m);
    let mut w = MinkowskiWeight::zero(m.size(), d);
    for chain in flat_chains(&lat, m.full(), d) {
        w.weights.insert(ChainCone(chain), 1);
    }
    Ok(w)
}

/// Codimension-one faces `τ` of the support, with `Σ Δ(σ) e_{σ \ τ}` in `Z^E`.
fn balancing_sums(w: &MinkowskiWeight) -> BTreeMap<Vec<Mask>, Vec<i64>> {
    let mut sums: BTreeMap<Vec<Mask>, Vec<i64>> = BTreeMap::new();
    for (cone, &v) in &w.weights {
        let sets = cone.sets();
        for i in 0..sets.len() {
            let mut tau = sets.to_vec();
            let ray = tau.remove(i);
            let acc = sums.entry(tau).or_insert_with(|| vec![0; w.n]);
            for (e, slot) in acc.iter_mut().enumerate() {
                if ray & (1 << e) != 0 {
                    *slot += v;
                }
            }
        }
    }
    sums
}

/// Checks that each balancing sum lies in the span of `τ`'s rays and `e_E`.
pub fn check_balanced(w: &MinkowskiWeight) -> bool {
    let full = full_mask(w.n);
    let indicator = |s: Mask| -> Vec<i64> { (0..w.n).map(|e| i64::from(s & (1 << e) != 0)).collect() };
    balancing_sums(w).into_iter().all(|(tau, v)| {
        let mut rows: Vec<Vec<i64>> = tau.iter().map(|&s| indicator(s)).collect();
        rows.push(indicator(full));
        let base = rank_i64(&rows);
        rows.push(v);
        rank_i64(&rows) == base
    })
}

/// Blocks `S_1, S_2 \ S_1, ..., E \ S_k` of a chain.
pub fn chain_blocks(n: usize, chain: &[Mask]) -> Vec<Mask> {
    let full = full_mask(n);
    let mut prev = 0;
    let mut out = Vec::with_capacity(chain.len() + 1);
    for &s in chain.iter().chain(std::iter::once(&full)) {
        if s != prev {
            out.push(s & !prev);
        }
        prev = s;
    }
    out
}

/// `h_F ∩ Δ_M`, which is `Δ_{T_F(M)}` for flats of rank at least two and zero otherwise.
pub fn cap_with_h(flat: Mask, m: &Matroid) -> Result<MinkowskiWeight> {
    if !m.is_loopless() {
        return Err(Error::LoopyMatroid);
    }
    if flat == 0 {
        return Err(Error::EmptyFlat);
    }
    if flat & !m.full() != 0 || !m.is_flat(flat) {
        return Err(Error::NotAFlat(flat));
    }
    let d = m.rank_total() - 1;
    if m.rank(flat) <= 1 {
        return Ok(MinkowskiWeight::zero(m.size(), d.saturating_sub(1)));
    }
    bergman_class(&principal_truncation(m, flat)?)
}

/// Value on the zero-dimensional cone.
pub fn degree_of_point(w: &MinkowskiWeight) -> Result<i64> {
    if w.dim != 0 {
        return Err(Error::WrongDimension(w.dim));
    }
    Ok(w.get(&[]))
}

/// Dimension of the space of `dim`-dimensional Minkowski weights supported on the Bergman fan.
pub fn minkowski_weight_dimension(m: &Matroid, dim: usize) -> Result<usize> {
    if !m.is_loopless() {
        return Err(Error::LoopyMatroid);
    }
    let lat = FlatLattice::new(m);
    let full = m.full();
    let cones = flat_chains(&lat, full, dim);
    if cones.is_empty() {
        return Ok(0);
    }
    let index: BTreeMap<&[Mask], usize> = cones.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let mut faces: BTreeSet<Vec<Mask>> = BTreeSet::new();
    for c in &cones {
        for i in 0..c.len() {
            let mut t = c.clone();
            t.remove(i);
            faces.insert(t);
        }
    }
    // balancing at τ: the sum, as a function on E, is constant on each block of τ
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for tau in faces {
        let incident: Vec<(usize, Mask)> = cones
            .iter()
            .filter_map(|c| {
                let mut extra = None;
                let mut j = 0;
                for &s in c {
                    if j < tau.len() && tau[j] == s {
                        j += 1;
                    } else if extra.is_none() {
                        extra = Some(s);
                    } else {
                        return None;
                    }
                }
                (j == tau.len()).then(|| (index[c.as_slice()], extra.unwrap()))
            })
            .collect();
        for block in chain_blocks(m.size(), &tau) {
            let elems: Vec<usize> = crate::matroid::elements(block).collect();
            for pair in elems.windows(2) {
                let mut row = vec![0i64; cones.len()];
                for &(ci, ray) in &incident {
                    row[ci] += i64::from(ray & (1 << pair[0]) != 0) - i64::from(ray & (1 << pair[1]) != 0);
                }
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
    }
    Ok(cones.len() - if rows.is_empty() { 0 } else { rank_i64(&rows) })
}

/// Weight vectors over the union of their supports, one row per weight.
pub fn weight_matrix(ws: &[MinkowskiWeight]) -> Vec<Vec<i64>> {
    let cones: BTreeSet<&ChainCone> = ws.iter().flat_map(|w| w.weights.keys()).collect();
    let cones: Vec<&ChainCone> = cones.into_iter().collect();
    ws.iter().map(|w| cones.iter().map(|c| w.weights.get(*c).copied().unwrap_or(0)).collect()).collect()
}
