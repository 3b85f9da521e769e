//! Matroids on a ground set `{0, .., n}` with subsets stored as `u32` bitmasks.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground set. The rank table has `2^n` entries.
pub const MAX_GROUND: usize = 16;

pub type Mask = u32;

pub fn full_mask(n: usize) -> Mask {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn popcount(s: Mask) -> usize {
    s.count_ones() as usize
}

pub fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

/// Iterator over the elements of a mask in increasing order.
pub fn elements(mut s: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let i = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(i)
        }
    })
}

pub fn mask_of(items: &[usize]) -> Mask {
    items.iter().fold(0, |m, &i| m | (1 << i))
}

/// Formats a mask as `{0,2,3}`.
pub fn fmt_mask(s: Mask) -> String {
    let parts: Vec<String> = elements(s).map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    size: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > MAX_GROUND {
            return Err(Error::GroundSize { size, cap: MAX_GROUND });
        }
        Ok(GroundSet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn full(&self) -> Mask {
        full_mask(self.size)
    }
}

/// A matroid given by its bases, with an eagerly computed rank table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matroid {
    n: usize,
    r: usize,
    bases: Vec<Mask>,
    ranks: Vec<u8>,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bs: Vec<String> = self.bases.iter().map(|&b| fmt_mask(b)).collect();
        write!(f, "Matroid(n={}, r={}, bases=[{}])", self.n, self.r, bs.join(" "))
    }
}

impl Matroid {
    /// Builds a matroid from an explicit basis list, checking the exchange axiom.
    pub fn from_bases(ground: GroundSet, bases: &[Mask]) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::EmptyBases);
        }
        let n = ground.size();
        let full = ground.full();
        for &b in bases {
            if !is_subset(b, full) {
                let bad = elements(b & !full).next().unwrap_or(n);
                return Err(Error::ElementOutOfRange { element: bad, size: n });
            }
        }
        let r = popcount(bases[0]);
        if let Some(&b) = bases.iter().find(|&&b| popcount(b) != r) {
            return Err(Error::ExchangeAxiomViolation(format!(
                "bases {} and {} have different sizes",
                fmt_mask(bases[0]),
                fmt_mask(b)
            )));
        }
        let mut sorted = bases.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut is_basis = vec![false; 1 << n];
        for &b in &sorted {
            is_basis[b as usize] = true;
        }
        for &b1 in &sorted {
            for &b2 in &sorted {
                for x in elements(b1 & !b2) {
                    let base = b1 & !(1 << x);
                    let ok = elements(b2 & !b1).any(|y| is_basis[(base | (1 << y)) as usize]);
                    if !ok {
                        return Err(Error::ExchangeAxiomViolation(format!(
                            "no exchange for {} out of {} towards {}",
                            x,
                            fmt_mask(b1),
                            fmt_mask(b2)
                        )));
                    }
                }
            }
        }
        Ok(Self::from_valid_bases(n, sorted))
    }

    /// Trusted constructor: `bases` must already be a sorted, deduplicated matroid basis family.
    pub(crate) fn from_valid_bases(n: usize, bases: Vec<Mask>) -> Self {
        let r = popcount(bases[0]);
        let size = 1usize << n;
        let mut indep = vec![false; size];
        for &b in &bases {
            // every subset of a basis is independent
            let mut s = b;
            loop {
                indep[s as usize] = true;
                if s == 0 {
                    break;
                }
                s = (s - 1) & b;
            }
        }
        let mut ranks = vec![0u8; size];
        for s in 1..size {
            if indep[s] {
                ranks[s] = (s as Mask).count_ones() as u8;
            } else {
                ranks[s] = elements(s as Mask).map(|e| ranks[s & !(1 << e)]).max().unwrap_or(0);
            }
        }
        Matroid { n, r, bases, ranks }
    }

    /// Builds a matroid from a rank table that is known to be a matroid rank function.
    pub(crate) fn from_rank_table(n: usize, ranks: Vec<u8>) -> Self {
        let r = ranks[full_mask(n) as usize] as usize;
        let bases: Vec<Mask> = (0..(1u32 << n))
            .filter(|&s| popcount(s) == r && ranks[s as usize] as usize == r)
            .collect();
        Matroid { n, r, bases, ranks }
    }

    pub fn uniform(r: usize, n: usize) -> Result<Self> {
        let ground = GroundSet::new(n)?;
        if r > n {
            return Err(Error::InvalidRank { r, n });
        }
        let bases: Vec<Mask> = (0..=ground.full()).filter(|&s| popcount(s) == r).collect();
        Ok(Self::from_valid_bases(n, bases))
    }

    /// Boolean matroid `U_{n,n}`.
    pub fn boolean(n: usize) -> Result<Self> {
        Self::uniform(n, n)
    }

    /// Cycle matroid of a multigraph; the ground set is the edge list.
    pub fn graphic(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let m = edges.len();
        GroundSet::new(m)?;
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::ElementOutOfRange { element: u.max(v), size: vertices });
        }
        let mut ranks = vec![0u8; 1 << m];
        let mut parent = vec![0usize; vertices];
        for s in 1..(1usize << m) {
            for (i, p) in parent.iter_mut().enumerate() {
                *p = i;
            }
            let mut rank = 0u8;
            for e in elements(s as Mask) {
                let (u, v) = edges[e];
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                if a != b {
                    parent[a] = b;
                    rank += 1;
                }
            }
            ranks[s] = rank;
        }
        Ok(Self::from_rank_table(m, ranks))
    }

    /// The matroid `H_S` with bases `E \ i` for `i` in `S`.
    pub fn h_matroid(ground: GroundSet, s: Mask) -> Result<Self> {
        if s == 0 {
            return Err(Error::EmptyFlat);
        }
        let full = ground.full();
        if !is_subset(s, full) {
            return Err(Error::ElementOutOfRange { element: 31 - s.leading_zeros() as usize, size: ground.size() });
        }
        let mut bases: Vec<Mask> = elements(s).map(|i| full & !(1 << i)).collect();
        bases.sort_unstable();
        Ok(Self::from_valid_bases(ground.size(), bases))
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet { size: self.n }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> Mask {
        full_mask(self.n)
    }

    /// Rank of the whole matroid.
    pub fn rank_total(&self) -> usize {
        self.r
    }

    pub fn bases(&self) -> &[Mask] {
        &self.bases
    }

    pub fn rank(&self, s: Mask) -> usize {
        self.ranks[s as usize] as usize
    }

    pub fn rank_table(&self) -> &[u8] {
        &self.ranks
    }

    pub fn closure(&self, s: Mask) -> Mask {
        let rs = self.ranks[s as usize];
        let mut c = s;
        for e in elements(self.full() & !s) {
            if self.ranks[(s | (1 << e)) as usize] == rs {
                c |= 1 << e;
            }
        }
        c
    }

    pub fn is_flat(&self, s: Mask) -> bool {
        let rs = self.ranks[s as usize];
        elements(self.full() & !s).all(|e| self.ranks[(s | (1 << e)) as usize] > rs)
    }

    pub fn is_independent(&self, s: Mask) -> bool {
        self.rank(s) == popcount(s)
    }

    pub fn is_spanning(&self, s: Mask) -> bool {
        self.rank(s) == self.r
    }

    pub fn loops(&self) -> Mask {
        self.closure(0)
    }

    pub fn is_loopless(&self) -> bool {
        self.loops() == 0
    }

    /// Restriction `M|F`, relabeled onto `0..|F|`.
    pub fn restrict(&self, f: Mask) -> Result<Minor> {
        self.check_subset(f)?;
        if f == 0 {
            return Err(Error::GroundSize { size: 0, cap: MAX_GROUND });
        }
        let elems: Vec<usize> = elements(f).collect();
        let k = elems.len();
        let ranks: Vec<u8> = (0..(1u32 << k)).map(|t| self.ranks[lift(t, &elems) as usize]).collect();
        Ok(Minor { matroid: Self::from_rank_table(k, ranks), elements: elems })
    }

    /// Contraction `M/F`, relabeled onto `0..|E \ F|`.
    pub fn contract(&self, f: Mask) -> Result<Minor> {
        self.check_subset(f)?;
        let rest = self.full() & !f;
        if rest == 0 {
            return Err(Error::GroundSize { size: 0, cap: MAX_GROUND });
        }
        let elems: Vec<usize> = elements(rest).collect();
        let k = elems.len();
        let rf = self.ranks[f as usize];
        let ranks: Vec<u8> =
            (0..(1u32 << k)).map(|t| self.ranks[(lift(t, &elems) | f) as usize] - rf).collect();
        Ok(Minor { matroid: Self::from_rank_table(k, ranks), elements: elems })
    }

    /// Direct sum; the elements of `b` are shifted past those of `self`.
    pub fn direct_sum(&self, b: &Matroid) -> Result<Self> {
        let n = self.n + b.n;
        GroundSet::new(n)?;
        let mut bases: Vec<Mask> = Vec::with_capacity(self.bases.len() * b.bases.len());
        for &x in &self.bases {
            for &y in &b.bases {
                bases.push(x | (y << self.n));
            }
        }
        bases.sort_unstable();
        Ok(Self::from_valid_bases(n, bases))
    }

    /// Applies a permutation `perm[old] = new` to the ground set.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::GroundSetMismatch(perm.len(), self.n));
        }
        let mut bases: Vec<Mask> = self
            .bases
            .iter()
            .map(|&b| elements(b).fold(0, |m, i| m | (1 << perm[i])))
            .collect();
        bases.sort_unstable();
        Ok(Self::from_valid_bases(self.n, bases))
    }

    pub(crate) fn check_subset(&self, s: Mask) -> Result<()> {
        if is_subset(s, self.full()) {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange { element: 31 - s.leading_zeros() as usize, size: self.n })
        }
    }
}

/// A minor together with the original label of each new element.
#[derive(Debug, Clone)]
pub struct Minor {
    pub matroid: Matroid,
    pub elements: Vec<usize>,
}

impl Minor {
    /// Maps a subset of the minor back to the original ground set.
    pub fn lift(&self, t: Mask) -> Mask {
        lift(t, &self.elements)
    }

    /// Maps a subset of the original ground set into the minor, dropping other elements.
    pub fn project(&self, s: Mask) -> Mask {
        self.elements
            .iter()
            .enumerate()
            .filter(|&(_, &e)| s & (1 << e) != 0)
            .fold(0, |m, (i, _)| m | (1 << i))
    }
}

fn lift(t: Mask, elems: &[usize]) -> Mask {
    elements(t).fold(0, |m, i| m | (1 << elems[i]))
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_rank(m: &Matroid, s: Mask) -> usize {
        m.bases().iter().map(|&b| popcount(b & s)).max().unwrap()
    }

    fn k4() -> Matroid {
        Matroid::graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn from_bases_examples() {
        let g = GroundSet::new(3).unwrap();
        let m = Matroid::from_bases(g, &[0b011, 0b101, 0b110]).unwrap();
        assert_eq!(m, Matroid::uniform(2, 3).unwrap());
        assert!(matches!(
            Matroid::from_bases(g, &[0b011, 0b100]),
            Err(Error::ExchangeAxiomViolation(_))
        ));
        assert_eq!(Matroid::from_bases(g, &[]), Err(Error::EmptyBases));
        let g4 = GroundSet::new(4).unwrap();
        let m = Matroid::from_bases(g4, &[0b0111, 0b1011, 0b1101, 0b1110]).unwrap();
        assert_eq!(m.rank_total(), 3);
        // two disjoint pairs do not form a matroid
        assert!(Matroid::from_bases(g4, &[0b0011, 0b1100]).is_err());
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(Matroid::uniform(2, 3).unwrap().bases().len(), 3);
        assert_eq!(Matroid::uniform(3, 3).unwrap().bases(), &[0b111]);
        let z = Matroid::uniform(0, 2).unwrap();
        assert_eq!(z.rank_total(), 0);
        assert!(!z.is_loopless());
        assert_eq!(Matroid::uniform(3, 2), Err(Error::InvalidRank { r: 3, n: 2 }));
    }

    #[test]
    fn graphic_examples() {
        let k3 = Matroid::graphic(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k3, Matroid::uniform(2, 3).unwrap());
        let m = k4();
        assert_eq!(m.rank_total(), 3);
        // spanning trees of K4, counted by brute force over 3-edge subsets
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let trees = (0u32..64)
            .filter(|&s| popcount(s) == 3)
            .filter(|&s| {
                let mut seen = 0u32;
                let mut frontier = 1u32;
                while frontier != 0 {
                    seen |= frontier;
                    let mut next = 0;
                    for e in elements(s) {
                        let (u, v) = edges[e];
                        if frontier & (1 << u) != 0 {
                            next |= 1 << v;
                        }
                        if frontier & (1 << v) != 0 {
                            next |= 1 << u;
                        }
                    }
                    frontier = next & !seen;
                }
                seen == 0b1111
            })
            .count();
        assert_eq!(trees, 16);
        assert_eq!(m.bases().len(), 16);
        let par = Matroid::graphic(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(par.rank_total(), 1);
        assert_eq!(par.bases().len(), 2);
    }

    #[test]
    fn rank_and_closure_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert_eq!(u23.rank(0b011), 2);
        assert_eq!(u23.rank(0), 0);
        assert_eq!(u23.closure(0b001), 0b001);
        assert_eq!(u23.closure(0b011), 0b111);
        let m = k4();
        // edges 0=(0,1), 1=(0,2), 3=(1,2) form a triangle
        assert_eq!(m.rank(0b1011), 2);
        assert_eq!(m.closure(0b0011), 0b1011);
    }

    #[test]
    fn rank_table_matches_basis_intersection() {
        for m in [k4(), Matroid::uniform(3, 5).unwrap(), Matroid::uniform(0, 3).unwrap()] {
            for s in 0..=m.full() {
                assert_eq!(m.rank(s), brute_rank(&m, s));
            }
        }
    }

    #[test]
    fn restrict_contract_and_sums() {
        let u34 = Matroid::uniform(3, 4).unwrap();
        let r = u34.restrict(0b0011).unwrap();
        assert_eq!(r.matroid, Matroid::uniform(2, 2).unwrap());
        assert_eq!(r.elements, vec![0, 1]);
        let c = u34.contract(0b0011).unwrap();
        assert_eq!(c.matroid, Matroid::uniform(1, 2).unwrap());
        assert_eq!(c.elements, vec![2, 3]);
        assert_eq!(u34.restrict(u34.full()).unwrap().matroid, u34);

        let one = Matroid::uniform(1, 1).unwrap();
        let s = one.direct_sum(&one).unwrap();
        assert_eq!(s.bases(), &[0b11]);
        let h = Matroid::h_matroid(GroundSet::new(3).unwrap(), 0b111).unwrap();
        assert_eq!(h, Matroid::uniform(2, 3).unwrap());
        let h01 = Matroid::h_matroid(GroundSet::new(3).unwrap(), 0b011).unwrap();
        assert_eq!(h01.bases(), &[0b101, 0b110]);
        // H_S = U_{|E\S|,E\S} + U_{|S|-1,S} with S = {0,1} placed last
        let sum = Matroid::uniform(1, 1).unwrap().direct_sum(&Matroid::uniform(1, 2).unwrap()).unwrap();
        let moved = sum.relabel(&[2, 0, 1]).unwrap();
        assert_eq!(moved, h01);

        let loopy = Matroid::uniform(1, 2).unwrap().direct_sum(&Matroid::uniform(0, 1).unwrap()).unwrap();
        assert!(!loopy.is_loopless());
        assert!(Matroid::uniform(2, 3).unwrap().is_loopless());
    }

    #[test]
    fn ground_cap() {
        assert!(GroundSet::new(MAX_GROUND).is_ok());
        assert!(GroundSet::new(MAX_GROUND + 1).is_err());
        assert!(GroundSet::new(0).is_err());
    }
}
