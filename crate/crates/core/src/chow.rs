//! Chow rings of loopless matroids.
//!
//! Products are evaluated in the z-alphabet, where the standard monomials of the known Gröbner
//! basis are the chain monomials `z_{F_1}^{a_1}...z_{F_k}^{a_k}` with `a_i < rk F_i - rk F_(i-1)`.
//! Multiplication by each generator is tabulated once per degree. Coordinates in the nested
//! h-basis are then obtained by a triangular solve whose shape is checked against the leading
//! terms, which certifies that the nested monomials form a basis.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::lattice::{nested_chains, FlatId, FlatLattice};
use crate::matroid::{elements, is_subset, popcount, Mask, Matroid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    Z,
    X,
    H,
}

/// Monomial over flat-indexed variables: `(flat, exponent)` sorted by flat mask.
pub type Monomial = Vec<(Mask, u32)>;

/// Sparse polynomial in one alphabet with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowElement {
    alphabet: Alphabet,
    terms: BTreeMap<Monomial, BigRational>,
}

fn canonical(mono: &[(Mask, u32)]) -> Monomial {
    let mut m: BTreeMap<Mask, u32> = BTreeMap::new();
    for &(f, e) in mono {
        if e > 0 {
            *m.entry(f).or_insert(0) += e;
        }
    }
    m.into_iter().collect()
}

impl ChowElement {
    pub fn zero(alphabet: Alphabet) -> Self {
        ChowElement { alphabet, terms: BTreeMap::new() }
    }

    pub fn one(alphabet: Alphabet) -> Self {
        Self::monomial(alphabet, &[], BigRational::one())
    }

    pub fn monomial(alphabet: Alphabet, mono: &[(Mask, u32)], coeff: BigRational) -> Self {
        let mut e = Self::zero(alphabet);
        e.add_term(canonical(mono), coeff);
        e
    }

    pub fn variable(alphabet: Alphabet, flat: Mask) -> Self {
        Self::monomial(alphabet, &[(flat, 1)], BigRational::one())
    }

    /// Product of the listed variables, repeats allowed.
    pub fn product(alphabet: Alphabet, flats: &[Mask]) -> Self {
        let mono: Vec<(Mask, u32)> = flats.iter().map(|&f| (f, 1)).collect();
        Self::monomial(alphabet, &mono, BigRational::one())
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    /// Common degree of all terms; `None` for zero or inhomogeneous elements.
    pub fn grade(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|m| m.iter().map(|&(_, e)| e as usize).sum::<usize>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.grade().is_some()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.alphabet);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.alphabet, other.alphabet, "adding elements of different alphabets");
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(m.clone(), v.clone());
        }
        out
    }

    /// Polynomial product, without reduction.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.alphabet, other.alphabet, "multiplying elements of different alphabets");
        let mut out = Self::zero(self.alphabet);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut mono = a.clone();
                mono.extend_from_slice(b);
                out.add_term(canonical(&mono), x * y);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(self.alphabet), |acc, _| acc.mul(self))
    }
}

/// Coefficient types that can absorb integer structure constants.
pub trait Coeff: Clone + Zero {
    fn mul_add_i64(&mut self, x: &Self, c: i64) -> Option<()>;
}

impl Coeff for i64 {
    fn mul_add_i64(&mut self, x: &Self, c: i64) -> Option<()> {
        *self = self.checked_add(x.checked_mul(c)?)?;
        Some(())
    }
}

impl Coeff for i128 {
    fn mul_add_i64(&mut self, x: &Self, c: i64) -> Option<()> {
        *self = self.checked_add(x.checked_mul(c as i128)?)?;
        Some(())
    }
}

impl Coeff for BigInt {
    fn mul_add_i64(&mut self, x: &Self, c: i64) -> Option<()> {
        *self += x * c;
        Some(())
    }
}

impl Coeff for BigRational {
    fn mul_add_i64(&mut self, x: &Self, c: i64) -> Option<()> {
        *self += x * BigRational::from_integer(c.into());
        Some(())
    }
}

/// Sparse linear map between graded pieces, stored by columns.
#[derive(Debug, Clone, Default)]
pub struct Op {
    cols: Vec<Vec<(u32, i64)>>,
    rows: usize,
}

impl Op {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.cols[j]
    }

    pub fn apply<T: Coeff>(&self, v: &[T]) -> Option<Vec<T>> {
        let mut out = vec![T::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(i, c) in &self.cols[j] {
                out[i as usize].mul_add_i64(x, c)?;
            }
        }
        Some(out)
    }

    /// Row vector times matrix: the pullback of a functional on the target.
    pub fn pullback<T: Coeff>(&self, w: &[T]) -> Option<Vec<T>> {
        let mut out = vec![T::zero(); self.cols.len()];
        for (j, col) in self.cols.iter().enumerate() {
            let acc = &mut out[j];
            for &(i, c) in col {
                let x = &w[i as usize];
                if !x.is_zero() {
                    acc.mul_add_i64(x, c)?;
                }
            }
        }
        Some(out)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols.len()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, c) in col {
                m[i as usize][j] = c;
            }
        }
        m
    }
}

/// Nonempty flats listed from the smallest variable to the largest: higher rank first,
/// equal ranks by ascending mask.
#[derive(Debug, Clone)]
pub struct FlatOrder {
    pub flats: Vec<Mask>,
    position: FxHashMap<Mask, usize>,
}

impl FlatOrder {
    pub fn new(lat: &FlatLattice) -> Self {
        let mut ids: Vec<FlatId> = (0..lat.len()).filter(|&i| lat.flat(i) != 0).collect();
        ids.sort_by_key(|&i| (std::cmp::Reverse(lat.rank_of(i)), lat.flat(i)));
        let flats: Vec<Mask> = ids.iter().map(|&i| lat.flat(i)).collect();
        let position = flats.iter().enumerate().map(|(p, &f)| (f, p)).collect();
        FlatOrder { flats, position }
    }

    pub fn position(&self, f: Mask) -> Option<usize> {
        self.position.get(&f).copied()
    }

    /// Lexicographic comparison of monomials with respect to this variable order.
    pub fn compare(&self, a: &[(Mask, u32)], b: &[(Mask, u32)]) -> Ordering {
        let key = |m: &[(Mask, u32)]| {
            let mut v: Vec<(usize, u32)> = m.iter().map(|&(f, e)| (self.position[&f], e)).collect();
            v.sort_by(|x, y| y.0.cmp(&x.0));
            v
        };
        let (ka, kb) = (key(a), key(b));
        for (x, y) in ka.iter().zip(kb.iter()) {
            if x.0 != y.0 {
                return x.0.cmp(&y.0);
            }
            if x.1 != y.1 {
                return x.1.cmp(&y.1);
            }
        }
        ka.len().cmp(&kb.len())
    }
}

/// Monomial basis `h_{F_1}^{a_1}...h_{F_k}^{a_k}` per degree.
#[derive(Debug, Clone)]
pub struct NestedBasis {
    pub degrees: Vec<Vec<Vec<(Mask, usize)>>>,
}

impl NestedBasis {
    pub fn hilbert(&self) -> Vec<usize> {
        self.degrees.iter().map(|v| v.len()).collect()
    }

    pub fn index_of(&self, mono: &[(Mask, usize)]) -> Option<(usize, usize)> {
        let k: usize = mono.iter().map(|&(_, a)| a).sum();
        let pos = self.degrees.get(k)?.iter().position(|m| m.as_slice() == mono)?;
        Some((k, pos))
    }
}

pub fn nested_basis(m: &Matroid) -> Result<NestedBasis> {
    if !m.is_loopless() {
        return Err(Error::LoopyMatroid);
    }
    let lat = FlatLattice::new(m);
    Ok(nested_from_lattice(&lat, m.rank_total().saturating_sub(1)))
}

fn nested_from_lattice(lat: &FlatLattice, d: usize) -> NestedBasis {
    let chains = nested_chains(lat, d);
    NestedBasis {
        degrees: chains
            .into_iter()
            .map(|v| v.into_iter().map(|c| c.into_iter().map(|(f, a)| (lat.flat(f), a)).collect()).collect())
            .collect(),
    }
}

pub fn hilbert_function(m: &Matroid) -> Result<Vec<usize>> {
    Ok(nested_basis(m)?.hilbert())
}

/// Chain monomial in variable indices, sorted by rank.
type ZMono = Vec<(u16, u8)>;

struct Reducer<'a> {
    masks: &'a [Mask],
    ranks: &'a [usize],
    std_index: &'a [FxHashMap<ZMono, u32>],
    d: usize,
    memo: FxHashMap<ZMono, Rc<Vec<(u32, i64)>>>,
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl<'a> Reducer<'a> {
    fn reduce(&mut self, mono: &ZMono) -> Result<Rc<Vec<(u32, i64)>>> {
        if let Some(r) = self.memo.get(mono) {
            return Ok(r.clone());
        }
        let deg: usize = mono.iter().map(|&(_, e)| e as usize).sum();
        let out = if deg > self.d {
            Vec::new()
        } else {
            self.reduce_uncached(mono, deg)?
        };
        let rc = Rc::new(out);
        self.memo.insert(mono.clone(), rc.clone());
        Ok(rc)
    }

    fn reduce_uncached(&mut self, mono: &ZMono, deg: usize) -> Result<Vec<(u32, i64)>> {
        let mut prev_rank = 0;
        let mut violation = None;
        for (i, &(v, a)) in mono.iter().enumerate() {
            let gap = self.ranks[v as usize] - prev_rank;
            if a as usize >= gap {
                violation = Some((i, gap));
                break;
            }
            prev_rank = self.ranks[v as usize];
        }
        let Some((i, e)) = violation else {
            let idx = self.std_index[deg][mono];
            return Ok(vec![(idx, 1)]);
        };
        let (g, a) = mono[i];
        let gmask = self.masks[g as usize];
        let above: Vec<u16> = (0..self.masks.len() as u16)
            .filter(|&h| {
                let hm = self.masks[h as usize];
                hm != gmask
                    && is_subset(gmask, hm)
                    && mono[i + 1..].iter().all(|&(f, _)| {
                        let fm = self.masks[f as usize];
                        is_subset(hm, fm) || is_subset(fm, hm)
                    })
            })
            .collect();
        let mut acc: FxHashMap<u32, i64> = FxHashMap::default();
        for j in 1..=e {
            let outer = -binom(e, j);
            let mut picks = Vec::new();
            let mut terms = Vec::new();
            chain_multisets(&above, self.masks, j, 0, &mut picks, &mut terms);
            for (picked, mult) in terms {
                let coeff = outer.checked_mul(mult).ok_or(Error::Overflow)?;
                let mut next: Vec<(u16, u8)> = Vec::with_capacity(mono.len() + picked.len());
                for (k, &(v, x)) in mono.iter().enumerate() {
                    if k == i {
                        if a as usize > j {
                            next.push((v, a - j as u8));
                        }
                    } else {
                        next.push((v, x));
                    }
                }
                for (h, x) in picked {
                    match next.iter_mut().find(|(v, _)| *v == h) {
                        Some(slot) => slot.1 += x,
                        None => next.push((h, x)),
                    }
                }
                next.sort_by_key(|&(v, _)| (self.ranks[v as usize], self.masks[v as usize]));
                let sub = self.reduce(&next)?;
                for &(idx, c) in sub.iter() {
                    let slot = acc.entry(idx).or_insert(0);
                    *slot = slot.checked_add(c.checked_mul(coeff).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                }
            }
        }
        let mut out: Vec<(u32, i64)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// Size-`j` multisets from `cands` (sorted by rank) that form a chain, with multinomial weights.
fn chain_multisets(
    cands: &[u16],
    masks: &[Mask],
    j: usize,
    start: usize,
    picks: &mut Vec<(u16, u8)>,
    out: &mut Vec<(Vec<(u16, u8)>, i64)>,
) {
    if j == 0 {
        let total: usize = picks.iter().map(|&(_, x)| x as usize).sum();
        let mut coeff = 1i64;
        let mut rem = total;
        for &(_, x) in picks.iter() {
            coeff *= binom(rem, x as usize);
            rem -= x as usize;
        }
        out.push((picks.clone(), coeff));
        return;
    }
    for idx in start..cands.len() {
        let h = cands[idx];
        let hm = masks[h as usize];
        if let Some(&(last, _)) = picks.last() {
            if !is_subset(masks[last as usize], hm) {
                continue;
            }
        }
        for x in 1..=j {
            picks.push((h, x as u8));
            chain_multisets(cands, masks, j - x, idx + 1, picks, out);
            picks.pop();
        }
    }
}

/// The Chow ring of a loopless matroid with tabulated multiplication.
pub struct ChowRing {
    matroid: Matroid,
    lattice: FlatLattice,
    d: usize,
    /// variable `v` is the nonempty flat with lattice id `v + 1`
    masks: Vec<Mask>,
    ranks: Vec<usize>,
    order: FlatOrder,
    std: Vec<Vec<ZMono>>,
    zops: Vec<Vec<Op>>,
    hops: Vec<Vec<Op>>,
    top_value: i64,
    nested: NestedBasis,
    /// per degree: columns of the nested basis in z-coordinates and the lex order of rows
    tmat: Vec<Op>,
    lex_desc: Vec<Vec<usize>>,
}

impl std::fmt::Debug for ChowRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChowRing(d={}, hilbert={:?})", self.d, self.nested.hilbert())
    }
}

impl ChowRing {
    pub fn new(m: &Matroid) -> Result<Self> {
        if !m.is_loopless() {
            return Err(Error::LoopyMatroid);
        }
        if m.rank_total() == 0 {
            return Err(Error::InvalidRank { r: 0, n: m.size() });
        }
        let lattice = FlatLattice::new(m);
        let d = m.rank_total() - 1;
        let masks: Vec<Mask> = lattice.flats()[1..].to_vec();
        let ranks: Vec<usize> = (1..lattice.len()).map(|i| lattice.rank_of(i)).collect();
        if masks.len() > u16::MAX as usize || m.rank_total() > 64 {
            return Err(Error::Unsupported("lattice too large".into()));
        }
        let order = FlatOrder::new(&lattice);
        let nested = nested_from_lattice(&lattice, d);
        let std: Vec<Vec<ZMono>> = nested
            .degrees
            .iter()
            .map(|deg| {
                deg.iter()
                    .map(|c| c.iter().map(|&(f, a)| ((lattice.id(f).unwrap() - 1) as u16, a as u8)).collect())
                    .collect()
            })
            .collect();
        let std_index: Vec<FxHashMap<ZMono, u32>> =
            std.iter().map(|v| v.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect()).collect();
        let mut red = Reducer { masks: &masks, ranks: &ranks, std_index: &std_index, d, memo: FxHashMap::default() };

        let nv = masks.len();
        let mut zops: Vec<Vec<Op>> = Vec::with_capacity(d);
        for k in 0..d {
            let mut per_var = Vec::with_capacity(nv);
            for v in 0..nv {
                let vm = masks[v];
                let mut cols = Vec::with_capacity(std[k].len());
                for s in &std[k] {
                    let chain_ok =
                        s.iter().all(|&(f, _)| is_subset(masks[f as usize], vm) || is_subset(vm, masks[f as usize]));
                    if !chain_ok {
                        cols.push(Vec::new());
                        continue;
                    }
                    let mut mono = s.clone();
                    match mono.iter_mut().find(|(f, _)| *f as usize == v) {
                        Some(slot) => slot.1 += 1,
                        None => mono.push((v as u16, 1)),
                    }
                    mono.sort_by_key(|&(f, _)| (ranks[f as usize], masks[f as usize]));
                    cols.push(red.reduce(&mono)?.as_ref().clone());
                }
                per_var.push(Op { cols, rows: std[k + 1].len() });
            }
            zops.push(per_var);
        }

        // ∫ of a maximal flag of proper flats is 1; this fixes the value on z_E^d
        let mut flag: ZMono = Vec::with_capacity(d);
        let mut cur = lattice.bottom();
        for _ in 0..d {
            cur = lattice.covers_up(cur)[0];
            flag.push(((cur - 1) as u16, 1));
        }
        let red_flag = red.reduce(&flag)?;
        let top_value = match red_flag.as_slice() {
            [(0, c)] if c.abs() == 1 => *c,
            [] if d == 0 => 1,
            other => return Err(Error::Unsupported(format!("maximal flag reduced to {other:?}"))),
        };
        drop(red);

        let mut hops: Vec<Vec<Op>> = Vec::with_capacity(d);
        for k in 0..d {
            let rows = std[k + 1].len();
            let mut per_var = Vec::with_capacity(nv);
            for f in 0..nv {
                let above: Vec<usize> = (0..nv).filter(|&g| is_subset(masks[f], masks[g])).collect();
                let mut cols = Vec::with_capacity(std[k].len());
                let mut dense = vec![0i64; rows];
                for j in 0..std[k].len() {
                    dense.iter_mut().for_each(|x| *x = 0);
                    for &g in &above {
                        for &(i, c) in &zops[k][g].cols[j] {
                            dense[i as usize] = dense[i as usize].checked_sub(c).ok_or(Error::Overflow)?;
                        }
                    }
                    cols.push(dense.iter().enumerate().filter(|&(_, &c)| c != 0).map(|(i, &c)| (i as u32, c)).collect());
                }
                per_var.push(Op { cols, rows });
            }
            hops.push(per_var);
        }

        let mut ring = ChowRing {
            matroid: m.clone(),
            lattice,
            d,
            masks,
            ranks,
            order,
            std,
            zops,
            hops,
            top_value,
            nested,
            tmat: Vec::new(),
            lex_desc: Vec::new(),
        };
        ring.certify_nested()?;
        Ok(ring)
    }

    fn certify_nested(&mut self) -> Result<()> {
        for k in 0..=self.d {
            let n = self.std[k].len();
            let monos: Vec<Vec<(Mask, u32)>> = self.std[k]
                .iter()
                .map(|s| s.iter().map(|&(v, a)| (self.masks[v as usize], a as u32)).collect())
                .collect();
            let mut lex: Vec<usize> = (0..n).collect();
            lex.sort_by(|&a, &b| self.order.compare(&monos[b], &monos[a]));
            let mut rank_in_lex = vec![0usize; n];
            for (p, &i) in lex.iter().enumerate() {
                rank_in_lex[i] = p;
            }
            let mut cols = Vec::with_capacity(n);
            for j in 0..n {
                let chain: Vec<(Mask, usize)> = self.nested.degrees[k][j].clone();
                let v = self.h_chain_vector::<i64>(&chain)?;
                let col: Vec<(u32, i64)> =
                    v.iter().enumerate().filter(|&(_, &c)| c != 0).map(|(i, &c)| (i as u32, c)).collect();
                // leading term is the z-monomial of the same shape with coefficient ±1
                let diag = v[j];
                if diag.abs() != 1 || col.iter().any(|&(i, _)| i as usize != j && rank_in_lex[i as usize] < rank_in_lex[j]) {
                    return Err(Error::Unsupported(format!("nested basis certification failed in degree {k}")));
                }
                cols.push(col);
            }
            self.tmat.push(Op { cols, rows: n });
            self.lex_desc.push(lex);
        }
        Ok(())
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn lattice(&self) -> &FlatLattice {
        &self.lattice
    }

    /// Top degree `d = rank - 1`.
    pub fn top_degree(&self) -> usize {
        self.d
    }

    pub fn nested(&self) -> &NestedBasis {
        &self.nested
    }

    pub fn hilbert(&self) -> Vec<usize> {
        self.nested.hilbert()
    }

    pub fn flat_order(&self) -> &FlatOrder {
        &self.order
    }

    pub fn dim(&self, k: usize) -> usize {
        self.std.get(k).map_or(0, |v| v.len())
    }

    /// ∫ z_E^d, which is ±1.
    pub fn top_value(&self) -> i64 {
        self.top_value
    }

    /// Variable index of a nonempty flat.
    pub fn var(&self, f: Mask) -> Result<usize> {
        match self.lattice.id(f) {
            Some(id) if id > 0 => Ok(id - 1),
            _ => Err(Error::NotAFlat(f)),
        }
    }

    pub fn var_mask(&self, v: usize) -> Mask {
        self.masks[v]
    }

    pub fn var_rank(&self, v: usize) -> usize {
        self.ranks[v]
    }

    pub fn num_vars(&self) -> usize {
        self.masks.len()
    }

    /// Multiplication by `z_F` from degree `k`; `None` at the top degree.
    pub fn z_op(&self, k: usize, v: usize) -> Option<&Op> {
        self.zops.get(k).map(|ops| &ops[v])
    }

    /// Multiplication by `h_F` from degree `k`; `None` at the top degree.
    pub fn h_op(&self, k: usize, v: usize) -> Option<&Op> {
        self.hops.get(k).map(|ops| &ops[v])
    }

    pub fn unit<T: Coeff + One>(&self) -> Vec<T> {
        vec![T::one()]
    }

    fn apply_var<T: Coeff>(&self, alphabet: Alphabet, k: usize, v: usize, x: &[T]) -> Result<Vec<T>> {
        let op = match alphabet {
            Alphabet::Z | Alphabet::X => self.z_op(k, v),
            Alphabet::H => self.h_op(k, v),
        };
        match op {
            Some(op) => op.apply(x).ok_or(Error::Overflow),
            None => Ok(Vec::new()),
        }
    }

    /// z-coordinates of a product of h-variables given as a nested-style chain.
    fn h_chain_vector<T: Coeff + One>(&self, chain: &[(Mask, usize)]) -> Result<Vec<T>> {
        let flats: Vec<(Mask, u32)> = chain.iter().map(|&(f, a)| (f, a as u32)).collect();
        Ok(self.monomial_vector::<T>(Alphabet::H, &flats)?.1)
    }

    /// Degree and z-coordinates of a monomial; coordinates are empty above the top degree.
    pub fn monomial_vector<T: Coeff + One>(&self, alphabet: Alphabet, mono: &[(Mask, u32)]) -> Result<(usize, Vec<T>)> {
        let mut v: Vec<T> = self.unit();
        let mut k = 0;
        for &(f, e) in mono {
            let var = self.var(f)?;
            if alphabet == Alphabet::X && f == self.matroid.full() {
                return Err(Error::UnknownVariable(f));
            }
            for _ in 0..e {
                if k < self.d {
                    v = self.apply_var(alphabet, k, var, &v)?;
                } else {
                    v = Vec::new();
                }
                k += 1;
            }
        }
        if k > self.d {
            v = Vec::new();
        }
        Ok((k, v))
    }

    /// Rational z-coordinates of a homogeneous element.
    pub fn z_coordinates(&self, e: &ChowElement) -> Result<(usize, Vec<BigRational>)> {
        if e.is_zero() {
            return Ok((0, vec![BigRational::zero(); 1]));
        }
        let k = e.grade().ok_or(Error::InhomogeneousElement)?;
        let mut out = vec![BigRational::zero(); self.dim(k)];
        for (mono, c) in e.terms() {
            let (_, v) = self.monomial_vector::<BigInt>(e.alphabet(), mono)?;
            for (i, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    out[i] += c * BigRational::from_integer(x.clone());
                }
            }
        }
        Ok((k, out))
    }

    /// Solves for nested-basis coordinates of a degree-`k` vector in z-coordinates.
    pub fn nested_coordinates(&self, k: usize, z: &[BigRational]) -> Vec<BigRational> {
        let n = self.dim(k);
        let mut y: Vec<BigRational> = z.to_vec();
        y.resize(n, BigRational::zero());
        let mut c = vec![BigRational::zero(); n];
        let t = &self.tmat[k];
        for &j in &self.lex_desc[k] {
            if y[j].is_zero() {
                continue;
            }
            let diag = t.cols[j].iter().find(|&&(i, _)| i as usize == j).map(|&(_, d)| d).unwrap_or(1);
            let cj = &y[j] * BigRational::from_integer(diag.into());
            for &(i, v) in &t.cols[j] {
                y[i as usize] -= &cj * BigRational::from_integer(v.into());
            }
            c[j] = cj;
        }
        c
    }

    /// Representative supported on the nested basis, in the h-alphabet.
    pub fn normal_form(&self, e: &ChowElement) -> Result<ChowElement> {
        if e.is_zero() {
            return Ok(ChowElement::zero(Alphabet::H));
        }
        let (k, z) = self.z_coordinates(e)?;
        let mut out = ChowElement::zero(Alphabet::H);
        if k > self.d {
            return Ok(out);
        }
        let c = self.nested_coordinates(k, &z);
        for (j, x) in c.into_iter().enumerate() {
            let mono: Vec<(Mask, u32)> = self.nested.degrees[k][j].iter().map(|&(f, a)| (f, a as u32)).collect();
            out.add_term(mono, x);
        }
        Ok(out)
    }

    /// The degree map on `A^d`.
    pub fn degree(&self, e: &ChowElement) -> Result<BigRational> {
        if e.is_zero() {
            return Ok(BigRational::zero());
        }
        let (k, z) = self.z_coordinates(e)?;
        if k != self.d {
            return Err(Error::WrongGrade { expected: self.d, found: k });
        }
        Ok(&z[0] * BigRational::from_integer(self.top_value.into()))
    }

    /// Integer degree of a product of h-variables (repeats allowed).
    pub fn h_product_degree(&self, flats: &[Mask]) -> Result<i64> {
        self.monomial_degree(Alphabet::H, flats)
    }

    /// Integer degree of a product of variables in the given alphabet (repeats allowed).
    pub fn monomial_degree(&self, alphabet: Alphabet, flats: &[Mask]) -> Result<i64> {
        if flats.len() != self.d {
            return Err(Error::WrongArity { expected: self.d, found: flats.len() });
        }
        let mono: Vec<(Mask, u32)> = flats.iter().map(|&f| (f, 1)).collect();
        let (_, v) = self.monomial_vector::<i64>(alphabet, &mono)?;
        v[0].checked_mul(self.top_value).ok_or(Error::Overflow)
    }

    /// Variables of the degree-one standard monomials, in coordinate order.
    pub fn degree_one_vars(&self) -> Vec<usize> {
        self.std.get(1).map_or(Vec::new(), |v| v.iter().map(|m| m[0].0 as usize).collect())
    }

    /// Functional `x -> ∫ x * b` on degree `d - deg(b)` for an h-monomial `b`.
    pub fn h_functional<T: Coeff + One>(&self, flats: &[Mask]) -> Result<Vec<T>> {
        let mut w: Vec<T> = vec![T::zero(); 1];
        let mut top = T::zero();
        top.mul_add_i64(&T::one(), self.top_value).ok_or(Error::Overflow)?;
        w[0] = top;
        let mut k = self.d;
        for &f in flats.iter().rev() {
            if k == 0 {
                return Ok(Vec::new());
            }
            k -= 1;
            w = self.h_op(k, self.var(f)?).unwrap().pullback(&w).ok_or(Error::Overflow)?;
        }
        Ok(w)
    }

    /// Matrix of ∫ b_i b_j over nested monomials of degrees `k` and `d - k`.
    pub fn poincare_pairing(&self, k: usize) -> Result<Vec<Vec<i64>>> {
        if k > self.d {
            return Err(Error::WrongGrade { expected: self.d, found: k });
        }
        let left: Vec<Vec<i64>> =
            self.nested.degrees[k].iter().map(|c| self.h_chain_vector::<i64>(c)).collect::<Result<_>>()?;
        let mut m = vec![vec![0i64; self.nested.degrees[self.d - k].len()]; left.len()];
        for (j, chain) in self.nested.degrees[self.d - k].iter().enumerate() {
            let flats: Vec<Mask> = chain.iter().flat_map(|&(f, a)| std::iter::repeat_n(f, a)).collect();
            let w = self.h_functional::<i64>(&flats)?;
            for (i, v) in left.iter().enumerate() {
                let mut s = 0i64;
                for (x, y) in v.iter().zip(w.iter()) {
                    s = s.checked_add(x.checked_mul(*y).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                }
                m[i][j] = s;
            }
        }
        Ok(m)
    }

    /// `α = Σ_{F ∋ i} x_F` and `β = Σ_{F ∌ i} x_F` over proper nonempty flats.
    pub fn alpha_beta(&self, i: usize) -> Result<(ChowElement, ChowElement)> {
        if i >= self.matroid.size() {
            return Err(Error::ElementOutOfRange { element: i, size: self.matroid.size() });
        }
        let full = self.matroid.full();
        let mut a = ChowElement::zero(Alphabet::X);
        let mut b = ChowElement::zero(Alphabet::X);
        for &f in &self.masks {
            if f == full {
                continue;
            }
            let t = if f & (1 << i) != 0 { &mut a } else { &mut b };
            t.add_term(vec![(f, 1)], BigRational::one());
        }
        Ok((a, b))
    }

    /// Substitutes linear forms for the variables of `e`.
    pub fn convert(&self, e: &ChowElement, target: Alphabet) -> Result<ChowElement> {
        if e.alphabet() == target {
            return Ok(e.clone());
        }
        if e.alphabet() != Alphabet::Z && target != Alphabet::Z {
            let z = self.convert(e, Alphabet::Z)?;
            return self.convert(&z, target);
        }
        let full = self.matroid.full();
        let one = BigRational::one();
        let linear = |f: Mask| -> Result<ChowElement> {
            let id = self.var(f)? + 1;
            let mut out = ChowElement::zero(target);
            match (e.alphabet(), target) {
                (Alphabet::X, Alphabet::Z) => {
                    if f == full {
                        return Err(Error::UnknownVariable(f));
                    }
                    out.add_term(vec![(f, 1)], one.clone());
                }
                (Alphabet::Z, Alphabet::X) => {
                    if f == full {
                        // z_E = -α with α built on element 0
                        for &g in &self.masks {
                            if g != full && g & 1 != 0 {
                                out.add_term(vec![(g, 1)], -one.clone());
                            }
                        }
                    } else {
                        out.add_term(vec![(f, 1)], one.clone());
                    }
                }
                (Alphabet::H, Alphabet::Z) => {
                    for &g in &self.masks {
                        if is_subset(f, g) {
                            out.add_term(vec![(g, 1)], -one.clone());
                        }
                    }
                }
                (Alphabet::Z, Alphabet::H) => {
                    let row = self.lattice.moebius_row(id);
                    for (gi, &mu) in row.iter().enumerate() {
                        if mu != 0 && gi > 0 {
                            out.add_term(vec![(self.lattice.flat(gi), 1)], BigRational::from_integer((-mu).into()));
                        }
                    }
                }
                _ => unreachable!(),
            }
            Ok(out)
        };
        let mut cache: FxHashMap<Mask, ChowElement> = FxHashMap::default();
        let mut out = ChowElement::zero(target);
        for (mono, c) in e.terms() {
            let mut prod = ChowElement::monomial(target, &[], c.clone());
            for &(f, k) in mono {
                if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(f) {
                    e.insert(linear(f)?);
                }
                prod = prod.mul(&cache[&f].pow(k as usize));
            }
            out = out.add(&prod);
        }
        Ok(out)
    }

    /// μ^k as ∫ α^(d-k) β^k.
    pub fn mu_via_degrees(&self) -> Result<Vec<i64>> {
        let full = self.matroid.full();
        let (alpha_vars, beta_vars): (Vec<usize>, Vec<usize>) =
            (0..self.masks.len()).filter(|&v| self.masks[v] != full).partition(|&v| self.masks[v] & 1 != 0);
        let mut out = Vec::with_capacity(self.d + 1);
        for k in 0..=self.d {
            let mut v: Vec<i128> = self.unit();
            for step in 0..self.d {
                let vars = if step < self.d - k { &alpha_vars } else { &beta_vars };
                let mut next = vec![0i128; self.dim(step + 1)];
                for &var in vars {
                    let part = self.zops[step][var].apply(&v).ok_or(Error::Overflow)?;
                    for (a, b) in next.iter_mut().zip(part) {
                        *a = a.checked_add(b).ok_or(Error::Overflow)?;
                    }
                }
                v = next;
            }
            let val = v[0] * self.top_value as i128;
            out.push(val.to_i64().ok_or(Error::Overflow)?);
        }
        Ok(out)
    }

    /// Rank of multiplication by `x_F` from degree `k` to `k + 1`.
    pub fn multiplication_rank(&self, f: Mask, k: usize) -> Result<usize> {
        let v = self.var(f)?;
        match self.z_op(k, v) {
            Some(op) => Ok(crate::linalg::rank_i64(&op.to_dense())),
            None => Ok(0),
        }
    }

    /// All rank-≥2 flats, the variables of the volume polynomial, in lattice order.
    pub fn simplicial_flats(&self) -> Vec<Mask> {
        (0..self.masks.len()).filter(|&v| self.ranks[v] >= 2).map(|v| self.masks[v]).collect()
    }
}

/// A combinatorially ample class with its x- and h-presentations.
#[derive(Debug, Clone)]
pub struct AmpleClass {
    pub x: ChowElement,
    pub h: ChowElement,
}

/// `Σ c_F x_F` with `c_S = |S| |E \ S|` over proper nonempty flats.
pub fn sample_ample(ring: &ChowRing) -> Result<AmpleClass> {
    let m = ring.matroid();
    let n = m.size();
    let mut x = ChowElement::zero(Alphabet::X);
    for &f in ring.lattice().flats() {
        if f == 0 || f == m.full() {
            continue;
        }
        let c = (popcount(f) * (n - popcount(f))) as i64;
        x.add_term(vec![(f, 1)], BigRational::from_integer(c.into()));
    }
    let h = ring.normal_form(&x)?;
    Ok(AmpleClass { x, h })
}

/// `c_A + c_B - c_{A∪B} - c_{A∩B}` for the canonical strictly submodular function.
pub fn ample_submodularity_gap(n: usize, a: Mask, b: Mask) -> i64 {
    let c = |s: Mask| (popcount(s) * (n - popcount(s))) as i64;
    c(a) + c(b) - c(a | b) - c(a & b)
}

pub fn element_of_flats(alphabet: Alphabet, flats: &[Mask]) -> ChowElement {
    ChowElement::product(alphabet, flats)
}

/// Ground elements of a mask, as a helper for labels.
pub fn mask_elements(s: Mask) -> Vec<usize> {
    elements(s).collect()
}

pub fn to_big(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

pub fn is_positive(x: &BigRational) -> bool {
    x.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::signature_i64;
    use crate::matroid::GroundSet;
    use proptest::prelude::*;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    fn k4() -> Matroid {
        Matroid::graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Dense presentation of the z-alphabet ring: the degree-k ideal is spanned by relations
    /// times monomials, and ∫ is the functional vanishing on the top ideal, normalized on a flag.
    struct DenseOracle {
        flats: Vec<Mask>,
        monos: Vec<Vec<Vec<usize>>>,
        ideal_rank: Vec<usize>,
        functional: Vec<BigRational>,
    }

    fn multisets(nv: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        fn rec(nv: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for v in start..nv {
                cur.push(v);
                rec(nv, k, v, cur, out);
                cur.pop();
            }
        }
        rec(nv, k, 0, &mut Vec::new(), &mut out);
        out
    }

    const P: i128 = (1 << 61) - 1;

    fn inv_mod(a: i128) -> i128 {
        let (mut r, mut base, mut e) = (1i128, a.rem_euclid(P), P - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % P;
            }
            base = base * base % P;
            e >>= 1;
        }
        r
    }

    /// Row reduction modulo `P`; returns pivot columns and the reduced rows.
    fn reduce_mod(rows: &[Vec<i64>], ncols: usize) -> (Vec<usize>, Vec<Vec<i128>>) {
        let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| (x as i128).rem_euclid(P)).collect()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
            a.swap(r, p);
            let inv = inv_mod(a[r][c]);
            for x in a[r].iter_mut() {
                *x = *x * inv % P;
            }
            let prow = a[r].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != r && row[c] != 0 {
                    let f = row[c];
                    for j in 0..ncols {
                        row[j] = (row[j] - f * prow[j] % P).rem_euclid(P);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        (pivots, a)
    }

    fn lift(x: i128) -> BigRational {
        let x = x.rem_euclid(P);
        q((if x > P / 2 { x - P } else { x }) as i64)
    }

    impl DenseOracle {
        fn new(m: &Matroid) -> Self {
            let lat = FlatLattice::new(m);
            let flats: Vec<Mask> = lat.flats()[1..].to_vec();
            let nv = flats.len();
            let d = m.rank_total() - 1;
            let monos: Vec<Vec<Vec<usize>>> = (0..=d).map(|k| multisets(nv, k)).collect();
            let mut ideal_rank = Vec::new();
            let mut functional = Vec::new();
            for k in 0..=d {
                let index: BTreeMap<Vec<usize>, usize> =
                    monos[k].iter().enumerate().map(|(i, mo)| (mo.clone(), i)).collect();
                let mut rows = Vec::new();
                let push = |factors: &[usize], base: &[usize], coeffs: &[i64], rows: &mut Vec<Vec<i64>>| {
                    let mut row = vec![0i64; monos[k].len()];
                    for (&f, &c) in factors.iter().zip(coeffs) {
                        let mut mo = base.to_vec();
                        mo.push(f);
                        mo.sort_unstable();
                        row[index[&mo]] += c;
                    }
                    rows.push(row);
                };
                if k >= 1 {
                    for base in &monos[k - 1] {
                        for i in 0..m.size() {
                            let fs: Vec<usize> = (0..nv).filter(|&v| flats[v] & (1 << i) != 0).collect();
                            push(&fs, base, &vec![1; fs.len()], &mut rows);
                        }
                    }
                }
                if k >= 2 {
                    for base in &monos[k - 2] {
                        for a in 0..nv {
                            for b in (a + 1)..nv {
                                if !is_subset(flats[a], flats[b]) && !is_subset(flats[b], flats[a]) {
                                    let mut bb = base.clone();
                                    bb.push(a);
                                    push(&[b], &bb, &[1], &mut rows);
                                }
                            }
                        }
                    }
                }
                let ncols = monos[k].len();
                let (pivots, reduced) = reduce_mod(&rows, ncols);
                ideal_rank.push(pivots.len());
                if k == d {
                    // intersection numbers are integers, so symmetric residues recover them
                    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
                    assert_eq!(free.len(), 1, "top degree should be one-dimensional");
                    let mut raw = vec![0i128; ncols];
                    raw[free[0]] = 1;
                    for (i, &c) in pivots.iter().enumerate() {
                        raw[c] = (P - reduced[i][free[0]]) % P;
                    }
                    // normalize on a maximal flag of proper flats
                    let mut flag = Vec::new();
                    let mut cur = 0;
                    for _ in 0..d {
                        cur = lat.covers_up(cur)[0];
                        flag.push(cur - 1);
                    }
                    flag.sort_unstable();
                    let inv = inv_mod(raw[index[&flag]]);
                    functional = raw.iter().map(|&x| lift(x * inv % P)).collect();
                }
            }
            DenseOracle { flats, monos, ideal_rank, functional }
        }

        fn hilbert(&self) -> Vec<usize> {
            self.monos.iter().zip(&self.ideal_rank).map(|(v, r)| v.len() - r).collect()
        }

        fn integral_z(&self, mono: &[usize]) -> BigRational {
            let d = self.monos.len() - 1;
            let i = self.monos[d].iter().position(|mo| mo.as_slice() == mono).unwrap();
            self.functional[i].clone()
        }
    }

    fn oracle_matroids() -> Vec<Matroid> {
        vec![
            Matroid::uniform(2, 3).unwrap(),
            Matroid::uniform(3, 3).unwrap(),
            Matroid::uniform(3, 4).unwrap(),
            Matroid::uniform(4, 4).unwrap(),
            Matroid::uniform(2, 5).unwrap(),
            k4(),
            Matroid::uniform(2, 3).unwrap().direct_sum(&Matroid::uniform(1, 2).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn hilbert_function_matches_dense_quotient() {
        for m in oracle_matroids() {
            let oracle = DenseOracle::new(&m);
            assert_eq!(hilbert_function(&m).unwrap(), oracle.hilbert(), "{m:?}");
        }
    }

    #[test]
    fn top_degrees_match_dense_quotient() {
        for m in oracle_matroids() {
            let oracle = DenseOracle::new(&m);
            let ring = ChowRing::new(&m).unwrap();
            let d = ring.top_degree();
            for mono in &oracle.monos[d] {
                let flats: Vec<Mask> = mono.iter().map(|&v| oracle.flats[v]).collect();
                let e = ChowElement::product(Alphabet::Z, &flats);
                assert_eq!(ring.degree(&e).unwrap(), oracle.integral_z(mono), "{m:?} {flats:?}");
            }
        }
    }

    #[test]
    fn maximal_flag_reduces_to_unit() {
        for m in oracle_matroids() {
            let ring = ChowRing::new(&m).unwrap();
            let d = ring.top_degree() as i64;
            assert_eq!(ring.top_value(), if d % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn nested_basis_examples() {
        let u34 = Matroid::uniform(3, 4).unwrap();
        assert_eq!(hilbert_function(&u34).unwrap(), vec![1, 7, 1]);
        let nb = nested_basis(&u34).unwrap();
        assert_eq!(nb.degrees[2], vec![vec![(0b1111, 2)]]);
        assert_eq!(hilbert_function(&Matroid::uniform(2, 3).unwrap()).unwrap(), vec![1, 1]);
        assert_eq!(hilbert_function(&Matroid::uniform(1, 3).unwrap()).unwrap(), vec![1]);
        let loopy = Matroid::from_bases(GroundSet::new(2).unwrap(), &[0b01]).unwrap();
        assert_eq!(nested_basis(&loopy).unwrap_err(), Error::LoopyMatroid);
    }

    #[test]
    fn degree_examples() {
        let u33 = Matroid::uniform(3, 3).unwrap();
        let ring = ChowRing::new(&u33).unwrap();
        assert_eq!(ring.degree(&ChowElement::product(Alphabet::H, &[0b111, 0b111])).unwrap(), q(1));
        assert_eq!(ring.degree(&ChowElement::product(Alphabet::X, &[0b001, 0b011])).unwrap(), q(1));
        assert_eq!(ring.degree(&ChowElement::product(Alphabet::X, &[0b001, 0b110])).unwrap(), q(0));
        let e = ChowElement::variable(Alphabet::H, 0b111);
        assert_eq!(ring.degree(&e).unwrap_err(), Error::WrongGrade { expected: 2, found: 1 });
        // ∫ h_F h_F' is 1 for distinct rank-2 flats or pairs with E, and 0 for F = F'
        for a in [0b011, 0b101, 0b110, 0b111] {
            for b in [0b011, 0b101, 0b110, 0b111] {
                let v = ring.h_product_degree(&[a, b]).unwrap();
                assert_eq!(v, i64::from(a != b || a == 0b111));
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let ring = ChowRing::new(&Matroid::uniform(3, 3).unwrap()).unwrap();
        assert_eq!(ring.poincare_pairing(0).unwrap(), vec![vec![1]]);
        let p = ring.poincare_pairing(1).unwrap();
        let flats: Vec<Mask> = ring.nested().degrees[1].iter().map(|c| c[0].0).collect();
        for (i, &a) in flats.iter().enumerate() {
            for (j, &b) in flats.iter().enumerate() {
                assert_eq!(p[i][j], i64::from(a != b || a == 0b111));
            }
        }
        assert_eq!(signature_i64(&p), (1, 3, 0));
        for m in oracle_matroids() {
            let ring = ChowRing::new(&m).unwrap();
            for k in 0..=ring.top_degree() {
                let p = ring.poincare_pairing(k).unwrap();
                assert_eq!(p.len(), p[0].len());
                assert_eq!(crate::linalg::rank_i64(&p), p.len());
            }
        }
    }

    #[test]
    fn conversion_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        let ring = ChowRing::new(&u23).unwrap();
        let (alpha, beta) = ring.alpha_beta(0).unwrap();
        assert_eq!(ring.degree(&alpha).unwrap(), q(1));
        assert_eq!(ring.degree(&beta).unwrap(), q(2));
        let alpha_h = ring.normal_form(&alpha).unwrap();
        assert_eq!(alpha_h, ChowElement::variable(Alphabet::H, 0b111));
        // z_E = -α
        let ze = ChowElement::variable(Alphabet::Z, 0b111);
        assert_eq!(ring.normal_form(&ze).unwrap(), alpha_h.scale(&q(-1)));

        for m in oracle_matroids() {
            let ring = ChowRing::new(&m).unwrap();
            let (a0, _) = ring.alpha_beta(0).unwrap();
            let (a1, _) = ring.alpha_beta(1).unwrap();
            assert_eq!(ring.normal_form(&a0).unwrap(), ring.normal_form(&a1).unwrap());
            for &f in ring.lattice().flats().iter().skip(1) {
                let h = ChowElement::variable(Alphabet::H, f);
                let z = ring.convert(&h, Alphabet::Z).unwrap();
                assert_eq!(ring.convert(&z, Alphabet::H).unwrap(), h);
                if popcount(f) > 0 && m.rank(f) == 1 {
                    assert!(ring.normal_form(&h).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn incomparable_product_vanishes() {
        let ring = ChowRing::new(&Matroid::uniform(3, 4).unwrap()).unwrap();
        let e = ChowElement::product(Alphabet::X, &[0b0011, 0b1100]);
        assert!(ring.normal_form(&e).unwrap().is_zero());
        let x = ChowElement::variable(Alphabet::X, 0b1111);
        assert_eq!(ring.normal_form(&x).unwrap_err(), Error::UnknownVariable(0b1111));
        let mixed = ChowElement::variable(Alphabet::H, 0b0011).add(&ChowElement::one(Alphabet::H));
        assert_eq!(ring.normal_form(&mixed).unwrap_err(), Error::InhomogeneousElement);
    }

    #[test]
    fn ample_examples() {
        let ring = ChowRing::new(&Matroid::uniform(2, 3).unwrap()).unwrap();
        let l = sample_ample(&ring).unwrap();
        let mut expected = ChowElement::zero(Alphabet::X);
        for f in [0b001, 0b010, 0b100] {
            expected.add_term(vec![(f, 1)], q(2));
        }
        assert_eq!(l.x, expected);
        assert_eq!(ring.degree(&l.x).unwrap(), q(6));
        assert_eq!(ring.degree(&l.h).unwrap(), q(6));
        for n in 1..=6 {
            let full = (1 << n) - 1;
            for a in 0..=full {
                for b in 0..=full {
                    let gap = ample_submodularity_gap(n, a, b);
                    assert_eq!(gap, 2 * (popcount(a & !b) * popcount(b & !a)) as i64);
                }
            }
            assert_eq!(ample_submodularity_gap(n, 0, full), 0);
        }
    }

    #[test]
    fn mu_from_degrees() {
        let ring = ChowRing::new(&Matroid::uniform(3, 4).unwrap()).unwrap();
        assert_eq!(ring.mu_via_degrees().unwrap(), vec![1, 3, 3]);
        let ring = ChowRing::new(&Matroid::uniform(2, 3).unwrap()).unwrap();
        assert_eq!(ring.mu_via_degrees().unwrap(), vec![1, 2]);
    }

    #[test]
    fn flat_order_puts_low_rank_last() {
        let ring = ChowRing::new(&Matroid::uniform(3, 4).unwrap()).unwrap();
        let o = ring.flat_order();
        assert_eq!(o.flats[0], 0b1111);
        assert_eq!(o.flats[1], 0b0011);
        assert_eq!(*o.flats.last().unwrap(), 0b1000);
        assert_eq!(o.compare(&[(0b0001, 1)], &[(0b0011, 2)]), Ordering::Greater);
    }

    fn random_h_element(ring: &ChowRing, k: usize, picks: &[(usize, usize, i64)]) -> ChowElement {
        let vars = ring.num_vars();
        let mut e = ChowElement::zero(Alphabet::H);
        for &(a, b, c) in picks {
            let mut mono = vec![(ring.var_mask(a % vars), 1u32)];
            if k == 2 {
                mono.push((ring.var_mask(b % vars), 1));
            }
            e.add_term(canonical(&mono), q(c));
        }
        e
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn normal_form_is_a_ring_section(
            which in 0usize..3,
            pa in proptest::collection::vec((0usize..64, 0usize..64, -3i64..=3), 1..4),
            pb in proptest::collection::vec((0usize..64, 0usize..64, -3i64..=3), 1..4),
        ) {
            let m = [Matroid::uniform(4, 4).unwrap(), k4(), Matroid::uniform(4, 5).unwrap()][which].clone();
            let ring = ChowRing::new(&m).unwrap();
            let a = random_h_element(&ring, 1, &pa);
            let b = random_h_element(&ring, 2, &pb);
            let na = ring.normal_form(&a).unwrap();
            let nb = ring.normal_form(&b).unwrap();
            prop_assert_eq!(ring.normal_form(&na).unwrap(), na.clone());
            prop_assert_eq!(ring.normal_form(&a.mul(&b)).unwrap(), ring.normal_form(&na.mul(&nb)).unwrap());
            let z = ring.convert(&a.mul(&b), Alphabet::Z).unwrap();
            prop_assert_eq!(ring.normal_form(&z).unwrap(), ring.normal_form(&a.mul(&b)).unwrap());
        }
    }
}
