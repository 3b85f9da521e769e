//! Intersection numbers of simplicial generators, volume polynomials and checks of the
//! Kähler package in degrees zero and one.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::chow::{Alphabet, ChowElement, ChowRing, Coeff};
use crate::error::{Error, Result};
use crate::lattice::FlatLattice;
use crate::linalg::{signature, signature_i64, Signature};
use crate::matroid::{elements, fmt_mask, is_subset, popcount, Mask, Matroid};
use crate::quotient::truncate_table;

/// Checks `rk(∪_{j∈J} A_j) ≥ |J| + 1` for every nonempty `J`.
pub fn dhr_check(m: &Matroid, sets: &[Mask]) -> Result<bool> {
    for &s in sets {
        if s == 0 {
            return Err(Error::EmptySetMember);
        }
        m.check_subset(s)?;
    }
    if sets.len() > 24 {
        return Err(Error::Unsupported("more than 24 sets".into()));
    }
    let k = sets.len();
    let mut unions = vec![0 as Mask; 1 << k];
    for j in 1usize..(1 << k) {
        let low = j.trailing_zeros() as usize;
        unions[j] = unions[j & (j - 1)] | sets[low];
        if m.rank(unions[j]) < j.count_ones() as usize + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `∫ h_{A_1} ... h_{A_d}` by the dragon Hall-Rado criterion.
pub fn dhr_degree(m: &Matroid, flats: &[Mask]) -> Result<u8> {
    let d = m.rank_total().saturating_sub(1);
    if flats.len() != d {
        return Err(Error::WrongArity { expected: d, found: flats.len() });
    }
    Ok(u8::from(dhr_check(m, flats)?))
}

fn is_rank_one_loopless(table: &[u8], n: usize) -> bool {
    table[table.len() - 1] == 1 && (0..n).all(|e| table[1 << e] == 1)
}

/// Whether `M ∧ H_{A_1} ∧ ... ∧ H_{A_k}` is the rank-one loopless matroid.
pub fn truncation_route(m: &Matroid, sets: &[Mask]) -> Result<bool> {
    let mut table = m.rank_table().to_vec();
    for &s in sets {
        if s == 0 {
            return Err(Error::EmptySetMember);
        }
        m.check_subset(s)?;
        table = truncate_table(&table, s);
    }
    Ok(is_rank_one_loopless(&table, m.size()))
}

/// Rank-≥2 flats in lattice order.
pub fn simplicial_flats(m: &Matroid) -> Vec<Mask> {
    let lat = FlatLattice::new(m);
    lat.flats().iter().copied().filter(|&f| m.rank(f) >= 2).collect()
}

const SLOT_BITS: u32 = 16;
const MAX_SLOTS: usize = 8;

/// Packs a sorted multiset of variable indices.
fn pack(idx: &[usize]) -> u128 {
    idx.iter().enumerate().fold(0u128, |acc, (i, &v)| acc | ((v as u128 + 1) << (SLOT_BITS * i as u32)))
}

fn unpack(mut key: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(MAX_SLOTS);
    while key != 0 {
        out.push((key & 0xffff) as usize - 1);
        key >>= SLOT_BITS;
    }
    out
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// `VP(t) = ∫ (Σ t_F h_F)^d` stored as its support: degree-d multisets of rank-≥2 flats
/// satisfying the dragon Hall-Rado condition, each with its multinomial coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumePolynomial {
    n: usize,
    d: usize,
    vars: Vec<Mask>,
    support: Vec<u128>,
}

impl VolumePolynomial {
    pub fn vars(&self) -> &[Mask] {
        &self.vars
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn var_index(&self, f: Mask) -> Option<usize> {
        self.vars.iter().position(|&v| v == f)
    }

    /// Support points as sorted variable-index multisets, in canonical order.
    pub fn support(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.support.iter().map(|&k| unpack(k))
    }

    pub fn contains(&self, multiset: &[usize]) -> bool {
        let mut s = multiset.to_vec();
        s.sort_unstable();
        s.len() == self.d && self.support.binary_search(&pack(&s)).is_ok()
    }

    /// Coefficient of `t^α` for a multiset `α`.
    pub fn coefficient(&self, multiset: &[usize]) -> u128 {
        if !self.contains(multiset) {
            return 0;
        }
        multinomial(multiset)
    }

    /// `(multiset of flats with exponents, coefficient)` for each term.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<(Mask, usize)>, u128)> + '_ {
        self.support().map(move |ms| {
            let coeff = multinomial(&ms);
            let mut grouped: Vec<(Mask, usize)> = Vec::new();
            for v in ms {
                match grouped.last_mut() {
                    Some((f, e)) if *f == self.vars[v] => *e += 1,
                    _ => grouped.push((self.vars[v], 1)),
                }
            }
            (grouped, coeff)
        })
    }

    /// Sum of all coefficients, the number of ordered dragon Hall-Rado tuples.
    pub fn coefficient_sum(&self) -> u128 {
        self.support().map(|ms| multinomial(&ms)).sum()
    }

    /// Copy with one support point removed.
    pub fn without(&self, multiset: &[usize]) -> Self {
        let mut s = multiset.to_vec();
        s.sort_unstable();
        let key = pack(&s);
        let mut out = self.clone();
        out.support.retain(|&k| k != key);
        out
    }

    /// Coefficients of `t_e^(d-k) t_f^k` for `k = 0..=d`, with `e != f`.
    pub fn bivariate(&self, e: usize, f: usize) -> Vec<u128> {
        (0..=self.d)
            .map(|k| {
                let mut ms = vec![e; self.d - k];
                ms.extend(std::iter::repeat_n(f, k));
                self.coefficient(&ms)
            })
            .collect()
    }
}

fn multinomial(sorted: &[usize]) -> u128 {
    let mut denom = 1u128;
    let mut run = 0usize;
    for i in 0..sorted.len() {
        run = if i > 0 && sorted[i] == sorted[i - 1] { run + 1 } else { 1 };
        denom *= run as u128;
    }
    factorial(sorted.len()) / denom
}

/// Enumerates the support by depth-first search with incremental rank checks.
pub fn volume_polynomial(m: &Matroid) -> Result<VolumePolynomial> {
    if !m.is_loopless() {
        return Err(Error::LoopyMatroid);
    }
    let d = m.rank_total().saturating_sub(1);
    let vars = simplicial_flats(m);
    if d > MAX_SLOTS || vars.len() >= 0xffff {
        return Err(Error::Unsupported(format!("volume polynomial of degree {d} with {} variables", vars.len())));
    }
    let ranks = m.rank_table();
    let mut support = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(d);
    let mut unions: Vec<Mask> = vec![0];
    fn rec(
        vars: &[Mask],
        ranks: &[u8],
        d: usize,
        start: usize,
        stack: &mut Vec<usize>,
        unions: &mut Vec<Mask>,
        out: &mut Vec<u128>,
    ) {
        if stack.len() == d {
            out.push(pack(stack));
            return;
        }
        let k = stack.len();
        for v in start..vars.len() {
            let a = vars[v];
            let ok = (0..unions.len()).all(|s| ranks[(unions[s] | a) as usize] as usize >= s.count_ones() as usize + 2);
            if !ok {
                continue;
            }
            for s in 0..(1usize << k) {
                let u = unions[s] | a;
                unions.push(u);
            }
            stack.push(v);
            rec(vars, ranks, d, v, stack, unions, out);
            stack.pop();
            unions.truncate(1 << k);
        }
    }
    rec(&vars, ranks, d, 0, &mut stack, &mut unions, &mut support);
    support.sort_unstable();
    Ok(VolumePolynomial { n: m.size(), d, vars, support })
}

/// Exchange axiom for the support, decided through exchange sets and the down-closure.
///
/// For `α` in the support and a variable `G`, let `X` be the flats `F` of `α` with
/// `α + e_G - e_F` in the support. The axiom fails at `(α, G)` exactly when some support
/// point dominates `α|_X + e_G`, i.e. when that multiset lies in the down-closure.
pub fn mconvex_support(vp: &VolumePolynomial) -> bool {
    let d = vp.d;
    let nv = vp.vars.len();
    if vp.support.is_empty() || d == 0 {
        return true;
    }
    let words = nv.div_ceil(64);
    // exchange sets of (d-1)-multisets
    let mut ext_index: FxHashMap<u128, usize> = FxHashMap::default();
    let mut ext_bits: Vec<u64> = Vec::new();
    let mut down: FxHashSet<u128> = FxHashSet::default();
    let mut level: Vec<u128> = vp.support.clone();
    for &alpha in &vp.support {
        let a = unpack(alpha);
        for i in 0..a.len() {
            if i > 0 && a[i] == a[i - 1] {
                continue;
            }
            let mut g = a.clone();
            let v = g.remove(i);
            let key = pack(&g);
            let next = ext_index.len();
            let idx = *ext_index.entry(key).or_insert(next);
            if idx == next {
                ext_bits.extend(std::iter::repeat_n(0, words));
            }
            ext_bits[idx * words + v / 64] |= 1 << (v % 64);
        }
    }
    for _ in 0..d {
        let mut next: FxHashSet<u128> = FxHashSet::default();
        for &k in &level {
            let a = unpack(k);
            for i in 0..a.len() {
                if i > 0 && a[i] == a[i - 1] {
                    continue;
                }
                let mut g = a.clone();
                g.remove(i);
                next.insert(pack(&g));
            }
        }
        down.extend(next.iter().copied());
        level = next.into_iter().collect();
    }
    let support: FxHashSet<u128> = vp.support.iter().copied().collect();
    down.extend(support.iter().copied());

    for &alpha in &vp.support {
        let a = unpack(alpha);
        let mut distinct: Vec<(usize, usize, usize)> = Vec::new(); // (var, multiplicity, ext row)
        for i in 0..a.len() {
            if i > 0 && a[i] == a[i - 1] {
                distinct.last_mut().unwrap().1 += 1;
                continue;
            }
            let mut g = a.clone();
            g.remove(i);
            distinct.push((a[i], 1, ext_index[&pack(&g)]));
        }
        for gv in 0..nv {
            let exch = |row: usize| ext_bits[row * words + gv / 64] & (1 << (gv % 64)) != 0;
            if distinct.iter().all(|&(f, _, row)| f == gv || exch(row)) {
                continue;
            }
            let mut r: Vec<usize> = Vec::with_capacity(d);
            for &(f, mult, row) in &distinct {
                if f == gv {
                    continue;
                }
                if exch(row) {
                    r.extend(std::iter::repeat_n(f, mult));
                }
            }
            let mult_g = distinct.iter().find(|x| x.0 == gv).map_or(0, |x| x.1);
            r.extend(std::iter::repeat_n(gv, mult_g + 1));
            if r.len() > d {
                continue;
            }
            r.sort_unstable();
            if down.contains(&pack(&r)) {
                return false;
            }
        }
    }
    true
}

/// Exchange axiom checked over all ordered pairs of support points.
pub fn mconvex_pairwise(vp: &VolumePolynomial) -> bool {
    let nv = vp.vars.len();
    let pts: Vec<Vec<usize>> = vp.support().map(|ms| counts(&ms, nv)).collect();
    let support: FxHashSet<u128> = vp.support.iter().copied().collect();
    let key_of = |c: &[usize]| -> u128 {
        let ms: Vec<usize> = c.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v, k)).collect();
        pack(&ms)
    };
    for a in &pts {
        for b in &pts {
            for g in 0..nv {
                if b[g] <= a[g] {
                    continue;
                }
                let ok = (0..nv).any(|f| {
                    if a[f] <= b[f] {
                        return false;
                    }
                    let mut c = a.clone();
                    c[f] -= 1;
                    c[g] += 1;
                    support.contains(&key_of(&c))
                });
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

fn counts(ms: &[usize], nv: usize) -> Vec<usize> {
    let mut c = vec![0; nv];
    for &v in ms {
        c[v] += 1;
    }
    c
}

/// Hessian of a `(d-2)`-nd derivative of the volume polynomial, in the variables
/// `{E} ∪ {rank-2 flats}` of the rank-3 truncation `M ∧ H_{F_1} ∧ ... ∧ H_{F_(d-2)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HessianReport {
    pub beta: Vec<Mask>,
    pub truncation: Matroid,
    pub labels: Vec<Mask>,
    pub matrix: Vec<Vec<i64>>,
    pub signature: Signature,
}

impl HessianReport {
    pub fn is_lorentzian(&self) -> bool {
        self.signature == (1, self.labels.len() - 1, 0)
    }
}

/// `None` when `beta` fails the dragon Hall-Rado condition, so the derivative vanishes.
pub fn truncated_hessian(m: &Matroid, beta: &[Mask]) -> Result<Option<HessianReport>> {
    let d = m.rank_total().saturating_sub(1);
    if d < 2 || beta.len() != d - 2 {
        return Err(Error::WrongArity { expected: d.saturating_sub(2), found: beta.len() });
    }
    if !dhr_check(m, beta)? {
        return Ok(None);
    }
    let mut table = m.rank_table().to_vec();
    for &s in beta {
        table = truncate_table(&table, s);
    }
    let mp = Matroid::from_rank_table(m.size(), table);
    if mp.rank_total() != 3 || !mp.is_loopless() {
        return Err(Error::Unsupported("truncation is not a loopless rank-3 matroid".into()));
    }
    let labels = simplicial_flats(&mp);
    let mut matrix = vec![vec![0i64; labels.len()]; labels.len()];
    for (i, &a) in labels.iter().enumerate() {
        for (j, &b) in labels.iter().enumerate() {
            matrix[i][j] = 2 * i64::from(dhr_check(&mp, &[a, b])?);
        }
    }
    let signature = signature_i64(&matrix);
    Ok(Some(HessianReport { beta: beta.to_vec(), truncation: mp, labels, matrix, signature }))
}

/// Hessian of `∂^β VP` in the original variables by differentiating the stored terms.
pub fn symbolic_hessian(vp: &VolumePolynomial, beta: &[usize]) -> Vec<Vec<u128>> {
    let nv = vp.vars.len();
    let mut h = vec![vec![0u128; nv]; nv];
    for g in 0..nv {
        for gp in 0..nv {
            let mut ms = beta.to_vec();
            ms.push(g);
            ms.push(gp);
            ms.sort_unstable();
            let c = counts(&ms, nv);
            let falling: u128 = c.iter().map(|&k| factorial(k)).product();
            h[g][gp] = vp.coefficient(&ms) * falling;
        }
    }
    h
}

/// The truncated Hessian pulled back along `t_F -> h_{cl(F)}`, scaled by `d!/2`.
pub fn pulled_back_hessian(vp: &VolumePolynomial, report: &HessianReport) -> Vec<Vec<u128>> {
    let d = vp.d;
    let scale = factorial(d) / 2;
    let mp = &report.truncation;
    let pos: Vec<Option<usize>> = vp
        .vars
        .iter()
        .map(|&f| {
            let c = mp.closure(f);
            report.labels.iter().position(|&l| l == c)
        })
        .collect();
    let nv = vp.vars.len();
    let mut h = vec![vec![0u128; nv]; nv];
    for i in 0..nv {
        for j in 0..nv {
            if let (Some(a), Some(b)) = (pos[i], pos[j]) {
                h[i][j] = scale * report.matrix[a][b] as u128;
            }
        }
    }
    h
}

#[derive(Debug, Clone, Default)]
pub struct LorentzianReport {
    pub mconvex: bool,
    pub hessians: usize,
    pub failures: Vec<Vec<Mask>>,
}

impl LorentzianReport {
    pub fn passed(&self) -> bool {
        self.mconvex && self.failures.is_empty()
    }
}

/// M-convex support plus the signature of every nonvanishing derivative quadratic.
pub fn lorentzian_check(m: &Matroid, vp: &VolumePolynomial) -> Result<LorentzianReport> {
    let mut report = LorentzianReport { mconvex: mconvex_support(vp), ..Default::default() };
    let d = vp.d;
    if d < 2 {
        return Ok(report);
    }
    for beta in multisets(vp.vars.len(), d - 2) {
        let flats: Vec<Mask> = beta.iter().map(|&v| vp.vars[v]).collect();
        if let Some(h) = truncated_hessian(m, &flats)? {
            report.hessians += 1;
            if !h.is_lorentzian() {
                report.failures.push(flats);
            }
        }
    }
    Ok(report)
}

/// All sorted multisets of size `k` from `0..nv`.
pub fn multisets(nv: usize, k: usize) -> Vec<Vec<usize>> {
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

/// Ultra-log-concavity with no internal zeros of a coefficient sequence of degree `len - 1`.
pub fn ultra_log_concave(c: &[u128]) -> bool {
    let d = c.len().saturating_sub(1);
    let binom = |k: usize| -> u128 { (0..k).fold(1u128, |acc, i| acc * (d - i) as u128 / (i as u128 + 1)) };
    let ulc = (1..d).all(|k| {
        let lhs = BigInt::from(c[k]).pow(2) * BigInt::from(binom(k - 1)) * BigInt::from(binom(k + 1));
        let rhs = BigInt::from(c[k - 1]) * BigInt::from(c[k + 1]) * BigInt::from(binom(k)).pow(2);
        lhs >= rhs
    });
    ulc && no_internal_zeros(c)
}

pub fn no_internal_zeros<T: Zero>(c: &[T]) -> bool {
    let nz: Vec<usize> = (0..c.len()).filter(|&i| !c[i].is_zero()).collect();
    nz.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Reduced characteristic polynomial, coefficients of `t^d, t^(d-1), ..., 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    pub coefficients: Vec<i64>,
    pub mu: Vec<i64>,
}

pub fn char_poly(m: &Matroid) -> Result<CharPoly> {
    if !m.is_loopless() {
        return Err(Error::LoopyMatroid);
    }
    let r = m.rank_total();
    if r == 0 {
        return Err(Error::InvalidRank { r, n: m.size() });
    }
    let lat = FlatLattice::new(m);
    let row = lat.moebius_row(lat.bottom());
    // chi[i] is the coefficient of t^(r - i)
    let mut chi = vec![0i64; r + 1];
    for f in 0..lat.len() {
        chi[lat.rank_of(f)] += row[f];
    }
    // divide by (t - 1)
    let mut q = vec![0i64; r];
    let mut carry = 0i64;
    for i in 0..r {
        carry += chi[i];
        q[i] = carry;
    }
    if carry + chi[r] != 0 {
        return Err(Error::NonexactDivision);
    }
    let mu = q.iter().map(|c| c.abs()).collect();
    Ok(CharPoly { coefficients: q, mu })
}

pub fn mu_via_degrees(ring: &ChowRing) -> Result<Vec<i64>> {
    ring.mu_via_degrees()
}

/// `μ^(k-1) μ^(k+1) ≤ (μ^k)^2` at every interior index.
pub fn log_concave(mu: &[i64]) -> bool {
    (1..mu.len().saturating_sub(1)).all(|k| (mu[k - 1] as i128) * (mu[k + 1] as i128) <= (mu[k] as i128).pow(2))
}

/// Gram matrix of `Q^i_ℓ(x, y) = ∫ x y ℓ^(d-2i)` with its exact signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricFormReport {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<BigRational>>,
    pub signature: Signature,
}

/// Degree-one element as integer coefficients on degree-one variables, and the cleared denominator.
fn linear_coefficients(ring: &ChowRing, ell: &ChowElement) -> Result<(Vec<(usize, i64)>, BigInt)> {
    if ell.is_zero() {
        return Ok((Vec::new(), BigInt::one()));
    }
    if ell.grade() != Some(1) {
        return Err(Error::NotDegreeOne);
    }
    let (_, z) = ring.z_coordinates(ell)?;
    let l = z.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let vars = ring.degree_one_vars();
    let mut out = Vec::new();
    for (i, x) in z.iter().enumerate() {
        let c = x.numer() * (&l / x.denom());
        if !c.is_zero() {
            out.push((vars[i], c.to_i64().ok_or(Error::Overflow)?));
        }
    }
    Ok((out, l))
}

/// Functional `x -> ∫ x ℓ^times` on degree `d - times`.
fn power_functional<T: Coeff + One>(ring: &ChowRing, lin: &[(usize, i64)], times: usize) -> Option<Vec<T>> {
    let d = ring.top_degree();
    let mut w = vec![T::zero()];
    w[0].mul_add_i64(&T::one(), ring.top_value())?;
    for step in 0..times {
        let k = d - 1 - step;
        let mut next = vec![T::zero(); ring.dim(k)];
        for &(v, c) in lin {
            let y = ring.z_op(k, v)?.pullback(&w)?;
            for (o, t) in next.iter_mut().zip(y.iter()) {
                o.mul_add_i64(t, c)?;
            }
        }
        w = next;
    }
    Some(w)
}

/// Gram matrix `∫ b_i b_j ℓ^(d-2)` for degree-one z-coordinate vectors `b`.
fn gram<T: Coeff + One + Into<BigInt>>(ring: &ChowRing, lin: &[(usize, i64)], basis: &[Vec<i64>]) -> Option<Vec<Vec<BigInt>>> {
    let d = ring.top_degree();
    let w: Vec<T> = power_functional(ring, lin, d - 2)?;
    let vars = ring.degree_one_vars();
    // u[v] = w ∘ Z_v on degree one
    let u: Vec<Vec<T>> = vars.iter().map(|&v| ring.z_op(1, v).unwrap().pullback(&w)).collect::<Option<_>>()?;
    let mut out = vec![vec![BigInt::zero(); basis.len()]; basis.len()];
    for (i, bi) in basis.iter().enumerate() {
        // functional y -> ∫ b_i y ℓ^(d-2) in degree-one coordinates
        let mut f = vec![T::zero(); vars.len()];
        for (p, uv) in u.iter().enumerate() {
            let mut s = T::zero();
            for (q, &b) in bi.iter().enumerate() {
                if b != 0 {
                    s.mul_add_i64(&uv[q], b)?;
                }
            }
            f[p] = s;
        }
        for (j, bj) in basis.iter().enumerate() {
            let mut s = T::zero();
            for (p, &b) in bj.iter().enumerate() {
                if b != 0 {
                    s.mul_add_i64(&f[p], b)?;
                }
            }
            out[i][j] = s.into();
        }
    }
    Some(out)
}

fn big_matrix(m: Vec<Vec<BigInt>>, scale: &BigRational) -> Vec<Vec<BigRational>> {
    m.into_iter().map(|r| r.into_iter().map(|x| BigRational::from_integer(x) * scale).collect()).collect()
}

fn nested_label(chain: &[(Mask, usize)]) -> String {
    if chain.is_empty() {
        return "1".into();
    }
    chain
        .iter()
        .map(|&(f, a)| if a == 1 { format!("h{}", fmt_mask(f)) } else { format!("h{}^{a}", fmt_mask(f)) })
        .collect::<Vec<_>>()
        .join("*")
}

/// `Q^i_ℓ` on the nested basis of degree `i` for `i` in `{0, 1}`.
pub fn hr_form(ring: &ChowRing, ell: &ChowElement, i: usize) -> Result<SymmetricFormReport> {
    let d = ring.top_degree();
    if i > 1 || 2 * i > d {
        return Err(Error::WrongGrade { expected: d / 2, found: i });
    }
    if !ell.is_zero() && ell.grade() != Some(1) {
        return Err(Error::WrongGrade { expected: 1, found: ell.grade().unwrap_or(0) });
    }
    let (lin, l) = linear_coefficients(ring, ell)?;
    if i == 0 {
        let top = power_functional::<i128>(ring, &lin, d)
            .map(|w| BigInt::from(w[0]))
            .or_else(|| power_functional::<BigInt>(ring, &lin, d).map(|w| w[0].clone()))
            .ok_or(Error::Overflow)?;
        let v = BigRational::new(top, l.pow(d as u32));
        let sig = signature(&[vec![v.clone()]]);
        return Ok(SymmetricFormReport { labels: vec!["1".into()], matrix: vec![vec![v]], signature: sig });
    }
    let chains = &ring.nested().degrees[1];
    let basis: Vec<Vec<i64>> = chains
        .iter()
        .map(|c| ring.monomial_vector::<i64>(Alphabet::H, &[(c[0].0, 1)]).map(|x| x.1))
        .collect::<Result<_>>()?;
    let labels = chains.iter().map(|c| nested_label(c)).collect();
    let (matrix, signature) = gram_report(ring, &lin, &l, &basis)?;
    Ok(SymmetricFormReport { labels, matrix, signature })
}

fn gram_report(
    ring: &ChowRing,
    lin: &[(usize, i64)],
    l: &BigInt,
    basis: &[Vec<i64>],
) -> Result<(Vec<Vec<BigRational>>, Signature)> {
    let d = ring.top_degree();
    let g = gram::<i128>(ring, lin, basis).or_else(|| gram::<BigInt>(ring, lin, basis)).ok_or(Error::Overflow)?;
    let scale = BigRational::new(BigInt::one(), l.pow((d - 2) as u32));
    let matrix = big_matrix(g, &scale);
    let sig = signature(&matrix);
    Ok((matrix, sig))
}

/// `Q^1_ℓ` on an arbitrary list of degree-one elements.
pub fn hr_form_in_basis(ring: &ChowRing, ell: &ChowElement, basis: &[ChowElement]) -> Result<SymmetricFormReport> {
    let d = ring.top_degree();
    if d < 2 {
        return Err(Error::WrongGrade { expected: 2, found: d });
    }
    let (lin, l) = linear_coefficients(ring, ell)?;
    let mut vecs = Vec::with_capacity(basis.len());
    for b in basis {
        let (coeffs, _) = linear_coefficients(ring, b)?;
        let vars = ring.degree_one_vars();
        let mut v = vec![0i64; vars.len()];
        for (var, c) in coeffs {
            v[vars.iter().position(|&x| x == var).unwrap()] = c;
        }
        vecs.push(v);
    }
    let labels = (0..basis.len()).map(|i| format!("b{i}")).collect();
    let (matrix, signature) = gram_report(ring, &lin, &l, &vecs)?;
    Ok(SymmetricFormReport { labels, matrix, signature })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KahlerReport {
    pub top_degree: BigRational,
    pub dim1: usize,
    /// `None` when `d < 2` and the degree-one statements are vacuous
    pub signature: Option<Signature>,
}

impl KahlerReport {
    pub fn passed(&self) -> bool {
        self.top_degree.is_positive() && self.signature.is_none_or(|s| s == (1, self.dim1 - 1, 0))
    }
}

/// `∫ ℓ^d > 0`, nondegeneracy of `Q^1_ℓ` and its signature `(1, dim A^1 - 1, 0)`.
pub fn kahler_check(ring: &ChowRing, ell: &ChowElement) -> Result<KahlerReport> {
    if !ell.is_zero() && ell.grade() != Some(1) {
        return Err(Error::NotDegreeOne);
    }
    let top = hr_form(ring, ell, 0)?.matrix[0][0].clone();
    let dim1 = ring.dim(1);
    let signature = if ring.top_degree() >= 2 { Some(hr_form(ring, ell, 1)?.signature) } else { None };
    Ok(KahlerReport { top_degree: top, dim1, signature })
}

/// Seeded positive combinations `Σ c_F h_F` over rank-≥2 flats with `c_F` in `1..=9`.
pub fn nabla_samples(ring: &ChowRing, count: usize, seed: u64) -> Vec<ChowElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flats = ring.simplicial_flats();
    (0..count)
        .map(|_| {
            let mut e = ChowElement::zero(Alphabet::H);
            for &f in &flats {
                e.add_term(vec![(f, 1)], BigRational::from_integer(BigInt::from(rng.gen_range(1..=9i64))));
            }
            e
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarReport {
    pub flat: Mask,
    pub quotient_dims: Vec<usize>,
    pub tensor_dims: Vec<usize>,
    pub degree_checks: usize,
    pub degree_mismatches: usize,
}

impl StarReport {
    pub fn passed(&self) -> bool {
        self.quotient_dims == self.tensor_dims && self.degree_mismatches == 0 && self.degree_checks > 0
    }
}

/// Chains of flats (repeats allowed) of length `k`, as masks; only these can have nonzero products.
fn flat_chain_multisets(lat: &FlatLattice, full: Mask, k: usize) -> Vec<Vec<Mask>> {
    let proper: Vec<Mask> = lat.flats().iter().copied().filter(|&f| f != 0 && f != full).collect();
    let mut out = Vec::new();
    fn rec(p: &[Mask], k: usize, start: usize, cur: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..p.len() {
            if cur.last().is_none_or(|&l| is_subset(l, p[i])) {
                cur.push(p[i]);
                rec(p, k, i, cur, out);
                cur.pop();
            }
        }
    }
    rec(&proper, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Compares `A(M)/ann(x_F)` with `A(M|F) ⊗ A(M/F)` in dimensions and degree maps.
pub fn star_factorization_check(ring: &ChowRing, f: Mask) -> Result<StarReport> {
    let m = ring.matroid();
    if f == 0 || f == m.full() {
        return Err(Error::NotAProperFlat(f));
    }
    if f & !m.full() != 0 || !m.is_flat(f) {
        return Err(Error::NotAFlat(f));
    }
    let d = ring.top_degree();
    let quotient_dims: Vec<usize> = (0..d).map(|k| ring.multiplication_rank(f, k)).collect::<Result<_>>()?;
    let restriction = m.restrict(f)?;
    let contraction = m.contract(f)?;
    let ra = ChowRing::new(&restriction.matroid)?;
    let rb = ChowRing::new(&contraction.matroid)?;
    let (ha, hb) = (ra.hilbert(), rb.hilbert());
    let mut tensor_dims = vec![0usize; ha.len() + hb.len() - 1];
    for (i, a) in ha.iter().enumerate() {
        for (j, b) in hb.iter().enumerate() {
            tensor_dims[i + j] += a * b;
        }
    }
    let la = FlatLattice::new(&restriction.matroid);
    let lb = FlatLattice::new(&contraction.matroid);
    let side_a = flat_chain_multisets(&la, restriction.matroid.full(), ra.top_degree());
    let side_b = flat_chain_multisets(&lb, contraction.matroid.full(), rb.top_degree());
    let vals_b: Vec<i64> = side_b.iter().map(|b| rb.monomial_degree(Alphabet::X, b)).collect::<Result<_>>()?;
    let (mut checks, mut mismatches) = (0, 0);
    for a in &side_a {
        let va = ra.monomial_degree(Alphabet::X, a)?;
        for (b, &vb) in side_b.iter().zip(&vals_b) {
            let mut flats = vec![f];
            flats.extend(a.iter().map(|&g| restriction.lift(g)));
            flats.extend(b.iter().map(|&h| contraction.lift(h) | f));
            let v = ring.monomial_degree(Alphabet::X, &flats)?;
            checks += 1;
            if v != va * vb {
                mismatches += 1;
            }
        }
    }
    Ok(StarReport { flat: f, quotient_dims, tensor_dims, degree_checks: checks, degree_mismatches: mismatches })
}

/// Counts for the agreement of three routes to `∫ h_{A_1} ... h_{A_d}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleAgreement {
    pub multisets: u64,
    pub nonzero: u64,
    pub mismatches: Vec<Vec<Mask>>,
}

/// Runs the dragon Hall-Rado scan, the ring degree and the truncation chain on every
/// degree-d multiset of rank-≥2 flats.
pub fn dhr_triple_agreement(ring: &ChowRing) -> Result<TripleAgreement> {
    let m = ring.matroid();
    let d = ring.top_degree();
    let vars: Vec<usize> = ring.simplicial_flats().iter().map(|&f| ring.var(f)).collect::<Result<_>>()?;
    let masks: Vec<Mask> = vars.iter().map(|&v| ring.var_mask(v)).collect();
    let mut out = TripleAgreement::default();
    let mut record = |flats: &[Mask], ring_value: i64, table: &[u8], out: &mut TripleAgreement| -> Result<()> {
        let dhr = dhr_check(m, flats)?;
        let trunc = is_rank_one_loopless(table, m.size());
        out.multisets += 1;
        out.nonzero += u64::from(dhr);
        if (ring_value != i64::from(dhr) || trunc != dhr)
            && out.mismatches.len() < 16 {
                out.mismatches.push(flats.to_vec());
            }
        Ok(())
    };
    if d < 2 {
        for ms in multisets(vars.len(), d) {
            let flats: Vec<Mask> = ms.iter().map(|&i| masks[i]).collect();
            let v = ring.h_product_degree(&flats)?;
            let mut table = m.rank_table().to_vec();
            for &s in &flats {
                table = truncate_table(&table, s);
            }
            record(&flats, v, &table, &mut out)?;
        }
        return Ok(out);
    }
    // functionals for the last two factors
    let nv = vars.len();
    let mut pair_fn: Vec<Vec<i64>> = Vec::with_capacity(nv * nv);
    for a in 0..nv {
        for b in 0..nv {
            pair_fn.push(if a <= b { ring.h_functional::<i64>(&[masks[a], masks[b]])? } else { Vec::new() });
        }
    }
    struct Frame {
        vec: Vec<i64>,
        table: Vec<u8>,
    }
    let mut stack: Vec<usize> = Vec::new();
    let mut frames = vec![Frame { vec: vec![1], table: m.rank_table().to_vec() }];
    fn rec(
        ring: &ChowRing,
        vars: &[usize],
        masks: &[Mask],
        pair_fn: &[Vec<i64>],
        d: usize,
        start: usize,
        stack: &mut Vec<usize>,
        frames: &mut Vec<Frame>,
        record: &mut dyn FnMut(&[Mask], i64, &[u8], &mut TripleAgreement) -> Result<()>,
        out: &mut TripleAgreement,
    ) -> Result<()> {
        let nv = vars.len();
        let k = stack.len();
        if k == d - 2 {
            let top = frames.last().unwrap();
            let mut flats: Vec<Mask> = stack.iter().map(|&i| masks[i]).collect();
            for a in start..nv {
                let ta = truncate_table(&top.table, masks[a]);
                for b in a..nv {
                    let f = &pair_fn[a * nv + b];
                    let mut s = 0i64;
                    for (x, y) in top.vec.iter().zip(f) {
                        if *x != 0 && *y != 0 {
                            s = s.checked_add(x.checked_mul(*y).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                        }
                    }
                    let tb = truncate_table(&ta, masks[b]);
                    flats.push(masks[a]);
                    flats.push(masks[b]);
                    record(&flats, s, &tb, out)?;
                    flats.truncate(k);
                }
            }
            return Ok(());
        }
        for a in start..nv {
            let top = frames.last().unwrap();
            let vec = ring.h_op(k, vars[a]).unwrap().apply(&top.vec).ok_or(Error::Overflow)?;
            let table = truncate_table(&top.table, masks[a]);
            frames.push(Frame { vec, table });
            stack.push(a);
            rec(ring, vars, masks, pair_fn, d, a, stack, frames, record, out)?;
            stack.pop();
            frames.pop();
        }
        Ok(())
    }
    rec(ring, &vars, &masks, &pair_fn, d, 0, &mut stack, &mut frames, &mut record, &mut out)?;
    Ok(out)
}

/// Volume polynomial terms keyed by flat multisets, for display.
pub fn volume_terms(vp: &VolumePolynomial) -> BTreeMap<Vec<(Mask, usize)>, u128> {
    vp.terms().collect()
}

pub fn mask_size(s: Mask) -> usize {
    popcount(s)
}

pub fn mask_elements(s: Mask) -> Vec<usize> {
    elements(s).collect()
}
