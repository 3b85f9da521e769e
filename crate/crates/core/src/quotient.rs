//! Quotients, principal truncations, matroid intersection and Higgs factorizations.

use crate::error::{Error, Result};
use crate::lattice::{nested_chains, FlatLattice};
use rand::Rng;

use crate::matroid::{elements, is_subset, popcount, Mask, Matroid};

/// A certified quotient `lower <- upper`.
#[derive(Debug, Clone)]
pub struct QuotientWitness {
    lower: Matroid,
    upper: Matroid,
}

impl QuotientWitness {
    pub fn lower(&self) -> &Matroid {
        &self.lower
    }

    pub fn upper(&self) -> &Matroid {
        &self.upper
    }

    /// `n_f(s) = rk_upper(s) - rk_lower(s)`.
    pub fn nullity(&self, s: Mask) -> usize {
        self.upper.rank(s) - self.lower.rank(s)
    }

    pub fn corank(&self) -> usize {
        self.nullity(self.upper.full())
    }
}

/// Returns a witness when every flat of `lower` is a flat of `upper`.
pub fn is_quotient(lower: &Matroid, upper: &Matroid) -> Result<Option<QuotientWitness>> {
    if lower.size() != upper.size() {
        return Err(Error::GroundSetMismatch(lower.size(), upper.size()));
    }
    let ok = (0..=lower.full()).all(|s| !lower.is_flat(s) || upper.is_flat(s));
    Ok(ok.then(|| QuotientWitness { lower: lower.clone(), upper: upper.clone() }))
}

/// `T_F(M)` from the basis formula `B \ f` with `f` in `B ∩ F`.
pub fn principal_truncation(m: &Matroid, f: Mask) -> Result<Matroid> {
    m.check_subset(f)?;
    if !m.is_flat(f) {
        return Err(Error::NotAFlat(f));
    }
    if f == 0 || m.rank(f) == 0 {
        return Err(Error::EmptyFlat);
    }
    let mut bases: Vec<Mask> = m
        .bases()
        .iter()
        .flat_map(|&b| elements(b & f).map(move |x| b & !(1 << x)))
        .collect();
    bases.sort_unstable();
    bases.dedup();
    Matroid::from_bases(m.ground(), &bases)
}

/// `M ∧ H_S` through the rank function: ranks drop by one on sets whose closure contains `S`.
pub fn meet_h(m: &Matroid, s: Mask) -> Result<Matroid> {
    m.check_subset(s)?;
    if s == 0 {
        return Err(Error::EmptyFlat);
    }
    Ok(Matroid::from_rank_table(m.size(), truncate_table(m.rank_table(), s)))
}

/// Loopless matroid obtained from the Boolean matroid on `n` elements by a random number of
/// principal truncations at random flats of rank at least two.
pub fn random_truncation_matroid<R: Rng>(n: usize, rng: &mut R) -> Result<Matroid> {
    let mut m = Matroid::boolean(n)?;
    let steps = rng.gen_range(0..n.max(1));
    for _ in 0..steps {
        let lat = FlatLattice::new(&m);
        let choices: Vec<Mask> = lat.flats().iter().copied().filter(|&f| m.rank(f) >= 2).collect();
        if choices.is_empty() {
            break;
        }
        let f = choices[rng.gen_range(0..choices.len())];
        m = principal_truncation(&m, f)?;
    }
    Ok(m)
}

pub(crate) fn truncate_table(ranks: &[u8], s: Mask) -> Vec<u8> {
    if ranks[s as usize] == 0 {
        return ranks.to_vec();
    }
    (0..ranks.len())
        .map(|t| {
            let r = ranks[t];
            if ranks[t | s as usize] == r {
                r - 1
            } else {
                r
            }
        })
        .collect()
}

/// Matroid whose spanning sets are the intersections of spanning sets of `a` and `b`.
pub fn matroid_intersection(a: &Matroid, b: &Matroid) -> Result<Matroid> {
    if a.size() != b.size() {
        return Err(Error::GroundSetMismatch(a.size(), b.size()));
    }
    let n = a.size();
    let size = 1usize << n;
    let mut hit = vec![false; size];
    for &x in a.bases() {
        for &y in b.bases() {
            hit[(x & y) as usize] = true;
        }
    }
    // spanning family is the up-closure of the pairwise basis intersections
    let mut spanning = hit.clone();
    for s in 0..size {
        if !spanning[s] {
            spanning[s] = elements(s as Mask).any(|e| spanning[s & !(1 << e)]);
        }
    }
    let minimal: Vec<Mask> = (0..size)
        .filter(|&s| spanning[s] && elements(s as Mask).all(|e| !spanning[s & !(1 << e)]))
        .map(|s| s as Mask)
        .collect();
    Matroid::from_bases(a.ground(), &minimal)
}

/// Flats of `lower` that are minimal among the flats sharing their nullity.
pub fn f_cyclic_flats(w: &QuotientWitness) -> Vec<Mask> {
    let lat = FlatLattice::new(&w.lower);
    let flats = lat.flats();
    let mut out: Vec<Mask> = flats
        .iter()
        .copied()
        .filter(|&f| {
            let k = w.nullity(f);
            !flats.iter().any(|&g| g != f && is_subset(g, f) && w.nullity(g) == k)
        })
        .collect();
    out.sort_by_key(|&f| (popcount(f), f));
    out
}

pub fn is_relative_nested(w: &QuotientWitness) -> bool {
    let cyc = f_cyclic_flats(w);
    cyc.windows(2).all(|p| is_subset(p[0], p[1]))
}

/// Elementary quotients `M' = M_0 <- M_1 <- ... <- M_c = M` and their modular cuts.
#[derive(Debug, Clone)]
pub struct HiggsChain {
    pub stages: Vec<Matroid>,
    /// `cuts[i - 1]` is the modular cut of flats of `M_i` defining `M_{i-1}`.
    pub cuts: Vec<Vec<Mask>>,
}

pub fn higgs_factorization(w: &QuotientWitness) -> HiggsChain {
    let (low, up) = (&w.lower, &w.upper);
    let c = w.corank();
    let r0 = low.rank_total();
    let mut stages = Vec::with_capacity(c + 1);
    for i in 0..=c {
        let bases: Vec<Mask> = (0..=up.full())
            .filter(|&a| popcount(a) == r0 + i && low.is_spanning(a) && up.is_independent(a))
            .collect();
        stages.push(Matroid::from_valid_bases(up.size(), bases));
    }
    let cuts = (1..=c)
        .map(|i| {
            let mi = &stages[i];
            let mut cut: Vec<Mask> =
                (0..=mi.full()).filter(|&g| mi.is_flat(g) && w.nullity(g) >= i).collect();
            cut.sort_by_key(|&g| (mi.rank(g), g));
            cut
        })
        .collect();
    HiggsChain { stages, cuts }
}

/// Elementary quotient of `m` along a modular cut: ranks drop on sets whose closure lies in `cut`.
pub fn elementary_quotient(m: &Matroid, cut: &[Mask]) -> Result<Matroid> {
    let mut in_cut = vec![false; 1 << m.size()];
    for &g in cut {
        m.check_subset(g)?;
        if !m.is_flat(g) {
            return Err(Error::NotAFlat(g));
        }
        in_cut[g as usize] = true;
    }
    if in_cut[m.closure(0) as usize] || !in_cut[m.full() as usize] {
        return Err(Error::Unsupported("cut must contain E and avoid the closure of the empty set".into()));
    }
    let ranks: Vec<u8> = (0..=m.full())
        .map(|s| {
            let r = m.rank(s) as u8;
            if in_cut[m.closure(s) as usize] {
                r - 1
            } else {
                r
            }
        })
        .collect();
    let lowered = Matroid::from_rank_table(m.size(), ranks);
    // revalidate: a non-modular cut yields a family that fails exchange
    let checked = Matroid::from_bases(m.ground(), lowered.bases())?;
    if checked != lowered {
        return Err(Error::ExchangeAxiomViolation("cut is not modular".into()));
    }
    Ok(lowered)
}

/// All nonempty proper modular cuts of the lattice of flats, by brute force over up-sets.
pub fn modular_cuts(m: &Matroid, max_flats: usize) -> Result<Vec<Vec<Mask>>> {
    let lat = FlatLattice::new(m);
    if lat.len() > max_flats {
        return Err(Error::Unsupported(format!("{} flats exceed the brute-force limit {max_flats}", lat.len())));
    }
    let n = lat.len();
    let order: Vec<usize> = (0..n).rev().collect();
    let mut chosen = vec![false; n];
    let mut out = Vec::new();
    fn rec(
        k: usize,
        order: &[usize],
        lat: &FlatLattice,
        m: &Matroid,
        chosen: &mut Vec<bool>,
        out: &mut Vec<Vec<Mask>>,
    ) {
        if k == order.len() {
            let members: Vec<usize> = (0..chosen.len()).filter(|&i| chosen[i]).collect();
            if members.is_empty() || chosen[lat.bottom()] {
                return;
            }
            for &a in &members {
                for &b in &members {
                    let (fa, fb) = (lat.flat(a), lat.flat(b));
                    let meet = fa & fb;
                    let join = m.closure(fa | fb);
                    let modular = m.rank(fa) + m.rank(fb) == m.rank(meet) + m.rank(join);
                    if modular && !chosen[lat.id(meet).expect("meet of flats is a flat")] {
                        return;
                    }
                }
            }
            let mut cut: Vec<Mask> = members.iter().map(|&i| lat.flat(i)).collect();
            cut.sort_by_key(|&g| (m.rank(g), g));
            out.push(cut);
            return;
        }
        let f = order[k];
        chosen[f] = false;
        rec(k + 1, order, lat, m, chosen, out);
        if lat.covers_up(f).iter().all(|&g| chosen[g]) {
            chosen[f] = true;
            rec(k + 1, order, lat, m, chosen, out);
            chosen[f] = false;
        }
    }
    rec(0, &order, &lat, m, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

/// A quotient `M ∧ H_{F_k}^{a_k} ∧ ... ∧ H_{F_1}^{a_1}` generated from a nested chain.
#[derive(Debug, Clone)]
pub struct NestedQuotient {
    pub chain: Vec<(Mask, usize)>,
    pub matroid: Matroid,
}

/// Iterated truncations over all nested chains of total exponent `corank`, in chain order.
pub fn enumerate_relative_nested(m: &Matroid, corank: usize) -> Result<Vec<NestedQuotient>> {
    if !m.is_loopless() {
        return Err(Error::LoopyMatroid);
    }
    if m.rank_total() == 0 || corank >= m.rank_total() {
        return Err(Error::InvalidRank { r: corank, n: m.rank_total() });
    }
    let lat = FlatLattice::new(m);
    let chains = nested_chains(&lat, corank);
    let mut out = Vec::with_capacity(chains[corank].len());
    for chain in &chains[corank] {
        let mut table = m.rank_table().to_vec();
        for &(f, a) in chain {
            for _ in 0..a {
                table = truncate_table(&table, lat.flat(f));
            }
        }
        out.push(NestedQuotient {
            chain: chain.iter().map(|&(f, a)| (lat.flat(f), a)).collect(),
            matroid: Matroid::from_rank_table(m.size(), table),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::GroundSet;

    fn k4() -> Matroid {
        Matroid::graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn quotient_examples() {
        let u24 = Matroid::uniform(2, 4).unwrap();
        let u34 = Matroid::uniform(3, 4).unwrap();
        let w = is_quotient(&u24, &u34).unwrap().unwrap();
        assert_eq!(w.nullity(u34.full()), 1);
        let b4 = Matroid::boolean(4).unwrap();
        for m in [u24.clone(), u34.clone(), Matroid::uniform(1, 4).unwrap()] {
            assert!(is_quotient(&m, &b4).unwrap().is_some());
        }
        assert!(is_quotient(&u34, &u24).unwrap().is_none());
        assert!(is_quotient(&u34, &Matroid::uniform(2, 3).unwrap()).is_err());
    }

    #[test]
    fn truncation_examples() {
        let u34 = Matroid::uniform(3, 4).unwrap();
        assert_eq!(principal_truncation(&u34, u34.full()).unwrap(), Matroid::uniform(2, 4).unwrap());
        let t = principal_truncation(&u34, 0b0001).unwrap();
        assert_eq!(t.loops(), 0b0001);
        assert_eq!(principal_truncation(&u34, 0b0111), Err(Error::NotAFlat(0b0111)));
        assert_eq!(principal_truncation(&u34, 0), Err(Error::EmptyFlat));
    }

    #[test]
    fn truncation_flats_split_by_nullity() {
        let u34 = Matroid::uniform(3, 4).unwrap();
        let f = 0b0011;
        let t = principal_truncation(&u34, f).unwrap();
        let w = is_quotient(&t, &u34).unwrap().unwrap();
        let lat_m = FlatLattice::new(&u34);
        let lat_t = FlatLattice::new(&t);
        let k: Vec<Mask> = lat_t.flats().iter().copied().filter(|&g| w.nullity(g) == 1).collect();
        let l: Vec<Mask> = lat_t.flats().iter().copied().filter(|&g| w.nullity(g) == 0).collect();
        let mut k_expected: Vec<Mask> = lat_m.flats().iter().copied().filter(|&g| is_subset(f, g)).collect();
        let mut l_expected: Vec<Mask> = lat_m
            .flats()
            .iter()
            .copied()
            .filter(|&g| {
                let id = lat_m.id(g).unwrap();
                !is_subset(f, g) && !lat_m.covers_up(id).iter().any(|&h| is_subset(f, lat_m.flat(h)))
            })
            .collect();
        let mut k_sorted = k.clone();
        let mut l_sorted = l.clone();
        for v in [&mut k_expected, &mut l_expected, &mut k_sorted, &mut l_sorted] {
            v.sort_unstable();
        }
        assert_eq!(k_sorted, k_expected);
        assert_eq!(l_sorted, l_expected);
        assert_eq!(k.len() + l.len(), lat_t.len());
    }

    #[test]
    fn intersection_examples() {
        let u33 = Matroid::boolean(3).unwrap();
        let h = Matroid::h_matroid(GroundSet::new(3).unwrap(), 0b111).unwrap();
        assert_eq!(matroid_intersection(&h, &u33).unwrap(), Matroid::uniform(2, 3).unwrap());
        let m = k4();
        let b = Matroid::boolean(6).unwrap();
        assert_eq!(matroid_intersection(&m, &b).unwrap(), m);
    }

    #[test]
    fn meet_h_agrees_with_definitional_intersection() {
        let loopy = Matroid::uniform(2, 3).unwrap().direct_sum(&Matroid::uniform(0, 1).unwrap()).unwrap();
        for m in [k4(), Matroid::uniform(3, 5).unwrap(), loopy] {
            for s in 1..=m.full() {
                let h = Matroid::h_matroid(m.ground(), s).unwrap();
                let def = matroid_intersection(&h, &m).unwrap();
                assert_eq!(meet_h(&m, s).unwrap(), def, "S = {s:#b}");
                if m.rank(s) > 0 {
                    let hf = Matroid::h_matroid(m.ground(), m.closure(s)).unwrap();
                    assert_eq!(matroid_intersection(&hf, &m).unwrap(), def);
                    assert_eq!(principal_truncation(&m, m.closure(s)).unwrap(), def);
                }
            }
        }
    }

    #[test]
    fn f_cyclic_examples() {
        let u34 = Matroid::uniform(3, 4).unwrap();
        let id = is_quotient(&u34, &u34).unwrap().unwrap();
        assert_eq!(f_cyclic_flats(&id), vec![0]);
        assert!(is_relative_nested(&id));
        let w = is_quotient(&Matroid::uniform(2, 4).unwrap(), &u34).unwrap().unwrap();
        assert_eq!(f_cyclic_flats(&w), vec![0, 0b1111]);
    }

    #[test]
    fn boolean_quotient_f_cyclic_flats_are_cyclic_flats() {
        let m = k4();
        let b = Matroid::boolean(6).unwrap();
        let w = is_quotient(&m, &b).unwrap().unwrap();
        // a flat is cyclic when it is a union of circuits: no element is a coloop of the restriction
        let lat = FlatLattice::new(&m);
        let cyclic: Vec<Mask> = lat
            .flats()
            .iter()
            .copied()
            .filter(|&f| elements(f).all(|e| m.rank(f & !(1 << e)) == m.rank(f)))
            .collect();
        let mut got = f_cyclic_flats(&w);
        got.sort_unstable();
        let mut expected = cyclic;
        expected.sort_unstable();
        assert_eq!(got, expected);
    }

    #[test]
    fn higgs_examples() {
        let u33 = Matroid::boolean(3).unwrap();
        let w = is_quotient(&u33, &u33).unwrap().unwrap();
        assert_eq!(higgs_factorization(&w).stages.len(), 1);
        let w = is_quotient(&Matroid::uniform(1, 3).unwrap(), &u33).unwrap().unwrap();
        let h = higgs_factorization(&w);
        assert_eq!(h.stages.len(), 3);
        assert_eq!(h.stages[0], Matroid::uniform(1, 3).unwrap());
        assert_eq!(h.stages[1], Matroid::uniform(2, 3).unwrap());
        assert_eq!(h.stages[2], u33);
    }

    #[test]
    fn higgs_cuts_rebuild_each_stage() {
        let m = k4();
        let low = meet_h(&meet_h(&m, 0b1011).unwrap(), m.full()).unwrap();
        let w = is_quotient(&low, &m).unwrap().unwrap();
        let h = higgs_factorization(&w);
        assert_eq!(h.stages.first().unwrap(), &low);
        assert_eq!(h.stages.last().unwrap(), &m);
        for i in 1..h.stages.len() {
            assert_eq!(h.stages[i].rank_total(), h.stages[i - 1].rank_total() + 1);
            assert!(is_quotient(&h.stages[i - 1], &h.stages[i]).unwrap().is_some());
            assert_eq!(elementary_quotient(&h.stages[i], &h.cuts[i - 1]).unwrap(), h.stages[i - 1]);
        }
    }

    #[test]
    fn u34_has_a_non_nested_corank_one_quotient() {
        let u34 = Matroid::uniform(3, 4).unwrap();
        let cuts = modular_cuts(&u34, 20).unwrap();
        let mut bad = Vec::new();
        for cut in &cuts {
            let q = elementary_quotient(&u34, cut).unwrap();
            if !q.is_loopless() {
                continue;
            }
            let w = is_quotient(&q, &u34).unwrap().unwrap();
            if !is_relative_nested(&w) {
                bad.push(f_cyclic_flats(&w));
            }
        }
        // two disjoint parallel pairs give incomparable f-cyclic flats
        assert!(bad.contains(&vec![0, 0b0011, 0b1100]));
        // every loopless corank-1 quotient is either nested or one of the three pair-splittings
        assert_eq!(bad.len(), 3);
    }

    #[test]
    fn nested_enumeration_examples() {
        let u34 = Matroid::uniform(3, 4).unwrap();
        assert_eq!(enumerate_relative_nested(&u34, 1).unwrap().len(), 7);
        let id = enumerate_relative_nested(&u34, 0).unwrap();
        assert_eq!(id.len(), 1);
        assert_eq!(id[0].matroid, u34);
        let top = enumerate_relative_nested(&Matroid::boolean(3).unwrap(), 2).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].matroid, Matroid::uniform(1, 3).unwrap());
    }

    #[test]
    fn nested_quotients_recover_their_chain() {
        for m in [k4(), Matroid::uniform(4, 5).unwrap()] {
            for c in 0..m.rank_total() {
                let qs = enumerate_relative_nested(&m, c).unwrap();
                for q in &qs {
                    let w = is_quotient(&q.matroid, &m).unwrap().unwrap();
                    assert!(q.matroid.is_loopless());
                    assert!(is_relative_nested(&w));
                    let cyc = f_cyclic_flats(&w);
                    assert_eq!(cyc[0], 0);
                    // cumulative nullities along the chain give back the exponents
                    let mut prev = 0;
                    let rebuilt: Vec<(Mask, usize)> = cyc[1..]
                        .iter()
                        .map(|&f| {
                            let k = w.nullity(f);
                            let a = k - prev;
                            prev = k;
                            (f, a)
                        })
                        .collect();
                    assert_eq!(rebuilt, q.chain);
                }
                let mut all: Vec<&Matroid> = qs.iter().map(|q| &q.matroid).collect();
                all.sort_by_key(|x| x.bases().to_vec());
                all.dedup();
                assert_eq!(all.len(), qs.len());
            }
        }
    }

    #[test]
    fn nullity_is_monotone_with_unit_steps() {
        let m = k4();
        for q in enumerate_relative_nested(&m, 2).unwrap() {
            let w = is_quotient(&q.matroid, &m).unwrap().unwrap();
            for s in 0..=m.full() {
                for e in elements(m.full() & !s) {
                    let t = s | (1 << e);
                    assert!(w.nullity(s) <= w.nullity(t));
                    assert!(w.nullity(t) - w.nullity(s) <= 1);
                }
            }
        }
    }

    #[test]
    fn random_truncations_are_loopless_quotients_of_boolean() {
        use rand::SeedableRng;
        for seed in 0..30u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 1 + (seed as usize % 6);
            let m = random_truncation_matroid(n, &mut rng).unwrap();
            assert!(m.is_loopless());
            assert!(m.rank_total() >= 1);
            assert!(is_quotient(&m, &Matroid::boolean(n).unwrap()).unwrap().is_some());
        }
    }
}
