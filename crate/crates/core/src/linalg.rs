//! Exact ranks and signatures.
//!
//! Integer ranks are first computed modulo a large prime. A full rank modulo `p` is already
//! a rank over the rationals; anything else falls back to fraction-free elimination over `BigInt`.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(x: i64) -> u64 {
    (x as i128).rem_euclid(P as i128) as u64
}

/// Rank of an integer matrix modulo `2^61 - 1`; a lower bound for the rational rank.
pub fn rank_mod_p(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| to_mod(x)).collect()).collect();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = powmod(a[rank][c], P - 2);
        let prow = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            if row[c] == 0 {
                continue;
            }
            let f = mulmod(row[c], inv);
            for j in c..ncols {
                if prow[j] != 0 {
                    row[j] = (row[j] + P - mulmod(f, prow[j])) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exact rank over the rationals of an integer matrix.
pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let r = rank_mod_p(rows);
    if r == rows.len().min(ncols) {
        return r;
    }
    let big: Vec<Vec<BigInt>> = rows.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
    rank_bigint(big)
}

/// Fraction-free Gaussian elimination.
pub fn rank_bigint(mut a: Vec<Vec<BigInt>>) -> usize {
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, piv);
        let p = a[rank][c].clone();
        for i in (rank + 1)..a.len() {
            for j in (c + 1)..ncols {
                let v = (&p * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = p;
        rank += 1;
    }
    rank
}

pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
    // clear denominators row by row
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    rank_bigint(big)
}

/// `(positive, negative, zero)` inertia of a symmetric form.
pub type Signature = (usize, usize, usize);

trait Scalar: Clone + Zero + PartialEq {
    fn add_c(&self, o: &Self) -> Option<Self>;
    fn sub_c(&self, o: &Self) -> Option<Self>;
    fn mul_c(&self, o: &Self) -> Option<Self>;
    fn div_c(&self, o: &Self) -> Option<Self>;
    fn positive(&self) -> bool;
}

impl Scalar for Ratio<i128> {
    fn add_c(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub_c(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul_c(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div_c(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn positive(&self) -> bool {
        self.is_positive()
    }
}

fn signature_generic<T: Scalar>(mut a: Vec<Vec<T>>) -> Option<Signature> {
    let n = a.len();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        let diag = (k..n).find(|&i| !a[i][i].is_zero());
        let piv = match diag {
            Some(i) => i,
            None => {
                let off = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| i != j && !a[i][j].is_zero());
                let Some((i, j)) = off else { break };
                // congruence row_i += row_j, col_i += col_j makes a_ii = 2 a_ij nonzero
                for c in 0..n {
                    let v = a[i][c].add_c(&a[j][c])?;
                    a[i][c] = v;
                }
                for r in 0..n {
                    let v = a[r][i].add_c(&a[r][j])?;
                    a[r][i] = v;
                }
                i
            }
        };
        a.swap(k, piv);
        for row in a.iter_mut() {
            row.swap(k, piv);
        }
        let p = a[k][k].clone();
        if p.positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].div_c(&p)?;
            for j in (k + 1)..n {
                if a[k][j].is_zero() {
                    continue;
                }
                let v = a[i][j].sub_c(&f.mul_c(&a[k][j])?)?;
                a[i][j] = v;
            }
            a[i][k] = T::zero();
        }
        for j in (k + 1)..n {
            a[k][j] = T::zero();
        }
        k += 1;
    }
    Some((pos, neg, n - pos - neg))
}

/// Signature of an integer symmetric matrix by fraction-free elimination.
///
/// Entries stay bordered minors of the leading block (Sylvester's identity), so every division
/// is exact. `prev` is the current leading minor; a 1x1 pivot `p` contributes the sign of
/// `p / prev`, a hyperbolic 2x2 pivot contributes one of each sign.
pub fn signature_bigint(mut a: Vec<Vec<BigInt>>) -> Signature {
    let n = a.len();
    let (mut pos, mut neg) = (0, 0);
    let mut prev = BigInt::one();
    let mut k = 0;
    let swap = |a: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        a.swap(i, j);
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    };
    while k < n {
        if let Some(i) = (k..n).find(|&i| !a[i][i].is_zero()) {
            swap(&mut a, k, i);
            let p = a[k][k].clone();
            if (p.is_positive()) == (prev.is_positive()) {
                pos += 1;
            } else {
                neg += 1;
            }
            for i in (k + 1)..n {
                for j in i..n {
                    let v = (&p * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v.clone();
                    a[j][i] = v;
                }
            }
            prev = p;
            k += 1;
            continue;
        }
        let Some((i, j)) = (k..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
        else {
            break;
        };
        swap(&mut a, k, i);
        swap(&mut a, k + 1, j);
        // block [[0, b], [b, 0]]
        let b = a[k][k + 1].clone();
        pos += 1;
        neg += 1;
        let div = &prev * &prev;
        for p in (k + 2)..n {
            for q in p..n {
                // 3x3 determinant of [[0, b, a_kq], [b, 0, a_k1q], [a_pk, a_pk1, a_pq]]
                let det = -(&b * (&b * &a[p][q] - &a[k + 1][q] * &a[p][k]))
                    + &a[k][q] * (&b * &a[p][k + 1]);
                let v = det / &div;
                a[p][q] = v.clone();
                a[q][p] = v;
            }
        }
        prev = -(&b * &b) / &prev;
        k += 2;
    }
    (pos, neg, n - pos - neg)
}

/// Exact signature by symmetric congruence elimination.
pub fn signature(m: &[Vec<BigRational>]) -> Signature {
    let small: Option<Vec<Vec<Ratio<i128>>>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| Some(Ratio::new(x.numer().to_i128()?, x.denom().to_i128()?)))
                .collect()
        })
        .collect();
    if let Some(s) = small.and_then(signature_generic) {
        return s;
    }
    // a positive common denominator does not change the signature
    let l = m.iter().flatten().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    signature_bigint(m.iter().map(|row| row.iter().map(|x| x.numer() * (&l / x.denom())).collect()).collect())
}

pub fn signature_i64(m: &[Vec<i64>]) -> Signature {
    let small: Vec<Vec<Ratio<i128>>> = m.iter().map(|row| row.iter().map(|&x| Ratio::from_integer(x as i128)).collect()).collect();
    if let Some(s) = signature_generic(small) {
        return s;
    }
    signature_bigint(m.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect())
}

pub fn is_symmetric<T: PartialEq>(m: &[Vec<T>]) -> bool {
    m.iter().enumerate().all(|(i, row)| row.len() == m.len() && (0..i).all(|j| row[j] == m[j][i]))
}
