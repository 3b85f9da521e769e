//! Commands and their JSON reports.

use chowmat::bergman::{bergman_class, check_balanced, minkowski_weight_dimension, weight_matrix};
use chowmat::chow::{sample_ample, ChowElement, ChowRing};
use chowmat::hodge::{
    char_poly, dhr_degree, kahler_check, log_concave, lorentzian_check, nabla_samples, no_internal_zeros,
    volume_polynomial, KahlerReport,
};
use chowmat::lattice::FlatLattice;
use chowmat::linalg::rank_i64;
use chowmat::matroid::elements;
use chowmat::quotient::{enumerate_relative_nested, is_quotient, is_relative_nested};
use chowmat::{Mask, Matroid};
use num_rational::BigRational;
use serde_json::{json, Value};

/// A report and whether every check in it passed.
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

fn lib(e: chowmat::Error) -> String {
    e.to_string()
}

pub fn flat_json(f: Mask) -> Value {
    json!(elements(f).collect::<Vec<_>>())
}

fn chain_json(chain: &[(Mask, usize)]) -> Value {
    Value::Array(chain.iter().map(|&(f, a)| json!({"flat": flat_json(f), "exp": a})).collect())
}

fn rational_json(q: &BigRational) -> Value {
    json!({"num": q.numer().to_string(), "den": q.denom().to_string()})
}

pub fn summary(m: &Matroid) -> Value {
    let lat = FlatLattice::new(m);
    json!({"ground": m.size(), "rank": m.rank_total(), "flats": lat.len(), "loopless": m.is_loopless()})
}

fn ring(m: &Matroid) -> Result<ChowRing, String> {
    ChowRing::new(m).map_err(lib)
}

fn fault(name: &str) -> bool {
    std::env::var("CHOWMAT_FAULT").is_ok_and(|v| v.split(',').any(|p| p.trim() == name))
}

pub fn info(m: &Matroid) -> Result<Outcome, String> {
    let lat = FlatLattice::new(m);
    let hilbert = if m.is_loopless() && m.rank_total() > 0 { json!(ring(m)?.hilbert()) } else { Value::Null };
    let report = json!({
        "rank": m.rank_total(),
        "flats": lat.rank_counts(),
        "loopless": m.is_loopless(),
        "hilbert": hilbert,
    });
    Ok(Outcome { report, passed: true })
}

pub fn degree(m: &Matroid, flats: &[Mask]) -> Result<Outcome, String> {
    for &f in flats {
        if f == 0 {
            return Err(lib(chowmat::Error::EmptySetMember));
        }
        if !m.is_flat(f) {
            return Err(lib(chowmat::Error::NotAFlat(f)));
        }
    }
    let dhr = dhr_degree(m, flats).map_err(lib)?;
    let mut groebner = ring(m)?.h_product_degree(flats).map_err(lib)?;
    if fault("degree") {
        groebner = 1 - groebner;
    }
    let agree = i64::from(dhr) == groebner;
    let report = json!({
        "flats": flats.iter().map(|&f| flat_json(f)).collect::<Vec<_>>(),
        "dhr": dhr,
        "groebner": groebner,
        "agree": agree,
    });
    Ok(Outcome { report, passed: agree })
}

pub fn volume(m: &Matroid) -> Result<Outcome, String> {
    let vp = volume_polynomial(m).map_err(lib)?;
    let mut terms: Vec<(Vec<(Mask, usize)>, u128)> = vp.terms().collect();
    terms.sort();
    let report = json!({
        "degree": vp.degree(),
        "variables": vp.vars().iter().map(|&f| flat_json(f)).collect::<Vec<_>>(),
        "count": terms.len(),
        "coefficient_sum": vp.coefficient_sum().to_string(),
        "terms": terms
            .iter()
            .map(|(t, c)| json!({"monomial": chain_json(t), "coeff": c.to_string()}))
            .collect::<Vec<_>>(),
    });
    Ok(Outcome { report, passed: true })
}

pub fn charpoly(m: &Matroid) -> Result<Outcome, String> {
    let c = char_poly(m).map_err(lib)?;
    let mut via_degrees = ring(m)?.mu_via_degrees().map_err(lib)?;
    if fault("charpoly") {
        if let Some(last) = via_degrees.last_mut() {
            *last += 1;
        }
    }
    let agree = c.mu == via_degrees;
    let concave = log_concave(&c.mu);
    let no_gaps = no_internal_zeros(&c.mu);
    let report = json!({
        "coefficients": c.coefficients.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "mu": c.mu,
        "mu_via_degrees": via_degrees,
        "agree": agree,
        "log_concave": concave,
        "no_internal_zeros": no_gaps,
    });
    Ok(Outcome { report, passed: agree && concave && no_gaps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Poincare,
    Lorentzian,
    Kahler,
    Nested,
    Balance,
    All,
}

pub fn verify(m: &Matroid, suite: Suite, seed: u64) -> Result<Outcome, String> {
    let r = ring(m)?;
    let all = [Suite::Poincare, Suite::Lorentzian, Suite::Kahler, Suite::Nested, Suite::Balance];
    let chosen: Vec<Suite> = if suite == Suite::All { all.to_vec() } else { vec![suite] };
    let mut suites = serde_json::Map::new();
    let mut passed = true;
    for s in chosen {
        let (name, out) = match s {
            Suite::Poincare => ("poincare", poincare(&r)?),
            Suite::Lorentzian => ("lorentzian", lorentzian(m)?),
            Suite::Kahler => ("kahler", kahler(&r, seed)?),
            Suite::Nested => ("nested", nested_suite(&r)?),
            Suite::Balance => ("balance", balance(m)?),
            Suite::All => unreachable!(),
        };
        passed &= out.passed;
        suites.insert(name.into(), out.report);
    }
    Ok(Outcome { report: json!({"suites": suites, "passed": passed}), passed })
}

fn poincare(r: &ChowRing) -> Result<Outcome, String> {
    let h = r.hilbert();
    let palindromic = h.iter().eq(h.iter().rev());
    let mut pairings = Vec::new();
    let mut full = true;
    for k in 0..=r.top_degree() {
        let p = r.poincare_pairing(k).map_err(lib)?;
        let rank = rank_i64(&p);
        let ok = rank == h[k] && h[k] == h[r.top_degree() - k];
        full &= ok;
        pairings.push(json!({"k": k, "rows": h[k], "cols": h[r.top_degree() - k], "rank": rank}));
    }
    let passed = palindromic && full;
    Ok(Outcome {
        report: json!({"passed": passed, "hilbert": h, "palindromic": palindromic, "pairings": pairings}),
        passed,
    })
}

fn lorentzian(m: &Matroid) -> Result<Outcome, String> {
    let vp = volume_polynomial(m).map_err(lib)?;
    let rep = lorentzian_check(m, &vp).map_err(lib)?;
    let failures: Vec<Value> =
        rep.failures.iter().map(|b| Value::Array(b.iter().map(|&f| flat_json(f)).collect())).collect();
    let passed = rep.passed();
    let mut report = json!({
        "passed": passed,
        "mconvex": rep.mconvex,
        "support": vp.len(),
        "hessians": rep.hessians,
        "failures": failures,
    });
    if vp.degree() < 2 {
        report["note"] = json!("no hessians below degree two");
    }
    Ok(Outcome { report, passed })
}

fn kahler_json(source: &str, rep: &KahlerReport) -> Value {
    json!({
        "source": source,
        "top_degree": rational_json(&rep.top_degree),
        "signature": rep.signature.map(|(p, n, z)| json!([p, n, z])),
        "passed": rep.passed(),
    })
}

fn kahler(r: &ChowRing, seed: u64) -> Result<Outcome, String> {
    let mut samples: Vec<(String, ChowElement)> = vec![("ample".into(), sample_ample(r).map_err(lib)?.h)];
    for (i, ell) in nabla_samples(r, 25, seed).into_iter().enumerate() {
        samples.push((format!("nabla-{i}"), ell));
    }
    let mut results = Vec::new();
    let mut passed = true;
    for (source, ell) in &samples {
        let rep = kahler_check(r, ell).map_err(lib)?;
        passed &= rep.passed();
        results.push(kahler_json(source, &rep));
    }
    let mut report = json!({"passed": passed, "seed": seed, "dim1": r.dim(1), "samples": results});
    if r.top_degree() < 2 {
        report["note"] = json!("vacuous degree 1");
    }
    Ok(Outcome { report, passed })
}

fn nested_suite(r: &ChowRing) -> Result<Outcome, String> {
    let m = r.matroid();
    let mut degrees = Vec::new();
    let mut passed = true;
    for c in 0..=r.top_degree() {
        let qs = enumerate_relative_nested(m, c).map_err(lib)?;
        let basis = r.dim(c);
        let mut valid = true;
        for q in &qs {
            valid &= match is_quotient(&q.matroid, m).map_err(lib)? {
                Some(w) => w.corank() == c && is_relative_nested(&w) && q.matroid.is_loopless(),
                None => false,
            };
        }
        let weights = qs.iter().map(|q| bergman_class(&q.matroid)).collect::<Result<Vec<_>, _>>().map_err(lib)?;
        let independent = rank_i64(&weight_matrix(&weights)) == qs.len();
        let ok = qs.len() == basis && valid && independent;
        passed &= ok;
        degrees.push(json!({
            "corank": c,
            "basis": basis,
            "quotients": qs.len(),
            "relative_nested": valid,
            "independent": independent,
        }));
    }
    Ok(Outcome { report: json!({"passed": passed, "degrees": degrees}), passed })
}

fn balance(m: &Matroid) -> Result<Outcome, String> {
    let w = bergman_class(m).map_err(lib)?;
    let balanced = check_balanced(&w);
    let d = m.rank_total() - 1;
    let dim = if m.size() <= 5 { Some(minkowski_weight_dimension(m, d).map_err(lib)?) } else { None };
    let passed = balanced && dim.is_none_or(|k| k == 1);
    Ok(Outcome {
        report: json!({"passed": passed, "balanced": balanced, "cones": w.weights().len(), "mw_dimension": dim}),
        passed,
    })
}

pub fn nested(m: &Matroid, corank: usize) -> Result<Outcome, String> {
    let r = ring(m)?;
    let qs = enumerate_relative_nested(m, corank).map_err(lib)?;
    let pairs: Vec<Value> = qs
        .iter()
        .map(|q| {
            let mut bases: Vec<Vec<usize>> = q.matroid.bases().iter().map(|&b| elements(b).collect()).collect();
            bases.sort();
            json!({
                "monomial": chain_json(&q.chain),
                "quotient": {"rank": q.matroid.rank_total(), "bases": bases},
            })
        })
        .collect();
    let passed = pairs.len() == r.dim(corank);
    Ok(Outcome { report: json!({"corank": corank, "basis": r.dim(corank), "pairs": pairs}), passed })
}
