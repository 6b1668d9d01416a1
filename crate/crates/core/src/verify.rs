//! Verification suites: each compares engine output (or a library
//! identity) against an independent source and returns a report with one
//! entry per check. The acceptance tests and `polyzeta verify` share them.

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::closedform::{c0_c1_series, trigamma_numeric_check, wz_verify};
use crate::engine::EngineState;
use crate::error::{Error, Result};
use crate::kernels::{bessel_en, bessel_expansion};
use crate::mzvalg::{LambdaPoly, MzvElem};
use crate::numeval::{
    circle_average_many, circle_point, disk_eigenvalue, evaluate_expansion, lambda_poly_numeric, li_numeric, li_word,
    mzv_numeric, CBall,
};
use crate::polyreg::{alpha_beta, ARoute};
use crate::reference;
use crate::ring::{q, qi, QAlgebra, Ring, Q};
use crate::series::exp_linear_coeffs;
use crate::words::{shuffle, Letter, Word, WordPoly};

/// Tolerance for numeric agreement of symbolic coefficients.
pub const COEFF_TOL: f64 = 1e-25;
/// Tolerance for the trigamma identity residual.
pub const TRIGAMMA_TOL: f64 = 1e-30;
/// Tolerance for the regularization identity on the circle.
pub const REG_TOL: f64 = 1e-20;
/// Tolerance for quadrature-based checks.
pub const QUAD_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        Report { suite: suite.to_string(), passed, checks }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, deviation: None, detail: detail.into() }
}

fn check_dev(name: impl Into<String>, dev: f64, tol: f64) -> Check {
    Check { name: name.into(), passed: dev < tol, deviation: Some(dev), detail: String::new() }
}

/// Upper bound on |e| for a (possibly complex) MZV expression.
fn mzv_abs(e: &MzvElem, prec: u32) -> Result<f64> {
    Ok(e.duality_canonical().numeric(prec)?.abs_upper())
}

/// Largest per-degree deviation |a_d - b_d| between two lambda-polynomials.
fn lambda_deviation(a: &LambdaPoly, b: &LambdaPoly, prec: u32) -> Result<f64> {
    let diff = a.sub_ref(b);
    let mut dev = 0.0f64;
    for c in diff.coeffs() {
        dev = dev.max(mzv_abs(c, prec)?);
    }
    Ok(dev)
}

/// C_n against the published table, coefficient by coefficient in lambda,
/// for 1 <= n <= `n_max` (and at most the engine order).
pub fn table1(c: &[LambdaPoly], n_max: usize, prec: u32) -> Result<Report> {
    let top = n_max.min(c.len().saturating_sub(1)).min(reference::TABLE1_MAX);
    let checks = (1..=top)
        .into_par_iter()
        .map(|n| Ok(check_dev(format!("C_{n}"), lambda_deviation(&c[n], &reference::table1(n)?, prec)?, COEFF_TOL)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new("table1", checks))
}

/// The closed-form terms through N^-8 at lambda = j_{0,1}^2, term by term,
/// and the partial sum at N = 10 against the same sum built from the
/// published coefficients.
pub fn expansion_small(c: &[LambdaPoly], prec: u32) -> Result<Report> {
    let lambda = disk_eigenvalue(1, prec)?;
    let mut checks = Vec::new();
    let known = reference::expansion_small()?;
    let mut printed = vec![LambdaPoly::zero(); 9];
    for (n, poly) in &known {
        printed[*n] = poly.clone();
        let Some(cn) = c.get(*n) else {
            checks.push(check(format!("C_{n}(lambda_1)"), false, "not computed"));
            continue;
        };
        let a = lambda_poly_numeric(cn, &lambda, prec)?;
        let b = lambda_poly_numeric(poly, &lambda, prec)?;
        checks.push(check_dev(format!("C_{n}(lambda_1)"), a.sub(&b).abs_upper(), COEFF_TOL));
    }
    if c.len() > 8 {
        let a = evaluate_expansion(10, 8, 1, c, prec)?;
        let b = evaluate_expansion(10, 8, 1, &printed, prec)?;
        checks.push(check_dev("partial sum at N = 10", a.sub(&b).abs_upper(), 1e-20));
    }
    Ok(Report::new("expansion", checks))
}

/// V_1..V_4 against the table as exact symbolic data. The V_4 entry uses
/// the table with the lambda factor restored on 2 zeta(3) Li_1 (see
/// [`reference::table2`]); the structural fact behind that correction is
/// checked separately on every computed V_n.
pub fn table2(state: &EngineState) -> Result<Report> {
    let mut checks = Vec::new();
    for n in 1..=4 {
        let Some(v) = state.v.get(n) else {
            checks.push(check(format!("V_{n}"), false, "not computed"));
            continue;
        };
        let expect = reference::table2(n)?;
        let detail = if *v == expect { String::new() } else { format!("engine {v:?}") };
        checks.push(check(format!("V_{n}"), *v == expect, detail));
    }
    if let Some(v4) = state.v.get(4) {
        // engine - printed = 2 zeta(3) (lambda - 1) Li_1
        let z3 = MzvElem::zeta_comp(&[3]).scale(&qi(2));
        let shift = LambdaPoly::from_coeffs(vec![z3.neg_ref(), z3]);
        let mut diff = v4.clone();
        diff.add_assign(&reference::table2_printed(4)?.mul_coeff(&LambdaPoly::one().neg_ref()));
        let ok = diff == WordPoly::term(Word::x1(), shift);
        checks.push(check("V_4 differs from the printed row only by the lambda on 2 zeta(3) Li_1", ok, ""));
    }
    let rational_at_zero = state.v.iter().all(|v| v.iter().all(|(_, c)| c.coeff(0).as_rational().is_some()));
    checks.push(check("lambda^0 part of every V_n has rational coefficients", rational_at_zero, ""));
    Ok(Report::new("table2", checks))
}

/// kappa_1 = ... = kappa_4 = 0 exactly.
pub fn kappa_vanishing(state: &EngineState) -> Report {
    let checks = (1..=4)
        .map(|n| match state.kappa.get(n) {
            Some(k) => check(format!("kappa_{n} = 0"), k.is_zero(), if k.is_zero() { String::new() } else { k.to_string() }),
            None => check(format!("kappa_{n} = 0"), false, "not computed"),
        })
        .collect();
    Report::new("kappa", checks)
}

/// Weight grading of kappa_n, C_n and V_n, and the lambda-degree bound
/// deg C_n <= floor((n-1)/2).
pub fn grading(state: &EngineState, c: &[LambdaPoly]) -> Report {
    let mut checks = Vec::new();
    for n in 1..c.len() {
        checks.push(check(format!("C_{n} weight {n}"), c[n].is_homogeneous_of(n), ""));
        let deg = c[n].degree().unwrap_or(0);
        checks.push(check(format!("deg C_{n} <= {}", (n - 1) / 2), deg <= (n - 1) / 2, format!("degree {deg}")));
    }
    for (n, k) in state.kappa.iter().enumerate().skip(1) {
        checks.push(check(format!("kappa_{n} weight {n}"), k.is_homogeneous_of(n), ""));
    }
    for (n, v) in state.v.iter().enumerate() {
        let ok = v.iter().all(|(w, coeff)| w.ends_in_x1() && w.len() <= n && coeff.is_homogeneous_of(n - w.len()));
        checks.push(check(format!("V_{n} weight {n}"), ok, ""));
    }
    Report::new("grading", checks)
}

/// C_n(0) and C_n'(0) against the closed form, and their vanishing for
/// n in {1, 2, 4}.
pub fn closedform(c: &[LambdaPoly], prec: u32) -> Result<Report> {
    let w = c.len().saturating_sub(1);
    if w < 1 {
        return Err(Error::InvalidArgument("no coefficients to compare".into()));
    }
    let oracle = c0_c1_series(w)?;
    let mut checks = (1..=w)
        .into_par_iter()
        .map(|n| {
            let d0 = mzv_abs(&c[n].coeff(0).sub_ref(&oracle[n].0), prec)?;
            let d1 = mzv_abs(&c[n].coeff(1).sub_ref(&oracle[n].1), prec)?;
            Ok(check_dev(format!("C_{n}(0), C_{n}'(0)"), d0.max(d1), COEFF_TOL))
        })
        .collect::<Result<Vec<_>>>()?;
    for n in [1, 2, 4] {
        if n <= w {
            let zero = c[n].coeff(0).is_zero() && c[n].coeff(1).is_zero() && oracle[n].0.is_zero() && oracle[n].1.is_zero();
            checks.push(check(format!("C_{n}(0) = C_{n}'(0) = 0"), zero, ""));
        }
    }
    Ok(Report::new("closedform", checks))
}

/// The trigamma identity at z in {1/10, -1/7, 1/3 - 1/100}.
pub fn trigamma(prec: u32) -> Result<Report> {
    let zs = [q(1, 10), q(-1, 7), q(1, 3) - q(1, 100)];
    let checks = zs
        .par_iter()
        .map(|z| Ok(check_dev(format!("z = {z}"), trigamma_numeric_check(z, prec)?.abs_upper(), TRIGAMMA_TOL)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new("trigamma", checks))
}

const SAMPLE_DENOMS: [i64; 12] = [7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

/// A rational p/q with q an odd prime and q not dividing p, so that
/// neither z nor 2z is an integer.
pub fn sample_admissible(rng: &mut StdRng) -> Q {
    let d = SAMPLE_DENOMS[rng.gen_range(0..SAMPLE_DENOMS.len())];
    loop {
        let p = rng.gen_range(-3 * d..=3 * d);
        if p % d != 0 {
            return Q::new(BigInt::from(p), BigInt::from(d));
        }
    }
}

/// The WZ certificate for m <= `m_max` at `per_m` sampled points each.
pub fn wz(m_max: usize, per_m: usize, seed: u64) -> Result<Report> {
    let mut rng = StdRng::seed_from_u64(seed);
    let jobs: Vec<(usize, Q)> =
        (0..=m_max).flat_map(|m| (0..per_m).map(move |_| m)).map(|m| (m, sample_admissible(&mut rng))).collect();
    let checks = jobs
        .par_iter()
        .map(|(m, z)| Ok(check(format!("m = {m}, z = {z}"), wz_verify(*m, z)?, "")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new("wz", checks))
}

/// All words ending in x1 with length <= `max`, plus the empty word.
pub fn words_ending_x1(max: usize) -> Vec<Word> {
    let mut out = vec![Word::EMPTY];
    for len in 1..=max {
        for bits in 0..(1u64 << (len - 1)) {
            let mut x = Word::EMPTY;
            for i in (0..len - 1).rev() {
                x = x.push_back(if (bits >> i) & 1 == 1 { Letter::X1 } else { Letter::X0 });
            }
            out.push(x.push_back(Letter::X1));
        }
    }
    out
}

fn all_words(max: usize) -> Vec<Word> {
    let mut out = vec![Word::EMPTY];
    for len in 1..=max {
        for bits in 0..(1u64 << len) {
            let letters: Vec<Letter> =
                (0..len).map(|i| if (bits >> i) & 1 == 1 { Letter::X1 } else { Letter::X0 }).collect();
            out.push(Word::from_letters(&letters));
        }
    }
    out
}

/// Li_u(z) Li_v(1/z) = A + Li_alpha(z) + Li_beta(1/z) on the upper unit
/// circle for all u, v ending in x1 (or empty) of length <= `max_len`:
/// numerically for both routes to the constant, A real, the two routes
/// numerically equal, and A equal to the circle average of the product.
pub fn regularization(max_len: usize, prec: u32) -> Result<Report> {
    let words = words_ending_x1(max_len);
    let pairs: Vec<(Word, Word)> = words.iter().flat_map(|&u| words.iter().map(move |&v| (u, v))).collect();
    let results = pairs
        .par_iter()
        .map(|&(u, v)| Ok((alpha_beta(u, v, ARoute::Stuffle)?, alpha_beta(u, v, ARoute::Regularized)?)))
        .collect::<Result<Vec<_>>>()?;
    let a_num = results.par_iter().map(|(st, _)| st.a.numeric(prec)).collect::<Result<Vec<_>>>()?;
    // every word that occurs on either side, evaluated once per point
    let mut all: Vec<Word> = words.clone();
    for (st, _) in &results {
        all.extend(st.alpha.iter().map(|(w, _)| *w));
        all.extend(st.beta.iter().map(|(w, _)| *w));
    }
    all.sort();
    all.dedup();
    let table = |z: &CBall, qp: u32| -> Result<FxHashMap<Word, CBall>> {
        all.par_iter().map(|&w| Ok((w, li_word(w, z, qp)?))).collect()
    };
    let combine = |p: &WordPoly<MzvElem>, li: &FxHashMap<Word, CBall>| -> Result<CBall> {
        let mut acc = CBall::zero(prec);
        for (w, c) in p.sorted_terms() {
            acc = acc.add(&li[&w].mul(&c.numeric(prec)?));
        }
        Ok(acc)
    };
    let mut dev = vec![0.0f64; pairs.len()];
    for s in [q(1, 3), q(9, 10), q(5, 2)] {
        let z = circle_point(q_to_f64(&s), prec);
        let (lz, lzb) = (table(&z, prec)?, table(&z.conj(), prec)?);
        let devs = pairs
            .par_iter()
            .zip(&results)
            .zip(&a_num)
            .map(|((&(u, v), (st, _)), a)| {
                let lhs = lz[&u].mul(&lzb[&v]);
                let rhs = a.add(&combine(&st.alpha, &lz)?).add(&combine(&st.beta, &lzb)?);
                Ok(lhs.sub(&rhs).abs_upper())
            })
            .collect::<Result<Vec<_>>>()?;
        for (d, x) in dev.iter_mut().zip(devs) {
            *d = d.max(x);
        }
    }
    let mut checks = pairs
        .par_iter()
        .zip(&results)
        .zip(&a_num)
        .zip(&dev)
        .map(|((((u, v), (st, rg)), a), &d)| {
            let route_gap = a.sub(&rg.a.numeric(prec)?).abs_upper();
            // alpha carries A-constants, which the routes write in different symbols
            let gap = wordpoly_deviation(&st.alpha, &rg.alpha, prec)?.max(wordpoly_deviation(&st.beta, &rg.beta, prec)?);
            Ok(vec![
                check_dev(format!("identity ({u}, {v})"), d, REG_TOL),
                check(format!("A({u}, {v}) real"), !st.a.has_ip(), st.a.to_string()),
                check_dev(format!("A({u}, {v}) routes agree"), route_gap, REG_TOL),
                check_dev(format!("alpha({u}, {v}) routes agree"), gap, REG_TOL),
            ])
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    // one quadrature pass: the word values at each node, then all products
    let qprec = 128;
    let avgs = circle_average_many(
        |z| {
            let zb = z.conj();
            let lz = words.iter().map(|&w| li_word(w, z, qprec)).collect::<Result<Vec<_>>>()?;
            let lzb = words.iter().map(|&w| li_word(w, &zb, qprec)).collect::<Result<Vec<_>>>()?;
            Ok(lz.iter().flat_map(|x| lzb.iter().map(move |y| x.mul(y))).collect())
        },
        qprec,
    )?;
    for ((&(u, v), avg), a) in pairs.iter().zip(avgs).zip(&a_num) {
        checks.push(check_dev(format!("A({u}, {v}) by quadrature"), (a.re.mid_f64() - avg).abs(), QUAD_TOL));
    }
    Ok(Report::new("regularization", checks))
}

fn wordpoly_deviation(a: &WordPoly<MzvElem>, b: &WordPoly<MzvElem>, prec: u32) -> Result<f64> {
    let mut diff = a.clone();
    diff.add_assign(&b.mul_coeff(&MzvElem::one().neg_ref()));
    let mut dev = 0.0f64;
    for (_, c) in diff.iter() {
        dev = dev.max(mzv_abs(c, prec)?);
    }
    Ok(dev)
}

fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// E_n(x) = O(x^{2n+1}) exactly for n <= 8 and g'' + lambda e^{2x} g = 0
/// through x^10, lambda^4.
pub fn bessel() -> Report {
    let mut checks: Vec<Check> = (0..=8)
        .map(|n| {
            let e = bessel_en(n, 2 * n + 2);
            let ok = e.coeffs()[..=2 * n].iter().all(|c| c.is_zero()) && !e.coeff(2 * n + 1).is_zero();
            check(format!("E_{n} = O(x^{})", 2 * n + 1), ok, "")
        })
        .collect();
    let (wx, wl) = (12, 5);
    let g = bessel_expansion(wx, wl);
    let exp2x = exp_linear_coeffs(2, wx);
    let ok = (0..=10).all(|p| {
        let gpp = g.coeff(p + 2).mul_u64(((p + 2) * (p + 1)) as u64);
        let mut prod = LambdaPoly::zero();
        for i in 0..=p {
            prod.add_assign_ref(&g.coeff(i).scale(&exp2x[p - i]));
        }
        gpp.add_ref(&prod.shift(1)).truncate_degree(4).is_zero()
    });
    checks.push(check("g'' + lambda e^(2x) g = 0 through x^10, lambda^4", ok, ""));
    Report::new("bessel", checks)
}

/// Shuffle algebra axioms, grading, coefficient mass, composition round
/// trip, Li multiplicativity at z = 1/2, the circle-average lemma and the
/// duality zeta(x0 x1 x1) = zeta(x0 x0 x1).
pub fn properties(prec: u32) -> Result<Report> {
    let mut checks = Vec::new();
    let ws = all_words(3);
    let mut comm = true;
    let mut graded = true;
    let mut mass = true;
    let mut conv = true;
    for &u in &ws {
        for &v in &ws {
            let s = shuffle(u, v);
            comm &= s == shuffle(v, u);
            graded &= s.all_words(|x| x.len() == u.len() + v.len());
            let total: BigInt = s.iter().map(|(_, c)| c.clone()).sum();
            mass &= total == crate::ring::binomial((u.len() + v.len()) as u32, u.len() as u32);
            if u.is_convergent() && v.is_convergent() {
                conv &= s.all_words(|x| x.is_convergent());
            }
        }
    }
    let small = all_words(2);
    let mut assoc = true;
    for &a in &small {
        for &b in &small {
            for &c in &small {
                let l = shuffle(a, b).shuffle(&WordPoly::from_word(c));
                let r = WordPoly::from_word(a).shuffle(&shuffle(b, c));
                assoc &= l == r;
            }
        }
    }
    checks.push(check("shuffle commutative", comm, ""));
    checks.push(check("shuffle associative", assoc, ""));
    checks.push(check("shuffle graded", graded, ""));
    checks.push(check("shuffle coefficient mass is binomial", mass, ""));
    checks.push(check("shuffle of convergent words is convergent", conv, ""));
    let round = words_ending_x1(6)
        .into_iter()
        .filter(|w| !w.is_empty())
        .all(|w| w.to_composition().and_then(|m| Word::from_composition(&m)).is_ok_and(|x| x == w));
    checks.push(check("composition round trip", round, ""));

    let half = CBall::real(crate::numeval::Ball::from_q(&q(1, 2), prec));
    let mut dev = 0.0f64;
    for &u in &ws {
        for &v in &ws {
            if u.len() + v.len() > 3 {
                continue;
            }
            let lhs = li_numeric(&shuffle(u, v), &half, prec)?;
            let rhs = li_word(u, &half, prec)?.mul(&li_word(v, &half, prec)?);
            dev = dev.max(lhs.sub(&rhs).abs_upper());
        }
    }
    checks.push(check_dev("Li multiplicative at z = 1/2", dev, REG_TOL));

    let conv_words: Vec<Word> = words_ending_x1(3).into_iter().filter(|w| w.is_convergent()).collect();
    let avgs = circle_average_many(|z| conv_words.iter().map(|&w| li_word(w, z, 64)).collect(), 64)?;
    let worst = avgs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    checks.push(check_dev("circle average of Li_w vanishes", worst, QUAD_TOL));

    let d = mzv_numeric(Word::parse("011")?, prec)?.sub(&mzv_numeric(Word::parse("001")?, prec)?);
    checks.push(check_dev("duality zeta(011) = zeta(001)", d.abs_upper(), COEFF_TOL));
    Ok(Report::new("properties", checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine;

    #[test]
    fn reports_on_small_run() {
        let state = engine::run(6).unwrap();
        let c = state.c_coefficients().unwrap();
        assert!(table1(&c, 6, 192).unwrap().passed);
        assert!(closedform(&c, 192).unwrap().passed);
        assert!(kappa_vanishing(&state).passed);
        assert!(grading(&state, &c).passed);
        assert!(table2(&state).unwrap().passed);
        // V_4 needs an engine run through weight 5
        let t2 = table2(&engine::run(3).unwrap()).unwrap();
        assert_eq!(t2.failures().map(|c| c.name.as_str()).collect::<Vec<_>>(), vec!["V_3", "V_4"]);
    }

    #[test]
    fn detects_wrong_coefficients() {
        let state = engine::run(5).unwrap();
        let mut c = state.c_coefficients().unwrap();
        c[5] = c[5].add_ref(&LambdaPoly::rational(q(1, 1000)));
        let r = table1(&c, 5, 128).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failures().map(|c| c.name.as_str()).collect::<Vec<_>>(), vec!["C_5"]);
        assert!(!closedform(&c, 128).unwrap().passed);
    }

    #[test]
    fn sampled_points_are_admissible() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let z = sample_admissible(&mut rng);
            assert!(!(z.clone() * qi(2)).is_integer());
        }
        assert!(wz(3, 2, 1).unwrap().passed);
    }

    #[test]
    fn bessel_suite() {
        assert!(bessel().passed);
    }
}
