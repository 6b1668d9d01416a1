//! Shuffle regularization at z = 1 and the decomposition
//! Li_u(z) Li_v(1/z) = A_{u,v} + Li_alpha(z) + Li_beta(1/z).
//!
//! Two independent routes produce A_{u,v}:
//! - [`ARoute::Regularized`] evaluates both sides at z -> 1 along the unit
//!   circle using [`reg_at_one`];
//! - [`ARoute::Stuffle`] uses A_{u,v} = sum_n c_n(u) c_n(v) where c_n are the
//!   Taylor coefficients of Li_u, Li_v (the circle average of the product),
//!   which is a sum of zeta values given by the quasi-shuffle product.
//!
//! The two agree numerically. The stuffle route is exactly real and makes
//! A_{u', x0 v'} = A_{x0 u', v'} hold symbolically, so the engine uses it.

use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::mzvalg::{LambdaPoly, MzvElem};
use crate::ring::{QAlgebra, Ring, Q};
use crate::words::{Letter, PairPoly, Word, WordPoly};

/// Li_w = sum_j Li_{parts[j]} Li_1^j with every part convergent (or the
/// empty word, which only occurs for w = x1^k).
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub parts: Vec<WordPoly<Q>>,
}

impl Decomposition {
    /// sum_j parts[j] shuffled with x1^{shuffle j}; equals the input word.
    pub fn reconstruct(&self) -> WordPoly<Q> {
        let mut acc = WordPoly::new();
        let mut x1pow: WordPoly<Q> = WordPoly::from_word(Word::EMPTY);
        let x1 = WordPoly::from_word(Word::x1());
        for p in &self.parts {
            acc.add_assign(&p.shuffle(&x1pow));
            x1pow = x1pow.shuffle(&x1);
        }
        acc
    }
}

type DecompCache = RwLock<FxHashMap<Word, Arc<Decomposition>>>;
static DECOMP_CACHE: LazyLock<DecompCache> = LazyLock::new(|| RwLock::new(FxHashMap::default()));

fn add_parts(acc: &mut Vec<WordPoly<Q>>, parts: &[WordPoly<Q>], shift: usize, c: &Q) {
    if acc.len() < parts.len() + shift {
        acc.resize(parts.len() + shift, WordPoly::new());
    }
    for (j, p) in parts.iter().enumerate() {
        acc[j + shift].add_assign(&p.scale(c));
    }
}

/// Canonical decomposition of a word ending in x1 (or the empty word).
pub fn decompose(w: Word) -> Result<Arc<Decomposition>> {
    if !w.is_empty() && !w.ends_in_x1() {
        return Err(Error::Precondition(format!("decompose needs a word ending in x1, got {w}")));
    }
    Ok(decompose_unchecked(w))
}

pub(crate) fn decompose_unchecked(w: Word) -> Arc<Decomposition> {
    if let Some(d) = DECOMP_CACHE.read().get(&w) {
        return d.clone();
    }
    let k = w.leading_x1();
    let d = if k == 0 {
        Decomposition { parts: vec![WordPoly::from_word(w)] }
    } else {
        // x1 ш x1^{k-1} v = k x1^k v + T, where T collects the insertions of
        // x1 strictly inside v (fewer leading x1's).
        let (_, u) = w.split_at(1);
        let (_, v) = w.split_at(k);
        let kq = Q::from_integer(k.into());
        let inv_k = Q::one() / &kq;
        let mut parts: Vec<WordPoly<Q>> = Vec::new();
        let du = decompose_unchecked(u);
        add_parts(&mut parts, &du.parts, 1, &inv_k);
        let prefix = Word::x1_pow(k - 1);
        for i in 1..=v.len() {
            let (h, t) = v.split_at(i);
            let tw = prefix.concat(h).push_back(Letter::X1).concat(t);
            let dt = decompose_unchecked(tw);
            add_parts(&mut parts, &dt.parts, 0, &(-&inv_k));
        }
        while parts.last().is_some_and(|p| p.is_empty()) {
            parts.pop();
        }
        Decomposition { parts }
    };
    let d = Arc::new(d);
    DECOMP_CACHE.write().insert(w, d.clone());
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// zeta of a rational word combination; zeta(e) = 1.
pub fn zeta_of(p: &WordPoly<Q>) -> MzvElem {
    let mut acc = MzvElem::zero();
    for (w, c) in p.iter() {
        let z = if w.is_empty() { MzvElem::one() } else { MzvElem::zeta(*w) };
        acc.add_assign_ref(&z.scale(c));
    }
    acc
}

/// sum_j zeta(w_j) (+-ip)^j, the value of Li_w at z -> 1 along the circle
/// from above (+) or below (-).
pub fn reg_at_one(w: Word, sign: Sign) -> Result<MzvElem> {
    let d = decompose(w)?;
    let ipv = match sign {
        Sign::Plus => MzvElem::ip(),
        Sign::Minus => MzvElem::ip().neg_ref(),
    };
    let mut acc = MzvElem::zero();
    let mut pw = MzvElem::one();
    for p in &d.parts {
        acc.add_assign_ref(&zeta_of(p).mul_ref(&pw));
        pw = pw.mul_ref(&ipv);
    }
    Ok(acc)
}

/// Linear extension of [`reg_at_one`] to combinations with MZV coefficients.
pub fn reg_poly(p: &WordPoly<MzvElem>, sign: Sign) -> Result<MzvElem> {
    let mut acc = MzvElem::zero();
    for (w, c) in p.iter() {
        acc.add_assign_ref(&reg_at_one(*w, sign)?.mul_ref(c));
    }
    Ok(acc)
}

/// Quasi-shuffle (stuffle) product of compositions, as (composition, count).
pub fn stuffle(a: &[u32], b: &[u32]) -> Vec<(Vec<u32>, u64)> {
    let mut memo: FxHashMap<(usize, usize), Vec<(Vec<u32>, u64)>> = FxHashMap::default();
    let mut out = stuffle_rec(a, b, &mut memo);
    out.sort();
    out
}

fn stuffle_rec(
    a: &[u32],
    b: &[u32],
    memo: &mut FxHashMap<(usize, usize), Vec<(Vec<u32>, u64)>>,
) -> Vec<(Vec<u32>, u64)> {
    if a.is_empty() {
        return vec![(b.to_vec(), 1)];
    }
    if b.is_empty() {
        return vec![(a.to_vec(), 1)];
    }
    if let Some(r) = memo.get(&(a.len(), b.len())) {
        return r.clone();
    }
    let (ra, la) = (&a[..a.len() - 1], a[a.len() - 1]);
    let (rb, lb) = (&b[..b.len() - 1], b[b.len() - 1]);
    let mut acc: FxHashMap<Vec<u32>, u64> = FxHashMap::default();
    for (mut c, n) in stuffle_rec(ra, b, memo) {
        c.push(la);
        *acc.entry(c).or_insert(0) += n;
    }
    for (mut c, n) in stuffle_rec(a, rb, memo) {
        c.push(lb);
        *acc.entry(c).or_insert(0) += n;
    }
    for (mut c, n) in stuffle_rec(ra, rb, memo) {
        c.push(la + lb);
        *acc.entry(c).or_insert(0) += n;
    }
    let v: Vec<(Vec<u32>, u64)> = acc.into_iter().collect();
    memo.insert((a.len(), b.len()), v.clone());
    v
}

static STUFFLE_A_CACHE: LazyLock<RwLock<FxHashMap<(Word, Word), MzvElem>>> =
    LazyLock::new(|| RwLock::new(FxHashMap::default()));

/// A_{u,v} = sum_{n>=1} c_n(u) c_n(v) for u, v ending in x1 or empty.
pub fn stuffle_a(u: Word, v: Word) -> MzvElem {
    if u.is_empty() || v.is_empty() {
        return if u.is_empty() && v.is_empty() { MzvElem::one() } else { MzvElem::zero() };
    }
    let key = if u <= v { (u, v) } else { (v, u) };
    if let Some(a) = STUFFLE_A_CACHE.read().get(&key) {
        return a.clone();
    }
    let m = u.to_composition().expect("word ends in x1");
    let n = v.to_composition().expect("word ends in x1");
    let (mr, ns) = (m[m.len() - 1], n[n.len() - 1]);
    let mut terms = Vec::new();
    for (mut c, k) in stuffle(&m[..m.len() - 1], &n[..n.len() - 1]) {
        c.push(mr + ns);
        let w = Word::from_composition(&c).expect("positive entries");
        terms.push((w, Q::from_integer(k.into())));
    }
    let a = zeta_of(&WordPoly::from_terms(terms));
    STUFFLE_A_CACHE.write().insert(key, a.clone());
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ARoute {
    Regularized,
    Stuffle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaBetaResult {
    pub alpha: WordPoly<MzvElem>,
    pub beta: WordPoly<MzvElem>,
    pub a: MzvElem,
}

type AlphaEntry = Arc<(WordPoly<MzvElem>, MzvElem)>;
type AlphaMemo = RwLock<FxHashMap<(ARoute, Word, Word), AlphaEntry>>;
static ALPHA_MEMO: LazyLock<AlphaMemo> = LazyLock::new(|| RwLock::new(FxHashMap::default()));

fn delta(l: Letter) -> i64 {
    match l {
        Letter::X1 => 1,
        Letter::X0 => -1,
    }
}

fn check_arg(w: Word) -> Result<()> {
    if w.is_empty() || w.ends_in_x1() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("alpha_beta needs words ending in x1, got {w}")))
    }
}

/// alpha(u, v) for nonempty u, v from the entries of the two shorter pairs.
fn alpha_part(u: Word, v: Word, route: ARoute) -> Result<WordPoly<MzvElem>> {
    let (a, ur) = (u.first().unwrap(), u.rest());
    let (b, vr) = (v.first().unwrap(), v.rest());
    let left = alpha_and_a(ur, v, route)?;
    let right = alpha_and_a(u, vr, route)?;
    let mut alpha = left.0.left_concat(Word::from_letters(&[a]));
    match b {
        Letter::X0 => alpha.add_assign(&right.0.left_concat(Word::x0()).neg_ref()),
        Letter::X1 => {
            alpha.add_assign(&right.0.left_concat(Word::x0()));
            alpha.add_assign(&right.0.left_concat(Word::x1()));
        }
    }
    let mut c = left.1.scale(&Q::from_integer(delta(a).into()));
    if b == Letter::X0 {
        c.add_assign_ref(&right.1);
    }
    alpha.add_term(Word::x1(), c);
    Ok(alpha)
}

/// alpha(u, v) and A_{u,v} for a single pair, memoized per route.
fn alpha_and_a(u: Word, v: Word, route: ARoute) -> Result<AlphaEntry> {
    if let Some(e) = ALPHA_MEMO.read().get(&(route, u, v)) {
        return Ok(e.clone());
    }
    let entry: (WordPoly<MzvElem>, MzvElem) = if u.is_empty() && v.is_empty() {
        (WordPoly::new(), MzvElem::one())
    } else if v.is_empty() {
        (WordPoly::from_word(u), MzvElem::zero())
    } else if u.is_empty() {
        (WordPoly::new(), MzvElem::zero())
    } else {
        let alpha = alpha_part(u, v, route)?;
        let a_val = match route {
            ARoute::Stuffle => stuffle_a(u, v),
            ARoute::Regularized => {
                let beta = alpha_part(v, u, route)?;
                let lhs = reg_at_one(u, Sign::Plus)?.mul_ref(&reg_at_one(v, Sign::Minus)?);
                let mut a_val = lhs.sub_ref(&reg_poly(&alpha, Sign::Plus)?);
                a_val.sub_assign_ref(&reg_poly(&beta, Sign::Minus)?);
                a_val
            }
        };
        (alpha, a_val)
    };
    let entry = Arc::new(entry);
    ALPHA_MEMO.write().insert((route, u, v), entry.clone());
    Ok(entry)
}

/// The decomposition of Li_u(z) Li_v(1/z), with beta(u,v) = alpha(v,u).
///
/// For the regularized route the constant is evaluated with the +
/// regularization for the z-slot and - for the 1/z-slot, except when all of
/// u, v, alpha, beta are convergent, where zeta values are used directly.
pub fn alpha_beta(u: Word, v: Word, route: ARoute) -> Result<AlphaBetaResult> {
    check_arg(u)?;
    check_arg(v)?;
    let ea = alpha_and_a(u, v, route)?;
    let eb = alpha_and_a(v, u, route)?;
    let res = AlphaBetaResult { alpha: ea.0.clone(), beta: eb.0.clone(), a: ea.1.clone() };
    if u.is_convergent() && v.is_convergent() && res.a.has_ip() && route == ARoute::Stuffle {
        return Err(Error::Inconsistency(format!("A({u},{v}) has a nonzero ip part")));
    }
    Ok(res)
}

/// Sum gamma_{u,v} A_{u,v} and sum gamma_{u,v} alpha(u,v) for a pair
/// polynomial, using stuffle-route constants.
///
/// The recursion for alpha is pushed through the whole combination at once:
/// alpha(P) = (terms with v = e) + x1 * (constants) + x0 alpha(Q0) + x1 alpha(Q1)
/// where Q0, Q1 have total length one less. Only the constants are memoized.
pub fn alpha_of_pairs(p: &PairPoly<LambdaPoly>) -> (LambdaPoly, WordPoly<LambdaPoly>) {
    let mut constant = LambdaPoly::zero();
    for ((u, v), c) in p.iter() {
        constant.add_assign_ref(&c.mul_mzv(&stuffle_a(*u, *v)));
    }
    (constant, push_alpha(p))
}

const PAR_THRESHOLD: usize = 64;

fn push_alpha(p: &PairPoly<LambdaPoly>) -> WordPoly<LambdaPoly> {
    if p.is_empty() {
        return WordPoly::new();
    }
    let mut result: WordPoly<LambdaPoly> = WordPoly::new();
    let mut q0: PairPoly<LambdaPoly> = PairPoly::new();
    let mut q1: PairPoly<LambdaPoly> = PairPoly::new();
    let mut xcoef = LambdaPoly::zero();
    for ((u, v), c) in p.sorted_terms() {
        if v.is_empty() {
            if !u.is_empty() {
                result.add_term_ref(u, c);
            }
            continue;
        }
        if u.is_empty() {
            continue;
        }
        let (a, ur) = (u.first().unwrap(), u.rest());
        let (b, vr) = (v.first().unwrap(), v.rest());
        match a {
            Letter::X0 => q0.add_term_ref(ur, v, c),
            Letter::X1 => q1.add_term_ref(ur, v, c),
        }
        match b {
            Letter::X0 => q0.sub_term_ref(u, vr, c),
            Letter::X1 => {
                q0.add_term_ref(u, vr, c);
                q1.add_term_ref(u, vr, c);
            }
        }
        let au = stuffle_a(ur, v);
        if !au.is_zero() {
            let s = if a == Letter::X1 { au } else { au.neg_ref() };
            xcoef.add_assign_ref(&c.mul_mzv(&s));
        }
        if b == Letter::X0 {
            let av = stuffle_a(u, vr);
            if !av.is_zero() {
                xcoef.add_assign_ref(&c.mul_mzv(&av));
            }
        }
    }
    result.add_term(Word::x1(), xcoef);
    let (r0, r1) = if q0.len() + q1.len() > PAR_THRESHOLD {
        rayon::join(|| push_alpha(&q0), || push_alpha(&q1))
    } else {
        (push_alpha(&q0), push_alpha(&q1))
    };
    result.add_assign(&r0.left_concat(Word::x0()));
    result.add_assign(&r1.left_concat(Word::x1()));
    result
}

/// Solution of the Dirichlet problem with boundary data
/// sum gamma_{u,v} re Li_u(z) Li_v(zbar): returns sum gamma A_{u,v} and
/// sum gamma (alpha(u,v) + beta(u,v)).
pub fn harmonic_solve(terms: &PairPoly<LambdaPoly>) -> Result<(LambdaPoly, WordPoly<LambdaPoly>)> {
    for ((u, v), _) in terms.iter() {
        for w in [u, v] {
            if !w.is_empty() && !w.is_convergent() {
                return Err(Error::Precondition(format!("boundary term with non-convergent word {w}")));
            }
        }
    }
    let (a, alpha) = alpha_of_pairs(terms);
    let (_, beta) = alpha_of_pairs(&terms.transpose());
    let mut sum = alpha;
    sum.add_assign(&beta);
    Ok((a, sum))
}

/// Convenience wrapper: A_{u,v} + alpha + beta for a single pair through the
/// push recursion (used to cross-check against [`alpha_beta`]).
pub fn alpha_beta_pushed(u: Word, v: Word) -> (MzvElem, WordPoly<MzvElem>, WordPoly<MzvElem>) {
    let p = PairPoly::term(u, v, LambdaPoly::one());
    let (a, alpha) = alpha_of_pairs(&p);
    let (_, beta) = alpha_of_pairs(&p.transpose());
    let down = |w: &WordPoly<LambdaPoly>| w.map_coeffs(|c| c.coeff(0));
    (a.coeff(0), down(&alpha), down(&beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{q, qi};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn all_words_ending_x1(max: usize) -> Vec<Word> {
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

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(w("01")).unwrap().parts, vec![WordPoly::from_word(w("01"))]);
        assert_eq!(decompose(w("1")).unwrap().parts, vec![WordPoly::new(), WordPoly::from_word(Word::EMPTY)]);
        assert_eq!(
            decompose(w("11")).unwrap().parts,
            vec![WordPoly::new(), WordPoly::new(), WordPoly::term(Word::EMPTY, q(1, 2))]
        );
        assert!(decompose(w("10")).is_err());
    }

    #[test]
    fn decompose_reconstructs_and_is_convergent() {
        for x in all_words_ending_x1(7) {
            let d = decompose(x).unwrap();
            assert_eq!(d.reconstruct(), WordPoly::from_word(x), "word {x}");
            for p in &d.parts {
                assert!(p.all_words(|y| y.is_empty() || y.is_convergent()), "word {x}");
            }
        }
    }

    #[test]
    fn reg_examples() {
        assert_eq!(reg_at_one(w("01"), Sign::Plus).unwrap(), MzvElem::zeta(w("01")));
        assert_eq!(reg_at_one(w("1"), Sign::Plus).unwrap(), MzvElem::ip());
        assert_eq!(reg_at_one(w("11"), Sign::Plus).unwrap(), MzvElem::zeta(w("01")).scale(&q(-3, 4)));
        assert_eq!(reg_at_one(w("1"), Sign::Minus).unwrap(), MzvElem::ip().neg_ref());
    }

    #[test]
    fn stuffle_small() {
        let s = stuffle(&[1], &[2]);
        assert_eq!(s, vec![(vec![1, 2], 1), (vec![2, 1], 1), (vec![3], 1)]);
        let t: u64 = stuffle(&[1, 1], &[1]).iter().filter(|(c, _)| c == &vec![1, 1, 1]).map(|x| x.1).sum();
        assert_eq!(t, 3);
    }

    #[test]
    fn alpha_beta_examples() {
        let r = alpha_beta(w("1"), Word::EMPTY, ARoute::Stuffle).unwrap();
        assert_eq!(r.alpha, WordPoly::from_word(w("1")));
        assert!(r.beta.is_empty());
        assert!(r.a.is_zero());

        let expect = WordPoly::from_terms([(w("01"), MzvElem::one()), (w("11"), MzvElem::one())]);
        for route in [ARoute::Stuffle, ARoute::Regularized] {
            let r = alpha_beta(w("1"), w("1"), route).unwrap();
            assert_eq!(r.alpha, expect);
            assert_eq!(r.beta, expect);
            assert_eq!(r.a, MzvElem::zeta(w("01")));
        }
        let r = alpha_beta(w("01"), w("01"), ARoute::Stuffle).unwrap();
        assert_eq!(r.a, MzvElem::zeta(w("0001")));
    }

    #[test]
    fn stuffle_a_shift_symmetry() {
        let ws = all_words_ending_x1(5);
        for &u in &ws {
            for &v in &ws {
                if u.is_empty() || v.is_empty() {
                    continue;
                }
                assert_eq!(stuffle_a(u, v.push_front(Letter::X0)), stuffle_a(u.push_front(Letter::X0), v));
                assert_eq!(stuffle_a(u, v), stuffle_a(v, u));
            }
        }
    }

    #[test]
    fn push_matches_memoized_recursion() {
        let ws = all_words_ending_x1(4);
        for &u in &ws {
            for &v in &ws {
                let r = alpha_beta(u, v, ARoute::Stuffle).unwrap();
                let (a, alpha, beta) = alpha_beta_pushed(u, v);
                assert_eq!(a, r.a, "({u},{v})");
                assert_eq!(alpha, r.alpha, "({u},{v})");
                assert_eq!(beta, r.beta, "({u},{v})");
            }
        }
    }

    #[test]
    fn convergent_inputs_give_convergent_alpha() {
        let ws: Vec<Word> = all_words_ending_x1(5).into_iter().filter(|x| x.is_convergent()).collect();
        for &u in &ws {
            for &v in &ws {
                let r = alpha_beta(u, v, ARoute::Stuffle).unwrap();
                assert!(r.alpha.all_words(|x| x.is_convergent()), "({u},{v}) {:?}", r.alpha);
                assert!(r.beta.all_words(|x| x.is_convergent()));
                assert!(!r.a.has_ip());
                assert!(r.a.is_homogeneous_of(u.len() + v.len()));
                let k = u.len() + v.len();
                for (x, c) in r.alpha.iter() {
                    assert!(c.is_homogeneous_of(k - x.len()));
                }
            }
        }
    }

    #[test]
    fn harmonic_solve_examples() {
        let one = LambdaPoly::one();
        let (c, b) = harmonic_solve(&PairPoly::term(Word::EMPTY, Word::EMPTY, one.clone())).unwrap();
        assert_eq!(c, one);
        assert!(b.is_empty());
        let (c, b) = harmonic_solve(&PairPoly::term(w("01"), Word::EMPTY, one.clone())).unwrap();
        assert!(c.is_zero());
        assert_eq!(b, WordPoly::from_word(w("01")).map_coeffs(|_: &Q| one.clone()));
        let (c, _) = harmonic_solve(&PairPoly::term(w("01"), w("01"), LambdaPoly::rational(qi(3)))).unwrap();
        assert_eq!(c, LambdaPoly::constant(MzvElem::zeta(w("0001")).scale(&qi(3))));
        assert!(harmonic_solve(&PairPoly::term(w("1"), Word::EMPTY, one)).is_err());
    }
}
