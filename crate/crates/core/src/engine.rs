//! Order-by-order solution of the boundary condition in powers of 1/N.
//!
//! With a0 = c_N/(lambda^{1/2} J1(lambda^{1/2})) the Dirichlet condition on
//! |z| = 1 becomes, after dividing by c_N,
//!
//!   g(kappa/2 + log|F_N(z)|) - (1/N) re int_0^z V(t) K(z,t) dt/t = 0,
//!
//! where g(x) = sum_n (-lambda/4)^n E_n(x) and kappa = sum kappa_i N^{-i}.
//! Everything is a series in eps = 1/N whose eps^r coefficient has total
//! weight r. At order k+1 the unknowns kappa_{k+1} and V_k enter linearly
//! as kappa_{k+1}/2 - re Li_{x0 v_k}(z); the remaining known part is a
//! combination of re Li_u(z) Li_v(zbar), which [`polyreg::harmonic_solve`]
//! splits into a constant and a holomorphic part.

use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::kernels::{bessel_expansion, gamma_ratio_series, log_fn_series, s_n};
use crate::mzvalg::{LambdaPoly, MzvElem};
use crate::polyreg::harmonic_solve;
use crate::ring::{q, qi, QAlgebra, Ring, Q};
use crate::series::TruncSeries;
use crate::words::{shuffle_words, PairPoly, Word, WordPoly};

/// coeff * Li_u(z) * Li_v(zbar) on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTerm {
    pub u: Word,
    pub v: Word,
    pub coeff: LambdaPoly,
}

impl BoundaryTerm {
    pub fn weight(&self) -> Option<usize> {
        homogeneous_weight(&self.coeff).map(|k| k + self.u.len() + self.v.len())
    }
}

/// coeff * Li_u(zbar) Li_v(z) Li_w(t) log^m(z/t).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTerm {
    pub u: Word,
    pub v: Word,
    pub w: Word,
    pub m: u32,
    pub coeff: LambdaPoly,
}

/// MZV weight shared by all lambda-coefficients, or `None` if mixed. The
/// zero polynomial reports `None` as well.
fn homogeneous_weight(p: &LambdaPoly) -> Option<usize> {
    let mut weight = None;
    for c in p.coeffs() {
        for (m, _) in c.terms() {
            match weight {
                None => weight = Some(m.weight()),
                Some(k) if k != m.weight() => return None,
                _ => {}
            }
        }
    }
    weight
}

type KernelKey = (Word, Word, Word, u32);

/// Linear combination of kernel monomials Li_u(zbar) Li_v(z) Li_w(t)
/// log^m(z/t); the product is the slot-wise shuffle with m additive.
#[derive(Clone, PartialEq)]
pub struct KernelPoly<R> {
    terms: FxHashMap<KernelKey, R>,
}

impl<R: Ring> Default for KernelPoly<R> {
    fn default() -> Self {
        KernelPoly { terms: FxHashMap::default() }
    }
}

impl<R: Ring> std::fmt::Debug for KernelPoly<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.sorted_terms()).finish()
    }
}

impl<R: Ring> KernelPoly<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(key: KernelKey, c: R) -> Self {
        let mut p = Self::new();
        p.add_term(key, c);
        p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: KernelKey, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&KernelKey, &R)> {
        self.terms.iter()
    }

    pub fn sorted_terms(&self) -> Vec<(KernelKey, &R)> {
        let mut v: Vec<(KernelKey, &R)> = self.terms.iter().map(|(k, c)| (*k, c)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> KernelPoly<S> {
        let mut out = KernelPoly::new();
        for (k, c) in self.terms.iter() {
            out.add_term(*k, f(c));
        }
        out
    }

    fn product(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for ((u1, v1, w1, m1), a) in self.terms.iter() {
            for ((u2, v2, w2, m2), b) in other.terms.iter() {
                let ab = a.mul_ref(b);
                let su = shuffle_words(*u1, *u2);
                let sv = shuffle_words(*v1, *v2);
                let sw = shuffle_words(*w1, *w2);
                for &(u, mu) in su.iter() {
                    for &(v, mv) in sv.iter() {
                        for &(w, mw) in sw.iter() {
                            let m = mu * mv * mw;
                            out.add_term((u, v, w, m1 + m2), if m == 1 { ab.clone() } else { ab.mul_u64(m) });
                        }
                    }
                }
            }
        }
        out
    }
}

impl<R: Ring> Ring for KernelPoly<R> {
    fn zero() -> Self {
        Self::new()
    }
    fn one() -> Self {
        Self::term((Word::EMPTY, Word::EMPTY, Word::EMPTY, 0), R::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (k, c) in other.terms.iter() {
            self.add_term(*k, c.clone());
        }
    }
    fn neg_ref(&self) -> Self {
        self.map_coeffs(|c| c.neg_ref())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.product(other)
    }
    fn mul_u64(&self, n: u64) -> Self {
        self.map_coeffs(|c| c.mul_u64(n))
    }
}

impl<R: QAlgebra> QAlgebra for KernelPoly<R> {
    fn from_q(x: Q) -> Self {
        Self::term((Word::EMPTY, Word::EMPTY, Word::EMPTY, 0), R::from_q(x))
    }
    fn scale(&self, x: &Q) -> Self {
        self.map_coeffs(|c| c.scale(x))
    }
}

/// kappa and V after solving through some order. `kappa[n]` is kappa_n and
/// `v[n]` is the word combination of V_n; index 0 holds kappa_0 = 0 and
/// V_0 = 0. `order` is the highest n with kappa_n known.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineState {
    pub kappa: Vec<LambdaPoly>,
    pub v: Vec<WordPoly<LambdaPoly>>,
    pub order: usize,
}

impl EngineState {
    fn new() -> Self {
        EngineState { kappa: vec![LambdaPoly::zero()], v: Vec::new(), order: 0 }
    }

    /// C_0..C_order, with C_0 = 1.
    pub fn c_coefficients(&self) -> Result<Vec<LambdaPoly>> {
        cn_from_kappa(&self.kappa)
    }
}

/// The recursion with everything that does not depend on kappa or V
/// precomputed through a fixed maximal weight.
pub struct Engine {
    max_weight: usize,
    /// Taylor coefficients in x of g(x), as polynomials in lambda.
    g: Vec<LambdaPoly>,
    /// x_pows[i][r] is the eps^r coefficient of X^i, X = log|F_N(z)|.
    x_pows: Vec<Vec<PairPoly<Q>>>,
    /// p[n][r] is the eps^r coefficient of (F_N(zbar) D)^n / n!^2 with
    /// D = F_N(z) - (t/z)^{1/N} F_N(t).
    p: Vec<Vec<KernelPoly<Q>>>,
    /// Kernel coefficients K_j, filled as kappa becomes known.
    kernel: Vec<Arc<KernelPoly<LambdaPoly>>>,
    state: EngineState,
}

fn series_product<R: Ring>(a: &[R], b: &[R], w: usize) -> Vec<R> {
    let mut out = vec![R::zero(); w + 1];
    for (i, x) in a.iter().enumerate().take(w + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(w + 1 - i) {
            if !y.is_zero() {
                out[i + j].add_assign_ref(&x.mul_ref(y));
            }
        }
    }
    out
}

fn series_product_par<R: Ring>(a: &[R], b: &[R], w: usize) -> Vec<R> {
    (0..=w)
        .into_par_iter()
        .map(|r| {
            let mut acc = R::zero();
            for i in 0..=r.min(a.len().saturating_sub(1)) {
                if r - i < b.len() && !a[i].is_zero() && !b[r - i].is_zero() {
                    acc.add_assign_ref(&a[i].mul_ref(&b[r - i]));
                }
            }
            acc
        })
        .collect()
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

impl Engine {
    pub fn new(max_weight: usize) -> Result<Self> {
        if max_weight < 1 {
            return Err(Error::InvalidArgument("max_weight must be at least 1".into()));
        }
        let w = max_weight;
        let ws = w.max(2);
        // x = O(eps), and E_n = O(x^{2n+1})
        let g = bessel_expansion(w, w.saturating_sub(1) / 2).coeffs().to_vec();

        let log_f = log_fn_series(ws)?;
        let mut x_series = vec![PairPoly::new(); w + 1];
        for (r, xr) in x_series.iter_mut().enumerate().skip(2) {
            for (word, c) in log_f.coeff(r).iter() {
                let h = c.scale(&q(1, 2));
                xr.add_term_ref(*word, Word::EMPTY, &h);
                xr.add_term_ref(Word::EMPTY, *word, &h);
            }
        }
        let mut x_pows = vec![{
            let mut one = vec![PairPoly::new(); w + 1];
            one[0] = PairPoly::one();
            one
        }];
        for i in 1..=w / 2 {
            let next = series_product_par(&x_pows[i - 1], &x_series, w);
            x_pows.push(next);
        }

        let p = Self::kernel_powers(w)?;
        Ok(Engine { max_weight: w, g, x_pows, p, kernel: Vec::new(), state: EngineState::new() })
    }

    fn kernel_powers(w: usize) -> Result<Vec<Vec<KernelPoly<Q>>>> {
        let ws = w.max(2);
        let s: Vec<WordPoly<Q>> = (0..=ws)
            .map(|n| match n {
                0 => Ok(WordPoly::from_word(Word::EMPTY)),
                1 => Ok(WordPoly::new()),
                _ => s_n(n),
            })
            .collect::<Result<_>>()?;
        let e = Word::EMPTY;
        // F_N(zbar) D, eps-graded
        let mut fbar = vec![KernelPoly::new(); w + 1];
        let mut d = vec![KernelPoly::new(); w + 1];
        for n in 0..=w {
            for (word, c) in s[n].iter() {
                fbar[n].add_term((*word, e, e, 0), c.clone());
                d[n].add_term((e, *word, e, 0), c.clone());
            }
            // (t/z)^{1/N} F_N(t) = sum_m (-1)^m log^m(z/t)/m! eps^m * F_N(t)
            for m in 0..=n {
                let sign = if m % 2 == 0 { qi(-1) } else { qi(1) };
                let c0 = sign / Q::from_integer(factorial(m as u32));
                for (word, c) in s[n - m].iter() {
                    d[n].add_term((e, e, *word, m as u32), &c0 * c);
                }
            }
        }
        let fd = series_product(&fbar, &d, w);
        let mut out = vec![{
            let mut one = vec![KernelPoly::new(); w + 1];
            one[0] = KernelPoly::one();
            one
        }];
        let mut pow = out[0].clone();
        for n in 1..=w {
            pow = series_product_par(&pow, &fd, w);
            let f = Q::from_integer(factorial(n as u32).pow(2));
            out.push(pow.iter().map(|x| x.scale(&(qi(1) / &f))).collect());
        }
        Ok(out)
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn into_state(self) -> EngineState {
        self.state
    }

    /// kappa/2 as an eps-series, with kappa_n = 0 beyond the known order.
    fn half_kappa(&self) -> TruncSeries<LambdaPoly> {
        let w = self.max_weight;
        let mut k = TruncSeries::zero(w);
        for (n, c) in self.state.kappa.iter().enumerate().take(w + 1) {
            k.set_coeff(n, c.scale(&q(1, 2)));
        }
        k
    }

    /// The eps^r coefficient of g(kappa/2 + X) on the circle, with the
    /// unknown kappa_r left out.
    pub fn expand_j0_term(&self, r: usize) -> Result<Vec<BoundaryTerm>> {
        Ok(pairs_to_terms(&self.j0_part(r)?))
    }

    fn j0_part(&self, r: usize) -> Result<PairPoly<LambdaPoly>> {
        self.check_order(r)?;
        let w = self.max_weight;
        let hk = self.half_kappa();
        // powers of kappa/2
        let mut kp = vec![TruncSeries::one(w)];
        for j in 1..self.g.len() {
            let next = kp[j - 1].mul(&hk)?;
            kp.push(next);
        }
        let mut out = PairPoly::new();
        for (i, xi) in self.x_pows.iter().enumerate() {
            // h_i = sum_p g_p binom(p, i) (kappa/2)^{p-i}
            let mut binom = BigInt::from(1);
            let mut h = TruncSeries::<LambdaPoly>::zero(w);
            for p in i..self.g.len() {
                if p > i {
                    binom = binom * BigInt::from(p) / BigInt::from(p - i);
                }
                if !self.g[p].is_zero() {
                    let c = self.g[p].scale(&Q::from_integer(binom.clone()));
                    h = h.add(&kp[p - i].mul_scalar(&c))?;
                }
            }
            for (b, xb) in xi.iter().enumerate().take(r + 1) {
                let a = r - b;
                if xb.is_zero() || h.coeff(a).is_zero() {
                    continue;
                }
                let ha = h.coeff(a);
                for ((u, v), c) in xb.iter() {
                    out.add_term(*u, *v, ha.scale(c));
                }
            }
        }
        Ok(out)
    }

    fn check_order(&self, r: usize) -> Result<()> {
        if r > self.max_weight {
            return Err(Error::InvalidArgument(format!(
                "order {r} exceeds the engine's maximal weight {}",
                self.max_weight
            )));
        }
        Ok(())
    }

    /// K_j = sum_n (-lambda/4)^n [e^{n kappa}]_a [P_n]_b summed over
    /// a + b = j; needs kappa through j.
    fn kernel_coeff(&mut self, j: usize) -> Result<Arc<KernelPoly<LambdaPoly>>> {
        if j > self.state.order {
            return Err(Error::Precondition(format!("kernel order {j} needs kappa_{j}")));
        }
        while self.kernel.len() <= j {
            let jj = self.kernel.len();
            let k = self.compute_kernel(jj)?;
            self.kernel.push(Arc::new(k));
        }
        Ok(self.kernel[j].clone())
    }

    fn compute_kernel(&self, j: usize) -> Result<KernelPoly<LambdaPoly>> {
        let w = self.max_weight;
        let mut kappa = TruncSeries::zero(w);
        for (n, c) in self.state.kappa.iter().enumerate().take(j + 1) {
            kappa.set_coeff(n, c.clone());
        }
        let parts: Vec<KernelPoly<LambdaPoly>> = (0..=j.min(w))
            .into_par_iter()
            .map(|n| -> Result<KernelPoly<LambdaPoly>> {
                let e = kappa.scale(&qi(n as i64)).exp()?;
                let pre = LambdaPoly::monomial(n, MzvElem::rational(q(-1, 4).pow(n as i32)));
                let mut out = KernelPoly::new();
                for b in n..=j {
                    let ea = e.coeff(j - b);
                    if ea.is_zero() {
                        continue;
                    }
                    let c = pre.mul_ref(ea);
                    for (key, x) in self.p[n][b].iter() {
                        out.add_term(*key, c.scale(x));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut out = KernelPoly::new();
        for p in parts {
            out.add_assign_ref(&p);
        }
        Ok(out)
    }

    /// The eps^r kernel coefficient as a list of terms.
    pub fn expand_kernel(&mut self, r: usize) -> Result<Vec<KernelTerm>> {
        self.check_order(r)?;
        let k = self.kernel_coeff(r)?;
        Ok(k.sorted_terms()
            .into_iter()
            .map(|((u, v, w, m), c)| KernelTerm { u, v, w, m, coeff: c.clone() })
            .collect())
    }

    /// The eps^{k+1} coefficient of (1/N) int_0^z V(t) K(z,t) dt/t without
    /// the V_k term.
    fn integral_part(&mut self, k: usize) -> Result<PairPoly<LambdaPoly>> {
        let mut jobs = Vec::new();
        for i in 1..k {
            if self.state.v[i].is_empty() {
                continue;
            }
            jobs.push((i, self.kernel_coeff(k - i)?));
        }
        let v = &self.state.v;
        let parts: Vec<PairPoly<LambdaPoly>> = jobs
            .par_iter()
            .flat_map(|(i, kern)| {
                let groups = group_kernel(kern);
                groups.into_par_iter().map(move |((u, vw, m), wpoly)| convolve_group(&v[*i], u, vw, m, &wpoly))
            })
            .collect();
        let mut out = PairPoly::new();
        for p in parts {
            out.add_assign(&p);
        }
        Ok(out)
    }

    /// Solves the next order; returns the new kappa and v.
    pub fn step(&mut self) -> Result<(LambdaPoly, WordPoly<LambdaPoly>)> {
        let k = self.state.order;
        if k + 1 > self.max_weight {
            return Err(Error::InvalidArgument("engine already at its maximal weight".into()));
        }
        let mut b = self.j0_part(k + 1)?;
        let conv = self.integral_part(k)?;
        for ((u, v), c) in conv.iter() {
            b.sub_term_ref(*u, *v, c);
        }
        // re of the combination: average with the swapped slots
        let mut gamma = PairPoly::new();
        for ((u, v), c) in b.iter() {
            let h = c.scale(&q(-1, 2));
            gamma.add_term_ref(*u, *v, &h);
            gamma.add_term_ref(*v, *u, &h);
        }
        let (kappa, vk) = solve_order(k, &gamma)?;
        self.state.kappa.push(kappa.clone());
        self.state.v.push(vk.clone());
        self.state.order = k + 1;
        Ok((kappa, vk))
    }

    /// Runs every remaining order.
    pub fn run_to_end(&mut self) -> Result<()> {
        while self.state.order < self.max_weight {
            self.step()?;
        }
        Ok(())
    }
}

type KernelGroups = Vec<((Word, Word, u32), WordPoly<LambdaPoly>)>;

/// Kernel terms grouped by (u, v, m) with the t-words collected.
fn group_kernel(k: &KernelPoly<LambdaPoly>) -> KernelGroups {
    let mut groups: FxHashMap<(Word, Word, u32), WordPoly<LambdaPoly>> = FxHashMap::default();
    for ((u, v, w, m), c) in k.iter() {
        groups.entry((*u, *v, *m)).or_default().add_term_ref(*w, c);
    }
    let mut out: KernelGroups = groups.into_iter().collect();
    out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    out
}

/// int_0^z Li_u(zbar) Li_v(z) (sum_w c_w Li_w(t)) V(t) log^m(z/t) dt/t
///   = m! Li_u(zbar) Li_{v sh x0^{m+1} (w sh V)}(z).
fn convolve_group(
    vpoly: &WordPoly<LambdaPoly>,
    u: Word,
    v: Word,
    m: u32,
    wpoly: &WordPoly<LambdaPoly>,
) -> PairPoly<LambdaPoly> {
    let inner = wpoly.shuffle(vpoly).left_concat(Word::x0_pow(m as usize + 1));
    let inner = if m > 1 { inner.scale(&Q::from_integer(factorial(m))) } else { inner };
    let zpoly = if v.is_empty() { inner } else { inner.shuffle(&WordPoly::from_word(v)) };
    let mut out = PairPoly::new();
    for (word, c) in zpoly.into_terms() {
        out.add_term(word, u, c);
    }
    out
}

/// The contribution of one V-term and one kernel term to the boundary
/// equation (before the real part is taken), as terms Li_{z-word}(z)
/// Li_u(zbar).
pub fn convolve(v_word: Word, v_coeff: &LambdaPoly, k: &KernelTerm) -> Vec<BoundaryTerm> {
    let vpoly = WordPoly::term(v_word, v_coeff.clone());
    let wpoly = WordPoly::term(k.w, k.coeff.clone());
    pairs_to_terms(&convolve_group(&vpoly, k.u, k.v, k.m, &wpoly))
}

fn pairs_to_terms(p: &PairPoly<LambdaPoly>) -> Vec<BoundaryTerm> {
    p.sorted_terms().into_iter().map(|((u, v), c)| BoundaryTerm { u, v, coeff: c.clone() }).collect()
}

/// Given the order-(k+1) equation kappa_{k+1}/2 - re Li_{x0 v_k}(z)
/// - sum gamma re Li_u(z) Li_v(zbar) = 0 with `gamma` symmetric, returns
/// kappa_{k+1} = 2 sum gamma A and v_k with x0 v_k = -sum gamma (alpha + beta).
pub fn solve_order(k: usize, gamma: &PairPoly<LambdaPoly>) -> Result<(LambdaPoly, WordPoly<LambdaPoly>)> {
    for ((u, v), c) in gamma.iter() {
        if c.has_ip() {
            return Err(Error::Inconsistency(format!("boundary coefficient of ({u},{v}) is not real")));
        }
        match homogeneous_weight(c) {
            Some(wc) if wc + u.len() + v.len() == k + 1 => {}
            _ => {
                return Err(Error::Inconsistency(format!(
                    "boundary term ({u},{v}) with coefficient {c} is not of weight {}",
                    k + 1
                )))
            }
        }
    }
    let (a, ab) = harmonic_solve(gamma)?;
    if a.has_ip() {
        return Err(Error::Inconsistency(format!("order {}: constant has an ip part", k + 1)));
    }
    let kappa = a.mul_u64(2);
    let mut vk = WordPoly::new();
    for (w, c) in ab.sorted_terms() {
        if w.first() != Some(crate::words::Letter::X0) {
            return Err(Error::Inconsistency(format!("order {}: holomorphic part has word {w} not starting with x0", k + 1)));
        }
        vk.add_term(w.rest(), c.neg_ref());
    }
    Ok((kappa, vk))
}

/// kappa_1..kappa_W and v_0..v_{W-1}.
pub fn run(max_weight: usize) -> Result<EngineState> {
    let mut e = Engine::new(max_weight)?;
    e.run_to_end()?;
    Ok(e.into_state())
}

/// [`run`] on a dedicated pool of `threads` workers (all cores if `None`).
pub fn run_with_threads(max_weight: usize, threads: Option<usize>) -> Result<EngineState> {
    match threads {
        None => run(max_weight),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| run(max_weight))
        }
    }
}

/// C_0..C_W from kappa_0..kappa_W through
/// 1 + sum C_n z^n = exp(sum kappa_n z^n) * gamma_ratio_series(z).
pub fn cn_from_kappa(kappa: &[LambdaPoly]) -> Result<Vec<LambdaPoly>> {
    let w = kappa.len().saturating_sub(1);
    if kappa.first().is_some_and(|k| !k.is_zero()) {
        return Err(Error::Precondition("kappa_0 must be zero".into()));
    }
    let mut k = TruncSeries::zero(w);
    for (n, c) in kappa.iter().enumerate() {
        k.set_coeff(n, c.clone());
    }
    let g = gamma_ratio_series(w)?;
    let g = TruncSeries::from_coeffs(g.coeffs().iter().map(|c| LambdaPoly::constant(c.clone())).collect(), w);
    Ok(k.exp()?.mul(&g)?.coeffs().to_vec())
}
