//! Exact symbolic series for the special functions of the problem: Nielsen
//! words, the 1/N expansion of the Schwarz-Christoffel map F_N, the Bessel
//! expansion around a zero of J0, and the gamma-ratio series.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mzvalg::{LambdaPoly, MzvElem};
use crate::numeval::{gamma_ball, Ball};
use crate::ring::{q, qi, QAlgebra, Q};
use crate::series::TruncSeries;
use crate::words::{Word, WordPoly};

/// Harmonic numbers H_n^{(s)} = sum_{j<=n} 1/j^s as exact rationals.
#[derive(Clone, Debug)]
pub struct HarmonicCache {
    order: u32,
    values: Vec<Q>,
}

impl HarmonicCache {
    /// H_0..H_bound of order `s` (s = 1 gives the ordinary numbers).
    pub fn with_order(bound: usize, s: u32) -> Self {
        let mut values = Vec::with_capacity(bound + 1);
        let mut h = qi(0);
        values.push(h.clone());
        for j in 1..=bound {
            h += Q::new(BigInt::from(1), BigInt::from(j).pow(s));
            values.push(h.clone());
        }
        HarmonicCache { order: s, values }
    }

    pub fn new(bound: usize) -> Self {
        Self::with_order(bound, 1)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bound(&self) -> usize {
        self.values.len() - 1
    }

    /// H_n; panics beyond the bound the cache was built with.
    pub fn get(&self, n: usize) -> &Q {
        &self.values[n]
    }
}

/// x0^n x1^p, the word of the Nielsen polylogarithm S_{n,p}.
pub fn nielsen_word(n: usize, p: usize) -> Word {
    Word::x0_pow(n).concat(Word::x1_pow(p))
}

/// S_n = sum_{j=1}^{n-1} (-1)^{j-1} 2^{n-j} S_{j,n-j}.
pub fn s_n(n: usize) -> Result<WordPoly<Q>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("S_n is defined for n >= 2, got {n}")));
    }
    Ok(WordPoly::from_terms((1..n).map(|j| {
        let c = BigInt::from(2).pow((n - j) as u32);
        let c = if j % 2 == 1 { c } else { -c };
        (nielsen_word(j, n - j), Q::from_integer(c))
    })))
}

/// F_N(z) = 1 + sum_{n>=2} S_n(z) N^{-n}, as a series in 1/N whose
/// coefficients multiply by shuffle.
pub fn fn_series(w: usize) -> Result<TruncSeries<WordPoly<Q>>> {
    if w < 2 {
        return Err(Error::InvalidArgument(format!("truncation must be at least 2, got {w}")));
    }
    let mut f = TruncSeries::one(w);
    for n in 2..=w {
        f.set_coeff(n, s_n(n)?);
    }
    Ok(f)
}

/// log F_N(z) in 1/N with Li-products resolved by shuffle.
pub fn log_fn_series(w: usize) -> Result<TruncSeries<WordPoly<Q>>> {
    fn_series(w)?.log()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Taylor coefficients through x^w of
/// E_n(x) = sum_j e^{2jx} (x + H_{n-j} - H_j) / (j!^2 (n-j)!^2).
pub fn bessel_en(n: usize, w: usize) -> TruncSeries<Q> {
    let h = HarmonicCache::new(n);
    let mut coeffs = vec![qi(0); w + 1];
    for j in 0..=n {
        let norm = factorial(j) * factorial(n - j);
        let norm = Q::from_integer(&norm * &norm);
        let shift = h.get(n - j) - h.get(j);
        // e^{2jx} = sum_p (2j)^p x^p / p!
        let mut e = vec![qi(1)];
        for p in 1..=w {
            let prev = e[p - 1].clone();
            e.push(prev * qi(2 * j as i64) / qi(p as i64));
        }
        for p in 0..=w {
            let mut c = &shift * &e[p];
            if p >= 1 {
                c += &e[p - 1];
            }
            coeffs[p] += c / &norm;
        }
    }
    TruncSeries::from_coeffs(coeffs, w)
}

/// g(x) = sum_{n<=w_lambda} (-lambda/4)^n E_n(x) through x^{w_x}, so that
/// -J0(a e^x)/(a J1(a)) = g(x) with lambda = a^2.
pub fn bessel_expansion(w_x: usize, w_lambda: usize) -> TruncSeries<LambdaPoly> {
    let en: Vec<TruncSeries<Q>> = (0..=w_lambda).into_par_iter().map(|n| bessel_en(n, w_x)).collect();
    let coeffs = (0..=w_x)
        .map(|p| {
            let mut c = Vec::with_capacity(w_lambda + 1);
            let mut f = qi(1);
            for e in &en {
                c.push(MzvElem::rational(e.coeff(p) * &f));
                f *= q(-1, 4);
            }
            LambdaPoly::from_coeffs(c)
        })
        .collect();
    TruncSeries::from_coeffs(coeffs, w_x)
}

/// exp(sum_{k>=1} zeta(2k+1) 4(4^k - 1) z^{2k+1} / (2k+1)), the expansion of
/// Gamma(1+z)^2 Gamma(1-2z) / (Gamma(1-z)^2 Gamma(1+2z)).
pub fn gamma_ratio_series(w: usize) -> Result<TruncSeries<MzvElem>> {
    let mut f = TruncSeries::zero(w);
    for k in 1.. {
        let d = 2 * k + 1;
        if d > w {
            break;
        }
        let c = Q::new(BigInt::from(4) * (BigInt::from(4).pow(k as u32) - 1), BigInt::from(d));
        f.set_coeff(d, MzvElem::zeta(Word::from_composition(&[d as u32])?).scale(&c));
    }
    f.exp()
}

/// c_N = sqrt(Gamma(1-1/N)^2 Gamma(1+2/N) / (Gamma(1+1/N)^2 Gamma(1-2/N))).
pub fn schwarz_constant(n: u64, prec: u32) -> Result<Ball> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("c_N needs N >= 3, got {n}")));
    }
    let g = |a: i64| gamma_ball(&Ball::from_q(&q(n as i64 + a, n as i64), prec));
    let num = g(-1)?.sqr().mul(&g(2)?);
    let den = g(1)?.sqr().mul(&g(-2)?);
    num.div(&den)?.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;
    use crate::words::shuffle;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn wp(terms: &[(&str, i64)]) -> WordPoly<Q> {
        WordPoly::from_terms(terms.iter().map(|&(s, c)| (w(s), qi(c))))
    }

    #[test]
    fn harmonic_numbers() {
        let h = HarmonicCache::new(4);
        assert_eq!(h.get(0), &qi(0));
        assert_eq!(h.get(4), &q(25, 12));
        let h2 = HarmonicCache::with_order(3, 2);
        assert_eq!(h2.get(3), &q(49, 36));
    }

    #[test]
    fn nielsen_words() {
        assert_eq!(nielsen_word(1, 1), w("01"));
        assert_eq!(nielsen_word(2, 1), w("001"));
        assert_eq!(nielsen_word(1, 2), w("011"));
    }

    #[test]
    fn s_n_examples() {
        assert_eq!(s_n(2).unwrap(), wp(&[("01", 2)]));
        assert_eq!(s_n(3).unwrap(), wp(&[("011", 4), ("001", -2)]));
        assert_eq!(s_n(4).unwrap(), wp(&[("0111", 8), ("0011", -4), ("0001", 2)]));
        assert!(s_n(1).is_err());
        for n in 2..=16 {
            let s = s_n(n).unwrap();
            assert!(s.all_words(|x| x.is_convergent() && x.len() == n));
        }
    }

    #[test]
    fn log_fn_low_orders() {
        let l = log_fn_series(6).unwrap();
        assert!(l.coeff(0).is_empty() && l.coeff(1).is_empty());
        assert_eq!(l.coeff(2), &s_n(2).unwrap());
        assert_eq!(l.coeff(3), &s_n(3).unwrap());
        let sq = shuffle(w("01"), w("01")).map_coeffs(|c| Q::from_integer(c.clone()));
        let mut expect = s_n(4).unwrap();
        expect.add_assign(&sq.scale(&qi(-2)));
        assert_eq!(l.coeff(4), &expect);
        for n in 2..=6 {
            assert!(l.coeff(n).all_words(|x| x.len() == n && x.is_convergent()));
        }
    }

    #[test]
    fn bessel_en_examples() {
        let e0 = bessel_en(0, 6);
        assert_eq!(e0, TruncSeries::from_coeffs(vec![qi(0), qi(1)], 6));
        let e1 = bessel_en(1, 4);
        assert_eq!(e1.coeffs(), &[qi(0), qi(0), qi(0), q(2, 3), q(2, 3)]);
        // the order property, checked exactly
        for n in 0..=8 {
            let e = bessel_en(n, 2 * n + 3);
            assert!(e.coeffs()[..=2 * n].iter().all(|c| c == &qi(0)), "E_{n}");
            assert_ne!(e.coeff(2 * n + 1), &qi(0), "E_{n}");
        }
    }

    #[test]
    fn bessel_expansion_solves_ode() {
        // g'' + lambda e^{2x} g = 0 through x^10, lambda^4
        let (wx, wl) = (12, 5);
        let g = bessel_expansion(wx, wl);
        assert!(g.coeff(0).is_zero());
        assert_eq!(g.coeff(1), &LambdaPoly::one());
        assert_eq!(g.coeff(3).coeff(1), MzvElem::rational(q(-1, 6)));
        let exp2x: Vec<Q> = crate::series::exp_linear_coeffs(2, wx);
        for p in 0..=10 {
            let gpp = g.coeff(p + 2).mul_u64(((p + 2) * (p + 1)) as u64);
            let mut prod = LambdaPoly::zero();
            for i in 0..=p {
                prod.add_assign_ref(&g.coeff(i).scale(&exp2x[p - i]));
            }
            let total = gpp.add_ref(&prod.shift(1)).truncate_degree(4);
            assert!(total.is_zero(), "x^{p}: {total}");
        }
    }

    #[test]
    fn gamma_ratio_coefficients() {
        let g = gamma_ratio_series(12).unwrap();
        let z3 = MzvElem::zeta_comp(&[3]);
        assert_eq!(g.coeff(3), &z3.scale(&qi(4)));
        assert_eq!(g.coeff(5), &MzvElem::zeta_comp(&[5]).scale(&qi(12)));
        assert_eq!(g.coeff(6), &z3.mul_ref(&z3).scale(&qi(8)));
        assert!(g.coeff(1).is_zero() && g.coeff(2).is_zero());
        // even degrees vanish only below 6; z^6 = 8 zeta(3)^2 is a product term
        assert!(g.coeff(4).is_zero());
        for k in 0..=12 {
            assert!(g.coeff(k).is_homogeneous_of(k));
        }
    }

    #[test]
    fn schwarz_constant_values() {
        let prec = 128;
        let g = |x: Q| gamma_ball(&Ball::from_q(&x, prec)).unwrap();
        // N = 4 directly from the defining gamma values
        let direct = g(q(3, 4)).sqr().mul(&g(q(3, 2))).div(&g(q(5, 4)).sqr().mul(&g(q(1, 2)))).unwrap().sqrt().unwrap();
        assert!(schwarz_constant(4, prec).unwrap().overlaps(&direct));
        // c_N^2 is the reciprocal of the gamma-ratio series: c_N ~ 1 - 2 zeta(3) / N^3
        let c = schwarz_constant(1000, prec).unwrap().mid_f64();
        assert!(((c - 1.0) * 1e9 + 2.0 * 1.2020569031595942).abs() < 1e-2, "{c}");
        assert!(schwarz_constant(2, prec).is_err());
    }
}
