//! Independent closed form for C_n(0) and C_n'(0):
//!
//!   sum_n (C_n(0) + C_n'(0) lambda) z^n = G(z) (1 - (lambda/2)(P(z) - 1)),
//!
//! with G(z) = Gamma(1+z)^2 Gamma(1-2z) / (Gamma(1-z)^2 Gamma(1+2z)) and
//! P(z) = sum_{n>=0} (2z)_n^2 z^3 / (n!^2 (z+n)^3) = G(z)(1 + Delta(z)),
//! Delta(z) = z^2 psi_1(1+z) - z^2 psi_1(1-z). Also the exact finite form
//! of the last identity with its telescoping certificate.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::gamma_ratio_series;
use crate::mzvalg::MzvElem;
use crate::numeval::special::bernoulli;
use crate::numeval::ball::pow_real;
use crate::numeval::{gamma_ball, hurwitz_zeta_scaled, trigamma_ball, Ball};
use crate::ring::{qi, QAlgebra, Ring, Q};
use crate::series::TruncSeries;
use crate::words::Word;

/// Polynomial in the odd zeta values; represented as an MZV expression
/// whose symbols are zeta(x0^{2k} x1).
pub type OddZetaPoly = MzvElem;

fn odd_zeta(n: usize) -> Result<MzvElem> {
    Ok(MzvElem::zeta(Word::from_composition(&[n as u32])?))
}

/// Delta(z) = -sum_{k>=1} 4k zeta(2k+1) z^{2k+1}.
pub fn delta_series(w: usize) -> Result<TruncSeries<OddZetaPoly>> {
    let mut d = TruncSeries::zero(w);
    for k in 1.. {
        let n = 2 * k + 1;
        if n > w {
            break;
        }
        d.set_coeff(n, odd_zeta(n)?.scale(&qi(-4 * k as i64)));
    }
    Ok(d)
}

/// P(z) = G(z)(1 + Delta(z)), the full Pochhammer sum including n = 0.
pub fn pochhammer_sum_series(w: usize) -> Result<TruncSeries<OddZetaPoly>> {
    let g = gamma_ratio_series(w)?;
    let one_plus = delta_series(w)?.add(&TruncSeries::one(w))?;
    g.mul(&one_plus)
}

/// (C_n(0), C_n'(0)) for n = 0..=w.
pub fn c0_c1_series(w: usize) -> Result<Vec<(OddZetaPoly, OddZetaPoly)>> {
    let g = gamma_ratio_series(w)?;
    let p1 = pochhammer_sum_series(w)?.sub(&TruncSeries::one(w))?;
    let lin = g.mul(&p1)?.scale(&Q::new((-1).into(), 2.into()));
    Ok((0..=w).map(|n| (g.coeff(n).clone(), lin.coeff(n).clone())).collect())
}

/// Rising factorial (x)_n.
fn poch(x: &Q, n: usize) -> Q {
    let mut acc = Q::one();
    for i in 0..n {
        acc *= x + Q::from_integer(BigInt::from(i));
    }
    acc
}

fn fact(n: usize) -> Q {
    Q::from_integer((1..=n).map(BigInt::from).product())
}

fn is_half_integer(z: &Q) -> bool {
    (z * qi(2)).is_integer()
}

fn check_wz_arg(z: &Q) -> Result<()> {
    if is_half_integer(z) {
        return Err(Error::InvalidArgument(format!("z = {z} lies in Z/2, where the identity has poles")));
    }
    Ok(())
}

/// Both sides of the finite trigamma identity at (m, z).
pub fn trigamma_finite_sides(m: usize, z: &Q) -> Result<(Q, Q)> {
    check_wz_arg(z)?;
    let two_z = z * qi(2);
    let mq = qi(m as i64);
    let mut lhs = Q::zero();
    for n in 0..=m {
        let nq = qi(n as i64);
        let t = poch(&two_z, n).pow(2) * z.pow(3) / (fact(n).pow(2) * (z + &nq).pow(3));
        let r = poch(&(qi(1) + &mq), n) * poch(&-&mq, n) / (poch(&(qi(1) + &two_z + &mq), n) * poch(&(&two_z - &mq), n));
        lhs += t * r;
    }
    let pref = poch(&(qi(1) + &two_z), m) * poch(&(qi(1) - z), m).pow(2)
        / (poch(&(qi(1) - &two_z), m) * poch(&(qi(1) + z), m).pow(2));
    let mut s = Q::one();
    for j in 1..=m {
        let jq = qi(j as i64);
        s += &jq * (&jq - &two_z) / (&jq - z).pow(2);
        s -= &jq * (&jq + &two_z) / (&jq + z).pow(2);
    }
    Ok((lhs, pref * s))
}

/// D_{n,m} times (n - m - 1) when `regularized`, which is finite at
/// n = m + 1 where D itself vanishes.
fn d_term(n: usize, m: usize, z: &Q, regularized: bool) -> Q {
    let two_z = z * qi(2);
    let mq = qi(m as i64);
    let nq = qi(n as i64);
    // (-m)_n = (-m)_{n-1} (n - 1 - m)
    let neg_m = if regularized {
        if n == 0 {
            return Q::zero();
        }
        poch(&-&mq, n - 1)
    } else {
        poch(&-&mq, n)
    };
    let a = -(z * (&mq - z).pow(2) * poch(&two_z, n).pow(2)) / (fact(n).pow(2) * (z + &nq) * &mq);
    let b = poch(&(qi(1) - &two_z), m) * poch(&(qi(1) + z), m).pow(2)
        / (poch(&(qi(1) + &two_z), m + n) * poch(&(qi(1) - z), m).pow(2));
    let c = poch(&mq, n) * neg_m / poch(&(&two_z - &mq), n + 1);
    a * b * c
}

fn d_nm(n: usize, m: usize, z: &Q) -> Q {
    d_term(n, m, z, false)
}

/// G_{n,m} = D_{n,m} R(n,m) with the (n - m - 1) factors cancelled.
fn g_nm(n: usize, m: usize, z: &Q) -> Q {
    let (mq, nq) = (qi(m as i64), qi(n as i64));
    // R(n,m) (n - m - 1)
    let num = nq.pow(2)
        * qi(2 * m as i64 + 1)
        * (z + &nq)
        * (&mq - &nq - z * qi(2))
        * (qi(2) * mq.pow(2) * z + (&mq + z).pow(2) - (&nq + z).pow(2) + &mq + &nq + z * qi(2));
    let den = qi(4) * mq.pow(2) * (&mq + qi(1)).pow(2) * (&mq - z).pow(2) * z;
    d_term(n, m, z, true) * num / den
}

/// Checks the finite trigamma identity, sum_n D_{n,m} = 1 and the
/// telescoping relation D_{n,m+1} - D_{n,m} = G_{n+1,m} - G_{n,m} for
/// 0 <= n <= m + 1, all in exact arithmetic.
pub fn wz_verify(m: usize, z: &Q) -> Result<bool> {
    let (lhs, rhs) = trigamma_finite_sides(m, z)?;
    if lhs != rhs {
        return Ok(false);
    }
    if m == 0 {
        return Ok(true);
    }
    let total: Q = (0..=m).map(|n| d_nm(n, m, z)).sum();
    if total != qi(1) {
        return Ok(false);
    }
    let telescopes = (0..=m + 1).all(|n| d_nm(n, m + 1, z) - d_nm(n, m, z) == g_nm(n + 1, m, z) - g_nm(n, m, z));
    Ok(telescopes && g_nm(0, m, z).is_zero() && g_nm(m + 2, m, z).is_zero())
}

/// [`wz_verify`] at several points in parallel; true iff all pass.
pub fn wz_verify_points(m: usize, zs: &[Q]) -> Result<bool> {
    let r: Vec<bool> = zs.par_iter().map(|z| wz_verify(m, z)).collect::<Result<_>>()?;
    Ok(r.into_iter().all(|x| x))
}

/// log2 of the index N0 where the tail expansion takes over. Its terms
/// shrink roughly like (2 pi N0 / k)^k, so the best reachable accuracy is
/// about 2 pi N0 nats; N0 = 64 covers 580 bits.
fn tail_log2(wp: u32) -> i64 {
    let mut l = 6;
    while 2.0 * std::f64::consts::PI * (1u64 << l) as f64 * std::f64::consts::LOG2_E < 1.5 * wp as f64 {
        l += 1;
    }
    l
}

/// sum_{n>=0} (2z)_n^2 z^3 / (n!^2 (z+n)^3) for |z| < 1/2.
///
/// Terms decay like n^{4z-5}, so the tail from n = N0 on is summed through
/// its asymptotic expansion t_n ~ C n^{-s} sum_k e_k n^{-k} as
/// C sum_k e_k zeta(s + k, N0), with N0 >= 64 growing with the precision. The truncation error of that divergent
/// expansion is estimated by the first omitted term.
pub fn pochhammer_sum_numeric(z: &Q, prec: u32) -> Result<Ball> {
    let wp = prec + 32;
    if z.is_zero() {
        return Ok(Ball::one(prec));
    }
    let zb = Ball::from_q(z, wp);
    if !(zb.abs_upper() < 0.5) {
        return Err(Error::InvalidArgument(format!("the Pochhammer sum needs |z| < 1/2, got {z}")));
    }
    let two_z = zb.mul_i64(2);
    let tail_log2 = tail_log2(wp);
    let tail_start = 1usize << tail_log2;
    // head
    let mut t = Ball::one(wp);
    let mut head = Ball::zero(wp);
    for n in 0..tail_start {
        head = head.add(&t);
        let nb = Ball::from_i64(n as i64, wp);
        let r1 = two_z.add(&nb).div_i64(n as i64 + 1);
        let r2 = zb.add(&nb).div(&zb.add(&nb).add(&Ball::one(wp)))?;
        t = t.mul(&r1.sqr()).mul(&r2.pow_u32(3));
    }
    // log t_n = log C - s log n + sum_k d_k n^{-k}
    let a = two_z.clone();
    let s = Ball::from_i64(5, wp).sub(&a.mul_i64(2));
    // budget for the tail terms to reach one ulp
    let kmax = (wp as usize * 2 / 5).max(80);
    let b = bernoulli(kmax + 2);
    let bern_poly = |m: usize, x: &Ball| -> Ball {
        let mut acc = Ball::zero(wp);
        let mut binom = BigInt::one();
        for j in 0..=m {
            if j > 0 {
                binom = binom * BigInt::from(m - j + 1) / BigInt::from(j);
            }
            let c = Q::from_integer(binom.clone()) * &b[j];
            acc = acc.add(&x.pow_u32((m - j) as u32).mul_q(&c));
        }
        acc
    };
    let one = Ball::one(wp);
    let mut d = vec![Ball::zero(wp); kmax + 1];
    for (k, dk) in d.iter_mut().enumerate().skip(1) {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let bdiff = bern_poly(k + 1, &a).sub(&bern_poly(k + 1, &one));
        let g = bdiff.mul_i64(2 * sign).div_i64((k * (k + 1)) as i64);
        let l = zb.pow_u32(k as u32).mul_i64(3 * sign).div_i64(k as i64);
        *dk = g.sub(&l);
    }
    let mut e = vec![Ball::one(wp)];
    for n in 1..=kmax {
        let mut acc = Ball::zero(wp);
        for k in 1..=n {
            acc = acc.add(&d[k].mul_i64(k as i64).mul(&e[n - k]));
        }
        e.push(acc.div_i64(n as i64));
    }
    let start = Ball::from_i64(tail_start as i64, wp);
    let eps = crate::numeval::ball::ulp(wp);
    let mut tail = Ball::zero(wp);
    let mut converged = false;
    for (k, ek) in e.iter().enumerate() {
        // e_k N0^(-k) times N0^(s+k) zeta(s + k, N0); N0^(-s) is applied once below
        let sk = s.add(&Ball::from_i64(k as i64, wp));
        let term = ek.mul_pow2(-(k as i64) * tail_log2).mul(&hurwitz_zeta_scaled(&sk, &start)?);
        tail = tail.add(&term);
        // stop once the term is at rounding level
        if !term.rad().is_finite() {
            return Err(Error::Numeric("tail expansion of the Pochhammer sum lost all precision".into()));
        }
        if k > 4 && term.abs_upper() < 64.0 * eps {
            tail = tail.with_rad(term.abs_upper());
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric("tail expansion of the Pochhammer sum did not converge".into()));
    }
    let tail = tail.mul(&pow_real(&start, &s.neg())?);
    let c = zb.pow_u32(3).div(&gamma_ball(&two_z)?.sqr())?;
    Ok(head.add(&tail.mul(&c)).to_prec(prec))
}

/// G(z)(1 + z^2 psi_1(1+z) - z^2 psi_1(1-z)) evaluated numerically.
pub fn trigamma_rhs_numeric(z: &Q, prec: u32) -> Result<Ball> {
    let wp = prec + 32;
    let zb = Ball::from_q(z, wp);
    let one = Ball::one(wp);
    let g = |x: Ball| gamma_ball(&x);
    let num = g(one.add(&zb))?.sqr().mul(&g(one.sub(&zb.mul_i64(2)))?);
    let den = g(one.sub(&zb))?.sqr().mul(&g(one.add(&zb.mul_i64(2)))?);
    let z2 = zb.sqr();
    let d = z2.mul(&trigamma_ball(&one.add(&zb))?.sub(&trigamma_ball(&one.sub(&zb))?));
    Ok(num.div(&den)?.mul(&one.add(&d)).to_prec(prec))
}

/// |P(z) - G(z)(1 + Delta(z))| as a ball.
pub fn trigamma_numeric_check(z: &Q, prec: u32) -> Result<Ball> {
    let lhs = pochhammer_sum_numeric(z, prec)?;
    let rhs = trigamma_rhs_numeric(z, prec)?;
    let r = lhs.sub(&rhs);
    Ok(if r.is_negative() { r.neg() } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::q;

    fn zeta(n: u32) -> MzvElem {
        MzvElem::zeta_comp(&[n])
    }

    #[test]
    fn delta_coefficients() {
        let d = delta_series(7).unwrap();
        assert_eq!(d.coeff(3), &zeta(3).scale(&qi(-4)));
        assert!(d.coeff(4).is_zero());
        assert_eq!(d.coeff(5), &zeta(5).scale(&qi(-8)));
        assert_eq!(d.coeff(7), &zeta(7).scale(&qi(-12)));
    }

    #[test]
    fn pochhammer_series_low_orders() {
        let p = pochhammer_sum_series(7).unwrap();
        assert_eq!(p.coeff(0), &MzvElem::one());
        assert!(p.coeff(1).is_zero() && p.coeff(2).is_zero() && p.coeff(3).is_zero());
        // n >= 1 terms ~ 4 z^5 / n^5
        assert_eq!(p.coeff(5), &zeta(5).scale(&qi(4)));
    }

    #[test]
    fn constant_and_linear_terms() {
        let c = c0_c1_series(9).unwrap();
        assert_eq!(c[3], (zeta(3).scale(&qi(4)), MzvElem::zero()));
        assert_eq!(c[5], (zeta(5).scale(&qi(12)), zeta(5).scale(&qi(-2))));
        let z3 = zeta(3);
        let expect9 = zeta(9).scale(&q(340, 3)).add_ref(&z3.mul_ref(&z3).mul_ref(&z3).scale(&q(32, 3)));
        assert_eq!(c[9].0, expect9);
        for n in [1, 2, 4] {
            assert!(c[n].0.is_zero() && c[n].1.is_zero(), "n = {n}");
        }
        for (n, (a, b)) in c.iter().enumerate() {
            assert!(a.is_homogeneous_of(n) && b.is_homogeneous_of(n));
        }
    }

    #[test]
    fn wz_examples() {
        assert!(wz_verify(0, &q(1, 3)).unwrap());
        assert_eq!(trigamma_finite_sides(0, &q(2, 7)).unwrap(), (qi(1), qi(1)));
        assert!(wz_verify(1, &q(1, 3)).unwrap());
        assert!(wz_verify(7, &q(3, 10)).unwrap());
        assert!(wz_verify(3, &q(1, 2)).is_err());
        assert!(wz_verify(3, &qi(2)).is_err());
    }

    #[test]
    fn wz_detects_a_wrong_certificate() {
        // a perturbed point on the D side must break the sum
        let z = q(3, 10);
        let total: Q = (0..=4).map(|n| d_nm(n, 4, &z)).sum();
        assert_eq!(total, qi(1));
        assert_ne!(d_nm(2, 5, &z) - d_nm(2, 4, &z), g_nm(2, 4, &z) - g_nm(2, 4, &z));
    }

    #[test]
    fn trigamma_identity_numeric() {
        for z in [q(1, 10), q(-1, 7), q(1, 3) - q(1, 100)] {
            let r = trigamma_numeric_check(&z, 192).unwrap();
            assert!(r.abs_upper() < 1e-30, "z = {z}: {}", r.abs_upper());
        }
        assert!(trigamma_numeric_check(&qi(0), 128).unwrap().abs_upper() < 1e-30);
    }
}
