//! Gamma, trigamma, Hurwitz zeta and Bessel J0/J1 on real balls.

use std::sync::LazyLock;

use parking_lot::RwLock;

use super::ball::{exp, log, pi, pow_real, Ball};
use crate::error::{Error, Result};
use crate::ring::{bernoulli_numbers, Q};

const GUARD: u32 = 40;

static BERNOULLI: LazyLock<RwLock<Vec<Q>>> = LazyLock::new(|| RwLock::new(Vec::new()));

/// B_0..=B_n, cached.
pub fn bernoulli(n: usize) -> Vec<Q> {
    {
        let b = BERNOULLI.read();
        if b.len() > n {
            return b[..=n].to_vec();
        }
    }
    let fresh = bernoulli_numbers(n.max(64).max(2 * BERNOULLI.read().len()));
    let mut b = BERNOULLI.write();
    if b.len() < fresh.len() {
        *b = fresh;
    }
    b[..=n].to_vec()
}

fn check_pole(x: &Ball) -> Result<()> {
    let m = x.mid_f64();
    if m < 0.5 {
        let n = m.round();
        if x.sub(&Ball::from_f64(n, x.prec())).contains_zero() {
            return Err(Error::Numeric(format!("pole at {n}")));
        }
    }
    Ok(())
}

/// Shift so that x + s >= target.
fn shift_for(x: &Ball, target: f64) -> u32 {
    (target - x.mid_f64()).ceil().max(0.0) as u32
}

/// sum_{k=1}^{kmax} c_k p y2^(k-1), stopped early at the first term below
/// one ulp; the first omitted term is added to the radius.
///
/// Each term is stepped from the previous one by the rational ratio
/// c_{k+1}/c_k, so that tiny powers of y2 never meet large coefficients
/// at absolute precision.
fn asymptotic_sum(p: &Ball, y2: &Ball, kmax: usize, c: impl Fn(usize) -> Q) -> Ball {
    let eps = super::ball::ulp(p.prec());
    let mut prev = c(1);
    let mut t = p.mul_q(&prev);
    let mut acc = Ball::zero(p.prec());
    for k in 1..=kmax {
        acc = acc.add(&t);
        let next = c(k + 1);
        t = t.mul(y2).mul_q(&(next.clone() / &prev));
        prev = next;
        if t.abs_upper() < eps {
            break;
        }
    }
    acc.with_rad(t.abs_upper())
}

/// Term budget for the Stirling-type series after a shift to 0.3 wp + 10;
/// the terms reach one ulp well before it.
fn asymptotic_terms(wp: u32) -> usize {
    (wp as usize / 2 + 16).min(400)
}

/// Gamma function on the real line.
pub fn gamma_ball(x: &Ball) -> Result<Ball> {
    check_pole(x)?;
    let prec = x.prec();
    let wp = prec + GUARD;
    let xw = x.to_prec(wp);
    let s = shift_for(&xw, 0.3 * wp as f64 + 10.0);
    let y = xw.add(&Ball::from_i64(s as i64, wp));
    // log Gamma(y) = (y - 1/2) log y - y + log(2 pi)/2 + sum B_2k / (2k(2k-1) y^(2k-1))
    let ly = log(&y)?;
    let mut lg = y.sub(&Ball::one(wp).mul_pow2(-1)).mul(&ly).sub(&y);
    lg = lg.add(&log(&pi(wp).mul_i64(2))?.mul_pow2(-1));
    let yi = y.inv()?;
    let kmax = asymptotic_terms(wp);
    let b = bernoulli(2 * kmax + 2);
    lg = lg.add(&asymptotic_sum(&yi, &yi.sqr(), kmax, |k| {
        b[2 * k].clone() / Q::from_integer(((2 * k) * (2 * k - 1)).into())
    }));
    // undo the shift in log space so exp never sees the large log Gamma(y);
    // partial products are flushed before they leave f64 range
    let mut p = Ball::one(wp);
    let mut negative = false;
    for j in 0..s {
        let f = xw.add(&Ball::from_i64(j as i64, wp));
        let f = if f.is_negative() {
            negative = !negative;
            f.neg()
        } else {
            f
        };
        p = p.mul(&f);
        if p.abs_upper() > 1e200 {
            lg = lg.sub(&log(&p)?);
            p = Ball::one(wp);
        }
    }
    lg = lg.sub(&log(&p)?);
    let g = if negative { exp(&lg).neg() } else { exp(&lg) };
    Ok(g.to_prec(prec))
}

/// Trigamma psi_1(x) = sum_{n >= 0} 1/(x + n)^2.
pub fn trigamma_ball(x: &Ball) -> Result<Ball> {
    check_pole(x)?;
    let prec = x.prec();
    let wp = prec + GUARD;
    let xw = x.to_prec(wp);
    let s = shift_for(&xw, 0.3 * wp as f64 + 10.0);
    let mut acc = Ball::zero(wp);
    for j in 0..s {
        acc = acc.add(&xw.add(&Ball::from_i64(j as i64, wp)).sqr().inv()?);
    }
    let y = xw.add(&Ball::from_i64(s as i64, wp));
    let yi = y.inv()?;
    let y2 = yi.sqr();
    // psi_1(y) = 1/y + 1/(2y^2) + sum_k B_2k / y^(2k+1); the error is below
    // the first omitted term.
    acc = acc.add(&yi).add(&y2.mul_pow2(-1));
    let kmax = asymptotic_terms(wp);
    let b = bernoulli(2 * kmax + 2);
    acc = acc.add(&asymptotic_sum(&yi.mul(&y2), &y2, kmax, |k| b[2 * k].clone()));
    Ok(acc.to_prec(prec))
}

/// Hurwitz zeta(s, a) = sum_{k >= 0} (a + k)^-s for real s > 1, a > 0,
/// by Euler-Maclaurin summation.
pub fn hurwitz_zeta(s: &Ball, a: &Ball) -> Result<Ball> {
    hurwitz_zeta_inner(s, a, None)
}

/// a^s zeta(s, a), which stays of order one when s is large.
pub fn hurwitz_zeta_scaled(s: &Ball, a: &Ball) -> Result<Ball> {
    hurwitz_zeta_inner(s, a, Some(a))
}

fn hurwitz_zeta_inner(s: &Ball, a: &Ball, scale: Option<&Ball>) -> Result<Ball> {
    let prec = s.prec();
    if !s.sub(&Ball::one(prec)).is_positive() || !a.is_positive() {
        return Err(Error::InvalidArgument("hurwitz_zeta needs s > 1 and a > 0".into()));
    }
    let wp = prec + GUARD;
    let (s, a) = (s.to_prec(wp), a.to_prec(wp));
    let sigma = s.mid_f64();
    let two_pi = 2.0 * std::f64::consts::PI;
    // Euler-Maclaurin terms shrink while s + 2j < 2 pi y; that window must
    // cover wp bits
    let target = (0.25 * wp as f64 + 10.0).max((sigma + wp as f64 * std::f64::consts::LN_2) / two_pi + 4.0);
    let n = shift_for(&a, target);
    let inv_scale = match scale {
        Some(c) => c.to_prec(wp).inv()?,
        None => Ball::one(wp),
    };
    let mut acc = Ball::zero(wp);
    for k in 0..n {
        let x = a.add(&Ball::from_i64(k as i64, wp)).mul(&inv_scale);
        acc = acc.add(&pow_real(&x, &s.neg())?);
    }
    let y = a.add(&Ball::from_i64(n as i64, wp));
    let ys = pow_real(&y.mul(&inv_scale), &s.neg())?;
    let log_ys = -sigma * y.mul(&inv_scale).mid_f64().ln();
    let one = Ball::one(wp);
    acc = acc.add(&ys.mul(&y).div(&s.sub(&one))?).add(&ys.mul_pow2(-1));
    let yi = y.inv()?;
    let y2 = yi.sqr();
    let ly = y.mid_f64().ln();
    // term_j = B_2j/(2j)! * (s)_(2j-1) * y^(-s-2j+1), each stepped from the
    // previous one so that no huge factor meets a tiny one
    let jmax = (wp as usize).max(64);
    let b = bernoulli(2 * jmax);
    let mut term = s.mul(&ys).mul(&yi).mul_q(&(b[2].clone() / Q::from_integer(2.into())));
    let log_eps = -(wp as f64) * std::f64::consts::LN_2;
    let mut log_poch = sigma.ln();
    for j in 1usize..jmax {
        acc = acc.add(&term);
        let ratio = b[2 * j + 2].clone() / (b[2 * j].clone() * Q::from_integer(((2 * j + 1) * (2 * j + 2)).into()));
        term = term
            .mul(&s.add(&Ball::from_i64(2 * j as i64 - 1, wp)))
            .mul(&s.add(&Ball::from_i64(2 * j as i64, wp)))
            .mul(&y2)
            .mul_q(&ratio);
        log_poch += (sigma + 2.0 * j as f64 - 1.0).ln() + (sigma + 2.0 * j as f64).ln();
        // |R_j| <= 4 |(s)_(2j)| / (2 pi)^(2j) * y^(-s-2j+1) / (s + 2j - 1), in logs
        let log_bound = 4f64.ln() + log_poch - (sigma + 2.0 * j as f64).ln() - 2.0 * j as f64 * two_pi.ln()
            + log_ys
            + (1.0 - 2.0 * j as f64) * ly
            - (sigma + 2.0 * j as f64 - 1.0).ln();
        if log_bound < log_eps {
            acc = acc.with_rad(log_bound.exp() * 1.01);
            return Ok(acc.to_prec(prec));
        }
    }
    Err(Error::Numeric("hurwitz_zeta did not converge".into()))
}

fn bessel_series(x: &Ball, order: u32) -> Ball {
    let prec = x.prec();
    let xm = x.mid_f64().abs();
    let wp = prec + GUARD + (2.0 * xm) as u32;
    let xw = x.mid_ball().to_prec(wp);
    let q = xw.sqr().mul_pow2(-2).neg();
    let mut term = if order == 0 { Ball::one(wp) } else { xw.mul_pow2(-1) };
    let mut sum = term.clone();
    let qa = q.abs_upper();
    let eps = super::ball::ulp(wp);
    let mut k = 1i64;
    loop {
        term = term.mul(&q).div_i64(k * (k + order as i64));
        sum = sum.add(&term);
        let ratio = qa / ((k + 1) as f64 * (k + 1 + order as i64) as f64);
        if ratio <= 0.5 && term.abs_upper() < eps {
            sum = sum.with_rad(2.0 * term.abs_upper() * ratio);
            break;
        }
        k += 1;
    }
    // |J_n'| <= 1 on the real line
    sum.to_prec(prec).with_rad(x.rad())
}

/// Bessel J0 on the real line.
pub fn j0_ball(x: &Ball) -> Ball {
    bessel_series(x, 0)
}

/// Bessel J1 on the real line.
pub fn j1_ball(x: &Ball) -> Ball {
    bessel_series(x, 1)
}

/// The m-th positive zero j_{0,m} of J0.
pub fn bessel_j0_zero(m: u32, prec: u32) -> Result<Ball> {
    if m == 0 {
        return Err(Error::InvalidArgument("zeros are numbered from 1".into()));
    }
    let wp = prec + 64;
    let beta = (m as f64 - 0.25) * std::f64::consts::PI;
    let guess = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta.powi(3));
    let mut x = Ball::from_f64(guess, wp);
    let target = super::ball::ulp(prec + 8);
    for _ in 0..200 {
        let step = j0_ball(&x).div(&j1_ball(&x))?.mid_ball();
        x = x.add(&step).mid_ball();
        if step.abs_upper() < target {
            break;
        }
    }
    let delta = Ball::one(wp).mul_pow2(-(prec as i64) + 2);
    let lo = j0_ball(&x.sub(&delta));
    let hi = j0_ball(&x.add(&delta));
    let bracketed = (lo.is_positive() && hi.is_negative()) || (lo.is_negative() && hi.is_positive());
    if !bracketed {
        return Err(Error::Numeric(format!("could not certify the zero j_(0,{m})")));
    }
    if (x.mid_f64() - guess).abs() > 1.0 {
        return Err(Error::Numeric(format!("Newton iteration left the neighbourhood of j_(0,{m})")));
    }
    Ok(x.to_prec(prec).with_rad(delta.mid_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::q;

    #[test]
    fn gamma_values() {
        let g = gamma_ball(&Ball::from_q(&q(1, 2), 200)).unwrap();
        let sqrt_pi = pi(200).sqrt().unwrap();
        assert!(g.overlaps(&sqrt_pi));
        assert_eq!(g.to_string_digits(10), "1.7724538509");
        assert!(g.rad() < 1e-50);
        let g5 = gamma_ball(&Ball::from_i64(5, 128)).unwrap();
        assert!(g5.overlaps(&Ball::from_i64(24, 128)));
        // Gamma(-1/2) = -2 sqrt(pi)
        let gm = gamma_ball(&Ball::from_q(&q(-1, 2), 128)).unwrap();
        assert!(gm.overlaps(&pi(128).sqrt().unwrap().mul_i64(-2)));
        assert!(gamma_ball(&Ball::from_i64(-2, 64)).is_err());
        assert!(gamma_ball(&Ball::from_i64(0, 64)).is_err());
    }

    #[test]
    fn high_precision_radii() {
        // the shift product passes f64 range here
        for prec in [512u32, 768] {
            let g = gamma_ball(&Ball::from_q(&q(1, 2), prec)).unwrap();
            assert!(g.overlaps(&pi(prec).sqrt().unwrap()));
            assert!(g.rad() < super::super::ball::ulp(prec - 16), "{prec}: {:e}", g.rad());
            let gm = gamma_ball(&Ball::from_q(&q(-7, 2), prec)).unwrap();
            // Gamma(-7/2) = 16 sqrt(pi) / 105
            assert!(gm.overlaps(&pi(prec).sqrt().unwrap().mul_i64(16).div_i64(105)));
            let t = trigamma_ball(&Ball::one(prec)).unwrap();
            assert!(t.overlaps(&pi(prec).sqr().div_i64(6)));
            assert!(t.rad() < super::super::ball::ulp(prec - 16), "{prec}: {:e}", t.rad());
        }
    }

    #[test]
    fn gamma_recurrence() {
        let x = Ball::from_q(&q(1, 3), 160);
        let g1 = gamma_ball(&x.add(&Ball::one(160))).unwrap();
        let g0 = gamma_ball(&x).unwrap();
        let resid = g1.sub(&g0.mul(&x));
        assert!(resid.contains_zero());
        assert!(resid.rad() < 1e-40);
    }

    #[test]
    fn trigamma_values() {
        let t = trigamma_ball(&Ball::one(200)).unwrap();
        assert_eq!(t.to_string_digits(10), "1.6449340668");
        let z2 = pi(200).sqr().div_i64(6);
        assert!(t.overlaps(&z2));
        // psi_1(1/2) = pi^2 / 2
        let h = trigamma_ball(&Ball::from_q(&q(1, 2), 200)).unwrap();
        assert!(h.overlaps(&pi(200).sqr().mul_pow2(-1)));
        assert!(trigamma_ball(&Ball::from_i64(-3, 64)).is_err());
    }

    #[test]
    fn hurwitz_values() {
        let s = Ball::from_i64(3, 160);
        let z = hurwitz_zeta(&s, &Ball::one(160)).unwrap();
        let z3 = super::super::polylog::mzv_numeric(crate::words::Word::parse("001").unwrap(), 160).unwrap();
        assert!(z.overlaps(&z3));
        assert!(z.rad() < 1e-35);
        // zeta(2, 1/2) = 3 zeta(2) = pi^2 / 2
        let h = hurwitz_zeta(&Ball::from_i64(2, 160), &Ball::from_q(&q(1, 2), 160)).unwrap();
        assert!(h.overlaps(&pi(160).sqr().mul_pow2(-1)));
        // zeta(s, a) - zeta(s, a + 1) = a^-s
        let s = Ball::from_q(&q(23, 5), 160);
        let a = Ball::from_q(&q(2001, 1), 160);
        let d = hurwitz_zeta(&s, &a).unwrap().sub(&hurwitz_zeta(&s, &a.add(&Ball::one(160))).unwrap());
        assert!(d.overlaps(&pow_real(&a, &s.neg()).unwrap()));
    }

    #[test]
    fn bessel_zeros() {
        let j1 = bessel_j0_zero(1, 128).unwrap();
        assert_eq!(j1.to_string_digits(10), "2.4048255577");
        assert!(j0_ball(&j1).contains_zero());
        let j2 = bessel_j0_zero(2, 128).unwrap();
        assert_eq!(j2.to_string_digits(10), "5.5200781103");
        let j5 = bessel_j0_zero(5, 128).unwrap();
        assert_eq!(j5.to_string_digits(6), "14.930918");
        // J1(x) ~ x/2 near 0 and J0(0) = 1
        assert!(j0_ball(&Ball::zero(64)).overlaps(&Ball::one(64)));
        let j1v = j1_ball(&Ball::from_i64(1, 128));
        assert_eq!(j1v.to_string_digits(12), "0.440050585745");
    }
}
