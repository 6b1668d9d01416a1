//! Midpoint-radius arithmetic. A [`Ball`] holds a fixed-point midpoint
//! `mid * 2^-prec` and an `f64` radius that is always rounded upward, so the
//! true value lies in `[mid - rad, mid + rad]`.

use std::fmt;
use std::sync::LazyLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::ring::Q;

pub const MAX_PREC: u32 = 960;

/// Relative inflation applied after every floating-point radius operation.
const INFLATE: f64 = 1.0 + 8.0 * f64::EPSILON;

#[inline]
fn up(x: f64) -> f64 {
    x * INFLATE
}

/// 2^-prec as an f64 (exact for prec < 1074).
#[inline]
pub fn ulp(prec: u32) -> f64 {
    (-(prec as f64)).exp2()
}

fn bigint_to_f64_scaled(m: &BigInt, prec: u32) -> f64 {
    let bits = m.bits() as i64;
    if bits <= 60 {
        m.to_f64().unwrap() * ulp(prec)
    } else {
        let sh = bits - 60;
        let top = (m >> sh as usize).to_f64().unwrap();
        top * ((sh - prec as i64) as f64).exp2()
    }
}

#[derive(Clone, PartialEq)]
pub struct Ball {
    mid: BigInt,
    rad: f64,
    prec: u32,
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} +/- {:.3e}", self.to_string_digits(20), self.rad)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((-self.rad.log10()).floor().max(1.0) as usize).min(self.prec as usize * 3 / 10);
        write!(f, "{}", self.to_string_digits(digits))
    }
}

impl Ball {
    pub fn zero(prec: u32) -> Ball {
        assert!(prec <= MAX_PREC, "precision above {MAX_PREC} bits");
        Ball { mid: BigInt::zero(), rad: 0.0, prec }
    }

    pub fn from_i64(x: i64, prec: u32) -> Ball {
        let mut b = Ball::zero(prec);
        b.mid = BigInt::from(x) << prec as usize;
        b
    }

    pub fn one(prec: u32) -> Ball {
        Ball::from_i64(1, prec)
    }

    pub fn from_q(x: &Q, prec: u32) -> Ball {
        let num: BigInt = x.numer().clone() << prec as usize;
        let (qt, r) = num.div_rem(x.denom());
        let mut b = Ball::zero(prec);
        b.mid = qt;
        if !r.is_zero() {
            b.rad = ulp(prec);
        }
        b
    }

    /// Exact conversion when representable, otherwise rounded with a 1-ulp radius.
    pub fn from_f64(x: f64, prec: u32) -> Ball {
        assert!(x.is_finite());
        let mut b = Ball::zero(prec);
        if x == 0.0 {
            return b;
        }
        let (m, e) = frexp_i64(x);
        let shift = e + prec as i64;
        if shift >= 0 {
            b.mid = BigInt::from(m) << shift as usize;
        } else {
            let s = (-shift) as u32;
            if s >= 64 {
                b.mid = BigInt::zero();
            } else {
                b.mid = BigInt::from(m >> s);
            }
            b.rad = ulp(prec);
        }
        b
    }

    pub fn with_rad(mut self, r: f64) -> Ball {
        self.rad = up(self.rad + r);
        self
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn mid_f64(&self) -> f64 {
        bigint_to_f64_scaled(&self.mid, self.prec)
    }

    /// Midpoint as a point ball.
    pub fn mid_ball(&self) -> Ball {
        Ball { mid: self.mid.clone(), rad: 0.0, prec: self.prec }
    }

    /// Upper bound for |x| over the ball.
    pub fn abs_upper(&self) -> f64 {
        up(up(bigint_to_f64_scaled(&self.mid.abs(), self.prec)) + self.rad)
    }

    /// Lower bound for |x| over the ball (0 if it contains zero).
    pub fn abs_lower(&self) -> f64 {
        let m = bigint_to_f64_scaled(&self.mid.abs(), self.prec) / INFLATE;
        (m - self.rad).max(0.0) / INFLATE
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower() == 0.0
    }

    pub fn is_positive(&self) -> bool {
        self.mid.sign() == Sign::Plus && !self.contains_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mid.sign() == Sign::Minus && !self.contains_zero()
    }

    /// Whether the two balls intersect.
    pub fn overlaps(&self, other: &Ball) -> bool {
        self.sub(other).contains_zero()
    }

    /// Whether `other` lies inside `self`.
    pub fn contains(&self, other: &Ball) -> bool {
        let d = self.sub_mid(other);
        up(d + other.rad) <= self.rad
    }

    fn sub_mid(&self, other: &Ball) -> f64 {
        let o = other.to_prec(self.prec);
        up(bigint_to_f64_scaled(&(&self.mid - &o.mid).abs(), self.prec))
    }

    pub fn to_prec(&self, prec: u32) -> Ball {
        if prec == self.prec {
            return self.clone();
        }
        if prec > self.prec {
            Ball { mid: &self.mid << (prec - self.prec) as usize, rad: self.rad, prec }
        } else {
            Ball { mid: &self.mid >> (self.prec - prec) as usize, rad: up(self.rad + ulp(prec)), prec }
        }
    }

    fn check(&self, other: &Ball) {
        assert_eq!(self.prec, other.prec, "ball precisions differ");
    }

    pub fn add(&self, other: &Ball) -> Ball {
        self.check(other);
        Ball { mid: &self.mid + &other.mid, rad: up(self.rad + other.rad), prec: self.prec }
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        self.check(other);
        Ball { mid: &self.mid - &other.mid, rad: up(self.rad + other.rad), prec: self.prec }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: -&self.mid, rad: self.rad, prec: self.prec }
    }

    pub fn mul(&self, other: &Ball) -> Ball {
        self.check(other);
        let p = &self.mid * &other.mid;
        let exact = p.is_zero() || p.trailing_zeros().unwrap_or(0) >= self.prec as u64;
        let mid = p >> self.prec as usize;
        let mut rad = 0.0;
        if self.rad != 0.0 || other.rad != 0.0 {
            let a = self.abs_upper();
            let b = other.abs_upper();
            rad = up(up(a * other.rad) + up(b * self.rad));
        }
        if !exact {
            rad = up(rad + ulp(self.prec));
        }
        Ball { mid, rad, prec: self.prec }
    }

    pub fn sqr(&self) -> Ball {
        self.mul(self)
    }

    pub fn mul_i64(&self, k: i64) -> Ball {
        Ball { mid: &self.mid * k, rad: up(self.rad * (k.unsigned_abs() as f64)), prec: self.prec }
    }

    pub fn div_i64(&self, k: i64) -> Ball {
        assert!(k != 0);
        let (q, r) = self.mid.div_rem(&BigInt::from(k));
        let mut rad = up(self.rad / (k.unsigned_abs() as f64));
        if !r.is_zero() {
            rad = up(rad + ulp(self.prec));
        }
        Ball { mid: q, rad, prec: self.prec }
    }

    pub fn mul_q(&self, x: &Q) -> Ball {
        self.mul(&Ball::from_q(x, self.prec))
    }

    /// Multiplies by 2^k (exact for k >= 0).
    pub fn mul_pow2(&self, k: i64) -> Ball {
        if k >= 0 {
            Ball { mid: &self.mid << k as usize, rad: up(self.rad * (k as f64).exp2()), prec: self.prec }
        } else {
            let s = (-k) as usize;
            let lost = self.mid.trailing_zeros().unwrap_or(u64::MAX) < s as u64;
            let mut rad = up(self.rad * (k as f64).exp2());
            if lost {
                rad = up(rad + ulp(self.prec));
            }
            Ball { mid: &self.mid >> s, rad, prec: self.prec }
        }
    }

    pub fn div(&self, other: &Ball) -> Result<Ball> {
        self.check(other);
        let bl = other.abs_lower();
        if bl == 0.0 {
            return Err(Error::Numeric("division by a ball containing zero".into()));
        }
        let num: BigInt = &self.mid << self.prec as usize;
        let (q, r) = num.div_rem(&other.mid);
        let mut rad = 0.0;
        if self.rad != 0.0 || other.rad != 0.0 {
            let a = self.abs_upper();
            let bm = bigint_to_f64_scaled(&other.mid.abs(), self.prec) / INFLATE;
            // |a/b - a'/b'| <= (|a'| r_b + |b'| r_a) / (|b'| (|b'| - r_b))
            rad = up(up(up(a * other.rad) + up(up(bm * INFLATE * INFLATE) * self.rad)) / (bm * bl / INFLATE));
        }
        if !r.is_zero() {
            rad = up(rad + ulp(self.prec));
        }
        Ok(Ball { mid: q, rad, prec: self.prec })
    }

    pub fn inv(&self) -> Result<Ball> {
        Ball::one(self.prec).div(self)
    }

    pub fn sqrt(&self) -> Result<Ball> {
        let lo = self.abs_lower();
        if self.mid.is_negative() || (lo == 0.0 && self.rad > 0.0) {
            return Err(Error::Numeric("sqrt of a ball not strictly positive".into()));
        }
        let m = (&self.mid << self.prec as usize).sqrt();
        let mut rad = ulp(self.prec);
        if self.rad > 0.0 {
            rad = up(rad + up(self.rad / up(lo.sqrt() / INFLATE)));
        }
        Ok(Ball { mid: m, rad, prec: self.prec })
    }

    pub fn pow_u32(&self, e: u32) -> Ball {
        let mut acc = Ball::one(self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let v: BigInt = &self.mid * &scale;
        let half = BigInt::one() << (self.prec as usize).saturating_sub(1);
        let r = if v.is_negative() { -((-v + &half) >> self.prec as usize) } else { (v + &half) >> self.prec as usize };
        let neg = r.is_negative();
        let s = r.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (ip, fp) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    }

    /// Smallest ball containing both.
    pub fn union(&self, other: &Ball) -> Ball {
        let lo = self.mid_f64() - self.rad;
        let lo = lo.min(other.mid_f64() - other.rad);
        let hi = (self.mid_f64() + self.rad).max(other.mid_f64() + other.rad);
        let mid = Ball::from_f64((lo + hi) / 2.0, self.prec).mid_ball();
        let r = up(up(hi - lo) / 2.0 + ulp(self.prec)) * 1.0000001;
        mid.with_rad(r)
    }
}

fn frexp_i64(x: f64) -> (i64, i64) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    if exp == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i64 << 52)), exp - 1075)
    }
}

/// Rectangular complex ball.
#[derive(Clone, PartialEq)]
pub struct CBall {
    pub re: Ball,
    pub im: Ball,
}

impl fmt::Debug for CBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})i", self.re, self.im)
    }
}

impl CBall {
    pub fn new(re: Ball, im: Ball) -> CBall {
        assert_eq!(re.prec, im.prec);
        CBall { re, im }
    }

    pub fn real(re: Ball) -> CBall {
        let p = re.prec;
        CBall { re, im: Ball::zero(p) }
    }

    pub fn zero(prec: u32) -> CBall {
        CBall::real(Ball::zero(prec))
    }

    pub fn one(prec: u32) -> CBall {
        CBall::real(Ball::one(prec))
    }

    pub fn i(prec: u32) -> CBall {
        CBall { re: Ball::zero(prec), im: Ball::one(prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec
    }

    pub fn add(&self, o: &CBall) -> CBall {
        CBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &CBall) -> CBall {
        CBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> CBall {
        CBall { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> CBall {
        CBall { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &CBall) -> CBall {
        if o.im.mid.is_zero() && o.im.rad == 0.0 {
            return self.mul_real(&o.re);
        }
        if self.im.mid.is_zero() && self.im.rad == 0.0 {
            return o.mul_real(&self.re);
        }
        CBall {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_real(&self, r: &Ball) -> CBall {
        CBall { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn mul_i64(&self, k: i64) -> CBall {
        CBall { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    pub fn div_i64(&self, k: i64) -> CBall {
        CBall { re: self.re.div_i64(k), im: self.im.div_i64(k) }
    }

    pub fn mul_q(&self, x: &Q) -> CBall {
        self.mul_real(&Ball::from_q(x, self.prec()))
    }

    pub fn norm_sqr(&self) -> Ball {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn div(&self, o: &CBall) -> Result<CBall> {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        Ok(CBall { re: n.re.div(&d)?, im: n.im.div(&d)? })
    }

    pub fn inv(&self) -> Result<CBall> {
        CBall::one(self.prec()).div(self)
    }

    /// Upper bound for |z|.
    pub fn abs_upper(&self) -> f64 {
        up(self.re.abs_upper().hypot(self.im.abs_upper()))
    }

    /// Lower bound for |z|.
    pub fn abs_lower(&self) -> f64 {
        self.re.abs_lower().hypot(self.im.abs_lower()) / INFLATE
    }

    pub fn abs(&self) -> Result<Ball> {
        self.norm_sqr().sqrt()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }

    pub fn pow_u32(&self, e: u32) -> CBall {
        let mut acc = CBall::one(self.prec());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_prec(&self, prec: u32) -> CBall {
        CBall { re: self.re.to_prec(prec), im: self.im.to_prec(prec) }
    }

    /// Max of the two radii (a bound on the error in either part).
    pub fn rad(&self) -> f64 {
        self.re.rad.max(self.im.rad)
    }
}

const GUARD: u32 = 32;

static PI_CACHE: LazyLock<RwLock<FxHashMap<u32, Ball>>> = LazyLock::new(|| RwLock::new(FxHashMap::default()));
static LN2_CACHE: LazyLock<RwLock<FxHashMap<u32, Ball>>> = LazyLock::new(|| RwLock::new(FxHashMap::default()));

/// atan(1/k) for an integer k >= 2 by its Taylor series.
fn atan_inv(k: i64, prec: u32) -> Ball {
    let k2 = k * k;
    let mut term = Ball::one(prec).div_i64(k);
    let mut sum = term.clone();
    let mut n = 1i64;
    loop {
        term = term.div_i64(k2);
        let t = term.div_i64(2 * n + 1);
        if n % 2 == 1 {
            sum = sum.sub(&t);
        } else {
            sum = sum.add(&t);
        }
        n += 1;
        if term.abs_upper() < ulp(prec) {
            // remaining alternating tail is bounded by the next term
            return sum.with_rad(term.abs_upper());
        }
    }
}

pub fn pi(prec: u32) -> Ball {
    if let Some(p) = PI_CACHE.read().get(&prec) {
        return p.clone();
    }
    let wp = prec + GUARD;
    let v = atan_inv(5, wp).mul_i64(16).sub(&atan_inv(239, wp).mul_i64(4)).to_prec(prec);
    PI_CACHE.write().insert(prec, v.clone());
    v
}

/// atanh(x) for a point or ball with |x| <= 1/2 by its Taylor series.
fn atanh_series(x: &Ball) -> Ball {
    let prec = x.prec;
    let x2 = x.sqr();
    let mut term = x.clone();
    let mut sum = x.clone();
    let q = x2.abs_upper();
    let mut n = 1i64;
    loop {
        term = term.mul(&x2);
        sum = sum.add(&term.div_i64(2 * n + 1));
        n += 1;
        let tail = up(term.abs_upper() * q / (1.0 - q));
        if tail < ulp(prec) {
            return sum.with_rad(tail);
        }
    }
}

pub fn ln2(prec: u32) -> Ball {
    if let Some(p) = LN2_CACHE.read().get(&prec) {
        return p.clone();
    }
    let wp = prec + GUARD;
    let third = Ball::one(wp).div_i64(3);
    let v = atanh_series(&third).mul_i64(2).to_prec(prec);
    LN2_CACHE.write().insert(prec, v.clone());
    v
}

/// Natural logarithm of a positive ball.
pub fn log(x: &Ball) -> Result<Ball> {
    let prec = x.prec;
    let lo = x.abs_lower();
    if !x.is_positive() || lo == 0.0 {
        return Err(Error::Numeric("log of a ball not strictly positive".into()));
    }
    let wp = prec + GUARD;
    let m = x.mid_ball().to_prec(wp);
    // m = y * 2^e with y in [1, 2)
    let e = m.mid.bits() as i64 - 1 - wp as i64;
    let y = m.mul_pow2(-e);
    let t = y.sub(&Ball::one(wp)).div(&y.add(&Ball::one(wp)))?;
    let l = atanh_series(&t).mul_i64(2).add(&ln2(wp).mul_i64(e));
    let r = if x.rad > 0.0 { up(x.rad / lo) } else { 0.0 };
    Ok(l.to_prec(prec).with_rad(r))
}

/// Exponential function.
pub fn exp(x: &Ball) -> Ball {
    let prec = x.prec;
    let xm = x.mid_f64();
    let extra = (xm.abs() * std::f64::consts::LOG2_E).ceil() as u32;
    let wp = prec + GUARD + extra.min(4 * MAX_PREC);
    let m = x.mid_ball().to_prec(wp);
    let l2 = ln2(wp);
    let n = (xm / std::f64::consts::LN_2).round() as i64;
    let r = m.sub(&l2.mul_i64(n));
    let s = 12u32;
    let rs = r.mul_pow2(-(s as i64));
    let rsa = rs.abs_upper();
    let mut term = Ball::one(wp);
    let mut sum = Ball::one(wp);
    let mut k = 1i64;
    loop {
        term = term.mul(&rs).div_i64(k);
        sum = sum.add(&term);
        k += 1;
        let t = term.abs_upper();
        if t < ulp(wp) && rsa < 0.5 {
            sum = sum.with_rad(up(2.0 * t * rsa));
            break;
        }
    }
    for _ in 0..s {
        sum = sum.sqr();
    }
    let v = sum.mul_pow2(n).to_prec(prec);
    if x.rad > 0.0 {
        let bound = up((xm + x.rad).exp() * INFLATE);
        v.with_rad(up(bound * up(x.rad.exp_m1())))
    } else {
        v
    }
}

/// Arctangent.
pub fn atan(x: &Ball) -> Result<Ball> {
    let prec = x.prec;
    let wp = prec + GUARD;
    let m = x.mid_ball().to_prec(wp);
    let neg = m.mid.is_negative();
    let mut y = if neg { m.neg() } else { m };
    let mut offset = Ball::zero(wp);
    if y.mid > (BigInt::one() << wp as usize) {
        offset = pi(wp).mul_pow2(-1);
        y = y.inv()?.neg();
    }
    // atan(y) = 2 atan(y / (1 + sqrt(1 + y^2)))
    let halvings = 6;
    for _ in 0..halvings {
        let s = Ball::one(wp).add(&y.sqr()).sqrt()?;
        y = y.div(&Ball::one(wp).add(&s))?;
    }
    let y2 = y.sqr();
    let q = y2.abs_upper();
    let mut term = y.clone();
    let mut sum = y.clone();
    let mut n = 1i64;
    loop {
        term = term.mul(&y2).neg();
        sum = sum.add(&term.div_i64(2 * n + 1));
        n += 1;
        let t = term.abs_upper() * q;
        if t < ulp(wp) {
            sum = sum.with_rad(up(t));
            break;
        }
    }
    let mut v = sum.mul_pow2(halvings).add(&offset);
    if neg {
        v = v.neg();
    }
    Ok(v.to_prec(prec).with_rad(x.rad))
}

/// Principal argument of a complex ball, in (-pi, pi).
pub fn arg(z: &CBall) -> Result<Ball> {
    let prec = z.prec();
    let (re, im) = (&z.re, &z.im);
    if re.abs_upper() >= im.abs_upper() {
        if re.is_positive() {
            return atan(&im.div(re)?);
        }
        if !re.is_negative() {
            return Err(Error::Numeric("argument undefined near zero".into()));
        }
        let base = atan(&im.div(re)?)?;
        if im.is_positive() || (im.mid.is_zero() && im.rad == 0.0) {
            Ok(base.add(&pi(prec)))
        } else if im.is_negative() {
            Ok(base.sub(&pi(prec)))
        } else {
            Err(Error::Numeric("argument evaluated on the branch cut".into()))
        }
    } else {
        let half_pi = pi(prec).mul_pow2(-1);
        let t = atan(&re.div(im)?)?;
        if im.is_positive() {
            Ok(half_pi.sub(&t))
        } else if im.is_negative() {
            Ok(half_pi.neg().sub(&t))
        } else {
            Err(Error::Numeric("argument undefined near zero".into()))
        }
    }
}

/// Principal complex logarithm.
pub fn clog(z: &CBall) -> Result<CBall> {
    // log|z| = log a + log(1 + (b/a)^2)/2 with a the larger component, so a
    // tiny |z| is not squared below the working precision
    let (a, b) = if z.re.abs_upper() >= z.im.abs_upper() { (&z.re, &z.im) } else { (&z.im, &z.re) };
    let a = if a.is_negative() { a.neg() } else { a.clone() };
    let r = b.div(&a)?;
    let re = log(&a)?.add(&log(&Ball::one(z.prec()).add(&r.sqr()))?.mul_pow2(-1));
    Ok(CBall::new(re, arg(z)?))
}

/// x^s = exp(s log x) for x > 0.
pub fn pow_real(x: &Ball, s: &Ball) -> Result<Ball> {
    Ok(exp(&s.mul(&log(x)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::q;

    fn close(b: &Ball, x: f64, tol: f64) -> bool {
        (b.mid_f64() - x).abs() < tol && b.rad() < 1e-60
    }

    #[test]
    fn constants() {
        let p = pi(256);
        assert_eq!(&p.to_string_digits(40), "3.1415926535897932384626433832795028841972");
        assert!(p.rad() < 1e-70);
        assert_eq!(&ln2(256).to_string_digits(30), "0.693147180559945309417232121458");
    }

    #[test]
    fn exp_log_roundtrip() {
        for x in [q(1, 3), q(-7, 2), q(25, 1), q(1, 1000)] {
            let b = Ball::from_q(&x, 200);
            let y = log(&exp(&b)).unwrap();
            assert!(y.overlaps(&b), "{x}");
            assert!(y.rad() < 1e-50);
        }
        assert!(close(&exp(&Ball::one(200)), std::f64::consts::E, 1e-15));
        assert!(log(&Ball::from_i64(-1, 100)).is_err());
    }

    #[test]
    fn atan_and_arg() {
        let one = Ball::one(200);
        let v = atan(&one).unwrap().mul_i64(4);
        assert!(v.overlaps(&pi(200)));
        let z = CBall::new(Ball::from_i64(-1, 200), Ball::from_i64(1, 200));
        let a = arg(&z).unwrap();
        assert!(a.overlaps(&pi(200).mul_i64(3).mul_pow2(-2)));
        let z = CBall::new(Ball::from_i64(-1, 200), Ball::from_i64(-1, 200));
        assert!(arg(&z).unwrap().overlaps(&pi(200).mul_i64(-3).mul_pow2(-2)));
    }

    #[test]
    fn arithmetic_encloses() {
        let a = Ball::from_q(&q(1, 3), 128);
        let b = Ball::from_q(&q(2, 7), 128);
        let c = a.mul(&b).div(&b).unwrap();
        assert!(c.overlaps(&a));
        let s = Ball::from_i64(2, 128).sqrt().unwrap();
        assert!(s.sqr().overlaps(&Ball::from_i64(2, 128)));
        assert_eq!(Ball::from_f64(0.375, 64).to_string_digits(3), "0.375");
        assert_eq!(Ball::from_q(&q(-1, 8), 64).to_string_digits(3), "-0.125");
    }

    #[test]
    fn clog_below_half_precision() {
        // |z|^2 = 2^-180 is below the 2^-128 grid; log|z| = -90 ln 2
        let t = Ball::one(128).mul_pow2(-90);
        for z in [CBall::new(t.clone(), Ball::zero(128)), CBall::new(Ball::zero(128), t.neg())] {
            let l = clog(&z).unwrap();
            assert!(l.re.overlaps(&ln2(128).mul_i64(-90)));
            assert!(l.re.rad() < 1e-30);
        }
        let z = CBall::new(Ball::from_i64(-3, 128), Ball::from_i64(4, 128));
        assert!(clog(&z).unwrap().re.overlaps(&log(&Ball::from_i64(5, 128)).unwrap()));
    }
}
