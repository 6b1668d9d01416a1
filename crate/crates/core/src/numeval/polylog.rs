//! Multiple polylogarithms Li_w(z) for |z| <= 1 and multiple zeta values.
//!
//! Words ending in x1 are evaluated by one of three methods:
//! - |z| <= 0.6: the power series sum c_n(w) z^n with |c_n| <= 1;
//! - |1 - z| <= 0.6: path composition through 1, where the segment 1 -> z is
//!   a series in 1 - z with regularized zeta values at 1;
//! - otherwise: analytic continuation along the ray from z/2 to z in steps
//!   that stay within half the distance to the singularities {0, 1}.
//!
//! Trailing x0 letters are removed by the shuffle identity
//! w = sum_j w_j ш x0^{ш j} with Li_{x0}(z) = log z.

use std::sync::LazyLock;

use parking_lot::RwLock;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::ball::{clog, Ball, CBall};
use crate::error::{Error, Result};
use crate::polyreg::{decompose, decompose_unchecked};
use crate::ring::Q;
use crate::words::{Letter, Word, WordPoly};

const GUARD: u32 = 40;
const DIRECT_RADIUS: f64 = 0.6;

/// Coefficient of z^n in Li_{x0 w} and Li_{x1 w} from the coefficients of Li_w.
fn prepend_letter(l: Letter, c: &[Ball]) -> Vec<Ball> {
    let prec = c[0].prec();
    let mut out = Vec::with_capacity(c.len());
    out.push(Ball::zero(prec));
    match l {
        Letter::X0 => {
            for (n, cn) in c.iter().enumerate().skip(1) {
                out.push(cn.div_i64(n as i64));
            }
        }
        Letter::X1 => {
            let mut partial = Ball::zero(prec);
            for n in 1..c.len() {
                partial = partial.add(&c[n - 1]);
                out.push(partial.div_i64(n as i64));
            }
        }
    }
    out
}

/// Number of terms K so that sum_{n>K} rho^n / (1 - rho) < 2^-bits.
fn series_terms(rho: f64, bits: u32) -> usize {
    assert!(rho < 1.0);
    let l = -rho.log2();
    (((bits as f64) + 2.0 - (1.0 - rho).log2()) / l).ceil() as usize + 1
}

/// Li of every suffix w[i..] (i = 0..=len) at a point with |z| < 1,
/// by the power series. Every suffix must end in x1 or be empty.
pub(crate) fn direct_suffixes(w: Word, z: &CBall) -> Result<Vec<CBall>> {
    let prec = z.prec();
    let rho = z.abs_upper();
    if rho >= 0.95 {
        return Err(Error::Numeric(format!("direct series needs |z| < 1, got {rho}")));
    }
    if !w.is_empty() && !w.ends_in_x1() {
        return Err(Error::Precondition(format!("direct series needs a word ending in x1, got {w}")));
    }
    let k = series_terms(rho, prec);
    let mut pows = Vec::with_capacity(k + 1);
    pows.push(CBall::one(prec));
    for n in 1..=k {
        let p = pows[n - 1].mul(z);
        pows.push(p);
    }
    let tail = up_tail(rho, k);
    let n = w.len();
    let mut out = vec![CBall::one(prec); n + 1];
    let mut c = vec![Ball::zero(prec); k + 1];
    c[0] = Ball::one(prec);
    for i in (0..n).rev() {
        c = prepend_letter(w.letter(i), &c);
        let mut re = Ball::zero(prec);
        let mut im = Ball::zero(prec);
        for (cn, zn) in c.iter().zip(&pows).skip(1) {
            re = re.add(&cn.mul(&zn.re));
            im = im.add(&cn.mul(&zn.im));
        }
        out[i] = CBall::new(re.with_rad(tail), im.with_rad(tail));
    }
    Ok(out)
}

/// Same as [`direct_suffixes`] for a real point.
fn direct_suffixes_real(w: Word, x: &Ball) -> Vec<Ball> {
    let prec = x.prec();
    let rho = x.abs_upper();
    assert!(rho < 0.95);
    let k = series_terms(rho, prec);
    let mut pows = Vec::with_capacity(k + 1);
    pows.push(Ball::one(prec));
    for n in 1..=k {
        let p = pows[n - 1].mul(x);
        pows.push(p);
    }
    let tail = up_tail(rho, k);
    let n = w.len();
    let mut out = vec![Ball::one(prec); n + 1];
    let mut c = vec![Ball::zero(prec); k + 1];
    c[0] = Ball::one(prec);
    for i in (0..n).rev() {
        c = prepend_letter(w.letter(i), &c);
        let mut s = Ball::zero(prec);
        for (cn, xn) in c.iter().zip(&pows).skip(1) {
            s = s.add(&cn.mul(xn));
        }
        out[i] = s.with_rad(tail);
    }
    out
}

fn up_tail(rho: f64, k: usize) -> f64 {
    rho.powi(k as i32 + 1) / (1.0 - rho) * 1.0001
}

type ZetaCache = RwLock<FxHashMap<(Word, u32), Ball>>;
static ZETA_CACHE: LazyLock<ZetaCache> = LazyLock::new(|| RwLock::new(FxHashMap::default()));

/// zeta(w) for a convergent word, by the Hoelder convolution at 1/2:
/// zeta(w) = sum_{w = uv} Li_{dual(u)}(1/2) Li_v(1/2).
pub fn mzv_numeric(w: Word, prec: u32) -> Result<Ball> {
    if !w.is_convergent() {
        return Err(Error::Precondition(format!("mzv_numeric needs a convergent word, got {w}")));
    }
    if let Some(b) = ZETA_CACHE.read().get(&(w, prec)) {
        return Ok(b.clone());
    }
    let wp = prec + GUARD;
    let half = Ball::one(wp).mul_pow2(-1);
    let n = w.len();
    let v = direct_suffixes_real(w, &half);
    // dual(w[..k]) is the suffix of dual(w) of length k
    let u = direct_suffixes_real(w.dual(), &half);
    let mut s = Ball::zero(wp);
    for k in 0..=n {
        s = s.add(&u[n - k].mul(&v[k]));
    }
    let b = s.to_prec(prec);
    ZETA_CACHE.write().insert((w, prec), b.clone());
    Ok(b)
}

/// Evaluates many zeta symbols in parallel, filling the cache.
pub fn mzv_numeric_many(words: &[Word], prec: u32) -> Result<Vec<Ball>> {
    words.par_iter().map(|&w| mzv_numeric(w, prec)).collect()
}

/// Shuffle-regularized zeta(w) with Li_{x1}(1) = 0, for w ending in x1 or empty.
fn zeta_reg(w: Word, prec: u32) -> Result<Ball> {
    if w.is_empty() {
        return Ok(Ball::one(prec));
    }
    let d = decompose(w)?;
    let mut s = Ball::zero(prec);
    for (v, c) in d.parts[0].iter() {
        let z = if v.is_empty() { Ball::one(prec) } else { mzv_numeric(*v, prec)? };
        s = s.add(&z.mul_q(c));
    }
    Ok(s)
}

fn log_power_over_factorial(l: &CBall, j: usize) -> CBall {
    let mut p = CBall::one(l.prec());
    for i in 1..=j {
        p = p.mul(l).div_i64(i as i64);
    }
    p
}

/// Li_w(z) for any word, principal branch, |z| <= 1, z not in [1, inf).
/// Words with trailing x0 additionally need z off (-inf, 0].
pub fn li_word(w: Word, z: &CBall, prec: u32) -> Result<CBall> {
    let wp = prec + GUARD;
    Ok(li_word_wp(w, &z.to_prec(wp))?.to_prec(prec))
}

fn li_word_wp(w: Word, z: &CBall) -> Result<CBall> {
    let prec = z.prec();
    if w.is_empty() {
        return Ok(CBall::one(prec));
    }
    let t = w.trailing_x0();
    if t == w.len() {
        let l = clog(z)?;
        return Ok(log_power_over_factorial(&l, t));
    }
    if t > 0 {
        // dual turns trailing x0 into leading x1, peeled by the decomposition.
        let d = decompose_unchecked(w.dual());
        let l = clog(z)?;
        let mut acc = CBall::zero(prec);
        let mut lj = CBall::one(prec);
        for (j, part) in d.parts.iter().enumerate() {
            if j > 0 {
                lj = lj.mul(&l);
            }
            if part.is_empty() {
                continue;
            }
            for (v, c) in part.iter() {
                let val = li_x1(v.dual(), z)?;
                acc = acc.add(&val.mul(&lj).mul_q(c));
            }
        }
        return Ok(acc);
    }
    li_x1(w, z)
}

/// Li_w(z) for w ending in x1 or empty.
fn li_x1(w: Word, z: &CBall) -> Result<CBall> {
    let prec = z.prec();
    if w.is_empty() {
        return Ok(CBall::one(prec));
    }
    let zabs = z.abs_lower();
    if zabs > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!("polylogarithm needs |z| <= 1, got |z| >= {zabs}")));
    }
    if z.abs_upper() <= DIRECT_RADIUS {
        return Ok(direct_suffixes(w, z)?.swap_remove(0));
    }
    let y = CBall::one(prec).sub(z);
    if y.abs_lower() == 0.0 {
        let is_one = y.re.rad() == 0.0 && y.im.rad() == 0.0 && y.abs_upper() == 0.0;
        if is_one && w.is_convergent() {
            return Ok(CBall::real(mzv_numeric(w, prec)?));
        }
        return Err(Error::Numeric(format!("Li_{w} evaluated at or too close to z = 1")));
    }
    if y.abs_upper() <= DIRECT_RADIUS {
        return li_near_one(w, &y);
    }
    li_path(w, z)
}

/// Li_w(1 - y) = sum_{w = uv} (-1)^{|u|} Li_{swap(u)}(y) zeta_reg(v), where
/// Li_{swap(u)} is regularized at 0 and zeta_reg at 1.
fn li_near_one(w: Word, y: &CBall) -> Result<CBall> {
    let prec = y.prec();
    let n = w.len();
    let mut acc = CBall::zero(prec);
    for k in 0..=n {
        let (u, v) = w.split_at(k);
        let zr = zeta_reg(v, prec)?;
        if zr.abs_upper() == 0.0 {
            continue;
        }
        let lu = li_word_wp(u.swap(), y)?;
        let term = lu.mul_real(&zr);
        acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    Ok(acc)
}

/// sum_{k > K} rho^k C(k-1, m-1), the majorant tail of a length-m iterated
/// integral whose forms have coefficients bounded by rho^{k+1}; as log2.
fn segment_tail_log2(rho: f64, k: usize, m: usize) -> f64 {
    let mut lc = 0.0f64;
    // log2 C(K, m-1)
    for i in 0..m.saturating_sub(1) {
        lc += ((k - i) as f64).log2() - ((i + 1) as f64).log2();
    }
    let lt = (k as f64 + 1.0) * rho.log2() + lc;
    let r = rho * (k as f64 + 1.0) / (k as f64 + 2.0 - m as f64);
    if r >= 1.0 {
        return f64::INFINITY;
    }
    lt - (1.0 - r).log2()
}

/// Analytic continuation of Li of all suffixes of w along z/2 -> z.
fn li_path(w: Word, z: &CBall) -> Result<CBall> {
    let prec = z.prec();
    let (zr, zi) = z.to_f64_pair();
    let zabs = zr.hypot(zi);
    let mut t = 0.5f64;
    let start = z.mul_real(&Ball::from_f64(t, prec));
    let mut vals = direct_suffixes(w, &start)?;
    let mut steps = 0;
    while t < 1.0 {
        let (pr, pi) = (zr * t, zi * t);
        let r = pr.hypot(pi).min((1.0 - pr).hypot(pi));
        let dt_max = 0.45 * r / zabs;
        let t_next = if 1.0 - t <= dt_max { 1.0 } else { quantize(t + dt_max) };
        let dt = t_next - t;
        let p = z.mul_real(&Ball::from_f64(t, prec));
        let d = z.mul_real(&Ball::from_f64(dt, prec));
        vals = segment_step(w, &vals, &p, &d)?;
        t = t_next;
        steps += 1;
        if steps > 10_000 {
            return Err(Error::Numeric("path continuation did not terminate".into()));
        }
    }
    Ok(vals.swap_remove(0))
}

/// Rounds down to a dyadic with 20 fractional bits so that steps are exact.
fn quantize(t: f64) -> f64 {
    (t * 1048576.0).floor() / 1048576.0
}

/// Given Li of all suffixes at p, returns them at p + d.
fn segment_step(w: Word, vals: &[CBall], p: &CBall, d: &CBall) -> Result<Vec<CBall>> {
    let prec = p.prec();
    let n = w.len();
    let a = d.div(p)?;
    let b = d.div(&CBall::one(prec).sub(p))?;
    let rho = a.abs_upper().max(b.abs_upper());
    if rho >= 0.75 {
        return Err(Error::Numeric(format!("path step too large (ratio {rho})")));
    }
    let mut k = series_terms(rho, prec) + 4 * n;
    while segment_tail_log2(rho, k, n.max(1)) > -(prec as f64) - 2.0 {
        k += 16;
    }
    let mut out: Vec<CBall> = vals.to_vec();
    for j in 1..=n {
        let mut h: Vec<CBall> = vec![CBall::zero(prec); k + 1];
        h[0] = CBall::one(prec);
        for i in (0..j).rev() {
            let f = match w.letter(i) {
                Letter::X0 => omega_series(&h, &a, -1),
                Letter::X1 => omega_series(&h, &b, 1),
            };
            let mut nh = Vec::with_capacity(k + 1);
            nh.push(CBall::zero(prec));
            for (idx, fk) in f.iter().take(k).enumerate() {
                nh.push(fk.div_i64(idx as i64 + 1));
            }
            h = nh;
            let m = j - i;
            let tail = segment_tail_log2(rho, k, m).exp2() * 1.001;
            let mut g = CBall::zero(prec);
            for hk in &h {
                g = g.add(hk);
            }
            let g = CBall::new(g.re.with_rad(tail), g.im.with_rad(tail));
            out[i] = out[i].add(&g.mul(&vals[j]));
        }
    }
    Ok(out)
}

/// Coefficients of c/(1 - s c tau) * H(tau) with s = +1 or -1.
fn omega_series(h: &[CBall], c: &CBall, s: i64) -> Vec<CBall> {
    let mut f: Vec<CBall> = Vec::with_capacity(h.len());
    let mut prev = CBall::zero(c.prec());
    for hk in h {
        let inner = if s > 0 { hk.add(&prev) } else { hk.sub(&prev) };
        let fk = inner.mul(c);
        f.push(fk.clone());
        prev = fk;
    }
    f
}

/// Numeric coefficient types for [`li_numeric`].
pub trait NumericCoeff {
    fn to_cball(&self, prec: u32) -> Result<CBall>;
}

impl NumericCoeff for Q {
    fn to_cball(&self, prec: u32) -> Result<CBall> {
        Ok(CBall::real(Ball::from_q(self, prec)))
    }
}

impl NumericCoeff for num_bigint::BigInt {
    fn to_cball(&self, prec: u32) -> Result<CBall> {
        Ok(CBall::real(Ball::from_q(&Q::from_integer(self.clone()), prec)))
    }
}

impl NumericCoeff for crate::mzvalg::MzvElem {
    fn to_cball(&self, prec: u32) -> Result<CBall> {
        super::mzv_elem_numeric(self, prec)
    }
}

/// Li_p(z) = sum_w c_w Li_w(z) for a linear combination of words.
pub fn li_numeric<R: crate::ring::Ring + NumericCoeff>(p: &WordPoly<R>, z: &CBall, prec: u32) -> Result<CBall> {
    let mut acc = CBall::zero(prec);
    for (w, c) in p.sorted_terms() {
        if c.is_zero() {
            continue;
        }
        let v = li_word(w, z, prec)?;
        acc = acc.add(&v.mul(&c.to_cball(prec)?));
    }
    Ok(acc)
}

/// Truncated direct sum of zeta(w) over n < n_max (a slow oracle for tests).
pub fn mzv_direct_partial(w: Word, n_max: usize, prec: u32) -> Ball {
    let mut c = vec![Ball::zero(prec); n_max];
    c[0] = Ball::one(prec);
    for i in (0..w.len()).rev() {
        c = prepend_letter(w.letter(i), &c);
    }
    let mut s = Ball::zero(prec);
    for cn in &c {
        s = s.add(cn);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{q, qi};
    use crate::words::shuffle;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn pt(re: Q, im: Q, prec: u32) -> CBall {
        CBall::new(Ball::from_q(&re, prec), Ball::from_q(&im, prec))
    }

    #[test]
    fn single_values() {
        let half = pt(q(1, 2), qi(0), 128);
        let v = li_word(w("1"), &half, 128).unwrap();
        assert_eq!(v.re.to_string_digits(10), "0.6931471806");
        let z2 = mzv_numeric(w("01"), 256).unwrap();
        assert_eq!(z2.to_string_digits(30), "1.644934066848226436472415166646");
        assert!(z2.rad() < 1e-70);
        let z3 = mzv_numeric(w("001"), 256).unwrap();
        assert_eq!(z3.to_string_digits(30), "1.202056903159594285399738161511");
        assert!(mzv_numeric(w("011"), 256).unwrap().overlaps(&z3));
        assert!(mzv_numeric(w("11"), 64).is_err());
    }

    #[test]
    fn holder_matches_direct_sum() {
        // zeta(3) partial sum to n < 2000 is within 1/(2 * 1999^2) of the limit.
        let direct = mzv_direct_partial(w("001"), 2000, 128);
        let h = mzv_numeric(w("001"), 128).unwrap();
        let gap = h.sub(&direct).mid_f64();
        assert!(gap > 0.0 && gap < 1.0 / (2.0 * 1999.0f64.powi(2)) + 1e-9);
    }

    #[test]
    fn li_at_one_and_circle() {
        let one = CBall::one(128);
        let v = li_word(w("01"), &one, 128).unwrap();
        assert_eq!(v.re.to_string_digits(15), "1.644934066848226");
        assert!(li_word(w("1"), &one, 64).is_err());
        // Li_2(i) = -pi^2/48 + i G (Catalan).
        let i = CBall::i(128);
        let v = li_word(w("01"), &i, 128).unwrap();
        assert_eq!(v.re.to_string_digits(20), "-0.20561675835602830456");
        assert_eq!(v.im.to_string_digits(20), "0.91596559417721901505");
        // Li_1(-1) = -log 2, via path continuation.
        let m1 = CBall::real(Ball::from_i64(-1, 128));
        let v = li_word(w("1"), &m1, 128).unwrap();
        assert_eq!(v.re.to_string_digits(20), "-0.69314718055994530942");
        // Li_{x0}(z) = log z
        let v = li_word(w("0"), &i, 128).unwrap();
        assert_eq!(v.im.to_string_digits(20), "1.57079632679489661923");
    }

    #[test]
    fn regions_agree() {
        // The same point evaluated through different regions.
        let words = ["1", "01", "11", "001", "011", "101", "0101", "0011", "10", "010"];
        let zs = [pt(q(7, 10), q(1, 5), 160), pt(q(-3, 5), q(7, 10), 160), pt(q(3, 5), q(-1, 2), 160)];
        for s in words {
            for z in &zs {
                let a = li_word_wp(w(s), z).unwrap();
                if w(s).ends_in_x1() {
                    let b = li_path(w(s), z).unwrap();
                    assert!(a.re.overlaps(&b.re) && a.im.overlaps(&b.im), "{s} {z:?}");
                }
                let y = CBall::one(160).sub(z);
                if w(s).ends_in_x1() && y.abs_upper() < 0.95 {
                    let c = li_near_one(w(s), &y).unwrap();
                    assert!(a.re.overlaps(&c.re) && a.im.overlaps(&c.im), "{s} near one");
                    assert!(c.rad() < 1e-35);
                }
            }
        }
    }

    #[test]
    fn shuffle_multiplicativity() {
        let words = ["1", "0", "01", "11", "10", "001", "011", "101", "110", "010"];
        for z in [pt(q(1, 2), qi(0), 128), pt(qi(0), q(1, 2), 128), pt(q(-1, 3), q(2, 3), 128)] {
            for a in words {
                for b in words {
                    let (u, v) = (w(a), w(b));
                    if u.len() + v.len() > 4 {
                        continue;
                    }
                    let lhs = li_numeric(&shuffle(u, v), &z, 128).unwrap();
                    let rhs = li_word(u, &z, 128).unwrap().mul(&li_word(v, &z, 128).unwrap());
                    assert!(lhs.re.overlaps(&rhs.re) && lhs.im.overlaps(&rhs.im), "{a} {b}");
                    assert!(lhs.rad() < 1e-30);
                }
            }
        }
    }
}
