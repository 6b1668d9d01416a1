//! Averages over the unit circle, t -> f(e^{2 pi i t}), for integrands with
//! real Taylor coefficients (so f(conj z) = conj f(z)) and at most
//! logarithmic singularities at z = 1.
//!
//! With z(s) = (1 + is)/(1 - is) the upper half circle is s in [0, inf) and
//! int_0^1 f(e^{2 pi i t}) dt = (2/pi) Re int_0^inf f(z(s)) ds/(1 + s^2),
//! which is integrated by the exp-sinh rule s = exp(pi/2 sinh u).
//! Nodes are f64; this is a sanity-level check, not a certified integral.

use rayon::prelude::*;

use super::ball::{Ball, CBall};
use crate::error::Result;

const STEP: f64 = 1.0 / 16.0;

/// Lower cutoff in s. Near z = 1 the integrand grows like a power of
/// log s, so the cut-off piece is about s_min log(s_min)^k; 1 - z ~ 2is
/// must still be resolved at the working precision.
fn s_min(prec: u32) -> f64 {
    (-(prec as f64 - 40.0)).exp2().min(1e-16)
}

/// The circle point z(s) = ((1 - s^2) + 2is)/(1 + s^2) for a finite s.
pub fn circle_point(s: f64, prec: u32) -> CBall {
    let sb = Ball::from_f64(s, prec);
    let s2 = sb.sqr();
    let one = Ball::one(prec);
    let den = one.add(&s2);
    let re = one.sub(&s2).div(&den).expect("1 + s^2 > 0");
    let im = sb.mul_i64(2).div(&den).expect("1 + s^2 > 0");
    CBall::new(re, im)
}

fn nodes(prec: u32) -> Vec<(f64, f64)> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let lo = s_min(prec);
    let n = ((-lo.ln() / half_pi).asinh() / STEP).ceil() as i64 + 1;
    (-n..=n)
        .filter_map(|k| {
            let u = k as f64 * STEP;
            let s = (half_pi * u.sinh()).exp();
            let ds = s * half_pi * u.cosh();
            (lo..1.0 / lo).contains(&s).then_some((s, ds * STEP))
        })
        .collect()
}

/// Evaluates `f` at every node and returns the circle average of each
/// component. `f` returns several values per point so that one set of
/// expensive evaluations serves many integrands.
pub fn circle_average_many<F>(f: F, prec: u32) -> Result<Vec<f64>>
where
    F: Fn(&CBall) -> Result<Vec<CBall>> + Sync,
{
    let vals: Vec<(f64, Vec<CBall>)> = nodes(prec)
        .into_par_iter()
        .map(|(s, wgt)| {
            let z = circle_point(s, prec);
            f(&z).map(|v| (wgt / (1.0 + s * s), v))
        })
        .collect::<Result<_>>()?;
    let m = vals.first().map_or(0, |(_, v)| v.len());
    let mut acc = vec![0.0f64; m];
    for (w, v) in &vals {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += w * x.re.mid_f64();
        }
    }
    Ok(acc.into_iter().map(|a| a * 2.0 / std::f64::consts::PI).collect())
}

/// Circle average of a single integrand.
pub fn circle_average<F>(f: F, prec: u32) -> Result<f64>
where
    F: Fn(&CBall) -> Result<CBall> + Sync,
{
    Ok(circle_average_many(|z| Ok(vec![f(z)?]), prec)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeval::polylog::li_word;
    use crate::words::Word;

    #[test]
    fn polynomial_averages() {
        // average of 1 is 1, of z^k is 0, and of log(1 - z) is 0
        let one = circle_average(|z| Ok(CBall::one(z.prec())), 64).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let z3 = circle_average(|z| Ok(z.pow_u32(3)), 64).unwrap();
        assert!(z3.abs() < 1e-12);
        let l = circle_average(|z| li_word(Word::x1(), z, 64), 64).unwrap();
        assert!(l.abs() < 1e-10, "{l}");
    }

    #[test]
    fn product_average() {
        // average of |Li_1(z)|^2 = sum 1/n^2 = zeta(2)
        let v = circle_average(
            |z| {
                let a = li_word(Word::x1(), z, 64)?;
                Ok(a.mul(&a.conj()))
            },
            64,
        )
        .unwrap();
        assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-9, "{v}");
    }
}
