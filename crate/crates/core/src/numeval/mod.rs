//! Arbitrary-precision numerics: ball arithmetic, multiple polylogarithms
//! and zeta values, special functions, circle averages, and evaluation of
//! the eigenvalue expansion.

pub mod ball;
pub mod polylog;
pub mod quadrature;
pub mod special;

use rustc_hash::FxHashSet;

pub use ball::{Ball, CBall};
pub use polylog::{li_numeric, li_word, mzv_numeric, NumericCoeff};
pub use quadrature::{circle_average, circle_average_many, circle_point};
pub use special::{bessel_j0_zero, gamma_ball, hurwitz_zeta, hurwitz_zeta_scaled, j0_ball, j1_ball, trigamma_ball};

use crate::error::{Error, Result};
use crate::mzvalg::{LambdaPoly, MzvElem};
use crate::ring::q;
use crate::words::Word;

pub const DEFAULT_PREC: u32 = 256;

/// Numeric enclosure of an MZV expression; ip evaluates to i pi / 2.
pub fn mzv_elem_numeric(e: &MzvElem, prec: u32) -> Result<CBall> {
    let mut words: Vec<Word> = e
        .terms()
        .iter()
        .flat_map(|(m, _)| m.factors().iter().copied())
        .collect::<FxHashSet<_>>()
        .into_iter()
        .collect();
    words.sort();
    polylog::mzv_numeric_many(&words, prec)?;
    let half_pi = ball::pi(prec).mul_pow2(-1);
    let mut re = Ball::zero(prec);
    let mut im = Ball::zero(prec);
    for (m, c) in e.terms() {
        let mut v = Ball::from_q(c, prec);
        for &w in m.factors() {
            v = v.mul(&mzv_numeric(w, prec)?);
        }
        if m.has_ip() {
            im = im.add(&v.mul(&half_pi));
        } else {
            re = re.add(&v);
        }
    }
    Ok(CBall::new(re, im))
}

/// p(lambda) with every coefficient evaluated numerically.
pub fn lambda_poly_numeric(p: &LambdaPoly, lambda: &Ball, prec: u32) -> Result<CBall> {
    let lam = CBall::real(lambda.to_prec(prec));
    let mut acc = CBall::zero(prec);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(&lam).add(&mzv_elem_numeric(c, prec)?);
    }
    Ok(acc)
}

/// lambda_m = j_{0,m}^2, the m-th Dirichlet eigenvalue of the unit disk
/// among radially symmetric modes.
pub fn disk_eigenvalue(m: u32, prec: u32) -> Result<Ball> {
    Ok(bessel_j0_zero(m, prec)?.sqr())
}

/// 1 + sum_{n=1}^{terms} C_n(lambda_m) / N^n, where `c[n]` is C_n (`c[0]`
/// is ignored) and lambda_m = j_{0,m}^2.
pub fn evaluate_expansion(n_sides: u64, terms: usize, m: u32, c: &[LambdaPoly], prec: u32) -> Result<Ball> {
    if n_sides < 3 {
        return Err(Error::InvalidArgument(format!("a polygon needs N >= 3, got {n_sides}")));
    }
    if terms >= c.len() {
        return Err(Error::InvalidArgument(format!(
            "{terms} terms requested but coefficients are known through order {}",
            c.len().saturating_sub(1)
        )));
    }
    let lambda = disk_eigenvalue(m, prec)?;
    let inv_n = Ball::from_q(&q(1, n_sides as i64), prec);
    let mut acc = Ball::zero(prec);
    for n in (1..=terms).rev() {
        let v = lambda_poly_numeric(&c[n], &lambda, prec)?;
        if !v.im.contains_zero() {
            return Err(Error::Inconsistency(format!("C_{n} has a nonzero imaginary part")));
        }
        acc = acc.add(&v.re).mul(&inv_n);
    }
    Ok(acc.add(&Ball::one(prec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{qi, QAlgebra, Ring};

    #[test]
    fn elem_numeric() {
        let z3 = MzvElem::zeta_comp(&[3]);
        let e = z3.mul_ref(&z3).scale(&qi(8)).add_ref(&MzvElem::ip());
        let v = mzv_elem_numeric(&e, 128).unwrap();
        assert_eq!(v.re.to_string_digits(12), "11.559526387469");
        assert_eq!(v.im.to_string_digits(12), "1.570796326795");
        // ip^2 = -(3/2) zeta(2) holds numerically
        let ip2 = MzvElem::ip().mul_ref(&MzvElem::ip());
        let v = mzv_elem_numeric(&ip2, 128).unwrap();
        let h = ball::pi(128).mul_pow2(-1);
        assert!(v.re.overlaps(&h.sqr().neg()));
    }

    #[test]
    fn expansion_leading_term() {
        // C_3 = 4 zeta(3) only
        let mut c = vec![LambdaPoly::zero(); 4];
        c[3] = LambdaPoly::constant(MzvElem::zeta_comp(&[3]).scale(&qi(4)));
        let v = evaluate_expansion(12, 3, 1, &c, 128).unwrap();
        let expect = 1.0 + 4.0 * 1.2020569031595942 / 1728.0;
        assert!((v.mid_f64() - expect).abs() < 1e-15);
        assert!(evaluate_expansion(2, 3, 1, &c, 128).is_err());
        assert!(evaluate_expansion(12, 4, 1, &c, 128).is_err());
    }
}
