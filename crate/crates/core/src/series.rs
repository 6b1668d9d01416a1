//! Truncated power series c_0 + c_1 t + ... + c_W t^W over a commutative
//! ring, stored densely.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{qi, QAlgebra, Ring, Q};

#[derive(Clone, PartialEq)]
pub struct TruncSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> fmt::Debug for TruncSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl<R: Ring> TruncSeries<R> {
    /// Zero series truncated at order `w` (coefficients 0..=w).
    pub fn zero(w: usize) -> Self {
        TruncSeries { coeffs: vec![R::zero(); w + 1] }
    }

    pub fn one(w: usize) -> Self {
        Self::constant(R::one(), w)
    }

    pub fn constant(c: R, w: usize) -> Self {
        let mut s = Self::zero(w);
        s.coeffs[0] = c;
        s
    }

    /// c * t^k, or zero if k > w.
    pub fn monomial(c: R, k: usize, w: usize) -> Self {
        let mut s = Self::zero(w);
        if k <= w {
            s.coeffs[k] = c;
        }
        s
    }

    /// Coefficients beyond `w` are discarded, missing ones are zero.
    pub fn from_coeffs(mut coeffs: Vec<R>, w: usize) -> Self {
        coeffs.resize(w + 1, R::zero());
        TruncSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &R {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, c: R) {
        self.coeffs[n] = c;
    }

    pub fn coeff_mut(&mut self, n: usize) -> &mut R {
        &mut self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::InvalidArgument(format!(
                "truncation orders differ: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(TruncSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add_ref(b)).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(TruncSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub_ref(b)).collect() })
    }

    pub fn neg(&self) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect() }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let w = self.order();
        let mut out = Self::zero(w);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=w - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j].add_assign_ref(&a.mul_ref(b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_scalar(&self, c: &R) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self).expect("same order");
        }
        acc
    }

    /// Formal derivative; the top coefficient becomes zero.
    pub fn derivative(&self) -> Self {
        let w = self.order();
        let mut out = Self::zero(w);
        for n in 1..=w {
            out.coeffs[n - 1] = self.coeffs[n].mul_u64(n as u64);
        }
        out
    }

    /// Sum_j poly[j] * x^j for series coefficients `poly[j]`; `x` must have
    /// zero constant term.
    pub fn compose_poly(poly: &[TruncSeries<R>], x: &TruncSeries<R>) -> Result<Self> {
        if !x.coeffs[0].is_zero() {
            return Err(Error::Precondition("substituted series must have zero constant term".into()));
        }
        let w = x.order();
        let mut acc = Self::zero(w);
        for p in poly.iter().rev() {
            acc = acc.mul(x)?.add(p)?;
        }
        Ok(acc)
    }
}

impl<R: QAlgebra> TruncSeries<R> {
    pub fn scale(&self, x: &Q) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|a| a.scale(x)).collect() }
    }

    /// Formal exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Precondition("exp needs zero constant term".into()));
        }
        let w = self.order();
        let mut e = Self::one(w);
        // n e_n = sum_{k=1}^n k f_k e_{n-k}
        for n in 1..=w {
            let mut s = R::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() && !e.coeffs[n - k].is_zero() {
                    s.add_assign_ref(&self.coeffs[k].mul_ref(&e.coeffs[n - k]).mul_u64(k as u64));
                }
            }
            e.coeffs[n] = s.scale(&Q::new(1.into(), (n as u64).into()));
        }
        Ok(e)
    }

    /// Formal logarithm of a series with constant term one.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != R::one() {
            return Err(Error::Precondition("log needs constant term 1".into()));
        }
        let w = self.order();
        let mut l = Self::zero(w);
        // n l_n = n a_n - sum_{k=1}^{n-1} k l_k a_{n-k}
        for n in 1..=w {
            let mut s = self.coeffs[n].mul_u64(n as u64);
            for k in 1..n {
                if !l.coeffs[k].is_zero() && !self.coeffs[n - k].is_zero() {
                    s.sub_assign_ref(&l.coeffs[k].mul_ref(&self.coeffs[n - k]).mul_u64(k as u64));
                }
            }
            l.coeffs[n] = s.scale(&Q::new(1.into(), (n as u64).into()));
        }
        Ok(l)
    }

    /// Sum_j c_j x^j for scalar coefficients.
    pub fn compose_scalar_poly(poly: &[R], x: &TruncSeries<R>) -> Result<Self> {
        let w = x.order();
        let lifted: Vec<TruncSeries<R>> = poly.iter().map(|c| Self::constant(c.clone(), w)).collect();
        Self::compose_poly(&lifted, x)
    }
}

/// Taylor coefficients of exp(a t) up to order w.
pub fn exp_linear_coeffs(a: i64, w: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(w + 1);
    let mut c = qi(1);
    for n in 0..=w {
        out.push(c.clone());
        c = c * qi(a) / qi(n as i64 + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mzvalg::MzvElem;
    use crate::ring::q;
    use proptest::prelude::*;

    fn s(v: &[i64], w: usize) -> TruncSeries<Q> {
        TruncSeries::from_coeffs(v.iter().map(|&x| qi(x)).collect(), w)
    }

    #[test]
    fn mul_examples() {
        assert_eq!(s(&[1, 1], 2).mul(&s(&[1, -1], 2)).unwrap(), s(&[1, 0, -1], 2));
        assert!(s(&[0, 0, 1], 2).mul(&s(&[0, 1], 2)).unwrap().is_zero());
        assert_eq!(s(&[1, 1, 1, 1, 1, 1], 5).mul(&s(&[1, -1], 5)).unwrap(), s(&[1], 5));
        assert!(s(&[1], 2).mul(&s(&[1], 3)).is_err());
    }

    #[test]
    fn exp_log_examples() {
        assert_eq!(s(&[0], 4).exp().unwrap(), s(&[1], 4));
        let x = s(&[0, 1], 6);
        assert_eq!(x.exp().unwrap().log().unwrap(), x);
        assert!(s(&[1], 3).exp().is_err());
        assert!(s(&[2], 3).log().is_err());

        let z3 = MzvElem::zeta_comp(&[3]);
        let z5 = MzvElem::zeta_comp(&[5]);
        let mut f = TruncSeries::<MzvElem>::zero(6);
        f.set_coeff(3, z3.scale(&qi(4)));
        f.set_coeff(5, z5.scale(&qi(12)));
        let e = f.exp().unwrap();
        assert_eq!(e.coeff(0), &MzvElem::one());
        assert_eq!(e.coeff(3), &z3.scale(&qi(4)));
        assert_eq!(e.coeff(5), &z5.scale(&qi(12)));
        assert_eq!(e.coeff(6), &z3.mul_ref(&z3).scale(&qi(8)));
        assert!(e.coeff(4).is_zero());
    }

    #[test]
    fn compose_examples() {
        let t = s(&[0, 1], 3);
        let x2 = [s(&[0], 3), s(&[0], 3), s(&[1], 3)];
        assert_eq!(TruncSeries::compose_poly(&x2, &t).unwrap(), s(&[0, 0, 1], 3));
        let tt = s(&[0, 1, 1], 3);
        assert_eq!(TruncSeries::compose_poly(&x2, &tt).unwrap(), s(&[0, 0, 1, 2], 3));
        let e2x = exp_linear_coeffs(2, 3);
        let r = TruncSeries::compose_scalar_poly(&e2x, &t).unwrap();
        assert_eq!(r.coeffs(), &[qi(1), qi(2), qi(2), q(4, 3)]);
        assert!(TruncSeries::compose_poly(&x2, &s(&[1, 1], 3)).is_err());
    }

    fn arb(w: usize) -> impl Strategy<Value = TruncSeries<Q>> {
        prop::collection::vec(-6i64..7, w + 1).prop_map(move |v| s(&v, w))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb(5), b in arb(5), c in arb(5)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn exp_log_inverse(mut a in arb(6)) {
            a.set_coeff(0, qi(0));
            let e = a.exp().unwrap();
            prop_assert_eq!(e.log().unwrap(), a.clone());
            // (exp a)' = a' exp a, exact below the top coefficient.
            let lhs = e.derivative();
            let rhs = a.derivative().mul(&e).unwrap();
            prop_assert_eq!(&lhs.coeffs()[..6], &rhs.coeffs()[..6]);
        }
    }
}
