//! The coefficient algebra: polynomials over Q in free symbols zeta(w) for
//! convergent words w, extended by ip = i*pi/2 subject to
//! ip^2 = -(3/2) zeta(x0 x1). Polynomials in lambda over that algebra are
//! [`LambdaPoly`].

use std::cmp::Ordering;
use std::fmt;

use num_traits::Signed;
use smallvec::SmallVec;

use crate::error::Result;
use crate::numeval::{self, CBall};
use crate::ring::{q, QAlgebra, Ring, Q};
use crate::words::Word;

/// A product of zeta symbols, optionally times ip. Factors are sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MzvMonomial {
    factors: SmallVec<[Word; 4]>,
    ip: bool,
}

impl MzvMonomial {
    pub fn one() -> Self {
        MzvMonomial { factors: SmallVec::new(), ip: false }
    }

    pub fn ip() -> Self {
        MzvMonomial { factors: SmallVec::new(), ip: true }
    }

    pub fn new(mut factors: Vec<Word>, ip: bool) -> Self {
        assert!(factors.iter().all(|w| w.is_convergent()), "zeta symbols need convergent words");
        factors.sort_unstable();
        MzvMonomial { factors: factors.into(), ip }
    }

    pub fn factors(&self) -> &[Word] {
        &self.factors
    }

    pub fn has_ip(&self) -> bool {
        self.ip
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && !self.ip
    }

    pub fn weight(&self) -> usize {
        self.factors.iter().map(|w| w.len()).sum::<usize>() + self.ip as usize
    }

    /// Product of two monomials as (monomial, rational factor).
    fn mul(&self, other: &Self) -> (MzvMonomial, Q) {
        let mut f: SmallVec<[Word; 4]> = SmallVec::with_capacity(self.factors.len() + other.factors.len() + 1);
        f.extend_from_slice(&self.factors);
        f.extend_from_slice(&other.factors);
        let (ip, c) = if self.ip && other.ip {
            f.push(Word::from_composition(&[2]).unwrap());
            (false, q(-3, 2))
        } else {
            (self.ip || other.ip, Q::one())
        };
        f.sort_unstable();
        (MzvMonomial { factors: f, ip }, c)
    }

    fn without_ip(&self) -> Self {
        MzvMonomial { factors: self.factors.clone(), ip: false }
    }

    fn dual_canonical(&self) -> Self {
        let mut f: SmallVec<[Word; 4]> = self.factors.iter().map(|w| (*w).min(w.dual())).collect();
        f.sort_unstable();
        MzvMonomial { factors: f, ip: self.ip }
    }
}

impl fmt::Display for MzvMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        // factors are sorted, so equal ones are adjacent
        let mut parts: Vec<String> = Vec::new();
        for run in self.factors.chunk_by(|a, b| a == b) {
            let z = run[0].composition_string();
            parts.push(if run.len() == 1 { z } else { format!("{z}^{}", run.len()) });
        }
        if self.ip {
            parts.push("ip".into());
        }
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Debug for MzvMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    /// The zero element, homogeneous of every weight.
    Zero,
    Homogeneous(usize),
    Mixed,
}

/// Element of the MZV algebra: sorted monomials with nonzero rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MzvElem {
    terms: Vec<(MzvMonomial, Q)>,
}

impl MzvElem {
    pub fn rational(x: Q) -> Self {
        if x.is_zero() {
            return Self::default();
        }
        MzvElem { terms: vec![(MzvMonomial::one(), x)] }
    }

    pub fn zeta(w: Word) -> Self {
        MzvElem { terms: vec![(MzvMonomial::new(vec![w], false), Q::one())] }
    }

    /// zeta(m_1, ..., m_r) in composition notation.
    pub fn zeta_comp(m: &[u32]) -> Self {
        Self::zeta(Word::from_composition(m).expect("valid composition"))
    }

    pub fn ip() -> Self {
        MzvElem { terms: vec![(MzvMonomial::ip(), Q::one())] }
    }

    pub fn monomial(m: MzvMonomial, c: Q) -> Self {
        Self::from_terms(vec![(m, c)])
    }

    pub fn from_terms(mut v: Vec<(MzvMonomial, Q)>) -> Self {
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(MzvMonomial, Q)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        MzvElem { terms: out }
    }

    pub fn terms(&self) -> &[(MzvMonomial, Q)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational number this element equals, if it has no symbols.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn weight(&self) -> Weight {
        let mut it = self.terms.iter().map(|(m, _)| m.weight());
        match it.next() {
            None => Weight::Zero,
            Some(w) => {
                if it.all(|x| x == w) {
                    Weight::Homogeneous(w)
                } else {
                    Weight::Mixed
                }
            }
        }
    }

    pub fn is_homogeneous_of(&self, n: usize) -> bool {
        self.terms.iter().all(|(m, _)| m.weight() == n)
    }

    pub fn graded_component(&self, n: usize) -> Self {
        MzvElem { terms: self.terms.iter().filter(|(m, _)| m.weight() == n).cloned().collect() }
    }

    /// Terms without ip.
    pub fn real_part(&self) -> Self {
        MzvElem { terms: self.terms.iter().filter(|(m, _)| !m.ip).cloned().collect() }
    }

    /// The element y with self = real_part + ip * y.
    pub fn ip_part(&self) -> Self {
        MzvElem::from_terms(self.terms.iter().filter(|(m, _)| m.ip).map(|(m, c)| (m.without_ip(), c.clone())).collect())
    }

    pub fn has_ip(&self) -> bool {
        self.terms.iter().any(|(m, _)| m.ip)
    }

    /// Complex conjugate: ip -> -ip.
    pub fn conj(&self) -> Self {
        MzvElem {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), if m.ip { -c } else { c.clone() })).collect(),
        }
    }

    /// Rewrites every symbol zeta(w) as zeta(w') with w' the smaller of w and
    /// its dual word. Duality zeta(w) = zeta(dual(w)) is a theorem, so the
    /// value is unchanged.
    pub fn duality_canonical(&self) -> Self {
        MzvElem::from_terms(self.terms.iter().map(|(m, c)| (m.dual_canonical(), c.clone())).collect())
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate_other { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), if negate_other { -c } else { c.clone() })));
        MzvElem { terms: out }
    }

    /// Numeric enclosure with zeta symbols evaluated at `prec` bits.
    pub fn numeric(&self, prec: u32) -> Result<CBall> {
        numeval::mzv_elem_numeric(self, prec)
    }

    /// Largest absolute rational coefficient (diagnostics only).
    pub fn max_abs_coeff(&self) -> Q {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or_else(Q::zero)
    }
}

impl fmt::Display for MzvElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if num_traits::One::is_one(&a) {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MzvElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Ring for MzvElem {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::rational(Q::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        if other.terms.is_empty() {
            return;
        }
        if self.terms.is_empty() {
            *self = other.clone();
            return;
        }
        *self = self.merge(other, false);
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        if other.terms.is_empty() {
            return;
        }
        *self = self.merge(other, true);
    }
    fn neg_ref(&self) -> Self {
        MzvElem { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        if self.terms.is_empty() || other.terms.is_empty() {
            return Self::zero();
        }
        if let Some(r) = self.as_rational() {
            return other.scale(&r);
        }
        if let Some(r) = other.as_rational() {
            return self.scale(&r);
        }
        let mut v = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let (m, f) = ma.mul(mb);
                v.push((m, ca * cb * f));
            }
        }
        Self::from_terms(v)
    }
    fn mul_u64(&self, n: u64) -> Self {
        self.scale(&Q::from_integer(n.into()))
    }
}

impl QAlgebra for MzvElem {
    fn from_q(x: Q) -> Self {
        Self::rational(x)
    }
    fn scale(&self, x: &Q) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        MzvElem { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * x)).collect() }
    }
}

/// Polynomial in the formal variable lambda with [`MzvElem`] coefficients.
/// `coeffs[d]` is the coefficient of lambda^d; trailing zeros are trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LambdaPoly {
    coeffs: Vec<MzvElem>,
}

impl LambdaPoly {
    pub fn from_coeffs(mut coeffs: Vec<MzvElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LambdaPoly { coeffs }
    }

    pub fn constant(c: MzvElem) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn rational(x: Q) -> Self {
        Self::constant(MzvElem::rational(x))
    }

    /// c * lambda^d.
    pub fn monomial(d: usize, c: MzvElem) -> Self {
        let mut v = vec![MzvElem::zero(); d];
        v.push(c);
        Self::from_coeffs(v)
    }

    pub fn lambda() -> Self {
        Self::monomial(1, MzvElem::one())
    }

    pub fn coeffs(&self) -> &[MzvElem] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> MzvElem {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    /// Degree in lambda; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Every lambda-coefficient is of MZV weight `n`.
    pub fn is_homogeneous_of(&self, n: usize) -> bool {
        self.coeffs.iter().all(|c| c.is_homogeneous_of(n))
    }

    pub fn has_ip(&self) -> bool {
        self.coeffs.iter().any(|c| c.has_ip())
    }

    pub fn as_rational_poly(&self) -> Option<Vec<Q>> {
        self.coeffs.iter().map(|c| c.as_rational()).collect()
    }

    pub fn map(&self, f: impl Fn(&MzvElem) -> MzvElem) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// Multiplies by lambda^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return Self::default();
        }
        let mut v = vec![MzvElem::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        LambdaPoly { coeffs: v }
    }

    /// Drops powers of lambda above `d`.
    pub fn truncate_degree(&self, d: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(d + 1).cloned().collect())
    }

    pub fn mul_mzv(&self, c: &MzvElem) -> Self {
        self.map(|x| x.mul_ref(c))
    }

    pub fn duality_canonical(&self) -> Self {
        self.map(|c| c.duality_canonical())
    }

    /// Evaluates every coefficient numerically at `prec` bits.
    pub fn numeric_coeffs(&self, prec: u32) -> Result<Vec<CBall>> {
        self.coeffs.iter().map(|c| c.numeric(prec)).collect()
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, c)| match d {
                0 => format!("({c})"),
                1 => format!("({c})*L"),
                _ => format!("({c})*L^{d}"),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Ring for LambdaPoly {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::constant(MzvElem::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), MzvElem::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            a.add_assign_ref(b);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), MzvElem::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            a.sub_assign_ref(b);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
    fn neg_ref(&self) -> Self {
        self.map(|c| c.neg_ref())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut v = vec![MzvElem::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j].add_assign_ref(&a.mul_ref(b));
                }
            }
        }
        Self::from_coeffs(v)
    }
    fn mul_u64(&self, n: u64) -> Self {
        self.map(|c| c.mul_u64(n))
    }
}

impl QAlgebra for LambdaPoly {
    fn from_q(x: Q) -> Self {
        Self::rational(x)
    }
    fn scale(&self, x: &Q) -> Self {
        self.map(|c| c.scale(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::qi;
    use proptest::prelude::*;

    fn z(m: &[u32]) -> MzvElem {
        MzvElem::zeta_comp(m)
    }

    #[test]
    fn unit_and_ip_square() {
        assert_eq!(z(&[2]).mul_ref(&MzvElem::one()), z(&[2]));
        assert_eq!(MzvElem::ip().mul_ref(&MzvElem::ip()), z(&[2]).scale(&q(-3, 2)));
        let p = z(&[2]).mul_ref(&z(&[3]));
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].0.factors().len(), 2);
    }

    #[test]
    fn weights() {
        assert_eq!(z(&[3]).weight(), Weight::Homogeneous(3));
        assert_eq!(z(&[2]).mul_ref(&z(&[2])).weight(), Weight::Homogeneous(4));
        assert_eq!(MzvElem::one().add_ref(&z(&[2])).weight(), Weight::Mixed);
        assert_eq!(MzvElem::one().weight(), Weight::Homogeneous(0));
        assert_eq!(MzvElem::ip().weight(), Weight::Homogeneous(1));
    }

    #[test]
    fn real_and_ip_parts() {
        let e = z(&[2]).add_ref(&MzvElem::ip().mul_ref(&z(&[3])).scale(&qi(5)));
        assert_eq!(e.real_part(), z(&[2]));
        assert_eq!(e.ip_part(), z(&[3]).scale(&qi(5)));
        assert_eq!(e.conj().ip_part(), z(&[3]).scale(&qi(-5)));
    }

    #[test]
    fn lambda_poly_arith() {
        let a = LambdaPoly::lambda().add_ref(&LambdaPoly::rational(qi(2)));
        let b = LambdaPoly::lambda().sub_ref(&LambdaPoly::rational(qi(2)));
        let p = a.mul_ref(&b);
        assert_eq!(p.as_rational_poly().unwrap(), vec![qi(-4), qi(0), qi(1)]);
        assert!(a.sub_ref(&a).is_zero());
    }

    fn arb_elem() -> impl Strategy<Value = MzvElem> {
        let atoms = prop_oneof![
            Just(MzvElem::one()),
            Just(MzvElem::ip()),
            Just(z(&[2])),
            Just(z(&[3])),
            Just(z(&[1, 2])),
        ];
        prop::collection::vec((atoms, -5i64..6), 0..4).prop_map(|v| {
            v.into_iter().fold(MzvElem::zero(), |acc, (a, c)| acc.add_ref(&a.scale(&qi(c))))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
            prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
            prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
            prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
            prop_assert!(a.sub_ref(&a).is_zero());
        }
    }
}
