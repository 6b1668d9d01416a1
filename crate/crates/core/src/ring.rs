//! Minimal commutative-ring abstraction shared by word polynomials, series
//! and the MZV coefficient algebra.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};


/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn neg_ref(&self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn mul_u64(&self, n: u64) -> Self;

    fn sub_assign_ref(&mut self, other: &Self) {
        self.add_assign_ref(&other.neg_ref());
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign_ref(other);
        r
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.sub_assign_ref(other);
        r
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }
}

/// A ring containing the rationals.
pub trait QAlgebra: Ring {
    fn from_q(x: Q) -> Self;
    fn scale(&self, x: &Q) -> Self;
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn mul_u64(&self, n: u64) -> Self {
        self * BigInt::from(n)
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn mul_u64(&self, n: u64) -> Self {
        self * Q::from_integer(BigInt::from(n))
    }
}

impl QAlgebra for Q {
    fn from_q(x: Q) -> Self {
        x
    }
    fn scale(&self, x: &Q) -> Self {
        self * x
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(<BigInt as One>::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return <BigInt as Zero>::zero();
    }
    let k = k.min(n - k);
    let mut acc = <BigInt as One>::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Rising Pochhammer symbol (x)_n.
pub fn pochhammer(x: &Q, n: u32) -> Q {
    let mut acc = <Q as One>::one();
    let mut t = x.clone();
    for _ in 0..n {
        acc *= &t;
        t += <Q as One>::one();
    }
    acc
}

/// Harmonic number H_n.
pub fn harmonic(n: u32) -> Q {
    (1..=n).fold(<Q as Zero>::zero(), |acc, k| acc + q(1, k as i64))
}

/// Bernoulli numbers B_0..B_n with B_1 = -1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    let mut b = vec![<Q as Zero>::zero(); n + 1];
    b[0] = <Q as One>::one();
    if n >= 1 {
        b[1] = q(-1, 2);
    }
    // tangent numbers T_1..T_m by the integer recurrence of Brent and Harvey
    let m = n / 2;
    let mut t = vec![BigInt::from(0); m + 1];
    if m >= 1 {
        t[1] = BigInt::from(1);
    }
    for k in 2..=m {
        t[k] = &t[k - 1] * BigInt::from(k - 1);
    }
    for k in 2..=m {
        for j in k..=m {
            t[j] = &t[j - 1] * BigInt::from(j - k) + &t[j] * BigInt::from(j - k + 2);
        }
    }
    // B_2k = (-1)^(k-1) 2k T_k / (4^k (4^k - 1))
    for k in 1..=m {
        let four_k = BigInt::from(1) << (2 * k);
        let num = &t[k] * BigInt::from(2 * k);
        let v = Q::new(num, &four_k * (&four_k - 1));
        b[2 * k] = if k % 2 == 1 { v } else { -v };
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], <Q as Zero>::zero());
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[8], q(-1, 30));
        // against the defining recurrence sum_k binom(m+1, k) B_k = 0
        let b = bernoulli_numbers(40);
        for m in 1..=40u32 {
            let mut s = <Q as Zero>::zero();
            for k in 0..=m {
                s += Q::from_integer(binomial(m + 1, k)) * &b[k as usize];
            }
            assert!(<Q as Zero>::is_zero(&s), "m = {m}");
        }
    }

    #[test]
    fn pochhammer_and_harmonic() {
        assert_eq!(pochhammer(&q(1, 2), 3), q(15, 8));
        assert_eq!(pochhammer(&qi(-2), 3), <Q as Zero>::zero());
        assert_eq!(harmonic(0), <Q as Zero>::zero());
        assert_eq!(harmonic(4), q(25, 12));
        assert_eq!(binomial(10, 3), BigInt::from(120));
    }

    #[test]
    fn ring_pow() {
        assert_eq!(q(2, 3).pow(3), q(8, 27));
        assert_eq!(qi(5).pow(0), qi(1));
    }
}
