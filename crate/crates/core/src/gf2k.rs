//! Arithmetic in GF(2^k) in a polynomial basis, `1 <= k <= 64`.
//!
//! Elements are `u64` coefficient masks (bit `i` is the coefficient of `x^i`);
//! the modulus is a `u128` mask of degree exactly `k`.

use std::fmt;

use crate::error::{Error, Result};
use crate::f2linalg::BitVec;

pub const MAX_DEGREE: u32 = 64;

/// Carry-less product of two polynomials of degree < 64.
#[inline]
fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let a = a as u128;
    let mut b = b;
    while b != 0 {
        let i = b.trailing_zeros();
        acc ^= a << i;
        b &= b - 1;
    }
    acc
}

#[inline]
fn degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

/// Remainder of `a` modulo `m` (both as polynomials over F2).
fn poly_rem(mut a: u128, m: u128) -> u128 {
    let dm = degree(m);
    while a != 0 && degree(a) >= dm {
        a ^= m << (degree(a) - dm);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Rabin-style test: `p` of degree `k` is irreducible iff
/// `gcd(x^(2^i) - x mod p, p) = 1` for every `1 <= i <= k/2`.
pub fn is_irreducible(p: u128) -> bool {
    let k = degree(p);
    if k < 1 {
        return false;
    }
    let mut power = poly_rem(0b10, p); // x^(2^0)
    for _ in 1..=k / 2 {
        power = poly_rem(clmul(power as u64, power as u64), p);
        if poly_gcd(p, power ^ 0b10) != 1 {
            return false;
        }
    }
    true
}

/// The field GF(2^k) modulo the smallest irreducible polynomial of degree `k`
/// (smallest as an integer bitmask).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Gf2kField {
    k: u32,
    modulus: u128,
}

pub fn make_field(k: u32) -> Result<Gf2kField> {
    if !(1..=MAX_DEGREE).contains(&k) {
        return Err(Error::Domain(format!("extension degree {k} outside 1..={MAX_DEGREE}")));
    }
    let lo = 1u128 << k;
    let modulus = (lo..lo << 1)
        .find(|&p| is_irreducible(p))
        .expect("an irreducible polynomial exists in every degree");
    Ok(Gf2kField { k, modulus })
}

impl Gf2kField {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// Mask selecting the `k` coefficient bits.
    pub fn element_mask(&self) -> u64 {
        if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        }
    }

    pub fn size(&self) -> u128 {
        1u128 << self.k
    }

    pub fn element(&self, coeffs: u64) -> Result<FieldElement<'_>> {
        if coeffs & !self.element_mask() != 0 {
            return Err(Error::Domain(format!(
                "{coeffs:#x} has bits above degree {}",
                self.k - 1
            )));
        }
        Ok(FieldElement { field: self, coeffs })
    }

    /// The class of `x^e`.
    pub fn monomial(&self, e: u64) -> u64 {
        let mut result = 1u64 & self.element_mask();
        if self.k == 1 {
            // x is 0 in F2[x]/(x); x^0 = 1
            return if e == 0 { 1 } else { 0 };
        }
        let mut base = poly_rem(0b10, self.modulus) as u64;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_raw(result, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        result
    }

    #[inline]
    pub fn mul_raw(&self, a: u64, b: u64) -> u64 {
        poly_rem(clmul(a, b), self.modulus) as u64
    }

    #[inline]
    pub fn square_raw(&self, a: u64) -> u64 {
        self.mul_raw(a, a)
    }

    /// `a + a^2 + ... + a^(2^(k-1))`, which lies in the prime field.
    pub fn trace_raw(&self, a: u64) -> bool {
        let mut acc = a;
        let mut s = a;
        for _ in 1..self.k {
            s = self.square_raw(s);
            acc ^= s;
        }
        debug_assert!(acc <= 1, "trace must land in F2");
        acc & 1 == 1
    }
}

impl fmt::Display for Gf2kField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {}", self.k, poly_to_string(self.modulus))
    }
}

/// Human-readable polynomial, e.g. `x^3+x+1`.
pub fn poly_to_string(p: u128) -> String {
    if p == 0 {
        return "0".into();
    }
    let mut terms = Vec::new();
    for i in (0..128).rev() {
        if (p >> i) & 1 == 1 {
            terms.push(match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            });
        }
    }
    terms.join("+")
}

/// An element of a particular [`Gf2kField`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement<'f> {
    field: &'f Gf2kField,
    coeffs: u64,
}

impl<'f> FieldElement<'f> {
    pub fn field(&self) -> &'f Gf2kField {
        self.field
    }

    pub fn coeffs(&self) -> u64 {
        self.coeffs
    }

    pub fn to_bitvec(&self) -> BitVec {
        BitVec::from_u64(self.field.k as usize, self.coeffs)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.k, other.field.k));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self {
            field: self.field,
            coeffs: self.coeffs ^ other.coeffs,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self {
            field: self.field,
            coeffs: self.field.mul_raw(self.coeffs, other.coeffs),
        })
    }

    pub fn trace(&self) -> bool {
        self.field.trace_raw(self.coeffs)
    }
}

/// Convenience wrapper for [`FieldElement::mul`].
pub fn gf_mul<'f>(a: &FieldElement<'f>, b: &FieldElement<'f>) -> Result<FieldElement<'f>> {
    a.mul(b)
}

/// Convenience wrapper for [`FieldElement::trace`].
pub fn trace(a: &FieldElement<'_>) -> bool {
    a.trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// All irreducibles of degree k by trial division with every lower-degree polynomial.
    fn irreducibles_by_trial_division(k: u32) -> Vec<u128> {
        let lo = 1u128 << k;
        (lo..lo << 1)
            .filter(|&p| (2u128..1 << (k / 2 + 1)).all(|q| degree(q) > k as i32 / 2 || poly_rem(p, q) != 0))
            .collect()
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(make_field(1).unwrap().modulus(), 0b10);
        assert_eq!(make_field(2).unwrap().modulus(), 0b111);
        assert_eq!(make_field(3).unwrap().modulus(), 0b1011);
        assert_eq!(make_field(8).unwrap().modulus(), 0x11b);
        assert_eq!(make_field(64).unwrap().modulus(), (1u128 << 64) | 0b11011);
        assert!(make_field(0).is_err());
        assert!(make_field(65).is_err());
    }

    #[test]
    fn rabin_test_matches_trial_division() {
        for k in 1..=10 {
            let lo = 1u128 << k;
            let fast: Vec<u128> = (lo..lo << 1).filter(|&p| is_irreducible(p)).collect();
            assert_eq!(fast, irreducibles_by_trial_division(k), "degree {k}");
        }
    }

    #[test]
    fn multiplication_examples() {
        let f = make_field(2).unwrap();
        let w = f.element(0b10).unwrap();
        let one = f.element(1).unwrap();
        let zero = f.element(0).unwrap();
        assert_eq!(gf_mul(&w, &w).unwrap().coeffs(), 0b11);
        assert_eq!(gf_mul(&w, &one).unwrap(), w);
        assert_eq!(gf_mul(&w, &zero).unwrap(), zero);
        let g = make_field(3).unwrap();
        let other = g.element(1).unwrap();
        assert_eq!(gf_mul(&w, &other), Err(Error::FieldMismatch(2, 3)));
        assert!(f.element(0b100).is_err());
    }

    #[test]
    fn trace_examples() {
        let f = make_field(2).unwrap();
        assert!(!trace(&f.element(0).unwrap()));
        assert!(!trace(&f.element(1).unwrap()));
        assert!(trace(&f.element(0b10).unwrap()));
        let g = make_field(3).unwrap();
        assert!(trace(&g.element(1).unwrap()));
        let h = make_field(1).unwrap();
        assert!(trace(&h.element(1).unwrap()));
    }

    #[test]
    fn trace_is_linear_and_frobenius_invariant() {
        for k in 1..=8 {
            let f = make_field(k).unwrap();
            let n = 1u64 << k;
            for a in 0..n {
                assert_eq!(f.trace_raw(f.square_raw(a)), f.trace_raw(a));
                for b in 0..n {
                    assert_eq!(f.trace_raw(a ^ b), f.trace_raw(a) ^ f.trace_raw(b));
                }
            }
        }
    }

    #[test]
    fn trace_is_balanced() {
        for k in 1..=16 {
            let f = make_field(k).unwrap();
            let zeros = (0..1u64 << k).filter(|&a| !f.trace_raw(a)).count();
            assert_eq!(zeros, 1 << (k - 1), "k = {k}");
        }
    }

    #[test]
    fn trace_form_is_nondegenerate() {
        for k in 1..=8 {
            let f = make_field(k).unwrap();
            for a in 1..1u64 << k {
                assert!((0..1u64 << k).any(|b| f.trace_raw(f.mul_raw(a, b))), "k={k} a={a}");
            }
        }
    }

    #[test]
    fn every_nonzero_element_is_invertible() {
        for k in 1..=8 {
            let f = make_field(k).unwrap();
            for a in 1..1u64 << k {
                assert!((1..1u64 << k).any(|b| f.mul_raw(a, b) == 1));
            }
        }
    }

    #[test]
    fn monomial_matches_repeated_multiplication() {
        let f = make_field(5).unwrap();
        let mut acc = 1u64;
        for e in 0..40 {
            assert_eq!(f.monomial(e), acc);
            acc = f.mul_raw(acc, 0b10);
        }
        assert_eq!(make_field(1).unwrap().monomial(0), 1);
        assert_eq!(make_field(1).unwrap().monomial(3), 0);
    }

    proptest! {
        #[test]
        fn field_axioms(k in 1u32..=64, a: u64, b: u64, c: u64) {
            let f = make_field(k).unwrap();
            let m = f.element_mask();
            let (a, b, c) = (a & m, b & m, c & m);
            prop_assert_eq!(f.mul_raw(a, b), f.mul_raw(b, a));
            prop_assert_eq!(f.mul_raw(f.mul_raw(a, b), c), f.mul_raw(a, f.mul_raw(b, c)));
            prop_assert_eq!(f.mul_raw(a, b ^ c), f.mul_raw(a, b) ^ f.mul_raw(a, c));
            prop_assert_eq!(f.mul_raw(a, 1), a);
        }
    }
}
