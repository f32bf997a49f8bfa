//! Multilinear polynomials over F2 in at most 64 variables.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::tensors::DenseTensor;

/// A sum of distinct multilinear monomials. Each monomial is a bitmask of
/// 0-based variable indices; the empty mask is the constant 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Polynomial {
    n: usize,
    monomials: BTreeSet<u64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Result<Self> {
        if n > 64 {
            return Err(Error::Domain(format!("{n} variables (at most 64 supported)")));
        }
        Ok(Self {
            n,
            monomials: BTreeSet::new(),
        })
    }

    /// Sums the given monomials over F2, so repeated monomials cancel in pairs.
    pub fn from_monomials(n: usize, monomials: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut p = Self::zero(n)?;
        for m in monomials {
            p.add_monomial(m)?;
        }
        Ok(p)
    }

    /// The set-multilinear polynomial of `t`; block `j`, coordinate `i`
    /// (both 0-based) is variable `j*k + i`.
    pub fn from_tensor(t: &DenseTensor) -> Result<Self> {
        let (d, k) = (t.d(), t.k());
        let mut p = Self::zero(d * k)?;
        for flat in t.bits().ones_iter() {
            let mut rest = flat;
            let mut mask = 0u64;
            for j in (0..d).rev() {
                mask |= 1u64 << (j * k + rest % k);
                rest /= k;
            }
            p.monomials.insert(mask);
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &BTreeSet<u64> {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Degree of the polynomial, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.monomials.iter().map(|m| m.count_ones()).max()
    }

    pub fn add_monomial(&mut self, mask: u64) -> Result<()> {
        if self.n < 64 && mask >> self.n != 0 {
            return Err(Error::Domain(format!(
                "monomial {mask:#x} uses a variable beyond n={}",
                self.n
            )));
        }
        if !self.monomials.remove(&mask) {
            self.monomials.insert(mask);
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.n != other.n {
            return Err(Error::Shape(format!(
                "adding polynomials in {} and {} variables",
                self.n, other.n
            )));
        }
        Ok(Self {
            n: self.n,
            monomials: self.monomials.symmetric_difference(&other.monomials).copied().collect(),
        })
    }

    /// Value at the point whose variable `v` is bit `v` of `x`.
    pub fn evaluate(&self, x: u64) -> bool {
        self.monomials.iter().filter(|&&m| x & m == m).count() % 2 == 1
    }
}

/// Lists the monomials in `F2P1` body syntax, one per line.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2P1 n={}", self.n)?;
        for &m in &self.monomials {
            if m == 0 {
                write!(f, "\n#")?;
                continue;
            }
            let vars: Vec<String> = (0..64)
                .filter(|v| (m >> v) & 1 == 1)
                .map(|v| (v + 1).to_string())
                .collect();
            write!(f, "\n{}", vars.join(" "))?;
        }
        Ok(())
    }
}
