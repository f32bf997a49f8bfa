//! Dense d-dimensional tensors over F2 and their rank-one decompositions.
//!
//! A tensor `T : [k]^d -> F2` is stored as `k^d` packed bits. Indices are
//! 0-based in code; the flat index of `(i_1, ..., i_d)` is
//! `sum_j i_j * k^(d-j)`, so `i_1` varies slowest and `i_d` fastest. Each
//! tensor is identified with its d-linear form
//! `f_T(x_1, ..., x_d) = sum T(i_1..i_d) x_{1,i_1} ... x_{d,i_d}`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{capacity, Error, Result};
use crate::f2linalg::BitVec;
use crate::gf2k::make_field;

/// Upper limit on materialized tensor entries (128 MiB of bits).
pub const MAX_TENSOR_BITS: u64 = 1 << 30;
pub const TRACE_TENSOR_MAX_K: usize = 24;
pub const MATMUL_TENSOR_MAX_N: usize = 4;

/// `k^d`, or `None` on overflow.
pub fn num_entries(d: usize, k: usize) -> Option<u64> {
    let mut n: u64 = 1;
    for _ in 0..d {
        n = n.checked_mul(k as u64)?;
    }
    Some(n)
}

fn checked_entries(d: usize, k: usize) -> Result<usize> {
    match num_entries(d, k) {
        Some(n) if n <= MAX_TENSOR_BITS => Ok(n as usize),
        Some(n) => Err(capacity(
            format!("dense tensor d={d} k={k}"),
            format!("{n} bits"),
            MAX_TENSOR_BITS,
        )),
        None => Err(capacity(
            format!("dense tensor d={d} k={k}"),
            "overflowing bit count",
            MAX_TENSOR_BITS,
        )),
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DenseTensor {
    d: usize,
    k: usize,
    bits: BitVec,
}

impl DenseTensor {
    pub fn zeros(d: usize, k: usize) -> Result<Self> {
        let n = checked_entries(d, k)?;
        Ok(Self {
            d,
            k,
            bits: BitVec::zeros(n),
        })
    }

    pub fn from_bits(d: usize, k: usize, bits: BitVec) -> Result<Self> {
        let n = checked_entries(d, k)?;
        if bits.len() != n {
            return Err(Error::Shape(format!(
                "{} bits for a d={d} k={k} tensor (need {n})",
                bits.len()
            )));
        }
        Ok(Self { d, k, bits })
    }

    /// Builds a tensor from `entry(index)` evaluated at every index.
    pub fn from_fn(d: usize, k: usize, mut entry: impl FnMut(&[usize]) -> bool) -> Result<Self> {
        let mut t = Self::zeros(d, k)?;
        let mut idx = vec![0usize; d];
        for flat in 0..t.bits.len() {
            if entry(&idx) {
                t.bits.set(flat, true);
            }
            for j in (0..d).rev() {
                idx[j] += 1;
                if idx[j] < k {
                    break;
                }
                idx[j] = 0;
            }
        }
        Ok(t)
    }

    /// A tensor with independent uniform entries.
    pub fn random(d: usize, k: usize, seed: u64) -> Result<Self> {
        let n = checked_entries(d, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::random_with(d, k, n, &mut rng))
    }

    pub(crate) fn random_with(d: usize, k: usize, n: usize, rng: &mut impl RngCore) -> Self {
        let words = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
        Self {
            d,
            k,
            bits: BitVec::from_words(n, words),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.d, "index arity");
        index.iter().fold(0, |acc, &i| {
            assert!(i < self.k, "index {i} out of range for side {}", self.k);
            acc * self.k + i
        })
    }

    pub fn get(&self, index: &[usize]) -> bool {
        self.bits.get(self.flat_index(index))
    }

    pub fn set(&mut self, index: &[usize], value: bool) {
        let f = self.flat_index(index);
        self.bits.set(f, value)
    }

    pub fn add_assign(&mut self, other: &DenseTensor) -> Result<()> {
        if (self.d, self.k) != (other.d, other.k) {
            return Err(Error::Shape(format!(
                "adding d={} k={} tensor to d={} k={} tensor",
                other.d, other.k, self.d, self.k
            )));
        }
        self.bits.xor_assign(&other.bits);
        Ok(())
    }

    /// The tensor as `k^(d-1)` rows over the last block, each a `k`-bit word.
    pub fn last_block_rows(&self) -> Result<Vec<u64>> {
        if self.k > 64 {
            return Err(capacity("row view of a tensor (side length)", self.k, 64));
        }
        if self.d == 0 {
            return Ok(vec![self.bits.as_u64()]);
        }
        let nrows = self.bits.len() / self.k.max(1);
        Ok((0..nrows).map(|r| self.bits.read_bits(r * self.k, self.k)).collect())
    }

    /// Substitutes `x` into block `block` (1-based), giving a `(d-1)`-dimensional tensor.
    pub fn contract(&self, block: usize, x: &BitVec) -> Result<DenseTensor> {
        if block == 0 || block > self.d {
            return Err(Error::Domain(format!("block {block} outside 1..={}", self.d)));
        }
        if x.len() != self.k {
            return Err(Error::Shape(format!(
                "vector of length {} for side {}",
                x.len(),
                self.k
            )));
        }
        let outer = num_entries(block - 1, self.k).expect("fits") as usize;
        let inner = num_entries(self.d - block, self.k).expect("fits") as usize;
        let mut out = BitVec::zeros(outer * inner);
        for o in 0..outer {
            for i in x.ones_iter() {
                out.xor_range_from(o * inner, &self.bits, (o * self.k + i) * inner, inner);
            }
        }
        Ok(DenseTensor {
            d: self.d - 1,
            k: self.k,
            bits: out,
        })
    }

    /// `f_T(x_1, ..., x_d)`.
    pub fn evaluate(&self, xs: &[BitVec]) -> Result<bool> {
        if xs.len() != self.d {
            return Err(Error::Shape(format!(
                "{} vectors for a {}-linear form",
                xs.len(),
                self.d
            )));
        }
        let mut cur = self.clone();
        for x in xs {
            cur = cur.contract(1, x)?;
        }
        Ok(cur.bits.get(0))
    }
}

/// A rank-one tensor `u_1 (x) ... (x) u_d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RankOneTerm {
    vectors: Vec<BitVec>,
}

impl RankOneTerm {
    pub fn new(vectors: Vec<BitVec>) -> Result<Self> {
        if let Some(first) = vectors.first() {
            if vectors.iter().any(|v| v.len() != first.len()) {
                return Err(Error::Shape("rank-one term with vectors of different lengths".into()));
            }
        }
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[BitVec] {
        &self.vectors
    }

    pub fn d(&self) -> usize {
        self.vectors.len()
    }

    /// `prod_j <u_j, x_j>`.
    pub fn evaluate(&self, xs: &[BitVec]) -> bool {
        self.vectors.iter().zip(xs).all(|(u, x)| u.dot(x))
    }

    /// XORs the outer product into `bits` (flat layout of a `k^d` tensor).
    fn accumulate(&self, k: usize, bits: &mut BitVec) {
        fn rec(vs: &[BitVec], k: usize, base: usize, bits: &mut BitVec) {
            match vs.split_first() {
                None => bits.flip(base),
                Some((u, rest)) => {
                    for i in u.ones_iter() {
                        rec(rest, k, base * k + i, bits);
                    }
                }
            }
        }
        rec(&self.vectors, k, 0, bits)
    }

    pub fn to_tensor(&self) -> Result<DenseTensor> {
        let k = self.vectors.first().map_or(1, BitVec::len);
        let mut t = DenseTensor::zeros(self.d(), k)?;
        self.accumulate(k, &mut t.bits);
        Ok(t)
    }
}

/// A list of rank-one terms sharing `(d, k)`; its length bounds the rank from above.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankDecomposition {
    d: usize,
    k: usize,
    terms: Vec<RankOneTerm>,
}

impl RankDecomposition {
    pub fn new(d: usize, k: usize, terms: Vec<RankOneTerm>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if t.d() != d || t.vectors.iter().any(|v| v.len() != k) {
                return Err(Error::Shape(format!(
                    "term {i} does not have {d} vectors of length {k}"
                )));
            }
        }
        Ok(Self { d, k, terms })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[RankOneTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `sum_i prod_j <u_{i,j}, x_j>`, evaluated without materializing the tensor.
    pub fn evaluate(&self, xs: &[BitVec]) -> bool {
        self.terms.iter().filter(|t| t.evaluate(xs)).count() % 2 == 1
    }
}

pub fn tensor_from_decomp(dec: &RankDecomposition) -> Result<DenseTensor> {
    let mut t = DenseTensor::zeros(dec.d, dec.k)?;
    for term in &dec.terms {
        term.accumulate(dec.k, &mut t.bits);
    }
    Ok(t)
}

pub fn evaluate(t: &DenseTensor, xs: &[BitVec]) -> Result<bool> {
    t.evaluate(xs)
}

pub fn contract(t: &DenseTensor, block: usize, x: &BitVec) -> Result<DenseTensor> {
    t.contract(block, x)
}

/// `T(i, j, l) = Trace(b_i b_j b_l)` for the polynomial basis `b_i = x^i` of GF(2^k).
pub fn trace_tensor(k: usize) -> Result<DenseTensor> {
    if k == 0 || k > TRACE_TENSOR_MAX_K {
        return Err(capacity("trace tensor side", k, TRACE_TENSOR_MAX_K));
    }
    let field = make_field(k as u32)?;
    // b_i b_j b_l = x^(i+j+l)
    let traces: Vec<bool> = (0..3 * k as u64).map(|e| field.trace_raw(field.monomial(e))).collect();
    DenseTensor::from_fn(3, k, |ix| traces[ix[0] + ix[1] + ix[2]])
}

/// The `n x n` matrix multiplication tensor, `sum X_{ij} Y_{jl} Z_{il}`, with
/// side `n^2` and row-major variable order in each block.
pub fn matmul_tensor(n: usize) -> Result<DenseTensor> {
    if n == 0 || n > MATMUL_TENSOR_MAX_N {
        return Err(capacity("matrix multiplication tensor size", n, MATMUL_TENSOR_MAX_N));
    }
    let mut t = DenseTensor::zeros(3, n * n)?;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                t.set(&[i * n + j, j * n + l, i * n + l], true);
            }
        }
    }
    Ok(t)
}

/// The form `<x_1 x_2 ... x_{d-1}, x_d>` with field products in GF(2^k):
/// `T(i_1..i_d)` is coordinate `i_d` of `b_{i_1} ... b_{i_{d-1}}`.
pub fn explicit_form_tensor(d: usize, k: usize) -> Result<DenseTensor> {
    if d == 0 {
        return Err(Error::Domain("explicit form needs d >= 1".into()));
    }
    if k == 0 || k > 64 {
        return Err(Error::Domain(format!("side {k} outside 1..=64")));
    }
    checked_entries(d, k)?;
    let field = make_field(k as u32)?;
    let powers: Vec<u64> = (0..=((d - 1) * (k - 1)) as u64).map(|e| field.monomial(e)).collect();
    DenseTensor::from_fn(d, k, |ix| {
        let (last, head) = ix.split_last().expect("d >= 1");
        let e: usize = head.iter().sum();
        (powers[e] >> last) & 1 == 1
    })
}

/// `t` rank-one terms with independent uniform vectors; deterministic in `seed`.
pub fn random_rank_decomp(d: usize, k: usize, t: usize, seed: u64) -> RankDecomposition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_rank_decomp_with(d, k, t, &mut rng)
}

pub(crate) fn random_vec(k: usize, rng: &mut impl RngCore) -> BitVec {
    BitVec::from_words(k, (0..k.div_ceil(64)).map(|_| rng.next_u64()).collect())
}

pub(crate) fn random_rank_decomp_with(d: usize, k: usize, t: usize, rng: &mut impl RngCore) -> RankDecomposition {
    let terms = (0..t)
        .map(|_| RankOneTerm {
            vectors: (0..d).map(|_| random_vec(k, rng)).collect(),
        })
        .collect();
    RankDecomposition { d, k, terms }
}
