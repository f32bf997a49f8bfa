//! Bit-packed linear algebra over F2.
//!
//! Coordinate `j` of a [`BitVec`] lives at bit `j % 64` of word `j / 64`, so
//! row reduction is a loop of word-wide XORs. Subspaces are always stored in
//! fully reduced row echelon form, which makes their representation canonical:
//! two [`Subspace`] values compare equal exactly when they span the same space.

use std::fmt;

use crate::error::{capacity, Error, Result};

/// Largest dimension [`min_weight`] will enumerate (2^28 codewords).
pub const MIN_WEIGHT_MAX_DIM: usize = 28;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

/// A vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The standard basis vector with a single one at `index` (0-based).
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    /// Builds a vector from the low `len` bits of `bits` (`len <= 64`).
    pub fn from_u64(len: usize, bits: u64) -> Self {
        assert!(len <= 64, "from_u64 takes at most 64 coordinates");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = bits;
            v.clear_tail();
        }
        v
    }

    /// Builds a vector from packed words; bits beyond `len` are discarded.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters; character `j` is coordinate `j`.
    pub fn parse_binary(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(v)
    }

    pub fn to_binary_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The first word, for vectors of at most 64 coordinates.
    #[inline]
    pub fn as_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "coordinate {index} out of range for length {}",
            self.len
        );
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "coordinate {index} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (index % 64);
        if value {
            self.words[index / 64] |= mask;
        } else {
            self.words[index / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len);
        self.words[index / 64] ^= 1u64 << (index % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest nonzero coordinate.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Iterator over the indices of nonzero coordinates, ascending.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Standard bilinear form `sum_j a_j b_j` over F2.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot product of vectors with different lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Reads `count <= 64` bits starting at coordinate `start`.
    pub fn read_bits(&self, start: usize, count: usize) -> u64 {
        debug_assert!(count <= 64 && start + count <= self.len);
        if count == 0 {
            return 0;
        }
        let w = start / 64;
        let off = start % 64;
        let mut v = self.words[w] >> off;
        if off != 0 && off + count > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        if count < 64 {
            v &= (1u64 << count) - 1;
        }
        v
    }

    /// XORs the low `count <= 64` bits of `bits` into coordinates `start..start+count`.
    pub fn xor_bits(&mut self, start: usize, count: usize, bits: u64) {
        debug_assert!(count <= 64 && start + count <= self.len);
        if count == 0 {
            return;
        }
        let bits = if count < 64 { bits & ((1u64 << count) - 1) } else { bits };
        let w = start / 64;
        let off = start % 64;
        self.words[w] ^= bits << off;
        if off != 0 && off + count > 64 {
            self.words[w + 1] ^= bits >> (64 - off);
        }
    }

    /// XORs `src[src_start..src_start+count]` into `self[dst_start..dst_start+count]`.
    pub fn xor_range_from(&mut self, dst_start: usize, src: &BitVec, src_start: usize, count: usize) {
        assert!(dst_start + count <= self.len && src_start + count <= src.len);
        let mut done = 0;
        while done < count {
            let chunk = (count - done).min(64);
            let bits = src.read_bits(src_start + done, chunk);
            self.xor_bits(dst_start + done, chunk, bits);
            done += chunk;
        }
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({})", self.to_binary_string())
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_binary_string())
    }
}

/// A dense matrix over F2 stored row by row.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Shape(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self { cols, rows })
    }

    /// Rows given as `u64` masks, bit `j` = column `j` (`cols <= 64`).
    pub fn from_u64_rows(cols: usize, rows: &[u64]) -> Self {
        Self {
            cols,
            rows: rows.iter().map(|&r| BitVec::from_u64(cols, r)).collect(),
        }
    }

    /// Parses rows written as bit strings, e.g. `["110", "011"]`.
    pub fn parse_rows(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let parsed = rows
            .iter()
            .map(|r| BitVec::parse_binary(r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(cols, parsed)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.ones_iter() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut out = BitVec::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }
}

/// Row rank over F2 of a matrix whose rows fit in single words.
///
/// The slice is used as scratch space.
pub fn rank_u64(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    let n = rows.len();
    for i in 0..n {
        let pivot_row = rows[i];
        if pivot_row == 0 {
            continue;
        }
        rank += 1;
        let low = pivot_row & pivot_row.wrapping_neg();
        for r in rows[i + 1..].iter_mut() {
            if *r & low != 0 {
                *r ^= pivot_row;
            }
        }
    }
    rank
}

/// Row rank over F2. The input is not modified.
pub fn mat_rank(m: &BitMatrix) -> usize {
    if m.cols <= 64 {
        let mut rows: Vec<u64> = m.rows.iter().map(BitVec::as_u64).collect();
        return rank_u64(&mut rows);
    }
    echelon_rows(m.rows.clone()).len()
}

/// Reduces `rows` to reduced row echelon form, dropping zero rows.
/// Returns `(pivot, row)` pairs sorted by pivot.
fn echelon_rows(rows: Vec<BitVec>) -> Vec<(usize, BitVec)> {
    let mut basis: Vec<(usize, BitVec)> = Vec::new();
    for mut v in rows {
        for (p, b) in &basis {
            if v.get(*p) {
                v.xor_assign(b);
            }
        }
        let Some(p) = v.first_one() else { continue };
        for (_, b) in basis.iter_mut() {
            if b.get(p) {
                b.xor_assign(&v);
            }
        }
        let pos = basis.partition_point(|(q, _)| *q < p);
        basis.insert(pos, (p, v));
    }
    basis
}

/// A subspace of F2^n held as a fully reduced echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: (0..ambient_dim).map(|i| BitVec::unit(ambient_dim, i)).collect(),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (p, b) in self.pivots.iter().zip(&self.basis) {
            if r.get(*p) {
                r.xor_assign(b);
            }
        }
        r
    }

    /// Enumerates all `2^dim` elements in Gray-code order, starting at zero.
    pub fn for_each_element(&self, mut f: impl FnMut(&BitVec)) {
        let mut cur = BitVec::zeros(self.ambient_dim);
        f(&cur);
        let total: u64 = 1u64 << self.dim();
        for g in 1..total {
            cur.xor_assign(&self.basis[g.trailing_zeros() as usize]);
            f(&cur);
        }
    }

    fn check_invariants(&self) -> bool {
        self.pivots.windows(2).all(|w| w[0] < w[1])
            && self
                .basis
                .iter()
                .zip(&self.pivots)
                .all(|(b, &p)| b.first_one() == Some(p))
            && self
                .basis
                .iter()
                .enumerate()
                .all(|(i, b)| self.pivots.iter().enumerate().all(|(j, &p)| (i == j) == b.get(p)))
    }
}

/// Fully reduced echelon basis of `span(vectors)` inside F2^`ambient_dim`.
pub fn echelonize(vectors: &[BitVec], ambient_dim: usize) -> Result<Subspace> {
    if let Some(bad) = vectors.iter().find(|v| v.len() != ambient_dim) {
        return Err(Error::Shape(format!(
            "vector of length {} in ambient dimension {ambient_dim}",
            bad.len()
        )));
    }
    let rows = echelon_rows(vectors.to_vec());
    let (pivots, basis) = rows.into_iter().unzip();
    let s = Subspace {
        ambient_dim,
        basis,
        pivots,
    };
    debug_assert!(s.check_invariants());
    Ok(s)
}

pub fn subspace_contains(s: &Subspace, v: &BitVec) -> Result<bool> {
    if v.len() != s.ambient_dim {
        return Err(Error::Shape(format!(
            "vector of length {} against ambient dimension {}",
            v.len(),
            s.ambient_dim
        )));
    }
    Ok(s.reduce(v).is_zero())
}

/// Null space `{v : A v = 0}`.
pub fn kernel(a: &BitMatrix) -> Subspace {
    let cols = a.ncols();
    let rref = echelon_rows(a.rows().to_vec());
    let mut is_pivot = vec![false; cols];
    for (p, _) in &rref {
        is_pivot[*p] = true;
    }
    let mut vectors = Vec::with_capacity(cols - rref.len());
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::unit(cols, f);
        for (p, row) in &rref {
            if row.get(f) {
                v.set(*p, true);
            }
        }
        vectors.push(v);
    }
    let k = echelonize(&vectors, cols).expect("kernel vectors have the ambient length");
    assert_eq!(k.dim() + rref.len(), cols, "rank-nullity");
    k
}

/// Orthogonal complement under the standard bilinear form.
pub fn dual_space(s: &Subspace) -> Subspace {
    let m = BitMatrix {
        cols: s.ambient_dim,
        rows: s.basis.clone(),
    };
    let d = kernel(&m);
    debug_assert_eq!(d.dim() + s.dim(), s.ambient_dim);
    d
}

/// Minimum Hamming weight of a nonzero element.
///
/// The zero space has no nonzero element; it returns the sentinel
/// `ambient_dim + 1`, which satisfies every weight lower bound vacuously.
pub fn min_weight(s: &Subspace) -> Result<usize> {
    if s.dim() > MIN_WEIGHT_MAX_DIM {
        return Err(capacity(
            "min_weight enumeration (subspace dimension)",
            s.dim(),
            MIN_WEIGHT_MAX_DIM,
        ));
    }
    let mut best = s.ambient_dim + 1;
    let mut first = true;
    s.for_each_element(|v| {
        if first {
            first = false;
            return;
        }
        best = best.min(v.weight());
    });
    Ok(best)
}

/// Number of basis vectors whose pivot falls in each block of `block_size`
/// coordinates; these are the dimensions of the block projections `U_j` of
/// the echelon decomposition, and they sum to `dim(S)`.
pub fn block_pivot_dims(s: &Subspace, num_blocks: usize, block_size: usize) -> Result<Vec<usize>> {
    if num_blocks * block_size != s.ambient_dim {
        return Err(Error::Shape(format!(
            "{num_blocks} blocks of size {block_size} do not tile ambient dimension {}",
            s.ambient_dim
        )));
    }
    let mut dims = vec![0; num_blocks];
    for &p in &s.pivots {
        dims[p / block_size] += 1;
    }
    assert_eq!(dims.iter().sum::<usize>(), s.dim());
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVec {
        BitVec::parse_binary(s).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> BitVec {
        BitVec::from_bools(&(0..len).map(|_| rng.gen::<bool>()).collect::<Vec<_>>())
    }

    /// Textbook elimination on a `Vec<Vec<bool>>`, independent of the packed code.
    fn dense_rank(rows: &[Vec<bool>]) -> usize {
        let mut m: Vec<Vec<bool>> = rows.to_vec();
        let ncols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..ncols {
            let Some(p) = (rank..m.len()).find(|&r| m[r][col]) else {
                continue;
            };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && m[r][col] {
                    let pivot = m[rank].clone();
                    for (x, y) in m[r].iter_mut().zip(pivot) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn bitvec_tail_is_clear() {
        let v = BitVec::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(v.words()[1], (1 << 6) - 1);
        let w = BitVec::from_u64(3, 0xff);
        assert_eq!(w.as_u64(), 0b111);
    }

    #[test]
    fn read_and_xor_bits_across_word_boundary() {
        let mut v = BitVec::zeros(130);
        v.xor_bits(60, 10, 0b1111111111);
        assert_eq!(v.read_bits(60, 10), 0b1111111111);
        assert_eq!(v.weight(), 10);
        let mut w = BitVec::zeros(130);
        w.xor_range_from(1, &v, 55, 75);
        assert_eq!(w.ones_iter().collect::<Vec<_>>(), (6..16).collect::<Vec<_>>());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mat_rank(&BitMatrix::identity(5)), 5);
        assert_eq!(mat_rank(&BitMatrix::zeros(4, 7)), 0);
        assert_eq!(mat_rank(&BitMatrix::parse_rows(&["11", "11"]).unwrap()), 1);
        assert_eq!(mat_rank(&BitMatrix::identity(100)), 100);
    }

    #[test]
    fn rank_agrees_with_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let r = rng.gen_range(1..=64);
            let c = rng.gen_range(1..=64);
            let density: f64 = rng.gen_range(0.05..0.95);
            let rows: Vec<Vec<bool>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_bool(density)).collect())
                .collect();
            let m = BitMatrix::from_rows(c, rows.iter().map(|x| BitVec::from_bools(x)).collect()).unwrap();
            assert_eq!(mat_rank(&m), dense_rank(&rows));
        }
    }

    #[test]
    fn rank_wide_matrices_use_general_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let r = rng.gen_range(1..=20);
            let rows: Vec<Vec<bool>> = (0..r).map(|_| (0..150).map(|_| rng.gen_bool(0.3)).collect()).collect();
            let m = BitMatrix::from_rows(150, rows.iter().map(|x| BitVec::from_bools(x)).collect()).unwrap();
            assert_eq!(mat_rank(&m), dense_rank(&rows));
        }
    }

    #[test]
    fn echelonize_examples() {
        let s = echelonize(&[bv("10"), bv("11"), bv("01")], 2).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis(), &[bv("10"), bv("01")]);
        assert_eq!(echelonize(&[], 3).unwrap().dim(), 0);
        let s = echelonize(&[bv("1100"), bv("0110"), bv("1010")], 4).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.check_invariants());
        assert!(matches!(echelonize(&[bv("10")], 3), Err(Error::Shape(_))));
    }

    #[test]
    fn echelonize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let n = rng.gen_range(1..100);
            let m = rng.gen_range(0..n + 3);
            let vs: Vec<_> = (0..m).map(|_| random_vec(&mut rng, n)).collect();
            let s = echelonize(&vs, n).unwrap();
            assert!(s.check_invariants());
            assert_eq!(echelonize(s.basis(), n).unwrap(), s);
        }
    }

    #[test]
    fn contains_examples() {
        // e1 (x) e1 flattened in F2^{2x2}
        let s = echelonize(&[bv("1000")], 4).unwrap();
        assert!(subspace_contains(&s, &BitVec::zeros(4)).unwrap());
        assert!(subspace_contains(&s, &bv("1000")).unwrap());
        assert!(!subspace_contains(&s, &bv("0001")).unwrap());
        assert!(subspace_contains(&s, &bv("100")).is_err());
    }

    #[test]
    fn contains_matches_rank_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..40);
            let m = rng.gen_range(0..n);
            let vs: Vec<_> = (0..m).map(|_| random_vec(&mut rng, n)).collect();
            let s = echelonize(&vs, n).unwrap();
            let v = if rng.gen_bool(0.5) {
                // random combination of the spanning set
                let mut acc = BitVec::zeros(n);
                for x in &vs {
                    if rng.gen() {
                        acc.xor_assign(x);
                    }
                }
                acc
            } else {
                random_vec(&mut rng, n)
            };
            let mut ext = s.basis().to_vec();
            ext.push(v.clone());
            let ext_rank = mat_rank(&BitMatrix::from_rows(n, ext).unwrap());
            assert_eq!(subspace_contains(&s, &v).unwrap(), ext_rank == s.dim());
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&BitMatrix::identity(6)).dim(), 0);
        assert_eq!(kernel(&BitMatrix::zeros(3, 5)).dim(), 5);
        let k = kernel(&BitMatrix::parse_rows(&["110", "011"]).unwrap());
        assert_eq!(k.dim(), 1);
        assert_eq!(k.basis(), &[bv("111")]);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual_space(&Subspace::full(4)).dim(), 0);
        assert_eq!(dual_space(&Subspace::zero(4)), Subspace::full(4));
        let s = echelonize(&[bv("111")], 3).unwrap();
        let d = dual_space(&s);
        assert_eq!(d.dim(), 2);
        let mut expected = Vec::new();
        for x in 0..8u64 {
            let v = BitVec::from_u64(3, x);
            if !v.dot(&bv("111")) {
                expected.push(v);
            }
        }
        assert_eq!(expected.len(), 4);
        for v in &expected {
            assert!(subspace_contains(&d, v).unwrap());
        }
    }

    #[test]
    fn kernel_and_dual_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let r = rng.gen_range(1..20);
            let c = rng.gen_range(1..80);
            let a = BitMatrix::from_rows(c, (0..r).map(|_| random_vec(&mut rng, c)).collect()).unwrap();
            let k = kernel(&a);
            assert_eq!(k.dim(), c - mat_rank(&a));
            for v in k.basis() {
                assert!(a.mul_vec(v).unwrap().is_zero());
            }
            let s = echelonize(a.rows(), c).unwrap();
            assert_eq!(dual_space(&dual_space(&s)), s);
            assert_eq!(dual_space(&k), s);
        }
    }

    #[test]
    fn min_weight_examples() {
        let s = echelonize(&[bv("1110"), bv("0111")], 4).unwrap();
        assert_eq!(min_weight(&s).unwrap(), 2);
        assert_eq!(min_weight(&echelonize(&[bv("1")], 1).unwrap()).unwrap(), 1);
        assert_eq!(min_weight(&Subspace::zero(5)).unwrap(), 6);
        assert!(matches!(min_weight(&Subspace::full(29)), Err(Error::Capacity { .. })));
    }

    #[test]
    fn block_pivot_dims_extremal_examples() {
        let (k, kp) = (4usize, 3usize);
        // V (x) F2^{k'} with V = span{e1, e2}
        let mut vs = Vec::new();
        for i in 0..2 {
            for j in 0..kp {
                vs.push(BitVec::unit(k * kp, i * kp + j));
            }
        }
        let s = echelonize(&vs, k * kp).unwrap();
        assert_eq!(block_pivot_dims(&s, k, kp).unwrap(), vec![3, 3, 0, 0]);

        // F2^k (x) W with W = span{110, 011}
        let w = [0b011u64, 0b110];
        let mut vs = Vec::new();
        for i in 0..k {
            for &wb in &w {
                let mut v = BitVec::zeros(k * kp);
                v.xor_bits(i * kp, kp, wb);
                vs.push(v);
            }
        }
        let s = echelonize(&vs, k * kp).unwrap();
        assert_eq!(block_pivot_dims(&s, k, kp).unwrap(), vec![2, 2, 2, 2]);

        assert_eq!(block_pivot_dims(&Subspace::zero(12), 4, 3).unwrap(), vec![0; 4]);
        assert!(block_pivot_dims(&Subspace::zero(12), 5, 3).is_err());
    }

    #[test]
    fn block_pivot_dims_sum_to_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let k = rng.gen_range(1..6);
            let kp = rng.gen_range(1..10);
            let m = rng.gen_range(0..k * kp + 2);
            let vs: Vec<_> = (0..m).map(|_| random_vec(&mut rng, k * kp)).collect();
            let s = echelonize(&vs, k * kp).unwrap();
            assert_eq!(block_pivot_dims(&s, k, kp).unwrap().iter().sum::<usize>(), s.dim());
        }
    }
}
