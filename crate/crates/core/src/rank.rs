//! Tensor rank: exact search for tiny tensors, lower bounds from bias and from
//! dual-code certificates, and the rank distribution of square matrices.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::bias::bias_exact;
use crate::dyadic::DyadicRational;
use crate::error::{capacity, Error, Result};
use crate::f2linalg::{dual_space, kernel, mat_rank, min_weight, rank_u64, BitMatrix, BitVec};
use crate::numerics::mrrw_constant;
use crate::tensors::{tensor_from_decomp, DenseTensor, RankDecomposition, RankOneTerm};

/// Default search budget for [`rank_exact`]: `((2^k-1)^d)^ceil(t/2)` terms.
pub const RANK_DEFAULT_BUDGET: u128 = 1 << 28;
pub const RANK_COUNT_MAX_N: usize = 16;
pub const CERTIFICATE_MAX_K: usize = 24;

/// Outcome of an exact rank search.
#[derive(Clone, Debug, PartialEq)]
pub enum RankOutcome {
    /// The rank, with a decomposition of that length when the search builds one.
    Rank {
        rank: usize,
        witness: Option<RankDecomposition>,
    },
    /// The rank is larger than the searched limit.
    ExceedsMax(usize),
}

impl RankOutcome {
    pub fn rank(&self) -> Option<usize> {
        match self {
            RankOutcome::Rank { rank, .. } => Some(*rank),
            RankOutcome::ExceedsMax(_) => None,
        }
    }
}

/// All nonzero rank-one tensors as packed `k^d`-bit keys, with their vectors.
struct BaseSet {
    d: usize,
    k: usize,
    keys: Vec<u64>,
}

impl BaseSet {
    fn new(d: usize, k: usize) -> Self {
        let per = (1u64 << k) - 1;
        let count = per.pow(d as u32);
        let mut keys = Vec::with_capacity(count as usize);
        for idx in 0..count {
            keys.push(Self::key_of(&Self::vectors_of(idx, d, k), k));
        }
        Self { d, k, keys }
    }

    /// Base index `idx` in mixed radix `2^k - 1`, block 1 most significant.
    fn vectors_of(idx: u64, d: usize, k: usize) -> Vec<u64> {
        let per = (1u64 << k) - 1;
        let mut rest = idx;
        let mut vs = vec![0u64; d];
        for j in (0..d).rev() {
            vs[j] = rest % per + 1;
            rest /= per;
        }
        vs
    }

    fn key_of(vs: &[u64], k: usize) -> u64 {
        let mut flats = vec![0usize];
        for &v in vs {
            let mut next = Vec::new();
            for &f in &flats {
                for i in 0..k {
                    if (v >> i) & 1 == 1 {
                        next.push(f * k + i);
                    }
                }
            }
            flats = next;
        }
        flats.iter().fold(0u64, |key, &f| key | 1 << f)
    }

    fn term(&self, idx: usize) -> RankOneTerm {
        let vs = Self::vectors_of(idx as u64, self.d, self.k);
        RankOneTerm::new(vs.iter().map(|&v| BitVec::from_u64(self.k, v)).collect()).expect("equal lengths")
    }
}

fn packed_key(t: &DenseTensor) -> u64 {
    t.bits().as_u64()
}

/// Exact rank if it is at most `t_max`, with the default budget.
pub fn rank_exact(t: &DenseTensor, t_max: usize) -> Result<RankOutcome> {
    rank_exact_with_budget(t, t_max, RANK_DEFAULT_BUDGET)
}

/// Exact rank by meet-in-the-middle: every tensor within `ceil(t_max/2)`
/// rank-one terms of zero is tabulated with its distance, and the rank is
/// the least `dist(B) + dist(T + B)` over tabulated `B`.
pub fn rank_exact_with_budget(t: &DenseTensor, t_max: usize, budget: u128) -> Result<RankOutcome> {
    let (d, k) = (t.d(), t.k());
    let small = |rank: usize, witness: Option<RankDecomposition>| {
        Ok(if rank <= t_max {
            RankOutcome::Rank { rank, witness }
        } else {
            RankOutcome::ExceedsMax(t_max)
        })
    };
    if t.is_zero() {
        return small(0, Some(RankDecomposition::new(d, k, vec![])?));
    }
    match d {
        0 => return small(1, Some(RankDecomposition::new(0, k, vec![RankOneTerm::new(vec![])?])?)),
        1 => {
            let term = RankOneTerm::new(vec![t.bits().clone()])?;
            return small(1, Some(RankDecomposition::new(1, k, vec![term])?));
        }
        2 => {
            let rows = (0..k)
                .map(|i| {
                    let mut r = BitVec::zeros(k);
                    r.xor_range_from(0, t.bits(), i * k, k);
                    r
                })
                .collect();
            return small(mat_rank(&BitMatrix::from_rows(k, rows)?), None);
        }
        _ => {}
    }
    if t.len() > 64 {
        return Err(capacity("rank search tensor entries k^d", t.len(), 64));
    }
    let radius = t_max.div_ceil(2);
    let base_count = ((1u128 << k) - 1).pow(d as u32);
    let work = base_count.checked_pow(radius as u32).unwrap_or(u128::MAX);
    if work > budget {
        return Err(capacity(
            format!("rank search d={d} k={k} t_max={t_max}"),
            format!("{base_count}^{radius} = {work} terms"),
            budget,
        ));
    }
    let base = BaseSet::new(d, k);

    // key -> (distance, index of the last term on a shortest path)
    let mut ball: HashMap<u64, (u8, u32)> = HashMap::new();
    ball.insert(0, (0, u32::MAX));
    let mut frontier = vec![0u64];
    for dist in 1..=radius {
        let mut next = Vec::new();
        for &b in &frontier {
            for (i, &key) in base.keys.iter().enumerate() {
                let s = b ^ key;
                ball.entry(s).or_insert_with(|| {
                    next.push(s);
                    (dist as u8, i as u32)
                });
            }
        }
        frontier = next;
    }

    let target = packed_key(t);
    let mut best: Option<(usize, u64)> = None;
    for (&b, &(db, _)) in &ball {
        if let Some(&(dr, _)) = ball.get(&(target ^ b)) {
            let cand = usize::from(db) + usize::from(dr);
            if best.is_none_or(|(r, key)| cand < r || (cand == r && b < key)) {
                best = Some((cand, b));
            }
        }
    }
    let Some((rank, b)) = best else {
        return Ok(RankOutcome::ExceedsMax(t_max));
    };
    if rank > t_max {
        return Ok(RankOutcome::ExceedsMax(t_max));
    }
    let mut terms = Vec::with_capacity(rank);
    for start in [b, target ^ b] {
        let mut key = start;
        while key != 0 {
            let (_, idx) = ball[&key];
            terms.push(base.term(idx as usize));
            key ^= base.keys[idx as usize];
        }
    }
    let witness = RankDecomposition::new(d, k, terms)?;
    if tensor_from_decomp(&witness)? != *t {
        return Err(Error::Consistency("rank witness does not sum to the tensor".into()));
    }
    Ok(RankOutcome::Rank {
        rank,
        witness: Some(witness),
    })
}

/// Every set of `len` distinct nonzero rank-one terms summing to `t`
/// (`d >= 2`, `k^d <= 64`), in lexicographic order of term indices.
pub fn decompositions_of_length(t: &DenseTensor, len: usize, budget: u128) -> Result<Vec<RankDecomposition>> {
    let (d, k) = (t.d(), t.k());
    if d < 2 || t.len() > 64 {
        return Err(Error::Domain(format!(
            "decomposition search needs d >= 2 and k^d <= 64 (d={d}, k={k})"
        )));
    }
    let base = BaseSet::new(d, k);
    let n = base.keys.len();
    let combos = (0..len).fold(1u128, |acc, i| acc * (n - i.min(n)) as u128 / (i + 1) as u128);
    if combos > budget {
        return Err(capacity(format!("decompositions of length {len}"), combos, budget));
    }
    let target = packed_key(t);
    let mut found = Vec::new();
    let mut chosen = Vec::with_capacity(len);

    fn rec(
        keys: &[u64],
        start: usize,
        left: usize,
        acc: u64,
        target: u64,
        chosen: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            if acc == target {
                found.push(chosen.clone());
            }
            return;
        }
        for i in start..=keys.len().saturating_sub(left) {
            chosen.push(i);
            rec(keys, i + 1, left - 1, acc ^ keys[i], target, chosen, found);
            chosen.pop();
        }
    }
    let mut idx_sets = Vec::new();
    rec(&base.keys, 0, len, 0, target, &mut chosen, &mut idx_sets);
    for set in idx_sets {
        found.push(RankDecomposition::new(
            d,
            k,
            set.iter().map(|&i| base.term(i)).collect(),
        )?);
    }
    Ok(found)
}

/// `1 + max{t >= 0 : (1 - 2^(1-d))^t > bias}`, or 0 when `bias = 1`.
///
/// Any tensor of bias `bias` has rank at least the returned value. The
/// comparison is exact: `(2^(d-1) - 1)^t 2^e` against `m 2^((d-1)t)`.
pub fn rank_lb_bias(bias: &DyadicRational, d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::Domain(format!("rank bound from bias needs d >= 2, got {d}")));
    }
    if bias.is_zero() || *bias > DyadicRational::one() {
        return Err(Error::Domain(format!("bias {bias} outside (0, 1]")));
    }
    if *bias == DyadicRational::one() {
        return Ok(0);
    }
    let q = BigUint::one() << (d - 1);
    let p = &q - 1u32;
    let lhs_scale = BigUint::one() << bias.exponent();
    let m = bias.numerator();
    // c^t > bias  <=>  p^t 2^e > m q^t
    let (mut pt, mut qt) = (BigUint::one(), BigUint::one());
    let mut t = 0usize;
    loop {
        let (np, nq) = (&pt * &p, &qt * &q);
        if &np * &lhs_scale > m * &nq {
            pt = np;
            qt = nq;
            t += 1;
        } else {
            return Ok(t + 1);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateMethod {
    Bias,
    Code,
}

/// Evidence for a rank lower bound; fields not used by a method are `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankBoundCertificate {
    pub method: CertificateMethod,
    pub lower_bound: usize,
    pub bias_used: Option<DyadicRational>,
    pub terms: Option<usize>,
    pub kernel_dim: Option<usize>,
    pub dual_dim: Option<usize>,
    pub dual_min_weight: Option<usize>,
    pub reconstructed_bias: Option<DyadicRational>,
    pub first_block_independent: Option<bool>,
}

impl RankBoundCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Rank lower bound of `t` from its exact bias.
pub fn bias_certificate(t: &DenseTensor) -> Result<RankBoundCertificate> {
    let b = bias_exact(t)?;
    let lb = if t.d() >= 2 {
        rank_lb_bias(&b, t.d())?
    } else {
        usize::from(!t.is_zero())
    };
    Ok(RankBoundCertificate {
        method: CertificateMethod::Bias,
        lower_bound: lb,
        bias_used: Some(b),
        terms: None,
        kernel_dim: None,
        dual_dim: None,
        dual_min_weight: None,
        reconstructed_bias: None,
        first_block_independent: None,
    })
}

/// Certificate built from a trilinear decomposition `sum_i a_i (x) b_i (x) c_i`.
///
/// With `A = [a_1 .. a_t]`, `K = ker A` and `M_v = sum_{v_i = 1} b_i (x) c_i`,
/// the bias equals `|K| / 2^t * sum_{v in K^perp} 2^-rank(M_v)`; this value is
/// rebuilt from the decomposition and checked against [`bias_exact`].
pub fn code_certificate(dec: &RankDecomposition) -> Result<RankBoundCertificate> {
    let (d, k, t) = (dec.d(), dec.k(), dec.len());
    if d != 3 {
        return Err(Error::Domain(format!(
            "code certificate needs a trilinear decomposition, got d={d}"
        )));
    }
    if k == 0 || k > CERTIFICATE_MAX_K {
        return Err(capacity("code certificate side length", k, CERTIFICATE_MAX_K));
    }
    let mut a = BitMatrix::zeros(k, t);
    for (i, term) in dec.terms().iter().enumerate() {
        for r in term.vectors()[0].ones_iter() {
            a.set(r, i, true);
        }
    }
    let kern = kernel(&a);
    let dual = dual_space(&kern);
    let dual_min_weight = min_weight(&dual)?;

    // M_v as k rows of k bits, for each basis vector of K^perp
    let term_matrix = |i: usize| -> Vec<u64> {
        let vs = dec.terms()[i].vectors();
        let c = vs[2].as_u64();
        (0..k).map(|r| if vs[1].get(r) { c } else { 0 }).collect()
    };
    let basis_mats: Vec<Vec<u64>> = dual
        .basis()
        .iter()
        .map(|v| {
            v.ones_iter().fold(vec![0u64; k], |mut acc, i| {
                for (x, y) in acc.iter_mut().zip(term_matrix(i)) {
                    *x ^= y;
                }
                acc
            })
        })
        .collect();
    let mut cur = vec![0u64; k];
    let mut sum: u128 = 0;
    let mut scratch = vec![0u64; k];
    let mut add = |m: &[u64], sum: &mut u128| {
        scratch.copy_from_slice(m);
        *sum += 1u128 << (k - rank_u64(&mut scratch));
    };
    add(&cur, &mut sum);
    for g in 1u64..1 << dual.dim() {
        let b = g.trailing_zeros() as usize;
        for (x, y) in cur.iter_mut().zip(&basis_mats[b]) {
            *x ^= y;
        }
        add(&cur, &mut sum);
    }
    // 2^dim K * sum 2^(k - rank) / 2^(t + k)
    let reconstructed = DyadicRational::new(BigUint::from(sum) << kern.dim(), (t + k) as u64);
    let tensor = tensor_from_decomp(dec)?;
    let exact = bias_exact(&tensor)?;
    if reconstructed != exact {
        return Err(Error::Consistency(format!(
            "reconstructed bias {reconstructed} differs from exact bias {exact}"
        )));
    }

    // f(x, ., .) is nonzero for every x != 0 iff the k block-1 slices are independent
    let slices: Vec<BitVec> = (0..k)
        .map(|i| {
            let mut s = BitVec::zeros(k * k);
            s.xor_range_from(0, tensor.bits(), i * k * k, k * k);
            s
        })
        .collect();
    let independent = mat_rank(&BitMatrix::from_rows(k * k, slices)?) == k;
    if independent && kern.dim() != t - k {
        return Err(Error::Consistency(format!(
            "kernel dimension {} but t - k = {}",
            kern.dim(),
            t as i64 - k as i64
        )));
    }
    Ok(RankBoundCertificate {
        method: CertificateMethod::Code,
        lower_bound: rank_lb_bias(&reconstructed, 3)?,
        bias_used: None,
        terms: Some(t),
        kernel_dim: Some(kern.dim()),
        dual_dim: Some(dual.dim()),
        dual_min_weight: Some(dual_min_weight),
        reconstructed_bias: Some(reconstructed),
        first_block_independent: Some(independent),
    })
}

/// `k / rho*`, the rank bound implied asymptotically by a dual code of
/// dimension `k` and minimum weight at least `k`.
pub fn mrrw_rank_lb(k: usize) -> f64 {
    let (_, inv) = mrrw_constant(1e-12);
    inv * k as f64
}

/// Counts of `n x n` matrices over F2 by rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDistribution {
    pub n: usize,
    pub counts: Vec<BigUint>,
}

impl RankDistribution {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// `Pr[rank = r]` for a uniform matrix.
    pub fn probability(&self, r: usize) -> DyadicRational {
        DyadicRational::new(self.counts[r].clone(), (self.n * self.n) as u64)
    }
}

/// `counts[r] = (prod_{i<r} (2^n - 2^i))^2 / prod_{i<r} (2^r - 2^i)`.
pub fn rank_count(n: usize) -> Result<RankDistribution> {
    if n > RANK_COUNT_MAX_N {
        return Err(capacity("rank distribution size", n, RANK_COUNT_MAX_N));
    }
    let two = |e: usize| BigUint::one() << e;
    let counts = (0..=n)
        .map(|r| {
            let num: BigUint = (0..r).map(|i| two(n) - two(i)).product();
            let den: BigUint = (0..r).map(|i| two(r) - two(i)).product();
            &num * &num / den
        })
        .collect();
    Ok(RankDistribution { n, counts })
}

/// `bias(M_n) = E_y 2^(-n rank y) = sum_r counts[r] 2^(n(n-r)) / 2^(2n^2)`.
pub fn matmul_bias_exact(n: usize) -> Result<DyadicRational> {
    let dist = rank_count(n)?;
    let num: BigUint = dist.counts.iter().enumerate().map(|(r, c)| c << (n * (n - r))).sum();
    Ok(DyadicRational::new(num, (2 * n * n) as u64))
}

/// `n 2^(-3n^2/4)`, compared exactly through fourth powers.
pub fn matmul_bias_within_bound(value: &DyadicRational, n: usize) -> bool {
    // value^4 <= n^4 2^(-3n^2)
    let lhs = value.pow(4);
    let rhs = DyadicRational::new(BigUint::from(n).pow(4), (3 * n * n) as u64);
    lhs <= rhs
}

/// One row of [`claim_margin`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimRow {
    pub r: usize,
    pub probability: DyadicRational,
    pub bound: DyadicRational,
    pub ratio: f64,
    pub holds: bool,
}

/// `Pr[rank = r]` against `2^-(n-r)^2` for each `r`; reported, not asserted.
pub fn claim_margin(n: usize) -> Result<Vec<ClaimRow>> {
    let dist = rank_count(n)?;
    Ok((0..=n)
        .map(|r| {
            let probability = dist.probability(r);
            let bound = DyadicRational::pow2_neg(((n - r) * (n - r)) as u64);
            let ratio = ratio_f64(&probability, &bound);
            ClaimRow {
                r,
                holds: probability <= bound,
                probability,
                bound,
                ratio,
            }
        })
        .collect())
}

fn ratio_f64(a: &DyadicRational, b: &DyadicRational) -> f64 {
    // (ma / mb) * 2^(eb - ea)
    let ma = a.numerator().to_f64().unwrap_or(f64::INFINITY);
    let mb = b.numerator().to_f64().unwrap_or(f64::INFINITY);
    if mb.is_zero() {
        return f64::INFINITY;
    }
    ma / mb * 2f64.powi(b.exponent() as i32 - a.exponent() as i32)
}
