//! Bias and correlation of multilinear forms, exactly and by sampling.
//!
//! For `d >= 2` the exact path fixes the first `d-2` blocks, leaving a
//! bilinear form with matrix `M` whose bias is `2^-rank(M)`. The assignments
//! are visited in nested Gray-code order, so each step costs one slice XOR.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::DyadicRational;
use crate::error::{capacity, Error, Result};
use crate::f2linalg::rank_u64;
use crate::poly::Polynomial;
use crate::tensors::DenseTensor;

/// Largest `k(d-2)` that [`bias_exact`] will enumerate.
pub const EXACT_MAX_OUTER_BITS: usize = 30;
/// Largest `kd` that [`bias_bruteforce`] will enumerate.
pub const BRUTE_MAX_BITS: usize = 30;
/// Largest number of variables for truth-table correlation.
pub const CORR_MAX_VARS: usize = 26;
/// Work limit (in 64-bit word operations) for [`corr_class_max`].
pub const CLASS_MAX_WORK: u128 = 1 << 34;
pub const MC_CHUNK: u64 = 4096;

const SPLIT_BITS: usize = 4;

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Visits every contraction of the first `depth` blocks of `src` (rows of
/// side `side`) in Gray-code order. With `affine`, coordinate 0 of each block
/// is pinned to 1 and only the remaining coordinates vary.
fn enumerate(
    src: &[u64],
    side: usize,
    depth: usize,
    affine: bool,
    bufs: &mut [Vec<u64>],
    visit: &mut dyn FnMut(&[u64]),
) {
    if depth == 0 {
        visit(src);
        return;
    }
    let inner = src.len() / side;
    let lo = usize::from(affine);
    let (buf, rest) = bufs.split_first_mut().expect("one buffer per level");
    buf.clear();
    if affine {
        buf.extend_from_slice(&src[..inner]);
    } else {
        buf.resize(inner, 0);
    }
    enumerate(buf, side, depth - 1, affine, rest, visit);
    for g in 1u64..1 << (side - lo) {
        let c = lo + g.trailing_zeros() as usize;
        for (b, s) in buf.iter_mut().zip(&src[c * inner..(c + 1) * inner]) {
            *b ^= s;
        }
        enumerate(buf, side, depth - 1, affine, rest, visit);
    }
}

/// Sums `leaf` over all contractions of the first `depth` blocks, splitting
/// the top block's high coordinates across workers. Exact integer partial
/// sums make the result independent of scheduling.
fn contraction_sum(
    rows: &[u64],
    side: usize,
    depth: usize,
    affine: bool,
    leaf: &(dyn Fn(&[u64]) -> i128 + Sync),
) -> i128 {
    if depth == 0 {
        return leaf(rows);
    }
    let inner = rows.len() / side;
    let lo = usize::from(affine);
    let free = side - lo;
    let h = free.min(SPLIT_BITS);
    let low_free = free - h;
    (0u64..1 << h)
        .into_par_iter()
        .map(|hi| {
            let mut buf: Vec<u64> = if affine { rows[..inner].to_vec() } else { vec![0; inner] };
            for b in 0..h {
                if (hi >> b) & 1 == 1 {
                    let c = lo + low_free + b;
                    for (x, s) in buf.iter_mut().zip(&rows[c * inner..(c + 1) * inner]) {
                        *x ^= s;
                    }
                }
            }
            let mut bufs = vec![Vec::new(); depth - 1];
            let mut acc = 0i128;
            let mut visit = |m: &[u64]| acc += leaf(m);
            enumerate(&buf, side, depth - 1, affine, &mut bufs, &mut visit);
            for g in 1u64..1 << low_free {
                let c = lo + g.trailing_zeros() as usize;
                for (x, s) in buf.iter_mut().zip(&rows[c * inner..(c + 1) * inner]) {
                    *x ^= s;
                }
                enumerate(&buf, side, depth - 1, affine, &mut bufs, &mut visit);
            }
            acc
        })
        .sum()
}

fn rank_of(rows: &[u64]) -> usize {
    let mut m = [0u64; 65];
    m[..rows.len()].copy_from_slice(rows);
    rank_u64(&mut m[..rows.len()])
}

fn dyadic_from(count: u128, exponent: u64) -> DyadicRational {
    DyadicRational::new(BigUint::from(count), exponent)
}

fn check_outer(what: &str, k: usize, d: usize) -> Result<()> {
    if k > 64 {
        return Err(capacity(format!("{what} (side length)"), k, 64));
    }
    let outer = k * d.saturating_sub(2);
    if outer > EXACT_MAX_OUTER_BITS {
        return Err(capacity(
            format!("{what} enumeration bits k(d-2)"),
            outer,
            EXACT_MAX_OUTER_BITS,
        ));
    }
    Ok(())
}

/// `|E_x (-1)^{f_T(x)}|`, exactly.
pub fn bias_exact(t: &DenseTensor) -> Result<DyadicRational> {
    let (d, k) = (t.d(), t.k());
    match d {
        0 => return Ok(DyadicRational::one()),
        1 => {
            return Ok(if t.is_zero() {
                DyadicRational::one()
            } else {
                DyadicRational::zero()
            })
        }
        _ => {}
    }
    check_outer("exact bias", k, d)?;
    let rows = t.last_block_rows()?;
    let total = contraction_sum(&rows, k, d - 2, false, &|m| 1i128 << (k - rank_of(m)));
    Ok(dyadic_from(total as u128, (k * (d - 1)) as u64))
}

/// `|E_x (-1)^{f_T(x)}|` by evaluating the form at every point.
pub fn bias_bruteforce(t: &DenseTensor) -> Result<DyadicRational> {
    let (d, k) = (t.d(), t.k());
    if d == 0 {
        return Ok(DyadicRational::one());
    }
    if k * d > BRUTE_MAX_BITS {
        return Err(capacity("brute-force bias bits kd", k * d, BRUTE_MAX_BITS));
    }
    let rows = t.last_block_rows()?;
    let head_bits = k * (d - 1);
    let zmask = low_mask(k);

    // w(x_1..x_{d-1}) = XOR of the rows whose prefix coordinates are all set
    fn row_sum(rows: &[u64], k: usize, blocks: &[u64], prefix: usize) -> u64 {
        match blocks.split_first() {
            None => rows[prefix],
            Some((&x, rest)) => {
                let mut w = 0;
                let mut bits = x;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    w ^= row_sum(rows, k, rest, prefix * k + i);
                    bits &= bits - 1;
                }
                w
            }
        }
    }

    let zeros: u64 = (0u64..1 << head_bits)
        .into_par_iter()
        .map(|a| {
            let blocks: Vec<u64> = (0..d - 1).map(|j| (a >> (j * k)) & zmask).collect();
            let w = row_sum(&rows, k, &blocks, 0);
            (0..=zmask).filter(|z| (w & z).count_ones().is_multiple_of(2)).count() as u64
        })
        .sum();
    let n = 1u128 << (k * d);
    let signed = 2 * zeros as u128;
    let diff = signed.abs_diff(n);
    Ok(dyadic_from(diff, (k * d) as u64))
}

/// A sampled estimate of the signed bias `E (-1)^f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiasEstimate {
    pub point: f64,
    /// Hoeffding half-width for the mean of `N` values in `[-1, 1]`.
    pub ci_halfwidth: f64,
    pub samples: u64,
    pub confidence: f64,
    pub seed: u64,
}

/// Hoeffding half-width for the mean of `n` independent `[-1, 1]` values.
pub fn hoeffding_halfwidth(n: u64, confidence: f64) -> f64 {
    (2.0 * (2.0 / (1.0 - confidence)).ln() / n as f64).sqrt()
}

/// One chunk of the sample stream, independent of how chunks are scheduled.
pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Monte-Carlo estimate of `E (-1)^{f_T}` over `samples` uniform points.
///
/// Samples are drawn in fixed chunks with per-chunk streams of `seed`, so the
/// estimate does not depend on the worker count. Biases well below
/// `1/sqrt(samples)` cannot be resolved.
pub fn bias_mc(t: &DenseTensor, samples: u64, confidence: f64, seed: u64) -> Result<BiasEstimate> {
    if samples == 0 {
        return Err(Error::Domain("bias_mc needs at least one sample".into()));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!("confidence {confidence} outside (0, 1)")));
    }
    let (d, k) = (t.d(), t.k());
    let rows = if k <= 64 && d >= 1 {
        Some(t.last_block_rows()?)
    } else {
        None
    };
    let chunks = samples.div_ceil(MC_CHUNK);
    let signed: i64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let n = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut acc = 0i64;
            for _ in 0..n {
                let value = match &rows {
                    Some(rows) => eval_rows(rows, d, k, &mut rng),
                    None => {
                        let xs: Vec<_> = (0..d).map(|_| crate::tensors::random_vec(k, &mut rng)).collect();
                        t.evaluate(&xs).expect("shapes match")
                    }
                };
                acc += if value { -1 } else { 1 };
            }
            acc
        })
        .sum();
    Ok(BiasEstimate {
        point: signed as f64 / samples as f64,
        ci_halfwidth: hoeffding_halfwidth(samples, confidence),
        samples,
        confidence,
        seed,
    })
}

/// Evaluates the form at a random point using the row view (`k <= 64`).
fn eval_rows(rows: &[u64], d: usize, k: usize, rng: &mut impl RngCore) -> bool {
    let mask = low_mask(k);
    let mut prefixes = vec![0usize];
    for _ in 0..d - 1 {
        let x = rng.next_u64() & mask;
        let mut next = Vec::with_capacity(prefixes.len() * x.count_ones() as usize);
        for &p in &prefixes {
            let mut bits = x;
            while bits != 0 {
                next.push(p * k + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        prefixes = next;
    }
    let z = rng.next_u64() & mask;
    let w = prefixes.iter().fold(0u64, |w, &p| w ^ rows[p]);
    (w & z).count_ones() % 2 == 1
}

/// Truth table of `p` over all `2^n` points, bit `x` of the packed table.
fn truth_table(p: &Polynomial) -> Vec<u64> {
    let n = p.num_vars();
    let mut tt = vec![0u64; (1usize << n).div_ceil(64)];
    for &m in p.monomials() {
        tt[(m >> 6) as usize] ^= 1 << (m & 63);
    }
    anf_to_truth_table(&mut tt, n);
    tt
}

/// In-place Moebius transform from monomial coefficients to values.
fn anf_to_truth_table(tt: &mut [u64], n: usize) {
    const MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    for (i, mask) in MASKS.iter().enumerate().take(n) {
        for w in tt.iter_mut() {
            *w ^= (*w & mask) << (1 << i);
        }
    }
    for i in 6..n {
        let step = 1usize << (i - 6);
        for w in 0..tt.len() {
            if w & step != 0 {
                tt[w] ^= tt[w ^ step];
            }
        }
    }
}

fn table_bias(tt: &[u64], n: usize) -> DyadicRational {
    let ones: u64 = tt.iter().map(|w| u64::from(w.count_ones())).sum();
    let total = 1u128 << n;
    dyadic_from((2 * ones as u128).abs_diff(total), n as u64)
}

fn check_corr_vars(t: &DenseTensor) -> Result<usize> {
    let n = t.d() * t.k();
    if n > CORR_MAX_VARS {
        return Err(capacity("correlation truth table variables kd", n, CORR_MAX_VARS));
    }
    Ok(n)
}

/// `bias(f_T - P)`, where `P` is over the `kd` flattened variables.
pub fn corr_exact(t: &DenseTensor, p: &Polynomial) -> Result<DyadicRational> {
    let n = check_corr_vars(t)?;
    if p.num_vars() != n {
        return Err(Error::Shape(format!(
            "polynomial in {} variables for a form in {n}",
            p.num_vars()
        )));
    }
    let diff = Polynomial::from_tensor(t)?.add(p)?;
    Ok(table_bias(&truth_table(&diff), n))
}

/// Result of [`corr_class_max`].
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMax {
    pub corr: DyadicRational,
    pub witness: Polynomial,
    pub class_size_log2: usize,
}

fn binomial(n: usize, r: usize) -> u128 {
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `max_g Corr(f_T, g)` over all polynomials `g` of degree at most `ell`.
pub fn corr_class_max(t: &DenseTensor, ell: usize) -> Result<ClassMax> {
    let n = check_corr_vars(t)?;
    let ell = ell.min(n);
    let num_monomials: u128 = (0..=ell).map(|i| binomial(n, i)).sum();
    let words = (1u128 << n).div_ceil(64);
    if num_monomials > 40 || (words << num_monomials) > CLASS_MAX_WORK {
        return Err(capacity(
            format!("degree-{ell} class over {n} variables (class size 2^{num_monomials})"),
            format!("2^{num_monomials} polynomials x {words} words"),
            format!("{CLASS_MAX_WORK} word operations"),
        ));
    }
    let monomials: Vec<u64> = (0..1u64 << n).filter(|m| m.count_ones() as usize <= ell).collect();
    let tables: Vec<Vec<u64>> = monomials
        .iter()
        .map(|&m| truth_table(&Polynomial::from_monomials(n, [m]).expect("in range")))
        .collect();
    let mut current = truth_table(&Polynomial::from_tensor(t)?);
    let total = 1u128 << n;
    let valid = if n < 6 { low_mask(1 << n) } else { u64::MAX };
    let score = |tt: &[u64]| {
        let ones: u64 = tt.iter().map(|w| u64::from((w & valid).count_ones())).sum();
        (2 * ones as u128).abs_diff(total)
    };
    let mut best = (score(&current), 0u64);
    let mut state = 0u64;
    for g in 1u64..1 << monomials.len() {
        let c = g.trailing_zeros() as usize;
        state ^= 1 << c;
        for (w, s) in current.iter_mut().zip(&tables[c]) {
            *w ^= s;
        }
        let s = score(&current);
        if s > best.0 {
            best = (s, state);
            if s == total {
                break;
            }
        }
    }
    let witness = Polynomial::from_monomials(
        n,
        (0..monomials.len())
            .filter(|i| (best.1 >> i) & 1 == 1)
            .map(|i| monomials[i]),
    )?;
    Ok(ClassMax {
        corr: dyadic_from(best.0, n as u64),
        witness,
        class_size_log2: num_monomials as usize,
    })
}

/// The extended tensor of side `k+1` for `f_T + sum_i g_i`, where coordinate 0
/// of each block stands for the constant 1 and `parts[i]` omits block `i`.
fn block_affine_rows(t: &DenseTensor, parts: &[DenseTensor]) -> Result<Vec<u64>> {
    let (d, k) = (t.d(), t.k());
    if d < 2 {
        return Err(Error::Domain("partition forms need d >= 2".into()));
    }
    if parts.len() != d {
        return Err(Error::Shape(format!("{} parts for a {d}-linear form", parts.len())));
    }
    for (i, g) in parts.iter().enumerate() {
        if g.d() != d - 1 || g.k() != k {
            return Err(Error::Shape(format!(
                "part {i} is d={} k={}, expected d={} k={k}",
                g.d(),
                g.k(),
                d - 1
            )));
        }
    }
    let s = k + 1;
    if s > 64 {
        return Err(capacity("partition-form side length", s, 64));
    }
    let nrows = crate::tensors::num_entries(d - 1, s).expect("small") as usize;
    let mut rows = vec![0u64; nrows];
    let mut put = |ext: &[usize]| {
        let (last, head) = ext.split_last().expect("d >= 2");
        let r = head.iter().fold(0, |acc, &i| acc * s + i);
        rows[r] ^= 1 << last;
    };
    let decode = |flat: usize, dims: usize| -> Vec<usize> {
        let mut ix = vec![0; dims];
        let mut rest = flat;
        for j in (0..dims).rev() {
            ix[j] = rest % k + 1;
            rest /= k;
        }
        ix
    };
    for flat in t.bits().ones_iter() {
        put(&decode(flat, d));
    }
    for (i, g) in parts.iter().enumerate() {
        for flat in g.bits().ones_iter() {
            let mut ix = decode(flat, d - 1);
            ix.insert(i, 0);
            put(&ix);
        }
    }
    Ok(rows)
}

/// `Corr(f_T, g)` for `g = sum_i g_i` with `g_i` a `(d-1)`-linear form in all
/// blocks except block `i` (`parts[i]`, 0-based).
///
/// Each fixing of the first `d-2` blocks leaves an affine-bilinear form
/// `c + b.y + a.z + y^T M z`, whose signed bias is `+-2^-rank(M)` or 0.
pub fn corr_partition_form(t: &DenseTensor, parts: &[DenseTensor]) -> Result<DyadicRational> {
    let (d, k) = (t.d(), t.k());
    check_outer("partition-form correlation", k, d)?;
    let rows = block_affine_rows(t, parts)?;
    let signed = contraction_sum(&rows, k + 1, d - 2, true, &|m| affine_bilinear_signed(m, k));
    Ok(dyadic_from(signed.unsigned_abs(), (k * (d - 1)) as u64))
}

/// `2^k * E_y (-1)^{c + b.y} [sum_i y_i M_i = a]` for the `(k+1)x(k+1)` block.
fn affine_bilinear_signed(m: &[u64], k: usize) -> i128 {
    let c = m[0] & 1 == 1;
    let a = m[0] >> 1;
    // pivot rows by leading bit: (row, parity of b over the combination)
    let mut pivots: [(u64, bool); 64] = [(0, false); 64];
    let mut rank = 0;
    for &row in m.iter().skip(1).take(k) {
        let (mut v, mut par) = (row >> 1, row & 1 == 1);
        while v != 0 {
            let lead = 63 - v.leading_zeros() as usize;
            if pivots[lead].0 == 0 {
                break;
            }
            v ^= pivots[lead].0;
            par ^= pivots[lead].1;
        }
        if v == 0 {
            if par {
                return 0;
            }
        } else {
            pivots[63 - v.leading_zeros() as usize] = (v, par);
            rank += 1;
        }
    }
    let (mut v, mut par) = (a, false);
    while v != 0 {
        let lead = 63 - v.leading_zeros() as usize;
        if pivots[lead].0 == 0 {
            return 0;
        }
        v ^= pivots[lead].0;
        par ^= pivots[lead].1;
    }
    let mag = 1i128 << (k - rank);
    if c ^ par {
        -mag
    } else {
        mag
    }
}

/// The polynomial of `sum_i g_i` over the `kd` flattened variables.
pub fn partition_form_polynomial(d: usize, k: usize, parts: &[DenseTensor]) -> Result<Polynomial> {
    if parts.len() != d {
        return Err(Error::Shape(format!("{} parts for a {d}-linear form", parts.len())));
    }
    let mut total = Polynomial::zero(d * k)?;
    for (i, g) in parts.iter().enumerate() {
        let p = Polynomial::from_tensor(g)?;
        for &m in p.monomials() {
            // shift blocks at and after i up by one block
            let low = m & low_mask(i * k);
            let high = (m & !low_mask(i * k)) << k;
            total.add_monomial(low | high)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2linalg::{mat_rank, BitMatrix, BitVec};
    use crate::tensors::{matmul_tensor, random_rank_decomp, tensor_from_decomp, trace_tensor, RankOneTerm};
    use proptest::prelude::*;
    use rand::RngCore;

    fn dy(n: u64, e: u64) -> DyadicRational {
        DyadicRational::new(n, e)
    }

    fn trace_formula(k: u64) -> DyadicRational {
        dy((1 << (k + 1)) - 1, 2 * k)
    }

    #[test]
    fn zero_tensor_is_fully_biased() {
        for (d, k) in [(1, 3), (2, 4), (3, 2), (4, 2)] {
            let z = DenseTensor::zeros(d, k).unwrap();
            assert_eq!(bias_exact(&z).unwrap(), DyadicRational::one());
            assert_eq!(bias_bruteforce(&z).unwrap(), DyadicRational::one());
        }
        let e = DenseTensor::from_bits(1, 2, BitVec::parse_binary("01").unwrap()).unwrap();
        assert_eq!(bias_exact(&e).unwrap(), DyadicRational::zero());
        assert_eq!(bias_bruteforce(&e).unwrap(), DyadicRational::zero());
    }

    #[test]
    fn trace_tensor_bias_small() {
        for k in 2..=7 {
            let t = trace_tensor(k).unwrap();
            assert_eq!(bias_exact(&t).unwrap(), trace_formula(k as u64), "k={k}");
            assert_eq!(bias_bruteforce(&t).unwrap(), trace_formula(k as u64), "k={k}");
        }
        assert_eq!(bias_exact(&trace_tensor(2).unwrap()).unwrap(), dy(7, 4));
    }

    #[test]
    fn matmul_bias() {
        assert_eq!(bias_exact(&matmul_tensor(2).unwrap()).unwrap(), dy(29, 7));
        assert_eq!(bias_bruteforce(&matmul_tensor(2).unwrap()).unwrap(), dy(29, 7));
        assert_eq!(bias_exact(&matmul_tensor(1).unwrap()).unwrap(), dy(3, 2));
    }

    #[test]
    fn rank_one_trilinear() {
        let ones = BitVec::ones(2);
        let t = RankOneTerm::new(vec![ones.clone(), ones.clone(), ones])
            .unwrap()
            .to_tensor()
            .unwrap();
        assert_eq!(bias_bruteforce(&t).unwrap(), dy(3, 2));
        assert_eq!(bias_exact(&t).unwrap(), dy(3, 2));
    }

    #[test]
    fn guards() {
        assert!(bias_bruteforce(&DenseTensor::zeros(4, 8).unwrap()).is_err());
        assert!(bias_exact(&DenseTensor::zeros(5, 11).unwrap()).is_err());
        assert!(matches!(
            bias_exact(&DenseTensor::zeros(3, 31).unwrap()),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn exact_matches_bruteforce_on_random_tensors() {
        let mut n = 0;
        for seed in 0..1000u64 {
            let d = 1 + (seed % 4) as usize;
            let k = 1 + ((seed / 4) % (12 / d as u64).min(6)) as usize;
            let t = if seed % 3 == 0 {
                tensor_from_decomp(&random_rank_decomp(d, k, (seed % 5) as usize, seed)).unwrap()
            } else {
                DenseTensor::random(d, k, seed).unwrap()
            };
            assert_eq!(
                bias_exact(&t).unwrap(),
                bias_bruteforce(&t).unwrap(),
                "d={d} k={k} seed={seed}"
            );
            n += 1;
        }
        assert_eq!(n, 1000);
    }

    #[test]
    fn bilinear_bias_is_two_to_minus_rank() {
        for seed in 0..500u64 {
            let k = 2 + (seed % 5) as usize;
            let t = DenseTensor::random(2, k, seed).unwrap();
            let rows: Vec<BitVec> = (0..k)
                .map(|i| BitVec::from_u64(k, t.bits().read_bits(i * k, k)))
                .collect();
            let r = mat_rank(&BitMatrix::from_rows(k, rows).unwrap());
            assert_eq!(bias_exact(&t).unwrap(), DyadicRational::pow2_neg(r as u64));
        }
    }

    #[test]
    fn trilinear_floor() {
        for seed in 0..1000u64 {
            let k = 1 + (seed % 6) as usize;
            let t = DenseTensor::random(3, k, seed).unwrap();
            assert!(bias_exact(&t).unwrap() >= trace_formula(k as u64), "seed {seed}");
        }
    }

    #[test]
    fn mc_zero_tensor_and_determinism() {
        let z = DenseTensor::zeros(3, 4).unwrap();
        let e = bias_mc(&z, 1000, 0.95, 1).unwrap();
        assert_eq!(e.point, 1.0);
        let t = DenseTensor::random(3, 5, 3).unwrap();
        assert_eq!(
            bias_mc(&t, 10_000, 0.9, 7).unwrap(),
            bias_mc(&t, 10_000, 0.9, 7).unwrap()
        );
        assert!(bias_mc(&t, 0, 0.9, 7).is_err());
        assert!(bias_mc(&t, 10, 1.0, 7).is_err());
    }

    #[test]
    fn mc_coverage() {
        let t = trace_tensor(3).unwrap();
        let exact = bias_exact(&t).unwrap().to_f64();
        let covered = (0..100)
            .filter(|&seed| {
                let e = bias_mc(&t, 2000, 0.9, seed).unwrap();
                (e.point - exact).abs() <= e.ci_halfwidth
            })
            .count();
        assert!(covered >= 90, "coverage {covered}/100");
    }

    #[test]
    fn mc_generic_path_matches_rows_path_statistically() {
        let t = DenseTensor::random(2, 70, 5).unwrap();
        let e = bias_mc(&t, 4000, 0.99, 1).unwrap();
        assert!(e.point.abs() <= e.ci_halfwidth);
    }

    #[test]
    fn truth_table_transform() {
        for n in 0..9 {
            for seed in 0..20u64 {
                let mut rng = chunk_rng(seed, n as u64);
                let monos: Vec<u64> = (0..6).map(|_| rng.next_u64() & low_mask(n)).collect();
                let p = Polynomial::from_monomials(n, monos).unwrap();
                let tt = truth_table(&p);
                for x in 0..1u64 << n {
                    assert_eq!((tt[(x >> 6) as usize] >> (x & 63)) & 1 == 1, p.evaluate(x));
                }
            }
        }
    }

    #[test]
    fn corr_examples() {
        let t = trace_tensor(2).unwrap();
        let f = Polynomial::from_tensor(&t).unwrap();
        assert_eq!(corr_exact(&t, &f).unwrap(), DyadicRational::one());
        assert_eq!(corr_exact(&t, &Polynomial::zero(6).unwrap()).unwrap(), dy(7, 4));
        let z = DenseTensor::zeros(3, 2).unwrap();
        let x1 = Polynomial::from_monomials(6, [1]).unwrap();
        assert_eq!(corr_exact(&z, &x1).unwrap(), DyadicRational::zero());
        assert!(corr_exact(&t, &Polynomial::zero(5).unwrap()).is_err());
        assert!(corr_exact(&DenseTensor::zeros(3, 9).unwrap(), &Polynomial::zero(27).unwrap()).is_err());
    }

    #[test]
    fn class_max_examples() {
        let id = DenseTensor::from_fn(2, 2, |ix| ix[0] == ix[1]).unwrap();
        let best = corr_class_max(&id, 1).unwrap();
        // x1y1 + x2y2 is bent: every affine function has correlation 1/4
        assert_eq!(best.corr, dy(1, 2));
        assert_eq!(best.class_size_log2, 5);
        assert_eq!(corr_exact(&id, &best.witness).unwrap(), best.corr);

        let full = corr_class_max(&id, 4).unwrap();
        assert_eq!(full.corr, DyadicRational::one());
        let z = DenseTensor::zeros(2, 2).unwrap();
        assert_eq!(corr_class_max(&z, 0).unwrap().corr, DyadicRational::one());

        let err = corr_class_max(&DenseTensor::zeros(3, 4).unwrap(), 2).unwrap_err();
        assert!(err.to_string().contains("class size 2^79"), "{err}");
    }

    fn random_parts(d: usize, k: usize, seed: u64) -> Vec<DenseTensor> {
        (0..d)
            .map(|i| DenseTensor::random(d - 1, k, seed * 31 + i as u64).unwrap())
            .collect()
    }

    #[test]
    fn partition_form_matches_truth_tables() {
        for seed in 0..200u64 {
            let d = 2 + (seed % 3) as usize;
            let k = 1 + ((seed / 3) % (if d == 4 { 4 } else { 5 })) as usize;
            let f = DenseTensor::random(d, k, seed).unwrap();
            let parts = random_parts(d, k, seed);
            let g = partition_form_polynomial(d, k, &parts).unwrap();
            assert_eq!(
                corr_partition_form(&f, &parts).unwrap(),
                corr_exact(&f, &g).unwrap(),
                "d={d} k={k} seed={seed}"
            );
        }
    }

    #[test]
    fn partition_form_with_zero_parts_is_bias() {
        let f = trace_tensor(3).unwrap();
        let parts = vec![DenseTensor::zeros(2, 3).unwrap(); 3];
        assert_eq!(corr_partition_form(&f, &parts).unwrap(), bias_exact(&f).unwrap());
        assert!(corr_partition_form(&f, &parts[..2]).is_err());
    }

    proptest! {
        #[test]
        fn corr_is_symmetric(seed: u64, monos in proptest::collection::vec(0u64..1 << 8, 0..12)) {
            let t = DenseTensor::random(2, 4, seed).unwrap();
            let p = Polynomial::from_monomials(8, monos).unwrap();
            let f = Polynomial::from_tensor(&t).unwrap();
            // bias(f - g) = bias(g - f): swap roles through the tensor of p's complement
            let direct = corr_exact(&t, &p).unwrap();
            let diff = f.add(&p).unwrap();
            let zero = DenseTensor::zeros(2, 4).unwrap();
            prop_assert_eq!(direct, corr_exact(&zero, &diff).unwrap());
        }
    }
}
