//! Exact distributions of sums of rank-one tensors with `k^d <= 64` entries,
//! keyed by the packed entry bits.

use std::collections::HashMap;

use super::Budget;
use crate::error::{Error, Result};
use crate::f2linalg::BitVec;
use crate::tensors::DenseTensor;

/// Packed bits of `x_1 (x) ... (x) x_d` (block 1 slowest).
pub fn outer_key(xs: &[u64], k: usize) -> u64 {
    match xs.split_first() {
        None => 1,
        Some((&x, rest)) => {
            let inner = outer_key(rest, k);
            if inner == 0 {
                return 0;
            }
            let stride = k.pow(rest.len() as u32);
            let mut key = 0;
            let mut bits = x;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                key |= inner << (i * stride);
                bits &= bits - 1;
            }
            key
        }
    }
}

pub fn key_tensor(d: usize, k: usize, key: u64) -> Result<DenseTensor> {
    let n = k.pow(d as u32);
    DenseTensor::from_bits(d, k, BitVec::from_u64(n, key))
}

pub(crate) fn check_packed(d: usize, k: usize) -> Result<()> {
    match k.checked_pow(d as u32) {
        Some(n) if n <= 64 && k >= 1 => Ok(()),
        _ => Err(Error::Domain(format!(
            "packed tensors need 1 <= k and k^d <= 64 (d={d}, k={k})"
        ))),
    }
}

/// Multiplicity of each rank-one tensor over all `(2^k)^d` tuples.
pub fn rank_one_histogram(d: usize, k: usize, budget: &Budget) -> Result<HashMap<u64, u128>> {
    check_packed(d, k)?;
    budget.iterations("rank-one tuples (2^k)^d", 1u128 << (k * d).min(127))?;
    let mask = (1u64 << k) - 1;
    let mut hist = HashMap::new();
    let mut xs = vec![0u64; d];
    for code in 0u64..1 << (k * d) {
        for (j, x) in xs.iter_mut().enumerate() {
            *x = (code >> (j * k)) & mask;
        }
        *hist.entry(outer_key(&xs, k)).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Distribution of `T_1 + ... + T_t` for independent uniform rank-one tuples,
/// as counts out of `2^(kdt)`.
pub fn sum_histogram(d: usize, k: usize, t: usize, budget: &Budget) -> Result<HashMap<u64, u128>> {
    budget.iterations("decomposition tuples (2^k)^(dt)", 1u128 << (k * d * t).min(127))?;
    let one = rank_one_histogram(d, k, budget)?;
    let mut acc: HashMap<u64, u128> = HashMap::from([(0, 1)]);
    let keys = 1u128 << k.pow(d as u32).min(127);
    for _ in 0..t {
        let work = acc.len() as u128 * one.len() as u128;
        budget.iterations("sum distribution updates", work)?;
        budget.bytes("sum distribution", work.min(keys) * 48)?;
        let mut next = HashMap::with_capacity(acc.len());
        for (&a, &ca) in &acc {
            for (&b, &cb) in &one {
                *next.entry(a ^ b).or_insert(0) += ca * cb;
            }
        }
        acc = next;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensors::RankOneTerm;

    #[test]
    fn outer_key_matches_tensor_layout() {
        for (d, k) in [(1, 3), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            for code in (0u64..1 << (k * d)).step_by(7) {
                let xs: Vec<u64> = (0..d).map(|j| (code >> (j * k)) & ((1 << k) - 1)).collect();
                let term = RankOneTerm::new(xs.iter().map(|&x| BitVec::from_u64(k, x)).collect()).unwrap();
                assert_eq!(key_tensor(d, k, outer_key(&xs, k)).unwrap(), term.to_tensor().unwrap());
            }
        }
    }

    #[test]
    fn histogram_counts() {
        let b = Budget::quick();
        let h = rank_one_histogram(2, 2, &b).unwrap();
        assert_eq!(h.len(), 10);
        assert_eq!(h[&0], 7);
        assert_eq!(h.values().sum::<u128>(), 16);
        let s = sum_histogram(2, 2, 2, &b).unwrap();
        assert_eq!(s.values().sum::<u128>(), 256);
        assert_eq!(s[&0], 58);
        assert!(rank_one_histogram(3, 5, &b).is_err());
    }
}
