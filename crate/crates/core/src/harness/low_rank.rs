//! Experiments on tensors given by short rank-one decompositions.

use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::histogram::{check_packed, key_tensor, sum_histogram};
use super::Budget;
use crate::bias::{bias_bruteforce, bias_exact, chunk_rng};
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::f2linalg::{rank_u64, BitVec};
use crate::rank::{
    claim_margin, code_certificate, decompositions_of_length, matmul_bias_exact, matmul_bias_within_bound,
    mrrw_rank_lb, rank_count, rank_exact_with_budget, rank_lb_bias, RankOutcome,
};
use crate::report::{fmt12, Holds, Labeled, Method, VerificationReport};
use crate::tensors::{
    matmul_tensor, random_rank_decomp_with, tensor_from_decomp, trace_tensor, RankDecomposition, RankOneTerm,
};

/// `(1 - 2^(1-d))^t` as an exact dyadic.
fn rank_bias_floor(d: usize, t: usize) -> DyadicRational {
    let half = 1u64 << (d - 1);
    DyadicRational::new(half - 1, (d - 1) as u64).pow(t as u32)
}

/// Random decompositions of length uniform in `0..=t`; each tensor's exact
/// bias must be at least `(1 - 2^(1-d))^len`.
pub fn verify_rank_bias(
    d: usize,
    k: usize,
    t: usize,
    trials: usize,
    seed: u64,
    budget: &Budget,
) -> Result<VerificationReport> {
    if d < 2 || k == 0 {
        return Err(Error::Domain(format!(
            "rank-bias needs d >= 2 and k >= 1 (d={d}, k={k})"
        )));
    }
    budget.iterations(
        "trials x contraction leaves",
        trials as u128 * (1u128 << (k * (d - 2)).min(100)),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut violations, mut ladder_violations, mut equalities) = (0usize, 0usize, 0usize);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..trials {
        let len = rng.gen_range(0..=t);
        let dec = random_rank_decomp_with(d, k, len, &mut rng);
        let b = bias_exact(&tensor_from_decomp(&dec)?)?;
        let floor = rank_bias_floor(d, len);
        if b < floor {
            violations += 1;
        } else if b == floor {
            equalities += 1;
        }
        min_ratio = min_ratio.min(b.to_f64() / floor.to_f64());
        if b.is_zero() || rank_lb_bias(&b, d)? > len {
            ladder_violations += 1;
        }
    }

    // one nonzero term e1 x .. x e1, and the empty sum
    let e1 = RankOneTerm::new(vec![BitVec::unit(k, 0); d])?;
    let single = bias_exact(&e1.to_tensor()?)?;
    let empty = bias_exact(&tensor_from_decomp(&RankDecomposition::new(d, k, Vec::new())?)?)?;

    let mut r = VerificationReport::new("rank-bias", Method::Exhaustive)
        .param("d", d)
        .param("k", k)
        .param("t", t)
        .param("trials", trials);
    r.seed = Some(seed);
    r.samples = Some(trials as u64);
    r.measure(Labeled::int("violations", violations as i128));
    r.measure(Labeled::int("equalities", equalities as i128));
    r.measure(Labeled::float("min bias / (1-2^(1-d))^len", min_ratio));
    r.measure(Labeled::exact("bias(e1 x..x e1)", single.clone()));
    r.bound = Some(Labeled::text("bound", "(1-2^(1-d))^len"));
    r.check(
        violations == 0,
        format!("{violations} decompositions fall below the bound"),
    );
    r.check(
        ladder_violations == 0,
        format!("{ladder_violations} bias lower bounds exceed the length"),
    );
    r.check(
        single == rank_bias_floor(d, 1),
        "single rank-one term is not at the bound",
    );
    r.check(empty == DyadicRational::one(), "empty decomposition bias is not 1");
    Ok(r)
}

/// Exact `Pr_x[M_i(x) = 0 for all i]` for rank-one forms given as packed
/// vectors `terms[i][j]` (`k <= 64`, at most 64 terms).
pub fn vanishing_probability(d: usize, k: usize, terms: &[Vec<u64>]) -> Result<DyadicRational> {
    if k > 20 || terms.len() > 64 || terms.iter().any(|v| v.len() != d) {
        return Err(Error::Domain(
            "vanishing probability needs k <= 20, at most 64 terms of d vectors".into(),
        ));
    }
    let side = 1usize << k;
    // masks[j][x]: terms whose block-j factor is nonzero at x
    let masks: Vec<Vec<u64>> = (0..d)
        .map(|j| {
            (0..side as u64)
                .map(|x| {
                    terms
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| (v[j] & x).count_ones() % 2 == 1)
                        .fold(0u64, |m, (i, _)| m | 1 << i)
                })
                .collect()
        })
        .collect();
    // tuples on which every term in `acc` vanishes
    fn count(masks: &[Vec<u64>], acc: u64, k: usize) -> u128 {
        match masks.split_first() {
            _ if acc == 0 => 1u128 << (k * masks.len()),
            None => 0,
            Some((m, rest)) => m.iter().map(|&x| count(rest, acc & x, k)).sum(),
        }
    }
    let all = if terms.is_empty() {
        0
    } else {
        u64::MAX >> (64 - terms.len())
    };
    let zeros = count(&masks, all, k);
    Ok(DyadicRational::new(BigUint::from(zeros), (k * d) as u64))
}

/// Joint vanishing probability of `t` random rank-one forms against `(1 - 2^-d)^t`.
pub fn verify_lemma_zero_pattern(
    d: usize,
    k: usize,
    t: usize,
    trials: usize,
    seed: u64,
    budget: &Budget,
) -> Result<VerificationReport> {
    if d == 0 || k == 0 {
        return Err(Error::Domain("zero-pattern needs d, k >= 1".into()));
    }
    budget.iterations("trials x inputs (2^k)^d", trials as u128 * (1u128 << (k * d).min(100)))?;
    let floor = |t: usize| DyadicRational::new((1u64 << d) - 1, d as u64).pow(t as u32);
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut violations, mut min_ratio) = (0usize, f64::INFINITY);
    for _ in 0..trials {
        let terms: Vec<Vec<u64>> = (0..t)
            .map(|_| (0..d).map(|_| rng.next_u64() & mask).collect())
            .collect();
        let p = vanishing_probability(d, k, &terms)?;
        if p < floor(t) {
            violations += 1;
        }
        min_ratio = min_ratio.min(p.to_f64() / floor(t).to_f64());
    }
    let e1 = vec![1u64; d];
    let equal = vanishing_probability(d, k, &vec![e1.clone(); t.max(1)])?;
    let empty = vanishing_probability(d, k, &[])?;

    let mut r = VerificationReport::new("zero-pattern", Method::Exhaustive)
        .param("d", d)
        .param("k", k)
        .param("t", t)
        .param("trials", trials);
    r.seed = Some(seed);
    r.samples = Some(trials as u64);
    r.measure(Labeled::int("violations", violations as i128));
    r.measure(Labeled::float("min Pr / (1-2^-d)^t", min_ratio));
    r.measure(Labeled::exact("Pr[equal terms vanish]", equal.clone()));
    r.bound = Some(Labeled::exact("(1-2^-d)^t", floor(t)));
    r.check(violations == 0, format!("{violations} tuples fall below the bound"));
    r.check(empty == DyadicRational::one(), "empty tuple probability is not 1");
    r.check(equal == floor(1), "equal terms do not vanish with probability 1 - 2^-d");
    if d == 2 && k >= 2 {
        let diag = vanishing_probability(2, k, &[vec![1, 1], vec![2, 2]])?;
        r.measure(Labeled::exact("Pr[e1 x e1, e2 x e2 vanish]", diag.clone()));
        r.check(diag == floor(2), "e1 x e1, e2 x e2 is not at the bound");
    }
    Ok(r)
}

/// `1 - (1-2^-k)^d + (1-2^-k)^d (1-2^(1-d))^t`.
pub(crate) fn expected_bias_closed_form(d: usize, k: usize, t: usize) -> DyadicRational {
    let a = DyadicRational::new((1u64 << k) - 1, k as u64).pow(d as u32);
    DyadicRational::one().checked_sub(&a).expect("a <= 1") + a * rank_bias_floor(d, t)
}

/// `E bias(sum of t random rank-one terms)` against the closed form, exhaustively
/// when the decompositions fit the budget and by sampling otherwise.
pub fn verify_expected_bias_formula(
    d: usize,
    k: usize,
    t: usize,
    samples: u64,
    seed: u64,
    budget: &Budget,
) -> Result<VerificationReport> {
    if d < 2 || k == 0 || k > 20 {
        return Err(Error::Domain(format!(
            "expected-bias needs d >= 2 and 1 <= k <= 20 (d={d}, k={k})"
        )));
    }
    let closed = expected_bias_closed_form(d, k, t);
    let relaxed = DyadicRational::new(d as u64, k as u64) + rank_bias_floor(d, t);
    let hist = if check_packed(d, k).is_ok() {
        match sum_histogram(d, k, t, budget) {
            Ok(h) => Some(h),
            Err(Error::Capacity { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let exhaustive = hist.is_some();

    let mut r = VerificationReport::new(
        "expected-bias",
        if exhaustive {
            Method::Exhaustive
        } else {
            Method::MonteCarlo
        },
    )
    .param("d", d)
    .param("k", k)
    .param("t", t);
    r.bound = Some(Labeled::exact("d 2^-k + (1-2^(1-d))^t", relaxed.clone()));
    r.measure(Labeled::exact("closed form", closed.clone()));
    if let Some(hist) = hist {
        let hist: Vec<(u64, u128)> = hist.into_iter().collect();
        let total: DyadicRational = hist
            .par_iter()
            .map(|&(key, c)| Ok(bias_exact(&key_tensor(d, k, key)?)? * DyadicRational::new(BigUint::from(c), 0)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum();
        let mean = total.shr((k * d * t) as u64);
        r.measure(Labeled::exact("E[bias]", mean.clone()));
        r.measure(Labeled::exact("bound - E[bias]", relaxed.abs_diff(&mean)));
        r.check(mean == closed, "enumerated mean differs from the closed form");
        r.check(mean <= relaxed, "mean exceeds d 2^-k + (1-2^(1-d))^t");
    } else {
        if samples == 0 {
            return Err(Error::Domain("sampling mode needs samples > 0".into()));
        }
        budget.iterations(
            "samples x contraction leaves",
            samples as u128 * (1u128 << (k * (d - 2)).min(100)),
        )?;
        const CHUNK: u64 = 1024;
        let sum: f64 = (0..samples.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(seed, c);
                let mut s = 0.0;
                for _ in 0..CHUNK.min(samples - c * CHUNK) {
                    let dec = random_rank_decomp_with(d, k, t, &mut rng);
                    s += bias_exact(&tensor_from_decomp(&dec)?)?.to_f64();
                }
                Ok(s)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .sum();
        let mean = sum / samples as f64;
        let confidence: f64 = 0.999;
        // values lie in [0, 1]
        let hw = ((2.0 / (1.0 - confidence)).ln() / (2.0 * samples as f64)).sqrt();
        r.samples = Some(samples);
        r.seed = Some(seed);
        r.ci_halfwidth = Some(hw);
        r.measure(Labeled::float("mean bias", mean));
        r.measure(Labeled::float("confidence", confidence));
        r.check(
            (mean - closed.to_f64()).abs() <= hw,
            "closed form outside the confidence interval",
        );
        r.check(mean <= relaxed.to_f64() + hw, "mean exceeds the relaxed bound");
        r.note("decompositions exceed the enumeration budget; sampled");
    }
    Ok(r)
}

/// `bias(trace_k) = 2 2^-k - 2^-2k` by brute force up to `brute_max` and by
/// contraction up to `fast_max`.
pub fn verify_bias_trace(brute_max: usize, fast_max: usize, budget: &Budget) -> Result<VerificationReport> {
    budget.iterations(
        "brute-force trace points 2^(3k)",
        1u128 << (3 * brute_max.max(1)).min(127),
    )?;
    let mut r = VerificationReport::new("bias-trace", Method::Exhaustive)
        .param("brute_max", brute_max)
        .param("fast_max", fast_max);
    for k in 2..=fast_max.max(brute_max) {
        let t = trace_tensor(k)?;
        let formula = DyadicRational::new((1u64 << (k + 1)) - 1, (2 * k) as u64);
        if k <= fast_max {
            let b = bias_exact(&t)?;
            r.check(b == formula, format!("k={k}: contraction gives {b}, formula {formula}"));
        }
        if k <= brute_max {
            let b = bias_bruteforce(&t)?;
            r.check(b == formula, format!("k={k}: brute force gives {b}, formula {formula}"));
        }
        if k == 2 || k == brute_max || k == fast_max {
            r.measure(Labeled::exact(format!("bias(trace_{k})"), formula));
        }
    }
    r.bound = Some(Labeled::text("formula", "(2^(k+1)-1)/2^(2k)"));
    Ok(r)
}

fn enumerated_rank_counts(n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n + 1];
    let mask = (1u64 << n) - 1;
    for m in 0u64..1 << (n * n) {
        let mut rows: Vec<u64> = (0..n).map(|i| (m >> (i * n)) & mask).collect();
        counts[rank_u64(&mut rows)] += 1;
    }
    counts
}

/// `bias(M_n)` from the rank distribution, by contraction and (small `n`)
/// brute force, against `n 2^(-3n^2/4)`.
pub fn verify_bias_matmul(n_max: usize, budget: &Budget) -> Result<VerificationReport> {
    budget.iterations("matmul contraction leaves", 1u128 << (n_max * n_max).min(127))?;
    let mut r = VerificationReport::new("bias-matmul", Method::Exhaustive).param("n_max", n_max);
    for n in 1..=n_max {
        let formula = matmul_bias_exact(n)?;
        let t = matmul_tensor(n)?;
        let fast = bias_exact(&t)?;
        r.check(
            fast == formula,
            format!("n={n}: contraction {fast} differs from rank-distribution value {formula}"),
        );
        if n <= 2 {
            let brute = bias_bruteforce(&t)?;
            r.check(
                brute == formula,
                format!("n={n}: brute force {brute} differs from {formula}"),
            );
        }
        if n <= 3 {
            let dist = rank_count(n)?;
            let enumerated = enumerated_rank_counts(n);
            let same = dist
                .counts
                .iter()
                .zip(&enumerated)
                .all(|(a, &b)| *a == BigUint::from(b));
            r.check(same, format!("n={n}: rank counts differ from enumeration"));
            r.measure(Labeled::text(format!("rank counts n={n}"), format!("{enumerated:?}")));
        }
        let bound = n as f64 * 2f64.powf(-0.75 * (n * n) as f64);
        r.measure(Labeled::exact(format!("bias(M_{n})"), formula.clone()));
        r.measure(Labeled::float(format!("bound n={n}"), bound));
        if n >= 2 {
            r.check(
                matmul_bias_within_bound(&formula, n),
                format!("n={n}: bias exceeds n 2^(-3n^2/4)"),
            );
        } else {
            r.note(format!(
                "n=1: bias {formula} vs bound {} (bound not claimed below n=2)",
                fmt12(bound)
            ));
        }
        let ladder = rank_lb_bias(&formula, 3)?;
        r.note(format!(
            "n={n}: bias ladder rank bound {ladder}, 1.8n^2 = {} (report-only)",
            fmt12(1.8 * (n * n) as f64)
        ));
    }
    r.bound = Some(Labeled::text("bound", "n 2^(-3n^2/4) for n >= 2"));
    Ok(r)
}

/// Every rank-3 decomposition of `trace_2`, plus random trilinear
/// decompositions, through the code certificate.
pub fn verify_code_certificate(random_trials: usize, seed: u64, budget: &Budget) -> Result<VerificationReport> {
    let t = trace_tensor(2)?;
    let target = bias_exact(&t)?;
    let decs = decompositions_of_length(&t, 3, budget.max_iterations)?;
    let mut r = VerificationReport::new("code-certificate", Method::Exhaustive).param("random_trials", random_trials);
    r.seed = Some(seed);
    r.check(!decs.is_empty(), "no rank-3 decomposition of trace_2 found");
    for dec in &decs {
        let c = code_certificate(dec)?;
        r.check(
            c.reconstructed_bias.as_ref() == Some(&target),
            "reconstructed bias differs from bias_exact",
        );
        r.check(
            c.kernel_dim == Some(1),
            format!("kernel dimension {:?}, expected 1", c.kernel_dim),
        );
        r.check(c.lower_bound == 3, format!("certificate bound {}", c.lower_bound));
    }
    r.measure(Labeled::int("rank-3 decompositions of trace_2", decs.len() as i128));
    r.measure(Labeled::exact("bias(trace_2)", target));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0usize;
    for _ in 0..random_trials {
        let k = rng.gen_range(2..=4);
        let len = rng.gen_range(1..=8);
        let dec = random_rank_decomp_with(3, k, len, &mut rng);
        let c = code_certificate(&dec)?;
        let kd = c.kernel_dim.unwrap_or(usize::MAX);
        let dd = c.dual_dim.unwrap_or(usize::MAX);
        if kd.checked_add(dd) != Some(len) || c.lower_bound > len {
            bad += 1;
        }
    }
    r.measure(Labeled::int(
        "random certificates with kernel+dual != t or bound > t",
        bad as i128,
    ));
    r.bound = Some(Labeled::text(
        "identity",
        "|K|/2^t sum_(v in K^perp) 2^-rank(M_v) = bias",
    ));
    r.check(bad == 0, format!("{bad} random certificates are inconsistent"));
    Ok(r)
}

/// `bias(trace_2) = 7/16`, bias lower bound 3, exact rank 3.
pub fn verify_rank_trace(budget: &Budget) -> Result<VerificationReport> {
    let t = trace_tensor(2)?;
    let b = bias_exact(&t)?;
    let lb = rank_lb_bias(&b, 3)?;
    let outcome = rank_exact_with_budget(&t, 4, budget.max_iterations)?;
    let mut r = VerificationReport::new("rank-trace", Method::Exhaustive).param("k", 2);
    r.measure(Labeled::exact("bias(trace_2)", b.clone()));
    r.measure(Labeled::int("bias lower bound", lb as i128));
    match &outcome {
        RankOutcome::Rank { rank, witness } => {
            r.measure(Labeled::int("exact rank", *rank as i128));
            r.check(*rank == lb, format!("exact rank {rank} differs from lower bound {lb}"));
            match witness {
                Some(w) => r.check(
                    tensor_from_decomp(w)? == t && w.len() == *rank,
                    "witness does not rebuild trace_2",
                ),
                None => r.check(false, "no witness returned"),
            }
        }
        RankOutcome::ExceedsMax(m) => r.check(false, format!("rank exceeds {m}")),
    }
    r.bound = Some(Labeled::int("rank", 3));
    r.check(b == DyadicRational::new(7u32, 4), "bias(trace_2) is not 7/16");
    r.check(lb == 3, "bias lower bound is not 3");
    Ok(r)
}

/// `Pr[rank = r] <= 2^-(n-r)^2` for `n <= n_max`; reported, not asserted.
pub fn verify_claim_margin(n_max: usize, _budget: &Budget) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("claim-margin", Method::ClosedForm).param("n_max", n_max);
    r.holds = Holds::ReportOnly;
    for n in 1..=n_max {
        for row in claim_margin(n)? {
            r.measure(Labeled::float(format!("n={n} r={} Pr/bound", row.r), row.ratio));
            if !row.holds {
                r.note(format!(
                    "n={n} r={}: Pr = {} exceeds 2^-{} by factor {}",
                    row.r,
                    row.probability,
                    (n - row.r).pow(2),
                    fmt12(row.ratio)
                ));
            }
        }
    }
    r.bound = Some(Labeled::text("claim", "Pr[rank = r] <= 2^-(n-r)^2"));
    Ok(r)
}

/// Bias ladder bound on `rank(trace_k)` next to `2.409k` and the MRRW `3.52k`.
pub fn verify_trace_ladder(k_max: usize, budget: &Budget) -> Result<VerificationReport> {
    budget.iterations("trace contraction leaves", 1u128 << k_max.min(127))?;
    let mut r = VerificationReport::new("trace-ladder", Method::Exhaustive).param("k_max", k_max);
    r.holds = Holds::ReportOnly;
    let slope = 1.0 / (4f64 / 3.0).log2();
    for k in 2..=k_max {
        let b = bias_exact(&trace_tensor(k)?)?;
        let lb = rank_lb_bias(&b, 3)?;
        r.measure(Labeled::text(
            format!("k={k}"),
            format!(
                "ladder {lb}, k/log2(4/3) = {}, mrrw {}",
                fmt12(slope * k as f64),
                fmt12(mrrw_rank_lb(k))
            ),
        ));
    }
    r.bound = Some(Labeled::float("k/log2(4/3) per unit k", slope));
    r.note("asymptotic slopes; displayed, not asserted");
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dy(n: u64, e: u64) -> DyadicRational {
        DyadicRational::new(n, e)
    }

    #[test]
    fn rank_bias_sweep() {
        let b = Budget::quick();
        for (d, k) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let r = verify_rank_bias(d, k, 5, 50, 7, &b).unwrap();
            assert!(!r.failed(), "{r}");
        }
        assert_eq!(rank_bias_floor(3, 1), dy(3, 2));
        assert_eq!(rank_bias_floor(2, 3), dy(1, 3));
    }

    #[test]
    fn zero_pattern_examples() {
        let p = vanishing_probability(2, 2, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(p, dy(9, 4));
        assert_eq!(vanishing_probability(3, 2, &[]).unwrap(), DyadicRational::one());
        assert_eq!(vanishing_probability(2, 3, &vec![vec![5, 3]; 4]).unwrap(), dy(3, 2));
        assert_eq!(
            vanishing_probability(2, 2, &[vec![0, 3]]).unwrap(),
            DyadicRational::one()
        );
        let r = verify_lemma_zero_pattern(2, 3, 4, 30, 1, &Budget::quick()).unwrap();
        assert!(!r.failed(), "{r}");
    }

    #[test]
    fn vanishing_matches_direct_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (d, k, t) = (3, 2, rng.gen_range(0..5));
            let terms: Vec<Vec<u64>> = (0..t).map(|_| (0..d).map(|_| rng.next_u64() & 3).collect()).collect();
            let mut zeros = 0u64;
            for x in 0u64..64 {
                let xs = [x & 3, (x >> 2) & 3, x >> 4];
                let all_zero = terms
                    .iter()
                    .all(|v| v.iter().zip(xs).any(|(a, b)| (a & b).count_ones() % 2 == 0));
                zeros += u64::from(all_zero);
            }
            assert_eq!(vanishing_probability(d, k, &terms).unwrap(), dy(zeros, 6));
        }
    }

    #[test]
    fn expected_bias_examples() {
        let b = Budget::quick();
        assert_eq!(expected_bias_closed_form(2, 1, 1), dy(7, 3));
        assert_eq!(expected_bias_closed_form(2, 2, 0), DyadicRational::one());
        for (d, k, t) in [(2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 2, 1), (2, 2, 0)] {
            let r = verify_expected_bias_formula(d, k, t, 1000, 1, &b).unwrap();
            assert_eq!(r.method, Method::Exhaustive);
            assert!(!r.failed(), "{r}");
        }
        let tiny = Budget {
            max_iterations: 1 << 17,
            ..b
        };
        let r = verify_expected_bias_formula(3, 2, 3, 20_000, 1, &tiny).unwrap();
        assert_eq!(r.method, Method::MonteCarlo);
        assert!(!r.failed(), "{r}");
    }

    #[test]
    fn trace_and_matmul() {
        let b = Budget::quick();
        let r = verify_bias_trace(6, 12, &b).unwrap();
        assert!(!r.failed(), "{r}");
        assert!(r.measured.iter().any(|m| m.value.to_string().starts_with("7/2^4")));
        let r = verify_bias_matmul(3, &b).unwrap();
        assert!(!r.failed(), "{r}");
        assert!(r.measured.iter().any(|m| m.value.to_string() == "[1, 9, 6]"));
        assert!(r.measured.iter().any(|m| m.value.to_string() == "[1, 49, 294, 168]"));
    }

    #[test]
    fn certificates_and_claims() {
        let b = Budget::quick();
        let r = verify_code_certificate(50, 3, &b).unwrap();
        assert!(!r.failed(), "{r}");
        let r = verify_rank_trace(&b).unwrap();
        assert!(!r.failed(), "{r}");
        let r = verify_claim_margin(2, &b).unwrap();
        assert_eq!(r.holds, Holds::ReportOnly);
        assert!(r
            .measured
            .iter()
            .any(|m| m.label == "n=2 r=1 Pr/bound" && m.value.to_string() == "1.125"));
        let r = verify_trace_ladder(6, &b).unwrap();
        assert_eq!(r.holds, Holds::ReportOnly);
    }
}
