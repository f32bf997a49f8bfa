//! Named, reproducible verification experiments.
//!
//! Every `verify_*` function returns a [`VerificationReport`]. Exact
//! statements are asserted; asymptotic ones are reported with
//! `holds = "report-only"`. Enumeration sizes are guarded by a [`Budget`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{capacity, Error, Result};
use crate::report::{Method, VerificationReport};

mod analytic;
mod explicit;
mod forms;
pub mod histogram;
mod low_rank;

pub use analytic::{verify_appendix_max, verify_inequalities, verify_mrrw};
pub use explicit::{verify_class_correlation, verify_explicit_form, verify_linear_map_fact};
pub use forms::{
    verify_bias_tail, verify_moment_identity, verify_span_dimension, verify_subspace_membership, verify_sum_zero,
};
pub use low_rank::{
    vanishing_probability, verify_bias_matmul, verify_bias_trace, verify_claim_margin, verify_code_certificate,
    verify_expected_bias_formula, verify_lemma_zero_pattern, verify_rank_bias, verify_rank_trace, verify_trace_ladder,
};

/// Seed used by `run_all` and as the CLI default.
pub const DEFAULT_SEED: u64 = 20240601;
/// Default for `F2LAB_BUDGET_BYTES`.
pub const DEFAULT_BUDGET_BYTES: u128 = 2 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            _ => Err(Error::Domain(format!("unknown profile `{s}` (expected quick or full)"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        })
    }
}

/// Enumeration guards shared by every experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_iterations: u128,
    pub max_bytes: u128,
}

impl Budget {
    pub fn quick() -> Self {
        Self {
            max_iterations: 1 << 32,
            max_bytes: DEFAULT_BUDGET_BYTES,
        }
    }

    pub fn full() -> Self {
        Self {
            max_iterations: 1 << 38,
            max_bytes: DEFAULT_BUDGET_BYTES,
        }
    }

    /// The profile's budget, with the byte limit taken from `F2LAB_BUDGET_BYTES` if set.
    pub fn for_profile(p: Profile) -> Result<Self> {
        let mut b = match p {
            Profile::Quick => Self::quick(),
            Profile::Full => Self::full(),
        };
        if let Ok(v) = std::env::var("F2LAB_BUDGET_BYTES") {
            b.max_bytes = v
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("F2LAB_BUDGET_BYTES=`{v}` is not a byte count")))?;
        }
        Ok(b)
    }

    pub fn iterations(&self, what: &str, n: u128) -> Result<()> {
        if n > self.max_iterations {
            return Err(capacity(what, n, self.max_iterations));
        }
        Ok(())
    }

    pub fn bytes(&self, what: &str, n: u128) -> Result<()> {
        if n > self.max_bytes {
            return Err(capacity(format!("{what} (bytes)"), n, self.max_bytes));
        }
        Ok(())
    }
}

/// Sizes the global rayon pool from `F2LAB_THREADS`, if set.
pub fn init_threads_from_env() -> Result<()> {
    let Ok(v) = std::env::var("F2LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("F2LAB_THREADS=`{v}` is not a thread count")))?;
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

type Job = Box<dyn Fn(&Budget) -> Result<VerificationReport> + Send + Sync>;

fn job(
    name: &'static str,
    params: String,
    f: impl Fn(&Budget) -> Result<VerificationReport> + Send + Sync + 'static,
) -> (String, String, Job) {
    (name.to_string(), params, Box::new(f))
}

/// Runs one experiment, timing it and turning an error into a failing report.
pub fn timed(name: &str, budget: &Budget, f: impl FnOnce(&Budget) -> Result<VerificationReport>) -> VerificationReport {
    let start = Instant::now();
    let mut report = f(budget).unwrap_or_else(|e| {
        let mut r = VerificationReport::new(name, Method::Exhaustive);
        r.check(false, format!("error: {e}"));
        r
    });
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

fn plan(profile: Profile) -> Vec<(String, String, Job)> {
    let full = profile == Profile::Full;
    let seed = DEFAULT_SEED;
    let mut jobs = Vec::new();

    for (d, k, t) in [(2, 1, 1), (2, 2, 1), (2, 2, 2), (3, 1, 2)] {
        jobs.push(job("moment-identity", format!("{d},{k},{t}"), move |b| {
            verify_moment_identity(d, k, t, b)
        }));
    }
    let mut sum_zero = vec![(2, 1, 1), (2, 2, 2), (2, 4, 2), (3, 2, 2)];
    if full {
        sum_zero.extend([(2, 4, 3), (3, 2, 3), (2, 3, 3)]);
    }
    for (d, k, t) in sum_zero {
        jobs.push(job("sum-zero", format!("{d},{k},{t}"), move |b| {
            verify_sum_zero(d, k, t, 0.5, b)
        }));
    }
    let sub_trials = if full { 20 } else { 4 };
    for (d, k) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let dims: Vec<usize> = (0..=k * k * if d == 3 { k } else { 1 }).collect();
        jobs.push(job("subspace-membership", format!("{d},{k}"), move |b| {
            verify_subspace_membership(d, k, &dims, sub_trials, seed ^ (d * 16 + k) as u64, b)
        }));
    }
    let mut span = vec![(1, 2, 2), (2, 2, 2), (2, 2, 3), (3, 2, 2)];
    if full {
        span.extend([(2, 3, 3), (3, 2, 3)]);
    }
    for (d, k, t) in span {
        jobs.push(job("span-dimension", format!("{d},{k},{t}"), move |b| {
            verify_span_dimension(d, k, t, b)
        }));
    }
    let tail_samples = if full { 100_000 } else { 10_000 };
    jobs.push(job("bias-tail", "2,8".into(), move |b| {
        verify_bias_tail(2, 8, 0.25, tail_samples, seed, b)
    }));
    jobs.push(job("bias-tail", "3,4".into(), move |b| {
        verify_bias_tail(3, 4, 0.25, tail_samples / 10, seed, b)
    }));
    let rb_trials = if full { 3000 } else { 300 };
    for (d, k) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        jobs.push(job("rank-bias", format!("{d},{k}"), move |b| {
            verify_rank_bias(d, k, 5, rb_trials, seed ^ (d * 16 + k) as u64, b)
        }));
    }
    for (d, k, t) in [(2, 2, 2), (2, 3, 4), (3, 2, 3), (3, 3, 6)] {
        jobs.push(job("zero-pattern", format!("{d},{k},{t}"), move |b| {
            verify_lemma_zero_pattern(d, k, t, 100, seed ^ (d * 16 + k) as u64, b)
        }));
    }
    let mut eb = vec![(2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 2, 1), (2, 2, 2), (3, 1, 3)];
    if full {
        eb.extend([(2, 2, 3), (3, 2, 2)]);
    }
    for (d, k, t) in eb {
        jobs.push(job("expected-bias", format!("{d},{k},{t}"), move |b| {
            verify_expected_bias_formula(d, k, t, 20_000, seed, b)
        }));
    }
    jobs.push(job("expected-bias", "3,4,3".into(), move |b| {
        verify_expected_bias_formula(3, 4, 3, 20_000, seed, b)
    }));
    jobs.push(job("bias-trace", String::new(), |b| verify_bias_trace(10, 20, b)));
    jobs.push(job("bias-matmul", String::new(), |b| verify_bias_matmul(4, b)));
    let g = if full { 1000 } else { 100 };
    for d in 2..=4 {
        for k in 1..=6 {
            jobs.push(job("explicit-form", format!("{d},{k}"), move |b| {
                verify_explicit_form(d, k, g, seed ^ (d * 16 + k) as u64, b)
            }));
        }
    }
    for k in [1, 4, 8, 12] {
        jobs.push(job("linear-map", format!("{k}"), move |b| {
            verify_linear_map_fact(k, 200, seed ^ k as u64, b)
        }));
    }
    jobs.push(job("claim-margin", String::new(), |b| verify_claim_margin(4, b)));
    jobs.push(job("mrrw", String::new(), |b| verify_mrrw(1e-9, b)));
    let (u_per_k, points) = if full { (100, 1_000_000) } else { (100, 100_000) };
    jobs.push(job("appendix-max", String::new(), move |b| {
        verify_appendix_max(6, u_per_k, points, seed, b)
    }));
    let ineq = if full { 1_000_000 } else { 100_000 };
    jobs.push(job("inequalities", String::new(), move |b| {
        verify_inequalities(ineq, seed, b)
    }));
    jobs.push(job("code-certificate", String::new(), move |b| {
        verify_code_certificate(if full { 2000 } else { 200 }, seed, b)
    }));
    jobs.push(job("rank-trace", String::new(), verify_rank_trace));
    jobs.push(job("trace-ladder", String::new(), move |b| {
        verify_trace_ladder(if full { 20 } else { 14 }, b)
    }));
    jobs.push(job("class-correlation", String::new(), move |b| {
        verify_class_correlation(3, 2, seed, b)
    }));
    jobs
}

/// Names of the experiments that `run_all` schedules.
pub fn experiment_names() -> Vec<String> {
    let mut names: Vec<String> = plan(Profile::Quick).into_iter().map(|(n, _, _)| n).collect();
    names.dedup();
    names
}

/// Every experiment at the profile's parameters, sorted by name then parameters.
pub fn run_all(profile: Profile, budget: &Budget) -> Vec<VerificationReport> {
    let jobs = plan(profile);
    let mut reports: Vec<VerificationReport> = jobs
        .par_iter()
        .map(|(name, _, f)| timed(name, budget, |b| f(b)))
        .collect();
    reports.sort_by_key(|r| r.sort_key());
    reports
}

/// True when no asserting report failed.
pub fn all_hold(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| !r.failed())
}

/// Exact value within a float bound, allowing relative rounding `1e-12`.
pub(crate) fn within_float(exact: f64, bound: f64) -> bool {
    exact <= bound + 1e-12 * bound.abs().max(f64::MIN_POSITIVE)
}
