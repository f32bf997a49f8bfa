//! Checks of numeric constants and real inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Budget;
use crate::error::{Error, Result};
use crate::numerics::{appendix_max_check, inequality_checks, mrrw_constant};
use crate::rank::mrrw_rank_lb;
use crate::report::{fmt12, Labeled, Method, Value, VerificationReport};

/// `1/rho*` lies in `[3.51, 3.53]`.
pub fn verify_mrrw(tol: f64, _budget: &Budget) -> Result<VerificationReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let (rho, inv) = mrrw_constant(tol);
    let mut r = VerificationReport::new("mrrw", Method::ClosedForm).param("tol", fmt12(tol));
    r.measure(Labeled::float("rho*", rho));
    r.measure(Labeled::float("1/rho*", inv));
    r.measure(Labeled::float("rank bound at k=100", mrrw_rank_lb(100)));
    r.bound = Some(Labeled::text("interval", "[3.51, 3.53]"));
    r.check(
        (3.51..=3.53).contains(&inv),
        format!("1/rho* = {} outside [3.51, 3.53]", fmt12(inv)),
    );
    Ok(r)
}

/// The polytope maximum for `k <= k_max` and `u_per_k` random `u` each, with
/// `points` random feasible points in total.
pub fn verify_appendix_max(
    k_max: usize,
    u_per_k: usize,
    points: u64,
    seed: u64,
    budget: &Budget,
) -> Result<VerificationReport> {
    if k_max == 0 || u_per_k == 0 {
        return Err(Error::Domain("appendix-max needs k_max >= 1 and u_per_k >= 1".into()));
    }
    budget.iterations("random feasible points", points as u128)?;
    let runs = (k_max * u_per_k) as u64;
    let per_run = points.div_ceil(runs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut tested) = (0usize, 0u64);
    let mut worst_excess = f64::NEG_INFINITY;
    for k in 1..=k_max {
        for _ in 0..u_per_k {
            let u = rng.gen::<f64>() * (k * k) as f64;
            let rep = appendix_max_check(k, u, per_run, rng.gen())?;
            failures += usize::from(rep.failed());
            tested += per_run;
            let get = |label: &str| {
                rep.measured
                    .iter()
                    .find(|m| m.label == label)
                    .and_then(|m| match m.value {
                        Value::Float(x) => Some(x),
                        _ => None,
                    })
            };
            let bound = crate::numerics::appendix_bound(k, u);
            if let Some(x) = get("random_max") {
                worst_excess = worst_excess.max(x - bound);
            }
        }
    }
    let special = appendix_max_check(2, 2.0, 0, seed)?;
    let maximizers = special
        .measured
        .iter()
        .find(|m| m.label == "maximizers")
        .map(|m| m.value.to_string())
        .unwrap_or_default();

    let mut r = VerificationReport::new("appendix-max", Method::Exhaustive)
        .param("k_max", k_max)
        .param("u_per_k", u_per_k)
        .param("points", points);
    r.seed = Some(seed);
    r.samples = Some(tested);
    r.measure(Labeled::int("failing (k, u) instances", failures as i128));
    r.measure(Labeled::float("max random objective - bound", worst_excess));
    r.measure(Labeled::text("maximizers at k=2, u=2", maximizers.clone()));
    r.bound = Some(Labeled::text("bound", "(2^k - 1) 2^(u/k) within 1e-9"));
    r.check(failures == 0, format!("{failures} instances fail"));
    r.check(!special.failed(), "k=2, u=2 instance fails");
    r.check(
        maximizers == "(1,1) (2,0)",
        format!("k=2, u=2 maximizers are {maximizers}"),
    );
    Ok(r)
}

pub fn verify_inequalities(trials: u64, seed: u64, budget: &Budget) -> Result<VerificationReport> {
    budget.iterations("inequality samples", 2 * trials as u128)?;
    inequality_checks(trials, seed)
}
