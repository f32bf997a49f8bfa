//! Floating-point bounds and checks: the membership bound `f_{d,k}`, the
//! MRRW constant, a polytope maximization and two elementary inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::{Labeled, Method, VerificationReport};

/// Tolerance for the polytope maximum.
pub const APPENDIX_TOL: f64 = 1e-9;
/// Relative tolerance for the sampled inequalities.
pub const INEQUALITY_RTOL: f64 = 1e-12;

fn check_membership_domain(d: usize, k: usize, u: f64) -> Result<f64> {
    if d == 0 || k == 0 {
        return Err(Error::Domain(format!("need d, k >= 1 (d={d}, k={k})")));
    }
    let cols = (k as f64).powi(d as i32 - 1);
    if !(0.0..=cols * k as f64).contains(&u) {
        return Err(Error::Domain(format!("u={u} outside [0, k^d] for d={d} k={k}")));
    }
    Ok(cols)
}

/// `f_{d,k}(u) = (1 - q) + q 2^(u/k^(d-1)) / 2^k` with `q = (1 - 2^-k)^(d-1)`.
pub fn f_dk_bound(d: usize, k: usize, u: f64) -> Result<f64> {
    let cols = check_membership_domain(d, k, u)?;
    let q = (1.0 - 2f64.powi(-(k as i32))).powi(d as i32 - 1);
    Ok((1.0 - q) + q * 2f64.powf(u / cols - k as f64))
}

/// `d / 2^k + 2^(u/k^(d-1)) / 2^k`.
pub fn relaxed_membership_bound(d: usize, k: usize, u: f64) -> Result<f64> {
    let cols = check_membership_domain(d, k, u)?;
    Ok(d as f64 * 2f64.powi(-(k as i32)) + 2f64.powf(u / cols - k as f64))
}

/// Binary entropy in bits, with `h2(0) = h2(1) = 0`.
pub fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

fn mrrw_residual(rho: f64) -> f64 {
    rho - h2(0.5 - (rho * (1.0 - rho)).sqrt())
}

/// The root `rho*` of `rho = h2(1/2 - sqrt(rho(1 - rho)))` in `(0, 1/2)`, and `1/rho*`.
///
/// Bisection runs until both the bracket and the residual are within `tol`.
pub fn mrrw_constant(tol: f64) -> (f64, f64) {
    let tol = if tol > 0.0 { tol } else { f64::EPSILON };
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 0.5);
    let mut mid = 0.25;
    for _ in 0..2000 {
        mid = 0.5 * (lo + hi);
        let r = mrrw_residual(mid);
        if hi - lo <= tol && r.abs() <= tol {
            break;
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON * mid {
            break;
        }
    }
    (mid, 1.0 / mid)
}

/// A feasible point of `k >= b_1 >= ... >= b_k >= 0`, `sum b_i = u`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxProblemPoint {
    pub k: usize,
    pub u: f64,
    pub b: Vec<f64>,
}

impl MaxProblemPoint {
    /// `sum_i 2^(i-1) 2^(b_i)` (1-based `i`).
    pub fn objective(&self) -> f64 {
        self.b
            .iter()
            .enumerate()
            .map(|(i, &bi)| 2f64.powi(i as i32) * 2f64.powf(bi))
            .sum()
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        let k = self.k as f64;
        self.b.len() == self.k
            && self.b.iter().all(|&x| (-tol..=k + tol).contains(&x))
            && self.b.windows(2).all(|w| w[0] + tol >= w[1])
            && (self.b.iter().sum::<f64>() - self.u).abs() <= tol.max(1e-12 * self.u)
    }
}

/// `(2^k - 1) 2^(u/k)`.
pub fn appendix_bound(k: usize, u: f64) -> f64 {
    (2f64.powi(k as i32) - 1.0) * 2f64.powf(u / k as f64)
}

/// Extreme points `(k,..,k [a times], l,..,l [b times], 0,..)` with `ak + bl = u`.
pub fn extreme_points(k: usize, u: f64) -> Vec<MaxProblemPoint> {
    let kf = k as f64;
    let mut pts = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            let rest = u - a as f64 * kf;
            let ell = if b > 0 {
                let ell = rest / b as f64;
                if !(-1e-12..=kf + 1e-12).contains(&ell) {
                    continue;
                }
                ell.clamp(0.0, kf)
            } else {
                if rest.abs() > 1e-12 {
                    continue;
                }
                0.0
            };
            let mut v = vec![kf; a];
            v.extend(std::iter::repeat_n(ell, b));
            v.resize(k, 0.0);
            pts.push(MaxProblemPoint { k, u, b: v });
        }
    }
    pts
}

/// Uniform values, sorted, rescaled to sum `u`, then clamped at `k` with the
/// excess spread proportionally over the unclamped entries.
pub fn random_feasible_point(k: usize, u: f64, rng: &mut impl Rng) -> MaxProblemPoint {
    let kf = k as f64;
    let mut b: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
    b.sort_by(|x, y| y.total_cmp(x));
    let s: f64 = b.iter().sum();
    if s > 0.0 {
        b.iter_mut().for_each(|x| *x *= u / s);
    } else {
        b.iter_mut().for_each(|x| *x = u / kf);
    }
    for _ in 0..=2 * k {
        let excess: f64 = b.iter().map(|&x| (x - kf).max(0.0)).sum();
        if excess <= 0.0 {
            break;
        }
        let free: f64 = b.iter().filter(|&&x| x < kf).sum();
        b.iter_mut().for_each(|x| *x = x.min(kf));
        if free > 0.0 {
            let scale = 1.0 + excess / free;
            b.iter_mut().filter(|x| **x < kf).for_each(|x| *x *= scale);
        } else {
            let n_free = b.iter().filter(|&&x| x < kf).count().max(1);
            b.iter_mut()
                .filter(|x| **x < kf)
                .for_each(|x| *x += excess / n_free as f64);
        }
    }
    b.sort_by(|x, y| y.total_cmp(x));
    MaxProblemPoint { k, u, b }
}

/// Checks the maximum of `sum 2^(i-1) 2^(b_i)` over the polytope against
/// `(2^k - 1) 2^(u/k)` at the extreme points and at random feasible points.
pub fn appendix_max_check(k: usize, u: f64, random_trials: u64, seed: u64) -> Result<VerificationReport> {
    if k == 0 || !(0.0..=(k * k) as f64).contains(&u) {
        return Err(Error::Domain(format!("need k >= 1 and 0 <= u <= k^2 (k={k}, u={u})")));
    }
    let bound = appendix_bound(k, u);
    let mut report = VerificationReport::new("appendix-max", Method::Exhaustive)
        .param("k", k)
        .param("u", crate::report::fmt12(u))
        .param("trials", random_trials);
    report.seed = Some(seed);
    report.samples = Some(random_trials);

    let pts = extreme_points(k, u);
    let extreme_max = pts
        .iter()
        .map(MaxProblemPoint::objective)
        .fold(f64::NEG_INFINITY, f64::max);
    let maximizers: Vec<String> = pts
        .iter()
        .filter(|p| (p.objective() - bound).abs() <= APPENDIX_TOL * bound.max(1.0))
        .map(|p| {
            format!(
                "({})",
                p.b.iter()
                    .map(|x| crate::report::fmt12(*x))
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_max = f64::NEG_INFINITY;
    let mut infeasible = 0u64;
    for _ in 0..random_trials {
        let p = random_feasible_point(k, u, &mut rng);
        if !p.is_feasible(1e-9) {
            infeasible += 1;
        }
        random_max = random_max.max(p.objective());
    }

    report.measure(Labeled::float("extreme_max", extreme_max));
    if random_trials > 0 {
        report.measure(Labeled::float("random_max", random_max));
    }
    report.measure(Labeled::int("extreme_points", pts.len() as i128));
    report.measure(Labeled::text("maximizers", maximizers.join(" ")));
    report.bound = Some(Labeled::float("(2^k-1)2^(u/k)", bound));
    let tol = APPENDIX_TOL * bound.max(1.0);
    report.check(extreme_max <= bound + tol, "extreme-point maximum exceeds the bound");
    report.check(
        (extreme_max - bound).abs() <= tol,
        "extreme-point maximum differs from the bound",
    );
    report.check(
        random_trials == 0 || random_max <= bound + tol,
        "a random feasible point exceeds the bound",
    );
    report.check(
        infeasible == 0,
        format!("{infeasible} generated points were infeasible"),
    );
    Ok(report)
}

/// `(x^r - 1)/(x - 1)`, continuous at `x = 1`.
pub fn geometric_ratio(x: f64, r: f64) -> f64 {
    let lx = x.ln();
    if lx.abs() < 1e-300 {
        return r;
    }
    (r * lx).exp_m1() / lx.exp_m1()
}

/// `(lhs, rhs)` of `(z^l - 1)(z^b - 1) <= (z^(bl) - 1)(z - 1)`.
pub fn product_inequality_sides(z: f64, beta: f64, lambda: f64) -> (f64, f64) {
    let lz = z.ln();
    (
        (lambda * lz).exp_m1() * (beta * lz).exp_m1(),
        (beta * lambda * lz).exp_m1() * lz.exp_m1(),
    )
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + INEQUALITY_RTOL * lhs.abs().max(rhs.abs())
}

/// Samples both elementary inequalities `trials` times each.
pub fn inequality_checks(trials: u64, seed: u64) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::Domain("inequality checks need at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport::new("inequalities", Method::MonteCarlo).param("trials", trials);
    report.seed = Some(seed);
    report.samples = Some(2 * trials);

    let (mut mono_fail, mut mono_worst) = (0u64, 0f64);
    for _ in 0..trials {
        let r = 1.0 + 19.0 * rng.gen::<f64>();
        let x = 1.0 + 9.0 * rng.gen::<f64>();
        let y = 1.0 + (x - 1.0) * rng.gen::<f64>();
        let (gy, gx) = (geometric_ratio(y, r), geometric_ratio(x, r));
        mono_worst = mono_worst.max(gy / gx);
        if !within(gy, gx) {
            mono_fail += 1;
        }
    }
    let (mut prod_fail, mut prod_worst) = (0u64, 0f64);
    for _ in 0..trials {
        let z = 1.0 + 99.0 * rng.gen::<f64>();
        let beta: f64 = rng.gen();
        let lambda: f64 = rng.gen();
        let (lhs, rhs) = product_inequality_sides(z, beta, lambda);
        if rhs > 0.0 {
            prod_worst = prod_worst.max(lhs / rhs);
        }
        if !within(lhs, rhs) {
            prod_fail += 1;
        }
    }
    report.measure(Labeled::int("monotonicity_violations", mono_fail as i128));
    report.measure(Labeled::float("monotonicity_max_ratio", mono_worst));
    report.measure(Labeled::int("product_violations", prod_fail as i128));
    report.measure(Labeled::float("product_max_ratio", prod_worst));
    report.bound = Some(Labeled::float("ratio", 1.0));
    report.check(mono_fail == 0, format!("{mono_fail} monotonicity violations"));
    report.check(prod_fail == 0, format!("{prod_fail} product-inequality violations"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_dk_examples() {
        for k in 1..6 {
            for u in 0..=k {
                let v = f_dk_bound(1, k, u as f64).unwrap();
                assert!((v - 2f64.powi(u as i32 - k as i32)).abs() < 1e-15);
            }
        }
        let v = f_dk_bound(2, 2, 1.0).unwrap();
        assert!((v - (0.25 + 0.75 * 2f64.sqrt() / 4.0)).abs() < 1e-15);
        assert!((v - 0.5152).abs() < 1e-4);
        for (d, k) in [(1, 3), (2, 2), (3, 2), (3, 3), (4, 2)] {
            let full = (k as f64).powi(d as i32);
            assert!((f_dk_bound(d, k, full).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(f_dk_bound(2, 2, 5.0).is_err());
        assert!(f_dk_bound(2, 2, -1.0).is_err());
        assert!(f_dk_bound(0, 2, 0.0).is_err());
    }

    #[test]
    fn f_dk_is_monotone_and_below_relaxation() {
        for d in 1..=4 {
            for k in 1..=5 {
                let top = (k as f64).powi(d as i32);
                let mut prev = 0.0;
                for step in 0..=200 {
                    let u = top * step as f64 / 200.0;
                    let v = f_dk_bound(d, k, u).unwrap();
                    assert!(v >= prev - 1e-15);
                    assert!(v <= relaxed_membership_bound(d, k, u).unwrap() + 1e-15);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn mrrw_examples() {
        assert_eq!(h2(0.5), 1.0);
        let (rho, inv) = mrrw_constant(1e-9);
        assert!((3.51..=3.53).contains(&inv), "{inv}");
        assert!(mrrw_residual(rho).abs() <= 1e-9);
        assert_eq!(mrrw_constant(1e-9), mrrw_constant(1e-9));
        let (fine, _) = mrrw_constant(1e-12);
        for tol in [1e-3, 1e-5, 1e-7, 1e-9] {
            let (r, _) = mrrw_constant(tol);
            assert!((r - fine).abs() <= tol, "tol {tol}");
        }
    }

    #[test]
    fn appendix_examples() {
        let r = appendix_max_check(2, 2.0, 1000, 1).unwrap();
        assert!(!r.failed(), "{r}");
        let pts = extreme_points(2, 2.0);
        let best: Vec<_> = pts
            .iter()
            .filter(|p| (p.objective() - 6.0).abs() < 1e-12)
            .map(|p| p.b.clone())
            .collect();
        assert!(best.contains(&vec![1.0, 1.0]));
        assert!(best.contains(&vec![2.0, 0.0]));
        assert!(r
            .measured
            .iter()
            .any(|m| m.label == "maximizers" && m.value.to_string() == "(1,1) (2,0)"));

        for k in 1..=6 {
            let at_zero = extreme_points(k, 0.0)
                .iter()
                .map(MaxProblemPoint::objective)
                .fold(0.0, f64::max);
            assert!((at_zero - (2f64.powi(k as i32) - 1.0)).abs() < 1e-9);
            let kk = (k * k) as f64;
            let at_top = extreme_points(k, kk)
                .iter()
                .map(MaxProblemPoint::objective)
                .fold(0.0, f64::max);
            assert!((at_top - (2f64.powi(k as i32) - 1.0) * 2f64.powi(k as i32)).abs() < 1e-9);
        }
        assert!(appendix_max_check(2, 5.0, 10, 1).is_err());
    }

    #[test]
    fn random_points_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=6 {
            for step in 0..=20 {
                let u = (k * k) as f64 * step as f64 / 20.0;
                for _ in 0..50 {
                    let p = random_feasible_point(k, u, &mut rng);
                    assert!(p.is_feasible(1e-9), "{p:?}");
                }
            }
        }
    }

    #[test]
    fn inequality_examples() {
        let (l, r) = product_inequality_sides(4.0, 0.5, 0.5);
        assert!((l - 1.0).abs() < 1e-15);
        assert!((r - 3.0 * (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(product_inequality_sides(7.0, 0.3, 0.0), (0.0, 0.0));
        assert_eq!(product_inequality_sides(1.0, 0.3, 0.6), (0.0, 0.0));
        assert_eq!(geometric_ratio(1.0, 3.5), 3.5);
        assert!((geometric_ratio(2.0, 3.0) - 7.0).abs() < 1e-12);
        let rep = inequality_checks(10_000, 9).unwrap();
        assert!(!rep.failed(), "{rep}");
        assert!(inequality_checks(0, 9).is_err());
    }
}
