//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use f2lab_core::bias::{bias_bruteforce, bias_exact};
use f2lab_core::harness::{self, Budget, Profile};
use f2lab_core::numerics::mrrw_constant;
use f2lab_core::rank::{claim_margin, matmul_bias_exact, rank_count, rank_exact, rank_lb_bias, RankOutcome};
use f2lab_core::report::{Holds, Value, VerificationReport};
use f2lab_core::tensors::{matmul_tensor, trace_tensor};
use f2lab_core::DyadicRational;

type Check = Result<String, String>;

fn dy(n: u64, e: u64) -> DyadicRational {
    DyadicRational::new(n, e)
}

fn holds(r: &VerificationReport) -> Check {
    if r.failed() {
        Err(format!("{} failed: {}", r.name, r.notes.join("; ")))
    } else {
        Ok(String::new())
    }
}

fn all_hold(rs: &[VerificationReport]) -> Check {
    rs.iter().try_for_each(|r| holds(r).map(|_| ()))?;
    Ok(String::new())
}

fn measured_int(r: &VerificationReport, label: &str) -> Option<i128> {
    r.measured
        .iter()
        .find(|m| m.label == label)
        .and_then(|m| match m.value {
            Value::Int(i) => Some(i),
            _ => None,
        })
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1(b: &Budget) -> Check {
    let r = harness::verify_bias_trace(10, 20, b).map_err(|e| e.to_string())?;
    holds(&r)?;
    Ok("exact formula for k=2..10 (brute force) and k=2..20 (contraction)".into())
}

fn c2(_: &Budget) -> Check {
    let t = trace_tensor(2).map_err(|e| e.to_string())?;
    let b = bias_exact(&t).map_err(|e| e.to_string())?;
    ensure(b == dy(7, 4), format!("bias {b}"))?;
    let lb = rank_lb_bias(&b, 3).map_err(|e| e.to_string())?;
    ensure(lb == 3, format!("lower bound {lb}"))?;
    match rank_exact(&t, 4).map_err(|e| e.to_string())? {
        RankOutcome::Rank { rank: 3, .. } => Ok("bias 7/2^4, lower bound 3, exact rank 3".into()),
        other => Err(format!("rank outcome {other:?}")),
    }
}

fn c3(b: &Budget) -> Check {
    let mut total = 0;
    for (d, k) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let r = harness::verify_rank_bias(d, k, 5, 300, 100 + (d * 10 + k) as u64, b).map_err(|e| e.to_string())?;
        holds(&r)?;
        ensure(measured_int(&r, "violations") == Some(0), "violations")?;
        total += r.samples.unwrap_or(0);
    }
    ensure(total >= 1000, format!("only {total} decompositions"))?;
    Ok(format!("{total} decompositions, 0 violations"))
}

fn c4(b: &Budget) -> Check {
    for (d, k, t) in [(2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 2, 1)] {
        let r = harness::verify_expected_bias_formula(d, k, t, 1, 1, b).map_err(|e| e.to_string())?;
        ensure(
            r.method == f2lab_core::report::Method::Exhaustive,
            format!("({d},{k},{t}) not enumerated"),
        )?;
        holds(&r)?;
    }
    Ok("closed form matches enumeration at 4 parameter sets".into())
}

fn c5(b: &Budget) -> Check {
    for (d, k, t) in [(2, 1, 1), (2, 2, 1), (2, 2, 2)] {
        let r = harness::verify_moment_identity(d, k, t, b).map_err(|e| e.to_string())?;
        holds(&r)?;
        if (d, k, t) == (2, 2, 2) {
            let lhs = r
                .measured
                .iter()
                .find(|m| m.label == "E_f[bias^t]")
                .map(|m| m.value.clone());
            ensure(lhs == Some(Value::Exact(dy(29, 7))), format!("(2,2,2) gives {lhs:?}"))?;
        }
    }
    Ok("both sides equal; 29/2^7 at (2,2,2)".into())
}

fn c6(b: &Budget) -> Check {
    let mut total = 0;
    for (d, k) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let n = k * k * if d == 3 { k } else { 1 };
        let dims: Vec<usize> = (0..=n).collect();
        let r = harness::verify_subspace_membership(d, k, &dims, 4, 7 + (d * 10 + k) as u64, b)
            .map_err(|e| e.to_string())?;
        holds(&r)?;
        total += measured_int(&r, "subspaces").unwrap_or(0);
    }
    ensure(total >= 200, format!("only {total} subspaces"))?;
    Ok(format!("{total} subspaces, 0 violations"))
}

fn c7(b: &Budget) -> Check {
    let formula = matmul_bias_exact(2).map_err(|e| e.to_string())?;
    let brute = bias_bruteforce(&matmul_tensor(2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(
        formula == dy(29, 7) && brute == formula,
        format!("formula {formula}, enumeration {brute}"),
    )?;
    let r = harness::verify_bias_matmul(4, b).map_err(|e| e.to_string())?;
    holds(&r)?;
    let counts = |n| rank_count(n).map(|d| d.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
    ensure(counts(2).as_deref() == Ok("1,9,6"), "n=2 counts")?;
    ensure(counts(3).as_deref() == Ok("1,49,294,168"), "n=3 counts")?;
    Ok("29/2^7 by both routes; bound holds for n=2..4; counts match enumeration".into())
}

fn c8(b: &Budget) -> Check {
    let rows = claim_margin(2).map_err(|e| e.to_string())?;
    ensure(
        (rows[1].ratio - 1.125).abs() < 1e-12 && !rows[1].holds,
        format!("ratio {}", rows[1].ratio),
    )?;
    let r = harness::verify_claim_margin(4, b).map_err(|e| e.to_string())?;
    ensure(r.holds == Holds::ReportOnly, "claim report asserts")?;
    Ok("ratio 1.125 at n=2, r=1, report-only".into())
}

fn c9(b: &Budget) -> Check {
    let r = harness::verify_code_certificate(0, 1, b).map_err(|e| e.to_string())?;
    holds(&r)?;
    let n = measured_int(&r, "rank-3 decompositions of trace_2").unwrap_or(0);
    ensure(n > 0, "no decompositions")?;
    Ok(format!(
        "{n} decompositions, each with reconstructed bias 7/2^4 and kernel dimension 1"
    ))
}

fn c10(_: &Budget) -> Check {
    let (_, inv) = mrrw_constant(1e-9);
    ensure((3.51..=3.53).contains(&inv), format!("1/rho* = {inv}"))?;
    Ok(format!("1/rho* = {inv:.6}"))
}

fn c11(b: &Budget) -> Check {
    let r = harness::verify_appendix_max(6, 100, 100_000, 11, b).map_err(|e| e.to_string())?;
    holds(&r)?;
    ensure(r.samples.unwrap_or(0) >= 100_000, "too few random points")?;
    Ok("600 (k, u) instances, >= 1e5 random points, double maximum at k=2, u=2 reported".into())
}

fn c12(b: &Budget) -> Check {
    let r = harness::verify_inequalities(100_000, 12, b).map_err(|e| e.to_string())?;
    holds(&r)?;
    Ok("1e5 samples of each inequality".into())
}

fn c13(b: &Budget) -> Check {
    let mut reports = Vec::new();
    for d in 2..=4 {
        for k in 1..=6 {
            reports.push(
                harness::verify_explicit_form(d, k, 1000, 13 + (d * 10 + k) as u64, b).map_err(|e| e.to_string())?,
            );
        }
    }
    all_hold(&reports)?;
    Ok("exact bias and 1000 correlations for each d=2..4, k=1..6".into())
}

fn c14(b: &Budget) -> Check {
    let r = harness::verify_bias_tail(2, 8, 0.25, 10_000, 14, b).map_err(|e| e.to_string())?;
    holds(&r)?;
    let z = r
        .measured
        .iter()
        .find(|m| m.label == "|frequency - exact| / se")
        .map(|m| m.value.to_string());
    Ok(format!("deviation {} standard errors", z.unwrap_or_default()))
}

fn c15(_: &Budget) -> Check {
    let mut parts = Vec::new();
    for (profile, limit) in [
        (Profile::Quick, Duration::from_secs(60)),
        (Profile::Full, Duration::from_secs(1800)),
    ] {
        let budget = Budget::for_profile(profile).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let reports = harness::run_all(profile, &budget);
        let elapsed = start.elapsed();
        all_hold(&reports)?;
        ensure(elapsed < limit, format!("{profile} took {elapsed:?}"))?;
        parts.push(format!(
            "{profile}: {} reports in {:.1} s",
            reports.len(),
            elapsed.as_secs_f64()
        ));
    }
    Ok(parts.join(", "))
}

type Criterion = (u32, Option<Duration>, fn(&Budget) -> Check);

fn main() {
    if let Err(e) = harness::init_threads_from_env() {
        eprintln!("{e}");
    }
    let budget = Budget::quick();
    let criteria: [Criterion; 15] = [
        (1, Some(Duration::from_secs(10)), c1),
        (2, Some(Duration::from_secs(60)), c2),
        (3, None, c3),
        (4, None, c4),
        (5, None, c5),
        (6, None, c6),
        (7, None, c7),
        (8, None, c8),
        (9, None, c9),
        (10, None, c10),
        (11, None, c11),
        (12, None, c12),
        (13, None, c13),
        (14, None, c14),
        (15, None, c15),
    ];
    let mut failed = 0;
    for (n, limit, f) in criteria {
        let start = Instant::now();
        let mut result = f(&budget);
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, limit) {
            if elapsed >= limit {
                result = Err(format!("took {elapsed:?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(detail) => println!("criterion {n}: PASS ({detail}; {} ms)", elapsed.as_millis()),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({why}; {} ms)", elapsed.as_millis());
            }
        }
    }
    println!("{} of 15 criteria passed", 15 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
