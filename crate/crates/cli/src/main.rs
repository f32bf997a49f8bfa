//! `f2lab`: command-line access to the f2lab kernels and verification suite.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use f2lab_core::bias::{bias_bruteforce, bias_exact, bias_mc, corr_class_max, corr_exact};
use f2lab_core::harness::{self, Budget, Profile, DEFAULT_SEED};
use f2lab_core::io;
use f2lab_core::numerics::{appendix_max_check, mrrw_constant};
use f2lab_core::rank::{bias_certificate, code_certificate, rank_exact, RankOutcome};
use f2lab_core::report::{fmt12, VerificationReport};
use f2lab_core::tensors::{explicit_form_tensor, matmul_tensor, random_rank_decomp, trace_tensor, DenseTensor};
use f2lab_core::{DyadicRational, Error, RankDecomposition};

#[derive(Parser)]
#[command(
    name = "f2lab",
    version,
    about = "Exact bias, correlation and rank computations for multilinear forms over F2"
)]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Omit wall-clock fields from JSON reports.
    #[arg(long, global = true)]
    canonical: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a tensor (F2T1) or decomposition (F2D1).
    #[command(subcommand)]
    Gen(Gen),
    /// Bias of a tensor file.
    #[command(subcommand)]
    Bias(BiasCmd),
    /// Correlation of a tensor with a polynomial or a degree class.
    Corr(CorrArgs),
    /// Exact rank, rank lower bounds and certificates.
    #[command(subcommand)]
    Rank(RankCmd),
    /// Run one named verification experiment, or `all`.
    Verify(VerifyArgs),
    /// The MRRW constant.
    Mrrw {
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Polytope maximum check for one (k, u).
    AppendixMax {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        u: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Gen {
    Trace {
        #[arg(long)]
        k: usize,
    },
    Matmul {
        #[arg(long)]
        n: usize,
    },
    Explicit {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
    },
    Random {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    RandomRank {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum BiasCmd {
    Exact {
        file: PathBuf,
    },
    Brute {
        file: PathBuf,
    },
    Mc {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["poly", "max_degree"])))]
struct CorrArgs {
    file: PathBuf,
    /// Polynomial file (F2P1).
    #[arg(long, value_name = "PFILE")]
    poly: Option<PathBuf>,
    /// Maximize over all polynomials of degree at most L.
    #[arg(long, value_name = "L")]
    max_degree: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LbMethod {
    Bias,
}

#[derive(Subcommand)]
enum RankCmd {
    Exact {
        file: PathBuf,
        #[arg(long)]
        max_t: usize,
        /// Also write a minimal decomposition (F2D1) here.
        #[arg(long, value_name = "PATH")]
        witness: Option<PathBuf>,
    },
    Lb {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "bias")]
        method: LbMethod,
    },
    Certify {
        decomp_file: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Experiment name, or `all`.
    name: String,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Failure modes: assertions that did not hold, or an error before any verdict.
enum Outcome {
    Failed,
    Error(String),
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::Error(e.to_string())
    }
}

type CliResult = Result<(), Outcome>;

struct Output {
    json: bool,
    canonical: bool,
    out: Option<PathBuf>,
}

impl Output {
    fn write(&self, text: &str) -> CliResult {
        let mut text = text.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Outcome::Error(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit(&self, text: String, value: Value) -> CliResult {
        if self.json {
            self.write(&serde_json::to_string_pretty(&value).expect("json values serialize"))
        } else {
            self.write(&text)
        }
    }

    fn report_json(&self, r: &VerificationReport) -> Value {
        let mut v = serde_json::to_value(r).expect("reports serialize");
        if self.canonical {
            if let Some(o) = v.as_object_mut() {
                o.remove("elapsed_ms");
            }
        }
        v
    }

    fn reports(&self, reports: &[VerificationReport]) -> CliResult {
        let failed = reports.iter().filter(|r| r.failed()).count();
        if self.json {
            let arr: Vec<Value> = reports.iter().map(|r| self.report_json(r)).collect();
            let v = if arr.len() == 1 {
                arr.into_iter().next().expect("one report")
            } else {
                Value::Array(arr)
            };
            self.write(&serde_json::to_string_pretty(&v).expect("json values serialize"))?;
        } else {
            let mut text: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
            if reports.len() > 1 {
                text.push(format!("{} reports, {failed} failed", reports.len()));
            }
            self.write(&text.join("\n"))?;
        }
        if failed > 0 {
            Err(Outcome::Failed)
        } else {
            Ok(())
        }
    }
}

fn read_input(path: &Path) -> Result<String, Outcome> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Outcome::Error(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Outcome::Error(format!("{}: {e}", path.display())))
    }
}

fn load_tensor(path: &Path) -> Result<DenseTensor, Outcome> {
    Ok(io::parse_tensor(&read_input(path)?)?)
}

fn load_decomp(path: &Path) -> Result<RankDecomposition, Outcome> {
    Ok(io::parse_decomp(&read_input(path)?)?)
}

fn exact_json(v: &DyadicRational) -> Value {
    json!({ "exact": v.to_string(), "float": v.to_f64() })
}

fn exact_text(v: &DyadicRational) -> String {
    format!("{v} (~{})", fmt12(v.to_f64()))
}

fn run_gen(g: Gen, out: &Output) -> CliResult {
    let text = match g {
        Gen::Trace { k } => io::format_tensor(&trace_tensor(k)?),
        Gen::Matmul { n } => io::format_tensor(&matmul_tensor(n)?),
        Gen::Explicit { d, k } => io::format_tensor(&explicit_form_tensor(d, k)?),
        Gen::Random { d, k, seed } => io::format_tensor(&DenseTensor::random(d, k, seed)?),
        Gen::RandomRank { d, k, t, seed } => io::format_decomp(&random_rank_decomp(d, k, t, seed)),
    };
    out.write(&text)
}

fn run_bias(b: BiasCmd, out: &Output) -> CliResult {
    match b {
        BiasCmd::Exact { file } => {
            let v = bias_exact(&load_tensor(&file)?)?;
            out.emit(
                format!("bias {}", exact_text(&v)),
                json!({ "bias": exact_json(&v), "method": "exact" }),
            )
        }
        BiasCmd::Brute { file } => {
            let v = bias_bruteforce(&load_tensor(&file)?)?;
            out.emit(
                format!("bias {}", exact_text(&v)),
                json!({ "bias": exact_json(&v), "method": "brute" }),
            )
        }
        BiasCmd::Mc {
            file,
            samples,
            confidence,
            seed,
        } => {
            let e = bias_mc(&load_tensor(&file)?, samples, confidence, seed)?;
            let text = format!(
                "signed bias estimate {} +- {} ({} samples, confidence {}, seed {})",
                fmt12(e.point),
                fmt12(e.ci_halfwidth),
                e.samples,
                fmt12(e.confidence),
                e.seed
            );
            out.emit(text, serde_json::to_value(&e).expect("estimates serialize"))
        }
    }
}

fn run_corr(c: CorrArgs, out: &Output) -> CliResult {
    let t = load_tensor(&c.file)?;
    if let Some(p) = c.poly {
        let poly = io::parse_poly(&read_input(&p)?)?;
        let v = corr_exact(&t, &poly)?;
        return out.emit(
            format!("correlation {}", exact_text(&v)),
            json!({ "correlation": exact_json(&v) }),
        );
    }
    let ell = c.max_degree.expect("clap requires --poly or --max-degree");
    let best = corr_class_max(&t, ell)?;
    let text = format!(
        "max correlation {} over 2^{} polynomials of degree <= {ell}\nwitness:\n{}",
        exact_text(&best.corr),
        best.class_size_log2,
        io::format_poly(&best.witness).trim_end()
    );
    out.emit(
        text,
        json!({
            "correlation": exact_json(&best.corr),
            "max_degree": ell,
            "class_size_log2": best.class_size_log2,
            "witness": io::format_poly(&best.witness),
        }),
    )
}

fn run_rank(r: RankCmd, out: &Output) -> CliResult {
    match r {
        RankCmd::Exact { file, max_t, witness } => {
            let t = load_tensor(&file)?;
            match rank_exact(&t, max_t)? {
                RankOutcome::Rank { rank, witness: w } => {
                    if let (Some(path), Some(w)) = (&witness, &w) {
                        io::write_decomp(path, w)?;
                    }
                    out.emit(format!("rank {rank}"), json!({ "rank": rank, "exceeds": Value::Null }))
                }
                RankOutcome::ExceedsMax(m) => {
                    out.emit(format!("rank > {m}"), json!({ "rank": Value::Null, "exceeds": m }))
                }
            }
        }
        RankCmd::Lb {
            file,
            method: LbMethod::Bias,
        } => {
            let c = bias_certificate(&load_tensor(&file)?)?;
            let b = c.bias_used.clone().unwrap_or_else(DyadicRational::one);
            out.emit(
                format!("rank >= {} (bias {})", c.lower_bound, exact_text(&b)),
                serde_json::to_value(&c).expect("certificates serialize"),
            )
        }
        RankCmd::Certify { decomp_file } => {
            let c = code_certificate(&load_decomp(&decomp_file)?)?;
            let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
            let text = format!(
                "rank >= {} (code certificate)\nterms {}\nkernel_dim {}\ndual_dim {}\ndual_min_weight {}\nreconstructed_bias {}",
                c.lower_bound,
                opt(c.terms),
                opt(c.kernel_dim),
                opt(c.dual_dim),
                opt(c.dual_min_weight),
                c.reconstructed_bias.as_ref().map_or("-".to_string(), exact_text),
            );
            out.emit(text, serde_json::to_value(&c).expect("certificates serialize"))
        }
    }
}

fn run_verify(a: VerifyArgs, out: &Output) -> CliResult {
    if a.name == "all" {
        let profile: Profile = a.profile.as_deref().unwrap_or("quick").parse()?;
        let budget = Budget::for_profile(profile)?;
        return out.reports(&harness::run_all(profile, &budget));
    }
    if a.profile.is_some() {
        return Err(Outcome::Error("--profile applies to `verify all` only".into()));
    }
    let known = harness::experiment_names();
    if !known.contains(&a.name) {
        return Err(Outcome::Error(format!(
            "unknown experiment `{}`; known: all, {}",
            a.name,
            known.join(", ")
        )));
    }
    let budget = Budget::for_profile(Profile::Quick)?;
    let (d, k, t, seed) = (a.d, a.k, a.t, a.seed);
    let name = a.name.clone();
    let report = harness::timed(&name, &budget, |b| match name.as_str() {
        "moment-identity" => harness::verify_moment_identity(d.unwrap_or(2), k.unwrap_or(2), t.unwrap_or(2), b),
        "sum-zero" => harness::verify_sum_zero(d.unwrap_or(2), k.unwrap_or(2), t.unwrap_or(2), a.eps.unwrap_or(0.5), b),
        "subspace-membership" => {
            let (d, k) = (d.unwrap_or(2), k.unwrap_or(2));
            let dims: Vec<usize> = match t {
                Some(u) => vec![u],
                None => (0..=k.pow(d as u32)).collect(),
            };
            harness::verify_subspace_membership(d, k, &dims, a.trials.unwrap_or(10), seed, b)
        }
        "span-dimension" => harness::verify_span_dimension(d.unwrap_or(2), k.unwrap_or(2), t.unwrap_or(2), b),
        "bias-tail" => harness::verify_bias_tail(
            d.unwrap_or(2),
            k.unwrap_or(8),
            a.eps.unwrap_or(0.25),
            a.samples.unwrap_or(10_000),
            seed,
            b,
        ),
        "rank-bias" => harness::verify_rank_bias(
            d.unwrap_or(3),
            k.unwrap_or(2),
            t.unwrap_or(5),
            a.trials.unwrap_or(300),
            seed,
            b,
        ),
        "zero-pattern" => harness::verify_lemma_zero_pattern(
            d.unwrap_or(2),
            k.unwrap_or(2),
            t.unwrap_or(2),
            a.trials.unwrap_or(100),
            seed,
            b,
        ),
        "expected-bias" => harness::verify_expected_bias_formula(
            d.unwrap_or(2),
            k.unwrap_or(1),
            t.unwrap_or(1),
            a.samples.unwrap_or(20_000),
            seed,
            b,
        ),
        "bias-trace" => {
            let kmax = k.unwrap_or(20);
            harness::verify_bias_trace(kmax.min(10), kmax, b)
        }
        "bias-matmul" => harness::verify_bias_matmul(a.n.unwrap_or(4), b),
        "explicit-form" => {
            harness::verify_explicit_form(d.unwrap_or(3), k.unwrap_or(2), a.trials.unwrap_or(1000), seed, b)
        }
        "linear-map" => harness::verify_linear_map_fact(k.unwrap_or(8), a.trials.unwrap_or(1000), seed, b),
        "claim-margin" => harness::verify_claim_margin(a.n.unwrap_or(4), b),
        "mrrw" => harness::verify_mrrw(1e-9, b),
        "appendix-max" => harness::verify_appendix_max(
            k.unwrap_or(6),
            a.trials.unwrap_or(100),
            a.samples.unwrap_or(100_000),
            seed,
            b,
        ),
        "inequalities" => harness::verify_inequalities(a.samples.unwrap_or(100_000), seed, b),
        "code-certificate" => harness::verify_code_certificate(a.trials.unwrap_or(200), seed, b),
        "rank-trace" => harness::verify_rank_trace(b),
        "trace-ladder" => harness::verify_trace_ladder(k.unwrap_or(14), b),
        "class-correlation" => harness::verify_class_correlation(d.unwrap_or(3), k.unwrap_or(2), seed, b),
        other => Err(Error::Domain(format!("unknown experiment `{other}`"))),
    });
    out.reports(std::slice::from_ref(&report))
}

fn run(cli: Cli) -> CliResult {
    harness::init_threads_from_env()?;
    let out = Output {
        json: cli.json,
        canonical: cli.canonical,
        out: cli.out,
    };
    match cli.command {
        Command::Gen(g) => run_gen(g, &out),
        Command::Bias(b) => run_bias(b, &out),
        Command::Corr(c) => run_corr(c, &out),
        Command::Rank(r) => run_rank(r, &out),
        Command::Verify(v) => run_verify(v, &out),
        Command::Mrrw { tol } => {
            let budget = Budget::for_profile(Profile::Quick)?;
            let r = harness::timed("mrrw", &budget, |b| harness::verify_mrrw(tol, b));
            if !out.json {
                let (rho, inv) = mrrw_constant(tol);
                out.write(&format!("rho* {}\n1/rho* {}", fmt12(rho), fmt12(inv)))?;
                return if r.failed() { Err(Outcome::Failed) } else { Ok(()) };
            }
            out.reports(std::slice::from_ref(&r))
        }
        Command::AppendixMax { k, u, trials, seed } => {
            let budget = Budget::for_profile(Profile::Quick)?;
            let r = harness::timed("appendix-max", &budget, |_| appendix_max_check(k, u, trials, seed));
            out.reports(std::slice::from_ref(&r))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Outcome::Failed) => ExitCode::from(1),
        Err(Outcome::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
