//! Command-line front end. Every run is a pure function of its flags; JSON is
//! the machine contract and `--format pretty` a table for people.
//!
//! Exit codes: 0 pass, 1 check failed, 2 usage error, 3 I/O error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::axioms::check_axioms;
use crate::algebra::free::FreeContext;
use crate::algebra::matrix::MatrixContext;
use crate::algebra::{trial_rng, AlgebraError, RandomElements};
use crate::cochains::{
    build_psi0, build_psi_n1, build_psi_nl, build_s_even, evaluate, evaluate_naive, CochainDescriptor, CochainError,
};
use crate::cohomology::symbolic::{certify_inner_cocycle, certify_lemma_1_1_1, certify_thm11, SYMBOLIC_SIZE_BOUND};
use crate::cohomology::{
    verify_key_lemma, verify_lemma_1_1, verify_lemma_1_2, verify_thm11, verify_thm21, verify_thm23,
};
use crate::combinatorics::{enumerate_a_even, enumerate_circles, enumerate_intervals, reduce};
use crate::psido::{bracket_series_check, make_psido_context};
use crate::rational::Rational;
use crate::report::{TrialOutcome, VerificationReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lifting", version, about = "Lifting-formula cocycles: construction and exact verification")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the even-gap sequences with their reductions
    Sequences {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[command(flatten)]
        output: Output,
    },
    /// List marked intervals with `k` marks on `n - 1` points
    Intervals {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// List marked circles with `k` marks over every reduced sequence
    Circles {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Build a cochain descriptor
    Build {
        target: BuildTarget,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run a verification
    Verify {
        check: Check,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Compare the optimized evaluator with the naive one on random matrices
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "N")]
        dim: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BuildTarget {
    Psi0,
    PsiN1,
    PsiNl,
    SEven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Axioms,
    Lemma11,
    Lemma12,
    Thm11,
    Thm21,
    Thm23,
    KeyLemma,
    Lemma111,
    BracketSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Matrix,
    Free,
    Psido,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct RunConfig {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, value_enum, default_value_t = Backend::Matrix)]
    backend: Backend,
    /// Matrix size; defaults to max(3, n), or max(3, n + 1) with --commuting
    #[arg(long = "N")]
    dim: Option<usize>,
    /// Window depth for the psido backend (coefficients down to ∂^-depth)
    #[arg(long, default_value_t = 10)]
    window: i32,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    cutoff: u32,
    /// Commuting derivations (matrix: polynomials in one matrix; free: Leibniz atoms)
    #[arg(long)]
    commuting: bool,
    /// Matrix generators as JSON `{"n", "N", "generators"}`
    #[arg(long)]
    generators: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<CochainError> for Failure {
    fn from(e: CochainError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_IO
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Sequences { n, l, output } => {
            positive(&[("n", n), ("l", l)])?;
            let rows: Vec<Value> = enumerate_a_even(n, l)
                .iter()
                .map(|a| {
                    let r = reduce(a);
                    json!({"a": a.label(), "s1": r.s1(), "s2": r.s2(), "tilde": r.label(), "sign": r.sign()})
                })
                .collect();
            let pretty = rows
                .iter()
                .map(|r| format!("{}  s1={}  tilde={}", r["a"].as_str().unwrap(), r["s1"], r["tilde"].as_str().unwrap()))
                .collect::<Vec<_>>()
                .join("\n");
            emit(&output, &Value::from(rows), &pretty)?;
            Ok(EXIT_PASS)
        }
        Command::Intervals { n, k, output } => {
            positive(&[("n", n)])?;
            let rows: Vec<Value> = enumerate_intervals(n, k).iter().map(|t| json!(t.marks())).collect();
            let pretty = rows.iter().map(Value::to_string).collect::<Vec<_>>().join("\n");
            emit(&output, &Value::from(rows), &pretty)?;
            Ok(EXIT_PASS)
        }
        Command::Circles { n, l, k, output } => {
            positive(&[("n", n), ("l", l), ("k", k)])?;
            let mut rows = Vec::new();
            for a in enumerate_a_even(n, l) {
                let r = reduce(&a);
                for c in enumerate_circles(&r, k) {
                    rows.push(json!({"a": a.label(), "tilde": r.label(), "marks": c.marks()}));
                }
            }
            let pretty = rows
                .iter()
                .map(|r| format!("{}  tilde={}  marks={}", r["a"].as_str().unwrap(), r["tilde"].as_str().unwrap(), r["marks"]))
                .collect::<Vec<_>>()
                .join("\n");
            emit(&output, &Value::from(rows), &pretty)?;
            Ok(EXIT_PASS)
        }
        Command::Build { target, n, l, output } => {
            let d = match target {
                BuildTarget::Psi0 => build_psi0(n, l)?,
                BuildTarget::PsiN1 => build_psi_n1(n)?,
                BuildTarget::PsiNl => build_psi_nl(n, l)?,
                BuildTarget::SEven => build_s_even(n, l)?,
            };
            let value: Value = serde_json::from_str(&d.to_json()).expect("descriptor JSON");
            emit(&output, &value, &d.to_string())?;
            Ok(EXIT_PASS)
        }
        Command::Verify { check, run } => {
            let report = verify(check, &run)?;
            report_out(&run.output, &report)
        }
        Command::Oracle {
            n,
            l,
            trials,
            seed,
            dim,
            output,
        } => {
            positive(&[("n", n), ("l", l)])?;
            if n + 2 * l > SYMBOLIC_SIZE_BOUND {
                return Err(usage(format!("oracle needs n + 2l <= {SYMBOLIC_SIZE_BOUND}")));
            }
            let dim = dim.unwrap_or(n.max(3));
            let report = oracle(n, l, dim, trials, seed)?;
            report_out(&output, &report)
        }
    }
}

fn positive(fields: &[(&str, usize)]) -> Result<(), Failure> {
    match fields.iter().find(|(_, v)| *v == 0) {
        Some((name, _)) => Err(usage(format!("--{name} must be at least 1"))),
        None => Ok(()),
    }
}

fn matrix_context(run: &RunConfig, derivations: usize) -> Result<MatrixContext, Failure> {
    if let Some(path) = &run.generators {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let ctx = MatrixContext::from_json(&text)?;
        if ctx.generators().len() < derivations {
            return Err(usage(format!(
                "--generators: {} generators given, {derivations} needed",
                ctx.generators().len()
            )));
        }
        return Ok(ctx);
    }
    let default = if run.commuting { derivations + 1 } else { derivations };
    let dim = run.dim.unwrap_or(default.max(3));
    positive(&[("N", dim)])?;
    let mut rng = trial_rng(run.seed, u64::MAX);
    Ok(if run.commuting {
        MatrixContext::random_commuting(dim, derivations, &mut rng)
    } else {
        MatrixContext::random(dim, derivations, &mut rng)
    })
}

fn verify(check: Check, run: &RunConfig) -> Result<VerificationReport, Failure> {
    let (n, l, trials, seed) = (run.n, run.l, run.trials, run.seed);
    if check == Check::BracketSeries {
        return Ok(bracket_series_check(run.cutoff, Some(-run.window.abs()), trials, seed)?);
    }
    positive(&[("n", n), ("l", l), ("trials", trials)])?;
    if check == Check::Lemma111 {
        return Ok(certify_lemma_1_1_1(n, l, SYMBOLIC_SIZE_BOUND)?);
    }
    let report = match run.backend {
        Backend::Matrix => {
            let ctx = matrix_context(run, n)?;
            let r = dispatch(check, n, l, &ctx, trials, seed)?;
            r.param("backend", "matrix").param("N", ctx.dim())
        }
        Backend::Psido => {
            if run.window == 0 {
                return Err(usage("--window must be nonzero"));
            }
            let vars = n.div_ceil(2);
            let ctx = make_psido_context(vars, vec![-run.window.abs(); vars])?;
            let r = dispatch(check, n, l, &ctx, trials, seed)?;
            r.param("backend", "psido").param("window", -run.window.abs())
        }
        Backend::Free => match check {
            Check::Axioms => {
                let ctx = if run.commuting { FreeContext::commuting(n) } else { FreeContext::inner(n) };
                check_axioms(&ctx, trials, seed).param("backend", "free")
            }
            Check::Thm11 => certify_thm11(n, l, SYMBOLIC_SIZE_BOUND)?,
            Check::Thm21 => certify_inner_cocycle("thm21", &build_psi_n1(n)?)?,
            Check::Thm23 => certify_inner_cocycle("thm23", &build_psi_nl(n, l)?)?.param("l", l),
            other => return Err(usage(format!("{other:?} is not available on the free backend"))),
        },
    };
    Ok(report)
}

fn dispatch<C>(check: Check, n: usize, l: usize, ctx: &C, trials: usize, seed: u64) -> Result<VerificationReport, Failure>
where
    C: RandomElements<Value = Rational>,
{
    Ok(match check {
        Check::Axioms => check_axioms(ctx, trials, seed),
        Check::Lemma11 => verify_lemma_1_1(n, l, ctx, trials, seed)?,
        Check::Lemma12 => verify_lemma_1_2(n, l, ctx, trials, seed)?,
        Check::Thm11 => verify_thm11(n, l, ctx, trials, seed)?,
        Check::Thm21 => verify_thm21(n, ctx, trials, seed)?,
        Check::Thm23 => verify_thm23(n, l, ctx, trials, seed)?,
        Check::KeyLemma => verify_key_lemma(n, l, ctx, trials, seed)?,
        Check::Lemma111 | Check::BracketSeries => unreachable!("handled before backend dispatch"),
    })
}

/// Optimized against naive evaluation of `Ψ⁰`, `S_even` and the corrected
/// cochains on random matrix tuples.
pub fn oracle(n: usize, l: usize, dim: usize, trials: usize, seed: u64) -> Result<VerificationReport, CochainError> {
    let started = std::time::Instant::now();
    let mut cochains: Vec<CochainDescriptor> = vec![build_psi0(n, l)?, build_s_even(n, l)?, build_psi_nl(n, l)?];
    if l == 1 && n >= 2 {
        cochains.push(build_psi_n1(n)?);
    }
    let ctx = MatrixContext::random(dim, n, &mut trial_rng(seed, u64::MAX));
    let mut report = VerificationReport::new("oracle")
        .param("n", n)
        .param("l", l)
        .param("N", dim)
        .param("trials", trials)
        .param("seed", seed);
    let mut offset = 0;
    for d in &cochains {
        for t in 0..trials as u64 {
            let args = ctx.random_elements(d.arity, &mut trial_rng(seed, t));
            let fast = evaluate(d, &ctx, &args)?;
            let slow = evaluate_naive(d, &ctx, &args)?;
            report.trials.push(TrialOutcome::exact(offset, fast - slow));
            offset += 1;
        }
        report.terms_evaluated += crate::cohomology::products_per_evaluation(d) * trials as u64;
    }
    let names: Vec<&str> = cochains.iter().map(|d| d.meta.name.as_str()).collect();
    report.note("cochains", names);
    Ok(report.finish(started))
}

fn report_out(output: &Output, report: &VerificationReport) -> Result<i32, Failure> {
    let value = serde_json::to_value(report).expect("report serializes");
    emit(output, &value, &report.to_pretty())?;
    eprintln!("{}", report.summary_line());
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn emit(output: &Output, value: &Value, pretty: &str) -> Result<(), Failure> {
    let mut text = match output.format {
        Format::Json => serde_json::to_string_pretty(value).expect("JSON value serializes"),
        Format::Pretty => pretty.to_string(),
    };
    text.push('\n');
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_are_usage_errors() {
        assert_eq!(run(["lifting", "sequences"]), EXIT_USAGE);
        assert_eq!(run(["lifting", "verify", "nonsense"]), EXIT_USAGE);
        assert_eq!(run(["lifting", "sequences", "--n", "0", "--l", "1"]), EXIT_USAGE);
        assert_eq!(run(["lifting", "build", "psi-n1", "--n", "1"]), EXIT_USAGE);
    }

    #[test]
    fn oracle_agrees() {
        let r = oracle(2, 1, 3, 3, 1).unwrap();
        assert!(r.pass);
        assert_eq!(r.trials.len(), 12);
    }
}
