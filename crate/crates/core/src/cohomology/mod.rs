//! Chevalley–Eilenberg differential and the randomized exact verifiers.
//!
//! Convention: `(dψ)(A_1..A_{k+1}) = Σ_{i<j} (-1)^{i+j} ψ([A_i,A_j], A_1..Â_i..Â_j..A_{k+1})`.

pub mod symbolic;

use std::time::Instant;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::axioms::check_axioms;
use crate::algebra::{trial_rng, RandomElements, TraceAlgebra, TraceValue};
use crate::cochains::inner::InnerCochain;
use crate::cochains::{
    build_psi0, build_psi_n1, build_psi_nl, build_r, build_s, build_s_even, evaluate, Cochain,
    CochainDescriptor, CochainError,
};
use crate::combinatorics::{enumerate_a_even, reduce};
use crate::rational::{self, Rational};
use crate::report::{TrialOutcome, VerificationReport};

pub fn ce_differential<K, C>(cochain: &K, ctx: &C, args: &[C::Elem]) -> Result<C::Value, CochainError>
where
    K: Cochain + ?Sized,
    C: TraceAlgebra,
{
    let m = args.len();
    if m != cochain.arity() + 1 {
        return Err(CochainError::ArityMismatch {
            expected: cochain.arity() + 1,
            got: m,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let parts: Vec<(bool, C::Value)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut sub = Vec::with_capacity(m - 1);
            sub.push(ctx.bracket(&args[i], &args[j]));
            sub.extend(
                args.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i && *k != j)
                    .map(|(_, a)| a.clone()),
            );
            // 0-based i + j has the parity of the 1-based sum
            Ok(((i + j) % 2 == 1, cochain.evaluate_in(ctx, &sub)?))
        })
        .collect::<Result<_, CochainError>>()?;
    let mut total = C::Value::zero_value();
    let (plus, minus) = (Rational::one(), -Rational::one());
    for (negative, v) in &parts {
        total.add_scaled(v, if *negative { &minus } else { &plus });
    }
    Ok(total)
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Products summed by one evaluation of `d` (words × arity! × n!).
pub fn products_per_evaluation(d: &CochainDescriptor) -> u64 {
    d.words.len() as u64 * factorial(d.arity) * factorial(d.n)
}

fn products_per_differential(d: &CochainDescriptor) -> u64 {
    let m = d.arity as u64 + 1;
    products_per_evaluation(d) * m * (m - 1) / 2
}

fn per_trial<T, F>(trials: usize, f: F) -> Result<Vec<T>, CochainError>
where
    T: Send,
    F: Fn(u64) -> Result<T, CochainError> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(f).collect()
}

/// Asserts `dψ = 0` exactly on `trials` seeded random tuples.
pub fn verify_cocycle<C>(
    check: &str,
    d: &CochainDescriptor,
    ctx: &C,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    let started = Instant::now();
    let mut report = VerificationReport::new(check)
        .param("arity", d.arity)
        .param("n", d.n)
        .param("trials", trials)
        .param("seed", seed)
        .param("words", d.words.len());
    report.trials = per_trial(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let args = ctx.random_elements(d.arity + 1, &mut rng);
        Ok(TrialOutcome::exact(t, ce_differential(d, ctx, &args)?))
    })?;
    report.terms_evaluated = products_per_differential(d) * trials as u64;
    Ok(report.finish(started))
}

/// Counts trials where `dψ ≠ 0` (used for the negative controls).
fn nonzero_trials<C>(d: &CochainDescriptor, ctx: &C, trials: usize, seed: u64) -> Result<usize, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    Ok(verify_cocycle("control", d, ctx, trials, seed)?.failures())
}

/// Trials on which the cochain itself is nonzero; a cocycle check is only
/// informative when this is positive.
fn value_nonzero_trials<C>(d: &CochainDescriptor, ctx: &C, trials: usize, seed: u64) -> Result<usize, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    let outcomes = per_trial(trials, |t| {
        let mut rng = trial_rng(seed ^ 0x5EED, t);
        let args = ctx.random_elements(d.arity, &mut rng);
        Ok(TrialOutcome::exact(t, evaluate(d, ctx, &args)?))
    })?;
    Ok(outcomes.iter().filter(|t| !t.zero).count())
}

fn commuting<C: TraceAlgebra>(ctx: &C) -> bool {
    let n = ctx.derivation_count();
    (0..n).all(|i| (i + 1..n).all(|j| ctx.q(i, j).is_none_or(|q| ctx.is_zero_elem(&q))))
}

/// `Ψ⁰_{n,l}` is a cocycle when the derivations commute.
pub fn verify_thm11<C>(n: usize, l: usize, ctx: &C, trials: usize, seed: u64) -> Result<VerificationReport, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    let d = build_psi0(n, l)?;
    let mut r = verify_cocycle("thm11", &d, ctx, trials, seed)?.param("l", l);
    r.note("commuting_context", commuting(ctx));
    Ok(r)
}

/// `Ψ_{n,1}` (interval corrections) is a cocycle for arbitrary derivations.
/// Also records the control without corrections and the ratio against the
/// circle-corrected `Ψ_{n,l}` at `l = 1`.
pub fn verify_thm21<C>(n: usize, ctx: &C, trials: usize, seed: u64) -> Result<VerificationReport, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    let d = build_psi_n1(n)?;
    let mut r = verify_cocycle("thm21", &d, ctx, trials, seed)?;
    let control = nonzero_trials(&d.without_corrections(), ctx, trials, seed)?;
    r.note("uncorrected_nonzero_trials", control);
    r.note("cochain_nonzero_trials", value_nonzero_trials(&d, ctx, trials, seed)?);
    let circle = build_psi_nl(n, 1)?;
    let ratios: Vec<Value> = (0..trials.min(5) as u64)
        .map(|t| {
            let mut rng = trial_rng(seed ^ 0x5EED, t);
            let args = ctx.random_elements(d.arity, &mut rng);
            let a = evaluate(&d, ctx, &args)?;
            let b = evaluate(&circle, ctx, &args)?;
            Ok(if a.is_zero() {
                Value::Null
            } else {
                json!(rational::display(&(b / a)))
            })
        })
        .collect::<Result<_, CochainError>>()?;
    r.note("ratio_circle_over_interval", ratios);
    Ok(r)
}

/// `Ψ_{n,l}` (circle corrections) is a cocycle for arbitrary derivations.
pub fn verify_thm23<C>(n: usize, l: usize, ctx: &C, trials: usize, seed: u64) -> Result<VerificationReport, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    let d = build_psi_nl(n, l)?;
    let mut r = verify_cocycle("thm23", &d, ctx, trials, seed)?.param("l", l);
    let control = nonzero_trials(&d.without_corrections(), ctx, trials, seed)?;
    r.note("uncorrected_nonzero_trials", control);
    r.note("cochain_nonzero_trials", value_nonzero_trials(&d, ctx, trials, seed)?);
    Ok(r)
}

/// `S_even ≡ 0` for commuting derivations. The evaluation runs regardless of
/// the precondition so it doubles as a negative control; the report is marked
/// inapplicable (and fails) when the derivations do not commute.
pub fn verify_lemma_1_1<C>(n: usize, l: usize, ctx: &C, trials: usize, seed: u64) -> Result<VerificationReport, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    let started = Instant::now();
    let axioms = check_axioms(ctx, 3, seed);
    let applicable = axioms.pass && commuting(ctx);
    let d = build_s_even(n, l)?;
    let mut report = VerificationReport::new("lemma11")
        .param("n", n)
        .param("l", l)
        .param("trials", trials)
        .param("seed", seed);
    report.trials = per_trial(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let args = ctx.random_elements(d.arity, &mut rng);
        Ok(TrialOutcome::exact(t, evaluate(&d, ctx, &args)?))
    })?;
    report.terms_evaluated = products_per_evaluation(&d) * trials as u64;
    report.note("status", if applicable { "applicable" } else { "inapplicable" });
    let mut report = report.finish(started);
    report.pass &= applicable;
    Ok(report)
}

/// `d(R_a)(A_m, A_1..A_{m-1}) = ±S_a(A_1..A_m)` for every `a` in `a_even(n,l)`.
/// The sign is read off the data (first trial with `S_a ≠ 0`) and compared
/// with the stated `(-1)^{n+2l-s1+1}`; every trial is then checked exactly
/// against the observed sign.
pub fn verify_lemma_1_2<C>(n: usize, l: usize, ctx: &C, trials: usize, seed: u64) -> Result<VerificationReport, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    let started = Instant::now();
    let m = n + 2 * l;
    let mut report = VerificationReport::new("lemma12")
        .param("n", n)
        .param("l", l)
        .param("trials", trials)
        .param("seed", seed);
    let mut sequences = Vec::new();
    let mut all_match = true;
    for (idx, a) in enumerate_a_even(n, l).into_iter().enumerate() {
        let r_desc = build_r(&a);
        let s_desc = build_s(&a);
        let s1 = reduce(&a).s1();
        let stated: i64 = if (m - s1 + 1).is_multiple_of(2) { 1 } else { -1 };
        let pairs = per_trial(trials, |t| {
            let mut rng = trial_rng(seed.wrapping_add(idx as u64 * 7919), t);
            let args = ctx.random_elements(m, &mut rng);
            let mut rotated = vec![args[m - 1].clone()];
            rotated.extend_from_slice(&args[..m - 1]);
            Ok((ce_differential(&r_desc, ctx, &rotated)?, evaluate(&s_desc, ctx, &args)?))
        })?;
        let observed = pairs
            .iter()
            .find(|(_, s)| !s.is_zero())
            .map(|(dr, s)| dr / s);
        let sign = match &observed {
            Some(c) if *c == Rational::one() => Some(1i64),
            Some(c) if *c == -Rational::one() => Some(-1),
            _ => None,
        };
        let c = Rational::from_integer(sign.unwrap_or(stated).into());
        for (t, (dr, s)) in pairs.into_iter().enumerate() {
            let offset = (idx * trials + t) as u64;
            report.trials.push(TrialOutcome::exact(offset, dr - &c * s));
        }
        if let Some(found) = sign {
            all_match &= found == stated;
        }
        sequences.push(json!({
            "a": a.label(),
            "s1": s1,
            "stated_sign": stated,
            "observed_sign": sign,
            "observed_ratio": observed.as_ref().map(rational::display),
            "nonvacuous": observed.is_some(),
        }));
        report.terms_evaluated +=
            (products_per_differential(&r_desc) + products_per_evaluation(&s_desc)) * trials as u64;
    }
    report.note("sequences", sequences);
    report.note("stated_sign_matches", all_match);
    Ok(report.finish(started))
}

/// Inner expansion of `Ψ⁰_{n,l}` split into the part without adjacent
/// generators (`Ψ̃`) and the rest (`r`). Checks `dΨ̃ = 0` and
/// `dΨ̃ + d r = dΨ⁰` exactly.
pub fn verify_key_lemma<C>(n: usize, l: usize, ctx: &C, trials: usize, seed: u64) -> Result<VerificationReport, CochainError>
where
    C: RandomElements<Value = Rational>,
{
    let started = Instant::now();
    let psi = build_psi0(n, l)?;
    let inner = InnerCochain::from_descriptor(&psi)?;
    let (tilde, rest) = inner.split();
    let mut report = VerificationReport::new("key-lemma")
        .param("n", n)
        .param("l", l)
        .param("trials", trials)
        .param("seed", seed);
    let outcomes = per_trial(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let args = ctx.random_elements(psi.arity + 1, &mut rng);
        let dt = ce_differential(&tilde, ctx, &args)?;
        let dr = ce_differential(&rest, ctx, &args)?;
        let df = ce_differential(&psi, ctx, &args)?;
        let decomposition = &dt + &dr - &df;
        Ok((t, dt, decomposition))
    })?;
    let mut decomposition_ok = true;
    for (t, dt, dec) in outcomes {
        decomposition_ok &= dec.is_zero();
        let residual = if dt.is_zero() { dec } else { dt };
        report.trials.push(TrialOutcome::exact(t, residual));
    }
    report.note("tilde_words", tilde.words.len());
    report.note("r_words", rest.words.len());
    report.note("decomposition_exact", decomposition_ok);
    let m = psi.arity as u64 + 1;
    report.terms_evaluated = inner.words.len() as u64
        * factorial(psi.arity)
        * factorial(n)
        * (m * (m - 1) / 2)
        * trials as u64;
    Ok(report.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::{MatrixContext, RatMatrix};
    use crate::cochains::build_trace_cochain;
    use crate::rational::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trace_is_a_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ctx = MatrixContext::random(3, 1, &mut rng);
        let d = build_trace_cochain();
        let args = ctx.random_elements(2, &mut rng);
        assert_eq!(ce_differential(&d, &ctx, &args).unwrap(), int(0));
        let r = verify_cocycle("trace", &d, &ctx, 5, 1).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn repeated_arguments_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ctx = MatrixContext::random(3, 2, &mut rng);
        let d = build_psi0(2, 1).unwrap();
        let mut args = ctx.random_elements(4, &mut rng);
        args[3] = args[1].clone();
        assert_eq!(ce_differential(&d, &ctx, &args).unwrap(), int(0));
    }

    #[test]
    fn arity_is_checked() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = MatrixContext::random(3, 2, &mut rng);
        let d = build_psi0(2, 1).unwrap();
        let args = ctx.random_elements(3, &mut rng);
        assert!(ce_differential(&d, &ctx, &args).is_err());
    }

    #[test]
    fn theorem_11_on_commuting_context() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ctx = MatrixContext::random_commuting(3, 2, &mut rng);
        let r = verify_thm11(2, 1, &ctx, 5, 9).unwrap();
        assert!(r.pass, "{}", r.to_json());
    }

    #[test]
    fn psi0_needs_corrections_without_commutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ctx = MatrixContext::random(3, 2, &mut rng);
        let r = verify_cocycle("control", &build_psi0(2, 1).unwrap(), &ctx, 5, 1).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn theorem_21_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ctx = MatrixContext::random(3, 2, &mut rng);
        let r = verify_thm21(2, &ctx, 5, 2).unwrap();
        assert!(r.pass, "{}", r.to_json());
        assert!(r.notes["uncorrected_nonzero_trials"].as_u64().unwrap() > 0);
    }

    #[test]
    fn theorem_23_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ctx = MatrixContext::random(3, 2, &mut rng);
        let r = verify_thm23(2, 1, &ctx, 5, 3).unwrap();
        assert!(r.pass, "{}", r.to_json());
    }

    #[test]
    fn lemma_11_diagonal_and_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ctx = MatrixContext::random_diagonal(3, 2, &mut rng);
        assert!(verify_lemma_1_1(2, 1, &ctx, 5, 1).unwrap().pass);
        let ctx = MatrixContext::random(3, 2, &mut rng);
        let r = verify_lemma_1_1(2, 1, &ctx, 5, 1).unwrap();
        assert!(!r.pass);
        assert_eq!(r.notes["status"], json!("inapplicable"));
        assert!(r.failures() > 0);
    }

    #[test]
    fn lemma_12_sign_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = MatrixContext::random_commuting(4, 2, &mut rng);
        let r = verify_lemma_1_2(2, 2, &ctx, 3, 1).unwrap();
        assert!(r.pass, "{}", r.to_json());
    }

    #[test]
    fn key_lemma_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let ctx = MatrixContext::random(3, 2, &mut rng);
        let r = verify_key_lemma(2, 1, &ctx, 3, 1).unwrap();
        assert!(r.pass, "{}", r.to_json());
        assert_eq!(r.notes["decomposition_exact"], json!(true));
    }

    #[test]
    fn unit_generator_context() {
        let ctx =
            MatrixContext::new(2, vec![RatMatrix::unit(2, 1, 2), RatMatrix::unit(2, 2, 1)]).unwrap();
        assert!(verify_thm21(2, &ctx, 3, 1).unwrap().pass);
    }
}
