//! Randomized exact checks of the context axioms: trace property, trace
//! annihilation by derivations, Leibniz, `[D_i, D_j] = ad Q_ij`,
//! antisymmetry of `Q`, and the cyclic identity `Alt D_k(Q_ij) = 0`.

use std::time::Instant;

use serde_json::json;

use super::{trial_rng, RandomElements, TraceAlgebra, TraceValue};
use crate::report::{TrialOutcome, VerificationReport};

pub const AXIOMS: [&str; 6] = [
    "trace_of_bracket",
    "trace_of_derivation",
    "leibniz",
    "bracket_of_derivations",
    "q_antisymmetry",
    "cyclic_q_identity",
];

/// Per-axiom verdicts for one sample pair `(a, b)`.
fn check_sample<C: TraceAlgebra>(ctx: &C, a: &C::Elem, b: &C::Elem) -> [bool; 6] {
    let n = ctx.derivation_count();
    let trace_zero = |x: &C::Elem| ctx.trace(x).map(|t| t.is_zero_value()).unwrap_or(false);

    let trace_of_bracket = trace_zero(&ctx.bracket(a, b));

    let trace_of_derivation =
        (0..n).all(|i| ctx.derive(i, a).map(|d| trace_zero(&d)).unwrap_or(false));

    let leibniz = (0..n).all(|i| {
        let lhs = ctx.derive(i, &ctx.mul(a, b));
        let da = ctx.derive(i, a);
        let db = ctx.derive(i, b);
        match (lhs, da, db) {
            (Ok(lhs), Ok(da), Ok(db)) => {
                let rhs = ctx.add(&ctx.mul(&da, b), &ctx.mul(a, &db));
                ctx.is_zero_elem(&ctx.sub(&lhs, &rhs))
            }
            _ => false,
        }
    });

    let bracket_of_derivations = (0..n).all(|i| {
        (i + 1..n).all(|j| {
            let dij = ctx.derive(i, a).and_then(|x| ctx.derive(j, &x));
            let dji = ctx.derive(j, a).and_then(|x| ctx.derive(i, &x));
            match (dji, dij) {
                (Ok(dji), Ok(dij)) => {
                    // D_i D_j a - D_j D_i a
                    let lhs = ctx.sub(&dji, &dij);
                    let rhs = match ctx.q(i, j) {
                        Some(q) => ctx.bracket(&q, a),
                        None => ctx.zero(),
                    };
                    ctx.is_zero_elem(&ctx.sub(&lhs, &rhs))
                }
                _ => false,
            }
        })
    });

    let q_antisymmetry = (0..n).all(|i| {
        (0..n).all(|j| match (ctx.q(i, j), ctx.q(j, i)) {
            (Some(qij), Some(qji)) => ctx.is_zero_elem(&ctx.add(&qij, &qji)),
            (None, None) => true,
            _ => false,
        })
    });

    let cyclic_q_identity = (0..n).all(|i| {
        (i + 1..n).all(|j| {
            (j + 1..n).all(|k| {
                let term = |p: usize, q: usize, r: usize| {
                    ctx.q(p, q)
                        .map(|qpq| ctx.derive(r, &qpq))
                        .unwrap_or_else(|| Ok(ctx.zero()))
                };
                match (term(i, j, k), term(j, k, i), term(k, i, j)) {
                    (Ok(x), Ok(y), Ok(z)) => ctx.is_zero_elem(&ctx.add(&ctx.add(&x, &y), &z)),
                    _ => false,
                }
            })
        })
    });

    [
        trace_of_bracket,
        trace_of_derivation,
        leibniz,
        bracket_of_derivations,
        q_antisymmetry,
        cyclic_q_identity,
    ]
}

/// Samples `trials` random pairs and checks every axiom exactly. Failures are
/// recorded in the report, never raised.
pub fn check_axioms<C: RandomElements>(ctx: &C, trials: usize, seed: u64) -> VerificationReport {
    let started = Instant::now();
    let mut report = VerificationReport::new("axioms")
        .param("n", ctx.derivation_count())
        .param("trials", trials)
        .param("seed", seed);
    let mut tally = [true; 6];
    for t in 0..trials as u64 {
        let mut rng = trial_rng(seed, t);
        let a = ctx.random_element(&mut rng);
        let b = ctx.random_element(&mut rng);
        let verdicts = check_sample(ctx, &a, &b);
        for (slot, ok) in tally.iter_mut().zip(verdicts) {
            *slot &= ok;
        }
        report
            .trials
            .push(TrialOutcome::flag(t, verdicts.iter().all(|&ok| ok)));
    }
    let breakdown: serde_json::Map<String, serde_json::Value> = AXIOMS
        .iter()
        .zip(tally)
        .map(|(name, ok)| (name.to_string(), json!(ok)))
        .collect();
    report.note("axioms", serde_json::Value::Object(breakdown));
    report.terms_evaluated = trials as u64 * AXIOMS.len() as u64;
    report.finish(started)
}
