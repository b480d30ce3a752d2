//! Evaluation of alternated trace words.
//!
//! The optimized evaluator walks each word left to right and keeps, for every
//! pair (set of argument values used, set of derivation values used), the
//! signed sum of all partial products. The parity of a full permutation is
//! the parity of the order in which its values were chosen times the parity
//! of the order in which the word visits its indices, so the sign of each
//! step is just the number of already-used values above the new one.
//! `evaluate_naive` expands every permutation pair explicitly and serves as
//! the oracle.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{AlgebraError, TraceAlgebra, TraceValue};
use crate::combinatorics::{permutation_sign, signed_permutations};
use crate::rational::Rational;

use super::inner::{InnerCochain, Letter};
use super::{CochainDescriptor, CochainError, TermSlot};

/// Anything that evaluates as an alternating cochain.
pub trait Cochain: Sync {
    fn arity(&self) -> usize;
    fn evaluate_in<C: TraceAlgebra>(
        &self,
        ctx: &C,
        args: &[C::Elem],
    ) -> Result<C::Value, CochainError>;
}

impl Cochain for CochainDescriptor {
    fn arity(&self) -> usize {
        self.arity
    }

    fn evaluate_in<C: TraceAlgebra>(
        &self,
        ctx: &C,
        args: &[C::Elem],
    ) -> Result<C::Value, CochainError> {
        evaluate(self, ctx, args)
    }
}

impl Cochain for InnerCochain {
    fn arity(&self) -> usize {
        self.arity
    }

    fn evaluate_in<C: TraceAlgebra>(
        &self,
        ctx: &C,
        args: &[C::Elem],
    ) -> Result<C::Value, CochainError> {
        check_shape(self.arity, self.n, ctx, args)?;
        let words: Vec<Flat> = self
            .words
            .iter()
            .map(|w| Flat {
                coeff: w.coeff.clone(),
                factors: w
                    .letters
                    .iter()
                    .map(|l| match *l {
                        Letter::Arg(a) => Factor::Arg(a - 1),
                        Letter::Gen(d) => Factor::Gen(d - 1),
                    })
                    .collect(),
                outer: None,
            })
            .collect();
        run_words(&words, self.n, ctx, args)
    }
}

/// 0-based factor of a flattened word.
#[derive(Debug, Clone, Copy)]
enum Factor {
    Arg(usize),
    Deriv(usize, usize),
    QFused(usize, usize, usize),
    Gen(usize),
}

struct Flat {
    coeff: Rational,
    factors: Vec<Factor>,
    outer: Option<usize>,
}

impl Flat {
    fn from_word(w: &super::TermWord) -> Self {
        Flat {
            coeff: w.coeff.clone(),
            factors: w
                .slots
                .iter()
                .map(|s| match *s {
                    TermSlot::Plain { arg } => Factor::Arg(arg - 1),
                    TermSlot::Deriv { arg, d } => Factor::Deriv(arg - 1, d - 1),
                    TermSlot::QFused { arg, d, d2 } => Factor::QFused(arg - 1, d - 1, d2 - 1),
                })
                .collect(),
            outer: w.outer.map(|d| d - 1),
        }
    }

    fn arg_order(&self) -> Vec<usize> {
        self.factors
            .iter()
            .filter_map(|f| match *f {
                Factor::Arg(a) | Factor::Deriv(a, _) | Factor::QFused(a, _, _) => Some(a),
                Factor::Gen(_) => None,
            })
            .collect()
    }

    fn label_order(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for f in &self.factors {
            match *f {
                Factor::Deriv(_, d) | Factor::Gen(d) => out.push(d),
                Factor::QFused(_, d, e) => out.extend([d, e]),
                Factor::Arg(_) => {}
            }
        }
        out.extend(self.outer);
        out
    }
}

fn check_shape<C: TraceAlgebra>(
    arity: usize,
    n: usize,
    ctx: &C,
    args: &[C::Elem],
) -> Result<(), CochainError> {
    if args.len() != arity {
        return Err(CochainError::ArityMismatch {
            expected: arity,
            got: args.len(),
        });
    }
    if n > ctx.derivation_count() {
        return Err(CochainError::DerivationCount {
            descriptor: n,
            context: ctx.derivation_count(),
        });
    }
    Ok(())
}

/// `Σ_{σ,τ} sign(σ)·sign(τ)·Σ_w c_w·Tr(w)`. Derivation labels `1..=d.n` are
/// mapped to the first `d.n` derivations of the context.
pub fn evaluate<C: TraceAlgebra>(
    d: &CochainDescriptor,
    ctx: &C,
    args: &[C::Elem],
) -> Result<C::Value, CochainError> {
    check_shape(d.arity, d.n, ctx, args)?;
    d.validate()?;
    let words: Vec<Flat> = d.words.iter().map(Flat::from_word).collect();
    run_words(&words, d.n, ctx, args)
}

/// Precomputed factor values for one argument tuple.
struct Tables<E> {
    derived: Vec<Vec<Option<E>>>,
    fused: HashMap<(usize, usize, usize), E>,
    gens: Vec<Option<E>>,
}

fn build_tables<C: TraceAlgebra>(
    words: &[Flat],
    n: usize,
    ctx: &C,
    args: &[C::Elem],
) -> Result<Tables<C::Elem>, CochainError> {
    let m = args.len();
    let needs_deriv = words
        .iter()
        .any(|w| w.factors.iter().any(|f| matches!(f, Factor::Deriv(..))));
    let needs_q = words
        .iter()
        .any(|w| w.factors.iter().any(|f| matches!(f, Factor::QFused(..))));
    let needs_gen = words
        .iter()
        .any(|w| w.factors.iter().any(|f| matches!(f, Factor::Gen(..))));

    let derived = if needs_deriv {
        (0..n)
            .map(|e| {
                (0..m)
                    .map(|u| ctx.derive(e, &args[u]).map(Some))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };

    let mut fused = HashMap::new();
    if needs_q {
        for e1 in 0..n {
            for e2 in 0..n {
                if e1 == e2 {
                    continue;
                }
                let q = ctx.q(e1, e2).ok_or(AlgebraError::MissingQ)?;
                for (u, a) in args.iter().enumerate() {
                    fused.insert((u, e1, e2), ctx.mul(a, &q));
                }
            }
        }
    }

    let gens = if needs_gen {
        (0..n)
            .map(|e| ctx.generator(e).map(Some).ok_or(AlgebraError::NotInner))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };

    Ok(Tables {
        derived,
        fused,
        gens,
    })
}

fn run_words<C: TraceAlgebra>(
    words: &[Flat],
    n: usize,
    ctx: &C,
    args: &[C::Elem],
) -> Result<C::Value, CochainError> {
    let tables = build_tables(words, n, ctx, args)?;
    let parts: Vec<C::Value> = words
        .par_iter()
        .map(|w| eval_word(w, n, ctx, args, &tables))
        .collect::<Result<_, _>>()?;
    let mut total = C::Value::zero_value();
    let one = Rational::one();
    for p in &parts {
        total.add_scaled(p, &one);
    }
    Ok(total)
}

/// `(-1)^{#{v ∈ used : v > x}}` as a bool (true = negative).
fn flips(used: u32, x: usize) -> bool {
    (used >> (x + 1)).count_ones() % 2 == 1
}

type State = (u32, u32);

fn eval_word<C: TraceAlgebra>(
    w: &Flat,
    n: usize,
    ctx: &C,
    args: &[C::Elem],
    t: &Tables<C::Elem>,
) -> Result<C::Value, CochainError> {
    let m = args.len();
    if w.coeff.is_zero() || w.factors.is_empty() {
        return Ok(C::Value::zero_value());
    }
    let labels = w.label_order();
    // every builder consumes each label exactly once; the walk relies on it
    if labels.len() != n {
        return Err(CochainError::MalformedWord {
            word: 0,
            reason: format!("word uses {} of {} derivation labels", labels.len(), n),
        });
    }
    let global_negative = permutation_sign(&w.arg_order()) * permutation_sign(&labels) < 0;

    let mut layer: HashMap<State, Option<C::Elem>> = HashMap::new();
    layer.insert((0, 0), None);

    let combine = |acc: &Option<C::Elem>, x: &C::Elem, negative: bool| -> C::Elem {
        let p = match acc {
            Some(a) => ctx.mul(a, x),
            None => x.clone(),
        };
        if negative {
            ctx.neg(&p)
        } else {
            p
        }
    };

    for f in &w.factors {
        let mut next: HashMap<State, Option<C::Elem>> = HashMap::new();
        let mut push = |key: State, value: C::Elem| {
            let slot = next.entry(key).or_insert(None);
            *slot = Some(match slot.take() {
                Some(prev) => ctx.add(&prev, &value),
                None => value,
            });
        };
        for (&(am, dm), acc) in &layer {
            let free_args = (0..m).filter(|u| am & (1 << u) == 0);
            match *f {
                Factor::Arg(_) => {
                    for u in free_args {
                        let x = combine(acc, &args[u], flips(am, u));
                        push((am | 1 << u, dm), x);
                    }
                }
                Factor::Deriv(..) => {
                    for u in free_args {
                        for e in (0..n).filter(|e| dm & (1 << e) == 0) {
                            let x = t.derived[e][u].as_ref().expect("derived table");
                            let neg = flips(am, u) ^ flips(dm, e);
                            push((am | 1 << u, dm | 1 << e), combine(acc, x, neg));
                        }
                    }
                }
                Factor::QFused(..) => {
                    for u in free_args {
                        for e1 in (0..n).filter(|e| dm & (1 << e) == 0) {
                            let dm1 = dm | 1 << e1;
                            for e2 in (0..n).filter(|e| dm1 & (1 << e) == 0) {
                                let x = &t.fused[&(u, e1, e2)];
                                let neg = flips(am, u) ^ flips(dm, e1) ^ flips(dm1, e2);
                                push((am | 1 << u, dm1 | 1 << e2), combine(acc, x, neg));
                            }
                        }
                    }
                }
                Factor::Gen(_) => {
                    for e in (0..n).filter(|e| dm & (1 << e) == 0) {
                        let x = t.gens[e].as_ref().expect("generator table");
                        push((am, dm | 1 << e), combine(acc, x, flips(dm, e)));
                    }
                }
            }
        }
        // drop exact cancellations early
        next.retain(|_, v| v.as_ref().is_some_and(|e| !ctx.is_zero_elem(e)));
        layer = next;
    }

    let mut total = C::Value::zero_value();
    for ((_, dm), acc) in layer {
        let Some(acc) = acc else { continue };
        let (value, negative) = match w.outer {
            Some(_) => {
                let e = (0..n)
                    .find(|e| dm & (1 << e) == 0)
                    .expect("one label left for the outer derivation");
                (ctx.trace(&ctx.derive(e, &acc)?)?, flips(dm, e))
            }
            None => (ctx.trace(&acc)?, false),
        };
        let sign = if negative ^ global_negative { -1 } else { 1 };
        total.add_scaled(&value, &(&w.coeff * Rational::from_integer(sign.into())));
    }
    Ok(total)
}

/// Oracle: explicit loops over every argument permutation and every label
/// permutation, recomputing each factor from scratch.
pub fn evaluate_naive<C: TraceAlgebra>(
    d: &CochainDescriptor,
    ctx: &C,
    args: &[C::Elem],
) -> Result<C::Value, CochainError> {
    check_shape(d.arity, d.n, ctx, args)?;
    let mut total = C::Value::zero_value();
    for w in &d.words {
        for sigma in signed_permutations(d.arity) {
            for tau in signed_permutations(d.n) {
                let mut product: Option<C::Elem> = None;
                for slot in &w.slots {
                    let a = &args[sigma.perm[slot.arg() - 1]];
                    let x = match *slot {
                        TermSlot::Plain { .. } => a.clone(),
                        TermSlot::Deriv { d, .. } => ctx.derive(tau.perm[d - 1], a)?,
                        TermSlot::QFused { d, d2, .. } => {
                            let q = ctx
                                .q(tau.perm[d - 1], tau.perm[d2 - 1])
                                .ok_or(AlgebraError::MissingQ)?;
                            ctx.mul(a, &q)
                        }
                    };
                    product = Some(match product {
                        Some(p) => ctx.mul(&p, &x),
                        None => x,
                    });
                }
                let Some(mut p) = product else { continue };
                if let Some(o) = w.outer {
                    p = ctx.derive(tau.perm[o - 1], &p)?;
                }
                let sign = i64::from(sigma.sign * tau.sign);
                let c = &w.coeff * Rational::from_integer(sign.into());
                total.add_scaled(&ctx.trace(&p)?, &c);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::{MatrixContext, RatMatrix};
    use crate::cochains::*;
    use crate::rational::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_args(dim: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<RatMatrix> {
        (0..m).map(|_| RatMatrix::random(dim, rng)).collect()
    }

    #[test]
    fn optimized_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut descriptors = vec![
            build_psi0(2, 1).unwrap(),
            build_psi_n1(2).unwrap(),
            build_psi_n1(3).unwrap(),
            build_psi_nl(2, 1).unwrap(),
            build_s_even(2, 1).unwrap(),
            build_s_tilde_sum(2, 1).unwrap(),
        ];
        descriptors.push(build_psi_nl(3, 1).unwrap());
        for d in &descriptors {
            let ctx = MatrixContext::random(3, d.n, &mut rng);
            let args = random_args(3, d.arity, &mut rng);
            let fast = evaluate(d, &ctx, &args).unwrap();
            let slow = evaluate_naive(d, &ctx, &args).unwrap();
            assert_eq!(fast, slow, "{}", d.meta.name);
        }
    }

    #[test]
    fn repeated_argument_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d = build_psi_n1(3).unwrap();
        let ctx = MatrixContext::random(3, 3, &mut rng);
        let mut args = random_args(3, 4, &mut rng);
        args[2] = args[0].clone();
        assert_eq!(evaluate(&d, &ctx, &args).unwrap(), int(0));
    }

    #[test]
    fn equal_derivations_give_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = RatMatrix::random(3, &mut rng);
        let ctx = MatrixContext::new(3, vec![g.clone(), g]).unwrap();
        let d = build_leading_word(2);
        let args = random_args(3, 3, &mut rng);
        assert_eq!(evaluate(&d, &ctx, &args).unwrap(), int(0));
    }

    #[test]
    fn arity_and_derivation_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ctx = MatrixContext::random(3, 2, &mut rng);
        let d = build_psi_n1(2).unwrap();
        let args = random_args(3, 2, &mut rng);
        assert!(matches!(
            evaluate(&d, &ctx, &args),
            Err(CochainError::ArityMismatch { expected: 3, got: 2 })
        ));
        let d = build_psi_n1(3).unwrap();
        let args = random_args(3, 4, &mut rng);
        assert!(matches!(
            evaluate(&d, &ctx, &args),
            Err(CochainError::DerivationCount { .. })
        ));
    }
}
