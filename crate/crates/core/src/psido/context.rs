//! `ΨDif_n` as a trace algebra: the residue trace and the `2n` outer
//! derivations `ad(ln x_1), …, ad(ln x_n), ad(ln ∂_1), …, ad(ln ∂_n)`.
//!
//! These derivations do not commute: `[ad ln x_v, ad ln ∂_v] = −ad T_v` with
//! `T = [ln ∂, ln x] = Σ_{m≥1} ((m−1)!/m) x^{−m} ∂^{−m}`, so `Q_{v, n+v} = −T_v`.

use std::time::Instant;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::algebra::{trial_rng, AlgebraError, RandomElements, TraceAlgebra};
use crate::rational::{self, Rational};
use crate::report::{TrialOutcome, VerificationReport};

use super::{LogDerivationTag, Monomial, Symbol};

#[derive(Debug, Clone)]
pub struct PsidoContext {
    vars: usize,
    window: Vec<i32>,
    /// `T_v` truncated exactly at the context window.
    t: Vec<Symbol>,
}

/// `T_v = Σ_{m=1}^{terms} ((m−1)!/m) x_v^{−m} ∂_v^{−m}`, exact down to
/// `∂_v^{−terms}`.
pub fn t_series(vars: usize, v: usize, terms: u32, window: &[i32]) -> Symbol {
    let mut window = window.to_vec();
    window[v] = window[v].max(-(terms as i32));
    let mut order = vec![0; vars];
    order[v] = -1;
    let monomials = (1..=terms).map(|m| {
        let mut mono = Monomial {
            x: vec![0; vars],
            d: vec![0; vars],
        };
        mono.x[v] = -(m as i32);
        mono.d[v] = -(m as i32);
        let c = Rational::new(rational::factorial(m - 1), BigInt::from(m));
        (mono, c)
    });
    Symbol::from_terms(vars, monomials, window).with_order(order)
}

pub fn make_psido_context(vars: usize, window: Vec<i32>) -> Result<PsidoContext, AlgebraError> {
    if vars == 0 {
        return Err(AlgebraError::NoGenerators);
    }
    if window.len() != vars || window.iter().any(|w| *w > -1) {
        return Err(AlgebraError::InsufficientPrecision(format!(
            "window {window:?} must give {vars} entries, each at most -1"
        )));
    }
    let t = (0..vars)
        .map(|v| t_series(vars, v, (-window[v]) as u32, &window))
        .collect();
    Ok(PsidoContext { vars, window, t })
}

impl PsidoContext {
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn window(&self) -> &[i32] {
        &self.window
    }

    pub fn tag(&self, i: usize) -> LogDerivationTag {
        if i < self.vars {
            LogDerivationTag::ln_x(i)
        } else {
            LogDerivationTag::ln_partial(i - self.vars)
        }
    }

    pub fn parse(&self, text: &str) -> Result<Symbol, super::ParseError> {
        Symbol::parse(text, &self.window)
    }
}

impl TraceAlgebra for PsidoContext {
    type Elem = Symbol;
    type Value = Rational;

    fn derivation_count(&self) -> usize {
        2 * self.vars
    }

    fn zero(&self) -> Symbol {
        Symbol::zero(self.vars, self.window.clone())
    }

    fn add(&self, a: &Symbol, b: &Symbol) -> Symbol {
        a.add(b)
    }

    fn scale(&self, a: &Symbol, c: &Rational) -> Symbol {
        a.scale(c)
    }

    fn mul(&self, a: &Symbol, b: &Symbol) -> Symbol {
        a.compose(b)
    }

    fn is_zero_elem(&self, a: &Symbol) -> bool {
        a.is_zero()
    }

    fn trace(&self, a: &Symbol) -> Result<Rational, AlgebraError> {
        a.residue()
    }

    fn derive(&self, i: usize, a: &Symbol) -> Result<Symbol, AlgebraError> {
        if i >= self.derivation_count() {
            return Err(AlgebraError::DerivationIndex {
                index: i,
                count: self.derivation_count(),
            });
        }
        Ok(self.tag(i).apply(a))
    }

    fn q(&self, i: usize, j: usize) -> Option<Symbol> {
        let n = self.vars;
        Some(if i < n && j == i + n {
            self.t[i].neg()
        } else if j < n && i == j + n {
            self.t[j].clone()
        } else {
            self.zero()
        })
    }
}

impl RandomElements for PsidoContext {
    /// Two to five terms `c x^a ∂^b` with `|c| ≤ 3`, `a ∈ [−2, 2]`,
    /// `b ∈ [−2, 1]` in each variable; the order bound is declared as 1.
    fn random_element(&self, rng: &mut ChaCha8Rng) -> Symbol {
        let count = rng.gen_range(2..=5);
        let terms: Vec<(Monomial, Rational)> = (0..count)
            .map(|_| {
                let mono = Monomial {
                    x: (0..self.vars).map(|_| rng.gen_range(-2..=2)).collect(),
                    d: (0..self.vars).map(|_| rng.gen_range(-2..=1)).collect(),
                };
                let mut c = 0i64;
                while c == 0 {
                    c = rng.gen_range(-3..=3);
                }
                (mono, rational::int(c))
            })
            .collect();
        Symbol::from_terms(self.vars, terms, self.window.clone()).with_order(vec![1; self.vars])
    }
}

/// Recovers the coefficients of `T` from the derivations alone and checks
/// `[ad ln ∂, ad ln x] = ad T` on random symbols.
///
/// The coefficients come from `L(x) = ad(ln ∂)(ad(ln x)(x)) − ad(ln x)(ad(ln ∂)(x))`:
/// since `[x^{−m}∂^{−m}, x] = −m·x^{−m}∂^{−m−1}`, the coefficient of
/// `x^{−m}∂^{−m−1}` in `L(x)` is `−m·c_m`. They must equal `(m−1)!/m`.
pub fn bracket_series_check(
    cutoff: u32,
    window: Option<i32>,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, AlgebraError> {
    let started = Instant::now();
    let c = cutoff as i32;
    let w = window.unwrap_or(-(c + 8));
    if cutoff == 0 || w > -(c + 3) {
        return Err(AlgebraError::InsufficientPrecision(format!(
            "cutoff {cutoff} needs a window of at most {}",
            -(c + 3)
        )));
    }
    let lnx = LogDerivationTag::ln_x(0);
    let lnd = LogDerivationTag::ln_partial(0);
    let l = |a: &Symbol| lnd.apply(&lnx.apply(a)).add(&lnx.apply(&lnd.apply(a)).neg());

    let mut report = VerificationReport::new("bracket-series")
        .param("cutoff", cutoff)
        .param("window", w)
        .param("trials", trials)
        .param("seed", seed);

    let lx = l(&Symbol::single(rational::int(1), 1, 0, w));
    let mut found = Vec::new();
    let mut expected = Vec::new();
    let mut coefficients_ok = true;
    for m in 1..=c {
        let coeff = lx
            .coefficient(&[-m], &[-m - 1])
            .ok_or_else(|| AlgebraError::InsufficientPrecision(format!("x^-{m} d^-{} outside window", m + 1)))?;
        let cm = -coeff / rational::int(m as i64);
        let want = Rational::new(rational::factorial(m as u32 - 1), BigInt::from(m));
        coefficients_ok &= cm == want;
        found.push(json!(rational::display(&cm)));
        expected.push(json!(rational::display(&want)));
    }
    report.trials.push(TrialOutcome::flag(0, coefficients_ok));
    report.note("coefficients", found);
    report.note("expected", expected);

    // T exact down to ∂^{−cutoff−1}, so [T, a] is exact down to o_a − cutoff − 1
    let t = t_series(1, 0, cutoff + 1, &[w]);
    let ctx = make_psido_context(1, vec![w])?;
    let mut compared = 0usize;
    for trial in 1..=trials as u64 {
        let mut rng = trial_rng(seed, trial);
        let a = ctx.random_element(&mut rng);
        let floor = a.order()[0] - c - 1;
        let lhs = l(&a);
        let rhs = t.bracket(&a);
        compared += lhs
            .terms()
            .keys()
            .chain(rhs.terms().keys())
            .filter(|m| m.d[0] >= floor)
            .count();
        report.trials.push(TrialOutcome::flag(trial, lhs.agrees_on(&rhs, &[floor])));
    }
    report.terms_evaluated = compared as u64;
    Ok(report.finish(started))
}
