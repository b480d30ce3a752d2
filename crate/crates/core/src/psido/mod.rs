//! Truncated symbols of formal pseudodifferential operators on `(S¹)ⁿ`.
//!
//! A symbol is a finite sum `Σ c · x^a ∂^b` (normal ordered: every `∂` to the
//! right) together with a validity window `v` and an order bound `o`:
//! coefficients at `b` with `b_i ≥ v_i` for all `i` are exact, everything
//! below may be missing, and no term of the true operator has `b_i > o_i`.
//! Operations propagate both, so a reported coefficient is never an
//! approximation.

mod context;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::AlgebraError;
use crate::rational::{self, Rational};

pub use context::{bracket_series_check, make_psido_context, t_series, PsidoContext};
pub use text::ParseError;

/// Exponents of `x^a ∂^b`, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub x: Vec<i32>,
    pub d: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    vars: usize,
    terms: BTreeMap<Monomial, Rational>,
    window: Vec<i32>,
    order: Vec<i32>,
}

fn falling(p: i32, k: u32) -> BigInt {
    (0..k as i32).fold(BigInt::one(), |acc, j| acc * BigInt::from(p - j))
}

/// `C(b, k)` for any integer `b`.
fn binomial(b: i32, k: u32) -> Rational {
    Rational::new(falling(b, k), rational::factorial(k))
}

impl Symbol {
    /// Builds a symbol from terms; terms outside the window are dropped and
    /// the order bound is the larger of the top term and `window - 1`.
    pub fn from_terms(
        vars: usize,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
        window: Vec<i32>,
    ) -> Self {
        assert_eq!(window.len(), vars, "window has one entry per variable");
        let mut s = Symbol {
            vars,
            terms: BTreeMap::new(),
            order: window.iter().map(|v| v - 1).collect(),
            window,
        };
        for (m, c) in terms {
            assert_eq!((m.x.len(), m.d.len()), (vars, vars));
            for i in 0..vars {
                s.order[i] = s.order[i].max(m.d[i]);
            }
            s.add_term(m, c);
        }
        s
    }

    pub fn zero(vars: usize, window: Vec<i32>) -> Self {
        Self::from_terms(vars, [], window)
    }

    /// `c · x^a ∂^b` in one variable.
    pub fn single(c: Rational, a: i32, b: i32, window: i32) -> Self {
        Self::from_terms(1, [(Monomial { x: vec![a], d: vec![b] }, c)], vec![window])
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn window(&self) -> &[i32] {
        &self.window
    }

    pub fn order(&self) -> &[i32] {
        &self.order
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    /// Raises the declared order bound (never lowers it).
    pub fn with_order(mut self, order: Vec<i32>) -> Self {
        for (o, n) in self.order.iter_mut().zip(order) {
            *o = (*o).max(n);
        }
        self
    }

    fn in_window(&self, m: &Monomial) -> bool {
        m.d.iter().zip(&self.window).all(|(b, v)| b >= v)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || !self.in_window(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Exact coefficient, or `None` when the monomial lies outside the window.
    pub fn coefficient(&self, x: &[i32], d: &[i32]) -> Option<Rational> {
        let m = Monomial {
            x: x.to_vec(),
            d: d.to_vec(),
        };
        self.in_window(&m)
            .then(|| self.terms.get(&m).cloned().unwrap_or_else(Rational::zero))
    }

    /// All known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Symbol) -> Symbol {
        let window = max_vec(&self.window, &other.window);
        let order = max_vec(&self.order, &other.order);
        let mut out = Symbol {
            vars: self.vars,
            terms: BTreeMap::new(),
            window,
            order,
        };
        for (m, c) in self.terms.iter().chain(&other.terms) {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Symbol {
        let mut out = Symbol {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        }
        out
    }

    pub fn neg(&self) -> Symbol {
        self.scale(&-Rational::one())
    }

    /// Normal-ordered product: per variable,
    /// `x^a ∂^b · x^c ∂^d = Σ_k C(b,k)·c(c−1)⋯(c−k+1) · x^{a+c−k} ∂^{b+d−k}`.
    pub fn compose(&self, other: &Symbol) -> Symbol {
        assert_eq!(self.vars, other.vars, "symbols over different variable counts");
        let n = self.vars;
        let window: Vec<i32> = (0..n)
            .map(|i| (self.window[i] + other.order[i]).max(other.window[i] + self.order[i]))
            .collect();
        let order: Vec<i32> = (0..n).map(|i| self.order[i] + other.order[i]).collect();
        let mut out = Symbol {
            vars: n,
            terms: BTreeMap::new(),
            window,
            order,
        };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                // per-variable expansion options (k, factor)
                let mut options: Vec<Vec<(i32, Rational)>> = Vec::with_capacity(n);
                for i in 0..n {
                    let (b, c) = (ma.d[i], mb.x[i]);
                    let top = b + mb.d[i];
                    let mut opts = Vec::new();
                    let mut k = 0u32;
                    while top - k as i32 >= out.window[i] {
                        if (b >= 0 && k as i32 > b) || (c >= 0 && k as i32 > c) {
                            break;
                        }
                        let f = binomial(b, k) * Rational::from_integer(falling(c, k));
                        if !f.is_zero() {
                            opts.push((k as i32, f));
                        }
                        k += 1;
                    }
                    options.push(opts);
                }
                let base = ca * cb;
                let mut stack: Vec<(usize, Vec<i32>, Rational)> = vec![(0, Vec::new(), base)];
                while let Some((i, ks, coeff)) = stack.pop() {
                    if i == n {
                        let m = Monomial {
                            x: (0..n).map(|v| ma.x[v] + mb.x[v] - ks[v]).collect(),
                            d: (0..n).map(|v| ma.d[v] + mb.d[v] - ks[v]).collect(),
                        };
                        out.add_term(m, coeff);
                        continue;
                    }
                    for (k, f) in &options[i] {
                        let mut next = ks.clone();
                        next.push(*k);
                        stack.push((i + 1, next, &coeff * f));
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, other: &Symbol) -> Symbol {
        self.compose(other).add(&other.compose(self).neg())
    }

    /// Coefficient of `x₁⁻¹⋯x_n⁻¹ ∂₁⁻¹⋯∂_n⁻¹`.
    pub fn residue(&self) -> Result<Rational, AlgebraError> {
        let minus = vec![-1; self.vars];
        self.coefficient(&minus, &minus).ok_or_else(|| {
            AlgebraError::InsufficientPrecision(format!(
                "window {:?} does not reach the residue monomial",
                self.window
            ))
        })
    }

    /// True when both symbols agree on every monomial exact in both and with
    /// `b_i >= floor_i`.
    pub fn agrees_on(&self, other: &Symbol, floor: &[i32]) -> bool {
        let w: Vec<i32> = (0..self.vars)
            .map(|i| self.window[i].max(other.window[i]).max(floor[i]))
            .collect();
        let inside = |m: &Monomial| m.d.iter().zip(&w).all(|(b, v)| b >= v);
        let diff = self.add(&other.neg());
        diff.terms.keys().all(|m| !inside(m))
    }

    pub fn apply_log_derivation(&self, tag: LogDerivationTag) -> Symbol {
        tag.apply(self)
    }
}

fn max_vec(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogKind {
    /// `ad(ln x_i)`
    LnX,
    /// `ad(ln ∂_i)`
    LnPartial,
}

/// One of the outer derivations `ad(ln x_i)`, `ad(ln ∂_i)`; `var` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LogDerivationTag {
    pub kind: LogKind,
    pub var: usize,
}

impl LogDerivationTag {
    pub fn ln_x(var: usize) -> Self {
        Self {
            kind: LogKind::LnX,
            var,
        }
    }

    pub fn ln_partial(var: usize) -> Self {
        Self {
            kind: LogKind::LnPartial,
            var,
        }
    }

    /// Termwise on `c·x^p ∂^q`, in variable `i`, summing over `k ≥ 1`:
    ///
    /// `ad(ln ∂)`: `((−1)^{k−1}/k) · p(p−1)⋯(p−k+1) · x^{p−k} ∂^{q−k}`
    /// `ad(ln x)`: `((−1)^k/k) · q(q−1)⋯(q−k+1) · x^{p−k} ∂^{q−k}`
    ///
    /// These are the expansions of `[ln ∂, ·]` and `[ln x, ·]`. The window is
    /// kept and the order drops by one in variable `i`.
    pub fn apply(&self, a: &Symbol) -> Symbol {
        let i = self.var;
        let mut order = a.order.clone();
        order[i] -= 1;
        let mut out = Symbol {
            vars: a.vars,
            terms: BTreeMap::new(),
            window: a.window.clone(),
            order,
        };
        for (m, c) in &a.terms {
            let (p, q) = (m.x[i], m.d[i]);
            let driver = match self.kind {
                LogKind::LnPartial => p,
                LogKind::LnX => q,
            };
            let mut k = 1u32;
            while q - k as i32 >= a.window[i] {
                if driver >= 0 && k as i32 > driver {
                    break;
                }
                let sign = match self.kind {
                    LogKind::LnPartial if k.is_multiple_of(2) => -1,
                    LogKind::LnX if k % 2 == 1 => -1,
                    _ => 1,
                };
                let f = Rational::new(BigInt::from(sign) * falling(driver, k), BigInt::from(k));
                let mut next = m.clone();
                next.x[i] -= k as i32;
                next.d[i] -= k as i32;
                out.add_term(next, c * f);
                k += 1;
            }
        }
        out
    }
}

impl fmt::Display for LogDerivationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LogKind::LnX => write!(f, "ad(ln x{})", self.var + 1),
            LogKind::LnPartial => write!(f, "ad(ln d{})", self.var + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    const W: i32 = -12;

    fn sym(text: &str) -> Symbol {
        Symbol::parse(text, &[W]).unwrap()
    }

    #[test]
    fn d_times_x() {
        assert_eq!(sym("1 x^0 d^1").compose(&sym("1 x^1 d^0")).terms(), sym("1 x^1 d^1 + 1 x^0 d^0").terms());
    }

    #[test]
    fn inverse_d_times_x() {
        let p = sym("1 x^0 d^-1").compose(&sym("1 x^1 d^0"));
        assert_eq!(p.terms(), sym("1 x^1 d^-1 + -1 x^0 d^-2").terms());
    }

    #[test]
    fn x_d_squared() {
        let a = sym("1 x^1 d^1");
        assert_eq!(a.compose(&a).terms(), sym("1 x^2 d^2 + 1 x^1 d^1").terms());
    }

    #[test]
    fn residues() {
        assert_eq!(sym("1 x^-1 d^-1").residue().unwrap(), int(1));
        assert_eq!(sym("1 x^2 d^3").residue().unwrap(), int(0));
        let p = sym("1 x^0 d^-1").compose(&sym("1 x^-1 d^0"));
        assert_eq!(p.residue().unwrap(), int(1));
        let shallow = Symbol::single(int(1), 0, 1, 0);
        assert!(matches!(shallow.residue(), Err(AlgebraError::InsufficientPrecision(_))));
    }

    #[test]
    fn log_derivations_on_generators() {
        let x = sym("1 x^1 d^0");
        let d = sym("1 x^0 d^1");
        let lnd = LogDerivationTag::ln_partial(0);
        let lnx = LogDerivationTag::ln_x(0);
        assert_eq!(lnd.apply(&x).terms(), sym("1 x^0 d^-1").terms());
        assert!(lnd.apply(&sym("5 x^0 d^0")).is_zero());
        assert_eq!(lnx.apply(&d).terms(), sym("-1 x^-1 d^0").terms());
    }

    #[test]
    fn window_reports_missing_coefficients() {
        let a = Symbol::single(int(1), 0, -1, -3);
        assert_eq!(a.coefficient(&[0], &[-1]), Some(int(1)));
        assert_eq!(a.coefficient(&[0], &[-4]), None);
        // ∂⁻¹·x⁻¹ is an infinite series; only the window is reported
        let p = a.compose(&Symbol::single(int(1), -1, 0, -3));
        assert_eq!(p.window(), &[-3]);
        assert_eq!(p.coefficient(&[-2], &[-2]), Some(int(1)));
        assert_eq!(p.coefficient(&[-4], &[-4]), None);
    }

    #[test]
    fn two_variable_composition_is_variablewise() {
        let w = [W, W];
        let a = Symbol::parse("1 x1^0 d1^1 x2^0 d2^0", &w).unwrap();
        let b = Symbol::parse("1 x1^0 d1^0 x2^1 d2^0", &w).unwrap();
        assert!(a.bracket(&b).is_zero());
        let c = Symbol::parse("1 x1^1 d1^0 x2^0 d2^0", &w).unwrap();
        let br = a.bracket(&c);
        assert_eq!(br.terms(), Symbol::parse("1 x1^0 d1^0 x2^0 d2^0", &w).unwrap().terms());
        assert_eq!(rat(1, 2) * int(2), int(1));
    }

    fn arb_symbol() -> impl Strategy<Value = Symbol> {
        prop::collection::vec(((-2i32..=2), (-2i32..=1), (-3i64..=3)), 1..4).prop_map(|ts| {
            Symbol::from_terms(
                1,
                ts.into_iter()
                    .map(|(a, b, c)| (Monomial { x: vec![a], d: vec![b] }, int(c))),
                vec![W],
            )
            .with_order(vec![1])
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn residue_of_commutator_vanishes(a in arb_symbol(), b in arb_symbol()) {
            prop_assert_eq!(a.compose(&b).residue().unwrap(), b.compose(&a).residue().unwrap());
        }

        #[test]
        fn composition_is_associative(a in arb_symbol(), b in arb_symbol(), c in arb_symbol()) {
            let left = a.compose(&b).compose(&c);
            let right = a.compose(&b.compose(&c));
            prop_assert!(left.agrees_on(&right, &[W]));
            prop_assert!(left.window()[0] <= -1);
        }

        #[test]
        fn log_derivations_are_derivations(a in arb_symbol(), b in arb_symbol(), which in 0..2usize) {
            let t = if which == 0 { LogDerivationTag::ln_x(0) } else { LogDerivationTag::ln_partial(0) };
            let lhs = t.apply(&a.compose(&b));
            let rhs = t.apply(&a).compose(&b).add(&a.compose(&t.apply(&b)));
            prop_assert!(lhs.agrees_on(&rhs, &[W]));
            prop_assert_eq!(t.apply(&a).residue().unwrap(), int(0));
        }
    }
}
