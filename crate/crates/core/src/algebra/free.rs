//! Free trace algebra over formal letters.
//!
//! Elements are noncommutative polynomials in [`Atom`]s. The trace of a word
//! is its [`CyclicWord`], the lexicographically least rotation, so
//! `Tr(ab) = Tr(ba)` holds structurally and a trace expression is zero iff
//! every cyclic word cancels.
//!
//! Atom order (used for canonical rotations): `Arg < FirstOrder <
//! SecondOrder < QAtom < Gen`, ties broken lexicographically on the indices.
//! All indices are 1-based.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{AlgebraError, RandomElements, TraceAlgebra, TraceValue};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// `A_i`
    Arg(u16),
    /// `D_d A_i` as `(d, i)`
    FirstOrder(u16, u16),
    /// `D_d D_e A_i` as `(d, e, i)` with `d <= e`
    SecondOrder(u16, u16, u16),
    /// `Q_{d,e}` with `d < e`
    QAtom(u16, u16),
    /// Standalone `D_d` (inner expansion)
    Gen(u16),
}

impl Atom {
    pub fn second_order(d: u16, e: u16, arg: u16) -> Self {
        Atom::SecondOrder(d.min(e), d.max(e), arg)
    }

    /// Canonical `Q_{d,e}` with its sign, or `None` when `d == e`.
    pub fn q(d: u16, e: u16) -> Option<(i8, Self)> {
        use std::cmp::Ordering::*;
        match d.cmp(&e) {
            Less => Some((1, Atom::QAtom(d, e))),
            Greater => Some((-1, Atom::QAtom(e, d))),
            Equal => None,
        }
    }

    /// Number of derivations applied to an argument atom.
    pub fn derivation_order(&self) -> usize {
        match self {
            Atom::Arg(_) => 0,
            Atom::FirstOrder(..) => 1,
            Atom::SecondOrder(..) => 2,
            Atom::QAtom(..) | Atom::Gen(_) => 0,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Arg(i) => write!(f, "A{i}"),
            Atom::FirstOrder(d, i) => write!(f, "D{d}A{i}"),
            Atom::SecondOrder(d, e, i) => write!(f, "D{d}D{e}A{i}"),
            Atom::QAtom(d, e) => write!(f, "Q{d}{e}"),
            Atom::Gen(d) => write!(f, "D{d}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(pub Vec<Atom>);

impl FreeWord {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Self(atoms)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(Atom::to_string).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// A word up to rotation, stored as its least rotation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Vec<Atom>);

impl CyclicWord {
    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tr({})", FreeWord(self.0.clone()))
    }
}

/// Start of the least rotation (Booth's algorithm).
fn least_rotation(s: &[Atom]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut fail = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j % n];
        let mut i = fail[j - k - 1];
        while i != usize::MAX && sj != s[(k + i + 1) % n] {
            if sj < s[(k + i + 1) % n] {
                k = j - i - 1;
            }
            i = fail[i];
        }
        if i == usize::MAX && sj != s[(k + i.wrapping_add(1)) % n] {
            if sj < s[k % n] {
                k = j;
            }
            fail[j - k] = usize::MAX;
        } else {
            fail[j - k] = i.wrapping_add(1);
        }
    }
    k % n
}

pub fn canonicalize_cyclic(w: &FreeWord) -> CyclicWord {
    let k = least_rotation(&w.0);
    let mut atoms = Vec::with_capacity(w.0.len());
    atoms.extend_from_slice(&w.0[k..]);
    atoms.extend_from_slice(&w.0[..k]);
    CyclicWord(atoms)
}

/// A formal trace expression: cyclic words with nonzero rational coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeTrace(BTreeMap<CyclicWord, Rational>);

impl FreeTrace {
    pub fn terms(&self) -> &BTreeMap<CyclicWord, Rational> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, w: CyclicWord, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = FreeTrace::default();
        out.add_scaled(self, c);
        out
    }

    pub fn get(&self, w: &CyclicWord) -> Rational {
        self.0.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// True if any word contains a `SecondOrder` atom.
    pub fn has_second_order(&self) -> bool {
        self.0
            .keys()
            .any(|w| w.0.iter().any(|a| matches!(a, Atom::SecondOrder(..))))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CyclicWord, &Rational)> {
        self.0.iter()
    }
}

impl TraceValue for FreeTrace {
    fn zero_value() -> Self {
        FreeTrace::default()
    }

    fn is_zero_value(&self) -> bool {
        self.0.is_empty()
    }

    fn add_scaled(&mut self, other: &Self, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        for (w, c) in &other.0 {
            self.add_term(w.clone(), &(c * coeff));
        }
    }
}

impl fmt::Display for FreeTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(w, c)| format!("{} {w}", rational::display(c)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sums coefficients of words equal up to rotation and drops zeros.
pub fn free_trace_combine<'a>(
    words: impl IntoIterator<Item = (&'a FreeWord, &'a Rational)>,
) -> FreeTrace {
    let mut out = FreeTrace::default();
    for (w, c) in words {
        out.add_term(canonicalize_cyclic(w), c);
    }
    out
}

/// Noncommutative polynomial in atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreePoly(BTreeMap<FreeWord, Rational>);

impl FreePoly {
    pub fn atom(a: Atom) -> Self {
        Self::word(FreeWord(vec![a]), Rational::one())
    }

    pub fn word(w: FreeWord, c: Rational) -> Self {
        let mut p = FreePoly::default();
        p.add_term(w, c);
        p
    }

    pub fn add_term(&mut self, w: FreeWord, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(w) {
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

    pub fn terms(&self) -> &BTreeMap<FreeWord, Rational> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(w, c)| format!("{} {w}", rational::display(c)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeDerivations {
    /// Derivations act letterwise by the Leibniz rule; `D_d D_e A_i` is
    /// recorded with an unordered pair, which encodes `[D_d, D_e] = 0`.
    Commuting,
    /// `D_d = ad Gen(d)`, `Q_{de} = [Gen(d), Gen(e)]`.
    Inner,
}

/// Free trace algebra on argument letters with `n` derivations.
#[derive(Debug, Clone)]
pub struct FreeContext {
    n: usize,
    mode: FreeDerivations,
    /// Argument letters used by [`RandomElements`].
    sample_args: u16,
}

impl FreeContext {
    pub fn new(n: usize, mode: FreeDerivations) -> Self {
        Self {
            n,
            mode,
            sample_args: 3,
        }
    }

    pub fn commuting(n: usize) -> Self {
        Self::new(n, FreeDerivations::Commuting)
    }

    pub fn inner(n: usize) -> Self {
        Self::new(n, FreeDerivations::Inner)
    }

    pub fn mode(&self) -> FreeDerivations {
        self.mode
    }

    /// Formal arguments `A_1, ..., A_m`.
    pub fn arguments(m: usize) -> Vec<FreePoly> {
        (1..=m).map(|i| FreePoly::atom(Atom::Arg(i as u16))).collect()
    }

    fn derive_atom(&self, d: u16, a: &Atom) -> Result<Atom, AlgebraError> {
        match *a {
            Atom::Arg(i) => Ok(Atom::FirstOrder(d, i)),
            Atom::FirstOrder(e, i) => Ok(Atom::second_order(d, e, i)),
            other => Err(AlgebraError::DerivationDepth(other.to_string())),
        }
    }
}

impl TraceAlgebra for FreeContext {
    type Elem = FreePoly;
    type Value = FreeTrace;

    fn derivation_count(&self) -> usize {
        self.n
    }

    fn zero(&self) -> FreePoly {
        FreePoly::default()
    }

    fn add(&self, a: &FreePoly, b: &FreePoly) -> FreePoly {
        let mut out = a.clone();
        for (w, c) in &b.0 {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    fn scale(&self, a: &FreePoly, c: &Rational) -> FreePoly {
        if c.is_zero() {
            return FreePoly::default();
        }
        FreePoly(a.0.iter().map(|(w, v)| (w.clone(), v * c)).collect())
    }

    fn mul(&self, a: &FreePoly, b: &FreePoly) -> FreePoly {
        let mut out = FreePoly::default();
        for (wa, ca) in &a.0 {
            for (wb, cb) in &b.0 {
                let mut atoms = wa.0.clone();
                atoms.extend_from_slice(&wb.0);
                out.add_term(FreeWord(atoms), ca * cb);
            }
        }
        out
    }

    fn is_zero_elem(&self, a: &FreePoly) -> bool {
        a.is_zero()
    }

    fn trace(&self, a: &FreePoly) -> Result<FreeTrace, AlgebraError> {
        Ok(free_trace_combine(a.0.iter()))
    }

    fn derive(&self, i: usize, a: &FreePoly) -> Result<FreePoly, AlgebraError> {
        if i >= self.n {
            return Err(AlgebraError::DerivationIndex {
                index: i + 1,
                count: self.n,
            });
        }
        let d = (i + 1) as u16;
        match self.mode {
            FreeDerivations::Commuting => {
                let mut out = FreePoly::default();
                for (w, c) in &a.0 {
                    for (pos, atom) in w.0.iter().enumerate() {
                        let mut atoms = w.0.clone();
                        atoms[pos] = self.derive_atom(d, atom)?;
                        out.add_term(FreeWord(atoms), c.clone());
                    }
                }
                Ok(out)
            }
            FreeDerivations::Inner => {
                let g = FreePoly::atom(Atom::Gen(d));
                Ok(self.bracket(&g, a))
            }
        }
    }

    fn q(&self, i: usize, j: usize) -> Option<FreePoly> {
        match self.mode {
            FreeDerivations::Commuting => None,
            FreeDerivations::Inner => {
                let gi = FreePoly::atom(Atom::Gen(i as u16 + 1));
                let gj = FreePoly::atom(Atom::Gen(j as u16 + 1));
                Some(self.bracket(&gi, &gj))
            }
        }
    }

    fn generator(&self, i: usize) -> Option<FreePoly> {
        match self.mode {
            FreeDerivations::Inner => Some(FreePoly::atom(Atom::Gen(i as u16 + 1))),
            FreeDerivations::Commuting => None,
        }
    }
}

impl RandomElements for FreeContext {
    /// A short random combination of words in the first few argument letters.
    fn random_element(&self, rng: &mut ChaCha8Rng) -> FreePoly {
        let mut p = FreePoly::default();
        for _ in 0..rng.gen_range(1..=3) {
            let len = rng.gen_range(1..=3);
            let atoms = (0..len)
                .map(|_| Atom::Arg(rng.gen_range(1..=self.sample_args)))
                .collect();
            p.add_term(FreeWord(atoms), rational::int(rng.gen_range(-3..=3)));
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arg(i: u16) -> Atom {
        Atom::Arg(i)
    }

    #[test]
    fn atom_order() {
        assert!(Atom::Arg(9) < Atom::FirstOrder(1, 1));
        assert!(Atom::FirstOrder(9, 9) < Atom::SecondOrder(1, 1, 1));
        assert!(Atom::SecondOrder(9, 9, 9) < Atom::QAtom(1, 2));
        assert!(Atom::QAtom(8, 9) < Atom::Gen(1));
        assert_eq!(Atom::second_order(3, 1, 2), Atom::SecondOrder(1, 3, 2));
        assert_eq!(Atom::q(2, 1), Some((-1, Atom::QAtom(1, 2))));
        assert_eq!(Atom::q(2, 2), None);
    }

    #[test]
    fn canonical_rotation() {
        let w = FreeWord::new(vec![arg(2), arg(1)]);
        assert_eq!(canonicalize_cyclic(&w).atoms(), &[arg(1), arg(2)]);
        let a = FreeWord::new(vec![Atom::FirstOrder(1, 1), arg(2)]);
        let b = FreeWord::new(vec![arg(2), Atom::FirstOrder(1, 1)]);
        assert_eq!(canonicalize_cyclic(&a), canonicalize_cyclic(&b));
        assert_eq!(canonicalize_cyclic(&FreeWord::default()), CyclicWord::default());
        let periodic = FreeWord::new(vec![arg(2), arg(1), arg(2), arg(1)]);
        assert_eq!(
            canonicalize_cyclic(&periodic).atoms(),
            &[arg(1), arg(2), arg(1), arg(2)]
        );
    }

    #[test]
    fn combine_cancels_rotations() {
        let w = FreeWord::new(vec![arg(1), arg(2), arg(3)]);
        let r = FreeWord::new(vec![arg(3), arg(1), arg(2)]);
        let one = Rational::one();
        let minus = -Rational::one();
        assert!(free_trace_combine([(&w, &one), (&r, &minus)]).is_empty());
        let half = rational::rat(1, 2);
        let t = free_trace_combine([(&w, &half), (&w, &half)]);
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(&canonicalize_cyclic(&w)), Rational::one());
    }

    #[test]
    fn leibniz_expansions_cancel() {
        let ctx = FreeContext::commuting(1);
        let a = FreeContext::arguments(2);
        // D(A1 A2) expanded directly vs D(A1) A2 + A1 D(A2)
        let direct = ctx.trace(&ctx.derive(0, &ctx.mul(&a[0], &a[1])).unwrap()).unwrap();
        let split = ctx.add(
            &ctx.mul(&ctx.derive(0, &a[0]).unwrap(), &a[1]),
            &ctx.mul(&a[0], &ctx.derive(0, &a[1]).unwrap()),
        );
        let mut total = direct;
        total.add_scaled(&ctx.trace(&split).unwrap(), &-Rational::one());
        assert!(total.is_empty());
    }

    #[test]
    fn second_order_is_symmetric_and_capped() {
        let ctx = FreeContext::commuting(2);
        let a = FreePoly::atom(arg(1));
        let d12 = ctx.derive(0, &ctx.derive(1, &a).unwrap()).unwrap();
        let d21 = ctx.derive(1, &ctx.derive(0, &a).unwrap()).unwrap();
        assert_eq!(d12, d21);
        assert!(matches!(
            ctx.derive(0, &d12),
            Err(AlgebraError::DerivationDepth(_))
        ));
    }

    #[test]
    fn inner_mode_uses_generators() {
        let ctx = FreeContext::inner(2);
        let a = FreePoly::atom(arg(1));
        let da = ctx.derive(0, &a).unwrap();
        assert_eq!(da.terms().len(), 2);
        let q = ctx.q(0, 1).unwrap();
        let lhs = ctx.sub(
            &ctx.derive(0, &ctx.derive(1, &a).unwrap()).unwrap(),
            &ctx.derive(1, &ctx.derive(0, &a).unwrap()).unwrap(),
        );
        assert_eq!(lhs, ctx.bracket(&q, &a));
    }

    fn atom_strategy() -> impl Strategy<Value = Atom> {
        prop_oneof![
            (1u16..4).prop_map(Atom::Arg),
            (1u16..3, 1u16..4).prop_map(|(d, i)| Atom::FirstOrder(d, i)),
            (1u16..3).prop_map(Atom::Gen),
        ]
    }

    proptest! {
        #[test]
        fn canonical_form_is_rotation_invariant(
            atoms in proptest::collection::vec(atom_strategy(), 0..9),
            shift in 0usize..9,
        ) {
            let w = FreeWord::new(atoms.clone());
            let c = canonicalize_cyclic(&w);
            let k = if atoms.is_empty() { 0 } else { shift % atoms.len() };
            let mut rotated = atoms[k..].to_vec();
            rotated.extend_from_slice(&atoms[..k]);
            prop_assert_eq!(&canonicalize_cyclic(&FreeWord::new(rotated)), &c);
            // idempotent
            prop_assert_eq!(&canonicalize_cyclic(&FreeWord::new(c.atoms().to_vec())), &c);
            // least among all rotations
            for r in 0..atoms.len() {
                let mut rot = atoms[r..].to_vec();
                rot.extend_from_slice(&atoms[..r]);
                prop_assert!(c.atoms() <= rot.as_slice());
            }
        }
    }
}
