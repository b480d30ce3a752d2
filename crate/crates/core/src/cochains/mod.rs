//! Symbolic cochain descriptors and their evaluation.
//!
//! A descriptor is a list of trace words; its value on a tuple of arguments
//! is the unnormalized double alternation over argument permutations and
//! derivation-label permutations of every word.

mod build;
mod eval;
pub mod inner;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::rational::Rational;

pub use build::*;
pub use eval::{evaluate, evaluate_naive, Cochain};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CochainError {
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("descriptor uses {descriptor} derivations but the context has {context}")]
    DerivationCount { descriptor: usize, context: usize },
    #[error("malformed word {word}: {reason}")]
    MalformedWord { word: usize, reason: String },
    #[error("inner expansion is defined only on words without Q-factors")]
    QFusedInInner,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One factor of a trace word. Indices are 1-based; `d`, `d2` are derivation
/// labels, permuted at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TermSlot {
    /// `A_arg`
    Plain { arg: usize },
    /// `D_d A_arg`
    Deriv { arg: usize, d: usize },
    /// `A_arg · Q_{d,d2}`
    #[serde(rename = "qfused")]
    QFused { arg: usize, d: usize, d2: usize },
}

impl TermSlot {
    pub fn arg(&self) -> usize {
        match *self {
            TermSlot::Plain { arg } | TermSlot::Deriv { arg, .. } | TermSlot::QFused { arg, .. } => {
                arg
            }
        }
    }

    pub fn labels(&self) -> Vec<usize> {
        match *self {
            TermSlot::Plain { .. } => vec![],
            TermSlot::Deriv { d, .. } => vec![d],
            TermSlot::QFused { d, d2, .. } => vec![d, d2],
        }
    }

    pub fn is_qfused(&self) -> bool {
        matches!(self, TermSlot::QFused { .. })
    }

    pub fn plain(arg: usize) -> Self {
        TermSlot::Plain { arg }
    }

    pub fn deriv(arg: usize, d: usize) -> Self {
        TermSlot::Deriv { arg, d }
    }

    pub fn qfused(arg: usize, d: usize, d2: usize) -> Self {
        TermSlot::QFused { arg, d, d2 }
    }
}

impl std::fmt::Display for TermSlot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            TermSlot::Plain { arg } => write!(f, "A{arg}"),
            TermSlot::Deriv { arg, d } => write!(f, "D{d}A{arg}"),
            TermSlot::QFused { arg, d, d2 } => write!(f, "A{arg}Q{d},{d2}"),
        }
    }
}

/// A single product inside the trace, optionally wrapped in one outer
/// derivation (`Tr(D_outer(...))`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWord {
    #[serde(with = "crate::rational::pair")]
    pub coeff: Rational,
    pub slots: Vec<TermSlot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<usize>,
}

impl TermWord {
    pub fn new(coeff: Rational, slots: Vec<TermSlot>) -> Self {
        Self {
            coeff,
            slots,
            outer: None,
        }
    }

    pub fn unit(slots: Vec<TermSlot>) -> Self {
        Self::new(Rational::one(), slots)
    }

    pub fn q_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_qfused()).count()
    }
}

impl std::fmt::Display for TermWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let body = self
            .slots
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("·");
        let c = crate::rational::display(&self.coeff);
        match self.outer {
            Some(d) => write!(f, "{c} Tr(D{d}({body}))"),
            None => write!(f, "{c} Tr({body})"),
        }
    }
}

/// Provenance labels. Never read by evaluation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DescriptorMeta {
    pub name: String,
    pub params: BTreeMap<String, usize>,
    /// One label per word: the sequence / interval / circle that produced it.
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainDescriptor {
    pub arity: usize,
    pub n: usize,
    pub words: Vec<TermWord>,
    pub meta: DescriptorMeta,
}

impl CochainDescriptor {
    pub fn new(name: &str, arity: usize, n: usize) -> Self {
        Self {
            arity,
            n,
            words: Vec::new(),
            meta: DescriptorMeta {
                name: name.to_string(),
                ..Default::default()
            },
        }
    }

    pub fn with_param(mut self, key: &str, value: usize) -> Self {
        self.meta.params.insert(key.to_string(), value);
        self
    }

    pub fn push(&mut self, word: TermWord, source: impl Into<String>) {
        self.words.push(word);
        self.meta.sources.push(source.into());
    }

    /// Appends all words of `other` (same arity and `n`), scaled by `c`.
    pub fn extend_scaled(&mut self, other: &CochainDescriptor, c: &Rational) {
        debug_assert_eq!((self.arity, self.n), (other.arity, other.n));
        for (w, src) in other.words.iter().zip(&other.meta.sources) {
            let mut w = w.clone();
            w.coeff = &w.coeff * c;
            if !w.coeff.is_zero() {
                self.push(w, src.clone());
            }
        }
    }

    /// Words carrying no Q-factor.
    pub fn without_corrections(&self) -> Self {
        let mut out = Self::new(&format!("{}-uncorrected", self.meta.name), self.arity, self.n);
        out.meta.params = self.meta.params.clone();
        for (w, src) in self.words.iter().zip(&self.meta.sources) {
            if w.q_count() == 0 {
                out.push(w.clone(), src.clone());
            }
        }
        out
    }

    pub fn has_qfused(&self) -> bool {
        self.words.iter().any(|w| w.q_count() > 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks that every word uses each argument exactly once and each
    /// derivation label at most once.
    pub fn validate(&self) -> Result<(), CochainError> {
        for (idx, w) in self.words.iter().enumerate() {
            let bad = |reason: String| CochainError::MalformedWord { word: idx, reason };
            if w.slots.len() != self.arity {
                return Err(bad(format!("{} slots for arity {}", w.slots.len(), self.arity)));
            }
            let mut seen_arg = vec![false; self.arity];
            let mut seen_label = vec![false; self.n];
            let labels = w.slots.iter().flat_map(TermSlot::labels).chain(w.outer);
            for s in &w.slots {
                let a = s.arg();
                if a == 0 || a > self.arity || std::mem::replace(&mut seen_arg[a - 1], true) {
                    return Err(bad(format!("argument {a} out of range or repeated")));
                }
            }
            for d in labels {
                if d == 0 || d > self.n || std::mem::replace(&mut seen_label[d - 1], true) {
                    return Err(bad(format!("derivation label {d} out of range or repeated")));
                }
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for CochainDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{} (arity {}, n {}, {} words)",
            self.meta.name,
            self.arity,
            self.n,
            self.words.len()
        )?;
        for (w, src) in self.words.iter().zip(&self.meta.sources) {
            writeln!(f, "  {w}    [{src}]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn slot_json_shape() {
        let w = TermWord::new(
            rat(1, 2),
            vec![TermSlot::qfused(1, 1, 2), TermSlot::plain(2), TermSlot::deriv(3, 3)],
        );
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(
            text,
            r#"{"coeff":[1,2],"slots":[{"kind":"qfused","arg":1,"d":1,"d2":2},{"kind":"plain","arg":2},{"kind":"deriv","arg":3,"d":3}]}"#
        );
        let back: TermWord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn validation_catches_repeats() {
        let mut d = CochainDescriptor::new("t", 2, 1);
        d.push(TermWord::unit(vec![TermSlot::plain(1), TermSlot::plain(1)]), "");
        assert!(d.validate().is_err());
        let mut d = CochainDescriptor::new("t", 2, 1);
        d.push(
            TermWord::unit(vec![TermSlot::deriv(1, 1), TermSlot::deriv(2, 1)]),
            "",
        );
        assert!(d.validate().is_err());
    }
}
