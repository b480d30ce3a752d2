//! Associative algebras with a trace and a family of derivations.
//!
//! A [`TraceAlgebra`] is the environment every cochain is evaluated in. Three
//! backends implement it: [`matrix::MatrixContext`] (rational matrices with
//! inner derivations), [`free::FreeContext`] (formal words with a structural
//! cyclic trace) and [`crate::psido::PsidoContext`] (truncated
//! pseudodifferential symbols with the residue trace).
//!
//! Derivation indices on the trait are 0-based: `derive(0, a)` is `D_1 a`.

pub mod axioms;
pub mod free;
pub mod matrix;

use std::fmt::Debug;

use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("generator {index} is {rows}x{cols}, expected {expected}x{expected}")]
    DimensionMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("derivation cannot be applied to atom {0}")]
    DerivationDepth(String),
    #[error("context has no Q matrix")]
    MissingQ,
    #[error("context derivations are not inner")]
    NotInner,
    #[error("derivation index {index} out of range for {count} derivations")]
    DerivationIndex { index: usize, count: usize },
    #[error("invalid document: {0}")]
    Document(String),
}

/// Value of the trace: a rational number, or a formal combination of cyclic
/// words for the free backend.
pub trait TraceValue: Clone + Debug + PartialEq + Send + Sync {
    fn zero_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn add_scaled(&mut self, other: &Self, coeff: &Rational);
}

impl TraceValue for Rational {
    fn zero_value() -> Self {
        Zero::zero()
    }

    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_scaled(&mut self, other: &Self, coeff: &Rational) {
        *self += other * coeff;
    }
}

pub trait TraceAlgebra: Sync {
    type Elem: Clone + Debug + Send + Sync;
    type Value: TraceValue;

    fn derivation_count(&self) -> usize;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: &Rational) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero_elem(&self, a: &Self::Elem) -> bool;

    fn trace(&self, a: &Self::Elem) -> Result<Self::Value, AlgebraError>;

    /// `D_{i+1}(a)`.
    fn derive(&self, i: usize, a: &Self::Elem) -> Result<Self::Elem, AlgebraError>;

    /// `Q_{i+1, j+1}`, or `None` when the context carries no Q.
    fn q(&self, i: usize, j: usize) -> Option<Self::Elem>;

    /// The element `G_{i+1}` with `D_{i+1} = ad G_{i+1}`, for inner contexts.
    fn generator(&self, _i: usize) -> Option<Self::Elem> {
        None
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.scale(a, &-Rational::from_integer(1.into()))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(&self.mul(a, b), &self.mul(b, a))
    }
}

/// Seeded sampling of random elements, used by the randomized verifiers.
pub trait RandomElements: TraceAlgebra {
    fn random_element(&self, rng: &mut ChaCha8Rng) -> Self::Elem;

    fn random_elements(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<Self::Elem> {
        (0..count).map(|_| self.random_element(rng)).collect()
    }
}

/// Independent, reproducible stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial))
}

/// Storage for an antisymmetric family `Q_{ij}` keeping only `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperTriangle<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T> UpperTriangle<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        // rows 0..i contribute (n-1) + (n-2) + ... + (n-i) entries
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Entry for `i < j`; `None` on the diagonal. The caller negates for `i > j`.
    pub fn get(&self, i: usize, j: usize) -> Option<(&T, bool)> {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => Some((&self.entries[self.slot(i, j)], false)),
            Greater => Some((&self.entries[self.slot(j, i)], true)),
            Equal => None,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        assert!(i < j, "set expects i < j");
        let k = self.slot(i, j);
        self.entries[k] = value;
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_triangle_indexing() {
        let t = UpperTriangle::from_fn(4, |i, j| 10 * i + j);
        assert_eq!(t.get(0, 1), Some((&1, false)));
        assert_eq!(t.get(2, 3), Some((&23, false)));
        assert_eq!(t.get(3, 1), Some((&13, true)));
        assert_eq!(t.get(2, 2), None);
    }
}
