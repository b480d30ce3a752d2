//! Inner expansion: every `D_d A_i` becomes `G_d·A_i − A_i·G_d`, leaving
//! words over argument letters and standalone generator letters.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

use super::{CochainDescriptor, CochainError, TermSlot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    Arg(usize),
    Gen(usize),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Arg(i) => write!(f, "A{i}"),
            Letter::Gen(d) => write!(f, "D{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedWord {
    #[serde(with = "crate::rational::pair")]
    pub coeff: Rational,
    pub letters: Vec<Letter>,
}

impl ExpandedWord {
    /// True when two generator letters sit next to each other, reading the
    /// word cyclically.
    pub fn has_adjacent_generators(&self) -> bool {
        let len = self.letters.len();
        len > 1
            && (0..len).any(|i| {
                matches!(self.letters[i], Letter::Gen(_))
                    && matches!(self.letters[(i + 1) % len], Letter::Gen(_))
            })
    }
}

impl fmt::Display for ExpandedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        write!(
            f,
            "{} Tr({})",
            crate::rational::display(&self.coeff),
            body.join("·")
        )
    }
}

/// Alternating cochain given by expanded words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerCochain {
    pub arity: usize,
    pub n: usize,
    pub words: Vec<ExpandedWord>,
}

impl InnerCochain {
    pub fn from_descriptor(d: &CochainDescriptor) -> Result<Self, CochainError> {
        Ok(Self {
            arity: d.arity,
            n: d.n,
            words: expand_inner(d)?,
        })
    }

    /// Splits into (no adjacent generators, some adjacent generators).
    pub fn split(&self) -> (InnerCochain, InnerCochain) {
        let (tilde, r) = split_adjacency(self.words.clone());
        let wrap = |words| InnerCochain {
            arity: self.arity,
            n: self.n,
            words,
        };
        (wrap(tilde), wrap(r))
    }
}

pub fn expand_inner(d: &CochainDescriptor) -> Result<Vec<ExpandedWord>, CochainError> {
    let mut out = Vec::new();
    for w in &d.words {
        if w.outer.is_some() || w.slots.iter().any(TermSlot::is_qfused) {
            return Err(CochainError::QFusedInInner);
        }
        let mut partial = vec![ExpandedWord {
            coeff: w.coeff.clone(),
            letters: Vec::new(),
        }];
        for slot in &w.slots {
            partial = match *slot {
                TermSlot::Plain { arg } => partial
                    .into_iter()
                    .map(|mut e| {
                        e.letters.push(Letter::Arg(arg));
                        e
                    })
                    .collect(),
                TermSlot::Deriv { arg, d } => partial
                    .into_iter()
                    .flat_map(|e| {
                        let mut before = e.clone();
                        before.letters.extend([Letter::Gen(d), Letter::Arg(arg)]);
                        let mut after = e;
                        after.letters.extend([Letter::Arg(arg), Letter::Gen(d)]);
                        after.coeff = -after.coeff;
                        [before, after]
                    })
                    .collect(),
                TermSlot::QFused { .. } => unreachable!(),
            };
        }
        out.extend(partial.into_iter().filter(|e| !e.coeff.is_zero()));
    }
    Ok(out)
}

/// Partitions into words with no cyclically adjacent generators and the rest.
pub fn split_adjacency(words: Vec<ExpandedWord>) -> (Vec<ExpandedWord>, Vec<ExpandedWord>) {
    words.into_iter().partition(|w| !w.has_adjacent_generators())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochains::{build_leading_word, TermWord};
    use crate::rational::int;
    use Letter::{Arg, Gen};

    fn word(slots: Vec<TermSlot>) -> CochainDescriptor {
        let mut d = CochainDescriptor::new("t", slots.len(), 2);
        d.push(TermWord::unit(slots), "");
        d
    }

    #[test]
    fn single_substitution() {
        let mut d = CochainDescriptor::new("t", 2, 1);
        d.push(
            TermWord::unit(vec![TermSlot::deriv(1, 1), TermSlot::plain(2)]),
            "",
        );
        let e = expand_inner(&d).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].coeff.clone(), e[0].letters.clone()), (int(1), vec![Gen(1), Arg(1), Arg(2)]));
        assert_eq!((e[1].coeff.clone(), e[1].letters.clone()), (int(-1), vec![Arg(1), Gen(1), Arg(2)]));
    }

    #[test]
    fn two_derivations_give_four_words() {
        let e = expand_inner(&build_leading_word(2)).unwrap();
        assert_eq!(e.len(), 4);
        let (tilde, r) = split_adjacency(e);
        assert_eq!(tilde.len(), 3);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].letters, vec![Arg(1), Gen(1), Gen(2), Arg(2), Arg(3)]);
        assert_eq!(r[0].coeff, int(-1));
    }

    #[test]
    fn adjacency_is_cyclic() {
        let w = |letters: Vec<Letter>| ExpandedWord {
            coeff: int(1),
            letters,
        };
        assert!(!w(vec![Gen(1), Arg(1), Gen(2), Arg(2)]).has_adjacent_generators());
        assert!(w(vec![Arg(1), Gen(1), Gen(2), Arg(2)]).has_adjacent_generators());
        assert!(w(vec![Gen(1), Arg(1), Arg(2), Gen(2)]).has_adjacent_generators());
    }

    #[test]
    fn q_factors_are_rejected() {
        let d = word(vec![TermSlot::qfused(1, 1, 2), TermSlot::plain(2)]);
        assert_eq!(expand_inner(&d), Err(CochainError::QFusedInInner));
    }

    #[test]
    fn word_count_doubles_per_derivation() {
        for n in 1..=4 {
            let e = expand_inner(&build_leading_word(n)).unwrap();
            assert_eq!(e.len(), 1 << n);
        }
    }
}
