//! Constructors for the cochains: `S`, `S_even`, `S̃`, `R`, `Ψ⁰`, the
//! interval and circle corrections, `Ψ_{n,1}` and `Ψ_{n,l}`.
//!
//! Correction words carry the weight `2^{-k}` for `k` Q-factors: the
//! evaluator sums over *all* label permutations, which visits every Q pair
//! in both orders, while the pair inside `Q_{ij}` is not meant to be
//! alternated. Halving per Q-factor counts each unordered pair once.

use crate::combinatorics::{
    bits_label, derivation_assignment, enumerate_a_even, enumerate_circles, enumerate_intervals,
    reduce, EvenSequence, MarkedCircle, MarkedInterval,
};
use crate::rational::{half_pow, sign_rat, Rational};

use super::{CochainDescriptor, CochainError, TermSlot, TermWord};

fn slots_from_bits(bits: &[u8]) -> Vec<TermSlot> {
    let j = derivation_assignment(bits);
    (1..=bits.len())
        .map(|i| match j.get(&i) {
            Some(&d) => TermSlot::deriv(i, d),
            None => TermSlot::plain(i),
        })
        .collect()
}

fn check_nl(n: usize, l: usize) -> Result<(), CochainError> {
    if n == 0 || l == 0 {
        return Err(CochainError::InvalidParameters(format!(
            "need n >= 1 and l >= 1, got n={n} l={l}"
        )));
    }
    Ok(())
}

fn marks_label(marks: &[usize]) -> String {
    let inner: Vec<String> = marks.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// The single alternated word of `a`: `D_{j(i)} A_i` where `a_i = 1`.
pub fn build_s(a: &EvenSequence) -> CochainDescriptor {
    let mut d = CochainDescriptor::new("s", a.len(), a.n())
        .with_param("n", a.n())
        .with_param("l", a.l());
    d.push(TermWord::unit(slots_from_bits(a.bits())), format!("a={}", a.label()));
    d
}

pub fn build_s_even(n: usize, l: usize) -> Result<CochainDescriptor, CochainError> {
    check_nl(n, l)?;
    let mut d = CochainDescriptor::new("s-even", n + 2 * l, n)
        .with_param("n", n)
        .with_param("l", l);
    for a in enumerate_a_even(n, l) {
        d.extend_scaled(&build_s(&a), &Rational::from_integer(1.into()));
    }
    Ok(d)
}

/// For each `j` with `a_j = 1`: the word of `S_a` with slot `j` plain, wrapped
/// in the derivation slot `j` carried.
pub fn build_s_tilde(a: &EvenSequence) -> CochainDescriptor {
    let base = slots_from_bits(a.bits());
    let mut d = CochainDescriptor::new("s-tilde", a.len(), a.n())
        .with_param("n", a.n())
        .with_param("l", a.l());
    for (pos, slot) in base.iter().enumerate() {
        if let TermSlot::Deriv { arg, d: label } = *slot {
            let mut slots = base.clone();
            slots[pos] = TermSlot::plain(arg);
            let mut w = TermWord::unit(slots);
            w.outer = Some(label);
            d.push(w, format!("a={} j={}", a.label(), pos + 1));
        }
    }
    d
}

pub fn build_s_tilde_sum(n: usize, l: usize) -> Result<CochainDescriptor, CochainError> {
    check_nl(n, l)?;
    let mut d = CochainDescriptor::new("s-tilde-sum", n + 2 * l, n)
        .with_param("n", n)
        .with_param("l", l);
    for a in enumerate_a_even(n, l) {
        d.extend_scaled(&build_s_tilde(&a), &Rational::from_integer(1.into()));
    }
    Ok(d)
}

/// `R_a`: the word of the reduced sequence of `a`.
pub fn build_r(a: &EvenSequence) -> CochainDescriptor {
    let r = reduce(a);
    let mut d = CochainDescriptor::new("r", r.len(), a.n())
        .with_param("n", a.n())
        .with_param("l", a.l());
    d.push(
        TermWord::unit(slots_from_bits(r.tilde_bits())),
        format!("a={} s1={} tilde={}", a.label(), r.s1(), r.label()),
    );
    d
}

pub fn build_psi0(n: usize, l: usize) -> Result<CochainDescriptor, CochainError> {
    check_nl(n, l)?;
    let mut d = CochainDescriptor::new("psi0", n + 2 * l - 1, n)
        .with_param("n", n)
        .with_param("l", l);
    for a in enumerate_a_even(n, l) {
        let s1 = reduce(&a).s1();
        d.extend_scaled(&build_r(&a), &sign_rat(if s1.is_multiple_of(2) { 1 } else { -1 }));
    }
    Ok(d)
}

/// `O(t)` on the interval: marked point `j` fuses slots `j, j+1` into
/// `A_j·Q_{j,j+1}` followed by plain `A_{j+1}`.
pub fn build_o_interval(t: &MarkedInterval) -> CochainDescriptor {
    let n = t.n();
    let mut slots = Vec::with_capacity(n + 1);
    let mut i = 1;
    while i <= n + 1 {
        if t.is_marked(i) {
            slots.push(TermSlot::qfused(i, i, i + 1));
            slots.push(TermSlot::plain(i + 1));
            i += 2;
        } else if i == n + 1 {
            slots.push(TermSlot::plain(i));
            i += 1;
        } else {
            slots.push(TermSlot::deriv(i, i));
            i += 1;
        }
    }
    let mut d = CochainDescriptor::new("o-interval", n + 1, n).with_param("n", n);
    d.push(
        TermWord::new(half_pow(t.marks().len()), slots),
        format!("marks={}", marks_label(t.marks())),
    );
    d
}

pub fn build_sigma_interval(n: usize, k: usize) -> CochainDescriptor {
    let mut d = CochainDescriptor::new("sigma-interval", n + 1, n)
        .with_param("n", n)
        .with_param("k", k);
    for t in enumerate_intervals(n, k) {
        d.extend_scaled(&build_o_interval(&t), &Rational::from_integer(1.into()));
    }
    d
}

/// Leading word `D_1A_1 ⋯ D_nA_n · A_{n+1}`.
pub fn build_leading_word(n: usize) -> CochainDescriptor {
    let mut slots: Vec<TermSlot> = (1..=n).map(|i| TermSlot::deriv(i, i)).collect();
    slots.push(TermSlot::plain(n + 1));
    let mut d = CochainDescriptor::new("leading", n + 1, n).with_param("n", n);
    d.push(TermWord::unit(slots), "leading");
    d
}

pub fn build_psi_n1(n: usize) -> Result<CochainDescriptor, CochainError> {
    if n < 2 {
        return Err(CochainError::InvalidParameters(format!(
            "psi-n1 needs n >= 2, got n={n}"
        )));
    }
    let one = Rational::from_integer(1.into());
    let mut d = CochainDescriptor::new("psi-n1", n + 1, n).with_param("n", n);
    d.extend_scaled(&build_leading_word(n), &one);
    for k in 1..=n / 2 {
        d.extend_scaled(&build_sigma_interval(n, k), &one);
    }
    Ok(d)
}

/// `O(t)` on the circle of a reduced sequence: marked point `i` becomes
/// `A_i·Q_{j(i), j(succ i)}` and its successor turns plain.
pub fn build_o_circle(c: &MarkedCircle) -> CochainDescriptor {
    let r = c.base();
    let tilde = r.tilde_bits();
    let j = derivation_assignment(tilde);
    let mut slots = slots_from_bits(tilde);
    for &i in c.marks() {
        let s = c.succ(i);
        slots[i - 1] = TermSlot::qfused(i, j[&i], j[&s]);
        slots[s - 1] = TermSlot::plain(s);
    }
    let n = r.source().n();
    let mut d = CochainDescriptor::new("o-circle", r.len(), n)
        .with_param("n", n)
        .with_param("l", r.source().l());
    d.push(
        TermWord::new(half_pow(c.marks().len()), slots),
        format!(
            "a={} tilde={} marks={}",
            r.source().label(),
            bits_label(tilde),
            marks_label(c.marks())
        ),
    );
    d
}

pub fn build_psi_nl(n: usize, l: usize) -> Result<CochainDescriptor, CochainError> {
    let mut d = build_psi0(n, l)?;
    d.meta.name = "psi-nl".into();
    for a in enumerate_a_even(n, l) {
        let r = reduce(&a);
        let sign = sign_rat(r.sign());
        for k in 1.. {
            let circles = enumerate_circles(&r, k);
            if circles.is_empty() {
                break;
            }
            for c in circles {
                d.extend_scaled(&build_o_circle(&c), &sign);
            }
        }
    }
    Ok(d)
}

/// The 1-cochain `Tr(A_1)`.
pub fn build_trace_cochain() -> CochainDescriptor {
    let mut d = CochainDescriptor::new("trace", 1, 0);
    d.push(TermWord::unit(vec![TermSlot::plain(1)]), "trace");
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{EvenSequence, MarkedInterval};
    use crate::rational::{int, rat};
    use TermSlot as T;

    fn seq(n: usize, l: usize, bits: &[u8]) -> EvenSequence {
        EvenSequence::new(n, l, bits.to_vec()).unwrap()
    }

    fn only_slots(d: &CochainDescriptor) -> Vec<TermSlot> {
        assert_eq!(d.words.len(), 1);
        d.words[0].slots.clone()
    }

    #[test]
    fn s_words() {
        assert_eq!(
            only_slots(&build_s(&seq(2, 1, &[1, 1, 0, 0]))),
            [T::deriv(1, 1), T::deriv(2, 2), T::plain(3), T::plain(4)]
        );
        assert_eq!(
            only_slots(&build_s(&seq(2, 1, &[1, 0, 0, 1]))),
            [T::deriv(1, 1), T::plain(2), T::plain(3), T::deriv(4, 2)]
        );
        assert_eq!(
            only_slots(&build_s(&seq(3, 1, &[1, 0, 0, 1, 1]))),
            [T::deriv(1, 1), T::plain(2), T::plain(3), T::deriv(4, 2), T::deriv(5, 3)]
        );
    }

    #[test]
    fn s_even_counts() {
        assert_eq!(build_s_even(2, 1).unwrap().words.len(), 2);
        assert_eq!(build_s_even(3, 1).unwrap().words.len(), 3);
        let d = build_s_even(1, 1).unwrap();
        assert_eq!(only_slots(&d), [T::deriv(1, 1), T::plain(2), T::plain(3)]);
        assert!(build_s_even(0, 1).is_err());
    }

    #[test]
    fn s_tilde_wraps_each_derivation() {
        let d = build_s_tilde(&seq(2, 1, &[1, 1, 0, 0]));
        assert_eq!(d.words.len(), 2);
        assert_eq!(d.words[0].outer, Some(1));
        assert_eq!(
            d.words[0].slots,
            [T::plain(1), T::deriv(2, 2), T::plain(3), T::plain(4)]
        );
        assert_eq!(d.words[1].outer, Some(2));
        d.validate().unwrap();
    }

    #[test]
    fn r_words() {
        assert_eq!(
            only_slots(&build_r(&seq(2, 1, &[1, 0, 0, 1]))),
            [T::deriv(1, 1), T::plain(2), T::deriv(3, 2)]
        );
        assert_eq!(
            only_slots(&build_r(&seq(2, 1, &[1, 1, 0, 0]))),
            [T::deriv(1, 1), T::deriv(2, 2), T::plain(3)]
        );
        assert_eq!(
            only_slots(&build_r(&seq(3, 1, &[1, 1, 1, 0, 0]))),
            [T::deriv(1, 1), T::deriv(2, 2), T::deriv(3, 3), T::plain(4)]
        );
    }

    #[test]
    fn psi0_signs() {
        let d = build_psi0(2, 1).unwrap();
        assert_eq!(d.words.len(), 2);
        // a = 1001 (s1 = 2) then 1100 (s1 = 3)
        assert_eq!(d.words[0].coeff, int(1));
        assert_eq!(d.words[0].slots, [T::deriv(1, 1), T::plain(2), T::deriv(3, 2)]);
        assert_eq!(d.words[1].coeff, int(-1));
        assert_eq!(d.words[1].slots, [T::deriv(1, 1), T::deriv(2, 2), T::plain(3)]);
        let d = build_psi0(1, 1).unwrap();
        assert_eq!(d.words[0].coeff, int(1));
        assert_eq!(d.words[0].slots, [T::deriv(1, 1), T::plain(2)]);
        let d = build_psi0(2, 2).unwrap();
        assert_eq!((d.words.len(), d.arity), (3, 5));
    }

    #[test]
    fn interval_words() {
        let t = MarkedInterval::new(6, vec![1, 3, 5]).unwrap();
        let d = build_o_interval(&t);
        assert_eq!(
            only_slots(&d),
            [
                T::qfused(1, 1, 2),
                T::plain(2),
                T::qfused(3, 3, 4),
                T::plain(4),
                T::qfused(5, 5, 6),
                T::plain(6),
                T::plain(7)
            ]
        );
        assert_eq!(d.words[0].coeff, rat(1, 8));
        let t = MarkedInterval::new(2, vec![1]).unwrap();
        assert_eq!(
            only_slots(&build_o_interval(&t)),
            [T::qfused(1, 1, 2), T::plain(2), T::plain(3)]
        );
        let t = MarkedInterval::new(4, vec![2]).unwrap();
        assert_eq!(
            only_slots(&build_o_interval(&t)),
            [T::deriv(1, 1), T::qfused(2, 2, 3), T::plain(3), T::deriv(4, 4), T::plain(5)]
        );
    }

    #[test]
    fn interval_sums_and_psi_n1_counts() {
        assert_eq!(build_sigma_interval(2, 1).words.len(), 1);
        assert_eq!(build_sigma_interval(4, 1).words.len(), 3);
        assert_eq!(build_sigma_interval(4, 2).words.len(), 1);
        let d = build_psi_n1(2).unwrap();
        assert_eq!(d.words.len(), 2);
        assert_eq!(d.words[0].slots, [T::deriv(1, 1), T::deriv(2, 2), T::plain(3)]);
        assert_eq!(d.words[1].slots, [T::qfused(1, 1, 2), T::plain(2), T::plain(3)]);
        assert_eq!(build_psi_n1(4).unwrap().words.len(), 5);
        assert_eq!(build_psi_n1(6).unwrap().words.len(), 13);
        assert!(build_psi_n1(1).is_err());
        for n in 2..=6 {
            build_psi_n1(n).unwrap().validate().unwrap();
        }
    }

    fn circle(n: usize, l: usize, bits: &[u8], marks: &[usize]) -> CochainDescriptor {
        let r = reduce(&seq(n, l, bits));
        let c = enumerate_circles(&r, marks.len())
            .into_iter()
            .find(|c| c.marks() == marks)
            .unwrap();
        build_o_circle(&c)
    }

    #[test]
    fn circle_words() {
        assert_eq!(
            only_slots(&circle(2, 1, &[1, 1, 0, 0], &[1])),
            [T::qfused(1, 1, 2), T::plain(2), T::plain(3)]
        );
        assert_eq!(
            only_slots(&circle(2, 1, &[1, 0, 0, 1], &[3])),
            [T::plain(1), T::plain(2), T::qfused(3, 2, 1)]
        );
        let s = only_slots(&circle(4, 2, &[1, 0, 0, 1, 1, 0, 0, 1], &[3]));
        assert_eq!(s[2], T::qfused(3, 2, 3));
        assert_eq!(s[3], T::plain(4));
        assert_eq!(s[0], T::deriv(1, 1));
        assert_eq!(s[6], T::deriv(7, 4));
    }

    #[test]
    fn psi_nl_counts() {
        let d = build_psi_nl(2, 1).unwrap();
        assert_eq!(d.words.len(), 4);
        assert_eq!(d.words.iter().filter(|w| w.q_count() > 0).count(), 2);
        assert_eq!(build_psi_nl(1, 1).unwrap().words.len(), 1);
        let d = build_psi_nl(2, 2).unwrap();
        // circle marks: 10001 has the wrap pair (5,1), 11000 has (1,2)
        let corrections = d.words.iter().filter(|w| w.q_count() > 0).count();
        assert_eq!(d.words.len() - corrections, 3);
        assert_eq!(corrections, 2);
        for (n, l) in [(2, 1), (3, 1), (2, 2), (4, 1), (3, 2)] {
            build_psi_nl(n, l).unwrap().validate().unwrap();
        }
    }
}
