//! Index sets of the cochain sums: even-gap sequences and their reductions,
//! marked intervals, marked circles, and signed permutations.
//!
//! Positions are 1-based throughout, matching the way the sums are written.
//! All enumerations are lexicographic.

use std::collections::BTreeMap;

use serde::Serialize;

/// A `{0,1}` sequence of length `n + 2l` with leading 1, `n` ones, and every
/// cyclic run of zeros of even length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EvenSequence {
    n: usize,
    l: usize,
    bits: Vec<u8>,
}

impl EvenSequence {
    /// Validates and wraps `bits`.
    pub fn new(n: usize, l: usize, bits: Vec<u8>) -> Option<Self> {
        is_even_sequence(n, l, &bits).then_some(Self { n, l, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bits as a compact string, e.g. `"1001"`.
    pub fn label(&self) -> String {
        bits_label(&self.bits)
    }
}

pub fn bits_label(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

/// Lengths of the maximal zero runs read cyclically.
fn cyclic_zero_runs(bits: &[u8]) -> Vec<usize> {
    let m = bits.len();
    let ones: Vec<usize> = (0..m).filter(|&i| bits[i] == 1).collect();
    match ones.len() {
        0 => vec![m],
        k => (0..k)
            .map(|t| {
                let a = ones[t];
                let b = ones[(t + 1) % k];
                (b + m - a - 1) % m
            })
            .filter(|&len| len > 0)
            .collect(),
    }
}

fn is_even_sequence(n: usize, l: usize, bits: &[u8]) -> bool {
    bits.len() == n + 2 * l
        && bits.first() == Some(&1)
        && bits.iter().all(|&b| b <= 1)
        && bits.iter().filter(|&&b| b == 1).count() == n
        && cyclic_zero_runs(bits).iter().all(|len| len % 2 == 0)
}

/// All sequences of `a_even(n, l)` in lexicographic order.
pub fn enumerate_a_even(n: usize, l: usize) -> Vec<EvenSequence> {
    if n == 0 || l == 0 {
        return Vec::new();
    }
    // The leading 1 is fixed; after each 1 comes an even-length zero run
    // (possibly empty) and the run after the last 1 wraps to the front.
    // Distributing l zero-pairs over the n gaps enumerates exactly a_even.
    let mut out = Vec::new();
    let mut gaps = vec![0usize; n];
    fn place(
        gap: usize,
        left: usize,
        gaps: &mut Vec<usize>,
        n: usize,
        l: usize,
        out: &mut Vec<EvenSequence>,
    ) {
        if gap == gaps.len() - 1 {
            gaps[gap] = left;
            let mut bits = Vec::with_capacity(n + 2 * l);
            for &g in gaps.iter() {
                bits.push(1);
                bits.extend(std::iter::repeat_n(0, 2 * g));
            }
            out.push(EvenSequence { n, l, bits });
            return;
        }
        for pairs in 0..=left {
            gaps[gap] = pairs;
            place(gap + 1, left - pairs, gaps, n, l, out);
        }
    }
    place(0, l, &mut gaps, n, l, &mut out);
    out.sort();
    out
}

/// An even sequence with one zero removed from its first zero run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedSequence {
    source: EvenSequence,
    tilde_bits: Vec<u8>,
    s1: usize,
    /// Position of the 1 closing the first zero run, `None` for the tail run.
    s2: Option<usize>,
}

impl ReducedSequence {
    pub fn source(&self) -> &EvenSequence {
        &self.source
    }

    pub fn tilde_bits(&self) -> &[u8] {
        &self.tilde_bits
    }

    pub fn s1(&self) -> usize {
        self.s1
    }

    pub fn s2(&self) -> Option<usize> {
        self.s2
    }

    pub fn len(&self) -> usize {
        self.tilde_bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tilde_bits.is_empty()
    }

    /// `(-1)^{s1}`.
    pub fn sign(&self) -> i8 {
        if self.s1.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn label(&self) -> String {
        bits_label(&self.tilde_bits)
    }
}

/// Deletes one zero from the first maximal zero run of `a`.
pub fn reduce(a: &EvenSequence) -> ReducedSequence {
    let bits = a.bits();
    let first_zero = bits
        .iter()
        .position(|&b| b == 0)
        .expect("even sequences with l >= 1 contain zeros");
    let closing = bits[first_zero..]
        .iter()
        .position(|&b| b == 1)
        .map(|off| first_zero + off);
    let mut tilde_bits = bits.to_vec();
    tilde_bits.remove(first_zero);
    ReducedSequence {
        source: a.clone(),
        tilde_bits,
        s1: first_zero + 1,
        s2: closing.map(|p| p + 1),
    }
}

/// Numbers the ones of `tilde_bits` left to right: slot (1-based) → derivation index.
pub fn derivation_assignment(tilde_bits: &[u8]) -> BTreeMap<usize, usize> {
    tilde_bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .enumerate()
        .map(|(j, (slot, _))| (slot + 1, j + 1))
        .collect()
}

/// Points `1..=n-1` with `k` marks, consecutive marks at distance `>= 2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MarkedInterval {
    n: usize,
    marks: Vec<usize>,
}

impl MarkedInterval {
    pub fn new(n: usize, marks: Vec<usize>) -> Option<Self> {
        let in_range = marks.iter().all(|&m| m >= 1 && m < n);
        let spaced = marks.windows(2).all(|w| w[1] >= w[0] + 2);
        let count_ok = !marks.is_empty() && marks.len() <= n / 2;
        (in_range && spaced && count_ok).then_some(Self { n, marks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn is_marked(&self, point: usize) -> bool {
        self.marks.binary_search(&point).is_ok()
    }
}

/// All `k`-mark intervals for `n`, lexicographic. Out-of-range `k` gives `[]`.
pub fn enumerate_intervals(n: usize, k: usize) -> Vec<MarkedInterval> {
    if n < 2 || k == 0 || k > n / 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut marks = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, marks: &mut Vec<usize>, out: &mut Vec<MarkedInterval>) {
        if marks.len() == k {
            out.push(MarkedInterval {
                n,
                marks: marks.clone(),
            });
            return;
        }
        for p in start..n {
            marks.push(p);
            rec(p + 2, n, k, marks, out);
            marks.pop();
        }
    }
    rec(1, n, k, &mut marks, &mut out);
    out
}

/// Marks on the circle of `n + 2l - 1` points carrying a reduced sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkedCircle {
    base: ReducedSequence,
    marks: Vec<usize>,
}

impl MarkedCircle {
    pub fn base(&self) -> &ReducedSequence {
        &self.base
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    /// Cyclic successor of a 1-based point.
    pub fn succ(&self, point: usize) -> usize {
        point % self.base.len() + 1
    }
}

fn admissible_points(tilde: &[u8]) -> Vec<usize> {
    let m = tilde.len();
    (0..m)
        .filter(|&i| tilde[i] == 1 && tilde[(i + 1) % m] == 1 && m > 1)
        .map(|i| i + 1)
        .collect()
}

fn cyclic_distance(a: usize, b: usize, m: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(m - d)
}

/// All admissible `k`-mark sets on the circle of `r`, lexicographic.
pub fn enumerate_circles(r: &ReducedSequence, k: usize) -> Vec<MarkedCircle> {
    let m = r.len();
    let points = admissible_points(r.tilde_bits());
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut chosen = Vec::with_capacity(k);
    fn rec(
        from: usize,
        points: &[usize],
        k: usize,
        m: usize,
        chosen: &mut Vec<usize>,
        r: &ReducedSequence,
        out: &mut Vec<MarkedCircle>,
    ) {
        if chosen.len() == k {
            out.push(MarkedCircle {
                base: r.clone(),
                marks: chosen.clone(),
            });
            return;
        }
        for idx in from..points.len() {
            let p = points[idx];
            if chosen.iter().all(|&c| cyclic_distance(c, p, m) >= 2) {
                chosen.push(p);
                rec(idx + 1, points, k, m, chosen, r, out);
                chosen.pop();
            }
        }
    }
    rec(0, &points, k, m, &mut chosen, r, &mut out);
    out
}

/// A permutation of `0..m` (stored 0-based) with its parity sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub sign: i8,
}

impl SignedPermutation {
    /// One-line notation with 1-based entries, e.g. `"213"`.
    pub fn one_line(&self) -> String {
        self.perm
            .iter()
            .map(|p| (p + 1).to_string())
            .collect::<Vec<_>>()
            .join("")
    }
}

/// Streams all `m!` permutations in lexicographic order with their signs.
pub struct SignedPermutations {
    current: Option<SignedPermutation>,
}

pub fn signed_permutations(m: usize) -> SignedPermutations {
    SignedPermutations {
        current: Some(SignedPermutation {
            perm: (0..m).collect(),
            sign: 1,
        }),
    }
}

impl Iterator for SignedPermutations {
    type Item = SignedPermutation;

    fn next(&mut self) -> Option<SignedPermutation> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let p = &mut next.perm;
        let len = p.len();
        if let Some(i) = (1..len).rev().find(|&i| p[i - 1] < p[i]).map(|i| i - 1) {
            let j = (i + 1..len).rev().find(|&j| p[j] > p[i]).unwrap();
            p.swap(i, j);
            p[i + 1..].reverse();
            // one swap, then reversing a suffix of length L adds L/2 swaps
            let swaps = 1 + (len - i - 1) / 2;
            if swaps % 2 == 1 {
                next.sign = -next.sign;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Parity sign of a permutation of `0..len` by inversion count.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(v: &[u8]) -> Vec<u8> {
        v.to_vec()
    }

    fn labels(v: &[EvenSequence]) -> Vec<String> {
        v.iter().map(EvenSequence::label).collect()
    }

    /// Exhaustive filter over all placements: an oracle independent of the
    /// gap-distribution enumerator.
    fn a_even_brute(n: usize, l: usize) -> Vec<Vec<u8>> {
        let m = n + 2 * l;
        (0..1u32 << m)
            .map(|mask| (0..m).map(|i| ((mask >> (m - 1 - i)) & 1) as u8).collect::<Vec<_>>())
            .filter(|b| is_even_sequence(n, l, b))
            .collect()
    }

    #[test]
    fn a_even_examples() {
        assert_eq!(labels(&enumerate_a_even(1, 1)), ["100"]);
        assert_eq!(labels(&enumerate_a_even(2, 1)), ["1001", "1100"]);
        assert_eq!(labels(&enumerate_a_even(3, 1)), ["10011", "11001", "11100"]);
        assert_eq!(
            labels(&enumerate_a_even(2, 2)),
            ["100001", "100100", "110000"]
        );
        assert!(enumerate_a_even(0, 1).is_empty());
    }

    #[test]
    fn a_even_matches_brute_force() {
        for m in 3..=12usize {
            for l in 1..=m / 2 {
                let n = m - 2 * l;
                if n == 0 {
                    continue;
                }
                let fast: Vec<Vec<u8>> = enumerate_a_even(n, l)
                    .into_iter()
                    .map(|s| s.bits)
                    .collect();
                let brute = a_even_brute(n, l);
                assert_eq!(fast, brute, "n={n} l={l}");
                for s in &fast {
                    assert_eq!(s[0], 1);
                    assert_eq!(s.iter().filter(|&&b| b == 1).count(), n);
                    assert!(cyclic_zero_runs(s).iter().all(|r| r % 2 == 0));
                }
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let r = reduce(&EvenSequence::new(2, 1, bits(&[1, 0, 0, 1])).unwrap());
        assert_eq!((r.label().as_str(), r.s1(), r.s2()), ("101", 2, Some(4)));
        let r = reduce(&EvenSequence::new(2, 1, bits(&[1, 1, 0, 0])).unwrap());
        assert_eq!((r.label().as_str(), r.s1(), r.s2()), ("110", 3, None));
        let r = reduce(&EvenSequence::new(4, 2, bits(&[1, 0, 0, 1, 1, 0, 0, 1])).unwrap());
        assert_eq!((r.label().as_str(), r.s1()), ("1011001", 2));
    }

    #[test]
    fn reduce_properties() {
        for (n, l) in [(1, 1), (2, 1), (3, 1), (2, 2), (3, 2), (1, 3), (4, 2)] {
            for a in enumerate_a_even(n, l) {
                let r = reduce(&a);
                let ones = r.tilde_bits().iter().filter(|&&b| b == 1).count();
                assert_eq!(ones, n);
                assert_eq!(r.len(), n + 2 * l - 1);
                // first zero run is now odd
                let s1 = r.s1() - 1;
                let run = r.tilde_bits()[s1..].iter().take_while(|&&b| b == 0).count();
                assert_eq!(run % 2, 1);
                assert_eq!(&r.tilde_bits()[..s1], &a.bits()[..s1]);
            }
        }
    }

    #[test]
    fn assignment_examples() {
        let m = |v: &[(usize, usize)]| v.iter().copied().collect::<BTreeMap<_, _>>();
        assert_eq!(derivation_assignment(&[1, 1, 0]), m(&[(1, 1), (2, 2)]));
        assert_eq!(derivation_assignment(&[1, 0, 1]), m(&[(1, 1), (3, 2)]));
        assert_eq!(
            derivation_assignment(&[1, 0, 1, 1, 0, 0, 1]),
            m(&[(1, 1), (3, 2), (4, 3), (7, 4)])
        );
    }

    fn marks(v: &[MarkedInterval]) -> Vec<Vec<usize>> {
        v.iter().map(|t| t.marks().to_vec()).collect()
    }

    #[test]
    fn interval_examples() {
        assert_eq!(marks(&enumerate_intervals(2, 1)), vec![vec![1]]);
        assert_eq!(marks(&enumerate_intervals(4, 2)), vec![vec![1, 3]]);
        assert_eq!(marks(&enumerate_intervals(6, 3)), vec![vec![1, 3, 5]]);
        assert!(enumerate_intervals(4, 3).is_empty());
        assert!(enumerate_intervals(4, 0).is_empty());
    }

    fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn interval_counts_match_subset_filter() {
        for n in 2..=12usize {
            for k in 1..=n / 2 {
                let brute = (0u32..1 << (n - 1))
                    .filter(|mask| mask.count_ones() as usize == k)
                    .filter(|mask| {
                        let pts: Vec<usize> =
                            (0..n - 1).filter(|i| mask >> i & 1 == 1).collect();
                        pts.windows(2).all(|w| w[1] - w[0] >= 2)
                    })
                    .count();
                assert_eq!(enumerate_intervals(n, k).len(), brute, "n={n} k={k}");
                assert_eq!(brute, binomial(n - k, k));
            }
        }
    }

    fn reduced(n: usize, l: usize, b: &[u8]) -> ReducedSequence {
        reduce(&EvenSequence::new(n, l, b.to_vec()).unwrap())
    }

    #[test]
    fn circle_examples() {
        let r = reduced(2, 1, &[1, 1, 0, 0]);
        let c = enumerate_circles(&r, 1);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].marks(), &[1]);
        let r = reduced(2, 1, &[1, 0, 0, 1]);
        let c = enumerate_circles(&r, 1);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].marks(), &[3]);
        assert!(enumerate_circles(&r, 2).is_empty());
    }

    #[test]
    fn circle_marks_pair_consecutive_derivations() {
        for (n, l) in [(2, 1), (3, 1), (4, 1), (2, 2), (4, 2), (5, 1)] {
            for a in enumerate_a_even(n, l) {
                let r = reduce(&a);
                let j = derivation_assignment(r.tilde_bits());
                for k in 1..=n / 2 {
                    for c in enumerate_circles(&r, k) {
                        for &p in c.marks() {
                            let (x, y) = (j[&p], j[&c.succ(p)]);
                            assert!(y == x + 1 || (x == n && y == 1), "{x} {y}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn permutation_signs() {
        let p: Vec<_> = signed_permutations(1).collect();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].sign, 1);
        let p: Vec<_> = signed_permutations(2)
            .map(|s| (s.one_line(), s.sign))
            .collect();
        assert_eq!(p, vec![("12".into(), 1), ("21".to_string(), -1)]);
        let p: Vec<_> = signed_permutations(3).collect();
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().filter(|s| s.sign == 1).count(), 3);
        for s in &p {
            assert_eq!(s.sign, permutation_sign(&s.perm));
        }
        assert_eq!(signed_permutations(0).count(), 1);
    }

    #[test]
    fn permutation_stream_is_complete() {
        for m in 2..=6 {
            let all: Vec<_> = signed_permutations(m).collect();
            let count: usize = (1..=m).product();
            assert_eq!(all.len(), count);
            let sum: i64 = all.iter().map(|s| s.sign as i64).sum();
            assert_eq!(sum, 0);
            for s in &all {
                assert_eq!(s.sign, permutation_sign(&s.perm));
            }
        }
    }
}
