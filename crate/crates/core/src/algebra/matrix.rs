//! Square rational matrices with inner derivations `D_i = ad G_i`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

use super::{AlgebraError, RandomElements, TraceAlgebra, UpperTriangle};
use crate::rational::{self, Rational};

/// Inclusive bound on sampled integer entries.
pub const SAMPLE_BOUND: i64 = 3;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    dim: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Rational::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, AlgebraError> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(AlgebraError::Document(format!(
                "row of length {} in a {dim}-row matrix",
                bad.len()
            )));
        }
        Ok(Self {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self, AlgebraError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rational::int(v)).collect())
                .collect(),
        )
    }

    /// Matrix unit `E_{ij}` (1-based, as in the usual notation).
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(dim);
        m.entries[(i - 1) * dim + (j - 1)] = Rational::one();
        m
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let mut m = Self::zero(values.len());
        for (i, v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = v.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn trace(&self) -> Rational {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_integral() && other.is_integral() {
            return self.mul_integral(other);
        }
        self.mul_generic(other)
    }

    fn mul_generic(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.denom().is_one())
    }

    /// Integer product without per-operation normalization: `i128`
    /// accumulation when entries fit in `i64`, `BigInt` otherwise.
    fn mul_integral(&self, other: &Self) -> Self {
        let n = self.dim;
        let small = |m: &Self| m.entries.iter().map(|e| e.numer().to_i64()).collect::<Option<Vec<i64>>>();
        if let (Some(a), Some(b)) = (small(self), small(other)) {
            let entries: Option<Vec<Rational>> = (0..n * n)
                .map(|ij| {
                    let (i, j) = (ij / n, ij % n);
                    (0..n)
                        .try_fold(0i128, |acc, k| acc.checked_add(a[i * n + k] as i128 * b[k * n + j] as i128))
                        .map(|v| Rational::from_integer(BigInt::from(v)))
                })
                .collect();
            if let Some(entries) = entries {
                return Self { dim: n, entries };
            }
        }
        let entries = (0..n * n)
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                let v: BigInt = (0..n)
                    .map(|k| self.entries[i * n + k].numer() * other.entries[k * n + j].numer())
                    .sum();
                Rational::from_integer(v)
            })
            .collect();
        Self { dim: n, entries }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn random(dim: usize, rng: &mut ChaCha8Rng) -> Self {
        Self {
            dim,
            entries: (0..dim * dim)
                .map(|_| rational::int(rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND)))
                .collect(),
        }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .entries
            .chunks(self.dim)
            .map(|r| r.iter().map(rational::display).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

/// Matrix algebra `M_N(Q)` with derivations `D_i(A) = G_i A - A G_i` and
/// `Q_{ij} = [G_i, G_j]`.
#[derive(Debug, Clone)]
pub struct MatrixContext {
    dim: usize,
    generators: Vec<RatMatrix>,
    q: UpperTriangle<RatMatrix>,
}

/// `make_matrix_context`: validates shapes and precomputes `Q`.
pub fn make_matrix_context(
    dim: usize,
    generators: Vec<RatMatrix>,
) -> Result<MatrixContext, AlgebraError> {
    MatrixContext::new(dim, generators)
}

impl MatrixContext {
    pub fn new(dim: usize, generators: Vec<RatMatrix>) -> Result<Self, AlgebraError> {
        if generators.is_empty() {
            return Err(AlgebraError::NoGenerators);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.dim != dim {
                return Err(AlgebraError::DimensionMismatch {
                    index: index + 1,
                    rows: g.dim,
                    cols: g.dim,
                    expected: dim,
                });
            }
        }
        let q = UpperTriangle::from_fn(generators.len(), |i, j| {
            generators[i].commutator(&generators[j])
        });
        Ok(Self { dim, generators, q })
    }

    /// Random integer generators with entries in `[-3, 3]`.
    pub fn random(dim: usize, n: usize, rng: &mut ChaCha8Rng) -> Self {
        let gens = (0..n).map(|_| RatMatrix::random(dim, rng)).collect();
        Self::new(dim, gens).expect("shapes agree by construction")
    }

    /// Commuting generators: random integer polynomials (without constant
    /// term) in one random matrix `M`.
    pub fn random_commuting(dim: usize, n: usize, rng: &mut ChaCha8Rng) -> Self {
        let m = RatMatrix::random(dim, rng);
        let mut powers = vec![m.clone()];
        for _ in 2..dim.max(2) {
            let next = powers.last().unwrap().mul(&m);
            powers.push(next);
        }
        let gens = (0..n)
            .map(|_| {
                powers.iter().fold(RatMatrix::zero(dim), |acc, p| {
                    acc.add(&p.scale(&rational::int(rng.gen_range(-2..=2))))
                })
            })
            .collect();
        Self::new(dim, gens).expect("shapes agree by construction")
    }

    /// Random diagonal generators (entries in `[-3, 3]`).
    pub fn random_diagonal(dim: usize, n: usize, rng: &mut ChaCha8Rng) -> Self {
        let gens = (0..n)
            .map(|_| {
                let diag: Vec<Rational> = (0..dim)
                    .map(|_| rational::int(rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND)))
                    .collect();
                RatMatrix::diagonal(&diag)
            })
            .collect();
        Self::new(dim, gens).expect("shapes agree by construction")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[RatMatrix] {
        &self.generators
    }

    /// Replaces `Q_{ij}` (0-based, `i < j`) without touching the generators.
    /// Only useful for building deliberately inconsistent contexts.
    pub fn with_q_override(mut self, i: usize, j: usize, value: RatMatrix) -> Self {
        self.q.set(i, j, value);
        self
    }

    pub fn commuting(&self) -> bool {
        (0..self.generators.len()).all(|i| {
            (i + 1..self.generators.len()).all(|j| self.q.get(i, j).unwrap().0.is_zero())
        })
    }

    /// Parses `{"n": int, "N": int, "generators": [...]}`. Each generator is
    /// either a list of rows or a flat row-major list of `N*N` entries; each
    /// entry is `[num, den]`, an integer, or a `"p/q"` string.
    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        #[derive(Deserialize)]
        struct Document {
            n: usize,
            #[serde(rename = "N")]
            dim: usize,
            generators: Vec<Value>,
        }
        let doc: Document =
            serde_json::from_str(text).map_err(|e| AlgebraError::Document(e.to_string()))?;
        if doc.generators.len() != doc.n {
            return Err(AlgebraError::Document(format!(
                "n = {} but {} generators given",
                doc.n,
                doc.generators.len()
            )));
        }
        let mut gens = Vec::with_capacity(doc.n);
        for (index, g) in doc.generators.iter().enumerate() {
            gens.push(parse_matrix(g, doc.dim, index + 1)?);
        }
        Self::new(doc.dim, gens)
    }

    pub fn to_json(&self) -> Value {
        let gens: Vec<Value> = self
            .generators
            .iter()
            .map(|g| {
                Value::Array(
                    g.rows()
                        .iter()
                        .map(|r| Value::Array(r.iter().map(rational::to_json).collect()))
                        .collect(),
                )
            })
            .collect();
        serde_json::json!({ "n": self.generators.len(), "N": self.dim, "generators": gens })
    }
}

fn parse_matrix(v: &Value, dim: usize, index: usize) -> Result<RatMatrix, AlgebraError> {
    let doc_err = |msg: String| AlgebraError::Document(format!("generator {index}: {msg}"));
    let items = v
        .as_array()
        .ok_or_else(|| doc_err("expected an array".into()))?;
    let is_entry = |e: &Value| match e {
        Value::Array(p) => p.len() == 2 && p.iter().all(|x| !x.is_array()),
        _ => true,
    };
    let flat = items.len() == dim * dim && (dim > 1 || items.iter().all(is_entry));
    let entries: Vec<Rational> = if flat {
        items
            .iter()
            .map(|e| rational::from_json(e).map_err(doc_err))
            .collect::<Result<_, _>>()?
    } else {
        let rows: Vec<&Vec<Value>> = items
            .iter()
            .map(|r| r.as_array().ok_or_else(|| doc_err("expected a row".into())))
            .collect::<Result<_, _>>()?;
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(AlgebraError::DimensionMismatch {
                index,
                rows: rows.len(),
                cols,
                expected: dim,
            });
        }
        rows.into_iter()
            .flatten()
            .map(|e| rational::from_json(e).map_err(doc_err))
            .collect::<Result<_, _>>()?
    };
    Ok(RatMatrix { dim, entries })
}

impl TraceAlgebra for MatrixContext {
    type Elem = RatMatrix;
    type Value = Rational;

    fn derivation_count(&self) -> usize {
        self.generators.len()
    }

    fn zero(&self) -> RatMatrix {
        RatMatrix::zero(self.dim)
    }

    fn add(&self, a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
        a.add(b)
    }

    fn sub(&self, a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
        a.sub(b)
    }

    fn scale(&self, a: &RatMatrix, c: &Rational) -> RatMatrix {
        a.scale(c)
    }

    fn mul(&self, a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
        a.mul(b)
    }

    fn is_zero_elem(&self, a: &RatMatrix) -> bool {
        a.is_zero()
    }

    fn trace(&self, a: &RatMatrix) -> Result<Rational, AlgebraError> {
        Ok(a.trace())
    }

    fn derive(&self, i: usize, a: &RatMatrix) -> Result<RatMatrix, AlgebraError> {
        let g = self
            .generators
            .get(i)
            .ok_or(AlgebraError::DerivationIndex {
                index: i + 1,
                count: self.generators.len(),
            })?;
        Ok(g.commutator(a))
    }

    fn q(&self, i: usize, j: usize) -> Option<RatMatrix> {
        Some(match self.q.get(i, j) {
            Some((m, false)) => m.clone(),
            Some((m, true)) => m.scale(&-Rational::one()),
            None => RatMatrix::zero(self.dim),
        })
    }

    fn generator(&self, i: usize) -> Option<RatMatrix> {
        self.generators.get(i).cloned()
    }
}

impl RandomElements for MatrixContext {
    fn random_element(&self, rng: &mut ChaCha8Rng) -> RatMatrix {
        RatMatrix::random(self.dim, rng)
    }
}
