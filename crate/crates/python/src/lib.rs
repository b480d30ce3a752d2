//! Python bindings: sequences, descriptors, matrix and symbol contexts, and
//! the verifiers. Reports come back as plain dicts (parsed report JSON);
//! rationals cross the boundary as `"p/q"` strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;

use lifting_core::algebra::axioms::check_axioms;
use lifting_core::algebra::matrix::MatrixContext as CoreMatrixContext;
use lifting_core::algebra::{trial_rng, RandomElements};
use lifting_core::cochains::{self, CochainDescriptor};
use lifting_core::cohomology::{self, symbolic};
use lifting_core::combinatorics::{enumerate_a_even as core_enumerate, reduce};
use lifting_core::psido::{self as core_psido, LogDerivationTag, PsidoContext as CorePsidoContext, Symbol as CoreSymbol};
use lifting_core::rational;
use lifting_core::report::VerificationReport;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dict<'py>(py: Python<'py>, report: &VerificationReport) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (report.to_json(),))
}

/// `(bits, s1, tilde)` for every even-gap sequence.
#[pyfunction]
fn enumerate_a_even(n: usize, l: usize) -> Vec<(String, usize, String)> {
    core_enumerate(n, l)
        .iter()
        .map(|a| {
            let r = reduce(a);
            (a.label(), r.s1(), r.label())
        })
        .collect()
}

#[pyclass(name = "Descriptor", frozen)]
struct Descriptor {
    inner: CochainDescriptor,
}

#[pymethods]
impl Descriptor {
    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    fn __len__(&self) -> usize {
        self.inner.words.len()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = CochainDescriptor::from_json(text).map_err(err)?;
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// `target` is one of `psi0`, `psi-n1`, `psi-nl`, `s-even`.
#[pyfunction]
#[pyo3(signature = (target, n, l = 1))]
fn build(target: &str, n: usize, l: usize) -> PyResult<Descriptor> {
    let inner = match target {
        "psi0" => cochains::build_psi0(n, l),
        "psi-n1" => cochains::build_psi_n1(n),
        "psi-nl" => cochains::build_psi_nl(n, l),
        "s-even" => cochains::build_s_even(n, l),
        other => return Err(err(format!("unknown target {other:?}"))),
    }
    .map_err(err)?;
    Ok(Descriptor { inner })
}

#[pyclass(name = "MatrixContext", frozen)]
struct MatrixContext {
    inner: CoreMatrixContext,
}

#[pymethods]
impl MatrixContext {
    /// Random integer generators; `commuting` draws polynomials in one matrix.
    #[staticmethod]
    #[pyo3(signature = (dim, n, seed = 0, commuting = false))]
    fn random(dim: usize, n: usize, seed: u64, commuting: bool) -> Self {
        let mut rng = trial_rng(seed, u64::MAX);
        let inner = if commuting {
            CoreMatrixContext::random_commuting(dim, n, &mut rng)
        } else {
            CoreMatrixContext::random(dim, n, &mut rng)
        };
        Self { inner }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: CoreMatrixContext::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn commuting(&self) -> bool {
        self.inner.commuting()
    }

    /// `ψ(A_1, ..., A_m)` on random arguments drawn from `seed`.
    fn evaluate(&self, d: &Descriptor, seed: u64) -> PyResult<String> {
        evaluate_random(&self.inner, &d.inner, seed)
    }
}

#[pyclass(name = "Symbol", frozen)]
struct Symbol {
    inner: CoreSymbol,
}

#[pymethods]
impl Symbol {
    /// `window` holds one lower bound on the `∂`-exponent per variable.
    #[staticmethod]
    fn parse(text: &str, window: Vec<i32>) -> PyResult<Self> {
        Ok(Self {
            inner: CoreSymbol::parse(text, &window).map_err(err)?,
        })
    }

    fn __mul__(&self, other: &Symbol) -> Symbol {
        Symbol {
            inner: self.inner.compose(&other.inner),
        }
    }

    fn __add__(&self, other: &Symbol) -> Symbol {
        Symbol {
            inner: self.inner.add(&other.inner),
        }
    }

    fn __sub__(&self, other: &Symbol) -> Symbol {
        Symbol {
            inner: self.inner.add(&other.inner.neg()),
        }
    }

    fn bracket(&self, other: &Symbol) -> Symbol {
        Symbol {
            inner: self.inner.bracket(&other.inner),
        }
    }

    fn residue(&self) -> PyResult<String> {
        self.inner.residue().map(|r| rational::display(&r)).map_err(err)
    }

    /// Exact coefficient, or `None` outside the window.
    fn coefficient(&self, x: Vec<i32>, d: Vec<i32>) -> Option<String> {
        self.inner.coefficient(&x, &d).map(|c| rational::display(&c))
    }

    /// `kind` is `"x"` for `ad(ln x_var)` or `"d"` for `ad(ln ∂_var)`; `var` is 1-based.
    fn log_derivation(&self, kind: &str, var: usize) -> PyResult<Symbol> {
        if var == 0 || var > self.inner.vars() {
            return Err(err(format!("variable {var} out of range")));
        }
        let tag = match kind {
            "x" => LogDerivationTag::ln_x(var - 1),
            "d" => LogDerivationTag::ln_partial(var - 1),
            other => return Err(err(format!("unknown derivation {other:?}"))),
        };
        Ok(Symbol {
            inner: self.inner.apply_log_derivation(tag),
        })
    }

    #[getter]
    fn window(&self) -> Vec<i32> {
        self.inner.window().to_vec()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Symbol({:?}, window={:?})", self.inner.to_string(), self.inner.window())
    }
}

#[pyclass(name = "PsidoContext", frozen)]
struct PsidoContext {
    inner: CorePsidoContext,
}

#[pymethods]
impl PsidoContext {
    #[new]
    fn new(vars: usize, window: Vec<i32>) -> PyResult<Self> {
        Ok(Self {
            inner: core_psido::make_psido_context(vars, window).map_err(err)?,
        })
    }

    fn parse(&self, text: &str) -> PyResult<Symbol> {
        Ok(Symbol {
            inner: self.inner.parse(text).map_err(err)?,
        })
    }

    fn random_symbol(&self, seed: u64) -> Symbol {
        Symbol {
            inner: self.inner.random_element(&mut trial_rng(seed, 0)),
        }
    }

    fn evaluate(&self, d: &Descriptor, seed: u64) -> PyResult<String> {
        evaluate_random(&self.inner, &d.inner, seed)
    }
}

fn evaluate_random<C>(ctx: &C, d: &CochainDescriptor, seed: u64) -> PyResult<String>
where
    C: RandomElements<Value = rational::Rational>,
{
    let args = ctx.random_elements(d.arity, &mut trial_rng(seed, 0));
    cochains::evaluate(d, ctx, &args)
        .map(|v| rational::display(&v))
        .map_err(err)
}

fn run_check<C>(check: &str, ctx: &C, n: usize, l: usize, trials: usize, seed: u64) -> PyResult<VerificationReport>
where
    C: RandomElements<Value = rational::Rational>,
{
    match check {
        "axioms" => Ok(check_axioms(ctx, trials, seed)),
        "lemma11" => cohomology::verify_lemma_1_1(n, l, ctx, trials, seed),
        "lemma12" => cohomology::verify_lemma_1_2(n, l, ctx, trials, seed),
        "thm11" => cohomology::verify_thm11(n, l, ctx, trials, seed),
        "thm21" => cohomology::verify_thm21(n, ctx, trials, seed),
        "thm23" => cohomology::verify_thm23(n, l, ctx, trials, seed),
        "key-lemma" => cohomology::verify_key_lemma(n, l, ctx, trials, seed),
        other => return Err(err(format!("unknown check {other:?}"))),
    }
    .map_err(err)
}

/// Runs a randomized check against a `MatrixContext` or `PsidoContext`.
#[pyfunction]
#[pyo3(signature = (check, ctx, n, l = 1, trials = 10, seed = 0))]
fn verify<'py>(
    py: Python<'py>,
    check: &str,
    ctx: &Bound<'py, PyAny>,
    n: usize,
    l: usize,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let report = if let Ok(m) = ctx.cast::<MatrixContext>() {
        let inner = &m.get().inner;
        py.detach(|| run_check(check, inner, n, l, trials, seed))?
    } else if let Ok(p) = ctx.cast::<PsidoContext>() {
        let inner = &p.get().inner;
        py.detach(|| run_check(check, inner, n, l, trials, seed))?
    } else {
        return Err(err("ctx must be a MatrixContext or PsidoContext"));
    };
    to_dict(py, &report)
}

/// Symbolic checks in the free trace algebra: `lemma111`, `thm11`
/// (commuting derivations) and `thm21`, `thm23` (inner derivations).
#[pyfunction]
#[pyo3(signature = (check, n, l = 1))]
fn certify<'py>(py: Python<'py>, check: &str, n: usize, l: usize) -> PyResult<Bound<'py, PyAny>> {
    let bound = symbolic::SYMBOLIC_SIZE_BOUND;
    let report = py
        .detach(|| match check {
            "lemma111" => symbolic::certify_lemma_1_1_1(n, l, bound),
            "thm11" => symbolic::certify_thm11(n, l, bound),
            "thm21" => cochains::build_psi_n1(n).and_then(|d| symbolic::certify_inner_cocycle("thm21", &d)),
            "thm23" => cochains::build_psi_nl(n, l).and_then(|d| symbolic::certify_inner_cocycle("thm23", &d)),
            other => Err(cochains::CochainError::InvalidParameters(format!("unknown check {other:?}"))),
        })
        .map_err(err)?;
    to_dict(py, &report)
}

#[pyfunction]
#[pyo3(signature = (cutoff = 4, trials = 10, seed = 0))]
fn bracket_series_check<'py>(py: Python<'py>, cutoff: u32, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let report = py
        .detach(|| core_psido::bracket_series_check(cutoff, None, trials, seed))
        .map_err(err)?;
    to_dict(py, &report)
}

/// Runs the command-line interface in-process; returns the exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    lifting_core::cli::run(std::iter::once("lifting".to_string()).chain(args))
}

#[pymodule]
fn lifting(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Descriptor>()?;
    m.add_class::<MatrixContext>()?;
    m.add_class::<Symbol>()?;
    m.add_class::<PsidoContext>()?;
    m.add_function(wrap_pyfunction!(enumerate_a_even, m)?)?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(bracket_series_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
