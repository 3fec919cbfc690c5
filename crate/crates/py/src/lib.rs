//! Python bindings: rings, polynomials and ideals with standard bases and
//! local lengths, δ of branch configurations, whole-family analysis and the
//! built-in corpus. Structured results come back as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use equising::cli::{self, corpus, CliError, Manifest, RunConfig, EXIT_HYPOTHESIS, EXIT_INPUT};
use equising::curveinv::{self, BranchParam, CurveError, CurvePresentation, JetOptions};
use equising::family::{ErrorKind, FamilyError};
use equising::gb::{self, GbError};
use equising::localdim::{self, PrimaryDecomposition};
use equising::poly::{self, MonomialOrder, PolyError, VarSet};

create_exception!(pyequising, EquisingError, PyException);
create_exception!(pyequising, InputError, EquisingError);
create_exception!(pyequising, ComputationError, EquisingError);
create_exception!(pyequising, HypothesisError, EquisingError);

fn by_kind(kind: ErrorKind, msg: String) -> PyErr {
    match kind {
        ErrorKind::Input => InputError::new_err(msg),
        ErrorKind::Computation => ComputationError::new_err(msg),
        ErrorKind::Hypothesis => HypothesisError::new_err(msg),
    }
}

fn family_err(e: FamilyError) -> PyErr {
    by_kind(e.kind(), e.to_string())
}

fn curve_err(e: CurveError) -> PyErr {
    family_err(FamilyError::Curve(e))
}

fn poly_err(e: PolyError) -> PyErr {
    InputError::new_err(e.to_string())
}

fn gb_err(e: GbError) -> PyErr {
    family_err(FamilyError::Gb(e))
}

fn cli_err(e: CliError) -> PyErr {
    let msg = e.to_string();
    match e.exit_code() {
        EXIT_INPUT => InputError::new_err(msg),
        EXIT_HYPOTHESIS => HypothesisError::new_err(msg),
        _ => ComputationError::new_err(msg),
    }
}

fn parse_order(order: &str) -> PyResult<MonomialOrder> {
    order.parse().map_err(InputError::new_err)
}

fn to_py(py: Python<'_>, value: &impl serde::Serialize) -> PyResult<Py<PyAny>> {
    let text =
        serde_json::to_string(value).map_err(|e| ComputationError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn jets(jet_cap: usize, degree_cap: usize) -> JetOptions {
    JetOptions {
        jet_cap,
        degree_cap,
        ..JetOptions::default()
    }
}

/// Polynomial ring over the rationals with named variables.
#[pyclass(frozen, from_py_object, module = "pyequising")]
#[derive(Clone)]
struct Ring(poly::Ring);

#[pymethods]
impl Ring {
    #[new]
    fn new(names: Vec<String>) -> PyResult<Self> {
        VarSet::new(&names).map(Ring).map_err(poly_err)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.0.names().to_vec()
    }

    fn parse(&self, text: &str) -> PyResult<Poly> {
        poly::parse_poly(text, &self.0).map(Poly).map_err(poly_err)
    }

    fn __repr__(&self) -> String {
        format!("Ring({:?})", self.0.names())
    }
}

/// Polynomial with exact rational coefficients.
#[pyclass(frozen, eq, skip_from_py_object, module = "pyequising")]
#[derive(Clone, PartialEq)]
struct Poly(poly::Polynomial);

#[pymethods]
impl Poly {
    #[getter]
    fn ring(&self) -> Ring {
        Ring(self.0.ring().clone())
    }

    fn total_degree(&self) -> Option<u32> {
        self.0.total_degree()
    }

    /// Lowest total degree of a term, `None` for zero.
    fn order(&self) -> Option<u32> {
        self.0.order()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __add__(&self, o: &Poly) -> PyResult<Poly> {
        self.0.try_add(&o.0).map(Poly).map_err(poly_err)
    }

    fn __sub__(&self, o: &Poly) -> PyResult<Poly> {
        self.0.try_sub(&o.0).map(Poly).map_err(poly_err)
    }

    fn __mul__(&self, o: &Poly) -> PyResult<Poly> {
        self.0.try_mul(&o.0).map(Poly).map_err(poly_err)
    }

    fn __neg__(&self) -> Poly {
        Poly(self.0.neg())
    }

    fn __pow__(&self, e: u32, _modulo: Option<Py<PyAny>>) -> Poly {
        Poly(self.0.pow(e))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly('{}')", self.0)
    }
}

/// Ideal given by generators; either strings or `Poly` values.
#[pyclass(frozen, skip_from_py_object, module = "pyequising")]
#[derive(Clone)]
struct Ideal(gb::Ideal);

fn collect_gens(ring: &poly::Ring, gens: &Bound<'_, PyAny>) -> PyResult<Vec<poly::Polynomial>> {
    let mut out = Vec::new();
    for g in gens.try_iter()? {
        let g = g?;
        if let Ok(p) = g.cast::<Poly>() {
            out.push(p.get().0.clone());
        } else {
            out.push(poly::parse_poly(&g.extract::<String>()?, ring).map_err(poly_err)?);
        }
    }
    Ok(out)
}

#[pymethods]
impl Ideal {
    #[new]
    fn new(ring: &Ring, gens: &Bound<'_, PyAny>) -> PyResult<Self> {
        let gens = collect_gens(&ring.0, gens)?;
        gb::Ideal::new(&ring.0, gens).map(Ideal).map_err(gb_err)
    }

    #[getter]
    fn gens(&self) -> Vec<Poly> {
        self.0.gens().iter().cloned().map(Poly).collect()
    }

    /// Standard basis for `order`: degrevlex, negdegrevlex or elimination:<k>.
    #[pyo3(signature = (order = "degrevlex"))]
    fn std_basis(&self, py: Python<'_>, order: &str) -> PyResult<Vec<Poly>> {
        let ord = parse_order(order)?;
        let sb = py.detach(|| gb::std_basis(&self.0, &ord)).map_err(gb_err)?;
        Ok(sb.basis().iter().cloned().map(Poly).collect())
    }

    /// Membership; under a local order this is membership in the localization.
    #[pyo3(signature = (f, order = "degrevlex"))]
    fn contains(&self, py: Python<'_>, f: &Poly, order: &str) -> PyResult<bool> {
        let ord = parse_order(order)?;
        py.detach(|| gb::ideal_contains(&self.0, &f.0, &ord))
            .map_err(gb_err)
    }

    /// Length of the local quotient at the origin, `None` when infinite.
    fn vdim(&self, py: Python<'_>) -> PyResult<Option<u64>> {
        let v = py
            .detach(|| localdim::vdim(&self.0))
            .map_err(|e| family_err(FamilyError::LocalDim(e)))?;
        Ok(v.finite())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Ideal({})", self.0)
    }
}

fn branches(coords: Vec<Vec<String>>) -> PyResult<Vec<BranchParam>> {
    let u = VarSet::new(&["u"]).map_err(poly_err)?;
    coords
        .iter()
        .enumerate()
        .map(|(i, c)| BranchParam::parse(format!("b{}", i + 1), &u, c).map_err(curve_err))
        .collect()
}

/// δ of the reduced curve with the given branch parametrizations in `u`.
#[pyfunction]
#[pyo3(signature = (coords, jet_cap = 64, degree_cap = 32))]
fn delta(
    py: Python<'_>,
    coords: Vec<Vec<String>>,
    jet_cap: usize,
    degree_cap: usize,
) -> PyResult<u64> {
    let bs = branches(coords)?;
    let opts = jets(jet_cap, degree_cap);
    py.detach(|| curveinv::delta_reduced(&bs, &opts))
        .map_err(curve_err)
}

/// Invariants of a curve germ: reduced when only branches are given,
/// otherwise from the ideal `ideal` in `ring` with its primary decomposition.
#[pyfunction]
#[pyo3(signature = (coords, ring = None, ideal = None, primes = None, embedded = None, jet_cap = 64, degree_cap = 32))]
#[allow(clippy::too_many_arguments)]
fn curve_invariants(
    py: Python<'_>,
    coords: Vec<Vec<String>>,
    ring: Option<Ring>,
    ideal: Option<Vec<String>>,
    primes: Option<Vec<Vec<String>>>,
    embedded: Option<Vec<String>>,
    jet_cap: usize,
    degree_cap: usize,
) -> PyResult<Py<PyAny>> {
    let bs = branches(coords)?;
    let curve = match (ring, ideal) {
        (None, None) => CurvePresentation::reduced(bs).map_err(curve_err)?,
        (Some(ring), Some(ideal)) => {
            let parse = |gens: &[String]| gb::Ideal::parse(&ring.0, gens).map_err(gb_err);
            let target = parse(&ideal)?;
            let primes = primes
                .unwrap_or_default()
                .iter()
                .map(|p| parse(p))
                .collect::<PyResult<Vec<_>>>()?;
            let embedded = embedded.as_deref().map(parse).transpose()?;
            let dec = PrimaryDecomposition::new(&target, primes, embedded)
                .map_err(|e| family_err(FamilyError::LocalDim(e)))?;
            CurvePresentation::new(bs, Some(target), Some(dec)).map_err(curve_err)?
        }
        _ => return Err(InputError::new_err("`ring` and `ideal` go together")),
    };
    let opts = jets(jet_cap, degree_cap);
    let inv = py
        .detach(|| curveinv::invariants(&curve, &opts))
        .map_err(curve_err)?;
    to_py(py, &inv)
}

fn run_manifest_text(py: Python<'_>, text: &str, seed: Option<u64>) -> PyResult<cli::Report> {
    let manifest = Manifest::from_json(text).map_err(cli_err)?;
    let config = RunConfig {
        seed,
        timing: false,
    };
    py.detach(|| cli::run_manifest(&manifest, &config))
        .map_err(cli_err)
}

/// Runs a manifest given as a JSON string and returns the report.
#[pyfunction]
#[pyo3(signature = (text, seed = None))]
fn analyze_manifest(py: Python<'_>, text: &str, seed: Option<u64>) -> PyResult<Py<PyAny>> {
    let report = run_manifest_text(py, text, seed)?;
    to_py(py, &report)
}

/// Analyzes one family with components parametrized in `u, t`, returning
/// the `result` record of its report entry.
#[pyfunction]
#[pyo3(signature = (ring, components, seed = 0))]
fn analyze_family(
    py: Python<'_>,
    ring: Vec<String>,
    components: Vec<Vec<String>>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let manifest = serde_json::json!({
        "ring": ring,
        "entries": [{
            "name": "family",
            "kind": "family",
            "body": {"components": components, "options": {"seed": seed}},
        }],
    });
    let report = run_manifest_text(py, &manifest.to_string(), None)?;
    let entry = report.entries.into_iter().next().expect("one entry");
    to_py(py, &entry.result)
}

/// Runs the built-in corpus against its expectations.
#[pyfunction]
#[pyo3(signature = (seed = None))]
fn run_corpus(py: Python<'_>, seed: Option<u64>) -> PyResult<Py<PyAny>> {
    let (report, outcome) = py
        .detach(|| corpus::run_paper_corpus(seed))
        .map_err(cli_err)?;
    let dict = PyDict::new(py);
    dict.set_item("all_passed", outcome.all_passed)?;
    dict.set_item("summary", outcome.to_text())?;
    dict.set_item("report", to_py(py, &report)?)?;
    Ok(dict.into_any().unbind())
}

#[pymodule]
fn pyequising(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("EquisingError", py.get_type::<EquisingError>())?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("ComputationError", py.get_type::<ComputationError>())?;
    m.add("HypothesisError", py.get_type::<HypothesisError>())?;
    m.add_class::<Ring>()?;
    m.add_class::<Poly>()?;
    m.add_class::<Ideal>()?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(curve_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_family, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    Ok(())
}
