//! Python bindings: spaces, classes, bundles, operations, embeddings,
//! proper maps and the identity checks.

use std::sync::Arc;

use charcalc::catalog::{EmbeddingSpec, MapSpec};
use charcalc::chern::{self, whitney_sum};
use charcalc::expr::{parse, resolve_operation, EvalContext, Value};
use charcalc::operations::{self, apply_operation};
use charcalc::pushforward::{self, compose_pushforward, embed_pushforward};
use charcalc::spaces::{self, restrict, CoefficientMode, ThomModule};
use charcalc::{verify, Elem as CoreElem, Error, Prime};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(charcalc_py, CharcalcError, PyException);
create_exception!(charcalc_py, NotWellDefinedError, CharcalcError);
create_exception!(charcalc_py, NotInvertibleError, CharcalcError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NotWellDefined { .. } => NotWellDefinedError::new_err(e.to_string()),
        Error::NotInvertible => NotInvertibleError::new_err(e.to_string()),
        Error::Usage(_) | Error::Syntax { .. } | Error::NotPrime(_) => PyValueError::new_err(e.to_string()),
        _ => CharcalcError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for Result<T, Error> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn prime(p: u32) -> PyResult<Prime> {
    Prime::new(p).py()
}

fn mode(weight_unit: bool) -> CoefficientMode {
    if weight_unit {
        CoefficientMode::WeightUnit
    } else {
        CoefficientMode::PurePoint
    }
}

/// A class in the cohomology ring of a space.
#[pyclass(name = "Elem", module = "charcalc_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyElem(CoreElem);

#[pymethods]
impl PyElem {
    fn __add__(&self, other: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(self.0.checked_add(&other.0).py()?))
    }

    fn __sub__(&self, other: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(self.0.checked_sub(&other.0).py()?))
    }

    fn __mul__(&self, other: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(self.0.checked_mul(&other.0).py()?))
    }

    fn __neg__(&self) -> PyElem {
        PyElem(self.0.neg())
    }

    fn __pow__(&self, k: u32, _modulo: Option<u32>) -> PyElem {
        PyElem(self.0.pow(k))
    }

    fn __eq__(&self, other: &PyElem) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Elem({})", self.0)
    }

    fn scale(&self, c: i64) -> PyElem {
        PyElem(self.0.scale(c))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Homogeneous components keyed by bidegree.
    fn components(&self) -> Vec<((i32, i32), PyElem)> {
        self.0
            .components()
            .into_iter()
            .map(|(d, c)| ((d.0, d.1), PyElem(c)))
            .collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

#[pyclass(name = "Bundle", module = "charcalc_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBundle(chern::Bundle);

#[pymethods]
impl PyBundle {
    /// A bundle given by its total Chern class.
    #[new]
    fn new(name: &str, rank: usize, total: &PyElem) -> PyResult<PyBundle> {
        Ok(PyBundle(chern::Bundle::new(name, rank, total.0.clone()).py()?))
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn total(&self) -> PyElem {
        PyElem(self.0.total().clone())
    }

    fn chern_class(&self, i: usize) -> PyElem {
        PyElem(self.0.chern_class(i))
    }

    fn top_chern_class(&self) -> PyElem {
        PyElem(self.0.top_chern_class())
    }

    fn __add__(&self, other: &PyBundle) -> PyResult<PyBundle> {
        Ok(PyBundle(whitney_sum(&self.0, &other.0).py()?))
    }

    fn __repr__(&self) -> String {
        format!("Bundle({}, rank {}, c = {})", self.0.name(), self.0.rank(), self.0.total())
    }
}

#[pyclass(name = "Space", module = "charcalc_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpace(Arc<spaces::Space>);

#[pymethods]
impl PySpace {
    #[staticmethod]
    #[pyo3(signature = (prime, weight_unit = false))]
    fn point(prime: u32, weight_unit: bool) -> PyResult<PySpace> {
        Ok(PySpace(spaces::point(self::prime(prime)?, mode(weight_unit)).py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (n, prime, weight_unit = false))]
    fn projective(n: usize, prime: u32, weight_unit: bool) -> PyResult<PySpace> {
        Ok(PySpace(spaces::projective_space(n, self::prime(prime)?, mode(weight_unit)).py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (k, n, prime, weight_unit = false))]
    fn grassmannian(k: usize, n: usize, prime: u32, weight_unit: bool) -> PyResult<PySpace> {
        Ok(PySpace(spaces::grassmannian(k, n, self::prime(prime)?, mode(weight_unit)).py()?))
    }

    fn __mul__(&self, other: &PySpace) -> PyResult<PySpace> {
        Ok(PySpace(spaces::product(&self.0, &other.0).py()?))
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn prime(&self) -> u32 {
        self.0.prime().get()
    }

    fn generators(&self) -> Vec<String> {
        self.0.ring().generators().iter().map(|g| g.name.clone()).collect()
    }

    /// Monomial basis, one entry per nonzero bidegree.
    fn basis(&self) -> Vec<((i32, i32), Vec<String>)> {
        let ring = self.0.ring();
        ring.basis_table()
            .into_iter()
            .map(|(d, ms)| ((d.0, d.1), ms.iter().map(|m| ring.format_monomial(m)).collect()))
            .collect()
    }

    fn dimension(&self, i: i32, j: i32) -> usize {
        self.0.ring().dimension(charcalc::Bidegree(i, j))
    }

    fn tangent(&self) -> Option<PyBundle> {
        self.0.tangent().cloned().map(PyBundle)
    }

    fn bundles(&self) -> Vec<PyBundle> {
        self.0.bundles().iter().cloned().map(PyBundle).collect()
    }

    fn bundle(&self, name: &str) -> PyResult<PyBundle> {
        self.0
            .bundle(name)
            .cloned()
            .map(PyBundle)
            .ok_or_else(|| PyValueError::new_err(format!("{} has no bundle `{name}`", self.0)))
    }

    fn one(&self) -> PyElem {
        PyElem(CoreElem::one(self.0.ring()))
    }

    /// Evaluates an expression such as `"u^2 + c1(T)"` in this ring.
    fn element(&self, expr: &str) -> PyResult<PyElem> {
        let mut ctx = EvalContext::new(self.0.ring());
        let bundles: Vec<chern::Bundle> = self.0.bundles().iter().cloned().chain(self.0.tangent().cloned()).collect();
        ctx.bundles = bundles.iter().map(|b| (b.name().to_string(), b)).collect();
        ctx.genus_bundle = self.0.tangent();
        match ctx.eval(&parse(expr).py()?).py()? {
            Value::Plain(x) => Ok(PyElem(x)),
            _ => Err(PyValueError::new_err("expression does not denote a ring element")),
        }
    }

    fn __repr__(&self) -> String {
        format!("Space({}, dim {}, F_{})", self.0, self.0.dim(), self.0.prime())
    }
}

/// A stable cohomology operation: `qmodl`, `qmodp`, `pmotivic`, `identity`
/// or `custom:<series in u>`.
#[pyclass(name = "Operation", module = "charcalc_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyOperation(operations::Operation);

#[pymethods]
impl PyOperation {
    #[new]
    #[pyo3(signature = (name, prime, char_p = None))]
    fn new(name: &str, prime: u32, char_p: Option<bool>) -> PyResult<PyOperation> {
        let char_p = char_p.unwrap_or(name == "qmodp");
        Ok(PyOperation(resolve_operation(name, self::prime(prime)?, char_p).py()?))
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    fn series(&self, order: usize) -> String {
        self.0.series(order).to_string()
    }

    fn apply(&self, x: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(apply_operation(&self.0, &x.0).py()?))
    }

    fn has_todd_genus(&self) -> bool {
        chern::has_well_defined_todd_genus(&self.0)
    }

    /// `itd_φ(E)`.
    fn inverse_todd(&self, e: &PyBundle) -> PyResult<PyElem> {
        let g = chern::inverse_todd_of_operation(&self.0, e.0.ring().top_weight() as usize).py()?;
        Ok(PyElem(chern::evaluate_genus(&g, &e.0).py()?))
    }

    /// `td_φ(E)`; raises `NotWellDefinedError` without a Todd genus.
    fn todd(&self, e: &PyBundle) -> PyResult<PyElem> {
        let g = chern::todd_of_operation(&self.0, e.0.ring().top_weight() as usize).py()?;
        Ok(PyElem(chern::evaluate_genus(&g, &e.0).py()?))
    }

    fn __repr__(&self) -> String {
        format!("Operation({})", self.0.label())
    }
}

/// Closed embedding with its Thom module.
#[pyclass(name = "Embedding", module = "charcalc_py", frozen, skip_from_py_object)]
struct PyEmbedding(Arc<ThomModule>);

#[pymethods]
impl PyEmbedding {
    /// Linear `Pᵐ ↪ Pⁿ`.
    #[staticmethod]
    #[pyo3(signature = (m, n, prime, weight_unit = false))]
    fn linear(m: usize, n: usize, prime: u32, weight_unit: bool) -> PyResult<PyEmbedding> {
        let spec = EmbeddingSpec::Linear { m, n };
        Ok(PyEmbedding(spec.build(self::prime(prime)?, mode(weight_unit)).py()?))
    }

    /// Graph of a linear `Pᵐ → Pⁿ` inside `Pᵐ × Pⁿ`.
    #[staticmethod]
    #[pyo3(signature = (m, n, prime, weight_unit = false))]
    fn graph(m: usize, n: usize, prime: u32, weight_unit: bool) -> PyResult<PyEmbedding> {
        let spec = EmbeddingSpec::GraphOfLinear { m, n };
        Ok(PyEmbedding(spec.build(self::prime(prime)?, mode(weight_unit)).py()?))
    }

    #[getter]
    fn source(&self) -> PySpace {
        PySpace(self.0.source().clone())
    }

    #[getter]
    fn target(&self) -> PySpace {
        PySpace(self.0.target().clone())
    }

    fn normal(&self) -> PyBundle {
        PyBundle(self.0.normal().clone())
    }

    fn push(&self, a: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(embed_pushforward(&self.0, &a.0).py()?))
    }

    fn restrict(&self, b: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(restrict(&b.0, self.0.data()).py()?))
    }

    fn __repr__(&self) -> String {
        format!("Embedding({})", self.0.name())
    }
}

/// Proper map factored as a closed embedding followed by a projection.
#[pyclass(name = "ProperMap", module = "charcalc_py", frozen, skip_from_py_object)]
struct PyProperMap(pushforward::ProperMap);

#[pymethods]
impl PyProperMap {
    /// `Pᵐ → pt`, factored through a linear `Pᵐ ↪ P^via`.
    #[staticmethod]
    #[pyo3(signature = (m, prime, via = None, weight_unit = false))]
    fn to_point(m: usize, prime: u32, via: Option<usize>, weight_unit: bool) -> PyResult<PyProperMap> {
        let spec = MapSpec::ToPoint { m, via: via.unwrap_or(m) };
        Ok(PyProperMap(spec.build(self::prime(prime)?, mode(weight_unit)).py()?))
    }

    /// `P^base × P^fibre → P^base`.
    #[staticmethod]
    #[pyo3(signature = (base, fibre, prime, weight_unit = false))]
    fn projection(base: usize, fibre: usize, prime: u32, weight_unit: bool) -> PyResult<PyProperMap> {
        let spec = MapSpec::Projection { base, fibre };
        Ok(PyProperMap(spec.build(self::prime(prime)?, mode(weight_unit)).py()?))
    }

    /// `P¹ × P¹ → P¹` supported on the graph of a degree-`d` self-map.
    #[staticmethod]
    fn power_graph(d: u32, prime: u32) -> PyResult<PyProperMap> {
        let spec = MapSpec::PowerGraph { d };
        Ok(PyProperMap(spec.build(self::prime(prime)?, CoefficientMode::PurePoint).py()?))
    }

    #[getter]
    fn source(&self) -> PySpace {
        PySpace(self.0.source().clone())
    }

    #[getter]
    fn target(&self) -> PySpace {
        PySpace(self.0.target().clone())
    }

    #[getter]
    fn degree(&self) -> u64 {
        self.0.degree()
    }

    fn push(&self, a: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(compose_pushforward(&self.0, &a.0).py()?))
    }

    fn __repr__(&self) -> String {
        format!("ProperMap({})", self.0.name)
    }
}

#[pyfunction]
fn bockstein(x: &PyElem) -> PyResult<PyElem> {
    Ok(PyElem(operations::bockstein(&x.0).py()?.0))
}

/// Each check returns its report as a JSON string.
#[pyfunction]
fn check_wu(e: &PyEmbedding, op: &PyOperation, a: &PyElem) -> PyResult<String> {
    Ok(verify::check_wu(&e.0, &op.0, &a.0).py()?.to_json())
}

#[pyfunction]
fn check_grr(f: &PyProperMap, op: &PyOperation, a: &PyElem) -> PyResult<String> {
    Ok(verify::check_grr(&f.0, &op.0, &a.0).py()?.to_json())
}

#[pyfunction]
fn check_vanishing(e: &PyEmbedding, op: &PyOperation, s: u32) -> PyResult<String> {
    Ok(verify::check_vanishing_on_thom(&e.0, &op.0, s).py()?.to_json())
}

#[pyfunction]
fn check_transfer(f: &PyProperMap, op: &PyOperation) -> PyResult<String> {
    Ok(verify::check_resolution_transfer(&f.0, &op.0).py()?.to_json())
}

#[pyfunction]
fn check_degree_reasons(n: u32, s: u32, prime: u32) -> PyResult<String> {
    Ok(verify::check_degree_reasons(n, s, self::prime(prime)?).py()?.to_json())
}

/// Runs the aggregate suite and returns the suite report as JSON.
#[pyfunction]
#[pyo3(signature = (prime, max_dim = 4))]
fn verify_all(py: Python<'_>, prime: u32, max_dim: usize) -> PyResult<String> {
    let p = self::prime(prime)?;
    let suite = py.detach(|| verify::verify_all(p, max_dim)).py()?;
    Ok(suite.to_json())
}

#[pymodule]
fn charcalc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyElem>()?;
    m.add_class::<PyBundle>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PyOperation>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_class::<PyProperMap>()?;
    m.add_function(wrap_pyfunction!(bockstein, m)?)?;
    m.add_function(wrap_pyfunction!(check_wu, m)?)?;
    m.add_function(wrap_pyfunction!(check_grr, m)?)?;
    m.add_function(wrap_pyfunction!(check_vanishing, m)?)?;
    m.add_function(wrap_pyfunction!(check_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(check_degree_reasons, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    m.add("CharcalcError", m.py().get_type::<CharcalcError>())?;
    m.add("NotWellDefinedError", m.py().get_type::<NotWellDefinedError>())?;
    m.add("NotInvertibleError", m.py().get_type::<NotInvertibleError>())?;
    m.add("OUTPUT_SCHEMA", charcalc::cli::OUTPUT_SCHEMA)?;
    Ok(())
}
