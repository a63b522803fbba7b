//! Python bindings: the algebra/form/vector types and the main
//! verification entry points. Reports cross the boundary as JSON strings
//! with exact scalars rendered as canonical literals.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pcontact_core::algebra::AlgebraSpec;
use pcontact_core::cohomology;
use pcontact_core::deformation;
use pcontact_core::dsl;
use pcontact_core::error::CoreError;
use pcontact_core::exterior::{Form, VectorForm};
use pcontact_core::geometry;
use pcontact_core::structure;
use pcontact_core::suites;

fn err(e: CoreError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// A validated nilpotent complex Lie algebra with its holomorphic coframe.
#[pyclass(name = "Algebra", from_py_object)]
#[derive(Clone)]
struct PyAlgebra {
    inner: Arc<AlgebraSpec>,
}

#[pymethods]
impl PyAlgebra {
    /// Parses DSL source defining exactly one algebra.
    #[staticmethod]
    fn parse(source: &str) -> PyResult<Self> {
        let inner = dsl::parse_algebra(source).map_err(err)?;
        Ok(PyAlgebra { inner })
    }

    /// The n-dimensional abelian algebra (complex torus).
    #[staticmethod]
    fn torus(name: &str, n: usize) -> PyResult<Self> {
        if n == 0 || n > pcontact_core::exterior::MAX_DIM {
            return Err(PyValueError::new_err("dimension out of range"));
        }
        Ok(PyAlgebra { inner: AlgebraSpec::torus(name, n) })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn parallelisable(&self) -> bool {
        self.inner.parallelisable()
    }

    /// Validation certificate (d² = 0, nilpotency filtration) as JSON.
    fn validate(&self) -> PyResult<String> {
        json(&self.inner.validate())
    }

    /// Parses a form expression on this algebra.
    fn form(&self, expr: &str) -> PyResult<PyForm> {
        Ok(PyForm { inner: dsl::parse_form_expr(&self.inner, expr).map_err(err)? })
    }

    /// Parses a vector expression on this algebra.
    fn vector(&self, expr: &str) -> PyResult<PyVectorForm> {
        Ok(PyVectorForm { inner: dsl::parse_vector_expr(&self.inner, expr).map_err(err)? })
    }

    /// The algebra serialized back through the DSL grammar.
    fn serialize(&self) -> String {
        dsl::serialize_algebra(&self.inner)
    }

    /// Invariant Frölicher page tables as JSON.
    fn froelicher(&self) -> PyResult<String> {
        json(&cohomology::froelicher_report(&self.inner))
    }

    /// Symbolic non-existence proof for contact structures, as JSON.
    fn no_invariant_contact(&self) -> PyResult<String> {
        json(&geometry::no_invariant_contact(&self.inner).map_err(err)?)
    }

    /// Symbolic non-existence proof for symplectic structures, as JSON.
    fn no_invariant_symplectic(&self) -> PyResult<String> {
        json(&geometry::no_invariant_symplectic(&self.inner).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Algebra({}, dim {})", self.inner.name, self.inner.n)
    }
}

/// A sparse invariant form with exact Gaussian-rational coefficients.
#[pyclass(name = "Form", from_py_object)]
#[derive(Clone)]
struct PyForm {
    inner: Form,
}

#[pymethods]
impl PyForm {
    fn wedge(&self, other: &PyForm) -> PyForm {
        PyForm { inner: self.inner.wedge(&other.inner) }
    }

    fn d(&self) -> PyForm {
        PyForm { inner: self.inner.d() }
    }

    fn del(&self) -> PyForm {
        PyForm { inner: self.inner.del() }
    }

    fn delbar(&self) -> PyForm {
        PyForm { inner: self.inner.delbar() }
    }

    fn conj(&self) -> PyForm {
        PyForm { inner: self.inner.conj() }
    }

    fn add(&self, other: &PyForm) -> PyForm {
        PyForm { inner: self.inner.add(&other.inner) }
    }

    fn neg(&self) -> PyForm {
        PyForm { inner: self.inner.neg() }
    }

    /// Scales by an exact scalar literal such as `-3/2+1/4i`.
    fn scale(&self, literal: &str) -> PyResult<PyForm> {
        let c = pcontact_core::scalar::GaussRat::parse_literal(literal).map_err(err)?;
        Ok(PyForm { inner: self.inner.scale(&c) })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// `(p, q)` for a homogeneous form, `None` for a genuinely mixed one.
    fn bidegree(&self) -> Option<(usize, usize)> {
        match self.inner.bidegree() {
            pcontact_core::exterior::Bidegree::Zero => Some((0, 0)),
            pcontact_core::exterior::Bidegree::Pure(p, q) => Some((p, q)),
            pcontact_core::exterior::Bidegree::Mixed => None,
        }
    }

    fn __str__(&self) -> String {
        dsl::serialize_form_expr(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Form({})", dsl::serialize_form_expr(&self.inner))
    }

    fn __eq__(&self, other: &PyForm) -> bool {
        self.inner == other.inner
    }
}

/// A `T^{1,0}`-valued invariant (0,q)-form.
#[pyclass(name = "VectorForm", from_py_object)]
#[derive(Clone)]
struct PyVectorForm {
    inner: VectorForm,
}

#[pymethods]
impl PyVectorForm {
    #[getter]
    fn q(&self) -> usize {
        self.inner.q()
    }

    fn contract(&self, form: &PyForm) -> PyForm {
        PyForm { inner: self.inner.contract(&form.inner) }
    }

    fn lie(&self, form: &PyForm) -> PyForm {
        PyForm { inner: self.inner.lie(&form.inner) }
    }

    fn delbar(&self) -> PyResult<PyVectorForm> {
        Ok(PyVectorForm { inner: self.inner.delbar().map_err(err)? })
    }

    fn bracket(&self, other: &PyVectorForm) -> PyResult<PyVectorForm> {
        Ok(PyVectorForm { inner: self.inner.bracket(&other.inner).map_err(err)? })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __str__(&self) -> String {
        dsl::serialize_vector_expr(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("VectorForm({})", dsl::serialize_vector_expr(&self.inner))
    }

    fn __eq__(&self, other: &PyVectorForm) -> bool {
        self.inner == other.inner
    }
}

/// p-contact certificate as JSON: validity, exact top coefficient, failures.
#[pyfunction]
fn verify_p_contact(algebra: &PyAlgebra, gamma: &PyForm) -> PyResult<String> {
    json(&geometry::check_p_contact(&algebra.inner, &gamma.inner).map_err(err)?)
}

/// s-symplectic certificate as JSON.
#[pyfunction]
fn verify_s_symplectic(algebra: &PyAlgebra, omega: &PyForm) -> PyResult<String> {
    json(&geometry::check_s_symplectic(&algebra.inner, &omega.inner).map_err(err)?)
}

/// Kernel ranks, splitting checks and integrability as JSON.
#[pyfunction]
fn kernels(gamma: &PyForm) -> PyResult<String> {
    let f = geometry::kernel_f(&gamma.inner);
    let g = geometry::kernel_g(&gamma.inner);
    let (split, _) = geometry::splitting_checks(&gamma.inner);
    let integrable = if gamma.inner.algebra().parallelisable() {
        Some(geometry::g_integrability(&gamma.inner).map_err(err)?)
    } else {
        None
    };
    json(&serde_json::json!({
        "rank_f": f.rank(),
        "rank_g": g.rank(),
        "basis_f": f.basis_fields().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "basis_g": g.basis_fields().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "splitting": serde_json::to_value(&split).unwrap(),
        "g_integrability": integrable.map(|r| serde_json::to_value(&r).unwrap()),
    }))
}

/// Runs the unobstructedness recursion and the Maurer–Cartan verification;
/// returns the series (vector DSL syntax), certificates and the report as
/// JSON.
#[pyfunction]
#[pyo3(signature = (gamma, psi1, max_order = 8))]
fn deform(gamma: &PyForm, psi1: &PyVectorForm, max_order: usize) -> PyResult<String> {
    let flags = geometry::predicates(&psi1.inner, &gamma.inner);
    let seed = if flags.constantly_horizontal {
        psi1.inner.clone()
    } else {
        deformation::horizontal_representative(&psi1.inner, &gamma.inner).map_err(err)?.0
    };
    let series = deformation::run_recursion(&seed, max_order, &gamma.inner).map_err(err)?;
    let mc = deformation::verify_maurer_cartan(&series).map_err(err)?;
    let space = deformation::essential_horizontal_space(&gamma.inner).map_err(err)?;
    json(&serde_json::json!({
        "essential_horizontal_dim": space.dim,
        "terminated": series.terminated,
        "step2_key_identity": series.step2_key_identity,
        "psi": series.psi.iter().map(dsl::serialize_vector_expr).collect::<Vec<_>>(),
        "certificates": serde_json::to_value(&series.certificates).unwrap(),
        "maurer_cartan": serde_json::to_value(&mc).unwrap(),
    }))
}

/// Builds the torus-base fibration instance and verifies the structure
/// theorem on it; returns the full report as JSON.
#[pyfunction]
#[pyo3(signature = (l = 1, sigma = "zero"))]
fn structure_theorem_demo(l: usize, sigma: &str) -> PyResult<String> {
    let base = AlgebraSpec::torus("torus-base", 4 * l);
    let omega = structure::half_volume_symplectic(&base);
    let sig = match sigma {
        "zero" => Form::zero(&base),
        "phi12" => Form::generator(&base, 1).wedge(&Form::generator(&base, 2)),
        other => return Err(PyValueError::new_err(format!("unknown sigma '{other}'"))),
    };
    let inst = structure::build_fibred_contact(&base, &omega, &sig).map_err(err)?;
    json(&structure::verify_structure_theorem(&inst.fibration, &inst.gamma).map_err(err)?)
}

/// Runs the identity suites on one algebra with a seeded sampler.
#[pyfunction]
#[pyo3(signature = (algebra, seed = 0, samples = 50))]
fn identity_suites(algebra: &PyAlgebra, seed: u64, samples: usize) -> PyResult<String> {
    if !algebra.inner.parallelisable() {
        return Err(PyValueError::new_err("identity suites need a parallelisable algebra"));
    }
    let top = suites::volume_form(&algebra.inner);
    json(&suites::run_identity_suites(&algebra.inner, &top, seed, samples))
}

#[pymodule]
fn pcontact(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyForm>()?;
    m.add_class::<PyVectorForm>()?;
    m.add_function(wrap_pyfunction!(verify_p_contact, m)?)?;
    m.add_function(wrap_pyfunction!(verify_s_symplectic, m)?)?;
    m.add_function(wrap_pyfunction!(kernels, m)?)?;
    m.add_function(wrap_pyfunction!(deform, m)?)?;
    m.add_function(wrap_pyfunction!(structure_theorem_demo, m)?)?;
    m.add_function(wrap_pyfunction!(identity_suites, m)?)?;
    Ok(())
}
