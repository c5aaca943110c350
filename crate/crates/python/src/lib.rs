//! Python bindings. Cartan types are passed as strings such as `"A2"`;
//! structured reports come back as JSON text.

use std::collections::BTreeMap;

use chevcert::chevalley::{self, LieElement};
use chevcert::chevgroup;
use chevcert::filtration::{check_root_height_lemma, ClosureOptions};
use chevcert::irregular;
use chevcert::rootsys::{self, CartanType, CocharVec};
use chevcert::witness::{self, Certification, Selection};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: chevcert::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_type(s: &str) -> PyResult<CartanType> {
    s.parse().map_err(err)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

#[pyclass(name = "RootSystem", frozen)]
struct PyRootSystem {
    inner: rootsys::RootSystem,
}

#[pymethods]
impl PyRootSystem {
    #[new]
    fn new(cartan_type: &str) -> PyResult<Self> {
        Ok(Self { inner: rootsys::build_root_system(parse_type(cartan_type)?) })
    }

    #[getter]
    fn cartan_type(&self) -> String {
        self.inner.cartan_type().to_string()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// All roots in canonical order, as simple-root coefficient lists.
    #[getter]
    fn roots(&self) -> Vec<Vec<i64>> {
        self.inner.roots().iter().map(|r| r.0.clone()).collect()
    }

    #[getter]
    fn num_positive(&self) -> usize {
        self.inner.num_positive()
    }

    #[getter]
    fn highest_root(&self) -> Vec<i64> {
        self.inner.highest_root().0.clone()
    }

    #[getter]
    fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        self.inner.cartan_matrix().to_vec()
    }

    fn cartan_determinant(&self) -> i64 {
        self.inner.cartan_determinant()
    }

    fn coxeter_number(&self) -> u64 {
        self.inner.coxeter_number()
    }

    fn coxeter_element_order(&self) -> u64 {
        self.inner.coxeter_element_order()
    }

    fn pairing(&self, root: Vec<i64>, cochar: Vec<i64>) -> PyResult<i64> {
        rootsys::pairing(&rootsys::Root(root), &CocharVec(cochar)).map_err(err)
    }

    fn to_json(&self) -> String {
        to_json(&self.inner.to_json())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("RootSystem('{}')", self.inner.cartan_type())
    }
}

#[pyclass(name = "ChevalleyBasis", frozen)]
struct PyChevalleyBasis {
    inner: chevalley::ChevalleyBasis,
}

#[pymethods]
impl PyChevalleyBasis {
    #[new]
    fn new(cartan_type: &str) -> PyResult<Self> {
        let rs = rootsys::build_root_system(parse_type(cartan_type)?);
        Ok(Self { inner: chevalley::build_chevalley_basis(&rs) })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// `N_{α,β}` for root indices in canonical order.
    fn structure_constant(&self, a: usize, b: usize) -> PyResult<i64> {
        let n = self.inner.root_system().len();
        if a >= n || b >= n {
            return Err(PyValueError::new_err(format!("root index out of range 0..{n}")));
        }
        Ok(self.inner.structure_constant(a, b))
    }

    fn max_structure_constant(&self) -> u64 {
        chevalley::max_structure_constant(self.inner.root_system())
    }

    fn structure_constants_csv(&self) -> String {
        self.inner.structure_constants_csv()
    }

    /// Bracket of coefficient vectors in the basis `[H_1..H_r, X_roots]`;
    /// `modulus = 0` works over the integers.
    #[pyo3(signature = (x, y, modulus = 0))]
    fn bracket(&self, x: Vec<i64>, y: Vec<i64>, modulus: u64) -> PyResult<Vec<i64>> {
        let r = self.inner.rank();
        let d = self.inner.dim();
        if x.len() != d || y.len() != d {
            return Err(PyValueError::new_err(format!("vectors must have length {d}")));
        }
        let x = LieElement::from_coeffs(r, x, modulus);
        let y = LieElement::from_coeffs(r, y, modulus);
        Ok(self.inner.bracket(&x, &y).map_err(err)?.coeffs)
    }

    /// `H` with `α(H) = ⟨α, λ⟩ mod p`.
    fn cochar_to_toral(&self, cochar: Vec<i64>, p: u64) -> PyResult<Vec<i64>> {
        Ok(chevalley::cochar_to_toral(&self.inner, &CocharVec(cochar), p).map_err(err)?.coeffs)
    }

    /// Whether the root-height lemma holds for `H = cochar_to_toral(λ)`.
    fn root_height_lemma(&self, cochar: Vec<i64>, p: u64) -> PyResult<bool> {
        let h = chevalley::cochar_to_toral(&self.inner, &CocharVec(cochar), p).map_err(err)?;
        Ok(check_root_height_lemma(&self.inner, p, &h, ClosureOptions::default()).map_err(err)?.passed())
    }

    /// Order of the subgroup of the adjoint group over `Z/p^k` generated by `x_{±α_i}(1)`.
    #[pyo3(signature = (p, k, cap = chevgroup::DEFAULT_ENUMERATION_CAP))]
    fn group_order(&self, p: u64, k: u32, cap: usize) -> PyResult<usize> {
        let gens = chevgroup::chevalley_generators(&self.inner, p, k).map_err(err)?;
        Ok(chevgroup::enumerate_subgroup(&gens, cap).map_err(err)?.order())
    }

    /// `(order_adjoint, sc_order_bound, sc_order or None)`.
    fn tits_lift_order(&self) -> (u64, u64, Option<u64>) {
        let t = chevgroup::tits_lift_order(&self.inner);
        (t.order_adjoint, t.sc_order_bound, t.sc_order)
    }
}

#[pyfunction]
fn bernoulli_mod_p(p: u64) -> PyResult<BTreeMap<u64, u64>> {
    irregular::bernoulli_mod_p(p).map_err(err)
}

/// Irregular indices `k` with `p | B_k`.
#[pyfunction]
fn irregular_indices(p: u64) -> PyResult<Vec<u64>> {
    Ok(irregular::index_of_irregularity(p).map_err(err)?.irregular_indices)
}

#[pyfunction]
fn bad_set(p: u64) -> PyResult<Vec<u64>> {
    let irr = irregular::index_of_irregularity(p).map_err(err)?;
    Ok(irregular::bad_set(&irr).members.into_iter().collect())
}

#[pyfunction]
fn density_estimate(r: u32) -> (f64, f64) {
    irregular::irregularity_density_estimate(r)
}

#[pyfunction]
fn n_sequence(cartan_type: &str, upto: usize) -> PyResult<Vec<u128>> {
    let rs = rootsys::build_root_system(parse_type(cartan_type)?);
    Ok(witness::n_sequence(&rs, upto).map_err(err)?.values)
}

/// CheckReport for conditions (1)–(5) as JSON.
#[pyfunction]
fn check_conditions(cartan_type: &str, p: u64, cochar: Vec<i64>) -> PyResult<String> {
    let rs = rootsys::build_root_system(parse_type(cartan_type)?);
    let irr = irregular::index_of_irregularity(p).map_err(err)?;
    Ok(to_json(&witness::check_theorem_conditions(&rs, p, &CocharVec(cochar), &irr).map_err(err)?))
}

/// `(λ, base_index)` or `None`.
#[pyfunction]
fn select_cocharacter(cartan_type: &str, p: u64, e: usize) -> PyResult<Option<(Vec<i64>, usize)>> {
    let rs = rootsys::build_root_system(parse_type(cartan_type)?);
    let irr = irregular::index_of_irregularity(p).map_err(err)?;
    Ok(match witness::select_cocharacter(&rs, p, e, &irr).map_err(err)? {
        Selection::Found { lambda, base_index, .. } => Some((lambda.0, base_index)),
        Selection::NotFound { .. } => None,
    })
}

/// Certificate or rejection as JSON.
#[pyfunction]
fn certify(cartan_type: &str, p: u64, e: usize) -> PyResult<String> {
    let cb = chevalley::build_chevalley_basis(&rootsys::build_root_system(parse_type(cartan_type)?));
    let irr = irregular::index_of_irregularity(p).map_err(err)?;
    Ok(to_json(&witness::certify_one_prime(&cb, p, e, &irr).map_err(err)?))
}

/// Mismatched field names after re-running a certificate; empty means valid.
#[pyfunction]
fn validate_certificate(certificate_json: &str) -> PyResult<Vec<String>> {
    let cert = match serde_json::from_str::<Certification>(certificate_json) {
        Ok(Certification::Certified(c)) => *c,
        Ok(Certification::Rejected(_)) => return Err(PyValueError::new_err("a rejection is not a certificate")),
        Err(e) => return Err(PyValueError::new_err(e.to_string())),
    };
    witness::validate_certificate(&cert).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (cartan_types, ceiling = 1_000_000))]
fn effective_bound(cartan_types: Vec<String>, ceiling: u64) -> PyResult<String> {
    let types: Vec<CartanType> = cartan_types.iter().map(|s| parse_type(s)).collect::<PyResult<_>>()?;
    Ok(to_json(&witness::effective_bound(&types, ceiling).map_err(err)?))
}

#[pymodule]
fn pychevcert(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRootSystem>()?;
    m.add_class::<PyChevalleyBasis>()?;
    m.add_function(wrap_pyfunction!(bernoulli_mod_p, m)?)?;
    m.add_function(wrap_pyfunction!(irregular_indices, m)?)?;
    m.add_function(wrap_pyfunction!(bad_set, m)?)?;
    m.add_function(wrap_pyfunction!(density_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(n_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(check_conditions, m)?)?;
    m.add_function(wrap_pyfunction!(select_cocharacter, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(validate_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(effective_bound, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
