//! Python bindings: the main types and operations of `cuspcert-core` exposed
//! as a thin extension module. Forms wrap the exact Rust values; structured
//! reports (complement certificates, presentations, witness certificates)
//! cross the boundary as their canonical JSON strings, and small results as
//! plain dicts and tuples. All numbers stay exact end to end.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cuspcert_core::arith::{self, parse_rational, Place};
use cuspcert_core::bieberbach;
use cuspcert_core::equivalence::{self, ProjectiveVerdict};
use cuspcert_core::error::Error;
use cuspcert_core::forms::{lorentz_j, DiagonalForm, Signature};
use cuspcert_core::local;
use cuspcert_core::pipeline::{
    self, CommensurabilityCertificate, ComplementReport, CuspProperty, PresentationJson,
    WitnessOptions, DEFAULT_GHW_BOUND,
};
use cuspcert_core::realization::{self, TargetProfile};
use cuspcert_core::SquareClass;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_place(s: &str) -> PyResult<Place> {
    s.parse().map_err(err)
}

/// A non-degenerate diagonal rational quadratic form.
#[pyclass(frozen)]
#[derive(Clone)]
struct Form {
    inner: DiagonalForm,
}

#[pymethods]
impl Form {
    /// Build from "<a1,...,an>" or from a list of rational strings/ints.
    #[new]
    fn new(spec: Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(text) = spec.extract::<String>() {
            return Ok(Form {
                inner: DiagonalForm::parse(&text).map_err(err)?,
            });
        }
        let items: Vec<Bound<'_, PyAny>> = spec.extract()?;
        let mut coefficients = Vec::with_capacity(items.len());
        for item in items {
            let text = if let Ok(n) = item.extract::<i64>() {
                n.to_string()
            } else {
                item.extract::<String>()?
            };
            coefficients.push(parse_rational(&text).map_err(err)?);
        }
        Ok(Form {
            inner: DiagonalForm::new(coefficients).map_err(err)?,
        })
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn signature(&self) -> (usize, usize) {
        let s = self.inner.signature();
        (s.pos, s.neg)
    }

    fn discriminant(&self) -> String {
        self.inner.discriminant().to_string()
    }

    fn coefficients(&self) -> Vec<String> {
        self.inner
            .coefficients()
            .iter()
            .map(|c| c.to_string())
            .collect()
    }

    /// Complete invariant profile as a dict.
    fn invariants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = local::profile(&self.inner);
        let d = PyDict::new(py);
        d.set_item("rank", p.rank)?;
        d.set_item("sig", (p.signature.pos, p.signature.neg))?;
        d.set_item("disc", p.discriminant.to_string())?;
        d.set_item(
            "neg_places",
            p.negative_places
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>(),
        )?;
        Ok(d)
    }

    fn scale(&self, c: &str) -> PyResult<Form> {
        let c = parse_rational(c).map_err(err)?;
        Ok(Form {
            inner: self.inner.scale(&c).map_err(err)?,
        })
    }

    fn direct_sum(&self, other: &Form) -> Form {
        Form {
            inner: self.inner.direct_sum(&other.inner),
        }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Form({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Form) -> bool {
        self.inner == other.inner
    }
}

/// The Lorentzian form <1,...,1,-1> of the given rank.
#[pyfunction]
fn lorentz(rank: usize) -> PyResult<Form> {
    if rank < 2 {
        return Err(PyValueError::new_err("rank must be >= 2"));
    }
    Ok(Form {
        inner: lorentz_j(rank),
    })
}

#[pyfunction]
fn square_class(r: &str) -> PyResult<String> {
    let r = parse_rational(r).map_err(err)?;
    Ok(arith::square_class(&r).map_err(err)?.to_string())
}

#[pyfunction]
fn legendre(a: i64, p: u64) -> PyResult<i32> {
    arith::legendre(&a.into(), &p.into()).map_err(err)
}

#[pyfunction]
fn is_local_square(r: &str, place: &str) -> PyResult<bool> {
    let r = parse_rational(r).map_err(err)?;
    arith::is_local_square(&r, &parse_place(place)?).map_err(err)
}

#[pyfunction]
fn hilbert(a: &str, b: &str, place: &str) -> PyResult<i32> {
    let a = parse_rational(a).map_err(err)?;
    let b = parse_rational(b).map_err(err)?;
    local::hilbert(&a, &b, &parse_place(place)?).map_err(err)
}

#[pyfunction]
fn hasse_witt(f: &Form, place: &str) -> PyResult<i32> {
    Ok(local::hasse_witt(&f.inner, &parse_place(place)?))
}

#[pyfunction]
fn rationally_equivalent(f: &Form, g: &Form) -> bool {
    equivalence::rationally_equivalent(&f.inner, &g.inner)
}

fn verdict_dict<'py>(py: Python<'py>, v: &ProjectiveVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("equivalent", v.equivalent)?;
    d.set_item(
        "witness",
        v.scalar_witness.as_ref().map(|c| c.to_string()),
    )?;
    match &v.obstruction {
        None => d.set_item("obstruction", py.None())?,
        Some(o) => {
            d.set_item(
                "obstruction",
                (o.place.to_string(), o.invariant.to_string()),
            )?;
        }
    }
    Ok(d)
}

#[pyfunction]
fn projectively_equivalent<'py>(
    py: Python<'py>,
    f: &Form,
    g: &Form,
) -> PyResult<Bound<'py, PyDict>> {
    let v = equivalence::projectively_equivalent(&f.inner, &g.inner).map_err(err)?;
    verdict_dict(py, &v)
}

#[pyfunction]
fn commensurable<'py>(py: Python<'py>, f: &Form, g: &Form) -> PyResult<Bound<'py, PyDict>> {
    let v = equivalence::commensurable(&f.inner, &g.inner).map_err(err)?;
    verdict_dict(py, &v)
}

fn build_target(
    rank: usize,
    sig: (usize, usize),
    disc: &str,
    neg_places: Vec<String>,
) -> PyResult<TargetProfile> {
    let disc = parse_rational(disc).map_err(err)?;
    let discriminant = SquareClass::of(&disc).map_err(err)?;
    let mut places = std::collections::BTreeSet::new();
    for p in neg_places {
        places.insert(parse_place(&p)?);
    }
    Ok(TargetProfile {
        rank,
        signature: Signature {
            pos: sig.0,
            neg: sig.1,
        },
        discriminant,
        negative_places: places,
    })
}

/// The five existence conditions; returns (feasible, violated_conditions).
#[pyfunction]
#[pyo3(signature = (rank, sig, disc, neg_places=vec![]))]
fn serre_feasible(
    rank: usize,
    sig: (usize, usize),
    disc: &str,
    neg_places: Vec<String>,
) -> PyResult<(bool, Vec<u8>)> {
    Ok(realization::serre_feasible(&build_target(
        rank, sig, disc, neg_places,
    )?))
}

#[pyfunction]
#[pyo3(signature = (rank, sig, disc, neg_places=vec![]))]
fn realize(
    rank: usize,
    sig: (usize, usize),
    disc: &str,
    neg_places: Vec<String>,
) -> PyResult<Form> {
    let t = build_target(rank, sig, disc, neg_places)?;
    Ok(Form {
        inner: realization::realize(&t).map_err(err)?,
    })
}

/// Positive definite complement; returns (complement_form, report_json).
#[pyfunction]
fn complement(f: &Form) -> PyResult<(Form, String)> {
    let (qp, cert) = realization::definite_complement(&f.inner).map_err(err)?;
    let report = ComplementReport::from_certificate(&cert);
    Ok((
        Form { inner: qp },
        serde_json_string(&report)?,
    ))
}

#[pyfunction]
fn im_kim(n: usize) -> PyResult<String> {
    let p = bieberbach::im_kim(n).map_err(err)?;
    serde_json_string(&PresentationJson::from_presentation(&p))
}

#[pyfunction]
fn product_with_circle(presentation_json: &str) -> PyResult<String> {
    let pj: PresentationJson =
        serde_json::from_str(presentation_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let p = pj.to_presentation().map_err(err)?;
    let circled = bieberbach::product_with_circle(&p);
    serde_json_string(&PresentationJson::from_presentation(&circled))
}

/// Closure plus all predicates over a presentation JSON; returns report JSON.
#[pyfunction]
fn flat_check(presentation_json: &str) -> PyResult<String> {
    let pj: PresentationJson =
        serde_json::from_str(presentation_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let p = pj.to_presentation().map_err(err)?;
    serde_json_string(&pipeline::flat_check(&p).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (dim, bound=DEFAULT_GHW_BOUND))]
fn ghw_search(dim: usize, bound: u64) -> PyResult<Option<String>> {
    match bieberbach::ghw_search(dim, bound).map_err(err)? {
        None => Ok(None),
        Some(p) => Ok(Some(serde_json_string(&PresentationJson::from_presentation(
            &p,
        ))?)),
    }
}

/// Full witness certificate as JSON.
#[pyfunction]
#[pyo3(signature = (m, form, property, ghw_bound=DEFAULT_GHW_BOUND, complement_form=None))]
fn cusp_witness(
    m: usize,
    form: &Form,
    property: &str,
    ghw_bound: u64,
    complement_form: Option<&Form>,
) -> PyResult<String> {
    let property = CuspProperty::parse(property).map_err(err)?;
    let opts = WitnessOptions {
        ghw_bound,
        complement_override: complement_form.map(|f| f.inner.clone()),
    };
    let cert = pipeline::cusp_witness(m, &form.inner, property, &opts).map_err(err)?;
    Ok(cert.to_json())
}

/// Recompute every derivable field; returns (ok, mismatches).
#[pyfunction]
fn verify_certificate(cert_json: &str) -> PyResult<(bool, Vec<String>)> {
    let cert = CommensurabilityCertificate::from_json(cert_json).map_err(err)?;
    let report = pipeline::verify_certificate(&cert);
    Ok((report.ok, report.mismatches))
}

fn serde_json_string<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn cuspcert(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Form>()?;
    m.add_function(wrap_pyfunction!(lorentz, m)?)?;
    m.add_function(wrap_pyfunction!(square_class, m)?)?;
    m.add_function(wrap_pyfunction!(legendre, m)?)?;
    m.add_function(wrap_pyfunction!(is_local_square, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(hasse_witt, m)?)?;
    m.add_function(wrap_pyfunction!(rationally_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(projectively_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(commensurable, m)?)?;
    m.add_function(wrap_pyfunction!(serre_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(complement, m)?)?;
    m.add_function(wrap_pyfunction!(im_kim, m)?)?;
    m.add_function(wrap_pyfunction!(product_with_circle, m)?)?;
    m.add_function(wrap_pyfunction!(flat_check, m)?)?;
    m.add_function(wrap_pyfunction!(ghw_search, m)?)?;
    m.add_function(wrap_pyfunction!(cusp_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add("DEFAULT_GHW_BOUND", DEFAULT_GHW_BOUND)?;
    Ok(())
}
