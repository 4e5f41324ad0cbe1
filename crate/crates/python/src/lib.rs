//! Python bindings. Modes cross the boundary as integer tuples: the lattice
//! vector on a torus, `(degree, order)` on the sphere.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use quasimode_lab::bounds::{self, Variant};
use quasimode_lab::field::{self, SpectralField};
use quasimode_lab::lab::{self, ExperimentConfig, ExperimentKind, LogCorrection};
use quasimode_lab::project::{self, RemainderNorm};
use quasimode_lab::quasimode::{self, Extremal, Family, Weights};
use quasimode_lab::spectra::{self, Label, Mode, SpectralModel};

fn err(e: quasimode_lab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode_from(model: &SpectralModel, label: &[i64]) -> PyResult<Mode> {
    let bad = || PyValueError::new_err(format!("label {label:?} is not a mode of {model:?}"));
    let mode = if model.is_torus() {
        if label.len() != model.dimension() {
            return Err(bad());
        }
        let k: Vec<i32> = label.iter().map(|&c| i32::try_from(c).map_err(|_| bad())).collect::<PyResult<_>>()?;
        Mode::lattice(&k)
    } else {
        let [l, m] = label else { return Err(bad()) };
        let degree = u32::try_from(*l).map_err(|_| bad())?;
        let order = i32::try_from(*m).map_err(|_| bad())?;
        if order.unsigned_abs() > degree {
            return Err(bad());
        }
        Mode::harmonic(degree, order)
    };
    Ok(mode)
}

fn label_of(model: &SpectralModel, mode: &Mode) -> Vec<i64> {
    match mode.label() {
        Label::Lattice(k) => k[..model.dimension()].iter().map(|&c| c as i64).collect(),
        Label::Harmonic { degree, order } => vec![degree as i64, order as i64],
    }
}

#[pyclass(name = "Model", frozen, from_py_object)]
#[derive(Clone)]
struct PyModel(SpectralModel);

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn torus(d: usize) -> PyResult<Self> {
        SpectralModel::torus(d).map(Self).map_err(err)
    }

    #[staticmethod]
    fn sphere() -> Self {
        Self(SpectralModel::sphere())
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    #[getter]
    fn is_torus(&self) -> bool {
        self.0.is_torus()
    }

    fn weyl_count(&self, lam: f64) -> u64 {
        spectra::weyl_count(&self.0, lam)
    }

    /// Labels with frequency at most `lam`, in canonical order.
    fn modes(&self, lam: f64) -> PyResult<Vec<Vec<i64>>> {
        let modes = spectra::enumerate_modes(&self.0, lam).map_err(err)?;
        Ok(modes.iter().map(|m| label_of(&self.0, m)).collect())
    }

    fn rank_of(&self, label: Vec<i64>) -> PyResult<u64> {
        Ok(spectra::rank_of(&self.0, &mode_from(&self.0, &label)?))
    }

    fn mode_at_rank(&self, n: u64) -> Vec<i64> {
        label_of(&self.0, &spectra::mode_at_rank(&self.0, n))
    }

    fn frequency_of_rank(&self, n: u64) -> f64 {
        spectra::frequency_of_rank(&self.0, n)
    }

    fn __repr__(&self) -> String {
        if self.0.is_torus() {
            format!("Model.torus({})", self.0.dimension())
        } else {
            "Model.sphere()".to_string()
        }
    }
}

#[pyclass(name = "Field", frozen, from_py_object)]
#[derive(Clone)]
struct PyField(SpectralField);

#[pymethods]
impl PyField {
    #[new]
    fn new(model: &PyModel, coefficients: HashMap<Vec<i64>, Complex64>) -> PyResult<Self> {
        let coeffs = coefficients
            .iter()
            .map(|(label, c)| Ok((mode_from(&model.0, label)?, *c)))
            .collect::<PyResult<Vec<_>>>()?;
        SpectralField::from_coefficients(model.0, coeffs).map(Self).map_err(err)
    }

    #[getter]
    fn model(&self) -> PyModel {
        PyModel(*self.0.model())
    }

    fn coefficients(&self) -> HashMap<Vec<i64>, Complex64> {
        self.0.iter().map(|(m, c)| (label_of(self.0.model(), m), *c)).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn l2_norm(&self) -> f64 {
        self.0.l2_norm()
    }

    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        field::lp_norm(&self.0, p).map(|n| n.value).map_err(err)
    }

    fn sobolev_norm(&self, s: f64) -> f64 {
        field::sobolev_norm(&self.0, s)
    }

    fn inner(&self, other: &PyField) -> PyResult<Complex64> {
        field::inner(&self.0, &other.0).map_err(err)
    }

    fn __mul__(&self, other: &PyField) -> PyResult<Self> {
        field::multiply(&self.0, &other.0).map(Self).map_err(err)
    }

    fn __add__(&self, other: &PyField) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(err)
    }

    fn scale(&self, alpha: Complex64) -> Self {
        Self(self.0.scale(alpha))
    }

    /// Sharp projection onto ranks `< nu`, returned with its remainder.
    fn project_rank(&self, nu: u64) -> (Self, Self) {
        let (e, r) = project::project_rank(&self.0, nu);
        (Self(e), Self(r))
    }

    fn smooth_split(&self, lam: f64) -> PyResult<(Self, Self)> {
        let (low, high) = project::smooth_split(&self.0, lam, &project::CutoffProfile).map_err(err)?;
        Ok((Self(low), Self(high)))
    }

    #[pyo3(signature = (eps, norm = "h-1"))]
    fn min_rank(&self, eps: f64, norm: &str) -> PyResult<u64> {
        let norm = match norm {
            "h-1" => RemainderNorm::HMinusOne,
            "l2" => RemainderNorm::L2,
            other => return Err(PyValueError::new_err(format!("unknown norm {other:?}"))),
        };
        project::min_rank_for_tolerance(&self.0, eps, norm).map_err(err)
    }
}

#[pyclass(name = "Quasimode", frozen, from_py_object)]
#[derive(Clone)]
struct PyQuasimode(quasimode::Quasimode);

#[pymethods]
impl PyQuasimode {
    #[new]
    fn new(field: &PyField, lam: f64) -> PyResult<Self> {
        quasimode::Quasimode::new(field.0.clone(), lam, Family::Custom).map(Self).map_err(err)
    }

    #[staticmethod]
    fn eigenfunction(model: &PyModel, label: Vec<i64>) -> PyResult<Self> {
        let mode = mode_from(&model.0, &label)?;
        quasimode::Quasimode::eigenfunction(model.0, mode).map(Self).map_err(err)
    }

    /// Spectral window `[lam, lam + width)`; uniform weights unless a seed is given.
    #[staticmethod]
    #[pyo3(signature = (model, lam, width = 1.0, seed = None))]
    fn cluster(model: &PyModel, lam: f64, width: f64, seed: Option<u64>) -> PyResult<Self> {
        let weights = seed.map_or(Weights::Uniform, Weights::Random);
        quasimode::cluster_quasimode(model.0, lam, width, weights).map(Self).map_err(err)
    }

    #[staticmethod]
    fn sectoral(degree: u32) -> PyResult<Self> {
        quasimode::sphere_extremal(Extremal::Sectoral, degree).map(Self).map_err(err)
    }

    #[staticmethod]
    fn zonal(degree: u32) -> PyResult<Self> {
        quasimode::sphere_extremal(Extremal::Zonal, degree).map(Self).map_err(err)
    }

    #[staticmethod]
    fn lattice_cap(model: &PyModel, lam: u32, cap_width: f64) -> PyResult<Self> {
        quasimode::lattice_cap(model.0, lam, cap_width).map(Self).map_err(err)
    }

    #[getter]
    fn field(&self) -> PyField {
        PyField(self.0.field.clone())
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda
    }

    #[getter]
    fn defect(&self) -> f64 {
        self.0.defect
    }

    #[getter]
    fn quality(&self) -> f64 {
        self.0.quality
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.0.family.name()
    }
}

#[pyfunction]
fn sigma_p(d: usize, p: f64) -> f64 {
    bounds::sigma_p(d, p)
}

#[pyfunction]
fn lambda_exponent(d: usize, nu: f64) -> f64 {
    bounds::lambda_exponent(d, nu)
}

#[pyfunction]
fn omega_exponent(d: usize, mu: f64) -> f64 {
    bounds::omega_exponent(d, mu)
}

/// `‖uv‖₂` over the bound's right-hand side. Passing `n` and `q` selects the
/// high-dimensional variant with a Sobolev tail.
#[pyfunction]
#[pyo3(signature = (u, v, n = None, q = None))]
fn bilinear_ratio(u: &PyQuasimode, v: &PyQuasimode, n: Option<f64>, q: Option<f64>) -> PyResult<f64> {
    let variant = match (n, q) {
        (None, None) => Variant::LowDim,
        (Some(n), Some(lebesgue)) => Variant::HighDimTail { n, lebesgue },
        _ => return Err(PyValueError::new_err("n and q go together")),
    };
    bounds::bilinear_ratio(&u.0, &v.0, variant).map_err(err)
}

/// Log-log slope of `(x, y)` points; returns `(slope, intercept, max_abs_residual)`.
#[pyfunction]
#[pyo3(signature = (points, correction = "none"))]
fn fit_exponent(points: Vec<(f64, f64)>, correction: &str) -> PyResult<(f64, f64, f64)> {
    let correction = match correction {
        "none" => LogCorrection::None,
        "half-log" => LogCorrection::HalfLog,
        "three-half-log" => LogCorrection::ThreeHalfLog,
        other => return Err(PyValueError::new_err(format!("unknown correction {other:?}"))),
    };
    let fit = lab::fit_exponent(&points, correction).map_err(err)?;
    Ok((fit.slope, fit.intercept, fit.max_abs_residual))
}

/// Runs one experiment from TOML text; returns `(passed, csv, summary)`.
#[pyfunction]
#[pyo3(signature = (kind, config, threads = 0))]
fn run_experiment(py: Python<'_>, kind: &str, config: &str, threads: usize) -> PyResult<(bool, String, String)> {
    let kind = ExperimentKind::from_name(kind).ok_or_else(|| PyValueError::new_err(format!("unknown experiment {kind:?}")))?;
    let cfg = ExperimentConfig::parse(config).map_err(err)?;
    let report = py.detach(|| lab::run_experiment_with_threads(&cfg, kind, threads)).map_err(err)?;
    Ok((report.passed(), report.to_csv().map_err(err)?, report.summary()))
}

#[pymodule]
fn qlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyQuasimode>()?;
    m.add_function(wrap_pyfunction!(sigma_p, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(omega_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(bilinear_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
