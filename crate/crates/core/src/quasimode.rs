//! Quasimode families and the quality functional
//! `q(u) = λ^{-1}‖(Δ + λ²)u‖₂ + ‖u‖₂`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::{SpectralField, SPHERE_DEGREE_CAP};
use crate::spectra::{
    max_eigen_below, min_eigen_at_least, sphere_frequency, visit_lattice_shell, visit_modes,
    window_modes, Geometry, Mode, SpectralModel, MAX_TORUS_DIM,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Eigenfunction,
    Cluster,
    Sectoral,
    Zonal,
    LatticeCap,
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Eigenfunction => "eigenfunction",
            Family::Cluster => "cluster",
            Family::Sectoral => "sectoral",
            Family::Zonal => "zonal",
            Family::LatticeCap => "cap",
            Family::Custom => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weights {
    Uniform,
    /// Independent standard complex Gaussians from a ChaCha8 stream.
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Sectoral,
    Zonal,
}

/// A field together with its nominal frequency and measured quality.
#[derive(Clone, Debug, PartialEq)]
pub struct Quasimode {
    pub field: SpectralField,
    pub lambda: f64,
    pub defect: f64,
    pub quality: f64,
    pub family: Family,
    pub seed: Option<u64>,
}

impl Quasimode {
    pub fn new(field: SpectralField, lambda: f64, family: Family) -> Result<Self> {
        let (defect, quality) = quality(&field, lambda)?;
        Ok(Self {
            field,
            lambda,
            defect,
            quality,
            family,
            seed: None,
        })
    }

    /// A single eigenfunction at its own frequency.
    pub fn eigenfunction(model: SpectralModel, mode: Mode) -> Result<Self> {
        let field = SpectralField::single(model, mode)?;
        Self::new(field, mode.frequency(), Family::Eigenfunction)
    }

    /// Multiplies the field by `alpha`; defect and quality scale by `|alpha|`.
    pub fn scaled(&self, alpha: Complex64) -> Result<Self> {
        let mut q = Self::new(self.field.scale(alpha), self.lambda, self.family)?;
        q.seed = self.seed;
        Ok(q)
    }

    pub fn model(&self) -> &SpectralModel {
        self.field.model()
    }
}

/// `(‖(Δ + λ²)f‖₂, λ^{-1}·defect + ‖f‖₂)`, with the defect computed from the
/// spectral identity `Σ (λ_k² − λ²)² |c_k|²`.
pub fn quality(f: &SpectralField, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quasimode frequency must be >= 1, got {lambda}"
        )));
    }
    let lambda_sq = lambda * lambda;
    let defect = f
        .iter()
        .map(|(m, c)| {
            let shift = m.eigenvalue() as f64 - lambda_sq;
            shift * shift * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    Ok((defect, defect / lambda + f.l2_norm()))
}

fn weighted_field(model: SpectralModel, modes: &[Mode], weights: Weights) -> Result<SpectralField> {
    let coeffs: Vec<(Mode, Complex64)> = match weights {
        Weights::Uniform => modes.iter().map(|m| (*m, Complex64::new(1.0, 0.0))).collect(),
        Weights::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            modes
                .iter()
                .map(|m| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    (*m, Complex64::new(re, im))
                })
                .collect()
        }
    };
    SpectralField::from_coefficients(model, coeffs)?.normalized()
}

fn weights_seed(weights: Weights) -> Option<u64> {
    match weights {
        Weights::Uniform => None,
        Weights::Random(seed) => Some(seed),
    }
}

/// Unit-norm combination of every mode with frequency in `[λ, λ + width)`.
pub fn cluster_quasimode(
    model: SpectralModel,
    lambda: f64,
    width: f64,
    weights: Weights,
) -> Result<Quasimode> {
    check_window(lambda, width)?;
    let modes = window_modes(&model, lambda, lambda + width)?;
    finish_cluster(model, lambda, width, &modes, weights, weights_seed(weights))
}

/// Like [`cluster_quasimode`], but keeps at most `max_modes` modes of the
/// window, chosen by seeded reservoir sampling. Windows in high dimension
/// hold far too many modes for a dense product; the subsample keeps the
/// window support, so the quality stays `O(1)`.
pub fn sparse_cluster_quasimode(
    model: SpectralModel,
    lambda: f64,
    width: f64,
    weights: Weights,
    max_modes: usize,
    sample_seed: u64,
) -> Result<Quasimode> {
    check_window(lambda, width)?;
    if max_modes == 0 {
        return Err(Error::InvalidArgument("max_modes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let mut reservoir: Vec<Mode> = Vec::with_capacity(max_modes);
    let mut seen = 0u64;
    visit_modes(&model, lambda, lambda + width, false, |m| {
        seen += 1;
        if reservoir.len() < max_modes {
            reservoir.push(m);
        } else {
            let j = rng.random_range(0..seen);
            if (j as usize) < max_modes {
                reservoir[j as usize] = m;
            }
        }
    });
    reservoir.sort_unstable();
    let seed = weights_seed(weights).or(Some(sample_seed));
    finish_cluster(model, lambda, width, &reservoir, weights, seed)
}

fn check_window(lambda: f64, width: f64) -> Result<()> {
    if !(lambda >= 1.0) || !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cluster needs lambda >= 1 and a finite positive width, got lambda = {lambda}, width = {width}"
        )));
    }
    Ok(())
}

fn finish_cluster(
    model: SpectralModel,
    lambda: f64,
    width: f64,
    modes: &[Mode],
    weights: Weights,
    seed: Option<u64>,
) -> Result<Quasimode> {
    if modes.is_empty() {
        return Err(Error::EmptyWindow {
            lo: lambda,
            hi: lambda + width,
        });
    }
    let field = weighted_field(model, modes, weights)?;
    let mut q = Quasimode::new(field, lambda, Family::Cluster)?;
    q.seed = seed;
    Ok(q)
}

/// `Y_ℓ^ℓ` (sectoral) or `Y_ℓ^0` (zonal) at `λ = √(ℓ(ℓ+1))`.
pub fn sphere_extremal(kind: Extremal, degree: u32) -> Result<Quasimode> {
    if degree == 0 {
        return Err(Error::InvalidArgument("extremal families need degree >= 1".into()));
    }
    if degree > SPHERE_DEGREE_CAP {
        return Err(Error::DegreeCap {
            degree,
            cap: SPHERE_DEGREE_CAP,
        });
    }
    let (order, family) = match kind {
        Extremal::Sectoral => (degree as i32, Family::Sectoral),
        Extremal::Zonal => (0, Family::Zonal),
    };
    let field = SpectralField::single(SpectralModel::sphere(), Mode::harmonic(degree, order))?;
    Quasimode::new(field, sphere_frequency(degree), family)
}

/// Angle between `k` and the positive first axis.
fn axis_angle(k: &[i32; MAX_TORUS_DIM], eigenvalue: u64) -> f64 {
    (k[0] as f64 / (eigenvalue as f64).sqrt()).clamp(-1.0, 1.0).acos()
}

/// Uniform unit combination of the lattice modes with `|k| ∈ [λ, λ + 1)`
/// whose direction lies within `cap_width` radians of the first axis.
pub fn lattice_cap(model: SpectralModel, lambda: u32, cap_width: f64) -> Result<Quasimode> {
    let d = match model.geometry() {
        Geometry::Torus(d) => d,
        Geometry::Sphere2 => {
            return Err(Error::InvalidArgument("lattice caps live on tori".into()));
        }
    };
    if lambda == 0 || !(cap_width >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lattice cap needs lambda >= 1 and cap_width >= 0, got {lambda}, {cap_width}"
        )));
    }
    let lo = lambda as f64;
    let hi = lo + 1.0;
    let mut modes = Vec::new();
    if cap_width >= std::f64::consts::FRAC_PI_2 {
        visit_modes(&model, lo, hi, false, |m| {
            let k = m.lattice_vector().expect("torus mode");
            if axis_angle(k, m.eigenvalue()) <= cap_width {
                modes.push(m);
            }
        });
    } else {
        let e_lo = min_eigen_at_least(lo);
        let e_hi = max_eigen_below(hi).expect("hi > 0");
        let transverse_max = (hi * hi * cap_width.sin().powi(2)).floor() as u64;
        visit_lattice_shell(d - 1, 0, transverse_max.min(e_hi), &mut |t| {
            let t_sq: u64 = t[..d - 1].iter().map(|&c| (c as i64 * c as i64) as u64).sum();
            if t_sq > e_hi {
                return;
            }
            let k1_lo = e_lo.saturating_sub(t_sq);
            let k1_lo = {
                let s = k1_lo.isqrt();
                if s * s == k1_lo { s } else { s + 1 }
            };
            let k1_hi = (e_hi - t_sq).isqrt();
            for k1 in k1_lo..=k1_hi {
                let mut k = [0i32; MAX_TORUS_DIM];
                k[0] = k1 as i32;
                k[1..d].copy_from_slice(&t[..d - 1]);
                let m = Mode::from_padded(k);
                if axis_angle(&k, m.eigenvalue()) <= cap_width {
                    modes.push(m);
                }
            }
        });
    }
    if modes.is_empty() {
        return Err(Error::EmptyCap {
            lambda: lo,
            width: cap_width,
        });
    }
    modes.sort_unstable();
    let field = weighted_field(model, &modes, Weights::Uniform)?;
    Quasimode::new(field, lo, Family::LatticeCap)
}
