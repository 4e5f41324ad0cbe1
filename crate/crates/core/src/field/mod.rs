//! Functions on a model manifold, stored as sparse coefficient vectors over
//! eigenmodes, plus their norms, inner products and pointwise products.

mod grid;
pub mod legendre;

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectra::{sphere_frequency, Geometry, Mode, SpectralModel, MAX_TORUS_DIM};

pub use grid::{analysis_band, analyze, grid_for_degree, synthesize, GridField, GridSpec, MAX_GRID_POINTS};

/// Sphere transforms are limited to this degree.
pub const SPHERE_DEGREE_CAP: u32 = 256;

/// Cap on the number of coefficient pairs visited by a torus convolution.
pub const DEFAULT_PAIR_CAP: u128 = 500_000_000;

/// Sparse coefficient representation `f = Σ c_k e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    model: SpectralModel,
    coeffs: BTreeMap<Mode, Complex64>,
}

impl SpectralField {
    pub fn zero(model: SpectralModel) -> Self {
        Self {
            model,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn single(model: SpectralModel, mode: Mode) -> Result<Self> {
        Self::from_coefficients(model, [(mode, Complex64::new(1.0, 0.0))])
    }

    /// Builds a field; repeated modes are summed and exact zeros dropped.
    pub fn from_coefficients<I>(model: SpectralModel, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Mode, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (mode, c) in coeffs {
            if !model.contains(&mode) {
                return Err(Error::InvalidArgument(format!(
                    "mode {mode} does not belong to {model}"
                )));
            }
            *map.entry(mode).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self { model, coeffs: map })
    }

    pub(crate) fn from_map_unchecked(model: SpectralModel, mut map: BTreeMap<Mode, Complex64>) -> Self {
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { model, coeffs: map }
    }

    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    pub fn coefficients(&self) -> &BTreeMap<Mode, Complex64> {
        &self.coeffs
    }

    pub fn coefficient(&self, mode: &Mode) -> Complex64 {
        self.coeffs.get(mode).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ |c_k|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// L² norm from the coefficients (Parseval).
    pub fn l2_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_eigenvalue(&self) -> u64 {
        self.coeffs.keys().next_back().map_or(0, |m| m.eigenvalue())
    }

    pub fn max_frequency(&self) -> f64 {
        (self.max_eigenvalue() as f64).sqrt()
    }

    /// Largest lattice sup-norm (torus) or degree (sphere) in the support.
    pub fn grid_band(&self) -> u64 {
        self.coeffs.keys().map(|m| m.grid_band()).max().unwrap_or(0)
    }

    /// Multiplies every coefficient by `weight(mode)`.
    pub fn map_coefficients<F: Fn(&Mode, Complex64) -> Complex64>(&self, weight: F) -> Self {
        let map = self
            .coeffs
            .iter()
            .map(|(m, &c)| (*m, weight(m, c)))
            .collect();
        Self::from_map_unchecked(self.model, map)
    }

    /// Keeps the coefficients whose mode satisfies `keep`.
    pub fn filter<F: Fn(&Mode) -> bool>(&self, keep: F) -> Self {
        Self {
            model: self.model,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        self.map_coefficients(|_, c| c * alpha)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.l2_norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero field".into()));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        same_model(&self.model, &other.model)?;
        let mut map = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            *map.entry(*m).or_insert(Complex64::new(0.0, 0.0)) += c * sign;
        }
        Ok(Self::from_map_unchecked(self.model, map))
    }

    /// Largest coefficientwise difference `max_k |c_k(self) − c_k(other)|`.
    pub fn max_coefficient_difference(&self, other: &Self) -> Result<f64> {
        Ok(self
            .sub(other)?
            .coeffs
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max))
    }
}

fn same_model(a: &SpectralModel, b: &SpectralModel) -> Result<()> {
    if a != b {
        return Err(Error::ModelMismatch {
            left: a.to_string(),
            right: b.to_string(),
        });
    }
    Ok(())
}

/// `Σ c_k(f) · conj(c_k(g))`.
pub fn inner(f: &SpectralField, g: &SpectralField) -> Result<Complex64> {
    same_model(&f.model, &g.model)?;
    let (small, large, conj_small) = if f.len() <= g.len() {
        (f, g, false)
    } else {
        (g, f, true)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in &small.coeffs {
        if let Some(d) = large.coeffs.get(m) {
            acc += if conj_small { d * c.conj() } else { c * d.conj() };
        }
    }
    Ok(acc)
}

/// `(Σ_k (1 + λ_k²)^σ |c_k|²)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, sigma: f64) -> f64 {
    f.coeffs
        .iter()
        .map(|(m, c)| (1.0 + m.eigenvalue() as f64).powf(sigma) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// How an `L^p` value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormAccuracy {
    /// Exact quadrature of a polynomial integrand, up to roundoff.
    Exact,
    /// Oversampled quadrature of a non-polynomial integrand.
    Quadrature,
    /// Grid maximum; the true supremum is at least this large.
    LowerBound,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpNorm {
    pub value: f64,
    pub accuracy: NormAccuracy,
}

fn has_grid(model: &SpectralModel) -> bool {
    match model.geometry() {
        Geometry::Torus(d) => d <= 3,
        Geometry::Sphere2 => true,
    }
}

/// `(∫ |f|^p)^{1/p}` by quadrature; `p = ∞` gives the grid maximum.
///
/// Even integer `p` uses a grid of degree `p·B` (exact), other finite `p` a
/// grid of degree `max(8B, 2⌈p/2⌉B)`, and `p = ∞` a grid of degree `8B`,
/// where `B` is the field's grid band. On tori of dimension ≥ 4 only `p = 2`
/// is available, from the coefficients.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<LpNorm> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("L^p exponent must be >= 1, got {p}")));
    }
    if f.is_empty() {
        return Ok(LpNorm {
            value: 0.0,
            accuracy: NormAccuracy::Exact,
        });
    }
    if !has_grid(&f.model) {
        if p == 2.0 {
            return Ok(LpNorm {
                value: f.l2_norm(),
                accuracy: NormAccuracy::Exact,
            });
        }
        return Err(Error::InvalidArgument(format!(
            "L^{p} needs a quadrature grid, which {} does not provide",
            f.model
        )));
    }
    let band = f.grid_band().max(1);
    let even = p.is_finite() && p.fract() == 0.0 && (p as u64).is_multiple_of(2);
    let (degree, accuracy) = if even {
        (p as u64 * band, NormAccuracy::Exact)
    } else if p.is_finite() {
        let exact_even = 2 * (p / 2.0).ceil() as u64 * band;
        ((8 * band).max(exact_even), NormAccuracy::Quadrature)
    } else {
        (8 * band, NormAccuracy::LowerBound)
    };
    let spec = grid_for_degree(&f.model, degree)?;
    let g = synthesize(f, &spec)?;
    let value = if p.is_infinite() {
        g.samples().iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else {
        g.integrate(|z| z.norm().powf(p)).powf(1.0 / p)
    };
    Ok(LpNorm { value, accuracy })
}

/// Pointwise product `u·v` in coefficient form.
///
/// Tori use an exact sparse convolution of lattice coefficients. The sphere
/// multiplies on a grid of degree `2(ℓ_u + ℓ_v)` and analyzes the product
/// back up to degree `ℓ_u + ℓ_v`, which is exact to roundoff.
pub fn multiply(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    multiply_capped(u, v, DEFAULT_PAIR_CAP)
}

pub fn multiply_capped(u: &SpectralField, v: &SpectralField, pair_cap: u128) -> Result<SpectralField> {
    same_model(&u.model, &v.model)?;
    if u.is_empty() || v.is_empty() {
        return Ok(SpectralField::zero(u.model));
    }
    match u.model.geometry() {
        Geometry::Torus(_) => convolve(u, v, pair_cap),
        Geometry::Sphere2 => multiply_on_grid(u, v),
    }
}

fn convolve(u: &SpectralField, v: &SpectralField, pair_cap: u128) -> Result<SpectralField> {
    let pairs = u.len() as u128 * v.len() as u128;
    if pairs > pair_cap {
        return Err(Error::Resource {
            what: "convolution pairs",
            requested: pairs,
            cap: pair_cap,
        });
    }
    let mut acc: HashMap<[i32; MAX_TORUS_DIM], Complex64> = HashMap::with_capacity(pairs.min(1 << 22) as usize);
    for (a, ca) in &u.coeffs {
        let ka = a.lattice_vector().expect("torus mode");
        for (b, cb) in &v.coeffs {
            let kb = b.lattice_vector().expect("torus mode");
            let mut k = [0i32; MAX_TORUS_DIM];
            for i in 0..MAX_TORUS_DIM {
                k[i] = ka[i] + kb[i];
            }
            *acc.entry(k).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
        }
    }
    let map = acc
        .into_iter()
        .map(|(k, c)| (Mode::from_padded(k), c))
        .collect();
    Ok(SpectralField::from_map_unchecked(u.model, map))
}

/// Product through a quadrature grid: synthesize both factors, multiply
/// pointwise, analyze. Available on the sphere and on tori with `d <= 3`.
pub fn multiply_on_grid(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    same_model(&u.model, &v.model)?;
    if u.is_empty() || v.is_empty() {
        return Ok(SpectralField::zero(u.model));
    }
    let band = u.grid_band() + v.grid_band();
    let lambda_max = match u.model.geometry() {
        Geometry::Sphere2 => {
            if band > SPHERE_DEGREE_CAP as u64 {
                return Err(Error::DegreeCap {
                    degree: band as u32,
                    cap: SPHERE_DEGREE_CAP,
                });
            }
            sphere_frequency(band as u32)
        }
        Geometry::Torus(_) => u.max_frequency() + v.max_frequency(),
    };
    let spec = grid_for_degree(&u.model, 2 * band.max(analysis_band(&u.model, lambda_max)))?;
    let gu = synthesize(u, &spec)?;
    let gv = synthesize(v, &spec)?;
    let prod = gu.pointwise_product(&gv);
    analyze(&prod, lambda_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn t2() -> SpectralModel {
        SpectralModel::torus(2).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_product_of_off_axis_modes() {
        // Euclidean band 10 exceeds the coordinate band 8 of the product
        let u = SpectralField::from_coefficients(t2(), [(Mode::lattice(&[3, 4]), c(1.0)), (Mode::lattice(&[1, -1]), c(0.5))]).unwrap();
        let v = SpectralField::from_coefficients(t2(), [(Mode::lattice(&[4, 3]), c(2.0))]).unwrap();
        let grid = multiply_on_grid(&u, &v).unwrap();
        let exact = multiply(&u, &v).unwrap();
        assert!(grid.max_coefficient_difference(&exact).unwrap() < 1e-12);
        assert!((grid.coefficient(&Mode::lattice(&[7, 7])) - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn exponential_product() {
        let u = SpectralField::single(t2(), Mode::lattice(&[3, 4])).unwrap();
        let v = SpectralField::single(t2(), Mode::lattice(&[5, 0])).unwrap();
        let w = multiply(&u, &v).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.coefficient(&Mode::lattice(&[8, 4])), c(1.0));
    }

    #[test]
    fn product_with_normalized_constant() {
        let s2 = SpectralModel::sphere();
        let u = SpectralField::single(s2, Mode::harmonic(1, 0)).unwrap();
        let one = SpectralField::single(s2, Mode::harmonic(0, 0)).unwrap();
        let w = multiply(&u, &one).unwrap();
        let expect = SpectralField::from_coefficients(
            s2,
            [(Mode::harmonic(1, 0), c(1.0 / (4.0 * PI).sqrt()))],
        )
        .unwrap();
        assert!(w.max_coefficient_difference(&expect).unwrap() < 1e-13);
    }

    #[test]
    fn sobolev_examples() {
        let f = SpectralField::single(t2(), Mode::lattice(&[3, 4])).unwrap();
        assert!((sobolev_norm(&f, -1.0) - 26f64.powf(-0.5)).abs() < 1e-15);
        assert!((sobolev_norm(&f, 1.0) - 26f64.sqrt()).abs() < 1e-13);
        assert_eq!(sobolev_norm(&f, 0.0), lp_norm(&f, 2.0).unwrap().value);
    }

    #[test]
    fn inner_products() {
        let e1 = SpectralField::single(t2(), Mode::lattice(&[1, 2])).unwrap();
        let e2 = SpectralField::single(t2(), Mode::lattice(&[2, 1])).unwrap();
        assert_eq!(inner(&e1, &e1).unwrap(), c(1.0));
        assert_eq!(inner(&e1, &e2).unwrap(), c(0.0));
        let f = SpectralField::from_coefficients(
            t2(),
            [
                (Mode::lattice(&[1, 2]), Complex64::new(0.5, -1.0)),
                (Mode::lattice(&[0, 0]), Complex64::new(2.0, 0.25)),
            ],
        )
        .unwrap();
        let g = e1.scale(Complex64::new(0.0, 1.0));
        let ip = inner(&f, &g).unwrap();
        assert_eq!(ip, Complex64::new(0.5, -1.0) * Complex64::new(0.0, -1.0));
        assert_eq!(inner(&g, &f).unwrap(), ip.conj());
        let ff = inner(&f, &f).unwrap();
        assert!((ff.re - lp_norm(&f, 2.0).unwrap().value.powi(2)).abs() < 1e-12);
        assert!(inner(&f, &SpectralField::zero(SpectralModel::sphere())).is_err());
    }

    #[test]
    fn lp_of_torus_modes_is_one() {
        for k in [[0, 0], [1, 0], [3, -4], [7, 2]] {
            let f = SpectralField::single(t2(), Mode::lattice(&k)).unwrap();
            for p in [1.0, 2.0, 3.0, 4.0, 6.5, f64::INFINITY] {
                let n = lp_norm(&f, p).unwrap();
                assert!((n.value - 1.0).abs() < 1e-12, "k={k:?} p={p} got {}", n.value);
            }
        }
        let f = SpectralField::single(t2(), Mode::lattice(&[1, 1])).unwrap();
        assert_eq!(lp_norm(&f, 4.0).unwrap().accuracy, NormAccuracy::Exact);
        assert_eq!(lp_norm(&f, 3.0).unwrap().accuracy, NormAccuracy::Quadrature);
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap().accuracy, NormAccuracy::LowerBound);
    }

    #[test]
    fn y10_quartic_norm() {
        let f = SpectralField::single(SpectralModel::sphere(), Mode::harmonic(1, 0)).unwrap();
        let l4 = lp_norm(&f, 4.0).unwrap().value;
        assert!((l4 - (9.0 / (20.0 * PI)).powf(0.25)).abs() < 1e-12);
        assert!((l4 - 0.615_199).abs() < 1e-6);
    }

    #[test]
    fn high_dimensional_torus_has_only_l2() {
        let t4 = SpectralModel::torus(4).unwrap();
        let f = SpectralField::single(t4, Mode::lattice(&[1, 0, 2, 0])).unwrap();
        assert_eq!(lp_norm(&f, 2.0).unwrap().value, 1.0);
        assert!(lp_norm(&f, 4.0).is_err());
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn convolution_pair_cap() {
        let u = SpectralField::from_coefficients(
            t2(),
            (0..10).map(|i| (Mode::lattice(&[i, 0]), c(1.0))),
        )
        .unwrap();
        assert!(matches!(multiply_capped(&u, &u, 99), Err(Error::Resource { .. })));
        assert_eq!(multiply_capped(&u, &u, 100).unwrap().len(), 19);
    }

    #[test]
    fn model_checks() {
        assert!(SpectralField::single(t2(), Mode::harmonic(1, 0)).is_err());
        assert!(SpectralField::single(t2(), Mode::lattice(&[1, 0, 1])).is_err());
        let u = SpectralField::single(t2(), Mode::lattice(&[1, 0])).unwrap();
        let v = SpectralField::single(SpectralModel::sphere(), Mode::harmonic(1, 0)).unwrap();
        assert!(matches!(multiply(&u, &v), Err(Error::ModelMismatch { .. })));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let f = SpectralField::from_coefficients(
            t2(),
            [
                (Mode::lattice(&[1, 0]), c(1.0)),
                (Mode::lattice(&[1, 0]), c(-1.0)),
                (Mode::lattice(&[0, 1]), c(0.0)),
            ],
        )
        .unwrap();
        assert!(f.is_empty());
    }
}
