//! Tensor quadrature grids and the transforms between coefficients and
//! grid samples.
//!
//! Torus grids are uniform with `n` nodes per axis and weight `1/n` per axis;
//! they integrate every trigonometric polynomial with `|k_i| < n` exactly, so
//! their degree is `n − 1`. Sphere grids use Gauss–Legendre nodes in `cos θ`
//! and `n_φ` uniform nodes in `φ`; their degree is `min(2n_θ − 1, n_φ − 1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::legendre::{gauss_legendre, LegendreTable};
use super::{SpectralField, SPHERE_DEGREE_CAP};
use crate::error::{Error, Result};
use crate::spectra::{
    max_eigen_at_most, sphere_frequency, visit_lattice_shell, Geometry, Mode, SpectralModel,
    MAX_TORUS_DIM,
};

pub const MAX_GRID_POINTS: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridSpec {
    Torus { dim: usize, nodes: usize },
    Sphere { n_theta: usize, n_phi: usize },
}

impl GridSpec {
    pub fn torus(dim: usize, nodes: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidArgument(format!(
                "torus grids exist for d <= 3 only, got d = {dim}"
            )));
        }
        if nodes == 0 {
            return Err(Error::InvalidArgument("grid needs at least one node".into()));
        }
        Self::checked(Self::Torus { dim, nodes })
    }

    pub fn sphere(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidArgument("grid needs at least one node".into()));
        }
        Self::checked(Self::Sphere { n_theta, n_phi })
    }

    fn checked(spec: Self) -> Result<Self> {
        let points = spec.point_count_u128();
        if points > MAX_GRID_POINTS as u128 {
            return Err(Error::Resource {
                what: "grid points",
                requested: points,
                cap: MAX_GRID_POINTS as u128,
            });
        }
        Ok(spec)
    }

    fn point_count_u128(&self) -> u128 {
        match *self {
            Self::Torus { dim, nodes } => (nodes as u128).pow(dim as u32),
            Self::Sphere { n_theta, n_phi } => n_theta as u128 * n_phi as u128,
        }
    }

    pub fn point_count(&self) -> usize {
        self.point_count_u128() as usize
    }

    /// Highest degree integrated exactly.
    pub fn degree(&self) -> u64 {
        match *self {
            Self::Torus { nodes, .. } => nodes as u64 - 1,
            Self::Sphere { n_theta, n_phi } => (2 * n_theta as u64 - 1).min(n_phi as u64 - 1),
        }
    }

    fn fits(&self, model: &SpectralModel) -> bool {
        matches!(
            (*self, model.geometry()),
            (Self::Torus { dim, .. }, Geometry::Torus(d)) if dim == d
        ) || matches!((*self, model.geometry()), (Self::Sphere { .. }, Geometry::Sphere2))
    }
}

/// Smallest grid for `model` whose degree is at least `degree`.
pub fn grid_for_degree(model: &SpectralModel, degree: u64) -> Result<GridSpec> {
    match model.geometry() {
        Geometry::Torus(d) => GridSpec::torus(d, degree as usize + 1),
        Geometry::Sphere2 => GridSpec::sphere((degree as usize + 2) / 2, degree as usize + 1),
    }
}

/// Samples of a function on a quadrature grid.
#[derive(Clone, Debug)]
pub struct GridField {
    model: SpectralModel,
    spec: GridSpec,
    samples: Vec<Complex64>,
    // cos θ nodes and Gauss weights; empty on tori
    theta_nodes: Vec<f64>,
    theta_weights: Vec<f64>,
}

impl GridField {
    fn empty(model: SpectralModel, spec: GridSpec) -> Result<Self> {
        if !spec.fits(&model) {
            return Err(Error::InvalidArgument(format!("grid {spec:?} does not fit {model}")));
        }
        let (theta_nodes, theta_weights) = match spec {
            GridSpec::Sphere { n_theta, .. } => gauss_legendre(n_theta),
            GridSpec::Torus { .. } => (Vec::new(), Vec::new()),
        };
        Ok(Self {
            model,
            spec,
            samples: vec![Complex64::new(0.0, 0.0); spec.point_count()],
            theta_nodes,
            theta_weights,
        })
    }

    /// Samples `f` at every node. Torus coordinates are `(x_1, …, x_d)`;
    /// sphere coordinates are `(θ, φ)`.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(
        model: SpectralModel,
        spec: GridSpec,
        f: F,
    ) -> Result<Self> {
        let mut g = Self::empty(model, spec)?;
        let mut point = Vec::new();
        for i in 0..g.samples.len() {
            g.point_into(i, &mut point);
            g.samples[i] = f(&point);
        }
        Ok(g)
    }

    fn point_into(&self, index: usize, out: &mut Vec<f64>) {
        out.clear();
        match self.spec {
            GridSpec::Torus { dim, nodes } => {
                let mut rest = index;
                let mut coords = [0usize; 3];
                for axis in (0..dim).rev() {
                    coords[axis] = rest % nodes;
                    rest /= nodes;
                }
                out.extend(coords[..dim].iter().map(|&j| 2.0 * PI * j as f64 / nodes as f64));
            }
            GridSpec::Sphere { n_phi, .. } => {
                let (i, j) = (index / n_phi, index % n_phi);
                out.push(self.theta_nodes[i].clamp(-1.0, 1.0).acos());
                out.push(2.0 * PI * j as f64 / n_phi as f64);
            }
        }
    }

    /// Coordinates of sample `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut out = Vec::new();
        self.point_into(index, &mut out);
        out
    }

    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Quadrature of `h(f(x))` against the model measure.
    pub fn integrate<H: Fn(Complex64) -> f64>(&self, h: H) -> f64 {
        match self.spec {
            GridSpec::Torus { .. } => {
                self.samples.iter().map(|&z| h(z)).sum::<f64>() / self.samples.len() as f64
            }
            GridSpec::Sphere { n_phi, .. } => {
                let dphi = 2.0 * PI / n_phi as f64;
                self.samples
                    .chunks(n_phi)
                    .zip(&self.theta_weights)
                    .map(|(row, w)| w * dphi * row.iter().map(|&z| h(z)).sum::<f64>())
                    .sum()
            }
        }
    }

    pub fn pointwise_product(&self, other: &GridField) -> GridField {
        assert_eq!(self.spec, other.spec, "grids differ");
        let mut out = self.clone();
        for (a, b) in out.samples.iter_mut().zip(&other.samples) {
            *a *= b;
        }
        out
    }
}

fn torus_index(k: &[i32; MAX_TORUS_DIM], dim: usize, nodes: usize) -> usize {
    k[..dim]
        .iter()
        .fold(0usize, |acc, &c| acc * nodes + c.rem_euclid(nodes as i32) as usize)
}

fn fft_all_axes(data: &mut [Complex64], dim: usize, nodes: usize, forward: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if forward {
        planner.plan_fft_forward(nodes)
    } else {
        planner.plan_fft_inverse(nodes)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); nodes];
    for axis in 0..dim {
        let stride = nodes.pow((dim - 1 - axis) as u32);
        let block = stride * nodes;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                fft.process(&mut line);
                for (j, value) in line.iter().enumerate() {
                    data[start + j * stride] = *value;
                }
            }
        }
    }
}

/// Evaluates `Σ c_k e_k` at every grid node.
pub fn synthesize(f: &SpectralField, spec: &GridSpec) -> Result<GridField> {
    let mut g = GridField::empty(f.model, *spec)?;
    let band = f.grid_band();
    if spec.degree() < band {
        return Err(Error::Bandwidth {
            required: band,
            available: spec.degree(),
        });
    }
    match *spec {
        GridSpec::Torus { dim, nodes } => {
            for (mode, c) in &f.coeffs {
                let k = mode.lattice_vector().expect("torus mode");
                g.samples[torus_index(k, dim, nodes)] += c;
            }
            fft_all_axes(&mut g.samples, dim, nodes, false);
        }
        GridSpec::Sphere { n_phi, .. } => {
            let lmax = band as usize;
            let fft = FftPlanner::<f64>::new().plan_fft_inverse(n_phi);
            let theta_nodes = g.theta_nodes.clone();
            for (i, &x) in theta_nodes.iter().enumerate() {
                let table = LegendreTable::new(lmax, x);
                let row = &mut g.samples[i * n_phi..(i + 1) * n_phi];
                for (mode, c) in &f.coeffs {
                    let (l, m) = mode.harmonic_indices().expect("sphere mode");
                    row[m.rem_euclid(n_phi as i32) as usize] += c * table.get(l, m);
                }
                fft.process(row);
            }
        }
    }
    Ok(g)
}

/// Grid band read by [`analyze`] at `lambda_max`: the largest lattice
/// coordinate inside the ball of that radius, or the largest sphere degree
/// whose frequency is at most `lambda_max`. Analysis needs a grid of degree
/// at least twice this.
pub fn analysis_band(model: &SpectralModel, lambda_max: f64) -> u64 {
    match model.geometry() {
        Geometry::Torus(_) => max_eigen_at_most(lambda_max).isqrt(),
        Geometry::Sphere2 => {
            let mut lmax = 0u32;
            while sphere_frequency(lmax + 1) <= lambda_max {
                lmax += 1;
            }
            lmax as u64
        }
    }
}

/// Coefficients `⟨g, e_k⟩` for every mode with frequency `<= lambda_max`.
/// Exact to roundoff when `g` is band-limited to `lambda_max` and the grid
/// degree covers twice that band.
pub fn analyze(g: &GridField, lambda_max: f64) -> Result<SpectralField> {
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda_max must be finite and nonnegative, got {lambda_max}"
        )));
    }
    let model = g.model;
    let mut coeffs = std::collections::BTreeMap::new();
    match g.spec {
        GridSpec::Torus { dim, nodes } => {
            let e_max = max_eigen_at_most(lambda_max);
            check_band(&g.spec, analysis_band(&model, lambda_max))?;
            let mut data = g.samples.clone();
            fft_all_axes(&mut data, dim, nodes, true);
            let scale = 1.0 / data.len() as f64;
            visit_lattice_shell(dim, 0, e_max, &mut |k| {
                let c = data[torus_index(k, dim, nodes)] * scale;
                coeffs.insert(Mode::from_padded(*k), c);
            });
        }
        GridSpec::Sphere { n_phi, .. } => {
            let lmax = analysis_band(&model, lambda_max).min(u32::MAX as u64) as u32;
            if lmax > SPHERE_DEGREE_CAP {
                return Err(Error::DegreeCap {
                    degree: lmax,
                    cap: SPHERE_DEGREE_CAP,
                });
            }
            check_band(&g.spec, lmax as u64)?;
            let l = lmax as usize;
            let mut acc = vec![Complex64::new(0.0, 0.0); (l + 1) * (l + 1)];
            let fft: std::sync::Arc<dyn Fft<f64>> = FftPlanner::<f64>::new().plan_fft_forward(n_phi);
            let dphi = 2.0 * PI / n_phi as f64;
            let mut row = vec![Complex64::new(0.0, 0.0); n_phi];
            for (i, (&x, &w)) in g.theta_nodes.iter().zip(&g.theta_weights).enumerate() {
                row.copy_from_slice(&g.samples[i * n_phi..(i + 1) * n_phi]);
                fft.process(&mut row);
                let table = LegendreTable::new(l, x);
                let wq = w * dphi;
                for deg in 0..=lmax {
                    let base = (deg * deg + deg) as i64;
                    for m in -(deg as i32)..=(deg as i32) {
                        let gm = row[m.rem_euclid(n_phi as i32) as usize];
                        acc[(base + m as i64) as usize] += gm * (wq * table.get(deg, m));
                    }
                }
            }
            for deg in 0..=lmax {
                let base = (deg * deg + deg) as i64;
                for m in -(deg as i32)..=(deg as i32) {
                    coeffs.insert(Mode::harmonic(deg, m), acc[(base + m as i64) as usize]);
                }
            }
        }
    }
    Ok(SpectralField::from_map_unchecked(model, coeffs))
}

fn check_band(spec: &GridSpec, band: u64) -> Result<()> {
    if spec.degree() < 2 * band {
        return Err(Error::Bandwidth {
            required: 2 * band,
            available: spec.degree(),
        });
    }
    Ok(())
}

impl SpectralField {
    /// Convenience for [`synthesize`] on the smallest grid that can also
    /// analyze the result back.
    pub fn to_grid(&self) -> Result<GridField> {
        let spec = grid_for_degree(&self.model, 2 * self.grid_band())?;
        synthesize(self, &spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn constant_modes_synthesize_to_constants() {
        let t2 = SpectralModel::torus(2).unwrap();
        let f = SpectralField::single(t2, Mode::lattice(&[0, 0])).unwrap();
        let g = synthesize(&f, &GridSpec::torus(2, 5).unwrap()).unwrap();
        assert!(g.samples().iter().all(|z| (z - one()).norm() < 1e-15));

        let s2 = SpectralModel::sphere();
        let f = SpectralField::single(s2, Mode::harmonic(0, 0)).unwrap();
        let g = synthesize(&f, &GridSpec::sphere(3, 5).unwrap()).unwrap();
        let expect = 1.0 / (4.0 * PI).sqrt();
        assert!(g.samples().iter().all(|z| (z.re - expect).abs() < 1e-15 && z.im.abs() < 1e-15));
    }

    #[test]
    fn torus_direct_evaluation() {
        let t2 = SpectralModel::torus(2).unwrap();
        let f = SpectralField::single(t2, Mode::lattice(&[1, 0])).unwrap();
        let spec = GridSpec::torus(2, 4).unwrap();
        let g = synthesize(&f, &spec).unwrap();
        for (i, z) in g.samples().iter().enumerate() {
            let x = g.point(i);
            let expect = Complex64::from_polar(1.0, x[0]);
            assert!((z - expect).norm() < 1e-14);
        }
        // x_1 runs over {0, π/2, π, 3π/2}
        let firsts: Vec<f64> = (0..4).map(|j| g.point(j * 4)[0]).collect();
        assert_eq!(firsts, vec![0.0, PI / 2.0, PI, 1.5 * PI]);
    }

    #[test]
    fn analyze_known_functions() {
        let s2 = SpectralModel::sphere();
        let spec = GridSpec::sphere(6, 11).unwrap();
        let g = GridField::from_fn(s2, spec, |_| one()).unwrap();
        let f = analyze(&g, sphere_frequency(4)).unwrap();
        let c0 = f.coefficient(&Mode::harmonic(0, 0));
        assert!((c0.re - (4.0 * PI).sqrt()).abs() < 1e-13);
        for (m, c) in f.iter() {
            if *m != Mode::harmonic(0, 0) {
                assert!(c.norm() < 1e-14, "{m} {c}");
            }
        }

        let t2 = SpectralModel::torus(2).unwrap();
        let spec = GridSpec::torus(2, 9).unwrap();
        let g = GridField::from_fn(t2, spec, |x| Complex64::new(x[0].cos(), 0.0)).unwrap();
        let f = analyze(&g, 4.0).unwrap();
        for (m, c) in f.iter() {
            let expect = if *m == Mode::lattice(&[1, 0]) || *m == Mode::lattice(&[-1, 0]) {
                0.5
            } else {
                0.0
            };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-15, "{m}");
        }
    }

    #[test]
    fn bandwidth_errors() {
        let t2 = SpectralModel::torus(2).unwrap();
        let f = SpectralField::single(t2, Mode::lattice(&[5, 0])).unwrap();
        assert!(matches!(
            synthesize(&f, &GridSpec::torus(2, 5).unwrap()),
            Err(Error::Bandwidth { .. })
        ));
        let g = synthesize(&f, &GridSpec::torus(2, 8).unwrap()).unwrap();
        assert!(matches!(analyze(&g, 5.0), Err(Error::Bandwidth { .. })));
        assert!(GridSpec::torus(4, 3).is_err());
        assert!(matches!(GridSpec::torus(3, 1000), Err(Error::Resource { .. })));
    }

    #[test]
    fn sphere_grid_degree() {
        let spec = grid_for_degree(&SpectralModel::sphere(), 10).unwrap();
        assert_eq!(spec, GridSpec::Sphere { n_theta: 6, n_phi: 11 });
        assert_eq!(spec.degree(), 10);
        let spec = grid_for_degree(&SpectralModel::sphere(), 9).unwrap();
        assert!(spec.degree() >= 9);
    }
}
