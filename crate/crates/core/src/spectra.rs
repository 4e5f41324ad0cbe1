//! Model manifolds with explicitly enumerable Laplace–Beltrami spectra.
//!
//! Two geometries are supported: the flat torus `T^d = [0, 2π)^d` (2 ≤ d ≤ 6)
//! with the probability measure, whose eigenfunctions are `exp(i⟨k, x⟩)` with
//! eigenvalue `|k|²`, and the round unit sphere `S²` with surface measure,
//! whose eigenfunctions are the complex spherical harmonics `Y_ℓ^m` with
//! eigenvalue `ℓ(ℓ + 1)`.
//!
//! Modes are totally ordered by eigenvalue and then lexicographically by
//! label. The position of a mode in that order is its rank; rank 0 is the
//! constant mode.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_TORUS_DIM: usize = 6;
pub const DEFAULT_MODE_CAP: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Torus(usize),
    Sphere2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    /// Lebesgue measure divided by `(2π)^d`.
    Probability,
    /// Standard surface measure, total mass `4π`.
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpectralModel {
    geometry: Geometry,
}

impl SpectralModel {
    pub fn torus(d: usize) -> Result<Self> {
        if !(2..=MAX_TORUS_DIM).contains(&d) {
            return Err(Error::InvalidArgument(format!(
                "torus dimension must lie in [2, {MAX_TORUS_DIM}], got {d}"
            )));
        }
        Ok(Self {
            geometry: Geometry::Torus(d),
        })
    }

    pub const fn sphere() -> Self {
        Self {
            geometry: Geometry::Sphere2,
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn dimension(&self) -> usize {
        match self.geometry {
            Geometry::Torus(d) => d,
            Geometry::Sphere2 => 2,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.geometry, Geometry::Torus(_))
    }

    pub fn measure(&self) -> Measure {
        match self.geometry {
            Geometry::Torus(_) => Measure::Probability,
            Geometry::Sphere2 => Measure::Surface,
        }
    }

    /// Leading Weyl constant `C` in `N(λ) ~ C λ^d`.
    ///
    /// For the torus this is the volume of the unit `d`-ball; for the unit
    /// sphere `N(λ) ~ λ²`.
    pub fn weyl_constant(&self) -> f64 {
        match self.geometry {
            Geometry::Torus(d) => unit_ball_volume(d),
            Geometry::Sphere2 => 1.0,
        }
    }

    pub fn constant_mode(&self) -> Mode {
        match self.geometry {
            Geometry::Torus(_) => Mode::lattice(&[]),
            Geometry::Sphere2 => Mode::harmonic(0, 0),
        }
    }

    /// Whether `mode` is an eigenfunction label of this model.
    pub fn contains(&self, mode: &Mode) -> bool {
        match (self.geometry, mode.label) {
            (Geometry::Torus(d), Label::Lattice(k)) => k[d..].iter().all(|&c| c == 0),
            (Geometry::Sphere2, Label::Harmonic { .. }) => true,
            _ => false,
        }
    }
}

impl fmt::Display for SpectralModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.geometry {
            Geometry::Torus(d) => write!(f, "T^{d}"),
            Geometry::Sphere2 => write!(f, "S^2"),
        }
    }
}

pub fn unit_ball_volume(d: usize) -> f64 {
    // ω_d = π^{d/2} / Γ(d/2 + 1), via ω_d = 2π/d · ω_{d-2}
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Eigenfunction label. Lattice vectors are zero-padded to `MAX_TORUS_DIM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Lattice([i32; MAX_TORUS_DIM]),
    Harmonic { degree: u32, order: i32 },
}

/// One eigenfunction: its label and its eigenvalue `λ²`.
///
/// The derived ordering compares the eigenvalue first and the label second,
/// which is exactly the canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    eigenvalue: u64,
    label: Label,
}

impl Mode {
    pub fn lattice(k: &[i32]) -> Self {
        assert!(k.len() <= MAX_TORUS_DIM, "lattice vector too long");
        let mut padded = [0i32; MAX_TORUS_DIM];
        padded[..k.len()].copy_from_slice(k);
        Self::from_padded(padded)
    }

    pub(crate) fn from_padded(k: [i32; MAX_TORUS_DIM]) -> Self {
        let eigenvalue = k.iter().map(|&c| (c as i64 * c as i64) as u64).sum();
        Self {
            eigenvalue,
            label: Label::Lattice(k),
        }
    }

    pub fn harmonic(degree: u32, order: i32) -> Self {
        assert!(
            order.unsigned_abs() <= degree,
            "spherical harmonic order {order} exceeds degree {degree}"
        );
        Self {
            eigenvalue: degree as u64 * (degree as u64 + 1),
            label: Label::Harmonic { degree, order },
        }
    }

    pub fn eigenvalue(&self) -> u64 {
        self.eigenvalue
    }

    pub fn frequency(&self) -> f64 {
        (self.eigenvalue as f64).sqrt()
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn lattice_vector(&self) -> Option<&[i32; MAX_TORUS_DIM]> {
        match &self.label {
            Label::Lattice(k) => Some(k),
            Label::Harmonic { .. } => None,
        }
    }

    pub fn harmonic_indices(&self) -> Option<(u32, i32)> {
        match self.label {
            Label::Harmonic { degree, order } => Some((degree, order)),
            Label::Lattice(_) => None,
        }
    }

    /// Sup-norm of the lattice vector (torus) or the degree (sphere).
    /// This is what a quadrature grid has to resolve.
    pub fn grid_band(&self) -> u64 {
        match self.label {
            Label::Lattice(k) => k.iter().map(|c| c.unsigned_abs() as u64).max().unwrap_or(0),
            Label::Harmonic { degree, .. } => degree as u64,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            Label::Lattice(k) => {
                let last = k.iter().rposition(|&c| c != 0).map_or(1, |i| i + 1);
                write!(f, "k=(")?;
                for (i, c) in k[..last.max(1)].iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Label::Harmonic { degree, order } => write!(f, "Y[{degree},{order}]"),
        }
    }
}

/// A nonempty eigenvalue level with the rank of its first mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Level {
    pub eigenvalue: u64,
    pub multiplicity: u64,
    pub start_rank: u64,
}

impl Level {
    pub fn frequency(&self) -> f64 {
        (self.eigenvalue as f64).sqrt()
    }

    pub fn last_rank(&self) -> u64 {
        self.start_rank + self.multiplicity - 1
    }
}

// ---------------------------------------------------------------------------
// eigenvalue thresholds

/// Largest integer `e` with `sqrt(e) <= lambda`.
pub(crate) fn max_eigen_at_most(lambda: f64) -> u64 {
    debug_assert!(lambda >= 0.0 && lambda.is_finite());
    let mut e = (lambda * lambda).floor() as u64;
    while ((e + 1) as f64).sqrt() <= lambda {
        e += 1;
    }
    while e > 0 && (e as f64).sqrt() > lambda {
        e -= 1;
    }
    e
}

/// Smallest integer `e` with `sqrt(e) >= a`.
pub(crate) fn min_eigen_at_least(a: f64) -> u64 {
    if a <= 0.0 {
        return 0;
    }
    let mut e = (a * a).ceil() as u64;
    while e > 0 && ((e - 1) as f64).sqrt() >= a {
        e -= 1;
    }
    while (e as f64).sqrt() < a {
        e += 1;
    }
    e
}

/// Largest integer `e` with `sqrt(e) < b`, if any.
pub(crate) fn max_eigen_below(b: f64) -> Option<u64> {
    let e = min_eigen_at_least(b);
    e.checked_sub(1)
}

fn max_degree_at_most(lambda: f64) -> u32 {
    let mut l = lambda.floor().max(0.0) as u32;
    while l > 0 && sphere_frequency(l) > lambda {
        l -= 1;
    }
    while sphere_frequency(l + 1) <= lambda {
        l += 1;
    }
    l
}

fn min_degree_at_least(a: f64) -> u32 {
    if a <= 0.0 {
        return 0;
    }
    let mut l = (a - 1.0).floor().max(0.0) as u32;
    while sphere_frequency(l) < a {
        l += 1;
    }
    while l > 0 && sphere_frequency(l - 1) >= a {
        l -= 1;
    }
    l
}

pub fn sphere_frequency(degree: u32) -> f64 {
    ((degree as u64 * (degree as u64 + 1)) as f64).sqrt()
}

// ---------------------------------------------------------------------------
// lattice counting

/// Representation counts `r_j(n) = #{k ∈ Z^j : |k|² = n}` for `j ≤ d`,
/// `n ≤ e_max`.
pub(crate) struct LatticeCounts {
    table: Vec<Vec<u64>>,
}

impl LatticeCounts {
    pub(crate) fn new(d: usize, e_max: u64) -> Self {
        let len = e_max as usize + 1;
        let mut table = Vec::with_capacity(d + 1);
        let mut r0 = vec![0u64; len];
        r0[0] = 1;
        table.push(r0);
        for j in 1..=d {
            let prev = &table[j - 1];
            let mut next = vec![0u64; len];
            for (n, slot) in next.iter_mut().enumerate() {
                let mut acc = prev[n];
                let mut t = 1usize;
                while t * t <= n {
                    acc += 2 * prev[n - t * t];
                    t += 1;
                }
                *slot = acc;
            }
            table.push(next);
        }
        Self { table }
    }

    pub(crate) fn r(&self, j: usize, n: u64) -> u64 {
        self.table[j][n as usize]
    }

    fn e_max(&self) -> u64 {
        self.table[0].len() as u64 - 1
    }
}

/// Number of `k ∈ Z^d` with `|k|² <= e`.
fn lattice_ball_count(d: usize, e: u64) -> u64 {
    if d == 0 {
        return 1;
    }
    if d == 1 {
        return 2 * e.isqrt() + 1;
    }
    if d >= 4 {
        let counts = LatticeCounts::new(d, e);
        return (0..=e).map(|n| counts.r(d, n)).sum();
    }
    let r = e.isqrt();
    let mut total = lattice_ball_count(d - 1, e);
    for t in 1..=r {
        total += 2 * lattice_ball_count(d - 1, e - t * t);
    }
    total
}

/// Visits every `k ∈ Z^d` with `lo <= |k|² <= hi` in lexicographic order.
pub(crate) fn visit_lattice_shell<F: FnMut(&[i32; MAX_TORUS_DIM])>(
    d: usize,
    lo: u64,
    hi: u64,
    visit: &mut F,
) {
    if lo > hi {
        return;
    }
    let mut k = [0i32; MAX_TORUS_DIM];
    shell_rec(d, 0, lo, hi, &mut k, visit);
}

fn shell_rec<F: FnMut(&[i32; MAX_TORUS_DIM])>(
    d: usize,
    i: usize,
    lo: u64,
    hi: u64,
    k: &mut [i32; MAX_TORUS_DIM],
    visit: &mut F,
) {
    if i + 1 == d {
        // last coordinate: t² ∈ [lo, hi]
        let t_hi = hi.isqrt() as i64;
        let t_lo = if lo == 0 {
            0
        } else {
            let s = lo.isqrt();
            (if s * s == lo { s } else { s + 1 }) as i64
        };
        if t_lo > t_hi {
            return;
        }
        for t in -t_hi..=-t_lo.max(1) {
            k[i] = t as i32;
            visit(k);
        }
        for t in t_lo..=t_hi {
            k[i] = t as i32;
            visit(k);
        }
        k[i] = 0;
        return;
    }
    let r = hi.isqrt() as i64;
    for t in -r..=r {
        let sq = (t * t) as u64;
        k[i] = t as i32;
        shell_rec(d, i + 1, lo.saturating_sub(sq), hi - sq, k, visit);
    }
    k[i] = 0;
}

// ---------------------------------------------------------------------------
// operations

/// Exact number of modes with frequency `<= lambda`, counted with multiplicity.
pub fn weyl_count(model: &SpectralModel, lambda: f64) -> u64 {
    if !(lambda >= 0.0) {
        return 0;
    }
    match model.geometry {
        Geometry::Torus(d) => lattice_ball_count(d, max_eigen_at_most(lambda)),
        Geometry::Sphere2 => {
            let l = max_degree_at_most(lambda) as u64;
            (l + 1) * (l + 1)
        }
    }
}

/// All modes with frequency `<= lambda_max` in canonical order (index = rank).
pub fn enumerate_modes(model: &SpectralModel, lambda_max: f64) -> Result<Vec<Mode>> {
    enumerate_modes_capped(model, lambda_max, DEFAULT_MODE_CAP)
}

pub fn enumerate_modes_capped(
    model: &SpectralModel,
    lambda_max: f64,
    cap: usize,
) -> Result<Vec<Mode>> {
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda_max must be finite and nonnegative, got {lambda_max}"
        )));
    }
    window_modes_capped(model, 0.0, lambda_max, true, cap)
}

/// Modes with frequency in `[a, b)`, canonical order.
pub fn window_modes(model: &SpectralModel, a: f64, b: f64) -> Result<Vec<Mode>> {
    if !b.is_finite() {
        return Err(Error::InvalidArgument(
            "cannot enumerate an unbounded window".into(),
        ));
    }
    window_modes_capped(model, a, b, false, DEFAULT_MODE_CAP)
}

fn window_modes_capped(
    model: &SpectralModel,
    a: f64,
    b: f64,
    closed: bool,
    cap: usize,
) -> Result<Vec<Mode>> {
    let count = count_window(model, a, b, closed);
    if count > cap as u64 {
        return Err(Error::Resource {
            what: "mode enumeration",
            requested: count as u128,
            cap: cap as u128,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    visit_modes(model, a, b, closed, |m| out.push(m));
    out.sort_unstable();
    Ok(out)
}

fn count_window(model: &SpectralModel, a: f64, b: f64, closed: bool) -> u64 {
    let upper = if closed {
        weyl_count(model, b)
    } else {
        match model.geometry {
            Geometry::Torus(d) => match max_eigen_below(b) {
                Some(e) => lattice_ball_count(d, e),
                None => 0,
            },
            Geometry::Sphere2 => {
                let l = min_degree_at_least(b) as u64;
                l * l
            }
        }
    };
    let below = match model.geometry {
        Geometry::Torus(d) => match min_eigen_at_least(a).checked_sub(1) {
            Some(e) => lattice_ball_count(d, e),
            None => 0,
        },
        Geometry::Sphere2 => {
            let l = min_degree_at_least(a) as u64;
            l * l
        }
    };
    upper.saturating_sub(below)
}

/// Visits modes with frequency in `[a, b)` (or `[a, b]` when `closed`), not
/// in canonical order.
pub(crate) fn visit_modes<F: FnMut(Mode)>(
    model: &SpectralModel,
    a: f64,
    b: f64,
    closed: bool,
    mut visit: F,
) {
    let a = a.max(0.0);
    match model.geometry {
        Geometry::Torus(d) => {
            let lo = min_eigen_at_least(a);
            let hi = if closed {
                Some(max_eigen_at_most(b))
            } else {
                max_eigen_below(b)
            };
            if let Some(hi) = hi {
                visit_lattice_shell(d, lo, hi, &mut |k| visit(Mode::from_padded(*k)));
            }
        }
        Geometry::Sphere2 => {
            let lo = min_degree_at_least(a);
            let hi = if closed {
                Some(max_degree_at_most(b))
            } else {
                min_degree_at_least(b).checked_sub(1)
            };
            if let Some(hi) = hi {
                for l in lo..=hi {
                    for m in -(l as i32)..=(l as i32) {
                        visit(Mode::harmonic(l, m));
                    }
                }
            }
        }
    }
}

/// Number of modes with eigenvalue strictly below `eigenvalue`.
fn modes_below(model: &SpectralModel, eigenvalue: u64) -> u64 {
    match model.geometry {
        Geometry::Torus(d) => match eigenvalue.checked_sub(1) {
            Some(e) => lattice_ball_count(d, e),
            None => 0,
        },
        Geometry::Sphere2 => {
            // ℓ(ℓ+1) < E  ⇔  ℓ < ℓ*(E)
            let mut l = 0u64;
            while l * (l + 1) < eigenvalue {
                l += 1;
            }
            l * l
        }
    }
}

/// Canonical rank of `mode` in `model`.
pub fn rank_of(model: &SpectralModel, mode: &Mode) -> u64 {
    debug_assert!(model.contains(mode));
    match mode.label {
        Label::Harmonic { degree, order } => {
            let l = degree as u64;
            l * l + (order + degree as i32) as u64
        }
        Label::Lattice(k) => {
            let d = model.dimension();
            let e = mode.eigenvalue;
            let counts = LatticeCounts::new(d, e);
            let mut offset = 0u64;
            let mut rem = e;
            for (i, &ki) in k[..d].iter().enumerate() {
                let r = rem.isqrt() as i64;
                for t in -r..(ki as i64) {
                    offset += counts.r(d - i - 1, rem - (t * t) as u64);
                }
                rem -= (ki as i64 * ki as i64) as u64;
            }
            modes_below(model, e) + offset
        }
    }
}

/// The mode of canonical rank `n`.
pub fn mode_at_rank(model: &SpectralModel, n: u64) -> Mode {
    match model.geometry {
        Geometry::Sphere2 => {
            let l = n.isqrt();
            let m = n - l * l;
            Mode::harmonic(l as u32, m as i32 - l as i32)
        }
        Geometry::Torus(d) => {
            let counts = counts_covering_rank(d, n);
            let mut below = 0u64;
            let mut e = 0u64;
            loop {
                let r = counts.r(d, e);
                if below + r > n {
                    break;
                }
                below += r;
                e += 1;
            }
            let mut offset = n - below;
            let mut rem = e;
            let mut k = [0i32; MAX_TORUS_DIM];
            for (i, slot) in k.iter_mut().enumerate().take(d) {
                let r = rem.isqrt() as i64;
                let mut chosen = None;
                for t in -r..=r {
                    let sq = (t * t) as u64;
                    let c = counts.r(d - i - 1, rem - sq);
                    if offset < c {
                        chosen = Some(t);
                        break;
                    }
                    offset -= c;
                }
                let t = chosen.expect("rank offset lies inside its level");
                *slot = t as i32;
                rem -= (t * t) as u64;
            }
            Mode::from_padded(k)
        }
    }
}

fn counts_covering_rank(d: usize, n: u64) -> LatticeCounts {
    let omega = unit_ball_volume(d);
    let guess = ((n as f64 + 1.0) / omega).powf(2.0 / d as f64);
    let mut e_max = (guess * 1.2 + 8.0) as u64;
    loop {
        let counts = LatticeCounts::new(d, e_max);
        let total: u64 = (0..=e_max).map(|e| counts.r(d, e)).sum();
        if total > n {
            return counts;
        }
        e_max *= 2;
    }
}

/// Frequency `λ_n` of the rank-`n` mode.
pub fn frequency_of_rank(model: &SpectralModel, n: u64) -> f64 {
    mode_at_rank(model, n).frequency()
}

/// Nonempty eigenvalue levels with eigenvalue `<= e_max`, ascending.
pub fn levels_up_to(model: &SpectralModel, e_max: u64) -> Vec<Level> {
    let mut out = Vec::new();
    let mut start = 0u64;
    match model.geometry {
        Geometry::Sphere2 => {
            let mut l = 0u64;
            while l * (l + 1) <= e_max {
                let mult = 2 * l + 1;
                out.push(Level {
                    eigenvalue: l * (l + 1),
                    multiplicity: mult,
                    start_rank: start,
                });
                start += mult;
                l += 1;
            }
        }
        Geometry::Torus(d) => {
            let counts = LatticeCounts::new(d, e_max);
            debug_assert_eq!(counts.e_max(), e_max);
            for e in 0..=e_max {
                let mult = counts.r(d, e);
                if mult > 0 {
                    out.push(Level {
                        eigenvalue: e,
                        multiplicity: mult,
                        start_rank: start,
                    });
                    start += mult;
                }
            }
        }
    }
    out
}

/// The first nonempty level strictly above `eigenvalue`.
pub fn next_level_above(model: &SpectralModel, eigenvalue: u64) -> u64 {
    match model.geometry {
        Geometry::Sphere2 => {
            let mut l = 0u64;
            while l * (l + 1) <= eigenvalue {
                l += 1;
            }
            l * (l + 1)
        }
        Geometry::Torus(_) => {
            // every nonnegative integer is a sum of four squares, and d >= 2
            // reaches all sums of two squares; scan forward
            let d = model.dimension();
            let mut e = eigenvalue + 1;
            loop {
                if is_sum_of_squares(d, e) {
                    return e;
                }
                e += 1;
            }
        }
    }
}

fn is_sum_of_squares(d: usize, e: u64) -> bool {
    if d == 0 {
        return e == 0;
    }
    if d >= 4 {
        return true;
    }
    let r = e.isqrt();
    (0..=r).any(|t| is_sum_of_squares(d - 1, e - t * t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_ball(d: usize, e: i64) -> u64 {
        let r = (e as f64).sqrt() as i64 + 1;
        let mut count = 0u64;
        let mut k = vec![-r; d];
        loop {
            if k.iter().map(|c| c * c).sum::<i64>() <= e {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == d {
                    return count;
                }
                k[i] += 1;
                if k[i] <= r {
                    break;
                }
                k[i] = -r;
                i += 1;
            }
        }
    }

    #[test]
    fn torus_dimension_range() {
        assert!(SpectralModel::torus(1).is_err());
        assert!(SpectralModel::torus(7).is_err());
        for d in 2..=6 {
            assert_eq!(SpectralModel::torus(d).unwrap().dimension(), d);
        }
        assert_eq!(SpectralModel::sphere().dimension(), 2);
    }

    #[test]
    fn torus_zero_frequency_is_constant_only() {
        let t2 = SpectralModel::torus(2).unwrap();
        let modes = enumerate_modes(&t2, 0.0).unwrap();
        assert_eq!(modes, vec![Mode::lattice(&[0, 0])]);
    }

    #[test]
    fn torus_unit_frequency() {
        let t2 = SpectralModel::torus(2).unwrap();
        let modes = enumerate_modes(&t2, 1.0).unwrap();
        let expected = vec![
            Mode::lattice(&[0, 0]),
            Mode::lattice(&[-1, 0]),
            Mode::lattice(&[0, -1]),
            Mode::lattice(&[0, 1]),
            Mode::lattice(&[1, 0]),
        ];
        assert_eq!(modes, expected);
    }

    #[test]
    fn sphere_three_levels() {
        let s2 = SpectralModel::sphere();
        let modes = enumerate_modes(&s2, 6f64.sqrt()).unwrap();
        assert_eq!(modes.len(), 9);
        let eig: Vec<u64> = modes.iter().map(|m| m.eigenvalue()).collect();
        assert_eq!(eig, vec![0, 2, 2, 2, 6, 6, 6, 6, 6]);
        assert_eq!(modes[1], Mode::harmonic(1, -1));
        assert_eq!(modes[8], Mode::harmonic(2, 2));
    }

    #[test]
    fn weyl_count_values() {
        let t2 = SpectralModel::torus(2).unwrap();
        assert_eq!(weyl_count(&t2, 10.0), brute_force_ball(2, 100));
        assert_eq!(brute_force_ball(2, 100), 317);
        let s2 = SpectralModel::sphere();
        assert_eq!(weyl_count(&s2, sphere_frequency(3)), 16);
        assert_eq!(weyl_count(&s2, sphere_frequency(3) - 1e-9), 9);
        for d in 2..=4 {
            let t = SpectralModel::torus(d).unwrap();
            for e in [0i64, 1, 2, 7, 30, 50] {
                assert_eq!(
                    weyl_count(&t, (e as f64).sqrt()),
                    brute_force_ball(d, e),
                    "d={d} e={e}"
                );
            }
        }
        let t6 = SpectralModel::torus(6).unwrap();
        assert_eq!(weyl_count(&t6, 3f64.sqrt()), brute_force_ball(6, 3));
    }

    #[test]
    fn gauss_circle_asymptotic() {
        let t2 = SpectralModel::torus(2).unwrap();
        let n = weyl_count(&t2, 50.0) as f64;
        let main = PI * 2500.0;
        assert!((0.95 * main..=1.05 * main).contains(&n));
        let t3 = SpectralModel::torus(3).unwrap();
        let n = weyl_count(&t3, 50.0) as f64;
        let main = unit_ball_volume(3) * 50f64.powi(3);
        assert!((n / main - 1.0).abs() < 0.05);
    }

    #[test]
    fn rank_frequency_examples() {
        let t2 = SpectralModel::torus(2).unwrap();
        assert_eq!(frequency_of_rank(&t2, 0), 0.0);
        assert_eq!(frequency_of_rank(&t2, 4), 1.0);
        assert_eq!(frequency_of_rank(&t2, 316), 10.0);
        assert!(frequency_of_rank(&t2, 317) > 10.0);
    }

    #[test]
    fn rank_roundtrip_matches_enumeration() {
        for model in [
            SpectralModel::torus(2).unwrap(),
            SpectralModel::torus(3).unwrap(),
            SpectralModel::torus(5).unwrap(),
            SpectralModel::sphere(),
        ] {
            let modes = enumerate_modes(&model, 4.5).unwrap();
            assert_eq!(modes.len() as u64, weyl_count(&model, 4.5));
            for (i, m) in modes.iter().enumerate() {
                assert_eq!(rank_of(&model, m), i as u64, "{model} {m}");
                assert_eq!(mode_at_rank(&model, i as u64), *m, "{model} rank {i}");
            }
        }
    }

    #[test]
    fn window_is_half_open() {
        let t2 = SpectralModel::torus(2).unwrap();
        let w = window_modes(&t2, 5.0, 6.0).unwrap();
        assert!(w.contains(&Mode::lattice(&[3, 4])));
        assert_eq!(w.len(), 40);
        let w = window_modes(&t2, 4.0, 5.0).unwrap();
        assert!(!w.contains(&Mode::lattice(&[3, 4])));
        let s2 = SpectralModel::sphere();
        let w = window_modes(&s2, 1.0, 3.0).unwrap();
        assert_eq!(w.len(), 8);
    }

    #[test]
    fn levels_cover_ranks() {
        let t3 = SpectralModel::torus(3).unwrap();
        let levels = levels_up_to(&t3, 20);
        let total: u64 = levels.iter().map(|l| l.multiplicity).sum();
        assert_eq!(total, weyl_count(&t3, 20f64.sqrt()));
        assert!(levels.iter().all(|l| l.eigenvalue != 7 && l.eigenvalue != 15));
        assert_eq!(next_level_above(&t3, 6), 8);
        assert_eq!(next_level_above(&SpectralModel::sphere(), 2), 6);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let t3 = SpectralModel::torus(3).unwrap();
        assert!(matches!(
            enumerate_modes_capped(&t3, 10.0, 100),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn eigenvalue_thresholds() {
        assert_eq!(max_eigen_at_most(10.0), 100);
        assert_eq!(max_eigen_at_most(2f64.sqrt()), 2);
        assert_eq!(min_eigen_at_least(5.0), 25);
        assert_eq!(min_eigen_at_least(4.9), 25);
        assert_eq!(max_eigen_below(5.0), Some(24));
        assert_eq!(max_eigen_below(0.0), None);
    }
}
