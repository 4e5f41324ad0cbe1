//! Spectral projections and frequency localization: rank truncation
//! `E_ν`/`R_ν`, sharp windows `χ_k`, the smooth low/high split
//! `L_λ = ψ(P/λ)`, `H_λ = ρ(P/λ)`, and Littlewood–Paley blocks
//! `S_j = β(2^{-j} P)`, where `P = √(−Δ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::spectra::{mode_at_rank, rank_of, Mode};

/// `exp(−1/t)` for `t > 0`, else 0.
fn flat_bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// C^∞ step: 0 for `t <= 0`, 1 for `t >= 1`, strictly increasing between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = flat_bump(t);
    a / (a + flat_bump(1.0 - t))
}

/// The cutoff functions `ψ`, `ρ = 1 − ψ` and the Littlewood–Paley bump `β`.
///
/// `ψ = 1` on `[0, 2]`, `ψ = 0` on `[4, ∞)`, nonincreasing in between.
/// `β(r) = ψ₀(r) − ψ₀(2r)` with `ψ₀ = 1` on `[0, 1]` and `0` on `[2, ∞)`,
/// so `β` is supported in `(1/2, 2)` and its dyadic dilates telescope to 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CutoffProfile;

impl CutoffProfile {
    pub fn psi(&self, r: f64) -> f64 {
        1.0 - smooth_step((r - 2.0) / 2.0)
    }

    pub fn rho(&self, r: f64) -> f64 {
        smooth_step((r - 2.0) / 2.0)
    }

    fn dyadic_step(&self, r: f64) -> f64 {
        1.0 - smooth_step(r - 1.0)
    }

    pub fn beta(&self, r: f64) -> f64 {
        self.dyadic_step(r) - self.dyadic_step(2.0 * r)
    }
}

/// `(E_ν f, R_ν f)`: the coefficients of ranks `0..=ν` and the rest.
pub fn project_rank(f: &SpectralField, nu: u64) -> (SpectralField, SpectralField) {
    let threshold = mode_at_rank(f.model(), nu);
    (
        f.filter(|m| *m <= threshold),
        f.filter(|m| *m > threshold),
    )
}

/// Keeps modes with frequency in the half-open window `[a, b)`; `b` may be
/// `f64::INFINITY`.
pub fn project_window(f: &SpectralField, a: f64, b: f64) -> Result<SpectralField> {
    if !(a >= 0.0) || !(a <= b) {
        return Err(Error::InvalidArgument(format!("invalid window [{a}, {b})")));
    }
    Ok(f.filter(|m| {
        let nu = m.frequency();
        nu >= a && nu < b
    }))
}

/// Unit spectral cluster `χ_k f`, frequencies in `[k, k + 1)`.
pub fn cluster(f: &SpectralField, k: u64) -> SpectralField {
    f.filter(|m| {
        let nu = m.frequency();
        nu >= k as f64 && nu < (k + 1) as f64
    })
}

/// Tail projector `R_λ f`, frequencies in `[2λ, ∞)`.
pub fn tail(f: &SpectralField, lambda: f64) -> SpectralField {
    f.filter(|m| m.frequency() >= 2.0 * lambda)
}

/// `(L_λ f, H_λ f)`. The high part is formed as `c − ψc`, so the two parts
/// add back to `f` up to one rounding per coefficient.
pub fn smooth_split(
    f: &SpectralField,
    lambda: f64,
    profile: &CutoffProfile,
) -> Result<(SpectralField, SpectralField)> {
    if !(lambda >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "split frequency must be >= 1, got {lambda}"
        )));
    }
    let low = f.map_coefficients(|m, c| c * profile.psi(m.frequency() / lambda));
    let high = f.map_coefficients(|m, c| c - c * profile.psi(m.frequency() / lambda));
    Ok((low, high))
}

/// Littlewood–Paley block `S_j f = β(2^{-j} P) f`.
pub fn lp_block(f: &SpectralField, j: i32, profile: &CutoffProfile) -> SpectralField {
    let scale = 2f64.powi(-j);
    f.map_coefficients(|m, c| c * profile.beta(m.frequency() * scale))
}

/// Range of block indices `j` that can be nonzero on `f`.
pub fn lp_block_range(f: &SpectralField) -> std::ops::RangeInclusive<i32> {
    let top = f.max_frequency().max(1.0);
    // β(r/2^j) ≠ 0 needs 2^{j-1} < r < 2^{j+1}; nonzero frequencies are >= 1
    -1..=(top.log2().ceil() as i32 + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemainderNorm {
    HMinusOne,
    L2,
}

fn weight(norm: RemainderNorm, mode: &Mode, c: &Complex64) -> f64 {
    match norm {
        RemainderNorm::HMinusOne => c.norm_sqr() / (1.0 + mode.eigenvalue() as f64),
        RemainderNorm::L2 => c.norm_sqr(),
    }
}

pub fn field_norm(h: &SpectralField, norm: RemainderNorm) -> f64 {
    h.iter().map(|(m, c)| weight(norm, m, c)).sum::<f64>().sqrt()
}

/// `‖R_ν h‖` in the chosen norm.
pub fn remainder_norm(h: &SpectralField, nu: u64, norm: RemainderNorm) -> f64 {
    field_norm(&project_rank(h, nu).1, norm)
}

/// Smallest `ν` with `‖R_ν h‖ < ε`.
///
/// The remainder only changes when `ν` passes the rank of a supported mode,
/// so the scan runs over the support of `h` in canonical order and ranks a
/// single mode at the end.
pub fn min_rank_for_tolerance(h: &SpectralField, eps: f64, norm: RemainderNorm) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be > 0, got {eps}")));
    }
    let modes: Vec<(&Mode, f64)> = h.iter().map(|(m, c)| (m, weight(norm, m, c))).collect();
    // tail_after[i] = Σ_{j > i} w_j, summed from the top
    let mut tail_after = vec![0.0; modes.len()];
    let mut acc = 0.0;
    for i in (0..modes.len()).rev() {
        tail_after[i] = acc;
        acc += modes[i].1;
    }
    let constant = h.model().constant_mode();
    let beyond_zero: f64 = modes
        .iter()
        .filter(|(m, _)| **m != constant)
        .map(|(_, w)| w)
        .sum();
    if beyond_zero.sqrt() < eps {
        return Ok(0);
    }
    let hit = (0..modes.len())
        .find(|&i| tail_after[i].sqrt() < eps)
        .expect("the remainder past the last supported mode is zero");
    Ok(rank_of(h.model(), modes[hit].0))
}
