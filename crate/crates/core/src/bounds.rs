//! Exponent laws for bilinear growth, rank budgets and L^p growth, plus the
//! right-hand sides of the bilinear quasimode estimates.

use crate::error::{Error, Result};
use crate::field::{lp_norm, multiply, sobolev_norm};
use crate::project::tail;
use crate::quasimode::Quasimode;

/// `max(ln x, 1)`: the log factor used by the three-dimensional laws.
pub fn clamped_log(x: f64) -> f64 {
    x.ln().max(1.0)
}

fn check_args(d: usize, x: f64) {
    assert!(d >= 2, "dimension must be >= 2, got {d}");
    assert!(x >= 1.0, "argument must be >= 1, got {x}");
}

/// Bilinear growth law `Λ(d, ν)`.
pub fn lambda_exponent(d: usize, nu: f64) -> f64 {
    check_args(d, nu);
    match d {
        2 => nu.powf(0.25),
        3 => (nu * clamped_log(nu)).sqrt(),
        _ => nu.powf((d as f64 - 2.0) / 2.0),
    }
}

/// Rank-budget law `Ω(d, μ)`.
pub fn omega_exponent(d: usize, mu: f64) -> f64 {
    check_args(d, mu);
    match d {
        2 => mu.sqrt(),
        3 => (mu * clamped_log(mu)).powf(1.5),
        _ => mu.powf((d * (d - 2)) as f64 / 2.0),
    }
}

/// The two branches of the L^p growth exponent, `(point-concentrating, tube)`.
pub fn sigma_branches(d: usize, p: f64) -> (f64, f64) {
    let gap = 0.5 - 1.0 / p;
    let d = d as f64;
    (d * gap - 0.5, (d - 1.0) / 2.0 * gap)
}

/// L^p growth exponent `σ(p)`, the larger of the two branches.
pub fn sigma_p(d: usize, p: f64) -> f64 {
    assert!(p >= 2.0, "sigma_p needs p >= 2, got {p}");
    let (a, b) = sigma_branches(d, p);
    a.max(b)
}

/// Exponent where the two branches of `σ` meet.
pub fn sigma_crossover(d: usize) -> f64 {
    2.0 * (d as f64 + 1.0) / (d as f64 - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    LowDim,
    /// Adds the Sobolev tail of the lower-frequency factor above `2μ`,
    /// weighted by `μ^{-N + d/2 - σ(lebesgue)}`.
    HighDimTail { n: f64, lebesgue: f64 },
}

fn ordered<'a>(u: &'a Quasimode, v: &'a Quasimode) -> Result<(&'a Quasimode, &'a Quasimode)> {
    if u.model() != v.model() {
        return Err(Error::ModelMismatch {
            left: u.model().to_string(),
            right: v.model().to_string(),
        });
    }
    if !(u.lambda.min(v.lambda) >= 1.0) {
        return Err(Error::InvalidArgument("bilinear bounds need frequencies >= 1".into()));
    }
    // (high, low); ties keep v as the low factor
    Ok(if u.lambda < v.lambda { (v, u) } else { (u, v) })
}

/// `μ^{-N+d/2-σ(q)}·‖(I−Δ)^{N/2} R_μ v‖₂` for the low factor `v` at `μ`.
pub fn tail_term(low: &Quasimode, n: f64, lebesgue: f64) -> Result<f64> {
    let d = low.model().dimension();
    if !(n > d as f64 / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "tail smoothness N must exceed d/2 = {}, got {n}",
            d as f64 / 2.0
        )));
    }
    if !(lebesgue >= 2.0) {
        return Err(Error::InvalidArgument(format!("tail exponent q must be >= 2, got {lebesgue}")));
    }
    let mu = low.lambda;
    let high_part = tail(&low.field, mu);
    if high_part.is_empty() {
        return Ok(0.0);
    }
    let weight = mu.powf(-n + d as f64 / 2.0 - sigma_p(d, lebesgue));
    Ok(weight * sobolev_norm(&high_part, n))
}

pub fn rhs_bilinear(u: &Quasimode, v: &Quasimode, variant: Variant) -> Result<f64> {
    let (high, low) = ordered(u, v)?;
    let d = low.model().dimension();
    let growth = lambda_exponent(d, low.lambda);
    Ok(match variant {
        Variant::LowDim => growth * high.quality * low.quality,
        Variant::HighDimTail { n, lebesgue } => {
            growth * high.quality * (low.quality + tail_term(low, n, lebesgue)?)
        }
    })
}

/// `‖uv‖₂ / rhs_bilinear(u, v, variant)`.
pub fn bilinear_ratio(u: &Quasimode, v: &Quasimode, variant: Variant) -> Result<f64> {
    let rhs = rhs_bilinear(u, v, variant)?;
    let product = lp_norm(&multiply(&u.field, &v.field)?, 2.0)?.value;
    Ok(product / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralField;
    use crate::quasimode::{cluster_quasimode, Family, Weights};
    use crate::spectra::{Mode, SpectralModel};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn growth_law_values() {
        assert!(close(lambda_exponent(2, 16.0), 2.0, 1e-15));
        assert!(close(lambda_exponent(3, E), E.sqrt(), 1e-15));
        assert!(close(lambda_exponent(3, E), 1.648_721_270_700_128_1, 1e-15));
        assert!(close(lambda_exponent(4, 9.0), 9.0, 1e-15));
        assert!(close(lambda_exponent(6, 3.0), 9.0, 1e-14));
        assert_eq!(lambda_exponent(3, 1.0), 1.0);
    }

    #[test]
    fn budget_law_values() {
        assert!(close(omega_exponent(2, 16.0), 4.0, 1e-15));
        assert!(close(omega_exponent(4, 2.0), 16.0, 1e-15));
        assert!(close(omega_exponent(3, E), E.powf(1.5), 1e-14));
        assert!(close(omega_exponent(3, E), 4.481_689_070_338_065, 1e-14));
    }

    #[test]
    fn sigma_values() {
        assert!(close(sigma_p(2, 4.0), 0.125, 1e-15));
        assert!(close(sigma_p(5, 4.0), 0.75, 1e-15));
        for d in 4..=7 {
            assert!(close(sigma_p(d, 4.0), (d as f64 - 2.0) / 4.0, 1e-15));
        }
        assert_eq!(sigma_p(3, 2.0), 0.0);
        // d = 2: equate 2(1/2 − 1/p) − 1/2 with (1/2)(1/2 − 1/p) → p = 6
        assert!(close(sigma_crossover(2), 6.0, 1e-15));
        assert!(close(sigma_p(2, 6.0), 1.0 / 6.0, 1e-15));
    }

    #[test]
    fn branches_meet_at_crossover() {
        for d in 2..=10 {
            let p = sigma_crossover(d);
            let (a, b) = sigma_branches(d, p);
            assert!((a - b).abs() <= 1e-12, "d={d}: {a} vs {b}");
            // tube branch below, point branch above
            let (a, b) = sigma_branches(d, p - 0.5);
            assert!(b > a);
            let (a, b) = sigma_branches(d, p + 0.5);
            assert!(a > b);
        }
    }

    fn eig(model: SpectralModel, k: &[i32]) -> Quasimode {
        Quasimode::eigenfunction(model, Mode::lattice(k)).unwrap()
    }

    #[test]
    fn unimodular_products() {
        let t2 = SpectralModel::torus(2).unwrap();
        let r = bilinear_ratio(&eig(t2, &[1, 0]), &eig(t2, &[0, 1]), Variant::LowDim).unwrap();
        assert!(close(r, 1.0, 1e-14));
        let r = bilinear_ratio(&eig(t2, &[1, 0]), &eig(t2, &[1, 0]), Variant::LowDim).unwrap();
        assert!(close(r, 1.0, 1e-14));
        let rhs = rhs_bilinear(&eig(t2, &[16, 0]), &eig(t2, &[0, 16]), Variant::LowDim).unwrap();
        assert!(close(rhs, 2.0, 1e-14));
    }

    #[test]
    fn tail_vanishes_below_twice_mu() {
        let t6 = SpectralModel::torus(6).unwrap();
        let u = cluster_quasimode(t6, 4.0, 0.5, Weights::Random(1)).unwrap();
        let v = eig(t6, &[2, 1, 1, 1, 1, 1]);
        let variant = Variant::HighDimTail { n: 4.0, lebesgue: 4.0 };
        assert_eq!(tail_term(&v, 4.0, 4.0).unwrap(), 0.0);
        assert_eq!(
            rhs_bilinear(&u, &v, variant).unwrap(),
            rhs_bilinear(&u, &v, Variant::LowDim).unwrap()
        );
        assert!(tail_term(&v, 3.0, 4.0).is_err());
        assert!(rhs_bilinear(&u, &v, Variant::HighDimTail { n: 2.5, lebesgue: 4.0 }).is_err());
    }

    #[test]
    fn tail_is_attached_to_low_factor() {
        let t6 = SpectralModel::torus(6).unwrap();
        let mu = 3.0;
        let low_field = SpectralField::from_coefficients(
            t6,
            [
                (Mode::lattice(&[3, 0, 0, 0, 0, 0]), Complex64::new(1.0, 0.0)),
                (Mode::lattice(&[12, 0, 0, 0, 0, 0]), Complex64::new(1e-3, 0.0)),
            ],
        )
        .unwrap();
        let low = Quasimode::new(low_field, mu, Family::Custom).unwrap();
        let high = eig(t6, &[0, 9, 0, 0, 0, 0]);
        let (n, q) = (4.0, 4.0);
        // oracle: only the mode at 4μ lies in [2μ, ∞)
        let expect = mu.powf(-n + 3.0 - sigma_p(6, q)) * 1e-3 * (1.0 + 144.0f64).powf(n / 2.0);
        let got = tail_term(&low, n, q).unwrap();
        assert!(close(got, expect, 1e-12));
        let lowdim = rhs_bilinear(&high, &low, Variant::LowDim).unwrap();
        let tailed = rhs_bilinear(&high, &low, Variant::HighDimTail { n, lebesgue: q }).unwrap();
        assert!(close(tailed - lowdim, lambda_exponent(6, mu) * high.quality * got, 1e-12));
        // argument order does not matter
        let swapped = rhs_bilinear(&low, &high, Variant::HighDimTail { n, lebesgue: q }).unwrap();
        assert_eq!(tailed, swapped);
    }

    #[test]
    fn model_mismatch_is_an_error() {
        let a = eig(SpectralModel::torus(2).unwrap(), &[1, 0]);
        let b = eig(SpectralModel::torus(3).unwrap(), &[1, 0, 0]);
        assert!(matches!(rhs_bilinear(&a, &b, Variant::LowDim), Err(Error::ModelMismatch { .. })));
    }

    proptest! {
        #[test]
        fn growth_laws_nondecreasing(d in 2usize..=6, x in 1.0f64..1e4, step in 0.0f64..1e3) {
            let y = x + step;
            if d != 3 || x >= E {
                prop_assert!(lambda_exponent(d, y) >= lambda_exponent(d, x));
                prop_assert!(omega_exponent(d, y) >= omega_exponent(d, x));
            }
        }

        #[test]
        fn sigma_nondecreasing_and_continuous(d in 2usize..=8, p in 2.0f64..50.0, step in 0.0f64..10.0) {
            prop_assert!(sigma_p(d, p + step) >= sigma_p(d, p));
            let h = 1e-9;
            prop_assert!((sigma_p(d, p + h) - sigma_p(d, p)).abs() <= d as f64 * h);
        }

        #[test]
        fn rhs_is_homogeneous(seed in 0u64..1000, amp in 0.1f64..10.0) {
            let t2 = SpectralModel::torus(2).unwrap();
            let u = cluster_quasimode(t2, 9.0, 1.0, Weights::Random(seed)).unwrap();
            let v = cluster_quasimode(t2, 4.0, 1.0, Weights::Random(seed + 1)).unwrap();
            let base = rhs_bilinear(&u, &v, Variant::LowDim).unwrap();
            let scaled = rhs_bilinear(&u.scaled(Complex64::new(amp, 0.0)).unwrap(), &v, Variant::LowDim).unwrap();
            prop_assert!((scaled - amp * base).abs() <= 1e-12 * amp * base);
        }

        #[test]
        fn tail_variant_dominates(seed in 0u64..200, n_extra in 0.1f64..3.0) {
            let t3 = SpectralModel::torus(3).unwrap();
            let low_field = cluster_quasimode(t3, 2.0, 1.0, Weights::Random(seed)).unwrap().field
                .add(&SpectralField::single(t3, Mode::lattice(&[0, 5, 1])).unwrap()).unwrap();
            let low = Quasimode::new(low_field, 2.0, Family::Custom).unwrap();
            let high = cluster_quasimode(t3, 6.0, 1.0, Weights::Random(seed + 7)).unwrap();
            let variant = Variant::HighDimTail { n: 1.5 + n_extra, lebesgue: 4.0 };
            prop_assert!(rhs_bilinear(&high, &low, variant).unwrap() > rhs_bilinear(&high, &low, Variant::LowDim).unwrap());
        }
    }
}
