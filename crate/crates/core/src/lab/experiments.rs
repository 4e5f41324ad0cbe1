//! The six experiment runners. Sweep points run on a rayon pool and are
//! collected in sweep order, so output does not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{
    ExperimentConfig, ExperimentKind, FamilyKind, FamilySpec, VariantKind, WeightKind,
};
use super::fit::{fit_exponent, FitResult, LogCorrection};
use super::table::{Cell, Table};
use crate::bounds::{bilinear_ratio, lambda_exponent, tail_term, Variant};
use crate::error::{Error, Result};
use crate::field::{lp_norm, multiply, sobolev_norm, SpectralField};
use crate::project::{
    cluster, lp_block, lp_block_range, min_rank_for_tolerance, project_window, remainder_norm,
    smooth_split, CutoffProfile, RemainderNorm,
};
use crate::quasimode::{
    cluster_quasimode, lattice_cap, sparse_cluster_quasimode, sphere_extremal, Extremal, Quasimode,
    Weights,
};
use crate::spectra::{
    enumerate_modes, frequency_of_rank, levels_up_to, next_level_above, weyl_count, Geometry, Mode,
    SpectralModel, MAX_TORUS_DIM,
};

/// Relative roundoff allowance when auditing inequalities with constant 1.
pub const AUDIT_SLACK: f64 = 1e-12;
/// Default trial count of the randomized cluster audit.
pub const DEFAULT_TRIALS: usize = 32;
/// Default support size of the random fields in the split audit.
pub const DEFAULT_SPLIT_MODES: usize = 512;
/// Default tolerance of the split audit.
pub const DEFAULT_SPLIT_TOLERANCE: f64 = 1e-10;
/// Counts up to this size are also checked against explicit enumeration.
const WEYL_ENUMERATION_LIMIT: u64 = 200_000;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator seed of one sweep point, mixed from the config seed and the sweep key.
pub fn point_seed(seed: u64, key: f64) -> u64 {
    splitmix64(seed ^ splitmix64(key.to_bits()))
}

/// Independent sub-stream `i` of a seed.
pub fn substream(seed: u64, i: u64) -> u64 {
    splitmix64(seed ^ splitmix64(i.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    High,
    Low,
}

fn positive_integer(value: f64, what: &str) -> Result<u32> {
    if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as u32)
    } else {
        Err(Error::Config(format!("{what} needs positive integer sweep values, got {value}")))
    }
}

/// One member of a configured family at `value` (a frequency, or a degree
/// for sphere families). Eigenfunction pairs sit on different axes so the
/// high and low factors are distinct.
pub fn build_quasimode(
    family: &FamilySpec,
    model: SpectralModel,
    value: f64,
    role: Role,
    seed: u64,
) -> Result<Quasimode> {
    let torus_only = |name: &str| -> Result<usize> {
        match model.geometry() {
            Geometry::Torus(d) => Ok(d),
            Geometry::Sphere2 => Err(Error::Config(format!("the {name} family lives on tori"))),
        }
    };
    match family.kind {
        FamilyKind::Cluster => {
            let weights = match family.weights {
                WeightKind::Uniform => Weights::Uniform,
                WeightKind::Random => Weights::Random(substream(seed, 0)),
            };
            match family.max_modes {
                Some(max) => sparse_cluster_quasimode(
                    model,
                    value,
                    family.width(),
                    weights,
                    max,
                    substream(seed, 1),
                ),
                None => cluster_quasimode(model, value, family.width(), weights),
            }
        }
        FamilyKind::Eigen => {
            torus_only("eigen")?;
            let n = positive_integer(value, "the eigen family")?;
            let mut k = [0i32; MAX_TORUS_DIM];
            k[if role == Role::High { 0 } else { 1 }] = n as i32;
            Quasimode::eigenfunction(model, Mode::from_padded(k))
        }
        FamilyKind::Cap => {
            torus_only("cap")?;
            let n = positive_integer(value, "the cap family")?;
            let width = family.cap_width.unwrap_or((n as f64).powf(-0.5));
            lattice_cap(model, n, width)
        }
        FamilyKind::Sectoral | FamilyKind::Zonal => {
            if model.is_torus() {
                return Err(Error::Config(format!(
                    "the {} family lives on the sphere",
                    family.kind.name()
                )));
            }
            let l = positive_integer(value, "sphere families")?;
            let kind = if family.kind == FamilyKind::Sectoral {
                Extremal::Sectoral
            } else {
                Extremal::Zonal
            };
            sphere_extremal(kind, l)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::Upper => self.value <= self.limit,
            Bound::Lower => self.value >= self.limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub kind: ExperimentKind,
    pub model: SpectralModel,
    pub table: Table,
    pub fit: Option<FitResult>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_csv(&self) -> Result<String> {
        self.table.to_csv()
    }

    /// One line: fitted slope, each threshold check, and PASS/FAIL.
    pub fn summary(&self) -> String {
        let mut s = format!("{} {} rows={}", self.kind.name(), self.model, self.table.rows.len());
        match &self.fit {
            Some(f) => s += &format!(" slope={:.6} points={}", f.slope, f.points_used),
            None => s += " slope=n/a",
        }
        for c in &self.checks {
            let op = if c.bound == Bound::Upper { "<=" } else { ">=" };
            let verdict = if c.passed() { "ok" } else { "violated" };
            s += &format!(" {}={}{op}{} {verdict}", c.name, short(c.value), short(c.limit));
        }
        s += if self.passed() { " PASS" } else { " FAIL" };
        s
    }
}

fn short(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.6}")
    } else {
        format!("{x:.3e}")
    }
}

fn slope_checks(cfg: &ExperimentConfig, fit: Option<&FitResult>, checks: &mut Vec<Check>) -> Result<()> {
    if cfg.check.max_slope.is_none() && cfg.check.min_slope.is_none() {
        return Ok(());
    }
    let fit = fit.ok_or_else(|| Error::Config("slope thresholds need a fit with at least 3 points".into()))?;
    if let Some(limit) = cfg.check.max_slope {
        checks.push(Check { name: "slope", value: fit.slope, limit, bound: Bound::Upper });
    }
    if let Some(limit) = cfg.check.min_slope {
        checks.push(Check { name: "slope", value: fit.slope, limit, bound: Bound::Lower });
    }
    Ok(())
}

fn spread_check(cfg: &ExperimentConfig, values: &[f64], checks: &mut Vec<Check>) {
    if let Some(limit) = cfg.check.max_spread {
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        let min = values.iter().cloned().fold(f64::MAX, f64::min);
        checks.push(Check { name: "spread", value: max / min, limit, bound: Bound::Upper });
    }
}

fn fit_if_possible(points: &[(f64, f64)], correction: LogCorrection) -> Result<Option<FitResult>> {
    if points.len() < 3 {
        Ok(None)
    } else {
        fit_exponent(points, correction).map(Some)
    }
}

fn growth_correction(model: &SpectralModel) -> LogCorrection {
    if model.dimension() == 3 {
        LogCorrection::HalfLog
    } else {
        LogCorrection::None
    }
}

fn value_cell(v: f64) -> Cell {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Cell::Int(v as i64)
    } else {
        Cell::Real(v)
    }
}

fn family_seed(cfg: &ExperimentConfig, family: &FamilySpec) -> Result<Option<u64>> {
    if family.is_random() {
        cfg.require_seed("the family uses random weights or subsampling").map(Some)
    } else {
        Ok(None)
    }
}

/// Number of worker threads from `QLAB_THREADS`; 0 or unset means automatic.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("QLAB_THREADS") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("QLAB_THREADS must be a nonnegative integer, got {s:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(Error::Config(format!("QLAB_THREADS: {e}"))),
    }
}

/// Runs `kind` with the thread cap from `QLAB_THREADS`.
pub fn run_experiment(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<Report> {
    run_experiment_with_threads(cfg, kind, threads_from_env()?)
}

/// Runs `kind` on a pool of `threads` workers (0 = automatic).
pub fn run_experiment_with_threads(
    cfg: &ExperimentConfig,
    kind: ExperimentKind,
    threads: usize,
) -> Result<Report> {
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(Error::Config(format!(
                "config is for `{}` but `{}` was requested",
                k.name(),
                kind.name()
            )));
        }
    }
    let model = cfg.model.build()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match kind {
        ExperimentKind::BilinearSweep => bilinear_sweep(cfg, model),
        ExperimentKind::L4Growth => l4_growth(cfg, model),
        ExperimentKind::RemainderDecay => remainder_decay(cfg, model),
        ExperimentKind::ClusterAudit => cluster_audit(cfg, model),
        ExperimentKind::WeylAudit => weyl_audit(cfg, model),
        ExperimentKind::SplitAudit => split_audit(cfg, model),
    })
}

fn variant(cfg: &ExperimentConfig, model: &SpectralModel) -> Result<Variant> {
    let Some(spec) = &cfg.variant else {
        return Ok(Variant::LowDim);
    };
    match spec.kind {
        VariantKind::LowDim => {
            if spec.n.is_some() || spec.q.is_some() {
                return Err(Error::Config("`variant.n` and `variant.q` belong to high-dim-tail".into()));
            }
            Ok(Variant::LowDim)
        }
        VariantKind::HighDimTail => {
            let d = model.dimension();
            if !model.is_torus() || d < 6 {
                return Err(Error::Config(format!("high-dim-tail needs a torus of dimension >= 6, got {model}")));
            }
            let n = spec.n.ok_or_else(|| Error::Config("high-dim-tail needs `variant.n`".into()))?;
            let q = spec.q.ok_or_else(|| Error::Config("high-dim-tail needs `variant.q`".into()))?;
            if !(n > d as f64 / 2.0) {
                return Err(Error::Config(format!("`variant.n` must exceed d/2 = {}", d as f64 / 2.0)));
            }
            if !(q >= 2.0) {
                return Err(Error::Config("`variant.q` must be >= 2".into()));
            }
            Ok(Variant::HighDimTail { n, lebesgue: q })
        }
    }
}

struct BilinearPoint {
    mu: f64,
    lambda: f64,
    seed: Option<u64>,
    u: Quasimode,
    v: Quasimode,
    uv: f64,
    raw: f64,
    growth: f64,
    normalized: f64,
    tail: Option<f64>,
}

fn bilinear_sweep(cfg: &ExperimentConfig, model: SpectralModel) -> Result<Report> {
    let values = cfg.values()?;
    let ratio = cfg.ratio()?;
    let family = cfg.family();
    let seed = family_seed(cfg, &family)?;
    let variant = variant(cfg, &model)?;
    let points: Vec<BilinearPoint> = values
        .par_iter()
        .map(|&mu| {
            let s = seed.map(|s| point_seed(s, mu));
            let base = s.unwrap_or(0);
            let lambda = ratio * mu;
            let v = build_quasimode(&family, model, mu, Role::Low, substream(base, 1))?;
            let u = build_quasimode(&family, model, lambda, Role::High, substream(base, 2))?;
            let uv = multiply(&u.field, &v.field)?.l2_norm();
            let low = if u.lambda < v.lambda { &u } else { &v };
            let growth = lambda_exponent(model.dimension(), low.lambda);
            let tail = match variant {
                Variant::LowDim => None,
                Variant::HighDimTail { n, lebesgue } => Some(tail_term(low, n, lebesgue)?),
            };
            let normalized = bilinear_ratio(&u, &v, variant)?;
            Ok(BilinearPoint {
                mu,
                lambda,
                seed: s,
                raw: uv / (u.quality * v.quality),
                uv,
                growth,
                normalized,
                tail,
                u,
                v,
            })
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&[
        "mu", "lambda", "family", "seed", "modes_u", "modes_v", "uv_l2", "q_u", "q_v", "raw_ratio",
        "growth", "normalized_ratio", "tail",
    ]);
    for p in &points {
        table.push(vec![
            value_cell(p.mu),
            value_cell(p.lambda),
            family.kind.name().into(),
            p.seed.into(),
            p.u.field.len().into(),
            p.v.field.len().into(),
            p.uv.into(),
            p.u.quality.into(),
            p.v.quality.into(),
            p.raw.into(),
            p.growth.into(),
            p.normalized.into(),
            p.tail.into(),
        ]);
    }
    let fit_points: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.u.lambda.min(p.v.lambda), p.raw))
        .collect();
    let fit = fit_if_possible(&fit_points, growth_correction(&model))?;
    let mut checks = Vec::new();
    slope_checks(cfg, fit.as_ref(), &mut checks)?;
    let normalized: Vec<f64> = points.iter().map(|p| p.normalized).collect();
    spread_check(cfg, &normalized, &mut checks);
    Ok(Report { kind: ExperimentKind::BilinearSweep, model, table, fit, checks })
}

fn l4_growth(cfg: &ExperimentConfig, model: SpectralModel) -> Result<Report> {
    let values = cfg.values()?;
    let family = cfg.family();
    let seed = family_seed(cfg, &family)?;
    let rows: Vec<(f64, Quasimode, f64)> = values
        .par_iter()
        .map(|&value| {
            let s = seed.map_or(0, |s| point_seed(s, value));
            let u = build_quasimode(&family, model, value, Role::High, s)?;
            let l4 = lp_norm(&u.field, 4.0)?.value;
            Ok((value, u, l4))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["ell", "lambda", "l4_norm", "q", "ratio"]);
    let mut fit_points = Vec::new();
    for (value, u, l4) in &rows {
        let ratio = l4 / u.quality;
        table.push(vec![value_cell(*value), u.lambda.into(), (*l4).into(), u.quality.into(), ratio.into()]);
        fit_points.push((u.lambda, ratio));
    }
    let fit = fit_if_possible(&fit_points, LogCorrection::None)?;
    let mut checks = Vec::new();
    slope_checks(cfg, fit.as_ref(), &mut checks)?;
    Ok(Report { kind: ExperimentKind::L4Growth, model, table, fit, checks })
}

/// Remainder norms of `h` and their literal bounds after one eigenvalue level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemainderRow {
    /// Last rank of the level, so `R_ν` removes the whole level and everything below.
    pub nu: u64,
    /// `λ_{ν+1}²`, the next eigenvalue.
    pub next_eigenvalue: u64,
    pub rem_hm1: f64,
    /// `(1 + λ_{ν+1}²)^{-1/2}·‖h‖₂`
    pub bound_hm1: f64,
    pub rem_l2: f64,
    /// `λ_{ν+1}^{-1}·‖h‖_{H¹}`
    pub bound_l2: f64,
}

impl RemainderRow {
    pub fn holds(&self) -> bool {
        self.rem_hm1 <= self.bound_hm1 * (1.0 + AUDIT_SLACK) && self.rem_l2 <= self.bound_l2 * (1.0 + AUDIT_SLACK)
    }
}

/// Evaluates both remainder inequalities at every eigenvalue level up to the band of `h`.
pub fn remainder_profile(h: &SpectralField) -> Vec<RemainderRow> {
    let model = *h.model();
    let l2 = h.l2_norm();
    let h1 = sobolev_norm(h, 1.0);
    levels_up_to(&model, h.max_eigenvalue())
        .par_iter()
        .map(|level| {
            let nu = level.last_rank();
            let next = next_level_above(&model, level.eigenvalue);
            RemainderRow {
                nu,
                next_eigenvalue: next,
                rem_hm1: remainder_norm(h, nu, RemainderNorm::HMinusOne),
                bound_hm1: l2 / (1.0 + next as f64).sqrt(),
                rem_l2: remainder_norm(h, nu, RemainderNorm::L2),
                bound_l2: h1 / (next as f64).sqrt(),
            }
        })
        .collect()
}

fn remainder_decay(cfg: &ExperimentConfig, model: SpectralModel) -> Result<Report> {
    let lambda_u = cfg.sweep.lambda_u.ok_or_else(|| Error::Config("`sweep.lambda_u` is required".into()))?;
    let lambda_v = cfg.sweep.lambda_v.ok_or_else(|| Error::Config("`sweep.lambda_v` is required".into()))?;
    let mut epsilons = cfg.sweep.epsilons.clone().unwrap_or_default();
    if epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Config("`sweep.epsilons` must be positive and finite".into()));
    }
    epsilons.sort_by(|a, b| b.total_cmp(a));
    if epsilons.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("`sweep.epsilons` must be distinct".into()));
    }
    let family = cfg.family();
    let seed = family_seed(cfg, &family)?.unwrap_or(0);
    let u = build_quasimode(&family, model, lambda_u, Role::High, substream(seed, 1))?;
    let v = build_quasimode(&family, model, lambda_v, Role::Low, substream(seed, 2))?;
    let h = multiply(&u.field, &v.field)?;

    let profile = remainder_profile(&h);
    if let Some(bad) = profile.iter().find(|r| !r.holds()) {
        return Err(Error::Audit(format!("remainder inequality violated at nu = {}: {bad:?}", bad.nu)));
    }
    let stars: Vec<(f64, u64, u64)> = epsilons
        .par_iter()
        .map(|&eps| {
            Ok((
                eps,
                min_rank_for_tolerance(&h, eps, RemainderNorm::HMinusOne)?,
                min_rank_for_tolerance(&h, eps, RemainderNorm::L2)?,
            ))
        })
        .collect::<Result<_>>()?;
    if stars.windows(2).any(|w| w[1].1 < w[0].1 || w[1].2 < w[0].2) {
        return Err(Error::Audit("minimal rank decreased as the tolerance shrank".into()));
    }

    let mut table = Table::new(&[
        "row", "nu", "lambda_next", "rem_hm1", "bound_hm1", "rem_l2", "bound_l2", "eps", "nu_star_hm1",
        "nu_star_l2",
    ]);
    for r in &profile {
        table.push(vec![
            "level".into(),
            r.nu.into(),
            (r.next_eigenvalue as f64).sqrt().into(),
            r.rem_hm1.into(),
            r.bound_hm1.into(),
            r.rem_l2.into(),
            r.bound_l2.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    for &(eps, hm1, l2) in &stars {
        let mut row = vec![Cell::from("epsilon")];
        row.extend(std::iter::repeat_with(|| Cell::Empty).take(6));
        row.extend([eps.into(), hm1.into(), l2.into()]);
        table.push(row);
    }
    let d = model.dimension() as i32;
    let fit_points: Vec<(f64, f64)> = stars.iter().map(|&(eps, hm1, _)| (eps.powi(-d), hm1 as f64 + 1.0)).collect();
    let fit = fit_if_possible(&fit_points, LogCorrection::None)?;
    let mut checks = Vec::new();
    slope_checks(cfg, fit.as_ref(), &mut checks)?;
    Ok(Report { kind: ExperimentKind::RemainderDecay, model, table, fit, checks })
}

/// Outcome of one randomized cluster-product trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterTrial {
    pub product: f64,
    /// `‖v·L_s u‖₂ + ‖v·H_s u‖₂ − ‖uv‖₂`, nonnegative by the triangle inequality.
    pub triangle_slack: f64,
    pub triangle_rhs: f64,
}

/// Split frequency used by the decomposition audit: the cluster at `k`
/// sits in the transition band of the cutoff.
pub fn audit_split_frequency(k: f64) -> f64 {
    (k / 3.0).max(1.0)
}

pub fn cluster_trial(u: &SpectralField, v: &SpectralField, k: f64) -> Result<ClusterTrial> {
    let product = multiply(u, v)?.l2_norm();
    let (low, high) = smooth_split(u, audit_split_frequency(k), &CutoffProfile)?;
    let rhs = multiply(v, &low)?.l2_norm() + multiply(v, &high)?.l2_norm();
    Ok(ClusterTrial { product, triangle_slack: rhs - product, triangle_rhs: rhs })
}

fn cluster_audit(cfg: &ExperimentConfig, model: SpectralModel) -> Result<Report> {
    let values = cfg.values()?;
    let ratio = cfg.ratio()?;
    let trials = cfg.sweep.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(Error::Config("`sweep.trials` must be positive".into()));
    }
    let mut family = cfg.family();
    if family.kind != FamilyKind::Cluster {
        return Err(Error::Config("cluster-audit draws random cluster fields; family.kind must be cluster".into()));
    }
    family.weights = WeightKind::Random;
    let seed = cfg.require_seed("cluster-audit draws random fields")?;
    struct Point {
        k: f64,
        j: f64,
        seed: u64,
        max: f64,
        mean: f64,
        min_slack: f64,
    }
    let points: Vec<Point> = values
        .par_iter()
        .map(|&k| {
            let j = ratio * k;
            let s = point_seed(seed, k);
            let mut max = 0.0f64;
            let mut sum = 0.0;
            let mut min_slack = f64::INFINITY;
            for t in 0..trials as u64 {
                let u = build_quasimode(&family, model, k, Role::High, substream(s, 2 * t))?;
                let v = build_quasimode(&family, model, j, Role::Low, substream(s, 2 * t + 1))?;
                let trial = cluster_trial(&u.field, &v.field, k)?;
                if trial.triangle_slack < -AUDIT_SLACK * trial.triangle_rhs {
                    return Err(Error::Audit(format!(
                        "triangle audit violated at k = {k}, trial {t}: {trial:?}"
                    )));
                }
                max = max.max(trial.product);
                sum += trial.product;
                min_slack = min_slack.min(trial.triangle_slack);
            }
            Ok(Point { k, j, seed: s, max, mean: sum / trials as f64, min_slack })
        })
        .collect::<Result<_>>()?;
    let d = model.dimension();
    let mut table = Table::new(&[
        "k", "j", "trials", "seed", "max_product", "mean_product", "min_triangle_slack", "growth", "normalized",
    ]);
    let mut fit_points = Vec::new();
    let mut normalized = Vec::new();
    for p in &points {
        let low = p.k.min(p.j);
        let growth = lambda_exponent(d, low.max(1.0));
        table.push(vec![
            value_cell(p.k),
            value_cell(p.j),
            trials.into(),
            p.seed.into(),
            p.max.into(),
            p.mean.into(),
            p.min_slack.into(),
            growth.into(),
            (p.max / growth).into(),
        ]);
        fit_points.push((low, p.max));
        normalized.push(p.max / growth);
    }
    let fit = fit_if_possible(&fit_points, growth_correction(&model))?;
    let mut checks = Vec::new();
    slope_checks(cfg, fit.as_ref(), &mut checks)?;
    spread_check(cfg, &normalized, &mut checks);
    Ok(Report { kind: ExperimentKind::ClusterAudit, model, table, fit, checks })
}

fn weyl_audit(cfg: &ExperimentConfig, model: SpectralModel) -> Result<Report> {
    let values = cfg.values()?;
    let d = model.dimension() as i32;
    let rows: Vec<(f64, u64, Option<u64>)> = values
        .par_iter()
        .map(|&lambda| {
            let count = weyl_count(&model, lambda);
            let below = frequency_of_rank(&model, count - 1);
            let above = frequency_of_rank(&model, count);
            if !(below <= lambda && above > lambda) {
                return Err(Error::Audit(format!(
                    "rank/frequency inverse broken at lambda = {lambda}: count {count}, frequencies {below}, {above}"
                )));
            }
            let enumerated = if count <= WEYL_ENUMERATION_LIMIT {
                let n = enumerate_modes(&model, lambda)?.len() as u64;
                if n != count {
                    return Err(Error::Audit(format!("count {count} but {n} modes enumerated at lambda = {lambda}")));
                }
                Some(n)
            } else {
                None
            };
            Ok((lambda, count, enumerated))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["lambda", "count", "enumerated", "weyl_term", "ratio"]);
    let mut fit_points = Vec::new();
    let mut last_ratio = f64::NAN;
    for &(lambda, count, enumerated) in &rows {
        let term = model.weyl_constant() * lambda.powi(d);
        last_ratio = count as f64 / term;
        table.push(vec![value_cell(lambda), count.into(), enumerated.into(), term.into(), last_ratio.into()]);
        fit_points.push((lambda, count as f64));
    }
    let fit = fit_if_possible(&fit_points, LogCorrection::None)?;
    let mut checks = Vec::new();
    slope_checks(cfg, fit.as_ref(), &mut checks)?;
    if let Some(tol) = cfg.check.tolerance {
        checks.push(Check { name: "weyl_ratio_error", value: (last_ratio - 1.0).abs(), limit: tol, bound: Bound::Upper });
    }
    Ok(Report { kind: ExperimentKind::WeylAudit, model, table, fit, checks })
}

/// Reconstruction errors of the frequency decompositions of `f` at `lambda`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitErrors {
    /// `max |L + H − f|` coefficientwise.
    pub reconstruction: f64,
    /// `‖H f‖₂` below `2λ`.
    pub high_leak: f64,
    /// `‖L f‖₂` at or above `4λ`.
    pub low_leak: f64,
    /// `max |Σ_j S_j f − (f − constant part)|`.
    pub littlewood_paley: f64,
    /// `max |Σ_k χ_k f − f|`.
    pub clusters: f64,
    pub low_norm: f64,
    pub high_norm: f64,
}

impl SplitErrors {
    pub fn worst(&self) -> f64 {
        [self.reconstruction, self.high_leak, self.low_leak, self.littlewood_paley, self.clusters]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn split_errors(f: &SpectralField, lambda: f64) -> Result<SplitErrors> {
    let profile = CutoffProfile;
    let (low, high) = smooth_split(f, lambda, &profile)?;
    let reconstruction = low.add(&high)?.max_coefficient_difference(f)?;
    let high_leak = project_window(&high, 0.0, 2.0 * lambda)?.l2_norm();
    let low_leak = project_window(&low, 4.0 * lambda, f64::INFINITY)?.l2_norm();
    let mut blocks = SpectralField::zero(*f.model());
    for j in lp_block_range(f) {
        blocks = blocks.add(&lp_block(f, j, &profile))?;
    }
    let constant = f.model().constant_mode();
    let nonconstant = f.filter(|m| *m != constant);
    let littlewood_paley = blocks.max_coefficient_difference(&nonconstant)?;
    let mut windows = SpectralField::zero(*f.model());
    for k in 0..=f.max_frequency().floor() as u64 {
        windows = windows.add(&cluster(f, k))?;
    }
    let clusters = windows.max_coefficient_difference(f)?;
    Ok(SplitErrors {
        reconstruction,
        high_leak,
        low_leak,
        littlewood_paley,
        clusters,
        low_norm: low.l2_norm(),
        high_norm: high.l2_norm(),
    })
}

fn split_audit(cfg: &ExperimentConfig, model: SpectralModel) -> Result<Report> {
    let values = cfg.values()?;
    if values[0] < 1.0 {
        return Err(Error::Config("split-audit frequencies must be >= 1".into()));
    }
    let seed = cfg.require_seed("split-audit draws random fields")?;
    let max_modes = cfg.family.as_ref().and_then(|f| f.max_modes).unwrap_or(DEFAULT_SPLIT_MODES);
    let tolerance = cfg.check.tolerance.unwrap_or(DEFAULT_SPLIT_TOLERANCE);
    let rows: Vec<(f64, u64, usize, SplitErrors)> = values
        .par_iter()
        .map(|&lambda| {
            let s = point_seed(seed, lambda);
            // random field spread over [1, 5λ), straddling both cutoff edges
            let f = sparse_cluster_quasimode(
                model,
                1.0,
                5.0 * lambda - 1.0,
                Weights::Random(substream(s, 0)),
                max_modes,
                substream(s, 1),
            )?
            .field
            .add(&SpectralField::single(model, model.constant_mode())?.scale(Complex64::new(0.5, 0.0)))?;
            Ok((lambda, s, f.len(), split_errors(&f, lambda)?))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "lambda", "seed", "modes", "reconstruction", "high_leak", "low_leak", "littlewood_paley", "clusters",
        "low_norm", "high_norm",
    ]);
    let mut worst = 0.0f64;
    for (lambda, s, n, e) in &rows {
        worst = worst.max(e.worst());
        table.push(vec![
            value_cell(*lambda),
            (*s).into(),
            (*n).into(),
            e.reconstruction.into(),
            e.high_leak.into(),
            e.low_leak.into(),
            e.littlewood_paley.into(),
            e.clusters.into(),
            e.low_norm.into(),
            e.high_norm.into(),
        ]);
    }
    let checks = vec![Check { name: "max_error", value: worst, limit: tolerance, bound: Bound::Upper }];
    Ok(Report { kind: ExperimentKind::SplitAudit, model, table, fit: None, checks })
}
