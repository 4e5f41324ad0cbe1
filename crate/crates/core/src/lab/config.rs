//! TOML experiment configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spectra::SpectralModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BilinearSweep,
    L4Growth,
    RemainderDecay,
    ClusterAudit,
    WeylAudit,
    SplitAudit,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::BilinearSweep,
        ExperimentKind::L4Growth,
        ExperimentKind::RemainderDecay,
        ExperimentKind::ClusterAudit,
        ExperimentKind::WeylAudit,
        ExperimentKind::SplitAudit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::BilinearSweep => "bilinear-sweep",
            ExperimentKind::L4Growth => "l4-growth",
            ExperimentKind::RemainderDecay => "remainder-decay",
            ExperimentKind::ClusterAudit => "cluster-audit",
            ExperimentKind::WeylAudit => "weyl-audit",
            ExperimentKind::SplitAudit => "split-audit",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    Torus,
    Sphere,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub geometry: GeometryKind,
    pub dimension: Option<usize>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<SpectralModel> {
        match (self.geometry, self.dimension) {
            (GeometryKind::Torus, Some(d)) => SpectralModel::torus(d),
            (GeometryKind::Torus, None) => Err(Error::Config("torus model needs `dimension`".into())),
            (GeometryKind::Sphere, None | Some(2)) => Ok(SpectralModel::sphere()),
            (GeometryKind::Sphere, Some(d)) => {
                Err(Error::Config(format!("only the 2-sphere is available, got dimension {d}")))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Cluster,
    Eigen,
    Cap,
    Sectoral,
    Zonal,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Cluster => "cluster",
            FamilyKind::Eigen => "eigen",
            FamilyKind::Cap => "cap",
            FamilyKind::Sectoral => "sectoral",
            FamilyKind::Zonal => "zonal",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    #[default]
    Uniform,
    Random,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Window width for clusters (default 1).
    pub width: Option<f64>,
    #[serde(default)]
    pub weights: WeightKind,
    /// Subsample cluster windows down to this many modes.
    pub max_modes: Option<usize>,
    /// Fixed cap aperture in radians; the default is `λ^{-1/2}`.
    pub cap_width: Option<f64>,
}

impl FamilySpec {
    pub fn cluster() -> Self {
        Self {
            kind: FamilyKind::Cluster,
            width: None,
            weights: WeightKind::Uniform,
            max_modes: None,
            cap_width: None,
        }
    }

    pub fn width(&self) -> f64 {
        self.width.unwrap_or(1.0)
    }

    pub fn is_random(&self) -> bool {
        self.kind == FamilyKind::Cluster && (self.weights == WeightKind::Random || self.max_modes.is_some())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Frequencies, or degrees for sphere families. Strictly increasing.
    pub values: Option<Vec<f64>>,
    /// High frequency over low frequency in bilinear sweeps and audits.
    pub ratio: Option<f64>,
    pub trials: Option<usize>,
    pub epsilons: Option<Vec<f64>>,
    pub lambda_u: Option<f64>,
    pub lambda_v: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantKind {
    LowDim,
    HighDimTail,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    pub kind: VariantKind,
    pub n: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub max_slope: Option<f64>,
    pub min_slope: Option<f64>,
    pub max_spread: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when given.
    pub kind: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub sweep: SweepSpec,
    pub variant: Option<VariantSpec>,
    #[serde(default)]
    pub check: CheckSpec,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn family(&self) -> FamilySpec {
        self.family.clone().unwrap_or_else(FamilySpec::cluster)
    }

    pub fn require_seed(&self, why: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("`seed` is required: {why}")))
    }

    /// Sweep values, checked to be present, positive, finite and strictly increasing.
    pub fn values(&self) -> Result<&[f64]> {
        let values = self
            .sweep
            .values
            .as_deref()
            .ok_or_else(|| Error::Config("`sweep.values` is required".into()))?;
        if values.is_empty() {
            return Err(Error::Config("`sweep.values` is empty".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config("`sweep.values` must be positive and finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("`sweep.values` must be strictly increasing".into()));
        }
        Ok(values)
    }

    pub fn ratio(&self) -> Result<f64> {
        let r = self.sweep.ratio.unwrap_or(1.0);
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Config(format!("`sweep.ratio` must be positive, got {r}")));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
kind = "bilinear-sweep"
seed = 11

[model]
geometry = "torus"
dimension = 2

[family]
kind = "cluster"
width = 1.0
weights = "random"

[sweep]
values = [8, 16, 32]
ratio = 4.0

[check]
max_slope = 0.35
"#;

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::parse(FULL).unwrap();
        assert_eq!(cfg.kind, Some(ExperimentKind::BilinearSweep));
        assert_eq!(cfg.values().unwrap(), &[8.0, 16.0, 32.0]);
        assert_eq!(cfg.model.build().unwrap(), SpectralModel::torus(2).unwrap());
        assert!(cfg.family().is_random());
        assert_eq!(cfg.check.max_slope, Some(0.35));
    }

    #[test]
    fn unknown_keys_are_errors() {
        for bad in [
            FULL.replace("seed = 11", "seed = 11\nspeed = 3"),
            FULL.replace("width = 1.0", "widht = 1.0"),
            FULL.replace("[check]", "[checks]"),
        ] {
            assert!(matches!(ExperimentConfig::parse(&bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn sweep_validation() {
        let cfg = ExperimentConfig::parse(&FULL.replace("[8, 16, 32]", "[8, 8, 32]")).unwrap();
        assert!(cfg.values().is_err());
        let cfg = ExperimentConfig::parse(&FULL.replace("[8, 16, 32]", "[]")).unwrap();
        assert!(cfg.values().is_err());
        let cfg = ExperimentConfig::parse(&FULL.replace("dimension = 2", "dimension = 9")).unwrap();
        assert!(cfg.model.build().is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::from_name(k.name()), Some(k));
        }
    }
}
