//! Run configuration: TOML on disk, validated into core model types.

use std::path::{Path, PathBuf};

use jmfield_core::{BirthMeasure, ConvexShape, GrowthModel, SpeedProfile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Ball { radius: f64 },
    Box { half_widths: Vec<f64> },
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpeedSpec {
    Constant { c: f64 },
    Power { c: f64, kappa: f64 },
    /// Knots `[t, V(t)]` of a piecewise-linear cumulative distance.
    Tabulated { knots: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    Power { alpha: f64, beta: f64 },
    Discrete { atoms: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Uniform(u32),
    PerAxis(Vec<u32>),
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution::Uniform(64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    HalfLines,
    Quadrant,
    Enclosed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixingMode {
    Coupling,
    Alpha,
    Covariance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub germs: usize,
    pub points: usize,
    pub times: usize,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { germs: 16, points: 16, times: 8, tolerance: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub replicate: u64,
    pub images: bool,
    /// Index along the last axis of the slice imaged for d = 3.
    pub slice: Option<u32>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { replicate: 0, images: true, slice: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CdfConfig {
    /// Explicit t grid; otherwise `t_points` evenly spaced values on `[0, t_max]`.
    pub t_grid: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub t_points: usize,
    /// Attempts allowed per requested certified replicate.
    pub attempt_factor: usize,
}

impl Default for CdfConfig {
    fn default() -> Self {
        CdfConfig { t_grid: None, t_max: None, t_points: 101, attempt_factor: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySpec {
    pub gamma: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperExpSpec {
    pub gamma: f64,
    pub delta: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    /// Defaults to half-lines in d = 1 and quadrants otherwise.
    pub geometry: Option<Geometry>,
    /// Inner cube half-width for the enclosed geometry.
    pub inner: f64,
    pub r_grid: Option<Vec<f64>>,
    pub r_min: f64,
    pub r_max: f64,
    pub r_points: usize,
    pub tau: Option<f64>,
    pub tail_tol: f64,
    pub max_terms: u64,
    pub poly: Option<PolySpec>,
    pub superexp: Option<SuperExpSpec>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            geometry: None,
            inner: 0.5,
            r_grid: None,
            r_min: 0.5,
            r_max: 32.0,
            r_points: 24,
            tau: None,
            tail_tol: jmfield_core::mixing::bounds::DEFAULT_TAIL_TOL,
            max_terms: jmfield_core::mixing::bounds::MAX_SERIES_TERMS,
            poly: None,
            superexp: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixingConfig {
    pub mode: MixingMode,
    pub geometry: Option<Geometry>,
    /// Band half-widths for coupling mode.
    pub r: Vec<f64>,
    pub inner: f64,
    pub probes_per_region: usize,
    /// Probe reach away from the band; defaults to r.
    pub probe_extent: Option<f64>,
    pub tau: Option<f64>,
    /// Event threshold a in `{xi > a}`.
    pub threshold: f64,
    /// Lag vector for alpha mode; defaults to a unit step along the first axis.
    pub lag: Option<Vec<f64>>,
    /// Lags along the first axis for covariance mode.
    pub lags: Vec<f64>,
}

impl Default for MixingConfig {
    fn default() -> Self {
        MixingConfig {
            mode: MixingMode::Coupling,
            geometry: None,
            r: vec![2.0],
            inner: 0.5,
            probes_per_region: 32,
            probe_extent: None,
            tau: None,
            threshold: 1.0,
            lag: None,
            lags: vec![0.5, 1.0, 2.0, 4.0, 8.0],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    /// Field file to render; defaults to `field.jmf` in the output directory.
    pub input: Option<PathBuf>,
    pub slice: Option<u32>,
}

fn default_seed() -> u64 {
    0
}

fn default_replicates() -> usize {
    1000
}

fn default_window() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub shape: ShapeSpec,
    pub speed: SpeedSpec,
    pub measure: MeasureSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_window")]
    pub window_radius: f64,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub max_doublings: u32,
    #[serde(default)]
    pub check: CheckConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub cdf: CdfConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub mixing: MixingConfig,
    #[serde(default)]
    pub render: RenderConfig,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

impl RunConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Structural checks; model-level checks happen when building the model.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=3).contains(&self.dimension) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {}", self.dimension)));
        }
        if !(self.window_radius.is_finite() && self.window_radius > 0.0) {
            return Err(invalid("window_radius must be positive and finite"));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        let res = self.resolution_vec()?;
        if res.iter().any(|&r| r == 0) {
            return Err(invalid("resolution must be at least 1 per axis"));
        }
        match &self.shape {
            ShapeSpec::Box { half_widths } if half_widths.len() != self.dimension => {
                return Err(invalid(format!(
                    "shape.half_widths has {} entries for dimension {}",
                    half_widths.len(),
                    self.dimension
                )))
            }
            ShapeSpec::Polygon { .. } if self.dimension != 2 => {
                return Err(invalid("polygon shapes require dimension 2"));
            }
            _ => {}
        }
        if let Some(lag) = &self.mixing.lag {
            if lag.len() != self.dimension {
                return Err(invalid(format!("mixing.lag has {} entries for dimension {}", lag.len(), self.dimension)));
            }
        }
        Ok(())
    }

    pub fn resolution_vec(&self) -> Result<Vec<u32>, CliError> {
        match &self.resolution {
            Resolution::Uniform(n) => Ok(vec![*n; self.dimension]),
            Resolution::PerAxis(v) if v.len() == self.dimension => Ok(v.clone()),
            Resolution::PerAxis(v) => Err(invalid(format!(
                "resolution has {} entries for dimension {}",
                v.len(),
                self.dimension
            ))),
        }
    }

    pub fn shape(&self) -> Result<ConvexShape, CliError> {
        Ok(match &self.shape {
            ShapeSpec::Ball { radius } => ConvexShape::ball(self.dimension, *radius)?,
            ShapeSpec::Box { half_widths } => ConvexShape::cuboid(half_widths)?,
            ShapeSpec::Polygon { vertices } => ConvexShape::polygon(vertices)?,
        })
    }

    pub fn speed(&self) -> Result<SpeedProfile, CliError> {
        Ok(match &self.speed {
            SpeedSpec::Constant { c } => SpeedProfile::constant(*c)?,
            SpeedSpec::Power { c, kappa } => SpeedProfile::power(*c, *kappa)?,
            SpeedSpec::Tabulated { knots } => {
                let k: Vec<(f64, f64)> = knots.iter().map(|k| (k[0], k[1])).collect();
                SpeedProfile::tabulated(&k)?
            }
        })
    }

    pub fn model(&self) -> Result<GrowthModel, CliError> {
        Ok(GrowthModel::new(self.shape()?, self.speed()?))
    }

    pub fn measure(&self) -> Result<BirthMeasure, CliError> {
        Ok(match &self.measure {
            MeasureSpec::Power { alpha, beta } => BirthMeasure::power(*alpha, *beta)?,
            MeasureSpec::Discrete { atoms } => {
                let a: Vec<(f64, f64)> = atoms.iter().map(|a| (a[0], a[1])).collect();
                BirthMeasure::discrete(&a)?
            }
        })
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
