//! Scenario files: a small TOML document describing one or two mass
//! densities, momenta, a time grid and optional quadrature overrides.
//!
//! All quantities are in units of the scale mass (`m_s = 1`).
//!
//! ```toml
//! name = "example"
//! momenta = [0.0, 1.0]
//! weights = [0.5, 0.5]
//!
//! [[masses]]
//! family = "toy"
//! alpha = 0.0
//! xi0 = 1.0
//!
//! [[masses]]
//! family = "tabulated"
//! alpha = 1.0
//! knots = [[2.0, 1.0], [2.5, 0.6], [3.0, 0.0]]
//!
//! [grid]
//! start = 0.0
//! stop = 10.0
//! points = 401
//! spacing = "linear"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use decaylab::amplitude::TwoMassState;
use decaylab::grid::{time_grid, Spacing};
use decaylab::mdd::{make_toy_mdd, MddSpec, ToyMddParams};
use decaylab::quadrature::{QuadConfig, QuadMode};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum MassSpec {
    Toy {
        alpha: f64,
        xi0: f64,
    },
    /// `Ω₀` knots `(ξ, Ω₀(ξ))`; the first knot is the spectrum's lower bound.
    Tabulated {
        alpha: f64,
        knots: Vec<[f64; 2]>,
    },
}

impl MassSpec {
    pub fn toy(alpha: f64, xi0: f64) -> Self {
        MassSpec::Toy { alpha, xi0 }
    }

    pub fn build(&self, cfg: &QuadConfig) -> Result<MddSpec> {
        Ok(match self {
            MassSpec::Toy { alpha, xi0 } => make_toy_mdd(ToyMddParams { alpha: *alpha, xi0: *xi0 })?,
            MassSpec::Tabulated { alpha, knots } => {
                let k: Vec<(f64, f64)> = knots.iter().map(|k| (k[0], k[1])).collect();
                MddSpec::tabulated(*alpha, &k, cfg)?
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSpacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "default_spacing")]
    pub spacing: GridSpacing,
}

fn default_spacing() -> GridSpacing {
    GridSpacing::Linear
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let spacing = match self.spacing {
            GridSpacing::Linear => Spacing::Linear,
            GridSpacing::Log => Spacing::Log,
        };
        Ok(time_grid(self.start, self.stop, self.points, spacing)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadModeSpec {
    Adaptive,
    Oracle,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<QuadModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_panels: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    pub masses: Vec<MassSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<[f64; 2]>,
    pub momenta: Vec<f64>,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Outputs>,
}

fn default_name() -> String {
    "scenario".into()
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

impl Scenario {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let s: Scenario =
            toml::from_str(text).map_err(|source| CliError::Parse { path: origin.to_path_buf(), source })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Input(m));
        match self.masses.len() {
            1 => {
                if let Some(w) = self.weights {
                    if w != [1.0, 0.0] {
                        return bad("a single-mass scenario takes no weights".into());
                    }
                }
            }
            2 => {
                let [w1, w2] = self.weights();
                if !(w1 > 0.0 && w2 > 0.0) || (w1 + w2 - 1.0).abs() > WEIGHT_SUM_TOL {
                    return bad(format!("weights must be positive and sum to 1, got [{w1}, {w2}]"));
                }
            }
            n => return bad(format!("masses: expected 1 or 2 entries, got {n}")),
        }
        if self.momenta.is_empty() {
            return bad("momenta: at least one value required".into());
        }
        if let Some(p) = self.momenta.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return bad(format!("momenta: values must be >= 0, got {p}"));
        }
        self.grid.values()?;
        self.quad_config().validate()?;
        Ok(())
    }

    pub fn weights(&self) -> [f64; 2] {
        match self.masses.len() {
            1 => [1.0, 0.0],
            _ => self.weights.unwrap_or([0.5, 0.5]),
        }
    }

    pub fn quad_config(&self) -> QuadConfig {
        let mut cfg = QuadConfig::default();
        if let Some(q) = &self.quad {
            if let Some(v) = q.rel_tol {
                cfg.rel_tol = v;
            }
            if let Some(v) = q.abs_tol {
                cfg.abs_tol = v;
            }
            if let Some(v) = q.max_subdivisions {
                cfg.max_subdivisions = v;
            }
            if let Some(m) = q.mode {
                cfg.mode = match m {
                    QuadModeSpec::Adaptive => QuadMode::Adaptive,
                    QuadModeSpec::Oracle => QuadMode::Oracle,
                };
            }
            if let Some(v) = q.oracle_panels {
                cfg.oracle_panels = v;
            }
        }
        cfg
    }

    /// A single mass is carried as a two-mass state whose second weight is zero.
    pub fn state(&self) -> Result<TwoMassState> {
        let cfg = self.quad_config();
        let m1 = self.masses[0].build(&cfg)?;
        if self.masses.len() == 1 {
            return Ok(TwoMassState::degenerate(m1.clone(), m1, 1.0)?);
        }
        let m2 = self.masses[1].build(&cfg)?;
        let [w1, w2] = self.weights();
        Ok(TwoMassState::new(m1, m2, w1, w2)?)
    }

    pub fn is_single(&self) -> bool {
        self.masses.len() == 1
    }

    /// SHA-256 of the canonical TOML form plus the tool version.
    pub fn provenance_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(self.to_toml().as_bytes());
        hex::encode(h.finalize())
    }
}
