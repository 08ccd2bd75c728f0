//! Run configuration: model parameters, an optional preset and one block
//! per subcommand.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::ValueEnum;
use dce_core::oracle::CouplingNorm;
use dce_core::phenom::DEFAULT_GAMMA;
use dce_core::sweep::{multimode_pump_window, DEFAULT_POINTS};
use dce_core::ModelParams;
use serde::{Deserialize, Serialize};

/// Band centre used by every preset, in units of the half-bandwidth.
pub const PRESET_OMEGA_B: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn params(self) -> ModelParams {
        let b = 1.0;
        let omega_b = PRESET_OMEGA_B * b;
        let base = ModelParams {
            cavity: omega_b - 0.5 * b,
            band_center: omega_b,
            half_width: b,
            pump_amp: 0.2,
            pump_phase: 0.0,
            pump_freq: 2.0 * omega_b,
            coupling: 1.0 / PI,
        };
        match self {
            Preset::Fig3 | Preset::Fig4 => base,
            Preset::Fig5 => ModelParams {
                pump_freq: 2.0 * omega_b - 1.5 * b,
                ..base
            },
            Preset::Fig6 => {
                let cavity = omega_b + 2.0 * b;
                ModelParams {
                    cavity,
                    pump_freq: multimode_pump_window(cavity, omega_b, b).suggested,
                    ..base
                }
            }
        }
    }

    /// Sweep range for presets whose figure is not centred on the band.
    fn sweep(self, p: &ModelParams) -> Option<SweepBlock> {
        match self {
            Preset::Fig6 => Some(SweepBlock {
                omega0_min: Some(p.band_center),
                omega0_max: Some(p.cavity + 0.5 * p.half_width),
                points: DEFAULT_POINTS,
            }),
            _ => None,
        }
    }
}

/// Partial parameter set applied on top of a preset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(rename = "omegaB", default, skip_serializing_if = "Option::is_none")]
    pub omega_b: Option<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(rename = "Omega", default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
}

impl ParamOverrides {
    pub fn is_empty(&self) -> bool {
        *self == ParamOverrides::default()
    }

    pub fn apply(&self, p: ModelParams) -> ModelParams {
        ModelParams {
            cavity: self.omega0.unwrap_or(p.cavity),
            band_center: self.omega_b.unwrap_or(p.band_center),
            half_width: self.b.unwrap_or(p.half_width),
            pump_amp: self.f0.unwrap_or(p.pump_amp),
            pump_phase: self.theta.unwrap_or(p.pump_phase),
            pump_freq: self.omega.unwrap_or(p.pump_freq),
            coupling: self.g.unwrap_or(p.coupling),
        }
    }
}

/// Grid in the cavity frequency. Missing bounds default to
/// `[omegaB - 1.5 B, omegaB]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_max: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            omega0_min: None,
            omega0_max: None,
            points: DEFAULT_POINTS,
        }
    }
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

impl SweepBlock {
    pub fn range(&self, p: &ModelParams) -> (f64, f64) {
        (
            self.omega0_min.unwrap_or(p.band_center - 1.5 * p.half_width),
            self.omega0_max.unwrap_or(p.band_center),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    /// Cavity frequency of the run; the model value when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(rename = "N", default = "default_modes")]
    pub n: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_norm")]
    pub norm: CouplingNorm,
    /// Fit window; `[0, t_max]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for OracleBlock {
    fn default() -> Self {
        OracleBlock {
            omega0: None,
            n: default_modes(),
            dt: default_dt(),
            t_max: default_t_max(),
            norm: default_norm(),
            window: None,
            stride: default_stride(),
        }
    }
}

fn default_modes() -> usize {
    400
}

fn default_dt() -> f64 {
    1e-3
}

fn default_t_max() -> f64 {
    200.0
}

fn default_norm() -> CouplingNorm {
    CouplingNorm::MatchEffective
}

fn default_stride() -> usize {
    100
}

/// Flat-band model curves, one per pump phase. The range defaults to
/// `Omega/2 +- 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhenomBlock {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_max: Option<f64>,
    #[serde(default = "default_curve_points")]
    pub points: usize,
}

impl Default for PhenomBlock {
    fn default() -> Self {
        PhenomBlock {
            gamma: default_gamma(),
            thetas: default_thetas(),
            omega0_min: None,
            omega0_max: None,
            points: default_curve_points(),
        }
    }
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

fn default_thetas() -> Vec<f64> {
    vec![0.5 * PI, PI]
}

fn default_curve_points() -> usize {
    1001
}

impl PhenomBlock {
    pub fn range(&self, p: &ModelParams) -> (f64, f64) {
        let mid = 0.5 * p.pump_freq;
        (
            self.omega0_min.unwrap_or(mid - 1.0),
            self.omega0_max.unwrap_or(mid + 1.0),
        )
    }
}

/// Real-frequency grid for the self-energy, `omegaB +- 2B` by default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(default = "default_curve_points")]
    pub points: usize,
}

impl Default for SigmaBlock {
    fn default() -> Self {
        SigmaBlock {
            omega_min: None,
            omega_max: None,
            points: default_curve_points(),
        }
    }
}

impl SigmaBlock {
    pub fn range(&self, p: &ModelParams) -> (f64, f64) {
        (
            self.omega_min.unwrap_or(p.band_center - 2.0 * p.half_width),
            self.omega_max.unwrap_or(p.band_center + 2.0 * p.half_width),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    /// Full parameter set. Mutually exclusive with a preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
    #[serde(default, skip_serializing_if = "ParamOverrides::is_empty")]
    pub overrides: ParamOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phenom: Option<PhenomBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaBlock>,
    /// Output directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Configuration with the preset expanded and every block filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub preset: Option<Preset>,
    pub params: ModelParams,
    pub sweep: SweepBlock,
    pub oracle: OracleBlock,
    pub phenom: PhenomBlock,
    pub sigma: SigmaBlock,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// A preset given on the command line replaces the one in the file.
    pub fn resolve(&self, preset: Option<Preset>, out: Option<&Path>) -> anyhow::Result<Resolved> {
        let preset = preset.or(self.preset);
        let base = match (preset, self.params) {
            (Some(_), Some(_)) => bail!("`params` and a preset are mutually exclusive; use `overrides`"),
            (Some(pr), None) => pr.params(),
            (None, Some(p)) => p,
            (None, None) => bail!("config needs `params` or a preset"),
        };
        let params = self.overrides.apply(base);
        let sweep = self
            .sweep
            .or_else(|| preset.and_then(|pr| pr.sweep(&params)))
            .unwrap_or_default();
        Ok(Resolved {
            preset,
            params,
            sweep,
            oracle: self.oracle.clone().unwrap_or_default(),
            phenom: self.phenom.clone().unwrap_or_default(),
            sigma: self.sigma.unwrap_or_default(),
            out: out
                .map(Path::to_path_buf)
                .or_else(|| self.out.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
        })
    }
}
