//! Serializable run configuration. A report embeds the config that produced it, so
//! replaying the embedded config reproduces the report byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use planarqc::convexity::{DEFAULT_REL_TOL, DEFAULT_SH_ISO_TOL, SH_ISO_STEP_REL};
use planarqc::{Complex64, Expr, FunctionalSpec, Mat2C, PrincipalMapSpec, SampleScheme};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    RankOne,
    ShIso,
    MeanValue,
    Growth,
    Area,
    Jensen,
    Laminate,
    Identity,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::RankOne => "rank-one",
            Suite::ShIso => "sh-iso",
            Suite::MeanValue => "mean-value",
            Suite::Growth => "growth",
            Suite::Area => "area",
            Suite::Jensen => "jensen",
            Suite::Laminate => "laminate",
            Suite::Identity => "identity",
        }
    }

    /// Tolerance used when the config leaves it unset.
    pub fn default_tol(self) -> f64 {
        match self {
            Suite::RankOne => DEFAULT_REL_TOL,
            Suite::ShIso => DEFAULT_SH_ISO_TOL,
            Suite::MeanValue | Suite::Area | Suite::Jensen => 1e-6,
            Suite::Growth => 0.0,
            Suite::Laminate => 1e-3,
            Suite::Identity => 5e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n_r: 256, n_theta: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShIsoConfig {
    pub s_range: [f64; 2],
    pub t_range: [f64; 2],
    pub n_s: usize,
    pub n_t: usize,
    pub step_rel: f64,
}

impl Default for ShIsoConfig {
    fn default() -> Self {
        ShIsoConfig {
            s_range: [1.0, 5.0],
            t_range: [0.1, 10.0],
            n_s: 200,
            n_t: 200,
            step_rel: SH_ISO_STEP_REL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeanValueConfig {
    /// Row-major `A`.
    pub matrix: [[f64; 2]; 2],
    pub w0: Complex64,
    pub radii: Vec<f64>,
    pub circle_nodes: usize,
}

impl Default for MeanValueConfig {
    fn default() -> Self {
        MeanValueConfig {
            matrix: [[1.0, 0.0], [0.0, 1.0]],
            w0: Complex64::new(1.0, 0.0),
            radii: vec![0.1],
            circle_nodes: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthConfig {
    pub p: f64,
    /// Distortion bin edges; when present the distortion-weighted table is added.
    pub k_bins: Option<Vec<f64>>,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig { p: 1.0, k_bins: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaminateConfig {
    #[serde(rename = "A0")]
    pub a0: [[f64; 2]; 2],
    #[serde(rename = "A1")]
    pub a1: [[f64; 2]; 2],
    pub lambda: f64,
    pub ladder: Vec<u32>,
}

impl Default for LaminateConfig {
    /// `A₀ = I`, `A₁ = I + ½ n⊗n` with `n = (cos 0.3, sin 0.3)`; both lie in `Q₂(2)`.
    fn default() -> Self {
        let n = [0.3f64.cos(), 0.3f64.sin()];
        let a1 = Mat2C::IDENTITY + Mat2C::outer([0.5 * n[0], 0.5 * n[1]], n);
        LaminateConfig {
            a0: Mat2C::IDENTITY.to_real(),
            a1: a1.to_real(),
            lambda: 0.4,
            ladder: vec![8, 32, 128],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsochoricConfig {
    pub k_max: f64,
    pub count: usize,
}

impl Default for IsochoricConfig {
    fn default() -> Self {
        IsochoricConfig {
            k_max: 10.0,
            count: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
    /// JSON-lines log that receives one record per check.
    pub log: Option<PathBuf>,
}

/// Everything a `check` run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Suite,
    #[serde(default)]
    pub functionals: Vec<FunctionalSpec>,
    /// `E(s, t)` for `sh-iso`; `H(s)` for the isochoric checks added to `rank-one`.
    #[serde(default)]
    pub expressions: Vec<Expr>,
    #[serde(default)]
    pub map: Option<PrincipalMapSpec>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub samples: SampleScheme,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub expect_fail: bool,
    #[serde(default)]
    pub sh_iso: ShIsoConfig,
    #[serde(default)]
    pub mean_value: MeanValueConfig,
    #[serde(default)]
    pub growth: GrowthConfig,
    #[serde(default)]
    pub laminate: LaminateConfig,
    #[serde(default)]
    pub isochoric: IsochoricConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn new(suite: Suite) -> Self {
        RunConfig {
            suite,
            functionals: Vec::new(),
            expressions: Vec::new(),
            map: None,
            grid: GridConfig::default(),
            samples: SampleScheme::default(),
            tol: None,
            expect_fail: false,
            sh_iso: ShIsoConfig::default(),
            mean_value: MeanValueConfig::default(),
            growth: GrowthConfig::default(),
            laminate: LaminateConfig::default(),
            isochoric: IsochoricConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or_else(|| self.suite.default_tol())
    }

    /// Reads TOML (`.toml`) or JSON (anything else). A JSON report is accepted too and
    /// yields the config embedded in it.
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let is_toml = path.extension().is_some_and(|e| e == "toml");
        let parsed = if is_toml {
            toml::from_str(&text).map_err(|e| e.to_string())
        } else {
            serde_json::from_str::<serde_json::Value>(&text)
                .and_then(|mut v| {
                    let is_report = v.get("schema").is_some();
                    match v.get_mut("config") {
                        Some(embedded) if is_report => serde_json::from_value(embedded.take()),
                        _ => serde_json::from_value(v),
                    }
                })
                .map_err(|e| e.to_string())
        };
        parsed.map_err(|msg| CliError::Config {
            path: path.to_path_buf(),
            msg,
        })
    }
}
