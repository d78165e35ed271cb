//! Command-line flags and their translation into catalog objects and a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use planarqc::{Complex64, Expr, ExtReal, FunctionalKind, FunctionalSpec, PrincipalMapSpec};

use crate::config::{Format, RunConfig, Suite};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "planarqc", version, about = "Numerical checks for planar energy functionals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one functional at a matrix given by its row-major entries.
    Eval(EvalArgs),
    /// Run a check suite and write a JSON report.
    Check(Box<CheckArgs>),
    /// Summarize JSON-lines logs as CSV.
    Report(ReportArgs),
}

/// Functional selection shared by `eval` and `check`.
#[derive(Debug, Clone, Default, Args)]
pub struct FunctionalArgs {
    /// Functional name (repeatable for `check`).
    #[arg(long = "functional", value_name = "NAME")]
    pub functional: Vec<String>,
    /// Exponent `p`; complex values such as `3+1i` for the complex Burkholder kinds.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Well parameter of `local-burkholder` (defaults to `--K`).
    #[arg(long = "well-K")]
    pub well_k: Option<f64>,
    /// `θ(t)` for `theta-burkholder`.
    #[arg(long)]
    pub theta: Option<String>,
    /// `H(s)` for `isochoric-volumetric`.
    #[arg(long = "h-expr")]
    pub h_expr: Option<String>,
    /// `G(t)` for `isochoric-volumetric`.
    #[arg(long = "g-expr")]
    pub g_expr: Option<String>,
    /// Value of `constant`.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Row-major coefficients of `linear`.
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Override of the value at the zero matrix (`+inf`, `-inf` or a number).
    #[arg(long = "value-at-zero", allow_hyphen_values = true)]
    pub value_at_zero: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum EvalFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub functional: FunctionalArgs,
    /// `K` used by `local-burkholder` when `--well-K` is absent.
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: EvalFormat,
    /// Entries `a11 a12 a21 a22`, usually after `--`.
    #[arg(allow_hyphen_values = true, value_name = "ENTRY")]
    pub entries: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapFamily {
    LinearBeltrami,
    RadialStretch,
    QuadTail,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Suite to run; may come from `--config` instead.
    #[arg(value_enum)]
    pub suite: Option<Suite>,
    #[command(flatten)]
    pub functional: FunctionalArgs,
    /// Raw expression: `E(s, t)` for `sh-iso`, `H(s)` for `rank-one` (repeatable).
    #[arg(long = "expr", allow_hyphen_values = true)]
    pub expr: Vec<String>,

    /// Principal-map family.
    #[arg(long, value_enum)]
    pub map: Option<MapFamily>,
    /// Distortion of `radial-stretch` (and the default well of `local-burkholder`).
    #[arg(long = "K")]
    pub k: Option<f64>,
    /// Tail coefficient of `quad-tail`.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// `b0` of `linear-beltrami` (complex, default `1`).
    #[arg(long, allow_hyphen_values = true)]
    pub b0: Option<String>,
    /// `b1` of `linear-beltrami` (complex, default `0`).
    #[arg(long, allow_hyphen_values = true)]
    pub b1: Option<String>,

    #[arg(long)]
    pub nr: Option<usize>,
    #[arg(long)]
    pub ntheta: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "sigma-min")]
    pub sigma_min: Option<f64>,
    #[arg(long = "sigma-max")]
    pub sigma_max: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,

    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML (`.toml`) or JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Exit 0 iff at least one check fails.
    #[arg(long = "expect-fail")]
    pub expect_fail: bool,
    /// Append one JSON line per check to this file.
    #[arg(long)]
    pub log: Option<PathBuf>,

    /// `sh-iso`: number of `s` and `t` nodes and the relative step.
    #[arg(long)]
    pub ns: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long = "step-rel")]
    pub step_rel: Option<f64>,
    /// `mean-value`: row-major `A`.
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    pub matrix: Option<Vec<f64>>,
    /// `mean-value`: circle center (complex, nonzero).
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long = "circle-nodes")]
    pub circle_nodes: Option<usize>,
    /// `growth`: exponent in `[1, 2)`.
    #[arg(long = "growth-p")]
    pub growth_p: Option<f64>,
    /// `growth`: distortion bin edges starting at 1.
    #[arg(long = "k-bins", value_delimiter = ',')]
    pub k_bins: Option<Vec<f64>>,
    /// `laminate`: row-major endpoints, mixing fraction and `j` ladder.
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    pub a0: Option<Vec<f64>>,
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    pub a1: Option<Vec<f64>>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<u32>>,
    /// `rank-one`: range `[1, k_max]` of the isochoric checks.
    #[arg(long = "k-max")]
    pub k_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Log files or glob patterns.
    #[arg(required = true, value_name = "PATTERN")]
    pub patterns: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_complex(flag: &str, s: &str) -> CliResult<Complex64> {
    s.trim()
        .parse::<Complex64>()
        .ok()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .ok_or_else(|| CliError::usage(format!("--{flag}: not a complex number: {s:?}")))
}

fn parse_expr(flag: &str, s: &str) -> CliResult<Expr> {
    Expr::parse(s).map_err(|e| CliError::usage(format!("--{flag}: {e}")))
}

fn rows(flag: &str, v: &[f64]) -> CliResult<[[f64; 2]; 2]> {
    match v {
        [a, b, c, d] => Ok([[*a, *b], [*c, *d]]),
        _ => Err(CliError::usage(format!("--{flag} needs 4 entries"))),
    }
}

impl FunctionalArgs {
    fn need<T: Clone>(v: &Option<T>, name: &str, flag: &str) -> CliResult<T> {
        v.clone()
            .ok_or_else(|| CliError::usage(format!("{name} needs --{flag}")))
    }

    fn real_p(&self, name: &str) -> CliResult<f64> {
        let z = parse_complex("p", &Self::need(&self.p, name, "p")?)?;
        if z.im != 0.0 {
            return Err(CliError::usage(format!("{name} needs a real p, got {z}")));
        }
        Ok(z.re)
    }

    /// The functional called `name` with parameters from these flags; `k` is the
    /// fallback well parameter for `local-burkholder`.
    pub fn build(&self, name: &str, k: Option<f64>) -> CliResult<FunctionalSpec> {
        use FunctionalKind::*;
        let kind = match name {
            "burkholder" => BurkholderReal { p: self.real_p(name)? },
            "local-burkholder" => LocalBurkholder {
                k: Self::need(&self.well_k.or(k), name, "well-K")?,
            },
            "w" => WFunctional,
            "second-invariant" => SecondInvariant,
            "distortion" => Distortion,
            "log-burkholder" => LogBurkholder { p: self.real_p(name)? },
            "theta-burkholder" => ThetaBurkholder {
                p: self.real_p(name)?,
                theta: parse_expr("theta", &Self::need(&self.theta, name, "theta")?)?,
            },
            "isochoric-volumetric" => IsochoricVolumetric {
                h: parse_expr("h-expr", &Self::need(&self.h_expr, name, "h-expr")?)?,
                g: parse_expr("g-expr", &Self::need(&self.g_expr, name, "g-expr")?)?,
            },
            "complex-burkholder" => ComplexBurkholder {
                p: parse_complex("p", &Self::need(&self.p, name, "p")?)?,
            },
            "local-complex-burkholder" => LocalComplexBurkholder {
                p: parse_complex("p", &Self::need(&self.p, name, "p")?)?,
            },
            "neg-det" => NegDet,
            "det" => Det,
            "sq-norm" => SqNorm,
            "neg-sq-norm" => NegSqNorm,
            "constant" => Constant {
                c: Self::need(&self.c, name, "c")?,
            },
            "linear" => {
                let c = Self::need(&self.coeffs, name, "coeffs")?;
                Linear {
                    coeffs: [c[0], c[1], c[2], c[3]],
                }
            }
            other => return Err(CliError::usage(format!("unknown functional {other:?}"))),
        };
        let spec = FunctionalSpec::new(kind)?;
        Ok(match &self.value_at_zero {
            Some(v) => spec.with_value_at_zero(
                v.parse::<ExtReal>()
                    .map_err(|e| CliError::usage(format!("--value-at-zero: {e}")))?,
            ),
            None => spec,
        })
    }
}

impl CheckArgs {
    fn map_spec(&self, family: MapFamily) -> CliResult<PrincipalMapSpec> {
        let spec = match family {
            MapFamily::RadialStretch => {
                PrincipalMapSpec::radial_stretch(self.k.ok_or_else(|| CliError::usage("radial-stretch needs --K"))?)
            }
            MapFamily::QuadTail => {
                PrincipalMapSpec::quad_tail(self.t.ok_or_else(|| CliError::usage("quad-tail needs --t"))?)
            }
            MapFamily::LinearBeltrami => {
                let b0 = self.b0.as_deref().map(|s| parse_complex("b0", s)).transpose()?;
                let b1 = self.b1.as_deref().map(|s| parse_complex("b1", s)).transpose()?;
                PrincipalMapSpec::linear_beltrami(
                    b0.unwrap_or(Complex64::new(1.0, 0.0)),
                    b1.unwrap_or(Complex64::new(0.0, 0.0)),
                )
            }
        };
        Ok(spec?)
    }

    /// Starts from `--config` (or the defaults) and applies every flag given.
    pub fn to_config(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let mut cfg = RunConfig::load(path)?;
                if let Some(s) = self.suite {
                    cfg.suite = s;
                }
                cfg
            }
            None => RunConfig::new(
                self.suite
                    .ok_or_else(|| CliError::usage("check needs a suite or --config"))?,
            ),
        };
        if !self.functional.functional.is_empty() {
            cfg.functionals = self
                .functional
                .functional
                .iter()
                .map(|name| self.functional.build(name, self.k))
                .collect::<CliResult<_>>()?;
        }
        if !self.expr.is_empty() {
            cfg.expressions = self
                .expr
                .iter()
                .map(|s| parse_expr("expr", s))
                .collect::<CliResult<_>>()?;
        }
        if let Some(family) = self.map {
            cfg.map = Some(self.map_spec(family)?);
        }
        macro_rules! set {
            ($flag:expr => $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        set!(self.nr => cfg.grid.n_r);
        set!(self.ntheta => cfg.grid.n_theta);
        set!(self.seed => cfg.samples.seed);
        set!(self.samples => cfg.samples.count);
        set!(self.sigma_min => cfg.samples.sigma_min);
        set!(self.sigma_max => cfg.samples.sigma_max);
        if self.tol.is_some() {
            cfg.tol = self.tol;
        }
        if self.out.is_some() {
            cfg.output.path = self.out.clone();
        }
        set!(self.format => cfg.output.format);
        if self.log.is_some() {
            cfg.output.log = self.log.clone();
        }
        cfg.expect_fail |= self.expect_fail;
        set!(self.ns => cfg.sh_iso.n_s);
        set!(self.nt => cfg.sh_iso.n_t);
        set!(self.step_rel => cfg.sh_iso.step_rel);
        if let Some(m) = &self.matrix {
            cfg.mean_value.matrix = rows("matrix", m)?;
        }
        if let Some(w) = &self.w0 {
            cfg.mean_value.w0 = parse_complex("w0", w)?;
        }
        set!(self.radii => cfg.mean_value.radii);
        set!(self.circle_nodes => cfg.mean_value.circle_nodes);
        set!(self.growth_p => cfg.growth.p);
        if self.k_bins.is_some() {
            cfg.growth.k_bins = self.k_bins.clone();
        }
        if let Some(m) = &self.a0 {
            cfg.laminate.a0 = rows("a0", m)?;
        }
        if let Some(m) = &self.a1 {
            cfg.laminate.a1 = rows("a1", m)?;
        }
        set!(self.lambda => cfg.laminate.lambda);
        set!(self.ladder => cfg.laminate.ladder);
        set!(self.k_max => cfg.isochoric.k_max);
        Ok(cfg)
    }
}
