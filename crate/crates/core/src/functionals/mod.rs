//! Catalog of energy functionals `E: ℝ²ˣ² → ℝ ∪ {±∞}`.
//!
//! Every catalog entry is `+∞` on `{A ≠ 0, det A ≤ 0}`. The value at `A = 0` is carried
//! by each [`FunctionalSpec`] (see [`FunctionalKind::default_value_at_zero`]).

pub mod burkholder;
pub mod complex;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::extreal::ExtReal;
use crate::mat2::Mat2C;

pub use burkholder::{
    burkholder_complexform, burkholder_isotropic, burkholder_real, critical_distortion, exponent_for_distortion,
    isochoric_factor, local_burkholder, log_burkholder, second_invariant, theta_burkholder, w_functional,
};
pub use complex::{complex_burkholder, local_complex_burkholder, solve_beta, solve_eta, BetaEta, ComplexBurkholder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionalKind {
    /// Classical Burkholder functional `B_p`, `p ≥ 2`.
    #[serde(rename = "burkholder")]
    BurkholderReal {
        p: f64,
    },
    /// `B_p` on `Q₂(K)`, `+∞` outside, `p = 2K/(K − 1)`.
    LocalBurkholder {
        #[serde(rename = "K")]
        k: f64,
    },
    #[serde(rename = "w")]
    WFunctional,
    SecondInvariant,
    Distortion,
    LogBurkholder {
        p: f64,
    },
    /// `θ ∘ B_p` inside the open well; `theta` is an expression in `t`.
    ThetaBurkholder {
        p: f64,
        theta: Expr,
    },
    /// `H(K_A) + G(J_A)`; `h` is an expression in `s`, `g` in `t`.
    IsochoricVolumetric {
        h: Expr,
        g: Expr,
    },
    ComplexBurkholder {
        p: Complex64,
    },
    LocalComplexBurkholder {
        p: Complex64,
    },
    /// `−det A`.
    NegDet,
    /// `det A`.
    Det,
    /// `|A|²` (operator norm).
    SqNorm,
    /// `−|A|²`.
    NegSqNorm,
    Constant {
        c: f64,
    },
    /// `Σ cᵢⱼ aᵢⱼ` over row-major real entries.
    Linear {
        coeffs: [f64; 4],
    },
}

impl FunctionalKind {
    pub fn validate(&self) -> Result<()> {
        use FunctionalKind::*;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            BurkholderReal { p } if !(*p >= 2.0) || !p.is_finite() => bad(format!("burkholder needs p >= 2, got {p}")),
            LogBurkholder { p } | ThetaBurkholder { p, .. } if !(*p > 2.0) || !p.is_finite() => {
                bad(format!("{} needs p > 2, got {p}", self.name()))
            }
            LocalBurkholder { k } if !(*k > 1.0) || !k.is_finite() => {
                bad(format!("local-burkholder needs K > 1, got {k}"))
            }
            ComplexBurkholder { p } | LocalComplexBurkholder { p } => complex::check_exponent(*p),
            Constant { c } if !c.is_finite() => bad(format!("constant must be finite, got {c}")),
            Linear { coeffs } if coeffs.iter().any(|c| !c.is_finite()) => {
                bad("linear coefficients must be finite".into())
            }
            _ => Ok(()),
        }
    }

    /// Short name used on the command line.
    pub fn name(&self) -> &'static str {
        use FunctionalKind::*;
        match self {
            BurkholderReal { .. } => "burkholder",
            LocalBurkholder { .. } => "local-burkholder",
            WFunctional => "w",
            SecondInvariant => "second-invariant",
            Distortion => "distortion",
            LogBurkholder { .. } => "log-burkholder",
            ThetaBurkholder { .. } => "theta-burkholder",
            IsochoricVolumetric { .. } => "isochoric-volumetric",
            ComplexBurkholder { .. } => "complex-burkholder",
            LocalComplexBurkholder { .. } => "local-complex-burkholder",
            NegDet => "neg-det",
            Det => "det",
            SqNorm => "sq-norm",
            NegSqNorm => "neg-sq-norm",
            Constant { .. } => "constant",
            Linear { .. } => "linear",
        }
    }

    /// The lower semicontinuous value at 0 where it is finite, `+∞` otherwise;
    /// `0` for the local Burkholder functionals and `−∞` for `W`.
    pub fn default_value_at_zero(&self) -> ExtReal {
        use FunctionalKind::*;
        match self {
            WFunctional => ExtReal::NegInf,
            SecondInvariant => ExtReal::Finite(2.0),
            Distortion => ExtReal::Finite(1.0),
            LogBurkholder { .. } | ThetaBurkholder { .. } | IsochoricVolumetric { .. } => ExtReal::PosInf,
            Constant { c } => ExtReal::Finite(*c),
            BurkholderReal { .. }
            | LocalBurkholder { .. }
            | ComplexBurkholder { .. }
            | LocalComplexBurkholder { .. }
            | NegDet
            | Det
            | SqNorm
            | NegSqNorm
            | Linear { .. } => ExtReal::ZERO,
        }
    }

    /// Whether the functional is invariant under `A ↦ QAR` for rotations `Q, R`.
    pub fn is_isotropic(&self) -> bool {
        use FunctionalKind::*;
        !matches!(
            self,
            ComplexBurkholder { .. } | LocalComplexBurkholder { .. } | Linear { .. }
        )
    }

    /// The representation `E(A) = E(K_A, J_A)` on `ℝ²ˣ²₊` as an expression in `(s, t)`,
    /// for the kinds that have one in closed form.
    pub fn isotropic_form(&self) -> Option<Expr> {
        use FunctionalKind::*;
        let parse = |s: String| Expr::parse(&s).expect("built-in isotropic form parses");
        match self {
            WFunctional => Some(parse("s - log(s) + log(t)".into())),
            SecondInvariant => Some(parse("s + 1/s".into())),
            Distortion => Some(Expr::s()),
            NegDet => Some(parse("-t".into())),
            Det => Some(Expr::t()),
            SqNorm => Some(parse("s*t".into())),
            NegSqNorm => Some(parse("-(s*t)".into())),
            Constant { c } => Some(Expr::Const(*c)),
            BurkholderReal { p } if *p == 2.0 => Some(parse("-t".into())),
            BurkholderReal { p } => {
                let (half, k) = (0.5 * (p - 2.0), critical_distortion(*p));
                Some(parse(format!("{half:?}*(s - {k:?})*s^{half:?}*t^{:?}", 0.5 * p)))
            }
            LogBurkholder { p } => {
                let (half, k) = (0.5 * (p - 2.0), critical_distortion(*p));
                Some(parse(format!(
                    "-log(-({half:?}*(s - {k:?})*s^{half:?})) - log(t^{:?})",
                    0.5 * p
                )))
            }
            IsochoricVolumetric { h, g } => Some(Expr::Add(Box::new(h.clone()), Box::new(g.clone()))),
            _ => None,
        }
    }
}

impl fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FunctionalKind::*;
        match self {
            BurkholderReal { p } => write!(f, "burkholder(p={p})"),
            LocalBurkholder { k } => write!(f, "local-burkholder(K={k})"),
            LogBurkholder { p } => write!(f, "log-burkholder(p={p})"),
            ThetaBurkholder { p, theta } => write!(f, "theta-burkholder(p={p}, theta(t)={theta})"),
            IsochoricVolumetric { h, g } => write!(f, "isochoric-volumetric(H(s)={h}, G(t)={g})"),
            ComplexBurkholder { p } => write!(f, "complex-burkholder(p={p})"),
            LocalComplexBurkholder { p } => write!(f, "local-complex-burkholder(p={p})"),
            Constant { c } => write!(f, "constant(c={c})"),
            Linear { coeffs } => write!(f, "linear({:?})", coeffs),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpecRepr {
    #[serde(flatten)]
    kind: FunctionalKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value_at_zero: Option<ExtReal>,
}

/// One functional from the catalog with its value at the zero matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct FunctionalSpec {
    kind: FunctionalKind,
    value_at_zero: ExtReal,
    complex: Option<ComplexBurkholder>,
}

impl TryFrom<SpecRepr> for FunctionalSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let spec = FunctionalSpec::new(r.kind)?;
        Ok(match r.value_at_zero {
            Some(v) => spec.with_value_at_zero(v),
            None => spec,
        })
    }
}

impl From<FunctionalSpec> for SpecRepr {
    fn from(s: FunctionalSpec) -> SpecRepr {
        SpecRepr {
            kind: s.kind,
            value_at_zero: Some(s.value_at_zero),
        }
    }
}

impl FunctionalSpec {
    pub fn new(kind: FunctionalKind) -> Result<Self> {
        kind.validate()?;
        let complex = match &kind {
            FunctionalKind::ComplexBurkholder { p } | FunctionalKind::LocalComplexBurkholder { p } => {
                Some(ComplexBurkholder::new(*p)?)
            }
            _ => None,
        };
        Ok(FunctionalSpec {
            value_at_zero: kind.default_value_at_zero(),
            kind,
            complex,
        })
    }

    pub fn with_value_at_zero(mut self, v: ExtReal) -> Self {
        self.value_at_zero = v;
        self
    }

    pub fn kind(&self) -> &FunctionalKind {
        &self.kind
    }

    pub fn value_at_zero(&self) -> ExtReal {
        self.value_at_zero
    }

    pub fn burkholder(p: f64) -> Result<Self> {
        Self::new(FunctionalKind::BurkholderReal { p })
    }

    pub fn local_burkholder(k: f64) -> Result<Self> {
        Self::new(FunctionalKind::LocalBurkholder { k })
    }

    pub fn w() -> Self {
        Self::new(FunctionalKind::WFunctional).expect("parameter-free")
    }

    pub fn second_invariant() -> Self {
        Self::new(FunctionalKind::SecondInvariant).expect("parameter-free")
    }

    pub fn distortion() -> Self {
        Self::new(FunctionalKind::Distortion).expect("parameter-free")
    }

    pub fn neg_det() -> Self {
        Self::new(FunctionalKind::NegDet).expect("parameter-free")
    }

    pub fn det() -> Self {
        Self::new(FunctionalKind::Det).expect("parameter-free")
    }

    pub fn sq_norm() -> Self {
        Self::new(FunctionalKind::SqNorm).expect("parameter-free")
    }

    pub fn neg_sq_norm() -> Self {
        Self::new(FunctionalKind::NegSqNorm).expect("parameter-free")
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(FunctionalKind::Constant { c })
    }

    /// Evaluates `E(A)` with the `+∞` extension off `ℝ²ˣ²₊ ∪ {0}`.
    pub fn evaluate(&self, a: &Mat2C) -> Result<ExtReal> {
        use FunctionalKind::*;
        if a.is_zero() {
            return Ok(self.value_at_zero);
        }
        if a.distortion().is_pos_inf() {
            return Ok(ExtReal::PosInf);
        }
        let finite = |x: f64| Ok(ExtReal::from_f64(x));
        match &self.kind {
            BurkholderReal { p } => finite(burkholder_real(*p, a)),
            LocalBurkholder { k } => Ok(local_burkholder(*k, a)),
            WFunctional => Ok(w_functional(a)),
            SecondInvariant => Ok(second_invariant(a)),
            Distortion => Ok(a.distortion()),
            LogBurkholder { p } => Ok(log_burkholder(*p, a)),
            ThetaBurkholder { p, theta } => theta_burkholder(*p, theta, a),
            IsochoricVolumetric { h, g } => burkholder::isochoric_volumetric(h, g, a),
            ComplexBurkholder { .. } => self.complex_evaluator().evaluate(a),
            LocalComplexBurkholder { .. } => self.complex_evaluator().evaluate_local(a),
            NegDet => finite(-a.det()),
            Det => finite(a.det()),
            SqNorm => finite(a.opnorm().powi(2)),
            NegSqNorm => finite(-a.opnorm().powi(2)),
            Constant { c } => finite(*c),
            Linear { coeffs } => {
                let m = a.to_real();
                finite(coeffs[0] * m[0][0] + coeffs[1] * m[0][1] + coeffs[2] * m[1][0] + coeffs[3] * m[1][1])
            }
        }
    }

    fn complex_evaluator(&self) -> &ComplexBurkholder {
        self.complex
            .as_ref()
            .expect("complex evaluator built in FunctionalSpec::new")
    }

    /// Solved `(β, η)` at `A` for the complex-exponent kinds.
    pub fn beta_eta(&self, a: &Mat2C) -> Result<Option<BetaEta>> {
        match &self.complex {
            Some(cb) => Ok(cb.evaluate_with(a)?.1),
            None => Ok(None),
        }
    }
}

impl fmt::Display for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.value_at_zero != self.kind.default_value_at_zero() {
            write!(f, " [E(0)={}]", self.value_at_zero)?;
        }
        Ok(())
    }
}
