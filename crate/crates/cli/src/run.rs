//! Suite drivers: a [`RunConfig`] in, a [`SuiteReport`] out.

use planarqc::convexity::{
    growth_check_basic, growth_check_distortion_weighted, isochoric_characterization_check,
    mean_value_superharmonicity_check, rank_one_scan, sh_iso_check, ConvexityReport,
};
use planarqc::experiments::{lsc_experiment, mixture_convergence_check, LaminateSpec};
use planarqc::principal::{area_check, inverse_distortion_identity_check, jensen_test};
use planarqc::{CheckReport, DiskGrid, Expr, ExtReal, FunctionalSpec, Mat2C, PrincipalMapSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{RunConfig, Suite};
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// One check of a suite, flattened for logs and summaries. `result` holds the full
/// underlying report. For growth items `margin` is the sampled constant `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub suite: String,
    pub id: String,
    pub condition: String,
    pub margin: ExtReal,
    pub error: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub result: Value,
}

impl Item {
    fn from_check(r: CheckReport) -> Item {
        Item {
            suite: r.suite.clone(),
            id: r.id.clone(),
            condition: r.condition.clone(),
            margin: r.margin,
            error: r.error,
            tolerance: r.tolerance,
            passed: r.passed,
            result: to_value(&r),
        }
    }

    fn from_convexity(suite: Suite, id: String, r: ConvexityReport) -> Item {
        Item {
            suite: suite.name().into(),
            id,
            condition: r.condition.clone(),
            margin: r.worst_margin,
            error: None,
            tolerance: r.tolerance,
            passed: r.passed,
            result: to_value(&r),
        }
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: Suite,
    /// Every item passed.
    pub passed: bool,
    pub expect_fail: bool,
    pub exit_code: i32,
    /// The config that produced this report, without its output section.
    pub config: RunConfig,
    /// Sorted by id.
    pub items: Vec<Item>,
}

/// 0 when the run met expectations, 1 otherwise. With `expect_fail`, a run meets
/// expectations iff some check failed.
pub fn exit_code(all_passed: bool, expect_fail: bool) -> i32 {
    if all_passed != expect_fail {
        0
    } else {
        1
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo; n];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn need_functionals(cfg: &RunConfig) -> CliResult<&[FunctionalSpec]> {
    if cfg.functionals.is_empty() {
        return Err(CliError::usage(format!(
            "suite {} needs at least one --functional",
            cfg.suite.name()
        )));
    }
    Ok(&cfg.functionals)
}

fn need_map(cfg: &RunConfig) -> CliResult<PrincipalMapSpec> {
    let map = cfg
        .map
        .ok_or_else(|| CliError::usage(format!("suite {} needs --map", cfg.suite.name())))?;
    Ok(map.validated()?)
}

fn grid(cfg: &RunConfig) -> CliResult<DiskGrid> {
    Ok(DiskGrid::new(cfg.grid.n_r, cfg.grid.n_theta)?)
}

/// Runs `per` on every functional in parallel; results keep the input order.
fn each_functional<F>(cfg: &RunConfig, per: F) -> CliResult<Vec<Item>>
where
    F: Fn(&FunctionalSpec) -> CliResult<Vec<Item>> + Sync + Send,
{
    let nested = need_functionals(cfg)?
        .par_iter()
        .map(per)
        .collect::<CliResult<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

fn each_expr<F>(exprs: &[Expr], per: F) -> CliResult<Vec<Item>>
where
    F: Fn(&Expr) -> CliResult<Item> + Sync + Send,
{
    exprs.par_iter().map(per).collect()
}

fn sh_iso_item(cfg: &RunConfig, label: String, e: &Expr, tol: f64) -> CliResult<Item> {
    let c = &cfg.sh_iso;
    let s = linspace(c.s_range[0], c.s_range[1], c.n_s);
    let t = linspace(c.t_range[0], c.t_range[1], c.n_t);
    let r = sh_iso_check(e, &s, &t, c.step_rel, tol)?;
    Ok(Item::from_convexity(Suite::ShIso, format!("sh-iso/{label}"), r))
}

fn growth_items(cfg: &RunConfig, e: &FunctionalSpec) -> CliResult<Vec<Item>> {
    let p = cfg.growth.p;
    let basic = growth_check_basic(e, p, &cfg.samples)?;
    let mut items = vec![Item {
        suite: Suite::Growth.name().into(),
        id: format!("growth/{e}/p={p}"),
        condition: format!("|E(A)| <= C max(|A|^{p}, -log J_A, K_A) + C with finite C"),
        margin: basic.constant,
        error: None,
        tolerance: 0.0,
        passed: basic.constant.is_finite(),
        result: to_value(&basic),
    }];
    if let Some(edges) = &cfg.growth.k_bins {
        let bins = growth_check_distortion_weighted(e, &cfg.samples, edges)?;
        let worst = bins.iter().filter_map(|b| b.constant).max().unwrap_or(ExtReal::ZERO);
        items.push(Item {
            suite: Suite::Growth.name().into(),
            id: format!("growth-k/{e}"),
            condition: "|E(A)| <= C(K_A)(|A|^2 + 1) with finite C per distortion bin".into(),
            margin: worst,
            error: None,
            tolerance: 0.0,
            passed: worst.is_finite(),
            result: to_value(&bins),
        });
    }
    Ok(items)
}

fn laminate_spec(cfg: &RunConfig) -> CliResult<LaminateSpec> {
    let l = &cfg.laminate;
    let j = *l
        .ladder
        .first()
        .ok_or_else(|| CliError::usage("laminate ladder must not be empty"))?;
    Ok(LaminateSpec::new(
        Mat2C::from_rows(l.a0),
        Mat2C::from_rows(l.a1),
        l.lambda,
        j,
    )?)
}

fn run_items(cfg: &RunConfig) -> CliResult<Vec<Item>> {
    let tol = cfg.tol();
    match cfg.suite {
        Suite::RankOne => {
            if cfg.functionals.is_empty() && cfg.expressions.is_empty() {
                return Err(CliError::usage("rank-one needs --functional or --expr"));
            }
            let mut items = Vec::new();
            if !cfg.functionals.is_empty() {
                items.extend(each_functional(cfg, |e| {
                    let r = rank_one_scan(e, &cfg.samples, tol)?;
                    Ok(vec![Item::from_convexity(Suite::RankOne, format!("rank-one/{e}"), r)])
                })?);
            }
            let iso = &cfg.isochoric;
            items.extend(each_expr(&cfg.expressions, |h| {
                let r = isochoric_characterization_check(h, iso.k_max, iso.count, tol)?;
                Ok(Item::from_convexity(Suite::RankOne, format!("isochoric/{h}"), r))
            })?);
            Ok(items)
        }
        Suite::ShIso => {
            if cfg.functionals.is_empty() && cfg.expressions.is_empty() {
                return Err(CliError::usage("sh-iso needs --functional or --expr"));
            }
            let mut items = Vec::new();
            if !cfg.functionals.is_empty() {
                items.extend(each_functional(cfg, |e| {
                    let form = e
                        .kind()
                        .isotropic_form()
                        .ok_or_else(|| CliError::usage(format!("{e} has no isotropic form E(K_A, J_A)")))?;
                    Ok(vec![sh_iso_item(cfg, e.to_string(), &form, tol)?])
                })?);
            }
            items.extend(each_expr(&cfg.expressions, |x| {
                sh_iso_item(cfg, x.to_string(), x, tol)
            })?);
            Ok(items)
        }
        Suite::MeanValue => {
            let m = &cfg.mean_value;
            let a = Mat2C::from_rows(m.matrix);
            each_functional(cfg, |e| {
                let r = mean_value_superharmonicity_check(e, &a, m.w0, &m.radii, m.circle_nodes, tol)?;
                Ok(vec![Item::from_convexity(
                    Suite::MeanValue,
                    format!("mean-value/{e}"),
                    r,
                )])
            })
        }
        Suite::Growth => each_functional(cfg, |e| growth_items(cfg, e)),
        Suite::Area => {
            let (f, g) = (need_map(cfg)?, grid(cfg)?);
            Ok(vec![Item::from_check(area_check(&f, &g, tol)?)])
        }
        Suite::Jensen => {
            let (f, g) = (need_map(cfg)?, grid(cfg)?);
            each_functional(cfg, |e| Ok(vec![Item::from_check(jensen_test(e, &f, &g, tol)?)]))
        }
        Suite::Laminate => {
            let (spec, g) = (laminate_spec(cfg)?, grid(cfg)?);
            let ladder = &cfg.laminate.ladder;
            each_functional(cfg, |e| {
                Ok(vec![
                    Item::from_check(lsc_experiment(e, &spec, ladder, &g, tol)?),
                    Item::from_check(mixture_convergence_check(e, &spec, ladder, &g, tol)?),
                ])
            })
        }
        Suite::Identity => {
            let (f, g) = (need_map(cfg)?, grid(cfg)?);
            Ok(vec![Item::from_check(inverse_distortion_identity_check(&f, &g, tol)?)])
        }
    }
}

/// Runs the configured suite. Items are ordered by id regardless of scheduling.
pub fn run_suite(cfg: &RunConfig) -> CliResult<SuiteReport> {
    cfg.samples.validate()?;
    let mut items = run_items(cfg)?;
    items.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = items.iter().all(|i| i.passed);
    let mut config = cfg.clone();
    config.output = Default::default();
    Ok(SuiteReport {
        schema: SCHEMA_VERSION,
        suite: cfg.suite,
        passed,
        expect_fail: cfg.expect_fail,
        exit_code: exit_code(passed, cfg.expect_fail),
        config,
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_contract() {
        assert_eq!(exit_code(true, false), 0);
        assert_eq!(exit_code(false, false), 1);
        assert_eq!(exit_code(false, true), 0);
        assert_eq!(exit_code(true, true), 1);
    }

    #[test]
    fn missing_inputs_are_usage_errors() {
        assert!(matches!(
            run_suite(&RunConfig::new(Suite::Jensen)),
            Err(CliError::Usage(_))
        ));
        let mut cfg = RunConfig::new(Suite::Jensen);
        cfg.functionals.push(FunctionalSpec::neg_det());
        assert!(matches!(run_suite(&cfg), Err(CliError::Usage(_))));
        assert!(matches!(
            run_suite(&RunConfig::new(Suite::Area)),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn items_sorted_by_id() {
        let mut cfg = RunConfig::new(Suite::Jensen);
        cfg.grid.n_r = 32;
        cfg.grid.n_theta = 32;
        cfg.map = Some(PrincipalMapSpec::quad_tail(0.3).unwrap());
        cfg.functionals = vec![
            FunctionalSpec::sq_norm(),
            FunctionalSpec::det(),
            FunctionalSpec::neg_det(),
        ];
        let r = run_suite(&cfg).unwrap();
        let ids: Vec<&str> = r.items.iter().map(|i| i.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert!(!r.passed);
        assert_eq!(r.exit_code, 1);
    }

    #[test]
    fn sh_iso_rejects_non_isotropic_functionals() {
        let mut cfg = RunConfig::new(Suite::ShIso);
        cfg.functionals.push(
            FunctionalSpec::new(planarqc::FunctionalKind::Linear {
                coeffs: [1.0, 0.0, 0.0, 1.0],
            })
            .unwrap(),
        );
        assert!(matches!(run_suite(&cfg), Err(CliError::Usage(_))));
    }
}
