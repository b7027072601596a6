//! Experiment drivers behind the CLI subcommands. Each returns a
//! self-contained record that echoes the full configuration it ran with.

use irs_place::geometry::Candidate;
use irs_place::objective::ObjectiveContext;
use irs_place::optimizer::{
    binomial, check_submodularity, curvature, exhaustive_place_with, greedy_place,
    lazy_greedy_place, random_place, Certificate, SelectionResult, SubmodularityReport,
};
use irs_place::Execution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{MethodName, ScenarioConfig};
use crate::error::HarnessError;

/// Slack used when asserting the greedy guarantee.
pub const CERTIFICATE_SLACK: f64 = 1e-9;

/// Grid plus channel state for a configuration. Phase profiles come from
/// `phase_seed` through ChaCha8.
pub fn build_context(cfg: &ScenarioConfig) -> Result<ObjectiveContext, HarnessError> {
    cfg.validate()?;
    let invalid = |e: irs_place::Error| HarnessError::Validation(e.to_string());
    let scene = cfg.scene().map_err(invalid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.phase_seed);
    ObjectiveContext::generate(
        &cfg.grid_spec(),
        scene,
        cfg.array_spec(),
        &cfg.reflectivity.model(),
        &mut rng,
    )
    .map_err(|e| {
        if e.is_numerical() {
            e.into()
        } else {
            invalid(e)
        }
    })
}

/// One chosen surface location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub step: usize,
    pub index: usize,
    pub range_m: f64,
    pub theta_rad: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub marginal_gain: f64,
    /// Objective after this pick.
    pub value: f64,
}

impl Site {
    fn new(step: usize, c: &Candidate, gain: f64, value: f64) -> Self {
        Site {
            step,
            index: c.index,
            range_m: c.range,
            theta_rad: c.azimuth,
            x_m: c.position.x,
            y_m: c.position.y,
            marginal_gain: gain,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub method: MethodName,
    pub sites: Vec<Site>,
    pub final_value: f64,
    pub evaluations: u64,
}

impl Placement {
    fn new(ctx: &ObjectiveContext, method: MethodName, r: &SelectionResult) -> Self {
        let sites = r
            .chosen
            .iter()
            .enumerate()
            .map(|(k, &u)| Site::new(k + 1, &ctx.grid().as_slice()[u], r.gains[k], r.values[k]))
            .collect();
        Placement {
            method,
            sites,
            final_value: r.final_value,
            evaluations: r.evaluations,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.value).collect()
    }
}

fn select(
    ctx: &ObjectiveContext,
    cfg: &ScenarioConfig,
    method: MethodName,
    budget: usize,
) -> Result<SelectionResult, HarnessError> {
    let r = match method {
        MethodName::Greedy => greedy_place(ctx, budget)?,
        MethodName::Lazy => lazy_greedy_place(ctx, budget)?,
        MethodName::Random => {
            random_place(ctx, budget, &mut ChaCha8Rng::seed_from_u64(cfg.run.seed))?
        }
        MethodName::Exhaustive => exhaustive_place_with(
            ctx,
            budget,
            cfg.run.enumeration_cap as u128,
            Execution::default(),
        )?,
    };
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub config: ScenarioConfig,
    pub seed: u64,
    pub placement: Placement,
    pub certificate: Certificate,
}

pub fn run_place(cfg: &ScenarioConfig) -> Result<RunRecord, HarnessError> {
    let ctx = build_context(cfg)?;
    let method = cfg.run.method;
    let r = select(&ctx, cfg, method, cfg.budget)?;
    let c = curvature(&ctx)?;
    let optimum = (method == MethodName::Exhaustive).then_some(r.final_value);
    Ok(RunRecord {
        command: "place".into(),
        config: cfg.clone(),
        seed: cfg.run.seed,
        placement: Placement::new(&ctx, method, &r),
        certificate: Certificate::new(c.curvature, optimum)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Factor times the exhaustive optimum.
    Absolute,
    /// Factor alone; the optimum was beyond the enumeration cap.
    Factor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "M")]
    pub m: usize,
    pub f_greedy: f64,
    pub f_random_mean: f64,
    pub f_random_std: f64,
    pub bound_tight: f64,
    pub bound_loose: f64,
    pub bound_kind: BoundKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_optimum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub command: String,
    pub config: ScenarioConfig,
    pub seed: u64,
    pub random_trials: usize,
    pub curvature: f64,
    pub tight_factor: f64,
    pub loose_factor: f64,
    pub greedy: Placement,
    pub rows: Vec<SweepRow>,
}

/// Mean and sample standard deviation (zero for a single value).
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Budgets `1..=budget`: one greedy run (its prefixes give every row),
/// `random_trials` random placements per budget, and the guarantee.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<SweepRecord, HarnessError> {
    let ctx = build_context(cfg)?;
    let m_max = cfg.budget;
    let greedy_method = if cfg.run.method == MethodName::Lazy {
        MethodName::Lazy
    } else {
        MethodName::Greedy
    };
    let greedy = select(&ctx, cfg, greedy_method, m_max)?;
    let cert = Certificate::new(curvature(&ctx)?.curvature, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let cap = cfg.run.enumeration_cap as u128;

    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let samples: Vec<f64> = (0..cfg.run.random_trials)
            .map(|_| random_place(&ctx, m, &mut rng).map(|r| r.final_value))
            .collect::<Result<_, _>>()?;
        let (mean, std) = mean_std(&samples);
        let optimum = if binomial(ctx.len(), m) <= cap {
            Some(exhaustive_place_with(&ctx, m, cap, Execution::default())?.final_value)
        } else {
            None
        };
        let (bound_tight, bound_loose, bound_kind) = match optimum {
            Some(opt) => (
                cert.tight_factor * opt,
                cert.loose_factor * opt,
                BoundKind::Absolute,
            ),
            None => (cert.tight_factor, cert.loose_factor, BoundKind::Factor),
        };
        rows.push(SweepRow {
            m,
            f_greedy: greedy.values[m - 1],
            f_random_mean: mean,
            f_random_std: std,
            bound_tight,
            bound_loose,
            bound_kind,
            f_optimum: optimum,
        });
    }

    Ok(SweepRecord {
        command: "sweep".into(),
        config: cfg.clone(),
        seed: cfg.run.seed,
        random_trials: cfg.run.random_trials,
        curvature: cert.curvature,
        tight_factor: cert.tight_factor,
        loose_factor: cert.loose_factor,
        greedy: Placement::new(&ctx, greedy_method, &greedy),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureRecord {
    pub command: String,
    pub config: ScenarioConfig,
    pub curvature: f64,
    pub tight_factor: f64,
    pub loose_factor: f64,
    pub min_ratio: f64,
    pub full_value: f64,
    /// Candidate attaining the minimum ratio.
    pub argmin: Site,
    /// Candidates excluded for having a zero singleton value.
    pub dead: Vec<usize>,
}

pub fn run_curvature(cfg: &ScenarioConfig) -> Result<CurvatureRecord, HarnessError> {
    let ctx = build_context(cfg)?;
    let c = curvature(&ctx)?;
    let cert = Certificate::new(c.curvature, None)?;
    let j = c.argmin;
    let single = ctx.objective_value(&[j])?;
    Ok(CurvatureRecord {
        command: "curvature".into(),
        config: cfg.clone(),
        curvature: c.curvature,
        tight_factor: cert.tight_factor,
        loose_factor: cert.loose_factor,
        min_ratio: c.min_ratio,
        full_value: c.full_value,
        argmin: Site::new(0, &ctx.grid().as_slice()[j], single, single),
        dead: c.dead,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub command: String,
    pub config: ScenarioConfig,
    pub budget: usize,
    pub greedy: Placement,
    pub exhaustive: Placement,
    /// `f(S_gr) / f(S*)`; 1 when the optimum is zero.
    pub ratio: f64,
    pub certificate: Certificate,
    pub certificate_holds: bool,
}

/// Greedy against the exhaustive optimum at `budget`. Fails with a
/// certificate error if the guarantee chain is broken.
pub fn run_compare(cfg: &ScenarioConfig) -> Result<CompareRecord, HarnessError> {
    let ctx = build_context(cfg)?;
    let m = cfg.budget;
    let cap = cfg.run.enumeration_cap as u128;
    let exhaustive = exhaustive_place_with(&ctx, m, cap, Execution::default())?;
    let greedy_method = if cfg.run.method == MethodName::Lazy {
        MethodName::Lazy
    } else {
        MethodName::Greedy
    };
    let greedy = select(&ctx, cfg, greedy_method, m)?;
    let cert = Certificate::new(curvature(&ctx)?.curvature, Some(exhaustive.final_value))?;
    let ratio = if exhaustive.final_value > 0.0 {
        greedy.final_value / exhaustive.final_value
    } else {
        1.0
    };
    let holds = cert.holds(greedy.final_value, CERTIFICATE_SLACK);
    if !holds {
        return Err(HarnessError::Certificate(format!(
            "greedy {} below {} × optimum {}",
            greedy.final_value, cert.tight_factor, exhaustive.final_value
        )));
    }
    Ok(CompareRecord {
        command: "compare".into(),
        config: cfg.clone(),
        budget: m,
        greedy: Placement::new(&ctx, greedy_method, &greedy),
        exhaustive: Placement::new(&ctx, MethodName::Exhaustive, &exhaustive),
        ratio,
        certificate: cert,
        certificate_holds: holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub command: String,
    pub config: ScenarioConfig,
    pub seed: u64,
    pub report: SubmodularityReport,
}

pub fn run_check(cfg: &ScenarioConfig) -> Result<CheckRecord, HarnessError> {
    let ctx = build_context(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let report = check_submodularity(&ctx, cfg.run.check_trials, &mut rng)?;
    Ok(CheckRecord {
        command: "check".into(),
        config: cfg.clone(),
        seed: cfg.run.seed,
        report,
    })
}
