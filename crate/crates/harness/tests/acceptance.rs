//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! reports a PASS/FAIL line with its runtime; exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use irs_place::channel::{nlos_channel, nlos_channel_explicit, random_phase_profile, ArraySpec};
use irs_place::geometry::{build_candidate_grid, GridSpec, Scene};
use irs_place::optimizer::{
    check_submodularity_with, curvature, exhaustive_place, greedy_place, Certificate,
};
use irs_place::Execution;
use irs_placer::config::{GridConfig, ReflectivityConfig, ScenarioConfig};
use irs_placer::run::{build_context, run_curvature, run_place, run_sweep};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// A small scenario whose grid has at most `max_cells` candidates.
fn small_scenario(rng: &mut ChaCha8Rng, max_cells: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::reference();
    cfg.phase_seed = rng.random();
    cfg.array.n_tx = rng.random_range(1..=6);
    cfg.array.n_rx = rng.random_range(1..=6);
    cfg.array.n_irs_elems = rng.random_range(1..=16);
    let range_count = rng.random_range(1..=3);
    let azimuth_count = rng.random_range(2..=(max_cells / range_count).min(8));
    cfg.grid = GridConfig {
        range_count,
        range_step: rng.random_range(1.0..20.0),
        azimuth_count,
        azimuth_step: None,
    };
    cfg.scene.target_range = rng.random_range(5.0..80.0);
    cfg.scene.target_azimuth = rng.random_range(0.0..std::f64::consts::TAU);
    cfg.scene.noise_power = rng.random_range(0.2..5.0);
    cfg.scene.transmit_power = rng.random_range(0.2..5.0);
    cfg.scene.samples = rng.random_range(1..=16);
    if rng.random_bool(0.5) {
        cfg.reflectivity = ReflectivityConfig::InverseSquareProduct;
    }
    cfg.budget = 1;
    cfg
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn submodularity() -> Outcome {
    let mut contexts = vec![(
        "reference".to_string(),
        build_context(&ScenarioConfig::reference()).map_err(|e| e.to_string())?,
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..20 {
        let cfg = small_scenario(&mut rng, 24);
        contexts.push((
            format!("small #{k}"),
            build_context(&cfg).map_err(|e| e.to_string())?,
        ));
    }
    let mut worst = f64::NEG_INFINITY;
    for (k, (name, ctx)) in contexts.iter().enumerate() {
        let mut chain_rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        let r = check_submodularity_with(ctx, 1000, 24, &mut chain_rng, Execution::default())
            .map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("{name}: {r:?}"))?;
        worst = worst
            .max(r.worst_monotonicity_margin)
            .max(r.worst_diminishing_margin);
    }
    Ok(format!(
        "21 scenarios x 1000 chains, worst margin {worst:.2e}"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut worst_prefix = 0.0f64;
    let mut worst_dual = 0.0f64;
    for _ in 0..40 {
        let cfg = small_scenario(&mut rng, 14);
        let ctx = build_context(&cfg).map_err(|e| e.to_string())?;
        ensure(ctx.len() <= 14, || format!("grid has {} cells", ctx.len()))?;
        for m in 1..=3.min(ctx.len()) {
            let r = greedy_place(&ctx, m).map_err(|e| e.to_string())?;
            for k in 0..m {
                let prefix = &r.chosen[..=k];
                let direct = ctx.objective_value(prefix).map_err(|e| e.to_string())?;
                let d = rel_diff(r.values[k], direct);
                worst_prefix = worst_prefix.max(d);
                ensure(d <= 1e-9, || {
                    format!("prefix {prefix:?}: {} vs {direct}", r.values[k])
                })?;

                let h = ctx.stacked_channel(prefix).map_err(|e| e.to_string())?;
                // ln det(I + H Hᴴ) from the singular values of the stacked H
                let stacked: f64 = h.singular_values().iter().map(|s| (s * s).ln_1p()).sum();
                let d = rel_diff(stacked, direct);
                worst_dual = worst_dual.max(d);
                ensure(d <= 1e-10, || {
                    format!("dual forms {prefix:?}: {stacked} vs {direct}")
                })?;
            }
        }
    }
    Ok(format!(
        "40 grids, worst prefix {worst_prefix:.1e}, worst dual {worst_dual:.1e}"
    ))
}

fn bound_certificate() -> Outcome {
    let loose = 1.0 - (-1.0f64).exp();
    ensure((loose - 0.63212).abs() <= 1e-5, || {
        format!("1 - 1/e = {loose}")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst_ratio = f64::INFINITY;
    for k in 0..50 {
        let cfg = small_scenario(&mut rng, 12);
        let ctx = build_context(&cfg).map_err(|e| e.to_string())?;
        let m = rng.random_range(1..=3usize.min(ctx.len()));
        let greedy = greedy_place(&ctx, m)
            .map_err(|e| e.to_string())?
            .final_value;
        let opt = exhaustive_place(&ctx, m)
            .map_err(|e| e.to_string())?
            .final_value;
        let c = curvature(&ctx).map_err(|e| e.to_string())?.curvature;
        let cert = Certificate::new(c, Some(opt)).map_err(|e| e.to_string())?;
        ensure((cert.loose_factor - loose).abs() <= 1e-15, || {
            "loose factor".into()
        })?;
        ensure(cert.holds(greedy, 1e-9), || {
            format!(
                "instance {k}: greedy {greedy}, optimum {opt}, c {c}, tight {}",
                cert.tight_factor
            )
        })?;
        worst_ratio = worst_ratio.min(greedy / opt);
    }
    Ok(format!(
        "50 instances, worst greedy/optimum {worst_ratio:.6}, 1-1/e = {loose:.6}"
    ))
}

fn sweep_ordering() -> Outcome {
    let mut cfg = ScenarioConfig::reference();
    cfg.budget = 5;
    cfg.run.random_trials = 100;
    let rec = run_sweep(&cfg).map_err(|e| e.to_string())?;
    ensure(rec.rows.len() == 5, || format!("{} rows", rec.rows.len()))?;
    let mut prev = 0.0;
    for r in &rec.rows {
        ensure(r.f_greedy >= prev, || {
            format!("M={}: greedy decreased", r.m)
        })?;
        ensure(r.f_greedy > r.f_random_mean, || {
            format!(
                "M={}: greedy {} vs random {}",
                r.m, r.f_greedy, r.f_random_mean
            )
        })?;
        prev = r.f_greedy;
    }
    let last = rec.rows.last().unwrap();
    Ok(format!(
        "M=5 greedy {:.3} vs random mean {:.3}",
        last.f_greedy, last.f_random_mean
    ))
}

fn curvature_near_one() -> Outcome {
    let rec = run_curvature(&ScenarioConfig::reference()).map_err(|e| e.to_string())?;
    ensure((0.9..=1.0).contains(&rec.curvature), || {
        format!("c = {}", rec.curvature)
    })?;
    Ok(format!("c = {:.6}", rec.curvature))
}

fn placement_shape() -> Outcome {
    let mut cfg = ScenarioConfig::reference();
    cfg.budget = 5;
    let rec = run_place(&cfg).map_err(|e| e.to_string())?;
    let sites = &rec.placement.sites;
    ensure(sites.len() == 5, || format!("{} sites", sites.len()))?;
    let mut idx: Vec<usize> = sites.iter().map(|s| s.index).collect();
    idx.sort_unstable();
    idx.dedup();
    ensure(idx.len() == 5, || "repeated site".into())?;
    let grid = cfg.grid_spec();
    let cells = grid.cell_count();
    for s in sites {
        ensure(s.index < cells, || format!("index {}", s.index))?;
        ensure(
            s.range_m > 0.0 && s.range_m <= grid.max_range() + 1e-9,
            || format!("range {}", s.range_m),
        )?;
        ensure((0.0..std::f64::consts::TAU).contains(&s.theta_rad), || {
            format!("azimuth {}", s.theta_rad)
        })?;
        ensure(s.marginal_gain > 0.0, || {
            format!("gain {}", s.marginal_gain)
        })?;
    }
    Ok(format!(
        "sites {:?}",
        sites.iter().map(|s| s.index).collect::<Vec<_>>()
    ))
}

fn channel_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_rel = 0.0f64;
    let mut worst_sv = 0.0f64;
    for draw in 0..200 {
        let spec = ArraySpec {
            n_tx: rng.random_range(1..=10),
            n_rx: rng.random_range(1..=10),
            n_irs_elems: rng.random_range(1..=32),
            ..ArraySpec::default()
        };
        let scene = Scene::new(
            rng.random_range(5.0..80.0),
            rng.random_range(0.0..std::f64::consts::TAU),
            1.0,
            1.0,
            1,
        )
        .map_err(|e| e.to_string())?;
        let grid = build_candidate_grid(&GridSpec::full_circle(4, 7.0, 6), &scene)
            .map_err(|e| e.to_string())?;
        let cand = grid.get(rng.random_range(0..grid.len())).unwrap();
        let profile = random_phase_profile(spec.n_irs_elems, &mut rng);
        let alpha = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let closed = nlos_channel(cand, &profile, &spec, alpha).entries;
        let explicit = nlos_channel_explicit(cand, &profile, &spec, alpha).entries;
        let rel = (&closed - &explicit).norm()
            / closed.norm().max(explicit.norm()).max(f64::MIN_POSITIVE);
        worst_rel = worst_rel.max(rel);
        ensure(rel <= 1e-12, || {
            format!("draw {draw}: relative error {rel:e}")
        })?;
        let sv = explicit.singular_values();
        if sv.len() > 1 && sv[0] > 0.0 {
            let ratio = sv[1] / sv[0];
            worst_sv = worst_sv.max(ratio);
            ensure(ratio <= 1e-9, || {
                format!("draw {draw}: sigma2/sigma1 = {ratio:e}")
            })?;
        }
    }
    Ok(format!(
        "200 draws, worst relative {worst_rel:.1e}, worst sigma2/sigma1 {worst_sv:.1e}"
    ))
}

const SMALL_SCENARIO: &str = r#"
budget = 2
phase_seed = 5

[array]
n_tx = 4
n_rx = 4
n_irs_elems = 8

[grid]
range_count = 3
range_step = 10.0
azimuth_count = 4

[scene]
target_range = 25.0
target_azimuth = 1.0
"#;

fn run_cli(sub: &str, config: &Path, out: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_irs-placer"))
        .arg(sub)
        .arg("--config")
        .arg(config)
        .args(["--seed", "9", "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        format!(
            "{sub} exited {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr)
        )
    })?;
    let mut files = Vec::new();
    for name in ["result.json", "placement.csv", "sweep.csv"] {
        if let Ok(bytes) = std::fs::read(out.join(name)) {
            files.push((name.to_string(), bytes));
        }
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let reference =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/paper_scenario.toml");
    let small = dir.path().join("small.toml");
    std::fs::write(&small, SMALL_SCENARIO).map_err(|e| e.to_string())?;
    let runs: [(&str, &Path); 5] = [
        ("place", &reference),
        ("sweep", &reference),
        ("curvature", &reference),
        ("check", &reference),
        ("compare", &small),
    ];
    let mut compared = 0;
    for (sub, cfg) in runs {
        let a = run_cli(sub, cfg, &dir.path().join(format!("{sub}-a")))?;
        let b = run_cli(sub, cfg, &dir.path().join(format!("{sub}-b")))?;
        ensure(!a.is_empty(), || format!("{sub} wrote no result"))?;
        ensure(a == b, || format!("{sub}: outputs differ between runs"))?;
        compared += a.len();
    }
    Ok(format!("5 subcommands, {compared} files byte-identical"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1 submodularity and monotonicity",
            submodularity,
            Duration::from_secs(30),
        ),
        (
            "2 oracle equivalence",
            oracle_equivalence,
            Duration::from_secs(10),
        ),
        (
            "3 bound certificate",
            bound_certificate,
            Duration::from_secs(60),
        ),
        ("4 sweep ordering", sweep_ordering, Duration::from_secs(120)),
        ("5 curvature", curvature_near_one, Duration::from_secs(120)),
        (
            "6 placement shape",
            placement_shape,
            Duration::from_secs(60),
        ),
        (
            "7 channel algebra",
            channel_algebra,
            Duration::from_secs(10),
        ),
        ("8 determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {budget:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
