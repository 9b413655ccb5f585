use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::*;
use crate::cocycles::{sigma_profile, Band, PhaseCell, PhaseFunction, StepCocycle, TrigPolynomial};
use crate::error::LabError;
use crate::induced::{induced_sampling, write_induced_samples, DEFAULT_RETURN_BUDGET};
use crate::precision::{CirclePoint, FixedReal, SCALE_BITS};
use crate::recurrence::{
    find_zero_sums, flow_zero_near_returns, flow_zero_set_returns, joint_zero_returns,
    near_returns, weiss_estimate, winding_zero_near_returns, write_records, write_weiss,
    ReturnRecord, TargetPiece, TargetSet,
};
use crate::skew::{skew_orbit_stats, ProductState, Rectangle, SkewSystem};
use crate::systems::{BaseMap, IntervalExchange, Roof, SpecialFlowState, TorusPoint, TorusWinding};

/// Digits after the decimal point in CSV and JSON output.
pub const DECIMAL_DIGITS: u32 = 30;

/// Environment variable overriding the output root.
pub const OUTPUT_ROOT_VAR: &str = "ERGOLAB_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ConfigError = 1,
    PrecisionExhausted = 2,
    BudgetExhausted = 3,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Lab(LabError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            RunError::Lab(LabError::PrecisionExhausted { .. }) => ExitStatus::PrecisionExhausted,
            RunError::Lab(LabError::CrossingBudgetExceeded | LabError::ReturnBudgetExceeded) => {
                ExitStatus::BudgetExhausted
            }
            _ => ExitStatus::ConfigError,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> RunError {
    RunError::Config(e.to_string())
}

fn io_err(e: impl std::fmt::Display) -> RunError {
    RunError::Io(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub config_digest: String,
    pub tool_version: String,
    pub precision_bits: u32,
    pub decimal_digits: u32,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_step: Option<u64>,
}

/// A validated experiment with every object built.
enum Job {
    ZeroSums { s: BaseMap, f: StepCocycle, x: CirclePoint, n: u64 },
    NearReturns { s: BaseMap, x: CirclePoint, n: u64, eps: FixedReal },
    JointZeroReturns { s: BaseMap, f: StepCocycle, x: CirclePoint, n: u64, eps: FixedReal },
    SigmaProfile { roof: Roof, f: PhaseFunction, x: SpecialFlowState, t_max: FixedReal },
    FlowSetReturns { roof: Roof, f: PhaseFunction, x: SpecialFlowState, t_max: FixedReal, target: TargetSet },
    FlowNearReturns { roof: Roof, f: PhaseFunction, x: SpecialFlowState, t_max: FixedReal, eps: FixedReal },
    Winding { w: TorusWinding, f: TrigPolynomial, p: TorusPoint, t_max: f64, eps: FixedReal, grid: Option<f64> },
    Weiss { s: BaseMap, f: StepCocycle, n_list: Vec<u64>, eps: f64, samples: u64, seed: u64 },
    Induced { s: BaseMap, f: StepCocycle, target: TargetSet, budget: u64, samples: u64, seed: u64, write_samples: bool },
    Skew { r: SkewSystem, s0: ProductState, n: u64, observables: Vec<Rectangle> },
}

fn point(r: &Real) -> Result<CirclePoint, RunError> {
    CirclePoint::parse(r.as_str()).map_err(config_err)
}

fn build_map(m: &MapConfig) -> Result<BaseMap, RunError> {
    match m {
        MapConfig::Rotation { alpha } => Ok(BaseMap::rotation(alpha.clone())),
        MapConfig::Iet { lengths, permutation } => IntervalExchange::new(
            lengths.iter().map(Real::value).collect(),
            permutation.clone(),
        )
        .map(BaseMap::Exchange)
        .map_err(config_err),
    }
}

fn build_roof(base: &MapConfig, roof: &RoofConfig) -> Result<Roof, RunError> {
    let starts = roof.starts.iter().map(point).collect::<Result<Vec<_>, _>>()?;
    let r = Roof::new(starts, roof.heights.iter().map(Real::value).collect(), build_map(base)?)
        .map_err(config_err)?;
    Ok(match roof.crossing_budget {
        Some(0) => return Err(config_err("crossing budget must be positive")),
        Some(b) => r.with_crossing_budget(b),
        None => r,
    })
}

fn base_system(c: &SystemConfig) -> Result<BaseMap, RunError> {
    match c {
        SystemConfig::Rotation { alpha } => build_map(&MapConfig::Rotation { alpha: alpha.clone() }),
        SystemConfig::Iet { lengths, permutation } => build_map(&MapConfig::Iet {
            lengths: lengths.clone(),
            permutation: permutation.clone(),
        }),
        _ => Err(config_err("detector needs a rotation or interval exchange system")),
    }
}

fn step_cocycle(c: &Option<CocycleConfig>) -> Result<StepCocycle, RunError> {
    match c {
        Some(CocycleConfig::Step { breakpoints, values }) => {
            let starts = breakpoints.iter().map(point).collect::<Result<Vec<_>, _>>()?;
            StepCocycle::integer(starts, values.clone()).map_err(config_err)
        }
        Some(CocycleConfig::Zero) => Ok(StepCocycle::zero()),
        _ => Err(config_err("detector needs an integer step cocycle")),
    }
}

fn phase_function(roof: &Roof, c: &Option<CocycleConfig>) -> Result<PhaseFunction, RunError> {
    match c {
        Some(CocycleConfig::Phase { cells }) => {
            let cells = cells
                .iter()
                .map(|c| {
                    Ok(PhaseCell {
                        start: point(&c.start)?,
                        bands: c
                            .bands
                            .iter()
                            .map(|b| Band {
                                from: b.from.value(),
                                value: b.value.value(),
                            })
                            .collect(),
                    })
                })
                .collect::<Result<Vec<_>, RunError>>()?;
            PhaseFunction::new(roof, cells).map_err(config_err)
        }
        Some(CocycleConfig::PhaseStep { breakpoints, values }) => {
            let starts = breakpoints.iter().map(point).collect::<Result<Vec<_>, _>>()?;
            PhaseFunction::base_step(roof, starts, values.iter().map(Real::value).collect())
                .map_err(config_err)
        }
        Some(CocycleConfig::Zero) => Ok(PhaseFunction::zero(roof)),
        _ => Err(config_err("detector needs a phase function")),
    }
}

fn special_flow(c: &SystemConfig) -> Result<Roof, RunError> {
    match c {
        SystemConfig::SpecialFlow { base, roof } => build_roof(base, roof),
        _ => Err(config_err("detector needs a special flow system")),
    }
}

fn flow_state(s: &StateConfig) -> Result<SpecialFlowState, RunError> {
    Ok(SpecialFlowState::new(point(&s.a)?, s.b.value()))
}

fn target(pieces: &[PieceConfig]) -> Result<TargetSet, RunError> {
    TargetSet::new(
        pieces
            .iter()
            .map(|p| TargetPiece {
                lo: p.lo.value(),
                hi: p.hi.value(),
                height: p.height.as_ref().map(|[a, b]| (a.value(), b.value())),
            })
            .collect(),
    )
    .map_err(config_err)
}

fn positive_time(t: &Real) -> Result<FixedReal, RunError> {
    let v = t.value();
    if v.certain_sign() != Some(std::cmp::Ordering::Greater) {
        return Err(config_err("t_max must be positive"));
    }
    Ok(v)
}

fn positive_count(n: u64, what: &str) -> Result<u64, RunError> {
    if n == 0 {
        return Err(config_err(format!("{what} must be positive")));
    }
    Ok(n)
}

fn sampling(c: &ExperimentConfig) -> Result<(u64, u64), RunError> {
    match &c.sampling {
        Some(s) if s.samples >= 100 => Ok((s.samples, s.seed)),
        Some(_) => Err(config_err("sampling needs at least 100 samples")),
        None => Err(config_err("detector needs a sampling block with a seed")),
    }
}

fn prepare(c: &ExperimentConfig) -> Result<Job, RunError> {
    if c.name.is_empty() {
        return Err(config_err("name must not be empty"));
    }
    let dir = Path::new(c.output_directory());
    if dir.is_absolute() || dir.components().any(|p| matches!(p, std::path::Component::ParentDir)) {
        return Err(config_err("output directory must be relative and stay under the output root"));
    }
    Ok(match &c.detector {
        DetectorConfig::ZeroSums { n, start } => Job::ZeroSums {
            s: base_system(&c.system)?,
            f: step_cocycle(&c.cocycle)?,
            x: point(start)?,
            n: positive_count(*n, "n")?,
        },
        DetectorConfig::NearReturns { n, start, eps } => Job::NearReturns {
            s: base_system(&c.system)?,
            x: point(start)?,
            n: positive_count(*n, "n")?,
            eps: eps.value(),
        },
        DetectorConfig::JointZeroReturns { n, start, eps } => Job::JointZeroReturns {
            s: base_system(&c.system)?,
            f: step_cocycle(&c.cocycle)?,
            x: point(start)?,
            n: positive_count(*n, "n")?,
            eps: eps.value(),
        },
        DetectorConfig::SigmaProfile { t_max, start } => {
            let roof = special_flow(&c.system)?;
            Job::SigmaProfile {
                f: phase_function(&roof, &c.cocycle)?,
                roof,
                x: flow_state(start)?,
                t_max: positive_time(t_max)?,
            }
        }
        DetectorConfig::FlowZeroSetReturns { t_max, start, target: t } => {
            let roof = special_flow(&c.system)?;
            Job::FlowSetReturns {
                f: phase_function(&roof, &c.cocycle)?,
                roof,
                x: flow_state(start)?,
                t_max: positive_time(t_max)?,
                target: target(t)?,
            }
        }
        DetectorConfig::FlowZeroNearReturns { t_max, start, eps } => {
            let roof = special_flow(&c.system)?;
            Job::FlowNearReturns {
                f: phase_function(&roof, &c.cocycle)?,
                roof,
                x: flow_state(start)?,
                t_max: positive_time(t_max)?,
                eps: eps.value(),
            }
        }
        DetectorConfig::WindingZeroNearReturns { t_max, start, eps, grid } => {
            let w = match &c.system {
                SystemConfig::TorusWinding { gamma } => TorusWinding::new(gamma.clone()),
                _ => return Err(config_err("detector needs a torus winding system")),
            };
            let f = match &c.cocycle {
                Some(CocycleConfig::Trig { modes }) => {
                    TrigPolynomial::new(modes.clone()).map_err(config_err)?
                }
                _ => return Err(config_err("detector needs a trigonometric polynomial")),
            };
            f.check_resonance(&w).map_err(config_err)?;
            if !(*t_max > 0.0 && t_max.is_finite()) {
                return Err(config_err("t_max must be positive"));
            }
            if grid.is_some_and(|g| !(g > 0.0)) {
                return Err(config_err("grid step must be positive"));
            }
            Job::Winding {
                w,
                f,
                p: TorusPoint::new(point(&start.x)?, point(&start.y)?),
                t_max: *t_max,
                eps: eps.value(),
                grid: *grid,
            }
        }
        DetectorConfig::Weiss { n_list, eps } => {
            let (samples, seed) = sampling(c)?;
            if n_list.is_empty() || n_list.contains(&0) {
                return Err(config_err("n_list must hold positive counts"));
            }
            if !(*eps > 0.0 && eps.is_finite()) {
                return Err(config_err("eps must be positive"));
            }
            Job::Weiss {
                s: base_system(&c.system)?,
                f: step_cocycle(&c.cocycle)?,
                n_list: n_list.clone(),
                eps: *eps,
                samples,
                seed,
            }
        }
        DetectorConfig::Induced { target: t, budget, write_samples } => {
            let (samples, seed) = sampling(c)?;
            let target = target(t)?;
            if !target.is_full_height() {
                return Err(config_err("induced maps need a base target set"));
            }
            Job::Induced {
                s: base_system(&c.system)?,
                f: step_cocycle(&c.cocycle)?,
                target,
                budget: positive_count(budget.unwrap_or(DEFAULT_RETURN_BUDGET), "budget")?,
                samples,
                seed,
                write_samples: *write_samples,
            }
        }
        DetectorConfig::SkewStats { n, start, observables } => {
            let r = match &c.system {
                SystemConfig::Skew { base, fiber } => {
                    SkewSystem::new(build_map(base)?, build_map(fiber)?, step_cocycle(&c.cocycle)?)
                        .map_err(config_err)?
                }
                _ => return Err(config_err("detector needs a skew system")),
            };
            let observables = observables
                .iter()
                .map(|o| {
                    Rectangle::new((o.x[0].value(), o.x[1].value()), (o.y[0].value(), o.y[1].value()))
                        .map_err(config_err)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Job::Skew {
                r,
                s0: ProductState::new(point(&start.x)?, point(&start.y)?),
                n: positive_count(*n, "n")?,
                observables,
            }
        }
    })
}

/// Checks that a config describes a runnable experiment.
pub fn validate(c: &ExperimentConfig) -> Result<(), RunError> {
    prepare(c).map(|_| ())
}

fn warnings(c: &ExperimentConfig) -> Vec<String> {
    let mut out = Vec::new();
    let mut note = |m: &MapConfig, role: &str| {
        if let MapConfig::Rotation { alpha } = m {
            if alpha.is_rational() {
                out.push(format!("{role} rotation by {alpha} is periodic: oracle mode, not ergodic"));
            }
        }
    };
    match &c.system {
        SystemConfig::Rotation { alpha } => note(&MapConfig::Rotation { alpha: alpha.clone() }, "base"),
        SystemConfig::SpecialFlow { base, .. } => note(base, "base"),
        SystemConfig::Skew { base, fiber } => {
            note(base, "base");
            note(fiber, "fiber");
        }
        SystemConfig::TorusWinding { gamma } if gamma.is_rational() => {
            out.push(format!("winding slope {gamma} is rational: orbits are closed, not ergodic"));
        }
        _ => {}
    }
    out
}

struct Outcome {
    csv: Vec<u8>,
    summary: serde_json::Value,
    extra: Vec<(&'static str, Vec<u8>)>,
}

fn records_outcome(records: &[ReturnRecord], detector: &str) -> Result<Outcome, LabError> {
    let mut csv = Vec::new();
    write_records(&mut csv, records, DECIMAL_DIGITS)?;
    let min_distance = records
        .iter()
        .filter_map(|r| r.distance.as_ref())
        .min_by(|a, b| a.mantissa().cmp(b.mantissa()))
        .map(|d| d.to_decimal(DECIMAL_DIGITS));
    Ok(Outcome {
        csv,
        summary: json!({
            "detector": detector,
            "records": records.len(),
            "first_time": records.first().map(|r| r.time.to_decimal(DECIMAL_DIGITS)),
            "last_time": records.last().map(|r| r.time.to_decimal(DECIMAL_DIGITS)),
            "min_distance": min_distance,
        }),
        extra: Vec::new(),
    })
}

fn csv_err(e: csv::Error) -> LabError {
    LabError::Invalid(format!("csv: {e}"))
}

fn execute(job: &Job) -> Result<Outcome, LabError> {
    match job {
        Job::ZeroSums { s, f, x, n } => records_outcome(&find_zero_sums(s, f, *x, *n)?, "zero_sums"),
        Job::JointZeroReturns { s, f, x, n, eps } => {
            records_outcome(&joint_zero_returns(s, f, *x, *n, eps)?, "joint_zero_returns")
        }
        Job::NearReturns { s, x, n, eps } => {
            let times = near_returns(s, *x, *n, eps)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n"]).map_err(csv_err)?;
            for t in &times {
                w.write_record([t.to_string()]).map_err(csv_err)?;
            }
            Ok(Outcome {
                csv: w.into_inner().map_err(|e| LabError::Invalid(e.to_string()))?,
                summary: json!({"detector": "near_returns", "records": times.len()}),
                extra: Vec::new(),
            })
        }
        Job::SigmaProfile { roof, f, x, t_max } => {
            let p = sigma_profile(roof, f, x, t_max)?;
            let mut csv = Vec::new();
            p.write_csv(&mut csv, DECIMAL_DIGITS)?;
            Ok(Outcome {
                csv,
                summary: json!({
                    "detector": "sigma_profile",
                    "nodes": p.nodes().len(),
                    "crossings": p.crossings(),
                    "final_sigma": p.final_sigma().to_decimal(DECIMAL_DIGITS),
                }),
                extra: Vec::new(),
            })
        }
        Job::FlowSetReturns { roof, f, x, t_max, target } => records_outcome(
            &flow_zero_set_returns(roof, f, x, t_max, target)?,
            "flow_zero_set_returns",
        ),
        Job::FlowNearReturns { roof, f, x, t_max, eps } => records_outcome(
            &flow_zero_near_returns(roof, f, x, t_max, eps)?,
            "flow_zero_near_returns",
        ),
        Job::Winding { w, f, p, t_max, eps, grid } => records_outcome(
            &winding_zero_near_returns(w, f, p, *t_max, eps, *grid)?,
            "winding_zero_near_returns",
        ),
        Job::Weiss { s, f, n_list, eps, samples, seed } => {
            let points = weiss_estimate(s, f, n_list, *eps, *samples, *seed)?;
            let mut csv = Vec::new();
            write_weiss(&mut csv, &points)?;
            Ok(Outcome {
                csv,
                summary: json!({
                    "detector": "weiss",
                    "eps": eps,
                    "samples": samples,
                    "seed": seed,
                    "points": points.iter().map(|p| json!({"n": p.n, "exceed": p.exceed})).collect::<Vec<_>>(),
                }),
                extra: Vec::new(),
            })
        }
        Job::Induced { s, f, target, budget, samples, seed, write_samples } => {
            let (stats, mut raw) = induced_sampling(s, f, target, *samples, *seed, *budget)?;
            raw.sort_by_key(|r| r.x.bits());
            let mut csv = Vec::new();
            let mut w = csv::Writer::from_writer(&mut csv);
            w.write_record(["quantity", "mean", "standard_error"]).map_err(csv_err)?;
            w.write_record(["return_time", &stats.mean_return_time.to_string(), &stats.return_time_se.to_string()])
                .map_err(csv_err)?;
            w.write_record(["f_tilde", &stats.mean_f_tilde.to_string(), &stats.f_tilde_se.to_string()])
                .map_err(csv_err)?;
            w.write_record(["kac_ratio", &stats.kac_ratio.to_string(), &stats.kac_ratio_se.to_string()])
                .map_err(csv_err)?;
            w.flush().map_err(|e| LabError::Invalid(e.to_string()))?;
            drop(w);
            let mut extra = Vec::new();
            if *write_samples {
                let mut buf = Vec::new();
                write_induced_samples(&mut buf, &raw, DECIMAL_DIGITS)?;
                extra.push(("samples.csv", buf));
            }
            Ok(Outcome {
                csv,
                summary: json!({"detector": "induced", "stats": stats}),
                extra,
            })
        }
        Job::Skew { r, s0, n, observables } => {
            let st = skew_orbit_stats(r, s0, *n, observables)?;
            let mut csv = Vec::new();
            let mut w = csv::Writer::from_writer(&mut csv);
            w.write_record(["observable", "mean", "standard_error"]).map_err(csv_err)?;
            for (i, a) in st.averages.iter().enumerate() {
                w.write_record([i.to_string(), a.mean.to_string(), a.standard_error.to_string()])
                    .map_err(csv_err)?;
            }
            w.flush().map_err(|e| LabError::Invalid(e.to_string()))?;
            drop(w);
            Ok(Outcome {
                csv,
                summary: json!({
                    "detector": "skew_stats",
                    "steps": st.steps,
                    "averages": st.averages,
                    "displacement": st.displacement,
                }),
                extra: Vec::new(),
            })
        }
    }
}

/// The output root: `$ERGOLAB_OUT` when set, else `default`.
pub fn output_root(default: &Path) -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| default.to_path_buf())
}

/// Result of a finished or aborted run that produced a manifest.
#[derive(Debug)]
pub struct RunReport {
    pub directory: PathBuf,
    pub manifest: RunManifest,
    pub status: ExitStatus,
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), RunError> {
    fs::write(dir.join(name), bytes).map_err(io_err)
}

/// `run_experiment`: validates, runs the detector and writes the results
/// under `root`.
///
/// Config errors write nothing. Precision and budget failures write the
/// config and a manifest that records the failure.
pub fn run_experiment(c: &ExperimentConfig, root: &Path) -> Result<RunReport, RunError> {
    let job = prepare(c)?;
    let started = Instant::now();
    let outcome = execute(&job);
    let elapsed = started.elapsed().as_secs_f64();
    let status = match &outcome {
        Ok(_) => ExitStatus::Success,
        Err(e) => {
            let status = RunError::Lab(e.clone()).exit_status();
            if status == ExitStatus::ConfigError {
                return Err(RunError::Lab(e.clone()));
            }
            status
        }
    };

    let dir = root.join(c.output_directory());
    fs::create_dir_all(&dir).map_err(io_err)?;
    let mut outputs = vec!["config.json".to_string()];
    write(&dir, "config.json", &c.canonical_bytes())?;
    if let Ok(o) = &outcome {
        if c.output.formats.contains(&OutputFormat::Csv) {
            write(&dir, "results.csv", &o.csv)?;
            outputs.push("results.csv".into());
            for (name, bytes) in &o.extra {
                write(&dir, name, bytes)?;
                outputs.push(name.to_string());
            }
        }
        if c.output.formats.contains(&OutputFormat::Json) {
            let text = serde_json::to_vec_pretty(&o.summary).map_err(io_err)?;
            write(&dir, "summary.json", &text)?;
            outputs.push("summary.json".into());
        }
    }
    let (error, error_step) = match &outcome {
        Ok(_) => (None, None),
        Err(e) => (
            Some(e.to_string()),
            match e {
                LabError::PrecisionExhausted { step } => *step,
                _ => None,
            },
        ),
    };
    let manifest = RunManifest {
        name: c.name.clone(),
        config_digest: c.digest(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        precision_bits: SCALE_BITS,
        decimal_digits: DECIMAL_DIGITS,
        wall_clock_seconds: elapsed,
        outputs,
        warnings: warnings(c),
        status: match status {
            ExitStatus::Success => "ok",
            ExitStatus::PrecisionExhausted => "precision_exhausted",
            ExitStatus::BudgetExhausted => "budget_exhausted",
            ExitStatus::ConfigError => unreachable!(),
        }
        .to_string(),
        error,
        error_step,
    };
    let text = serde_json::to_vec_pretty(&manifest).map_err(io_err)?;
    write(&dir, "manifest.json", &text)?;
    Ok(RunReport {
        directory: dir,
        manifest,
        status,
    })
}

/// Re-reads `config.json` and `manifest.json` from a run directory and
/// checks the stored digest against the canonical config bytes.
pub fn verify_manifest(dir: &Path) -> Result<RunManifest, RunError> {
    let text = fs::read_to_string(dir.join("config.json")).map_err(io_err)?;
    let config = ExperimentConfig::from_json(&text).map_err(config_err)?;
    let manifest: RunManifest =
        serde_json::from_slice(&fs::read(dir.join("manifest.json")).map_err(io_err)?).map_err(io_err)?;
    if config.canonical_bytes() != text.as_bytes() {
        return Err(config_err("stored config is not in canonical form"));
    }
    if config.digest() != manifest.config_digest {
        return Err(config_err("config digest does not match the manifest"));
    }
    Ok(manifest)
}
