//! Command implementations behind the `ermrates` binary.

use std::fmt;
use std::path::{Path, PathBuf};

use ermrates::classcat::ConceptClass;
use ermrates::curves::{
    estimate_curve, fit_category, ratio_diagnostic, Learner, LearnerRule, LearningCurve, RateFit, RatioPoint,
};
use ermrates::dims::{classify_rate, compute_report, Classification, DimensionReport, ReportOptions};
use ermrates::distros::{check_schedule, slow_schedule, ConditionViolation, RateTable, SlowSchedule};
use ermrates::erm::ScriptedRule;
use serde::Serialize;

pub mod bundles;
pub mod specs;

use specs::DistSpec;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_TRIALS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    BadInput(String),
    /// A search budget ran out; the partial output was written.
    Budget(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::BadInput(m) => write!(f, "bad input: {m}"),
            CliError::Budget(m) => write!(f, "budget exhausted: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    std::fs::write(&p, contents).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    Ok(p)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Runs `f` on a pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    Ok(pool.install(f))
}

pub fn cmd_dims(c: &ConceptClass, opts: &ReportOptions, out: &Path) -> Result<DimensionReport, CliError> {
    let r = compute_report(c, opts).map_err(|e| CliError::BadInput(e.to_string()))?;
    write_out(out, "dims.json", &to_json(&r))?;
    if r.budget_exhausted() {
        return Err(CliError::Budget("a prefix search hit its node or branching cap".into()));
    }
    Ok(r)
}

pub fn learner_for(c: &ConceptClass, d: &DistSpec, rule: LearnerRule) -> Result<Learner, CliError> {
    let l = match (&d.family, rule) {
        (Some(f), LearnerRule::Scripted(ScriptedRule::B5MinConsistentBlock)) => Learner::blocks(f.clone(), &d.dist),
        _ => Learner::new(c, &d.dist, rule),
    };
    l.map_err(|e| CliError::BadInput(e.to_string()))
}

pub fn run_curve(
    c: &ConceptClass,
    d: &DistSpec,
    rule: LearnerRule,
    grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<LearningCurve, CliError> {
    let l = learner_for(c, d, rule)?;
    estimate_curve(&l, grid, trials, seed).map_err(|e| CliError::BadInput(e.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub fit: RateFit,
    pub ratios: Vec<RatioPoint>,
    pub curve: LearningCurve,
}

impl CurveReport {
    pub fn new(curve: LearningCurve) -> Self {
        CurveReport { fit: fit_category(&curve), ratios: ratio_diagnostic(&curve).unwrap_or_default(), curve }
    }
}

pub fn cmd_curve(
    c: &ConceptClass,
    d: &DistSpec,
    rule: LearnerRule,
    grid: &[usize],
    trials: usize,
    seed: u64,
    out: &Path,
) -> Result<CurveReport, CliError> {
    let curve = run_curve(c, d, rule, grid, trials, seed)?;
    write_out(out, "curve.csv", &curve.to_csv())?;
    let rep = CurveReport::new(curve);
    write_out(out, "fit.json", &to_json(&rep))?;
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub classification: Classification,
    pub reports: Vec<DimensionReport>,
}

/// Classes are taken as truncations of one family, in increasing size.
pub fn cmd_classify(classes: &[ConceptClass], opts: &ReportOptions, out: &Path) -> Result<ClassifyReport, CliError> {
    let reports = classes
        .iter()
        .map(|c| compute_report(c, opts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    let rep = ClassifyReport { classification: classify_rate(&reports), reports };
    write_out(out, "classification.json", &to_json(&rep))?;
    if rep.reports.iter().any(|r| r.budget_exhausted()) {
        return Err(CliError::Budget("a prefix search hit its node or branching cap".into()));
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScheduleReport {
    pub schedule: SlowSchedule,
    pub violations: Vec<ConditionViolation>,
    pub pass: bool,
}

pub fn schedule_report(rate: &str, t_max: usize, n_max: usize) -> Result<ScheduleReport, CliError> {
    let table = RateTable::named(rate, n_max).ok_or_else(|| CliError::BadInput(format!("unknown rate {rate}")))?;
    let schedule = slow_schedule(&table, t_max).map_err(|e| CliError::BadInput(e.to_string()))?;
    let violations = check_schedule(&schedule, &table);
    Ok(ScheduleReport { pass: violations.is_empty(), schedule, violations })
}

pub fn cmd_schedule(rate: &str, t_max: usize, n_max: usize, out: &Path) -> Result<ScheduleReport, CliError> {
    let r = schedule_report(rate, t_max, n_max)?;
    write_out(out, "schedule.json", &to_json(&r))?;
    Ok(r)
}
