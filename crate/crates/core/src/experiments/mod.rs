//! Reproducible experiment driver.
//!
//! An [`ExperimentSpec`] names a built-in experiment and optionally overrides its parameter
//! grids. The built-in expands the resolved parameters into independent runs, which are
//! executed on a bounded worker pool and collected in run order, so the report does not
//! depend on the number of workers. Checks are evaluated on the ordered records with
//! thresholds fixed in [`catalog`].

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::stochastic::Mollifier;

pub mod catalog;
mod float;

pub use catalog::{builtin, builtins, Builtin};

pub const TOOL: &str = "paracalc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const WORKERS_ENV: &str = "PARACALC_WORKERS";

/// How per-sample seeds are obtained, recorded in every report.
pub const SEED_EXPANSION: &str = "explicit seeds are used as given; sample i of master seed m uses \
     derive_seed(m, i) = splitmix64(splitmix64(m) ^ splitmix64(i + 0x5eed)); all streams are ChaCha8";

/// Experiment request. Omitted grids fall back to the built-in defaults; a grid that is
/// present must be non-empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernels: Option<Vec<Mollifier>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Subset of the built-in's checks to evaluate; all of them when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assertions: Option<Vec<String>>,
}

impl ExperimentSpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.to_string(), ..Self::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Fully resolved parameters of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub equation: Option<String>,
    pub seeds: Vec<u64>,
    pub eps: Vec<f64>,
    pub kernels: Vec<Mollifier>,
    pub n: Vec<usize>,
    pub dt: Vec<f64>,
    pub t_final: f64,
    pub samples: usize,
    pub assertions: Vec<String>,
}

impl Params {
    /// Sample seed `i` of the first master seed.
    pub fn sample_seed(&self, i: usize) -> u64 {
        crate::stochastic::derive_seed(self.seeds[0], i as u64)
    }
}

/// One unit of work: a key unique within the experiment and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub key: String,
    pub params: BTreeMap<String, Value>,
}

impl RunSpec {
    pub fn new(key: impl Into<String>) -> Self {
        Self { key: key.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.params.insert(name.to_string(), v.into());
        self
    }

    fn get(&self, name: &str) -> Result<&Value> {
        self.params.get(name).ok_or_else(|| Error::Unknown { kind: "run parameter", name: name.to_string() })
    }

    pub fn f64(&self, name: &str) -> Result<f64> {
        self.get(name)?.as_f64().ok_or_else(|| Error::Format(format!("run parameter {name} is not a number")))
    }

    pub fn u64(&self, name: &str) -> Result<u64> {
        self.get(name)?.as_u64().ok_or_else(|| Error::Format(format!("run parameter {name} is not an integer")))
    }

    pub fn usize(&self, name: &str) -> Result<usize> {
        Ok(self.u64(name)? as usize)
    }

    pub fn str(&self, name: &str) -> Result<&str> {
        self.get(name)?.as_str().ok_or_else(|| Error::Format(format!("run parameter {name} is not a string")))
    }

    pub fn bool(&self, name: &str) -> Result<bool> {
        self.get(name)?.as_bool().ok_or_else(|| Error::Format(format!("run parameter {name} is not a boolean")))
    }

    pub fn kernel(&self) -> Result<Mollifier> {
        self.str("kernel")?.parse()
    }
}

pub type Values = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub key: String,
    pub params: BTreeMap<String, Value>,
    #[serde(with = "float::map")]
    pub values: Values,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "float::scalar")]
    pub value: f64,
    /// Human-readable acceptance condition on `value`.
    pub bound: String,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound: format!("<= {bound:e}"), passed: value <= bound }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound: format!(">= {bound}"), passed: value >= bound }
    }

    pub fn within(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Self { name: name.into(), value, bound: format!("{target} +- {tol}"), passed: (value - target).abs() <= tol }
    }

    pub fn holds(name: &str, ok: bool, what: &str) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, bound: what.into(), passed: ok }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    #[serde(with = "float::map")]
    pub aggregates: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

/// Self-contained result of an experiment. Contains no timing, so identical inputs give
/// byte-identical serializations; timing goes to [`RunMeta`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub version: String,
    pub platform: String,
    pub name: String,
    pub spec: Params,
    pub seed_expansion: String,
    pub records: Vec<Record>,
    #[serde(with = "float::map")]
    pub aggregates: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMeta {
    pub name: String,
    pub workers: usize,
    pub runtime_seconds: f64,
}

pub fn platform() -> String {
    format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS)
}

/// Pool size from `PARACALC_WORKERS`, else the available parallelism.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(Error::InvalidArgument(format!("{WORKERS_ENV} = {s:?} is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// `(name, description)` of every built-in.
pub fn list_experiments() -> Vec<(&'static str, &'static str)> {
    builtins().iter().map(|b| (b.name, b.description)).collect()
}

fn pick<T: Clone>(field: &str, given: &Option<Vec<T>>, default: Vec<T>) -> Result<Vec<T>> {
    match given {
        None => Ok(default),
        Some(v) if v.is_empty() => Err(Error::InvalidArgument(format!("parameter list `{field}` is empty"))),
        Some(v) => Ok(v.clone()),
    }
}

/// Checks `spec` and merges it with the built-in defaults. Nothing is computed.
pub fn resolve(spec: &ExperimentSpec) -> Result<(&'static Builtin, Params)> {
    let b = builtin(&spec.name)?;
    let d = (b.defaults)();
    let equation = match (&spec.equation, b.equations) {
        (None, _) => d.equation.clone(),
        (Some(e), allowed) if allowed.contains(&e.as_str()) => Some(e.clone()),
        (Some(e), _) => return Err(Error::Unknown { kind: "equation", name: e.clone() }),
    };
    let assertions = pick("assertions", &spec.assertions, b.checks.iter().map(|s| s.to_string()).collect())?;
    for a in &assertions {
        if !b.checks.contains(&a.as_str()) {
            return Err(Error::Unknown { kind: "assertion", name: a.clone() });
        }
    }
    let p = Params {
        equation,
        seeds: pick("seeds", &spec.seeds, d.seeds)?,
        eps: pick("eps", &spec.eps, d.eps)?,
        kernels: pick("kernels", &spec.kernels, d.kernels)?,
        n: pick("n", &spec.n, d.n)?,
        dt: pick("dt", &spec.dt, d.dt)?,
        t_final: spec.t_final.unwrap_or(d.t_final),
        samples: spec.samples.unwrap_or(d.samples),
        assertions,
    };
    if p.eps.iter().any(|e| !(*e > 0.0)) || p.dt.iter().any(|e| !(*e > 0.0)) || !(p.t_final > 0.0) {
        return Err(Error::InvalidArgument("eps, dt and T must be positive".into()));
    }
    if p.samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    (b.validate)(&p)?;
    Ok((b, p))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_with_workers(spec, workers_from_env()?)
}

/// Runs on a dedicated pool of `workers` threads.
pub fn run_with_workers(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentReport> {
    let (b, p) = resolve(spec)?;
    execute(b, p, workers)
}

fn execute(b: &'static Builtin, p: Params, workers: usize) -> Result<ExperimentReport> {
    let runs = (b.plan)(&p)?;
    let mut keys = BTreeSet::new();
    for r in &runs {
        if !keys.insert(r.key.as_str()) {
            return Err(Error::InvalidArgument(format!("duplicate run key {}", r.key)));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build a pool of {workers} workers: {e}")))?;
    let records: Vec<Record> = pool.install(|| {
        runs.par_iter()
            .map(|r| match (b.execute)(&p, r) {
                Ok(values) => Record { key: r.key.clone(), params: r.params.clone(), values, error: None },
                Err(e) => Record {
                    key: r.key.clone(),
                    params: r.params.clone(),
                    values: Values::new(),
                    error: Some(e.to_string()),
                },
            })
            .collect()
    });
    let a = (b.assess)(&p, &records);
    let checks: Vec<Check> = a.checks.into_iter().filter(|c| p.assertions.contains(&c.name)).collect();
    let passed = records.iter().all(|r| r.error.is_none()) && checks.iter().all(|c| c.passed);
    Ok(ExperimentReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        platform: platform(),
        name: b.name.into(),
        spec: p,
        seed_expansion: SEED_EXPANSION.into(),
        records,
        aggregates: a.aggregates,
        checks,
        passed,
    })
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per record: key, every parameter, every value, error.
    pub fn to_csv(&self) -> String {
        let pnames: BTreeSet<&String> = self.records.iter().flat_map(|r| r.params.keys()).collect();
        let vnames: BTreeSet<&String> = self.records.iter().flat_map(|r| r.values.keys()).collect();
        let mut out = String::from("key");
        for n in pnames.iter().chain(vnames.iter()) {
            out.push(',');
            out.push_str(n);
        }
        out.push_str(",error\n");
        for r in &self.records {
            out.push_str(&csv_cell(&r.key));
            for n in &pnames {
                out.push(',');
                if let Some(v) = r.params.get(*n) {
                    out.push_str(&csv_cell(&match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    }));
                }
            }
            for n in &vnames {
                out.push(',');
                if let Some(v) = r.values.get(*n) {
                    out.push_str(&v.to_string());
                }
            }
            out.push(',');
            out.push_str(&csv_cell(r.error.as_deref().unwrap_or("")));
            out.push('\n');
        }
        out
    }

    /// Writes `report.json` and `table.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        fs::write(dir.join("table.csv"), self.to_csv())?;
        Ok(())
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs `spec`, writes its outputs to `spec.output_dir` (default `runs/<name>`) and returns
/// the report together with the directory used.
pub fn run_and_write(spec: &ExperimentSpec) -> Result<(ExperimentReport, PathBuf)> {
    let workers = workers_from_env()?;
    let t0 = Instant::now();
    let report = run_with_workers(spec, workers)?;
    let dir = spec.output_dir.clone().unwrap_or_else(|| PathBuf::from("runs").join(&report.name));
    report.write(&dir)?;
    let meta = RunMeta { name: report.name.clone(), workers, runtime_seconds: t0.elapsed().as_secs_f64() };
    fs::write(dir.join("run_meta.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok((report, dir))
}

#[derive(Clone, Debug)]
pub struct ReplayOutcome {
    pub report: ExperimentReport,
    pub warnings: Vec<String>,
    /// Differences between the stored and the re-executed report.
    pub mismatches: Vec<String>,
}

impl ReplayOutcome {
    pub fn identical(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-executes `stored` from its recorded parameters and compares everything it measured.
pub fn replay(stored: &ExperimentReport) -> Result<ReplayOutcome> {
    replay_with_workers(stored, workers_from_env()?)
}

pub fn replay_with_workers(stored: &ExperimentReport, workers: usize) -> Result<ReplayOutcome> {
    let mut warnings = Vec::new();
    if stored.tool != TOOL {
        return Err(Error::Format(format!("report was written by {:?}, not {TOOL}", stored.tool)));
    }
    if stored.version != VERSION {
        warnings.push(format!("report version {} differs from tool version {VERSION}", stored.version));
    }
    if stored.platform != platform() {
        warnings.push(format!("report platform {} differs from {}", stored.platform, platform()));
    }
    let b = builtin(&stored.name)?;
    (b.validate)(&stored.spec)?;
    let report = execute(b, stored.spec.clone(), workers)?;
    let mut mismatches = Vec::new();
    if report.records.len() != stored.records.len() {
        mismatches.push(format!("{} records, stored {}", report.records.len(), stored.records.len()));
    }
    for (a, s) in report.records.iter().zip(&stored.records) {
        if a.key != s.key || a.params != s.params {
            mismatches.push(format!("run {} does not match stored run {}", a.key, s.key));
        } else if !float::same_map(&a.values, &s.values) || a.error != s.error {
            mismatches.push(format!("run {}: measured values differ", a.key));
        }
    }
    if !float::same_map(&report.aggregates, &stored.aggregates) {
        mismatches.push("aggregates differ".into());
    }
    let same_check = |a: &Check, b: &Check| {
        a.name == b.name && a.bound == b.bound && a.passed == b.passed && a.value.to_bits() == b.value.to_bits()
    };
    if report.checks.len() != stored.checks.len()
        || !report.checks.iter().zip(&stored.checks).all(|(a, b)| same_check(a, b))
    {
        mismatches.push("checks differ".into());
    }
    if report.to_csv() != stored.to_csv() {
        mismatches.push("CSV bytes differ".into());
    }
    Ok(ReplayOutcome { report, warnings, mismatches })
}
