//! Benchmark plumbing behind the `scb-admm` binary: instance specs, single
//! runs, paired comparisons and performance-profile data.
//!
//! Every run writes an iteration log and a summary row. Summary rows carry
//! no timing so reruns of one spec produce identical bytes; wall times go to
//! a separate timing file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{baseline_config, direct_admm_solve_with};
use crate::diagnostics::{ResidualMeasure, ResidualReport};
use crate::error::{Error, Result};
use crate::instances::{
    build_biq, build_ncm, build_random_qsdp, load_sparse_instance, scalar_qsdp, NcmInstance, NormKind, QsdpInstance,
    Weights,
};
use crate::model::BlockProblem;
use crate::scb::{scb_spadmm_solve_with, SolveResult, SolverConfig, Termination};
use crate::solver2::spadmm2_solve_with;

pub const TRACE_HEADER: &str = "iter,eta,eta_P,eta_D,eta_gap,obj_P,obj_D,elapsed_s";
pub const PROFILE_HEADER: &str = "ratio,fraction,solver";

/// Exit status of a run or a batch of runs.
pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Scb,
    DirectAdmm,
    Spadmm2,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Scb => "scb",
            Self::DirectAdmm => "direct_admm",
            Self::Spadmm2 => "spadmm2",
        }
    }

    /// The configuration the solver actually runs with: the baseline always
    /// uses its customary unit step length.
    pub fn effective_config(self, config: &SolverConfig) -> SolverConfig {
        match self {
            Self::DirectAdmm => baseline_config(config),
            _ => config.clone(),
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scb" => Ok(Self::Scb),
            "direct_admm" | "admm" => Ok(Self::DirectAdmm),
            "spadmm2" => Ok(Self::Spadmm2),
            other => Err(Error::Configuration(format!(
                "unknown solver {other:?} (expected scb, direct_admm or spadmm2)"
            ))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One solver run on one instance.
///
/// `instance` is either a builder call `name:key=value,...` or the path of
/// a sparse BIQ data file. Builders:
///
/// - `random_qsdp:n=30,m=20,rank=5,seed=1`
/// - `biq:n=10,rank=5,seed=1` (random ±1 data) or `biq:path=FILE,rank=5,seed=1`
/// - `scalar:b=1,c=-1`
/// - `ncm:n=20,alpha=0.1,norm=frobenius|spectral,weights=surrogate|ones,seed=1`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub instance: String,
    #[serde(default = "default_solver")]
    pub solver: SolverKind,
    #[serde(default)]
    pub config: SolverConfig,
    /// Directory receiving `trace.csv`, `summary.csv` and `timing.csv`.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_solver() -> SolverKind {
    SolverKind::Scb
}

impl RunSpec {
    pub fn new(instance: &str, solver: SolverKind, config: SolverConfig) -> Self {
        Self {
            instance: instance.to_string(),
            solver,
            config,
            out: None,
        }
    }
}

/// A built instance together with the residual family it is judged by.
pub enum Instance {
    Qsdp(QsdpInstance),
    Ncm(NcmInstance),
}

impl Instance {
    pub fn name(&self) -> &str {
        match self {
            Self::Qsdp(q) => &q.name,
            Self::Ncm(n) => &n.name,
        }
    }

    pub fn block_problem(&self) -> Result<BlockProblem> {
        match self {
            Self::Qsdp(q) => q.block_problem(),
            Self::Ncm(n) => n.block_problem(),
        }
    }

    pub fn measure(&self) -> &dyn ResidualMeasure {
        match self {
            Self::Qsdp(q) => q,
            Self::Ncm(n) => n,
        }
    }
}

struct Params<'a> {
    builder: &'a str,
    values: BTreeMap<&'a str, &'a str>,
}

impl<'a> Params<'a> {
    fn parse(builder: &'a str, text: &'a str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::Configuration(format!("{builder}: expected key=value, got {item:?}"))
            })?;
            if values.insert(k.trim(), v.trim()).is_some() {
                return Err(Error::Configuration(format!("{builder}: duplicate parameter {k:?}")));
            }
        }
        Ok(Self { builder, values })
    }

    fn get<T: std::str::FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T> {
        match self.values.remove(key) {
            Some(v) => v.parse().map_err(|_| {
                Error::Configuration(format!("{}: cannot parse {key}={v:?}", self.builder))
            }),
            None => default.ok_or_else(|| Error::Configuration(format!("{}: missing parameter {key}", self.builder))),
        }
    }

    fn take_str(&mut self, key: &str) -> Option<&'a str> {
        self.values.remove(key)
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(k) => Err(Error::Configuration(format!("{}: unknown parameter {k:?}", self.builder))),
            None => Ok(()),
        }
    }
}

/// Random symmetric `±1` BIQ data with zero diagonal and a `±1` cost vector.
fn random_biq_data(n0: usize, seed: u64) -> (nalgebra::DMatrix<f64>, nalgebra::DVector<f64>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut sign = || if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mut q = nalgebra::DMatrix::zeros(n0, n0);
    for j in 0..n0 {
        for i in 0..j {
            let s = sign();
            q[(i, j)] = s;
            q[(j, i)] = s;
        }
    }
    let c = nalgebra::DVector::from_fn(n0, |_, _| sign());
    (q, c)
}

/// Builds the instance named by a [`RunSpec::instance`] string.
pub fn build_instance(source: &str) -> Result<Instance> {
    let Some((builder, rest)) = source.split_once(':').filter(|(b, _)| is_builder(b)) else {
        let path = Path::new(source);
        if !path.exists() {
            return Err(Error::Configuration(format!(
                "{source:?} is neither a builder spec nor an existing file"
            )));
        }
        let data = load_sparse_instance(path)?;
        let rank = data.q.nrows().div_ceil(2);
        return Ok(Instance::Qsdp(build_biq(&data.q, &data.c, rank, 0)?));
    };
    let mut p = Params::parse(builder, rest)?;
    let inst = match builder {
        "random_qsdp" => {
            let n = p.get("n", Some(30))?;
            let m = p.get("m", Some(20))?;
            let rank = p.get("rank", Some(5))?;
            let seed = p.get("seed", Some(0))?;
            Instance::Qsdp(build_random_qsdp(n, m, rank, seed)?)
        }
        "biq" => {
            let seed = p.get("seed", Some(0))?;
            let (q, c) = match p.take_str("path") {
                Some(path) => {
                    let data = load_sparse_instance(Path::new(path))?;
                    (data.q, data.c)
                }
                None => random_biq_data(p.get("n", Some(10))?, seed),
            };
            let rank = p.get("rank", Some(q.nrows().div_ceil(2)))?;
            Instance::Qsdp(build_biq(&q, &c, rank, seed)?)
        }
        "scalar" => {
            let b = p.get("b", Some(1.0))?;
            let c = p.get("c", Some(-1.0))?;
            Instance::Qsdp(scalar_qsdp(b, c)?)
        }
        "ncm" => {
            let n = p.get("n", Some(20))?;
            let alpha = p.get("alpha", Some(0.1))?;
            let seed = p.get("seed", Some(0))?;
            let kind = match p.take_str("norm").unwrap_or("frobenius") {
                "frobenius" | "f" => NormKind::Frobenius,
                "spectral" | "2" => NormKind::Spectral,
                other => return Err(Error::Configuration(format!("ncm: unknown norm {other:?}"))),
            };
            let weights = match p.take_str("weights").unwrap_or("surrogate") {
                "surrogate" => Weights::Surrogate,
                "ones" => Weights::Ones,
                other => return Err(Error::Configuration(format!("ncm: unknown weights {other:?}"))),
            };
            Instance::Ncm(build_ncm(n, alpha, kind, weights, seed)?)
        }
        _ => unreachable!("is_builder admitted {builder}"),
    };
    p.finish()?;
    Ok(inst)
}

fn is_builder(name: &str) -> bool {
    matches!(name, "random_qsdp" | "biq" | "scalar" | "ncm")
}

/// Outcome of one run, with everything the writers need.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub spec: RunSpec,
    /// Configuration the solver ran with.
    pub config: SolverConfig,
    pub instance_name: String,
    pub result: SolveResult,
}

impl RunRecord {
    pub fn converged(&self) -> bool {
        self.result.termination == Termination::ToleranceMet
    }

    pub fn exit_code(&self) -> i32 {
        if self.converged() {
            EXIT_CONVERGED
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

/// Builds the instance and runs the solver; writes nothing.
pub fn execute(spec: &RunSpec) -> Result<RunRecord> {
    let instance = build_instance(&spec.instance)?;
    let problem = instance.block_problem()?;
    let config = spec.solver.effective_config(&spec.config);
    config.validate()?;
    let measure = instance.measure();
    let result = match spec.solver {
        SolverKind::Scb => scb_spadmm_solve_with(&problem, &config, measure)?,
        SolverKind::DirectAdmm => direct_admm_solve_with(&problem, &config, measure)?,
        SolverKind::Spadmm2 => spadmm2_solve_with(&problem, &config, measure)?,
    };
    log::info!(
        "{} / {}: {} after {} iterations (η = {:.3e})",
        instance.name(),
        spec.solver,
        result.termination,
        result.iterations,
        result.final_report.eta
    );
    Ok(RunRecord {
        spec: spec.clone(),
        config,
        instance_name: instance.name().to_string(),
        result,
    })
}

#[derive(Serialize)]
struct TraceRow {
    iter: usize,
    eta: f64,
    #[serde(rename = "eta_P")]
    eta_p: f64,
    #[serde(rename = "eta_D")]
    eta_d: f64,
    eta_gap: Option<f64>,
    #[serde(rename = "obj_P")]
    obj_p: f64,
    #[serde(rename = "obj_D")]
    obj_d: f64,
    elapsed_s: f64,
}

impl From<&ResidualReport> for TraceRow {
    fn from(r: &ResidualReport) -> Self {
        Self {
            iter: r.iter,
            eta: r.eta,
            eta_p: r.eta_p,
            eta_d: r.dual_summary(),
            eta_gap: r.eta_gap,
            obj_p: r.obj_p,
            obj_d: r.obj_d,
            elapsed_s: r.elapsed_s,
        }
    }
}

/// Iteration log as CSV text.
pub fn trace_csv(trace: &[ResidualReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in trace {
        w.serialize(TraceRow::from(r)).map_err(csv_err)?;
    }
    finish_csv(w)
}

/// One summary row; deliberately free of timing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance: String,
    pub solver: String,
    pub sigma: f64,
    pub tau: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub termination: String,
    pub iterations: usize,
    pub eta: f64,
    #[serde(rename = "eta_P")]
    pub eta_p: f64,
    #[serde(rename = "eta_D")]
    pub eta_d: f64,
    pub eta_gap: Option<f64>,
    #[serde(rename = "obj_P")]
    pub obj_p: f64,
    #[serde(rename = "obj_D")]
    pub obj_d: f64,
}

impl From<&RunRecord> for SummaryRow {
    fn from(rec: &RunRecord) -> Self {
        let r = &rec.result.final_report;
        Self {
            instance: rec.spec.instance.clone(),
            solver: rec.spec.solver.to_string(),
            sigma: rec.config.sigma,
            tau: rec.config.tau,
            tol: rec.config.tol,
            max_iter: rec.config.max_iter,
            termination: rec.result.termination.to_string(),
            iterations: rec.result.iterations,
            eta: r.eta,
            eta_p: r.eta_p,
            eta_d: r.dual_summary(),
            eta_gap: r.eta_gap,
            obj_p: r.obj_p,
            obj_d: r.obj_d,
        }
    }
}

pub fn summary_csv(records: &[&RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for rec in records {
        w.serialize(SummaryRow::from(*rec)).map_err(csv_err)?;
    }
    finish_csv(w)
}

#[derive(Serialize)]
struct TimingRow<'a> {
    instance: &'a str,
    solver: &'a str,
    iterations: usize,
    wall_time_s: f64,
}

pub fn timing_csv(records: &[&RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for rec in records {
        w.serialize(TimingRow {
            instance: &rec.spec.instance,
            solver: rec.spec.solver.as_str(),
            iterations: rec.result.iterations,
            wall_time_s: rec.result.wall_time,
        })
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("CSV: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

/// Runs `spec` and, when `spec.out` is set, writes `trace.csv`,
/// `summary.csv` and `timing.csv` there. Returns the exit status: `0` on
/// convergence, `2` when the run stopped without converging, `1` on error.
pub fn run(spec: &RunSpec) -> i32 {
    match run_record(spec) {
        Ok(rec) => rec.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

/// [`run`] returning the record instead of an exit status.
pub fn run_record(spec: &RunSpec) -> Result<RunRecord> {
    let rec = execute(spec)?;
    if let Some(dir) = &spec.out {
        write_file(dir, "trace.csv", &trace_csv(&rec.result.trace)?)?;
        write_file(dir, "summary.csv", &summary_csv(&[&rec])?)?;
        write_file(dir, "timing.csv", &timing_csv(&[&rec])?)?;
    }
    Ok(rec)
}

/// One cell of the comparison table.
#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    Finished {
        termination: Termination,
        iterations: usize,
        wall_time: f64,
    },
    Failed(String),
}

impl Entry {
    /// Cost used for the profile, `None` if the run did not solve the problem.
    pub fn solved_cost(&self) -> Option<f64> {
        match self {
            Self::Finished {
                termination: Termination::ToleranceMet,
                iterations,
                ..
            } => Some(*iterations as f64),
            _ => None,
        }
    }
}

/// Result of [`compare`]: a row per instance, a column per solver label.
#[derive(Debug)]
pub struct Comparison {
    /// Column labels; repeated solvers get `#2`, `#3`, … suffixes.
    pub labels: Vec<String>,
    pub instances: Vec<String>,
    /// `table[i][s]` is instance `i` under label `s` (`None` if not run).
    pub table: Vec<Vec<Option<Entry>>>,
    /// Successful runs, in spec order.
    pub records: Vec<RunRecord>,
    pub profile: Vec<ProfilePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub ratio: f64,
    pub fraction: f64,
    pub solver: String,
}

/// Performance-profile curve points from a `problems × solvers` cost
/// table (`None` = unsolved). For each solver the curve steps at every
/// ratio it attains; `fraction` is the share of problems it solves within
/// that ratio of the best solver's cost.
pub fn performance_profile(labels: &[String], costs: &[Vec<Option<f64>>]) -> Vec<ProfilePoint> {
    let nprob = costs.len();
    let mut out = Vec::new();
    if nprob == 0 {
        return out;
    }
    let ratios: Vec<Vec<Option<f64>>> = costs
        .iter()
        .map(|row| {
            let best = row.iter().flatten().copied().fold(f64::INFINITY, f64::min);
            row.iter().map(|c| c.map(|c| if best > 0.0 { c / best } else { 1.0 })).collect()
        })
        .collect();
    for (s, label) in labels.iter().enumerate() {
        let mut mine: Vec<f64> = ratios.iter().filter_map(|r| r[s]).collect();
        mine.sort_by(f64::total_cmp);
        mine.dedup();
        for r in mine {
            let within = ratios.iter().filter(|row| row[s].is_some_and(|x| x <= r)).count();
            out.push(ProfilePoint {
                ratio: r,
                fraction: within as f64 / nprob as f64,
                solver: label.clone(),
            });
        }
    }
    out
}

fn labels_for(specs: &[RunSpec]) -> Vec<(String, String)> {
    // (instance, label) per spec; the n-th spec of a solver on an instance gets suffix #n.
    let mut seen: BTreeMap<(String, SolverKind), usize> = BTreeMap::new();
    specs
        .iter()
        .map(|s| {
            let k = seen.entry((s.instance.clone(), s.solver)).or_insert(0);
            *k += 1;
            let label = if *k == 1 {
                s.solver.to_string()
            } else {
                format!("{}#{k}", s.solver)
            };
            (s.instance.clone(), label)
        })
        .collect()
}

/// Runs every spec (in parallel across at most `jobs` workers, each run
/// sequential) and pairs them by instance. Errors are recorded per cell and
/// do not discard the other runs.
pub fn compare(specs: &[RunSpec], jobs: usize) -> Result<Comparison> {
    if specs.is_empty() {
        return Err(Error::Configuration("compare needs at least one spec".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Configuration(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<RunRecord>> = pool.install(|| specs.par_iter().map(execute).collect());

    let keyed = labels_for(specs);
    let mut labels: Vec<String> = Vec::new();
    let mut instances: Vec<String> = Vec::new();
    for (inst, label) in &keyed {
        if !instances.contains(inst) {
            instances.push(inst.clone());
        }
        if !labels.contains(label) {
            labels.push(label.clone());
        }
    }
    let mut table = vec![vec![None; labels.len()]; instances.len()];
    let mut records = Vec::new();
    for ((inst, label), outcome) in keyed.iter().zip(outcomes) {
        let i = instances.iter().position(|x| x == inst).expect("instance listed");
        let s = labels.iter().position(|x| x == label).expect("label listed");
        table[i][s] = Some(match outcome {
            Ok(rec) => {
                let entry = Entry::Finished {
                    termination: rec.result.termination,
                    iterations: rec.result.iterations,
                    wall_time: rec.result.wall_time,
                };
                records.push(rec);
                entry
            }
            Err(e) => {
                log::error!("{inst} / {label}: {e}");
                Entry::Failed(e.to_string())
            }
        });
    }
    let costs: Vec<Vec<Option<f64>>> = table
        .iter()
        .map(|row| row.iter().map(|e| e.as_ref().and_then(Entry::solved_cost)).collect())
        .collect();
    let profile = performance_profile(&labels, &costs);
    Ok(Comparison {
        labels,
        instances,
        table,
        records,
        profile,
    })
}

impl Comparison {
    /// `0` if every run converged, `1` if any run failed, `2` otherwise.
    pub fn exit_code(&self) -> i32 {
        let cells = self.table.iter().flatten().flatten();
        let mut code = EXIT_CONVERGED;
        for e in cells {
            match e {
                Entry::Failed(_) => return EXIT_FAILURE,
                Entry::Finished { termination, .. } if *termination != Termination::ToleranceMet => {
                    code = EXIT_NOT_CONVERGED
                }
                _ => {}
            }
        }
        code
    }

    /// Per-instance table: for each label its termination, iteration count
    /// and wall time, plus `iterations` and `time_s` columns joining the
    /// labels with `|` as in the usual side-by-side layout.
    pub fn table_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["instance".to_string()];
        for l in &self.labels {
            header.push(format!("{l}_termination"));
            header.push(format!("{l}_iter"));
            header.push(format!("{l}_time_s"));
        }
        header.push("iterations".into());
        header.push("time_s".into());
        w.write_record(&header).map_err(csv_err)?;
        for (inst, row) in self.instances.iter().zip(&self.table) {
            let mut rec = vec![inst.clone()];
            let mut iters = Vec::new();
            let mut times = Vec::new();
            for cell in row {
                let (term, it, t) = match cell {
                    Some(Entry::Finished {
                        termination,
                        iterations,
                        wall_time,
                    }) => (termination.to_string(), iterations.to_string(), format!("{wall_time:.3}")),
                    Some(Entry::Failed(_)) => ("error".into(), String::new(), String::new()),
                    None => (String::new(), String::new(), String::new()),
                };
                iters.push(it.clone());
                times.push(t.clone());
                rec.extend([term, it, t]);
            }
            rec.push(iters.join("|"));
            rec.push(times.join("|"));
            w.write_record(&rec).map_err(csv_err)?;
        }
        finish_csv(w)
    }

    pub fn profile_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(PROFILE_HEADER.split(',')).map_err(csv_err)?;
        for p in &self.profile {
            w.write_record([p.ratio.to_string(), p.fraction.to_string(), p.solver.clone()])
                .map_err(csv_err)?;
        }
        finish_csv(w)
    }

    /// Writes `summary.csv`, `timing.csv`, `comparison.csv`, `profile.csv`
    /// and one iteration log per run under `traces/`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let recs: Vec<&RunRecord> = self.records.iter().collect();
        write_file(dir, "summary.csv", &summary_csv(&recs)?)?;
        write_file(dir, "timing.csv", &timing_csv(&recs)?)?;
        write_file(dir, "comparison.csv", &self.table_csv()?)?;
        write_file(dir, "profile.csv", &self.profile_csv()?)?;
        let traces = dir.join("traces");
        for (k, rec) in self.records.iter().enumerate() {
            let name = format!("{k:03}_{}.csv", rec.spec.solver);
            write_file(&traces, &name, &trace_csv(&rec.result.trace)?)?;
        }
        Ok(())
    }
}

/// Reads a spec file: a JSON [`RunSpec`] or a JSON array of them.
pub fn load_specs(path: &Path) -> Result<Vec<RunSpec>> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    let parse = |v: serde_json::Value| {
        serde_json::from_value::<RunSpec>(v).map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))
    };
    match value {
        serde_json::Value::Array(items) => items.into_iter().map(parse).collect(),
        other => Ok(vec![parse(other)?]),
    }
}
