//! Benchmark matrix runner and its CSV record format.
//!
//! One CSV row is one backend on one matrix cell. Rows are appended and
//! flushed cell by cell so an interrupted run leaves a readable file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{mpsc, Mutex};
use std::time::Instant;

use roster_core::generators::{build_problem_a, build_problem_b_with, ProblemASpec, ProblemBParams, ProblemBSpec};
use roster_core::lp::emit_lp;
use roster_core::smt::emit_smtlib;
use roster_core::{eval_all, Backend, GcInstance, RosterInstance, Schedule, SolveOutcome, Verdict};
use serde::{Deserialize, Serialize};

use crate::fuzz::fuzz_case;
use crate::runner::{run_milp, run_native, run_smt, SolverConfig};

pub const CSV_HEADER: &str = "problem,shifts,staff,days,seed,backend,verdict,wall_time_s,validated";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Problem {
    A,
    B,
    Fuzz,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::A => "a",
            Problem::B => "b",
            Problem::Fuzz => "fuzz",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Problem::A),
            "b" => Ok(Problem::B),
            "fuzz" => Ok(Problem::Fuzz),
            _ => Err(format!("unknown problem {s:?}; expected a, b or fuzz")),
        }
    }
}

pub fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Smt => "smt",
        Backend::Milp => "milp",
        Backend::Native => "native",
    }
}

pub fn parse_backend(s: &str) -> Result<Backend, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "smt" => Ok(Backend::Smt),
        "milp" => Ok(Backend::Milp),
        "native" => Ok(Backend::Native),
        other => Err(format!("unknown backend {other:?}; expected smt, milp or native")),
    }
}

/// Inclusive integer range with a step, written `LO..HI[:STEP]`, or a
/// single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisRange {
    pub lo: u32,
    pub hi: u32,
    pub step: u32,
}

impl AxisRange {
    pub fn single(v: u32) -> Self {
        AxisRange { lo: v, hi: v, step: 1 }
    }

    pub fn values(&self) -> Vec<u32> {
        (self.lo..=self.hi).step_by(self.step as usize).collect()
    }
}

impl FromStr for AxisRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected N or LO..HI[:STEP] with positive values, got {s:?}");
        let (span, step) = match s.split_once(':') {
            Some((span, step)) => (span, step.parse::<u32>().map_err(|_| bad())?),
            None => (s, 1),
        };
        let (lo, hi) = match span.split_once("..") {
            Some((lo, hi)) => (lo.parse::<u32>().map_err(|_| bad())?, hi.trim_start_matches('=').parse::<u32>().map_err(|_| bad())?),
            None => {
                let v = span.parse::<u32>().map_err(|_| bad())?;
                (v, v)
            }
        };
        if lo == 0 || hi < lo || step == 0 {
            return Err(bad());
        }
        Ok(AxisRange { lo, hi, step })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Axes {
    A { shifts: AxisRange, staff: AxisRange },
    B { days: AxisRange, params: ProblemBParams },
    Fuzz { seeds: u64, first_seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub axes: Axes,
    pub backends: Vec<Backend>,
    pub timeout: f64,
    pub output_dir: PathBuf,
    pub workers: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no backends selected")]
    NoBackends,
    #[error("timeout must be positive")]
    BadTimeout,
    #[error("fuzz seed count must be positive")]
    NoSeeds,
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad CSV row: {0}")]
    Row(String),
    #[error(transparent)]
    Config(#[from] crate::runner::ConfigError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.display().to_string(), source }
}

impl RunSpec {
    pub fn check(&self) -> Result<(), BenchError> {
        if self.backends.is_empty() {
            return Err(BenchError::NoBackends);
        }
        if !(self.timeout > 0.0) {
            return Err(BenchError::BadTimeout);
        }
        if let Axes::Fuzz { seeds: 0, .. } = self.axes {
            return Err(BenchError::NoSeeds);
        }
        Ok(())
    }

    pub fn problem(&self) -> Problem {
        match self.axes {
            Axes::A { .. } => Problem::A,
            Axes::B { .. } => Problem::B,
            Axes::Fuzz { .. } => Problem::Fuzz,
        }
    }

    /// Matrix cells in row-major order.
    pub fn cells(&self) -> Vec<CellSpec> {
        match &self.axes {
            Axes::A { shifts, staff } => shifts
                .values()
                .into_iter()
                .flat_map(|n| staff.values().into_iter().map(move |p| CellSpec::A { shifts: n, staff: p }))
                .collect(),
            Axes::B { days, .. } => days.values().into_iter().map(|d| CellSpec::B { days: d }).collect(),
            Axes::Fuzz { seeds, first_seed } => (*first_seed..first_seed + seeds).map(|s| CellSpec::Fuzz { seed: s }).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellSpec {
    A { shifts: u32, staff: u32 },
    B { days: u32 },
    Fuzz { seed: u64 },
}

/// Coordinates of one matrix cell as they appear in the CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub problem: Problem,
    pub shifts: Option<u32>,
    pub staff: Option<u32>,
    pub days: Option<u32>,
    pub seed: Option<u64>,
}

/// Builds the instance for a cell together with its coordinates.
pub fn build_cell(spec: CellSpec, axes: &Axes) -> (Cell, RosterInstance, Vec<GcInstance>) {
    let (problem, seed, inst, cons) = match spec {
        CellSpec::A { shifts, staff } => {
            let (i, c) = build_problem_a(ProblemASpec { num_shifts: shifts, num_staff: staff }).unwrap_or_default();
            (Problem::A, None, i, c)
        }
        CellSpec::B { days } => {
            let params = match axes {
                Axes::B { params, .. } => params.clone(),
                _ => ProblemBParams::default(),
            };
            let (i, c) = build_problem_b_with(ProblemBSpec { num_days: days }, &params).unwrap_or_default();
            (Problem::B, None, i, c)
        }
        CellSpec::Fuzz { seed } => {
            let f = fuzz_case(seed);
            (Problem::Fuzz, Some(seed), f.instance, f.constraints)
        }
    };
    let cell = Cell {
        problem,
        shifts: Some(inst.shifts.len() as u32),
        staff: Some(inst.personnel.len() as u32),
        days: Some(inst.horizon_days),
        seed,
    };
    (cell, inst, cons)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackendResult {
    pub backend: Backend,
    pub verdict: Verdict,
    pub wall_time: f64,
    pub validated: bool,
}

impl BackendResult {
    /// Finished with a definite verdict.
    pub fn finished(&self) -> bool {
        self.verdict.is_definite()
    }

    /// A feasible verdict whose schedule failed re-checking.
    pub fn is_corrupt(&self) -> bool {
        self.verdict == Verdict::Feasible && !self.validated
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub cell: Cell,
    pub results: Vec<BackendResult>,
}

impl RunRecord {
    pub fn result(&self, b: Backend) -> Option<&BackendResult> {
        self.results.iter().find(|r| r.backend == b)
    }

    /// log10(milp time / smt time) when both backends finished.
    pub fn log_quotient(&self) -> Option<f64> {
        let (s, m) = (self.result(Backend::Smt)?, self.result(Backend::Milp)?);
        (s.finished() && m.finished() && s.wall_time > 0.0 && m.wall_time > 0.0)
            .then(|| (m.wall_time / s.wall_time).log10())
    }

    /// Definite verdicts disagree.
    pub fn disagreement(&self) -> bool {
        let mut definite = self.results.iter().filter(|r| r.finished()).map(|r| r.verdict);
        match definite.next() {
            Some(first) => definite.any(|v| v != first),
            None => false,
        }
    }
}

/// True when the schedule fits the instance and passes every constraint.
pub fn validate_schedule(instance: &RosterInstance, constraints: &[GcInstance], schedule: &Schedule) -> bool {
    schedule.num_shifts() == instance.shifts.len()
        && schedule.reference_errors(instance).is_empty()
        && eval_all(constraints, instance, schedule).map(|r| r.satisfied()).unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CsvRow {
    problem: String,
    shifts: Option<u32>,
    staff: Option<u32>,
    days: Option<u32>,
    seed: Option<u64>,
    backend: String,
    verdict: String,
    wall_time_s: f64,
    validated: bool,
}

fn rows_of(r: &RunRecord) -> impl Iterator<Item = CsvRow> + '_ {
    r.results.iter().map(|b| CsvRow {
        problem: r.cell.problem.to_string(),
        shifts: r.cell.shifts,
        staff: r.cell.staff,
        days: r.cell.days,
        seed: r.cell.seed,
        backend: backend_name(b.backend).to_string(),
        verdict: b.verdict.to_string(),
        wall_time_s: b.wall_time,
        validated: b.validated,
    })
}

/// CSV text for the records, without the header.
fn csv_body(records: &[RunRecord]) -> Result<Vec<u8>, BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        for row in rows_of(r) {
            w.serialize(row)?;
        }
    }
    w.into_inner().map_err(|e| BenchError::Row(e.to_string()))
}

pub fn records_to_csv(records: &[RunRecord]) -> Result<String, BenchError> {
    let mut out = format!("{CSV_HEADER}\n").into_bytes();
    out.extend(csv_body(records)?);
    String::from_utf8(out).map_err(|e| BenchError::Row(e.to_string()))
}

/// Groups consecutive-or-not rows with equal coordinates into records, in
/// order of first appearance.
pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>, BenchError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if headers != CSV_HEADER {
        return Err(BenchError::Row(format!("unexpected header {headers:?}")));
    }
    let mut order: Vec<Cell> = Vec::new();
    let mut by_cell: BTreeMap<Cell, Vec<BackendResult>> = BTreeMap::new();
    for row in rdr.deserialize::<CsvRow>() {
        let row = row?;
        let cell = Cell {
            problem: row.problem.parse().map_err(BenchError::Row)?,
            shifts: row.shifts,
            staff: row.staff,
            days: row.days,
            seed: row.seed,
        };
        let result = BackendResult {
            backend: parse_backend(&row.backend).map_err(BenchError::Row)?,
            verdict: row.verdict.parse().map_err(BenchError::Row)?,
            wall_time: row.wall_time_s,
            validated: row.validated,
        };
        let entry = by_cell.entry(cell).or_default();
        if entry.is_empty() {
            order.push(cell);
        }
        entry.push(result);
    }
    Ok(order.into_iter().map(|c| RunRecord { cell: c, results: by_cell.remove(&c).unwrap_or_default() }).collect())
}

pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>, BenchError> {
    records_from_csv(&std::fs::read_to_string(path).map_err(io_err(path))?)
}

/// Appends records to a CSV file, writing the header first if the file is
/// new or empty. Each record goes out in a single write.
pub struct CsvAppender {
    file: std::fs::File,
    path: PathBuf,
}

impl CsvAppender {
    pub fn open(path: &Path) -> Result<Self, BenchError> {
        let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))?;
        let empty = file.metadata().map(|m| m.len() == 0).unwrap_or(true);
        if empty {
            writeln!(file, "{CSV_HEADER}").map_err(io_err(path))?;
        }
        Ok(CsvAppender { file, path: path.to_path_buf() })
    }

    pub fn append(&mut self, record: &RunRecord) -> Result<(), BenchError> {
        let body = csv_body(std::slice::from_ref(record))?;
        self.file.write_all(&body).and_then(|_| self.file.flush()).map_err(io_err(&self.path))
    }
}

/// Solver configurations for the external backends.
#[derive(Debug, Clone)]
pub struct Solvers {
    pub smt: SolverConfig,
    pub milp: SolverConfig,
    pub native_timeout: f64,
    /// Node limit for the native search; time is limited by the timeout.
    pub native_max_nodes: u64,
}

impl Solvers {
    /// Configs from the environment with scratch files under `workdir`.
    pub fn from_env(timeout: f64, workdir: &Path) -> Result<Self, BenchError> {
        Ok(Solvers {
            smt: SolverConfig::smt_from_env(timeout, workdir)?,
            milp: SolverConfig::milp_from_env(timeout, workdir)?,
            native_timeout: timeout,
            native_max_nodes: u64::MAX,
        })
    }
}

/// One backend on one instance, with emission time reported separately
/// from solver wall time.
pub fn solve_with(
    backend: Backend,
    instance: &RosterInstance,
    constraints: &[GcInstance],
    solvers: &Solvers,
) -> (SolveOutcome, f64) {
    let start = Instant::now();
    let encode_failure = |e: roster_core::encoding::EncodeError| {
        SolveOutcome::without_schedule(backend, Verdict::SolverError, 0.0).with_log(format!("encoding failed: {e}"))
    };
    match backend {
        Backend::Smt => match emit_smtlib(instance, constraints) {
            Ok(script) => {
                let emit = start.elapsed().as_secs_f64();
                (run_smt(&script, &solvers.smt), emit)
            }
            Err(e) => (encode_failure(e), start.elapsed().as_secs_f64()),
        },
        Backend::Milp => match emit_lp(instance, constraints) {
            Ok(model) => {
                let emit = start.elapsed().as_secs_f64();
                (run_milp(&model, &solvers.milp), emit)
            }
            Err(e) => (encode_failure(e), start.elapsed().as_secs_f64()),
        },
        Backend::Native => (run_native(instance, constraints, solvers.native_timeout, solvers.native_max_nodes), 0.0),
    }
}

fn run_cell(spec: &RunSpec, cell: CellSpec, solvers: &Solvers) -> (RunRecord, String) {
    let (coords, inst, cons) = build_cell(cell, &spec.axes);
    let mut log = String::new();
    let mut results = Vec::new();
    for &b in &spec.backends {
        let (out, emit) = solve_with(b, &inst, &cons, solvers);
        let validated = out.schedule().map(|s| validate_schedule(&inst, &cons, s)).unwrap_or(false);
        log.push_str(&format!(
            "== {} shifts={} staff={} days={} seed={} backend={} emit_s={emit:.6} verdict={} wall_s={:.6} validated={validated}\n{}",
            coords.problem,
            coords.shifts.unwrap_or(0),
            coords.staff.unwrap_or(0),
            coords.days.unwrap_or(0),
            coords.seed.map(|s| s.to_string()).unwrap_or_default(),
            backend_name(b),
            out.verdict(),
            out.wall_time,
            out.raw_log,
        ));
        results.push(BackendResult { backend: b, verdict: out.verdict(), wall_time: out.wall_time, validated });
    }
    (RunRecord { cell: coords, results }, log)
}

/// Runs every cell on every backend, appending to `results.csv` in the
/// output directory and solver logs to `runs.log`. Returns the records
/// sorted by coordinates.
pub fn run_matrix(spec: &RunSpec, solvers: &Solvers) -> Result<Vec<RunRecord>, BenchError> {
    spec.check()?;
    let dir = &spec.output_dir;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut csv = CsvAppender::open(&dir.join("results.csv"))?;
    let log_path = dir.join("runs.log");
    let mut log = OpenOptions::new().create(true).append(true).open(&log_path).map_err(io_err(&log_path))?;

    let queue = Mutex::new(spec.cells().into_iter());
    let (tx, rx) = mpsc::channel::<(RunRecord, String)>();
    let mut records = Vec::new();
    let mut failure = None;
    std::thread::scope(|scope| {
        for _ in 0..spec.workers.max(1) {
            let tx = tx.clone();
            let queue = &queue;
            scope.spawn(move || loop {
                let next = queue.lock().ok().and_then(|mut q| q.next());
                let Some(cell) = next else { break };
                if tx.send(run_cell(spec, cell, solvers)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (record, text) in rx {
            if failure.is_none() {
                if let Err(e) = csv.append(&record) {
                    failure = Some(e);
                }
                if let Err(e) = log.write_all(text.as_bytes()) {
                    failure = Some(io_err(&log_path)(e));
                }
            }
            records.push(record);
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    records.sort_by(|a, b| a.cell.cmp(&b.cell));
    Ok(records)
}
