//! Runs external SMT and MILP solvers as subprocesses, and the native
//! search under a wall clock.
//!
//! Command templates are whitespace-separated argument lists with the
//! placeholders `{file}`, `{timeout}` (whole seconds, at least 1) and
//! `{solution}` (MILP only). The process is killed once the configured
//! timeout passes, so the template timeout is only a courtesy to the solver.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use roster_core::exact::{dfs_feasible_with_clock, Clock, SearchBudget};
use roster_core::lp::{parse_solution, LpModel};
use roster_core::smt::{parse_model, parse_status, SmtScript};
use roster_core::{Backend, GcInstance, RosterInstance, SolveOutcome, Verdict};
use sha2::{Digest, Sha256};
use wait_timeout::ChildExt;

pub const SMT_ENV: &str = "SMT_SOLVER_CMD";
pub const MILP_ENV: &str = "MILP_SOLVER_CMD";
pub const DEFAULT_SMT_TEMPLATE: &str = "z3 -T:{timeout} {file}";
pub const DEFAULT_MILP_TEMPLATE: &str = "cbc {file} sec {timeout} solve solu {solution}";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("solver command template is empty")]
    EmptyCommand,
    #[error("timeout must be positive, got {0}")]
    NonPositiveTimeout(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub command: Vec<String>,
    pub timeout: Duration,
    pub workdir: PathBuf,
}

impl SolverConfig {
    pub fn new(template: &str, timeout_secs: f64, workdir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let command: Vec<String> = template.split_whitespace().map(str::to_string).collect();
        if command.is_empty() {
            return Err(ConfigError::EmptyCommand);
        }
        if !(timeout_secs > 0.0 && timeout_secs.is_finite()) {
            return Err(ConfigError::NonPositiveTimeout(timeout_secs));
        }
        Ok(SolverConfig { command, timeout: Duration::from_secs_f64(timeout_secs), workdir: workdir.into() })
    }

    /// SMT config from `SMT_SOLVER_CMD`, or the z3 default.
    pub fn smt_from_env(timeout_secs: f64, workdir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let t = std::env::var(SMT_ENV).unwrap_or_else(|_| DEFAULT_SMT_TEMPLATE.to_string());
        Self::new(&t, timeout_secs, workdir)
    }

    /// MILP config from `MILP_SOLVER_CMD`, or the cbc default.
    pub fn milp_from_env(timeout_secs: f64, workdir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let t = std::env::var(MILP_ENV).unwrap_or_else(|_| DEFAULT_MILP_TEMPLATE.to_string());
        Self::new(&t, timeout_secs, workdir)
    }

    /// Whether the executable can be found.
    pub fn is_available(&self) -> bool {
        find_executable(&self.command[0]).is_some()
    }

    fn argv(&self, file: &Path, solution: Option<&Path>) -> Vec<String> {
        let secs = self.timeout.as_secs_f64().ceil().max(1.0) as u64;
        let sol = solution.map(|p| p.display().to_string()).unwrap_or_default();
        self.command
            .iter()
            .map(|a| {
                a.replace("{file}", &file.display().to_string())
                    .replace("{timeout}", &secs.to_string())
                    .replace("{solution}", &sol)
            })
            .collect()
    }
}

pub fn find_executable(program: &str) -> Option<PathBuf> {
    let p = Path::new(program);
    if p.components().count() > 1 {
        return p.is_file().then(|| p.to_path_buf());
    }
    std::env::split_paths(&std::env::var_os("PATH")?).map(|d| d.join(program)).find(|c| c.is_file())
}

/// Writes `text` under its content hash and returns the path. An existing
/// file with that name is reused.
pub fn write_hashed(workdir: &Path, text: &str, ext: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(workdir)?;
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    let path = workdir.join(format!("{}.{ext}", &digest[..16]));
    if !path.is_file() {
        let mut tmp = tempfile::NamedTempFile::new_in(workdir)?;
        std::io::Write::write_all(&mut tmp, text.as_bytes())?;
        tmp.persist(&path).map_err(|e| e.error)?;
    }
    Ok(path)
}

struct RawRun {
    stdout: String,
    stderr: String,
    status: Option<ExitStatus>,
    timed_out: bool,
    wall: f64,
}

fn drain(mut r: impl Read + Send + 'static) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    })
}

fn execute(argv: &[String], timeout: Duration) -> std::io::Result<RawRun> {
    let start = Instant::now();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;
    let out = child.stdout.take().map(drain);
    let err = child.stderr.take().map(drain);
    let (status, timed_out) = match child.wait_timeout(timeout)? {
        Some(s) => (Some(s), false),
        None => {
            let _ = child.kill();
            let _ = child.wait();
            (None, true)
        }
    };
    let wall = start.elapsed().as_secs_f64();
    let join = |h: Option<thread::JoinHandle<String>>| h.and_then(|h| h.join().ok()).unwrap_or_default();
    Ok(RawRun { stdout: join(out), stderr: join(err), status, timed_out, wall })
}

fn log_of(argv: &[String], run: &RawRun, extra: &str) -> String {
    let status = match (run.timed_out, run.status) {
        (true, _) => "killed at timeout".to_string(),
        (false, Some(s)) => s.to_string(),
        (false, None) => "unknown".to_string(),
    };
    let mut log = format!("$ {}\n[{status}, {:.3} s]\n", argv.join(" "), run.wall);
    for (name, body) in [("stdout", run.stdout.as_str()), ("stderr", run.stderr.as_str()), ("solution", extra)] {
        if !body.is_empty() {
            log.push_str(&format!("--- {name}\n{body}"));
            if !body.ends_with('\n') {
                log.push('\n');
            }
        }
    }
    log
}

fn io_failure(backend: Backend, what: &str, e: std::io::Error) -> SolveOutcome {
    SolveOutcome::without_schedule(backend, Verdict::SolverError, 0.0).with_log(format!("{what}: {e}"))
}

/// Writes the script, runs the SMT solver and reads back verdict and model.
pub fn run_smt(script: &SmtScript, config: &SolverConfig) -> SolveOutcome {
    let file = match write_hashed(&config.workdir, &script.text, "smt2") {
        Ok(f) => f,
        Err(e) => return io_failure(Backend::Smt, "cannot write script", e),
    };
    let argv = config.argv(&file, None);
    let run = match execute(&argv, config.timeout) {
        Ok(r) => r,
        Err(e) => return io_failure(Backend::Smt, &format!("cannot run {}", argv[0]), e),
    };
    let log = log_of(&argv, &run, "");
    if run.timed_out {
        return SolveOutcome::without_schedule(Backend::Smt, Verdict::Timeout, run.wall).with_log(log);
    }
    match parse_status(&run.stdout) {
        Some(Verdict::Feasible) => {
            let model = run.stdout.trim_start().strip_prefix("sat").unwrap_or("");
            match parse_model(model, &script.var_index) {
                Ok(s) => SolveOutcome::feasible(Backend::Smt, s, run.wall).with_log(log),
                Err(e) => SolveOutcome::without_schedule(Backend::Smt, Verdict::SolverError, run.wall)
                    .with_log(format!("{log}model rejected: {e}\n")),
            }
        }
        Some(v) => SolveOutcome::without_schedule(Backend::Smt, v, run.wall).with_log(log),
        None => SolveOutcome::without_schedule(Backend::Smt, Verdict::SolverError, run.wall).with_log(log),
    }
}

/// Verdict implied by the first line of a MILP solution file; `None` when
/// the line is not a status line the runner knows.
pub fn milp_status(first_line: &str) -> Option<Verdict> {
    let l = first_line.trim().to_ascii_lowercase();
    if l.starts_with("optimal") {
        Some(Verdict::Feasible)
    } else if l.starts_with("infeasible") || l.starts_with("integer infeasible") {
        Some(Verdict::Infeasible)
    } else if l.starts_with("stopped") {
        if l.contains("no integer solution") || l.contains("no solution") {
            Some(Verdict::Timeout)
        } else {
            Some(Verdict::Feasible)
        }
    } else if l.starts_with("unbounded") {
        Some(Verdict::SolverError)
    } else {
        None
    }
}

/// Fallback when no solution file was written: CBC's result banner.
fn milp_stdout_status(stdout: &str) -> Option<Verdict> {
    let line = stdout.lines().find_map(|l| l.trim().strip_prefix("Result - "))?;
    if line.contains("infeasible") {
        Some(Verdict::Infeasible)
    } else if line.starts_with("Stopped on time") {
        Some(Verdict::Timeout)
    } else {
        None
    }
}

/// Writes the model, runs the MILP solver and reads the solution file.
/// A file of bare `name value` lines without a status line counts as a
/// feasible solution.
pub fn run_milp(model: &LpModel, config: &SolverConfig) -> SolveOutcome {
    let file = match write_hashed(&config.workdir, &model.text, "lp") {
        Ok(f) => f,
        Err(e) => return io_failure(Backend::Milp, "cannot write model", e),
    };
    let solution = match tempfile::Builder::new().suffix(".sol").tempfile_in(&config.workdir) {
        Ok(f) => f.into_temp_path(),
        Err(e) => return io_failure(Backend::Milp, "cannot create solution file", e),
    };
    let argv = config.argv(&file, Some(&solution));
    let run = match execute(&argv, config.timeout) {
        Ok(r) => r,
        Err(e) => return io_failure(Backend::Milp, &format!("cannot run {}", argv[0]), e),
    };
    let content = std::fs::read_to_string(&solution).unwrap_or_default();
    let log = log_of(&argv, &run, &content);
    if run.timed_out {
        return SolveOutcome::without_schedule(Backend::Milp, Verdict::Timeout, run.wall).with_log(log);
    }
    let first = content.lines().map(str::trim).find(|l| !l.is_empty());
    let verdict = match first {
        Some(l) => milp_status(l).or_else(|| (l.split_whitespace().count() >= 2).then_some(Verdict::Feasible)),
        None => milp_stdout_status(&run.stdout),
    };
    match verdict {
        Some(Verdict::Feasible) => match parse_solution(&content, &model.var_index) {
            Ok(s) => SolveOutcome::feasible(Backend::Milp, s, run.wall).with_log(log),
            Err(e) => SolveOutcome::without_schedule(Backend::Milp, Verdict::SolverError, run.wall)
                .with_log(format!("{log}solution rejected: {e}\n")),
        },
        Some(v) => SolveOutcome::without_schedule(Backend::Milp, v, run.wall).with_log(log),
        None => SolveOutcome::without_schedule(Backend::Milp, Verdict::SolverError, run.wall).with_log(log),
    }
}

struct WallClock(Instant);

impl Clock for WallClock {
    fn elapsed_secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Native search under a wall-clock limit. Running out of time reports
/// `timeout`; running out of nodes first reports `unknown`.
pub fn run_native(instance: &RosterInstance, constraints: &[GcInstance], timeout_secs: f64, max_nodes: u64) -> SolveOutcome {
    let clock = WallClock(Instant::now());
    let budget = SearchBudget { max_nodes, max_seconds: timeout_secs };
    let mut out = dfs_feasible_with_clock(instance, constraints, budget, &clock);
    if out.verdict() == Verdict::Unknown && out.wall_time >= timeout_secs {
        out = SolveOutcome::without_schedule(Backend::Native, Verdict::Timeout, out.wall_time).with_log(out.raw_log);
    }
    out
}
