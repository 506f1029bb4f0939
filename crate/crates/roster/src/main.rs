use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use roster::bench::{parse_backend, read_csv, run_matrix, validate_schedule, AxisRange, Axes, RunSpec, Solvers};
use roster::io::{
    constraints_to_json, instance_to_json, load_constraints, load_instance, parse_problem_b_params, parse_schedule,
    problem_b_records, read_file, schedule_to_json, ConstraintRecord, ProblemBParamsFile, PROBLEM_B_PARAMS_JSON,
};
use roster::svg::{render_heatmap, render_lineplot, render_ranking};
use roster_core::generators::{build_problem_a, build_problem_b_with, ProblemASpec, ProblemBSpec};
use roster_core::{eval_all, Backend, Verdict};

#[derive(Parser)]
#[command(name = "bench", about = "Nurse rostering with SMT, MILP and native backends")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    A,
    B,
    Fuzz,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureKind {
    Heatmap,
    Ranking,
    Line,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a benchmark matrix and append results to DIR/results.csv.
    Run {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Problem A shift counts, `LO..HI[:STEP]`.
        #[arg(long, default_value = "6..48:6")]
        shifts: AxisRange,
        /// Problem A staff counts, `LO..HI[:STEP]`.
        #[arg(long, default_value = "2..12:2")]
        staff: AxisRange,
        /// Problem B day counts, `LO..HI[:STEP]`.
        #[arg(long, default_value = "1..7")]
        days: AxisRange,
        /// Number of fuzz seeds.
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        /// Problem B parameter file; the shipped defaults otherwise.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value = "smt,milp,native", value_delimiter = ',', value_parser = parse_backend)]
        backends: Vec<Backend>,
        /// Seconds per solve.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Render an SVG figure from a results CSV.
    Figures {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum)]
        kind: FigureKind,
        /// Output path; defaults to the CSV path with `.<kind>.svg`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a Problem A instance and constraint file.
    GenA {
        #[arg(long)]
        shifts: u32,
        #[arg(long)]
        staff: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write a Problem B instance and constraint file.
    GenB {
        #[arg(long)]
        days: u32,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve an instance with one backend and print the schedule as JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long, value_parser = parse_backend)]
        backend: Backend,
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// Scratch directory for solver input files.
        #[arg(long)]
        workdir: Option<PathBuf>,
        /// Write the schedule here instead of stdout.
        #[arg(long)]
        schedule_out: Option<PathBuf>,
        /// Print the solver log to stderr.
        #[arg(long)]
        verbose: bool,
    },
    /// Check a schedule against an instance and its constraints.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
}

fn load_params(path: Option<&Path>) -> Result<ProblemBParamsFile> {
    let text = match path {
        Some(p) => read_file(p)?,
        None => PROBLEM_B_PARAMS_JSON.to_string(),
    };
    Ok(parse_problem_b_params(&text)?)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_pair(dir: &Path, instance: &str, constraints: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(&dir.join("instance.json"), instance)?;
    write(&dir.join("constraints.json"), constraints)?;
    println!("wrote {} and {}", dir.join("instance.json").display(), dir.join("constraints.json").display());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Run { problem, shifts, staff, days, seeds, first_seed, params, backends, timeout, out, workers } => {
            let axes = match problem {
                ProblemArg::A => Axes::A { shifts, staff },
                ProblemArg::B => Axes::B { days, params: load_params(params.as_deref())?.into_params() },
                ProblemArg::Fuzz => Axes::Fuzz { seeds, first_seed },
            };
            let spec = RunSpec { axes, backends, timeout, output_dir: out.clone(), workers };
            let solvers = Solvers::from_env(timeout, &out.join("work"))?;
            let records = run_matrix(&spec, &solvers)?;
            let mut bad = 0;
            for r in &records {
                let cols: Vec<String> = r
                    .results
                    .iter()
                    .map(|b| format!("{}={} {:.3}s", roster::bench::backend_name(b.backend), b.verdict, b.wall_time))
                    .collect();
                let mut flags = String::new();
                if r.results.iter().any(|b| b.is_corrupt()) {
                    flags.push_str(" CORRUPT");
                    bad += 1;
                }
                if r.disagreement() {
                    flags.push_str(" DISAGREE");
                    bad += 1;
                }
                println!(
                    "{} shifts={} staff={} days={}{} {}{flags}",
                    r.cell.problem,
                    r.cell.shifts.unwrap_or(0),
                    r.cell.staff.unwrap_or(0),
                    r.cell.days.unwrap_or(0),
                    r.cell.seed.map(|s| format!(" seed={s}")).unwrap_or_default(),
                    cols.join(" ")
                );
            }
            println!("{} cells written to {}", records.len(), out.join("results.csv").display());
            if bad > 0 {
                eprintln!("{bad} corrupt or disagreeing cells");
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Figures { csv, kind, out } => {
            let records = read_csv(&csv)?;
            let (svg, suffix) = match kind {
                FigureKind::Heatmap => (render_heatmap(&records)?, "heatmap"),
                FigureKind::Ranking => (render_ranking(&records)?, "ranking"),
                FigureKind::Line => (render_lineplot(&records), "line"),
            };
            let out = out.unwrap_or_else(|| csv.with_extension(format!("{suffix}.svg")));
            write(&out, &svg)?;
            println!("wrote {}", out.display());
        }
        Cmd::GenA { shifts, staff, out } => {
            let (i, c) = build_problem_a(ProblemASpec { num_shifts: shifts, num_staff: staff })?;
            let records: Vec<ConstraintRecord> = c.iter().map(ConstraintRecord::from_instance).collect();
            write_pair(&out, &instance_to_json(&i), &constraints_to_json(&records))?;
        }
        Cmd::GenB { days, params, out } => {
            let file = load_params(params.as_deref())?;
            let (i, c) = build_problem_b_with(ProblemBSpec { num_days: days }, &file.clone().into_params())?;
            write_pair(&out, &instance_to_json(&i), &constraints_to_json(&problem_b_records(&c, &file)))?;
        }
        Cmd::Solve { instance, constraints, backend, timeout, workdir, schedule_out, verbose } => {
            let inst = load_instance(&instance)?;
            let cons = load_constraints(&constraints, &inst)?;
            let workdir = workdir.unwrap_or_else(|| std::env::temp_dir().join("roster-work"));
            let solvers = Solvers::from_env(timeout, &workdir)?;
            let (outcome, emit) = roster::bench::solve_with(backend, &inst, &cons, &solvers);
            if verbose {
                eprint!("{}", outcome.raw_log);
            }
            eprintln!("verdict: {}  solve: {:.3} s  encode: {:.3} s", outcome.verdict(), outcome.wall_time, emit);
            if let Some(s) = outcome.schedule() {
                if !validate_schedule(&inst, &cons, s) {
                    bail!("backend returned a schedule that violates the constraints");
                }
                let json = schedule_to_json(s);
                match schedule_out {
                    Some(p) => write(&p, &json)?,
                    None => print!("{json}"),
                }
            }
            if outcome.verdict() == Verdict::SolverError {
                if !verbose {
                    eprint!("{}", outcome.raw_log);
                }
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Validate { instance, constraints, schedule } => {
            let inst = load_instance(&instance)?;
            let cons = load_constraints(&constraints, &inst)?;
            let sched = parse_schedule(&read_file(&schedule)?, &inst)?;
            let refs = sched.reference_errors(&inst);
            for e in &refs {
                println!("error: {e}");
            }
            let report = eval_all(&cons, &inst, &sched)?;
            for e in &report.entries {
                let kind = e.kind.map(|k| k.to_string()).unwrap_or_else(|| "one-per-shift".to_string());
                println!(
                    "{} {kind} {} measure={} bounds=[{}, {}]",
                    if e.eval.satisfied { "ok      " } else { "VIOLATED" },
                    e.label,
                    e.eval.measure,
                    e.eval.bounds.0,
                    e.eval.bounds.1
                );
                for w in e.eval.witnesses.iter().take(5) {
                    println!("         {w:?}");
                }
            }
            if !refs.is_empty() || !report.satisfied() {
                return Ok(ExitCode::FAILURE);
            }
            println!("schedule satisfies all {} constraints", cons.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
