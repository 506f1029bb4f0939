//! Result of one solve, whatever backend produced it.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::model::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Unknown,
    Timeout,
    SolverError,
}

impl Verdict {
    /// Feasible or infeasible; everything else is inconclusive.
    pub fn is_definite(self) -> bool {
        matches!(self, Verdict::Feasible | Verdict::Infeasible)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::Unknown => "unknown",
            Verdict::Timeout => "timeout",
            Verdict::SolverError => "solver_error",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "feasible" => Verdict::Feasible,
            "infeasible" => Verdict::Infeasible,
            "unknown" => Verdict::Unknown,
            "timeout" => Verdict::Timeout,
            "solver_error" => Verdict::SolverError,
            other => return Err(alloc::format!("unknown verdict {other:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Smt,
    Milp,
    Native,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Smt, Backend::Milp, Backend::Native];

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Smt => "smt",
            Backend::Milp => "milp",
            Backend::Native => "native",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smt" => Ok(Backend::Smt),
            "milp" => Ok(Backend::Milp),
            "native" => Ok(Backend::Native),
            other => Err(alloc::format!("unknown backend {other:?}")),
        }
    }
}

/// Invariant: `schedule.is_some()` exactly when the verdict is feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    verdict: Verdict,
    schedule: Option<Schedule>,
    /// Seconds.
    pub wall_time: f64,
    pub backend: Backend,
    pub raw_log: String,
}

impl SolveOutcome {
    pub fn feasible(backend: Backend, schedule: Schedule, wall_time: f64) -> Self {
        SolveOutcome { verdict: Verdict::Feasible, schedule: Some(schedule), wall_time, backend, raw_log: String::new() }
    }

    /// Any verdict but feasible.
    ///
    /// # Panics
    /// When called with [`Verdict::Feasible`].
    pub fn without_schedule(backend: Backend, verdict: Verdict, wall_time: f64) -> Self {
        assert!(verdict != Verdict::Feasible, "a feasible outcome needs a schedule");
        SolveOutcome { verdict, schedule: None, wall_time, backend, raw_log: String::new() }
    }

    pub fn with_log(mut self, log: impl Into<String>) -> Self {
        self.raw_log = log.into();
        self
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        self.schedule.as_ref()
    }

    pub fn into_schedule(self) -> Option<Schedule> {
        self.schedule
    }
}
