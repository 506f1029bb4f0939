//! Native feasibility deciders for small instances.
//!
//! [`brute_force`] enumerates every complete assignment. [`dfs_feasible`]
//! walks shifts in chronological order and cuts a branch only when one of
//! the rules in [`prune_reason`] proves that no completion can succeed.
//! Both stop with [`Verdict::Unknown`] once their [`SearchBudget`] runs out.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::constraints::{runs, Evaluator, Gc, GcInstance};
use crate::model::{PersonId, RosterInstance, Schedule};
use crate::outcome::{Backend, SolveOutcome, Verdict};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_seconds: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 10_000_000, max_seconds: 60.0 }
    }
}

/// Elapsed-time source; the core crate has no clock of its own.
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

/// A clock that never advances, leaving only the node budget in force.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

const CLOCK_STRIDE: u64 = 1024;

struct Meter<'c> {
    nodes: u64,
    budget: SearchBudget,
    clock: &'c dyn Clock,
}

impl Meter<'_> {
    /// Counts one node; false once the budget is spent.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return false;
        }
        !(self.nodes % CLOCK_STRIDE == 0 && self.clock.elapsed_secs() > self.budget.max_seconds)
    }
}

fn setup_error(backend: Backend, msg: &str, clock: &dyn Clock) -> SolveOutcome {
    SolveOutcome::without_schedule(backend, Verdict::SolverError, clock.elapsed_secs()).with_log(msg)
}

fn evaluator<'a>(
    instance: &'a RosterInstance,
    constraints: &'a [GcInstance],
) -> Result<Evaluator<'a>, alloc::string::String> {
    if let Some(d) = instance.validate().first() {
        return Err(format!("invalid instance: {d}"));
    }
    Evaluator::new(instance, constraints).map_err(|e| e.to_string())
}

pub fn brute_force(instance: &RosterInstance, constraints: &[GcInstance], budget: SearchBudget) -> SolveOutcome {
    brute_force_with_clock(instance, constraints, budget, &NoClock)
}

/// Tries every assignment in odometer order: the last shift varies fastest,
/// persons ascend and "unassigned" comes last.
pub fn brute_force_with_clock(
    instance: &RosterInstance,
    constraints: &[GcInstance],
    budget: SearchBudget,
    clock: &dyn Clock,
) -> SolveOutcome {
    let eval = match evaluator(instance, constraints) {
        Ok(e) => e,
        Err(msg) => return setup_error(Backend::Native, &msg, clock),
    };
    let n = instance.shifts.len();
    let np = instance.personnel.len();
    // digit k in 0..np is person k+1, np is unassigned
    let mut digits = vec![0usize; n];
    let mut a: Vec<Option<PersonId>> = vec![if np == 0 { None } else { Some(PersonId(1)) }; n];
    let mut meter = Meter { nodes: 0, budget, clock };
    loop {
        if !meter.tick() {
            return SolveOutcome::without_schedule(Backend::Native, Verdict::Unknown, clock.elapsed_secs())
                .with_log(format!("budget exhausted after {} assignments", meter.nodes - 1));
        }
        if eval.is_satisfied(&a) {
            return SolveOutcome::feasible(Backend::Native, Schedule::from_vec(a), clock.elapsed_secs())
                .with_log(format!("{} assignments tried", meter.nodes));
        }
        let mut k = n;
        loop {
            if k == 0 {
                return SolveOutcome::without_schedule(Backend::Native, Verdict::Infeasible, clock.elapsed_secs())
                    .with_log(format!("{} assignments tried", meter.nodes));
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] <= np {
                a[k] = (digits[k] < np).then(|| PersonId(digits[k] as u32 + 1));
                break;
            }
            digits[k] = 0;
            a[k] = if np == 0 { None } else { Some(PersonId(1)) };
        }
    }
}

/// Rule that cut a partial assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneRule {
    /// A GC1/GC2/GC3 count over decided shifts already exceeds its upper bound.
    CountAbove { constraint: usize },
    /// Decided count plus every undecided opportunity stays below the lower bound.
    CountUnreachable { constraint: usize },
    /// Every value for some undecided shift would push a count that sits at
    /// its upper bound over it.
    DomainWipeout { shift: usize },
    /// Decided assignments already form a run of worked days longer than
    /// a GC6 upper bound.
    RunTooLong { constraint: usize },
}

/// Precomputed tables for the prune rules.
struct Pruner<'a> {
    instance: &'a RosterInstance,
    counters: Vec<Counter>,
    runs: Vec<RunLimit>,
    np: usize,
}

enum CounterKind {
    Uncovered,
    Unqualified { qualified: Vec<Vec<bool>> },
    /// `(a, b, disallowed[p])` restricted to staff
    Overlap { pairs: Vec<(usize, usize, Vec<bool>)> },
}

struct Counter {
    k: usize,
    staff: Vec<bool>,
    shifts: Vec<usize>,
    in_set: Vec<bool>,
    lo: u32,
    hi: u32,
    kind: CounterKind,
}

struct RunLimit {
    k: usize,
    staff: Vec<bool>,
    in_set: Vec<bool>,
    hi: u32,
}

impl<'a> Pruner<'a> {
    fn new(instance: &'a RosterInstance, constraints: &[GcInstance]) -> Self {
        let np = instance.personnel.len();
        let ns = instance.shifts.len();
        let pmask = |set: &crate::constraints::PersonSet| {
            let mut m = vec![false; np];
            for p in set {
                m[p.0 as usize - 1] = true;
            }
            m
        };
        let smask = |set: &crate::constraints::ShiftSet| {
            let mut m = vec![false; ns];
            for s in set {
                m[s.0 as usize - 1] = true;
            }
            m
        };
        let sidx = |set: &crate::constraints::ShiftSet| set.iter().map(|s| s.0 as usize - 1).collect::<Vec<_>>();
        let mut counters = Vec::new();
        let mut run_limits = Vec::new();
        let overlaps = instance.overlap_combinations();
        for (k, c) in constraints.iter().enumerate() {
            match &c.gc {
                Gc::Uncovered { staff, shifts, bounds } => counters.push(Counter {
                    k,
                    staff: pmask(staff),
                    shifts: sidx(shifts),
                    in_set: smask(shifts),
                    lo: bounds.lo,
                    hi: bounds.hi,
                    kind: CounterKind::Uncovered,
                }),
                Gc::Unqualified { staff, shifts, bounds } => counters.push(Counter {
                    k,
                    staff: pmask(staff),
                    shifts: sidx(shifts),
                    in_set: smask(shifts),
                    lo: bounds.lo,
                    hi: bounds.hi,
                    kind: CounterKind::Unqualified {
                        qualified: instance
                            .shifts
                            .iter()
                            .map(|s| instance.personnel.iter().map(|p| instance.is_qualified(p, s)).collect())
                            .collect(),
                    },
                }),
                Gc::Overlap { staff, bounds } => {
                    let staff = pmask(staff);
                    let pairs = overlaps
                        .iter()
                        .map(|o| {
                            let dis = (0..np).map(|p| staff[p] && !o.allows(PersonId(p as u32 + 1))).collect();
                            (o.shifts.0 .0 as usize - 1, o.shifts.1 .0 as usize - 1, dis)
                        })
                        .filter(|(_, _, dis): &(usize, usize, Vec<bool>)| dis.iter().any(|&d| d))
                        .collect();
                    counters.push(Counter {
                        k,
                        staff,
                        shifts: Vec::new(),
                        in_set: Vec::new(),
                        lo: bounds.lo,
                        hi: bounds.hi,
                        kind: CounterKind::Overlap { pairs },
                    });
                }
                Gc::ConsecutiveDays { staff, shifts, bounds } => {
                    run_limits.push(RunLimit { k, staff: pmask(staff), in_set: smask(shifts), hi: bounds.hi })
                }
                _ => {}
            }
        }
        Pruner { instance, counters, runs: run_limits, np }
    }

    /// `(decided count, undecided opportunities)`.
    fn count(&self, c: &Counter, a: &[Option<Option<PersonId>>]) -> (u64, u64) {
        let in_staff = |p: Option<PersonId>| p.is_some_and(|p| c.staff[p.0 as usize - 1]);
        let (mut fixed, mut open) = (0, 0);
        match &c.kind {
            CounterKind::Uncovered => {
                for &s in &c.shifts {
                    match a[s] {
                        Some(p) if !in_staff(p) => fixed += 1,
                        Some(_) => {}
                        None => open += 1,
                    }
                }
            }
            CounterKind::Unqualified { qualified } => {
                for &s in &c.shifts {
                    match a[s] {
                        Some(Some(p)) if c.staff[p.0 as usize - 1] && !qualified[s][p.0 as usize - 1] => fixed += 1,
                        Some(_) => {}
                        None => {
                            if (0..self.np).any(|p| c.staff[p] && !qualified[s][p]) {
                                open += 1;
                            }
                        }
                    }
                }
            }
            CounterKind::Overlap { pairs } => {
                for (sa, sb, dis) in pairs {
                    let bad = |p: PersonId| dis[p.0 as usize - 1];
                    match (a[*sa], a[*sb]) {
                        (Some(Some(p)), Some(Some(q))) if p == q && bad(p) => fixed += 1,
                        (Some(_), Some(_)) => {}
                        (Some(Some(p)), None) | (None, Some(Some(p))) if bad(p) => open += 1,
                        (Some(_), None) | (None, Some(_)) => {}
                        (None, None) => open += 1,
                    }
                }
            }
        }
        (fixed, open)
    }

    /// Whether setting undecided shift `s` to `v` raises the decided count.
    fn bumps(&self, c: &Counter, a: &[Option<Option<PersonId>>], s: usize, v: Option<PersonId>) -> bool {
        match &c.kind {
            CounterKind::Uncovered => c.in_set[s] && !v.is_some_and(|p| c.staff[p.0 as usize - 1]),
            CounterKind::Unqualified { qualified } => {
                c.in_set[s] && v.is_some_and(|p| c.staff[p.0 as usize - 1] && !qualified[s][p.0 as usize - 1])
            }
            CounterKind::Overlap { pairs } => {
                let Some(p) = v else { return false };
                pairs.iter().any(|(sa, sb, dis)| {
                    dis[p.0 as usize - 1]
                        && ((*sa == s && a[*sb] == Some(Some(p))) || (*sb == s && a[*sa] == Some(Some(p))))
                })
            }
        }
    }

    fn check(&self, a: &[Option<Option<PersonId>>]) -> Option<PruneRule> {
        let mut saturated = Vec::new();
        for c in &self.counters {
            let (fixed, open) = self.count(c, a);
            if fixed > u64::from(c.hi) {
                return Some(PruneRule::CountAbove { constraint: c.k });
            }
            if fixed + open < u64::from(c.lo) {
                return Some(PruneRule::CountUnreachable { constraint: c.k });
            }
            if fixed == u64::from(c.hi) {
                saturated.push(c);
            }
        }
        if !saturated.is_empty() {
            for s in (0..a.len()).filter(|&s| a[s].is_none()) {
                let values = (1..=self.np as u32).map(|p| Some(PersonId(p))).chain([None]);
                let mut all_blocked = true;
                for v in values {
                    if !saturated.iter().any(|c| self.bumps(c, a, s, v)) {
                        all_blocked = false;
                        break;
                    }
                }
                if all_blocked {
                    return Some(PruneRule::DomainWipeout { shift: s });
                }
            }
        }
        let t = self.instance.horizon_days as usize;
        for r in &self.runs {
            let mut days = vec![vec![false; t + 2]; self.np];
            for (s, v) in a.iter().enumerate() {
                if let Some(Some(p)) = v {
                    let pi = p.0 as usize - 1;
                    if r.in_set[s] && r.staff[pi] {
                        days[pi][self.instance.shifts[s].start_day as usize] = true;
                    }
                }
            }
            for row in days.iter().filter(|row| row.iter().any(|&d| d)) {
                if runs(row, t).iter().any(|&(b, e)| (e - b + 1) as u64 > u64::from(r.hi)) {
                    return Some(PruneRule::RunTooLong { constraint: r.k });
                }
            }
        }
        None
    }
}

/// Applies the sound prune rules to a partial assignment indexed by shift
/// position: `None` is undecided, `Some(None)` unassigned. `None` means the
/// prefix survives; a `Some` rule guarantees no completion satisfies every
/// constraint.
pub fn prune_reason(
    instance: &RosterInstance,
    constraints: &[GcInstance],
    partial: &[Option<Option<PersonId>>],
) -> Option<PruneRule> {
    Pruner::new(instance, constraints).check(partial)
}

pub fn dfs_feasible(instance: &RosterInstance, constraints: &[GcInstance], budget: SearchBudget) -> SolveOutcome {
    dfs_feasible_with_clock(instance, constraints, budget, &NoClock)
}

enum Step {
    Found,
    Exhausted,
    Stopped,
}

struct Dfs<'a, 'c> {
    eval: Evaluator<'a>,
    pruner: Pruner<'a>,
    order: Vec<usize>,
    partial: Vec<Option<Option<PersonId>>>,
    meter: Meter<'c>,
    pruned: u64,
}

impl Dfs<'_, '_> {
    fn go(&mut self, depth: usize) -> Step {
        if depth == self.order.len() {
            let full: Vec<Option<PersonId>> = self.partial.iter().map(|v| v.flatten()).collect();
            return if self.eval.is_satisfied(&full) { Step::Found } else { Step::Exhausted };
        }
        let s = self.order[depth];
        let np = self.pruner.np as u32;
        for v in (1..=np).map(|p| Some(PersonId(p))).chain([None]) {
            if !self.meter.tick() {
                return Step::Stopped;
            }
            self.partial[s] = Some(v);
            if self.pruner.check(&self.partial).is_some() {
                self.pruned += 1;
                continue;
            }
            match self.go(depth + 1) {
                Step::Exhausted => {}
                other => return other,
            }
        }
        self.partial[s] = None;
        Step::Exhausted
    }
}

/// Depth-first search over shifts ordered by absolute start time (ties by
/// id), persons ascending and "unassigned" last.
pub fn dfs_feasible_with_clock(
    instance: &RosterInstance,
    constraints: &[GcInstance],
    budget: SearchBudget,
    clock: &dyn Clock,
) -> SolveOutcome {
    let eval = match evaluator(instance, constraints) {
        Ok(e) => e,
        Err(msg) => return setup_error(Backend::Native, &msg, clock),
    };
    let mut order: Vec<usize> = (0..instance.shifts.len()).collect();
    order.sort_by_key(|&s| (instance.shifts[s].absolute_interval().0, s));
    let pruner = Pruner::new(instance, constraints);
    let partial = vec![None; instance.shifts.len()];
    let mut dfs = Dfs { eval, pruner, order, partial, meter: Meter { nodes: 0, budget, clock }, pruned: 0 };
    let root_cut = dfs.pruner.check(&dfs.partial);
    let step = if root_cut.is_some() { Step::Exhausted } else { dfs.go(0) };
    let log = format!("{} nodes, {} pruned{}", dfs.meter.nodes, dfs.pruned, if root_cut.is_some() { ", root cut" } else { "" });
    let wall = clock.elapsed_secs();
    match step {
        Step::Found => {
            let schedule = Schedule::from_vec(dfs.partial.iter().map(|v| v.flatten()).collect());
            SolveOutcome::feasible(Backend::Native, schedule, wall).with_log(log)
        }
        Step::Exhausted => SolveOutcome::without_schedule(Backend::Native, Verdict::Infeasible, wall).with_log(log),
        Step::Stopped => SolveOutcome::without_schedule(Backend::Native, Verdict::Unknown, wall).with_log(log),
    }
}
