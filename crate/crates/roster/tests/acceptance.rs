//! Acceptance run. Prints one PASS, FAIL or SKIP line per criterion and
//! exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use roster::bench::{validate_schedule, BackendResult, Cell, Problem, RunRecord};
use roster::fuzz::fuzz_case;
use roster::runner::{run_milp, run_native, run_smt, SolverConfig};
use roster::svg::{render_heatmap, render_lineplot, render_ranking, NEUTRAL, POSITIVE_EXTREME};
use roster_core::constraints::{PersonSet, ShiftSet};
use roster_core::exact::{brute_force, dfs_feasible, SearchBudget};
use roster_core::generators::{build_problem_a, build_problem_b, canonical_dump, ProblemASpec, ProblemBSpec};
use roster_core::lp::emit_lp;
use roster_core::model::quals;
use roster_core::smt::{emit_smtlib, evaluate_script, SmtScript};
use roster_core::{
    eval_all, eval_gc, Backend, Bounds, Fixed, Gc, GcInstance, GcKind, OverlapAllowance, Person, PersonId,
    RosterInstance, Schedule, Shift, ShiftId, Verdict,
};

const SMT_GOLDEN: &str = include_str!("../../core/tests/golden/problem_a_6x4_c1-4.smt2");
const LP_GOLDEN: &str = include_str!("../../core/tests/golden/problem_a_6x4_c1-4.lp");
const TABLES: &str = include_str!("../../core/tests/fixtures/generator_tables.txt");

enum Status {
    Pass,
    Fail,
    Skip,
}

struct Report {
    status: Status,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Report {
    Report { status: Status::Pass, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Report {
    Report { status: Status::Fail, detail: detail.into() }
}

fn judge(ok: bool, detail: String) -> Report {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

struct Externals {
    smt: Option<SolverConfig>,
    milp: Option<SolverConfig>,
}

fn externals(timeout: f64, workdir: &Path) -> Externals {
    let smt = SolverConfig::smt_from_env(timeout, workdir).ok().filter(|c| c.is_available());
    let milp = SolverConfig::milp_from_env(timeout, workdir).ok().filter(|c| c.is_available());
    Externals { smt, milp }
}

/// Feasible schedules seen anywhere in the run, with whether they passed.
#[derive(Default)]
struct Seen {
    total: usize,
    bad: Vec<String>,
}

impl Seen {
    fn check(&mut self, what: &str, inst: &RosterInstance, cons: &[GcInstance], s: &Schedule) {
        self.total += 1;
        if !validate_schedule(inst, cons, s) {
            self.bad.push(what.to_string());
        }
    }
}

// ---------------------------------------------------------------- 1 and 2

fn differential(ext: &Externals, seen: &mut Seen) -> Report {
    let budget = SearchBudget { max_nodes: 5_000_000, max_seconds: 60.0 };
    let mut compared = 0;
    let mut mismatches = Vec::new();
    let mut native_inconclusive = 0;
    let mut external_cells = 0;
    let started = Instant::now();
    for seed in 0..200u64 {
        let f = fuzz_case(seed);
        let (inst, cons) = (&f.instance, &f.constraints);
        let mut outs = vec![("brute", brute_force(inst, cons, budget)), ("dfs", dfs_feasible(inst, cons, budget))];
        if let Some(c) = &ext.smt {
            outs.push(("smt", run_smt(&emit_smtlib(inst, cons).unwrap(), c)));
        }
        if let Some(c) = &ext.milp {
            outs.push(("milp", run_milp(&emit_lp(inst, cons).unwrap(), c)));
        }
        if outs.len() > 2 {
            external_cells += 1;
        }
        for (name, o) in &outs {
            if let Some(s) = o.schedule() {
                seen.check(&format!("seed {seed} {name}"), inst, cons, s);
            }
        }
        if !outs[0].1.verdict().is_definite() || !outs[1].1.verdict().is_definite() {
            native_inconclusive += 1;
        }
        let definite: Vec<(&str, Verdict)> =
            outs.iter().filter(|(_, o)| o.verdict().is_definite()).map(|(n, o)| (*n, o.verdict())).collect();
        if definite.len() >= 2 {
            compared += 1;
            if definite.iter().any(|(_, v)| *v != definite[0].1) {
                mismatches.push(format!("seed {seed}: {definite:?}"));
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let detail = format!(
        "200 fuzz seeds, {compared} co-terminating cells, {} disagreements, {native_inconclusive} native inconclusive, \
         external backends on {external_cells} cells, {secs:.1} s{}",
        mismatches.len(),
        mismatches.first().map(|m| format!("; first: {m}")).unwrap_or_default()
    );
    judge(mismatches.is_empty() && native_inconclusive == 0, detail)
}

fn oracle_validation(seen: &Seen) -> Report {
    judge(
        seen.bad.is_empty() && seen.total > 0,
        format!(
            "{} feasible schedules re-checked, {} rejected{}",
            seen.total,
            seen.bad.len(),
            seen.bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------------- 3

fn encoding_fidelity(ext: &Externals, seen: &mut Seen) -> Report {
    let budget = SearchBudget { max_nodes: 5_000_000, max_seconds: 60.0 };
    let mut used = 0;
    let mut problems = Vec::new();
    let mut solver_checked = 0;
    let mut seed = 10_000u64;
    while used < 50 && seed < 20_000 {
        let f = fuzz_case(seed);
        seed += 1;
        let cons: Vec<GcInstance> = f
            .constraints
            .into_iter()
            .filter(|c| matches!(c.kind(), GcKind::Gc1 | GcKind::Gc2 | GcKind::Gc3))
            .collect();
        if cons.is_empty() {
            continue;
        }
        let inst = f.instance;
        let out = dfs_feasible(&inst, &cons, budget);
        let Some(s) = out.schedule() else { continue };
        used += 1;
        seen.check(&format!("fidelity seed {}", seed - 1), &inst, &cons, s);
        let lp = emit_lp(&inst, &cons).unwrap();
        let values = lp.intended_values(s);
        let broken = lp.violated_rows(&values);
        if let Some(r) = broken.first() {
            problems.push(format!("seed {}: LP row {} violated", seed - 1, r.name));
        }
        let script = emit_smtlib(&inst, &cons).unwrap();
        if !evaluate_script(&script.text, &script.var_index.valuation(s)).unwrap_or(false) {
            problems.push(format!("seed {}: SMT script false under the schedule", seed - 1));
        }
        if let Some(c) = &ext.smt {
            let fixed = SmtScript { text: script.with_assignment(s), var_index: script.var_index.clone() };
            let v = run_smt(&fixed, c).verdict();
            solver_checked += 1;
            if v != Verdict::Feasible {
                problems.push(format!("seed {}: solver answered {v} with the assignment asserted", seed - 1));
            }
        }
    }
    let detail = format!(
        "{used} tiny GC1-GC3 instances, LP rows and SMT valuation checked, {solver_checked} solver re-runs, {} problems{}",
        problems.len(),
        problems.first().map(|p| format!("; first: {p}")).unwrap_or_default()
    );
    judge(used == 50 && problems.is_empty(), detail)
}

// ---------------------------------------------------------------------- 4

fn generator_conformance() -> Report {
    let dump = canonical_dump();
    let (a, _) = build_problem_a(ProblemASpec { num_shifts: 6, num_staff: 4 }).unwrap();
    let (b, _) = build_problem_b(ProblemBSpec { num_days: 1 }).unwrap();
    let sizes = a.shifts.len() == 6 && a.personnel.len() == 4 && b.shifts.len() == 20;
    let diff = dump.lines().zip(TABLES.lines()).position(|(x, y)| x != y);
    let same = dump == TABLES;
    judge(
        same && sizes,
        format!(
            "canonical dump vs transcribed tables: {}; A(6,4) has {} shifts, B(1) has {} shifts",
            if same { "identical".to_string() } else { format!("differs at line {}", diff.map_or(0, |d| d + 1)) },
            a.shifts.len(),
            b.shifts.len()
        ),
    )
}

// ---------------------------------------------------------------------- 5

const SHIFT_AXIS: [u32; 6] = [6, 12, 18, 24, 30, 36];
const STAFF_AXIS: [u32; 5] = [2, 4, 6, 8, 10];

fn with_tolerance(cons: &[GcInstance], v: Fixed) -> Vec<GcInstance> {
    cons.iter()
        .map(|c| match &c.gc {
            Gc::WorkloadBalance { staff, shifts, .. } if c.label.starts_with("A.11") => GcInstance::new(
                c.label.clone(),
                Gc::WorkloadBalance { staff: staff.clone(), shifts: shifts.clone(), tolerance: v },
            ),
            _ => c.clone(),
        })
        .collect()
}

/// Verdict for one cell: the native oracle when it finishes within its
/// small budget, otherwise both external backends when they agree.
fn decide(inst: &RosterInstance, cons: &[GcInstance], ext: &Externals, seen: &mut Seen, tag: &str) -> Option<Verdict> {
    let native = run_native(inst, cons, 5.0, 2_000_000);
    if let Some(s) = native.schedule() {
        seen.check(tag, inst, cons, s);
    }
    if native.verdict().is_definite() {
        return Some(native.verdict());
    }
    let (sc, mc) = (ext.smt.as_ref()?, ext.milp.as_ref()?);
    let s = run_smt(&emit_smtlib(inst, cons).unwrap(), sc);
    let m = run_milp(&emit_lp(inst, cons).unwrap(), mc);
    for o in [&s, &m] {
        if let Some(sch) = o.schedule() {
            seen.check(tag, inst, cons, sch);
        }
    }
    (s.verdict().is_definite() && s.verdict() == m.verdict()).then(|| s.verdict())
}

fn pattern_reproduction(seen: &mut Seen) -> Report {
    let work = tempfile::tempdir().unwrap();
    let ext = externals(60.0, work.path());
    if ext.smt.is_none() || ext.milp.is_none() {
        return Report { status: Status::Skip, detail: "z3 and cbc are both required for the larger cells".into() };
    }
    let relaxed_v = Fixed::from_int(100);
    let mut base = BTreeMap::new();
    let mut relaxed = BTreeMap::new();
    let mut undecided = Vec::new();
    for &n in &SHIFT_AXIS {
        for &p in &STAFF_AXIS {
            let (inst, cons) = build_problem_a(ProblemASpec { num_shifts: n, num_staff: p }).unwrap();
            let tag = format!("A({n},{p})");
            match decide(&inst, &cons, &ext, seen, &tag) {
                Some(v) => {
                    base.insert((n, p), v);
                }
                None => undecided.push(format!("{tag} base")),
            }
            let loose = with_tolerance(&cons, relaxed_v);
            match decide(&inst, &loose, &ext, seen, &format!("{tag} relaxed")) {
                Some(v) => {
                    relaxed.insert((n, p), v);
                }
                None => undecided.push(format!("{tag} relaxed")),
            }
        }
    }
    let infeasible = |m: &BTreeMap<(u32, u32), Verdict>| -> BTreeSet<(u32, u32)> {
        m.iter().filter(|(_, v)| **v == Verdict::Infeasible).map(|(k, _)| *k).collect()
    };
    let base_inf = infeasible(&base);
    let relaxed_inf = infeasible(&relaxed);
    // cells whose infeasibility goes away once constraint 11 is loosened
    let induced: BTreeSet<(u32, u32)> = base_inf.difference(&relaxed_inf).copied().collect();
    let relaxed_feasible: Vec<(u32, u32)> =
        relaxed.iter().filter(|(_, v)| **v == Verdict::Feasible).map(|(k, _)| *k).collect();
    let ratio = |&(n, p): &(u32, u32)| f64::from(n) / f64::from(p);
    let lowest = relaxed_feasible.iter().min_by(|a, b| ratio(a).total_cmp(&ratio(b))).copied();
    let highest = relaxed_feasible.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))).copied();
    let at_extremes = !induced.is_empty()
        && lowest.is_some_and(|c| induced.contains(&c))
        && highest.is_some_and(|c| induced.contains(&c));
    let fmt = |s: &BTreeSet<(u32, u32)>| s.iter().map(|(n, p)| format!("({n},{p})")).collect::<Vec<_>>().join(" ");
    let detail = format!(
        "constraint-11 region {{{}}} {} the extreme-ratio cells {:?} and {:?}; still infeasible after relaxing: {{{}}}; \
         undecided: {}",
        fmt(&induced),
        if at_extremes { "contains" } else { "misses" },
        lowest,
        highest,
        fmt(&relaxed_inf),
        if undecided.is_empty() { "none".to_string() } else { undecided.join(", ") },
    );
    judge(at_extremes && relaxed_inf.is_empty() && undecided.is_empty(), detail)
}

// ---------------------------------------------------------------------- 6

fn person(id: u32, desired: i64, q: &[&str]) -> Person {
    Person { id: PersonId(id), desired_workload: Fixed::from_int(desired), qualifications: quals(q.iter().copied()) }
}

fn shift(id: u32, ty: &str, day: u32, start: u32, minutes: u32, hours: i64) -> Shift {
    Shift {
        id: ShiftId(id),
        shift_type: ty.to_string(),
        start_day: day,
        start_time: start,
        duration: minutes,
        workload: Fixed::from_int(hours),
        required_qualifications: quals(["N"]),
    }
}

/// One `ty` shift per day for `days` days and `persons` nurses.
fn daily(days: u32, persons: u32, types: &[&str]) -> RosterInstance {
    let mut shifts = Vec::new();
    for d in 1..=days {
        for (k, ty) in types.iter().enumerate() {
            let id = shifts.len() as u32 + 1;
            shifts.push(shift(id, ty, d, 360 + 480 * k as u32, 480, 8));
        }
    }
    RosterInstance {
        horizon_days: days,
        personnel: (1..=persons).map(|p| person(p, 100, &["N"])).collect(),
        shifts,
        ..RosterInstance::default()
    }
}

fn sched(inst: &RosterInstance, pairs: &[(u32, u32)]) -> Schedule {
    let mut s = Schedule::empty(inst.shifts.len());
    for &(sh, p) in pairs {
        s.set(ShiftId(sh), Some(PersonId(p)));
    }
    s
}

fn ps(ids: &[u32]) -> PersonSet {
    ids.iter().map(|&p| PersonId(p)).collect()
}

fn ss(ids: impl IntoIterator<Item = u32>) -> ShiftSet {
    ids.into_iter().map(ShiftId).collect()
}

fn all_s(inst: &RosterInstance) -> ShiftSet {
    inst.shift_ids().collect()
}

fn all_p(inst: &RosterInstance) -> PersonSet {
    inst.person_ids().collect()
}

struct Suite {
    per_kind: BTreeMap<GcKind, usize>,
    failures: Vec<String>,
}

impl Suite {
    fn case(&mut self, name: &str, gc: Gc, inst: &RosterInstance, s: &Schedule, sat: bool, measure: Option<u64>) {
        let c = GcInstance::new(name, gc);
        *self.per_kind.entry(c.kind()).or_default() += 1;
        match eval_gc(&c, inst, s) {
            Ok(e) if e.satisfied == sat && measure.is_none_or(|m| m == e.measure) => {}
            Ok(e) => self.failures.push(format!("{name}: satisfied={} measure={}", e.satisfied, e.measure)),
            Err(e) => self.failures.push(format!("{name}: {e}")),
        }
    }
}

/// A feasible Problem A schedule for 48 shifts and 10 staff, found once
/// with z3 and frozen. Entry k is the person on shift k + 1.
const A48_SCHEDULE: [u32; 48] = [
    9, 3, 10, 6, 1, 5, 9, 2, 10, 8, 1, 5, 9, 2, 3, 8, 6, 7, 5, 2, 3, 4, 10, 7, 5, 6, 9, 4, 10, 7, 1, 6, 2, 3, 8, 7, 1,
    9, 5, 3, 4, 10, 1, 9, 5, 2, 6, 10,
];

fn gc_suite() -> Report {
    let mut t = Suite { per_kind: BTreeMap::new(), failures: Vec::new() };
    let (a6, _) = build_problem_a(ProblemASpec { num_shifts: 6, num_staff: 4 }).unwrap();
    let everyone = sched(&a6, &[(1, 1), (2, 2), (3, 3), (4, 4), (5, 2), (6, 3)]);

    // GC1
    t.case("gc1 all covered", Gc::Uncovered { staff: all_p(&a6), shifts: all_s(&a6), bounds: Bounds::exactly(0) }, &a6, &everyone, true, Some(0));
    let (a30, _) = build_problem_a(ProblemASpec { num_shifts: 30, num_staff: 4 }).unwrap();
    let d345 = ss(13..=30);
    let busy: Vec<(u32, u32)> = (1..=30).map(|k| (k, if k <= 12 { 1 } else { 2 + k % 3 })).collect();
    if d345.len() != 18 {
        t.failures.push(format!("days 3-5 hold {} shifts, not 18", d345.len()));
    }
    t.case("gc1 person 1 off days 3-5", Gc::Uncovered { staff: ps(&[1]), shifts: d345, bounds: Bounds::exactly(18) }, &a30, &sched(&a30, &busy), true, Some(18));
    let gap = sched(&a6, &[(1, 1), (2, 2), (3, 3), (4, 4), (5, 2)]);
    t.case("gc1 one gap", Gc::Uncovered { staff: all_p(&a6), shifts: all_s(&a6), bounds: Bounds::exactly(0) }, &a6, &gap, false, Some(1));
    t.case("gc1 outsider does not cover", Gc::Uncovered { staff: ps(&[2]), shifts: ss([1]), bounds: Bounds::exactly(0) }, &a6, &everyone, false, Some(1));

    // GC2: shift 1 needs {N, A}; person 2 only has N
    let wrong = sched(&a6, &[(1, 2)]);
    t.case("gc2 unqualified counted", Gc::Unqualified { staff: all_p(&a6), shifts: all_s(&a6), bounds: Bounds::exactly(0) }, &a6, &wrong, false, Some(1));
    t.case("gc2 only staff counted", Gc::Unqualified { staff: ps(&[3]), shifts: all_s(&a6), bounds: Bounds::exactly(0) }, &a6, &wrong, true, Some(0));
    t.case("gc2 qualified person", Gc::Unqualified { staff: all_p(&a6), shifts: all_s(&a6), bounds: Bounds::exactly(0) }, &a6, &everyone, true, Some(0));
    t.case("gc2 at least one", Gc::Unqualified { staff: all_p(&a6), shifts: ss([1]), bounds: Bounds::new(1, 1) }, &a6, &wrong, true, Some(1));

    // GC3: D1 and D2 run at the same time
    let double = sched(&a6, &[(1, 1), (2, 1)]);
    t.case("gc3 disallowed pair", Gc::Overlap { staff: all_p(&a6), bounds: Bounds::exactly(0) }, &a6, &double, false, Some(1));
    let mut allow = a6.clone();
    allow.allowed_overlap_pairs.push(OverlapAllowance { shift_a: ShiftId(1), shift_b: ShiftId(2), persons: ps(&[1]) });
    t.case("gc3 allowed pair", Gc::Overlap { staff: all_p(&allow), bounds: Bounds::exactly(0) }, &allow, &double, true, Some(0));
    t.case("gc3 disjoint shifts", Gc::Overlap { staff: all_p(&a6), bounds: Bounds::exactly(0) }, &a6, &sched(&a6, &[(1, 1), (5, 1)]), true, Some(0));
    t.case("gc3 outside staff", Gc::Overlap { staff: ps(&[2]), bounds: Bounds::exactly(0) }, &a6, &double, true, Some(0));

    // GC4 on a D/E/N horizon of three days
    let mut den = daily(3, 2, &["D"]);
    den.shifts[1].shift_type = "E".into();
    den.shifts[2].shift_type = "N".into();
    let share = |lo: i64, hi: i64| Gc::WorkloadShare { staff: ps(&[1]), shifts: ss([1]), lo: Fixed::from_hundredths(lo), hi: Fixed::from_hundredths(hi) };
    t.case("gc4 half share", share(50, 100), &den, &sched(&den, &[(1, 1), (2, 1)]), true, None);
    t.case("gc4 third share", share(50, 100), &den, &sched(&den, &[(1, 1), (2, 1), (3, 1)]), false, None);
    t.case("gc4 idle person vacuous", share(50, 100), &den, &sched(&den, &[(1, 2)]), true, None);
    t.case("gc4 zero share", share(50, 100), &den, &sched(&den, &[(3, 1)]), false, None);

    // GC5 on Problem A day 1: if 1 works, 4 must not
    let cond = || Gc::Conditional { staff1: ps(&[1]), shifts1: all_s(&a6), staff2: ps(&[4]), shifts2: all_s(&a6), bounds: Bounds::exactly(0) };
    t.case("gc5 not triggered", cond(), &a6, &sched(&a6, &[(2, 4)]), true, None);
    t.case("gc5 triggered and violated", cond(), &a6, &sched(&a6, &[(1, 1), (2, 4)]), false, Some(1));
    t.case("gc5 triggered and kept", cond(), &a6, &sched(&a6, &[(1, 1), (2, 2)]), true, Some(0));

    // GC6 on seven single-shift days
    let week = daily(7, 1, &["D"]);
    let run = |lo, hi| Gc::ConsecutiveDays { staff: ps(&[1]), shifts: all_s(&week), bounds: Bounds::new(lo, hi) };
    let days = |ds: &[u32]| sched(&week, &ds.iter().map(|&d| (d, 1)).collect::<Vec<_>>());
    t.case("gc6 seven in a row", run(0, 6), &week, &days(&[1, 2, 3, 4, 5, 6, 7]), false, None);
    t.case("gc6 six in a row", run(0, 6), &week, &days(&[1, 2, 3, 4, 5, 6]), true, None);
    t.case("gc6 short run at day 1 exempt", run(2, 6), &week, &days(&[1]), true, None);
    t.case("gc6 short run at last day exempt", run(2, 6), &week, &days(&[7]), true, None);
    t.case("gc6 short interior run", run(2, 6), &week, &days(&[3]), false, None);

    // GC7 over eight days: runs of 4-6 need 3 days off on both sides
    let eight = daily(8, 1, &["D"]);
    let rest = || Gc::RestAroundRun {
        staff: ps(&[1]),
        shifts: all_s(&eight),
        before: all_s(&eight),
        after: all_s(&eight),
        run: Bounds::new(4, 6),
        days_before: 3,
        days_after: 3,
    };
    let on = |ds: &[u32]| sched(&eight, &ds.iter().map(|&d| (d, 1)).collect::<Vec<_>>());
    t.case("gc7 rest kept", rest(), &eight, &on(&[1, 5, 6, 7, 8]), true, None);
    t.case("gc7 work inside window", rest(), &eight, &on(&[3, 5, 6, 7, 8]), false, None);
    t.case("gc7 work past window", rest(), &eight, &on(&[1, 2, 3, 4, 8]), true, None);
    t.case("gc7 short run ignored", rest(), &eight, &on(&[1, 2, 4, 5]), true, None);

    // GC8 with D and E shifts every day
    let de = daily(3, 1, &["D", "E"]);
    let seq = || Gc::SameTypeSequence { staff: ps(&[1]), shifts: all_s(&de) };
    // shift ids: day d has D = 2d - 1 and E = 2d
    t.case("gc8 type change", seq(), &de, &sched(&de, &[(1, 1), (4, 1)]), false, None);
    t.case("gc8 same type", seq(), &de, &sched(&de, &[(1, 1), (3, 1)]), true, None);
    t.case("gc8 multi-type day before", seq(), &de, &sched(&de, &[(1, 1), (2, 1), (4, 1)]), true, None);
    t.case("gc8 multi-type day after", seq(), &de, &sched(&de, &[(1, 1), (3, 1), (4, 1)]), false, Some(1));
    t.case("gc8 day off before", seq(), &de, &sched(&de, &[(4, 1)]), true, None);

    // GC9
    let solo = RosterInstance {
        horizon_days: 1,
        personnel: vec![person(1, 100, &["N"])],
        shifts: vec![shift(1, "D", 1, 360, 540, 9)],
        ..RosterInstance::default()
    };
    let bal = |inst: &RosterInstance, v: i64| Gc::WorkloadBalance { staff: all_p(inst), shifts: all_s(inst), tolerance: Fixed::from_hundredths(v) };
    t.case("gc9 single person", bal(&solo, 30), &solo, &sched(&solo, &[(1, 1)]), true, None);
    let pair = RosterInstance {
        horizon_days: 2,
        personnel: vec![person(1, 100, &["N"]), person(2, 100, &["N"])],
        shifts: vec![shift(1, "D", 1, 360, 540, 9), shift(2, "D", 2, 360, 540, 9)],
        ..RosterInstance::default()
    };
    t.case("gc9 one takes all", bal(&pair, 30), &pair, &sched(&pair, &[(1, 1), (2, 1)]), false, Some(2));
    t.case("gc9 one takes all at v = 1", bal(&pair, 100), &pair, &sched(&pair, &[(1, 1), (2, 1)]), true, None);
    t.case("gc9 even split at v = 0", bal(&pair, 0), &pair, &sched(&pair, &[(1, 1), (2, 2)]), true, None);

    // eval_all
    let mut all_ok = eval_all(&[], &a6, &everyone).map(|r| r.satisfied()).unwrap_or(false);
    let (a48, c48) = build_problem_a(ProblemASpec { num_shifts: 48, num_staff: 10 }).unwrap();
    let frozen: Vec<(u32, u32)> = A48_SCHEDULE.iter().enumerate().map(|(k, &p)| (k as u32 + 1, p)).collect();
    let good = sched(&a48, &frozen);
    all_ok &= eval_all(&c48, &a48, &good).map(|r| r.satisfied()).unwrap_or(false);
    let mut moved = good.clone();
    // shift 17 is a night shift on day 3
    moved.set(ShiftId(17), Some(PersonId(1)));
    let violated: Vec<String> =
        eval_all(&c48, &a48, &moved).map(|r| r.violated().map(|e| e.label.clone()).collect()).unwrap_or_default();
    all_ok &= violated.len() == 1 && violated[0].starts_with("A.2 ");
    if !all_ok {
        t.failures.push(format!("eval_all examples: mutation violated {violated:?}"));
    }

    let thin: Vec<String> =
        GcKind::ALL.iter().filter(|k| t.per_kind.get(k).copied().unwrap_or(0) < 3).map(|k| k.to_string()).collect();
    let cases: usize = t.per_kind.values().sum();
    judge(
        t.failures.is_empty() && thin.is_empty(),
        format!(
            "{cases} hand cases over GC1-GC9 plus 3 eval_all examples, {} failures{}{}",
            t.failures.len(),
            t.failures.first().map(|f| format!("; first: {f}")).unwrap_or_default(),
            if thin.is_empty() { String::new() } else { format!("; fewer than 3 cases for {}", thin.join(", ")) }
        ),
    )
}

// ---------------------------------------------------------------------- 7

fn result(backend: Backend, verdict: Verdict, t: f64) -> BackendResult {
    BackendResult { backend, verdict, wall_time: t, validated: verdict == Verdict::Feasible }
}

fn grid_record(shifts: u32, staff: u32, smt: (Verdict, f64), milp: (Verdict, f64)) -> RunRecord {
    RunRecord {
        cell: Cell { problem: Problem::A, shifts: Some(shifts), staff: Some(staff), days: None, seed: None },
        results: vec![result(Backend::Smt, smt.0, smt.1), result(Backend::Milp, milp.0, milp.1)],
    }
}

fn count(svg: &str, needle: &str) -> usize {
    svg.matches(needle).count()
}

fn figures() -> Report {
    use Verdict::{Feasible as F, Infeasible as I, Timeout as T};
    let grid = vec![
        grid_record(6, 2, (F, 1.0), (F, 10.0)),
        grid_record(6, 4, (F, 2.0), (F, 2.0)),
        grid_record(6, 6, (I, 1.0), (I, 0.5)),
        grid_record(12, 2, (T, 60.0), (F, 5.0)),
        grid_record(12, 4, (T, 60.0), (T, 60.0)),
        grid_record(12, 6, (F, 2.0), (T, 60.0)),
        grid_record(18, 2, (F, 1.0), (F, 1.04)),
        grid_record(18, 4, (F, 1.0), (F, 1.06)),
        grid_record(18, 6, (F, 30.0), (F, 3.0)),
    ];
    let mut problems = Vec::new();
    let mut expect = |what: &str, ok: bool| {
        if !ok {
            problems.push(what.to_string());
        }
    };
    match render_heatmap(&grid) {
        Ok(h) => {
            expect("hatch pattern defined", h.contains(r#"<pattern id="hatch""#));
            expect("one hatched cell", count(&h, r#"class="cell-infeasible""#) == 1 && h.contains(r#"fill="url(#hatch)""#));
            expect("one black cell", count(&h, r#"<rect class="cell-black""#) == 1 && h.contains(r##"fill="#000000""##));
            expect("one gray cell", count(&h, r#"<rect class="cell-gray""#) == 1);
            expect("seven colored cells", count(&h, r#"<rect class="cell-quotient""#) == 7);
            expect("axis labels", h.contains(">shifts<") && h.contains(">staff members<"));
        }
        Err(e) => expect(&format!("heatmap: {e}"), false),
    }
    let single = render_heatmap(&grid[..1]).map(|h| h.contains(&format!(r#"class="cell-quotient" x="70.0" y="40.0" width="44.0" height="44.0" fill="{POSITIVE_EXTREME}""#)));
    expect("single +1 cell at the positive extreme", single.unwrap_or(false));
    let even = render_heatmap(&grid[1..2]).map(|h| h.contains(&format!(r#"fill="{NEUTRAL}""#)));
    expect("equal times neutral", even.unwrap_or(false));
    match render_ranking(&grid) {
        Ok(r) => {
            // smt faster: (6,2) (12,6) (18,4); milp faster: (6,6) (12,2) (18,6);
            // equal: (6,4) (18,2); neither: (12,4)
            expect("ranking smt", count(&r, r#"<rect class="rank-smt""#) == 3);
            expect("ranking milp", count(&r, r#"<rect class="rank-milp""#) == 3);
            expect("ranking equal", count(&r, r#"<rect class="rank-equal""#) == 2);
            expect("ranking none", count(&r, r#"<rect class="rank-none""#) == 1);
        }
        Err(e) => expect(&format!("ranking: {e}"), false),
    }
    let line: Vec<RunRecord> = (1..=4u32)
        .map(|d| RunRecord {
            cell: Cell { problem: Problem::B, shifts: Some(19 * d + d.div_ceil(2)), staff: Some(28), days: Some(d), seed: None },
            results: vec![
                result(Backend::Smt, F, 0.5 * f64::from(d)),
                if d == 3 { result(Backend::Milp, T, 60.0) } else { result(Backend::Milp, F, 0.2 * f64::from(d)) },
            ],
        })
        .collect();
    let l = render_lineplot(&line);
    let smt_lines: Vec<&str> = l.lines().filter(|x| x.starts_with(r#"<polyline class="series-smt""#)).collect();
    expect("one four-point smt line", smt_lines.len() == 1 && smt_lines[0].matches(',').count() == 4);
    let milp_lines: Vec<&str> = l.lines().filter(|x| x.starts_with(r#"<polyline class="series-milp""#)).collect();
    expect("milp line broken at the timeout", milp_lines.len() == 1 && milp_lines[0].matches(',').count() == 2);
    expect("three milp points", count(&l, r#"class="series-milp-point""#) == 3);
    let empty = render_lineplot(&[]);
    expect("empty plot has axes only", !empty.contains("<polyline") && empty.contains(r#"class="axis""#));
    judge(
        problems.is_empty(),
        format!("heatmap, ranking and line SVGs for a 3x3 synthetic set: {}", if problems.is_empty() { "all structural checks hold".to_string() } else { format!("missing {}", problems.join(", ")) }),
    )
}

// ---------------------------------------------------------------------- 8

fn determinism() -> Report {
    let (a, c) = build_problem_a(ProblemASpec { num_shifts: 6, num_staff: 4 }).unwrap();
    let golden_ok =
        emit_smtlib(&a, &c[..4]).unwrap().text == SMT_GOLDEN && emit_lp(&a, &c[..4]).unwrap().text == LP_GOLDEN;
    let mut stable = true;
    for (i, cs) in [
        build_problem_a(ProblemASpec { num_shifts: 18, num_staff: 6 }).unwrap(),
        build_problem_b(ProblemBSpec { num_days: 2 }).unwrap(),
        (fuzz_case(7).instance, fuzz_case(7).constraints),
    ] {
        let smt = emit_smtlib(&i, &cs).unwrap().text;
        let lp = emit_lp(&i, &cs).unwrap().text;
        for _ in 0..10 {
            stable &= emit_smtlib(&i, &cs).unwrap().text == smt && emit_lp(&i, &cs).unwrap().text == lp;
        }
    }
    judge(
        golden_ok && stable,
        format!(
            "golden files {}; 10 repeated emissions {}",
            if golden_ok { "match" } else { "differ" },
            if stable { "byte-identical" } else { "differ" }
        ),
    )
}

fn main() {
    let work = tempfile::tempdir().expect("scratch directory");
    let ext = externals(30.0, work.path());
    println!(
        "external solvers: smt {}, milp {}",
        if ext.smt.is_some() { "available" } else { "absent" },
        if ext.milp.is_some() { "available" } else { "absent" }
    );
    let mut seen = Seen::default();
    let c1 = differential(&ext, &mut seen);
    let c3 = encoding_fidelity(&ext, &mut seen);
    let c4 = generator_conformance();
    let c5 = pattern_reproduction(&mut seen);
    let c2 = oracle_validation(&seen);
    let c6 = gc_suite();
    let c7 = figures();
    let c8 = determinism();
    let reports = [
        ("differential verdict agreement", c1),
        ("oracle validation", c2),
        ("encoding fidelity", c3),
        ("generator conformance", c4),
        ("constraint-11 pattern", c5),
        ("GC semantic suite", c6),
        ("figure emission", c7),
        ("determinism", c8),
    ];
    let mut failed = false;
    for (k, (name, r)) in reports.iter().enumerate() {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed = true;
                "FAIL"
            }
            Status::Skip => "SKIP",
        };
        println!("criterion {} {tag}: {name}: {}", k + 1, r.detail);
    }
    if failed {
        std::process::exit(1);
    }
}
