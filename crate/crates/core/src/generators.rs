//! The two benchmark problem families.
//!
//! Problem A is sized by a shift count and a staff count. Shifts are taken
//! from a six-row daily template in order, day after day. Staff cycle
//! through four person types. Problem B has a fixed ward roster; its shift
//! set grows with the number of days.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::constraints::{Bounds, Gc, GcInstance, PersonSet, ShiftSet};
use crate::fixed::Fixed;
use crate::model::{quals, OverlapAllowance, Person, PersonId, RosterInstance, Shift, ShiftId};

/// Row of a daily shift template: type, start (minutes), duration
/// (minutes), workload (hours), required qualifications.
pub type ShiftRow = (&'static str, u32, u32, i64, &'static [&'static str]);

pub const PROBLEM_A_SHIFTS: [ShiftRow; 6] = [
    ("D1", 6 * 60, 9 * 60, 9, &["N", "A"]),
    ("D2", 6 * 60, 9 * 60, 9, &["N"]),
    ("E1", 14 * 60, 9 * 60, 9, &["N"]),
    ("E2", 14 * 60, 9 * 60, 9, &["N"]),
    ("N1", 22 * 60, 9 * 60, 9, &["N"]),
    ("N2", 22 * 60, 9 * 60, 9, &["N"]),
];

/// Desired workload (hours) and qualifications per staff type.
pub const PROBLEM_A_STAFF: [(i64, &[&str]); 4] = [(100, &["N", "A"]), (100, &["N"]), (100, &["N"]), (50, &["N"])];

/// Daily shifts of Problem B, each with its multiplicity.
pub const PROBLEM_B_SHIFTS: [(usize, ShiftRow); 10] = [
    (5, ("D", 6 * 60, 9 * 60, 9, &["N"])),
    (4, ("E", 14 * 60, 9 * 60, 9, &["N"])),
    (2, ("N", 22 * 60, 9 * 60, 7, &["N"])),
    (2, ("DD", 6 * 60, 10 * 60, 10, &["D"])),
    (1, ("DE", 12 * 60, 10 * 60, 10, &["D"])),
    (1, ("DN", 19 * 60, 9 * 60, 7, &["D"])),
    (1, ("DS1", 5 * 60, 9 * 60, 9, &["D", "S1"])),
    (1, ("DS2", 5 * 60, 9 * 60, 9, &["D", "S2"])),
    (1, ("CND", 6 * 60, 10 * 60, 10, &["CN"])),
    (1, ("CNE", 16 * 60, 8 * 60, 8, &["CN"])),
];

/// Every second day starting on day 1.
pub const PROBLEM_B_ADMIN: ShiftRow = ("Admin", 8 * 60, 5 * 60, 5, &["A"]);

/// Staff of Problem B as `(count, desired workload, qualifications)`.
pub const PROBLEM_B_STAFF: [(usize, i64, &[&str]); 12] = [
    (3, 100, &["N", "CN"]),
    (1, 100, &["N", "A"]),
    (10, 100, &["N"]),
    (1, 75, &["N"]),
    (2, 50, &["N"]),
    (1, 100, &["D", "S1", "S2"]),
    (2, 100, &["D", "S1"]),
    (2, 100, &["D", "S2"]),
    (1, 75, &["D", "S2"]),
    (3, 100, &["D"]),
    (1, 50, &["D"]),
    (1, 100, &["A"]),
];

/// Shift-type pairs anyone qualified for both may hold simultaneously.
pub const PROBLEM_B_ALLOWED_PAIRS: [(&str, &str); 5] =
    [("D", "CND"), ("E", "CNE"), ("DD", "DS1"), ("DD", "DS2"), ("CND", "Admin")];

pub const PROBLEM_B_NURSE_TYPES: [&str; 5] = ["D", "E", "N", "CND", "CNE"];
pub const PROBLEM_B_DOCTOR_TYPES: [&str; 5] = ["DD", "DE", "DN", "DS1", "DS2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemASpec {
    pub num_shifts: u32,
    pub num_staff: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemBSpec {
    pub num_days: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("problem size must be positive, got {field} = 0")]
    NonPositive { field: &'static str },
}

fn shift_from_row(id: u32, day: u32, row: &ShiftRow) -> Shift {
    Shift {
        id: ShiftId(id),
        shift_type: row.0.to_string(),
        start_day: day,
        start_time: row.1,
        duration: row.2,
        workload: Fixed::from_int(row.3),
        required_qualifications: quals(row.4.iter().copied()),
    }
}

fn all_persons(i: &RosterInstance) -> PersonSet {
    i.person_ids().collect()
}

fn all_shifts(i: &RosterInstance) -> ShiftSet {
    i.shift_ids().collect()
}

fn select(i: &RosterInstance, f: impl Fn(&Shift) -> bool) -> ShiftSet {
    i.shifts.iter().filter(|s| f(s)).map(|s| s.id).collect()
}

fn of_types<'a>(types: &'a [&'a str]) -> impl Fn(&Shift) -> bool + 'a {
    move |s| types.contains(&s.shift_type.as_str())
}

fn one(p: u32) -> PersonSet {
    [PersonId(p)].into_iter().collect()
}

pub fn build_problem_a(spec: ProblemASpec) -> Result<(RosterInstance, Vec<GcInstance>), SpecError> {
    if spec.num_shifts == 0 {
        return Err(SpecError::NonPositive { field: "num_shifts" });
    }
    if spec.num_staff == 0 {
        return Err(SpecError::NonPositive { field: "num_staff" });
    }
    let shifts: Vec<Shift> = (1..=spec.num_shifts)
        .map(|k| {
            let row = &PROBLEM_A_SHIFTS[(k as usize - 1) % 6];
            shift_from_row(k, (k - 1) / 6 + 1, row)
        })
        .collect();
    let personnel = (1..=spec.num_staff)
        .map(|j| {
            let (desired, q) = PROBLEM_A_STAFF[(j as usize - 1) % 4];
            Person { id: PersonId(j), desired_workload: Fixed::from_int(desired), qualifications: quals(q.iter().copied()) }
        })
        .collect();
    let inst = RosterInstance {
        horizon_days: spec.num_shifts.div_ceil(6),
        personnel,
        shifts,
        allowed_overlap_pairs: Vec::new(),
        notes: Vec::new(),
    };
    let cs = problem_a_constraints(&inst);
    Ok((inst, cs))
}

fn problem_a_constraints(i: &RosterInstance) -> Vec<GcInstance> {
    let p_all = all_persons(i);
    let s_all = all_shifts(i);
    let t = i.horizon_days;
    let days345 = select(i, |s| (3..=5).contains(&s.start_day));
    let n345 = days345.len() as u32;
    let days12 = select(i, |s| s.start_day <= 2);
    let mut cs = vec_of([
        GcInstance::new(
            "A.1 all shifts covered",
            Gc::Uncovered { staff: p_all.clone(), shifts: s_all.clone(), bounds: Bounds::exactly(0) },
        ),
        GcInstance::new(
            "A.2 person 1 off on days 3-5",
            Gc::Uncovered { staff: one(1), shifts: days345, bounds: Bounds::exactly(n345) },
        ),
        GcInstance::new(
            "A.3 everyone qualified",
            Gc::Unqualified { staff: p_all.clone(), shifts: s_all.clone(), bounds: Bounds::exactly(0) },
        ),
        GcInstance::new("A.4 no disallowed overlaps", Gc::Overlap { staff: p_all.clone(), bounds: Bounds::exactly(0) }),
        GcInstance::new(
            "A.5 person 1 at least half day shifts",
            Gc::WorkloadShare {
                staff: one(1),
                shifts: select(i, of_types(&["D1", "D2"])),
                lo: Fixed::from_hundredths(50),
                hi: Fixed::ONE,
            },
        ),
        GcInstance::new(
            "A.6 persons 4 and 7 off days 1-2 when person 1 works them",
            Gc::Conditional {
                staff1: one(1),
                shifts1: days12.clone(),
                staff2: [4, 7].into_iter().map(PersonId).filter(|p| i.person(*p).is_some()).collect(),
                shifts2: days12,
                bounds: Bounds::exactly(0),
            },
        ),
    ]);
    for j in i.person_ids() {
        for d in 1..=t {
            let day = |types: &'static [&'static str]| select(i, move |s| s.start_day == d && of_types(types)(s));
            cs.push(GcInstance::new(
                format!("A.7 no day and night shift on one day p{} d{d}", j.0),
                Gc::Conditional {
                    staff1: one(j.0),
                    shifts1: day(&["D1", "D2"]),
                    staff2: one(j.0),
                    shifts2: day(&["N1", "N2"]),
                    bounds: Bounds::exactly(0),
                },
            ));
        }
    }
    cs.extend([
        GcInstance::new(
            "A.8 at most 6 days in a row",
            Gc::ConsecutiveDays { staff: p_all.clone(), shifts: s_all.clone(), bounds: Bounds::new(0, 6) },
        ),
        GcInstance::new(
            "A.9 3 days off around 4-6 day runs",
            Gc::RestAroundRun {
                staff: p_all.clone(),
                shifts: s_all.clone(),
                before: s_all.clone(),
                after: s_all.clone(),
                run: Bounds::new(4, 6),
                days_before: 3,
                days_after: 3,
            },
        ),
        GcInstance::new(
            "A.10 consecutive days same type",
            Gc::SameTypeSequence { staff: p_all.clone(), shifts: s_all.clone() },
        ),
        GcInstance::new(
            "A.11 workload within 30% of expected",
            Gc::WorkloadBalance { staff: p_all, shifts: s_all, tolerance: Fixed::from_hundredths(30) },
        ),
    ]);
    cs
}

fn vec_of<const N: usize>(a: [GcInstance; N]) -> Vec<GcInstance> {
    a.into_iter().collect()
}

/// Problem B parameters that the published constraint table leaves open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemBParams {
    /// Bounds on the share of person 1's workload from D and E shifts.
    pub share_lo: Fixed,
    pub share_hi: Fixed,
    pub max_days_in_row: u32,
    pub max_late_days_in_row: u32,
    pub late_types: Vec<String>,
    pub short_run: (u32, u32),
    pub short_run_rest: u32,
    pub long_run: (u32, u32),
    pub long_run_rest: u32,
    pub nurse_tolerance: Fixed,
    pub doctor_tolerance: Fixed,
}

impl Default for ProblemBParams {
    fn default() -> Self {
        ProblemBParams {
            share_lo: Fixed::from_hundredths(10),
            share_hi: Fixed::ONE,
            max_days_in_row: 6,
            max_late_days_in_row: 3,
            late_types: ["E", "N", "DE", "DN", "CNE"].into_iter().map(String::from).collect(),
            short_run: (3, 5),
            short_run_rest: 2,
            long_run: (6, 6),
            long_run_rest: 3,
            nurse_tolerance: Fixed::from_hundredths(60),
            doctor_tolerance: Fixed::from_hundredths(60),
        }
    }
}

pub const PROBLEM_B_STAFF_NOTE: &str =
    "staff table lists 28 persons while the accompanying text says 29; the 28 tabulated persons are used";

pub fn build_problem_b(spec: ProblemBSpec) -> Result<(RosterInstance, Vec<GcInstance>), SpecError> {
    build_problem_b_with(spec, &ProblemBParams::default())
}

pub fn build_problem_b_with(
    spec: ProblemBSpec,
    params: &ProblemBParams,
) -> Result<(RosterInstance, Vec<GcInstance>), SpecError> {
    if spec.num_days == 0 {
        return Err(SpecError::NonPositive { field: "num_days" });
    }
    let mut shifts = Vec::new();
    for d in 1..=spec.num_days {
        for (count, row) in &PROBLEM_B_SHIFTS {
            for _ in 0..*count {
                shifts.push(shift_from_row(shifts.len() as u32 + 1, d, row));
            }
        }
        if d % 2 == 1 {
            shifts.push(shift_from_row(shifts.len() as u32 + 1, d, &PROBLEM_B_ADMIN));
        }
    }
    let mut personnel = Vec::new();
    for (count, desired, q) in PROBLEM_B_STAFF {
        for _ in 0..count {
            personnel.push(Person {
                id: PersonId(personnel.len() as u32 + 1),
                desired_workload: Fixed::from_int(desired),
                qualifications: quals(q.iter().copied()),
            });
        }
    }
    let mut inst = RosterInstance {
        horizon_days: spec.num_days,
        personnel,
        shifts,
        allowed_overlap_pairs: Vec::new(),
        notes: vec_str([PROBLEM_B_STAFF_NOTE]),
    };
    inst.allowed_overlap_pairs = problem_b_allowances(&inst);
    let cs = problem_b_constraints(&inst, params);
    Ok((inst, cs))
}

fn vec_str<const N: usize>(a: [&str; N]) -> Vec<String> {
    a.into_iter().map(String::from).collect()
}

fn problem_b_allowances(i: &RosterInstance) -> Vec<OverlapAllowance> {
    let mut out = Vec::new();
    for (a, b) in i.enumerate_overlap_pairs() {
        let (sa, sb) = (&i.shifts[a.0 as usize - 1], &i.shifts[b.0 as usize - 1]);
        let listed = PROBLEM_B_ALLOWED_PAIRS.iter().any(|&(x, y)| {
            (sa.shift_type == x && sb.shift_type == y) || (sa.shift_type == y && sb.shift_type == x)
        });
        if !listed {
            continue;
        }
        let persons: BTreeSet<PersonId> =
            i.personnel.iter().filter(|p| i.is_qualified(p, sa) && i.is_qualified(p, sb)).map(|p| p.id).collect();
        if !persons.is_empty() {
            out.push(OverlapAllowance { shift_a: a, shift_b: b, persons });
        }
    }
    out
}

fn problem_b_constraints(i: &RosterInstance, params: &ProblemBParams) -> Vec<GcInstance> {
    let p_all = all_persons(i);
    let s_all = all_shifts(i);
    let t = i.horizon_days;
    let mut cs = vec_of([
        GcInstance::new(
            "B.1 all shifts covered",
            Gc::Uncovered { staff: p_all.clone(), shifts: s_all.clone(), bounds: Bounds::exactly(0) },
        ),
        GcInstance::new(
            "B.2 everyone qualified",
            Gc::Unqualified { staff: p_all.clone(), shifts: s_all.clone(), bounds: Bounds::exactly(0) },
        ),
        GcInstance::new("B.3 no disallowed overlaps", Gc::Overlap { staff: p_all.clone(), bounds: Bounds::exactly(0) }),
        GcInstance::new(
            "B.4 person 1 some D and E shifts",
            Gc::WorkloadShare {
                staff: one(1),
                shifts: select(i, of_types(&["D", "E"])),
                lo: params.share_lo,
                hi: params.share_hi,
            },
        ),
    ]);
    type Rule = (&'static str, &'static [&'static str], &'static [&'static str], bool);
    let same_day: [Rule; 3] = [
        ("B.5 no DN after DD, DS1 or DS2", &["DD", "DS1", "DS2"], &["DN"], false),
        ("B.6 no N or CNE after D or CND", &["D", "CND"], &["N", "CNE"], false),
        ("B.7 no late shift around Admin", &["Admin"], &["E", "N", "CNE", "DN"], true),
    ];
    for (label, first, second, day_before) in same_day {
        for j in i.person_ids() {
            for d in 1..=t {
                let shifts1 = select(i, |s| s.start_day == d && of_types(first)(s));
                let shifts2 = select(i, |s| {
                    (s.start_day == d || (day_before && s.start_day + 1 == d)) && of_types(second)(s)
                });
                if shifts1.is_empty() || shifts2.is_empty() {
                    continue;
                }
                cs.push(GcInstance::new(
                    format!("{label} p{} d{d}", j.0),
                    Gc::Conditional { staff1: one(j.0), shifts1, staff2: one(j.0), shifts2, bounds: Bounds::exactly(0) },
                ));
            }
        }
    }
    let late: Vec<&str> = params.late_types.iter().map(String::as_str).collect();
    cs.extend([
        GcInstance::new(
            format!("B.8 at most {} days in a row", params.max_days_in_row),
            Gc::ConsecutiveDays {
                staff: p_all.clone(),
                shifts: s_all.clone(),
                bounds: Bounds::new(0, params.max_days_in_row),
            },
        ),
        GcInstance::new(
            format!("B.9 at most {} late days in a row", params.max_late_days_in_row),
            Gc::ConsecutiveDays {
                staff: p_all.clone(),
                shifts: select(i, of_types(&late)),
                bounds: Bounds::new(0, params.max_late_days_in_row),
            },
        ),
        GcInstance::new(
            format!("B.10 {} days off around {}-{} day runs", params.short_run_rest, params.short_run.0, params.short_run.1),
            Gc::RestAroundRun {
                staff: p_all.clone(),
                shifts: s_all.clone(),
                before: s_all.clone(),
                after: s_all.clone(),
                run: Bounds::new(params.short_run.0, params.short_run.1),
                days_before: params.short_run_rest,
                days_after: params.short_run_rest,
            },
        ),
        GcInstance::new(
            format!("B.11 {} days off around {}-{} day runs", params.long_run_rest, params.long_run.0, params.long_run.1),
            Gc::RestAroundRun {
                staff: p_all.clone(),
                shifts: s_all.clone(),
                before: s_all.clone(),
                after: s_all.clone(),
                run: Bounds::new(params.long_run.0, params.long_run.1),
                days_before: params.long_run_rest,
                days_after: params.long_run_rest,
            },
        ),
        GcInstance::new(
            "B.12 consecutive days same type except Admin",
            Gc::SameTypeSequence { staff: p_all, shifts: select(i, |s| s.shift_type != PROBLEM_B_ADMIN.0) },
        ),
        GcInstance::new(
            "B.13 nurse workload balance",
            Gc::WorkloadBalance {
                staff: staff_range(1, 17),
                shifts: select(i, of_types(&PROBLEM_B_NURSE_TYPES)),
                tolerance: params.nurse_tolerance,
            },
        ),
        GcInstance::new(
            "B.14 doctor workload balance",
            Gc::WorkloadBalance {
                staff: staff_range(18, 27),
                shifts: select(i, of_types(&PROBLEM_B_DOCTOR_TYPES)),
                tolerance: params.doctor_tolerance,
            },
        ),
    ]);
    cs
}

fn staff_range(lo: u32, hi: u32) -> PersonSet {
    (lo..=hi).map(PersonId).collect()
}

fn hhmm(minutes: u32) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

fn dur(minutes: u32) -> String {
    format!("{}:{:02}", minutes / 60, minutes % 60)
}

fn qual_list<'a>(q: impl IntoIterator<Item = &'a crate::model::Qualification>) -> String {
    q.into_iter().map(|q| q.as_str()).collect::<Vec<_>>().join(" ")
}

fn id_range(lo: usize, hi: usize) -> String {
    if lo == hi {
        lo.to_string()
    } else {
        format!("{lo}-{hi}")
    }
}

/// Groups consecutive equal keys into inclusive 1-based id ranges.
fn grouped<K: PartialEq>(keys: &[K]) -> Vec<(usize, usize, &K)> {
    let mut out: Vec<(usize, usize, &K)> = Vec::new();
    for (k, key) in keys.iter().enumerate() {
        match out.last_mut() {
            Some(last) if last.2 == key => last.1 = k + 1,
            _ => out.push((k + 1, k + 1, key)),
        }
    }
    out
}

/// Text rendering of the four input tables, derived from generated
/// instances. Qualifications are listed in sorted order.
pub fn canonical_dump() -> String {
    let mut out = String::new();
    let (a, _) = build_problem_a(ProblemASpec { num_shifts: 6, num_staff: 4 }).unwrap_or_default();
    out.push_str("[problem-a-shifts]\ntype,start,duration,workload,qualifications\n");
    for s in &a.shifts {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.shift_type,
            hhmm(s.start_time),
            dur(s.duration),
            s.workload,
            qual_list(&s.required_qualifications)
        );
    }
    out.push_str("\n[problem-a-staff]\ntype,desired,qualifications\n");
    for p in &a.personnel {
        let _ = writeln!(out, "{},{},{}", p.id, p.desired_workload, qual_list(&p.qualifications));
    }
    let (b, _) = build_problem_b(ProblemBSpec { num_days: 1 }).unwrap_or_default();
    out.push_str("\n[problem-b-staff]\nid,desired,qualifications\n");
    let keys: Vec<String> =
        b.personnel.iter().map(|p| format!("{},{}", p.desired_workload, qual_list(&p.qualifications))).collect();
    for (lo, hi, key) in grouped(&keys) {
        let _ = writeln!(out, "{},{key}", id_range(lo, hi));
    }
    out.push_str("\n[problem-b-shifts]\nid,type,start,duration,workload,qualifications\n");
    let keys: Vec<String> = b
        .shifts
        .iter()
        .map(|s| {
            let every_other = if s.shift_type == PROBLEM_B_ADMIN.0 { ",every second day from day 1" } else { "" };
            format!(
                "{},{},{},{},{}{every_other}",
                s.shift_type,
                hhmm(s.start_time),
                dur(s.duration),
                s.workload,
                qual_list(&s.required_qualifications)
            )
        })
        .collect();
    for (lo, hi, key) in grouped(&keys) {
        let _ = writeln!(out, "{},{key}", id_range(lo, hi));
    }
    out
}
