//! A second, deliberately plain implementation of the nine constraints,
//! written straight from their definitions, checked against the library
//! evaluator on every assignment of small random instances.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use roster_core::constraints::Gc;
use roster_core::{eval_all, eval_gc, GcInstance, PersonId, RosterInstance, Schedule, Shift, ShiftId};

fn who(s: &Schedule, id: ShiftId) -> Option<PersonId> {
    s.as_slice()[id.0 as usize - 1]
}

fn shift(inst: &RosterInstance, id: ShiftId) -> &Shift {
    &inst.shifts[id.0 as usize - 1]
}

fn qualified(inst: &RosterInstance, p: PersonId, s: &Shift) -> bool {
    let person = &inst.personnel[p.0 as usize - 1];
    s.required_qualifications.iter().all(|q| person.qualifications.contains(q))
}

fn overlapping(a: &Shift, b: &Shift) -> bool {
    let start = |s: &Shift| i64::from(s.start_day - 1) * 1440 + i64::from(s.start_time);
    let (a0, b0) = (start(a), start(b));
    a0 < b0 + i64::from(b.duration) && b0 < a0 + i64::from(a.duration)
}

fn allowed(inst: &RosterInstance, x: ShiftId, y: ShiftId, p: PersonId) -> bool {
    inst.allowed_overlap_pairs.iter().any(|al| {
        ((al.shift_a == x && al.shift_b == y) || (al.shift_a == y && al.shift_b == x)) && al.persons.contains(&p)
    })
}

fn days_worked(inst: &RosterInstance, s: &Schedule, p: PersonId, set: &BTreeSet<ShiftId>) -> BTreeSet<u32> {
    set.iter().filter(|&&id| who(s, id) == Some(p)).map(|&id| shift(inst, id).start_day).collect()
}

/// Maximal runs `(first, last)` found by testing every interval.
fn maximal_runs(worked: &BTreeSet<u32>, t: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for i in 1..=t {
        for j in i..=t {
            let inside = (i..=j).all(|d| worked.contains(&d));
            let left_closed = i == 1 || !worked.contains(&(i - 1));
            let right_closed = j == t || !worked.contains(&(j + 1));
            if inside && left_closed && right_closed {
                out.push((i, j));
            }
        }
    }
    out
}

fn naive(gc: &Gc, inst: &RosterInstance, s: &Schedule) -> bool {
    let t = inst.horizon_days;
    let within = |count: usize, lo: u32, hi: u32| lo as usize <= count && count <= hi as usize;
    match gc {
        Gc::Uncovered { staff, shifts, bounds } => {
            let n = shifts.iter().filter(|&&id| !who(s, id).is_some_and(|p| staff.contains(&p))).count();
            within(n, bounds.lo, bounds.hi)
        }
        Gc::Unqualified { staff, shifts, bounds } => {
            let n = shifts
                .iter()
                .filter(|&&id| who(s, id).is_some_and(|p| staff.contains(&p) && !qualified(inst, p, shift(inst, id))))
                .count();
            within(n, bounds.lo, bounds.hi)
        }
        Gc::Overlap { staff, bounds } => {
            let mut n = 0;
            for a in &inst.shifts {
                for b in inst.shifts.iter().filter(|b| b.id > a.id) {
                    if !overlapping(a, b) {
                        continue;
                    }
                    if let (Some(p), Some(q)) = (who(s, a.id), who(s, b.id)) {
                        if p == q && staff.contains(&p) && !allowed(inst, a.id, b.id, p) {
                            n += 1;
                        }
                    }
                }
            }
            within(n, bounds.lo, bounds.hi)
        }
        Gc::WorkloadShare { staff, shifts, lo, hi } => staff.iter().all(|&p| {
            let mine: Vec<&Shift> = inst.shifts.iter().filter(|sh| who(s, sh.id) == Some(p)).collect();
            let all: i64 = mine.iter().map(|sh| sh.workload.hundredths()).sum();
            let sel: i64 = mine.iter().filter(|sh| shifts.contains(&sh.id)).map(|sh| sh.workload.hundredths()).sum();
            // sel / all against lo and hi, both in hundredths
            all == 0 || (lo.hundredths() * all <= sel * 100 && sel * 100 <= hi.hundredths() * all)
        }),
        Gc::Conditional { staff1, shifts1, staff2, shifts2, bounds } => {
            let fired = shifts1.iter().any(|&id| who(s, id).is_some_and(|p| staff1.contains(&p)));
            let n = shifts2.iter().filter(|&&id| who(s, id).is_some_and(|p| staff2.contains(&p))).count();
            !fired || within(n, bounds.lo, bounds.hi)
        }
        Gc::ConsecutiveDays { staff, shifts, bounds } => staff.iter().all(|&p| {
            let worked = days_worked(inst, s, p, shifts);
            maximal_runs(&worked, t).into_iter().all(|(i, j)| {
                let len = j - i + 1;
                len <= bounds.hi && (len >= bounds.lo || i == 1 || j == t)
            })
        }),
        Gc::RestAroundRun { staff, shifts, before, after, run, days_before, days_after } => staff.iter().all(|&p| {
            let worked = days_worked(inst, s, p, shifts);
            let pre = days_worked(inst, s, p, before);
            let post = days_worked(inst, s, p, after);
            maximal_runs(&worked, t).into_iter().all(|(i, j)| {
                let len = j - i + 1;
                if len < run.lo || len > run.hi {
                    return true;
                }
                let first = i.saturating_sub(*days_before).max(1);
                let last = (j + days_after).min(t);
                (first..i).all(|d| !pre.contains(&d)) && (j + 1..=last).all(|d| !post.contains(&d))
            })
        }),
        Gc::SameTypeSequence { staff, shifts } => shifts.iter().all(|&id| {
            let Some(p) = who(s, id) else { return true };
            let sh = shift(inst, id);
            if !staff.contains(&p) || sh.start_day == 1 {
                return true;
            }
            let yesterday: BTreeSet<&str> = shifts
                .iter()
                .map(|&o| shift(inst, o))
                .filter(|o| o.start_day == sh.start_day - 1 && who(s, o.id) == Some(p))
                .map(|o| o.shift_type.as_str())
                .collect();
            yesterday.is_empty() || yesterday.contains(sh.shift_type.as_str())
        }),
        Gc::WorkloadBalance { staff, shifts, tolerance } => {
            let work: i128 = shifts.iter().map(|&id| i128::from(shift(inst, id).workload.hundredths())).sum();
            let wanted: i128 =
                staff.iter().map(|p| i128::from(inst.personnel[p.0 as usize - 1].desired_workload.hundredths())).sum();
            if wanted == 0 {
                return true;
            }
            let v = i128::from(tolerance.hundredths());
            staff.iter().all(|&p| {
                let d = i128::from(inst.personnel[p.0 as usize - 1].desired_workload.hundredths());
                let w: i128 = shifts
                    .iter()
                    .filter(|&&id| who(s, id) == Some(p))
                    .map(|&id| i128::from(shift(inst, id).workload.hundredths()))
                    .sum();
                // w/d compared with (1 ± v/100) * work/wanted
                let ratio = 100 * w * wanted;
                (100 - v) * work * d <= ratio && ratio <= (100 + v) * work * d
            })
        }
    }
}

fn naive_all(cons: &[GcInstance], inst: &RosterInstance, s: &Schedule) -> bool {
    cons.iter().all(|c| naive(&c.gc, inst, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn accepted_sets_coincide((inst, cons) in common::tiny_case()) {
        for s in common::all_schedules(&inst) {
            let lib = eval_all(&cons, &inst, &s).unwrap().satisfied();
            prop_assert_eq!(lib, naive_all(&cons, &inst, &s), "schedule {:?}", s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn single_constraint_verdicts_coincide((inst, cons, s) in common::case_and_schedule()) {
        for c in &cons {
            let lib = eval_gc(c, &inst, &s).unwrap().satisfied;
            prop_assert_eq!(lib, naive(&c.gc, &inst, &s), "{} on {:?}", c.label, s);
        }
    }
}
