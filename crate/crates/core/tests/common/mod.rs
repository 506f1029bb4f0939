#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use roster_core::constraints::{Bounds, PersonSet, ShiftSet};
use roster_core::model::quals;
use roster_core::{Fixed, Gc, GcInstance, GcKind, OverlapAllowance, Person, PersonId, RosterInstance, Schedule, Shift, ShiftId};

/// Decodes a vector of raw numbers into choices. Shrinking the vector
/// toward zeros shrinks the decoded case toward the first option of every
/// choice.
pub struct Genome {
    genes: Vec<u32>,
    at: usize,
}

impl Genome {
    pub fn new(genes: Vec<u32>) -> Self {
        Genome { genes, at: 0 }
    }

    pub fn pick(&mut self, n: u32) -> u32 {
        let g = self.genes.get(self.at).copied().unwrap_or(0);
        self.at += 1;
        if n == 0 {
            0
        } else {
            g % n
        }
    }

    pub fn flip(&mut self, percent: u32) -> bool {
        self.pick(100) < percent
    }

    pub fn subset<T: Copy + Ord>(&mut self, items: &[T]) -> BTreeSet<T> {
        items.iter().copied().filter(|_| self.flip(50)).collect()
    }
}

pub struct Limits {
    pub shifts: u32,
    pub persons: u32,
    pub days: u32,
    pub constraints: u32,
}

pub const TINY: Limits = Limits { shifts: 6, persons: 3, days: 3, constraints: 3 };

const TYPES: [&str; 3] = ["D", "E", "N"];
const STARTS: [u32; 4] = [0, 360, 840, 1320];
const DURATIONS: [u32; 3] = [300, 540, 720];

pub fn instance_from(g: &mut Genome, lim: &Limits) -> RosterInstance {
    let days = 1 + g.pick(lim.days);
    let np = 1 + g.pick(lim.persons);
    let ns = 1 + g.pick(lim.shifts);
    let personnel = (1..=np)
        .map(|p| Person {
            id: PersonId(p),
            desired_workload: Fixed::from_hundredths(i64::from(1 + g.pick(40)) * 50),
            qualifications: if g.flip(40) { quals(["N", "A"]) } else { quals(["N"]) },
        })
        .collect();
    let shifts = (1..=ns)
        .map(|s| Shift {
            id: ShiftId(s),
            shift_type: TYPES[g.pick(3) as usize].to_string(),
            start_day: 1 + g.pick(days),
            start_time: STARTS[g.pick(4) as usize],
            duration: DURATIONS[g.pick(3) as usize],
            workload: Fixed::from_hundredths(i64::from(g.pick(20)) * 50),
            required_qualifications: if g.flip(25) { quals(["N", "A"]) } else { quals(["N"]) },
        })
        .collect();
    let mut inst = RosterInstance { horizon_days: days, personnel, shifts, ..RosterInstance::default() };
    let pairs: Vec<_> = inst.enumerate_overlap_pairs().into_iter().collect();
    for (a, b) in pairs {
        if !g.flip(40) {
            continue;
        }
        let sa = inst.shift(a).cloned().unwrap();
        let sb = inst.shift(b).cloned().unwrap();
        let ok: Vec<PersonId> =
            inst.personnel.iter().filter(|p| inst.is_qualified(p, &sa) && inst.is_qualified(p, &sb)).map(|p| p.id).collect();
        let persons = g.subset(&ok);
        if !persons.is_empty() {
            inst.allowed_overlap_pairs.push(OverlapAllowance { shift_a: a, shift_b: b, persons });
        }
    }
    inst
}

fn bounds(g: &mut Genome, max: u32) -> Bounds {
    // occasionally empty (x > y) to exercise contradictory bounds
    Bounds::new(g.pick(max + 1), g.pick(max + 1))
}

fn ordered(g: &mut Genome, max: u32) -> Bounds {
    let b = bounds(g, max);
    Bounds::new(b.lo.min(b.hi), b.lo.max(b.hi))
}

pub fn constraint_from(g: &mut Genome, inst: &RosterInstance, k: usize) -> GcInstance {
    let persons: Vec<PersonId> = inst.person_ids().collect();
    let shift_ids: Vec<ShiftId> = inst.shift_ids().collect();
    let staff = |g: &mut Genome| -> PersonSet { g.subset(&persons) };
    let shifts = |g: &mut Genome| -> ShiftSet {
        if g.flip(30) {
            shift_ids.iter().copied().collect()
        } else {
            g.subset(&shift_ids)
        }
    };
    let n = shift_ids.len() as u32;
    let t = inst.horizon_days;
    let kind = GcKind::ALL[g.pick(9) as usize];
    let gc = match kind {
        GcKind::Gc1 => Gc::Uncovered { staff: staff(g), shifts: shifts(g), bounds: bounds(g, n.min(3)) },
        GcKind::Gc2 => Gc::Unqualified { staff: staff(g), shifts: shifts(g), bounds: bounds(g, n.min(2)) },
        GcKind::Gc3 => Gc::Overlap { staff: staff(g), bounds: bounds(g, 2) },
        GcKind::Gc4 => {
            let a = Fixed::from_hundredths(i64::from(g.pick(5)) * 25);
            let b = Fixed::from_hundredths(i64::from(g.pick(5)) * 25);
            Gc::WorkloadShare { staff: staff(g), shifts: shifts(g), lo: a.min(b), hi: a.max(b) }
        }
        GcKind::Gc5 => Gc::Conditional {
            staff1: staff(g),
            shifts1: shifts(g),
            staff2: staff(g),
            shifts2: shifts(g),
            bounds: bounds(g, 2),
        },
        GcKind::Gc6 => {
            let b = ordered(g, t);
            Gc::ConsecutiveDays { staff: staff(g), shifts: shifts(g), bounds: b }
        }
        GcKind::Gc7 => {
            let b = ordered(g, t);
            Gc::RestAroundRun {
                staff: staff(g),
                shifts: shifts(g),
                before: shifts(g),
                after: shifts(g),
                run: Bounds::new(b.lo.max(1), b.hi.max(1)),
                days_before: g.pick(3),
                days_after: g.pick(3),
            }
        }
        GcKind::Gc8 => Gc::SameTypeSequence { staff: staff(g), shifts: shifts(g) },
        GcKind::Gc9 => Gc::WorkloadBalance {
            staff: staff(g),
            shifts: shifts(g),
            tolerance: Fixed::from_hundredths(i64::from(g.pick(11)) * 10),
        },
    };
    GcInstance::new(format!("p{k} {kind}"), gc)
}

pub fn case_from(genes: Vec<u32>, lim: &Limits) -> (RosterInstance, Vec<GcInstance>) {
    let mut g = Genome::new(genes);
    let inst = instance_from(&mut g, lim);
    let count = g.pick(lim.constraints + 1) as usize;
    let cons = (1..=count).map(|k| constraint_from(&mut g, &inst, k)).collect();
    (inst, cons)
}

pub fn schedule_from(g: &mut Genome, inst: &RosterInstance) -> Schedule {
    let np = inst.personnel.len() as u32;
    Schedule::from_vec(
        (0..inst.shifts.len())
            .map(|_| {
                let v = g.pick(np + 1);
                (v > 0).then_some(PersonId(v))
            })
            .collect(),
    )
}

pub fn genes() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(any::<u32>(), 160)
}

pub fn tiny_case() -> impl Strategy<Value = (RosterInstance, Vec<GcInstance>)> {
    genes().prop_map(|g| case_from(g, &TINY))
}

/// A case together with one arbitrary schedule for it.
pub fn case_and_schedule() -> impl Strategy<Value = (RosterInstance, Vec<GcInstance>, Schedule)> {
    (genes(), genes()).prop_map(|(a, b)| {
        let (inst, cons) = case_from(a, &TINY);
        let s = schedule_from(&mut Genome::new(b), &inst);
        (inst, cons, s)
    })
}

/// Every complete assignment in odometer order.
pub fn all_schedules(inst: &RosterInstance) -> Vec<Schedule> {
    let n = inst.shifts.len();
    let np = inst.personnel.len() as u32;
    let mut out = Vec::new();
    let mut digits = vec![0u32; n];
    loop {
        out.push(Schedule::from_vec(digits.iter().map(|&d| (d > 0).then_some(PersonId(d))).collect()));
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            digits[i] += 1;
            if digits[i] <= np {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
