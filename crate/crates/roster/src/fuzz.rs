//! Tiny seeded instances for differential testing: at most 8 shifts,
//! 3 persons and 4 days, with a random handful of constraints whose
//! parameters are internally consistent (x ≤ y, u ≤ v).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roster_core::constraints::{Bounds, PersonSet, ShiftSet};
use roster_core::model::quals;
use roster_core::{Fixed, Gc, GcInstance, GcKind, OverlapAllowance, Person, PersonId, RosterInstance, Shift, ShiftId};

pub const MAX_SHIFTS: u32 = 8;
pub const MAX_PERSONS: u32 = 3;
pub const MAX_DAYS: u32 = 4;
pub const MAX_CONSTRAINTS: usize = 4;

const TYPES: [&str; 3] = ["D", "E", "N"];
const STARTS: [u32; 5] = [0, 360, 720, 900, 1260];
const DURATIONS: [u32; 3] = [240, 480, 600];

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzCase {
    pub seed: u64,
    pub instance: RosterInstance,
    pub constraints: Vec<GcInstance>,
}

fn subset<T: Copy + Ord>(rng: &mut ChaCha8Rng, items: &[T], nonempty: bool) -> BTreeSet<T> {
    loop {
        let s: BTreeSet<T> = items.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if !nonempty || !s.is_empty() || items.is_empty() {
            return s;
        }
    }
}

fn bounds(rng: &mut ChaCha8Rng, max: u32) -> Bounds {
    let a = rng.gen_range(0..=max);
    let b = rng.gen_range(0..=max);
    Bounds::new(a.min(b), a.max(b))
}

fn random_instance(rng: &mut ChaCha8Rng) -> RosterInstance {
    let days = rng.gen_range(1..=MAX_DAYS);
    let persons = rng.gen_range(1..=MAX_PERSONS);
    let shifts = rng.gen_range(1..=MAX_SHIFTS);
    let personnel = (1..=persons)
        .map(|p| {
            let mut q = vec!["N"];
            if rng.gen_bool(0.4) {
                q.push("A");
            }
            Person {
                id: PersonId(p),
                desired_workload: Fixed::from_int(rng.gen_range(8..=40)),
                qualifications: quals(q),
            }
        })
        .collect();
    let shifts = (1..=shifts)
        .map(|s| Shift {
            id: ShiftId(s),
            shift_type: TYPES.choose(rng).copied().unwrap_or("D").to_string(),
            start_day: rng.gen_range(1..=days),
            start_time: *STARTS.choose(rng).unwrap_or(&0),
            duration: *DURATIONS.choose(rng).unwrap_or(&480),
            workload: Fixed::from_hundredths(rng.gen_range(2..=20) * 50),
            required_qualifications: if rng.gen_bool(0.2) { quals(["N", "A"]) } else { quals(["N"]) },
        })
        .collect();
    let mut inst = RosterInstance { horizon_days: days, personnel, shifts, ..RosterInstance::default() };
    for (a, b) in inst.enumerate_overlap_pairs() {
        if !rng.gen_bool(0.3) {
            continue;
        }
        let (sa, sb) = (inst.shift(a).cloned(), inst.shift(b).cloned());
        let (Some(sa), Some(sb)) = (sa, sb) else { continue };
        let eligible: Vec<PersonId> =
            inst.personnel.iter().filter(|p| inst.is_qualified(p, &sa) && inst.is_qualified(p, &sb)).map(|p| p.id).collect();
        let persons = subset(rng, &eligible, true);
        if !persons.is_empty() {
            inst.allowed_overlap_pairs.push(OverlapAllowance { shift_a: a, shift_b: b, persons });
        }
    }
    inst
}

fn random_constraint(rng: &mut ChaCha8Rng, inst: &RosterInstance, k: usize) -> GcInstance {
    let people: Vec<PersonId> = inst.person_ids().collect();
    let shift_ids: Vec<ShiftId> = inst.shift_ids().collect();
    let staff = |rng: &mut ChaCha8Rng| -> PersonSet { subset(rng, &people, true) };
    let shifts = |rng: &mut ChaCha8Rng| -> ShiftSet {
        if rng.gen_bool(0.3) {
            shift_ids.iter().copied().collect()
        } else {
            subset(rng, &shift_ids, true)
        }
    };
    let n = shift_ids.len() as u32;
    let days = inst.horizon_days;
    let kind = GcKind::ALL[rng.gen_range(0..GcKind::ALL.len())];
    let gc = match kind {
        GcKind::Gc1 => {
            let s = shifts(rng);
            let len = s.len() as u32;
            Gc::Uncovered { staff: staff(rng), shifts: s, bounds: bounds(rng, len) }
        }
        GcKind::Gc2 => {
            let s = shifts(rng);
            let len = s.len() as u32;
            Gc::Unqualified { staff: staff(rng), shifts: s, bounds: bounds(rng, len) }
        }
        GcKind::Gc3 => Gc::Overlap { staff: staff(rng), bounds: bounds(rng, 2) },
        GcKind::Gc4 => {
            let a = Fixed::from_hundredths(rng.gen_range(0..=4) * 25);
            let b = Fixed::from_hundredths(rng.gen_range(0..=4) * 25);
            Gc::WorkloadShare { staff: staff(rng), shifts: shifts(rng), lo: a.min(b), hi: a.max(b) }
        }
        GcKind::Gc5 => Gc::Conditional {
            staff1: staff(rng),
            shifts1: shifts(rng),
            staff2: staff(rng),
            shifts2: shifts(rng),
            bounds: bounds(rng, n.min(3)),
        },
        GcKind::Gc6 => {
            let a = rng.gen_range(1..=days);
            let b = rng.gen_range(1..=days);
            Gc::ConsecutiveDays { staff: staff(rng), shifts: shifts(rng), bounds: Bounds::new(a.min(b), a.max(b)) }
        }
        GcKind::Gc7 => {
            let a = rng.gen_range(1..=days);
            let b = rng.gen_range(1..=days);
            Gc::RestAroundRun {
                staff: staff(rng),
                shifts: shifts(rng),
                before: shifts(rng),
                after: shifts(rng),
                run: Bounds::new(a.min(b), a.max(b)),
                days_before: rng.gen_range(0..=2),
                days_after: rng.gen_range(0..=2),
            }
        }
        GcKind::Gc8 => Gc::SameTypeSequence { staff: staff(rng), shifts: shifts(rng) },
        GcKind::Gc9 => Gc::WorkloadBalance {
            staff: staff(rng),
            shifts: shifts(rng),
            tolerance: Fixed::from_hundredths(rng.gen_range(1..=10) * 10),
        },
    };
    GcInstance::new(format!("f{k} {kind}"), gc)
}

/// The instance and constraints for one seed; identical seeds give
/// identical cases.
pub fn fuzz_case(seed: u64) -> FuzzCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instance = random_instance(&mut rng);
    let count = rng.gen_range(1..=MAX_CONSTRAINTS);
    let constraints = (1..=count).map(|k| random_constraint(&mut rng, &instance, k)).collect();
    FuzzCase { seed, instance, constraints }
}
