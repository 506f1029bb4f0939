//! Rostering domain objects: staff, shifts, overlap allowances and schedules.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fixed::Fixed;

pub const MINUTES_PER_DAY: i64 = 1440;

/// 1-based index of a staff member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersonId(pub u32);

/// 1-based index of a shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftId(pub u32);

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ShiftId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A qualification tag such as `N` (nurse) or `A` (administration).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Qualification(String);

impl Qualification {
    /// Returns `None` for an empty tag.
    pub fn new(tag: impl Into<String>) -> Option<Self> {
        let tag = tag.into();
        if tag.is_empty() {
            None
        } else {
            Some(Qualification(tag))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Qualification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Builds a qualification set from tags, skipping empty strings.
pub fn quals<'a>(tags: impl IntoIterator<Item = &'a str>) -> BTreeSet<Qualification> {
    tags.into_iter().filter_map(Qualification::new).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Person {
    pub id: PersonId,
    /// Hours the person wants to work over the whole horizon.
    pub desired_workload: Fixed,
    pub qualifications: BTreeSet<Qualification>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shift {
    pub id: ShiftId,
    pub shift_type: String,
    /// 1-based day of the horizon.
    pub start_day: u32,
    /// Minutes after midnight, in `[0, 1440)`.
    pub start_time: u32,
    /// Minutes, may cross midnight.
    pub duration: u32,
    /// How burdensome the shift is, in hours. Not necessarily its duration.
    pub workload: Fixed,
    pub required_qualifications: BTreeSet<Qualification>,
}

impl Shift {
    /// Half-open `[start, end)` interval in minutes since day-1 00:00.
    pub fn absolute_interval(&self) -> (i64, i64) {
        let start =
            (i64::from(self.start_day) - 1) * MINUTES_PER_DAY + i64::from(self.start_time);
        (start, start + i64::from(self.duration))
    }

    pub fn overlaps(&self, other: &Shift) -> bool {
        shifts_overlap(self, other)
    }
}

/// True iff the two shifts' half-open intervals intersect. Abutting shifts
/// do not overlap.
pub fn shifts_overlap(a: &Shift, b: &Shift) -> bool {
    let (a0, a1) = a.absolute_interval();
    let (b0, b1) = b.absolute_interval();
    a0 < b1 && b0 < a1
}

/// Staff allowed to hold both shifts of an overlapping pair at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapAllowance {
    pub shift_a: ShiftId,
    pub shift_b: ShiftId,
    pub persons: BTreeSet<PersonId>,
}

impl OverlapAllowance {
    pub fn key(&self) -> (ShiftId, ShiftId) {
        ordered(self.shift_a, self.shift_b)
    }
}

fn ordered(a: ShiftId, b: ShiftId) -> (ShiftId, ShiftId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// An overlapping shift pair together with the staff allowed to take both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapCombination {
    pub shifts: (ShiftId, ShiftId),
    pub allowed: BTreeSet<PersonId>,
}

impl OverlapCombination {
    pub fn allows(&self, person: PersonId) -> bool {
        self.allowed.contains(&person)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RosterInstance {
    pub horizon_days: u32,
    pub personnel: Vec<Person>,
    pub shifts: Vec<Shift>,
    pub allowed_overlap_pairs: Vec<OverlapAllowance>,
    /// Free-text provenance remarks carried along with the instance.
    pub notes: Vec<String>,
}

impl RosterInstance {
    pub fn person(&self, id: PersonId) -> Option<&Person> {
        let p = self.personnel.get((id.0 as usize).checked_sub(1)?)?;
        (p.id == id).then_some(p)
    }

    pub fn shift(&self, id: ShiftId) -> Option<&Shift> {
        let s = self.shifts.get((id.0 as usize).checked_sub(1)?)?;
        (s.id == id).then_some(s)
    }

    pub fn person_ids(&self) -> impl Iterator<Item = PersonId> + '_ {
        self.personnel.iter().map(|p| p.id)
    }

    pub fn shift_ids(&self) -> impl Iterator<Item = ShiftId> + '_ {
        self.shifts.iter().map(|s| s.id)
    }

    pub fn is_qualified(&self, person: &Person, shift: &Shift) -> bool {
        shift.required_qualifications.is_subset(&person.qualifications)
    }

    /// Staff whose qualifications cover every requirement of `shift`.
    pub fn qualified_personnel(&self, shift: &Shift) -> BTreeSet<PersonId> {
        self.personnel
            .iter()
            .filter(|p| self.is_qualified(p, shift))
            .map(|p| p.id)
            .collect()
    }

    /// All unordered pairs of shifts whose intervals intersect, `a < b`.
    ///
    /// Uses a sweep over shifts sorted by start; only pairs are materialized.
    pub fn enumerate_overlap_pairs(&self) -> BTreeSet<(ShiftId, ShiftId)> {
        let mut by_start: Vec<(i64, i64, ShiftId)> = self
            .shifts
            .iter()
            .map(|s| {
                let (a, b) = s.absolute_interval();
                (a, b, s.id)
            })
            .collect();
        by_start.sort_unstable();
        let mut pairs = BTreeSet::new();
        for (k, &(_, end, id)) in by_start.iter().enumerate() {
            for &(start2, end2, id2) in &by_start[k + 1..] {
                if start2 >= end {
                    break;
                }
                // zero-length shifts never overlap anything
                if start2 < end2 {
                    pairs.insert(ordered(id, id2));
                }
            }
        }
        pairs
    }

    /// Overlapping pairs joined with their allowed-person sets (empty when
    /// the instance lists no allowance for the pair).
    pub fn overlap_combinations(&self) -> Vec<OverlapCombination> {
        let allowances: BTreeMap<(ShiftId, ShiftId), &BTreeSet<PersonId>> = self
            .allowed_overlap_pairs
            .iter()
            .map(|a| (a.key(), &a.persons))
            .collect();
        self.enumerate_overlap_pairs()
            .into_iter()
            .map(|pair| OverlapCombination {
                shifts: pair,
                allowed: allowances.get(&pair).map(|s| (*s).clone()).unwrap_or_default(),
            })
            .collect()
    }

    /// Lists every violated instance invariant. Empty means well-formed.
    pub fn validate(&self) -> Vec<Defect> {
        let mut defects = Vec::new();
        if self.horizon_days == 0 {
            defects.push(Defect::EmptyHorizon);
        }
        for (k, p) in self.personnel.iter().enumerate() {
            if p.id.0 as usize != k + 1 {
                defects.push(Defect::PersonIdOutOfSequence { position: k + 1, id: p.id });
            }
            if !p.desired_workload.is_positive() {
                defects.push(Defect::NonPositiveDesiredWorkload(p.id));
            }
        }
        for (k, s) in self.shifts.iter().enumerate() {
            if s.id.0 as usize != k + 1 {
                defects.push(Defect::ShiftIdOutOfSequence { position: k + 1, id: s.id });
            }
            if s.start_day < 1 || s.start_day > self.horizon_days {
                defects.push(Defect::StartDayOutsideHorizon { shift: s.id, day: s.start_day });
            }
            if i64::from(s.start_time) >= MINUTES_PER_DAY {
                defects.push(Defect::StartTimeOutOfRange { shift: s.id, minutes: s.start_time });
            }
            if s.duration == 0 {
                defects.push(Defect::ZeroDuration(s.id));
            }
            if s.workload.hundredths() < 0 {
                defects.push(Defect::NegativeWorkload(s.id));
            }
        }
        let mut seen = BTreeSet::new();
        for a in &self.allowed_overlap_pairs {
            let key = a.key();
            if a.shift_a == a.shift_b {
                defects.push(Defect::PairWithItself(a.shift_a));
                continue;
            }
            if !seen.insert(key) {
                defects.push(Defect::DuplicatePair { shift_a: key.0, shift_b: key.1 });
            }
            let (Some(sa), Some(sb)) = (self.shift(key.0), self.shift(key.1)) else {
                defects.push(Defect::PairUnknownShift { shift_a: key.0, shift_b: key.1 });
                continue;
            };
            if !shifts_overlap(sa, sb) {
                defects.push(Defect::PairNotOverlapping { shift_a: key.0, shift_b: key.1 });
            }
            for &pid in &a.persons {
                match self.person(pid) {
                    None => defects.push(Defect::PairUnknownPerson {
                        shift_a: key.0,
                        shift_b: key.1,
                        person: pid,
                    }),
                    Some(p) if !(self.is_qualified(p, sa) && self.is_qualified(p, sb)) => {
                        defects.push(Defect::PairPersonUnqualified {
                            shift_a: key.0,
                            shift_b: key.1,
                            person: pid,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        defects
    }
}

/// A violated [`RosterInstance`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Defect {
    EmptyHorizon,
    PersonIdOutOfSequence { position: usize, id: PersonId },
    ShiftIdOutOfSequence { position: usize, id: ShiftId },
    NonPositiveDesiredWorkload(PersonId),
    StartDayOutsideHorizon { shift: ShiftId, day: u32 },
    StartTimeOutOfRange { shift: ShiftId, minutes: u32 },
    ZeroDuration(ShiftId),
    NegativeWorkload(ShiftId),
    PairWithItself(ShiftId),
    DuplicatePair { shift_a: ShiftId, shift_b: ShiftId },
    PairUnknownShift { shift_a: ShiftId, shift_b: ShiftId },
    PairNotOverlapping { shift_a: ShiftId, shift_b: ShiftId },
    PairUnknownPerson { shift_a: ShiftId, shift_b: ShiftId, person: PersonId },
    PairPersonUnqualified { shift_a: ShiftId, shift_b: ShiftId, person: PersonId },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::EmptyHorizon => write!(f, "horizon must be at least one day"),
            Defect::PersonIdOutOfSequence { position, id } => {
                write!(f, "person at position {position} has id {id}; ids must be 1..n in order")
            }
            Defect::ShiftIdOutOfSequence { position, id } => {
                write!(f, "shift at position {position} has id {id}; ids must be 1..n in order")
            }
            Defect::NonPositiveDesiredWorkload(p) => {
                write!(f, "person {p}: desired workload must be positive")
            }
            Defect::StartDayOutsideHorizon { shift, day } => {
                write!(f, "shift {shift}: start day {day} outside the horizon")
            }
            Defect::StartTimeOutOfRange { shift, minutes } => {
                write!(f, "shift {shift}: start time {minutes} min is not within one day")
            }
            Defect::ZeroDuration(s) => write!(f, "shift {s}: duration must be positive"),
            Defect::NegativeWorkload(s) => write!(f, "shift {s}: workload must be non-negative"),
            Defect::PairWithItself(s) => write!(f, "overlap pair ({s}, {s}) names one shift twice"),
            Defect::DuplicatePair { shift_a, shift_b } => {
                write!(f, "overlap pair ({shift_a}, {shift_b}) listed more than once")
            }
            Defect::PairUnknownShift { shift_a, shift_b } => {
                write!(f, "overlap pair ({shift_a}, {shift_b}) references an unknown shift")
            }
            Defect::PairNotOverlapping { shift_a, shift_b } => {
                write!(f, "overlap pair ({shift_a}, {shift_b}): shifts do not overlap in time")
            }
            Defect::PairUnknownPerson { shift_a, shift_b, person } => {
                write!(f, "overlap pair ({shift_a}, {shift_b}) allows unknown person {person}")
            }
            Defect::PairPersonUnqualified { shift_a, shift_b, person } => write!(
                f,
                "overlap pair ({shift_a}, {shift_b}): allowed person {person} is not qualified \
                 for both shifts (allowed set must be within the qualified personnel)"
            ),
        }
    }
}

/// At most one person per shift, indexed by shift id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    assignment: Vec<Option<PersonId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("shift {0} does not exist")]
    UnknownShift(ShiftId),
    #[error("shift {shift} assigned to both person {first} and person {second}")]
    MultipleAssignees { shift: ShiftId, first: PersonId, second: PersonId },
}

impl Schedule {
    pub fn empty(num_shifts: usize) -> Self {
        Schedule { assignment: alloc::vec![None; num_shifts] }
    }

    pub fn from_vec(assignment: Vec<Option<PersonId>>) -> Self {
        Schedule { assignment }
    }

    /// Builds a schedule from `(shift, person)` pairs, rejecting a second
    /// assignee for the same shift.
    pub fn from_pairs(
        num_shifts: usize,
        pairs: impl IntoIterator<Item = (ShiftId, PersonId)>,
    ) -> Result<Self, ScheduleError> {
        let mut s = Schedule::empty(num_shifts);
        for (shift, person) in pairs {
            let slot = (shift.0 as usize)
                .checked_sub(1)
                .and_then(|k| s.assignment.get_mut(k))
                .ok_or(ScheduleError::UnknownShift(shift))?;
            match *slot {
                Some(first) if first != person => {
                    return Err(ScheduleError::MultipleAssignees { shift, first, second: person })
                }
                _ => *slot = Some(person),
            }
        }
        Ok(s)
    }

    pub fn num_shifts(&self) -> usize {
        self.assignment.len()
    }

    pub fn get(&self, shift: ShiftId) -> Option<PersonId> {
        (shift.0 as usize).checked_sub(1).and_then(|k| self.assignment.get(k).copied().flatten())
    }

    /// Panics if `shift` is outside the schedule.
    pub fn set(&mut self, shift: ShiftId, person: Option<PersonId>) {
        self.assignment[shift.0 as usize - 1] = person;
    }

    pub fn is_assigned(&self, shift: ShiftId, person: PersonId) -> bool {
        self.get(shift) == Some(person)
    }

    pub fn assignments(&self) -> impl Iterator<Item = (ShiftId, PersonId)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.map(|p| (ShiftId(k as u32 + 1), p)))
    }

    pub fn as_slice(&self) -> &[Option<PersonId>] {
        &self.assignment
    }

    /// Ids referenced by the schedule that the instance does not define,
    /// plus a shape mismatch when the shift counts differ.
    pub fn reference_errors(&self, instance: &RosterInstance) -> Vec<String> {
        use alloc::format;
        let mut errs = Vec::new();
        if self.assignment.len() != instance.shifts.len() {
            errs.push(format!(
                "schedule covers {} shifts, instance has {}",
                self.assignment.len(),
                instance.shifts.len()
            ));
        }
        for (shift, person) in self.assignments() {
            if instance.person(person).is_none() {
                errs.push(format!("shift {shift} assigned to unknown person {person}"));
            }
        }
        errs
    }
}
