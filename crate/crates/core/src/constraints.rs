//! The nine generic constraints and their direct semantic evaluator.
//!
//! The evaluator is the ground truth every backend is checked against: it
//! reads a complete [`Schedule`] and decides each constraint from its
//! definition, using exact integer arithmetic on hundredths.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::fixed::{Fixed, SCALE};
use crate::model::{PersonId, Qualification, RosterInstance, Schedule, ShiftId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GcKind {
    Gc1,
    Gc2,
    Gc3,
    Gc4,
    Gc5,
    Gc6,
    Gc7,
    Gc8,
    Gc9,
}

impl GcKind {
    pub const ALL: [GcKind; 9] = [
        GcKind::Gc1,
        GcKind::Gc2,
        GcKind::Gc3,
        GcKind::Gc4,
        GcKind::Gc5,
        GcKind::Gc6,
        GcKind::Gc7,
        GcKind::Gc8,
        GcKind::Gc9,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for GcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GC{}", self.number())
    }
}

impl FromStr for GcKind {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix("GC").or_else(|| s.strip_prefix("gc")).unwrap_or(s);
        match digits.parse::<u8>() {
            Ok(n @ 1..=9) => Ok(GcKind::ALL[usize::from(n) - 1]),
            _ => Err(ParamError::UnknownKind(s.to_string())),
        }
    }
}

/// Inclusive integer interval `[lo, hi]`. `lo > hi` is allowed and makes
/// the constraint unsatisfiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub lo: u32,
    pub hi: u32,
}

impl Bounds {
    pub const fn new(lo: u32, hi: u32) -> Self {
        Bounds { lo, hi }
    }

    pub const fn exactly(v: u32) -> Self {
        Bounds { lo: v, hi: v }
    }

    pub fn contains(self, v: u64) -> bool {
        u64::from(self.lo) <= v && v <= u64::from(self.hi)
    }

    pub fn is_empty(self) -> bool {
        self.lo > self.hi
    }
}

pub type PersonSet = BTreeSet<PersonId>;
pub type ShiftSet = BTreeSet<ShiftId>;

/// One generic constraint with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gc {
    /// GC1: number of shifts not covered by anyone from `staff`.
    Uncovered { staff: PersonSet, shifts: ShiftSet, bounds: Bounds },
    /// GC2: number of shifts holding an unqualified person from `staff`.
    Unqualified { staff: PersonSet, shifts: ShiftSet, bounds: Bounds },
    /// GC3: number of disallowed overlapping pairs someone in `staff` holds.
    Overlap { staff: PersonSet, bounds: Bounds },
    /// GC4: per person, share of assigned workload that comes from `shifts`.
    WorkloadShare { staff: PersonSet, shifts: ShiftSet, lo: Fixed, hi: Fixed },
    /// GC5: if anyone in `staff1` works a shift in `shifts1`, count the
    /// assignments of `staff2` to `shifts2`.
    Conditional {
        staff1: PersonSet,
        shifts1: ShiftSet,
        staff2: PersonSet,
        shifts2: ShiftSet,
        bounds: Bounds,
    },
    /// GC6: length of every run of consecutive worked days.
    ConsecutiveDays { staff: PersonSet, shifts: ShiftSet, bounds: Bounds },
    /// GC7: a run whose length is within `run` needs days off around it.
    RestAroundRun {
        staff: PersonSet,
        shifts: ShiftSet,
        before: ShiftSet,
        after: ShiftSet,
        run: Bounds,
        days_before: u32,
        days_after: u32,
    },
    /// GC8: the day before a worked shift is either off or has the same type.
    SameTypeSequence { staff: PersonSet, shifts: ShiftSet },
    /// GC9: workload per desired workload within `tolerance` of the
    /// expected ratio.
    WorkloadBalance { staff: PersonSet, shifts: ShiftSet, tolerance: Fixed },
}

impl Gc {
    pub fn kind(&self) -> GcKind {
        match self {
            Gc::Uncovered { .. } => GcKind::Gc1,
            Gc::Unqualified { .. } => GcKind::Gc2,
            Gc::Overlap { .. } => GcKind::Gc3,
            Gc::WorkloadShare { .. } => GcKind::Gc4,
            Gc::Conditional { .. } => GcKind::Gc5,
            Gc::ConsecutiveDays { .. } => GcKind::Gc6,
            Gc::RestAroundRun { .. } => GcKind::Gc7,
            Gc::SameTypeSequence { .. } => GcKind::Gc8,
            Gc::WorkloadBalance { .. } => GcKind::Gc9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcInstance {
    /// Free-text provenance, e.g. `"A.1 all shifts covered"`.
    pub label: String,
    pub gc: Gc,
}

impl GcInstance {
    pub fn new(label: impl Into<String>, gc: Gc) -> Self {
        GcInstance { label: label.into(), gc }
    }

    pub fn kind(&self) -> GcKind {
        self.gc.kind()
    }

    /// Fails on ids the instance does not define.
    pub fn check_against(&self, instance: &RosterInstance) -> Result<(), ParamError> {
        let p = self.to_params();
        let persons = [p.staff.as_ref(), p.staff2.as_ref()];
        for id in persons.into_iter().flatten().flatten() {
            if instance.person(*id).is_none() {
                return Err(ParamError::UnknownPerson { label: self.label.clone(), id: *id });
            }
        }
        let shifts = [p.shifts.as_ref(), p.shifts1.as_ref(), p.shifts2.as_ref()];
        for id in shifts.into_iter().flatten().flatten() {
            if instance.shift(*id).is_none() {
                return Err(ParamError::UnknownShift { label: self.label.clone(), id: *id });
            }
        }
        Ok(())
    }

    pub fn to_params(&self) -> GcParams {
        let mut p = GcParams::new(self.kind(), self.label.clone());
        match &self.gc {
            Gc::Uncovered { staff, shifts, bounds }
            | Gc::Unqualified { staff, shifts, bounds }
            | Gc::ConsecutiveDays { staff, shifts, bounds } => {
                p.staff = Some(staff.clone());
                p.shifts = Some(shifts.clone());
                p.x = Some(bounds.lo);
                p.y = Some(bounds.hi);
            }
            Gc::Overlap { staff, bounds } => {
                p.staff = Some(staff.clone());
                p.x = Some(bounds.lo);
                p.y = Some(bounds.hi);
            }
            Gc::WorkloadShare { staff, shifts, lo, hi } => {
                p.staff = Some(staff.clone());
                p.shifts = Some(shifts.clone());
                p.u = Some(*lo);
                p.v = Some(*hi);
            }
            Gc::Conditional { staff1, shifts1, staff2, shifts2, bounds } => {
                p.staff = Some(staff1.clone());
                p.shifts1 = Some(shifts1.clone());
                p.staff2 = Some(staff2.clone());
                p.shifts2 = Some(shifts2.clone());
                p.x = Some(bounds.lo);
                p.y = Some(bounds.hi);
            }
            Gc::RestAroundRun { staff, shifts, before, after, run, days_before, days_after } => {
                p.staff = Some(staff.clone());
                p.shifts = Some(shifts.clone());
                p.shifts1 = Some(before.clone());
                p.shifts2 = Some(after.clone());
                p.x = Some(run.lo);
                p.y = Some(run.hi);
                p.n = Some(*days_before);
                p.m = Some(*days_after);
            }
            Gc::SameTypeSequence { staff, shifts } => {
                p.staff = Some(staff.clone());
                p.shifts = Some(shifts.clone());
            }
            Gc::WorkloadBalance { staff, shifts, tolerance } => {
                p.staff = Some(staff.clone());
                p.shifts = Some(shifts.clone());
                p.v = Some(*tolerance);
            }
        }
        p
    }
}

/// Loose parameter bundle mirroring the constraint file layout. Converted
/// into a [`GcInstance`] only when the fields present match the kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcParams {
    pub kind: GcKind,
    pub label: String,
    pub staff: Option<PersonSet>,
    pub staff2: Option<PersonSet>,
    pub shifts: Option<ShiftSet>,
    pub shifts1: Option<ShiftSet>,
    pub shifts2: Option<ShiftSet>,
    pub x: Option<u32>,
    pub y: Option<u32>,
    pub u: Option<Fixed>,
    pub v: Option<Fixed>,
    pub n: Option<u32>,
    pub m: Option<u32>,
}

impl GcParams {
    pub fn new(kind: GcKind, label: impl Into<String>) -> Self {
        GcParams {
            kind,
            label: label.into(),
            staff: None,
            staff2: None,
            shifts: None,
            shifts1: None,
            shifts2: None,
            x: None,
            y: None,
            u: None,
            v: None,
            n: None,
            m: None,
        }
    }

    fn present(&self) -> [(&'static str, bool); 11] {
        [
            ("staff", self.staff.is_some()),
            ("staff2", self.staff2.is_some()),
            ("shifts", self.shifts.is_some()),
            ("shifts1", self.shifts1.is_some()),
            ("shifts2", self.shifts2.is_some()),
            ("x", self.x.is_some()),
            ("y", self.y.is_some()),
            ("u", self.u.is_some()),
            ("v", self.v.is_some()),
            ("n", self.n.is_some()),
            ("m", self.m.is_some()),
        ]
    }
}

/// Fields each kind takes, in file order.
pub fn required_fields(kind: GcKind) -> &'static [&'static str] {
    match kind {
        GcKind::Gc1 | GcKind::Gc2 | GcKind::Gc6 => &["staff", "shifts", "x", "y"],
        GcKind::Gc3 => &["staff", "x", "y"],
        GcKind::Gc4 => &["staff", "shifts", "u", "v"],
        GcKind::Gc5 => &["staff", "staff2", "shifts1", "shifts2", "x", "y"],
        GcKind::Gc7 => &["staff", "shifts", "shifts1", "shifts2", "x", "y", "n", "m"],
        GcKind::Gc8 => &["staff", "shifts"],
        GcKind::Gc9 => &["staff", "shifts", "v"],
    }
}

impl TryFrom<GcParams> for GcInstance {
    type Error = ParamError;

    fn try_from(p: GcParams) -> Result<Self, Self::Error> {
        let required = required_fields(p.kind);
        for (field, present) in p.present() {
            let needed = required.contains(&field);
            if needed && !present {
                return Err(ParamError::Missing { label: p.label, kind: p.kind, field });
            }
            if present && !needed {
                return Err(ParamError::Unexpected { label: p.label, kind: p.kind, field });
            }
        }
        let bounds = || Bounds::new(p.x.unwrap_or(0), p.y.unwrap_or(0));
        let gc = match p.kind {
            GcKind::Gc1 => Gc::Uncovered {
                staff: p.staff.clone().unwrap_or_default(),
                shifts: p.shifts.clone().unwrap_or_default(),
                bounds: bounds(),
            },
            GcKind::Gc2 => Gc::Unqualified {
                staff: p.staff.clone().unwrap_or_default(),
                shifts: p.shifts.clone().unwrap_or_default(),
                bounds: bounds(),
            },
            GcKind::Gc3 => Gc::Overlap { staff: p.staff.clone().unwrap_or_default(), bounds: bounds() },
            GcKind::Gc4 => Gc::WorkloadShare {
                staff: p.staff.clone().unwrap_or_default(),
                shifts: p.shifts.clone().unwrap_or_default(),
                lo: p.u.unwrap_or_default(),
                hi: p.v.unwrap_or_default(),
            },
            GcKind::Gc5 => Gc::Conditional {
                staff1: p.staff.clone().unwrap_or_default(),
                shifts1: p.shifts1.clone().unwrap_or_default(),
                staff2: p.staff2.clone().unwrap_or_default(),
                shifts2: p.shifts2.clone().unwrap_or_default(),
                bounds: bounds(),
            },
            GcKind::Gc6 => Gc::ConsecutiveDays {
                staff: p.staff.clone().unwrap_or_default(),
                shifts: p.shifts.clone().unwrap_or_default(),
                bounds: bounds(),
            },
            GcKind::Gc7 => Gc::RestAroundRun {
                staff: p.staff.clone().unwrap_or_default(),
                shifts: p.shifts.clone().unwrap_or_default(),
                before: p.shifts1.clone().unwrap_or_default(),
                after: p.shifts2.clone().unwrap_or_default(),
                run: bounds(),
                days_before: p.n.unwrap_or(0),
                days_after: p.m.unwrap_or(0),
            },
            GcKind::Gc8 => Gc::SameTypeSequence {
                staff: p.staff.clone().unwrap_or_default(),
                shifts: p.shifts.clone().unwrap_or_default(),
            },
            GcKind::Gc9 => Gc::WorkloadBalance {
                staff: p.staff.clone().unwrap_or_default(),
                shifts: p.shifts.clone().unwrap_or_default(),
                tolerance: p.v.unwrap_or_default(),
            },
        };
        Ok(GcInstance { label: p.label, gc })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("unknown constraint kind {0:?}")]
    UnknownKind(String),
    #[error("constraint {label:?} ({kind}): missing parameter `{field}`")]
    Missing { label: String, kind: GcKind, field: &'static str },
    #[error("constraint {label:?} ({kind}): parameter `{field}` does not apply to this kind")]
    Unexpected { label: String, kind: GcKind, field: &'static str },
    #[error("constraint {label:?}: unknown person {id}")]
    UnknownPerson { label: String, id: PersonId },
    #[error("constraint {label:?}: unknown shift {id}")]
    UnknownShift { label: String, id: ShiftId },
}

/// Selects shifts by attribute. Each present key keeps shifts matching any
/// of its values; keys combine by intersection. No keys selects everything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShiftFilter {
    pub by_type: Option<BTreeSet<String>>,
    pub by_start_day: Option<BTreeSet<u32>>,
    /// Shifts requiring at least one of these.
    pub by_qualification: Option<BTreeSet<Qualification>>,
}

impl ShiftFilter {
    pub fn types<'a>(types: impl IntoIterator<Item = &'a str>) -> Self {
        ShiftFilter { by_type: Some(types.into_iter().map(String::from).collect()), ..Default::default() }
    }

    pub fn days(days: impl IntoIterator<Item = u32>) -> Self {
        ShiftFilter { by_start_day: Some(days.into_iter().collect()), ..Default::default() }
    }

    pub fn and_days(mut self, days: impl IntoIterator<Item = u32>) -> Self {
        self.by_start_day = Some(days.into_iter().collect());
        self
    }

    pub fn resolve(&self, instance: &RosterInstance) -> ShiftSet {
        instance
            .shifts
            .iter()
            .filter(|s| self.by_type.as_ref().is_none_or(|t| t.contains(&s.shift_type)))
            .filter(|s| self.by_start_day.as_ref().is_none_or(|d| d.contains(&s.start_day)))
            .filter(|s| {
                self.by_qualification
                    .as_ref()
                    .is_none_or(|q| q.iter().any(|q| s.required_qualifications.contains(q)))
            })
            .map(|s| s.id)
            .collect()
    }
}

/// Selects staff holding at least one of the listed qualifications.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PersonFilter {
    pub by_qualification: Option<BTreeSet<Qualification>>,
}

impl PersonFilter {
    pub fn resolve(&self, instance: &RosterInstance) -> PersonSet {
        instance
            .personnel
            .iter()
            .filter(|p| {
                self.by_qualification
                    .as_ref()
                    .is_none_or(|q| q.iter().any(|q| p.qualifications.contains(q)))
            })
            .map(|p| p.id)
            .collect()
    }
}

/// Evidence attached to a report entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Shift { shift: ShiftId, person: Option<PersonId> },
    Day { person: PersonId, day: u32 },
    Pair { person: PersonId, shifts: (ShiftId, ShiftId) },
    Person(PersonId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcEval {
    pub satisfied: bool,
    /// Counting kinds report the counted quantity; per-person kinds report
    /// the number of failing checks against bounds `(0, 0)`.
    pub measure: u64,
    pub bounds: (u64, u64),
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportEntry {
    pub label: String,
    /// `None` for the built-in one-person-per-shift rule.
    pub kind: Option<GcKind>,
    pub eval: GcEval,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ViolationReport {
    pub entries: Vec<ReportEntry>,
}

impl ViolationReport {
    pub fn satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.eval.satisfied)
    }

    pub fn violated(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.eval.satisfied)
    }
}

pub const STRUCTURE_LABEL: &str = "at most one person per shift";

/// Evaluates one constraint against a complete schedule.
pub fn eval_gc(
    gc: &GcInstance,
    instance: &RosterInstance,
    schedule: &Schedule,
) -> Result<GcEval, ParamError> {
    let ev = Evaluator::new(instance, core::slice::from_ref(gc))?;
    Ok(ev.eval_index(0, schedule.as_slice(), true))
}

/// Evaluates every constraint plus the structural one-person-per-shift rule.
pub fn eval_all(
    constraints: &[GcInstance],
    instance: &RosterInstance,
    schedule: &Schedule,
) -> Result<ViolationReport, ParamError> {
    Ok(Evaluator::new(instance, constraints)?.report(schedule))
}

/// Days on which `person` starts an assigned shift from `shifts`.
pub fn worked_days(
    person: PersonId,
    shifts: &ShiftSet,
    schedule: &Schedule,
    instance: &RosterInstance,
) -> BTreeSet<u32> {
    shifts
        .iter()
        .filter(|&&s| schedule.is_assigned(s, person))
        .filter_map(|&s| instance.shift(s).map(|s| s.start_day))
        .collect()
}

/// Constraint list compiled against one instance for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    instance: &'a RosterInstance,
    constraints: &'a [GcInstance],
    compiled: Vec<Compiled>,
    /// `qualified[shift_idx][person_idx]`
    qualified: Vec<Vec<bool>>,
    overlaps: Vec<(usize, usize, Vec<bool>)>,
    type_index: Vec<u32>,
}

#[derive(Debug, Clone)]
struct Compiled {
    staff: Vec<bool>,
    staff2: Vec<bool>,
    shifts: Vec<usize>,
    shifts_mask: Vec<bool>,
    shifts1_mask: Vec<bool>,
    shifts2_mask: Vec<bool>,
    shifts1: Vec<usize>,
    shifts2: Vec<usize>,
}

fn person_mask(n: usize, set: &PersonSet) -> Vec<bool> {
    let mut m = vec![false; n];
    for p in set {
        m[p.0 as usize - 1] = true;
    }
    m
}

fn shift_idx(set: &ShiftSet) -> Vec<usize> {
    set.iter().map(|s| s.0 as usize - 1).collect()
}

fn shift_mask(n: usize, set: &ShiftSet) -> Vec<bool> {
    let mut m = vec![false; n];
    for s in set {
        m[s.0 as usize - 1] = true;
    }
    m
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a RosterInstance, constraints: &'a [GcInstance]) -> Result<Self, ParamError> {
        let np = instance.personnel.len();
        let ns = instance.shifts.len();
        let mut compiled = Vec::with_capacity(constraints.len());
        for c in constraints {
            c.check_against(instance)?;
            let p = c.to_params();
            let empty_p = PersonSet::new();
            let empty_s = ShiftSet::new();
            let staff = p.staff.as_ref().unwrap_or(&empty_p);
            let staff2 = p.staff2.as_ref().unwrap_or(&empty_p);
            let shifts = p.shifts.as_ref().unwrap_or(&empty_s);
            let shifts1 = p.shifts1.as_ref().unwrap_or(&empty_s);
            let shifts2 = p.shifts2.as_ref().unwrap_or(&empty_s);
            compiled.push(Compiled {
                staff: person_mask(np, staff),
                staff2: person_mask(np, staff2),
                shifts: shift_idx(shifts),
                shifts_mask: shift_mask(ns, shifts),
                shifts1_mask: shift_mask(ns, shifts1),
                shifts2_mask: shift_mask(ns, shifts2),
                shifts1: shift_idx(shifts1),
                shifts2: shift_idx(shifts2),
            });
        }
        let qualified = instance
            .shifts
            .iter()
            .map(|s| instance.personnel.iter().map(|p| instance.is_qualified(p, s)).collect())
            .collect();
        let overlaps = instance
            .overlap_combinations()
            .into_iter()
            .map(|c| {
                (c.shifts.0 .0 as usize - 1, c.shifts.1 .0 as usize - 1, person_mask(np, &c.allowed))
            })
            .collect();
        let mut types: Vec<&str> = instance.shifts.iter().map(|s| s.shift_type.as_str()).collect();
        types.sort_unstable();
        types.dedup();
        let type_index = instance
            .shifts
            .iter()
            .map(|s| types.binary_search(&s.shift_type.as_str()).unwrap_or(0) as u32)
            .collect();
        Ok(Evaluator { instance, constraints, compiled, qualified, overlaps, type_index })
    }

    pub fn instance(&self) -> &RosterInstance {
        self.instance
    }

    pub fn constraints(&self) -> &[GcInstance] {
        self.constraints
    }

    /// Full report with witnesses.
    pub fn report(&self, schedule: &Schedule) -> ViolationReport {
        let mut entries = Vec::with_capacity(self.constraints.len() + 1);
        let errs = schedule.reference_errors(self.instance);
        entries.push(ReportEntry {
            label: STRUCTURE_LABEL.to_string(),
            kind: None,
            eval: GcEval {
                satisfied: errs.is_empty(),
                measure: errs.len() as u64,
                bounds: (0, 0),
                witnesses: Vec::new(),
            },
        });
        // unknown persons count as unassigned so the remaining entries stay
        // meaningful; the structural entry already fails
        let mut sanitized: Vec<Option<PersonId>> = schedule
            .as_slice()
            .iter()
            .map(|p| p.filter(|&p| self.instance.person(p).is_some()))
            .collect();
        sanitized.resize(self.instance.shifts.len(), None);
        for (k, c) in self.constraints.iter().enumerate() {
            entries.push(ReportEntry {
                label: c.label.clone(),
                kind: Some(c.kind()),
                eval: self.eval_index(k, &sanitized, true),
            });
        }
        ViolationReport { entries }
    }

    /// Fast yes/no check; the schedule must match the instance shape.
    pub fn is_satisfied(&self, assignment: &[Option<PersonId>]) -> bool {
        assignment.len() == self.instance.shifts.len()
            && (0..self.constraints.len()).all(|k| self.eval_index(k, assignment, false).satisfied)
    }

    fn day(&self, s: usize) -> usize {
        self.instance.shifts[s].start_day as usize
    }

    fn workload(&self, s: usize) -> i64 {
        self.instance.shifts[s].workload.hundredths()
    }

    fn horizon(&self) -> usize {
        self.instance.horizon_days as usize
    }

    /// `days[p][d]` for staff in `staff` over shifts in `mask`; index 0 and
    /// `T + 1` stay false.
    fn day_table(&self, staff: &[bool], mask: &[bool], a: &[Option<PersonId>]) -> Vec<Vec<bool>> {
        let t = self.horizon();
        let mut days = vec![Vec::new(); staff.len()];
        for (p, row) in days.iter_mut().enumerate() {
            if staff[p] {
                *row = vec![false; t + 2];
            }
        }
        for (s, who) in a.iter().enumerate() {
            if let Some(p) = who {
                let p = p.0 as usize - 1;
                if mask[s] && staff[p] {
                    days[p][self.day(s)] = true;
                }
            }
        }
        days
    }

    pub fn eval_index(&self, k: usize, a: &[Option<PersonId>], collect: bool) -> GcEval {
        let c = &self.compiled[k];
        let gc = &self.constraints[k].gc;
        let mut witnesses = Vec::new();
        let in_staff = |mask: &[bool], who: Option<PersonId>| who.is_some_and(|p| mask[p.0 as usize - 1]);
        let counting = |measure: u64, bounds: Bounds, witnesses: Vec<Witness>| GcEval {
            satisfied: bounds.contains(measure),
            measure,
            bounds: (u64::from(bounds.lo), u64::from(bounds.hi)),
            witnesses,
        };
        let per_check = |violations: u64, witnesses: Vec<Witness>| GcEval {
            satisfied: violations == 0,
            measure: violations,
            bounds: (0, 0),
            witnesses,
        };
        match gc {
            Gc::Uncovered { bounds, .. } => {
                let mut m = 0;
                for &s in &c.shifts {
                    if !in_staff(&c.staff, a[s]) {
                        m += 1;
                        if collect {
                            witnesses.push(Witness::Shift { shift: ShiftId(s as u32 + 1), person: a[s] });
                        }
                    }
                }
                counting(m, *bounds, witnesses)
            }
            Gc::Unqualified { bounds, .. } => {
                let mut m = 0;
                for &s in &c.shifts {
                    if let Some(p) = a[s] {
                        let pi = p.0 as usize - 1;
                        if c.staff[pi] && !self.qualified[s][pi] {
                            m += 1;
                            if collect {
                                witnesses.push(Witness::Shift { shift: ShiftId(s as u32 + 1), person: Some(p) });
                            }
                        }
                    }
                }
                counting(m, *bounds, witnesses)
            }
            Gc::Overlap { bounds, .. } => {
                let mut m = 0;
                for (sa, sb, allowed) in &self.overlaps {
                    if let (Some(p), Some(q)) = (a[*sa], a[*sb]) {
                        let pi = p.0 as usize - 1;
                        if p == q && c.staff[pi] && !allowed[pi] {
                            m += 1;
                            if collect {
                                witnesses.push(Witness::Pair {
                                    person: p,
                                    shifts: (ShiftId(*sa as u32 + 1), ShiftId(*sb as u32 + 1)),
                                });
                            }
                        }
                    }
                }
                counting(m, *bounds, witnesses)
            }
            Gc::WorkloadShare { lo, hi, .. } => {
                let np = c.staff.len();
                let mut all = vec![0i64; np];
                let mut sel = vec![0i64; np];
                for (s, who) in a.iter().enumerate() {
                    if let Some(p) = who {
                        let pi = p.0 as usize - 1;
                        all[pi] += self.workload(s);
                        if c.shifts_mask[s] {
                            sel[pi] += self.workload(s);
                        }
                    }
                }
                let mut violations = 0;
                for pi in (0..np).filter(|&p| c.staff[p]) {
                    if all[pi] <= 0 {
                        continue;
                    }
                    // lo <= sel/all <= hi, with lo/hi in hundredths
                    let lhs = i128::from(sel[pi]) * i128::from(SCALE);
                    let ok = i128::from(lo.hundredths()) * i128::from(all[pi]) <= lhs
                        && lhs <= i128::from(hi.hundredths()) * i128::from(all[pi]);
                    if !ok {
                        violations += 1;
                        if collect {
                            witnesses.push(Witness::Person(PersonId(pi as u32 + 1)));
                        }
                    }
                }
                per_check(violations, witnesses)
            }
            Gc::Conditional { bounds, .. } => {
                let triggered = c.shifts1.iter().any(|&s| in_staff(&c.staff, a[s]));
                let mut m = 0;
                for &s in &c.shifts2 {
                    if in_staff(&c.staff2, a[s]) {
                        m += 1;
                        if collect && triggered {
                            witnesses.push(Witness::Shift { shift: ShiftId(s as u32 + 1), person: a[s] });
                        }
                    }
                }
                let mut e = counting(m, *bounds, witnesses);
                if !triggered {
                    e.satisfied = true;
                }
                e
            }
            Gc::ConsecutiveDays { bounds, .. } => {
                let t = self.horizon();
                let days = self.day_table(&c.staff, &c.shifts_mask, a);
                let mut violations = 0;
                for (pi, row) in days.iter().enumerate().filter(|(p, _)| c.staff[*p]) {
                    for (start, end) in runs(row, t) {
                        let len = (end - start + 1) as u64;
                        let touches_edge = start == 1 || end == t;
                        let too_long = len > u64::from(bounds.hi);
                        let too_short = !touches_edge && len < u64::from(bounds.lo);
                        if too_long || too_short {
                            violations += 1;
                            if collect {
                                witnesses.push(Witness::Day { person: PersonId(pi as u32 + 1), day: start as u32 });
                            }
                        }
                    }
                }
                per_check(violations, witnesses)
            }
            Gc::RestAroundRun { run, days_before, days_after, .. } => {
                let t = self.horizon();
                let days = self.day_table(&c.staff, &c.shifts_mask, a);
                let before = self.day_table(&c.staff, &c.shifts1_mask, a);
                let after = self.day_table(&c.staff, &c.shifts2_mask, a);
                let mut violations = 0;
                for (pi, row) in days.iter().enumerate().filter(|(p, _)| c.staff[*p]) {
                    for (start, end) in runs(row, t) {
                        let len = (end - start + 1) as u64;
                        if !run.contains(len) {
                            continue;
                        }
                        let lo = start.saturating_sub(*days_before as usize).max(1);
                        let hi_end = (end + *days_after as usize).min(t);
                        let clash_before = (lo..start).find(|&d| before[pi][d]);
                        let clash_after = (end + 1..=hi_end).find(|&d| after[pi][d]);
                        for d in clash_before.into_iter().chain(clash_after) {
                            violations += 1;
                            if collect {
                                witnesses.push(Witness::Day { person: PersonId(pi as u32 + 1), day: d as u32 });
                            }
                        }
                    }
                }
                per_check(violations, witnesses)
            }
            Gc::SameTypeSequence { .. } => {
                let t = self.horizon();
                let np = c.staff.len();
                // types[p][d]: shift types worked by p on day d within the set
                let mut types: Vec<Vec<Vec<u32>>> = vec![Vec::new(); np];
                for (s, who) in a.iter().enumerate() {
                    if let Some(p) = who {
                        let pi = p.0 as usize - 1;
                        if c.shifts_mask[s] && c.staff[pi] {
                            if types[pi].is_empty() {
                                types[pi] = vec![Vec::new(); t + 2];
                            }
                            types[pi][self.day(s)].push(self.type_index[s]);
                        }
                    }
                }
                let mut violations = 0;
                for &s in &c.shifts {
                    let Some(p) = a[s] else { continue };
                    let pi = p.0 as usize - 1;
                    let d = self.day(s);
                    if !c.staff[pi] || d <= 1 {
                        continue;
                    }
                    let prev = &types[pi][d - 1];
                    if !prev.is_empty() && !prev.contains(&self.type_index[s]) {
                        violations += 1;
                        if collect {
                            witnesses.push(Witness::Shift { shift: ShiftId(s as u32 + 1), person: Some(p) });
                        }
                    }
                }
                per_check(violations, witnesses)
            }
            Gc::WorkloadBalance { tolerance, .. } => {
                let np = c.staff.len();
                let total_work: i128 = c.shifts.iter().map(|&s| i128::from(self.workload(s))).sum();
                let total_desired: i128 = (0..np)
                    .filter(|&p| c.staff[p])
                    .map(|p| i128::from(self.instance.personnel[p].desired_workload.hundredths()))
                    .sum();
                let mut sel = vec![0i64; np];
                for &s in &c.shifts {
                    if let Some(p) = a[s] {
                        sel[p.0 as usize - 1] += self.workload(s);
                    }
                }
                let mut violations = 0;
                if total_desired > 0 {
                    let tol = i128::from(tolerance.hundredths());
                    let scale = i128::from(SCALE);
                    for pi in (0..np).filter(|&p| c.staff[p]) {
                        let desired = i128::from(self.instance.personnel[pi].desired_workload.hundredths());
                        // (1 - v) E <= W / D <= (1 + v) E  with  E = total_work / total_desired
                        let lhs = scale * i128::from(sel[pi]) * total_desired;
                        let lo = (scale - tol) * total_work * desired;
                        let hi = (scale + tol) * total_work * desired;
                        if lhs < lo || lhs > hi {
                            violations += 1;
                            if collect {
                                witnesses.push(Witness::Person(PersonId(pi as u32 + 1)));
                            }
                        }
                    }
                }
                per_check(violations, witnesses)
            }
        }
    }
}

/// Maximal runs of `true` in `row[1..=t]`, as inclusive `(start, end)` days.
pub(crate) fn runs(row: &[bool], t: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut d = 1;
    while d <= t {
        if row[d] {
            let start = d;
            while d < t && row[d + 1] {
                d += 1;
            }
            out.push((start, d));
        }
        d += 1;
    }
    out
}
