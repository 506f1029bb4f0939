//! Pieces shared by the SMT and LP encoders.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::constraints::{GcInstance, ParamError, ShiftSet};
use crate::model::{OverlapCombination, PersonId, RosterInstance, Schedule, ShiftId};

/// Maps each `(shift, person)` assignment to its solver variable name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarIndex {
    pub num_shifts: usize,
    pub names: BTreeMap<(ShiftId, PersonId), String>,
}

impl VarIndex {
    pub fn for_instance(instance: &RosterInstance) -> Self {
        let mut names = BTreeMap::new();
        for s in &instance.shifts {
            for p in &instance.personnel {
                names.insert((s.id, p.id), assignment_var(s.id, p.id));
            }
        }
        VarIndex { num_shifts: instance.shifts.len(), names }
    }

    pub fn name(&self, shift: ShiftId, person: PersonId) -> &str {
        &self.names[&(shift, person)]
    }

    pub fn reverse(&self) -> BTreeMap<&str, (ShiftId, PersonId)> {
        self.names.iter().map(|(k, v)| (v.as_str(), *k)).collect()
    }

    /// Truth value of every assignment variable under `schedule`.
    pub fn valuation(&self, schedule: &Schedule) -> BTreeMap<String, bool> {
        self.names
            .iter()
            .map(|(&(s, p), name)| (name.clone(), schedule.is_assigned(s, p)))
            .collect()
    }
}

pub fn assignment_var(shift: ShiftId, person: PersonId) -> String {
    format!("x_s{}_p{}", shift.0, person.0)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("instance is malformed: {0}")]
    Instance(String),
}

/// Per-instance lookup tables used while emitting constraints.
pub(crate) struct Prep<'a> {
    pub instance: &'a RosterInstance,
    pub horizon: u32,
    pub overlaps: Vec<OverlapCombination>,
}

impl<'a> Prep<'a> {
    pub fn new(instance: &'a RosterInstance, constraints: &[GcInstance]) -> Result<Self, EncodeError> {
        if let Some(d) = instance.validate().first() {
            return Err(EncodeError::Instance(format!("{d}")));
        }
        for c in constraints {
            c.check_against(instance)?;
        }
        Ok(Prep { instance, horizon: instance.horizon_days, overlaps: instance.overlap_combinations() })
    }

    /// `by_day[d]` lists the shifts of `set` starting on day `d`, `d` in `0..=T+1`.
    pub fn by_day(&self, set: &ShiftSet) -> Vec<Vec<ShiftId>> {
        let mut out = vec![Vec::new(); self.horizon as usize + 2];
        for &s in set {
            let d = self.instance.shifts[s.0 as usize - 1].start_day as usize;
            out[d].push(s);
        }
        out
    }

    pub fn workload(&self, s: ShiftId) -> i64 {
        self.instance.shifts[s.0 as usize - 1].workload.hundredths()
    }

    pub fn desired(&self, p: PersonId) -> i64 {
        self.instance.personnel[p.0 as usize - 1].desired_workload.hundredths()
    }

    pub fn qualified(&self, s: ShiftId, p: PersonId) -> bool {
        let inst = self.instance;
        inst.is_qualified(&inst.personnel[p.0 as usize - 1], &inst.shifts[s.0 as usize - 1])
    }

    pub fn shift_type(&self, s: ShiftId) -> &str {
        &self.instance.shifts[s.0 as usize - 1].shift_type
    }

    /// Sorted distinct shift types within `set`.
    pub fn types_in(&self, set: &ShiftSet) -> Vec<&str> {
        let t: BTreeSet<&str> = set.iter().map(|&s| self.shift_type(s)).collect();
        t.into_iter().collect()
    }

    /// Overlapping pairs `person` is not allowed to hold together.
    pub fn disallowed_pairs(&self, person: PersonId) -> impl Iterator<Item = (ShiftId, ShiftId)> + '_ {
        self.overlaps.iter().filter(move |c| !c.allows(person)).map(|c| c.shifts)
    }

    pub fn all_shifts(&self) -> ShiftSet {
        self.instance.shift_ids().collect()
    }
}

/// Smallest integer `>= a / b` for `b > 0`.
pub(crate) fn div_ceil(a: i128, b: i128) -> i128 {
    -(-a).div_euclid(b)
}

/// Largest integer `<= a / b` for `b > 0`.
pub(crate) fn div_floor(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

/// Integer bounds on one person's selected workload (hundredths) implied by
/// the balance rule; `None` when the staff set has no desired workload.
pub(crate) fn balance_bounds(
    total_work: i128,
    total_desired: i128,
    desired: i128,
    tolerance: i128,
) -> Option<(i128, i128)> {
    if total_desired <= 0 {
        return None;
    }
    let scale = i128::from(crate::fixed::SCALE);
    let k = scale * total_desired;
    let lo = div_ceil((scale - tolerance) * total_work * desired, k);
    let hi = div_floor((scale + tolerance) * total_work * desired, k);
    Some((lo, hi))
}
