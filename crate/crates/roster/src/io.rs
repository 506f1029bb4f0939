//! JSON file formats for instances, constraint lists, schedules and the
//! Problem B parameter file.
//!
//! Times are `"HH:MM"`. Workloads accept JSON numbers or decimal strings
//! with at most two fractional digits. Staff and shift sets in constraint
//! files are `"all"`, an id list, or a filter object resolved against the
//! instance at load time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use roster_core::constraints::{GcParams, PersonFilter, PersonSet, ShiftFilter, ShiftSet};
use roster_core::generators::ProblemBParams;
use roster_core::model::{quals, Qualification};
use roster_core::{Fixed, GcInstance, GcKind, OverlapAllowance, Person, PersonId, RosterInstance, Schedule, Shift, ShiftId};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {err}")]
    Read { path: String, err: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error(transparent)]
    Param(#[from] roster_core::ParamError),
    #[error("{0}")]
    Schedule(String),
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|err| FormatError::Read { path: path.display().to_string(), err })
}

/// Workload value; a JSON number or a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decimal(pub Fixed);

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let h = self.0.hundredths();
        if h % 100 == 0 {
            s.serialize_i64(h / 100)
        } else {
            s.serialize_f64(self.0.to_f64())
        }
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s.clone(),
            other => return Err(de::Error::custom(format!("expected a decimal, got {other}"))),
        };
        Fixed::from_str(text.trim()).map(Decimal).map_err(|e| de::Error::custom(format!("{text:?}: {e}")))
    }
}

/// Minutes after midnight written as `"HH:MM"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockTime(pub u32);

impl fmt::Display for ClockTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 60, self.0 % 60)
    }
}

impl FromStr for ClockTime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected HH:MM within one day, got {s:?}");
        let (h, m) = s.split_once(':').ok_or_else(bad)?;
        if h.len() != 2 || m.len() != 2 {
            return Err(bad());
        }
        let h: u32 = h.parse().map_err(|_| bad())?;
        let m: u32 = m.parse().map_err(|_| bad())?;
        if h > 23 || m > 59 {
            return Err(bad());
        }
        Ok(ClockTime(h * 60 + m))
    }
}

impl Serialize for ClockTime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClockTime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonRecord {
    pub id: u32,
    pub desired_workload: Decimal,
    pub qualifications: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftRecord {
    pub id: u32,
    #[serde(rename = "type")]
    pub shift_type: String,
    pub start_day: u32,
    pub start_time: ClockTime,
    pub duration_minutes: u32,
    pub workload: Decimal,
    pub required_qualifications: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub shift_a: u32,
    pub shift_b: u32,
    pub persons: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub horizon_days: u32,
    pub personnel: Vec<PersonRecord>,
    pub shifts: Vec<ShiftRecord>,
    #[serde(default)]
    pub allowed_overlap_pairs: Vec<PairRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn qual_set(tags: &[String]) -> Result<BTreeSet<Qualification>, FormatError> {
    tags.iter()
        .map(|t| Qualification::new(t.as_str()).ok_or_else(|| FormatError::Instance(format!("empty qualification tag {t:?}"))))
        .collect()
}

fn qual_vec(q: &BTreeSet<Qualification>) -> Vec<String> {
    q.iter().map(|q| q.as_str().to_string()).collect()
}

impl InstanceFile {
    pub fn from_instance(i: &RosterInstance) -> Self {
        InstanceFile {
            horizon_days: i.horizon_days,
            personnel: i
                .personnel
                .iter()
                .map(|p| PersonRecord {
                    id: p.id.0,
                    desired_workload: Decimal(p.desired_workload),
                    qualifications: qual_vec(&p.qualifications),
                })
                .collect(),
            shifts: i
                .shifts
                .iter()
                .map(|s| ShiftRecord {
                    id: s.id.0,
                    shift_type: s.shift_type.clone(),
                    start_day: s.start_day,
                    start_time: ClockTime(s.start_time),
                    duration_minutes: s.duration,
                    workload: Decimal(s.workload),
                    required_qualifications: qual_vec(&s.required_qualifications),
                })
                .collect(),
            allowed_overlap_pairs: i
                .allowed_overlap_pairs
                .iter()
                .map(|a| PairRecord { shift_a: a.shift_a.0, shift_b: a.shift_b.0, persons: a.persons.iter().map(|p| p.0).collect() })
                .collect(),
            notes: i.notes.clone(),
        }
    }

    /// Builds the instance and rejects it if any invariant fails.
    pub fn into_instance(self) -> Result<RosterInstance, FormatError> {
        let personnel = self
            .personnel
            .iter()
            .map(|p| {
                Ok(Person {
                    id: PersonId(p.id),
                    desired_workload: p.desired_workload.0,
                    qualifications: qual_set(&p.qualifications)?,
                })
            })
            .collect::<Result<_, FormatError>>()?;
        let shifts = self
            .shifts
            .iter()
            .map(|s| {
                Ok(Shift {
                    id: ShiftId(s.id),
                    shift_type: s.shift_type.clone(),
                    start_day: s.start_day,
                    start_time: s.start_time.0,
                    duration: s.duration_minutes,
                    workload: s.workload.0,
                    required_qualifications: qual_set(&s.required_qualifications)?,
                })
            })
            .collect::<Result<_, FormatError>>()?;
        let inst = RosterInstance {
            horizon_days: self.horizon_days,
            personnel,
            shifts,
            allowed_overlap_pairs: self
                .allowed_overlap_pairs
                .iter()
                .map(|a| OverlapAllowance {
                    shift_a: ShiftId(a.shift_a),
                    shift_b: ShiftId(a.shift_b),
                    persons: a.persons.iter().map(|&p| PersonId(p)).collect(),
                })
                .collect(),
            notes: self.notes,
        };
        let defects = inst.validate();
        if !defects.is_empty() {
            let msgs: Vec<String> = defects.iter().map(|d| d.to_string()).collect();
            return Err(FormatError::Instance(msgs.join("; ")));
        }
        Ok(inst)
    }
}

pub fn parse_instance(text: &str) -> Result<RosterInstance, FormatError> {
    serde_json::from_str::<InstanceFile>(text)?.into_instance()
}

pub fn instance_to_json(i: &RosterInstance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceFile::from_instance(i)).unwrap_or_default();
    s.push('\n');
    s
}

pub fn load_instance(path: &Path) -> Result<RosterInstance, FormatError> {
    parse_instance(&read_file(path)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftFilterRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by_type: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by_start_day: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by_qualification: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonFilterRecord {
    pub by_qualification: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShiftsSpec {
    Ids(Vec<u32>),
    Keyword(String),
    Filter(ShiftFilterRecord),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StaffSpec {
    Ids(Vec<u32>),
    Keyword(String),
    Filter(PersonFilterRecord),
}

impl ShiftsSpec {
    fn resolve(&self, i: &RosterInstance) -> Result<ShiftSet, FormatError> {
        Ok(match self {
            ShiftsSpec::Ids(ids) => ids.iter().map(|&s| ShiftId(s)).collect(),
            ShiftsSpec::Keyword(k) if k == "all" => i.shift_ids().collect(),
            ShiftsSpec::Keyword(k) => return Err(FormatError::Instance(format!("unknown shift set keyword {k:?}"))),
            ShiftsSpec::Filter(f) => ShiftFilter {
                by_type: f.by_type.as_ref().map(|t| t.iter().cloned().collect()),
                by_start_day: f.by_start_day.as_ref().map(|d| d.iter().copied().collect()),
                by_qualification: f.by_qualification.as_ref().map(|q| quals(q.iter().map(String::as_str))),
            }
            .resolve(i),
        })
    }
}

impl StaffSpec {
    fn resolve(&self, i: &RosterInstance) -> Result<PersonSet, FormatError> {
        Ok(match self {
            StaffSpec::Ids(ids) => ids.iter().map(|&p| PersonId(p)).collect(),
            StaffSpec::Keyword(k) if k == "all" => i.person_ids().collect(),
            StaffSpec::Keyword(k) => return Err(FormatError::Instance(format!("unknown staff set keyword {k:?}"))),
            StaffSpec::Filter(f) => {
                PersonFilter { by_qualification: Some(quals(f.by_qualification.iter().map(String::as_str))) }.resolve(i)
            }
        })
    }
}

/// One constraint as written in a constraint file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintRecord {
    pub kind: String,
    #[serde(default)]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub staff: Option<StaffSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub staff2: Option<StaffSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<ShiftsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts1: Option<ShiftsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts2: Option<ShiftsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Where parameter values come from, keyed by parameter name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, String>,
}

impl ConstraintRecord {
    pub fn from_instance(c: &GcInstance) -> Self {
        let p = c.to_params();
        let staff = |s: Option<PersonSet>| s.map(|s| StaffSpec::Ids(s.iter().map(|p| p.0).collect()));
        let shifts = |s: Option<ShiftSet>| s.map(|s| ShiftsSpec::Ids(s.iter().map(|s| s.0).collect()));
        ConstraintRecord {
            kind: p.kind.to_string(),
            label: p.label,
            staff: staff(p.staff),
            staff2: staff(p.staff2),
            shifts: shifts(p.shifts),
            shifts1: shifts(p.shifts1),
            shifts2: shifts(p.shifts2),
            x: p.x,
            y: p.y,
            u: p.u.map(Decimal),
            v: p.v.map(Decimal),
            n: p.n,
            m: p.m,
            provenance: BTreeMap::new(),
        }
    }

    pub fn resolve(&self, i: &RosterInstance) -> Result<GcInstance, FormatError> {
        let kind: GcKind = self.kind.parse()?;
        let mut p = GcParams::new(kind, self.label.clone());
        p.staff = self.staff.as_ref().map(|s| s.resolve(i)).transpose()?;
        p.staff2 = self.staff2.as_ref().map(|s| s.resolve(i)).transpose()?;
        p.shifts = self.shifts.as_ref().map(|s| s.resolve(i)).transpose()?;
        p.shifts1 = self.shifts1.as_ref().map(|s| s.resolve(i)).transpose()?;
        p.shifts2 = self.shifts2.as_ref().map(|s| s.resolve(i)).transpose()?;
        p.x = self.x;
        p.y = self.y;
        p.u = self.u.map(|d| d.0);
        p.v = self.v.map(|d| d.0);
        p.n = self.n;
        p.m = self.m;
        let gc = GcInstance::try_from(p)?;
        gc.check_against(i)?;
        Ok(gc)
    }
}

pub fn parse_constraints(text: &str, instance: &RosterInstance) -> Result<Vec<GcInstance>, FormatError> {
    let records: Vec<ConstraintRecord> = serde_json::from_str(text)?;
    records.iter().map(|r| r.resolve(instance)).collect()
}

pub fn load_constraints(path: &Path, instance: &RosterInstance) -> Result<Vec<GcInstance>, FormatError> {
    parse_constraints(&read_file(path)?, instance)
}

pub fn constraints_to_json(records: &[ConstraintRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).unwrap_or_default();
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentRecord {
    pub shift: u32,
    pub person: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub assignments: Vec<AssignmentRecord>,
}

pub fn schedule_to_json(s: &Schedule) -> String {
    let f = ScheduleFile {
        assignments: s.assignments().map(|(sh, p)| AssignmentRecord { shift: sh.0, person: p.0 }).collect(),
    };
    let mut out = serde_json::to_string_pretty(&f).unwrap_or_default();
    out.push('\n');
    out
}

pub fn parse_schedule(text: &str, instance: &RosterInstance) -> Result<Schedule, FormatError> {
    let f: ScheduleFile = serde_json::from_str(text)?;
    Schedule::from_pairs(
        instance.shifts.len(),
        f.assignments.iter().map(|a| (ShiftId(a.shift), PersonId(a.person))),
    )
    .map_err(|e| FormatError::Schedule(e.to_string()))
}

/// A value with where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sourced<T> {
    pub value: T,
    pub provenance: String,
}

/// On-disk form of [`ProblemBParams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBParamsFile {
    pub share_lo: Sourced<Decimal>,
    pub share_hi: Sourced<Decimal>,
    pub max_days_in_row: Sourced<u32>,
    pub max_late_days_in_row: Sourced<u32>,
    pub late_types: Sourced<Vec<String>>,
    pub short_run: Sourced<[u32; 2]>,
    pub short_run_rest: Sourced<u32>,
    pub long_run: Sourced<[u32; 2]>,
    pub long_run_rest: Sourced<u32>,
    pub nurse_tolerance: Sourced<Decimal>,
    pub doctor_tolerance: Sourced<Decimal>,
}

/// Problem B parameter file shipped with the crate.
pub const PROBLEM_B_PARAMS_JSON: &str = include_str!("../data/problem_b_params.json");

impl ProblemBParamsFile {
    pub fn into_params(self) -> ProblemBParams {
        ProblemBParams {
            share_lo: self.share_lo.value.0,
            share_hi: self.share_hi.value.0,
            max_days_in_row: self.max_days_in_row.value,
            max_late_days_in_row: self.max_late_days_in_row.value,
            late_types: self.late_types.value,
            short_run: (self.short_run.value[0], self.short_run.value[1]),
            short_run_rest: self.short_run_rest.value,
            long_run: (self.long_run.value[0], self.long_run.value[1]),
            long_run_rest: self.long_run_rest.value,
            nurse_tolerance: self.nurse_tolerance.value.0,
            doctor_tolerance: self.doctor_tolerance.value.0,
        }
    }

    /// Parameter name → provenance tag.
    pub fn provenance(&self) -> BTreeMap<&'static str, &str> {
        BTreeMap::from([
            ("share_lo", self.share_lo.provenance.as_str()),
            ("share_hi", self.share_hi.provenance.as_str()),
            ("max_days_in_row", self.max_days_in_row.provenance.as_str()),
            ("max_late_days_in_row", self.max_late_days_in_row.provenance.as_str()),
            ("late_types", self.late_types.provenance.as_str()),
            ("short_run", self.short_run.provenance.as_str()),
            ("short_run_rest", self.short_run_rest.provenance.as_str()),
            ("long_run", self.long_run.provenance.as_str()),
            ("long_run_rest", self.long_run_rest.provenance.as_str()),
            ("nurse_tolerance", self.nurse_tolerance.provenance.as_str()),
            ("doctor_tolerance", self.doctor_tolerance.provenance.as_str()),
        ])
    }
}

pub fn parse_problem_b_params(text: &str) -> Result<ProblemBParamsFile, FormatError> {
    Ok(serde_json::from_str(text)?)
}

/// Constraint records for Problem B, each tagged with the provenance of the
/// parameter-file values it uses.
pub fn problem_b_records(constraints: &[GcInstance], file: &ProblemBParamsFile) -> Vec<ConstraintRecord> {
    let prov = file.provenance();
    let uses: [(&str, &[(&str, &str)]); 6] = [
        ("B.4 ", &[("u", "share_lo"), ("v", "share_hi")]),
        ("B.8 ", &[("y", "max_days_in_row")]),
        ("B.9 ", &[("y", "max_late_days_in_row"), ("shifts", "late_types")]),
        ("B.10 ", &[("x", "short_run"), ("y", "short_run"), ("n", "short_run_rest"), ("m", "short_run_rest")]),
        ("B.11 ", &[("x", "long_run"), ("y", "long_run"), ("n", "long_run_rest"), ("m", "long_run_rest")]),
        ("B.13 ", &[("v", "nurse_tolerance")]),
    ];
    constraints
        .iter()
        .map(|c| {
            let mut r = ConstraintRecord::from_instance(c);
            let mut fields: Vec<(&str, &str)> = Vec::new();
            for (prefix, f) in &uses {
                if c.label.starts_with(prefix) {
                    fields.extend_from_slice(f);
                }
            }
            if c.label.starts_with("B.14 ") {
                fields.push(("v", "doctor_tolerance"));
            }
            for (field, key) in fields {
                if let Some(p) = prov.get(key) {
                    r.provenance.insert(field.to_string(), (*p).to_string());
                }
            }
            r
        })
        .collect()
}
