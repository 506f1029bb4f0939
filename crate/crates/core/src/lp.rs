//! CPLEX-LP encoding of a rostering instance.
//!
//! Assignment variables share their names with the SMT encoding. Counting
//! constraints introduce binary auxiliaries tied to their indicator meaning
//! through big-M row pairs. The feasibility problem is posed as minimising
//! the constant 0.
//!
//! Every auxiliary carries its intended meaning as an [`Ind`] expression,
//! so a schedule can be extended to a full variable valuation and checked
//! row by row with [`LpModel::violated_rows`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::constraints::{Gc, GcInstance, PersonSet, ShiftSet};
use crate::encoding::{balance_bounds, EncodeError, Prep};
pub use crate::encoding::VarIndex;
use crate::fixed::SCALE;
use crate::model::{PersonId, RosterInstance, Schedule, ShiftId};

/// Name of the variable fixed to 0 that stands in for constant rows.
pub const ZERO_VAR: &str = "zero";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(i64, String)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Row {
    /// Evaluates the row; variables missing from `values` count as 0.
    pub fn holds(&self, values: &BTreeMap<String, i64>) -> bool {
        let lhs: i128 = self
            .terms
            .iter()
            .map(|(c, v)| i128::from(*c) * i128::from(values.get(v).copied().unwrap_or(0)))
            .sum();
        self.sense.holds(lhs, i128::from(self.rhs))
    }
}

/// Intended 0/1 meaning of an auxiliary over assignment and earlier
/// auxiliary variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ind {
    Const(bool),
    Var(String),
    Not(alloc::boxed::Box<Ind>),
    And(Vec<Ind>),
    Or(Vec<Ind>),
}

impl Ind {
    fn eval(&self, values: &BTreeMap<String, i64>) -> bool {
        match self {
            Ind::Const(b) => *b,
            Ind::Var(v) => values.get(v).copied().unwrap_or(0) != 0,
            Ind::Not(i) => !i.eval(values),
            Ind::And(v) => v.iter().all(|i| i.eval(values)),
            Ind::Or(v) => v.iter().any(|i| i.eval(values)),
        }
    }
}

/// Big-M constant attached to an auxiliary's linking rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BigM {
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxVar {
    /// 1-based position of the constraint in the emitted list.
    pub constraint: usize,
    pub label: String,
    pub key: String,
    pub name: String,
    pub meaning: Ind,
    pub big_m: Option<BigM>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    pub text: String,
    pub var_index: VarIndex,
    pub aux: Vec<AuxVar>,
    pub rows: Vec<Row>,
}

impl LpModel {
    /// `(constraint label, key) → auxiliary name`.
    pub fn aux_index(&self) -> BTreeMap<(String, String), String> {
        self.aux.iter().map(|a| ((a.label.clone(), a.key.clone()), a.name.clone())).collect()
    }

    /// Values of every variable when the auxiliaries take their intended
    /// indicator meaning under `schedule`.
    pub fn intended_values(&self, schedule: &Schedule) -> BTreeMap<String, i64> {
        let mut values: BTreeMap<String, i64> =
            self.var_index.valuation(schedule).into_iter().map(|(k, v)| (k, i64::from(v))).collect();
        values.insert(ZERO_VAR.to_string(), 0);
        for a in &self.aux {
            let v = a.meaning.eval(&values);
            values.insert(a.name.clone(), i64::from(v));
        }
        values
    }

    pub fn violated_rows(&self, values: &BTreeMap<String, i64>) -> Vec<&Row> {
        self.rows.iter().filter(|r| !r.holds(values)).collect()
    }
}

/// A binary variable or the constant 0.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Lit {
    Zero,
    Var(String),
}

impl Lit {
    fn ind(&self) -> Ind {
        match self {
            Lit::Zero => Ind::Const(false),
            Lit::Var(v) => Ind::Var(v.clone()),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Lit::Zero)
    }
}

struct Emitter<'a> {
    prep: Prep<'a>,
    vars: VarIndex,
    rows: Vec<Row>,
    aux: Vec<AuxVar>,
    k: usize,
    label: String,
}

impl Emitter<'_> {
    fn x(&self, s: ShiftId, p: PersonId) -> Lit {
        Lit::Var(self.vars.name(s, p).to_string())
    }

    fn prefix(&self) -> String {
        format!("c{}", self.k)
    }

    fn new_aux(&mut self, key: String, meaning: Ind, big_m: Option<i64>) -> Lit {
        let name = format!("c{}_{key}", self.k);
        self.aux.push(AuxVar {
            constraint: self.k,
            label: self.label.clone(),
            key,
            name: name.clone(),
            meaning,
            big_m: big_m.map(|value| BigM { value }),
        });
        Lit::Var(name)
    }

    /// Adds `Σ terms sense rhs`, folding constant literals. Rows that hold
    /// trivially are dropped; rows that fail trivially are kept over
    /// [`ZERO_VAR`].
    fn row(&mut self, name: String, terms: Vec<(i64, Lit)>, sense: Sense, rhs: i64) {
        let mut merged: Vec<(i64, String)> = Vec::new();
        for (c, lit) in terms {
            let Lit::Var(v) = lit else { continue };
            match merged.iter_mut().find(|(_, n)| *n == v) {
                Some(slot) => slot.0 += c,
                None => merged.push((c, v)),
            }
        }
        merged.retain(|(c, _)| *c != 0);
        if merged.is_empty() {
            if sense.holds(0, i128::from(rhs)) {
                return;
            }
            merged.push((1, ZERO_VAR.to_string()));
        }
        self.rows.push(Row { name, terms: merged, sense, rhs });
    }

    fn bound_count(&mut self, tag: &str, lits: &[Lit], lo: u32, hi: u32) {
        let p = self.prefix();
        let terms: Vec<(i64, Lit)> = lits.iter().map(|l| (1, l.clone())).collect();
        self.row(format!("{p}_{tag}_lo"), terms.clone(), Sense::Ge, i64::from(lo));
        self.row(format!("{p}_{tag}_hi"), terms, Sense::Le, i64::from(hi));
    }

    /// Linked indicator `v = OR(lits)`: `lit <= v` for each, `v <= Σ lits`.
    fn or_indicator(&mut self, key: String, lits: Vec<Lit>) -> Lit {
        let lits: Vec<Lit> = lits.into_iter().filter(|l| !l.is_zero()).collect();
        if lits.is_empty() {
            return Lit::Zero;
        }
        let meaning = Ind::Or(lits.iter().map(Lit::ind).collect());
        let v = self.new_aux(key.clone(), meaning, None);
        let p = self.prefix();
        for (n, l) in lits.iter().enumerate() {
            self.row(format!("{p}_{key}_ge{n}"), vec![(1, l.clone()), (-1, v.clone())], Sense::Le, 0);
        }
        let mut terms = vec![(1, v.clone())];
        terms.extend(lits.into_iter().map(|l| (-1, l)));
        self.row(format!("{p}_{key}_le"), terms, Sense::Le, 0);
        v
    }

    fn worked_days(&mut self, staff: &PersonSet, shifts: &ShiftSet) -> BTreeMap<PersonId, Vec<Lit>> {
        let by_day = self.prep.by_day(shifts);
        let t = self.prep.horizon as usize;
        let mut out = BTreeMap::new();
        for &p in staff {
            let mut row = vec![Lit::Zero; t + 2];
            for d in 1..=t {
                let lits = by_day[d].iter().map(|&s| self.x(s, p)).collect();
                row[d] = self.or_indicator(format!("w_p{}_d{d}", p.0), lits);
            }
            out.insert(p, row);
        }
        out
    }

    fn emit(&mut self, c: &GcInstance) {
        let p = self.prefix();
        let t = self.prep.horizon as usize;
        match &c.gc {
            Gc::Uncovered { staff, shifts, bounds } => {
                let m = staff.len().max(1) as i64;
                let mut zs = Vec::new();
                for &s in shifts {
                    let xs: Vec<Lit> = staff.iter().map(|&q| self.x(s, q)).collect();
                    let meaning = Ind::Not(alloc::boxed::Box::new(Ind::Or(xs.iter().map(Lit::ind).collect())));
                    let z = self.new_aux(format!("z_s{}", s.0), meaning, Some(m));
                    // 1 - z <= Σx <= M (1 - z)
                    let mut lo: Vec<(i64, Lit)> = xs.iter().map(|x| (1, x.clone())).collect();
                    lo.push((1, z.clone()));
                    self.row(format!("{p}_z_s{}_a", s.0), lo, Sense::Ge, 1);
                    let mut hi: Vec<(i64, Lit)> = xs.iter().map(|x| (1, x.clone())).collect();
                    hi.push((m, z.clone()));
                    self.row(format!("{p}_z_s{}_b", s.0), hi, Sense::Le, m);
                    zs.push(z);
                }
                self.bound_count("count", &zs, bounds.lo, bounds.hi);
            }
            Gc::Unqualified { staff, shifts, bounds } => {
                let m = staff.len().max(1) as i64;
                let mut zs = Vec::new();
                for &s in shifts {
                    let xs: Vec<Lit> =
                        staff.iter().filter(|&&q| !self.prep.qualified(s, q)).map(|&q| self.x(s, q)).collect();
                    if xs.is_empty() {
                        continue;
                    }
                    let meaning = Ind::Or(xs.iter().map(Lit::ind).collect());
                    let z = self.new_aux(format!("z_s{}", s.0), meaning, Some(m));
                    // z <= Σx <= M z
                    let mut lo: Vec<(i64, Lit)> = xs.iter().map(|x| (1, x.clone())).collect();
                    lo.push((-1, z.clone()));
                    self.row(format!("{p}_z_s{}_a", s.0), lo, Sense::Ge, 0);
                    let mut hi: Vec<(i64, Lit)> = xs.iter().map(|x| (1, x.clone())).collect();
                    hi.push((-m, z.clone()));
                    self.row(format!("{p}_z_s{}_b", s.0), hi, Sense::Le, 0);
                    zs.push(z);
                }
                self.bound_count("count", &zs, bounds.lo, bounds.hi);
            }
            Gc::Overlap { staff, bounds } => {
                let mut zs = Vec::new();
                for &q in staff {
                    let pairs: Vec<_> = self.prep.disallowed_pairs(q).collect();
                    for (a, b) in pairs {
                        let (xa, xb) = (self.x(a, q), self.x(b, q));
                        let meaning = Ind::And(vec![xa.ind(), xb.ind()]);
                        let key = format!("z_s{}_s{}_p{}", a.0, b.0, q.0);
                        let z = self.new_aux(key.clone(), meaning, None);
                        // 2 z <= xa + xb <= z + 1
                        self.row(
                            format!("{p}_{key}_a"),
                            vec![(1, xa.clone()), (1, xb.clone()), (-2, z.clone())],
                            Sense::Ge,
                            0,
                        );
                        self.row(format!("{p}_{key}_b"), vec![(1, xa), (1, xb), (-1, z.clone())], Sense::Le, 1);
                        zs.push(z);
                    }
                }
                self.bound_count("count", &zs, bounds.lo, bounds.hi);
            }
            Gc::WorkloadShare { staff, shifts, lo, hi } => {
                let all = self.prep.all_shifts();
                let total: i64 = all.iter().map(|&s| self.prep.workload(s)).sum();
                let (u, v) = (lo.hundredths(), hi.hundredths());
                let m_link = total.max(1);
                let m_ratio = (u.abs().max(v.abs()).max(SCALE) * total).max(1);
                for &q in staff {
                    let paid: Vec<ShiftId> = all.iter().copied().filter(|&s| self.prep.workload(s) > 0).collect();
                    if paid.is_empty() {
                        continue;
                    }
                    let meaning = Ind::Or(paid.iter().map(|&s| self.x(s, q).ind()).collect());
                    let b = self.new_aux(format!("b_p{}", q.0), meaning, Some(m_link));
                    let wall: Vec<(i64, Lit)> = paid.iter().map(|&s| (self.prep.workload(s), self.x(s, q))).collect();
                    // W_all <= M b,  b <= W_all
                    let mut r = wall.clone();
                    r.push((-m_link, b.clone()));
                    self.row(format!("{p}_b_p{}_a", q.0), r, Sense::Le, 0);
                    let mut r: Vec<(i64, Lit)> = wall.iter().map(|(c, x)| (-c, x.clone())).collect();
                    r.push((1, b.clone()));
                    self.row(format!("{p}_b_p{}_b", q.0), r, Sense::Le, 0);
                    // u W_all - M(1-b) <= W_S <= v W_all + M(1-b), scaled by 100
                    let ratio = |e: &Self, coef: i64| -> Vec<(i64, Lit)> {
                        paid.iter()
                            .map(|&s| {
                                let w = e.prep.workload(s);
                                let sel = if shifts.contains(&s) { SCALE * w } else { 0 };
                                (sel - coef * w, e.x(s, q))
                            })
                            .collect()
                    };
                    let mut r = ratio(self, u);
                    r.push((-m_ratio, b.clone()));
                    self.row(format!("{p}_share_p{}_lo", q.0), r, Sense::Ge, -m_ratio);
                    let mut r = ratio(self, v);
                    r.push((m_ratio, b));
                    self.row(format!("{p}_share_p{}_hi", q.0), r, Sense::Le, m_ratio);
                }
            }
            Gc::Conditional { staff1, shifts1, staff2, shifts2, bounds } => {
                let trig: Vec<Lit> =
                    shifts1.iter().flat_map(|&s| staff1.iter().map(move |&q| (s, q))).map(|(s, q)| self.x(s, q)).collect();
                if trig.is_empty() {
                    return;
                }
                let counted: Vec<Lit> =
                    shifts2.iter().flat_map(|&s| staff2.iter().map(move |&q| (s, q))).map(|(s, q)| self.x(s, q)).collect();
                let m_trig = trig.len() as i64;
                let meaning = Ind::Or(trig.iter().map(Lit::ind).collect());
                let g = self.new_aux("g".to_string(), meaning, Some(m_trig));
                let mut r: Vec<(i64, Lit)> = trig.iter().map(|x| (1, x.clone())).collect();
                r.push((-m_trig, g.clone()));
                self.row(format!("{p}_g_a"), r, Sense::Le, 0);
                let mut r: Vec<(i64, Lit)> = trig.into_iter().map(|x| (-1, x)).collect();
                r.push((1, g.clone()));
                self.row(format!("{p}_g_b"), r, Sense::Le, 0);
                // lo g <= Σ <= hi + M (1 - g)
                let m_cnt = counted.len() as i64;
                let mut r: Vec<(i64, Lit)> = counted.iter().map(|x| (1, x.clone())).collect();
                r.push((-i64::from(bounds.lo), g.clone()));
                self.row(format!("{p}_count_lo"), r, Sense::Ge, 0);
                let mut r: Vec<(i64, Lit)> = counted.into_iter().map(|x| (1, x)).collect();
                r.push((m_cnt, g));
                self.row(format!("{p}_count_hi"), r, Sense::Le, i64::from(bounds.hi) + m_cnt);
            }
            Gc::ConsecutiveDays { staff, shifts, bounds } => {
                let worked = self.worked_days(staff, shifts);
                let y = bounds.hi as usize;
                let x = bounds.lo as usize;
                for (q, w) in &worked {
                    for d in 1..=t {
                        if d + y > t {
                            break;
                        }
                        let terms = (d..=d + y).map(|e| (1, w[e].clone())).collect();
                        self.row(format!("{p}_win_p{}_d{d}", q.0), terms, Sense::Le, y as i64);
                    }
                    if x < 2 {
                        continue;
                    }
                    for d in 2..=t {
                        if w[d].is_zero() {
                            continue;
                        }
                        let meaning = Ind::And(vec![w[d].ind(), Ind::Not(alloc::boxed::Box::new(w[d - 1].ind()))]);
                        let key = format!("s_p{}_d{d}", q.0);
                        let s = self.new_aux(key.clone(), meaning, None);
                        // s >= w_d - w_{d-1}
                        self.row(
                            format!("{p}_{key}_start"),
                            vec![(1, s.clone()), (-1, w[d].clone()), (1, w[d - 1].clone())],
                            Sense::Ge,
                            0,
                        );
                        for e in (d + 1)..=(d + x - 1).min(t) {
                            self.row(
                                format!("{p}_{key}_len{}", e - d),
                                vec![(1, s.clone()), (-1, w[e].clone())],
                                Sense::Le,
                                0,
                            );
                        }
                    }
                }
            }
            Gc::RestAroundRun { staff, shifts, before, after, run, days_before, days_after } => {
                let worked = self.worked_days(staff, shifts);
                let before_by_day = self.prep.by_day(before);
                let after_by_day = self.prep.by_day(after);
                let (n, m) = (*days_before as usize, *days_after as usize);
                for (&q, w) in &worked {
                    for d in 1..=t {
                        for len in (run.lo.max(1) as usize)..=(run.hi as usize) {
                            let end = d + len - 1;
                            if end > t {
                                break;
                            }
                            if (d..=end).any(|e| w[e].is_zero()) {
                                continue;
                            }
                            let mut guarded = Vec::new();
                            for e in d.saturating_sub(n).max(1)..d {
                                guarded.extend(before_by_day[e].iter().map(|&s| self.x(s, q)));
                            }
                            for e in (end + 1)..=(end + m).min(t) {
                                guarded.extend(after_by_day[e].iter().map(|&s| self.x(s, q)));
                            }
                            if guarded.is_empty() {
                                continue;
                            }
                            let prev = if d > 1 { w[d - 1].clone() } else { Lit::Zero };
                            let next = if end < t { w[end + 1].clone() } else { Lit::Zero };
                            let mut conj: Vec<Ind> = (d..=end).map(|e| w[e].ind()).collect();
                            conj.push(Ind::Not(alloc::boxed::Box::new(prev.ind())));
                            conj.push(Ind::Not(alloc::boxed::Box::new(next.ind())));
                            let key = format!("r_p{}_d{d}_l{len}", q.0);
                            let r = self.new_aux(key.clone(), Ind::And(conj), None);
                            // r >= Σ w - (L - 1) - w_{d-1} - w_{d+L}
                            let mut terms = vec![(1, r.clone())];
                            terms.extend((d..=end).map(|e| (-1, w[e].clone())));
                            terms.push((1, prev.clone()));
                            terms.push((1, next.clone()));
                            self.row(format!("{p}_{key}_lb"), terms, Sense::Ge, 1 - len as i64);
                            for e in d..=end {
                                self.row(
                                    format!("{p}_{key}_in{}", e - d),
                                    vec![(1, r.clone()), (-1, w[e].clone())],
                                    Sense::Le,
                                    0,
                                );
                            }
                            self.row(format!("{p}_{key}_pre"), vec![(1, r.clone()), (1, prev)], Sense::Le, 1);
                            self.row(format!("{p}_{key}_post"), vec![(1, r.clone()), (1, next)], Sense::Le, 1);
                            for (i, x) in guarded.into_iter().enumerate() {
                                self.row(format!("{p}_{key}_off{i}"), vec![(1, x), (1, r.clone())], Sense::Le, 1);
                            }
                        }
                    }
                }
            }
            Gc::SameTypeSequence { staff, shifts } => {
                let types: Vec<String> = self.prep.types_in(shifts).into_iter().map(String::from).collect();
                let by_day = self.prep.by_day(shifts);
                for &q in staff {
                    let mut typed = vec![vec![Lit::Zero; types.len()]; t + 2];
                    let mut any = vec![Lit::Zero; t + 2];
                    for d in 1..=t {
                        for (ti, ty) in types.iter().enumerate() {
                            let lits = by_day[d]
                                .iter()
                                .filter(|&&s| self.prep.shift_type(s) == ty)
                                .map(|&s| self.x(s, q))
                                .collect();
                            typed[d][ti] = self.or_indicator(format!("a_p{}_d{d}_t{ti}", q.0), lits);
                        }
                        any[d] = self.or_indicator(format!("any_p{}_d{d}", q.0), typed[d].clone());
                    }
                    for d in 2..=t {
                        if any[d - 1].is_zero() {
                            continue;
                        }
                        for ti in 0..types.len() {
                            if typed[d][ti].is_zero() {
                                continue;
                            }
                            // a_d <= a_{d-1} + (1 - any_{d-1})
                            self.row(
                                format!("{p}_seq_p{}_d{d}_t{ti}", q.0),
                                vec![(1, typed[d][ti].clone()), (-1, typed[d - 1][ti].clone()), (1, any[d - 1].clone())],
                                Sense::Le,
                                1,
                            );
                        }
                    }
                }
            }
            Gc::WorkloadBalance { staff, shifts, tolerance } => {
                let total_work: i128 = shifts.iter().map(|&s| i128::from(self.prep.workload(s))).sum();
                let total_desired: i128 = staff.iter().map(|&q| i128::from(self.prep.desired(q))).sum();
                for &q in staff {
                    let Some((lo, hi)) = balance_bounds(
                        total_work,
                        total_desired,
                        i128::from(self.prep.desired(q)),
                        i128::from(tolerance.hundredths()),
                    ) else {
                        continue;
                    };
                    let terms: Vec<(i64, Lit)> = shifts.iter().map(|&s| (self.prep.workload(s), self.x(s, q))).collect();
                    let clamp = |v: i128| v.clamp(i128::from(i64::MIN), i128::from(i64::MAX)) as i64;
                    if lo > 0 {
                        self.row(format!("{p}_bal_p{}_lo", q.0), terms.clone(), Sense::Ge, clamp(lo));
                    }
                    self.row(format!("{p}_bal_p{}_hi", q.0), terms, Sense::Le, clamp(hi));
                }
            }
        }
    }
}

struct Wrapped<'a> {
    out: &'a mut String,
    col: usize,
}

impl Wrapped<'_> {
    fn token(&mut self, tok: &str) {
        if self.col + tok.len() + 1 > 78 && self.col > 0 {
            self.out.push_str("\n   ");
            self.col = 3;
        }
        self.out.push(' ');
        self.out.push_str(tok);
        self.col += tok.len() + 1;
    }
}

fn render(vars: &VarIndex, aux: &[AuxVar], rows: &[Row], header: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {header}");
    out.push_str("Minimize\n obj: 0 zero\nSubject To\n");
    for r in rows {
        let _ = write!(out, " {}:", r.name);
        let mut w = Wrapped { col: r.name.len() + 2, out: &mut out };
        for (k, (c, v)) in r.terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if k > 0 || *c < 0 {
                w.token(sign);
            }
            if c.abs() == 1 {
                w.token(v);
            } else {
                w.token(&format!("{} {v}", c.abs()));
            }
        }
        w.token(r.sense.as_str());
        w.token(&r.rhs.to_string());
        out.push('\n');
    }
    let _ = writeln!(out, "Bounds\n {ZERO_VAR} = 0\nBinary");
    let mut w = Wrapped { col: 0, out: &mut out };
    for name in vars.names.values().chain(aux.iter().map(|a| &a.name)) {
        w.token(name);
    }
    out.push_str("\nEnd\n");
    out
}

/// Compiles the instance and its constraints into a CPLEX-LP model. Output
/// is a pure function of the inputs.
pub fn emit_lp(instance: &RosterInstance, constraints: &[GcInstance]) -> Result<LpModel, EncodeError> {
    let prep = Prep::new(instance, constraints)?;
    let vars = VarIndex::for_instance(instance);
    let mut e = Emitter { prep, vars, rows: Vec::new(), aux: Vec::new(), k: 0, label: String::new() };
    for s in &instance.shifts {
        let terms = instance.personnel.iter().map(|q| (1, e.x(s.id, q.id))).collect();
        e.row(format!("one_s{}", s.id.0), terms, Sense::Le, 1);
    }
    for (k, c) in constraints.iter().enumerate() {
        e.k = k + 1;
        e.label = c.label.clone();
        e.emit(c);
    }
    debug_assert_eq!(e.rows.iter().map(|r| &r.name).collect::<BTreeSet<_>>().len(), e.rows.len());
    let header = format!(
        "roster feasibility: {} shifts, {} staff, {} days, {} constraints",
        instance.shifts.len(),
        instance.personnel.len(),
        instance.horizon_days,
        constraints.len()
    );
    let text = render(&e.vars, &e.aux, &e.rows, &header);
    Ok(LpModel { text, var_index: e.vars, aux: e.aux, rows: e.rows })
}

/// Tolerance within which a reported value counts as an exact 0 or 1.
pub const INTEGRALITY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolutionError {
    #[error("unparseable solution line {line}: {text}")]
    Syntax { line: usize, text: String },
    #[error("binary {name} reported as {value}, not within tolerance of 0 or 1")]
    NotIntegral { name: String, value: f64 },
    #[error("solution assigns shift {shift} to persons {first} and {second}; encoder contract violated")]
    AtMostOneViolated { shift: ShiftId, first: PersonId, second: PersonId },
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name)?;
        for (c, v) in &self.terms {
            write!(f, " {c:+} {v}")?;
        }
        write!(f, " {} {}", self.sense.as_str(), self.rhs)
    }
}

/// Reads a solution listing. Accepts `name value` lines as well as the
/// `index name value reduced-cost` lines CBC writes; a leading status line
/// is skipped. Assignment variables not listed are 0.
pub fn parse_solution(raw: &str, var_index: &VarIndex) -> Result<Schedule, SolutionError> {
    let reverse = var_index.reverse();
    let mut schedule = Schedule::empty(var_index.num_shifts);
    let mut seen_values = false;
    for (n, line) in raw.lines().enumerate() {
        let line = line.trim().trim_start_matches("**").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let pair = match toks.as_slice() {
            [idx, name, value, ..] if idx.parse::<usize>().is_ok() => Some((*name, *value)),
            [name, value] => Some((*name, *value)),
            _ => None,
        };
        let parsed = pair.and_then(|(name, value)| value.parse::<f64>().ok().map(|v| (name, v)));
        let Some((name, value)) = parsed else {
            if !seen_values && n == raw.lines().position(|l| !l.trim().is_empty()).unwrap_or(0) {
                continue;
            }
            return Err(SolutionError::Syntax { line: n + 1, text: line.to_string() });
        };
        seen_values = true;
        let Some(&(shift, person)) = reverse.get(name) else { continue };
        let one = if (value - 1.0).abs() <= INTEGRALITY_TOL {
            true
        } else if value.abs() <= INTEGRALITY_TOL {
            false
        } else {
            return Err(SolutionError::NotIntegral { name: name.to_string(), value });
        };
        if one {
            if let Some(first) = schedule.get(shift) {
                let (first, second) = if first < person { (first, person) } else { (person, first) };
                return Err(SolutionError::AtMostOneViolated { shift, first, second });
            }
            schedule.set(shift, Some(person));
        }
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Bounds;
    use crate::fixed::Fixed;
    use crate::model::{quals, Person, Shift};

    fn inst(shifts: u32, persons: u32) -> RosterInstance {
        RosterInstance {
            horizon_days: 1,
            personnel: (1..=persons)
                .map(|p| Person { id: PersonId(p), desired_workload: Fixed::from_int(100), qualifications: quals(["N"]) })
                .collect(),
            shifts: (1..=shifts)
                .map(|s| Shift {
                    id: ShiftId(s),
                    shift_type: "D".into(),
                    start_day: 1,
                    start_time: (360 + 600 * (s - 1)) % 1440,
                    duration: 540,
                    workload: Fixed::from_int(9),
                    required_qualifications: quals(["N"]),
                })
                .collect(),
            ..Default::default()
        }
    }

    fn ps(ids: &[u32]) -> PersonSet {
        ids.iter().map(|&i| PersonId(i)).collect()
    }

    fn ss(ids: &[u32]) -> ShiftSet {
        ids.iter().map(|&i| ShiftId(i)).collect()
    }

    #[test]
    fn no_constraints_gives_only_one_person_rows() {
        let m = emit_lp(&inst(2, 1), &[]).unwrap();
        assert_eq!(m.rows.len(), 2);
        assert!(m.rows.iter().all(|r| r.name.starts_with("one_s")));
        assert!(m.aux.is_empty());
        assert!(m.text.contains("Minimize\n obj: 0 zero\n"));
        assert!(m.text.trim_end().ends_with("End"));
    }

    #[test]
    fn gc1_three_staff_uses_m_three() {
        let gc = GcInstance::new(
            "cover",
            Gc::Uncovered { staff: ps(&[1, 2, 3]), shifts: ss(&[1]), bounds: Bounds::exactly(0) },
        );
        let m = emit_lp(&inst(1, 3), &[gc]).unwrap();
        assert_eq!(m.aux.len(), 1);
        assert_eq!(m.aux[0].big_m, Some(BigM { value: 3 }));
        let hi = m.rows.iter().find(|r| r.name == "c1_count_hi").unwrap();
        assert_eq!((hi.terms.clone(), hi.rhs), (vec![(1, "c1_z_s1".to_string())], 0));
        // z = 0 forces the coverage row Σx >= 1
        let a = m.rows.iter().find(|r| r.name == "c1_z_s1_a").unwrap();
        assert_eq!(a.sense, Sense::Ge);
        assert_eq!(a.rhs, 1);
    }

    #[test]
    fn gc3_rows_match_pair_linearisation() {
        let mut i = inst(2, 1);
        i.shifts[1].start_time = 400;
        let gc = GcInstance::new("overlap", Gc::Overlap { staff: ps(&[1]), bounds: Bounds::exactly(0) });
        let m = emit_lp(&i, &[gc]).unwrap();
        let a = m.rows.iter().find(|r| r.name == "c1_z_s1_s2_p1_a").unwrap();
        assert_eq!(a.to_string(), "c1_z_s1_s2_p1_a: +1 x_s1_p1 +1 x_s2_p1 -2 c1_z_s1_s2_p1 >= 0");
        let b = m.rows.iter().find(|r| r.name == "c1_z_s1_s2_p1_b").unwrap();
        assert_eq!(b.to_string(), "c1_z_s1_s2_p1_b: +1 x_s1_p1 +1 x_s2_p1 -1 c1_z_s1_s2_p1 <= 1");
    }

    #[test]
    fn trivially_false_rows_use_zero_var() {
        let gc = GcInstance::new("empty", Gc::Overlap { staff: ps(&[1]), bounds: Bounds::new(1, 0) });
        let m = emit_lp(&inst(1, 1), &[gc]).unwrap();
        let lo = m.rows.iter().find(|r| r.name == "c1_count_lo").unwrap();
        assert_eq!(lo.terms, vec![(1, ZERO_VAR.to_string())]);
        assert!(m.violated_rows(&m.intended_values(&Schedule::empty(1))).iter().any(|r| r.name == "c1_count_lo"));
    }

    #[test]
    fn solution_parsing() {
        let vi = VarIndex::for_instance(&inst(1, 2));
        assert_eq!(parse_solution("Optimal - objective value 0\n", &vi).unwrap(), Schedule::empty(1));
        let cbc = "Optimal - objective value 0.00000000\n      0 x_s1_p1  0  0\n      1 x_s1_p2  0.9999999  0\n";
        assert_eq!(parse_solution(cbc, &vi).unwrap().get(ShiftId(1)), Some(PersonId(2)));
        assert_eq!(parse_solution("x_s1_p1 1\n", &vi).unwrap().get(ShiftId(1)), Some(PersonId(1)));
        assert!(matches!(parse_solution("x_s1_p1 0.3\n", &vi), Err(SolutionError::NotIntegral { .. })));
        assert!(matches!(
            parse_solution("x_s1_p1 1\nx_s1_p2 1\n", &vi),
            Err(SolutionError::AtMostOneViolated { .. })
        ));
        assert!(matches!(parse_solution("x_s1_p1 1\ngarbage here now\n", &vi), Err(SolutionError::Syntax { .. })));
    }

    #[test]
    fn wrapped_text_has_short_lines() {
        let gc = GcInstance::new(
            "cover",
            Gc::Uncovered { staff: ps(&[1, 2, 3, 4, 5, 6]), shifts: ss(&[1, 2, 3]), bounds: Bounds::exactly(0) },
        );
        let m = emit_lp(&inst(3, 6), &[gc]).unwrap();
        assert!(m.text.lines().all(|l| l.len() <= 90));
    }
}
