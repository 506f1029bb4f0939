//! SMT-LIB2 encoding of a rostering instance.
//!
//! Every assignment is a Boolean `x_s{shift}_p{person}`. Counting uses sums
//! of `(ite b 1 0)` terms over integers, so the script stays in QF_LIA and
//! runs on any SMT-LIB2 solver. Workloads enter as integer hundredths.
//!
//! Besides the emitter this module reads solver models back into a
//! [`Schedule`] and can evaluate an emitted script under a fixed valuation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::constraints::{Gc, GcInstance};
use crate::encoding::{balance_bounds, EncodeError, Prep};
pub use crate::encoding::VarIndex;
use crate::fixed::SCALE;
use crate::model::{PersonId, RosterInstance, Schedule, ShiftId};
use crate::outcome::Verdict;
use crate::sexpr::{self, SExpr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtScript {
    pub text: String,
    pub var_index: VarIndex,
}

impl SmtScript {
    /// The script with the schedule's valuation asserted just before
    /// `(check-sat)`. A solver answers `sat` iff the schedule satisfies
    /// every emitted assertion.
    pub fn with_assignment(&self, schedule: &Schedule) -> String {
        let mut fixes = String::from("; fixed valuation\n");
        for (name, value) in self.var_index.valuation(schedule) {
            let lit = if value { name } else { format!("(not {name})") };
            let _ = writeln!(fixes, "(assert {lit})");
        }
        match self.text.rfind("(check-sat)") {
            Some(pos) => {
                let mut out = String::with_capacity(self.text.len() + fixes.len());
                out.push_str(&self.text[..pos]);
                out.push_str(&fixes);
                out.push_str(&self.text[pos..]);
                out
            }
            None => format!("{}{}", self.text, fixes),
        }
    }
}

/// Boolean term with constant folding.
#[derive(Debug, Clone, PartialEq, Eq)]
enum B {
    T,
    F,
    Sym(String),
    Not(alloc::boxed::Box<B>),
    And(Vec<B>),
    Or(Vec<B>),
    Implies(alloc::boxed::Box<B>, alloc::boxed::Box<B>),
}

fn sym(s: impl Into<String>) -> B {
    B::Sym(s.into())
}

fn not(b: B) -> B {
    match b {
        B::T => B::F,
        B::F => B::T,
        B::Not(inner) => *inner,
        other => B::Not(alloc::boxed::Box::new(other)),
    }
}

fn and(items: impl IntoIterator<Item = B>) -> B {
    let mut v = Vec::new();
    for it in items {
        match it {
            B::F => return B::F,
            B::T => {}
            other => v.push(other),
        }
    }
    match v.len() {
        0 => B::T,
        1 => v.pop().unwrap_or(B::T),
        _ => B::And(v),
    }
}

fn or(items: impl IntoIterator<Item = B>) -> B {
    let mut v = Vec::new();
    for it in items {
        match it {
            B::T => return B::T,
            B::F => {}
            other => v.push(other),
        }
    }
    match v.len() {
        0 => B::F,
        1 => v.pop().unwrap_or(B::F),
        _ => B::Or(v),
    }
}

fn implies(a: B, b: B) -> B {
    match (a, b) {
        (B::F, _) | (_, B::T) => B::T,
        (B::T, b) => b,
        (a, B::F) => not(a),
        (a, b) => B::Implies(alloc::boxed::Box::new(a), alloc::boxed::Box::new(b)),
    }
}

impl core::fmt::Display for B {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            B::T => f.write_str("true"),
            B::F => f.write_str("false"),
            B::Sym(s) => f.write_str(s),
            B::Not(b) => write!(f, "(not {b})"),
            B::And(v) | B::Or(v) => {
                f.write_str(if matches!(self, B::And(_)) { "(and" } else { "(or" })?;
                for b in v {
                    write!(f, " {b}")?;
                }
                f.write_str(")")
            }
            B::Implies(a, b) => write!(f, "(=> {a} {b})"),
        }
    }
}

fn int(v: i128) -> String {
    if v < 0 {
        format!("(- {})", -v)
    } else {
        v.to_string()
    }
}

/// `sum(coef * bool-to-int(b))`, constants folded.
fn weighted_count(terms: impl IntoIterator<Item = (i128, B)>) -> String {
    let mut constant = 0i128;
    let mut parts = Vec::new();
    for (c, b) in terms {
        if c == 0 {
            continue;
        }
        match b {
            B::F => {}
            B::T => constant += c,
            b => parts.push(format!("(ite {b} {} 0)", int(c))),
        }
    }
    if constant != 0 || parts.is_empty() {
        parts.push(int(constant));
    }
    if parts.len() == 1 {
        parts.pop().unwrap_or_default()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

fn count(terms: impl IntoIterator<Item = B>) -> String {
    weighted_count(terms.into_iter().map(|b| (1, b)))
}

struct Emitter<'a> {
    prep: Prep<'a>,
    vars: VarIndex,
    out: String,
}

impl Emitter<'_> {
    fn x(&self, s: ShiftId, p: PersonId) -> B {
        sym(self.vars.name(s, p))
    }

    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    /// Emits `(define-fun name () Bool body)` unless `body` is constant.
    fn define_bool(&mut self, name: String, body: B) -> B {
        match body {
            B::T | B::F => body,
            body => {
                let _ = writeln!(self.out, "(define-fun {name} () Bool {body})");
                sym(name)
            }
        }
    }

    fn define_int(&mut self, name: &str, body: &str) {
        let _ = writeln!(self.out, "(define-fun {name} () Int {body})");
    }

    fn assert(&mut self, b: B) {
        if b != B::T {
            let _ = writeln!(self.out, "(assert {b})");
        }
    }

    fn assert_bounds(&mut self, term: &str, lo: u32, hi: u32) {
        let _ = writeln!(self.out, "(assert (<= {lo} {term}))");
        let _ = writeln!(self.out, "(assert (<= {term} {hi}))");
    }

    /// `worked[p][d]` = some shift of `shifts` on day `d` assigned to `p`.
    fn worked_days(&mut self, prefix: &str, staff: &[PersonId], shifts: &crate::constraints::ShiftSet) -> BTreeMap<PersonId, Vec<B>> {
        let by_day = self.prep.by_day(shifts);
        let t = self.prep.horizon as usize;
        let mut out = BTreeMap::new();
        for &p in staff {
            let mut row = alloc::vec![B::F; t + 2];
            for d in 1..=t {
                let body = or(by_day[d].iter().map(|&s| self.x(s, p)));
                row[d] = self.define_bool(format!("{prefix}_w_p{}_d{d}", p.0), body);
            }
            out.insert(p, row);
        }
        out
    }

    fn emit(&mut self, k: usize, c: &GcInstance) {
        let prefix = format!("c{k}");
        let label = c.label.replace(['\n', '\r'], " ");
        let _ = writeln!(self.out, "; {prefix} {} {label}", c.kind());
        let t = self.prep.horizon as usize;
        match &c.gc {
            Gc::Uncovered { staff, shifts, bounds } => {
                let terms: Vec<B> =
                    shifts.iter().map(|&s| and(staff.iter().map(|&p| not(self.x(s, p))))).collect();
                let name = format!("{prefix}_count");
                self.define_int(&name, &count(terms));
                self.assert_bounds(&name, bounds.lo, bounds.hi);
            }
            Gc::Unqualified { staff, shifts, bounds } => {
                let terms: Vec<B> = shifts
                    .iter()
                    .map(|&s| or(staff.iter().filter(|&&p| !self.prep.qualified(s, p)).map(|&p| self.x(s, p))))
                    .collect();
                let name = format!("{prefix}_count");
                self.define_int(&name, &count(terms));
                self.assert_bounds(&name, bounds.lo, bounds.hi);
            }
            Gc::Overlap { staff, bounds } => {
                let mut terms = Vec::new();
                for &p in staff {
                    let pairs: Vec<_> = self.prep.disallowed_pairs(p).collect();
                    for (a, b) in pairs {
                        terms.push(and([self.x(a, p), self.x(b, p)]));
                    }
                }
                let name = format!("{prefix}_count");
                self.define_int(&name, &count(terms));
                self.assert_bounds(&name, bounds.lo, bounds.hi);
            }
            Gc::WorkloadShare { staff, shifts, lo, hi } => {
                let all = self.prep.all_shifts();
                for &p in staff {
                    let total: Vec<(i128, B)> = all
                        .iter()
                        .filter(|&&s| self.prep.workload(s) > 0)
                        .map(|&s| (i128::from(self.prep.workload(s)), self.x(s, p)))
                        .collect();
                    if total.is_empty() {
                        continue;
                    }
                    let selected: Vec<(i128, B)> = shifts
                        .iter()
                        .filter(|&&s| self.prep.workload(s) > 0)
                        .map(|&s| (i128::from(self.prep.workload(s)), self.x(s, p)))
                        .collect();
                    let wall = format!("{prefix}_wall_p{}", p.0);
                    let wsel = format!("{prefix}_wsel_p{}", p.0);
                    self.define_int(&wall, &weighted_count(total));
                    self.define_int(&wsel, &weighted_count(selected));
                    let _ = writeln!(
                        self.out,
                        "(assert (=> (> {wall} 0) (and (<= (* {} {wall}) (* {SCALE} {wsel})) (<= (* {SCALE} {wsel}) (* {} {wall})))))",
                        int(i128::from(lo.hundredths())),
                        int(i128::from(hi.hundredths())),
                    );
                }
            }
            Gc::Conditional { staff1, shifts1, staff2, shifts2, bounds } => {
                let trigger = or(shifts1.iter().flat_map(|&s| staff1.iter().map(move |&p| (s, p))).map(|(s, p)| self.x(s, p)));
                if trigger == B::F {
                    return;
                }
                let counted: Vec<B> =
                    shifts2.iter().flat_map(|&s| staff2.iter().map(move |&p| (s, p))).map(|(s, p)| self.x(s, p)).collect();
                let name = format!("{prefix}_count");
                self.define_int(&name, &count(counted));
                let trig = self.define_bool(format!("{prefix}_trigger"), trigger);
                let _ = writeln!(
                    self.out,
                    "(assert (=> {trig} (and (<= {} {name}) (<= {name} {}))))",
                    bounds.lo, bounds.hi
                );
            }
            Gc::ConsecutiveDays { staff, shifts, bounds } => {
                let staff: Vec<PersonId> = staff.iter().copied().collect();
                let worked = self.worked_days(&prefix, &staff, shifts);
                let y = bounds.hi as usize;
                let x = bounds.lo as usize;
                for row in worked.values() {
                    // every window of y + 1 days has a day off
                    for d in 1..=t {
                        if d + y > t {
                            break;
                        }
                        self.assert(or((d..=d + y).map(|e| not(row[e].clone()))));
                    }
                    // an interior run that starts on d lasts x days or reaches the horizon end
                    if x >= 2 {
                        for d in 2..=t {
                            let starts = and([row[d].clone(), not(row[d - 1].clone())]);
                            let lasts = and((d..=(d + x - 1).min(t)).map(|e| row[e].clone()));
                            self.assert(implies(starts, lasts));
                        }
                    }
                }
            }
            Gc::RestAroundRun { staff, shifts, before, after, run, days_before, days_after } => {
                let staff_v: Vec<PersonId> = staff.iter().copied().collect();
                let worked = self.worked_days(&prefix, &staff_v, shifts);
                let before_by_day = self.prep.by_day(before);
                let after_by_day = self.prep.by_day(after);
                let n = *days_before as usize;
                let m = *days_after as usize;
                for (&p, row) in &worked {
                    for d in 1..=t {
                        for len in (run.lo.max(1) as usize)..=(run.hi as usize) {
                            let end = d + len - 1;
                            if end > t {
                                break;
                            }
                            let mut conj = Vec::new();
                            if d > 1 {
                                conj.push(not(row[d - 1].clone()));
                            }
                            conj.extend((d..=end).map(|e| row[e].clone()));
                            if end < t {
                                conj.push(not(row[end + 1].clone()));
                            }
                            let occurs = and(conj);
                            if occurs == B::F {
                                continue;
                            }
                            let mut off = Vec::new();
                            for e in d.saturating_sub(n).max(1)..d {
                                off.extend(before_by_day[e].iter().map(|&s| not(self.x(s, p))));
                            }
                            for e in (end + 1)..=(end + m).min(t) {
                                off.extend(after_by_day[e].iter().map(|&s| not(self.x(s, p))));
                            }
                            let off = and(off);
                            if off == B::T {
                                continue;
                            }
                            let occurs = self.define_bool(format!("{prefix}_r_p{}_d{d}_l{len}", p.0), occurs);
                            self.assert(implies(occurs, off));
                        }
                    }
                }
            }
            Gc::SameTypeSequence { staff, shifts } => {
                let types: Vec<String> = self.prep.types_in(shifts).into_iter().map(String::from).collect();
                let by_day = self.prep.by_day(shifts);
                for &p in staff {
                    let mut typed = alloc::vec![alloc::vec![B::F; types.len()]; t + 2];
                    let mut any = alloc::vec![B::F; t + 2];
                    for d in 1..=t {
                        for (ti, ty) in types.iter().enumerate() {
                            let body = or(by_day[d]
                                .iter()
                                .filter(|&&s| self.prep.shift_type(s) == ty)
                                .map(|&s| self.x(s, p)));
                            typed[d][ti] = self.define_bool(format!("{prefix}_t{ti}_p{}_d{d}", p.0), body);
                        }
                        let body = or(typed[d].iter().cloned());
                        any[d] = self.define_bool(format!("{prefix}_any_p{}_d{d}", p.0), body);
                    }
                    for d in 2..=t {
                        for ti in 0..types.len() {
                            let ok = or([typed[d - 1][ti].clone(), not(any[d - 1].clone())]);
                            self.assert(implies(typed[d][ti].clone(), ok));
                        }
                    }
                }
            }
            Gc::WorkloadBalance { staff, shifts, tolerance } => {
                let total_work: i128 = shifts.iter().map(|&s| i128::from(self.prep.workload(s))).sum();
                let total_desired: i128 = staff.iter().map(|&p| i128::from(self.prep.desired(p))).sum();
                for &p in staff {
                    let Some((lo, hi)) = balance_bounds(
                        total_work,
                        total_desired,
                        i128::from(self.prep.desired(p)),
                        i128::from(tolerance.hundredths()),
                    ) else {
                        continue;
                    };
                    let terms: Vec<(i128, B)> =
                        shifts.iter().map(|&s| (i128::from(self.prep.workload(s)), self.x(s, p))).collect();
                    let name = format!("{prefix}_wsel_p{}", p.0);
                    self.define_int(&name, &weighted_count(terms));
                    if lo > 0 {
                        let _ = writeln!(self.out, "(assert (<= {} {name}))", int(lo));
                    }
                    let _ = writeln!(self.out, "(assert (<= {name} {}))", int(hi));
                }
            }
        }
    }
}

/// Compiles the instance and its constraints into a complete SMT-LIB2
/// script ending in `(check-sat)` and `(get-model)`. Output is a pure
/// function of the inputs.
pub fn emit_smtlib(instance: &RosterInstance, constraints: &[GcInstance]) -> Result<SmtScript, EncodeError> {
    let prep = Prep::new(instance, constraints)?;
    let vars = VarIndex::for_instance(instance);
    let mut e = Emitter { prep, vars, out: String::new() };
    let _ = writeln!(
        e.out,
        "; roster feasibility: {} shifts, {} staff, {} days, {} constraints",
        instance.shifts.len(),
        instance.personnel.len(),
        instance.horizon_days,
        constraints.len()
    );
    e.line("(set-option :produce-models true)");
    e.line("(set-logic QF_LIA)");
    for name in e.vars.names.values() {
        let _ = writeln!(e.out, "(declare-const {name} Bool)");
    }
    e.line("; at most one person per shift");
    for s in &instance.shifts {
        let terms: Vec<B> = instance.personnel.iter().map(|p| e.x(s.id, p.id)).collect();
        if terms.len() > 1 {
            let _ = writeln!(e.out, "(assert (<= {} 1))", count(terms));
        }
    }
    for (k, c) in constraints.iter().enumerate() {
        e.emit(k + 1, c);
    }
    e.line("(check-sat)");
    e.line("(get-model)");
    Ok(SmtScript { text: e.out, var_index: e.vars })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unparseable model: {0}")]
    Syntax(#[from] sexpr::SExprError),
    #[error("model value for {name} is not a Boolean literal: {value}")]
    NotBoolean { name: String, value: String },
    #[error("model assigns shift {shift} to persons {first} and {second}; encoder contract violated")]
    AtMostOneViolated { shift: ShiftId, first: PersonId, second: PersonId },
}

/// First status token (`sat`, `unsat`, `unknown`, `timeout`) in solver output.
pub fn parse_status(output: &str) -> Option<Verdict> {
    output.lines().map(str::trim).find(|l| !l.is_empty()).and_then(|l| match l {
        "sat" => Some(Verdict::Feasible),
        "unsat" => Some(Verdict::Infeasible),
        "unknown" => Some(Verdict::Unknown),
        "timeout" => Some(Verdict::Timeout),
        _ => None,
    })
}

fn collect_defs<'a>(e: &'a SExpr, out: &mut Vec<&'a [SExpr]>) {
    if let Some(items) = e.list() {
        if e.head() == Some("define-fun") {
            out.push(items);
        } else {
            for it in items {
                collect_defs(it, out);
            }
        }
    }
}

/// Reads a `(get-model)` response. Assignment variables missing from the
/// model are false; other definitions are ignored.
pub fn parse_model(raw: &str, var_index: &VarIndex) -> Result<Schedule, ModelError> {
    let exprs = sexpr::parse_all(raw)?;
    let reverse = var_index.reverse();
    let mut defs = Vec::new();
    for e in &exprs {
        collect_defs(e, &mut defs);
    }
    let mut schedule = Schedule::empty(var_index.num_shifts);
    for def in defs {
        let Some(name) = def.get(1).and_then(SExpr::atom) else { continue };
        let Some(&(shift, person)) = reverse.get(name) else { continue };
        let value = def.get(4).map(|v| v.to_string()).unwrap_or_default();
        let truth = match value.as_str() {
            "true" => true,
            "false" => false,
            _ => return Err(ModelError::NotBoolean { name: name.to_string(), value }),
        };
        if truth {
            if let Some(first) = schedule.get(shift) {
                let (first, second) = if first < person { (first, person) } else { (person, first) };
                return Err(ModelError::AtMostOneViolated { shift, first, second });
            }
            schedule.set(shift, Some(person));
        }
    }
    Ok(schedule)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Syntax(#[from] sexpr::SExprError),
    #[error("unbound symbol {0}")]
    Unbound(String),
    #[error("unsupported term {0}")]
    Unsupported(String),
    #[error("sort mismatch in {0}")]
    Sort(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    Bool(bool),
    Int(i128),
}

struct ScriptEval<'a> {
    valuation: &'a BTreeMap<String, bool>,
    defs: BTreeMap<&'a str, &'a SExpr>,
    cache: BTreeMap<&'a str, Val>,
}

impl<'a> ScriptEval<'a> {
    fn eval(&mut self, e: &'a SExpr) -> Result<Val, EvalError> {
        match e {
            SExpr::Atom(a) => self.atom(a),
            SExpr::List(items) => {
                let head = e.head().ok_or_else(|| EvalError::Unsupported(e.to_string()))?;
                let args = &items[1..];
                let b = |s: &mut Self, x: &'a SExpr| match s.eval(x)? {
                    Val::Bool(v) => Ok(v),
                    Val::Int(_) => Err(EvalError::Sort(e.to_string())),
                };
                let i = |s: &mut Self, x: &'a SExpr| match s.eval(x)? {
                    Val::Int(v) => Ok(v),
                    Val::Bool(_) => Err(EvalError::Sort(e.to_string())),
                };
                Ok(match head {
                    "not" if args.len() == 1 => Val::Bool(!b(self, &args[0])?),
                    "and" => {
                        let mut acc = true;
                        for a in args {
                            acc &= b(self, a)?;
                        }
                        Val::Bool(acc)
                    }
                    "or" => {
                        let mut acc = false;
                        for a in args {
                            acc |= b(self, a)?;
                        }
                        Val::Bool(acc)
                    }
                    "=>" if args.len() == 2 => Val::Bool(!b(self, &args[0])? || b(self, &args[1])?),
                    "ite" if args.len() == 3 => {
                        if b(self, &args[0])? {
                            self.eval(&args[1])?
                        } else {
                            self.eval(&args[2])?
                        }
                    }
                    "+" => {
                        let mut acc = 0;
                        for a in args {
                            acc += i(self, a)?;
                        }
                        Val::Int(acc)
                    }
                    "*" => {
                        let mut acc = 1;
                        for a in args {
                            acc *= i(self, a)?;
                        }
                        Val::Int(acc)
                    }
                    "-" if args.len() == 1 => Val::Int(-i(self, &args[0])?),
                    "-" if args.len() == 2 => Val::Int(i(self, &args[0])? - i(self, &args[1])?),
                    "<=" | ">=" | "<" | ">" if args.len() == 2 => {
                        let (l, r) = (i(self, &args[0])?, i(self, &args[1])?);
                        Val::Bool(match head {
                            "<=" => l <= r,
                            ">=" => l >= r,
                            "<" => l < r,
                            _ => l > r,
                        })
                    }
                    "=" if args.len() == 2 => Val::Bool(self.eval(&args[0])? == self.eval(&args[1])?),
                    _ => return Err(EvalError::Unsupported(e.to_string())),
                })
            }
        }
    }

    fn atom(&mut self, a: &'a str) -> Result<Val, EvalError> {
        match a {
            "true" => return Ok(Val::Bool(true)),
            "false" => return Ok(Val::Bool(false)),
            _ => {}
        }
        if let Ok(v) = a.parse::<i128>() {
            return Ok(Val::Int(v));
        }
        if let Some(&v) = self.valuation.get(a) {
            return Ok(Val::Bool(v));
        }
        if let Some(&v) = self.cache.get(a) {
            return Ok(v);
        }
        let body = *self.defs.get(a).ok_or_else(|| EvalError::Unbound(a.to_string()))?;
        let v = self.eval(body)?;
        self.cache.insert(a, v);
        Ok(v)
    }
}

/// Evaluates every `(assert ...)` of a script under a total valuation of
/// its declared Boolean constants. Supports the QF_LIA subset the emitter
/// produces. Returns whether all assertions hold.
pub fn evaluate_script(text: &str, valuation: &BTreeMap<String, bool>) -> Result<bool, EvalError> {
    let exprs = sexpr::parse_all(text)?;
    let mut defs = BTreeMap::new();
    let mut asserts = Vec::new();
    for e in &exprs {
        let Some(items) = e.list() else { continue };
        match e.head() {
            Some("define-fun") => {
                let name = items.get(1).and_then(SExpr::atom).ok_or_else(|| EvalError::Unsupported(e.to_string()))?;
                if items.get(2).and_then(SExpr::list).is_none_or(|args| !args.is_empty()) || items.len() != 5 {
                    return Err(EvalError::Unsupported(e.to_string()));
                }
                defs.insert(name, &items[4]);
            }
            Some("declare-const") => {
                let name = items.get(1).and_then(SExpr::atom).unwrap_or_default();
                if !valuation.contains_key(name) {
                    return Err(EvalError::Unbound(name.to_string()));
                }
            }
            Some("assert") if items.len() == 2 => asserts.push(&items[1]),
            _ => {}
        }
    }
    let mut ev = ScriptEval { valuation, defs, cache: BTreeMap::new() };
    for a in asserts {
        match ev.eval(a)? {
            Val::Bool(true) => {}
            Val::Bool(false) => return Ok(false),
            Val::Int(_) => return Err(EvalError::Sort(a.to_string())),
        }
    }
    Ok(true)
}
