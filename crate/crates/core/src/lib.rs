//! Rostering constraint modeling.
//!
//! The crate models a rostering problem (staff, shifts, overlap allowances),
//! expresses workplace rules through nine parameterized generic constraints
//! (GC1 to GC9) and provides:
//!
//! * a direct semantic evaluator that checks any [`Schedule`] against a
//!   constraint list ([`constraints`]),
//! * an SMT-LIB2 encoder and model reader ([`smt`]),
//! * a CPLEX-LP encoder with big-M auxiliaries and solution reader ([`lp`]),
//! * exact feasibility deciders for small instances ([`exact`]),
//! * the two benchmark problem families ([`generators`]).
//!
//! Everything here is pure computation over `alloc` collections; process
//! spawning, files and the command line live in the companion `roster` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod constraints;
pub mod encoding;
pub mod exact;
pub mod fixed;
pub mod generators;
pub mod lp;
pub mod model;
pub mod outcome;
pub mod sexpr;
pub mod smt;

pub use constraints::{eval_all, eval_gc, Bounds, Gc, GcInstance, GcKind, GcParams, ParamError, ViolationReport};
pub use fixed::Fixed;
pub use model::{
    OverlapAllowance, Person, PersonId, Qualification, RosterInstance, Schedule, Shift, ShiftId,
};
pub use outcome::{Backend, SolveOutcome, Verdict};
