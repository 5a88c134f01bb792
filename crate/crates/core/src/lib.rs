//! Warped types for productive stream programs.
//!
//! The crate parses an implicit surface language, elaborates it into terms
//! decorated with explicit coercions, type-checks those terms directly and
//! evaluates them with a step-indexed interpreter.

// Errors carry the offending types.
#![allow(clippy::result_large_err)]

pub mod checker;
pub mod elab;
pub mod eval;
pub mod subtype;
pub mod syntax;
pub mod warp;

pub use eval::{Env, Value};
pub use syntax::{Coercion, Context, Ground, Program, Scalar, Term, Type};
pub use warp::{ExtNat, Warp};
