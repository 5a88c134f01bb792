//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use warplang_core::syntax::{parse_program, Program};

/// A corpus program, parsed.
pub fn corpus(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.wlp"));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_program(&src).expect("corpus parses")
}
