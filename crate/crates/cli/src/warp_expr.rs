//! Arithmetic over warp literals for the `warp` subcommand.
//!
//! ```text
//! top  := lat [ "<=" lat | "@" num ]
//! lat  := prod { ("sup" | "inf") prod }
//! prod := atom { ("*" | "\") atom }
//! atom := warp-literal | "(" lat ")"
//! ```

use warplang_core::syntax::{ParseError, Parser, Tok};
use warplang_core::{ExtNat, Warp};

pub enum Answer {
    Warp(Warp),
    Bool(bool),
    Step(ExtNat),
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Answer::Warp(p) => write!(f, "{p}"),
            Answer::Bool(b) => write!(f, "{b}"),
            Answer::Step(n) => write!(f, "{n}"),
        }
    }
}

pub fn run(src: &str) -> Result<Answer, ParseError> {
    let mut p = Parser::new(src)?;
    let lhs = lattice(&mut p)?;
    let out = if p.eat_sym("<=") {
        Answer::Bool(lhs.leq(&lattice(&mut p)?))
    } else if p.eat_sym("@") {
        let n = match p.peek().clone() {
            Tok::Int(n) => ExtNat::Fin(n),
            Tok::Ident(s) if s == "w" || s == "omega" => ExtNat::Omega,
            _ => return Err(p.error("expected a step after `@`")),
        };
        p.bump();
        Answer::Step(lhs.eval(n))
    } else {
        Answer::Warp(lhs)
    };
    p.expect_eof()?;
    Ok(out)
}

fn lattice(p: &mut Parser) -> Result<Warp, ParseError> {
    let mut acc = product(p)?;
    loop {
        if p.is_word("sup") {
            p.bump();
            acc = acc.sup(&product(p)?);
        } else if p.is_word("inf") {
            p.bump();
            acc = acc.inf(&product(p)?);
        } else {
            return Ok(acc);
        }
    }
}

fn product(p: &mut Parser) -> Result<Warp, ParseError> {
    let mut acc = atom(p)?;
    loop {
        if p.eat_sym("*") {
            acc = acc.compose(&atom(p)?);
        } else if p.eat_sym("\\") {
            acc = acc.residual(&atom(p)?);
        } else {
            return Ok(acc);
        }
    }
}

fn atom(p: &mut Parser) -> Result<Warp, ParseError> {
    if p.at_warp_literal() {
        p.warp()
    } else if p.eat_sym("(") {
        let w = lattice(p)?;
        p.expect_sym(")")?;
        Ok(w)
    } else {
        Err(p.error("expected a warp literal or `(`"))
    }
}
