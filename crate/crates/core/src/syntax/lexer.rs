//! Tokenizer shared by the program, type, coercion and warp parsers.

use super::parser::ParseError;
use super::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const SYMBOLS: &[&str] =
    &["->", "::", "==", "<=", "(", ")", "{", "}", "[", "]", ":", "=", "+", "-", "*", ",", ";", "\\", "@"];

/// Splits source text into tokens. `--` starts a line comment.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if src[i..].starts_with("--") {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            let n =
                src[i..end].parse().map_err(|_| ParseError::at(src, Span::new(i, end), "integer literal too large"))?;
            out.push(Token { tok: Tok::Int(n), span: Span::new(i, end) });
            continue;
        }
        if c == 'ω' {
            chars.next();
            let span = Span::new(i, i + c.len_utf8());
            out.push(Token { tok: Tok::Ident("w".into()), span });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_' || d == '\'') {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push(Token { tok: Tok::Ident(src[i..end].to_string()), span: Span::new(i, end) });
            continue;
        }
        match SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            Some(s) => {
                for _ in 0..s.len() {
                    chars.next();
                }
                out.push(Token { tok: Tok::Sym(s), span: Span::new(i, i + s.len()) });
            }
            None => {
                let span = Span::new(i, i + c.len_utf8());
                return Err(ParseError::at(src, span, format!("unexpected character `{c}`")));
            }
        }
    }
    let end = src.len();
    out.push(Token { tok: Tok::Eof, span: Span::new(end, end) });
    Ok(out)
}
