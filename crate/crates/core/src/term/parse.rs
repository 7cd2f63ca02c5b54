//! Recursive-descent parser for the term and identity grammar.
//!
//! ```text
//! term     := VAR | "l(" term ")" | "r(" term ")" | "(" term "*" term ")"
//! VAR      := [a-zA-Z_][a-zA-Z0-9_]*   (but not "l" or "r")
//! identity := term "=" term
//! ```
//!
//! Whitespace may appear between tokens. Derivations produced by the
//! decision procedure also mention reserved variables `$0`, `$1`, ...;
//! those are only accepted by [`parse_with_reserved`].

use std::fmt;

use super::{Identity, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: expected ", self.offset)?;
        for (i, e) in self.expected.iter().enumerate() {
            if i > 0 {
                f.write_str(if i + 1 == self.expected.len() { " or " } else { ", " })?;
            }
            f.write_str(e)?;
        }
        match &self.found {
            Some(tok) => write!(f, ", found `{tok}`"),
            None => f.write_str(", found end of input"),
        }
    }
}

pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, false);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Like [`parse`], additionally accepting reserved `$N` variables.
pub fn parse_with_reserved(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, true);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_identity(text: &str) -> Result<Identity, ParseError> {
    parse_identity_impl(text, false)
}

pub fn parse_identity_with_reserved(text: &str) -> Result<Identity, ParseError> {
    parse_identity_impl(text, true)
}

fn parse_identity_impl(text: &str, reserved: bool) -> Result<Identity, ParseError> {
    let mut p = Parser::new(text, reserved);
    let lhs = p.term()?;
    p.expect(b'=', "`=`")?;
    let rhs = p.term()?;
    p.finish()?;
    Ok(Identity::new(lhs, rhs))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    reserved: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, reserved: bool) -> Self {
        Parser { src, pos: 0, reserved }
    }

    fn bytes(&self) -> &'a [u8] {
        self.src.as_bytes()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes().get(self.pos).copied()
    }

    fn found(&self) -> Option<String> {
        self.src[self.pos..].chars().next().map(|c| c.to_string())
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            offset: self.pos,
            expected,
            found: self.found(),
        }
    }

    fn expect(&mut self, b: u8, name: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(vec![name]))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            Err(self.error(vec!["end of input"]))
        } else {
            Ok(())
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let a = self.term()?;
                self.expect(b'*', "`*`")?;
                let b = self.term()?;
                self.expect(b')', "`)`")?;
                Ok(Term::mul(a, b))
            }
            Some(b'$') if self.reserved => {
                let start = self.pos;
                self.pos += 1;
                let digits = self.bytes()[self.pos..]
                    .iter()
                    .take_while(|b| b.is_ascii_digit())
                    .count();
                if digits == 0 {
                    return Err(self.error(vec!["digit"]));
                }
                self.pos += digits;
                Ok(Term::Var(self.src[start..self.pos].to_string()))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let len = self.bytes()[start..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                self.pos += len;
                let word = &self.src[start..self.pos];
                match word {
                    "l" | "r" => {
                        self.expect(b'(', "`(`")?;
                        let a = self.term()?;
                        self.expect(b')', "`)`")?;
                        Ok(if word == "l" { Term::l(a) } else { Term::r(a) })
                    }
                    _ => Ok(Term::Var(word.to_string())),
                }
            }
            _ => Err(self.error(vec!["variable", "`l(`", "`r(`", "`(`"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::render;

    #[test]
    fn examples() {
        assert_eq!(
            parse("l((x*y))").unwrap(),
            Term::l(Term::mul(Term::var("x"), Term::var("y")))
        );
        assert_eq!(
            parse("(l(z)*r(z))").unwrap(),
            Term::mul(Term::l(Term::var("z")), Term::r(Term::var("z")))
        );
        let err = parse("l(x").unwrap_err();
        assert_eq!(err.offset, 3);
        assert_eq!(err.expected, vec!["`)`"]);
        assert_eq!(err.found, None);
    }

    #[test]
    fn whitespace_between_tokens() {
        let t = parse("  ( l ( x ) *\tr(y_1 ) ) ").unwrap();
        assert_eq!(render(&t), "(l(x)*r(y_1))");
    }

    #[test]
    fn reserved_words_need_parens() {
        let err = parse("l").unwrap_err();
        assert_eq!(err.offset, 1);
        assert!(parse("(l*x)").is_err());
        // longer identifiers starting with l/r are ordinary variables
        assert_eq!(parse("lx").unwrap(), Term::var("lx"));
        assert_eq!(parse("r_").unwrap(), Term::var("r_"));
    }

    #[test]
    fn rejects_junk() {
        assert_eq!(parse("").unwrap_err().offset, 0);
        assert_eq!(parse("x y").unwrap_err().offset, 2);
        assert_eq!(parse("(x*y").unwrap_err().offset, 4);
        assert_eq!(parse("(x+y)").unwrap_err().offset, 2);
        assert_eq!(parse("9x").unwrap_err().offset, 0);
        assert!(parse("$0").is_err());
        assert_eq!(parse_with_reserved("l($12)").unwrap(), Term::l(Term::var("$12")));
    }

    #[test]
    fn identities() {
        let id = parse_identity("l((x*y)) = x").unwrap();
        assert_eq!(render(&id.lhs), "l((x*y))");
        assert_eq!(render(&id.rhs), "x");
        let err = parse_identity("x y").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.expected, vec!["`=`"]);
        assert!(parse_identity("x = y = z").is_err());
    }
}
