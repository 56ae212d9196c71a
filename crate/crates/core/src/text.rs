//! Text form of states: one term per line, `<rational> <mode>* |0>`.
//!
//! `;` is accepted as an alternative term separator so a state fits on a
//! command line. Formatting always emits canonical order, one term per line,
//! and the zero state as `0 |0>`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{Coeff, Family, ModeRef, Monomial, State};

pub fn format_state(s: &State) -> String {
    if s.is_zero() {
        return "0 |0>".to_string();
    }
    s.terms()
        .map(|(m, c)| format!("{} {}", c, m))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Single-line rendering with `;` separators.
pub fn format_state_inline(s: &State) -> String {
    format_state(s).replace('\n', " ; ")
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, at: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: at - self.line_start + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_spaces(&mut self) {
        while let Some(ch) = self.peek() {
            if ch == ' ' || ch == '\t' || ch == '\r' {
                self.pos += ch.len_utf8();
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(ch) = self.peek() {
            if f(ch) {
                self.pos += ch.len_utf8();
            } else {
                break;
            }
        }
        &self.text[start..self.pos]
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(self.pos, format!("expected '{}'", ch)))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        if self.peek() == Some('-') || self.peek() == Some('+') {
            self.pos += 1;
        }
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.err(start, "expected an integer"));
        }
        self.text[start..self.pos]
            .trim_start_matches('+')
            .parse::<BigInt>()
            .map_err(|e| self.err(start, e.to_string()))
    }

    fn rational(&mut self) -> Result<Coeff> {
        let num = self.integer()?;
        if self.peek() == Some('/') {
            self.pos += 1;
            let den_start = self.pos;
            let den = self.integer()?;
            if den.is_zero() {
                return Err(self.err(den_start, "zero denominator"));
            }
            if den < BigInt::zero() {
                return Err(self.err(den_start, "denominator must be positive"));
            }
            Ok(Coeff::new(num, den))
        } else {
            Ok(Coeff::from_integer(num))
        }
    }

    fn small_int(&mut self) -> Result<i64> {
        let start = self.pos;
        let v = self.integer()?;
        i64::try_from(v).map_err(|_| self.err(start, "integer out of range"))
    }

    fn mode(&mut self) -> Result<ModeRef> {
        let start = self.pos;
        let name = self.take_while(|c| c.is_ascii_alphabetic());
        let family = Family::from_name(name)
            .ok_or_else(|| self.err(start, format!("unknown mode family '{}'", name)))?;
        self.expect('[')?;
        let idx_start = self.pos;
        let index = self.small_int()?;
        if index < 1 || index > u32::MAX as i64 {
            return Err(self.err(idx_start, "tensor index must be >= 1"));
        }
        self.expect(',')?;
        let n_start = self.pos;
        let n = self.small_int()?;
        if n > -1 {
            return Err(self.err(n_start, "mode number must be <= -1 (creation mode)"));
        }
        self.expect(']')?;
        Ok(ModeRef::new(family, index as u32, n))
    }

    /// Parses one term up to a separator or end of input. Returns `None`
    /// for a blank term.
    fn term(&mut self) -> Result<Option<(Coeff, Vec<ModeRef>)>> {
        self.skip_spaces();
        match self.peek() {
            None | Some('\n') | Some(';') => return Ok(None),
            _ => {}
        }
        let c = self.rational()?;
        let mut modes = Vec::new();
        loop {
            self.skip_spaces();
            match self.peek() {
                Some('|') => {
                    let at = self.pos;
                    if self.text[self.pos..].starts_with("|0>") {
                        self.pos += 3;
                        break;
                    }
                    return Err(self.err(at, "expected '|0>'"));
                }
                Some(ch) if ch.is_ascii_alphabetic() => modes.push(self.mode()?),
                Some(_) => return Err(self.err(self.pos, "expected a mode or '|0>'")),
                None => return Err(self.err(self.pos, "unterminated term, expected '|0>'")),
            }
        }
        self.skip_spaces();
        match self.peek() {
            None | Some('\n') | Some(';') => Ok(Some((c, modes))),
            Some(_) => Err(self.err(self.pos, "trailing characters after '|0>'")),
        }
    }
}

/// Parses a state. Terms are summed; repeated fermions cancel to zero.
pub fn parse_state(text: &str) -> Result<State> {
    let mut cur = Cursor {
        text,
        pos: 0,
        line: 1,
        line_start: 0,
    };
    let mut out = State::zero();
    loop {
        if let Some((c, modes)) = cur.term()? {
            if let Some((sign, m)) = Monomial::from_modes(&modes) {
                let c = if sign < 0 { -c } else { c };
                out.add_term(m, c);
            }
        }
        match cur.peek() {
            None => break,
            Some('\n') => {
                cur.pos += 1;
                cur.line += 1;
                cur.line_start = cur.pos;
            }
            Some(';') => cur.pos += 1,
            Some(_) => unreachable!("term() stops only at separators"),
        }
    }
    Ok(out)
}

/// Parses a state and checks every tensor index against `rank`.
pub fn parse_state_at_rank(text: &str, rank: u32) -> Result<State> {
    let s = parse_state(text)?;
    s.check_rank(rank)?;
    Ok(s)
}
