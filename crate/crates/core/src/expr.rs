//! Text syntax for monomials.
//!
//! ```text
//! input   := "n=" INT ";" product
//! product := "1" | factor ("*" factor)*
//! factor  := "d(" part "|" part ")" ("^" INT)?
//! part    := INT ("," INT)*
//! ```
//!
//! Whitespace is ignored between tokens. Error positions are byte offsets
//! into the input.

use thiserror::Error;

use crate::labels::{Label, LabelSet};
use crate::model::{Cut, ModelError, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: &'static str },
    #[error("part at byte {position} has fewer than 2 labels")]
    PartTooSmall { position: usize },
    #[error("factor at byte {position} does not partition {{1..{n}}}")]
    NotAPartition { position: usize, n: u32 },
    #[error("label {label} at byte {position} is outside 1..{n}")]
    AmbientMismatch { position: usize, label: u64, n: u32 },
    #[error("label {label} repeated within the part at byte {position}")]
    DuplicateLabelInPart { position: usize, label: Label },
    #[error("n={n} at byte {position}: at least 3 labels are required")]
    AmbientTooSmall { position: usize, n: u64 },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match *self {
            ParseError::Syntax { position, .. }
            | ParseError::PartTooSmall { position }
            | ParseError::NotAPartition { position, .. }
            | ParseError::AmbientMismatch { position, .. }
            | ParseError::DuplicateLabelInPart { position, .. }
            | ParseError::AmbientTooSmall { position, .. } => position,
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, expected: &'static str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(expected))
        }
    }

    fn syntax(&self, expected: &'static str) -> ParseError {
        ParseError::Syntax { position: self.pos, expected }
    }

    /// Returns the integer and the byte offset where it starts.
    fn int(&mut self, expected: &'static str) -> Result<(u64, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax(expected));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits
            .parse::<u64>()
            .map(|v| (v, start))
            .map_err(|_| ParseError::Syntax { position: start, expected: "an integer that fits in 64 bits" })
    }

    fn part(&mut self, n: u32) -> Result<(LabelSet, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut labels: Vec<Label> = Vec::new();
        loop {
            let (label, at) = self.int("a label")?;
            if label < 1 || label > u64::from(n) {
                return Err(ParseError::AmbientMismatch { position: at, label, n });
            }
            let label = label as Label;
            if labels.contains(&label) {
                return Err(ParseError::DuplicateLabelInPart { position: at, label });
            }
            labels.push(label);
            if !self.eat(b',') {
                break;
            }
        }
        if labels.len() < 2 {
            return Err(ParseError::PartTooSmall { position: start });
        }
        Ok((labels.into_iter().collect(), start))
    }

    fn factor(&mut self, n: u32) -> Result<(Cut, u32), ParseError> {
        self.skip_ws();
        let start = self.pos;
        self.expect(b'd', "'d(' or '1'")?;
        self.expect(b'(', "'('")?;
        let (first, _) = self.part(n)?;
        self.expect(b'|', "'|' or ','")?;
        let (second, _) = self.part(n)?;
        self.expect(b')', "')' or ','")?;
        let exponent = if self.eat(b'^') {
            let (e, at) = self.int("an exponent")?;
            if e == 0 || e > u64::from(u32::MAX) {
                return Err(ParseError::Syntax { position: at, expected: "a positive 32-bit exponent" });
            }
            e as u32
        } else {
            1
        };
        let cut = Cut::new(first, second, n).map_err(|e| match e {
            ModelError::PartTooSmall(_) => ParseError::PartTooSmall { position: start },
            _ => ParseError::NotAPartition { position: start, n },
        })?;
        Ok((cut, exponent))
    }

    fn input(&mut self) -> Result<Monomial, ParseError> {
        self.expect(b'n', "'n='")?;
        self.expect(b'=', "'='")?;
        let (n, at) = self.int("the label count")?;
        if n < 3 {
            return Err(ParseError::AmbientTooSmall { position: at, n });
        }
        let n = u32::try_from(n).map_err(|_| ParseError::Syntax { position: at, expected: "a 32-bit label count" })?;
        self.expect(b';', "';'")?;
        let mut m = Monomial::empty(n).expect("n >= 3");
        if self.peek() == Some(b'1') {
            let (one, at) = self.int("'1'")?;
            if one != 1 {
                return Err(ParseError::Syntax { position: at, expected: "'1' or a factor" });
            }
        } else {
            loop {
                let (cut, e) = self.factor(n)?;
                m.multiply(cut, e).expect("cut built over the same n with positive exponent");
                if !self.eat(b'*') {
                    break;
                }
            }
        }
        if self.peek().is_some() {
            return Err(self.syntax("'*' or end of input"));
        }
        Ok(m)
    }
}

/// Parses a monomial. Repeated cuts accumulate their exponents.
pub fn parse_monomial(text: &str) -> Result<Monomial, ParseError> {
    Parser { src: text.as_bytes(), pos: 0 }.input()
}

fn render_part(out: &mut String, part: &LabelSet) {
    for (i, l) in part.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&l.to_string());
    }
}

/// Canonical text: factors in cut order, `^1` omitted, `1` for the empty
/// monomial.
pub fn render_monomial(m: &Monomial) -> String {
    let mut out = format!("n={}; ", m.ambient_n());
    if m.is_empty() {
        out.push('1');
        return out;
    }
    for (i, (cut, e)) in m.factors().enumerate() {
        if i > 0 {
            out.push_str(" * ");
        }
        out.push_str("d(");
        render_part(&mut out, cut.first());
        out.push('|');
        render_part(&mut out, cut.second());
        out.push(')');
        if e != 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
    out
}
