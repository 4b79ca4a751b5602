//! Block words such as `S[1,2](u)* T[2,2]` and their text syntax.
//!
//! ```text
//! WORD  := TERM (WS TERM)*
//! TERM  := ('S' | 'T') '[' INT ',' INT ']' ('(' LABEL ')')? '*'?
//! ```
//!
//! The label defaults to `1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockSymbol {
    /// Rectangular block `S_{p,q} = D_p Y D_q`.
    S,
    /// Symmetric block `T_{p,q} = S_{p,q} + S_{q,p}` (`S_{q,q}` on the diagonal).
    T,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub symbol: BlockSymbol,
    pub p: usize,
    pub q: usize,
    pub label: String,
    pub star: bool,
}

impl Term {
    pub fn s(p: usize, q: usize) -> Self {
        Term { symbol: BlockSymbol::S, p, q, label: "1".into(), star: false }
    }

    pub fn t(p: usize, q: usize) -> Self {
        Term { symbol: BlockSymbol::T, p, q, label: "1".into(), star: false }
    }

    pub fn label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn star(mut self) -> Self {
        self.star = !self.star;
        self
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.symbol {
            BlockSymbol::S => 'S',
            BlockSymbol::T => 'T',
        };
        write!(f, "{sym}[{},{}]({})", self.p, self.q, self.label)?;
        if self.star {
            write!(f, "*")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockWord {
    pub terms: Vec<Term>,
}

impl BlockWord {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("empty block word".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.symbol == BlockSymbol::T && t.p > t.q) {
            return Err(Error::InvalidParameter(format!("symmetric block {t} needs p <= q")));
        }
        Ok(BlockWord { terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adjoint word: reversed, every star toggled.
    pub fn adjoint(&self) -> Self {
        BlockWord {
            terms: self.terms.iter().rev().map(|t| t.clone().star()).collect(),
        }
    }

    /// Checks indices against `r` blocks and labels against `known`.
    pub fn bind<'a>(&self, r: usize, mut known: impl FnMut(&str) -> bool + 'a) -> Result<()> {
        for t in &self.terms {
            for i in [t.p, t.q] {
                if i == 0 || i > r {
                    return Err(Error::IndexOutOfRange { index: i, max: r });
                }
            }
            if !known(&t.label) {
                return Err(Error::Config(format!("label {:?} has no covariance matrix", t.label)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for BlockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BlockWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

pub fn parse_word(s: &str) -> Result<BlockWord> {
    let mut parser = Parser { src: s.as_bytes(), pos: 0 };
    parser.skip_ws();
    let mut terms = Vec::new();
    loop {
        let start = parser.pos;
        let term = parser.term()?;
        if term.symbol == BlockSymbol::T && term.p > term.q {
            return Err(Error::Parse {
                offset: start,
                message: format!("symmetric block {term} needs p <= q"),
            });
        }
        terms.push(term);
        let before = parser.pos;
        parser.skip_ws();
        if parser.at_end() {
            break;
        }
        if parser.pos == before {
            return parser.fail("expected whitespace between terms");
        }
    }
    Ok(BlockWord { terms })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn fail<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse { offset: self.pos, message: message.into() })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&format!("expected '{}'", c as char))
        }
    }

    fn term(&mut self) -> Result<Term> {
        let symbol = match self.peek() {
            Some(b'S') => BlockSymbol::S,
            Some(b'T') => BlockSymbol::T,
            _ => return self.fail("expected 'S' or 'T'"),
        };
        self.pos += 1;
        self.expect(b'[')?;
        let p = self.int()?;
        self.expect(b',')?;
        let q = self.int()?;
        self.expect(b']')?;
        let mut label = "1".to_string();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            label = self.label()?;
            self.expect(b')')?;
        }
        let star = self.peek() == Some(b'*');
        if star {
            self.pos += 1;
        }
        Ok(Term { symbol, p, q, label, star })
    }

    fn int(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("expected an index");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse().map_err(|_| Error::Parse {
            offset: start,
            message: "index too large".into(),
        })
    }

    fn label(&mut self) -> Result<String> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'-' || c == b'.')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("expected a label");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }
}
