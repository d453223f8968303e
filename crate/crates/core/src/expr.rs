//! Text and JSON formats for polynomials.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! poly   := ['-'] term (('+' | '-') term)* | '0'
//! term   := [coef '*'] factor ('*' factor)* | coef
//! factor := 'z' '(' eps ',' int ')' | '1'
//! coef   := decimal integer, reduced mod p
//! eps    := '0' | '1'
//! ```
//!
//! The printer emits terms in canonical word order, omits unit
//! coefficients and prints the zero polynomial as `0`.

use serde::{Deserialize, Serialize};

use crate::algebra::{Letter, Poly, Word};
use crate::error::{Error, Result};
use crate::modp::{Fp, PrimeContext};

pub fn parse_poly(src: &str, ctx: &PrimeContext) -> Result<Poly> {
    Parser::new(src, ctx).poly()
}

pub fn print_poly(x: &Poly) -> String {
    x.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a PrimeContext,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, ctx: &'a PrimeContext) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            ctx,
        }
    }

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

    fn fail<T>(&mut self, expected: &str) -> Result<T> {
        self.skip_ws();
        Err(Error::Syntax {
            pos: self.pos,
            expected: expected.to_string(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&format!("'{}'", c as char))
        }
    }

    /// Unsigned decimal digits, at least one.
    fn digits(&mut self, what: &str) -> Result<&'a [u8]> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail(what);
        }
        Ok(&self.src[start..self.pos])
    }

    fn poly(&mut self) -> Result<Poly> {
        let mut out = Poly::zero(self.ctx);
        let mut negate = self.eat(b'-');
        loop {
            let (coef, word) = self.term()?;
            let coef = if negate { self.ctx.neg(coef) } else { coef };
            out.add_term(word, coef, self.ctx);
            match self.peek() {
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                None => return Ok(out),
                Some(_) => return self.fail("'+', '-' or end of input"),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(Fp, Word)> {
        let mut coef = 1;
        let mut letters = Vec::new();
        match self.peek() {
            Some(b'z') => self.factor(&mut letters)?,
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits("coefficient")?;
                coef = digits.iter().fold(0u64, |acc, d| {
                    (acc * 10 + (d - b'0') as u64) % self.ctx.p() as u64
                }) as Fp;
                if !self.eat(b'*') {
                    return Ok((coef, Word::empty()));
                }
                self.factor(&mut letters)?;
            }
            _ => return self.fail("a coefficient, 'z' or '1'"),
        }
        while self.eat(b'*') {
            self.factor(&mut letters)?;
        }
        Ok((coef, Word::new(letters)))
    }

    fn factor(&mut self, letters: &mut Vec<Letter>) -> Result<()> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                self.expect(b'(')?;
                let eps = self.integer("epsilon")?;
                self.expect(b',')?;
                let k = self.integer("an integer index")?;
                self.expect(b')')?;
                if eps != 0 && eps != 1 {
                    return Err(Error::BadEpsilon(
                        eps.clamp(i64::MIN as i128, i64::MAX as i128) as i64,
                    ));
                }
                letters.push(Letter::new(eps as i64, k, self.ctx)?);
                Ok(())
            }
            Some(b'1') => {
                let start = self.pos;
                self.pos += 1;
                if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos = start;
                    return self.fail("'z' or '1'");
                }
                Ok(())
            }
            _ => self.fail("'z' or '1'"),
        }
    }

    fn integer(&mut self, what: &str) -> Result<i128> {
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let digits = self.digits(what)?;
        let mut v: i128 = 0;
        for d in digits {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((d - b'0') as i128))
                .ok_or_else(|| {
                    Error::IndexOverflow(String::from_utf8_lossy(digits).into_owned())
                })?;
        }
        Ok(if negative { -v } else { v })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef: Fp,
    pub word: Vec<(u8, i64)>,
}

/// Wire form of a polynomial: `{"p": .., "terms": [{"coef": .., "word": [[eps,k],..]}, ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub p: u32,
    pub terms: Vec<TermJson>,
}

impl From<&Poly> for PolyJson {
    fn from(x: &Poly) -> Self {
        PolyJson {
            p: x.prime(),
            terms: x
                .terms()
                .map(|(w, coef)| TermJson {
                    coef,
                    word: w.letters().iter().map(|l| (l.eps, l.k)).collect(),
                })
                .collect(),
        }
    }
}

impl PolyJson {
    pub fn into_poly(self, ctx: &PrimeContext) -> Result<Poly> {
        if self.p != ctx.p() {
            return Err(Error::PrimeMismatch(self.p, ctx.p()));
        }
        let mut out = Poly::zero(ctx);
        for t in self.terms {
            let letters = t
                .word
                .iter()
                .map(|&(eps, k)| Letter::new(eps as i64, k as i128, ctx))
                .collect::<Result<Vec<_>>>()?;
            out.add_term(Word::new(letters), t.coef % ctx.p(), ctx);
        }
        Ok(out)
    }
}

pub fn encode_poly_json(x: &Poly) -> String {
    serde_json::to_string(&PolyJson::from(x)).expect("polynomial JSON is always serializable")
}

pub fn decode_poly_json(text: &str, ctx: &PrimeContext) -> Result<Poly> {
    let parsed: PolyJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    parsed.into_poly(ctx)
}

pub fn encode_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("value is serializable")
}
