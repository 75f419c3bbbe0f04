//! Hand-written cursor parser shared by the textual syntaxes.
//!
//! Chains are written as signed sums of terms. A term is an optional
//! coefficient (`3`, `-1/2`) followed by `·`, `*` or plain juxtaposition and
//! a generator. Exponents accept `a^-3`, `a^{-3}` and `a^−3`. Whitespace is
//! ignored between tokens.

use crate::chain::FreeChain;
use crate::scalar::Ring;
use crate::{Error, Int, Result};

/// Position-tracking cursor over an input string.
#[derive(Clone, Debug)]
pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    /// One-based column (in characters) of the current position.
    pub fn column(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    /// Parse error at the current position.
    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { column: self.column(), message: message.into() }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    /// Next non-whitespace character, without consuming it.
    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// Next character exactly at the cursor (no whitespace skipping).
    pub fn peek_raw(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Consumes `token` if the input continues with it.
    pub fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    /// Consumes the first matching token.
    pub fn eat_any(&mut self, tokens: &[&str]) -> Option<usize> {
        tokens.iter().position(|t| self.eat(t))
    }

    pub fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    /// Consumes one character.
    pub fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.rest().chars().next()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    /// Fails unless the whole input has been consumed.
    pub fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            let c = self.peek().unwrap_or(' ');
            Err(self.error(format!("unexpected `{c}`")))
        }
    }

    fn eat_sign(&mut self) -> Option<bool> {
        match self.eat_any(&["-", "−", "+"]) {
            Some(0) | Some(1) => Some(true),
            Some(_) => Some(false),
            None => None,
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    /// Signed integer literal.
    pub fn parse_int(&mut self) -> Result<Int> {
        let start = self.clone();
        let negative = self.eat_sign().unwrap_or(false);
        let Some(d) = self.digits() else {
            return Err(self.error("expected an integer"));
        };
        let magnitude: Int = d.parse().map_err(|_| start.error("integer out of range"))?;
        Ok(if negative { -magnitude } else { magnitude })
    }

    /// Nonnegative integer literal.
    pub fn parse_natural(&mut self) -> Result<u32> {
        let at = self.clone();
        let d = self.digits().ok_or_else(|| self.error("expected a nonnegative integer"))?;
        d.parse().map_err(|_| at.error("integer out of range"))
    }

    /// Optional exponent after a generator letter: `^n`, `^{n}`; absent
    /// means 1.
    pub fn parse_exponent(&mut self) -> Result<Int> {
        if !self.eat("^") {
            return Ok(1);
        }
        if self.eat("{") {
            let n = self.parse_int()?;
            self.expect("}")?;
            Ok(n)
        } else {
            self.parse_int()
        }
    }

    /// Unsigned coefficient lexeme `p` or `p/q`, returned as text.
    fn coefficient_lexeme(&mut self) -> Option<String> {
        let save = self.pos;
        let num = self.digits()?;
        let mut out = num.to_string();
        let before_slash = self.pos;
        if self.eat("/") {
            match self.digits() {
                Some(den) => {
                    out.push('/');
                    out.push_str(den);
                }
                None => self.pos = before_slash,
            }
        }
        if out.is_empty() {
            self.pos = save;
            return None;
        }
        Some(out)
    }
}

/// Characters after a leading `1` that mark it as part of a generator name
/// rather than a coefficient.
const GENERATOR_CONTINUATIONS: &[char] = &['⊗', '[', '_', '('];

/// Parses a chain `±c·g ± c·g …`.
///
/// `key` parses one generator. `unit` is the generator written as a bare
/// coefficient (for example the contractible class `1`); when absent a bare
/// coefficient is rejected.
pub fn parse_chain<K, R, F>(input: &str, mut key: F, unit: Option<K>) -> Result<FreeChain<K, R>>
where
    K: Ord + Clone,
    R: Ring,
    F: FnMut(&mut Cursor<'_>) -> Result<K>,
{
    let mut cur = Cursor::new(input);
    let mut out = FreeChain::zero();
    if cur.at_end() {
        return Err(cur.error("empty input"));
    }
    let mut first = true;
    while !cur.at_end() {
        let negative = match cur.eat_sign() {
            Some(neg) => neg,
            None if first => false,
            None => return Err(cur.error("expected `+` or `-` between terms")),
        };
        first = false;
        let (coefficient, k) = parse_term::<K, R, F>(&mut cur, &mut key, unit.clone())?;
        let c = if negative { -coefficient } else { coefficient };
        out.add_term(k, c);
    }
    Ok(out)
}

fn parse_term<K, R, F>(cur: &mut Cursor<'_>, key: &mut F, unit: Option<K>) -> Result<(R, K)>
where
    K: Ord + Clone,
    R: Ring,
    F: FnMut(&mut Cursor<'_>) -> Result<K>,
{
    let start = cur.position();
    let at = cur.clone();
    let Some(lexeme) = cur.coefficient_lexeme() else {
        return Ok((R::one(), key(cur)?));
    };
    let coefficient = R::from_str(&lexeme)
        .map_err(|_| at.error(format!("coefficient `{lexeme}` is not in {}", R::TAG)))?;
    if cur.eat("·") || cur.eat("*") {
        return Ok((coefficient, key(cur)?));
    }
    match cur.peek() {
        Some(c) if GENERATOR_CONTINUATIONS.contains(&c) && !lexeme.contains('/') => {
            cur.reset(start);
            Ok((R::one(), key(cur)?))
        }
        None | Some('+') | Some('-') | Some('−') => match unit {
            Some(u) => Ok((coefficient, u)),
            None => Err(cur.error("expected a generator after the coefficient")),
        },
        Some(_) => Ok((coefficient, key(cur)?)),
    }
}
