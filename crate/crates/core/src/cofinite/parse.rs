//! Text syntax: `x3`, `y1|y4`, `Y(2k)`, `Y(3k+1)`, `Y(N)`, `Y{01;1}`, `0`,
//! `1`, with `|` (join), `&` (meet, binds tighter) and parentheses.

use super::{CofElem, NatSet};
use crate::error::{Error, Result};

pub(super) fn parse(text: &str) -> Result<CofElem> {
    let mut p = Parser {
        src: text,
        rest: text.trim_start(),
    };
    let e = p.join()?;
    if !p.rest.is_empty() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    rest: &'a str,
}

impl<'a> Parser<'a> {
    fn error(&self, what: &str) -> Error {
        let at = self.src.len() - self.rest.len();
        Error::Parse(format!("{what} at offset {at} in {:?}", self.src))
    }

    fn eat(&mut self, c: char) -> bool {
        match self.rest.strip_prefix(c) {
            Some(r) => {
                self.rest = r.trim_start();
                true
            }
            None => false,
        }
    }

    fn take_until(&mut self, close: char) -> Result<&'a str> {
        let end = self
            .rest
            .find(close)
            .ok_or_else(|| self.error(&format!("missing {close:?}")))?;
        let body = &self.rest[..end];
        self.rest = self.rest[end + 1..].trim_start();
        Ok(body)
    }

    fn number(&mut self) -> Result<u64> {
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest.len());
        let n = self.rest[..end]
            .parse()
            .map_err(|_| self.error("expected a number"))?;
        self.rest = self.rest[end..].trim_start();
        Ok(n)
    }

    fn join(&mut self) -> Result<CofElem> {
        let mut e = self.meet()?;
        while self.eat('|') {
            e = e.join(&self.meet()?);
        }
        Ok(e)
    }

    fn meet(&mut self) -> Result<CofElem> {
        let mut e = self.atom()?;
        while self.eat('&') {
            e = e.meet(&self.atom()?);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<CofElem> {
        if self.eat('(') {
            let e = self.join()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(e);
        }
        if self.eat('0') {
            return Ok(CofElem::zero());
        }
        if self.eat('1') {
            return Ok(CofElem::one());
        }
        if self.eat('x') {
            let m = self.number()?;
            return CofElem::from_parts(Some(m), NatSet::empty());
        }
        if self.eat('y') {
            let n = self.number()?;
            if n == 0 {
                return Err(self.error("y indices start at 1"));
            }
            return Ok(CofElem::y(n));
        }
        if self.eat('Y') {
            if self.eat('(') {
                let body = self.take_until(')')?;
                return Ok(CofElem::ys(progression(body).map_err(|_| {
                    Error::Parse(format!("bad progression {body:?} in {:?}", self.src))
                })?));
            }
            if self.eat('{') {
                let body = self.take_until('}')?;
                return Ok(CofElem::ys(bits(body).map_err(|_| {
                    Error::Parse(format!("bad bit pattern {body:?} in {:?}", self.src))
                })?));
            }
            return Err(self.error("expected '(' or '{' after Y"));
        }
        Err(self.error("expected an element"))
    }
}

/// `N`, `k`, `ak`, `k+b`, `ak+b`: the set `{a·k + b : k ≥ 0} ∩ ℕ`.
fn progression(body: &str) -> Result<NatSet> {
    let body: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    if body == "N" || body == "ℕ" {
        return Ok(NatSet::all());
    }
    let (lin, off) = match body.split_once('+') {
        Some((l, o)) => (l, o.parse::<u64>().map_err(|_| Error::Parse(body.clone()))?),
        None => (body.as_str(), 0),
    };
    let coef = lin.strip_suffix('k').ok_or_else(|| Error::Parse(body.clone()))?;
    let a = if coef.is_empty() {
        1
    } else {
        coef.parse().map_err(|_| Error::Parse(body.clone()))?
    };
    NatSet::progression(a, off)
}

/// `pre;per` as 0/1 strings.
fn bits(body: &str) -> Result<NatSet> {
    let (pre, per) = body.split_once(';').ok_or_else(|| Error::Parse(body.into()))?;
    let conv = |s: &str| {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(body.into())),
            })
            .collect::<Result<Vec<bool>>>()
    };
    NatSet::from_bits(conv(pre)?, conv(per)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        for text in [
            "0", "1", "x3", "y1|y4", "Y(2k)", "Y(2k+1)", "Y(3k)", "y2|x4", "Y(k)", "Y(k+4)", "Y(2k+5)",
        ] {
            let e = parse(text).unwrap();
            assert_eq!(e.to_string(), text);
        }
        assert_eq!(parse("Y(N)").unwrap(), parse("Y(k)").unwrap());
        assert_eq!(parse("Y{;01}").unwrap(), parse("Y(2k)").unwrap());
        assert_eq!(parse("(y1 | y2) & y2").unwrap(), CofElem::y(2));
        assert_eq!(parse("y1 | y2 & y3").unwrap(), CofElem::y(1));
        assert_eq!(parse("Y{1;0}").unwrap(), CofElem::y(1));
        assert_eq!(parse("Y{0;1}").unwrap().to_string(), "Y(k+2)");
    }

    #[test]
    fn rejects_garbage() {
        for text in ["", "x", "y0", "Y(2j)", "Y{;}", "(y1", "y1 y2", "z3", "Y{12;0}"] {
            assert!(parse(text).is_err(), "{text}");
        }
    }
}
