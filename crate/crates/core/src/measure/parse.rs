//! Measure-spec grammar:
//!
//! ```text
//! measure := "semicircle" | "arcsine(" num "," num ")"
//!          | "meixner(" num "," num "," num ")"
//!          | "atoms(" pair { "," pair } ")" [ ":std" ]
//! pair    := "(" num "," num ")"
//! ```
//!
//! Whitespace is ignored everywhere; offsets in errors refer to the input bytes.

use super::{standardize, Measure};
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn fail<T>(&mut self, expected: &str) -> Result<T> {
        self.skip_ws();
        Err(Error::ParseError { offset: self.pos, expected: expected.to_string() })
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        // Keywords may contain no whitespace, but "atoms (" is fine.
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.fail(&format!("`{token}`"))
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let bytes = rest.as_bytes();
        let mut i = 0;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let digits_start = i;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i == digits_start {
            return self.fail("number");
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            let exp_start = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > exp_start {
                i = j;
            }
        }
        match rest[..i].parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += i;
                Ok(v)
            }
            _ => self.fail("number"),
        }
    }

    fn pair(&mut self) -> Result<(f64, f64)> {
        self.expect("(")?;
        let u = self.number()?;
        self.expect(",")?;
        let w = self.number()?;
        self.expect(")")?;
        Ok((u, w))
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }
}

/// Parse a measure spec such as `atoms((0,0.75),(1,0.25)):std`.
pub fn parse_measure(spec: &str) -> Result<Measure> {
    let mut cur = Cursor { src: spec, pos: 0 };
    if cur.at_end() {
        return cur.fail("measure");
    }
    let start = cur.pos;
    let invalid = |e: Error, offset: usize| match e {
        Error::InvalidMeasure(msg) | Error::DegenerateMeasure(msg) => {
            Error::ParseError { offset, expected: format!("valid parameters ({msg})") }
        }
        other => other,
    };
    let measure = if cur.eat("semicircle") {
        Measure::Semicircle
    } else if cur.eat("arcsine") {
        cur.expect("(")?;
        let c = cur.number()?;
        cur.expect(",")?;
        let h = cur.number()?;
        cur.expect(")")?;
        Measure::arcsine(c, h).map_err(|e| invalid(e, start))?
    } else if cur.eat("meixner") {
        cur.expect("(")?;
        let a = cur.number()?;
        cur.expect(",")?;
        let b = cur.number()?;
        cur.expect(",")?;
        let d = cur.number()?;
        cur.expect(")")?;
        Measure::free_meixner(a, b, d).map_err(|e| invalid(e, start))?
    } else if cur.eat("atoms") {
        cur.expect("(")?;
        let mut pairs = vec![cur.pair()?];
        while cur.eat(",") {
            pairs.push(cur.pair()?);
        }
        cur.expect(")")?;
        let m = Measure::atomic(&pairs).map_err(|e| invalid(e, start))?;
        if cur.eat(":std") {
            standardize(&m).map_err(|e| invalid(e, start))?
        } else {
            m
        }
    } else {
        return cur.fail("one of `semicircle`, `arcsine(`, `meixner(`, `atoms(`");
    };
    if !cur.at_end() {
        return cur.fail("end of input");
    }
    Ok(measure)
}
