//! Text format for systems.
//!
//! ```text
//! # comment
//! m = 2
//! poly: (x1 - 1)^2 + (x2 - 1)^2 - 4 - t*x1*x2 - t^2*x1
//! poly: (x1 + 1)^2 + (x2 + 1)^2 - 4 - t x1
//! ```
//!
//! The `m = ` line is optional (defaults to the number of polynomials) and
//! the `poly:` prefix may be omitted. Products may be written with `*` or by
//! juxtaposition; `^` takes a nonnegative integer exponent.

use std::collections::BTreeMap;

use super::{Poly, PolySystem, Term};
use crate::error::{Error, Result};

type Key = (Vec<u32>, u32);
type Raw = BTreeMap<Key, i64>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    /// Column of `src[0]` in the original line.
    col0: usize,
    m: usize,
}

fn overflow() -> String {
    "coefficient overflow".to_string()
}

fn constant(m: usize, c: i64) -> Raw {
    let mut r = Raw::new();
    if c != 0 {
        r.insert((vec![0; m], 0), c);
    }
    r
}

fn add_into(acc: &mut Raw, other: &Raw, sign: i64) -> std::result::Result<(), String> {
    for (k, &c) in other {
        let slot = acc.entry(k.clone()).or_default();
        *slot = c.checked_mul(sign).and_then(|c| slot.checked_add(c)).ok_or_else(overflow)?;
    }
    acc.retain(|_, c| *c != 0);
    Ok(())
}

fn mul(a: &Raw, b: &Raw) -> std::result::Result<Raw, String> {
    let mut out = Raw::new();
    for ((ea, ta), ca) in a {
        for ((eb, tb), cb) in b {
            let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let c = ca.checked_mul(*cb).ok_or_else(overflow)?;
            let slot = out.entry((exps, ta + tb)).or_default();
            *slot = slot.checked_add(c).ok_or_else(overflow)?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.line, column: self.col0 + self.pos + 1, message: message.into() }
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

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse().map_err(|_| {
            self.pos = start;
            self.err("number too large")
        })
    }

    fn expr(&mut self) -> Result<Raw> {
        let mut acc = Raw::new();
        let mut sign = 1;
        if let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            if c == b'-' {
                sign = -1;
            }
        }
        loop {
            let at = self.pos;
            let t = self.term()?;
            add_into(&mut acc, &t, sign).map_err(|e| {
                self.pos = at;
                self.err(e)
            })?;
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Raw> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => self.pos += 1,
                Some(c) if c == b'(' || c == b'x' || c == b't' || c.is_ascii_digit() => {}
                _ => return Ok(acc),
            }
            let at = self.pos;
            let rhs = self.power()?;
            acc = mul(&acc, &rhs).map_err(|e| {
                self.pos = at;
                self.err(e)
            })?;
        }
    }

    fn power(&mut self) -> Result<Raw> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.pos;
        let e = self.number()?;
        if e > 1 << 16 {
            self.pos = at;
            return Err(self.err("exponent too large"));
        }
        let mut acc = constant(self.m, 1);
        for _ in 0..e {
            acc = mul(&acc, &base).map_err(|m| {
                self.pos = at;
                self.err(m)
            })?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Raw> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                let at = self.pos;
                self.pos += 1;
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return Err(self.err("expected a variable index after 'x'"));
                }
                let i = self.number()? as usize;
                if i == 0 || i > self.m {
                    self.pos = at;
                    return Err(self.err(format!("variable x{i} is not among x1..x{}", self.m)));
                }
                let mut exps = vec![0; self.m];
                exps[i - 1] = 1;
                Ok(BTreeMap::from([((exps, 0), 1)]))
            }
            Some(b't') => {
                self.pos += 1;
                Ok(BTreeMap::from([((vec![0; self.m], 1), 1)]))
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                let n = self.number()?;
                let n = i64::try_from(n).map_err(|_| {
                    self.pos = at;
                    self.err("number too large")
                })?;
                Ok(constant(self.m, n))
            }
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char))),
            None => Err(self.err("unexpected end of line")),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Parses the text format described in the module docs.
pub fn parse_system(text: &str) -> Result<PolySystem> {
    let mut declared: Option<(usize, usize)> = None;
    let mut bodies: Vec<(usize, usize, &str)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let lead = line.len() - trimmed.len();
        if let Some(rest) = trimmed.strip_prefix('m') {
            let rest_t = rest.trim_start();
            if let Some(num) = rest_t.strip_prefix('=') {
                let num = num.trim();
                let m: usize = num.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    column: lead + 1,
                    message: format!("bad dimension '{num}'"),
                })?;
                if declared.is_some() || !bodies.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        column: lead + 1,
                        message: "dimension must be declared once, before any polynomial".into(),
                    });
                }
                if m == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        column: lead + 1,
                        message: "dimension must be positive".into(),
                    });
                }
                declared = Some((m, line_no));
                continue;
            }
        }
        match trimmed.strip_prefix("poly:") {
            Some(rest) => bodies.push((line_no, lead + 5, rest)),
            None => bodies.push((line_no, lead, trimmed)),
        }
    }
    let m = declared.map_or(bodies.len(), |(m, _)| m);
    if m == 0 {
        return Err(Error::Parse { line: 1, column: 1, message: "no polynomials".into() });
    }
    if bodies.len() != m {
        let line = declared.map_or(1, |(_, l)| l);
        return Err(Error::Parse {
            line,
            column: 1,
            message: format!("system is not square: {} polynomials in {m} variables", bodies.len()),
        });
    }
    let mut polys = Vec::with_capacity(m);
    for (line, col0, body) in bodies {
        let mut p = Parser { src: body.as_bytes(), pos: 0, line, col0, m };
        let raw = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err(format!("unexpected '{}'", p.src[p.pos] as char)));
        }
        let terms = raw.into_iter().map(|((exps, t_exp), coeff)| Term { coeff, exps, t_exp });
        polys.push(Poly::from_terms(m, terms)?);
    }
    PolySystem::new(polys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(coeff: i64, exps: &[u32], t_exp: u32) -> Term {
        Term { coeff, exps: exps.to_vec(), t_exp }
    }

    #[test]
    fn one_variable() {
        let s = parse_system("m = 1\nx1^2 - 2").unwrap();
        assert_eq!(s.polys()[0].terms(), &[term(1, &[2], 0), term(-2, &[0], 0)]);
    }

    #[test]
    fn implicit_products_and_parentheses() {
        let s = parse_system("m=2\npoly: 3 t x1 (x2 - 1)\npoly: -(x1+x2)^2").unwrap();
        assert_eq!(s.polys()[0].terms(), &[term(3, &[1, 1], 1), term(-3, &[1, 0], 1)]);
        assert_eq!(s.polys()[1].terms(), &[term(-1, &[2, 0], 0), term(-2, &[1, 1], 0), term(-1, &[0, 2], 0)]);
    }

    #[test]
    fn undeclared_variable_reports_position() {
        let e = parse_system("m = 1\npoly: x1 + x2").unwrap_err();
        assert_eq!(e, Error::Parse { line: 2, column: 12, message: "variable x2 is not among x1..x1".into() });
    }

    #[test]
    fn non_square() {
        assert!(matches!(parse_system("m = 2\nx1 + x2"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_system("x1 + * 2"), Err(Error::Parse { line: 1, column: 6, .. })));
        assert!(matches!(parse_system("(x1 + 2"), Err(Error::Parse { .. })));
        assert!(matches!(parse_system("x1 ^ -1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn comments_and_blank_lines() {
        let s = parse_system("# a system\n\nm = 1  # one var\n  poly: x1 - 3 # root 3\n").unwrap();
        assert_eq!(s.m(), 1);
        assert_eq!(s.polys()[0].to_string(), "x1 - 3");
    }

    #[test]
    fn printing_round_trip() {
        let text = "m = 2\npoly: x1^2 - 2*x1*x2*t + x2 - 5\npoly: -x1*t^3 + 7\n";
        let s = parse_system(text).unwrap();
        assert_eq!(s.to_string(), text);
        assert_eq!(parse_system(&s.to_string()).unwrap(), s);
    }
}
