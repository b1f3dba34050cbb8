//! Recursive-descent parser for rational expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' uint)?
//! base   := integer | identifier | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;

use super::rat::RatFun;
use super::VarSet;
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 1 << 12;

/// Parses `text` into a canonical rational function over `vars`.
pub fn parse_expression(text: &str, vars: &VarSet) -> Result<RatFun> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a VarSet,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
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

    fn expr(&mut self) -> Result<RatFun> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' {
                acc.add_ref(&rhs)
            } else {
                acc.sub_ref(&rhs)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFun> {
        let mut acc = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.factor()?;
            if c == b'*' {
                acc = acc.mul_ref(&rhs);
            } else {
                acc = acc.div_ref(&rhs).ok_or(Error::Parse {
                    pos: at,
                    msg: "division by zero".into(),
                })?;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatFun> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.factor()?.neg_ref());
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected nonnegative integer exponent"));
            }
            let e: u32 = digits
                .parse()
                .ok()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or(Error::Parse {
                    pos: start,
                    msg: format!("exponent `{digits}` too large"),
                })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn base(&mut self) -> Result<RatFun> {
        let nvars = self.vars.nvars();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits();
                let n: BigInt = digits.parse().expect("digit string");
                Ok(RatFun::from_rational(BigRational::from_integer(n), nvars))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.vars.index_of(name) {
                    Some(i) => Ok(RatFun::var(i, nvars)),
                    None => Err(Error::Parse {
                        pos: start,
                        msg: format!("unknown identifier `{name}`"),
                    }),
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> VarSet {
        VarSet::new(&["x1", "x2"], &["a"]).unwrap()
    }

    #[test]
    fn commutativity_collapses() {
        assert!(parse_expression("x1*x2 - x2*x1", &vars()).unwrap().is_zero());
    }

    #[test]
    fn gcd_reduction() {
        let v = vars();
        let lhs = parse_expression("(x1 - x2)^2 / (x1 - x2)", &v).unwrap();
        assert_eq!(lhs, parse_expression("x1 - x2", &v).unwrap());
    }

    #[test]
    fn parameter_expansion() {
        let v = vars();
        let lhs = parse_expression("(1 - a*x1)*(1 - a*x2)", &v).unwrap();
        let rhs = parse_expression("1 - x1*a - x2*a + x1*x2*a^2", &v).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn errors_carry_positions() {
        let v = vars();
        assert!(matches!(
            parse_expression("x1 + y", &v),
            Err(Error::Parse { pos: 5, .. })
        ));
        assert!(matches!(
            parse_expression("x1/(x2 - x2)", &v),
            Err(Error::Parse { pos: 3, .. })
        ));
        assert!(matches!(
            parse_expression("(x1 + 2", &v),
            Err(Error::Parse { pos: 7, .. })
        ));
    }

    #[test]
    fn print_reparse_fixed_point() {
        let v = vars();
        let names = v.names();
        for s in ["-x1^2*a/(3*x2 - 1)", "(x1 + x2)/(x1 - x2)^2", "7/3", "-2*x1/x2"] {
            let f = parse_expression(s, &v).unwrap();
            let printed = f.display_with(&names);
            assert_eq!(parse_expression(&printed, &v).unwrap(), f, "{printed}");
        }
    }
}
