//! Text grammar for polynomial sets.
//!
//! ```text
//! polyset := poly (";" poly)* [";"]
//! poly    := ["+"|"-"] term (("+"|"-") term)*
//! term    := factor (["*"] factor)*
//! factor  := uint | var ["^" uint]
//! var     := "x" uint            (1-based)
//! ```
//!
//! Whitespace between tokens is ignored; implicit multiplication such as
//! `2x1^3x2` is accepted.

use num_bigint::BigInt;
use num_traits::One;

use super::{PolySet, Polynomial};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
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

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.pos, message: message.into() })
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn small_uint(&mut self) -> Result<u32> {
        let at = self.pos;
        self.digits()?.parse().map_err(|_| Error::Syntax {
            offset: at,
            message: "integer too large".into(),
        })
    }

    fn polyset(&mut self) -> Result<Vec<Polynomial>> {
        let mut polys = vec![self.poly()?];
        while self.peek() == Some(b';') {
            self.pos += 1;
            if self.peek().is_none() {
                break;
            }
            polys.push(self.poly()?);
        }
        if self.peek().is_some() {
            return self.err("unexpected character");
        }
        Ok(polys)
    }

    fn poly(&mut self) -> Result<Polynomial> {
        let mut terms = Vec::new();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let (e, c) = self.term()?;
            terms.push((e, c * sign));
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => break,
            }
            self.pos += 1;
        }
        let p = Polynomial::from_terms(self.nvars, terms);
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(p)
    }

    fn term(&mut self) -> Result<(Vec<u32>, BigInt)> {
        let mut exps = vec![0u32; self.nvars];
        let mut coeff = BigInt::one();
        self.factor(&mut exps, &mut coeff)?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    self.factor(&mut exps, &mut coeff)?;
                }
                Some(b'x') | Some(b'0'..=b'9') => self.factor(&mut exps, &mut coeff)?,
                _ => break,
            }
        }
        Ok((exps, coeff))
    }

    fn factor(&mut self, exps: &mut [u32], coeff: &mut BigInt) -> Result<()> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                let idx: usize = self.digits()?.parse().map_err(|_| Error::Syntax {
                    offset: at,
                    message: "variable index too large".into(),
                })?;
                if idx == 0 {
                    return Err(Error::Syntax { offset: at, message: "variables are 1-based".into() });
                }
                if idx > self.nvars {
                    return Err(Error::VariableOutOfRange { index: idx - 1, nvars: self.nvars });
                }
                let mut e = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    e = self.small_uint()?;
                }
                exps[idx - 1] += e;
                Ok(())
            }
            Some(b'0'..=b'9') => {
                let n: BigInt = self.digits()?.parse().expect("digits parse as integer");
                *coeff *= n;
                Ok(())
            }
            Some(_) => self.err("expected a number or a variable"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` as a `;`-separated set of polynomials in `nvars` variables.
pub fn parse_polyset(text: &str, nvars: usize) -> Result<PolySet> {
    if nvars == 0 {
        return Err(Error::Precondition("nvars must be positive".into()));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, nvars };
    let polys = p.polyset()?;
    PolySet::new(nvars, polys)
}

pub fn parse_polynomial(text: &str, nvars: usize) -> Result<Polynomial> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, nvars };
    let poly = p.poly()?;
    if p.peek().is_some() {
        return p.err("unexpected character");
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_accepted() {
        let s = parse_polyset("7", 3).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.polys()[0].is_constant());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_polyset("x1 + x4", 3),
            Err(Error::VariableOutOfRange { index: 3, nvars: 3 })
        ));
        assert!(matches!(parse_polyset("x1 - x1", 3), Err(Error::ZeroPolynomial)));
        match parse_polyset("x1 + $", 3) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_polyset("x0", 3).is_err());
        assert!(parse_polyset("", 3).is_err());
        assert!(parse_polyset("x1^", 3).is_err());
    }

    #[test]
    fn explicit_and_implicit_products_agree() {
        let a = parse_polynomial("2*x1^3*x2 - x3", 3).unwrap();
        let b = parse_polynomial("2x1^3x2-x3", 3).unwrap();
        let c = parse_polynomial(" 2 x1 ^ 3 x2 - x3 ", 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn trailing_separator() {
        assert_eq!(parse_polyset("x1; x2;", 2).unwrap().len(), 2);
    }
}
