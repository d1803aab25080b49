//! Text grammar for polynomials:
//!
//! ```text
//! poly      := ('+'|'-')? term (('+'|'-') term)*
//! term      := coeff ('*'? monfactor)* | monfactor ('*'? monfactor)*
//! monfactor := var ('^' uint)?
//! var       := 'x' uint | 'x' | 'y' | 'z' | 'w'      (x, y, z, w alias x0..x3)
//! coeff     := uint
//! ```
//!
//! Whitespace is ignored and coefficients are reduced mod p.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::poly::{HomogPoly, Monomial};

struct Parser {
    chars: Vec<(usize, char)>,
    at: usize,
    fp: Fp,
}

type Term = (u32, BTreeMap<usize, u32>);

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map(|&(i, _)| i).unwrap_or_else(|| {
            self.chars.last().map(|&(i, c)| i + c.len_utf8()).unwrap_or(0)
        })
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn uint_mod_p(&mut self) -> Option<u32> {
        let mut seen = false;
        let mut acc: u64 = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            acc = (acc * 10 + c.to_digit(10).unwrap() as u64) % self.fp.p() as u64;
            seen = true;
            self.at += 1;
        }
        seen.then_some(acc as u32)
    }

    fn small_uint(&mut self) -> Result<Option<u32>> {
        let start = self.pos();
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.at += 1;
        }
        if digits.is_empty() {
            return Ok(None);
        }
        digits
            .parse::<u32>()
            .map(Some)
            .map_err(|_| Error::Parse { pos: start, msg: format!("integer {digits} too large") })
    }

    fn var(&mut self) -> Result<Option<usize>> {
        let idx = match self.peek() {
            Some('x') => {
                self.at += 1;
                self.small_uint()?.map(|i| i as usize).unwrap_or(0)
            }
            Some('y') => {
                self.at += 1;
                1
            }
            Some('z') => {
                self.at += 1;
                2
            }
            Some('w') => {
                self.at += 1;
                3
            }
            _ => return Ok(None),
        };
        Ok(Some(idx))
    }

    fn monfactor(&mut self, exps: &mut BTreeMap<usize, u32>) -> Result<bool> {
        let Some(v) = self.var()? else {
            return Ok(false);
        };
        let mut e = 1;
        if self.peek() == Some('^') {
            self.at += 1;
            match self.small_uint()? {
                Some(x) => e = x,
                None => return self.err("expected exponent after '^'"),
            }
        }
        *exps.entry(v).or_insert(0) += e;
        Ok(true)
    }

    fn term(&mut self) -> Result<Term> {
        let mut exps = BTreeMap::new();
        let coeff = self.uint_mod_p();
        let mut any_factor = false;
        loop {
            let save = self.at;
            let had_star = if self.peek() == Some('*') {
                if coeff.is_none() && !any_factor {
                    return self.err("'*' without a left operand");
                }
                self.at += 1;
                true
            } else {
                false
            };
            if self.monfactor(&mut exps)? {
                any_factor = true;
                continue;
            }
            if had_star {
                self.at = save + 1;
                return self.err("expected variable after '*'");
            }
            self.at = save;
            break;
        }
        if coeff.is_none() && !any_factor {
            return self.err("expected coefficient or variable");
        }
        Ok((coeff.unwrap_or(1), exps))
    }

    fn poly(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut negate = false;
        match self.peek() {
            Some('-') => {
                negate = true;
                self.at += 1;
            }
            Some('+') => self.at += 1,
            _ => {}
        }
        loop {
            let (c, e) = self.term()?;
            terms.push((if negate { self.fp.neg(c) } else { c }, e));
            match self.peek() {
                Some('+') => negate = false,
                Some('-') => negate = true,
                None => break,
                Some(other) => return self.err(format!("unexpected character '{other}'")),
            }
            self.at += 1;
        }
        Ok(terms)
    }
}

/// Parses `text` over `F_p`. With `nvars = None` the variable count is inferred
/// as `max(3, highest index + 1)`.
pub fn parse_poly(text: &str, p: u32, nvars: Option<usize>) -> Result<HomogPoly> {
    let fp = Fp::new(p)?;
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut parser = Parser { chars, at: 0, fp };
    if parser.chars.is_empty() {
        return parser.err("empty polynomial");
    }
    let terms = parser.poly()?;
    let max_index = terms.iter().flat_map(|(_, e)| e.keys().copied()).max();
    let n = match nvars {
        Some(n) => {
            if let Some(mi) = max_index.filter(|&mi| mi >= n) {
                return Err(Error::Parse { pos: 0, msg: format!("variable x{mi} out of range for {n} variables") });
            }
            n
        }
        None => max_index.map_or(3, |mi| (mi + 1).max(3)),
    };
    let degrees: Vec<u32> = terms.iter().map(|(_, e)| e.values().sum()).collect();
    if degrees.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::NotHomogeneous);
    }
    let monos = terms.into_iter().map(|(c, e)| {
        let mut exps = vec![0u32; n];
        for (i, x) in e {
            exps[i] += x;
        }
        (Monomial::new(exps), c)
    });
    HomogPoly::from_terms(fp, n, Some(degrees[0]), monos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_aliases_and_indices() {
        let g = parse_poly("x^3+y^3+z^3", 7, None).unwrap();
        assert_eq!((g.nvars(), g.degree()), (3, 3));
        let h = parse_poly("x0^4 + x1^4 + x2^4 + x3^4", 3, None).unwrap();
        assert_eq!((h.nvars(), h.degree()), (4, 4));
        let k = parse_poly("2xyz - 3 x0*x1 x2", 11, None).unwrap();
        assert_eq!(k.to_string(), "10*x*y*z");
    }

    #[test]
    fn rejects_inhomogeneous() {
        assert_eq!(parse_poly("x^3 + y^2", 5, None), Err(Error::NotHomogeneous));
    }

    #[test]
    fn reduces_coefficients() {
        let g = parse_poly("2*x^3", 2, None).unwrap();
        assert!(g.is_zero());
        assert_eq!(g.degree(), 3);
        assert_eq!(parse_poly("12x+y", 5, None).unwrap().to_string(), "2*x+y");
    }

    #[test]
    fn reports_positions() {
        match parse_poly("x^3 + y^", 5, None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("{other:?}"),
        }
        match parse_poly("x + * y", 5, None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_poly("x3", 5, Some(3)), Err(Error::Parse { .. })));
    }

    #[test]
    fn display_round_trips() {
        let g = parse_poly("x^3 + 4*x*y*z + 2 z^3 - y^2 z", 7, None).unwrap();
        let again = parse_poly(&g.to_string(), 7, Some(3)).unwrap();
        assert_eq!(g, again);
    }
}
