//! Sparse homogeneous polynomials over `F_p`.
//!
//! Monomials are ordered graded-lexicographically with `x0 > x1 > ... > xn`;
//! a polynomial stores only nonzero coefficients, keyed by monomial, and always
//! carries its degree so that the zero polynomial still has a degree tag.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec, Fp};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn mul_var(&self, i: usize) -> Monomial {
        let mut e = self.0.clone();
        e[i] += 1;
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    pub fn scale_exps(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of `degree` in `nvars` variables, in descending graded-lex order.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            cur.push(left);
            out.push(Monomial(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(nvars, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    rec(nvars, 0, degree, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// `C(n, k)` with `C(n, k) = 0` for `n < 0`.
pub fn binomial(n: i64, k: i64) -> usize {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of monomials of degree `degree` in `nvars` variables.
pub fn count_monomials(nvars: usize, degree: i64) -> usize {
    if degree < 0 {
        return 0;
    }
    binomial(degree + nvars as i64 - 1, nvars as i64 - 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogPoly {
    fp: Fp,
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, u32>,
}

impl HomogPoly {
    pub fn zero(fp: Fp, nvars: usize, degree: u32) -> Self {
        HomogPoly { fp, nvars, degree, terms: BTreeMap::new() }
    }

    pub fn constant(fp: Fp, nvars: usize, c: u32) -> Self {
        let mut p = Self::zero(fp, nvars, 0);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(fp: Fp, nvars: usize, i: usize) -> Self {
        Self::term(fp, Monomial::var(nvars, i), 1)
    }

    pub fn term(fp: Fp, m: Monomial, c: u32) -> Self {
        let mut p = Self::zero(fp, m.nvars(), m.degree());
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates. All monomials
    /// must share one total degree; an empty term list needs `degree` to be given.
    pub fn from_terms<I>(fp: Fp, nvars: usize, degree: Option<u32>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, u32)>,
    {
        let mut out: Option<HomogPoly> = degree.map(|d| Self::zero(fp, nvars, d));
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::VarMismatch(m.nvars(), nvars));
            }
            let poly = out.get_or_insert_with(|| Self::zero(fp, nvars, m.degree()));
            if m.degree() != poly.degree {
                return Err(Error::NotHomogeneous);
            }
            poly.add_term(m, c);
        }
        out.ok_or_else(|| Error::InvalidInput("empty term list without a degree".into()))
    }

    fn add_term(&mut self, m: Monomial, c: u32) {
        debug_assert_eq!(m.degree(), self.degree);
        let c = c % self.fp.p();
        if c == 0 {
            return;
        }
        let fp = self.fp;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = fp.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn p(&self) -> u32 {
        self.fp.p()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().rev().map(|(m, &c)| (m, c))
    }

    pub fn leading(&self) -> Option<(&Monomial, u32)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Coefficient at a formal exponent vector; any negative entry gives 0.
    pub fn coeff_of(&self, exps: &[i64]) -> u32 {
        if exps.len() != self.nvars || exps.iter().any(|&e| e < 0) {
            return 0;
        }
        self.coeff(&Monomial(exps.iter().map(|&e| e as u32).collect()))
    }

    fn check_compatible(&self, other: &HomogPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarMismatch(self.nvars, other.nvars));
        }
        if self.fp != other.fp {
            return Err(Error::FieldMismatch(self.p(), other.p()));
        }
        Ok(())
    }

    pub fn add(&self, other: &HomogPoly) -> Result<HomogPoly> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HomogPoly) -> Result<HomogPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> HomogPoly {
        self.scale(self.fp.neg(1))
    }

    pub fn scale(&self, c: u32) -> HomogPoly {
        let c = c % self.p();
        let mut out = Self::zero(self.fp, self.nvars, self.degree);
        if c != 0 {
            out.terms = self.terms.iter().map(|(m, &x)| (m.clone(), self.fp.mul(x, c))).collect();
        }
        out
    }

    pub fn mul(&self, other: &HomogPoly) -> Result<HomogPoly> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.fp, self.nvars, self.degree + other.degree);
        let fp = self.fp;
        let mut acc: std::collections::HashMap<Monomial, u32> =
            std::collections::HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                let e = acc.entry(m1.mul(m2)).or_insert(0);
                *e = fp.add(*e, fp.mul(c1, c2));
            }
        }
        out.terms = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial, c: u32) -> HomogPoly {
        let mut out = Self::zero(self.fp, self.nvars, self.degree + m.degree());
        let c = c % self.p();
        if c != 0 {
            out.terms = self.terms.iter().map(|(t, &x)| (t.mul(m), self.fp.mul(x, c))).collect();
        }
        out
    }

    /// Term-wise `p^t`-th power, which equals `f^{p^t}` in characteristic `p`.
    pub fn frobenius(&self, t: u32) -> HomogPoly {
        let q = (self.p() as u64).pow(t) as u32;
        let mut out = Self::zero(self.fp, self.nvars, self.degree * q);
        out.terms = self
            .terms
            .iter()
            .map(|(m, &c)| (m.scale_exps(q), self.fp.pow(c, q as u64)))
            .collect();
        out
    }

    fn pow_binary(&self, mut e: u64) -> HomogPoly {
        let mut acc = Self::constant(self.fp, self.nvars, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("compatible");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("compatible");
            }
        }
        acc
    }

    /// `f^e`, splitting `e` into base-`p` digits: `f^e = prod_t (f^{e_t})^{p^t}`.
    pub fn pow(&self, e: u64) -> HomogPoly {
        let p = self.p() as u64;
        let mut acc = Self::constant(self.fp, self.nvars, 1);
        let mut rest = e;
        let mut t = 0;
        while rest > 0 {
            let digit = rest % p;
            if digit > 0 {
                let part = self.pow_binary(digit).frobenius(t);
                acc = acc.mul(&part).expect("compatible");
            }
            rest /= p;
            t += 1;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> HomogPoly {
        let mut out = Self::zero(self.fp, self.nvars, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (m, &c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), self.fp.mul(c, e % self.p()));
        }
        out
    }

    /// Normal form modulo the principal ideal `(g)`: single-divisor division in
    /// graded-lex order. No monomial of the result is divisible by `lead(g)`.
    pub fn reduce_mod(&self, g: &HomogPoly) -> Result<HomogPoly> {
        self.check_compatible(g)?;
        let (lead, lc) = g.leading().ok_or(Error::InvalidInput("division by zero polynomial".into()))?;
        let lead = lead.clone();
        let lc_inv = self.fp.inv(lc)?;
        let mut f = self.clone();
        loop {
            let hit = f
                .terms
                .iter()
                .rev()
                .find_map(|(m, &c)| lead.quotient_of(m).map(|q| (q, c)));
            let Some((q, c)) = hit else { break };
            let factor = self.fp.neg(self.fp.mul(c, lc_inv));
            for (t, &gc) in &g.terms {
                f.add_term(t.mul(&q), self.fp.mul(factor, gc));
            }
        }
        Ok(f)
    }

    /// Exact quotient `self / g`, or `None` if `g` does not divide `self`.
    pub fn div_exact(&self, g: &HomogPoly) -> Result<Option<HomogPoly>> {
        self.check_compatible(g)?;
        let (lead, lc) = g.leading().ok_or(Error::InvalidInput("division by zero polynomial".into()))?;
        if g.degree > self.degree {
            return Ok(if self.is_zero() { Some(Self::zero(self.fp, self.nvars, 0)) } else { None });
        }
        let lead = lead.clone();
        let lc_inv = self.fp.inv(lc)?;
        let mut rem = self.clone();
        let mut q = Self::zero(self.fp, self.nvars, self.degree - g.degree);
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c)) {
            let Some(qm) = lead.quotient_of(&m) else {
                return Ok(None);
            };
            let qc = self.fp.mul(c, lc_inv);
            q.add_term(qm.clone(), qc);
            let neg = self.fp.neg(qc);
            for (t, &gc) in &g.terms {
                rem.add_term(t.mul(&qm), self.fp.mul(neg, gc));
            }
        }
        Ok(Some(q))
    }

    /// Evaluates at a point of `F_{p^k}^{nvars}`.
    pub fn eval(&self, field: &FieldSpec, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.nvars);
        assert_eq!(field.p, self.p());
        let mut powers: Vec<Vec<FieldElement>> = point
            .iter()
            .map(|x| {
                let mut v = vec![field.one()];
                for _ in 0..self.degree {
                    let next = field.mul(v.last().unwrap(), x);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = field.zero();
        for (m, &c) in &self.terms {
            let mut t = field.from_prime(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = field.mul(&t, &powers[i][e as usize]);
                }
            }
            acc = field.add(&acc, &t);
        }
        powers.clear();
        acc
    }

    /// Dense coefficient vector against a monomial list (missing monomials read 0).
    pub fn to_dense(&self, index: &std::collections::HashMap<Monomial, usize>, len: usize) -> Vec<u32> {
        let mut v = vec![0; len];
        for (m, &c) in &self.terms {
            v[index[m]] = c;
        }
        v
    }
}

pub(crate) fn var_name(nvars: usize, i: usize) -> String {
    if nvars <= 4 {
        ["x", "y", "z", "w"][i].to_string()
    } else {
        format!("x{i}")
    }
}

impl fmt::Display for HomogPoly {
    /// Renders in the input grammar, e.g. `x^3+2*x*y*z+z^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let mut factors = Vec::new();
            for (i, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(var_name(self.nvars, i)),
                    _ => factors.push(format!("{}^{}", var_name(self.nvars, i), e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{c}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn f(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::new(vec![2, 0, 0]);
        let b = Monomial::new(vec![1, 1, 0]);
        let c = Monomial::new(vec![0, 0, 3]);
        assert!(a > b);
        assert!(c > a);
        let all = monomials_of_degree(3, 2);
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(count_monomials(4, 3), 20);
        assert_eq!(count_monomials(3, -1), 0);
    }

    #[test]
    fn mul_examples() {
        let x0 = HomogPoly::var(f(2), 3, 0);
        let x1 = HomogPoly::var(f(2), 3, 1);
        assert_eq!(x0.mul(&x1).unwrap().to_string(), "x*y");
        let s = x0.add(&x1).unwrap();
        assert_eq!(s.mul(&s).unwrap().to_string(), "x^2+y^2");
    }

    #[test]
    fn mul_rejects_mismatched_vars() {
        let a = HomogPoly::var(f(5), 3, 0);
        let b = HomogPoly::var(f(5), 4, 0);
        assert_eq!(a.mul(&b), Err(Error::VarMismatch(3, 4)));
    }

    #[test]
    fn pow_examples() {
        let g = parse_poly("x+y", 5, Some(3)).unwrap();
        assert_eq!(g.pow(0).to_string(), "1");
        let g2 = parse_poly("x+y", 2, Some(3)).unwrap();
        assert_eq!(g2.pow(2).to_string(), "x^2+y^2");
        let fermat = parse_poly("x^3+y^3+z^3", 7, None).unwrap();
        assert_eq!(fermat.pow(6).coeff_of(&[6, 6, 6]), 6);
    }

    #[test]
    fn coeff_of_examples() {
        let g = parse_poly("x^2+2*y^2", 5, Some(3)).unwrap();
        assert_eq!(g.coeff_of(&[0, 2, 0]), 2);
        assert_eq!(g.coeff_of(&[0, 0, 2]), 0);
        assert_eq!(g.coeff_of(&[3, -1, 0]), 0);
    }

    #[test]
    fn reduce_examples() {
        let g = parse_poly("x^3+y^3+z^3+x*y*z", 2, None).unwrap();
        assert!(g.reduce_mod(&g).unwrap().is_zero());
        let low = parse_poly("x*y+z^2", 2, Some(3)).unwrap();
        assert_eq!(low.reduce_mod(&g).unwrap(), low);
        let f = parse_poly("x^3*y", 2, Some(3)).unwrap();
        let r = f.reduce_mod(&g).unwrap();
        let lead = g.leading().unwrap().0.clone();
        assert!(r.terms().all(|(m, _)| !lead.divides(m)));
        // f - r is a multiple of g
        let diff = f.sub(&r).unwrap();
        let q = diff.div_exact(&g).unwrap().expect("f - r in (G)");
        assert_eq!(q.mul(&g).unwrap(), diff);
    }

    #[test]
    fn derivative_in_char_p() {
        let g = parse_poly("x^3+y^3+z^3+2*x*y*z", 3, None).unwrap();
        assert_eq!(g.derivative(0).to_string(), "2*y*z");
    }

    #[test]
    fn div_exact_detects_non_divisible() {
        let g = parse_poly("x^2+y*z", 7, None).unwrap();
        let h = parse_poly("x+y", 7, Some(3)).unwrap();
        let prod = g.mul(&h).unwrap();
        assert_eq!(prod.div_exact(&g).unwrap(), Some(h.clone()));
        let other = prod.add(&parse_poly("z^3", 7, Some(3)).unwrap()).unwrap();
        assert_eq!(other.div_exact(&g).unwrap(), None);
    }
}
