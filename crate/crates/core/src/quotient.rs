//! The hypersurface coordinate ring `A = S/(G)`, degree by degree.
//!
//! `A_j` has the basis of degree-`j` monomials not divisible by `lead(G)`.
//! For every monomial of degree `j` we tabulate its normal form in that basis,
//! filled in ascending monomial order so each reduction step only looks up
//! smaller, already-finished monomials.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::poly::{monomials_of_degree, HomogPoly, Monomial};

/// Monomials of one degree in descending graded-lex order, with a reverse index.
#[derive(Debug, Clone)]
pub struct DegreeMonomials {
    pub list: Vec<Monomial>,
    pub index: HashMap<Monomial, usize>,
}

impl DegreeMonomials {
    pub fn new(nvars: usize, degree: i64) -> Self {
        let list = if degree < 0 { Vec::new() } else { monomials_of_degree(nvars, degree as u32) };
        let index = list.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        DegreeMonomials { list, index }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

/// Lazily grown cache of [`DegreeMonomials`] for the polynomial ring itself.
#[derive(Debug, Clone)]
pub struct MonomialCache {
    nvars: usize,
    tables: Vec<DegreeMonomials>,
    empty: DegreeMonomials,
}

impl MonomialCache {
    pub fn new(nvars: usize) -> Self {
        MonomialCache { nvars, tables: Vec::new(), empty: DegreeMonomials::new(nvars, -1) }
    }

    pub fn get(&mut self, degree: i64) -> &DegreeMonomials {
        if degree < 0 {
            return &self.empty;
        }
        while self.tables.len() <= degree as usize {
            let d = self.tables.len() as i64;
            self.tables.push(DegreeMonomials::new(self.nvars, d));
        }
        &self.tables[degree as usize]
    }
}

#[derive(Debug, Clone)]
struct DegreeTable {
    monomials: DegreeMonomials,
    /// positions (into `monomials.list`) of the standard monomials
    basis: Vec<usize>,
    /// normal form of every monomial as sparse (basis position, coefficient)
    normal_forms: Vec<Vec<(u32, u32)>>,
}

#[derive(Debug, Clone)]
pub struct QuotientRing {
    g: HomogPoly,
    lead: Monomial,
    tables: Vec<DegreeTable>,
}

impl QuotientRing {
    /// Tabulates `A_j` for `0 <= j <= max_degree`.
    pub fn new(g: &HomogPoly, max_degree: u32) -> Result<Self> {
        let (lead, _) = g.leading().ok_or(Error::InvalidInput("G is zero".into()))?;
        let mut ring = QuotientRing { g: g.clone(), lead: lead.clone(), tables: Vec::new() };
        for j in 0..=max_degree {
            let t = ring.build_degree(j)?;
            ring.tables.push(t);
        }
        Ok(ring)
    }

    fn build_degree(&self, j: u32) -> Result<DegreeTable> {
        let fp = self.g.fp();
        let monomials = DegreeMonomials::new(self.g.nvars(), j as i64);
        let n = monomials.len();
        let mut basis_pos = vec![usize::MAX; n];
        let mut basis = Vec::new();
        for (i, m) in monomials.list.iter().enumerate() {
            if !self.lead.divides(m) {
                basis_pos[i] = basis.len();
                basis.push(i);
            }
        }
        let lc_inv = fp.inv(self.g.leading().unwrap().1)?;
        let tail: Vec<(Monomial, u32)> = self
            .g
            .terms()
            .filter(|(m, _)| **m != self.lead)
            .map(|(m, c)| (m.clone(), fp.neg(fp.mul(c, lc_inv))))
            .collect();
        let mut normal_forms: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        let mut dense = vec![0u32; basis.len()];
        // ascending order = reverse of the descending list
        for i in (0..n).rev() {
            if basis_pos[i] != usize::MAX {
                normal_forms[i] = vec![(basis_pos[i] as u32, 1)];
                continue;
            }
            let q = self.lead.quotient_of(&monomials.list[i]).expect("divisible by lead");
            dense.iter_mut().for_each(|x| *x = 0);
            for (t, c) in &tail {
                let k = monomials.index[&t.mul(&q)];
                debug_assert!(k > i, "reduction must move to smaller monomials");
                for &(b, x) in &normal_forms[k] {
                    let b = b as usize;
                    dense[b] = fp.add(dense[b], fp.mul(*c, x));
                }
            }
            normal_forms[i] = dense
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(b, &x)| (b as u32, x))
                .collect();
        }
        Ok(DegreeTable { monomials, basis, normal_forms })
    }

    pub fn g(&self) -> &HomogPoly {
        &self.g
    }

    pub fn fp(&self) -> Fp {
        self.g.fp()
    }

    pub fn nvars(&self) -> usize {
        self.g.nvars()
    }

    pub fn max_degree(&self) -> i64 {
        self.tables.len() as i64 - 1
    }

    fn table(&self, j: i64) -> Result<&DegreeTable> {
        if j < 0 || j > self.max_degree() {
            return Err(Error::OutOfRange { degree: j as i32, lo: 0, hi: self.max_degree() as i32 });
        }
        Ok(&self.tables[j as usize])
    }

    /// `dim A_j` (0 for negative `j`).
    pub fn dim(&self, j: i64) -> Result<usize> {
        if j < 0 {
            return Ok(0);
        }
        Ok(self.table(j)?.basis.len())
    }

    pub fn basis(&self, j: i64) -> Result<Vec<&Monomial>> {
        if j < 0 {
            return Ok(Vec::new());
        }
        let t = self.table(j)?;
        Ok(t.basis.iter().map(|&i| &t.monomials.list[i]).collect())
    }

    /// Normal form of a monomial as a dense vector in the basis of `A_deg`.
    pub fn reduce_monomial(&self, m: &Monomial) -> Result<Vec<u32>> {
        let t = self.table(m.degree() as i64)?;
        let mut v = vec![0u32; t.basis.len()];
        for &(b, x) in &t.normal_forms[t.monomials.index[m]] {
            v[b as usize] = x;
        }
        Ok(v)
    }

    /// Accumulates `c * NF(m)` into `acc`.
    pub fn add_reduced_monomial(&self, acc: &mut [u32], m: &Monomial, c: u32) -> Result<()> {
        let fp = self.fp();
        let t = self.table(m.degree() as i64)?;
        for &(b, x) in &t.normal_forms[t.monomials.index[m]] {
            let b = b as usize;
            acc[b] = fp.add(acc[b], fp.mul(c, x));
        }
        Ok(())
    }

    pub fn reduce(&self, f: &HomogPoly) -> Result<Vec<u32>> {
        let d = f.degree() as i64;
        let mut v = vec![0u32; self.dim(d)?];
        for (m, c) in f.terms() {
            self.add_reduced_monomial(&mut v, m, c)?;
        }
        Ok(v)
    }

    /// The polynomial with coordinates `v` in the standard-monomial basis of `A_j`.
    pub fn lift(&self, j: u32, v: &[u32]) -> Result<HomogPoly> {
        let basis = self.basis(j as i64)?;
        HomogPoly::from_terms(
            self.fp(),
            self.nvars(),
            Some(j),
            basis.into_iter().zip(v).map(|(m, &c)| (m.clone(), c)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::poly::binomial;

    #[test]
    fn dimensions_follow_hilbert_function() {
        for (text, p) in [("x^3+y^3+z^3+x*y*z", 2), ("x^4+y^4+z^4+x*y*z*w+w^4", 3), ("x*y+z^2", 5)] {
            let g = parse_poly(text, p, None).unwrap();
            let n = g.nvars() as i64 - 1;
            let d = g.degree() as i64;
            let top = 3 * p as i64 * d;
            let ring = QuotientRing::new(&g, top.min(30) as u32).unwrap();
            for j in 0..=ring.max_degree() {
                let expected = binomial(j + n, n) - binomial(j - d + n, n);
                assert_eq!(ring.dim(j).unwrap(), expected, "{text} j={j}");
            }
        }
    }

    #[test]
    fn table_agrees_with_division() {
        let g = parse_poly("x^3+y^3+z^3+2*x*y*z+x^2*y", 5, None).unwrap();
        let ring = QuotientRing::new(&g, 8).unwrap();
        for m in monomials_of_degree(3, 8) {
            let f = HomogPoly::term(g.fp(), m.clone(), 1);
            let nf = f.reduce_mod(&g).unwrap();
            let lifted = ring.lift(8, &ring.reduce_monomial(&m).unwrap()).unwrap();
            assert_eq!(nf, lifted, "{m:?}");
        }
    }
}
