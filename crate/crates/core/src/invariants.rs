//! Arithmetic side tests on a hypersurface `G = 0`: Fedder's splitting
//! criterion, the Hasse–Witt matrix of a plane curve, and smoothness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{EchelonBasis, Matrix};
use crate::poly::{monomials_of_degree, HomogPoly};
use crate::quotient::DegreeMonomials;

/// A hypersurface in `P^n` cut out by a nonzero form `G` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypersurfaceSpec {
    g: HomogPoly,
}

impl HypersurfaceSpec {
    pub fn new(g: HomogPoly) -> Result<Self> {
        if g.is_zero() {
            return Err(Error::ZeroModP(g.p()));
        }
        if g.degree() == 0 {
            return Err(Error::InvalidInput("G must have degree at least 1".into()));
        }
        if g.nvars() < 3 {
            return Err(Error::InvalidInput(format!("need at least 3 variables, got {}", g.nvars())));
        }
        Ok(HypersurfaceSpec { g })
    }

    pub fn g(&self) -> &HomogPoly {
        &self.g
    }

    pub fn p(&self) -> u32 {
        self.g.p()
    }

    pub fn d(&self) -> u32 {
        self.g.degree()
    }

    /// Dimension of the ambient projective space.
    pub fn n(&self) -> usize {
        self.g.nvars() - 1
    }

    pub fn dim_x(&self) -> usize {
        self.n() - 1
    }

    pub fn genus(&self) -> Result<u32> {
        genus(self)
    }
}

/// `(d-1)(d-2)/2` for a plane curve.
pub fn genus(h: &HypersurfaceSpec) -> Result<u32> {
    if h.n() != 2 {
        return Err(Error::NotACurve(h.n()));
    }
    let d = h.d();
    Ok((d - 1) * (d.saturating_sub(2)) / 2)
}

/// Fedder: `X` is Frobenius split iff `G^{p-1}` is not in `(x_0^p, ..., x_n^p)`,
/// i.e. some monomial of `G^{p-1}` has every exponent at most `p - 1`.
pub fn fedder_split_test(h: &HypersurfaceSpec) -> bool {
    let p = h.p();
    h.g.pow((p - 1) as u64)
        .terms()
        .any(|(m, _)| m.exps().iter().all(|&e| e < p))
}

pub fn degree_bound_check(h: &HypersurfaceSpec) -> bool {
    h.d() as usize <= h.n() + 1
}

/// Matrix of the `p`-linear Frobenius on `H^1(X, O_X)` for a plane curve,
/// in the basis of interior monomials `x^a y^b z^c` (`a, b, c >= 1`, `a+b+c = d`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseWittMatrix {
    pub basis: Vec<[u32; 3]>,
    pub entries: Vec<Vec<u32>>,
}

impl HasseWittMatrix {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn is_invertible(&self, fp: Fp) -> Result<bool> {
        Ok(Matrix::from_rows(fp, &self.entries, self.size()).det()? != 0)
    }
}

pub fn hasse_witt(h: &HypersurfaceSpec) -> Result<HasseWittMatrix> {
    let g = genus(h)?;
    if g == 0 {
        return Err(Error::GenusZero);
    }
    let p = h.p() as i64;
    let basis: Vec<[u32; 3]> = monomials_of_degree(3, h.d())
        .into_iter()
        .filter(|m| m.exps().iter().all(|&e| e >= 1))
        .map(|m| [m.exps()[0], m.exps()[1], m.exps()[2]])
        .collect();
    debug_assert_eq!(basis.len(), g as usize);
    let power = h.g.pow((p - 1) as u64);
    let entries = basis
        .iter()
        .map(|ai| {
            basis
                .iter()
                .map(|aj| {
                    let exps: Vec<i64> = (0..3).map(|k| p * aj[k] as i64 - ai[k] as i64).collect();
                    power.coeff_of(&exps)
                })
                .collect()
        })
        .collect();
    Ok(HasseWittMatrix { basis, entries })
}

/// Genus-zero curves count as ordinary.
pub fn is_ordinary(h: &HypersurfaceSpec) -> Result<bool> {
    if genus(h)? == 0 {
        return Ok(true);
    }
    hasse_witt(h)?.is_invertible(h.g.fp())
}

/// Degree at which the Jacobian ideal is compared with the full polynomial ring.
pub fn smoothness_test_degree(d: u32, n: usize) -> u32 {
    let d = d as i64;
    let n = n as i64;
    let macaulay = (d - 1) + (n + 1) * (d - 2) + 1;
    // n + 1 general degree-d combinations of G and x_j dG/dx_i form a regular
    // sequence whenever the ideal is irrelevant, so this degree always suffices
    let regular_sequence = (n + 1) * (d - 1) + 1;
    macaulay.max(regular_sequence).max(0) as u32
}

/// `J = (G, dG/dx_0, ..., dG/dx_n)` is checked to contain every form of degree `E`.
/// A true result certifies that the projective singular locus is empty.
pub fn is_smooth(h: &HypersurfaceSpec) -> bool {
    let nvars = h.g.nvars();
    let e = smoothness_test_degree(h.d(), h.n());
    let target = DegreeMonomials::new(nvars, e as i64);
    let mut span = EchelonBasis::new(h.g.fp(), target.len());
    let mut generators = vec![h.g.clone()];
    generators.extend((0..nvars).map(|i| h.g.derivative(i)).filter(|f| !f.is_zero()));
    for f in &generators {
        for u in monomials_of_degree(nvars, e - f.degree()) {
            let prod = f.mul_monomial(&u, 1);
            span.insert(&prod.to_dense(&target.index, target.len()));
            if span.dim() == target.len() {
                return true;
            }
        }
    }
    false
}
