//! Seeded rejection sampling for smooth hypersurfaces passing an arithmetic gate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::Fp;
use crate::invariants::{fedder_split_test, is_ordinary, is_smooth, HypersurfaceSpec};
use crate::poly::{monomials_of_degree, HomogPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchKind {
    /// smooth plane curve of genus at least one with invertible Hasse-Witt matrix
    OrdinaryCurve,
    /// smooth hypersurface passing Fedder's test
    SplitHypersurface,
    /// any smooth hypersurface
    Smooth,
}

impl std::str::FromStr for SearchKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary-curve" => Ok(SearchKind::OrdinaryCurve),
            "split-hypersurface" => Ok(SearchKind::SplitHypersurface),
            "smooth" => Ok(SearchKind::Smooth),
            other => Err(crate::error::Error::InvalidInput(format!("unknown search kind '{other}'"))),
        }
    }
}

/// A degree-`d` form in `n + 1` variables with uniform coefficients.
pub fn random_form<R: Rng>(fp: Fp, n: usize, d: u32, rng: &mut R) -> HomogPoly {
    let terms = monomials_of_degree(n + 1, d).into_iter().map(|m| (m, rng.gen_range(0..fp.p()))).collect::<Vec<_>>();
    HomogPoly::from_terms(fp, n + 1, Some(d), terms).expect("consistent degrees")
}

fn passes(kind: SearchKind, h: &HypersurfaceSpec) -> bool {
    if !is_smooth(h) {
        return false;
    }
    match kind {
        SearchKind::Smooth => true,
        SearchKind::SplitHypersurface => fedder_split_test(h),
        SearchKind::OrdinaryCurve => h.n() == 2 && h.d() >= 3 && is_ordinary(h).unwrap_or(false),
    }
}

/// First of `budget` samples that is smooth and passes the gate for `kind`.
pub fn random_search(kind: SearchKind, p: u32, d: u32, n: usize, seed: u64, budget: usize) -> Result<Option<HypersurfaceSpec>> {
    let fp = Fp::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let g = random_form(fp, n, d, &mut rng);
        if g.is_zero() {
            continue;
        }
        let h = HypersurfaceSpec::new(g)?;
        if passes(kind, &h) {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_ordinary_cubic_and_split_surface() {
        let h = random_search(SearchKind::OrdinaryCurve, 2, 3, 2, 1, 500).unwrap().unwrap();
        assert!(is_ordinary(&h).unwrap() && is_smooth(&h));
        let h = random_search(SearchKind::SplitHypersurface, 2, 3, 3, 1, 500).unwrap().unwrap();
        assert!(fedder_split_test(&h));
        assert!(random_search(SearchKind::Smooth, 2, 3, 2, 1, 0).unwrap().is_none());
    }
}
