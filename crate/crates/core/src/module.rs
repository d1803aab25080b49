//! Graded modules over `S = F_p[x_0..x_n]` held degree by degree: one finite
//! dimensional piece per degree and, for each variable, a matrix from each piece
//! to the next. Everything downstream (saturation, generators, syzygies) is plain
//! linear algebra on these pieces.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::invariants::HypersurfaceSpec;
use crate::linalg::{EchelonBasis, Kernel, Matrix};
use crate::poly::{count_monomials, HomogPoly, Monomial};
use crate::quotient::{MonomialCache, QuotientRing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Provenance {
    Pushforward,
    B1Cokernel,
    Saturated { exponent: usize },
    Twisted { by: i32 },
}

#[derive(Debug, Clone)]
pub struct GradedModule {
    fp: Fp,
    nvars: usize,
    lo: i32,
    dims: Vec<usize>,
    /// `actions[k][i]`: multiplication by `x_i` from degree `lo + k` to `lo + k + 1`
    actions: Vec<Vec<Matrix>>,
    /// representative monomials in `A_{pm}` for modules built from the pushforward
    lifts: Option<Vec<Vec<Monomial>>>,
    provenance: Provenance,
}

impl GradedModule {
    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Dimension of the piece in degree `m`; zero outside the materialized range.
    pub fn dim(&self, m: i32) -> usize {
        if m < self.lo || m > self.hi() {
            0
        } else {
            self.dims[(m - self.lo) as usize]
        }
    }

    fn check_action_degree(&self, m: i32) -> Result<()> {
        if m >= self.hi() {
            return Err(Error::OutOfRange { degree: m + 1, lo: self.lo, hi: self.hi() });
        }
        Ok(())
    }

    /// Matrix of `x_i` on the piece of degree `m` (which must be materialized, as must `m + 1`).
    pub fn action(&self, i: usize, m: i32) -> Result<&Matrix> {
        if m < self.lo {
            return Err(Error::OutOfRange { degree: m, lo: self.lo, hi: self.hi() });
        }
        self.check_action_degree(m)?;
        Ok(&self.actions[(m - self.lo) as usize][i])
    }

    /// `x_i * v` for `v` in degree `m`. Degrees below the range are zero pieces.
    pub fn apply(&self, i: usize, m: i32, v: &[u32]) -> Result<Vec<u32>> {
        self.check_action_degree(m)?;
        if m < self.lo {
            return Ok(vec![0; self.dim(m + 1)]);
        }
        Ok(self.actions[(m - self.lo) as usize][i].mul_vec(v))
    }

    pub fn lifts(&self, m: i32) -> Option<&[Monomial]> {
        let lifts = self.lifts.as_ref()?;
        if m < self.lo || m > self.hi() {
            return None;
        }
        Some(&lifts[(m - self.lo) as usize])
    }

    /// `x_i x_j = x_j x_i` on every piece where both composites are materialized.
    pub fn check_commutativity(&self) -> bool {
        let k_max = self.actions.len().saturating_sub(1);
        (0..k_max).all(|k| {
            (0..self.nvars).all(|i| {
                (i + 1..self.nvars).all(|j| {
                    let a = self.actions[k + 1][j].matmul(&self.actions[k][i]);
                    let b = self.actions[k + 1][i].matmul(&self.actions[k][j]);
                    a == b
                })
            })
        })
    }

    /// The same module on the sub-range `[lo, hi]`.
    pub fn restrict(&self, lo: i32, hi: i32) -> Result<GradedModule> {
        if lo < self.lo || hi > self.hi() || lo > hi {
            return Err(Error::OutOfRange { degree: if lo < self.lo { lo } else { hi }, lo: self.lo, hi: self.hi() });
        }
        let a = (lo - self.lo) as usize;
        let b = (hi - self.lo) as usize;
        Ok(GradedModule {
            fp: self.fp,
            nvars: self.nvars,
            lo,
            dims: self.dims[a..=b].to_vec(),
            actions: self.actions[a..b].to_vec(),
            lifts: self.lifts.as_ref().map(|l| l[a..=b].to_vec()),
            provenance: self.provenance,
        })
    }
}

fn frobenius_ring(h: &HypersurfaceSpec, m_hi: i32) -> Result<QuotientRing> {
    if m_hi < 1 {
        return Err(Error::InvalidInput(format!("module range must reach degree 1, got {m_hi}")));
    }
    QuotientRing::new(h.g(), h.p() * m_hi as u32)
}

fn xp(nvars: usize, i: usize, p: u32) -> Monomial {
    Monomial::var(nvars, i).scale_exps(p)
}

/// `m ↦ A_{pm}` with `x_i` acting as multiplication by `x_i^p`, on `[0, m_hi]`.
pub fn pushforward_module(h: &HypersurfaceSpec, m_hi: i32) -> Result<GradedModule> {
    let ring = frobenius_ring(h, m_hi)?;
    let (fp, nvars, p) = (ring.fp(), ring.nvars(), h.p());
    let lifts: Vec<Vec<Monomial>> = (0..=m_hi)
        .map(|m| Ok(ring.basis(p as i64 * m as i64)?.into_iter().cloned().collect()))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = lifts.iter().map(Vec::len).collect();
    let actions = (0..m_hi as usize)
        .into_par_iter()
        .map(|m| {
            (0..nvars)
                .map(|i| {
                    let shift = xp(nvars, i, p);
                    let cols = lifts[m].iter().map(|b| ring.reduce_monomial(&b.mul(&shift))).collect::<Result<Vec<_>>>()?;
                    Ok(Matrix::from_columns(fp, dims[m + 1], &cols))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedModule { fp, nvars, lo: 0, dims, actions, lifts: Some(lifts), provenance: Provenance::Pushforward })
}

/// `m ↦ A_{pm} / {f^p : f ∈ A_m}` on `[0, m_hi]`.
///
/// The quotient basis is the set of standard monomials of `A_{pm}` that are not
/// pivots of the echelonized image, so each basis element carries a monomial lift.
pub fn b1_cokernel_module(h: &HypersurfaceSpec, m_hi: i32) -> Result<GradedModule> {
    let ring = frobenius_ring(h, m_hi)?;
    let (fp, nvars, p) = (ring.fp(), ring.nvars(), h.p());

    struct Piece {
        image: EchelonBasis,
        rest: Vec<usize>,
        basis: Vec<Monomial>,
    }
    let pieces = (0..=m_hi)
        .into_par_iter()
        .map(|m| {
            let target = p as i64 * m as i64;
            let basis: Vec<Monomial> = ring.basis(target)?.into_iter().cloned().collect();
            let mut image = EchelonBasis::new(fp, basis.len());
            let source = ring.basis(m as i64)?;
            for mu in &source {
                image.insert(&ring.reduce_monomial(&mu.scale_exps(p))?);
            }
            if image.dim() < source.len() {
                return Err(Error::NonInjectivePower {
                    degree: m,
                    target: target as i32,
                    kernel: source.len() - image.dim(),
                });
            }
            let mut is_pivot = vec![false; basis.len()];
            for &c in image.pivots() {
                is_pivot[c] = true;
            }
            let rest = (0..basis.len()).filter(|&c| !is_pivot[c]).collect();
            Ok(Piece { image, rest, basis })
        })
        .collect::<Result<Vec<_>>>()?;

    let actions = (0..m_hi as usize)
        .into_par_iter()
        .map(|m| {
            let (src, dst) = (&pieces[m], &pieces[m + 1]);
            (0..nvars)
                .map(|i| {
                    let shift = xp(nvars, i, p);
                    let cols = src
                        .rest
                        .iter()
                        .map(|&c| {
                            let v = dst.image.reduce(&ring.reduce_monomial(&src.basis[c].mul(&shift))?);
                            Ok(dst.rest.iter().map(|&k| v[k]).collect())
                        })
                        .collect::<Result<Vec<Vec<u32>>>>()?;
                    Ok(Matrix::from_columns(fp, dst.rest.len(), &cols))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let lifts: Vec<Vec<Monomial>> =
        pieces.iter().map(|pc| pc.rest.iter().map(|&c| pc.basis[c].clone()).collect()).collect();
    let dims = lifts.iter().map(Vec::len).collect();
    Ok(GradedModule { fp, nvars, lo: 0, dims, actions, lifts: Some(lifts), provenance: Provenance::B1Cokernel })
}

/// Solution space of `Hom(m^n, M)_deg`: unknowns `v_μ ∈ M_{deg+n}` for each
/// degree-`n` monomial `μ`, laid out in blocks, subject to `x_a v_{ν/x_a} = x_b v_{ν/x_b}`
/// for consecutive variables `a < b` dividing each degree-`(n+1)` monomial `ν`.
fn hom_kernel(module: &GradedModule, cache: &HomCache, deg: i32, n: usize) -> Result<Kernel> {
    let fp = module.fp;
    let top = deg + n as i32;
    let s = module.dim(top);
    if top > module.hi() || (n > 0 && top + 1 > module.hi()) {
        return Err(Error::NoStabilization { degree: deg, tried: n });
    }
    if n == 0 {
        let basis = (0..s)
            .map(|k| {
                let mut v = vec![0; s];
                v[k] = 1;
                v
            })
            .collect();
        return Ok(Kernel { basis, free: (0..s).collect() });
    }
    let mons = &cache.degrees[n];
    let next = &cache.degrees[n + 1];
    let t = module.dim(top + 1);
    let cols = mons.list.len() * s;
    let pairs: usize = next.list.iter().map(|nu| nu.exps().iter().filter(|&&e| e > 0).count() - 1).sum();
    let mut sys = Matrix::zeros(fp, pairs * t, cols);
    if s > 0 {
        let mut block = 0;
        for nu in &next.list {
            let support: Vec<usize> = (0..module.nvars).filter(|&i| nu.exps()[i] > 0).collect();
            for w in support.windows(2) {
                let (a, b) = (w[0], w[1]);
                let ia = mons.index[&Monomial::var(module.nvars, a).quotient_of(nu).unwrap()];
                let ib = mons.index[&Monomial::var(module.nvars, b).quotient_of(nu).unwrap()];
                let (ma, mb) = (module.action(a, top)?, module.action(b, top)?);
                for r in 0..t {
                    for c in 0..s {
                        let (x, y) = (ma.get(r, c), mb.get(r, c));
                        let row = block * t + r;
                        if x != 0 {
                            sys.set(row, ia * s + c, fp.add(sys.get(row, ia * s + c), x));
                        }
                        if y != 0 {
                            sys.set(row, ib * s + c, fp.sub(sys.get(row, ib * s + c), y));
                        }
                    }
                }
                block += 1;
            }
        }
    }
    Ok(sys.kernel())
}

struct HomCache {
    degrees: Vec<crate::quotient::DegreeMonomials>,
}

impl HomCache {
    fn new(nvars: usize, n_cap: usize) -> Self {
        let degrees = (0..=n_cap as i64 + 1).map(|d| crate::quotient::DegreeMonomials::new(nvars, d)).collect();
        HomCache { degrees }
    }
}

/// Saturation of `M` on `[m_lo, m_hi]` via `lim_N Hom(m^N, M)`.
///
/// `floor` is a degree from which `M` is known to agree with its saturation;
/// degree `m` starts probing at `N = max(0, floor - m)`. Each degree then raises
/// `N` until two consecutive values give equal dimensions; all degrees are then built with the largest such `N` so that the variable
/// actions are defined blockwise. `M` must be materialized far enough above
/// `m_hi` for the systems involved, otherwise `NoStabilization` is returned.
pub fn saturate(module: &GradedModule, m_lo: i32, m_hi: i32, floor: i32, n_cap: usize) -> Result<GradedModule> {
    if m_lo > m_hi {
        return Err(Error::InvalidInput(format!("empty saturation range [{m_lo}, {m_hi}]")));
    }
    let cache = HomCache::new(module.nvars, n_cap);
    let per_degree: Vec<(usize, Vec<Kernel>)> = (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| {
            let start = (floor - m).max(0) as usize;
            let mut kernels = (0..=start).map(|n| hom_kernel(module, &cache, m, n)).collect::<Result<Vec<_>>>()?;
            for n in start..n_cap {
                kernels.push(hom_kernel(module, &cache, m, n + 1)?);
                if kernels[n].dim() == kernels[n + 1].dim() {
                    return Ok((n, kernels));
                }
            }
            Err(Error::NoStabilization { degree: m, tried: n_cap })
        })
        .collect::<Result<_>>()?;
    let exponent = per_degree.iter().map(|(n, _)| *n).max().unwrap();
    let kernels: Vec<Kernel> = per_degree
        .into_par_iter()
        .zip((m_lo..=m_hi).collect::<Vec<_>>())
        .map(|((_, mut ks), m)| {
            if ks.len() > exponent {
                Ok(ks.swap_remove(exponent))
            } else {
                hom_kernel(module, &cache, m, exponent)
            }
        })
        .collect::<Result<_>>()?;

    let mons = cache.degrees[exponent].list.len();
    let nvars = module.nvars;
    let actions = (0..(m_hi - m_lo) as usize)
        .into_par_iter()
        .map(|k| {
            let m = m_lo + k as i32;
            let top = m + exponent as i32;
            let (s, t) = (module.dim(top), module.dim(top + 1));
            (0..nvars)
                .map(|i| {
                    let cols = kernels[k]
                        .basis
                        .iter()
                        .map(|v| {
                            let mut image = Vec::with_capacity(mons * t);
                            for blk in 0..mons {
                                image.extend(module.apply(i, top, &v[blk * s..(blk + 1) * s])?);
                            }
                            Ok(kernels[k + 1].coordinates(&image))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Matrix::from_columns(module.fp, kernels[k + 1].dim(), &cols))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedModule {
        fp: module.fp,
        nvars,
        lo: m_lo,
        dims: kernels.iter().map(Kernel::dim).collect(),
        actions,
        lifts: None,
        provenance: Provenance::Saturated { exponent },
    })
}

/// `M(t)`: the piece of degree `m` is the old piece of degree `m + t`.
pub fn twist(module: &GradedModule, t: i32) -> GradedModule {
    let mut out = module.clone();
    out.lo -= t;
    if t != 0 {
        out.provenance = Provenance::Twisted { by: t };
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub degree: i32,
    pub vector: Vec<u32>,
}

/// Lifts of a basis of `M / S_+ M`, degree by degree, as standard basis vectors.
pub fn minimal_generators(module: &GradedModule) -> Vec<Generator> {
    let mut out = Vec::new();
    for m in module.lo..=module.hi() {
        let dim = module.dim(m);
        let mut span = EchelonBasis::new(module.fp, dim);
        if m > module.lo {
            for a in &module.actions[(m - 1 - module.lo) as usize] {
                for c in 0..a.cols() {
                    span.insert(&a.column(c));
                }
            }
        }
        for k in 0..dim {
            let mut e = vec![0; dim];
            e[k] = 1;
            if span.insert(&e) {
                out.push(Generator { degree: m, vector: e });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationMatrix {
    pub gen_degrees: Vec<i32>,
    pub rel_degrees: Vec<i32>,
    /// `entries[j][i]`: component of relation `i` on generator `j`
    pub entries: Vec<Vec<HomogPoly>>,
}

impl PresentationMatrix {
    pub fn size(&self) -> usize {
        self.gen_degrees.len()
    }

    pub fn is_square(&self) -> bool {
        self.gen_degrees.len() == self.rel_degrees.len()
    }

    /// Every nonzero entry `(j, i)` has degree `b_i - a_j >= 1`.
    pub fn degree_pattern_ok(&self) -> bool {
        self.entries.iter().enumerate().all(|(j, row)| {
            row.iter().enumerate().all(|(i, e)| {
                let want = self.rel_degrees[i] - self.gen_degrees[j];
                e.is_zero() || (want >= 1 && e.degree() as i32 == want)
            })
        })
    }

    pub fn is_linear(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero() || e.degree() == 1)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect()
    }
}

/// One relation: `(generator index, monomial, coefficient)` triples of a fixed degree.
type Relation = Vec<(usize, Monomial, u32)>;

/// Minimal presentation of `module`, with relations collected up to degree
/// `e_max` and the kernel checked to be free (generated by those relations)
/// in degrees `e_max + 1` and `e_max + 2`.
pub fn presentation(module: &GradedModule, e_max: i32) -> Result<PresentationMatrix> {
    let top = e_max + 2;
    if module.hi() < top {
        return Err(Error::OutOfRange { degree: top, lo: module.lo, hi: module.hi() });
    }
    let fp = module.fp;
    let nvars = module.nvars;
    let gens = minimal_generators(module);
    if let Some(g) = gens.iter().find(|g| g.degree > e_max) {
        return Err(Error::GeneratorAboveCutoff { degree: g.degree, cutoff: e_max });
    }
    let mut cache = MonomialCache::new(nvars);
    // images[j][k][u] = u * g_j for monomials u of degree k
    let mut images: Vec<Vec<Vec<Vec<u32>>>> = Vec::with_capacity(gens.len());
    for g in &gens {
        let mut by_degree = vec![vec![g.vector.clone()]];
        for k in 1..=(top - g.degree) as i64 {
            let prev = cache.get(k - 1).index.clone();
            let cur = cache.get(k).list.clone();
            let mut level = Vec::with_capacity(cur.len());
            for u in &cur {
                let i = u.exps().iter().position(|&e| e > 0).unwrap();
                let base = Monomial::var(nvars, i).quotient_of(u).unwrap();
                let src = &by_degree[k as usize - 1][prev[&base]];
                level.push(module.apply(i, g.degree + k as i32 - 1, src)?);
            }
            by_degree.push(level);
        }
        images.push(by_degree);
    }

    let mut relations: Vec<(i32, Relation)> = Vec::new();
    let lowest = gens.iter().map(|g| g.degree).min().unwrap_or(top + 1);
    for e in lowest..=top {
        let mut offsets = vec![usize::MAX; gens.len()];
        let mut columns: Vec<Vec<u32>> = Vec::new();
        for (j, g) in gens.iter().enumerate() {
            if g.degree <= e {
                offsets[j] = columns.len();
                columns.extend(images[j][(e - g.degree) as usize].iter().cloned());
            }
        }
        let width = columns.len();
        let kernel = Matrix::from_columns(fp, module.dim(e), &columns).kernel();
        let mut span = EchelonBasis::new(fp, width);
        let mut predicted = 0;
        for (b, rel) in &relations {
            predicted += count_monomials(nvars, (e - b) as i64);
            for w in cache.get((e - b) as i64).list.clone() {
                let mut v = vec![0u32; width];
                for (j, u, c) in rel {
                    let pos = offsets[*j] + cache.get((e - gens[*j].degree) as i64).index[&w.mul(u)];
                    v[pos] = fp.add(v[pos], *c);
                }
                span.insert(&v);
            }
        }
        if e <= e_max {
            for v in &kernel.basis {
                if span.insert(v) {
                    let mut rel = Vec::new();
                    for (j, g) in gens.iter().enumerate() {
                        if g.degree > e {
                            continue;
                        }
                        let mons = &cache.get((e - g.degree) as i64).list;
                        for (k, u) in mons.iter().enumerate() {
                            let c = v[offsets[j] + k];
                            if c != 0 {
                                rel.push((j, u.clone(), c));
                            }
                        }
                    }
                    relations.push((e, rel));
                }
            }
        } else {
            if gens.len() != relations.len() {
                return Err(Error::NotSquare { gens: gens.len(), rels: relations.len() });
            }
            if predicted != kernel.dim() {
                return Err(Error::FreenessCheckFailed { degree: e, expected: predicted, found: kernel.dim() });
            }
            if span.dim() != kernel.dim() {
                // the collected relations generate only part of the kernel
                return Err(Error::FreenessCheckFailed { degree: e, expected: kernel.dim(), found: span.dim() });
            }
        }
    }
    if gens.len() != relations.len() {
        return Err(Error::NotSquare { gens: gens.len(), rels: relations.len() });
    }

    let entries = gens
        .iter()
        .enumerate()
        .map(|(j, g)| {
            relations
                .iter()
                .map(|(b, rel)| {
                    let deg = (b - g.degree).max(0) as u32;
                    let terms = rel.iter().filter(|(jj, _, _)| *jj == j).map(|(_, u, c)| (u.clone(), *c));
                    HomogPoly::from_terms(fp, nvars, Some(deg), terms)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PresentationMatrix {
        gen_degrees: gens.iter().map(|g| g.degree).collect(),
        rel_degrees: relations.iter().map(|(b, _)| *b).collect(),
        entries,
    })
}

pub fn hilbert_function(module: &GradedModule) -> BTreeMap<i32, usize> {
    (module.lo..=module.hi()).map(|m| (m, module.dim(m))).collect()
}

/// `max(b_i) - 1`, or `None` for the empty presentation.
pub fn regularity_from_betti(p: &PresentationMatrix) -> Option<i32> {
    p.rel_degrees.iter().max().map(|b| b - 1)
}

pub fn ulrich_check(p: &PresentationMatrix, h: &HypersurfaceSpec) -> bool {
    p.gen_degrees.iter().all(|&a| a == 0)
        && p.rel_degrees.iter().all(|&b| b == 1)
        && p.is_square()
        && p.size() == (h.d() * (h.p() - 1)) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiData {
    pub gen_degrees: Vec<i32>,
    pub rel_degrees: Vec<i32>,
    pub regularity: Option<i32>,
    pub rank: u64,
    pub twist: i32,
    pub hilbert: BTreeMap<i32, usize>,
}

impl BettiData {
    /// Betti data of `P`, a presentation of `M(twist)`; the regularity is
    /// reported for the untwisted module.
    pub fn new(p: &PresentationMatrix, module: &GradedModule, twist: i32, rank: u64) -> Self {
        BettiData {
            gen_degrees: p.gen_degrees.clone(),
            rel_degrees: p.rel_degrees.clone(),
            regularity: regularity_from_betti(p).map(|r| r + twist),
            rank,
            twist,
            hilbert: hilbert_function(module),
        }
    }
}
