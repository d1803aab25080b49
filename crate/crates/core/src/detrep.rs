//! Determinantal checks on presentation matrices: exact determinants and
//! Pfaffians of polynomial matrices, randomized evaluation checks over an
//! extension field, and a small search for skew-symmetric normal forms.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec, Fp};
use crate::linalg::Matrix;
use crate::module::PresentationMatrix;
use crate::poly::{HomogPoly, Monomial};

pub const SIZE_CAP: usize = 16;

pub type PolyMatrix = Vec<Vec<HomogPoly>>;

fn shape(m: &[Vec<HomogPoly>]) -> Result<usize> {
    let s = m.len();
    if let Some(row) = m.iter().find(|r| r.len() != s) {
        return Err(Error::MatrixShape { rows: s, cols: row.len() });
    }
    Ok(s)
}

fn context(m: &[Vec<HomogPoly>]) -> Option<(Fp, usize)> {
    m.first().and_then(|r| r.first()).map(|e| (e.fp(), e.nvars()))
}

/// `a + c * b`, where a zero operand carries no degree constraint.
fn add_scaled(a: HomogPoly, b: &HomogPoly, c: u32) -> Result<HomogPoly> {
    if b.is_zero() || c == 0 {
        return Ok(a);
    }
    let b = b.scale(c);
    if a.is_zero() {
        return Ok(b);
    }
    a.add(&b)
}

/// Determinant by expansion along rows from the bottom up, memoizing the minor
/// on each column subset.
pub fn det_exact(m: &[Vec<HomogPoly>]) -> Result<HomogPoly> {
    let s = shape(m)?;
    if s > SIZE_CAP {
        return Err(Error::SizeCap(s));
    }
    let Some((fp, nvars)) = context(m) else {
        return Ok(HomogPoly::constant(Fp::new(2)?, 3, 1));
    };
    let full: u32 = (1u32 << s) - 1;
    // minors of the rows k..s, keyed by column subset of size s - k
    let mut layer: HashMap<u32, HomogPoly> = HashMap::from([(0u32, HomogPoly::constant(fp, nvars, 1))]);
    for k in (0..s).rev() {
        let size = (s - k) as u32;
        let masks: Vec<u32> = (0..=full).filter(|x| x.count_ones() == size).collect();
        let next = masks
            .into_par_iter()
            .map(|mask| {
                let mut acc = HomogPoly::zero(fp, nvars, 0);
                let mut pos = 0;
                for c in 0..s {
                    if mask & (1 << c) == 0 {
                        continue;
                    }
                    let entry = &m[k][c];
                    let minor = &layer[&(mask & !(1 << c))];
                    if !entry.is_zero() && !minor.is_zero() {
                        let sign = if pos % 2 == 0 { 1 } else { fp.neg(1) };
                        acc = add_scaled(acc, &entry.mul(minor)?, sign)?;
                    }
                    pos += 1;
                }
                Ok((mask, acc))
            })
            .collect::<Result<HashMap<_, _>>>()?;
        layer = next;
    }
    let det = layer.remove(&full).unwrap();
    if det.is_zero() {
        let deg: u32 = (0..s).map(|i| m[i][i].degree()).sum();
        return Ok(HomogPoly::zero(fp, nvars, deg));
    }
    Ok(det)
}

/// Fraction-free elimination with exact polynomial division.
pub fn det_bareiss(m: &[Vec<HomogPoly>]) -> Result<HomogPoly> {
    let s = shape(m)?;
    let Some((fp, nvars)) = context(m) else {
        return Ok(HomogPoly::constant(Fp::new(2)?, 3, 1));
    };
    let mut a: PolyMatrix = m.to_vec();
    let mut prev = HomogPoly::constant(fp, nvars, 1);
    let mut negate = false;
    let zero_det = |a: &[Vec<HomogPoly>]| {
        let deg: u32 = (0..s).map(|i| a[i][i].degree()).sum();
        HomogPoly::zero(fp, nvars, deg)
    };
    for k in 0..s {
        let Some(pr) = (k..s).find(|&i| !a[i][k].is_zero()) else {
            return Ok(zero_det(m));
        };
        if pr != k {
            a.swap(pr, k);
            negate = !negate;
        }
        for i in k + 1..s {
            for j in k + 1..s {
                let left = a[k][k].mul(&a[i][j])?;
                let right = a[i][k].mul(&a[k][j])?;
                let num = add_scaled(left, &right, fp.neg(1))?;
                a[i][j] = if num.is_zero() {
                    num
                } else {
                    num.div_exact(&prev)?.ok_or_else(|| Error::InvalidInput("inexact Bareiss division".into()))?
                };
            }
            a[i][k] = HomogPoly::zero(fp, nvars, 0);
        }
        prev = a[k][k].clone();
    }
    Ok(if negate { prev.neg() } else { prev })
}

fn check_alternating(m: &[Vec<HomogPoly>]) -> Result<usize> {
    let s = shape(m)?;
    for i in 0..s {
        if !m[i][i].is_zero() {
            return Err(Error::NotSkew);
        }
        for j in i + 1..s {
            let (a, b) = (&m[i][j], &m[j][i]);
            let ok = match (a.is_zero(), b.is_zero()) {
                (true, true) => true,
                (false, false) => *a == b.neg(),
                _ => false,
            };
            if !ok {
                return Err(Error::NotSkew);
            }
        }
    }
    if s % 2 == 1 {
        return Err(Error::OddSize(s));
    }
    Ok(s)
}

/// Pfaffian by expansion along the first remaining row, memoized on index subsets.
pub fn pfaffian(m: &[Vec<HomogPoly>]) -> Result<HomogPoly> {
    let s = check_alternating(m)?;
    if s > SIZE_CAP {
        return Err(Error::SizeCap(s));
    }
    let Some((fp, nvars)) = context(m) else {
        return Ok(HomogPoly::constant(Fp::new(2)?, 3, 1));
    };
    fn go(m: &[Vec<HomogPoly>], mask: u32, memo: &mut HashMap<u32, HomogPoly>, fp: Fp, nvars: usize) -> Result<HomogPoly> {
        if mask == 0 {
            return Ok(HomogPoly::constant(fp, nvars, 1));
        }
        if let Some(v) = memo.get(&mask) {
            return Ok(v.clone());
        }
        let i = mask.trailing_zeros() as usize;
        let mut acc = HomogPoly::zero(fp, nvars, 0);
        let mut pos = 0;
        for j in i + 1..m.len() {
            if mask & (1 << j) == 0 {
                continue;
            }
            pos += 1;
            if m[i][j].is_zero() {
                continue;
            }
            let rest = go(m, mask & !(1 << i) & !(1 << j), memo, fp, nvars)?;
            if !rest.is_zero() {
                let sign = if pos % 2 == 1 { 1 } else { fp.neg(1) };
                acc = add_scaled(acc, &m[i][j].mul(&rest)?, sign)?;
            }
        }
        memo.insert(mask, acc.clone());
        Ok(acc)
    }
    let full = ((1u64 << s) - 1) as u32;
    go(m, full, &mut HashMap::new(), fp, nvars)
}

/// Smallest `k` with `p^k > bound`.
pub fn extension_degree_for(p: u32, bound: u64) -> usize {
    let mut k = 1;
    let mut q = p as u64;
    while q <= bound {
        q = q.saturating_mul(p as u64);
        k += 1;
    }
    k
}

fn det_numeric(field: &FieldSpec, mut a: Vec<Vec<FieldElement>>) -> Result<FieldElement> {
    let s = a.len();
    let mut det = field.one();
    for c in 0..s {
        let Some(pr) = (c..s).find(|&i| !field.is_zero(&a[i][c])) else {
            return Ok(field.zero());
        };
        if pr != c {
            a.swap(pr, c);
            det = field.neg(&det);
        }
        det = field.mul(&det, &a[c][c]);
        let inv = field.inv(&a[c][c])?;
        for i in c + 1..s {
            if field.is_zero(&a[i][c]) {
                continue;
            }
            let f = field.mul(&a[i][c], &inv);
            for j in c..s {
                let t = field.mul(&f, &a[c][j]);
                a[i][j] = field.sub(&a[i][j], &t);
            }
        }
    }
    Ok(det)
}

fn field_pow(field: &FieldSpec, x: &FieldElement, e: u32) -> FieldElement {
    (0..e).fold(field.one(), |acc, _| field.mul(&acc, x))
}

/// Outcome of the randomized comparison of `det M` with `λ G^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SzOutcome {
    pub agreed: usize,
    pub trials: usize,
    pub lambda: Option<FieldElement>,
    pub field: FieldSpec,
}

impl SzOutcome {
    pub fn passed(&self) -> bool {
        self.agreed == self.trials
    }
}

/// Evaluates `det M` and `G^r` at `trials` seeded random points of
/// `F_{p^k}^{n+1}`, with `p^k > 4 r deg G`, fitting `λ` at the first point off `G = 0`.
pub fn schwartz_zippel_run(m: &[Vec<HomogPoly>], g: &HomogPoly, r: u32, trials: usize, seed: u64) -> Result<SzOutcome> {
    shape(m)?;
    if trials == 0 {
        return Err(Error::InvalidInput("at least one Schwartz-Zippel trial is required".into()));
    }
    let k = extension_degree_for(g.p(), 4 * (r as u64 * g.degree() as u64).max(1));
    let field = FieldSpec::extension(g.p(), k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lambda: Option<FieldElement> = None;
    let mut agreed = 0;
    let mut pending_zero = true;
    for _ in 0..trials {
        let pt: Vec<FieldElement> = (0..g.nvars()).map(|_| field.random(&mut rng)).collect();
        let gv = g.eval(&field, &pt);
        let numeric: Vec<Vec<FieldElement>> =
            m.iter().map(|row| row.iter().map(|e| e.eval(&field, &pt)).collect()).collect();
        let dv = det_numeric(&field, numeric)?;
        let gr = field_pow(&field, &gv, r);
        let ok = if field.is_zero(&gv) {
            field.is_zero(&dv)
        } else {
            pending_zero = false;
            match &lambda {
                Some(l) => field.mul(l, &gr) == dv,
                None => {
                    let l = field.mul(&dv, &field.inv(&gr)?);
                    let nonzero = !field.is_zero(&l);
                    lambda = Some(l);
                    nonzero
                }
            }
        };
        if ok {
            agreed += 1;
        }
    }
    if pending_zero {
        return Err(Error::DegenerateSamples);
    }
    Ok(SzOutcome { agreed, trials, lambda, field })
}

pub fn schwartz_zippel_check(m: &[Vec<HomogPoly>], g: &HomogPoly, r: u32, trials: usize, seed: u64) -> Result<bool> {
    Ok(schwartz_zippel_run(m, g, r, trials, seed)?.passed())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetMethod {
    ExactCofactor,
    ExactBareiss,
    Interpolated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetCertificate {
    pub size: usize,
    pub r: u32,
    pub lambda: u32,
    pub method: DetMethod,
    pub sz_trials: usize,
    /// entry degree -> number of nonzero entries of that degree
    pub degree_profile: BTreeMap<u32, usize>,
}

pub fn degree_profile(p: &PresentationMatrix) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    for e in p.entries.iter().flatten().filter(|e| !e.is_zero()) {
        *out.entry(e.degree()).or_insert(0) += 1;
    }
    out
}

/// Checks `det M = λ G^r` with `r = deg det / deg G` and `λ ∈ F_p^*`, first at
/// random points and then exactly.
pub fn verify_det_power(p: &PresentationMatrix, g: &HomogPoly, trials: usize, seed: u64) -> Result<DetCertificate> {
    let s = p.size();
    if !p.is_square() {
        return Err(Error::MatrixShape { rows: s, cols: p.rel_degrees.len() });
    }
    let det_degree: i64 = p.rel_degrees.iter().map(|&b| b as i64).sum::<i64>() - p.gen_degrees.iter().map(|&a| a as i64).sum::<i64>();
    let d = g.degree();
    if det_degree < 0 || d == 0 || det_degree % d as i64 != 0 {
        return Err(Error::DegreeIncompatible { det_degree: det_degree.max(0) as u32, g_degree: d });
    }
    let r = (det_degree / d as i64) as u32;
    let sz = if trials > 0 { Some(schwartz_zippel_run(&p.entries, g, r, trials, seed)?) } else { None };
    let det = det_exact(&p.entries)?;
    let gr = g.pow(r as u64);
    let fp = g.fp();
    let (lead, lc) = gr.leading().expect("G is nonzero");
    let lambda = fp.mul(det.coeff(lead), fp.inv(lc)?);
    let residual = if det.is_zero() { gr.scale(fp.neg(lambda)) } else { det.sub(&gr.scale(lambda))? };
    if lambda == 0 || !residual.is_zero() {
        let mut text = residual.to_string();
        if text.len() > 200 {
            text.truncate(200);
            text.push_str("...");
        }
        let detail = if lambda == 0 { format!("det has no G^{r} component; residual {text}") } else { format!("residual {text}") };
        return Err(Error::Mismatch { r, detail });
    }
    if let Some(sz) = &sz {
        if !sz.passed() {
            return Err(Error::Mismatch { r, detail: "exact check passed but sampled values disagree".into() });
        }
    }
    Ok(DetCertificate {
        size: s,
        r,
        lambda,
        method: DetMethod::ExactCofactor,
        sz_trials: sz.map_or(0, |o| o.agreed),
        degree_profile: degree_profile(p),
    })
}

/// Every nonzero entry has degree in `[1, n - 1]`.
pub fn degree_profile_check(p: &PresentationMatrix, n: usize) -> bool {
    p.entries.iter().flatten().filter(|e| !e.is_zero()).all(|e| e.degree() >= 1 && (e.degree() as usize) < n.max(2))
}

fn is_alternating(m: &[Vec<HomogPoly>]) -> bool {
    check_alternating(m).is_ok()
}

/// `P * M * Q` for constant matrices `P`, `Q`.
pub fn transform(m: &[Vec<HomogPoly>], p: &Matrix, q: &Matrix) -> Result<PolyMatrix> {
    let s = shape(m)?;
    let (fp, nvars) = context(m).ok_or(Error::MatrixShape { rows: 0, cols: 0 })?;
    let mut mq: PolyMatrix = vec![Vec::with_capacity(s); s];
    for (i, row) in m.iter().enumerate() {
        for c in 0..s {
            let mut acc = HomogPoly::zero(fp, nvars, 0);
            for (k, e) in row.iter().enumerate() {
                acc = add_scaled(acc, e, q.get(k, c))?;
            }
            mq[i].push(acc);
        }
    }
    let mut out: PolyMatrix = vec![Vec::with_capacity(s); s];
    for (i, row) in out.iter_mut().enumerate() {
        for c in 0..s {
            let mut acc = HomogPoly::zero(fp, nvars, 0);
            for (k, r) in mq.iter().enumerate() {
                acc = add_scaled(acc, &r[c], p.get(i, k))?;
            }
            row.push(acc);
        }
    }
    Ok(out)
}

fn random_invertible<R: Rng>(fp: Fp, s: usize, rng: &mut R) -> Matrix {
    loop {
        let rows: Vec<Vec<u32>> = (0..s).map(|_| (0..s).map(|_| rng.gen_range(0..fp.p())).collect()).collect();
        let m = Matrix::from_rows(fp, &rows, s);
        if m.det().is_ok_and(|d| d != 0) {
            return m;
        }
    }
}

/// Randomized search for constant invertible `P`, `Q` with `P M Q` alternating.
///
/// For a random `Q` the condition on `P` is linear, so each trial solves for the
/// space of admissible `P` and tests a random member for invertibility.
pub fn skew_equivalence_probe(m: &[Vec<HomogPoly>], trials: usize, seed: u64) -> Option<(Matrix, Matrix)> {
    let s = shape(m).ok()?;
    let (fp, _) = context(m)?;
    if s % 2 == 1 {
        return None;
    }
    if is_alternating(m) {
        return Some((Matrix::identity(fp, s), Matrix::identity(fp, s)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let q = random_invertible(fp, s, &mut rng);
        let n = transform(m, &Matrix::identity(fp, s), &q).ok()?;
        let mut monos: Vec<Monomial> = n.iter().flatten().flat_map(|e| e.terms().map(|(u, _)| u.clone())).collect();
        monos.sort();
        monos.dedup();
        // unknown P[a][k] sits in column a * s + k
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for a in 0..s {
            for b in a..s {
                for u in &monos {
                    let mut row = vec![0u32; s * s];
                    for k in 0..s {
                        let x = n[k][b].coeff(u);
                        row[a * s + k] = fp.add(row[a * s + k], x);
                        if a != b {
                            let y = n[k][a].coeff(u);
                            row[b * s + k] = fp.add(row[b * s + k], y);
                        }
                    }
                    if row.iter().any(|&x| x != 0) {
                        rows.push(row);
                    }
                }
            }
        }
        let kernel = Matrix::from_rows(fp, &rows, s * s).kernel();
        if kernel.dim() == 0 {
            continue;
        }
        for _ in 0..4 {
            let mut v = vec![0u32; s * s];
            for b in &kernel.basis {
                let c = rng.gen_range(0..fp.p());
                for (x, y) in v.iter_mut().zip(b) {
                    *x = fp.add(*x, fp.mul(c, *y));
                }
            }
            let p = Matrix::from_rows(fp, &v.chunks(s).map(<[u32]>::to_vec).collect::<Vec<_>>(), s);
            if p.det().is_ok_and(|d| d != 0) {
                return Some((p, q));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn poly(text: &str, p: u32) -> HomogPoly {
        parse_poly(text, p, Some(3)).unwrap()
    }

    fn matrix(rows: &[&[&str]], p: u32) -> PolyMatrix {
        rows.iter().map(|r| r.iter().map(|t| poly(t, p)).collect()).collect()
    }

    #[test]
    fn small_determinants() {
        let g = poly("x^3+y^3+z^3", 7);
        assert_eq!(det_exact(&[vec![g.clone()]]).unwrap(), g);
        let m = matrix(&[&["x", "y"], &["y", "z"]], 5);
        assert_eq!(det_exact(&m).unwrap(), poly("x*z-y^2", 5));
        assert_eq!(det_bareiss(&m).unwrap(), poly("x*z-y^2", 5));
    }

    #[test]
    fn size_cap() {
        let x = poly("x", 3);
        let m: PolyMatrix = (0..17).map(|_| vec![x.clone(); 17]).collect();
        assert_eq!(det_exact(&m), Err(Error::SizeCap(17)));
    }

    #[test]
    fn pfaffian_examples() {
        let m = matrix(&[&["0", "x"], &["-x", "0"]], 5);
        assert_eq!(pfaffian(&m).unwrap(), poly("x", 5));
        // upper entries a..f = x, y, z, x+y, y+z, z+x
        let m = matrix(
            &[
                &["0", "x", "y", "z"],
                &["-x", "0", "x+y", "y+z"],
                &["-y", "-x-y", "0", "z+x"],
                &["-z", "-y-z", "-z-x", "0"],
            ],
            7,
        );
        // x(z+x) - y(y+z) + z(x+y)
        let expected = poly("x^2 + 2*x*z - y^2", 7);
        assert_eq!(pfaffian(&m).unwrap(), expected);
        assert_eq!(det_exact(&m).unwrap(), expected.mul(&expected).unwrap());
        assert_eq!(pfaffian(&matrix(&[&["x"]], 5)), Err(Error::NotSkew));
        assert_eq!(pfaffian(&matrix(&[&["0"]], 5)), Err(Error::OddSize(1)));
    }

    #[test]
    fn sz_on_one_by_one() {
        let g = poly("x^3+y^3+z^3+x*y*z", 2);
        for seed in 0..5 {
            assert!(schwartz_zippel_check(&[vec![g.clone()]], &g, 1, 4, seed).unwrap());
        }
    }

    #[test]
    fn extension_degree() {
        assert_eq!(extension_degree_for(2, 12), 4);
        assert_eq!(extension_degree_for(5, 48), 3);
        assert_eq!(extension_degree_for(101, 12), 1);
    }

    #[test]
    fn already_skew_probe() {
        let m = matrix(&[&["0", "x"], &["-x", "0"]], 3);
        let (p, q) = skew_equivalence_probe(&m, 1, 0).unwrap();
        assert_eq!(p, Matrix::identity(p.fp(), 2));
        assert_eq!(q, Matrix::identity(q.fp(), 2));
        assert!(skew_equivalence_probe(&matrix(&[&["x"]], 3), 10, 0).is_none());
    }
}
