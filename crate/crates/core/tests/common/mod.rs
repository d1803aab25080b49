//! Shared helpers for integration tests: seeded sample collection and an
//! independent computation of `dim H^0(B^1(m))` for plane curves.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use frobdet::invariants::HypersurfaceSpec;
use frobdet::poly::HomogPoly;
use frobdet::search::{random_search, SearchKind};

/// `count` distinct samples from consecutive seeds starting at `seed`.
pub fn samples(kind: SearchKind, p: u32, d: u32, n: usize, seed: u64, count: usize) -> Vec<HypersurfaceSpec> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        let h = random_search(kind, p, d, n, s, 2000).unwrap().expect("search budget exhausted");
        s += 1;
        if seen.insert(h.g().to_string()) {
            out.push(h);
        }
        assert!(s < seed + 100 * count as u64, "too few distinct samples");
    }
    out
}

/// Rank over `F_p` by plain Gaussian elimination on a row list.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = pow_mod(rows[rank][c], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim (S/G)_j` for a plane curve of degree `d`.
pub fn dim_a(j: i64, d: i64) -> i64 {
    binom(j + 2, 2) - binom(j - d + 2, 2)
}

/// Exponent triples `α` with every `α_i >= 1` and `|α| = total`,
/// standing for the inverse monomials `x^{-α}`.
fn inverse_monomials(total: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for a in 1..total {
        for b in 1..total - a {
            let c = total - a - b;
            if c >= 1 {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// `f * x^{-α}` in the inverse system: terms keeping a non-negative exponent vanish.
fn act(f: &[([i64; 3], u64)], alpha: &[i64; 3]) -> Vec<([i64; 3], u64)> {
    f.iter()
        .filter_map(|(beta, c)| {
            let e = [alpha[0] - beta[0], alpha[1] - beta[1], alpha[2] - beta[2]];
            e.iter().all(|&x| x >= 1).then_some((e, *c))
        })
        .collect()
}

fn terms(g: &HomogPoly) -> Vec<([i64; 3], u64)> {
    g.terms().map(|(m, c)| ([m.exps()[0] as i64, m.exps()[1] as i64, m.exps()[2] as i64], c as u64)).collect()
}

/// Basis of `{η ∈ span x^{-α}, |α| = total : G η = 0}` as coefficient maps.
fn annihilated(g: &[([i64; 3], u64)], total: i64, d: i64, p: u64) -> Vec<HashMap<[i64; 3], u64>> {
    let source = inverse_monomials(total);
    let target = inverse_monomials(total - d);
    let tindex: HashMap<[i64; 3], usize> = target.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    // kernel of the |target| x |source| matrix, computed on the transpose-free system
    let mut columns: Vec<Vec<u64>> = Vec::new();
    for alpha in &source {
        let mut col = vec![0u64; target.len()];
        for (e, c) in act(g, alpha) {
            let i = tindex[&e];
            col[i] = (col[i] + c) % p;
        }
        columns.push(col);
    }
    kernel_of_columns(&columns, target.len(), p)
        .into_iter()
        .map(|v| source.iter().zip(v).filter(|(_, c)| *c != 0).map(|(a, c)| (*a, c)).collect())
        .collect()
}

/// Null space of the matrix whose columns are given.
fn kernel_of_columns(columns: &[Vec<u64>], rows: usize, p: u64) -> Vec<Vec<u64>> {
    let n = columns.len();
    let mut m: Vec<Vec<u64>> = (0..rows).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..n {
        let Some(pr) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = pow_mod(m[rank][c], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][f]) % p;
            }
            v
        })
        .collect()
}

fn poly_mul(a: &[([i64; 3], u64)], b: &[([i64; 3], u64)], p: u64) -> Vec<([i64; 3], u64)> {
    let mut acc: HashMap<[i64; 3], u64> = HashMap::new();
    for (x, c) in a {
        for (y, e) in b {
            let k = [x[0] + y[0], x[1] + y[1], x[2] + y[2]];
            let v = acc.entry(k).or_insert(0);
            *v = (*v + c * e) % p;
        }
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// `dim H^0(X, B^1(m))` for a smooth plane curve, from
/// `dim A_{pm} - dim A_m + dim ker(F : H^1(O_X(m)) -> H^1(O_X(pm)))`, with
/// `H^1(O_X(m))` modelled as the inverse forms of degree `m - d` killed by `G`
/// and `F(η) = G^{p-1} η^{[p]}`.
pub fn saturation_oracle(h: &HypersurfaceSpec, m: i64) -> i64 {
    let p = h.p() as u64;
    let d = h.d() as i64;
    let g = terms(h.g());
    let base = dim_a(p as i64 * m, d) - dim_a(m, d);
    let source = annihilated(&g, d - m, d, p);
    if source.is_empty() {
        return base;
    }
    let mut gp = vec![([0i64; 3], 1u64)];
    for _ in 1..p {
        gp = poly_mul(&gp, &g, p);
    }
    let target = inverse_monomials(d - p as i64 * m);
    let tindex: HashMap<[i64; 3], usize> = target.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    // images of the basis of V_m, in the ambient inverse system of degree pm - d
    let images: Vec<Vec<u64>> = source
        .iter()
        .map(|eta| {
            let mut v = vec![0u64; target.len()];
            for (alpha, c) in eta {
                let frob = [alpha[0] * p as i64, alpha[1] * p as i64, alpha[2] * p as i64];
                for (e, x) in act(&gp, &frob) {
                    let i = tindex[&e];
                    v[i] = (v[i] + c * x) % p;
                }
            }
            v
        })
        .collect();
    let rank = rank_mod_p(images, p);
    base + (source.len() - rank) as i64
}
