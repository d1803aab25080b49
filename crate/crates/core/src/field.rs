//! Finite fields: the prime field `F_p` used for all module computations, and
//! small extensions `F_{p^k}` used for sampling evaluation points.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic in the prime field `F_p`. Elements are plain `u32` residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if p >= 1 << 16 || !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u32 {
        (a % self.p as u64) as u32
    }

    #[inline]
    pub fn from_i64(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.p) {
            return Err(Error::ZeroInverse);
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(self.from_i64(t0))
    }
}

// Dense univariate polynomials over F_p, coefficients low to high, no trailing zeros.

fn upoly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn upoly_rem(fp: Fp, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    upoly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = fp.inv(m[dm]).expect("modulus has nonzero leading coefficient");
    while r.len() > dm {
        let top = r.len() - 1;
        let c = fp.mul(r[top], lead_inv);
        if c != 0 {
            let shift = top - dm;
            for (i, &mc) in m.iter().enumerate() {
                r[shift + i] = fp.sub(r[shift + i], fp.mul(c, mc));
            }
        }
        r.pop();
        upoly_trim(&mut r);
    }
    r
}

fn upoly_mulmod(fp: Fp, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = fp.add(prod[i + j], fp.mul(x, y));
        }
    }
    upoly_rem(fp, &prod, m)
}

fn upoly_powmod(fp: Fp, a: &[u32], mut e: u64, m: &[u32]) -> Vec<u32> {
    let mut base = upoly_rem(fp, a, m);
    let mut acc = upoly_rem(fp, &[1], m);
    while e > 0 {
        if e & 1 == 1 {
            acc = upoly_mulmod(fp, &acc, &base, m);
        }
        base = upoly_mulmod(fp, &base, &base, m);
        e >>= 1;
    }
    acc
}

fn upoly_gcd(fp: Fp, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    upoly_trim(&mut a);
    upoly_trim(&mut b);
    while !b.is_empty() {
        let r = upoly_rem(fp, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn upoly_sub(fp: Fp, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut r = vec![0; a.len().max(b.len())];
    for (i, x) in r.iter_mut().enumerate() {
        *x = fp.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0));
    }
    upoly_trim(&mut r);
    r
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: a monic `f` of degree `k` is irreducible iff `t^{p^k} = t mod f`
/// and `gcd(t^{p^{k/q}} - t, f) = 1` for every prime `q | k`.
pub fn is_irreducible(fp: Fp, f: &[u32]) -> bool {
    let mut f = f.to_vec();
    upoly_trim(&mut f);
    if f.len() < 2 {
        return false;
    }
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    let t = [0, 1];
    // frob[i] = t^{p^i} mod f
    let mut frob = vec![upoly_rem(fp, &t, &f)];
    for _ in 0..k {
        let next = upoly_powmod(fp, frob.last().unwrap(), fp.p() as u64, &f);
        frob.push(next);
    }
    if !upoly_sub(fp, &frob[k], &upoly_rem(fp, &t, &f)).is_empty() {
        return false;
    }
    prime_factors(k).into_iter().all(|q| {
        let diff = upoly_sub(fp, &frob[k / q], &t);
        upoly_gcd(fp, &diff, &f).len() == 1
    })
}

/// The smallest monic irreducible of degree `k` over `F_p`, comparing the
/// coefficient vectors `(c_{k-1}, ..., c_0)` lexicographically.
/// Returned low-to-high, including the leading 1.
pub fn find_irreducible(p: u32, k: usize) -> Result<Vec<u32>> {
    let fp = Fp::new(p)?;
    if k < 2 {
        return Err(Error::BadExtensionDegree(k));
    }
    // odometer over (c_{k-1}, ..., c_0), with c_0 varying fastest
    let mut digits = vec![0u32; k];
    loop {
        let mut f: Vec<u32> = digits.iter().rev().copied().collect();
        f.push(1);
        if is_irreducible(fp, &f) {
            return Ok(f);
        }
        let mut i = k;
        loop {
            if i == 0 {
                unreachable!("irreducible polynomials exist in every degree");
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// `F_{p^k}`, presented as `F_p[t]/(modulus)` when `k > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: usize,
    pub modulus: Option<Vec<u32>>,
}

/// Coefficient vector of length `k` (low to high) in the basis `1, t, ..., t^{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement(pub Vec<u32>);

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self> {
        Fp::new(p)?;
        Ok(FieldSpec { p, k: 1, modulus: None })
    }

    /// `F_{p^k}` with the canonical modulus from [`find_irreducible`].
    pub fn extension(p: u32, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::BadExtensionDegree(0));
        }
        if k == 1 {
            return Self::prime(p);
        }
        let modulus = find_irreducible(p, k)?;
        Ok(FieldSpec { p, k, modulus: Some(modulus) })
    }

    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let fp = Fp::new(p)?;
        let mut m = modulus;
        upoly_trim(&mut m);
        if m.len() < 2 {
            return Err(Error::BadExtensionDegree(m.len().saturating_sub(1)));
        }
        let k = m.len() - 1;
        if m[k] != 1 {
            return Err(Error::InvalidInput("modulus must be monic".into()));
        }
        if k == 1 {
            return Ok(FieldSpec { p, k: 1, modulus: None });
        }
        if !is_irreducible(fp, &m) {
            return Err(Error::ReducibleModulus(k));
        }
        Ok(FieldSpec { p, k, modulus: Some(m) })
    }

    pub fn fp(&self) -> Fp {
        Fp { p: self.p }
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k as u32)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.k])
    }

    pub fn one(&self) -> FieldElement {
        self.from_prime(1)
    }

    pub fn from_prime(&self, c: u32) -> FieldElement {
        let mut v = vec![0; self.k];
        v[0] = c % self.p;
        FieldElement(v)
    }

    /// Element from coefficients (low to high); reduced mod p and mod the modulus.
    pub fn element(&self, coeffs: &[u32]) -> FieldElement {
        let fp = self.fp();
        let c: Vec<u32> = coeffs.iter().map(|&x| x % self.p).collect();
        self.canon(fp, c)
    }

    fn canon(&self, fp: Fp, mut c: Vec<u32>) -> FieldElement {
        if let Some(m) = &self.modulus {
            c = upoly_rem(fp, &c, m);
        }
        c.resize(self.k, 0);
        FieldElement(c)
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let fp = self.fp();
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| fp.add(x, y)).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let fp = self.fp();
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| fp.sub(x, y)).collect())
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let fp = self.fp();
        FieldElement(a.0.iter().map(|&x| fp.neg(x)).collect())
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let fp = self.fp();
        match &self.modulus {
            None => FieldElement(vec![fp.mul(a.0[0], b.0[0])]),
            Some(m) => {
                let mut r = upoly_mulmod(fp, &a.0, &b.0, m);
                r.resize(self.k, 0);
                FieldElement(r)
            }
        }
    }

    pub fn scale(&self, c: u32, a: &FieldElement) -> FieldElement {
        let fp = self.fp();
        FieldElement(a.0.iter().map(|&x| fp.mul(c, x)).collect())
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm in `F_p[t]`.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return Err(Error::ZeroInverse);
        }
        let fp = self.fp();
        let Some(m) = &self.modulus else {
            return Ok(FieldElement(vec![fp.inv(a.0[0])?]));
        };
        let mut r0 = m.clone();
        let mut r1 = a.0.clone();
        upoly_trim(&mut r1);
        let mut s0: Vec<u32> = Vec::new();
        let mut s1: Vec<u32> = vec![1];
        while !r1.is_empty() {
            let (q, r) = upoly_divrem(fp, &r0, &r1);
            let qs1 = upoly_mul(fp, &q, &s1);
            let s2 = upoly_sub(fp, &s0, &qs1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant
        let c = fp.inv(r0[0])?;
        let out: Vec<u32> = s0.iter().map(|&x| fp.mul(x, c)).collect();
        Ok(self.canon(fp, out))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement((0..self.k).map(|_| rng.gen_range(0..self.p)).collect())
    }

    pub fn format(&self, a: &FieldElement) -> String {
        if self.k == 1 {
            return a.0[0].to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in a.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mon,
                _ => format!("{c}*{mon}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

fn upoly_mul(fp: Fp, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = fp.add(prod[i + j], fp.mul(x, y));
        }
    }
    upoly_trim(&mut prod);
    prod
}

fn upoly_divrem(fp: Fp, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut r = a.to_vec();
    upoly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = fp.inv(b[db]).expect("nonzero divisor");
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; r.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = fp.mul(r[top], lead_inv);
        let shift = top - db;
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = fp.sub(r[shift + i], fp.mul(c, bc));
        }
        r.pop();
        upoly_trim(&mut r);
    }
    upoly_trim(&mut q);
    (q, r)
}
