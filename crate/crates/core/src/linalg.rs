//! Dense linear algebra over `F_p`: row reduction, kernels, incremental echelon bases.

use crate::error::{Error, Result};
use crate::field::Fp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    fp: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Right kernel of a matrix. `basis[k]` has a 1 in column `free[k]` and zeros in
/// every other free column, so the coordinates of any kernel vector `v` in this
/// basis are simply `v[free[k]]`.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub basis: Vec<Vec<u32>>,
    pub free: Vec<usize>,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coordinates(&self, v: &[u32]) -> Vec<u32> {
        self.free.iter().map(|&f| v[f]).collect()
    }
}

#[inline]
fn axpy(fp: Fp, target: &mut [u32], factor: u32, src: &[u32]) {
    // target -= factor * src
    let p = fp.p() as u64;
    let neg = (p - factor as u64) % p;
    for (t, &s) in target.iter_mut().zip(src) {
        if s != 0 {
            *t = ((*t as u64 + neg * s as u64) % p) as u32;
        }
    }
}

impl Matrix {
    pub fn zeros(fp: Fp, rows: usize, cols: usize) -> Self {
        Matrix { fp, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(fp: Fp, n: usize) -> Self {
        let mut m = Self::zeros(fp, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(fp: Fp, rows: &[Vec<u32>], cols: usize) -> Self {
        let mut m = Self::zeros(fp, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(fp: Fp, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(fp, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x;
            }
        }
        m
    }

    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.fp.p() as u64;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for (a, &b) in self.row(i).iter().zip(v) {
                    if b != 0 {
                        acc = (acc + *a as u64 * b as u64) % p;
                    }
                }
                acc as u32
            })
            .collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.fp, self.rows, other.cols);
        let p = self.fp.p() as u64;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.get(k, j) as u64) % p) as u32;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.fp, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let fp = self.fp;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = fp.inv(self.data[r * cols + c]).expect("nonzero pivot");
            for j in c..cols {
                self.data[r * cols + j] = fp.mul(self.data[r * cols + j], inv);
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (prow, after) = rest.split_at_mut(cols);
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let target = if i < r {
                    &mut before[i * cols..(i + 1) * cols]
                } else {
                    let o = (i - r - 1) * cols;
                    &mut after[o..o + cols]
                };
                let f = target[c];
                if f != 0 {
                    axpy(fp, &mut target[c..], f, &prow[c..]);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn kernel(&self) -> Kernel {
        let mut m = self.clone();
        let pivots = m.rref();
        let fp = self.fp;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let basis = free
            .iter()
            .map(|&f| {
                let mut v = vec![0u32; self.cols];
                v[f] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = fp.neg(m.get(r, f));
                }
                v
            })
            .collect();
        Kernel { basis, free }
    }

    pub fn det(&self) -> Result<u32> {
        if self.rows != self.cols {
            return Err(Error::MatrixShape { rows: self.rows, cols: self.cols });
        }
        let fp = self.fp;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1u32;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| m.get(i, c) != 0) else {
                return Ok(0);
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = fp.neg(det);
            }
            let piv = m.get(c, c);
            det = fp.mul(det, piv);
            let inv = fp.inv(piv)?;
            for i in c + 1..n {
                let f = fp.mul(m.get(i, c), inv);
                if f != 0 {
                    let (top, bottom) = m.data.split_at_mut(i * n);
                    axpy(fp, &mut bottom[c..n], f, &top[c * n + c..c * n + n]);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(self.fp, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Matrix::zeros(self.fp, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Some(out)
    }
}

/// Incrementally built semi-echelon basis of a subspace of `F_p^len`.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    fp: Fp,
    len: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(fp: Fp, len: usize) -> Self {
        EchelonBasis { fp, len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c];
            if f != 0 {
                axpy(self.fp, &mut v, f, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent of the current span; reports whether it was.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.len);
        let mut r = self.reduce(v);
        let Some(c) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.fp.inv(r[c]).expect("nonzero");
        for x in r.iter_mut() {
            *x = self.fp.mul(*x, inv);
        }
        self.rows.push(r);
        self.pivots.push(c);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f7() -> Fp {
        Fp::new(7).unwrap()
    }

    #[test]
    fn kernel_of_small_matrix() {
        let m = Matrix::from_rows(f7(), &[vec![1, 2, 3], vec![2, 4, 6]], 3);
        let k = m.kernel();
        assert_eq!(k.dim(), 2);
        for v in &k.basis {
            assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn det_and_inverse() {
        let m = Matrix::from_rows(f7(), &[vec![2, 1], vec![1, 1]], 2);
        assert_eq!(m.det().unwrap(), 1);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(f7(), 2));
        let s = Matrix::from_rows(f7(), &[vec![1, 2], vec![2, 4]], 2);
        assert_eq!(s.det().unwrap(), 0);
        assert!(s.inverse().is_none());
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in 1usize..7, cols in 1usize..7, seed in any::<u64>()) {
            let fp = Fp::new(5).unwrap();
            let mut s = seed;
            let data: Vec<Vec<u32>> = (0..rows).map(|_| (0..cols).map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) % 5) as u32
            }).collect()).collect();
            let m = Matrix::from_rows(fp, &data, cols);
            let k = m.kernel();
            prop_assert_eq!(m.rank() + k.dim(), cols);
            for v in &k.basis {
                prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
                prop_assert_eq!(k.coordinates(v).iter().filter(|&&x| x != 0).count(), 1);
            }
            let mut e = EchelonBasis::new(fp, cols);
            for r in &data {
                e.insert(r);
            }
            prop_assert_eq!(e.dim(), m.rank());
            for r in &data {
                prop_assert!(e.contains(r));
            }
        }
    }
}
