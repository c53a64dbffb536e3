//! Banded matrices and their LU factorization with partial pivoting.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals.
///
/// Each row stores `2·kl + ku + 1` entries so that the fill-in produced by
/// row pivoting fits in place.
#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Adds `v` at (i, j). Entries outside the band are a logic error.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.slot(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.slot(i, j);
        self.data[k] = v;
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|x| *x = 0.0);
    }

    /// Replaces row and column `d` with the identity.
    pub fn eliminate_dof(&mut self, d: usize) {
        let lo = d.saturating_sub(self.kl.max(self.ku));
        let hi = (d + self.kl.max(self.ku) + 1).min(self.n);
        for j in lo..hi {
            if self.in_band(d, j) {
                self.set(d, j, 0.0);
            }
            if self.in_band(j, d) {
                self.set(j, d, 0.0);
            }
        }
        self.set(d, d, 1.0);
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + 1).min(self.n);
                (lo..hi).map(|j| self.data[self.slot(i, j)] * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Factorizes in place, consuming the matrix.
    pub fn lu(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let reach = self.ku + self.kl;
        let mut pivots = vec![0usize; n];
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = scale * f64::EPSILON * 1e-3;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].abs();
            for i in k + 1..=last {
                let v = self.data[self.slot(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if !(best > tiny) {
                return Err(Error::LinearSolve { pivot: k });
            }
            let jmax = (k + reach).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let a = self.slot(k, j);
                    let b = self.slot(p, j);
                    self.data.swap(a, b);
                }
            }
            let inv = 1.0 / self.data[self.slot(k, k)];
            for i in k + 1..=last {
                let s = self.slot(i, k);
                let l = self.data[s] * inv;
                self.data[s] = l;
                if l != 0.0 {
                    let rk = self.slot(k, k);
                    let ri = self.slot(i, k);
                    for off in 1..=(jmax - k) {
                        self.data[ri + off] -= l * self.data[rk + off];
                    }
                }
            }
        }
        Ok(BandLu { m: self, pivots })
    }
}

/// LU factors of a [`BandMatrix`].
#[derive(Clone, Debug)]
pub struct BandLu {
    m: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = &self.m;
        let n = m.n;
        let reach = m.ku + m.kl;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + m.kl).min(n - 1) {
                    b[i] -= m.data[m.slot(i, k)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let row = m.slot(i, i);
            let mut s = b[i];
            for off in 1..=(reach.min(n - 1 - i)) {
                s -= m.data[row + off] * b[i + off];
            }
            b[i] = s / m.data[row];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn random_band(n: usize, kl: usize, ku: usize, vals: &[f64]) -> BandMatrix {
        let mut m = BandMatrix::zeros(n, kl, ku);
        let mut k = 0;
        for i in 0..n {
            for j in 0..n {
                if m.in_band(i, j) {
                    m.set(i, j, vals[k % vals.len()] + if i == j { 0.1 } else { 0.0 });
                    k += 1;
                }
            }
        }
        m
    }

    #[test]
    fn solves_tridiagonal_poisson() {
        let n = 50;
        let mut m = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            m.set(i, i, 2.0);
            if i > 0 {
                m.set(i, i - 1, -1.0);
            }
            if i + 1 < n {
                m.set(i, i + 1, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = m.mul_vec(&x);
        let got = m.lu().unwrap().solve(&b);
        for (a, e) in got.iter().zip(&x) {
            assert!((a - e).abs() < 1e-11);
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let mut m = BandMatrix::zeros(3, 1, 1);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        m.set(1, 2, 1.0);
        m.set(2, 1, 1.0);
        m.set(2, 2, 1.0);
        let b = [1.0, 2.0, 3.0];
        let x = m.clone().lu().unwrap().solve(&b);
        let r = m.mul_vec(&x);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = BandMatrix::zeros(4, 1, 1);
        assert!(matches!(m.lu(), Err(Error::LinearSolve { pivot: 0 })));
    }

    #[test]
    fn eliminate_dof_gives_identity_row_and_column() {
        let vals: Vec<f64> = (0..97).map(|k| ((k * 37) % 11) as f64 - 5.0).collect();
        let mut m = random_band(12, 3, 2, &vals);
        m.eliminate_dof(5);
        for j in 0..12 {
            assert_eq!(m.get(5, j), if j == 5 { 1.0 } else { 0.0 });
            assert_eq!(m.get(j, 5), if j == 5 { 1.0 } else { 0.0 });
        }
    }

    proptest! {
        #[test]
        fn matches_dense_lu(
            n in 1usize..40,
            kl in 0usize..6,
            ku in 0usize..6,
            vals in proptest::collection::vec(-1.0f64..1.0, 50),
            rhs in proptest::collection::vec(-1.0f64..1.0, 40),
        ) {
            let m = random_band(n, kl, ku, &vals);
            let dense = m.to_dense();
            let b = DVector::from_column_slice(&rhs[..n]);
            prop_assume!(dense.clone().lu().determinant().abs() > 1e-6);
            let cond_guard = dense.clone().svd(false, false).singular_values;
            prop_assume!(cond_guard.min() > 1e-6 * cond_guard.max());
            let expect = dense.lu().solve(&b).unwrap();
            let got = m.lu().unwrap().solve(b.as_slice());
            let scale = expect.amax().max(1.0);
            for i in 0..n {
                prop_assert!((got[i] - expect[i]).abs() <= 1e-8 * scale, "{} vs {}", got[i], expect[i]);
            }
        }
    }
}
