//! Square dense complex matrices stored column-major.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major nested rows. Panics if not square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has length {}, expected {n}", row.len());
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Column `j` as a contiguous slice.
    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        let n = self.n;
        &mut self.data[j * n..(j + 1) * n]
    }

    /// Columns `j0..j1` as one contiguous slice.
    pub fn col_mut_range(&mut self, j0: usize, j1: usize) -> &mut [C64] {
        let n = self.n;
        &mut self.data[j0 * n..j1 * n]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for j in 0..self.n {
            for i in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = self.transpose();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    /// Exact test of `A^T == A`.
    pub fn is_complex_symmetric(&self) -> bool {
        (0..self.n).all(|j| (0..j).all(|i| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.n).all(|j| (0..=j).all(|i| self[(i, j)] == self[(j, i)].conj()))
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![ZERO; self.n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for (yi, &a) in y.iter_mut().zip(self.col(j)) {
                *yi += a * xj;
            }
        }
        y
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for j in 0..n {
            for k in 0..n {
                let b = other[(k, j)];
                if b == ZERO {
                    continue;
                }
                let a = &self.data[k * n..(k + 1) * n];
                let c = &mut out.data[j * n..(j + 1) * n];
                for (ci, &ai) in c.iter_mut().zip(a) {
                    *ci += ai * b;
                }
            }
        }
        out
    }

    /// Same matrix with rows and columns reordered: `out[i][j] = self[p[i]][p[j]]`.
    pub fn permuted(&self, p: &[usize]) -> DenseMatrix {
        assert_eq!(p.len(), self.n);
        let mut out = Self::zeros(self.n);
        for j in 0..self.n {
            for i in 0..self.n {
                out[(i, j)] = self[(p[i], p[j])];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[j * self.n + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.n + i]
    }
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<x|y> = sum conj(x_i) y_i`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Returns `x / ||x||_2`, or `None` for a zero vector.
pub fn normalized(x: &[C64]) -> Option<Vec<C64>> {
    let n = norm2(x);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(x.iter().map(|z| z / n).collect())
}
