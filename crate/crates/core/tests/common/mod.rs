//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use quasichain::dense::{DenseMatrix, C64, ONE, ZERO};
use quasichain::eig::Spectrum;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub struct TestRng(Xoshiro256PlusPlus);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// Uniform on `[-1, 1)`.
    pub fn signed(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    pub fn complex(&mut self) -> C64 {
        C64::new(self.signed(), self.signed())
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }
}

pub fn random_matrix(rng: &mut TestRng, n: usize) -> DenseMatrix {
    let rows: Vec<Vec<C64>> = (0..n).map(|_| (0..n).map(|_| rng.complex()).collect()).collect();
    DenseMatrix::from_rows(&rows)
}

pub fn random_complex_symmetric(rng: &mut TestRng, n: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z = rng.complex();
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    m
}

type Rows = Vec<Vec<C64>>;

fn to_rows(a: &DenseMatrix) -> Rows {
    let n = a.dim();
    (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect()
}

fn mul(a: &Rows, b: &Rows) -> Rows {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Monic characteristic polynomial coefficients `c[0..=n]` (ascending
/// powers) by the Faddeev-LeVerrier recursion.
pub fn char_poly(a: &DenseMatrix) -> Vec<C64> {
    let n = a.dim();
    let a = to_rows(a);
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let mut m: Rows = vec![vec![ZERO; n]; n];
    for k in 1..=n {
        m = mul(&a, &m);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += c[n - k + 1];
        }
        let am = mul(&a, &m);
        let tr: C64 = (0..n).map(|i| am[i][i]).sum();
        c[n - k] = -tr / k as f64;
    }
    c
}

fn horner(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// Roots of a monic polynomial: Durand-Kerner iteration polished by Newton.
pub fn poly_roots(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let radius = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = ONE;
            for j in 0..n {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            let step = horner(c, z[i]).0 / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..5 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            *zi -= p / dp;
        }
    }
    z
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest worst-case distance over all pairings of two small root sets.
pub fn matched_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    permutations(a.len())
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(i, &j)| (a[i] - b[j]).norm())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn trace(a: &DenseMatrix) -> C64 {
    (0..a.dim()).map(|i| a[(i, i)]).sum()
}

fn dot_h(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Largest `|<L_i|R_j>|` over pairs `i != j` where neither state is flagged.
pub fn max_biorthogonality_defect(s: &Spectrum) -> f64 {
    let n = s.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j || s.ep_flags[i] || s.ep_flags[j] {
                continue;
            }
            worst = worst.max(dot_h(&s.left_vectors[i], &s.right_vectors[j]).norm());
        }
    }
    worst
}

/// Left eigenvectors of `m` from a separate decomposition of the reversed
/// adjoint `P M^H P^T`, matched to `s` by eigenvalue. Returns `None` for
/// states whose match is ambiguous.
pub fn left_vectors_reversed_adjoint(m: &DenseMatrix, s: &Spectrum) -> Vec<Option<Vec<C64>>> {
    let n = m.dim();
    let p: Vec<usize> = (0..n).rev().collect();
    let adj = quasichain::eig::eig(&m.conj_transpose().permuted(&p)).unwrap();
    let tol = 1e-6 * s.matrix_norm;
    s.eigenvalues
        .iter()
        .map(|&lambda| {
            let close: Vec<usize> = (0..n)
                .filter(|&k| (adj.eigenvalues[k].conj() - lambda).norm() < tol)
                .collect();
            if close.len() != 1 {
                return None;
            }
            let x = &adj.right_vectors[close[0]];
            let mut y = vec![ZERO; n];
            for (i, &pi) in p.iter().enumerate() {
                y[pi] = x[i];
            }
            Some(y)
        })
        .collect()
}
