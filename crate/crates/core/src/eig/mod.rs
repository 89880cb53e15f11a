//! Full eigendecomposition of dense complex non-normal matrices.
//!
//! The pipeline is: optional diagonal balancing, Householder reduction to
//! Hessenberg form, implicit single-shift complex QR to Schur form
//! `T = Z^H A Z`, back-substitution for the eigenvectors of `T`, and the
//! back-transformation to eigenvectors of `A`. Left eigenvectors of an
//! exactly complex-symmetric matrix are the conjugates of the right ones;
//! otherwise they come from forward substitution on `T`.

mod schur;
mod triangular;

use std::cmp::Ordering;

use crate::dense::{inner, norm2, DenseMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Default bound on `||H psi - lambda psi|| / ||H||_F`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Eigenvalue distance (relative to `||H||_F`) below which a pair is an
/// exceptional-point candidate.
pub const EP_EIGENVALUE_TOLERANCE: f64 = 1e-6;

/// Right-vector overlap above which a close pair is flagged as near-defective.
pub const EP_OVERLAP_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    pub balance: bool,
    pub residual_tolerance: f64,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions {
            balance: true,
            residual_tolerance: RESIDUAL_TOLERANCE,
        }
    }
}

/// Eigenvalues sorted by (real, imaginary) with unit-norm right and left
/// eigenvectors; index `k` of every field refers to the same state.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    pub right_vectors: Vec<Vec<C64>>,
    pub left_vectors: Vec<Vec<C64>>,
    /// `||H psi_R - lambda psi_R||_2` per state.
    pub residuals: Vec<f64>,
    /// `||psi_L^H H - lambda psi_L^H||_2` per state.
    pub left_residuals: Vec<f64>,
    pub ep_flags: Vec<bool>,
    /// Frobenius norm of the decomposed matrix.
    pub matrix_norm: f64,
    pub residual_tolerance: f64,
    pub qr_sweeps: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// True when every right and left residual is within
    /// `residual_tolerance * ||H||_F`.
    pub fn is_certified(&self) -> bool {
        let bound = self.residual_tolerance * self.matrix_norm;
        self.residuals.iter().chain(&self.left_residuals).all(|&r| r <= bound)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .chain(&self.left_residuals)
            .fold(0.0, |a, &b| a.max(b))
    }
}

pub fn eig(matrix: &DenseMatrix) -> Result<Spectrum> {
    eig_with(matrix, EigOptions::default())
}

pub fn eig_with(matrix: &DenseMatrix, options: EigOptions) -> Result<Spectrum> {
    let n = matrix.dim();
    if n == 0 {
        return Err(Error::Parameter("cannot diagonalize an empty matrix".into()));
    }
    if !matrix.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let norm = matrix.frobenius_norm();
    let symmetric = matrix.is_complex_symmetric();

    let mut work = matrix.clone();
    let scale = if options.balance {
        schur::balance(&mut work)
    } else {
        vec![1.0; n]
    };
    let q = schur::hessenberg(&mut work);
    let schur::Schur { t, z, sweeps } = schur::schur(work, &q)?;

    let t_norm = t.frobenius_norm();
    let smin = (f64::EPSILON * t_norm).max(f64::MIN_POSITIVE);
    let scale_ref = if t_norm > 0.0 { t_norm } else { 1.0 };

    // right eigenvectors: D Z y_k
    let mut right: Vec<Vec<C64>> = (0..n)
        .map(|k| {
            let y = triangular::right_vector(&t, k, smin, scale_ref);
            let mut v = vec![ZERO; n];
            for (m, &ym) in y.iter().enumerate() {
                if ym == ZERO {
                    continue;
                }
                for (vi, &zim) in v.iter_mut().zip(z.col(m)) {
                    *vi += zim * ym;
                }
            }
            for (vi, &d) in v.iter_mut().zip(&scale) {
                *vi *= d;
            }
            unit(v)
        })
        .collect();

    let mut left: Vec<Vec<C64>> = if symmetric {
        right.iter().map(|v| v.iter().map(|z| z.conj()).collect()).collect()
    } else {
        (0..n)
            .map(|k| {
                let u = triangular::left_vector(&t, k, smin, scale_ref);
                let mut v = vec![ZERO; n];
                for (m, &um) in u.iter().enumerate().skip(k) {
                    if um == ZERO {
                        continue;
                    }
                    for (vi, &zim) in v.iter_mut().zip(z.col(m)) {
                        *vi += zim * um;
                    }
                }
                for (vi, &d) in v.iter_mut().zip(&scale) {
                    *vi /= d;
                }
                unit(v)
            })
            .collect()
    };

    let mut eigenvalues: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let order = canonical_order(&eigenvalues);
    eigenvalues = order.iter().map(|&k| eigenvalues[k]).collect();
    right = order.iter().map(|&k| std::mem::take(&mut right[k])).collect();
    left = order.iter().map(|&k| std::mem::take(&mut left[k])).collect();

    let sparse = SparseColumns::new(matrix);
    let residuals: Vec<f64> = eigenvalues
        .iter()
        .zip(&right)
        .map(|(&l, v)| sparse.residual(l, v))
        .collect();
    let left_residuals: Vec<f64> = eigenvalues
        .iter()
        .zip(&left)
        .map(|(&l, v)| sparse.left_residual(l, v))
        .collect();

    let ep_flags = ep_flags(&eigenvalues, &right, norm);

    Ok(Spectrum {
        eigenvalues,
        right_vectors: right,
        left_vectors: left,
        residuals,
        left_residuals,
        ep_flags,
        matrix_norm: norm,
        residual_tolerance: options.residual_tolerance,
        qr_sweeps: sweeps,
    })
}

fn unit(v: Vec<C64>) -> Vec<C64> {
    let n = norm2(&v);
    if n > 0.0 && n.is_finite() {
        v.into_iter().map(|z| z / n).collect()
    } else {
        v
    }
}

/// Sort permutation by real part, then imaginary part, then original index.
fn canonical_order(values: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| compare_eigenvalues(values[a], values[b]).then(a.cmp(&b)));
    order
}

pub fn compare_eigenvalues(a: C64, b: C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn ep_flags(values: &[C64], right: &[Vec<C64>], norm: f64) -> Vec<bool> {
    let tol = EP_EIGENVALUE_TOLERANCE * norm;
    let mut flags = vec![false; values.len()];
    for j in 0..values.len() {
        for k in j + 1..values.len() {
            if values[k].re - values[j].re >= tol {
                break;
            }
            if (values[k] - values[j]).norm() < tol && inner(&right[j], &right[k]).norm() > EP_OVERLAP_THRESHOLD {
                flags[j] = true;
                flags[k] = true;
            }
        }
    }
    flags
}

/// Column-compressed nonzero pattern for cheap residual evaluation.
struct SparseColumns {
    cols: Vec<Vec<(usize, C64)>>,
}

impl SparseColumns {
    fn new(m: &DenseMatrix) -> Self {
        let cols = (0..m.dim())
            .map(|j| {
                m.col(j)
                    .iter()
                    .enumerate()
                    .filter(|(_, &z)| z != ZERO)
                    .map(|(i, &z)| (i, z))
                    .collect()
            })
            .collect();
        SparseColumns { cols }
    }

    /// `||A x - lambda x|| / ||x||`.
    fn residual(&self, lambda: C64, x: &[C64]) -> f64 {
        let mut y: Vec<C64> = x.iter().map(|&v| -lambda * v).collect();
        for (col, &xj) in self.cols.iter().zip(x) {
            for &(i, a) in col {
                y[i] += a * xj;
            }
        }
        norm2(&y) / norm2(x)
    }

    /// `||A^H x - conj(lambda) x|| / ||x||`.
    fn left_residual(&self, lambda: C64, x: &[C64]) -> f64 {
        let y: Vec<C64> = self
            .cols
            .iter()
            .zip(x)
            .map(|(col, &xj)| col.iter().map(|&(i, a)| a.conj() * x[i]).sum::<C64>() - lambda.conj() * xj)
            .collect();
        norm2(&y) / norm2(x)
    }
}

/// `||H psi - lambda psi||_2 / ||psi||_2`.
pub fn residual(matrix: &DenseMatrix, lambda: C64, vector: &[C64]) -> Result<f64> {
    if vector.len() != matrix.dim() {
        return Err(Error::Parameter(format!(
            "vector length {} does not match matrix dimension {}",
            vector.len(),
            matrix.dim()
        )));
    }
    let norm = norm2(vector);
    if norm == 0.0 {
        return Err(Error::Domain("residual of a zero vector".into()));
    }
    let hv = matrix.mul_vec(vector);
    let r: Vec<C64> = hv.iter().zip(vector).map(|(&a, &b)| a - lambda * b).collect();
    Ok(norm2(&r) / norm)
}

/// Left eigenvectors obtained independently from the eigenvectors of `H^H`.
#[derive(Debug, Clone)]
pub struct GenericLeftVectors {
    pub vectors: Vec<Vec<C64>>,
    /// Set where two or more eigenvalues of `H^H` matched the same state.
    pub ep_clusters: Vec<bool>,
}

/// Left eigenvectors of `matrix` computed as right eigenvectors of its
/// conjugate transpose, matched to `spectrum` by `conj(mu) ~ lambda_k`.
pub fn left_vectors_generic(matrix: &DenseMatrix, spectrum: &Spectrum) -> Result<GenericLeftVectors> {
    let adjoint = eig(&matrix.conj_transpose())?;
    let tol = EP_EIGENVALUE_TOLERANCE * spectrum.matrix_norm.max(f64::MIN_POSITIVE);
    let mut vectors = Vec::with_capacity(spectrum.len());
    let mut ep_clusters = Vec::with_capacity(spectrum.len());
    for &lambda in &spectrum.eigenvalues {
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        let mut candidates = 0;
        for (m, mu) in adjoint.eigenvalues.iter().enumerate() {
            let d = (mu.conj() - lambda).norm();
            if d < tol {
                candidates += 1;
            }
            if d < best_dist {
                best_dist = d;
                best = m;
            }
        }
        vectors.push(adjoint.right_vectors[best].clone());
        ep_clusters.push(candidates >= 2);
    }
    Ok(GenericLeftVectors { vectors, ep_clusters })
}

/// `min_phi || a - e^{i phi} b ||` for unit vectors.
pub fn phase_aligned_distance(a: &[C64], b: &[C64]) -> f64 {
    let overlap = inner(b, a);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
