//! Eigenvectors of an upper triangular Schur factor.

use crate::dense::{DenseMatrix, C64, ONE, ZERO};

/// Magnitude above which partial solutions are rescaled.
const RESCALE_AT: f64 = 1e100;

/// Relative shift used by the inverse-iteration fallback.
const FALLBACK_SHIFT: f64 = 1e-10;

/// Right eigenvector of `t` for the eigenvalue `t[k][k]`, supported on
/// entries `0..=k`.
///
/// Solved by back-substitution; when a pivot `t[j][j] - lambda` has
/// magnitude at most `smin`, one step of inverse iteration with the shift
/// `lambda + 1e-10 * scale` is used instead.
pub(crate) fn right_vector(t: &DenseMatrix, k: usize, smin: f64, scale: f64) -> Vec<C64> {
    let lambda = t[(k, k)];
    back_substitute(t, k, lambda, smin).unwrap_or_else(|| {
        let mu = lambda + C64::new(FALLBACK_SHIFT * scale, 0.0);
        let mut rhs = vec![ZERO; k + 1];
        rhs[k] = ONE;
        solve_shifted_upper(t, k, mu, rhs)
    })
}

fn back_substitute(t: &DenseMatrix, k: usize, lambda: C64, smin: f64) -> Option<Vec<C64>> {
    let mut x = vec![ZERO; k + 1];
    x[k] = ONE;
    let mut rhs: Vec<C64> = t.col(k)[..k].iter().map(|&v| -v).collect();
    for j in (0..k).rev() {
        let pivot = t[(j, j)] - lambda;
        if pivot.norm() <= smin {
            return None;
        }
        let xj = rhs[j] / pivot;
        x[j] = xj;
        if xj.norm() > RESCALE_AT {
            let f = 1.0 / xj.norm();
            x[j..].iter_mut().for_each(|z| *z *= f);
            rhs[..j].iter_mut().for_each(|z| *z *= f);
        }
        let xj = x[j];
        for (r, &tij) in rhs[..j].iter_mut().zip(&t.col(j)[..j]) {
            *r -= tij * xj;
        }
    }
    Some(x)
}

/// Solves `(T - mu I) x = rhs` on the leading `(k+1) x (k+1)` block.
fn solve_shifted_upper(t: &DenseMatrix, k: usize, mu: C64, mut rhs: Vec<C64>) -> Vec<C64> {
    let mut x = vec![ZERO; k + 1];
    for j in (0..=k).rev() {
        let mut pivot = t[(j, j)] - mu;
        if pivot == ZERO {
            pivot = C64::new(f64::MIN_POSITIVE.sqrt(), 0.0);
        }
        let xj = rhs[j] / pivot;
        x[j] = xj;
        if xj.norm() > RESCALE_AT {
            let f = 1.0 / xj.norm();
            x[j..].iter_mut().for_each(|z| *z *= f);
            rhs[..j].iter_mut().for_each(|z| *z *= f);
        }
        let xj = x[j];
        for (r, &tij) in rhs[..j].iter_mut().zip(&t.col(j)[..j]) {
            *r -= tij * xj;
        }
    }
    x
}

/// Left eigenvector `u` of `t` for `t[k][k]` (`u^H T = lambda u^H`),
/// supported on entries `k..n`; returned as the full length-`n` vector.
pub(crate) fn left_vector(t: &DenseMatrix, k: usize, smin: f64, scale: f64) -> Vec<C64> {
    let lambda = t[(k, k)];
    let w = forward_substitute(t, k, lambda, Some(smin)).unwrap_or_else(|| {
        let mu = lambda + C64::new(FALLBACK_SHIFT * scale, 0.0);
        forward_substitute(t, k, mu, None).expect("unguarded solve always succeeds")
    });
    w.into_iter().map(|z| z.conj()).collect()
}

/// Row vector `w` with `w (T - mu I) = e_k^T` scaled so `w_k = 1` when
/// `mu == t[k][k]`; `None` if a guarded pivot is below `smin`.
fn forward_substitute(t: &DenseMatrix, k: usize, mu: C64, smin: Option<f64>) -> Option<Vec<C64>> {
    let n = t.dim();
    let mut w = vec![ZERO; n];
    let exact = smin.is_some();
    if exact {
        w[k] = ONE;
    } else {
        let mut pivot = t[(k, k)] - mu;
        if pivot == ZERO {
            pivot = C64::new(f64::MIN_POSITIVE.sqrt(), 0.0);
        }
        w[k] = ONE / pivot;
    }
    for j in k + 1..n {
        let col = t.col(j);
        let s: C64 = w[k..j].iter().zip(&col[k..j]).map(|(a, b)| a * b).sum();
        let mut pivot = t[(j, j)] - mu;
        if let Some(smin) = smin {
            if pivot.norm() <= smin {
                return None;
            }
        } else if pivot == ZERO {
            pivot = C64::new(f64::MIN_POSITIVE.sqrt(), 0.0);
        }
        let wj = -s / pivot;
        w[j] = wj;
        if wj.norm() > RESCALE_AT {
            let f = 1.0 / wj.norm();
            w[k..=j].iter_mut().for_each(|z| *z *= f);
        }
    }
    Some(w)
}
