//! Balancing, Householder Hessenberg reduction and the complex Schur form.

use crate::dense::{DenseMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const ULP: f64 = f64::EPSILON;
const SAFE_MIN: f64 = f64::MIN_POSITIVE;

/// Diagonal similarity `B = D^{-1} A D` with power-of-two entries chosen so
/// that row and column off-diagonal norms of `B` are comparable.
pub(crate) fn balance(a: &mut DenseMatrix) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let n = a.dim();
    let mut scale = vec![1.0; n];
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * total {
                converged = false;
                scale[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for z in a.col_mut(i) {
                    *z *= f;
                }
            }
        }
        if converged {
            return scale;
        }
    }
}

/// Reduces `a` to upper Hessenberg form in place and returns the unitary
/// `Q` with `A_in = Q H Q^H`. Columns already in Hessenberg shape are skipped.
pub(crate) fn hessenberg(a: &mut DenseMatrix) -> DenseMatrix {
    let n = a.dim();
    let mut q = DenseMatrix::identity(n);
    if n < 3 {
        return q;
    }
    let mut v = vec![ZERO; n];
    let mut support: Vec<usize> = Vec::with_capacity(n);
    for k in 0..n - 2 {
        let tail: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };

        v.iter_mut().for_each(|z| *z = ZERO);
        support.clear();
        v[k + 1] = x0 + phase * alpha;
        support.push(k + 1);
        for i in k + 2..n {
            if a[(i, k)] != ZERO {
                v[i] = a[(i, k)];
                support.push(i);
            }
        }
        let beta = 2.0 / (v[k + 1].norm_sqr() + tail);

        // left: A <- (I - beta v v^H) A on columns k+1..n
        for j in k + 1..n {
            let col = a.col_mut(j);
            let s: C64 = support.iter().map(|&i| v[i].conj() * col[i]).sum::<C64>() * beta;
            if s != ZERO {
                for &i in &support {
                    col[i] -= v[i] * s;
                }
            }
        }
        a[(k + 1, k)] = -phase * alpha;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
        // right: A <- A (I - beta v v^H), Q likewise
        for m in [&mut *a, &mut q] {
            let mut w = vec![ZERO; n];
            for &c in &support {
                let vc = v[c];
                for (wi, &x) in w.iter_mut().zip(m.col(c)) {
                    *wi += x * vc;
                }
            }
            for &c in &support {
                let f = v[c].conj() * beta;
                for (x, &wi) in m.col_mut(c).iter_mut().zip(&w) {
                    *x -= wi * f;
                }
            }
        }
    }
    q
}

/// Plane rotation `G = [[c, s], [-conj(s), c]]` with real `c`.
#[derive(Debug, Clone, Copy)]
struct Rotation {
    c: f64,
    s: C64,
}

impl Rotation {
    /// Rotation with `G (x, y)^T = (r, 0)^T`; returns `(G, r)`.
    fn zeroing(x: C64, y: C64) -> (Rotation, C64) {
        if y == ZERO {
            return (Rotation { c: 1.0, s: ZERO }, x);
        }
        let ax = x.norm();
        if ax == 0.0 {
            let ay = y.norm();
            return (
                Rotation {
                    c: 0.0,
                    s: y.conj() / ay,
                },
                C64::new(ay, 0.0),
            );
        }
        let r = ax.hypot(y.norm());
        let phase = x / ax;
        (
            Rotation {
                c: ax / r,
                s: phase * y.conj() / r,
            },
            phase * r,
        )
    }

    /// `(x, y) <- G (x, y)`: row operation.
    #[inline(always)]
    fn left(self, x: &mut C64, y: &mut C64) {
        let (a, b, c, s) = (*x, *y, self.c, self.s);
        *x = C64::new(
            c * a.re + s.re * b.re - s.im * b.im,
            c * a.im + s.re * b.im + s.im * b.re,
        );
        *y = C64::new(
            c * b.re - s.re * a.re - s.im * a.im,
            c * b.im - s.re * a.im + s.im * a.re,
        );
    }

    /// `(x, y) <- (x, y) G^H`: column operation.
    #[inline(always)]
    fn right(self, x: &mut C64, y: &mut C64) {
        let (a, b, c, s) = (*x, *y, self.c, self.s);
        *x = C64::new(
            c * a.re + s.re * b.re + s.im * b.im,
            c * a.im + s.re * b.im - s.im * b.re,
        );
        *y = C64::new(
            c * b.re - s.re * a.re + s.im * a.im,
            c * b.im - s.re * a.im - s.im * a.re,
        );
    }
}

/// Complex Schur form `A = Z T Z^H` of an upper Hessenberg matrix.
pub(crate) struct Schur {
    pub t: DenseMatrix,
    pub z: DenseMatrix,
    pub sweeps: usize,
}

const CATCH_UP_BLOCK: usize = 8;
const ROW_BLOCK: usize = 16;

/// Rotations not yet applied to the Schur basis or to the columns right of
/// the window they came from. Neither is read while iterating, so they are
/// replayed in batches.
struct Pending {
    log: Vec<(usize, usize, Rotation)>,
    capacity: usize,
}

impl Pending {
    fn new(n: usize) -> Self {
        let capacity = 32 * n.max(1);
        Pending {
            log: Vec::with_capacity(capacity),
            capacity,
        }
    }

    /// Records rotation `rot` on rows/columns `k, k+1`, issued while the
    /// active window ended at `last`.
    fn push(&mut self, k: usize, last: usize, rot: Rotation, h: &mut DenseMatrix, z: &mut DenseMatrix) {
        self.log.push((k, last, rot));
        if self.log.len() >= self.capacity {
            self.flush(h, z);
        }
    }

    fn flush(&mut self, h: &mut DenseMatrix, z: &mut DenseMatrix) {
        let n = h.dim();
        if self.log.is_empty() {
            return;
        }
        let first = self.log.iter().map(|&(_, last, _)| last).min().unwrap_or(n) + 1;
        if first < n {
            for (b, block) in h.col_mut_range(first, n).chunks_mut(CATCH_UP_BLOCK * n).enumerate() {
                let c0 = first + b * CATCH_UP_BLOCK;
                let mut cols: Vec<&mut [C64]> = block.chunks_mut(n).collect();
                for &(k, last, rot) in &self.log {
                    for (c, col) in cols.iter_mut().enumerate() {
                        if c0 + c > last {
                            let (top, bottom) = col.split_at_mut(k + 1);
                            rot.left(&mut top[k], &mut bottom[0]);
                        }
                    }
                }
            }
        }
        for r0 in (0..n).step_by(ROW_BLOCK) {
            let r1 = (r0 + ROW_BLOCK).min(n);
            for &(k, _, rot) in &self.log {
                right_on_columns(z, rot, k, r0, r1);
            }
        }
        self.log.clear();
    }
}

/// Implicit single-shift QR on the Hessenberg matrix `h` with accumulated
/// basis `q`. Gives up with [`Error::NonConvergence`] after `40 n` sweeps.
pub(crate) fn schur(mut h: DenseMatrix, q: &DenseMatrix) -> Result<Schur> {
    let n = h.dim();
    let mut z = q.clone();
    let mut pending = Pending::new(n);
    let max_sweeps = 40 * n.max(1);
    let mut sweeps = 0usize;
    let mut rotations: Vec<(usize, Rotation)> = Vec::with_capacity(n);

    let mut i = n as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        let mut its = 0usize;
        loop {
            // locate the start of the trailing unreduced block
            let mut l = 0usize;
            for k in (1..=iu).rev() {
                let sub = h[(k, k - 1)].norm();
                if sub <= SAFE_MIN {
                    l = k;
                    break;
                }
                let mut tst = h[(k - 1, k - 1)].norm() + h[(k, k)].norm();
                if tst == 0.0 {
                    if k >= 2 {
                        tst += h[(k - 1, k - 2)].norm();
                    }
                    if k < iu {
                        tst += h[(k + 1, k)].norm();
                    }
                }
                if sub <= ULP * tst {
                    l = k;
                    break;
                }
            }
            if l > 0 {
                h[(l, l - 1)] = ZERO;
            }
            if l == iu {
                i -= 1;
                break;
            }
            if l + 1 == iu {
                standardize_2x2(&mut h, &mut z, &mut pending, l);
                i -= 2;
                break;
            }

            if sweeps >= max_sweeps {
                return Err(Error::NonConvergence { index: iu, sweeps });
            }
            sweeps += 1;
            its += 1;

            let shift = if its.is_multiple_of(10) && !its.is_multiple_of(20) {
                C64::new(0.75 * h[(l + 1, l)].re.abs(), 0.0) + h[(l, l)]
            } else if its.is_multiple_of(20) {
                C64::new(0.75 * h[(iu, iu - 1)].re.abs(), 0.0) + h[(iu, iu)]
            } else {
                wilkinson_shift(&h, iu)
            };

            rotations.clear();
            let mut ready = l + 1;
            for k in l..iu {
                let rot = if k == l {
                    Rotation::zeroing(h[(l, l)] - shift, h[(l + 1, l)]).0
                } else {
                    let (rot, r) = Rotation::zeroing(h[(k, k - 1)], h[(k + 1, k - 1)]);
                    h[(k, k - 1)] = r;
                    h[(k + 1, k - 1)] = ZERO;
                    rot
                };
                // Columns past `ready` still owe the earlier rotations of
                // this sweep; they catch up a block at a time, just before
                // the bulge reaches them.
                if ready < (k + 2).min(iu) {
                    let end = (ready + 1 + CATCH_UP_BLOCK).min(iu + 1);
                    left_on_columns(&mut h, &rotations, ready + 1, end);
                    ready = end - 1;
                }
                for j in k..=ready {
                    let col = h.col_mut(j);
                    let (top, bottom) = col.split_at_mut(k + 1);
                    rot.left(&mut top[k], &mut bottom[0]);
                }
                let last = (k + 2).min(iu);
                right_on_columns(&mut h, rot, k, l, last + 1);
                rotations.push((k, rot));
            }
            for &(k, rot) in &rotations {
                right_on_columns(&mut h, rot, k, 0, l);
                pending.push(k, iu, rot, &mut h, &mut z);
            }
        }
    }
    pending.flush(&mut h, &mut z);
    Ok(Schur { t: h, z, sweeps })
}

/// Applies a rotation from the right to columns `k, k+1` over rows `lo..hi`.
#[inline]
fn right_on_columns(h: &mut DenseMatrix, rot: Rotation, k: usize, lo: usize, hi: usize) {
    let n = h.dim();
    let (left, right) = h.col_mut_range(k, k + 2).split_at_mut(n);
    for (x, y) in left[lo..hi].iter_mut().zip(&mut right[lo..hi]) {
        rot.right(x, y);
    }
}

/// Applies a rotation sequence from the left to columns `c0..c1`. Several
/// columns are processed side by side so their dependency chains overlap.
fn left_on_columns(h: &mut DenseMatrix, rotations: &[(usize, Rotation)], c0: usize, c1: usize) {
    let n = h.dim();
    if c0 >= c1 {
        return;
    }
    for block in h.col_mut_range(c0, c1).chunks_mut(CATCH_UP_BLOCK * n) {
        let mut cols: Vec<&mut [C64]> = block.chunks_mut(n).collect();
        for &(k, rot) in rotations {
            for col in cols.iter_mut() {
                let (top, bottom) = col.split_at_mut(k + 1);
                rot.left(&mut top[k], &mut bottom[0]);
            }
        }
    }
}

/// Eigenvalue of the trailing 2x2 block closer to `h[i][i]`.
fn wilkinson_shift(h: &DenseMatrix, i: usize) -> C64 {
    let mut t = h[(i, i)];
    let u = h[(i - 1, i)].sqrt() * h[(i, i - 1)].sqrt();
    let s = u.norm();
    if s != 0.0 {
        let x = (h[(i - 1, i - 1)] - t) * 0.5;
        let sx = x.norm();
        let s = s.max(sx);
        let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        t -= u * (u / (x + y));
    }
    t
}

/// Eigenvalues of `[[a, b], [c, d]]`, the first chosen so that `lambda - d`
/// does not suffer cancellation.
fn eig_2x2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let mean = (a + d) * 0.5;
    let p = (a - d) * 0.5;
    let disc = (p * p + b * c).sqrt();
    let first = if (p + disc).norm() >= (p - disc).norm() {
        mean + disc
    } else {
        mean - disc
    };
    (first, a + d - first)
}

/// Triangularizes the 2x2 block at rows/columns `l, l+1` with one rotation.
fn standardize_2x2(h: &mut DenseMatrix, z: &mut DenseMatrix, pending: &mut Pending, l: usize) {
    let (a, b, c, d) = (h[(l, l)], h[(l, l + 1)], h[(l + 1, l)], h[(l + 1, l + 1)]);
    if c == ZERO {
        return;
    }
    let (first, second) = eig_2x2(a, b, c, d);
    // eigenvector of `first`: (first - d, c) or (b, first - a)
    let v1 = (first - d, c);
    let v2 = (b, first - a);
    let (x, y) = if v1.0.norm() + v1.1.norm() >= v2.0.norm() + v2.1.norm() {
        v1
    } else {
        v2
    };
    let (rot, _) = Rotation::zeroing(x, y);
    for j in l..l + 2 {
        let col = h.col_mut(j);
        let (top, bottom) = col.split_at_mut(l + 1);
        rot.left(&mut top[l], &mut bottom[0]);
    }
    right_on_columns(h, rot, l, 0, l + 2);
    pending.push(l, l + 1, rot, h, z);
    h[(l, l)] = first;
    h[(l + 1, l + 1)] = second;
    h[(l + 1, l)] = ZERO;
}
