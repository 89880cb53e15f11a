//! Two-band alternating chain in momentum space: closed-form energies and
//! eigenvectors, the critical hopping, and the sublattice order parameter
//! over a (k, T) grid.

use std::f64::consts::PI;
use std::fmt;

use crate::dense::{DenseMatrix, C64, ONE};
use crate::eig::{compare_eigenvalues, eig};
use crate::ham::Hopping;
use crate::obs::{phase_rigidity, sigma_z_abs, SublatticeParity};
use crate::{Error, Result};

/// Below this `|cos(ka/2)|` the critical hopping is reported as infinite.
pub const COS_CUTOFF: f64 = 1e-12;

/// Relative distance from the critical hopping inside which a grid cell is
/// classified as [`Region::Boundary`].
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Relative size of the discriminant at which the two branches coalesce.
pub const EP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyParams {
    pub v_a: f64,
    pub v_b: f64,
    pub hopping: Hopping,
    pub spacing_a: f64,
}

impl ToyParams {
    pub fn new(v_a: f64, v_b: f64, hopping: Hopping) -> Result<Self> {
        let p = ToyParams {
            v_a,
            v_b,
            hopping,
            spacing_a: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_v() > 0.0) {
            return Err(Error::Parameter(format!(
                "v_b - v_a must be positive, got {}",
                self.delta_v()
            )));
        }
        if !(self.spacing_a > 0.0) || !self.spacing_a.is_finite() {
            return Err(Error::Parameter(format!(
                "spacing must be positive, got {}",
                self.spacing_a
            )));
        }
        self.hopping.validate()
    }

    pub fn delta_v(&self) -> f64 {
        self.v_b - self.v_a
    }

    fn mean(&self) -> f64 {
        0.5 * (self.v_a + self.v_b)
    }

    fn with_magnitude(&self, magnitude: f64) -> Self {
        ToyParams {
            hopping: Hopping::new(magnitude, self.hopping.theta),
            ..*self
        }
    }
}

/// Energy branch label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Minus => "-",
            Branch::Plus => "+",
        }
    }
}

/// `[[V_A, t(1 + e^{-ika})], [t(1 + e^{ika}), V_B]]`.
pub fn bloch_matrix(params: &ToyParams, k: f64) -> DenseMatrix {
    let t = params.hopping.amplitude();
    let ka = k * params.spacing_a;
    let b = t * (ONE + C64::from_polar(1.0, -ka));
    let c = t * (ONE + C64::from_polar(1.0, ka));
    DenseMatrix::from_rows(&[vec![C64::new(params.v_a, 0.0), b], vec![c, C64::new(params.v_b, 0.0)]])
}

/// `DV^2 + 16 t^2 cos^2(ka/2)`, with a vanishing imaginary part forced to
/// `+0` so the principal square root does not depend on its sign.
fn discriminant(params: &ToyParams, k: f64) -> C64 {
    let t = params.hopping.amplitude();
    let cos = (0.5 * k * params.spacing_a).cos();
    let mut d = params.delta_v().powi(2) + t * t * (16.0 * cos * cos);
    if d.im.abs() <= 1e-15 * d.norm() {
        d.im = 0.0;
    }
    d
}

/// `S = sqrt(DV^2 + 16 t^2 cos^2(ka/2))`, principal branch.
pub fn splitting(params: &ToyParams, k: f64) -> C64 {
    discriminant(params, k).sqrt()
}

/// `(E_-, E_+) = (V_A + V_B)/2 -+ S/2`.
pub fn closed_energies(params: &ToyParams, k: f64) -> (C64, C64) {
    let half = splitting(params, k) * 0.5;
    let mean = C64::new(params.mean(), 0.0);
    (mean - half, mean + half)
}

/// Unit eigenvector of one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedEigvec {
    pub vector: [C64; 2],
    /// The branches coalesce here and `vector` is the single eigenvector.
    pub exceptional: bool,
}

/// Normalized `(2t(1 + e^{-ika}), DV +- S)`, or `(-DV +- S, 2t(1 + e^{ika}))`
/// when the first form vanishes.
pub fn closed_eigvec(params: &ToyParams, k: f64, branch: Branch) -> ClosedEigvec {
    let m = bloch_matrix(params, k);
    let (b, c) = (m[(0, 1)], m[(1, 0)]);
    let dv = C64::new(params.delta_v(), 0.0);
    let d = discriminant(params, k);
    let scale = params.delta_v().powi(2) + 16.0 * params.hopping.magnitude.powi(2);
    let exceptional = d.norm() <= EP_TOLERANCE * scale;
    let s = if exceptional {
        C64::new(0.0, 0.0)
    } else {
        d.sqrt() * branch.sign()
    };
    let first = [b * 2.0, dv + s];
    let second = [s - dv, c * 2.0];
    let size = |v: &[C64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
    let v = if size(&first) >= size(&second) { first } else { second };
    let n = size(&v).sqrt();
    ClosedEigvec {
        vector: [v[0] / n, v[1] / n],
        exceptional,
    }
}

/// `DV / (4 cos(ka/2))`, or infinity where the cosine vanishes.
pub fn critical_hopping(params: &ToyParams, k: f64) -> f64 {
    let cos = (0.5 * k * params.spacing_a).cos();
    if cos.abs() <= COS_CUTOFF {
        f64::INFINITY
    } else {
        params.delta_v() / (4.0 * cos.abs())
    }
}

/// Grid cell classification relative to the critical hopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Above the critical hopping: complex energies, uniform sublattice weight.
    Blue,
    /// Below the critical hopping: sublattice-polarized states.
    Yellow,
    Boundary,
}

impl Region {
    pub fn classify(t: f64, t_c: f64) -> Region {
        if t_c.is_infinite() {
            return Region::Yellow;
        }
        if (t - t_c).abs() <= BOUNDARY_TOLERANCE * t_c {
            Region::Boundary
        } else if t > t_c {
            Region::Blue
        } else {
            Region::Yellow
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Blue => "BLUE",
            Region::Yellow => "YELLOW",
            Region::Boundary => "BOUNDARY",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One branch at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyGridRow {
    pub k: f64,
    pub t: f64,
    pub branch: Branch,
    pub energy: C64,
    pub sigma_z_abs: f64,
    pub rigidity: f64,
    pub region: Region,
}

/// `count` evenly spaced values on `[start, end]`.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    end
                } else {
                    start + (end - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Default momentum grid, `ka/pi` in `[0, 1]` with 201 points.
pub fn default_k_grid(params: &ToyParams) -> Vec<f64> {
    linspace(0.0, 1.0, 201)
        .into_iter()
        .map(|x| x * PI / params.spacing_a)
        .collect()
}

/// Default hopping grid, `T/DV` in `[0, 1]` with 201 points.
pub fn default_t_grid(params: &ToyParams) -> Vec<f64> {
    linspace(0.0, params.delta_v(), 201)
}

/// Closed-form energies along `k_grid` with branch labels kept continuous:
/// the principal pair is swapped wherever that keeps each label closer to
/// its value at the previous momentum.
pub fn continuous_branches(params: &ToyParams, k_grid: &[f64]) -> Vec<(C64, C64)> {
    let mut out: Vec<(C64, C64)> = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let (mut lo, mut hi) = closed_energies(params, k);
        if let Some(&(plo, phi)) = out.last() {
            if (lo - plo).norm() + (hi - phi).norm() > (lo - phi).norm() + (hi - plo).norm() {
                std::mem::swap(&mut lo, &mut hi);
            }
        }
        out.push((lo, hi));
    }
    out
}

/// Numeric diagonalization of the Bloch matrix at every `(k, T)` cell, two
/// rows per cell ordered by `T`, then `k`, then branch (`-` first). The
/// hopping phase is taken from `params`.
pub fn order_parameter_grid(params: &ToyParams, k_grid: &[f64], t_grid: &[f64]) -> Result<Vec<ToyGridRow>> {
    params.validate()?;
    let mut rows = Vec::with_capacity(2 * k_grid.len() * t_grid.len());
    for &t in t_grid {
        let p = params.with_magnitude(t);
        p.validate()?;
        let labels = continuous_branches(&p, k_grid);
        for (&k, &(e_minus, e_plus)) in k_grid.iter().zip(&labels) {
            let region = Region::classify(t, critical_hopping(&p, k));
            let spectrum = eig(&bloch_matrix(&p, k))?;
            let (l0, l1) = (spectrum.eigenvalues[0], spectrum.eigenvalues[1]);
            // assign numeric eigenvalues to labels by least total distance
            let direct = (l0 - e_minus).norm() + (l1 - e_plus).norm();
            let crossed = (l0 - e_plus).norm() + (l1 - e_minus).norm();
            let order = if direct <= crossed { [0, 1] } else { [1, 0] };
            for (branch, idx) in [Branch::Minus, Branch::Plus].into_iter().zip(order) {
                let right = &spectrum.right_vectors[idx];
                rows.push(ToyGridRow {
                    k,
                    t,
                    branch,
                    energy: spectrum.eigenvalues[idx],
                    sigma_z_abs: sigma_z_abs(right, SublatticeParity::OddSitesA)?,
                    rigidity: phase_rigidity(&spectrum.left_vectors[idx], right)?,
                    region,
                });
            }
        }
    }
    Ok(rows)
}

/// Numeric eigenvalues of the Bloch matrix in canonical order.
pub fn numeric_energies(params: &ToyParams, k: f64) -> Result<[C64; 2]> {
    let s = eig(&bloch_matrix(params, k))?;
    Ok([s.eigenvalues[0], s.eigenvalues[1]])
}

/// Closed-form energies in the same canonical order as [`numeric_energies`].
pub fn sorted_closed_energies(params: &ToyParams, k: f64) -> [C64; 2] {
    let (a, b) = closed_energies(params, k);
    let mut e = [a, b];
    e.sort_by(|x, y| compare_eigenvalues(*x, *y));
    e
}
