//! Dense Hamiltonian of a chain with uniform complex hopping `t = T e^{i theta}`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dense::{DenseMatrix, C64};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, ChainSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hopping {
    /// Magnitude `T >= 0`.
    pub magnitude: f64,
    /// Non-reciprocal phase `theta` in radians.
    pub theta: f64,
}

impl Hopping {
    pub fn new(magnitude: f64, theta: f64) -> Self {
        Hopping { magnitude, theta }
    }

    pub fn amplitude(&self) -> C64 {
        C64::from_polar(self.magnitude, self.theta)
    }

    /// `T sin(theta)`.
    pub fn non_hermiticity(&self) -> f64 {
        self.magnitude * self.theta.sin()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.magnitude >= 0.0) || !self.magnitude.is_finite() || !self.theta.is_finite() {
            return Err(Error::Parameter(format!(
                "hopping needs finite T >= 0 and finite theta, got T={} theta={}",
                self.magnitude, self.theta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub entries: DenseMatrix,
    pub boundary: Boundary,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// Writes the matrix as plain-text CSV: one line per row, columns
    /// `re_1,im_1,re_2,im_2,...` after a header line, values with 17
    /// significant digits.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let n = self.dim();
        let mut out = String::new();
        let header: Vec<String> = (1..=n).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .flat_map(|j| {
                    let z = self.entries[(i, j)];
                    [format!("{:.16e}", z.re), format!("{:.16e}", z.im)]
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// `H = sum_i V_i |i><i| + t sum_i (|i><i+1| + |i+1><i|)`, plus the
/// `(1, N)` and `(N, 1)` bonds for a periodic chain.
///
/// For `N = 2` the periodic bond coincides with the open one.
pub fn build(chain: &ChainSpec, hopping: &Hopping) -> Result<HamiltonianMatrix> {
    hopping.validate()?;
    let v = chain.potentials()?;
    Ok(build_from_potentials(&v, hopping, chain.boundary))
}

pub fn build_from_potentials(v: &[f64], hopping: &Hopping, boundary: Boundary) -> HamiltonianMatrix {
    let n = v.len();
    let t = hopping.amplitude();
    let mut m = DenseMatrix::zeros(n);
    for (i, &vi) in v.iter().enumerate() {
        m[(i, i)] = C64::new(vi, 0.0);
    }
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = t;
        m[(i + 1, i)] = t;
    }
    if boundary == Boundary::Periodic && n >= 2 {
        m[(0, n - 1)] = t;
        m[(n - 1, 0)] = t;
    }
    HamiltonianMatrix { entries: m, boundary }
}
