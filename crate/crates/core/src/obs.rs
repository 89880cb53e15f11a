//! Localization diagnostics computed from eigenvectors.
//!
//! Per-state quantities (IPR, sublattice imbalance, localization length) use
//! 2-norm normalized right eigenvectors. Phase rigidity is the only quantity
//! that pairs left and right vectors.

use crate::dense::{inner, norm2, C64};
use crate::eig::Spectrum;
use crate::{Error, Result};

/// Deviation from unit norm beyond which inputs are renormalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Minimum number of sizes for a scaling fit.
pub const MIN_FIT_POINTS: usize = 4;

/// Diagnostics of a single eigenstate.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    pub state_index: usize,
    pub eigenvalue: C64,
    pub ipr: f64,
    pub rigidity: f64,
    pub sigma_z_abs: Option<f64>,
    pub loc_length: f64,
    /// The state belongs to a near-defective pair; its rigidity is unreliable.
    pub ep_flag: bool,
}

/// Which sublattice the odd (1-based) sites belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SublatticeParity {
    #[default]
    OddSitesA,
    EvenSitesA,
}

/// Which extreme of the IPR distribution to select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExtremeMode {
    MaxIpr,
    MinIpr,
}

impl ExtremeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtremeMode::MaxIpr => "MAX_IPR",
            ExtremeMode::MinIpr => "MIN_IPR",
        }
    }
}

/// Least-squares fit of `log(ipr)` against `log(size)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub sizes: Vec<usize>,
    pub iprs: Vec<f64>,
    pub d2: f64,
    pub intercept: f64,
    /// Root mean square of the log-space residuals.
    pub fit_residual: f64,
}

/// Site probabilities `|psi_i|^2`, normalized to unit sum.
fn probabilities(state: &[C64]) -> Result<Vec<f64>> {
    let mut p: Vec<f64> = state.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = p.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Domain("state vector is zero or not finite".into()));
    }
    if (total.sqrt() - 1.0).abs() > NORM_TOLERANCE {
        for x in &mut p {
            *x /= total;
        }
    }
    Ok(p)
}

/// Inverse participation ratio `sum |psi_i|^4`.
pub fn ipr(state: &[C64]) -> Result<f64> {
    Ok(probabilities(state)?.iter().map(|p| p * p).sum())
}

/// Mean IPR over all right eigenvectors, summed in state order.
pub fn mipr(spectrum: &Spectrum) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(Error::Domain("empty spectrum".into()));
    }
    let mut total = 0.0;
    for v in &spectrum.right_vectors {
        total += ipr(v)?;
    }
    Ok(total / spectrum.len() as f64)
}

/// `|<L|R>|` with both vectors normalized.
pub fn phase_rigidity(left: &[C64], right: &[C64]) -> Result<f64> {
    let (nl, nr) = (norm2(left), norm2(right));
    if !(nl > 0.0 && nr > 0.0) {
        return Err(Error::Domain("phase rigidity of a zero vector".into()));
    }
    Ok(inner(left, right).norm() / (nl * nr))
}

/// Rigidity of a complex-symmetric eigenvector, `|sum psi_i^2| / ||psi||^2`.
pub fn symmetric_rigidity(right: &[C64]) -> Result<f64> {
    let n2: f64 = right.iter().map(|z| z.norm_sqr()).sum();
    if !(n2 > 0.0) {
        return Err(Error::Domain("phase rigidity of a zero vector".into()));
    }
    Ok(right.iter().map(|z| z * z).sum::<C64>().norm() / n2)
}

/// Sublattice imbalance `|P_A - P_B|`.
pub fn sigma_z_abs(state: &[C64], parity: SublatticeParity) -> Result<f64> {
    let p = probabilities(state)?;
    let (mut odd, mut even) = (0.0, 0.0);
    for (i, x) in p.iter().enumerate() {
        // index 0 is site 1
        if i % 2 == 0 {
            odd += x;
        } else {
            even += x;
        }
    }
    let diff = match parity {
        SublatticeParity::OddSitesA => odd - even,
        SublatticeParity::EvenSitesA => even - odd,
    };
    Ok(diff.abs())
}

/// Standard deviation of the site position `1..=N` under `|psi_i|^2`.
pub fn localization_length(state: &[C64]) -> Result<f64> {
    let p = probabilities(state)?;
    let total: f64 = p.iter().sum();
    let mean = p.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).sum::<f64>() / total;
    let var = p
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let d = (i + 1) as f64 - mean;
            d * d * x
        })
        .sum::<f64>()
        / total;
    Ok(var.max(0.0).sqrt())
}

/// Fits `ipr ~ c * N^(-d2)` by ordinary least squares in log-log space.
pub fn fractal_dimension(sizes: &[usize], iprs: &[f64]) -> Result<ScalingFit> {
    if sizes.len() != iprs.len() {
        return Err(Error::Parameter(format!(
            "{} sizes but {} IPR values",
            sizes.len(),
            iprs.len()
        )));
    }
    if sizes.len() < MIN_FIT_POINTS {
        return Err(Error::Parameter(format!(
            "scaling fit needs at least {MIN_FIT_POINTS} sizes, got {}",
            sizes.len()
        )));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(Error::Parameter(
            "sizes must be positive and strictly increasing".into(),
        ));
    }
    if iprs.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Parameter("IPR values must be positive and finite".into()));
    }
    let x: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = iprs.iter().map(|v| v.ln()).collect();
    let m = x.len() as f64;
    let xm = x.iter().sum::<f64>() / m;
    let ym = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    Ok(ScalingFit {
        sizes: sizes.to_vec(),
        iprs: iprs.to_vec(),
        d2: -slope,
        intercept,
        fit_residual: (ss / m).sqrt(),
    })
}

/// Index of the largest or smallest value; ties go to the lowest index.
pub fn select_extreme(iprs: &[f64], mode: ExtremeMode) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, &v) in iprs.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => match mode {
                ExtremeMode::MaxIpr => v > iprs[b],
                ExtremeMode::MinIpr => v < iprs[b],
            },
        };
        if better {
            best = Some(k);
        }
    }
    best
}

/// State index of the most (or least) localized right eigenvector.
pub fn select_extreme_state(spectrum: &Spectrum, mode: ExtremeMode) -> Result<usize> {
    let iprs = spectrum
        .right_vectors
        .iter()
        .map(|v| ipr(v))
        .collect::<Result<Vec<_>>>()?;
    select_extreme(&iprs, mode).ok_or_else(|| Error::Domain("empty spectrum".into()))
}

/// Diagnostics for every state of a spectrum. `parity` enables the
/// sublattice order parameter.
pub fn observables(spectrum: &Spectrum, parity: Option<SublatticeParity>) -> Result<Vec<ObservableRecord>> {
    (0..spectrum.len())
        .map(|k| {
            let right = &spectrum.right_vectors[k];
            Ok(ObservableRecord {
                state_index: k,
                eigenvalue: spectrum.eigenvalues[k],
                ipr: ipr(right)?,
                rigidity: phase_rigidity(&spectrum.left_vectors[k], right)?,
                sigma_z_abs: parity.map(|p| sigma_z_abs(right, p)).transpose()?,
                loc_length: localization_length(right)?,
                ep_flag: spectrum.ep_flags[k],
            })
        })
        .collect()
}
