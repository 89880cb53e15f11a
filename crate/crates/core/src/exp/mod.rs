//! Experiment engine: parameter grids, task evaluation, replica averaging,
//! scaling landscapes and table output.
//!
//! Tasks are independent and run on the rayon thread pool; results are
//! collected in task order, so output does not depend on the worker count.

pub mod config;
pub mod table;

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::C64;
use crate::eig::{eig, Spectrum};
use crate::ham::{build, HamiltonianMatrix, Hopping};
use crate::lattice::{
    fibonacci_length, AafParams, AlternatingParams, Boundary, ChainSpec, FibonacciWordParams, Model,
    RandomDisorderParams, FIBONACCI_LADDER,
};
use crate::obs::{
    fractal_dimension, ipr, localization_length, mipr, phase_rigidity, select_extreme, sigma_z_abs, ExtremeMode,
    SublatticeParity,
};
use crate::toy::{linspace, ToyGridRow};
use crate::{Error, Result};

pub use table::{emit, Cell, Column, ColumnKind, Format, Metadata, Table};

/// Number of points in the default `theta` grid on `[0, pi/2]`.
pub const DEFAULT_THETA_POINTS: usize = 25;

/// Default `theta` grid: 25 evenly spaced points on `[0, pi/2]`.
pub fn default_theta_grid() -> Vec<f64> {
    linspace(0.0, FRAC_PI_2, DEFAULT_THETA_POINTS)
}

/// A chain family without a size, instantiated once per task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelTemplate {
    Aaf(AafParams),
    /// Fibonacci word chain; the word is the shortest one covering the size.
    Fibonacci {
        v_a: f64,
        v_b: f64,
    },
    Alternating(AlternatingParams),
    /// Uniform disorder; each replica draws its own seed.
    Random {
        center: f64,
        halfwidth: f64,
    },
}

impl ModelTemplate {
    pub fn name(&self) -> &'static str {
        match self {
            ModelTemplate::Aaf(_) => "aaf",
            ModelTemplate::Fibonacci { .. } => "fibonacci",
            ModelTemplate::Alternating(_) => "alternating",
            ModelTemplate::Random { .. } => "random",
        }
    }

    pub fn needs_seed(&self) -> bool {
        matches!(self, ModelTemplate::Random { .. })
    }

    /// Sublattice assignment for models with a two-site unit cell.
    pub fn parity(&self) -> Option<SublatticeParity> {
        match self {
            ModelTemplate::Alternating(_) => Some(SublatticeParity::OddSitesA),
            _ => None,
        }
    }

    pub fn chain(&self, n_sites: usize, seed: Option<u64>, boundary: Boundary) -> Result<ChainSpec> {
        let model = match *self {
            ModelTemplate::Aaf(p) => Model::Aaf(p),
            ModelTemplate::Fibonacci { v_a, v_b } => {
                let order = (1..)
                    .find(|&o| fibonacci_length(o).is_none_or(|l| l >= n_sites))
                    .expect("some order covers any size");
                Model::Fibonacci(FibonacciWordParams { order, v_a, v_b })
            }
            ModelTemplate::Alternating(p) => Model::Alternating(p),
            ModelTemplate::Random { center, halfwidth } => {
                let seed = seed.ok_or_else(|| Error::Config("random disorder needs a seed".into()))?;
                Model::Random(RandomDisorderParams {
                    center,
                    halfwidth,
                    seed,
                })
            }
        };
        Ok(ChainSpec::new(model, n_sites).with_boundary(boundary))
    }
}

/// Cartesian grid of tasks over sizes, hopping magnitudes, phases and
/// disorder replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub theta_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub sizes: Vec<usize>,
    pub model: ModelTemplate,
    #[serde(default)]
    pub boundary: Boundary,
    /// One seed per replica; ignored by deterministic models.
    #[serde(default)]
    pub seeds: Vec<u64>,
}

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Task {
    pub index: usize,
    pub size: usize,
    pub t: f64,
    pub theta: f64,
    pub replica: usize,
    pub seed: Option<u64>,
}

impl Task {
    fn label(&self) -> String {
        let mut s = format!("#{} N={} T={} theta={}", self.index, self.size, self.t, self.theta);
        if let Some(seed) = self.seed {
            s.push_str(&format!(" replica={} seed={seed}", self.replica));
        }
        s
    }
}

impl SweepGrid {
    pub fn new(model: ModelTemplate, sizes: Vec<usize>, t_values: Vec<f64>, theta_values: Vec<f64>) -> Self {
        SweepGrid {
            theta_values,
            t_values,
            sizes,
            model,
            boundary: Boundary::Open,
            seeds: Vec::new(),
        }
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn replicas(&self) -> usize {
        if self.model.needs_seed() {
            self.seeds.len()
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_values.is_empty() || self.t_values.is_empty() || self.sizes.is_empty() {
            return Err(Error::Config(
                "grid needs at least one size, hopping magnitude and phase".into(),
            ));
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("chain size {n} is below 2")));
        }
        if self.model.needs_seed() && self.seeds.is_empty() {
            return Err(Error::Config("disorder models need at least one seed".into()));
        }
        for &t in &self.t_values {
            Hopping::new(t, 0.0).validate()?;
        }
        for &theta in &self.theta_values {
            Hopping::new(1.0, theta).validate()?;
        }
        Ok(())
    }

    /// Tasks in `(size, T, theta, replica)` lexicographic order.
    pub fn tasks(&self) -> Vec<Task> {
        let mut out = Vec::new();
        for &size in &self.sizes {
            for &t in &self.t_values {
                for &theta in &self.theta_values {
                    for replica in 0..self.replicas() {
                        let seed = self.model.needs_seed().then(|| self.seeds[replica]);
                        out.push(Task {
                            index: out.len(),
                            size,
                            t,
                            theta,
                            replica,
                            seed,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Builds and diagonalizes one chain.
pub fn solve(chain: &ChainSpec, hopping: &Hopping) -> Result<(HamiltonianMatrix, Spectrum)> {
    let h = build(chain, hopping)?;
    let s = eig(&h.entries)?;
    Ok((h, s))
}

/// Observables of one task.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub size: usize,
    pub t: f64,
    pub theta: f64,
    pub replica: usize,
    pub seed: Option<u64>,
    pub mipr: f64,
    pub max_ipr: f64,
    pub max_ipr_index: usize,
    pub min_ipr: f64,
    pub min_ipr_index: usize,
    pub rigidity_max: f64,
    pub rigidity_min: f64,
    pub ep_flag_max: bool,
    pub ep_flag_min: bool,
    pub loc_length_max: f64,
    pub energy_max: C64,
    pub energy_min: C64,
    pub matrix_norm: f64,
    pub max_residual: f64,
    pub qr_sweeps: usize,
    /// Seconds spent on the task. Not written to output files, which must
    /// be reproducible byte for byte.
    pub wall_time: f64,
}

fn evaluate_task(grid: &SweepGrid, task: &Task) -> Result<ResultRow> {
    let start = Instant::now();
    let chain = grid.model.chain(task.size, task.seed, grid.boundary)?;
    let (_, s) = solve(&chain, &Hopping::new(task.t, task.theta))?;
    let iprs = s.right_vectors.iter().map(|v| ipr(v)).collect::<Result<Vec<_>>>()?;
    let hi = select_extreme(&iprs, ExtremeMode::MaxIpr).expect("nonempty spectrum");
    let lo = select_extreme(&iprs, ExtremeMode::MinIpr).expect("nonempty spectrum");
    Ok(ResultRow {
        size: task.size,
        t: task.t,
        theta: task.theta,
        replica: task.replica,
        seed: task.seed,
        mipr: mipr(&s)?,
        max_ipr: iprs[hi],
        max_ipr_index: hi,
        min_ipr: iprs[lo],
        min_ipr_index: lo,
        rigidity_max: phase_rigidity(&s.left_vectors[hi], &s.right_vectors[hi])?,
        rigidity_min: phase_rigidity(&s.left_vectors[lo], &s.right_vectors[lo])?,
        ep_flag_max: s.ep_flags[hi],
        ep_flag_min: s.ep_flags[lo],
        loc_length_max: localization_length(&s.right_vectors[hi])?,
        energy_max: s.eigenvalues[hi],
        energy_min: s.eigenvalues[lo],
        matrix_norm: s.matrix_norm,
        max_residual: s.max_residual(),
        qr_sweeps: s.qr_sweeps,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Evaluates every task of the grid, in task order.
pub fn evaluate(grid: &SweepGrid) -> Result<Vec<ResultRow>> {
    grid.validate()?;
    grid.tasks()
        .par_iter()
        .map(|task| {
            evaluate_task(grid, task).map_err(|e| Error::Task {
                task: task.label(),
                source: Box::new(e),
            })
        })
        .collect()
}

/// Replica statistics of one `(size, T, theta)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub size: usize,
    pub t: f64,
    pub theta: f64,
    pub replicas: usize,
    pub mipr_mean: f64,
    /// Standard error of the mean; absent for a single replica.
    pub mipr_stderr: Option<f64>,
    pub max_ipr_mean: f64,
    pub min_ipr_mean: f64,
}

/// Mean and standard error of `values`.
pub fn mean_and_stderr(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

/// Groups consecutive replica rows of the same grid point.
pub fn summarize(rows: &[ResultRow], replicas: usize) -> Vec<SummaryRow> {
    rows.chunks(replicas.max(1))
        .map(|chunk| {
            let pick = |f: fn(&ResultRow) -> f64| chunk.iter().map(f).collect::<Vec<_>>();
            let (mipr_mean, mipr_stderr) = mean_and_stderr(&pick(|r| r.mipr));
            SummaryRow {
                size: chunk[0].size,
                t: chunk[0].t,
                theta: chunk[0].theta,
                replicas: chunk.len(),
                mipr_mean,
                mipr_stderr,
                max_ipr_mean: mean_and_stderr(&pick(|r| r.max_ipr)).0,
                min_ipr_mean: mean_and_stderr(&pick(|r| r.min_ipr)).0,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

/// MIPR and extreme-state IPRs over the grid, with replica averages.
pub fn run_theta_sweep(grid: &SweepGrid) -> Result<SweepResult> {
    let rows = evaluate(grid)?;
    let summary = summarize(&rows, grid.replicas());
    Ok(SweepResult { rows, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Quantity {
    LogIpr,
    D2,
    Rigidity,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::LogIpr => "LOG_IPR",
            Quantity::D2 => "D2",
            Quantity::Rigidity => "RIGIDITY",
        }
    }
}

/// One `(T, theta)` cell of a landscape.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeCell {
    pub t: f64,
    pub theta: f64,
    pub mode: ExtremeMode,
    /// Selected state's IPR at every size, in size order.
    pub iprs: Vec<f64>,
    pub largest_size: usize,
    /// `log10` of the IPR at the largest size.
    pub log_ipr: f64,
    /// Phase rigidity at the largest size.
    pub rigidity: f64,
    pub ep_flag: bool,
    pub d2: Option<f64>,
    pub fit_residual: Option<f64>,
}

impl LandscapeCell {
    pub fn value(&self, quantity: Quantity) -> Option<f64> {
        match quantity {
            Quantity::LogIpr => Some(self.log_ipr),
            Quantity::D2 => self.d2,
            Quantity::Rigidity => Some(self.rigidity),
        }
    }
}

/// Assembles landscape cells from evaluated rows. The extreme state is
/// selected independently at every size.
pub fn landscape_from_rows(grid: &SweepGrid, rows: &[ResultRow], mode: ExtremeMode) -> Result<Vec<LandscapeCell>> {
    if grid.replicas() != 1 {
        return Err(Error::Config("landscapes take a single disorder replica".into()));
    }
    let sizes = &grid.sizes;
    let per_size = grid.t_values.len() * grid.theta_values.len();
    if rows.len() != per_size * sizes.len() {
        return Err(Error::Parameter("rows do not match the grid".into()));
    }
    let largest = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(_, n)| n)
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&i| sizes[i]);
    let fit_possible = sizes.len() >= crate::obs::MIN_FIT_POINTS;
    let mut cells = Vec::with_capacity(per_size);
    for cell in 0..per_size {
        let at = |i: usize| &rows[i * per_size + cell];
        let pick = |r: &ResultRow| match mode {
            ExtremeMode::MaxIpr => (r.max_ipr, r.rigidity_max, r.ep_flag_max),
            ExtremeMode::MinIpr => (r.min_ipr, r.rigidity_min, r.ep_flag_min),
        };
        let iprs: Vec<f64> = order.iter().map(|&i| pick(at(i)).0).collect();
        let (top_ipr, rigidity, ep_flag) = pick(at(largest));
        let fit = if fit_possible {
            let sorted: Vec<usize> = order.iter().map(|&i| sizes[i]).collect();
            Some(fractal_dimension(&sorted, &iprs)?)
        } else {
            None
        };
        cells.push(LandscapeCell {
            t: at(0).t,
            theta: at(0).theta,
            mode,
            iprs,
            largest_size: sizes[largest],
            log_ipr: top_ipr.log10(),
            rigidity,
            ep_flag,
            d2: fit.as_ref().map(|f| f.d2),
            fit_residual: fit.as_ref().map(|f| f.fit_residual),
        });
    }
    Ok(cells)
}

/// Landscape over `(T, theta)` of the selected extreme state.
pub fn run_landscape(grid: &SweepGrid, mode: ExtremeMode, quantity: Quantity) -> Result<Vec<LandscapeCell>> {
    if quantity == Quantity::D2 && grid.sizes.len() < crate::obs::MIN_FIT_POINTS {
        return Err(Error::Config(format!(
            "D2 landscapes need at least {} sizes, got {}",
            crate::obs::MIN_FIT_POINTS,
            grid.sizes.len()
        )));
    }
    let rows = evaluate(grid)?;
    landscape_from_rows(grid, &rows, mode)
}

/// Per-state diagnostics of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StateRow {
    pub index: usize,
    pub energy: C64,
    pub ipr: f64,
    pub rigidity: f64,
    pub sigma_z_abs: Option<f64>,
    pub loc_length: f64,
    pub ep_flag: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPlane {
    pub matrix_norm: f64,
    pub states: Vec<StateRow>,
}

/// One row per eigenstate: energy and localization diagnostics.
pub fn run_complex_plane(
    chain: &ChainSpec,
    hopping: &Hopping,
    parity: Option<SublatticeParity>,
) -> Result<ComplexPlane> {
    let (_, s) = solve(chain, hopping)?;
    let states = (0..s.len())
        .map(|k| {
            let right = &s.right_vectors[k];
            Ok(StateRow {
                index: k,
                energy: s.eigenvalues[k],
                ipr: ipr(right)?,
                rigidity: phase_rigidity(&s.left_vectors[k], right)?,
                sigma_z_abs: parity.map(|p| sigma_z_abs(right, p)).transpose()?,
                loc_length: localization_length(right)?,
                ep_flag: s.ep_flags[k],
                residual: s.residuals[k],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexPlane {
        matrix_norm: s.matrix_norm,
        states,
    })
}

/// Localization length of the most localized state at one `(T, theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocLengthRow {
    pub size: usize,
    pub t: f64,
    pub theta: f64,
    pub state_index: usize,
    pub ipr: f64,
    pub loc_length: f64,
    pub energy: C64,
    /// `|psi_i|^2` of the state, when profiles were requested.
    pub profile: Option<Vec<f64>>,
}

/// Localization length of the maximum-IPR state over a `(T, theta)` grid at
/// a single size.
pub fn run_localization_length(grid: &SweepGrid, with_profiles: bool) -> Result<Vec<LocLengthRow>> {
    grid.validate()?;
    grid.tasks()
        .par_iter()
        .map(|task| {
            let run = || -> Result<LocLengthRow> {
                let chain = grid.model.chain(task.size, task.seed, grid.boundary)?;
                let (_, s) = solve(&chain, &Hopping::new(task.t, task.theta))?;
                let iprs = s.right_vectors.iter().map(|v| ipr(v)).collect::<Result<Vec<_>>>()?;
                let k = select_extreme(&iprs, ExtremeMode::MaxIpr).expect("nonempty spectrum");
                let v = &s.right_vectors[k];
                Ok(LocLengthRow {
                    size: task.size,
                    t: task.t,
                    theta: task.theta,
                    state_index: k,
                    ipr: iprs[k],
                    loc_length: localization_length(v)?,
                    energy: s.eigenvalues[k],
                    profile: with_profiles.then(|| {
                        let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                        v.iter().map(|z| z.norm_sqr() / total).collect()
                    }),
                })
            };
            run().map_err(|e| Error::Task {
                task: task.label(),
                source: Box::new(e),
            })
        })
        .collect()
}

/// Decay rate of a profile: minus the least-squares slope of `ln p_i` against
/// the distance from the peak, over sites with `p_i > floor`.
pub fn profile_decay_rate(profile: &[f64], floor: f64) -> Option<f64> {
    let peak = profile.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?.0;
    let pts: Vec<(f64, f64)> = profile
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p > floor)
        .map(|(i, &p)| ((i as f64 - peak as f64).abs(), p.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Default scaling ladder.
pub fn default_sizes() -> Vec<usize> {
    FIBONACCI_LADDER.to_vec()
}

fn push_all(table: &mut Table, rows: impl IntoIterator<Item = Vec<Cell>>) -> Result<()> {
    for r in rows {
        table.push(r)?;
    }
    Ok(())
}

use ColumnKind::{Float, Int, Text};

pub fn rows_table(rows: &[ResultRow]) -> Result<Table> {
    let mut t = Table::new(&[
        ("size", Int),
        ("T", Float),
        ("theta", Float),
        ("replica", Int),
        ("seed", Int),
        ("mipr", Float),
        ("max_ipr", Float),
        ("max_ipr_index", Int),
        ("min_ipr", Float),
        ("min_ipr_index", Int),
        ("rigidity_max", Float),
        ("rigidity_min", Float),
        ("ep_flag_max", Int),
        ("ep_flag_min", Int),
        ("loc_length_max", Float),
        ("re_e_max", Float),
        ("im_e_max", Float),
        ("matrix_norm", Float),
        ("max_residual", Float),
        ("qr_sweeps", Int),
    ]);
    push_all(
        &mut t,
        rows.iter().map(|r| {
            vec![
                r.size.into(),
                r.t.into(),
                r.theta.into(),
                r.replica.into(),
                r.seed.into(),
                r.mipr.into(),
                r.max_ipr.into(),
                r.max_ipr_index.into(),
                r.min_ipr.into(),
                r.min_ipr_index.into(),
                r.rigidity_max.into(),
                r.rigidity_min.into(),
                r.ep_flag_max.into(),
                r.ep_flag_min.into(),
                r.loc_length_max.into(),
                r.energy_max.re.into(),
                r.energy_max.im.into(),
                r.matrix_norm.into(),
                r.max_residual.into(),
                r.qr_sweeps.into(),
            ]
        }),
    )?;
    Ok(t)
}

pub fn summary_table(rows: &[SummaryRow]) -> Result<Table> {
    let mut t = Table::new(&[
        ("size", Int),
        ("T", Float),
        ("theta", Float),
        ("replicas", Int),
        ("mipr_mean", Float),
        ("mipr_stderr", Float),
        ("max_ipr_mean", Float),
        ("min_ipr_mean", Float),
    ]);
    push_all(
        &mut t,
        rows.iter().map(|r| {
            vec![
                r.size.into(),
                r.t.into(),
                r.theta.into(),
                r.replicas.into(),
                r.mipr_mean.into(),
                r.mipr_stderr.into(),
                r.max_ipr_mean.into(),
                r.min_ipr_mean.into(),
            ]
        }),
    )?;
    Ok(t)
}

pub fn landscape_table(cells: &[LandscapeCell], quantity: Quantity) -> Result<Table> {
    let mut t = Table::new(&[
        ("T", Float),
        ("theta", Float),
        ("mode", Text),
        ("quantity", Text),
        ("value", Float),
        ("largest_size", Int),
        ("log_ipr", Float),
        ("rigidity", Float),
        ("ep_flag", Int),
        ("d2", Float),
        ("fit_residual", Float),
    ]);
    push_all(
        &mut t,
        cells.iter().map(|c| {
            vec![
                c.t.into(),
                c.theta.into(),
                c.mode.as_str().into(),
                quantity.as_str().into(),
                c.value(quantity).into(),
                c.largest_size.into(),
                c.log_ipr.into(),
                c.rigidity.into(),
                c.ep_flag.into(),
                c.d2.into(),
                c.fit_residual.into(),
            ]
        }),
    )?;
    Ok(t)
}

pub fn states_table(plane: &ComplexPlane) -> Result<Table> {
    let mut t = Table::new(&[
        ("index", Int),
        ("re_e", Float),
        ("im_e", Float),
        ("ipr", Float),
        ("log_ipr", Float),
        ("rigidity", Float),
        ("sigma_z_abs", Float),
        ("loc_length", Float),
        ("ep_flag", Int),
        ("residual", Float),
    ]);
    push_all(
        &mut t,
        plane.states.iter().map(|s| {
            vec![
                s.index.into(),
                s.energy.re.into(),
                s.energy.im.into(),
                s.ipr.into(),
                s.ipr.log10().into(),
                s.rigidity.into(),
                s.sigma_z_abs.into(),
                s.loc_length.into(),
                s.ep_flag.into(),
                s.residual.into(),
            ]
        }),
    )?;
    Ok(t)
}

/// Per-size IPRs of a scaling fit, with the fitted exponent repeated on
/// every row.
pub fn scaling_table(cell: &LandscapeCell, sizes: &[usize]) -> Result<Table> {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    let mut t = Table::new(&[
        ("size", Int),
        ("T", Float),
        ("theta", Float),
        ("mode", Text),
        ("ipr", Float),
        ("d2", Float),
        ("fit_residual", Float),
    ]);
    push_all(
        &mut t,
        sorted.iter().zip(&cell.iprs).map(|(&n, &ipr)| {
            vec![
                n.into(),
                cell.t.into(),
                cell.theta.into(),
                cell.mode.as_str().into(),
                ipr.into(),
                cell.d2.into(),
                cell.fit_residual.into(),
            ]
        }),
    )?;
    Ok(t)
}

pub fn loc_length_table(rows: &[LocLengthRow]) -> Result<Table> {
    let mut t = Table::new(&[
        ("size", Int),
        ("T", Float),
        ("theta", Float),
        ("state_index", Int),
        ("ipr", Float),
        ("loc_length", Float),
        ("re_e", Float),
        ("im_e", Float),
    ]);
    push_all(
        &mut t,
        rows.iter().map(|r| {
            vec![
                r.size.into(),
                r.t.into(),
                r.theta.into(),
                r.state_index.into(),
                r.ipr.into(),
                r.loc_length.into(),
                r.energy.re.into(),
                r.energy.im.into(),
            ]
        }),
    )?;
    Ok(t)
}

/// Long-format profile dump: one row per `(T, theta, site)`.
pub fn profile_table(rows: &[LocLengthRow]) -> Result<Table> {
    let mut t = Table::new(&[
        ("T", Float),
        ("theta", Float),
        ("site", Int),
        ("probability", Float),
        ("log10_probability", Float),
    ]);
    for r in rows {
        for (i, &p) in r.profile.iter().flatten().enumerate() {
            t.push(vec![
                r.t.into(),
                r.theta.into(),
                (i + 1).into(),
                p.into(),
                p.log10().into(),
            ])?;
        }
    }
    Ok(t)
}

pub fn toy_table(rows: &[ToyGridRow]) -> Result<Table> {
    let mut t = Table::new(&[
        ("k", Float),
        ("T", Float),
        ("branch", Text),
        ("re_e", Float),
        ("im_e", Float),
        ("sigma_z_abs", Float),
        ("rigidity", Float),
        ("region", Text),
    ]);
    push_all(
        &mut t,
        rows.iter().map(|r| {
            vec![
                r.k.into(),
                r.t.into(),
                r.branch.as_str().into(),
                r.energy.re.into(),
                r.energy.im.into(),
                r.sigma_z_abs.into(),
                r.rigidity.into(),
                r.region.as_str().into(),
            ]
        }),
    )?;
    Ok(t)
}
