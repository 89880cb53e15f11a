use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use quasichain::exp::config::{parse_angle, Angle, Defaults, ExperimentConfig, OneOrMany};
use quasichain::exp::{self, Format, Metadata, Quantity, Table};
use quasichain::ham::Hopping;
use quasichain::lattice::{Beta, Boundary};
use quasichain::obs::ExtremeMode;
use quasichain::toy::{self, ToyParams};
use quasichain::{Error, Result};

/// Spectra and localization diagnostics of non-Hermitian tight-binding chains.
#[derive(Parser)]
#[command(name = "quasichain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-state table of a single chain: energy, IPR, rigidity, localization length.
    Spectrum(Common),
    /// MIPR and extreme-state IPRs over a (size, T, theta) grid.
    Sweep(Common),
    /// log(IPR), D2 or rigidity of an extreme state over a (T, theta) grid.
    Landscape {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_enum)]
        quantity: Option<QuantityArg>,
    },
    /// Two-band alternating chain: order parameter and rigidity over (k, T).
    Toy {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        v_a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        v_b: Option<f64>,
        /// Momentum points on [0, pi/a].
        #[arg(long)]
        k_points: Option<usize>,
        /// Hopping points on [0, v_b - v_a], used when --t is absent.
        #[arg(long)]
        t_points: Option<usize>,
    },
    /// Fractal dimension of an extreme state from the IPR at several sizes.
    D2 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Replica-averaged MIPR of uniformly disordered chains.
    Disorder(Common),
    /// Localization length of the most localized state versus theta.
    Loclen {
        #[command(flatten)]
        common: Common,
        /// Also write the |psi|^2 profiles of the selected states here.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// aaf, fibonacci, alternating or random.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    /// AAF deformation; a number or "inf".
    #[arg(long)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<f64>,
    #[arg(long)]
    halfwidth: Option<f64>,
    /// Hopping magnitudes, comma separated.
    #[arg(long = "t", value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Phases in radians or multiples of pi ("pi/2", "17pi/36"), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<String>>,
    /// Evenly spaced phases on [0, pi/2].
    #[arg(long)]
    theta_points: Option<usize>,
    /// Chain sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
    /// Base seed for disorder models; replica r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Output file; CSV unless it ends in .json or --format says otherwise.
    /// Without it, CSV goes to standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    MaxIpr,
    MinIpr,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    LogIpr,
    D2,
    Rigidity,
}

impl From<ModeArg> for ExtremeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::MaxIpr => ExtremeMode::MaxIpr,
            ModeArg::MinIpr => ExtremeMode::MinIpr,
        }
    }
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::LogIpr => Quantity::LogIpr,
            QuantityArg::D2 => Quantity::D2,
            QuantityArg::Rigidity => Quantity::Rigidity,
        }
    }
}

impl Common {
    /// The configuration file (if any) with flags applied on top.
    fn config(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let beta = self
            .beta
            .as_deref()
            .map(Beta::parse)
            .transpose()
            .map_err(|e| Error::Config(e.to_string()))?;
        let theta = match &self.theta {
            Some(list) => {
                let angles = list
                    .iter()
                    .map(|s| parse_angle(s).map(Angle::Radians))
                    .collect::<Result<Vec<_>>>()?;
                Some(OneOrMany::Many(angles))
            }
            None => None,
        };
        let overrides = ExperimentConfig {
            model: self.model.clone(),
            lambda: self.lambda,
            v: self.v,
            beta,
            phi: self.phi,
            center: self.center,
            halfwidth: self.halfwidth,
            t: self.t.clone().map(OneOrMany::Many),
            theta,
            theta_points: self.theta_points,
            sizes: self.sizes.clone().map(OneOrMany::Many),
            boundary: self.boundary.map(|b| match b {
                BoundaryArg::Open => Boundary::Open,
                BoundaryArg::Periodic => Boundary::Periodic,
            }),
            seed: self.seed,
            replicas: self.replicas,
            output: self.output.clone(),
            format: self.format.map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            }),
            ..Default::default()
        };
        Ok(base.merge(overrides))
    }
}

/// Writes a table to the configured output, or as CSV to standard output.
fn write(table: &Table, config: &ExperimentConfig, command: &str, grid: Value) -> Result<()> {
    match &config.output {
        Some(path) => write_to(table, path, config.format(path), config, command, grid),
        None => {
            let csv = table.to_csv_string()?;
            std::io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn write_to(
    table: &Table,
    path: &Path,
    format: Format,
    config: &ExperimentConfig,
    command: &str,
    grid: Value,
) -> Result<()> {
    let seeds = grid
        .get("seeds")
        .and_then(|s| serde_json::from_value(s.clone()).ok())
        .unwrap_or_default();
    let meta = Metadata::new(command, config.to_json_value(), seeds).with_grid(grid);
    exp::emit(table, path, format, &meta)
}

fn json(grid: &exp::SweepGrid) -> Value {
    serde_json::to_value(grid).expect("grid serializes")
}

fn single<T: Copy>(values: &[T], what: &str) -> Result<T> {
    match values {
        [x] => Ok(*x),
        _ => Err(Error::Config(format!(
            "this command takes a single {what}, got {}",
            values.len()
        ))),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum(common) => {
            let config = common.config()?;
            let defaults = Defaults {
                t_units: Some(vec![1.0]),
                sizes: vec![987],
                theta: vec![std::f64::consts::FRAC_PI_2],
                ..Defaults::new("fibonacci")
            };
            let grid = config.grid(&defaults)?;
            let size = single(&grid.sizes, "size")?;
            let t = single(&grid.t_values, "hopping magnitude")?;
            let theta = single(&grid.theta_values, "phase")?;
            let seed = grid.seeds.first().copied();
            let chain = grid.model.chain(size, seed, grid.boundary)?;
            let plane = exp::run_complex_plane(&chain, &Hopping::new(t, theta), grid.model.parity())?;
            write(&exp::states_table(&plane)?, &config, "spectrum", json(&grid))
        }
        Command::Sweep(common) => {
            let config = common.config()?;
            let grid = config.grid(&Defaults::new("fibonacci"))?;
            let result = exp::run_theta_sweep(&grid)?;
            write(&exp::rows_table(&result.rows)?, &config, "sweep", json(&grid))
        }
        Command::Landscape { common, mode, quantity } => {
            let mut config = common.config()?;
            config.mode = mode.map(Into::into).or(config.mode);
            config.quantity = quantity.map(Into::into).or(config.quantity);
            let mode = config.mode.unwrap_or(ExtremeMode::MaxIpr);
            let quantity = config.quantity.unwrap_or(Quantity::LogIpr);
            let mut defaults = Defaults::new("fibonacci");
            if quantity != Quantity::D2 {
                defaults.sizes = vec![987];
            }
            let grid = config.grid(&defaults)?;
            let cells = exp::run_landscape(&grid, mode, quantity)?;
            write(
                &exp::landscape_table(&cells, quantity)?,
                &config,
                "landscape",
                json(&grid),
            )
        }
        Command::Toy {
            common,
            v_a,
            v_b,
            k_points,
            t_points,
        } => {
            let mut config = common.config()?;
            config.v_a = v_a.or(config.v_a);
            config.v_b = v_b.or(config.v_b);
            config.k_points = k_points.or(config.k_points);
            config.t_points = t_points.or(config.t_points);
            let theta = match &config.theta {
                Some(t) => single(
                    &t.to_vec().iter().map(Angle::radians).collect::<Result<Vec<_>>>()?,
                    "phase",
                )?,
                None => std::f64::consts::FRAC_PI_2,
            };
            let params = ToyParams::new(
                config.v_a.unwrap_or(-1.0),
                config.v_b.unwrap_or(1.0),
                Hopping::new(1.0, theta),
            )
            .map_err(|e| Error::Config(e.to_string()))?;
            let ks = toy::linspace(
                0.0,
                std::f64::consts::PI / params.spacing_a,
                config.k_points.unwrap_or(201),
            );
            let ts = match &config.t {
                Some(t) => t.to_vec(),
                None => toy::linspace(0.0, params.delta_v(), config.t_points.unwrap_or(201)),
            };
            let rows = toy::order_parameter_grid(&params, &ks, &ts)?;
            let grid = serde_json::json!({ "params": format!("{params:?}"), "k": ks, "T": ts });
            write(&exp::toy_table(&rows)?, &config, "toy", grid)
        }
        Command::D2 { common, mode } => {
            let mut config = common.config()?;
            config.mode = mode.map(Into::into).or(config.mode);
            let mode = config.mode.unwrap_or(ExtremeMode::MaxIpr);
            let defaults = Defaults {
                t_units: Some(vec![13.0]),
                theta: vec![0.0],
                ..Defaults::new("fibonacci")
            };
            let grid = config.grid(&defaults)?;
            single(&grid.t_values, "hopping magnitude")?;
            single(&grid.theta_values, "phase")?;
            let cells = exp::run_landscape(&grid, mode, Quantity::D2)?;
            let cell = &cells[0];
            eprintln!(
                "D2 = {:.6} (rms residual {:.3e}) for {} at T = {}, theta = {}",
                cell.d2.unwrap_or(f64::NAN),
                cell.fit_residual.unwrap_or(f64::NAN),
                mode.as_str(),
                cell.t,
                cell.theta
            );
            write(&exp::scaling_table(cell, &grid.sizes)?, &config, "d2", json(&grid))
        }
        Command::Disorder(common) => {
            let config = common.config()?;
            let defaults = Defaults {
                sizes: vec![233],
                replicas: 20,
                ..Defaults::new("random")
            };
            let grid = config.grid(&defaults)?;
            let result = exp::run_theta_sweep(&grid)?;
            write(&exp::summary_table(&result.summary)?, &config, "disorder", json(&grid))
        }
        Command::Loclen { common, profile } => {
            let mut config = common.config()?;
            config.profile = profile.or(config.profile);
            let defaults = Defaults {
                t_units: Some(vec![3.0]),
                sizes: vec![987],
                ..Defaults::new("fibonacci")
            };
            let grid = config.grid(&defaults)?;
            let rows = exp::run_localization_length(&grid, config.profile.is_some())?;
            if let Some(path) = &config.profile {
                let table = exp::profile_table(&rows)?;
                write_to(
                    &table,
                    path,
                    config.format(path),
                    &config,
                    "loclen-profile",
                    json(&grid),
                )?;
            }
            write(&exp::loc_length_table(&rows)?, &config, "loclen", json(&grid))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
