//! JSON experiment configuration. Command line flags override individual
//! keys through [`ExperimentConfig::merge`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{default_sizes, default_theta_grid, ModelTemplate, Quantity, SweepGrid};
use crate::exp::table::Format;
use crate::lattice::{AafParams, AlternatingParams, Beta, Boundary, GOLDEN_RATIO};
use crate::obs::ExtremeMode;
use crate::toy::linspace;
use crate::{Error, Result};

/// A scalar or a list of scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// An angle in radians, written either as a number or as a multiple of pi
/// such as `"pi/2"` or `"17pi/36"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Text(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64> {
        match self {
            Angle::Radians(x) => Ok(*x),
            Angle::Text(s) => parse_angle(s),
        }
    }
}

/// Parses `1.2`, `pi`, `-pi/4`, `17pi/36`, `0.5*pi` or `3*pi/8`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot read angle {text:?}"));
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '*')
        .collect::<String>()
        .to_lowercase();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(x);
    }
    let (coef, rest) = s.split_once("pi").ok_or_else(bad)?;
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match rest {
        "" => 1.0,
        r => r
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .ok_or_else(bad)?,
    };
    Ok(coef * PI / denom)
}

/// Experiment configuration. Every key is optional; commands fill in their
/// own defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// AAF potential amplitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Fibonacci / disorder energy unit: `V_A = v`, `V_B = -v`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Beta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halfwidth: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<OneOrMany<Angle>>,
    /// Evenly spaced phases on `[0, pi/2]`, used when `theta` is absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<OneOrMany<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
    /// Explicit replica seeds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    /// Base seed; replica `r` uses `seed + r`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ExtremeMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_points: Option<usize>,
    /// Where to write state profiles (localization length runs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<PathBuf>,
}

/// Command-specific fallbacks for keys missing from the configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub model: &'static str,
    /// Hopping magnitudes in units of `lambda` (AAF) or `v` (other models).
    pub t_units: Option<Vec<f64>>,
    pub sizes: Vec<usize>,
    pub theta: Vec<f64>,
    pub replicas: usize,
}

impl Defaults {
    pub fn new(model: &'static str) -> Self {
        Defaults {
            model,
            t_units: None,
            sizes: default_sizes(),
            theta: default_theta_grid(),
            replicas: 1,
        }
    }
}

/// Hopping magnitudes (in model units) matching the published figures.
pub fn figure_t_units(model: &str) -> Vec<f64> {
    match model {
        "aaf" => vec![0.2, 2.0],
        "fibonacci" => vec![0.2, 1.0, 5.0, 13.0],
        "random" => vec![4.0],
        _ => vec![1.0],
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Keys set in `overrides` replace those in `self`.
    pub fn merge(self, overrides: ExperimentConfig) -> ExperimentConfig {
        macro_rules! pick {
            ($($f:ident),*) => {
                ExperimentConfig { $($f: overrides.$f.or(self.$f)),* }
            };
        }
        pick!(
            model,
            lambda,
            v,
            beta,
            phi,
            alpha,
            v_a,
            v_b,
            center,
            halfwidth,
            t,
            theta,
            theta_points,
            sizes,
            boundary,
            seeds,
            seed,
            replicas,
            output,
            format,
            mode,
            quantity,
            k_points,
            t_points,
            profile
        )
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("configuration serializes")
    }

    pub fn model_name<'a>(&'a self, defaults: &Defaults) -> &'a str {
        self.model.as_deref().unwrap_or(defaults.model)
    }

    /// Energy unit of the model: `lambda` for AAF, `v` otherwise.
    fn unit(&self, model: &str) -> f64 {
        if model == "aaf" {
            self.lambda.or(self.v).unwrap_or(1.0)
        } else {
            self.v.unwrap_or(1.0)
        }
    }

    pub fn model_template(&self, defaults: &Defaults) -> Result<ModelTemplate> {
        let name = self.model_name(defaults).to_lowercase();
        let unit = self.unit(&name);
        let template = match name.as_str() {
            "aaf" => {
                let p = AafParams {
                    lambda: unit,
                    beta: self.beta.unwrap_or(Beta::Finite(0.0)),
                    phi: self.phi.unwrap_or(0.0),
                    alpha: self.alpha.unwrap_or(GOLDEN_RATIO),
                };
                p.validate().map_err(|e| Error::Config(e.to_string()))?;
                ModelTemplate::Aaf(p)
            }
            "fibonacci" => ModelTemplate::Fibonacci {
                v_a: self.v_a.unwrap_or(unit),
                v_b: self.v_b.unwrap_or(-unit),
            },
            "alternating" => ModelTemplate::Alternating(AlternatingParams {
                v_a: self.v_a.unwrap_or(-unit),
                v_b: self.v_b.unwrap_or(unit),
                spacing_a: 1.0,
            }),
            "random" => {
                let halfwidth = self.halfwidth.unwrap_or(0.5 * unit);
                if !(halfwidth >= 0.0) {
                    return Err(Error::Config(format!(
                        "halfwidth must be non-negative, got {halfwidth}"
                    )));
                }
                ModelTemplate::Random {
                    center: self.center.unwrap_or(-unit),
                    halfwidth,
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown model {other:?}; expected aaf, fibonacci, alternating or random"
                )))
            }
        };
        Ok(template)
    }

    pub fn t_values(&self, defaults: &Defaults) -> Vec<f64> {
        if let Some(t) = &self.t {
            return t.to_vec();
        }
        let name = self.model_name(defaults).to_lowercase();
        let unit = self.unit(&name);
        let units = defaults.t_units.clone().unwrap_or_else(|| figure_t_units(&name));
        units.into_iter().map(|x| x * unit).collect()
    }

    pub fn theta_values(&self, defaults: &Defaults) -> Result<Vec<f64>> {
        if let Some(theta) = &self.theta {
            return theta.to_vec().iter().map(Angle::radians).collect();
        }
        Ok(match self.theta_points {
            Some(n) => linspace(0.0, std::f64::consts::FRAC_PI_2, n),
            None => defaults.theta.clone(),
        })
    }

    pub fn sizes(&self, defaults: &Defaults) -> Vec<usize> {
        self.sizes
            .as_ref()
            .map_or_else(|| defaults.sizes.clone(), OneOrMany::to_vec)
    }

    /// Replica seeds: the explicit list, else `seed, seed + 1, ...`.
    /// Deterministic models need none.
    pub fn seeds(&self, template: &ModelTemplate, defaults: &Defaults) -> Result<Vec<u64>> {
        if !template.needs_seed() {
            return Ok(Vec::new());
        }
        if let Some(seeds) = &self.seeds {
            if seeds.is_empty() {
                return Err(Error::Config("seed list is empty".into()));
            }
            return Ok(seeds.clone());
        }
        let base = self
            .seed
            .ok_or_else(|| Error::Config("disorder models need --seed".into()))?;
        let replicas = self.replicas.unwrap_or(defaults.replicas);
        if replicas == 0 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        Ok((0..replicas as u64).map(|r| base.wrapping_add(r)).collect())
    }

    pub fn grid(&self, defaults: &Defaults) -> Result<SweepGrid> {
        let model = self.model_template(defaults)?;
        let grid = SweepGrid {
            theta_values: self.theta_values(defaults)?,
            t_values: self.t_values(defaults),
            sizes: self.sizes(defaults),
            seeds: self.seeds(&model, defaults)?,
            model,
            boundary: self.boundary.unwrap_or_default(),
        };
        grid.validate().map_err(|e| match e {
            Error::Parameter(m) => Error::Config(m),
            other => other,
        })?;
        Ok(grid)
    }

    pub fn format(&self, path: &Path) -> Format {
        self.format.unwrap_or_else(|| Format::from_path(path))
    }
}
