//! Command-line flags and the resolved run configuration.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tdsim_core::ode::IntegratorSettings;
use tdsim_core::{Error as CoreError, LoopSpec};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "tdsim",
    version,
    about = "Type-dependent stochastic Ising loops: simulation and analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Sample a stochastic path of the density process or the spin system.
    Simulate(Args),
    /// Integrate the deterministic limit.
    Ode(Args),
    /// Classify the clock module over a coupling grid.
    Bifurcate(Args),
    /// Distance between stochastic paths and the limit as N grows.
    Converge(Args),
    /// Run the built-in consistency checks.
    Validate(Args),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Self::Simulate(_) => CommandKind::Simulate,
            Self::Ode(_) => CommandKind::Ode,
            Self::Bifurcate(_) => CommandKind::Bifurcate,
            Self::Converge(_) => CommandKind::Converge,
            Self::Validate(_) => CommandKind::Validate,
        }
    }

    pub fn args(&self) -> &Args {
        match self {
            Self::Simulate(a)
            | Self::Ode(a)
            | Self::Bifurcate(a)
            | Self::Converge(a)
            | Self::Validate(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Simulate,
    Ode,
    Bifurcate,
    Converge,
    Validate,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Ode => "ode",
            Self::Bifurcate => "bifurcate",
            Self::Converge => "converge",
            Self::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    #[default]
    Density,
    Micro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Method {
    Rk4,
    #[default]
    Rk45,
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct Args {
    /// Coupling strength J.
    #[arg(long = "J", allow_negative_numbers = true, default_value_t = 1.0)]
    pub coupling: f64,
    /// Asymmetry delta in [0, 1].
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub delta: f64,
    /// External fields: "half-J", one value for all types, or one per type.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Vec<String>,
    /// Sites per type; repeat for converge.
    #[arg(long = "N")]
    pub capacity: Vec<usize>,
    /// Number of types in the loop.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long = "t-end", allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    /// Random seed; drawn and reported on stderr when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Coupling grid "start:stop:step" or a single value.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Initial densities "a,b,c".
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub level: Level,
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
    /// RK4 step.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    /// Record every n-th jump.
    #[arg(long)]
    pub thinning: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaMode {
    #[serde(rename = "half-J")]
    HalfJ,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = |reason: &str| CliError::config("grid", format!("{reason} in {s:?}"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let nums = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| bad("expected numbers")))
            .collect::<Result<Vec<f64>, _>>()?;
        let grid = match nums[..] {
            [v] => Self {
                start: v,
                stop: v,
                step: 1.0,
            },
            [start, stop, step] => Self { start, stop, step },
            _ => return Err(bad("expected start:stop:step")),
        };
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite value"));
        }
        if !(grid.step > 0.0) || grid.stop < grid.start {
            return Err(bad("need step > 0 and stop >= start"));
        }
        if (grid.stop - grid.start) / grid.step > 1e6 {
            return Err(bad("more than a million points"));
        }
        Ok(grid)
    }

    /// Points `start + i * step` up to `stop`, with a small allowance so the
    /// endpoint survives rounding.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Everything a run depends on; written into every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub k: usize,
    pub coupling: f64,
    pub delta: f64,
    pub kappa: KappaMode,
    pub capacities: Vec<usize>,
    pub t_end: f64,
    pub seed: Option<u64>,
    pub replicas: usize,
    pub grid: Option<GridSpec>,
    pub x0: Vec<f64>,
    pub level: Level,
    pub integrator: IntegratorSettings,
    pub thinning: Option<usize>,
    pub format: Format,
}

fn default_x0(k: usize) -> Vec<f64> {
    if k == 3 {
        return vec![0.6, 0.5, 0.4];
    }
    (0..k)
        .map(|i| 0.5 + 0.1 * (1.0 - 2.0 * i as f64 / (k - 1) as f64))
        .collect()
}

fn parse_kappa(raw: &[String], k: usize) -> Result<KappaMode, CliError> {
    match raw {
        [] => Ok(KappaMode::HalfJ),
        [one] if one.eq_ignore_ascii_case("half-J") => Ok(KappaMode::HalfJ),
        _ => {
            let vals = raw
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::config("kappa", format!("not a number: {s:?}")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            match vals.len() {
                1 => Ok(KappaMode::Explicit(vec![vals[0]; k])),
                n if n == k => Ok(KappaMode::Explicit(vals)),
                n => Err(CliError::config(
                    "kappa",
                    format!("got {n} values for k = {k}"),
                )),
            }
        }
    }
}

fn parse_x0(s: &str, k: usize) -> Result<Vec<f64>, CliError> {
    let vals = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config("x0", format!("not a number: {p:?}")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if vals.len() != k {
        return Err(CliError::config(
            "x0",
            format!("expected {k} values, got {}", vals.len()),
        ));
    }
    if vals.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(CliError::config("x0", "densities must lie in [0, 1]"));
    }
    Ok(vals)
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(name, format!("must be finite, got {v}")))
    }
}

impl RunConfig {
    /// Validates flags and fills command-specific defaults. The seed stays
    /// `None` here; see [`RunConfig::with_seed`].
    pub fn from_args(kind: CommandKind, a: &Args) -> Result<Self, CliError> {
        if a.k < 3 {
            return Err(CliError::config("k", "a loop needs at least 3 types"));
        }
        let coupling = finite("J", a.coupling)?;
        let delta = finite("delta", a.delta)?;
        let kappa = parse_kappa(&a.kappa, a.k)?;

        let capacities = match (kind, a.capacity.as_slice()) {
            (CommandKind::Converge, []) => vec![100, 1000, 10_000],
            (_, []) => vec![100],
            (CommandKind::Converge, list) => list.to_vec(),
            (_, [one]) => vec![*one],
            (_, _) => {
                return Err(CliError::config(
                    "N",
                    "only converge accepts several values",
                ))
            }
        };
        if capacities.contains(&0) {
            return Err(CliError::config("N", "must be at least 1"));
        }

        let t_end = match a.t_end {
            Some(t) if !t.is_finite() || t < 0.0 => {
                return Err(CliError::config(
                    "t-end",
                    format!("must be finite and >= 0, got {t}"),
                ))
            }
            Some(t) => t,
            None if kind == CommandKind::Converge => 5.0,
            None => 10.0,
        };

        let replicas = match (kind, a.replicas) {
            (CommandKind::Converge, Some(0)) => {
                return Err(CliError::config("replicas", "must be at least 1"))
            }
            (_, Some(r)) => r,
            (CommandKind::Converge, None) => 100,
            (_, None) => 1,
        };

        let grid = match (kind, a.grid.as_deref()) {
            (_, Some(s)) => Some(GridSpec::parse(s)?),
            (CommandKind::Bifurcate, None) => Some(GridSpec {
                start: -2.0,
                stop: 3.0,
                step: 0.05,
            }),
            _ => None,
        };

        let x0 = match a.x0.as_deref() {
            Some(s) => parse_x0(s, a.k)?,
            None => default_x0(a.k),
        };

        let integrator = match a.method {
            Method::Rk4 => {
                if a.rtol.is_some() || a.atol.is_some() {
                    return Err(CliError::config(
                        "method",
                        "--rtol/--atol apply to rk45 only",
                    ));
                }
                IntegratorSettings::Rk4 {
                    step: a.step.unwrap_or(tdsim_core::ode::DEFAULT_RK4_STEP),
                }
            }
            Method::Rk45 => {
                if a.step.is_some() {
                    return Err(CliError::config("method", "--step applies to rk4 only"));
                }
                IntegratorSettings::Rk45 {
                    rtol: a.rtol.unwrap_or(tdsim_core::ode::DEFAULT_RTOL),
                    atol: a.atol.unwrap_or(tdsim_core::ode::DEFAULT_ATOL),
                }
            }
        };
        if let Err(CoreError::InvalidParameter { reason, .. }) = integrator.validate() {
            return Err(CliError::config("method", reason));
        }
        if a.thinning == Some(0) {
            return Err(CliError::config("thinning", "must be at least 1"));
        }

        if kind == CommandKind::Bifurcate {
            if a.k != 3 {
                return Err(CliError::config(
                    "k",
                    "bifurcate analyses the 3-type clock module",
                ));
            }
            if kappa != KappaMode::HalfJ {
                return Err(CliError::config("kappa", "bifurcate requires half-J"));
            }
        }

        let cfg = Self {
            command: kind,
            k: a.k,
            coupling,
            delta,
            kappa,
            capacities,
            t_end,
            seed: a.seed,
            replicas,
            grid,
            x0,
            level: a.level,
            integrator,
            thinning: a.thinning,
            format: a.format,
        };
        // surfaces parameter errors (delta range, overflow) before any work
        cfg.spec(cfg.capacities[0])?;
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn spec(&self, capacity: usize) -> Result<LoopSpec, CliError> {
        let result = match &self.kappa {
            KappaMode::HalfJ => {
                LoopSpec::with_half_coupling(self.k, self.coupling, self.delta, capacity)
            }
            KappaMode::Explicit(v) => {
                LoopSpec::new(self.k, self.coupling, self.delta, v.clone(), capacity)
            }
        };
        result.map_err(|e| match e {
            CoreError::InvalidParameter { name, reason } => CliError::config(name, reason),
            other => CliError::config("J", other.to_string()),
        })
    }

    /// Whether the command draws random numbers.
    pub fn is_stochastic(&self) -> bool {
        matches!(
            self.command,
            CommandKind::Simulate | CommandKind::Converge | CommandKind::Validate
        )
    }
}
