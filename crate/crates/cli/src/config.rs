//! Command-line flags, `key = value` config files and their resolution into a
//! validated run configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sap_core::dynamics::{BiasProtocol, StepControl};
use sap_core::model::{PulseSchedule, SystemParams};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "sap",
    version,
    about = "Spatial adiabatic passage of a BEC in a triple well"
)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(flatten)]
    pub flags: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and emit amplitudes on the output grid.
    Simulate,
    /// Emit dark and dressed energies along the pulse sequence.
    Energies,
    /// Emit Optimal Zone boundary curves and a verdict raster.
    OzMap,
    /// Scan transfer efficiency against the right-well bias.
    SweepBias,
    /// Scan efficiency against the final bias of a linear ramp.
    RampScan,
    /// Run the built-in property suite.
    Selftest,
}

impl Command {
    fn default_points(self) -> usize {
        match self {
            Command::Simulate => 2000,
            Command::Energies => 2001,
            Command::OzMap => 200,
            Command::SweepBias => 121,
            Command::RampScan => 81,
            Command::Selftest => 0,
        }
    }

    fn default_range(self) -> (f64, f64) {
        match self {
            Command::RampScan => (-0.4, 0.4),
            _ => (-0.6, 0.6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolKind {
    Static,
    Ramp,
    Decouple,
}

/// Every configurable value; unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Overrides {
    /// Nonlinearity of all three wells.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g: Option<f64>,
    /// Left-well nonlinearity.
    #[arg(long = "g-l", global = true, allow_hyphen_values = true)]
    pub g_l: Option<f64>,
    /// Middle-well nonlinearity (default: mean of the outer wells).
    #[arg(long = "g-m", global = true, allow_hyphen_values = true)]
    pub g_m: Option<f64>,
    /// Right-well nonlinearity.
    #[arg(long = "g-r", global = true, allow_hyphen_values = true)]
    pub g_r: Option<f64>,
    /// Middle-well detuning.
    #[arg(long = "delta-m", global = true, allow_hyphen_values = true)]
    pub delta_m: Option<f64>,
    /// Right-well bias.
    #[arg(long = "delta-r", global = true, allow_hyphen_values = true)]
    pub delta_r: Option<f64>,
    /// Right-well bias at the start of a ramp.
    #[arg(long = "delta-r-initial", global = true, allow_hyphen_values = true)]
    pub delta_r_initial: Option<f64>,
    /// Right-well bias at the end of a ramp.
    #[arg(long = "delta-r-final", global = true, allow_hyphen_values = true)]
    pub delta_r_final: Option<f64>,
    /// Peak tunneling rate of both pulses.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub j0: Option<f64>,
    /// Pulse width.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Start of the integration window.
    #[arg(long = "t-i", global = true, allow_hyphen_values = true)]
    pub t_i: Option<f64>,
    /// End of the integration window.
    #[arg(long = "t-f", global = true, allow_hyphen_values = true)]
    pub t_f: Option<f64>,
    /// Right-well bias protocol.
    #[arg(long, value_enum, global = true)]
    pub protocol: Option<ProtocolKind>,
    /// Scan range `lo,hi` (bias for sweeps and the raster, final bias for ramp scans).
    #[arg(long, value_parser = parse_range, global = true, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    /// Middle-well detuning range `lo,hi` for the raster.
    #[arg(long = "delta-m-range", value_parser = parse_range, global = true, allow_hyphen_values = true)]
    pub delta_m_range: Option<(f64, f64)>,
    /// Grid size (output samples, scan points or raster resolution).
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Plateau efficiency threshold.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub threshold: Option<f64>,
    /// Worker threads for sweeps and rasters.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output path (prefix for the two raster files); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed for the self-test sampler.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Config file of `key = value` lines using the flag names as keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let lo = lo
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi = hi
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((lo, hi))
}

impl Overrides {
    /// Values from `self`, falling back to `lower` for anything unset.
    pub fn over(self, lower: Overrides) -> Overrides {
        Overrides {
            g: self.g.or(lower.g),
            g_l: self.g_l.or(lower.g_l),
            g_m: self.g_m.or(lower.g_m),
            g_r: self.g_r.or(lower.g_r),
            delta_m: self.delta_m.or(lower.delta_m),
            delta_r: self.delta_r.or(lower.delta_r),
            delta_r_initial: self.delta_r_initial.or(lower.delta_r_initial),
            delta_r_final: self.delta_r_final.or(lower.delta_r_final),
            j0: self.j0.or(lower.j0),
            sigma: self.sigma.or(lower.sigma),
            t_i: self.t_i.or(lower.t_i),
            t_f: self.t_f.or(lower.t_f),
            protocol: self.protocol.or(lower.protocol),
            range: self.range.or(lower.range),
            delta_m_range: self.delta_m_range.or(lower.delta_m_range),
            points: self.points.or(lower.points),
            threshold: self.threshold.or(lower.threshold),
            workers: self.workers.or(lower.workers),
            out: self.out.or(lower.out),
            seed: self.seed.or(lower.seed),
            config: self.config.or(lower.config),
        }
    }

    /// Sets one field from its textual `key = value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, CliError> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, CliError>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::config(key, format!("cannot parse `{value}`: {e}")))
        }
        match key {
            "g" => self.g = num(key, value)?,
            "g-l" => self.g_l = num(key, value)?,
            "g-m" => self.g_m = num(key, value)?,
            "g-r" => self.g_r = num(key, value)?,
            "delta-m" => self.delta_m = num(key, value)?,
            "delta-r" => self.delta_r = num(key, value)?,
            "delta-r-initial" => self.delta_r_initial = num(key, value)?,
            "delta-r-final" => self.delta_r_final = num(key, value)?,
            "j0" => self.j0 = num(key, value)?,
            "sigma" => self.sigma = num(key, value)?,
            "t-i" => self.t_i = num(key, value)?,
            "t-f" => self.t_f = num(key, value)?,
            "points" => self.points = num(key, value)?,
            "threshold" => self.threshold = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "protocol" => {
                self.protocol = Some(
                    ProtocolKind::from_str(value, true).map_err(|e| CliError::config(key, e))?,
                )
            }
            "range" => self.range = Some(parse_range(value).map_err(|e| CliError::config(key, e))?),
            "delta-m-range" => {
                self.delta_m_range = Some(parse_range(value).map_err(|e| CliError::config(key, e))?)
            }
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str, path: &Path) -> Result<Overrides, CliError> {
    let mut out = Overrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(CliError::Syntax {
            path: path.to_path_buf(),
            line: idx + 1,
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !out.set(key, value)? {
            return Err(CliError::UnknownKey {
                path: path.to_path_buf(),
                line: idx + 1,
                key: key.to_string(),
            });
        }
    }
    Ok(out)
}

pub fn load_config_file(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text, path)
}

/// Fully validated settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: SystemParams<f64>,
    pub schedule: PulseSchedule<f64>,
    pub protocol: BiasProtocol<f64>,
    pub control: StepControl<f64>,
    pub range: (f64, f64),
    pub delta_m_range: (f64, f64),
    pub points: usize,
    pub threshold: f64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 2024;

fn finite(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(key, "must be finite"))
    }
}

fn ordered(key: &str, (lo, hi): (f64, f64)) -> Result<(f64, f64), CliError> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok((lo, hi))
    } else {
        Err(CliError::config(
            key,
            format!("need finite lo < hi, got {lo},{hi}"),
        ))
    }
}

impl RunConfig {
    /// Applies defaults to `o` and validates everything up front.
    pub fn resolve(command: Command, o: &Overrides) -> Result<RunConfig, CliError> {
        let g = finite("g", o.g.unwrap_or(0.0))?;
        let g_l = finite("g-l", o.g_l.unwrap_or(g))?;
        let g_r = finite("g-r", o.g_r.unwrap_or(g))?;
        let g_m = match (o.g_m, o.g_l.is_some() || o.g_r.is_some()) {
            (Some(v), _) => finite("g-m", v)?,
            (None, true) => 0.5 * (g_l + g_r),
            (None, false) => g,
        };
        let delta_m = finite("delta-m", o.delta_m.unwrap_or(0.0))?;
        let delta_r = finite("delta-r", o.delta_r.unwrap_or(0.0))?;
        let params = SystemParams::new(g_l, g_m, g_r, delta_m, delta_r)?;

        let sigma = o.sigma.unwrap_or(150.0);
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(CliError::config(
                "sigma",
                format!("must be > 0, got {sigma}"),
            ));
        }
        let j0 = o.j0.unwrap_or(1.0);
        if !(j0 > 0.0 && j0.is_finite()) {
            return Err(CliError::config("j0", format!("must be > 0, got {j0}")));
        }
        let t_i = finite("t-i", o.t_i.unwrap_or(-600.0))?;
        let t_f = finite("t-f", o.t_f.unwrap_or(600.0))?;
        if t_i >= t_f {
            return Err(CliError::config(
                "t-i",
                format!("must be below t-f ({t_i} >= {t_f})"),
            ));
        }
        let schedule = PulseSchedule::symmetric(j0, sigma, 1.5 * sigma, t_i, t_f)?;

        let protocol = match o.protocol.unwrap_or(ProtocolKind::Static) {
            ProtocolKind::Static => BiasProtocol::Static,
            ProtocolKind::Ramp => BiasProtocol::LinearRamp {
                initial: finite("delta-r-initial", o.delta_r_initial.unwrap_or(delta_r))?,
                final_: finite("delta-r-final", o.delta_r_final.unwrap_or(delta_r))?,
            },
            ProtocolKind::Decouple => {
                if !params.is_uniform() {
                    return Err(CliError::config(
                        "protocol",
                        "decouple needs g-l = g-m = g-r",
                    ));
                }
                BiasProtocol::DarkBrightDecoupling
            }
        };

        let points = o.points.unwrap_or(command.default_points());
        let min_points = if command == Command::OzMap { 1 } else { 2 };
        if command != Command::Selftest && points < min_points {
            return Err(CliError::config(
                "points",
                format!("need at least {min_points}, got {points}"),
            ));
        }
        let threshold = o.threshold.unwrap_or(0.99);
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(CliError::config(
                "threshold",
                format!("must lie in (0, 1), got {threshold}"),
            ));
        }
        if o.workers == Some(0) {
            return Err(CliError::config("workers", "must be >= 1"));
        }
        let control = StepControl {
            output_points: if command == Command::Simulate {
                points
            } else {
                2000
            },
            ..StepControl::default()
        };

        Ok(RunConfig {
            command,
            params,
            schedule,
            protocol,
            control,
            range: ordered("range", o.range.unwrap_or(command.default_range()))?,
            delta_m_range: ordered("delta-m-range", o.delta_m_range.unwrap_or((-1.0, 1.0)))?,
            points,
            threshold,
            workers: o.workers,
            out: o.out.clone(),
            seed: o.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

/// Flags layered over the optional config file, resolved for `cli.command`.
pub fn parse_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.flags.config {
        Some(path) => load_config_file(path)?,
        None => Overrides::default(),
    };
    RunConfig::resolve(cli.command, &cli.flags.clone().over(file))
}
