//! Command-line definition and config-file merging.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "degennes",
    version,
    about = "Band functions of the de Gennes operator and their holomorphic extension",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Fd,
    Colloc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Discretization scheme.
    #[arg(long, global = true, value_enum, default_value = "colloc")]
    pub scheme: SchemeArg,
    /// Grid points or basis size [default depends on command and scheme].
    #[arg(long, global = true)]
    pub n_points: Option<usize>,
    /// Truncation length T, or `auto`.
    #[arg(long, global = true, default_value = "auto", value_parser = parse_truncation)]
    pub truncation: TruncationArg,
    /// Trapezoid nodes on each contour.
    #[arg(long, global = true, default_value_t = 32)]
    pub contour_nodes: usize,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Output file [default: <command>.<format> in the working directory].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key = value file (TOML syntax); command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also write the output to standard output.
    #[arg(long, global = true)]
    pub stdout: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band functions μ_1..μ_k over a real ξ grid.
    #[command(allow_negative_numbers = true)]
    Band {
        #[arg(long, default_value_t = -2.0)]
        from: f64,
        #[arg(long, default_value_t = 4.0)]
        to: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Minimum Θ₀ of the ground band, cross-checked on the other scheme.
    #[command(allow_negative_numbers = true)]
    Theta0 {
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 2.0)]
        to: f64,
        /// Final bracket width in ξ.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Holomorphic extension F on a grid of the strip |Im ξ| ≤ ε.
    #[command(allow_negative_numbers = true)]
    Extend {
        #[arg(long, default_value_t = -2.0)]
        re_from: f64,
        #[arg(long, default_value_t = 4.0)]
        re_to: f64,
        #[arg(long, default_value_t = 0.1)]
        re_step: f64,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        im_step: f64,
        /// Largest accepted ε.
        #[arg(long, default_value_t = 0.3)]
        max_eps: f64,
    },
    /// Verification suite: resolvent bounds, scaling, coercivity,
    /// asymptotics, dilation and Montgomery checks.
    #[command(allow_negative_numbers = true)]
    Check {
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        /// Random points per sampled check.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Behaviour of μ_k as ξ → +∞ (plus) or ξ = −α → −∞ (minus).
    #[command(allow_negative_numbers = true)]
    Asymptotics {
        #[arg(long, value_enum, default_value = "plus")]
        side: Side,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Comma-separated ξ (plus) or α (minus) values
        /// [default: 2,4,6,8 or 10,15,20].
        #[arg(long)]
        points: Option<String>,
    },
    /// Eigenvalues of the Montgomery operator -∂² + (ξ − t^{n+1}/(n+1))².
    #[command(allow_negative_numbers = true)]
    Montgomery {
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 0.0)]
        to: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Band { .. } => "band",
            Command::Theta0 { .. } => "theta0",
            Command::Extend { .. } => "extend",
            Command::Check { .. } => "check",
            Command::Asymptotics { .. } => "asymptotics",
            Command::Montgomery { .. } => "montgomery",
        }
    }
}

/// `None` selects the family's automatic truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationArg(pub Option<f64>);

fn parse_truncation(s: &str) -> Result<TruncationArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(TruncationArg(None));
    }
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(TruncationArg(Some(t))),
        _ => Err(format!("expected `auto` or a positive length, got `{s}`")),
    }
}

/// Reads a TOML file of flat `key = value` pairs into strings.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let table: toml::Table = text.parse().map_err(|e| format!("{}: {e}", path.display()))?;
    table
        .into_iter()
        .map(|(k, v)| {
            let value = match v {
                toml::Value::String(s) => s,
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                other => return Err(format!("{}: unsupported value for `{k}`: {other}", path.display())),
            };
            Ok((k.replace('_', "-"), value))
        })
        .collect()
}

/// Parses the command line, filling flags that were not given from the
/// config file. Returns a clap error for usage problems.
pub fn parse(argv: Vec<OsString>) -> Result<Cli, clap::Error> {
    let mut cmd = Cli::command();
    cmd.build();
    let first = cmd.clone().try_get_matches_from(&argv)?;
    let Some((sub_name, sub)) = first.subcommand() else {
        return Cli::try_parse_from(argv);
    };
    let Some(path) = sub.get_one::<PathBuf>("config") else {
        return Cli::try_parse_from(argv);
    };
    let entries = read_config(path).map_err(|e| cmd.error(clap::error::ErrorKind::Io, e))?;
    let sub_cmd = cmd.find_subcommand(sub_name).expect("parsed subcommand exists");

    let known_anywhere = |key: &str| {
        cmd.get_subcommands()
            .flat_map(|s| s.get_arguments())
            .any(|a| a.get_long() == Some(key))
    };
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in &entries {
        if key == "config" {
            return Err(cmd.error(
                clap::error::ErrorKind::InvalidValue,
                "a config file cannot name another config file",
            ));
        }
        let Some(arg) = sub_cmd.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            if known_anywhere(key) {
                continue;
            }
            return Err(cmd.error(
                clap::error::ErrorKind::UnknownArgument,
                format!("unknown key `{key}` in {}", path.display()),
            ));
        };
        if sub.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" => extra.push(format!("--{key}").into()),
                "false" => {}
                _ => {
                    return Err(cmd.error(
                        clap::error::ErrorKind::InvalidValue,
                        format!("`{key}` expects true or false, got `{value}`"),
                    ))
                }
            },
            _ => extra.push(format!("--{key}={value}").into()),
        }
    }
    let mut full = argv;
    full.extend(extra);
    Cli::try_parse_from(full)
}
