//! Command-line front end: correlation tables, spectra, level crossings,
//! quantum beats, propagation and trap scans as CSV or JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod format;
pub mod grid;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::grid::Grid;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] ringrad::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 success, 1 I/O failure, 2 usage error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::Numerical(
                ringrad::Error::InvalidConfig(_) | ringrad::Error::InvalidArgument(_),
            ) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser, Debug, Clone)]
#[command(
    name = "ringrad",
    version,
    about = "Collective radiative modes of atoms on a ring"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Level-shift kernel: exact integral or closed-form approximation.
    #[arg(long, global = true, value_enum, default_value_t = KernelMode::Approx)]
    pub kernel: KernelMode,
    /// Absolute tolerance of the exact kernel.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// File of key=value lines supplying any flag not given on the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    Exact,
    Approx,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct RadiusArgs {
    /// Single ring radius (wavelengths).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Radius grid start:stop:step (inclusive, wavelengths).
    #[arg(long)]
    pub radius_grid: Option<Grid>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// D1, exact S and approximate S on an x grid.
    Correlation {
        #[arg(long, default_value = "0.1:30:0.1")]
        x_grid: Grid,
    },
    /// Level shifts and decay rates of every mode.
    Spectrum {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        radius: RadiusArgs,
        /// Add the central atom.
        #[arg(long)]
        center: bool,
    },
    /// Level crossings of the 0± pair (ring with central atom).
    Crossings {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        radius_grid: Grid,
    },
    /// Beat frequency and 0± rates (ring with central atom).
    Beats {
        /// Comma-separated outer atom numbers.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        radius: RadiusArgs,
        /// Beat frequency below which the transfer is reported as aperiodic.
        #[arg(long, default_value_t = ringrad::dynamics::CROSSING_THRESHOLD)]
        threshold: f64,
    },
    /// Time evolution of an initial state; P is the population of the uniform ring state.
    Propagate {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        radius: f64,
        /// Add the central atom (implied by --initial z).
        #[arg(long)]
        center: bool,
        /// z, p0, 0+, 0-, p:<k>, or a file of site coefficients (re,im per line).
        #[arg(long, default_value = "z")]
        initial: String,
        /// End of the time window (1/Γ); default 10/min rate, at most 1000.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Minimal decay rate against N for the bare ring, with the suppression-law fit.
    Trapscan {
        #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.5")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 60)]
        n_max: usize,
    },
    /// Print the channel matrix (row-major "re,im" entries).
    DumpMatrix {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        center: bool,
    },
}

/// Parse arguments (including `--config` defaults) and produce the output
/// text together with the requested destination.
pub fn render<I, S>(args: I) -> Result<(String, Option<PathBuf>), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let args: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let args = grid::expand_config(args).map_err(CliError::Usage)?;
    let cli = Cli::try_parse_from(args)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.opts.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let text = pool.install(|| commands::execute(&cli))?;
    Ok((text, cli.opts.out.clone()))
}

pub fn run<I, S>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let (text, out) = render(args)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
