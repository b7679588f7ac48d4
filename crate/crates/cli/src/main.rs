//! `pentapod-sing`: singularity checks, parametrized samples, closest
//! singular configurations and plotting meshes for a linear pentapod.

mod commands;
mod config;
mod mesh;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pentapod_core::{Mode, SolverOptions};

use commands::{Classify, Failure, Outcome};
use config::{parse_t, Format, JobConfig, ParamSource};

#[derive(Parser)]
#[command(name = "pentapod-sing", version, about = "Singularity analysis of linear pentapods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON job description
    #[arg(long)]
    config: PathBuf,
    /// fixed-orientation, fixed-position, general or equiform
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Multistart count for the general and equiform modes
    #[arg(long)]
    starts: Option<usize>,
    /// Rank tolerance for `check`, residual tolerance for `param --inverse`
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate F and the Jacobian rank test at the configured pose
    Check(Common),
    /// Sample singular poses from parameter values, or invert the configured pose
    Param {
        #[command(flatten)]
        common: Common,
        /// Parameter values "t1,t2,t3,t4"; repeatable
        #[arg(long = "t", value_name = "T1,T2,T3,T4")]
        t: Vec<String>,
        /// Number of low-discrepancy samples
        #[arg(long)]
        grid: Option<usize>,
        /// Half-width of the sampled parameter cube
        #[arg(long)]
        range: Option<f64>,
        /// Recover the parameters of the configured (singular) pose
        #[arg(long)]
        inverse: bool,
    },
    /// Closest singular configurations to the configured pose
    Dist(Common),
    /// Triangulate Ω at the pose orientation and trace ω at the pose position
    Mesh {
        #[command(flatten)]
        common: Common,
        /// Grid cells per box edge
        #[arg(long)]
        resolution: Option<usize>,
        /// Latitude bands on the sphere
        #[arg(long)]
        curve_resolution: Option<usize>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Check(c) | Command::Dist(c) => c,
            Command::Param { common, .. } | Command::Mesh { common, .. } => common,
        }
    }
}

fn run(command: &Command) -> Outcome {
    let common = command.common();
    let cfg = JobConfig::load(&common.config).config()?;
    for w in &cfg.warnings {
        log::warn!("{w}");
    }
    let format = common.format.or(cfg.format).unwrap_or(Format::Csv);
    let tol = common.tol.or(cfg.tol);
    if let Some(t) = tol {
        if t <= 0.0 || !t.is_finite() {
            return Err(Failure::Config(anyhow::anyhow!("tol must be positive, got {t}")));
        }
    }
    match command {
        Command::Check(_) => commands::check(&cfg, format, tol),
        Command::Param { t, grid, range, inverse, .. } => {
            let source = if !t.is_empty() {
                ParamSource::Values(t.iter().map(|s| parse_t(s)).collect::<anyhow::Result<_>>().config()?)
            } else if grid.is_some() || range.is_some() {
                let (n, r) = match &cfg.param {
                    Some(ParamSource::Grid { n, range }) => (*n, *range),
                    _ => (100, 10.0),
                };
                ParamSource::Grid { n: grid.unwrap_or(n), range: range.unwrap_or(r) }
            } else {
                cfg.param.clone().unwrap_or(ParamSource::Grid { n: 100, range: 10.0 })
            };
            commands::param(&cfg, format, source, *inverse, tol)
        }
        Command::Dist(_) => {
            let mode = common.mode.or(cfg.mode).unwrap_or(Mode::General);
            let defaults = SolverOptions::default();
            let opts = SolverOptions {
                seed: common.seed.or(cfg.seed).unwrap_or(defaults.seed),
                starts: common.starts.or(cfg.starts).unwrap_or(defaults.starts),
                box_half_width: cfg.box_half_width,
                precision_bits: commands::precision_bits()?,
            };
            if opts.starts == 0 {
                return Err(Failure::Config(anyhow::anyhow!("starts must be at least 1")));
            }
            commands::dist(&cfg, format, mode, &opts)
        }
        Command::Mesh { resolution, curve_resolution, .. } => commands::mesh(
            &cfg,
            resolution.or(cfg.resolution).unwrap_or(commands::DEFAULT_RESOLUTION),
            curve_resolution.or(cfg.curve_resolution).unwrap_or(commands::DEFAULT_CURVE_RESOLUTION),
        ),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(text) => match emit(&text, cli.command.common().out.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(2)
            }
        },
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            ExitCode::from(failure.code())
        }
    }
}
