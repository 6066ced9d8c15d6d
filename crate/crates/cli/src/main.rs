//! `tsrm`: density tables, moment and tail reports, the spectrum, PDE and
//! stochastic cross-checks, and self-tests.
//!
//! Exit codes: 0 success, 1 usage error, 2 failed check, 3 I/O error.

// `!(x > 0.0)` is used on purpose so NaN fails the check; tabulated
// constants keep all published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tsrm_core::MarginalKind;

use config::{Command as CommandKind, Format, Mode, RunConfig};
use error::{CliError, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "tsrm", version, about = "Marginals of the true self-repelling motion")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Global {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (or base name for multi-file commands); stdout if absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Master seed [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of computed spectral zeros [default: 50].
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Table format [default: csv].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate a marginal density.
    Density {
        /// nu1, nu2, nu1hat or nu2hat.
        #[arg(long, value_parser = parse_kind)]
        kind: MarginalKind,
        /// Left end (heights only; position ranges are [-max, max]).
        #[arg(long, allow_hyphen_values = true)]
        min: Option<f64>,
        #[arg(long, default_value_t = 4.0)]
        max: f64,
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Time t (fixed-time kinds) or rate s (exponential-time kinds).
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Moments of all four marginals for n = 0..=n_max (JSON).
    Moments {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
    /// Tail constants and their least-squares fits (JSON).
    Tails,
    /// Zeros δ'_k and weights p_k.
    Spectrum,
    /// Stochastic oracles.
    Simulate {
        #[command(subcommand)]
        what: Simulate,
    },
    /// Solve the Feynman–Kac PDE and check its marginals.
    Pde(GridArgs),
    /// Run the built-in checks; exit code 2 on any failure.
    Selftest {
        #[arg(long, value_enum, default_value = "quick")]
        level: Level,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        tsaw: TsawArgs,
    },
}

#[derive(Subcommand)]
enum Simulate {
    /// Self-repelling lattice walks with calibrated goodness of fit.
    Tsaw(TsawArgs),
    /// Brownian area Monte Carlo for u, φ, w and ν̂.
    Brownian {
        #[command(flatten)]
        mc: McArgs,
        /// Starting levels.
        #[arg(long = "h", value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0])]
        hs: Vec<f64>,
        /// Positions x > 0.
        #[arg(long = "x", value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0])]
        xs: Vec<f64>,
    },
}

#[derive(Args, Default)]
struct GridArgs {
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    h_max: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    dh: Option<f64>,
}

#[derive(Args, Default)]
struct McArgs {
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args, Default)]
struct TsawArgs {
    #[arg(long)]
    n_walks: Option<usize>,
    #[arg(long)]
    n_steps: Option<u64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Level {
    Quick,
    Full,
}

fn parse_kind(s: &str) -> Result<MarginalKind, String> {
    s.parse().map_err(|e: tsrm_core::Error| e.to_string())
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl GridArgs {
    fn apply(&self, c: &mut RunConfig) {
        set(&mut c.grid.x_max, self.x_max);
        set(&mut c.grid.h_max, self.h_max);
        set(&mut c.grid.dx, self.dx);
        set(&mut c.grid.dh, self.dh);
    }
}

impl McArgs {
    fn apply(&self, c: &mut RunConfig) {
        set(&mut c.mc.n_paths, self.n_paths);
        set(&mut c.mc.dt, self.dt);
    }
}

impl TsawArgs {
    fn apply(&self, c: &mut RunConfig) {
        set(&mut c.tsaw.n_walks, self.n_walks);
        set(&mut c.tsaw.n_steps, self.n_steps);
        set(&mut c.tsaw.beta, self.beta);
        set(&mut c.tsaw.mode, self.mode);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let g = &cli.global;
    if g.output.is_some() {
        cfg.output = g.output.clone();
    }
    set(&mut cfg.seed, g.seed);
    set(&mut cfg.k_max, g.k_max);
    set(&mut cfg.format, g.format);
    let kind = match &cli.command {
        Cmd::Density { .. } => CommandKind::Density,
        Cmd::Moments { .. } => CommandKind::Moments,
        Cmd::Tails => CommandKind::Tails,
        Cmd::Spectrum => CommandKind::Spectrum,
        Cmd::Simulate { what } => {
            match what {
                Simulate::Tsaw(t) => t.apply(&mut cfg),
                Simulate::Brownian { mc, .. } => mc.apply(&mut cfg),
            }
            CommandKind::Simulate
        }
        Cmd::Pde(grid) => {
            grid.apply(&mut cfg);
            CommandKind::Pde
        }
        Cmd::Selftest { grid, mc, tsaw, .. } => {
            grid.apply(&mut cfg);
            mc.apply(&mut cfg);
            tsaw.apply(&mut cfg);
            CommandKind::Selftest
        }
    };
    cfg.command = Some(kind);
    cfg.validate()?;
    if g.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }

    match cli.command {
        Cmd::Density {
            kind,
            min,
            max,
            points,
            time,
        } => commands::density(
            &cfg,
            &commands::DensityArgs {
                kind,
                min,
                max,
                points,
                time,
            },
        ),
        Cmd::Moments { n_max } => commands::moments(&cfg, n_max),
        Cmd::Tails => commands::tails(&cfg),
        Cmd::Spectrum => commands::spectrum_table(&cfg),
        Cmd::Simulate { what } => match what {
            Simulate::Tsaw(_) => commands::simulate_tsaw(&cfg),
            Simulate::Brownian { hs, xs, .. } => commands::simulate_brownian(&cfg, &hs, &xs),
        },
        Cmd::Pde(_) => commands::pde(&cfg),
        Cmd::Selftest { level, .. } => commands::selftest(&cfg, matches!(level, Level::Full)),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        if matches!(e, CliError::BrokenPipe) {
            return;
        }
        eprintln!("tsrm: {e}");
        std::process::exit(e.exit_code());
    }
}
