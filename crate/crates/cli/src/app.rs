//! Argument parsing and dispatch for the `rabi` binary.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Output};
use crate::config::{Overrides, RunConfig};
use crate::data::read_data;
use crate::error::{CliError, Result};
use crate::verify::{self, Fault};

#[derive(Debug, Parser)]
#[command(name = "rabi", version, about = "Vacuum Rabi oscillations under irreducible and reducible field quantization")]
pub struct Cli {
    /// Worker threads for the block sums (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// CSV output path. Table commands print CSV to stdout without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state probability: reducible, irreducible and large-N limit.
    Simulate {
        #[command(flatten)]
        run: Overrides,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Difference between the irreducible and reducible curves.
    Compare {
        #[command(flatten)]
        run: Overrides,
        #[command(flatten)]
        out: OutputArgs,
        /// Error bars to overlay, CSV `t,p,sigma`.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Mean atom-field energy in both representations.
    Energy {
        #[command(flatten)]
        run: Overrides,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Revival time and amplitude forecast.
    Revival {
        #[command(flatten)]
        run: Overrides,
        #[command(flatten)]
        out: OutputArgs,
        /// Simulate through 1.2·t_r and locate the envelope maximum.
        #[arg(long)]
        scan: bool,
    },
    /// Smallest ς consistent with measured error bars.
    Fit {
        #[command(flatten)]
        run: Overrides,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        search_lo: Option<f64>,
        #[arg(long)]
        search_hi: Option<f64>,
    },
    /// Run the built-in verification suites.
    Verify {
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn emit(output: Output, out: &OutputArgs, csv_to_stdout: bool) -> Result<()> {
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    let piped = csv_to_stdout && out.out.is_none() && output.table.is_some();
    if let Some(table) = &output.table {
        match &out.out {
            Some(path) => table.write(path)?,
            None if piped => stdout.write_all(&table.to_csv()).map_err(|e| CliError::io("<stdout>", e))?,
            None => {}
        }
    }
    if let (Some(svg), Some(path)) = (&output.svg, &out.svg) {
        write_file(path, svg.as_bytes())?;
    }
    if piped {
        eprint!("{}", output.report);
    } else {
        stdout.write_all(output.report.as_bytes()).map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate { run, out } => emit(commands::simulate(&RunConfig::resolve(&run)?)?, &out, true),
        Command::Compare { run, out, data } => {
            let cfg = RunConfig::resolve(&run)?;
            let data = data.as_deref().map(read_data).transpose()?;
            emit(commands::compare(&cfg, data.as_deref())?, &out, true)
        }
        Command::Energy { run, out } => emit(commands::energy(&RunConfig::resolve(&run)?)?, &out, true),
        Command::Revival { run, out, scan } => emit(commands::revival(&RunConfig::resolve(&run)?, scan)?, &out, false),
        Command::Fit { run, out, data, search_lo, search_hi } => {
            let cfg = RunConfig::resolve(&run)?;
            let data = read_data(&data)?;
            let (lo, hi) = cfg.search_range.unwrap_or((1.0, cfg.params.n as f64));
            let (output, _) = commands::fit(&cfg, &data, (search_lo.unwrap_or(lo), search_hi.unwrap_or(hi)))?;
            emit(output, &out, false)
        }
        Command::Verify { inject_fault } => {
            let report = verify::run(inject_fault)?;
            print!("{}", report.render());
            match report.first_failure() {
                Some(c) => Err(CliError::Verify(c.label())),
                None => Ok(()),
            }
        }
    }
}

/// Parse `std::env::args`, run, and return the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("rabi: {e}");
            e.exit_code()
        }
    }
}
