//! Command-line interface.

use std::io::{BufReader, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ltlcheck_core::checker::{Budget, CheckError, CheckOptions, Overall};
use ltlcheck_core::speclang::{analyze_deps, compile, parse, print_program};

use crate::files::{load_model, load_spec, read_text, LoadError};
use crate::report::Report;
use crate::runner::{check_property, checked_properties, sweep, sweep_csv, SweepError, SweepPlan};
use crate::serve::{serve_session, serve_tcp, ServeError, ServeOptions};
use crate::transport::{Connector, ExecutorTarget};

/// Exit code for configuration and runtime errors.
pub const EXIT_ERROR: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "ltlcheck", version, about = "Randomized temporal-logic testing of interactive systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a specification's properties against an executor.
    Check(CheckArgs),
    /// Print a specification's syntax tree.
    Parse {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Print the state fields a property depends on.
    Deps {
        spec: PathBuf,
        /// Defaults to every checked property.
        property: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Measure fault detection across default subscripts; prints CSV.
    Sweep(SweepArgs),
    /// Serve a model file as an executor on standard streams or TCP.
    Serve {
        model: PathBuf,
        /// Listen on this address instead of standard streams.
        #[arg(long)]
        tcp: Option<String>,
        /// Sleep through logical time.
        #[arg(long)]
        realtime: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// `model:PATH`, `exec:COMMAND` or `tcp:HOST:PORT`.
    #[arg(long)]
    pub executor: ExecutorTarget,
    /// Only check these properties.
    #[arg(long = "property")]
    pub properties: Vec<String>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub hard_cap_factor: u64,
    /// Random if omitted; always printed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub spec: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_actions: u64,
    #[arg(long, default_value_t = 100)]
    pub default_subscript: u32,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Stop a property after its first failing run.
    #[arg(long)]
    pub fail_fast: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub spec: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub subscripts: Vec<u32>,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs_per: u64,
    /// Soft budget per run; the subscript alone then decides how long a
    /// run lasts.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_actions: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Serve(#[from] ServeError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl RunArgs {
    fn options(&self, runs: u64, max_actions: u64, fail_fast: bool) -> CheckOptions {
        let max = max_actions as usize;
        let budget = Budget { runs: runs as usize, max_actions: max, hard_cap: max.saturating_mul(self.hard_cap_factor as usize) };
        CheckOptions { fail_fast, ..CheckOptions::new(budget) }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(rand::random)
    }

    fn selected(&self) -> Option<&[String]> {
        (!self.properties.is_empty()).then_some(self.properties.as_slice())
    }
}

/// Runs a command, writing its output to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Check(args) => check(args, out, err),
        Command::Parse { spec, format } => {
            let program = parse(&read_text(&spec)?).map_err(|e| LoadError::Spec { path: spec.clone(), source: e.into() })?;
            match format {
                Format::Human => write!(out, "{}", print_program(&program))?,
                Format::Machine => writeln!(out, "{}", serde_json::to_string_pretty(&program).expect("serializable"))?,
            }
            Ok(0)
        }
        Command::Deps { spec: path, property, format } => {
            let spec = load_spec(&path, 100)?;
            let mut deps = std::collections::BTreeSet::new();
            let mut found = false;
            for (check, p) in checked_properties(&spec) {
                if property.as_deref().is_none_or(|want| want == p) {
                    found = true;
                    deps.extend(analyze_deps(&spec, &check.for_property(p)));
                }
            }
            if let (Some(p), false) = (&property, found) {
                return Err(CliError::Usage(format!("`{}` is not a checked property", p)));
            }
            match format {
                Format::Human => deps.iter().try_for_each(|d| writeln!(out, "{}", d))?,
                Format::Machine => writeln!(out, "{}", serde_json::to_string(&deps).expect("serializable"))?,
            }
            Ok(0)
        }
        Command::Sweep(args) => {
            let text = read_text(&args.spec)?;
            let connector = Connector::new(&args.run.executor)?;
            let seed = args.run.seed();
            writeln!(err, "seed {}", seed)?;
            let options = args.run.options(args.runs_per, args.max_actions, false);
            let plan = SweepPlan {
                subscripts: args.subscripts.clone(),
                properties: args.run.selected().map(<[String]>::to_vec),
                hard_cap_factor: args.run.hard_cap_factor as usize,
                jobs: args.run.jobs,
            };
            let rows = sweep(|n| compile(&text, n), &connector, &plan, seed, &options)
            .map_err(|e| match e {
                SweepError::Spec(source) => CliError::Load(LoadError::Spec { path: args.spec.clone(), source }),
                other => other.into(),
            })?;
            write!(out, "{}", sweep_csv(&rows))?;
            Ok(0)
        }
        Command::Serve { model, tcp, realtime } => {
            let model = load_model(&model)?;
            let options = ServeOptions { realtime };
            match tcp {
                Some(addr) => {
                    let listener = TcpListener::bind(&addr)?;
                    writeln!(err, "listening on {}", listener.local_addr()?)?;
                    serve_tcp(model, listener, options)?;
                }
                None => {
                    let stdin = std::io::stdin();
                    serve_session(model, BufReader::new(stdin.lock()), std::io::stdout().lock(), options)?;
                }
            }
            Ok(0)
        }
    }
}

fn check(args: CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let spec = load_spec(&args.spec, args.default_subscript)?;
    let connector = Connector::new(&args.run.executor)?;
    let selected = args.run.selected();
    if let Some(ps) = selected {
        if let Some(p) = ps.iter().find(|p| !spec.checks.iter().any(|c| c.properties.contains(p))) {
            return Err(CliError::Usage(format!("`{}` is not a checked property", p)));
        }
    }
    let seed = args.run.seed();
    if args.format == Format::Machine {
        writeln!(err, "seed {}", seed)?;
    }
    let options = args.run.options(args.runs, args.max_actions, args.fail_fast);
    let mut results = Vec::new();
    for (check, property) in checked_properties(&spec) {
        if selected.is_some_and(|ps| !ps.iter().any(|p| p == property)) {
            continue;
        }
        results.push(check_property(&spec, check, property, &connector, seed, &options, args.run.jobs)?);
    }
    let report = Report::new(seed, results);
    match args.format {
        Format::Human => write!(out, "{}", report.human())?,
        Format::Machine => writeln!(out, "{}", report.to_json())?,
    }
    Ok(match report.overall() {
        Overall::Pass => 0,
        Overall::Fail => 1,
        Overall::Inconclusive => 2,
    })
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let code = run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()).unwrap_or_else(|e| {
        eprintln!("error: {}", e);
        EXIT_ERROR
    });
    ExitCode::from(code)
}
