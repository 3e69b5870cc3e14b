//! Command-line front end. The binary only forwards its arguments to
//! [`run`].

pub mod bench;
pub mod insert;
pub mod suites;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use log::info;
use thiserror::Error;

use crate::distributed::{run_master, run_worker, DistError, MasterOptions, WorkerOptions};
use crate::driver::{gen_dense_poly, reconstruct, DriverError, ExpressionBlackBox, PolyForm, RunConfig, RunReport};
use crate::parser::{deduplicate, identifiers, parse, ParseError, PostfixProgram};
use crate::polyinterp::RaceMode;
use insert::{InsertConfig, InsertError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Insert(#[from] InsertError),
    #[error(transparent)]
    Field(#[from] crate::numtheory::FieldError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io { .. } => 1,
            Self::Parse(_) => 2,
            Self::Driver(_) | Self::Field(_) => 3,
            Self::Dist(DistError::Driver(_)) => 3,
            Self::Dist(_) => 4,
            Self::Insert(e) => match e {
                InsertError::MissingConfig(_) | InsertError::Io { .. } => 1,
                InsertError::Driver(_) => 3,
                _ => 2,
            },
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(name = "ratrecon", version, about = "Reconstruct rational functions from probes over prime fields")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Maximum bunch size, a power of two up to 128.
    #[arg(long, default_value_t = 1)]
    pub bunch_size: usize,
    #[arg(long)]
    pub no_factor_scan: bool,
    #[arg(long)]
    pub no_shift_scan: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub max_primes: usize,
    /// Dense Newton interpolation only, no racing.
    #[arg(long)]
    pub newton_only: bool,
}

impl RunArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            n_threads: self.threads,
            max_bunch_size: self.bunch_size,
            seed: self.seed,
            enable_factor_scan: !self.no_factor_scan,
            enable_shift_scan: !self.no_shift_scan,
            max_primes: self.max_primes,
            race_mode: if self.newton_only {
                RaceMode::NewtonOnly
            } else {
                RaceMode::Race
            },
            ..RunConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Expressions separated by ';'.
    pub file: PathBuf,
    /// Comma separated variable names; inferred from the file when absent.
    #[arg(long, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Result file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// JSON run report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct every expression of a file from its evaluations.
    Interpolate {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        save_state: Option<PathBuf>,
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Run a benchmark suite and print probe counts.
    Bench(bench::BenchArgs),
    /// Print a dense random polynomial in x, y, z.
    Gen {
        degree: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        horner: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Interpolate as master, farming probes out to workers.
    Serve {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        /// Wait for this many workers before starting.
        #[arg(long, default_value_t = 0)]
        min_workers: usize,
        #[arg(long, default_value_t = 30)]
        worker_wait_secs: u64,
        /// Requests in flight per worker (default: twice its threads).
        #[arg(long)]
        window: Option<usize>,
    },
    /// Compute probes for a master.
    Work {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value = "127.0.0.1:7878")]
        connect: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 1)]
        bunch_size: usize,
        #[arg(long, default_value_t = 10)]
        attempts: u32,
        #[arg(long, default_value_t = 500)]
        retry_ms: u64,
    },
    /// Insert replacement tables into expressions and interpolate the
    /// coefficients of the remaining master integrals.
    Insert {
        /// Expression file, or a directory of expression files.
        input: PathBuf,
        /// Threads.
        #[arg(short = 'p', default_value_t = 1)]
        threads: usize,
        /// Maximum bunch size.
        #[arg(long = "bs", default_value_t = 1)]
        bunch_size: usize,
        /// Sum all expressions of the input directory before insertion.
        #[arg(short = 'm')]
        merge: bool,
        /// Disable the factor scan.
        #[arg(long = "nfs")]
        no_factor_scan: bool,
        /// Write unsimplified coefficients to coefficients/ instead of
        /// interpolating.
        #[arg(long = "ni")]
        no_interpolation: bool,
        /// Save states to ff_save/ and resume from them.
        #[arg(short = 's')]
        save_states: bool,
        /// Directory holding config/ and replacements/; outputs go here too.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Accepts the single-dash long flags of the insertion tool (`-bs 4`).
fn normalize_args(args: Vec<OsString>) -> Vec<OsString> {
    let mut in_insert = false;
    args.into_iter()
        .map(|a| {
            if a == "insert" {
                in_insert = true;
            }
            match a.to_str() {
                Some(s @ ("-bs" | "-nfs" | "-ni")) if in_insert => OsString::from(format!("-{s}")),
                _ => a,
            }
        })
        .collect()
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = normalize_args(args.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Interpolate {
            source,
            out,
            run,
            save_state,
            resume,
        } => {
            let (names, programs) = load_source(&source)?;
            let cfg = RunConfig {
                save_state,
                resume,
                ..run.config()
            };
            let (unique, map) = deduplicate(&programs);
            let bb = ExpressionBlackBox::new(names.len(), unique);
            let result = reconstruct(&bb, &cfg);
            finish(result.map_err(Into::into), &names, &map, &out)
        }
        Command::Serve {
            source,
            out,
            run,
            listen,
            min_workers,
            worker_wait_secs,
            window,
        } => {
            let (names, programs) = load_source(&source)?;
            let (unique, map) = deduplicate(&programs);
            let bb = ExpressionBlackBox::new(names.len(), unique);
            let listener = TcpListener::bind(&listen).map_err(DistError::Io)?;
            info!("listening on {}", listener.local_addr().map_err(DistError::Io)?);
            let opts = MasterOptions {
                min_workers,
                worker_wait: Duration::from_secs(worker_wait_secs),
                window,
            };
            let result = run_master(&bb, &run.config(), listener, &opts);
            finish(result.map_err(Into::into), &names, &map, &out)
        }
        Command::Work {
            source,
            connect,
            threads,
            bunch_size,
            attempts,
            retry_ms,
        } => {
            let (names, programs) = load_source(&source)?;
            let (unique, _) = deduplicate(&programs);
            let bb = ExpressionBlackBox::new(names.len(), unique);
            let opts = WorkerOptions {
                threads,
                max_bunch_size: bunch_size,
                connect_attempts: attempts,
                retry_delay: Duration::from_millis(retry_ms),
                fail_after: None,
            };
            let stats = run_worker(&bb, &connect, &opts)?;
            info!("served {} requests, {} points", stats.requests, stats.points);
            Ok(())
        }
        Command::Gen {
            degree,
            seed,
            horner,
            output,
        } => {
            let form = if horner { PolyForm::Horner } else { PolyForm::Expanded };
            let text = gen_dense_poly(degree, seed, form);
            write_output(output.as_deref(), &format!("{text}\n"))
        }
        Command::Bench(args) => bench::execute(&args),
        Command::Insert {
            input,
            threads,
            bunch_size,
            merge,
            no_factor_scan,
            no_interpolation,
            save_states,
            dir,
            seed,
        } => {
            let cfg = InsertConfig::load(&dir.join("config"))?;
            let exprs = insert::prepare(&cfg, &dir.join("replacements"), &input, merge)?;
            let several = exprs.len() > 1;
            let run = RunConfig {
                n_threads: threads,
                max_bunch_size: bunch_size,
                enable_factor_scan: !no_factor_scan,
                seed,
                ..RunConfig::default()
            };
            run.validate()?;
            for (name, expr) in exprs {
                let masters = insert::master_coefficients(&cfg, &expr);
                if no_interpolation {
                    let mut target = dir.join("coefficients");
                    if several {
                        target.push(&name);
                    }
                    let files = insert::dump_coefficients(&masters, &target)?;
                    info!("{name}: wrote {} coefficient files", files.len());
                    continue;
                }
                let states = save_states.then(|| dir.join("ff_save").join(&name));
                let text = insert::interpolate_masters(&cfg, &masters, &run, states.as_deref())?;
                let out = dir.join(format!("out_{name}"));
                fs::write(&out, text).map_err(io_err(&out))?;
                info!("{name}: {} masters written to {}", masters.len(), out.display());
            }
            Ok(())
        }
    }
}

/// Reads and parses an expression file.
pub fn load_source(source: &SourceArgs) -> Result<(Vec<String>, Vec<PostfixProgram>), CliError> {
    let text = fs::read_to_string(&source.file).map_err(io_err(&source.file))?;
    let names = match &source.vars {
        Some(v) => v.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => identifiers(&text)?,
    };
    let programs = parse(&text, &names)?;
    if programs.is_empty() {
        return Err(CliError::Usage(format!("{}: no expressions", source.file.display())));
    }
    Ok((names, programs))
}

/// One canonical expression per line, each terminated by ';'.
pub fn result_text(fs: &[crate::ratinterp::RationalFunctionQ], names: &[String], map: &[usize]) -> String {
    map.iter().map(|&i| format!("{};\n", fs[i].to_text(names))).collect()
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn write_report(path: Option<&Path>, report: &RunReport) -> Result<(), CliError> {
    if let Some(p) = path {
        let json = serde_json::to_string_pretty(report).expect("report serializes");
        fs::write(p, json).map_err(io_err(p))?;
    }
    Ok(())
}

fn summary(report: &RunReport) -> String {
    format!(
        "{} probes, primes {:?}, {:.3} s wall, {:.3} s cpu",
        report.total_probes, report.primes_used, report.wall_seconds, report.cpu_seconds
    )
}

fn finish(
    result: Result<(Vec<crate::ratinterp::RationalFunctionQ>, RunReport), CliError>,
    names: &[String],
    map: &[usize],
    out: &OutputArgs,
) -> Result<(), CliError> {
    match result {
        Ok((fs, report)) => {
            write_output(out.output.as_deref(), &result_text(&fs, names, map))?;
            write_report(out.report.as_deref(), &report)?;
            eprintln!("{}", summary(&report));
            Ok(())
        }
        Err(e) => {
            let partial = match &e {
                CliError::Driver(DriverError::Exhausted { report, .. })
                | CliError::Dist(DistError::Driver(DriverError::Exhausted { report, .. })) => Some(report),
                _ => None,
            };
            if let Some(r) = partial {
                eprintln!("partial: {}", summary(r));
                write_report(out.report.as_deref(), r)?;
            }
            Err(e)
        }
    }
}
