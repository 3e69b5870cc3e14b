//! Benchmark suites. Probe counts are the comparison that matters; timings
//! depend on the machine and can be left out for reproducible output.

use std::time::Instant;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::suites::{factor_suite, racing_suite, BenchFunction};
use super::CliError;
use crate::driver::{gen_dense_poly, monomial_count, reconstruct, ExpressionBlackBox, PolyForm, RunConfig, GEN_VARS};
use crate::numtheory::PRIMES;
use crate::numtheory::PrimeField;
use crate::parser::parse;
use crate::polyinterp::RaceMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Newton-only against racing.
    Racing,
    /// The hybrid racer on the sparse and dense test functions.
    Hybrid,
    /// With and without the factor scan.
    Factor,
    /// Plain against pre-evaluated parsing and evaluation.
    Parser,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    pub suite: Suite,
    /// Only these functions (by name, e.g. f2).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 1)]
    pub bunch_size: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Degrees of the generated polynomials (parser suite).
    #[arg(long, value_delimiter = ',', default_value = "92")]
    pub degrees: Vec<u32>,
    /// Evaluations per timing (parser suite).
    #[arg(long, default_value_t = 10)]
    pub evaluations: usize,
    /// Leave out timing columns.
    #[arg(long)]
    pub no_timings: bool,
    /// Write only the tab separated table to stdout.
    #[arg(long)]
    pub tsv: bool,
}

/// A result table with named columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut s = self.header.join("\t");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join("\t"));
            s.push('\n');
        }
        s
    }

    pub fn to_human(&self) -> String {
        let w: Vec<usize> = (0..self.header.len())
            .map(|c| self.rows.iter().map(|r| r[c].len()).chain([self.header[c].len()]).max().unwrap())
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&w).map(|(c, w)| format!("{c:>w$}")).collect();
            format!("{}\n", padded.join(" | ").trim_end())
        };
        let mut s = line(&self.header);
        s.push_str(&w.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&line(r));
        }
        s
    }
}

fn secs(t: f64) -> String {
    format!("{t:.3}")
}

struct Measured {
    probes: usize,
    scan_probes: usize,
    seconds: f64,
}

fn measure(f: &BenchFunction, cfg: &RunConfig) -> Result<Measured, CliError> {
    let names = f.var_names();
    let bb = ExpressionBlackBox::new(f.n_vars, parse(&f.source, &names)?);
    let (_, rep) = reconstruct(&bb, cfg)?;
    Ok(Measured {
        probes: rep.total_probes,
        scan_probes: rep.functions.iter().map(|r| r.factor_scan_probes).sum(),
        seconds: rep.wall_seconds,
    })
}

fn selected(args: &BenchArgs, fs: Vec<BenchFunction>) -> Vec<BenchFunction> {
    fs.into_iter()
        .filter(|f| args.only.is_empty() || args.only.iter().any(|o| o == f.name))
        .collect()
}

/// Runs one suite.
pub fn run_suite(args: &BenchArgs) -> Result<Table, CliError> {
    let timed = !args.no_timings;
    let base = RunConfig {
        n_threads: args.threads,
        max_bunch_size: args.bunch_size,
        seed: args.seed,
        ..RunConfig::default()
    };
    base.validate()?;
    // the racing and hybrid comparisons use the shift scan but no factor scan
    let plain = RunConfig {
        enable_factor_scan: false,
        ..base.clone()
    };
    let with_time = |cols: &[&'static str], time_cols: &[&'static str]| {
        let mut all = cols.to_vec();
        if timed {
            all.extend_from_slice(time_cols);
        }
        Table::new(&all)
    };
    match args.suite {
        Suite::Racing => {
            let mut t = with_time(
                &["function", "newton_probes", "racing_probes"],
                &["newton_seconds", "racing_seconds"],
            );
            let fs: Vec<_> = racing_suite().into_iter().take(3).collect();
            for f in selected(args, fs) {
                let newton = measure(
                    &f,
                    &RunConfig {
                        race_mode: RaceMode::NewtonOnly,
                        ..plain.clone()
                    },
                )?;
                let race = measure(&f, &plain)?;
                let mut row = vec![f.name.to_string(), newton.probes.to_string(), race.probes.to_string()];
                if timed {
                    row.extend([secs(newton.seconds), secs(race.seconds)]);
                }
                t.rows.push(row);
            }
            Ok(t)
        }
        Suite::Hybrid => {
            let mut t = with_time(&["function", "probes"], &["seconds"]);
            for f in selected(args, racing_suite()) {
                let m = measure(&f, &plain)?;
                let mut row = vec![f.name.to_string(), m.probes.to_string()];
                if timed {
                    row.push(secs(m.seconds));
                }
                t.rows.push(row);
            }
            Ok(t)
        }
        Suite::Factor => {
            let mut t = with_time(
                &["function", "probes_without_scan", "probes_with_scan", "probes_for_scan"],
                &["seconds_without_scan", "seconds_with_scan"],
            );
            for f in selected(args, factor_suite()) {
                let off = measure(&f, &plain)?;
                let on = measure(&f, &base)?;
                let mut row = vec![
                    f.name.to_string(),
                    off.probes.to_string(),
                    on.probes.to_string(),
                    on.scan_probes.to_string(),
                ];
                if timed {
                    row.extend([secs(off.seconds), secs(on.seconds)]);
                }
                t.rows.push(row);
            }
            Ok(t)
        }
        Suite::Parser => parser_suite(args),
    }
}

fn parser_suite(args: &BenchArgs) -> Result<Table, CliError> {
    let timed = !args.no_timings;
    let mut cols = vec!["degree", "form", "monomials", "identical"];
    if timed {
        cols.extend([
            "parse_seconds",
            "evaluate_seconds",
            "pre_evaluate_parse_seconds",
            "pre_evaluate_seconds",
        ]);
    }
    let mut t = Table::new(&cols);
    let names: Vec<String> = GEN_VARS.iter().map(|s| s.to_string()).collect();
    let field = PrimeField::new(PRIMES[0])?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for &d in &args.degrees {
        for (form, label) in [(PolyForm::Expanded, "expanded"), (PolyForm::Horner, "horner")] {
            let src = gen_dense_poly(d, args.seed, form);
            let t0 = Instant::now();
            let prog = parse(&src, &names)?.remove(0);
            let parse_s = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            let pre = prog.precompute(field)?;
            let pre_s = parse_s + t0.elapsed().as_secs_f64();
            let points: Vec<Vec<u64>> = (0..args.evaluations.max(1))
                .map(|_| (0..3).map(|_| rng.gen_range(1..field.p())).collect())
                .collect();
            let t0 = Instant::now();
            let plain: Vec<_> = points.iter().map(|p| prog.evaluate(field, p)).collect();
            let eval_s = t0.elapsed().as_secs_f64() / points.len() as f64;
            let t0 = Instant::now();
            let fast: Vec<_> = points.iter().map(|p| pre.evaluate(p)).collect();
            let pre_eval_s = t0.elapsed().as_secs_f64() / points.len() as f64;
            let mut row = vec![
                d.to_string(),
                label.to_string(),
                monomial_count(d).to_string(),
                if plain == fast { "yes" } else { "no" }.to_string(),
            ];
            if timed {
                row.extend([secs(parse_s), format!("{eval_s:.6}"), secs(pre_s), format!("{pre_eval_s:.6}")]);
            }
            t.rows.push(row);
        }
    }
    Ok(t)
}

pub fn execute(args: &BenchArgs) -> Result<(), CliError> {
    let t = run_suite(args)?;
    if args.tsv {
        print!("{}", t.to_tsv());
    } else {
        print!("{}\n{}", t.to_human(), t.to_tsv());
    }
    Ok(())
}
