use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fflab::harness::{exponent_table, find, oracle_constant, registry, BaselineStore, Params, Runner, Status, SweepSpec};
use fflab::{Error, Result};

#[derive(Parser)]
#[command(name = "fflab", about = "Finite field restriction and Kakeya experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered scenarios.
    List,
    /// Run one scenario and print its JSON report.
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        prime: Option<u32>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_timing: bool,
        /// Baseline file to judge against (defaults to the built-in one).
        #[arg(long)]
        baselines: Option<PathBuf>,
    },
    /// Run the cross product of scenarios, primes and dimensions.
    Sweep {
        /// Comma-separated ids, or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        ids: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for report.json and summary.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        baselines: Option<PathBuf>,
    },
    /// Recompute tracked constants from their oracles.
    Baseline {
        #[arg(long, required = true)]
        regen: bool,
        /// Comma-separated ids; all tracked scenarios when omitted.
        #[arg(long, value_delimiter = ',')]
        ids: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the exponent table.
    Table {
        #[arg(long)]
        json: bool,
    },
}

fn runner(baselines: Option<PathBuf>, no_timing: bool) -> Result<Runner> {
    let store = match baselines {
        Some(path) => BaselineStore::load(&path)?,
        None => BaselineStore::embedded()?,
    };
    let mut r = Runner::new(store)?;
    r.timing = !no_timing;
    Ok(r)
}

fn write_or_print(out: Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|source| Error::Io { path, source }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn default_baseline_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("baselines.json")
}

fn main_inner(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::List => {
            for sc in registry() {
                println!("{:<7} {:<16} {}", sc.id, sc.kind, sc.anchor);
            }
            Ok(true)
        }
        Command::Run {
            scenario,
            prime,
            dim,
            trials,
            seed,
            out,
            no_timing,
            baselines,
        } => {
            let sc = find(&scenario)?;
            let d = sc.default_params();
            let params = Params {
                prime: prime.unwrap_or(d.prime),
                dim: dim.unwrap_or(d.dim),
                trials: trials.unwrap_or(d.trials),
            };
            let report = runner(baselines, no_timing)?.run(&scenario, params, seed)?;
            write_or_print(out, &report.to_json())?;
            Ok(report.status != Status::Fail)
        }
        Command::Sweep {
            ids,
            primes,
            dims,
            trials,
            seed,
            out_dir,
            no_timing,
            baselines,
        } => {
            let ids = if ids.iter().any(|i| i == "all") {
                registry().iter().map(|s| s.id.to_string()).collect()
            } else {
                ids
            };
            let spec = SweepSpec {
                ids,
                primes,
                dims,
                trials,
                seed,
            };
            let sweep = runner(baselines, no_timing)?.sweep(&spec)?;
            match out_dir {
                Some(dir) => sweep.write(&dir)?,
                None => println!("{}", sweep.to_json()),
            }
            let s = sweep.summary();
            eprintln!(
                "pass {} fail {} report-only {} skipped {}",
                s.pass, s.fail, s.report_only, s.skipped
            );
            Ok(!sweep.failed())
        }
        Command::Baseline { regen: _, ids, out } => {
            let path = out.unwrap_or_else(default_baseline_path);
            let mut store = if path.exists() {
                BaselineStore::load(&path)?
            } else {
                BaselineStore::default()
            };
            let ids: Vec<String> = match ids {
                Some(ids) => ids,
                None => registry()
                    .iter()
                    .filter(|s| s.oracle.is_some())
                    .map(|s| s.id.to_string())
                    .collect(),
            };
            for id in &ids {
                let entry = oracle_constant(id)?;
                eprintln!("{id}: {}", entry.constant);
                store.insert(id, entry);
            }
            store.save(&path)?;
            Ok(true)
        }
        Command::Table { json } => {
            let t = exponent_table()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&t)?);
            } else {
                print!("{t}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
