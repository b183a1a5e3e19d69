use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lab::{LabError, LabResult, RunResult, Scenario};

#[derive(Parser)]
#[command(name = "lab", version, about = "Hyperspace entropy experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and write its outputs.
    Run {
        scenario: String,
        /// JSON config; the built-in default when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List scenarios with the statements they test.
    List,
    /// Run the exact and structural suites with their default configs.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn pool(threads: Option<usize>) -> LabResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(LabError::config("--threads", "must be at least 1"));
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| LabError::Invariant(format!("thread pool: {e}")))
}

fn report(r: &RunResult) {
    for v in &r.verdicts {
        println!("{} {}/{}: {} (measured {})", if v.pass { "PASS" } else { "FAIL" }, r.scenario, v.name, v.expected, v.measured);
    }
}

fn run(cli: Cli) -> LabResult<bool> {
    match cli.cmd {
        Cmd::List => {
            for s in lab::ALL {
                println!("{:<18} {}", s.name(), s.citation());
            }
            Ok(true)
        }
        Cmd::Run { scenario, config, out, seed, threads } => {
            let s = Scenario::parse(&scenario)?;
            let text = match config {
                Some(path) => std::fs::read_to_string(&path)
                    .map_err(|e| LabError::config("", format!("cannot read {}: {e}", path.display())))?,
                None => s.default_config().to_string(),
            };
            let r = pool(threads)?.install(|| lab::run(s, &text, seed, &out))?;
            println!("# {}: {}", r.scenario, r.citation);
            report(&r);
            Ok(r.pass)
        }
        Cmd::Selftest { out, threads } => {
            let root = out.unwrap_or_else(|| std::env::temp_dir().join(format!("lab-selftest-{}", std::process::id())));
            let pool = pool(threads)?;
            let mut pass = true;
            for s in lab::SELFTEST {
                let r = pool.install(|| lab::run(s, s.default_config(), None, &root.join(s.name())))?;
                report(&r);
                pass &= r.pass;
            }
            println!("outputs in {}", root.display());
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
