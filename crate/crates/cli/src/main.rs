//! `dynwalk`: command-line driver for the simulator.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynwalk_core::graph::GraphSchedule;
use dynwalk_core::harness::{
    run_experiment, write_artifacts, Algorithm, ExperimentConfig, HarnessError, RunReport,
};

#[derive(Parser)]
#[command(
    name = "dynwalk",
    version,
    about = "Random walks, gossip and mixing-time estimation on evolving graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured experiment sweep.
    Run(RunArgs),
    /// Print the resolved configuration in file form.
    Config(RunArgs),
    /// Write the first rounds of a schedule as JSON Lines.
    Schedule {
        #[arg(long)]
        schedule: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        rounds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    algo: Option<String>,
    /// `oracle`, `worstcase` or an integer.
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    lambda_c: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    seed_base: Option<String>,
    #[arg(long)]
    bandwidth: Option<String>,
    /// `strict` or `queue`.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    /// Lemma-suite scope: `all`, `spectral` or `walks`.
    #[arg(long)]
    suite: Option<String>,
    /// Output directory for artifacts.
    #[arg(long)]
    out: Option<String>,
    /// Compare against dense oracles (n ≤ 512).
    #[arg(long)]
    oracle: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::parse(
                &fs::read_to_string(path)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?,
            )?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("schedule", &self.schedule),
            ("algo", &self.algo),
            ("tau", &self.tau),
            ("lambda_c", &self.lambda_c),
            ("k", &self.k),
            ("seeds", &self.seeds),
            ("seed_base", &self.seed_base),
            ("bandwidth", &self.bandwidth),
            ("policy", &self.policy),
            ("phi", &self.phi),
            ("suite", &self.suite),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                c.set(key, v)?;
            }
        }
        if self.oracle {
            c.oracle = true;
        }
        c.validate()?;
        Ok(c)
    }
}

fn summarize(report: &RunReport) -> String {
    let mut lines = Vec::new();
    if let Some(lemmas) = &report.lemmas {
        for c in &lemmas.checks {
            lines.push(format!(
                "{} {}: {}/{} violations, margin {:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.violations,
                c.instances,
                c.margin
            ));
        }
    }
    for a in &report.aggregates {
        lines.push(format!(
            "k={} seeds={} rounds median={} q10={} q90={}",
            a.k, a.seeds, a.rounds_median, a.rounds_q10, a.rounds_q90
        ));
    }
    if let Some(o) = &report.oracle {
        lines.push(format!(
            "oracle: {}",
            serde_json::to_string(o).unwrap_or_default()
        ));
    }
    lines.join("\n")
}

fn run(args: &RunArgs) -> Result<bool, HarnessError> {
    let config = args.resolve()?;
    let report = run_experiment(&config)?;
    match &config.out {
        Some(dir) => {
            for p in write_artifacts(&report, Path::new(dir))? {
                eprintln!("wrote {}", p.display());
            }
        }
        None if config.algo != Algorithm::LemmaSuite => {
            serde_json::to_writer_pretty(io::stdout().lock(), &report)?;
            println!();
        }
        None => {}
    }
    eprintln!("{}", summarize(&report));
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Config(args) => args.resolve().map(|c| {
            print!("{}", c.to_text());
            true
        }),
        Command::Schedule {
            schedule,
            seed,
            rounds,
            out,
        } => GraphSchedule::parse(schedule, *seed)
            .and_then(|s| match out {
                Some(path) => s.write_jsonl(*rounds, BufWriter::new(fs::File::create(path)?)),
                None => s.write_jsonl(*rounds, io::stdout().lock()),
            })
            .map(|()| true)
            .map_err(HarnessError::from),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let _ = io::stderr().flush();
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
