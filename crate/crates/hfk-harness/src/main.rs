use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hfk_harness::batch::{self, BatchOptions, Cache, Status};
use hfk_harness::error::{read_grid, HarnessError};
use hfk_core::pipeline::Truncation;
use hfk_harness::golden;
use hfk_harness::report::KnotReport;
use hfk_harness::run::RunOptions;
use hfk_harness::simplify::simplify;
use hfk_harness::verify::{two_bridge_check, verify, VerifyOptions};

#[derive(Parser)]
#[command(name = "cyclic-hfk", version, about = "Knot Floer homology of lifted knots in cyclic branched covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the per-class homology of one grid.
    Compute {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        m: usize,
        /// Report gradings relative to the lifted identity generator.
        #[arg(long)]
        relative_maslov: bool,
        /// Treat the complex as a single block, without the spin^c splitting.
        #[arg(long)]
        no_spinc_split: bool,
        /// Compute every Alexander grading and class directly.
        #[arg(long)]
        full: bool,
        /// Directory for the JSON report and the result cache.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Generators kept in memory before spilling to disk.
        #[arg(long)]
        memory_budget: Option<usize>,
        #[arg(long)]
        spill_dir: Option<PathBuf>,
    },
    /// Run the consistency checks on one grid.
    Verify {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Also compare the canonical class with the knot downstairs (two-bridge knots).
        #[arg(long)]
        two_bridge: bool,
    },
    /// Compare the double branched cover computation with the reference table.
    Golden {
        #[arg(long)]
        knot: String,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute every grid listed in a file.
    Batch {
        #[arg(long)]
        list: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        resume: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Search translations and commutations for a grid with a smaller complex.
    Simplify {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 20_000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn name_of(path: &Path) -> Option<String> {
    Some(batch::knot_name(path))
}

fn compute_report(
    grid_path: &Path,
    options: RunOptions,
    out: Option<&Path>,
) -> Result<KnotReport, HarnessError> {
    let grid = read_grid(grid_path)?;
    let cache = out.map(|o| Cache::open(o.join("cache"))).transpose()?;
    let (report, _) = batch::compute_cached(&grid, name_of(grid_path), &options, cache.as_ref(), true)?;
    if let Some(dir) = out {
        let file = dir.join(format!("{}.m{}.json", batch::knot_name(grid_path), options.m));
        batch::write_atomic(&file, &report.to_json())?;
    }
    Ok(report)
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Compute { grid, m, relative_maslov, no_spinc_split, full, out, memory_budget, spill_dir } => {
            let parsed = read_grid(&grid)?;
            let mut options = RunOptions::auto(&parsed, m);
            if full {
                options.compute.truncation = Truncation::None;
                options.compute.mirror_conjugates = false;
            }
            if no_spinc_split {
                options = options.without_spin_split();
            }
            options.relative_maslov = relative_maslov;
            if let Some(b) = memory_budget {
                options.compute.memory_budget = b;
            }
            options.compute.spill_dir = spill_dir;
            let report = compute_report(&grid, options, out.as_deref())?;
            print!("{}", report.render_table());
            if let Some(reason) = &report.diagnostics.normalization {
                eprintln!("note: gradings are relative ({reason})");
            }
            Ok(())
        }
        Command::Verify { grid, m, samples, two_bridge } => {
            let parsed = read_grid(&grid)?;
            let mut result = verify(&parsed, m, &VerifyOptions { samples, ..Default::default() });
            if two_bridge {
                result.checks.push(two_bridge_check(&parsed));
            }
            print!("{}", result.render());
            if result.passed() {
                Ok(())
            } else {
                Err(HarnessError::Verification(format!("{} check(s) failed", result.checks.iter().filter(|c| !c.passed).count())))
            }
        }
        Command::Golden { knot, grid, out } => {
            let row = golden::lookup(&knot).ok_or_else(|| HarnessError::Usage(format!("no reference table for `{knot}`")))?;
            let parsed = read_grid(&grid)?;
            let report = compute_report(&grid, RunOptions::auto(&parsed, 2), out.as_deref())?;
            print!("{}", report.render_table());
            let result = golden::compare(row, &report.h1, &report.class_polynomials());
            println!("{}", serde_json::to_string_pretty(&result).expect("serializable"));
            if result.passed() {
                println!("{knot}: matches");
                Ok(())
            } else {
                Err(HarnessError::Verification(format!("{knot} differs from the reference table")))
            }
        }
        Command::Batch { list, m, out, resume, jobs } => {
            let summary = batch::batch_run(&list, &BatchOptions { m, out, resume, jobs, relative_maslov: false })?;
            for e in &summary.entries {
                let status = match e.status {
                    Status::Computed => "computed",
                    Status::Cached => "cached",
                    Status::Failed => "FAILED",
                };
                println!("{:<12} {status:<9} {}", e.name, e.error.as_deref().unwrap_or(""));
            }
            let failed = summary.count(Status::Failed);
            if failed > 0 {
                Err(HarnessError::Usage(format!("{failed} grid(s) failed")))
            } else {
                Ok(())
            }
        }
        Command::Simplify { grid, m, steps, seed } => {
            let parsed = read_grid(&grid)?;
            let s = simplify(&parsed, m, steps, seed);
            eprintln!("estimated truncated generators: {:.3e} -> {:.3e}", s.initial_cost, s.cost);
            print!("{}", s.grid.to_text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
