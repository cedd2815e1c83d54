use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use gevrey_prandtl::harness::{compare_damping, decay_report};
use gevrey_prandtl::io;
use gevrey_prandtl::solver::{run, RunConfig};
use gevrey_prandtl::suite::{run_suite, SuiteKind};
use gevrey_prandtl::toy::{run_toy, ToyConfig};

#[derive(Parser)]
#[command(name = "gevrey-lab", about = "Damped magnetic Prandtl lab with Gevrey-2 norm monitoring")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the Prandtl system and write timeseries.csv + meta.json
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate the hyperbolic toy model
    Toy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a pinned verification suite; nonzero exit on any failed criterion
    Suite {
        #[arg(value_enum)]
        kind: SuiteKind,
        /// Optional; the suites carry their own pinned configurations
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Paired damped/undamped runs from identical data
    CompareDamping {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn real_main() -> anyhow::Result<bool> {
    match Cli::parse().cmd {
        Cmd::Run { config, out } => {
            let cfg: RunConfig = io::read_json(&config)?;
            match run(&cfg) {
                Ok(traj) => {
                    io::write_run(&out, &traj, "completed")?;
                    let d = decay_report(&traj.norms(), &cfg.params);
                    println!(
                        "completed: {} samples, max e^(t/4)|a|_X = {:e} (bound {:e})",
                        traj.samples.len(),
                        d.max_scaled_x,
                        d.bound
                    );
                    Ok(true)
                }
                Err(fail) => {
                    io::write_run(&out, &fail.partial, &format!("failed: {}", fail.error))?;
                    Err(anyhow::Error::new(fail.error)).context("run stopped early; partial output written")
                }
            }
        }
        Cmd::Toy { config, out } => {
            let cfg: ToyConfig = io::read_json(&config)?;
            let traj = run_toy(&cfg)?;
            io::write_toy(&out, &traj)?;
            println!("completed: {} samples", traj.rows.len());
            Ok(true)
        }
        Cmd::Suite { kind, config, out } => {
            if let Some(c) = config {
                eprintln!("note: suite {} uses pinned configs; ignoring {}", kind.name(), c.display());
            }
            let report = run_suite(kind, Some(&out))?;
            for c in &report.criteria {
                println!("{}", c.line());
            }
            Ok(report.passed())
        }
        Cmd::CompareDamping { config, out } => {
            let cfg: RunConfig = io::read_json(&config)?;
            let cmp = compare_damping(&cfg);
            io::write_comparison(&out, &cfg, &cmp)?;
            println!(
                "final L2 ratio {:e}, final X ratio {:e}, undamped arm {}",
                cmp.final_l2_ratio,
                cmp.final_x_ratio,
                if cmp.undamped.completed { "completed" } else { "diverged" }
            );
            Ok(true)
        }
    }
}
