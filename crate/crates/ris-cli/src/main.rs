//! `ris`: synthesize, quantize, and optimize RIS phase masks, sweep their
//! far-field patterns, and reproduce the packaged analytical figures.

mod error;
mod export;
mod run;
mod spec;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::run::fmt6;
use crate::spec::{load_spec, ExperimentSpec, Mode};

#[derive(Debug, Args)]
struct CommonArgs {
    /// Experiment spec file (JSON).
    #[arg(long, value_name = "path")]
    spec: PathBuf,
    /// Overrides the seed in the spec.
    #[arg(long, value_name = "u64")]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, value_name = "dir", default_value = "out")]
    out: PathBuf,
    /// Skip SVG chart output.
    #[arg(long)]
    no_svg: bool,
}

#[derive(Debug, Parser)]
#[command(name = "ris", version, about = "RIS phase-mask synthesis, optimization, and pattern prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ideal continuous compensation mask and its pattern.
    Synthesize(CommonArgs),
    /// Nearest-state quantized mask and its pattern.
    Quantize(CommonArgs),
    /// Genetic-algorithm optimized mask and its pattern.
    Optimize(CommonArgs),
    /// Exhaustive-search optimal mask (small arrays) and its pattern.
    Exhaustive(CommonArgs),
    /// Pattern sweep using the mode configured in the spec.
    Pattern(CommonArgs),
    /// Reproduce a packaged figure bundle.
    Reproduce {
        /// Figure id: fig3a, fig4, or fig5.
        id: String,
        /// Seed for the figure's GA curves.
        #[arg(long, value_name = "u64", default_value_t = 1)]
        seed: u64,
        /// Output directory for artifacts.
        #[arg(long, value_name = "dir", default_value = "out")]
        out: PathBuf,
        /// Skip SVG chart output.
        #[arg(long)]
        no_svg: bool,
    },
    /// Write only the synthesized mask document.
    ExportMask(CommonArgs),
}

fn effective_spec(args: &CommonArgs, force_mode: Option<Mode>) -> Result<ExperimentSpec> {
    let mut spec = load_spec(&args.spec)?;
    if let Some(mode) = force_mode {
        spec.mode = mode;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    spec.validate()?;
    Ok(spec)
}

fn run_with_mode(args: &CommonArgs, force_mode: Option<Mode>) -> Result<()> {
    let spec = effective_spec(args, force_mode)?;
    let write_svg = !args.no_svg && spec.output.svg;
    let out_dir = spec.output.dir.as_ref().map(PathBuf::from).unwrap_or_else(|| args.out.clone());
    let manifest = run::run_experiment(&spec, &out_dir, write_svg)?;
    println!(
        "wrote {} artifacts to {} (gain at target {} dB, peak {} deg)",
        manifest.artifacts.len() + 1,
        out_dir.display(),
        fmt6(manifest.metrics.gain_at_target_db),
        fmt6(manifest.metrics.peak_theta_deg)
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synthesize(args) => run_with_mode(&args, Some(Mode::Continuous)),
        Command::Quantize(args) => run_with_mode(&args, Some(Mode::Quantize)),
        Command::Optimize(args) => run_with_mode(&args, Some(Mode::Ga)),
        Command::Exhaustive(args) => run_with_mode(&args, Some(Mode::Exhaustive)),
        Command::Pattern(args) => run_with_mode(&args, None),
        Command::Reproduce { id, seed, out, no_svg } => {
            let manifest = run::reproduce_figure(&id, &out, seed, !no_svg)?;
            println!(
                "wrote {} with {} curves to {}",
                manifest.artifacts.join(", "),
                manifest.curves.len(),
                out.display()
            );
            Ok(())
        }
        Command::ExportMask(args) => {
            let spec = effective_spec(&args, None)?;
            std::fs::create_dir_all(&args.out).map_err(error::CliError::io(&args.out))?;
            let path = args.out.join("mask.json");
            run::export_mask(&spec, &path)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
