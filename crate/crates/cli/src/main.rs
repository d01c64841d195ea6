use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use effortvib::body_model::{default_body_model, BodyModel};
use effortvib::pipeline::{run_pipeline, synth_from_effort_csv, RunOptions, WAV_FILE};
use effortvib::ErrorKind;

#[derive(Parser)]
#[command(name = "effortvib", version, about = "Pose-landmark traces to sense-of-effort vibration")]
struct Cli {
    /// The pipeline uses no random numbers; accepted for scripts that pass it explicitly.
    #[arg(long, global = true)]
    seed_free: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: trace to forces, effort, WAV and plots.
    Run(PipelineArgs),
    /// Stop after inverse dynamics and write the force CSV only.
    Forces(PipelineArgs),
    /// Render an effort CSV (`t`, `effort` columns) to a WAV file.
    Synth {
        #[arg(long)]
        effort: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Body-model utilities.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// `centroid` or a joint name, overriding the config.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    no_plots: bool,
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Validate a model file (the built-in model when omitted) and print its tree.
    Check {
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn exit_code(kind: ErrorKind) -> ExitCode {
    ExitCode::from(match kind {
        ErrorKind::Validation => 2,
        ErrorKind::Io => 3,
        ErrorKind::Numerical => 4,
    })
}

fn print_tree(model: &BodyModel, segment: usize, depth: usize) {
    let seg = &model.segments()[segment];
    println!(
        "{:indent$}{} (mass {:.3}, cog {:.3})",
        "",
        seg.name,
        seg.mass_ratio,
        seg.cog_ratio,
        indent = depth * 2
    );
    for &child in model.children(segment) {
        print_tree(model, child, depth + 1);
    }
}

fn run(cli: Cli) -> Result<(), (ErrorKind, String)> {
    match cli.command {
        Command::Run(args) => pipeline(args, false),
        Command::Forces(args) => pipeline(args, true),
        Command::Synth { effort, config, out } => {
            std::fs::create_dir_all(&out)
                .map_err(|e| (ErrorKind::Io, format!("{}: {e}", out.display())))?;
            let wav = out.join(WAV_FILE);
            let result = synth_from_effort_csv(&effort, &config, &wav).map_err(|e| (e.kind(), e.to_string()))?;
            println!(
                "wrote {} ({} samples at {} Hz)",
                wav.display(),
                result.waveform.samples.len(),
                result.waveform.sample_rate
            );
            Ok(())
        }
        Command::Model {
            command: ModelCommand::Check { model },
        } => {
            let model = match model {
                Some(path) => BodyModel::load(&path).map_err(|e| (e.kind(), e.to_string()))?,
                None => default_body_model(),
            };
            println!(
                "ok: {} segments, {} joints, mass ratios sum to {}",
                model.len(),
                model.len() - 1,
                model.total_mass_ratio()
            );
            print_tree(&model, model.root(), 0);
            Ok(())
        }
    }
}

fn pipeline(args: PipelineArgs, forces_only: bool) -> Result<(), (ErrorKind, String)> {
    let options = RunOptions {
        source: args.source,
        forces_only,
        skip_plots: args.no_plots,
    };
    let report = run_pipeline(&args.trace, &args.config, &args.out, &options)
        .map_err(|e| (e.kind(), e.to_string()))?;
    println!(
        "{} frames, valid frames {}..{}, peak {} force {:.1} N at t={:.3} s",
        report.input.frames,
        report.valid_range.start,
        report.valid_range.end,
        report.source,
        report.peak_force_n,
        report.peak_time_s
    );
    for path in &report.outputs {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((kind, message)) => {
            eprintln!("error: {message}");
            exit_code(kind)
        }
    }
}
