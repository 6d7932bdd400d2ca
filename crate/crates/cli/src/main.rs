use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rsbench_core::dataset::DatasetFormat;
use rsbench_core::harness::{self, ExperimentSpec};
use rsbench_core::provider::{build_provider, ProviderKind};

#[derive(Parser)]
#[command(name = "rsbench", version, about = "Multiobjective prompt optimization for LLM-based session recommendation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a raw dataset and write its cache.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Item metadata file (review-jsonl only).
        #[arg(long)]
        metadata: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "dataset")]
        name: String,
    },
    /// Execute every run of a spec over its seeds, skipping completed cells.
    Run(SpecArgs),
    /// Evaluate final prompts on validation sessions.
    Validate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Validation samples per prompt (default from the spec).
        #[arg(long)]
        n_val: Option<usize>,
    },
    /// Summarize completed runs into tables and scatter files.
    Report {
        #[arg(long, conflicts_with = "runs")]
        spec: Option<PathBuf>,
        /// Experiment output directory.
        #[arg(long)]
        runs: Option<PathBuf>,
        /// Report directory (default: <runs>/report).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print an experiment spec with every default filled in.
    Spec {
        /// The offline synthetic spec instead of the nine-problem protocol.
        #[arg(long)]
        synthetic: bool,
    },
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum)]
    provider: Option<ProviderArg>,
    /// Comma-separated seed list overriding the spec.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Output directory overriding the spec.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SpecArgs {
    fn load(&self) -> Result<ExperimentSpec> {
        let mut spec = harness::load_spec(&self.spec)?;
        if let Some(p) = self.provider {
            spec.provider.kind = match p {
                ProviderArg::Mock => ProviderKind::Mock,
                ProviderArg::Http => ProviderKind::Http,
            };
        }
        if let Some(seeds) = &self.seeds {
            spec.seeds = seeds.clone();
        }
        if let Some(out) = &self.out {
            spec.output_dir = out.clone();
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    RatingsDelimited,
    ReviewJsonl,
    BundleCsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderArg {
    Mock,
    Http,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Ingest { input, format, metadata, out, name } => {
            let format = match format {
                FormatArg::RatingsDelimited => DatasetFormat::RatingsDelimited,
                FormatArg::ReviewJsonl => DatasetFormat::ReviewJsonl,
                FormatArg::BundleCsv => DatasetFormat::BundleCsv,
            };
            let stats = harness::cmd_ingest(&input, format, metadata.as_deref(), &out, &name)?;
            println!("dataset\titems\tsessions\tavg_length\tdensity");
            println!(
                "{name}\t{}\t{}\t{:.2}\t{:.2}",
                stats.items, stats.sessions, stats.avg_session_length, stats.density_indicator
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            let spec = args.load()?;
            let provider = build_provider(&spec.provider)?;
            let summary = harness::cmd_run(&spec, provider.as_ref())?;
            for c in &summary.completed {
                println!("completed {c}");
            }
            for c in &summary.skipped {
                println!("skipped {c} (already complete)");
            }
            for (c, e) in &summary.failed {
                eprintln!("failed {c}: {e}");
            }
            println!(
                "{} completed, {} skipped, {} failed",
                summary.completed.len(),
                summary.skipped.len(),
                summary.failed.len()
            );
            Ok(if summary.failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Validate { spec, n_val } => {
            let spec = spec.load()?;
            let n_val = n_val.unwrap_or(spec.report.validation_samples);
            let provider = build_provider(&spec.provider)?;
            let summary = harness::cmd_validate(&spec, n_val, provider.as_ref())?;
            for f in &summary.flagged {
                eprintln!("flagged {f}");
            }
            println!(
                "{} cells validated on {n_val} samples, {} prompts flagged, {} cells not yet run",
                summary.validated.len(),
                summary.flagged.len(),
                summary.missing.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { spec, runs, out } => {
            let (root, source) = match (spec, runs) {
                (Some(path), _) => {
                    let spec = harness::load_spec(&path)?;
                    (spec.output_dir, spec.report.scatter_source)
                }
                (None, Some(dir)) => (dir, Default::default()),
                (None, None) => bail!("pass --spec or --runs"),
            };
            let out = out.unwrap_or_else(|| root.join("report"));
            let table = harness::cmd_report(&root, &out, source)
                .with_context(|| format!("reporting on {}", root.display()))?;
            print!("{}", table.hv_tsv());
            println!("report written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Spec { synthetic } => {
            let spec = if synthetic { ExperimentSpec::synthetic_demo() } else { ExperimentSpec::rsbench_protocol() };
            print!("{}", spec.to_toml());
            Ok(ExitCode::SUCCESS)
        }
    }
}
