use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stylodrift::pipeline::{exit_code, run, Command, PipelineConfig, SynthKind, EXIT_INPUT};
use stylodrift::report::Format;

#[derive(Parser)]
#[command(name = "stylodrift", version, about = "Stylometric drift reports from document corpora")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Skip degenerate documents instead of failing.
    #[arg(long, global = true)]
    skip_bad: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Documents JSONL, overriding input.documents.
    #[arg(long, global = true)]
    documents: Option<PathBuf>,
    /// Rewrites JSONL, overriding input.rewrites.
    #[arg(long, global = true)]
    rewrites: Option<PathBuf>,
    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthArg {
    Shock,
    Trait,
    Compare,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-document complexity features and composite scores.
    Features,
    /// Monthly variance series, growth model and Granger tests.
    Trend,
    /// Levene comparisons between originals and rewrites.
    Compare,
    /// Embedding similarity and rating agreement.
    Similarity,
    /// Trait-prediction erosion experiments.
    Traits {
        /// Trait label to test; repeatable, overrides traits.names.
        #[arg(long = "trait")]
        names: Vec<String>,
    },
    /// Dictionary-category association batteries.
    Lexicon {
        /// Lexicon file; repeatable, overrides input.lexicons.
        #[arg(long = "lexicon")]
        lexicons: Vec<PathBuf>,
        /// Trait label to test; repeatable, overrides lexicon.traits.
        #[arg(long = "trait")]
        traits: Vec<String>,
        /// Use the bundled demonstration lexicon.
        #[arg(long)]
        demo: bool,
    },
    /// Generate a synthetic corpus.
    Synth {
        #[arg(long, value_enum)]
        kind: Option<SynthArg>,
    },
}

fn configure(cli: &Cli) -> stylodrift::Result<(Command, PipelineConfig)> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = std::path::absolute(o).unwrap_or_else(|_| o.clone());
    }
    if cli.skip_bad {
        cfg.skip_bad = true;
    }
    if let Some(f) = cli.format {
        cfg.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    let abs = |p: &PathBuf| std::path::absolute(p).unwrap_or_else(|_| p.clone());
    if let Some(d) = &cli.documents {
        cfg.input.documents = Some(abs(d));
    }
    if let Some(r) = &cli.rewrites {
        cfg.input.rewrites = Some(abs(r));
    }
    let command = match &cli.command {
        Cmd::Features => Command::Features,
        Cmd::Trend => Command::Trend,
        Cmd::Compare => Command::Compare,
        Cmd::Similarity => Command::Similarity,
        Cmd::Traits { names } => {
            if !names.is_empty() {
                cfg.traits.names = names.clone();
            }
            Command::Traits
        }
        Cmd::Lexicon { lexicons, traits, demo } => {
            if !lexicons.is_empty() {
                cfg.input.lexicons = lexicons.iter().map(abs).collect();
            }
            if !traits.is_empty() {
                cfg.lexicon.traits = traits.clone();
            }
            cfg.lexicon.use_demo |= *demo;
            Command::Lexicon
        }
        Cmd::Synth { kind } => {
            if let Some(k) = kind {
                cfg.synth.kind = match k {
                    SynthArg::Shock => SynthKind::Shock,
                    SynthArg::Trait => SynthKind::Trait,
                    SynthArg::Compare => SynthKind::Compare,
                };
            }
            Command::Synth
        }
    };
    Ok((command, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let (command, cfg) = match configure(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    match run(command, &cfg) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
