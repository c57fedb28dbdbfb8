use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use greencache_cli::{run, ConfigError, Convention, ExperimentConfig, Format, Kind, EXIT_CONFIG, EXIT_VALIDATION};

#[derive(Parser)]
#[command(name = "greencache", version, about = "Cache-enabled PPP network power and energy-efficiency experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// APC against transmit power under the QoS-boundary density.
    ApcSweep(Common),
    /// EE against transmit power at fixed density.
    EeSweep(Common),
    /// APC minimizers and EE maximizers, closed form against numeric.
    Optimize(Common),
    /// Monte Carlo cross-check of coverage, hit rate, APC and EE.
    McValidate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Paper,
    Derived,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    /// Base preset: fig2, fig3, fig4, optimize or mc (default depends on the subcommand).
    #[arg(long)]
    preset: Option<String>,
    /// Config file of `key = value` lines; any earlier output file also works.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` settings, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// Output format for reports; sweeps are always CSV.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(kind: Kind, args: &Common) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match &args.preset {
        Some(name) => ExperimentConfig::preset(name)?,
        None => ExperimentConfig::for_kind(kind),
    };
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        cfg.apply_text(&text)?;
    }
    for s in &args.set {
        cfg.apply_override(s)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(c) = args.convention {
        cfg.convention = match c {
            ConventionArg::Paper => Convention::Paper,
            ConventionArg::Derived => Convention::Derived,
            ConventionArg::Literal => Convention::Literal,
        };
    }
    cfg.kind = kind;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::ApcSweep(a) => (Kind::ApcSweep, a),
        Command::EeSweep(a) => (Kind::EeSweep, a),
        Command::Optimize(a) => (Kind::Optimize, a),
        Command::McValidate(a) => (Kind::McValidate, a),
    };
    let format = args.format.map(|f| match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Text => Format::Text,
    });
    let output = match build_config(kind, args).and_then(|cfg| run(&cfg, format)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let written = match &args.out {
        Some(path) => fs::write(path, &output.text).map_err(|e| (path.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(output.text.as_bytes())
            .map_err(|e| ("stdout".to_string(), e)),
    };
    if let Err((path, e)) = written {
        let err = ConfigError::Io {
            path,
            reason: e.to_string(),
        };
        eprintln!("{}", err.machine_line());
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    if output.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("error kind=validation_failed exit={EXIT_VALIDATION} message=\"one or more checks failed\"");
        ExitCode::from(EXIT_VALIDATION as u8)
    }
}
