use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use wvasim_cli::config::{merge_overrides, parse_config};
use wvasim_cli::emit::{render, Format};
use wvasim_cli::presets::Preset;
use wvasim_cli::run::{run, Command};
use wvasim_cli::CliError;

const OUT_DIR_ENV: &str = "WVASIM_OUT_DIR";

/// Weak-value amplification tilt-measurement simulator.
#[derive(Debug, Parser)]
#[command(name = "wvasim", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Configuration document (`key = value` lines with units).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named scenario used as the base for every key.
    #[arg(long, value_parser = |s: &str| s.parse::<Preset>())]
    preset: Option<Preset>,
    /// Overrides the random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file. Defaults to `$WVASIM_OUT_DIR/<command>.<format>`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Extra `key=value` setting applied after the document. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn execute(args: Args) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| io_error(path, e))?,
        None => String::new(),
    };
    let mut overrides = args.overrides.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    let text = merge_overrides(&text, &overrides)?;
    let cfg = parse_config(&text, args.preset)?;
    log::info!("running {} with preset {}", args.command.name(), cfg.preset);

    let result = run(args.command, &cfg)?;
    for (k, v) in &result.scalars {
        log::info!("{k} = {v}");
    }
    let body = render(&result, args.format)?;

    let target = args.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(|dir| PathBuf::from(dir).join(format!("{}.{}", args.command.name(), args.format.extension())))
    });
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
            }
            std::fs::write(&path, body).map_err(|e| io_error(&path, e))
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wvasim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
