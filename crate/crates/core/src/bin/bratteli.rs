use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use bratteli::cli::{parse_spec, parse_spec_json, run_command, Command, Format, Options};

/// Construct and verify ordered Bratteli diagrams and their group-labelled skew products.
#[derive(Debug, Parser)]
#[command(name = "bratteli", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// A `.bspec` text spec, or the JSON written by `emit-json`.
    input: PathBuf,

    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    vertex: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Use the unlabelled base diagram.
    #[arg(long)]
    base: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.input.display());
            return ExitCode::from(2);
        }
    };
    let parsed = if args.input.extension().is_some_and(|x| x == "json") {
        parse_spec_json(&text)
    } else {
        parse_spec(&text)
    };
    let doc = match parsed {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {}: {e}", args.input.display());
            return ExitCode::from(2);
        }
    };
    let opts = Options {
        depth: args.depth,
        level: args.level,
        vertex: args.vertex,
        window: args.window,
        bound: args.bound,
        format: args.format,
        base: args.base,
    };
    let report = match run_command(&doc, args.command, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("usage: bratteli <command> <input> [--depth N] [--level N] [--vertex V] [--window K] [--bound B] [--format dot|json] [--base] [--out PATH]");
            return ExitCode::from(2);
        }
    };
    let text = report.render();
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
