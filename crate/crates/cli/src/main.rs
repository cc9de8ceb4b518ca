use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use maslov_cli::convergence::orders_of;
use maslov_cli::output::render_study;
use maslov_cli::scenario::{resolve, BUNDLED};
use maslov_cli::{emit_csv, render, run, CliError, Overrides, RunOutcome, Study, EXIT_INPUT, EXIT_OK, EXIT_TOLERANCE};
use maslov_core::ambient::BUILTIN_NAMES;

/// Maslov index of bundle pairs and immersed surfaces, from scenario files.
#[derive(Debug, Parser)]
#[command(name = "maslov", version)]
struct Args {
    /// Scenario file, or bundled:NAME. Repeatable; scenarios run in order.
    #[arg(long = "scenario", value_name = "FILE")]
    scenarios: Vec<String>,
    /// Comma-separated routes: cw, top, geom.
    #[arg(long, value_delimiter = ',')]
    routes: Option<Vec<String>>,
    /// Single refinement level.
    #[arg(long, conflicts_with = "levels")]
    refine: Option<usize>,
    /// Level range A..B (inclusive).
    #[arg(long, value_parser = parse_range)]
    levels: Option<(usize, usize)>,
    /// Write all rows to this CSV file.
    #[arg(long, value_name = "OUT")]
    csv: Option<PathBuf>,
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized scenarios.
    #[arg(long)]
    seed: Option<u64>,
    /// List bundled scenarios and built-in geometries.
    #[arg(long)]
    list_builtins: bool,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got '{s}'"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn list() {
    println!("bundled scenarios (use --scenario bundled:NAME):");
    for (name, _) in BUNDLED {
        println!("  {name}");
    }
    println!("geometries: {}", BUILTIN_NAMES.join(", "));
    println!("geometries with parameters: torus_disk (r1, r2, twist), perturbed_cap (colatitude, amplitude, seed)");
    println!("pairs: disk_example, winding, constant, monopole, random");
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_builtins {
        list();
        return ExitCode::SUCCESS;
    }
    if args.scenarios.is_empty() {
        eprintln!("error: no --scenario given (see --list-builtins)");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    let overrides = Overrides {
        routes: args.routes.clone(),
        levels: args.refine.map(|r| vec![r]).or(args.levels.map(|(a, b)| (a..=b).collect())),
        tolerance: args.tol,
        seed: args.seed,
    };
    match execute(&args, &overrides) {
        Ok(outcome) => {
            if outcome.ok() {
                ExitCode::from(EXIT_OK as u8)
            } else {
                eprintln!("tolerance or consistency failure");
                ExitCode::from(EXIT_TOLERANCE as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args, overrides: &Overrides) -> Result<RunOutcome, CliError> {
    // parse everything first so a bad file fails before any compute
    let scenarios = args.scenarios.iter().map(|s| resolve(s)).collect::<Result<Vec<_>, _>>()?;
    let mut all: Option<RunOutcome> = None;
    for s in &scenarios {
        let outcome = run(s, overrides)?;
        print!("{}", render(&outcome));
        let orders = orders_of(&outcome.rows);
        if !orders.is_empty() {
            print!("{}", render_study(&Study { rows: Vec::new(), orders }));
        }
        match &mut all {
            Some(a) => a.extend(outcome),
            None => all = Some(outcome),
        }
    }
    let all = all.expect("at least one scenario");
    if let Some(path) = &args.csv {
        emit_csv(&all.rows, path)?;
    }
    Ok(all)
}
