use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eitm::config::{parse_range, RunConfig};
use eitm::report::Outputs;
use eitm::{presets, run_scan, DampingMode, Error, Model, Result};

/// Parameter scans of quantum statistical speeds and susceptibilities.
#[derive(Parser)]
#[command(name = "eitm", version)]
struct Cli {
    /// Print the preset catalogue and exit.
    #[arg(long)]
    list_presets: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scan and write `<name>.csv`, `<name>.features.txt` and
    /// `<name>.coincidence.txt`.
    Run(RunArgs),
    /// Print the preset catalogue.
    ListPresets {
        /// Only presets of this model (`four-level` or `three-level`).
        #[arg(long)]
        model: Option<String>,
        /// Only presets whose name contains this text.
        #[arg(long = "match")]
        pattern: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Built-in preset, e.g. `fig2a`.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// Scan configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (must exist). Defaults to $EITM_OUT, then `.`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    points: Option<usize>,
    /// Sweep window as MIN:MAX.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// `on` or `off`.
    #[arg(long)]
    damping: Option<String>,
    /// Comma-separated column names, e.g. `qfi_omegas,chi3_abs`.
    #[arg(long)]
    quantities: Option<String>,
    #[arg(long)]
    tol_cells: Option<f64>,
    /// Significant digits in the CSV.
    #[arg(long)]
    precision: Option<usize>,
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), None) => RunConfig::preset(name),
        (None, Some(path)) => RunConfig::from_file(path)?,
        _ => return Err(Error::InvalidConfig("give exactly one of --preset or --config".into())),
    };
    let o = &mut cfg.overrides;
    if args.points.is_some() {
        o.points = args.points;
    }
    if let Some(r) = &args.range {
        o.range = Some(parse_range(r)?);
    }
    if let Some(d) = &args.damping {
        o.damping = Some(d.parse::<DampingMode>()?);
    }
    if args.quantities.is_some() {
        o.quantities = args.quantities.clone();
    }
    if args.tol_cells.is_some() {
        o.tol_cells = args.tol_cells;
    }
    if let Some(p) = args.precision {
        if p == 0 || p > 17 {
            return Err(Error::InvalidConfig(format!("precision must be 1..=17, got {p}")));
        }
        cfg.precision = p;
    }

    let out_dir = args
        .out
        .or_else(|| cfg.out_dir.clone())
        .or_else(|| std::env::var_os("EITM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let doc = cfg.resolve()?;
    let result = run_scan(&doc.spec)?;
    let outputs = Outputs::render(&doc, &result, cfg.precision, cfg.features_report, cfg.coincidence_report);
    for path in outputs.write(&out_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn list(model: Option<&str>, pattern: Option<&str>) -> Result<()> {
    let mut docs = match model {
        None => presets::all(),
        Some(m) => presets::for_model(m.parse::<Model>()?),
    };
    if let Some(pat) = pattern {
        docs.retain(|d| d.name.contains(pat));
    }
    print!("{}", presets::table(&docs));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Some(Command::Run(args)) => run(args),
        Some(Command::ListPresets { model, pattern }) => list(model.as_deref(), pattern.as_deref()),
        None if cli.list_presets => list(None, None),
        None => Err(Error::InvalidConfig("no command given; try `eitm run --preset fig2a`".into())),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eitm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
