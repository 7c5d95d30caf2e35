use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thermocircuit::Method;
use thermocircuit_cli::compare::{stats_table, DEFAULT_BIN_WIDTH};
use thermocircuit_cli::{run, run_batch, CliError, RunOptions, RunSummary};

/// Simulate a building thermal network described in TOML against CSV inputs.
#[derive(Debug, Parser)]
#[command(name = "thermocircuit", version)]
struct Args {
    /// Building description.
    #[arg(long, value_name = "PATH", conflicts_with = "batch")]
    config: Option<PathBuf>,
    /// Input channels, CSV with a leading `time` column.
    #[arg(long, value_name = "PATH")]
    inputs: Option<PathBuf>,
    /// Trajectory file; in batch mode, the output directory.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Integration step, s; must divide the input sampling interval.
    #[arg(long, value_name = "SECONDS")]
    dt: Option<f64>,
    #[arg(long, value_name = "METHOD", value_parser = ["explicit-euler", "implicit-euler", "exact-zoh"])]
    method: Option<String>,
    /// Write eigenvalues and time constants next to the output.
    #[arg(long)]
    report_eigen: bool,
    /// Write the A, B, C, D matrices next to the output.
    #[arg(long)]
    dump_statespace: bool,
    /// Measured series to compare the outputs against.
    #[arg(long, value_name = "PATH")]
    compare: Option<PathBuf>,
    /// Histogram bin width for comparisons, °C.
    #[arg(long, value_name = "KELVIN", default_value_t = DEFAULT_BIN_WIDTH)]
    bin_width: f64,
    /// Feed zero to sources that have no input channel.
    #[arg(long)]
    allow_unbound: bool,
    /// Directory of scenarios `name.tc` + `name.csv`, run in parallel.
    #[arg(long, value_name = "DIR")]
    batch: Option<PathBuf>,
}

fn options(args: &Args, config: PathBuf, inputs: PathBuf, output: PathBuf) -> Result<RunOptions, CliError> {
    let method = args.method.as_deref().map(str::parse::<Method>).transpose().map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(dt) = args.dt {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
        }
    }
    Ok(RunOptions {
        step: args.dt,
        method,
        report_eigen: args.report_eigen,
        dump_statespace: args.dump_statespace,
        compare: args.compare.clone(),
        allow_unbound: args.allow_unbound,
        bin_width: args.bin_width,
        ..RunOptions::new(config, inputs, output)
    })
}

fn report(summary: &RunSummary) {
    for p in &summary.written {
        println!("wrote {}", p.display());
    }
    if !summary.comparisons.is_empty() {
        print!("{}", stats_table(&summary.comparisons));
    }
}

fn dispatch(args: Args) -> Result<(), CliError> {
    if let Some(dir) = &args.batch {
        if args.inputs.is_some() || args.compare.is_some() {
            return Err(CliError::Usage("--batch takes inputs and measurements from the batch directory".into()));
        }
        let out_dir = args.output.clone().unwrap_or_else(|| dir.clone());
        let template = options(&args, PathBuf::new(), PathBuf::new(), PathBuf::new())?;
        let mut first_error: Option<CliError> = None;
        for (name, result) in run_batch(dir, &out_dir, &template)? {
            match result {
                Ok(s) => println!("ok {name}: {} states, {} samples", s.states, s.steps),
                Err(e) => {
                    println!("failed {name}: {e}");
                    first_error.get_or_insert(e);
                }
            }
        }
        return first_error.map_or(Ok(()), Err);
    }
    let missing = |flag: &str| CliError::Usage(format!("{flag} is required (or use --batch)"));
    let config = args.config.clone().ok_or_else(|| missing("--config"))?;
    let inputs = args.inputs.clone().ok_or_else(|| missing("--inputs"))?;
    let output = args.output.clone().ok_or_else(|| missing("--output"))?;
    let summary = run(&options(&args, config, inputs, output)?)?;
    report(&summary);
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
