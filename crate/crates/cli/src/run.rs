//! One scenario end to end, and batches of independent scenarios.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thermocircuit::{eigen_report, integrate, Channel, IntegratorConfig, Matrix, Method, Model, Series};

use crate::compare::{compare, default_channel_map, histogram_table, stats_table, ChannelComparison, DEFAULT_BIN_WIDTH};
use crate::config::parse_building;
use crate::error::CliError;
use crate::model::{build_scenario, Route, Scenario};
use crate::timeseries::{ingest_timeseries, write_trajectory};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub config: PathBuf,
    pub inputs: PathBuf,
    /// Trajectory file; side artifacts are written next to it.
    pub output: PathBuf,
    pub step: Option<f64>,
    pub method: Option<Method>,
    pub report_eigen: bool,
    pub dump_statespace: bool,
    pub compare: Option<PathBuf>,
    pub allow_unbound: bool,
    pub bin_width: f64,
}

impl RunOptions {
    pub fn new(config: impl Into<PathBuf>, inputs: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        Self {
            config: config.into(),
            inputs: inputs.into(),
            output: output.into(),
            step: None,
            method: None,
            report_eigen: false,
            dump_statespace: false,
            compare: None,
            allow_unbound: false,
            bin_width: DEFAULT_BIN_WIDTH,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub written: Vec<PathBuf>,
    pub comparisons: Vec<ChannelComparison>,
    pub states: usize,
    pub steps: usize,
}

/// `dir/stem.suffix` for an artifact that accompanies `output`.
pub fn sibling(output: &Path, suffix: &str) -> PathBuf {
    let stem = output.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    output.with_file_name(format!("{stem}.{suffix}"))
}

fn write(path: &Path, contents: &[u8]) -> Result<PathBuf, CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(path.to_path_buf())
}

/// One channel per model input, each the sum of its routed channels; inputs
/// without a route take the channel named after their label (or a member of
/// a merged label), or zero when unbound inputs are allowed.
pub fn bind_inputs(scenario: &Scenario, inputs: &Series, allow_unbound: bool) -> Result<Series, CliError> {
    let model = &scenario.model;
    let mut channels = Vec::with_capacity(model.input_count());
    let mut unbound = Vec::new();
    for (label, routes) in model.input_labels.iter().zip(&scenario.routes) {
        let values = if routes.is_empty() {
            let candidates = std::iter::once(label.as_str()).chain(label.split('='));
            match candidates.into_iter().find_map(|n| inputs.channel(n)) {
                Some(v) => v.to_vec(),
                None => {
                    unbound.push(label.clone());
                    vec![0.0; inputs.len()]
                }
            }
        } else {
            let mut sum = vec![0.0; inputs.len()];
            for Route { channel, scale, location } in routes {
                let v = inputs.channel(channel).ok_or_else(|| {
                    CliError::input("run", location.clone(), format!("channel `{channel}` is absent from the inputs"))
                })?;
                sum.iter_mut().zip(v).for_each(|(s, x)| *s += scale * x);
            }
            sum
        };
        channels.push(Channel::new(label.clone(), values));
    }
    if !unbound.is_empty() && !allow_unbound {
        return Err(CliError::input(
            "run",
            None,
            format!("sources without an input channel: {}; bind them or allow unbound sources", unbound.join(", ")),
        ));
    }
    Ok(Series::new(inputs.start(), inputs.dt(), channels)?)
}

fn matrix_block(out: &mut String, name: &str, m: &Matrix<f64>, rows: &[String], cols: &[String]) {
    let _ = writeln!(out, "# {name} ({} x {})", m.nrows(), m.ncols());
    let _ = writeln!(out, ",{}", cols.join(","));
    for (i, r) in rows.iter().enumerate() {
        let values: Vec<String> = m.row(i).iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{r},{}", values.join(","));
    }
}

/// The four matrices as labelled CSV blocks.
pub fn statespace_dump(model: &Model) -> String {
    let mut out = String::new();
    let (x, u, y) = (&model.state_labels, &model.input_labels, &model.output_labels);
    matrix_block(&mut out, "A", &model.a, x, x);
    matrix_block(&mut out, "B", &model.b, x, u);
    matrix_block(&mut out, "C", &model.c, y, x);
    matrix_block(&mut out, "D", &model.d, y, u);
    out
}

pub fn run(opts: &RunOptions) -> Result<RunSummary, CliError> {
    let doc = parse_building(&opts.config)?;
    let scenario = build_scenario(&doc)?;
    let raw = ingest_timeseries(&opts.inputs)?;
    let inputs = bind_inputs(&scenario, &raw, opts.allow_unbound || scenario.allow_unbound)?;
    let method = opts.method.or(scenario.method).unwrap_or(Method::ExactZoh);
    let step = opts.step.or(scenario.step).unwrap_or(inputs.dt());
    let cfg = IntegratorConfig::new(method, step);
    let mut summary = RunSummary { states: scenario.model.state_count(), ..Default::default() };
    if opts.report_eigen {
        let report = eigen_report(&scenario.model)?;
        summary.written.push(write(&sibling(&opts.output, "eigen.csv"), report.to_string().as_bytes())?);
    }
    if opts.dump_statespace {
        let dump = statespace_dump(&scenario.model);
        summary.written.push(write(&sibling(&opts.output, "statespace.csv"), dump.as_bytes())?);
    }
    let traj = integrate(&scenario.model, &inputs, &cfg)?;
    summary.steps = traj.len();
    let mut buf = Vec::new();
    write_trajectory(&mut buf, &traj).map_err(|e| CliError::Io { path: opts.output.clone(), message: e.to_string() })?;
    summary.written.push(write(&opts.output, &buf)?);
    if let Some(path) = &opts.compare {
        let measured = ingest_timeseries(path)?;
        let map = default_channel_map(&traj.labels, &measured);
        let results = compare(&traj, &measured, &map, opts.bin_width)?;
        summary.written.push(write(&sibling(&opts.output, "compare.csv"), stats_table(&results).as_bytes())?);
        summary.written.push(write(&sibling(&opts.output, "histogram.csv"), histogram_table(&results).as_bytes())?);
        summary.comparisons = results;
    }
    Ok(summary)
}

/// Scenario `stem` of a batch: `stem.tc` with inputs `stem.csv` and, when
/// present, measurements `stem.measured.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchItem {
    pub name: String,
    pub config: PathBuf,
    pub inputs: PathBuf,
    pub measured: Option<PathBuf>,
}

/// Scenarios in `dir`, sorted by name. Description files without a matching
/// inputs file (table libraries, for instance) are skipped.
pub fn discover_batch(dir: &Path) -> Result<Vec<BatchItem>, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: dir.to_path_buf(), message: e.to_string() };
    let mut items = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("tc") {
            continue;
        }
        let Some(name) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else { continue };
        let inputs = dir.join(format!("{name}.csv"));
        if !inputs.is_file() {
            continue;
        }
        let measured = Some(dir.join(format!("{name}.measured.csv"))).filter(|p| p.is_file());
        items.push(BatchItem { name, config: path, inputs, measured });
    }
    items.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(items)
}

/// Runs every scenario of `dir` in parallel, writing `out_dir/name.out.csv`
/// and its artifacts. Results come back in name order.
pub fn run_batch(dir: &Path, out_dir: &Path, template: &RunOptions) -> Result<Vec<(String, Result<RunSummary, CliError>)>, CliError> {
    let items = discover_batch(dir)?;
    if items.is_empty() {
        return Err(CliError::Usage(format!("no scenarios (name.tc with name.csv) in {}", dir.display())));
    }
    fs::create_dir_all(out_dir).map_err(|e| CliError::Io { path: out_dir.to_path_buf(), message: e.to_string() })?;
    Ok(items
        .par_iter()
        .map(|item| {
            let opts = RunOptions {
                config: item.config.clone(),
                inputs: item.inputs.clone(),
                output: out_dir.join(format!("{}.out.csv", item.name)),
                compare: item.measured.clone(),
                ..template.clone()
            };
            (item.name.clone(), run(&opts))
        })
        .collect())
}
