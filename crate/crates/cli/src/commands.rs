use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use amos_core::amos::{amos_cluster, AmosOptions};
use amos_core::generators::{generate_rim, RimSpec};
use amos_core::io::{format_edge_list, format_labels, parse_edge_list, parse_labels, EdgeList};
use amos_core::metrics::metric_report;
use amos_core::phase::{sweep as run_sweep, sweep_csv, sweep_means, SweepConfig};
use amos_core::{smallest_eigenpairs, ClusterAssignment, EigenOptions, NormalizeMode};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::svg::line_chart;

/// Start vector seed for the `eigen` command, which takes no seed flag.
const EIGEN_SEED: u64 = 0x5eed;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn read_graph(path: &Path) -> Result<EdgeList, CliError> {
    parse_edge_list(&read(path)?).map_err(|e| CliError::parse(path, e))
}

fn read_labels(path: &Path, n: usize) -> Result<ClusterAssignment, CliError> {
    let labels = parse_labels(&read(path)?).map_err(|e| CliError::parse(path, e))?;
    if labels.len() != n {
        return Err(CliError::Data(format!(
            "{}: {} labels for a graph with {n} nodes",
            path.display(),
            labels.len()
        )));
    }
    ClusterAssignment::from_arbitrary(&labels)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<RimSpec, CliError> {
    let spec: RimSpec = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_level(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must lie in (0, 1), got {x}")))
    }
}

pub struct ClusterConfig {
    pub input: PathBuf,
    pub eta: f64,
    pub alpha: f64,
    pub alpha_prime: f64,
    pub kmax: Option<usize>,
    pub normalize: NormalizeMode,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

pub fn cluster(cfg: &ClusterConfig) -> Result<(), CliError> {
    check_level("eta", cfg.eta)?;
    check_level("alpha", cfg.alpha)?;
    check_level("alpha-prime", cfg.alpha_prime)?;
    if cfg.kmax == Some(0) {
        return Err(CliError::Usage("--kmax must be at least 1".into()));
    }
    let parsed = read_graph(&cfg.input)?;
    let opts = AmosOptions {
        eta: cfg.eta,
        alpha: cfg.alpha,
        alpha_prime: cfg.alpha_prime,
        k_max: cfg.kmax,
        normalize: cfg.normalize,
        ..AmosOptions::with_seed(cfg.seed)
    };
    let mut reports = Vec::new();
    for (idx, nodes) in parsed.graph.connected_components().iter().enumerate() {
        let sub = parsed.graph.induced_subgraph(nodes);
        let report = amos_cluster(&sub, &opts)?;
        let mut entry = report.to_json();
        entry["component"] = json!(idx);
        entry["nodes"] = json!(nodes.iter().map(|&v| parsed.original_id(v)).collect::<Vec<_>>());
        reports.push(entry);
    }
    emit(cfg.output.as_deref(), &pretty(&Value::Array(reports)))
}

pub fn generate(spec: &Path, seed: u64, out_edges: &Path, out_labels: &Path) -> Result<(), CliError> {
    let spec = read_spec(spec)?;
    let (g, truth) = generate_rim(&spec, seed)?;
    write(out_edges, &format_edge_list(&g))?;
    write(out_labels, &format_labels(truth.labels()))
}

/// Parses an inclusive `start:stop:step` grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--grid expects start:stop:step, got `{spec}`"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // Rounding keeps values like 0.1 + 2 * 0.1 printable as 0.3.
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

pub struct SweepCommand {
    pub spec: PathBuf,
    pub grid: String,
    pub trials: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub output: PathBuf,
    pub with_amos: bool,
    pub svg: Option<PathBuf>,
}

pub fn sweep(cmd: &SweepCommand) -> Result<(), CliError> {
    let grid = parse_grid(&cmd.grid)?;
    if cmd.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if cmd.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let spec = read_spec(&cmd.spec)?;
    let mut cfg = SweepConfig::new(spec, grid, cmd.trials, cmd.seed);
    cfg.with_amos = cmd.with_amos;
    cfg.validate()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cmd.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", cmd.threads.unwrap_or(0))))?;
    let records = pool.install(|| run_sweep(&cfg))?;

    write(&cmd.output, &sweep_csv(&records, cfg.axis))?;
    let failures: Vec<String> = records
        .iter()
        .filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("{}={} trial={}: {e}", cfg.axis.column(), r.x, r.trial))
        })
        .collect();
    if !failures.is_empty() {
        let mut log = String::new();
        for f in &failures {
            let _ = writeln!(log, "{f}");
        }
        let mut path = cmd.output.clone().into_os_string();
        path.push(".log");
        write(Path::new(&path), &log)?;
        eprintln!("{} sweep cells failed; see {}", failures.len(), Path::new(&path).display());
    }
    if let Some(svg) = &cmd.svg {
        write(svg, &line_chart(&sweep_means(&records), cfg.axis.column()))?;
    }
    Ok(())
}

pub fn metrics(input: &Path, found: &Path, truth: Option<&Path>) -> Result<(), CliError> {
    let parsed = read_graph(input)?;
    let n = parsed.graph.node_count();
    let found = read_labels(found, n)?;
    let truth = truth.map(|t| read_labels(t, n)).transpose()?;
    let report = metric_report(&parsed.graph, &found, truth.as_ref())
        .map_err(|e| CliError::Data(e.to_string()))?;
    let value = serde_json::to_value(&report).expect("metric report serializes");
    emit(None, &pretty(&value))
}

pub fn eigen(input: &Path, k: usize) -> Result<(), CliError> {
    if k < 2 {
        return Err(CliError::Usage(format!("--k must be at least 2, got {k}")));
    }
    let parsed = read_graph(input)?;
    let g = &parsed.graph;
    let n = g.node_count();
    if k > n {
        return Err(CliError::Data(format!("--k {k} exceeds the {n} nodes of the graph")));
    }
    let emb = smallest_eigenpairs(&g.laplacian(), k, &EigenOptions::with_seed(EIGEN_SEED))?;
    let s = emb.partial_sum();
    let value = json!({
        "k": k,
        "n": n,
        "eigenvalues": emb.eigenvalues,
        "lambda_next": emb.lambda_next,
        "partial_sum": s,
        "partial_sum_over_n": s / n as f64,
    });
    emit(None, &pretty(&value))
}
