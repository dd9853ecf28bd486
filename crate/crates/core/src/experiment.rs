//! Spec-file driven experiments: the logic behind `maxcon run`, `maxcon
//! sweep` and `maxcon analyze`.
//!
//! A spec is a TOML document (see `presets/` for complete examples):
//!
//! ```toml
//! name = "fig5"
//! iterations = 200
//! replicas = 50
//! noise_seed = 5
//!
//! [graph]
//! kind = "geometric"      # or "edge_list" (path), "complete", "path", "star", "cycle"
//! nodes = 75
//! radius = 0.38
//! seed = 1
//!
//! [measurements]
//! kind = "uniform"        # or "values" with values = [...]
//! seed = 0
//! pin_max = 0.9561
//!
//! [consensus]
//! algorithm = "nonlinear" # or "naive_max"
//! beta = 30.0
//! noise_variance = 1.0
//! step = "optimal"        # or a number
//!
//! [function]
//! family = "tanh"         # or "polynomial", "exponential"
//! gamma_db = 7.5          # or gamma = <linear>
//! omega = 1e-11           # shape parameter; also accepted as p / q / shape
//! shift = 0.0             # or "mean"
//! ```
//!
//! Everything random is seeded separately: the graph by `graph.seed`, the
//! measurements by `measurements.seed`, and channel noise by `noise_seed`
//! (replica `k` uses ChaCha stream `k`).

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{self, AnalysisReport};
use crate::engine::{self, node_estimate, Algorithm, ConsensusConfig};
use crate::error::{Error, Result};
use crate::graph::{random_geometric_graph, spectral_decompose, Graph};
use crate::mapping::{soft_max, Measurements};
use crate::nonlin::{gamma_from_db, make_function, FamilyKind, TransmitFunction};

pub const DEFAULT_SETTLE_BAND: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub iterations: usize,
    #[serde(default = "one")]
    pub replicas: usize,
    pub noise_seed: u64,
    /// Write every k-th iteration to trace files (the last one always).
    #[serde(default = "one")]
    pub record_every: usize,
    /// How many replicas get a trace CSV; all when absent.
    #[serde(default)]
    pub trace_replicas: Option<usize>,
    /// Band for settle-time statistics.
    #[serde(default = "default_band")]
    pub settle_band: f64,
    pub graph: GraphSource,
    pub measurements: MeasurementSource,
    pub consensus: ConsensusSection,
    #[serde(default)]
    pub function: Option<FunctionSection>,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

fn one() -> usize {
    1
}

fn default_band() -> f64 {
    DEFAULT_SETTLE_BAND
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    Geometric { nodes: usize, radius: f64, seed: u64 },
    EdgeList { path: PathBuf },
    Complete { nodes: usize },
    Path { nodes: usize },
    Star { nodes: usize },
    Cycle { nodes: usize },
}

impl GraphSource {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSource::Geometric { nodes, radius, seed } => random_geometric_graph(*nodes, *radius, *seed),
            GraphSource::EdgeList { path } => Graph::read_edge_list(path),
            GraphSource::Complete { nodes } => Graph::complete(*nodes),
            GraphSource::Path { nodes } => Graph::path(*nodes),
            GraphSource::Star { nodes } => Graph::star(*nodes),
            GraphSource::Cycle { nodes } => Graph::cycle(*nodes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementSource {
    /// One uniform(0, 1) draw per node, optionally rescaled so the maximum
    /// is exactly `pin_max`.
    Uniform {
        seed: u64,
        #[serde(default)]
        pin_max: Option<f64>,
    },
    Values { values: Vec<f64> },
}

impl MeasurementSource {
    pub fn build(&self, nodes: usize) -> Result<Measurements> {
        let m = match self {
            MeasurementSource::Uniform { seed, pin_max } => {
                let m = Measurements::uniform(nodes, *seed)?;
                match pin_max {
                    Some(target) => m.with_pinned_max(*target)?,
                    None => m,
                }
            }
            MeasurementSource::Values { values } => Measurements::new(values.clone())?,
        };
        if m.len() != nodes {
            return Err(Error::DimensionMismatch {
                expected: nodes,
                got: m.len(),
            });
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    Nonlinear,
    NaiveMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsensusSection {
    pub algorithm: AlgorithmName,
    #[serde(default = "unit_beta")]
    pub beta: f64,
    pub noise_variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<StepRule>,
}

fn unit_beta() -> f64 {
    1.0
}

/// Step constant `a`: explicit, or `a*` evaluated with `h'(ȳ)` of the
/// function as run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepRule {
    Fixed(f64),
    Rule(AutoStep),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoStep {
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Tanh,
    Polynomial,
    Exponential,
}

impl From<FamilyName> for FamilyKind {
    fn from(f: FamilyName) -> Self {
        match f {
            FamilyName::Tanh => FamilyKind::Tanh,
            FamilyName::Polynomial => FamilyKind::Polynomial,
            FamilyName::Exponential => FamilyKind::Exponential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSection {
    pub family: FamilyName,
    #[serde(default)]
    pub gamma_db: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(alias = "omega", alias = "p", alias = "q")]
    pub shape: f64,
    #[serde(default)]
    pub shift: ShiftRule,
}

impl FunctionSection {
    pub fn gamma_linear(&self) -> Result<f64> {
        match (self.gamma_db, self.gamma) {
            (Some(db), None) => Ok(gamma_from_db(db)),
            (None, Some(g)) => Ok(g),
            _ => Err(Error::SpecParse("function needs exactly one of gamma_db, gamma".into())),
        }
    }
}

/// Shift `T`: explicit, or the sample mean of the mapped measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShiftRule {
    Value(f64),
    Auto(AutoShift),
}

impl Default for ShiftRule {
    fn default() -> Self {
        ShiftRule::Value(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoShift {
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub eps1: f64,
    pub eps2: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection { eps1: 0.1, eps2: 0.1 }
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::SpecParse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec is serializable")
    }

    /// Builds graph, measurements and engine configuration.
    pub fn resolve(&self) -> Result<Scenario> {
        if self.replicas == 0 {
            return Err(Error::SpecParse("replicas must be at least 1".into()));
        }
        if self.record_every == 0 {
            return Err(Error::SpecParse("record_every must be at least 1".into()));
        }
        let graph = self.graph.build()?;
        let lambda2 = spectral_decompose(&graph)?.algebraic_connectivity();
        let measurements = self.measurements.build(graph.node_count())?;
        let c = &self.consensus;

        let (function, config) = match c.algorithm {
            AlgorithmName::NaiveMax => (None, ConsensusConfig::naive(c.noise_variance, self.iterations, self.noise_seed)),
            AlgorithmName::Nonlinear => {
                let fs = self
                    .function
                    .ok_or_else(|| Error::SpecParse("nonlinear algorithm needs a [function] section".into()))?;
                let base = make_function(fs.family.into(), fs.gamma_linear()?, fs.shape, 0.0)?;
                let y_bar = analysis::theta0_proxy(measurements.values(), c.beta)?;
                let shift = match fs.shift {
                    ShiftRule::Value(t) => t,
                    ShiftRule::Auto(AutoShift::Mean) => y_bar,
                };
                let function = base.with_shift(shift);
                let a = match c.step {
                    Some(StepRule::Fixed(a)) => a,
                    Some(StepRule::Rule(AutoStep::Optimal)) => {
                        analysis::optimal_step(graph.node_count(), lambda2, function.derivative(y_bar))?
                    }
                    None => return Err(Error::SpecParse("consensus.step is required".into())),
                };
                let config = ConsensusConfig::nonlinear(c.beta, a, c.noise_variance, self.iterations, self.noise_seed, function);
                (Some(function), config)
            }
        };
        config.validate()?;
        Ok(Scenario {
            spec: self.clone(),
            graph,
            lambda2,
            measurements,
            function,
            config,
        })
    }
}

/// A spec with everything built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ExperimentSpec,
    pub graph: Graph,
    pub lambda2: f64,
    pub measurements: Measurements,
    /// Transmit function as run (shift applied); `None` for the baseline.
    pub function: Option<TransmitFunction>,
    pub config: ConsensusConfig,
}

/// Per-iteration summary of the node estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub min_estimate: f64,
    pub max_estimate: f64,
    /// Nodes whose estimate is defined (state > 0 for the soft-max path).
    pub defined: usize,
    pub mean_state: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutcome {
    pub replica: usize,
    pub final_estimates: Vec<Option<f64>>,
    /// Mean of the final states.
    pub theta_star: f64,
    /// Estimate carried by `theta_star`.
    pub terminal_estimate: Option<f64>,
    /// `envelope[t]` for `t = 0 ..= T`.
    pub envelope: Vec<Envelope>,
    pub halted: Option<Error>,
}

impl ReplicaOutcome {
    /// First iteration from which every node estimate stays defined and
    /// within `band` of the terminal estimate; `None` if that never holds.
    pub fn settle_iteration(&self, band: f64) -> Option<usize> {
        let terminal = self.terminal_estimate?;
        settle_iteration(&self.envelope, terminal, band)
    }
}

pub fn settle_iteration(envelope: &[Envelope], terminal: f64, band: f64) -> Option<usize> {
    let n_ok = |e: &Envelope| {
        (e.min_estimate - terminal).abs() <= band && (e.max_estimate - terminal).abs() <= band
    };
    let nodes = envelope.first()?.defined.max(envelope.last()?.defined);
    let mut settled = None;
    for (t, e) in envelope.iter().enumerate().rev() {
        if e.defined == nodes && n_ok(e) {
            settled = Some(t);
        } else {
            break;
        }
    }
    settled
}

impl Scenario {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Config for replica `k`.
    pub fn replica_config(&self, k: usize) -> ConsensusConfig {
        self.config.with_stream(k as u64)
    }

    /// Runs one replica without storing its trajectory.
    pub fn run_replica(&self, k: usize) -> Result<ReplicaOutcome> {
        let cfg = self.replica_config(k);
        let n = self.node_count();
        let mut envelope = Vec::with_capacity(cfg.iterations + 1);
        let outcome = engine::simulate(&cfg, &self.graph, &self.measurements, |_, y| {
            envelope.push(envelope_of(cfg.algorithm, cfg.beta, y));
        })?;
        let final_estimates = outcome
            .final_state
            .iter()
            .map(|&v| node_estimate(cfg.algorithm, v, n, cfg.beta))
            .collect();
        let theta_star = outcome.final_state.iter().sum::<f64>() / n as f64;
        Ok(ReplicaOutcome {
            replica: k,
            final_estimates,
            theta_star,
            terminal_estimate: node_estimate(cfg.algorithm, theta_star, n, cfg.beta),
            envelope,
            halted: outcome.halted,
        })
    }

    /// All replicas, concurrently, in replica order.
    pub fn run_all(&self) -> Result<Vec<ReplicaOutcome>> {
        engine::run_replicas(&self.config, self.spec.replicas, |k, _| self.run_replica(k))
            .into_iter()
            .collect()
    }

    pub fn analysis(&self) -> Result<AnalysisReport> {
        let function = self
            .function
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("analysis applies to the nonlinear algorithm only".into()))?;
        analysis::analyze(&analysis::Scenario {
            x: self.measurements.values(),
            lambda2: self.lambda2,
            beta: self.config.beta,
            noise_variance: self.config.noise_variance,
            step_constant: self.config.schedule.constant(),
            function,
            eps1: self.spec.analysis.eps1,
            eps2: self.spec.analysis.eps2,
        })
    }
}

fn envelope_of(algorithm: Algorithm, beta: f64, y: &[f64]) -> Envelope {
    let n = y.len();
    let mut min_estimate = f64::INFINITY;
    let mut max_estimate = f64::NEG_INFINITY;
    let mut defined = 0;
    for &v in y {
        if let Some(e) = node_estimate(algorithm, v, n, beta) {
            min_estimate = min_estimate.min(e);
            max_estimate = max_estimate.max(e);
            defined += 1;
        }
    }
    Envelope {
        min_estimate,
        max_estimate,
        defined,
        mean_state: y.iter().sum::<f64>() / n as f64,
    }
}

/// Median with `None` ordered after every value ("never").
pub fn median_settle(values: &[Option<usize>]) -> Option<usize> {
    let mut sorted: Vec<usize> = values.iter().map(|v| v.unwrap_or(usize::MAX)).collect();
    sorted.sort_unstable();
    let m = *sorted.get(sorted.len() / 2)?;
    (m != usize::MAX).then_some(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub description: Option<String>,
    pub algorithm: AlgorithmName,
    pub nodes: usize,
    pub edges: usize,
    pub lambda2: f64,
    pub gamma_linear: Option<f64>,
    pub beta: f64,
    pub step_constant: Option<f64>,
    pub shift: Option<f64>,
    pub noise_variance: f64,
    pub iterations: usize,
    pub replicas: usize,
    pub x_max: f64,
    pub x_min: f64,
    pub soft_max: Option<f64>,
    /// Mean over replicas of the terminal consensus estimate.
    pub mean_terminal_estimate: Option<f64>,
    /// Smallest and largest terminal node estimate over all replicas.
    pub min_node_estimate: Option<f64>,
    pub max_node_estimate: Option<f64>,
    /// Largest `|estimate - x_max|` over all terminal node estimates.
    pub max_abs_error_vs_x_max: Option<f64>,
    pub settle_band: f64,
    /// `None`: more than half of the replicas never settled.
    pub median_settle_iteration: Option<usize>,
    pub undefined_terminal_estimates: usize,
    pub halted_replicas: usize,
}

pub fn summarize(scenario: &Scenario, outcomes: &[ReplicaOutcome]) -> RunSummary {
    let spec = &scenario.spec;
    let cfg = &scenario.config;
    let x = &scenario.measurements;
    let nonlinear = cfg.algorithm == Algorithm::Nonlinear;

    let terminal: Vec<f64> = outcomes.iter().filter_map(|o| o.terminal_estimate).collect();
    let nodes: Vec<f64> = outcomes.iter().flat_map(|o| o.final_estimates.iter().flatten().copied()).collect();
    let undefined = outcomes
        .iter()
        .map(|o| o.final_estimates.iter().filter(|e| e.is_none()).count())
        .sum();
    let settles: Vec<_> = outcomes.iter().map(|o| o.settle_iteration(spec.settle_band)).collect();
    let fold = |init: f64, f: fn(f64, f64) -> f64| (!nodes.is_empty()).then(|| nodes.iter().copied().fold(init, f));

    RunSummary {
        scenario: spec.name.clone(),
        description: spec.description.clone(),
        algorithm: spec.consensus.algorithm,
        nodes: scenario.node_count(),
        edges: scenario.graph.edges().len(),
        lambda2: scenario.lambda2,
        gamma_linear: scenario.function.map(|f| f.gamma()),
        beta: cfg.beta,
        step_constant: nonlinear.then(|| cfg.schedule.constant()),
        shift: scenario.function.map(|f| f.shift()),
        noise_variance: cfg.noise_variance,
        iterations: cfg.iterations,
        replicas: outcomes.len(),
        x_max: x.max(),
        x_min: x.min(),
        soft_max: if nonlinear { soft_max(x.values(), cfg.beta).ok() } else { None },
        mean_terminal_estimate: (!terminal.is_empty()).then(|| terminal.iter().sum::<f64>() / terminal.len() as f64),
        min_node_estimate: fold(f64::INFINITY, f64::min),
        max_node_estimate: fold(f64::NEG_INFINITY, f64::max),
        max_abs_error_vs_x_max: (!nodes.is_empty())
            .then(|| nodes.iter().map(|e| (e - x.max()).abs()).fold(0.0, f64::max)),
        settle_band: spec.settle_band,
        median_settle_iteration: median_settle(&settles),
        undefined_terminal_estimates: undefined,
        halted_replicas: outcomes.iter().filter(|o| o.halted.is_some()).count(),
    }
}

/// Embedded preset specs, by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig3-naive-divergence", include_str!("../presets/fig3-naive-divergence.toml")),
    ("fig4a", include_str!("../presets/fig4a.toml")),
    ("fig4b", include_str!("../presets/fig4b.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig6a", include_str!("../presets/fig6a.toml")),
    ("fig6b", include_str!("../presets/fig6b.toml")),
    ("noise-free", include_str!("../presets/noise-free.toml")),
    ("min-consensus", include_str!("../presets/min-consensus.toml")),
];

pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::SpecParse(format!("unknown preset {name:?}")))?;
    ExperimentSpec::from_toml(text)
}

/// Reads a spec file; falls back to a preset when `arg` is not a path to an
/// existing file but names one.
pub fn load_spec(arg: &str) -> Result<ExperimentSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        let mut spec = ExperimentSpec::from_toml(&text)?;
        // Edge-list paths are relative to the spec file.
        if let GraphSource::EdgeList { path: p } = &mut spec.graph {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        return Ok(spec);
    }
    preset(arg).map_err(|_| Error::SpecParse(format!("{arg:?} is neither a spec file nor a preset")))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// `maxcon run`: per-replica trace CSVs, `report.json` (nonlinear only),
/// `summary.json`, the graph edge list and the resolved spec.
pub fn cmd_run(spec: &ExperimentSpec, out_dir: &Path) -> Result<RunSummary> {
    let scenario = spec.resolve().map_err(|e| context(spec, e))?;
    fs::create_dir_all(out_dir)?;
    scenario.graph.write_edge_list(&out_dir.join("graph.txt"))?;
    fs::write(out_dir.join("spec.toml"), spec.to_toml())?;

    let outcomes = scenario.run_all().map_err(|e| context(spec, e))?;
    let traced = spec.trace_replicas.unwrap_or(spec.replicas).min(spec.replicas);
    for k in 0..traced {
        let trace = engine::run(&scenario.replica_config(k), &scenario.graph, &scenario.measurements)?;
        let file = File::create(out_dir.join(format!("trace_r{k:03}.csv")))?;
        write_decimated_trace(&trace, spec.record_every, BufWriter::new(file))?;
    }
    if scenario.function.is_some() {
        write_json(&out_dir.join("report.json"), &scenario.analysis().map_err(|e| context(spec, e))?)?;
    }
    let summary = summarize(&scenario, &outcomes);
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

fn write_decimated_trace<W: std::io::Write>(trace: &engine::Trace, every: usize, writer: W) -> Result<()> {
    let last = trace.states.len() - 1;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iteration", "node_id", "state", "estimate"])?;
    for t in (0..=last).filter(|t| t % every == 0 || *t == last) {
        for (i, (s, e)) in trace.states[t].iter().zip(&trace.estimates[t]).enumerate() {
            let est = e.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([t.to_string(), i.to_string(), s.to_string(), est])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn context(spec: &ExperimentSpec, e: Error) -> Error {
    match e {
        Error::SpecParse(m) => Error::SpecParse(format!("{}: {m}", spec.name)),
        Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", spec.name)),
        other => other,
    }
}

/// `maxcon analyze`: pure theory for the spec's parameters.
pub fn cmd_analyze(spec: &ExperimentSpec, out_dir: Option<&Path>) -> Result<AnalysisReport> {
    let report = spec.resolve().and_then(|s| s.analysis()).map_err(|e| context(spec, e))?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("report.json"), &report)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Beta,
    A,
    Omega,
    SigmaN2,
    T,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "beta" => SweepParameter::Beta,
            "a" => SweepParameter::A,
            "omega" => SweepParameter::Omega,
            "sigma_n2" => SweepParameter::SigmaN2,
            "T" | "t" | "shift" => SweepParameter::T,
            other => return Err(Error::SpecParse(format!("unknown sweep parameter {other:?}"))),
        })
    }
}

impl SweepParameter {
    pub fn label(&self) -> &'static str {
        match self {
            SweepParameter::Beta => "beta",
            SweepParameter::A => "a",
            SweepParameter::Omega => "omega",
            SweepParameter::SigmaN2 => "sigma_n2",
            SweepParameter::T => "T",
        }
    }
}

/// A sweep value: a number, or `optimal` (for `a`) / `mean` (for `T`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    Number(f64),
    Optimal,
    Mean,
}

impl std::str::FromStr for SweepValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "optimal" => Ok(SweepValue::Optimal),
            "mean" => Ok(SweepValue::Mean),
            v => v
                .parse()
                .map(SweepValue::Number)
                .map_err(|_| Error::SpecParse(format!("bad sweep value {v:?}"))),
        }
    }
}

impl std::fmt::Display for SweepValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepValue::Number(v) => write!(f, "{v}"),
            SweepValue::Optimal => f.write_str("optimal"),
            SweepValue::Mean => f.write_str("mean"),
        }
    }
}

fn function_mut(s: &mut ExperimentSpec) -> Result<&mut FunctionSection> {
    s.function
        .as_mut()
        .ok_or_else(|| Error::SpecParse("sweep needs a [function] section".into()))
}

/// Returns a copy of `spec` with one parameter replaced.
pub fn apply_sweep(spec: &ExperimentSpec, parameter: SweepParameter, value: SweepValue) -> Result<ExperimentSpec> {
    let mut s = spec.clone();
    let bad = || Error::SpecParse(format!("value {value} does not apply to {}", parameter.label()));
    match (parameter, value) {
        (SweepParameter::Beta, SweepValue::Number(v)) => s.consensus.beta = v,
        (SweepParameter::A, SweepValue::Number(v)) => s.consensus.step = Some(StepRule::Fixed(v)),
        (SweepParameter::A, SweepValue::Optimal) => s.consensus.step = Some(StepRule::Rule(AutoStep::Optimal)),
        (SweepParameter::Omega, SweepValue::Number(v)) => function_mut(&mut s)?.shape = v,
        (SweepParameter::SigmaN2, SweepValue::Number(v)) => s.consensus.noise_variance = v,
        (SweepParameter::T, SweepValue::Number(v)) => function_mut(&mut s)?.shift = ShiftRule::Value(v),
        (SweepParameter::T, SweepValue::Mean) => function_mut(&mut s)?.shift = ShiftRule::Auto(AutoShift::Mean),
        _ => return Err(bad()),
    }
    s.name = format!("{}[{}={value}]", spec.name, parameter.label());
    Ok(s)
}

/// One row of the long-format sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: &'static str,
    pub value: String,
    pub replica: usize,
    pub iteration: usize,
    /// Estimate carried by the mean state; empty when it is not positive.
    pub estimate: Option<f64>,
    /// `estimate - x_max`.
    pub error: Option<f64>,
    /// Max minus min node estimate; empty unless every node is defined.
    pub spread: Option<f64>,
}

/// Per-value aggregate written to `sweep_summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummaryRow {
    pub parameter: &'static str,
    pub value: String,
    pub step_constant: Option<f64>,
    pub shift: Option<f64>,
    /// Mean terminal estimate minus `x_max`.
    pub terminal_bias: Option<f64>,
    /// Empty when more than half of the replicas never settled.
    pub median_settle_iteration: Option<usize>,
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummaryRow>,
}

/// `maxcon sweep`: reruns the spec for each value. Rows are written for
/// every `record_every`-th iteration plus the last.
pub fn cmd_sweep(spec: &ExperimentSpec, parameter: SweepParameter, values: &[SweepValue], out_dir: Option<&Path>) -> Result<SweepResult> {
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &value in values {
        let swept = apply_sweep(spec, parameter, value)?;
        let scenario = swept.resolve().map_err(|e| context(&swept, e))?;
        let outcomes = scenario.run_all().map_err(|e| context(&swept, e))?;
        let x_max = scenario.measurements.max();
        let n = scenario.node_count();
        let cfg = &scenario.config;
        let label = value.to_string();
        for o in &outcomes {
            let last = o.envelope.len() - 1;
            for (t, e) in o.envelope.iter().enumerate() {
                if t % swept.record_every != 0 && t != last {
                    continue;
                }
                let estimate = node_estimate(cfg.algorithm, e.mean_state, n, cfg.beta);
                rows.push(SweepRow {
                    parameter: parameter.label(),
                    value: label.clone(),
                    replica: o.replica,
                    iteration: t,
                    estimate,
                    error: estimate.map(|v| v - x_max),
                    spread: (e.defined == n).then(|| e.max_estimate - e.min_estimate),
                });
            }
        }
        let s = summarize(&scenario, &outcomes);
        summary.push(SweepSummaryRow {
            parameter: parameter.label(),
            value: label,
            step_constant: s.step_constant,
            shift: s.shift,
            terminal_bias: s.mean_terminal_estimate.map(|v| v - x_max),
            median_settle_iteration: s.median_settle_iteration,
            replicas: outcomes.len(),
        });
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        write_csv_rows(&dir.join("sweep.csv"), &rows)?;
        write_csv_rows(&dir.join("sweep_summary.csv"), &summary)?;
    }
    Ok(SweepResult { rows, summary })
}

fn write_csv_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
