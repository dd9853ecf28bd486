//! Iterative consensus: the noisy bounded-transmission recursion on mapped
//! states, and the keep-the-largest baseline on raw measurements.
//!
//! Noise model:
//! * nonlinear recursion: one scalar `n_i(t)` per receiving node and
//!   iteration, added to the superposition of its neighbors' transmissions.
//! * keep-the-largest baseline: every received neighbor value is corrupted
//!   independently, since the max needs individual values.
//!
//! Both are i.i.d. zero-mean Gaussian with variance `σ_n²`. A run draws its
//! noise from ChaCha stream `stream` of `seed`, so replicas sharing a master
//! seed get isolated, reproducible streams.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mapping::{map_initial, unmap_estimate, Measurements};
use crate::nonlin::TransmitFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Soft-max mapping followed by the noisy nonlinear recursion.
    Nonlinear,
    /// Keep the largest received value.
    NaiveMax,
}

/// Step-size schedules. The closed-form analysis assumes `Harmonic`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `a / (t + 1)`.
    Harmonic { a: f64 },
    /// `a / (t + 1)^decay`, `decay ∈ (1/2, 1]`.
    Power { a: f64, decay: f64 },
}

impl StepSchedule {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            StepSchedule::Harmonic { a } => step_size(t, a),
            StepSchedule::Power { a, decay } => a / (t as f64 + 1.0).powf(decay),
        }
    }

    pub fn constant(&self) -> f64 {
        match *self {
            StepSchedule::Harmonic { a } | StepSchedule::Power { a, .. } => a,
        }
    }

    fn validate(&self) -> Result<()> {
        let a = self.constant();
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidConfig(format!("step constant must be positive, got {a}")));
        }
        if let StepSchedule::Power { decay, .. } = *self {
            if !(decay > 0.5 && decay <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "step decay must lie in (0.5, 1], got {decay}"
                )));
            }
        }
        Ok(())
    }
}

/// `a / (t + 1)`.
#[inline]
pub fn step_size(t: usize, a: f64) -> f64 {
    a / (t as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsensusConfig {
    pub beta: f64,
    pub schedule: StepSchedule,
    pub noise_variance: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Noise stream index; replicas use their replica number.
    pub stream: u64,
    pub function: TransmitFunction,
    pub algorithm: Algorithm,
}

impl ConsensusConfig {
    /// Nonlinear recursion with `α(t) = a/(t+1)` on stream 0.
    pub fn nonlinear(beta: f64, a: f64, noise_variance: f64, iterations: usize, seed: u64, function: TransmitFunction) -> Self {
        ConsensusConfig {
            beta,
            schedule: StepSchedule::Harmonic { a },
            noise_variance,
            iterations,
            seed,
            stream: 0,
            function,
            algorithm: Algorithm::Nonlinear,
        }
    }

    /// Keep-the-largest baseline. `beta`, the schedule and the function are
    /// carried along but unused.
    pub fn naive(noise_variance: f64, iterations: usize, seed: u64) -> Self {
        ConsensusConfig {
            beta: 1.0,
            schedule: StepSchedule::Harmonic { a: 1.0 },
            noise_variance,
            iterations,
            seed,
            stream: 0,
            function: TransmitFunction::tanh(1.0, 1.0).expect("static parameters"),
            algorithm: Algorithm::NaiveMax,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iteration budget must be at least 1".into()));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be >= 0, got {}",
                self.noise_variance
            )));
        }
        if self.algorithm == Algorithm::Nonlinear {
            if self.beta == 0.0 || !self.beta.is_finite() {
                return Err(Error::ZeroBeta);
            }
            self.schedule.validate()?;
        }
        Ok(())
    }
}

/// Gaussian noise drawn from one ChaCha stream. Zero variance draws nothing.
pub struct NoiseSource {
    rng: ChaCha8Rng,
    normal: Option<Normal<f64>>,
}

impl NoiseSource {
    pub fn new(seed: u64, stream: u64, variance: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let normal = (variance > 0.0).then(|| Normal::new(0.0, variance.sqrt()).expect("finite std"));
        NoiseSource { rng, normal }
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        match &self.normal {
            Some(normal) => out.iter_mut().for_each(|v| *v = normal.sample(&mut self.rng)),
            None => out.fill(0.0),
        }
    }
}

/// Per-node form: `y_i - α [d_i h(y_i) - Σ_{j∈N_i} h(y_j) + n_i]`.
pub fn nonlinear_step_node(node: usize, y: &[f64], graph: &Graph, function: &TransmitFunction, alpha: f64, noise: f64) -> f64 {
    let received: f64 = graph.neighbors(node).iter().map(|&j| function.eval(y[j])).sum();
    let own = graph.degree(node) as f64 * function.eval(y[node]);
    y[node] - alpha * ((own - received) + noise)
}

/// Vector form: `y - α (L h(y) + n)`.
pub fn nonlinear_step(y: &[f64], graph: &Graph, function: &TransmitFunction, alpha: f64, noise: &[f64]) -> Result<Vec<f64>> {
    let n = graph.node_count();
    check_len(y.len(), n)?;
    check_len(noise.len(), n)?;
    let mut transmitted = vec![0.0; n];
    let mut next = vec![0.0; n];
    nonlinear_step_into(y, graph, function, alpha, noise, &mut transmitted, &mut next);
    if let Some(node) = next.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { iteration: 0, node });
    }
    Ok(next)
}

fn nonlinear_step_into(
    y: &[f64],
    graph: &Graph,
    function: &TransmitFunction,
    alpha: f64,
    noise: &[f64],
    transmitted: &mut [f64],
    next: &mut [f64],
) {
    for (t, &v) in transmitted.iter_mut().zip(y) {
        *t = function.eval(v);
    }
    graph.apply_laplacian(transmitted, next);
    for i in 0..y.len() {
        next[i] = y[i] - alpha * (next[i] + noise[i]);
    }
}

/// `x_i ← max{x_i, max_{j∈N_i} (x_j + n_ij)}`. `link_noise` holds one
/// sample per directed pair, ordered by receiver then by neighbor.
pub fn naive_max_step(x: &[f64], graph: &Graph, link_noise: &[f64]) -> Result<Vec<f64>> {
    check_len(x.len(), graph.node_count())?;
    check_len(link_noise.len(), graph.directed_edge_count())?;
    let mut next = vec![0.0; x.len()];
    naive_max_step_into(x, graph, link_noise, &mut next);
    Ok(next)
}

fn naive_max_step_into(x: &[f64], graph: &Graph, link_noise: &[f64], next: &mut [f64]) {
    let mut k = 0;
    for (i, out) in next.iter_mut().enumerate() {
        let mut best = x[i];
        for &j in graph.neighbors(i) {
            best = best.max(x[j] + link_noise[k]);
            k += 1;
        }
        *out = best;
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub final_state: Vec<f64>,
    /// Last iteration index whose state was observed.
    pub last_iteration: usize,
    /// Set when a non-finite state stopped the run early.
    pub halted: Option<Error>,
}

/// Runs the configured algorithm, handing every state `y(0) … y(T)` to
/// `observe` without storing the trajectory.
pub fn simulate(config: &ConsensusConfig, graph: &Graph, measurements: &Measurements, mut observe: impl FnMut(usize, &[f64])) -> Result<RunOutcome> {
    config.validate()?;
    let n = graph.node_count();
    check_len(measurements.len(), n)?;

    let mut state = match config.algorithm {
        Algorithm::Nonlinear => map_initial(measurements.values(), config.beta)?.y,
        Algorithm::NaiveMax => measurements.values().to_vec(),
    };
    let mut noise = NoiseSource::new(config.seed, config.stream, config.noise_variance);
    let noise_len = match config.algorithm {
        Algorithm::Nonlinear => n,
        Algorithm::NaiveMax => graph.directed_edge_count(),
    };
    let mut noise_buf = vec![0.0; noise_len];
    let mut transmitted = vec![0.0; n];
    let mut next = vec![0.0; n];

    observe(0, &state);
    for t in 0..config.iterations {
        noise.fill(&mut noise_buf);
        match config.algorithm {
            Algorithm::Nonlinear => {
                let alpha = config.schedule.at(t);
                nonlinear_step_into(&state, graph, &config.function, alpha, &noise_buf, &mut transmitted, &mut next)
            }
            Algorithm::NaiveMax => naive_max_step_into(&state, graph, &noise_buf, &mut next),
        }
        if let Some(node) = next.iter().position(|v| !v.is_finite()) {
            return Ok(RunOutcome {
                final_state: state,
                last_iteration: t,
                halted: Some(Error::NonFiniteState { iteration: t + 1, node }),
            });
        }
        std::mem::swap(&mut state, &mut next);
        observe(t + 1, &state);
    }
    Ok(RunOutcome {
        final_state: state,
        last_iteration: config.iterations,
        halted: None,
    })
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub algorithm: Algorithm,
    pub beta: f64,
    /// `states[t]` is `y(t)` (or `x(t)` for the baseline).
    pub states: Vec<Vec<f64>>,
    /// Per-node max estimates; `None` where the state is not positive.
    pub estimates: Vec<Vec<Option<f64>>>,
    pub noise_seed: u64,
    pub noise_stream: u64,
    /// Mean of the final states.
    pub theta_star_estimate: f64,
    pub halted: Option<Error>,
}

impl Trace {
    pub fn node_count(&self) -> usize {
        self.states[0].len()
    }

    pub fn final_estimates(&self) -> &[Option<f64>] {
        self.estimates.last().expect("trace holds y(0)")
    }

    /// Max estimate carried by the terminal consensus value.
    pub fn consensus_estimate(&self) -> Option<f64> {
        node_estimate(self.algorithm, self.theta_star_estimate, self.node_count(), self.beta)
    }

    /// CSV with header `iteration,node_id,state,estimate`; undefined
    /// estimates are left empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["iteration", "node_id", "state", "estimate"])?;
        for (t, (states, estimates)) in self.states.iter().zip(&self.estimates).enumerate() {
            for (i, (s, e)) in states.iter().zip(estimates).enumerate() {
                let est = e.map(|v| v.to_string()).unwrap_or_default();
                w.write_record([t.to_string(), i.to_string(), s.to_string(), est])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Max estimate for one state value: unmapped for the nonlinear recursion,
/// the state itself for the baseline.
pub fn node_estimate(algorithm: Algorithm, state: f64, n: usize, beta: f64) -> Option<f64> {
    match algorithm {
        Algorithm::Nonlinear => unmap_estimate(state, n, beta).ok(),
        Algorithm::NaiveMax => Some(state),
    }
}

/// Runs and records the full trajectory.
pub fn run(config: &ConsensusConfig, graph: &Graph, measurements: &Measurements) -> Result<Trace> {
    let n = graph.node_count();
    let mut states = Vec::with_capacity(config.iterations + 1);
    let outcome = simulate(config, graph, measurements, |_, y| states.push(y.to_vec()))?;
    let estimates = states
        .iter()
        .map(|y| y.iter().map(|&v| node_estimate(config.algorithm, v, n, config.beta)).collect())
        .collect();
    let theta_star_estimate = outcome.final_state.iter().sum::<f64>() / n as f64;
    Ok(Trace {
        algorithm: config.algorithm,
        beta: config.beta,
        states,
        estimates,
        noise_seed: config.seed,
        noise_stream: config.stream,
        theta_star_estimate,
        halted: outcome.halted,
    })
}

/// Runs `count` replicas concurrently. Replica `k` uses noise stream `k` of
/// the config's seed; results come back in replica order.
pub fn run_replicas<R, F>(config: &ConsensusConfig, count: usize, job: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, ConsensusConfig) -> R + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|k| job(k, config.with_stream(k as u64)))
        .collect()
}
