//! Executing experiments: trajectories, ensemble reduction, sweeps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::output::write_record;
use crate::circuits::Propagator;
use crate::error::{Error, Result};
use crate::observables::{
    mp_bin_probabilities, numerical_rank, otoc_single, pairwise_sum, purity, purity_p,
    rescaled_histogram, spectrum, total_variation,
};
use crate::statevec::StateVector;

/// Result of one experiment: one row of observables per time step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    /// `rows[t]` lines up with `columns`; the first entry is `t` itself.
    pub rows: Vec<Vec<f64>>,
    /// Not part of the deterministic payload.
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

impl RunRecord {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn times(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0] as usize).collect()
    }
}

/// Column names as a function of the requested observables only.
pub fn columns(config: &ExperimentConfig) -> Vec<String> {
    let obs = &config.observables;
    let mut cols = vec!["t".to_string()];
    let orders = obs.orders();
    cols.extend(orders.iter().map(|p| format!("I{p}")));
    if orders.contains(&2) {
        cols.push("I2_std".into());
    }
    if obs.rank {
        cols.push("rank".into());
    }
    if let Some(k) = obs.spectrum {
        cols.extend((1..=k).map(|i| format!("lambda_{i}")));
    }
    if obs.mp_distance {
        cols.push("tv_mp".into());
    }
    cols.extend(obs.otoc.iter().map(|s| s.column()));
    cols
}

/// What one trajectory measured at one time.
#[derive(Clone, Debug, Default)]
struct Sample {
    purities: Vec<f64>,
    rank: usize,
    lambdas: Vec<f64>,
    histogram: Vec<f64>,
    otoc: Vec<f64>,
}

fn measure(config: &ExperimentConfig, state: &StateVector, t: usize) -> Result<Sample> {
    let obs = &config.observables;
    let orders = obs.orders();
    let mut s = Sample::default();
    if obs.needs_spectrum() {
        let spec = spectrum(state, t)?;
        s.purities = orders.iter().map(|&p| purity_p(&spec, p)).collect::<Result<_>>()?;
        if obs.rank {
            s.rank = numerical_rank(&spec);
        }
        if let Some(k) = obs.spectrum {
            s.lambdas = spec.eigenvalues[..k].to_vec();
        }
        if obs.mp_distance {
            s.histogram = rescaled_histogram([spec.eigenvalues.as_slice()], obs.mp_bins);
        }
    } else if !orders.is_empty() {
        s.purities = vec![purity(state)?];
    }
    Ok(s)
}

fn trajectory(config: &ExperimentConfig, index: usize) -> Result<Vec<Sample>> {
    let circuit = &config.circuit;
    let psi = StateVector::random_product(circuit.n, config.ensemble.state_seed(index))?;
    let kick_seed = circuit.gate.kick_seed.stream(index as u64);
    let mut samples = vec![Sample::default(); config.t_max + 1];
    if config.observables.needs_state() {
        let mut prop = Propagator::new(circuit, kick_seed)?;
        let mut state = psi.clone();
        for (t, sample) in samples.iter_mut().enumerate() {
            if t > 0 {
                prop.advance(&mut state)?;
            }
            *sample = measure(config, &state, t)?;
        }
    }
    for spec in &config.observables.otoc {
        let values = otoc_single(circuit, spec, &psi, config.t_max, kick_seed)?;
        for (sample, v) in samples.iter_mut().zip(values) {
            sample.otoc.push(v);
        }
    }
    Ok(samples)
}

fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let dev: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (pairwise_sum(&dev) / (xs.len() - 1) as f64).sqrt()
}

fn reduce_row(config: &ExperimentConfig, t: usize, samples: &[&Sample]) -> Vec<f64> {
    let obs = &config.observables;
    let orders = obs.orders();
    let column = |f: &dyn Fn(&Sample) -> f64| -> Vec<f64> { samples.iter().map(|s| f(s)).collect() };
    let mut row = vec![t as f64];
    for i in 0..orders.len() {
        row.push(mean(&column(&|s| s.purities[i])));
    }
    if let Some(i) = orders.iter().position(|&p| p == 2) {
        row.push(sample_std(&column(&|s| s.purities[i])));
    }
    if obs.rank {
        row.push(samples.iter().map(|s| s.rank).max().unwrap_or(0) as f64);
    }
    if let Some(k) = obs.spectrum {
        for i in 0..k {
            row.push(mean(&column(&|s| s.lambdas[i])));
        }
    }
    if obs.mp_distance {
        let pooled: Vec<f64> = (0..obs.mp_bins).map(|b| mean(&column(&|s| s.histogram[b]))).collect();
        row.push(total_variation(&pooled, &mp_bin_probabilities(obs.mp_bins)));
    }
    for i in 0..obs.otoc.len() {
        row.push(mean(&column(&|s| s.otoc[i])));
    }
    row
}

/// Runs the ensemble and returns the averaged rows; writes nothing.
///
/// Trajectory `i` uses initial state seed `(master_seed, i)` and kick stream
/// `i`, so the result does not depend on the number of worker threads.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    config.check_resources(rayon::current_num_threads())?;
    let start = Instant::now();
    let per_state: Vec<Vec<Sample>> = (0..config.ensemble.num_states)
        .into_par_iter()
        .map(|i| trajectory(config, i))
        .collect::<Result<_>>()?;
    let rows = (0..=config.t_max)
        .map(|t| {
            let at_t: Vec<&Sample> = per_state.iter().map(|traj| &traj[t]).collect();
            reduce_row(config, t, &at_t)
        })
        .collect::<Vec<_>>();
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite observable encountered".into()));
    }
    Ok(RunRecord {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.hash(),
        config: config.clone(),
        columns: columns(config),
        rows,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// [`run`], then writes the configured output file, if any.
pub fn execute(config: &ExperimentConfig) -> Result<RunRecord> {
    let record = run(config)?;
    if let Some(path) = &config.output.path {
        write_record(&record, path, config.output.format)?;
    }
    Ok(record)
}

/// Executes every config on a pool of `parallelism` threads. A failing
/// config does not stop the others.
pub fn sweep(configs: &[ExperimentConfig], parallelism: usize) -> Result<Vec<Result<RunRecord>>> {
    if configs.is_empty() {
        return Err(Error::invalid("sweep needs at least one config"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(|| configs.iter().map(execute).collect()))
}
