//! Seeded Monte Carlo replicates and their per-step statistics.
//!
//! Replicate `r` runs with the seed tree `SeedTree::new(master).replicate(r)`,
//! so its trajectory does not depend on how replicates are scheduled.
//! Replicates run in parallel on a dedicated pool of `workers` threads and
//! are merged in replicate order.

use crate::agent::{count_by_state, Population};
use crate::error::{Error, Result};
use crate::grr::ExpectedCounts;
use crate::model::{Initializer, ModelDefinition};
use crate::rng::SeedTree;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub replicates: u64,
    pub horizon: u64,
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            replicates: 100,
            horizon: 50,
            master_seed: crate::DEFAULT_SEED,
            workers: 1,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates", "must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        Ok(())
    }
}

/// Statistics of one time step across replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: u64,
    pub mean: Vec<f64>,
    /// Sample standard deviation (n - 1 denominator); 0 for one replicate.
    pub std: Vec<f64>,
    pub replicates: u64,
    pub grr: Option<Vec<f64>>,
}

/// Per-step, per-state population statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<String>,
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    /// Aggregates `runs[r][t][state]` into means and sample deviations.
    pub fn from_runs(states: Vec<String>, runs: &[Vec<Vec<u64>>]) -> Self {
        let n = runs.len();
        let steps = runs.first().map_or(0, Vec::len);
        let k = states.len();
        let rows = (0..steps)
            .map(|t| {
                let mut mean = vec![0.0; k];
                for run in runs {
                    for (m, &c) in mean.iter_mut().zip(&run[t]) {
                        *m += c as f64;
                    }
                }
                mean.iter_mut().for_each(|m| *m /= n as f64);
                let mut std = vec![0.0; k];
                if n > 1 {
                    for run in runs {
                        for ((s, &c), m) in std.iter_mut().zip(&run[t]).zip(&mean) {
                            *s += (c as f64 - m).powi(2);
                        }
                    }
                    std.iter_mut().for_each(|s| *s = (*s / (n - 1) as f64).sqrt());
                }
                TrajectoryRow {
                    t: t as u64,
                    mean,
                    std,
                    replicates: n as u64,
                    grr: None,
                }
            })
            .collect();
        Trajectory { states, rows }
    }

    /// Attaches a GRR estimate column. Rows are matched by time.
    pub fn with_estimate(mut self, estimate: &[ExpectedCounts]) -> Result<Self> {
        for row in &mut self.rows {
            if let Some(e) = estimate.iter().find(|e| e.time == row.t) {
                if e.counts.len() != self.states.len() {
                    return Err(Error::DimensionMismatch {
                        expected: self.states.len(),
                        actual: e.counts.len(),
                    });
                }
                row.grr = Some(e.counts.clone());
            }
        }
        Ok(self)
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    /// Mean series of one state.
    pub fn mean_of(&self, state: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean[state]).collect()
    }
}

/// Runs one replicate and returns its per-step state counts. `observe` is
/// called on every population, including the initial one.
pub fn run_replicate(
    model: &ModelDefinition,
    init: &Initializer,
    seeds: SeedTree,
    horizon: u64,
    mut observe: impl FnMut(&Population),
) -> Vec<Vec<u64>> {
    let mut population = init.build(model, &mut seeds.init_stream());
    let mut counts = Vec::with_capacity(horizon as usize + 1);
    observe(&population);
    counts.push(count_by_state(&population, model.states()));
    for _ in 0..horizon {
        population = model.step(&population, &seeds);
        observe(&population);
        counts.push(count_by_state(&population, model.states()));
    }
    counts
}

/// Per-replicate counts `[r][t][state]`, ordered by replicate index.
pub fn run_replicates(
    model: &ModelDefinition,
    init: &Initializer,
    config: &EnsembleConfig,
) -> Result<Vec<Vec<Vec<u64>>>> {
    config.validate()?;
    let root = SeedTree::new(config.master_seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    Ok(pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| run_replicate(model, init, root.replicate(r), config.horizon, |_| {}))
            .collect()
    }))
}

pub fn run_ensemble(model: &ModelDefinition, init: &Initializer, config: &EnsembleConfig) -> Result<Trajectory> {
    let runs = run_replicates(model, init, config)?;
    Ok(Trajectory::from_runs(model.states().labels().to_vec(), &runs))
}
