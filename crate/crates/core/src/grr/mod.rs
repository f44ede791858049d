//! Global recurrence rules: expected per-state counts one step ahead.
//!
//! For every state `U`,
//!
//! ```text
//! E[D_U(t+1)] = sum_V E[D_V(t)] * (P(B^{V,U}) + mult(V,U) * P(C^{V,U}))
//! ```
//!
//! The region probabilities come either from probe sampling against a
//! population ([`estimate_region_probabilities`]) or from closed forms that
//! assume agents are spread uniformly at every step.

mod binomial;
mod regions;

pub use binomial::{binomial_band, poisson_band};
pub use regions::{estimate_region_probabilities, RegionProbabilities};

use crate::agent::{Agent, Population};
use crate::error::{Error, Result};
use crate::gol::{self, GolParams};
use crate::model::ModelDefinition;
use crate::rib::{self, RibParams};
use crate::rng::SeedTree;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Expected number of agents per state at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCounts {
    pub time: u64,
    pub counts: Vec<f64>,
}

impl ExpectedCounts {
    pub fn new(time: u64, counts: Vec<f64>) -> Result<Self> {
        if let Some(c) = counts.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
            return Err(Error::invalid("counts", format!("{c} is not a non-negative count")));
        }
        Ok(ExpectedCounts { time, counts })
    }

    pub fn from_counts(time: u64, counts: &[u64]) -> Self {
        ExpectedCounts {
            time,
            counts: counts.iter().map(|&c| c as f64).collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// One application of the recurrence with given region probabilities.
pub fn grr_generic_step(counts: &ExpectedCounts, probs: &RegionProbabilities) -> Result<ExpectedCounts> {
    let n = probs.states();
    if counts.counts.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: counts.counts.len(),
        });
    }
    let mut next = vec![0.0; n];
    for (v, &d_v) in counts.counts.iter().enumerate() {
        if d_v == 0.0 {
            continue;
        }
        for (u, slot) in next.iter_mut().enumerate() {
            *slot += d_v
                * (probs.transition[v][u] + probs.multiplicity[v][u] * probs.production[v][u]);
        }
    }
    Ok(ExpectedCounts {
        time: counts.time + 1,
        counts: next,
    })
}

/// Neighbor-count law used by the mean-field GoL recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborLaw {
    /// `K ~ Binomial(round(n) - 1, 1 / w^2)`.
    #[default]
    Binomial,
    /// `K ~ Poisson(n / w^2)`.
    Poisson,
}

impl FromStr for NeighborLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binomial" => Ok(NeighborLaw::Binomial),
            "poisson" => Ok(NeighborLaw::Poisson),
            other => Err(Error::invalid("mode", format!("unknown neighbor law `{other}`"))),
        }
    }
}

impl fmt::Display for NeighborLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NeighborLaw::Binomial => "binomial",
            NeighborLaw::Poisson => "poisson",
        })
    }
}

/// Survival and reproduction probabilities of a living agent when `n_t`
/// living agents are spread uniformly.
pub fn gol_band_probabilities(n_t: f64, params: &GolParams, mode: NeighborLaw) -> (f64, f64) {
    let band = |lo: u32, hi: u32| match mode {
        NeighborLaw::Binomial => {
            let m = (n_t.round() as u64).saturating_sub(1);
            binomial_band(m, 1.0 / params.cells() as f64, i64::from(lo), i64::from(hi))
        }
        NeighborLaw::Poisson => {
            poisson_band(n_t / params.cells() as f64, i64::from(lo), i64::from(hi))
        }
    };
    (band(params.l_surv, params.u_surv), band(params.l_rep, params.u_rep))
}

/// Mean-field recurrence for the living count: `n_{t+1} = n_t (P_surv + P_rep)`.
pub fn grr_gol_step(n_t: f64, params: &GolParams, mode: NeighborLaw) -> f64 {
    if n_t <= 0.0 {
        return 0.0;
    }
    let (surv, rep) = gol_band_probabilities(n_t, params, mode);
    n_t * (surv + rep)
}

/// Mean-field recurrence of the rib model over
/// `[undetermined, proximal, distal, dead]`.
///
/// Undetermined cells that survive split between committing (flux `F`) and
/// staying undetermined; committed flux goes proximal in proportion to the
/// area where the gradient is above threshold.
pub fn grr_rib_step(counts: &ExpectedCounts, params: &RibParams) -> Result<ExpectedCounts> {
    let n = rib::rib_states().len();
    if counts.counts.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: counts.counts.len(),
        });
    }
    let [y, r, b, d] = [0, 1, 2, 3].map(|i| counts.counts[i]);
    let a_prox = params.proximal_area_fraction();
    let surviving = y * (1.0 - params.die_undet);
    let flux = surviving * params.commit_rate;
    let committed_growth = (1.0 - params.die_comm) * (1.0 + params.div_comm);

    let next_y = surviving * (1.0 - params.commit_rate) * (1.0 + params.div_undet);
    let next_r = r * committed_growth + flux * a_prox;
    let next_b = b * committed_growth + flux * (1.0 - a_prox);
    let next_d = d + y * params.die_undet + (r + b) * params.die_comm;
    Ok(ExpectedCounts {
        time: counts.time + 1,
        counts: vec![next_y, next_r, next_b, next_d],
    })
}

/// How each step of a GRR trajectory is computed.
#[derive(Debug, Clone)]
pub enum Stepper {
    /// Closed-form GoL recurrence over `[dead, alive]`.
    Gol { params: GolParams, mode: NeighborLaw },
    /// Closed-form rib recurrence over `[undetermined, proximal, distal, dead]`.
    Rib { params: RibParams },
    /// Region probabilities re-estimated every step by probing a population
    /// synthesized from the current expected counts with uniform positions.
    Probe(ProbeStepper),
}

#[derive(Debug, Clone)]
pub struct ProbeStepper {
    pub model: ModelDefinition,
    pub samples_per_state: u64,
    pub seeds: SeedTree,
}

impl ProbeStepper {
    fn synthesize(&self, counts: &ExpectedCounts) -> Population {
        let env = *self.model.environment();
        let mut rng = self.seeds.stream(&[0x5359_4e54, counts.time]);
        let mut agents = Vec::new();
        for (state, &c) in self.model.states().ids().zip(&counts.counts) {
            // Dead agents are inert and never read by any rule of a model
            // with a death state, so they are not materialized.
            if self.model.is_dead(state) {
                continue;
            }
            for _ in 0..c.round() as u64 {
                agents.push(Agent::at(state, env.sample_position(&mut rng), &env));
            }
        }
        Population::new(agents, counts.time)
    }

    pub fn step(&self, counts: &ExpectedCounts) -> Result<ExpectedCounts> {
        let population = self.synthesize(counts);
        let probs = estimate_region_probabilities(&population, &self.model, self.samples_per_state, &self.seeds)?;
        grr_generic_step(counts, &probs)
    }
}

impl Stepper {
    pub fn step(&self, counts: &ExpectedCounts) -> Result<ExpectedCounts> {
        match self {
            Stepper::Gol { params, mode } => {
                if counts.counts.len() != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        actual: counts.counts.len(),
                    });
                }
                let alive = counts.counts[gol::ALIVE.index()];
                let (surv, _) = if alive > 0.0 {
                    gol_band_probabilities(alive, params, *mode)
                } else {
                    (0.0, 0.0)
                };
                let mut next = vec![0.0; 2];
                next[gol::ALIVE.index()] = grr_gol_step(alive, params, *mode);
                next[gol::DEAD.index()] = counts.counts[gol::DEAD.index()] + alive * (1.0 - surv);
                Ok(ExpectedCounts {
                    time: counts.time + 1,
                    counts: next,
                })
            }
            Stepper::Rib { params } => grr_rib_step(counts, params),
            Stepper::Probe(p) => p.step(counts),
        }
    }
}

/// Expected counts for `t = initial.time ..= initial.time + horizon`.
pub fn grr_trajectory(initial: ExpectedCounts, stepper: &Stepper, horizon: u64) -> Result<Vec<ExpectedCounts>> {
    if horizon == 0 {
        return Err(Error::invalid("horizon", "must be at least 1"));
    }
    let mut out = Vec::with_capacity(horizon as usize + 1);
    out.push(initial);
    for _ in 0..horizon {
        let next = stepper.step(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}
