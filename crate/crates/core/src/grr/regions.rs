//! Transition and production regions, estimated with probe agents.
//!
//! A point `x` belongs to the `(V, U)`-transition region at time `t` when a
//! state-`V` agent placed at `x` would become state `U` under the
//! transition rule evaluated against `X_t`; likewise for production. The
//! probability that a uniformly placed agent lands in a region is estimated
//! by placing probes at uniform positions and evaluating the model's rules
//! on each.

use crate::agent::{Agent, Population};
use crate::error::{Error, Result};
use crate::model::ModelDefinition;
use crate::rng::SeedTree;
use rayon::prelude::*;

/// Channel of a probe's randomness used to place it; rules never read it.
const CHANNEL_PLACE: u64 = u64::MAX;

/// Region probabilities indexed `[V][U]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionProbabilities {
    /// `P(p(a) in B_t^{V,U})`.
    pub transition: Vec<Vec<f64>>,
    /// `P(p(a) in C_t^{V,U})`.
    pub production: Vec<Vec<f64>>,
    /// Expected number of state-`U` offspring given that at least one is produced.
    pub multiplicity: Vec<Vec<f64>>,
}

impl RegionProbabilities {
    pub fn new(
        transition: Vec<Vec<f64>>,
        production: Vec<Vec<f64>>,
        multiplicity: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = transition.len();
        for m in [&transition, &production, &multiplicity] {
            if m.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: m.len() });
            }
            if let Some(row) = m.iter().find(|r| r.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, actual: row.len() });
            }
        }
        for (v, row) in transition.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::invalid("transition", format!("row {v} sums to {sum}")));
            }
        }
        let in_unit = |x: &f64| (0.0..=1.0).contains(x);
        if !transition.iter().chain(&production).flatten().all(in_unit) {
            return Err(Error::invalid("probabilities", "entry outside [0, 1]"));
        }
        if !multiplicity.iter().flatten().all(|&m| m >= 0.0 && m.is_finite()) {
            return Err(Error::invalid("multiplicity", "negative or non-finite entry"));
        }
        Ok(RegionProbabilities {
            transition,
            production,
            multiplicity,
        })
    }

    pub fn states(&self) -> usize {
        self.transition.len()
    }
}

#[derive(Default, Clone)]
struct ProbeTally {
    transition: Vec<u64>,
    produced: Vec<u64>,
    offspring: Vec<u64>,
}

impl ProbeTally {
    fn new(n: usize) -> Self {
        ProbeTally {
            transition: vec![0; n],
            produced: vec![0; n],
            offspring: vec![0; n],
        }
    }

    fn merge(mut self, other: ProbeTally) -> Self {
        for (a, b) in [
            (&mut self.transition, &other.transition),
            (&mut self.produced, &other.produced),
            (&mut self.offspring, &other.offspring),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self
    }
}

/// Estimates region probabilities of `model` against `population` with
/// `samples_per_state` uniform probes per state.
///
/// Rows of the death state are exact: the transition row is the indicator
/// of the death state and nothing is produced.
pub fn estimate_region_probabilities(
    population: &Population,
    model: &ModelDefinition,
    samples_per_state: u64,
    seeds: &SeedTree,
) -> Result<RegionProbabilities> {
    if samples_per_state == 0 {
        return Err(Error::invalid("samples_per_state", "must be at least 1"));
    }
    let n = model.states().len();
    let env = *model.environment();
    let snapshot = model.snapshot(population);
    let t = population.time;

    let mut transition = vec![vec![0.0; n]; n];
    let mut production = vec![vec![0.0; n]; n];
    let mut multiplicity = vec![vec![0.0; n]; n];

    for v in model.states().ids() {
        let vi = v.index();
        if model.is_dead(v) {
            transition[vi][vi] = 1.0;
            continue;
        }
        let tally = (0..samples_per_state)
            .into_par_iter()
            .fold(
                || ProbeTally::new(n),
                |mut acc, k| {
                    let randomness = seeds.probe(t, vi as u64, k);
                    let position = env.sample_position(&mut randomness.channel(CHANNEL_PLACE));
                    let probe = Agent::at(v, position, &env);
                    let next = model.probe_transition(&probe, &snapshot, randomness);
                    acc.transition[next.state.index()] += 1;
                    let mut per_state = vec![0u64; n];
                    for b in model.probe_production(&probe, &snapshot, randomness) {
                        per_state[b.state.index()] += 1;
                    }
                    for (u, &c) in per_state.iter().enumerate() {
                        if c > 0 {
                            acc.produced[u] += 1;
                            acc.offspring[u] += c;
                        }
                    }
                    acc
                },
            )
            .reduce(|| ProbeTally::new(n), ProbeTally::merge);

        let total = samples_per_state as f64;
        for u in 0..n {
            transition[vi][u] = tally.transition[u] as f64 / total;
            production[vi][u] = tally.produced[u] as f64 / total;
            if tally.produced[u] > 0 {
                multiplicity[vi][u] = tally.offspring[u] as f64 / tally.produced[u] as f64;
            }
        }
    }
    RegionProbabilities::new(transition, production, multiplicity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gol::{build_gol_model, GolParams, ALIVE, DEAD};

    #[test]
    fn zero_samples_rejected() {
        let m = build_gol_model(GolParams::reference()).unwrap();
        let err = estimate_region_probabilities(&Population::empty(0), &m, 0, &SeedTree::new(0));
        assert!(err.is_err());
    }

    #[test]
    fn empty_gol_population_kills_every_probe() {
        let m = build_gol_model(GolParams::reference()).unwrap();
        let r = estimate_region_probabilities(&Population::empty(0), &m, 500, &SeedTree::new(0)).unwrap();
        assert_eq!(r.transition[ALIVE.index()][DEAD.index()], 1.0);
        assert_eq!(r.transition[ALIVE.index()][ALIVE.index()], 0.0);
        assert_eq!(r.production[ALIVE.index()], vec![0.0, 0.0]);
        assert_eq!(r.transition[DEAD.index()], vec![1.0, 0.0]);
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let bad = RegionProbabilities::new(
            vec![vec![0.5, 0.4], vec![0.0, 1.0]],
            vec![vec![0.0; 2]; 2],
            vec![vec![0.0; 2]; 2],
        );
        assert!(bad.is_err());
        let ragged = RegionProbabilities::new(vec![vec![1.0]], vec![vec![0.0; 2]], vec![vec![0.0]]);
        assert!(matches!(ragged, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn estimate_does_not_depend_on_thread_count() {
        let m = build_gol_model(GolParams::reference()).unwrap();
        let seeds = SeedTree::new(4);
        let pop = crate::gol::uniform_random_init(800, &m, &mut seeds.init_stream()).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_region_probabilities(&pop, &m, 3000, &seeds).unwrap());
        let b = four.install(|| estimate_region_probabilities(&pop, &m, 3000, &seeds).unwrap());
        assert_eq!(a, b);
    }
}
