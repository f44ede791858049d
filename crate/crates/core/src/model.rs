//! Models, update rules and the synchronous simulation step.
//!
//! A step evaluates the transition rule and the production rule of every
//! agent against one immutable snapshot of the population and joins the
//! results:
//!
//! ```text
//! X_{t+1} = [f(a, X_t) | a in X_t]  ++  concat [g(a, X_t) | a in X_t]
//! ```
//!
//! Agent `i` at time `t` draws all of its randomness from the substream
//! keyed by `(seed, t, i)`, so evaluation order has no observable effect.

use crate::agent::{Agent, Population, StateId, StateTable};
use crate::error::{Error, Result};
use crate::rng::{AgentRandomness, RandomStream, SeedTree};
use crate::space::{Environment, Neighborhood};
use std::fmt;
use std::sync::Arc;

/// Read-only view of `X_t` with per-square, per-state occupancy counts.
#[derive(Debug)]
pub struct Snapshot<'a> {
    population: &'a Population,
    environment: Environment,
    states: usize,
    cell_counts: Vec<u32>,
}

impl<'a> Snapshot<'a> {
    pub fn new(population: &'a Population, environment: Environment, states: usize) -> Self {
        let mut cell_counts = vec![0u32; environment.cells() * states];
        for a in &population.agents {
            let cell = environment.cell_index(a.neighborhood);
            cell_counts[cell * states + a.state.index()] += 1;
        }
        Snapshot {
            population,
            environment,
            states,
            cell_counts,
        }
    }

    pub fn population(&self) -> &'a Population {
        self.population
    }

    pub fn environment(&self) -> &Environment {
        &self.environment
    }

    pub fn time(&self) -> u64 {
        self.population.time
    }

    /// Number of agents in `state` located in `square`.
    pub fn count_in(&self, square: Neighborhood, state: StateId) -> u32 {
        let cell = self.environment.cell_index(square);
        self.cell_counts[cell * self.states + state.index()]
    }
}

/// What a rule sees while updating one agent.
pub struct RuleContext<'s, 'a> {
    snapshot: &'s Snapshot<'a>,
    member: bool,
    randomness: AgentRandomness,
}

impl<'s, 'a> RuleContext<'s, 'a> {
    pub fn snapshot(&self) -> &Snapshot<'a> {
        self.snapshot
    }

    pub fn environment(&self) -> &Environment {
        &self.snapshot.environment
    }

    pub fn randomness(&self) -> AgentRandomness {
        self.randomness
    }

    pub fn stream(&self, channel: u64) -> RandomStream {
        self.randomness.channel(channel)
    }

    /// Agents in `state` inside `square`, excluding one copy of `focal` when
    /// the focal agent belongs to the snapshot (the multiset `X \ a`).
    pub fn others_in(&self, focal: &Agent, square: Neighborhood, state: StateId) -> u32 {
        let c = self.snapshot.count_in(square, state);
        if self.member && focal.state == state && focal.neighborhood == square {
            c - 1
        } else {
            c
        }
    }
}

/// Local transition and production rules of a model.
///
/// Implementations only see live (non-death) agents; the engine handles the
/// death state and the membership guard.
pub trait UpdateRules: Send + Sync + fmt::Debug {
    fn transition(&self, agent: &Agent, ctx: &RuleContext<'_, '_>) -> Agent;

    /// Appends the offspring of `agent` to `out`.
    fn production(&self, agent: &Agent, ctx: &RuleContext<'_, '_>, out: &mut Vec<Agent>);
}

/// Per-step event tallies, indexed `[from][to]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTally {
    /// `transitions[v][u]`: agents that went from state `v` to `u`.
    pub transitions: Vec<Vec<u64>>,
    /// `births[v][u]`: offspring in state `u` produced by parents in state `v`.
    pub births: Vec<Vec<u64>>,
}

impl StepTally {
    fn new(states: usize) -> Self {
        StepTally {
            transitions: vec![vec![0; states]; states],
            births: vec![vec![0; states]; states],
        }
    }
}

/// An agent-based model: states, environment, update rules and an optional
/// absorbing death state.
#[derive(Clone)]
pub struct ModelDefinition {
    name: String,
    states: StateTable,
    environment: Environment,
    death_state: Option<StateId>,
    rules: Arc<dyn UpdateRules>,
    prune_dead: bool,
}

impl fmt::Debug for ModelDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelDefinition")
            .field("name", &self.name)
            .field("states", &self.states)
            .field("environment", &self.environment)
            .field("death_state", &self.death_state)
            .field("rules", &self.rules)
            .field("prune_dead", &self.prune_dead)
            .finish()
    }
}

impl ModelDefinition {
    pub fn new(
        name: impl Into<String>,
        states: StateTable,
        environment: Environment,
        death_state: Option<StateId>,
        rules: Arc<dyn UpdateRules>,
    ) -> Result<Self> {
        if let Some(d) = death_state {
            if !states.contains(d) {
                return Err(Error::invalid("death_state", format!("{d:?} not in state table")));
            }
        }
        Ok(ModelDefinition {
            name: name.into(),
            states,
            environment,
            death_state,
            rules,
            prune_dead: false,
        })
    }

    /// Drop dead agents from the container after each step. Counts stay
    /// exact through `Population::pruned`; agent indices (and so the random
    /// substreams) differ from an unpruned run.
    pub fn with_prune_dead(mut self, prune: bool) -> Self {
        self.prune_dead = prune;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &StateTable {
        &self.states
    }

    pub fn environment(&self) -> &Environment {
        &self.environment
    }

    pub fn death_state(&self) -> Option<StateId> {
        self.death_state
    }

    pub fn prune_dead(&self) -> bool {
        self.prune_dead
    }

    pub fn rules(&self) -> &dyn UpdateRules {
        self.rules.as_ref()
    }

    pub fn is_dead(&self, state: StateId) -> bool {
        self.death_state == Some(state)
    }

    pub fn snapshot<'a>(&self, population: &'a Population) -> Snapshot<'a> {
        Snapshot::new(population, self.environment, self.states.len())
    }

    /// `f(agent, X)`. Returns `agent` unchanged when it is dead or not a
    /// member of the snapshot.
    pub fn transition_rule(
        &self,
        agent: &Agent,
        snapshot: &Snapshot<'_>,
        randomness: AgentRandomness,
    ) -> Agent {
        if self.is_dead(agent.state) || !snapshot.population().contains(agent) {
            return *agent;
        }
        self.apply_transition(agent, snapshot, true, randomness)
    }

    /// `g(agent, X)`. Empty when `agent` is dead or not a member of the snapshot.
    pub fn production_rule(
        &self,
        agent: &Agent,
        snapshot: &Snapshot<'_>,
        randomness: AgentRandomness,
    ) -> Vec<Agent> {
        let mut out = Vec::new();
        if !self.is_dead(agent.state) && snapshot.population().contains(agent) {
            self.apply_production(agent, snapshot, true, randomness, &mut out);
        }
        out
    }

    /// Transition of a probe agent placed into the snapshot from outside.
    /// The probe is not a member, so every agent of `X` counts as a neighbor.
    pub fn probe_transition(
        &self,
        probe: &Agent,
        snapshot: &Snapshot<'_>,
        randomness: AgentRandomness,
    ) -> Agent {
        if self.is_dead(probe.state) {
            return *probe;
        }
        self.apply_transition(probe, snapshot, false, randomness)
    }

    pub fn probe_production(
        &self,
        probe: &Agent,
        snapshot: &Snapshot<'_>,
        randomness: AgentRandomness,
    ) -> Vec<Agent> {
        let mut out = Vec::new();
        if !self.is_dead(probe.state) {
            self.apply_production(probe, snapshot, false, randomness, &mut out);
        }
        out
    }

    fn apply_transition(
        &self,
        agent: &Agent,
        snapshot: &Snapshot<'_>,
        member: bool,
        randomness: AgentRandomness,
    ) -> Agent {
        let ctx = RuleContext {
            snapshot,
            member,
            randomness,
        };
        let next = self.rules.transition(agent, &ctx);
        debug_assert!(next.is_consistent(&self.environment), "{next:?}");
        next
    }

    fn apply_production(
        &self,
        agent: &Agent,
        snapshot: &Snapshot<'_>,
        member: bool,
        randomness: AgentRandomness,
        out: &mut Vec<Agent>,
    ) {
        let ctx = RuleContext {
            snapshot,
            member,
            randomness,
        };
        let before = out.len();
        self.rules.production(agent, &ctx, out);
        debug_assert!(out[before..].iter().all(|b| b.is_consistent(&self.environment)));
    }

    /// One synchronous update `X_t -> X_{t+1}`.
    pub fn step(&self, population: &Population, seeds: &SeedTree) -> Population {
        self.step_tallied(population, seeds).0
    }

    pub fn step_tallied(&self, population: &Population, seeds: &SeedTree) -> (Population, StepTally) {
        let n_states = self.states.len();
        let snapshot = self.snapshot(population);
        let mut tally = StepTally::new(n_states);
        let mut pruned = population.pruned.clone();
        pruned.resize(n_states, 0);

        let mut next = Vec::with_capacity(population.len());
        let mut born = Vec::new();
        for (i, agent) in population.agents.iter().enumerate() {
            let v = agent.state.index();
            let after = if self.is_dead(agent.state) {
                *agent
            } else {
                let randomness = seeds.agent(population.time, i as u64);
                let start = born.len();
                self.apply_production(agent, &snapshot, true, randomness, &mut born);
                for b in &born[start..] {
                    tally.births[v][b.state.index()] += 1;
                }
                self.apply_transition(agent, &snapshot, true, randomness)
            };
            tally.transitions[v][after.state.index()] += 1;
            if self.prune_dead && self.is_dead(after.state) {
                pruned[after.state.index()] += 1;
            } else {
                next.push(after);
            }
        }
        for b in born {
            if self.prune_dead && self.is_dead(b.state) {
                pruned[b.state.index()] += 1;
            } else {
                next.push(b);
            }
        }

        let mut out = Population::new(next, population.time + 1);
        if pruned.iter().any(|&c| c > 0) {
            out.pruned = pruned;
        }
        (out, tally)
    }

    /// Runs `steps` updates starting from `initial`, returning every population.
    pub fn simulate(&self, initial: Population, seeds: &SeedTree, steps: u64) -> Vec<Population> {
        let mut out = Vec::with_capacity(steps as usize + 1);
        out.push(initial);
        for _ in 0..steps {
            let next = self.step(out.last().unwrap(), seeds);
            out.push(next);
        }
        out
    }
}

/// `n` agents in `state`, positions i.i.d. uniform over the environment, at time 0.
pub fn uniform_population(
    environment: &Environment,
    state: StateId,
    n: u64,
    rng: &mut RandomStream,
) -> Population {
    let agents = (0..n)
        .map(|_| Agent::at(state, environment.sample_position(rng), environment))
        .collect();
    Population::new(agents, 0)
}

/// How replicate populations are seeded at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initializer {
    /// `count` agents of `state` placed uniformly at random.
    Uniform { state: StateId, count: u64 },
}

impl Initializer {
    pub fn build(&self, model: &ModelDefinition, rng: &mut RandomStream) -> Population {
        match *self {
            Initializer::Uniform { state, count } => {
                uniform_population(model.environment(), state, count, rng)
            }
        }
    }
}
