//! Agents, state tables and populations.

use crate::error::{Error, Result};
use crate::space::{Environment, Neighborhood, Position};
use std::collections::HashSet;

/// Index into a model's state table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u16);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The finite state set of a model, with a unique label per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTable {
    labels: Vec<String>,
}

impl StateTable {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::invalid("states", "state table is empty"));
        }
        if labels.len() > u16::MAX as usize {
            return Err(Error::invalid("states", "too many states"));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateState(l.clone()));
            }
        }
        Ok(StateTable { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: StateId) -> &str {
        &self.labels[id.index()]
    }

    pub fn id(&self, label: &str) -> Result<StateId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| StateId(i as u16))
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    pub fn contains(&self, id: StateId) -> bool {
        id.index() < self.labels.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.labels.len()).map(|i| StateId(i as u16))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// An agent: state, position, and the unit square it interacts through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub state: StateId,
    pub position: Position,
    pub neighborhood: Neighborhood,
}

impl Agent {
    /// Builds an agent whose neighborhood is the unit square containing `position`.
    pub fn at(state: StateId, position: Position, env: &Environment) -> Self {
        Agent {
            state,
            position,
            neighborhood: env.neighborhood_of(position),
        }
    }

    /// Same agent with a new state and position, neighborhood recomputed.
    pub fn moved_to(&self, state: StateId, position: Position, env: &Environment) -> Self {
        Agent::at(state, position, env)
    }

    pub fn is_consistent(&self, env: &Environment) -> bool {
        env.contains(self.position)
            && env.is_valid_neighborhood(self.neighborhood)
            && self.neighborhood.contains(self.position)
    }
}

/// One time step's multiset of agents. Container order is stable and the
/// index of an agent keys its randomness for the next step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Population {
    pub agents: Vec<Agent>,
    pub time: u64,
    /// Agents dropped by `prune_dead`, tallied by state so counts stay exact.
    pub pruned: Vec<u64>,
}

impl Population {
    pub fn new(agents: Vec<Agent>, time: u64) -> Self {
        Population {
            agents,
            time,
            pruned: Vec::new(),
        }
    }

    pub fn empty(time: u64) -> Self {
        Population::new(Vec::new(), time)
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Agent> {
        self.agents.iter()
    }

    /// Multiset membership.
    pub fn contains(&self, agent: &Agent) -> bool {
        self.agents.iter().any(|a| a == agent)
    }
}

/// Number of agents in each state, `D_U(t)` for every `U`.
pub fn count_by_state(population: &Population, states: &StateTable) -> Vec<u64> {
    let mut counts = vec![0u64; states.len()];
    for a in &population.agents {
        counts[a.state.index()] += 1;
    }
    for (c, p) in counts.iter_mut().zip(&population.pruned) {
        *c += p;
    }
    counts
}
