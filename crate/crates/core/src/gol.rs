//! The Game-of-Life-like family `G(w, l_surv, u_surv, l_rep, u_rep)`.
//!
//! A living agent counts the other living agents in its unit square. It
//! survives (and takes one random unit step) when the count is inside the
//! survival band, otherwise it dies in place. Independently, it emits one
//! living offspring, displaced by its own random unit step from the
//! parent's current position, when the count is inside the reproduction band.

use crate::agent::{Agent, Population, StateId, StateTable};
use crate::error::{Error, Result};
use crate::model::{uniform_population, ModelDefinition, RuleContext, UpdateRules};
use crate::rng::RandomStream;
use crate::space::Environment;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

pub const DEAD: StateId = StateId(0);
pub const ALIVE: StateId = StateId(1);

const CHANNEL_MOVE: u64 = 1;
const CHANNEL_OFFSPRING: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GolParams {
    pub w: u32,
    pub l_surv: u32,
    pub u_surv: u32,
    pub l_rep: u32,
    pub u_rep: u32,
}

impl GolParams {
    pub fn new(w: u32, l_surv: u32, u_surv: u32, l_rep: u32, u_rep: u32) -> Result<Self> {
        let p = GolParams {
            w,
            l_surv,
            u_surv,
            l_rep,
            u_rep,
        };
        p.validate()?;
        Ok(p)
    }

    /// `G(20, 2, 8, 2, 4)`.
    pub fn reference() -> Self {
        GolParams {
            w: 20,
            l_surv: 2,
            u_surv: 8,
            l_rep: 2,
            u_rep: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.w == 0 {
            return Err(Error::invalid("w", "must be at least 1"));
        }
        if self.l_surv > self.u_surv {
            return Err(Error::invalid(
                "l_surv",
                format!("survival band [{}, {}] is empty", self.l_surv, self.u_surv),
            ));
        }
        if self.l_rep > self.u_rep {
            return Err(Error::invalid(
                "l_rep",
                format!("reproduction band [{}, {}] is empty", self.l_rep, self.u_rep),
            ));
        }
        Ok(())
    }

    pub fn survives(&self, neighbors: u32) -> bool {
        (self.l_surv..=self.u_surv).contains(&neighbors)
    }

    pub fn reproduces(&self, neighbors: u32) -> bool {
        (self.l_rep..=self.u_rep).contains(&neighbors)
    }

    pub fn cells(&self) -> u64 {
        u64::from(self.w) * u64::from(self.w)
    }
}

/// Direction source for unit steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Heading {
    /// `theta ~ Uniform[0, 2pi)`, drawn per rule application.
    Random,
    /// Every step uses this angle. Makes the rules deterministic.
    Fixed(f64),
}

impl Heading {
    fn sample(&self, mut rng: RandomStream) -> f64 {
        match *self {
            Heading::Random => rng.gen_range(0.0..TAU),
            Heading::Fixed(theta) => theta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GolRules {
    params: GolParams,
    heading: Heading,
}

impl GolRules {
    pub fn params(&self) -> &GolParams {
        &self.params
    }

    fn living_neighbors(&self, agent: &Agent, ctx: &RuleContext<'_, '_>) -> u32 {
        ctx.others_in(agent, agent.neighborhood, ALIVE)
    }
}

impl UpdateRules for GolRules {
    fn transition(&self, agent: &Agent, ctx: &RuleContext<'_, '_>) -> Agent {
        if agent.state != ALIVE || !self.params.survives(self.living_neighbors(agent, ctx)) {
            return Agent { state: DEAD, ..*agent };
        }
        let env = ctx.environment();
        let theta = self.heading.sample(ctx.stream(CHANNEL_MOVE));
        agent.moved_to(ALIVE, env.unit_step(agent.position, theta), env)
    }

    fn production(&self, agent: &Agent, ctx: &RuleContext<'_, '_>, out: &mut Vec<Agent>) {
        if agent.state != ALIVE || !self.params.reproduces(self.living_neighbors(agent, ctx)) {
            return;
        }
        let env = ctx.environment();
        let theta = self.heading.sample(ctx.stream(CHANNEL_OFFSPRING));
        out.push(Agent::at(ALIVE, env.unit_step(agent.position, theta), env));
    }
}

pub fn gol_states() -> StateTable {
    StateTable::new(["dead", "alive"]).expect("static state table")
}

pub fn build_gol_model(params: GolParams) -> Result<ModelDefinition> {
    build_gol_model_with_heading(params, Heading::Random)
}

pub fn build_gol_model_with_heading(params: GolParams, heading: Heading) -> Result<ModelDefinition> {
    params.validate()?;
    let environment = Environment::square(params.w)?;
    let rules = GolRules { params, heading };
    ModelDefinition::new(
        format!(
            "G({}, {}, {}, {}, {})",
            params.w, params.l_surv, params.u_surv, params.l_rep, params.u_rep
        ),
        gol_states(),
        environment,
        Some(DEAD),
        Arc::new(rules),
    )
}

/// `n0` living agents placed uniformly at random, `t = 0`.
pub fn uniform_random_init(n0: u64, model: &ModelDefinition, rng: &mut RandomStream) -> Result<Population> {
    if n0 == 0 {
        return Err(Error::invalid("n0", "must be at least 1"));
    }
    Ok(uniform_population(model.environment(), ALIVE, n0, rng))
}
