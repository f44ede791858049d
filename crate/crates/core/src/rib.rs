//! Rib development model.
//!
//! Undetermined cells wander, divide and die until they commit to a
//! proximal or distal fate. The fate depends on a static Hedgehog gradient
//! `c(x) = s * exp(-x / decay_length)` along the proximo-distal axis, with
//! amplitude `s = 10^shh_log_intensity`: a committing cell becomes proximal
//! where `c(x) >= commit_threshold`, distal elsewhere. Committed cells are
//! stationary; they divide into same-fate offspring and die.
//!
//! Each genotype is a preset over the baseline constants in
//! `config/rib_default.toml`: the Apaf1 knockout removes cell death and the
//! Shh knockout removes the gradient.

use crate::agent::{Agent, Population, StateId, StateTable};
use crate::error::{Error, Result};
use crate::model::{uniform_population, ModelDefinition, RuleContext, UpdateRules};
use crate::rng::RandomStream;
use crate::space::Environment;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub const UNDETERMINED: StateId = StateId(0);
pub const PROXIMAL: StateId = StateId(1);
pub const DISTAL: StateId = StateId(2);
pub const DEAD: StateId = StateId(3);

const CHANNEL_FATE: u64 = 0;
const CHANNEL_MOVE: u64 = 1;
const CHANNEL_OFFSPRING: u64 = 2;

const DEFAULT_CONFIG: &str = include_str!("../config/rib_default.toml");

/// The seven log-intensities of the Shh sweep.
pub const SHH_SWEEP: [f64; 7] = [-0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RibParams {
    pub width: u32,
    pub height: u32,
    /// `log10` of the gradient amplitude; `-inf` means no gradient.
    pub shh_log_intensity: f64,
    pub decay_length: f64,
    pub commit_threshold: f64,
    pub commit_rate: f64,
    pub div_undet: f64,
    pub die_undet: f64,
    pub div_comm: f64,
    pub die_comm: f64,
}

impl RibParams {
    /// Baseline constants from the bundled default configuration.
    pub fn baseline() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("bundled rib defaults are valid")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let p: RibParams = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(Error::invalid("width", "must be at least 1"));
        }
        if self.height == 0 {
            return Err(Error::invalid("height", "must be at least 1"));
        }
        if !(self.decay_length > 0.0 && self.decay_length.is_finite()) {
            return Err(Error::invalid("decay_length", "must be positive and finite"));
        }
        if !(self.commit_threshold > 0.0 && self.commit_threshold.is_finite()) {
            return Err(Error::invalid("commit_threshold", "must be positive and finite"));
        }
        if self.shh_log_intensity.is_nan() || self.shh_log_intensity == f64::INFINITY {
            return Err(Error::invalid("shh_log_intensity", "must be finite or -inf"));
        }
        for (name, value) in [
            ("commit_rate", self.commit_rate),
            ("div_undet", self.div_undet),
            ("die_undet", self.die_undet),
            ("div_comm", self.div_comm),
            ("die_comm", self.die_comm),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::invalid(name, format!("probability {value} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Gradient amplitude `s = 10^shh_log_intensity`.
    pub fn amplitude(&self) -> f64 {
        10f64.powf(self.shh_log_intensity)
    }

    /// Distance from the proximal edge where the gradient falls to the
    /// commitment threshold, `decay_length * ln(s / threshold)`.
    pub fn frontier(&self) -> f64 {
        let s = self.amplitude();
        if s == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.decay_length * (s / self.commit_threshold).ln()
    }

    /// Fraction of the environment where committing cells turn proximal.
    pub fn proximal_area_fraction(&self) -> f64 {
        let f = self.frontier() / f64::from(self.width);
        if f.is_nan() {
            0.0
        } else {
            f.clamp(0.0, 1.0)
        }
    }
}

/// Hedgehog concentration at distance `x` from the proximal edge.
pub fn hh_concentration(x: f64, params: &RibParams) -> f64 {
    params.amplitude() * (-x / params.decay_length).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Genotype {
    Normal,
    #[serde(rename = "apaf1ko")]
    Apaf1Ko,
    #[serde(rename = "shhko")]
    ShhKo,
    #[serde(rename = "dko")]
    Apaf1ShhDko,
}

impl Genotype {
    pub const ALL: [Genotype; 4] = [
        Genotype::Normal,
        Genotype::Apaf1Ko,
        Genotype::ShhKo,
        Genotype::Apaf1ShhDko,
    ];

    pub fn removes_death(self) -> bool {
        matches!(self, Genotype::Apaf1Ko | Genotype::Apaf1ShhDko)
    }

    pub fn removes_gradient(self) -> bool {
        matches!(self, Genotype::ShhKo | Genotype::Apaf1ShhDko)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Genotype::Normal => "normal",
            Genotype::Apaf1Ko => "apaf1ko",
            Genotype::ShhKo => "shhko",
            Genotype::Apaf1ShhDko => "dko",
        }
    }

    /// Applies this genotype's knockouts to `params`.
    pub fn apply(self, mut params: RibParams) -> RibParams {
        if self.removes_death() {
            params.die_undet = 0.0;
            params.die_comm = 0.0;
        }
        if self.removes_gradient() {
            params.shh_log_intensity = f64::NEG_INFINITY;
        }
        params
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Genotype::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid("genotype", format!("unknown genotype `{s}`")))
    }
}

/// Optional replacements for baseline constants.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RibOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shh_log_intensity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commit_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commit_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub div_undet: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub die_undet: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub div_comm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub die_comm: Option<f64>,
}

impl RibOverrides {
    pub fn apply(&self, mut p: RibParams) -> RibParams {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    p.$field = v;
                }
            )*};
        }
        set!(
            width,
            height,
            shh_log_intensity,
            decay_length,
            commit_threshold,
            commit_rate,
            div_undet,
            die_undet,
            div_comm,
            die_comm
        );
        p
    }

    /// Sets a field by name. Returns `false` for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "width" => self.width = Some(value as u32),
            "height" => self.height = Some(value as u32),
            "shh_log" | "shh_log_intensity" => self.shh_log_intensity = Some(value),
            "decay_length" => self.decay_length = Some(value),
            "commit_threshold" => self.commit_threshold = Some(value),
            "commit_rate" => self.commit_rate = Some(value),
            "div_undet" => self.div_undet = Some(value),
            "die_undet" => self.die_undet = Some(value),
            "div_comm" => self.div_comm = Some(value),
            "die_comm" => self.die_comm = Some(value),
            _ => return false,
        }
        true
    }
}

/// Parameters for `genotype`: baseline, then overrides, then knockouts.
pub fn rib_params(genotype: Genotype, overrides: &RibOverrides) -> Result<RibParams> {
    let p = genotype.apply(overrides.apply(RibParams::baseline()));
    p.validate()?;
    Ok(p)
}

#[derive(Debug, Clone)]
pub struct RibRules {
    params: RibParams,
}

/// The three fate draws of one agent for one step, shared by both rules.
struct FateDraws {
    death: f64,
    commit: f64,
    divide: f64,
}

impl FateDraws {
    fn new(mut rng: RandomStream) -> Self {
        FateDraws {
            death: rng.gen(),
            commit: rng.gen(),
            divide: rng.gen(),
        }
    }
}

impl RibRules {
    pub fn params(&self) -> &RibParams {
        &self.params
    }

    fn committed_fate(&self, agent: &Agent) -> StateId {
        if hh_concentration(agent.position.x, &self.params) >= self.params.commit_threshold {
            PROXIMAL
        } else {
            DISTAL
        }
    }
}

impl UpdateRules for RibRules {
    fn transition(&self, agent: &Agent, ctx: &RuleContext<'_, '_>) -> Agent {
        let p = &self.params;
        let fate = FateDraws::new(ctx.stream(CHANNEL_FATE));
        match agent.state {
            UNDETERMINED => {
                if fate.death < p.die_undet {
                    Agent { state: DEAD, ..*agent }
                } else if fate.commit < p.commit_rate {
                    Agent {
                        state: self.committed_fate(agent),
                        ..*agent
                    }
                } else {
                    let env = ctx.environment();
                    let theta = ctx.stream(CHANNEL_MOVE).gen_range(0.0..TAU);
                    agent.moved_to(UNDETERMINED, env.unit_step(agent.position, theta), env)
                }
            }
            PROXIMAL | DISTAL if fate.death < p.die_comm => Agent { state: DEAD, ..*agent },
            _ => *agent,
        }
    }

    fn production(&self, agent: &Agent, ctx: &RuleContext<'_, '_>, out: &mut Vec<Agent>) {
        let p = &self.params;
        let fate = FateDraws::new(ctx.stream(CHANNEL_FATE));
        let divides = match agent.state {
            UNDETERMINED => {
                fate.death >= p.die_undet && fate.commit >= p.commit_rate && fate.divide < p.div_undet
            }
            PROXIMAL | DISTAL => fate.death >= p.die_comm && fate.divide < p.div_comm,
            _ => false,
        };
        if divides {
            let env = ctx.environment();
            let theta = ctx.stream(CHANNEL_OFFSPRING).gen_range(0.0..TAU);
            out.push(Agent::at(agent.state, env.unit_step(agent.position, theta), env));
        }
    }
}

pub fn rib_states() -> StateTable {
    StateTable::new(["undetermined", "proximal", "distal", "dead"]).expect("static state table")
}

pub fn build_rib_model(genotype: Genotype, overrides: &RibOverrides) -> Result<ModelDefinition> {
    build_rib_model_from_params(rib_params(genotype, overrides)?, genotype)
}

pub fn build_rib_model_from_params(params: RibParams, genotype: Genotype) -> Result<ModelDefinition> {
    params.validate()?;
    let environment = Environment::new(params.width, params.height)?;
    ModelDefinition::new(
        format!("rib[{genotype}]"),
        rib_states(),
        environment,
        Some(DEAD),
        Arc::new(RibRules { params }),
    )
}

/// `n0` undetermined cells placed uniformly at random, `t = 0`.
pub fn rib_init(n0: u64, model: &ModelDefinition, rng: &mut RandomStream) -> Population {
    uniform_population(model.environment(), UNDETERMINED, n0, rng)
}
