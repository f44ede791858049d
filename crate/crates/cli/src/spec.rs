//! Run specifications: what to simulate and estimate, loaded from a TOML
//! config file and adjusted by command-line flags.

use crate::error::CliError;
use abm_core::gol::{self, GolParams};
use abm_core::grr::{ExpectedCounts, ProbeStepper, Stepper};
use abm_core::rib::{self, Genotype, RibOverrides};
use abm_core::{EnsembleConfig, Initializer, ModelDefinition, NeighborLaw, SeedTree};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gol,
    Rib,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    #[default]
    Closed,
    Probe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RibSection {
    pub genotype: Genotype,
}

impl Default for RibSection {
    fn default() -> Self {
        RibSection {
            genotype: Genotype::Normal,
        }
    }
}

/// Initial population. `density` (agents per unit square) wins over `n0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub replicates: u64,
    #[serde(default)]
    pub prune_dead: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_every: Option<u64>,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        EnsembleSection {
            replicates: 100,
            prune_dead: false,
            dump_every: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrrSection {
    pub estimator: Estimator,
    pub mode: NeighborLaw,
    pub samples_per_state: u64,
}

impl Default for GrrSection {
    fn default() -> Self {
        GrrSection {
            estimator: Estimator::Closed,
            mode: NeighborLaw::Binomial,
            samples_per_state: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub include_dead: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub model: ModelKind,
    pub seed: u64,
    pub horizon: u64,
    pub workers: usize,
    #[serde(default = "GolParams::reference")]
    pub gol: GolParams,
    #[serde(default)]
    pub rib: RibSection,
    #[serde(default)]
    pub rib_params: RibOverrides,
    #[serde(default)]
    pub init: InitSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub grr: GrrSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            model: ModelKind::Gol,
            seed: abm_core::DEFAULT_SEED,
            horizon: 50,
            workers: 1,
            gol: GolParams::reference(),
            rib: RibSection::default(),
            rib_params: RibOverrides::default(),
            init: InitSection::default(),
            ensemble: EnsembleSection::default(),
            grr: GrrSection::default(),
            output: OutputSection::default(),
        }
    }
}

const DEFAULT_GOL_N0: u64 = 500;
const DEFAULT_RIB_N0: u64 = 1000;

impl RunSpec {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// TOML integers are signed, so seeds above `i64::MAX` cannot be written.
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn model(&self) -> Result<ModelDefinition, CliError> {
        let m = match self.model {
            ModelKind::Gol => gol::build_gol_model(self.gol)?,
            ModelKind::Rib => rib::build_rib_model(self.rib.genotype, &self.rib_params)?,
        };
        Ok(m.with_prune_dead(self.ensemble.prune_dead))
    }

    pub fn initial_count(&self, model: &ModelDefinition) -> Result<u64, CliError> {
        if let Some(d) = self.init.density {
            if !(d > 0.0 && d.is_finite()) {
                return Err(CliError::Validation(format!("init.density must be positive, got {d}")));
            }
            return Ok((d * model.environment().area()).round() as u64);
        }
        let n0 = self.init.n0.unwrap_or(match self.model {
            ModelKind::Gol => DEFAULT_GOL_N0,
            ModelKind::Rib => DEFAULT_RIB_N0,
        });
        if n0 == 0 {
            return Err(CliError::Validation("init.n0 must be at least 1".into()));
        }
        Ok(n0)
    }

    pub fn initializer(&self, model: &ModelDefinition) -> Result<Initializer, CliError> {
        let state = match self.model {
            ModelKind::Gol => gol::ALIVE,
            ModelKind::Rib => rib::UNDETERMINED,
        };
        Ok(Initializer::Uniform {
            state,
            count: self.initial_count(model)?,
        })
    }

    pub fn ensemble_config(&self) -> Result<EnsembleConfig, CliError> {
        let cfg = EnsembleConfig {
            replicates: self.ensemble.replicates,
            horizon: self.horizon,
            master_seed: self.seed,
            workers: self.workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn initial_counts(&self, model: &ModelDefinition) -> Result<ExpectedCounts, CliError> {
        let Initializer::Uniform { state, count } = self.initializer(model)?;
        let mut counts = vec![0.0; model.states().len()];
        counts[state.index()] = count as f64;
        Ok(ExpectedCounts::new(0, counts)?)
    }

    pub fn stepper(&self, model: &ModelDefinition) -> Result<Stepper, CliError> {
        Ok(match (self.grr.estimator, self.model) {
            (Estimator::Closed, ModelKind::Gol) => Stepper::Gol {
                params: self.gol,
                mode: self.grr.mode,
            },
            (Estimator::Closed, ModelKind::Rib) => Stepper::Rib {
                params: rib::rib_params(self.rib.genotype, &self.rib_params)?,
            },
            (Estimator::Probe, _) => {
                if self.grr.samples_per_state == 0 {
                    return Err(CliError::Validation("grr.samples_per_state must be at least 1".into()));
                }
                Stepper::Probe(ProbeStepper {
                    model: model.clone(),
                    samples_per_state: self.grr.samples_per_state,
                    seeds: SeedTree::new(self.seed).replicate(u64::MAX),
                })
            }
        })
    }

    /// Everything a run needs, checked up front.
    pub fn validate(&self) -> Result<(), CliError> {
        let model = self.model()?;
        self.initializer(&model)?;
        if self.workers == 0 {
            return Err(CliError::Validation("workers must be at least 1".into()));
        }
        if self.ensemble.replicates == 0 {
            return Err(CliError::Validation("ensemble.replicates must be at least 1".into()));
        }
        if self.ensemble.dump_every == Some(0) {
            return Err(CliError::Validation("dump_every must be at least 1".into()));
        }
        self.stepper(&model)?;
        Ok(())
    }

    /// Sets one model or initializer parameter by name, for sweeps.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        let as_count = |v: f64| -> Result<u32, CliError> {
            if v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                Ok(v as u32)
            } else {
                Err(CliError::Validation(format!("{name} needs a non-negative integer, got {v}")))
            }
        };
        match (self.model, name) {
            (_, "n0") => {
                self.init.n0 = Some(u64::from(as_count(value)?));
                self.init.density = None;
            }
            (_, "density") => self.init.density = Some(value),
            (ModelKind::Gol, "w") => self.gol.w = as_count(value)?,
            (ModelKind::Gol, "l_surv" | "lsurv") => self.gol.l_surv = as_count(value)?,
            (ModelKind::Gol, "u_surv" | "usurv") => self.gol.u_surv = as_count(value)?,
            (ModelKind::Gol, "l_rep" | "lrep") => self.gol.l_rep = as_count(value)?,
            (ModelKind::Gol, "u_rep" | "urep") => self.gol.u_rep = as_count(value)?,
            (ModelKind::Rib, "width" | "height") => {
                as_count(value)?;
                self.rib_params.set(name, value);
            }
            (ModelKind::Rib, other) => {
                if !self.rib_params.set(other, value) {
                    return Err(CliError::Validation(format!("unknown rib parameter `{other}`")));
                }
            }
            (ModelKind::Gol, other) => {
                return Err(CliError::Validation(format!("unknown gol parameter `{other}`")))
            }
        }
        Ok(())
    }
}
