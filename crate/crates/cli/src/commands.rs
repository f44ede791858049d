//! Subcommand implementations. Each returns its rows so callers (and tests)
//! can inspect them before they are written.

use crate::error::CliError;
use crate::output::{write_rows, AgentRow, CompareRow, GrrRow, SweepRow, TrajectoryCsvRow};
use crate::spec::RunSpec;
use abm_core::ensemble::{run_replicate, run_replicates};
use abm_core::grr::grr_trajectory;
use abm_core::{ModelDefinition, Population, SeedTree, Trajectory};
use std::path::{Path, PathBuf};

fn agent_rows(model: &ModelDefinition, pop: &Population, include_dead: bool, out: &mut Vec<AgentRow>) {
    for (id, a) in pop.agents.iter().enumerate() {
        if !include_dead && model.is_dead(a.state) {
            continue;
        }
        out.push(AgentRow {
            t: pop.time,
            agent_id: id as u64,
            state: model.states().label(a.state).to_string(),
            x: a.position.x,
            y: a.position.y,
        });
    }
}

fn dumped(t: u64, every: u64, horizon: u64) -> bool {
    t.is_multiple_of(every) || t == horizon
}

/// Single run: agent rows for steps `0, K, 2K, ...` and the final step.
pub fn simulate(spec: &RunSpec) -> Result<Vec<AgentRow>, CliError> {
    spec.validate()?;
    let model = spec.model()?;
    let init = spec.initializer(&model)?;
    let every = spec.ensemble.dump_every.unwrap_or(1);
    let seeds = SeedTree::new(spec.seed).replicate(0);
    let mut rows = Vec::new();
    let mut pop = init.build(&model, &mut seeds.init_stream());
    agent_rows(&model, &pop, spec.output.include_dead, &mut rows);
    for t in 1..=spec.horizon {
        pop = model.step(&pop, &seeds);
        if dumped(t, every, spec.horizon) {
            agent_rows(&model, &pop, spec.output.include_dead, &mut rows);
        }
    }
    Ok(rows)
}

pub fn ensemble(spec: &RunSpec) -> Result<Trajectory, CliError> {
    spec.validate()?;
    let model = spec.model()?;
    let init = spec.initializer(&model)?;
    let cfg = spec.ensemble_config()?;
    let runs = run_replicates(&model, &init, &cfg)?;
    Ok(Trajectory::from_runs(model.states().labels().to_vec(), &runs))
}

/// Agent rows of replicate 0, the replicate `ensemble` seeds first.
pub fn ensemble_dump(spec: &RunSpec, every: u64) -> Result<Vec<AgentRow>, CliError> {
    let model = spec.model()?;
    let init = spec.initializer(&model)?;
    let mut rows = Vec::new();
    let seeds = SeedTree::new(spec.seed).replicate(0);
    run_replicate(&model, &init, seeds, spec.horizon, |pop| {
        if dumped(pop.time, every, spec.horizon) {
            agent_rows(&model, pop, spec.output.include_dead, &mut rows);
        }
    });
    Ok(rows)
}

pub fn trajectory_rows(t: &Trajectory) -> Vec<TrajectoryCsvRow> {
    t.rows
        .iter()
        .flat_map(|r| {
            t.states.iter().enumerate().map(move |(s, label)| TrajectoryCsvRow {
                t: r.t,
                state: label.clone(),
                mean: r.mean[s],
                sample_std: r.std[s],
                replicates: r.replicates,
            })
        })
        .collect()
}

pub fn grr(spec: &RunSpec) -> Result<Vec<GrrRow>, CliError> {
    spec.validate()?;
    if spec.horizon == 0 {
        return Err(CliError::Validation("horizon must be at least 1".into()));
    }
    let model = spec.model()?;
    let estimate = grr_trajectory(spec.initial_counts(&model)?, &spec.stepper(&model)?, spec.horizon)?;
    let labels = model.states().labels();
    Ok(estimate
        .iter()
        .flat_map(|e| {
            labels.iter().zip(&e.counts).map(move |(l, &c)| GrrRow {
                t: e.time,
                state: l.clone(),
                grr_estimate: c,
            })
        })
        .collect())
}

/// Ensemble statistics next to the GRR estimate for every step and state.
pub fn compare(spec: &RunSpec) -> Result<Vec<CompareRow>, CliError> {
    let model = spec.model()?;
    let traj = ensemble(spec)?;
    let estimate = grr_trajectory(spec.initial_counts(&model)?, &spec.stepper(&model)?, spec.horizon)?;
    let traj = traj.with_estimate(&estimate)?;
    let mut rows = Vec::new();
    for r in &traj.rows {
        let grr = r.grr.as_ref().expect("estimate covers every step");
        for (s, label) in traj.states.iter().enumerate() {
            rows.push(CompareRow::new(r.t, label.clone(), r.mean[s], r.std[s], grr[s]));
        }
    }
    Ok(rows)
}

/// `compare` once per value of `param`, keyed by `sweep_value`.
pub fn sweep(spec: &RunSpec, param: &str, values: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    if values.is_empty() {
        return Err(CliError::Validation("sweep needs at least one value".into()));
    }
    let mut rows = Vec::new();
    for &v in values {
        let mut s = spec.clone();
        s.set_param(param, v)?;
        rows.extend(compare(&s)?.into_iter().map(|r| SweepRow::new(v, r)));
    }
    Ok(rows)
}

/// Sibling path for agent dumps: `runs/out.csv` -> `runs/out.agents.csv`.
pub fn dump_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}.agents.{ext}"))
}

/// Writes ensemble rows and, when requested, the replicate-0 agent dump.
pub fn write_ensemble(spec: &RunSpec, traj: &Trajectory) -> Result<(), CliError> {
    let out = spec.output.out.as_deref();
    write_rows(&trajectory_rows(traj), spec.output.format, out)?;
    if let Some(every) = spec.ensemble.dump_every {
        let path = out
            .map(dump_path)
            .ok_or_else(|| CliError::Validation("--dump-every with `ensemble` needs --out".into()))?;
        write_rows(&ensemble_dump(spec, every)?, spec.output.format, Some(&path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::ModelKind;

    fn small() -> RunSpec {
        let mut s = RunSpec {
            horizon: 3,
            ..RunSpec::default()
        };
        s.ensemble.replicates = 3;
        s
    }

    #[test]
    fn zero_horizon_dumps_initial_snapshot_only() {
        let mut s = small();
        s.horizon = 0;
        let rows = simulate(&s).unwrap();
        assert_eq!(rows.len(), 500);
        assert!(rows.iter().all(|r| r.t == 0 && r.state == "alive"));
    }

    #[test]
    fn simulate_dumps_requested_steps() {
        let mut s = small();
        s.horizon = 7;
        s.ensemble.dump_every = Some(3);
        let mut times: Vec<u64> = simulate(&s).unwrap().iter().map(|r| r.t).collect();
        times.dedup();
        assert_eq!(times, vec![0, 3, 6, 7]);
    }

    #[test]
    fn simulate_is_the_first_ensemble_replicate() {
        let mut s = small();
        s.model = ModelKind::Rib;
        s.horizon = 6;
        s.ensemble.dump_every = Some(2);
        assert_eq!(simulate(&s).unwrap(), ensemble_dump(&s, 2).unwrap());
    }

    #[test]
    fn compare_rows_cover_every_state_and_step() {
        let rows = compare(&small()).unwrap();
        assert_eq!(rows.len(), 4 * 2);
        assert_eq!(rows[1].state, "alive");
        assert_eq!(rows[1].sim_mean, 500.0);
        assert_eq!(rows[1].grr_estimate, 500.0);
    }

    #[test]
    fn single_value_sweep_equals_compare() {
        let mut s = small();
        s.model = ModelKind::Rib;
        let swept = sweep(&s, "shh_log", &[0.0]).unwrap();
        let mut plain = s.clone();
        plain.rib_params.shh_log_intensity = Some(0.0);
        let direct = compare(&plain).unwrap();
        assert_eq!(swept.len(), direct.len());
        for (a, b) in swept.iter().zip(direct) {
            assert_eq!(a.sweep_value, 0.0);
            assert_eq!(SweepRow::new(0.0, b), *a);
        }
    }

    #[test]
    fn sweep_rejects_unknown_parameter() {
        assert!(matches!(sweep(&small(), "gravity", &[1.0]), Err(CliError::Validation(_))));
    }

    #[test]
    fn dump_path_naming() {
        assert_eq!(dump_path(Path::new("runs/a.csv")), PathBuf::from("runs/a.agents.csv"));
        assert_eq!(dump_path(Path::new("b")), PathBuf::from("b.agents.csv"));
    }
}
