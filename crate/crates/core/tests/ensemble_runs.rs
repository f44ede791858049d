use abm_core::ensemble::{run_replicate, run_replicates};
use abm_core::gol::{build_gol_model, GolParams, ALIVE, DEAD};
use abm_core::grr::gol_band_probabilities;
use abm_core::rib::{build_rib_model, Genotype, UNDETERMINED};
use abm_core::{run_ensemble, EnsembleConfig, Initializer, NeighborLaw, SeedTree};

fn gol_init(n: u64) -> Initializer {
    Initializer::Uniform { state: ALIVE, count: n }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let model = build_gol_model(GolParams::reference()).unwrap();
    let base = EnsembleConfig {
        replicates: 12,
        horizon: 15,
        master_seed: 99,
        workers: 1,
    };
    let one = run_ensemble(&model, &gol_init(900), &base).unwrap();
    for workers in [2, 8] {
        let other = run_ensemble(&model, &gol_init(900), &EnsembleConfig { workers, ..base }).unwrap();
        assert_eq!(one, other, "workers = {workers}");
    }
    assert_eq!(one, run_ensemble(&model, &gol_init(900), &base).unwrap());
    let reseeded = run_ensemble(&model, &gol_init(900), &EnsembleConfig { master_seed: 100, ..base }).unwrap();
    assert_ne!(one, reseeded);
}

#[test]
fn one_replicate_has_zero_spread() {
    let model = build_rib_model(Genotype::Normal, &Default::default()).unwrap();
    let cfg = EnsembleConfig {
        replicates: 1,
        horizon: 10,
        master_seed: 1,
        workers: 1,
    };
    let t = run_ensemble(&model, &Initializer::Uniform { state: UNDETERMINED, count: 200 }, &cfg).unwrap();
    assert_eq!(t.rows.len(), 11);
    assert!(t.rows.iter().all(|r| r.std.iter().all(|&s| s == 0.0)));
    assert!(t.rows.windows(2).all(|w| w[0].t < w[1].t));
}

#[test]
fn living_is_survivors_plus_births() {
    let model = build_gol_model(GolParams::reference()).unwrap();
    let seeds = SeedTree::new(5).replicate(3);
    let mut pop = gol_init(1500).build(&model, &mut seeds.init_stream());
    for _ in 0..20 {
        let (next, tally) = model.step_tallied(&pop, &seeds);
        let living = abm_core::count_by_state(&next, model.states())[ALIVE.index()];
        let survivors = tally.transitions[ALIVE.index()][ALIVE.index()];
        let births = tally.births[ALIVE.index()][ALIVE.index()];
        assert_eq!(living, survivors + births);
        assert_eq!(tally.transitions[DEAD.index()][ALIVE.index()], 0);
        pop = next;
    }
}

#[test]
fn replicate_matches_its_entry_in_the_ensemble() {
    let model = build_gol_model(GolParams::reference()).unwrap();
    let cfg = EnsembleConfig {
        replicates: 4,
        horizon: 6,
        master_seed: 77,
        workers: 2,
    };
    let runs = run_replicates(&model, &gol_init(600), &cfg).unwrap();
    let mut seen = 0;
    let single = run_replicate(&model, &gol_init(600), SeedTree::new(77).replicate(2), 6, |_| seen += 1);
    assert_eq!(runs[2], single);
    assert_eq!(seen, 7);
}

/// Standard error of the mean at t = 1 against a binomial-theory prediction
/// that treats agents' survive/reproduce outcomes as independent.
#[test]
fn spread_at_first_step_matches_theory() {
    let params = GolParams::reference();
    let model = build_gol_model(params).unwrap();
    let n0 = 2000u64;
    let cfg = EnsembleConfig {
        replicates: 100,
        horizon: 1,
        master_seed: 31,
        workers: 1,
    };
    let t = run_ensemble(&model, &gol_init(n0), &cfg).unwrap();
    let (surv, rep) = gol_band_probabilities(n0 as f64, &params, NeighborLaw::Binomial);
    // reproduction band sits inside the survival band: offspring count per
    // agent Z is 2 w.p. rep, 1 w.p. surv - rep
    let mean_z = surv + rep;
    let var_z = 4.0 * rep + (surv - rep) - mean_z * mean_z;
    let predicted_se = (n0 as f64 * var_z).sqrt() / (cfg.replicates as f64).sqrt();
    let observed_se = t.rows[1].std[ALIVE.index()] / (cfg.replicates as f64).sqrt();
    let ratio = observed_se / predicted_se;
    assert!((0.5..=2.0).contains(&ratio), "observed {observed_se}, predicted {predicted_se}");
}
