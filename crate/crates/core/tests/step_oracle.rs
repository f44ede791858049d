//! Engine steps checked against a direct pairwise recount of the GoL rules.

use abm_core::gol::{build_gol_model, build_gol_model_with_heading, GolParams, Heading, ALIVE, DEAD};
use abm_core::{count_by_state, Agent, Environment, Population, Position, SeedTree};
use proptest::prelude::*;
use std::f64::consts::TAU;

/// Living agents other than `agents[i]` whose position lies in the unit
/// square around `agents[i]`, found by comparing coordinates directly.
fn brute_force_neighbors(agents: &[Agent], i: usize) -> u32 {
    let (sx, sy) = (agents[i].position.x.floor(), agents[i].position.y.floor());
    agents
        .iter()
        .enumerate()
        .filter(|&(j, b)| {
            j != i
                && b.state == ALIVE
                && b.position.x >= sx
                && b.position.x < sx + 1.0
                && b.position.y >= sy
                && b.position.y < sy + 1.0
        })
        .count() as u32
}

fn oracle_move(p: Position, theta: f64, w: u32) -> Position {
    let q = Position::new(p.x + theta.cos(), p.y + theta.sin());
    let side = f64::from(w);
    if q.x >= 0.0 && q.x < side && q.y >= 0.0 && q.y < side {
        q
    } else {
        p
    }
}

fn square_of(p: Position) -> abm_core::Neighborhood {
    abm_core::Neighborhood {
        i: p.x.floor() as u32,
        j: p.y.floor() as u32,
    }
}

/// One step of `G(w, ...)` with every random direction fixed to `theta`.
fn oracle_step(agents: &[Agent], params: &GolParams, theta: f64) -> Vec<Agent> {
    let mut next = Vec::new();
    let mut born = Vec::new();
    for (i, a) in agents.iter().enumerate() {
        if a.state != ALIVE {
            next.push(*a);
            continue;
        }
        let k = brute_force_neighbors(agents, i);
        if params.l_surv <= k && k <= params.u_surv {
            let p = oracle_move(a.position, theta, params.w);
            next.push(Agent {
                state: ALIVE,
                position: p,
                neighborhood: square_of(p),
            });
        } else {
            next.push(Agent { state: DEAD, ..*a });
        }
        if params.l_rep <= k && k <= params.u_rep {
            let p = oracle_move(a.position, theta, params.w);
            born.push(Agent {
                state: ALIVE,
                position: p,
                neighborhood: square_of(p),
            });
        }
    }
    next.extend(born);
    next
}

fn arb_population(w: u32, max: usize) -> impl Strategy<Value = Vec<(bool, f64, f64)>> {
    let side = f64::from(w);
    prop::collection::vec((prop::bool::weighted(0.85), 0.0..side, 0.0..side), 0..=max)
}

fn build(env: &Environment, raw: &[(bool, f64, f64)]) -> Population {
    let agents = raw
        .iter()
        .map(|&(alive, x, y)| Agent::at(if alive { ALIVE } else { DEAD }, Position::new(x, y), env))
        .collect();
    Population::new(agents, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn step_matches_pairwise_oracle(
        raw in arb_population(4, 12),
        theta in 0.0..TAU,
        l_surv in 0u32..4, surv_width in 0u32..6,
        l_rep in 0u32..4, rep_width in 0u32..4,
    ) {
        let params = GolParams::new(4, l_surv, l_surv + surv_width, l_rep, l_rep + rep_width).unwrap();
        let model = build_gol_model_with_heading(params, Heading::Fixed(theta)).unwrap();
        let pop = build(model.environment(), &raw);
        let next = model.step(&pop, &SeedTree::new(0));
        prop_assert_eq!(next.agents, oracle_step(&pop.agents, &params, theta));
        prop_assert_eq!(next.time, 1);
    }

    #[test]
    fn neighbor_counts_match_pairwise_recount(raw in arb_population(5, 40)) {
        // With survival band [k, k] an agent survives iff it has exactly k neighbors.
        let env = Environment::square(5).unwrap();
        let pop = build(&env, &raw);
        for k in 0..6u32 {
            let model = build_gol_model_with_heading(GolParams::new(5, k, k, 99, 99).unwrap(), Heading::Fixed(0.0)).unwrap();
            let next = model.step(&pop, &SeedTree::new(1));
            for (i, (before, after)) in pop.agents.iter().zip(&next.agents).enumerate() {
                if before.state == ALIVE {
                    prop_assert_eq!(after.state == ALIVE, brute_force_neighbors(&pop.agents, i) == k);
                }
            }
        }
    }

    #[test]
    fn rule_application_is_order_independent(raw in arb_population(4, 12), theta in 0.0..TAU, seed in any::<u64>()) {
        let model = build_gol_model_with_heading(GolParams::new(4, 1, 5, 2, 3).unwrap(), Heading::Fixed(theta)).unwrap();
        let pop = build(model.environment(), &raw);
        let mut reversed = pop.clone();
        reversed.agents.reverse();
        let key = |a: &Agent| (a.state, a.neighborhood, a.position.x.to_bits(), a.position.y.to_bits());
        let mut a: Vec<_> = model.step(&pop, &SeedTree::new(seed)).agents.iter().map(key).collect();
        let mut b: Vec<_> = model.step(&reversed, &SeedTree::new(seed)).agents.iter().map(key).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn step_invariants_with_random_headings(raw in arb_population(4, 12), seed in any::<u64>()) {
        let params = GolParams::new(4, 1, 6, 1, 3).unwrap();
        let model = build_gol_model(params).unwrap();
        let env = *model.environment();
        let pop = build(&env, &raw);
        let seeds = SeedTree::new(seed);
        let (next, tally) = model.step_tallied(&pop, &seeds);

        // count bookkeeping: transitions keep the count, births add to it
        let births: u64 = tally.births.iter().flatten().sum();
        prop_assert_eq!(next.len() as u64, pop.len() as u64 + births);
        // neighborhood consistency
        prop_assert!(next.agents.iter().all(|a| a.is_consistent(&env)));
        // dead agents are untouched
        for (before, after) in pop.agents.iter().zip(&next.agents) {
            if before.state == DEAD {
                prop_assert_eq!(before, after);
            }
        }
        // offspring land at unit distance from a parent, or on it
        let parents: Vec<(usize, &Agent)> = pop.agents.iter().enumerate()
            .filter(|(i, a)| a.state == ALIVE && params.reproduces(brute_force_neighbors(&pop.agents, *i)))
            .collect();
        let offspring = &next.agents[pop.len()..];
        prop_assert_eq!(offspring.len(), parents.len());
        for ((_, parent), child) in parents.iter().zip(offspring) {
            let d = parent.position.distance(child.position);
            prop_assert!(d == 0.0 || (d - 1.0).abs() < 1e-12, "distance {}", d);
        }
        // producers survive when the reproduction band sits inside the survival band
        for (i, _) in &parents {
            prop_assert_eq!(next.agents[*i].state, ALIVE);
        }
        // determinism
        prop_assert_eq!(&model.step(&pop, &seeds), &next);
    }

    #[test]
    fn extinction_is_permanent(seed in any::<u64>()) {
        let model = build_gol_model(GolParams::new(3, 2, 8, 2, 4).unwrap()).unwrap();
        let seeds = SeedTree::new(seed);
        let mut pop = abm_core::gol::uniform_random_init(4, &model, &mut seeds.init_stream()).unwrap();
        let mut extinct = false;
        for _ in 0..25 {
            pop = model.step(&pop, &seeds);
            let living = count_by_state(&pop, model.states())[ALIVE.index()];
            if extinct {
                prop_assert_eq!(living, 0);
            }
            extinct = living == 0;
        }
    }
}

/// Places `n` living agents in square `(i, j)` at distinct interior points.
fn cluster(env: &Environment, i: u32, j: u32, n: usize) -> Vec<Agent> {
    (0..n)
        .map(|k| {
            let f = (k as f64 + 1.0) / (n as f64 + 1.0);
            Agent::at(ALIVE, Position::new(f64::from(i) + f, f64::from(j) + 0.5 + 0.3 * (f - 0.5)), env)
        })
        .collect()
}

#[test]
fn three_highlighted_agents() {
    let model = build_gol_model(GolParams::reference()).unwrap();
    let env = *model.environment();
    // blue with 1 neighbor, orange with 5, magenta with 3, plus white context
    let mut agents = Vec::new();
    agents.extend(cluster(&env, 2, 3, 2));
    let blue = 0;
    agents.extend(cluster(&env, 10, 10, 6));
    let orange = 2;
    agents.extend(cluster(&env, 15, 5, 4));
    let magenta = 8;
    agents.extend(cluster(&env, 17, 17, 3));
    let pop = Population::new(agents, 7);
    let living_before = count_by_state(&pop, model.states())[ALIVE.index()];

    for seed in 0..200 {
        let next = model.step(&pop, &SeedTree::new(seed));
        assert_eq!(next.time, 8);
        assert_eq!(next.agents[blue].state, DEAD);
        assert_eq!(next.agents[blue].position, pop.agents[blue].position);
        assert_eq!(next.agents[orange].state, ALIVE);
        let d = next.agents[orange].position.distance(pop.agents[orange].position);
        assert!((d - 1.0).abs() < 1e-12 || d == 0.0);
        assert_eq!(next.agents[magenta].state, ALIVE);

        let snap = model.snapshot(&pop);
        let r = SeedTree::new(seed).agent(7, magenta as u64);
        let kids = model.production_rule(&pop.agents[magenta], &snap, r);
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].state, ALIVE);
        assert!(model.production_rule(&pop.agents[orange], &snap, SeedTree::new(seed).agent(7, orange as u64)).is_empty());
        assert!(model.production_rule(&pop.agents[blue], &snap, SeedTree::new(seed).agent(7, blue as u64)).is_empty());

        // net living change from the three highlighted agents: -1 (blue) + 0 + 1 (offspring)
        let highlighted_after = [blue, orange, magenta].iter().filter(|&&i| next.agents[i].state == ALIVE).count() + kids.len();
        assert_eq!(highlighted_after as i64 - 3, 0);
        let (_, tally) = model.step_tallied(&pop, &SeedTree::new(seed));
        let living_after = count_by_state(&next, model.states())[ALIVE.index()];
        let survivors = tally.transitions[ALIVE.index()][ALIVE.index()];
        let births = tally.births[ALIVE.index()][ALIVE.index()];
        assert_eq!(living_after, survivors + births);
        assert!(survivors < living_before);
    }
}

#[test]
fn empty_population_steps_to_empty() {
    let model = build_gol_model(GolParams::reference()).unwrap();
    let next = model.step(&Population::empty(3), &SeedTree::new(0));
    assert!(next.is_empty());
    assert_eq!(next.time, 4);
}

#[test]
fn dead_agents_are_returned_unchanged() {
    let model = build_gol_model(GolParams::reference()).unwrap();
    let env = *model.environment();
    let mut agents = cluster(&env, 4, 4, 5);
    agents[0].state = DEAD;
    let pop = Population::new(agents, 0);
    let snap = model.snapshot(&pop);
    for seed in 0..20 {
        let r = SeedTree::new(seed).agent(0, 0);
        assert_eq!(model.transition_rule(&pop.agents[0], &snap, r), pop.agents[0]);
        assert!(model.production_rule(&pop.agents[0], &snap, r).is_empty());
    }
}

#[test]
fn pruning_keeps_counts_exact() {
    let model = build_gol_model(GolParams::reference()).unwrap();
    let pruned_model = model.clone().with_prune_dead(true);
    let seeds = SeedTree::new(12);
    let mut pop = abm_core::gol::uniform_random_init(900, &model, &mut seeds.init_stream()).unwrap();
    for _ in 0..10 {
        let (next, tally) = pruned_model.step_tallied(&pop, &seeds);
        assert!(next.agents.iter().all(|a| a.state == ALIVE));
        let before = count_by_state(&pop, model.states());
        let after = count_by_state(&next, model.states());
        let deaths = tally.transitions[ALIVE.index()][DEAD.index()];
        assert_eq!(after[DEAD.index()], before[DEAD.index()] + deaths);
        assert_eq!(after.iter().sum::<u64>(), before.iter().sum::<u64>() + tally.births.iter().flatten().sum::<u64>());
        pop = next;
    }
}
