use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gateopt::feasibility::{gate_violation_pairs, is_feasible};
use gateopt::oracle::DEFAULT_LIMIT;
use gateopt::tabu::{exchange_neighbors, insert_neighbors, solve_traced};
use gateopt::{
    exhaustive_solve, generate, initial_solution, obj_composite, solve, Assignment, Error, GenParams, Instance,
    ScenarioWeights, TabuParams,
};

fn hub(seed: u64) -> Instance {
    generate(&GenParams { n_flights: 30, n_gates: 6, rng_seed: seed, ..GenParams::default() }).unwrap()
}

fn small(seed: u64) -> Instance {
    generate(&GenParams {
        n_flights: 5 + (seed % 3) as usize,
        n_gates: 3,
        n_banks: 2,
        day_span: 240.0,
        rng_seed: seed,
        ..GenParams::default()
    })
    .unwrap()
}

/// Random feasible assignment by random first-fit with retries.
fn random_feasible(inst: &Instance, rng: &mut impl Rng) -> Option<Assignment> {
    'attempt: for _ in 0..50 {
        let mut gate_of: Vec<usize> = Vec::new();
        for f in 0..inst.n_flights() {
            let open: Vec<usize> = (0..inst.n_gates())
                .filter(|&g| {
                    let mut trial = gate_of.clone();
                    trial.push(g);
                    trial.resize(inst.n_flights(), usize::MAX);
                    (0..f).all(|p| {
                        gate_of[p] != g
                            || gateopt::feasibility::is_pair_compatible(
                                &inst.flights()[p],
                                &inst.flights()[f],
                                inst.params().t_buff,
                            )
                    })
                })
                .collect();
            if open.is_empty() {
                continue 'attempt;
            }
            gate_of.push(open[rng.random_range(0..open.len())]);
        }
        return Some(Assignment::new(gate_of));
    }
    None
}

#[test]
fn insert_neighbors_keep_feasibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let w = ScenarioWeights::scenario(5).unwrap();
    let mut states = 0;
    for seed in 0..20 {
        let inst = hub(seed);
        for _ in 0..50 {
            let Some(asg) = random_feasible(&inst, &mut rng) else { continue };
            states += 1;
            let base = obj_composite(&inst, &asg, &w).composite;
            for mv in insert_neighbors(&inst, &asg, &w) {
                let mut next = asg.clone();
                next.set(mv.flight, mv.gate);
                assert!(is_feasible(&inst, &next));
                let full = obj_composite(&inst, &next, &w).composite - base;
                assert!((mv.delta - full).abs() <= 1e-9 * base.max(1.0));
            }
        }
    }
    assert!(states >= 1000, "only {states} random states");
}

#[test]
fn exchange_deltas_match_full_recompute() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let w = ScenarioWeights::new(0.3, 0.3, 0.4).unwrap();
    let mut checked = 0;
    for seed in 0..20 {
        let inst = hub(seed);
        let asg = initial_solution(&inst).unwrap();
        let base = obj_composite(&inst, &asg, &w).composite;
        for mv in exchange_neighbors(&inst, &asg, 50, &w, &mut rng) {
            assert!(!mv.moved.is_empty());
            assert_ne!(mv.gate_a, mv.gate_b);
            let mut next = asg.clone();
            for &(f, g) in &mv.moved {
                assert!(g == mv.gate_a || g == mv.gate_b);
                let t = &inst.flights()[f];
                assert!(t.t_in >= mv.window.0 && t.t_out <= mv.window.1);
                next.set(f, g);
            }
            assert!(is_feasible(&inst, &next), "{:?}", gate_violation_pairs(&inst, &next));
            let full = obj_composite(&inst, &next, &w).composite - base;
            assert!((mv.delta - full).abs() <= 1e-9 * base.max(1.0));
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn solve_invariants() {
    for seed in 0..8 {
        let inst = hub(seed);
        let w = ScenarioWeights::scenario((seed % 5 + 1) as usize).unwrap();
        let params = TabuParams { restarts: 2, rng_seed: seed, max_iter: 1500, ..TabuParams::default() };
        let (res, traces) = solve_traced(&inst, &w, &params).unwrap();

        assert!(is_feasible(&inst, &res.assignment));
        let again = obj_composite(&inst, &res.assignment, &w);
        assert!((again.composite - res.breakdown.composite).abs() <= 1e-9 * again.composite.max(1.0));
        let greedy = obj_composite(&inst, &initial_solution(&inst).unwrap(), &w).composite;
        assert!(res.breakdown.composite <= greedy + 1e-9 * greedy);
        assert_eq!(traces.len(), 2);

        // replay the first restart from the greedy start
        let mut asg = initial_solution(&inst).unwrap();
        let mut current = obj_composite(&inst, &asg, &w).composite;
        let mut best = current;
        let mut left_at: HashMap<(usize, usize), usize> = HashMap::new();
        for step in &traces[0] {
            assert!(step.best_before <= best + 1e-9 * best, "best-so-far went up");
            best = step.best_before;
            let improves = current + step.delta < step.best_before - 1e-9 * step.best_before.max(1.0);
            for &(f, from, to) in &step.moved {
                assert_eq!(asg.gate(f), from);
                if let Some(&t) = left_at.get(&(f, to)) {
                    if step.iteration - t <= params.tenure {
                        assert!(step.aspiration && improves, "tabu move at iteration {} without aspiration", step.iteration);
                    }
                }
            }
            for &(f, from, to) in &step.moved {
                asg.set(f, to);
                left_at.insert((f, from), step.iteration);
            }
            assert!(is_feasible(&inst, &asg), "infeasible state at iteration {}", step.iteration);
            current += step.delta;
            let full = obj_composite(&inst, &asg, &w).composite;
            assert!((current - full).abs() <= 1e-6 * full.max(1.0));
            if improves {
                best = current;
            }
        }
    }
}

#[test]
fn solve_is_deterministic() {
    let inst = hub(4);
    let w = ScenarioWeights::scenario(5).unwrap();
    let params = TabuParams { restarts: 3, rng_seed: 99, ..TabuParams::default() };
    let a = solve(&inst, &w, &params).unwrap();
    let b = solve(&inst, &w, &params).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn infeasible_instance_is_reported() {
    let inst = generate(&GenParams { n_flights: 30, n_gates: 6, rng_seed: 1, ..GenParams::default() }).unwrap();
    // shrink to two gates: the generated schedule needs more
    let gates = inst.gates()[..2].to_vec();
    let dist = inst.gate_dist()[..2].iter().map(|r| r[..2].to_vec()).collect();
    let tight = Instance::new(gates, dist, inst.flights().to_vec(), inst.transfers().clone(), *inst.params());
    let w = ScenarioWeights::scenario(1).unwrap();
    assert!(matches!(solve(&tight, &w, &TabuParams::default()), Err(Error::NoFeasibleGate { .. })));
}

#[test]
fn oracle_beats_random_feasible_assignments() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for seed in 0..10 {
        let inst = small(seed);
        let w = ScenarioWeights::scenario(5).unwrap();
        let opt = exhaustive_solve(&inst, &w, DEFAULT_LIMIT).unwrap();
        assert!(is_feasible(&inst, &opt.assignment));
        for _ in 0..1000 {
            let Some(asg) = random_feasible(&inst, &mut rng) else { continue };
            assert!(opt.breakdown.composite <= obj_composite(&inst, &asg, &w).composite + 1e-9);
        }
    }
}

#[test]
fn oracle_is_the_true_minimum() {
    // plain enumeration of every gate vector, filtered by feasibility
    for seed in 0..10 {
        let inst = small(seed);
        let w = ScenarioWeights::new(0.2, 0.5, 0.3).unwrap();
        let (nf, ng) = (inst.n_flights(), inst.n_gates());
        let mut best: Option<(f64, Vec<usize>)> = None;
        for code in 0..ng.pow(nf as u32) {
            let gate_of: Vec<usize> = (0..nf).map(|f| code / ng.pow((nf - 1 - f) as u32) % ng).collect();
            let asg = Assignment::new(gate_of.clone());
            if !is_feasible(&inst, &asg) {
                continue;
            }
            let v = obj_composite(&inst, &asg, &w).composite;
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, gate_of));
            }
        }
        let (value, gates) = best.unwrap();
        let opt = exhaustive_solve(&inst, &w, DEFAULT_LIMIT).unwrap();
        assert_eq!(opt.assignment.as_slice(), gates.as_slice());
        assert_eq!(opt.breakdown.composite, value);
    }
}

#[test]
fn tabu_finds_small_optima() {
    let mut hits = 0;
    for seed in 0..30 {
        let inst = small(seed);
        let w = ScenarioWeights::scenario((seed % 5 + 1) as usize).unwrap();
        let ts = solve(&inst, &w, &TabuParams { restarts: 5, rng_seed: seed, ..TabuParams::default() }).unwrap();
        let opt = exhaustive_solve(&inst, &w, DEFAULT_LIMIT).unwrap();
        assert!(ts.breakdown.composite >= opt.breakdown.composite - 1e-9 * opt.breakdown.composite.max(1.0));
        if ts.breakdown.composite <= opt.breakdown.composite * (1.0 + 1e-9) {
            hits += 1;
        }
    }
    assert!(hits >= 28, "{hits}/30");
}
