//! Exhaustive search over all assignments, for small instances.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::feasibility::is_pair_compatible;
use crate::model::{Assignment, FlightId, Instance, ScenarioWeights};
use crate::objectives::obj_composite;
use crate::tabu::SolveResult;

pub const DEFAULT_LIMIT: u64 = 10_000_000;

/// Returns the feasible assignment with the lowest composite objective.
/// Ties go to the lexicographically smallest gate vector.
///
/// Enumerates gate vectors depth-first in lexicographic order, pruning
/// branches as soon as a partial assignment breaks the buffer constraint.
pub fn exhaustive_solve(inst: &Instance, w: &ScenarioWeights, limit: u64) -> Result<SolveResult> {
    let (nf, ng) = (inst.n_flights(), inst.n_gates());
    let size = (ng as u128).checked_pow(nf as u32);
    match size {
        Some(s) if s <= limit as u128 => {}
        _ => {
            return Err(Error::SizeLimit {
                size: format!("{ng}^{nf}"),
                limit,
            })
        }
    }
    let start = Instant::now();

    let mut best: Option<(f64, Assignment)> = None;
    let mut evaluated = 0usize;
    let mut gate_of = vec![0usize; nf];
    let mut last_on_gate: Vec<Vec<Option<FlightId>>> = vec![vec![None; ng]; nf + 1];

    // explicit stack of (depth, next gate to try)
    let mut stack = vec![(0usize, 0usize)];
    while let Some((depth, g)) = stack.pop() {
        if depth == nf {
            let asg = Assignment::new(gate_of.clone());
            let value = obj_composite(inst, &asg, w).composite;
            evaluated += 1;
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, asg));
            }
            continue;
        }
        if g >= ng {
            continue;
        }
        stack.push((depth, g + 1));
        let fits = match last_on_gate[depth][g] {
            Some(p) => is_pair_compatible(&inst.flights()[p], &inst.flights()[depth], inst.params().t_buff),
            None => true,
        };
        if fits {
            gate_of[depth] = g;
            let mut next = last_on_gate[depth].clone();
            next[g] = Some(depth);
            last_on_gate[depth + 1] = next;
            stack.push((depth + 1, 0));
        }
    }

    let (_, assignment) = best.ok_or(Error::NoFeasibleAssignment)?;
    let breakdown = obj_composite(inst, &assignment, w);
    Ok(SolveResult {
        assignment,
        breakdown,
        iterations: evaluated,
        best_iteration: 0,
        restarts_used: 0,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Flight, Gate, GlobalParams, TransferMatrix};

    fn inst(times: &[(f64, f64)], n_gates: usize) -> Instance {
        let gates = (0..n_gates).map(|id| Gate { id, d_s: 100.0, d_b: 100.0, r: 100.0 }).collect();
        let dist = (0..n_gates)
            .map(|j| (0..n_gates).map(|l| if j == l { 0.0 } else { 50.0 }).collect())
            .collect();
        let flights = times
            .iter()
            .enumerate()
            .map(|(id, &(t_in, t_out))| Flight { id, t_in, t_out, n_o: 10, n_d: 10, n_in: 10, n_out: 10 })
            .collect();
        Instance::new(gates, dist, flights, TransferMatrix::default(), GlobalParams::default())
    }

    fn w() -> ScenarioWeights {
        ScenarioWeights::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn single_flight_single_gate() {
        let r = exhaustive_solve(&inst(&[(0.0, 60.0)], 1), &w(), DEFAULT_LIMIT).unwrap();
        assert_eq!(r.assignment.as_slice(), &[0]);
    }

    #[test]
    fn identical_gates_tie_break() {
        let r = exhaustive_solve(&inst(&[(0.0, 60.0), (10.0, 70.0)], 2), &w(), DEFAULT_LIMIT).unwrap();
        assert_eq!(r.assignment.as_slice(), &[0, 1]);
    }

    #[test]
    fn errors() {
        let crowded = inst(&[(0.0, 60.0), (10.0, 70.0), (20.0, 80.0)], 2);
        assert!(matches!(exhaustive_solve(&crowded, &w(), DEFAULT_LIMIT), Err(Error::NoFeasibleAssignment)));
        let big = inst(&[(0.0, 60.0); 30], 3);
        assert!(matches!(exhaustive_solve(&big, &w(), DEFAULT_LIMIT), Err(Error::SizeLimit { .. })));
    }
}
