//! Tabu search over feasible assignments.
//!
//! Each iteration scans the whole insert neighborhood (one flight to another
//! gate). Every `exchange_period` iterations a sample of interval exchanges
//! (two gates swap the flights they hold inside a time window) is scanned as
//! well. The best admissible move is applied even when it worsens the
//! objective. A move is inadmissible while tabu, unless it would beat the best
//! composite seen so far in this run.
//!
//! Tabu attribute: `(flight, gate)`. Moving a flight off a gate forbids moving
//! it back for `tenure` iterations.

use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conflict::splitmix64;
use crate::error::{Error, Result};
use crate::feasibility::{fits_with, gate_members, is_pair_compatible};
use crate::model::{Assignment, FlightId, GateId, Instance, ScenarioWeights};
use crate::objectives::{insert_parts, obj_composite, ObjectiveBreakdown, Parts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabuParams {
    pub max_iter: usize,
    /// Stop after this many iterations without a new best.
    pub stall_limit: usize,
    pub tenure: usize,
    pub exchange_period: usize,
    pub exchange_candidates: usize,
    pub restarts: usize,
    pub rng_seed: u64,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            stall_limit: 500,
            tenure: 10,
            exchange_period: 50,
            exchange_candidates: 20,
            restarts: 1,
            rng_seed: 0,
        }
    }
}

impl TabuParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("max_iter", self.max_iter),
            ("stall_limit", self.stall_limit),
            ("exchange_period", self.exchange_period),
            ("exchange_candidates", self.exchange_candidates),
            ("restarts", self.restarts),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidParams(format!("{name} must be >= 1")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub assignment: Assignment,
    pub breakdown: ObjectiveBreakdown,
    /// Iterations run by the winning restart.
    pub iterations: usize,
    /// Iteration at which the winning restart found its best assignment.
    pub best_iteration: usize,
    pub restarts_used: usize,
    /// Seconds; not serialized so that result files are reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertMove {
    pub flight: FlightId,
    pub gate: GateId,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeMove {
    pub gate_a: GateId,
    pub gate_b: GateId,
    pub window: (f64, f64),
    /// `(flight, destination gate)` for every flight that changes gate.
    pub moved: Vec<(FlightId, GateId)>,
    pub delta: f64,
}

/// Greedy first-fit: each flight, in arrival order, takes the lowest-index
/// gate that respects the buffer against flights already placed.
pub fn initial_solution(inst: &Instance) -> Result<Assignment> {
    let mut members: Vec<Vec<FlightId>> = vec![Vec::new(); inst.n_gates()];
    let mut gate_of = Vec::with_capacity(inst.n_flights());
    for f in 0..inst.n_flights() {
        let g = (0..inst.n_gates())
            .find(|&g| fits_with(inst, f, &members[g]))
            .ok_or(Error::NoFeasibleGate { flight: f })?;
        members[g].push(f);
        gate_of.push(g);
    }
    Ok(Assignment::new(gate_of))
}

/// Like [`initial_solution`] but picks a uniformly random fitting gate.
/// Returns `None` if the random choices strand a flight.
fn random_initial(inst: &Instance, rng: &mut ChaCha8Rng) -> Option<Assignment> {
    let mut members: Vec<Vec<FlightId>> = vec![Vec::new(); inst.n_gates()];
    let mut gate_of = Vec::with_capacity(inst.n_flights());
    let mut open = Vec::with_capacity(inst.n_gates());
    for f in 0..inst.n_flights() {
        open.clear();
        open.extend((0..inst.n_gates()).filter(|&g| fits_with(inst, f, &members[g])));
        let &g = open.choose(rng)?;
        members[g].push(f);
        gate_of.push(g);
    }
    Some(Assignment::new(gate_of))
}

/// Every feasibility-preserving single-flight reassignment with its composite
/// delta, in `(flight, gate)` order.
pub fn insert_neighbors<'a>(
    inst: &'a Instance,
    asg: &'a Assignment,
    w: &'a ScenarioWeights,
) -> impl Iterator<Item = InsertMove> + 'a {
    let members = gate_members(inst, asg);
    (0..inst.n_flights()).flat_map(move |f| {
        let from = asg.gate(f);
        let members = members.clone();
        (0..inst.n_gates()).filter_map(move |g| {
            if g == from || !fits_with(inst, f, &members[g]) {
                return None;
            }
            let delta = insert_parts(inst, asg, f, g, &members[from], &members[g]).weighted(w);
            Some(InsertMove { flight: f, gate: g, delta })
        })
    })
}

fn chain_feasible(inst: &Instance, members: &mut [FlightId]) -> bool {
    members.sort_unstable();
    let flights = inst.flights();
    let t_buff = inst.params().t_buff;
    members
        .windows(2)
        .all(|w| is_pair_compatible(&flights[w[0]], &flights[w[1]], t_buff))
}

/// Distinct schedule event times, ascending.
fn boundaries(inst: &Instance) -> Vec<f64> {
    let mut b: Vec<f64> = inst
        .flights()
        .iter()
        .flat_map(|f| [f.t_in, f.t_out])
        .collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Evaluates swapping the flights of `gate_a` and `gate_b` that lie inside
/// `window`. `None` when nothing moves or the swap breaks feasibility.
fn evaluate_exchange(
    inst: &Instance,
    asg: &Assignment,
    members: &[Vec<FlightId>],
    gate_a: GateId,
    gate_b: GateId,
    window: (f64, f64),
) -> Option<(Vec<(FlightId, GateId)>, Parts)> {
    let flights = inst.flights();
    let inside = |&f: &FlightId| flights[f].t_in >= window.0 && flights[f].t_out <= window.1;
    let group_a: Vec<FlightId> = members[gate_a].iter().copied().filter(inside).collect();
    let group_b: Vec<FlightId> = members[gate_b].iter().copied().filter(inside).collect();
    if group_a.is_empty() && group_b.is_empty() {
        return None;
    }

    let mut after_a: Vec<FlightId> = members[gate_a]
        .iter()
        .copied()
        .filter(|f| !group_a.contains(f))
        .chain(group_b.iter().copied())
        .collect();
    let mut after_b: Vec<FlightId> = members[gate_b]
        .iter()
        .copied()
        .filter(|f| !group_b.contains(f))
        .chain(group_a.iter().copied())
        .collect();
    if !chain_feasible(inst, &mut after_a) || !chain_feasible(inst, &mut after_b) {
        return None;
    }

    // apply the moves one at a time on a scratch copy; each step only
    // touches the two gates involved
    let mut scratch = asg.clone();
    let mut on_a = members[gate_a].clone();
    let mut on_b = members[gate_b].clone();
    let mut parts = Parts::default();
    let mut moved = Vec::with_capacity(group_a.len() + group_b.len());
    for &f in &group_a {
        parts += insert_parts(inst, &scratch, f, gate_b, &on_a, &on_b);
        scratch.set(f, gate_b);
        on_a.retain(|&x| x != f);
        on_b.push(f);
        moved.push((f, gate_b));
    }
    for &f in &group_b {
        parts += insert_parts(inst, &scratch, f, gate_a, &on_b, &on_a);
        scratch.set(f, gate_a);
        on_b.retain(|&x| x != f);
        on_a.push(f);
        moved.push((f, gate_a));
    }
    moved.sort_unstable();
    Some((moved, parts))
}

fn sample_exchanges(
    inst: &Instance,
    asg: &Assignment,
    members: &[Vec<FlightId>],
    n_candidates: usize,
    rng: &mut impl Rng,
) -> Vec<(ExchangeMove, Parts)> {
    let ng = inst.n_gates();
    let events = boundaries(inst);
    if ng < 2 || events.is_empty() {
        return Vec::new();
    }
    let flights = inst.flights();
    let t_buff = inst.params().t_buff;
    let mut out = Vec::new();
    for _ in 0..n_candidates {
        let gate_a = rng.random_range(0..ng);
        let gate_b = (gate_a + rng.random_range(1..ng)) % ng;
        let pool = members[gate_a].len() + members[gate_b].len();
        if pool == 0 {
            continue;
        }
        // anchor on one flight of either gate, stretched right by a
        // log-uniform number of events
        let pick = rng.random_range(0..pool);
        let anchor = members[gate_a]
            .get(pick)
            .copied()
            .unwrap_or_else(|| members[gate_b][pick - members[gate_a].len()]);
        let (mut lo, mut hi) = (flights[anchor].t_in, flights[anchor].t_out);
        let n = events.len();
        let stretch = (n as f64).powf(rng.random::<f64>()) as usize - 1;
        let at = events.partition_point(|&e| e < hi);
        hi = events[(at + stretch).min(n - 1)];
        // grow until every flight left on either gate clears the window by
        // the buffer, so the swap is feasible by construction
        loop {
            let (mut new_lo, mut new_hi) = (lo, hi);
            for &f in members[gate_a].iter().chain(&members[gate_b]) {
                let fl = &flights[f];
                let inside = fl.t_in >= lo && fl.t_out <= hi;
                let clear = fl.t_out + t_buff <= lo || hi + t_buff <= fl.t_in;
                if !inside && !clear {
                    new_lo = new_lo.min(fl.t_in);
                    new_hi = new_hi.max(fl.t_out);
                }
            }
            if (new_lo, new_hi) == (lo, hi) {
                break;
            }
            (lo, hi) = (new_lo, new_hi);
        }
        let window = (lo, hi);
        if let Some((moved, parts)) = evaluate_exchange(inst, asg, members, gate_a, gate_b, window) {
            out.push((
                ExchangeMove { gate_a, gate_b, window, moved, delta: 0.0 },
                parts,
            ));
        }
    }
    out
}

/// Samples `n_candidates` interval exchanges and returns the ones that move
/// at least one flight and keep both gates feasible.
pub fn exchange_neighbors(
    inst: &Instance,
    asg: &Assignment,
    n_candidates: usize,
    w: &ScenarioWeights,
    rng: &mut impl Rng,
) -> Vec<ExchangeMove> {
    let members = gate_members(inst, asg);
    sample_exchanges(inst, asg, &members, n_candidates, rng)
        .into_iter()
        .map(|(mut m, parts)| {
            m.delta = parts.weighted(w);
            m
        })
        .collect()
}

/// One applied move, for inspecting a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub iteration: usize,
    /// `(flight, from, to)`.
    pub moved: Vec<(FlightId, GateId, GateId)>,
    pub delta: f64,
    /// Best composite before this move.
    pub best_before: f64,
    /// The move was tabu and admitted by aspiration.
    pub aspiration: bool,
}

struct RunOutcome {
    best: Assignment,
    best_value: f64,
    iterations: usize,
    best_iteration: usize,
}

enum Candidate {
    Insert { flight: FlightId, gate: GateId },
    Exchange(Vec<(FlightId, GateId)>),
}

struct Search<'a> {
    inst: &'a Instance,
    w: ScenarioWeights,
    params: TabuParams,
    asg: Assignment,
    members: Vec<Vec<FlightId>>,
    /// Iteration index from which `(flight, gate)` is admissible again.
    tabu_until: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, w: ScenarioWeights, params: TabuParams, start: Assignment) -> Self {
        let members = gate_members(inst, &start);
        Self {
            inst,
            w,
            params,
            asg: start,
            members,
            tabu_until: vec![0; inst.n_flights() * inst.n_gates()],
        }
    }

    fn is_tabu(&self, flight: FlightId, gate: GateId, iter: usize) -> bool {
        self.tabu_until[flight * self.inst.n_gates() + gate] > iter
    }

    fn apply(&mut self, flight: FlightId, to: GateId, iter: usize) -> GateId {
        let from = self.asg.gate(flight);
        self.members[from].retain(|&x| x != flight);
        let slot = self.members[to].partition_point(|&x| x < flight);
        self.members[to].insert(slot, flight);
        self.asg.set(flight, to);
        self.tabu_until[flight * self.inst.n_gates() + from] = iter + self.params.tenure + 1;
        from
    }

    fn run(mut self, rng: &mut ChaCha8Rng, mut trace: Option<&mut Vec<TraceStep>>) -> RunOutcome {
        let inst = self.inst;
        let (nf, ng) = (inst.n_flights(), inst.n_gates());
        let mut current = obj_composite(inst, &self.asg, &self.w).composite;
        let mut best = self.asg.clone();
        let mut best_value = current;
        let mut best_iteration = 0;
        let mut iter = 0;

        // with one gate nothing can ever move
        while ng > 1 && iter < self.params.max_iter && iter - best_iteration < self.params.stall_limit {
            let improves = |delta: f64, best_value: f64| {
                current + delta < best_value - 1e-9 * best_value.abs().max(1.0)
            };
            let mut choice: Option<(f64, Candidate, bool)> = None;

            for f in 0..nf {
                let from = self.asg.gate(f);
                for g in 0..ng {
                    if g == from || !fits_with(inst, f, &self.members[g]) {
                        continue;
                    }
                    let delta = insert_parts(inst, &self.asg, f, g, &self.members[from], &self.members[g])
                        .weighted(&self.w);
                    let tabu = self.is_tabu(f, g, iter);
                    if tabu && !improves(delta, best_value) {
                        continue;
                    }
                    // strict comparison keeps the lowest (flight, gate) on ties
                    if choice.as_ref().is_none_or(|c| delta < c.0) {
                        choice = Some((delta, Candidate::Insert { flight: f, gate: g }, tabu));
                    }
                }
            }

            if (iter + 1) % self.params.exchange_period == 0 {
                let sampled =
                    sample_exchanges(inst, &self.asg, &self.members, self.params.exchange_candidates, rng);
                for (mv, parts) in sampled {
                    let delta = parts.weighted(&self.w);
                    let tabu = mv.moved.iter().any(|&(f, g)| self.is_tabu(f, g, iter));
                    if tabu && !improves(delta, best_value) {
                        continue;
                    }
                    if choice.as_ref().is_none_or(|c| delta < c.0) {
                        choice = Some((delta, Candidate::Exchange(mv.moved), tabu));
                    }
                }
            }

            let Some((delta, cand, tabu)) = choice else {
                iter += 1;
                continue;
            };

            let moves = match cand {
                Candidate::Insert { flight, gate } => vec![(flight, gate)],
                Candidate::Exchange(m) => m,
            };
            let mut applied = Vec::with_capacity(moves.len());
            for (f, to) in moves {
                let from = self.apply(f, to, iter);
                applied.push((f, from, to));
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceStep {
                    iteration: iter,
                    moved: applied,
                    delta,
                    best_before: best_value,
                    aspiration: tabu,
                });
            }

            let was_improvement = improves(delta, best_value);
            current += delta;
            iter += 1;
            if was_improvement {
                best_value = current;
                best.clone_from(&self.asg);
                best_iteration = iter;
            }
        }

        RunOutcome {
            best,
            best_value,
            iterations: iter,
            best_iteration,
        }
    }
}

/// Independent child seed for the `index`-th restart or scenario.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

fn solve_impl(
    inst: &Instance,
    w: &ScenarioWeights,
    params: &TabuParams,
    mut traces: Option<&mut Vec<Vec<TraceStep>>>,
) -> Result<SolveResult> {
    params.validate()?;
    let start_time = Instant::now();
    let greedy = initial_solution(inst)?;

    let mut winner: Option<RunOutcome> = None;
    for restart in 0..params.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.rng_seed, restart as u64));
        let start = if restart == 0 {
            greedy.clone()
        } else {
            random_initial(inst, &mut rng).unwrap_or_else(|| greedy.clone())
        };
        let search = Search::new(inst, *w, *params, start);
        let mut steps = Vec::new();
        let outcome = search.run(&mut rng, traces.as_ref().map(|_| &mut steps));
        if let Some(t) = traces.as_deref_mut() {
            t.push(steps);
        }
        if winner.as_ref().is_none_or(|b| outcome.best_value < b.best_value) {
            winner = Some(outcome);
        }
    }

    let best = winner.expect("at least one restart");
    let breakdown = obj_composite(inst, &best.best, w);
    Ok(SolveResult {
        assignment: best.best,
        breakdown,
        iterations: best.iterations,
        best_iteration: best.best_iteration,
        restarts_used: params.restarts,
        wall_time: start_time.elapsed().as_secs_f64(),
    })
}

/// Runs `params.restarts` independent searches and keeps the best.
pub fn solve(inst: &Instance, w: &ScenarioWeights, params: &TabuParams) -> Result<SolveResult> {
    solve_impl(inst, w, params, None)
}

/// [`solve`], also returning the applied moves of every restart.
pub fn solve_traced(
    inst: &Instance,
    w: &ScenarioWeights,
    params: &TabuParams,
) -> Result<(SolveResult, Vec<Vec<TraceStep>>)> {
    let mut traces = Vec::new();
    let res = solve_impl(inst, w, params, Some(&mut traces))?;
    Ok((res, traces))
}
