//! Single-lane ramp abstraction: the spot sits at lane position 0 and every
//! gate at its position `r`. Arrivals taxi inbound from the spot to the gate,
//! departures push back and taxi outbound from the gate to the spot.

use serde::{Deserialize, Serialize};

use crate::model::{Assignment, FlightId, Gate, GateId, GlobalParams, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MovementKind {
    Arrival,
    Departure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Inbound,
    Outbound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Movement {
    pub flight: FlightId,
    pub kind: MovementKind,
    pub gate: GateId,
    /// Time interval `[start, end]` on the ramp, minutes.
    pub window: (f64, f64),
    /// Lane interval `[0, r]` swept by the aircraft, meters.
    pub segment: (f64, f64),
    pub direction: Direction,
    /// Passengers on board.
    pub pax: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Blocking {
    PushBack,
    Taxi,
}

/// Unimpeded `(taxi-in, taxi-out)` times of a gate. Taxi-out includes the
/// push-back.
pub fn unimpeded_times(gate: &Gate, params: &GlobalParams) -> (f64, f64) {
    let taxi = gate.r / params.v_taxi;
    (taxi, params.t_pb + taxi)
}

/// Open-interval overlap: touching endpoints do not count, but a degenerate
/// interval strictly inside the other one does.
pub(crate) fn windows_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

pub(crate) fn arrival_movement(inst: &Instance, flight: FlightId, gate: GateId) -> Movement {
    let f = &inst.flights()[flight];
    let u_in = inst.derived().u_in[gate];
    Movement {
        flight,
        kind: MovementKind::Arrival,
        gate,
        window: (f.t_in - u_in, f.t_in),
        segment: (0.0, inst.gates()[gate].r),
        direction: Direction::Inbound,
        pax: f.n_in,
    }
}

pub(crate) fn departure_movement(inst: &Instance, flight: FlightId, gate: GateId) -> Movement {
    let f = &inst.flights()[flight];
    let u_out = inst.derived().u_out[gate];
    Movement {
        flight,
        kind: MovementKind::Departure,
        gate,
        window: (f.t_out, f.t_out + u_out),
        segment: (0.0, inst.gates()[gate].r),
        direction: Direction::Outbound,
        pax: f.n_out,
    }
}

/// Both ramp movements of every flight, arrival first.
pub fn movements(inst: &Instance, asg: &Assignment) -> Vec<Movement> {
    (0..inst.n_flights())
        .flat_map(|i| {
            let g = asg.gate(i);
            [arrival_movement(inst, i, g), departure_movement(inst, i, g)]
        })
        .collect()
}

fn blocks_push_back(dep: &Movement, other: &Movement, params: &GlobalParams) -> bool {
    if dep.kind != MovementKind::Departure {
        return false;
    }
    let push = (dep.window.0, dep.window.0 + params.t_pb);
    let pos = dep.segment.1;
    windows_overlap(push, other.window) && other.segment.0 < pos && pos < other.segment.1
}

/// Classifies the interaction of two movements of different flights.
/// Push-back blocking takes precedence over taxi blocking.
pub fn taxi_conflict(m1: &Movement, m2: &Movement, params: &GlobalParams) -> Option<Blocking> {
    if m1.flight == m2.flight {
        return None;
    }
    if blocks_push_back(m1, m2, params) || blocks_push_back(m2, m1, params) {
        return Some(Blocking::PushBack);
    }
    let shared_lane = m1.segment.1.min(m2.segment.1) - m1.segment.0.max(m2.segment.0);
    if m1.direction != m2.direction && windows_overlap(m1.window, m2.window) && shared_lane > 0.0 {
        return Some(Blocking::Taxi);
    }
    None
}

/// Every interfering pair of movements, each unordered pair once.
pub fn blocking_pairs(inst: &Instance, asg: &Assignment) -> Vec<(Movement, Movement, Blocking)> {
    let moves = movements(inst, asg);
    let params = inst.params();
    let mut out = Vec::new();
    for (a, m1) in moves.iter().enumerate() {
        for m2 in &moves[a + 1..] {
            if let Some(kind) = taxi_conflict(m1, m2, params) {
                out.push((*m1, *m2, kind));
            }
        }
    }
    out
}

/// Blocking delay, in passenger-minutes, between flight `i` at gate `gi` and
/// flight `k` at gate `gk`.
pub(crate) fn pair_delay(inst: &Instance, i: FlightId, gi: GateId, k: FlightId, gk: GateId) -> f64 {
    let params = inst.params();
    if params.t_dly == 0.0 {
        return 0.0;
    }
    let mi = [arrival_movement(inst, i, gi), departure_movement(inst, i, gi)];
    let mk = [arrival_movement(inst, k, gk), departure_movement(inst, k, gk)];
    let mut total = 0.0;
    for a in &mi {
        for b in &mk {
            if taxi_conflict(a, b, params).is_some() {
                total += (a.pax as f64 + b.pax as f64) * params.t_dly;
            }
        }
    }
    total
}
