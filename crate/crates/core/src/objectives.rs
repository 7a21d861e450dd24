//! The three passenger-weighted objectives, their weighted composite, and the
//! incremental evaluation of single-flight reassignments.
//!
//! All three objectives are in passenger-minutes:
//!
//! * transit: walking time of O&D passengers (checkpoint or baggage claim to
//!   gate) and of transfer passengers (gate to gate);
//! * taxi: unimpeded taxi-in and taxi-out time of everyone on board, plus
//!   `t_dly` per blocking event charged to both aircraft's passengers;
//! * robust: for every pair of turns sharing a gate, the later arrival's
//!   passengers times the expected conflict duration `a * b^sep`.

use serde::{Deserialize, Serialize};

use crate::model::{Assignment, FlightId, GateId, Instance, ScenarioWeights};
use crate::ramp;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub pax: f64,
    pub taxi: f64,
    pub robust: f64,
    pub composite: f64,
}

impl ObjectiveBreakdown {
    pub fn from_raw(pax: f64, taxi: f64, robust: f64, w: &ScenarioWeights) -> Self {
        Self {
            pax,
            taxi,
            robust,
            composite: w.w_pax * pax + w.w_taxi * taxi + w.w_robust * robust,
        }
    }
}

/// Raw objective changes of a move, before weighting.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Parts {
    pub pax: f64,
    pub taxi: f64,
    pub robust: f64,
}

impl Parts {
    pub fn weighted(&self, w: &ScenarioWeights) -> f64 {
        w.w_pax * self.pax + w.w_taxi * self.taxi + w.w_robust * self.robust
    }
}

impl std::ops::AddAssign for Parts {
    fn add_assign(&mut self, o: Self) {
        self.pax += o.pax;
        self.taxi += o.taxi;
        self.robust += o.robust;
    }
}

fn linear_pax(inst: &Instance, flight: FlightId, gate: GateId) -> f64 {
    let f = &inst.flights()[flight];
    let g = &inst.gates()[gate];
    (f.n_o as f64 * g.d_s + f.n_d as f64 * g.d_b) / inst.params().v_m
}

fn linear_taxi(inst: &Instance, flight: FlightId, gate: GateId) -> f64 {
    let f = &inst.flights()[flight];
    let d = inst.derived();
    f.n_in as f64 * d.u_in[gate] + f.n_out as f64 * d.u_out[gate]
}

/// Conflict cost of two co-gated turns, charged to the later arrival.
pub(crate) fn robust_pair(inst: &Instance, x: FlightId, y: FlightId) -> f64 {
    let (i, k) = if x < y { (x, y) } else { (y, x) };
    let flights = inst.flights();
    let sep = flights[k].t_in - flights[i].t_out;
    flights[k].n_in as f64 * inst.params().conflict_fit.eval(sep)
}

/// Passenger transit time.
pub fn obj_pax(inst: &Instance, asg: &Assignment) -> f64 {
    let linear: f64 = (0..inst.n_flights())
        .map(|i| linear_pax(inst, i, asg.gate(i)))
        .sum();
    let transfer: f64 = inst
        .transfers()
        .entries()
        .iter()
        .map(|&(i, k, n)| n as f64 * inst.dist(asg.gate(i), asg.gate(k)))
        .sum::<f64>()
        / inst.params().v_m;
    linear + transfer
}

/// Aircraft taxi time weighted by passengers on board.
pub fn obj_taxi(inst: &Instance, asg: &Assignment) -> f64 {
    let linear: f64 = (0..inst.n_flights())
        .map(|i| linear_taxi(inst, i, asg.gate(i)))
        .sum();
    let t_dly = inst.params().t_dly;
    let delay: f64 = ramp::blocking_pairs(inst, asg)
        .iter()
        .map(|(m1, m2, _)| (m1.pax as f64 + m2.pax as f64) * t_dly)
        .sum();
    linear + delay
}

/// Expected gate-conflict time weighted by arriving passengers.
pub fn obj_robust(inst: &Instance, asg: &Assignment) -> f64 {
    let mut total = 0.0;
    for members in crate::feasibility::gate_members(inst, asg) {
        for (a, &i) in members.iter().enumerate() {
            for &k in &members[a + 1..] {
                total += robust_pair(inst, i, k);
            }
        }
    }
    total
}

pub fn obj_composite(inst: &Instance, asg: &Assignment, w: &ScenarioWeights) -> ObjectiveBreakdown {
    ObjectiveBreakdown::from_raw(obj_pax(inst, asg), obj_taxi(inst, asg), obj_robust(inst, asg), w)
}

/// Raw objective change of moving `flight` to `new_gate`, given the current
/// occupants of its old and new gates. Only terms involving `flight` are
/// touched.
pub(crate) fn insert_parts(
    inst: &Instance,
    asg: &Assignment,
    flight: FlightId,
    new_gate: GateId,
    old_members: &[FlightId],
    new_members: &[FlightId],
) -> Parts {
    let old_gate = asg.gate(flight);
    if old_gate == new_gate {
        return Parts::default();
    }
    let d = inst.derived();

    let mut transfer = 0.0;
    for &(k, n) in &d.transfer_adj[flight] {
        let gk = asg.gate(k);
        transfer += n * (inst.dist(new_gate, gk) - inst.dist(old_gate, gk));
    }
    let pax = linear_pax(inst, flight, new_gate) - linear_pax(inst, flight, old_gate)
        + transfer / inst.params().v_m;

    let mut taxi = linear_taxi(inst, flight, new_gate) - linear_taxi(inst, flight, old_gate);
    if inst.params().t_dly != 0.0 {
        for &k in &d.taxi_partners[flight] {
            let gk = asg.gate(k);
            taxi += ramp::pair_delay(inst, flight, new_gate, k, gk)
                - ramp::pair_delay(inst, flight, old_gate, k, gk);
        }
    }

    let mut robust = 0.0;
    if inst.params().conflict_fit.a != 0.0 {
        for &k in new_members.iter().filter(|&&k| k != flight) {
            robust += robust_pair(inst, flight, k);
        }
        for &k in old_members.iter().filter(|&&k| k != flight) {
            robust -= robust_pair(inst, flight, k);
        }
    }

    Parts { pax, taxi, robust }
}

/// Change of the composite objective if `flight` moved to `new_gate`.
/// Returns 0 when `new_gate` is the flight's current gate.
pub fn delta_insert(
    inst: &Instance,
    asg: &Assignment,
    flight: FlightId,
    new_gate: GateId,
    w: &ScenarioWeights,
) -> f64 {
    let old_gate = asg.gate(flight);
    if old_gate == new_gate {
        return 0.0;
    }
    let old_members: Vec<_> = asg.flights_at(old_gate).collect();
    let new_members: Vec<_> = asg.flights_at(new_gate).collect();
    insert_parts(inst, asg, flight, new_gate, &old_members, &new_members).weighted(w)
}

/// Divides each weight by the matching single-objective reference value so
/// that the three objectives contribute on a comparable scale. Components
/// with a zero reference keep their weight.
pub fn normalize_weights(w: &ScenarioWeights, reference: &ObjectiveBreakdown) -> ScenarioWeights {
    let scale = |wt: f64, r: f64| if r > 0.0 { wt / r } else { wt };
    ScenarioWeights {
        w_pax: scale(w.w_pax, reference.pax),
        w_taxi: scale(w.w_taxi, reference.taxi),
        w_robust: scale(w.w_robust, reference.robust),
    }
}
