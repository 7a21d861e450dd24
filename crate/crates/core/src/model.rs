//! Domain types: gates, turns, transfers, global parameters, assignments and
//! scenario weights, plus instance validation.
//!
//! Times are real-valued minutes since midnight of the schedule day. Turns that
//! run past midnight simply carry `t_out > 1440`. Distances are meters.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ramp;

pub type GateId = usize;
pub type FlightId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub id: GateId,
    /// Walking distance from the security checkpoint.
    pub d_s: f64,
    /// Walking distance to baggage claim.
    pub d_b: f64,
    /// Position along the ramp taxi lane, measured from the spot.
    pub r: f64,
}

/// One aircraft turn: an arrival movement into the gate at `t_in` and a
/// departure movement out of it at `t_out`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flight {
    pub id: FlightId,
    pub t_in: f64,
    pub t_out: f64,
    /// Origin passengers (checkpoint to gate).
    pub n_o: u32,
    /// Destination passengers (gate to baggage claim).
    pub n_d: u32,
    /// Passengers on board during taxi-in.
    pub n_in: u32,
    /// Passengers on board during taxi-out.
    pub n_out: u32,
}

/// Directed transfer counts: `(i, k, n)` means `n` passengers arrive on turn
/// `i` and leave on turn `k`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransferMatrix {
    entries: Vec<(FlightId, FlightId, u32)>,
}

impl TransferMatrix {
    pub fn new(mut entries: Vec<(FlightId, FlightId, u32)>) -> Self {
        entries.sort_unstable();
        Self { entries }
    }

    pub fn entries(&self) -> &[(FlightId, FlightId, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|&(_, _, n)| n == 0)
    }

    pub fn get(&self, from: FlightId, to: FlightId) -> u32 {
        self.entries
            .iter()
            .filter(|&&(i, k, _)| i == from && k == to)
            .map(|&(_, _, n)| n)
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, _, n)| n as u64).sum()
    }
}

/// Expected gate-conflict duration kernel `a * b^sep`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConflictFit {
    /// Expected conflict duration at zero separation, minutes.
    pub a: f64,
    /// Decay base per minute of separation.
    pub b: f64,
}

impl ConflictFit {
    pub fn eval(&self, sep: f64) -> f64 {
        self.a * self.b.powf(sep.max(0.0))
    }
}

impl Default for ConflictFit {
    /// Rounded calibration of [`crate::conflict::DelayModel::default`].
    fn default() -> Self {
        Self { a: 5.95, b: 0.965 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalParams {
    /// Passenger walking speed, meters/minute.
    pub v_m: f64,
    /// Aircraft taxi speed on the ramp, meters/minute.
    pub v_taxi: f64,
    /// Push-back duration, minutes.
    pub t_pb: f64,
    /// Minimum separation between two turns sharing a gate, minutes.
    pub t_buff: f64,
    /// Delay charged per blocking event, minutes.
    pub t_dly: f64,
    pub conflict_fit: ConflictFit,
}

impl Default for GlobalParams {
    fn default() -> Self {
        Self {
            v_m: 80.0,
            v_taxi: 300.0,
            t_pb: 2.0,
            t_buff: 15.0,
            t_dly: 1.0,
            conflict_fit: ConflictFit::default(),
        }
    }
}

/// Immutable problem description.
///
/// Flights are indexed by position and must be sorted by `t_in` (ties by
/// `t_out`, then id). Construction never fails; call [`validate_instance`] or
/// [`Instance::validated`] to check the invariants.
#[derive(Debug, Clone)]
pub struct Instance {
    gates: Vec<Gate>,
    gate_dist: Vec<Vec<f64>>,
    flights: Vec<Flight>,
    transfers: TransferMatrix,
    params: GlobalParams,
    derived: Derived,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.gates == other.gates
            && self.gate_dist == other.gate_dist
            && self.flights == other.flights
            && self.transfers == other.transfers
            && self.params == other.params
    }
}

/// Lookup tables computed once per instance for the evaluators.
#[derive(Debug, Clone, Default)]
pub(crate) struct Derived {
    pub u_in: Vec<f64>,
    pub u_out: Vec<f64>,
    /// Per flight: partners with combined undirected transfer count.
    pub transfer_adj: Vec<Vec<(FlightId, f64)>>,
    /// Per flight: other flights whose ramp movements can overlap in time
    /// for some choice of gates.
    pub taxi_partners: Vec<Vec<FlightId>>,
}

impl Instance {
    pub fn new(
        gates: Vec<Gate>,
        gate_dist: Vec<Vec<f64>>,
        flights: Vec<Flight>,
        transfers: TransferMatrix,
        params: GlobalParams,
    ) -> Self {
        let derived = Derived::build(&gates, &flights, &transfers, &params);
        Self {
            gates,
            gate_dist,
            flights,
            transfers,
            params,
            derived,
        }
    }

    /// Builds the instance and rejects it if any invariant is violated.
    pub fn validated(
        gates: Vec<Gate>,
        gate_dist: Vec<Vec<f64>>,
        flights: Vec<Flight>,
        transfers: TransferMatrix,
        params: GlobalParams,
    ) -> Result<Self> {
        let inst = Self::new(gates, gate_dist, flights, transfers, params);
        let violations = validate_instance(&inst);
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(Error::Validation(violations))
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn flights(&self) -> &[Flight] {
        &self.flights
    }

    pub fn gate_dist(&self) -> &[Vec<f64>] {
        &self.gate_dist
    }

    pub fn dist(&self, j: GateId, l: GateId) -> f64 {
        self.gate_dist[j][l]
    }

    pub fn transfers(&self) -> &TransferMatrix {
        &self.transfers
    }

    pub fn params(&self) -> &GlobalParams {
        &self.params
    }

    pub fn n_flights(&self) -> usize {
        self.flights.len()
    }

    pub fn n_gates(&self) -> usize {
        self.gates.len()
    }

    /// Same instance with different global parameters.
    pub fn with_params(&self, params: GlobalParams) -> Self {
        Self::new(
            self.gates.clone(),
            self.gate_dist.clone(),
            self.flights.clone(),
            self.transfers.clone(),
            params,
        )
    }

    pub(crate) fn derived(&self) -> &Derived {
        &self.derived
    }
}

impl Derived {
    fn build(
        gates: &[Gate],
        flights: &[Flight],
        transfers: &TransferMatrix,
        params: &GlobalParams,
    ) -> Self {
        let (u_in, u_out): (Vec<f64>, Vec<f64>) = gates
            .iter()
            .map(|g| ramp::unimpeded_times(g, params))
            .unzip();

        let nf = flights.len();
        let mut transfer_adj: Vec<Vec<(FlightId, f64)>> = vec![Vec::new(); nf];
        for &(i, k, n) in transfers.entries() {
            if i >= nf || k >= nf || i == k || n == 0 {
                continue;
            }
            for (a, b) in [(i, k), (k, i)] {
                match transfer_adj[a].iter_mut().find(|(p, _)| *p == b) {
                    Some(slot) => slot.1 += n as f64,
                    None => transfer_adj[a].push((b, n as f64)),
                }
            }
        }
        for adj in &mut transfer_adj {
            adj.sort_by_key(|&(p, _)| p);
        }

        let u_in_max = u_in.iter().copied().fold(0.0, f64::max);
        let u_out_max = u_out.iter().copied().fold(0.0, f64::max);
        let envelopes: Vec<[(f64, f64); 2]> = flights
            .iter()
            .map(|f| {
                [
                    (f.t_in - u_in_max, f.t_in),
                    (f.t_out, f.t_out + u_out_max),
                ]
            })
            .collect();
        let mut taxi_partners = vec![Vec::new(); nf];
        for i in 0..nf {
            for k in (i + 1)..nf {
                let touch = envelopes[i].iter().any(|&a| {
                    envelopes[k]
                        .iter()
                        .any(|&b| ramp::windows_overlap(a, b))
                });
                if touch {
                    taxi_partners[i].push(k);
                    taxi_partners[k].push(i);
                }
            }
        }

        Self {
            u_in,
            u_out,
            transfer_adj,
            taxi_partners,
        }
    }
}

/// Total map from flight to gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    gate_of: Vec<GateId>,
}

impl Assignment {
    pub fn new(gate_of: Vec<GateId>) -> Self {
        Self { gate_of }
    }

    pub fn gate(&self, flight: FlightId) -> GateId {
        self.gate_of[flight]
    }

    pub fn set(&mut self, flight: FlightId, gate: GateId) {
        self.gate_of[flight] = gate;
    }

    pub fn len(&self) -> usize {
        self.gate_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gate_of.is_empty()
    }

    pub fn as_slice(&self) -> &[GateId] {
        &self.gate_of
    }

    /// True when every flight of `inst` maps to an existing gate.
    pub fn is_total_for(&self, inst: &Instance) -> bool {
        self.gate_of.len() == inst.n_flights() && self.gate_of.iter().all(|&g| g < inst.n_gates())
    }

    /// Flights on gate `g`, in flight (arrival) order.
    pub fn flights_at(&self, g: GateId) -> impl Iterator<Item = FlightId> + '_ {
        self.gate_of
            .iter()
            .enumerate()
            .filter(move |&(_, &j)| j == g)
            .map(|(i, _)| i)
    }
}

/// Weights over (transit, taxi, robustness).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioWeights {
    pub w_pax: f64,
    pub w_taxi: f64,
    pub w_robust: f64,
}

impl ScenarioWeights {
    pub fn new(w_pax: f64, w_taxi: f64, w_robust: f64) -> Result<Self> {
        let w = Self {
            w_pax,
            w_taxi,
            w_robust,
        };
        let all = [w_pax, w_taxi, w_robust];
        if all.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParams(format!(
                "weights must be finite and nonnegative, got {w_pax},{w_taxi},{w_robust}"
            )));
        }
        if all.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidParams(
                "at least one weight must be positive".into(),
            ));
        }
        Ok(w)
    }

    /// The five preset scenarios: single objectives (1-3), transit and taxi
    /// balanced (4), all three balanced (5).
    pub fn scenario(n: usize) -> Option<Self> {
        let (p, t, r) = match n {
            1 => (1.0, 0.0, 0.0),
            2 => (0.0, 1.0, 0.0),
            3 => (0.0, 0.0, 1.0),
            4 => (0.5, 0.5, 0.0),
            5 => (0.4, 0.4, 0.2),
            _ => return None,
        };
        Some(Self {
            w_pax: p,
            w_taxi: t,
            w_robust: r,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            w_pax: self.w_pax * c,
            w_taxi: self.w_taxi * c,
            w_robust: self.w_robust * c,
        }
    }
}

impl fmt::Display for ScenarioWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.w_pax, self.w_taxi, self.w_robust)
    }
}

/// One broken invariant, with the ids needed to locate it.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    GateId { index: usize, id: GateId },
    GateDistance { gate: GateId, field: &'static str, value: f64 },
    GateDistShape { rows: usize, expected: usize },
    GateDistEntry { j: GateId, l: GateId, reason: &'static str },
    FlightId { index: usize, id: FlightId },
    TurnOrder { flight: FlightId, t_in: f64, t_out: f64 },
    NonFiniteTime { flight: FlightId },
    ArrivalBelowDestination { flight: FlightId, n_in: u32, n_d: u32 },
    DepartureBelowOrigin { flight: FlightId, n_out: u32, n_o: u32 },
    Unsorted { flight: FlightId },
    TransferRange { from: FlightId, to: FlightId },
    TransferDuplicate { from: FlightId, to: FlightId },
    TransferTiming { from: FlightId, to: FlightId },
    ArrivalBalance { flight: FlightId, n_in: u64, expected: u64 },
    DepartureBalance { flight: FlightId, n_out: u64, expected: u64 },
    Param { name: &'static str, value: f64, requirement: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            GateId { index, id } => write!(f, "gate at index {index} has id {id}"),
            GateDistance { gate, field, value } => {
                write!(f, "gate {gate}: {field} = {value} must be >= 0")
            }
            GateDistShape { rows, expected } => {
                write!(f, "gate_dist is not {expected}x{expected} (found {rows} rows or a ragged row)")
            }
            GateDistEntry { j, l, reason } => write!(f, "gate_dist[{j}][{l}]: {reason}"),
            FlightId { index, id } => write!(f, "flight at index {index} has id {id}"),
            TurnOrder { flight, t_in, t_out } => {
                write!(f, "flight {flight}: t_out > t_in required (t_in={t_in}, t_out={t_out})")
            }
            NonFiniteTime { flight } => write!(f, "flight {flight}: non-finite time"),
            ArrivalBelowDestination { flight, n_in, n_d } => {
                write!(f, "flight {flight}: n_in >= n_d required ({n_in} < {n_d})")
            }
            DepartureBelowOrigin { flight, n_out, n_o } => {
                write!(f, "flight {flight}: n_out >= n_o required ({n_out} < {n_o})")
            }
            Unsorted { flight } => {
                write!(f, "flight {flight}: flights not sorted by (t_in, t_out, id)")
            }
            TransferRange { from, to } => write!(f, "transfer ({from}, {to}) names an unknown flight"),
            TransferDuplicate { from, to } => write!(f, "transfer ({from}, {to}) listed more than once"),
            TransferTiming { from, to } => {
                write!(f, "transfer ({from}, {to}) requires t_in({from}) < t_out({to})")
            }
            ArrivalBalance { flight, n_in, expected } => write!(
                f,
                "flight {flight}: n_in = {n_in} but n_d + outgoing transfers = {expected}"
            ),
            DepartureBalance { flight, n_out, expected } => write!(
                f,
                "flight {flight}: n_out = {n_out} but n_o + incoming transfers = {expected}"
            ),
            Param { name, value, requirement } => {
                write!(f, "parameter {name} = {value}: must be {requirement}")
            }
        }
    }
}

/// Checks every instance invariant and returns all violations found.
#[allow(clippy::needless_range_loop)]
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_params(inst.params(), &mut out);

    let ng = inst.n_gates();
    for (index, g) in inst.gates().iter().enumerate() {
        if g.id != index {
            out.push(Violation::GateId { index, id: g.id });
        }
        for (field, value) in [("d_s", g.d_s), ("d_b", g.d_b), ("r", g.r)] {
            if !(value >= 0.0 && value.is_finite()) {
                out.push(Violation::GateDistance {
                    gate: index,
                    field,
                    value,
                });
            }
        }
    }

    let dist = inst.gate_dist();
    if dist.len() != ng || dist.iter().any(|row| row.len() != ng) {
        out.push(Violation::GateDistShape {
            rows: dist.len(),
            expected: ng,
        });
    } else {
        for j in 0..ng {
            for l in 0..ng {
                let d = dist[j][l];
                if !(d >= 0.0 && d.is_finite()) {
                    out.push(Violation::GateDistEntry { j, l, reason: "must be finite and >= 0" });
                }
                if j == l && d != 0.0 {
                    out.push(Violation::GateDistEntry { j, l, reason: "diagonal must be 0" });
                }
                if j < l && d != dist[l][j] {
                    out.push(Violation::GateDistEntry { j, l, reason: "matrix must be symmetric" });
                }
            }
        }
    }

    let flights = inst.flights();
    let nf = flights.len();
    for (index, f) in flights.iter().enumerate() {
        if f.id != index {
            out.push(Violation::FlightId { index, id: f.id });
        }
        if !(f.t_in.is_finite() && f.t_out.is_finite()) {
            out.push(Violation::NonFiniteTime { flight: index });
        } else if f.t_out <= f.t_in {
            out.push(Violation::TurnOrder {
                flight: index,
                t_in: f.t_in,
                t_out: f.t_out,
            });
        }
        if f.n_in < f.n_d {
            out.push(Violation::ArrivalBelowDestination {
                flight: index,
                n_in: f.n_in,
                n_d: f.n_d,
            });
        }
        if f.n_out < f.n_o {
            out.push(Violation::DepartureBelowOrigin {
                flight: index,
                n_out: f.n_out,
                n_o: f.n_o,
            });
        }
        if index > 0 {
            let p = &flights[index - 1];
            let key = |x: &Flight| (x.t_in, x.t_out, x.id);
            if key(p).partial_cmp(&key(f)) != Some(std::cmp::Ordering::Less) {
                out.push(Violation::Unsorted { flight: index });
            }
        }
    }

    let mut outgoing = vec![0u64; nf];
    let mut incoming = vec![0u64; nf];
    let entries = inst.transfers().entries();
    for (idx, &(i, k, n)) in entries.iter().enumerate() {
        if i >= nf || k >= nf {
            out.push(Violation::TransferRange { from: i, to: k });
            continue;
        }
        if idx > 0 && entries[idx - 1].0 == i && entries[idx - 1].1 == k {
            out.push(Violation::TransferDuplicate { from: i, to: k });
        }
        if n > 0 && flights[i].t_in >= flights[k].t_out {
            out.push(Violation::TransferTiming { from: i, to: k });
        }
        outgoing[i] += n as u64;
        incoming[k] += n as u64;
    }
    for (i, f) in flights.iter().enumerate() {
        let expected_in = f.n_d as u64 + outgoing[i];
        if f.n_in as u64 != expected_in {
            out.push(Violation::ArrivalBalance {
                flight: i,
                n_in: f.n_in as u64,
                expected: expected_in,
            });
        }
        let expected_out = f.n_o as u64 + incoming[i];
        if f.n_out as u64 != expected_out {
            out.push(Violation::DepartureBalance {
                flight: i,
                n_out: f.n_out as u64,
                expected: expected_out,
            });
        }
    }
    out
}

fn validate_params(p: &GlobalParams, out: &mut Vec<Violation>) {
    let positive = [("v_m", p.v_m), ("v_taxi", p.v_taxi)];
    for (name, value) in positive {
        if !(value > 0.0 && value.is_finite()) {
            out.push(Violation::Param { name, value, requirement: "> 0" });
        }
    }
    let nonneg = [
        ("t_pb", p.t_pb),
        ("t_buff", p.t_buff),
        ("t_dly", p.t_dly),
        ("conflict_fit.a", p.conflict_fit.a),
    ];
    for (name, value) in nonneg {
        if !(value >= 0.0 && value.is_finite()) {
            out.push(Violation::Param { name, value, requirement: ">= 0" });
        }
    }
    let b = p.conflict_fit.b;
    if !(b > 0.0 && b <= 1.0) {
        out.push(Violation::Param {
            name: "conflict_fit.b",
            value: b,
            requirement: "in (0, 1]",
        });
    }
}

/// Passenger totals used as per-passenger denominators in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PassengerTotals {
    /// O&D passengers plus transfer passengers: everyone who walks.
    pub transit: u64,
    /// Arrival plus departure passengers: each taxi leg counted once.
    pub movement: u64,
    /// Arrival passengers only.
    pub arrival: u64,
}

pub fn total_passengers(inst: &Instance) -> PassengerTotals {
    let mut t = PassengerTotals {
        transit: inst.transfers().total(),
        ..Default::default()
    };
    for f in inst.flights() {
        t.transit += f.n_o as u64 + f.n_d as u64;
        t.movement += f.n_in as u64 + f.n_out as u64;
        t.arrival += f.n_in as u64;
    }
    t
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Two turns, two gates: the worked transit example.
    pub(crate) fn two_flight_instance() -> Instance {
        let gates = vec![
            Gate { id: 0, d_s: 100.0, d_b: 50.0, r: 100.0 },
            Gate { id: 1, d_s: 200.0, d_b: 150.0, r: 200.0 },
        ];
        let dist = vec![vec![0.0, 300.0], vec![300.0, 0.0]];
        let flights = vec![
            Flight { id: 0, t_in: 480.0, t_out: 540.0, n_o: 10, n_d: 5, n_in: 25, n_out: 10 },
            Flight { id: 1, t_in: 600.0, t_out: 660.0, n_o: 0, n_d: 0, n_in: 0, n_out: 20 },
        ];
        let params = GlobalParams {
            v_m: 50.0,
            ..GlobalParams::default()
        };
        Instance::new(gates, dist, flights, TransferMatrix::new(vec![(0, 1, 20)]), params)
    }

    #[test]
    fn well_formed_instance_is_ok() {
        assert_eq!(validate_instance(&two_flight_instance()), vec![]);
    }

    #[test]
    fn zero_length_turn_is_reported() {
        let inst = two_flight_instance();
        let mut flights = inst.flights().to_vec();
        flights[1].t_out = flights[1].t_in;
        let bad = Instance::new(
            inst.gates().to_vec(),
            inst.gate_dist().to_vec(),
            flights,
            inst.transfers().clone(),
            *inst.params(),
        );
        let v = validate_instance(&bad);
        assert!(v.iter().any(|x| matches!(x, Violation::TurnOrder { flight: 1, .. })));
        assert!(v.iter().any(|x| x.to_string().contains("t_out > t_in")));
    }

    #[test]
    fn transfer_balance_mismatch_names_flight() {
        let inst = two_flight_instance();
        let mut flights = inst.flights().to_vec();
        // row sum of transfers out of flight 0 is 20, so n_in must be 5 + 20
        let row_sum: u32 = inst
            .transfers()
            .entries()
            .iter()
            .filter(|e| e.0 == 0)
            .map(|e| e.2)
            .sum();
        assert_eq!(row_sum, 20);
        flights[0].n_in = flights[0].n_d + row_sum + 1;
        let bad = Instance::new(
            inst.gates().to_vec(),
            inst.gate_dist().to_vec(),
            flights,
            inst.transfers().clone(),
            *inst.params(),
        );
        let v = validate_instance(&bad);
        assert_eq!(
            v,
            vec![Violation::ArrivalBalance { flight: 0, n_in: 26, expected: 25 }]
        );
    }

    #[test]
    fn gate_matrix_and_params_checked() {
        let inst = two_flight_instance();
        let dist = vec![vec![0.0, 300.0], vec![299.0, 0.0]];
        let gates = vec![
            Gate { id: 0, d_s: -1.0, d_b: 50.0, r: 100.0 },
            inst.gates()[1],
        ];
        let params = GlobalParams {
            v_m: 0.0,
            conflict_fit: ConflictFit { a: 1.0, b: 1.5 },
            ..*inst.params()
        };
        let bad = Instance::new(gates, dist, inst.flights().to_vec(), inst.transfers().clone(), params);
        let v = validate_instance(&bad);
        assert!(v.contains(&Violation::GateDistance { gate: 0, field: "d_s", value: -1.0 }));
        assert!(v.iter().any(|x| matches!(x, Violation::GateDistEntry { j: 0, l: 1, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::Param { name: "v_m", .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::Param { name: "conflict_fit.b", .. })));
    }

    #[test]
    fn unsorted_and_late_transfer_rejected() {
        let inst = two_flight_instance();
        let mut flights = inst.flights().to_vec();
        flights.swap(0, 1);
        flights[0].id = 0;
        flights[1].id = 1;
        let bad = Instance::new(
            inst.gates().to_vec(),
            inst.gate_dist().to_vec(),
            flights,
            TransferMatrix::new(vec![(0, 1, 20), (0, 1, 0)]),
            *inst.params(),
        );
        let v = validate_instance(&bad);
        assert!(v.contains(&Violation::Unsorted { flight: 1 }));
        assert!(v.contains(&Violation::TransferDuplicate { from: 0, to: 1 }));
    }

    #[test]
    fn passenger_totals() {
        let empty = Instance::new(vec![], vec![], vec![], TransferMatrix::default(), GlobalParams::default());
        assert_eq!(total_passengers(&empty), PassengerTotals::default());

        let one = Instance::new(
            vec![Gate { id: 0, d_s: 0.0, d_b: 0.0, r: 0.0 }],
            vec![vec![0.0]],
            vec![Flight { id: 0, t_in: 0.0, t_out: 60.0, n_o: 10, n_d: 5, n_in: 5, n_out: 10 }],
            TransferMatrix::default(),
            GlobalParams::default(),
        );
        let t = total_passengers(&one);
        assert_eq!((t.transit, t.movement), (15, 15));

        // 10 + 5 (O&D of A) + 0 (B) + 20 transfers counted once
        let t = total_passengers(&two_flight_instance());
        assert_eq!(t.transit, 35);
        assert_eq!(t.movement, 25 + 10 + 20);
        assert_eq!(t.arrival, 25);
    }

    #[test]
    fn scenario_presets() {
        let s5 = ScenarioWeights::scenario(5).unwrap();
        assert_eq!((s5.w_pax, s5.w_taxi, s5.w_robust), (0.4, 0.4, 0.2));
        let s4 = ScenarioWeights::scenario(4).unwrap();
        assert_eq!((s4.w_pax, s4.w_taxi, s4.w_robust), (0.5, 0.5, 0.0));
        assert!(ScenarioWeights::scenario(0).is_none());
        assert!(ScenarioWeights::scenario(6).is_none());
        assert!(ScenarioWeights::new(0.0, 0.0, 0.0).is_err());
        assert!(ScenarioWeights::new(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn assignment_totality() {
        let inst = two_flight_instance();
        assert!(Assignment::new(vec![0, 1]).is_total_for(&inst));
        assert!(!Assignment::new(vec![0, 2]).is_total_for(&inst));
        assert!(!Assignment::new(vec![0]).is_total_for(&inst));
    }
}
