//! Seeded synthetic hub schedules.
//!
//! Gates sit at evenly spaced positions along one linear concourse; the same
//! position drives walking distances (checkpoint, baggage claim, other gates)
//! and the ramp taxi distance from the spot. Arrivals come in Gaussian banks,
//! every flight is full, and connecting passengers flow from one bank into
//! the next.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_instance, Flight, Gate, GlobalParams, Instance, TransferMatrix};

/// Minimum connection time between an arrival and a departing flight, minutes.
pub const MIN_CONNECT: f64 = 30.0;

const MAX_TRIES_PER_FLIGHT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n_flights: usize,
    pub n_gates: usize,
    pub n_banks: usize,
    /// Start of the operating day, minutes since midnight.
    pub day_start: f64,
    pub day_span: f64,
    /// Gate occupancy range `(min, max)`, minutes.
    pub turn_time: (f64, f64),
    /// Share of each arrival's passengers who connect.
    pub transfer_fraction: f64,
    /// Seat range `(min, max)`; every flight is full.
    pub seats: (u32, u32),
    pub concourse_length: f64,
    pub checkpoint_position: f64,
    pub bagclaim_position: f64,
    /// Ramp distance from the spot to the concourse's first gate end.
    pub spot_offset: f64,
    pub rng_seed: u64,
    pub params: GlobalParams,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n_flights: 60,
            n_gates: 12,
            n_banks: 3,
            day_start: 360.0,
            day_span: 1080.0,
            turn_time: (30.0, 75.0),
            transfer_fraction: 0.3,
            seats: (100, 200),
            concourse_length: 1500.0,
            checkpoint_position: 750.0,
            bagclaim_position: 750.0,
            spot_offset: 100.0,
            rng_seed: 0,
            params: GlobalParams::default(),
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.n_flights == 0 {
            bad.push("n_flights must be >= 1");
        }
        if self.n_gates == 0 {
            bad.push("n_gates must be >= 1");
        }
        if self.n_banks == 0 {
            bad.push("n_banks must be >= 1");
        }
        if !(self.day_span > 0.0 && self.day_span.is_finite() && self.day_start.is_finite()) {
            bad.push("day_span must be > 0");
        }
        if !(self.turn_time.0 > 0.0 && self.turn_time.0 <= self.turn_time.1 && self.turn_time.1.is_finite()) {
            bad.push("turn_time must satisfy 0 < min <= max");
        }
        if !(0.0..=1.0).contains(&self.transfer_fraction) {
            bad.push("transfer_fraction must be in [0, 1]");
        }
        if self.seats.0 > self.seats.1 {
            bad.push("seats must satisfy min <= max");
        }
        let lengths = [
            self.concourse_length,
            self.checkpoint_position,
            self.bagclaim_position,
            self.spot_offset,
        ];
        if lengths.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            bad.push("concourse geometry must be finite and >= 0");
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(bad.join("; ")))
        }
    }
}

struct Turn {
    t_in: f64,
    t_out: f64,
    bank: usize,
    seats: u32,
}

/// Largest number of buffer-extended occupancies `[t_in, t_out + buff)`
/// alive at once if `cand` joins `turns`.
fn peak_with(turns: &[Turn], cand: (f64, f64), buff: f64) -> usize {
    let span = (cand.0, cand.1 + buff);
    let mut events: Vec<(f64, i32)> = vec![(span.0, 1), (span.1, -1)];
    for t in turns {
        let iv = (t.t_in, t.t_out + buff);
        if iv.0 < span.1 && span.0 < iv.1 {
            events.push((iv.0, 1));
            events.push((iv.1, -1));
        }
    }
    // ends sort before starts at the same instant (half-open intervals)
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (mut live, mut peak) = (0i32, 0i32);
    for (_, d) in events {
        live += d;
        peak = peak.max(live);
    }
    peak as usize
}

fn gates_along_concourse(p: &GenParams) -> (Vec<Gate>, Vec<Vec<f64>>) {
    let step = p.concourse_length / p.n_gates as f64;
    let pos: Vec<f64> = (0..p.n_gates).map(|j| (j as f64 + 0.5) * step).collect();
    let gates = pos
        .iter()
        .enumerate()
        .map(|(id, &x)| Gate {
            id,
            d_s: (x - p.checkpoint_position).abs(),
            d_b: (x - p.bagclaim_position).abs(),
            r: p.spot_offset + x,
        })
        .collect();
    let dist = pos
        .iter()
        .map(|&a| pos.iter().map(|&b| (a - b).abs()).collect())
        .collect();
    (gates, dist)
}

/// Generates an instance; the same parameters always give the same instance.
///
/// Arrival times are rejection-sampled so that the schedule never needs more
/// than `n_gates` gates at once, which keeps every generated instance
/// solvable.
pub fn generate(p: &GenParams) -> Result<Instance> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.rng_seed);
    let (gates, dist) = gates_along_concourse(p);

    let bank_width = p.day_span / p.n_banks as f64;
    let sigma = bank_width / 6.0;
    let buff = p.params.t_buff;
    let mut turns: Vec<Turn> = Vec::with_capacity(p.n_flights);
    for f in 0..p.n_flights {
        let bank = f % p.n_banks;
        let center = p.day_start + (bank as f64 + 0.5) * bank_width;
        let normal = Normal::new(center, sigma).expect("positive spread");
        let mut placed = false;
        for _ in 0..MAX_TRIES_PER_FLIGHT {
            let t_in = normal
                .sample(&mut rng)
                .clamp(p.day_start, p.day_start + p.day_span)
                .round();
            let turn = rng.random_range(p.turn_time.0..=p.turn_time.1).round().max(1.0);
            let t_out = t_in + turn;
            if peak_with(&turns, (t_in, t_out), buff) <= p.n_gates {
                let seats = rng.random_range(p.seats.0..=p.seats.1);
                turns.push(Turn { t_in, t_out, bank, seats });
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::InvalidParams(format!(
                "cannot fit {} flights into {} gates with these banks and turn times",
                p.n_flights, p.n_gates
            )));
        }
    }
    turns.sort_by(|a, b| a.t_in.total_cmp(&b.t_in).then(a.t_out.total_cmp(&b.t_out)));

    let transfers = draw_transfers(&turns, p.transfer_fraction, &mut rng)?;

    let nf = turns.len();
    let mut outgoing = vec![0u32; nf];
    let mut incoming = vec![0u32; nf];
    for &(i, k, n) in &transfers {
        outgoing[i] += n;
        incoming[k] += n;
    }
    let flights = turns
        .iter()
        .enumerate()
        .map(|(id, t)| Flight {
            id,
            t_in: t.t_in,
            t_out: t.t_out,
            n_o: t.seats - incoming[id],
            n_d: t.seats - outgoing[id],
            n_in: t.seats,
            n_out: t.seats,
        })
        .collect();

    let inst = Instance::new(gates, dist, flights, TransferMatrix::new(transfers), p.params);
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(inst)
}

/// Spends each arrival's connecting budget on departures in the next bank that leave at least [`MIN_CONNECT`] minutes after it lands,
/// within their seat capacity. Budget that finds no seat stays with
/// destination passengers.
fn draw_transfers(turns: &[Turn], fraction: f64, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize, u32)>> {
    let nf = turns.len();
    let mut capacity: Vec<u32> = turns.iter().map(|t| t.seats).collect();
    let mut counts = std::collections::BTreeMap::<(usize, usize), u32>::new();
    let mut any_pair = false;
    let mut wanted = 0u64;

    for i in 0..nf {
        let budget = (fraction * turns[i].seats as f64).round() as u32;
        wanted += budget as u64;
        let partners: Vec<usize> = (0..nf)
            .filter(|&k| {
                k != i
                    && turns[k].bank == turns[i].bank + 1
                    && turns[i].t_in + MIN_CONNECT <= turns[k].t_out
            })
            .collect();
        any_pair |= !partners.is_empty();
        let max_chunk = budget.div_ceil(3).max(1);
        let mut left = budget;
        while left > 0 {
            let open: Vec<usize> = partners.iter().copied().filter(|&k| capacity[k] > 0).collect();
            let Some(&k) = open.choose(rng) else { break };
            let hi = left.min(capacity[k]).min(max_chunk);
            let n = rng.random_range(1..=hi);
            *counts.entry((i, k)).or_default() += n;
            capacity[k] -= n;
            left -= n;
        }
    }

    if wanted > 0 && !any_pair {
        return Err(Error::InvalidParams(
            "transfer_fraction > 0 but no flight pair allows a connection".into(),
        ));
    }
    Ok(counts.into_iter().map(|((i, k), n)| (i, k, n)).collect())
}
