//! Buffer-time separation between turns that share a gate.
//!
//! Two turns may share a gate iff
//! `(t_out(i) - t_in(k) + t_buff) * (t_out(k) - t_in(i) + t_buff) <= 0`,
//! i.e. one of them leaves at least `t_buff` minutes before the other
//! arrives. The disjunction is evaluated directly; separation exactly equal to
//! `t_buff` is allowed.

use crate::model::{Assignment, Flight, FlightId, GateId, Instance};

pub fn is_pair_compatible(fi: &Flight, fk: &Flight, t_buff: f64) -> bool {
    let i_then_k = fi.t_out - fk.t_in + t_buff;
    let k_then_i = fk.t_out - fi.t_in + t_buff;
    i_then_k <= 0.0 || k_then_i <= 0.0
}

/// Flights of each gate, in flight order.
pub(crate) fn gate_members(inst: &Instance, asg: &Assignment) -> Vec<Vec<FlightId>> {
    let mut members = vec![Vec::new(); inst.n_gates()];
    for (i, &g) in asg.as_slice().iter().enumerate() {
        members[g].push(i);
    }
    members
}

/// Checks the buffer constraint on every gate.
///
/// Flights are sorted by arrival, so checking consecutive occupants of each
/// gate is sufficient.
pub fn is_feasible(inst: &Instance, asg: &Assignment) -> bool {
    if !asg.is_total_for(inst) {
        return false;
    }
    let flights = inst.flights();
    let t_buff = inst.params().t_buff;
    let mut last: Vec<Option<FlightId>> = vec![None; inst.n_gates()];
    for (i, &g) in asg.as_slice().iter().enumerate() {
        if let Some(p) = last[g] {
            if !is_pair_compatible(&flights[p], &flights[i], t_buff) {
                return false;
            }
        }
        last[g] = Some(i);
    }
    true
}

/// Every incompatible co-gated pair `(i, k, gate)` with `i < k`.
pub fn gate_violation_pairs(inst: &Instance, asg: &Assignment) -> Vec<(FlightId, FlightId, GateId)> {
    let flights = inst.flights();
    let t_buff = inst.params().t_buff;
    let mut out = Vec::new();
    for (g, members) in gate_members(inst, asg).iter().enumerate() {
        for (a, &i) in members.iter().enumerate() {
            for &k in &members[a + 1..] {
                if !is_pair_compatible(&flights[i], &flights[k], t_buff) {
                    out.push((i, k, g));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Whether `flight` may join the flights in `members` without breaking the
/// buffer constraint. `flight` itself is skipped if present.
pub(crate) fn fits_with(inst: &Instance, flight: FlightId, members: &[FlightId]) -> bool {
    let flights = inst.flights();
    let t_buff = inst.params().t_buff;
    let f = &flights[flight];
    members
        .iter()
        .all(|&k| k == flight || is_pair_compatible(f, &flights[k], t_buff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Gate, GlobalParams, TransferMatrix};
    use proptest::prelude::*;

    fn turn(id: usize, t_in: f64, t_out: f64) -> Flight {
        Flight { id, t_in, t_out, n_o: 0, n_d: 0, n_in: 0, n_out: 0 }
    }

    fn instance(turns: &[(f64, f64)], n_gates: usize) -> Instance {
        let gates = (0..n_gates).map(|id| Gate { id, d_s: 0.0, d_b: 0.0, r: 0.0 }).collect();
        let dist = vec![vec![0.0; n_gates]; n_gates];
        let flights = turns.iter().enumerate().map(|(i, &(a, b))| turn(i, a, b)).collect();
        Instance::new(gates, dist, flights, TransferMatrix::default(), GlobalParams::default())
    }

    #[test]
    fn boundary_separation_is_compatible() {
        assert!(is_pair_compatible(&turn(0, 500.0, 600.0), &turn(1, 615.0, 700.0), 15.0));
        assert!(!is_pair_compatible(&turn(0, 500.0, 600.0), &turn(1, 610.0, 700.0), 15.0));
    }

    #[test]
    fn single_and_overlapping() {
        let one = instance(&[(0.0, 10.0)], 2);
        assert!(is_feasible(&one, &Assignment::new(vec![1])));

        let two = instance(&[(0.0, 60.0), (30.0, 90.0)], 2);
        assert!(!is_feasible(&two, &Assignment::new(vec![0, 0])));
        assert!(is_feasible(&two, &Assignment::new(vec![0, 1])));
        assert_eq!(gate_violation_pairs(&two, &Assignment::new(vec![0, 0])), vec![(0, 1, 0)]);
        assert!(gate_violation_pairs(&two, &Assignment::new(vec![0, 1])).is_empty());
    }

    #[test]
    fn three_way_overlap_lists_three_pairs() {
        let inst = instance(&[(0.0, 60.0), (10.0, 70.0), (20.0, 80.0)], 1);
        let pairs = gate_violation_pairs(&inst, &Assignment::new(vec![0, 0, 0]));
        assert_eq!(pairs, vec![(0, 1, 0), (0, 2, 0), (1, 2, 0)]);
    }

    #[test]
    fn long_turn_spanning_later_ones_is_caught() {
        // 0 covers both 1 and 2, which are themselves compatible
        let inst = instance(&[(0.0, 500.0), (100.0, 150.0), (200.0, 250.0)], 1);
        let asg = Assignment::new(vec![0, 0, 0]);
        assert!(!is_feasible(&inst, &asg));
        assert_eq!(gate_violation_pairs(&inst, &asg).len(), 2);
    }

    fn arb_turn() -> impl Strategy<Value = (f64, f64)> {
        (0.0..1440.0f64, 1.0..240.0f64).prop_map(|(a, d)| (a, a + d))
    }

    proptest! {
        #[test]
        fn symmetric_and_monotone_in_buffer(
            a in arb_turn(), b in arb_turn(), buff in 0.0..60.0f64, shrink in 0.0..1.0f64
        ) {
            let (fi, fk) = (turn(0, a.0, a.1), turn(1, b.0, b.1));
            prop_assert_eq!(is_pair_compatible(&fi, &fk, buff), is_pair_compatible(&fk, &fi, buff));
            if is_pair_compatible(&fi, &fk, buff) {
                prop_assert!(is_pair_compatible(&fi, &fk, buff * shrink));
            }
        }

        #[test]
        fn feasibility_matches_all_pairs_scan(
            mut turns in prop::collection::vec(arb_turn(), 1..9),
            gates in prop::collection::vec(0usize..3, 9),
        ) {
            turns.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let inst = instance(&turns, 3);
            let asg = Assignment::new(gates[..turns.len()].to_vec());
            // oracle: every ordered pair of distinct flights, ignoring gate grouping
            let fl = inst.flights();
            let mut ok = true;
            for i in 0..fl.len() {
                for k in 0..fl.len() {
                    if i != k && asg.gate(i) == asg.gate(k) {
                        let buff = inst.params().t_buff;
                        let p = (fl[i].t_out - fl[k].t_in + buff) * (fl[k].t_out - fl[i].t_in + buff);
                        ok &= p <= 0.0;
                    }
                }
            }
            prop_assert_eq!(is_feasible(&inst, &asg), ok);
            prop_assert_eq!(gate_violation_pairs(&inst, &asg).is_empty(), ok);
        }
    }
}
