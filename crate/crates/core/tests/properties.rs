// Copyright 2026 The trapmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Invariants over generated programs, fabrics and reservations.

mod common;

use common::*;
use proptest::prelude::*;
use trapmap::fabric::{Fabric, GraphPath, RoutingGraph};
use trapmap::par::Exec;
use trapmap::placer::{center_placement, monte_carlo_place, mvfb_place, Direction, Problem};
use trapmap::qasm::{build_qidg, ideal_latency, invert_to_uidg, parse_qasm, Qidg};
use trapmap::sim::{validate_trace, Trace};

const GATES: [&str; 7] = ["H", "X", "Y", "Z", "C-X", "C-Y", "C-Z"];

fn program_text(n: usize, body: &[(usize, usize, usize)]) -> String {
    let mut s: String = (0..n).map(|q| format!("QUBIT q{q},0\n")).collect();
    for &(g, a, b) in body {
        let a = a % n;
        if g < 4 {
            s.push_str(&format!("{} q{a}\n", GATES[g]));
        } else {
            let b = (a + 1 + b % (n - 1)) % n;
            s.push_str(&format!("{} q{a},q{b}\n", GATES[g]));
        }
    }
    s
}

fn qidg() -> impl Strategy<Value = Qidg> {
    (2usize..=10)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0usize..7, 0usize..64, 0usize..64), 1..=30),
            )
        })
        .prop_map(|(n, body)| build_qidg(&parse_qasm(&program_text(n, &body)).unwrap()))
}

fn problem(g: Qidg) -> Problem {
    Problem::new(g, street_fabric(2, 4), default_tech()).unwrap()
}

fn forward(p: &Problem) -> Trace {
    let p0 = center_placement(&p.fabric, p.num_qubits()).unwrap();
    p.simulate(Direction::Forward, &p0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn simulated_traces_validate(g in qidg()) {
        let p = problem(g);
        for dir in [Direction::Forward, Direction::Backward] {
            let p0 = center_placement(&p.fabric, p.num_qubits()).unwrap();
            let trace = p.simulate(dir, &p0).unwrap();
            let report = validate_trace(&trace, p.graph(dir), &p.fabric, &p.tech);
            prop_assert!(report.is_valid(), "{}", report.to_text());
            prop_assert_eq!(report.total_latency_us, trace.total_latency);
        }
    }

    #[test]
    fn latency_never_beats_baseline(g in qidg()) {
        let baseline = ideal_latency(&g, &default_tech());
        let p = problem(g);
        prop_assert!(forward(&p).total_latency >= baseline);
    }

    #[test]
    fn reversed_trace_is_a_valid_backward_run(g in qidg()) {
        let p = problem(g);
        let trace = forward(&p);
        let back = trace.time_reversed(&p.tech);
        let report = validate_trace(&back, &p.uidg, &p.fabric, &p.tech);
        prop_assert!(report.is_valid(), "{}", report.to_text());
        let again = back.time_reversed(&p.tech);
        // Commands sharing a timestamp may come back in another order.
        let canonical = |t: &Trace| {
            let mut v: Vec<String> = t.commands.iter().map(|c| format!("{:08} {:?}", c.time, c.kind)).collect();
            v.sort();
            v
        };
        prop_assert_eq!(canonical(&again), canonical(&trace));
        prop_assert_eq!(again.initial_placement, trace.initial_placement.clone());
    }

    #[test]
    fn trace_text_round_trips(g in qidg()) {
        let p = problem(g);
        let trace = forward(&p);
        let parsed = Trace::parse(&trace.to_text(), &trace.qubits, &p.tech).unwrap();
        prop_assert_eq!(&parsed.commands, &trace.commands);
        prop_assert_eq!(parsed.total_latency, trace.total_latency);
        let report = validate_trace(&parsed, &p.qidg, &p.fabric, &p.tech);
        prop_assert!(report.is_valid(), "{}", report.to_text());
    }

    #[test]
    fn uidg_is_an_involution(g in qidg()) {
        let u = invert_to_uidg(&g).unwrap();
        prop_assert_eq!(invert_to_uidg(&u).unwrap(), g.clone());
        prop_assert_eq!(ideal_latency(&u, &default_tech()), ideal_latency(&g, &default_tech()));
    }

    #[test]
    fn more_seeds_never_hurt(g in qidg(), m in 1usize..6, extra in 1usize..6, seed in 0u64..1000) {
        let p = problem(g);
        let few = mvfb_place(&p, m, 2, seed, Exec::Sequential).unwrap();
        let many = mvfb_place(&p, m + extra, 2, seed, Exec::Sequential).unwrap();
        prop_assert!(many.latency() <= few.latency());
        prop_assert_eq!(&many.runs[..few.runs.len()], &few.runs[..]);
    }

    #[test]
    fn execution_modes_agree(g in qidg(), seed in 0u64..1000) {
        let p = problem(g);
        let a = mvfb_place(&p, 4, 2, seed, Exec::Sequential).unwrap();
        let b = mvfb_place(&p, 4, 2, seed, Exec::Parallel).unwrap();
        prop_assert_eq!(&a.runs, &b.runs);
        prop_assert_eq!(a.trace.to_text(), b.trace.to_text());
        let c = monte_carlo_place(&p, 6, seed, Exec::Sequential).unwrap();
        let d = monte_carlo_place(&p, 6, seed, Exec::Parallel).unwrap();
        prop_assert_eq!(c.trace.to_text(), d.trace.to_text());
    }

    #[test]
    fn reported_trace_matches_reported_placement(g in qidg(), seed in 0u64..1000) {
        let p = problem(g);
        let out = mvfb_place(&p, 3, 2, seed, Exec::Sequential).unwrap();
        prop_assert_eq!(&out.trace.initial_placement, &out.placement);
        prop_assert_eq!(out.trace.total_latency, out.best.latency_us);
        let report = validate_trace(&out.trace, &p.qidg, &p.fabric, &p.tech);
        prop_assert!(report.is_valid(), "{}", report.to_text());
    }

    #[test]
    fn fabric_render_round_trips(streets in 1usize..5, blocks in 1usize..6) {
        let f = street_fabric(streets, blocks);
        let again = Fabric::parse(&f.render()).unwrap();
        prop_assert_eq!(again.render(), f.render());
    }

    #[test]
    fn reserve_release_restores_loads(picks in prop::collection::vec(0usize..1000, 1..12)) {
        let fabric = street_fabric(2, 3);
        let tech = default_tech();
        let mut g = RoutingGraph::build(&fabric, &tech);
        let channels: Vec<usize> = (0..fabric.runs().len()).filter_map(|r| g.run_edge(r)).collect();
        let mut tokens = Vec::new();
        for pick in picks {
            let e = channels[pick % channels.len()];
            let start = g.edge(e).a;
            if let Ok(t) = g.reserve_path(&GraphPath { start, edges: vec![e] }) {
                tokens.push(t);
            }
            prop_assert!(g.audit().is_ok());
            for r in 0..fabric.runs().len() {
                prop_assert!(g.channel_load(r) <= tech.channel_capacity);
            }
        }
        for t in tokens {
            g.release_all(t);
        }
        prop_assert!(g.audit().is_ok());
        prop_assert_eq!(g.active_reservations(), 0);
        prop_assert!((0..fabric.runs().len()).all(|r| g.channel_load(r) == 0));
        prop_assert!((0..fabric.junctions().len()).all(|j| g.junction_load(j) == 0));
    }
}
