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

//! Acceptance run: one PASS/FAIL line per criterion, then a non-zero exit
//! status if any criterion failed.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use trapmap::compare::compare;
use trapmap::fabric::{
    channel_weight, EdgeKind, Fabric, GraphPath, RoutingGraph, VertexId, VertexKind,
};
use trapmap::par::Exec;
use trapmap::placer::{
    center_place, center_placement, monte_carlo_place, mvfb_place, Direction, Problem,
};
use trapmap::qasm::{ideal_latency, invert_to_uidg, Qidg};
use trapmap::router::{find_path, turn_count};
use trapmap::sim::{validate_trace, CommandKind, Trace, Violation};
use trapmap::tech::TechParams;
use trapmap::Micros;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- 1

/// Every simple path between two vertices that does not pass through a
/// trap, as (channel cost, turn count, edges).
fn all_simple_paths(
    g: &RoutingGraph,
    from: VertexId,
    to: VertexId,
    tech: &TechParams,
) -> Vec<(u64, usize, Vec<usize>)> {
    fn walk(
        g: &RoutingGraph,
        v: VertexId,
        to: VertexId,
        tech: &TechParams,
        seen: &mut Vec<bool>,
        edges: &mut Vec<usize>,
        out: &mut Vec<(u64, usize, Vec<usize>)>,
    ) {
        if v == to {
            let mut cost = 0;
            let mut turns = 0;
            for &e in edges.iter() {
                match g.edge(e).kind {
                    EdgeKind::Turn(_) => turns += 1,
                    _ => cost += g.search_cost(e, tech).unwrap(),
                }
            }
            out.push((cost, turns, edges.clone()));
            return;
        }
        if !edges.is_empty() && matches!(g.vertex(v), VertexKind::Trap(_)) {
            return;
        }
        for &(e, w) in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                edges.push(e);
                walk(g, w, to, tech, seen, edges, out);
                edges.pop();
                seen[w] = false;
            }
        }
    }
    let mut seen = vec![false; g.vertex_count()];
    seen[from] = true;
    let mut out = Vec::new();
    walk(g, from, to, tech, &mut seen, &mut Vec::new(), &mut out);
    out
}

fn criterion_1() -> Verdict {
    let fabric = Fabric::parse(&read_asset("fabrics/turn_tile.fab")).unwrap();
    let tech = default_tech();
    let g = RoutingGraph::build(&fabric, &tech);
    let corner = |row, col| {
        g.trap_vertex(
            fabric
                .trap_index(trapmap::fabric::Coord::new(row, col))
                .unwrap(),
        )
    };
    let (from, to) = (corner(fabric.rows() - 1, 0), corner(0, fabric.cols() - 1));
    let paths = all_simple_paths(&g, from, to, &tech);
    let priced = |turn_w: u64| -> (u64, u64) {
        let one = paths
            .iter()
            .filter(|p| p.1 == 1)
            .map(|p| p.0 + turn_w)
            .min()
            .unwrap();
        let multi = paths
            .iter()
            .filter(|p| p.1 > 1)
            .map(|p| p.0 + p.1 as u64 * turn_w)
            .min()
            .unwrap();
        (one, multi)
    };
    let (path, cost) = find_path(&g, from, to, &tech).unwrap();
    let turns = turn_count(&g, &path);
    let (one, multi) = priced(tech.t_turn);
    let chosen_ok = turns == 1 && cost == one && cost < multi;

    // Same fabric with a turn priced like a move.
    let mut equal = tech.clone();
    equal.t_turn = equal.t_move;
    let (one_eq, multi_eq) = priced(equal.t_turn);
    let literal_tie = one_eq == multi_eq;
    // Turn-blind model: turn edges carry no weight.
    let (one_blind, multi_blind) = priced(0);
    let blind_tie = one_blind == multi_blind;

    verdict(
        chosen_ok && literal_tie,
        format!(
            "{} simple paths; find_path: {turns} turn(s), cost {cost}; best multi-turn {multi}. \
             t_turn=t_move: one-turn {one_eq} vs multi-turn {multi_eq} (tie: {literal_tie}); \
             turn-blind: {one_blind} vs {multi_blind} (tie: {blind_tie})",
            paths.len()
        ),
    )
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Verdict {
    let tech = default_tech();
    let mut checked = 0;
    let mut bad = Vec::new();
    for length in 1..=10usize {
        let fabric = Fabric::parse(&format!("J{}J", "C".repeat(length))).unwrap();
        let mut g = RoutingGraph::build(&fabric, &tech);
        let e = g.run_edge(0).unwrap();
        let path = GraphPath {
            start: 0,
            edges: vec![e],
        };
        for n in 0..=2u32 {
            let expected = if n < 2 {
                (n as f64 + 1.0) * length as f64
            } else {
                f64::INFINITY
            };
            let got = g.edge_weight(e, &tech);
            let direct = channel_weight(n, length, tech.channel_capacity);
            if got != expected || direct != expected {
                bad.push(format!(
                    "len {length} n {n}: {got} / {direct} != {expected}"
                ));
            }
            checked += 1;
            if n < 2 {
                g.reserve_path(&path).unwrap();
            }
        }
    }
    verdict(
        bad.is_empty() && checked == 30,
        if bad.is_empty() {
            format!("{checked} (length, n) cases exact")
        } else {
            bad.join("; ")
        },
    )
}

// ---------------------------------------------------------------- 3

/// Move and turn time each operand spent since its previous gate, taken
/// as the max over the operands at every gate start.
fn routing_from_trace(trace: &Trace, tech: &TechParams) -> BTreeMap<usize, Micros> {
    let mut pending = vec![0; trace.qubits.len()];
    let mut out = BTreeMap::new();
    for cmd in &trace.commands {
        match &cmd.kind {
            CommandKind::Move { qubit, .. } => pending[*qubit] += tech.t_move,
            CommandKind::Turn { qubit, .. } => pending[*qubit] += tech.t_turn,
            CommandKind::GateStart {
                instruction,
                operands,
                ..
            } => {
                let r = operands.iter().map(|&q| pending[q]).max().unwrap_or(0);
                for &q in operands {
                    pending[q] = 0;
                }
                out.insert(*instruction, r);
            }
            CommandKind::GateEnd { .. } => {}
        }
    }
    out
}

fn audit_decomposition(trace: &Trace, g: &Qidg, problem: &Problem) -> Result<usize, String> {
    let report = validate_trace(trace, g, &problem.fabric, &problem.tech);
    if !report.is_valid() {
        return Err(report.to_text());
    }
    let routing = routing_from_trace(trace, &problem.tech);
    for d in &report.breakdown {
        let gate = g.instructions[d.id].gate.delay(&problem.tech);
        let expected_routing = routing[&d.id];
        if d.t_gate_us != gate
            || d.t_routing_us != expected_routing
            || d.span_us != d.t_gate_us + d.t_routing_us + d.t_congestion_us
        {
            return Err(format!(
                "instruction {}: {:?}, routing oracle {expected_routing}",
                d.id, d
            ));
        }
    }
    Ok(report.breakdown.len())
}

fn criterion_3() -> Verdict {
    let problem = Problem::new(
        benchmark_qidg("five_one_three"),
        big_fabric(),
        default_tech(),
    )
    .unwrap();
    let outcomes = [
        ("center", center_place(&problem).unwrap()),
        (
            "mc",
            monte_carlo_place(&problem, 50, 0, Exec::Parallel).unwrap(),
        ),
        (
            "mvfb",
            mvfb_place(&problem, 25, 3, 0, Exec::Parallel).unwrap(),
        ),
    ];
    let mut traces = 0;
    let mut instructions = 0;
    for (name, outcome) in &outcomes {
        let mut audit = |trace: &Trace, g: &Qidg| match audit_decomposition(trace, g, &problem) {
            Ok(n) => {
                traces += 1;
                instructions += n;
                Ok(())
            }
            Err(e) => Err(format!("{name}: {e}")),
        };
        if let Err(e) = audit(&outcome.trace, &problem.qidg) {
            return verdict(false, e);
        }
        for run in &outcome.runs {
            let trace = problem.simulate(run.direction, &run.initial).unwrap();
            if let Err(e) = audit(&trace, problem.graph(run.direction)) {
                return verdict(false, e);
            }
        }
    }
    verdict(
        true,
        format!("{traces} traces, {instructions} instruction spans exact"),
    )
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Verdict {
    let fabric = street_fabric(2, 4);
    let tech = default_tech();
    let mut capacity = 0;
    let mut dependency = 0;
    let mut other = 0;
    let mut failures = Vec::new();
    for (i, g) in random_programs(0x4341_5041, 100, 12, 40)
        .into_iter()
        .enumerate()
    {
        let problem = Problem::new(g, fabric.clone(), tech.clone()).unwrap();
        let p0 = center_placement(&problem.fabric, problem.num_qubits()).unwrap();
        let trace = match problem.simulate(Direction::Forward, &p0) {
            Ok(t) => t,
            Err(e) => {
                failures.push(format!("program {i}: {e}"));
                continue;
            }
        };
        for v in validate_trace(&trace, &problem.qidg, &problem.fabric, &problem.tech).violations {
            match v {
                Violation::Capacity { .. } => capacity += 1,
                Violation::Dependency { .. } => dependency += 1,
                _ => other += 1,
            }
        }
    }
    verdict(
        failures.is_empty() && capacity == 0 && dependency == 0,
        format!(
            "100 programs on a {}x{} fabric: {capacity} capacity, {dependency} dependency, {other} other violations{}",
            fabric.rows(),
            fabric.cols(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Verdict {
    let tech = default_tech().ideal();
    let mut cases: Vec<(String, Qidg, Fabric)> = BENCHMARKS
        .iter()
        .map(|b| (b.to_string(), benchmark_qidg(b), big_fabric()))
        .collect();
    for (i, g) in random_programs(0x4944_4541, 100, 12, 40)
        .into_iter()
        .enumerate()
    {
        cases.push((format!("random {i}"), g, street_fabric(2, 4)));
    }
    let mut mismatches = Vec::new();
    for (name, g, fabric) in cases {
        let ideal = ideal_latency(&g, &tech);
        let problem = Problem::new(g, fabric, tech.clone()).unwrap();
        let p0 = center_placement(&problem.fabric, problem.num_qubits()).unwrap();
        match problem.simulate(Direction::Forward, &p0) {
            Ok(t) if t.total_latency == ideal => {}
            Ok(t) => mismatches.push(format!("{name}: {} != {ideal}", t.total_latency)),
            Err(e) => mismatches.push(format!("{name}: {e}")),
        }
    }
    verdict(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!(
                "{} benchmarks and 100 random programs equal the ideal latency",
                BENCHMARKS.len()
            )
        } else {
            mismatches.join("; ")
        },
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Verdict {
    let tech = default_tech();
    let graphs = BENCHMARKS
        .iter()
        .map(|b| benchmark_qidg(b))
        .chain(random_programs(0x5245_5645, 100, 12, 40));
    let mut bad = Vec::new();
    let mut n = 0;
    for g in graphs {
        let forward = ideal_latency(&g, &tech);
        let backward = ideal_latency(&invert_to_uidg(&g).unwrap(), &tech);
        if forward != backward {
            bad.push(format!("{forward} != {backward}"));
        }
        n += 1;
    }
    verdict(
        bad.is_empty(),
        format!("{n} graphs, {} mismatches {}", bad.len(), bad.join("; ")),
    )
}

// ---------------------------------------------------------------- 7

const TABLE1_MVFB: f64 = 634.0;

fn criterion_7() -> Verdict {
    let problem = Problem::new(
        benchmark_qidg("five_one_three"),
        big_fabric(),
        default_tech(),
    )
    .unwrap();
    let summary = compare(&problem, 25, 3, 20, 0, Exec::Parallel).unwrap();
    let budget_ok = summary.trials.iter().all(|t| t.mc_runs == 2 * t.mvfb_runs);
    let win = summary.win_rate();
    let (mean_mvfb, mean_mc) = (summary.mean_mvfb(), summary.mean_mc());
    let mvfb25 = mvfb_place(&problem, 25, 3, 0, Exec::Parallel)
        .unwrap()
        .latency();
    let mvfb100 = mvfb_place(&problem, 100, 3, 0, Exec::Parallel)
        .unwrap()
        .latency();
    let (lo, hi) = (TABLE1_MVFB * 0.75, TABLE1_MVFB * 1.25);
    let within = |l: Micros| (lo..=hi).contains(&(l as f64));
    verdict(
        budget_ok && win >= 0.7 && mean_mvfb <= mean_mc && within(mvfb25) && within(mvfb100),
        format!(
            "{} trials: win rate {win:.2}, mean mvfb {mean_mvfb:.1} vs mc {mean_mc:.1}; \
             mvfb M=25 {mvfb25} us, M=100 {mvfb100} us vs {TABLE1_MVFB} (band {lo}..{hi}, {:+.1}%)",
            summary.trials.len(),
            (mvfb100 as f64 / TABLE1_MVFB - 1.0) * 100.0
        ),
    )
}

// ---------------------------------------------------------------- 8 and 10

struct SuiteRow {
    name: &'static str,
    instructions: usize,
    baseline: Micros,
    m25: Micros,
    m100: Micros,
}

fn suite() -> Vec<SuiteRow> {
    let tech = default_tech();
    BENCHMARKS
        .iter()
        .map(|&name| {
            let problem = Problem::new(benchmark_qidg(name), big_fabric(), tech.clone()).unwrap();
            SuiteRow {
                name,
                instructions: problem.qidg.len(),
                baseline: ideal_latency(&problem.qidg, &tech),
                m25: mvfb_place(&problem, 25, 3, 0, Exec::Parallel)
                    .unwrap()
                    .latency(),
                m100: mvfb_place(&problem, 100, 3, 0, Exec::Parallel)
                    .unwrap()
                    .latency(),
            }
        })
        .collect()
}

fn criterion_8(rows: &[SuiteRow]) -> Verdict {
    let detail: Vec<String> = rows
        .iter()
        .map(|r| format!("{} {}<={}", r.name, r.m100, r.m25))
        .collect();
    verdict(rows.iter().all(|r| r.m100 <= r.m25), detail.join(", "))
}

fn criterion_10(rows: &[SuiteRow]) -> Verdict {
    let mut ranked: Vec<&SuiteRow> = rows.iter().collect();
    ranked.sort_by_key(|r| (r.baseline, r.instructions));
    let above = rows.iter().all(|r| r.m100 > r.baseline);
    // Gap must grow whenever the baseline strictly grows.
    let mut monotone = true;
    for (i, a) in ranked.iter().enumerate() {
        for b in &ranked[i + 1..] {
            if b.baseline > a.baseline && b.m100 - b.baseline <= a.m100 - a.baseline {
                monotone = false;
            }
        }
    }
    let detail: Vec<String> = ranked
        .iter()
        .map(|r| format!("{} base {} gap {}", r.name, r.baseline, r.m100 - r.baseline))
        .collect();
    verdict(above && monotone, detail.join(", "))
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str, extra: &[&str]| -> Vec<Vec<u8>> {
        let files: Vec<_> = ["trace", "report", "svg"]
            .iter()
            .map(|k| dir.path().join(format!("{tag}.{k}")))
            .collect();
        let status = Command::new(env!("CARGO_BIN_EXE_trapmap"))
            .arg("map")
            .args([
                "--qasm",
                asset("qasm/five_one_three.qasm").to_str().unwrap(),
            ])
            .args(["--fabric", asset("fabrics/grid45x85.fab").to_str().unwrap()])
            .args(["--tech", asset("tech/default.cfg").to_str().unwrap()])
            .args(["--seeds", "10", "--rng-seed", "7", "--svg-route", "11"])
            .args(["--trace", files[0].to_str().unwrap()])
            .args(["--report", files[1].to_str().unwrap()])
            .args(["--svg", files[2].to_str().unwrap()])
            .args(extra)
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        files.iter().map(|f| std::fs::read(f).unwrap()).collect()
    };
    let a = run("a", &[]);
    let b = run("b", &[]);
    let c = run("c", &["--sequential"]);
    verdict(
        a == b && a == c,
        format!(
            "trace {} B, report {} B, svg {} B; repeat identical: {}, sequential identical: {}",
            a[0].len(),
            a[1].len(),
            a[2].len(),
            a == b,
            a == c
        ),
    )
}

// ----------------------------------------------------------------

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, title: &str, budget: Duration, f: &mut dyn FnMut() -> Verdict| {
        let started = Instant::now();
        let v = f();
        let took = started.elapsed();
        let pass = v.pass && took < budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {} {title} ({:.2} s, limit {} s): {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            v.detail
        );
    };
    let secs = Duration::from_secs;
    report(1, "turn-aware routing", secs(1), &mut criterion_1);
    report(2, "channel weight", secs(1), &mut criterion_2);
    report(3, "delay decomposition", secs(10), &mut criterion_3);
    report(4, "capacity invariants", secs(60), &mut criterion_4);
    report(5, "baseline equivalence", secs(60), &mut criterion_5);
    report(6, "reversibility", secs(10), &mut criterion_6);
    report(7, "multi-start vs Monte Carlo", secs(600), &mut criterion_7);
    let mut rows = None;
    report(8, "monotone multi-start", secs(600), &mut || {
        let r = suite();
        let v = criterion_8(&r);
        rows = Some(r);
        v
    });
    report(9, "determinism", secs(10), &mut criterion_9);
    let rows = rows.unwrap();
    report(
        10,
        "latency gap grows with circuit size",
        secs(1),
        &mut || criterion_10(&rows),
    );
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
