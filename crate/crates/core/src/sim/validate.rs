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

//! Independent replay of a trace against the program, fabric and timing
//! model.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::trace::{CommandKind, Trace};
use crate::fabric::{Axis, CellKind, Coord, Fabric, TurnDir};
use crate::qasm::{InstrId, Qidg, QubitId};
use crate::tech::TechParams;
use crate::Micros;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    OutOfOrder {
        index: usize,
        time: Micros,
    },
    UnknownInstruction {
        instruction: InstrId,
    },
    Completeness {
        instruction: InstrId,
        detail: String,
    },
    GateMismatch {
        instruction: InstrId,
        detail: String,
    },
    GateDuration {
        instruction: InstrId,
        expected: Micros,
        actual: Micros,
    },
    Dependency {
        instruction: InstrId,
        predecessor: InstrId,
    },
    Continuity {
        qubit: String,
        time: Micros,
        detail: String,
    },
    Turn {
        qubit: String,
        at: Coord,
        time: Micros,
        detail: String,
    },
    Capacity {
        resource: String,
        at: Coord,
        time: Micros,
        load: u32,
        capacity: u32,
    },
    Decomposition {
        instruction: InstrId,
        detail: String,
    },
    FinalPlacement {
        qubit: String,
        expected: Coord,
        actual: Coord,
    },
    TotalLatency {
        expected: Micros,
        actual: Micros,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfOrder { index, time } => {
                write!(f, "ORDER command {index} at t={time} precedes an earlier timestamp")
            }
            Violation::UnknownInstruction { instruction } => {
                write!(f, "UNKNOWN instruction {instruction}")
            }
            Violation::Completeness { instruction, detail } => {
                write!(f, "COMPLETENESS instruction {instruction}: {detail}")
            }
            Violation::GateMismatch { instruction, detail } => {
                write!(f, "GATE instruction {instruction}: {detail}")
            }
            Violation::GateDuration {
                instruction,
                expected,
                actual,
            } => write!(
                f,
                "DURATION instruction {instruction}: gate lasted {actual}us, expected {expected}us"
            ),
            Violation::Dependency {
                instruction,
                predecessor,
            } => write!(
                f,
                "DEPENDENCY instruction {instruction} started before predecessor {predecessor} ended"
            ),
            Violation::Continuity { qubit, time, detail } => {
                write!(f, "CONTINUITY {qubit} t={time}: {detail}")
            }
            Violation::Turn {
                qubit,
                at,
                time,
                detail,
            } => write!(f, "TURN {qubit} {at} t={time}: {detail}"),
            Violation::Capacity {
                resource,
                at,
                time,
                load,
                capacity,
            } => write!(
                f,
                "CAPACITY {resource} at {at} t={time}: {load} qubits, capacity {capacity}"
            ),
            Violation::Decomposition { instruction, detail } => {
                write!(f, "DECOMPOSITION instruction {instruction}: {detail}")
            }
            Violation::FinalPlacement {
                qubit,
                expected,
                actual,
            } => write!(f, "PLACEMENT {qubit} ends at {actual}, trace says {expected}"),
            Violation::TotalLatency { expected, actual } => {
                write!(f, "LATENCY trace says {actual}us, last command completes at {expected}us")
            }
        }
    }
}

/// Split of one instruction's span recovered from the trace alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedTiming {
    pub id: InstrId,
    /// End of the latest predecessor.
    pub eligible_us: Micros,
    /// Start of the accounting window: the earlier of eligibility and the
    /// first operand move towards the gate.
    pub window_start_us: Micros,
    pub gate_start_us: Micros,
    pub gate_end_us: Micros,
    pub span_us: Micros,
    pub t_gate_us: Micros,
    pub t_routing_us: Micros,
    pub t_congestion_us: Micros,
    pub trap: Coord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub total_latency_us: Micros,
    pub violations: Vec<Violation>,
    pub breakdown: Vec<DerivedTiming>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out.push_str(&format!(
            "{} violation(s), total latency {}us\n",
            self.violations.len(),
            self.total_latency_us
        ));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Held {
    Channel(usize),
    Junction(usize),
}

struct QubitState {
    at: Coord,
    free_at: Micros,
    /// Axis of the step that brought the qubit into its current junction.
    arrival_axis: Option<Axis>,
    turn: Option<TurnDir>,
    /// Resource currently occupied and when it was entered.
    inside: Option<(Held, Micros)>,
    /// Move and turn time accumulated since the qubit's last gate.
    segment_delay: Micros,
    segment_start: Option<Micros>,
}

struct GateRecord {
    start: Micros,
    end: Option<Micros>,
    trap: Coord,
    routing: Micros,
    first_move: Option<Micros>,
}

fn held_at(fabric: &Fabric, at: Coord) -> Option<Held> {
    match fabric.cell(at) {
        CellKind::Channel => fabric.run_index(at).map(Held::Channel),
        CellKind::Junction => fabric.junction_index(at).map(Held::Junction),
        _ => None,
    }
}

/// Replays `trace` and reports every rule it breaks, together with the
/// per-instruction gate/routing/congestion split recovered from it.
pub fn validate_trace(
    trace: &Trace,
    g: &Qidg,
    fabric: &Fabric,
    tech: &TechParams,
) -> ValidationReport {
    let mut violations = Vec::new();
    let name = |q: QubitId| {
        trace
            .qubits
            .get(q)
            .cloned()
            .unwrap_or_else(|| format!("#{q}"))
    };
    let mut qubits: Vec<QubitState> = trace
        .initial_placement
        .as_slice()
        .iter()
        .map(|&at| QubitState {
            at,
            free_at: 0,
            arrival_axis: None,
            turn: None,
            inside: None,
            segment_delay: 0,
            segment_start: None,
        })
        .collect();
    if qubits.len() != g.num_qubits() {
        violations.push(Violation::Continuity {
            qubit: String::new(),
            time: 0,
            detail: format!(
                "initial placement covers {} qubits, program declares {}",
                qubits.len(),
                g.num_qubits()
            ),
        });
        return ValidationReport {
            valid: false,
            total_latency_us: trace.total_latency,
            violations,
            breakdown: Vec::new(),
        };
    }
    let mut gates: BTreeMap<InstrId, GateRecord> = BTreeMap::new();
    let mut intervals: Vec<(Held, Micros, Micros)> = Vec::new();
    let mut last_time = 0;

    for (index, cmd) in trace.commands.iter().enumerate() {
        let t = cmd.time;
        if t < last_time {
            violations.push(Violation::OutOfOrder { index, time: t });
        }
        last_time = last_time.max(t);
        match &cmd.kind {
            CommandKind::Move { qubit, from, to } => {
                let Some(s) = qubits.get_mut(*qubit) else {
                    continue;
                };
                let continuity = |detail: String| Violation::Continuity {
                    qubit: name(*qubit),
                    time: t,
                    detail,
                };
                if s.at != *from {
                    violations.push(continuity(format!("moves from {from} but is at {}", s.at)));
                }
                if !fabric.contains(*from) || !fabric.contains(*to) || !fabric.connects(*from, *to)
                {
                    violations.push(continuity(format!("{from}->{to} is not a legal step")));
                }
                if t < s.free_at {
                    violations.push(continuity(format!(
                        "moves while busy until t={}",
                        s.free_at
                    )));
                }
                if fabric.contains(*from) && fabric.contains(*to) && from.is_adjacent(*to) {
                    let axis = from.axis_to(*to);
                    if fabric.cell(*from) == CellKind::Junction {
                        let expected = s.arrival_axis.and_then(|a| TurnDir::from_axes(a, axis));
                        if s.turn != expected {
                            violations.push(Violation::Turn {
                                qubit: name(*qubit),
                                at: *from,
                                time: t,
                                detail: format!(
                                    "leaves with turn {:?}, path requires {:?}",
                                    s.turn.map(TurnDir::label),
                                    expected.map(TurnDir::label)
                                ),
                            });
                        }
                    }
                    let before = held_at(fabric, *from);
                    let after = held_at(fabric, *to);
                    if before != after {
                        if let Some((r, entered)) = s.inside.take() {
                            intervals.push((r, entered, t));
                        }
                        if let Some(r) = after {
                            s.inside = Some((r, t));
                        }
                    }
                    s.arrival_axis = Some(axis);
                }
                s.turn = None;
                s.at = *to;
                s.free_at = t + tech.t_move;
                s.segment_delay += tech.t_move;
                s.segment_start.get_or_insert(t);
            }
            CommandKind::Turn { qubit, at, dir } => {
                let Some(s) = qubits.get_mut(*qubit) else {
                    continue;
                };
                if s.at != *at || fabric.junction_index(*at).is_none() {
                    violations.push(Violation::Turn {
                        qubit: name(*qubit),
                        at: *at,
                        time: t,
                        detail: format!(
                            "turns away from its position {} or outside a junction",
                            s.at
                        ),
                    });
                }
                if t < s.free_at {
                    violations.push(Violation::Continuity {
                        qubit: name(*qubit),
                        time: t,
                        detail: format!("turns while busy until t={}", s.free_at),
                    });
                }
                if s.turn.is_some() {
                    violations.push(Violation::Turn {
                        qubit: name(*qubit),
                        at: *at,
                        time: t,
                        detail: "turns twice in one junction".into(),
                    });
                }
                s.turn = Some(*dir);
                s.free_at = t + tech.t_turn;
                s.segment_delay += tech.t_turn;
                s.segment_start.get_or_insert(t);
            }
            CommandKind::GateStart {
                instruction,
                gate,
                operands,
                trap,
            } => {
                let Some(ins) = g.instructions.get(*instruction) else {
                    violations.push(Violation::UnknownInstruction {
                        instruction: *instruction,
                    });
                    continue;
                };
                if gates.contains_key(instruction) {
                    violations.push(Violation::Completeness {
                        instruction: *instruction,
                        detail: "started twice".into(),
                    });
                    continue;
                }
                if ins.gate != *gate || ins.operands != *operands {
                    violations.push(Violation::GateMismatch {
                        instruction: *instruction,
                        detail: format!(
                            "trace runs {gate} on {operands:?}, program has {} on {:?}",
                            ins.gate, ins.operands
                        ),
                    });
                }
                if fabric.trap_index(*trap).is_none() {
                    violations.push(Violation::GateMismatch {
                        instruction: *instruction,
                        detail: format!("gate site {trap} is not a trap"),
                    });
                }
                for &p in g.preds(*instruction) {
                    let done = gates
                        .get(&p)
                        .and_then(|r| r.end)
                        .is_some_and(|end| end <= t);
                    if !done {
                        violations.push(Violation::Dependency {
                            instruction: *instruction,
                            predecessor: p,
                        });
                    }
                }
                let mut routing = 0;
                let mut first_move: Option<Micros> = None;
                for &q in operands {
                    let Some(s) = qubits.get_mut(q) else {
                        continue;
                    };
                    if s.at != *trap || t < s.free_at {
                        violations.push(Violation::Continuity {
                            qubit: name(q),
                            time: t,
                            detail: format!(
                                "not ready in {trap} for instruction {instruction} (at {}, busy until t={})",
                                s.at, s.free_at
                            ),
                        });
                    }
                    routing = routing.max(s.segment_delay);
                    if let Some(m) = s.segment_start {
                        first_move = Some(first_move.map_or(m, |f: Micros| f.min(m)));
                    }
                    s.free_at = t + ins.gate.delay(tech);
                    s.segment_delay = 0;
                    s.segment_start = None;
                }
                gates.insert(
                    *instruction,
                    GateRecord {
                        start: t,
                        end: None,
                        trap: *trap,
                        routing,
                        first_move,
                    },
                );
            }
            CommandKind::GateEnd { instruction } => {
                let Some(ins) = g.instructions.get(*instruction) else {
                    violations.push(Violation::UnknownInstruction {
                        instruction: *instruction,
                    });
                    continue;
                };
                match gates.get_mut(instruction) {
                    Some(r) if r.end.is_none() => {
                        r.end = Some(t);
                        let expected = ins.gate.delay(tech);
                        if t.checked_sub(r.start) != Some(expected) {
                            violations.push(Violation::GateDuration {
                                instruction: *instruction,
                                expected,
                                actual: t.saturating_sub(r.start),
                            });
                        }
                    }
                    _ => violations.push(Violation::Completeness {
                        instruction: *instruction,
                        detail: "ended without a matching start".into(),
                    }),
                }
            }
        }
    }

    for (q, s) in qubits.iter().enumerate() {
        if let Some((r, entered)) = s.inside {
            violations.push(Violation::Continuity {
                qubit: name(q),
                time: entered,
                detail: format!("trace ends with the qubit inside {r:?}"),
            });
        }
        if let Some(&expected) = trace.final_placement.as_slice().get(q) {
            if expected != s.at {
                violations.push(Violation::FinalPlacement {
                    qubit: name(q),
                    expected,
                    actual: s.at,
                });
            }
        }
    }

    violations.extend(capacity_sweep(&intervals, fabric, tech));

    let mut breakdown = Vec::new();
    let mut max_end = 0;
    for ins in &g.instructions {
        let Some(rec) = gates.get(&ins.id) else {
            violations.push(Violation::Completeness {
                instruction: ins.id,
                detail: "never started".into(),
            });
            continue;
        };
        let Some(end) = rec.end else {
            violations.push(Violation::Completeness {
                instruction: ins.id,
                detail: "never ended".into(),
            });
            continue;
        };
        max_end = max_end.max(end);
        let eligible = g
            .preds(ins.id)
            .iter()
            .filter_map(|p| gates.get(p).and_then(|r| r.end))
            .max()
            .unwrap_or(0);
        let window_start = rec.first_move.map_or(eligible, |m| m.min(eligible));
        let gate = ins.gate.delay(tech);
        let span = end.saturating_sub(window_start);
        let Some(congestion) = (rec.start - window_start.min(rec.start)).checked_sub(rec.routing)
        else {
            violations.push(Violation::Decomposition {
                instruction: ins.id,
                detail: format!(
                    "operand motion of {}us does not fit before the gate start at t={}",
                    rec.routing, rec.start
                ),
            });
            continue;
        };
        if let Some(sim) = trace.timings.get(ins.id) {
            let expected = (
                sim.eligible_us,
                sim.t_routing_us,
                sim.t_congestion_us,
                sim.gate_end_us,
            );
            let derived = (eligible, rec.routing, congestion, end);
            if expected != derived {
                violations.push(Violation::Decomposition {
                    instruction: ins.id,
                    detail: format!(
                        "simulator recorded (eligible, routing, congestion, end) = {expected:?}, trace gives {derived:?}"
                    ),
                });
            }
        }
        debug_assert_eq!(span, gate + rec.routing + congestion);
        breakdown.push(DerivedTiming {
            id: ins.id,
            eligible_us: eligible,
            window_start_us: window_start,
            gate_start_us: rec.start,
            gate_end_us: end,
            span_us: span,
            t_gate_us: gate,
            t_routing_us: rec.routing,
            t_congestion_us: congestion,
            trap: rec.trap,
        });
    }
    let motion_end = trace
        .commands
        .iter()
        .map(|c| c.time + c.duration(tech))
        .max()
        .unwrap_or(0);
    let max_end = max_end.max(motion_end);
    if max_end != trace.total_latency {
        violations.push(Violation::TotalLatency {
            expected: max_end,
            actual: trace.total_latency,
        });
    }
    ValidationReport {
        valid: violations.is_empty(),
        total_latency_us: trace.total_latency,
        violations,
        breakdown,
    }
}

/// Sweeps the occupancy of every channel and junction over time. Intervals
/// are half-open, so a qubit leaving at `t` never overlaps one entering at `t`.
fn capacity_sweep(
    intervals: &[(Held, Micros, Micros)],
    fabric: &Fabric,
    tech: &TechParams,
) -> Vec<Violation> {
    let mut per: BTreeMap<Held, Vec<(Micros, i32)>> = BTreeMap::new();
    for &(r, from, to) in intervals {
        if from < to {
            let e = per.entry(r).or_default();
            e.push((from, 1));
            e.push((to, -1));
        }
    }
    let mut out = Vec::new();
    for (r, mut events) in per {
        events.sort();
        let (capacity, label, at) = match r {
            Held::Channel(c) => (tech.channel_capacity, "channel", fabric.runs()[c].cells[0]),
            Held::Junction(j) => (tech.junction_capacity, "junction", fabric.junctions()[j]),
        };
        let mut load: i64 = 0;
        let mut reported = false;
        for (time, delta) in events {
            load += delta as i64;
            if load > capacity as i64 && !reported {
                reported = true;
                out.push(Violation::Capacity {
                    resource: label.to_string(),
                    at,
                    time,
                    load: load as u32,
                    capacity,
                });
            }
        }
    }
    out
}
