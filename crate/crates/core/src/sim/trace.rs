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

//! Micro-command traces and their line-oriented text form.
//!
//! ```text
//! # place q1 (21,42)
//! # place q2 (21,46)
//! t=0 MOVE q1 (21,42)->(22,42)
//! t=1 TURN q1 (22,42) V2H
//! t=11 GATE_START 4 C-X q1,q2 @(21,46)
//! t=111 GATE_END 4
//! ```

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::fabric::{Coord, TurnDir};
use crate::placer::Placement;
use crate::qasm::{GateKind, InstrId, QubitId};
use crate::tech::TechParams;
use crate::Micros;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Move {
        qubit: QubitId,
        from: Coord,
        to: Coord,
    },
    Turn {
        qubit: QubitId,
        at: Coord,
        dir: TurnDir,
    },
    GateStart {
        instruction: InstrId,
        gate: GateKind,
        operands: Vec<QubitId>,
        trap: Coord,
    },
    GateEnd {
        instruction: InstrId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MicroCommand {
    pub time: Micros,
    pub kind: CommandKind,
}

impl MicroCommand {
    /// How long the action started by this command lasts.
    pub fn duration(&self, tech: &TechParams) -> Micros {
        match &self.kind {
            CommandKind::Move { .. } => tech.t_move,
            CommandKind::Turn { .. } => tech.t_turn,
            CommandKind::GateStart { gate, .. } => gate.delay(tech),
            CommandKind::GateEnd { .. } => 0,
        }
    }
}

/// Per-instruction split of the instruction delay into gate, routing and
/// congestion time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstructionTiming {
    pub id: InstrId,
    /// When the last predecessor finished.
    pub eligible_us: Micros,
    /// When the operands started moving (or the gate started, in place).
    pub issue_us: Micros,
    pub gate_start_us: Micros,
    pub gate_end_us: Micros,
    pub t_gate_us: Micros,
    pub t_routing_us: Micros,
    pub t_congestion_us: Micros,
    pub target: Coord,
}

impl InstructionTiming {
    pub fn span(&self) -> Micros {
        self.gate_end_us - self.eligible_us
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub qubits: Vec<String>,
    pub commands: Vec<MicroCommand>,
    pub total_latency: Micros,
    pub initial_placement: Placement,
    pub final_placement: Placement,
    /// Simulator bookkeeping, indexed by instruction id. Empty for traces
    /// read from text or obtained by reversal.
    pub timings: Vec<InstructionTiming>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: unknown qubit `{name}`")]
    UnknownQubit { line: usize, name: String },
    #[error("qubit `{0}` never appears in the trace, so its position is unknown")]
    UnplacedQubit(String),
}

fn parse_coord(s: &str) -> Option<Coord> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let (r, c) = inner.split_once(',')?;
    Some(Coord::new(r.trim().parse().ok()?, c.trim().parse().ok()?))
}

impl Trace {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (q, at) in self.initial_placement.as_slice().iter().enumerate() {
            let _ = writeln!(out, "# place {} {}", self.qubits[q], at);
        }
        for cmd in &self.commands {
            let _ = write!(out, "t={} ", cmd.time);
            let _ = match &cmd.kind {
                CommandKind::Move { qubit, from, to } => {
                    writeln!(out, "MOVE {} {}->{}", self.qubits[*qubit], from, to)
                }
                CommandKind::Turn { qubit, at, dir } => {
                    writeln!(out, "TURN {} {} {}", self.qubits[*qubit], at, dir.label())
                }
                CommandKind::GateStart {
                    instruction,
                    gate,
                    operands,
                    trap,
                } => {
                    let ops: Vec<&str> =
                        operands.iter().map(|&q| self.qubits[q].as_str()).collect();
                    writeln!(
                        out,
                        "GATE_START {} {} {} @{}",
                        instruction,
                        gate,
                        ops.join(","),
                        trap
                    )
                }
                CommandKind::GateEnd { instruction } => writeln!(out, "GATE_END {instruction}"),
            };
        }
        out
    }

    /// Reads a trace back. `# place` lines give starting positions; a qubit
    /// without one starts where its first command finds it. Other `#` lines
    /// are comments.
    pub fn parse(
        text: &str,
        qubits: &[String],
        tech: &TechParams,
    ) -> Result<Trace, TraceParseError> {
        let mut commands = Vec::new();
        let mut initial: Vec<Option<Coord>> = vec![None; qubits.len()];
        let qubit_id = |line: usize, name: &str| {
            qubits
                .iter()
                .position(|q| q == name)
                .ok_or_else(|| TraceParseError::UnknownQubit {
                    line,
                    name: name.to_string(),
                })
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            let bad = |reason: &str| TraceParseError::Malformed {
                line,
                reason: reason.to_string(),
            };
            if let Some(comment) = content.strip_prefix('#') {
                if let Some(rest) = comment.trim_start().strip_prefix("place ") {
                    let (name, at) = rest
                        .trim()
                        .split_once(' ')
                        .ok_or_else(|| bad("expected `# place <q> (r,c)`"))?;
                    initial[qubit_id(line, name)?] =
                        Some(parse_coord(at.trim()).ok_or_else(|| bad("bad coordinate"))?);
                }
                continue;
            }
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let time = fields[0]
                .strip_prefix("t=")
                .and_then(|t| t.parse::<Micros>().ok())
                .ok_or_else(|| bad("expected `t=<us>`"))?;
            let kind = match (fields.get(1).copied(), fields.len()) {
                (Some("MOVE"), 4) => {
                    let (from, to) = fields[3]
                        .split_once("->")
                        .ok_or_else(|| bad("expected `(r,c)->(r,c)`"))?;
                    CommandKind::Move {
                        qubit: qubit_id(line, fields[2])?,
                        from: parse_coord(from).ok_or_else(|| bad("bad coordinate"))?,
                        to: parse_coord(to).ok_or_else(|| bad("bad coordinate"))?,
                    }
                }
                (Some("TURN"), 5) => CommandKind::Turn {
                    qubit: qubit_id(line, fields[2])?,
                    at: parse_coord(fields[3]).ok_or_else(|| bad("bad coordinate"))?,
                    dir: match fields[4] {
                        "H2V" => TurnDir::H2V,
                        "V2H" => TurnDir::V2H,
                        _ => return Err(bad("turn must be H2V or V2H")),
                    },
                },
                (Some("GATE_START"), 6) => CommandKind::GateStart {
                    instruction: fields[2].parse().map_err(|_| bad("bad instruction id"))?,
                    gate: GateKind::from_mnemonic(fields[3]).ok_or_else(|| bad("unknown gate"))?,
                    operands: fields[4]
                        .split(',')
                        .map(|q| qubit_id(line, q))
                        .collect::<Result<_, _>>()?,
                    trap: fields[5]
                        .strip_prefix('@')
                        .and_then(parse_coord)
                        .ok_or_else(|| bad("expected `@(r,c)`"))?,
                },
                (Some("GATE_END"), 3) => CommandKind::GateEnd {
                    instruction: fields[2].parse().map_err(|_| bad("bad instruction id"))?,
                },
                _ => return Err(bad("unrecognized command")),
            };
            commands.push(MicroCommand { time, kind });
        }

        let mut last: Vec<Option<Coord>> = initial.clone();
        let mut seen = vec![false; qubits.len()];
        for cmd in &commands {
            let mut note = |q: QubitId, before: Coord, after: Coord| {
                if !std::mem::replace(&mut seen[q], true) {
                    initial[q].get_or_insert(before);
                }
                last[q] = Some(after);
            };
            match &cmd.kind {
                CommandKind::Move { qubit, from, to } => note(*qubit, *from, *to),
                CommandKind::Turn { qubit, at, .. } => note(*qubit, *at, *at),
                CommandKind::GateStart { operands, trap, .. } => {
                    for &q in operands {
                        note(q, *trap, *trap);
                    }
                }
                CommandKind::GateEnd { .. } => {}
            }
        }
        let unwrap_all = |v: Vec<Option<Coord>>| {
            v.into_iter()
                .enumerate()
                .map(|(q, c)| c.ok_or_else(|| TraceParseError::UnplacedQubit(qubits[q].clone())))
                .collect::<Result<Vec<_>, _>>()
        };
        let total_latency = commands
            .iter()
            .map(|c| c.time + c.duration(tech))
            .max()
            .unwrap_or(0);
        Ok(Trace {
            qubits: qubits.to_vec(),
            commands,
            total_latency,
            initial_placement: Placement::new(unwrap_all(initial)?),
            final_placement: Placement::new(unwrap_all(last)?),
            timings: Vec::new(),
        })
    }

    /// Runs the trace backwards in time: command order and motion reversed,
    /// every gate replaced by its inverse, time re-based so the first command
    /// starts at 0.
    pub fn time_reversed(&self, tech: &TechParams) -> Trace {
        let total = self.total_latency;
        let mut starts = std::collections::HashMap::new();
        for cmd in &self.commands {
            if let CommandKind::GateStart { instruction, .. } = &cmd.kind {
                starts.insert(*instruction, cmd);
            }
        }
        let mut reversed: Vec<MicroCommand> = self
            .commands
            .iter()
            .rev()
            .map(|cmd| {
                // Motion covering [t, t+d) maps to [T-t-d, T-t); a gate's
                // start and end instants swap roles.
                let time = match cmd.kind {
                    CommandKind::Move { .. } | CommandKind::Turn { .. } => {
                        total - cmd.time - cmd.duration(tech)
                    }
                    CommandKind::GateStart { .. } | CommandKind::GateEnd { .. } => total - cmd.time,
                };
                let kind = match &cmd.kind {
                    CommandKind::Move { qubit, from, to } => CommandKind::Move {
                        qubit: *qubit,
                        from: *to,
                        to: *from,
                    },
                    CommandKind::Turn { qubit, at, dir } => CommandKind::Turn {
                        qubit: *qubit,
                        at: *at,
                        dir: dir.reversed(),
                    },
                    CommandKind::GateStart { instruction, .. } => CommandKind::GateEnd {
                        instruction: *instruction,
                    },
                    CommandKind::GateEnd { instruction } => {
                        let CommandKind::GateStart {
                            gate,
                            operands,
                            trap,
                            ..
                        } = &starts[instruction].kind
                        else {
                            unreachable!()
                        };
                        CommandKind::GateStart {
                            instruction: *instruction,
                            gate: gate.inverse().expect("gate alphabet is invertible"),
                            operands: operands.clone(),
                            trap: *trap,
                        }
                    }
                };
                MicroCommand { time, kind }
            })
            .collect();
        reversed.sort_by_key(|c| c.time);
        Trace {
            qubits: self.qubits.clone(),
            commands: reversed,
            total_latency: total,
            initial_placement: self.final_placement.clone(),
            final_placement: self.initial_placement.clone(),
            timings: Vec::new(),
        }
    }
}
