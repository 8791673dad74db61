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

//! Event-driven execution of a scheduled program on a fabric.
//!
//! Instructions are issued in priority order whenever their operands can be
//! routed. Whole paths are reserved at issue and released resource by
//! resource as each qubit leaves a channel or junction; every release and
//! every gate completion re-opens the busy queue.

mod trace;
mod validate;

pub use trace::{CommandKind, InstructionTiming, MicroCommand, Trace, TraceParseError};
pub use validate::{validate_trace, DerivedTiming, ValidationReport, Violation};

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::fabric::{CellKind, Coord, Fabric, ReservationToken, Resource, RoutingGraph, Step};
use crate::placer::{Placement, PlacementError};
use crate::qasm::{InstrId, Qidg, QubitId};
use crate::router::{route_instruction, Route};
use crate::scheduler::{pick_next, BusyQueue, IssueOrder, Pick};
use crate::tech::TechParams;
use crate::Micros;

/// Qubits a trap can hold at once.
pub const TRAP_CAPACITY: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid initial placement: {0}")]
    Placement(#[from] PlacementError),
    #[error(
        "stuck at t={time}us: {completed}/{total} instructions completed, \
         busy queue {busy:?}, ready {ready:?}"
    )]
    Stuck {
        time: Micros,
        completed: usize,
        total: usize,
        busy: Vec<InstrId>,
        ready: Vec<InstrId>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    ChannelExited {
        token: ReservationToken,
        resource: Resource,
    },
    InstructionFinished(InstrId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Event {
    time: Micros,
    rank: u8,
    key: u64,
    kind: EventKind,
}

struct Simulator<'a> {
    g: &'a Qidg,
    fabric: &'a Fabric,
    tech: &'a TechParams,
    order: &'a IssueOrder,
    graph: RoutingGraph,
    now: Micros,
    events: BinaryHeap<Reverse<Event>>,
    next_key: u64,
    location: Vec<Coord>,
    residents: Vec<Vec<QubitId>>,
    held: Vec<bool>,
    /// Traps that are held or hold at least one qubit.
    unavailable: BTreeSet<Coord>,
    ready: BTreeSet<InstrId>,
    eligible_at: Vec<Micros>,
    pending_preds: Vec<usize>,
    completed: usize,
    busy: BusyQueue,
    commands: Vec<MicroCommand>,
    timings: Vec<Option<InstructionTiming>>,
}

/// Simulates `g` issued in `order`, starting from placement `p0`.
pub fn run(
    g: &Qidg,
    order: &IssueOrder,
    p0: &Placement,
    fabric: &Fabric,
    tech: &TechParams,
) -> Result<Trace, SimError> {
    p0.check(fabric, g.num_qubits(), TRAP_CAPACITY)?;
    let n = g.len();
    let mut sim = Simulator {
        g,
        fabric,
        tech,
        order,
        graph: RoutingGraph::build(fabric, tech),
        now: 0,
        events: BinaryHeap::new(),
        next_key: 0,
        location: p0.as_slice().to_vec(),
        residents: vec![Vec::new(); fabric.traps().len()],
        held: vec![false; fabric.traps().len()],
        unavailable: BTreeSet::new(),
        ready: BTreeSet::new(),
        eligible_at: vec![0; n],
        pending_preds: (0..n).map(|i| g.preds(i).len()).collect(),
        completed: 0,
        busy: BusyQueue::new(),
        commands: Vec::new(),
        timings: vec![None; n],
    };
    for (q, &at) in p0.as_slice().iter().enumerate() {
        sim.add_resident(at, q);
    }
    sim.ready = (0..n).filter(|&i| sim.pending_preds[i] == 0).collect();
    sim.issue_phase();
    while let Some(Reverse(ev)) = sim.events.pop() {
        sim.now = ev.time;
        sim.handle(ev);
        while sim
            .events
            .peek()
            .is_some_and(|Reverse(e)| e.time == sim.now)
        {
            let Reverse(ev) = sim.events.pop().expect("peeked");
            sim.handle(ev);
        }
        debug_assert_eq!(sim.graph.audit(), Ok(()));
        sim.issue_phase();
    }
    if sim.completed < n {
        return Err(SimError::Stuck {
            time: sim.now,
            completed: sim.completed,
            total: n,
            busy: sim.busy.ids().collect(),
            ready: sim.ready.iter().copied().collect(),
        });
    }
    sim.commands.sort_by_key(|c| c.time);
    let timings: Vec<InstructionTiming> = sim
        .timings
        .into_iter()
        .map(|t| t.expect("completed"))
        .collect();
    let total_latency = timings.iter().map(|t| t.gate_end_us).max().unwrap_or(0);
    Ok(Trace {
        qubits: g.qubits.clone(),
        commands: sim.commands,
        total_latency,
        initial_placement: p0.clone(),
        final_placement: Placement::new(sim.location),
        timings,
    })
}

impl Simulator<'_> {
    fn trap(&self, at: Coord) -> usize {
        self.fabric.trap_index(at).expect("qubits rest in traps")
    }

    fn refresh(&mut self, t: usize) {
        let at = self.fabric.traps()[t];
        if self.held[t] || !self.residents[t].is_empty() {
            self.unavailable.insert(at);
        } else {
            self.unavailable.remove(&at);
        }
    }

    fn add_resident(&mut self, at: Coord, q: QubitId) {
        let t = self.trap(at);
        self.residents[t].push(q);
        self.refresh(t);
    }

    fn remove_resident(&mut self, at: Coord, q: QubitId) {
        let t = self.trap(at);
        self.residents[t].retain(|&r| r != q);
        self.refresh(t);
    }

    fn set_held(&mut self, at: Coord, held: bool) {
        let t = self.trap(at);
        self.held[t] = held;
        self.refresh(t);
    }

    fn push_event(&mut self, time: Micros, kind: EventKind) {
        let (rank, key) = match kind {
            EventKind::ChannelExited { .. } => {
                self.next_key += 1;
                (0, self.next_key)
            }
            EventKind::InstructionFinished(id) => (1, id as u64),
        };
        self.events.push(Reverse(Event {
            time,
            rank,
            key,
            kind,
        }));
    }

    fn handle(&mut self, ev: Event) {
        match ev.kind {
            EventKind::ChannelExited { token, resource } => {
                self.graph
                    .release(token, resource)
                    .expect("simulator releases only what it reserved");
            }
            EventKind::InstructionFinished(id) => self.finish(id),
        }
        self.busy.mark_retry_eligible();
    }

    fn finish(&mut self, id: InstrId) {
        let timing = self.timings[id].as_ref().expect("issued before finishing");
        let target = timing.target;
        let ins = &self.g.instructions[id];
        if ins.operands.len() == 2 {
            for &q in &ins.operands {
                self.add_resident(target, q);
            }
            self.set_held(target, false);
        }
        self.completed += 1;
        for &s in self.g.succs(id) {
            self.pending_preds[s] -= 1;
            if self.pending_preds[s] == 0 {
                self.ready.insert(s);
                self.eligible_at[s] = self.now;
            }
        }
    }

    /// Traps not usable as a gate site for `id`. An operand's own trap stays
    /// usable when it is not held and holds nothing but operands of `id`.
    fn occupied_for(&self, id: InstrId) -> BTreeSet<Coord> {
        let ops = &self.g.instructions[id].operands;
        let mut occupied = self.unavailable.clone();
        for &q in ops {
            let at = self.location[q];
            let t = self.trap(at);
            if !self.held[t] && self.residents[t].iter().all(|r| ops.contains(r)) {
                occupied.remove(&at);
            }
        }
        occupied
    }

    fn issue_phase(&mut self) {
        while let Some(pick) = pick_next(&self.ready, self.order, &self.busy) {
            let id = pick.id();
            let occupied = self.occupied_for(id);
            let routed = route_instruction(
                &self.g.instructions[id],
                &self.location,
                &mut self.graph,
                self.fabric,
                self.tech,
                &occupied,
            );
            match (routed, pick) {
                (Ok(route), _) => {
                    if let Pick::Retry(_) = pick {
                        self.busy.finish_retry(id, true);
                    }
                    self.ready.remove(&id);
                    self.issue(id, route);
                }
                (Err(_), Pick::Retry(_)) => self.busy.finish_retry(id, false),
                (Err(_), Pick::Fresh(_)) => {
                    self.busy.enqueue(id, self.now);
                }
            }
        }
    }

    fn issue(&mut self, id: InstrId, route: Route) {
        let ins = &self.g.instructions[id];
        let gate_delay = ins.gate.delay(self.tech);
        let two_qubit = ins.operands.len() == 2;
        if two_qubit {
            self.set_held(route.target, true);
        }
        let mut arrival = self.now;
        for op in &route.operands {
            if !two_qubit {
                continue;
            }
            self.remove_resident(self.location[op.qubit], op.qubit);
            let mut t = self.now;
            for step in &op.steps {
                match *step {
                    Step::Move { from, to } => {
                        self.commands.push(MicroCommand {
                            time: t,
                            kind: CommandKind::Move {
                                qubit: op.qubit,
                                from,
                                to,
                            },
                        });
                        if let Some(resource) = self.vacated(from, to) {
                            let token = op
                                .token
                                .expect("a path through resources holds a reservation");
                            self.push_event(t, EventKind::ChannelExited { token, resource });
                        }
                        t += self.tech.t_move;
                    }
                    Step::Turn { at, dir } => {
                        self.commands.push(MicroCommand {
                            time: t,
                            kind: CommandKind::Turn {
                                qubit: op.qubit,
                                at,
                                dir,
                            },
                        });
                        t += self.tech.t_turn;
                    }
                }
            }
            arrival = arrival.max(t);
            self.location[op.qubit] = route.target;
        }
        let gate_start = arrival;
        let gate_end = gate_start + gate_delay;
        self.commands.push(MicroCommand {
            time: gate_start,
            kind: CommandKind::GateStart {
                instruction: id,
                gate: ins.gate,
                operands: ins.operands.clone(),
                trap: route.target,
            },
        });
        self.commands.push(MicroCommand {
            time: gate_end,
            kind: CommandKind::GateEnd { instruction: id },
        });
        self.timings[id] = Some(InstructionTiming {
            id,
            eligible_us: self.eligible_at[id],
            issue_us: self.now,
            gate_start_us: gate_start,
            gate_end_us: gate_end,
            t_gate_us: gate_delay,
            t_routing_us: gate_start - self.now,
            t_congestion_us: self.now - self.eligible_at[id],
            target: route.target,
        });
        self.push_event(gate_end, EventKind::InstructionFinished(id));
    }

    /// Resource a qubit leaves by stepping from `from` to `to`, if any.
    fn vacated(&self, from: Coord, to: Coord) -> Option<Resource> {
        match self.fabric.cell(from) {
            CellKind::Junction => self.fabric.junction_index(from).map(Resource::Junction),
            CellKind::Channel => {
                let run = self.fabric.run_index(from)?;
                (self.fabric.run_index(to) != Some(run)).then_some(Resource::Channel(run))
            }
            _ => None,
        }
    }
}
