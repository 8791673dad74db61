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

//! Target-trap selection and congestion-aware shortest-path routing of the
//! operands of one instruction.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::fabric::{
    Coord, EdgeKind, Fabric, GraphPath, ReservationToken, Resource, RoutingGraph, Step, VertexId,
    VertexKind,
};
use crate::qasm::{Instruction, QubitId};
use crate::tech::TechParams;
use crate::Micros;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no free trap available")]
pub struct NoFreeTrap;

/// Why an instruction could not be routed right now.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum Congested {
    #[error("no free trap near the operands")]
    NoFreeTrap,
    #[error("no capacity-feasible path for qubit {0}")]
    NoPath(QubitId),
}

/// Path of one operand towards the gate site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperandRoute {
    pub qubit: QubitId,
    pub path: GraphPath,
    pub steps: Vec<Step>,
    pub resources: Vec<Resource>,
    pub token: Option<ReservationToken>,
    /// Move and turn time needed to walk `steps`.
    pub delay: Micros,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub target: Coord,
    pub operands: Vec<OperandRoute>,
}

impl Route {
    /// Routing share of the instruction delay: operands move concurrently.
    pub fn routing_delay(&self) -> Micros {
        self.operands.iter().map(|o| o.delay).max().unwrap_or(0)
    }
}

/// Time to walk a cell-level step list.
pub fn steps_delay(steps: &[Step], tech: &TechParams) -> Micros {
    steps
        .iter()
        .map(|s| match s {
            Step::Move { .. } => tech.t_move,
            Step::Turn { .. } => tech.t_turn,
        })
        .sum()
}

fn squared_distance(a: Coord, b: Coord) -> usize {
    let dr = a.row.abs_diff(b.row);
    let dc = a.col.abs_diff(b.col);
    dr * dr + dc * dc
}

/// Picks the gate site for two operands: the free trap closest to the
/// midpoint of their positions, ties broken in row-major order.
pub fn select_target_trap(
    src: Coord,
    dst: Coord,
    fabric: &Fabric,
    occupied: &BTreeSet<Coord>,
) -> Result<Coord, NoFreeTrap> {
    let median = Coord::new(
        (src.row + dst.row).div_ceil(2),
        (src.col + dst.col).div_ceil(2),
    );
    fabric
        .traps()
        .iter()
        .copied()
        .filter(|t| !occupied.contains(t))
        .min_by_key(|&t| (squared_distance(t, median), t))
        .ok_or(NoFreeTrap)
}

/// Cheapest capacity-feasible walk between two vertices. Channel edges cost
/// their occupancy-scaled length and turn edges the turn delay, both in
/// move-time units. Full channels and full junctions are impassable, and
/// traps other than the two endpoints are never passed through.
pub fn find_path(
    graph: &RoutingGraph,
    from: VertexId,
    to: VertexId,
    tech: &TechParams,
) -> Option<(GraphPath, u64)> {
    if from == to {
        return Some((
            GraphPath {
                start: from,
                edges: Vec::new(),
            },
            0,
        ));
    }
    let n = graph.vertex_count();
    let mut dist = vec![u64::MAX; n];
    let mut via: Vec<Option<(usize, VertexId)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[from] = 0;
    heap.push(Reverse((0u64, from)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if v == to {
            break;
        }
        if v != from && matches!(graph.vertex(v), VertexKind::Trap(_)) {
            continue;
        }
        for &(e, w) in graph.neighbors(v) {
            if let Some(j) = graph.vertex(w).junction() {
                let same_junction = graph.vertex(v).junction() == Some(j);
                if !same_junction && graph.junction_full(j) {
                    continue;
                }
            }
            let Some(cost) = graph.search_cost(e, tech) else {
                continue;
            };
            let nd = d + cost;
            if nd < dist[w] {
                dist[w] = nd;
                via[w] = Some((e, v));
                heap.push(Reverse((nd, w)));
            }
        }
    }
    if dist[to] == u64::MAX {
        return None;
    }
    let mut edges = Vec::new();
    let mut cur = to;
    while let Some((e, prev)) = via[cur] {
        edges.push(e);
        cur = prev;
    }
    edges.reverse();
    Some((GraphPath { start: from, edges }, dist[to]))
}

fn trap_vertex(graph: &RoutingGraph, fabric: &Fabric, at: Coord) -> VertexId {
    let t = fabric
        .trap_index(at)
        .unwrap_or_else(|| panic!("qubit location {at} is not a trap"));
    graph.trap_vertex(t)
}

fn plan_operand(
    graph: &RoutingGraph,
    fabric: &Fabric,
    tech: &TechParams,
    qubit: QubitId,
    from: Coord,
    target: Coord,
) -> Option<OperandRoute> {
    let (path, _) = find_path(
        graph,
        trap_vertex(graph, fabric, from),
        trap_vertex(graph, fabric, target),
        tech,
    )?;
    let steps = graph.expand(&path);
    Some(OperandRoute {
        qubit,
        resources: graph.path_resources(&path),
        delay: steps_delay(&steps, tech),
        steps,
        path,
        token: None,
    })
}

/// Routes the operands of `ins` and reserves their paths, both or neither.
///
/// One-qubit gates run in place. For two-qubit gates the gate site is picked
/// with [`select_target_trap`]; `occupied` lists the traps that may not be
/// used as a gate site.
pub fn route_instruction(
    ins: &Instruction,
    locations: &[Coord],
    graph: &mut RoutingGraph,
    fabric: &Fabric,
    tech: &TechParams,
    occupied: &BTreeSet<Coord>,
) -> Result<Route, Congested> {
    if let [q] = ins.operands[..] {
        let here = locations[q];
        return Ok(Route {
            target: here,
            operands: vec![OperandRoute {
                qubit: q,
                path: GraphPath {
                    start: trap_vertex(graph, fabric, here),
                    edges: Vec::new(),
                },
                steps: Vec::new(),
                resources: Vec::new(),
                token: None,
                delay: 0,
            }],
        });
    }
    let (src, dst) = (ins.operands[0], ins.operands[1]);
    let target = select_target_trap(locations[src], locations[dst], fabric, occupied)
        .map_err(|_| Congested::NoFreeTrap)?;

    let mut routes: Vec<OperandRoute> = Vec::with_capacity(2);
    for q in [src, dst] {
        let planned = plan_operand(graph, fabric, tech, q, locations[q], target);
        let reserved = planned.and_then(|mut r| {
            r.token = if r.resources.is_empty() {
                None
            } else {
                Some(graph.reserve_resources(r.resources.clone()).ok()?)
            };
            Some(r)
        });
        match reserved {
            Some(r) => routes.push(r),
            None => {
                for r in &routes {
                    if let Some(t) = r.token {
                        graph.release_all(t);
                    }
                }
                return Err(Congested::NoPath(q));
            }
        }
    }
    Ok(Route {
        target,
        operands: routes,
    })
}

/// Number of turn edges on a path.
pub fn turn_count(graph: &RoutingGraph, path: &GraphPath) -> usize {
    path.edges
        .iter()
        .filter(|&&e| matches!(graph.edge(e).kind, EdgeKind::Turn(_)))
        .count()
}
