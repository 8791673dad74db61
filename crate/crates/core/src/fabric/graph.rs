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

//! Turn-aware routing graph with per-channel and per-junction occupancy.
//!
//! Every junction contributes two vertices, one where horizontal channels
//! attach and one where vertical channels attach, joined by a turn edge.
//! Every trap is a vertex of its own. A channel run becomes one edge between
//! the vertices at its two ends; a trap beside a junction gets a zero-length
//! link edge to the junction vertex of the matching axis.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Axis, Coord, Fabric, RunEnd};
use crate::tech::TechParams;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    JunctionH(usize),
    JunctionV(usize),
    Trap(usize),
}

impl VertexKind {
    pub fn junction(self) -> Option<usize> {
        match self {
            VertexKind::JunctionH(j) | VertexKind::JunctionV(j) => Some(j),
            VertexKind::Trap(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// A channel run, by run index.
    Channel(usize),
    /// The H/V connection inside a junction.
    Turn(usize),
    /// Zero-length hop between a trap and an adjacent junction.
    TrapLink(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub a: VertexId,
    pub b: VertexId,
    pub kind: EdgeKind,
}

impl GraphEdge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// A capacity-limited resource a routed qubit holds while in transit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resource {
    Channel(usize),
    Junction(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReservationToken(u64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReleaseError {
    #[error("resource {resource:?} is not held by reservation {token:?}")]
    UnknownToken {
        token: ReservationToken,
        resource: Resource,
    },
    #[error("resource {resource:?} of reservation {token:?} was already released")]
    DoubleRelease {
        token: ReservationToken,
        resource: Resource,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("reserving the path would exceed the capacity of {0:?}")]
pub struct CapacityViolated(pub Resource);

/// Walk through the graph from a start vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPath {
    pub start: VertexId,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TurnDir {
    H2V,
    V2H,
}

impl TurnDir {
    pub fn label(self) -> &'static str {
        match self {
            TurnDir::H2V => "H2V",
            TurnDir::V2H => "V2H",
        }
    }

    pub fn reversed(self) -> TurnDir {
        match self {
            TurnDir::H2V => TurnDir::V2H,
            TurnDir::V2H => TurnDir::H2V,
        }
    }

    pub fn from_axes(from: Axis, to: Axis) -> Option<TurnDir> {
        match (from, to) {
            (Axis::Horizontal, Axis::Vertical) => Some(TurnDir::H2V),
            (Axis::Vertical, Axis::Horizontal) => Some(TurnDir::V2H),
            _ => None,
        }
    }
}

/// Cell-level action along a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Move { from: Coord, to: Coord },
    Turn { at: Coord, dir: TurnDir },
}

/// Channel weight in cells: `(n + 1) * length` while the
/// channel has spare capacity, infinite once it is full.
pub fn channel_weight(n: u32, length: usize, capacity: u32) -> f64 {
    if n < capacity {
        (n as f64 + 1.0) * length as f64
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug)]
pub struct RoutingGraph {
    vertices: Vec<VertexKind>,
    vertex_cells: Vec<Coord>,
    edges: Vec<GraphEdge>,
    adjacency: Vec<Vec<(EdgeId, VertexId)>>,
    run_edge: Vec<Option<EdgeId>>,
    run_lengths: Vec<usize>,
    run_cells: Vec<Vec<Coord>>,
    junction_count: usize,
    channel_load: Vec<u32>,
    junction_load: Vec<u32>,
    channel_capacity: u32,
    junction_capacity: u32,
    next_token: u64,
    reservations: BTreeMap<ReservationToken, Vec<(Resource, bool)>>,
}

impl RoutingGraph {
    pub fn build(fabric: &Fabric, tech: &TechParams) -> RoutingGraph {
        let nj = fabric.junctions().len();
        let nt = fabric.traps().len();
        let mut vertices = Vec::with_capacity(2 * nj + nt);
        let mut vertex_cells = Vec::with_capacity(2 * nj + nt);
        for (j, &at) in fabric.junctions().iter().enumerate() {
            vertices.push(VertexKind::JunctionH(j));
            vertices.push(VertexKind::JunctionV(j));
            vertex_cells.push(at);
            vertex_cells.push(at);
        }
        for (t, &at) in fabric.traps().iter().enumerate() {
            vertices.push(VertexKind::Trap(t));
            vertex_cells.push(at);
        }
        let junction_vertex = |j: usize, axis: Axis| match axis {
            Axis::Horizontal => 2 * j,
            Axis::Vertical => 2 * j + 1,
        };
        let trap_vertex = |t: usize| 2 * nj + t;

        let mut edges = Vec::new();
        let mut run_edge = vec![None; fabric.runs().len()];
        for (r, run) in fabric.runs().iter().enumerate() {
            let endpoint = |end: RunEnd| match end {
                RunEnd::Junction(j) => Some(junction_vertex(j, run.axis)),
                RunEnd::Trap(t) => Some(trap_vertex(t)),
                RunEnd::Open => None,
            };
            if let (Some(a), Some(b)) = (endpoint(run.ends[0]), endpoint(run.ends[1])) {
                run_edge[r] = Some(edges.len());
                edges.push(GraphEdge {
                    a,
                    b,
                    kind: EdgeKind::Channel(r),
                });
            }
        }
        for j in 0..nj {
            edges.push(GraphEdge {
                a: 2 * j,
                b: 2 * j + 1,
                kind: EdgeKind::Turn(j),
            });
        }
        for (l, link) in fabric.trap_links().iter().enumerate() {
            edges.push(GraphEdge {
                a: trap_vertex(link.trap),
                b: junction_vertex(link.junction, link.axis),
                kind: EdgeKind::TrapLink(l),
            });
        }
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (e, edge) in edges.iter().enumerate() {
            adjacency[edge.a].push((e, edge.b));
            adjacency[edge.b].push((e, edge.a));
        }
        RoutingGraph {
            vertices,
            vertex_cells,
            edges,
            adjacency,
            run_edge,
            run_lengths: fabric.runs().iter().map(|r| r.len()).collect(),
            run_cells: fabric.runs().iter().map(|r| r.cells.clone()).collect(),
            junction_count: nj,
            channel_load: vec![0; fabric.runs().len()],
            junction_load: vec![0; nj],
            channel_capacity: tech.channel_capacity,
            junction_capacity: tech.junction_capacity,
            next_token: 0,
            reservations: BTreeMap::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: VertexId) -> VertexKind {
        self.vertices[v]
    }

    pub fn vertex_cell(&self, v: VertexId) -> Coord {
        self.vertex_cells[v]
    }

    pub fn trap_vertex(&self, trap: usize) -> VertexId {
        2 * self.junction_count + trap
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &GraphEdge {
        &self.edges[e]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.adjacency[v]
    }

    pub fn channel_edge_count(&self) -> usize {
        self.count_edges(|k| matches!(k, EdgeKind::Channel(_)))
    }

    pub fn turn_edge_count(&self) -> usize {
        self.count_edges(|k| matches!(k, EdgeKind::Turn(_)))
    }

    pub fn link_edge_count(&self) -> usize {
        self.count_edges(|k| matches!(k, EdgeKind::TrapLink(_)))
    }

    fn count_edges(&self, pred: impl Fn(EdgeKind) -> bool) -> usize {
        self.edges.iter().filter(|e| pred(e.kind)).count()
    }

    /// Edge carrying channel run `run`, if both ends of the run connect.
    pub fn run_edge(&self, run: usize) -> Option<EdgeId> {
        self.run_edge[run]
    }

    pub fn channel_length(&self, run: usize) -> usize {
        self.run_lengths[run]
    }

    pub fn channel_capacity(&self) -> u32 {
        self.channel_capacity
    }

    pub fn junction_capacity(&self) -> u32 {
        self.junction_capacity
    }

    pub fn channel_load(&self, run: usize) -> u32 {
        self.channel_load[run]
    }

    pub fn junction_load(&self, junction: usize) -> u32 {
        self.junction_load[junction]
    }

    pub fn junction_full(&self, junction: usize) -> bool {
        self.junction_load[junction] >= self.junction_capacity
    }

    /// Weight in cells: channels per [`channel_weight`], turns at
    /// `t_turn / t_move`, trap links free.
    pub fn edge_weight(&self, e: EdgeId, tech: &TechParams) -> f64 {
        match self.edges[e].kind {
            EdgeKind::Channel(r) => channel_weight(
                self.channel_load[r],
                self.run_lengths[r],
                self.channel_capacity,
            ),
            EdgeKind::Turn(_) if tech.t_move == 0 => 0.0,
            EdgeKind::Turn(_) => tech.t_turn as f64 / tech.t_move as f64,
            EdgeKind::TrapLink(_) => 0.0,
        }
    }

    /// [`edge_weight`](Self::edge_weight) scaled by `t_move` so it stays
    /// integral; `None` stands for an infinite weight.
    pub fn search_cost(&self, e: EdgeId, tech: &TechParams) -> Option<u64> {
        match self.edges[e].kind {
            EdgeKind::Channel(r) => {
                let n = self.channel_load[r];
                (n < self.channel_capacity)
                    .then(|| (n as u64 + 1) * self.run_lengths[r] as u64 * tech.t_move)
            }
            EdgeKind::Turn(_) => Some(tech.t_turn),
            EdgeKind::TrapLink(_) => Some(0),
        }
    }

    pub fn path_vertices(&self, path: &GraphPath) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(path.edges.len() + 1);
        let mut cur = path.start;
        out.push(cur);
        for &e in &path.edges {
            cur = self.edges[e].other(cur);
            out.push(cur);
        }
        out
    }

    /// Channels and junction traversals a path occupies, in travel order.
    /// Arriving at a junction vertex by anything but its turn edge starts a
    /// new traversal of that junction.
    pub fn path_resources(&self, path: &GraphPath) -> Vec<Resource> {
        let mut out = Vec::new();
        let mut cur = path.start;
        for &e in &path.edges {
            let edge = &self.edges[e];
            cur = edge.other(cur);
            match edge.kind {
                EdgeKind::Channel(r) => out.push(Resource::Channel(r)),
                EdgeKind::Turn(_) => continue,
                EdgeKind::TrapLink(_) => {}
            }
            if let Some(j) = self.vertices[cur].junction() {
                out.push(Resource::Junction(j));
            }
        }
        out
    }

    /// Cell-by-cell expansion of a path starting from its start vertex.
    pub fn expand(&self, path: &GraphPath) -> Vec<Step> {
        let verts = self.path_vertices(path);
        let mut steps = Vec::new();
        let mut cur = self.vertex_cells[path.start];
        for (i, &e) in path.edges.iter().enumerate() {
            let (from_v, to_v) = (verts[i], verts[i + 1]);
            match self.edges[e].kind {
                EdgeKind::Channel(r) => {
                    let cells = &self.run_cells[r];
                    let forward = cells[0].is_adjacent(cur);
                    let ordered: Box<dyn Iterator<Item = &Coord>> = if forward {
                        Box::new(cells.iter())
                    } else {
                        Box::new(cells.iter().rev())
                    };
                    for &c in ordered.chain(std::iter::once(&self.vertex_cells[to_v])) {
                        steps.push(Step::Move { from: cur, to: c });
                        cur = c;
                    }
                }
                EdgeKind::Turn(_) => {
                    let dir = match self.vertices[from_v] {
                        VertexKind::JunctionH(_) => TurnDir::H2V,
                        _ => TurnDir::V2H,
                    };
                    steps.push(Step::Turn { at: cur, dir });
                }
                EdgeKind::TrapLink(_) => {
                    let to = self.vertex_cells[to_v];
                    steps.push(Step::Move { from: cur, to });
                    cur = to;
                }
            }
        }
        steps
    }

    /// Reserves every channel and junction traversal on `path`, all or none.
    pub fn reserve_path(&mut self, path: &GraphPath) -> Result<ReservationToken, CapacityViolated> {
        let resources = self.path_resources(path);
        self.reserve_resources(resources)
    }

    pub fn reserve_resources(
        &mut self,
        resources: Vec<Resource>,
    ) -> Result<ReservationToken, CapacityViolated> {
        let mut demand: BTreeMap<Resource, u32> = BTreeMap::new();
        for &r in &resources {
            *demand.entry(r).or_default() += 1;
        }
        for (&r, &extra) in &demand {
            let (load, cap) = match r {
                Resource::Channel(c) => (self.channel_load[c], self.channel_capacity),
                Resource::Junction(j) => (self.junction_load[j], self.junction_capacity),
            };
            if load.saturating_add(extra) > cap {
                return Err(CapacityViolated(r));
            }
        }
        for &r in &resources {
            *self.load_mut(r) += 1;
        }
        let token = ReservationToken(self.next_token);
        self.next_token += 1;
        self.reservations
            .insert(token, resources.into_iter().map(|r| (r, false)).collect());
        Ok(token)
    }

    fn load_mut(&mut self, r: Resource) -> &mut u32 {
        match r {
            Resource::Channel(c) => &mut self.channel_load[c],
            Resource::Junction(j) => &mut self.junction_load[j],
        }
    }

    /// Releases one held traversal of `resource` under `token`.
    pub fn release(
        &mut self,
        token: ReservationToken,
        resource: Resource,
    ) -> Result<(), ReleaseError> {
        let entries = self
            .reservations
            .get_mut(&token)
            .ok_or(ReleaseError::UnknownToken { token, resource })?;
        let mut seen = false;
        let slot = entries.iter_mut().find(|(r, released)| {
            seen |= *r == resource;
            *r == resource && !*released
        });
        match slot {
            Some(entry) => entry.1 = true,
            None if seen => return Err(ReleaseError::DoubleRelease { token, resource }),
            None => return Err(ReleaseError::UnknownToken { token, resource }),
        }
        if entries.iter().all(|(_, released)| *released) {
            self.reservations.remove(&token);
        }
        *self.load_mut(resource) -= 1;
        Ok(())
    }

    /// Releases whatever `token` still holds.
    pub fn release_all(&mut self, token: ReservationToken) {
        if let Some(entries) = self.reservations.remove(&token) {
            for (r, released) in entries {
                if !released {
                    *self.load_mut(r) -= 1;
                }
            }
        }
    }

    /// Checks that the occupancy counters match the outstanding reservations
    /// and respect capacity.
    pub fn audit(&self) -> Result<(), String> {
        let mut channel = vec![0u32; self.channel_load.len()];
        let mut junction = vec![0u32; self.junction_load.len()];
        for entries in self.reservations.values() {
            for &(r, released) in entries {
                if !released {
                    match r {
                        Resource::Channel(c) => channel[c] += 1,
                        Resource::Junction(j) => junction[j] += 1,
                    }
                }
            }
        }
        if channel != self.channel_load {
            return Err("channel occupancy does not match reservations".into());
        }
        if junction != self.junction_load {
            return Err("junction occupancy does not match reservations".into());
        }
        if channel.iter().any(|&n| n > self.channel_capacity) {
            return Err("channel over capacity".into());
        }
        if junction.iter().any(|&n| n > self.junction_capacity) {
            return Err("junction over capacity".into());
        }
        Ok(())
    }

    pub fn active_reservations(&self) -> usize {
        self.reservations.len()
    }

    /// Turn-blind view: each junction's two vertices merged into one, turn
    /// edges dropped. Returns the vertex count and the endpoint pairs of the
    /// remaining edges.
    pub fn collapsed(&self) -> (usize, Vec<(usize, usize)>) {
        let nj = self.junction_count;
        let merge = |v: VertexId| match self.vertices[v] {
            VertexKind::JunctionH(j) | VertexKind::JunctionV(j) => j,
            VertexKind::Trap(t) => nj + t,
        };
        let edges = self
            .edges
            .iter()
            .filter(|e| !matches!(e.kind, EdgeKind::Turn(_)))
            .map(|e| (merge(e.a), merge(e.b)))
            .collect();
        (self.vertices.len() - nj, edges)
    }
}
