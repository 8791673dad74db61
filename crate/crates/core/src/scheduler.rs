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

//! List scheduling over the dependency graph: static priorities, the ready
//! set, and the busy queue of instructions that could not be routed.

use std::collections::{BTreeSet, VecDeque};

use crate::qasm::{InstrId, Qidg};
use crate::tech::TechParams;
use crate::Micros;

#[derive(Clone, Debug, PartialEq)]
pub struct Priority {
    /// Number of transitive dependents.
    pub descendant_count: usize,
    /// Longest gate-delay path from this node (inclusive) to a sink.
    pub tail_delay: Micros,
    /// `alpha * descendant_count * t_gate_2q + beta * tail_delay`.
    pub combined: f64,
}

/// Computes the static issue priority of every node.
pub fn compute_priorities(g: &Qidg, tech: &TechParams, alpha: f64, beta: f64) -> Vec<Priority> {
    let n = g.len();
    let words = n.div_ceil(64);
    let order = g
        .topological_order()
        .expect("dependency graph must be acyclic");
    let mut reach = vec![vec![0u64; words]; n];
    let mut tail = vec![0; n];
    for &i in order.iter().rev() {
        let mut bits = vec![0u64; words];
        let mut longest = 0;
        for &s in g.succs(i) {
            bits[s / 64] |= 1 << (s % 64);
            for (w, r) in bits.iter_mut().zip(&reach[s]) {
                *w |= r;
            }
            longest = longest.max(tail[s]);
        }
        tail[i] = g.instructions[i].gate.delay(tech) + longest;
        reach[i] = bits;
    }
    (0..n)
        .map(|i| {
            let descendant_count = reach[i].iter().map(|w| w.count_ones() as usize).sum();
            Priority {
                descendant_count,
                tail_delay: tail[i],
                combined: alpha * (descendant_count as u64 * tech.t_gate_2q) as f64
                    + beta * tail[i] as f64,
            }
        })
        .collect()
}

/// Total issue order over the nodes; lower rank issues first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IssueOrder {
    rank: Vec<usize>,
}

impl IssueOrder {
    /// Highest combined priority first, smaller id on ties.
    pub fn from_priorities(priorities: &[Priority]) -> IssueOrder {
        let mut ids: Vec<InstrId> = (0..priorities.len()).collect();
        ids.sort_by(|&a, &b| {
            priorities[b]
                .combined
                .total_cmp(&priorities[a].combined)
                .then(a.cmp(&b))
        });
        IssueOrder::from_sequence(&ids)
    }

    pub fn from_sequence(sequence: &[InstrId]) -> IssueOrder {
        let mut rank = vec![0; sequence.len()];
        for (r, &id) in sequence.iter().enumerate() {
            rank[id] = r;
        }
        IssueOrder { rank }
    }

    /// The same order read backwards.
    pub fn reversed(&self) -> IssueOrder {
        let last = self.rank.len().saturating_sub(1);
        IssueOrder {
            rank: self.rank.iter().map(|r| last - r).collect(),
        }
    }

    pub fn rank(&self, id: InstrId) -> usize {
        self.rank[id]
    }

    pub fn sequence(&self) -> Vec<InstrId> {
        let mut ids: Vec<InstrId> = (0..self.rank.len()).collect();
        ids.sort_by_key(|&i| self.rank[i]);
        ids
    }
}

/// Nodes not yet completed or in flight whose predecessors have all completed.
pub fn ready_set(
    g: &Qidg,
    completed: &BTreeSet<InstrId>,
    in_flight: &BTreeSet<InstrId>,
) -> BTreeSet<InstrId> {
    (0..g.len())
        .filter(|i| !completed.contains(i) && !in_flight.contains(i))
        .filter(|&i| g.preds(i).iter().all(|p| completed.contains(p)))
        .collect()
}

/// FIFO of ready instructions that failed to route.
#[derive(Clone, Debug, Default)]
pub struct BusyQueue {
    entries: VecDeque<(InstrId, Micros)>,
    retry: VecDeque<InstrId>,
}

impl BusyQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: InstrId) -> bool {
        self.entries.iter().any(|&(e, _)| e == id)
    }

    /// Parks `id`; returns false if it was already parked.
    pub fn enqueue(&mut self, id: InstrId, now: Micros) -> bool {
        if self.contains(id) {
            return false;
        }
        self.entries.push_back((id, now));
        true
    }

    pub fn enqueued_at(&self, id: InstrId) -> Option<Micros> {
        self.entries
            .iter()
            .find(|&&(e, _)| e == id)
            .map(|&(_, t)| t)
    }

    /// Makes every parked instruction a retry candidate, in FIFO order.
    pub fn mark_retry_eligible(&mut self) {
        self.retry = self.entries.iter().map(|&(id, _)| id).collect();
    }

    pub fn retry_pending(&self) -> bool {
        !self.retry.is_empty()
    }

    /// Records the outcome of retrying the head candidate.
    pub fn finish_retry(&mut self, id: InstrId, routed: bool) {
        if self.retry.front() == Some(&id) {
            self.retry.pop_front();
        }
        if routed {
            self.entries.retain(|&(e, _)| e != id);
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = InstrId> + '_ {
        self.entries.iter().map(|&(id, _)| id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pick {
    /// Head of the busy queue, retried after a resource was freed.
    Retry(InstrId),
    /// Best ready instruction not parked in the busy queue.
    Fresh(InstrId),
}

impl Pick {
    pub fn id(self) -> InstrId {
        match self {
            Pick::Retry(id) | Pick::Fresh(id) => id,
        }
    }
}

/// Chooses the next instruction to try: pending busy-queue retries first,
/// then the fresh ready node with the lowest rank.
pub fn pick_next(ready: &BTreeSet<InstrId>, order: &IssueOrder, busy: &BusyQueue) -> Option<Pick> {
    if let Some(&id) = busy.retry.front() {
        return Some(Pick::Retry(id));
    }
    ready
        .iter()
        .copied()
        .filter(|&id| !busy.contains(id))
        .min_by_key(|&id| (order.rank(id), id))
        .map(Pick::Fresh)
}
