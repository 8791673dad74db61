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

//! Initial qubit placement: deterministic center placement, Monte Carlo
//! search over center permutations, and the multi-start forward/backward
//! placer that alternates runs of the program and its uncompute graph.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fabric::{Coord, Fabric};
use crate::par::Exec;
use crate::qasm::{invert_to_uidg, GraphError, Qidg, QubitId};
use crate::scheduler::{compute_priorities, IssueOrder};
use crate::sim::{self, SimError, Trace};
use crate::tech::TechParams;
use crate::Micros;

/// Trap of every qubit, indexed by qubit id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Placement(Vec<Coord>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlacementError {
    #[error("placement covers {actual} qubits, expected {expected}")]
    WrongLength { expected: usize, actual: usize },
    #[error("qubit {qubit} placed on {at}, which is not a trap")]
    NotATrap { qubit: QubitId, at: Coord },
    #[error("trap {at} holds more than {capacity} qubits")]
    TrapOverfull { at: Coord, capacity: usize },
}

impl Placement {
    pub fn new(traps: Vec<Coord>) -> Self {
        Placement(traps)
    }

    pub fn as_slice(&self) -> &[Coord] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, q: QubitId) -> Coord {
        self.0[q]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<Coord> = self.0.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Checks length, that every qubit sits in a trap, and that no trap holds
    /// more than `trap_capacity` qubits.
    pub fn check(
        &self,
        fabric: &Fabric,
        qubits: usize,
        trap_capacity: usize,
    ) -> Result<(), PlacementError> {
        if self.0.len() != qubits {
            return Err(PlacementError::WrongLength {
                expected: qubits,
                actual: self.0.len(),
            });
        }
        let mut count = vec![0usize; fabric.traps().len()];
        for (qubit, &at) in self.0.iter().enumerate() {
            let t = fabric
                .trap_index(at)
                .ok_or(PlacementError::NotATrap { qubit, at })?;
            count[t] += 1;
            if count[t] > trap_capacity {
                return Err(PlacementError::TrapOverfull {
                    at,
                    capacity: trap_capacity,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlacerError {
    #[error("{needed} qubits but only {available} traps")]
    InsufficientTraps { needed: usize, available: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Traps ordered by distance to the grid center, row-major on ties.
pub fn center_traps(fabric: &Fabric) -> Vec<Coord> {
    let (cr, cc) = fabric.center_doubled();
    let mut traps = fabric.traps().to_vec();
    traps.sort_by_key(|t| {
        let dr = 2 * t.row as i64 - cr;
        let dc = 2 * t.col as i64 - cc;
        (dr * dr + dc * dc, *t)
    });
    traps
}

fn nearest_traps(fabric: &Fabric, n: usize) -> Result<Vec<Coord>, PlacerError> {
    let traps = center_traps(fabric);
    if traps.len() < n {
        return Err(PlacerError::InsufficientTraps {
            needed: n,
            available: traps.len(),
        });
    }
    Ok(traps[..n].to_vec())
}

/// Qubits in declaration order on the traps nearest the center.
pub fn center_placement(fabric: &Fabric, qubits: usize) -> Result<Placement, PlacerError> {
    nearest_traps(fabric, qubits).map(Placement)
}

/// A random assignment of the qubits to the same center-nearest trap set.
pub fn random_center_placement(
    fabric: &Fabric,
    qubits: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Placement, PlacerError> {
    let mut traps = nearest_traps(fabric, qubits)?;
    traps.shuffle(rng);
    Ok(Placement(traps))
}

const MC_STREAM: u64 = 0x4d43;
const MVFB_STREAM: u64 = 0x4d56_4642;

/// Generator for item `index` of a stream. Each item gets its own
/// generator so results do not depend on evaluation order or on how many
/// items are drawn.
pub fn stream_rng(seed: u64, stream: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos((index as u128) << 20);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// One simulated placement run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlacerRunRecord {
    /// Multi-start seed (or Monte Carlo draw) that produced the run.
    pub seed: usize,
    /// Position of the run within its seed.
    pub run: usize,
    pub direction: Direction,
    pub initial: Placement,
    #[serde(rename = "final")]
    pub final_placement: Placement,
    pub latency_us: Micros,
}

/// A program bound to a fabric and technology, ready to simulate in either
/// direction.
#[derive(Clone, Debug)]
pub struct Problem {
    pub qidg: Qidg,
    pub uidg: Qidg,
    pub fabric: Fabric,
    pub tech: TechParams,
    forward: IssueOrder,
    backward: IssueOrder,
}

impl Problem {
    pub fn new(qidg: Qidg, fabric: Fabric, tech: TechParams) -> Result<Problem, PlacerError> {
        let uidg = invert_to_uidg(&qidg)?;
        let prios = compute_priorities(&qidg, &tech, tech.priority_alpha, tech.priority_beta);
        let forward = IssueOrder::from_priorities(&prios);
        let backward = forward.reversed();
        Ok(Problem {
            qidg,
            uidg,
            fabric,
            tech,
            forward,
            backward,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.qidg.num_qubits()
    }

    pub fn order(&self, direction: Direction) -> &IssueOrder {
        match direction {
            Direction::Forward => &self.forward,
            Direction::Backward => &self.backward,
        }
    }

    pub fn graph(&self, direction: Direction) -> &Qidg {
        match direction {
            Direction::Forward => &self.qidg,
            Direction::Backward => &self.uidg,
        }
    }

    pub fn simulate(&self, direction: Direction, p0: &Placement) -> Result<Trace, SimError> {
        sim::run(
            self.graph(direction),
            self.order(direction),
            p0,
            &self.fabric,
            &self.tech,
        )
    }
}

/// Result of a placer: the reported solution and the full run history.
#[derive(Clone, Debug)]
pub struct PlacerOutcome {
    /// Run with the smallest latency (earliest on ties).
    pub best: PlacerRunRecord,
    /// Initial placement of the reported solution.
    pub placement: Placement,
    /// Forward-time trace of the reported solution, valid against the
    /// program's dependency graph.
    pub trace: Trace,
    pub runs: Vec<PlacerRunRecord>,
}

impl PlacerOutcome {
    pub fn latency(&self) -> Micros {
        self.best.latency_us
    }

    pub fn total_runs(&self) -> usize {
        self.runs.len()
    }
}

struct Candidate {
    record: PlacerRunRecord,
    trace: Trace,
}

fn keep_better(best: &mut Option<Candidate>, record: &PlacerRunRecord, trace: &Trace) {
    if best
        .as_ref()
        .is_none_or(|b| record.latency_us < b.record.latency_us)
    {
        *best = Some(Candidate {
            record: record.clone(),
            trace: trace.clone(),
        });
    }
}

fn finish(problem: &Problem, best: Candidate, runs: Vec<PlacerRunRecord>) -> PlacerOutcome {
    let (placement, trace) = match best.record.direction {
        Direction::Forward => (best.record.initial.clone(), best.trace),
        Direction::Backward => (
            best.record.final_placement.clone(),
            best.trace.time_reversed(&problem.tech),
        ),
    };
    PlacerOutcome {
        best: best.record,
        placement,
        trace,
        runs,
    }
}

fn merge(
    problem: &Problem,
    parts: Vec<Result<(Candidate, Vec<PlacerRunRecord>), PlacerError>>,
) -> Result<PlacerOutcome, PlacerError> {
    let mut best: Option<Candidate> = None;
    let mut runs = Vec::new();
    for part in parts {
        let (cand, recs) = part?;
        if best
            .as_ref()
            .is_none_or(|b| cand.record.latency_us < b.record.latency_us)
        {
            best = Some(cand);
        }
        runs.extend(recs);
    }
    let best = best.expect("at least one run");
    Ok(finish(problem, best, runs))
}

fn record(
    seed: usize,
    run: usize,
    direction: Direction,
    initial: &Placement,
    trace: &Trace,
) -> PlacerRunRecord {
    PlacerRunRecord {
        seed,
        run,
        direction,
        initial: initial.clone(),
        final_placement: trace.final_placement.clone(),
        latency_us: trace.total_latency,
    }
}

/// One forward run from the deterministic center placement.
pub fn center_place(problem: &Problem) -> Result<PlacerOutcome, PlacerError> {
    let p0 = center_placement(&problem.fabric, problem.num_qubits())?;
    let trace = problem.simulate(Direction::Forward, &p0)?;
    let rec = record(0, 0, Direction::Forward, &p0, &trace);
    Ok(finish(
        problem,
        Candidate {
            record: rec.clone(),
            trace,
        },
        vec![rec],
    ))
}

/// Best of `runs` forward runs from random center permutations.
pub fn monte_carlo_place(
    problem: &Problem,
    runs: usize,
    rng_seed: u64,
    exec: Exec,
) -> Result<PlacerOutcome, PlacerError> {
    assert!(runs >= 1, "at least one run");
    let parts = exec.map(runs, |i| {
        let mut rng = stream_rng(rng_seed, MC_STREAM, i);
        let p0 = random_center_placement(&problem.fabric, problem.num_qubits(), &mut rng)?;
        let trace = problem.simulate(Direction::Forward, &p0)?;
        let rec = record(i, 0, Direction::Forward, &p0, &trace);
        Ok((
            Candidate {
                record: rec.clone(),
                trace,
            },
            vec![rec],
        ))
    });
    merge(problem, parts)
}

/// No-improvement stopping rule of one multi-start seed.
#[derive(Clone, Debug)]
pub struct SeedProgress {
    patience: usize,
    best: Option<Micros>,
    stale: usize,
}

impl SeedProgress {
    pub fn new(patience: usize) -> Self {
        assert!(patience >= 1, "patience must be at least 1");
        SeedProgress {
            patience,
            best: None,
            stale: 0,
        }
    }

    /// Records a run's latency; returns whether the seed should continue.
    pub fn observe(&mut self, latency: Micros) -> bool {
        if self.best.is_none_or(|b| latency < b) {
            self.best = Some(latency);
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        self.stale < self.patience
    }

    pub fn best(&self) -> Option<Micros> {
        self.best
    }
}

/// Multi-start forward/backward placement. Each seed starts from a random
/// center permutation with a forward run; every later run starts from the
/// final placement of the run before it, alternating direction, until
/// `patience` consecutive runs fail to improve on the seed's best.
pub fn mvfb_place(
    problem: &Problem,
    seeds: usize,
    patience: usize,
    rng_seed: u64,
    exec: Exec,
) -> Result<PlacerOutcome, PlacerError> {
    assert!(seeds >= 1, "at least one seed");
    let parts = exec.map(seeds, |s| mvfb_seed(problem, s, patience, rng_seed));
    merge(problem, parts)
}

fn mvfb_seed(
    problem: &Problem,
    seed: usize,
    patience: usize,
    rng_seed: u64,
) -> Result<(Candidate, Vec<PlacerRunRecord>), PlacerError> {
    let mut rng = stream_rng(rng_seed, MVFB_STREAM, seed);
    let mut placement = random_center_placement(&problem.fabric, problem.num_qubits(), &mut rng)?;
    let mut direction = Direction::Forward;
    let mut progress = SeedProgress::new(patience);
    let mut best = None;
    let mut runs = Vec::new();
    loop {
        let trace = problem.simulate(direction, &placement)?;
        let rec = record(seed, runs.len(), direction, &placement, &trace);
        keep_better(&mut best, &rec, &trace);
        let go_on = progress.observe(rec.latency_us);
        runs.push(rec);
        if !go_on {
            break;
        }
        placement = trace.final_placement;
        direction = direction.flipped();
    }
    Ok((best.expect("at least one run"), runs))
}
