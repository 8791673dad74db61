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

//! JSON run report: placer settings, best latency against the ideal
//! baseline, and the per-instruction gate/routing/congestion split.

use serde::Serialize;

use crate::fabric::Coord;
use crate::placer::{Direction, PlacerOutcome};
use crate::sim::DerivedTiming;
use crate::Micros;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacerKind {
    Center,
    Mc,
    Mvfb,
}

impl PlacerKind {
    pub fn label(self) -> &'static str {
        match self {
            PlacerKind::Center => "center",
            PlacerKind::Mc => "mc",
            PlacerKind::Mvfb => "mvfb",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QubitSite {
    pub qubit: String,
    pub trap: Coord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BestRun {
    pub seed: usize,
    pub run: usize,
    pub direction: Direction,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub t_gate_us: Micros,
    pub t_routing_us: Micros,
    pub t_congestion_us: Micros,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub benchmark: String,
    pub placer: PlacerKind,
    pub seeds: usize,
    pub patience: usize,
    pub rng_seed: u64,
    /// Placement runs simulated in total.
    pub total_runs: usize,
    pub best_latency_us: Micros,
    pub baseline_latency_us: Micros,
    pub overhead_us: Micros,
    pub best_run: BestRun,
    pub initial_placement: Vec<QubitSite>,
    pub final_placement: Vec<QubitSite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
    pub totals: Totals,
    pub breakdown: Vec<DerivedTiming>,
}

pub struct ReportInput<'a> {
    pub benchmark: &'a str,
    pub placer: PlacerKind,
    pub seeds: usize,
    pub patience: usize,
    pub rng_seed: u64,
    pub baseline: Micros,
    pub wall_clock_ms: Option<f64>,
}

fn sites(names: &[String], traps: &[Coord]) -> Vec<QubitSite> {
    names
        .iter()
        .zip(traps)
        .map(|(qubit, &trap)| QubitSite {
            qubit: qubit.clone(),
            trap,
        })
        .collect()
}

impl RunReport {
    pub fn new(
        input: ReportInput<'_>,
        outcome: &PlacerOutcome,
        breakdown: Vec<DerivedTiming>,
    ) -> RunReport {
        let trace = &outcome.trace;
        let totals = breakdown.iter().fold(Totals::default(), |mut t, d| {
            t.t_gate_us += d.t_gate_us;
            t.t_routing_us += d.t_routing_us;
            t.t_congestion_us += d.t_congestion_us;
            t
        });
        let latency = outcome.latency();
        RunReport {
            benchmark: input.benchmark.to_string(),
            placer: input.placer,
            seeds: input.seeds,
            patience: input.patience,
            rng_seed: input.rng_seed,
            total_runs: outcome.total_runs(),
            best_latency_us: latency,
            baseline_latency_us: input.baseline,
            overhead_us: latency.saturating_sub(input.baseline),
            best_run: BestRun {
                seed: outcome.best.seed,
                run: outcome.best.run,
                direction: outcome.best.direction,
            },
            initial_placement: sites(&trace.qubits, trace.initial_placement.as_slice()),
            final_placement: sites(&trace.qubits, trace.final_placement.as_slice()),
            wall_clock_ms: input.wall_clock_ms,
            totals,
            breakdown,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
