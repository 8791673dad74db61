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

//! Head-to-head trials of the multi-start forward/backward placer against
//! Monte Carlo placement with twice its placement-run budget.

use std::fmt::Write as _;

use serde::Serialize;

use crate::par::Exec;
use crate::placer::{monte_carlo_place, mvfb_place, PlacerError, Problem};
use crate::Micros;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompareTrial {
    pub trial: usize,
    pub rng_seed: u64,
    pub mvfb_us: Micros,
    pub mc_us: Micros,
    /// Placement runs the multi-start placer used.
    pub mvfb_runs: usize,
    /// Placement runs given to Monte Carlo, always twice `mvfb_runs`.
    pub mc_runs: usize,
}

impl CompareTrial {
    pub fn mvfb_wins(&self) -> bool {
        self.mvfb_us <= self.mc_us
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareSummary {
    pub seeds: usize,
    pub patience: usize,
    pub trials: Vec<CompareTrial>,
}

impl CompareSummary {
    /// Fraction of trials where the multi-start placer is at least as good.
    pub fn win_rate(&self) -> f64 {
        let wins = self.trials.iter().filter(|t| t.mvfb_wins()).count();
        wins as f64 / self.trials.len().max(1) as f64
    }

    pub fn mean_mvfb(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.mvfb_us))
    }

    pub fn mean_mc(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.mc_us))
    }

    pub fn to_table(&self) -> String {
        let mut s = String::from("trial  rng_seed  mvfb_us  mc_us  mvfb_runs  mc_runs\n");
        for t in &self.trials {
            let _ = writeln!(
                s,
                "{:>5}  {:>8}  {:>7}  {:>5}  {:>9}  {:>7}",
                t.trial, t.rng_seed, t.mvfb_us, t.mc_us, t.mvfb_runs, t.mc_runs
            );
        }
        let _ = writeln!(
            s,
            "win_rate {:.3}  mean_mvfb_us {:.1}  mean_mc_us {:.1}",
            self.win_rate(),
            self.mean_mvfb(),
            self.mean_mc()
        );
        s
    }
}

fn mean(values: impl Iterator<Item = Micros>) -> f64 {
    let (sum, n) = values.fold((0u64, 0u64), |(s, n), v| (s + v, n + 1));
    sum as f64 / n.max(1) as f64
}

/// Seed of trial `i` derived from the base seed.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

pub fn compare(
    problem: &Problem,
    seeds: usize,
    patience: usize,
    trials: usize,
    rng_seed: u64,
    exec: Exec,
) -> Result<CompareSummary, PlacerError> {
    let results = exec.map(trials, |trial| {
        let seed = trial_seed(rng_seed, trial);
        let mvfb = mvfb_place(problem, seeds, patience, seed, Exec::Sequential)?;
        let budget = 2 * mvfb.total_runs();
        let mc = monte_carlo_place(problem, budget, seed, Exec::Sequential)?;
        assert_eq!(
            mc.total_runs(),
            budget,
            "Monte Carlo budget must be twice the multi-start run count"
        );
        Ok(CompareTrial {
            trial,
            rng_seed: seed,
            mvfb_us: mvfb.latency(),
            mc_us: mc.latency(),
            mvfb_runs: mvfb.total_runs(),
            mc_runs: mc.total_runs(),
        })
    });
    Ok(CompareSummary {
        seeds,
        patience,
        trials: results.into_iter().collect::<Result<_, PlacerError>>()?,
    })
}
