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

#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trapmap::fabric::Fabric;
use trapmap::qasm::{build_qidg, parse_qasm, Program, Qidg};
use trapmap::tech::TechParams;

/// Benchmarks shipped under assets/qasm, smallest first.
pub const BENCHMARKS: [&str; 6] = [
    "five_one_three",
    "seven_one_three",
    "nine_one_three",
    "fourteen_eight_three",
    "nineteen_one_seven",
    "twentythree_one_seven",
];

pub fn asset(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../assets")
        .join(rel)
}

pub fn read_asset(rel: &str) -> String {
    std::fs::read_to_string(asset(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn benchmark(name: &str) -> Program {
    parse_qasm(&read_asset(&format!("qasm/{name}.qasm"))).unwrap()
}

pub fn benchmark_qidg(name: &str) -> Qidg {
    build_qidg(&benchmark(name))
}

pub fn big_fabric() -> Fabric {
    Fabric::parse(&read_asset("fabrics/grid45x85.fab")).unwrap()
}

pub fn default_tech() -> TechParams {
    TechParams::parse(&read_asset("tech/default.cfg")).unwrap()
}

/// Street tiling like the benchmark fabric: `streets` horizontal streets
/// four rows apart, a trap above and below every other street junction,
/// three-cell vertical channels every fourth column.
pub fn street_fabric(streets: usize, blocks: usize) -> Fabric {
    let rows = 4 * streets + 1;
    let cols = 4 * blocks + 1;
    let mut g = vec![vec!['.'; cols]; rows];
    for s in 0..streets {
        let r = 4 * s + 2;
        for (c, cell) in g[r].iter_mut().enumerate() {
            *cell = if c % 2 == 0 { 'J' } else { 'C' };
        }
        for c in (2..cols).step_by(4) {
            g[r - 1][c] = 'T';
            g[r + 1][c] = 'T';
        }
        if s + 1 < streets {
            for c in (0..cols).step_by(4) {
                for dr in 1..=3 {
                    g[r + dr][c] = 'C';
                }
            }
        }
    }
    let text: String = g
        .iter()
        .map(|row| row.iter().collect::<String>() + "\n")
        .collect();
    Fabric::parse(&text).unwrap()
}

const GATES_1Q: [&str; 4] = ["H", "X", "Y", "Z"];
const GATES_2Q: [&str; 3] = ["C-X", "C-Y", "C-Z"];

/// Random program text with 2..=max_qubits qubits and 1..=max_instructions
/// instructions.
pub fn random_qasm(rng: &mut ChaCha8Rng, max_qubits: usize, max_instructions: usize) -> String {
    let n = rng.gen_range(2..=max_qubits);
    let m = rng.gen_range(1..=max_instructions);
    let mut text = String::new();
    for q in 0..n {
        if rng.gen_bool(0.5) {
            text.push_str(&format!("QUBIT q{q},0\n"));
        } else {
            text.push_str(&format!("QUBIT q{q}\n"));
        }
    }
    let qubits: Vec<usize> = (0..n).collect();
    for _ in 0..m {
        if rng.gen_bool(0.6) {
            let pair: Vec<&usize> = qubits.choose_multiple(rng, 2).collect();
            let gate = GATES_2Q[rng.gen_range(0..GATES_2Q.len())];
            text.push_str(&format!("{gate} q{},q{}\n", pair[0], pair[1]));
        } else {
            let gate = GATES_1Q[rng.gen_range(0..GATES_1Q.len())];
            text.push_str(&format!("{gate} q{}\n", rng.gen_range(0..n)));
        }
    }
    text
}

/// `count` random programs drawn from a fixed seed.
pub fn random_programs(
    seed: u64,
    count: usize,
    max_qubits: usize,
    max_instructions: usize,
) -> Vec<Qidg> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            build_qidg(&parse_qasm(&random_qasm(&mut rng, max_qubits, max_instructions)).unwrap())
        })
        .collect()
}
