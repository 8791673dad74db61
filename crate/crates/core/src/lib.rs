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

//! Maps QASM programs onto ion-trap fabrics: list scheduling over the
//! instruction dependency graph, congestion-aware routing on a turn-aware
//! channel graph, event-driven simulation producing a micro-command trace,
//! and multi-start forward/backward initial placement.

pub mod cli;
pub mod compare;
pub mod fabric;
pub mod par;
pub mod placer;
pub mod qasm;
pub mod report;
pub mod router;
pub mod scheduler;
pub mod sim;
pub mod svg;
pub mod tech;

/// Time in microseconds.
pub type Micros = u64;
