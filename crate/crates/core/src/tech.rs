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

//! Technology parameters and their `key = value` config file.

use std::fmt;

use thiserror::Error;

use crate::Micros;

/// Capacity used when a config asks for unbounded channels or junctions.
pub const UNBOUNDED: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct TechParams {
    /// Delay of a one-cell move.
    pub t_move: Micros,
    /// Delay of a direction change at a junction.
    pub t_turn: Micros,
    pub t_gate_1q: Micros,
    pub t_gate_2q: Micros,
    /// Qubits allowed concurrently in one channel.
    pub channel_capacity: u32,
    /// Qubits allowed concurrently through one junction.
    pub junction_capacity: u32,
    /// Weight of the descendant count in the issue priority.
    pub priority_alpha: f64,
    /// Weight of the tail delay in the issue priority.
    pub priority_beta: f64,
}

impl Default for TechParams {
    fn default() -> Self {
        TechParams {
            t_move: 1,
            t_turn: 10,
            t_gate_1q: 10,
            t_gate_2q: 100,
            channel_capacity: 2,
            junction_capacity: 2,
            priority_alpha: 1.0,
            priority_beta: 1.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TechError {
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("{0}")]
    Invalid(String),
}

const KEYS: [&str; 8] = [
    "t_move_us",
    "t_turn_us",
    "t_gate_1q_us",
    "t_gate_2q_us",
    "channel_capacity",
    "junction_capacity",
    "priority_alpha",
    "priority_beta",
];

impl TechParams {
    /// Parameters that make routing free and congestion impossible.
    pub fn ideal(&self) -> TechParams {
        TechParams {
            t_move: 0,
            t_turn: 0,
            channel_capacity: UNBOUNDED,
            junction_capacity: UNBOUNDED,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), TechError> {
        if self.t_gate_1q == 0 || self.t_gate_2q == 0 {
            return Err(TechError::Invalid("gate delays must be positive".into()));
        }
        if self.t_turn > 0 && self.t_move == 0 {
            return Err(TechError::Invalid(
                "t_turn_us must be 0 when t_move_us is 0".into(),
            ));
        }
        if self.channel_capacity == 0 || self.junction_capacity == 0 {
            return Err(TechError::Invalid("capacities must be at least 1".into()));
        }
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !finite_nonneg(self.priority_alpha) || !finite_nonneg(self.priority_beta) {
            return Err(TechError::Invalid(
                "priority weights must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Parses a config file. Keys not given keep their default values;
    /// `channel_capacity = inf` requests an unbounded capacity.
    pub fn parse(text: &str) -> Result<TechParams, TechError> {
        let mut tech = TechParams::default();
        let mut seen = [false; KEYS.len()];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(TechError::Malformed { line })?;
            let slot =
                KEYS.iter()
                    .position(|k| *k == key)
                    .ok_or_else(|| TechError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })?;
            if std::mem::replace(&mut seen[slot], true) {
                return Err(TechError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            let bad = || TechError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            };
            let micros = || value.parse::<Micros>().map_err(|_| bad());
            let capacity = || {
                if value.eq_ignore_ascii_case("inf") {
                    Ok(UNBOUNDED)
                } else {
                    value.parse::<u32>().map_err(|_| bad())
                }
            };
            let weight = || value.parse::<f64>().map_err(|_| bad());
            match key {
                "t_move_us" => tech.t_move = micros()?,
                "t_turn_us" => tech.t_turn = micros()?,
                "t_gate_1q_us" => tech.t_gate_1q = micros()?,
                "t_gate_2q_us" => tech.t_gate_2q = micros()?,
                "channel_capacity" => tech.channel_capacity = capacity()?,
                "junction_capacity" => tech.junction_capacity = capacity()?,
                "priority_alpha" => tech.priority_alpha = weight()?,
                "priority_beta" => tech.priority_beta = weight()?,
                _ => unreachable!(),
            }
        }
        tech.validate()?;
        Ok(tech)
    }
}

impl fmt::Display for TechParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cap = |c: u32| {
            if c == UNBOUNDED {
                "inf".to_string()
            } else {
                c.to_string()
            }
        };
        writeln!(f, "t_move_us = {}", self.t_move)?;
        writeln!(f, "t_turn_us = {}", self.t_turn)?;
        writeln!(f, "t_gate_1q_us = {}", self.t_gate_1q)?;
        writeln!(f, "t_gate_2q_us = {}", self.t_gate_2q)?;
        writeln!(f, "channel_capacity = {}", cap(self.channel_capacity))?;
        writeln!(f, "junction_capacity = {}", cap(self.junction_capacity))?;
        writeln!(f, "priority_alpha = {}", self.priority_alpha)?;
        writeln!(f, "priority_beta = {}", self.priority_beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# experimental setup
t_move_us = 1
t_turn_us = 10
t_gate_1q_us = 10
t_gate_2q_us = 100
channel_capacity = 2
junction_capacity = 2
priority_alpha = 0.5   # descendant weight
priority_beta = 1
";
        let t = TechParams::parse(text).unwrap();
        assert_eq!(t.priority_alpha, 0.5);
        assert_eq!(t.t_gate_2q, 100);
        assert_eq!(TechParams::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert_eq!(
            TechParams::parse("t_move_us = 1\nspeed = 3").unwrap_err(),
            TechError::UnknownKey {
                line: 2,
                key: "speed".into()
            }
        );
        assert!(matches!(
            TechParams::parse("t_move_us = 1\nt_move_us = 2"),
            Err(TechError::DuplicateKey { line: 2, .. })
        ));
        assert!(matches!(
            TechParams::parse("t_move_us 1"),
            Err(TechError::Malformed { line: 1 })
        ));
        assert!(matches!(
            TechParams::parse("channel_capacity = -1"),
            Err(TechError::BadValue { line: 1, .. })
        ));
        assert!(TechParams::parse("channel_capacity = 0").is_err());
        assert!(TechParams::parse("t_gate_1q_us = 0").is_err());
    }

    #[test]
    fn unbounded_capacity_round_trips() {
        let t = TechParams::parse("channel_capacity = inf\nt_move_us = 0\nt_turn_us = 0").unwrap();
        assert_eq!(t.channel_capacity, UNBOUNDED);
        assert_eq!(TechParams::parse(&t.to_string()).unwrap(), t);
        assert_eq!(TechParams::default().ideal().t_move, 0);
    }
}
