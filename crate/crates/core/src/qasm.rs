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

//! QASM subset parser and the instruction dependency graph built from it.
//!
//! The accepted dialect is line oriented:
//!
//! ```text
//! # comment
//! QUBIT q0,0
//! QUBIT q3
//! H q0
//! C-X q3,q0
//! ```
//!
//! Gate names are case-insensitive. Two-qubit gates list the control
//! (source) operand first and the target (destination) second.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::tech::TechParams;
use crate::Micros;

/// Gate alphabet understood by the mapper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    CX,
    CY,
    CZ,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::CX,
        GateKind::CY,
        GateKind::CZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Y | GateKind::Z => 1,
            GateKind::CX | GateKind::CY | GateKind::CZ => 2,
        }
    }

    /// The gate that undoes `self`, if one is declared.
    pub fn inverse(self) -> Option<GateKind> {
        // Every gate in the alphabet is Hermitian and unitary.
        Some(self)
    }

    /// Spelling used in QASM listings.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::CX => "C-X",
            GateKind::CY => "C-Y",
            GateKind::CZ => "C-Z",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<GateKind> {
        let upper = s.to_ascii_uppercase();
        GateKind::ALL.into_iter().find(|g| g.mnemonic() == upper)
    }

    pub fn delay(self, tech: &TechParams) -> Micros {
        if self.arity() == 1 {
            tech.t_gate_1q
        } else {
            tech.t_gate_2q
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// Index of a declared qubit, in declaration order.
pub type QubitId = usize;

/// Index of an instruction, in program order.
pub type InstrId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub id: InstrId,
    pub gate: GateKind,
    /// One or two distinct qubits; for two-qubit gates `operands[0]` is the
    /// control and `operands[1]` the target.
    pub operands: Vec<QubitId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitDecl {
    pub name: String,
    pub init: Option<u8>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub qubits: Vec<QubitDecl>,
    pub instructions: Vec<Instruction>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QasmError {
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },
    #[error("line {line}: qubit `{name}` used before its QUBIT declaration")]
    UndeclaredQubit { line: usize, name: String },
    #[error("line {line}: qubit `{name}` declared twice")]
    DuplicateQubit { line: usize, name: String },
    #[error("line {line}: gate {gate} takes {expected} operand(s), found {found}")]
    ArityMismatch {
        line: usize,
        gate: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}

impl QasmError {
    pub fn line(&self) -> usize {
        match self {
            QasmError::UnknownGate { line, .. }
            | QasmError::UndeclaredQubit { line, .. }
            | QasmError::DuplicateQubit { line, .. }
            | QasmError::ArityMismatch { line, .. }
            | QasmError::MalformedLine { line, .. } => *line,
        }
    }
}

fn split_operands(rest: &str) -> Vec<&str> {
    rest.split(',').map(str::trim).collect()
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '[' || c == ']')
}

/// Parses a QASM listing. Line numbers in errors are 1-based.
pub fn parse_qasm(text: &str) -> Result<Program, QasmError> {
    let mut program = Program::default();
    let mut by_name: HashMap<String, QubitId> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (keyword, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (trimmed, ""),
        };
        let malformed = |reason: &str| QasmError::MalformedLine {
            line,
            reason: reason.to_string(),
        };

        if keyword.eq_ignore_ascii_case("QUBIT") {
            let parts = split_operands(rest);
            let name = parts[0];
            if !is_identifier(name) {
                return Err(malformed("QUBIT needs a qubit name"));
            }
            let init = match parts.len() {
                1 => None,
                2 => match parts[1] {
                    "0" => Some(0),
                    "1" => Some(1),
                    _ => return Err(malformed("QUBIT initial value must be 0 or 1")),
                },
                _ => {
                    return Err(malformed(
                        "QUBIT takes a name and an optional initial value",
                    ))
                }
            };
            if by_name.contains_key(name) {
                return Err(QasmError::DuplicateQubit {
                    line,
                    name: name.to_string(),
                });
            }
            by_name.insert(name.to_string(), program.qubits.len());
            program.qubits.push(QubitDecl {
                name: name.to_string(),
                init,
            });
            continue;
        }

        let gate = GateKind::from_mnemonic(keyword).ok_or_else(|| QasmError::UnknownGate {
            line,
            name: keyword.to_string(),
        })?;
        let names = if rest.is_empty() {
            Vec::new()
        } else {
            split_operands(rest)
        };
        if names.len() != gate.arity() {
            return Err(QasmError::ArityMismatch {
                line,
                gate,
                expected: gate.arity(),
                found: names.len(),
            });
        }
        let mut operands = Vec::with_capacity(names.len());
        for name in names {
            if !is_identifier(name) {
                return Err(malformed("empty or invalid operand"));
            }
            let q = *by_name
                .get(name)
                .ok_or_else(|| QasmError::UndeclaredQubit {
                    line,
                    name: name.to_string(),
                })?;
            if operands.contains(&q) {
                return Err(malformed("operands of a gate must be distinct"));
            }
            operands.push(q);
        }
        program.instructions.push(Instruction {
            id: program.instructions.len(),
            gate,
            operands,
        });
    }
    Ok(program)
}

impl Program {
    pub fn qubit_names(&self) -> Vec<String> {
        self.qubits.iter().map(|q| q.name.clone()).collect()
    }

    /// Renders the program in normalized QASM form.
    pub fn to_qasm(&self) -> String {
        let mut out = String::new();
        for q in &self.qubits {
            out.push_str("QUBIT ");
            out.push_str(&q.name);
            if let Some(v) = q.init {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        for ins in &self.instructions {
            out.push_str(ins.gate.mnemonic());
            out.push(' ');
            let ops: Vec<&str> = ins
                .operands
                .iter()
                .map(|&q| self.qubits[q].name.as_str())
                .collect();
            out.push_str(&ops.join(","));
            out.push('\n');
        }
        out
    }
}

/// Instruction dependency graph. Node `i` is instruction `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qidg {
    pub qubits: Vec<String>,
    pub instructions: Vec<Instruction>,
    preds: Vec<Vec<InstrId>>,
    succs: Vec<Vec<InstrId>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("instruction {id}: gate {gate} has no declared inverse")]
    NonInvertibleGate { id: InstrId, gate: GateKind },
}

/// Builds the dependency graph: each instruction depends on the latest
/// earlier instruction touching each of its operands.
pub fn build_qidg(program: &Program) -> Qidg {
    let n = program.instructions.len();
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    let mut last: Vec<Option<InstrId>> = vec![None; program.qubits.len()];
    for ins in &program.instructions {
        for &q in &ins.operands {
            if let Some(p) = last[q] {
                if !preds[ins.id].contains(&p) {
                    preds[ins.id].push(p);
                    succs[p].push(ins.id);
                }
            }
            last[q] = Some(ins.id);
        }
    }
    for list in preds.iter_mut().chain(succs.iter_mut()) {
        list.sort_unstable();
    }
    Qidg {
        qubits: program.qubit_names(),
        instructions: program.instructions.clone(),
        preds,
        succs,
    }
}

/// Reverses every edge and replaces each gate by its inverse.
pub fn invert_to_uidg(g: &Qidg) -> Result<Qidg, GraphError> {
    let instructions = g
        .instructions
        .iter()
        .map(|ins| {
            let gate = ins.gate.inverse().ok_or(GraphError::NonInvertibleGate {
                id: ins.id,
                gate: ins.gate,
            })?;
            Ok(Instruction {
                gate,
                ..ins.clone()
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Qidg {
        qubits: g.qubits.clone(),
        instructions,
        preds: g.succs.clone(),
        succs: g.preds.clone(),
    })
}

impl Qidg {
    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn preds(&self, id: InstrId) -> &[InstrId] {
        &self.preds[id]
    }

    pub fn succs(&self, id: InstrId) -> &[InstrId] {
        &self.succs[id]
    }

    pub fn edge_count(&self) -> usize {
        self.preds.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (InstrId, InstrId)> + '_ {
        self.succs
            .iter()
            .enumerate()
            .flat_map(|(from, to)| to.iter().map(move |&t| (from, t)))
    }

    /// Kahn order, smallest ready id first. Returns `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<InstrId>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<Reverse<InstrId>> = indeg
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| Reverse(i))
            .collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(Reverse(i)) = heap.pop() {
            order.push(i);
            for &s in &self.succs[i] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    heap.push(Reverse(s));
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }

    /// Rebuilds a program listing from the graph's instructions, in id order.
    pub fn to_program(&self) -> Program {
        Program {
            qubits: self
                .qubits
                .iter()
                .map(|name| QubitDecl {
                    name: name.clone(),
                    init: None,
                })
                .collect(),
            instructions: self.instructions.clone(),
        }
    }
}

/// Longest gate-delay path through the graph, with routing and congestion
/// taken as free.
pub fn ideal_latency(g: &Qidg, tech: &TechParams) -> Micros {
    let order = g
        .topological_order()
        .expect("dependency graph must be acyclic");
    let mut finish = vec![0; g.len()];
    let mut best = 0;
    for i in order {
        let start = g.preds(i).iter().map(|&p| finish[p]).max().unwrap_or(0);
        finish[i] = start + g.instructions[i].gate.delay(tech);
        best = best.max(finish[i]);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIVE_ONE_THREE: &str = "\
QUBIT q0,0
QUBIT q1,0
QUBIT q2,0
QUBIT q3
QUBIT q4,0
H q0
H q1
H q2
H q4
C-X q3,q2
C-Z q4,q2
C-Y q2,q1
C-Y q3,q1
C-X q4,q1
C-Z q2,q0
C-Y q3,q0
C-Z q4,q0
";

    #[test]
    fn parses_single_declaration_and_gate() {
        let p = parse_qasm("QUBIT q0,0\nH q0").unwrap();
        assert_eq!(p.qubits.len(), 1);
        assert_eq!(p.qubits[0].init, Some(0));
        assert_eq!(
            p.instructions,
            vec![Instruction {
                id: 0,
                gate: GateKind::H,
                operands: vec![0]
            }]
        );
    }

    #[test]
    fn empty_input_is_empty_program() {
        let p = parse_qasm("").unwrap();
        assert!(p.qubits.is_empty() && p.instructions.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_qasm("C-X q3,q2").unwrap_err(),
            QasmError::UndeclaredQubit {
                line: 1,
                name: "q3".into()
            }
        );
        let e = parse_qasm("QUBIT a\n\n# c\nSWAP a").unwrap_err();
        assert!(matches!(e, QasmError::UnknownGate { line: 4, .. }));
        let e = parse_qasm("QUBIT a\nQUBIT a").unwrap_err();
        assert!(matches!(e, QasmError::DuplicateQubit { line: 2, .. }));
        let e = parse_qasm("QUBIT a\nQUBIT b\nH a,b").unwrap_err();
        assert!(matches!(
            e,
            QasmError::ArityMismatch {
                line: 3,
                expected: 1,
                found: 2,
                ..
            }
        ));
        let e = parse_qasm("QUBIT a\nC-Z a,a").unwrap_err();
        assert!(matches!(e, QasmError::MalformedLine { line: 2, .. }));
        let e = parse_qasm("QUBIT a,7").unwrap_err();
        assert!(matches!(e, QasmError::MalformedLine { line: 1, .. }));
        assert_eq!(e.line(), 1);
    }

    #[test]
    fn gate_names_are_case_insensitive_and_commas_tolerate_spaces() {
        let p = parse_qasm("qubit a\nQUBIT b , 1\nc-y a , b\nh b").unwrap();
        assert_eq!(p.qubits[1].init, Some(1));
        assert_eq!(p.instructions[0].gate, GateKind::CY);
        assert_eq!(p.instructions[0].operands, vec![0, 1]);
        assert_eq!(p.to_qasm(), "QUBIT a\nQUBIT b,1\nC-Y a,b\nH b\n");
    }

    #[test]
    fn gate_table_is_consistent() {
        for g in GateKind::ALL {
            assert_eq!(GateKind::from_mnemonic(g.mnemonic()), Some(g));
            assert_eq!(g.inverse().and_then(GateKind::inverse), Some(g));
        }
        assert_eq!(GateKind::CZ.arity(), 2);
        assert_eq!(GateKind::Y.arity(), 1);
    }

    #[test]
    fn five_qubit_code_dependencies() {
        let g = build_qidg(&parse_qasm(FIVE_ONE_THREE).unwrap());
        assert_eq!(g.len(), 12);
        // Listing ids 12 (C-Y q2,q1), 11 (C-Z q4,q2) and 7 (H q1) sit at
        // positions 6, 5 and 1.
        assert_eq!(g.preds(6), &[1, 5]);
        // Listing id 18 is the last instruction and has no successors.
        assert!(g.succs(11).is_empty());
    }

    #[test]
    fn small_graphs() {
        let g = build_qidg(&parse_qasm("QUBIT a\nH a").unwrap());
        assert_eq!((g.len(), g.edge_count()), (1, 0));
        let g = build_qidg(&parse_qasm("QUBIT a\nQUBIT b\nH a\nX b").unwrap());
        assert_eq!((g.len(), g.edge_count()), (2, 0));
        // A repeated pair shares one edge, not two.
        let g = build_qidg(&parse_qasm("QUBIT a\nQUBIT b\nC-X a,b\nC-Z b,a").unwrap());
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn uidg_reverses_edges() {
        let g = build_qidg(&parse_qasm(FIVE_ONE_THREE).unwrap());
        let u = invert_to_uidg(&g).unwrap();
        assert!(u.preds(11).is_empty());
        // H q0 (listing id 6) is position 0.
        assert!(u.succs(0).is_empty());
        assert_eq!(invert_to_uidg(&u).unwrap(), g);
        let empty = build_qidg(&Program::default());
        assert!(invert_to_uidg(&empty).unwrap().is_empty());
    }

    #[test]
    fn ideal_latency_basics() {
        let tech = TechParams::default();
        let g = build_qidg(&parse_qasm("QUBIT a\nH a").unwrap());
        assert_eq!(ideal_latency(&g, &tech), 10);
        let g = build_qidg(&parse_qasm("QUBIT a\nQUBIT b\nQUBIT c\nC-X a,b\nC-Z b,c").unwrap());
        assert_eq!(ideal_latency(&g, &tech), 200);
        assert_eq!(ideal_latency(&build_qidg(&Program::default()), &tech), 0);
    }
}
