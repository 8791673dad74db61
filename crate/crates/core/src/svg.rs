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

//! SVG rendering of a fabric with qubit positions and optional route
//! overlays.

use std::fmt::Write as _;

use crate::fabric::{CellKind, Coord, Fabric};
use crate::qasm::InstrId;
use crate::sim::{CommandKind, Trace};

const CELL: usize = 12;
const ROUTE_COLORS: [&str; 2] = ["#d62728", "#1f77b4"];

fn center(at: Coord) -> (usize, usize) {
    (at.col * CELL + CELL / 2, at.row * CELL + CELL / 2)
}

/// Cell path walked by each operand of `instruction` on its way to the gate.
pub fn operand_routes(trace: &Trace, instruction: InstrId) -> Vec<Vec<Coord>> {
    let Some(start) = trace.commands.iter().position(
        |c| matches!(&c.kind, CommandKind::GateStart { instruction: i, .. } if *i == instruction),
    ) else {
        return Vec::new();
    };
    let CommandKind::GateStart { operands, .. } = &trace.commands[start].kind else {
        unreachable!()
    };
    operands
        .iter()
        .map(|&q| {
            let mut cells: Vec<Coord> = Vec::new();
            for cmd in trace.commands[..start].iter().rev() {
                match &cmd.kind {
                    CommandKind::Move { qubit, from, to } if *qubit == q => {
                        if cells.is_empty() {
                            cells.push(*to);
                        }
                        cells.push(*from);
                    }
                    CommandKind::GateStart { operands, .. } if operands.contains(&q) => break,
                    _ => {}
                }
            }
            cells.reverse();
            cells
        })
        .collect()
}

/// Draws the grid, the trace's final qubit positions and, when `route` is
/// given, the paths the operands of that instruction took.
pub fn render(fabric: &Fabric, trace: &Trace, route: Option<InstrId>) -> String {
    let (w, h) = (fabric.cols() * CELL, fabric.rows() * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
    for row in 0..fabric.rows() {
        for col in 0..fabric.cols() {
            let fill = match fabric.cell(Coord::new(row, col)) {
                CellKind::Junction => "#555555",
                CellKind::Channel => "#bbbbbb",
                CellKind::Trap => "#f2c14e",
                CellKind::Empty => continue,
            };
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}"/>"#,
                col * CELL,
                row * CELL
            );
        }
    }
    if let Some(id) = route {
        for (k, cells) in operand_routes(trace, id).iter().enumerate() {
            if cells.len() < 2 {
                continue;
            }
            let points: Vec<String> = cells
                .iter()
                .map(|&c| {
                    let (x, y) = center(c);
                    format!("{x},{y}")
                })
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="3"/>"#,
                points.join(" "),
                ROUTE_COLORS[k % ROUTE_COLORS.len()]
            );
        }
    }
    let mut seen: Vec<(Coord, usize)> = Vec::new();
    for (q, &at) in trace.final_placement.as_slice().iter().enumerate() {
        let slot = seen.iter().filter(|(c, _)| *c == at).count();
        seen.push((at, q));
        let (x, y) = center(at);
        let (x, y) = (x + slot * 4, y + slot * 4);
        let _ = writeln!(
            s,
            r##"<circle cx="{x}" cy="{y}" r="4" fill="#2ca02c"><title>{}</title></circle>"##,
            trace.qubits[q]
        );
    }
    s.push_str("</svg>\n");
    s
}
