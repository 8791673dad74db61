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

//! Ion-trap fabric grid: junctions, straight channels and traps laid out on
//! a rectangular cell grid, plus the routing graph derived from it.
//!
//! Grid files hold one character per cell (`J`, `C`, `T`, `.`) and one row
//! per line.

mod graph;

pub use graph::{
    channel_weight, EdgeId, EdgeKind, GraphEdge, GraphPath, ReleaseError, ReservationToken,
    Resource, RoutingGraph, Step, TurnDir, VertexId, VertexKind,
};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Coord { row, col }
    }

    pub fn is_adjacent(self, other: Coord) -> bool {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col) == 1
    }

    /// Axis of the unit step from `self` to an adjacent `other`.
    pub fn axis_to(self, other: Coord) -> Axis {
        if self.row == other.row {
            Axis::Horizontal
        } else {
            Axis::Vertical
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Junction,
    Channel,
    Trap,
    Empty,
}

impl CellKind {
    pub fn symbol(self) -> char {
        match self {
            CellKind::Junction => 'J',
            CellKind::Channel => 'C',
            CellKind::Trap => 'T',
            CellKind::Empty => '.',
        }
    }

    fn from_symbol(c: char) -> Option<CellKind> {
        match c {
            'J' => Some(CellKind::Junction),
            'C' => Some(CellKind::Channel),
            'T' => Some(CellKind::Trap),
            '.' => Some(CellKind::Empty),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// What sits just beyond one end of a channel run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunEnd {
    Junction(usize),
    Trap(usize),
    /// Grid boundary or an empty cell: the run dead-ends there.
    Open,
}

/// A maximal straight run of channel cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelRun {
    pub axis: Axis,
    /// Cells ordered by increasing row (vertical) or column (horizontal).
    pub cells: Vec<Coord>,
    /// `ends[0]` lies before `cells[0]`, `ends[1]` after the last cell.
    pub ends: [RunEnd; 2],
}

impl ChannelRun {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_connected(&self) -> bool {
        !matches!(self.ends, [RunEnd::Open, _] | [_, RunEnd::Open])
    }
}

/// A trap sitting directly beside a junction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrapLink {
    pub trap: usize,
    pub junction: usize,
    pub axis: Axis,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FabricError {
    #[error("fabric grid is empty")]
    EmptyGrid,
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("unknown cell `{ch}` at ({row},{col})")]
    UnknownCell { ch: char, row: usize, col: usize },
    #[error("channel at {0} bends or branches")]
    BentChannel(Coord),
    #[error("channel at {0} connects to nothing")]
    DeadChannel(Coord),
    #[error("trap at {0} is not attached to a channel end or junction")]
    OrphanTrap(Coord),
}

/// A validated fabric grid with its channel runs and trap attachments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fabric {
    rows: usize,
    cols: usize,
    cells: Vec<CellKind>,
    junctions: Vec<Coord>,
    traps: Vec<Coord>,
    runs: Vec<ChannelRun>,
    links: Vec<TrapLink>,
    junction_at: Vec<Option<usize>>,
    trap_at: Vec<Option<usize>>,
    run_at: Vec<Option<usize>>,
}

impl Fabric {
    pub fn parse(text: &str) -> Result<Fabric, FabricError> {
        let lines: Vec<&str> = text.lines().collect();
        let lines = match lines.iter().rposition(|l| !l.is_empty()) {
            Some(last) => &lines[..=last],
            None => return Err(FabricError::EmptyGrid),
        };
        let cols = lines[0].chars().count();
        let mut cells = Vec::with_capacity(lines.len() * cols);
        for (row, line) in lines.iter().enumerate() {
            let found = line.chars().count();
            if found != cols {
                return Err(FabricError::RaggedRows {
                    row,
                    expected: cols,
                    found,
                });
            }
            for (col, ch) in line.chars().enumerate() {
                cells.push(CellKind::from_symbol(ch).ok_or(FabricError::UnknownCell {
                    ch,
                    row,
                    col,
                })?);
            }
        }
        Fabric::from_cells(lines.len(), cols, cells)
    }

    pub fn from_cells(
        rows: usize,
        cols: usize,
        cells: Vec<CellKind>,
    ) -> Result<Fabric, FabricError> {
        assert_eq!(cells.len(), rows * cols, "cell count must match dimensions");
        if rows == 0 || cols == 0 {
            return Err(FabricError::EmptyGrid);
        }
        let mut f = Fabric {
            rows,
            cols,
            cells,
            junctions: Vec::new(),
            traps: Vec::new(),
            runs: Vec::new(),
            links: Vec::new(),
            junction_at: vec![None; rows * cols],
            trap_at: vec![None; rows * cols],
            run_at: vec![None; rows * cols],
        };
        for row in 0..rows {
            for col in 0..cols {
                let at = Coord::new(row, col);
                let idx = f.index(at);
                match f.cells[idx] {
                    CellKind::Junction => {
                        f.junction_at[idx] = Some(f.junctions.len());
                        f.junctions.push(at);
                    }
                    CellKind::Trap => {
                        f.trap_at[idx] = Some(f.traps.len());
                        f.traps.push(at);
                    }
                    _ => {}
                }
            }
        }
        f.build_runs()?;
        f.attach_traps()?;
        Ok(f)
    }

    fn index(&self, at: Coord) -> usize {
        at.row * self.cols + at.col
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn contains(&self, at: Coord) -> bool {
        at.row < self.rows && at.col < self.cols
    }

    pub fn cell(&self, at: Coord) -> CellKind {
        if self.contains(at) {
            self.cells[self.index(at)]
        } else {
            CellKind::Empty
        }
    }

    pub fn junctions(&self) -> &[Coord] {
        &self.junctions
    }

    pub fn traps(&self) -> &[Coord] {
        &self.traps
    }

    pub fn runs(&self) -> &[ChannelRun] {
        &self.runs
    }

    pub fn trap_links(&self) -> &[TrapLink] {
        &self.links
    }

    pub fn junction_index(&self, at: Coord) -> Option<usize> {
        self.contains(at)
            .then(|| self.junction_at[self.index(at)])
            .flatten()
    }

    pub fn trap_index(&self, at: Coord) -> Option<usize> {
        self.contains(at)
            .then(|| self.trap_at[self.index(at)])
            .flatten()
    }

    /// The channel run a channel cell belongs to.
    pub fn run_index(&self, at: Coord) -> Option<usize> {
        self.contains(at)
            .then(|| self.run_at[self.index(at)])
            .flatten()
    }

    fn step(&self, at: Coord, dr: isize, dc: isize) -> Option<Coord> {
        let row = at.row.checked_add_signed(dr)?;
        let col = at.col.checked_add_signed(dc)?;
        let c = Coord::new(row, col);
        self.contains(c).then_some(c)
    }

    pub fn neighbors(&self, at: Coord) -> impl Iterator<Item = Coord> + '_ {
        [(-1, 0), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .filter_map(move |(dr, dc)| self.step(at, dr, dc))
    }

    /// Grid center in doubled coordinates, so that distances stay integral.
    pub fn center_doubled(&self) -> (i64, i64) {
        (self.rows as i64 - 1, self.cols as i64 - 1)
    }

    /// Cells a straight line of channel cells starting at `at` covers along
    /// `axis`, and the cells just beyond each end.
    fn straight_extent(&self, at: Coord, axis: Axis) -> (Vec<Coord>, [Option<Coord>; 2]) {
        let (dr, dc) = match axis {
            Axis::Horizontal => (0, 1),
            Axis::Vertical => (1, 0),
        };
        let mut start = at;
        while let Some(prev) = self.step(start, -dr, -dc) {
            if self.cell(prev) != CellKind::Channel {
                break;
            }
            start = prev;
        }
        let mut cells = vec![start];
        let mut cur = start;
        while let Some(next) = self.step(cur, dr, dc) {
            if self.cell(next) != CellKind::Channel {
                break;
            }
            cells.push(next);
            cur = next;
        }
        let before = self.step(start, -dr, -dc);
        let after = self.step(cur, dr, dc);
        (cells, [before, after])
    }

    fn end_kind(&self, beyond: Option<Coord>) -> RunEnd {
        match beyond.map(|c| (c, self.cell(c))) {
            Some((c, CellKind::Junction)) => {
                RunEnd::Junction(self.junction_at[self.index(c)].unwrap())
            }
            Some((c, CellKind::Trap)) => RunEnd::Trap(self.trap_at[self.index(c)].unwrap()),
            _ => RunEnd::Open,
        }
    }

    /// Orientation of a channel cell: the axis along which its straight line
    /// of channel cells is capped by junctions or traps.
    fn orientation(&self, at: Coord) -> Result<Axis, FabricError> {
        let score = |axis| {
            let (_, ends) = self.straight_extent(at, axis);
            ends.iter()
                .filter(|e| !matches!(self.end_kind(**e), RunEnd::Open))
                .count()
        };
        let h = score(Axis::Horizontal);
        let v = score(Axis::Vertical);
        match (h, v) {
            (0, 0) => Err(FabricError::DeadChannel(at)),
            (h, v) if h == v => Err(FabricError::BentChannel(at)),
            (h, v) if h > v => Ok(Axis::Horizontal),
            _ => Ok(Axis::Vertical),
        }
    }

    fn build_runs(&mut self) -> Result<(), FabricError> {
        let mut axis_at: Vec<Option<Axis>> = vec![None; self.rows * self.cols];
        for row in 0..self.rows {
            for col in 0..self.cols {
                let at = Coord::new(row, col);
                if self.cell(at) == CellKind::Channel {
                    let idx = self.index(at);
                    axis_at[idx] = Some(self.orientation(at)?);
                }
            }
        }
        for row in 0..self.rows {
            for col in 0..self.cols {
                let at = Coord::new(row, col);
                let idx = self.index(at);
                let Some(axis) = axis_at[idx] else { continue };
                if self.run_at[idx].is_some() {
                    continue;
                }
                let (cells, beyond) = self.straight_extent(at, axis);
                // Every cell of the line must share the orientation, and a
                // line may not butt into a channel of the other orientation.
                for &c in &cells {
                    if axis_at[self.index(c)] != Some(axis) {
                        return Err(FabricError::BentChannel(c));
                    }
                }
                // A line must stop at a junction, a trap or the grid edge.
                for (end, last) in beyond.iter().zip([cells[0], cells[cells.len() - 1]]) {
                    if end.is_some_and(|e| self.cell(e) == CellKind::Empty) {
                        let sideways = self
                            .neighbors(last)
                            .any(|n| self.cell(n) == CellKind::Channel && last.axis_to(n) != axis);
                        return Err(if sideways {
                            FabricError::BentChannel(last)
                        } else {
                            FabricError::DeadChannel(last)
                        });
                    }
                }
                let id = self.runs.len();
                for &c in &cells {
                    let i = self.index(c);
                    self.run_at[i] = Some(id);
                }
                let ends = [self.end_kind(beyond[0]), self.end_kind(beyond[1])];
                self.runs.push(ChannelRun { axis, cells, ends });
            }
        }
        Ok(())
    }

    fn attach_traps(&mut self) -> Result<(), FabricError> {
        let mut links = Vec::new();
        for (t, &at) in self.traps.iter().enumerate() {
            let mut attached = false;
            for n in self.neighbors(at) {
                let axis = at.axis_to(n);
                match self.cell(n) {
                    CellKind::Junction => {
                        let junction = self.junction_at[self.index(n)].unwrap();
                        links.push(TrapLink {
                            trap: t,
                            junction,
                            axis,
                        });
                        attached = true;
                    }
                    CellKind::Channel => {
                        let run = &self.runs[self.run_at[self.index(n)].unwrap()];
                        attached |= run.axis == axis;
                    }
                    _ => {}
                }
            }
            if !attached {
                return Err(FabricError::OrphanTrap(at));
            }
        }
        self.links = links;
        Ok(())
    }

    /// Renders the grid back to its text form.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity((self.cols + 1) * self.rows);
        for row in 0..self.rows {
            for col in 0..self.cols {
                out.push(self.cell(Coord::new(row, col)).symbol());
            }
            out.push('\n');
        }
        out
    }

    /// Whether a qubit may step between the two adjacent cells.
    pub fn connects(&self, a: Coord, b: Coord) -> bool {
        if !a.is_adjacent(b) {
            return false;
        }
        let axis = a.axis_to(b);
        let along_run = |c: Coord| self.run_index(c).map(|r| self.runs[r].axis == axis);
        match (self.cell(a), self.cell(b)) {
            (CellKind::Channel, CellKind::Channel) => {
                self.run_index(a).is_some() && self.run_index(a) == self.run_index(b)
            }
            (CellKind::Channel, CellKind::Junction | CellKind::Trap) => along_run(a) == Some(true),
            (CellKind::Junction | CellKind::Trap, CellKind::Channel) => along_run(b) == Some(true),
            (CellKind::Junction, CellKind::Trap) | (CellKind::Trap, CellKind::Junction) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Fabric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_tile() {
        let f = Fabric::parse("JCJ\nC.C\nJCJ\n").unwrap();
        assert_eq!(f.junctions().len(), 4);
        assert_eq!(f.runs().len(), 4);
        assert!(f.runs().iter().all(|r| r.len() == 1 && r.is_connected()));
        assert!(f.traps().is_empty());
    }

    #[test]
    fn grid_errors() {
        assert_eq!(Fabric::parse(""), Err(FabricError::EmptyGrid));
        assert_eq!(
            Fabric::parse("JCJ\nJC\n"),
            Err(FabricError::RaggedRows {
                row: 1,
                expected: 3,
                found: 2
            })
        );
        assert_eq!(
            Fabric::parse("JxJ"),
            Err(FabricError::UnknownCell {
                ch: 'x',
                row: 0,
                col: 1
            })
        );
        assert_eq!(
            Fabric::parse("JCJ\n...\n.T."),
            Err(FabricError::OrphanTrap(Coord::new(2, 1)))
        );
        // Trap beside the middle of a channel is not attached to it.
        assert_eq!(
            Fabric::parse("JCCCJ\n..T.."),
            Err(FabricError::OrphanTrap(Coord::new(1, 2)))
        );
        assert!(matches!(
            Fabric::parse("JC.\n.CJ\n"),
            Err(FabricError::BentChannel(_))
        ));
        assert!(matches!(
            Fabric::parse("JCC\n..C\n..J"),
            Err(FabricError::BentChannel(_))
        ));
        assert_eq!(
            Fabric::parse("...\n.C.\n..."),
            Err(FabricError::DeadChannel(Coord::new(1, 1)))
        );
    }

    #[test]
    fn parallel_channels_are_not_bends() {
        let f = Fabric::parse("JCJ\nJCJ\n").unwrap();
        assert_eq!(f.runs().len(), 2);
        assert!(f.runs().iter().all(|r| r.axis == Axis::Horizontal));
    }

    #[test]
    fn traps_attach_to_junctions_and_run_ends() {
        let f = Fabric::parse(".T.\nTJC\n..T\n").unwrap_err();
        // (1,2) is a one-cell run capped by J on the left only horizontally,
        // and by T below vertically: a tie.
        assert!(matches!(f, FabricError::BentChannel(_)));

        let f = Fabric::parse(".T...\nTJCCT\n").unwrap();
        assert_eq!(f.trap_links().len(), 2);
        let run = &f.runs()[0];
        assert_eq!(run.ends, [RunEnd::Junction(0), RunEnd::Trap(2)]);
        assert!(f.connects(Coord::new(1, 3), Coord::new(1, 4)));
        assert!(f.connects(Coord::new(0, 1), Coord::new(1, 1)));
        assert!(!f.connects(Coord::new(0, 1), Coord::new(0, 2)));
    }

    #[test]
    fn render_round_trips() {
        let text = ".T...\nTJCCT\n.C...\n.J...\n";
        let f = Fabric::parse(text).unwrap();
        assert_eq!(f.render(), text);
        assert_eq!(Fabric::parse(&f.render()).unwrap(), f);
    }
}
