//! Exhaustive search for dual-Hamiltonian, non-overlapping unfoldings of
//! small tubes.
//!
//! The search runs depth first from every start cursor and tries `L`, `R`,
//! `S` at each face. A branch dies when it revisits a face or when its dual
//! point is already taken. A U-turn would land on the previous face, so the
//! three symbols lose nothing.
//!
//! Start cursors are searched independently (in parallel with the `parallel`
//! feature) and merged in cursor order, so the result matches a single
//! sequential search under the same limits.

use std::collections::HashSet;

use crate::chaincode::{ChainCode, Point2, Turn, Turtle};
use crate::generator::Symmetry;
use crate::lattice::{Cell, Direction, FaceId, Orthotube};
use crate::par;
use crate::surface::{build_surface, Cursor, Surface};

const TURNS: [Turn; 3] = [Turn::L, Turn::R, Turn::S];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_results: usize,
    pub max_nodes: u64,
    /// Search only one start cursor per orbit of the tube's symmetry group.
    pub reduce_symmetry: bool,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_results: usize::MAX, max_nodes: u64::MAX, reduce_symmetry: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub codes: Vec<(Cursor, ChainCode)>,
    /// Search nodes entered, one per face placed.
    pub explored: u64,
    pub truncated: bool,
}

/// Tangent headings of a face, in [`Direction::ALL`] order.
fn headings(normal: Direction) -> impl Iterator<Item = Direction> {
    Direction::ALL.into_iter().filter(move |d| d.is_perpendicular(normal))
}

/// All start cursors in search order: surface faces in surface order, each
/// with its four headings.
pub fn start_cursors(surface: &Surface) -> Vec<Cursor> {
    surface
        .faces()
        .iter()
        .flat_map(|&f| headings(f.normal).map(move |h| Cursor::new(f, h)))
        .collect()
}

/// Neighbour face indices of every face, across its four sides in
/// [`Direction::ALL`] order.
pub fn face_adjacency(surface: &Surface) -> Vec<[usize; 4]> {
    surface
        .faces()
        .iter()
        .map(|&f| {
            let mut out = [usize::MAX; 4];
            for (k, side) in headings(f.normal).enumerate() {
                let next = surface.across(f, side).expect("valid tube surfaces are closed");
                out[k] = surface.face_index(next.face).expect("neighbour is a surface face");
            }
            out
        })
        .collect()
}

struct Search<'a> {
    surface: &'a Surface,
    target: usize,
    visited: Vec<bool>,
    points: HashSet<Point2>,
    code: Vec<Turn>,
    explored: u64,
    max_nodes: u64,
    max_results: usize,
    /// Accepted codes with the node count at which they were found.
    found: Vec<(u64, ChainCode)>,
    stopped: bool,
}

impl Search<'_> {
    fn enter(&mut self) -> bool {
        if self.explored >= self.max_nodes {
            self.stopped = true;
            return false;
        }
        self.explored += 1;
        true
    }

    fn run(&mut self, start: Cursor) {
        let f0 = self.surface.face_index(start.face).expect("start on surface");
        let Ok(c1) = self.surface.step(start, Turn::S) else {
            return;
        };
        let f1 = self.surface.face_index(c1.face).expect("step stays on surface");
        if f0 == f1 || !self.enter() || !self.enter() {
            return;
        }
        self.visited[f0] = true;
        self.visited[f1] = true;
        self.points.insert((0, 0));
        self.points.insert((0, 1));
        self.dfs(c1, Turtle::start());
    }

    fn dfs(&mut self, cursor: Cursor, turtle: Turtle) {
        if self.code.len() == self.target {
            self.found.push((self.explored, ChainCode::from_turns(self.code.clone())));
            if self.found.len() >= self.max_results {
                self.stopped = true;
            }
            return;
        }
        for t in TURNS {
            if self.stopped {
                return;
            }
            let Ok(next) = self.surface.step(cursor, t) else {
                continue;
            };
            let idx = self.surface.face_index(next.face).expect("step stays on surface");
            if self.visited[idx] {
                continue;
            }
            let mut tt = turtle;
            let p = tt.advance(t);
            if self.points.contains(&p) {
                continue;
            }
            if !self.enter() {
                return;
            }
            self.visited[idx] = true;
            self.points.insert(p);
            self.code.push(t);
            self.dfs(next, tt);
            self.code.pop();
            self.points.remove(&p);
            self.visited[idx] = false;
        }
    }
}

fn search_from<'a>(surface: &'a Surface, start: Cursor, limits: &OracleLimits) -> Search<'a> {
    let target = 4 * (surface.cells().len() - 1) + 4;
    let mut s = Search {
        surface,
        target,
        visited: vec![false; surface.len()],
        points: HashSet::with_capacity(target + 2),
        code: Vec::with_capacity(target),
        explored: 0,
        max_nodes: limits.max_nodes,
        max_results: limits.max_results,
        found: Vec::new(),
        stopped: false,
    };
    if limits.max_results > 0 {
        s.run(start);
    }
    s
}

/// Enumerate every accepted (start cursor, code) pair in search order.
pub fn enumerate_unfoldings(tube: &Orthotube, limits: OracleLimits) -> OracleResult {
    enumerate_unfoldings_with(tube, limits, true)
}

/// [`enumerate_unfoldings`] with the start-cursor partition run in parallel
/// or on the calling thread. Both give the same result.
pub fn enumerate_unfoldings_with(
    tube: &Orthotube,
    limits: OracleLimits,
    parallel: bool,
) -> OracleResult {
    let surface = build_surface(tube);
    let mut starts = start_cursors(&surface);
    if limits.reduce_symmetry {
        let group = self_symmetries(tube);
        starts.retain(|&c| group.iter().all(|g| g.map_cursor(c) >= c));
    }
    let work = |&c: &Cursor| {
        let s = search_from(&surface, c, &limits);
        (s.found, s.explored, s.stopped)
    };
    let runs = if parallel { par::map(&starts, work) } else { par::map_seq(&starts, work) };

    // Replay the per-cursor results against the global budgets.
    let mut out = OracleResult { codes: Vec::new(), explored: 0, truncated: false };
    for (&start, (found, explored, stopped)) in starts.iter().zip(runs) {
        let left = limits.max_nodes - out.explored;
        for (at, code) in found {
            if at > left {
                break;
            }
            out.codes.push((start, code));
            if out.codes.len() >= limits.max_results {
                out.explored += at;
                out.truncated = true;
                return out;
            }
        }
        // A worker that stops here without hitting the result limit ran
        // out of nodes.
        if explored > left || (stopped && explored == left) {
            out.explored += left;
            out.truncated = true;
            return out;
        }
        out.explored += explored;
    }
    out
}

/// An unfolding exists.
pub fn exists_unfolding(tube: &Orthotube) -> bool {
    let limits = OracleLimits { max_results: 1, ..OracleLimits::default() };
    !enumerate_unfoldings(tube, limits).codes.is_empty()
}

/// The acceptance test the search applies, run on one given code: the walk
/// from `start` places `4n+6` distinct faces and distinct dual points.
pub fn accepts(tube: &Orthotube, start: Cursor, code: &ChainCode) -> bool {
    let surface = build_surface(tube);
    if !surface.is_valid_cursor(start) || code.len() != 4 * tube.last_index() + 4 {
        return false;
    }
    let mut visited = vec![false; surface.len()];
    let mut points = HashSet::new();
    let mut place = |face: FaceId, p: Point2| match surface.face_index(face) {
        Some(i) if !visited[i] && points.insert(p) => {
            visited[i] = true;
            true
        }
        _ => false,
    };
    if !place(start.face, (0, 0)) {
        return false;
    }
    let mut cursor = match surface.step(start, Turn::S) {
        Ok(c) => c,
        Err(_) => return false,
    };
    let mut turtle = Turtle::start();
    if !place(cursor.face, turtle.pos) {
        return false;
    }
    for &t in code.turns() {
        cursor = match surface.step(cursor, t) {
            Ok(c) => c,
            Err(_) => return false,
        };
        if !place(cursor.face, turtle.advance(t)) {
            return false;
        }
    }
    visited.iter().all(|&v| v)
}

/// A lattice symmetry carrying the tube onto itself, possibly reversed,
/// with the translation that realigns it.
#[derive(Debug, Clone, Copy)]
pub struct TubeSymmetry {
    sym: Symmetry,
    shift: [i32; 3],
}

impl TubeSymmetry {
    fn map_dir(&self, d: Direction) -> Direction {
        let v = self.sym.apply(Cell::from_coords(d.vector()));
        Direction::from_vector(v.coords()).expect("symmetries permute directions")
    }

    pub fn map_cell(&self, c: Cell) -> Cell {
        let v = self.sym.apply(c).coords();
        Cell::from_coords([0, 1, 2].map(|k| v[k] + self.shift[k]))
    }

    pub fn map_cursor(&self, c: Cursor) -> Cursor {
        Cursor::new(
            FaceId::new(self.map_cell(c.face.cell), self.map_dir(c.face.normal)),
            self.map_dir(c.heading),
        )
    }
}

/// Symmetries of the tube as a cell set with its path order (forward or
/// reversed). Always contains the identity.
pub fn self_symmetries(tube: &Orthotube) -> Vec<TubeSymmetry> {
    let cells = tube.cells();
    let mut out = Vec::new();
    for sym in Symmetry::all() {
        let image: Vec<Cell> = cells.iter().map(|&c| sym.apply(c)).collect();
        for target in [cells.to_vec(), cells.iter().rev().copied().collect()] {
            let (a, b) = (image[0].coords(), target[0].coords());
            let shift = [0, 1, 2].map(|k| b[k] - a[k]);
            let g = TubeSymmetry { sym, shift };
            if image.iter().zip(&target).all(|(&c, &t)| {
                let v = c.coords();
                Cell::from_coords([0, 1, 2].map(|k| v[k] + shift[k])) == t
            }) {
                out.push(g);
            }
        }
    }
    out
}
