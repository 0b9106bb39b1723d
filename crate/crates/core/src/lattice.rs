//! Integer lattice primitives: signed axis directions, unit cells, faces,
//! edges, and validated orthotubes.

use std::collections::HashMap;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use thiserror::Error;

/// Largest absolute coordinate a [`Cell`] may carry. Keeps packed 64-bit keys
/// collision free.
pub const COORD_LIMIT: i32 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("orthotube must contain at least one box")]
    Empty,
    #[error("box {0} repeats an earlier box")]
    DuplicateCell(usize),
    #[error("box {0} is not face-adjacent to box {prev}", prev = .0 - 1)]
    NotAdjacent(usize),
    #[error("boxes {0} and {1} share a face but are not consecutive")]
    IllegalContact(usize, usize),
    #[error("box {0} has a coordinate outside +/-{COORD_LIMIT}")]
    OutOfBounds(usize),
    #[error("direction {heading} is not tangent to a face with normal {normal}")]
    NotTangent { normal: Direction, heading: Direction },
    #[error("hole index {index} out of range for a tube of {boxes} boxes")]
    OutOfRange { index: usize, boxes: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One of the six signed unit axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    PosX,
    NegX,
    PosY,
    NegY,
    PosZ,
    NegZ,
}

use Direction::*;

impl Direction {
    /// Fixed enumeration order, used wherever a deterministic choice among
    /// directions is needed.
    pub const ALL: [Direction; 6] = [PosX, NegX, PosY, NegY, PosZ, NegZ];

    pub fn new(axis: Axis, positive: bool) -> Direction {
        match (axis, positive) {
            (Axis::X, true) => PosX,
            (Axis::X, false) => NegX,
            (Axis::Y, true) => PosY,
            (Axis::Y, false) => NegY,
            (Axis::Z, true) => PosZ,
            (Axis::Z, false) => NegZ,
        }
    }

    pub fn axis(self) -> Axis {
        match self {
            PosX | NegX => Axis::X,
            PosY | NegY => Axis::Y,
            PosZ | NegZ => Axis::Z,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, PosX | PosY | PosZ)
    }

    pub fn sign(self) -> i32 {
        if self.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn vector(self) -> [i32; 3] {
        let mut v = [0; 3];
        v[self.axis().index()] = self.sign();
        v
    }

    pub fn from_vector(v: [i32; 3]) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.vector() == v)
    }

    pub fn dot(self, other: Direction) -> i32 {
        if self.axis() == other.axis() {
            self.sign() * other.sign()
        } else {
            0
        }
    }

    pub fn is_perpendicular(self, other: Direction) -> bool {
        self.axis() != other.axis()
    }

    /// Right-handed cross product; `None` for parallel inputs.
    pub fn cross(self, other: Direction) -> Option<Direction> {
        let a = self.vector();
        let b = other.vector();
        let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        Direction::from_vector(c)
    }
}

impl Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction::new(self.axis(), !self.is_positive())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_positive() { '+' } else { '-' };
        let axis = match self.axis() {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        };
        write!(f, "{sign}{axis}")
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (positive, rest) = match s.as_bytes().first() {
            Some(b'+') => (true, &s[1..]),
            Some(b'-') => (false, &s[1..]),
            _ => (true, s),
        };
        let axis = match rest.to_ascii_uppercase().as_str() {
            "X" => Axis::X,
            "Y" => Axis::Y,
            "Z" => Axis::Z,
            _ => return Err(format!("bad direction {s:?}")),
        };
        Ok(Direction::new(axis, positive))
    }
}

/// Direction to the intrinsic left of `heading` on a face with outward
/// `normal`: `normal x heading`.
pub fn left_of(normal: Direction, heading: Direction) -> Result<Direction, LatticeError> {
    normal.cross(heading).ok_or(LatticeError::NotTangent { normal, heading })
}

/// A unit cube occupying `[x,x+1] x [y,y+1] x [z,z+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32, z: i32) -> Cell {
        Cell { x, y, z }
    }

    pub fn coords(self) -> [i32; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_coords(c: [i32; 3]) -> Cell {
        Cell::new(c[0], c[1], c[2])
    }

    pub fn step(self, dir: Direction) -> Cell {
        let v = dir.vector();
        Cell::new(self.x + v[0], self.y + v[1], self.z + v[2])
    }

    pub fn in_bounds(self) -> bool {
        self.coords().iter().all(|c| c.abs() <= COORD_LIMIT)
    }

    /// Packed 64-bit key (21 bits per coordinate). Only injective for cells
    /// within [`COORD_LIMIT`].
    pub fn key(self) -> u64 {
        let pack = |v: i32| ((v + COORD_LIMIT) as u64) & 0x1f_ffff;
        pack(self.x) | (pack(self.y) << 21) | (pack(self.z) << 42)
    }

    /// Direction from `self` to a face-adjacent `other`.
    pub fn direction_to(self, other: Cell) -> Option<Direction> {
        Direction::from_vector([other.x - self.x, other.y - self.y, other.z - self.z])
    }

    pub fn is_face_adjacent(self, other: Cell) -> bool {
        self.direction_to(other).is_some()
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// A unit square of some cell's boundary, named by the cell and its outward
/// normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId {
    pub cell: Cell,
    pub normal: Direction,
}

impl FaceId {
    pub const fn new(cell: Cell, normal: Direction) -> FaceId {
        FaceId { cell, normal }
    }

    /// The same geometric square seen from the neighbouring cell.
    pub fn opposite(self) -> FaceId {
        FaceId::new(self.cell.step(self.normal), self.normal.neg())
    }

    pub fn same_square(self, other: FaceId) -> bool {
        self == other || self.opposite() == other
    }

    /// The edge of this face on side `side` (a tangent direction).
    pub fn edge(self, side: Direction) -> Option<EdgeId> {
        if !side.is_perpendicular(self.normal) {
            return None;
        }
        // The edge runs along the third axis; its position is the far side
        // of the cell along `normal` and `side`.
        let axis = Axis::ALL.into_iter().find(|&a| a != side.axis() && a != self.normal.axis())?;
        let mut base = self.cell.coords();
        for d in [self.normal, side] {
            if d.is_positive() {
                base[d.axis().index()] += 1;
            }
        }
        Some(EdgeId { base: base.into(), axis })
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.cell, self.normal)
    }
}

/// A lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point3 {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl From<[i32; 3]> for Point3 {
    fn from(c: [i32; 3]) -> Self {
        Point3 { x: c[0], y: c[1], z: c[2] }
    }
}

/// Unit lattice segment from `base` (its lexicographically smaller endpoint)
/// along `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub base: Point3,
    pub axis: Axis,
}

/// A validated path of unit cubes. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orthotube {
    cells: Vec<Cell>,
}

impl Orthotube {
    /// Number of boxes, `n + 1`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the last box, `n`.
    pub fn last_index(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    /// Number of faces on the tube's surface, `4n + 6`.
    pub fn surface_face_count(&self) -> usize {
        4 * self.last_index() + 6
    }

    pub fn reversed(&self) -> Orthotube {
        let mut cells = self.cells.clone();
        cells.reverse();
        Orthotube { cells }
    }

    /// Map from cell to its index along the tube.
    pub fn index_map(&self) -> HashMap<Cell, usize> {
        self.cells.iter().enumerate().map(|(i, &c)| (c, i)).collect()
    }
}

/// Check the orthotube conditions and wrap the cells.
pub fn validate_orthotube(cells: Vec<Cell>) -> Result<Orthotube, LatticeError> {
    if cells.is_empty() {
        return Err(LatticeError::Empty);
    }
    let mut seen: HashMap<u64, usize> = HashMap::with_capacity(cells.len());
    for (j, &c) in cells.iter().enumerate() {
        if !c.in_bounds() {
            return Err(LatticeError::OutOfBounds(j));
        }
        if seen.insert(c.key(), j).is_some() {
            return Err(LatticeError::DuplicateCell(j));
        }
        if j > 0 && !cells[j - 1].is_face_adjacent(c) {
            return Err(LatticeError::NotAdjacent(j));
        }
        // Earliest illegal partner of j among boxes before j - 1.
        let partner = Direction::ALL
            .iter()
            .filter_map(|&d| seen.get(&c.step(d).key()).copied())
            .filter(|&i| i + 1 < j)
            .min();
        if let Some(i) = partner {
            return Err(LatticeError::IllegalContact(i, j));
        }
    }
    Ok(Orthotube { cells })
}

/// The face of box `i` shared with box `i + 1`.
pub fn hole_face(tube: &Orthotube, i: usize) -> Result<FaceId, LatticeError> {
    if i >= tube.last_index() {
        return Err(LatticeError::OutOfRange { index: i, boxes: tube.len() });
    }
    let a = tube.cell(i);
    let normal =
        a.direction_to(tube.cell(i + 1)).expect("validated tube has adjacent consecutive boxes");
    Ok(FaceId::new(a, normal))
}

/// Parse the tube text format: one `x y z` per line, `#` comments and blank
/// lines ignored.
pub fn parse_cells(text: &str) -> Result<Vec<Cell>, LatticeError> {
    let mut cells = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| LatticeError::Parse { line: lineno + 1, msg };
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<i32>().map_err(|e| err(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let &[x, y, z] = nums.as_slice() else {
            return Err(err(format!("expected 3 integers, found {}", nums.len())));
        };
        cells.push(Cell::new(x, y, z));
    }
    Ok(cells)
}

pub fn parse_tube(text: &str) -> Result<Orthotube, LatticeError> {
    validate_orthotube(parse_cells(text)?)
}

pub fn format_tube(tube: &Orthotube) -> String {
    let mut out = String::with_capacity(tube.len() * 8);
    for c in tube.cells() {
        out.push_str(&format!("{} {} {}\n", c.x, c.y, c.z));
    }
    out
}
