//! Chain codes over `{L, R, S}`, cumulative quarter turning, and the planar
//! unfolding dual that places one unit square per visited face.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("bad chain code symbol {1:?} at position {0}")]
    BadSymbol(usize, char),
}

/// One intrinsic move of a dual path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Turn {
    L,
    R,
    S,
}

impl Turn {
    /// Quarter turns: R = +1, L = -1, S = 0.
    pub fn qturn(self) -> i32 {
        match self {
            Turn::L => -1,
            Turn::R => 1,
            Turn::S => 0,
        }
    }

    pub fn mirror(self) -> Turn {
        match self {
            Turn::L => Turn::R,
            Turn::R => Turn::L,
            Turn::S => Turn::S,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Turn::L => 'L',
            Turn::R => 'R',
            Turn::S => 'S',
        }
    }

    pub fn from_char(c: char) -> Option<Turn> {
        match c.to_ascii_uppercase() {
            'L' => Some(Turn::L),
            'R' => Some(Turn::R),
            'S' => Some(Turn::S),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainCode(Vec<Turn>);

impl ChainCode {
    pub fn new() -> ChainCode {
        ChainCode(Vec::new())
    }

    pub fn from_turns(turns: Vec<Turn>) -> ChainCode {
        ChainCode(turns)
    }

    pub fn turns(&self) -> &[Turn] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, t: Turn) {
        self.0.push(t);
    }

    pub fn extend_from(&mut self, other: &ChainCode) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    pub fn concat(&self, other: &ChainCode) -> ChainCode {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// Swap L and R.
    pub fn mirrored(&self) -> ChainCode {
        ChainCode(self.0.iter().map(|t| t.mirror()).collect())
    }

    pub fn prefix(&self, len: usize) -> ChainCode {
        ChainCode(self.0[..len].to_vec())
    }
}

impl fmt::Display for ChainCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{}", t.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for ChainCode {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_code(s)
    }
}

/// Parse a case-insensitive string over `{L,R,S}`; whitespace is ignored.
/// Positions in errors count characters of the input.
pub fn parse_code(text: &str) -> Result<ChainCode, CodeError> {
    let mut turns = Vec::with_capacity(text.len());
    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            continue;
        }
        turns.push(Turn::from_char(c).ok_or(CodeError::BadSymbol(i, c))?);
    }
    Ok(ChainCode(turns))
}

/// Shorthand for literal fragments; panics on a bad symbol.
pub fn code(text: &str) -> ChainCode {
    parse_code(text).expect("literal chain code")
}

pub fn qturn(code: &ChainCode) -> i32 {
    code.0.iter().map(|t| t.qturn()).sum()
}

/// Every prefix has quarter turning in `{-1, 0, +1}`.
pub fn prefix_monotone(code: &ChainCode) -> bool {
    let mut q = 0;
    code.0.iter().all(|t| {
        q += t.qturn();
        (-1..=1).contains(&q)
    })
}

pub type Point2 = (i32, i32);

/// Planar turtle used by the unfolding dual: position plus heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Turtle {
    pub pos: Point2,
    pub dir: Point2,
}

impl Turtle {
    /// State after the fixed first segment `(0,0) -> (0,1)`.
    pub fn start() -> Turtle {
        Turtle { pos: (0, 1), dir: (0, 1) }
    }

    pub fn advance(&mut self, t: Turn) -> Point2 {
        let (dx, dy) = self.dir;
        self.dir = match t {
            Turn::L => (-dy, dx),
            Turn::R => (dy, -dx),
            Turn::S => (dx, dy),
        };
        self.pos = (self.pos.0 + self.dir.0, self.pos.1 + self.dir.1);
        self.pos
    }
}

/// Points of the unfolding dual, one per face of the corresponding path
/// (`code.len() + 2` of them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLayout {
    pub points: Vec<Point2>,
}

impl DualLayout {
    /// Shared edges between consecutive squares, as segment endpoints in
    /// doubled coordinates (so they stay integral).
    pub fn attachments(&self) -> Vec<(Point2, Point2)> {
        self.points
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let (mx, my) = (a.0 + b.0, a.1 + b.1);
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                // Rotate the unit step by 90 degrees around the midpoint.
                ((mx + dy, my - dx), (mx - dy, my + dx))
            })
            .collect()
    }
}

pub fn unfolding_dual(code: &ChainCode) -> DualLayout {
    let mut points = Vec::with_capacity(code.len() + 2);
    points.push((0, 0));
    let mut turtle = Turtle::start();
    points.push(turtle.pos);
    for &t in code.turns() {
        points.push(turtle.advance(t));
    }
    DualLayout { points }
}

/// The dual revisits a point.
pub fn has_overlap(code: &ChainCode) -> bool {
    let layout = unfolding_dual(code);
    let mut seen = HashSet::with_capacity(layout.points.len());
    !layout.points.iter().all(|p| seen.insert(*p))
}

/// Axis-aligned square of the net.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetSquare {
    pub center: (f64, f64),
    pub side: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetLayout {
    pub squares: Vec<NetSquare>,
    pub attachments: Vec<((f64, f64), (f64, f64))>,
    /// Indices `(i, j)`, `i < j`, of squares sharing a center.
    pub overlaps: Vec<(usize, usize)>,
}

/// Squares of side `scale` centered at `scale * p_i`, in path order.
pub fn layout_squares(code: &ChainCode, scale: u32) -> NetLayout {
    let s = f64::from(scale.max(1));
    let dual = unfolding_dual(code);
    let squares = dual
        .points
        .iter()
        .map(|&(x, y)| NetSquare { center: (s * x as f64, s * y as f64), side: s })
        .collect();
    let half = s / 2.0;
    let attachments = dual
        .attachments()
        .into_iter()
        .map(|((ax, ay), (bx, by))| {
            ((half * ax as f64, half * ay as f64), (half * bx as f64, half * by as f64))
        })
        .collect();
    let mut first_at = std::collections::HashMap::new();
    let mut overlaps = Vec::new();
    for (j, p) in dual.points.iter().enumerate() {
        if let Some(&i) = first_at.get(p) {
            overlaps.push((i, j));
        } else {
            first_at.insert(*p, j);
        }
    }
    NetLayout { squares, attachments, overlaps }
}
