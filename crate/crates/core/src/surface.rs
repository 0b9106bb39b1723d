//! The orthotube surface as a set of unit faces, and the intrinsic L/R/S walk
//! over it.
//!
//! Gluing is combinatorial: a box is glued only to its predecessor and
//! successor along the path. For a valid orthotube this coincides with the
//! geometric boundary, except that two boxes touching along a single edge
//! stay locally separate sheets there (the edge then carries two face pairs).
//! The same rule lets the unfolder attach a temporary box that need not keep
//! the path a valid orthotube.

use std::collections::{BTreeMap, HashMap};
use std::ops::Neg;

use thiserror::Error;

use crate::chaincode::{ChainCode, Turn};
use crate::lattice::{left_of, Cell, Direction, EdgeId, FaceId, Orthotube};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("cursor {face} heading {heading} is not on the surface")]
    InvalidCursor { face: FaceId, heading: Direction },
    #[error("no unique face across side {side} of {face}")]
    NotManifold { face: FaceId, side: Direction },
}

/// Position of a dual walk: a surface face and a tangent heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cursor {
    pub face: FaceId,
    pub heading: Direction,
}

impl Cursor {
    pub fn new(face: FaceId, heading: Direction) -> Cursor {
        Cursor { face, heading }
    }

    pub fn left(&self) -> Direction {
        left_of(self.face.normal, self.heading).expect("cursor heading is tangent")
    }

    /// Side of the face the walk leaves through for `turn`.
    pub fn exit_side(&self, turn: Turn) -> Direction {
        match turn {
            Turn::S => self.heading,
            Turn::L => self.left(),
            Turn::R => self.left().neg(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Surface {
    cells: Vec<Cell>,
    index: HashMap<u64, usize>,
    faces: Vec<FaceId>,
    face_index: HashMap<FaceId, usize>,
    /// Box index of each face, parallel to `faces`.
    face_box: Vec<usize>,
    /// Number of surface faces per box.
    box_faces: Vec<usize>,
}

/// Faces of `tube`'s surface with their edge incidence.
pub fn build_surface(tube: &Orthotube) -> Surface {
    Surface::from_path(tube.cells())
}

impl Surface {
    /// Build from a path of distinct cells, consecutive ones face-adjacent.
    /// Non-consecutive contacts are allowed and stay unglued.
    pub fn from_path(cells: &[Cell]) -> Surface {
        let index: HashMap<u64, usize> =
            cells.iter().enumerate().map(|(i, c)| (c.key(), i)).collect();
        let mut surface = Surface {
            cells: cells.to_vec(),
            index,
            faces: Vec::with_capacity(4 * cells.len() + 2),
            face_index: HashMap::with_capacity(4 * cells.len() + 2),
            face_box: Vec::with_capacity(4 * cells.len() + 2),
            box_faces: vec![0; cells.len()],
        };
        for (i, &c) in cells.iter().enumerate() {
            for d in Direction::ALL {
                if surface.glued(i, c.step(d)).is_none() {
                    let f = FaceId::new(c, d);
                    surface.face_index.insert(f, surface.faces.len());
                    surface.faces.push(f);
                    surface.face_box.push(i);
                    surface.box_faces[i] += 1;
                }
            }
        }
        surface
    }

    /// Index of `cell` if it is glued to box `i`.
    fn glued(&self, i: usize, cell: Cell) -> Option<usize> {
        let j = *self.index.get(&cell.key())?;
        (j.abs_diff(i) == 1).then_some(j)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn faces(&self) -> &[FaceId] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, face: FaceId) -> bool {
        self.face_index.contains_key(&face)
    }

    pub fn face_index(&self, face: FaceId) -> Option<usize> {
        self.face_index.get(&face).copied()
    }

    /// Box index owning the face at `idx`.
    pub fn box_of_index(&self, idx: usize) -> usize {
        self.face_box[idx]
    }

    pub fn box_of(&self, face: FaceId) -> Option<usize> {
        self.face_index(face).map(|i| self.face_box[i])
    }

    pub fn box_face_count(&self, i: usize) -> usize {
        self.box_faces[i]
    }

    pub fn is_valid_cursor(&self, c: Cursor) -> bool {
        c.heading.is_perpendicular(c.face.normal) && self.contains(c.face)
    }

    /// The face across side `side` of `face`, with the heading pointing away
    /// from the shared edge.
    pub fn across(&self, face: FaceId, side: Direction) -> Result<Cursor, SurfaceError> {
        let bad = SurfaceError::NotManifold { face, side };
        let i = *self.index.get(&face.cell.key()).ok_or(bad.clone())?;
        let n = face.normal;
        let next = match self.glued(i, face.cell.step(side)) {
            None => Cursor::new(FaceId::new(face.cell, side), n.neg()),
            Some(j) => {
                let corner = face.cell.step(side).step(n);
                match self.glued(j, corner) {
                    None => Cursor::new(FaceId::new(face.cell.step(side), n), side),
                    Some(_) => Cursor::new(FaceId::new(corner, side.neg()), n),
                }
            }
        };
        if self.contains(next.face) {
            Ok(next)
        } else {
            Err(bad)
        }
    }

    /// One move of the dual walk. Covers coplanar continuation, convex folds
    /// over a cube edge and reflex folds into an inside corner.
    pub fn step(&self, cursor: Cursor, turn: Turn) -> Result<Cursor, SurfaceError> {
        self.across(cursor.face, cursor.exit_side(turn))
    }

    /// Faces `f_0 .. f_{m+1}` visited by `code` from `start`: the first move
    /// goes straight across `start.heading`, then each symbol is applied.
    /// Faces may repeat.
    pub fn walk(&self, start: Cursor, code: &ChainCode) -> Result<Vec<FaceId>, SurfaceError> {
        if !self.is_valid_cursor(start) {
            return Err(SurfaceError::InvalidCursor { face: start.face, heading: start.heading });
        }
        let mut out = Vec::with_capacity(code.len() + 2);
        out.push(start.face);
        let mut cur = self.step(start, Turn::S)?;
        out.push(cur.face);
        for &t in code.turns() {
            cur = self.step(cur, t)?;
            out.push(cur.face);
        }
        Ok(out)
    }

    /// Final cursor of `walk`.
    pub fn walk_cursor(&self, start: Cursor, code: &ChainCode) -> Result<Cursor, SurfaceError> {
        let mut cur = self.step(start, Turn::S)?;
        for &t in code.turns() {
            cur = self.step(cur, t)?;
        }
        Ok(cur)
    }

    /// Pairs of faces glued along each lattice edge. A lattice edge where two
    /// boxes touch only along that edge carries two pairs.
    pub fn edge_map(&self) -> Result<BTreeMap<EdgeId, Vec<(FaceId, FaceId)>>, SurfaceError> {
        let mut map: BTreeMap<EdgeId, Vec<(FaceId, FaceId)>> = BTreeMap::new();
        for &f in &self.faces {
            for side in Direction::ALL.into_iter().filter(|d| d.is_perpendicular(f.normal)) {
                let g = self.across(f, side)?.face;
                let edge = f.edge(side).expect("tangent side");
                // Both faces must name the same lattice edge and agree on
                // the pairing.
                let back = Direction::ALL
                    .into_iter()
                    .filter(|d| d.is_perpendicular(g.normal))
                    .find(|&d| g.edge(d) == Some(edge))
                    .ok_or(SurfaceError::NotManifold { face: f, side })?;
                if self.across(g, back)?.face != f {
                    return Err(SurfaceError::NotManifold { face: f, side });
                }
                if f < g {
                    map.entry(edge).or_default().push((f, g));
                }
            }
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaincode::code;
    use crate::lattice::{validate_orthotube, Direction::*};

    fn tube(v: &[(i32, i32, i32)]) -> Orthotube {
        validate_orthotube(v.iter().map(|&(x, y, z)| Cell::new(x, y, z)).collect()).unwrap()
    }

    fn face(x: i32, y: i32, z: i32, n: Direction) -> FaceId {
        FaceId::new(Cell::new(x, y, z), n)
    }

    #[test]
    fn face_counts() {
        assert_eq!(build_surface(&tube(&[(0, 0, 0)])).len(), 6);
        assert_eq!(build_surface(&tube(&[(0, 0, 0), (1, 0, 0)])).len(), 10);
        let t = tube(&[(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1), (2, 1, 1)]);
        assert_eq!(build_surface(&t).len(), 22);
        let t = tube(&[(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1), (2, 1, 1), (3, 1, 1)]);
        assert_eq!(build_surface(&t).len(), 26);
    }

    #[test]
    fn step_examples() {
        let s = build_surface(&tube(&[(0, 0, 0), (1, 0, 0)]));
        let c = Cursor::new(face(0, 0, 0, PosZ), PosX);
        assert_eq!(s.step(c, Turn::S).unwrap(), Cursor::new(face(1, 0, 0, PosZ), PosX));

        let s = build_surface(&tube(&[(0, 0, 0)]));
        assert_eq!(s.step(c, Turn::S).unwrap(), Cursor::new(face(0, 0, 0, PosX), NegZ));

        let s = build_surface(&tube(&[(0, 0, 0), (1, 0, 0), (1, 1, 0)]));
        let c = Cursor::new(face(0, 0, 0, PosY), PosX);
        assert_eq!(s.step(c, Turn::S).unwrap(), Cursor::new(face(1, 1, 0, NegX), PosY));
    }

    #[test]
    fn reflex_fold_matches_edge_incidence() {
        // Independent route: the two surface faces containing the edge
        // {x=1, y=1, z in [0,1]} are the ones the step must join.
        let t = tube(&[(0, 0, 0), (1, 0, 0), (1, 1, 0)]);
        let s = build_surface(&t);
        let edge = face(0, 0, 0, PosY).edge(PosX).unwrap();
        let incident: Vec<FaceId> = s
            .faces()
            .iter()
            .copied()
            .filter(|f| {
                Direction::ALL
                    .into_iter()
                    .filter(|d| d.is_perpendicular(f.normal))
                    .any(|d| f.edge(d) == Some(edge))
            })
            .collect();
        assert_eq!(incident, vec![face(0, 0, 0, PosY), face(1, 1, 0, NegX)]);
    }

    #[test]
    fn walk_examples() {
        let s = build_surface(&tube(&[(0, 0, 0)]));
        let start = Cursor::new(face(0, 0, 0, NegX), PosY);
        assert_eq!(s.walk(start, &code("")).unwrap().len(), 2);

        let faces = s.walk(start, &code("LSSR")).unwrap();
        let mut sorted = faces.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);

        for &f in s.faces() {
            for h in Direction::ALL.into_iter().filter(|d| d.is_perpendicular(f.normal)) {
                let band = s.walk(Cursor::new(f, h), &code("SSS")).unwrap();
                assert_eq!(band.len(), 5);
                assert_eq!(band[4], band[0]);
                let mut distinct = band[..4].to_vec();
                distinct.sort();
                distinct.dedup();
                assert_eq!(distinct.len(), 4);
            }
        }
    }

    #[test]
    fn invalid_start_is_rejected() {
        let s = build_surface(&tube(&[(0, 0, 0), (1, 0, 0)]));
        let hole = Cursor::new(face(0, 0, 0, PosX), PosY);
        assert!(matches!(s.walk(hole, &code("")), Err(SurfaceError::InvalidCursor { .. })));
        let normal_heading = Cursor::new(face(0, 0, 0, PosY), PosY);
        assert!(s.walk(normal_heading, &code("")).is_err());
    }

    #[test]
    fn edge_contact_keeps_sheets_apart() {
        // Boxes 0 and 4 touch only along the edge x=1,y=1.
        let t = tube(&[(0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1), (1, 1, 0)]);
        let s = build_surface(&t);
        let map = s.edge_map().unwrap();
        let edge = face(0, 0, 0, PosX).edge(PosY).unwrap();
        assert_eq!(map[&edge].len(), 2);
        let pairs: usize = map.values().map(Vec::len).sum();
        assert_eq!(pairs, 4 * s.len() / 2);
    }
}
