//! Orthotube sources: seeded random tubes and exhaustive enumeration of
//! canonical tubes up to lattice symmetry, translation and reversal.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{validate_orthotube, Cell, Direction, Orthotube};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("a tube needs at least one box")]
    NoBoxes,
    #[error("no {0}-box tube found after {1} restarts")]
    GenerationFailed(usize, usize),
}

const RESTARTS: usize = 64;

/// Seeded random orthotube of `n_boxes` boxes starting at the origin, grown
/// as a backtracking self-avoiding walk that never touches a non-consecutive
/// box face to face.
pub fn random_orthotube(n_boxes: usize, seed: u64) -> Result<Orthotube, GenError> {
    if n_boxes == 0 {
        return Err(GenError::NoBoxes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESTARTS {
        if let Some(cells) = grow(n_boxes, &mut rng) {
            return Ok(validate_orthotube(cells).expect("generator keeps tubes valid"));
        }
    }
    Err(GenError::GenerationFailed(n_boxes, RESTARTS))
}

fn grow(n_boxes: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Cell>> {
    let mut cells = vec![Cell::new(0, 0, 0)];
    let mut occupied: HashSet<Cell> = cells.iter().copied().collect();
    // Untried directions for each box on the path.
    let mut options = vec![shuffled(rng)];
    let mut budget = 64 * n_boxes + 1024;
    while cells.len() < n_boxes {
        budget = budget.checked_sub(1)?;
        let tail = *cells.last().expect("path is never empty");
        match options.last_mut().expect("one option list per box").pop() {
            Some(d) => {
                let next = tail.step(d);
                let free = !occupied.contains(&next)
                    && Direction::ALL
                        .iter()
                        .map(|&e| next.step(e))
                        .all(|m| m == tail || !occupied.contains(&m));
                if free && next.in_bounds() {
                    cells.push(next);
                    occupied.insert(next);
                    options.push(shuffled(rng));
                }
            }
            None => {
                if cells.len() == 1 {
                    return None;
                }
                occupied.remove(&cells.pop().expect("checked length"));
                options.pop();
            }
        }
    }
    Some(cells)
}

fn shuffled(rng: &mut ChaCha8Rng) -> Vec<Direction> {
    let mut dirs = Direction::ALL.to_vec();
    dirs.shuffle(rng);
    dirs
}

/// One of the 48 signed axis permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetry {
    perm: [usize; 3],
    signs: [i32; 3],
}

impl Symmetry {
    pub fn all() -> Vec<Symmetry> {
        const PERMS: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(48);
        for perm in PERMS {
            for mask in 0..8 {
                let signs = [0, 1, 2].map(|b| if mask & (1 << b) != 0 { -1 } else { 1 });
                out.push(Symmetry { perm, signs });
            }
        }
        out
    }

    pub fn apply(&self, c: Cell) -> Cell {
        let v = c.coords();
        Cell::from_coords([0, 1, 2].map(|k| self.signs[k] * v[self.perm[k]]))
    }
}

/// A tube's representative: the lexicographically least cell sequence over
/// all symmetries and both directions, translated to a nonnegative min
/// corner.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<Cell>);

impl CanonicalForm {
    pub fn to_tube(&self) -> Orthotube {
        validate_orthotube(self.0.clone()).expect("canonical forms are valid tubes")
    }
}

fn normalized(cells: impl Iterator<Item = Cell>) -> Vec<Cell> {
    let cells: Vec<Cell> = cells.collect();
    let min = [0, 1, 2].map(|k| cells.iter().map(|c| c.coords()[k]).min().unwrap_or(0));
    cells
        .iter()
        .map(|c| {
            let v = c.coords();
            Cell::from_coords([0, 1, 2].map(|k| v[k] - min[k]))
        })
        .collect()
}

fn canonical_cells(cells: &[Cell]) -> CanonicalForm {
    let syms = Symmetry::all();
    let mut best: Option<Vec<Cell>> = None;
    for s in &syms {
        for forward in [true, false] {
            let cand = if forward {
                normalized(cells.iter().map(|&c| s.apply(c)))
            } else {
                normalized(cells.iter().rev().map(|&c| s.apply(c)))
            };
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    CanonicalForm(best.expect("48 symmetries"))
}

pub fn canonicalize(tube: &Orthotube) -> CanonicalForm {
    canonical_cells(tube.cells())
}

/// Canonical tubes of exactly `len` boxes, for each `len` in
/// `1..=max_boxes`. Each level is sorted.
pub fn enumerate_by_length(max_boxes: usize) -> Vec<Vec<CanonicalForm>> {
    let mut levels: Vec<Vec<CanonicalForm>> = Vec::with_capacity(max_boxes);
    if max_boxes == 0 {
        return levels;
    }
    levels.push(vec![CanonicalForm(vec![Cell::new(0, 0, 0)])]);
    while levels.len() < max_boxes {
        let prev = levels.last().expect("at least one level");
        // Every valid tube minus its last box is valid, so growing each
        // representative at both ends reaches every class.
        let grown: Vec<Vec<CanonicalForm>> = par::map(prev, extensions);
        let set: BTreeSet<CanonicalForm> = grown.into_iter().flatten().collect();
        levels.push(set.into_iter().collect());
    }
    levels
}

fn extensions(form: &CanonicalForm) -> Vec<CanonicalForm> {
    let cells = &form.0;
    let mut out = Vec::new();
    for at_end in [true, false] {
        let mut path = cells.clone();
        if !at_end {
            path.reverse();
        }
        let tail = *path.last().expect("nonempty form");
        for d in Direction::ALL {
            let mut next = path.clone();
            next.push(tail.step(d));
            if validate_orthotube(next.clone()).is_ok() {
                out.push(canonical_cells(&next));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All canonical tubes with `1..=max_boxes` boxes: shorter first, each
/// length in canonical order.
pub fn enumerate_orthotubes(max_boxes: usize) -> impl Iterator<Item = Orthotube> {
    enumerate_by_length(max_boxes).into_iter().flatten().map(|f| f.to_tube())
}
