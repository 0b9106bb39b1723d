//! Box-by-box construction of a chain code whose dual path is Hamiltonian on
//! the tube surface and whose every prefix turns by at most one quarter.
//!
//! The code is grown in fragments. Between fragments the walk sits at a
//! *checkpoint*: the cursor has just entered a fresh box through the axial
//! edge, every earlier box is fully visited, and the running quarter turning
//! is zero. Which fragment comes next depends on where the following boxes
//! sit relative to the cursor (straight, left, right or opposite), and some
//! fragments span several boxes before the quarter turning returns to zero.
//!
//! A temporary box is attached past the last real box. The walk ends as soon
//! as it steps into that box; on the real surface the same step lands on the
//! face the temporary box covered.

use std::fmt;
use std::ops::Neg;

use log::warn;
use thiserror::Error;

use crate::chaincode::{code, ChainCode, Turn};
use crate::lattice::{left_of, Cell, Direction, FaceId, Orthotube};
use crate::surface::{Cursor, Surface};
use crate::verifier::{self, PREFIX_QTURN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnfoldError {
    #[error("invariant violated at box {box_index}: {msg}")]
    InvariantViolation { box_index: usize, msg: String },
    #[error("no fragment applies at box {box_index} ({class})")]
    NoFragment { box_index: usize, class: NClass },
    #[error("unfolding failed for tube [{tube}]: {}", diagnostics.join("; "))]
    UnfoldFailed { tube: String, diagnostics: Vec<String> },
}

/// Position of the next hole relative to the cursor at a checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NClass {
    /// Reached by going straight.
    S,
    /// On the face opposite the cursor's face.
    O,
    /// Reached by turning left.
    L,
    /// Reached by turning right.
    R,
}

impl fmt::Display for NClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NClass::S => "N=S",
            NClass::O => "N=O",
            NClass::L => "N=L",
            NClass::R => "N=R",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Checkpoint {
    pub box_index: usize,
    pub code_len: usize,
}

/// Free choices of the construction. The default is the primary attempt;
/// the others are only tried when it fails verification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnfoldConfig {
    /// Side of the last box that the temporary box covers. `None` puts it
    /// straight ahead of the entry into the last box (`+X` for a single box).
    pub terminal: Option<Direction>,
    /// Initial heading on the start face; `None` takes the first tangent
    /// direction in [`Direction::ALL`] order.
    pub heading: Option<Direction>,
    /// Try `RSSL` before `LSSR` for the first box.
    pub base_rssl_first: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unfolding {
    pub code: ChainCode,
    pub start: Cursor,
    pub checkpoints: Vec<Checkpoint>,
    pub fragments: Vec<Fragment>,
    /// 0 for the primary attempt, otherwise the index of the fallback
    /// configuration that produced this result.
    pub attempt: usize,
}

/// One appended fragment with the case that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub box_index: usize,
    pub case: &'static str,
    pub code: ChainCode,
}

/// A step of a fragment plan.
#[derive(Debug, Clone)]
enum Step {
    Fixed(ChainCode),
    /// Repeat `LRLR` until `LSRL` closes back to zero quarter turning
    /// (mirrored when the running turning is -1).
    Repeat {
        mirrored: bool,
    },
}

type Plan = Vec<Step>;

fn fixed(s: &str) -> Step {
    Step::Fixed(code(s))
}

fn mirror_plan(plan: &Plan) -> Plan {
    plan.iter()
        .map(|s| match s {
            Step::Fixed(c) => Step::Fixed(c.mirrored()),
            Step::Repeat { mirrored } => Step::Repeat { mirrored: !mirrored },
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pushed {
    Open,
    Terminal,
}

#[derive(Debug, Clone, Copy)]
struct Mark {
    code_len: usize,
    trail_len: usize,
    cursor: Cursor,
    qturn: i32,
}

#[derive(Debug, Clone)]
pub struct UnfoldState {
    tube: Orthotube,
    /// Tube cells followed by the temporary terminal box.
    path: Vec<Cell>,
    surface: Surface,
    start: Cursor,
    cursor: Cursor,
    code: ChainCode,
    qturn: i32,
    finished: bool,
    checkpoints: Vec<Checkpoint>,
    fragments: Vec<Fragment>,
    visited: Vec<bool>,
    box_visited: Vec<usize>,
    /// Faces in visiting order, with the largest box index seen so far.
    trail: Vec<(usize, usize)>,
    /// Number of surface faces of boxes `0..i`.
    faces_before: Vec<usize>,
}

/// Start state: cursor on the face of the first box opposite its hole, code
/// empty.
pub fn initial_state(tube: &Orthotube) -> UnfoldState {
    initial_state_with(tube, &UnfoldConfig::default())
        .expect("default terminal placement is always free")
}

/// Start state for an explicit configuration; `None` if the requested
/// terminal side or heading is not usable.
pub fn initial_state_with(tube: &Orthotube, config: &UnfoldConfig) -> Option<UnfoldState> {
    let n = tube.last_index();
    let last = tube.cell(n);
    let terminal = match config.terminal {
        Some(d) => d,
        None if n == 0 => Direction::PosX,
        None => tube.cell(n - 1).direction_to(last).expect("adjacent boxes"),
    };
    let virtual_cell = last.step(terminal);
    if tube.cells().contains(&virtual_cell) {
        return None;
    }
    let mut path = tube.cells().to_vec();
    path.push(virtual_cell);
    let surface = Surface::from_path(&path);

    let axis = path[0].direction_to(path[1]).expect("adjacent boxes");
    let start_face = FaceId::new(path[0], axis.neg());
    let heading = match config.heading {
        Some(h) if h.is_perpendicular(axis) => h,
        Some(_) => return None,
        None => Direction::ALL.into_iter().find(|d| d.is_perpendicular(axis))?,
    };
    let start = Cursor::new(start_face, heading);

    let mut faces_before = Vec::with_capacity(path.len() + 1);
    faces_before.push(0);
    for i in 0..path.len() {
        faces_before.push(faces_before[i] + surface.box_face_count(i));
    }
    let mut state = UnfoldState {
        tube: tube.clone(),
        path,
        visited: vec![false; surface.len()],
        box_visited: vec![0; n + 2],
        surface,
        start,
        cursor: start,
        code: ChainCode::new(),
        qturn: 0,
        finished: false,
        checkpoints: Vec::new(),
        fragments: Vec::new(),
        trail: Vec::new(),
        faces_before,
    };
    state.visit(start_face);
    // The move from f_0 to f_1 carries no symbol.
    let first = state.surface.step(start, Turn::S).ok()?;
    state.visit(first.face);
    state.cursor = first;
    Some(state)
}

impl UnfoldState {
    pub fn tube(&self) -> &Orthotube {
        &self.tube
    }

    /// The temporary box past the end of the tube.
    pub fn terminal_cell(&self) -> Cell {
        *self.path.last().expect("path is never empty")
    }

    /// Tube cells plus the temporary box.
    pub fn extended_path(&self) -> &[Cell] {
        &self.path
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn start(&self) -> Cursor {
        self.start
    }

    pub fn cursor(&self) -> Cursor {
        self.cursor
    }

    pub fn code(&self) -> &ChainCode {
        &self.code
    }

    pub fn qturn(&self) -> i32 {
        self.qturn
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    /// Box containing the cursor.
    pub fn current_box(&self) -> usize {
        self.surface.box_of(self.cursor.face).expect("cursor is on the surface")
    }

    fn terminal_index(&self) -> usize {
        self.path.len() - 1
    }

    fn visit(&mut self, face: FaceId) {
        let idx = self.surface.face_index(face).expect("surface face");
        let b = self.surface.box_of_index(idx);
        self.visited[idx] = true;
        self.box_visited[b] += 1;
        let max = self.trail.last().map_or(b, |&(_, m)| m.max(b));
        self.trail.push((idx, max));
    }

    fn max_box(&self) -> usize {
        self.trail.last().map_or(0, |&(_, m)| m)
    }

    fn mark(&self) -> Mark {
        Mark {
            code_len: self.code.len(),
            trail_len: self.trail.len(),
            cursor: self.cursor,
            qturn: self.qturn,
        }
    }

    fn rollback(&mut self, m: Mark) {
        while self.trail.len() > m.trail_len {
            let (idx, _) = self.trail.pop().expect("trail longer than mark");
            self.visited[idx] = false;
            self.box_visited[self.surface.box_of_index(idx)] -= 1;
        }
        self.code.truncate(m.code_len);
        self.cursor = m.cursor;
        self.qturn = m.qturn;
        self.finished = false;
    }

    /// Apply one symbol if it keeps the walk admissible: quarter turning in
    /// `{-1,0,1}`, no revisits, and entry into the temporary box only from
    /// the last real box once every real face has been visited.
    fn push(&mut self, t: Turn) -> Option<Pushed> {
        let q = self.qturn + t.qturn();
        if !(-1..=1).contains(&q) {
            return None;
        }
        let next = self.surface.step(self.cursor, t).ok()?;
        let idx = self.surface.face_index(next.face)?;
        if self.visited[idx] {
            return None;
        }
        let b = self.surface.box_of_index(idx);
        let terminal = self.terminal_index();
        if b == terminal {
            let from = self.current_box();
            let real_faces = self.faces_before[terminal];
            if from + 1 != terminal || self.trail.len() != real_faces {
                return None;
            }
            self.code.push(t);
            self.qturn = q;
            self.cursor = next;
            self.finished = true;
            return Some(Pushed::Terminal);
        }
        self.code.push(t);
        self.qturn = q;
        self.cursor = next;
        self.visit(next.face);
        Some(Pushed::Open)
    }

    fn apply(&mut self, frag: &ChainCode) -> Option<Pushed> {
        for &t in frag.turns() {
            if self.push(t)? == Pushed::Terminal {
                return Some(Pushed::Terminal);
            }
        }
        Some(Pushed::Open)
    }

    /// Box index if the cursor sits on the first visited face of a box with
    /// every earlier box complete and nothing later touched.
    fn clean_box(&self) -> Option<usize> {
        let b = self.current_box();
        let clean = self.max_box() == b
            && self.box_visited[b] == 1
            && self.trail.len() == self.faces_before[b] + 1;
        clean.then_some(b)
    }

    /// Walk the plan; on success the state is left at a checkpoint with
    /// zero quarter turning (or finished). On failure it is rolled back.
    fn run_plan(&mut self, plan: &Plan) -> bool {
        let m = self.mark();
        let ok = self.run_steps(plan);
        if !ok {
            self.rollback(m);
        }
        ok
    }

    fn run_steps(&mut self, plan: &Plan) -> bool {
        let from = self.current_box();
        for step in plan {
            let pushed = match step {
                Step::Fixed(frag) => self.apply(frag),
                Step::Repeat { mirrored } => self.repeat(*mirrored),
            };
            match pushed {
                None => return false,
                Some(Pushed::Terminal) => return true,
                Some(Pushed::Open) => {}
            }
        }
        self.qturn == 0 && self.clean_box().is_some_and(|b| b > from)
    }

    /// `LRLR` repeated until `LSRL` brings the quarter turning back to zero
    /// at a fresh box. Each round consumes one box.
    fn repeat(&mut self, mirrored: bool) -> Option<Pushed> {
        let (close, carry) =
            if mirrored { (code("RSLR"), code("RLRL")) } else { (code("LSRL"), code("LRLR")) };
        for _ in 0..self.path.len() {
            self.clean_box()?;
            let m = self.mark();
            match self.apply(&close) {
                Some(Pushed::Terminal) => return Some(Pushed::Terminal),
                Some(Pushed::Open) if self.qturn == 0 && self.clean_box().is_some() => {
                    return Some(Pushed::Open)
                }
                _ => self.rollback(m),
            }
            if self.apply(&carry)? == Pushed::Terminal {
                return Some(Pushed::Terminal);
            }
        }
        None
    }

    /// Position of the hole of the cursor's box relative to the cursor.
    pub fn classify_n(&self) -> Result<NClass, UnfoldError> {
        let i = self.current_box();
        let hole =
            self.path[i].direction_to(self.path[i + 1]).expect("consecutive boxes are adjacent");
        let (normal, heading) = (self.cursor.face.normal, self.cursor.heading);
        let left = left_of(normal, heading).expect("cursor heading is tangent");
        if hole == heading {
            Ok(NClass::S)
        } else if hole == normal.neg() {
            Ok(NClass::O)
        } else if hole == left {
            Ok(NClass::L)
        } else if hole == left.neg() {
            Ok(NClass::R)
        } else {
            Err(UnfoldError::InvariantViolation {
                box_index: i,
                msg: format!("hole {hole} seen from {} heading {heading}", self.cursor.face),
            })
        }
    }

    fn rel(&self, i: usize) -> Option<Direction> {
        let a = self.path.get(i)?;
        let b = self.path.get(i + 1)?;
        a.direction_to(*b)
    }

    /// Candidate plans for the current checkpoint, in preference order,
    /// labelled by case.
    fn plans(&self, class: NClass) -> (&'static str, Vec<Plan>) {
        match class {
            NClass::S => ("S", vec![vec![fixed("LSSR")], vec![fixed("RSSL")]]),
            NClass::L => (
                "L",
                vec![vec![fixed("RLRL")], vec![fixed("RSLR"), Step::Repeat { mirrored: false }]],
            ),
            NClass::R => (
                "R",
                vec![vec![fixed("LRLR")], vec![fixed("LSRL"), Step::Repeat { mirrored: true }]],
            ),
            NClass::O => self.opposite_plans(),
        }
    }

    fn opposite_plans(&self) -> (&'static str, Vec<Plan>) {
        let i = self.current_box();
        let n = self.cursor.face.normal;
        let d = self.cursor.heading;
        let l = left_of(n, d).expect("cursor heading is tangent");

        // Next box sits at -n; the one after decides the subcase.
        let Some(second) = self.rel(i + 1) else {
            return ("O/end", vec![vec![fixed("RLSR")], vec![fixed("LRSL")]]);
        };
        if second == l.neg() {
            ("O/a", vec![vec![fixed("RLSRLRSL")], vec![fixed("LRSLRLRSRLSS")]])
        } else if second == l {
            ("O/b", vec![vec![fixed("LRSLRLSR")], vec![fixed("RLSRLRLSLRSS")]])
        } else if second == d {
            ("O/c", vec![vec![fixed("RLSR"), Step::Repeat { mirrored: false }]])
        } else if second == n.neg() {
            self.run_plans(i, n, d, l)
        } else {
            ("O/?", Vec::new())
        }
    }

    /// Next two boxes continue straight through the opposite face.
    fn run_plans(
        &self,
        i: usize,
        n: Direction,
        d: Direction,
        l: Direction,
    ) -> (&'static str, Vec<Plan>) {
        let turn_a = vec![fixed("RLSRLSSR"), Step::Repeat { mirrored: false }];
        let Some(third) = self.rel(i + 2) else {
            return ("O/d/end", vec![turn_a.clone(), mirror_plan(&turn_a)]);
        };
        if third == l.neg() {
            ("O/d/a", vec![turn_a])
        } else if third == l {
            ("O/d/b", vec![mirror_plan(&turn_a)])
        } else if third == d.neg() {
            ("O/d/c", vec![vec![fixed("LRSLRSSLRLSR")], vec![fixed("RLSRLSSRLRSL")]])
        } else if third == d {
            ("O/d/d", vec![vec![fixed("LSRRLLRLRLSR")], vec![fixed("RSLLRRLRLRSL")]])
        } else {
            ("O/d/e", self.collinear_plans(i, n))
        }
    }

    /// Four or more boxes in a line along `-n` starting at box `i`.
    fn collinear_plans(&self, i: usize, n: Direction) -> Vec<Plan> {
        const SEEDS: [&str; 4] = ["RLSRLSSRLSSR", "RSLLRRLRLSSR", "LRSLRSSLRSSL", "LSRRLLRLRSSL"];
        let along = n.neg();
        let last = self.path.len() - 1;
        // Smallest k >= 4 with box i+k off the line.
        let off = (4..=last.saturating_sub(i)).find(|&k| self.rel(i + k - 1) != Some(along));

        let mut plans = Vec::new();
        for seed in SEEDS {
            let seed = code(seed);
            let positive = crate::chaincode::qturn(&seed) > 0;
            let pad = if positive { code("LSSRLSSR") } else { code("RSSLRSSL") };
            let sign = |p: &Plan| if positive { p.clone() } else { mirror_plan(p) };
            match off {
                None => {
                    // The line runs into the terminal box.
                    let mut plan = vec![Step::Fixed(seed.clone())];
                    let remaining = last.saturating_sub(i + 3);
                    plan.extend((0..remaining / 2 + 1).map(|_| Step::Fixed(pad.clone())));
                    plans.push(plan);
                }
                Some(k) => {
                    let pads = if k % 2 == 0 { (k - 4) / 2 } else { (k - 5) / 2 };
                    let mut prefix = vec![Step::Fixed(seed.clone())];
                    prefix.extend((0..pads).map(|_| Step::Fixed(pad.clone())));
                    // Residual configurations, written for a +1 seed.
                    let residuals: Vec<Plan> = if k % 2 == 0 {
                        vec![
                            vec![fixed("LRSL")],
                            vec![fixed("LRLSLRSS")],
                            vec![Step::Repeat { mirrored: false }],
                        ]
                    } else {
                        vec![
                            vec![fixed("LSSR"), Step::Repeat { mirrored: false }],
                            vec![fixed("LSSRLRSL")],
                        ]
                    };
                    for r in residuals {
                        let mut plan = prefix.clone();
                        plan.extend(sign(&r));
                        plans.push(plan);
                    }
                }
            }
        }
        plans
    }

    /// Append the next fragment. Returns it with the number of boxes it
    /// completed.
    pub fn advance(&mut self) -> Result<(ChainCode, usize), UnfoldError> {
        let from_box = self.current_box();
        let from_len = self.code.len();
        let class = self.classify_n()?;
        let (case, plans) = self.plans(class);
        if !plans.iter().any(|p| self.run_plan(p)) {
            return Err(UnfoldError::NoFragment { box_index: from_box, class });
        }
        self.after_fragment(case, from_box, from_len)
    }

    fn after_fragment(
        &mut self,
        case: &'static str,
        from_box: usize,
        from_len: usize,
    ) -> Result<(ChainCode, usize), UnfoldError> {
        let frag = ChainCode::from_turns(self.code.turns()[from_len..].to_vec());
        self.fragments.push(Fragment { box_index: from_box, case, code: frag.clone() });
        if self.finished {
            return Ok((frag, self.terminal_index() - from_box));
        }
        let b = self.current_box();
        let axis = self.path[b - 1].direction_to(self.path[b]).expect("adjacent boxes");
        if self.cursor.heading != axis {
            return Err(UnfoldError::InvariantViolation {
                box_index: b,
                msg: format!("entered with heading {} instead of {axis}", self.cursor.heading),
            });
        }
        self.checkpoints.push(Checkpoint { box_index: b, code_len: self.code.len() });
        Ok((frag, b - from_box))
    }

    /// First box: `LSSR` or `RSSL` from the face opposite the first hole.
    fn base_case(&mut self, rssl_first: bool) -> Result<(ChainCode, usize), UnfoldError> {
        let mut order = [vec![fixed("LSSR")], vec![fixed("RSSL")]];
        if rssl_first {
            order.reverse();
        }
        if !order.iter().any(|p| self.run_plan(p)) {
            return Err(UnfoldError::NoFragment { box_index: 0, class: NClass::S });
        }
        self.after_fragment("base", 0, 0)
    }
}

/// Whether walking `fragment` from the state's cursor ends on a face of box
/// `target` (the temporary box counts as index `n + 1`).
pub fn continuable(state: &UnfoldState, fragment: &ChainCode, target: usize) -> bool {
    let mut cur = state.cursor;
    for &t in fragment.turns() {
        match state.surface.step(cur, t) {
            Ok(c) => cur = c,
            Err(_) => return false,
        }
    }
    state.surface.box_of(cur.face) == Some(target)
}

/// The next fragment and how many boxes it completes, without mutating
/// `state`.
pub fn select_fragment(state: &UnfoldState) -> Result<(ChainCode, usize), UnfoldError> {
    let mut scratch = state.clone();
    if scratch.code.is_empty() {
        scratch.base_case(false)
    } else {
        scratch.advance()
    }
}

/// Run the case machine for one configuration, without verification.
pub fn unfold_with(tube: &Orthotube, config: &UnfoldConfig) -> Result<Unfolding, UnfoldError> {
    let mut state = initial_state_with(tube, config).ok_or_else(|| UnfoldError::UnfoldFailed {
        tube: tube_summary(tube),
        diagnostics: vec![format!("unusable configuration {config:?}")],
    })?;
    state.base_case(config.base_rssl_first)?;
    while !state.finished {
        state.advance()?;
    }
    Ok(Unfolding {
        code: state.code,
        start: state.start,
        checkpoints: state.checkpoints,
        fragments: state.fragments,
        attempt: 0,
    })
}

/// Configurations in the order they are tried: the default first, then
/// every terminal side, start heading and base-case order.
pub fn configurations(tube: &Orthotube) -> Vec<UnfoldConfig> {
    let n = tube.last_index();
    let last = tube.cell(n);
    let axis0 = if n == 0 {
        Direction::PosX
    } else {
        tube.cell(0).direction_to(tube.cell(1)).expect("adjacent boxes")
    };
    let mut terminals = vec![None];
    terminals.extend(
        Direction::ALL.into_iter().filter(|&d| !tube.cells().contains(&last.step(d))).map(Some),
    );
    let mut out = vec![UnfoldConfig::default()];
    for terminal in terminals {
        let fixed_axis = if n == 0 { terminal.unwrap_or(Direction::PosX) } else { axis0 };
        let mut headings = vec![None];
        headings.extend(
            Direction::ALL.into_iter().filter(|d| d.is_perpendicular(fixed_axis)).map(Some),
        );
        for heading in headings {
            for base_rssl_first in [false, true] {
                let c = UnfoldConfig { terminal, heading, base_rssl_first };
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Unfold `tube`, verifying the result. Falls back through the other
/// configurations if the primary attempt does not verify.
pub fn unfold(tube: &Orthotube) -> Result<Unfolding, UnfoldError> {
    let mut diagnostics = Vec::new();
    for (attempt, config) in configurations(tube).into_iter().enumerate() {
        let result = match unfold_with(tube, &config) {
            Ok(u) => u,
            Err(UnfoldError::InvariantViolation { box_index, msg }) => {
                return Err(UnfoldError::InvariantViolation { box_index, msg })
            }
            Err(e) => {
                diagnostics.push(format!("attempt {attempt}: {e}"));
                continue;
            }
        };
        let report = verifier::verify(tube, result.start, &result.code);
        if report.overall && report.passed(PREFIX_QTURN) {
            if attempt > 0 {
                warn!(
                    "primary unfolding failed ({}); attempt {attempt} succeeded for tube [{}]",
                    diagnostics.join("; "),
                    tube_summary(tube)
                );
            }
            return Ok(Unfolding { attempt, ..result });
        }
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        diagnostics.push(format!("attempt {attempt}: verifier failed {failed:?}"));
    }
    Err(UnfoldError::UnfoldFailed { tube: tube_summary(tube), diagnostics })
}

fn tube_summary(tube: &Orthotube) -> String {
    tube.cells().iter().map(|c| format!("{} {} {}", c.x, c.y, c.z)).collect::<Vec<_>>().join(", ")
}
