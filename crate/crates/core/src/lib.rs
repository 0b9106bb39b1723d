//! Dual-Hamiltonian grid unfolding of orthotubes.
//!
//! An orthotube is a path of unit cubes glued face to face. [`unfolder`]
//! builds a chain code over `{L, R, S}` whose dual walk visits every surface
//! face exactly once and whose planar layout never overlaps. [`verifier`]
//! checks such codes independently, [`oracle`] enumerates all of them for
//! small tubes, and [`generator`] produces tubes to feed the rest.

pub mod chaincode;
pub mod cli;
pub mod generator;
pub mod lattice;
pub mod oracle;
pub mod par;
pub mod render;
pub mod surface;
pub mod unfolder;
pub mod verifier;

pub use chaincode::{parse_code, ChainCode, Turn};
pub use lattice::{validate_orthotube, Cell, Direction, FaceId, Orthotube};
pub use surface::{build_surface, Cursor, Surface};
pub use unfolder::{unfold, Unfolding};
pub use verifier::{verify, Report};
