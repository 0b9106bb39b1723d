//! Independent check of a (tube, start cursor, chain code) triple against the
//! definition of a dual-Hamiltonian, non-overlapping unfolding.

use std::collections::HashSet;
use std::fmt::Write;

use serde::Serialize;

use crate::chaincode::{has_overlap, prefix_monotone, qturn, ChainCode};
use crate::lattice::Orthotube;
use crate::surface::{build_surface, Cursor};

pub const LENGTH: &str = "LENGTH";
pub const WALK: &str = "WALK";
pub const HAMILTONIAN: &str = "HAMILTONIAN";
pub const NONOVERLAP: &str = "NONOVERLAP";
pub const PREFIX_QTURN: &str = "PREFIX_QTURN";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    /// LENGTH, WALK, HAMILTONIAN and NONOVERLAP all pass. PREFIX_QTURN is
    /// reported but not required.
    pub overall: bool,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.check(name).is_some_and(|c| c.pass)
    }

    /// `CHECK <NAME> PASS|FAIL <detail>` lines followed by an overall line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "CHECK {} {} {}", c.name, pass_word(c.pass), c.detail);
        }
        let _ = writeln!(out, "OVERALL {}", pass_word(self.overall));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn verify(tube: &Orthotube, start: Cursor, code: &ChainCode) -> Report {
    let surface = build_surface(tube);
    let expected = 4 * tube.last_index() + 4;
    let mut checks = Vec::with_capacity(5);

    checks.push(Check {
        name: LENGTH,
        pass: code.len() == expected,
        detail: format!("{} symbols, expected {}", code.len(), expected),
    });

    let walk = surface.walk(start, code);
    checks.push(Check {
        name: WALK,
        pass: walk.is_ok(),
        detail: match &walk {
            Ok(faces) => {
                format!("{} faces from {} heading {}", faces.len(), start.face, start.heading)
            }
            Err(e) => e.to_string(),
        },
    });

    let (ham_pass, ham_detail) = match &walk {
        Err(_) => (false, "no walk".to_string()),
        Ok(faces) => {
            let mut seen = HashSet::with_capacity(faces.len());
            match faces.iter().position(|f| !seen.insert(*f)) {
                Some(k) => (false, format!("face {} revisited at step {}", faces[k], k)),
                None if faces.len() != surface.len() => {
                    (false, format!("{} of {} faces visited", faces.len(), surface.len()))
                }
                None => (true, format!("all {} faces visited once", surface.len())),
            }
        }
    };
    checks.push(Check { name: HAMILTONIAN, pass: ham_pass, detail: ham_detail });

    let overlap = has_overlap(code);
    checks.push(Check {
        name: NONOVERLAP,
        pass: !overlap,
        detail: if overlap { "dual revisits a point" } else { "dual points distinct" }.to_string(),
    });

    let monotone = prefix_monotone(code);
    checks.push(Check {
        name: PREFIX_QTURN,
        pass: monotone,
        detail: format!("final qturn {}", qturn(code)),
    });

    let overall = checks[..4].iter().all(|c| c.pass);
    Report { checks, overall }
}
