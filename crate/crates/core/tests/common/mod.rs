//! Naive canonical tube count that never canonicalizes: every walk from
//! the origin is weighted by |stabilizer| / |group|, which sums to one per
//! class.

use std::collections::HashSet;

type P = [i32; 3];

const UNIT: [P; 6] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]];

/// Signed permutation matrices, found by filtering all 3x3 matrices over
/// {-1, 0, 1} for orthogonality.
fn matrices() -> Vec<[[i32; 3]; 3]> {
    let mut out = Vec::new();
    for code in 0..3i32.pow(9) {
        let mut m = [[0; 3]; 3];
        let mut c = code;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v = c % 3 - 1;
                c /= 3;
            }
        }
        let orthogonal = (0..3).all(|i| {
            (0..3).all(|j| {
                let dot: i32 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                dot == i32::from(i == j)
            })
        });
        if orthogonal {
            out.push(m);
        }
    }
    out
}

fn apply(m: &[[i32; 3]; 3], p: P) -> P {
    [0, 1, 2].map(|i| (0..3).map(|k| m[i][k] * p[k]).sum())
}

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn valid(walk: &[P]) -> bool {
    let set: HashSet<P> = walk.iter().copied().collect();
    if set.len() != walk.len() {
        return false;
    }
    for i in 0..walk.len() {
        for j in i + 2..walk.len() {
            let d = sub(walk[i], walk[j]);
            if d.iter().map(|v| v.abs()).sum::<i32>() == 1 {
                return false;
            }
        }
    }
    true
}

fn walks(len: usize) -> Vec<Vec<P>> {
    let mut out = vec![vec![[0, 0, 0]]];
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                UNIT.iter().map(move |u| {
                    let last = *w.last().unwrap();
                    let mut next = w.clone();
                    next.push([last[0] + u[0], last[1] + u[1], last[2] + u[2]]);
                    next
                })
            })
            .collect();
    }
    out.into_iter().filter(|w| valid(w)).collect()
}

pub fn naive_count(len: usize) -> usize {
    let group = matrices();
    assert_eq!(group.len(), 48);
    let order = 2 * group.len();
    let mut stab_total = 0;
    for w in walks(len) {
        let rev: Vec<P> = w.iter().rev().map(|&p| sub(p, *w.last().unwrap())).collect();
        for m in &group {
            for seq in [&w, &rev] {
                if seq.iter().zip(&w).all(|(&p, &q)| apply(m, p) == q) {
                    stab_total += 1;
                }
            }
        }
    }
    assert_eq!(stab_total % order, 0);
    stab_total / order
}
