//! Enumeration of residue discs `c + p^k Z_p` on which the square classes of
//! a list of integer polynomials are constant.

use num_bigint::BigInt;

use super::{square_class_int, vp, Place, SquareClass};
use crate::arith::IntPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafKind {
    /// every polynomial has constant square class on the disc
    Classes(Vec<SquareClass>),
    /// polynomial `poly` has a root in the disc (strong Hensel), the others
    /// have constant class
    Root {
        poly: usize,
        classes: Vec<Option<SquareClass>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscLeaf {
    pub center: BigInt,
    pub depth: u32,
    pub kind: LeafKind,
}

#[derive(Debug, Clone, Default)]
pub struct WalkOutcome {
    pub leaves: Vec<DiscLeaf>,
    /// discs still undecided at the depth cap
    pub undecided: Vec<(BigInt, u32)>,
    pub deepest: u32,
    pub stopped_early: bool,
}

enum Status {
    Constant(SquareClass),
    Root,
    Unknown,
}

fn status(g: &IntPoly, center: &BigInt, depth: u32, p: u64) -> Status {
    let t = g.taylor_at(center);
    let margin = if p == 2 { 3 } else { 1 };
    let tail = t
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(i, c)| vp(c, p).map(|v| v + i as u32 * depth))
        .min();
    match t.first().and_then(|c| vp(c, p)) {
        None if t.is_empty() => Status::Unknown,
        None => Status::Root,
        Some(v0) => {
            if tail.is_none_or(|m| v0 + margin <= m) {
                return Status::Constant(square_class_int(&t[0], Place::Finite(p)).unwrap());
            }
            let v1 = t.get(1).and_then(|c| vp(c, p));
            match v1 {
                Some(v1) if v0 > 2 * v1 && v0 - v1 >= depth => Status::Root,
                _ => Status::Unknown,
            }
        }
    }
}

/// Depth-first walk from the `start` discs, refining until every disc is a
/// leaf or the depth cap is hit. `stop` may end the walk early.
pub fn walk_discs(
    polys: &[IntPoly],
    p: u64,
    start: &[(BigInt, u32)],
    max_depth: u32,
    mut stop: impl FnMut(&DiscLeaf) -> bool,
) -> WalkOutcome {
    let pb = BigInt::from(p);
    let mut out = WalkOutcome::default();
    let mut stack: Vec<(BigInt, u32)> = start.iter().rev().cloned().collect();
    while let Some((c, k)) = stack.pop() {
        out.deepest = out.deepest.max(k);
        let statuses: Vec<Status> = polys.iter().map(|g| status(g, &c, k, p)).collect();
        let roots: Vec<usize> = statuses
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Status::Root))
            .map(|(i, _)| i)
            .collect();
        let unknown = statuses.iter().any(|s| matches!(s, Status::Unknown));
        let kind = if !unknown && roots.is_empty() {
            Some(LeafKind::Classes(
                statuses
                    .iter()
                    .map(|s| match s {
                        Status::Constant(c) => *c,
                        _ => unreachable!(),
                    })
                    .collect(),
            ))
        } else if !unknown && roots.len() == 1 {
            Some(LeafKind::Root {
                poly: roots[0],
                classes: statuses
                    .iter()
                    .map(|s| match s {
                        Status::Constant(c) => Some(*c),
                        _ => None,
                    })
                    .collect(),
            })
        } else {
            None
        };
        match kind {
            Some(kind) => {
                let leaf = DiscLeaf {
                    center: c,
                    depth: k,
                    kind,
                };
                let halt = stop(&leaf);
                out.leaves.push(leaf);
                if halt {
                    out.stopped_early = true;
                    return out;
                }
            }
            None if k >= max_depth => out.undecided.push((c, k)),
            None => {
                let step = pb.pow(k);
                for t in (0..p).rev() {
                    stack.push((&c + &step * t, k + 1));
                }
            }
        }
    }
    out
}

/// The `p` discs of depth 1 covering `Z_p`.
pub fn unit_discs(p: u64) -> Vec<(BigInt, u32)> {
    (0..p).map(|t| (BigInt::from(t), 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_polys_split_near_roots() {
        // x, x - 1 over Z_3: every disc is decided quickly
        let polys = vec![IntPoly::from_i64(&[0, 1]), IntPoly::from_i64(&[-1, 1])];
        let out = walk_discs(&polys, 3, &unit_discs(3), 10, |_| false);
        assert!(out.undecided.is_empty());
        let roots = out
            .leaves
            .iter()
            .filter(|l| matches!(l.kind, LeafKind::Root { .. }))
            .count();
        assert_eq!(roots, 2);
    }

    #[test]
    fn classes_are_constant_on_leaves() {
        let g = IntPoly::from_i64(&[31, -67, 11]).mul(&IntPoly::from_i64(&[-1, -3, -1]));
        for p in [2u64, 3, 5, 11] {
            let out = walk_discs(std::slice::from_ref(&g), p, &unit_discs(p), 12, |_| false);
            assert!(out.undecided.is_empty());
            let pb = BigInt::from(p);
            for leaf in &out.leaves {
                if let LeafKind::Classes(cls) = &leaf.kind {
                    for t in 0..p.min(5) {
                        let x = &leaf.center + pb.pow(leaf.depth) * t;
                        let c = square_class_int(&g.eval(&x), Place::Finite(p)).unwrap();
                        assert_eq!(c, cls[0]);
                    }
                }
            }
        }
    }
}
