//! The move calculus on graph-manifold expressions: the eleven rewriting
//! rules, a normal form, and a three-valued equivalence test.
//!
//! Moves act on a `Manifold::Graph`; use [`apply_move_in_summand`] to reach
//! one summand of a connected sum. Fiber shifts use the exact matrix updates
//!
//! ```text
//! (6)  (Σ,(a,b),…) ∪_[m,n;p,q] X  =  (Σ,(a,b+ka),…) ∪_[m+kn,n;p+kq,q] X
//! (7)  X ∪_[m,n;p,q] (Σ,(a,b),…)  =  X ∪_[m,n;p−km,q−kn] (Σ,(a,b+ka),…)
//! (8)  D22 ∪_[m,n;p,q] X  =  Mb ∪_[n,n−m;q,q−p] X
//! (9)  X ∪_[m,n;p,q] D22  =  X ∪_[m+p,n+q;−m,−n] Mb
//! ```
//!
//! where `D22 = (D,(2,1),(2,1))` and `Mb` is the orientable circle bundle
//! over the Möbius band.

mod equiv;
mod normal;
mod surgery;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::Mat2;
use crate::manifolds::{BaseSurface, Block, FiberPair, GraphManifold, Manifold, Port, SeifertBlock};

pub use equiv::{equivalent, equivalent_in, Verdict};
pub use normal::{normalize, reverse};
pub use surgery::lens_normal;
pub(crate) use surgery::lens_of_pair;

use surgery::{is_bridge, is_seifert, seifert_mut, side_of};

/// One application site of a move. Block, fiber and gluing indices refer to
/// the target graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// (1) Reverse orientation: every `(a,b)` becomes `(a,-b)`.
    Reverse,
    /// (2) `(a,b),(c,d) → (a,b+ka),(c,d−kc)` inside one block.
    Transfer { block: usize, first: usize, second: usize, k: i64 },
    /// (3) `(a,b) → (a,b+ka)` in a block with boundary.
    Shift { block: usize, fiber: usize, k: i64 },
    /// (4) Drop a `(1,0)` fiber.
    DropTrivial { block: usize, fiber: usize },
    /// (5) Negate the matrix of a gluing between distinct blocks.
    Negate { gluing: usize },
    /// (6) Shift a fiber of the block on the `from` side of a gluing.
    ShiftFrom { gluing: usize, fiber: usize, k: i64 },
    /// (7) Shift a fiber of the block on the `to` side of a gluing.
    ShiftTo { gluing: usize, fiber: usize, k: i64 },
    /// (8) Swap `D22` and `Mb` on the `from` side of a gluing.
    RefiberFrom { gluing: usize },
    /// (9) Swap `D22` and `Mb` on the `to` side of a gluing.
    RefiberTo { gluing: usize },
    /// (10) Split a lone block along a `(0,1)` fiber into lens summands.
    SplitClosed { fiber: usize },
    /// (11) Split a glued block along a `(0,1)` fiber, capping its neighbours.
    SplitGlued { block: usize, fiber: usize },
}

impl Move {
    /// Number of the rule in the move list, 1 to 11.
    pub fn number(&self) -> u8 {
        match self {
            Move::Reverse => 1,
            Move::Transfer { .. } => 2,
            Move::Shift { .. } => 3,
            Move::DropTrivial { .. } => 4,
            Move::Negate { .. } => 5,
            Move::ShiftFrom { .. } => 6,
            Move::ShiftTo { .. } => 7,
            Move::RefiberFrom { .. } => 8,
            Move::RefiberTo { .. } => 9,
            Move::SplitClosed { .. } => 10,
            Move::SplitGlued { .. } => 11,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "move {}", self.number())?;
        match self {
            Move::Reverse => Ok(()),
            Move::Transfer { block, first, second, k } => {
                write!(f, " at block {block}, fibers {first},{second}, k={k}")
            }
            Move::Shift { block, fiber, k } => write!(f, " at block {block}, fiber {fiber}, k={k}"),
            Move::DropTrivial { block, fiber } => write!(f, " at block {block}, fiber {fiber}"),
            Move::Negate { gluing } | Move::RefiberFrom { gluing } | Move::RefiberTo { gluing } => {
                write!(f, " at gluing {gluing}")
            }
            Move::ShiftFrom { gluing, fiber, k } | Move::ShiftTo { gluing, fiber, k } => {
                write!(f, " at gluing {gluing}, fiber {fiber}, k={k}")
            }
            Move::SplitClosed { fiber } => write!(f, " at fiber {fiber}"),
            Move::SplitGlued { block, fiber } => write!(f, " at block {block}, fiber {fiber}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("{0} needs a gluing graph")]
    NotAGraph(Move),
    #[error("{mv}: no {what} {index}")]
    NoSite { mv: Move, what: &'static str, index: usize },
    #[error("{mv}: block {block} is not a Seifert block")]
    NotSeifert { mv: Move, block: usize },
    #[error("move 1 cannot reverse the cusped block {0}: its slope data are oriented")]
    ReverseCusped(String),
    #[error("{mv}: fiber ({p},{q}) is not (1,0)")]
    NotTrivial { mv: Move, p: i64, q: i64 },
    #[error("move 3 needs a block with boundary; block {0} is closed")]
    ClosedBlock(usize),
    #[error("move 5 applies only between distinct blocks; gluing {0} is a self-gluing")]
    SelfGluing(usize),
    #[error("move 5: gluing {0} lies on a cycle, so negating one side changes other gluings")]
    NotABridge(usize),
    #[error("move 5: both sides of gluing {0} contain cusped blocks")]
    CuspedSides(usize),
    #[error("{mv}: block {block} is neither (D,(2,1),(2,1)) nor the circle bundle over Mb")]
    NotRefiberable { mv: Move, block: usize },
    #[error("{mv}: fiber ({p},{q}) is not degenerate")]
    NotDegenerate { mv: Move, p: i64, q: i64 },
    #[error("move 10 splits a lone block; use move 11 when the block is glued")]
    GluedBlock,
    #[error("move 11 splits a glued block; use move 10 for a lone block")]
    LoneBlock,
    #[error("summand {index} out of range for a sum of {len}")]
    Summand { index: usize, len: usize },
}

/// `|n|` for `[[m,n],[p,q]]`: the geometric intersection of the two fibers.
pub fn fiber_intersection(matrix: &Mat2) -> u64 {
    matrix.b.unsigned_abs()
}

/// Fiber intersections of every gluing between two Seifert blocks, sorted.
pub fn fiber_intersections(expr: &Manifold) -> Vec<u64> {
    let mut out = Vec::new();
    collect_intersections(expr, &mut out);
    out.sort_unstable();
    out
}

fn collect_intersections(expr: &Manifold, out: &mut Vec<u64>) {
    match expr {
        Manifold::Graph(g) => {
            for gl in &g.gluings {
                if is_seifert(g, gl.from.block) && is_seifert(g, gl.to.block) {
                    out.push(fiber_intersection(&gl.matrix));
                }
            }
        }
        Manifold::Sum(parts) => parts.iter().for_each(|p| collect_intersections(p, out)),
        _ => {}
    }
}

/// Applies one move to a whole expression.
pub fn apply_move(expr: &Manifold, mv: Move) -> Result<Manifold, MoveError> {
    if mv == Move::Reverse {
        return reverse(expr);
    }
    match expr {
        Manifold::Graph(g) => apply_to_graph(g, mv),
        _ => Err(MoveError::NotAGraph(mv)),
    }
}

/// Applies a move to summand `index` of a connected sum.
pub fn apply_move_in_summand(expr: &Manifold, index: usize, mv: Move) -> Result<Manifold, MoveError> {
    match expr {
        Manifold::Sum(parts) => {
            let part = parts.get(index).ok_or(MoveError::Summand { index, len: parts.len() })?;
            let mut out = parts.clone();
            out[index] = apply_move(part, mv)?;
            Ok(Manifold::Sum(out))
        }
        other => {
            if index == 0 {
                apply_move(other, mv)
            } else {
                Err(MoveError::Summand { index, len: 1 })
            }
        }
    }
}

fn seifert_at<'a>(g: &'a GraphManifold, mv: Move, block: usize) -> Result<&'a SeifertBlock, MoveError> {
    match g.blocks.get(block) {
        None => Err(MoveError::NoSite { mv, what: "block", index: block }),
        Some(Block::Seifert(s)) => Ok(s),
        Some(Block::Cusped(_)) => Err(MoveError::NotSeifert { mv, block }),
    }
}

fn fiber_at(s: &SeifertBlock, mv: Move, fiber: usize) -> Result<FiberPair, MoveError> {
    s.fibers.get(fiber).copied().ok_or(MoveError::NoSite { mv, what: "fiber", index: fiber })
}

fn gluing_index(g: &GraphManifold, mv: Move, gluing: usize) -> Result<usize, MoveError> {
    if gluing < g.gluings.len() {
        Ok(gluing)
    } else {
        Err(MoveError::NoSite { mv, what: "gluing", index: gluing })
    }
}

/// Matrix change when the block on one side of a gluing absorbs a shift `k`.
pub(crate) fn shifted(m: Mat2, from_side: bool, k: i64) -> Mat2 {
    if from_side {
        Mat2::new(m.a + k * m.b, m.b, m.c + k * m.d, m.d)
    } else {
        Mat2::new(m.a, m.b, m.c - k * m.a, m.d - k * m.b)
    }
}

/// Matrix after swapping the fibration of a one-port block, per (8) and (9);
/// `to_mobius` selects the direction.
pub(crate) fn refibered(m: Mat2, from_side: bool, to_mobius: bool) -> Mat2 {
    let (a, b, c, d) = (m.a, m.b, m.c, m.d);
    match (from_side, to_mobius) {
        (true, true) => Mat2::new(b, b - a, d, d - c),
        (true, false) => Mat2::new(a - b, a, c - d, c),
        (false, true) => Mat2::new(a + c, b + d, -a, -b),
        (false, false) => Mat2::new(-c, -d, a + c, b + d),
    }
}

pub(crate) fn is_d22(s: &SeifertBlock) -> bool {
    s.base == BaseSurface::DISK && s.fibers == [FiberPair::new(2, 1), FiberPair::new(2, 1)]
}

pub(crate) fn is_mobius_bundle(s: &SeifertBlock) -> bool {
    s.base == BaseSurface::MOBIUS && s.fibers.is_empty()
}

fn apply_to_graph(g: &GraphManifold, mv: Move) -> Result<Manifold, MoveError> {
    let mut out = g.clone();
    match mv {
        Move::Reverse => unreachable!("handled by apply_move"),
        Move::Transfer { block, first, second, k } => {
            let s = seifert_at(g, mv, block)?;
            let (x, y) = (fiber_at(s, mv, first)?, fiber_at(s, mv, second)?);
            let s = seifert_mut(&mut out, block);
            if first == second {
                // The two shifts cancel on a single fiber.
                return Ok(Manifold::Graph(out));
            }
            s.fibers[first] = FiberPair::new(x.p, x.q + k * x.p);
            s.fibers[second] = FiberPair::new(y.p, y.q - k * y.p);
        }
        Move::Shift { block, fiber, k } => {
            let s = seifert_at(g, mv, block)?;
            let x = fiber_at(s, mv, fiber)?;
            if s.base.boundary == 0 {
                return Err(MoveError::ClosedBlock(block));
            }
            let has_free = g.free_ports().iter().any(|p| p.block == block);
            if !has_free {
                // All boundary is glued: the shift lands in a gluing, which
                // is move 6 or 7 at the first port.
                let (gi, from_side) = g.gluing_at(Port::new(block, 0)).expect("closed port is glued");
                let m = g.gluings[gi].matrix;
                out.gluings[gi].matrix = shifted(m, from_side, k);
            }
            seifert_mut(&mut out, block).fibers[fiber] = FiberPair::new(x.p, x.q + k * x.p);
        }
        Move::DropTrivial { block, fiber } => {
            let s = seifert_at(g, mv, block)?;
            let x = fiber_at(s, mv, fiber)?;
            if (x.p, x.q) != (1, 0) && (x.p, x.q) != (-1, 0) {
                return Err(MoveError::NotTrivial { mv, p: x.p, q: x.q });
            }
            seifert_mut(&mut out, block).fibers.remove(fiber);
        }
        Move::Negate { gluing } => {
            let gi = gluing_index(g, mv, gluing)?;
            let gl = g.gluings[gi];
            if gl.is_self_gluing() {
                return Err(MoveError::SelfGluing(gi));
            }
            if !is_bridge(g, gi) {
                return Err(MoveError::NotABridge(gi));
            }
            let all_seifert = |start| side_of(g, gi, start).into_iter().all(|b| is_seifert(g, b));
            if !all_seifert(gl.to.block) && !all_seifert(gl.from.block) {
                return Err(MoveError::CuspedSides(gi));
            }
            out.gluings[gi].matrix = -gl.matrix;
        }
        Move::ShiftFrom { gluing, fiber, k } | Move::ShiftTo { gluing, fiber, k } => {
            let gi = gluing_index(g, mv, gluing)?;
            let from_side = matches!(mv, Move::ShiftFrom { .. });
            let gl = g.gluings[gi];
            let block = if from_side { gl.from.block } else { gl.to.block };
            let s = seifert_at(g, mv, block)?;
            let x = fiber_at(s, mv, fiber)?;
            seifert_mut(&mut out, block).fibers[fiber] = FiberPair::new(x.p, x.q + k * x.p);
            out.gluings[gi].matrix = shifted(gl.matrix, from_side, k);
        }
        Move::RefiberFrom { gluing } | Move::RefiberTo { gluing } => {
            let gi = gluing_index(g, mv, gluing)?;
            let from_side = matches!(mv, Move::RefiberFrom { .. });
            let gl = g.gluings[gi];
            let block = if from_side { gl.from.block } else { gl.to.block };
            let s = seifert_at(g, mv, block)?;
            let to_mobius = if is_d22(s) {
                true
            } else if is_mobius_bundle(s) {
                false
            } else {
                return Err(MoveError::NotRefiberable { mv, block });
            };
            *seifert_mut(&mut out, block) = if to_mobius {
                SeifertBlock::new(BaseSurface::MOBIUS, Vec::new())
            } else {
                SeifertBlock::pairs(BaseSurface::DISK, &[(2, 1), (2, 1)])
            };
            out.gluings[gi].matrix = refibered(gl.matrix, from_side, to_mobius);
        }
        Move::SplitClosed { fiber } => {
            if g.blocks.len() != 1 || !g.gluings.is_empty() {
                return Err(MoveError::GluedBlock);
            }
            return split_degenerate(g, mv, 0, fiber);
        }
        Move::SplitGlued { block, fiber } => {
            seifert_at(g, mv, block)?;
            if surgery::gluings_at(g, block).is_empty() {
                return Err(MoveError::LoneBlock);
            }
            return split_degenerate(g, mv, block, fiber);
        }
    }
    Ok(Manifold::Graph(out))
}

fn split_degenerate(g: &GraphManifold, mv: Move, block: usize, fiber: usize) -> Result<Manifold, MoveError> {
    let s = seifert_at(g, mv, block)?;
    let x = fiber_at(s, mv, fiber)?;
    if x.p != 0 {
        return Err(MoveError::NotDegenerate { mv, p: x.p, q: x.q });
    }
    Ok(normal::degenerate_split(g, block, fiber))
}

#[cfg(test)]
mod tests;
