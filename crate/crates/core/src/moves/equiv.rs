//! Three-valued equivalence: `Yes` only with a normal-form or conjugacy
//! witness, `No` only when a complete invariant differs.

use std::fmt;

use serde::Serialize;

use crate::chains::Registry;
use crate::exactalg::{abelian_iso, gl2_conjugate, Conjugacy};
use crate::homology::h1_in;
use crate::manifolds::{BaseSurface, Block, FiberPair, GraphManifold, Manifold};

use super::normal::{normalize, reverse};

/// Conjugator word length searched for torus-bundle monodromies.
const CONJUGACY_WORDS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    /// `invariant` names the complete invariant that differs.
    No { invariant: String },
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => f.write_str("yes"),
            Verdict::No { invariant } => write!(f, "no ({invariant} differs)"),
            Verdict::Unknown => f.write_str("unknown"),
        }
    }
}

fn no(invariant: &str) -> Verdict {
    Verdict::No { invariant: invariant.to_string() }
}

/// Unoriented equivalence, resolving cusped blocks in the built-in registry.
pub fn equivalent(a: &Manifold, b: &Manifold) -> Verdict {
    equivalent_in(Registry::builtin(), a, b)
}

pub fn equivalent_in(reg: &Registry, a: &Manifold, b: &Manifold) -> Verdict {
    let (na, nb) = (normalize(a), normalize(b));
    if na == nb {
        return Verdict::Yes;
    }
    if let Ok(ra) = reverse(&na) {
        if normalize(&ra) == nb {
            return Verdict::Yes;
        }
    }
    match (h1_in(reg, &na), h1_in(reg, &nb)) {
        (Ok(x), Ok(y)) if !abelian_iso(&x, &y) => return no("H1"),
        _ => {}
    }
    match (&na, &nb) {
        // Normal forms of lens spaces are complete up to homeomorphism.
        (Manifold::Lens { .. }, Manifold::Lens { .. }) => no("lens space normal form"),
        (Manifold::TorusBundle(x), Manifold::TorusBundle(y)) => match gl2_conjugate(x, y, CONJUGACY_WORDS) {
            Ok(Conjugacy::Yes { .. }) => Verdict::Yes,
            Ok(Conjugacy::No { invariant }) => no(&format!("monodromy {invariant}")),
            _ => Verdict::Unknown,
        },
        (Manifold::Graph(x), Manifold::Graph(y)) => compare_graphs(x, y),
        _ => Verdict::Unknown,
    }
}

/// Closed Seifert spaces over `S²` whose fibration is unique; their
/// normalized invariants are complete.
fn rigid_closed_sfs(g: &GraphManifold) -> bool {
    if g.blocks.len() != 1 || !g.gluings.is_empty() {
        return false;
    }
    let Block::Seifert(s) = &g.blocks[0] else { return false };
    if s.base != BaseSurface::SPHERE {
        return false;
    }
    let mut exc: Vec<i64> = s.fibers.iter().filter(|f| f.p >= 2).map(|f| f.p).collect();
    exc.sort_unstable();
    exc.len() >= 4 || (exc.len() == 3 && !(exc[0] == 2 && exc[1] == 2))
}

fn all_seifert(g: &GraphManifold) -> bool {
    g.blocks.iter().all(|b| matches!(b, Block::Seifert(_)))
}

/// Sorted block descriptions with fibers reduced to `q mod p`.
fn block_multiset(g: &GraphManifold, flip: bool) -> Vec<String> {
    let mut out: Vec<String> = g
        .blocks
        .iter()
        .map(|b| match b {
            // Both fibrations of the twisted I-bundle count as one block.
            Block::Seifert(s) if s.base == BaseSurface::MOBIUS && s.fibers.iter().all(|f| f.p == 1) => {
                "D:(2,1),(2,1)".to_string()
            }
            Block::Seifert(s) => {
                let mut fibers: Vec<FiberPair> = s
                    .fibers
                    .iter()
                    .filter(|f| f.p >= 2)
                    .map(|f| FiberPair::new(f.p, (if flip { -f.q } else { f.q }).rem_euclid(f.p)))
                    .collect();
                fibers.sort_unstable_by_key(|f| (f.p, f.q));
                let fibers: Vec<String> = fibers.iter().map(ToString::to_string).collect();
                format!("{}:{}", s.base, fibers.join(","))
            }
            Block::Cusped(fb) => format!("{}{}", fb.family, fb.slopes),
        })
        .collect();
    out.sort();
    out
}

/// `|n|` of gluings whose sides have unique fibrations; a `D22`/`Mb` side
/// changes `|n|` when it switches.
fn intersections(g: &GraphManifold) -> Vec<u64> {
    let one_port = |b: usize| match &g.blocks[b] {
        Block::Seifert(s) => s.base.boundary == 1 && (s.base == BaseSurface::MOBIUS || s.base == BaseSurface::DISK),
        Block::Cusped(_) => false,
    };
    let mut v: Vec<u64> = g
        .gluings
        .iter()
        .filter(|gl| !one_port(gl.from.block) && !one_port(gl.to.block))
        .map(|gl| gl.matrix.b.unsigned_abs())
        .collect();
    v.sort_unstable();
    v
}

fn compare_graphs(x: &GraphManifold, y: &GraphManifold) -> Verdict {
    if rigid_closed_sfs(x) && rigid_closed_sfs(y) {
        return no("Seifert invariants");
    }
    if all_seifert(x) && all_seifert(y) && x.blocks.len() > 1 && y.blocks.len() > 1 {
        let bx = block_multiset(x, false);
        if bx != block_multiset(y, false) && bx != block_multiset(y, true) {
            return no("block multiset");
        }
        if intersections(x) != intersections(y) {
            return no("fiber intersection multiset");
        }
    }
    Verdict::Unknown
}
