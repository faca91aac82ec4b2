//! Random expression generator shared by the property and acceptance tests.
#![allow(dead_code)]

use chainfill::exactalg::Mat2;
use chainfill::manifolds::{
    BaseSurface, Block, FiberPair, FilledBlock, FillingTuple, Gluing, GraphManifold, Manifold, Port, SeifertBlock, Slope,
};
use chainfill::moves::Move;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn fiber(r: &mut StdRng) -> FiberPair {
    let p = if r.random_bool(0.08) { 0 } else { r.random_range(1..=5) };
    if p == 0 {
        return FiberPair::new(0, if r.random_bool(0.5) { 1 } else { -1 });
    }
    loop {
        let q = r.random_range(-7..=7);
        if gcd(p, q) == 1 {
            return FiberPair::new(p, q);
        }
    }
}

/// Random `GL(2,Z)` element with determinant `det`, entries kept small.
pub fn unimodular(r: &mut StdRng, det: i64) -> Mat2 {
    let gens = [Mat2::new(1, 1, 0, 1), Mat2::new(1, 0, 1, 1), Mat2::new(1, -1, 0, 1), Mat2::new(1, 0, -1, 1), Mat2::new(0, -1, 1, 0)];
    let mut m = if det == -1 { Mat2::new(0, 1, 1, 0) } else { Mat2::IDENTITY };
    for _ in 0..r.random_range(0..=4) {
        m = *gens.choose(r).expect("nonempty") * m;
    }
    if r.random_bool(0.5) {
        -m
    } else {
        m
    }
}

/// `M3` with two cusps filled and one left open.
fn cusped(r: &mut StdRng) -> Block {
    let mut slopes = vec![None; 3];
    let open = r.random_range(0..3);
    for (i, s) in slopes.iter_mut().enumerate() {
        if i != open {
            let f = fiber(r);
            *s = Some(Slope::new(f.q, f.p).expect("fibers are nonzero"));
        }
    }
    Block::Cusped(FilledBlock::new("M3", 3, FillingTuple(slopes)))
}

fn base_with_ports(r: &mut StdRng, at_least: u32) -> BaseSurface {
    let choices: &[BaseSurface] = match at_least {
        0 => &[BaseSurface::SPHERE, BaseSurface::SPHERE, BaseSurface::DISK, BaseSurface::PROJECTIVE_PLANE, BaseSurface::ANNULUS, BaseSurface::PANTS],
        1 => &[BaseSurface::DISK, BaseSurface::DISK, BaseSurface::ANNULUS, BaseSurface::MOBIUS, BaseSurface::orientable(1, 1), BaseSurface::PANTS],
        _ => &[BaseSurface::ANNULUS, BaseSurface::ANNULUS, BaseSurface::PANTS, BaseSurface::orientable(0, 4)],
    };
    *choices.choose(r).expect("nonempty")
}

fn seifert(r: &mut StdRng, base: BaseSurface) -> Block {
    let n = r.random_range(0..=3);
    Block::Seifert(SeifertBlock::new(base, (0..n).map(|_| fiber(r)).collect()))
}

/// A chain of one to three Seifert blocks, sometimes with a D22 end.
pub fn graph(r: &mut StdRng) -> GraphManifold {
    let n = r.random_range(1..=4usize);
    let mut blocks = Vec::new();
    for i in 0..n {
        let need = match (n, i) {
            (1, _) => 0,
            (_, 0) => 1,
            (_, i) if i + 1 == n => 1,
            _ => 2,
        };
        let block = if need == 1 && r.random_bool(0.25) {
            Block::Seifert(SeifertBlock::pairs(BaseSurface::DISK, &[(2, 1), (2, 1)]))
        } else {
            let base = base_with_ports(r, need);
            seifert(r, base)
        };
        blocks.push(block);
    }
    let mut gluings = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let from_port = if i == 0 { 0 } else { 1 };
        gluings.push(Gluing::new(Port::new(i, from_port), Port::new(i + 1, 0), unimodular(r, -1)));
    }
    if n >= 2 && r.random_bool(0.2) {
        blocks[n - 1] = cusped(r);
    }
    let mut g = GraphManifold { blocks, gluings };
    for b in 0..n {
        let free: Vec<Port> = g.free_ports().into_iter().filter(|p| p.block == b).collect();
        if free.len() >= 2 && r.random_bool(0.4) {
            g.gluings.push(Gluing::new(free[0], free[1], unimodular(r, -1)));
        }
    }
    g
}

pub fn expr(r: &mut StdRng) -> Manifold {
    match r.random_range(0..10) {
        0 => Manifold::Lens { p: r.random_range(0..12), q: r.random_range(-5..=5) },
        1 => Manifold::Sum(vec![Manifold::Graph(graph(r)), Manifold::Lens { p: r.random_range(2..7), q: 1 }]),
        _ => Manifold::Graph(graph(r)),
    }
    .sanitized()
}

trait Sanitize {
    fn sanitized(self) -> Manifold;
}

impl Sanitize for Manifold {
    /// Lens parameters must be coprime.
    fn sanitized(self) -> Manifold {
        match self {
            Manifold::Lens { p, q } if gcd(p, q) != 1 => Manifold::Lens { p, q: 1 },
            other => other,
        }
    }
}

/// A random move site in `g`; the move may still be rejected.
pub fn random_move(r: &mut StdRng, g: &GraphManifold) -> Move {
    let block = r.random_range(0..g.blocks.len());
    let fibers = g.blocks[block].as_seifert().map_or(0, |s| s.fibers.len()).max(1);
    let fiber = r.random_range(0..fibers);
    let gluing = if g.gluings.is_empty() { 0 } else { r.random_range(0..g.gluings.len()) };
    let k = r.random_range(-3..=3);
    match r.random_range(0..11) {
        0 => Move::Reverse,
        1 => Move::Transfer { block, first: fiber, second: r.random_range(0..fibers), k },
        2 => Move::Shift { block, fiber, k },
        3 => Move::DropTrivial { block, fiber },
        4 => Move::Negate { gluing },
        5 => Move::ShiftFrom { gluing, fiber: r.random_range(0..fibers_at(g, gluing, true).max(1)), k },
        6 => Move::ShiftTo { gluing, fiber: r.random_range(0..fibers_at(g, gluing, false).max(1)), k },
        7 => Move::RefiberFrom { gluing },
        8 => Move::RefiberTo { gluing },
        9 => Move::SplitClosed { fiber },
        _ => Move::SplitGlued { block, fiber },
    }
}

fn fibers_at(g: &GraphManifold, gluing: usize, from_side: bool) -> usize {
    let Some(gl) = g.gluings.get(gluing) else { return 0 };
    let b = if from_side { gl.from.block } else { gl.to.block };
    g.blocks[b].as_seifert().map_or(0, |s| s.fibers.len())
}
