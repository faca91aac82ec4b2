//! Index bookkeeping for editing gluing graphs in place.

use crate::exactalg::Mat2;
use crate::manifolds::{
    BaseSurface, Block, FiberPair, GraphManifold, Manifold, Port, SeifertBlock, Slope,
};

/// Drops a port that no gluing uses; later ports of the block shift down.
pub(crate) fn delete_port(g: &mut GraphManifold, port: Port) {
    for gl in &mut g.gluings {
        for end in [&mut gl.from, &mut gl.to] {
            if end.block == port.block && end.port > port.port {
                end.port -= 1;
            }
        }
    }
}

/// Removes a block that no gluing touches.
pub(crate) fn delete_block(g: &mut GraphManifold, b: usize) {
    g.blocks.remove(b);
    for gl in &mut g.gluings {
        for end in [&mut gl.from, &mut gl.to] {
            if end.block > b {
                end.block -= 1;
            }
        }
    }
}

/// Closes a free port: a Seifert block gains the fiber `(p, q)`, a cusped
/// block is filled along the slope `p/q`.
pub(crate) fn cap_port(g: &mut GraphManifold, port: Port, fiber: FiberPair) {
    match &mut g.blocks[port.block] {
        Block::Seifert(s) => {
            s.base.boundary -= 1;
            s.fibers.push(fiber);
        }
        Block::Cusped(fb) => {
            let cusp = fb.open_cusps()[port.port];
            let slope = Slope::new(fiber.p, fiber.q).expect("capping fibers are primitive");
            fb.slopes.0[cusp] = Some(slope);
        }
    }
    delete_port(g, port);
}

/// Caps several ports at once, highest port first so indices stay valid.
pub(crate) fn cap_ports(g: &mut GraphManifold, mut caps: Vec<(Port, FiberPair)>) {
    caps.sort_by(|a, b| b.0.cmp(&a.0));
    for (port, fiber) in caps {
        cap_port(g, port, fiber);
    }
}

/// Applies `-I` to the boundary of a Seifert block: every gluing joining it
/// to another block changes sign.
pub(crate) fn negate_block(g: &mut GraphManifold, b: usize) {
    for gl in &mut g.gluings {
        if !gl.is_self_gluing() && (gl.from.block == b || gl.to.block == b) {
            gl.matrix = -gl.matrix;
        }
    }
}

/// Gluing indices touching block `b`, each listed once.
pub(crate) fn gluings_at(g: &GraphManifold, b: usize) -> Vec<usize> {
    (0..g.gluings.len())
        .filter(|&i| g.gluings[i].from.block == b || g.gluings[i].to.block == b)
        .collect()
}

/// Component label of every block.
pub(crate) fn component_labels(g: &GraphManifold) -> Vec<usize> {
    let n = g.blocks.len();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        label[start] = next;
        while let Some(x) = stack.pop() {
            for gl in &g.gluings {
                for (a, b) in [(gl.from.block, gl.to.block), (gl.to.block, gl.from.block)] {
                    if a == x && label[b] == usize::MAX {
                        label[b] = next;
                        stack.push(b);
                    }
                }
            }
        }
        next += 1;
    }
    label
}

/// The connected components as separate graphs, in order of first block.
pub(crate) fn split_components(g: &GraphManifold) -> Vec<GraphManifold> {
    let label = component_labels(g);
    let count = label.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = Vec::with_capacity(count);
    for c in 0..count {
        let members: Vec<usize> = (0..g.blocks.len()).filter(|&b| label[b] == c).collect();
        let index = |b: usize| members.iter().position(|&m| m == b).expect("member");
        let blocks = members.iter().map(|&b| g.blocks[b].clone()).collect();
        let gluings = g
            .gluings
            .iter()
            .filter(|gl| label[gl.from.block] == c)
            .map(|gl| {
                let mut gl = *gl;
                gl.from.block = index(gl.from.block);
                gl.to.block = index(gl.to.block);
                gl
            })
            .collect();
        out.push(GraphManifold { blocks, gluings });
    }
    out
}

/// Whether removing gluing `i` disconnects its endpoints.
pub(crate) fn is_bridge(g: &GraphManifold, i: usize) -> bool {
    let mut rest = g.clone();
    let gl = rest.gluings.remove(i);
    let label = component_labels(&rest);
    label[gl.from.block] != label[gl.to.block]
}

/// Blocks reachable from `start` without crossing gluing `cut`.
pub(crate) fn side_of(g: &GraphManifold, cut: usize, start: usize) -> Vec<usize> {
    let mut rest = g.clone();
    rest.gluings.remove(cut);
    let label = component_labels(&rest);
    (0..g.blocks.len()).filter(|&b| label[b] == label[start]).collect()
}

/// `(c, h) ↦ (c, -h)`, the basis change induced by reversing orientation.
pub(crate) const FLIP: Mat2 = Mat2::new(1, 0, 0, -1);

/// `(c₀, h) = (c₁, h) · E` across an annulus block whose integral fibers
/// sum to `e`.
pub(crate) fn collar_matrix(e: i64) -> Mat2 {
    Mat2::new(-1, 0, e, 1)
}

pub(crate) fn seifert_mut(g: &mut GraphManifold, b: usize) -> &mut SeifertBlock {
    match &mut g.blocks[b] {
        Block::Seifert(s) => s,
        Block::Cusped(_) => unreachable!("caller checked the block is Seifert"),
    }
}

pub(crate) fn is_seifert(g: &GraphManifold, b: usize) -> bool {
    matches!(g.blocks[b], Block::Seifert(_))
}

/// Base obtained by identifying two boundary circles of `x` and `y` (or of
/// one base when `y` is `None`). `twisted` marks an identification that
/// reverses the fiber.
pub(crate) fn joined_base(x: BaseSurface, y: Option<BaseSurface>, twisted: bool) -> BaseSurface {
    let crosscaps = |b: BaseSurface| if b.orientable { 2 * b.genus } else { b.genus };
    match y {
        Some(y) => {
            let boundary = x.boundary + y.boundary - 2;
            if x.orientable && y.orientable {
                BaseSurface::orientable(x.genus + y.genus, boundary)
            } else {
                BaseSurface::nonorientable(crosscaps(x) + crosscaps(y), boundary)
            }
        }
        None => {
            let boundary = x.boundary - 2;
            if x.orientable && !twisted {
                BaseSurface::orientable(x.genus + 1, boundary)
            } else {
                BaseSurface::nonorientable(crosscaps(x) + 2, boundary)
            }
        }
    }
}

/// Normal form of `L(p, q)` up to homeomorphism: `p ≥ 0`, `L(0,1)`,
/// `L(1,0)`, else the least of `±q^{±1}` mod `p`.
pub fn lens_normal(p: i64, q: i64) -> (i64, i64) {
    let (p, q) = if p < 0 { (-p, -q) } else { (p, q) };
    match p {
        0 => (0, 1),
        1 => (1, 0),
        _ => {
            let r = q.rem_euclid(p);
            let mut best = r.min(p - r);
            if let Some(inv) = mod_inverse(r, p) {
                best = best.min(inv).min(p - inv);
            }
            (p, best)
        }
    }
}

pub(crate) fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (g, x, _) = ext_gcd(a, m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `L(P, Q)` for the closed block `(S², (a,b), (c,d))`.
pub(crate) fn lens_of_pair(x: FiberPair, y: FiberPair) -> Manifold {
    let (a, b, c, d) = (x.p, x.q, y.p, y.q);
    // a·s + b·r = -1
    let (_, s0, r0) = ext_gcd(a, b);
    let (s, r) = (-s0, -r0);
    let (p, q) = lens_normal(a * d + b * c, s * c - r * d);
    Manifold::Lens { p, q }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_forms() {
        assert_eq!(lens_normal(-5, 2), (5, 2));
        assert_eq!(lens_normal(5, 3), (5, 2));
        assert_eq!(lens_normal(5, 4), (5, 1));
        assert_eq!(lens_normal(7, 5), (7, 2));
        assert_eq!(lens_normal(7, 1), (7, 1));
        assert_eq!(lens_normal(0, -1), (0, 1));
        assert_eq!(lens_normal(1, 7), (1, 0));
    }

    #[test]
    fn extended_gcd() {
        for (a, b) in [(2, 1), (-3, 5), (0, 1), (1, 0), (7, -4)] {
            let (g, x, y) = ext_gcd(a, b);
            assert_eq!(g, 1);
            assert_eq!(a * x + b * y, 1);
        }
    }

    #[test]
    fn lens_from_pairs_has_right_order() {
        let l = lens_of_pair(FiberPair::new(2, 1), FiberPair::new(3, 1));
        assert!(matches!(l, Manifold::Lens { p: 5, .. }));
        assert_eq!(lens_of_pair(FiberPair::new(1, 0), FiberPair::new(1, 0)), Manifold::S2XS1);
    }
}
