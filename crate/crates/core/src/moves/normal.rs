//! Simplification to a fixpoint, then a canonical labeling.
//!
//! Simplification removes everything that is not a JSJ-style piece:
//! degenerate fibers, solid tori, collars `A×S¹`, gluings whose fibers
//! match (`n = 0`, merged into one block), and closed lens spaces. The
//! canonical step then fixes gluing signs, pushes fiber shifts into a sink
//! per block, picks `D22` or `Mb` for every one-port block, and takes the
//! least key over all relabelings.

use std::cmp::Ordering;

use crate::exactalg::{canonical_monodromy, Mat2};
use crate::manifolds::{BaseSurface, Block, FiberPair, Gluing, GraphManifold, Manifold, Port, SeifertBlock};
use crate::notation::print_expr;

use super::surgery::{
    cap_port, cap_ports, collar_matrix, component_labels, delete_block, delete_port, gluings_at, is_seifert,
    joined_base, lens_normal, lens_of_pair, negate_block, seifert_mut, split_components, FLIP,
};
use super::{refibered, shifted, MoveError};

/// Relabelings examined per canonical form before falling back to the
/// input order.
const LABELING_CAP: usize = 50_000;
/// One-port blocks whose fibration choice is searched exhaustively.
const REFIBER_CAP: usize = 6;

/// Move (1) on a whole expression.
pub fn reverse(expr: &Manifold) -> Result<Manifold, MoveError> {
    Ok(match expr {
        Manifold::Graph(g) => {
            let mut out = g.clone();
            for block in &mut out.blocks {
                match block {
                    Block::Seifert(s) => s.fibers.iter_mut().for_each(|f| f.q = -f.q),
                    Block::Cusped(fb) => return Err(MoveError::ReverseCusped(fb.family.clone())),
                }
            }
            for gl in &mut out.gluings {
                gl.matrix = FLIP * gl.matrix * FLIP;
            }
            Manifold::Graph(out)
        }
        Manifold::TorusBundle(a) => Manifold::TorusBundle(a.inverse().expect("monodromies are unimodular")),
        Manifold::Lens { p, q } => Manifold::Lens { p: *p, q: -q },
        Manifold::Sum(parts) => Manifold::Sum(parts.iter().map(reverse).collect::<Result<_, _>>()?),
        Manifold::SolidTorus => Manifold::SolidTorus,
        Manifold::Filled(fb) => return Err(MoveError::ReverseCusped(fb.family.clone())),
    })
}

/// Canonical form; `normalize(normalize(e)) == normalize(e)`.
pub fn normalize(expr: &Manifold) -> Manifold {
    finish(simplify(expr.clone()))
}

fn simplify(expr: Manifold) -> Manifold {
    match expr {
        Manifold::Sum(parts) => make_sum(parts.into_iter().map(simplify).collect()),
        Manifold::Lens { p, q } => {
            let (p, q) = lens_normal(p, q);
            Manifold::Lens { p, q }
        }
        Manifold::Graph(g) => simplify_graph(g),
        other => other,
    }
}

/// Flattens nested sums and drops `S³` summands.
fn make_sum(parts: Vec<Manifold>) -> Manifold {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Manifold::Sum(inner) => out.extend(inner),
            m if m == Manifold::S3 => {}
            m => out.push(m),
        }
    }
    match out.len() {
        0 => Manifold::S3,
        1 => out.pop().expect("one summand"),
        _ => Manifold::Sum(out),
    }
}

fn simplify_graph(mut g: GraphManifold) -> Manifold {
    loop {
        if g.blocks.is_empty() {
            return Manifold::S3;
        }
        if g.components() > 1 {
            let parts = split_components(&g).into_iter().map(simplify_graph).collect();
            return make_sum(parts);
        }
        fix_fiber_signs(&mut g);
        if let Some((b, f)) = find_degenerate(&g) {
            return simplify(degenerate_split(&g, b, f));
        }
        match absorb_solid_torus(&mut g) {
            Step::Changed => continue,
            Step::Done(m) => return m,
            Step::Nothing => {}
        }
        match absorb_collar(&mut g) {
            Step::Changed => continue,
            Step::Done(m) => return m,
            Step::Nothing => {}
        }
        if merge_vertical(&mut g) || refiber_merge(&mut g) {
            continue;
        }
        if let Some(h) = unfold_projective(&g) {
            g = h;
            continue;
        }
        if let Some(m) = closed_lens(&g) {
            return m;
        }
        if g.blocks.len() == 1 && g.gluings.is_empty() {
            match &g.blocks[0] {
                Block::Cusped(fb) => return Manifold::Filled(fb.clone()),
                // Unglued, the two fibrations of the twisted I-bundle over
                // the Klein bottle need no framing; keep the disk one.
                Block::Seifert(s) if one_port_kind(s).is_some() => {
                    return Manifold::seifert(SeifertBlock::pairs(BaseSurface::DISK, &[(2, 1), (2, 1)]))
                }
                _ => {}
            }
        }
        return Manifold::Graph(g);
    }
}

enum Step {
    Changed,
    Done(Manifold),
    Nothing,
}

fn fix_fiber_signs(g: &mut GraphManifold) {
    for block in &mut g.blocks {
        if let Block::Seifert(s) = block {
            for f in &mut s.fibers {
                if f.p < 0 {
                    *f = FiberPair::new(-f.p, -f.q);
                }
                if f.p == 0 {
                    f.q = 1;
                }
            }
        }
    }
}

fn find_degenerate(g: &GraphManifold) -> Option<(usize, usize)> {
    g.blocks.iter().enumerate().find_map(|(b, block)| match block {
        Block::Seifert(s) => s.fibers.iter().position(|f| f.p == 0).map(|f| (b, f)),
        _ => None,
    })
}

/// Moves (10) and (11) in general form. With `h = 0` in the block, each
/// glued port becomes a solid torus with meridian `h`, which caps the
/// neighbour; what remains splits into summands.
pub(crate) fn degenerate_split(g: &GraphManifold, b: usize, fiber: usize) -> Manifold {
    let Block::Seifert(s) = &g.blocks[b] else { unreachable!("checked by caller") };
    let mut parts = Vec::new();
    for (i, f) in s.fibers.iter().enumerate() {
        if i != fiber {
            parts.push(Manifold::Lens { p: f.p, q: f.q });
        }
    }
    // Killing the fiber leaves the base's free fundamental group: one
    // handle per crosscap, two per orientable genus.
    let handles = if s.base.orientable { 2 * s.base.genus } else { s.base.genus };
    for _ in 0..handles {
        parts.push(Manifold::S2XS1);
    }
    for port in 0..s.ports() {
        if g.gluing_at(Port::new(b, port)).is_none() {
            parts.push(Manifold::SolidTorus);
        }
    }
    let mut caps = Vec::new();
    for i in gluings_at(g, b) {
        let gl = g.gluings[i];
        let m = gl.matrix;
        if gl.is_self_gluing() {
            parts.push(Manifold::Lens { p: m.b, q: m.d });
            parts.push(Manifold::S2XS1);
        } else if gl.from.block == b {
            caps.push((gl.to, FiberPair::new(m.b, m.d)));
        } else {
            caps.push((gl.from, FiberPair::new(m.b, -m.a)));
        }
    }
    let mut rest = g.clone();
    rest.gluings.retain(|gl| gl.from.block != b && gl.to.block != b);
    let neighbours: Vec<usize> = caps.iter().map(|(p, _)| if p.block > b { p.block - 1 } else { p.block }).collect();
    cap_ports(&mut rest, caps);
    delete_block(&mut rest, b);
    let label = component_labels(&rest);
    let mut reached: Vec<usize> = neighbours.iter().map(|&x| label[x]).collect();
    let connections = reached.len();
    reached.sort_unstable();
    reached.dedup();
    for _ in reached.len()..connections {
        parts.push(Manifold::S2XS1);
    }
    parts.extend(split_components(&rest).into_iter().map(Manifold::Graph));
    match parts.len() {
        0 => Manifold::S3,
        1 => parts.pop().expect("one part"),
        _ => Manifold::Sum(parts),
    }
}

/// `(a, b)` of a block whose fibers are one exceptional pair plus integral
/// pairs, after folding the integral pairs in with move (2).
fn folded_pair(fibers: &[FiberPair]) -> FiberPair {
    let mut main = fibers.iter().copied().find(|f| f.p != 1).unwrap_or(FiberPair::new(1, 0));
    for f in fibers.iter().filter(|f| f.p == 1) {
        main.q += f.q * main.p;
    }
    main
}

fn exceptional_count(s: &SeifertBlock) -> usize {
    s.fibers.iter().filter(|f| f.p != 1).count()
}

/// `(D, (a,b))` is a solid torus with meridian `-a·c + b·h`; gluing it on
/// fills the neighbour.
fn absorb_solid_torus(g: &mut GraphManifold) -> Step {
    let found = g.blocks.iter().position(|block| match block {
        Block::Seifert(s) => s.base == BaseSurface::DISK && exceptional_count(s) <= 1,
        _ => false,
    });
    let Some(b) = found else { return Step::Nothing };
    let Block::Seifert(s) = &g.blocks[b] else { unreachable!() };
    let FiberPair { p: a, q: bb } = folded_pair(&s.fibers);
    let Some((gi, from_side)) = g.gluing_at(Port::new(b, 0)) else {
        return Step::Done(Manifold::SolidTorus);
    };
    let gl = g.gluings[gi];
    let m = gl.matrix;
    let (cap, other) = if from_side {
        (FiberPair::new(-a * m.a + bb * m.b, -a * m.c + bb * m.d), gl.to)
    } else {
        (FiberPair::new(a * m.d + bb * m.b, -a * m.c - bb * m.a), gl.from)
    };
    g.gluings.remove(gi);
    cap_port(g, other, cap);
    delete_block(g, b);
    Step::Changed
}

/// `A×S¹` with integral fibers is a collar: it is dropped, joining its two
/// neighbours or closing up into a torus bundle.
fn absorb_collar(g: &mut GraphManifold) -> Step {
    for b in 0..g.blocks.len() {
        let Block::Seifert(s) = &g.blocks[b] else { continue };
        if s.base != BaseSurface::ANNULUS || exceptional_count(s) > 0 {
            continue;
        }
        let e: i64 = s.fibers.iter().map(|f| f.q).sum();
        let collar = collar_matrix(e);
        let (p0, p1) = (Port::new(b, 0), Port::new(b, 1));
        match (g.gluing_at(p0), g.gluing_at(p1)) {
            (None, None) => continue,
            (Some((i, _)), None) | (None, Some((i, _))) => {
                g.gluings.remove(i);
                delete_block(g, b);
                return Step::Changed;
            }
            (Some((i, _)), Some((j, _))) if i == j => {
                let gl = g.gluings[i];
                let gl = if gl.from == p0 { gl } else { gl.reversed() };
                return Step::Done(Manifold::TorusBundle(collar * gl.matrix));
            }
            (Some((i, _)), Some((j, _))) => {
                let g1 = g.gluings[i];
                let g1 = if g1.to == p0 { g1 } else { g1.reversed() };
                let g2 = g.gluings[j];
                let g2 = if g2.from == p1 { g2 } else { g2.reversed() };
                let joined = Gluing::new(g1.from, g2.to, g2.matrix * collar * g1.matrix);
                g.gluings.remove(i.max(j));
                g.gluings.remove(i.min(j));
                g.gluings.push(joined);
                delete_block(g, b);
                return Step::Changed;
            }
        }
    }
    Step::Nothing
}

/// Joins the two sides of a gluing whose fibers match (`n = 0`) into one
/// Seifert block. Gluings between two one-port blocks are left to
/// [`refiber_merge`], which also weighs their other fibrations.
fn merge_vertical(g: &mut GraphManifold) -> bool {
    let one_port = glued_one_port_blocks(g);
    let found = (0..g.gluings.len()).find(|&i| {
        let gl = g.gluings[i];
        let both_one_port = !gl.is_self_gluing() && one_port.contains(&gl.from.block) && one_port.contains(&gl.to.block);
        gl.matrix.b == 0 && is_seifert(g, gl.from.block) && is_seifert(g, gl.to.block) && !both_one_port
    });
    let Some(i) = found else { return false };
    merge_at(g, i);
    true
}

fn merge_at(g: &mut GraphManifold, i: usize) {
    let gl = g.gluings[i];
    if gl.is_self_gluing() {
        let b = gl.from.block;
        let m = gl.matrix;
        // [[-1,0],[p,1]] keeps the fiber; [[1,0],[p,-1]] reverses it.
        let twisted = m.a == 1;
        let carrier = if twisted { m.c } else { -m.c };
        g.gluings.remove(i);
        let (hi, lo) = if gl.from.port > gl.to.port { (gl.from, gl.to) } else { (gl.to, gl.from) };
        delete_port(g, hi);
        delete_port(g, lo);
        let s = seifert_mut(g, b);
        s.base = joined_base(s.base, None, twisted);
        if carrier != 0 {
            s.fibers.push(FiberPair::new(1, carrier));
        }
        return;
    }
    let (x, y) = (gl.from.block, gl.to.block);
    if gl.matrix.a == 1 {
        negate_block(g, y);
    }
    let m = g.gluings[i].matrix;
    let carrier = -m.c;
    g.gluings.remove(i);
    let (Block::Seifert(sx), Block::Seifert(sy)) = (&g.blocks[x], &g.blocks[y]) else { unreachable!() };
    let mut fibers = sx.fibers.clone();
    fibers.extend(sy.fibers.iter().copied());
    if carrier != 0 {
        fibers.push(FiberPair::new(1, carrier));
    }
    let base = joined_base(sx.base, Some(sy.base), false);
    let x_ports = sx.ports();
    let (px, py) = (gl.from.port, gl.to.port);
    for g2 in &mut g.gluings {
        for end in [&mut g2.from, &mut g2.to] {
            if end.block == x && end.port > px {
                end.port -= 1;
            } else if end.block == y {
                let p = if end.port > py { end.port - 1 } else { end.port };
                *end = Port::new(x, x_ports - 1 + p);
            }
        }
    }
    g.blocks[x] = Block::Seifert(SeifertBlock::new(base, fibers));
    delete_block(g, y);
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OnePort {
    Disk22,
    Mobius,
}

fn one_port_kind(s: &SeifertBlock) -> Option<OnePort> {
    let exceptional: Vec<&FiberPair> = s.fibers.iter().filter(|f| f.p != 1).collect();
    if s.base == BaseSurface::DISK && exceptional.len() == 2 && exceptional.iter().all(|f| f.p == 2) {
        Some(OnePort::Disk22)
    } else if s.base == BaseSurface::MOBIUS && exceptional.is_empty() {
        Some(OnePort::Mobius)
    } else {
        None
    }
}

/// Pushes every shift of a glued one-port block into its gluing, leaving
/// exactly `(D,(2,1),(2,1))` or the bare Möbius bundle.
fn exactify(g: &mut GraphManifold, b: usize) {
    let (gi, from_side) = g.gluing_at(Port::new(b, 0)).expect("glued one-port block");
    let s = seifert_mut(g, b);
    let mut total = 0;
    for f in &mut s.fibers {
        let k = if f.p == 2 { (1 - f.q).div_euclid(2) } else { -f.q };
        f.q += k * f.p;
        total += k;
    }
    s.fibers.retain(|f| f.p != 1);
    let m = g.gluings[gi].matrix;
    g.gluings[gi].matrix = shifted(m, from_side, total);
}

fn toggle(g: &mut GraphManifold, b: usize) {
    let (gi, from_side) = g.gluing_at(Port::new(b, 0)).expect("glued one-port block");
    let s = seifert_mut(g, b);
    let to_mobius = s.base == BaseSurface::DISK;
    *s = if to_mobius {
        SeifertBlock::new(BaseSurface::MOBIUS, Vec::new())
    } else {
        SeifertBlock::pairs(BaseSurface::DISK, &[(2, 1), (2, 1)])
    };
    let m = g.gluings[gi].matrix;
    g.gluings[gi].matrix = refibered(m, from_side, to_mobius);
}

fn glued_one_port_blocks(g: &GraphManifold) -> Vec<usize> {
    (0..g.blocks.len())
        .filter(|&b| match &g.blocks[b] {
            Block::Seifert(s) => one_port_kind(s).is_some() && g.gluing_at(Port::new(b, 0)).is_some(),
            _ => false,
        })
        .collect()
}

/// Switches one-port blocks to their other fibration when that makes the
/// fibers across a gluing match, so the two sides can merge. Between two
/// one-port blocks several choices can match; the one with fewer Möbius
/// bases wins.
fn refiber_merge(g: &mut GraphManifold) -> bool {
    let one_port = glued_one_port_blocks(g);
    for gi in 0..g.gluings.len() {
        let gl = g.gluings[gi];
        if gl.is_self_gluing() || !is_seifert(g, gl.from.block) || !is_seifert(g, gl.to.block) {
            continue;
        }
        let ends: Vec<usize> = [gl.from.block, gl.to.block].into_iter().filter(|b| one_port.contains(b)).collect();
        let subsets: &[&[usize]] = match ends.len() {
            0 => continue,
            1 => &[&[0]],
            _ => &[&[], &[0], &[1], &[0, 1]],
        };
        let mut best: Option<(usize, GraphManifold)> = None;
        for subset in subsets {
            let mut trial = g.clone();
            for &i in ends.iter() {
                exactify(&mut trial, i);
            }
            for &i in *subset {
                toggle(&mut trial, ends[i]);
            }
            if trial.gluings[gi].matrix.b != 0 {
                continue;
            }
            let mobius = ends
                .iter()
                .filter(|&&b| matches!(&trial.blocks[b], Block::Seifert(s) if s.base == BaseSurface::MOBIUS))
                .count();
            if best.as_ref().is_none_or(|(m, _)| mobius < *m) {
                best = Some((mobius, trial));
            }
        }
        if let Some((_, mut trial)) = best {
            merge_at(&mut trial, gi);
            *g = trial;
            return true;
        }
    }
    false
}

/// `(RP², F)` with at most one non-integral fiber also fibers over `S²`
/// with two `(2,1)` fibers: it is `Mb ∪ (D, F)` along a vertical gluing,
/// and switching the `Mb` side gives `D22` glued to a solid torus.
fn unfold_projective(g: &GraphManifold) -> Option<GraphManifold> {
    if g.blocks.len() != 1 || !g.gluings.is_empty() {
        return None;
    }
    let Block::Seifert(s) = &g.blocks[0] else { return None };
    if s.base != BaseSurface::PROJECTIVE_PLANE || exceptional_count(s) > 1 {
        return None;
    }
    let d22 = Block::Seifert(SeifertBlock::pairs(BaseSurface::DISK, &[(2, 1), (2, 1)]));
    let rest = Block::Seifert(SeifertBlock::new(BaseSurface::DISK, s.fibers.clone()));
    let vertical = Mat2::new(-1, 0, 0, 1);
    let m = refibered(vertical, true, false);
    Some(GraphManifold { blocks: vec![d22, rest], gluings: vec![Gluing::new(Port::new(0, 0), Port::new(1, 0), m)] })
}

/// A lone closed block over `S²` with at most two exceptional fibers.
fn closed_lens(g: &GraphManifold) -> Option<Manifold> {
    if g.blocks.len() != 1 || !g.gluings.is_empty() {
        return None;
    }
    let Block::Seifert(s) = &g.blocks[0] else { return None };
    if s.base != BaseSurface::SPHERE || exceptional_count(s) > 2 {
        return None;
    }
    let mut exceptional: Vec<FiberPair> = s.fibers.iter().copied().filter(|f| f.p != 1).collect();
    let e: i64 = s.fibers.iter().filter(|f| f.p == 1).map(|f| f.q).sum();
    exceptional.resize(2, FiberPair::new(1, 0));
    exceptional[0].q += e * exceptional[0].p;
    Some(lens_of_pair(exceptional[0], exceptional[1]))
}

fn finish(expr: Manifold) -> Manifold {
    match expr {
        Manifold::Sum(parts) => {
            let mut parts: Vec<Manifold> = parts.into_iter().map(finish).collect();
            parts.sort_by_cached_key(print_expr);
            Manifold::Sum(parts)
        }
        Manifold::Graph(g) => Manifold::Graph(canonical(&g)),
        Manifold::TorusBundle(a) => Manifold::TorusBundle(canonical_monodromy(&a)),
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Canonical labeling

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum BlockKey {
    Cusped { family: String, slopes: Vec<(i64, i64, bool)> },
    Seifert { base: (bool, u32, u32), fibers: Vec<(i64, i64)> },
}

type Key = (Vec<BlockKey>, Vec<[i64; 8]>);

fn block_key(block: &Block) -> BlockKey {
    match block {
        Block::Cusped(fb) => BlockKey::Cusped {
            family: fb.family.clone(),
            slopes: fb.slopes.0.iter().map(|s| s.map_or((0, 0, false), |s| (s.p(), s.q(), true))).collect(),
        },
        Block::Seifert(s) => BlockKey::Seifert {
            // Orientable sorts first.
            base: (!s.base.orientable, s.base.genus, s.base.boundary),
            fibers: s.fibers.iter().map(|f| (f.p, f.q)).collect(),
        },
    }
}

fn key_of(g: &GraphManifold) -> Key {
    let blocks = g.blocks.iter().map(block_key).collect();
    let gluings = g
        .gluings
        .iter()
        .map(|gl| {
            let m = gl.matrix;
            [gl.from.block as i64, gl.from.port as i64, gl.to.block as i64, gl.to.port as i64, m.a, m.b, m.c, m.d]
        })
        .collect();
    (blocks, gluings)
}

/// Labeling-independent description of a block, used to restrict the
/// relabeling search to blocks that could be swapped.
fn block_signature(g: &GraphManifold, b: usize) -> (BlockKey, usize, Vec<u64>) {
    let key = match &g.blocks[b] {
        Block::Seifert(s) => {
            let mut fibers: Vec<(i64, i64)> =
                s.fibers.iter().filter(|f| f.p >= 2).map(|f| (f.p, f.q.rem_euclid(f.p))).collect();
            fibers.sort_unstable();
            BlockKey::Seifert { base: (!s.base.orientable, s.base.genus, s.base.boundary), fibers }
        }
        other => block_key(other),
    };
    let free = g.free_ports().iter().filter(|p| p.block == b).count();
    let mut ns: Vec<u64> = Vec::new();
    for gl in &g.gluings {
        for end in [gl.from, gl.to] {
            if end.block == b {
                ns.push(gl.matrix.b.unsigned_abs());
            }
        }
    }
    ns.sort_unstable();
    (key, free, ns)
}

fn canonical(g: &GraphManifold) -> GraphManifold {
    let candidates = glued_one_port_blocks(g);
    let masks: u32 = if candidates.len() <= REFIBER_CAP { 1 << candidates.len() } else { 1 };
    let mut best: Option<((u64, usize), Key, GraphManifold)> = None;
    for mask in 0..masks {
        let mut h = g.clone();
        for &b in &candidates {
            exactify(&mut h, b);
        }
        for (i, &b) in candidates.iter().enumerate() {
            if mask & (1 << i) != 0 {
                toggle(&mut h, b);
            }
        }
        let mut score = 0u64;
        let mut mobius = 0usize;
        for &b in &candidates {
            let (gi, _) = h.gluing_at(Port::new(b, 0)).expect("glued");
            score += h.gluings[gi].matrix.b.unsigned_abs();
            if let Block::Seifert(s) = &h.blocks[b] {
                mobius += usize::from(s.base == BaseSurface::MOBIUS);
            }
        }
        let (key, graph) = best_labeling(&h);
        let better = match &best {
            None => true,
            Some((s, k, _)) => match (score, mobius).cmp(s) {
                Ordering::Less => true,
                Ordering::Equal => key < *k,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some(((score, mobius), key, graph));
        }
    }
    best.expect("at least one fibration choice").2
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = items.to_vec();
    cur.sort_unstable();
    loop {
        out.push(cur.clone());
        // Next lexicographic permutation.
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// All orderings consistent with a sort by `rank`, permuting within ties.
fn tied_orders<K: Ord + Clone>(items: Vec<usize>, rank: impl Fn(usize) -> K) -> Vec<Vec<usize>> {
    let mut items = items;
    items.sort_by_key(|&x| rank(x));
    let mut orders = vec![Vec::new()];
    let mut i = 0;
    while i < items.len() {
        let mut j = i + 1;
        while j < items.len() && rank(items[j]) == rank(items[i]) {
            j += 1;
        }
        let perms = permutations(&items[i..j]);
        let mut next = Vec::with_capacity(orders.len() * perms.len());
        for o in &orders {
            for p in &perms {
                let mut v: Vec<usize> = o.clone();
                v.extend(p);
                next.push(v);
            }
        }
        orders = next;
        i = j;
    }
    orders
}

fn best_labeling(g: &GraphManifold) -> (Key, GraphManifold) {
    let n = g.blocks.len();
    let sigs: Vec<_> = (0..n).map(|b| block_signature(g, b)).collect();
    let block_orders = tied_orders((0..n).collect(), |b| sigs[b].clone());
    // Per block: candidate port orders, glued ports first.
    let mut port_orders: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    for b in 0..n {
        let ports = g.blocks[b].ports();
        match &g.blocks[b] {
            Block::Cusped(_) => port_orders.push(vec![(0..ports).collect()]),
            Block::Seifert(_) => {
                let (glued, free): (Vec<usize>, Vec<usize>) =
                    (0..ports).partition(|&p| g.gluing_at(Port::new(b, p)).is_some());
                let rank = |p: usize| {
                    let (gi, _) = g.gluing_at(Port::new(b, p)).expect("glued");
                    let gl = g.gluings[gi];
                    let other = if gl.from == Port::new(b, p) { gl.to } else { gl.from };
                    (gl.matrix.b.unsigned_abs(), sigs[other.block].clone())
                };
                let orders = tied_orders(glued, rank)
                    .into_iter()
                    .map(|mut o| {
                        o.extend(&free);
                        o
                    })
                    .collect();
                port_orders.push(orders);
            }
        }
    }
    let total = port_orders
        .iter()
        .map(Vec::len)
        .try_fold(block_orders.len(), |acc, k| acc.checked_mul(k))
        .unwrap_or(usize::MAX);
    let exhaustive = total <= LABELING_CAP;
    let mut best: Option<(Key, GraphManifold)> = None;
    for order in block_orders.iter().take(if exhaustive { usize::MAX } else { 1 }) {
        let mut choice = vec![0usize; n];
        loop {
            let cand = relabel(g, order, &port_orders, &choice);
            let key = key_of(&cand);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, cand));
            }
            if !exhaustive || !advance(&mut choice, &port_orders) {
                break;
            }
        }
    }
    best.expect("at least one labeling")
}

fn advance(choice: &mut [usize], orders: &[Vec<Vec<usize>>]) -> bool {
    for (c, o) in choice.iter_mut().zip(orders) {
        *c += 1;
        if *c < o.len() {
            return true;
        }
        *c = 0;
    }
    false
}

/// Relabels, orients each gluing from its smaller end, then fixes signs
/// and shifts.
fn relabel(g: &GraphManifold, order: &[usize], port_orders: &[Vec<Vec<usize>>], choice: &[usize]) -> GraphManifold {
    let n = g.blocks.len();
    let mut new_block = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        new_block[old] = new;
    }
    let mut new_port: Vec<Vec<usize>> = Vec::with_capacity(n);
    for b in 0..n {
        let ord = &port_orders[b][choice[b]];
        let mut inv = vec![0usize; ord.len()];
        for (new, &old) in ord.iter().enumerate() {
            inv[old] = new;
        }
        new_port.push(inv);
    }
    let map = |p: Port| Port::new(new_block[p.block], new_port[p.block][p.port]);
    let blocks = order.iter().map(|&old| g.blocks[old].clone()).collect();
    let mut gluings: Vec<Gluing> = g
        .gluings
        .iter()
        .map(|gl| {
            let gl = Gluing::new(map(gl.from), map(gl.to), gl.matrix);
            if gl.to < gl.from {
                gl.reversed()
            } else {
                gl
            }
        })
        .collect();
    gluings.sort_by_key(|gl| gl.from);
    let mut out = GraphManifold { blocks, gluings };
    fix_signs(&mut out);
    for b in 0..n {
        if is_seifert(&out, b) {
            reduce_block(&mut out, b);
        }
    }
    out
}

fn positive(m: Mat2) -> bool {
    m.b > 0 || (m.b == 0 && m.a > 0)
}

/// Negates Seifert blocks along a breadth-first tree from block 0 so tree
/// gluings into Seifert blocks are positive.
fn fix_signs(g: &mut GraphManifold) {
    let n = g.blocks.len();
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for i in 0..g.gluings.len() {
                let gl = g.gluings[i];
                if gl.is_self_gluing() {
                    continue;
                }
                let v = if gl.from.block == u {
                    gl.to.block
                } else if gl.to.block == u {
                    gl.from.block
                } else {
                    continue;
                };
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                if is_seifert(g, v) && !positive(gl.matrix) {
                    negate_block(g, v);
                }
                queue.push_back(v);
            }
        }
    }
}

enum Sink {
    Free,
    End(usize, bool),
    Carrier,
}

/// Reduces every fiber to `0 ≤ q < p` and every glued end except the sink
/// to its residue; the sink absorbs the balance.
fn reduce_block(g: &mut GraphManifold, b: usize) {
    let ports = g.blocks[b].ports();
    let mut ends = Vec::new();
    let mut has_free = false;
    for p in 0..ports {
        match g.gluing_at(Port::new(b, p)) {
            Some((gi, from_side)) => {
                // A self-gluing is found from both of its ports.
                let from_side = if g.gluings[gi].is_self_gluing() { g.gluings[gi].from.port == p } else { from_side };
                ends.push((gi, from_side));
            }
            None => has_free = true,
        }
    }
    let sink = if has_free {
        Sink::Free
    } else if let Some(&(gi, fs)) = ends.first() {
        Sink::End(gi, fs)
    } else {
        Sink::Carrier
    };
    let mut carrier = 0i64;
    let mut fiber_shift = 0i64;
    {
        let s = seifert_mut(g, b);
        for f in &mut s.fibers {
            if f.p == 0 {
                continue;
            }
            let k = -f.q.div_euclid(f.p);
            f.q += k * f.p;
            fiber_shift += k;
        }
        s.fibers.retain(|f| f.p != 1);
    }
    match sink {
        Sink::Free => {}
        Sink::End(gi, fs) => g.gluings[gi].matrix = shifted(g.gluings[gi].matrix, fs, fiber_shift),
        Sink::Carrier => carrier -= fiber_shift,
    }
    let skip = if let Sink::End(gi, fs) = sink { Some((gi, fs)) } else { None };
    for &(gi, fs) in &ends {
        if Some((gi, fs)) == skip {
            continue;
        }
        let m = g.gluings[gi].matrix;
        let t = residue_shift(m, fs);
        g.gluings[gi].matrix = shifted(m, fs, t);
        match sink {
            Sink::Free => {}
            Sink::End(si, sfs) => g.gluings[si].matrix = shifted(g.gluings[si].matrix, sfs, -t),
            Sink::Carrier => carrier += t,
        }
    }
    let s = seifert_mut(g, b);
    s.fibers.sort_unstable_by_key(|f| (f.p, f.q));
    if carrier != 0 {
        s.fibers.push(FiberPair::new(1, carrier));
    }
}

/// Shift bringing one end of a gluing to its residue: `m mod |n|` on the
/// `from` side, `q mod |n|` on the `to` side, and `p = 0` when `n = 0`.
fn residue_shift(m: Mat2, from_side: bool) -> i64 {
    let n = m.b;
    match (from_side, n) {
        (true, 0) => -m.c * m.d,
        (false, 0) => m.c * m.a,
        (true, n) => (m.a.rem_euclid(n.abs()) - m.a) / n,
        (false, n) => (m.d - m.d.rem_euclid(n.abs())) / n,
    }
}
