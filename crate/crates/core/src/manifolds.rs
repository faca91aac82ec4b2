//! The manifold-expression model: Seifert blocks over surfaces, gluing
//! graphs, torus bundles, lens spaces, connected sums and cusped named blocks
//! with partial fillings.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::Mat2;

/// Base surface of a Seifert block. `genus` counts crosscaps when the
/// surface is non-orientable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BaseSurface {
    pub orientable: bool,
    pub genus: u32,
    pub boundary: u32,
}

impl BaseSurface {
    pub const SPHERE: BaseSurface = BaseSurface::orientable(0, 0);
    pub const DISK: BaseSurface = BaseSurface::orientable(0, 1);
    pub const ANNULUS: BaseSurface = BaseSurface::orientable(0, 2);
    pub const PANTS: BaseSurface = BaseSurface::orientable(0, 3);
    pub const PROJECTIVE_PLANE: BaseSurface = BaseSurface::nonorientable(1, 0);
    pub const MOBIUS: BaseSurface = BaseSurface::nonorientable(1, 1);
    pub const KLEIN: BaseSurface = BaseSurface::nonorientable(2, 0);

    const ALIASES: [(&'static str, BaseSurface); 7] = [
        ("S2", Self::SPHERE),
        ("D", Self::DISK),
        ("A", Self::ANNULUS),
        ("P", Self::PANTS),
        ("RP2", Self::PROJECTIVE_PLANE),
        ("Mb", Self::MOBIUS),
        ("K", Self::KLEIN),
    ];

    pub const fn orientable(genus: u32, boundary: u32) -> Self {
        BaseSurface { orientable: true, genus, boundary }
    }

    pub const fn nonorientable(crosscaps: u32, boundary: u32) -> Self {
        BaseSurface { orientable: false, genus: crosscaps, boundary }
    }

    pub fn from_alias(name: &str) -> Option<Self> {
        Self::ALIASES.iter().find(|(n, _)| *n == name).map(|(_, b)| *b)
    }

    pub fn alias(&self) -> Option<&'static str> {
        Self::ALIASES.iter().find(|(_, b)| b == self).map(|(n, _)| *n)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let handles = if self.orientable { 2 * self.genus } else { self.genus };
        2 - i64::from(handles) - i64::from(self.boundary)
    }

    /// Closed copy of the surface with `boundary` replaced.
    pub fn with_boundary(&self, boundary: u32) -> Self {
        BaseSurface { boundary, ..*self }
    }
}

impl fmt::Display for BaseSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alias() {
            Some(a) => write!(f, "{a}"),
            None => {
                let kind = if self.orientable { "or" } else { "nonor" };
                write!(f, "({},{},{})", self.genus, kind, self.boundary)
            }
        }
    }
}

/// Invariant `(p, q)` of an exceptional fiber; `p = 0` marks a degenerate
/// block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiberPair {
    pub p: i64,
    pub q: i64,
}

impl FiberPair {
    pub const fn new(p: i64, q: i64) -> Self {
        FiberPair { p, q }
    }

    pub fn is_coprime(&self) -> bool {
        self.p.gcd(&self.q) == 1
    }
}

impl fmt::Display for FiberPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Seifert block `(Σ, (p₁,q₁), …)`; each boundary circle of `Σ` is a port
/// carrying the (section boundary, fiber) basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeifertBlock {
    pub base: BaseSurface,
    pub fibers: Vec<FiberPair>,
}

impl SeifertBlock {
    pub fn new(base: BaseSurface, fibers: Vec<FiberPair>) -> Self {
        SeifertBlock { base, fibers }
    }

    pub fn pairs(base: BaseSurface, pairs: &[(i64, i64)]) -> Self {
        Self::new(base, pairs.iter().map(|&(p, q)| FiberPair::new(p, q)).collect())
    }

    pub fn ports(&self) -> usize {
        self.base.boundary as usize
    }
}

/// Filling slope `p/q`, stored coprime with `q ≥ 0`; `∞ = (1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    p: i64,
    q: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("0/0 is not a slope")]
pub struct ZeroSlope;

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };

    /// Reduces `p/q`; only `0/0` is rejected.
    pub fn new(p: i64, q: i64) -> Result<Self, ZeroSlope> {
        let g = p.gcd(&q);
        if g == 0 {
            return Err(ZeroSlope);
        }
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    pub fn integer(n: i64) -> Self {
        Slope { p: n, q: 1 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.q == 0
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.q {
            0 => write!(f, "inf"),
            1 => write!(f, "{}", self.p),
            q => write!(f, "{}/{}", self.p, q),
        }
    }
}

/// Per-cusp slopes; `None` marks an unfilled cusp.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FillingTuple(pub Vec<Option<Slope>>);

impl FillingTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, cusp: usize) -> Option<Slope> {
        self.0.get(cusp).copied().flatten()
    }

    /// Copy padded with unfilled marks up to `cusps` entries.
    pub fn padded(&self, cusps: usize) -> FillingTuple {
        let mut v = self.0.clone();
        v.resize(cusps.max(v.len()), None);
        FillingTuple(v)
    }

    /// Copy without trailing unfilled marks.
    pub fn trimmed(&self) -> FillingTuple {
        let end = self.0.iter().rposition(Option::is_some).map_or(0, |i| i + 1);
        FillingTuple(self.0[..end].to_vec())
    }

    pub fn filled_count(&self) -> usize {
        self.0.iter().filter(|s| s.is_some()).count()
    }
}

impl fmt::Display for FillingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                Some(s) => write!(f, "{s}")?,
                None => write!(f, ".")?,
            }
        }
        Ok(())
    }
}

/// A registered cusped block with some cusps filled. Unfilled cusps are the
/// block's ports, in cusp order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FilledBlock {
    pub family: String,
    pub cusps: usize,
    pub slopes: FillingTuple,
}

impl FilledBlock {
    pub fn new(family: impl Into<String>, cusps: usize, slopes: FillingTuple) -> Self {
        FilledBlock { family: family.into(), cusps, slopes: slopes.padded(cusps) }
    }

    /// Unfilled cusps, in order.
    pub fn open_cusps(&self) -> Vec<usize> {
        (0..self.cusps).filter(|&c| self.slopes.get(c).is_none()).collect()
    }

    pub fn ports(&self) -> usize {
        self.open_cusps().len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    Seifert(SeifertBlock),
    Cusped(FilledBlock),
}

impl Block {
    pub fn ports(&self) -> usize {
        match self {
            Block::Seifert(s) => s.ports(),
            Block::Cusped(c) => c.ports(),
        }
    }

    pub fn as_seifert(&self) -> Option<&SeifertBlock> {
        match self {
            Block::Seifert(s) => Some(s),
            Block::Cusped(_) => None,
        }
    }

    pub fn as_seifert_mut(&mut self) -> Option<&mut SeifertBlock> {
        match self {
            Block::Seifert(s) => Some(s),
            Block::Cusped(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Port {
    pub block: usize,
    pub port: usize,
}

impl Port {
    pub const fn new(block: usize, port: usize) -> Self {
        Port { block, port }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.block, self.port)
    }
}

/// Identification of two ports: `(c_from, h_from) = (c_to, h_to) · matrix`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gluing {
    pub from: Port,
    pub to: Port,
    pub matrix: Mat2,
}

impl Gluing {
    pub fn new(from: Port, to: Port, matrix: Mat2) -> Self {
        Gluing { from, to, matrix }
    }

    pub fn is_self_gluing(&self) -> bool {
        self.from.block == self.to.block
    }

    /// The same identification read in the opposite direction.
    pub fn reversed(&self) -> Gluing {
        Gluing {
            from: self.to,
            to: self.from,
            matrix: self.matrix.inverse().expect("gluing matrices are unimodular"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GraphManifold {
    pub blocks: Vec<Block>,
    pub gluings: Vec<Gluing>,
}

impl GraphManifold {
    pub fn single(block: Block) -> Self {
        GraphManifold { blocks: vec![block], gluings: Vec::new() }
    }

    /// Ports not used by any gluing, in block-then-port order.
    pub fn free_ports(&self) -> Vec<Port> {
        let mut out = Vec::new();
        for (b, block) in self.blocks.iter().enumerate() {
            for p in 0..block.ports() {
                let port = Port::new(b, p);
                if !self.gluings.iter().any(|g| g.from == port || g.to == port) {
                    out.push(port);
                }
            }
        }
        out
    }

    /// Gluing index and side (`true` for `from`) at a port.
    pub fn gluing_at(&self, port: Port) -> Option<(usize, bool)> {
        self.gluings.iter().enumerate().find_map(|(i, g)| {
            if g.from == port {
                Some((i, true))
            } else if g.to == port {
                Some((i, false))
            } else {
                None
            }
        })
    }

    /// Number of connected components of the block graph.
    pub fn components(&self) -> usize {
        let n = self.blocks.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for g in &self.gluings {
            if g.from.block < n && g.to.block < n {
                let (a, b) = (find(&mut parent, g.from.block), find(&mut parent, g.to.block));
                parent[a] = b;
            }
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }
}

/// Assembles a linear chain of blocks, allocating each block's ports in the
/// order gluings are requested. The notation parser and every generator use
/// this, so chain expressions print back in linear form.
#[derive(Debug, Clone, Default)]
pub struct ChainBuilder {
    blocks: Vec<Block>,
    next: Vec<usize>,
    gluings: Vec<Gluing>,
}

impl ChainBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, block: Block) -> usize {
        self.blocks.push(block);
        self.next.push(0);
        self.blocks.len() - 1
    }

    fn take_port(&mut self, block: usize) -> Result<Port, String> {
        let used = self.next[block];
        if used >= self.blocks[block].ports() {
            return Err(format!("block {block} has no free port left"));
        }
        self.next[block] += 1;
        Ok(Port::new(block, used))
    }

    /// Glues the next two free ports of `block` to each other.
    pub fn self_glue(&mut self, block: usize, matrix: Mat2) -> Result<(), String> {
        let from = self.take_port(block)?;
        let to = self.take_port(block)?;
        self.gluings.push(Gluing::new(from, to, matrix));
        Ok(())
    }

    /// Glues the next free port of `left` to the next free port of `right`.
    pub fn glue(&mut self, left: usize, right: usize, matrix: Mat2) -> Result<(), String> {
        let from = self.take_port(left)?;
        let to = self.take_port(right)?;
        self.gluings.push(Gluing::new(from, to, matrix));
        Ok(())
    }

    pub fn finish(self) -> GraphManifold {
        GraphManifold { blocks: self.blocks, gluings: self.gluings }
    }
}

/// `X₀ ∪_{A₀} X₁ ∪_{A₁} …` with one matrix per consecutive pair.
pub fn chain(blocks: Vec<Block>, links: &[Mat2]) -> Result<GraphManifold, String> {
    assert_eq!(links.len() + 1, blocks.len(), "a chain needs one matrix per link");
    let mut b = ChainBuilder::new();
    let mut prev = None;
    for (i, block) in blocks.into_iter().enumerate() {
        let idx = b.push(block);
        if let Some(p) = prev {
            b.glue(p, idx, links[i - 1])?;
        }
        prev = Some(idx);
    }
    Ok(b.finish())
}

/// A closed or bounded 3-manifold in the notation calculus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Manifold {
    Graph(GraphManifold),
    /// Mapping torus `T_A` of a determinant-one monodromy.
    TorusBundle(Mat2),
    /// `L(p, q)`; `L(0, 1)` is `S²×S¹` and `L(1, 0)` is `S³`.
    Lens { p: i64, q: i64 },
    Sum(Vec<Manifold>),
    SolidTorus,
    Filled(FilledBlock),
}

impl Manifold {
    pub const S3: Manifold = Manifold::Lens { p: 1, q: 0 };
    pub const S2XS1: Manifold = Manifold::Lens { p: 0, q: 1 };

    pub fn seifert(block: SeifertBlock) -> Self {
        Manifold::Graph(GraphManifold::single(Block::Seifert(block)))
    }

    pub fn as_graph(&self) -> Option<&GraphManifold> {
        match self {
            Manifold::Graph(g) => Some(g),
            _ => None,
        }
    }
}

/// A failed invariant, naming the offending site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub site: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.site, self.message)
    }
}

/// Cusp counts of registered families, as needed by [`validate`].
pub trait CuspCounts {
    fn cusp_count(&self, family: &str) -> Option<usize>;
}

/// Every violated invariant of `expr`; empty iff the expression is well formed.
pub fn validate(families: &dyn CuspCounts, expr: &Manifold) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_into(families, expr, "expr", &mut out);
    out
}

fn violation(out: &mut Vec<Violation>, site: impl Into<String>, message: impl Into<String>) {
    out.push(Violation { site: site.into(), message: message.into() });
}

fn validate_into(families: &dyn CuspCounts, expr: &Manifold, site: &str, out: &mut Vec<Violation>) {
    match expr {
        Manifold::Graph(g) => validate_graph(families, g, site, out),
        Manifold::TorusBundle(m) => {
            if m.det() != 1 {
                violation(out, site, format!("monodromy det must be 1, found {}", m.det()));
            }
        }
        Manifold::Lens { p, q } => {
            if p.gcd(q) != 1 {
                violation(out, site, format!("lens parameters ({p},{q}) are not coprime"));
            }
        }
        Manifold::Sum(parts) => {
            if parts.len() < 2 {
                violation(out, site, "connected sum needs at least two summands");
            }
            for (i, part) in parts.iter().enumerate() {
                validate_into(families, part, &format!("{site}.summand{i}"), out);
            }
        }
        Manifold::SolidTorus => {}
        Manifold::Filled(fb) => validate_filled(families, fb, site, out),
    }
}

fn validate_filled(families: &dyn CuspCounts, fb: &FilledBlock, site: &str, out: &mut Vec<Violation>) {
    match families.cusp_count(&fb.family) {
        None => violation(out, site, format!("unknown family {}", fb.family)),
        Some(n) if n != fb.cusps => violation(
            out,
            site,
            format!("{} has {n} cusps, block records {}", fb.family, fb.cusps),
        ),
        Some(_) => {}
    }
    if fb.slopes.len() > fb.cusps {
        violation(
            out,
            site,
            format!("{} slopes given for {} cusps", fb.slopes.len(), fb.cusps),
        );
    }
}

fn validate_graph(families: &dyn CuspCounts, g: &GraphManifold, site: &str, out: &mut Vec<Violation>) {
    if g.blocks.is_empty() {
        violation(out, site, "graph has no blocks");
        return;
    }
    for (b, block) in g.blocks.iter().enumerate() {
        let bsite = format!("{site}.block{b}");
        match block {
            Block::Seifert(s) => {
                if !s.base.orientable && s.base.genus == 0 {
                    violation(out, &bsite, "non-orientable base needs at least one crosscap");
                }
                for (i, f) in s.fibers.iter().enumerate() {
                    if !f.is_coprime() {
                        violation(out, format!("{bsite}.fiber{i}"), format!("fiber {f} is non-coprime"));
                    }
                }
            }
            Block::Cusped(fb) => validate_filled(families, fb, &bsite, out),
        }
    }
    let mut used = std::collections::HashSet::new();
    for (i, gl) in g.gluings.iter().enumerate() {
        let gsite = format!("{site}.gluing{i}");
        if gl.matrix.det() != -1 {
            violation(out, &gsite, format!("gluing det must be -1, found {}", gl.matrix.det()));
        }
        for port in [gl.from, gl.to] {
            let exists = g.blocks.get(port.block).is_some_and(|b| port.port < b.ports());
            if !exists {
                violation(out, &gsite, format!("port {port} does not exist"));
            } else if !used.insert(port) {
                violation(out, &gsite, format!("port {port} is glued twice"));
            }
        }
        if gl.from == gl.to {
            violation(out, &gsite, "a port cannot be glued to itself");
        }
    }
    if g.components() > 1 {
        violation(out, site, "gluing graph is disconnected");
    }
}

/// Number of unglued, unfilled boundary tori.
pub fn free_boundary_count(expr: &Manifold) -> usize {
    match expr {
        Manifold::Graph(g) => {
            let total: usize = g.blocks.iter().map(Block::ports).sum();
            total - 2 * g.gluings.len()
        }
        Manifold::Sum(parts) => parts.iter().map(free_boundary_count).sum(),
        Manifold::SolidTorus => 1,
        Manifold::Filled(fb) => fb.ports(),
        Manifold::TorusBundle(_) | Manifold::Lens { .. } => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct NoFamilies;
    impl CuspCounts for NoFamilies {
        fn cusp_count(&self, _: &str) -> Option<usize> {
            None
        }
    }

    fn pxs1() -> Block {
        Block::Seifert(SeifertBlock::new(BaseSurface::PANTS, vec![]))
    }

    #[test]
    fn slopes_reduce() {
        assert_eq!(Slope::new(4, 6).unwrap(), Slope::new(2, 3).unwrap());
        assert_eq!(Slope::new(-1, 0).unwrap(), Slope::INFINITY);
        assert_eq!(Slope::new(1, -2).unwrap().to_string(), "-1/2");
        assert_eq!(Slope::new(0, 0), Err(ZeroSlope));
    }

    #[test]
    fn bad_gluing_and_fiber() {
        let block = Block::Seifert(SeifertBlock::pairs(BaseSurface::ANNULUS, &[(2, 4)]));
        let g = GraphManifold {
            blocks: vec![block],
            gluings: vec![Gluing::new(Port::new(0, 0), Port::new(0, 1), Mat2::new(1, 1, 0, 1))],
        };
        let v = validate(&NoFamilies, &Manifold::Graph(g));
        assert_eq!(v.len(), 2);
        assert!(v.iter().any(|x| x.message.contains("non-coprime")));
        assert!(v.iter().any(|x| x.message.contains("det must be -1")));
    }

    #[test]
    fn well_formed_self_gluing() {
        let block = Block::Seifert(SeifertBlock::pairs(BaseSurface::ANNULUS, &[(2, 1)]));
        let g = GraphManifold {
            blocks: vec![block],
            gluings: vec![Gluing::new(Port::new(0, 0), Port::new(0, 1), Mat2::SWAP)],
        };
        let m = Manifold::Graph(g);
        assert!(validate(&NoFamilies, &m).is_empty());
        assert_eq!(free_boundary_count(&m), 0);
    }

    #[test]
    fn chain_of_pants_has_five_free_tori() {
        let g = GraphManifold {
            blocks: vec![pxs1(), pxs1(), pxs1()],
            gluings: vec![
                Gluing::new(Port::new(0, 0), Port::new(1, 0), Mat2::SWAP),
                Gluing::new(Port::new(1, 1), Port::new(2, 0), Mat2::SWAP),
            ],
        };
        assert_eq!(free_boundary_count(&Manifold::Graph(g.clone())), 5);
        assert_eq!(g.free_ports().len(), 5);
        assert_eq!(free_boundary_count(&Manifold::Graph(GraphManifold::single(pxs1()))), 3);
    }

    #[test]
    fn reversed_gluing_inverts() {
        let g = Gluing::new(Port::new(0, 0), Port::new(1, 0), Mat2::new(1, 2, 0, -1));
        let r = g.reversed();
        assert_eq!(r.from, g.to);
        assert_eq!(r.matrix * g.matrix, Mat2::IDENTITY);
    }
}
