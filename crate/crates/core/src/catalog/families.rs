//! Parametrized families of closed non-hyperbolic fillings.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::chains::Registry;
use crate::exactalg::Mat2;
use crate::manifolds::{
    chain, BaseSurface, Block, ChainBuilder, FilledBlock, FillingTuple, Manifold, SeifertBlock, Slope,
};

use super::{Catalog, CatalogError, CatalogRow};

pub(crate) const SWAP: Mat2 = Mat2::new(0, 1, 1, 0);

/// Family identifiers: `Thm2.4-F1..F4` for `M₅`, `Thm2.7-F1..F4` for `M₆`,
/// `Thm2.11-F1..F5` for `M₇`, and `Tbl25` for the rows listed for `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilySpec {
    M5TwoBlock,
    M5Sporadic,
    M5SelfGlue,
    M5SelfGlueSporadic,
    M6ThreeBlock,
    M6DoubleAnnulus,
    M6FigureEightA,
    M6FigureEightB,
    M7FourBlock,
    M7DoubleAnnulus,
    M7M5Block,
    M7Whitehead,
    M7Sporadic,
    Borromean,
}

impl FamilySpec {
    pub const ALL: [FamilySpec; 14] = [
        FamilySpec::M5TwoBlock,
        FamilySpec::M5Sporadic,
        FamilySpec::M5SelfGlue,
        FamilySpec::M5SelfGlueSporadic,
        FamilySpec::M6ThreeBlock,
        FamilySpec::M6DoubleAnnulus,
        FamilySpec::M6FigureEightA,
        FamilySpec::M6FigureEightB,
        FamilySpec::M7FourBlock,
        FamilySpec::M7DoubleAnnulus,
        FamilySpec::M7M5Block,
        FamilySpec::M7Whitehead,
        FamilySpec::M7Sporadic,
        FamilySpec::Borromean,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            FamilySpec::M5TwoBlock => "Thm2.4-F1",
            FamilySpec::M5Sporadic => "Thm2.4-F2",
            FamilySpec::M5SelfGlue => "Thm2.4-F3",
            FamilySpec::M5SelfGlueSporadic => "Thm2.4-F4",
            FamilySpec::M6ThreeBlock => "Thm2.7-F1",
            FamilySpec::M6DoubleAnnulus => "Thm2.7-F2",
            FamilySpec::M6FigureEightA => "Thm2.7-F3",
            FamilySpec::M6FigureEightB => "Thm2.7-F4",
            FamilySpec::M7FourBlock => "Thm2.11-F1",
            FamilySpec::M7DoubleAnnulus => "Thm2.11-F2",
            FamilySpec::M7M5Block => "Thm2.11-F3",
            FamilySpec::M7Whitehead => "Thm2.11-F4",
            FamilySpec::M7Sporadic => "Thm2.11-F5",
            FamilySpec::Borromean => "Tbl25",
        }
    }

    /// Number of integer parameters; coprime pairs count as two.
    pub fn arity(&self) -> usize {
        match self {
            FamilySpec::M5TwoBlock => 8,
            FamilySpec::M5SelfGlue | FamilySpec::M7Whitehead => 2,
            FamilySpec::M6ThreeBlock => 10,
            FamilySpec::M6DoubleAnnulus | FamilySpec::M7DoubleAnnulus => 4,
            FamilySpec::M7FourBlock | FamilySpec::M7M5Block => 12,
            FamilySpec::M5Sporadic | FamilySpec::M7Sporadic | FamilySpec::Borromean => 1,
            FamilySpec::M5SelfGlueSporadic | FamilySpec::M6FigureEightA | FamilySpec::M6FigureEightB => 0,
        }
    }

    /// Whether the parameters are coprime pairs rather than one index.
    pub fn takes_pairs(&self) -> bool {
        self.arity() >= 2
    }

    /// Admissible values of the single index parameter.
    pub fn index_range(&self) -> Option<std::ops::RangeInclusive<i64>> {
        match self {
            FamilySpec::M5Sporadic => Some(0..=3),
            FamilySpec::M7Sporadic => Some(3..=6),
            FamilySpec::Borromean => Some(1..=5),
            _ => None,
        }
    }

    /// The chain family whose fillings this describes.
    pub fn parent(&self) -> &'static str {
        match self {
            FamilySpec::M5TwoBlock | FamilySpec::M5Sporadic | FamilySpec::M5SelfGlue | FamilySpec::M5SelfGlueSporadic => {
                "M5"
            }
            FamilySpec::M6ThreeBlock
            | FamilySpec::M6DoubleAnnulus
            | FamilySpec::M6FigureEightA
            | FamilySpec::M6FigureEightB => "M6",
            FamilySpec::Borromean => "W",
            _ => "M7",
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FamilySpec {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilySpec::ALL.into_iter().find(|f| f.id() == s).ok_or_else(|| CatalogError::Domain {
            family: s.to_string(),
            message: format!(
                "unknown family id; expected one of {}",
                FamilySpec::ALL.map(|f| f.id()).join(", ")
            ),
        })
    }
}

pub(crate) fn seifert(base: BaseSurface, pairs: &[(i64, i64)]) -> Block {
    Block::Seifert(SeifertBlock::pairs(base, pairs))
}

pub(crate) fn disk(x: (i64, i64), y: (i64, i64)) -> Block {
    seifert(BaseSurface::DISK, &[x, y])
}

pub(crate) fn annulus(x: (i64, i64)) -> Block {
    seifert(BaseSurface::ANNULUS, &[x])
}

pub(crate) fn d22() -> Block {
    disk((2, 1), (2, 1))
}

/// A linear chain whose blocks have enough ports by construction.
pub(crate) fn linear(blocks: Vec<Block>, links: &[Mat2]) -> Manifold {
    Manifold::Graph(chain(blocks, links).expect("chain blocks have free ports"))
}

pub(crate) fn self_glued(block: Block, m: Mat2) -> Manifold {
    let mut b = ChainBuilder::new();
    let x = b.push(block);
    b.self_glue(x, m).expect("annulus has two ports");
    Manifold::Graph(b.finish())
}

/// `(A,(a,b)) ∪ (A,(c,d))` along both boundary tori, each by `SWAP`.
pub(crate) fn double_annulus(x: (i64, i64), y: (i64, i64)) -> Manifold {
    let mut b = ChainBuilder::new();
    let l = b.push(annulus(x));
    let r = b.push(annulus(y));
    b.glue(l, r, SWAP).expect("two ports");
    b.glue(l, r, SWAP).expect("two ports");
    Manifold::Graph(b.finish())
}

fn filled(reg: &Registry, family: &str, slopes: Vec<Option<Slope>>) -> Block {
    let cusps = reg.family(family).map_or(slopes.len() + 1, |f| f.cusps);
    Block::Cusped(FilledBlock::new(family, cusps, FillingTuple(slopes)))
}

fn domain(spec: FamilySpec, message: impl Into<String>) -> CatalogError {
    CatalogError::Domain { family: spec.id().to_string(), message: message.into() }
}

fn pairs(spec: FamilySpec, params: &[i64]) -> Result<Vec<(i64, i64)>, CatalogError> {
    let out: Vec<(i64, i64)> = params.chunks(2).map(|c| (c[0], c[1])).collect();
    for &(p, q) in &out {
        if p.gcd(&q) != 1 {
            return Err(domain(spec, format!("({p},{q}) is not a coprime pair")));
        }
    }
    Ok(out)
}

fn slope(spec: FamilySpec, (p, q): (i64, i64)) -> Result<Slope, CatalogError> {
    Slope::new(p, q).map_err(|_| domain(spec, format!("({p},{q}) is not a slope")))
}

/// The family member with the given parameters substituted; coprime pairs
/// are listed flat, `(a,b),(c,d)` as `[a, b, c, d]`.
pub fn generate_family(reg: &Registry, spec: FamilySpec, params: &[i64]) -> Result<Manifold, CatalogError> {
    if params.len() != spec.arity() {
        return Err(domain(spec, format!("expects {} parameters, got {}", spec.arity(), params.len())));
    }
    if let Some(range) = spec.index_range() {
        if !range.contains(&params[0]) {
            return Err(domain(spec, format!("index {} outside {}..={}", params[0], range.start(), range.end())));
        }
    }
    let p = if spec.takes_pairs() { pairs(spec, params)? } else { Vec::new() };
    let whitehead_link = Mat2::new(-1, 0, 1, 1);
    Ok(match spec {
        FamilySpec::M5TwoBlock => linear(vec![disk(p[0], p[1]), disk(p[2], p[3])], &[SWAP]),
        FamilySpec::M5Sporadic => {
            let n = params[0];
            linear(vec![d22(), disk((2, 1), (3, 1))], &[Mat2::new(1 + n, 2 + n, -n, -1 - n)])
        }
        FamilySpec::M5SelfGlue => self_glued(annulus(p[0]), SWAP),
        FamilySpec::M5SelfGlueSporadic => self_glued(annulus((2, 1)), Mat2::new(1, 2, 0, -1)),
        FamilySpec::M6ThreeBlock => {
            linear(vec![disk(p[0], p[1]), annulus(p[2]), disk(p[3], p[4])], &[SWAP, SWAP])
        }
        FamilySpec::M6DoubleAnnulus | FamilySpec::M7DoubleAnnulus => double_annulus(p[0], p[1]),
        FamilySpec::M6FigureEightA => linear(vec![filled(reg, "M1", vec![]), d22()], &[whitehead_link]),
        FamilySpec::M6FigureEightB => linear(vec![filled(reg, "M1", vec![]), d22()], &[Mat2::new(-1, 1, 1, 0)]),
        FamilySpec::M7FourBlock => linear(
            vec![disk(p[0], p[1]), annulus(p[2]), annulus(p[3]), disk(p[4], p[5])],
            &[SWAP, SWAP, SWAP],
        ),
        FamilySpec::M7M5Block => {
            if p[4].0.abs() < 2 || p[5].0.abs() < 2 {
                return Err(domain(spec, "the disk block needs |i|, |k| >= 2"));
            }
            let slopes = p[..4].iter().map(|&x| slope(spec, x).map(Some)).collect::<Result<_, _>>()?;
            linear(vec![filled(reg, "M5", slopes), disk(p[4], p[5])], &[SWAP])
        }
        FamilySpec::M7Whitehead => {
            let s = slope(spec, p[0])?;
            linear(vec![filled(reg, "M2", vec![Some(s)]), d22()], &[whitehead_link])
        }
        FamilySpec::M7Sporadic => {
            let n = params[0];
            self_glued(annulus((2, 1)), Mat2::new(n - 1, n, 1, 1))
        }
        FamilySpec::Borromean => {
            let rows = Catalog::builtin().rows_in(Some(25)).into_iter().cloned().collect::<Vec<_>>();
            let raw = &rows[params[0] as usize - 1];
            CatalogRow::parse(reg, raw)?.expr
        }
    })
}
