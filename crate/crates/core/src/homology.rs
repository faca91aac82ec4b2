//! First homology of manifold expressions, and of Dehn fillings of cusped
//! blocks through their peripheral data.
//!
//! A Seifert block `(Σ, (p₁,q₁), …)` contributes generators `h` (fiber),
//! base classes, `xᵢ` per exceptional fiber and `c_j` per boundary circle,
//! with relations `pᵢxᵢ + qᵢh = 0` and `Σxᵢ + Σc_j = 0`; a non-orientable
//! base adds `2Σaᵢ` to the latter and imposes `2h = 0`. A gluing
//! `[m,n;p,q]` from port 1 to port 2 identifies
//! `c₁ = m c₂ + p h₂` and `h₁ = n c₂ + q h₂`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chains::Registry;
use crate::exactalg::{AbelianGroup, IntMatrix, Mat2};
use crate::manifolds::{Block, FilledBlock, FillingTuple, GraphManifold, Manifold, SeifertBlock};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("{family} has {cusps} cusps, {given} slopes given")]
    TupleLength { family: String, cusps: usize, given: usize },
    #[error("linking matrix must be square, symmetric and zero on the diagonal")]
    BadLinking,
    #[error("no linking sign pattern matches all {0} fixtures")]
    CalibrationFailed(usize),
}

/// Sparse integer combination of generators.
type Vector = Vec<(usize, i64)>;

/// A finite presentation of an abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Presentation {
    generators: Vec<String>,
    relations: Vec<Vector>,
}

impl Presentation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generator(&mut self, label: impl Into<String>) -> usize {
        self.generators.push(label.into());
        self.generators.len() - 1
    }

    pub fn relation(&mut self, terms: Vector) {
        self.relations.push(terms);
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    /// Relation matrix, one row per relation.
    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.generators.len(), &self.dense_rows())
    }

    fn dense_rows(&self) -> Vec<Vec<i64>> {
        let n = self.generators.len();
        self.relations
            .iter()
            .map(|terms| {
                let mut row = vec![0i64; n];
                for &(g, k) in terms {
                    row[g] += k;
                }
                row
            })
            .collect()
    }

    pub fn group(&self) -> AbelianGroup {
        AbelianGroup::cokernel_of_rows(self.generators.len(), &self.dense_rows())
    }
}

fn scaled(v: &Vector, k: i64) -> Vector {
    v.iter().map(|&(g, x)| (g, k * x)).collect()
}

fn combine(parts: &[(&Vector, i64)]) -> Vector {
    parts.iter().flat_map(|(v, k)| scaled(v, *k)).collect()
}

/// Boundary basis `(c, h)` of a port.
#[derive(Debug, Clone)]
struct PortBasis {
    c: Vector,
    h: Vector,
}

/// Homology data of a cusped block: a presentation over meridians (and
/// possibly extra generators) and each cusp's meridian and longitude class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralDatum {
    cusps: usize,
    generators: usize,
    relations: Vec<Vec<i64>>,
    meridians: Vec<Vec<i64>>,
    longitudes: Vec<Vec<i64>>,
}

impl PeripheralDatum {
    /// Link complement datum: generators `μ_k`, no relations,
    /// `λ_j = Σ_k L[j][k] μ_k`.
    pub fn from_linking(l: &[Vec<i64>]) -> Result<Self, HomologyError> {
        let n = l.len();
        let square = l.iter().all(|r| r.len() == n);
        if n == 0 || !square || (0..n).any(|j| l[j][j] != 0 || (0..n).any(|k| l[j][k] != l[k][j])) {
            return Err(HomologyError::BadLinking);
        }
        let meridians = (0..n)
            .map(|j| (0..n).map(|k| i64::from(j == k)).collect())
            .collect();
        Ok(PeripheralDatum {
            cusps: n,
            generators: n,
            relations: Vec::new(),
            meridians,
            longitudes: l.to_vec(),
        })
    }

    pub fn cusps(&self) -> usize {
        self.cusps
    }

    /// The linking matrix when the datum is a plain link complement.
    pub fn linking_matrix(&self) -> Option<&[Vec<i64>]> {
        (self.relations.is_empty() && self.generators == self.cusps).then_some(&self.longitudes[..])
    }

    /// Adds the block with the given fillings; returns the port bases of
    /// unfilled cusps, in cusp order.
    fn present(&self, pres: &mut Presentation, prefix: &str, slopes: &FillingTuple) -> Vec<PortBasis> {
        let gens: Vec<usize> = (0..self.generators)
            .map(|k| pres.generator(format!("{prefix}g{k}")))
            .collect();
        let lift = |row: &[i64]| -> Vector {
            row.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, &x)| (gens[k], x)).collect()
        };
        for r in &self.relations {
            pres.relation(lift(r));
        }
        let mut ports = Vec::new();
        for j in 0..self.cusps {
            let mu = lift(&self.meridians[j]);
            let lambda = lift(&self.longitudes[j]);
            match slopes.get(j) {
                Some(s) => pres.relation(combine(&[(&mu, s.p()), (&lambda, s.q())])),
                None => ports.push(PortBasis { c: mu, h: lambda }),
            }
        }
        ports
    }
}

/// `H₁` of a filling: one relation `p·μ_j + q·λ_j` per filled cusp.
pub fn h1_filled(datum: &PeripheralDatum, slopes: &FillingTuple) -> Result<AbelianGroup, HomologyError> {
    if slopes.len() > datum.cusps {
        return Err(HomologyError::TupleLength {
            family: String::new(),
            cusps: datum.cusps,
            given: slopes.len(),
        });
    }
    let mut pres = Presentation::new();
    datum.present(&mut pres, "", slopes);
    Ok(pres.group())
}

/// [`h1_filled`] for a registered family.
pub fn h1_family(reg: &Registry, family: &str, slopes: &FillingTuple) -> Result<AbelianGroup, HomologyError> {
    let fam = reg.family(family).ok_or_else(|| HomologyError::UnknownFamily(family.to_string()))?;
    h1_filled(&fam.peripheral, slopes).map_err(|e| match e {
        HomologyError::TupleLength { cusps, given, .. } => {
            HomologyError::TupleLength { family: family.to_string(), cusps, given }
        }
        other => other,
    })
}

/// `H₁` of an expression, resolving named blocks in the built-in registry.
pub fn h1(expr: &Manifold) -> Result<AbelianGroup, HomologyError> {
    h1_in(Registry::builtin(), expr)
}

pub fn h1_in(reg: &Registry, expr: &Manifold) -> Result<AbelianGroup, HomologyError> {
    Ok(match expr {
        Manifold::Graph(g) => graph_presentation(reg, g, Convention::Row)?.group(),
        Manifold::TorusBundle(a) => torus_bundle_h1(*a),
        Manifold::Lens { p, .. } => AbelianGroup::cyclic(*p),
        Manifold::Sum(parts) => {
            let mut acc = AbelianGroup::trivial();
            for part in parts {
                acc = acc.direct_sum(&h1_in(reg, part)?);
            }
            acc
        }
        Manifold::SolidTorus => AbelianGroup::free(1),
        Manifold::Filled(fb) => h1_family(reg, &fb.family, &fb.slopes)?,
    })
}

/// `H₁(T_A) = ℤ ⊕ coker(A − I)`.
pub fn torus_bundle_h1(a: Mat2) -> AbelianGroup {
    let rows = [vec![a.a - 1, a.b], vec![a.c, a.d - 1]];
    AbelianGroup::free(1).direct_sum(&AbelianGroup::cokernel_of_rows(2, &rows))
}

/// How a gluing matrix identifies the boundary bases of its two ports.
/// Only [`Convention::Row`] matches the tables; the others exist so the
/// calibration anchors can show they fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `(c₁, h₁) = (c₂, h₂) · A`.
    Row,
    /// `(c₁, h₁)ᵀ = A · (c₂, h₂)ᵀ`.
    ColumnVector,
    /// `(c₂, h₂) = (c₁, h₁) · Aᵀ`.
    Transposed,
    /// Row convention with the fiber of the first port reversed.
    SignFlipped,
}

impl Convention {
    pub const ALTERNATIVES: [Convention; 3] =
        [Convention::ColumnVector, Convention::Transposed, Convention::SignFlipped];

    /// The matrix that, read with the row convention, gives this convention.
    fn as_row(self, a: Mat2) -> Mat2 {
        match self {
            Convention::Row => a,
            Convention::ColumnVector => a.transpose(),
            Convention::Transposed => a.transpose().inverse().expect("unimodular"),
            Convention::SignFlipped => Mat2::new(1, 0, 0, -1) * a,
        }
    }
}

/// `H₁` of a graph expression under an explicit basis convention.
pub fn h1_graph_with(reg: &Registry, g: &GraphManifold, convention: Convention) -> Result<AbelianGroup, HomologyError> {
    Ok(graph_presentation(reg, g, convention)?.group())
}

fn seifert_presentation(pres: &mut Presentation, prefix: &str, s: &SeifertBlock) -> Vec<PortBasis> {
    let h = pres.generator(format!("{prefix}h"));
    let mut sum: Vector = Vec::new();
    if s.base.orientable {
        for i in 0..2 * s.base.genus {
            pres.generator(format!("{prefix}a{i}"));
        }
    } else {
        for i in 0..s.base.genus {
            let a = pres.generator(format!("{prefix}a{i}"));
            sum.push((a, 2));
        }
        pres.relation(vec![(h, 2)]);
    }
    for (i, f) in s.fibers.iter().enumerate() {
        let x = pres.generator(format!("{prefix}x{i}"));
        pres.relation(vec![(x, f.p), (h, f.q)]);
        sum.push((x, 1));
    }
    let mut ports = Vec::new();
    for j in 0..s.ports() {
        let c = pres.generator(format!("{prefix}c{j}"));
        sum.push((c, 1));
        ports.push(PortBasis { c: vec![(c, 1)], h: vec![(h, 1)] });
    }
    pres.relation(sum);
    ports
}

fn filled_presentation(
    reg: &Registry,
    pres: &mut Presentation,
    prefix: &str,
    fb: &FilledBlock,
) -> Result<Vec<PortBasis>, HomologyError> {
    let fam = reg.family(&fb.family).ok_or_else(|| HomologyError::UnknownFamily(fb.family.clone()))?;
    if fb.slopes.len() > fam.cusps {
        return Err(HomologyError::TupleLength {
            family: fb.family.clone(),
            cusps: fam.cusps,
            given: fb.slopes.len(),
        });
    }
    Ok(fam.peripheral.present(pres, prefix, &fb.slopes))
}

/// Presentation of a graph manifold, including one free generator per
/// independent cycle of the gluing graph.
pub fn graph_presentation(reg: &Registry, g: &GraphManifold, convention: Convention) -> Result<Presentation, HomologyError> {
    let mut pres = Presentation::new();
    let mut ports = Vec::with_capacity(g.blocks.len());
    for (b, block) in g.blocks.iter().enumerate() {
        let prefix = format!("b{b}.");
        ports.push(match block {
            Block::Seifert(s) => seifert_presentation(&mut pres, &prefix, s),
            Block::Cusped(fb) => filled_presentation(reg, &mut pres, &prefix, fb)?,
        });
    }
    for gl in &g.gluings {
        let a = convention.as_row(gl.matrix);
        let one = &ports[gl.from.block][gl.from.port];
        let two = &ports[gl.to.block][gl.to.port];
        pres.relation(combine(&[(&one.c, 1), (&two.c, -a.a), (&two.h, -a.c)]));
        pres.relation(combine(&[(&one.h, 1), (&two.c, -a.b), (&two.h, -a.d)]));
    }
    let cycles = g.gluings.len() + g.components() - g.blocks.len();
    for k in 0..cycles {
        pres.generator(format!("loop{k}"));
    }
    Ok(pres)
}

/// Every `{−1, 0, +1}` sign assignment on the edges of the chain cycle
/// whose linking matrix reproduces all fixtures.
///
/// The cycle joins cusp `j` to `j + 1 (mod n)`; two cusps share one edge
/// and a single cusp has none.
pub fn calibrate_linking(
    cusps: usize,
    fixtures: &[(FillingTuple, AbelianGroup)],
) -> Result<Vec<Vec<Vec<i64>>>, HomologyError> {
    let edges: Vec<(usize, usize)> = match cusps {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        n => (0..n).map(|j| (j, (j + 1) % n)).collect(),
    };
    let mut survivors = Vec::new();
    let total = 3usize.pow(edges.len() as u32);
    for code in 0..total {
        let mut l = vec![vec![0i64; cusps.max(1)]; cusps.max(1)];
        let mut c = code;
        for &(j, k) in &edges {
            let s = (c % 3) as i64 - 1;
            c /= 3;
            l[j][k] = s;
            l[k][j] = s;
        }
        let datum = PeripheralDatum::from_linking(&l)?;
        let ok = fixtures.iter().all(|(t, g)| h1_filled(&datum, t).is_ok_and(|h| &h == g));
        if ok {
            survivors.push(l);
        }
    }
    if survivors.is_empty() {
        Err(HomologyError::CalibrationFailed(fixtures.len()))
    } else {
        Ok(survivors)
    }
}

/// Signs of the chain-cycle edges of a linking matrix, `(j, j+1 mod n)`.
pub fn chain_signs(l: &[Vec<i64>]) -> Vec<i64> {
    match l.len() {
        0 | 1 => Vec::new(),
        2 => vec![l[0][1]],
        n => (0..n).map(|j| l[j][(j + 1) % n]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::{parse_expr, parse_slopes};

    fn h(text: &str) -> String {
        h1(&parse_expr(text).unwrap()).unwrap().to_string()
    }

    #[test]
    fn anchors() {
        assert_eq!(h("SFS(D;(2,1),(3,1)) =[1,1;0,-1]= SFS(D;(2,1),(3,1))"), "Z35");
        assert_eq!(h("SFS(D;(2,1),(2,1)) =[0,1;1,0]= SFS(D;(2,1),(3,1))"), "Z4");
    }

    #[test]
    fn alternative_conventions_fail_an_anchor() {
        let reg = Registry::builtin();
        let a = parse_expr("SFS(D;(2,1),(3,1)) =[1,1;0,-1]= SFS(D;(2,1),(3,1))").unwrap();
        let b = parse_expr("SFS(D;(2,1),(2,1)) =[0,1;1,0]= SFS(D;(2,1),(3,1))").unwrap();
        for conv in Convention::ALTERNATIVES {
            let ga = h1_graph_with(reg, a.as_graph().unwrap(), conv).unwrap().to_string();
            let gb = h1_graph_with(reg, b.as_graph().unwrap(), conv).unwrap().to_string();
            assert!(ga != "Z35" || gb != "Z4", "{conv:?} passes both anchors");
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(h("TB[3,1;-1,0]"), "Z");
        assert_eq!(h("TB[-3,1;-1,0]"), "Z x Z5");
        assert_eq!(h("L(0,1)"), "Z");
        assert_eq!(h("L(7,2) # L(0,1) # DxS1"), "Z^2 x Z7");
        assert_eq!(h("SFS(S2;(2,1),(3,1),(7,-6))"), "0");
        assert_eq!(h("SFS(P;) /[0,1;1,0]"), "Z^2");
    }

    #[test]
    fn non_orientable_base() {
        // Fibration over the Klein bottle with Euler number 1.
        assert_eq!(h("SFS(K;(1,1))"), "Z x Z4");
        assert_eq!(h("SFS(RP2;(2,1),(2,-1))"), "Z4^2");
    }

    #[test]
    fn filled_examples() {
        let reg = Registry::builtin();
        let fill = |f: &str, s: &str| h1_family(reg, f, &parse_slopes(s).unwrap()).unwrap().to_string();
        assert_eq!(fill("M1", "3"), "Z3");
        assert_eq!(fill("M2", "5/2,7/2"), "Z35");
        assert_eq!(fill("M3", "-2,-2,-2"), "Z4");
        assert_eq!(fill("N3", "2,2,2"), "Z x Z3");
        assert!(h1_family(reg, "M2", &parse_slopes("1,1,1").unwrap()).is_err());
    }

    #[test]
    fn calibration_examples() {
        let z = |s: &str| s.parse::<AbelianGroup>().unwrap();
        let t = |s: &str| parse_slopes(s).unwrap();
        let m1 = calibrate_linking(1, &[(t("3"), z("Z3"))]).unwrap();
        assert_eq!(m1, vec![vec![vec![0]]]);
        let m3 = calibrate_linking(3, &[(t("-2,-2,-2"), z("Z4")), (t("inf"), z("Z^2"))]).unwrap();
        let stored = Registry::builtin().family("M3").unwrap().peripheral.linking_matrix().unwrap().to_vec();
        assert!(m3.iter().any(|l| l == &stored));
        assert!(m3.iter().all(|l| chain_signs(l).iter().product::<i64>() <= 0));
        let n3 = calibrate_linking(3, &[(t("2,2,2"), z("Z x Z3"))]).unwrap();
        assert!(n3.iter().any(|l| chain_signs(l) == vec![1, 1, -1]));
    }
}
