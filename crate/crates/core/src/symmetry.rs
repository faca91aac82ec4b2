//! Symmetry actions on filling tuples: cusp permutations with per-cusp
//! slope maps, group closure, orbits, canonical representatives and the
//! factoring predicates.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::chains::Family;
use crate::exactalg::Mat2;
use crate::manifolds::{FillingTuple, Slope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("slope map determinant must be 1 or -1, found {0}")]
    Determinant(i64),
    #[error("cycle entry {entry} out of range for {cusps} cusps")]
    CycleRange { entry: usize, cusps: usize },
    #[error("cusp {0} appears twice in the cycles")]
    RepeatedCusp(usize),
    #[error("expected {expected} slope maps, found {found}")]
    MapCount { expected: usize, found: usize },
    #[error("tuple has {found} entries, the group acts on {expected} cusps")]
    Length { expected: usize, found: usize },
    #[error("closure exceeds {0} elements")]
    Explosion(usize),
    #[error("closure has {found} elements, declared order is {declared}")]
    OrderMismatch { declared: usize, found: usize },
}

/// Slope map `p/q ↦ (a·p + b·q)/(c·p + d·q)`. A matrix and its negative
/// act identically and compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlopeMap(Mat2);

impl SlopeMap {
    pub const IDENTITY: SlopeMap = SlopeMap(Mat2::IDENTITY);

    pub fn new(m: Mat2) -> Result<Self, SymmetryError> {
        match m.det() {
            1 | -1 => Ok(SlopeMap(m.projective())),
            d => Err(SymmetryError::Determinant(d)),
        }
    }

    pub fn matrix(&self) -> Mat2 {
        self.0
    }

    pub fn apply(&self, s: Slope) -> Slope {
        let m = self.0;
        Slope::new(m.a * s.p() + m.b * s.q(), m.c * s.p() + m.d * s.q())
            .expect("a unimodular map sends nonzero vectors to nonzero vectors")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SlopeMap) -> SlopeMap {
        SlopeMap((self.0 * other.0).projective())
    }
}

/// A cusp permutation with one slope map per source cusp: the slope at
/// cusp `i` moves to cusp `perm[i]` after applying `maps[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CuspSymmetry {
    perm: Vec<usize>,
    maps: Vec<SlopeMap>,
}

impl CuspSymmetry {
    pub fn identity(cusps: usize) -> Self {
        CuspSymmetry { perm: (0..cusps).collect(), maps: vec![SlopeMap::IDENTITY; cusps] }
    }

    /// Permutation from disjoint cycles, each sending an entry to the next.
    /// `maps` defaults to identity maps.
    pub fn from_cycles(cusps: usize, cycles: &[Vec<usize>], maps: Option<Vec<SlopeMap>>) -> Result<Self, SymmetryError> {
        let mut perm: Vec<usize> = (0..cusps).collect();
        let mut seen = vec![false; cusps];
        for cycle in cycles {
            for (i, &c) in cycle.iter().enumerate() {
                if c >= cusps {
                    return Err(SymmetryError::CycleRange { entry: c, cusps });
                }
                if std::mem::replace(&mut seen[c], true) {
                    return Err(SymmetryError::RepeatedCusp(c));
                }
                perm[c] = cycle[(i + 1) % cycle.len()];
            }
        }
        let maps = maps.unwrap_or_else(|| vec![SlopeMap::IDENTITY; cusps]);
        if maps.len() != cusps {
            return Err(SymmetryError::MapCount { expected: cusps, found: maps.len() });
        }
        Ok(CuspSymmetry { perm, maps })
    }

    pub fn cusps(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn maps(&self) -> &[SlopeMap] {
        &self.maps
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &CuspSymmetry) -> CuspSymmetry {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let maps = other
            .perm
            .iter()
            .zip(&other.maps)
            .map(|(&j, m)| self.maps[j].compose(m))
            .collect();
        CuspSymmetry { perm, maps }
    }
}

/// Applies a symmetry to a tuple; unfilled marks move without change.
pub fn act(sym: &CuspSymmetry, t: &FillingTuple) -> Result<FillingTuple, SymmetryError> {
    if t.len() != sym.cusps() {
        return Err(SymmetryError::Length { expected: sym.cusps(), found: t.len() });
    }
    let mut out = vec![None; t.len()];
    for (i, s) in t.0.iter().enumerate() {
        out[sym.perm[i]] = s.map(|s| sym.maps[i].apply(s));
    }
    Ok(FillingTuple(out))
}

/// A finite group of cusp symmetries, stored as its full element list.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    cusps: usize,
    generators: Vec<CuspSymmetry>,
    elements: Vec<CuspSymmetry>,
}

impl SymmetryGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn cusps(&self) -> usize {
        self.cusps
    }

    pub fn generators(&self) -> &[CuspSymmetry] {
        &self.generators
    }

    pub fn elements(&self) -> &[CuspSymmetry] {
        &self.elements
    }
}

/// Breadth-first closure of `generators` acting on `cusps` cusps.
pub fn close(
    cusps: usize,
    generators: &[CuspSymmetry],
    max_size: usize,
    declared_order: Option<usize>,
) -> Result<SymmetryGroup, SymmetryError> {
    for g in generators {
        if g.cusps() != cusps {
            return Err(SymmetryError::Length { expected: cusps, found: g.cusps() });
        }
    }
    let id = CuspSymmetry::identity(cusps);
    let mut index: HashMap<CuspSymmetry, ()> = HashMap::from([(id.clone(), ())]);
    let mut elements = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = g.compose(&x);
            if index.insert(y.clone(), ()).is_none() {
                if elements.len() >= max_size {
                    return Err(SymmetryError::Explosion(max_size));
                }
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    if let Some(declared) = declared_order {
        if declared != elements.len() {
            return Err(SymmetryError::OrderMismatch { declared, found: elements.len() });
        }
    }
    Ok(SymmetryGroup { cusps, generators: generators.to_vec(), elements })
}

/// Total order on tuple entries: unfilled, then `∞`, then rationals by value.
pub fn cmp_entry(x: &Option<Slope>, y: &Option<Slope>) -> Ordering {
    match (x, y) {
        (None, None) => Ordering::Equal,
        (None, _) => Ordering::Less,
        (_, None) => Ordering::Greater,
        (Some(a), Some(b)) => match (a.is_infinite(), b.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => {
                (i128::from(a.p()) * i128::from(b.q())).cmp(&(i128::from(b.p()) * i128::from(a.q())))
            }
        },
    }
}

/// Lexicographic order built from [`cmp_entry`].
pub fn cmp_tuple(a: &FillingTuple, b: &FillingTuple) -> Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        match cmp_entry(x, y) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Wrapper ordering tuples by [`cmp_tuple`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordered(pub FillingTuple);

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_tuple(&self.0, &other.0)
    }
}

/// The orbit of `t`, sorted by [`cmp_tuple`].
pub fn orbit(group: &SymmetryGroup, t: &FillingTuple) -> Result<Vec<FillingTuple>, SymmetryError> {
    let t = t.padded(group.cusps);
    let mut set = BTreeSet::new();
    for g in &group.elements {
        set.insert(Ordered(act(g, &t)?));
    }
    Ok(set.into_iter().map(|o| o.0).collect())
}

/// Least element of the orbit.
pub fn canonical_rep(group: &SymmetryGroup, t: &FillingTuple) -> Result<FillingTuple, SymmetryError> {
    Ok(orbit(group, t)?.swap_remove(0))
}

/// Why a filling factors through a smaller manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FactorReason {
    Slope { cusp: usize, slope: String },
    Pair { cusps: (usize, usize), slopes: (String, String) },
}

impl fmt::Display for FactorReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorReason::Slope { cusp, slope } => write!(f, "slope {slope} at cusp {cusp}"),
            FactorReason::Pair { slopes: (a, b), .. } => write!(f, "pair ({a},{b}) consecutive"),
        }
    }
}

/// The family's factoring rule applied to `t`; `None` when it does not fire.
/// Pairs are matched on cyclically adjacent cusps.
pub fn factor_reason(family: &Family, t: &FillingTuple) -> Option<FactorReason> {
    let rule = &family.factor_rule;
    for (cusp, s) in t.0.iter().enumerate() {
        if let Some(s) = s {
            if rule.slopes.contains(s) {
                return Some(FactorReason::Slope { cusp, slope: s.to_string() });
            }
        }
    }
    // Adjacency is cyclic over the family's cusps, not the written tuple.
    let n = family.cusps;
    if n < 2 {
        return None;
    }
    for i in 0..n {
        let j = (i + 1) % n;
        if n == 2 && i == 1 {
            break;
        }
        let (Some(x), Some(y)) = (t.get(i), t.get(j)) else { continue };
        for &(a, b) in &rule.pairs {
            if (x, y) == (a, b) || (x, y) == (b, a) {
                return Some(FactorReason::Pair { cusps: (i, j), slopes: (a.to_string(), b.to_string()) });
            }
        }
    }
    None
}

pub fn factors(family: &Family, t: &FillingTuple) -> bool {
    factor_reason(family, t).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Registry;
    use crate::notation::parse_slopes;

    fn t(s: &str) -> FillingTuple {
        parse_slopes(s).unwrap()
    }

    fn map(a: i64, b: i64, c: i64, d: i64) -> SlopeMap {
        SlopeMap::new(Mat2::new(a, b, c, d)).unwrap()
    }

    #[test]
    fn slope_maps() {
        let c1 = map(0, 1, -1, 1);
        assert_eq!(c1.apply(Slope::integer(-1)), Slope::new(1, 2).unwrap());
        assert_eq!(map(-1, 0, 0, -1), SlopeMap::IDENTITY);
        assert!(SlopeMap::new(Mat2::new(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn rotation_acts_cyclically() {
        let rot = CuspSymmetry::from_cycles(7, &[(0..7).collect()], None).unwrap();
        assert_eq!(act(&rot, &t("1,2,3,4,5,6,7")).unwrap(), t("7,1,2,3,4,5,6"));
        let id = CuspSymmetry::identity(3);
        assert_eq!(act(&id, &t("-2,-2,-2")).unwrap(), t("-2,-2,-2"));
        assert!(act(&id, &t("1,2")).is_err());
    }

    #[test]
    fn dihedral_closure() {
        let rot = CuspSymmetry::from_cycles(7, &[(0..7).collect()], None).unwrap();
        let refl = CuspSymmetry::from_cycles(7, &[vec![1, 6], vec![2, 5], vec![3, 4]], None).unwrap();
        assert_eq!(close(7, &[rot.clone(), refl], 1000, Some(14)).unwrap().order(), 14);
        assert_eq!(close(7, &[], 10, None).unwrap().order(), 1);
        assert!(matches!(close(7, &[rot], 3, None), Err(SymmetryError::Explosion(3))));
    }

    #[test]
    fn c1_orbit_of_minus_one() {
        let c1 = CuspSymmetry { perm: vec![0], maps: vec![map(0, 1, -1, 1)] };
        let g = close(1, &[c1], 100, None).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(orbit(&g, &t("-1")).unwrap(), vec![t("-1"), t("1/2"), t("2")]);
    }

    #[test]
    fn entry_order() {
        assert_eq!(cmp_tuple(&t("."), &t("inf")), Ordering::Less);
        assert_eq!(cmp_tuple(&t("inf"), &t("-100")), Ordering::Less);
        assert_eq!(cmp_tuple(&t("-1/2"), &t("-1/3")), Ordering::Less);
    }

    #[test]
    fn factoring_rules() {
        let reg = Registry::builtin();
        let m6 = reg.family("M6").unwrap();
        assert!(factors(m6, &t("3,1,.,.,.,.")));
        let m7 = reg.family("M7").unwrap();
        assert!(factors(m7, &t("-2,-2,0,0,0,0,0")));
        assert!(factors(m7, &t("-2,0,0,0,0,0,-2")));
        assert!(!factors(m7, &t("-2,.,-2")));
        let n5 = reg.family("N5").unwrap();
        assert!(!factors(n5, &t("2,2,2,2,2")));
        let r = factor_reason(m7, &t("-2,-2,0,0,0,0,0")).unwrap();
        assert_eq!(r.to_string(), "pair (-2,-2) consecutive");
    }
}
