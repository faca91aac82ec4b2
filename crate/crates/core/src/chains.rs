//! Registry of the chain-link families: cusp counts, peripheral data, the
//! 0 and ∞ filling constructors, symmetry generators, factoring rules and
//! the named identities between fillings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{AbelianGroup, Mat2};
use crate::homology::{h1_in, HomologyError, PeripheralDatum};
use crate::manifolds::{BaseSurface, Block, CuspCounts, Manifold, SeifertBlock, Slope};
use crate::notation::{self, NotationError};
use crate::symmetry::{close, CuspSymmetry, SlopeMap, SymmetryError, SymmetryGroup};

/// Data format understood by this build.
pub const DATA_VERSION: i64 = 1;

const BUILTIN_FAMILIES: &str = include_str!("../../../data/v1/families.toml");
const BUILTIN_IDENTITIES: &str = include_str!("../../../data/v1/identities.txt");

/// Upper bound on symmetry-group closures built from registry data.
const MAX_GROUP: usize = 100_000;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("families file: {0}")]
    Toml(String),
    #[error("unsupported data version {0}, expected {DATA_VERSION}")]
    Version(i64),
    #[error("family {family}: {message}")]
    Family { family: String, message: String },
    #[error("identities line {line}: {message}")]
    Identity { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("{family} has {cusps} cusps, no cusp {cusp}")]
    CuspRange { family: String, cusps: usize, cusp: usize },
}

/// Slopes that make a filling factor through a smaller manifold.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactorRule {
    /// Any of these slopes at any cusp.
    pub slopes: Vec<Slope>,
    /// Either order of a pair on two cyclically adjacent cusps.
    pub pairs: Vec<(Slope, Slope)>,
}

/// `X(slope) = gives`, the slope at any one cusp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blowdown {
    pub slope: Slope,
    pub gives: String,
}

#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub cusps: usize,
    pub peripheral: PeripheralDatum,
    /// Display metadata; no computation reads it.
    pub volume: Option<f64>,
    pub isometry_order: Option<usize>,
    pub generators_complete: bool,
    /// Isometries acting trivially on every slope, such as a hyperelliptic
    /// involution; they are invisible to the tuple action.
    pub slope_kernel: usize,
    pub zero_filling: Manifold,
    pub infinity_filling: Option<Manifold>,
    pub factor_rule: FactorRule,
    pub blowdowns: Vec<Blowdown>,
    pub symmetries: Vec<(String, CuspSymmetry)>,
    pub slope_actions: Vec<SlopeMap>,
}

impl Family {
    /// Closure of the cusp-symmetry generators; the declared isometry order
    /// is enforced only when the generators are complete.
    pub fn symmetry_group(&self) -> Result<SymmetryGroup, SymmetryError> {
        let gens: Vec<CuspSymmetry> = self.symmetries.iter().map(|(_, s)| s.clone()).collect();
        let declared = match (self.generators_complete, self.isometry_order) {
            (true, Some(order)) => Some(order / self.slope_kernel),
            _ => None,
        };
        close(self.cusps, &gens, MAX_GROUP, declared)
    }

    /// One-cusp group generated by the single-torus slope actions.
    pub fn slope_action_group(&self) -> Result<SymmetryGroup, SymmetryError> {
        let gens: Vec<CuspSymmetry> = self
            .slope_actions
            .iter()
            .map(|m| CuspSymmetry::from_cycles(1, &[], Some(vec![*m])))
            .collect::<Result<_, _>>()?;
        close(1, &gens, MAX_GROUP, None)
    }
}

/// A chain of expressions asserted to describe the same manifold.
#[derive(Debug, Clone)]
pub struct NamedIdentity {
    pub line: usize,
    pub text: String,
    pub sides: Vec<Manifold>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub text: String,
    pub sides: Vec<String>,
    pub groups: Vec<String>,
    pub pass: bool,
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "ok" } else { "MISMATCH" };
        let parts: Vec<String> = self.sides.iter().zip(&self.groups).map(|(s, g)| format!("{s} [{g}]")).collect();
        write!(f, "{verdict}: {}", parts.join(" = "))
    }
}

#[derive(Debug, Clone)]
pub struct Registry {
    families: BTreeMap<String, Family>,
    identities: Vec<NamedIdentity>,
}

/// Cusp counts alone, used while the registry's own expressions are parsed.
struct CuspTable(BTreeMap<String, usize>);

impl CuspCounts for CuspTable {
    fn cusp_count(&self, family: &str) -> Option<usize> {
        self.0.get(family).copied()
    }
}

impl CuspCounts for Registry {
    fn cusp_count(&self, family: &str) -> Option<usize> {
        self.families.get(family).map(|f| f.cusps)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    version: i64,
    family: Vec<RawFamily>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    name: String,
    cusps: usize,
    linking: Vec<Vec<i64>>,
    volume: Option<f64>,
    isometry_order: Option<usize>,
    #[serde(default)]
    generators_complete: bool,
    #[serde(default = "one")]
    slope_kernel: usize,
    zero_filling: String,
    infinity_filling: Option<String>,
    #[serde(default)]
    factor_slopes: Vec<String>,
    #[serde(default)]
    factor_pairs: Vec<[String; 2]>,
    #[serde(default)]
    slope_actions: Vec<[i64; 4]>,
    #[serde(default)]
    blowdown: Vec<RawBlowdown>,
    #[serde(default)]
    symmetry: Vec<RawSymmetry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlowdown {
    slope: String,
    gives: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSymmetry {
    name: String,
    cycles: Vec<Vec<usize>>,
    maps: Option<Vec<[i64; 4]>>,
}

fn one() -> usize {
    1
}

fn slope_map(m: [i64; 4]) -> Result<SlopeMap, SymmetryError> {
    SlopeMap::new(Mat2::new(m[0], m[1], m[2], m[3]))
}

fn one_slope(text: &str) -> Result<Slope, String> {
    let t = notation::parse_slopes(text).map_err(|e| e.to_string())?;
    match t.0.as_slice() {
        [Some(s)] => Ok(*s),
        _ => Err(format!("expected a single slope, found {text:?}")),
    }
}

impl Registry {
    /// The registry shipped in `data/v1`, parsed once.
    pub fn builtin() -> &'static Registry {
        static BUILTIN: OnceLock<Registry> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            Registry::from_sources(BUILTIN_FAMILIES, BUILTIN_IDENTITIES).expect("built-in registry data is valid")
        })
    }

    /// Reads `families.toml` and `identities.txt` from a data directory.
    pub fn load_dir(dir: &Path) -> Result<Registry, RegistryError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| RegistryError::Io { path, source })
        };
        Registry::from_sources(&read("families.toml")?, &read("identities.txt")?)
    }

    pub fn from_sources(families: &str, identities: &str) -> Result<Registry, RegistryError> {
        let raw: RawFile = toml::from_str(families).map_err(|e| RegistryError::Toml(e.to_string()))?;
        if raw.version != DATA_VERSION {
            return Err(RegistryError::Version(raw.version));
        }
        let table = CuspTable(raw.family.iter().map(|f| (f.name.clone(), f.cusps)).collect());
        let mut out = BTreeMap::new();
        for rf in raw.family {
            let family = build_family(&table, rf)?;
            if out.contains_key(&family.name) {
                return Err(RegistryError::Family { family: family.name, message: "defined twice".into() });
            }
            out.insert(family.name.clone(), family);
        }
        let mut reg = Registry { families: out, identities: Vec::new() };
        for f in reg.families.values() {
            for b in &f.blowdowns {
                if !reg.families.contains_key(&b.gives) {
                    return Err(RegistryError::Family {
                        family: f.name.clone(),
                        message: format!("blow-down names unknown family {}", b.gives),
                    });
                }
            }
        }
        reg.identities = parse_identities(&reg, identities)?;
        Ok(reg)
    }

    pub fn family(&self, name: &str) -> Option<&Family> {
        self.families.get(name)
    }

    /// Families in name order.
    pub fn families(&self) -> impl Iterator<Item = &Family> {
        self.families.values()
    }

    pub fn identities(&self) -> &[NamedIdentity] {
        &self.identities
    }

    fn lookup(&self, family: &str, cusp: usize) -> Result<&Family, ChainError> {
        let f = self.family(family).ok_or_else(|| ChainError::UnknownFamily(family.to_string()))?;
        if cusp >= f.cusps {
            return Err(ChainError::CuspRange { family: family.to_string(), cusps: f.cusps, cusp });
        }
        Ok(f)
    }

    /// The family with one component removed.
    pub fn fill_infinity(&self, family: &str, cusp: usize) -> Result<Manifold, ChainError> {
        let f = self.lookup(family, cusp)?;
        if let Some(m) = &f.infinity_filling {
            return Ok(m.clone());
        }
        Ok(chain_complement(f.cusps - 1))
    }

    /// The 0-filling at one cusp, as tabulated for the family.
    pub fn fill_zero(&self, family: &str, cusp: usize) -> Result<Manifold, ChainError> {
        Ok(self.lookup(family, cusp)?.zero_filling.clone())
    }

    /// Checks `H₁` agreement across the sides of an identity.
    pub fn check_identity(&self, id: &NamedIdentity) -> Result<IdentityReport, HomologyError> {
        let groups: Vec<AbelianGroup> = id.sides.iter().map(|m| h1_in(self, m)).collect::<Result<_, _>>()?;
        Ok(IdentityReport {
            text: id.text.clone(),
            sides: id.sides.iter().map(notation::print_expr).collect(),
            pass: groups.windows(2).all(|w| w[0] == w[1]),
            groups: groups.iter().map(ToString::to_string).collect(),
        })
    }

    /// Blow-down relations `X(s) = Y` as identities, one per family entry.
    pub fn blowdown_identities(&self) -> Vec<NamedIdentity> {
        let mut out = Vec::new();
        for f in self.families.values() {
            for b in &f.blowdowns {
                let left = crate::manifolds::FilledBlock::new(
                    f.name.clone(),
                    f.cusps,
                    crate::manifolds::FillingTuple(vec![Some(b.slope)]),
                );
                let gives = &self.families[&b.gives];
                let right = crate::manifolds::FilledBlock::new(b.gives.clone(), gives.cusps, Default::default());
                out.push(NamedIdentity {
                    line: 0,
                    text: format!("{}({}) = {}", f.name, b.slope, b.gives),
                    sides: vec![Manifold::Filled(left), Manifold::Filled(right)],
                });
            }
        }
        out
    }
}

/// Complement of a trivial chain of `components` unknots: `S³`, `D×S¹`,
/// `A×S¹`, `P×S¹`, then pants bundles glued by the swap.
pub fn chain_complement(components: usize) -> Manifold {
    let circle_bundle = |base| Block::Seifert(SeifertBlock::new(base, Vec::new()));
    match components {
        0 => Manifold::S3,
        1 => Manifold::SolidTorus,
        2 => Manifold::seifert(SeifertBlock::new(BaseSurface::ANNULUS, Vec::new())),
        n => {
            let blocks = vec![circle_bundle(BaseSurface::PANTS); n - 2];
            let links = vec![Mat2::SWAP; n - 3];
            Manifold::Graph(crate::manifolds::chain(blocks, &links).expect("pants have three ports"))
        }
    }
}

fn build_family(table: &CuspTable, rf: RawFamily) -> Result<Family, RegistryError> {
    let name = rf.name.clone();
    let err = |message: String| RegistryError::Family { family: name.clone(), message };
    if rf.slope_kernel == 0 {
        return Err(err("slope_kernel must be positive".into()));
    }
    if rf.cusps == 0 {
        return Err(err("a family needs at least one cusp".into()));
    }
    if rf.linking.len() != rf.cusps {
        return Err(err(format!("linking matrix has {} rows for {} cusps", rf.linking.len(), rf.cusps)));
    }
    let peripheral = PeripheralDatum::from_linking(&rf.linking).map_err(|e| err(e.to_string()))?;
    let parse = |text: &str| -> Result<Manifold, RegistryError> {
        notation::parse_expr_in(table, text).map_err(|e: NotationError| err(format!("{text:?}: {e}")))
    };
    let zero_filling = parse(&rf.zero_filling)?;
    let infinity_filling = rf.infinity_filling.as_deref().map(parse).transpose()?;
    let slopes = rf.factor_slopes.iter().map(|s| one_slope(s)).collect::<Result<_, _>>().map_err(err)?;
    let pairs = rf
        .factor_pairs
        .iter()
        .map(|[a, b]| Ok((one_slope(a)?, one_slope(b)?)))
        .collect::<Result<_, String>>()
        .map_err(err)?;
    let blowdowns = rf
        .blowdown
        .iter()
        .map(|b| Ok(Blowdown { slope: one_slope(&b.slope)?, gives: b.gives.clone() }))
        .collect::<Result<_, String>>()
        .map_err(err)?;
    let mut symmetries = Vec::new();
    for s in rf.symmetry {
        let maps = s
            .maps
            .map(|ms| ms.into_iter().map(slope_map).collect::<Result<Vec<_>, _>>())
            .transpose()
            .map_err(|e| err(e.to_string()))?;
        let sym = CuspSymmetry::from_cycles(rf.cusps, &s.cycles, maps).map_err(|e| err(format!("{}: {e}", s.name)))?;
        symmetries.push((s.name, sym));
    }
    let slope_actions = rf
        .slope_actions
        .into_iter()
        .map(slope_map)
        .collect::<Result<_, _>>()
        .map_err(|e| err(e.to_string()))?;
    let family = Family {
        name: rf.name,
        cusps: rf.cusps,
        peripheral,
        volume: rf.volume,
        isometry_order: rf.isometry_order,
        generators_complete: rf.generators_complete,
        slope_kernel: rf.slope_kernel,
        zero_filling,
        infinity_filling,
        factor_rule: FactorRule { slopes, pairs },
        blowdowns,
        symmetries,
        slope_actions,
    };
    family.symmetry_group().map_err(|e| err(e.to_string()))?;
    Ok(family)
}

fn parse_identities(reg: &Registry, text: &str) -> Result<Vec<NamedIdentity>, RegistryError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let sides = line
            .split('=')
            .map(|side| notation::parse_expr_in(reg, side.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| RegistryError::Identity { line: i + 1, message: e.to_string() })?;
        if sides.len() < 2 {
            return Err(RegistryError::Identity { line: i + 1, message: "needs at least two sides".into() });
        }
        out.push(NamedIdentity { line: i + 1, text: line.to_string(), sides });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{chain_signs, h1_family};
    use crate::manifolds::{free_boundary_count, FillingTuple};
    use crate::notation::{parse_slopes, print_expr};

    fn reg() -> &'static Registry {
        Registry::builtin()
    }

    #[test]
    fn families_load() {
        let names: Vec<&str> = reg().families().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["M1", "M2", "M3", "M4", "M5", "M6", "M7", "N3", "N4", "N5", "N6", "W"]);
        for f in reg().families() {
            assert_eq!(f.peripheral.cusps(), f.cusps);
        }
    }

    #[test]
    fn infinity_fillings() {
        assert_eq!(print_expr(&reg().fill_infinity("M3", 0).unwrap()), "AxS1");
        assert_eq!(
            print_expr(&reg().fill_infinity("M6", 2).unwrap()),
            "PxS1 =[0,1;1,0]= PxS1 =[0,1;1,0]= PxS1"
        );
        assert_eq!(reg().fill_infinity("M1", 0).unwrap(), Manifold::S3);
        assert_eq!(print_expr(&reg().fill_infinity("W", 1).unwrap()), "DxS1 # DxS1");
        assert!(reg().fill_infinity("M3", 3).is_err());
        assert!(reg().fill_infinity("Q", 0).is_err());
    }

    #[test]
    fn infinity_filling_matches_peripheral_homology() {
        for f in reg().families() {
            for cusp in 0..f.cusps {
                let mut t = FillingTuple(vec![None; f.cusps]);
                t.0[cusp] = Some(Slope::INFINITY);
                let direct = h1_family(reg(), &f.name, &t).unwrap();
                let expr = reg().fill_infinity(&f.name, cusp).unwrap();
                assert_eq!(h1_in(reg(), &expr).unwrap(), direct, "{} cusp {cusp}", f.name);
                assert_eq!(free_boundary_count(&expr), f.cusps - 1);
            }
        }
    }

    #[test]
    fn zero_filling_matches_peripheral_homology() {
        for f in reg().families() {
            for cusp in 0..f.cusps {
                let mut t = FillingTuple(vec![None; f.cusps]);
                t.0[cusp] = Some(Slope::integer(0));
                let direct = h1_family(reg(), &f.name, &t).unwrap();
                let expr = reg().fill_zero(&f.name, cusp).unwrap();
                assert_eq!(h1_in(reg(), &expr).unwrap(), direct, "{} cusp {cusp}", f.name);
            }
        }
        assert_eq!(print_expr(&reg().fill_zero("N6", 0).unwrap()), "M4 =[0,1;1,0]= PxS1");
        assert_eq!(print_expr(&reg().fill_zero("M4", 0).unwrap()), "PxS1 =[0,1;1,0]= SFS(A;(2,1))");
    }

    #[test]
    fn identities_agree_in_homology() {
        assert_eq!(reg().identities().len(), 16);
        for id in reg().identities().iter().chain(&reg().blowdown_identities()) {
            let r = reg().check_identity(id).unwrap();
            assert!(r.pass, "{r}");
        }
        let n5 = reg().identities().iter().find(|i| i.text.starts_with("N5(-1)")).unwrap();
        assert_eq!(reg().check_identity(n5).unwrap().groups, ["Z^4", "Z^4", "Z^4"]);
    }

    #[test]
    fn stored_signs() {
        let signs = |f: &str| chain_signs(reg().family(f).unwrap().peripheral.linking_matrix().unwrap());
        assert_eq!(signs("M3"), [1, 1, -1]);
        assert_eq!(signs("N4"), [1, 1, 1, 1]);
        assert_eq!(signs("W"), [0, 0, 0]);
        let h = h1_family(reg(), "N3", &parse_slopes("2,2,2").unwrap()).unwrap();
        assert_eq!(h.to_string(), "Z x Z3");
    }

    #[test]
    fn malformed_data_is_rejected() {
        let bad = BUILTIN_FAMILIES.replace("cusps = 3\n", "cusps = 4\n");
        assert!(Registry::from_sources(&bad, "").is_err());
        let bad = BUILTIN_FAMILIES.replace("version = 1", "version = 2");
        assert!(matches!(Registry::from_sources(&bad, ""), Err(RegistryError::Version(2))));
        assert!(Registry::from_sources(BUILTIN_FAMILIES, "Q3(1) = M2").is_err());
        assert!(Registry::from_sources(BUILTIN_FAMILIES, "M2").is_err());
    }

    #[test]
    fn symmetry_groups_close() {
        for f in reg().families() {
            let g = f.symmetry_group().unwrap();
            if f.generators_complete {
                assert_eq!(Some(g.order() * f.slope_kernel), f.isometry_order);
            }
        }
        assert_eq!(reg().family("M7").unwrap().symmetry_group().unwrap().order(), 14);
        assert_eq!(reg().family("M5").unwrap().slope_action_group().unwrap().order(), 3);
    }
}
