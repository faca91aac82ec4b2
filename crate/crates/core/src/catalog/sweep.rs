//! Exhaustive parameter sweeps over the families.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use crate::chains::Registry;
use crate::exactalg::abelian_iso;
use crate::homology::h1_in;
use crate::manifolds::Manifold;
use crate::moves::normalize;

use super::classify::{classify_double_annulus, classify_self_glue, classify_three_block, classify_two_block};
use super::{generate_family, Classified, FamilySpec};

/// Coprime pairs with `|p|, |q| ≤ bound`, one of each `±(p, q)`: `p > 0`,
/// or `(0, 1)`.
pub fn coprime_pairs(bound: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0, 1)];
    for p in 1..=bound {
        for q in -bound..=bound {
            if p.gcd(&q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

/// Parameter vectors of a family: all tuples of pairs from
/// [`coprime_pairs`], or the index range. Members outside the family's
/// domain are skipped by the caller.
pub fn instances(spec: FamilySpec, bound: i64) -> Box<dyn Iterator<Item = Vec<i64>>> {
    if let Some(range) = spec.index_range() {
        return Box::new(range.map(|n| vec![n]));
    }
    if spec.arity() == 0 {
        return Box::new(std::iter::once(Vec::new()));
    }
    let pairs = coprime_pairs(bound);
    let slots = spec.arity() / 2;
    let mut digits = vec![0usize; slots];
    let mut done = false;
    Box::new(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = digits.iter().flat_map(|&d| [pairs[d].0, pairs[d].1]).collect();
        // Odometer, last slot fastest.
        done = true;
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < pairs.len() {
                done = false;
                break;
            }
            *d = 0;
        }
        Some(out)
    }))
}

/// The case analysis of a family, for the families that have one.
pub fn classify(spec: FamilySpec, params: &[i64]) -> Option<Classified> {
    Some(match spec {
        FamilySpec::M5TwoBlock => classify_two_block(params.try_into().ok()?),
        FamilySpec::M5SelfGlue => classify_self_glue(params.try_into().ok()?),
        FamilySpec::M6ThreeBlock => classify_three_block(params.try_into().ok()?),
        FamilySpec::M6DoubleAnnulus | FamilySpec::M7DoubleAnnulus => classify_double_annulus(params.try_into().ok()?),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub family: String,
    pub bound: i64,
    pub instances: usize,
    pub cases: BTreeMap<u8, usize>,
    /// Parameters whose classified output has a different `H₁`.
    pub mismatches: Vec<Vec<i64>>,
    /// First parameters seen for each case.
    pub first: BTreeMap<u8, Vec<i64>>,
}

impl SweepReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty() && self.instances > 0
    }
}

/// Classifies every instance up to `bound` and compares `H₁` of the
/// generated expression with `H₁` of the normalized classified output.
pub fn sweep(reg: &Registry, spec: FamilySpec, bound: i64) -> SweepReport {
    sweep_over(reg, spec, bound, instances(spec, bound))
}

pub fn sweep_over(reg: &Registry, spec: FamilySpec, bound: i64, params: impl Iterator<Item = Vec<i64>>) -> SweepReport {
    let mut report = SweepReport {
        family: spec.id().to_string(),
        bound,
        instances: 0,
        cases: BTreeMap::new(),
        mismatches: Vec::new(),
        first: BTreeMap::new(),
    };
    for p in params {
        let Ok(generated) = generate_family(reg, spec, &p) else { continue };
        let Some(c) = classify(spec, &p) else { continue };
        report.instances += 1;
        *report.cases.entry(c.case).or_insert(0) += 1;
        report.first.entry(c.case).or_insert_with(|| p.clone());
        if !same_h1(reg, &generated, &normalize(&c.output)) {
            report.mismatches.push(p);
        }
    }
    report
}

fn same_h1(reg: &Registry, a: &Manifold, b: &Manifold) -> bool {
    match (h1_in(reg, a), h1_in(reg, b)) {
        (Ok(x), Ok(y)) => abelian_iso(&x, &y),
        _ => false,
    }
}
