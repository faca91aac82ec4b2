//! Which orientable flat 3-manifolds arise among the double-annulus family.
//!
//! Five of the six orientable flat manifolds are torus bundles with finite
//! order monodromy (`I`, `−I`, orders 3, 4, 6); the sixth, the
//! Hantzsche–Wendt manifold, is Seifert over `ℝP²` with fibers `(2,1)` and
//! `(2,−1)`.

use serde::Serialize;

use crate::exactalg::Mat2;
use crate::homology::h1;
use crate::manifolds::Manifold;

use super::classify::{classify_two_block, thm27_matrix};

/// `C(m,n,f) = [[−(1+mf), −f], [−m−n−mnf, −(1+nf)]]`, the monodromy of the
/// torus bundles in the double-annulus family.
pub fn prop29_monodromy(m: i64, n: i64, f: i64) -> Mat2 {
    let b = thm27_matrix(m, n, f);
    Mat2::new(-b.a, -b.b, b.c, b.d)
}

/// Order of `a` in `SL(2,ℤ)` if it is at most 6. Finite order forces
/// `|tr| ≤ 1` or `a = ±I`, and then `a² = tr·a − I` keeps powers small.
fn finite_order(a: Mat2) -> Option<u32> {
    let tr = a.a + a.d;
    if tr.abs() > 2 || (tr.abs() == 2 && (a.b, a.c) != (0, 0)) {
        return None;
    }
    let mut p = a;
    for k in 1..=6 {
        if p == Mat2::IDENTITY {
            return Some(k);
        }
        p = p * a;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatType {
    pub name: &'static str,
    /// `(m, n, f)` of the first monodromy of this type, in sweep order.
    pub witness: Option<(i64, i64, i64)>,
    /// The witness expression and its `H₁`, for types found outside the sweep.
    pub expression: Option<String>,
    pub h1: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatReport {
    pub bound: i64,
    pub identity_found: bool,
    /// Values `a` with `|a| ≤ bound` for which `[[−1,0],[a,−1]]` was not found.
    pub missing_a: Vec<i64>,
    pub types: Vec<FlatType>,
}

impl FlatReport {
    pub fn reachable(&self) -> Vec<&'static str> {
        self.types.iter().filter(|t| t.witness.is_some() || t.expression.is_some()).map(|t| t.name).collect()
    }
}

/// Sweeps `C(m,n,f)` over `|m|,|n|,|f| ≤ bound`.
pub fn flat_reachability(bound: i64) -> FlatReport {
    const TORUS_TYPES: [(&str, u32); 5] = [("3-torus", 1), ("G2 (half turn)", 2), ("G3 (third turn)", 3), ("G4 (quarter turn)", 4), ("G6 (sixth turn)", 6)];
    let mut witness: [Option<(i64, i64, i64)>; 5] = [None; 5];
    let mut seen_a = vec![false; (2 * bound + 1) as usize];
    for m in -bound..=bound {
        for n in -bound..=bound {
            for f in -bound..=bound {
                let c = prop29_monodromy(m, n, f);
                if let Some(order) = finite_order(c) {
                    let slot = TORUS_TYPES.iter().position(|t| t.1 == order).expect("orders 1..6 of SL2Z are 1,2,3,4,6");
                    witness[slot].get_or_insert((m, n, f));
                }
                if (c.a, c.b, c.d) == (-1, 0, -1) && c.c.abs() <= bound {
                    seen_a[(c.c + bound) as usize] = true;
                }
            }
        }
    }
    let mut types: Vec<FlatType> = TORUS_TYPES
        .iter()
        .zip(witness)
        .map(|(t, w)| FlatType {
            name: t.0,
            witness: w,
            expression: None,
            h1: w.map(|(m, n, f)| h1(&Manifold::TorusBundle(prop29_monodromy(m, n, f))).expect("torus bundle").to_string()),
        })
        .collect();
    // Hantzsche–Wendt from the two-block family: the left end refibers to
    // match and leaves (RP², (2,1), (2,-1)).
    let hw = classify_two_block([2, -1, 2, 1, 2, 1, 2, -1]);
    debug_assert_eq!(hw.case, 3);
    types.push(FlatType {
        name: "G5 (Hantzsche-Wendt)",
        witness: None,
        expression: Some(crate::notation::print_expr(&hw.output)),
        h1: Some(h1(&hw.output).expect("closed graph").to_string()),
    });
    FlatReport {
        bound,
        identity_found: witness[0].is_some(),
        missing_a: (-bound..=bound).filter(|&a| !seen_a[(a + bound) as usize]).collect(),
        types,
    }
}

/// Whether no `C(m,n,f)` with `|m|,|n|,|f| ≤ bound` is the identity.
pub fn three_torus_unreachable(bound: i64) -> bool {
    !flat_reachability(bound).identity_found
}
