//! Case analyses of the generic families, as fixed-order decision trees.
//!
//! Every classifier returns exactly one case label together with an
//! expression for the manifold in the form that case names. Fibers enter
//! with `p ≥ 0`; a pair `(p, q)` and `(−p, −q)` are the same fiber.

use std::collections::HashSet;

use serde::Serialize;

use crate::exactalg::Mat2;
use crate::manifolds::{BaseSurface, Block, FiberPair, Manifold, SeifertBlock};
use crate::moves::{lens_normal, lens_of_pair, refibered, shifted};

use super::families::{annulus, disk, double_annulus, linear, self_glued, SWAP};
use super::CatalogError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classified {
    pub case: u8,
    /// Expression of the manifold in the form the case describes.
    #[serde(skip)]
    pub output: Manifold,
    pub detail: String,
}

fn classified(case: u8, output: Manifold, detail: impl Into<String>) -> Classified {
    Classified { case, output, detail: detail.into() }
}

type Pair = (i64, i64);

fn positive((p, q): Pair) -> Pair {
    if p < 0 || (p == 0 && q < 0) {
        (-p, -q)
    } else {
        (p, q)
    }
}

fn fiber((p, q): Pair) -> FiberPair {
    FiberPair::new(p, q)
}

fn lens((p, q): Pair) -> Manifold {
    let (p, q) = lens_normal(p, q);
    Manifold::Lens { p, q }
}

fn mobius() -> Block {
    Block::Seifert(SeifertBlock::new(BaseSurface::MOBIUS, Vec::new()))
}

/// The closed block `(S², fibers…)`, split along a degenerate fiber if one
/// is present.
fn closed_sphere(fibers: &[Pair]) -> Manifold {
    if let Some(i) = fibers.iter().position(|f| f.0 == 0) {
        let rest: Vec<Pair> = fibers.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &f)| f).collect();
        // A sphere with two fibers besides the degenerate one splits into
        // their lens spaces.
        return Manifold::Sum(rest.into_iter().map(lens).collect());
    }
    Manifold::seifert(SeifertBlock::pairs(BaseSurface::SPHERE, fibers))
}

fn exceptional(fibers: &[Pair]) -> usize {
    fibers.iter().filter(|f| f.0.abs() >= 2).count()
}

/// `(D,x,y)` with `|x.0| = 1` is a solid torus; this is its single fiber
/// after moving the integral part onto `y`.
fn folded(x: Pair, y: Pair) -> Pair {
    let (a, b) = positive(x);
    debug_assert_eq!(a, 1);
    (y.0, y.1 + b * y.0)
}

/// Fiber that a solid torus with fiber `t` caps onto the block across a
/// `SWAP` gluing.
fn swap_cap(t: Pair) -> Pair {
    (t.1, -t.0)
}

/// Shift that brings `(D,(2,q₁),(2,q₂))` to `(D,(2,1),(2,1))`, absorbed by
/// the adjacent gluing.
fn d22_shift(x: Pair, y: Pair) -> Option<i64> {
    let (x, y) = (positive(x), positive(y));
    (x.0 == 2 && y.0 == 2).then(|| (1 - x.1) / 2 + (1 - y.1) / 2)
}

/// The gluing after bringing the selected `D22` ends to `(2,1),(2,1)` and
/// switching them to the Möbius fibration. A selected end must have a shift.
fn toggled(m: Mat2, left: Option<i64>, right: Option<i64>, toggle: (bool, bool)) -> Mat2 {
    let mut m = m;
    if toggle.0 {
        m = refibered(shifted(m, true, left.expect("left end is D22")), true, true);
    }
    if toggle.1 {
        m = refibered(shifted(m, false, right.expect("right end is D22")), false, true);
    }
    m
}

/// `(D,(a,b),(c,d)) ∪_SWAP (D,(e,f),(g,h))`, cases 1 to 5: lens spaces and
/// their sums; Seifert over `S²` with three fibers; over `ℝP²` with two; the
/// Klein-bottle bundle `(K, ±1)`; the two-block JSJ as written.
pub fn classify_two_block(params: [i64; 8]) -> Classified {
    let [a, b, c, d, e, f, g, h] = params;
    let (x1, x2, y1, y2) = (positive((a, b)), positive((c, d)), positive((e, f)), positive((g, h)));
    let generated = || linear(vec![disk(x1, x2), disk(y1, y2)], &[SWAP]);

    // A degenerate fiber splits the block off; its neighbour is capped by
    // the trivial fiber.
    for (i, &z) in [x1, x2, y1, y2].iter().enumerate() {
        if z.0 == 0 {
            let out = match i {
                0 => Manifold::Sum(vec![lens(x2), lens_of_pair(fiber(y1), fiber(y2))]),
                1 => Manifold::Sum(vec![lens(x1), lens_of_pair(fiber(y1), fiber(y2))]),
                2 => Manifold::Sum(vec![lens_of_pair(fiber(x1), fiber(x2)), lens(y2)]),
                _ => Manifold::Sum(vec![lens_of_pair(fiber(x1), fiber(x2)), lens(y1)]),
            };
            return classified(1, out, "degenerate fiber: sum of two lens spaces");
        }
    }
    // A solid torus fills the other block.
    for (i, &z) in [x1, x2, y1, y2].iter().enumerate() {
        if z.0 == 1 {
            let (torus, rest) = match i {
                0 => (folded(x1, x2), [y1, y2]),
                1 => (folded(x2, x1), [y1, y2]),
                2 => (folded(y1, y2), [x1, x2]),
                _ => (folded(y2, y1), [x1, x2]),
            };
            let closed = [rest[0], rest[1], swap_cap(torus)];
            let case = if closed.iter().all(|z| z.0 != 0) && exceptional(&closed) == 3 { 2 } else { 1 };
            return classified(case, closed_sphere(&closed), "solid torus fills the other block");
        }
    }
    let (kl, kr) = (d22_shift(x1, x2), d22_shift(y1, y2));
    let flat = |t| toggled(SWAP, kl, kr, t);
    if kl == Some(1) {
        let out = linear(vec![mobius(), disk(y1, y2)], &[flat((true, false))]);
        return classified(3, out, "left (2,1),(2,1) block refibers to match: Seifert over RP2");
    }
    if kr == Some(1) {
        let out = linear(vec![disk(x1, x2), mobius()], &[flat((false, true))]);
        return classified(3, out, "right (2,1),(2,1) block refibers to match: Seifert over RP2");
    }
    if let (Some(k), Some(kr)) = (kl, kr) {
        let m = flat((true, true));
        if m.b == 0 {
            let out = linear(vec![mobius(), mobius()], &[m]);
            return classified(4, out, format!("both ends refiber to match at (k,l) = ({k},{}): (K, ±1)", -kr));
        }
    }
    classified(5, generated(), "JSJ as written")
}

/// `(A,(a,b)) / SWAP`, cases 1 to 3: `S²×S¹`, the torus bundle
/// `T[[b,1],[−1,0]]`, the JSJ as written.
pub fn classify_self_glue(params: [i64; 2]) -> Classified {
    let (a, b) = positive((params[0], params[1]));
    match a {
        0 => classified(1, Manifold::S2XS1, "degenerate fiber"),
        1 => classified(2, Manifold::TorusBundle(Mat2::new(b, 1, -1, 0)), "collar closes up to a torus bundle"),
        _ => classified(3, self_glued(annulus((a, b)), SWAP), "JSJ as written"),
    }
}

/// `(D,(a,b),(c,d)) ∪_SWAP (A,(e,f)) ∪_SWAP (D,(g,h),(i,j))`, cases 1 to 8
/// in the order: two-block manifolds, three lens spaces, a three-fiber
/// Seifert space plus a lens space, Seifert over `S²` with four fibers, over
/// `K` with at most one fiber, two blocks across `B(m,n,f)`, a Möbius-band
/// block against a disk block, the JSJ as written.
pub fn classify_three_block(params: [i64; 10]) -> Classified {
    let [a, b, c, d, e, f, g, h, i, j] = params;
    let (l1, l2, mid, r1, r2) =
        (positive((a, b)), positive((c, d)), positive((e, f)), positive((g, h)), positive((i, j)));
    let generated = || linear(vec![disk(l1, l2), annulus(mid), disk(r1, r2)], &[SWAP, SWAP]);

    // Degenerate fiber in an end block: it splits off as a lens space, the
    // central block becomes a solid torus and caps the far end.
    let left_zero = [l1, l2].iter().position(|z| z.0 == 0);
    let right_zero = [r1, r2].iter().position(|z| z.0 == 0);
    if left_zero.is_some() || right_zero.is_some() {
        let (split, far) = match left_zero {
            Some(0) => (l2, [r1, r2]),
            Some(_) => (l1, [r1, r2]),
            None if right_zero == Some(0) => (r2, [l1, l2]),
            None => (r1, [l1, l2]),
        };
        let rest = [far[0], far[1], swap_cap(mid)];
        let (case, what) = if rest.iter().any(|z| z.0 == 0) {
            (2, "three lens spaces")
        } else if exceptional(&rest) == 3 {
            (3, "lens space plus a three-fiber Seifert space")
        } else {
            (1, "two lens spaces")
        };
        let out = match closed_sphere(&rest) {
            Manifold::Sum(mut parts) => {
                parts.insert(0, lens(split));
                Manifold::Sum(parts)
            }
            other => Manifold::Sum(vec![lens(split), other]),
        };
        return classified(case, out, format!("degenerate end fiber: {what}"));
    }
    if mid.0 == 0 {
        let out = Manifold::Sum(vec![lens_of_pair(fiber(l1), fiber(l2)), lens_of_pair(fiber(r1), fiber(r2))]);
        return classified(1, out, "degenerate central fiber: two lens spaces");
    }
    // A solid-torus end fills the central annulus, leaving two blocks.
    for (side, pair) in [(0, [l1, l2]), (1, [r1, r2])] {
        if let Some(t) = pair.iter().position(|z| z.0 == 1) {
            let torus = folded(pair[t], pair[1 - t]);
            let center = disk(mid, swap_cap(torus));
            let out = if side == 0 {
                linear(vec![center, disk(r1, r2)], &[SWAP])
            } else {
                linear(vec![disk(l1, l2), center], &[SWAP])
            };
            return classified(1, out, "solid-torus end: a two-block manifold");
        }
    }
    let (kl, kr) = (d22_shift(l1, l2), d22_shift(r1, r2));
    if mid.0 == 1 {
        // The central collar composes the two gluings into B = [[1,f],[0,-1]].
        let bm = Mat2::new(1, mid.1, 0, -1);
        if mid.1 == 0 {
            let out = Manifold::seifert(SeifertBlock::pairs(BaseSurface::SPHERE, &[l1, l2, r1, r2]));
            return classified(4, out, "collar with f = 0: Seifert over S2 with four fibers");
        }
        let flat = |t| toggled(bm, kl, kr, t);
        if kl.is_some() && flat((true, false)).b == 0 {
            let out = linear(vec![mobius(), disk(r1, r2)], &[flat((true, false))]);
            return classified(1, out, "collar; left end refibers to match: Seifert over RP2");
        }
        if kr.is_some() && flat((false, true)).b == 0 {
            let out = linear(vec![disk(l1, l2), mobius()], &[flat((false, true))]);
            return classified(1, out, "collar; right end refibers to match: Seifert over RP2");
        }
        if kl.is_some() && kr.is_some() && flat((true, true)).b == 0 {
            let out = linear(vec![mobius(), mobius()], &[flat((true, true))]);
            return classified(5, out, "collar; both ends refiber to match: Seifert over K");
        }
        return classified(6, linear(vec![disk(l1, l2), disk(r1, r2)], &[bm]), "collar: two blocks across B(m,n,f)");
    }
    let left = kl.map(|k| toggled(SWAP, Some(k), None, (true, false)));
    let right = kr.map(|k| toggled(SWAP, None, Some(k), (false, true)));
    let lm = left.filter(|m| m.b == 0);
    let rm = right.filter(|m| m.b == 0);
    match (lm, rm) {
        (Some(x), Some(y)) => {
            classified(5, linear(vec![mobius(), annulus(mid), mobius()], &[x, y]), "both ends refiber: Seifert over K")
        }
        (Some(x), None) => classified(
            7,
            linear(vec![mobius(), annulus(mid), disk(r1, r2)], &[x, SWAP]),
            "left end refibers: Mobius-band block against a disk block",
        ),
        (None, Some(y)) => classified(
            7,
            linear(vec![disk(l1, l2), annulus(mid), mobius()], &[SWAP, y]),
            "right end refibers: Mobius-band block against a disk block",
        ),
        (None, None) => classified(8, generated(), "JSJ as written"),
    }
}

/// `(A,(a,b)) ∪_SWAP (A,(c,d))` along both tori, cases 1 to 4:
/// `(S²×S¹) # L`, torus bundles `T_C`, `(A,(a,b))/B`, the JSJ as written.
pub fn classify_double_annulus(params: [i64; 4]) -> Classified {
    let (x, y) = (positive((params[0], params[1])), positive((params[2], params[3])));
    // The surviving annulus is capped on both sides by its partner's fiber
    // direction, which the swap carries to the section: L(d, c).
    if x.0 == 0 {
        return classified(1, Manifold::Sum(vec![Manifold::S2XS1, lens((y.1, y.0))]), "degenerate fiber");
    }
    if y.0 == 0 {
        return classified(1, Manifold::Sum(vec![Manifold::S2XS1, lens((x.1, x.0))]), "degenerate fiber");
    }
    match (x.0, y.0) {
        (1, 1) => {
            // C(0, -b, d)
            let c = thm27_monodromy(0, -x.1, y.1);
            classified(2, Manifold::TorusBundle(c), format!("torus bundle T_C with (m,n,f) = (0,{},{})", -x.1, y.1))
        }
        (_, 1) => classified(3, self_glued(annulus(x), Mat2::new(1, y.1, 0, -1)), "collar: (A,(a,b))/B"),
        (1, _) => classified(3, self_glued(annulus(y), Mat2::new(1, x.1, 0, -1)), "collar: (A,(c,d))/B"),
        _ => classified(4, double_annulus(x, y), "JSJ as written"),
    }
}

/// `B(m,n,f) = [[1+mf, f], [−m−n−mnf, −(1+nf)]]`, determinant −1.
pub fn thm27_matrix(m: i64, n: i64, f: i64) -> Mat2 {
    Mat2::new(1 + m * f, f, -m - n - m * n * f, -(1 + n * f))
}

/// `C(m,n,f)`: `B(m,n,f)` with the first row negated.
fn thm27_monodromy(m: i64, n: i64, f: i64) -> Mat2 {
    let b = thm27_matrix(m, n, f);
    Mat2::new(-b.a, -b.b, b.c, b.d)
}

/// Whether `B` or `−B` has the form `B(m,n,f)`: with top-right entry `f`,
/// top-left `≡ 1` and bottom-right `≡ −1 (mod f)`; for `f = 0` exactly.
pub fn thm27_matrix_reachable(b: &Mat2) -> Result<bool, CatalogError> {
    if b.det() != -1 {
        return Err(CatalogError::Domain {
            family: "B(m,n,f)".into(),
            message: format!("determinant {} is not -1", b.det()),
        });
    }
    let fits = |m: Mat2| {
        if m.b == 0 {
            m.a == 1 && m.d == -1
        } else {
            (m.a - 1).rem_euclid(m.b.abs()) == 0 && (m.d + 1).rem_euclid(m.b.abs()) == 0
        }
    };
    Ok(fits(*b) || fits(-*b))
}

/// Every `±B(m,n,f)` whose entries are bounded by `entry_bound`, from
/// parameters up to the bounds the entries force.
pub fn reachable_by_generators(entry_bound: i64) -> HashSet<Mat2> {
    let mut out = HashSet::new();
    let e = entry_bound;
    for f in -e..=e {
        // |1 + mf| ≤ e bounds m for f ≠ 0; for f = 0 only m + n matters
        // in the bottom-left entry, which is bounded by e.
        let mb = if f == 0 { 2 * e + 1 } else { (e + 1) / f.abs() + 1 };
        for m in -mb..=mb {
            for n in -mb..=mb {
                let b = thm27_matrix(m, n, f);
                if [b.a, b.b, b.c, b.d].iter().all(|x| x.abs() <= e) {
                    out.insert(b);
                    out.insert(-b);
                }
            }
        }
    }
    out
}
