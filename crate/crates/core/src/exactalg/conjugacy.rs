use std::collections::{HashMap, HashSet};

use num_integer::{Integer, Roots};

use serde::Serialize;

use super::{cokernel, AlgError, IntMatrix, Mat2};

/// Answer of the bounded `GL(2,ℤ)` conjugacy search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Conjugacy {
    /// `witness · A · witness⁻¹` equals `B`, or `B⁻¹` when `inverted`.
    Yes { witness: Mat2, inverted: bool },
    /// A conjugacy invariant (shared by `B` and `B⁻¹`) differs.
    No { invariant: &'static str },
    Unknown,
}

/// Generators of `GL(2,ℤ)`: `S`, `T`, the reflection `R`, and inverses.
const GENERATORS: [Mat2; 6] = [
    Mat2::new(0, -1, 1, 0),
    Mat2::new(0, 1, -1, 0),
    Mat2::new(1, 1, 0, 1),
    Mat2::new(1, -1, 0, 1),
    Mat2::new(0, 1, 1, 0),
    Mat2::new(1, 0, 0, -1),
];

/// Decides whether `A` is conjugate in `GL(2,ℤ)` to `B` or `B⁻¹`, searching
/// conjugators of word length at most `word_bound`.
pub fn gl2_conjugate(a: &Mat2, b: &Mat2, word_bound: usize) -> Result<Conjugacy, AlgError> {
    if word_bound == 0 {
        return Err(AlgError::ZeroWordBound);
    }
    for m in [a, b] {
        if m.det() != 1 {
            return Err(AlgError::Determinant { expected: 1, found: m.det() });
        }
    }
    if let Some(invariant) = differing_invariant(a, b) {
        return Ok(Conjugacy::No { invariant });
    }
    let b_inv = b.inverse().expect("unimodular");
    let mut seen = HashSet::from([Mat2::IDENTITY]);
    let mut frontier = vec![Mat2::IDENTITY];
    for depth in 0..=word_bound {
        for p in &frontier {
            let conj = *p * *a * p.inverse().expect("unimodular");
            if conj == *b {
                return Ok(Conjugacy::Yes { witness: *p, inverted: false });
            }
            if conj == b_inv {
                return Ok(Conjugacy::Yes { witness: *p, inverted: true });
            }
        }
        if depth == word_bound {
            break;
        }
        let mut next = Vec::new();
        for p in &frontier {
            for g in GENERATORS {
                let q = g * *p;
                if seen.insert(q) {
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    Ok(Conjugacy::Unknown)
}

/// Least representative of the class of `a ∈ SL(2,ℤ)` under
/// `GL(2,ℤ)`-conjugacy and inversion.
///
/// Elliptic and parabolic classes are listed by trace and `gcd(A ∓ I)`. A
/// hyperbolic `A` equals `±W^k` for the primitive positive word `W` in
/// `R = [[1,1],[0,1]]`, `L = [[1,0],[1,1]]` read off the periodic continued
/// fraction of a fixed point; the class is the least rotation of that
/// period over both fixed points, with the trace fixing `±` and `k`.
pub fn canonical_monodromy(a: &Mat2) -> Mat2 {
    let t = a.trace();
    if a.b == 0 && a.c == 0 && a.a == a.d {
        return *a;
    }
    match t {
        0 => Mat2::new(0, -1, 1, 0),
        1 => Mat2::new(1, -1, 1, 0),
        -1 => Mat2::new(0, -1, 1, -1),
        2 | -2 => {
            let s = t.signum();
            let n = (a.a - s).gcd(&a.b).gcd(&a.c);
            Mat2::new(s, n, 0, s)
        }
        _ => {
            let inv = a.inverse().expect("monodromies are unimodular");
            let period = [cf_period(a), cf_period(&inv)].into_iter().map(|p| least_rotation(&p)).min().expect("two roots");
            let mut w = Mat2::IDENTITY;
            for (i, &k) in period.iter().enumerate() {
                let step = if i % 2 == 0 { Mat2::new(1, k, 0, 1) } else { Mat2::new(1, 0, k, 1) };
                w = w * step;
            }
            let mut power = w;
            while power.trace() < t.abs() {
                power = power * w;
            }
            debug_assert_eq!(power.trace(), t.abs(), "trace of a positive word power");
            if t < 0 {
                -power
            } else {
                power
            }
        }
    }
}

/// Period of the continued fraction of `(a − d + √D) / 2c`, a fixed point
/// of the hyperbolic `A`; doubled when odd so it alternates `R` and `L`.
fn cf_period(m: &Mat2) -> Vec<i64> {
    let t = i128::from(m.trace());
    let disc = t * t - 4;
    let root = disc.sqrt();
    // x = (P + √D) / Q with Q | D − P².
    let (mut p, mut q) = (i128::from(m.a - m.d), 2 * i128::from(m.c));
    let mut seen: HashMap<(i128, i128), usize> = HashMap::new();
    let mut terms = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(p, q)) {
            let mut period: Vec<i64> = terms[start..].to_vec();
            if period.len() % 2 == 1 {
                period.extend_from_within(..);
            }
            return period;
        }
        seen.insert((p, q), terms.len());
        let floor = if q > 0 { Integer::div_floor(&(p + root), &q) } else { Integer::div_floor(&(-p - root - 1), &(-q)) };
        terms.push(i64::try_from(floor).expect("partial quotients fit"));
        p = floor * q - p;
        q = (disc - p * p) / q;
    }
}

fn least_rotation(seq: &[i64]) -> Vec<i64> {
    (0..seq.len())
        .map(|i| seq[i..].iter().chain(&seq[..i]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Name of the first conjugacy-and-inversion invariant that differs.
fn differing_invariant(a: &Mat2, b: &Mat2) -> Option<&'static str> {
    if a.trace() != b.trace() {
        return Some("trace");
    }
    let shifted = |m: &Mat2, s: i64| {
        cokernel(&IntMatrix::from_rows(2, &[vec![m.a - s, m.b], vec![m.c, m.d - s]]))
    };
    if shifted(a, 1) != shifted(b, 1) {
        return Some("coker(A-I)");
    }
    if shifted(a, -1) != shifted(b, -1) {
        return Some("coker(A+I)");
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_witness(a: Mat2, b: Mat2, answer: &Conjugacy) {
        let Conjugacy::Yes { witness, inverted } = answer else {
            panic!("expected a witness, got {answer:?}");
        };
        let target = if *inverted { b.inverse().unwrap() } else { b };
        assert_eq!(*witness * a * witness.inverse().unwrap(), target);
    }

    #[test]
    fn reflexive_with_identity_witness() {
        let a = Mat2::new(3, 1, -1, 0);
        let answer = gl2_conjugate(&a, &a, 4).unwrap();
        assert_eq!(answer, Conjugacy::Yes { witness: Mat2::IDENTITY, inverted: false });
    }

    #[test]
    fn unipotent_pair_via_reflection() {
        let a = Mat2::new(1, 1, 0, 1);
        let b = Mat2::new(1, 0, 1, 1);
        check_witness(a, b, &gl2_conjugate(&a, &b, 4).unwrap());
    }

    #[test]
    fn trace_three_classes_coincide() {
        // Trace 3 and determinant 1 leave a single GL(2,Z) class.
        let a = Mat2::new(3, 1, -1, 0);
        let b = Mat2::new(2, 1, 1, 1);
        check_witness(a, b, &gl2_conjugate(&a, &b, 6).unwrap());
    }

    #[test]
    fn invariants_reject() {
        let a = Mat2::new(3, 1, -1, 0);
        let b = Mat2::new(-3, 1, -1, 0);
        assert_eq!(gl2_conjugate(&a, &b, 3).unwrap(), Conjugacy::No { invariant: "trace" });
        // Trace 2: identity versus a shear, told apart by coker(A-I).
        let shear = Mat2::new(1, 2, 0, 1);
        assert_eq!(
            gl2_conjugate(&Mat2::IDENTITY, &shear, 3).unwrap(),
            Conjugacy::No { invariant: "coker(A-I)" }
        );
    }

    #[test]
    fn canonical_classes_agree_with_search() {
        let samples = [
            Mat2::new(3, 1, -1, 0),
            Mat2::new(2, 1, 1, 1),
            Mat2::new(0, 1, -1, 2),
            Mat2::new(2, -1, 1, 0),
            Mat2::new(2, -1, 19, -9),
            Mat2::new(0, -1, 1, -7),
            Mat2::new(5, 2, 2, 1),
            Mat2::new(-4, 1, -1, 0),
            Mat2::new(1, 3, 0, 1),
            Mat2::new(0, 1, -1, 1),
            Mat2::new(7, 12, 4, 7),
            Mat2::new(4, 3, 5, 4),
        ];
        for (i, a) in samples.iter().enumerate() {
            let c = canonical_monodromy(a);
            assert_eq!(c.det(), 1);
            assert_eq!(canonical_monodromy(&c), c, "{a}");
            check_witness(*a, c, &gl2_conjugate(a, &c, 10).unwrap());
            assert_eq!(canonical_monodromy(&a.inverse().unwrap()), c);
            for b in &samples[..i] {
                let same = canonical_monodromy(b) == c;
                let searched = matches!(gl2_conjugate(a, b, 10).unwrap(), Conjugacy::Yes { .. });
                assert_eq!(same, searched, "{a} vs {b}");
            }
        }
        // A square and a primitive element of equal trace stay apart.
        let square = Mat2::new(2, 3, 1, 2) * Mat2::new(2, 3, 1, 2);
        assert_eq!(square, samples[10]);
        assert_ne!(canonical_monodromy(&square), canonical_monodromy(&Mat2::new(14, 1, -1, 0)));
    }

    #[test]
    fn preconditions() {
        let a = Mat2::IDENTITY;
        assert_eq!(gl2_conjugate(&a, &a, 0), Err(AlgError::ZeroWordBound));
        assert!(gl2_conjugate(&Mat2::SWAP, &a, 2).is_err());
    }
}
