use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::snf::{invariant_factors, invariant_factors_i128};
use super::{AlgError, IntMatrix};

/// A finitely generated abelian group `ℤ^r ⊕ ℤ_{d₁} ⊕ … ⊕ ℤ_{d_k}` with
/// `2 ≤ d₁ | d₂ | … | d_k`. The representation is unique per isomorphism
/// class, so derived equality is group isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    /// `ℤ_n`; `n = 0` gives `ℤ` and `|n| = 1` the trivial group.
    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        Self::from_orders(0, vec![n.into()])
    }

    /// Direct sum of `ℤ^free` and cyclic groups of the given orders, with
    /// order 0 meaning `ℤ`. Orders need not form a divisor chain.
    pub fn from_orders(free: usize, orders: Vec<BigInt>) -> Self {
        let mut free_rank = free;
        let mut finite = Vec::new();
        for n in orders {
            if n.is_zero() {
                free_rank += 1;
            } else if !n.abs().is_one() {
                finite.push(n.abs());
            }
        }
        if finite.len() > 1 {
            finite = invariant_factors(&IntMatrix::from_diagonal(&finite));
        }
        let torsion = finite.into_iter().filter(|d| !d.is_one()).collect();
        AbelianGroup { free_rank, torsion }
    }

    /// `ℤ^gens / rowspan(relations)`.
    pub fn cokernel(relations: &IntMatrix) -> Self {
        let factors = invariant_factors(relations);
        let rank = factors.len();
        AbelianGroup {
            free_rank: relations.cols() - rank,
            torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    /// `ℤ^cols / rowspan(rows)`, avoiding arbitrary precision unless needed.
    pub fn cokernel_of_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        match invariant_factors_i128(cols, rows) {
            Some(factors) => AbelianGroup {
                free_rank: cols - factors.len(),
                torsion: factors.into_iter().filter(|&d| d != 1).map(BigInt::from).collect(),
            },
            None => Self::cokernel(&IntMatrix::from_rows(cols, rows)),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of a finite group, `None` when the free rank is positive.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut orders = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        Self::from_orders(self.free_rank + other.free_rank, orders)
    }
}

/// Isomorphism test on normal forms.
pub fn abelian_iso(g: &AbelianGroup, h: &AbelianGroup) -> bool {
    g == h
}

/// `ℤⁿ / rowspan(M)` for a relation matrix with one row per relation.
pub fn cokernel(m: &IntMatrix) -> AbelianGroup {
    AbelianGroup::cokernel(m)
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = &self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|x| *x == d).count();
            if run == 1 {
                parts.push(format!("Z{d}"));
            } else {
                parts.push(format!("Z{d}^{run}"));
            }
            i += run;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

impl FromStr for AbelianGroup {
    type Err = AlgError;

    /// Accepts `0`, or factors `Z`, `Z^k`, `Zn`, `Zn^k` joined by `x`.
    fn from_str(text: &str) -> Result<Self, AlgError> {
        let bad = |why: &str| AlgError::GroupSyntax { text: text.to_string(), reason: why.to_string() };
        let trimmed = text.trim();
        if trimmed == "0" {
            return Ok(Self::trivial());
        }
        let mut free = 0usize;
        let mut orders = Vec::new();
        for part in trimmed.split('x') {
            let part = part.trim();
            let rest = part.strip_prefix('Z').ok_or_else(|| bad("factor must start with Z"))?;
            let (base, power) = match rest.split_once('^') {
                Some((b, p)) => {
                    let k: usize = p.trim().parse().map_err(|_| bad("bad exponent"))?;
                    if k == 0 {
                        return Err(bad("exponent must be positive"));
                    }
                    (b.trim(), k)
                }
                None => (rest.trim(), 1),
            };
            if base.is_empty() {
                free += power;
                continue;
            }
            if !base.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad("cyclic order must be a positive integer"));
            }
            let n: BigInt = base.parse().map_err(|_| bad("bad cyclic order"))?;
            if n < BigInt::from(2) {
                return Err(bad("cyclic order must be at least 2"));
            }
            orders.extend(std::iter::repeat_n(n, power));
        }
        Ok(Self::from_orders(free, orders))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "Z", "Z^3", "Z35", "Z2^2", "Z x Z2^2", "Z^2 x Z2 x Z4", "Z2^3"] {
            assert_eq!(g(s).to_string(), s);
        }
    }

    #[test]
    fn orders_are_normalized() {
        assert_eq!(g("Z2 x Z3"), g("Z6"));
        assert_eq!(g("Z5 x Z7"), g("Z35"));
        assert_ne!(g("Z2 x Z4"), g("Z8"));
        assert_ne!(g("Z4"), g("Z2^2"));
    }

    #[test]
    fn cokernel_examples() {
        let m = IntMatrix::from_rows(3, &[vec![-2, 1, -1], vec![1, -2, 1], vec![-1, 1, -2]]);
        assert_eq!(cokernel(&m), g("Z4"));
        assert!(!abelian_iso(&g("Z2^2"), &cokernel(&m)));
        assert_eq!(cokernel(&IntMatrix::zeros(0, 2)), g("Z^2"));
        assert!(cokernel(&IntMatrix::from_rows(2, &[vec![2, 1], vec![-1, -1]])).is_trivial());
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "Z1", "Z0", "Q", "Z^0", "Z-3", "Z x"] {
            assert!(s.parse::<AbelianGroup>().is_err(), "{s}");
        }
    }
}
