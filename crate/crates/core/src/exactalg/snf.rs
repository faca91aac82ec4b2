use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Smith normal form `U·M·V = S` with `U`, `V` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// The nonzero diagonal entries `d₁ | d₂ | …`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n)
            .map(|i| self.s.get(i, i).clone())
            .filter(|d| !d.is_zero())
            .collect()
    }
}

/// Smith normal form by least-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = least_nonzero(&s, t) else {
                return Snf { u, s, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = s.get(i, t) / &pivot;
                if !q.is_zero() {
                    let neg = -q;
                    s.add_row(i, t, &neg);
                    u.add_row(i, t, &neg);
                }
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = s.get(t, j) / &pivot;
                if !q.is_zero() {
                    let neg = -q;
                    s.add_col(j, t, &neg);
                    v.add_col(j, t, &neg);
                }
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            // The pivot must divide the whole remaining block.
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !(s.get(i, j) % &pivot).is_zero())
            });
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, s, v }
}

fn least_nonzero(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = s.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                let unit = a.is_one();
                best = Some((i, j, a));
                if unit {
                    return best.map(|(i, j, _)| (i, j));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Invariant factors without transforms; machine-word fast path with an
/// arbitrary-precision fallback on overflow.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    if let Some(rows) = m.to_i64_rows() {
        if let Some(d) = invariant_factors_i128(m.cols(), &rows) {
            return d.into_iter().map(BigInt::from).collect();
        }
    }
    smith_normal_form(m).invariant_factors()
}

/// Same elimination as [`smith_normal_form`] in `i128`, `None` on overflow.
pub(crate) fn invariant_factors_i128(cols: usize, input: &[Vec<i64>]) -> Option<Vec<i128>> {
    let rows = input.len();
    let mut s: Vec<Vec<i128>> = input
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut out = Vec::new();

    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize, i128)> = None;
            'scan: for (i, row) in s.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(_, _, b)| x.abs() < b) {
                        best = Some((i, j, x.abs()));
                        if x.abs() == 1 {
                            break 'scan;
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                return Some(out);
            };
            s.swap(t, pi);
            for row in s.iter_mut() {
                row.swap(t, pj);
            }
            let pivot = s[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = s[i][t] / pivot;
                if q != 0 {
                    for j in t..cols {
                        let v = s[t][j].checked_mul(q)?;
                        s[i][j] = s[i][j].checked_sub(v)?;
                    }
                }
                clean &= s[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = s[t][j] / pivot;
                if q != 0 {
                    for row in s.iter_mut().skip(t) {
                        let v = row[t].checked_mul(q)?;
                        row[j] = row[j].checked_sub(v)?;
                    }
                }
                clean &= s[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| s[i][j] % pivot != 0));
            match offender {
                Some(i) => {
                    for j in t..cols {
                        s[t][j] = s[t][j].checked_add(s[i][j])?;
                    }
                }
                None => break,
            }
        }
        out.push(s[t][t].abs());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(m: &IntMatrix) -> Vec<i64> {
        smith_normal_form(m)
            .invariant_factors()
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn two_by_two_example() {
        let m = IntMatrix::from_rows(2, &[vec![2, 4], vec![6, 8]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.s, IntMatrix::from_rows(2, &[vec![2, 0], vec![0, 4]]));
        assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s);
    }

    #[test]
    fn identity_and_zero() {
        let id = IntMatrix::identity(4);
        assert_eq!(smith_normal_form(&id).s, id);
        let z = IntMatrix::zeros(3, 2);
        assert_eq!(smith_normal_form(&z).s, z);
    }

    #[test]
    fn divisibility_fix_up() {
        // diag(2,3) is not in normal form; the answer is diag(1,6).
        let m = IntMatrix::from_rows(2, &[vec![2, 0], vec![0, 3]]);
        assert_eq!(diag(&m), vec![1, 6]);
    }

    #[test]
    fn fast_path_matches_exact_path() {
        let m = IntMatrix::from_rows(3, &[vec![-2, 1, -1], vec![1, -2, 1], vec![-1, 1, -2]]);
        assert_eq!(invariant_factors(&m), smith_normal_form(&m).invariant_factors());
    }

    #[test]
    fn overflow_falls_back() {
        let big = i64::MAX / 2;
        let m = IntMatrix::from_rows(2, &[vec![big, big - 1], vec![big - 1, big - 3]]);
        let exact = smith_normal_form(&m).invariant_factors();
        assert_eq!(invariant_factors(&m), exact);
        let det: BigInt = exact.iter().product();
        assert_eq!(det, m.determinant().abs());
    }
}
