//! Ground-truth counts of `H_n(t)`, the number of `n x n` nonnegative integer
//! matrices with every row and column summing to `t`.
//!
//! [`count_dp`] is the working oracle: a transfer DP over columns whose state
//! is the vector of partial row sums. [`count_naive`] enumerates matrices
//! entry by entry and exists only to validate the DP on tiny instances.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::scalar::Count;

/// One dilate `t B_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EhrhartInstance {
    pub n: usize,
    pub t: u32,
}

impl EhrhartInstance {
    pub fn new(n: usize, t: u32) -> Self {
        assert!(n >= 1, "matrix order must be positive");
        Self { n, t }
    }
}

/// Partial row-sum vector -> number of ways to reach it.
pub type RowStateTable<C> = HashMap<Vec<u32>, C>;

/// Enumerates every matrix. Exponential; keep to `n <= 3`, `t <= 4`.
pub fn count_naive(inst: EhrhartInstance) -> BigInt {
    let n = inst.n;
    let mut rows = vec![inst.t; n];
    let mut cols = vec![inst.t; n];
    let mut count = 0u64;
    naive_fill(0, n, &mut rows, &mut cols, &mut count);
    BigInt::from(count)
}

fn naive_fill(cell: usize, n: usize, rows: &mut [u32], cols: &mut [u32], count: &mut u64) {
    if cell == n * n {
        if rows.iter().chain(cols.iter()).all(|&r| r == 0) {
            *count += 1;
        }
        return;
    }
    let (i, j) = (cell / n, cell % n);
    let cap = rows[i].min(cols[j]);
    // the last cell of a row or column has no freedom
    let lo = if j == n - 1 || i == n - 1 { cap } else { 0 };
    for v in lo..=cap {
        if j == n - 1 && rows[i] != v {
            continue;
        }
        if i == n - 1 && cols[j] != v {
            continue;
        }
        rows[i] -= v;
        cols[j] -= v;
        naive_fill(cell + 1, n, rows, cols, count);
        rows[i] += v;
        cols[j] += v;
    }
}

/// Weak compositions of `total` into `parts` parts, lexicographically ascending.
pub fn weak_compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn go(rest: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == parts {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=rest {
            prefix.push(v);
            go(rest - v, parts, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Column-by-column transfer DP, generic over the count type.
pub fn count_dp_with<C: Count>(inst: EhrhartInstance) -> C {
    let EhrhartInstance { n, t } = inst;
    if t == 0 {
        return C::one();
    }
    let columns = weak_compositions(t, n);
    let mut table: RowStateTable<C> = HashMap::new();
    table.insert(vec![0; n], C::one());

    // After n-1 columns every surviving state has entries <= t summing to
    // (n-1)t, so the last column is forced and always completes it.
    for _ in 0..n.saturating_sub(1) {
        let mut next: RowStateTable<C> = HashMap::with_capacity(table.len());
        for (state, mult) in &table {
            for col in &columns {
                if state.iter().zip(col).any(|(&r, &c)| r + c > t) {
                    continue;
                }
                let key: Vec<u32> = state.iter().zip(col).map(|(&r, &c)| r + c).collect();
                *next.entry(key).or_insert_with(C::zero) += mult.clone();
            }
        }
        table = next;
    }
    let mut total = C::zero();
    for mult in table.into_values() {
        total += mult;
    }
    total
}

pub fn count_dp(inst: EhrhartInstance) -> BigInt {
    count_dp_with::<BigInt>(inst)
}

/// `[H_n(0), ..., H_n(t_max)]`. Different `t` run in parallel.
pub fn count_series(n: usize, t_max: u32) -> Vec<BigInt> {
    (0..=t_max).into_par_iter().map(|t| count_dp(EhrhartInstance::new(n, t))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, t: u32) -> EhrhartInstance {
        EhrhartInstance::new(n, t)
    }

    /// Row-major, cell-at-a-time transfer: state is the partial column sums
    /// plus how much of the current row has been placed.
    fn count_rows_cellwise(n: usize, t: u32) -> BigInt {
        let mut table: HashMap<(Vec<u32>, u32), BigInt> = HashMap::new();
        table.insert((vec![0; n], 0), BigInt::from(1));
        for _row in 0..n {
            for j in 0..n {
                let mut next: HashMap<(Vec<u32>, u32), BigInt> = HashMap::new();
                for ((cols, placed), mult) in &table {
                    let room = (t - cols[j]).min(t - placed);
                    let range = if j == n - 1 { (t - placed)..=(t - placed) } else { 0..=room };
                    for v in range {
                        if v > room {
                            continue;
                        }
                        let mut c = cols.clone();
                        c[j] += v;
                        let p = if j == n - 1 { 0 } else { placed + v };
                        *next.entry((c, p)).or_default() += mult;
                    }
                }
                table = next;
            }
        }
        table.get(&(vec![t; n], 0)).cloned().unwrap_or_default()
    }

    #[test]
    fn naive_examples() {
        assert_eq!(count_naive(inst(2, 1)), BigInt::from(2));
        assert_eq!(count_naive(inst(3, 1)), BigInt::from(6));
        assert_eq!(count_naive(inst(3, 2)), BigInt::from(21));
        assert_eq!(count_naive(inst(1, 4)), BigInt::from(1));
    }

    #[test]
    fn dp_examples() {
        assert_eq!(count_dp(inst(4, 0)), BigInt::from(1));
        assert_eq!(count_dp(inst(4, 1)), BigInt::from(24));
        assert_eq!(count_rows_cellwise(4, 3), BigInt::from(2008));
        assert_eq!(count_dp(inst(4, 3)), BigInt::from(2008));
    }

    #[test]
    fn dp_matches_naive_grid() {
        for n in 1..=3 {
            for t in 0..=3 {
                assert_eq!(count_dp(inst(n, t)), count_naive(inst(n, t)), "n={n} t={t}");
            }
        }
        assert_eq!(count_dp(inst(3, 4)), count_naive(inst(3, 4)));
    }

    #[test]
    fn row_major_variant_agrees() {
        for n in 1..=4 {
            for t in 0..=4 {
                assert_eq!(count_dp(inst(n, t)), count_rows_cellwise(n, t), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn permutation_counts() {
        let mut fact = 1u64;
        for n in 1..=6 {
            fact *= n as u64;
            assert_eq!(count_dp(inst(n, 1)), BigInt::from(fact));
        }
    }

    #[test]
    fn strictly_increasing() {
        for n in 2..=4 {
            let s = count_series(n, 6);
            assert!(s.windows(2).all(|w| w[1] > w[0]), "n={n}: {s:?}");
        }
    }

    #[test]
    fn series_examples() {
        let v = |xs: &[i64]| xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(count_series(2, 3), v(&[1, 2, 3, 4]));
        assert_eq!(count_series(1, 5), v(&[1; 6]));
        assert_eq!(count_series(3, 4), v(&[1, 6, 21, 55, 120]));
    }

    #[test]
    fn machine_word_counts() {
        assert_eq!(count_dp_with::<u64>(inst(4, 3)), 2008);
        assert_eq!(count_dp_with::<u128>(inst(3, 4)), 120);
    }

    #[test]
    fn compositions_are_lexicographic() {
        let c = weak_compositions(2, 2);
        assert_eq!(c, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(weak_compositions(4, 3).len(), 15);
    }
}
