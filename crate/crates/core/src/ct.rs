//! Constant-term decomposition of `H_n(t)` into independent integer tasks.
//!
//! `H_n(t)` is the coefficient of `z_1^t ... z_n^t` in `h_t(z)^n`, one factor
//! of the complete homogeneous symmetric polynomial per matrix column. With
//!
//! ```text
//! h_t(z) = sum_j z_j^(t+n-1) / prod_{k != j} (z_j - z_k)
//! ```
//!
//! the multinomial expansion of `h_t^n` has one summand per weak composition
//! `m` of `n` into `n` parts. Normalizing every denominator to
//! `prod_{j<k} (z_j - z_k)^(m_j + m_k)` moves all signs into
//! `sign(m) = (-1)^(sum_k (k-1) m_k)`, and
//!
//! ```text
//! H_n(t) = sum_m sign(m) * multinomial(n; m) * CT[ prod_j z_j^(m_j(t+n-1) - t)
//!                                               * prod_{j<k} (z_j - z_k)^-(m_j+m_k) ]
//! ```
//!
//! where `CT` is the constant term of the Laurent expansion on the cone
//! `|z_1| > |z_2| > ... > |z_n|`. The sum of summands is a polynomial, so any
//! single expansion region gives the right total even though individual
//! summands depend on the region.
//!
//! # Extraction
//!
//! Variables are extracted innermost first. When `z_v` is reached every
//! factor pairing it with a larger index has already been expanded, so its
//! exponent `X_v` is fixed per frontier monomial. The factors
//! `(z_j - z_v)^-e`, `j < v`, expand as `sum_i C(e-1+i, i) z_v^i z_j^(-e-i)`,
//! and only the choices with `sum i = -X_v` survive. A monomial with
//! `X_v > 0` contributes nothing.
//!
//! # Lookahead pruning
//!
//! [`Pruning::Lookahead`] additionally drops a monomial once the exponent of
//! `z_1` falls below `sum_{k=2}^{v-1} (m_1 + m_k)` for the variables
//! `z_2..z_{v-1}` still to be extracted. Sound because `z_1` is never the
//! inner variable of any factor: each later extraction lowers its exponent by
//! `m_1 + m_k + i >= m_1 + m_k` and nothing raises it, while only monomials
//! ending with exponent exactly `0` count. The same bound caps the
//! `z_1` series index during enumeration. `Pruning::Basic` keeps only the
//! `X_v > 0` rule; the two are compared exhaustively in the tests.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::binomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CtError {
    #[error("composition index {index} out of range for n={n} (count {count})")]
    IndexOutOfRange { n: usize, index: u64, count: u64 },
    #[error("{0:?} is not a weak composition of its length")]
    NotAComposition(Vec<u32>),
    #[error("constant-term tasks need t >= 1")]
    ZeroDilation,
    #[error("task range [{lo}, {hi}) is not within [0, {count})")]
    BadRange { lo: u64, hi: u64, count: u64 },
    #[error("malformed task id {0:?}")]
    BadTaskId(String),
}

/// Number of weak compositions of `n` into `n` parts, `C(2n-1, n-1)`.
pub fn composition_count(n: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    let c = binomial(2 * n as u64 - 1, n as u64 - 1);
    u64::try_from(c).expect("composition count exceeds u64")
}

fn count_u64(total: u64, parts: usize) -> u64 {
    // weak compositions of `total` into `parts` parts
    match parts {
        0 => u64::from(total == 0),
        _ => u64::try_from(binomial(total + parts as u64 - 1, parts as u64 - 1)).expect("overflow"),
    }
}

/// The `index`-th weak composition of `n` into `n` parts, in lexicographically
/// decreasing order starting from `(n, 0, ..., 0)`.
pub fn composition_unrank(n: usize, index: u64) -> Result<Vec<u32>, CtError> {
    let count = composition_count(n);
    if index >= count {
        return Err(CtError::IndexOutOfRange { n, index, count });
    }
    let mut out = Vec::with_capacity(n);
    let mut rest = n as u64;
    let mut idx = index;
    for pos in 0..n {
        let parts_after = n - pos - 1;
        if parts_after == 0 {
            out.push(rest as u32);
            break;
        }
        let mut v = rest;
        loop {
            let block = count_u64(rest - v, parts_after);
            if idx < block {
                break;
            }
            idx -= block;
            v -= 1;
        }
        out.push(v as u32);
        rest -= v;
    }
    Ok(out)
}

pub fn composition_rank(m: &[u32]) -> Result<u64, CtError> {
    let n = m.len();
    if m.iter().map(|&x| x as u64).sum::<u64>() != n as u64 {
        return Err(CtError::NotAComposition(m.to_vec()));
    }
    let mut rank = 0;
    let mut rest = n as u64;
    for (pos, &mj) in m.iter().enumerate() {
        let parts_after = n - pos - 1;
        if parts_after == 0 {
            break;
        }
        for v in (mj as u64 + 1)..=rest {
            rank += count_u64(rest - v, parts_after);
        }
        rest -= mj as u64;
    }
    Ok(rank)
}

/// One summand of the decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionTask {
    pub n: usize,
    pub t: u32,
    pub m: Vec<u32>,
    pub index: u64,
}

impl CompositionTask {
    pub fn new(n: usize, t: u32, index: u64) -> Result<Self, CtError> {
        let m = composition_unrank(n, index)?;
        Ok(Self { n, t, m, index })
    }

    pub fn from_composition(t: u32, m: Vec<u32>) -> Result<Self, CtError> {
        let index = composition_rank(&m)?;
        Ok(Self { n: m.len(), t, m, index })
    }

    /// `(-1)^(sum_k (k-1) m_k)` with 1-based `k`.
    pub fn sign_is_negative(&self) -> bool {
        self.m.iter().enumerate().map(|(k, &mk)| k as u64 * mk as u64).sum::<u64>() % 2 == 1
    }

    pub fn multinomial(&self) -> BigInt {
        let fact = |k: u64| (1..=k).fold(BigInt::one(), |acc, i| acc * i);
        let den = self.m.iter().fold(BigInt::one(), |acc, &k| acc * fact(k as u64));
        fact(self.n as u64) / den
    }

    /// True when the innermost exponent `m_n (t+n-1) - t` is positive; such
    /// a task is zero without expansion.
    pub fn vanishes_early(&self) -> bool {
        let last = *self.m.last().expect("n >= 1") as i64;
        last * (self.t as i64 + self.n as i64 - 1) - self.t as i64 > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskValue {
    pub task: CompositionTask,
    pub value: BigInt,
}

/// Frontier pruning policy for [`cone_constant_term`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pruning {
    Basic,
    #[default]
    Lookahead,
}

/// Exponents over the not-yet-extracted variables -> coefficient.
pub type ExponentFrontier = HashMap<Vec<i64>, BigInt>;

/// Row `e` holds `C(e-1+i, i)` for `i = 0, 1, ...`, grown on demand.
struct SeriesCoefficients {
    rows: Vec<Vec<BigInt>>,
}

impl SeriesCoefficients {
    fn new(max_e: usize) -> Self {
        Self { rows: vec![Vec::new(); max_e + 1] }
    }

    fn get(&mut self, e: u32, i: u64) -> &BigInt {
        let row = &mut self.rows[e as usize];
        while row.len() as u64 <= i {
            let k = row.len() as u64;
            row.push(binomial(e as u64 - 1 + k, k));
        }
        &row[i as usize]
    }
}

/// Cone constant term of the summand for composition `m` at dilation `t`.
pub fn cone_constant_term(t: u32, m: &[u32], pruning: Pruning) -> BigInt {
    let n = m.len();
    let weight = |j: usize, k: usize| m[j] + m[k];
    let start: Vec<i64> = m.iter().map(|&mj| mj as i64 * (t as i64 + n as i64 - 1) - t as i64).collect();
    if n == 1 {
        return BigInt::from(u8::from(start[0] == 0));
    }

    // reserve[v] = minimum total still to be subtracted from z_1 by the
    // extractions of z_2..z_v (0-based indices 1..v-1 inclusive of v-1)
    let reserve: Vec<i64> = (0..=n).map(|v| (1..v.min(n)).map(|k| weight(0, k) as i64).sum()).collect();

    let mut series = SeriesCoefficients::new(2 * n);
    let mut frontier: ExponentFrontier = HashMap::new();
    frontier.insert(start, BigInt::one());

    for v in (1..n).rev() {
        let partners: Vec<(usize, u32)> = (0..v).map(|j| (j, weight(j, v))).collect();
        let floor = match pruning {
            Pruning::Basic => None,
            Pruning::Lookahead => Some(reserve[v]),
        };
        let mut next: ExponentFrontier = HashMap::with_capacity(frontier.len());
        for (exps, coeff) in frontier.drain() {
            let x = exps[v];
            if x > 0 {
                continue;
            }
            let mut reduced = exps[..v].to_vec();
            spread((-x) as u64, &partners, 0, &mut reduced, coeff, floor, &mut series, &mut next);
        }
        frontier = next;
        if frontier.is_empty() {
            return BigInt::zero();
        }
    }

    frontier.into_iter().filter(|(exps, _)| exps[0] == 0).fold(BigInt::zero(), |acc, (_, c)| acc + c)
}

/// Distributes `need` units of series index over `partners[pos..]`, applying
/// each factor's shift to `exps` and folding finished monomials into `out`.
#[allow(clippy::too_many_arguments)]
fn spread(
    need: u64,
    partners: &[(usize, u32)],
    pos: usize,
    exps: &mut Vec<i64>,
    coeff: BigInt,
    floor: Option<i64>,
    series: &mut SeriesCoefficients,
    out: &mut ExponentFrontier,
) {
    if pos == partners.len() {
        if need != 0 {
            return;
        }
        if floor.is_some_and(|f| exps[0] < f) {
            return;
        }
        match out.get_mut(exps.as_slice()) {
            Some(c) => *c += coeff,
            None => {
                out.insert(exps.clone(), coeff);
            }
        }
        return;
    }
    let (j, e) = partners[pos];
    if e == 0 {
        // (z_j - z_v)^0 = 1
        spread(need, partners, pos + 1, exps, coeff, floor, series, out);
        return;
    }
    let last = pos + 1 == partners.len() || partners[pos + 1..].iter().all(|&(_, w)| w == 0);
    let mut max_i = need;
    if j == 0 {
        if let Some(f) = floor {
            let slack = exps[0] - e as i64 - f;
            if slack < 0 {
                return;
            }
            max_i = max_i.min(slack as u64);
        }
    }
    let min_i = if last { need } else { 0 };
    if min_i > max_i {
        return;
    }
    let original = exps[j];
    for i in min_i..=max_i {
        exps[j] = original - e as i64 - i as i64;
        let c = series.get(e, i) * &coeff;
        spread(need - i, partners, pos + 1, exps, c, floor, series, out);
    }
    exps[j] = original;
}

/// `sign(m) * multinomial(n; m) * CT` for one composition.
pub fn term_value(task: &CompositionTask) -> Result<TaskValue, CtError> {
    term_value_with(task, Pruning::default())
}

pub fn term_value_with(task: &CompositionTask, pruning: Pruning) -> Result<TaskValue, CtError> {
    if task.t == 0 {
        return Err(CtError::ZeroDilation);
    }
    let value = if task.vanishes_early() {
        BigInt::zero()
    } else {
        let ct = cone_constant_term(task.t, &task.m, pruning);
        let v = task.multinomial() * ct;
        if task.sign_is_negative() {
            -v
        } else {
            v
        }
    };
    Ok(TaskValue { task: task.clone(), value })
}

/// Sum of task values over `range` (default: every composition). Tasks run on
/// the rayon pool; the sum does not depend on scheduling.
pub fn ct_count(n: usize, t: u32, range: Option<(u64, u64)>) -> Result<BigInt, CtError> {
    let count = composition_count(n);
    let (lo, hi) = range.unwrap_or((0, count));
    if lo > hi || hi > count {
        return Err(CtError::BadRange { lo, hi, count });
    }
    if t == 0 {
        // H_n(0) = 1 is carried by the full range alone
        return Ok(if (lo, hi) == (0, count) { BigInt::one() } else { BigInt::zero() });
    }
    (lo..hi)
        .into_par_iter()
        .map(|i| {
            let task = CompositionTask::new(n, t, i)?;
            term_value(&task).map(|tv| tv.value)
        })
        .try_reduce(BigInt::zero, |a, b| Ok(a + b))
}

/// Canonical task identity `n=<n>;t=<t>;lo=<lo>;hi=<hi>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskId {
    pub n: usize,
    pub t: u32,
    pub lo: u64,
    pub hi: u64,
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};t={};lo={};hi={}", self.n, self.t, self.lo, self.hi)
    }
}

impl FromStr for TaskId {
    type Err = CtError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CtError::BadTaskId(s.to_owned());
        let mut fields = s.split(';');
        let mut take = |key: &str| -> Result<u64, CtError> {
            let field = fields.next().ok_or_else(bad)?;
            let digits = field.strip_prefix(key).and_then(|r| r.strip_prefix('=')).ok_or_else(bad)?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            digits.parse().map_err(|_| bad())
        };
        let id = TaskId {
            n: take("n")? as usize,
            t: u32::try_from(take("t")?).map_err(|_| bad())?,
            lo: take("lo")?,
            hi: take("hi")?,
        };
        if fields.next().is_some() || id.to_string() != s {
            return Err(bad());
        }
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{count_dp, EhrhartInstance};

    fn all_compositions(n: usize) -> Vec<Vec<u32>> {
        (0..composition_count(n)).map(|i| composition_unrank(n, i).unwrap()).collect()
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(composition_unrank(2, 0).unwrap(), vec![2, 0]);
        assert_eq!(composition_unrank(2, 2).unwrap(), vec![0, 2]);
        assert_eq!(composition_unrank(3, 9).unwrap(), vec![0, 0, 3]);
        assert!(matches!(composition_unrank(3, 10), Err(CtError::IndexOutOfRange { count: 10, .. })));
    }

    #[test]
    fn order_is_lexicographically_decreasing() {
        for n in 1..=5 {
            let all = all_compositions(n);
            assert_eq!(all.len() as u64, composition_count(n));
            assert!(all.windows(2).all(|w| w[0] > w[1]));
            assert!(all.iter().all(|m| m.iter().sum::<u32>() == n as u32));
        }
    }

    #[test]
    fn rank_inverts_unrank() {
        for n in 1..=5 {
            for i in 0..composition_count(n) {
                assert_eq!(composition_rank(&composition_unrank(n, i).unwrap()).unwrap(), i);
            }
        }
        assert!(composition_rank(&[1, 1, 0]).is_err());
    }

    fn tv(t: u32, m: &[u32]) -> BigInt {
        term_value(&CompositionTask::from_composition(t, m.to_vec()).unwrap()).unwrap().value
    }

    #[test]
    fn hand_expanded_terms() {
        assert_eq!(tv(1, &[2, 0]), BigInt::from(2));
        assert_eq!(tv(1, &[1, 1]), BigInt::from(0));
        assert_eq!(tv(1, &[0, 2]), BigInt::from(0));
        assert_eq!(tv(2, &[2, 0]), BigInt::from(3));
    }

    #[test]
    fn zero_dilation_rejected() {
        let task = CompositionTask::new(2, 0, 0).unwrap();
        assert_eq!(term_value(&task).unwrap_err(), CtError::ZeroDilation);
        assert_eq!(ct_count(4, 0, None).unwrap(), BigInt::from(1));
    }

    #[test]
    fn small_counts() {
        assert_eq!(ct_count(2, 1, None).unwrap(), BigInt::from(2));
        assert_eq!(ct_count(2, 2, None).unwrap(), BigInt::from(3));
        assert_eq!(ct_count(3, 2, None).unwrap(), BigInt::from(21));
        assert_eq!(ct_count(1, 7, None).unwrap(), BigInt::from(1));
    }

    #[test]
    fn malformed_ranges() {
        assert!(matches!(ct_count(3, 2, Some((4, 2))), Err(CtError::BadRange { .. })));
        assert!(matches!(ct_count(3, 2, Some((0, 11))), Err(CtError::BadRange { .. })));
        assert_eq!(ct_count(3, 2, Some((5, 5))).unwrap(), BigInt::zero());
    }

    #[test]
    fn agrees_with_oracle() {
        for n in 1..=4 {
            for t in 0..=6 {
                let want = count_dp(EhrhartInstance::new(n, t));
                assert_eq!(ct_count(n, t, None).unwrap(), want, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn pruning_policies_agree() {
        for n in 1..=4 {
            for t in 1..=6 {
                for m in all_compositions(n) {
                    let basic = cone_constant_term(t, &m, Pruning::Basic);
                    let ahead = cone_constant_term(t, &m, Pruning::Lookahead);
                    assert_eq!(basic, ahead, "t={t} m={m:?}");
                }
            }
        }
    }

    #[test]
    fn early_exit_matches_full_expansion() {
        for n in 1..=3 {
            for t in 1..=5 {
                for m in all_compositions(n) {
                    let task = CompositionTask::from_composition(t, m.clone()).unwrap();
                    if task.vanishes_early() {
                        assert!(cone_constant_term(t, &m, Pruning::Basic).is_zero(), "t={t} m={m:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn task_id_format() {
        let id = TaskId { n: 4, t: 3, lo: 5, hi: 10 };
        assert_eq!(id.to_string(), "n=4;t=3;lo=5;hi=10");
        assert_eq!("n=4;t=3;lo=5;hi=10".parse::<TaskId>().unwrap(), id);
        for bad in [
            "n=4;t=3;lo=5",
            "n=4; t=3;lo=5;hi=10",
            "n=4;t=3;lo=05;hi=10",
            "t=3;n=4;lo=5;hi=10",
            "n=4;t=3;lo=5;hi=10;x=1",
        ] {
            assert!(bad.parse::<TaskId>().is_err(), "{bad}");
        }
    }
}
