//! Character values of the symmetric group by the Murnaghan–Nakayama rule,
//! full character tables, and exact zero censuses.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::counting::{partition_counts, tcore_count_with};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::partition::{enumerate_partitions, hook_multiset, is_t_core, strips_of_length, Partition};
use crate::{BigCount, CharValue};

/// Default largest `n` for which full tables are built.
pub const DEFAULT_TABLE_GUARD: u32 = 20;

/// Which part of the cycle type is stripped first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RemovalOrder {
    #[default]
    LargestFirst,
    SmallestFirst,
}

/// Raised when an evaluation exceeds its step budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded;

/// Memoized Murnaghan–Nakayama evaluator.
///
/// The memo is keyed on the canonical pair (shape, remaining cycle type) and
/// may be shared across threads; entries are exact, so the publish order
/// never affects results.
pub struct MnEvaluator {
    order: RemovalOrder,
    hook_shortcut: bool,
    budget: Option<u64>,
    steps: AtomicU64,
    memo: DashMap<Vec<u32>, BigInt>,
}

impl Default for MnEvaluator {
    fn default() -> Self {
        Self::new(RemovalOrder::LargestFirst)
    }
}

impl MnEvaluator {
    pub fn new(order: RemovalOrder) -> Self {
        Self {
            order,
            hook_shortcut: true,
            budget: None,
            steps: AtomicU64::new(0),
            memo: DashMap::new(),
        }
    }

    /// When enabled (the default), a remaining cycle type of all 1-cycles is
    /// evaluated by the hook-length formula instead of further recursion.
    pub fn with_hook_shortcut(mut self, enabled: bool) -> Self {
        self.hook_shortcut = enabled;
        self
    }

    /// Cap on the number of non-memoized recursion steps.
    pub fn with_budget(mut self, steps: u64) -> Self {
        self.budget = Some(steps);
        self
    }

    pub fn steps(&self) -> u64 {
        self.steps.load(Ordering::Relaxed)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn value(&self, lambda: &Partition, mu: &Partition) -> Result<CharValue> {
        check_sizes(lambda, mu)?;
        Ok(self
            .eval(lambda, mu.parts())
            .expect("unbudgeted evaluation cannot run out of steps"))
    }

    /// Like [`MnEvaluator::value`] but reports budget exhaustion.
    pub fn try_value(
        &self,
        lambda: &Partition,
        mu: &Partition,
    ) -> Result<std::result::Result<CharValue, BudgetExceeded>> {
        check_sizes(lambda, mu)?;
        Ok(self.eval(lambda, mu.parts()))
    }

    /// `rest` holds the cycle lengths not yet stripped, weakly decreasing.
    fn eval(&self, lambda: &Partition, rest: &[u32]) -> std::result::Result<BigInt, BudgetExceeded> {
        let Some((&first, _)) = rest.split_first() else {
            return Ok(BigInt::one());
        };
        if self.hook_shortcut && first == 1 {
            return Ok(BigInt::from(dimension(lambda)));
        }
        let key = memo_key(lambda, rest);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let steps = self.steps.fetch_add(1, Ordering::Relaxed) + 1;
        if self.budget.is_some_and(|b| steps > b) {
            return Err(BudgetExceeded);
        }
        let (part, remaining) = match self.order {
            RemovalOrder::LargestFirst => (first, &rest[1..]),
            RemovalOrder::SmallestFirst => (rest[rest.len() - 1], &rest[..rest.len() - 1]),
        };
        let mut acc = BigInt::zero();
        for strip in strips_of_length(lambda, part) {
            let sub = self.eval(&strip.remainder, remaining)?;
            if strip.sign > 0 {
                acc += sub;
            } else {
                acc -= sub;
            }
        }
        self.memo.insert(key, acc.clone());
        Ok(acc)
    }
}

fn memo_key(lambda: &Partition, rest: &[u32]) -> Vec<u32> {
    let mut key = Vec::with_capacity(lambda.len() + rest.len() + 1);
    key.extend_from_slice(lambda.parts());
    key.push(0);
    key.extend_from_slice(rest);
    key
}

fn check_sizes(lambda: &Partition, mu: &Partition) -> Result<()> {
    if lambda.size() != mu.size() {
        return Err(Error::SizeMismatch {
            lambda: lambda.size(),
            mu: mu.size(),
        });
    }
    Ok(())
}

/// `chi_lambda(mu)` with a fresh evaluator.
pub fn character_value(lambda: &Partition, mu: &Partition) -> Result<CharValue> {
    MnEvaluator::default().value(lambda, mu)
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n! / prod(hook lengths)`, the degree of the irreducible character.
pub fn dimension(lambda: &Partition) -> BigUint {
    let hooks = hook_multiset(lambda)
        .into_iter()
        .fold(BigUint::one(), |acc, h| acc * h);
    let (q, r) = factorial(lambda.size()).div_rem(&hooks);
    assert!(r.is_zero(), "hook-length quotient must be exact");
    q
}

/// Size of the conjugacy class with cycle type `mu`: `n! / prod(i^m_i m_i!)`.
pub fn class_size(mu: &Partition) -> BigUint {
    let centralizer = mu
        .multiplicities()
        .into_iter()
        .fold(BigUint::one(), |acc, (part, mult)| {
            acc * BigUint::from(part).pow(mult) * factorial(mult)
        });
    let (q, r) = factorial(mu.size()).div_rem(&centralizer);
    assert!(r.is_zero(), "class size quotient must be exact");
    q
}

#[derive(Clone, Copy, Debug)]
pub struct TableOptions {
    pub guard: u32,
    pub order: RemovalOrder,
    pub execution: Execution,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            guard: DEFAULT_TABLE_GUARD,
            order: RemovalOrder::LargestFirst,
            execution: Execution::Parallel,
        }
    }
}

/// The full `p(n) x p(n)` table; rows are shapes, columns are cycle types,
/// both in reverse-lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    n: u32,
    partitions: Vec<Partition>,
    values: Vec<Vec<CharValue>>,
}

impl CharacterTable {
    pub fn build(n: u32) -> Result<Self> {
        Self::build_with(n, TableOptions::default())
    }

    pub fn build_with(n: u32, opts: TableOptions) -> Result<Self> {
        if n > opts.guard {
            return Err(Error::GuardExceeded {
                what: "exact character table",
                n: n as u64,
                limit: opts.guard as u64,
            });
        }
        let partitions = enumerate_partitions(n);
        let evaluator = MnEvaluator::new(opts.order);
        let values = opts.execution.map(partitions.len(), |row| {
            partitions
                .iter()
                .map(|mu| evaluator.value(&partitions[row], mu).unwrap())
                .collect()
        });
        Ok(Self {
            n,
            partitions,
            values,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn rows(&self) -> &[Vec<CharValue>] {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize) -> &CharValue {
        &self.values[row][col]
    }

    pub fn zero_count(&self) -> u64 {
        self.values
            .iter()
            .flatten()
            .filter(|v| v.is_zero())
            .count() as u64
    }

    /// RFC 4180 export: header of cycle types, one row per shape.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["lambda".to_string()];
        header.extend(self.partitions.iter().map(|p| p.to_string()));
        w.write_record(&header)?;
        for (lambda, row) in self.partitions.iter().zip(&self.values) {
            let mut rec = vec![lambda.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn character_table(n: u32) -> Result<CharacterTable> {
    CharacterTable::build(n)
}

/// Zero counts for the whole table and for the t-core rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroCensus {
    pub n: u32,
    pub total_zeros: BigCount,
    /// `t -> Z_t(n)` for `1 <= t <= n`.
    pub per_core_zeros: BTreeMap<u32, BigCount>,
    pub table_dim: BigCount,
}

impl ZeroCensus {
    pub fn from_table(table: &CharacterTable) -> Self {
        let n = table.n();
        let mut per_core: BTreeMap<u32, u64> = (1..=n).map(|t| (t, 0)).collect();
        let mut total = 0u64;
        for (lambda, row) in table.partitions().iter().zip(table.rows()) {
            let zeros = row.iter().filter(|v| v.is_zero()).count() as u64;
            total += zeros;
            for t in 1..=n {
                if is_t_core(lambda, t) {
                    *per_core.get_mut(&t).unwrap() += zeros;
                }
            }
        }
        Self {
            n,
            total_zeros: BigUint::from(total),
            per_core_zeros: per_core
                .into_iter()
                .map(|(t, z)| (t, BigUint::from(z)))
                .collect(),
            table_dim: BigUint::from(table.partitions().len()),
        }
    }

    pub fn z_t(&self, t: u32) -> Option<&BigCount> {
        self.per_core_zeros.get(&t)
    }
}

pub fn zero_count(n: u32) -> Result<ZeroCensus> {
    zero_count_with(n, TableOptions::default())
}

pub fn zero_count_with(n: u32, opts: TableOptions) -> Result<ZeroCensus> {
    Ok(ZeroCensus::from_table(&CharacterTable::build_with(n, opts)?))
}

/// Terms `c_t(n) * p_t(n - t)` for `t = 1..=n` (index `t - 1`).
pub fn lower_bound_terms(n: u32) -> Vec<BigCount> {
    lower_bound_terms_with(n, Execution::Parallel)
}

pub fn lower_bound_terms_with(n: u32, execution: Execution) -> Vec<BigCount> {
    let p = partition_counts(n);
    let cores = execution.map(n as usize, |i| tcore_count_with(i as u32 + 1, n, &p));
    // After admitting parts 1..=t, dp[m] = p_t(m); only m <= n - t is read.
    let size = n as usize;
    let mut dp = vec![BigUint::zero(); size + 1];
    dp[0] = BigUint::one();
    let mut terms = Vec::with_capacity(size);
    for t in 1..=size {
        let reach = size - t;
        for m in t..=reach {
            let (lo, hi) = dp.split_at_mut(m);
            hi[0] += &lo[m - t];
        }
        terms.push(&cores[t - 1] * &dp[reach]);
    }
    terms
}

/// `sum_{t=1}^{n} c_t(n) p_t(n - t)`.
pub fn lower_bound_sum(n: u32) -> BigCount {
    lower_bound_terms(n).into_iter().sum()
}

/// `sum_{t=t_lo}^{t_hi} c_t(n) p_t(n - t)`.
pub fn lower_bound_partial(n: u32, t_lo: u32, t_hi: u32) -> Result<BigCount> {
    if t_lo < 1 || t_lo > t_hi || t_hi > n {
        return Err(Error::BadRange { n, lo: t_lo, hi: t_hi });
    }
    Ok(lower_bound_terms(n)[(t_lo - 1) as usize..t_hi as usize]
        .iter()
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::from_sorted(parts.to_vec()).unwrap()
    }

    #[test]
    fn value_examples() {
        let e = Partition::empty();
        assert_eq!(character_value(&e, &e).unwrap(), BigInt::one());
        assert_eq!(character_value(&p(&[2, 1]), &p(&[3])).unwrap(), BigInt::from(-1));
        assert_eq!(character_value(&p(&[4, 2, 1]), &p(&[5, 2])).unwrap(), BigInt::zero());
        assert_eq!(
            character_value(&p(&[4, 2, 1]), &p(&[1; 7])).unwrap(),
            BigInt::from(35)
        );
        let pure = MnEvaluator::default().with_hook_shortcut(false);
        assert_eq!(pure.value(&p(&[4, 2, 1]), &p(&[1; 7])).unwrap(), BigInt::from(35));
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(matches!(
            character_value(&p(&[2]), &p(&[1])),
            Err(Error::SizeMismatch { lambda: 2, mu: 1 })
        ));
    }

    #[test]
    fn small_tables() {
        let one = character_table(1).unwrap();
        assert_eq!(one.rows(), &[vec![BigInt::one()]]);

        let three = character_table(3).unwrap();
        let row = three.partitions().iter().position(|l| *l == p(&[2, 1])).unwrap();
        // columns come in order (3), (2,1), (1,1,1)
        let values: Vec<i64> = three.rows()[row]
            .iter()
            .map(|v| i64::try_from(v).unwrap())
            .collect();
        assert_eq!(values, vec![-1, 0, 2]);
        assert_eq!(three.zero_count(), 1);
    }

    #[test]
    fn census_examples() {
        assert_eq!(zero_count(1).unwrap().total_zeros, BigUint::zero());
        assert_eq!(zero_count(3).unwrap().total_zeros, BigUint::one());
        let opts = TableOptions {
            order: RemovalOrder::SmallestFirst,
            ..TableOptions::default()
        };
        assert_eq!(
            zero_count(6).unwrap().total_zeros,
            zero_count_with(6, opts).unwrap().total_zeros
        );
    }

    #[test]
    fn table_guard() {
        let opts = TableOptions {
            guard: 5,
            ..TableOptions::default()
        };
        assert!(matches!(
            CharacterTable::build_with(6, opts),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_sum(1), BigUint::zero());
        assert_eq!(lower_bound_sum(3), BigUint::one());
        let z12 = zero_count(12).unwrap().total_zeros;
        assert!(lower_bound_sum(12) <= z12);
        assert_eq!(lower_bound_partial(12, 1, 12).unwrap(), lower_bound_sum(12));
        assert_eq!(
            lower_bound_partial(12, 2, 5).unwrap() + lower_bound_partial(12, 6, 9).unwrap(),
            lower_bound_partial(12, 2, 9).unwrap()
        );
        assert!(lower_bound_partial(12, 0, 3).is_err());
        assert!(lower_bound_partial(12, 5, 4).is_err());
        assert!(lower_bound_partial(12, 1, 13).is_err());
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 0..=9 {
            let total: BigUint = enumerate_partitions(n).iter().map(class_size).sum();
            assert_eq!(total, factorial(n));
        }
        assert_eq!(class_size(&p(&[2, 1])), BigUint::from(3u32));
    }

    #[test]
    fn budget_stops_evaluation() {
        let ev = MnEvaluator::default().with_budget(1).with_hook_shortcut(false);
        let r = ev.try_value(&p(&[3, 2]), &p(&[2, 2, 1])).unwrap();
        assert_eq!(r, Err(BudgetExceeded));
    }
}
