use charcensus::character::{
    class_size, dimension, factorial, lower_bound_partial, lower_bound_sum, lower_bound_terms,
    CharacterTable, MnEvaluator, RemovalOrder, TableOptions, ZeroCensus,
};
use charcensus::counting::{bounded_partition_count, partition_counts, tcore_count};
use charcensus::partition::{enumerate_partitions, is_t_core, Partition};
use charcensus::Execution;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;

fn table(n: u32, order: RemovalOrder, execution: Execution) -> CharacterTable {
    CharacterTable::build_with(n, TableOptions { order, execution, ..TableOptions::default() }).unwrap()
}

#[test]
fn cores_vanish_on_classes_with_that_part() {
    let ev = MnEvaluator::default();
    for n in 1..=14 {
        let all = enumerate_partitions(n);
        for t in 1..=n {
            for lambda in all.iter().filter(|l| is_t_core(l, t)) {
                for mu in all.iter().filter(|m| m.has_part(t)) {
                    assert!(ev.value(lambda, mu).unwrap().is_zero(), "{lambda} {mu}");
                }
            }
        }
    }
}

#[test]
fn first_column_is_the_hook_formula() {
    let ev = MnEvaluator::default().with_hook_shortcut(false);
    for n in 1..=12 {
        let ones = Partition::from_parts(vec![1; n as usize]);
        let mut sum_sq = BigUint::zero();
        for lambda in enumerate_partitions(n) {
            let v = ev.value(&lambda, &ones).unwrap();
            let d = dimension(&lambda);
            assert_eq!(v, BigInt::from(d.clone()), "{lambda}");
            sum_sq += &d * &d;
        }
        assert_eq!(sum_sq, factorial(n), "n={n}");
    }
}

#[test]
fn rows_are_orthogonal() {
    for n in 1..=10 {
        let tab = table(n, RemovalOrder::LargestFirst, Execution::Parallel);
        let sizes: Vec<BigInt> = tab.partitions().iter().map(|m| BigInt::from(class_size(m))).collect();
        let f = BigInt::from(factorial(n));
        for (i, a) in tab.rows().iter().enumerate() {
            for (j, b) in tab.rows().iter().enumerate() {
                let s: BigInt = sizes.iter().zip(a).zip(b).map(|((c, x), y)| c * x * y).sum();
                let expected = if i == j { f.clone() } else { BigInt::zero() };
                assert_eq!(s, expected, "n={n} rows {i},{j}");
            }
        }
    }
}

#[test]
fn removal_order_does_not_matter() {
    for n in 1..=10 {
        assert_eq!(
            table(n, RemovalOrder::LargestFirst, Execution::Parallel),
            table(n, RemovalOrder::SmallestFirst, Execution::Sequential),
            "n={n}"
        );
    }
}

#[cfg(feature = "parallel")]
#[test]
fn tables_are_byte_identical_across_schedules() {
    let csv = |tab: &CharacterTable| {
        let mut buf = Vec::new();
        tab.write_csv(&mut buf).unwrap();
        buf
    };
    let reference = csv(&table(11, RemovalOrder::LargestFirst, Execution::Sequential));
    for threads in [1, 2, 4, 7] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let tab = pool.install(|| table(11, RemovalOrder::LargestFirst, Execution::Parallel));
        assert_eq!(csv(&tab), reference, "threads={threads}");
    }
}

#[test]
fn strip_bound_and_sum_below_census() {
    let p = partition_counts(12);
    for n in 1..=12 {
        let census = ZeroCensus::from_table(&table(n, RemovalOrder::LargestFirst, Execution::Parallel));
        for t in 1..=n {
            let bound = tcore_count(t, n) * &p[(n - t) as usize];
            assert!(census.z_t(t).unwrap() >= &bound, "n={n} t={t}");
        }
        assert!(census.total_zeros >= lower_bound_sum(n), "n={n}");
    }
}

#[test]
fn lower_bound_terms_match_definition() {
    for n in 1..=40 {
        let terms = lower_bound_terms(n);
        assert_eq!(terms.len() as u32, n);
        for (i, term) in terms.iter().enumerate() {
            let t = i as u32 + 1;
            assert_eq!(term, &(tcore_count(t, n) * bounded_partition_count(t, n - t)), "n={n} t={t}");
        }
    }
    assert_eq!(lower_bound_sum(1), BigUint::zero());
    assert_eq!(lower_bound_sum(3), BigUint::from(1u32));
}

#[test]
fn census_counts_every_zero_once() {
    for n in 1..=9 {
        let tab = table(n, RemovalOrder::LargestFirst, Execution::Parallel);
        let census = ZeroCensus::from_table(&tab);
        assert_eq!(census.total_zeros, BigUint::from(tab.zero_count()));
        for (t, z) in &census.per_core_zeros {
            let direct = tab
                .partitions()
                .iter()
                .zip(tab.rows())
                .filter(|(l, _)| is_t_core(l, *t))
                .map(|(_, row)| row.iter().filter(|v| v.is_zero()).count() as u64)
                .sum::<u64>();
            assert_eq!(z, &BigUint::from(direct), "n={n} t={t}");
        }
    }
}

proptest! {
    #[test]
    fn partial_sums_are_additive(n in 1u32..60, a in 0u32..60, b in 0u32..60, c in 0u32..60) {
        let mut cuts = [a % n + 1, b % n + 1, c % n + 1];
        cuts.sort_unstable();
        let [lo, mid, hi] = cuts;
        prop_assume!(mid < hi);
        let left = lower_bound_partial(n, lo, mid).unwrap();
        let right = lower_bound_partial(n, mid + 1, hi).unwrap();
        prop_assert_eq!(left + right, lower_bound_partial(n, lo, hi).unwrap());
    }

    #[test]
    fn characters_are_class_functions_of_conjugates(n in 1u32..13, i in 0usize..100, j in 0usize..100) {
        // chi_{lambda'}(mu) = sgn(mu) chi_lambda(mu)
        let all = enumerate_partitions(n);
        let lambda = &all[i % all.len()];
        let mu = &all[j % all.len()];
        let ev = MnEvaluator::default();
        let even = mu.parts().iter().map(|&m| m - 1).sum::<u32>() % 2 == 0;
        let v = ev.value(lambda, mu).unwrap();
        let w = ev.value(&lambda.conjugate(), mu).unwrap();
        prop_assert_eq!(w, if even { v } else { -v });
    }
}
