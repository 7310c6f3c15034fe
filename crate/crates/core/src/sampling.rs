//! Exactly uniform random partitions and Monte Carlo estimates of the zero
//! density of the character table.
//!
//! Shapes and cycle types are drawn independently and uniformly, so the
//! estimate targets `Z(n) / p(n)^2`, the fraction of table cells that vanish.
//! Conjugacy classes are not weighted by size.
//!
//! Randomness: samples are processed in fixed blocks of [`BLOCK_SIZE`]; block
//! `b` uses `ChaCha20Rng::seed_from_u64(seed)` switched to stream `b`. Each
//! sample draws the shape and then the cycle type from that stream. The
//! report therefore does not depend on how blocks are spread over threads.

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::character::MnEvaluator;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::partition::Partition;

pub const BLOCK_SIZE: u64 = 1000;
pub const RNG_ALGORITHM: &str = "chacha20/seed_from_u64/stream=block";
pub const PROTOCOL: &str = "uniform-table-cells";

/// Default largest `n` for Monte Carlo character evaluation.
pub const DEFAULT_MC_GUARD: u32 = 60;
/// Default cap on fresh recursion steps per character evaluation.
pub const DEFAULT_STEP_BUDGET: u64 = 2_000_000;

/// `p_k(m)` for all `0 <= k, m <= n`, the counts behind the sampler.
#[derive(Clone, Debug)]
pub struct PartitionSampler {
    n: u32,
    /// `bounded[m][k] = p_k(m)` for `k <= m`.
    bounded: Vec<Vec<BigUint>>,
}

impl PartitionSampler {
    pub fn new(n: u32) -> Self {
        let size = n as usize;
        let mut bounded: Vec<Vec<BigUint>> = Vec::with_capacity(size + 1);
        for m in 0..=size {
            let mut row = Vec::with_capacity(m + 1);
            row.push(if m == 0 { BigUint::from(1u32) } else { BigUint::zero() });
            for k in 1..=m {
                // p_k(m) = p_{k-1}(m) + p_k(m - k)
                let rest = m - k;
                let with_k = bounded[rest][k.min(rest)].clone();
                let v = &row[k - 1] + with_k;
                row.push(v);
            }
            bounded.push(row);
        }
        Self { n, bounded }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p(n)`
    pub fn total(&self) -> &BigUint {
        &self.bounded[self.n as usize][self.n as usize]
    }

    /// A uniformly random partition of `n`.
    ///
    /// The largest part is `k` with probability `(p_k(m) - p_{k-1}(m)) /
    /// p_K(m)`, where `K` bounds the parts still allowed; then recurse on
    /// `m - k` with parts at most `k`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Partition {
        let mut parts = Vec::new();
        let mut remaining = self.n as usize;
        let mut bound = remaining;
        while remaining > 0 {
            let row = &self.bounded[remaining];
            let cap = bound.min(remaining);
            let r = rng.gen_biguint_below(&row[cap]);
            // smallest k with r < p_k(remaining)
            let k = row[..=cap].partition_point(|c| c <= &r);
            parts.push(k as u32);
            remaining -= k;
            bound = k;
        }
        Partition::from_sorted(parts).expect("sampler emits weakly decreasing parts")
    }
}

/// One uniform partition of `n` from a freshly built sampler.
pub fn random_partition<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Partition> {
    if n == 0 {
        return Err(Error::Precondition("random partition needs n >= 1".into()));
    }
    Ok(PartitionSampler::new(n).sample(rng))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    #[serde(rename = "N")]
    pub n: u32,
    pub samples: u64,
    pub zeros_observed: u64,
    /// Evaluations abandoned after exhausting the step budget.
    pub failures: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub conjecture_value: f64,
    pub seed: u64,
    pub rng: &'static str,
    pub protocol: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct DensityOptions {
    pub guard: u32,
    pub step_budget: u64,
    pub execution: Execution,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self {
            guard: DEFAULT_MC_GUARD,
            step_budget: DEFAULT_STEP_BUDGET,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Tally {
    zeros: u64,
    failures: u64,
}

/// The sub-stream generator for block `index`.
pub fn block_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn estimate_zero_density(n: u32, samples: u64, seed: u64) -> Result<DensityEstimate> {
    estimate_zero_density_with(n, samples, seed, DensityOptions::default())
}

pub fn estimate_zero_density_with(
    n: u32,
    samples: u64,
    seed: u64,
    opts: DensityOptions,
) -> Result<DensityEstimate> {
    if n < 2 || samples < 1 {
        return Err(Error::Precondition(format!(
            "density estimate needs n >= 2 and samples >= 1, got n = {n}, samples = {samples}"
        )));
    }
    if n > opts.guard {
        return Err(Error::GuardExceeded {
            what: "Monte Carlo character evaluation",
            n: n as u64,
            limit: opts.guard as u64,
        });
    }
    let sampler = PartitionSampler::new(n);
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let tallies = opts.execution.map(blocks as usize, |b| {
        let b = b as u64;
        let count = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
        let mut rng = block_rng(seed, b);
        let mut tally = Tally::default();
        for _ in 0..count {
            let lambda = sampler.sample(&mut rng);
            let mu = sampler.sample(&mut rng);
            let evaluator = MnEvaluator::default().with_budget(opts.step_budget);
            match evaluator.try_value(&lambda, &mu).expect("sizes agree") {
                Ok(v) if v.is_zero() => tally.zeros += 1,
                Ok(_) => {}
                Err(_) => tally.failures += 1,
            }
        }
        tally
    });
    let total = tallies.iter().fold(Tally::default(), |acc, t| Tally {
        zeros: acc.zeros + t.zeros,
        failures: acc.failures + t.failures,
    });
    let evaluated = samples - total.failures;
    let (point, lo, hi) = if evaluated == 0 {
        (0.0, 0.0, 1.0)
    } else {
        wald_interval(total.zeros, evaluated)
    };
    Ok(DensityEstimate {
        n,
        samples,
        zeros_observed: total.zeros,
        failures: total.failures,
        point_estimate: point,
        ci_low: lo,
        ci_high: hi,
        conjecture_value: 2.0 / (n as f64).ln(),
        seed,
        rng: RNG_ALGORITHM,
        protocol: PROTOCOL,
    })
}

/// Normal-approximation 95% binomial interval, clipped to `[0, 1]`.
fn wald_interval(successes: u64, trials: u64) -> (f64, f64, f64) {
    const Z95: f64 = 1.959_963_984_540_054;
    let p = successes as f64 / trials as f64;
    let half = Z95 * (p * (1.0 - p) / trials as f64).sqrt();
    (p, (p - half).max(0.0), (p + half).min(1.0))
}
