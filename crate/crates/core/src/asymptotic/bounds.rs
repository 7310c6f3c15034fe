//! Closed-form main terms: the partition function, partitions with bounded
//! parts, t-core counts by range of `t`, and the zero-count lower bounds.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::logreal::LogReal;
use super::PARTITION_EXPONENT as C;
use crate::counting::{partition_count, CountCache, CountKind};
use crate::error::{Error, Result};

/// Constant in the eta correction bound.
const V_BOUND: f64 = 1.00873;

/// Default largest `n` for which `p(n)` is computed exactly.
pub const DEFAULT_P_EXACT_LIMIT: u32 = 100_000;
pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PSource {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "rademacher")]
    Rademacher,
}

impl PSource {
    pub fn name(self) -> &'static str {
        match self {
            PSource::Exact => "exact",
            PSource::Rademacher => "rademacher",
        }
    }
}

/// Which closed form a [`BoundReport`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    #[serde(rename = "P32_I")]
    P32I,
    #[serde(rename = "P32_II")]
    P32II,
    #[serde(rename = "P32_III")]
    P32III,
    #[serde(rename = "P32_IV")]
    P32IV,
    #[serde(rename = "T12")]
    T12,
    #[serde(rename = "T13_I")]
    T13I,
    #[serde(rename = "T13_II")]
    T13II,
    #[serde(rename = "T13_III")]
    T13III,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::P32I => "P32_I",
            Regime::P32II => "P32_II",
            Regime::P32III => "P32_III",
            Regime::P32IV => "P32_IV",
            Regime::T12 => "T12",
            Regime::T13I => "T13_I",
            Regime::T13II => "T13_II",
            Regime::T13III => "T13_III",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Regime::P32I,
            Regime::P32II,
            Regime::P32III,
            Regime::P32IV,
            Regime::T12,
            Regime::T13I,
            Regime::T13II,
            Regime::T13III,
        ]
        .into_iter()
        .find(|r| r.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    pub n: u32,
    pub t: Option<u32>,
    pub regime: Regime,
    pub bound: LogReal,
    pub comparison: Option<LogReal>,
    pub ratio: Option<f64>,
    /// `None` for forms that do not involve `p(n)`.
    pub p_source: Option<PSource>,
}

impl BoundReport {
    /// Attach an exact value; `ratio` becomes `exact / bound`.
    pub fn with_comparison(mut self, exact: LogReal) -> Self {
        self.comparison = Some(exact);
        self.ratio = Some(exact.ratio(self.bound));
        self
    }
}

/// Where `p(n)` comes from and which `epsilon` selects the first range.
#[derive(Clone, Debug)]
pub struct BoundContext {
    pub p_exact_limit: u32,
    pub epsilon: f64,
    pub cache: Option<CountCache>,
}

impl Default for BoundContext {
    fn default() -> Self {
        Self {
            p_exact_limit: DEFAULT_P_EXACT_LIMIT,
            epsilon: DEFAULT_EPSILON,
            cache: None,
        }
    }
}

impl BoundContext {
    /// `ln p(n)`, exact up to the configured limit and the main term beyond.
    pub fn ln_p(&self, n: u32) -> Result<(LogReal, PSource)> {
        if n > self.p_exact_limit {
            return Ok((rademacher_p(n.max(1)), PSource::Rademacher));
        }
        let exact = match &self.cache {
            Some(cache) => cache
                .load_or_build(CountKind::P, n, None)?
                .get(n)
                .cloned()
                .expect("table covers its limit"),
            None => partition_count(n),
        };
        Ok((LogReal::from_biguint(&exact), PSource::Exact))
    }
}

/// `exp(C sqrt n) / (4 n sqrt 3)`.
pub fn rademacher_p(n: u32) -> LogReal {
    assert!(n >= 1, "main term needs n >= 1");
    let n = n as f64;
    LogReal::from_ln(C * n.sqrt() - (4.0 * n * 3f64.sqrt()).ln())
}

#[derive(Clone, Copy, Debug)]
pub struct ErdosLehner {
    pub value: LogReal,
    /// `t / sqrt(n) - ln(n) / C`
    pub x: f64,
    /// `|x| > n^{1/4}`, outside the window where the estimate is valid.
    pub outside_window: bool,
    pub p_source: PSource,
}

/// `p(n) exp(-(2/C) sqrt(n) exp(-C t / (2 sqrt n)))`, the estimate for
/// partitions of `n` with parts at most `t`.
pub fn erdos_lehner_pt(n: u32, t: u32, ctx: &BoundContext) -> Result<ErdosLehner> {
    if n < 2 || t < 1 {
        return Err(Error::Precondition(format!(
            "bounded-part estimate needs n >= 2, t >= 1; got n = {n}, t = {t}"
        )));
    }
    let (p, p_source) = ctx.ln_p(n)?;
    let nf = n as f64;
    let root = nf.sqrt();
    let x = t as f64 / root - nf.ln() / C;
    let outside_window = x.abs() > nf.powf(0.25);
    if outside_window {
        log::warn!("x = {x} lies outside |x| <= n^(1/4) for n = {n}, t = {t}");
    }
    let decay = (2.0 / C) * root * (-C * t as f64 / (2.0 * root)).exp();
    Ok(ErdosLehner {
        value: p * LogReal::from_ln(-decay),
        x,
        outside_window,
        p_source,
    })
}

/// `n + (t^2 - 1) / 24`
fn shifted(n: u32, t: u32) -> f64 {
    n as f64 + ((t as f64).powi(2) - 1.0) / 24.0
}

/// Upper end of the first range: `2 pi sqrt(2n) / sqrt((1 + eps) ln n)`.
pub fn first_range_end(n: u32, epsilon: f64) -> f64 {
    let nf = n as f64;
    2.0 * PI * (2.0 * nf).sqrt() / ((1.0 + epsilon) * nf.ln()).sqrt()
}

/// Lower end (exclusive) of the second range: `2 pi sqrt(2n) / sqrt(ln n)`.
pub fn second_range_start(n: u32) -> f64 {
    first_range_end(n, 0.0)
}

/// `f(n) = sqrt(24 n) / sqrt(6/pi - 1)`, taken as its asymptotic main term.
pub fn f_threshold(n: u32) -> f64 {
    (24.0 * n as f64).sqrt() / (6.0 / PI - 1.0).sqrt()
}

/// Lower end (exclusive) of the large-`t` range: `(sqrt 6 / 2 pi) sqrt(n) ln n`.
pub fn large_t_start(n: u32) -> f64 {
    let nf = n as f64;
    nf.sqrt() * nf.ln() / C
}

pub const LARGE_T_MIN_N: u32 = 300_000;

fn check_nt(n: u32, t: u32, epsilon: f64) -> Result<()> {
    if n < 100 || t < 6 || t > n {
        return Err(Error::Precondition(format!(
            "bound needs n >= 100 and 6 <= t <= n, got n = {n}, t = {t}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Precondition(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// Range of `t` the t-core estimates apply to; `large_t` enables the fourth.
fn select_core_range(n: u32, t: u32, epsilon: f64, large_t: bool) -> Result<u8> {
    let tf = t as f64;
    if tf <= first_range_end(n, epsilon) {
        Ok(1)
    } else if large_t && n >= LARGE_T_MIN_N && tf > large_t_start(n) {
        Ok(4)
    } else if tf > second_range_start(n) && tf < f_threshold(n) {
        Ok(2)
    } else if tf >= f_threshold(n) {
        Ok(3)
    } else {
        Err(Error::NoRegime {
            n,
            t,
            reason: format!(
                "t lies between {:.3} and {:.3}, where no bound is stated",
                first_range_end(n, epsilon),
                second_range_start(n)
            ),
        })
    }
}

/// `ln` of `(4 pi e)^{(t-1)/2} (t-1) / (sqrt(4 pi) (t^2 - t)^{t/2}) M^{(t-3)/2}`.
fn ln_small_t_core(n: u32, t: u32) -> f64 {
    let tf = t as f64;
    0.5 * (tf - 1.0) * (4.0 * PI * std::f64::consts::E).ln() + (tf - 1.0).ln()
        - 0.5 * (4.0 * PI).ln()
        - 0.5 * tf * (tf * tf - tf).ln()
        + 0.5 * (tf - 3.0) * shifted(n, t).ln()
}

/// `ln` of `2 sqrt(pi) exp((t-1)/2 - v t e^{-2 pi}) ((pi/6)(24n + t^2 - 1))^{(t-3)/2} / t^{t-1}`.
fn ln_mid_t_core(n: u32, t: u32) -> f64 {
    let tf = t as f64;
    (2.0 * PI.sqrt()).ln() + 0.5 * (tf - 1.0) - V_BOUND * tf * (-2.0 * PI).exp()
        + 0.5 * (tf - 3.0) * ((PI / 6.0) * (24.0 * n as f64 + tf * tf - 1.0)).ln()
        - (tf - 1.0) * tf.ln()
}

/// Exponent deficit `v t exp(-t(t-1) / (2M))` of the third form.
fn large_t_deficit(n: u32, t: u32) -> f64 {
    let tf = t as f64;
    V_BOUND * tf * (-tf * (tf - 1.0) / (2.0 * shifted(n, t))).exp()
}

/// Estimate or lower bound for `c_t(n)` in the applicable range of `t`.
pub fn prop32_bound(
    n: u32,
    t: u32,
    ctx: &BoundContext,
    regime: Option<Regime>,
) -> Result<BoundReport> {
    check_nt(n, t, ctx.epsilon)?;
    let part = match regime {
        None => select_core_range(n, t, ctx.epsilon, true)?,
        Some(Regime::P32I) => 1,
        Some(Regime::P32II) => 2,
        Some(Regime::P32III) => 3,
        Some(Regime::P32IV) => 4,
        Some(other) => {
            return Err(Error::Precondition(format!(
                "{other} is not a t-core regime"
            )))
        }
    };
    let (bound, p_source, regime) = match part {
        1 => (LogReal::from_ln(ln_small_t_core(n, t)), None, Regime::P32I),
        2 => (LogReal::from_ln(ln_mid_t_core(n, t)), None, Regime::P32II),
        3 => {
            let (p, src) = ctx.ln_p(n)?;
            (p * LogReal::from_ln(-large_t_deficit(n, t)), Some(src), Regime::P32III)
        }
        _ => {
            let (p, src) = ctx.ln_p(n)?;
            let tf = t as f64;
            let deficit = tf * (-PI * tf / (6.0 * n as f64).sqrt()).exp();
            (p * LogReal::from_ln(-deficit), Some(src), Regime::P32IV)
        }
    };
    Ok(BoundReport {
        n,
        t: Some(t),
        regime,
        bound,
        comparison: None,
        ratio: None,
        p_source,
    })
}

/// `2 p(n)^2 / ln n`.
pub fn theorem12_bound(n: u32, ctx: &BoundContext) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::Precondition(format!("zero-count bound needs n >= 2, got {n}")));
    }
    let (p, p_source) = ctx.ln_p(n)?;
    let bound = LogReal::from_f64(2.0) * p.powf(2.0) / LogReal::from_f64((n as f64).ln());
    Ok(BoundReport {
        n,
        t: None,
        regime: Regime::T12,
        bound,
        comparison: None,
        ratio: None,
        p_source: Some(p_source),
    })
}

/// Lower-bound main term for the zeros in the t-core rows.
pub fn theorem13_bound(n: u32, t: u32, ctx: &BoundContext) -> Result<BoundReport> {
    check_nt(n, t, ctx.epsilon)?;
    let (p, p_source) = ctx.ln_p(n)?;
    let (bound, regime) = match select_core_range(n, t, ctx.epsilon, false)? {
        1 => (LogReal::from_ln(ln_small_t_core(n, t)) * p, Regime::T13I),
        2 => (LogReal::from_ln(ln_mid_t_core(n, t)) * p, Regime::T13II),
        _ => {
            let nf = n as f64;
            let shift = C * t as f64 / ((nf - t as f64).sqrt() + nf.sqrt());
            (
                p.powf(2.0) * LogReal::from_ln(-(large_t_deficit(n, t) + shift)),
                Regime::T13III,
            )
        }
    };
    Ok(BoundReport {
        n,
        t: Some(t),
        regime,
        bound,
        comparison: None,
        ratio: None,
        p_source: Some(p_source),
    })
}

/// Constants splitting the lower-bound sum into its two dominant ranges.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProofConstants {
    pub t1: f64,
    pub t2: f64,
    /// Solves `n^{1/(2B)} = (sqrt 6 / 2 pi) ln n`.
    pub b: f64,
    pub f: f64,
    pub c: f64,
}

/// An inclusive range of `t`, or `None` when empty.
pub type TRange = Option<(u32, u32)>;

impl ProofConstants {
    /// Integer ranges `(T1, T2]` and `(T2, n]`, or `None` when empty.
    pub fn split_ranges(&self, n: u32) -> (TRange, TRange) {
        let t1 = self.t1.floor() as u32;
        let t2 = (self.t2.floor() as u32).min(n);
        let first = (t1 < t2).then_some((t1 + 1, t2));
        let second = (t2 < n).then_some((t2 + 1, n));
        (first, second)
    }
}

/// Smallest `n` with `(sqrt 6 / 2 pi) ln n > 1`, so that `B > 0`.
pub const PROOF_CONSTANTS_MIN_N: u32 = 14;

pub fn proof_constants(n: u32) -> Result<ProofConstants> {
    let nf = n as f64;
    let scale = nf.ln() / C;
    if scale <= 1.0 {
        return Err(Error::Precondition(format!(
            "split constants need (sqrt 6 / 2 pi) ln n > 1, i.e. n >= {PROOF_CONSTANTS_MIN_N}; got {n}"
        )));
    }
    let b = nf.ln() / (2.0 * scale.ln());
    let base = nf.sqrt() * scale;
    Ok(ProofConstants {
        t1: base * (1.0 + 1.0 / (2.0 * b)),
        t2: base * (1.0 + 1.0 / b),
        b,
        f: f_threshold(n),
        c: C,
    })
}
