//! Saddle point of the t-core generating function and the resulting main
//! term for `c_t(n)`.

use std::f64::consts::PI;

use serde::Serialize;

use super::eta::{log_eta, mu_gap, mu_split, DEFAULT_TOL};
use super::logreal::LogReal;
use crate::error::{Error, Result};

/// Default bound on `|residual| / (n + (t^2 - 1)/24)`.
pub const DEFAULT_SADDLE_TOL: f64 = 1e-9;
const BISECTION_REL_WIDTH: f64 = 1e-12;
const NEWTON_STEPS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TyRegime {
    #[serde(rename = "SMALL")]
    Small,
    #[serde(rename = "LARGE")]
    Large,
}

impl TyRegime {
    pub fn name(self) -> &'static str {
        match self {
            TyRegime::Small => "SMALL",
            TyRegime::Large => "LARGE",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SaddleSolution {
    pub n: u64,
    pub t: u64,
    pub y: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    /// `(mu_1(ity) - mu_1(iy)) / y^2 - (n + (t^2 - 1)/24)` at the root.
    pub residual: f64,
    /// `y - bracket_lo`, resolved below double precision of `y`.
    pub lo_offset: LogReal,
    /// `bracket_hi - y`, likewise.
    pub hi_offset: LogReal,
    pub ty_regime: TyRegime,
}

impl SaddleSolution {
    /// `n + (t^2 - 1) / 24`
    pub fn shifted_n(&self) -> f64 {
        shifted_n(self.n, self.t)
    }

    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / self.shifted_n()
    }

    /// `bracket_lo < y < bracket_hi`, judged on the resolved offsets.
    pub fn strictly_inside(&self) -> bool {
        !self.lo_offset.is_zero() && !self.hi_offset.is_zero()
    }
}

fn shifted_n(n: u64, t: u64) -> f64 {
    n as f64 + ((t * t) as f64 - 1.0) / 24.0
}

/// The endpoints known to enclose the root.
pub fn saddle_bracket(n: u64, t: u64) -> (f64, f64) {
    let m = shifted_n(n, t);
    let lo = (t as f64 - 1.0) / (4.0 * PI * m);
    let hi = 1.0 / (3.0 / PI + (24.0 * n as f64 - 1.0 + 9.0 / (PI * PI)).sqrt());
    (lo, hi)
}

/// Left side of the saddle equation minus its right side; decreasing in `y`.
fn excess(y: f64, t: f64, m: f64) -> f64 {
    -mu_gap(1, y, t, DEFAULT_TOL) / (y * y) - m
}

fn excess_slope(y: f64, t: f64) -> f64 {
    -mu_gap(2, y, t, DEFAULT_TOL) / (y * y * y)
}

/// Solve `(mu_1(ity) - mu_1(iy)) / y^2 = n + (t^2 - 1)/24` for `y > 0`.
pub fn solve_saddle(n: u64, t: u64, tol: f64) -> Result<SaddleSolution> {
    if t < 6 {
        return Err(Error::Precondition(format!("saddle point needs t >= 6, got {t}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let m = shifted_n(n, t);
    let tf = t as f64;
    let (bracket_lo, bracket_hi) = saddle_bracket(n, t);
    let f_lo = excess(bracket_lo, tf, m);
    let f_hi = excess(bracket_hi, tf, m);
    let slack = tol * m;
    let bracket = (bracket_lo, bracket_hi);
    for candidate in [small_regime_root(n, t, m, bracket), large_regime_root(n, t, m, bracket)] {
        if let Some(sol) = candidate.filter(|s| s.residual.abs() <= slack) {
            return Ok(sol);
        }
    }
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::Numeric(format!(
            "saddle bracket [{bracket_lo:e}, {bracket_hi:e}] does not straddle the root \
             (residuals {f_lo:e}, {f_hi:e})"
        )));
    }

    let (mut lo, mut hi) = (bracket_lo, bracket_hi);
    while hi - lo > BISECTION_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid, tf, m) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..NEWTON_STEPS {
        let f = excess(y, tf, m);
        if f == 0.0 {
            break;
        }
        let next = y - f / excess_slope(y, tf);
        if next.is_finite() && next > lo && next < hi {
            y = next;
        }
        if excess(y, tf, m) > 0.0 {
            lo = y;
        } else {
            hi = y;
        }
    }

    let residual = excess(y, tf, m);
    if residual.abs() > slack {
        return Err(Error::Numeric(format!(
            "saddle residual {residual:e} exceeds {tol:e} * {m}"
        )));
    }
    let lo_offset = LogReal::from_f64((y - bracket_lo).max(0.0));
    let hi_offset = LogReal::from_f64((bracket_hi - y).max(0.0));
    Ok(solution(n, t, y, bracket, residual, lo_offset, hi_offset))
}

/// When `t y < 1` both series are in transformed form and the equation reads
/// `y = lo + D(y) / (y M)` with `D(y) = tail(ty) - tail(y) > 0` exponentially
/// small, so the offset from `lo` is iterated directly in log form.
fn small_regime_root(n: u64, t: u64, m: f64, bracket: (f64, f64)) -> Option<SaddleSolution> {
    let (lo, hi) = bracket;
    let tf = t as f64;
    if tf * lo >= 1.0 {
        return None;
    }
    let mut y = lo;
    let mut offset = LogReal::ZERO;
    for _ in 0..100 {
        let inner = mu_split(tf * y, 1, DEFAULT_TOL).tail;
        let outer = mu_split(y, 1, DEFAULT_TOL).tail;
        let d = inner.checked_sub(outer)?;
        let next = d / LogReal::from_f64(y * m);
        let next_y = lo + next.to_f64();
        let settled = (next.ln() - offset.ln()).abs() < 1e-13 && next_y == y;
        offset = next;
        y = next_y;
        if settled {
            break;
        }
    }
    if !(tf * y < 1.0 && y < hi) {
        return None;
    }
    let residual = excess(y, tf, m);
    Some(solution(n, t, y, bracket, residual, offset, LogReal::from_f64(hi - y)))
}

/// When `t y >= 1 > y`, dropping both tails turns the equation into the
/// quadratic `u^2/24 - u/(4 pi) = n - 1/24` in `u = 1/y` whose root is
/// `1/hi`. The tails add `E = (tail(ty) + tail(y)) / y^2 > 0`, so with
/// `u_-` the other root, `u - 1/hi = 24 E / (u - u_-)` and `hi - y =
/// (u - 1/hi) / (u / hi)`.
fn large_regime_root(n: u64, t: u64, m: f64, bracket: (f64, f64)) -> Option<SaddleSolution> {
    let (lo, hi) = bracket;
    let tf = t as f64;
    if hi >= 1.0 || tf * hi < 1.0 {
        return None;
    }
    let u_hi = 1.0 / hi;
    let u_minus = 6.0 / PI - u_hi;
    let mut y = hi;
    let mut offset = LogReal::ZERO;
    for _ in 0..100 {
        let e = (mu_split(tf * y, 1, DEFAULT_TOL).tail + mu_split(y, 1, DEFAULT_TOL).tail)
            / LogReal::from_f64(y * y);
        let u = 1.0 / y;
        let du = LogReal::from_f64(24.0) * e / LogReal::from_f64(u - u_minus);
        let next = du / LogReal::from_f64(u * u_hi);
        let next_y = hi - next.to_f64();
        let settled = (next.ln() - offset.ln()).abs() < 1e-13 && next_y == y;
        offset = next;
        y = next_y;
        if settled {
            break;
        }
    }
    if !(tf * y >= 1.0 && y > lo) {
        return None;
    }
    let residual = excess(y, tf, m);
    Some(solution(n, t, y, bracket, residual, LogReal::from_f64(y - lo), offset))
}

fn solution(
    n: u64,
    t: u64,
    y: f64,
    bracket: (f64, f64),
    residual: f64,
    lo_offset: LogReal,
    hi_offset: LogReal,
) -> SaddleSolution {
    SaddleSolution {
        n,
        t,
        y,
        bracket_lo: bracket.0,
        bracket_hi: bracket.1,
        residual,
        lo_offset,
        hi_offset,
        ty_regime: if t as f64 * y < 1.0 {
            TyRegime::Small
        } else {
            TyRegime::Large
        },
    }
}

/// Log of the saddle-point main term for `c_t(n)`:
/// `y^{3/2} exp(2 pi y M) eta(ity)^t / (sqrt(mu_2(iy) - mu_2(ity)) eta(iy))`.
pub fn tyler_ct(n: u64, t: u64, tol: f64) -> Result<LogReal> {
    if t < 6 || t > n {
        return Err(Error::Precondition(format!(
            "t-core asymptotic needs 6 <= t <= n, got n = {n}, t = {t}"
        )));
    }
    let s = solve_saddle(n, t, tol)?;
    Ok(tyler_main_term(&s))
}

pub(crate) fn tyler_main_term(s: &SaddleSolution) -> LogReal {
    let y = s.y;
    let t = s.t as f64;
    let gap = mu_gap(2, y, t, DEFAULT_TOL);
    LogReal::from_ln(
        1.5 * y.ln() + 2.0 * PI * y * s.shifted_n() + t * log_eta(t * y)
            - 0.5 * gap.ln()
            - log_eta(y),
    )
}
