//! The Dedekind eta function and Tyler's `mu_k` on the imaginary axis.
//!
//! With `q = exp(-2 pi y)`,
//!
//! ```text
//! log eta(iy) = -pi y / 12 - sum sigma(n)/n q^n
//! mu_1(iy)    =  y^2 / 24  - y^2 sum sigma(n) q^n
//! mu_2(iy)    =  2 pi y^3 sum n sigma(n) q^n
//! ```
//!
//! For `y < 1` the series are evaluated at `Q = exp(-2 pi / y)` after the
//! modular transform `eta(iy) = y^{-1/2} eta(i/y)`, which gives
//!
//! ```text
//! mu_1(iy) = -1/24 + y/(4 pi) + sum sigma(n) Q^n
//! mu_2(iy) =  1/12 - y/(4 pi) + sum sigma(n) (2 pi n / y - 2) Q^n
//! ```
//!
//! Each `mu_k` is kept as a smooth part plus an exponentially small tail so
//! that differences such as `mu_2(iy) - mu_2(ity)` stay accurate when both
//! arguments are small.

use std::f64::consts::PI;

use super::logreal::LogReal;
use crate::error::{Error, Result};

/// Relative truncation threshold for the divisor series.
pub const DEFAULT_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 64;

/// Upper bound on the eta correction factor for `y >= sqrt(3)/2`.
pub const V_UPPER: f64 = 1.00873;

fn sigma(n: usize) -> f64 {
    (1..=n).filter(|&d| n.is_multiple_of(d)).sum::<usize>() as f64
}

/// `ln(sum_{n>=1} w(n) sigma(n) q^n)` for `q = exp(ln_q)`, assuming the
/// weights keep every term positive. Evaluated as `ln q + ln(sum w(n)
/// sigma(n) q^{n-1})` so that tiny tails never underflow.
fn divisor_series(ln_q: f64, tol: f64, skip_first: bool, weight: impl Fn(f64) -> f64) -> LogReal {
    let q = ln_q.exp();
    let mut power = 1.0;
    let mut sum = 0.0;
    for n in 1..=MAX_TERMS {
        let term = weight(n as f64) * sigma(n) * power;
        if !(skip_first && n == 1) {
            sum += term;
            if term.abs() < tol * sum.abs() {
                break;
            }
        }
        power *= q;
        if power == 0.0 {
            break;
        }
    }
    LogReal::from_ln(ln_q + sum.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum EtaRegime {
    /// `y >= 1`: series evaluated directly.
    Direct,
    /// `y < 1`: series evaluated after the modular transform.
    Transformed,
}

#[derive(Clone, Copy, Debug)]
pub struct EtaValue {
    pub y: f64,
    pub log_eta: f64,
    pub regime: EtaRegime,
    /// `v` in `log eta = (leading terms) - v exp(-2 pi y')`, with `y' = y`
    /// or `1/y` depending on the regime.
    pub v_witness: f64,
    /// `v - 1`, resolved separately since it falls below double resolution
    /// for large `y'`.
    pub v_excess: f64,
}

fn check_args(y: f64, tol: f64) -> Result<()> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Precondition(format!("eta needs y > 0, got {y}")));
    }
    if !(tol > 0.0 && tol < 1e-6) {
        return Err(Error::Precondition(format!("tolerance must lie in (0, 1e-6), got {tol}")));
    }
    Ok(())
}

/// `(tail, v, v - 1)` where `tail = sum sigma(n)/n q^n` at `q = exp(-2 pi u)`.
fn eta_tail(u: f64, tol: f64) -> (f64, f64, f64) {
    let ln_q = -2.0 * PI * u;
    let tail = divisor_series(ln_q, tol, false, |n| 1.0 / n);
    let excess = divisor_series(ln_q, tol, true, |n| 1.0 / n).ln() - ln_q;
    let excess = excess.exp();
    (tail.to_f64(), (tail.ln() - ln_q).exp(), excess)
}

/// `log eta(iy)` from the series at `q = exp(-2 pi y)`.
pub fn log_eta_direct(y: f64, tol: f64) -> f64 {
    -PI * y / 12.0 - eta_tail(y, tol).0
}

/// `log eta(iy)` through `eta(iy) = y^{-1/2} eta(i/y)`.
pub fn log_eta_transformed(y: f64, tol: f64) -> f64 {
    -0.5 * y.ln() - PI / (12.0 * y) - eta_tail(1.0 / y, tol).0
}

/// `eta(iy)` in log form, transformed first when `y < 1`.
pub fn eta(y: f64, tol: f64) -> Result<EtaValue> {
    check_args(y, tol)?;
    let (regime, arg) = if y >= 1.0 {
        (EtaRegime::Direct, y)
    } else {
        (EtaRegime::Transformed, 1.0 / y)
    };
    let (tail, v, excess) = eta_tail(arg, tol);
    let log_eta = match regime {
        EtaRegime::Direct => -PI * y / 12.0 - tail,
        EtaRegime::Transformed => -0.5 * y.ln() - PI / (12.0 * y) - tail,
    };
    Ok(EtaValue {
        y,
        log_eta,
        regime,
        v_witness: v,
        v_excess: excess,
    })
}

/// `log eta(iy)` without argument checks, at the default tolerance.
pub(crate) fn log_eta(y: f64) -> f64 {
    if y >= 1.0 {
        log_eta_direct(y, DEFAULT_TOL)
    } else {
        log_eta_transformed(y, DEFAULT_TOL)
    }
}

/// `mu_k(iy)` split as `smooth + sign * tail`.
#[derive(Clone, Copy, Debug)]
pub struct MuSplit {
    pub smooth: f64,
    pub tail: LogReal,
    pub tail_negative: bool,
}

impl MuSplit {
    pub fn value(&self) -> f64 {
        self.smooth + self.signed_tail()
    }

    pub fn signed_tail(&self) -> f64 {
        let t = self.tail.to_f64();
        if self.tail_negative {
            -t
        } else {
            t
        }
    }
}

pub fn mu_split(y: f64, k: u8, tol: f64) -> MuSplit {
    assert!(y > 0.0, "mu_k needs y > 0");
    if y >= 1.0 {
        let ln_q = -2.0 * PI * y;
        match k {
            1 => MuSplit {
                smooth: y * y / 24.0,
                tail: LogReal::from_f64(y * y) * divisor_series(ln_q, tol, false, |_| 1.0),
                tail_negative: true,
            },
            2 => MuSplit {
                smooth: 0.0,
                tail: LogReal::from_f64(2.0 * PI * y.powi(3))
                    * divisor_series(ln_q, tol, false, |n| n),
                tail_negative: false,
            },
            _ => panic!("mu_k is implemented for k = 1, 2"),
        }
    } else {
        let ln_q = -2.0 * PI / y;
        match k {
            1 => MuSplit {
                smooth: -1.0 / 24.0 + y / (4.0 * PI),
                tail: divisor_series(ln_q, tol, false, |_| 1.0),
                tail_negative: false,
            },
            2 => MuSplit {
                smooth: 1.0 / 12.0 - y / (4.0 * PI),
                tail: divisor_series(ln_q, tol, false, |n| 2.0 * PI * n / y - 2.0),
                tail_negative: false,
            },
            _ => panic!("mu_k is implemented for k = 1, 2"),
        }
    }
}

/// `mu_k(iy)` for `k` in `{1, 2}`.
pub fn mu_k(y: f64, k: u8, tol: f64) -> Result<f64> {
    check_args(y, tol)?;
    if !(k == 1 || k == 2) {
        return Err(Error::Precondition(format!("mu_k supports k = 1, 2, got {k}")));
    }
    Ok(mu_split(y, k, tol).value())
}

/// `mu_k(iy) - mu_k(ity)` without cancelling the smooth parts.
pub fn mu_gap(k: u8, y: f64, t: f64, tol: f64) -> f64 {
    let a = mu_split(y, k, tol);
    let b = mu_split(t * y, k, tol);
    let smooth = if y < 1.0 && t * y < 1.0 {
        let linear = (t - 1.0) * y / (4.0 * PI);
        if k == 1 {
            -linear
        } else {
            linear
        }
    } else {
        a.smooth - b.smooth
    };
    smooth + (a.signed_tail() - b.signed_tail())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_y_limits() {
        let e = eta(10.0, DEFAULT_TOL).unwrap();
        assert_eq!(e.regime, EtaRegime::Direct);
        assert!((e.log_eta + PI * 10.0 / 12.0).abs() < 1e-12);
        let m = mu_k(10.0, 1, DEFAULT_TOL).unwrap();
        assert!((m - 100.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn self_dual_point() {
        let d = log_eta_direct(1.0, DEFAULT_TOL);
        let t = log_eta_transformed(1.0, DEFAULT_TOL);
        assert!((d - t).abs() < 1e-12, "{d} vs {t}");
        for k in [1, 2] {
            let big = mu_split(1.0, k, DEFAULT_TOL).value();
            let small = mu_split(1.0 - 1e-15, k, DEFAULT_TOL).value();
            assert!((big - small).abs() < 1e-12, "k={k}: {big} vs {small}");
        }
    }

    #[test]
    fn witness_at_lemma_threshold() {
        let e = eta(3f64.sqrt() / 2.0, DEFAULT_TOL).unwrap();
        assert!(e.v_excess > 0.0 && e.v_witness < V_UPPER);
    }

    #[test]
    fn derivative_identity() {
        // d/dy mu_1(iy) = (2 mu_1(iy) + mu_2(iy)) / y
        for &y in &[0.05, 0.3, 0.8, 1.5, 3.0] {
            let h = 1e-6 * y;
            let fd = (mu_k(y + h, 1, DEFAULT_TOL).unwrap() - mu_k(y - h, 1, DEFAULT_TOL).unwrap())
                / (2.0 * h);
            let exact =
                (2.0 * mu_k(y, 1, DEFAULT_TOL).unwrap() + mu_k(y, 2, DEFAULT_TOL).unwrap()) / y;
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1e-3), "y={y}: {fd} vs {exact}");
        }
    }

    #[test]
    fn gap_matches_plain_difference() {
        for &(y, t) in &[(0.01, 10.0), (0.05, 30.0), (0.2, 3.0), (1.2, 2.0)] {
            for k in [1, 2] {
                let plain =
                    mu_k(y, k, DEFAULT_TOL).unwrap() - mu_k(t * y, k, DEFAULT_TOL).unwrap();
                let gap = mu_gap(k, y, t, DEFAULT_TOL);
                assert!((plain - gap).abs() < 1e-12, "k={k} y={y} t={t}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(eta(0.0, DEFAULT_TOL).is_err());
        assert!(eta(1.0, 1e-3).is_err());
        assert!(mu_k(1.0, 3, DEFAULT_TOL).is_err());
    }
}
