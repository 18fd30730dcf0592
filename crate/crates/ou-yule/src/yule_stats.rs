//! Empirical nonsense-correlation statistics of a sampled path pair.
//!
//! For paths sampled at `t_k = k * delta`, `k = 0..n`, the discrete
//! aggregates use left endpoints `k = 0..n-1`:
//!
//! ```text
//! Y_ij(n) = delta * sum_k X_i(t_k) X_j(t_k) - T_n * Xbar_i * Xbar_j,
//! Xbar_i  = (1/n) * sum_k X_i(t_k),
//! rho(n)  = Y_12 / sqrt(Y_11 * Y_22),
//! psi     = sqrt(theta * T_n) * rho(n).
//! ```
//!
//! `rho` equals the Pearson sample correlation of the two series (the mesh
//! cancels). The quadrature variant approximates the continuous-time
//! statistic by the composite trapezoid rule over all `n + 1` samples.
//!
//! All sums are computed in two passes (means first, then centered
//! products), which avoids catastrophic cancellation at large `n`.

use crate::error::{Error, Result};
use crate::ou_sim::PathPair;

/// Relative tolerance below which a centered sum of squares counts as zero.
const DEGENERACY_REL_TOL: f64 = 1e-14;

/// Overshoot of |rho| beyond 1 tolerated as round-off and clamped.
const RHO_CLAMP_TOL: f64 = 1e-12;

/// How the aggregates were computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatMode {
    /// Left-endpoint Riemann sums over `k = 0..n-1`.
    Discrete,
    /// Composite trapezoid rule over all `n + 1` samples.
    Quadrature,
}

/// Correlation aggregates of one path pair.
#[derive(Debug, Clone, Copy)]
pub struct YuleResult {
    pub y11: f64,
    pub y12: f64,
    pub y22: f64,
    /// Correlation in [-1, 1].
    pub rho: f64,
    /// Standardized statistic `sqrt(theta * T_n) * rho`; set when a drift
    /// rate was supplied.
    pub psi: Option<f64>,
    /// Horizon `T_n`.
    pub horizon: f64,
    /// Number of steps `n`.
    pub n: usize,
    pub mode: StatMode,
}

fn pick<'a>(pair: &'a PathPair, index: u8) -> Result<&'a [f64]> {
    match index {
        1 => Ok(&pair.x1),
        2 => Ok(&pair.x2),
        other => Err(Error::Domain(format!(
            "path index must be 1 or 2, got {other}"
        ))),
    }
}

fn left_mean(samples: &[f64], n: usize) -> f64 {
    samples[..n].iter().sum::<f64>() / n as f64
}

/// Discrete aggregate `Y_ij(n)`; two-pass centered evaluation of
/// `delta * sum X_i X_j - T_n * Xbar_i * Xbar_j`.
pub fn y_discrete(pair: &PathPair, i: u8, j: u8) -> Result<f64> {
    let xi = pick(pair, i)?;
    let xj = pick(pair, j)?;
    let n = pair.grid.n();
    let mi = left_mean(xi, n);
    let mj = left_mean(xj, n);
    let mut acc = 0.0;
    for k in 0..n {
        acc += (xi[k] - mi) * (xj[k] - mj);
    }
    Ok(pair.grid.delta() * acc)
}

/// Uncentered magnitude `delta * sum X_i(t_k)^2`, the scale against which
/// degeneracy is judged.
fn y_scale(pair: &PathPair, i: u8) -> Result<f64> {
    let xi = pick(pair, i)?;
    let n = pair.grid.n();
    Ok(pair.grid.delta() * xi[..n].iter().map(|v| v * v).sum::<f64>())
}

fn assemble(
    y11: f64,
    y12: f64,
    y22: f64,
    scale11: f64,
    scale22: f64,
    horizon: f64,
    n: usize,
    mode: StatMode,
) -> Result<YuleResult> {
    // a centered sum can only vanish (up to round-off) for a constant series;
    // compare against the uncentered scale to tell the two apart
    let tol1 = DEGENERACY_REL_TOL * scale11.max(f64::MIN_POSITIVE);
    let tol2 = DEGENERACY_REL_TOL * scale22.max(f64::MIN_POSITIVE);
    if y11 <= tol1 || y22 <= tol2 {
        return Err(Error::DegenerateVariance(format!(
            "centered energies y11={y11:e}, y22={y22:e} below tolerance"
        )));
    }
    let mut rho = y12 / (y11 * y22).sqrt();
    if rho.abs() > 1.0 + RHO_CLAMP_TOL {
        return Err(Error::RhoOutOfRange {
            rho,
            tol: RHO_CLAMP_TOL,
        });
    }
    rho = rho.clamp(-1.0, 1.0);
    Ok(YuleResult {
        y11,
        y12,
        y22,
        rho,
        psi: None,
        horizon,
        n,
        mode,
    })
}

/// Discrete correlation `rho(n) = Y_12 / sqrt(Y_11 Y_22)`.
pub fn rho_discrete(pair: &PathPair) -> Result<YuleResult> {
    let y11 = y_discrete(pair, 1, 1)?;
    let y12 = y_discrete(pair, 1, 2)?;
    let y22 = y_discrete(pair, 2, 2)?;
    assemble(
        y11,
        y12,
        y22,
        y_scale(pair, 1)?,
        y_scale(pair, 2)?,
        pair.grid.horizon(),
        pair.grid.n(),
        StatMode::Discrete,
    )
}

/// Standardized statistic `psi = sqrt(theta * T_n) * rho(n)`.
pub fn psi(pair: &PathPair, theta: f64) -> Result<f64> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Domain(format!(
            "psi needs theta > 0, got {theta}"
        )));
    }
    let result = rho_discrete(pair)?;
    Ok((theta * result.horizon).sqrt() * result.rho)
}

/// [`rho_discrete`] with the `psi` field filled in.
pub fn rho_discrete_standardized(pair: &PathPair, theta: f64) -> Result<YuleResult> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Domain(format!(
            "psi needs theta > 0, got {theta}"
        )));
    }
    let mut result = rho_discrete(pair)?;
    result.psi = Some((theta * result.horizon).sqrt() * result.rho);
    Ok(result)
}

/// Composite trapezoid value of `integral of f(t) dt` for samples `f` on the
/// pair's grid.
fn trapezoid<F>(pair: &PathPair, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    let n = pair.grid.n();
    let mut acc = 0.5 * (f(0) + f(n));
    for k in 1..n {
        acc += f(k);
    }
    acc * pair.grid.delta()
}

/// Continuous-time statistic approximated by the trapezoid rule over the
/// full sample (all `n + 1` points).
pub fn rho_quadrature(pair: &PathPair) -> Result<YuleResult> {
    let t = pair.grid.horizon();
    let xbar1 = trapezoid(pair, |k| pair.x1[k]) / t;
    let xbar2 = trapezoid(pair, |k| pair.x2[k]) / t;
    // trapezoid is linear, so centering commutes with it exactly
    let y11 = trapezoid(pair, |k| (pair.x1[k] - xbar1) * (pair.x1[k] - xbar1));
    let y12 = trapezoid(pair, |k| (pair.x1[k] - xbar1) * (pair.x2[k] - xbar2));
    let y22 = trapezoid(pair, |k| (pair.x2[k] - xbar2) * (pair.x2[k] - xbar2));
    let scale1 = trapezoid(pair, |k| pair.x1[k] * pair.x1[k]);
    let scale2 = trapezoid(pair, |k| pair.x2[k] * pair.x2[k]);
    assemble(
        y11,
        y12,
        y22,
        scale1,
        scale2,
        t,
        pair.grid.n(),
        StatMode::Quadrature,
    )
}
