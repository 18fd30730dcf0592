//! Closed-form variances, concentration constants, rate bounds, and mesh
//! planning for the nonsense-correlation CLT.
//!
//! Everything here is a pure function of its arguments. Small `theta * T`
//! regimes switch to series expansions so that values stay accurate when the
//! leading terms of the closed forms cancel (the direct expressions lose
//! roughly `3 log10(1/(theta T))` digits near zero).

use crate::error::{Error, Result};

fn check_positive(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Domain(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(v)
}

/// Exact variance of the normalized quadratic functional
/// `F_T = T^{-1/2} * integral of X_1 X_2 over [0, T]`:
///
/// ```text
/// E[F_T^2] = (1 / (4 theta^3 T)) *
///            [ T (1 + 2 e^{-2 theta T}) - (1 - e^{-4 theta T}) / (4 theta)
///              + (e^{-2 theta T} - 1) / theta ]
/// ```
///
/// For `theta*T < 0.02` the bracket is evaluated by its series
/// `T x^3 (2/3 - 16x/15 + 44x^2/45 - 208x^3/315 + 38x^4/105)`, `x = theta*T`,
/// because the closed form cancels to `O(x^3)`.
pub fn var_ft(theta: f64, t: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    check_positive("T", t)?;
    let x = theta * t;
    if x < 0.02 {
        let series = x * x * x
            * (2.0 / 3.0
                + x * (-16.0 / 15.0
                    + x * (44.0 / 45.0 + x * (-208.0 / 315.0 + x * (38.0 / 105.0)))));
        return Ok(series / (4.0 * theta.powi(3)));
    }
    let e2 = (-2.0 * x).exp();
    let bracket = t * (1.0 + 2.0 * e2) + f64::exp_m1(-4.0 * x) / (4.0 * theta)
        + f64::exp_m1(-2.0 * x) / theta;
    Ok(bracket / (4.0 * theta.powi(3) * t))
}

/// Large-horizon limit of [`var_ft`]: `1 / (4 theta^3)`.
pub fn var_ft_limit(theta: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    Ok(1.0 / (4.0 * theta.powi(3)))
}

/// Constant controlling how fast [`var_ft`] approaches its limit:
/// `|var_ft(theta,T) - 1/(4 theta^3)| <= var_limit_deviation_constant / T`,
/// with the constant `(7 + 8 theta) / (16 theta^4)`.
pub fn var_limit_deviation_constant(theta: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    Ok((7.0 + 8.0 * theta) / (16.0 * theta.powi(4)))
}

/// Concentration mean `mu_theta(T) = 1 - (1 - e^{-2 theta T}) / (2 theta T)`:
/// the expectation of the quadratic variation `Y_11(T)/T` in units of the
/// stationary variance, `E[Y_11/T] = mu_theta(T) / (2 theta)`.
pub fn mu_theta(theta: f64, t: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    check_positive("T", t)?;
    let x = theta * t;
    if x < 1e-4 {
        // series of 1 - (1 - e^{-2x})/(2x)
        return Ok(x * (1.0 + x * (-2.0 / 3.0 + x / 3.0)));
    }
    Ok(1.0 + f64::exp_m1(-2.0 * x) / (2.0 * x))
}

/// Exact `E[Xbar^2(T)]` for `Xbar = (1/T) * integral of X over [0, T]`:
///
/// ```text
/// E[Xbar^2] = (1 / (theta^2 T^2)) *
///             [ T + (2/theta)(e^{-theta T} - 1) - (1/(2 theta))(e^{-2 theta T} - 1) ]
/// ```
///
/// bounded by `1 / (theta^2 T)`. Series branch below `theta*T = 0.02`.
pub fn mean_sq_xbar(theta: f64, t: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    check_positive("T", t)?;
    let x = theta * t;
    if x < 0.02 {
        // bracket/T = x^2/3 - x^3/4 + 7 x^4/60 - x^5/24 + ...
        let series = x * x * (1.0 / 3.0 + x * (-0.25 + x * (7.0 / 60.0 - x / 24.0)));
        return Ok(series / (theta * theta * t));
    }
    let bracket =
        t + 2.0 * f64::exp_m1(-x) / theta - f64::exp_m1(-2.0 * x) / (2.0 * theta);
    Ok(bracket / (theta * theta * t * t))
}

/// Which convergence regime a [`RateBound`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Continuous,
    Discrete,
}

/// Active branch of the discrete rate `max((n delta)^{-1/2}, (n delta^2)^{1/3})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscreteBranch {
    /// `(n delta)^{-1/2}`: the horizon-driven CLT term dominates.
    HorizonTerm,
    /// `(n delta^2)^{1/3}`: the in-fill discretization term dominates.
    MeshTerm,
}

/// Kolmogorov-distance rate bound, with its structure exposed.
#[derive(Debug, Clone, Copy)]
pub struct RateBound {
    /// Assembled bound value.
    pub value: f64,
    /// Prefactor. The continuous bound carries its explicit `c(theta)`; the
    /// discrete theorem leaves the constant implicit, reported as 1 with
    /// `relative = true`.
    pub constant: f64,
    pub regime: Regime,
    /// Validity threshold on the horizon (`T*` for the continuous regime,
    /// `n*delta > e` for the discrete one).
    pub valid_from: f64,
    /// `true` when `value` is meaningful only up to an unspecified constant.
    pub relative: bool,
    /// Set for the discrete regime.
    pub active_branch: Option<DiscreteBranch>,
}

/// Prefactor of the normalized-quadratic-functional CLT rate:
/// `c(theta) = sqrt((2 + 7/(4 theta))^2 + 27/(4 theta))`.
pub fn clt_rate_constant(theta: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    let a = 2.0 + 7.0 / (4.0 * theta);
    Ok((a * a + 27.0 / (4.0 * theta)).sqrt())
}

/// Denominator-concentration constant
/// `cst(theta) = 4 (3 + 7/(4 theta)) / theta + 64 / theta^2`; equals 83 at
/// `theta = 1`.
pub fn cst_theta(theta: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    Ok(4.0 * (3.0 + 7.0 / (4.0 * theta)) / theta + 64.0 / (theta * theta))
}

/// Exponential-moment constant `K = e^{17/128} = 1.1420359...`.
pub fn k_constant() -> f64 {
    (17.0 / 128.0f64).exp()
}

/// Horizon threshold `T*(theta) = max(e, 25 / (16 theta^2 cst(theta)))`
/// below which the continuous bound is not asserted.
pub fn t_star(theta: f64) -> Result<f64> {
    let cst = cst_theta(theta)?;
    Ok(std::f64::consts::E.max(25.0 / (16.0 * theta * theta * cst)))
}

/// Continuous-time rate bound `c(theta) * ln(T) / sqrt(T)`, valid for
/// `T > T*(theta)`.
pub fn rate_bound_continuous(theta: f64, t: f64) -> Result<RateBound> {
    check_positive("T", t)?;
    let threshold = t_star(theta)?;
    if t <= threshold {
        return Err(Error::BelowThreshold {
            t,
            t_star: threshold,
        });
    }
    let c = clt_rate_constant(theta)?;
    Ok(RateBound {
        value: c * t.ln() / t.sqrt(),
        constant: c,
        regime: Regime::Continuous,
        valid_from: threshold,
        relative: false,
        active_branch: None,
    })
}

/// Discrete-observation rate shape
/// `ln(n delta) * max((n delta)^{-1/2}, (n delta^2)^{1/3})`, reported up to
/// the theorem's unspecified constant (`constant = 1`, `relative = true`).
pub fn rate_bound_discrete(theta: f64, n: usize, delta: f64) -> Result<RateBound> {
    check_positive("theta", theta)?;
    check_positive("delta", delta)?;
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    let nd = n as f64 * delta;
    if nd <= std::f64::consts::E {
        return Err(Error::Domain(format!(
            "discrete bound needs n*delta > e, got {nd}"
        )));
    }
    let horizon_term = 1.0 / nd.sqrt();
    let mesh_term = (n as f64 * delta * delta).cbrt();
    let (value_factor, branch) = if mesh_term >= horizon_term {
        (mesh_term, DiscreteBranch::MeshTerm)
    } else {
        (horizon_term, DiscreteBranch::HorizonTerm)
    };
    Ok(RateBound {
        value: nd.ln() * value_factor,
        constant: 1.0,
        regime: Regime::Discrete,
        valid_from: std::f64::consts::E,
        relative: true,
        active_branch: Some(branch),
    })
}

/// In-fill observation plan `delta = n^{-lambda}`, horizon `T_n = n^{1-lambda}`.
#[derive(Debug, Clone, Copy)]
pub struct MeshPlan {
    pub n: usize,
    pub lambda: f64,
    pub delta: f64,
    pub horizon: f64,
    /// `ln(T_n) / sqrt(T_n)`, the rate this plan achieves (up to constants).
    pub predicted_rate: f64,
}

impl MeshPlan {
    /// `true` when the plan is in the in-fill regime `n delta^2 -> 0`
    /// (equivalent to `lambda > 1/2`), which every valid plan is.
    pub fn infill_regime(&self) -> bool {
        self.lambda > 0.5
    }
}

/// Plan with an explicit exponent `lambda` in `(1/2, 1)`.
pub fn mesh_plan(n: usize, lambda: f64) -> Result<MeshPlan> {
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    if lambda <= 0.5 || lambda >= 1.0 {
        return Err(Error::Domain(format!(
            "lambda must lie in (1/2, 1), got {lambda}"
        )));
    }
    let nf = n as f64;
    let delta = nf.powf(-lambda);
    let horizon = nf.powf(1.0 - lambda);
    Ok(MeshPlan {
        n,
        lambda,
        delta,
        horizon,
        predicted_rate: horizon.ln() / horizon.sqrt(),
    })
}

/// The balanced plan `lambda = 5/7`, where the two branches of the discrete
/// rate meet: `delta = n^{-5/7}`, `T_n = n^{2/7}`, rate `~ ln(n) n^{-1/7}`.
pub fn optimal_mesh(n: usize) -> Result<MeshPlan> {
    mesh_plan(n, 5.0 / 7.0)
}

/// Moment generating function of a product of independent centered normals,
/// `E[exp(N(0,s1^2) * N(0,s2^2) / beta)] = 1 / sqrt(1 - s1^2 s2^2 / beta^2)`,
/// defined for `beta > s1 * s2`.
pub fn product_normal_mgf(sigma1: f64, sigma2: f64, beta: f64) -> Result<f64> {
    check_positive("sigma1", sigma1)?;
    check_positive("sigma2", sigma2)?;
    check_positive("beta", beta)?;
    let ratio = sigma1 * sigma2 / beta;
    if ratio >= 1.0 {
        return Err(Error::Domain(format!(
            "need beta > sigma1*sigma2, got beta={beta}, product={}",
            sigma1 * sigma2
        )));
    }
    Ok(1.0 / (1.0 - ratio * ratio).sqrt())
}

/// Minimizer of the decoupling objective `g_beta(eps) = 4 e^{-eps/beta} + eps`
/// over `eps > 0`, for `0 < beta < 4`:
/// `eps* = beta ln(4/beta)`, `g(eps*) = beta (1 + ln(4/beta))`.
pub fn mp_optimal_epsilon(beta: f64) -> Result<(f64, f64)> {
    if !beta.is_finite() || beta <= 0.0 || beta >= 4.0 {
        return Err(Error::Domain(format!(
            "epsilon optimization needs beta in (0, 4), got {beta}"
        )));
    }
    let log_ratio = (4.0 / beta).ln();
    Ok((beta * log_ratio, beta * (1.0 + log_ratio)))
}

/// Exponential tail bound for a second-chaos variable `Y` with the given
/// variance and third cumulant `k3`:
/// `P[Y > y] <= exp(-y/beta) exp(Var/beta^2) exp(k3 / (2 beta^3))`,
/// asserted under the safety condition `beta >= 4 sqrt(Var)`.
pub fn chaos_tail_bound(y: f64, beta: f64, variance: f64, k3: f64) -> Result<f64> {
    if !y.is_finite() || y < 0.0 {
        return Err(Error::Domain(format!("need y >= 0, got {y}")));
    }
    if variance < 0.0 || !variance.is_finite() || !k3.is_finite() {
        return Err(Error::Domain(format!(
            "need finite cumulants with variance >= 0, got var={variance}, k3={k3}"
        )));
    }
    check_positive("beta", beta)?;
    let min_beta = 4.0 * variance.sqrt();
    if beta < min_beta {
        return Err(Error::BetaTooSmall {
            beta,
            min: min_beta,
        });
    }
    Ok((-y / beta + variance / (beta * beta) + k3 / (2.0 * beta.powi(3))).exp())
}

/// Mean-square bound `C_theta * n * delta^2` on the gap between the
/// left-Riemann discretization and the integral functional, with
/// `C_theta = 4 max(8/(9 theta), sqrt(2)/(3 sqrt(theta)), 1/4)`.
pub fn discretization_error_bound(theta: f64, n: usize, delta: f64) -> Result<f64> {
    check_positive("delta", delta)?;
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    Ok(discretization_constant(theta)? * n as f64 * delta * delta)
}

/// The `C_theta` prefactor of [`discretization_error_bound`]; equals 32/9 at
/// `theta = 1`.
pub fn discretization_constant(theta: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    let a = 8.0 / (9.0 * theta);
    let b = std::f64::consts::SQRT_2 / (3.0 * theta.sqrt());
    Ok(4.0 * a.max(b).max(0.25))
}
