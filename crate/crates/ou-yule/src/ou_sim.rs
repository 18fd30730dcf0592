//! Paired Ornstein-Uhlenbeck trajectories on uniform grids.
//!
//! The process solves `dX = -theta * X dt + dW` with `X(0) = x0` (0 by
//! default). Two samplers are provided:
//!
//! * [`simulate_exact`]: the Gaussian transition
//!   `X(t_{k+1}) = e^{-theta*delta} X(t_k) + sigma_delta * xi_k` with
//!   `sigma_delta^2 = (1 - e^{-2 theta delta}) / (2 theta)`, which is the
//!   law of the process restricted to the grid, with no discretization bias.
//! * [`simulate_euler`]: the first-order scheme
//!   `X(t_{k+1}) = (1 - theta*delta) X(t_k) + (W(t_{k+1}) - W(t_k))`,
//!   increments `N(0, delta)`.
//!
//! The two paths of a pair always use independent noise substreams derived
//! from the caller's seed (see [`crate::rng`]).

use crate::error::{Error, Result};
use crate::rng::{substream_seed, SplitMix64};
use rand::Rng;
use rand_distr::StandardNormal;

/// Drift rate and initial condition of one OU coordinate (both coordinates
/// of a pair share them).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    theta: f64,
    x0: f64,
}

impl OuParams {
    /// `theta` must be strictly positive and finite.
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::Domain(format!(
                "theta must be positive and finite, got {theta}"
            )));
        }
        Ok(OuParams { theta, x0: 0.0 })
    }

    /// Degenerate `theta = 0` parameters: the Euler recursion reduces to a
    /// Brownian random walk. Intended for diagnostics and tests only.
    pub fn brownian() -> Self {
        OuParams { theta: 0.0, x0: 0.0 }
    }

    /// Overrides the initial value (diagnostics only; the statistics in this
    /// crate assume `x0 = 0`).
    pub fn with_x0(mut self, x0: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::Domain(format!("x0 must be finite, got {x0}")));
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }
}

/// Uniform sampling grid `t_k = k * delta`, `k = 0..n`, horizon `T_n = n*delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    n: usize,
    delta: f64,
}

impl SampleGrid {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("need n >= 2 steps, got {n}")));
        }
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::Domain(format!(
                "mesh delta must be positive and finite, got {delta}"
            )));
        }
        Ok(SampleGrid { n, delta })
    }

    /// In-fill grid `delta = n^(-lambda)` with `1/2 < lambda < 1`.
    pub fn from_lambda(n: usize, lambda: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&lambda) || lambda == 0.5 {
            return Err(Error::Domain(format!(
                "lambda must lie in (1/2, 1), got {lambda}"
            )));
        }
        SampleGrid::new(n, (n as f64).powf(-lambda))
    }

    /// Reconstructs the grid from explicit sample times, validating
    /// uniformity to relative tolerance 1e-9.
    pub fn from_times(times: &[f64]) -> Result<Self> {
        if times.len() < 3 {
            return Err(Error::Domain(format!(
                "need at least 3 sample times, got {}",
                times.len()
            )));
        }
        let n = times.len() - 1;
        let delta = (times[n] - times[0]) / n as f64;
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::Domain(format!(
                "inferred mesh is not positive: {delta}"
            )));
        }
        let tol = 1e-9;
        let mut max_rel_dev: f64 = 0.0;
        for k in 1..=n {
            let step = times[k] - times[k - 1];
            max_rel_dev = max_rel_dev.max((step - delta).abs() / delta);
        }
        if max_rel_dev > tol {
            return Err(Error::NonuniformGrid { max_rel_dev, tol });
        }
        SampleGrid::new(n, delta)
    }

    /// Number of steps `n` (the grid holds `n + 1` samples).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Horizon `T_n = n * delta`.
    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta
    }

    /// `t_k = k * delta`.
    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.delta
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.t(k)).collect()
    }
}

/// Which recursion produced a pair of paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Exact,
    Euler,
    /// Ingested from external data, not simulated.
    External,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Exact => write!(f, "exact"),
            Scheme::Euler => write!(f, "euler"),
            Scheme::External => write!(f, "external"),
        }
    }
}

/// Two aligned OU trajectories on a shared grid.
#[derive(Debug, Clone)]
pub struct PathPair {
    pub grid: SampleGrid,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub scheme: Scheme,
    pub seed: u64,
    /// Set when the Euler step factor is outside (-1, 1]; the path is
    /// returned anyway but oscillates or grows.
    pub warning: Option<String>,
}

impl PathPair {
    /// Wraps externally supplied samples (already validated lengths).
    pub fn from_samples(grid: SampleGrid, x1: Vec<f64>, x2: Vec<f64>) -> Result<Self> {
        if x1.len() != grid.n() + 1 || x2.len() != grid.n() + 1 {
            return Err(Error::Domain(format!(
                "need {} samples per path, got {} and {}",
                grid.n() + 1,
                x1.len(),
                x2.len()
            )));
        }
        if let Some(bad) = x1.iter().chain(x2.iter()).find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample {bad}")));
        }
        Ok(PathPair {
            grid,
            x1,
            x2,
            scheme: Scheme::External,
            seed: 0,
            warning: None,
        })
    }

    /// Number of samples per path (`n + 1`).
    pub fn num_samples(&self) -> usize {
        self.grid.n() + 1
    }
}

fn path_rng(seed: u64, path_index: u64) -> SplitMix64 {
    SplitMix64::new(substream_seed(seed, 0, path_index))
}

fn generate_path<F>(rng: &mut SplitMix64, n: usize, x0: f64, mut step: F) -> Vec<f64>
where
    F: FnMut(f64, f64) -> f64,
{
    let mut x = Vec::with_capacity(n + 1);
    x.push(x0);
    let mut cur = x0;
    for _ in 0..n {
        let xi: f64 = rng.sample(StandardNormal);
        cur = step(cur, xi);
        x.push(cur);
    }
    x
}

/// Samples the pair by the exact Gaussian transition. Bias-free at any mesh.
pub fn simulate_exact(params: &OuParams, grid: &SampleGrid, seed: u64) -> Result<PathPair> {
    let theta = params.theta;
    if theta <= 0.0 {
        return Err(Error::Domain(
            "exact transition needs theta > 0 (use the Euler scheme for the Brownian case)"
                .to_string(),
        ));
    }
    let delta = grid.delta();
    let a = (-theta * delta).exp();
    // sigma_delta^2 = (1 - e^{-2 theta delta}) / (2 theta), via expm1 for small steps
    let sigma = (-f64::exp_m1(-2.0 * theta * delta) / (2.0 * theta)).sqrt();
    let make = |path_index| {
        let mut rng = path_rng(seed, path_index);
        generate_path(&mut rng, grid.n(), params.x0, |x, xi| a * x + sigma * xi)
    };
    let x1 = make(1);
    let x2 = make(2);
    Ok(PathPair {
        grid: *grid,
        x1,
        x2,
        scheme: Scheme::Exact,
        seed,
        warning: None,
    })
}

/// Samples the pair by the Euler scheme with `N(0, delta)` increments.
///
/// Errors when `theta * delta >= 2` (the recursion is explosive); records a
/// warning when `1 <= theta * delta < 2` (stable in law but oscillating).
pub fn simulate_euler(params: &OuParams, grid: &SampleGrid, seed: u64) -> Result<PathPair> {
    let theta = params.theta;
    let delta = grid.delta();
    let td = theta * delta;
    if td >= 2.0 {
        return Err(Error::ExplosiveScheme(td));
    }
    let warning = (td >= 1.0).then(|| {
        format!("theta*delta = {td} >= 1: Euler step factor is nonpositive; refine the mesh")
    });
    let factor = 1.0 - td;
    let sqrt_delta = delta.sqrt();
    let make = |path_index| {
        let mut rng = path_rng(seed, path_index);
        generate_path(&mut rng, grid.n(), params.x0, |x, xi| {
            factor * x + sqrt_delta * xi
        })
    };
    let x1 = make(1);
    let x2 = make(2);
    Ok(PathPair {
        grid: *grid,
        x1,
        x2,
        scheme: Scheme::Euler,
        seed,
        warning,
    })
}

/// Exact covariance `E[X(r) X(s)] = e^{-theta (r+s)} (e^{2 theta min(r,s)} - 1) / (2 theta)`
/// for the zero-started process.
pub fn covariance(params: &OuParams, r: f64, s: f64) -> Result<f64> {
    if params.theta <= 0.0 {
        return Err(Error::Domain("covariance needs theta > 0".to_string()));
    }
    if r < 0.0 || s < 0.0 || !r.is_finite() || !s.is_finite() {
        return Err(Error::Domain(format!(
            "times must be finite and nonnegative, got r={r}, s={s}"
        )));
    }
    let theta = params.theta;
    let m = r.min(s);
    // e^{-theta(r+s)} (e^{2 theta m} - 1) = e^{-theta(r+s-2m)} - e^{-theta(r+s)}
    // = e^{-theta |r-s|} (1 - e^{-2 theta m}); the second form is stable for
    // small m and never overflows.
    let value = (-theta * (r - s).abs()).exp() * (-f64::exp_m1(-2.0 * theta * m)) / (2.0 * theta);
    Ok(value)
}

/// Stationary covariance `Q(lag) = e^{-theta |lag|} / (2 theta)`, the upper
/// envelope of [`covariance`].
pub fn stationary_cov(params: &OuParams, lag: f64) -> Result<f64> {
    if params.theta <= 0.0 {
        return Err(Error::Domain("stationary covariance needs theta > 0".to_string()));
    }
    if !lag.is_finite() {
        return Err(Error::Domain(format!("lag must be finite, got {lag}")));
    }
    Ok((-params.theta * lag.abs()).exp() / (2.0 * params.theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reject_bad_theta() {
        assert!(OuParams::new(0.0).is_err());
        assert!(OuParams::new(-1.0).is_err());
        assert!(OuParams::new(f64::NAN).is_err());
        assert!(OuParams::new(f64::INFINITY).is_err());
        assert!(OuParams::new(2.5).is_ok());
    }

    #[test]
    fn grid_construction_and_horizon() {
        let g = SampleGrid::new(100, 0.25).unwrap();
        assert_eq!(g.horizon(), 25.0);
        assert_eq!(g.t(4), 1.0);
        assert!(SampleGrid::new(1, 0.25).is_err());
        assert!(SampleGrid::new(10, 0.0).is_err());
        let g = SampleGrid::from_lambda(10_000, 0.6).unwrap();
        assert!((g.delta() - 10_000f64.powf(-0.6)).abs() < 1e-18);
        assert!(SampleGrid::from_lambda(100, 0.5).is_err());
        assert!(SampleGrid::from_lambda(100, 1.0).is_err());
    }

    #[test]
    fn grid_from_times_validates_uniformity() {
        let g = SampleGrid::from_times(&[0.0, 0.5, 1.0, 1.5]).unwrap();
        assert_eq!(g.n(), 3);
        assert!((g.delta() - 0.5).abs() < 1e-15);
        let err = SampleGrid::from_times(&[0.0, 0.5, 1.2, 1.5]).unwrap_err();
        assert!(matches!(err, Error::NonuniformGrid { .. }));
        // round-off-scale jitter passes
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        assert!(SampleGrid::from_times(&times).is_ok());
    }

    #[test]
    fn paths_start_at_x0() {
        let params = OuParams::new(1.0).unwrap();
        let grid = SampleGrid::new(2, 0.5).unwrap();
        for pair in [
            simulate_exact(&params, &grid, 12345).unwrap(),
            simulate_euler(&params, &grid, 12345).unwrap(),
        ] {
            assert_eq!(pair.x1[0], 0.0);
            assert_eq!(pair.x2[0], 0.0);
            assert_eq!(pair.num_samples(), 3);
        }
    }

    #[test]
    fn same_seed_same_path() {
        let params = OuParams::new(1.0).unwrap();
        let grid = SampleGrid::new(512, 0.01).unwrap();
        let a = simulate_euler(&params, &grid, 9).unwrap();
        let b = simulate_euler(&params, &grid, 9).unwrap();
        assert_eq!(a.x1, b.x1);
        assert_eq!(a.x2, b.x2);
        let c = simulate_euler(&params, &grid, 10).unwrap();
        assert_ne!(a.x1, c.x1);
    }

    #[test]
    fn paths_of_a_pair_are_distinct_streams() {
        let params = OuParams::new(1.0).unwrap();
        let grid = SampleGrid::new(64, 0.1).unwrap();
        let pair = simulate_exact(&params, &grid, 4).unwrap();
        assert_ne!(pair.x1, pair.x2);
    }

    #[test]
    fn euler_stability_guards() {
        let grid_bad = SampleGrid::new(10, 1.0).unwrap();
        let err = simulate_euler(&OuParams::new(2.0).unwrap(), &grid_bad, 1).unwrap_err();
        assert!(matches!(err, Error::ExplosiveScheme(_)));
        let pair = simulate_euler(&OuParams::new(1.5).unwrap(), &grid_bad, 1).unwrap();
        assert!(pair.warning.is_some());
        let fine = SampleGrid::new(10, 0.01).unwrap();
        let pair = simulate_euler(&OuParams::new(1.5).unwrap(), &fine, 1).unwrap();
        assert!(pair.warning.is_none());
    }

    #[test]
    fn euler_with_zero_theta_is_brownian_skeleton() {
        let grid = SampleGrid::new(1000, 0.04).unwrap();
        let pair = simulate_euler(&OuParams::brownian(), &grid, 77).unwrap();
        // with theta = 0 each sample is the running sum of its increments
        let increments: Vec<f64> = pair.x1.windows(2).map(|w| w[1] - w[0]).collect();
        let reconstructed: f64 = increments.iter().sum();
        assert!((reconstructed - pair.x1[1000]).abs() < 1e-12);
        // increment variance ~ delta
        let n = increments.len() as f64;
        let mean = reconstructed / n;
        let var = increments.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / 0.04 - 1.0).abs() < 0.2, "increment variance {var}");
    }

    #[test]
    fn covariance_formula_values() {
        let p = OuParams::new(1.0).unwrap();
        assert_eq!(covariance(&p, 0.0, 5.0).unwrap(), 0.0);
        let v = covariance(&p, 1.0, 1.0).unwrap();
        assert!((v - 0.5 * (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!(covariance(&p, -1.0, 1.0).is_err());
    }

    #[test]
    fn covariance_below_stationary_envelope() {
        let p = OuParams::new(0.7).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                let (r, s) = (i as f64 * 0.3, j as f64 * 0.3);
                let c = covariance(&p, r, s).unwrap();
                let q = stationary_cov(&p, r - s).unwrap();
                assert!(c <= q + 1e-15, "c={c} q={q} at ({r},{s})");
            }
        }
    }

    #[test]
    fn stationary_cov_is_even() {
        let p = OuParams::new(2.0).unwrap();
        assert_eq!(stationary_cov(&p, 0.0).unwrap(), 0.25);
        for i in 0..10 {
            let lag = i as f64 * 0.17;
            assert_eq!(
                stationary_cov(&p, lag).unwrap(),
                stationary_cov(&p, -lag).unwrap()
            );
        }
    }

    #[test]
    fn exact_marginal_variance_matches_formula() {
        // MC over replications of the terminal value at t = 5, theta = 1
        let params = OuParams::new(1.0).unwrap();
        let grid = SampleGrid::new(10, 0.5).unwrap();
        let reps = 20_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for r in 0..reps {
            let seed = crate::rng::substream_seed(31_415, r, 0);
            let pair = simulate_exact(&params, &grid, seed).unwrap();
            let x = pair.x1[10];
            sum += x;
            sumsq += x * x;
        }
        let nf = reps as f64;
        let var = (sumsq - sum * sum / nf) / (nf - 1.0);
        let target = covariance(&params, 5.0, 5.0).unwrap();
        // fourth moment of a Gaussian: Var(X^2) = 2 sigma^4 -> SE of var
        let se = (2.0 / nf).sqrt() * target;
        assert!(
            (var - target).abs() < 4.0 * se,
            "var {var} vs {target} (se {se})"
        );
    }

    #[test]
    fn cross_covariance_of_the_pair_is_zero() {
        let params = OuParams::new(1.0).unwrap();
        let grid = SampleGrid::new(10, 0.5).unwrap();
        let reps = 20_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for r in 0..reps {
            let seed = crate::rng::substream_seed(2_718, r, 0);
            let pair = simulate_exact(&params, &grid, seed).unwrap();
            let prod = pair.x1[10] * pair.x2[10];
            sum += prod;
            sumsq += prod * prod;
        }
        let nf = reps as f64;
        let mean = sum / nf;
        let se = ((sumsq / nf - mean * mean) / nf).sqrt();
        assert!(mean.abs() < 4.0 * se, "cross moment {mean} (se {se})");
    }

    #[test]
    fn exact_lag_one_autocorrelation_is_transition_factor() {
        // E[X_k X_{k+1}] = e^{-theta delta} E[X_k^2] holds at every k, so the
        // ratio estimator converges to the transition factor without burn-in
        let params = OuParams::new(100.0).unwrap();
        let grid = SampleGrid::new(200_000, 0.01).unwrap();
        let pair = simulate_exact(&params, &grid, 8).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..grid.n() {
            num += pair.x1[k] * pair.x1[k + 1];
            den += pair.x1[k] * pair.x1[k];
        }
        let target = (-1.0f64).exp();
        assert!(
            (num / den - target).abs() < 0.01,
            "lag-1 autocorrelation {} vs {target}",
            num / den
        );
    }

    #[test]
    fn euler_time_average_square_near_stationary_variance() {
        let params = OuParams::new(1.0).unwrap();
        let grid = SampleGrid::from_lambda(10_000, 0.6).unwrap();
        let reps = 100;
        let mut acc = 0.0;
        for r in 0..reps {
            let seed = crate::rng::substream_seed(1_618, r, 0);
            let pair = simulate_euler(&params, &grid, seed).unwrap();
            acc += pair.x1.iter().map(|x| x * x).sum::<f64>() / pair.x1.len() as f64;
        }
        let mean_sq = acc / reps as f64;
        assert!(
            (mean_sq - 0.5).abs() < 0.025,
            "time-averaged square {mean_sq} vs stationary 0.5"
        );
    }

    #[test]
    fn euler_terminal_variance_tracks_exact_to_first_order() {
        // same seed couples the schemes through one noise stream, so the
        // variance gap is estimated without Monte Carlo cancellation
        let params = OuParams::new(1.0).unwrap();
        let grid = SampleGrid::new(500, 0.01).unwrap();
        let reps = 5_000;
        let mut gap = 0.0;
        for r in 0..reps {
            let seed = crate::rng::substream_seed(6_283, r, 0);
            let exact = simulate_exact(&params, &grid, seed).unwrap();
            let euler = simulate_euler(&params, &grid, seed).unwrap();
            gap += euler.x1[500] * euler.x1[500] - exact.x1[500] * exact.x1[500];
        }
        let target = covariance(&params, 5.0, 5.0).unwrap();
        let allowed = 2.0 * params.theta() * grid.delta() * target;
        assert!(
            (gap / reps as f64).abs() <= allowed,
            "terminal variance gap {} above first-order budget {allowed}",
            gap / reps as f64
        );
    }
}
