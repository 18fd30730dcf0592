//! Deterministic parallel Monte Carlo over independent path-pair
//! replications, with summary statistics, empirical CDFs, histograms, and
//! the empirical Kolmogorov distance to the standard normal.
//!
//! Replication `r` draws its noise from substreams keyed by
//! `(master_seed, r, path)`, so the sample depends only on the
//! configuration, never on scheduling: a run with 1 worker and a run with
//! 32 workers produce identical vectors. Worker count comes from
//! `McConfig::workers`, falling back to the `OU_YULE_WORKERS` environment
//! variable, then to the rayon default.
//!
//! Replications whose sampled series are numerically constant are recorded
//! and skipped rather than aborting the experiment; more than 1% skips is
//! an error.

use crate::error::{Error, Result};
use crate::normal::norm_cdf;
use crate::ou_sim::{simulate_euler, simulate_exact, OuParams, SampleGrid, Scheme};
use crate::rng::substream_seed;
use crate::yule_stats::{psi, rho_discrete};
use rayon::prelude::*;
use serde::Serialize;

/// Which statistic each replication reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// The discrete correlation `rho(n)`.
    Rho,
    /// The standardized `psi = sqrt(theta T_n) rho(n)`.
    Psi,
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Statistic::Rho => write!(f, "rho"),
            Statistic::Psi => write!(f, "psi"),
        }
    }
}

/// Mesh specification: exactly one of the in-fill exponent or an explicit
/// step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshSpec {
    /// `delta = n^{-lambda}`, `lambda` in (1/2, 1).
    Lambda(f64),
    /// Explicit `delta > 0`.
    Delta(f64),
}

/// Monte Carlo experiment configuration.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub theta: f64,
    pub n: usize,
    pub mesh: MeshSpec,
    pub replications: usize,
    pub master_seed: u64,
    pub scheme: Scheme,
    pub statistic: Statistic,
    /// Worker override; `None` consults `OU_YULE_WORKERS`, then rayon.
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn grid(&self) -> Result<SampleGrid> {
        match self.mesh {
            MeshSpec::Lambda(lambda) => SampleGrid::from_lambda(self.n, lambda),
            MeshSpec::Delta(delta) => SampleGrid::new(self.n, delta),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 replications, got {}",
                self.replications
            )));
        }
        if self.scheme == Scheme::External {
            return Err(Error::Domain(
                "Monte Carlo needs a simulation scheme (exact or euler)".to_string(),
            ));
        }
        Ok(())
    }
}

/// Result of [`run_mc`]: kept values in replication order plus the indices
/// of skipped (degenerate) replications.
#[derive(Debug, Clone)]
pub struct McRun {
    pub values: Vec<f64>,
    pub replications: Vec<u64>,
    pub skipped: Vec<u64>,
}

fn env_workers() -> Option<usize> {
    std::env::var("OU_YULE_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w > 0)
}

fn one_replication(config: &McConfig, grid: &SampleGrid, r: u64) -> Result<Option<f64>> {
    let params = OuParams::new(config.theta)?;
    let seed = substream_seed(config.master_seed, r, 0);
    let pair = match config.scheme {
        Scheme::Exact => simulate_exact(&params, grid, seed)?,
        Scheme::Euler => simulate_euler(&params, grid, seed)?,
        Scheme::External => unreachable!("validated out"),
    };
    let value = match config.statistic {
        Statistic::Rho => rho_discrete(&pair).map(|y| y.rho),
        Statistic::Psi => psi(&pair, config.theta),
    };
    match value {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateVariance(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs all replications, in parallel, deterministically.
pub fn run_mc(config: &McConfig) -> Result<McRun> {
    config.validate()?;
    let grid = config.grid()?;
    let reps = config.replications;

    let compute = || -> Result<Vec<Option<f64>>> {
        (0..reps as u64)
            .into_par_iter()
            .map(|r| one_replication(config, &grid, r))
            .collect()
    };

    let raw = match config.workers.or_else(env_workers) {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Domain(format!("worker pool: {e}")))?
            .install(compute),
        None => compute(),
    }?;

    let mut run = McRun {
        values: Vec::with_capacity(reps),
        replications: Vec::with_capacity(reps),
        skipped: Vec::new(),
    };
    for (r, v) in raw.into_iter().enumerate() {
        match v {
            Some(value) => {
                run.values.push(value);
                run.replications.push(r as u64);
            }
            None => run.skipped.push(r as u64),
        }
    }
    if run.skipped.len() * 100 > reps {
        return Err(Error::TooManySkips {
            skipped: run.skipped.len(),
            total: reps,
        });
    }
    Ok(run)
}

/// Order statistics of a Monte Carlo sample.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McSummary {
    pub count: usize,
    pub mean: f64,
    /// Exact median: the average of the two middle order statistics for even
    /// counts.
    pub median: f64,
    /// Sample standard deviation (divisor `count - 1`).
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(samples: &[f64]) -> Result<McSummary> {
    let count = samples.len();
    if count < 2 {
        return Err(Error::EmptySample {
            required: 2,
            got: count,
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = count as f64;
    let mean = sorted.iter().sum::<f64>() / nf;
    let ss: f64 = sorted.iter().map(|x| (x - mean) * (x - mean)).sum();
    let stddev = (ss / (nf - 1.0)).sqrt();
    let median = if count % 2 == 1 {
        sorted[count / 2]
    } else {
        0.5 * (sorted[count / 2 - 1] + sorted[count / 2])
    };
    Ok(McSummary {
        count,
        mean,
        median,
        stddev,
        min: sorted[0],
        max: sorted[count - 1],
    })
}

/// Empirical Kolmogorov distance to the standard normal.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsReport {
    /// `sup_z |F_N(z) - Phi(z)|`, in [0, 1].
    pub distance: f64,
    pub sample_size: usize,
    /// Abscissa where the supremum is attained.
    pub location: f64,
}

/// One-sample Kolmogorov distance between the empirical CDF and `Phi`:
/// `D = max_i max(i/N - Phi(x_(i)), Phi(x_(i)) - (i-1)/N)` over the sorted
/// sample.
pub fn kolmogorov_distance(samples: &[f64]) -> Result<KsReport> {
    let n = samples.len();
    if n < 10 {
        return Err(Error::EmptySample {
            required: 10,
            got: n,
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    let mut best = f64::NEG_INFINITY;
    let mut location = sorted[0];
    for (i, &x) in sorted.iter().enumerate() {
        let phi = norm_cdf(x);
        let upper = (i + 1) as f64 / nf - phi;
        let lower = phi - i as f64 / nf;
        let gap = upper.max(lower);
        if gap > best {
            best = gap;
            location = x;
        }
    }
    Ok(KsReport {
        distance: best.max(0.0),
        sample_size: n,
        location,
    })
}

/// Right-continuous empirical CDF.
#[derive(Debug, Clone)]
pub struct Ecdf {
    /// Distinct sample values, ascending.
    pub xs: Vec<f64>,
    /// `F(xs[i])`, nondecreasing, ending at 1.
    pub fractions: Vec<f64>,
}

impl Ecdf {
    /// `F(x) = P_N[X <= x]`.
    pub fn eval(&self, x: f64) -> f64 {
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0.0,
            k => self.fractions[k - 1],
        }
    }
}

pub fn ecdf(samples: &[f64]) -> Result<Ecdf> {
    if samples.is_empty() {
        return Err(Error::EmptySample {
            required: 1,
            got: 0,
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = sorted.len() as f64;
    let mut xs = Vec::new();
    let mut fractions = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        let f = (i + 1) as f64 / nf;
        if xs.last() == Some(&x) {
            *fractions.last_mut().unwrap() = f;
        } else {
            xs.push(x);
            fractions.push(f);
        }
    }
    Ok(Ecdf { xs, fractions })
}

/// Equal-width histogram covering `[min, max]`.
#[derive(Debug, Clone)]
pub struct Histogram {
    /// `bins + 1` edges; first = min, last = max (or a unit box around a
    /// constant sample).
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn histogram(samples: &[f64], bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::ZeroBins);
    }
    if samples.is_empty() {
        return Err(Error::EmptySample {
            required: 1,
            got: 0,
        });
    }
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if min == max {
        (min - 0.5, min + 0.5)
    } else {
        (min, max)
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
    Ok(Histogram { edges, counts })
}
