//! Acceptance gate: the ten headline checks for this toolkit, one printed
//! pass/fail line each (run with `--nocapture` to see them on success).
//!
//! The statistical criteria use the protocol configuration (lambda = 0.6,
//! 500 replications, Euler scheme, seed 42) at desk scale; the analytic
//! criteria are exact or quadrature-backed.

use ou_yule::analytic::{
    discretization_error_bound, mu_theta, var_ft, var_ft_limit, var_limit_deviation_constant,
};
use ou_yule::chaos_kernel::{
    contraction_bound, contraction_norm_sq, h_tilde_eval, k_t_eval, l2_norm_sq_extrapolated,
    nystrom_spectrum, sample_second_chaos, ChaosSpectrum, Domain, KernelGrid,
};
use ou_yule::cli::{parse_cli, run as cli_run};
use ou_yule::mc_harness::{kolmogorov_distance, run_mc, summarize, McConfig, MeshSpec, Statistic};
use ou_yule::ou_sim::{simulate_exact, OuParams, PathPair, SampleGrid, Scheme};
use ou_yule::rng::{substream_seed, SplitMix64};
use ou_yule::yule_stats::rho_discrete;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::time::Instant;

struct Outcome {
    index: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn protocol_run(theta: f64, n: usize, statistic: Statistic) -> Vec<f64> {
    let config = McConfig {
        theta,
        n,
        mesh: MeshSpec::Lambda(0.6),
        replications: 500,
        master_seed: 42,
        scheme: Scheme::Euler,
        statistic,
        workers: None,
    };
    run_mc(&config).unwrap().values
}

fn sample_var(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let summary = summarize(&protocol_run(1.0, 10_000, Statistic::Rho)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let passed = summary.mean.abs() <= 0.02
        && (0.10..=0.20).contains(&summary.stddev)
        && secs <= 60.0;
    Outcome {
        index: 1,
        name: "replication-table cell (theta=1, n=1e4)",
        passed,
        detail: format!(
            "mean={:.5} (|.|<=0.02), stddev={:.5} (in [0.10,0.20]), {:.1}s (<=60s)",
            summary.mean, summary.stddev, secs
        ),
    }
}

fn criteria_2_and_3() -> (Outcome, Outcome) {
    let start = Instant::now();
    let values = protocol_run(2.0, 100_000, Statistic::Psi);
    let secs = start.elapsed().as_secs_f64();
    let summary = summarize(&values).unwrap();
    let ok2 = summary.mean.abs() <= 0.1
        && summary.median.abs() <= 0.1
        && (0.90..=1.10).contains(&summary.stddev)
        && secs <= 300.0;
    let two = Outcome {
        index: 2,
        name: "standardized statistic moments (theta=2, n=1e5)",
        passed: ok2,
        detail: format!(
            "mean={:.5}, median={:.5} (|.|<=0.1), stddev={:.5} (in [0.90,1.10]), {:.1}s (<=300s)",
            summary.mean, summary.median, summary.stddev, secs
        ),
    };
    let ks = kolmogorov_distance(&values).unwrap();
    let three = Outcome {
        index: 3,
        name: "Kolmogorov distance to the normal",
        passed: ks.distance <= 0.08,
        detail: format!("D={:.5} (<=0.08) at x={:.3}", ks.distance, ks.location),
    };
    (two, three)
}

fn criterion_4() -> Outcome {
    // closed form obeys |var - limit| <= c/T on the lattice, with no slack
    let mut lattice_ok = true;
    let mut worst = f64::NEG_INFINITY;
    for theta in [0.5, 1.0, 2.0, 5.0] {
        let limit = var_ft_limit(theta).unwrap();
        let c = var_limit_deviation_constant(theta).unwrap();
        for t in [1.0, 5.0, 10.0, 20.0, 100.0] {
            let gap = (var_ft(theta, t).unwrap() - limit).abs();
            let ratio = gap / (c / t);
            worst = worst.max(ratio);
            lattice_ok &= gap <= c / t;
        }
    }
    // quadrature of the symmetrized kernel reproduces the closed form
    let (theta, t, m) = (1.0, 10.0, 2048);
    let quad = 2.0
        * l2_norm_sq_extrapolated(
            |x, y| h_tilde_eval(theta, t, x, y),
            Domain::SymmetricTT,
            t,
            m,
        )
        .unwrap();
    let closed = var_ft(theta, t).unwrap();
    let rel = ((quad - closed) / closed).abs();
    Outcome {
        index: 4,
        name: "variance limit bound and kernel quadrature",
        passed: lattice_ok && rel <= 1e-6,
        detail: format!(
            "lattice max gap/bound={worst:.3}, quadrature rel err={rel:.2e} (<=1e-6)"
        ),
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let theta = 1.0;
    let mut ok = true;
    let mut detail = String::new();
    for t in [5.0, 10.0, 20.0] {
        let grid = KernelGrid::midpoint(Domain::SymmetricTT, t, 256).unwrap();
        let value = contraction_norm_sq(theta, t, &grid);
        let bound = contraction_bound(theta, t).unwrap();
        ok &= value <= bound;
        detail.push_str(&format!("T={t}: {value:.3e}<={bound:.3e}; "));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs <= 120.0;
    detail.push_str(&format!("{secs:.1}s (<=120s)"));
    Outcome {
        index: 5,
        name: "contraction norm below its bound",
        passed: ok,
        detail,
    }
}

fn criterion_6() -> Outcome {
    let (theta, t) = (1.0, 10.0);
    let grid = KernelGrid::midpoint(Domain::PositiveT, t, 1024).unwrap();
    let full = nystrom_spectrum(|x, y| k_t_eval(theta, t, x, y), &grid, 1024).unwrap();
    let trace_target = mu_theta(theta, t).unwrap() / (2.0 * theta);
    let trace_rel = ((full.trace - trace_target) / trace_target).abs();

    // moment identities on the rank-100 truncation the sampler uses
    let spectrum = ChaosSpectrum::from_lambdas(full.lambdas[..100].to_vec());
    let n = 500_000usize;
    let samples: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| sample_second_chaos(&spectrum, substream_seed(6006, i, 0)))
        .collect();
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = samples.iter().map(|v| v - mean).collect();
    let m2 = centered.iter().map(|c| c * c).sum::<f64>() / nf;
    let m3 = centered.iter().map(|c| c * c * c).sum::<f64>() / nf;
    let se3 = {
        let g_var = centered
            .iter()
            .map(|c| (c * c * c - m3) * (c * c * c - m3))
            .sum::<f64>()
            / nf;
        (g_var / nf).sqrt()
    };
    let k3_target = spectrum.third_cumulant();
    let third_ok = (m3 - k3_target).abs() <= 4.0 * se3;

    // the variance convention: empirical variance sits at 2*sum(lambda^2),
    // ten-plus standard errors away from the single-sum reading
    let se2 = {
        let g_var = centered
            .iter()
            .map(|c| (c * c - m2) * (c * c - m2))
            .sum::<f64>()
            / nf;
        (g_var / nf).sqrt()
    };
    let var_two_sum = spectrum.variance();
    let var_single_sum = 0.5 * var_two_sum;
    let var_ok =
        (m2 - var_two_sum).abs() <= 4.0 * se2 && (m2 - var_single_sum).abs() > 10.0 * se2;

    Outcome {
        index: 6,
        name: "spectrum identities (trace, k3, variance convention)",
        passed: trace_rel <= 1e-6 && third_ok && var_ok,
        detail: format!(
            "trace rel={trace_rel:.2e} (<=1e-6); k3: mc={m3:.5} vs 8*sum λ^3={k3_target:.5} \
             (4se={:.5}); var: mc={m2:.5} matches 2*sum λ^2={var_two_sum:.5}, \
             rejects sum λ^2={var_single_sum:.5}",
            4.0 * se3
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = SplitMix64::new(0xACCE55);
    let mut worst: f64 = 0.0;
    for n in [3usize, 17, 128, 1001] {
        for _ in 0..100 {
            let mut x1 = Vec::with_capacity(n + 1);
            let mut x2 = Vec::with_capacity(n + 1);
            let (mut a, mut b) = (0.0f64, 0.0f64);
            for _ in 0..=n {
                a += rng.sample::<f64, _>(StandardNormal);
                b += rng.sample::<f64, _>(StandardNormal);
                x1.push(a);
                x2.push(b);
            }
            let grid = SampleGrid::new(n, 0.11).unwrap();
            let pair = PathPair::from_samples(grid, x1, x2).unwrap();
            let rho = rho_discrete(&pair).unwrap().rho;

            let xm = pair.x1[..n].iter().sum::<f64>() / n as f64;
            let ym = pair.x2[..n].iter().sum::<f64>() / n as f64;
            let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
            for k in 0..n {
                let dx = pair.x1[k] - xm;
                let dy = pair.x2[k] - ym;
                sxy += dx * dy;
                sxx += dx * dx;
                syy += dy * dy;
            }
            let pearson = sxy / (sxx * syy).sqrt();
            worst = worst.max((rho - pearson).abs());
        }
    }
    Outcome {
        index: 7,
        name: "discrete correlation equals Pearson oracle",
        passed: worst <= 1e-12,
        detail: format!("max |rho - r| = {worst:.2e} (<=1e-12) over 400 pairs"),
    }
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for theta in [1.0, 5.0] {
        let values = protocol_run(theta, 100_000, Statistic::Rho);
        let t_n = SampleGrid::from_lambda(100_000, 0.6).unwrap().horizon();
        let scaled: Vec<f64> = values.iter().map(|v| v * t_n.sqrt()).collect();
        let var = sample_var(&scaled);
        let (lo, hi) = (0.7 / theta, 1.4 / theta);
        ok &= (lo..=hi).contains(&var);
        detail.push_str(&format!(
            "theta={theta}: var={var:.4} in [{lo:.3},{hi:.3}]; "
        ));
    }
    Outcome {
        index: 8,
        name: "CLT variance scaling 1/theta",
        passed: ok,
        detail,
    }
}

fn criterion_9() -> Outcome {
    // gap between the left-Riemann sum on the coarse grid and a 16x-refined
    // quadrature proxy of the integral functional, over 500 coupled seeds
    let theta = 1.0;
    let n = 10_000usize;
    let refine = 16usize;
    let coarse = SampleGrid::from_lambda(n, 0.6).unwrap();
    let delta = coarse.delta();
    let t_n = coarse.horizon();
    let fine = SampleGrid::new(n * refine, delta / refine as f64).unwrap();
    let params = OuParams::new(theta).unwrap();

    let sum_sq: f64 = (0..500u64)
        .into_par_iter()
        .map(|s| {
            let pair = simulate_exact(&params, &fine, substream_seed(2024, s, 0)).unwrap();
            let mut coarse_sum = 0.0;
            let mut fine_sum = 0.0;
            for k in 0..n * refine {
                let prod = pair.x1[k] * pair.x2[k];
                fine_sum += prod;
                if k % refine == 0 {
                    coarse_sum += prod;
                }
            }
            let f_coarse = delta * coarse_sum / t_n.sqrt();
            let f_fine = (delta / refine as f64) * fine_sum / t_n.sqrt();
            let d = f_coarse - f_fine;
            d * d
        })
        .sum();
    let mean_sq = sum_sq / 500.0;
    let bound = discretization_error_bound(theta, n, delta).unwrap();
    Outcome {
        index: 9,
        name: "discretization error within C_theta n delta^2",
        passed: mean_sq <= bound,
        detail: format!("E[delta^2]={mean_sq:.6} <= {bound:.4}"),
    }
}

fn criterion_10() -> Outcome {
    let render = |extra: &[&str]| {
        let mut args = vec![
            "ks", "--theta", "1", "--n", "2000", "--reps", "100", "--seed", "42", "--emit",
            "samples",
        ];
        args.extend_from_slice(extra);
        let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        cli_run(&parse_cli(&argv).unwrap()).unwrap()
    };
    let base = render(&[]);
    let rerun = render(&[]);
    let w1 = render(&["--workers", "1"]);
    let w3 = render(&["--workers", "3"]);
    let table = |extra: &[&str]| {
        let mut args = vec![
            "mc-table", "--theta", "1,5", "--n", "400", "--reps", "16", "--seed", "1",
        ];
        args.extend_from_slice(extra);
        let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        cli_run(&parse_cli(&argv).unwrap()).unwrap()
    };
    let t_base = table(&[]);
    let t_w2 = table(&["--workers", "2"]);
    let passed = base == rerun && base == w1 && base == w3 && t_base == t_w2;
    Outcome {
        index: 10,
        name: "byte-identical CSV across reruns and worker counts",
        passed,
        detail: format!(
            "samples artifact {} bytes, table artifact {} bytes, all renders equal",
            base.len(),
            t_base.len()
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let mut outcomes = Vec::new();
    outcomes.push(criterion_1());
    let (two, three) = criteria_2_and_3();
    outcomes.push(two);
    outcomes.push(three);
    outcomes.push(criterion_4());
    outcomes.push(criterion_5());
    outcomes.push(criterion_6());
    outcomes.push(criterion_7());
    outcomes.push(criterion_8());
    outcomes.push(criterion_9());
    outcomes.push(criterion_10());

    let mut all_ok = true;
    for o in &outcomes {
        println!(
            "criterion {:2} [{}] {} - {}",
            o.index,
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
        all_ok &= o.passed;
    }
    assert!(
        all_ok,
        "failed: {:?}",
        outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.index)
            .collect::<Vec<_>>()
    );
}
