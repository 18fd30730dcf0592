//! Walks the closed-form layer: the variance of the normalized correlation
//! integral, its large-horizon limit, the convergence-rate bounds, and the
//! mesh planner built on top of them.

use ou_yule::analytic::{
    mesh_plan, optimal_mesh, rate_bound_continuous, rate_bound_discrete, t_star, var_ft,
    var_ft_limit, var_limit_deviation_constant,
};

fn main() -> ou_yule::Result<()> {
    let theta = 1.0;

    let limit = var_ft_limit(theta)?;
    let dev = var_limit_deviation_constant(theta)?;
    println!("variance of F_T against its limit {limit} (deviation constant {dev}):");
    for t in [1.0, 5.0, 10.0, 50.0, 200.0] {
        let v = var_ft(theta, t)?;
        println!(
            "  T={t:>5}  var={v:.6}  |var-limit|={:.2e}  bound c/T={:.2e}",
            (v - limit).abs(),
            dev / t
        );
    }

    println!("normal-approximation rate bounds (theta=1):");
    println!("  valid from T* = {:.3}", t_star(theta)?);
    for t in [10.0, 100.0, 1000.0] {
        let b = rate_bound_continuous(theta, t)?;
        println!("  continuous T={t:>5}  {:.4e}", b.value);
    }
    for (n, lambda) in [(10_000usize, 0.6), (100_000, 0.6), (100_000, 0.75)] {
        let delta = (n as f64).powf(-lambda);
        let b = rate_bound_discrete(theta, n, delta)?;
        let branch = b.active_branch.expect("discrete bound always picks a branch");
        println!(
            "  discrete n={n:>6} lambda={lambda}  {:.4e}  ({branch:?} dominates, up to a constant)",
            b.value
        );
    }

    // the planner picks delta = n^{-lambda}; lambda = 5/7 balances the
    // discretization and horizon terms, larger lambda wastes samples
    println!("mesh plans for n = 10^7:");
    for lambda in [0.55, 5.0 / 7.0, 0.9] {
        let plan = mesh_plan(10_000_000, lambda)?;
        println!(
            "  lambda={lambda:.3}  delta={:.2e}  T_n={:>9.1}  rate~{:.4}",
            plan.delta, plan.horizon, plan.predicted_rate
        );
    }
    let best = optimal_mesh(10_000_000)?;
    println!(
        "  balanced: lambda={}  delta={:.1e}  T_n={}",
        best.lambda, best.delta, best.horizon
    );
    Ok(())
}
