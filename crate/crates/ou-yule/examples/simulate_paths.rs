//! Simulates one pair of independent mean-reverting paths with both schemes
//! and checks the time-averaged square against the stationary variance.

use ou_yule::ou_sim::{simulate_euler, simulate_exact, OuParams, SampleGrid};

fn mean_square(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64
}

fn main() -> ou_yule::Result<()> {
    let params = OuParams::new(2.0)?;
    let grid = SampleGrid::new(20_000, 5e-3)?;
    let seed = 42;

    let exact = simulate_exact(&params, &grid, seed)?;
    let euler = simulate_euler(&params, &grid, seed)?;

    println!(
        "theta={} n={} delta={} T_n={}",
        params.theta(),
        grid.n(),
        grid.delta(),
        grid.horizon()
    );
    println!("{:>10} {:>12} {:>12}", "t", "exact", "euler");
    for k in [0usize, 1, 2, 10_000, 20_000] {
        println!("{:>10.3} {:>12.6} {:>12.6}", grid.t(k), exact.x1[k], euler.x1[k]);
    }

    // both schemes share one driving noise stream, so the paths track each
    // other; the gap is the Euler discretization error
    let gap = exact
        .x1
        .iter()
        .zip(&euler.x1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    println!("max |exact - euler| = {gap:.2e}");

    println!("mean square (exact)  {:.4}", mean_square(&exact.x1));
    println!("mean square (euler)  {:.4}", mean_square(&euler.x1));
    println!("stationary variance  {:.4}", 1.0 / (2.0 * params.theta()));
    Ok(())
}
