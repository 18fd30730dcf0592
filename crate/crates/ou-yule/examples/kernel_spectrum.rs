//! Discretizes the quadratic-variation kernel, prints its leading
//! eigenvalues, and verifies the trace, variance, and contraction identities
//! that tie the spectrum back to the closed forms.

use ou_yule::analytic::{mu_theta, var_ft};
use ou_yule::chaos_kernel::{
    contraction_bound, contraction_norm_sq, h_tilde_eval, k_t_eval, l2_norm_sq_extrapolated,
    nystrom_spectrum, Domain, KernelGrid,
};

fn main() -> ou_yule::Result<()> {
    let (theta, t) = (1.0, 10.0);
    let m = 512;

    // full spectrum: truncating before the sums would drop tail mass from
    // the trace
    let grid = KernelGrid::midpoint(Domain::PositiveT, t, m)?;
    let spectrum = nystrom_spectrum(|x, y| k_t_eval(theta, t, x, y), &grid, m)?;

    println!("top eigenvalues of k_T (theta={theta}, T={t}):");
    for (i, l) in spectrum.lambdas.iter().take(8).enumerate() {
        println!("  lambda_{i} = {l:.6}");
    }

    let trace_target = mu_theta(theta, t)? / (2.0 * theta);
    println!(
        "trace      {:.8}  closed form {:.8}",
        spectrum.trace, trace_target
    );

    // E[F_T^2] = T sum lambda^2 through this kernel
    let var_target = var_ft(theta, t)?;
    println!(
        "variance   {:.8}  closed form {:.8}",
        t * spectrum.hs_norm_sq,
        var_target
    );

    // same variance through the scoring kernel on the symmetric square
    let two_h2 = 2.0 * l2_norm_sq_extrapolated(
        |x, y| h_tilde_eval(theta, t, x, y),
        Domain::SymmetricTT,
        t,
        1024,
    )?;
    println!("2|h~|^2    {two_h2:.8}");

    let cgrid = KernelGrid::midpoint(Domain::SymmetricTT, t, 256)?;
    let c = contraction_norm_sq(theta, t, &cgrid);
    let cb = contraction_bound(theta, t)?;
    println!("contraction {c:.4e} <= bound {cb:.4e}");
    Ok(())
}
