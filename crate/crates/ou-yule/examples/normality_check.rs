//! Monte Carlo check of the central limit theorem for the standardized
//! statistic: histogram, moments, and the Kolmogorov distance to the
//! standard normal.

use ou_yule::mc_harness::{histogram, kolmogorov_distance, run_mc, summarize, McConfig, MeshSpec, Statistic};
use ou_yule::normal::norm_cdf;
use ou_yule::ou_sim::Scheme;

fn main() -> ou_yule::Result<()> {
    let config = McConfig {
        theta: 2.0,
        n: 50_000,
        mesh: MeshSpec::Lambda(0.6),
        replications: 400,
        master_seed: 42,
        scheme: Scheme::Exact,
        statistic: Statistic::Psi,
        workers: None,
    };
    let run = run_mc(&config)?;
    let s = summarize(&run.values)?;
    println!(
        "psi over {} replications: mean={:+.4} median={:+.4} stddev={:.4}",
        s.count, s.mean, s.median, s.stddev
    );

    let ks = kolmogorov_distance(&run.values)?;
    println!(
        "Kolmogorov distance to N(0,1): {:.4} at x={:+.3}",
        ks.distance, ks.location
    );

    let h = histogram(&run.values, 15)?;
    println!("{:>8} {:>8} {:>6}  {:>6}", "left", "right", "count", "Phi");
    for (i, &c) in h.counts.iter().enumerate() {
        let (a, b) = (h.edges[i], h.edges[i + 1]);
        // expected bin mass under the limit law, for eyeballing the fit
        let expect = (norm_cdf(b) - norm_cdf(a)) * s.count as f64;
        let bar = "#".repeat(c / 2);
        println!("{a:>+8.2} {b:>+8.2} {c:>6}  {expect:>6.1} {bar}");
    }
    Ok(())
}
