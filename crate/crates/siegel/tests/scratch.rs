use siegel::herman::{conjugacy_samples, modulus_estimate, solve_lambda, CircleFamily};
use siegel::GOLDEN_MEAN;
use std::time::Instant;

#[test]
fn probe_modulus_stability() {
    let t0 = Instant::now();
    let fam = CircleFamily::blaschke(4.0, 0.0).unwrap();
    let sol = solve_lambda(&fam, GOLDEN_MEAN, 1e-8).unwrap();
    let fam = fam.with_lambda(sol.lambda);
    let mut values = Vec::new();
    for n in [4096usize, 8192] {
        let samples = conjugacy_samples(&fam, n).unwrap();
        let r = modulus_estimate(&samples, None).unwrap();
        println!("n={n}: r={r:.6}");
        values.push(r);
    }
    let rel = (values[1] - values[0]).abs() / values[0];
    println!("relative change {:.3}% total {:?}", 100.0 * rel, t0.elapsed());
}
