//! Fixed-step Runge-Kutta simulation against a certificate: integrate the
//! full nonlinear network and the linear comparison system side by side and
//! confirm the promised ordering V_i(x_i(t)) <= w_i(t).
//!
//!     cargo run --example trajectory_domination

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vecstab::comparison::direct_matrix;
use vecstab::lyap::analyze_subsystem;
use vecstab::network::vdp_benchmark;
use vecstab::sim::{
    integrate_comparison, integrate_network, sample_in_domain, verify_domination, DEFAULT_STEP,
};

fn main() {
    let net = vdp_benchmark(42);
    let lyap: Vec<_> = net
        .subsystems()
        .iter()
        .map(|s| analyze_subsystem(s).unwrap().lyapunov)
        .collect();
    let gamma0 = vec![0.1; net.len()];
    let cert = direct_matrix(&net, &lyap, &gamma0).unwrap().certificate;
    assert!(cert.certified(), "benchmark certifies at this level");
    println!(
        "certificate: max row sum {:+.4}, max Re lambda {:+.4}",
        cert.max_row_sum(),
        cert.max_re_lambda
    );

    // Random start inside the product level set D = {V_i <= 0.1 for all i}.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x0 = sample_in_domain(&net, &lyap, &gamma0, &mut rng);

    let horizon = 20.0;
    let report = verify_domination(&net, &lyap, &cert.a, &gamma0, &x0, horizon, DEFAULT_STEP)
        .unwrap();
    println!(
        "domination over [0, {horizon}]: ok = {}, max excess = {:+.3e}",
        report.ok, report.max_excess
    );
    assert!(report.ok);

    // A few sampled instants of the race. w starts at the levels gamma0
    // regardless of where inside D the state starts, so the bound leads
    // from the first step.
    let trace = &report.trace;
    println!("\n   t      max_i V_i   max_i w_i");
    for &t in &[0.0, 1.0, 2.0, 5.0, 10.0, 20.0] {
        let k = ((t / DEFAULT_STEP).round() as usize).min(trace.times.len() - 1);
        let v = trace.levels[k].iter().cloned().fold(f64::MIN, f64::max);
        let w = trace.comparison.as_ref().unwrap()[k]
            .iter()
            .cloned()
            .fold(f64::MIN, f64::max);
        println!("  {:5.1}   {v:.3e}   {w:.3e}", trace.times[k]);
    }

    // The state itself contracts to the origin; the comparison system
    // answers "how fast" without ever seeing the nonlinear dynamics again.
    let traj = integrate_network(&net, &x0, horizon, DEFAULT_STEP).unwrap();
    let norm = |x: &[f64]| x.iter().map(|c| c * c).sum::<f64>().sqrt();
    println!(
        "\n|x(0)| = {:.4}  ->  |x({horizon})| = {:.3e}",
        norm(&x0),
        norm(traj.last_state())
    );

    let w = integrate_comparison(&cert.a, &gamma0, horizon, DEFAULT_STEP).unwrap();
    println!(
        "predicted level bound at t = {horizon}: {:.3e}",
        w.last_state().iter().cloned().fold(f64::MIN, f64::max)
    );

    // Fixed steps mean both solutions live on one shared grid; the check
    // above compared them pointwise with no interpolation anywhere.
    assert_eq!(traj.times.len(), w.times.len());
    println!("\nshared grid: {} samples at h = {DEFAULT_STEP}", traj.times.len());
}
