//! The embedded primal-dual interior-point solver on two small cone
//! programs: a smallest-eigenvalue problem with a known answer, and an
//! infeasible problem returning a Farkas certificate.
//!
//!     cargo run --example sdp_interior_point

use vecstab::linalg::Mat;
use vecstab::sdp::{solve, SdpProblem, SdpSettings, SdpStatus};

fn main() {
    // The solver takes  min c'x  s.t.  sum_k x_k A_k - C >= 0.
    // With  A_0 = I, C = S:  min t  s.t.  t I >= S  is the top eigenvalue.
    let s = Mat::from_rows(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 5.0]])
        .unwrap();
    let mut p = SdpProblem::new(vec![3], 1);
    p.set_objective(0, 1.0);
    for i in 0..3 {
        p.add_constraint_entry(0, 0, i, i, 1.0);
        for j in i..3 {
            p.add_offset_entry(0, i, j, s.get(i, j));
        }
    }
    let mut settings = SdpSettings::default();
    settings.trace = true;
    let sol = solve(&p, &settings).unwrap();
    println!("largest-eigenvalue SDP:");
    println!("  status     = {:?}", sol.status);
    println!("  iterations = {}", sol.iterations);
    println!("  lambda_max = {:.12}", sol.objective_value);
    println!("  slack eig  = {:.3e} (>= 0 up to tolerance)", sol.slack_min_eig);
    for (k, it) in sol.trace.iter().enumerate() {
        println!(
            "    iter {k:2}: mu = {:9.3e}  gap = {:9.3e}",
            it.mu,
            (it.primal_obj - it.dual_obj).abs()
        );
    }
    // sym_eigen sorts descending, so the reference is the first entry.
    let exact = vecstab::linalg::sym_eigen(&s).0[0];
    println!("  Jacobi reference = {exact:.12}");
    assert!((sol.objective_value - exact).abs() < 1e-7);

    // Feasibility-only problem with an empty feasible set:
    //   find x  s.t.  diag(x - 1, -x - 1) >= 0
    // needs x >= 1 and x <= -1 at once. The solver proves this impossible
    // and hands back a dual certificate Z >= 0 with <A_k, Z> = 0, <C, Z> > 0.
    let mut q = SdpProblem::new(vec![1, 1], 1);
    q.add_constraint_entry(0, 0, 0, 0, 1.0);
    q.add_offset_entry(0, 0, 0, 1.0);
    q.add_constraint_entry(0, 1, 0, 0, -1.0);
    q.add_offset_entry(1, 0, 0, 1.0);
    let sol = solve(&q, &SdpSettings::default()).unwrap();
    println!("\ncontradictory interval program:");
    println!("  status = {:?}", sol.status);
    assert_eq!(sol.status, SdpStatus::Infeasible);
    let z = sol.farkas.expect("infeasible solves carry a certificate");
    let pairing = z.get(0, 0, 0) * 1.0 + z.get(1, 0, 0) * (-1.0);
    println!(
        "  Farkas certificate: Z = diag({:.6}, {:.6}), <A, Z> = {pairing:.2e}",
        z.get(0, 0, 0),
        z.get(1, 0, 0)
    );
    assert!(pairing.abs() < 1e-6);
}
