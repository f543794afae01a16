//! Constrained positivity via multipliers: certify that a polynomial is
//! nonnegative on a sublevel set by writing
//!
//!   p - sigma * (gamma - g)  is SOS,   sigma is SOS,
//!
//! so on {g <= gamma} the subtracted term is <= p. The compiler turns both
//! unknowns into Gram blocks of one block-diagonal SDP.
//!
//!     cargo run --example s_procedure

use vecstab::poly::{Monomial, Polynomial, VarId};
use vecstab::sdp::{SdpSettings, SdpStatus};
use vecstab::sosprog::{Sign, SosExpression, SosProgram};

/// q - sigma (gamma - x^2) with a fresh degree-2 multiplier.
fn on_disc(prog: &mut SosProgram, q: &Polynomial, gamma: f64) -> usize {
    let x = VarId(0);
    let g = Polynomial::term(1.0, Monomial::from_exps(&[(x, 2)]));
    let sigma = prog.sos_poly("sigma", &[x], 2).unwrap();
    let mut e = SosExpression::new(q.clone());
    let level = &Polynomial::constant(gamma) - &g;
    e.add_sos(sigma, &level.scale(-1.0));
    prog.require_sos(e)
}

fn main() {
    let x = VarId(0);

    // q = 3/2 - x^2 is negative for |x| > sqrt(3/2), so it is not SOS and
    // no unconstrained certificate exists. On the disc {x^2 <= 1} it stays
    // above 1/2, and sigma = 1 exhibits that: q - 1 * (1 - x^2) = 1/2.
    let q = Polynomial::from_terms(vec![
        (1.5, Monomial::one()),
        (-1.0, Monomial::from_exps(&[(x, 2)])),
    ]);
    let mut prog = SosProgram::new();
    on_disc(&mut prog, &q, 1.0);
    let sol = prog.compile().unwrap().solve(&SdpSettings::default()).unwrap();
    println!("q = {q} on {{x^2 <= 1}}: {:?}", sol.status);
    assert_eq!(sol.status, SdpStatus::Optimal);

    // Enlarging the set past sqrt(3/2) admits points with q < 0, so no
    // multiplier of any degree can work; the compiled SDP is infeasible.
    let mut prog = SosProgram::new();
    on_disc(&mut prog, &q, 4.0);
    let sol = prog.compile().unwrap().solve(&SdpSettings::default()).unwrap();
    println!("q = {q} on {{x^2 <= 4}}: {:?}", sol.status);
    assert_eq!(sol.status, SdpStatus::Infeasible);

    // The same machinery optimizes. The worst value of q on the disc is
    // found by maximizing the margin m with q - m >= 0 there:
    // min over {x^2 <= 1} of q is 1/2, attained at the boundary.
    let mut prog = SosProgram::new();
    let m = prog.scalar("margin", Sign::Free);
    let g = Polynomial::term(1.0, Monomial::from_exps(&[(x, 2)]));
    let sigma = prog.sos_poly("sigma", &[x], 2).unwrap();
    let mut e = SosExpression::new(q.clone());
    e.add_scalar(m, &Polynomial::constant(-1.0));
    let level = &Polynomial::constant(1.0) - &g;
    e.add_sos(sigma, &level.scale(-1.0));
    let c = prog.require_sos(e);
    prog.maximize(&[(m, 1.0)]);
    let compiled = prog.compile().unwrap();
    let sol = compiled.solve(&SdpSettings::default()).unwrap();
    println!(
        "max m with q - m >= 0 on the disc: {:.9} ({:?})",
        sol.objective, sol.status
    );
    assert!((sol.objective - 0.5).abs() < 1e-6);

    // At the optimum the realized identity can be read back: the Gram
    // residual shows how tightly q - m - sigma (1 - x^2) matched an SOS.
    let sigma_val = compiled.sos_value(&sol.sdp, sigma);
    println!("multiplier sigma = {sigma_val}");
    let realized = compiled.realized(&sol.sdp, c);
    println!("constraint polynomial at the optimum = {realized}");

    let sdp = compiled.sdp();
    println!(
        "compiled SDP: blocks {:?}, {} free parameters",
        sdp.block_sizes(),
        sdp.num_vars()
    );
}
