//! Sum-of-squares decomposition through Gram matrices: a certifiable
//! polynomial yields an explicit list of squares, and the Motzkin
//! polynomial (nonnegative but not SOS) is refused with a certificate.
//!
//!     cargo run --example sos_gram

use vecstab::poly::{Monomial, Polynomial, VarId};
use vecstab::sdp::{SdpSettings, SdpStatus};
use vecstab::sosprog::{SosExpression, SosProgram};

fn main() {
    let x = VarId(0);
    let y = VarId(1);

    // p = 2x^4 + 2x^3 y - x^2 y^2 + 5y^4, a standard SOS-representable
    // quartic. "p is SOS" becomes: find a PSD Gram matrix Q with
    // p = z' Q z over the monomial basis z of degrees 1..=2.
    let p = Polynomial::from_terms(vec![
        (2.0, Monomial::from_exps(&[(x, 4)])),
        (2.0, Monomial::from_exps(&[(x, 3), (y, 1)])),
        (-1.0, Monomial::from_exps(&[(x, 2), (y, 2)])),
        (5.0, Monomial::from_exps(&[(y, 4)])),
    ]);
    let mut prog = SosProgram::new();
    let c = prog.require_sos(SosExpression::new(p.clone()));
    let compiled = prog.compile().unwrap();
    println!(
        "p = {p}\nGram basis: {:?}",
        compiled
            .gram_basis(c)
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
    );
    let sol = compiled.solve(&SdpSettings::default()).unwrap();
    println!("status: {:?}", sol.status);

    // The eigendecomposition of Q turns the abstract certificate into
    // explicit squares: p = sum h_k^2.
    let squares = compiled.extract_certificate(&sol.sdp, c).unwrap();
    println!("decomposition into {} squares:", squares.len());
    let mut recon = Polynomial::zero();
    for h in &squares {
        println!("  ({h})^2");
        recon = &recon + &(h * h);
    }
    // .max(0.0) dodges the -0.0 that f64 summation yields on empty input.
    let err = (&recon - &p).coeff_l1().max(0.0);
    println!("reconstruction |error|_1 = {err:.3e}");
    assert!(err < 1e-6);

    // Motzkin: x^4 y^2 + x^2 y^4 - 3 x^2 y^2 + 1 is nonnegative on all of
    // R^2 (AM-GM) yet has no SOS decomposition. The compiled SDP is
    // infeasible, which here is a theorem, not a numerical accident.
    let motzkin = Polynomial::from_terms(vec![
        (1.0, Monomial::from_exps(&[(x, 4), (y, 2)])),
        (1.0, Monomial::from_exps(&[(x, 2), (y, 4)])),
        (-3.0, Monomial::from_exps(&[(x, 2), (y, 2)])),
        (1.0, Monomial::one()),
    ]);
    let mut prog = SosProgram::new();
    prog.require_sos(SosExpression::new(motzkin.clone()));
    let sol = prog.compile().unwrap().solve(&SdpSettings::default()).unwrap();
    println!("\nMotzkin polynomial: {motzkin}");
    println!("SOS feasibility status: {:?}", sol.status);
    assert_eq!(sol.status, SdpStatus::Infeasible);
}
