//! Sparse multivariate polynomial arithmetic: construction, products,
//! differentiation, and the Lie derivative that drives every certificate
//! in this crate.
//!
//!     cargo run --example poly_arithmetic

use vecstab::poly::{lie_derivative, monomials_in_degree_range, Monomial, Polynomial, VarId};

fn main() {
    let x = VarId(0);
    let y = VarId(1);

    // p = x^2 + 2xy + 3y^2, q = x - y
    let p = Polynomial::from_terms(vec![
        (1.0, Monomial::from_exps(&[(x, 2)])),
        (2.0, Monomial::from_exps(&[(x, 1), (y, 1)])),
        (3.0, Monomial::from_exps(&[(y, 2)])),
    ]);
    let q = &Polynomial::var(x) - &Polynomial::var(y);
    println!("p       = {p}");
    println!("q       = {q}");
    println!("p + q   = {}", &p + &q);
    println!("p * q   = {}", &p * &q);
    println!("deg p*q = {}", (&p * &q).degree());

    // Sparse representation: terms are stored once, sorted, without zeros.
    let cancel = &(&p * &q) - &(&q * &p);
    assert!(cancel.is_zero());
    println!("p*q - q*p is the zero polynomial: {}", cancel.is_zero());

    println!();
    println!("dp/dx   = {}", p.differentiate(x));
    println!("grad p  = {:?}", p.gradient(&[x, y]).iter().map(|g| g.to_string()).collect::<Vec<_>>());

    // Lie derivative of V along a vector field: the decrease quantity every
    // Lyapunov argument is built from. Here V = x^2 + y^2 along the stable
    // spiral (x' = -x + y, y' = -x - y), giving dV/dt = -2V.
    let v = &(&Polynomial::var(x) * &Polynomial::var(x))
        + &(&Polynomial::var(y) * &Polynomial::var(y));
    let field = vec![
        &Polynomial::term(-1.0, Monomial::var(x)) + &Polynomial::var(y),
        &Polynomial::term(-1.0, Monomial::var(x)) - &Polynomial::var(y),
    ];
    let vdot = lie_derivative(&v, &[x, y], &field);
    println!();
    println!("V       = {v}");
    println!("dV/dt   = {vdot}");
    assert!(vdot.approx_eq(&v.scale(-2.0), 1e-12));

    // Evaluation agrees between the sparse map interface and the dense
    // positional one used in the integrator hot loop.
    let at = [(x, 0.7), (y, -1.3)].into_iter().collect();
    let dense = [0.7, -1.3];
    println!();
    println!("p(0.7, -1.3) = {}", p.evaluate(&at).unwrap());
    assert_eq!(p.evaluate(&at).unwrap(), p.eval_dense(&dense));

    // Monomial bases back the Gram matrices in the SOS layer.
    let basis = monomials_in_degree_range(&[x, y], 1, 2);
    println!(
        "monomials of degree 1..=2 in (x, y): {:?}",
        basis.iter().map(|m| m.to_string()).collect::<Vec<_>>()
    );
}
