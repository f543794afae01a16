//! Dense eigenvalue computation: Hessenberg reduction followed by shifted
//! QR iteration, the routine behind every Hurwitz verdict in the crate.
//!
//!     cargo run --example eigenvalues_qr

use vecstab::linalg::{eigenvalues, max_re, sym_eigen, Mat};

fn main() {
    // A companion matrix carries its characteristic polynomial on its face:
    // z^3 - 6z^2 + 11z - 6 = (z-1)(z-2)(z-3).
    let companion = Mat::from_rows(&[
        vec![0.0, 0.0, 6.0],
        vec![1.0, 0.0, -11.0],
        vec![0.0, 1.0, 6.0],
    ])
    .unwrap();
    let mut eigs = eigenvalues(&companion).unwrap();
    eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    println!("companion matrix spectrum (expect 1, 2, 3):");
    for e in &eigs {
        println!("  {:+.12} {:+.12}i", e.re, e.im);
    }

    // Complex pairs come out of the real Schur form's 2x2 blocks.
    let rotation = Mat::from_rows(&[vec![-0.5, 2.0], vec![-2.0, -0.5]]).unwrap();
    let eigs = eigenvalues(&rotation).unwrap();
    println!("\ndamped rotation (expect -0.5 +/- 2i):");
    for e in &eigs {
        println!("  {:+.12} {:+.12}i", e.re, e.im);
    }

    // The spectral abscissa decides exponential stability of the linear
    // comparison system w' = A w.
    let metzler = Mat::from_rows(&[
        vec![-1.0, 0.4, 0.1],
        vec![0.3, -1.2, 0.2],
        vec![0.1, 0.3, -0.9],
    ])
    .unwrap();
    let spectrum = eigenvalues(&metzler).unwrap();
    let abscissa = max_re(&spectrum);
    println!("\nMetzler comparison matrix:");
    println!("  max Re(lambda) = {abscissa:+.12}");
    println!("  Hurwitz        = {}", abscissa < 0.0);
    // For Metzler matrices the abscissa is a real eigenvalue and is bounded
    // above by the largest row sum.
    let max_row_sum = (0..3)
        .map(|i| metzler.row(i).iter().sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    println!("  max row sum    = {max_row_sum:+.12} (upper bound)");
    assert!(abscissa <= max_row_sum + 1e-12);

    // Symmetric matrices go through Jacobi iteration instead: eigenvalues
    // descending plus an orthonormal eigenbasis.
    let sym = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]])
        .unwrap();
    let (vals, vecs) = sym_eigen(&sym);
    println!("\nsymmetric tridiagonal eigenvalues: {vals:.12?}");
    // Residual ||A q - lambda q|| checks the pair.
    for (k, &lam) in vals.iter().enumerate() {
        let q: Vec<f64> = (0..3).map(|i| vecs.get(i, k)).collect();
        let aq = sym.matvec(&q);
        let resid = aq
            .iter()
            .zip(&q)
            .map(|(a, b)| (a - lam * b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-10, "residual {resid}");
    }
    println!("eigenpair residuals all below 1e-10");
}
