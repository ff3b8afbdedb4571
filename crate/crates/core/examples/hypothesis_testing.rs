//! Hypothesis-testing divergence of qubit tensor powers next to the
//! second-order brackets built from single-copy moments.
//!
//! The exact values come from the Schur–Weyl block decomposition, so they stay
//! cheap up to the `2^10` budget.

use cqrate::blocklength::tensor::iid_dh_exact;
use cqrate::divergences::bracket::{
    berry_esseen_in_range, product_dh_bracket, xi, BracketVariant, CopyMoments,
};
use cqrate::divergences::quantum::{ns_moments, relative_entropy, relative_entropy_variance};
use cqrate::DensityMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rho = DensityMatrix::from_bloch(0.3, 0.1, 0.6)?;
    let sigma = DensityMatrix::from_bloch(-0.2, 0.4, 0.1)?;
    let (d, v, t) = ns_moments(&rho, &sigma)?;
    println!(
        "D = {:.6} nats, V = {:.6}, T = {:.6}  (direct: D = {:.6}, V = {:.6})",
        d,
        v,
        t,
        relative_entropy(&rho, &sigma)?,
        relative_entropy_variance(&rho, &sigma)?
    );
    let m = CopyMoments { d, v, t };
    let x = xi(&sigma);
    let eps: f64 = 0.25;
    let delta = 0.5 * eps.min((1.0 - eps) / 4.0);
    println!("eps = {eps}, delta = {delta:.4}");
    println!(
        "{:>3} {:>12} {:>24} {:>24}",
        "n", "exact", "Chebyshev", "Berry-Esseen"
    );
    for n in 1..=10 {
        let nf = n as f64;
        let exact = iid_dh_exact(&rho, &sigma, n, eps)?;
        let cheb = product_dh_bracket(&[m], x, nf, eps, delta, BracketVariant::Chebyshev)?;
        let be = if berry_esseen_in_range(m, nf, eps, delta) {
            let b = product_dh_bracket(&[m], x, nf, eps, delta, BracketVariant::BerryEsseen)?;
            format!("[{:.3}, {:.3}]", b.lower, b.upper)
        } else {
            "out of range".to_string()
        };
        println!(
            "{:>3} {:>12.6} {:>24} {:>24}",
            n,
            exact,
            format!("[{:.3}, {:.3}]", cheb.lower, cheb.upper),
            be
        );
    }
    Ok(())
}
