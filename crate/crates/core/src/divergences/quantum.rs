//! Von Neumann entropy, relative entropy and its variance, and the
//! Nussbaum–Skoła reduction to a pair of classical distributions.

use crate::divergences::classical::{ClassicalDistribution, JointLogLikelihood, LlrAtom};
use crate::error::{Error, Result};
use crate::operator::{
    log_on_support, same_dim, support_projector, trace_product, CMatrix, DensityMatrix,
    DEFAULT_SUPPORT_TOL,
};

/// Overlaps `|⟨φ_a|ψ_b⟩|²` below this are dropped from both distributions.
pub const NS_OVERLAP_CUTOFF: f64 = 1e-14;

/// `H(ρ) = −Σ λ ln λ` in nats.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum::<f64>()
        .max(0.0)
}

/// `ρ`-mass outside the support of `σ`.
pub fn mass_outside_support(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let pi = support_projector(sigma, DEFAULT_SUPPORT_TOL);
    (1.0 - rho.expectation(pi.matrix())).max(0.0)
}

/// True when `supp σ ⊇ supp ρ` up to `1e-10` of `ρ`-mass.
pub fn dominates(sigma: &DensityMatrix, rho: &DensityMatrix) -> bool {
    mass_outside_support(rho, sigma) <= DEFAULT_SUPPORT_TOL
}

/// `log ρ − log σ`, both taken on their supports.
fn log_difference(rho: &DensityMatrix, sigma: &DensityMatrix) -> CMatrix {
    log_on_support(rho).into_matrix() - log_on_support(sigma).into_matrix()
}

/// `D(ρ‖σ) = Tr ρ(log ρ − log σ)`, or `+∞` if `σ` does not dominate `ρ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    if !dominates(sigma, rho) {
        return Ok(f64::INFINITY);
    }
    let l = log_difference(rho, sigma);
    Ok(rho.expectation(&l).max(0.0))
}

/// `V(ρ‖σ) = Tr ρ(log ρ − log σ − D)²`.
pub fn relative_entropy_variance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    if !dominates(sigma, rho) {
        return Err(Error::SupportViolation(
            "relative entropy variance needs supp σ ⊇ supp ρ".into(),
        ));
    }
    let mut l = log_difference(rho, sigma);
    let dval = rho.expectation(&l);
    for i in 0..l.nrows() {
        l[(i, i)] -= dval;
    }
    let sq = &l * &l;
    Ok(trace_product(rho.matrix(), &sq).max(0.0))
}

/// Nussbaum–Skoła distributions over `[d]×[d]`, flattened as `a * d + b`:
/// `P(a,b) = r_a |⟨φ_a|ψ_b⟩|²`, `Q(a,b) = s_b |⟨φ_a|ψ_b⟩|²`.
pub fn nussbaum_skola(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<(ClassicalDistribution, ClassicalDistribution)> {
    same_dim(rho, sigma)?;
    let d = rho.dim();
    let sr = rho.spectrum();
    let ss = sigma.spectrum();
    let overlaps = sr.eigenvectors.adjoint() * &ss.eigenvectors;
    let mut p = vec![0.0; d * d];
    let mut q = vec![0.0; d * d];
    for a in 0..d {
        let r = sr.eigenvalues[a].max(0.0);
        for b in 0..d {
            let o = overlaps[(a, b)].norm_sqr();
            if o < NS_OVERLAP_CUTOFF {
                continue;
            }
            p[a * d + b] = r * o;
            q[a * d + b] = ss.eigenvalues[b].max(0.0) * o;
        }
    }
    Ok((
        ClassicalDistribution::from_trusted(p),
        ClassicalDistribution::from_trusted(q),
    ))
}

/// Log-likelihood atoms of the Nussbaum–Skoła pair, each `P`-weight scaled by `weight`.
pub(crate) fn ns_atoms(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    weight: f64,
) -> Result<Vec<LlrAtom>> {
    let (p, q) = nussbaum_skola(rho, sigma)?;
    let ll = JointLogLikelihood::new(&p, &q)?;
    Ok(ll
        .atoms()
        .iter()
        .map(|a| LlrAtom {
            p: a.p * weight,
            q: a.q * weight,
            llr: a.llr,
        })
        .collect())
}

/// First three central moments of the Nussbaum–Skoła log-likelihood: `(D, V, T)`.
pub fn ns_moments(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(f64, f64, f64)> {
    let (p, q) = nussbaum_skola(rho, sigma)?;
    let ll = JointLogLikelihood::new(&p, &q)?;
    Ok((ll.mean(), ll.variance()?, ll.third_abs_moment()?))
}
