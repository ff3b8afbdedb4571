//! Two-sided brackets on the hypothesis-testing divergence obtained from the
//! classical information spectrum of the Nussbaum–Skoła pair.

use serde::Serialize;

use crate::blocklength::normal::phi_inv;
use crate::divergences::classical::{check_eps, info_spectrum, JointLogLikelihood};
use crate::divergences::quantum::{dominates, nussbaum_skola};
use crate::error::{validation, Error, Result};
use crate::operator::{DensityMatrix, DEFAULT_SUPPORT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketVariant {
    Chebyshev,
    BerryEsseen,
}

/// Constants entering a bracket, recorded so results can be audited.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BracketConstants {
    pub delta: f64,
    /// `Ξ(σ)`, with the base-2 logarithm inside the ceiling.
    pub xi: f64,
    pub f1: f64,
    pub f2: f64,
    pub d_n: f64,
    pub v_n: f64,
    pub t_n: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DhBracket {
    pub lower: f64,
    pub upper: f64,
    pub variant: BracketVariant,
    pub constants_used: BracketConstants,
}

impl DhBracket {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lower - slack && x <= self.upper + slack
    }
}

/// `Ξ(σ) = 2⌈log₂(λ_max/λ̃_min)⌉`, with `λ̃_min` the smallest nonzero eigenvalue.
pub fn xi(sigma: &DensityMatrix) -> f64 {
    let lmax = sigma.max_eigenvalue();
    let lmin = sigma.min_nonzero_eigenvalue(DEFAULT_SUPPORT_TOL);
    xi_from_extremes(lmax, lmin)
}

pub(crate) fn xi_from_extremes(lmax: f64, lmin: f64) -> f64 {
    let r = (lmax / lmin).log2();
    // ratios within rounding of a power of two must not bump the ceiling
    let r = if (r - r.round()).abs() < 1e-12 {
        r.round()
    } else {
        r
    };
    2.0 * r.ceil().max(0.0)
}

/// `ln Ξ` as it enters the brackets, with `Ξ` floored at one (a pinching has
/// at least one block).
pub(crate) fn ln_xi(xi: f64) -> f64 {
    xi.max(1.0).ln()
}

/// `F₁(ε, δ) = ln((1−ε)(ε+3δ)/(1−(ε+3δ)))`.
pub fn f1(eps: f64, delta: f64) -> f64 {
    let a = eps + 3.0 * delta;
    ((1.0 - eps) * a / (1.0 - a)).ln()
}

/// `F₂(ε) = ln(1/(1−ε))`.
pub fn f2(eps: f64) -> f64 {
    -(1.0 - eps).ln()
}

fn check_delta(eps: f64, delta: f64) -> Result<()> {
    check_eps(eps)?;
    let limit = eps.min((1.0 - eps) / 4.0);
    if delta > 0.0 && delta < limit {
        Ok(())
    } else {
        Err(validation(format!(
            "delta must lie in (0, {limit}) for eps = {eps}, got {delta}"
        )))
    }
}

/// One-shot bracket on `D_h^eps(ρ‖σ)` from the information spectrum of the
/// Nussbaum–Skoła pair.
pub fn q_to_cl_bracket(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    delta: f64,
) -> Result<DhBracket> {
    check_delta(eps, delta)?;
    if !dominates(sigma, rho) {
        return Err(Error::SupportViolation(
            "bracket needs supp σ ⊇ supp ρ".into(),
        ));
    }
    let (p, q) = nussbaum_skola(rho, sigma)?;
    let ll = JointLogLikelihood::new(&p, &q)?;
    let x = xi(sigma);
    let lx = ln_xi(x);
    let ln_inv_delta = -(delta.ln());
    let lower = info_spectrum(&p, &q, eps - delta)? - lx - ln_inv_delta - f2(eps);
    let upper =
        info_spectrum(&p, &q, eps + 4.0 * delta)? + lx + 4.0 * ln_inv_delta + f1(eps, delta);
    Ok(DhBracket {
        lower,
        upper,
        variant: BracketVariant::Chebyshev,
        constants_used: BracketConstants {
            delta,
            xi: x,
            f1: f1(eps, delta),
            f2: f2(eps),
            d_n: ll.mean(),
            v_n: ll.variance()?,
            t_n: ll.third_abs_moment()?,
        },
    })
}

/// Per-copy moments `(D, V, T)` of one factor of a product pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CopyMoments {
    pub d: f64,
    pub v: f64,
    pub t: f64,
}

/// Bracket on `D_h^eps(⊗ρ_i ‖ σ^{⊗n})` from averaged per-copy moments.
///
/// An out-of-range normal quantile argument makes that side unbounded.
pub fn product_dh_bracket(
    per_copy: &[CopyMoments],
    sigma_xi: f64,
    n: f64,
    eps: f64,
    delta: f64,
    variant: BracketVariant,
) -> Result<DhBracket> {
    check_delta(eps, delta)?;
    if per_copy.is_empty() {
        return Err(validation("need moments for at least one copy"));
    }
    if !(n >= 1.0) {
        return Err(validation(format!("n must be at least 1, got {n}")));
    }
    let k = per_copy.len() as f64;
    let d_n = per_copy.iter().map(|m| m.d).sum::<f64>() / k;
    let v_n = per_copy.iter().map(|m| m.v).sum::<f64>() / k;
    let t_n = per_copy.iter().map(|m| m.t).sum::<f64>() / k;
    let ln_inv_delta = -(delta.ln());
    let up_corr = (n.ln() + ln_xi(sigma_xi)) + 4.0 * ln_inv_delta + f1(eps, delta);
    let lo_corr = (n.ln() + ln_xi(sigma_xi)) + ln_inv_delta + f2(eps);
    let (lower, upper) = match variant {
        BracketVariant::Chebyshev => (
            n * d_n - (n * v_n / (eps - delta)).sqrt() - lo_corr,
            n * d_n + (n * v_n / (1.0 - eps - 4.0 * delta)).sqrt() + up_corr,
        ),
        BracketVariant::BerryEsseen => {
            if !(v_n > 0.0) {
                return Err(validation("Berry-Esseen bracket needs positive variance"));
            }
            let s = (n * v_n).sqrt();
            let be = 6.0 * t_n / (n * v_n.powi(3)).sqrt();
            (
                n * d_n + s * phi_inv(eps - delta - be) - lo_corr,
                n * d_n + s * phi_inv(eps + 4.0 * delta + be) + up_corr,
            )
        }
    };
    Ok(DhBracket {
        lower,
        upper,
        variant,
        constants_used: BracketConstants {
            delta,
            xi: sigma_xi,
            f1: f1(eps, delta),
            f2: f2(eps),
            d_n,
            v_n,
            t_n,
        },
    })
}

/// True when the Berry–Esseen quantile arguments both lie in `(0, 1)`.
pub fn berry_esseen_in_range(m: CopyMoments, n: f64, eps: f64, delta: f64) -> bool {
    if !(m.v > 0.0) {
        return false;
    }
    let be = 6.0 * m.t / (n * m.v.powi(3)).sqrt();
    let lo = eps - delta - be;
    let hi = eps + 4.0 * delta + be;
    lo > 0.0 && hi < 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergences::classical::{classical_dh, ClassicalDistribution};
    use crate::divergences::hypothesis::dh;
    use crate::divergences::quantum::ns_moments;
    use crate::operator::{c, CMatrix};

    fn pair() -> (DensityMatrix, DensityMatrix) {
        let rho = DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.8, 0.0), c(0.1, 0.05), c(0.1, -0.05), c(0.2, 0.0)],
        ))
        .unwrap();
        let sigma = DensityMatrix::from_bloch(0.3, 0.0, -0.4).unwrap();
        (rho, sigma)
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(&DensityMatrix::maximally_mixed(2)), 0.0);
        assert_eq!(
            xi(&DensityMatrix::from_real_diagonal(&[0.8, 0.2]).unwrap()),
            4.0
        );
        assert_eq!(
            xi(&DensityMatrix::from_real_diagonal(&[0.7, 0.3]).unwrap()),
            4.0
        );
        assert_eq!(
            xi(&DensityMatrix::from_real_diagonal(&[0.6, 0.4]).unwrap()),
            2.0
        );
    }

    #[test]
    fn f_constants() {
        assert!((f2(0.5) - 2f64.ln()).abs() < 1e-15);
        let e: f64 = 0.1;
        let dl: f64 = 0.02;
        let expect = ((0.9 * 0.16) / 0.84f64).ln();
        assert!((f1(e, dl) - expect).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_delta() {
        let (rho, sigma) = pair();
        assert!(q_to_cl_bracket(&rho, &sigma, 0.1, 0.0).is_err());
        assert!(q_to_cl_bracket(&rho, &sigma, 0.1, 0.2).is_err());
        assert!(q_to_cl_bracket(&rho, &sigma, 0.9, 0.03).is_err());
    }

    #[test]
    fn identical_states_bracket_contains_zero() {
        let (rho, _) = pair();
        let b = q_to_cl_bracket(&rho, &rho, 0.1, 0.02).unwrap();
        assert!(b.contains(0.0, 0.0));
    }

    #[test]
    fn non_commuting_pair_contains_exact() {
        let (rho, sigma) = pair();
        let b = q_to_cl_bracket(&rho, &sigma, 0.05, 0.01).unwrap();
        let exact = dh(&rho, &sigma, 0.05).unwrap();
        assert!(
            b.contains(exact, 0.0),
            "{exact} not in [{}, {}]",
            b.lower,
            b.upper
        );
    }

    #[test]
    fn commuting_pair_contains_classical() {
        let rho = DensityMatrix::from_real_diagonal(&[0.7, 0.2, 0.1]).unwrap();
        let sigma = DensityMatrix::from_real_diagonal(&[0.3, 0.3, 0.4]).unwrap();
        let p = ClassicalDistribution::new(vec![0.7, 0.2, 0.1]).unwrap();
        let q = ClassicalDistribution::new(vec![0.3, 0.3, 0.4]).unwrap();
        for eps in [0.1, 0.5] {
            let b = q_to_cl_bracket(&rho, &sigma, eps, 0.05).unwrap();
            assert!(b.contains(classical_dh(&p, &q, eps).unwrap(), 0.0));
        }
    }

    #[test]
    fn zero_variance_chebyshev_collapses() {
        let m = CopyMoments {
            d: 0.5,
            v: 0.0,
            t: 0.0,
        };
        let n: f64 = 100.0;
        let (eps, delta) = (0.1, 0.02);
        let b = product_dh_bracket(&[m], 4.0, n, eps, delta, BracketVariant::Chebyshev).unwrap();
        let logs_up = (n * 4.0).ln() + 4.0 * (1.0 / delta).ln() + f1(eps, delta);
        let logs_lo = (n * 4.0).ln() + (1.0 / delta).ln() + f2(eps);
        assert!((b.upper - (50.0 + logs_up)).abs() < 1e-12);
        assert!((b.lower - (50.0 - logs_lo)).abs() < 1e-12);
        assert!(product_dh_bracket(&[m], 4.0, n, eps, delta, BracketVariant::BerryEsseen).is_err());
    }

    #[test]
    fn width_scales_like_sqrt_n() {
        let (rho, sigma) = pair();
        let (d, v, t) = ns_moments(&rho, &sigma).unwrap();
        let m = CopyMoments { d, v, t };
        let eps: f64 = 0.1;
        let expect = v.sqrt() * (1.0 / (1.0 - eps).sqrt() + 1.0 / eps.sqrt());
        let mut last_err = f64::INFINITY;
        for n in [1e2f64, 1e4, 1e6] {
            let delta = 1.0 / n.sqrt().max(100.0);
            let b = product_dh_bracket(&[m], xi(&sigma), n, eps, delta, BracketVariant::Chebyshev)
                .unwrap();
            let err = ((b.upper - b.lower) / n.sqrt() - expect).abs();
            assert!(err < last_err);
            last_err = err;
        }
        assert!(last_err < 0.05 * expect);
    }
}
