//! Quantum Neyman–Pearson tests and the hypothesis-testing divergence.
//!
//! The optimal test for type-I error `eps` lies in the family
//! `Q(t, x) = {ρ − tσ > 0} + x·{ρ − tσ = 0}`. We bisect on `t` and fix `x`
//! in closed form. Block-diagonal inputs are supported directly so that
//! symmetric tensor powers never need to be expanded.

use crate::divergences::classical::{check_eps, dh_from_beta};
use crate::error::{check_dims, Result};
use crate::operator::{DensityMatrix, HermitianOperator};

/// Relative threshold below which an eigenvalue of `ρ − tσ` counts as zero.
pub const NP_ZERO_TOL: f64 = 1e-10;
/// Bisection stops once the bracket on `t` is this narrow relative to `t`.
pub const NP_T_REL_TOL: f64 = 1e-13;
/// Stop once the two type-I masses bracketing the target differ by less.
pub const NP_TYPE_I_GAP: f64 = 1e-12;
pub const NP_MAX_ITER: usize = 200;

/// One block `(m, R, S)` of a block-diagonal pair `⊕ (R ⊗ 1_m)`, `⊕ (S ⊗ 1_m)`.
///
/// `R` and `S` are positive semi-definite but need not have unit trace; only
/// the totals `Σ m Tr R` and `Σ m Tr S` are expected to be one.
#[derive(Clone, Debug)]
pub struct NpBlock {
    pub multiplicity: f64,
    pub rho: HermitianOperator,
    pub sigma: HermitianOperator,
}

impl NpBlock {
    pub fn new(
        multiplicity: f64,
        rho: HermitianOperator,
        sigma: HermitianOperator,
    ) -> Result<Self> {
        check_dims(rho.dim(), sigma.dim())?;
        Ok(Self {
            multiplicity,
            rho,
            sigma,
        })
    }
}

/// Masses of the test projectors at one value of `t`.
#[derive(Clone, Copy, Debug, Default)]
struct Level {
    /// `Tr(Π_> ρ)`, `Tr(Π_≥ ρ)`, `Tr(Π_> σ)`, `Tr(Π_≥ σ)`.
    rho_gt: f64,
    rho_ge: f64,
    sigma_gt: f64,
    sigma_ge: f64,
}

struct Prepared<'a> {
    block: &'a NpBlock,
    rho_max: f64,
    sigma_max: f64,
}

fn level(blocks: &[Prepared<'_>], t: f64) -> Level {
    let mut out = Level::default();
    for b in blocks {
        let a = b.block.rho.matrix().clone() - b.block.sigma.matrix().scale(t);
        let spec = HermitianOperator::symmetrized(a).eig();
        let tol = NP_ZERO_TOL * (b.rho_max + t * b.sigma_max).max(f64::MIN_POSITIVE);
        let rd = spec.diagonal_of(b.block.rho.matrix());
        let sd = spec.diagonal_of(b.block.sigma.matrix());
        let m = b.block.multiplicity;
        for (k, &lam) in spec.eigenvalues.iter().enumerate() {
            if lam > tol {
                out.rho_gt += m * rd[k];
                out.sigma_gt += m * sd[k];
            }
            if lam >= -tol {
                out.rho_ge += m * rd[k];
                out.sigma_ge += m * sd[k];
            }
        }
    }
    out
}

/// Result of a Neyman–Pearson search, with the threshold that was found.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NpOutcome {
    pub beta: f64,
    /// Likelihood threshold `t` of the final test.
    pub threshold: f64,
    pub iterations: usize,
}

/// Optimal type-II error for a block-diagonal pair.
pub fn quantum_beta_blocks(blocks: &[NpBlock], eps: f64) -> Result<NpOutcome> {
    check_eps(eps)?;
    if blocks.is_empty() {
        return Err(crate::error::validation("no blocks supplied"));
    }
    let alpha = 1.0 - eps;
    let mut prepared = Vec::with_capacity(blocks.len());
    let mut t_hi: f64 = 1.0;
    let mut outside = 0.0;
    for b in blocks {
        if b.multiplicity <= 0.0 {
            continue;
        }
        let rs = b.rho.eigenvalues();
        let ss = b.sigma.eig();
        let rho_max = rs[0].max(0.0);
        let sigma_max = ss.eigenvalues[0].max(0.0);
        let s_tol = NP_ZERO_TOL * sigma_max.max(rho_max);
        let s_min = ss
            .eigenvalues
            .iter()
            .copied()
            .filter(|&x| x > s_tol)
            .fold(f64::INFINITY, f64::min);
        let ker = ss.projector(|x| x <= s_tol);
        outside += b.multiplicity * b.rho.trace_product(&ker);
        if s_min.is_finite() && rho_max > 0.0 {
            t_hi = t_hi.max(rho_max / s_min + 1.0);
        }
        prepared.push(Prepared {
            block: b,
            rho_max,
            sigma_max,
        });
    }
    if outside >= alpha {
        return Ok(NpOutcome {
            beta: 0.0,
            threshold: f64::INFINITY,
            iterations: 0,
        });
    }

    let mut iterations = 0;
    let mut hi = level(&prepared, t_hi);
    while hi.rho_gt > alpha && iterations < NP_MAX_ITER {
        t_hi *= 2.0;
        hi = level(&prepared, t_hi);
        iterations += 1;
    }
    let mut t_lo = 0.0;
    let mut lo = level(&prepared, 0.0);
    if lo.rho_gt <= alpha {
        // ρ itself has no mass to spare above the target; the closed form at t=0 applies.
        return Ok(finish(lo, alpha, 0.0, iterations));
    }
    if hi.rho_ge >= alpha {
        return Ok(finish(hi, alpha, t_hi, iterations));
    }

    while iterations < NP_MAX_ITER {
        iterations += 1;
        let t = if t_lo > 0.0 && t_hi / t_lo > 4.0 {
            (t_lo * t_hi).sqrt()
        } else if t_lo == 0.0 {
            t_hi / 16.0
        } else {
            0.5 * (t_lo + t_hi)
        };
        let cur = level(&prepared, t);
        if cur.rho_gt > alpha {
            t_lo = t;
            lo = cur;
        } else if cur.rho_ge < alpha {
            t_hi = t;
            hi = cur;
        } else {
            return Ok(finish(cur, alpha, t, iterations));
        }
        if (t_hi - t_lo) <= NP_T_REL_TOL * t_hi || (lo.rho_gt - hi.rho_ge) < NP_TYPE_I_GAP {
            break;
        }
    }
    // Mix Π_>(t_lo) (type-I mass above target) with Π_≥(t_hi) (below target).
    let span = lo.rho_gt - hi.rho_ge;
    let lam = if span > 0.0 {
        ((alpha - hi.rho_ge) / span).clamp(0.0, 1.0)
    } else {
        0.5
    };
    let beta = lam * lo.sigma_gt + (1.0 - lam) * hi.sigma_ge;
    Ok(NpOutcome {
        beta: beta.clamp(0.0, alpha),
        threshold: 0.5 * (t_lo + t_hi),
        iterations,
    })
}

fn finish(l: Level, alpha: f64, t: f64, iterations: usize) -> NpOutcome {
    let span = l.rho_ge - l.rho_gt;
    let x = if span > 0.0 {
        ((alpha - l.rho_gt) / span).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let beta = l.sigma_gt + x * (l.sigma_ge - l.sigma_gt);
    NpOutcome {
        beta: beta.clamp(0.0, alpha),
        threshold: t,
        iterations,
    }
}

/// `min Tr(Qσ)` over tests `0 ≤ Q ≤ 1` with `Tr(Qρ) ≥ 1 − eps`.
pub fn quantum_beta(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let block = NpBlock::new(1.0, rho.operator().clone(), sigma.operator().clone())?;
    Ok(quantum_beta_blocks(&[block], eps)?.beta)
}

/// `D_h^eps(ρ‖σ) = −ln(β/(1−eps))`, `+∞` when `β = 0`.
pub fn dh(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<f64> {
    let beta = quantum_beta(rho, sigma, eps)?;
    Ok(dh_from_beta(beta, eps))
}

/// [`dh`] for a block-diagonal pair.
pub fn dh_blocks(blocks: &[NpBlock], eps: f64) -> Result<f64> {
    let beta = quantum_beta_blocks(blocks, eps)?.beta;
    Ok(dh_from_beta(beta, eps))
}
