//! Finite classical distributions, log-likelihood ratios and the classical
//! Neyman–Pearson test.

use std::cmp::Ordering;

use crate::error::{check_dims, validation, Error, Result};

/// Log-ratios closer than this are merged into one atom before any scan.
pub const LLR_MERGE_TOL: f64 = 1e-12;

/// Probability weights over a finite alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalDistribution {
    weights: Vec<f64>,
}

impl ClassicalDistribution {
    /// Weights must be nonnegative and sum to one within `1e-10`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(validation("distribution needs at least one atom"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(validation(format!("invalid probability weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(validation(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { weights })
    }

    pub(crate) fn from_trusted(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            weights: vec![1.0 / k as f64; k],
        }
    }

    /// Two-point distribution `(p, 1-p)`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![p, 1.0 - p])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Product distribution, indexed as `i * other.len() + j`.
    pub fn product(&self, other: &Self) -> Self {
        let mut w = Vec::with_capacity(self.len() * other.len());
        for a in &self.weights {
            for b in &other.weights {
                w.push(a * b);
            }
        }
        Self { weights: w }
    }
}

/// One atom of the log-likelihood random variable `ln(P(x)/Q(x))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LlrAtom {
    pub p: f64,
    pub q: f64,
    /// `ln(p/q)` in nats; `+∞` when `q = 0`.
    pub llr: f64,
}

/// The random variable `ln(P(X)/Q(X))` with `X ~ P`, as a list of atoms.
///
/// Atoms with zero `P`-probability are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct JointLogLikelihood {
    atoms: Vec<LlrAtom>,
}

impl JointLogLikelihood {
    pub fn new(p: &ClassicalDistribution, q: &ClassicalDistribution) -> Result<Self> {
        check_dims(p.len(), q.len())?;
        let atoms = p
            .weights()
            .iter()
            .zip(q.weights())
            .filter(|(pw, _)| **pw > 0.0)
            .map(|(&pw, &qw)| LlrAtom {
                p: pw,
                q: qw,
                llr: if qw > 0.0 {
                    pw.ln() - qw.ln()
                } else {
                    f64::INFINITY
                },
            })
            .collect();
        Ok(Self { atoms })
    }

    /// Builds directly from atoms, dropping those with `p = 0`.
    pub fn from_atoms(atoms: impl IntoIterator<Item = LlrAtom>) -> Self {
        Self {
            atoms: atoms.into_iter().filter(|a| a.p > 0.0).collect(),
        }
    }

    pub fn atoms(&self) -> &[LlrAtom] {
        &self.atoms
    }

    /// True when some atom has positive `P`-mass and zero `Q`-mass.
    pub fn has_support_violation(&self) -> bool {
        self.atoms.iter().any(|a| a.llr == f64::INFINITY)
    }

    fn require_support(&self) -> Result<()> {
        if self.has_support_violation() {
            Err(Error::SupportViolation(
                "Q assigns zero mass to an atom with positive P-mass".into(),
            ))
        } else {
            Ok(())
        }
    }

    /// `E[llr]`, i.e. the relative entropy `D(P‖Q)`; `+∞` on support violation.
    pub fn mean(&self) -> f64 {
        if self.has_support_violation() {
            return f64::INFINITY;
        }
        self.atoms.iter().map(|a| a.p * a.llr).sum()
    }

    /// `Var[llr]`.
    pub fn variance(&self) -> Result<f64> {
        self.require_support()?;
        let m = self.mean();
        Ok(self.atoms.iter().map(|a| a.p * (a.llr - m).powi(2)).sum())
    }

    /// `E|llr − D|³`.
    pub fn third_abs_moment(&self) -> Result<f64> {
        self.require_support()?;
        let m = self.mean();
        Ok(self
            .atoms
            .iter()
            .map(|a| a.p * (a.llr - m).abs().powi(3))
            .sum())
    }

    /// Atoms sorted by descending log-ratio, with near-equal ratios merged.
    fn merged_descending(&self) -> Vec<LlrAtom> {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| b.llr.partial_cmp(&a.llr).unwrap_or(Ordering::Equal));
        merge_sorted(atoms)
    }

    /// `sup{R : Pr[llr ≤ R] ≤ eps}`, reported as the largest atom value whose
    /// strict cumulative mass does not exceed `eps`.
    pub fn info_spectrum(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        self.require_support()?;
        let mut atoms = self.merged_descending();
        atoms.reverse();
        let mut below = 0.0;
        let mut best = f64::NEG_INFINITY;
        for a in atoms {
            if below <= eps {
                best = a.llr;
            } else {
                break;
            }
            below += a.p;
        }
        Ok(best)
    }
}

fn merge_sorted(atoms: Vec<LlrAtom>) -> Vec<LlrAtom> {
    let mut out: Vec<LlrAtom> = Vec::with_capacity(atoms.len());
    let mut anchor = f64::NAN;
    for a in atoms {
        match out.last_mut() {
            Some(last)
                if (a.llr == anchor)
                    || (a.llr.is_finite() && (a.llr - anchor).abs() < LLR_MERGE_TOL) =>
            {
                last.p += a.p;
                last.q += a.q;
            }
            _ => {
                anchor = a.llr;
                out.push(a);
            }
        }
    }
    out
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(validation(format!("eps must lie in (0,1), got {eps}")))
    }
}

/// Relative entropy `D(P‖Q)` in nats; `+∞` when `Q` does not dominate `P`.
pub fn kl_divergence(p: &ClassicalDistribution, q: &ClassicalDistribution) -> Result<f64> {
    Ok(JointLogLikelihood::new(p, q)?.mean())
}

/// Variance of the log-likelihood ratio under `P`.
pub fn llr_variance(p: &ClassicalDistribution, q: &ClassicalDistribution) -> Result<f64> {
    JointLogLikelihood::new(p, q)?.variance()
}

/// `T(P‖Q) = Σ P(x) |ln(P(x)/Q(x)) − D(P‖Q)|³`.
pub fn third_abs_moment(p: &ClassicalDistribution, q: &ClassicalDistribution) -> Result<f64> {
    JointLogLikelihood::new(p, q)?.third_abs_moment()
}

/// Shannon entropy in nats.
pub fn shannon_entropy(p: &ClassicalDistribution) -> f64 {
    p.weights()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.ln())
        .sum()
}

/// Smallest `Q`-mass of a randomized test that accepts `P` with probability
/// at least `1 − eps`.
pub fn classical_beta(
    p: &ClassicalDistribution,
    q: &ClassicalDistribution,
    eps: f64,
) -> Result<f64> {
    check_eps(eps)?;
    check_dims(p.len(), q.len())?;
    let target = 1.0 - eps;
    let ll = JointLogLikelihood::new(p, q)?;
    let mut acc_p = 0.0;
    let mut acc_q = 0.0;
    for g in ll.merged_descending() {
        if acc_p + g.p >= target {
            let x = ((target - acc_p) / g.p).clamp(0.0, 1.0);
            acc_q += x * g.q;
            return Ok(acc_q.min(target + 1e-12).max(0.0));
        }
        acc_p += g.p;
        acc_q += g.q;
    }
    Ok(acc_q.min(target + 1e-12).max(0.0))
}

/// Information-spectrum divergence `D_s^eps(P‖Q)`.
pub fn info_spectrum(
    p: &ClassicalDistribution,
    q: &ClassicalDistribution,
    eps: f64,
) -> Result<f64> {
    JointLogLikelihood::new(p, q)?.info_spectrum(eps)
}

/// `−ln(β/(1−eps))` for the classical Neyman–Pearson optimum.
pub fn classical_dh(p: &ClassicalDistribution, q: &ClassicalDistribution, eps: f64) -> Result<f64> {
    let beta = classical_beta(p, q, eps)?;
    Ok(dh_from_beta(beta, eps))
}

pub(crate) fn dh_from_beta(beta: f64, eps: f64) -> f64 {
    let beta = beta.min(1.0 - eps);
    if beta <= 0.0 {
        f64::INFINITY
    } else {
        -(beta / (1.0 - eps)).ln()
    }
}
