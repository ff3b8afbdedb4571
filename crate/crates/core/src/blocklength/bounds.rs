//! Computable achievability and converse bounds on `log M*(Wⁿ, ε)` and the
//! rate curve built from them.

use serde::Serialize;

use crate::blocklength::normal::second_order;
use crate::channels::ChannelMetrics;
use crate::divergences::bracket::{
    berry_esseen_in_range, f1, ln_xi, product_dh_bracket, xi_from_extremes, BracketVariant,
    CopyMoments,
};
use crate::divergences::classical::JointLogLikelihood;
use crate::divergences::quantum::{ns_atoms, relative_entropy, relative_entropy_variance};
use crate::error::{check_dims, validation, Error, Result};
use crate::operator::{CMatrix, DensityMatrix, HermitianOperator, DEFAULT_SUPPORT_TOL};

/// Block-diagonal pair `⊕ P(ρ) ρ` versus `⊕ P(ρ) σ` of an ensemble.
#[derive(Clone, Debug)]
pub struct JointCQPair {
    pub weights: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub sigma: DensityMatrix,
    /// Per-copy `(D, V, T)` of the pair.
    pub moments: CopyMoments,
    /// `Ξ` of the reference state `⊕ P(ρ) σ`.
    pub xi: f64,
}

/// Assembles the joint pair; zero-weight states are dropped.
pub fn build_joint_pair(
    weights: &[f64],
    states: &[DensityMatrix],
    sigma: &DensityMatrix,
) -> Result<JointCQPair> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(validation("one weight per state is required"));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(validation("weights must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(validation(format!("weights sum to {total}")));
    }
    let mut kept_w = Vec::new();
    let mut kept_s = Vec::new();
    for (w, s) in weights.iter().zip(states) {
        check_dims(sigma.dim(), s.dim())?;
        if *w > 0.0 {
            kept_w.push(*w / total);
            kept_s.push(s.clone());
        }
    }
    let mut divs = Vec::with_capacity(kept_s.len());
    let mut vars = Vec::with_capacity(kept_s.len());
    let mut atoms = Vec::new();
    for (w, s) in kept_w.iter().zip(&kept_s) {
        let d = relative_entropy(s, sigma)?;
        if !d.is_finite() {
            return Err(Error::SupportViolation(
                "ensemble state outside the support of σ".into(),
            ));
        }
        divs.push(d);
        vars.push(relative_entropy_variance(s, sigma)?);
        atoms.extend(ns_atoms(s, sigma, *w)?);
    }
    let d: f64 = kept_w.iter().zip(&divs).map(|(w, x)| w * x).sum();
    let v: f64 = kept_w
        .iter()
        .zip(divs.iter().zip(&vars))
        .map(|(w, (dk, vk))| w * (vk + (dk - d).powi(2)))
        .sum();
    let t = JointLogLikelihood::from_atoms(atoms).third_abs_moment()?;
    let smax = sigma.max_eigenvalue();
    let smin = sigma.min_nonzero_eigenvalue(DEFAULT_SUPPORT_TOL);
    let wmax = kept_w.iter().copied().fold(0.0, f64::max);
    let wmin = kept_w.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(JointCQPair {
        xi: xi_from_extremes(wmax * smax, wmin * smin),
        weights: kept_w,
        states: kept_s,
        sigma: sigma.clone(),
        moments: CopyMoments { d, v, t },
    })
}

impl JointCQPair {
    fn block_diagonal(&self, f: impl Fn(&DensityMatrix) -> CMatrix) -> DensityMatrix {
        let d = self.sigma.dim();
        let k = self.weights.len();
        let mut m = CMatrix::zeros(k * d, k * d);
        for (i, (w, s)) in self.weights.iter().zip(&self.states).enumerate() {
            m.view_mut((i * d, i * d), (d, d))
                .copy_from(&f(s).scale(*w));
        }
        DensityMatrix::from_trusted(HermitianOperator::symmetrized(m))
    }

    /// `⊕ P(ρ) ρ`.
    pub fn forward(&self) -> DensityMatrix {
        self.block_diagonal(|s| s.matrix().clone())
    }

    /// `⊕ P(ρ) σ`.
    pub fn reference(&self) -> DensityMatrix {
        self.block_diagonal(|_| self.sigma.matrix().clone())
    }
}

/// `η = μ = δ = n^{−1/2}`.
pub fn default_schedule(n: f64) -> f64 {
    1.0 / n.sqrt()
}

/// Which bracket the achievability bound uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantChoice {
    /// Berry–Esseen when its quantile arguments lie in `(0,1)`, Chebyshev otherwise.
    #[default]
    Auto,
    Chebyshev,
    BerryEsseen,
}

/// A bound value with the bracket it came from and, for infinite values, why.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub variant: Option<BracketVariant>,
    pub note: Option<String>,
}

impl BoundValue {
    fn unbounded(value: f64, note: String) -> Self {
        Self {
            value,
            variant: None,
            note: Some(note),
        }
    }
}

/// `ln(4ε(1−ε+η)/η²)`.
pub fn achievability_penalty(eps: f64, eta: f64) -> f64 {
    (4.0 * eps * (1.0 - eps + eta) / (eta * eta)).ln()
}

/// Lower bound on `log M*(Wⁿ, ε)` from `n` copies of the joint pair.
///
/// Returns `−∞` with a note when `(η, δ)` violate `0 < η < ε` and
/// `0 < δ < min(ε−η, (1−ε+η)/4)`.
pub fn achievability_lower(
    pair: &JointCQPair,
    n: f64,
    eps: f64,
    eta: f64,
    delta: f64,
    variant: VariantChoice,
) -> BoundValue {
    if !(eps > 0.0 && eps < 1.0) || !(n >= 1.0) {
        return BoundValue::unbounded(f64::NEG_INFINITY, format!("invalid eps {eps} or n {n}"));
    }
    if !(eta > 0.0 && eta < eps) {
        return BoundValue::unbounded(
            f64::NEG_INFINITY,
            format!("eta = {eta:.3e} not in (0, eps)"),
        );
    }
    let e = eps - eta;
    let limit = e.min((1.0 - e) / 4.0);
    if !(delta > 0.0 && delta < limit) {
        return BoundValue::unbounded(
            f64::NEG_INFINITY,
            format!("delta = {delta:.3e} not in (0, {limit:.3e})"),
        );
    }
    let chosen = match variant {
        VariantChoice::Chebyshev => BracketVariant::Chebyshev,
        VariantChoice::BerryEsseen if pair.moments.v > 0.0 => BracketVariant::BerryEsseen,
        VariantChoice::BerryEsseen => BracketVariant::Chebyshev,
        VariantChoice::Auto => {
            if berry_esseen_in_range(pair.moments, n, e, delta) {
                BracketVariant::BerryEsseen
            } else {
                BracketVariant::Chebyshev
            }
        }
    };
    match product_dh_bracket(&[pair.moments], pair.xi, n, e, delta, chosen) {
        Ok(b) => BoundValue {
            value: b.lower - achievability_penalty(eps, eta),
            variant: Some(chosen),
            note: None,
        },
        Err(err) => BoundValue::unbounded(f64::NEG_INFINITY, err.to_string()),
    }
}

/// Upper bound on `log M*(Wⁿ, ε)`:
/// `nχ + √(n v⁺/(1−ε−μ−4δ)) + ln(nΞ) + 4 ln(1/δ) + F₁(ε+μ, δ) + ln((ε+μ)/(μ(1−ε−μ)))`.
///
/// `Ξ` is floored at one. Returns `+∞` with a note when `0 < μ < 1−ε` or
/// `0 < δ < min(ε+μ, (1−ε−μ)/4)` fails.
pub fn converse_upper(
    chi: f64,
    v_plus_max: f64,
    xi_sigma: f64,
    n: f64,
    eps: f64,
    mu: f64,
    delta: f64,
) -> BoundValue {
    if !(eps > 0.0 && eps < 1.0) || !(n >= 1.0) {
        return BoundValue::unbounded(f64::INFINITY, format!("invalid eps {eps} or n {n}"));
    }
    if !(mu > 0.0 && mu < 1.0 - eps) {
        return BoundValue::unbounded(f64::INFINITY, format!("mu = {mu:.3e} not in (0, 1 - eps)"));
    }
    let e = eps + mu;
    let limit = e.min((1.0 - e) / 4.0);
    if !(delta > 0.0 && delta < limit) {
        return BoundValue::unbounded(
            f64::INFINITY,
            format!("delta = {delta:.3e} not in (0, {limit:.3e})"),
        );
    }
    if !v_plus_max.is_finite() || !chi.is_finite() {
        return BoundValue::unbounded(f64::INFINITY, "unbounded divergence or variance".into());
    }
    let value =
        n * chi + (n * v_plus_max / (1.0 - e - 4.0 * delta)).sqrt() + n.ln() + ln_xi(xi_sigma)
            - 4.0 * delta.ln()
            + f1(e, delta)
            + (e / (mu * (1.0 - e))).ln();
    BoundValue {
        value,
        variant: Some(BracketVariant::Chebyshev),
        note: None,
    }
}

/// Schedules and bracket choices behind one curve point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveConstants {
    pub eps: f64,
    pub eta: f64,
    pub mu: f64,
    pub delta: f64,
    pub lower_variant: Option<BracketVariant>,
    pub lower_note: Option<String>,
    pub upper_note: Option<String>,
}

/// Unnormalized values at one blocklength, in nats.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: u64,
    pub approx: f64,
    pub lower: f64,
    pub upper: f64,
    pub constants: CurveConstants,
}

/// Inputs of [`rate_curve`] that do not depend on `n`.
#[derive(Clone, Debug)]
pub struct CurveInputs {
    pub chi: f64,
    pub chi_upper: f64,
    pub v_eps: f64,
    pub v_plus_max: f64,
    pub xi_sigma: f64,
    pub pair: JointCQPair,
}

impl CurveInputs {
    /// Uses the pruned ensemble selected by `eps`, with its own average state
    /// as the reference of the joint pair.
    pub fn from_metrics(metrics: &ChannelMetrics, eps: f64) -> Result<Self> {
        let (weights, states) = metrics.ensemble(eps);
        let avg = DensityMatrix::mixture(&weights, &states)?;
        let pair = build_joint_pair(&weights, &states, &avg)?;
        Ok(Self {
            chi: metrics.chi,
            chi_upper: metrics.chi_upper,
            v_eps: metrics.v_eps(eps),
            v_plus_max: metrics.v_plus_max,
            xi_sigma: metrics.xi_sigma,
            pair,
        })
    }

    pub fn point(&self, n: u64, eps: f64) -> CurvePoint {
        let nf = n as f64;
        let s = default_schedule(nf);
        let lower = achievability_lower(&self.pair, nf, eps, s, s, VariantChoice::Auto);
        let upper = converse_upper(
            self.chi_upper,
            self.v_plus_max,
            self.xi_sigma,
            nf,
            eps,
            s,
            s,
        );
        CurvePoint {
            n,
            approx: second_order(nf, self.chi, self.v_eps, eps),
            lower: lower.value,
            upper: upper.value,
            constants: CurveConstants {
                eps,
                eta: s,
                mu: s,
                delta: s,
                lower_variant: lower.variant,
                lower_note: lower.note,
                upper_note: upper.note,
            },
        }
    }
}

/// One point per distinct `n`, ascending.
pub fn rate_curve(metrics: &ChannelMetrics, eps: f64, n_list: &[u64]) -> Result<Vec<CurvePoint>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(validation(format!("eps must lie in (0,1), got {eps}")));
    }
    if n_list.contains(&0) {
        return Err(validation("blocklengths must be positive"));
    }
    let inputs = CurveInputs::from_metrics(metrics, eps)?;
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    Ok(ns.into_iter().map(|n| inputs.point(n, eps)).collect())
}

/// Number of entries strictly above `nu / 2`.
pub fn count_above_half(deltas: &[f64], nu: f64) -> usize {
    deltas.iter().filter(|&&x| x > nu / 2.0).count()
}

/// For entries in `[0,1]` whose mean exceeds `nu`, more than `n·nu/2` of them
/// exceed `nu/2`. Returns whether the conclusion holds (vacuously when the
/// hypothesis fails).
pub fn index_selection_holds(deltas: &[f64], nu: f64) -> bool {
    let n = deltas.len() as f64;
    let in_range = deltas.iter().all(|x| (0.0..=1.0).contains(x));
    let mean = deltas.iter().sum::<f64>() / n;
    if !in_range || deltas.is_empty() || !(mean > nu) {
        return true;
    }
    count_above_half(deltas, nu) as f64 > n * nu / 2.0
}
