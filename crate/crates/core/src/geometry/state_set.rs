use std::collections::BTreeMap;

use crate::divergences::quantum::{entropy, relative_entropy};
use crate::error::{check_dims, validation, Result};
use crate::operator::{trace_distance, CMatrix, DensityMatrix, HermitianOperator};

/// States closer than this in trace distance are considered identical.
pub const DEDUP_TOL: f64 = 1e-10;

/// A finite, deduplicated list of states of one dimension.
#[derive(Clone, Debug)]
pub struct StateSet {
    states: Vec<DensityMatrix>,
    labels: Option<Vec<String>>,
}

impl StateSet {
    /// Keeps the first of every group of states within [`DEDUP_TOL`] of each other.
    pub fn new(states: Vec<DensityMatrix>) -> Result<Self> {
        Self::build(states, None)
    }

    pub fn with_labels(states: Vec<DensityMatrix>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != states.len() {
            return Err(validation("one label per state is required"));
        }
        Self::build(states, Some(labels))
    }

    fn build(states: Vec<DensityMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        if states.is_empty() {
            return Err(validation("state set must be nonempty"));
        }
        let d = states[0].dim();
        for s in &states {
            check_dims(d, s.dim())?;
        }
        let keep = dedup_mask(&states)?;
        let mut kept_states = Vec::with_capacity(states.len());
        let mut kept_labels = labels.as_ref().map(|_| Vec::new());
        for (i, s) in states.into_iter().enumerate() {
            if keep[i] {
                kept_states.push(s);
                if let (Some(out), Some(src)) = (kept_labels.as_mut(), labels.as_ref()) {
                    out.push(src[i].clone());
                }
            }
        }
        Ok(Self {
            states: kept_states,
            labels: kept_labels,
        })
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn get(&self, i: usize) -> &DensityMatrix {
        &self.states[i]
    }

    /// The same states in a new order; `order[k]` is the old index of the new `k`-th state.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(validation("permutation has the wrong length"));
        }
        let states = order.iter().map(|&i| self.states[i].clone()).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| order.iter().map(|&i| l[i].clone()).collect());
        Self::build(states, labels)
    }
}

/// Scans states in order and keeps each one unless an earlier kept state is
/// within [`DEDUP_TOL`]. Candidates are looked up by their `(0,0)` entry: a
/// diagonal entry of a traceless Hermitian difference is bounded by the
/// trace distance.
fn dedup_mask(states: &[DensityMatrix]) -> Result<Vec<bool>> {
    let key = |i: usize| states[i].matrix()[(0, 0)].re.max(0.0);
    let mut index: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    let mut keep = vec![false; states.len()];
    for i in 0..states.len() {
        let k = key(i);
        let lo = (k - DEDUP_TOL).max(0.0).to_bits();
        let hi = (k + DEDUP_TOL).to_bits();
        let mut duplicate = false;
        'search: for (_, bucket) in index.range(lo..=hi) {
            for &j in bucket {
                let diff = states[i].matrix() - states[j].matrix();
                if 0.5 * diff.norm() > DEDUP_TOL {
                    continue;
                }
                if trace_distance(&states[i], &states[j])? <= DEDUP_TOL {
                    duplicate = true;
                    break 'search;
                }
            }
        }
        if !duplicate {
            keep[i] = true;
            index.entry(k.to_bits()).or_default().push(i);
        }
    }
    Ok(keep)
}

/// `Σ P(i) ρ_i`.
pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    DensityMatrix::mixture(weights, states)
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(validation(format!(
            "expected {n} weights, got {}",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(validation("weights must be nonnegative"));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(validation(format!("weights sum to {s}")));
    }
    Ok(())
}

/// Holevo quantity `I(P) = Σ P(ρ) D(ρ‖ρ^(P))`.
pub fn holevo_quantity(weights: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    check_weights(weights, states.len())?;
    let avg = mixture(weights, states)?;
    let mut total = 0.0;
    for (w, s) in weights.iter().zip(states) {
        if *w > 0.0 {
            total += w * relative_entropy(s, &avg)?;
        }
    }
    Ok(total)
}

/// Holevo quantity through entropies: `H(ρ^(P)) − Σ P(ρ) H(ρ)`.
pub fn holevo_quantity_entropic(weights: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    check_weights(weights, states.len())?;
    let avg = mixture(weights, states)?;
    let mean_h: f64 = weights
        .iter()
        .zip(states)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, s)| w * entropy(s))
        .sum();
    Ok(entropy(&avg) - mean_h)
}

/// Isometry onto the joint support of a set of states (columns are an
/// orthonormal basis), or `None` if the joint support is the whole space.
pub(crate) fn joint_support_isometry(states: &[DensityMatrix]) -> Result<Option<CMatrix>> {
    let w = vec![1.0 / states.len() as f64; states.len()];
    let avg = mixture(&w, states)?;
    let spec = avg.spectrum();
    let keep: Vec<usize> = (0..spec.dim())
        .filter(|&k| {
            spec.eigenvalues[k] > crate::operator::DEFAULT_SUPPORT_TOL / states.len() as f64
        })
        .collect();
    if keep.len() == spec.dim() {
        return Ok(None);
    }
    let mut v = CMatrix::zeros(spec.dim(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        v.set_column(c, &spec.eigenvectors.column(k));
    }
    Ok(Some(v))
}

pub(crate) fn compress(v: &CMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::normalized(HermitianOperator::symmetrized(
        v.adjoint() * rho.matrix() * v,
    ))
}

pub(crate) fn expand(v: &CMatrix, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_trusted(HermitianOperator::symmetrized(
        v * rho.matrix() * v.adjoint(),
    ))
}
