//! Minimal and maximal peripheral information variance, and support reduction
//! of the optimizing decompositions.

use serde::Serialize;

use crate::divergences::quantum::relative_entropy_variance;
use crate::error::{validation, Error, Result};
use crate::geometry::center::{peripheral_set, RadiusReport};
use crate::geometry::lp::{LinearProgram, Sense};
use crate::geometry::state_set::StateSet;
use crate::operator::{CMatrix, DensityMatrix};

/// Default half-width of the relaxed mean constraints.
pub const DEFAULT_LP_TOL: f64 = 1e-7;
/// The adaptive peripheral slack never grows beyond this.
pub const MAX_SLACK: f64 = 1e-2;

/// Optimal variances over peripheral decompositions of the center.
#[derive(Clone, Debug, Serialize)]
pub struct DispersionRange {
    pub v_min: f64,
    pub v_max: f64,
    /// Weights over `peripheral`, same order.
    pub p_min: Vec<f64>,
    pub p_max: Vec<f64>,
    pub peripheral: Vec<usize>,
    /// `V(ρ_i‖σ*)` for each peripheral index.
    pub variances: Vec<f64>,
    /// Largest `‖Σ p_i ρ_i − σ*‖_F` over the two optimizers.
    pub residual: f64,
}

impl DispersionRange {
    /// `v_min` for `eps ≤ 1/2`, `v_max` otherwise.
    pub fn v_eps(&self, eps: f64) -> f64 {
        if eps <= 0.5 {
            self.v_min
        } else {
            self.v_max
        }
    }

    /// Optimizer matching [`DispersionRange::v_eps`].
    pub fn p_eps(&self, eps: f64) -> &[f64] {
        if eps <= 0.5 {
            &self.p_min
        } else {
            &self.p_max
        }
    }
}

/// Real coordinates of a Hermitian matrix, skipping the last diagonal entry
/// (fixed by the trace): `d² − 1` numbers.
pub fn hermitian_coordinates(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d - 1);
    for i in 0..d.saturating_sub(1) {
        out.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

/// `‖Σ p_i ρ_i − σ‖_F`.
pub fn mixture_residual(weights: &[f64], states: &[&DensityMatrix], sigma: &DensityMatrix) -> f64 {
    let d = sigma.dim();
    let mut m = CMatrix::zeros(d, d);
    for (w, s) in weights.iter().zip(states) {
        m += s.matrix().scale(*w);
    }
    (m - sigma.matrix()).norm()
}

/// Solves `min` and `max Σ p_i V(ρ_i‖σ*)` over `p ≥ 0`, `Σ p = 1`,
/// `|Σ p_i ρ_i − σ*| ≤ lp_tol` coordinatewise.
pub fn dispersion_range(
    s: &StateSet,
    peripheral: &[usize],
    sigma_star: &DensityMatrix,
    lp_tol: f64,
) -> Result<DispersionRange> {
    if peripheral.is_empty() {
        return Err(validation("peripheral set is empty"));
    }
    let states: Vec<&DensityMatrix> = peripheral.iter().map(|&i| s.get(i)).collect();
    let variances: Vec<f64> = states
        .iter()
        .map(|r| relative_entropy_variance(r, sigma_star))
        .collect::<Result<_>>()?;
    let coords: Vec<Vec<f64>> = states
        .iter()
        .map(|r| hermitian_coordinates(r.matrix()))
        .collect();
    let target = hermitian_coordinates(sigma_star.matrix());
    let k = states.len();
    let mut lp = LinearProgram {
        c: variances.clone(),
        a_eq: vec![vec![1.0; k]],
        b_eq: vec![1.0],
        ..Default::default()
    };
    for (c, t) in target.iter().enumerate() {
        let row: Vec<f64> = coords.iter().map(|x| x[c]).collect();
        lp.a_ub.push(row.clone());
        lp.b_ub.push(t + lp_tol);
        lp.a_ub.push(row.iter().map(|x| -x).collect());
        lp.b_ub.push(-(t - lp_tol));
    }
    let lo = lp.solve(Sense::Minimize)?;
    let hi = lp.solve(Sense::Maximize)?;
    let residual = mixture_residual(&lo.x, &states, sigma_star)
        .max(mixture_residual(&hi.x, &states, sigma_star));
    Ok(DispersionRange {
        v_min: lo.objective.max(0.0),
        v_max: hi.objective.max(lo.objective).max(0.0),
        p_min: lo.x,
        p_max: hi.x,
        peripheral: peripheral.to_vec(),
        variances,
        residual,
    })
}

/// Peripheral extraction and dispersion LP with the slack widened ×10 on
/// infeasibility, starting from the report's default slack.
pub fn solve_dispersion(
    s: &StateSet,
    report: &RadiusReport,
    lp_tol: f64,
) -> Result<(DispersionRange, f64)> {
    let mut slack = report.default_slack();
    loop {
        let peripheral = peripheral_set(s, report, slack)?;
        match dispersion_range(s, &peripheral, &report.sigma_star, lp_tol) {
            Ok(r) => return Ok((r, slack)),
            Err(Error::Infeasible(msg)) => {
                if slack >= MAX_SLACK {
                    return Err(Error::Infeasible(format!(
                        "center is not a peripheral mixture even at slack {slack:.1e}: {msg}"
                    )));
                }
                slack = (slack * 10.0).min(MAX_SLACK);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Pruned decomposition: weights and state indices with support at most `d² + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrunedDecomposition {
    pub weights: Vec<f64>,
    pub support: Vec<usize>,
}

/// Reduces the support of `weights` to at most `d² + 1` points while keeping
/// the mixture and `Σ p_i values_i` fixed.
///
/// `indices` labels the states (returned in `support`); `values` holds
/// `V(ρ_i‖σ*)`.
pub fn caratheodory_prune(
    weights: &[f64],
    states: &[&DensityMatrix],
    values: &[f64],
    indices: &[usize],
) -> Result<PrunedDecomposition> {
    let n = weights.len();
    if states.len() != n || values.len() != n || indices.len() != n {
        return Err(validation("weights, states, values and indices must align"));
    }
    if n == 0 {
        return Err(validation("empty decomposition"));
    }
    let d = states[0].dim();
    let limit = d * d + 1;
    // constraint columns: d²−1 coordinates, normalization, value
    let columns: Vec<Vec<f64>> = states
        .iter()
        .zip(values)
        .map(|(s, v)| {
            let mut c = hermitian_coordinates(s.matrix());
            c.push(1.0);
            c.push(*v);
            c
        })
        .collect();
    let mut w: Vec<f64> = weights.to_vec();
    loop {
        let live: Vec<usize> = (0..n).filter(|&i| w[i] > 0.0).collect();
        if live.len() <= limit {
            break;
        }
        let cols: Vec<&Vec<f64>> = live.iter().map(|&i| &columns[i]).collect();
        let z = null_vector(&cols)
            .ok_or_else(|| Error::Internal("no null direction despite excess support".into()))?;
        // step along −z until a weight hits zero
        let z = if z.iter().any(|&x| x > 0.0) {
            z
        } else {
            z.iter().map(|x| -x).collect()
        };
        let mut theta = f64::INFINITY;
        let mut hit = 0;
        for (k, &zk) in z.iter().enumerate() {
            if zk > 1e-300 {
                let t = w[live[k]] / zk;
                if t < theta {
                    theta = t;
                    hit = k;
                }
            }
        }
        for (k, &zk) in z.iter().enumerate() {
            let i = live[k];
            w[i] = (w[i] - theta * zk).max(0.0);
        }
        w[live[hit]] = 0.0;
    }
    let support: Vec<usize> = (0..n).filter(|&i| w[i] > 0.0).collect();
    let total: f64 = support.iter().map(|&i| w[i]).sum();
    Ok(PrunedDecomposition {
        weights: support.iter().map(|&i| w[i] / total).collect(),
        support: support.iter().map(|&i| indices[i]).collect(),
    })
}

/// A nonzero `z` with `Σ_k z_k cols[k] = 0`, by Gaussian elimination with
/// partial pivoting on the matrix whose columns are `cols`.
fn null_vector(cols: &[&Vec<f64>]) -> Option<Vec<f64>> {
    let ncols = cols.len();
    let nrows = cols.first()?.len();
    let mut a: Vec<Vec<f64>> = (0..nrows)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let tol = 1e-12 * scale;
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let (best, val) = (row..nrows)
            .map(|r| (r, a[r][col].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        a.swap(row, best);
        let p = a[row][col];
        for v in a[row].iter_mut() {
            *v /= p;
        }
        let pivot = a[row].clone();
        for (r, line) in a.iter_mut().enumerate() {
            if r != row {
                let f = line[col];
                if f != 0.0 {
                    for (x, p) in line.iter_mut().zip(&pivot) {
                        *x -= f * p;
                    }
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..ncols).find(|c| !pivot_cols.contains(c))?;
    let mut z = vec![0.0; ncols];
    z[free] = 1.0;
    for (r, &pc) in pivot_cols.iter().enumerate() {
        z[pc] = -a[r][free];
    }
    Some(z)
}

/// Pruned supports for both optimizers of a dispersion range.
pub fn prune_range(
    s: &StateSet,
    range: &DispersionRange,
) -> Result<(PrunedDecomposition, PrunedDecomposition)> {
    let states: Vec<&DensityMatrix> = range.peripheral.iter().map(|&i| s.get(i)).collect();
    let lo = caratheodory_prune(&range.p_min, &states, &range.variances, &range.peripheral)?;
    let hi = caratheodory_prune(&range.p_max, &states, &range.variances, &range.peripheral)?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::center::divergence_center;
    use crate::operator::CMatrix;
    use crate::sampling::{random_mixed_state, random_simplex, seeded_rng};

    fn mean(weights: &[f64], states: &[&DensityMatrix]) -> CMatrix {
        let d = states[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            m += s.matrix().scale(*w);
        }
        m
    }

    #[test]
    fn orthogonal_pair_zero_variance() {
        let s =
            StateSet::new(vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)]).unwrap();
        let r = divergence_center(&s, 1e-10, 1000).unwrap();
        let range = dispersion_range(&s, &r.peripheral, &r.sigma_star, DEFAULT_LP_TOL).unwrap();
        assert!(range.v_min.abs() < 1e-12 && range.v_max.abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_unique_decomposition() {
        let a = DensityMatrix::from_real_diagonal(&[0.8, 0.2]).unwrap();
        let b = DensityMatrix::from_real_diagonal(&[0.2, 0.8]).unwrap();
        let s = StateSet::new(vec![a.clone(), b]).unwrap();
        let sigma = DensityMatrix::maximally_mixed(2);
        let range = dispersion_range(&s, &[0, 1], &sigma, DEFAULT_LP_TOL).unwrap();
        let v = relative_entropy_variance(&a, &sigma).unwrap();
        assert!((range.v_min - v).abs() < 1e-9 && (range.v_max - v).abs() < 1e-9);
    }

    #[test]
    fn one_dimensional_polytope_matches_grid() {
        // three commuting states on a line; σ = diag(1/2, 1/2)
        let xs = [0.9, 0.6, 0.2];
        let states: Vec<DensityMatrix> = xs
            .iter()
            .map(|&x| DensityMatrix::from_real_diagonal(&[x, 1.0 - x]).unwrap())
            .collect();
        let sigma = DensityMatrix::maximally_mixed(2);
        let v: Vec<f64> = states
            .iter()
            .map(|r| relative_entropy_variance(r, &sigma).unwrap())
            .collect();
        let s = StateSet::new(states).unwrap();
        let range = dispersion_range(&s, &[0, 1, 2], &sigma, 1e-12).unwrap();
        // feasible set: 0.7·p0 + 0.4·p1 = 0.3 with p2 = 1 − p0 − p1, an edge with
        // vertices (3/7, 0, 4/7) and (0, 3/4, 1/4); a linear objective peaks at one
        let at = |p: [f64; 3]| p[0] * v[0] + p[1] * v[1] + p[2] * v[2];
        let e0 = at([3.0 / 7.0, 0.0, 4.0 / 7.0]);
        let e1 = at([0.0, 0.75, 0.25]);
        let (lo, hi) = (e0.min(e1), e0.max(e1));
        assert!((range.v_min - lo).abs() < 1e-9, "{} vs {lo}", range.v_min);
        assert!((range.v_max - hi).abs() < 1e-9, "{} vs {hi}", range.v_max);
    }

    #[test]
    fn prune_small_support_unchanged() {
        let states = [DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)];
        let refs: Vec<&DensityMatrix> = states.iter().collect();
        let out = caratheodory_prune(&[0.5, 0.5], &refs, &[0.0, 0.0], &[3, 7]).unwrap();
        assert_eq!(out.support, vec![3, 7]);
        assert_eq!(out.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn prune_eight_point_qubit_decomposition() {
        // cube vertices of the Bloch ball mixing to id/2
        let r = 1.0 / 3f64.sqrt();
        let mut states = Vec::new();
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for sz in [-1.0, 1.0] {
                    states.push(DensityMatrix::from_bloch(sx * r, sy * r, sz * r).unwrap());
                }
            }
        }
        let refs: Vec<&DensityMatrix> = states.iter().collect();
        let w = vec![0.125; 8];
        let sigma = DensityMatrix::maximally_mixed(2);
        let vals: Vec<f64> = states
            .iter()
            .map(|s| relative_entropy_variance(s, &sigma).unwrap())
            .collect();
        let out = caratheodory_prune(&w, &refs, &vals, &(0..8).collect::<Vec<_>>()).unwrap();
        assert!(out.support.len() <= 5);
        let kept: Vec<&DensityMatrix> = out.support.iter().map(|&i| &states[i]).collect();
        assert!((mean(&out.weights, &kept) - sigma.matrix()).norm() < 1e-9);
    }

    #[test]
    fn prune_random_qutrit_decomposition() {
        let mut rng = seeded_rng(12);
        let states: Vec<DensityMatrix> = (0..12).map(|_| random_mixed_state(3, &mut rng)).collect();
        let w = random_simplex(12, &mut rng);
        let refs: Vec<&DensityMatrix> = states.iter().collect();
        let target = mean(&w, &refs);
        let sigma = DensityMatrix::new(target.clone()).unwrap();
        let vals: Vec<f64> = states
            .iter()
            .map(|s| relative_entropy_variance(s, &sigma).unwrap())
            .collect();
        let preserve: f64 = w.iter().zip(&vals).map(|(a, b)| a * b).sum();
        let out = caratheodory_prune(&w, &refs, &vals, &(0..12).collect::<Vec<_>>()).unwrap();
        assert!(out.support.len() <= 10);
        let kept: Vec<&DensityMatrix> = out.support.iter().map(|&i| &states[i]).collect();
        assert!((mean(&out.weights, &kept) - target).norm() < 1e-9);
        let val: f64 = out
            .weights
            .iter()
            .zip(&out.support)
            .map(|(a, &i)| a * vals[i])
            .sum();
        assert!((val - preserve).abs() < 1e-9);
    }
}
