//! Active-set Newton refinement of the Holevo maximization.
//!
//! The multiplicative ascent stalls when a few stiff directions (balancing
//! opposite sides of the set) coexist with many flat ones (near-equivalent
//! neighbours on a grid). Here the problem is restricted to a small candidate
//! support, solved there by a projected Newton method with the exact Hessian
//! `∂²I/∂P_i∂P_j = −tr(ρ_i Dlog_σ[ρ_j])`, and the support is grown with the
//! states that violate optimality the most.

use nalgebra::{DMatrix, DVector};

use crate::operator::{trace_product, CMatrix, DensityMatrix, HermitianOperator};

const NEWTON_ITERS: usize = 200;
const OUTER_ITERS: usize = 100;
const ENTRY_WEIGHT: f64 = 1e-9;

pub(crate) struct Polished {
    pub weights: Vec<f64>,
    pub sigma: DensityMatrix,
    pub divergences: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub rounds: usize,
}

struct Eval {
    sigma: DensityMatrix,
    d: Vec<f64>,
    holevo: f64,
}

fn mixture(states: &[&DensityMatrix], p: &[f64]) -> Option<DensityMatrix> {
    let dim = states[0].dim();
    let mut m = CMatrix::zeros(dim, dim);
    for (s, w) in states.iter().zip(p) {
        if *w > 0.0 {
            m += s.matrix().scale(*w);
        }
    }
    let sigma = DensityMatrix::normalized(HermitianOperator::symmetrized(m)).ok()?;
    if sigma.min_eigenvalue() <= 1e-14 {
        return None;
    }
    Some(sigma)
}

fn divergences(states: &[&DensityMatrix], neg_entropy: &[f64], sigma: &DensityMatrix) -> Vec<f64> {
    let log_sigma = sigma.spectrum().rebuild(f64::ln);
    states
        .iter()
        .zip(neg_entropy)
        .map(|(s, ne)| (ne - trace_product(s.matrix(), log_sigma.matrix())).max(0.0))
        .collect()
}

fn evaluate(states: &[&DensityMatrix], neg_entropy: &[f64], p: &[f64]) -> Option<Eval> {
    let sigma = mixture(states, p)?;
    let d = divergences(states, neg_entropy, &sigma);
    let holevo = p.iter().zip(&d).map(|(w, x)| w * x).sum();
    Some(Eval { sigma, d, holevo })
}

/// Hessian of the Holevo quantity in the weights, at the current mixture.
fn hessian(states: &[&DensityMatrix], sigma: &DensityMatrix) -> DMatrix<f64> {
    let spec = sigma.spectrum();
    let u = &spec.eigenvectors;
    let lam = &spec.eigenvalues;
    let dim = lam.len();
    let mut l = DMatrix::<f64>::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            l[(a, b)] = if (lam[a] - lam[b]).abs() <= 1e-12 * lam[a].max(lam[b]) {
                2.0 / (lam[a] + lam[b])
            } else {
                (lam[a].ln() - lam[b].ln()) / (lam[a] - lam[b])
            };
        }
    }
    let rotated: Vec<CMatrix> = states
        .iter()
        .map(|s| u.adjoint() * s.matrix() * u)
        .collect();
    let m = states.len();
    let mut h = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut acc = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    acc += (rotated[i][(a, b)].conj() * rotated[j][(a, b)]).re * l[(a, b)];
                }
            }
            h[(i, j)] = -acc;
            h[(j, i)] = -acc;
        }
    }
    h
}

/// Regularized Newton direction on `free`, dropping zero weights that would turn negative.
fn solve_free(
    h: &DMatrix<f64>,
    g: &[f64],
    p: &[f64],
    free: &mut Vec<usize>,
    reg: f64,
) -> Option<DVector<f64>> {
    loop {
        let k = free.len();
        if k == 0 {
            return None;
        }
        let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
        let mut rhs = DVector::<f64>::zeros(k + 1);
        for (r, &i) in free.iter().enumerate() {
            for (c, &j) in free.iter().enumerate() {
                a[(r, c)] = h[(i, j)];
            }
            a[(r, r)] -= reg;
            a[(r, k)] = -1.0;
            a[(k, r)] = 1.0;
            rhs[r] = -g[i];
        }
        let sol = a.lu().solve(&rhs)?;
        let before = free.len();
        let keep: Vec<usize> = free
            .iter()
            .enumerate()
            .filter(|(r, &i)| !(p[i] == 0.0 && sol[*r] < 0.0))
            .map(|(_, &i)| i)
            .collect();
        if keep.len() == before {
            return Some(sol);
        }
        *free = keep;
    }
}

/// Maximizes the Holevo quantity over weights supported on `states`.
fn newton(
    states: &[&DensityMatrix],
    neg_entropy: &[f64],
    mut p: Vec<f64>,
    tol: f64,
) -> Option<(Vec<f64>, Eval)> {
    let m = states.len();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    let mut cur = evaluate(states, neg_entropy, &p)?;
    let mut mu = 1e-10;
    for _ in 0..NEWTON_ITERS {
        let kkt = cur.d.iter().copied().fold(f64::NEG_INFINITY, f64::max) - cur.holevo;
        if kkt <= tol {
            break;
        }
        let h = hessian(states, &cur.sigma);
        let scale = (0..m).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
        let mut free: Vec<usize> = (0..m)
            .filter(|&i| p[i] > 0.0 || cur.d[i] > cur.holevo)
            .collect();
        let mut improved = false;
        for _ in 0..12 {
            let Some(sol) = solve_free(&h, &cur.d, &p, &mut free, mu * scale) else {
                mu *= 10.0;
                continue;
            };
            let mut step: f64 = 1.0;
            let mut blocking = None;
            for (r, &i) in free.iter().enumerate() {
                if sol[r] < 0.0 && p[i] + step * sol[r] < 0.0 {
                    step = p[i] / -sol[r];
                    blocking = Some(i);
                }
            }
            for _ in 0..40 {
                let mut cand = p.clone();
                for (r, &i) in free.iter().enumerate() {
                    cand[i] = (cand[i] + step * sol[r]).max(0.0);
                }
                if let Some(b) = blocking {
                    cand[b] = 0.0;
                }
                let s: f64 = cand.iter().sum();
                cand.iter_mut().for_each(|x| *x /= s);
                if let Some(next) = evaluate(states, neg_entropy, &cand) {
                    // a step that only retires a weight may be lost in rounding
                    let floor = if blocking.is_some() {
                        cur.holevo - 1e-14
                    } else {
                        cur.holevo
                    };
                    if next.holevo > floor {
                        p = cand;
                        cur = next;
                        improved = true;
                        break;
                    }
                }
                step *= 0.5;
                blocking = None;
            }
            if improved {
                mu = (mu * 0.1).max(1e-12);
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Some((p, cur))
}

/// Refines `weights` on the full set; `None` when the restricted mixtures lose full rank.
pub(crate) fn polish(
    all: &[DensityMatrix],
    neg_entropy: &[f64],
    weights: &[f64],
    full_divergences: &[f64],
    tol: f64,
) -> Option<Polished> {
    let n = all.len();
    let dim = all[0].dim();
    let keep = 4 * dim * dim + 4;
    let mut by_weight: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0).collect();
    by_weight.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    by_weight.truncate(keep);
    let mut support = by_weight;
    let mut by_div: Vec<usize> = (0..n).collect();
    by_div.sort_by(|&a, &b| full_divergences[b].total_cmp(&full_divergences[a]));
    for &i in by_div.iter().take(2) {
        if !support.contains(&i) {
            support.push(i);
        }
    }
    let mut p: Vec<f64> = support
        .iter()
        .map(|&i| weights[i].max(ENTRY_WEIGHT))
        .collect();
    let mut best: Option<Polished> = None;
    for round in 1..=OUTER_ITERS {
        let states: Vec<&DensityMatrix> = support.iter().map(|&i| &all[i]).collect();
        let ne: Vec<f64> = support.iter().map(|&i| neg_entropy[i]).collect();
        let (q, eval) = newton(&states, &ne, p.clone(), 0.01 * tol)?;
        let d = divergences(&all.iter().collect::<Vec<_>>(), neg_entropy, &eval.sigma);
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lower = eval.holevo;
        let mut w = vec![0.0; n];
        for (&i, &x) in support.iter().zip(&q) {
            w[i] = x;
        }
        let candidate = Polished {
            weights: w,
            sigma: eval.sigma,
            divergences: d,
            lower,
            upper,
            rounds: round,
        };
        let done = upper - lower <= tol;
        let better = best
            .as_ref()
            .is_none_or(|b| upper - lower < b.upper - b.lower);
        if better {
            best = Some(candidate);
        }
        if done {
            break;
        }
        let cur = best.as_ref().filter(|_| better).map(|b| &b.divergences);
        let Some(dv) = cur else { break };
        let mut violators: Vec<usize> = (0..n)
            .filter(|i| !support.contains(i) && dv[*i] > lower)
            .collect();
        violators.sort_by(|&a, &b| dv[b].total_cmp(&dv[a]));
        violators.truncate(4);
        if violators.is_empty() {
            break;
        }
        let (kept, kept_p): (Vec<usize>, Vec<f64>) = support
            .iter()
            .zip(&q)
            .filter(|(_, x)| **x > 0.0)
            .map(|(i, x)| (*i, *x))
            .unzip();
        support = kept;
        p = kept_p;
        for v in violators {
            support.push(v);
            p.push(ENTRY_WEIGHT);
        }
    }
    best
}
