//! Divergence radius and center of a finite state set.
//!
//! The solver runs a multiplicative ascent on the Holevo quantity
//! `I(P) = Σ P(ρ) D(ρ‖ρ^(P))`. Every iterate `P` gives the enclosure
//! `I(P) ≤ χ ≤ max_ρ D(ρ‖ρ^(P))`, so the returned interval is valid whether
//! or not the iteration converged.
//! When the ascent has not certified after a short warm-up, an active-set
//! Newton refinement takes over; its enclosure is computed the same way.

use serde::Serialize;

use crate::divergences::quantum::entropy;
use crate::error::{validation, Error, Result};
use crate::geometry::polish;
use crate::geometry::state_set::{compress, expand, joint_support_isometry, StateSet};
use crate::operator::{log_on_support, trace_product, CMatrix, DensityMatrix, HermitianOperator};
use crate::sampling::{random_simplex, seeded_rng};

/// Weights below this are set to zero after each update.
pub const WEIGHT_FLOOR: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Init {
    Uniform,
    /// Random point of the simplex drawn from the given seed.
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenterOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
}

impl Default for CenterOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            init: Init::Uniform,
        }
    }
}

/// Result of [`divergence_center`].
#[derive(Clone, Debug)]
pub struct RadiusReport {
    /// Midpoint of the certified enclosure, in nats.
    pub chi: f64,
    /// `I(P)`, the lower end of the enclosure.
    pub chi_lower: f64,
    /// `max_ρ D(ρ‖ρ^(P))`, the upper end.
    pub chi_upper: f64,
    pub sigma_star: DensityMatrix,
    pub weights: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `D(ρ_i‖σ*)` for every state.
    pub divergences: Vec<f64>,
    /// Indices at distance at least `chi − slack` from the center, with the default slack.
    pub peripheral: Vec<usize>,
    pub tol: f64,
}

impl RadiusReport {
    pub fn default_slack(&self) -> f64 {
        default_slack(self.tol, self.gap)
    }
}

/// Slack used to extract the peripheral set: `max(10·tol, gap)`.
pub fn default_slack(tol: f64, gap: f64) -> f64 {
    (10.0 * tol).max(gap)
}

/// Summary used by reports and the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct RadiusSummary {
    pub chi: f64,
    pub chi_lower: f64,
    pub chi_upper: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub peripheral_count: usize,
}

impl From<&RadiusReport> for RadiusSummary {
    fn from(r: &RadiusReport) -> Self {
        Self {
            chi: r.chi,
            chi_lower: r.chi_lower,
            chi_upper: r.chi_upper,
            gap: r.gap,
            iterations: r.iterations,
            converged: r.converged,
            peripheral_count: r.peripheral.len(),
        }
    }
}

/// States prepared for repeated divergence evaluations against varying centers.
struct Workspace {
    states: Vec<DensityMatrix>,
    neg_entropy: Vec<f64>,
    dim: usize,
}

impl Workspace {
    fn mixture(&self, w: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (x, s) in w.iter().zip(&self.states) {
            if *x > 0.0 {
                m += s.matrix().scale(*x);
            }
        }
        m
    }

    /// `(σ, [D(ρ_i‖σ)])` for `σ = Σ w_i ρ_i`.
    fn divergences(&self, w: &[f64]) -> Result<(DensityMatrix, Vec<f64>)> {
        let sigma = DensityMatrix::normalized(HermitianOperator::symmetrized(self.mixture(w)))?;
        let d = self.divergences_to(&sigma);
        Ok((sigma, d))
    }

    fn divergences_to(&self, sigma: &DensityMatrix) -> Vec<f64> {
        let log_sigma = log_on_support(sigma);
        let spec = sigma.spectrum();
        let kernel = spec.projector(|x| x <= crate::operator::DEFAULT_SUPPORT_TOL);
        let has_kernel = spec
            .eigenvalues
            .iter()
            .any(|&x| x <= crate::operator::DEFAULT_SUPPORT_TOL);
        self.states
            .iter()
            .zip(&self.neg_entropy)
            .map(|(s, ne)| {
                if has_kernel
                    && trace_product(s.matrix(), kernel.matrix())
                        > crate::operator::DEFAULT_SUPPORT_TOL
                {
                    return f64::INFINITY;
                }
                (ne - trace_product(s.matrix(), log_sigma.matrix())).max(0.0)
            })
            .collect()
    }
}

fn holevo(w: &[f64], d: &[f64]) -> f64 {
    w.iter()
        .zip(d)
        .filter(|(x, _)| **x > 0.0)
        .map(|(x, y)| x * y)
        .sum()
}

fn max_finite_or_inf(d: &[f64]) -> f64 {
    d.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `P_i ∝ P_i exp(s·(D_i − max D))`, floored; infinite divergences get their weight back.
fn update(w: &[f64], d: &[f64], step: f64) -> Vec<f64> {
    let finite_max = d
        .iter()
        .copied()
        .filter(|x| x.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = w
        .iter()
        .zip(d)
        .map(|(x, y)| {
            if y.is_infinite() {
                x.max(1.0 / w.len() as f64)
            } else {
                x * (step * (y - finite_max)).exp()
            }
        })
        .collect();
    normalize_with_floor(&mut out);
    out
}

fn normalize_with_floor(w: &mut [f64]) {
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
        if *x < WEIGHT_FLOOR {
            *x = 0.0;
        }
    }
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
    }
}

/// Multiplicative iterations before the first active-set refinement.
const POLISH_AFTER: usize = 200;

struct Ascent {
    w: Vec<f64>,
    sigma: DensityMatrix,
    d: Vec<f64>,
    lower: f64,
    upper: f64,
    step: f64,
    iterations: usize,
    stalled: bool,
}

impl Ascent {
    fn run(&mut self, ws: &Workspace, tol: f64, limit: usize) -> Result<()> {
        while !self.stalled && self.upper - self.lower > tol && self.iterations < limit {
            self.iterations += 1;
            let mut accepted = false;
            for _ in 0..60 {
                let cand = update(&self.w, &self.d, self.step);
                let (cs, cd) = ws.divergences(&cand)?;
                let cl = holevo(&cand, &cd);
                if cl >= self.lower - 1e-15 {
                    self.w = cand;
                    self.sigma = cs;
                    self.d = cd;
                    self.lower = self.lower.max(cl);
                    self.upper = max_finite_or_inf(&self.d);
                    self.step = (self.step * 1.5).min(1e6);
                    accepted = true;
                    break;
                }
                self.step *= 0.5;
                if self.step < 1e-12 {
                    break;
                }
            }
            self.stalled = !accepted;
        }
        Ok(())
    }

    /// Only returns a refinement that is at least as tight as the current enclosure.
    fn polish(&self, ws: &Workspace, tol: f64) -> Option<polish::Polished> {
        if !self.upper.is_finite() {
            return None;
        }
        polish::polish(&ws.states, &ws.neg_entropy, &self.w, &self.d, tol)
            .filter(|p| p.upper - p.lower <= self.upper - self.lower)
    }
}

/// Divergence center with uniform initialization.
pub fn divergence_center(s: &StateSet, tol: f64, max_iter: usize) -> Result<RadiusReport> {
    divergence_center_with(
        s,
        CenterOptions {
            tol,
            max_iter,
            init: Init::Uniform,
        },
    )
}

pub fn divergence_center_with(s: &StateSet, opts: CenterOptions) -> Result<RadiusReport> {
    if !(opts.tol > 0.0) {
        return Err(validation(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    let iso = joint_support_isometry(s.states())?;
    let states: Vec<DensityMatrix> = match &iso {
        Some(v) => s
            .states()
            .iter()
            .map(|r| compress(v, r))
            .collect::<Result<_>>()?,
        None => s.states().to_vec(),
    };
    let ws = Workspace {
        neg_entropy: states.iter().map(|r| -entropy(r)).collect(),
        dim: states[0].dim(),
        states,
    };
    let n = ws.states.len();
    let w = match opts.init {
        Init::Uniform => vec![1.0 / n as f64; n],
        Init::Random(seed) => {
            let mut w = random_simplex(n, &mut seeded_rng(seed));
            // keep every state alive so the first center has full support
            let floor = 1e-3 / n as f64;
            for x in &mut w {
                *x = x.max(floor);
            }
            normalize_with_floor(&mut w);
            w
        }
    };

    let (sigma, d) = ws.divergences(&w)?;
    let mut it = Ascent {
        lower: holevo(&w, &d),
        upper: max_finite_or_inf(&d),
        w,
        sigma,
        d,
        step: 1.0,
        iterations: 0,
        stalled: false,
    };
    it.run(&ws, opts.tol, opts.max_iter.min(POLISH_AFTER))?;
    let mut best = None;
    if it.upper - it.lower > opts.tol && it.iterations < opts.max_iter {
        best = it.polish(&ws, opts.tol);
    }
    let certified =
        |p: &Option<polish::Polished>| p.as_ref().is_some_and(|p| p.upper - p.lower <= opts.tol);
    if !certified(&best) {
        it.run(&ws, opts.tol, opts.max_iter)?;
        if it.upper - it.lower > opts.tol && it.iterations < opts.max_iter {
            if let Some(p) = it.polish(&ws, opts.tol) {
                if best
                    .as_ref()
                    .is_none_or(|b| p.upper - p.lower < b.upper - b.lower)
                {
                    best = Some(p);
                }
            }
        }
    }
    if let Some(p) = best {
        it.iterations += p.rounds;
        if p.upper - p.lower < it.upper - it.lower {
            it.w = p.weights;
            it.sigma = p.sigma;
            it.d = p.divergences;
            it.lower = p.lower;
            it.upper = p.upper;
        }
    }
    let Ascent {
        w,
        sigma,
        d,
        lower,
        upper,
        iterations,
        ..
    } = it;
    let gap = (upper - lower).max(0.0);
    let chi = lower + 0.5 * gap;
    let sigma_star = match &iso {
        Some(v) => expand(v, &sigma),
        None => sigma,
    };
    let mut report = RadiusReport {
        chi,
        chi_lower: lower,
        chi_upper: lower + gap,
        sigma_star,
        weights: w,
        gap,
        iterations,
        converged: gap <= opts.tol,
        divergences: d,
        peripheral: Vec::new(),
        tol: opts.tol,
    };
    report.peripheral = peripheral_set(s, &report, report.default_slack())?;
    Ok(report)
}

/// Indices with `D(ρ_i‖σ*) ≥ chi − slack`.
pub fn peripheral_set(s: &StateSet, report: &RadiusReport, slack: f64) -> Result<Vec<usize>> {
    if report.divergences.len() != s.len() {
        return Err(validation("report does not belong to this state set"));
    }
    let out: Vec<usize> = report
        .divergences
        .iter()
        .enumerate()
        .filter(|(_, &x)| x >= report.chi - slack)
        .map(|(i, _)| i)
        .collect();
    if out.is_empty() {
        return Err(Error::Internal("peripheral set is empty".into()));
    }
    Ok(out)
}

/// Groups peripheral indices whose states lie within `radius` in trace
/// distance of some other member of the group.
pub fn cluster_peripheral(
    s: &StateSet,
    peripheral: &[usize],
    radius: f64,
) -> Result<Vec<Vec<usize>>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; peripheral.len()];
    for start in 0..peripheral.len() {
        if assigned[start] {
            continue;
        }
        assigned[start] = true;
        let mut group = vec![peripheral[start]];
        let mut frontier = vec![start];
        while let Some(a) = frontier.pop() {
            for b in 0..peripheral.len() {
                if !assigned[b]
                    && crate::operator::trace_distance(s.get(peripheral[a]), s.get(peripheral[b]))?
                        <= radius
                {
                    assigned[b] = true;
                    group.push(peripheral[b]);
                    frontier.push(b);
                }
            }
        }
        group.sort_unstable();
        clusters.push(group);
    }
    Ok(clusters)
}
