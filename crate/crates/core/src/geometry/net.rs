//! Finite nets of full-rank states covering the state space.
//!
//! Each net element is `τ = Σ_a Q(a) |ψ_a⟩⟨ψ_a|` for an orthonormal frame
//! `{ψ_a}` and a full-support `m`-type `Q` over `[d]`, `m = ⌈2d/γ⌉`, so every
//! eigenvalue of `τ` is at least `1/m ≥ γ/(2d+γ)`.
//!
//! For qubits the frames come from a latitude-ring grid of the Bloch sphere
//! whose covering radius is at most `γ`, which yields a certified covering.
//! For larger dimensions the frames are Haar-random and coverage is only
//! measured.

use serde::Serialize;

use crate::error::{validation, Result};
use crate::geometry::sphere::{angle_between, ring_grid};
use crate::geometry::state_set::StateSet;
use crate::operator::{c, trace_distance, CMatrix, DensityMatrix, HermitianOperator};
use crate::sampling::{random_unitary, seeded_rng};

/// Upper limit on the number of net elements built for `d ≥ 3`.
pub const MAX_NET_SIZE: usize = 200_000;

#[derive(Clone, Debug)]
pub struct GammaNet {
    pub d: usize,
    pub gamma: f64,
    pub m: usize,
    pub set: StateSet,
    /// Orthonormal frames, one unitary per frame (columns are the frame vectors).
    frames: Vec<CMatrix>,
    /// Bloch direction of the first frame vector, qubits only.
    directions: Vec<[f64; 3]>,
}

/// Summary statistics of a net.
#[derive(Clone, Debug, Serialize)]
pub struct NetSummary {
    pub d: usize,
    pub gamma: f64,
    pub m: usize,
    pub cardinality: usize,
    /// `γ/(2d+γ)`.
    pub min_eigenvalue_floor: f64,
    /// Smallest eigenvalue over all elements.
    pub min_eigenvalue: f64,
    /// `(5/γ)^{2d²} (2d/γ + 2)^{d−1}`.
    pub cardinality_bound: f64,
}

/// `γ/(2d+γ)`.
pub fn eigenvalue_floor(d: usize, gamma: f64) -> f64 {
    gamma / (2.0 * d as f64 + gamma)
}

/// `(5/γ)^{2d²} (2d/γ + 2)^{d−1}`, possibly `+∞` in floating point.
pub fn cardinality_bound(d: usize, gamma: f64) -> f64 {
    let d = d as f64;
    (5.0 / gamma).powf(2.0 * d * d) * (2.0 * d / gamma + 2.0).powf(d - 1.0)
}

/// All compositions of `m` into `d` positive parts, as probability vectors.
pub fn full_support_types(d: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(d: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if d == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 1..=(left - (d - 1)) {
            prefix.push(k);
            rec(d - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m >= d {
        rec(d, m, &mut Vec::new(), &mut out);
    }
    out.into_iter()
        .map(|k| k.into_iter().map(|x| x as f64 / m as f64).collect())
        .collect()
}

/// Nearest full-support `m`-type to `p` in the sup norm (for `d = 2`) or by
/// largest remainders (general `d`).
pub fn round_to_type(p: &[f64], m: usize) -> Vec<f64> {
    let d = p.len();
    let mut k: Vec<usize> = p
        .iter()
        .map(|x| ((x * m as f64).floor() as usize).max(1))
        .collect();
    let mut total: usize = k.iter().sum();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        let ra = p[a] * m as f64 - k[a] as f64;
        let rb = p[b] * m as f64 - k[b] as f64;
        rb.partial_cmp(&ra)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut i = 0;
    while total < m {
        k[order[i % d]] += 1;
        total += 1;
        i += 1;
    }
    while total > m {
        // take from the part that overshoots its target the most
        let j = (0..d)
            .filter(|&j| k[j] > 1)
            .max_by(|&a, &b| {
                let ea = k[a] as f64 - p[a] * m as f64;
                let eb = k[b] as f64 - p[b] * m as f64;
                ea.partial_cmp(&eb).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("m ≥ d leaves a reducible part");
        k[j] -= 1;
        total -= 1;
    }
    k.into_iter().map(|x| x as f64 / m as f64).collect()
}

fn frame_state(u: &CMatrix, q: &[f64]) -> DensityMatrix {
    let diag = HermitianOperator::from_real_diagonal(q).into_matrix();
    DensityMatrix::from_trusted(HermitianOperator::symmetrized(u * diag * u.adjoint()))
}

fn qubit_frame(n: &[f64; 3]) -> CMatrix {
    // |ψ(n)⟩ = (cos θ/2, e^{iφ} sin θ/2) and its antipode
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = c(phi.cos(), phi.sin());
    CMatrix::from_row_slice(2, 2, &[c(ct, 0.0), -e.conj() * st, e * st, c(ct, 0.0)])
}

fn bloch_of(v: &nalgebra::DVector<crate::operator::C64>) -> [f64; 3] {
    let a = v[0];
    let b = v[1];
    let off = a.conj() * b;
    [2.0 * off.re, 2.0 * off.im, a.norm_sqr() - b.norm_sqr()]
}

/// Builds the net for dimension `d` and covering radius `gamma`.
pub fn gamma_net(d: usize, gamma: f64, seed: u64) -> Result<GammaNet> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(validation(format!("gamma must lie in (0,1), got {gamma}")));
    }
    if d < 2 {
        return Err(validation("dimension must be at least 2"));
    }
    let m = (2.0 * d as f64 / gamma).ceil() as usize;
    let types = full_support_types(d, m);
    let (frames, directions) = if d == 2 {
        let dirs = ring_grid(gamma);
        (dirs.iter().map(qubit_frame).collect::<Vec<_>>(), dirs)
    } else {
        let count = ((2.0 / gamma).powf(2.0 * (d as f64 - 1.0)).ceil() as usize)
            .clamp(1, (MAX_NET_SIZE / types.len().max(1)).max(1));
        let mut rng = seeded_rng(seed);
        (
            (0..count).map(|_| random_unitary(d, &mut rng)).collect(),
            Vec::new(),
        )
    };
    let mut states = Vec::with_capacity(frames.len() * types.len());
    for u in &frames {
        for q in &types {
            states.push(frame_state(u, q));
        }
    }
    let set = StateSet::new(states)?;
    Ok(GammaNet {
        d,
        gamma,
        m,
        set,
        frames,
        directions,
    })
}

impl GammaNet {
    pub fn summary(&self) -> NetSummary {
        let min_eigenvalue = self
            .set
            .states()
            .iter()
            .map(|s| s.min_eigenvalue())
            .fold(f64::INFINITY, f64::min);
        NetSummary {
            d: self.d,
            gamma: self.gamma,
            m: self.m,
            cardinality: self.set.len(),
            min_eigenvalue_floor: eigenvalue_floor(self.d, self.gamma),
            min_eigenvalue,
            cardinality_bound: cardinality_bound(self.d, self.gamma),
        }
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// A net element close to `rho` and its trace distance.
    ///
    /// Qubits: frame nearest to the top eigenvector, type nearest to the
    /// spectrum. Otherwise: best frame by trace distance, with the type
    /// rounded from the diagonal of `rho` in that frame.
    pub fn closest(&self, rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
        crate::error::check_dims(self.d, rho.dim())?;
        if self.d == 2 {
            let spec = rho.spectrum();
            let top = bloch_of(&spec.vector(0));
            let (best, _) = self
                .directions
                .iter()
                .enumerate()
                .map(|(i, n)| (i, angle_between(n, &top)))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            let r0 = spec.eigenvalues[0].clamp(0.0, 1.0);
            let q = round_to_type(&[r0, 1.0 - r0], self.m);
            let tau = frame_state(&self.frames[best], &q);
            let td = trace_distance(rho, &tau)?;
            return Ok((tau, td));
        }
        let mut best: Option<(DensityMatrix, f64)> = None;
        for u in &self.frames {
            let diag: Vec<f64> = (0..self.d)
                .map(|a| {
                    let v = u.column(a);
                    (v.adjoint() * rho.matrix() * v)[(0, 0)].re.max(0.0)
                })
                .collect();
            let q = round_to_type(&diag, self.m);
            let tau = frame_state(u, &q);
            let td = trace_distance(rho, &tau)?;
            if best.as_ref().is_none_or(|b| td < b.1) {
                best = Some((tau, td));
            }
        }
        Ok(best.expect("net has at least one frame"))
    }
}
