//! Channels in Kraus form, the qubit examples, and discretization of a
//! channel's image into a [`StateSet`] for the geometry pipeline.

use serde::Serialize;

use crate::divergences::bracket::xi;
use crate::divergences::quantum::relative_entropy_variance;
use crate::error::{check_dims, validation, Error, Result};
use crate::geometry::center::{
    cluster_peripheral, divergence_center_with, CenterOptions, Init, RadiusReport,
};
use crate::geometry::dispersion::{
    prune_range, solve_dispersion, DispersionRange, PrunedDecomposition, DEFAULT_LP_TOL,
};
use crate::geometry::sphere::symmetric_bloch_grid;
use crate::geometry::state_set::StateSet;
use crate::operator::{c, paulis, CMatrix, DensityMatrix, HermitianOperator};
use crate::sampling::{random_pure_state, seeded_rng, RNG_NAME};

/// Trace-preservation tolerance on `Σ K†K − I`.
pub const TP_TOL: f64 = 1e-10;
/// Smallest accepted discretization resolution.
pub const MIN_RESOLUTION: usize = 8;

/// A quantum channel `ρ ↦ Σ K ρ K†`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
    d_in: usize,
    d_out: usize,
    description: String,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>, description: impl Into<String>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| validation("need at least one Kraus operator"))?;
        let (d_out, d_in) = first.shape();
        if d_in == 0 || d_out == 0 {
            return Err(validation("Kraus operators must be nonempty"));
        }
        let mut sum = CMatrix::zeros(d_in, d_in);
        for k in &kraus {
            if k.shape() != (d_out, d_in) {
                return Err(Error::DimensionMismatch {
                    expected: d_out * d_in,
                    found: k.nrows() * k.ncols(),
                });
            }
            sum += k.adjoint() * k;
        }
        let dev = (sum - CMatrix::identity(d_in, d_in))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > TP_TOL {
            return Err(validation(format!(
                "Kraus operators are not trace preserving (deviation {dev:.3e})"
            )));
        }
        Ok(Self {
            kraus,
            d_in,
            d_out,
            description: description.into(),
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![CMatrix::identity(d, d)],
            d_in: d,
            d_out: d,
            description: format!("identity(d={d})"),
        }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.d_in
    }

    pub fn output_dim(&self) -> usize {
        self.d_out
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dims(self.d_in, rho.dim())?;
        let mut out = CMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out += k * rho.matrix() * k.adjoint();
        }
        DensityMatrix::normalized(HermitianOperator::symmetrized(out))
    }
}

/// Amplitude damping with decay probability `gamma`:
/// `K₀ = diag(1, √(1−γ))`, `K₁ = √γ |0⟩⟨1|`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(validation(format!("gamma must lie in [0,1], got {gamma}")));
    }
    let z = c(0.0, 0.0);
    let k0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, c((1.0 - gamma).sqrt(), 0.0)]);
    let k1 = CMatrix::from_row_slice(2, 2, &[z, c(gamma.sqrt(), 0.0), z, z]);
    KrausChannel::new(vec![k0, k1], format!("amplitude_damping(gamma={gamma})"))
}

/// Pauli channel with flip probabilities `px, py, pz`.
pub fn pauli_channel(px: f64, py: f64, pz: f64) -> Result<KrausChannel> {
    let probs = [px, py, pz];
    if probs.iter().any(|p| !(*p >= 0.0)) || px + py + pz > 1.0 + 1e-15 {
        return Err(validation(format!(
            "Pauli probabilities must be nonnegative with sum at most 1, got ({px}, {py}, {pz})"
        )));
    }
    let p0 = (1.0 - px - py - pz).max(0.0);
    let [x, y, zm] = paulis();
    let mut kraus = vec![CMatrix::identity(2, 2).scale(p0.sqrt())];
    for (p, m) in probs.iter().zip([x, y, zm]) {
        kraus.push(m.scale(p.sqrt()));
    }
    KrausChannel::new(kraus, format!("pauli(px={px}, py={py}, pz={pz})"))
}

/// How inputs are sampled when discretizing an image.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSampling {
    /// Pure inputs only.
    #[default]
    Pure,
    /// Pure inputs plus the same grid shrunk to half length (qubits) or
    /// random mixed inputs (larger dimensions), for cross-checks.
    WithMixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageProvenance {
    pub description: String,
    pub resolution: usize,
    pub seed: u64,
    pub sampling: InputSampling,
    pub rng: &'static str,
}

/// Deduplicated channel outputs together with how they were sampled.
#[derive(Clone, Debug)]
pub struct ChannelImage {
    pub set: StateSet,
    pub provenance: ImageProvenance,
}

/// Image of `ch` on pure inputs.
///
/// Qubit inputs use the deterministic symmetric grid of
/// [`symmetric_bloch_grid`]; larger inputs use `resolution` seeded Haar-random
/// pure states.
pub fn discretize_image(ch: &KrausChannel, resolution: usize, seed: u64) -> Result<ChannelImage> {
    discretize_image_with(ch, resolution, seed, InputSampling::Pure)
}

pub fn discretize_image_with(
    ch: &KrausChannel,
    resolution: usize,
    seed: u64,
    sampling: InputSampling,
) -> Result<ChannelImage> {
    if resolution < MIN_RESOLUTION {
        return Err(validation(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let mut inputs = Vec::new();
    if ch.input_dim() == 2 {
        let grid = symmetric_bloch_grid(resolution);
        for p in &grid {
            inputs.push(DensityMatrix::from_bloch(p[0], p[1], p[2])?);
        }
        if sampling == InputSampling::WithMixed {
            for p in &grid {
                inputs.push(DensityMatrix::from_bloch(
                    0.5 * p[0],
                    0.5 * p[1],
                    0.5 * p[2],
                )?);
            }
        }
    } else {
        let mut rng = seeded_rng(seed);
        for _ in 0..resolution {
            inputs.push(random_pure_state(ch.input_dim(), &mut rng));
        }
        if sampling == InputSampling::WithMixed {
            for _ in 0..resolution {
                inputs.push(crate::sampling::random_mixed_state(
                    ch.input_dim(),
                    &mut rng,
                ));
            }
        }
    }
    let outputs = inputs
        .iter()
        .map(|r| ch.apply(r))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelImage {
        set: StateSet::new(outputs)?,
        provenance: ImageProvenance {
            description: ch.description().to_string(),
            resolution,
            seed,
            sampling,
            rng: RNG_NAME,
        },
    })
}

/// Settings of the metrics pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub lp_tol: f64,
    pub init: Init,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            lp_tol: DEFAULT_LP_TOL,
            init: Init::Uniform,
        }
    }
}

/// Capacity and dispersion of a finite image.
#[derive(Clone, Debug)]
pub struct ChannelMetrics {
    pub set: StateSet,
    /// Present when the set came from [`discretize_image`].
    pub provenance: Option<ImageProvenance>,
    pub chi: f64,
    pub chi_lower: f64,
    pub chi_upper: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub sigma_star: DensityMatrix,
    pub report: RadiusReport,
    pub range: DispersionRange,
    /// Peripheral slack at which the dispersion program became feasible.
    pub slack: f64,
    /// Optimizers of `v_min` and `v_max` reduced to at most `d² + 1` states.
    pub pruned_min: PrunedDecomposition,
    pub pruned_max: PrunedDecomposition,
    /// `max_ρ V(ρ‖σ*)` over the whole set.
    pub v_plus_max: f64,
    /// `Ξ(σ*)`.
    pub xi_sigma: f64,
    /// Peripheral states grouped at trace distance `5/√|S|`.
    pub clusters: Vec<Vec<usize>>,
}

impl ChannelMetrics {
    /// `v_min` for `eps ≤ 1/2`, `v_max` otherwise.
    pub fn v_eps(&self, eps: f64) -> f64 {
        self.range.v_eps(eps)
    }

    /// Pruned ensemble matching [`ChannelMetrics::v_eps`], as weights and states.
    pub fn ensemble(&self, eps: f64) -> (Vec<f64>, Vec<DensityMatrix>) {
        let p = if eps <= 0.5 {
            &self.pruned_min
        } else {
            &self.pruned_max
        };
        let states = p.support.iter().map(|&i| self.set.get(i).clone()).collect();
        (p.weights.clone(), states)
    }
}

/// Radius, center, peripheral set, dispersion range and pruned ensembles of a finite set.
pub fn set_metrics(set: StateSet, opts: MetricsOptions) -> Result<ChannelMetrics> {
    let report = divergence_center_with(
        &set,
        CenterOptions {
            tol: opts.tol,
            max_iter: opts.max_iter,
            init: opts.init,
        },
    )?;
    let (range, slack) = solve_dispersion(&set, &report, opts.lp_tol)?;
    let (pruned_min, pruned_max) = prune_range(&set, &range)?;
    let sigma_star = report.sigma_star.clone();
    let mut v_plus_max: f64 = 0.0;
    for (i, s) in set.states().iter().enumerate() {
        if report.divergences[i].is_finite() {
            v_plus_max = v_plus_max.max(relative_entropy_variance(s, &sigma_star)?);
        } else {
            v_plus_max = f64::INFINITY;
        }
    }
    let radius = 5.0 / (set.len() as f64).sqrt();
    let clusters = cluster_peripheral(&set, &range.peripheral, radius)?;
    Ok(ChannelMetrics {
        chi: report.chi,
        chi_lower: report.chi_lower,
        chi_upper: report.chi_upper,
        v_min: range.v_min,
        v_max: range.v_max,
        xi_sigma: xi(&sigma_star),
        sigma_star,
        report,
        range,
        slack,
        pruned_min,
        pruned_max,
        v_plus_max,
        clusters,
        set,
        provenance: None,
    })
}

/// Full pipeline on a discretized channel image.
pub fn channel_metrics(ch: &KrausChannel, resolution: usize, tol: f64) -> Result<ChannelMetrics> {
    channel_metrics_with(
        ch,
        resolution,
        0,
        MetricsOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn channel_metrics_with(
    ch: &KrausChannel,
    resolution: usize,
    seed: u64,
    opts: MetricsOptions,
) -> Result<ChannelMetrics> {
    let image = discretize_image(ch, resolution, seed)?;
    let mut m = set_metrics(image.set, opts)?;
    m.provenance = Some(image.provenance);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::trace_distance;
    use crate::sampling::random_mixed_state;

    fn h_nat(p: f64) -> f64 {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn kraus_validation() {
        let bad = vec![CMatrix::identity(2, 2).scale(0.5)];
        assert!(KrausChannel::new(bad, "bad").is_err());
        assert!(amplitude_damping(-0.1).is_err());
        assert!(amplitude_damping(1.1).is_err());
        assert!(pauli_channel(0.5, 0.4, 0.2).is_err());
        assert!(pauli_channel(-0.1, 0.0, 0.0).is_err());
        let ch = KrausChannel::identity(2);
        assert!(ch.apply(&DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn apply_examples() {
        let mut rng = seeded_rng(2);
        let rho = random_mixed_state(2, &mut rng);
        let id = KrausChannel::identity(2);
        assert!(trace_distance(&id.apply(&rho).unwrap(), &rho).unwrap() < 1e-15);
        let full = amplitude_damping(1.0).unwrap();
        let out = full.apply(&rho).unwrap();
        assert!(trace_distance(&out, &DensityMatrix::basis(2, 0)).unwrap() < 1e-15);
        let quarter = amplitude_damping(0.25).unwrap();
        let out = quarter.apply(&DensityMatrix::basis(2, 1)).unwrap();
        let expect = DensityMatrix::from_real_diagonal(&[0.25, 0.75]).unwrap();
        assert!(trace_distance(&out, &expect).unwrap() < 1e-15);
    }

    #[test]
    fn trace_preservation_on_random_inputs() {
        let channels = [
            amplitude_damping(0.3).unwrap(),
            pauli_channel(0.1, 0.2, 0.05).unwrap(),
            KrausChannel::identity(2),
        ];
        let mut rng = seeded_rng(9);
        for ch in &channels {
            for _ in 0..100 {
                let rho = random_mixed_state(2, &mut rng);
                let mut out = CMatrix::zeros(2, 2);
                for k in ch.kraus() {
                    out += k * rho.matrix() * k.adjoint();
                }
                assert!((out.trace().re - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn trivial_pauli_is_identity() {
        let ch = pauli_channel(0.0, 0.0, 0.0).unwrap();
        let mut rng = seeded_rng(4);
        let rho = random_mixed_state(2, &mut rng);
        assert!(trace_distance(&ch.apply(&rho).unwrap(), &rho).unwrap() < 1e-14);
    }

    #[test]
    fn image_sizes() {
        let img = discretize_image(&KrausChannel::identity(2), 100, 0).unwrap();
        assert_eq!(img.set.len(), 100);
        assert!(img
            .set
            .states()
            .iter()
            .all(|s| s.max_eigenvalue() > 1.0 - 1e-12));
        let img = discretize_image(&amplitude_damping(1.0).unwrap(), 100, 0).unwrap();
        assert_eq!(img.set.len(), 1);
        assert!(discretize_image(&KrausChannel::identity(2), 7, 0).is_err());
        let img =
            discretize_image_with(&KrausChannel::identity(2), 50, 0, InputSampling::WithMixed)
                .unwrap();
        assert_eq!(img.set.len(), 100);
    }

    #[test]
    fn damping_image_extent() {
        let g = 0.25;
        let img = discretize_image(&amplitude_damping(g).unwrap(), 400, 0).unwrap();
        for s in img.set.states() {
            let z = s.bloch_vector().unwrap()[2];
            assert!(z >= 2.0 * g - 1.0 - 1e-12 && z <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn identity_metrics() {
        let m = channel_metrics(&KrausChannel::identity(2), 200, 1e-9).unwrap();
        assert!((m.chi - 2f64.ln()).abs() < 1e-8);
        assert!(m.v_min.abs() < 1e-9 && m.v_max.abs() < 1e-9);
    }

    #[test]
    fn depolarizing_matches_bsc() {
        let p: f64 = 0.11;
        let m = channel_metrics(
            &pauli_channel(p / 2.0, p / 2.0, p / 2.0).unwrap(),
            200,
            1e-10,
        )
        .unwrap();
        assert!((m.chi - (2f64.ln() - h_nat(p))).abs() < 1e-6);
        let v = p * (1.0 - p) * ((1.0 - p) / p).ln().powi(2);
        assert!((m.v_min - v).abs() < 1e-6 && (m.v_max - v).abs() < 1e-6);
        let half = DensityMatrix::maximally_mixed(2);
        assert!(trace_distance(&m.sigma_star, &half).unwrap() < 1e-6);
    }

    #[test]
    fn anisotropic_pauli_center() {
        let m = channel_metrics(&pauli_channel(0.05, 0.02, 0.1).unwrap(), 300, 1e-10).unwrap();
        let half = DensityMatrix::maximally_mixed(2);
        assert!(trace_distance(&m.sigma_star, &half).unwrap() < 1e-6);
        // longest axis is z with length 1 − 2(px + py)
        let q = 0.07;
        assert!((m.chi - (2f64.ln() - h_nat(q))).abs() < 1e-6);
    }

    #[test]
    fn damping_center_on_z_axis() {
        let m = channel_metrics(&amplitude_damping(0.25).unwrap(), 400, 1e-9).unwrap();
        let b = m.sigma_star.bloch_vector().unwrap();
        assert!(b[0].abs() < 1e-6 && b[1].abs() < 1e-6);
        assert!(m.report.gap <= 1e-6);
        assert!(m.pruned_min.support.len() <= 5 && m.pruned_max.support.len() <= 5);
    }

    #[test]
    fn radius_grows_with_the_set() {
        let ch = amplitude_damping(0.4).unwrap();
        let a = discretize_image(&ch, 60, 0).unwrap().set;
        let b = discretize_image(&ch, 90, 0).unwrap().set;
        let mut union = a.states().to_vec();
        union.extend_from_slice(b.states());
        let opts = MetricsOptions {
            tol: 1e-11,
            ..Default::default()
        };
        let ma = set_metrics(a, opts).unwrap();
        let mu = set_metrics(StateSet::new(union).unwrap(), opts).unwrap();
        assert!(ma.report.converged && mu.report.converged);
        assert!(mu.chi_upper >= ma.chi_lower);
        assert!(mu.chi >= ma.chi - 1e-9);
    }
}
