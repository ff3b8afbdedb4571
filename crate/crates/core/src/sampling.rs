//! Seeded random states.
//!
//! All randomness in the crate flows through [`seeded_rng`], so a single
//! integer seed reproduces every sampled quantity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::operator::{c, CMatrix, CVector, DensityMatrix, HermitianOperator};

/// Name and version of the generator behind [`seeded_rng`].
pub const RNG_NAME: &str = "ChaCha20Rng (rand_chacha 0.9)";

pub type CrateRng = ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> CrateRng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian_complex(rng: &mut impl Rng) -> crate::operator::C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random unit vector in `C^d`.
pub fn random_pure_vector(d: usize, rng: &mut impl Rng) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| gaussian_complex(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

/// Haar-random pure state.
pub fn random_pure_state(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let v = random_pure_vector(d, rng);
    DensityMatrix::from_trusted(HermitianOperator::symmetrized(&v * v.adjoint()))
}

/// Hilbert–Schmidt random mixed state `G G† / Tr(G G†)`, full rank almost surely.
pub fn random_mixed_state(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let m = &g * g.adjoint();
    let tr: f64 = (0..d).map(|i| m[(i, i)].re).sum();
    DensityMatrix::from_trusted(HermitianOperator::symmetrized(m.unscale(tr)))
}

/// Uniform point on the probability simplex with `k` atoms.
pub fn random_simplex(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    for x in &mut w {
        *x /= s;
    }
    w
}

/// Haar-random unitary, via QR of a complex Ginibre matrix.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..d {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

/// Two states diagonal in one shared random basis, with random spectra.
pub fn random_commuting_pair(d: usize, rng: &mut impl Rng) -> (DensityMatrix, DensityMatrix) {
    let u = random_unitary(d, rng);
    let make = |p: Vec<f64>| {
        let diag = HermitianOperator::from_real_diagonal(&p).into_matrix();
        DensityMatrix::from_trusted(HermitianOperator::symmetrized(&u * diag * u.adjoint()))
    };
    let a = random_simplex(d, rng);
    let b = random_simplex(d, rng);
    (make(a), make(b))
}
