//! Dense Hermitian linear algebra and the density-matrix type.
//!
//! Everything here is built on `nalgebra`'s complex Hermitian eigensolver.
//! Matrix functions (logarithms, projectors) are applied through the
//! spectral decomposition, so [`Spectrum`] is the workhorse of the crate.

use std::cmp::Ordering;
use std::sync::OnceLock;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{check_dims, validation, Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Entrywise tolerance for the Hermitian check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on the unit-trace condition.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEGATIVE_DUST_TOL, 0)` are clipped to zero.
pub const NEGATIVE_DUST_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are treated as one eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Default threshold for "nonzero" eigenvalues in support computations.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// A Hermitian operator on a `dim`-dimensional space.
///
/// The stored matrix is exactly Hermitian: the constructor checks the input
/// within [`HERMITIAN_TOL`] and then replaces it by `(A + A†)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(validation(format!(
                "operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(validation("operator must have positive dimension"));
        }
        let d = m.nrows();
        for i in 0..d {
            for j in 0..=i {
                let diff = m[(i, j)] - m[(j, i)].conj();
                if !(diff.norm() <= HERMITIAN_TOL) {
                    return Err(validation(format!(
                        "operator is not Hermitian at ({i},{j}): deviation {:.3e}",
                        diff.norm()
                    )));
                }
            }
        }
        Ok(Self::symmetrized(m))
    }

    /// Skips validation; the input is still symmetrized.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let adj = m.adjoint();
        let m = (m + adj).scale(0.5);
        Self { m }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = c(x, 0.0);
        }
        Self { m }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            m: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            m: CMatrix::zeros(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn eig(&self) -> Spectrum {
        Spectrum::of_hermitian(&self.m)
    }

    /// Eigenvalues only, sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        ev
    }

    /// Real part of `Tr(self * other)`.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        trace_product(&self.m, &other.m)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.scale(s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m - &other.m,
        })
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|x| x.abs()).sum()
    }

    /// Applies `f` to every eigenvalue.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let s = self.eig();
        s.rebuild(f)
    }
}

/// Real part of `Tr(a * b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for k in 0..d {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

/// Spectral decomposition with eigenvalues sorted in descending order.
///
/// Inside an eigenspace (eigenvalues within [`DEGENERACY_TOL`]) the vectors are
/// phase-normalized and ordered lexicographically on their rounded entries, so
/// the output is deterministic for identical input.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, paired with `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    fn of_hermitian(m: &CMatrix) -> Self {
        let d = m.nrows();
        let se = m.clone().symmetric_eigen();
        let mut vecs: Vec<(f64, CVector)> = (0..d)
            .map(|k| {
                let mut v: CVector = se.eigenvectors.column(k).into_owned();
                normalize_phase(&mut v);
                (se.eigenvalues[k], v)
            })
            .collect();
        vecs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

        // Deterministic order within degenerate clusters.
        let mut start = 0;
        while start < d {
            let mut end = start + 1;
            while end < d && (vecs[end - 1].0 - vecs[end].0).abs() <= DEGENERACY_TOL {
                end += 1;
            }
            if end - start > 1 {
                vecs[start..end].sort_by_key(|a| lex_key(&a.1));
            }
            start = end;
        }

        let eigenvalues = vecs.iter().map(|(l, _)| *l).collect();
        let mut eigenvectors = CMatrix::zeros(d, d);
        for (k, (_, v)) in vecs.iter().enumerate() {
            eigenvectors.set_column(k, v);
        }
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// `Σ f(λ_k) v_k v_k†`, skipping terms where `f` returns exactly zero.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            let v = self.eigenvectors.column(k);
            m += (v * v.adjoint()).scale(w);
        }
        HermitianOperator::symmetrized(m)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.rebuild(|x| x)
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> HermitianOperator {
        self.rebuild(|x| if keep(x) { 1.0 } else { 0.0 })
    }

    /// `⟨v_k| a |v_k⟩` for every eigenvector.
    pub fn diagonal_of(&self, a: &CMatrix) -> Vec<f64> {
        let av = a * &self.eigenvectors;
        (0..self.dim())
            .map(|k| {
                self.eigenvectors
                    .column(k)
                    .iter()
                    .zip(av.column(k).iter())
                    .map(|(x, y)| (x.conj() * y).re)
                    .sum()
            })
            .collect()
    }
}

fn normalize_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() >= max - 1e-12).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

fn lex_key(v: &CVector) -> Vec<i64> {
    v.iter()
        .flat_map(|z| [(z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64])
        .map(|x| -x)
        .collect()
}

/// Spectral decomposition of a Hermitian operator.
pub fn eig(h: &HermitianOperator) -> Spectrum {
    h.eig()
}

/// Validates a raw matrix and decomposes it.
pub fn eig_matrix(m: &CMatrix) -> Result<Spectrum> {
    Ok(HermitianOperator::new(m.clone())?.eig())
}

/// A positive semi-definite, unit-trace Hermitian operator.
#[derive(Debug)]
pub struct DensityMatrix {
    op: HermitianOperator,
    spectrum: OnceLock<Spectrum>,
}

impl Clone for DensityMatrix {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            op: self.op.clone(),
            spectrum,
        }
    }
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.op == other.op
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    ///
    /// Negative eigenvalues down to `-1e-10` are clipped and the result is
    /// renormalized; anything more negative is rejected.
    pub fn new(m: CMatrix) -> Result<Self> {
        let op = HermitianOperator::new(m)?;
        Self::from_operator(op)
    }

    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !((tr - 1.0).abs() <= TRACE_TOL) {
            return Err(validation(format!("trace must be 1, got {tr}")));
        }
        Self::clip_and_normalize(op)
    }

    /// Like [`DensityMatrix::from_operator`] but renormalizes any positive trace.
    /// Used for channel outputs and mixtures that carry rounding error.
    pub(crate) fn normalized(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !(tr > 0.0) {
            return Err(validation(format!(
                "cannot normalize operator with trace {tr}"
            )));
        }
        Self::clip_and_normalize(op.scale(1.0 / tr))
    }

    fn clip_and_normalize(op: HermitianOperator) -> Result<Self> {
        let spec = op.eig();
        let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -NEGATIVE_DUST_TOL {
            return Err(validation(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        if min >= 0.0 {
            let tr = op.trace();
            let (op, spec) = if tr == 1.0 {
                (op, spec)
            } else {
                let mut spec = spec;
                for x in &mut spec.eigenvalues {
                    *x /= tr;
                }
                (op.scale(1.0 / tr), spec)
            };
            let spectrum = OnceLock::new();
            let _ = spectrum.set(spec);
            return Ok(Self { op, spectrum });
        }
        let clipped: f64 = spec.eigenvalues.iter().map(|x| x.max(0.0)).sum();
        let rebuilt = spec.rebuild(|x| x.max(0.0) / clipped);
        Ok(Self {
            op: rebuilt,
            spectrum: OnceLock::new(),
        })
    }

    /// Trusted constructor for values known to be valid states.
    pub(crate) fn from_trusted(op: HermitianOperator) -> Self {
        Self {
            op,
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_real_diagonal(p: &[f64]) -> Result<Self> {
        Self::from_operator(HermitianOperator::from_real_diagonal(p))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_trusted(HermitianOperator::identity(d).scale(1.0 / d as f64))
    }

    /// `|ψ⟩⟨ψ|` for the normalized input vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = CVector::from_column_slice(psi);
        let norm = v.norm();
        if !(norm > 0.0) {
            return Err(validation("pure state vector must be nonzero"));
        }
        let v = v.unscale(norm);
        Ok(Self::from_trusted(HermitianOperator::symmetrized(
            &v * v.adjoint(),
        )))
    }

    /// Computational basis state `|k⟩⟨k|` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut p = vec![0.0; d];
        p[k] = 1.0;
        Self::from_trusted(HermitianOperator::from_real_diagonal(&p))
    }

    /// Qubit state with Bloch vector `(x, y, z)`, `|r| ≤ 1`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r2 = x * x + y * y + z * z;
        if r2 > 1.0 + 1e-12 {
            return Err(validation(format!("Bloch vector length {} > 1", r2.sqrt())));
        }
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(0.5 * (1.0 + z), 0.0),
                c(0.5 * x, -0.5 * y),
                c(0.5 * x, 0.5 * y),
                c(0.5 * (1.0 - z), 0.0),
            ],
        );
        Self::normalized(HermitianOperator::symmetrized(m))
    }

    /// Bloch vector of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        check_dims(2, self.dim())?;
        let m = self.op.matrix();
        Ok([
            2.0 * m[(1, 0)].re,
            2.0 * m[(1, 0)].im,
            m[(0, 0)].re - m[(1, 1)].re,
        ])
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be nonnegative and sum to 1.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(validation("mixture needs one weight per state"));
        }
        let d = states[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            check_dims(d, s.dim())?;
            if *w < 0.0 {
                return Err(validation("mixture weights must be nonnegative"));
            }
            if *w > 0.0 {
                m += s.matrix().scale(*w);
            }
        }
        Self::normalized(HermitianOperator::symmetrized(m))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_trusted(self.op.kron(&other.op))
    }

    /// `ρ^{⊗n}` by repeated Kronecker products.
    pub fn tensor_power(&self, n: usize) -> Self {
        let mut out = self.clone();
        for _ in 1..n {
            out = out.kron(self);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    /// Cached spectral decomposition.
    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| self.op.eig())
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum().eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Smallest eigenvalue above `tol`.
    pub fn min_nonzero_eigenvalue(&self, tol: f64) -> f64 {
        self.eigenvalues()
            .iter()
            .copied()
            .filter(|&x| x > tol)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > tol).count()
    }

    /// Real part of `Tr(self * a)`.
    pub fn expectation(&self, a: &CMatrix) -> f64 {
        trace_product(self.matrix(), a)
    }
}

/// `½ Σ |eig(a − b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let diff = HermitianOperator::symmetrized(a.matrix() - b.matrix());
    Ok((0.5 * diff.trace_norm()).clamp(0.0, 1.0))
}

/// Projector onto the eigenvectors of `rho` with eigenvalue above `tol`.
pub fn support_projector(rho: &DensityMatrix, tol: f64) -> HermitianOperator {
    rho.spectrum().projector(|x| x > tol)
}

/// Matrix logarithm on the support of `rho`; kernel directions map to zero.
pub fn log_on_support(rho: &DensityMatrix) -> HermitianOperator {
    rho.spectrum()
        .rebuild(|x| if x > DEFAULT_SUPPORT_TOL { x.ln() } else { 0.0 })
}

/// Fails unless both states live in the same dimension.
pub fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    check_dims(a.dim(), b.dim())
}

impl TryFrom<CMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: CMatrix) -> Result<Self> {
        Self::new(m)
    }
}

/// Pauli matrices `(X, Y, Z)`.
pub fn paulis() -> [CMatrix; 3] {
    let z0 = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[z0, one, one, z0]),
        CMatrix::from_row_slice(2, 2, &[z0, -i, i, z0]),
        CMatrix::from_row_slice(2, 2, &[one, z0, z0, -one]),
    ]
}
