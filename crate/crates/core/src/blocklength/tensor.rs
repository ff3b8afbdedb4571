//! Exact `D_h^ε(ρ^{⊗n}‖σ^{⊗n})` for small tensor powers.
//!
//! Qubit powers are reduced by Schur–Weyl duality: `A^{⊗n}` is unitarily
//! equivalent to `⊕_k det(A)^k Sym^{n−2k}(A) ⊗ 1_{m_k}` with
//! `m_k = C(n,k) − C(n,k−1)`, in a basis that does not depend on `A`. Both
//! hypotheses share that basis, so the optimal test splits over the blocks.

use crate::divergences::hypothesis::{dh, dh_blocks, NpBlock};
use crate::error::{check_dims, Error, Result};
use crate::operator::{c, CMatrix, DensityMatrix, HermitianOperator, C64};

/// Largest total dimension `d^n` accepted by [`iid_dh_exact`].
pub const TENSOR_BUDGET: usize = 1024;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of `(a + b t)^e` in powers of `t`.
fn linear_power(a: C64, b: C64, e: usize) -> Vec<C64> {
    let mut out = vec![c(1.0, 0.0)];
    for _ in 0..e {
        let mut next = vec![c(0.0, 0.0); out.len() + 1];
        for (i, v) in out.iter().enumerate() {
            next[i] += v * a;
            next[i + 1] += v * b;
        }
        out = next;
    }
    out
}

/// `A^{⊗j}` restricted to the symmetric subspace, in the orthonormal Dicke basis.
pub fn symmetric_power(a: &CMatrix, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(j + 1, j + 1);
    for b in 0..=j {
        // image of e0^{j−b} e1^b, with t counting factors of e1
        let p = linear_power(a[(0, 0)], a[(1, 0)], j - b);
        let q = linear_power(a[(0, 1)], a[(1, 1)], b);
        for (i, x) in p.iter().enumerate() {
            for (k, y) in q.iter().enumerate() {
                m[(i + k, b)] += x * y;
            }
        }
    }
    for r in 0..=j {
        for col in 0..=j {
            m[(r, col)] *= (binomial(j, col) / binomial(j, r)).sqrt();
        }
    }
    m
}

/// Schur–Weyl blocks of `(ρ^{⊗n}, σ^{⊗n})` for qubit states.
pub fn schur_weyl_blocks(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
) -> Result<Vec<NpBlock>> {
    check_dims(2, rho.dim())?;
    check_dims(2, sigma.dim())?;
    let det = |m: &CMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let (dr, ds) = (det(rho.matrix()), det(sigma.matrix()));
    let mut blocks = Vec::new();
    for k in 0..=n / 2 {
        let mult = binomial(n, k) - if k == 0 { 0.0 } else { binomial(n, k - 1) };
        if mult <= 0.0 {
            continue;
        }
        let j = n - 2 * k;
        let r = symmetric_power(rho.matrix(), j).scale(dr.powi(k as i32));
        let s = symmetric_power(sigma.matrix(), j).scale(ds.powi(k as i32));
        blocks.push(NpBlock::new(
            mult,
            HermitianOperator::symmetrized(r),
            HermitianOperator::symmetrized(s),
        )?);
    }
    Ok(blocks)
}

fn check_budget(d: usize, n: usize) -> Result<()> {
    let needed = (d as f64).powi(n as i32);
    if needed > TENSOR_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            what: format!("{d}^{n}-dimensional tensor power"),
            needed: needed.min(usize::MAX as f64) as usize,
            limit: TENSOR_BUDGET,
        });
    }
    Ok(())
}

/// `D_h^eps(ρ^{⊗n}‖σ^{⊗n})` for `d^n ≤ 1024`.
pub fn iid_dh_exact(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, eps: f64) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    if n == 0 {
        return Err(crate::error::validation("n must be at least 1"));
    }
    check_budget(rho.dim(), n)?;
    if rho.dim() == 2 {
        dh_blocks(&schur_weyl_blocks(rho, sigma, n)?, eps)
    } else {
        iid_dh_dense(rho, sigma, n, eps)
    }
}

/// Same quantity from explicit Kronecker powers.
pub fn iid_dh_dense(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, eps: f64) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    check_budget(rho.dim(), n)?;
    dh(&rho.tensor_power(n), &sigma.tensor_power(n), eps)
}
