//! Killing fields on `S^{2m-1}` and the radial/tangential decomposition.
//!
//! The rotation algebra `so(2m)` is spanned by the `m(2m-1)` matrices
//! `α_{ij} = (E_ij - E_ji)/√2`, orthonormal under `⟨A,B⟩ = tr(AᵀB)`. Each
//! generator induces the Killing field `X_k(x) = α_k x`, tangent to the
//! sphere `|x| = const`, and the reproducing identity
//!
//! ```text
//! Σ_k X_k(x) X_k(x)ᵀ = ½ (|x|² I - x xᵀ)
//! ```
//!
//! forces the companion fields `Y_k = 2 X_k`, so that any vector tangent at
//! `x` satisfies `V = Σ_k |x|^{-2} ⟨V, X_k(x)⟩ Y_k(x)`.

use crate::error::{Error, Result};

/// Scalar with `Y_k = REPRODUCING_FACTOR * X_k` in the trace-orthonormal
/// generator basis.
pub const REPRODUCING_FACTOR: f64 = 2.0;

const TOL_TANGENT: f64 = 1e-12;

/// Orthonormal antisymmetric generators of `so(2m)`, in lexicographic
/// `(i, j)` order, stored row-major as `2m × 2m` matrices.
#[derive(Debug, Clone)]
pub struct KillingBasis {
    m: u32,
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl KillingBasis {
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Ambient dimension `2m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, k: usize) -> &[f64] {
        &self.generators[k]
    }

    /// `X_k(x) = α_k x`.
    pub fn killing_field(&self, k: usize, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let g = &self.generators[k];
        let mut out = vec![0.0; d];
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += g[i * d + j] * x[j];
            }
            out[i] = acc;
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Build the generator basis `(E_ij - E_ji)/√2`, `1 ≤ i < j ≤ 2m`.
pub fn build_killing_basis(m: u32) -> Result<KillingBasis> {
    if m == 0 || m > 8 {
        return Err(Error::InvalidParameter(format!(
            "m must satisfy 1 <= m <= 8, got {m}"
        )));
    }
    let d = 2 * m as usize;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut generators = Vec::with_capacity(m as usize * (2 * m as usize - 1));
    for i in 0..d {
        for j in (i + 1)..d {
            let mut g = vec![0.0; d * d];
            g[i * d + j] = inv_sqrt2;
            g[j * d + i] = -inv_sqrt2;
            generators.push(g);
        }
    }
    debug_assert_eq!(generators.len(), m as usize * (2 * m as usize - 1));
    Ok(KillingBasis { m, dim: d, generators })
}

fn require_nonzero(x: &[f64]) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::InvalidParameter("base point x must be nonzero".into()));
    }
    Ok(r)
}

/// Reproduce a tangent vector from its Killing-field coefficients:
/// `Σ_k |x|^{-2} ⟨V, X_k(x)⟩ Y_k(x)`.
pub fn tangential_reproduce(basis: &KillingBasis, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let r = require_nonzero(x)?;
    let vn = norm(v);
    if dot(x, v).abs() > TOL_TANGENT * r * vn.max(1e-300) && vn > 0.0 {
        return Err(Error::Precondition(format!(
            "V is not tangent at x: <x,V> = {}",
            dot(x, v)
        )));
    }
    let d = basis.dim();
    let inv_r2 = 1.0 / (r * r);
    let mut out = vec![0.0; d];
    for k in 0..basis.len() {
        let xk = basis.killing_field(k, x);
        let coeff = inv_r2 * dot(v, &xk) * REPRODUCING_FACTOR;
        for i in 0..d {
            out[i] += coeff * xk[i];
        }
    }
    Ok(out)
}

/// Radial coefficient and tangential Killing coefficients of an arbitrary
/// vector; reconstruction is `radial · x/|x| + Σ_k coeffs[k] · Y_k(x)`.
pub fn decompose_vector(
    basis: &KillingBasis,
    x: &[f64],
    v: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let r = require_nonzero(x)?;
    let radial = dot(v, x) / r;
    let inv_r2 = 1.0 / (r * r);
    let coeffs = (0..basis.len())
        .map(|k| inv_r2 * dot(v, &basis.killing_field(k, x)))
        .collect();
    Ok((radial, coeffs))
}

/// Rebuild the vector from its decomposition.
pub fn reconstruct(basis: &KillingBasis, x: &[f64], radial: f64, coeffs: &[f64]) -> Vec<f64> {
    let d = basis.dim();
    let r = norm(x);
    let mut out: Vec<f64> = x.iter().map(|xi| radial * xi / r).collect();
    for k in 0..basis.len() {
        let xk = basis.killing_field(k, x);
        for i in 0..d {
            out[i] += coeffs[k] * REPRODUCING_FACTOR * xk[i];
        }
    }
    out
}

/// Max residual of `Σ_k X_k X_kᵀ - ½(|x|² I - x xᵀ)` at `x`.
pub fn outer_identity_residual(basis: &KillingBasis, x: &[f64]) -> f64 {
    let d = basis.dim();
    let mut sum = vec![0.0; d * d];
    for k in 0..basis.len() {
        let xk = basis.killing_field(k, x);
        for i in 0..d {
            for j in 0..d {
                sum[i * d + j] += xk[i] * xk[j];
            }
        }
    }
    let r2 = dot(x, x);
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let expected = 0.5 * (if i == j { r2 } else { 0.0 } - x[i] * x[j]);
            worst = worst.max((sum[i * d + j] - expected).abs());
        }
    }
    worst
}
