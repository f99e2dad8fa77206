//! Weak orthogonality of the growing exponentials `e^{n_k t}`.
//!
//! Normalizing the exponentials in `L²(0, L)` gives the Gram matrix
//!
//! ```text
//! M_kl = (2√(n_k n_l)/(n_k+n_l)) · (1-e^{-(n_k+n_l)L}) / (√(1-e^{-2n_k L}) √(1-e^{-2n_l L}))
//! ```
//!
//! a perturbation `M = M̄ + E` of the limit matrix `M̄_kl = 2√(n_k n_l)/(n_k+n_l)`.
//! `M̄` is a symmetrically scaled Cauchy matrix, so its determinant has the
//! exact closed form `Π_k 2n_k · Π_{k<l}(n_k-n_l)² / Π_{k,l}(n_k+n_l)`,
//! computed here in exact rational arithmetic (the `√(n_k n_l)` factors
//! square out). The certificate chains the perturbation bound
//! `|λ_E| ≤ 2m e^{-2nL}` with the smallest eigenvalue of `M̄` to a lower
//! bound `δ` on the smallest eigenvalue of `M`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::jacobi::{smallest_eigenvalue, symmetric_eigenvalues};
use crate::modes::mode_spectrum;

const EIG_TOL: f64 = 1e-13;

/// The Gram matrix `M` on `(0, L)`, its limit `M̄`, and the error `E = M - M̄`.
#[derive(Debug, Clone)]
pub struct GramPair {
    pub m: u32,
    pub n: u32,
    pub big_l: f64,
    pub exponents: Vec<i64>,
    pub m_mat: Vec<Vec<f64>>,
    pub mbar: Vec<Vec<f64>>,
    pub e_mat: Vec<Vec<f64>>,
}

pub fn gram_pair(m: u32, n: u32, big_l: f64) -> Result<GramPair> {
    if n == 0 {
        return Err(Error::Precondition("weak orthogonality requires n >= 1".into()));
    }
    if !(big_l >= 1.0) {
        return Err(Error::Precondition(format!(
            "the perturbation bound is stated for L >= 1, got {big_l}"
        )));
    }
    let spec = mode_spectrum(m, n)?;
    let nk = &spec.exponents;
    let dim = m as usize;
    let mut m_mat = vec![vec![0.0; dim]; dim];
    let mut mbar = vec![vec![0.0; dim]; dim];
    let mut e_mat = vec![vec![0.0; dim]; dim];
    for k in 0..dim {
        for l in 0..dim {
            if k == l {
                // normalized diagonal is exactly 1
                mbar[k][l] = 1.0;
                m_mat[k][l] = 1.0;
                continue;
            }
            let (a, b) = (nk[k] as f64, nk[l] as f64);
            let limit = 2.0 * (a * b).sqrt() / (a + b);
            // all exponentials negative, so no overflow anywhere in the sweep
            let num = 1.0 - (-(a + b) * big_l).exp();
            let den = (1.0 - (-2.0 * a * big_l).exp()).sqrt()
                * (1.0 - (-2.0 * b * big_l).exp()).sqrt();
            let full = limit * num / den;
            mbar[k][l] = limit;
            m_mat[k][l] = full;
            e_mat[k][l] = full - limit;
        }
    }
    Ok(GramPair {
        m,
        n,
        big_l,
        exponents: nk.clone(),
        m_mat,
        mbar,
        e_mat,
    })
}

/// Exact `det M̄ = Π_k 2n_k · Π_{k<l}(n_k-n_l)² / Π_{k,l}(n_k+n_l)`.
pub fn cauchy_determinant(m: u32, n: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let spec = mode_spectrum(m, n)?;
    let nk = &spec.exponents;
    let mut num = BigInt::one();
    for &a in nk {
        num *= BigInt::from(2 * a);
    }
    for k in 0..nk.len() {
        for l in (k + 1)..nk.len() {
            let d = BigInt::from(nk[k] - nk[l]);
            num *= &d * &d;
        }
    }
    let mut den = BigInt::one();
    for &a in nk {
        for &b in nk {
            den *= BigInt::from(a + b);
        }
    }
    Ok(BigRational::new(num, den))
}

/// `det` by LU with partial pivoting; cross-check only.
pub fn float_determinant(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut lu: Vec<Vec<f64>> = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[i][col].abs().partial_cmp(&lu[j][col].abs()).unwrap())
            .unwrap();
        if lu[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            lu.swap(pivot, col);
            det = -det;
        }
        det *= lu[col][col];
        for row in (col + 1)..n {
            let f = lu[row][col] / lu[col][col];
            for c in col..n {
                let sub = f * lu[col][c];
                lu[row][c] -= sub;
            }
        }
    }
    det
}

/// `|λ_E|` as the largest eigenvalue magnitude of `E`.
pub fn lambda_e_extreme(pair: &GramPair) -> Result<f64> {
    let eigs = symmetric_eigenvalues(&pair.e_mat, EIG_TOL)?;
    Ok(eigs
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x.abs())))
}

/// The paper-route bound `tr(E²)^{1/2}` on `|λ_E|`.
pub fn lambda_e_frobenius(pair: &GramPair) -> f64 {
    pair.e_mat
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakOrthogonalityCertificate {
    pub m: u32,
    pub n: u32,
    #[serde(rename = "L")]
    pub big_l: f64,
    /// Smallest eigenvalue of `M`.
    pub lambda1: f64,
    /// Smallest eigenvalue of `M̄`.
    pub lambda1_bar: f64,
    /// `2m e^{-2nL}`.
    pub lambda_e_bound: f64,
    /// Exact `det M̄` as a rational string.
    pub cauchy_det: String,
    /// Proof-following lower bound `max(λ̄₁ - bound, 0)` on `λ₁`.
    pub delta: f64,
    pub valid: bool,
}

/// Certify the eigenvalue chain `λ₁ ≥ λ̄₁ - |λ_E| ≥ λ̄₁ - 2m e^{-2nL}` plus
/// the determinant route `λ̄₁ ≥ det M̄ / m^{m-1}` (each of the other
/// eigenvalues is below `tr M̄ = m`).
pub fn weak_orthogonality_certificate(
    m: u32,
    n: u32,
    big_l: f64,
) -> Result<WeakOrthogonalityCertificate> {
    let pair = gram_pair(m, n, big_l)?;
    let lambda1 = smallest_eigenvalue(&pair.m_mat, EIG_TOL)?;
    let lambda1_bar = smallest_eigenvalue(&pair.mbar, EIG_TOL)?;
    let bound = 2.0 * m as f64 * (-2.0 * n as f64 * big_l).exp();
    let det = cauchy_determinant(m, n)?;
    let delta = (lambda1_bar - bound).max(0.0);
    let det_f = det.to_f64().unwrap_or(0.0);
    let factor_bound = det_f / (m as f64).powi(m as i32 - 1);
    let tol = 1e-9;
    let valid = lambda1 >= lambda1_bar - bound - tol
        && lambda1_bar >= factor_bound - tol
        && lambda1 >= delta - tol;
    Ok(WeakOrthogonalityCertificate {
        m,
        n,
        big_l,
        lambda1,
        lambda1_bar,
        lambda_e_bound: bound,
        cauchy_det: det.to_string(),
        delta,
        valid,
    })
}

/// Empirical constant `C̃_emp = min_n e^{nL/2} λ₁(M)` over a sweep; the
/// closed form of `C̃` is not pinned down anywhere, so only the observed
/// minimum is reported.
pub fn empirical_c_tilde(certs: &[WeakOrthogonalityCertificate]) -> f64 {
    certs
        .iter()
        .map(|c| (c.n as f64 * c.big_l / 2.0).exp() * c.lambda1)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::three_circle::interval_gram;

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn mbar_entry_example() {
        // m=2, n=1: n_k = (1,3), M̄₁₂ = 2√3/4 = √3/2
        let pair = gram_pair(2, 1, 4.0).unwrap();
        assert!((pair.mbar[0][1] - 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert_eq!(pair.mbar[0][0], 1.0);
    }

    #[test]
    fn m_entry_example() {
        let pair = gram_pair(2, 1, 1.0).unwrap();
        assert!((pair.m_mat[0][1] - 0.91541).abs() < 5e-6, "{}", pair.m_mat[0][1]);
    }

    #[test]
    fn one_by_one_is_trivial() {
        let pair = gram_pair(1, 4, 2.0).unwrap();
        assert_eq!(pair.m_mat, vec![vec![1.0]]);
        assert_eq!(pair.mbar, vec![vec![1.0]]);
        assert_eq!(cauchy_determinant(1, 4).unwrap(), BigRational::one());
    }

    #[test]
    fn preconditions() {
        assert!(gram_pair(2, 0, 2.0).is_err());
        assert!(gram_pair(2, 1, 0.5).is_err());
    }

    #[test]
    fn entries_match_interval_gram_normalization() {
        let pair = gram_pair(3, 2, 1.5).unwrap();
        let s = interval_gram(&pair.exponents, 0.0, pair.big_l).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                let normalized = s.entries[k][l] / (s.entries[k][k] * s.entries[l][l]).sqrt();
                assert!(
                    (pair.m_mat[k][l] - normalized).abs() <= 1e-10 * normalized.abs(),
                    "({k},{l})"
                );
            }
        }
    }

    #[test]
    fn cauchy_determinant_examples() {
        assert_eq!(cauchy_determinant(2, 1).unwrap(), rational(1, 4));
        assert_eq!(cauchy_determinant(2, 2).unwrap(), rational(1, 9));
    }

    #[test]
    fn cauchy_matches_float_lu() {
        for m in 1..=5u32 {
            for n in [1u32, 2, 5, 17] {
                let pair = gram_pair(m, n, 3.0).unwrap();
                let exact = cauchy_determinant(m, n).unwrap().to_f64().unwrap();
                let lu = float_determinant(&pair.mbar);
                // loose tolerance: Cauchy matrices are badly conditioned
                assert!(
                    (exact - lu).abs() <= 1e-6 * exact.abs(),
                    "m={m} n={n}: {exact} vs {lu}"
                );
            }
        }
    }

    #[test]
    fn certificate_example_l4() {
        let c = weak_orthogonality_certificate(2, 1, 4.0).unwrap();
        assert!((c.lambda_e_bound - 4.0 * (-8f64).exp()).abs() < 1e-15);
        assert!((c.lambda1_bar - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-12);
        assert!((c.delta - 0.132633).abs() < 5e-6, "{}", c.delta);
        assert!(c.valid && c.lambda1 >= c.delta);
    }

    #[test]
    fn certificate_example_l1_vacuous_bound() {
        let c = weak_orthogonality_certificate(2, 1, 1.0).unwrap();
        assert!(c.lambda_e_bound > c.lambda1_bar);
        assert_eq!(c.delta, 0.0);
        assert!((c.lambda1 - 0.0846).abs() < 5e-4, "{}", c.lambda1);
        assert!(c.valid);
    }

    #[test]
    fn certificate_one_by_one() {
        let c = weak_orthogonality_certificate(1, 3, 2.0).unwrap();
        assert_eq!(c.lambda1, 1.0);
        assert_eq!(c.lambda1_bar, 1.0);
        assert!((c.delta - (1.0 - 2.0 * (-12f64).exp())).abs() < 1e-15);
        assert!(c.valid);
    }

    #[test]
    fn lambda_e_bounds_hold_on_small_sweep() {
        for m in 1..=4u32 {
            for n in [1u32, 3, 10] {
                for l in [1.0, 2.0, 4.0] {
                    let pair = gram_pair(m, n, l).unwrap();
                    let cap = 2.0 * m as f64 * (-2.0 * n as f64 * l).exp();
                    assert!(lambda_e_extreme(&pair).unwrap() <= cap + 1e-12);
                    assert!(lambda_e_frobenius(&pair) <= cap + 1e-12);
                }
            }
        }
    }

    #[test]
    fn quadratic_form_restatement() {
        use rand::{Rng, SeedableRng};
        // ∫₀ᴸ (Σ A_k f_k)² = Aᵀ M A ≥ (λ₁ - tol) ΣA_k²
        let pair = gram_pair(3, 2, 2.0).unwrap();
        let lambda1 = smallest_eigenvalue(&pair.m_mat, 1e-13).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut form = 0.0;
            let mut norm2 = 0.0;
            for k in 0..3 {
                norm2 += a[k] * a[k];
                for l in 0..3 {
                    form += a[k] * pair.m_mat[k][l] * a[l];
                }
            }
            assert!(form >= (lambda1 - 1e-9) * norm2);
        }
    }
}
