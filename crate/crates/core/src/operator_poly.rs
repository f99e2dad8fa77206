//! The cylinder-coordinate operator polynomial.
//!
//! On the half-cylinder `R × S^{2m-1}` with `t = log ρ`, the iterated
//! Laplacian factors as `Δ^m u = e^{-2mt} P_m(∂_t, Δ_S) u` for a polynomial
//! `P_m` in the two commuting symbols `∂_t` and `Δ_S = Δ_{S^{2m-1}}`. This
//! module builds `P_m` with exact integer arithmetic through the recursion
//!
//! ```text
//! P_0 = 1,    P_{l+1} = (∂_t² + Δ_S - 4l(m-1-l) + 2(m-1-2l) ∂_t) P_l
//! ```
//!
//! and provides the structure checks: no odd `∂_t`-powers survive, the purely
//! radial coefficients alternate in sign, and the radial slice factors as
//! `X² (X²-2²) ⋯ (X²-(2(m-1))²)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on `m`; coefficient growth is modest but inputs beyond this
/// are almost certainly typos.
pub const DEFAULT_M_CAP: u32 = 12;

/// `P_m` as a sparse map from `(p, q)` to the integer coefficient of
/// `∂_t^p Δ_S^q`. Zero coefficients are never stored, so "no odd p" is a
/// structural property of the map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorPolynomial {
    m: u32,
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl OperatorPolynomial {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), BigInt> {
        &self.coeffs
    }

    /// Coefficient of `∂_t^p Δ_S^q`, zero if absent.
    pub fn coeff(&self, p: u32, q: u32) -> BigInt {
        self.coeffs.get(&(p, q)).cloned().unwrap_or_else(BigInt::zero)
    }
}

fn prune(map: &mut BTreeMap<(u32, u32), BigInt>) {
    map.retain(|_, a| !a.is_zero());
}

/// One step of the recursion: multiply by `∂_t² + Δ_S + b_l ∂_t - c_l`
/// where `b_l = 2(m-1-2l)` and `c_l = 4l(m-1-l)`, for the fixed target `m`.
pub fn recursion_step(prev: &OperatorPolynomial, l: u32, m: u32) -> OperatorPolynomial {
    let b_l = BigInt::from(2 * (m as i64 - 1 - 2 * l as i64));
    let c_l = BigInt::from(4 * l as i64 * (m as i64 - 1 - l as i64));
    let mut next: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    for (&(p, q), a) in &prev.coeffs {
        *next.entry((p + 2, q)).or_insert_with(BigInt::zero) += a;
        *next.entry((p, q + 1)).or_insert_with(BigInt::zero) += a;
        *next.entry((p + 1, q)).or_insert_with(BigInt::zero) += a * &b_l;
        *next.entry((p, q)).or_insert_with(BigInt::zero) -= a * &c_l;
    }
    prune(&mut next);
    OperatorPolynomial { m, coeffs: next }
}

/// All intermediates `P_1, …, P_m` of the recursion (with the constants of
/// the target `m` throughout). Exposed so the recursion itself can be tested.
pub fn build_tower(m: u32) -> Result<Vec<OperatorPolynomial>> {
    build_tower_with_cap(m, DEFAULT_M_CAP)
}

pub fn build_tower_with_cap(m: u32, cap: u32) -> Result<Vec<OperatorPolynomial>> {
    if m == 0 || m > cap {
        return Err(Error::InvalidParameter(format!(
            "m must satisfy 1 <= m <= {cap}, got {m}"
        )));
    }
    let mut tower = Vec::with_capacity(m as usize);
    let mut current = OperatorPolynomial {
        m,
        coeffs: BTreeMap::from([((0, 0), BigInt::one())]),
    };
    for l in 0..m {
        current = recursion_step(&current, l, m);
        tower.push(current.clone());
    }
    Ok(tower)
}

/// `P_m` itself.
pub fn build_operator_polynomial(m: u32) -> Result<OperatorPolynomial> {
    Ok(build_tower(m)?.pop().expect("tower is nonempty"))
}

/// The radial slice `Σ_p a_{p,0} X^p` as a dense coefficient vector,
/// index = power of `X`, length `2m + 1`.
pub fn radial_restriction(poly: &OperatorPolynomial) -> Vec<BigInt> {
    let deg = 2 * poly.m as usize;
    let mut out = vec![BigInt::zero(); deg + 1];
    for (&(p, q), a) in &poly.coeffs {
        if q == 0 {
            out[p as usize] = a.clone();
        }
    }
    out
}

/// Expansion of `X² Π_{j=1}^{m-1} (X² - (2j)²)`, the factorized form of the
/// radial slice.
pub fn radial_factorization(m: u32) -> Vec<BigInt> {
    // start with X^2
    let mut out = vec![BigInt::zero(), BigInt::zero(), BigInt::one()];
    for j in 1..m {
        let sq = BigInt::from(4 * j as i64 * j as i64);
        let mut next = vec![BigInt::zero(); out.len() + 2];
        for (pow, a) in out.iter().enumerate() {
            next[pow + 2] += a;
            next[pow] -= a * &sq;
        }
        out = next;
    }
    out
}

/// `Σ a_{p,q} λ^p eig^q`, exactly.
pub fn evaluate_at_mode(
    poly: &OperatorPolynomial,
    lambda: &BigRational,
    eig: &BigRational,
) -> BigRational {
    let deg = 2 * poly.m as usize;
    let mut lambda_pow = Vec::with_capacity(deg + 1);
    let mut eig_pow = Vec::with_capacity(poly.m as usize + 1);
    lambda_pow.push(BigRational::one());
    eig_pow.push(BigRational::one());
    for p in 1..=deg {
        let prev = lambda_pow[p - 1].clone();
        lambda_pow.push(prev * lambda);
    }
    for q in 1..=poly.m as usize {
        let prev = eig_pow[q - 1].clone();
        eig_pow.push(prev * eig);
    }
    let mut acc = BigRational::zero();
    for (&(p, q), a) in &poly.coeffs {
        acc += BigRational::from(a.clone()) * &lambda_pow[p as usize] * &eig_pow[q as usize];
    }
    acc
}

/// Independent oracle for the action of `Δ^m` on a separated mode: the
/// classical one-step rule `Δ(r^λ φ) = (λ(λ+2m-2) - μ) r^{λ-2} φ` iterated
/// `m` times gives the product `Π_{j=0}^{m-1} ((λ-2j)(λ-2j+2m-2) - μ)`.
pub fn laplacian_mode_oracle(m: u32, lambda: &BigRational, mu: &BigRational) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..m as i64 {
        let shift = lambda - BigRational::from(BigInt::from(2 * j));
        let factor = &shift * (&shift + BigRational::from(BigInt::from(2 * m as i64 - 2))) - mu;
        acc *= factor;
    }
    acc
}

/// Outcome of the structure checks, with the first offending coefficient on
/// failure.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub no_odd_p: bool,
    pub signs: bool,
    pub factorization: bool,
    /// `(p, q, a)` of the coefficient that broke a check, if any.
    pub offending: Option<(u32, u32, String)>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.no_odd_p && self.signs && self.factorization
    }
}

/// Check the three structure claims: no odd `p`, alternating signs of the
/// radial coefficients, and the radial factorization identity.
pub fn verify_structure(poly: &OperatorPolynomial) -> StructureReport {
    let m = poly.m;
    let mut report = StructureReport {
        no_odd_p: true,
        signs: true,
        factorization: true,
        offending: None,
    };
    for (&(p, q), a) in &poly.coeffs {
        if p % 2 == 1 {
            report.no_odd_p = false;
            report.offending.get_or_insert((p, q, a.to_string()));
        }
    }
    // (-1)^{m - p/2} a_{p,0} > 0 for p = 2, 4, ..., 2m
    for p in (2..=2 * m).step_by(2) {
        let a = poly.coeff(p, 0);
        let signed = if (m - p / 2) % 2 == 0 { a.clone() } else { -a.clone() };
        if !signed.is_positive() {
            report.signs = false;
            report.offending.get_or_insert((p, 0, a.to_string()));
        }
    }
    if radial_restriction(poly) != radial_factorization(m) {
        report.factorization = false;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn coeffs_of(m: u32) -> BTreeMap<(u32, u32), BigInt> {
        build_operator_polynomial(m).unwrap().coeffs
    }

    #[test]
    fn m1_is_laplace_beltrami_symbol() {
        let expected = BTreeMap::from([
            ((2, 0), BigInt::from(1)),
            ((0, 1), BigInt::from(1)),
        ]);
        assert_eq!(coeffs_of(1), expected);
    }

    #[test]
    fn m2_matches_hand_expansion() {
        // (∂_t² + Δ)² - 4∂_t²
        let expected = BTreeMap::from([
            ((4, 0), BigInt::from(1)),
            ((2, 1), BigInt::from(2)),
            ((0, 2), BigInt::from(1)),
            ((2, 0), BigInt::from(-4)),
        ]);
        assert_eq!(coeffs_of(2), expected);
    }

    #[test]
    fn m3_radial_slice() {
        let p = build_operator_polynomial(3).unwrap();
        assert_eq!(p.coeff(6, 0), BigInt::from(1));
        assert_eq!(p.coeff(4, 0), BigInt::from(-20));
        assert_eq!(p.coeff(2, 0), BigInt::from(64));
    }

    #[test]
    fn rejects_out_of_range_m() {
        assert!(build_operator_polynomial(0).is_err());
        assert!(build_operator_polynomial(13).is_err());
        assert!(build_tower_with_cap(13, 16).is_ok());
    }

    #[test]
    fn radial_restriction_examples() {
        // m=1 -> X², m=2 -> X⁴ - 4X², m=3 -> X⁶ - 20X⁴ + 64X²
        let r1 = radial_restriction(&build_operator_polynomial(1).unwrap());
        assert_eq!(r1, vec![BigInt::from(0), BigInt::from(0), BigInt::from(1)]);
        let r2 = radial_restriction(&build_operator_polynomial(2).unwrap());
        assert_eq!(
            r2,
            [0i64, 0, -4, 0, 1].map(BigInt::from).to_vec()
        );
        let r3 = radial_restriction(&build_operator_polynomial(3).unwrap());
        assert_eq!(
            r3,
            [0i64, 0, 64, 0, -20, 0, 1].map(BigInt::from).to_vec()
        );
    }

    #[test]
    fn evaluate_examples() {
        let p2 = build_operator_polynomial(2).unwrap();
        // indicial root n_1 = 1 for n = 1, μ = 3
        assert!(evaluate_at_mode(&p2, &rat(1), &rat(-3)).is_zero());
        assert!(evaluate_at_mode(&p2, &rat(0), &rat(0)).is_zero());
        assert!(evaluate_at_mode(&p2, &rat(2), &rat(0)).is_zero());
    }

    #[test]
    fn oracle_examples() {
        assert!(laplacian_mode_oracle(2, &rat(1), &rat(3)).is_zero());
        assert_eq!(laplacian_mode_oracle(1, &rat(5), &rat(0)), rat(25));
        assert!(laplacian_mode_oracle(2, &rat(0), &rat(0)).is_zero());
    }

    #[test]
    fn oracle_agrees_with_evaluation() {
        for m in 1..=12u32 {
            let p = build_tower_with_cap(m, 12).unwrap().pop().unwrap();
            // deterministic rational samples, including non-integers
            for i in 0..20i64 {
                let lambda = BigRational::new(BigInt::from(3 * i - 17), BigInt::from(4));
                let mu = BigRational::new(BigInt::from(2 * i * i - 5), BigInt::from(3));
                let via_poly = evaluate_at_mode(&p, &lambda, &(-mu.clone()));
                let via_oracle = laplacian_mode_oracle(m, &lambda, &mu);
                assert_eq!(via_poly, via_oracle, "m={m} i={i}");
            }
        }
    }

    #[test]
    fn structure_passes_for_supported_range() {
        for m in 1..=12 {
            let report = verify_structure(&build_operator_polynomial(m).unwrap());
            assert!(report.all_pass(), "m={m}: {report:?}");
        }
    }

    #[test]
    fn leading_coefficients_are_one() {
        for m in 1..=12 {
            let p = build_operator_polynomial(m).unwrap();
            assert_eq!(p.coeff(2 * m, 0), BigInt::one());
            assert_eq!(p.coeff(0, m), BigInt::one());
            assert!(p.coeff(0, 0).is_zero());
            for &(pp, q) in p.coeffs().keys() {
                assert!(pp + 2 * q >= 1 && pp + 2 * q <= 2 * m);
            }
        }
    }

    #[test]
    fn recursion_consistency_across_tower() {
        // P_m equals one recursion step (l = m-1) applied to the tower's P_{m-1}.
        for m in 2..=12 {
            let tower = build_operator_polynomial_tower(m);
            let last = tower.last().unwrap();
            let prev = &tower[tower.len() - 2];
            assert_eq!(&recursion_step(prev, m - 1, m), last, "m={m}");
        }
    }

    fn build_operator_polynomial_tower(m: u32) -> Vec<OperatorPolynomial> {
        build_tower(m).unwrap()
    }
}
