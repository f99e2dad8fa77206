//! Spherical eigendata and weighted annulus energies.
//!
//! Every `m`-polyharmonic function on an annulus separates into spherical
//! harmonics `φ_n^l` times radial factors `Σ_k C e^{n_k t} + D e^{-n_k t}`
//! with indicial exponents `n_k = n + 2(k-1)`, plus a zero mode containing
//! `A₀ + B₀ t` and the exponents `±2(k-1)`. This module carries the
//! eigendata (`μ_n = n(n+2m-2)`, multiplicity `h_n`, exponents), verifies
//! that the listed exponents are exactly the indicial roots of the operator
//! polynomial, and evaluates the weighted energies
//! `F_i = ∫_{A_i} u²/|x|^{2m} dx = ∫ u² dt dθ` by closed-form exponential
//! integrals, using orthonormality of the `φ_n^l` (no pointwise sphere
//! evaluation anywhere).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator_poly::{
    self, build_operator_polynomial, evaluate_at_mode, OperatorPolynomial,
};

/// Eigendata of the degree-`n` spherical harmonics on `S^{2m-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModeSpectrum {
    pub m: u32,
    pub n: u32,
    /// `μ_n = n(n+2m-2)`.
    pub mu: i64,
    /// Dimension `h_n` of the eigenspace.
    pub multiplicity: u64,
    /// Indicial exponents `n_k = n + 2(k-1)`, `k = 1..m`.
    pub exponents: Vec<i64>,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    num_integer::binomial(n as u128, k as u128) as u64
}

/// Dimension of the space of degree-`n` harmonic homogeneous polynomials in
/// `2m` variables: `C(n+2m-1, n) - C(n+2m-3, n-2)`.
pub fn harmonic_dimension(m: u32, n: u32) -> u64 {
    let d = 2 * m as u64;
    let n = n as u64;
    let all = binomial(n + d - 1, n);
    let lower = if n >= 2 { binomial(n + d - 3, n - 2) } else { 0 };
    all - lower
}

pub fn mode_spectrum(m: u32, n: u32) -> Result<ModeSpectrum> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    let mu = n as i64 * (n as i64 + 2 * m as i64 - 2);
    let exponents = (0..m as i64).map(|k| n as i64 + 2 * k).collect();
    Ok(ModeSpectrum {
        m,
        n,
        mu,
        multiplicity: harmonic_dimension(m, n),
        exponents,
    })
}

/// Outcome of the indicial-root check for a single `(m, n)`.
#[derive(Debug, Clone, Serialize)]
pub struct AnnihilationReport {
    pub m: u32,
    pub n: u32,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// For `n ≥ 1`: every `±n_k` is an exact root of `P_m(·, -μ_n)`. For
/// `n = 0`: the radial polynomial has roots `{0 (double), ±2, …, ±2(m-1)}`.
pub fn verify_mode_annihilation(m: u32, n: u32) -> Result<AnnihilationReport> {
    let poly = build_operator_polynomial(m)?;
    Ok(verify_mode_annihilation_with(&poly, n))
}

pub fn verify_mode_annihilation_with(poly: &OperatorPolynomial, n: u32) -> AnnihilationReport {
    let m = poly.m();
    let mut failures = Vec::new();
    let rat = |v: i64| BigRational::from(BigInt::from(v));
    if n >= 1 {
        let spec = mode_spectrum(m, n).expect("m >= 1");
        let neg_mu = rat(-spec.mu);
        for &nk in &spec.exponents {
            for lambda in [nk, -nk] {
                let value = evaluate_at_mode(poly, &rat(lambda), &neg_mu);
                if !value.is_zero() {
                    failures.push(format!("P_{m}({lambda}, {}) = {value}", -spec.mu));
                }
            }
        }
    } else {
        // zero mode: radial slice must be X² Π (X² - (2j)²) with the listed roots
        let radial = operator_poly::radial_restriction(poly);
        if radial[0] != BigInt::zero() || radial[1] != BigInt::zero() {
            failures.push("radial polynomial does not have a double root at 0".into());
        }
        let zero = rat(0);
        for j in 0..m as i64 {
            for lambda in [2 * j, -2 * j] {
                let value = evaluate_at_mode(poly, &rat(lambda), &zero);
                if !value.is_zero() {
                    failures.push(format!("P_{m}({lambda}, 0) = {value}"));
                }
            }
        }
    }
    AnnihilationReport {
        m,
        n,
        pass: failures.is_empty(),
        failures,
    }
}

/// Zero-average block of an annulus field: `A₀ + B₀ t + Σ_{k=2}^m
/// (C_{0,k} e^{2(k-1)t} + D_{0,k} e^{-2(k-1)t})`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ZeroMode {
    #[serde(rename = "A0", default)]
    pub a0: f64,
    #[serde(rename = "B0", default)]
    pub b0: f64,
    /// `C_{0,k}` for `k = 2..m`, so the vector has `m-1` entries.
    #[serde(rename = "C0", default)]
    pub c0: Vec<f64>,
    #[serde(rename = "D0", default)]
    pub d0: Vec<f64>,
}

impl ZeroMode {
    pub fn is_zero(&self) -> bool {
        self.a0 == 0.0
            && self.b0 == 0.0
            && self.c0.iter().all(|c| *c == 0.0)
            && self.d0.iter().all(|d| *d == 0.0)
    }
}

/// Coefficients of a single `(n, l)` mode: `C_k, D_k` for `k = 1..m`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub n: u32,
    pub l: u64,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
}

/// A finite mode expansion of an `m`-polyharmonic function on an annulus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnulusField {
    pub m: u32,
    #[serde(default)]
    pub zero_mode: ZeroMode,
    #[serde(default)]
    pub modes: Vec<ModeCoefficients>,
}

impl AnnulusField {
    pub fn zero_average(&self) -> bool {
        self.zero_mode.is_zero()
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        let mm = self.m as usize;
        if self.zero_mode.c0.len() > mm - 1 || self.zero_mode.d0.len() > mm - 1 {
            return Err(Error::InvalidParameter(
                "zero-mode coefficient vectors have more than m-1 entries".into(),
            ));
        }
        for mode in &self.modes {
            if mode.n == 0 {
                return Err(Error::InvalidParameter(
                    "n = 0 coefficients belong in zero_mode".into(),
                ));
            }
            if mode.c.len() != mm || mode.d.len() != mm {
                return Err(Error::InvalidParameter(format!(
                    "mode (n={}, l={}) needs exactly m={} C and D coefficients",
                    mode.n, mode.l, self.m
                )));
            }
            let h = harmonic_dimension(self.m, mode.n);
            if mode.l == 0 || mode.l > h {
                return Err(Error::InvalidParameter(format!(
                    "mode index l={} out of range 1..={h} for n={}",
                    mode.l, mode.n
                )));
            }
        }
        Ok(())
    }
}

/// `∫_a^b e^{αt} dt` with the `α = 0` branch selected by exact integer test.
pub fn int_exp(alpha: i64, a: f64, b: f64) -> f64 {
    if alpha == 0 {
        b - a
    } else {
        let al = alpha as f64;
        ((al * b).exp() - (al * a).exp()) / al
    }
}

/// `∫_a^b t^p e^{αt} dt` for small `p` (zero-mode products need `p ≤ 2`).
fn int_tp_exp(p: u32, alpha: i64, a: f64, b: f64) -> f64 {
    if alpha == 0 {
        let pw = (p + 1) as f64;
        (b.powi(p as i32 + 1) - a.powi(p as i32 + 1)) / pw
    } else if p == 0 {
        int_exp(alpha, a, b)
    } else {
        let al = alpha as f64;
        let boundary = (b.powi(p as i32) * (al * b).exp() - a.powi(p as i32) * (al * a).exp()) / al;
        boundary - (p as f64 / al) * int_tp_exp(p - 1, alpha, a, b)
    }
}

/// Energy of one radial factor `Σ_u c_u e^{e_u t}` over `(a, b)`, with the
/// dominant exponential factored out at the interval midpoint so `e_u (b-a)`
/// far beyond float range still assembles from shifted quantities.
fn exponential_sum_energy(terms: &[(i64, f64)], a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let shifted: Vec<(i64, f64)> = terms
        .iter()
        .map(|&(e, c)| (e, c * ((e as f64) * mid).exp()))
        .collect();
    let mut acc = 0.0;
    for (i, &(eu, cu)) in shifted.iter().enumerate() {
        for (j, &(ev, cv)) in shifted.iter().enumerate().skip(i) {
            let mult = if i == j { 1.0 } else { 2.0 };
            acc += mult * cu * cv * int_exp(eu + ev, -h, h);
        }
    }
    acc
}

/// Weighted energy `F_i = ∫_{-iL}^{-(i-1)L} Σ_{n,l} (radial factor)² dt`,
/// mode-additive by orthonormality of the spherical harmonics.
pub fn annulus_energy(field: &AnnulusField, i: u32, big_l: f64) -> Result<f64> {
    if !(big_l > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "annulus width L must be positive, got {big_l}"
        )));
    }
    field.validate()?;
    let a = -(i as f64) * big_l;
    let b = a + big_l;
    let mut total = 0.0;
    if !field.zero_mode.is_zero() {
        total += zero_mode_energy(&field.zero_mode, a, b);
    }
    for mode in &field.modes {
        let spec = mode_spectrum(field.m, mode.n)?;
        let mut terms = Vec::with_capacity(2 * field.m as usize);
        for (k, &nk) in spec.exponents.iter().enumerate() {
            terms.push((nk, mode.c[k]));
            terms.push((-nk, mode.d[k]));
        }
        total += exponential_sum_energy(&terms, a, b);
    }
    Ok(total)
}

fn zero_mode_energy(zm: &ZeroMode, a: f64, b: f64) -> f64 {
    // terms (poly degree, exponent, coefficient)
    let mut terms: Vec<(u32, i64, f64)> = vec![(0, 0, zm.a0), (1, 0, zm.b0)];
    for (idx, &c) in zm.c0.iter().enumerate() {
        terms.push((0, 2 * (idx as i64 + 1), c));
    }
    for (idx, &d) in zm.d0.iter().enumerate() {
        terms.push((0, -2 * (idx as i64 + 1), d));
    }
    let mut acc = 0.0;
    for (i, &(pu, eu, cu)) in terms.iter().enumerate() {
        for (j, &(pv, ev, cv)) in terms.iter().enumerate().skip(i) {
            let mult = if i == j { 1.0 } else { 2.0 };
            acc += mult * cu * cv * int_tp_exp(pu + pv, eu + ev, a, b);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_examples() {
        let s = mode_spectrum(2, 1).unwrap();
        assert_eq!((s.mu, s.multiplicity, s.exponents.clone()), (3, 4, vec![1, 3]));
        let s = mode_spectrum(1, 3).unwrap();
        assert_eq!((s.mu, s.multiplicity, s.exponents.clone()), (9, 2, vec![3]));
        let s = mode_spectrum(2, 0).unwrap();
        assert_eq!((s.mu, s.multiplicity), (0, 1));
        assert!(mode_spectrum(0, 1).is_err());
    }

    /// Independent oracle: kernel dimension of the Laplacian as an exact
    /// linear map from degree-n to degree-(n-2) homogeneous polynomials.
    fn harmonic_dimension_brute(d: usize, n: u32) -> u64 {
        fn monomials(d: usize, n: u32) -> Vec<Vec<u32>> {
            if d == 1 {
                return vec![vec![n]];
            }
            let mut out = Vec::new();
            for first in 0..=n {
                for mut rest in monomials(d - 1, n - first) {
                    let mut mono = vec![first];
                    mono.append(&mut rest);
                    out.push(mono);
                }
            }
            out
        }
        let cols = monomials(d, n);
        if n < 2 {
            return cols.len() as u64;
        }
        let rows = monomials(d, n - 2);
        let row_index: std::collections::HashMap<Vec<u32>, usize> = rows
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        // exact rational elimination
        let mut mat = vec![vec![BigRational::zero(); cols.len()]; rows.len()];
        for (j, mono) in cols.iter().enumerate() {
            for i in 0..d {
                if mono[i] >= 2 {
                    let mut target = mono.clone();
                    target[i] -= 2;
                    let coeff = (mono[i] * (mono[i] - 1)) as i64;
                    let r = row_index[&target];
                    mat[r][j] += BigRational::from(BigInt::from(coeff));
                }
            }
        }
        let mut rank = 0usize;
        let mut pivot_col = 0usize;
        let nrows = mat.len();
        while rank < nrows && pivot_col < cols.len() {
            let pivot_row = (rank..nrows).find(|&r| !mat[r][pivot_col].is_zero());
            let Some(pr) = pivot_row else {
                pivot_col += 1;
                continue;
            };
            mat.swap(rank, pr);
            let inv = mat[rank][pivot_col].recip();
            for c in pivot_col..cols.len() {
                let v = mat[rank][c].clone() * &inv;
                mat[rank][c] = v;
            }
            for r in 0..nrows {
                if r != rank && !mat[r][pivot_col].is_zero() {
                    let factor = mat[r][pivot_col].clone();
                    for c in pivot_col..cols.len() {
                        let sub = mat[rank][c].clone() * &factor;
                        mat[r][c] -= sub;
                    }
                }
            }
            rank += 1;
            pivot_col += 1;
        }
        (cols.len() - rank) as u64
    }

    #[test]
    fn multiplicity_matches_brute_force_kernel() {
        for m in 1..=2u32 {
            for n in 0..=6u32 {
                assert_eq!(
                    harmonic_dimension(m, n),
                    harmonic_dimension_brute(2 * m as usize, n),
                    "m={m} n={n}"
                );
            }
        }
        for n in 0..=3u32 {
            assert_eq!(harmonic_dimension(3, n), harmonic_dimension_brute(6, n));
        }
    }

    #[test]
    fn annihilation_examples() {
        assert!(verify_mode_annihilation(2, 1).unwrap().pass);
        assert!(verify_mode_annihilation(3, 2).unwrap().pass);
        assert!(verify_mode_annihilation(1, 0).unwrap().pass);
        assert!(verify_mode_annihilation(3, 0).unwrap().pass);
    }

    fn single_mode_field(m: u32, n: u32, c: Vec<f64>, d: Vec<f64>) -> AnnulusField {
        AnnulusField {
            m,
            zero_mode: ZeroMode::default(),
            modes: vec![ModeCoefficients { n, l: 1, c, d }],
        }
    }

    #[test]
    fn energy_closed_form_example() {
        // m=1, n=1, C=1, D=0, L=log 2, i=1: ∫_{-log 2}^0 e^{2t} dt = 3/8
        let field = single_mode_field(1, 1, vec![1.0], vec![0.0]);
        let e = annulus_energy(&field, 1, 2f64.ln()).unwrap();
        assert!((e - 0.375).abs() < 1e-14, "{e}");
    }

    #[test]
    fn energy_empty_field_is_zero() {
        let field = AnnulusField {
            m: 2,
            zero_mode: ZeroMode::default(),
            modes: vec![],
        };
        assert_eq!(annulus_energy(&field, 1, 1.0).unwrap(), 0.0);
        assert!(annulus_energy(&field, 1, 0.0).is_err());
    }

    #[test]
    fn energy_additive_over_distinct_modes() {
        let f1 = single_mode_field(2, 1, vec![0.3, -0.7], vec![1.1, 0.2]);
        let mut f2 = single_mode_field(2, 2, vec![-0.5, 0.4], vec![0.0, 0.9]);
        let mut joint = f1.clone();
        joint.modes.append(&mut f2.modes.clone());
        f2.modes = joint.modes[1..].to_vec();
        let l = 0.8;
        let sum = annulus_energy(&f1, 2, l).unwrap() + annulus_energy(&f2, 2, l).unwrap();
        let whole = annulus_energy(&joint, 2, l).unwrap();
        assert!((whole - sum).abs() <= 1e-12 * sum.abs().max(1.0));
    }

    #[test]
    fn energy_quadratic_scaling() {
        let f = single_mode_field(2, 3, vec![0.2, 0.5], vec![-0.1, 0.7]);
        let mut scaled = f.clone();
        for m in &mut scaled.modes {
            for c in m.c.iter_mut().chain(m.d.iter_mut()) {
                *c *= 3.0;
            }
        }
        let l = 1.3;
        let base = annulus_energy(&f, 1, l).unwrap();
        let big = annulus_energy(&scaled, 1, l).unwrap();
        assert!((big - 9.0 * base).abs() <= 1e-10 * big.abs());
    }

    #[test]
    fn shift_in_i_equals_translate_in_t() {
        // F_{i+1} of the field equals F_i of the field with every mode's
        // t-argument shifted by -L, i.e. C_k -> C_k e^{-n_k L}, D_k -> D_k e^{n_k L}.
        let l = 0.9;
        let f = single_mode_field(2, 2, vec![0.4, -0.2], vec![0.6, 0.1]);
        let spec = mode_spectrum(2, 2).unwrap();
        let mut shifted = f.clone();
        for (k, &nk) in spec.exponents.iter().enumerate() {
            shifted.modes[0].c[k] *= (-(nk as f64) * l).exp();
            shifted.modes[0].d[k] *= ((nk as f64) * l).exp();
        }
        let lhs = annulus_energy(&f, 2, l).unwrap();
        let rhs = annulus_energy(&shifted, 1, l).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
    }

    /// Composite-Simpson quadrature oracle for a single-mode energy.
    fn quadrature_energy(m: u32, mode: &ModeCoefficients, a: f64, b: f64) -> f64 {
        let spec = mode_spectrum(m, mode.n).unwrap();
        let g = |t: f64| -> f64 {
            let mut v = 0.0;
            for (k, &nk) in spec.exponents.iter().enumerate() {
                v += mode.c[k] * ((nk as f64) * t).exp() + mode.d[k] * (-(nk as f64) * t).exp();
            }
            v * v
        };
        let steps = 10_000usize;
        let h = (b - a) / steps as f64;
        let mut acc = g(a) + g(b);
        for s in 1..steps {
            let t = a + s as f64 * h;
            acc += if s % 2 == 1 { 4.0 } else { 2.0 } * g(t);
        }
        acc * h / 3.0
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let cases = [
            (1u32, 1u32, vec![1.0], vec![0.5], 1.5f64, 1u32),
            (2, 1, vec![0.7, -0.3], vec![0.2, 0.4], 0.8, 1),
            (2, 5, vec![0.1, 0.05], vec![2.0, -1.0], 2.0, 2),
            (3, 4, vec![0.3, 0.1, -0.2], vec![0.4, 0.0, 0.6], 1.0, 3),
        ];
        for (m, n, c, d, l, i) in cases {
            let field = single_mode_field(m, n, c.clone(), d.clone());
            let closed = annulus_energy(&field, i, l).unwrap();
            let a = -(i as f64) * l;
            let oracle = quadrature_energy(m, &field.modes[0], a, a + l);
            assert!(
                (closed - oracle).abs() <= 1e-10 * oracle.abs().max(1e-300),
                "m={m} n={n}: closed {closed} vs quadrature {oracle}"
            );
        }
    }

    #[test]
    fn zero_mode_energy_against_quadrature() {
        let zm = ZeroMode {
            a0: 0.5,
            b0: -1.2,
            c0: vec![0.3],
            d0: vec![0.7],
        };
        let field = AnnulusField {
            m: 2,
            zero_mode: zm.clone(),
            modes: vec![],
        };
        let l = 1.1;
        let closed = annulus_energy(&field, 1, l).unwrap();
        let g = |t: f64| {
            let v = zm.a0 + zm.b0 * t + zm.c0[0] * (2.0 * t).exp() + zm.d0[0] * (-2.0 * t).exp();
            v * v
        };
        let steps = 10_000usize;
        let (a, b) = (-l, 0.0);
        let h = (b - a) / steps as f64;
        let mut acc = g(a) + g(b);
        for s in 1..steps {
            acc += if s % 2 == 1 { 4.0 } else { 2.0 } * g(a + s as f64 * h);
        }
        let oracle = acc * h / 3.0;
        assert!((closed - oracle).abs() <= 1e-10 * oracle.abs());
        assert!(!field.zero_average());
    }

    #[test]
    fn validation_catches_bad_indices() {
        let mut field = single_mode_field(2, 1, vec![1.0, 0.0], vec![0.0, 0.0]);
        field.modes[0].l = 5; // h_1 = 4 for m = 2
        assert!(field.validate().is_err());
        let mut field = single_mode_field(2, 1, vec![1.0], vec![0.0, 0.0]);
        assert!(field.validate().is_err());
        field = single_mode_field(2, 0, vec![1.0, 0.0], vec![0.0, 0.0]);
        assert!(field.validate().is_err());
    }
}
