//! A commutative jet algebra for exact integration-by-parts bookkeeping.
//!
//! Polynomials live in the formal generators `w_j = ∂_t^j w` with exact
//! rational coefficients; the derivation `D` sends `w_j` to `w_{j+1}` and
//! extends by the Leibniz rule. The two classical antiderivative identities
//! for products `∂_t^a w · ∂_t^b w` and the radial Pohozaev form assembled
//! from them are all exact equalities here.
//!
//! Everything is scalar-valued. The identities being verified are bilinear
//! and symmetric in the two factors, so the scalar computation is faithful
//! to the vector-valued (dot-product) originals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operator_poly::build_operator_polynomial;

/// Monomial key: multiset of jet orders, kept sorted ascending.
type Monomial = Vec<u32>;

/// Sparse polynomial in the jet variables; zero coefficients are pruned so
/// equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JetPolynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

fn normalized(mut mono: Monomial) -> Monomial {
    mono.sort_unstable();
    mono
}

impl JetPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::default();
        p.add_term(Vec::new(), c);
        p
    }

    /// Single monomial `c · Π w_{orders}`.
    pub fn monomial(orders: &[u32], coeff: BigRational) -> Self {
        let mut p = Self::default();
        p.add_term(normalized(orders.to_vec()), coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    fn add_term(&mut self, mono: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (mono, coeff) in &other.terms {
            out.add_term(mono.clone(), coeff.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (mono, coeff) in &other.terms {
            out.add_term(mono.clone(), -coeff.clone());
        }
        out
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        let mut out = Self::default();
        for (mono, coeff) in &self.terms {
            out.add_term(mono.clone(), coeff * factor);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut mono = ma.clone();
                mono.extend_from_slice(mb);
                out.add_term(normalized(mono), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for JetPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{coeff}")?;
            for j in mono {
                write!(f, "·w{j}")?;
            }
        }
        Ok(())
    }
}

/// The formal `∂_t`: `w_j ↦ w_{j+1}` extended by the Leibniz rule.
pub fn jet_derive(p: &JetPolynomial) -> JetPolynomial {
    let mut out = JetPolynomial::default();
    for (mono, coeff) in p.terms() {
        // distinct orders with multiplicities
        let mut idx = 0;
        while idx < mono.len() {
            let order = mono[idx];
            let mut mult = 0u32;
            while idx < mono.len() && mono[idx] == order {
                mult += 1;
                idx += 1;
            }
            let mut derived = mono.clone();
            let pos = derived.iter().position(|&o| o == order).expect("present");
            derived[pos] = order + 1;
            out.add_term(
                normalized(derived),
                coeff * BigRational::from(BigInt::from(mult)),
            );
        }
    }
    out
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn sign(exp: i64) -> BigRational {
    if exp.rem_euclid(2) == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// `∂_t^{2n} w · ∂_t w = D( (-1)^{n+1} ½ w_n² + Σ_{k=1}^{n-1} (-1)^{k+1} w_k w_{2n-k} )`.
pub fn verify_identity_one(n: u32) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let lhs = JetPolynomial::monomial(&[2 * n, 1], BigRational::one());
    let mut anti = JetPolynomial::monomial(&[n, n], sign(n as i64 + 1) * half());
    for k in 1..n {
        anti = anti.add(&JetPolynomial::monomial(
            &[k, 2 * n - k],
            sign(k as i64 + 1),
        ));
    }
    Ok(lhs == jet_derive(&anti))
}

/// `w_k w_{2n-k} = D( Σ_{l=1}^{n-k} (-1)^{l-1} w_{k+l-1} w_{2n-k-l} ) + (-1)^{n-k} w_n²`.
pub fn verify_identity_two(n: u32, k: u32) -> Result<bool> {
    if n < 2 || k == 0 || k > n - 1 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 and 1 <= k <= n-1, got n={n}, k={k}"
        )));
    }
    let lhs = JetPolynomial::monomial(&[k, 2 * n - k], BigRational::one());
    let mut anti = JetPolynomial::zero();
    for l in 1..=(n - k) {
        anti = anti.add(&JetPolynomial::monomial(
            &[k + l - 1, 2 * n - k - l],
            sign(l as i64 - 1),
        ));
    }
    let rhs = jet_derive(&anti).add(&JetPolynomial::monomial(
        &[n, n],
        sign(n as i64 - k as i64),
    ));
    Ok(lhs == rhs)
}

/// Radial Pohozaev form built from the radial coefficients `a_{2n,0}` of the
/// operator polynomial:
///
/// ```text
/// Q = Σ_n a_{2n,0} (-1)^{n+1}(n-½) w_n²
///   + D( Σ_n Σ_{k=1}^{n-1} Σ_{l=1}^{n-k} (-1)^{k+l} a_{2n,0} w_{k+l-1} w_{2n-k-l} )
/// ```
pub fn radial_pohozaev_form(m: u32) -> Result<JetPolynomial> {
    let poly = build_operator_polynomial(m)?;
    let mut leading = JetPolynomial::zero();
    let mut inner = JetPolynomial::zero();
    for n in 1..=m {
        let a = BigRational::from(poly.coeff(2 * n, 0));
        if a.is_zero() {
            continue;
        }
        let weight =
            sign(n as i64 + 1) * (BigRational::from(BigInt::from(n)) - half()) * &a;
        leading = leading.add(&JetPolynomial::monomial(&[n, n], weight));
        for k in 1..n {
            for l in 1..=(n - k) {
                inner = inner.add(&JetPolynomial::monomial(
                    &[k + l - 1, 2 * n - k - l],
                    sign(k as i64 + l as i64) * &a,
                ));
            }
        }
    }
    Ok(leading.add(&jet_derive(&inner)))
}

/// Check `D(Q) = Σ_n a_{2n,0} w_{2n} w_1` exactly.
pub fn verify_radial_pohozaev(m: u32) -> Result<bool> {
    let poly = build_operator_polynomial(m)?;
    let q = radial_pohozaev_form(m)?;
    let mut rhs = JetPolynomial::zero();
    for n in 1..=m {
        rhs = rhs.add(&JetPolynomial::monomial(
            &[2 * n, 1],
            BigRational::from(poly.coeff(2 * n, 0)),
        ));
    }
    Ok(jet_derive(&q) == rhs)
}
