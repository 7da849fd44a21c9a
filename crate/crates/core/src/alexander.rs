//! Alexander polynomials of zero t-sum relators and exact root counting.
//!
//! For `⟨t, a | r⟩` with the relator rewritten over `a[n]`, the abelianized
//! Fox derivative `∂r/∂a` is `Σ ε·t^i` over the letters `a[i]^ε` of the
//! rewritten relator. Polynomials are normalized by a unit `±t^k` so the
//! lowest exponent is 0 and the lowest coefficient is positive.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bsarith::bigint_json;
use crate::words::{Alphabet, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlexanderError {
    #[error("empty relator")]
    EmptyRelator,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Integer Laurent polynomial in `t`; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    /// From `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    /// Ascending coefficients `c_0 + c_1 t + …`.
    pub fn from_coeffs<C: Into<BigInt> + Clone>(coeffs: &[C]) -> Self {
        LaurentPoly::from_terms(coeffs.iter().cloned().enumerate().map(|(i, c)| (i as i64, c)))
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    /// Divides out the unit `±t^k` making the lowest term a positive constant.
    pub fn normalized(&self) -> LaurentPoly {
        let Some((&lo, c)) = self.terms.iter().next() else {
            return LaurentPoly::zero();
        };
        let p = self.shift(-lo);
        if c.is_negative() {
            p.neg()
        } else {
            p
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.terms.iter().next().is_none_or(|(e, c)| *e == 0 && c.is_positive())
    }

    pub fn same_sign_coefficients(&self) -> bool {
        self.terms.values().all(Signed::is_positive) || self.terms.values().all(Signed::is_negative)
    }

    /// Ascending rational coefficients of `t^-min · self`.
    fn dense(&self) -> Vec<BigRational> {
        let Some(lo) = self.min_exp() else { return Vec::new() };
        let hi = self.max_exp().unwrap();
        (lo..=hi).map(|e| BigRational::from_integer(self.coeff(e))).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(e, c)| json!([e, bigint_json(c)])).collect())
    }
}

impl fmt::Display for LaurentPoly {
    /// Ascending powers, e.g. `1 + t^2`, `2 - t + 3t^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let unit = mag == BigInt::from(1);
            match *e {
                0 => write!(f, "{mag}")?,
                1 if unit => f.write_str("t")?,
                1 => write!(f, "{mag}t")?,
                e if unit => write!(f, "t^{e}")?,
                e => write!(f, "{mag}t^{e}")?,
            }
        }
        Ok(())
    }
}

/// Alexander polynomial of an indexed (Magnus-rewritten) relator, normalized.
pub fn alexander_poly(relator: &Word) -> Result<LaurentPoly, AlexanderError> {
    relator.require(Alphabet::Indexed)?;
    if relator.is_empty() {
        return Err(AlexanderError::EmptyRelator);
    }
    let raw = LaurentPoly::from_terms(
        relator.letters().iter().map(|l| (l.index().expect("indexed"), BigInt::from(l.sign()))),
    );
    Ok(raw.normalized())
}

/// Number of sign changes in the coefficient sequence.
pub fn descartes_positive_bound(p: &LaurentPoly) -> Result<usize, AlexanderError> {
    if p.is_zero() {
        return Err(AlexanderError::ZeroPolynomial);
    }
    Ok(sign_changes(p.terms.values().map(|c| c.is_positive())))
}

fn sign_changes(signs: impl Iterator<Item = bool>) -> usize {
    let mut prev = None;
    let mut n = 0;
    for s in signs {
        if prev.is_some_and(|p| p != s) {
            n += 1;
        }
        prev = Some(s);
    }
    n
}

/// Number of distinct real roots in `(0, ∞)`, by a Sturm sequence over the rationals.
pub fn positive_real_root_count(p: &LaurentPoly) -> Result<usize, AlexanderError> {
    if p.is_zero() {
        return Err(AlexanderError::ZeroPolynomial);
    }
    // dividing by t^min leaves a polynomial with nonzero constant term
    let f = p.dense();
    let sf = poly::square_free(&f);
    let chain = poly::sturm_chain(sf);
    let at_zero = sign_changes(chain.iter().filter_map(poly::sign_at_zero));
    let at_inf = sign_changes(chain.iter().filter_map(poly::sign_at_infinity));
    Ok(at_zero - at_inf)
}

/// Dense univariate polynomials over `Q`, coefficients ascending, no trailing zeros.
pub(crate) mod poly {
    use num::{BigRational, One, Signed, Zero};

    pub type Poly = Vec<BigRational>;

    pub fn trim(mut p: Poly) -> Poly {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        p
    }

    pub fn derivative(p: &Poly) -> Poly {
        trim(p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer((i as i64).into())).collect())
    }

    /// Remainder of `a` divided by nonzero `b`.
    pub fn rem(a: &Poly, b: &Poly) -> Poly {
        let mut r = trim(a.clone());
        let lead = b.last().expect("nonzero divisor");
        while r.len() >= b.len() && !r.is_empty() {
            let k = r.len() - b.len();
            let q = r.last().unwrap() / lead;
            for (i, c) in b.iter().enumerate() {
                r[k + i] -= &q * c;
            }
            r.pop();
            r = trim(r);
        }
        r
    }

    /// Exact quotient of `a` by nonzero `b`.
    pub fn div_exact(a: &Poly, b: &Poly) -> Poly {
        let mut r = trim(a.clone());
        let lead = b.last().expect("nonzero divisor");
        if r.len() < b.len() {
            return Vec::new();
        }
        let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let k = r.len() - b.len();
            let c = r.last().unwrap() / lead;
            for (i, bc) in b.iter().enumerate() {
                r[k + i] -= &c * bc;
            }
            q[k] = c;
            r.pop();
            r = trim(r);
        }
        debug_assert!(r.is_empty(), "inexact division");
        trim(q)
    }

    pub fn monic(p: &Poly) -> Poly {
        let lead = p.last().cloned().unwrap_or_else(BigRational::one);
        p.iter().map(|c| c / &lead).collect()
    }

    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
        while !b.is_empty() {
            let r = rem(&a, &b);
            a = b;
            b = r;
        }
        monic(&a)
    }

    pub fn square_free(p: &Poly) -> Poly {
        let d = derivative(p);
        if d.is_empty() {
            return trim(p.clone());
        }
        div_exact(p, &gcd(p, &d))
    }

    pub fn sturm_chain(p: Poly) -> Vec<Poly> {
        let mut chain = vec![p.clone(), derivative(&p)];
        while !chain.last().unwrap().is_empty() {
            let n = chain.len();
            let r = rem(&chain[n - 2], &chain[n - 1]);
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        chain.pop();
        chain
    }

    pub fn sign_at_zero(p: &Poly) -> Option<bool> {
        p.first().filter(|c| !c.is_zero()).map(|c| c.is_positive())
    }

    pub fn sign_at_infinity(p: &Poly) -> Option<bool> {
        p.last().map(|c| c.is_positive())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{w, TowerParams};

    fn lp(coeffs: &[i64]) -> LaurentPoly {
        LaurentPoly::from_coeffs(coeffs)
    }

    #[test]
    fn gamma_polynomial() {
        let r = w("a[1] a[0] a[2] a[1]^-1 a[2]^-1 a[0]^-1 a[2]^-1 a[0]^-1");
        let p = alexander_poly(&r).unwrap();
        assert_eq!(p, lp(&[1, 0, 1]));
        assert_eq!(p.to_string(), "1 + t^2");
        assert_eq!(positive_real_root_count(&p).unwrap(), 0);
        assert_eq!(descartes_positive_bound(&p).unwrap(), 0);
        assert_eq!(p.to_json(), json!([[0, 1], [2, 1]]));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(alexander_poly(&w("a[0] a[1] a[0]^-1 a[1]^-1")).unwrap().is_zero());
        assert_eq!(alexander_poly(&Word::empty()), Err(AlexanderError::EmptyRelator));
        assert!(alexander_poly(&w("a")).is_err());
        assert_eq!(positive_real_root_count(&LaurentPoly::zero()), Err(AlexanderError::ZeroPolynomial));
        assert_eq!(descartes_positive_bound(&LaurentPoly::zero()), Err(AlexanderError::ZeroPolynomial));
    }

    #[test]
    fn general_family_value() {
        let p = TowerParams::new(2, 3, w("a[0] a[1]")).unwrap();
        assert_eq!(alexander_poly(&p.relator(0)).unwrap(), lp(&[2, 2, 0, 2]));
    }

    #[test]
    fn root_counts() {
        assert_eq!(positive_real_root_count(&lp(&[-2, 1])).unwrap(), 1);
        assert_eq!(positive_real_root_count(&lp(&[2, -3, 1])).unwrap(), 2);
        // (t-1)^2 (t+1): one distinct positive root
        assert_eq!(positive_real_root_count(&lp(&[1, -1, -1, 1])).unwrap(), 1);
        // t^-1 (t - 1): the t^-1 factor does not create a root at 0
        let p = LaurentPoly::from_terms([(-1, -1), (0, 1)]);
        assert_eq!(positive_real_root_count(&p).unwrap(), 1);
        assert_eq!(positive_real_root_count(&lp(&[5])).unwrap(), 0);
    }

    #[test]
    fn descartes_examples() {
        assert_eq!(descartes_positive_bound(&lp(&[-2, 1])).unwrap(), 1);
        assert_eq!(descartes_positive_bound(&lp(&[1, 0, -1, 1])).unwrap(), 2);
    }

    #[test]
    fn normalization() {
        let p = LaurentPoly::from_terms([(3, -1), (5, -1)]);
        assert_eq!(p.normalized(), lp(&[1, 0, 1]));
        assert!(p.normalized().is_normalized());
        let r = w("a[1] a[0] a[2] a[1]^-1 a[2]^-1 a[0]^-1 a[2]^-1 a[0]^-1");
        assert_eq!(alexander_poly(&r.shift(7)).unwrap(), alexander_poly(&r).unwrap());
    }

    #[test]
    fn display() {
        assert_eq!(lp(&[2, -1, 0, 3]).to_string(), "2 - t + 3t^3");
        assert_eq!(LaurentPoly::from_terms([(-2, 1), (0, -4)]).to_string(), "t^-2 - 4");
    }
}
