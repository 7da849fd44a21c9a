//! Exact arithmetic in `Z[1/m]` and normal forms in `BS(1,m) = ⟨α, β | αβα⁻¹ = β^m⟩`.
//!
//! Elements of `BS(1,m)` are pairs `(i, l)` standing for `α^i β^l` with
//! `l ∈ Z[1/m]`; multiplication is `(i₁, l₁)(i₂, l₂) = (i₁+i₂, l₁·m^-i₂ + l₂)`.

use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::words::{Gen, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BsError {
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("base must be at least 2, got {0}")]
    BadBase(u32),
}

/// `numerator / base^den_exp` in canonical form (`den_exp = 0` or `base ∤ numerator`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MAdic {
    num: BigInt,
    den_exp: u32,
    base: u32,
}

impl MAdic {
    pub fn new(num: impl Into<BigInt>, den_exp: u32, base: u32) -> Result<Self, BsError> {
        if base < 2 {
            return Err(BsError::BadBase(base));
        }
        Ok(MAdic { num: num.into(), den_exp, base }.canonical())
    }

    pub fn zero(base: u32) -> Self {
        MAdic { num: BigInt::zero(), den_exp: 0, base }
    }

    pub fn integer(n: impl Into<BigInt>, base: u32) -> Self {
        MAdic { num: n.into(), den_exp: 0, base }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn den_exp(&self) -> u32 {
        self.den_exp
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::from(self.base).pow(self.den_exp))
    }

    fn canonical(mut self) -> Self {
        if self.num.is_zero() {
            self.den_exp = 0;
            return self;
        }
        let b = BigInt::from(self.base);
        while self.den_exp > 0 {
            let (q, r) = self.num.div_rem(&b);
            if !r.is_zero() {
                break;
            }
            self.num = q;
            self.den_exp -= 1;
        }
        self
    }

    fn check(&self, other: &MAdic) -> Result<(), BsError> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(BsError::BaseMismatch(self.base, other.base))
        }
    }

    pub fn add(&self, other: &MAdic) -> Result<MAdic, BsError> {
        self.check(other)?;
        let b = BigInt::from(self.base);
        let e = self.den_exp.max(other.den_exp);
        let num = &self.num * b.pow(e - self.den_exp) + &other.num * b.pow(e - other.den_exp);
        Ok(MAdic { num, den_exp: e, base: self.base }.canonical())
    }

    pub fn neg(&self) -> MAdic {
        MAdic { num: -&self.num, ..self.clone() }
    }

    /// Multiplies by `base^k`.
    pub fn scale_by_power(&self, k: i64) -> MAdic {
        let b = BigInt::from(self.base);
        if k >= 0 {
            let k = k as u64;
            if k <= self.den_exp as u64 {
                MAdic { den_exp: self.den_exp - k as u32, ..self.clone() }.canonical()
            } else {
                let extra = (k - self.den_exp as u64) as u32;
                MAdic { num: &self.num * b.pow(extra), den_exp: 0, base: self.base }
            }
        } else {
            let k = u32::try_from(k.unsigned_abs()).expect("exponent fits in u32");
            MAdic { den_exp: self.den_exp + k, ..self.clone() }.canonical()
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "num": bigint_json(&self.num), "den_exp": self.den_exp, "base": self.base })
    }
}

pub(crate) fn bigint_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

impl fmt::Display for MAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}^{}", self.num, self.base, self.den_exp)
        }
    }
}

/// The element `α^i β^l` of `BS(1,m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BsElement {
    pub alpha_exp: i64,
    pub beta_exp: MAdic,
}

impl BsElement {
    pub fn identity(base: u32) -> Self {
        BsElement { alpha_exp: 0, beta_exp: MAdic::zero(base) }
    }

    pub fn alpha(base: u32) -> Self {
        BsElement { alpha_exp: 1, beta_exp: MAdic::zero(base) }
    }

    pub fn beta(base: u32) -> Self {
        BsElement { alpha_exp: 0, beta_exp: MAdic::integer(1, base) }
    }

    pub fn alpha_pow(i: i64, base: u32) -> Self {
        BsElement { alpha_exp: i, beta_exp: MAdic::zero(base) }
    }

    pub fn beta_pow(l: MAdic) -> Self {
        BsElement { alpha_exp: 0, beta_exp: l }
    }

    pub fn base(&self) -> u32 {
        self.beta_exp.base
    }

    pub fn is_identity(&self) -> bool {
        self.alpha_exp == 0 && self.beta_exp.is_zero()
    }

    pub fn mul(&self, other: &BsElement) -> Result<BsElement, BsError> {
        let l = self.beta_exp.scale_by_power(-other.alpha_exp).add(&other.beta_exp)?;
        Ok(BsElement { alpha_exp: self.alpha_exp + other.alpha_exp, beta_exp: l })
    }

    pub fn inverse(&self) -> BsElement {
        BsElement { alpha_exp: -self.alpha_exp, beta_exp: self.beta_exp.scale_by_power(self.alpha_exp).neg() }
    }

    /// `Some(i)` iff the element is `α^i`.
    pub fn in_alpha(&self) -> Option<i64> {
        self.beta_exp.is_zero().then_some(self.alpha_exp)
    }

    /// Folds a plain word through the multiplication, reading `t` as `α` and `a` as `β`.
    pub fn normal_form(word: &Word, base: u32) -> BsElement {
        let (a, b) = (BsElement::alpha(base), BsElement::beta(base));
        let (ai, bi) = (a.inverse(), b.inverse());
        word.letters().iter().fold(BsElement::identity(base), |acc, l| {
            let g = match (l.gen, l.inv) {
                (Gen::T, false) => &a,
                (Gen::T, true) => &ai,
                (_, false) => &b,
                (_, true) => &bi,
            };
            acc.mul(g).expect("same base")
        })
    }

    /// Lexicographic bi-order: α-exponent first, then the `Z[1/m]` coordinate.
    pub fn is_positive(&self) -> bool {
        self.alpha_exp > 0 || (self.alpha_exp == 0 && self.beta_exp.num.is_positive())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "i": self.alpha_exp,
            "num": bigint_json(&self.beta_exp.num),
            "den_exp": self.beta_exp.den_exp,
            "base": self.beta_exp.base,
        })
    }
}

impl fmt::Display for BsElement {
    /// `a^i b^(p/m^q)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = &self.beta_exp;
        write!(f, "a^{} b^({}", self.alpha_exp, l.num)?;
        if l.den_exp > 0 {
            write!(f, "/{}^{}", l.base, l.den_exp)?;
        }
        f.write_str(")")
    }
}

/// `base^k` as an exact rational.
pub fn rational_power(base: u32, k: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(base));
    if k >= 0 {
        num::pow(b, k as usize)
    } else {
        BigRational::one() / num::pow(b, k.unsigned_abs() as usize)
    }
}
