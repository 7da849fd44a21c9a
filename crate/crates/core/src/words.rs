//! Free-group words over the two alphabets used throughout the crate.
//!
//! The *plain* alphabet is `{t, a}`; the *indexed* alphabet is `{a[n] : n ∈ Z}`
//! where `a[n]` stands for `t^n a t^-n`. A [`Word`] never mixes the two.
//!
//! Text syntax:
//!
//! ```text
//! word := ε | term (WS term)*
//! term := gen ('^' int)?
//! gen  := 't' | 'a' | 'a[' int ']'
//! int  := '-'? digit+
//! ```
//!
//! A lone `1` (or empty input) denotes the identity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("cannot mix plain {{t, a}} and indexed a[n] letters in one word")]
    MixedAlphabet,
    #[error("malformed word at `{0}`")]
    Parse(String),
    #[error("word must be over the {0} alphabet")]
    WrongAlphabet(Alphabet),
    #[error("t-exponent sum is {0}, expected 0")]
    NonzeroTSum(i64),
    #[error("invalid tower parameters: {0}")]
    Params(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Alphabet {
    Plain,
    Indexed,
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Plain => f.write_str("{t, a}"),
            Alphabet::Indexed => f.write_str("indexed a[n]"),
        }
    }
}

/// A generator symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    T,
    A,
    Idx(i64),
}

impl Gen {
    pub fn alphabet(self) -> Alphabet {
        match self {
            Gen::T | Gen::A => Alphabet::Plain,
            Gen::Idx(_) => Alphabet::Indexed,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::T => f.write_str("t"),
            Gen::A => f.write_str("a"),
            Gen::Idx(n) => write!(f, "a[{n}]"),
        }
    }
}

/// A generator with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: Gen,
    pub inv: bool,
}

impl Letter {
    pub const T: Letter = Letter::pos(Gen::T);
    pub const A: Letter = Letter::pos(Gen::A);

    pub const fn pos(gen: Gen) -> Self {
        Letter { gen, inv: false }
    }

    pub const fn neg(gen: Gen) -> Self {
        Letter { gen, inv: true }
    }

    pub const fn idx(n: i64) -> Self {
        Letter::pos(Gen::Idx(n))
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    /// Index of an indexed letter.
    pub fn index(self) -> Option<i64> {
        match self.gen {
            Gen::Idx(n) => Some(n),
            _ => None,
        }
    }
}

/// A finite sequence of letters from a single alphabet.
///
/// Words are not automatically reduced; most operations reduce their output.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        if let Some(first) = letters.first() {
            let alpha = first.gen.alphabet();
            if letters.iter().any(|l| l.gen.alphabet() != alpha) {
                return Err(WordError::MixedAlphabet);
            }
        }
        Ok(Word(letters))
    }

    /// Builds a word whose letters are known to share one alphabet.
    pub(crate) fn from_letters_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(Word::new(letters.clone()).is_ok());
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn t() -> Self {
        Word::letter(Letter::T)
    }

    pub fn a() -> Self {
        Word::letter(Letter::A)
    }

    /// `a[n]^e` as a word of length `|e|`.
    pub fn idx_pow(n: i64, e: i64) -> Self {
        Word::letter(Letter::idx(n)).pow(e)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the empty word, which belongs to both alphabets.
    pub fn alphabet(&self) -> Option<Alphabet> {
        self.0.first().map(|l| l.gen.alphabet())
    }

    pub fn is_over(&self, alpha: Alphabet) -> bool {
        self.alphabet().is_none_or(|a| a == alpha)
    }

    pub fn require(&self, alpha: Alphabet) -> Result<(), WordError> {
        if self.is_over(alpha) {
            Ok(())
        } else {
            Err(WordError::WrongAlphabet(alpha))
        }
    }

    /// Free reduction.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(f), Some(l)) if self.0.len() > 1 => *f != l.inverse(),
                _ => true,
            }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self · other`.
    ///
    /// # Panics
    /// If the two words are over different alphabets.
    pub fn mul(&self, other: &Word) -> Word {
        assert!(
            self.alphabet().is_none() || other.alphabet().is_none() || self.alphabet() == other.alphabet(),
            "multiplying words over different alphabets"
        );
        let mut out = self.reduce().0;
        for &l in &other.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Unreduced concatenation.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Reduced `self^e`; negative exponents invert.
    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.reduce() };
        let mut out = Word::empty();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Reduced `h · self · h^-1`.
    pub fn conj(&self, h: &Word) -> Word {
        h.mul(self).mul(&h.inverse())
    }

    /// Splits a reduced word as `conjugator · core · conjugator^-1` with a
    /// cyclically reduced `core`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let w = self.reduce().0;
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        (Word(w[..lo].to_vec()), Word(w[lo..hi].to_vec()))
    }

    /// Cyclic rotation starting at position `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Translates every index by `k`. Plain words are returned unchanged.
    pub fn shift(&self, k: i64) -> Word {
        Word(
            self.0
                .iter()
                .map(|l| match l.gen {
                    Gen::Idx(n) => Letter { gen: Gen::Idx(n + k), inv: l.inv },
                    _ => *l,
                })
                .collect(),
        )
    }

    /// Smallest and largest index occurring in an indexed word.
    pub fn index_range(&self) -> Option<(i64, i64)> {
        let mut it = self.0.iter().filter_map(|l| l.index());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), n| (lo.min(n), hi.max(n))))
    }

    /// Signed count of occurrences of `gen`.
    pub fn exponent_sum(&self, gen: Gen) -> i64 {
        self.0.iter().filter(|l| l.gen == gen).map(|l| l.sign()).sum()
    }

    pub fn t_exponent_sum(&self) -> i64 {
        self.exponent_sum(Gen::T)
    }

    pub fn a_exponent_sum(&self) -> i64 {
        self.0.iter().filter(|l| matches!(l.gen, Gen::A | Gen::Idx(_))).map(|l| l.sign()).sum()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| !l.inv)
    }

    /// Rewrites a zero t-sum plain word over the conjugates `a[n] = t^n a t^-n`.
    pub fn magnus_rewrite(&self) -> Result<Word, WordError> {
        self.require(Alphabet::Plain)?;
        let tsum = self.t_exponent_sum();
        if tsum != 0 {
            return Err(WordError::NonzeroTSum(tsum));
        }
        let mut level = 0i64;
        let mut out = Vec::new();
        for l in &self.0 {
            match l.gen {
                Gen::T => level += l.sign(),
                Gen::A => out.push(Letter { gen: Gen::Idx(level), inv: l.inv }),
                Gen::Idx(_) => unreachable!(),
            }
        }
        Ok(Word(out).reduce())
    }

    /// Substitutes `a[n] ↦ t^n a t^-n` and reduces.
    pub fn unrewrite(&self) -> Result<Word, WordError> {
        self.require(Alphabet::Indexed)?;
        let mut out = Vec::new();
        let mut level = 0i64;
        for l in &self.0 {
            let n = l.index().expect("indexed alphabet");
            push_t_power(&mut out, n - level);
            level = n;
            out.push(Letter { gen: Gen::A, inv: l.inv });
        }
        push_t_power(&mut out, -level);
        Ok(Word(out).reduce())
    }
}

fn push_t_power(out: &mut Vec<Letter>, e: i64) {
    let l = if e < 0 { Letter::neg(Gen::T) } else { Letter::T };
    for _ in 0..e.unsigned_abs() {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
}

impl fmt::Display for Word {
    /// Canonical form: runs of one letter collapse to a power, single spaces,
    /// exponent omitted when it is `+1`, identity printed as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i + 1;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let e = (j - i) as i64 * l.sign();
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", l.gen)?;
            } else {
                write!(f, "{}^{}", l.gen, e)?;
            }
            i = j;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for term in s.split_whitespace() {
            let (gen, rest) = parse_gen(term)?;
            let e = match rest {
                "" => 1,
                r => r.strip_prefix('^').and_then(parse_int).ok_or_else(|| WordError::Parse(term.to_string()))?,
            };
            let l = if e < 0 { Letter::neg(gen) } else { Letter::pos(gen) };
            letters.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        Word::new(letters)
    }
}

fn parse_int(s: &str) -> Option<i64> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_gen(term: &str) -> Result<(Gen, &str), WordError> {
    let err = || WordError::Parse(term.to_string());
    if let Some(rest) = term.strip_prefix('t') {
        return Ok((Gen::T, rest));
    }
    let rest = term.strip_prefix('a').ok_or_else(err)?;
    if let Some(inner) = rest.strip_prefix('[') {
        let close = inner.find(']').ok_or_else(err)?;
        let n = parse_int(&inner[..close]).ok_or_else(err)?;
        Ok((Gen::Idx(n), &inner[close + 1..]))
    } else {
        Ok((Gen::A, rest))
    }
}

/// Parses a word, panicking on malformed input. Intended for literals in
/// tests and examples.
pub fn w(s: &str) -> Word {
    s.parse().unwrap_or_else(|e| panic!("bad word literal {s:?}: {e}"))
}

/// The triple `(s, m, W)` defining the group `Γ_W`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TowerParams {
    s: usize,
    m: u32,
    w: Word,
}

impl TowerParams {
    /// Validates and canonicalizes.
    pub fn new(s: usize, m: u32, w: Word) -> Result<Self, WordError> {
        TowerParams::raw(s, m, w)?.canonicalize()
    }

    /// Validates without canonicalizing.
    pub fn raw(s: usize, m: u32, w: Word) -> Result<Self, WordError> {
        if s == 0 {
            return Err(WordError::Params("s must be positive".into()));
        }
        if m < 2 {
            return Err(WordError::Params("m must be at least 2".into()));
        }
        if w.is_empty() || !w.is_positive() || !w.is_over(Alphabet::Indexed) {
            return Err(WordError::Params("W must be a nonempty positive indexed word".into()));
        }
        Ok(TowerParams { s, m, w })
    }

    /// The group of the two-generator example: `(1, 2, a[0])`.
    pub fn gamma() -> Self {
        TowerParams { s: 1, m: 2, w: Word::idx_pow(0, 1) }
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn w(&self) -> &Word {
        &self.w
    }

    /// Shifts `W` so its smallest index is 0 and sets `s = 1 + max index`.
    pub fn canonicalize(&self) -> Result<Self, WordError> {
        let (lo, hi) = self.w.index_range().ok_or_else(|| WordError::Params("W must be nonempty".into()))?;
        if !self.w.is_positive() {
            return Err(WordError::Params("W must be positive".into()));
        }
        Ok(TowerParams { s: (hi - lo + 1) as usize, m: self.m, w: self.w.shift(-lo) })
    }

    pub fn is_canonical(&self) -> bool {
        self.w.index_range() == Some((0, self.s as i64 - 1))
    }

    /// `X_j = shift(W, j) · a[j+s+1]`.
    pub fn x_word(&self, j: i64) -> Word {
        self.w.shift(j).mul(&Word::idx_pow(j + self.s as i64 + 1, 1))
    }

    /// `R_j = a[j+s] X_j a[j+s]^-1 X_j^-m`, reduced.
    pub fn relator(&self, j: i64) -> Word {
        let x = self.x_word(j);
        let c = Word::idx_pow(j + self.s as i64, 1);
        x.conj(&c).mul(&x.pow(-(self.m as i64)))
    }

    /// Relator of `⟨t, a | r⟩`.
    pub fn gamma_relator(&self) -> Word {
        self.relator(0).unrewrite().expect("indexed relator")
    }

    /// Number of letters in `a[s] X a[s]^-1`: the natural left side of `R_0`.
    pub fn relator_lhs_len(&self) -> usize {
        self.w.len() + 3
    }
}

impl fmt::Display for TowerParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.s, self.m, self.w)
    }
}

impl FromStr for TowerParams {
    type Err = WordError;

    /// `s,m,W`, e.g. `1,2,a[0]`. Surrounding quotes on `W` are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.splitn(3, ',');
        let bad = || WordError::Params(format!("expected `s,m,W`, got {s:?}"));
        let sv: usize = parts.next().and_then(|p| p.trim().parse().ok()).ok_or_else(bad)?;
        let mv: u32 = parts.next().and_then(|p| p.trim().parse().ok()).ok_or_else(bad)?;
        let wv: Word = parts.next().ok_or_else(bad)?.trim().trim_matches('"').parse()?;
        TowerParams::new(sv, mv, wv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMA: &str = "t a t^-1 a t^2 a t^-1 a^-1 t a^-1 t^-2 a^-1 t^2 a^-1 t^-2 a^-1";

    #[test]
    fn reduce_cancels() {
        assert!(w("a a^-1").reduce().is_empty());
        assert!(w("t a t^-1 t a^-1 t^-1").reduce().is_empty());
        assert_eq!(w(GAMMA).reduce(), w(GAMMA));
    }

    #[test]
    fn mixed_alphabet_rejected() {
        assert_eq!("t a[0]".parse::<Word>(), Err(WordError::MixedAlphabet));
        assert!(Word::new(vec![Letter::A, Letter::idx(2)]).is_err());
    }

    #[test]
    fn parse_errors() {
        for bad in ["b", "a[", "a[x]", "t^", "t^+2", "a[1]^1.5", "tt"] {
            assert!(bad.parse::<Word>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(w("a[0] a[0] a[1]").to_string(), "a[0]^2 a[1]");
        assert_eq!(w("t t a^-1 a^-1").to_string(), "t^2 a^-2");
        assert_eq!(w("1").to_string(), "1");
        assert_eq!(w("a[-3]^-2 a[0]").to_string(), "a[-3]^-2 a[0]");
        assert_eq!(w(GAMMA).to_string(), GAMMA);
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("a[0] a[1] a[0]^-1").cyclic_reduce(), (w("a[0]"), w("a[1]")));
        assert_eq!(w("a[0] a[1]").cyclic_reduce(), (Word::empty(), w("a[0] a[1]")));
        let word = w("a[0]^-1 a[1] a[2] a[0]");
        let (h, core) = word.cyclic_reduce();
        assert_eq!((h.clone(), core.clone()), (w("a[0]^-1"), w("a[1] a[2]")));
        assert_eq!(core.conj(&h), word);
        assert!(core.is_cyclically_reduced());
    }

    #[test]
    fn shift_examples() {
        assert_eq!(w("a[0] a[2]").shift(1), w("a[1] a[3]"));
        assert_eq!(w("a[0] a[2]").shift(0), w("a[0] a[2]"));
    }

    #[test]
    fn exponent_sums() {
        assert_eq!(w(GAMMA).t_exponent_sum(), 0);
        assert_eq!(w(GAMMA).a_exponent_sum(), -2);
        assert_eq!(Word::empty().t_exponent_sum(), 0);
    }

    #[test]
    fn magnus_examples() {
        assert_eq!(w("t a t^-1").magnus_rewrite().unwrap(), w("a[1]"));
        assert_eq!(w("a").magnus_rewrite().unwrap(), w("a[0]"));
        assert_eq!(w(GAMMA).magnus_rewrite().unwrap(), w("a[1] a[0] a[2] a[1]^-1 a[2]^-1 a[0]^-1 a[2]^-1 a[0]^-1"));
        assert_eq!(w("t a").magnus_rewrite(), Err(WordError::NonzeroTSum(1)));
        assert!(w("a[0]").magnus_rewrite().is_err());
    }

    #[test]
    fn unrewrite_examples() {
        assert_eq!(w("a[1]").unrewrite().unwrap(), w("t a t^-1"));
        assert_eq!(w("a[0] a[2]").unrewrite().unwrap(), w("a t^2 a t^-2"));
        assert_eq!(w("a[-1]").unrewrite().unwrap(), w("t^-1 a t"));
    }

    #[test]
    fn relator_examples() {
        let g = TowerParams::gamma();
        assert_eq!(g.relator(0), w("a[1] a[0] a[2] a[1]^-1").mul(&w("a[0] a[2]").pow(-2)));
        assert_eq!(g.relator(5), g.relator(0).shift(5));
        let p = TowerParams::new(2, 3, w("a[0] a[1]")).unwrap();
        assert_eq!(p.relator(0), w("a[2] a[0] a[1] a[3] a[2]^-1").mul(&w("a[0] a[1] a[3]").pow(-3)));
        assert_eq!(p.relator(0).index_range(), Some((0, 3)));
    }

    #[test]
    fn gamma_presentation() {
        let g = TowerParams::gamma();
        assert_eq!(g.gamma_relator(), w(GAMMA));
        assert_eq!(g.gamma_relator().t_exponent_sum(), 0);
        let p = TowerParams::new(2, 3, w("a[0] a[1]")).unwrap();
        assert_eq!(p.gamma_relator().a_exponent_sum(), -6);
    }

    #[test]
    fn canonicalize_examples() {
        let p = TowerParams::raw(3, 2, w("a[1]")).unwrap().canonicalize().unwrap();
        assert_eq!((p.s(), p.m(), p.w().clone()), (1, 2, w("a[0]")));
        assert_eq!(TowerParams::gamma().canonicalize().unwrap(), TowerParams::gamma());
        let p = TowerParams::raw(2, 2, w("a[0] a[1]")).unwrap();
        assert_eq!(p.canonicalize().unwrap(), p);
        assert!(TowerParams::raw(1, 2, Word::empty()).is_err());
        assert!(TowerParams::raw(1, 2, w("a[0]^-1")).is_err());
        assert!(TowerParams::raw(1, 1, w("a[0]")).is_err());
    }

    #[test]
    fn params_parse() {
        let p: TowerParams = "1,2,\"a[0]\"".parse().unwrap();
        assert_eq!(p, TowerParams::gamma());
        let p: TowerParams = "2,2,a[0] a[0] a[1]".parse().unwrap();
        assert_eq!(p.w(), &w("a[0]^2 a[1]"));
        assert_eq!(p.to_string(), "2,2,a[0]^2 a[1]");
        assert!("1,2".parse::<TowerParams>().is_err());
    }
}
