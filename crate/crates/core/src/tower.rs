//! Word problem for `Γ_W` through the tower of amalgams.
//!
//! `G_n` is the subgroup of `H` generated by `a[0..=n]`, presented by the
//! relators `R_0 .. R_{n-s-1}`. For `n ≤ s` it is free; above that
//!
//! ```text
//! G_n = G_{n-1} *_C B,   C = ⟨c⟩, c = a[n-1],   B = ⟨c, x⟩ ≅ BS(1,m),
//! x = W_{n-s-1} · a[n]
//! ```
//!
//! so `a[n] = W_{n-s-1}⁻¹ x`. A word at level `n` is cut into alternating
//! syllables from `G_{n-1}` (words) and `B` (normal forms), syllables lying in
//! `C` are pinched into their neighbours, and a stable alternating sequence of
//! length ≥ 2 is nontrivial. Single syllables recurse one level down.
//!
//! Membership in `C` goes through the rational abelianization: the image of
//! `a[n-1]` pins down the only candidate exponent `p`, which is then confirmed
//! by a recursive triviality check of `g · c^-p`.

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bsarith::{BsElement, MAdic};
use crate::par::Exec;
use crate::words::{Alphabet, Gen, Letter, TowerParams, Word, WordError};

/// Default bound for the `C`-membership fallback search.
pub const DEFAULT_PMAX: u32 = 64;

/// Abelian images of `a[0..IMAGE_TABLE]` are precomputed.
const IMAGE_TABLE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("index {index} outside the window [0, {level}]")]
    OutOfWindow { index: i64, level: usize },
    #[error("tower parameters must be canonical")]
    NotCanonical,
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Trivial,
    NonTrivial,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Trivial => "trivial",
            Verdict::NonTrivial => "nontrivial",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of a `⟨c⟩`-membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In(i64),
    NotIn,
    Inconclusive,
}

/// One factor of an alternating product in `G_{n-1} *_C B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Syllable {
    A(Word),
    B(BsElement),
}

impl Syllable {
    fn is_trivial(&self) -> bool {
        match self {
            Syllable::A(w) => w.is_empty(),
            Syllable::B(g) => g.is_identity(),
        }
    }

    fn same_tag(&self, other: &Syllable) -> bool {
        matches!((self, other), (Syllable::A(_), Syllable::A(_)) | (Syllable::B(_), Syllable::B(_)))
    }

    fn merge(self, right: Syllable) -> Syllable {
        match (self, right) {
            (Syllable::A(u), Syllable::A(v)) => Syllable::A(u.mul(&v)),
            (Syllable::B(g), Syllable::B(h)) => Syllable::B(g.mul(&h).expect("one base per tower")),
            _ => unreachable!("merging syllables of different tags"),
        }
    }

    /// The syllable as a word in `a[0..=n]`, using `x^(p/m^q) = c^-q x^p c^q`.
    pub fn to_word(&self, params: &TowerParams, n: usize) -> Word {
        match self {
            Syllable::A(w) => w.clone(),
            Syllable::B(g) => {
                let c = n as i64 - 1;
                let x = params.x_word(n as i64 - params.s() as i64 - 1);
                let l = &g.beta_exp;
                let p = l.numerator().to_i64().expect("beta numerator fits in i64");
                let q = l.den_exp() as i64;
                Word::idx_pow(c, g.alpha_exp - q).mul(&x.pow(p)).mul(&Word::idx_pow(c, q))
            }
        }
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Syllable::A(w) => write!(f, "A[{w}]"),
            Syllable::B(g) => write!(f, "B[{g}]"),
        }
    }
}

/// Coordinates of the rational abelianization on `ā_0 .. ā_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianImage(pub Vec<BigRational>);

impl AbelianImage {
    pub fn zero(dim: usize) -> Self {
        AbelianImage(vec![BigRational::zero(); dim])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    fn add_scaled(&mut self, other: &AbelianImage, k: i64) {
        let k = BigRational::from_integer(BigInt::from(k));
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * &k;
        }
    }

    /// `p` with `self = p · unit`, when `p` exists and is an integer.
    fn integer_multiple_of(&self, unit: &AbelianImage) -> Option<i64> {
        let k = unit.0.iter().position(|x| !x.is_zero())?;
        let p = &self.0[k] / &unit.0[k];
        if !p.is_integer() {
            return None;
        }
        if self.0.iter().zip(&unit.0).any(|(a, b)| *a != b * &p) {
            return None;
        }
        p.to_integer().to_i64()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub pinches: u64,
    pub recursive_calls: u64,
}

/// A word-problem verdict with its diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub level: usize,
    pub syllables: Option<Vec<Syllable>>,
    pub stats: Stats,
}

impl Decision {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.as_str(),
            "level": self.level,
            "syllables": self.syllables.as_ref().map(|s| s.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
            "stats": { "pinches": self.stats.pinches, "recursive_calls": self.stats.recursive_calls },
        })
    }
}

/// The word-problem engine for one `Γ_W`.
#[derive(Debug, Clone)]
pub struct Tower {
    params: TowerParams,
    pmax: u32,
    /// `w_i`: multiplicity of `a[i]` in `W`.
    weights: Vec<i64>,
    images: Vec<AbelianImage>,
}

struct Ctx<'a> {
    tower: &'a Tower,
    stats: Stats,
    memo: HashMap<Word, Verdict>,
}

struct Entry {
    syl: Syllable,
    mem: Membership,
}

impl Tower {
    pub fn new(params: TowerParams) -> Result<Self, TowerError> {
        Tower::with_pmax(params, DEFAULT_PMAX)
    }

    pub fn gamma() -> Self {
        Tower::new(TowerParams::gamma()).expect("canonical")
    }

    pub fn with_pmax(params: TowerParams, pmax: u32) -> Result<Self, TowerError> {
        if !params.is_canonical() {
            return Err(TowerError::NotCanonical);
        }
        let s = params.s();
        let mut weights = vec![0i64; s];
        for l in params.w().letters() {
            weights[l.index().expect("indexed") as usize] += 1;
        }
        let mut images = Vec::with_capacity(IMAGE_TABLE + 1);
        for k in 0..=IMAGE_TABLE {
            let img = if k <= s {
                let mut v = AbelianImage::zero(s + 1);
                v.0[k] = BigRational::one();
                v
            } else {
                let mut v = AbelianImage::zero(s + 1);
                for (i, &wi) in weights.iter().enumerate() {
                    v.add_scaled(&images[k - s - 1 + i], -wi);
                }
                v
            };
            images.push(img);
        }
        Ok(Tower { params, pmax, weights, images })
    }

    pub fn params(&self) -> &TowerParams {
        &self.params
    }

    pub fn pmax(&self) -> u32 {
        self.pmax
    }

    fn s(&self) -> usize {
        self.params.s()
    }

    fn base(&self) -> u32 {
        self.params.m()
    }

    /// Image of the generator `a[k]`, for any integer `k`.
    pub fn index_image(&self, k: i64) -> AbelianImage {
        if (0..=IMAGE_TABLE as i64).contains(&k) {
            return self.images[k as usize].clone();
        }
        let s = self.s() as i64;
        let mut window: HashMap<i64, AbelianImage> = HashMap::new();
        for j in 0..=s {
            window.insert(j, self.images[j as usize].clone());
        }
        if k > 0 {
            for j in s + 1..=k {
                let mut v = AbelianImage::zero(s as usize + 1);
                for (i, &wi) in self.weights.iter().enumerate() {
                    v.add_scaled(&window[&(j - s - 1 + i as i64)], -wi);
                }
                window.insert(j, v);
            }
        } else {
            // w_0 ā_j = -(Σ_{i≥1} w_i ā_{j+i} + ā_{j+s+1})
            let w0 = BigRational::from_integer(BigInt::from(self.weights[0]));
            for j in (k..0).rev() {
                let mut v = window[&(j + s + 1)].clone();
                for (i, &wi) in self.weights.iter().enumerate().skip(1) {
                    v.add_scaled(&window[&(j + i as i64)], wi);
                }
                for x in v.0.iter_mut() {
                    *x = -(&*x) / &w0;
                }
                window.insert(j, v);
            }
        }
        window.remove(&k).expect("computed")
    }

    /// Rational abelianization of an indexed word.
    pub fn abelian_image(&self, w: &Word) -> AbelianImage {
        let mut out = AbelianImage::zero(self.s() + 1);
        let mut counts: HashMap<i64, i64> = HashMap::new();
        for l in w.letters() {
            if let Some(n) = l.index() {
                *counts.entry(n).or_default() += l.sign();
            }
        }
        let mut keys: Vec<_> = counts.into_iter().filter(|(_, c)| *c != 0).collect();
        keys.sort_unstable();
        for (n, c) in keys {
            if (0..=IMAGE_TABLE as i64).contains(&n) {
                out.add_scaled(&self.images[n as usize], c);
            } else {
                out.add_scaled(&self.index_image(n), c);
            }
        }
        out
    }

    fn check_window(&self, w: &Word, lo: i64, hi: i64, level: usize) -> Result<(), TowerError> {
        w.require(Alphabet::Indexed)?;
        if let Some(l) = w.letters().iter().find(|l| {
            let n = l.index().expect("indexed");
            n < lo || n > hi
        }) {
            return Err(TowerError::OutOfWindow { index: l.index().unwrap(), level });
        }
        Ok(())
    }

    /// Cuts a word at level `n ≥ s+1` into alternating syllables.
    pub fn substitute_top(&self, w: &Word, n: usize) -> Result<Vec<Syllable>, TowerError> {
        self.check_window(w, 0, n as i64, n)?;
        assert!(n > self.s(), "substitute_top needs a level above the free base");
        Ok(self.substitute_unchecked(&w.reduce(), n))
    }

    fn substitute_unchecked(&self, w: &Word, n: usize) -> Vec<Syllable> {
        let m = self.base();
        let top = n as i64;
        let wshift = self.params.w().shift(top - self.s() as i64 - 1);
        let winv = wshift.inverse();
        let mut out: Vec<Syllable> = Vec::new();
        let mut pending: Vec<Letter> = Vec::new();
        let flush = |out: &mut Vec<Syllable>, pending: &mut Vec<Letter>| {
            if !pending.is_empty() {
                let word = Word::from_letters_unchecked(std::mem::take(pending)).reduce();
                if !word.is_empty() {
                    out.push(Syllable::A(word));
                }
            }
        };
        let push_b = |out: &mut Vec<Syllable>, e: i64| {
            let g = BsElement::beta_pow(MAdic::integer(e, m));
            match out.last_mut() {
                Some(Syllable::B(h)) => {
                    *h = h.mul(&g).expect("same base");
                    if h.is_identity() {
                        out.pop();
                    }
                }
                _ => out.push(Syllable::B(g)),
            }
        };
        for &l in w.letters() {
            if l.index() == Some(top) {
                if l.inv {
                    flush(&mut out, &mut pending);
                    push_b(&mut out, -1);
                    pending.extend_from_slice(wshift.letters());
                } else {
                    pending.extend_from_slice(winv.letters());
                    flush(&mut out, &mut pending);
                    push_b(&mut out, 1);
                }
            } else {
                pending.push(l);
            }
        }
        flush(&mut out, &mut pending);
        // merge A's that became adjacent after a B cancelled
        let mut merged: Vec<Syllable> = Vec::with_capacity(out.len());
        for s in out {
            match merged.last() {
                Some(prev) if prev.same_tag(&s) => {
                    let prev = merged.pop().unwrap();
                    let m = prev.merge(s);
                    if !m.is_trivial() {
                        merged.push(m);
                    }
                }
                _ => merged.push(s),
            }
        }
        merged
    }

    /// Pinches a syllable sequence at level `n` into stable alternating form.
    pub fn pinch_reduce(&self, syllables: Vec<Syllable>, n: usize) -> (Vec<Syllable>, Stats) {
        let mut ctx = Ctx::new(self);
        let st = ctx.pinch(syllables, n);
        (st.into_iter().map(|e| e.syl).collect(), ctx.stats)
    }

    /// Whether an indexed word over `a[0..n-1]` equals `a[n-1]^p` in `G_{n-1}`.
    pub fn membership_in_c(&self, g: &Word, n: usize) -> Result<Membership, TowerError> {
        if n == 0 {
            return Err(TowerError::OutOfWindow { index: 0, level: 0 });
        }
        self.check_window(g, 0, n as i64 - 1, n - 1)?;
        Ok(Ctx::new(self).membership(&g.reduce(), n))
    }

    /// Decides whether `w` (indices in `[0, n]`) is trivial in `G_n`.
    pub fn is_trivial(&self, w: &Word, n: usize) -> Result<Decision, TowerError> {
        self.check_window(w, 0, n as i64, n)?;
        let mut ctx = Ctx::new(self);
        let w = w.reduce();
        if n <= self.s() || w.is_empty() {
            let verdict = if w.is_empty() { Verdict::Trivial } else { Verdict::NonTrivial };
            let syllables = Some(if w.is_empty() { vec![] } else { vec![Syllable::A(w)] });
            return Ok(Decision { verdict, level: n, syllables, stats: ctx.stats });
        }
        let stack = ctx.pinch(self.substitute_unchecked(&w, n), n);
        let verdict = ctx.verdict_of(&stack);
        let syllables = Some(stack.into_iter().map(|e| e.syl).collect());
        Ok(Decision { verdict, level: n, syllables, stats: ctx.stats })
    }

    /// Verdict only, at the word's own index window.
    pub fn decide(&self, w: &Word) -> Result<Verdict, TowerError> {
        w.require(Alphabet::Indexed)?;
        Ok(Ctx::new(self).decide(w))
    }

    /// The stable alternating form of `w` at level `n`.
    pub fn syllable_decomposition(&self, w: &Word, n: usize) -> Result<Vec<Syllable>, TowerError> {
        self.check_window(w, 0, n as i64, n)?;
        let w = w.reduce();
        if n <= self.s() {
            return Ok(if w.is_empty() { vec![] } else { vec![Syllable::A(w)] });
        }
        Ok(self.pinch_reduce(self.substitute_unchecked(&w, n), n).0)
    }

    /// Word problem in `⟨t, a | r⟩` via `Γ = Z ⋉ H`.
    pub fn is_trivial_in_gamma(&self, w: &Word) -> Result<Decision, TowerError> {
        w.require(Alphabet::Plain)?;
        let w = w.reduce();
        if w.t_exponent_sum() != 0 {
            return Ok(Decision { verdict: Verdict::NonTrivial, level: 0, syllables: None, stats: Stats::default() });
        }
        let h = w.magnus_rewrite()?;
        let Some((lo, hi)) = h.index_range() else {
            return Ok(Decision {
                verdict: Verdict::Trivial,
                level: 0,
                syllables: Some(vec![]),
                stats: Stats::default(),
            });
        };
        self.is_trivial(&h.shift(-lo), (hi - lo) as usize)
    }

    /// Decides a batch of indexed words, each at its own window.
    pub fn decide_batch(&self, words: &[Word], exec: Exec) -> Vec<Verdict> {
        exec.map(words, |w| Ctx::new(self).decide(w))
    }
}

impl<'a> Ctx<'a> {
    fn new(tower: &'a Tower) -> Self {
        Ctx { tower, stats: Stats::default(), memo: HashMap::new() }
    }

    fn decide(&mut self, w: &Word) -> Verdict {
        let w = w.reduce();
        let Some((lo, hi)) = w.index_range() else {
            return Verdict::Trivial;
        };
        let w = if lo != 0 { w.shift(-lo) } else { w };
        let level = (hi - lo) as usize;
        if let Some(&v) = self.memo.get(&w) {
            return v;
        }
        let v = if level <= self.tower.s() || !self.tower.abelian_image(&w).is_zero() {
            Verdict::NonTrivial
        } else {
            let syl = self.tower.substitute_unchecked(&w, level);
            let stack = self.pinch(syl, level);
            self.verdict_of(&stack)
        };
        self.memo.insert(w, v);
        v
    }

    fn verdict_of(&mut self, stack: &[Entry]) -> Verdict {
        match stack {
            [] => Verdict::Trivial,
            [Entry { syl: Syllable::A(u), .. }] => {
                self.stats.recursive_calls += 1;
                self.decide(u)
            }
            [Entry { syl: Syllable::B(g), .. }] => {
                if g.is_identity() {
                    Verdict::Trivial
                } else {
                    Verdict::NonTrivial
                }
            }
            _ if stack.iter().any(|e| e.mem == Membership::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::NonTrivial,
        }
    }

    fn membership_of(&mut self, s: &Syllable, n: usize) -> Membership {
        match s {
            Syllable::A(w) => self.membership(w, n),
            Syllable::B(g) => g.in_alpha().map_or(Membership::NotIn, Membership::In),
        }
    }

    fn convert(&self, s: Syllable, p: i64, n: usize) -> Syllable {
        match s {
            Syllable::A(_) => Syllable::B(BsElement::alpha_pow(p, self.tower.base())),
            Syllable::B(_) => Syllable::A(Word::idx_pow(n as i64 - 1, p)),
        }
    }

    fn pinch(&mut self, syllables: Vec<Syllable>, n: usize) -> Vec<Entry> {
        let mut stack: Vec<Entry> = Vec::with_capacity(syllables.len());
        for s in syllables {
            self.push(&mut stack, s, n);
        }
        stack
    }

    fn push(&mut self, stack: &mut Vec<Entry>, mut s: Syllable, n: usize) {
        loop {
            if s.is_trivial() {
                return;
            }
            if let Some(top) = stack.pop_if(|top| top.syl.same_tag(&s)) {
                s = top.syl.merge(s);
                continue;
            }
            let mem = self.membership_of(&s, n);
            if let (Membership::In(p), Some(_)) = (mem, stack.last()) {
                self.stats.pinches += 1;
                s = self.convert(s, p, n);
                continue;
            }
            if let Some(Entry { mem: Membership::In(p), .. }) = stack.last() {
                let p = *p;
                let top = stack.pop().unwrap();
                self.stats.pinches += 1;
                s = self.convert(top.syl, p, n).merge(s);
                continue;
            }
            stack.push(Entry { syl: s, mem });
            return;
        }
    }

    /// `g` is a reduced word over `a[0..n-1]`.
    fn membership(&mut self, g: &Word, n: usize) -> Membership {
        let c = n as i64 - 1;
        if g.letters().iter().all(|l| l.gen == Gen::Idx(c)) {
            return Membership::In(g.exponent_sum(Gen::Idx(c)));
        }
        let unit = self.tower.index_image(c);
        if !unit.is_zero() {
            let img = self.tower.abelian_image(g);
            let Some(p) = img.integer_multiple_of(&unit) else {
                return Membership::NotIn;
            };
            self.stats.recursive_calls += 1;
            return match self.decide(&g.mul(&Word::idx_pow(c, -p))) {
                Verdict::Trivial => Membership::In(p),
                Verdict::NonTrivial => Membership::NotIn,
                Verdict::Inconclusive => Membership::Inconclusive,
            };
        }
        // ā_{n-1} = 0: bounded search over |p| ≤ pmax.
        for k in 0..=self.tower.pmax as i64 {
            for p in if k == 0 { vec![0] } else { vec![k, -k] } {
                self.stats.recursive_calls += 1;
                if self.decide(&g.mul(&Word::idx_pow(c, -p))) == Verdict::Trivial {
                    return Membership::In(p);
                }
            }
        }
        Membership::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    fn gamma() -> Tower {
        Tower::gamma()
    }

    fn b(i: i64, num: i64, den_exp: u32) -> Syllable {
        Syllable::B(BsElement { alpha_exp: i, beta_exp: MAdic::new(num, den_exp, 2).unwrap() })
    }

    #[test]
    fn substitute_examples() {
        let t = gamma();
        assert_eq!(t.substitute_top(&w("a[2]"), 2).unwrap(), vec![Syllable::A(w("a[0]^-1")), b(0, 1, 0)]);
        assert_eq!(t.substitute_top(&w("a[0]"), 2).unwrap(), vec![Syllable::A(w("a[0]"))]);
        assert!(t.substitute_top(&w("a[2]^-1 a[2]"), 2).unwrap().is_empty());
        assert_eq!(t.substitute_top(&w("a[3]"), 2), Err(TowerError::OutOfWindow { index: 3, level: 2 }));
    }

    #[test]
    fn pinch_examples() {
        let t = gamma();
        for n in 2..5 {
            let r = t.params().relator(n as i64 - 2);
            let syl = t.substitute_top(&r, n).unwrap();
            assert!(t.pinch_reduce(syl, n).0.is_empty(), "R_{} at level {n}", n - 2);
        }
        assert_eq!(t.pinch_reduce(vec![Syllable::A(w("a[0]"))], 2).0, vec![Syllable::A(w("a[0]"))]);
        // a[1] x a[1]^-1 x^-2 with x = a[0] a[2]
        let word = w("a[1] a[0] a[2] a[1]^-1 a[2]^-1 a[0]^-1 a[2]^-1 a[0]^-1");
        assert_eq!(word, t.params().relator(0));
        assert!(t.syllable_decomposition(&word, 2).unwrap().is_empty());
    }

    #[test]
    fn membership_examples() {
        let t = gamma();
        assert_eq!(t.membership_in_c(&w("a[1]^5"), 2).unwrap(), Membership::In(5));
        assert_eq!(t.membership_in_c(&w("a[0] a[2]"), 3).unwrap(), Membership::NotIn);
        assert_eq!(t.membership_in_c(&t.params().relator(0), 3).unwrap(), Membership::In(0));
        let conj = w("a[1]^3").conj(&t.params().relator(0));
        assert_eq!(t.membership_in_c(&conj, 3).unwrap(), Membership::NotIn);
    }

    #[test]
    fn abelian_examples() {
        let t = gamma();
        assert!(t.abelian_image(&t.params().relator(0)).is_zero());
        let mut neg = t.abelian_image(&w("a[0]"));
        neg.0.iter_mut().for_each(|x| *x = -x.clone());
        assert_eq!(t.abelian_image(&w("a[2]")), neg);
        for k in -6..12i64 {
            let img = t.index_image(k);
            let sign = if k.div_euclid(2) % 2 == 0 { 1 } else { -1 };
            let mut expect = AbelianImage::zero(2);
            expect.0[k.rem_euclid(2) as usize] = BigRational::from_integer(sign.into());
            assert_eq!(img, expect, "a[{k}]");
        }
        for j in -3..4 {
            assert!(t.abelian_image(&t.params().relator(j)).is_zero());
        }
    }

    #[test]
    fn general_params_abelian() {
        let p = TowerParams::new(2, 3, w("a[0] a[0] a[1]")).unwrap();
        let t = Tower::new(p.clone()).unwrap();
        for j in -4..6 {
            assert!(t.abelian_image(&p.relator(j)).is_zero(), "R_{j}");
        }
        for k in 0..40 {
            assert!(!t.index_image(k).is_zero());
        }
    }

    #[test]
    fn triviality_examples() {
        let t = gamma();
        assert_eq!(t.is_trivial(&t.params().relator(0), 2).unwrap().verdict, Verdict::Trivial);
        let comm = w("a[1] a[0] a[2] a[1]^-1 a[2]^-1 a[0]^-1");
        let d = t.is_trivial(&comm, 2).unwrap();
        assert_eq!(d.verdict, Verdict::NonTrivial);
        // c x c^-1 x^-1 = x^m x^-1 = x: pinching leaves a single B-syllable
        assert_eq!(d.syllables, Some(vec![b(0, 1, 0)]));
        assert_eq!(t.is_trivial(&Word::empty(), 4).unwrap().verdict, Verdict::Trivial);
        assert_eq!(t.is_trivial(&w("a[0] a[1]"), 1).unwrap().verdict, Verdict::NonTrivial);
    }

    #[test]
    fn gamma_level_examples() {
        let t = gamma();
        let rel = t.params().gamma_relator();
        assert_eq!(t.is_trivial_in_gamma(&rel).unwrap().verdict, Verdict::Trivial);
        assert_eq!(t.is_trivial_in_gamma(&w("t")).unwrap().verdict, Verdict::NonTrivial);
        let (bb, ac) = (w("t a t^-1"), w("a t^2 a t^-2"));
        let comm = bb.mul(&ac).mul(&bb.inverse()).mul(&ac.inverse());
        assert_eq!(t.is_trivial_in_gamma(&comm).unwrap().verdict, Verdict::NonTrivial);
        // [b, ac] = ac, so [b, ac] (ac)^-1 is trivial
        assert_eq!(t.is_trivial_in_gamma(&comm.mul(&ac.inverse())).unwrap().verdict, Verdict::Trivial);
    }

    #[test]
    fn decomposition_examples() {
        let t = gamma();
        assert_eq!(t.syllable_decomposition(&w("a[0] a[2]"), 2).unwrap(), vec![b(0, 1, 0)]);
        let d = t.syllable_decomposition(&w("a[0] a[0] a[2] a[0]"), 2).unwrap();
        assert_eq!(d, vec![Syllable::A(w("a[0]")), b(0, 1, 0), Syllable::A(w("a[0]"))]);
        for s in &d {
            assert_eq!(s.to_word(t.params(), 2).alphabet(), Some(Alphabet::Indexed));
        }
    }

    #[test]
    fn b_syllable_word_round_trip() {
        let t = gamma();
        let g = b(3, 5, 2);
        let word = g.to_word(t.params(), 2);
        assert_eq!(t.syllable_decomposition(&word, 2).unwrap(), vec![g]);
    }

    #[test]
    fn requires_canonical_params() {
        let p = TowerParams::raw(3, 2, w("a[1]")).unwrap();
        assert_eq!(Tower::new(p).unwrap_err(), TowerError::NotCanonical);
    }

    #[test]
    fn index_image_beyond_table() {
        let t = gamma();
        assert_eq!(t.index_image(70), t.index_image(66));
        let p = TowerParams::new(2, 2, w("a[0] a[1]")).unwrap();
        let t = Tower::new(p).unwrap();
        let direct = t.index_image(IMAGE_TABLE as i64 + 3);
        assert!(direct.0.iter().all(|x| x.is_integer()));
        assert!(direct.0.iter().any(|x| x.numer().magnitude() > &1u32.into()));
    }
}
