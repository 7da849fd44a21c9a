//! Budgeted search for generalized torsion: `τ ≠ 1` with
//! `∏ t^{n_i} g_i τ g_i⁻¹ t^{-n_i} = 1`.
//!
//! Enumeration order, which fixes the order of reported findings:
//!
//! 1. `|τ|` ascending, then the number of factors `r`;
//! 2. blocks of equal `(Σ|g_i|, Σ|n_i|)`, ascending;
//! 3. inside a block: `τ`, then the conjugator tuple, then the shift tuple.
//!
//! `τ` runs over cyclically reduced words, one per class under rotation and
//! inversion. Conjugators are reduced words in the oracle's generators, ordered
//! by length and then by the letter order `x₁ x₁⁻¹ x₂ x₂⁻¹ …`; shifts are ordered
//! `0, 1, -1, 2, -2, …`.
//!
//! A product is decided once per distinct tuple of factor words up to
//! rotation (rotating the factors conjugates the product), but every
//! enumerated tuple is counted and reported.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use crate::oracle::WordOracle;
use crate::par::Exec;
use crate::tower::Verdict;
use crate::words::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GtError {
    #[error("{0} conjugators but {1} shifts")]
    LengthMismatch(usize, usize),
    #[error("no factors")]
    Empty,
    #[error("oracle {0} has no shift action")]
    ShiftUnsupported(String),
    #[error("at most {0} factors are supported")]
    TooManyFactors(usize),
    #[error("too many conjugator/shift pairs ({0})")]
    TooManyConjugates(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub tau_max_length: usize,
    pub conjugator_radius: usize,
    pub max_factors: usize,
    /// `|n_i|` bound; ignored for oracles without a shift action.
    pub shift_range: i64,
    /// Maximum number of products examined.
    pub budget: u64,
    /// Stop after this many findings.
    pub max_findings: Option<usize>,
    /// Keep one `τ` per rotation/inversion class.
    pub prune: bool,
    pub exec: Exec,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            tau_max_length: 4,
            conjugator_radius: 2,
            max_factors: 3,
            shift_range: 2,
            budget: 50_000_000,
            max_findings: None,
            prune: true,
            exec: Exec::default(),
        }
    }
}

impl SearchConfig {
    pub fn to_json(&self) -> Value {
        json!({
            "tau_max_length": self.tau_max_length,
            "conjugator_radius": self.conjugator_radius,
            "max_factors": self.max_factors,
            "shift_range": self.shift_range,
            "budget": self.budget,
            "max_findings": self.max_findings,
            "prune": self.prune,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub tau: Word,
    pub conjugators: Vec<Word>,
    pub shifts: Vec<i64>,
    pub product: Word,
}

impl Finding {
    pub fn to_json(&self, oracle: &dyn WordOracle) -> Value {
        json!({
            "tau": self.tau.to_string(),
            "conjugators": self.conjugators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "shifts": self.shifts,
            "product": self.product.to_string(),
            "display": self.display(oracle),
        })
    }

    /// `(g₁ τ g₁⁻¹)(g₂ τ g₂⁻¹)…` in the oracle's notation, empty conjugators as `ε`.
    pub fn display(&self, oracle: &dyn WordOracle) -> String {
        let g: Vec<String> = self
            .conjugators
            .iter()
            .zip(&self.shifts)
            .map(|(c, &n)| {
                let c = if c.is_empty() { "ε".to_string() } else { oracle.render(c) };
                if n == 0 {
                    c
                } else {
                    format!("{c} @{n}")
                }
            })
            .collect();
        format!("τ = {}, conjugators ({})", oracle.render(&self.tau), g.join(", "))
    }
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub oracle: String,
    pub config: SearchConfig,
    pub findings: Vec<Finding>,
    pub examined: u64,
    pub inconclusive: u64,
    pub budget_exhausted: bool,
    pub elapsed_ms: u128,
}

impl SearchReport {
    pub fn to_json(&self, oracle: &dyn WordOracle) -> Value {
        json!({
            "oracle": self.oracle,
            "config": self.config.to_json(),
            "findings": self.findings.iter().map(|f| f.to_json(oracle)).collect::<Vec<_>>(),
            "examined": self.examined,
            "inconclusive": self.inconclusive,
            "budget_exhausted": self.budget_exhausted,
            "elapsed_ms": self.elapsed_ms as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FindingCheck {
    Valid,
    Invalid(String),
}

fn factor(oracle: &dyn WordOracle, tau: &Word, g: &Word, n: i64) -> Word {
    let f = tau.conj(g);
    if n == 0 {
        f
    } else {
        oracle.shift(&f, n)
    }
}

/// Reduced product of the shifted conjugates of `tau`.
pub fn gt_product(oracle: &dyn WordOracle, tau: &Word, conjugators: &[Word], shifts: &[i64]) -> Result<Word, GtError> {
    if conjugators.len() != shifts.len() {
        return Err(GtError::LengthMismatch(conjugators.len(), shifts.len()));
    }
    if conjugators.is_empty() {
        return Err(GtError::Empty);
    }
    if !oracle.supports_shift() && shifts.iter().any(|&n| n != 0) {
        return Err(GtError::ShiftUnsupported(oracle.id()));
    }
    Ok(conjugators.iter().zip(shifts).fold(Word::empty(), |acc, (g, &n)| acc.mul(&factor(oracle, tau, g, n))))
}

pub fn check_finding(finding: &Finding, oracle: &dyn WordOracle) -> FindingCheck {
    let bad = |s: &str| FindingCheck::Invalid(s.to_string());
    if oracle.is_trivial(&finding.tau) != Verdict::NonTrivial {
        return bad("tau is not nontrivial");
    }
    match gt_product(oracle, &finding.tau, &finding.conjugators, &finding.shifts) {
        Err(e) => FindingCheck::Invalid(e.to_string()),
        Ok(p) if p != finding.product.reduce() => bad("product does not match"),
        Ok(p) if oracle.is_trivial(&p) != Verdict::Trivial => bad("product is not trivial"),
        Ok(_) => FindingCheck::Valid,
    }
}

fn letter_order(oracle: &dyn WordOracle) -> Vec<Letter> {
    oracle.generators().into_iter().flat_map(|g| [g, g.inverse()]).collect()
}

/// Reduced words of length `len`, in length-lex order over `letters`.
fn reduced_words(letters: &[Letter], len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w: Vec<Letter>| {
                letters
                    .iter()
                    .filter(|l| w.last() != Some(&l.inverse()))
                    .map(|&l| {
                        let mut v = w.clone();
                        v.push(l);
                        v
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Reduced conjugators of length at most `radius`.
pub fn conjugators(oracle: &dyn WordOracle, radius: usize) -> Vec<Word> {
    let letters = letter_order(oracle);
    (0..=radius).flat_map(|n| reduced_words(&letters, n)).map(|v| Word::new(v).expect("one alphabet")).collect()
}

/// Cyclically reduced words of length `1..=max_len`; with `prune`, only the
/// least element of each rotation/inversion class.
pub fn tau_candidates(oracle: &dyn WordOracle, max_len: usize, prune: bool) -> Vec<Word> {
    let letters = letter_order(oracle);
    let rank = |w: &Word| -> Vec<usize> {
        w.letters().iter().map(|l| letters.iter().position(|x| x == l).expect("known letter")).collect()
    };
    let mut out = Vec::new();
    for len in 1..=max_len {
        for v in reduced_words(&letters, len) {
            let w = Word::new(v).expect("one alphabet");
            if !w.is_cyclically_reduced() {
                continue;
            }
            if prune {
                let me = rank(&w);
                let inv = w.inverse();
                let smaller = (0..len).any(|k| rank(&w.rotate(k)) < me || rank(&inv.rotate(k)) < me);
                if smaller {
                    continue;
                }
            }
            out.push(w);
        }
    }
    out
}

fn shift_values(oracle: &dyn WordOracle, range: i64) -> Vec<i64> {
    if !oracle.supports_shift() {
        return vec![0];
    }
    let mut v = vec![0];
    for k in 1..=range {
        v.push(k);
        v.push(-k);
    }
    v
}

const MAX_PACKED_FACTORS: usize = 7;

/// Least rotation of the factor-id tuple, packed into 16-bit lanes.
fn product_key(ids: &[u16]) -> u128 {
    let r = ids.len();
    let pack = |k: usize| (0..r).fold(0u128, |acc, i| (acc << 16) | ids[(k + i) % r] as u128);
    (0..r).map(pack).min().expect("nonempty") | ((r as u128) << 124)
}

struct Combo {
    conj: Vec<u16>,
    shift: Vec<u16>,
}

/// All conjugator/shift tuples with `r` factors, grouped into blocks of equal
/// `(Σ|g_i|, Σ|n_i|)` in enumeration order.
fn combos(r: usize, conj_len: &[usize], shifts: &[i64]) -> Vec<Vec<Combo>> {
    let nc = conj_len.len();
    let ns = shifts.len();
    let mut all: Vec<((usize, i64), Combo)> = Vec::new();
    let mut ci = vec![0usize; r];
    loop {
        let mut si = vec![0usize; r];
        loop {
            let sc: usize = ci.iter().map(|&c| conj_len[c]).sum();
            let ss: i64 = si.iter().map(|&s| shifts[s].abs()).sum();
            all.push((
                (sc, ss),
                Combo { conj: ci.iter().map(|&c| c as u16).collect(), shift: si.iter().map(|&s| s as u16).collect() },
            ));
            if !odometer(&mut si, ns) {
                break;
            }
        }
        if !odometer(&mut ci, nc) {
            break;
        }
    }
    all.sort_by(|(ka, a), (kb, b)| ka.cmp(kb).then_with(|| a.conj.cmp(&b.conj)).then_with(|| a.shift.cmp(&b.shift)));
    let mut blocks: Vec<Vec<Combo>> = Vec::new();
    let mut last = None;
    for (k, c) in all {
        if last != Some(k) {
            blocks.push(Vec::new());
            last = Some(k);
        }
        blocks.last_mut().expect("block").push(c);
    }
    blocks
}

fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

pub fn search(oracle: &dyn WordOracle, config: &SearchConfig) -> Result<SearchReport, GtError> {
    if config.max_factors > MAX_PACKED_FACTORS {
        return Err(GtError::TooManyFactors(MAX_PACKED_FACTORS));
    }
    let start = Instant::now();
    let conjs = conjugators(oracle, config.conjugator_radius);
    let conj_len: Vec<usize> = conjs.iter().map(Word::len).collect();
    let shifts = shift_values(oracle, config.shift_range);
    if conjs.len() * shifts.len() > u16::MAX as usize {
        return Err(GtError::TooManyConjugates(conjs.len() * shifts.len()));
    }
    let taus = tau_candidates(oracle, config.tau_max_length, config.prune);
    let blocks: Vec<Vec<Vec<Combo>>> = (1..=config.max_factors).map(|r| combos(r, &conj_len, &shifts)).collect();

    let mut report = SearchReport {
        oracle: oracle.id(),
        config: config.clone(),
        findings: Vec::new(),
        examined: 0,
        inconclusive: 0,
        budget_exhausted: false,
        elapsed_ms: 0,
    };
    let tau_verdicts = config.exec.map(&taus, |t| oracle.is_trivial(t));
    let mut factor_tables: HashMap<usize, (Vec<Word>, Vec<u16>)> = HashMap::new();

    'outer: for len in 1..=config.tau_max_length {
        let live: Vec<usize> = (0..taus.len())
            .filter(|&i| taus[i].len() == len)
            .filter(|&i| match tau_verdicts[i] {
                Verdict::NonTrivial => true,
                Verdict::Inconclusive => {
                    report.inconclusive += 1;
                    false
                }
                Verdict::Trivial => false,
            })
            .collect();
        for (ri, r_blocks) in blocks.iter().enumerate() {
            let r = ri + 1;
            for block in r_blocks {
                for &ti in &live {
                    let tau = &taus[ti];
                    let (words, ids) = factor_tables.entry(ti).or_insert_with(|| {
                        let mut words: Vec<Word> = Vec::new();
                        let mut seen: HashMap<Word, u16> = HashMap::new();
                        let mut ids = Vec::with_capacity(conjs.len() * shifts.len());
                        for g in &conjs {
                            for &n in &shifts {
                                let f = factor(oracle, tau, g, n);
                                let id = *seen.entry(f.clone()).or_insert_with(|| {
                                    words.push(f);
                                    (words.len() - 1) as u16
                                });
                                ids.push(id);
                            }
                        }
                        (words, ids)
                    });
                    let remaining = config.budget - report.examined;
                    let take = (block.len() as u64).min(remaining) as usize;
                    let keys: Vec<u128> = block[..take]
                        .iter()
                        .map(|c| {
                            let f: Vec<u16> =
                                (0..r).map(|i| ids[c.conj[i] as usize * shifts.len() + c.shift[i] as usize]).collect();
                            product_key(&f)
                        })
                        .collect();
                    let mut fresh: Vec<u128> = Vec::new();
                    let mut seen = HashSet::new();
                    for &k in &keys {
                        if seen.insert(k) {
                            fresh.push(k);
                        }
                    }
                    let words = &*words;
                    let verdicts: HashMap<u128, Verdict> = fresh
                        .iter()
                        .copied()
                        .zip(config.exec.map(&fresh, |&k| {
                            let product = (0..r).rev().fold(Word::empty(), |acc, i| {
                                let id = ((k >> (16 * i)) & 0xffff) as usize;
                                acc.mul(&words[id])
                            });
                            oracle.is_trivial(&product)
                        }))
                        .collect();
                    for (c, k) in block[..take].iter().zip(&keys) {
                        report.examined += 1;
                        match verdicts[k] {
                            Verdict::NonTrivial => {}
                            Verdict::Inconclusive => report.inconclusive += 1,
                            Verdict::Trivial => {
                                let cj: Vec<Word> = c.conj.iter().map(|&i| conjs[i as usize].clone()).collect();
                                let sh: Vec<i64> = c.shift.iter().map(|&i| shifts[i as usize]).collect();
                                let product = gt_product(oracle, tau, &cj, &sh)?;
                                report.findings.push(Finding {
                                    tau: tau.clone(),
                                    conjugators: cj,
                                    shifts: sh,
                                    product,
                                });
                                if config.max_findings.is_some_and(|m| report.findings.len() >= m) {
                                    break 'outer;
                                }
                            }
                        }
                    }
                    if take < block.len() {
                        report.budget_exhausted = true;
                        break 'outer;
                    }
                }
            }
        }
    }
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}
