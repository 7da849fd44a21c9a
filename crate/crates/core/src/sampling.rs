//! Seeded random sampling for the word-problem property runs.
//!
//! Every run is driven by a `ChaCha8Rng` seeded from a `u64`, so reports are
//! reproducible byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::tower::{Membership, Tower, Verdict};
use crate::words::{Letter, TowerParams, Word};

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A freely reduced word of at most `len` letters over `a[lo..=hi]`.
pub fn random_word<R: Rng>(rng: &mut R, len: usize, lo: i64, hi: i64) -> Word {
    let letters = (0..len)
        .map(|_| {
            let l = Letter::idx(rng.gen_range(lo..=hi));
            if rng.gen_bool(0.5) {
                l
            } else {
                l.inverse()
            }
        })
        .collect();
    Word::new(letters).expect("indexed").reduce()
}

/// Canonical parameters with `s ≤ max_s`, `2 ≤ m ≤ max_m` and `|W| ≤ max_w`.
pub fn random_params<R: Rng>(rng: &mut R, max_s: usize, max_m: u32, max_w: usize) -> TowerParams {
    let s = rng.gen_range(1..=max_s);
    let m = rng.gen_range(2..=max_m);
    let len = rng.gen_range(1..=max_w.max(1));
    let letters = (0..len).map(|_| Letter::idx(rng.gen_range(0..s as i64))).collect();
    TowerParams::new(s, m, Word::new(letters).expect("indexed")).expect("positive word")
}

/// A product of at most `max_factors` conjugates of shifted relators `R_j^{±1}`,
/// all inside the window `[0, window]`.
pub fn closure_product<R: Rng>(rng: &mut R, tower: &Tower, max_factors: usize, window: i64, conj_len: usize) -> Word {
    let r0 = tower.params().relator(0);
    let (_, span) = r0.index_range().expect("nonempty relator");
    assert!(span <= window, "relator does not fit the window");
    let k = rng.gen_range(1..=max_factors);
    let mut out = Word::empty();
    for _ in 0..k {
        let j = rng.gen_range(0..=window - span);
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        let len = rng.gen_range(0..=conj_len);
        let u = random_word(rng, len, 0, window);
        out = out.mul(&tower.params().relator(j).pow(e).conj(&u));
    }
    out
}

/// A word for the soundness run: uniform, a commutator, or a relator conjugate.
pub fn soundness_word<R: Rng>(rng: &mut R, tower: &Tower, max_len: usize, window: i64) -> Word {
    match rng.gen_range(0..3) {
        0 => {
            let len = rng.gen_range(1..=max_len);
            random_word(rng, len, 0, window)
        }
        1 => {
            let half = max_len / 4;
            let len = rng.gen_range(1..=half);
            let u = random_word(rng, len, 0, window);
            let len = rng.gen_range(1..=half);
            let v = random_word(rng, len, 0, window);
            u.mul(&v).mul(&u.inverse()).mul(&v.inverse())
        }
        _ => {
            let r_len = tower.params().relator(0).len();
            let conj = max_len.saturating_sub(r_len) / 2;
            let w = closure_product(rng, tower, 1, window, conj);
            if w.len() <= max_len {
                w
            } else {
                random_word(rng, max_len, 0, window)
            }
        }
    }
}

/// Inserts `u u^-1` at a random position, without reducing.
pub fn free_insertion<R: Rng>(rng: &mut R, w: &Word, u: &Word) -> Word {
    let pos = rng.gen_range(0..=w.len());
    let mut letters = w.letters()[..pos].to_vec();
    letters.extend_from_slice(u.letters());
    letters.extend_from_slice(u.inverse().letters());
    letters.extend_from_slice(&w.letters()[pos..]);
    Word::new(letters).expect("indexed")
}

/// Outcome of one sampled property run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleReport {
    pub property: String,
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    pub inconclusive: usize,
    pub failures: Vec<String>,
}

impl SampleReport {
    fn new(property: &str, seed: u64, count: usize) -> Self {
        SampleReport { property: property.into(), seed, count, passed: 0, inconclusive: 0, failures: vec![] }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.inconclusive == 0 && self.passed == self.count
    }

    pub fn to_json(&self) -> Value {
        json!({
            "property": self.property,
            "seed": self.seed,
            "count": self.count,
            "passed": self.passed,
            "failed": self.failures.len(),
            "inconclusive": self.inconclusive,
            "failures": self.failures,
        })
    }
}

/// Products of relator conjugates must all be trivial.
pub fn run_closure(tower: &Tower, count: usize, seed: u64) -> SampleReport {
    let mut rng = rng(seed);
    let mut rep = SampleReport::new("closure", seed, count);
    for _ in 0..count {
        let w = closure_product(&mut rng, tower, 8, 6, 10);
        match tower.decide(&w) {
            Ok(Verdict::Trivial) => rep.passed += 1,
            Ok(Verdict::Inconclusive) => rep.inconclusive += 1,
            Ok(v) => rep.failures.push(format!("{w}: {v}")),
            Err(e) => rep.failures.push(format!("{w}: {e}")),
        }
    }
    rep
}

/// Trivial verdicts have zero abelian image, and verdicts survive conjugation,
/// free insertion and shifts.
pub fn run_soundness(tower: &Tower, count: usize, seed: u64) -> SampleReport {
    let mut rng = rng(seed);
    let mut rep = SampleReport::new("soundness", seed, count);
    for _ in 0..count {
        let w = soundness_word(&mut rng, tower, 30, 5);
        let len = rng.gen_range(1..=5);
        let u = random_word(&mut rng, len, 0, 5);
        let k = rng.gen_range(-3..=3);
        let ins = free_insertion(&mut rng, &w, &u);
        let decide = |x: &Word| tower.decide(x).unwrap_or(Verdict::Inconclusive);
        let v = decide(&w);
        if v == Verdict::Inconclusive {
            rep.inconclusive += 1;
            continue;
        }
        let mut bad = Vec::new();
        if v == Verdict::Trivial && !tower.abelian_image(&w).is_zero() {
            bad.push("trivial with nonzero abelian image".to_string());
        }
        for (what, x) in [("conjugation", w.conj(&u)), ("insertion", ins), ("shift", w.shift(k))] {
            let vx = decide(&x);
            if vx != v {
                bad.push(format!("{what}: {vx}"));
            }
        }
        if bad.is_empty() {
            rep.passed += 1;
        } else {
            rep.failures.push(format!("{w} ({v}): {}", bad.join(", ")));
        }
    }
    rep
}

/// `c^p Y c^q Y` is nontrivial whenever `Y ∉ ⟨c⟩`, with `c = a[n-1]`.
pub fn run_sandwich(tower: &Tower, count: usize, seed: u64) -> SampleReport {
    let mut rng = rng(seed);
    let mut rep = SampleReport::new("sandwich", seed, count);
    let mut done = 0;
    while done < count {
        let n = rng.gen_range(3..=5usize);
        let len = rng.gen_range(1..=8);
        let y = random_word(&mut rng, len, 0, n as i64 - 1);
        if y.is_empty() || tower.membership_in_c(&y, n) != Ok(Membership::NotIn) {
            continue;
        }
        done += 1;
        let p = rng.gen_range(-3..=3);
        let q = rng.gen_range(-3..=3);
        let c = Word::idx_pow(n as i64 - 1, 1);
        let x = c.pow(p).mul(&y).mul(&c.pow(q)).mul(&y);
        match tower.is_trivial(&x, n).map(|d| d.verdict) {
            Ok(Verdict::NonTrivial) => rep.passed += 1,
            Ok(Verdict::Inconclusive) => rep.inconclusive += 1,
            Ok(v) => rep.failures.push(format!("Y = {y}, p = {p}, q = {q}, n = {n}: {v}")),
            Err(e) => rep.failures.push(format!("Y = {y}: {e}")),
        }
    }
    rep
}
