//! Word-problem oracles shared by the bi-order prover and the torsion search.
//!
//! | id      | group                                   | alphabet   |
//! |---------|-----------------------------------------|------------|
//! | `free`  | free group on `t, a`                    | plain      |
//! | `klein` | `⟨b, a | b a b⁻¹ a⟩` with `b` written `t` | plain      |
//! | `bs`    | `BS(1,m)` with `t = α`, `a = β`         | plain      |
//! | `gamma` | `Γ_W = ⟨t, a | r⟩`                      | plain      |
//! | `h`     | the kernel `H` of the t-exponent map     | indexed    |

use crate::bsarith::BsElement;
use crate::tower::{Tower, Verdict};
use crate::words::{w, Alphabet, Gen, Letter, TowerParams, Word};

pub trait WordOracle: Send + Sync {
    fn id(&self) -> String;

    fn alphabet(&self) -> Alphabet;

    /// Positive generators, in enumeration order.
    fn generators(&self) -> Vec<Letter>;

    fn is_trivial(&self, w: &Word) -> Verdict;

    /// The defining relator of the two-generator presentation, if there is one.
    fn relator(&self) -> Option<Word> {
        None
    }

    /// Whether [`WordOracle::shift`] is meaningful.
    fn supports_shift(&self) -> bool {
        false
    }

    /// The action of `t^k`.
    fn shift(&self, w: &Word, k: i64) -> Word {
        assert!(k == 0, "oracle {} has no shift action", self.id());
        w.clone()
    }

    fn render(&self, w: &Word) -> String {
        w.to_string()
    }
}

fn verdict(trivial: bool) -> Verdict {
    if trivial {
        Verdict::Trivial
    } else {
        Verdict::NonTrivial
    }
}

fn plain_generators() -> Vec<Letter> {
    vec![Letter::T, Letter::A]
}

fn t_conj(w: &Word, k: i64) -> Word {
    w.conj(&Word::t().pow(k))
}

#[derive(Debug, Clone, Default)]
pub struct FreeOracle;

impl WordOracle for FreeOracle {
    fn id(&self) -> String {
        "free".into()
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Plain
    }

    fn generators(&self) -> Vec<Letter> {
        plain_generators()
    }

    fn is_trivial(&self, w: &Word) -> Verdict {
        verdict(w.reduce().is_empty())
    }
}

/// Fundamental group of the Klein bottle; elements `b^q a^p` with
/// `(q₁, p₁)(q₂, p₂) = (q₁ + q₂, (-1)^q₂ p₁ + p₂)`.
#[derive(Debug, Clone, Default)]
pub struct KleinOracle;

impl KleinOracle {
    pub fn normal_form(w: &Word) -> (i64, i64) {
        w.letters().iter().fold((0, 0), |(q, p), l| match l.gen {
            Gen::T => (q + l.sign(), -p),
            _ => (q, p + l.sign()),
        })
    }
}

impl WordOracle for KleinOracle {
    fn id(&self) -> String {
        "klein".into()
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Plain
    }

    fn generators(&self) -> Vec<Letter> {
        plain_generators()
    }

    fn is_trivial(&self, w: &Word) -> Verdict {
        verdict(KleinOracle::normal_form(w) == (0, 0))
    }

    fn relator(&self) -> Option<Word> {
        Some(w("t a t^-1 a"))
    }

    fn render(&self, w: &Word) -> String {
        w.to_string().replace('t', "b")
    }
}

#[derive(Debug, Clone)]
pub struct BsOracle {
    pub m: u32,
}

impl WordOracle for BsOracle {
    fn id(&self) -> String {
        format!("bs{}", self.m)
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Plain
    }

    fn generators(&self) -> Vec<Letter> {
        plain_generators()
    }

    fn is_trivial(&self, w: &Word) -> Verdict {
        verdict(BsElement::normal_form(w, self.m).is_identity())
    }

    fn relator(&self) -> Option<Word> {
        Some(Word::t().concat(&Word::a()).concat(&w("t^-1")).concat(&Word::a().pow(-(self.m as i64))))
    }

    fn supports_shift(&self) -> bool {
        true
    }

    fn shift(&self, w: &Word, k: i64) -> Word {
        t_conj(w, k)
    }
}

/// `Γ_W` over `{t, a}`; the shift is conjugation by `t^k`.
#[derive(Debug, Clone)]
pub struct GammaOracle {
    pub tower: Tower,
}

impl GammaOracle {
    pub fn new(params: TowerParams) -> Self {
        GammaOracle { tower: Tower::new(params).expect("canonical params") }
    }
}

impl WordOracle for GammaOracle {
    fn id(&self) -> String {
        format!("gamma[{}]", self.tower.params())
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Plain
    }

    fn generators(&self) -> Vec<Letter> {
        plain_generators()
    }

    fn is_trivial(&self, w: &Word) -> Verdict {
        match self.tower.is_trivial_in_gamma(w) {
            Ok(d) => d.verdict,
            Err(_) => Verdict::Inconclusive,
        }
    }

    fn relator(&self) -> Option<Word> {
        Some(self.tower.params().gamma_relator())
    }

    fn supports_shift(&self) -> bool {
        true
    }

    fn shift(&self, w: &Word, k: i64) -> Word {
        t_conj(w, k)
    }
}

/// The kernel `H` over `a[0..=width]`; the shift translates indices.
#[derive(Debug, Clone)]
pub struct HOracle {
    pub tower: Tower,
    pub width: i64,
}

impl HOracle {
    pub fn new(params: TowerParams, width: i64) -> Self {
        HOracle { tower: Tower::new(params).expect("canonical params"), width }
    }
}

impl WordOracle for HOracle {
    fn id(&self) -> String {
        format!("h[{}]", self.tower.params())
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Indexed
    }

    fn generators(&self) -> Vec<Letter> {
        (0..=self.width).map(Letter::idx).collect()
    }

    fn is_trivial(&self, w: &Word) -> Verdict {
        self.tower.decide(w).unwrap_or(Verdict::Inconclusive)
    }

    fn supports_shift(&self) -> bool {
        true
    }

    fn shift(&self, w: &Word, k: i64) -> Word {
        w.shift(k)
    }
}

/// Oracle names accepted by [`oracle_by_name`].
pub const ORACLE_NAMES: &[&str] = &["free", "klein", "bs", "gamma", "h"];

/// Looks up an oracle by name. `params` is used by `gamma` and `h`, `m` by `bs`.
pub fn oracle_by_name(name: &str, params: &TowerParams, m: u32) -> Option<Box<dyn WordOracle>> {
    Some(match name {
        "free" => Box::new(FreeOracle),
        "klein" => Box::new(KleinOracle),
        "bs" => Box::new(BsOracle { m }),
        "gamma" => Box::new(GammaOracle::new(params.clone())),
        "h" => Box::new(HOracle::new(params.clone(), params.s() as i64 + 1)),
        _ => return None,
    })
}
