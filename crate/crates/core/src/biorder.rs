//! Positive-cone prover for non-bi-orderability of `⟨t, a | r⟩`.
//!
//! Facts are statements `g ∈ P`; `u < v` is written `u⁻¹v ∈ P`. The prover
//! splits on the trichotomy `g ∈ P`, `g⁻¹ ∈ P`, `g = 1` along a split sequence
//! and tries to close every branch with a derivation of `1 ∈ P`.
//!
//! Rules (all words freely reduced):
//!
//! | id   | from               | derive                     |
//! |------|--------------------|----------------------------|
//! | hyp  | branch hypothesis  | `g`                        |
//! | R1   | `u`, `v`           | `uv`                       |
//! | R2   | `u`                | `h · shift(u, k) · h⁻¹`    |
//! | R3   | `u`                | `u · ρ`, `ρ` a conjugate of `r^±1` |
//! | R4   | `u⁻¹v`, `v⁻¹w`     | `u⁻¹w` (the product)       |
//! | R5   | `u`                | `u^n`, `n ≥ 1`             |
//! | WP   | `u`                | `u'` with `u = u'` by the oracle |
//!
//! The shift `k` of R2 only occurs for indexed words; over `{t, a}` it is
//! part of `h`. Internally everything runs on the Magnus rewriting over
//! `a[n]`, and certificates are translated back to `{t, a}`.
//!
//! Closing a branch: saturate sign facts `a[k]^±1 ∈ P` and order facts
//! `a[i] < a[j]` over the relator's index window, then look for a monotone
//! edit chain between the two sides `L`, `R` of a cut of a relator rotation
//! (`L = R` in the group). Each edit is a single-letter substitution
//! `x → y` with `x < y`, deletion of a negative letter, insertion of a
//! positive one, or deletion/insertion of a two-letter block `x y⁻¹` or `y⁻¹ x`.
//! A chain from `L` to `R` gives `L⁻¹R ∈ P`, and R3 turns it into `1 ∈ P`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::oracle::WordOracle;
use crate::par::Exec;
use crate::tower::Verdict;
use crate::words::{Alphabet, Gen, Letter, TowerParams, Word};

pub const DEFAULT_BUDGET: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Hyp,
    Mul,
    Conj,
    Relator,
    Trans,
    Pow,
    Wp,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::Hyp => "hyp",
            Rule::Mul => "R1",
            Rule::Conj => "R2",
            Rule::Relator => "R3",
            Rule::Trans => "R4",
            Rule::Pow => "R5",
            Rule::Wp => "WP",
        }
    }

    pub fn from_id(s: &str) -> Option<Rule> {
        Some(match s {
            "hyp" => Rule::Hyp,
            "R1" => Rule::Mul,
            "R2" => Rule::Conj,
            "R3" => Rule::Relator,
            "R4" => Rule::Trans,
            "R5" => Rule::Pow,
            "WP" => Rule::Wp,
            _ => return None,
        })
    }
}

/// One derivation step. `inputs` index earlier steps of the same derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub inputs: Vec<usize>,
    pub output: Word,
    /// R2 conjugator.
    pub conj: Option<Word>,
    /// R2 index shift (indexed words only).
    pub shift: i64,
    /// R3 relator conjugate.
    pub relator: Option<Word>,
    /// R5 exponent.
    pub power: Option<u32>,
}

impl Step {
    fn new(rule: Rule, inputs: Vec<usize>, output: Word) -> Self {
        Step { rule, inputs, output, conj: None, shift: 0, relator: None, power: None }
    }

    pub fn hyp(output: Word) -> Self {
        Step::new(Rule::Hyp, vec![], output)
    }

    pub fn mul(i: usize, j: usize, output: Word) -> Self {
        Step::new(Rule::Mul, vec![i, j], output)
    }

    pub fn trans(i: usize, j: usize, output: Word) -> Self {
        Step::new(Rule::Trans, vec![i, j], output)
    }

    pub fn conj(i: usize, h: Word, shift: i64, output: Word) -> Self {
        Step { conj: Some(h), shift, ..Step::new(Rule::Conj, vec![i], output) }
    }

    pub fn relator(i: usize, rho: Word, output: Word) -> Self {
        Step { relator: Some(rho), ..Step::new(Rule::Relator, vec![i], output) }
    }

    pub fn pow(i: usize, n: u32, output: Word) -> Self {
        Step { power: Some(n), ..Step::new(Rule::Pow, vec![i], output) }
    }

    pub fn wp(i: usize, output: Word) -> Self {
        Step::new(Rule::Wp, vec![i], output)
    }

    /// The output the rule prescribes for the given input words, for the
    /// purely syntactic rules (R1, R2, R4, R5, and R3 minus the relator check).
    pub fn expected_output(&self, inputs: &[&Word]) -> Option<Word> {
        match (self.rule, inputs) {
            (Rule::Mul | Rule::Trans, [u, v]) => Some(u.mul(v)),
            (Rule::Conj, [u]) => Some(u.shift(self.shift).conj(self.conj.as_ref()?)),
            (Rule::Relator, [u]) => Some(u.mul(self.relator.as_ref()?)),
            (Rule::Pow, [u]) => match self.power? {
                0 => None,
                n => Some(u.pow(n as i64)),
            },
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "rule": self.rule.id(),
            "inputs": self.inputs,
            "output": self.output.to_string(),
        });
        if let Some(h) = &self.conj {
            v["conj"] = json!(h.to_string());
        }
        if self.shift != 0 {
            v["shift"] = json!(self.shift);
        }
        if let Some(r) = &self.relator {
            v["relator"] = json!(r.to_string());
        }
        if let Some(n) = self.power {
            v["power"] = json!(n);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Step, CertError> {
        let bad = |what: &str| CertError::Malformed(format!("step {what}"));
        let word = |key: &str| -> Result<Option<Word>, CertError> {
            match v.get(key) {
                None => Ok(None),
                Some(s) => s.as_str().ok_or_else(|| bad(key))?.parse().map(Some).map_err(|_| bad(key)),
            }
        };
        let rule = v["rule"].as_str().and_then(Rule::from_id).ok_or_else(|| bad("rule"))?;
        let inputs = v["inputs"]
            .as_array()
            .ok_or_else(|| bad("inputs"))?
            .iter()
            .map(|i| i.as_u64().map(|i| i as usize).ok_or_else(|| bad("inputs")))
            .collect::<Result<_, _>>()?;
        Ok(Step {
            rule,
            inputs,
            output: word("output")?.ok_or_else(|| bad("output"))?,
            conj: word("conj")?,
            shift: v.get("shift").map_or(Some(0), Value::as_i64).ok_or_else(|| bad("shift"))?,
            relator: word("relator")?,
            power: match v.get("power") {
                None => None,
                Some(n) => Some(n.as_u64().ok_or_else(|| bad("power"))? as u32),
            },
        })
    }
}

/// A split of the trichotomy on `word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitItem {
    pub label: String,
    pub word: Word,
}

impl SplitItem {
    /// `"g"` splits on `g`; `"x vs y"` splits on `x⁻¹y`, so the `pos` case is `x < y`.
    pub fn parse(s: &str) -> Result<SplitItem, CertError> {
        let bad = || CertError::Malformed(format!("split item {s:?}"));
        let word = match s.split_once(" vs ") {
            Some((x, y)) => {
                let x: Word = x.parse().map_err(|_| bad())?;
                let y: Word = y.parse().map_err(|_| bad())?;
                x.inverse().mul(&y)
            }
            None => s.parse::<Word>().map_err(|_| bad())?.reduce(),
        };
        if word.is_empty() {
            return Err(bad());
        }
        Ok(SplitItem { label: s.trim().to_string(), word })
    }

    /// `a`, then `a` against its conjugate `t a t⁻¹`.
    pub fn default_sequence() -> Vec<SplitItem> {
        ["a", "a vs t a t^-1"].iter().map(|s| SplitItem::parse(s).expect("valid")).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ProverConfig {
    pub splits: Vec<SplitItem>,
    /// Maximum number of facts per branch.
    pub budget: usize,
    pub exec: Exec,
    /// Enables the `bDcb^-1` naming of chains and the natural-cut preference.
    pub params: Option<TowerParams>,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            splits: SplitItem::default_sequence(),
            budget: DEFAULT_BUDGET,
            exec: Exec::default(),
            params: None,
        }
    }
}

impl ProverConfig {
    pub fn for_params(params: TowerParams) -> Self {
        ProverConfig { params: Some(params), ..ProverConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertNode {
    Split {
        item: SplitItem,
        pos: Box<CertNode>,
        neg: Box<CertNode>,
        eq: Box<CertNode>,
    },
    /// `g = 1` is impossible because the oracle says `g ≠ 1`.
    OracleNonTrivial {
        element: Word,
    },
    Leaf {
        derivation: Vec<Step>,
        chain: Option<String>,
    },
}

impl CertNode {
    pub fn to_json(&self) -> Value {
        match self {
            CertNode::Split { item, pos, neg, eq } => json!({
                "split": item.word.to_string(),
                "label": item.label,
                "cases": { "pos": pos.to_json(), "neg": neg.to_json(), "eq": eq.to_json() },
            }),
            CertNode::OracleNonTrivial { element } => {
                json!({ "oracle": "nontrivial", "element": element.to_string() })
            }
            CertNode::Leaf { derivation, chain } => {
                let mut v = json!({ "derivation": derivation.iter().map(Step::to_json).collect::<Vec<_>>() });
                if let Some(c) = chain {
                    v["chain"] = json!(c);
                }
                v
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<CertNode, CertError> {
        let bad = |what: &str| CertError::Malformed(what.to_string());
        let word = |v: &Value, what: &str| -> Result<Word, CertError> {
            v.as_str().ok_or_else(|| bad(what))?.parse().map_err(|_| bad(what))
        };
        if let Some(split) = v.get("split") {
            let word = word(split, "split")?;
            let label = v.get("label").and_then(Value::as_str).map_or_else(|| word.to_string(), String::from);
            let cases = v.get("cases").ok_or_else(|| bad("cases"))?;
            let case = |k: &str| -> Result<Box<CertNode>, CertError> {
                Ok(Box::new(CertNode::from_json(cases.get(k).ok_or_else(|| bad(k))?)?))
            };
            Ok(CertNode::Split {
                item: SplitItem { label, word },
                pos: case("pos")?,
                neg: case("neg")?,
                eq: case("eq")?,
            })
        } else if v.get("oracle").is_some() {
            if v["oracle"] != "nontrivial" {
                return Err(bad("oracle"));
            }
            Ok(CertNode::OracleNonTrivial { element: word(&v["element"], "element")? })
        } else if let Some(d) = v.get("derivation") {
            let derivation =
                d.as_array().ok_or_else(|| bad("derivation"))?.iter().map(Step::from_json).collect::<Result<_, _>>()?;
            let chain = v.get("chain").and_then(Value::as_str).map(String::from);
            Ok(CertNode::Leaf { derivation, chain })
        } else {
            Err(bad("node"))
        }
    }

    /// Chains displayed at the leaves, in tree order.
    pub fn chains(&self) -> Vec<String> {
        match self {
            CertNode::Split { pos, neg, eq, .. } => [pos, neg, eq].iter().flat_map(|n| n.chains()).collect(),
            CertNode::OracleNonTrivial { .. } => vec![],
            CertNode::Leaf { chain, .. } => chain.iter().cloned().collect(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            CertNode::Split { pos, neg, eq, .. } => 1 + pos.depth().max(neg.depth()).max(eq.depth()),
            _ => 0,
        }
    }

    fn render(&self, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match self {
            CertNode::Split { item, pos, neg, eq } => {
                writeln!(f, "{pad}split {} ({})", item.label, item.word)?;
                for (name, node) in [("pos", pos), ("neg", neg), ("eq", eq)] {
                    writeln!(f, "{pad}  {name}:")?;
                    node.render(indent + 2, f)?;
                }
                Ok(())
            }
            CertNode::OracleNonTrivial { element } => writeln!(f, "{pad}{element} != 1 (oracle)"),
            CertNode::Leaf { derivation, chain } => {
                match chain {
                    Some(c) => writeln!(f, "{pad}contradiction: {c}")?,
                    None => writeln!(f, "{pad}contradiction")?,
                }
                writeln!(f, "{pad}({} steps)", derivation.len())
            }
        }
    }
}

impl fmt::Display for CertNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofOutcome {
    Certificate(CertNode),
    /// Labels of the branches left open.
    Inconclusive {
        open: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Saturation {
    Contradiction(Vec<Step>),
    Stable(Vec<Word>),
    BudgetExhausted,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("invalid step {step} at {path}: {reason}")]
    InvalidStep { path: String, step: usize, reason: String },
    #[error("invalid node at {path}: {reason}")]
    InvalidNode { path: String, reason: String },
}

// ---------------------------------------------------------------------------
// Fact store over the indexed alphabet.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Key {
    /// `a[k]^-1 ∈ P` when the flag is set, `a[k] ∈ P` otherwise.
    Sign(i64, bool),
    /// `a[i]^-1 a[j] ∈ P`, i.e. `a[i] < a[j]`.
    Lt(i64, i64),
}

impl Key {
    fn word(self) -> Word {
        match self {
            Key::Sign(k, inv) => Word::letter(Letter { gen: Gen::Idx(k), inv }),
            Key::Lt(i, j) => Word::letter(Letter::neg(Gen::Idx(i))).concat(&Word::letter(Letter::idx(j))),
        }
    }

    fn classify(w: &Word) -> Option<Key> {
        match w.letters() {
            [l] => Some(Key::Sign(l.index()?, l.inv)),
            [x, y] if x.inv && !y.inv => Some(Key::Lt(x.index()?, y.index()?)),
            _ => None,
        }
    }

    fn shift(self, k: i64) -> Key {
        match self {
            Key::Sign(i, inv) => Key::Sign(i + k, inv),
            Key::Lt(i, j) => Key::Lt(i + k, j + k),
        }
    }

    fn range(self) -> (i64, i64) {
        match self {
            Key::Sign(i, _) => (i, i),
            Key::Lt(i, j) => (i.min(j), i.max(j)),
        }
    }
}

struct Store {
    steps: Vec<Step>,
    facts: BTreeMap<Key, usize>,
    lo: i64,
    hi: i64,
    budget: usize,
}

enum Closed {
    Yes(usize),
    No,
    Budget,
}

impl Store {
    fn new(lo: i64, hi: i64, budget: usize) -> Self {
        Store { steps: Vec::new(), facts: BTreeMap::new(), lo, hi, budget }
    }

    fn push(&mut self, step: Step) -> usize {
        self.steps.push(step);
        self.steps.len() - 1
    }

    /// Records a derived word; returns the step id if it closes the branch.
    fn derive(&mut self, step: Step) -> Result<Option<usize>, ()> {
        let out = step.output.clone();
        let id = self.push(step);
        if out.is_empty() {
            return Ok(Some(id));
        }
        if let Some(k) = Key::classify(&out) {
            if !self.facts.contains_key(&k) {
                if self.facts.len() >= self.budget {
                    return Err(());
                }
                self.facts.insert(k, id);
            }
        }
        Ok(None)
    }

    fn saturate(&mut self) -> Closed {
        loop {
            let before = self.facts.len();
            let facts: Vec<(Key, usize)> = self.facts.iter().map(|(k, v)| (*k, *v)).collect();
            for &(k, id) in &facts {
                let (a, b) = k.range();
                for d in (self.lo - a)..=(self.hi - b) {
                    let s = k.shift(d);
                    if d == 0 || self.facts.contains_key(&s) {
                        continue;
                    }
                    let out = s.word();
                    match self.derive(Step::conj(id, Word::empty(), d, out)) {
                        Ok(_) => {}
                        Err(()) => return Closed::Budget,
                    }
                }
            }
            let facts: Vec<(Key, usize)> = self.facts.iter().map(|(k, v)| (*k, *v)).collect();
            for &(k1, s1) in &facts {
                for &(k2, s2) in &facts {
                    let step = match (k1, k2) {
                        (Key::Lt(_, j), Key::Lt(j2, _)) if j == j2 => Step::trans(s1, s2, Word::empty()),
                        (Key::Sign(i, false), Key::Lt(i2, _)) if i == i2 => Step::mul(s1, s2, Word::empty()),
                        (Key::Lt(_, j), Key::Sign(j2, true)) if j == j2 => Step::mul(s1, s2, Word::empty()),
                        (Key::Sign(_, true), Key::Sign(_, false)) => Step::mul(s1, s2, Word::empty()),
                        _ => continue,
                    };
                    let out = k1.word().mul(&k2.word());
                    if Key::classify(&out).is_some_and(|k| self.facts.contains_key(&k)) {
                        continue;
                    }
                    let step = Step { output: out, ..step };
                    match self.derive(step) {
                        Ok(Some(id)) => return Closed::Yes(id),
                        Ok(None) => {}
                        Err(()) => return Closed::Budget,
                    }
                }
            }
            if self.facts.len() == before {
                return Closed::No;
            }
        }
    }

    /// Step id proving `H · kw · H⁻¹`, reusing the fact itself when `H` is empty.
    fn conjugated(&mut self, key: Key, h: Word) -> usize {
        let id = self.facts[&key];
        if h.is_empty() {
            return id;
        }
        let out = key.word().conj(&h);
        self.push(Step::conj(id, h, 0, out))
    }

    /// Dependencies of `root`, renumbered in derivation order.
    fn extract(&self, root: usize) -> Vec<Step> {
        let mut need = vec![false; self.steps.len()];
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if !need[i] {
                need[i] = true;
                stack.extend(&self.steps[i].inputs);
            }
        }
        let mut map = HashMap::new();
        let mut out = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            if need[i] {
                map.insert(i, out.len());
                let mut s = s.clone();
                s.inputs = s.inputs.iter().map(|j| map[j]).collect();
                out.push(s);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Edit chains.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Match,
    Del,
    Sub,
    Ins,
}

/// One aligned column: `from` in the source word becomes `to`.
#[derive(Debug, Clone)]
struct Column {
    kind: Kind,
    from: Vec<Letter>,
    to: Vec<Letter>,
    /// Fact justifying the edit (none for matches).
    key: Option<Key>,
}

#[derive(Debug, Clone)]
struct Alignment {
    columns: Vec<Column>,
    phases: usize,
    subs: usize,
    matches: usize,
}

impl Alignment {
    fn rank(&self) -> (usize, usize, usize) {
        (self.phases, self.subs, self.matches)
    }
}

fn idx(l: &Letter) -> i64 {
    l.index().expect("indexed letter")
}

/// Fact making a two-letter block positive (`x y⁻¹` or `y⁻¹ x` with `y < x`).
fn block_key(p: &[Letter]) -> Option<Key> {
    match p {
        [u, v] if !u.inv && v.inv && u.gen != v.gen => Some(Key::Lt(idx(v), idx(u))),
        [u, v] if u.inv && !v.inv && u.gen != v.gen => Some(Key::Lt(idx(u), idx(v))),
        _ => None,
    }
}

fn flip(k: Key) -> Key {
    match k {
        Key::Lt(i, j) => Key::Lt(j, i),
        s => s,
    }
}

/// Cheapest alignment of `x` into `y` (lexicographic in substitutions, then
/// matches) using only edit kinds enabled in `mask` (bit 0 deletions, bit 1
/// substitutions, bit 2 insertions).
fn align(x: &[Letter], y: &[Letter], facts: &BTreeMap<Key, usize>, mask: u8) -> Option<Alignment> {
    let (p, q) = (x.len(), y.len());
    let has = |k: Key| facts.contains_key(&k);
    let inf = (usize::MAX, usize::MAX);
    let mut cost = vec![vec![inf; q + 1]; p + 1];
    let mut back: Vec<Vec<Option<(usize, usize, Column)>>> = vec![vec![None; q + 1]; p + 1];
    cost[0][0] = (0, 0);
    for i in 0..=p {
        for j in 0..=q {
            let c = cost[i][j];
            if c == inf {
                continue;
            }
            let mut relax = |ni: usize, nj: usize, col: Column, cost: &mut Vec<Vec<(usize, usize)>>| {
                let nc = match col.kind {
                    Kind::Match => (c.0, c.1 + 1),
                    Kind::Sub => (c.0 + 1, c.1),
                    _ => c,
                };
                if nc < cost[ni][nj] {
                    cost[ni][nj] = nc;
                    back[ni][nj] = Some((i, j, col));
                }
            };
            if i < p && j < q && x[i] == y[j] {
                relax(
                    i + 1,
                    j + 1,
                    Column { kind: Kind::Match, from: vec![x[i]], to: vec![y[j]], key: None },
                    &mut cost,
                );
            }
            if mask & 2 != 0 && i < p && j < q && x[i].inv == y[j].inv && x[i].gen != y[j].gen {
                let k = if x[i].inv { Key::Lt(idx(&y[j]), idx(&x[i])) } else { Key::Lt(idx(&x[i]), idx(&y[j])) };
                if has(k) {
                    relax(
                        i + 1,
                        j + 1,
                        Column { kind: Kind::Sub, from: vec![x[i]], to: vec![y[j]], key: Some(k) },
                        &mut cost,
                    );
                }
            }
            if mask & 1 != 0 && i < p {
                let k = Key::Sign(idx(&x[i]), !x[i].inv);
                if has(k) {
                    relax(i + 1, j, Column { kind: Kind::Del, from: vec![x[i]], to: vec![], key: Some(k) }, &mut cost);
                }
                if i + 1 < p {
                    if let Some(k) = block_key(&x[i..i + 2]).map(flip) {
                        if has(k) {
                            relax(
                                i + 2,
                                j,
                                Column { kind: Kind::Del, from: x[i..i + 2].to_vec(), to: vec![], key: Some(k) },
                                &mut cost,
                            );
                        }
                    }
                }
            }
            if mask & 4 != 0 && j < q {
                let k = Key::Sign(idx(&y[j]), y[j].inv);
                if has(k) {
                    relax(i, j + 1, Column { kind: Kind::Ins, from: vec![], to: vec![y[j]], key: Some(k) }, &mut cost);
                }
                if j + 1 < q {
                    if let Some(k) = block_key(&y[j..j + 2]) {
                        if has(k) {
                            relax(
                                i,
                                j + 2,
                                Column { kind: Kind::Ins, from: vec![], to: y[j..j + 2].to_vec(), key: Some(k) },
                                &mut cost,
                            );
                        }
                    }
                }
            }
        }
    }
    if cost[p][q] == inf {
        return None;
    }
    let mut columns = Vec::new();
    let (mut i, mut j) = (p, q);
    while (i, j) != (0, 0) {
        let (pi, pj, col) = back[i][j].clone().expect("path");
        columns.push(col);
        i = pi;
        j = pj;
    }
    columns.reverse();
    let used = |k: Kind| columns.iter().any(|c| c.kind == k);
    let phases = [Kind::Del, Kind::Sub, Kind::Ins].iter().filter(|&&k| used(k)).count();
    Some(Alignment { columns, phases, subs: cost[p][q].0, matches: cost[p][q].1 })
}

fn best_alignment(x: &[Letter], y: &[Letter], facts: &BTreeMap<Key, usize>) -> Option<Alignment> {
    let mut masks: Vec<u8> = (1..8).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut best: Option<Alignment> = None;
    for m in masks {
        if best.as_ref().is_some_and(|b| b.phases < m.count_ones() as usize) {
            break;
        }
        if let Some(a) = align(x, y, facts, m) {
            if best.as_ref().is_none_or(|b| a.rank() < b.rank()) {
                best = Some(a);
            }
        }
    }
    best
}

struct Candidate {
    x: Word,
    alignment: Alignment,
}

/// Searches rotations and cuts of `rel` for a chain; the natural cut
/// (rotation 0, left side of length `natural`) is preferred.
/// `(not natural, cost, rotation, cut, direction)`; smaller is better.
type ChainRank = (bool, (usize, usize, usize), usize, usize, usize);

fn find_chain(rel: &Word, facts: &BTreeMap<Key, usize>, natural: Option<usize>) -> Option<Candidate> {
    let n = rel.len();
    let mut best: Option<(ChainRank, Candidate)> = None;
    for rot in 0..n {
        let r = rel.rotate(rot);
        for cut in 1..n {
            let l = Word::new(r.letters()[..cut].to_vec()).expect("same alphabet");
            let rr = Word::new(r.letters()[cut..].to_vec()).expect("same alphabet").inverse();
            for (dir, (x, y)) in [(&l, &rr), (&rr, &l)].into_iter().enumerate() {
                let Some(a) = best_alignment(x.letters(), y.letters(), facts) else { continue };
                let key = (natural != Some(cut) || rot != 0, a.rank(), rot, cut, dir);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, Candidate { x: x.clone(), alignment: a }));
                }
            }
        }
    }
    best.map(|(_, c)| c)
}

/// Emits the derivation of `x⁻¹y ∈ P` followed by the closing R3 step.
/// Returns the final step id and the words at phase boundaries.
fn emit_chain(store: &mut Store, cand: &Candidate) -> (usize, Vec<Word>) {
    let cols = &cand.alignment.columns;
    let mut applied = vec![false; cols.len()];
    let current = |applied: &[bool], range: std::ops::Range<usize>| -> Vec<Letter> {
        range.flat_map(|c| if applied[c] { cols[c].to.clone() } else { cols[c].from.clone() }).collect()
    };
    let mut chain = vec![cand.x.clone()];
    let mut acc: Option<usize> = None;
    for phase in [Kind::Del, Kind::Sub, Kind::Ins] {
        let todo: Vec<usize> = (0..cols.len()).filter(|&c| cols[c].kind == phase).collect();
        if todo.is_empty() {
            continue;
        }
        for &c in todo.iter().rev() {
            let v = Word::new(current(&applied, c + 1..cols.len())).expect("same alphabet");
            let p = Word::new(cols[c].from.clone()).expect("same alphabet");
            let q = Word::new(cols[c].to.clone()).expect("same alphabet");
            let g = p.inverse().mul(&q);
            let key = cols[c].key.expect("edit has a fact");
            let kw = key.word();
            let h0 = if kw == g {
                Word::empty()
            } else {
                let h = Word::letter(g.letters()[0]);
                debug_assert_eq!(kw.conj(&h), g);
                h
            };
            let d = store.conjugated(key, v.inverse().mul(&h0));
            acc = Some(match acc {
                None => d,
                Some(a) => {
                    let out = store.steps[a].output.mul(&store.steps[d].output);
                    store.push(Step::trans(a, d, out))
                }
            });
            applied[c] = true;
        }
        chain.push(Word::new(current(&applied, 0..cols.len())).expect("same alphabet").reduce());
    }
    let a = acc.expect("nonempty chain");
    let rho = store.steps[a].output.inverse();
    let end = store.push(Step::relator(a, rho, Word::empty()));
    (end, chain)
}

// ---------------------------------------------------------------------------
// Chain rendering.

/// Renders indexed words in the letter names of the relator
/// `b (D c) b⁻¹ = (D c)^m`: `b = a[s]`, `c = a[s+1]`, `D = W`, and the letters
/// of `W` as `a` (when `s = 1`) or `z0, z1, …`.
#[derive(Debug, Clone)]
pub struct Namer {
    params: Option<TowerParams>,
}

impl Namer {
    pub fn new(params: Option<TowerParams>) -> Self {
        Namer { params }
    }

    fn name(&self, i: i64) -> String {
        let Some(p) = &self.params else { return format!("a[{i}]") };
        let s = p.s() as i64;
        match i {
            i if i == s => "b".into(),
            i if i == s + 1 => "c".into(),
            0 if s == 1 => "a".into(),
            i if (0..s).contains(&i) => format!("z{i}"),
            i => format!("a[{i}]"),
        }
    }

    pub fn render(&self, w: &Word) -> String {
        let Some(p) = &self.params else { return w.to_string() };
        if w.is_empty() {
            return "1".into();
        }
        let d = p.w().letters();
        let di = p.w().inverse();
        let letters = w.letters();
        let mut toks: Vec<(String, i64)> = Vec::new();
        let mut i = 0;
        while i < letters.len() {
            let (name, e, len) = if d.len() > 1 && letters[i..].starts_with(d) {
                ("D".to_string(), 1, d.len())
            } else if d.len() > 1 && letters[i..].starts_with(di.letters()) {
                ("D".to_string(), -1, d.len())
            } else {
                (self.name(idx(&letters[i])), letters[i].sign(), 1)
            };
            match toks.last_mut() {
                Some((n, k)) if *n == name => {
                    *k += e;
                    if *k == 0 {
                        toks.pop();
                    }
                }
                _ => toks.push((name, e)),
            }
            i += len;
        }
        let tok = |(n, e): &(String, i64)| if *e == 1 { n.clone() } else { format!("{n}^{e}") };
        let n = toks.len();
        for period in 2..n {
            if n.is_multiple_of(period) && (period..n).all(|k| toks[k] == toks[k - period]) {
                let inner: String = toks[..period].iter().map(tok).collect();
                return format!("({inner})^{}", n / period);
            }
        }
        toks.iter().map(tok).collect()
    }

    pub fn render_chain(&self, chain: &[Word]) -> String {
        chain.iter().map(|w| self.render(w)).collect::<Vec<_>>().join(" < ")
    }
}

// ---------------------------------------------------------------------------
// Branch closing and the split tree.

fn to_plain(steps: Vec<Step>) -> Vec<Step> {
    let u = |w: &Word| w.unrewrite().expect("indexed");
    steps
        .into_iter()
        .map(|s| Step {
            output: u(&s.output),
            conj: s.conj.as_ref().map(|h| u(h).mul(&Word::t().pow(s.shift))),
            shift: 0,
            relator: s.relator.as_ref().map(u),
            ..s
        })
        .collect()
}

struct Branch<'a> {
    oracle: &'a dyn WordOracle,
    relator: Option<Word>,
    namer: Namer,
    natural: Option<usize>,
    budget: usize,
}

enum Attempt {
    Closed(Vec<Step>, Option<String>),
    Open,
    Budget,
}

impl Branch<'_> {
    fn new<'a>(oracle: &'a dyn WordOracle, params: Option<TowerParams>, budget: usize) -> Branch<'a> {
        let relator = oracle.relator().map(|r| r.magnus_rewrite().expect("zero t-sum relator").cyclic_reduce().1);
        let natural = params.as_ref().map(TowerParams::relator_lhs_len);
        Branch { oracle, relator, namer: Namer::new(params), natural, budget }
    }

    fn try_close(&self, hyps: &[Word]) -> Attempt {
        for h in hyps {
            if self.oracle.is_trivial(h) == Verdict::Trivial {
                let steps = vec![Step::hyp(h.clone()), Step::wp(0, Word::empty())];
                return Attempt::Closed(steps, None);
            }
        }
        let indexed: Vec<(Word, Option<Word>)> =
            hyps.iter().map(|h| (h.clone(), h.reduce().magnus_rewrite().ok())).collect();
        let mut lo = 0;
        let mut hi = 0;
        for r in indexed.iter().filter_map(|(_, w)| w.as_ref()).chain(self.relator.as_ref()) {
            if let Some((a, b)) = r.index_range() {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        let mut store = Store::new(lo, hi, self.budget);
        for (plain, ind) in &indexed {
            let out = ind.clone().unwrap_or_else(|| plain.clone());
            let id = store.push(Step::hyp(out.clone()));
            if let Some(k) = ind.as_ref().and_then(Key::classify) {
                store.facts.entry(k).or_insert(id);
            } else if let Some(ind) = ind {
                // a[j] a[i]^-1 is a conjugate of a[i]^-1 a[j]
                if let [y, x] = ind.letters() {
                    if !y.inv && x.inv {
                        let k = Key::Lt(idx(x), idx(y));
                        let cid = store.push(Step::conj(id, Word::letter(*x), 0, k.word()));
                        store.facts.entry(k).or_insert(cid);
                    }
                }
            }
        }
        match store.saturate() {
            Closed::Yes(end) => return Attempt::Closed(self.finish(&store, end), None),
            Closed::Budget => return Attempt::Budget,
            Closed::No => {}
        }
        let Some(rel) = &self.relator else { return Attempt::Open };
        let Some(cand) = find_chain(rel, &store.facts, self.natural) else { return Attempt::Open };
        let (end, chain) = emit_chain(&mut store, &cand);
        Attempt::Closed(self.finish(&store, end), Some(self.namer.render_chain(&chain)))
    }

    fn finish(&self, store: &Store, end: usize) -> Vec<Step> {
        let steps = store.extract(end);
        // hypotheses that had no zero t-sum rewriting were stored as plain words
        if steps.iter().all(|s| s.output.is_over(Alphabet::Indexed) || s.output.is_empty()) {
            to_plain(steps)
        } else {
            steps
        }
    }

    fn explore(
        &self,
        splits: &[SplitItem],
        hyps: Vec<Word>,
        exec: Exec,
        path: String,
    ) -> Result<CertNode, Vec<String>> {
        match self.try_close(&hyps) {
            Attempt::Closed(derivation, chain) => return Ok(CertNode::Leaf { derivation, chain }),
            Attempt::Budget => return Err(vec![format!("{path} (budget)")]),
            Attempt::Open => {}
        }
        let Some((item, rest)) = splits.split_first() else {
            return Err(vec![if path.is_empty() { "root".into() } else { path }]);
        };
        let with = |g: Word| {
            let mut h = hyps.clone();
            h.push(g);
            h
        };
        let sub = |case: &str| format!("{path}/{}:{case}", item.label);
        let (pos, neg) = exec.join(
            || self.explore(rest, with(item.word.clone()), exec, sub("pos")),
            || self.explore(rest, with(item.word.inverse()), exec, sub("neg")),
        );
        let eq = match self.oracle.is_trivial(&item.word) {
            Verdict::NonTrivial => Ok(CertNode::OracleNonTrivial { element: item.word.clone() }),
            Verdict::Trivial => self.explore(rest, hyps.clone(), exec, sub("eq")),
            Verdict::Inconclusive => Err(vec![format!("{} (oracle inconclusive)", sub("eq"))]),
        };
        match (pos, neg, eq) {
            (Ok(pos), Ok(neg), Ok(eq)) => {
                Ok(CertNode::Split { item: item.clone(), pos: Box::new(pos), neg: Box::new(neg), eq: Box::new(eq) })
            }
            (p, n, e) => Err([p.err(), n.err(), e.err()].into_iter().flatten().flatten().collect()),
        }
    }
}

/// Forward-chains sign and order facts from `hyps` (words over `{t, a}`) and
/// then tries one relator chain.
pub fn saturate(hyps: &[Word], oracle: &dyn WordOracle, budget: usize) -> Saturation {
    let branch = Branch::new(oracle, None, budget);
    match branch.try_close(hyps) {
        Attempt::Closed(steps, _) => Saturation::Contradiction(steps),
        Attempt::Budget => Saturation::BudgetExhausted,
        Attempt::Open => Saturation::Stable(hyps.to_vec()),
    }
}

/// Explores the split sequence over the presentation `⟨t, a | oracle.relator()⟩`.
pub fn prove_non_biorderable(oracle: &dyn WordOracle, config: &ProverConfig) -> ProofOutcome {
    let branch = Branch::new(oracle, config.params.clone(), config.budget);
    match branch.explore(&config.splits, Vec::new(), config.exec, String::new()) {
        Ok(root) => ProofOutcome::Certificate(root),
        Err(open) => ProofOutcome::Inconclusive { open },
    }
}

// ---------------------------------------------------------------------------
// Independent checking.

/// Whether `rho` is a conjugate of `r` or `r⁻¹` in the free group (for
/// indexed words, of a shift of them).
fn is_relator_conjugate(rho: &Word, r: &Word) -> bool {
    let core = rho.cyclic_reduce().1;
    [r.clone(), r.inverse()].iter().any(|r| {
        let rc = r.cyclic_reduce().1;
        if rc.len() != core.len() || rc.is_empty() {
            return false;
        }
        let d = match (core.index_range(), rc.index_range()) {
            (Some((a, _)), Some((b, _))) => a - b,
            _ => 0,
        };
        let rc = rc.shift(d);
        (0..rc.len()).any(|k| rc.rotate(k) == core)
    })
}

fn check_leaf(steps: &[Step], hyps: &[Word], oracle: &dyn WordOracle, path: &str) -> Result<(), CertError> {
    let relator = oracle.relator();
    for (i, s) in steps.iter().enumerate() {
        let fail =
            |reason: &str| CertError::InvalidStep { path: path.to_string(), step: i, reason: reason.to_string() };
        if s.inputs.iter().any(|&j| j >= i) {
            return Err(fail("input refers forward"));
        }
        let ins: Vec<&Word> = s.inputs.iter().map(|&j| &steps[j].output).collect();
        let arity = match s.rule {
            Rule::Hyp => 0,
            Rule::Mul | Rule::Trans => 2,
            _ => 1,
        };
        if ins.len() != arity {
            return Err(fail("wrong number of inputs"));
        }
        match s.rule {
            Rule::Hyp => {
                if !hyps.iter().any(|h| h.reduce() == s.output) {
                    return Err(fail("not a hypothesis of this branch"));
                }
            }
            Rule::Wp => {
                if oracle.is_trivial(&ins[0].inverse().mul(&s.output)) != Verdict::Trivial {
                    return Err(fail("oracle does not confirm equality"));
                }
            }
            rule => {
                if rule == Rule::Conj && s.shift != 0 && !s.output.is_over(Alphabet::Indexed) {
                    return Err(fail("shift on a plain word"));
                }
                if rule == Rule::Relator {
                    let (Some(rho), Some(r)) = (&s.relator, &relator) else {
                        return Err(fail("no relator"));
                    };
                    let r = if rho.is_over(Alphabet::Indexed) {
                        r.magnus_rewrite().map_err(|_| fail("relator"))?
                    } else {
                        r.clone()
                    };
                    if !is_relator_conjugate(rho, &r) {
                        return Err(fail("not a conjugate of the relator"));
                    }
                }
                match s.expected_output(&ins) {
                    Some(out) if out == s.output => {}
                    _ => return Err(fail("output does not follow from the rule")),
                }
            }
        }
    }
    match steps.last() {
        Some(s) if s.output.is_empty() => Ok(()),
        _ => Err(CertError::InvalidNode { path: path.to_string(), reason: "derivation does not end in 1".into() }),
    }
}

fn check_node(node: &CertNode, hyps: &mut Vec<Word>, oracle: &dyn WordOracle, path: &str) -> Result<(), CertError> {
    match node {
        CertNode::Leaf { derivation, .. } => check_leaf(derivation, hyps, oracle, path),
        CertNode::OracleNonTrivial { element } => Err(CertError::InvalidNode {
            path: path.to_string(),
            reason: format!("oracle closure of {element} outside an eq case"),
        }),
        CertNode::Split { item, pos, neg, eq } => {
            let g = &item.word;
            for (case, node, hyp) in [("pos", pos, Some(g.clone())), ("neg", neg, Some(g.inverse()))] {
                hyps.extend(hyp);
                let r = check_node(node, hyps, oracle, &format!("{path}/{}:{case}", item.label));
                hyps.pop();
                r?;
            }
            let sub = format!("{path}/{}:eq", item.label);
            match eq.as_ref() {
                CertNode::OracleNonTrivial { element } => {
                    if element.reduce() != g.reduce() {
                        return Err(CertError::InvalidNode { path: sub, reason: "element differs from split".into() });
                    }
                    if oracle.is_trivial(g) != Verdict::NonTrivial {
                        return Err(CertError::InvalidNode {
                            path: sub,
                            reason: "oracle does not confirm g != 1".into(),
                        });
                    }
                    Ok(())
                }
                other => check_node(other, hyps, oracle, &sub),
            }
        }
    }
}

/// Replays every step of `cert` against the rule table and the oracle's relator.
pub fn check_certificate(cert: &CertNode, oracle: &dyn WordOracle) -> Result<(), CertError> {
    check_node(cert, &mut Vec::new(), oracle, "")
}
