//! The `onerel` command line: every engine behind one binary with text and
//! JSON output.
//!
//! Exit codes: 0 success, 1 usage error or rejected input, 2 inconclusive
//! verdict, 3 internal invariant violation.

use std::ffi::OsString;
use std::fs;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use onerel::alexander::{alexander_poly, descartes_positive_bound, positive_real_root_count};
use onerel::biorder::{
    check_certificate, prove_non_biorderable, CertNode, ProofOutcome, ProverConfig, SplitItem, DEFAULT_BUDGET,
};
use onerel::gentorsion::{check_finding, search, FindingCheck, SearchConfig};
use onerel::oracle::{oracle_by_name, WordOracle, ORACLE_NAMES};
use onerel::sampling::{run_closure, run_sandwich, run_soundness, DEFAULT_SEED};
use onerel::{Alphabet, Exec, Tower, TowerParams, Verdict, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// What one invocation printed and how it exited.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn with_code(code: i32, stdout: String) -> Self {
        Output { code, stdout, stderr: String::new() }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Output { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }

    /// Parsed JSON of stdout; panics if stdout is not JSON.
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("stdout is JSON")
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "onerel",
    version,
    about = "Word problems, Alexander polynomials, bi-order certificates and generalized-torsion search for Γ_W = ⟨t, a | r⟩"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    /// Tower parameters `s,m,W`.
    #[arg(long, default_value = "1,2,a[0]")]
    params: TowerParams,

    /// Named group oracle: free, klein, bs, gamma or h.
    #[arg(long)]
    oracle: Option<String>,

    /// Base of the `bs` oracle.
    #[arg(long, default_value_t = 2)]
    m: u32,
}

impl GroupArgs {
    fn params(&self) -> Result<TowerParams, Output> {
        self.params.canonicalize().map_err(Output::usage)
    }

    fn named_oracle(&self, name: &str) -> Result<Box<dyn WordOracle>, Output> {
        if self.m < 2 {
            return Err(Output::usage("--m must be at least 2"));
        }
        oracle_by_name(name, &self.params()?, self.m).ok_or_else(|| {
            Output::usage(format!("unknown oracle {name:?} (expected one of {})", ORACLE_NAMES.join(", ")))
        })
    }

    fn oracle(&self) -> Result<Box<dyn WordOracle>, Output> {
        self.named_oracle(self.oracle.as_deref().unwrap_or("gamma"))
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Word problem in Γ_W, its kernel H, or a named control group.
    Wp {
        #[command(flatten)]
        group: GroupArgs,
        /// Tower level for indexed words (default: the word's own window).
        #[arg(long)]
        level: Option<usize>,
        word: String,
    },
    /// Magnus rewriting of a plain word, or its inverse for an indexed word.
    Rewrite { word: String },
    /// The presentation of Γ_W and the relators R_j of H.
    Relator {
        #[arg(long, default_value = "1,2,a[0]")]
        params: TowerParams,
        /// Index of R_j.
        #[arg(long, default_value_t = 0)]
        j: i64,
    },
    /// Alexander polynomial and positive-root counts.
    Alex {
        #[arg(long, default_value = "1,2,a[0]")]
        params: TowerParams,
        /// Use this relator (plain with zero t-sum, or indexed) instead of R_0.
        #[arg(long)]
        relator: Option<String>,
    },
    /// Non-bi-orderability certificates.
    Biorder {
        #[command(subcommand)]
        cmd: BiorderCmd,
    },
    /// Bounded generalized-torsion search.
    Gts {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 4)]
        tau_max: usize,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 3)]
        max_factors: usize,
        #[arg(long, default_value_t = 2)]
        shift_range: i64,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        /// Stop after this many findings.
        #[arg(long, default_value_t = 1, conflicts_with = "all")]
        max_findings: usize,
        /// Report every finding.
        #[arg(long)]
        all: bool,
        /// Enumerate every τ instead of one per rotation/inversion class.
        #[arg(long)]
        no_prune: bool,
    },
    /// Stable alternating form at a tower level.
    Syll {
        #[arg(long, default_value = "1,2,a[0]")]
        params: TowerParams,
        #[arg(long)]
        level: Option<usize>,
        word: String,
    },
    /// Seeded property runs of the word-problem engine.
    Sample {
        #[arg(value_enum)]
        property: Property,
        #[arg(long, default_value = "1,2,a[0]")]
        params: TowerParams,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum BiorderCmd {
    /// Search for a certificate over the split sequence.
    Prove {
        #[command(flatten)]
        group: GroupArgs,
        /// Split item `g` or `x vs y`; repeatable (default: `a`, then `a vs t a t^-1`).
        #[arg(long)]
        split: Vec<String>,
        /// Maximum number of facts per branch.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Also write the JSON certificate to this file.
        #[arg(long)]
        out: Option<String>,
    },
    /// Replay a certificate file (`-` for stdin).
    Check {
        #[command(flatten)]
        group: GroupArgs,
        file: String,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Property {
    Closure,
    Soundness,
    Sandwich,
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Output::ok(text)
            };
        }
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let res = match cli.cmd {
        Cmd::Wp { group, level, word } => cmd_wp(&group, level, &word, cli.json),
        Cmd::Rewrite { word } => cmd_rewrite(&word, cli.json),
        Cmd::Relator { params, j } => cmd_relator(&params, j, cli.json),
        Cmd::Alex { params, relator } => cmd_alex(&params, relator.as_deref(), cli.json),
        Cmd::Biorder { cmd: BiorderCmd::Prove { group, split, budget, out } } => {
            cmd_prove(&group, &split, budget, out.as_deref(), exec, cli.json)
        }
        Cmd::Biorder { cmd: BiorderCmd::Check { group, file } } => cmd_check(&group, &file, cli.json),
        Cmd::Gts { group, tau_max, radius, max_factors, shift_range, budget, max_findings, all, no_prune } => {
            let config = SearchConfig {
                tau_max_length: tau_max,
                conjugator_radius: radius,
                max_factors,
                shift_range,
                budget,
                max_findings: (!all).then_some(max_findings),
                prune: !no_prune,
                exec,
            };
            cmd_gts(&group, &config, cli.json)
        }
        Cmd::Syll { params, level, word } => cmd_syll(&params, level, &word, cli.json),
        Cmd::Sample { property, params, count, seed } => cmd_sample(property, &params, count, seed, cli.json),
    };
    res.unwrap_or_else(|e| e)
}

type CmdResult = Result<Output, Output>;

fn parse_word(s: &str) -> Result<Word, Output> {
    s.parse::<Word>().map_err(|e| Output::usage(format!("{s:?}: {e}")))
}

fn tower(params: &TowerParams) -> Result<Tower, Output> {
    let p = params.canonicalize().map_err(Output::usage)?;
    Tower::new(p).map_err(Output::usage)
}

fn render(value: Value, text: String, json_mode: bool) -> String {
    if json_mode {
        let mut s = serde_json::to_string_pretty(&value).expect("serializable");
        s.push('\n');
        s
    } else {
        text
    }
}

fn verdict_code(v: Verdict) -> i32 {
    if v == Verdict::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

fn cmd_wp(group: &GroupArgs, level: Option<usize>, word: &str, json_mode: bool) -> CmdResult {
    let w = parse_word(word)?;
    let (group_id, decision) = match &group.oracle {
        Some(name) => {
            let oracle = group.named_oracle(name)?;
            if !w.is_empty() && !w.is_over(oracle.alphabet()) {
                return Err(Output::usage(format!("oracle {} expects {} words", oracle.id(), oracle.alphabet())));
            }
            let v = oracle.is_trivial(&w);
            (oracle.id(), json!({ "verdict": v.as_str(), "level": null, "syllables": null, "stats": null }))
        }
        None => {
            let t = tower(&group.params)?;
            let params = t.params().to_string();
            let d = if w.is_over(Alphabet::Indexed) {
                let (x, n) = match (level, w.index_range()) {
                    (Some(n), _) => (w.clone(), n),
                    (None, Some((lo, hi))) => (w.shift(-lo), (hi - lo) as usize),
                    (None, None) => (w.clone(), 0),
                };
                t.is_trivial(&x, n).map_err(Output::usage)?
            } else {
                t.is_trivial_in_gamma(&w).map_err(Output::usage)?
            };
            let group = if w.is_over(Alphabet::Indexed) { format!("h[{params}]") } else { format!("gamma[{params}]") };
            (group, d.to_json())
        }
    };
    let verdict = match decision["verdict"].as_str() {
        Some("trivial") => Verdict::Trivial,
        Some("nontrivial") => Verdict::NonTrivial,
        _ => Verdict::Inconclusive,
    };
    let mut value = json!({ "word": w.to_string(), "group": group_id });
    for (k, v) in decision.as_object().expect("object") {
        value[k] = v.clone();
    }
    Ok(Output::with_code(verdict_code(verdict), render(value, format!("{verdict}\n"), json_mode)))
}

fn cmd_rewrite(word: &str, json_mode: bool) -> CmdResult {
    let w = parse_word(word)?;
    let (out, direction) = if w.is_over(Alphabet::Indexed) {
        (w.unrewrite().map_err(Output::usage)?, "unrewrite")
    } else {
        (w.magnus_rewrite().map_err(Output::usage)?, "magnus")
    };
    let value = json!({ "input": w.to_string(), "output": out.to_string(), "direction": direction });
    Ok(Output::ok(render(value, format!("{out}\n"), json_mode)))
}

fn cmd_relator(params: &TowerParams, j: i64, json_mode: bool) -> CmdResult {
    let p = params.canonicalize().map_err(Output::usage)?;
    let r = p.gamma_relator();
    let rj = p.relator(j);
    let value = json!({
        "params": p.to_string(),
        "s": p.s(),
        "m": p.m(),
        "w": p.w().to_string(),
        "gamma_relator": r.to_string(),
        "presentation": format!("⟨t, a | {r}⟩"),
        "j": j,
        "relator": rj.to_string(),
        "x_word": p.x_word(j).to_string(),
    });
    let text = format!("Γ = ⟨t, a | {r}⟩\nR_{j} = {rj}\n");
    Ok(Output::ok(render(value, text, json_mode)))
}

fn cmd_alex(params: &TowerParams, relator: Option<&str>, json_mode: bool) -> CmdResult {
    let r = match relator {
        Some(s) => {
            let r = parse_word(s)?;
            if r.is_over(Alphabet::Indexed) {
                r
            } else {
                r.magnus_rewrite().map_err(Output::usage)?
            }
        }
        None => params.canonicalize().map_err(Output::usage)?.relator(0),
    };
    let p = alexander_poly(&r).map_err(Output::usage)?;
    let (roots, bound) = if p.is_zero() {
        (None, None)
    } else {
        let roots = positive_real_root_count(&p).map_err(|e| internal(e.to_string()))?;
        let bound = descartes_positive_bound(&p).map_err(|e| internal(e.to_string()))?;
        (Some(roots), Some(bound))
    };
    let value = json!({
        "relator": r.to_string(),
        "poly": p.to_json(),
        "display": p.to_string(),
        "positive_real_roots": roots,
        "descartes_bound": bound,
    });
    let count = |c: Option<usize>| c.map_or_else(|| "-".to_string(), |c| c.to_string());
    let text = format!("Δ(t) = {p}\npositive real roots: {}\nDescartes bound: {}\n", count(roots), count(bound));
    Ok(Output::ok(render(value, text, json_mode)))
}

fn internal(msg: String) -> Output {
    Output { code: EXIT_INTERNAL, stdout: String::new(), stderr: format!("internal error: {msg}\n") }
}

fn prover_oracle(group: &GroupArgs) -> Result<(Box<dyn WordOracle>, Option<TowerParams>), Output> {
    let name = group.oracle.as_deref().unwrap_or("gamma");
    let oracle = group.named_oracle(name)?;
    if oracle.alphabet() != Alphabet::Plain {
        return Err(Output::usage(format!("oracle {} is not a two-generator presentation", oracle.id())));
    }
    let params = (name == "gamma").then(|| group.params()).transpose()?;
    Ok((oracle, params))
}

fn cmd_prove(
    group: &GroupArgs,
    split: &[String],
    budget: usize,
    out: Option<&str>,
    exec: Exec,
    json_mode: bool,
) -> CmdResult {
    let (oracle, params) = prover_oracle(group)?;
    let mut config = match params {
        Some(p) => ProverConfig::for_params(p),
        None => ProverConfig::default(),
    };
    if !split.is_empty() {
        config.splits = split.iter().map(|s| SplitItem::parse(s)).collect::<Result<_, _>>().map_err(Output::usage)?;
    }
    config.budget = budget;
    config.exec = exec;
    let (value, text, code) = match prove_non_biorderable(oracle.as_ref(), &config) {
        ProofOutcome::Certificate(cert) => {
            if let Err(e) = check_certificate(&cert, oracle.as_ref()) {
                return Err(internal(format!("emitted certificate does not check: {e}")));
            }
            let chains = cert.chains();
            let value = json!({
                "oracle": oracle.id(),
                "result": "certificate",
                "depth": cert.depth(),
                "chains": chains,
                "open": [],
                "certificate": cert.to_json(),
            });
            let text = format!("not bi-orderable: {}\n{cert}", oracle.id());
            (value, text, EXIT_OK)
        }
        ProofOutcome::Inconclusive { open } => {
            let value = json!({
                "oracle": oracle.id(),
                "result": "inconclusive",
                "depth": null,
                "chains": [],
                "open": open,
                "certificate": null,
            });
            let text = format!("inconclusive: {}\nopen branches: {}\n", oracle.id(), open.join(", "));
            (value, text, EXIT_INCONCLUSIVE)
        }
    };
    if let Some(path) = out {
        let mut s = serde_json::to_string_pretty(&value).expect("serializable");
        s.push('\n');
        fs::write(path, s).map_err(|e| Output::usage(format!("{path}: {e}")))?;
    }
    Ok(Output::with_code(code, render(value, text, json_mode)))
}

/// Recovers an oracle from an id such as `klein`, `bs3` or `gamma[1,2,a[0]]`.
fn oracle_from_id(id: &str) -> Option<Box<dyn WordOracle>> {
    if let Some(rest) = id.strip_prefix("gamma[").and_then(|r| r.strip_suffix(']')) {
        let p: TowerParams = rest.parse().ok()?;
        return oracle_by_name("gamma", &p, 2);
    }
    if let Some(m) = id.strip_prefix("bs") {
        return oracle_by_name("bs", &TowerParams::gamma(), m.parse().ok().filter(|&m| m >= 2)?);
    }
    oracle_by_name(id, &TowerParams::gamma(), 2).filter(|o| o.alphabet() == Alphabet::Plain)
}

fn cmd_check(group: &GroupArgs, file: &str, json_mode: bool) -> CmdResult {
    let text = if file == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Output::usage(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(file).map_err(|e| Output::usage(format!("{file}: {e}")))?
    };
    let doc: Value = serde_json::from_str(&text).map_err(|e| Output::usage(format!("{file}: {e}")))?;
    let (oracle, node) = match doc.get("certificate") {
        Some(c) if group.oracle.is_some() => (prover_oracle(group)?.0, c),
        Some(c) => {
            let id = doc.get("oracle").and_then(Value::as_str).unwrap_or("gamma");
            let oracle = oracle_from_id(id).ok_or_else(|| Output::usage(format!("unknown oracle id {id:?}")))?;
            (oracle, c)
        }
        None => (prover_oracle(group)?.0, &doc),
    };
    if node.is_null() {
        return Err(Output::usage("the document carries no certificate"));
    }
    let result = CertNode::from_json(node).and_then(|cert| check_certificate(&cert, oracle.as_ref()));
    let (valid, error) = match &result {
        Ok(()) => (true, None),
        Err(e) => (false, Some(e.to_string())),
    };
    let value = json!({ "oracle": oracle.id(), "valid": valid, "error": error });
    let text = match &error {
        None => format!("valid certificate for {}\n", oracle.id()),
        Some(e) => format!("invalid certificate for {}: {e}\n", oracle.id()),
    };
    let code = if valid { EXIT_OK } else { EXIT_USAGE };
    Ok(Output::with_code(code, render(value, text, json_mode)))
}

fn cmd_gts(group: &GroupArgs, config: &SearchConfig, json_mode: bool) -> CmdResult {
    let oracle = group.oracle()?;
    let report = search(oracle.as_ref(), config).map_err(Output::usage)?;
    for f in &report.findings {
        if let FindingCheck::Invalid(why) = check_finding(f, oracle.as_ref()) {
            return Err(internal(format!("finding fails its own check: {why}")));
        }
    }
    let mut value = report.to_json(oracle.as_ref());
    // wall-clock time would make the JSON differ between identical runs
    value.as_object_mut().expect("object").remove("elapsed_ms");
    let mut text = String::new();
    for f in &report.findings {
        text.push_str(&f.display(oracle.as_ref()));
        text.push('\n');
    }
    text.push_str(&format!(
        "{}: {} finding(s), {} products examined, {} inconclusive{}\n",
        oracle.id(),
        report.findings.len(),
        report.examined,
        report.inconclusive,
        if report.budget_exhausted { ", budget exhausted" } else { "" },
    ));
    let code = if report.findings.is_empty() && (report.budget_exhausted || report.inconclusive > 0) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    Ok(Output::with_code(code, render(value, text, json_mode)))
}

fn cmd_syll(params: &TowerParams, level: Option<usize>, word: &str, json_mode: bool) -> CmdResult {
    let t = tower(params)?;
    let w = parse_word(word)?;
    if !w.is_empty() && !w.is_over(Alphabet::Indexed) {
        return Err(Output::usage("syll expects an indexed word"));
    }
    let n = level.or_else(|| w.index_range().map(|(_, hi)| hi.max(0) as usize)).unwrap_or(0);
    let syllables = t.syllable_decomposition(&w, n).map_err(Output::usage)?;
    let verdict = t.is_trivial(&w, n).map_err(Output::usage)?.verdict;
    let names: Vec<String> = syllables.iter().map(|s| s.to_string()).collect();
    let value = json!({ "word": w.to_string(), "level": n, "syllables": names, "verdict": verdict.as_str() });
    let text =
        if names.is_empty() { format!("ε\n{verdict}\n") } else { format!("{}\n{verdict}\n", names.join(" · ")) };
    Ok(Output::with_code(verdict_code(verdict), render(value, text, json_mode)))
}

fn cmd_sample(property: Property, params: &TowerParams, count: Option<usize>, seed: u64, json_mode: bool) -> CmdResult {
    let t = tower(params)?;
    let report = match property {
        Property::Closure => run_closure(&t, count.unwrap_or(200), seed),
        Property::Soundness => run_soundness(&t, count.unwrap_or(500), seed),
        Property::Sandwich => run_sandwich(&t, count.unwrap_or(100), seed),
    };
    let mut text = format!(
        "{} (seed {}): {}/{} passed, {} inconclusive\n",
        report.property, report.seed, report.passed, report.count, report.inconclusive
    );
    for f in &report.failures {
        text.push_str(&format!("  FAIL {f}\n"));
    }
    let code = if !report.failures.is_empty() {
        EXIT_INTERNAL
    } else if report.inconclusive > 0 {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    Ok(Output::with_code(code, render(report.to_json(), text, json_mode)))
}
