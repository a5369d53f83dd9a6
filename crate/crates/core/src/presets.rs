//! Named regions: word macros, ledgers and the searches run on them.
//!
//! Preset files live in `data/` and are compiled in. Setting
//! `SPECTRA_GAP_DATA` to a directory makes `<name>.toml` and
//! `<name>.ledger.jsonl` there take precedence.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::certifier::{certify_forbidden, derive_forbidden, DeriveOptions};
use crate::error::{Error, Result};
use crate::lambda::markov_sup;
use crate::ledger::{Ledger, LedgerEntry, Provenance};
use crate::surd::RadicalSum;
use crate::words::{parse_word, transpose_word, BiSeq, Literal, PointedWord, Word};

pub const PRESET_NAMES: [&str; 3] = ["omega1", "omega2", "freiman"];

fn embedded(name: &str) -> Option<(&'static str, Option<&'static str>)> {
    match name {
        "omega1" => Some((include_str!("../data/omega1.toml"), Some(include_str!("../data/omega1.ledger.jsonl")))),
        "omega2" => Some((include_str!("../data/omega2.toml"), Some(include_str!("../data/omega2.ledger.jsonl")))),
        "freiman" => Some((include_str!("../data/freiman.toml"), Some(include_str!("../data/freiman.ledger.jsonl")))),
        _ => None,
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct LedgerSpec {
    pub word: String,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Deserialize)]
pub struct TreeSpec {
    pub root: String,
    pub depth: usize,
    /// The single surviving window.
    pub window: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PropagateSpec {
    pub name: String,
    pub window: String,
    #[serde(default)]
    pub drop: Vec<String>,
    pub arms: [usize; 2],
    pub expect: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ReplicateSpec {
    pub name: String,
    pub window: String,
    #[serde(default)]
    pub drop: Vec<String>,
    pub expect: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointKind {
    Extremal,
    Minimax,
}

#[derive(Clone, Debug, Deserialize)]
pub struct EndpointSpec {
    pub name: String,
    pub kind: EndpointKind,
    pub template: String,
    #[serde(default = "default_direction")]
    pub direction: String,
    #[serde(default)]
    pub drop: Vec<String>,
    /// Search under a constraint set instead of the ledger.
    pub constraints: Option<String>,
    /// Fixed letters taking part in matching (see `ExtremalOptions`).
    pub context: Option<usize>,
    pub filler: Option<String>,
    pub pivots: Option<[i64; 2]>,
    pub max_n: Option<usize>,
}

fn default_direction() -> String {
    "min".into()
}

#[derive(Clone, Debug, Deserialize)]
pub struct ConstraintSpec {
    pub name: String,
    /// Whether `words` stand for their transposes too.
    pub closed: bool,
    pub words: Vec<String>,
    /// Added as given, without transposes.
    #[serde(default)]
    pub extra: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct MemberSpec {
    pub kind: String,
    pub literal: Option<String>,
    pub prefix: Option<String>,
    pub suffix: Option<String>,
    #[serde(default)]
    pub middles: Vec<String>,
    /// Constraint set that `check` (with `{s}` replaced) must avoid.
    pub constraints: Option<String>,
    pub check: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct WitnessSpec {
    pub left: String,
    pub middle: String,
    pub right: String,
    /// Endpoint the witnesses accumulate on.
    pub upper: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct HausdorffSpec {
    pub lower: String,
    pub upper: String,
    pub inner: String,
    pub context: Option<usize>,
    pub expect_inner: String,
    pub below: String,
    pub below_slack: String,
    pub above: String,
    pub above_slack: String,
    pub delta_numerator: String,
    pub delta_denominator: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    /// `λ₀ > j₀ + above` for every completion, from the single window.
    Window,
    /// `m(S) > j₀ + above` for every completion, by case split against the
    /// ledger.
    Sup,
}

/// A stated lower bound for a word, checked independently of the ledger
/// margins.
#[derive(Clone, Debug, Deserialize)]
pub struct InequalitySpec {
    pub word: String,
    pub above: String,
    pub kind: InequalityKind,
}

#[derive(Clone, Debug, Deserialize)]
struct PresetFile {
    name: String,
    #[serde(default)]
    description: String,
    word: String,
    threshold: String,
    alphabet: u8,
    transpose_closed: bool,
    max_extension: usize,
    #[serde(default)]
    macros: BTreeMap<String, String>,
    #[serde(default)]
    special: BTreeMap<String, String>,
    #[serde(default)]
    ledger: Vec<LedgerSpec>,
    #[serde(default)]
    inequality: Vec<InequalitySpec>,
    tree: Option<TreeSpec>,
    #[serde(default)]
    propagate: Vec<PropagateSpec>,
    #[serde(default)]
    replicate: Vec<ReplicateSpec>,
    #[serde(default)]
    endpoint: Vec<EndpointSpec>,
    #[serde(default)]
    constraints: Vec<ConstraintSpec>,
    #[serde(default)]
    members: Vec<MemberSpec>,
    witnesses: Option<WitnessSpec>,
    hausdorff: Option<HausdorffSpec>,
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub word: Word,
    pub threshold_literal: String,
    pub threshold: RadicalSum,
    pub alphabet: u8,
    pub transpose_closed: bool,
    pub max_extension: usize,
    pub macros: BTreeMap<String, String>,
    pub special: BTreeMap<String, Word>,
    pub ledger_spec: Vec<LedgerSpec>,
    pub inequalities: Vec<InequalitySpec>,
    pub tree: Option<TreeSpec>,
    pub propagate: Vec<PropagateSpec>,
    pub replicate: Vec<ReplicateSpec>,
    pub endpoints: Vec<EndpointSpec>,
    pub constraints: Vec<ConstraintSpec>,
    pub members: Vec<MemberSpec>,
    pub witnesses: Option<WitnessSpec>,
    pub hausdorff: Option<HausdorffSpec>,
    stored_ledger: Option<String>,
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os("SPECTRA_GAP_DATA").map(PathBuf::from)
}

impl Preset {
    /// Loads a preset by name, honouring `SPECTRA_GAP_DATA`.
    pub fn load(name: &str) -> Result<Preset> {
        if let Some(dir) = data_dir() {
            let toml_path = dir.join(format!("{name}.toml"));
            if toml_path.exists() {
                let text = std::fs::read_to_string(&toml_path)?;
                let ledger = std::fs::read_to_string(dir.join(format!("{name}.ledger.jsonl"))).ok();
                return Preset::from_parts(&text, ledger);
            }
        }
        let (text, ledger) = embedded(name).ok_or_else(|| Error::Preset(format!("unknown preset {name}")))?;
        Preset::from_parts(text, ledger.map(str::to_string))
    }

    /// Parses a preset from TOML text and an optional stored ledger.
    pub fn from_parts(toml_text: &str, stored_ledger: Option<String>) -> Result<Preset> {
        let f: PresetFile = toml::from_str(toml_text).map_err(|e| Error::Preset(e.to_string()))?;
        let mut p = Preset {
            name: f.name,
            description: f.description,
            word: parse_word(&f.word)?,
            threshold_literal: String::new(),
            threshold: RadicalSum::zero(),
            alphabet: f.alphabet,
            transpose_closed: f.transpose_closed,
            max_extension: f.max_extension,
            macros: f.macros,
            special: BTreeMap::new(),
            ledger_spec: f.ledger,
            inequalities: f.inequality,
            tree: f.tree,
            propagate: f.propagate,
            replicate: f.replicate,
            endpoints: f.endpoint,
            constraints: f.constraints,
            members: f.members,
            witnesses: f.witnesses,
            hausdorff: f.hausdorff,
            stored_ledger: stored_ledger.filter(|s| !s.trim().is_empty()),
        };
        p.threshold_literal = p.expand(&f.threshold);
        let t: BiSeq = p.threshold_literal.parse()?;
        p.threshold = markov_sup(&t).value;
        for (k, v) in &f.special {
            let w = parse_word(&p.expand(v))?;
            p.special.insert(k.clone(), w);
        }
        Ok(p)
    }

    /// Replaces `{name}` by its macro.
    pub fn expand(&self, s: &str) -> String {
        let mut out = s.to_string();
        // longest names first so {w} cannot clip {ws}
        let mut keys: Vec<&String> = self.macros.keys().collect();
        keys.sort_by_key(|k| std::cmp::Reverse(k.len()));
        for k in keys {
            out = out.replace(&format!("{{{k}}}"), &self.macros[k]);
        }
        out
    }

    pub fn literal(&self, s: &str) -> Result<Literal> {
        self.expand(s).parse()
    }

    pub fn biseq(&self, s: &str) -> Result<BiSeq> {
        self.expand(s).parse()
    }

    pub fn pointed(&self, s: &str) -> Result<PointedWord> {
        self.expand(s).parse()
    }

    pub fn plain_word(&self, s: &str) -> Result<Word> {
        parse_word(&self.expand(s).replace('*', ""))
    }

    pub fn special_words(&self, names: &[String]) -> Result<Vec<Word>> {
        names
            .iter()
            .map(|n| self.special.get(n).cloned().ok_or_else(|| Error::Preset(format!("{}: no special word {n}", self.name))))
            .collect()
    }

    /// Recomputes every entry in order: certified words by a single window,
    /// derived words by case analysis against the entries above.
    pub fn build_ledger(&self) -> Result<Ledger> {
        let mut l = Ledger::new(&self.name, &self.threshold_literal, self.threshold.clone(), self.transpose_closed);
        l.max_extension = self.max_extension;
        let opts = DeriveOptions { max_extension: self.max_extension, ..Default::default() };
        for spec in &self.ledger_spec {
            let word = self.entry_word(spec)?;
            let margin = match spec.provenance {
                Provenance::Assumed => None,
                Provenance::Certified => Some(
                    certify_forbidden(&word, &self.threshold)
                        .map_err(|f| Error::Preset(format!("{}: {f}", self.name)))?
                        .margin,
                ),
                Provenance::Derived => Some(derive_forbidden(&word, &l, &self.threshold, &opts)?.margin),
            };
            l.push(LedgerEntry { word, margin, provenance: spec.provenance })?;
        }
        Ok(l)
    }

    /// Assumed words may omit the pivot.
    fn entry_word(&self, spec: &LedgerSpec) -> Result<PointedWord> {
        let text = self.expand(&spec.word);
        if spec.provenance == Provenance::Assumed && !text.contains('*') {
            return PointedWord::new(parse_word(&text)?, 0);
        }
        text.parse()
    }

    /// The stored ledger when present, otherwise a fresh build.
    pub fn ledger(&self) -> Result<Ledger> {
        match &self.stored_ledger {
            Some(text) => Ledger::from_jsonl(text),
            None => self.build_ledger(),
        }
    }

    pub fn stored_ledger_text(&self) -> Option<&str> {
        self.stored_ledger.as_deref()
    }

    pub fn constraint_set(&self, name: &str) -> Result<Ledger> {
        let spec = self
            .constraints
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Preset(format!("{}: no constraint set {name}", self.name)))?;
        let mut l = Ledger::new(&format!("{}/{}", self.name, name), &self.threshold_literal, self.threshold.clone(), false);
        let mut add = |w: Word| -> Result<()> {
            if l.contains_word(&w) {
                return Ok(());
            }
            let pw = PointedWord::new(w, 0)?;
            l.push(LedgerEntry { word: pw, margin: None, provenance: Provenance::Assumed })
        };
        for w in &spec.words {
            let w = self.plain_word(w)?;
            if spec.closed {
                add(transpose_word(&w))?;
            }
            add(w)?;
        }
        for w in &spec.extra {
            add(self.plain_word(w)?)?;
        }
        Ok(l)
    }

    pub fn endpoint(&self, name: &str) -> Result<&EndpointSpec> {
        self.endpoints.iter().find(|e| e.name == name).ok_or_else(|| Error::Preset(format!("{}: no endpoint {name}", self.name)))
    }
}

/// Exact value of a short decimal such as `9e-8` or `2.3e-12`.
pub fn parse_decimal(s: &str) -> Result<RadicalSum> {
    let bad = || Error::Parse { pos: 0, msg: format!("not a decimal: {s}") };
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let e = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if e >= 0 {
        BigRational::from_integer(digits * Pow::pow(&ten, e as u32))
    } else {
        BigRational::new(digits, Pow::pow(&ten, (-e) as u32))
    };
    if neg {
        q = -q;
    }
    Ok(RadicalSum::from_rational(q))
}

/// `(numerator)/denominator` in radical form.
pub fn radical_fraction(num: &str, den: &str) -> Result<RadicalSum> {
    let n: RadicalSum = num.parse()?;
    let d: BigInt = den.trim().parse().map_err(|_| Error::Parse { pos: 0, msg: format!("bad denominator {den}") })?;
    Ok(n.scale(&BigRational::new(BigInt::one(), d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("9e-8").unwrap(), RadicalSum::ratio(9, 100_000_000));
        assert_eq!(parse_decimal("2.5").unwrap(), RadicalSum::ratio(5, 2));
        assert_eq!(parse_decimal("1.25e-1").unwrap(), RadicalSum::ratio(1, 8));
        assert!(parse_decimal("e5").is_err());
    }

    #[test]
    fn macros_expand_longest_first() {
        let p = Preset::load("omega1").unwrap();
        assert_eq!(p.expand("{ws}{w}"), "21233*2111212332111");
        assert_eq!(p.special["j"].len(), 4 + 27 + 4);
    }

    #[test]
    fn stored_ledgers_match_their_presets() {
        for name in PRESET_NAMES {
            let p = Preset::load(name).unwrap();
            let stored = p.ledger().unwrap();
            assert_eq!(stored.primaries().len(), p.ledger_spec.len(), "{name}");
            for (e, s) in stored.primaries().iter().zip(&p.ledger_spec) {
                assert_eq!(e.word, p.entry_word(s).unwrap());
                assert_eq!(e.provenance, s.provenance);
            }
        }
    }
}
