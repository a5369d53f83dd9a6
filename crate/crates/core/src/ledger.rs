//! Forbidden-word ledgers.
//!
//! A ledger is an ordered list of pointed words, each with an exact margin
//! above a fixed threshold and a provenance. Stored entries are primaries;
//! when the ledger is transpose-closed every primary also stands for its
//! transpose with the same margin (λ₀ is invariant under reversal).
//!
//! On disk a ledger is JSON lines: one header object, then one object per
//! primary entry, in the order they were established. Derived entries only
//! lean on entries above them, which makes a recheck reproducible.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::certifier::{certify_forbidden, derive_forbidden, DeriveOptions};
use crate::error::{Error, Result};
use crate::surd::{RadicalSum, Rounding};
use crate::words::{find_subword, parse_word, transpose_word, word_to_string, Digit, PointedWord, Word};

pub const LEDGER_SCHEMA: &str = "spectra-gap/ledger/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Certified,
    Derived,
    Assumed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Certified => "certified",
            Provenance::Derived => "derived",
            Provenance::Assumed => "assumed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub word: PointedWord,
    /// `None` only for assumed entries.
    pub margin: Option<RadicalSum>,
    pub provenance: Provenance,
}

impl LedgerEntry {
    fn transposed(&self) -> LedgerEntry {
        LedgerEntry { word: self.word.transpose(), margin: self.margin.clone(), provenance: self.provenance }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ledger {
    pub name: String,
    pub threshold_literal: String,
    pub threshold: RadicalSum,
    pub transpose_closed: bool,
    pub max_extension: usize,
    primary: Vec<LedgerEntry>,
    /// Primaries plus transposes when closed; searched by `occurrences`.
    all: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn new(name: &str, threshold_literal: &str, threshold: RadicalSum, transpose_closed: bool) -> Ledger {
        Ledger {
            name: name.to_string(),
            threshold_literal: threshold_literal.to_string(),
            threshold,
            transpose_closed,
            max_extension: DeriveOptions::default().max_extension,
            primary: Vec::new(),
            all: Vec::new(),
        }
    }

    /// An empty ledger with the same header.
    pub fn empty_like(&self) -> Ledger {
        let mut l = Ledger::new(&self.name, &self.threshold_literal, self.threshold.clone(), self.transpose_closed);
        l.max_extension = self.max_extension;
        l
    }

    pub fn push(&mut self, e: LedgerEntry) -> Result<()> {
        if self.contains_word(e.word.digits()) {
            return Err(Error::Inconsistent(format!("{} is already in ledger {}", word_to_string(e.word.digits()), self.name)));
        }
        if e.margin.is_none() != (e.provenance == Provenance::Assumed) {
            return Err(Error::Inconsistent(format!("{}: only assumed entries lack a margin", e.word)));
        }
        self.all.push(e.clone());
        if self.transpose_closed {
            let t = e.transposed();
            if t.word.digits() != e.word.digits() {
                self.all.push(t);
            }
        }
        self.primary.push(e);
        Ok(())
    }

    pub fn primaries(&self) -> &[LedgerEntry] {
        &self.primary
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.all
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn words(&self) -> Vec<Word> {
        self.all.iter().map(|e| e.word.digits().to_vec()).collect()
    }

    pub fn max_len(&self) -> usize {
        self.all.iter().map(|e| e.word.len()).max().unwrap_or(0)
    }

    pub fn contains_word(&self, w: &[Digit]) -> bool {
        self.all.iter().any(|e| e.word.digits() == w)
    }

    pub fn get(&self, w: &[Digit]) -> Option<&LedgerEntry> {
        self.all.iter().find(|e| e.word.digits() == w)
    }

    /// Entries whose word occurs somewhere in `hay`.
    pub fn occurrences<'a>(&'a self, hay: &'a [Digit]) -> impl Iterator<Item = &'a LedgerEntry> + 'a {
        self.all.iter().filter(move |e| find_subword(hay, e.word.digits()).is_some())
    }

    pub fn first_occurrence(&self, hay: &[Digit]) -> Option<&LedgerEntry> {
        self.all.iter().find(|e| find_subword(hay, e.word.digits()).is_some())
    }

    /// Copy without the given words and, when closed, their transposes.
    pub fn without(&self, drop: &[Word]) -> Ledger {
        let mut gone: BTreeSet<Word> = drop.iter().cloned().collect();
        if self.transpose_closed {
            gone.extend(drop.iter().map(|w| transpose_word(w)));
        }
        let mut out = self.empty_like();
        for e in &self.primary {
            let d = e.word.digits().to_vec();
            if gone.contains(&d) {
                continue;
            }
            if self.transpose_closed && gone.contains(&transpose_word(&d)) {
                continue;
            }
            out.push(e.clone()).expect("subset of a valid ledger");
        }
        out
    }

    /// The first `k` primaries.
    pub fn prefix(&self, k: usize) -> Ledger {
        let mut out = self.empty_like();
        for e in self.primary.iter().take(k) {
            out.push(e.clone()).expect("subset of a valid ledger");
        }
        out
    }

    pub fn min_margin(&self) -> Option<RadicalSum> {
        self.primary.iter().filter_map(|e| e.margin.clone()).min()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = json!({
            "schema": LEDGER_SCHEMA,
            "ledger": self.name,
            "threshold_literal": self.threshold_literal,
            "threshold_exact": self.threshold.to_string(),
            "threshold_decimal": self.threshold.to_decimal(20, Rounding::Nearest).text,
            "transpose_closed": self.transpose_closed,
            "max_extension": self.max_extension,
        });
        out.push_str(&header.to_string());
        out.push('\n');
        for e in &self.primary {
            let line = EntryLine {
                word: word_to_string(e.word.digits()),
                pivot: e.word.pivot(),
                margin_exact: e.margin.as_ref().map(|m| m.to_string()),
                margin_decimal: e.margin.as_ref().map(|m| m.to_decimal(6, Rounding::Nearest).text),
                provenance: e.provenance,
            };
            out.push_str(&serde_json::to_string(&line).expect("plain data"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Ledger> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Preset("empty ledger file".into()))?;
        let h: HeaderLine = serde_json::from_str(head).map_err(|e| Error::Preset(format!("ledger header: {e}")))?;
        if h.schema != LEDGER_SCHEMA {
            return Err(Error::Preset(format!("unknown ledger schema {}", h.schema)));
        }
        let threshold: RadicalSum = h.threshold_exact.parse()?;
        let mut l = Ledger::new(&h.ledger, &h.threshold_literal, threshold, h.transpose_closed);
        l.max_extension = h.max_extension;
        for (i, line) in lines.enumerate() {
            let e: EntryLine =
                serde_json::from_str(line).map_err(|e| Error::Preset(format!("ledger line {}: {e}", i + 2)))?;
            let word = PointedWord::new(parse_word(&e.word)?, e.pivot)?;
            let margin = e.margin_exact.map(|m| m.parse()).transpose()?;
            l.push(LedgerEntry { word, margin, provenance: e.provenance })?;
        }
        Ok(l)
    }
}

#[derive(Serialize, Deserialize)]
struct EntryLine {
    word: String,
    pivot: usize,
    margin_exact: Option<String>,
    margin_decimal: Option<String>,
    provenance: Provenance,
}

#[derive(Deserialize)]
struct HeaderLine {
    schema: String,
    ledger: String,
    threshold_literal: String,
    threshold_exact: String,
    transpose_closed: bool,
    max_extension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecheckStatus {
    Ok,
    Assumed,
    /// Recomputed margin differs from the stored one.
    Mismatch { stored: RadicalSum, computed: RadicalSum },
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct RecheckLine {
    pub word: PointedWord,
    pub provenance: Provenance,
    pub status: RecheckStatus,
}

impl RecheckLine {
    pub fn passed(&self) -> bool {
        matches!(self.status, RecheckStatus::Ok | RecheckStatus::Assumed)
    }
}

/// Recompute every primary from scratch. Derived entries are rederived
/// against the entries that precede them.
pub fn recheck_ledger(ledger: &Ledger) -> Vec<RecheckLine> {
    use rayon::prelude::*;
    let opts = DeriveOptions { max_extension: ledger.max_extension, ..Default::default() };
    ledger
        .primaries()
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let computed = match e.provenance {
                Provenance::Assumed => {
                    return RecheckLine { word: e.word.clone(), provenance: e.provenance, status: RecheckStatus::Assumed }
                }
                Provenance::Certified => certify_forbidden(&e.word, &ledger.threshold)
                    .map(|c| c.margin)
                    .map_err(|f| f.to_string()),
                Provenance::Derived => derive_forbidden(&e.word, &ledger.prefix(i), &ledger.threshold, &opts)
                    .map(|c| c.margin)
                    .map_err(|f| f.to_string()),
            };
            let status = match (computed, &e.margin) {
                (Err(msg), _) => RecheckStatus::Failed(msg),
                (Ok(c), Some(s)) if &c == s => RecheckStatus::Ok,
                (Ok(c), Some(s)) => RecheckStatus::Mismatch { stored: s.clone(), computed: c },
                (Ok(_), None) => RecheckStatus::Failed("stored margin missing".into()),
            };
            RecheckLine { word: e.word.clone(), provenance: e.provenance, status }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Ledger {
        let mut l = Ledger::new("toy", "sqrt(12)", RadicalSum::sqrt_int(12), true);
        let w: PointedWord = "3*".parse().unwrap();
        let m = certify_forbidden(&w, &l.threshold).unwrap().margin;
        l.push(LedgerEntry { word: w, margin: Some(m), provenance: Provenance::Certified }).unwrap();
        let w: PointedWord = "12*".parse().unwrap();
        l.push(LedgerEntry { word: w, margin: None, provenance: Provenance::Assumed }).unwrap();
        l
    }

    #[test]
    fn transposes_are_implicit() {
        let l = toy();
        assert_eq!(l.primaries().len(), 2);
        assert_eq!(l.len(), 3);
        assert!(l.contains_word(&[2, 1]));
        assert!(l.without(&[vec![2, 1]]).primaries().len() == 1);
        assert!(l.first_occurrence(&[1, 1, 2, 1]).is_some());
        assert!(l.first_occurrence(&[1, 1, 1]).is_none());
    }

    #[test]
    fn jsonl_roundtrip() {
        let l = toy();
        let text = l.to_jsonl();
        assert_eq!(text.lines().count(), 3);
        let back = Ledger::from_jsonl(&text).unwrap();
        assert_eq!(back, l);
        assert!(recheck_ledger(&back).iter().all(|r| r.passed()));
    }

    #[test]
    fn duplicate_transpose_rejected() {
        let mut l = toy();
        let w: PointedWord = "21*".parse().unwrap();
        assert!(l.push(LedgerEntry { word: w, margin: None, provenance: Provenance::Assumed }).is_err());
    }

    #[test]
    fn tampered_margin_is_caught() {
        let l = toy();
        let text = l.to_jsonl().replacen("\"margin_exact\":\"", "\"margin_exact\":\"1/1000000 + ", 1);
        let bad = Ledger::from_jsonl(&text).unwrap();
        let r = recheck_ledger(&bad);
        assert!(matches!(r[0].status, RecheckStatus::Mismatch { .. }));
    }
}
