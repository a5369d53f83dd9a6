//! Forbidden-word certificates.
//!
//! A pointed word is forbidden for a threshold when every completion has
//! λ₀ above it; the exact inf of λ₀ is the low end of [`bound_pair`], so the
//! single-window test is `lo > threshold`. Words that fail it can still be
//! derived by splitting on one-letter extensions until each branch contains a
//! ledger word or certifies at some position.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambda::{bound_pair, BoundPair};
use crate::ledger::Ledger;
use crate::surd::{RadicalSum, Rounding};
use crate::words::{word_to_string, BiSeq, Digit, PointedWord};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenCert {
    pub word: PointedWord,
    pub threshold: RadicalSum,
    pub bound: BoundPair,
    /// `bound.lo − threshold`, always positive.
    pub margin: RadicalSum,
}

/// Failure of the single-window test, with the completion that defeats it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertFailure {
    pub word: PointedWord,
    pub lo: RadicalSum,
    pub witness: BiSeq,
}

impl std::fmt::Display for CertFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} is not forbidden by itself: completion {} has λ₀ at or below the threshold", self.word, self.witness)
    }
}

pub fn certify_forbidden(w: &PointedWord, threshold: &RadicalSum) -> std::result::Result<ForbiddenCert, CertFailure> {
    let bound = bound_pair(w);
    let margin = &bound.lo - threshold;
    if margin.sign() > 0 {
        Ok(ForbiddenCert { word: w.clone(), threshold: threshold.clone(), bound, margin })
    } else {
        Err(CertFailure { word: w.clone(), lo: bound.lo.clone(), witness: bound.lo_witness })
    }
}

/// Largest single-window margin over every pivot position of `digits`.
pub fn best_position_margin(digits: &[Digit], threshold: &RadicalSum) -> (usize, RadicalSum) {
    let mut best: Option<(usize, RadicalSum)> = None;
    for k in 0..digits.len() {
        let w = PointedWord::new(digits.to_vec(), k).expect("non-empty");
        let m = &bound_pair(&w).lo - threshold;
        if best.as_ref().is_none_or(|(_, b)| &m > b) {
            best = Some((k, m));
        }
    }
    best.expect("non-empty word")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeafReason {
    /// Contains this ledger word.
    Ledger { word: String, margin: String },
    /// Single-window certificate at this position of the leaf window.
    Position { pivot: usize, margin: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeriveLeaf {
    pub window: PointedWord,
    pub margin: RadicalSum,
    pub reason: LeafReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedCert {
    pub word: PointedWord,
    pub threshold: RadicalSum,
    /// Minimum of the leaf margins: every completion has m(S) above
    /// threshold + margin.
    pub margin: RadicalSum,
    pub leaves: Vec<DeriveLeaf>,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct DeriveOptions {
    /// Maximum number of letters added to the seed along any branch.
    pub max_extension: usize,
    /// A leaf only closes with a margin strictly above this.
    pub required_margin: RadicalSum,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        DeriveOptions { max_extension: 12, required_margin: RadicalSum::zero() }
    }
}

struct Closer<'a> {
    ledger: &'a Ledger,
    threshold: &'a RadicalSum,
    required: &'a RadicalSum,
    cache: std::sync::Mutex<HashMap<PointedWord, Option<DeriveLeaf>>>,
}

impl Closer<'_> {
    fn close(&self, w: &PointedWord) -> Option<DeriveLeaf> {
        if let Some(hit) = self.cache.lock().unwrap().get(w) {
            return hit.clone();
        }
        let mut best: Option<DeriveLeaf> = None;
        for e in self.ledger.occurrences(w.digits()) {
            let Some(m) = &e.margin else { continue };
            if m > self.required && best.as_ref().is_none_or(|b| m > &b.margin) {
                best = Some(DeriveLeaf {
                    window: w.clone(),
                    margin: m.clone(),
                    reason: LeafReason::Ledger { word: word_to_string(e.word.digits()), margin: m.to_string() },
                });
            }
        }
        let (k, m) = best_position_margin(w.digits(), self.threshold);
        if &m > self.required && best.as_ref().is_none_or(|b| m > b.margin) {
            best = Some(DeriveLeaf {
                window: w.clone(),
                margin: m.clone(),
                reason: LeafReason::Position { pivot: k, margin: m.to_string() },
            });
        }
        self.cache.lock().unwrap().insert(w.clone(), best.clone());
        best
    }
}

const LETTERS: [Digit; 3] = [1, 2, 3];

/// Case split on one-letter extensions; each branch must close.
pub fn derive_forbidden(
    seed: &PointedWord,
    ledger: &Ledger,
    threshold: &RadicalSum,
    opts: &DeriveOptions,
) -> Result<DerivedCert> {
    let ledger = ledger.without(&[seed.digits().to_vec()]);
    let closer = Closer { ledger: &ledger, threshold, required: &opts.required_margin, cache: Default::default() };
    let mut leaves = Vec::new();
    let mut frontier = vec![seed.clone()];
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let closed: Vec<Option<DeriveLeaf>> = frontier.par_iter().map(|w| closer.close(w)).collect();
        let mut open = Vec::new();
        for (w, c) in frontier.into_iter().zip(closed) {
            match c {
                Some(leaf) => leaves.push(leaf),
                None => open.push(w),
            }
        }
        if open.is_empty() {
            break;
        }
        if depth >= opts.max_extension {
            return Err(Error::Undecided { depth, open: open.len(), example: open[0].to_string() });
        }
        for w in open {
            let lefts: Vec<PointedWord> = LETTERS.iter().map(|&d| w.extend(Some(d), None)).collect();
            let rights: Vec<PointedWord> = LETTERS.iter().map(|&d| w.extend(None, Some(d))).collect();
            let open_count = |ws: &[PointedWord]| ws.par_iter().filter(|c| closer.close(c).is_none()).count();
            let (ol, or) = (open_count(&lefts), open_count(&rights));
            next.extend(if ol <= or { lefts } else { rights });
        }
        frontier = next;
        depth += 1;
    }
    let margin = leaves.iter().map(|l| l.margin.clone()).min().expect("at least one leaf");
    Ok(DerivedCert { word: seed.clone(), threshold: threshold.clone(), margin, leaves, depth })
}

/// Human-readable margin, e.g. for CLI tables.
pub fn margin_text(m: &RadicalSum) -> String {
    m.to_decimal(6, Rounding::Nearest).text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_digit_is_never_forbidden() {
        let w: PointedWord = "1*".parse().unwrap();
        let err = certify_forbidden(&w, &RadicalSum::sqrt_int(5)).unwrap_err();
        assert!(crate::lambda::lambda0(&err.witness) <= RadicalSum::sqrt_int(5));
    }

    #[test]
    fn three_beats_sqrt_twelve() {
        // any sequence with a 3 has λ > 3 + 2·(1/4) > √12
        let w: PointedWord = "3*".parse().unwrap();
        let c = certify_forbidden(&w, &RadicalSum::sqrt_int(12)).unwrap();
        assert!(c.margin.sign() > 0);
    }
}
