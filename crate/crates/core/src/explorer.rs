//! Possibility trees and forced extension.
//!
//! A tree grows a pointed window one letter on each side per level and
//! classifies every window with exact padded bounds: red when λ₀ is above
//! the band for every completion, blue when below, pruned when it contains a
//! ledger word, open otherwise. Propagation adds one letter at a time where
//! the ledger leaves a single admissible choice.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::lambda::{bound_pair, Side};
use crate::extremal::Template;
use crate::ledger::Ledger;
use crate::surd::{RadicalSum, Rounding};
use crate::words::{word_to_string, BiSeq, Digit, PointedWord, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    /// Every completion has λ₀ above the band.
    Red,
    /// Every completion has λ₀ below the band.
    Blue,
    /// Contains a ledger word.
    Pruned,
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub window: PointedWord,
    pub depth: usize,
    pub status: NodeStatus,
    pub lo: RadicalSum,
    pub hi: RadicalSum,
    /// Ledger word responsible for a pruned node.
    pub word: Option<Word>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
    pub threshold: RadicalSum,
    pub eps: RadicalSum,
    pub max_depth: usize,
    pub alphabet: Digit,
}

impl Tree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn open_leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].status == NodeStatus::Open && self.nodes[i].children.is_empty()).collect()
    }

    /// No open leaf at all.
    pub fn is_complete(&self) -> bool {
        self.open_leaves().is_empty()
    }

    pub fn count(&self, st: NodeStatus) -> usize {
        self.nodes.iter().filter(|n| n.status == st).count()
    }

    fn parent_map(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                p[c] = Some(i);
            }
        }
        p
    }

    /// Graphviz rendering; red/blue/black as in hand-drawn trees, grey for
    /// ledger-pruned windows.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph tree {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let color = match n.status {
                NodeStatus::Red => "red",
                NodeStatus::Blue => "blue",
                NodeStatus::Pruned => "gray50",
                NodeStatus::Open => "black",
            };
            let _ = writeln!(s, "  n{i} [label=\"{}\", color={color}, fontcolor={color}];", n.window);
        }
        for (i, n) in self.nodes.iter().enumerate() {
            for c in &n.children {
                let _ = writeln!(s, "  n{i} -> n{c};");
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .map(|n| {
                serde_json::json!({
                    "window": n.window.to_string(),
                    "depth": n.depth,
                    "status": n.status,
                    "lo": n.lo.to_string(),
                    "hi": n.hi.to_string(),
                    "lo_decimal": n.lo.to_decimal(15, Rounding::Nearest).text,
                    "hi_decimal": n.hi.to_decimal(15, Rounding::Nearest).text,
                    "ledger_word": n.word.as_ref().map(|w| word_to_string(w)),
                    "children": n.children,
                })
            })
            .collect();
        serde_json::json!({
            "threshold": self.threshold.to_string(),
            "eps": self.eps.to_string(),
            "max_depth": self.max_depth,
            "complete": self.is_complete(),
            "nodes": nodes,
        })
    }
}

fn classify(w: &PointedWord, ledger: &Ledger, lo_cut: &RadicalSum, hi_cut: &RadicalSum) -> (NodeStatus, RadicalSum, RadicalSum, Option<Word>) {
    let b = bound_pair(w);
    let status;
    let mut word = None;
    if &b.lo > hi_cut {
        status = NodeStatus::Red;
    } else if &b.hi < lo_cut {
        status = NodeStatus::Blue;
    } else if let Some(e) = ledger.first_occurrence(w.digits()) {
        status = NodeStatus::Pruned;
        word = Some(e.word.digits().to_vec());
    } else {
        status = NodeStatus::Open;
    }
    (status, b.lo, b.hi, word)
}

/// Two-sided expansion; children ordered by left letter, then right letter.
pub fn build_tree(root: &PointedWord, threshold: &RadicalSum, eps: &RadicalSum, ledger: &Ledger, max_depth: usize, alphabet: Digit) -> Tree {
    let lo_cut = threshold - eps;
    let hi_cut = threshold + eps;
    let (st, lo, hi, word) = classify(root, ledger, &lo_cut, &hi_cut);
    let mut nodes = vec![TreeNode { window: root.clone(), depth: 0, status: st, lo, hi, word, children: vec![] }];
    let mut frontier = if st == NodeStatus::Open { vec![0] } else { vec![] };
    for depth in 1..=max_depth {
        let jobs: Vec<(usize, PointedWord)> = frontier
            .iter()
            .flat_map(|&p| {
                let w = nodes[p].window.clone();
                (1..=alphabet).flat_map(move |l| {
                    let w = w.clone();
                    (1..=alphabet).map(move |r| (p, w.extend(Some(l), Some(r))))
                })
            })
            .collect();
        let done: Vec<_> = jobs.par_iter().map(|(_, w)| classify(w, ledger, &lo_cut, &hi_cut)).collect();
        let mut next = Vec::new();
        for ((p, w), (st, lo, hi, word)) in jobs.into_iter().zip(done) {
            let id = nodes.len();
            nodes.push(TreeNode { window: w, depth, status: st, lo, hi, word, children: vec![] });
            nodes[p].children.push(id);
            if st == NodeStatus::Open {
                next.push(id);
            }
        }
        frontier = next;
    }
    Tree { nodes, threshold: threshold.clone(), eps: eps.clone(), max_depth, alphabet }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniqueness {
    /// A single open chain from the root; the last window is forced.
    Unique { spine: Vec<PointedWord> },
    /// Every branch closed.
    Empty,
    NonUnique { leaves: Vec<PointedWord> },
}

/// Reads off the surviving windows of a tree.
pub fn local_uniqueness(tree: &Tree) -> Uniqueness {
    let leaves = tree.open_leaves();
    match leaves.len() {
        0 => Uniqueness::Empty,
        1 => {
            let parents = tree.parent_map();
            let mut spine = vec![tree.nodes[leaves[0]].window.clone()];
            let mut cur = leaves[0];
            while let Some(p) = parents[cur] {
                spine.push(tree.nodes[p].window.clone());
                cur = p;
            }
            spine.reverse();
            Uniqueness::Unique { spine }
        }
        _ => Uniqueness::NonUnique { leaves: leaves.iter().map(|&i| tree.nodes[i].window.clone()).collect() },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alternative {
    pub digit: Digit,
    /// The ledger word completed by this letter, when rejected outright.
    pub word: Option<String>,
    /// When the letter is admissible but on one side every continuation
    /// within the lookahead completes a ledger word: the words used.
    pub dead_end: Vec<String>,
}

impl Alternative {
    pub fn survives(&self) -> bool {
        self.word.is_none() && self.dead_end.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropagationStep {
    pub before: String,
    pub side: Side,
    pub forced: Digit,
    pub alternatives: Vec<Alternative>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Both sides admit at least two letters (or hit their arm limit).
    Branching,
    /// A side admits no letter.
    Contradiction,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationTrace {
    pub start: PointedWord,
    pub steps: Vec<PropagationStep>,
    pub window: PointedWord,
    pub stop: StopReason,
    pub contradiction: Option<Side>,
    pub lookahead: usize,
}

fn grow(w: &PointedWord, side: Side, d: Digit) -> PointedWord {
    match side {
        Side::Left => w.extend(Some(d), None),
        Side::Right => w.extend(None, Some(d)),
    }
}

/// First ledger word touching the letter just added on `side`.
fn edge_hit(cand: &PointedWord, side: Side, ledger: &Ledger) -> Option<Word> {
    let m = ledger.max_len().min(cand.len());
    let edge = match side {
        Side::Left => &cand.digits()[..m],
        Side::Right => &cand.digits()[cand.len() - m..],
    };
    ledger.first_occurrence(edge).map(|e| e.word.digits().to_vec())
}

/// `Ok` when some continuation of `depth` letters on `side` avoids the
/// ledger; otherwise the words that block all of them.
fn viable(w: &PointedWord, side: Side, ledger: &Ledger, alphabet: Digit, depth: usize) -> std::result::Result<(), Vec<Word>> {
    if depth == 0 {
        return Ok(());
    }
    let mut used = Vec::new();
    for d in 1..=alphabet {
        let c = grow(w, side, d);
        match edge_hit(&c, side, ledger) {
            Some(word) => used.push(word),
            None => match viable(&c, side, ledger, alphabet, depth - 1) {
                Ok(()) => return Ok(()),
                Err(ws) => used.extend(ws),
            },
        }
    }
    used.sort();
    used.dedup();
    Err(used)
}

/// Citations when the window cannot be continued on one of its sides.
fn dead_end(w: &PointedWord, ledger: &Ledger, alphabet: Digit, depth: usize) -> Option<Vec<Word>> {
    [Side::Left, Side::Right].into_iter().find_map(|s| viable(w, s, ledger, alphabet, depth).err())
}

fn parse_digits(s: &str) -> Word {
    s.bytes().map(|b| b - b'0').collect()
}

impl PropagationTrace {
    /// Every rejection holds using only the cited words, and each cited
    /// word is in the ledger.
    pub fn replay(&self, ledger: &Ledger) -> bool {
        let alphabet = self.steps.iter().map(|s| s.alternatives.len()).max().unwrap_or(3) as Digit;
        let mut w = self.start.clone();
        for st in &self.steps {
            if st.before != w.to_string() {
                return false;
            }
            for a in &st.alternatives {
                let cand = grow(&w, st.side, a.digit);
                if let Some(word) = &a.word {
                    let digits = parse_digits(word);
                    if !ledger.contains_word(&digits) || !cand.contains(&digits) {
                        return false;
                    }
                } else if !a.dead_end.is_empty() {
                    let mut cited = ledger.empty_like();
                    cited.transpose_closed = false;
                    for word in &a.dead_end {
                        let digits = parse_digits(word);
                        if !ledger.contains_word(&digits) {
                            return false;
                        }
                        let pw = PointedWord::new(digits, 0).expect("non-empty");
                        let _ = cited.push(crate::ledger::LedgerEntry { word: pw, margin: None, provenance: crate::ledger::Provenance::Assumed });
                    }
                    if dead_end(&cand, &cited, alphabet, self.lookahead).is_none() {
                        return false;
                    }
                } else if a.digit != st.forced || edge_hit(&cand, st.side, ledger).is_some() {
                    return false;
                }
            }
            w = grow(&w, st.side, st.forced);
        }
        w == self.window
    }
}

fn alternatives(w: &PointedWord, side: Side, ledger: &Ledger, opts: &PropagateOptions) -> Vec<Alternative> {
    (1..=opts.alphabet)
        .map(|d| {
            let cand = grow(w, side, d);
            let word = edge_hit(&cand, side, ledger);
            let dead_end = match word {
                Some(_) => vec![],
                None => dead_end(&cand, ledger, opts.alphabet, opts.lookahead).unwrap_or_default(),
            };
            Alternative {
                digit: d,
                word: word.map(|x| word_to_string(&x)),
                dead_end: dead_end.iter().map(|x| word_to_string(x)).collect(),
            }
        })
        .collect()
}

/// Limits on the arm lengths (letters left and right of the pivot).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arms {
    pub left: usize,
    pub right: usize,
}

impl Arms {
    pub const UNBOUNDED: Arms = Arms { left: usize::MAX, right: usize::MAX };
}

#[derive(Clone, Debug)]
pub struct PropagateOptions {
    pub arms: Arms,
    pub max_steps: usize,
    pub alphabet: Digit,
    /// A letter is also rejected when, on either side, every continuation
    /// of this many further letters completes a ledger word. Arm limits do
    /// not apply to the lookahead.
    pub lookahead: usize,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        PropagateOptions { arms: Arms::UNBOUNDED, max_steps: 10_000, alphabet: 3, lookahead: 2 }
    }
}

/// Forced extension, one letter per step, the side with fewer admissible
/// letters first (ties to the left).
pub fn propagate(window: &PointedWord, ledger: &Ledger, opts: &PropagateOptions) -> PropagationTrace {
    let mut w = window.clone();
    let mut steps = Vec::new();
    let done = |steps, w, stop, contradiction| PropagationTrace {
        start: window.clone(),
        steps,
        window: w,
        stop,
        contradiction,
        lookahead: opts.lookahead,
    };
    for _ in 0..opts.max_steps {
        let mut sides: Vec<(Side, Vec<Alternative>, usize)> = Vec::new();
        if w.left_arm() < opts.arms.left {
            let a = alternatives(&w, Side::Left, ledger, opts);
            let n = a.iter().filter(|x| x.survives()).count();
            sides.push((Side::Left, a, n));
        }
        if w.right_arm() < opts.arms.right {
            let a = alternatives(&w, Side::Right, ledger, opts);
            let n = a.iter().filter(|x| x.survives()).count();
            sides.push((Side::Right, a, n));
        }
        // stable sort keeps left first on ties
        sides.sort_by_key(|o| o.2);
        let Some((side, alts, n)) = sides.into_iter().next() else {
            return done(steps, w, StopReason::Branching, None);
        };
        if n == 0 {
            return done(steps, w, StopReason::Contradiction, Some(side));
        }
        if n > 1 {
            return done(steps, w, StopReason::Branching, None);
        }
        let forced = alts.iter().find(|a| a.survives()).unwrap().digit;
        steps.push(PropagationStep { before: w.to_string(), side, forced, alternatives: alts });
        w = grow(&w, side, forced);
    }
    done(steps, w, StopReason::Budget, None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SideOutcome {
    /// Forced forever: `per(block)` outward from `from` letters past the pivot.
    Periodic { block: Word, from: usize },
    /// Propagation stops with a choice after this many letters.
    Free { arm: usize },
    Contradiction,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replication {
    pub window: PointedWord,
    pub left: SideOutcome,
    pub right: SideOutcome,
    pub trace: PropagationTrace,
}

impl Replication {
    /// The whole sequence when both sides close periodically.
    pub fn sequence(&self) -> Option<BiSeq> {
        match (&self.left, &self.right) {
            (SideOutcome::Periodic { block: lb, from: lf }, SideOutcome::Periodic { block: rb, from: rf }) => {
                let p = self.window.pivot();
                let core = self.window.digits()[p - lf..=p + rf].to_vec();
                // left block is stored in outward order
                let mut l = lb.clone();
                l.reverse();
                BiSeq::new(l, core, rb.clone(), *lf as i64).ok()
            }
            _ => None,
        }
    }

    /// Periodic sides become tails, free sides stay open.
    pub fn template(&self) -> Template {
        let p = self.window.pivot();
        let d = self.window.digits();
        let (left, a) = match &self.left {
            SideOutcome::Periodic { block, from } => {
                let mut b = block.clone();
                b.reverse();
                (Some(b), p - from)
            }
            _ => (None, 0),
        };
        let (right, b) = match &self.right {
            SideOutcome::Periodic { block, from } => (Some(block.clone()), p + from + 1),
            _ => (None, d.len()),
        };
        Template { left, body: d[a..b].to_vec(), pivot: p - a, right }
    }

    /// `per(L) core …` style description of a one-sided result.
    pub fn describe(&self) -> String {
        if let Some(s) = self.sequence() {
            return s.to_string();
        }
        let p = self.window.pivot();
        let d = self.window.digits();
        let (lstr, a) = match &self.left {
            SideOutcome::Periodic { block, from } => {
                let mut b = block.clone();
                b.reverse();
                (format!("per({}) ", word_to_string(&b)), p - from)
            }
            _ => ("… ".to_string(), 0),
        };
        let (rstr, b) = match &self.right {
            SideOutcome::Periodic { block, from } => (format!(" per({})", word_to_string(block)), p + from + 1),
            _ => (" …".to_string(), d.len()),
        };
        let mid = PointedWord::new(d[a..b].to_vec(), p - a).map(|w| w.to_string()).unwrap_or_default();
        format!("{lstr}{mid}{rstr}")
    }
}

/// Propagate without arm limits and close each side once its boundary
/// state (the last `max_len − 1` letters) repeats.
pub fn replicate_to_period(window: &PointedWord, ledger: &Ledger, opts: &PropagateOptions) -> Replication {
    let k = ledger.max_len().saturating_sub(1).max(1);
    let mut w = window.clone();
    let mut all_steps = Vec::new();
    let mut seen_r: HashMap<Word, usize> = HashMap::new();
    let mut seen_l: HashMap<Word, usize> = HashMap::new();
    let mut left: Option<SideOutcome> = None;
    let mut right: Option<SideOutcome> = None;
    let mut stop = StopReason::Budget;
    let mut contradiction = None;
    let mut budget = opts.max_steps;
    while budget > 0 && (left.is_none() || right.is_none()) {
        if right.is_none() && w.right_arm() >= k {
            let st = w.digits()[w.len() - k..].to_vec();
            if let Some(&arm0) = seen_r.get(&st) {
                let p = w.pivot();
                let block = w.digits()[p + arm0 + 1..].to_vec();
                right = Some(SideOutcome::Periodic { block, from: arm0 });
            } else {
                seen_r.insert(st, w.right_arm());
            }
        }
        if left.is_none() && w.left_arm() >= k {
            let st = w.digits()[..k].to_vec();
            if let Some(&arm0) = seen_l.get(&st) {
                let p = w.pivot();
                let mut block = w.digits()[..p - arm0].to_vec();
                block.reverse();
                left = Some(SideOutcome::Periodic { block, from: arm0 });
            } else {
                seen_l.insert(st, w.left_arm());
            }
        }
        if left.is_some() && right.is_some() {
            break;
        }
        let arms = Arms {
            left: if left.is_some() { w.left_arm() } else { usize::MAX },
            right: if right.is_some() { w.right_arm() } else { usize::MAX },
        };
        let t = propagate(&w, ledger, &PropagateOptions { arms, max_steps: 1, ..opts.clone() });
        budget -= 1;
        match t.stop {
            StopReason::Budget => {
                all_steps.extend(t.steps);
                w = t.window;
            }
            StopReason::Branching => {
                // the less constrained side branches: it stays free
                let free_arm_l = w.left_arm();
                let free_arm_r = w.right_arm();
                if left.is_none() && right.is_none() {
                    left = Some(SideOutcome::Free { arm: free_arm_l });
                    right = Some(SideOutcome::Free { arm: free_arm_r });
                } else if left.is_none() {
                    left = Some(SideOutcome::Free { arm: free_arm_l });
                } else {
                    right = Some(SideOutcome::Free { arm: free_arm_r });
                }
                stop = StopReason::Branching;
            }
            StopReason::Contradiction => {
                contradiction = t.contradiction;
                match t.contradiction {
                    Some(Side::Left) => left = Some(SideOutcome::Contradiction),
                    _ => right = Some(SideOutcome::Contradiction),
                }
                stop = StopReason::Contradiction;
            }
        }
        if left.is_some() && right.is_none() || right.is_some() && left.is_none() {
            // one side settled; keep going on the other
            continue;
        }
    }
    let left = left.unwrap_or(SideOutcome::Budget);
    let right = right.unwrap_or(SideOutcome::Budget);
    if matches!(left, SideOutcome::Periodic { .. }) && matches!(right, SideOutcome::Periodic { .. }) {
        stop = StopReason::Branching;
    }
    let trace =
        PropagationTrace { start: window.clone(), steps: all_steps, window: w.clone(), stop, contradiction, lookahead: opts.lookahead };
    Replication { window: w, left, right, trace }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{LedgerEntry, Provenance};

    fn ledger(words: &[&str], closed: bool) -> Ledger {
        let mut l = Ledger::new("t", "0", RadicalSum::zero(), closed);
        for w in words {
            let w = PointedWord::new(parse_digits(w), 0).unwrap();
            l.push(LedgerEntry { word: w, margin: None, provenance: Provenance::Assumed }).unwrap();
        }
        l
    }

    fn opts(left: usize, right: usize, lookahead: usize) -> PropagateOptions {
        PropagateOptions { arms: Arms { left, right }, lookahead, ..Default::default() }
    }

    #[test]
    fn alternation_is_forced() {
        let l = ledger(&["3", "11", "22"], true);
        let t = propagate(&"2*".parse().unwrap(), &l, &opts(3, 3, 0));
        assert_eq!(t.window.to_string(), "1212*121");
        assert_eq!(t.stop, StopReason::Branching);
        assert!(t.replay(&l));
        let r = replicate_to_period(&"2*".parse().unwrap(), &l, &PropagateOptions::default());
        let s = r.sequence().expect("both sides close");
        for k in -4..4 {
            assert_eq!(crate::lambda::lambda(&s, k), crate::lambda::lambda(&BiSeq::periodic(&[2, 1], 0).unwrap(), k));
        }
    }

    #[test]
    fn lookahead_rejects_dead_ends() {
        // after a 1 nothing can follow on the right
        let l = ledger(&["3", "11", "12", "13"], false);
        let w: PointedWord = "2*".parse().unwrap();
        let t = propagate(&w, &l, &opts(0, 1, 0));
        assert_eq!(t.stop, StopReason::Branching);
        assert!(t.steps.is_empty());

        let t = propagate(&w, &l, &opts(0, 1, 2));
        assert_eq!(t.window.to_string(), "2*2");
        let one = &t.steps[0].alternatives[0];
        assert_eq!(one.digit, 1);
        assert!(one.word.is_none());
        assert_eq!(one.dead_end, ["11", "12", "3"]);
        assert!(t.replay(&l));
        // the cited words must all be in the ledger
        assert!(!t.replay(&ledger(&["3", "11", "13"], false)));
    }

    #[test]
    fn contradiction_names_the_side() {
        let l = ledger(&["1", "2", "3"], false);
        let t = propagate(&"2*".parse().unwrap(), &l, &opts(2, 2, 0));
        assert_eq!(t.stop, StopReason::Contradiction);
        assert_eq!(t.contradiction, Some(Side::Left));
    }
}
