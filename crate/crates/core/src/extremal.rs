//! Extremal λ over ledger-admissible completions.
//!
//! For one free side, `[a_0; a_1, …]` is monotone in each digit with sign
//! `(-1)^t`, and two infinite sequences compare by their first difference.
//! So the optimum is the sequence that, depth by depth, takes the preferred
//! digit among those whose automaton state stays live. The choice depends
//! only on (state, depth parity), hence the optimal tail is eventually
//! periodic and closes at the first repeated pair.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::lambda::lambda0;
use crate::ledger::Ledger;
use crate::surd::RadicalSum;
use crate::words::{primitive_root, transpose_word, word_to_string, BiSeq, Digit, Literal, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Min,
    Max,
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Direction::Min),
            "max" => Ok(Direction::Max),
            _ => Err(Error::Parse { pos: 0, msg: format!("direction must be min or max, got {s}") }),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Min => "min",
            Direction::Max => "max",
        })
    }
}

/// A pointed body with optional periodic tails; a missing tail is free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub left: Option<Word>,
    pub body: Word,
    pub pivot: usize,
    pub right: Option<Word>,
}

impl Template {
    pub fn from_literal(l: Literal) -> Result<Template> {
        let pivot = l.pivot.ok_or_else(|| Error::Parse { pos: 0, msg: "template needs a '*'".into() })?;
        if l.body.is_empty() {
            return Err(Error::Parse { pos: 0, msg: "template needs a body".into() });
        }
        Ok(Template { left: l.left, body: l.body, pivot, right: l.right })
    }

    pub fn transpose(&self) -> Template {
        Template {
            left: self.right.as_ref().map(|w| transpose_word(w)),
            body: transpose_word(&self.body),
            pivot: self.body.len() - 1 - self.pivot,
            right: self.left.as_ref().map(|w| transpose_word(w)),
        }
    }

    pub fn with_pivot(&self, pivot: usize) -> Template {
        Template { pivot, ..self.clone() }
    }

    /// Shortest body: minimal tail blocks, boundary letters absorbed into
    /// the tails while the pivot stays in the body.
    pub fn normalized(&self) -> Template {
        let mut t = self.clone();
        t.left = t.left.map(|l| primitive_root(&l));
        t.right = t.right.map(|r| primitive_root(&r));
        while let Some(l) = t.left.as_mut() {
            if t.pivot == 0 || t.body[0] != l[0] {
                break;
            }
            t.body.remove(0);
            t.pivot -= 1;
            l.rotate_left(1);
        }
        while let Some(r) = t.right.as_mut() {
            if t.pivot + 1 >= t.body.len() || t.body.last() != r.last() {
                break;
            }
            t.body.pop();
            r.rotate_right(1);
        }
        t
    }

    pub fn append(&self, w: &[Digit]) -> Template {
        let mut t = self.clone();
        t.body.extend_from_slice(w);
        t
    }
}

impl FromStr for Template {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Template::from_literal(s.parse()?)
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.left {
            write!(f, "per({}) ", word_to_string(l))?;
        } else {
            f.write_str("… ")?;
        }
        for (i, d) in self.body.iter().enumerate() {
            write!(f, "{d}")?;
            if i == self.pivot {
                f.write_str("*")?;
            }
        }
        match &self.right {
            Some(r) => write!(f, " per({})", word_to_string(r)),
            None => f.write_str(" …"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtremalOptions {
    pub alphabet: Digit,
    /// Only this many fixed digits next to the free side take part in
    /// ledger matching, and words inside them are ignored; `None` means all
    /// fixed digits, which must then be admissible themselves.
    pub context: Option<usize>,
    pub max_steps: usize,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        ExtremalOptions { alphabet: 3, context: None, max_steps: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rejection {
    /// Completes this ledger word.
    Forbidden { word: String },
    /// Admissible now, but every continuation runs into the ledger.
    DeadEnd,
    /// Admissible, but the chosen digit is preferred at this depth.
    Dominated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision {
    /// Position relative to the pivot.
    pub offset: i64,
    pub chosen: Digit,
    pub rejected: Vec<(Digit, Rejection)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalResult {
    pub sequence: BiSeq,
    pub value: RadicalSum,
    pub direction: Direction,
    pub decisions: Vec<Decision>,
    /// False when both sides were free and a ledger word could span the
    /// whole body; the two sides were then optimized one after the other.
    pub decoupled: bool,
}

struct Tail {
    prefix: Word,
    block: Word,
    decisions: Vec<Decision>,
}

fn preference(dir: Direction, depth: usize, amax: Digit) -> Vec<Digit> {
    let small_first = depth.is_multiple_of(2) == (dir == Direction::Min);
    if small_first {
        (1..=amax).collect()
    } else {
        (1..=amax).rev().collect()
    }
}

/// Greedy optimal right tail after `context`, first free digit at `depth`.
/// With `scoped`, words lying inside `context` are not checked; only
/// occurrences reaching the free digits count.
fn greedy_right(aut: &Automaton, context: &[Digit], depth: usize, dir: Direction, scoped: bool, max_steps: usize) -> Result<Tail> {
    let mut s = if scoped {
        context.iter().fold(aut.start(), |s, &d| aut.step(s, d))
    } else {
        aut.run(aut.start(), context).map_err(|(_, w)| {
            Error::Inconsistent(format!("fixed part contains ledger word {}", word_to_string(&w)))
        })?
    };
    if !(1..=aut.alphabet()).any(|d| aut.is_live(aut.step(s, d))) {
        return Err(Error::Inconsistent("fixed part admits no ledger-consistent continuation".into()));
    }
    let mut digits = Vec::new();
    let mut decisions = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for step in 0..max_steps {
        let t = depth + step;
        if let Some(&i0) = seen.get(&(s, t % 2)) {
            let block = digits.split_off(i0);
            return Ok(Tail { prefix: digits, block, decisions });
        }
        seen.insert((s, t % 2), step);
        let mut chosen = None;
        let mut rejected = Vec::new();
        for d in preference(dir, t, aut.alphabet()) {
            let ns = aut.step(s, d);
            if chosen.is_some() {
                rejected.push((d, Rejection::Dominated));
            } else if let Some(w) = aut.matched(ns) {
                rejected.push((d, Rejection::Forbidden { word: word_to_string(w) }));
            } else if !aut.is_live(ns) {
                rejected.push((d, Rejection::DeadEnd));
            } else {
                chosen = Some((d, ns));
            }
        }
        let (d, ns) = chosen.expect("live state has a live successor");
        decisions.push(Decision { offset: t as i64, chosen: d, rejected });
        digits.push(d);
        s = ns;
    }
    Err(Error::Undecided { depth: max_steps, open: 1, example: "no periodic closure".into() })
}

fn repeat_to(block: &[Digit], n: usize) -> Word {
    block.iter().copied().cycle().take(n.max(block.len())).collect()
}

/// Context for a free right side: the last fixed digits.
fn right_context(t: &Template, min_len: usize, scope: Option<usize>) -> Word {
    let mut ctx = match &t.left {
        Some(l) => {
            let reps = min_len / l.len() + 2;
            let mut c: Word = l.iter().copied().cycle().take(reps * l.len()).collect();
            c.extend_from_slice(&t.body);
            c
        }
        None => t.body.clone(),
    };
    if let Some(c) = scope {
        ctx = ctx.split_off(ctx.len().saturating_sub(c));
    }
    ctx
}

fn words_of(ledger: &Ledger, transpose: bool) -> Vec<Word> {
    ledger.words().into_iter().map(|w| if transpose { transpose_word(&w) } else { w }).collect()
}

/// Optimize λ at the template pivot over admissible completions of the free
/// side(s).
pub fn extremal(t: &Template, ledger: &Ledger, dir: Direction, opts: &ExtremalOptions) -> Result<ExtremalResult> {
    let lmax = ledger.max_len();
    let right_free = t.right.is_none();
    let left_free = t.left.is_none();
    let fwd = Automaton::new(&words_of(ledger, false), opts.alphabet);
    let rev = Automaton::new(&words_of(ledger, true), opts.alphabet);
    let mut decisions = Vec::new();
    let mut cur = t.clone();
    if right_free {
        let ctx = right_context(&cur, lmax, opts.context);
        let depth = cur.body.len() - cur.pivot;
        let tail = greedy_right(&fwd, &ctx, depth, dir, opts.context.is_some(), opts.max_steps)?;
        decisions.extend(tail.decisions);
        cur = cur.append(&tail.prefix);
        cur.right = Some(tail.block);
    }
    if left_free {
        let tt = cur.transpose();
        let ctx = right_context(&tt, lmax, opts.context);
        let depth = tt.body.len() - tt.pivot;
        let tail = greedy_right(&rev, &ctx, depth, dir, opts.context.is_some(), opts.max_steps)?;
        decisions.extend(tail.decisions.into_iter().map(|mut d| {
            d.offset = -d.offset;
            d
        }));
        let mut tt = tt.append(&tail.prefix);
        tt.right = Some(tail.block);
        cur = tt.transpose();
    }
    if !right_free && !left_free {
        let ctx = right_context(&cur, lmax, None);
        let mut all = ctx.clone();
        all.extend(repeat_to(cur.right.as_ref().unwrap(), lmax + cur.right.as_ref().unwrap().len()));
        if let Err((_, w)) = fwd.run(fwd.start(), &all) {
            return Err(Error::Inconsistent(format!("sequence contains ledger word {}", word_to_string(&w))));
        }
    }
    let decoupled = !(right_free && left_free) || lmax <= t.body.len() + 1;
    let sequence = BiSeq::new(
        cur.left.clone().expect("left fixed"),
        cur.body.clone(),
        cur.right.clone().expect("right fixed"),
        cur.pivot as i64,
    )?;
    let value = lambda0(&sequence);
    Ok(ExtremalResult { sequence, value, direction: dir, decisions, decoupled })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimaxRow {
    pub n: usize,
    /// Minimum of λ at the first pivot.
    pub low: ExtremalResult,
    /// Maximum of λ at the second pivot.
    pub high: ExtremalResult,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimaxResult {
    pub n_star: usize,
    /// `min_n max(low_n, high_n)` over the computed rows.
    pub value: RadicalSum,
    pub sequence: BiSeq,
    pub rows: Vec<MinimaxRow>,
    /// `low_n` nondecreasing and `high_n` nonincreasing on the rows.
    pub monotone: bool,
}

/// Two-pivot competition: append the first `n` letters of `per(filler)` to
/// the template body, minimize λ at `pivot_a` and maximize λ at `pivot_b`
/// (offsets from the template pivot), and stop at the first crossing.
pub fn minimax_endpoint(
    base: &Template,
    filler: &[Digit],
    pivot_a: i64,
    pivot_b: i64,
    ledger: &Ledger,
    max_n: usize,
    opts: &ExtremalOptions,
) -> Result<MinimaxResult> {
    if base.right.is_some() {
        return Err(Error::Inconsistent("minimax template needs a free right side".into()));
    }
    let at = |off: i64| -> Result<usize> {
        let p = base.pivot as i64 + off;
        if p < 0 || p >= base.body.len() as i64 {
            return Err(Error::Pivot { pivot: p.max(0) as usize, len: base.body.len() });
        }
        Ok(p as usize)
    };
    let (pa, pb) = (at(pivot_a)?, at(pivot_b)?);
    let mut rows: Vec<MinimaxRow> = Vec::new();
    for n in 0..=max_n {
        let t = base.append(&repeat_to(filler, n)[..n]);
        let low = extremal(&t.with_pivot(pa), ledger, Direction::Min, opts)?;
        let high = extremal(&t.with_pivot(pb), ledger, Direction::Max, opts)?;
        let crossed = low.value >= high.value;
        rows.push(MinimaxRow { n, low, high });
        if crossed {
            let monotone = rows.windows(2).all(|w| w[0].low.value <= w[1].low.value && w[0].high.value >= w[1].high.value);
            let (value, sequence) = rows
                .iter()
                .map(|r| if r.low.value >= r.high.value { (&r.low.value, &r.low.sequence) } else { (&r.high.value, &r.high.sequence) })
                .min_by(|a, b| a.0.cmp(b.0))
                .map(|(v, s)| (v.clone(), s.clone()))
                .unwrap();
            return Ok(MinimaxResult { n_star: n, value, sequence, rows, monotone });
        }
    }
    Err(Error::Undecided { depth: max_n, open: 1, example: "no crossing of the two pivots".into() })
}
