//! Region verification: uniqueness, replication, endpoints, members and
//! accumulation witnesses, assembled into one report; plus the lower bound
//! for the distance between the two spectra in the Freiman interval.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::explorer::{
    build_tree, local_uniqueness, propagate, replicate_to_period, Arms, NodeStatus, PropagateOptions, PropagationTrace,
    Replication, Uniqueness,
};
use crate::extremal::{extremal, minimax_endpoint, Direction, ExtremalOptions, ExtremalResult, MinimaxResult, Template};
use crate::lambda::{lambda0, markov_sup, SupResult};
use crate::ledger::{recheck_ledger, Ledger, RecheckLine, RecheckStatus};
use crate::certifier::{certify_forbidden, derive_forbidden, DeriveOptions};
use crate::presets::{parse_decimal, radical_fraction, EndpointKind, InequalityKind, Preset};
use crate::surd::{RadicalSum, Rounding};
use crate::words::{find_subword, parse_word, transpose_word, word_to_string, BiSeq, Digit, Literal, PointedWord, Word};

pub const REPORT_SCHEMA: &str = "spectra-gap/region-report/1";
pub const HAUSDORFF_SCHEMA: &str = "spectra-gap/hausdorff/1";

/// Analytic steps the report relies on but does not check.
pub const CITED_PREMISES: [&str; 2] = [
    "Markov values of periodic sequences are dense in the Lagrange spectrum",
    "limsup bookkeeping: a sequence realizing a Lagrange value has arbitrarily long windows near the value",
];

fn dec(x: &RadicalSum, digits: usize) -> String {
    x.to_decimal(digits, Rounding::Nearest).text
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug)]
pub struct EndpointValue {
    pub name: String,
    pub sequence: BiSeq,
    pub value: RadicalSum,
    /// `value − j₀`.
    pub offset: RadicalSum,
    pub sup: SupResult,
    pub extremal: Option<ExtremalResult>,
    pub minimax: Option<MinimaxResult>,
    /// Words of the search ledger, for the consistency check.
    pub search_words: Vec<Word>,
    /// Pivot-relative start of the free part and the context length, when
    /// the search was scoped to one free side.
    pub scope: Option<Scope>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scope {
    pub side: crate::lambda::Side,
    /// First free position (right side) or last free position plus one
    /// (left side), relative to the pivot.
    pub boundary: i64,
    pub context: usize,
}

impl EndpointValue {
    /// No word of the search ledger occurs in the sequence; with a scope,
    /// only occurrences inside the context plus free part that reach the
    /// free part count.
    pub fn ledger_consistent(&self) -> bool {
        let Some(sc) = self.scope else {
            return self.search_words.iter().all(|w| !self.sequence.contains(w));
        };
        let s = &self.sequence;
        let span = (s.core().len() + 2 * (s.left_block().len() + s.right_block().len())) as i64;
        let m = self.search_words.iter().map(|w| w.len()).max().unwrap_or(0) as i64;
        let c = sc.context as i64;
        let (a, b) = match sc.side {
            crate::lambda::Side::Right => (sc.boundary - c, sc.boundary + span + m),
            crate::lambda::Side::Left => (sc.boundary - span - m, sc.boundary + c),
        };
        let win = s.window_rel(a, b);
        let fixed = c as usize;
        self.search_words.iter().all(|w| {
            (0..=win.len().saturating_sub(w.len())).all(|i| {
                if win[i..i + w.len()] != w[..] {
                    return true;
                }
                // occurrences inside the context alone are ignored
                match sc.side {
                    crate::lambda::Side::Right => i + w.len() <= fixed,
                    crate::lambda::Side::Left => i >= win.len() - fixed,
                }
            })
        })
    }
}

fn search_ledger(p: &Preset, ledger: &Ledger, drop: &[String], constraints: Option<&str>) -> Result<Ledger> {
    match constraints {
        Some(c) => p.constraint_set(c),
        None => Ok(ledger.without(&p.special_words(drop)?)),
    }
}

/// Runs the named endpoint search of a preset.
pub fn compute_endpoint(p: &Preset, ledger: &Ledger, name: &str) -> Result<EndpointValue> {
    let spec = p.endpoint(name)?;
    let search = search_ledger(p, ledger, &spec.drop, spec.constraints.as_deref())?;
    let template = Template::from_literal(p.literal(&spec.template)?)?;
    let opts = ExtremalOptions { alphabet: p.alphabet, context: spec.context, ..Default::default() };
    let (sequence, value, ex, mm) = match spec.kind {
        EndpointKind::Extremal => {
            let dir: Direction = spec.direction.parse()?;
            let r = extremal(&template, &search, dir, &opts)?;
            (r.sequence.clone(), r.value.clone(), Some(r), None)
        }
        EndpointKind::Minimax => {
            let filler = parse_word(spec.filler.as_deref().unwrap_or_default())?;
            let [a, b] = spec.pivots.ok_or_else(|| Error::Preset(format!("{name}: minimax needs pivots")))?;
            let r = minimax_endpoint(&template, &filler, a, b, &search, spec.max_n.unwrap_or(16), &opts)?;
            (r.sequence.clone(), r.value.clone(), None, Some(r))
        }
    };
    let sup = markov_sup(&sequence);
    let offset = &value - &p.threshold;
    let scope = spec.context.and_then(|context| match (&template.left, &template.right) {
        (Some(_), None) => Some(Scope {
            side: crate::lambda::Side::Right,
            boundary: (template.body.len() - template.pivot) as i64,
            context,
        }),
        (None, Some(_)) => Some(Scope { side: crate::lambda::Side::Left, boundary: -(template.pivot as i64), context }),
        _ => None,
    });
    Ok(EndpointValue {
        name: name.to_string(),
        sequence,
        value,
        offset,
        sup,
        extremal: ex,
        minimax: mm,
        search_words: search.entries().iter().map(|e| e.word.digits().to_vec()).collect(),
        scope,
    })
}

/// Outcome of one stated lower bound.
#[derive(Clone, Debug)]
pub struct InequalityCheck {
    pub word: PointedWord,
    pub kind: InequalityKind,
    pub above: RadicalSum,
    /// The certified margin over j₀, when the certificate exists.
    pub margin: Option<RadicalSum>,
    pub passed: bool,
    pub detail: String,
}

/// Checks every stated bound of the preset. Window bounds use the
/// single-window certificate; sup bounds a case split whose leaves must
/// each exceed the stated margin, against the ledger entries preceding
/// the word (or the whole ledger when the word is not an entry).
pub fn check_inequalities(p: &Preset, ledger: &Ledger) -> Result<Vec<InequalityCheck>> {
    let mut out = Vec::new();
    for spec in &p.inequalities {
        let word = p.pointed(&spec.word)?;
        let above = parse_decimal(&spec.above)?;
        let (margin, detail) = match spec.kind {
            InequalityKind::Window => match certify_forbidden(&word, &p.threshold) {
                Ok(c) => (Some(c.margin), String::new()),
                Err(f) => (None, f.to_string()),
            },
            InequalityKind::Sup => {
                let base = match ledger.primaries().iter().position(|e| e.word.digits() == word.digits()) {
                    Some(i) => ledger.prefix(i),
                    None => ledger.clone(),
                };
                let opts = DeriveOptions { max_extension: p.max_extension, required_margin: above.clone() };
                match derive_forbidden(&word, &base, &p.threshold, &opts) {
                    Ok(c) => (Some(c.margin), format!("{} leaves, depth {}", c.leaves.len(), c.depth)),
                    Err(e) => (None, e.to_string()),
                }
            }
        };
        let passed = margin.as_ref().is_some_and(|m| m > &above);
        out.push(InequalityCheck { word, kind: spec.kind, above, margin, passed, detail });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct MemberCert {
    pub kind: String,
    pub sequence: BiSeq,
    pub value: RadicalSum,
    pub sup: SupResult,
    pub in_range: bool,
    pub accepted: bool,
    pub reason: Option<String>,
}

/// `m(S) = λ₀(S)` and `lo < λ₀(S) < hi`.
pub fn certify_member(kind: &str, s: &BiSeq, lo: &RadicalSum, hi: &RadicalSum) -> MemberCert {
    let value = lambda0(s);
    let sup = markov_sup(s);
    let at_pivot = sup.attained && sup.value == value;
    let in_range = lo < &value && &value < hi;
    let reason = if !at_pivot {
        Some(match sup.argmax {
            Some(k) => format!("sup exceeds λ₀ at position {k}"),
            None => "sup not attained".to_string(),
        })
    } else if !in_range {
        Some("value outside the interval".to_string())
    } else {
        None
    };
    MemberCert { kind: kind.to_string(), sequence: s.clone(), value, sup, in_range, accepted: reason.is_none(), reason }
}

fn finite_cf(digits: &[Digit]) -> BigRational {
    // [0; d1, …, dn]
    let mut x = BigRational::zero();
    for &d in digits.iter().rev() {
        x = (BigRational::from_integer(BigInt::from(d)) + x).recip();
    }
    x
}

/// Exact test of `[0; s] ≤ [0; sᵀ]`.
pub fn d_condition(s: &[Digit]) -> bool {
    finite_cf(s) <= finite_cf(&transpose_word(s))
}

/// Members listed in the preset, D middles filtered by the exact
/// condition, plus C members generated from its templates.
pub fn sample_region_members(p: &Preset, lo: &RadicalSum, hi: &RadicalSum) -> Result<Vec<MemberCert>> {
    let mut out = Vec::new();
    for m in &p.members {
        if let Some(lit) = &m.literal {
            out.push(certify_member(&m.kind, &p.biseq(lit)?, lo, hi));
        }
        if let (Some(pre), Some(suf)) = (&m.prefix, &m.suffix) {
            for mid in &m.middles {
                let s = parse_word(mid)?;
                if !d_condition(&s) {
                    continue;
                }
                if let (Some(c), Some(chk)) = (&m.constraints, &m.check) {
                    let words = p.constraint_set(c)?.words();
                    let w = p.plain_word(&chk.replace("{s}", mid))?;
                    if words.iter().any(|f| find_subword(&w, f).is_some()) {
                        continue;
                    }
                }
                let lit = format!("{} {} {}", p.expand(pre), mid, p.expand(suf));
                out.push(certify_member(&m.kind, &lit.parse()?, lo, hi));
            }
        }
    }
    out.extend(generate_c_members(p, lo, hi, 3, 2)?);
    Ok(out)
}

fn words_up_to(n: usize, amax: Digit) -> Vec<Word> {
    let mut all = vec![vec![]];
    let mut layer: Vec<Word> = vec![vec![]];
    for _ in 0..n {
        layer = layer.iter().flat_map(|w| (1..=amax).map(move |d| [w.clone(), vec![d]].concat())).collect();
        all.extend(layer.iter().cloned());
    }
    all
}

/// Fills the free side of each C-template with `u per(b)` for short `u`,
/// `b`, keeps the completions avoiding the constraint set and certifies them.
pub fn generate_c_members(p: &Preset, lo: &RadicalSum, hi: &RadicalSum, max_u: usize, max_b: usize) -> Result<Vec<MemberCert>> {
    let Some(spec) = p.endpoints.iter().find(|e| e.constraints.is_some() && e.name.starts_with('C')) else {
        return Ok(vec![]);
    };
    let constraints = p.constraint_set(spec.constraints.as_deref().unwrap())?;
    let words: Vec<Word> = constraints.entries().iter().map(|e| e.word.digits().to_vec()).collect();
    let t = Template::from_literal(p.literal(&spec.template)?)?;
    let ctx = spec.context.unwrap_or(t.body.len());
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let blocks: Vec<Word> = words_up_to(max_b, p.alphabet).into_iter().filter(|b| !b.is_empty()).collect();
    for u in words_up_to(max_u, p.alphabet) {
        for b in &blocks {
            let s = if t.right.is_none() {
                BiSeq::new(t.left.clone().unwrap(), [t.body.clone(), u.clone()].concat(), b.clone(), t.pivot as i64)
            } else {
                let mut ur = u.clone();
                ur.reverse();
                BiSeq::new(b.clone(), [ur, t.body.clone()].concat(), t.right.clone().unwrap(), (t.pivot + u.len()) as i64)
            }?;
            let reach = constraints.max_len() + 2 * b.len();
            // pivot-relative, half-open
            let free: Word = if t.right.is_none() {
                let first_free = (t.body.len() - t.pivot) as i64;
                s.window_rel(first_free - ctx as i64, first_free + (u.len() + reach) as i64)
            } else {
                let body_start = -(t.pivot as i64);
                s.window_rel(body_start - (u.len() + reach) as i64, body_start + ctx as i64)
            };
            if words.iter().any(|w| find_subword(&free, w).is_some()) || !seen.insert(s.to_string()) {
                continue;
            }
            out.push(certify_member("C", &s, lo, hi));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub n: usize,
    pub sequence: BiSeq,
    pub value: RadicalSum,
    pub sup: SupResult,
    /// `value − upper`.
    pub gap: RadicalSum,
    pub valid: bool,
}

/// Periodic witnesses `per(left^n middle right^n)` accumulating on an
/// endpoint.
pub fn lprime_witnesses(p: &Preset, upper: &RadicalSum, n_min: usize, n_max: usize) -> Result<Vec<Witness>> {
    let spec = p.witnesses.as_ref().ok_or_else(|| Error::Preset(format!("{}: no witness family", p.name)))?;
    (n_min..=n_max)
        .map(|n| {
            let lit = format!("per({}{}{})", p.expand(&spec.left).repeat(n), p.expand(&spec.middle), p.expand(&spec.right).repeat(n));
            let s: BiSeq = lit.parse()?;
            let value = lambda0(&s);
            let sup = markov_sup(&s);
            let valid = sup.attained && sup.value == value;
            Ok(Witness { n, gap: &value - upper, sequence: s, value, sup, valid })
        })
        .collect()
}

/// Strictly increasing (`Some(true)`), strictly decreasing (`Some(false)`)
/// or neither.
pub fn monotone_direction(xs: &[RadicalSum]) -> Option<bool> {
    if xs.windows(2).all(|w| w[0] < w[1]) {
        Some(true)
    } else if xs.windows(2).all(|w| w[0] > w[1]) {
        Some(false)
    } else {
        None
    }
}

#[derive(Clone, Debug)]
pub struct RegionBudgets {
    /// Overrides the preset's tree depth.
    pub tree_depth: Option<usize>,
    pub propagate_steps: usize,
    /// Dead-end lookahead for propagation.
    pub lookahead: usize,
    pub witness_n: usize,
}

impl Default for RegionBudgets {
    fn default() -> Self {
        RegionBudgets { tree_depth: None, propagate_steps: 10_000, lookahead: 2, witness_n: 6 }
    }
}

#[derive(Clone, Debug)]
pub struct TreeSummary {
    pub root: String,
    pub depth: usize,
    pub nodes: usize,
    pub red: usize,
    pub blue: usize,
    pub pruned: usize,
    pub open_leaves: usize,
    pub uniqueness: Uniqueness,
}

#[derive(Clone, Debug)]
pub struct RegionReport {
    pub preset: String,
    pub word: Word,
    pub j0: RadicalSum,
    pub ledger: Ledger,
    pub recheck: Vec<RecheckLine>,
    pub tree: Option<TreeSummary>,
    pub propagations: Vec<(String, PropagationTrace)>,
    pub replications: Vec<(String, Replication)>,
    pub endpoints: Vec<EndpointValue>,
    pub members: Vec<MemberCert>,
    pub witnesses: Vec<Witness>,
    pub checks: Vec<Check>,
}

impl RegionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn endpoint(&self, name: &str) -> Option<&EndpointValue> {
        self.endpoints.iter().find(|e| e.name == name)
    }

    /// `J − j₀`.
    pub fn gap_width(&self) -> Option<RadicalSum> {
        self.endpoint("J").map(|e| e.offset.clone())
    }

    pub fn to_json(&self, digits: usize) -> Value {
        let ep: Vec<Value> = self
            .endpoints
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "sequence": e.sequence.to_string(),
                    "value_exact": e.value.to_string(),
                    "value_decimal": dec(&e.value, digits),
                    "offset_decimal": e.offset.to_decimal(digits, Rounding::Nearest).text,
                    "ledger_consistent": e.ledger_consistent(),
                    "sup_at_pivot": e.sup.attained && e.sup.value == e.value,
                    "minimax_n": e.minimax.as_ref().map(|m| m.n_star),
                })
            })
            .collect();
        let members: Vec<Value> = self
            .members
            .iter()
            .map(|m| {
                json!({
                    "kind": m.kind,
                    "sequence": m.sequence.to_string(),
                    "value_decimal": dec(&m.value, digits),
                    "accepted": m.accepted,
                    "reason": m.reason,
                })
            })
            .collect();
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|w| {
                json!({
                    "n": w.n,
                    "sequence": w.sequence.to_string(),
                    "value_exact": w.value.to_string(),
                    "value_decimal": dec(&w.value, digits),
                    "gap_decimal": w.gap.to_decimal(digits, Rounding::Nearest).text,
                    "valid": w.valid,
                })
            })
            .collect();
        let recheck: Vec<Value> = self
            .recheck
            .iter()
            .map(|r| json!({"word": r.word.to_string(), "provenance": r.provenance, "passed": r.passed()}))
            .collect();
        let tree = self.tree.as_ref().map(|t| {
            let spine = match &t.uniqueness {
                Uniqueness::Unique { spine } => json!(spine.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
                _ => Value::Null,
            };
            json!({
                "root": t.root, "depth": t.depth, "nodes": t.nodes, "red": t.red, "blue": t.blue,
                "pruned": t.pruned, "open_leaves": t.open_leaves, "spine": spine,
            })
        });
        let props: Vec<Value> = self
            .propagations
            .iter()
            .map(|(n, t)| json!({"name": n, "start": t.start.to_string(), "window": t.window.to_string(), "steps": t.steps, "stop": t.stop}))
            .collect();
        let reps: Vec<Value> =
            self.replications.iter().map(|(n, r)| json!({"name": n, "result": r.describe(), "steps": r.trace.steps.len()})).collect();
        let checks: Vec<Value> =
            self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect();
        json!({
            "schema": REPORT_SCHEMA,
            "preset": self.preset,
            "word": word_to_string(&self.word),
            "j0_exact": self.j0.to_string(),
            "j0_decimal": dec(&self.j0, digits),
            "gap_width_decimal": self.gap_width().map(|g| g.to_decimal(digits, Rounding::Nearest).text),
            "ledger": {"name": self.ledger.name, "entries": self.ledger.primaries().len(), "recheck": recheck},
            "tree": tree,
            "propagations": props,
            "replications": reps,
            "endpoints": ep,
            "members": members,
            "witnesses": witnesses,
            "checks": checks,
            "cited_premises": CITED_PREMISES,
            "status": if self.passed() { "premises-verified" } else { "failed" },
        })
    }
}

fn expected_template(p: &Preset, s: &str) -> Result<Template> {
    let text = p.expand(s);
    let left_free = text.trim_start().starts_with('…');
    let right_free = text.trim_end().ends_with('…');
    let l: Literal = text.replace('…', " ").parse()?;
    let mut t = if l.body.is_empty() {
        // lone per(w*): unroll one period into the body
        let b = l.left.clone().unwrap();
        Template { left: Some(b.clone()), body: b.clone(), pivot: l.pivot.unwrap(), right: Some(b) }
    } else {
        Template::from_literal(l)?
    };
    if left_free {
        t.left = None;
    }
    if right_free {
        t.right = None;
    }
    Ok(t.normalized())
}

/// Full pipeline for a region preset against a given ledger.
pub fn verify_region(p: &Preset, ledger: &Ledger, budgets: &RegionBudgets) -> Result<RegionReport> {
    for spec in &p.ledger_spec {
        let w = p.plain_word(&spec.word)?;
        if !ledger.contains_word(&w) {
            return Err(Error::Inconsistent(format!("ledger {} is missing the certificate for {}", ledger.name, spec.word)));
        }
    }
    let recheck = recheck_ledger(ledger);
    if let Some(bad) = recheck.iter().find(|r| !r.passed()) {
        let why = match &bad.status {
            RecheckStatus::Failed(m) => m.clone(),
            RecheckStatus::Mismatch { stored, computed } => format!("stored margin {stored}, recomputed {computed}"),
            _ => String::new(),
        };
        return Err(Error::Inconsistent(format!("certificate for {} does not hold: {why}", bad.word)));
    }
    let mut checks = vec![Check::new("ledger recheck", true, format!("{} entries", recheck.len()))];

    let tree = match &p.tree {
        Some(ts) => {
            let root = p.pointed(&ts.root)?;
            let depth = budgets.tree_depth.unwrap_or(ts.depth);
            let t = build_tree(&root, &p.threshold, &RadicalSum::zero(), ledger, depth, p.alphabet);
            let u = local_uniqueness(&t);
            let want = p.pointed(&ts.window)?;
            let ok = matches!(&u, Uniqueness::Unique { spine } if spine.last() == Some(&want));
            let detail = match &u {
                Uniqueness::Unique { spine } => format!("single open chain ending at {}", spine.last().unwrap()),
                Uniqueness::Empty => "no open window".to_string(),
                Uniqueness::NonUnique { leaves } => format!("{} open windows, e.g. {}", leaves.len(), leaves[0]),
            };
            checks.push(Check::new("local uniqueness", ok, detail));
            Some(TreeSummary {
                root: root.to_string(),
                depth,
                nodes: t.nodes.len(),
                red: t.count(NodeStatus::Red),
                blue: t.count(NodeStatus::Blue),
                pruned: t.count(NodeStatus::Pruned),
                open_leaves: t.open_leaves().len(),
                uniqueness: u,
            })
        }
        None => None,
    };

    let mut propagations = Vec::new();
    for ps in &p.propagate {
        let l = ledger.without(&p.special_words(&ps.drop)?);
        let w = p.pointed(&ps.window)?;
        let opts = PropagateOptions {
            arms: Arms { left: ps.arms[0], right: ps.arms[1] },
            max_steps: budgets.propagate_steps,
            alphabet: p.alphabet,
            lookahead: budgets.lookahead,
        };
        let t = propagate(&w, &l, &opts);
        let want = p.pointed(&ps.expect)?;
        let ok = t.window == want && t.replay(&l);
        checks.push(Check::new(format!("propagate {}", ps.name), ok, format!("{} -> {}", t.start, t.window)));
        propagations.push((ps.name.clone(), t));
    }

    let mut replications = Vec::new();
    for rs in &p.replicate {
        let l = ledger.without(&p.special_words(&rs.drop)?);
        let w = p.pointed(&rs.window)?;
        let opts = PropagateOptions {
            max_steps: budgets.propagate_steps,
            alphabet: p.alphabet,
            lookahead: budgets.lookahead,
            ..Default::default()
        };
        let r = replicate_to_period(&w, &l, &opts);
        let want = expected_template(p, &rs.expect)?;
        let ok = r.template().normalized() == want && r.trace.replay(&l);
        checks.push(Check::new(format!("replicate {}", rs.name), ok, r.describe()));
        replications.push((rs.name.clone(), r));
    }

    let mut endpoints = Vec::new();
    for e in &p.endpoints {
        let v = compute_endpoint(p, ledger, &e.name)?;
        let reparsed: BiSeq = v.sequence.to_string().parse()?;
        checks.push(Check::new(
            format!("endpoint {}", e.name),
            v.ledger_consistent() && lambda0(&reparsed) == v.value,
            format!("{} = j0 + {}", v.sequence, v.offset.to_decimal(8, Rounding::Nearest).text),
        ));
        endpoints.push(v);
    }
    let order: Vec<&EndpointValue> =
        ["j", "jp", "J"].iter().filter_map(|n| endpoints.iter().find(|e| &e.name == n)).collect();
    if !order.is_empty() {
        let ok = order[0].value > p.threshold && order.windows(2).all(|w| w[0].value < w[1].value);
        let names: Vec<&str> = order.iter().map(|e| e.name.as_str()).collect();
        checks.push(Check::new("endpoint order", ok, format!("j0 < {}", names.join(" < "))));
    }

    let lo = endpoints.iter().find(|e| e.name == "j").map(|e| e.value.clone()).unwrap_or_else(|| p.threshold.clone());
    let hi = endpoints.iter().find(|e| e.name == "J").map(|e| e.value.clone());
    let members = match &hi {
        Some(hi) => {
            let mut ms = sample_region_members(p, &p.threshold, hi)?;
            // listed members must sit above j as well
            for m in ms.iter_mut() {
                if m.accepted && m.value <= lo && m.kind != "C" {
                    m.accepted = false;
                    m.reason = Some("value not above j".into());
                }
            }
            ms
        }
        None => vec![],
    };
    if !members.is_empty() {
        let listed = members.iter().filter(|m| m.kind != "C" || p.members.iter().any(|s| s.kind == "C")).count();
        let bad: Vec<String> = p
            .members
            .iter()
            .filter_map(|s| s.literal.as_ref())
            .filter_map(|l| p.biseq(l).ok())
            .filter(|s| members.iter().any(|m| &m.sequence == s && !m.accepted))
            .map(|s| s.to_string())
            .collect();
        checks.push(Check::new(
            "listed members",
            bad.is_empty(),
            if bad.is_empty() { format!("{listed} sampled") } else { format!("rejected: {}", bad.join(", ")) },
        ));
    }
    if let Some(cmax) = endpoints.iter().find(|e| e.name == "C-max") {
        let gen: Vec<&MemberCert> = members.iter().filter(|m| m.kind == "C" && m.accepted).collect();
        let ok = gen.iter().all(|m| m.value <= cmax.value) && cmax.sup.attained && cmax.sup.value == cmax.value;
        checks.push(Check::new("C maximum", ok, format!("{} accepted C members at or below {}", gen.len(), cmax.sequence)));
    }

    let mut witnesses = Vec::new();
    if let (Some(ws), Some(_)) = (&p.witnesses, &hi) {
        let upper = endpoints.iter().find(|e| e.name == ws.upper).map(|e| e.value.clone()).unwrap();
        witnesses = lprime_witnesses(p, &upper, 2, budgets.witness_n.max(2))?;
        let vals: Vec<RadicalSum> = witnesses.iter().map(|w| w.value.clone()).collect();
        let gaps: Vec<RadicalSum> = witnesses.iter().map(|w| w.gap.abs()).collect();
        let dir = monotone_direction(&vals);
        let shrinking = monotone_direction(&gaps) == Some(false);
        let valid = witnesses.iter().all(|w| w.valid);
        let detail = format!(
            "{} witnesses, values {}, gap to {} shrinking: {shrinking}",
            witnesses.len(),
            match dir {
                Some(true) => "increasing",
                Some(false) => "decreasing",
                None => "not monotone",
            },
            ws.upper
        );
        checks.push(Check::new("accumulation witnesses", valid && dir.is_some() && shrinking, detail));
    }

    Ok(RegionReport {
        preset: p.name.clone(),
        word: p.word.clone(),
        j0: p.threshold.clone(),
        ledger: ledger.clone(),
        recheck,
        tree,
        propagations,
        replications,
        endpoints,
        members,
        witnesses,
        checks,
    })
}

#[derive(Clone, Debug)]
pub struct Bracket {
    pub sequence: BiSeq,
    pub value: RadicalSum,
    /// The bound it is compared with.
    pub bound: RadicalSum,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct HausdorffBound {
    pub b_inf: RadicalSum,
    pub b_sup: RadicalSum,
    pub m1: RadicalSum,
    pub midpoint: RadicalSum,
    pub eps0: RadicalSum,
    pub delta0: RadicalSum,
    pub m1_sequence: BiSeq,
    /// The greedy search over the constrained left side.
    pub m1_search: ExtremalResult,
    pub m1_reproduced: bool,
    pub below: Bracket,
    pub above: Bracket,
    pub closed_form: RadicalSum,
    pub closed_form_matches: bool,
}

impl HausdorffBound {
    pub fn passed(&self) -> bool {
        self.m1_reproduced && self.below.holds && self.above.holds && self.closed_form_matches && self.delta0.sign() > 0
    }

    /// `δ₀` over a common denominator: (radicand, integer coefficient) pairs.
    pub fn delta0_canonical(&self) -> String {
        canonical_text(&self.delta0)
    }

    pub fn to_json(&self, digits: usize) -> Value {
        let sci = |x: &RadicalSum| x.to_decimal(digits, Rounding::Nearest).text;
        json!({
            "schema": HAUSDORFF_SCHEMA,
            "b_inf": {"exact": self.b_inf.to_string(), "decimal": dec(&self.b_inf, digits)},
            "B_inf": {"exact": self.b_sup.to_string(), "decimal": dec(&self.b_sup, digits)},
            "midpoint": dec(&self.midpoint, digits),
            "m1": {"sequence": self.m1_sequence.to_string(), "exact": self.m1.to_string(), "decimal": dec(&self.m1, digits), "reproduced": self.m1_reproduced},
            "eps0": sci(&self.eps0),
            "delta0": {"exact": self.delta0.to_string(), "canonical": self.delta0_canonical(), "decimal": sci(&self.delta0)},
            "below": {"sequence": self.below.sequence.to_string(), "decimal": dec(&self.below.value, digits), "holds": self.below.holds},
            "above": {"sequence": self.above.sequence.to_string(), "decimal": dec(&self.above.value, digits), "holds": self.above.holds},
            "closed_form_matches": self.closed_form_matches,
        })
    }
}

/// `(c₁ + c₂√d₂ + …)/q` with integer `cᵢ` and squarefree `dᵢ`.
pub fn canonical_text(x: &RadicalSum) -> String {
    let (terms, den) = x.common_denominator();
    let mut s = String::from("(");
    for (i, (d, c)) in terms.iter().enumerate() {
        let neg = c < &BigInt::zero();
        let a = if neg { -c.clone() } else { c.clone() };
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        if d.is_one() {
            s.push_str(&a.to_string());
        } else {
            s.push_str(&format!("{a}·sqrt({d})"));
        }
    }
    s.push_str(&format!(")/{den}"));
    s
}

/// δ₀ from the Freiman preset.
pub fn hausdorff_bound(p: &Preset, ledger: &Ledger) -> Result<HausdorffBound> {
    let h = p.hausdorff.as_ref().ok_or_else(|| Error::Preset(format!("{}: no hausdorff section", p.name)))?;
    let b_inf = lambda0(&p.biseq(&h.lower)?);
    let b_sup = lambda0(&p.biseq(&h.upper)?);
    let midpoint = (&b_inf + &b_sup).scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
    let m1_sequence = p.biseq(&h.expect_inner)?;
    let m1 = lambda0(&m1_sequence);
    let t = Template::from_literal(p.literal(&h.inner)?)?;
    let opts = ExtremalOptions { alphabet: p.alphabet, context: h.context, ..Default::default() };
    let m1_search = extremal(&t, ledger, Direction::Min, &opts)?;
    let m1_reproduced = m1_search.sequence == m1_sequence && m1_search.value == m1;
    let bracket = |lit: &str, slack: &str, below: bool| -> Result<Bracket> {
        let sequence = p.biseq(lit)?;
        let value = lambda0(&sequence);
        let s = parse_decimal(slack)?;
        let bound = if below { &midpoint - &s } else { &midpoint + &s };
        let holds = if below { value <= bound } else { value >= bound };
        Ok(Bracket { sequence, value, bound, holds })
    };
    let below = bracket(&h.below, &h.below_slack, true)?;
    let above = bracket(&h.above, &h.above_slack, false)?;
    let closed_form = radical_fraction(&h.delta_numerator, &h.delta_denominator)?;
    let delta0 = &b_sup - &m1;
    let eps0 = &m1 - &midpoint;
    Ok(HausdorffBound {
        closed_form_matches: delta0 == closed_form,
        b_inf,
        b_sup,
        m1,
        midpoint,
        eps0,
        delta0,
        m1_sequence,
        m1_search,
        m1_reproduced,
        below,
        above,
        closed_form,
    })
}
