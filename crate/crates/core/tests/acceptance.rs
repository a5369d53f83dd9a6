//! Acceptance run: one PASS/FAIL line per check, grouped by criterion.
//!
//! Exits non-zero when a check fails that is not in `KNOWN_FALSE`. Those are
//! stated values that the exact computation contradicts; each one prints the
//! exact value it found instead.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

use spectra_gap::presets::{parse_decimal, InequalityKind};
use spectra_gap::surd::Rounding;
use spectra_gap::words::transpose_word;
use spectra_gap::{
    check_inequalities, derive_forbidden, hausdorff_bound, verify_region, DeriveOptions, Ledger, PointedWord, Preset,
    RadicalSum, RegionBudgets, RegionReport,
};

use common::*;

/// Checks whose stated value disagrees with the exact one.
const KNOWN_FALSE: &[&str] = &[
    "omega2 j0 = 3.72627",
    "omega2 jp - j0 = 2.2055806e-12 +- 1e-18",
    "omega2 window 33*23 > 1e-2",
    "omega2 window 33332112{ws}{w} > 1e-10",
    "omega2 window {w}{ws}{w}2 > 9e-10",
    "omega2 window {w}{ws}{w}3 > 9e-10",
];

#[derive(Default)]
struct Tally {
    passed: usize,
    known: Vec<String>,
    unexpected: Vec<String>,
    recovered: Vec<String>,
}

impl Tally {
    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl AsRef<str>) {
        let name = name.into();
        let known = KNOWN_FALSE.contains(&name.as_str());
        let tag = match (ok, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as known false)",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("  [{tag}] {name}: {}", detail.as_ref());
        match (ok, known) {
            (true, false) => self.passed += 1,
            (true, true) => {
                self.passed += 1;
                self.recovered.push(name);
            }
            (false, true) => self.known.push(name),
            (false, false) => self.unexpected.push(name),
        }
    }
}

fn dec(x: &RadicalSum, digits: usize) -> String {
    x.to_decimal(digits, Rounding::Nearest).text
}

fn num(s: &str) -> RadicalSum {
    parse_decimal(s).unwrap()
}

fn within(x: &RadicalSum, target: &str, tol: &str) -> (bool, RadicalSum) {
    let diff = x - &num(target);
    (diff.abs() <= num(tol), diff)
}

/// `x − j0` against a stated value and tolerance.
fn offset_check(t: &mut Tally, region: &str, name: &str, x: &RadicalSum, target: &str, tol: &str) {
    let (ok, diff) = within(x, target, tol);
    t.check(
        format!("{region} {name} - j0 = {target} +- {tol}"),
        ok,
        format!("{} (off by {})", dec(x, 12), dec(&diff, 3)),
    );
}

/// Agreement at printed precision: the stated digits are a prefix of the
/// exact expansion, or the nearest rounding to that many digits.
fn printed(t: &mut Tally, name: &str, x: &RadicalSum, stated: &str, tol: Option<&str>) {
    let frac = stated.split_once('.').map_or(0, |(_, f)| f.len());
    let trunc = x.to_decimal(frac, Rounding::Truncate).text;
    let near = x.to_decimal(frac, Rounding::Nearest).text;
    let mut detail = format!("{} (truncated {trunc}, rounded {near})", dec(x, 14));
    if let Some(tol) = tol {
        let (ok, diff) = within(x, stated, tol);
        detail.push_str(&format!("; distance {} {} {tol}", dec(&diff.abs(), 3), if ok { "<=" } else { ">" }));
    }
    t.check(format!("{name} = {stated}"), trunc == stated || near == stated, detail);
}

fn base_for(ledger: &Ledger, w: &PointedWord) -> Ledger {
    let t = transpose_word(w.digits());
    match ledger.primaries().iter().position(|e| e.word.digits() == w.digits() || e.word.digits() == t.as_slice()) {
        Some(i) => ledger.prefix(i),
        None => ledger.clone(),
    }
}

fn run_property<S: Strategy>(t: &mut Tally, name: &str, cases: u32, strategy: S, f: impl Fn(S::Value) -> Check)
where
    S::Value: std::fmt::Debug,
{
    let start = Instant::now();
    let config = Config { cases, failure_persistence: None, max_global_rejects: 10 * cases, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let (ok, detail) = match runner.run(&strategy, f) {
        Ok(()) => (true, format!("{cases} cases in {:.1?}", start.elapsed())),
        Err(TestError::Fail(why, v)) => (false, format!("{why} on {v:?}")),
        Err(TestError::Abort(why)) => (false, format!("aborted: {why}")),
    };
    t.check(name, ok, detail);
}

struct Region {
    preset: Preset,
    ledger: Ledger,
    report: RegionReport,
}

fn region(name: &str) -> Region {
    let preset = Preset::load(name).unwrap();
    let ledger = preset.ledger().unwrap();
    let report = verify_region(&preset, &ledger, &RegionBudgets::default()).unwrap();
    Region { preset, ledger, report }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut t = Tally::default();
    let w1 = region("omega1");
    let w2 = region("omega2");
    let freiman = Preset::load("freiman").unwrap();
    let h = hausdorff_bound(&freiman, &freiman.ledger().unwrap()).unwrap();
    let off = |r: &Region, e: &str| r.report.endpoint(e).unwrap_or_else(|| panic!("{} has no endpoint {e}", r.preset.name)).offset.clone();

    println!("criterion 1: constants");
    printed(&mut t, "omega1 j0", &w1.preset.threshold, "3.6766994172", Some("5e-11"));
    printed(&mut t, "omega2 j0", &w2.preset.threshold, "3.72627", None);
    printed(&mut t, "b_inf", &h.b_inf, "3.2930442439", Some("5e-11"));

    println!("criterion 2: endpoints");
    offset_check(&mut t, "omega1", "j", &off(&w1, "j"), "8.32039e-12", "1e-16");
    offset_check(&mut t, "omega1", "J", &off(&w1, "J"), "8.42651e-12", "1e-16");
    let mm = w1.report.endpoint("J").and_then(|e| e.minimax.as_ref());
    t.check(
        "omega1 J minimax crossing at n* = 4",
        mm.is_some_and(|m| m.n_star == 4),
        mm.map_or("no minimax".into(), |m| format!("n* = {}", m.n_star)),
    );
    offset_check(&mut t, "omega2", "j", &off(&w2, "j"), "4.77646040e-13", "1e-20");
    offset_check(&mut t, "omega2", "jp", &off(&w2, "jp"), "2.2055806e-12", "1e-18");
    offset_check(&mut t, "omega2", "J", &off(&w2, "J"), "5.88429645e-11", "1e-18");
    for r in [&w1, &w2] {
        for c in r.report.checks.iter().filter(|c| c.name.starts_with("endpoint") || c.name == "accumulation witnesses") {
            t.check(format!("{} {}", r.preset.name, c.name), c.passed, &c.detail);
        }
    }

    println!("criterion 3: stated lower bounds");
    for r in [&w1, &w2] {
        for (c, spec) in check_inequalities(&r.preset, &r.ledger).unwrap().into_iter().zip(&r.preset.inequalities) {
            let kind = match c.kind {
                InequalityKind::Window => "window",
                InequalityKind::Sup => "sup",
            };
            let name = format!("{} {kind} {} > {}", r.preset.name, label(&r.preset, &c.word), spec.above);
            let mut detail = match &c.margin {
                Some(m) => format!("margin {}", dec(m, 4)),
                None => "no margin".into(),
            };
            if !c.detail.is_empty() {
                detail.push_str(&format!("; {}", c.detail));
            }
            if !c.passed && c.kind == InequalityKind::Window {
                // the bound may still hold for the sup, by case split
                let opts = DeriveOptions { max_extension: r.preset.max_extension, required_margin: c.above.clone() };
                match derive_forbidden(&c.word, &r.ledger, &r.preset.threshold, &opts) {
                    Ok(d) => detail.push_str(&format!("; m(S) bound holds against the ledger, margin {}", dec(&d.margin, 4))),
                    Err(e) => detail.push_str(&format!("; m(S) bound not derived: {e}")),
                }
            }
            t.check(name, c.passed, detail);
        }
    }
    t.check("freiman lower bracket", h.below.holds, format!("{} vs {}", dec(&h.below.value, 12), dec(&h.below.bound, 12)));
    t.check("freiman upper bracket", h.above.holds, format!("{} vs {}", dec(&h.above.value, 12), dec(&h.above.bound, 12)));

    println!("criterion 4: derived words");
    for r in [&w1, &w2] {
        for lit in ["3*22", "22*3", "3*23"] {
            let w: PointedWord = lit.parse().unwrap();
            let base = base_for(&r.ledger, &w);
            let res = derive_forbidden(&w, &base, &r.preset.threshold, &DeriveOptions { max_extension: r.preset.max_extension, ..Default::default() });
            let detail = match &res {
                Ok(d) => format!("from {} ledger words, {} leaves, margin {}", base.primaries().len(), d.leaves.len(), dec(&d.margin, 4)),
                Err(e) => e.to_string(),
            };
            t.check(format!("{} derive {}", r.preset.name, lit.replace('*', "")), res.is_ok(), detail);
        }
    }
    for lit in ["3*321111", "3*32112"] {
        let w: PointedWord = lit.parse().unwrap();
        let res = derive_forbidden(&w, &w1.ledger, &w1.preset.threshold, &DeriveOptions { max_extension: w1.preset.max_extension, ..Default::default() });
        let detail = match &res {
            Ok(d) => format!("{} leaves, depth {}, margin {}", d.leaves.len(), d.depth, dec(&d.margin, 4)),
            Err(e) => e.to_string(),
        };
        t.check(format!("omega1 derive {}", lit.replace('*', "")), res.is_ok(), detail);
    }

    println!("criterion 5: self-replication");
    for r in [&w1, &w2] {
        for c in r.report.checks.iter().filter(|c| {
            c.name.starts_with("propagate") || c.name.starts_with("replicate") || c.name == "local uniqueness" || c.name == "ledger recheck"
        }) {
            t.check(format!("{} {}", r.preset.name, c.name), c.passed, &c.detail);
        }
    }

    println!("criterion 6: Hausdorff bound");
    t.check("delta0 canonical form", h.closed_form_matches, h.delta0_canonical());
    let d = h.delta0.to_decimal(10, Rounding::Truncate).text;
    let dn = h.delta0.to_decimal(10, Rounding::Nearest).text;
    t.check("delta0 = 9.1094243388e-8", d == "9.1094243388e-8" || dn == "9.1094243388e-8", format!("{} ({d})", dec(&h.delta0, 14)));
    t.check("freiman inner minimum reproduced", h.m1_reproduced, h.m1_search.sequence.to_string());

    println!("criterion 7: region extras");
    let cmax_gap = |r: &Region| &r.report.endpoint("C-max").unwrap().value - &r.report.endpoint("j").unwrap().value;
    let (ok, diff) = within(&cmax_gap(&w1), "4.4064196e-14", "1e-18");
    t.check("omega1 C-max - j = 4.4064196e-14 +- 1e-18", ok, format!("{} (off by {})", dec(&cmax_gap(&w1), 10), dec(&diff, 3)));
    let (ok, diff) = within(&cmax_gap(&w2), "2.409522e-12", "1e-16");
    t.check("omega2 bracket width = 2.409522e-12 +- 1e-16", ok, format!("{} (off by {})", dec(&cmax_gap(&w2), 10), dec(&diff, 3)));
    for r in [&w1, &w2] {
        for c in r.report.checks.iter().filter(|c| c.name == "C maximum" || c.name == "listed members") {
            t.check(format!("{} {}", r.preset.name, c.name), c.passed, &c.detail);
        }
    }

    println!("criterion 8: properties");
    run_property(&mut t, "transpose and shift identities", 1000, (biseq(), -6i64..6, -6i64..6), |(s, k, j)| transpose_shift(&s, k, j));
    t.check("constant sequences", constant_sequences().is_ok(), "a = 1..9");
    run_property(&mut t, "bound pair sandwich, depth 6", 200, pointed(), |w| bound_sandwich(&w));
    run_property(&mut t, "extremal within exhaustive bracket", 50, instance(), |i| extremal_brackets(&i));
    run_property(&mut t, "markov_sup of periodic words", 200, (digits(6, 1), -3i64..3), |(b, p)| sup_of_periodic(&b, p));
    run_property(&mut t, "sign against 60-digit oracle", 10_000, sum_spec(), |s| sign_agrees(&s));

    println!("criterion 9: excluded");
    println!("  [SKIP] dimension theorems and HD(M\\L) bounds are out of scope; the property suites stand in");

    println!();
    println!(
        "{} passed, {} known false, {} unexpected failures ({:.1?})",
        t.passed,
        t.known.len(),
        t.unexpected.len(),
        start.elapsed()
    );
    for n in &t.recovered {
        println!("note: {n} is listed as known false but passed");
    }
    if t.unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for n in &t.unexpected {
            println!("unexpected failure: {n}");
        }
        ExitCode::FAILURE
    }
}

/// The word with occurrences of the region's word abbreviated to `{w}`, or
/// `{ws}` when the pivot falls inside.
fn label(p: &Preset, w: &PointedWord) -> String {
    let text = |d: &[u8]| -> String { d.iter().map(|&d| char::from(b'0' + d)).collect() };
    let mut s = text(w.digits());
    s.insert(w.pivot() + 1, '*');
    let word = text(&p.word);
    for k in 0..word.len() {
        let mut starred = word.clone();
        starred.insert(k + 1, '*');
        s = s.replace(&starred, "{ws}");
    }
    s.replace(&word, "{w}")
}
