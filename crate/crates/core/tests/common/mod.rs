//! Property checks shared by the property suite and the acceptance run.
//! Each oracle computes its answer by a route independent of the code under
//! test.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use spectra_gap::automaton::Automaton;
use spectra_gap::lambda::{left_value, right_extremes};
use spectra_gap::words::find_subword;
use spectra_gap::{
    bound_pair, extremal, lambda, lambda0, markov_sup, BiSeq, Digit, Direction, ExtremalOptions, Ledger, LedgerEntry,
    PointedWord, Provenance, QuadSurd, RadicalSum, Template, Word,
};

pub type Check = Result<(), TestCaseError>;

pub fn digits(max_len: usize, min_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1u8..=3, min_len..=max_len)
}

pub fn biseq() -> impl Strategy<Value = BiSeq> {
    (digits(3, 1), digits(5, 0), digits(3, 1), -4i64..8)
        .prop_map(|(l, c, r, p)| BiSeq::new(l, c, r, p).expect("valid blocks"))
}

pub fn pointed() -> impl Strategy<Value = PointedWord> {
    digits(5, 1).prop_flat_map(|d| {
        let n = d.len();
        (Just(d), 0..n).prop_map(|(d, p)| PointedWord::new(d, p).unwrap())
    })
}

/// `λ_k(Sᵀ) = λ_{−k}(S)` and `λ_k(shift_j S) = λ_{k+j}(S)`.
pub fn transpose_shift(s: &BiSeq, k: i64, j: i64) -> Check {
    prop_assert_eq!(lambda(&s.transpose(), k), lambda(s, -k), "transpose of {} at {}", s, k);
    prop_assert_eq!(lambda(&s.shift(j), k), lambda(s, k + j), "shift of {} by {} at {}", s, j, k);
    Ok(())
}

pub fn constant_sequences() -> Check {
    for a in 1u8..=9 {
        let s = BiSeq::periodic(&[a], 0).unwrap();
        let a = a as u64;
        prop_assert_eq!(lambda0(&s), RadicalSum::sqrt_int(a * a + 4));
    }
    Ok(())
}

fn value_of(left: &[Digit], w: &PointedWord, right: &[Digit]) -> RadicalSum {
    lambda0(&BiSeq::from_pointed(left, w, right).unwrap())
}

/// Every completion adding three letters on each side (six in all) to the
/// word, closed with constant tails, lies inside the pair, and the pair's
/// witnesses attain it.
pub fn bound_sandwich(w: &PointedWord) -> Check {
    let b = bound_pair(w);
    prop_assert_eq!(lambda0(&b.lo_witness), b.lo.clone());
    prop_assert_eq!(lambda0(&b.hi_witness), b.hi.clone());
    prop_assert!(b.lo < b.hi);
    let ext: Vec<[Digit; 3]> =
        (0..27).map(|c| [(c % 3 + 1) as Digit, (c / 3 % 3 + 1) as Digit, (c / 9 + 1) as Digit]).collect();
    for l in &ext {
        for r in &ext {
            let v = w.extend_left_by(l).extend_right_by(r);
            for (lt, rt) in [([1u8], [3u8]), ([3], [1]), ([2], [2])] {
                let x = value_of(&lt, &v, &rt);
                prop_assert!(b.lo <= x && x <= b.hi, "{} {:?}|{:?}", w, l, r);
            }
        }
    }
    Ok(())
}

/// Rotation values straight from the periodic continued fractions.
pub fn periodic_max(block: &[Digit]) -> RadicalSum {
    let n = block.len();
    (0..n)
        .map(|i| {
            let mut right = block[i..].to_vec();
            right.extend_from_slice(&block[..i]);
            // letters before position i, read outward
            let left: Vec<Digit> = (1..=n).map(|t| block[(i + n * 2 - t) % n]).collect();
            &QuadSurd::periodic_cf(&right).to_radical_sum() + &QuadSurd::periodic_cf(&left).recip().to_radical_sum()
        })
        .max()
        .unwrap()
}

pub fn sup_of_periodic(block: &[Digit], pivot: i64) -> Check {
    let s = BiSeq::periodic(block, pivot).unwrap();
    let m = markov_sup(&s);
    prop_assert!(m.attained);
    prop_assert_eq!(m.value, periodic_max(block), "per({:?})", block);
    Ok(())
}

/// A small extremal instance: `per(left) body` with the right side free.
#[derive(Clone, Debug)]
pub struct Instance {
    pub left: Word,
    pub body: Word,
    pub pivot: usize,
    pub words: Vec<Word>,
    pub dir: Direction,
}

pub fn instance() -> impl Strategy<Value = Instance> {
    (digits(2, 1), digits(4, 1), any::<prop::sample::Index>(), prop::collection::vec(digits(4, 2), 2..6), any::<bool>())
        .prop_map(|(left, body, ix, words, max)| {
            let pivot = ix.index(body.len());
            let mut fixed: Word = left.iter().cycle().take(8).copied().collect();
            fixed.extend_from_slice(&body);
            // the fixed part itself must stay admissible
            let words = words.into_iter().filter(|w| find_subword(&fixed, w).is_none()).collect();
            Instance { left, body, pivot, words, dir: if max { Direction::Max } else { Direction::Min } }
        })
}

fn ledger_of(words: &[Word]) -> Ledger {
    let mut l = Ledger::new("instance", "0", RadicalSum::zero(), false);
    for w in words {
        let e = LedgerEntry { word: PointedWord::new(w.clone(), 0).unwrap(), margin: None, provenance: Provenance::Assumed };
        let _ = l.push(e);
    }
    l
}

/// The greedy optimum lies in the bracket given by all admissible, live
/// extensions of the right side up to a window of 14 letters: between the
/// best inner bound and the best outer bound.
pub fn extremal_brackets(inst: &Instance) -> Check {
    let ledger = ledger_of(&inst.words);
    let t = Template { left: Some(inst.left.clone()), body: inst.body.clone(), pivot: inst.pivot, right: None };
    let r = match extremal(&t, &ledger, inst.dir, &ExtremalOptions::default()) {
        Ok(r) => r,
        Err(_) => return Err(TestCaseError::reject("no admissible completion")),
    };
    for w in &inst.words {
        prop_assert!(!r.sequence.contains(w), "{} contains {:?}", r.sequence, w);
    }

    let aut = Automaton::new(&inst.words, 3);
    let mut fixed: Word = inst.left.iter().cycle().take(8).copied().collect();
    fixed.extend_from_slice(&inst.body);
    let start = aut.run(aut.start(), &fixed).expect("fixed part admissible");
    let seq = BiSeq::new(inst.left.clone(), inst.body.clone(), vec![1], inst.pivot as i64).unwrap();
    let left = left_value(&seq, seq.pivot()).to_radical_sum();
    let depth = 14usize.saturating_sub(inst.body.len());
    let max = inst.dir == Direction::Max;

    // best inner and outer bounds over the leaves; inner = the bound on the
    // optimizing side
    let mut best: Option<(RadicalSum, RadicalSum)> = None;
    let mut stack = vec![(inst.body[inst.pivot..].to_vec(), start, 0usize)];
    while let Some((right, state, n)) = stack.pop() {
        let (lo, hi) = right_extremes(&right, 3);
        let (lo, hi) = (&lo.to_radical_sum() + &left, &hi.to_radical_sum() + &left);
        let (inner, outer) = if max { (hi, lo) } else { (lo, hi) };
        if let Some((_, bo)) = &best {
            // this subtree can neither improve the outer bound nor hold the inner one
            if (!max && &inner > bo) || (max && &inner < bo) {
                continue;
            }
        }
        if n == depth {
            best = Some(match best {
                None => (inner, outer),
                Some((bi, bo)) => {
                    if max {
                        (bi.max(inner), bo.max(outer))
                    } else {
                        (bi.min(inner), bo.min(outer))
                    }
                }
            });
            continue;
        }
        for d in 1..=3u8 {
            let s = aut.step(state, d);
            if aut.is_dead(s) || !aut.is_live(s) {
                continue;
            }
            let mut next = right.clone();
            next.push(d);
            stack.push((next, s, n + 1));
        }
    }
    let (inner, outer) = best.expect("a live extension exists when extremal succeeds");
    if max {
        prop_assert!(outer <= r.value && r.value <= inner, "{:?}: {} outside [{}, {}]", inst, r.value, outer, inner);
    } else {
        prop_assert!(inner <= r.value && r.value <= outer, "{:?}: {} outside [{}, {}]", inst, r.value, inner, outer);
    }
    Ok(())
}

/// Random sums of at most three radical classes, sometimes with an exact
/// zero hidden as `c·√(m²d) − c·m·√d`.
#[derive(Clone, Debug)]
pub struct SumSpec {
    pub terms: Vec<(i64, i64, u64)>,
}

pub fn sum_spec() -> impl Strategy<Value = SumSpec> {
    (prop::collection::vec((-30i64..=30, 1i64..=12, 1u64..=60), 1..=3), prop::option::of((0usize..3, -9i64..=9, 2u64..=7)))
        .prop_map(|(mut terms, hidden)| {
            if let Some((i, c, m)) = hidden {
                let d = terms[i % terms.len()].2;
                terms.push((c, 1, m * m * d));
                terms.push((-c * m as i64, 1, d));
            }
            SumSpec { terms }
        })
}

pub fn build_sum(s: &SumSpec) -> RadicalSum {
    s.terms.iter().fold(RadicalSum::zero(), |acc, &(p, q, d)| {
        &acc + &RadicalSum::sqrt_term(BigRational::new(p.into(), q.into()), &BigUint::from(d))
    })
}

/// Sign from 60-digit integer square roots. Each term is off by less than
/// its coefficient in units of 10⁻⁶⁰; nonzero sums of this height are far
/// larger than that, so a tiny total means zero.
pub fn oracle_sign(s: &SumSpec) -> i8 {
    let scale = BigUint::from(10u32).pow(120);
    let mut total = BigRational::zero();
    let mut err = BigRational::zero();
    for &(p, q, d) in &s.terms {
        let root = BigInt::from((BigUint::from(d) * &scale).sqrt());
        let c = BigRational::new(p.into(), q.into());
        total += &c * BigRational::from_integer(root);
        err += c.abs();
    }
    if total.abs() <= err + BigRational::from_integer(1.into()) {
        0
    } else if total.is_positive() {
        1
    } else {
        -1
    }
}

pub fn sign_agrees(s: &SumSpec) -> Check {
    prop_assert_eq!(build_sum(s).sign(), oracle_sign(s), "{:?}", s);
    Ok(())
}
