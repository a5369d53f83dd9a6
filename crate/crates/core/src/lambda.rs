//! λ_k values, padded bounds and Markov suprema.
//!
//! `λ_k(S) = [a_k; a_{k+1}, …] + [0; a_{k-1}, a_{k-2}, …]`. In `[a_0; a_1, …]`
//! the value increases with `a_t` for even `t` and decreases for odd `t`; the
//! same holds for `[0; b_1, b_2, …]` with the depth `t` of `b_t`. Every bound
//! below is an exact value of an explicit padded sequence.

use std::cmp::Ordering;

use serde::Serialize;

use crate::surd::{QuadSurd, RadicalSum};
use crate::words::{transpose_word, BiSeq, Digit, PointedWord};

/// Exact value of `[prefix…, per(block)]`.
fn cf(prefix: &[Digit], block: &[Digit]) -> QuadSurd {
    QuadSurd::cf_with_tail(prefix, &QuadSurd::periodic_cf(block))
}

/// Right reading `[a_i; a_{i+1}, …]` at absolute index `i`.
pub fn right_value(s: &BiSeq, i: i64) -> QuadSurd {
    let n = s.core().len() as i64;
    let r = s.right_block();
    if i < n {
        cf(&s.window(i, n), r)
    } else {
        let p = r.len() as i64;
        let k = ((i - n).rem_euclid(p)) as usize;
        let mut rot = r[k..].to_vec();
        rot.extend_from_slice(&r[..k]);
        cf(&[], &rot)
    }
}

/// Left reading `[0; a_{i-1}, a_{i-2}, …]` at absolute index `i`.
pub fn left_value(s: &BiSeq, i: i64) -> QuadSurd {
    let l = s.left_block();
    let pl = l.len() as i64;
    let x = if i > 0 {
        cf(&transpose_word(&s.window(0, i)), &transpose_word(l))
    } else {
        let block: Vec<Digit> = (0..pl).map(|t| s.digit_at(i - 1 - t)).collect();
        cf(&[], &block)
    };
    x.recip()
}

/// λ at the absolute index `i`.
pub fn lambda_abs(s: &BiSeq, i: i64) -> RadicalSum {
    &right_value(s, i).to_radical_sum() + &left_value(s, i).to_radical_sum()
}

/// λ_k(S), `k` relative to the pivot.
pub fn lambda(s: &BiSeq, k: i64) -> RadicalSum {
    lambda_abs(s, s.pivot() + k)
}

pub fn lambda0(s: &BiSeq) -> RadicalSum {
    lambda(s, 0)
}

/// Alternating pad starting with `first` over the alphabet `{1, …, amax}`.
fn pad(first_high: bool, amax: Digit) -> [Digit; 2] {
    if first_high {
        [amax, 1]
    } else {
        [1, amax]
    }
}

/// Extreme right readings `[prefix…, free…]` over free digits in `{1..amax}`:
/// `(min, max)`.
pub fn right_extremes(prefix: &[Digit], amax: Digit) -> (QuadSurd, QuadSurd) {
    // the first free digit sits at index prefix.len(); even index ⇒ increasing
    let even = prefix.len().is_multiple_of(2);
    (cf(prefix, &pad(!even, amax)), cf(prefix, &pad(even, amax)))
}

/// Extreme left readings `[0; prefix…, free…]` (prefix listed outward from
/// the pivot): `(min, max)`.
pub fn left_extremes(prefix: &[Digit], amax: Digit) -> (QuadSurd, QuadSurd) {
    // [0; x] = 1/x, so the order flips relative to the right reading
    let (lo, hi) = right_extremes(prefix, amax);
    (hi.recip(), lo.recip())
}

/// Exact inf and sup of λ₀ over all completions of a pointed word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundPair {
    pub lo: RadicalSum,
    pub hi: RadicalSum,
    /// Completion attaining `lo`.
    pub lo_witness: BiSeq,
    /// Completion attaining `hi`.
    pub hi_witness: BiSeq,
}

impl BoundPair {
    pub fn width(&self) -> RadicalSum {
        &self.hi - &self.lo
    }
}

/// Bounds over completions with digits in `{1, 2, 3}`.
pub fn bound_pair(w: &PointedWord) -> BoundPair {
    bound_pair_alphabet(w, 3)
}

pub fn bound_pair_alphabet(w: &PointedWord, amax: Digit) -> BoundPair {
    let d = w.digits();
    let p = w.pivot();
    let right = &d[p..];
    let left = transpose_word(&d[..p]);
    let (rlo, rhi) = right_extremes(right, amax);
    let (llo, lhi) = left_extremes(&left, amax);
    let even_r = right.len().is_multiple_of(2);
    // min left reading: max of the inner continued fraction
    let even_l = left.len().is_multiple_of(2);
    let witness = |r_high_first: bool, l_high_first: bool| {
        let rb = pad(r_high_first, amax).to_vec();
        // left block is written left-to-right; its last digit touches the word
        let lb = transpose_word(&pad(l_high_first, amax));
        BiSeq::from_pointed(&lb, w, &rb).expect("valid padding")
    };
    BoundPair {
        lo: &rlo.to_radical_sum() + &llo.to_radical_sum(),
        hi: &rhi.to_radical_sum() + &lhi.to_radical_sum(),
        lo_witness: witness(!even_r, even_l),
        hi_witness: witness(even_r, !even_l),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Supremum of `λ_k` over all `k ∈ ℤ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupResult {
    pub value: RadicalSum,
    /// The supremum is a maximum.
    pub attained: bool,
    /// Maximizing position relative to the pivot: smallest `|k|`, negative
    /// first on ties.
    pub argmax: Option<i64>,
    /// When not attained, the tail whose periodic maximum is approached.
    pub tail: Option<Side>,
}

fn better_pos(a: i64, b: i64) -> bool {
    (a.abs(), a) < (b.abs(), b)
}

struct Best {
    value: Option<RadicalSum>,
    pos: i64,
}

impl Best {
    fn offer(&mut self, v: RadicalSum, k: i64) {
        match &self.value {
            None => {
                self.value = Some(v);
                self.pos = k;
            }
            Some(b) => match v.cmp(b) {
                Ordering::Greater => {
                    self.value = Some(v);
                    self.pos = k;
                }
                Ordering::Equal if better_pos(k, self.pos) => self.pos = k,
                _ => {}
            },
        }
    }
}

fn max_digit(s: &BiSeq) -> Digit {
    s.left_block().iter().chain(s.core()).chain(s.right_block()).copied().max().unwrap_or(1)
}

/// m(S) = sup_k λ_k(S), exactly.
pub fn markov_sup(s: &BiSeq) -> SupResult {
    let piv = s.pivot();
    if s.is_purely_periodic() {
        let p = s.left_block().len() as i64;
        let mut best = Best { value: None, pos: 0 };
        for i in 0..p {
            let v = lambda_abs(s, i);
            // representatives i − piv and i − piv − p of the same residue
            let k0 = (i - piv).rem_euclid(p);
            best.offer(v.clone(), k0);
            best.offer(v, k0 - p);
        }
        return SupResult { value: best.value.unwrap(), attained: true, argmax: Some(best.pos), tail: None };
    }
    let amax = max_digit(s);
    let l = s.left_block().to_vec();
    let r = s.right_block().to_vec();
    let (pl, pr) = (l.len() as i64, r.len() as i64);
    let n = s.core().len() as i64;
    let p_ext = |j: i64| l[j.rem_euclid(pl) as usize];
    let q_ext = |j: i64| r[(j - n).rem_euclid(pr) as usize];
    let bound = n + 3 * (pl + pr) + 2;
    let dl = (0..bound).find(|&j| s.digit_at(j) != p_ext(j)).expect("not purely periodic");
    let dr = (-bound..n).rev().find(|&j| s.digit_at(j) != q_ext(j)).expect("not purely periodic");
    let w = 2 * pl.max(pr) + 2;
    let (lo_i, hi_i) = (dl - w, dr + w);

    let mut best = Best { value: None, pos: 0 };
    for i in lo_i..=hi_i {
        best.offer(lambda_abs(s, i), i - piv);
    }

    let mut limit: Option<(RadicalSum, Side)> = None;
    let offer_limit = |limit: &mut Option<(RadicalSum, Side)>, t: RadicalSum, side: Side| {
        if limit.as_ref().is_none_or(|(v, _)| &t > v) {
            *limit = Some((t, side));
        }
    };

    // left tail: i < lo_i, first difference from per(L) at dl
    let s0 = (s.digit_at(dl) as i32 - p_ext(dl) as i32).signum();
    for r0 in (lo_i - pl)..lo_i {
        let positive = |i: i64| {
            let d = dl - i;
            (if d % 2 == 0 { s0 } else { -s0 }) > 0
        };
        let has_positive = positive(r0) || positive(r0 - pl);
        if !has_positive {
            let t = lambda_abs(&BiSeq::periodic(&l, 0).expect("block"), r0.rem_euclid(pl));
            offer_limit(&mut limit, t, Side::Left);
            continue;
        }
        let left_exact = left_value(s, r0).to_radical_sum();
        let mut i = r0;
        loop {
            if positive(i) {
                best.offer(lambda_abs(s, i), i - piv);
            }
            let next = i - pl;
            let prefix: Vec<Digit> = (next..dl).map(p_ext).collect();
            let (_, rmax) = right_extremes(&prefix, amax);
            let cap = &left_exact + &rmax.to_radical_sum();
            if best.value.as_ref().is_some_and(|b| &cap < b) {
                break;
            }
            i = next;
        }
    }

    // right tail: i > hi_i, first difference from per(R) at dr
    let s1 = (s.digit_at(dr) as i32 - q_ext(dr) as i32).signum();
    for r0 in (hi_i + 1)..=(hi_i + pr) {
        let positive = |i: i64| {
            let t = i - dr;
            (if t % 2 == 0 { s1 } else { -s1 }) > 0
        };
        let has_positive = positive(r0) || positive(r0 + pr);
        if !has_positive {
            let t = lambda_abs(&BiSeq::periodic(&r, 0).expect("block"), (r0 - n).rem_euclid(pr));
            offer_limit(&mut limit, t, Side::Right);
            continue;
        }
        let right_exact = right_value(s, r0).to_radical_sum();
        let mut i = r0;
        loop {
            if positive(i) {
                best.offer(lambda_abs(s, i), i - piv);
            }
            let next = i + pr;
            let prefix: Vec<Digit> = (dr + 1..next).rev().map(q_ext).collect();
            let (_, lmax) = left_extremes(&prefix, amax);
            let cap = &right_exact + &lmax.to_radical_sum();
            if best.value.as_ref().is_some_and(|b| &cap < b) {
                break;
            }
            i = next;
        }
    }

    let b = best.value.unwrap();
    match limit {
        Some((t, side)) if t > b => SupResult { value: t, attained: false, argmax: None, tail: Some(side) },
        _ => SupResult { value: b, attained: true, argmax: Some(best.pos), tail: None },
    }
}

/// l(S) = limsup_k λ_k(S): the larger periodic maximum of the two tails.
pub fn lagrange_value(s: &BiSeq) -> RadicalSum {
    let l = markov_sup(&BiSeq::periodic(s.left_block(), 0).expect("block")).value;
    let r = markov_sup(&BiSeq::periodic(s.right_block(), 0).expect("block")).value;
    l.max(r)
}
