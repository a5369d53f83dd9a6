//! Aho–Corasick automaton over a finite set of forbidden words.
//!
//! A state is dead when some word ends there. A state is live when an
//! infinite walk avoiding dead states starts from it (greatest fixed point),
//! so any finite prefix ending in a live state extends to an admissible
//! one-sided infinite sequence.

use std::collections::VecDeque;

use crate::words::{Digit, Word};

#[derive(Clone, Debug)]
pub struct Automaton {
    amax: Digit,
    next: Vec<Vec<usize>>,
    /// Index into `words` of a word ending at this state, if any.
    hit: Vec<Option<usize>>,
    live: Vec<bool>,
    words: Vec<Word>,
}

impl Automaton {
    /// Words using letters above `amax` can never occur and are dropped.
    pub fn new(words: &[Word], amax: Digit) -> Automaton {
        let words: Vec<Word> =
            words.iter().filter(|w| !w.is_empty() && w.iter().all(|&d| d >= 1 && d <= amax)).cloned().collect();
        let k = amax as usize;
        let mut child: Vec<Vec<Option<usize>>> = vec![vec![None; k]];
        let mut own: Vec<Option<usize>> = vec![None];
        for (i, w) in words.iter().enumerate() {
            let mut s = 0;
            for &d in w {
                let c = (d - 1) as usize;
                s = match child[s][c] {
                    Some(t) => t,
                    None => {
                        child.push(vec![None; k]);
                        own.push(None);
                        let t = child.len() - 1;
                        child[s][c] = Some(t);
                        t
                    }
                };
            }
            own[s].get_or_insert(i);
        }
        let n = child.len();
        let mut next = vec![vec![0usize; k]; n];
        let mut fail = vec![0usize; n];
        let mut hit = own.clone();
        let mut queue = VecDeque::new();
        for c in 0..k {
            match child[0][c] {
                Some(t) => {
                    next[0][c] = t;
                    queue.push_back(t);
                }
                None => next[0][c] = 0,
            }
        }
        while let Some(s) = queue.pop_front() {
            if hit[s].is_none() {
                hit[s] = hit[fail[s]];
            }
            for c in 0..k {
                match child[s][c] {
                    Some(t) => {
                        fail[t] = next[fail[s]][c];
                        next[s][c] = t;
                        queue.push_back(t);
                    }
                    None => next[s][c] = next[fail[s]][c],
                }
            }
        }
        let mut live: Vec<bool> = hit.iter().map(|h| h.is_none()).collect();
        loop {
            let mut changed = false;
            for s in 0..n {
                if live[s] && !next[s].iter().any(|&t| live[t]) {
                    live[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Automaton { amax, next, hit, live, words }
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn alphabet(&self) -> Digit {
        self.amax
    }

    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    pub fn step(&self, s: usize, d: Digit) -> usize {
        self.next[s][(d - 1) as usize]
    }

    pub fn is_dead(&self, s: usize) -> bool {
        self.hit[s].is_some()
    }

    pub fn is_live(&self, s: usize) -> bool {
        self.live[s]
    }

    /// The word ending at a dead state.
    pub fn matched(&self, s: usize) -> Option<&Word> {
        self.hit[s].map(|i| &self.words[i])
    }

    /// Runs from `s`; on the first hit returns the position and the word.
    pub fn run(&self, s: usize, digits: &[Digit]) -> std::result::Result<usize, (usize, Word)> {
        let mut s = s;
        for (i, &d) in digits.iter().enumerate() {
            if d > self.amax {
                return Err((i, vec![d]));
            }
            s = self.step(s, d);
            if let Some(w) = self.matched(s) {
                return Err((i, w.clone()));
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::find_subword;

    #[test]
    fn detects_every_occurrence() {
        let words = vec![vec![1, 3], vec![2, 3, 2], vec![3, 1]];
        let a = Automaton::new(&words, 3);
        for n in 0..6u32 {
            for code in 0..3u32.pow(n) {
                let mut c = code;
                let w: Word = (0..n).map(|_| { let d = (c % 3) as u8 + 1; c /= 3; d }).collect();
                let brute = words.iter().any(|f| find_subword(&w, f).is_some());
                assert_eq!(a.run(0, &w).is_err(), brute, "{w:?}");
            }
        }
    }

    #[test]
    fn liveness_is_a_fixed_point() {
        // over {1,2} forbidding 11, 22 and 121 leaves no infinite word
        let a = Automaton::new(&[vec![1, 1], vec![2, 2], vec![1, 2, 1]], 2);
        assert!(!a.is_live(0));
        let b = Automaton::new(&[vec![1, 1], vec![2, 2]], 2);
        assert!(b.is_live(0));
        assert!(b.is_live(b.step(0, 1)));
    }
}
