//! Digit words, pointed words and eventually periodic bi-infinite sequences.
//!
//! Literal grammar used everywhere in the crate:
//!
//! ```text
//! literal := [ "per(" word ")" ] body [ "per(" word ")" ]
//! body    := { digit ["*"] | "(" word ")^" n }
//! ```
//!
//! Exactly one `*` marks the pivot (index 0 of the ambient sequence); it
//! follows the digit it marks. Whitespace is ignored. `per(2212*112)` on its
//! own is a purely periodic sequence pointed inside the block.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Digit = u8;
pub type Word = Vec<Digit>;

/// Largest digit accepted by the parser.
pub const MAX_DIGIT: Digit = 9;

pub fn transpose_word(w: &[Digit]) -> Word {
    w.iter().rev().copied().collect()
}

pub fn is_palindrome(w: &[Digit]) -> bool {
    w.iter().eq(w.iter().rev())
}

/// A palindrome or a concatenation of two palindromes.
pub fn is_semisymmetric(w: &[Digit]) -> bool {
    (0..=w.len()).any(|k| is_palindrome(&w[..k]) && is_palindrome(&w[k..]))
}

pub fn find_subword(hay: &[Digit], needle: &[Digit]) -> Option<usize> {
    if needle.is_empty() {
        return Some(0);
    }
    if needle.len() > hay.len() {
        return None;
    }
    hay.windows(needle.len()).position(|w| w == needle)
}

pub fn word_to_string(w: &[Digit]) -> String {
    w.iter().map(|d| char::from(b'0' + d)).collect()
}

pub fn parse_word(s: &str) -> Result<Word> {
    let lit: Literal = s.parse()?;
    if lit.left.is_some() || lit.right.is_some() || lit.pivot.is_some() {
        return Err(Error::Parse { pos: 0, msg: "expected a plain word".into() });
    }
    Ok(lit.body)
}

/// Smallest block whose repetition gives `w`.
pub fn primitive_root(w: &[Digit]) -> Word {
    let n = w.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

fn check_alphabet(w: &[Digit]) -> Result<()> {
    match w.iter().find(|&&d| d == 0 || d > MAX_DIGIT) {
        Some(&d) => Err(Error::Alphabet(d)),
        None => Ok(()),
    }
}

/// Raw parse result: both tails optional, pivot optional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub left: Option<Word>,
    pub body: Word,
    pub pivot: Option<usize>,
    pub right: Option<Word>,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }
    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }
    /// Digits with an optional single star, up to a closing paren.
    fn inner_word(&mut self) -> Result<(Word, Option<usize>)> {
        let mut w = Vec::new();
        let mut star = None;
        loop {
            match self.peek() {
                Some(c @ b'1'..=b'9') => {
                    w.push(c - b'0');
                    self.pos += 1;
                }
                Some(b'*') => {
                    if w.is_empty() || star.is_some() {
                        return self.err("misplaced '*'");
                    }
                    star = Some(w.len() - 1);
                    self.pos += 1;
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return self.err("expected digit or ')'"),
            }
        }
        if w.is_empty() {
            return self.err("empty block");
        }
        Ok((w, star))
    }
    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .map_or_else(|| self.err("expected exponent"), Ok)
    }
}

impl FromStr for Literal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor { s: s.as_bytes(), pos: 0 };
        let mut left = None;
        let mut right = None;
        let mut body = Vec::new();
        let mut pivot = None;
        let mut per_star = None;
        let mut seen_body = false;
        while c.peek().is_some() {
            if c.eat("per(") {
                let at = c.pos;
                let (w, star) = c.inner_word()?;
                if let Some(k) = star {
                    if per_star.is_some() || pivot.is_some() {
                        return Err(Error::Parse { pos: at, msg: "more than one '*'".into() });
                    }
                    per_star = Some(k);
                }
                if left.is_none() && !seen_body && right.is_none() {
                    left = Some(w);
                } else if right.is_none() {
                    right = Some(w);
                } else {
                    return Err(Error::Parse { pos: at, msg: "too many per(...) blocks".into() });
                }
                continue;
            }
            if right.is_some() {
                return c.err("text after the right tail");
            }
            match c.peek() {
                Some(b'(') => {
                    c.pos += 1;
                    let (w, star) = c.inner_word()?;
                    if star.is_some() {
                        return c.err("'*' inside a power block");
                    }
                    if !c.eat("^") {
                        return c.err("expected '^'");
                    }
                    let n = c.number()?;
                    for _ in 0..n {
                        body.extend_from_slice(&w);
                    }
                    seen_body = true;
                }
                Some(d @ b'1'..=b'9') => {
                    c.pos += 1;
                    body.push(d - b'0');
                    seen_body = true;
                    if c.peek() == Some(b'*') {
                        if pivot.is_some() || per_star.is_some() {
                            return c.err("more than one '*'");
                        }
                        pivot = Some(body.len() - 1);
                        c.pos += 1;
                    }
                }
                Some(b'*') => return c.err("'*' must follow a digit"),
                _ => return c.err("unexpected character"),
            }
        }
        if let Some(k) = per_star {
            // only a lone per(...) may carry the star
            if seen_body || left.is_none() || right.is_some() {
                return Err(Error::Parse { pos: 0, msg: "'*' inside per() needs a lone per(...)".into() });
            }
            let block = left.take().unwrap();
            return Ok(Literal { left: Some(block.clone()), body: Vec::new(), pivot: Some(k), right: Some(block) });
        }
        if left.is_some() && !seen_body && right.is_none() {
            // a lone per(w): purely periodic
            let block = left.clone().unwrap();
            right = Some(block);
        }
        Ok(Literal { left, body, pivot, right })
    }
}

/// Finite word with a distinguished pivot index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointedWord {
    digits: Word,
    pivot: usize,
}

impl PointedWord {
    pub fn new(digits: Word, pivot: usize) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyWord);
        }
        check_alphabet(&digits)?;
        if pivot >= digits.len() {
            return Err(Error::Pivot { pivot, len: digits.len() });
        }
        Ok(PointedWord { digits, pivot })
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }
    pub fn pivot(&self) -> usize {
        self.pivot
    }
    pub fn len(&self) -> usize {
        self.digits.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Number of digits left of the pivot.
    pub fn left_arm(&self) -> usize {
        self.pivot
    }
    /// Number of digits right of the pivot.
    pub fn right_arm(&self) -> usize {
        self.digits.len() - self.pivot - 1
    }

    pub fn transpose(&self) -> PointedWord {
        PointedWord { digits: transpose_word(&self.digits), pivot: self.digits.len() - 1 - self.pivot }
    }

    pub fn with_pivot(&self, pivot: usize) -> Result<PointedWord> {
        PointedWord::new(self.digits.clone(), pivot)
    }

    pub fn extend(&self, left: Option<Digit>, right: Option<Digit>) -> PointedWord {
        let mut digits = Vec::with_capacity(self.digits.len() + 2);
        let mut pivot = self.pivot;
        if let Some(d) = left {
            digits.push(d);
            pivot += 1;
        }
        digits.extend_from_slice(&self.digits);
        if let Some(d) = right {
            digits.push(d);
        }
        PointedWord { digits, pivot }
    }

    pub fn extend_left_by(&self, w: &[Digit]) -> PointedWord {
        let mut digits = w.to_vec();
        digits.extend_from_slice(&self.digits);
        PointedWord { digits, pivot: self.pivot + w.len() }
    }

    pub fn extend_right_by(&self, w: &[Digit]) -> PointedWord {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(w);
        PointedWord { digits, pivot: self.pivot }
    }

    pub fn contains(&self, w: &[Digit]) -> bool {
        find_subword(&self.digits, w).is_some()
    }
}

impl fmt::Display for PointedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.digits.iter().enumerate() {
            write!(f, "{}", d)?;
            if i == self.pivot {
                f.write_str("*")?;
            }
        }
        Ok(())
    }
}

impl FromStr for PointedWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lit: Literal = s.parse()?;
        if lit.left.is_some() || lit.right.is_some() {
            return Err(Error::Parse { pos: 0, msg: "pointed word cannot have periodic tails".into() });
        }
        let pivot = lit.pivot.ok_or(Error::Parse { pos: s.len(), msg: "missing '*'".into() })?;
        PointedWord::new(lit.body, pivot)
    }
}

/// Eventually periodic bi-infinite sequence `per(L) core per(R)` with a pivot.
///
/// Absolute index 0 is the first core position (the junction when the core is
/// empty). The canonical form has primitive blocks, the left-periodic region
/// extended as far right as possible and the right-periodic region as far left
/// as possible; a purely periodic sequence has empty core, `L == R` and pivot 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiSeq {
    left: Word,
    core: Word,
    right: Word,
    pivot: i64,
}

impl BiSeq {
    pub fn new(left: Word, core: Word, right: Word, pivot: i64) -> Result<BiSeq> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::EmptyBlock);
        }
        check_alphabet(&left)?;
        check_alphabet(&core)?;
        check_alphabet(&right)?;
        let raw = BiSeq { left: primitive_root(&left), core, right: primitive_root(&right), pivot };
        Ok(raw.canonical())
    }

    pub fn periodic(block: &[Digit], pivot: i64) -> Result<BiSeq> {
        BiSeq::new(block.to_vec(), Vec::new(), block.to_vec(), pivot)
    }

    /// Pointed word padded on both sides with the given blocks.
    pub fn from_pointed(left: &[Digit], w: &PointedWord, right: &[Digit]) -> Result<BiSeq> {
        BiSeq::new(left.to_vec(), w.digits().to_vec(), right.to_vec(), w.pivot() as i64)
    }

    pub fn left_block(&self) -> &[Digit] {
        &self.left
    }
    pub fn core(&self) -> &[Digit] {
        &self.core
    }
    pub fn right_block(&self) -> &[Digit] {
        &self.right
    }
    pub fn pivot(&self) -> i64 {
        self.pivot
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.core.is_empty() && self.left == self.right
    }

    pub fn digit_at(&self, i: i64) -> Digit {
        let n = self.core.len() as i64;
        if i < 0 {
            let p = self.left.len() as i64;
            self.left[i.rem_euclid(p) as usize]
        } else if i < n {
            self.core[i as usize]
        } else {
            let p = self.right.len() as i64;
            self.right[(i - n).rem_euclid(p) as usize]
        }
    }

    /// Digits at absolute indices `a..b`.
    pub fn window(&self, a: i64, b: i64) -> Word {
        (a..b).map(|i| self.digit_at(i)).collect()
    }

    /// Digits at pivot-relative indices `a..b`.
    pub fn window_rel(&self, a: i64, b: i64) -> Word {
        self.window(self.pivot + a, self.pivot + b)
    }

    pub fn shift(&self, k: i64) -> BiSeq {
        let mut s = self.clone();
        s.pivot += k;
        s.canonical()
    }

    pub fn transpose(&self) -> BiSeq {
        let n = self.core.len() as i64;
        let raw = BiSeq {
            left: transpose_word(&self.right),
            core: transpose_word(&self.core),
            right: transpose_word(&self.left),
            pivot: n - 1 - self.pivot,
        };
        raw.canonical()
    }

    /// Occurrence of `w` anywhere in the bi-infinite sequence.
    pub fn contains(&self, w: &[Digit]) -> bool {
        if w.is_empty() {
            return true;
        }
        let m = w.len() as i64;
        let a = -(self.left.len() as i64) - m;
        let b = self.core.len() as i64 + self.right.len() as i64 + m;
        find_subword(&self.window(a, b), w).is_some()
    }

    fn canonical(self) -> BiSeq {
        let pl = self.left.len() as i64;
        let pr = self.right.len() as i64;
        let n = self.core.len() as i64;
        let bound = n + 3 * (pl + pr) + 2;
        let dl = (0..bound).find(|&i| self.digit_at(i) != self.digit_at(i - pl));
        let Some(dl) = dl else {
            let block = self.window(self.pivot, self.pivot + pl);
            return BiSeq { left: block.clone(), core: Vec::new(), right: block, pivot: 0 };
        };
        let dr = (-bound..n).rev().find(|&i| self.digit_at(i) != self.digit_at(i + pr));
        let Some(dr) = dr else {
            let block = self.window(self.pivot, self.pivot + pr);
            return BiSeq { left: block.clone(), core: Vec::new(), right: block, pivot: 0 };
        };
        let left = self.window(dl - pl, dl);
        if dl <= dr {
            BiSeq {
                left,
                core: self.window(dl, dr + 1),
                right: self.window(dr + 1, dr + 1 + pr),
                pivot: self.pivot - dl,
            }
        } else {
            BiSeq { left, core: Vec::new(), right: self.window(dl, dl + pr), pivot: self.pivot - dl }
        }
    }

    /// Printable body bounds (absolute): covers core and pivot.
    fn body_range(&self) -> (i64, i64) {
        if self.is_purely_periodic() {
            return (0, self.left.len() as i64);
        }
        let n = self.core.len() as i64;
        (self.pivot.min(0), (self.pivot + 1).max(n))
    }
}

impl fmt::Display for BiSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.body_range();
        let pl = self.left.len() as i64;
        let pr = self.right.len() as i64;
        write!(f, "per({}) ", word_to_string(&self.window(a - pl, a)))?;
        for i in a..b {
            write!(f, "{}", self.digit_at(i))?;
            if i == self.pivot {
                f.write_str("*")?;
            }
        }
        write!(f, " per({})", word_to_string(&self.window(b, b + pr)))
    }
}

impl FromStr for BiSeq {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lit: Literal = s.parse()?;
        let (Some(left), Some(right)) = (lit.left, lit.right) else {
            return Err(Error::Parse { pos: 0, msg: "sequence needs per(...) on both sides".into() });
        };
        let pivot = lit.pivot.ok_or(Error::Parse { pos: s.len(), msg: "missing '*'".into() })?;
        BiSeq::new(left, lit.body, right, pivot as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(s: &str) -> BiSeq {
        s.parse().unwrap()
    }

    #[test]
    fn pure_periodic_roundtrip() {
        let s = bi("per(212332111) 21233*2111 per(212332111)");
        assert!(s.is_purely_periodic());
        assert_eq!(s.pivot(), 0);
        assert_eq!(s.left_block(), &[3, 2, 1, 1, 1, 2, 1, 2, 3]);
        assert_eq!(s, bi("per(21233*2111)"));
        assert_eq!(s.to_string().parse::<BiSeq>().unwrap(), s);
    }

    #[test]
    fn core_absorbs_into_tails() {
        let a = bi("per(12) 1212 3* 2121 per(21)");
        let b = bi("per(12) 3* per(21)");
        assert_eq!(a, b);
        assert_eq!(b.core(), &[3]);
    }

    #[test]
    fn empty_core_junction_is_unique() {
        let a = bi("per(1) 1* 2 per(12)");
        let b = bi("per(1) 1* per(21)");
        assert_eq!(a, b);
        assert!(a.core().is_empty());
    }

    #[test]
    fn non_primitive_blocks_reduce() {
        assert_eq!(bi("per(1212) 3* per(2323)"), bi("per(12) 3* per(23)"));
    }

    #[test]
    fn power_blocks_expand() {
        let l: Literal = "(21)^3 1*".parse().unwrap();
        assert_eq!(l.body, vec![2, 1, 2, 1, 2, 1, 1]);
        assert_eq!(l.pivot, Some(6));
    }

    #[test]
    fn transpose_moves_pivot() {
        let w: PointedWord = "233*22".parse().unwrap();
        assert_eq!(w.transpose().to_string(), "223*32");
        let s = bi("per(12) 2123* 3 per(333212)");
        assert_eq!(s.transpose().transpose(), s);
        assert_eq!(s.transpose().digit_at(s.transpose().pivot()), 3);
    }

    #[test]
    fn digits_around_pivot() {
        let s = bi("per(21) 1111 3* 2 per(12)");
        assert_eq!(s.window_rel(-2, 3), vec![1, 1, 3, 2, 1]);
        assert!(s.contains(&[2, 1, 2, 1, 1, 1, 1]));
        assert!(!s.contains(&[3, 3]));
    }

    #[test]
    fn parse_rejections() {
        assert!("1*2*".parse::<PointedWord>().is_err());
        assert!("*1".parse::<PointedWord>().is_err());
        assert!("123".parse::<PointedWord>().is_err());
        assert!("per(12) 1* ".parse::<BiSeq>().is_err());
        assert!("per() 1* per(1)".parse::<BiSeq>().is_err());
        assert!("1x*".parse::<PointedWord>().is_err());
    }

    #[test]
    fn semisymmetry() {
        assert!(is_semisymmetric(&[1, 2, 1]));
        assert!(is_semisymmetric(&[1, 2, 1, 3, 3]));
        assert!(!is_semisymmetric(&[2, 1, 2, 3, 3, 2, 1, 1, 1]));
    }
}
