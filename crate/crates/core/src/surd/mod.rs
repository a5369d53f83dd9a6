//! Exact quadratic surds and finite sums of square roots.
//!
//! Signs are decided by refining dyadic enclosures of each square root; a
//! canonical non-empty sum over distinct squarefree radicands is never zero,
//! so refinement always terminates.

mod decimal;
mod interval;
mod squarefree;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use decimal::{Decimal, Rounding};
pub use interval::RatInterval;
pub use squarefree::{is_probable_prime, squarefree_decompose, squarefree_part_u64};

use crate::error::{Error, Result};
use crate::words::Digit;

/// `(p + r·√d)/q` with `q > 0`, `gcd(p, r, q) = 1`, `d` squarefree; rationals
/// have `r = 0` and `d = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    p: BigInt,
    r: BigInt,
    q: BigInt,
    d: BigUint,
}

impl QuadSurd {
    pub fn new(p: BigInt, r: BigInt, q: BigInt, d: BigUint) -> QuadSurd {
        assert!(!q.is_zero(), "zero denominator");
        let (k, s) = squarefree_decompose(&d);
        let (mut p, mut r, mut q) = (p, r * BigInt::from(k), q);
        let mut d = s;
        if r.is_zero() || d.is_zero() {
            r = BigInt::zero();
            d = BigUint::zero();
        } else if d.is_one() {
            p += &r;
            r = BigInt::zero();
            d = BigUint::zero();
        }
        if q.is_negative() {
            p = -p;
            r = -r;
            q = -q;
        }
        let g = p.gcd(&r).gcd(&q);
        if !g.is_one() && !g.is_zero() {
            p /= &g;
            r /= &g;
            q /= &g;
        }
        QuadSurd { p, r, q, d }
    }

    pub fn from_integer(n: i64) -> QuadSurd {
        QuadSurd::new(BigInt::from(n), BigInt::zero(), BigInt::one(), BigUint::zero())
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn r(&self) -> &BigInt {
        &self.r
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn d(&self) -> &BigUint {
        &self.d
    }

    /// Value of `[b0; b1, …, b_{p-1}, b0, b1, …]`.
    pub fn periodic_cf(block: &[Digit]) -> QuadSurd {
        static CACHE: OnceLock<Mutex<HashMap<Vec<Digit>, QuadSurd>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(v) = cache.lock().unwrap().get(block) {
            return v.clone();
        }
        assert!(!block.is_empty());
        let [a, b, c, d] = cf_matrix(block);
        // c·y² + (d − a)·y − b = 0, positive root
        let disc = (&a - &d) * (&a - &d) + BigInt::from(4) * &b * &c;
        let v = QuadSurd::new(&a - &d, BigInt::one(), BigInt::from(2) * c, disc.to_biguint().unwrap());
        cache.lock().unwrap().insert(block.to_vec(), v.clone());
        v
    }

    /// `[a0; a1, …, a_{n-1}, x]` for the given prefix and tail value `x`.
    pub fn cf_with_tail(prefix: &[Digit], tail: &QuadSurd) -> QuadSurd {
        if prefix.is_empty() {
            return tail.clone();
        }
        let [a, b, c, d] = cf_matrix(prefix);
        tail.mobius(&a, &b, &c, &d)
    }

    /// `(a·x + b)/(c·x + d)`.
    pub fn mobius(&self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> QuadSurd {
        let p1 = a * &self.p + b * &self.q;
        let r1 = a * &self.r;
        let p2 = c * &self.p + d * &self.q;
        let r2 = c * &self.r;
        if self.r.is_zero() {
            return QuadSurd::new(p1, BigInt::zero(), p2, BigUint::zero());
        }
        let dd = BigInt::from(self.d.clone());
        let num_p = &p1 * &p2 - &r1 * &r2 * &dd;
        let num_r = &r1 * &p2 - &p1 * &r2;
        let den = &p2 * &p2 - &r2 * &r2 * &dd;
        QuadSurd::new(num_p, num_r, den, self.d.clone())
    }

    pub fn recip(&self) -> QuadSurd {
        self.mobius(&BigInt::zero(), &BigInt::one(), &BigInt::one(), &BigInt::zero())
    }

    pub fn to_radical_sum(&self) -> RadicalSum {
        let mut s = RadicalSum::from_rational(BigRational::new(self.p.clone(), self.q.clone()));
        if !self.r.is_zero() {
            s = &s + &RadicalSum::sqrt_term(BigRational::new(self.r.clone(), self.q.clone()), &self.d);
        }
        s
    }

    pub fn to_f64(&self) -> f64 {
        self.to_radical_sum().to_f64()
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r.is_zero() {
            write!(f, "{}", BigRational::new(self.p.clone(), self.q.clone()))
        } else {
            write!(f, "({} + {}·sqrt({}))/{}", self.p, self.r, self.d, self.q)
        }
    }
}

/// Product of the matrices `[[a,1],[1,0]]` over the digits.
pub(crate) fn cf_matrix(digits: &[Digit]) -> [BigInt; 4] {
    // small prefixes fit in u128 comfortably; fall back to BigInt otherwise
    let mut m: [u128; 4] = [1, 0, 0, 1];
    let mut big: Option<[BigInt; 4]> = None;
    for &x in digits {
        let x = x as u128;
        if let Some(b) = big.as_mut() {
            let xb = BigInt::from(x);
            let na = &xb * &b[0] + &b[1];
            let nc = &xb * &b[2] + &b[3];
            // [[a,b],[c,d]]·[[x,1],[1,0]] = [[a·x+b, a],[c·x+d, c]]
            *b = [na, b[0].clone(), nc, b[2].clone()];
            continue;
        }
        if m[0] > (u128::MAX >> 8) || m[2] > (u128::MAX >> 8) {
            let mut b = m.map(BigInt::from);
            let xb = BigInt::from(x);
            let na = &xb * &b[0] + &b[1];
            let nc = &xb * &b[2] + &b[3];
            b = [na, b[0].clone(), nc, b[2].clone()];
            big = Some(b);
            continue;
        }
        m = [m[0] * x + m[1], m[0], m[2] * x + m[3], m[2]];
    }
    big.unwrap_or_else(|| m.map(BigInt::from))
}

/// Finite sum `Σ cᵢ·√dᵢ` with rational coefficients over distinct squarefree
/// radicands. The rational part is stored under radicand 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RadicalSum {
    terms: BTreeMap<BigUint, BigRational>,
}

impl RadicalSum {
    pub fn zero() -> RadicalSum {
        RadicalSum::default()
    }

    pub fn from_rational(q: BigRational) -> RadicalSum {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(BigUint::one(), q);
        }
        RadicalSum { terms }
    }

    pub fn from_integer(n: i64) -> RadicalSum {
        RadicalSum::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` from machine integers.
    pub fn ratio(p: i64, q: i64) -> RadicalSum {
        RadicalSum::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `10^e` for any integer `e`.
    pub fn pow10(e: i32) -> RadicalSum {
        let t = BigInt::from(10).pow(e.unsigned_abs());
        let q = if e >= 0 { BigRational::from_integer(t) } else { BigRational::new(BigInt::one(), t) };
        RadicalSum::from_rational(q)
    }

    /// `c·√n`, with `n` reduced to its squarefree kernel.
    pub fn sqrt_term(c: BigRational, n: &BigUint) -> RadicalSum {
        let (k, s) = squarefree_decompose(n);
        if s.is_zero() || c.is_zero() {
            return RadicalSum::zero();
        }
        let c = c * BigRational::from_integer(BigInt::from(k));
        let mut terms = BTreeMap::new();
        terms.insert(s, c);
        RadicalSum { terms }
    }

    pub fn sqrt_int(n: u64) -> RadicalSum {
        RadicalSum::sqrt_term(BigRational::one(), &BigUint::from(n))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &BigRational)> {
        self.terms.iter()
    }

    pub fn radicands(&self) -> Vec<BigUint> {
        self.terms.keys().cloned().collect()
    }

    pub fn coefficient(&self, d: &BigUint) -> BigRational {
        self.terms.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|d| d.is_one())
    }

    pub fn rational_value(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coefficient(&BigUint::one()))
    }

    pub fn scale(&self, c: &BigRational) -> RadicalSum {
        if c.is_zero() {
            return RadicalSum::zero();
        }
        RadicalSum { terms: self.terms.iter().map(|(d, x)| (d.clone(), x * c)).collect() }
    }

    fn add_term(&mut self, d: BigUint, c: BigRational) {
        let e = self.terms.entry(d).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Enclosure with each root known to `2^-bits`.
    pub fn enclose_bits(&self, bits: u64) -> RatInterval {
        let mut acc = RatInterval::point(BigRational::zero());
        for (d, c) in &self.terms {
            let iv = if d.is_one() { RatInterval::point(BigRational::one()) } else { RatInterval::sqrt_of(d, bits) };
            acc = &acc + &iv.scale(c);
        }
        acc
    }

    /// Enclosure of width at most `eps`.
    pub fn enclose(&self, eps: &BigRational) -> RatInterval {
        let mut bits = 64;
        loop {
            let iv = self.enclose_bits(bits);
            if &iv.width() <= eps {
                return iv;
            }
            bits *= 2;
        }
    }

    pub fn sign(&self) -> i8 {
        if self.terms.is_empty() {
            return 0;
        }
        let mut bits = 64;
        loop {
            if let Some(s) = self.enclose_bits(bits).sign() {
                return s;
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        interval::rat_to_f64(&self.enclose_bits(80).lo)
    }

    /// Rational value nearest the sum at the requested dyadic precision.
    pub fn approx(&self, bits: u64) -> BigRational {
        self.enclose_bits(bits).lo
    }

    pub fn abs(&self) -> RadicalSum {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_decimal(&self, digits: usize, mode: Rounding) -> Decimal {
        decimal::render(self, digits, mode)
    }

    /// Same denominator for all coefficients: `(Σ nᵢ·√dᵢ)/den`, `den > 0` minimal.
    pub fn common_denominator(&self) -> (Vec<(BigUint, BigInt)>, BigInt) {
        let den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .terms
            .iter()
            .map(|(d, c)| (d.clone(), c.numer() * (&den / c.denom())))
            .collect();
        (nums, den)
    }
}

impl Add for &RadicalSum {
    type Output = RadicalSum;
    fn add(self, o: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        for (d, c) in &o.terms {
            out.add_term(d.clone(), c.clone());
        }
        out
    }
}

impl Sub for &RadicalSum {
    type Output = RadicalSum;
    fn sub(self, o: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        for (d, c) in &o.terms {
            out.add_term(d.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        RadicalSum { terms: self.terms.iter().map(|(d, c)| (d.clone(), -c.clone())).collect() }
    }
}

impl Mul for &RadicalSum {
    type Output = RadicalSum;
    fn mul(self, o: &RadicalSum) -> RadicalSum {
        let mut out = RadicalSum::zero();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &o.terms {
                let g = d1.gcd(d2);
                // √d1·√d2 = g·√(d1·d2/g²)
                let rad = (d1 / &g) * (d2 / &g);
                let c = c1 * c2 * BigRational::from_integer(BigInt::from(g));
                out.add_term(rad, c);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RadicalSum {
            type Output = RadicalSum;
            fn $m(self, o: RadicalSum) -> RadicalSum { (&self).$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        -&self
    }
}

impl PartialOrd for RadicalSum {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for RadicalSum {
    fn cmp(&self, o: &Self) -> Ordering {
        if self == o {
            return Ordering::Equal;
        }
        (self - o).sign().cmp(&0)
    }
}

fn fmt_coeff(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("({}/{})", c.numer(), c.denom())
    }
}

impl fmt::Display for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if d.is_one() {
                if a.is_integer() {
                    write!(f, "{}", a.numer())?;
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())?;
                }
            } else {
                write!(f, "{}·sqrt({})", fmt_coeff(&a), d)?;
            }
        }
        Ok(())
    }
}

impl FromStr for RadicalSum {
    type Err = Error;

    /// Accepts the canonical printed form (and `*` in place of `·`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('·', "*");
        let b = s.as_bytes();
        let mut pos = 0;
        let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
        let skip = |pos: &mut usize| {
            while *pos < b.len() && b[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let int = |pos: &mut usize| -> Result<BigInt> {
            let st = *pos;
            while *pos < b.len() && b[*pos].is_ascii_digit() {
                *pos += 1;
            }
            s[st..*pos].parse::<BigInt>().map_err(|_| err(st, "expected integer"))
        };
        let mut out = RadicalSum::zero();
        let mut first = true;
        loop {
            skip(&mut pos);
            if pos >= b.len() {
                break;
            }
            let mut neg = false;
            if b[pos] == b'+' || b[pos] == b'-' {
                neg = b[pos] == b'-';
                pos += 1;
                skip(&mut pos);
            } else if !first {
                return Err(err(pos, "expected '+' or '-'"));
            }
            first = false;
            let mut coef = BigRational::one();
            let mut has_coef = false;
            if pos < b.len() && (b[pos] == b'(' || b[pos].is_ascii_digit()) {
                let paren = b[pos] == b'(';
                if paren {
                    pos += 1;
                }
                let n = int(&mut pos)?;
                let mut den = BigInt::one();
                if pos < b.len() && b[pos] == b'/' {
                    pos += 1;
                    den = int(&mut pos)?;
                }
                if paren {
                    if pos >= b.len() || b[pos] != b')' {
                        return Err(err(pos, "expected ')'"));
                    }
                    pos += 1;
                }
                if den.is_zero() {
                    return Err(err(pos, "zero denominator"));
                }
                coef = BigRational::new(n, den);
                has_coef = true;
                skip(&mut pos);
                if pos < b.len() && b[pos] == b'*' {
                    pos += 1;
                    skip(&mut pos);
                } else {
                    let t = if neg { -RadicalSum::from_rational(coef) } else { RadicalSum::from_rational(coef) };
                    out = &out + &t;
                    continue;
                }
            }
            if !s[pos..].starts_with("sqrt(") {
                return Err(err(pos, if has_coef { "expected sqrt(" } else { "expected term" }));
            }
            pos += 5;
            let d = int(&mut pos)?;
            if pos >= b.len() || b[pos] != b')' {
                return Err(err(pos, "expected ')'"));
            }
            pos += 1;
            let d = d.to_biguint().ok_or_else(|| err(pos, "negative radicand"))?;
            let t = RadicalSum::sqrt_term(if neg { -coef } else { coef }, &d);
            out = &out + &t;
        }
        if first {
            return Err(err(0, "empty"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RadicalSum {
        s.parse().unwrap()
    }

    #[test]
    fn golden_ratio_block() {
        let phi = QuadSurd::periodic_cf(&[1]);
        assert_eq!(phi.to_string(), "(1 + 1·sqrt(5))/2");
        let x = QuadSurd::periodic_cf(&[1, 2]);
        // [1;2,1,2,…] = (1 + √3)/2
        assert_eq!(x, QuadSurd::new(1.into(), 1.into(), 2.into(), 3u32.into()));
    }

    #[test]
    fn cf_tail_prefix() {
        let phi = QuadSurd::periodic_cf(&[1]);
        assert_eq!(QuadSurd::cf_with_tail(&[1, 1, 1], &phi), phi);
        let two = QuadSurd::from_integer(2);
        // [1; 2] = 3/2
        assert_eq!(QuadSurd::cf_with_tail(&[1], &two), QuadSurd::new(3.into(), 0.into(), 2.into(), 0u32.into()));
    }

    #[test]
    fn radicals_normalize() {
        let a = RadicalSum::sqrt_int(12);
        assert_eq!(a.to_string(), "2·sqrt(3)");
        assert_eq!(RadicalSum::sqrt_int(16).to_string(), "4");
        let b = &a - &RadicalSum::sqrt_int(3);
        assert_eq!(b, RadicalSum::sqrt_int(3));
        assert!((&b - &b).is_zero());
        assert_eq!((&RadicalSum::sqrt_int(6) * &RadicalSum::sqrt_int(10)).to_string(), "2·sqrt(15)");
    }

    #[test]
    fn sign_of_near_cancellation() {
        // √1000001 − 1000 − 1/2000 is about −1.25e−10
        let x = &(&RadicalSum::sqrt_int(1_000_001) - &RadicalSum::from_integer(1000)) - &RadicalSum::ratio(1, 2000);
        assert_eq!(x.sign(), -1);
        let y = &RadicalSum::sqrt_int(2) + &RadicalSum::sqrt_int(3);
        assert!(y > RadicalSum::sqrt_int(10) - RadicalSum::ratio(1, 50));
        assert!(y < RadicalSum::sqrt_int(10));
    }

    #[test]
    fn print_parse_roundtrip() {
        for s in ["0", "5", "-3/7", "2·sqrt(3)", "1/2 - (3/4)·sqrt(5) + 7·sqrt(87)", "-(1/3)·sqrt(2)"] {
            assert_eq!(rs(s).to_string(), s);
        }
        assert_eq!(rs("sqrt(8) + 1"), rs("1 + 2·sqrt(2)"));
        assert!("1 + ".parse::<RadicalSum>().is_err());
        assert!("sqrt(x)".parse::<RadicalSum>().is_err());
    }

    #[test]
    fn common_denominator_form() {
        let x = rs("1/6 + (1/4)·sqrt(2)");
        let (nums, den) = x.common_denominator();
        assert_eq!(den, BigInt::from(12));
        assert_eq!(nums[0].1, BigInt::from(2));
        assert_eq!(nums[1].1, BigInt::from(3));
    }
}
