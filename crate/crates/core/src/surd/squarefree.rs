//! Squarefree decomposition n = k²·s of non-negative integers.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_LIMIT: u32 = 1_000_000;

fn small_primes() -> &'static [u32] {
    static P: OnceLock<Vec<u32>> = OnceLock::new();
    P.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&i| sieve[i]).map(|i| i as u32).collect()
    })
}

fn cache() -> &'static Mutex<HashMap<BigUint, (BigUint, BigUint)>> {
    static C: OnceLock<Mutex<HashMap<BigUint, (BigUint, BigUint)>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Returns `(k, s)` with `n = k²·s` and `s` squarefree. `n = 0` gives `(0, 0)`.
pub fn squarefree_decompose(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::zero());
    }
    if let Some(hit) = cache().lock().unwrap().get(n) {
        return hit.clone();
    }
    let mut k = BigUint::one();
    let mut s = BigUint::one();
    let mut m = n.clone();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0u32;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            k *= pb.pow(e / 2);
            if e % 2 == 1 {
                s *= &pb;
            }
        }
    }
    if !m.is_one() {
        let bound = BigUint::from(TRIAL_LIMIT) * BigUint::from(TRIAL_LIMIT);
        if m < bound {
            // no factor below the trial limit: m is prime
            s *= &m;
        } else {
            let mut factors = Vec::new();
            factor_into(&m, &mut factors);
            factors.sort();
            let mut i = 0;
            while i < factors.len() {
                let mut j = i;
                while j < factors.len() && factors[j] == factors[i] {
                    j += 1;
                }
                let e = (j - i) as u32;
                k *= factors[i].pow(e / 2);
                if e % 2 == 1 {
                    s *= &factors[i];
                }
                i = j;
            }
        }
    }
    let out = (k, s);
    cache().lock().unwrap().insert(n.clone(), out.clone());
    out
}

pub fn is_perfect_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

fn mod_pow(b: &BigUint, e: &BigUint, m: &BigUint) -> BigUint {
    b.modpow(e, m)
}

/// Miller-Rabin with the first twelve prime bases; deterministic below 3.3e24.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    const BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        let pb = BigUint::from(p);
        if *n == pb {
            return true;
        }
        if (n % &pb).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let mut d = n1.clone();
    let mut r = 0;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'outer: for &a in &BASES {
        let mut x = mod_pow(&BigUint::from(a), &d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..r {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 64u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > (1 << 24) {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

/// Montgomery arithmetic modulo an odd `n < 2^(64·N)`, limbs little-endian.
struct Mont<const N: usize> {
    n: [u64; N],
    ninv: u64,
}

impl<const N: usize> Mont<N> {
    fn new(n: &BigUint) -> Mont<N> {
        let mut limbs = [0u64; N];
        for (l, d) in limbs.iter_mut().zip(n.iter_u64_digits()) {
            *l = d;
        }
        // Newton iteration for n⁻¹ mod 2⁶⁴
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(limbs[0].wrapping_mul(inv)));
        }
        Mont { n: limbs, ninv: inv.wrapping_neg() }
    }

    fn limbs(x: &BigUint) -> [u64; N] {
        let mut out = [0u64; N];
        for (l, d) in out.iter_mut().zip(x.iter_u64_digits()) {
            *l = d;
        }
        out
    }

    fn to_big(x: &[u64; N]) -> BigUint {
        let mut bytes = Vec::with_capacity(8 * N);
        for l in x {
            bytes.extend_from_slice(&l.to_le_bytes());
        }
        BigUint::from_bytes_le(&bytes)
    }

    fn geq(a: &[u64; N], b: &[u64; N]) -> bool {
        for i in (0..N).rev() {
            if a[i] != b[i] {
                return a[i] > b[i];
            }
        }
        true
    }

    fn sub_in_place(a: &mut [u64; N], b: &[u64; N]) -> bool {
        let mut borrow = false;
        for i in 0..N {
            let (d, b1) = a[i].overflowing_sub(b[i]);
            let (d, b2) = d.overflowing_sub(borrow as u64);
            a[i] = d;
            borrow = b1 || b2;
        }
        borrow
    }

    fn add_in_place(a: &mut [u64; N], b: &[u64; N]) {
        let mut carry = 0u128;
        for i in 0..N {
            let s = a[i] as u128 + b[i] as u128 + carry;
            a[i] = s as u64;
            carry = s >> 64;
        }
    }

    /// `a·b·R⁻¹ mod n` (CIOS).
    fn mul(&self, a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        let mut t = [0u64; 18];
        for i in 0..N {
            let mut c: u128 = 0;
            for j in 0..N {
                let s = t[j] as u128 + a[j] as u128 * b[i] as u128 + c;
                t[j] = s as u64;
                c = s >> 64;
            }
            let s = t[N] as u128 + c;
            t[N] = s as u64;
            t[N + 1] = (s >> 64) as u64;
            let m = t[0].wrapping_mul(self.ninv);
            let s = t[0] as u128 + m as u128 * self.n[0] as u128;
            let mut c = s >> 64;
            for j in 1..N {
                let s = t[j] as u128 + m as u128 * self.n[j] as u128 + c;
                t[j - 1] = s as u64;
                c = s >> 64;
            }
            let s = t[N] as u128 + c;
            t[N - 1] = s as u64;
            t[N] = t[N + 1] + (s >> 64) as u64;
        }
        let mut out = [0u64; N];
        out.copy_from_slice(&t[..N]);
        if t[N] != 0 || Self::geq(&out, &self.n) {
            Self::sub_in_place(&mut out, &self.n);
        }
        out
    }

    fn add_mod(&self, a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        let mut out = *a;
        Self::add_in_place(&mut out, b);
        // a, b < n < 2^(64N−1) keeps the sum below 2^(64N)
        if Self::geq(&out, &self.n) {
            Self::sub_in_place(&mut out, &self.n);
        }
        out
    }

    fn sub_mod(&self, a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        let mut out = *a;
        if Self::sub_in_place(&mut out, b) {
            Self::add_in_place(&mut out, &self.n);
        }
        out
    }

    fn to_mont(&self, x: &BigUint, r2: &[u64; N]) -> [u64; N] {
        self.mul(&Self::limbs(x), r2)
    }

    fn abs_diff(a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        let (mut hi, lo) = if Self::geq(a, b) { (*a, b) } else { (*b, a) };
        Self::sub_in_place(&mut hi, lo);
        hi
    }
}

/// Brent's variant of Pollard rho in fixed-width Montgomery form. The
/// iteration is x ↦ x² + c in the Montgomery domain, an equally good
/// pseudo-random map; gcds are unaffected since R is a unit mod n.
fn pollard_brent_fixed<const N: usize>(n: &BigUint, c: u64) -> Option<BigUint> {
    pollard_brent_budget::<N>(n, c, 1 << 28)
}

fn pollard_brent_budget<const N: usize>(n: &BigUint, c: u64, budget: u64) -> Option<BigUint> {
    let mont = Mont::<N>::new(n);
    let c = Mont::<N>::limbs(&(BigUint::from(c) % n));
    let f = |x: &[u64; N]| mont.add_mod(&mont.mul(x, x), &c);
    let mut y = Mont::<N>::limbs(&(BigUint::from(2u32) % n));
    let mut q = Mont::<N>::limbs(&(BigUint::from(3u32) % n));
    let mut g = BigUint::one();
    let mut x = y;
    let mut ys = y;
    let m = 128u64;
    let mut r = 1u64;
    while g.is_one() {
        x = y;
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let d = Mont::<N>::abs_diff(&x, &y);
                if d != [0u64; N] {
                    q = mont.mul(&q, &d);
                } else {
                    // collision: let the slow path below resolve it
                    q = [0u64; N];
                }
            }
            g = Mont::<N>::to_big(&q).gcd(n);
            k += m;
        }
        r *= 2;
        if g.is_one() && r > budget {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = Mont::<N>::to_big(&Mont::<N>::abs_diff(&x, &ys)).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

/// Projective x-coordinate on a Montgomery curve, Montgomery-domain limbs.
#[derive(Clone, Copy)]
struct XZ<const N: usize> {
    x: [u64; N],
    z: [u64; N],
}

struct Curve<'a, const N: usize> {
    m: &'a Mont<N>,
    a24: [u64; N],
}

impl<const N: usize> Curve<'_, N> {
    fn dbl(&self, p: &XZ<N>) -> XZ<N> {
        let m = self.m;
        let s = m.add_mod(&p.x, &p.z);
        let d = m.sub_mod(&p.x, &p.z);
        let t1 = m.mul(&s, &s);
        let t2 = m.mul(&d, &d);
        let t3 = m.sub_mod(&t1, &t2);
        XZ { x: m.mul(&t1, &t2), z: m.mul(&t3, &m.add_mod(&t2, &m.mul(&self.a24, &t3))) }
    }

    /// `p + q` given `p − q`.
    fn add(&self, p: &XZ<N>, q: &XZ<N>, diff: &XZ<N>) -> XZ<N> {
        let m = self.m;
        let u = m.mul(&m.sub_mod(&p.x, &p.z), &m.add_mod(&q.x, &q.z));
        let v = m.mul(&m.add_mod(&p.x, &p.z), &m.sub_mod(&q.x, &q.z));
        let s = m.add_mod(&u, &v);
        let d = m.sub_mod(&u, &v);
        XZ { x: m.mul(&diff.z, &m.mul(&s, &s)), z: m.mul(&diff.x, &m.mul(&d, &d)) }
    }

    fn ladder(&self, p: &XZ<N>, k: u64) -> XZ<N> {
        if k == 1 {
            return *p;
        }
        let mut r0 = *p;
        let mut r1 = self.dbl(p);
        for i in (0..63 - k.leading_zeros()).rev() {
            if (k >> i) & 1 == 1 {
                r0 = self.add(&r1, &r0, p);
                r1 = self.dbl(&r1);
            } else {
                r1 = self.add(&r1, &r0, p);
                r0 = self.dbl(&r0);
            }
        }
        r0
    }
}

fn nontrivial(g: BigUint, n: &BigUint) -> Option<BigUint> {
    (!g.is_one() && &g != n && !g.is_zero()).then_some(g)
}

/// Lenstra's elliptic curve method on Suyama curves σ = 6, 7, …: stage 1
/// to `b1`, then a baby-step giant-step stage 2 to `b2` over residues
/// coprime to 210.
fn ecm_fixed<const N: usize>(n: &BigUint, b1: u64, b2: u64, curves: u64) -> Option<BigUint> {
    const D: u64 = 210;
    let m = Mont::<N>::new(n);
    let r2 = Mont::<N>::limbs(&((BigUint::one() << (128 * N)) % n));
    for sigma in 6..6 + curves {
        let sg = BigUint::from(sigma) % n;
        let u = (&sg * &sg + n - BigUint::from(5u32) % n) % n;
        let v = (&sg * 4u32) % n;
        let u3 = u.modpow(&BigUint::from(3u32), n);
        let den = (&u3 * &v * 16u32) % n;
        let Some(inv) = den.modinv(n) else {
            if let Some(g) = nontrivial(den.gcd(n), n) {
                return Some(g);
            }
            continue;
        };
        let vmu = (&v + n - &u) % n;
        let num = (vmu.modpow(&BigUint::from(3u32), n) * ((&u * 3u32 + &v) % n)) % n;
        let curve = Curve { m: &m, a24: m.to_mont(&(num * inv % n), &r2) };
        let mut q = XZ { x: m.to_mont(&u3, &r2), z: m.to_mont(&v.modpow(&BigUint::from(3u32), n), &r2) };
        for &p in small_primes() {
            let p = p as u64;
            if p > b1 {
                break;
            }
            let mut pe = p;
            while pe * p <= b1 {
                pe *= p;
            }
            q = curve.ladder(&q, pe);
        }
        let g = Mont::<N>::to_big(&q.z).gcd(n);
        if let Some(g) = nontrivial(g.clone(), n) {
            return Some(g);
        }
        if g == *n {
            continue;
        }
        // baby steps [j]Q for odd j < D/2
        let q2 = curve.dbl(&q);
        let mut baby = vec![q];
        let mut j = 3;
        while j < D / 2 {
            let prev = baby[baby.len() - 1];
            let diff = if baby.len() >= 2 { baby[baby.len() - 2] } else { q };
            baby.push(curve.add(&prev, &q2, &diff));
            j += 2;
        }
        let baby: Vec<XZ<N>> =
            baby.into_iter().enumerate().filter(|(i, _)| gcd_u64(2 * *i as u64 + 1, D) == 1).map(|(_, p)| p).collect();
        let qd = curve.ladder(&q, D);
        let m0 = (b1 / D).max(2);
        let mut prev = curve.ladder(&q, (m0 - 1) * D);
        let mut cur = curve.ladder(&q, m0 * D);
        let mut acc = Mont::<N>::limbs(&BigUint::one());
        for _ in m0..=b2 / D {
            for s in &baby {
                let t = m.sub_mod(&m.mul(&cur.x, &s.z), &m.mul(&s.x, &cur.z));
                acc = m.mul(&acc, &t);
            }
            let next = curve.add(&cur, &qd, &prev);
            prev = cur;
            cur = next;
        }
        if let Some(g) = nontrivial(Mont::<N>::to_big(&acc).gcd(n), n) {
            return Some(g);
        }
    }
    None
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

macro_rules! by_width {
    ($n:expr, $f:ident, $slow:expr, $($arg:expr),*) => {
        match $n.bits() {
            0..=127 => $f::<2>($n, $($arg),*),
            128..=191 => $f::<3>($n, $($arg),*),
            192..=255 => $f::<4>($n, $($arg),*),
            256..=383 => $f::<6>($n, $($arg),*),
            384..=511 => $f::<8>($n, $($arg),*),
            _ => $slow,
        }
    };
}

/// Dispatches to the narrowest fixed width; `n` must be odd.
fn pollard_rho(n: &BigUint, c: u64) -> Option<BigUint> {
    by_width!(n, pollard_brent_fixed, pollard_brent(n, c), c)
}

/// A nontrivial factor of an odd composite: short rho, then ECM with
/// growing bounds, then rho without a budget.
fn split(n: &BigUint) -> BigUint {
    if let Some(d) = by_width!(n, pollard_brent_budget, None, 1, 1 << 16) {
        return d;
    }
    for (b1, b2, curves) in [(2_000, 150_000, 25), (11_000, 1_100_000, 90), (50_000, 5_000_000, 300)] {
        if let Some(d) = by_width!(n, ecm_fixed, None, b1, b2, curves) {
            return d;
        }
    }
    (1u64..).find_map(|c| pollard_rho(n, c)).expect("rho terminates on composites")
}

fn factor_into(n: &BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(n) {
        out.push(n.clone());
        return;
    }
    if is_perfect_square(n) {
        let r = n.sqrt();
        factor_into(&r, out);
        factor_into(&r, out);
        return;
    }
    let d = split(n);
    factor_into(&d, out);
    factor_into(&(n / &d), out);
}

/// Squarefree kernel of a machine integer, for tests and small radicands.
pub fn squarefree_part_u64(n: u64) -> u64 {
    squarefree_decompose(&BigUint::from(n)).1.to_u64().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(n: u128) -> (u128, u128) {
        let (k, s) = squarefree_decompose(&BigUint::from(n));
        (k.to_u128().unwrap(), s.to_u128().unwrap())
    }

    #[test]
    fn small_cases() {
        assert_eq!(dec(1), (1, 1));
        assert_eq!(dec(12), (2, 3));
        assert_eq!(dec(72), (6, 2));
        assert_eq!(dec(151905), (1, 151905));
        assert_eq!(dec(49 * 87), (7, 87));
    }

    #[test]
    fn large_semiprime_squares() {
        let p: u128 = 1_000_003;
        let q: u128 = 998_244_353;
        assert_eq!(dec(p * p * q), (p, q));
        assert_eq!(dec(p * q * 5), (1, p * q * 5));
        let big = 2_305_843_009_213_693_951u128; // 2^61 - 1
        assert_eq!(dec(big * 9), (3, big));
    }

    #[test]
    fn montgomery_product_matches_bigint() {
        let n = BigUint::parse_bytes(b"689183964733372929567436591447606183419", 10).unwrap();
        let m = Mont::<3>::new(&n);
        let r: BigUint = BigUint::one() << 192;
        let rinv = r.modinv(&n).unwrap();
        let a = BigUint::parse_bytes(b"123456789012345678901234567890123", 10).unwrap();
        let b = &n - 17u32;
        let got = Mont::<3>::to_big(&m.mul(&Mont::<3>::limbs(&a), &Mont::<3>::limbs(&b)));
        assert_eq!(got, a * b * rinv % &n);
    }

    #[test]
    fn wide_semiprimes_split() {
        // 51- and 79-bit primes, beyond trial division
        let p = BigUint::from(1_476_198_322_102_369u64);
        let q = BigUint::parse_bytes(b"466866475484944018250251", 10).unwrap();
        let n = &p * &q * &q * 3u32;
        let (k, s) = squarefree_decompose(&n);
        assert_eq!(k, q);
        assert_eq!(s, p * 3u32);
    }

    #[test]
    fn ecm_finds_a_sixteen_digit_factor() {
        let p = BigUint::from(1_476_198_322_102_369u64);
        let q = BigUint::parse_bytes(b"466866475484944018250251", 10).unwrap();
        let n = &p * &q;
        let d = ecm_fixed::<3>(&n, 11_000, 1_100_000, 90).expect("factor");
        assert!(d == p || d == q);
    }

    #[test]
    fn squarefree_products_of_many_primes() {
        // factored independently; every prime occurs once
        for n in [
            "12909307241275221030758815627356824414901963223605",
            "300414971722366381763764385707066542122640361693868939",
            "666327547827094178957671914289202623750129338686495156483546615943",
        ] {
            let n = BigUint::parse_bytes(n.as_bytes(), 10).unwrap();
            assert_eq!(squarefree_decompose(&(&n * 49u32)), (BigUint::from(7u32), n));
        }
    }

    #[test]
    fn brute_force_agreement() {
        for n in 1u128..3000 {
            let (k, s) = dec(n);
            assert_eq!(k * k * s, n);
            for p in 2..=s {
                if p * p > s {
                    break;
                }
                assert_ne!(s % (p * p), 0, "{n}");
            }
        }
    }
}
