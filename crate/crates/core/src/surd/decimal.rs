use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::RadicalSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Nearest,
    Truncate,
}

/// Decimal rendering. `exact` means the text equals the value; `tie` means the
/// value sat exactly halfway and was rounded away from zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decimal {
    pub text: String,
    pub exact: bool,
    pub tie: bool,
}

/// `floor(y)` and whether `y` is that integer.
fn floor_exact(y: &RadicalSum) -> (BigInt, bool) {
    if let Some(q) = y.rational_value() {
        let f = q.floor().to_integer();
        return (f.clone(), q == BigRational::from_integer(f));
    }
    let mut bits = 64;
    loop {
        let iv = y.enclose_bits(bits);
        let a = iv.lo.floor().to_integer();
        let b = iv.hi.floor().to_integer();
        if a == b && !iv.hi.is_integer() {
            return (a, false);
        }
        bits *= 2;
    }
}

fn digits_of(n: &BigInt, frac: usize) -> String {
    let s = n.to_string();
    if frac == 0 {
        return s;
    }
    let s = if s.len() <= frac { format!("{}{}", "0".repeat(frac + 1 - s.len()), s) } else { s };
    let (a, b) = s.split_at(s.len() - frac);
    format!("{a}.{b}")
}

/// Round or truncate `y ≥ 0` to an integer.
fn to_integer(y: &RadicalSum, mode: Rounding) -> (BigInt, bool, bool) {
    match mode {
        Rounding::Truncate => {
            let (f, exact) = floor_exact(y);
            (f, exact, false)
        }
        Rounding::Nearest => {
            let half = RadicalSum::ratio(1, 2);
            let (f, on_int) = floor_exact(&(y + &half));
            let exact = y.rational_value().is_some_and(|q| q == BigRational::from_integer(f.clone()));
            (f, exact, on_int && !exact)
        }
    }
}

pub(super) fn render(x: &RadicalSum, frac: usize, mode: Rounding) -> Decimal {
    let sign = x.sign();
    if sign == 0 {
        return Decimal { text: digits_of(&BigInt::zero(), frac), exact: true, tie: false };
    }
    let a = x.abs();
    let prefix = if sign < 0 { "-" } else { "" };
    let tenth = RadicalSum::ratio(1, 1000);
    if a >= tenth {
        let y = &a * &RadicalSum::pow10(frac as i32);
        let (n, exact, tie) = to_integer(&y, mode);
        return Decimal { text: format!("{prefix}{}", digits_of(&n, frac)), exact, tie };
    }
    // scientific: find e with 10^e ≤ a < 10^(e+1)
    let mut e = a.to_f64().log10().floor() as i32;
    while a < RadicalSum::pow10(e) {
        e -= 1;
    }
    while a >= RadicalSum::pow10(e + 1) {
        e += 1;
    }
    let y = &a * &RadicalSum::pow10(frac as i32 - e);
    let (mut n, exact, tie) = to_integer(&y, mode);
    if n == BigInt::from(10).pow(frac as u32 + 1) {
        n = BigInt::from(10).pow(frac as u32);
        e += 1;
    }
    Decimal { text: format!("{prefix}{}e{}", digits_of(&n, frac), e), exact, tie }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt5_both_modes() {
        let x = RadicalSum::sqrt_int(5);
        assert_eq!(x.to_decimal(10, Rounding::Nearest).text, "2.2360679775");
        assert_eq!(x.to_decimal(10, Rounding::Truncate).text, "2.2360679774");
    }

    #[test]
    fn ties_and_exact_values() {
        let d = RadicalSum::ratio(5, 4).to_decimal(1, Rounding::Nearest);
        assert_eq!(d.text, "1.3");
        assert!(d.tie && !d.exact);
        let d = RadicalSum::ratio(5, 4).to_decimal(2, Rounding::Nearest);
        assert_eq!(d.text, "1.25");
        assert!(d.exact && !d.tie);
        assert_eq!(RadicalSum::ratio(-1, 3).to_decimal(3, Rounding::Nearest).text, "-0.333");
    }

    #[test]
    fn scientific_for_small_values() {
        let x = RadicalSum::ratio(91094243388, 1_000_000_000_000_000_000);
        assert_eq!(x.to_decimal(4, Rounding::Nearest).text, "9.1094e-8");
        let y = RadicalSum::ratio(99999, 100_000_000_000);
        assert_eq!(y.to_decimal(2, Rounding::Nearest).text, "1.00e-6");
        assert_eq!(RadicalSum::zero().to_decimal(2, Rounding::Nearest).text, "0.00");
    }
}
