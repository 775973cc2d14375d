//! Integer and rational helpers shared by the rest of the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut q = 3;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

/// Primes `p` with `p <= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}

/// Distinct prime divisors of `|n|` by trial division, ascending.
pub fn prime_divisors(n: &Int) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut q: u64 = 2;
    loop {
        let qq = Int::from(q);
        if &qq * &qq > n {
            break;
        }
        if (&n % &qq).is_zero() {
            out.push(q);
            while (&n % &qq).is_zero() {
                n /= &qq;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > Int::one() {
        out.push(n.to_u64().expect("prime factor exceeds u64"));
    }
    out
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n.unsigned_abs();
    let mut q = 2u64;
    while q * q <= m {
        if m.is_multiple_of(q) {
            m /= q;
            if m.is_multiple_of(q) {
                return false;
            }
        }
        q += 1;
    }
    true
}

/// `v_p(n)` for a nonzero integer.
pub fn vp_int(n: &Int, p: u64) -> i64 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = Int::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(x)` for a nonzero rational.
pub fn vp_rat(x: &Rat, p: u64) -> i64 {
    vp_int(x.numer(), p) - vp_int(x.denom(), p)
}

/// Nearest integer, ties rounded down.
pub fn round_rat(x: &Rat) -> Int {
    let twice = x * Rat::from_integer(int(2));
    let num = twice.numer() + twice.denom();
    let den = twice.denom() * int(2);
    let (q, r) = num.div_mod_floor(&den);
    if r.is_zero() {
        q - 1
    } else {
        q
    }
}

pub fn isqrt(n: &Int) -> Int {
    assert!(!n.is_negative());
    n.sqrt()
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Reduce a rational with denominator prime to the modulus.
pub fn rat_mod(x: &Rat, m: &Int) -> Option<Int> {
    let inv = mod_inverse(x.denom(), m)?;
    Some((x.numer() * inv).mod_floor(m))
}

/// Parse `"n"`, `"p/q"`; the unicode minus sign is accepted.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let t = s.trim().replace('\u{2212}', "-");
    let bad = || Error::input(format!("malformed rational {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim().to_string(), d.trim().to_string()),
        None => (t.clone(), "1".to_string()),
    };
    let n: Int = n.parse().map_err(|_| bad())?;
    let d: Int = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::input(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

pub fn fmt_rational(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn lcm_all<'a>(it: impl IntoIterator<Item = &'a Int>) -> Int {
    it.into_iter().fold(Int::one(), |acc, x| acc.lcm(x))
}

pub fn gcd_all<'a>(it: impl IntoIterator<Item = &'a Int>) -> Int {
    it.into_iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_valuations() {
        assert_eq!(round_rat(&rat(5, 2)), int(2));
        assert_eq!(round_rat(&rat(-5, 2)), int(-3));
        assert_eq!(round_rat(&rat(7, 3)), int(2));
        assert_eq!(vp_rat(&rat(18, 5), 3), 2);
        assert_eq!(vp_rat(&rat(18, 25), 5), -2);
    }

    #[test]
    fn squarefree_and_primes() {
        assert!(is_squarefree(-17));
        assert!(!is_squarefree(-4));
        assert!(!is_squarefree(0));
        assert_eq!(prime_divisors(&int(-68)), vec![2, 17]);
        assert_eq!(primes_up_to(12), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("\u{2212}3/6").unwrap(), rat(-1, 2));
        assert_eq!(fmt_rational(&rat(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
