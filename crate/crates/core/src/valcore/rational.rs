//! Helpers on arbitrary-precision rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"` or `"n/d"` with optional leading sign.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = |m: &str| Error::schema("", format!("invalid rational {s:?}: {m}"));
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let int = |x: &str| -> Result<BigInt> {
        let digits = x.strip_prefix('-').or_else(|| x.strip_prefix('+')).unwrap_or(x);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected an integer"));
        }
        x.parse::<BigInt>().map_err(|_| bad("expected an integer"))
    };
    let num = int(n)?;
    let den = match d {
        Some(d) => int(d)?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Q::new(num, den))
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Exponent of `p` in a nonzero integer.
pub fn val_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (qt, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = qt;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn val_q(x: &Q, p: u64) -> i64 {
    val_int(x.numer(), p) - val_int(x.denom(), p)
}

/// p-adic valuation of k! (Legendre).
pub fn val_factorial(k: u64, p: u64) -> i64 {
    let mut s = 0u64;
    let mut pk = p;
    while pk <= k {
        s += k / pk;
        pk = match pk.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
    }
    s as i64
}

pub fn floor_q(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

pub fn ceil_i64(x: &Q) -> i64 {
    ceil_q(x).to_i64().unwrap_or(if x.is_positive() { i64::MAX / 4 } else { i64::MIN / 4 })
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Inverse of `a` modulo `m` (gcd must be 1).
pub fn mod_inv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Residue of a p-integral rational modulo `m` in `[0, m)`.
pub fn residue(x: &Q, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inv(x.denom(), m)?;
    Some((x.numer() * inv).mod_floor(m))
}

/// Truncated p-adic expansion: a rational `y` with `val(x − y) ≥ n`, of the form
/// `p^v · k` with `0 ≤ k < p^(n−v)`. Returns 0 when `val(x) ≥ n`.
pub fn padic_round(x: &Q, p: u64, n: i64) -> Q {
    if x.is_zero() {
        return Q::zero();
    }
    let v = val_q(x, p);
    if v >= n {
        return Q::zero();
    }
    let unit = x / pow_q(p, v);
    let m = pow_big(p, (n - v) as u32);
    let k = residue(&unit, &m).expect("unit is p-integral");
    Q::from_integer(k) * pow_q(p, v)
}

pub fn pow_q(p: u64, e: i64) -> Q {
    let b = Q::from_integer(pow_big(p, e.unsigned_abs() as u32));
    if e >= 0 {
        b
    } else {
        b.recip()
    }
}

pub fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max_q(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn abs_q(a: &Q) -> Q {
    a.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse_q("-4").unwrap(), q(-4));
        assert_eq!(fmt_q(&qf(-6, 4)), "-3/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("").is_err());
        assert!(parse_q("1/-").is_err());
        assert!(parse_q("0x3").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(val_q(&qf(12, 5), 2), 2);
        assert_eq!(val_q(&qf(5, 24), 2), -3);
        assert_eq!(val_factorial(64, 2), 63);
        assert_eq!(val_factorial(25, 5), 6);
    }

    #[test]
    fn rounding_is_close() {
        let x = qf(7, 3);
        for n in 0..12 {
            let y = padic_round(&x, 2, n);
            let d = &x - &y;
            assert!(d.is_zero() || val_q(&d, 2) >= n);
        }
        assert_eq!(padic_round(&q(8), 2, 3), q(0));
        assert_eq!(padic_round(&q(5), 2, 2), q(1));
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(3) && is_prime(5) && is_prime(97));
        assert!(!is_prime(4) && !is_prime(1) && !is_prime(0));
    }
}
