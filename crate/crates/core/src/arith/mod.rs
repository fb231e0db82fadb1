//! Exact scalar arithmetic: rationals, quadratic surds, cyclotomic numbers,
//! the first two Bernoulli polynomials and the bracket maps used by the cone
//! recursions.

mod cyclo;
mod surd;

pub use cyclo::{cyclotomic_polynomial, euler_phi, CycloElement};
pub use surd::QuadSurd;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational with positive, reduced denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

/// The map onto (0, 1]: the usual fractional part, except integers go to 1.
pub fn frac_pos(x: &Rational) -> Rational {
    let f = x - x.floor();
    if f.is_zero() {
        Rational::one()
    } else {
        f
    }
}

/// `x - frac_pos(x)`; equals `floor(x)` off the integers and `x - 1` on them.
pub fn floor_strict(x: &Rational) -> BigInt {
    (x - frac_pos(x)).to_integer()
}

/// Representative of `m` modulo `q` in `[1, q]`.
pub fn residue_1q(m: i64, q: u64) -> u64 {
    assert!(q >= 1, "modulus must be positive");
    let r = m.rem_euclid(q as i64) as u64;
    if r == 0 {
        q
    } else {
        r
    }
}

pub fn residue_1q_big(m: &BigInt, q: u64) -> u64 {
    assert!(q >= 1, "modulus must be positive");
    let r = m.mod_floor(&BigInt::from(q)).to_u64().unwrap();
    if r == 0 {
        q
    } else {
        r
    }
}

/// Bernoulli polynomials `B_1(x) = x - 1/2` and `B_2(x) = x^2 - x + 1/6`.
pub fn bernoulli_poly(k: u32, x: &Rational) -> Rational {
    match k {
        1 => x - rat(1, 2),
        2 => x * x - x + rat(1, 6),
        _ => panic!("only B_1 and B_2 are supported, got k = {k}"),
    }
}

pub fn b1(x: &Rational) -> Rational {
    bernoulli_poly(1, x)
}

pub fn b2(x: &Rational) -> Rational {
    bernoulli_poly(2, x)
}

/// Canonical "num/den" form; integers keep the "/1".
pub fn rational_to_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |m: &str| Error::Parse {
        location: format!("rational {s:?}"),
        message: m.to_string(),
    };
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
    let d: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Decimal expansion truncated toward zero after `digits` places. Display only.
pub fn decimal_approx(x: &Rational, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a.numer() * &scale) / a.denom();
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let frac = format!("{:0>width$}", frac_part.to_string(), width = digits);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac)
}

pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Smallest prime whose square divides `n`, if any.
pub fn square_factor(n: u64) -> Option<u64> {
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return Some(p);
            }
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    None
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=isqrt_u64(n)).filter(|d| n.is_multiple_of(*d)).collect();
    let mut hi: Vec<u64> = out.iter().rev().map(|d| n / d).collect();
    if let (Some(a), Some(b)) = (out.last(), hi.first()) {
        if a == b {
            hi.remove(0);
        }
    }
    out.extend(hi);
    out
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Multiplicative order of `a` modulo `m`, `None` when `gcd(a, m) > 1`.
pub fn mult_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd_u64(a % m, m) != 1 {
        return None;
    }
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
    }
    Some(k)
}

/// Inverse of `a` modulo `m` when it exists.
pub fn inv_mod(a: &BigInt, m: u64) -> Option<u64> {
    let m_big = BigInt::from(m);
    let a = a.mod_floor(&m_big);
    let e = a.extended_gcd(&m_big);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(&m_big).to_u64().unwrap())
}

/// Reduce a rational modulo a prime `p`; `None` when `p` divides the denominator.
pub fn rational_mod_p(x: &Rational, p: u64) -> Option<u64> {
    let inv = inv_mod(x.denom(), p)?;
    let n = x.numer().mod_floor(&BigInt::from(p)).to_u64().unwrap();
    Some(((n as u128 * inv as u128) % p as u128) as u64)
}
