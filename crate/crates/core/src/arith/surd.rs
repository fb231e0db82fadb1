use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// An element `(a + b*sqrt(d)) / c` of the real quadratic field `Q(sqrt(d))`,
/// embedded with `sqrt(d) > 0`.
///
/// The representation is kept canonical: `c > 0` and `gcd(a, b, c) = 1`, so
/// structural equality is numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: u64,
}

impl QuadSurd {
    pub fn new<A: Into<BigInt>, B: Into<BigInt>, C: Into<BigInt>>(a: A, b: B, c: C, d: u64) -> Self {
        let (mut a, mut b, mut c) = (a.into(), b.into(), c.into());
        assert!(!c.is_zero(), "zero denominator in quadratic surd");
        assert!(d > 1, "radicand must exceed 1");
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        QuadSurd { a, b, c, d }
    }

    pub fn from_rational(x: &Rational, d: u64) -> Self {
        QuadSurd::new(x.numer().clone(), 0, x.denom().clone(), d)
    }

    pub fn from_int<A: Into<BigInt>>(a: A, d: u64) -> Self {
        QuadSurd::new(a, 0, 1, d)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_d(d: u64) -> Self {
        QuadSurd::new(0, 1, 1, d)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational()
            .then(|| Rational::new(self.a.clone(), self.c.clone()))
    }

    pub fn conj(&self) -> Self {
        QuadSurd {
            a: self.a.clone(),
            b: -&self.b,
            c: self.c.clone(),
            d: self.d,
        }
    }

    /// Rational coordinates `(x, y)` with `self = x + y*sqrt(d)`.
    pub fn coords(&self) -> (Rational, Rational) {
        (
            Rational::new(self.a.clone(), self.c.clone()),
            Rational::new(self.b.clone(), self.c.clone()),
        )
    }

    pub fn from_coords(x: &Rational, y: &Rational, d: u64) -> Self {
        let den = x.denom().lcm(y.denom());
        let a = x.numer() * (&den / x.denom());
        let b = y.numer() * (&den / y.denom());
        QuadSurd::new(a, b, den, d)
    }

    pub fn trace(&self) -> Rational {
        Rational::new(BigInt::from(2) * &self.a, self.c.clone())
    }

    pub fn norm(&self) -> Rational {
        Rational::new(
            &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d),
            &self.c * &self.c,
        )
    }

    /// Exact sign of the real value: -1, 0 or +1.
    pub fn sign(&self) -> i32 {
        let sa = sgn(&self.a);
        let sb = sgn(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with b^2 d; equality would make d a square
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * BigInt::from(self.d);
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    pub fn floor(&self) -> BigInt {
        let bd = &self.b * &self.b * BigInt::from(self.d);
        let root = bd.sqrt();
        let floor_bsqrt = if self.b.is_negative() {
            if &root * &root == bd {
                -root
            } else {
                -root - 1
            }
        } else {
            root
        };
        (&self.a + floor_bsqrt).div_floor(&self.c)
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        // c / (a + b r) = c (a - b r) / (a^2 - b^2 d)
        let n = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        QuadSurd::new(&self.c * &self.a, -(&self.c * &self.b), n, self.d)
    }

    pub fn add_int(&self, k: i64) -> Self {
        QuadSurd::new(&self.a + &self.c * BigInt::from(k), self.b.clone(), self.c.clone(), self.d)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadSurd::new(
            &self.a * r.numer(),
            &self.b * r.numer(),
            &self.c * r.denom(),
            self.d,
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QuadSurd::from_int(1, self.d);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Low-precision value for messages and display; never used in decisions.
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        (a + b * (self.d as f64).sqrt()) / c
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(self.d, other.d, "mixing elements of different quadratic fields");
    }
}

fn sgn(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.c.is_one() {
            write!(f, "{}{}{}*sqrt({})", self.a, sign, self.b.abs(), self.d)
        } else {
            write!(f, "({}{}{}*sqrt({}))/{}", self.a, sign, self.b.abs(), self.d, self.c)
        }
    }
}

impl<'a> Add<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn add(self, o: &QuadSurd) -> QuadSurd {
        self.check_field(o);
        QuadSurd::new(
            &self.a * &o.c + &o.a * &self.c,
            &self.b * &o.c + &o.b * &self.c,
            &self.c * &o.c,
            self.d,
        )
    }
}

impl<'a> Sub<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn sub(self, o: &QuadSurd) -> QuadSurd {
        self + &(-o)
    }
}

impl<'a> Mul<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn mul(self, o: &QuadSurd) -> QuadSurd {
        self.check_field(o);
        let d = BigInt::from(self.d);
        QuadSurd::new(
            &self.a * &o.a + &self.b * &o.b * d,
            &self.a * &o.b + &self.b * &o.a,
            &self.c * &o.c,
            self.d,
        )
    }
}

impl<'a> Div<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &QuadSurd) -> QuadSurd {
        self * &o.inv()
    }
}

impl Neg for &QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd {
            a: -&self.a,
            b: -&self.b,
            c: self.c.clone(),
            d: self.d,
        }
    }
}

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: QuadSurd) -> QuadSurd {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: &QuadSurd) -> QuadSurd {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    #[test]
    fn sign_examples() {
        assert_eq!(QuadSurd::new(2, -1, 1, 2).sign(), 1);
        assert_eq!(QuadSurd::new(3, -1, 2, 13).sign(), -1);
        assert_eq!(QuadSurd::new(0, 0, 1, 7).sign(), 0);
    }

    #[test]
    fn canonical_form() {
        let x = QuadSurd::new(-4, 2, -6, 5);
        assert_eq!(x, QuadSurd::new(2, -1, 3, 5));
        assert_eq!(x.c(), &BigInt::from(3));
    }

    #[test]
    fn field_ops() {
        let phi = QuadSurd::new(1, 1, 2, 5);
        assert_eq!(&phi * &phi, phi.add_int(1));
        assert_eq!(phi.norm(), rat(-1, 1));
        assert_eq!(phi.trace(), rat(1, 1));
        assert_eq!(&phi * &phi.inv(), QuadSurd::from_int(1, 5));
        assert_eq!(phi.floor(), BigInt::from(1));
        assert_eq!(phi.conj().floor(), BigInt::from(-1));
        assert_eq!(phi.ceil(), BigInt::from(2));
        assert_eq!(QuadSurd::new(6, 1, 3, 15).floor(), BigInt::from(3));
    }

    /// Decide the sign with 100-digit fixed-point arithmetic on a bracketed
    /// square root, independently of the exact case analysis.
    fn interval_sign(a: i64, b: i64, d: u64) -> Option<i32> {
        let scale = num_traits::pow(BigInt::from(10), 100);
        let bd = BigInt::from(b) * BigInt::from(b) * BigInt::from(d);
        let lo: BigInt = (&bd * &scale * &scale).sqrt();
        let hi: BigInt = &lo + 1;
        let (lo, hi) = if b < 0 { (-hi, -lo) } else { (lo, hi) };
        let base = BigInt::from(a) * &scale;
        let lo_v = &base + lo;
        let hi_v = &base + hi;
        if lo_v.is_positive() {
            Some(1)
        } else if hi_v.is_negative() {
            Some(-1)
        } else if a == 0 && b == 0 {
            Some(0)
        } else {
            None
        }
    }

    #[test]
    fn sign_agrees_with_interval_approximation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let radicands = [2u64, 3, 5, 6, 7, 10, 13, 15, 29, 101, 9973];
        for _ in 0..1000 {
            let d = radicands[rng.gen_range(0..radicands.len())];
            let b: i64 = rng.gen_range(-1000..1000);
            // bias a toward the boundary |a| ~ |b| sqrt(d)
            let near = ((b as f64).abs() * (d as f64).sqrt()) as i64;
            let a: i64 = if rng.gen_bool(0.5) { near + rng.gen_range(-2..3) } else { rng.gen_range(-50_000..50_000) };
            let a = if rng.gen_bool(0.5) { a } else { -a };
            let c: i64 = rng.gen_range(1..50);
            let x = QuadSurd::new(a, b, c, d);
            assert_eq!(Some(x.sign()), interval_sign(a, b, d), "a={a} b={b} d={d}");
        }
    }

    proptest! {
        #[test]
        fn floor_brackets_value(a in -500i64..500, b in -50i64..50, c in 1i64..40, di in 0usize..5) {
            let d = [2u64, 3, 5, 13, 15][di];
            let x = QuadSurd::new(a, b, c, d);
            let f = x.floor();
            let lo = QuadSurd::from_int(f.clone(), d);
            let hi = QuadSurd::from_int(f + 1, d);
            prop_assert!(lo <= x && x < hi);
        }
    }
}
