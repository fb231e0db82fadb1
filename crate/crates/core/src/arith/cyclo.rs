use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};

use super::{divisors, factorize, rational_mod_p, rational_to_string, Rational};

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Coefficients (lowest degree first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    assert!(n >= 1);
    // x^n - 1 divided by every Phi_d with d | n, d < n
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in divisors(n) {
        if d == n {
            continue;
        }
        poly = div_monic(&poly, &cyclotomic_polynomial(d));
    }
    let poly = Arc::new(poly);
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for k in (dn..num.len()).rev() {
        let c = rem[k];
        if c != 0 {
            quot[k - dn] = c;
            for (j, &dc) in den.iter().enumerate() {
                rem[k - dn + j] -= c * dc;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    quot
}

/// Element of `Q(zeta_o)` in the power basis `1, zeta, ..., zeta^(phi(o)-1)`,
/// reduced modulo the o-th cyclotomic polynomial.
///
/// Elements of different orders combine in the compositum `Q(zeta_lcm)`;
/// equality is numeric and therefore order-independent.
#[derive(Clone, Debug)]
pub struct CycloElement {
    order: u64,
    coeffs: Vec<Rational>,
}

impl CycloElement {
    pub fn zero(order: u64) -> Self {
        CycloElement {
            order,
            coeffs: vec![Rational::zero(); euler_phi(order) as usize],
        }
    }

    pub fn from_rational(order: u64, r: Rational) -> Self {
        let mut out = CycloElement::zero(order);
        out.coeffs[0] = r;
        out
    }

    pub fn one(order: u64) -> Self {
        CycloElement::from_rational(order, Rational::one())
    }

    /// `zeta_order ^ e`.
    pub fn zeta_pow(order: u64, e: u64) -> Self {
        let e = (e % order) as usize;
        let mut raw = vec![Rational::zero(); e + 1];
        raw[e] = Rational::one();
        CycloElement::reduce(order, raw)
    }

    /// Build from arbitrary-length power-basis coefficients, reducing them.
    pub fn from_coeffs(order: u64, raw: Vec<Rational>) -> Self {
        CycloElement::reduce(order, raw)
    }

    fn reduce(order: u64, mut raw: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        if raw.len() > deg {
            for k in (deg..raw.len()).rev() {
                let c = std::mem::take(&mut raw[k]);
                if c.is_zero() {
                    continue;
                }
                for (j, &pc) in phi.iter().enumerate().take(deg) {
                    if pc != 0 {
                        raw[k - deg + j] -= &c * Rational::from_integer(pc.into());
                    }
                }
            }
        }
        raw.resize(deg, Rational::zero());
        CycloElement { order, coeffs: raw }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn rational_value(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    pub fn has_integer_coords(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Re-express in `Q(zeta_target)`; `target` must be a multiple of the order.
    pub fn lift(&self, target: u64) -> Self {
        assert!(target.is_multiple_of(self.order), "cannot lift order {} to {}", self.order, target);
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut raw = vec![Rational::zero(); step * self.coeffs.len().max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        CycloElement::reduce(target, raw)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycloElement {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let l = self.order.lcm(&o.order);
        (self.lift(l), o.lift(l))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = CycloElement::one(self.order);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Image under `zeta_order -> image` in the integers mod `p`, where `image`
    /// must have multiplicative order `order` (so the map is a ring morphism).
    /// `None` when a denominator is divisible by `p`.
    pub fn reduce_mod_p(&self, image: u64, p: u64) -> Option<u64> {
        let mut acc = 0u128;
        let mut zpow = 1u128;
        for c in &self.coeffs {
            let cv = rational_mod_p(c, p)? as u128;
            acc = (acc + cv * zpow) % p as u128;
            zpow = zpow * image as u128 % p as u128;
        }
        Some(acc as u64)
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_to_string).collect()
    }
}

impl PartialEq for CycloElement {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloElement {}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match i {
                0 => terms.push(format!("{c}")),
                1 => terms.push(format!("{c}*z{}", self.order)),
                _ => terms.push(format!("{c}*z{}^{i}", self.order)),
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<'a> Add<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn add(self, o: &CycloElement) -> CycloElement {
        if self.order != o.order {
            let (a, b) = self.common(o);
            return &a + &b;
        }
        CycloElement {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl<'a> Sub<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn sub(self, o: &CycloElement) -> CycloElement {
        self + &(-o)
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        CycloElement {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn mul(self, o: &CycloElement) -> CycloElement {
        if self.order != o.order {
            let (a, b) = self.common(o);
            return &a * &b;
        }
        let n = self.coeffs.len();
        let mut raw = vec![Rational::zero(); 2 * n - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        CycloElement::reduce(self.order, raw)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloElement> for CycloElement {
            type Output = CycloElement;
            fn $m(self, o: CycloElement) -> CycloElement {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for CycloElement {
    fn sum<I: Iterator<Item = CycloElement>>(iter: I) -> Self {
        iter.fold(CycloElement::zero(1), |acc, x| &acc + &x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
        assert_eq!(euler_phi(105), 48);
    }

    #[test]
    fn zeta_to_its_order_is_one() {
        for o in [1u64, 2, 3, 4, 5, 6, 8, 12, 15, 20] {
            let z = CycloElement::zeta_pow(o, 1);
            assert_eq!(z.pow(o), CycloElement::one(o), "order {o}");
            assert_eq!(CycloElement::zeta_pow(o, o), CycloElement::one(o));
        }
    }

    #[test]
    fn gaussian_arithmetic() {
        let i = CycloElement::zeta_pow(4, 1);
        assert_eq!(&i * &i, CycloElement::from_rational(4, rat(-1, 1)));
        // -1 lives in Q(zeta_2) and Q(zeta_4) alike
        assert_eq!(CycloElement::zeta_pow(2, 1), &i * &i);
        // zeta_4 = zeta_12^3
        assert_eq!(i, CycloElement::zeta_pow(12, 3));
    }

    #[test]
    fn mod_p_image() {
        // -3 - i under i -> 2 mod 5 is -5 = 0
        let i = CycloElement::zeta_pow(4, 1);
        let x = &CycloElement::from_rational(4, rat(-3, 1)) - &i;
        assert_eq!(x.reduce_mod_p(2, 5), Some(0));
        assert_eq!(x.reduce_mod_p(3, 5), Some(4));
    }

    fn arb_elem(order: u64) -> impl Strategy<Value = CycloElement> {
        let n = euler_phi(order) as usize;
        proptest::collection::vec((-20i64..20, 1i64..6), n)
            .prop_map(move |v| CycloElement::from_coeffs(order, v.into_iter().map(|(a, b)| rat(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn ring_axioms_order_12(a in arb_elem(12), b in arb_elem(12), c in arb_elem(12)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn ring_axioms_order_5(a in arb_elem(5), b in arb_elem(5), c in arb_elem(5)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn lifting_is_a_ring_map(a in arb_elem(4), b in arb_elem(6)) {
            let prod = &a * &b;
            prop_assert_eq!(prod.order(), 12);
            prop_assert_eq!(&a.lift(12) * &b.lift(12), prod);
        }
    }
}
