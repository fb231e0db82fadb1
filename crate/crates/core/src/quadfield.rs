//! Real quadratic fields: integral basis, units, ideal lattices and class
//! numbers small enough to enumerate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{gcd_u64, isqrt_u64, square_factor, QuadSurd, Rational};
use crate::cfrac::plus_expand;
use crate::error::{Error, Result};

pub const DEFAULT_CLASS_NUMBER_BOUND: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldData {
    pub d: u64,
    pub discriminant: u64,
    /// Generator of the maximal order, `O = [1, omega]`.
    pub omega: QuadSurd,
    /// Fundamental unit `> 1`.
    pub fund_unit: QuadSurd,
    pub fund_unit_norm: i32,
    /// Totally positive fundamental unit `> 1`.
    pub tp_fund_unit: QuadSurd,
}

pub fn make_field(d: u64) -> Result<FieldData> {
    if d <= 1 {
        return Err(Error::Invalid(format!("radicand must be > 1, got {d}")));
    }
    if let Some(p) = square_factor(d) {
        return Err(Error::NotSquarefree {
            value: d.to_string(),
            prime: p,
        });
    }
    let one_mod_four = d % 4 == 1;
    let omega = if one_mod_four {
        QuadSurd::new(1, 1, 2, d)
    } else {
        QuadSurd::sqrt_d(d)
    };
    let discriminant = if one_mod_four { d } else { 4 * d };

    // x = omega - ceil(omega') is reduced: x > 1 and -1 < x' < 0, so its
    // expansion is purely periodic and [1, x] = O.
    let shift = omega.conj().ceil();
    let x = &omega - &QuadSurd::from_int(shift, d);
    let cf = plus_expand(&x)?;
    if !cf.preperiod.is_empty() {
        return Err(Error::Internal(format!("reduced {x} has a preperiod")));
    }
    // denominators q_{l-1}, q_{l-2} of the last two convergents over one period
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    for &a in &cf.period {
        let next = BigInt::from(a) * &q_cur + &q_prev;
        q_prev = std::mem::replace(&mut q_cur, next);
    }
    let fund_unit = &(&x * &QuadSurd::from_int(q_cur, d)) + &QuadSurd::from_int(q_prev, d);
    let n = fund_unit.norm();
    let fund_unit_norm = if n == Rational::one() {
        1
    } else if n == -Rational::one() {
        -1
    } else {
        return Err(Error::Internal(format!("{fund_unit} has norm {n}, not a unit")));
    };
    let tp_fund_unit = if fund_unit_norm == 1 {
        fund_unit.clone()
    } else {
        &fund_unit * &fund_unit
    };
    Ok(FieldData {
        d,
        discriminant,
        omega,
        fund_unit,
        fund_unit_norm,
        tp_fund_unit,
    })
}

impl FieldData {
    fn one_mod_four(&self) -> bool {
        self.d % 4 == 1
    }

    /// Coordinates `(x, y)` with `z = x + y*omega`.
    pub fn to_basis(&self, z: &QuadSurd) -> (Rational, Rational) {
        assert_eq!(z.d(), self.d, "element of a different field");
        let (u, v) = z.coords();
        if self.one_mod_four() {
            // sqrt(d) = 2 omega - 1
            (&u - &v, &v * Rational::from_integer(2.into()))
        } else {
            (u, v)
        }
    }

    pub fn from_basis(&self, x: &Rational, y: &Rational) -> QuadSurd {
        let xs = QuadSurd::from_rational(x, self.d);
        &xs + &self.omega.scale(y)
    }

    pub fn is_integral(&self, z: &QuadSurd) -> bool {
        let (x, y) = self.to_basis(z);
        x.is_integer() && y.is_integer()
    }

    /// The element `omega + k` with `k` chosen so that `0 < delta' < 1`; it
    /// satisfies `delta > 2` and `[1, delta] = O`.
    pub fn principal_delta(&self) -> QuadSurd {
        let k = (-self.omega.conj()).ceil();
        &self.omega + &QuadSurd::from_int(k, self.d)
    }

    pub fn one(&self) -> QuadSurd {
        QuadSurd::from_int(1, self.d)
    }

    pub fn maximal_order(&self) -> IdealLattice {
        IdealLattice::from_generators(self, &[self.one(), self.omega.clone()])
            .expect("maximal order is a lattice")
    }
}

/// Smallest `lambda >= 1` with `eps^lambda = 1` in `O / qO`, `eps` the totally
/// positive fundamental unit.
pub fn unit_order_mod_q(field: &FieldData, q: u64) -> u64 {
    assert!(q >= 1);
    if q == 1 {
        return 1;
    }
    let (x, y) = field.to_basis(&field.tp_fund_unit);
    let qb = BigInt::from(q);
    let red = |r: &Rational| r.to_integer().mod_floor(&qb);
    let (ux, uy) = (red(&x), red(&y));
    // omega^2 = t*omega + n
    let (t, n) = if field.one_mod_four() {
        (BigInt::one(), BigInt::from((field.d - 1) / 4))
    } else {
        (BigInt::zero(), BigInt::from(field.d))
    };
    let (mut px, mut py) = (ux.clone(), uy.clone());
    let mut lambda = 1u64;
    while !(px.is_one() && py.is_zero()) {
        let nx = (&px * &ux + &py * &uy * &n).mod_floor(&qb);
        let ny = (&px * &uy + &py * &ux + &py * &uy * &t).mod_floor(&qb);
        px = nx;
        py = ny;
        lambda += 1;
        if lambda > q * q {
            panic!("unit order modulo {q} exceeds |(O/qO)*|");
        }
    }
    lambda
}

/// A rank-2 lattice in `K`, kept in Hermite normal form with respect to the
/// basis `(1, omega)`: generated by `f` and `t + e*omega` with `0 <= t < f`.
/// For fractional ideals this is `g*[a, b + omega]` with `g = e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdealLattice {
    d: u64,
    f: Rational,
    t: Rational,
    e: Rational,
}

impl IdealLattice {
    pub fn from_generators(field: &FieldData, gens: &[QuadSurd]) -> Result<Self> {
        let coords: Vec<(Rational, Rational)> = gens.iter().map(|g| field.to_basis(g)).collect();
        Self::from_coords(field.d, &coords)
    }

    fn from_coords(d: u64, coords: &[(Rational, Rational)]) -> Result<Self> {
        let mut den = BigInt::one();
        for (x, y) in coords {
            den = den.lcm(x.denom()).lcm(y.denom());
        }
        let scaled: Vec<(BigInt, BigInt)> = coords
            .iter()
            .map(|(x, y)| {
                (
                    x.numer() * (&den / x.denom()),
                    y.numer() * (&den / y.denom()),
                )
            })
            .collect();
        // e = gcd of omega-coordinates, realised by a Bezout combination
        let (mut e, mut t0) = (BigInt::zero(), BigInt::zero());
        for (x, y) in &scaled {
            let g = e.extended_gcd(y);
            let new_t0 = &g.x * &t0 + &g.y * x;
            e = g.gcd;
            t0 = new_t0;
        }
        if e.is_negative() {
            e = -e;
            t0 = -t0;
        }
        let mut minors = BigInt::zero();
        for i in 0..scaled.len() {
            for j in i + 1..scaled.len() {
                let m = &scaled[i].0 * &scaled[j].1 - &scaled[j].0 * &scaled[i].1;
                minors = minors.gcd(&m);
            }
        }
        if e.is_zero() || minors.is_zero() {
            return Err(Error::Invalid("generators do not span a rank-2 lattice".into()));
        }
        let f = &minors / &e;
        let t = t0.mod_floor(&f);
        Ok(IdealLattice {
            d,
            f: Rational::new(f, den.clone()),
            t: Rational::new(t, den.clone()),
            e: Rational::new(e, den),
        })
    }

    pub fn basis(&self, field: &FieldData) -> (QuadSurd, QuadSurd) {
        (
            QuadSurd::from_rational(&self.f, self.d),
            field.from_basis(&self.t, &self.e),
        )
    }

    /// `(g, a, b)` with the lattice equal to `g * [a, b + omega]`.
    pub fn normal_form(&self) -> (Rational, Rational, Rational) {
        (self.e.clone(), &self.f / &self.e, &self.t / &self.e)
    }

    pub fn contains(&self, field: &FieldData, z: &QuadSurd) -> bool {
        let (x, y) = field.to_basis(z);
        let k = &y / &self.e;
        if !k.is_integer() {
            return false;
        }
        ((&x - &k * &self.t) / &self.f).is_integer()
    }

    pub fn is_integral(&self) -> bool {
        self.f.is_integer() && self.t.is_integer() && self.e.is_integer()
    }

    /// Index-style volume relative to `O`.
    fn covolume(&self) -> Rational {
        &self.f * &self.e
    }

    pub fn mul(&self, field: &FieldData, other: &IdealLattice) -> IdealLattice {
        let (a1, a2) = self.basis(field);
        let (b1, b2) = other.basis(field);
        let gens = [&a1 * &b1, &a1 * &b2, &a2 * &b1, &a2 * &b2];
        IdealLattice::from_generators(field, &gens).expect("product of lattices has rank 2")
    }

    pub fn scale(&self, field: &FieldData, z: &QuadSurd) -> IdealLattice {
        let (a1, a2) = self.basis(field);
        IdealLattice::from_generators(field, &[&a1 * z, &a2 * z]).expect("nonzero scaling")
    }
}

pub fn is_fractional_ideal(field: &FieldData, lattice: &IdealLattice) -> bool {
    let (a1, a2) = lattice.basis(field);
    lattice.contains(field, &(&field.omega * &a1)) && lattice.contains(field, &(&field.omega * &a2))
}

pub fn ideal_norm(field: &FieldData, lattice: &IdealLattice) -> Result<Rational> {
    if !is_fractional_ideal(field, lattice) {
        return Err(Error::NotAnIdeal);
    }
    Ok(lattice.covolume())
}

/// Conjugate lattice divided by the norm.
pub fn ideal_inverse(field: &FieldData, lattice: &IdealLattice) -> Result<IdealLattice> {
    let norm = ideal_norm(field, lattice)?;
    let inv = Rational::one() / norm;
    let (a1, a2) = lattice.basis(field);
    IdealLattice::from_generators(field, &[a1.conj().scale(&inv), a2.conj().scale(&inv)])
}

/// `N(b (C + D delta))` is `(C^2 + Tr(delta) C D + N(delta) D^2) * N(b)`; this
/// caches the three rationals for a sweep over `(C, D)`.
#[derive(Clone, Debug)]
pub struct NormForm {
    trace: Rational,
    norm: Rational,
    ideal_norm: Rational,
}

impl NormForm {
    pub fn new(field: &FieldData, b: &IdealLattice, delta: &QuadSurd) -> Result<Self> {
        let lattice = IdealLattice::from_generators(field, &[field.one(), delta.clone()])?;
        if !is_fractional_ideal(field, &lattice) || !is_fractional_ideal(field, b) {
            return Err(Error::IncompatiblePair);
        }
        if b.mul(field, &lattice) != field.maximal_order() {
            return Err(Error::IncompatiblePair);
        }
        Ok(NormForm {
            trace: delta.trace(),
            norm: delta.norm(),
            ideal_norm: ideal_norm(field, b)?,
        })
    }

    pub fn ideal_norm(&self) -> &Rational {
        &self.ideal_norm
    }

    /// The exact integer `N(b (C + D delta))`.
    pub fn value(&self, c: i64, d: i64) -> Result<BigInt> {
        let (c, d) = (Rational::from_integer(c.into()), Rational::from_integer(d.into()));
        let v = (&c * &c + &self.trace * &c * &d + &self.norm * &d * &d) * &self.ideal_norm;
        if !v.is_integer() {
            return Err(Error::Internal(format!("norm of an integral ideal is {v}")));
        }
        Ok(v.to_integer())
    }

    pub fn residue(&self, c: i64, d: i64, q: u64) -> Result<u64> {
        Ok(self.value(c, d)?.mod_floor(&BigInt::from(q)).to_u64().unwrap())
    }
}

pub fn norm_residue(
    field: &FieldData,
    b: &IdealLattice,
    delta: &QuadSurd,
    c: i64,
    d: i64,
    q: u64,
) -> Result<u64> {
    NormForm::new(field, b, delta)?.residue(c, d, q)
}

pub fn class_numbers(d: u64) -> Result<(u64, u64)> {
    class_numbers_bounded(d, DEFAULT_CLASS_NUMBER_BOUND)
}

/// `(h, h_plus)`: `h` counts cycles of reduced indefinite forms up to
/// `(a, b, c) ~ (-a, b, -c)`; `h_plus` follows from the norm of `eps_0`. The
/// plain cycle count (which is `h_plus`) is cross-checked.
pub fn class_numbers_bounded(d: u64, bound: u64) -> Result<(u64, u64)> {
    if d > bound {
        return Err(Error::BoundExceeded { d, bound });
    }
    let field = make_field(d)?;
    let disc = field.discriminant as i64;
    let s = isqrt_u64(disc as u64) as i64;

    let mut forms: Vec<(i64, i64, i64)> = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let ac = (b * b - disc) / 4;
        let m = ac.unsigned_abs();
        for a_abs in 1..=((s + b) / 2) as u64 {
            if !m.is_multiple_of(a_abs) {
                continue;
            }
            let a2 = 2 * a_abs as i64;
            if a2 + b > s && a2 - b <= s {
                for a in [a_abs as i64, -(a_abs as i64)] {
                    let c = ac / a;
                    if gcd_u64(gcd_u64(a.unsigned_abs(), b as u64), c.unsigned_abs()) == 1 {
                        forms.push((a, b, c));
                    }
                }
            }
        }
        b += 2;
    }
    forms.sort();

    let rho = |(_, b, c): (i64, i64, i64)| -> (i64, i64, i64) {
        // largest r <= s with r = -b mod 2|c|
        let two_c = 2 * c.abs();
        let r0 = (-b).rem_euclid(two_c);
        let r = s - (s - r0).rem_euclid(two_c);
        let new_c = (r * r - disc) / (4 * c);
        (c, r, new_c)
    };

    let index_of = |f: &(i64, i64, i64)| forms.binary_search(f).ok();
    let mut cycle_id = vec![usize::MAX; forms.len()];
    let mut cycles = 0usize;
    for start in 0..forms.len() {
        if cycle_id[start] != usize::MAX {
            continue;
        }
        let mut cur = forms[start];
        loop {
            let idx = index_of(&cur)
                .ok_or_else(|| Error::Internal(format!("rho left the reduced forms at {cur:?}")))?;
            if cycle_id[idx] != usize::MAX {
                break;
            }
            cycle_id[idx] = cycles;
            cur = rho(cur);
        }
        cycles += 1;
    }
    // merge each cycle with the cycle of its negated forms
    let mut parent: Vec<usize> = (0..cycles).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (i, &(a, b, c)) in forms.iter().enumerate() {
        let j = index_of(&(-a, b, -c)).ok_or_else(|| Error::Internal("negated form not reduced".into()))?;
        let (x, y) = (find(&mut parent, cycle_id[i]), find(&mut parent, cycle_id[j]));
        if x != y {
            parent[x] = y;
        }
    }
    let h = (0..cycles).filter(|&c| find(&mut parent, c) == c).count() as u64;
    let h_plus = if field.fund_unit_norm == -1 { h } else { 2 * h };
    if h_plus != cycles as u64 {
        return Err(Error::Internal(format!(
            "narrow class number {h_plus} disagrees with {cycles} cycles of reduced forms"
        )));
    }
    Ok((h, h_plus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn surd(a: i64, b: i64, c: i64, d: u64) -> QuadSurd {
        QuadSurd::new(a, b, c, d)
    }

    #[test]
    fn field_d2() {
        let f = make_field(2).unwrap();
        assert_eq!(f.fund_unit, surd(1, 1, 1, 2));
        assert_eq!(f.fund_unit_norm, -1);
        assert_eq!(f.tp_fund_unit, surd(3, 2, 1, 2));
        assert_eq!(f.discriminant, 8);
    }

    #[test]
    fn field_d5() {
        let f = make_field(5).unwrap();
        assert_eq!(f.omega, surd(1, 1, 2, 5));
        assert_eq!(f.fund_unit, surd(1, 1, 2, 5));
        assert_eq!(f.tp_fund_unit, surd(3, 1, 2, 5));
    }

    #[test]
    fn field_not_squarefree() {
        assert_eq!(
            make_field(12),
            Err(Error::NotSquarefree { value: "12".into(), prime: 2 })
        );
    }

    #[test]
    fn known_units() {
        let cases = [(3u64, (2, 1, 1)), (15, (4, 1, 1)), (13, (3, 1, 2)), (29, (5, 1, 2)), (94, (2143295, 221064, 1))];
        for (d, (a, b, c)) in cases {
            assert_eq!(make_field(d).unwrap().fund_unit, surd(a, b, c, d), "d = {d}");
        }
    }

    #[test]
    fn tp_unit_contract() {
        for d in [2u64, 3, 5, 6, 7, 10, 13, 15, 21, 29, 31, 34, 46, 61] {
            let f = make_field(d).unwrap();
            let e = &f.tp_fund_unit;
            assert!(e.sign() > 0 && e.conj().sign() > 0);
            assert!(e > &f.one());
            assert_eq!(e.norm(), rat(1, 1));
        }
    }

    #[test]
    fn unit_orders() {
        assert_eq!(unit_order_mod_q(&make_field(2).unwrap(), 1), 1);
        assert_eq!(unit_order_mod_q(&make_field(2).unwrap(), 3), 4);
        assert_eq!(unit_order_mod_q(&make_field(5).unwrap(), 3), 4);
    }

    #[test]
    fn unit_order_divides_group_order() {
        // |(O/qO)*| by enumeration of residues with unit norm mod q
        for d in [2u64, 3, 5, 13, 15] {
            let f = make_field(d).unwrap();
            for q in 2..12u64 {
                let mut units = 0u64;
                for x in 0..q as i64 {
                    for y in 0..q as i64 {
                        let z = f.from_basis(&rat(x, 1), &rat(y, 1));
                        let n = z.norm().to_integer().mod_floor(&BigInt::from(q));
                        if n.to_u64().map(|n| gcd_u64(n, q) == 1).unwrap() {
                            units += 1;
                        }
                    }
                }
                assert_eq!(units % unit_order_mod_q(&f, q), 0, "d={d} q={q}");
            }
        }
    }

    #[test]
    fn ideal_examples_d15() {
        let f = make_field(15).unwrap();
        let a = IdealLattice::from_generators(&f, &[f.one(), surd(6, 1, 3, 15)]).unwrap();
        assert!(is_fractional_ideal(&f, &a));
        assert_eq!(ideal_norm(&f, &a).unwrap(), rat(1, 3));
        let p3 = IdealLattice::from_generators(&f, &[surd(3, 0, 1, 15), surd(0, 1, 1, 15)]).unwrap();
        assert_eq!(ideal_norm(&f, &p3).unwrap(), rat(3, 1));
        assert_eq!(ideal_inverse(&f, &a).unwrap(), p3);

        let not_ideal = IdealLattice::from_generators(&f, &[f.one(), surd(0, 1, 2, 15)]).unwrap();
        assert!(!is_fractional_ideal(&f, &not_ideal));
        assert_eq!(ideal_norm(&f, &not_ideal), Err(Error::NotAnIdeal));
    }

    #[test]
    fn maximal_order_is_self_inverse() {
        for d in [2u64, 5, 13] {
            let f = make_field(d).unwrap();
            let o = f.maximal_order();
            assert!(is_fractional_ideal(&f, &o));
            assert_eq!(ideal_norm(&f, &o).unwrap(), rat(1, 1));
            assert_eq!(ideal_inverse(&f, &o).unwrap(), o);
        }
        let f = make_field(2).unwrap();
        let l = IdealLattice::from_generators(&f, &[f.one(), surd(2, 1, 1, 2)]).unwrap();
        assert_eq!(ideal_inverse(&f, &l).unwrap(), f.maximal_order());
        assert_eq!(l.normal_form(), (rat(1, 1), rat(1, 1), rat(0, 1)));
    }

    #[test]
    fn random_ideals_norm_and_inverse() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let fields: Vec<FieldData> = [2u64, 3, 5, 13, 15, 29].iter().map(|&d| make_field(d).unwrap()).collect();
        let mut tested = 0;
        while tested < 50 {
            let f = &fields[rng.gen_range(0..fields.len())];
            // ideal generated by two random elements, scaled by a random rational
            let g1 = f.from_basis(&rat(rng.gen_range(-9..10), 1), &rat(rng.gen_range(-9..10), 1));
            let g2 = f.from_basis(&rat(rng.gen_range(-9..10), 1), &rat(rng.gen_range(-9..10), 1));
            if g1.is_zero() && g2.is_zero() {
                continue;
            }
            let gens = [&g1 * &f.one(), &g1 * &f.omega, &g2 * &f.one(), &g2 * &f.omega];
            let Ok(lat) = IdealLattice::from_generators(f, &gens) else { continue };
            let lat = lat.scale(f, &QuadSurd::from_rational(&rat(rng.gen_range(1..7), rng.gen_range(1..7)), f.d));
            assert!(is_fractional_ideal(f, &lat));
            let inv = ideal_inverse(f, &lat).unwrap();
            assert_eq!(ideal_norm(f, &lat).unwrap() * ideal_norm(f, &inv).unwrap(), rat(1, 1));
            assert_eq!(lat.mul(f, &inv), f.maximal_order());
            let (_, a, b) = lat.normal_form();
            assert!(a.is_integer() && b.is_integer());
            tested += 1;
        }
    }

    #[test]
    fn norm_residue_examples() {
        let f = make_field(5).unwrap();
        let o = f.maximal_order();
        let delta = surd(3, 1, 2, 5);
        assert_eq!(norm_residue(&f, &o, &delta, 1, 1, 3).unwrap(), 2);
        assert_eq!(norm_residue(&f, &o, &delta, 3, 3, 3).unwrap(), 0);
        assert_eq!(norm_residue(&f, &o, &delta, 1, 1, 1).unwrap(), 0);
        // b = [3, sqrt 15] against [1, (6 + sqrt 15)/3] in Q(sqrt 15)
        let f15 = make_field(15).unwrap();
        let b = IdealLattice::from_generators(&f15, &[surd(3, 0, 1, 15), surd(0, 1, 1, 15)]).unwrap();
        let delta15 = surd(6, 1, 3, 15);
        let form = NormForm::new(&f15, &b, &delta15).unwrap();
        // N(1 + delta) * 3 = (1 + 4 + 7/3) * 3 = 22
        assert_eq!(form.value(1, 1).unwrap(), BigInt::from(22));
        assert_eq!(
            norm_residue(&f15, &f15.maximal_order(), &delta15, 1, 1, 5),
            Err(Error::IncompatiblePair)
        );
    }

    #[test]
    fn norm_residue_is_periodic() {
        let f = make_field(13).unwrap();
        let form = NormForm::new(&f, &f.maximal_order(), &f.principal_delta()).unwrap();
        for q in 1..8u64 {
            for c in -3..4i64 {
                for d in -3..4i64 {
                    let r = form.residue(c, d, q).unwrap();
                    assert_eq!(r, form.residue(c + q as i64, d, q).unwrap());
                    assert_eq!(r, form.residue(c, d + q as i64, q).unwrap());
                }
            }
        }
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_numbers(2).unwrap(), (1, 1));
        assert_eq!(class_numbers(5).unwrap(), (1, 1));
        assert_eq!(class_numbers(15).unwrap(), (2, 4));
        assert_eq!(class_numbers(3).unwrap(), (1, 2));
        assert_eq!(class_numbers(10).unwrap(), (2, 2));
        assert_eq!(class_numbers(79).unwrap(), (3, 6));
        assert_eq!(class_numbers(29).unwrap(), (1, 1));
        assert_eq!(class_numbers(85).unwrap(), (2, 2));
        assert_eq!(class_numbers_bounded(101, 100), Err(Error::BoundExceeded { d: 101, bound: 100 }));
    }
}
