//! Biró's sieve: the factorization oracle for `L_K(0, chi)`, the search for
//! `(q, p)` pairs satisfying Condition(*) and the residue congruences they
//! impose on class-number-one members of a family.

use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::{is_prime, rat, rational_mod_p, CycloElement, Rational};
use crate::characters::{
    enumerate_characters, gen_bernoulli_b1_chi, gen_bernoulli_b1_twisted, modp_realizations, weighted_sum,
    DirichletCharacter, ModPRealization, Parity,
};
use crate::error::{Error, Result};
use crate::linearity::{closed_form_chi, family_instance, FamilySpec};
use crate::quadfield::class_numbers;
use crate::shintani::partial_hecke_L_zero;

/// Global sign applied to the cone-engine value in the factorization oracle.
pub const SIGN_CONVENTION: i64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionStarPair {
    pub q: u64,
    pub p: u64,
    pub chi: DirichletCharacter,
    pub realization: ModPRealization,
    /// Image of `sum_{a=1}^{q} a chi(a)` in `Z/p`.
    pub witness: u64,
}

impl ConditionStarPair {
    fn sort_key(&self) -> (u64, u64, Vec<u64>, u64) {
        (self.q, self.p, self.chi.exponents().to_vec(), self.realization.image)
    }
}

fn pairs_for(q: u64, p_max: u64) -> Vec<ConditionStarPair> {
    let mut out = Vec::new();
    for chi in enumerate_characters(q) {
        if chi.parity() != Parity::Odd || !chi.is_primitive() {
            continue;
        }
        let sum = weighted_sum(&chi);
        for p in (3..=p_max).step_by(2).filter(|&p| is_prime(p)) {
            for realization in modp_realizations(&chi, p).expect("odd prime") {
                if realization.realize(&sum) == Some(0) {
                    out.push(ConditionStarPair { q, p, chi: chi.clone(), realization, witness: 0 });
                }
            }
        }
    }
    out
}

/// All pairs with odd `q <= q_max`, odd prime `p <= p_max` and odd primitive
/// `chi` mod `q` whose weighted sum vanishes under a realization mod `p`.
pub fn condition_star_search(q_max: u64, p_max: u64) -> Result<Vec<ConditionStarPair>> {
    if q_max < 3 || p_max < 3 {
        return Err(Error::Invalid(format!("bounds must be at least 3, got q_max = {q_max}, p_max = {p_max}")));
    }
    let qs: Vec<u64> = (3..=q_max).step_by(2).collect();
    let mut pairs: Vec<ConditionStarPair> = qs.par_iter().flat_map_iter(|&q| pairs_for(q, p_max)).collect();
    pairs.sort_by_key(ConditionStarPair::sort_key);
    Ok(pairs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidueStatus {
    /// `B` and `A` both vanish: every `k` satisfies the congruence.
    Indeterminate,
    /// `B` vanishes and `A` does not: no member with this `r` can have
    /// class number one.
    Vacuous,
    Determined,
}

impl ResidueStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ResidueStatus::Indeterminate => "indeterminate",
            ResidueStatus::Vacuous => "vacuous",
            ResidueStatus::Determined => "determined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueReport {
    pub family: String,
    pub q: u64,
    pub chi: String,
    pub realization: ModPRealization,
    pub r: u64,
    pub a_image: u64,
    pub b_image: u64,
    pub status: ResidueStatus,
    /// `n mod p` forced on class-number-one members `n = r (mod q)`.
    pub residue: Option<u64>,
}

fn realize_checked(realization: &ModPRealization, x: &CycloElement) -> Result<u64> {
    realization
        .realize(x)
        .ok_or_else(|| Error::Internal(format!("{} has a denominator divisible by {}", x, realization.p)))
}

pub fn residue_mod_p(spec: &FamilySpec, pair: &ConditionStarPair, r: u64) -> Result<ResidueReport> {
    let cf = closed_form_chi(spec, pair.q, &pair.chi, r)?;
    let real = &pair.realization;
    let p = real.p;
    let a_image = realize_checked(real, &cf.a_chi)?;
    let b_image = realize_checked(real, &cf.b_chi)?;
    let (status, residue) = match (a_image, b_image) {
        (0, 0) => (ResidueStatus::Indeterminate, None),
        (_, 0) => (ResidueStatus::Vacuous, None),
        (a, b) => {
            let k = rational_mod_p(&rat(-(a as i64), b as i64), p).expect("b is a unit mod p");
            let n = ((pair.q % p) * k + r) % p;
            (ResidueStatus::Determined, Some(n))
        }
    };
    Ok(ResidueReport {
        family: spec.name.clone(),
        q: pair.q,
        chi: pair.chi.id(),
        realization: *real,
        r,
        a_image,
        b_image,
        status,
        residue,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheck {
    pub n: i64,
    pub d: u64,
    pub discriminant: i64,
    pub lhs: CycloElement,
    pub rhs: CycloElement,
    pub equal: bool,
}

/// Compares the partial L-value of the unique narrow class with
/// `B_{1,chi} B_{1,chi chi_D}`.
pub fn factorization_oracle_check(
    spec: &FamilySpec,
    n: i64,
    q: u64,
    chi: &DirichletCharacter,
) -> Result<OracleCheck> {
    if chi.modulus() != q {
        return Err(Error::Invalid(format!("character {} has modulus {}, expected {q}", chi.id(), chi.modulus())));
    }
    let inst = family_instance(spec, n)?;
    let (_, h_plus) = class_numbers(inst.field.d)?;
    if h_plus != 1 {
        return Err(Error::NarrowClassNotOne { d: inst.field.d, h_plus });
    }
    let lhs = partial_hecke_L_zero(&inst.field, &inst.delta, &inst.b, chi)?
        .scale(&Rational::from_integer(SIGN_CONVENTION.into()));
    let disc = inst.field.discriminant as i64;
    let rhs = &gen_bernoulli_b1_chi(chi) * &gen_bernoulli_b1_twisted(chi, disc)?;
    let equal = lhs == rhs;
    Ok(OracleCheck { n, d: inst.field.d, discriminant: disc, lhs, rhs, equal })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntroAB {
    pub q: u64,
    pub r: u64,
    pub chi: String,
    pub a: CycloElement,
    pub b: CycloElement,
    /// `rho` with `(a, b) = rho (A_chi, B_chi)` for the Yokoi family.
    pub proportionality: Option<Rational>,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

/// The two character sums for the Yokoi family written over
/// `0 <= C, D <= q - 1`, and their ratio to the closed-form coefficients.
pub fn yokoi_intro_ab(q: u64, chi: &DirichletCharacter, r: u64) -> Result<IntroAB> {
    if q == 0 || r >= q || chi.modulus() != q {
        return Err(Error::Invalid(format!("need q >= 1, 0 <= r < q and chi mod q; got q = {q}, r = {r}")));
    }
    let o = chi.order();
    let qi = q as i64;
    let ri = r as i64;
    let mut acc_a = vec![Rational::zero(); o as usize];
    let mut acc_b = vec![Rational::zero(); o as usize];
    for c in 0..qi {
        for d in 0..qi {
            if let Some(e) = chi.exponent(d * d - c * c - ri * c * d) {
                acc_a[e as usize] += Rational::from_integer((ceil_div(ri * c - d, qi) * (c - qi)).into());
                acc_b[e as usize] += Rational::from_integer((c * (c - qi)).into());
            }
        }
    }
    let a = CycloElement::from_coeffs(o, acc_a);
    let b = CycloElement::from_coeffs(o, acc_b);
    let proportionality = closed_form_chi(&FamilySpec::yokoi(), q, chi, r)
        .ok()
        .and_then(|cf| proportion(&a, &b, &cf.a_chi, &cf.b_chi));
    Ok(IntroAB { q, r, chi: chi.id(), a, b, proportionality })
}

/// The rational `rho` with `x = rho u` and `y = rho v`, if `(u, v) != 0`.
pub fn proportion(x: &CycloElement, y: &CycloElement, u: &CycloElement, v: &CycloElement) -> Option<Rational> {
    let (num, den) = x
        .coeffs()
        .iter()
        .zip(u.coeffs())
        .chain(y.coeffs().iter().zip(v.coeffs()))
        .find(|(_, base)| !base.is_zero())?;
    let rho = num / den;
    (u.scale(&rho) == *x && v.scale(&rho) == *y).then_some(rho)
}

/// Image of `A_chi(r) + k B_chi(r)` for the member `n = qk + r`.
pub fn congruence_image(spec: &FamilySpec, pair: &ConditionStarPair, n: i64) -> Result<u64> {
    let q = pair.q as i64;
    let (k, r) = (n.div_euclid(q), n.rem_euclid(q) as u64);
    let cf = closed_form_chi(spec, pair.q, &pair.chi, r)?;
    let real = &pair.realization;
    let a = realize_checked(real, &cf.a_chi)?;
    let b = realize_checked(real, &cf.b_chi)?;
    let k = rational_mod_p(&Rational::from_integer(k.into()), real.p).expect("integer");
    Ok((a + k * b) % real.p)
}
