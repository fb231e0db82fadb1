//! Parametrized families `K_n = Q(sqrt f(n))`, the residue data of their
//! continued fractions modulo `q`, the closed-form coefficients `A_CD(r)`,
//! `B_CD(r)` and the check that `12 q^2 L` is affine in `k` for `n = qk + r`.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    b1, b2, floor_strict, frac_pos, rat, residue_1q, square_factor, CycloElement, QuadSurd,
    Rational,
};
use crate::cfrac::{evaluate_minus, plus_expand, plus_to_minus, MinusCF, PlusCF};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::quadfield::{
    ideal_inverse, is_fractional_ideal, make_field, FieldData, IdealLattice, NormForm,
};
use crate::shintani::{check_delta, is_integral_cyclo, l_value_from_setup, prepare, yamamoto_extended};

/// How far `closed_form_chi` and the config loader look for admissible `n`.
pub const ADMISSIBLE_SEARCH: i64 = 400;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaParts {
    pub u_coeffs: Vec<i64>,
    pub v_coeffs: Vec<i64>,
    pub w: i64,
}

/// `a_i(n) = alpha * n + beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineDigit {
    pub alpha: i64,
    pub beta: i64,
}

impl AffineDigit {
    pub fn at(&self, n: i64) -> i64 {
        self.alpha * n + self.beta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityConstraint {
    Odd,
    Even,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NConstraints {
    #[serde(default)]
    pub parity: Option<ParityConstraint>,
    /// Pairs `[m, r]` excluding `n = r (mod m)`.
    #[serde(default)]
    pub forbidden_residues: Vec<[i64; 2]>,
}

/// A family with `f(n)`, `delta(n) = (u(n) + v(n) sqrt f(n)) / w` and plus
/// digits `delta(n) - 1 = [[a_0(n), ..., a_{s-1}(n)]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    pub f_coeffs: Vec<i64>,
    pub delta: DeltaParts,
    pub acf: Vec<AffineDigit>,
    #[serde(default)]
    pub n_constraints: NConstraints,
}

fn poly(coeffs: &[i64], n: i64) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &c| acc * n + BigInt::from(c))
}

impl FamilySpec {
    pub fn yokoi() -> Self {
        FamilySpec {
            name: "yokoi".into(),
            f_coeffs: vec![4, 0, 1],
            delta: DeltaParts { u_coeffs: vec![2, 1], v_coeffs: vec![1], w: 2 },
            acf: vec![AffineDigit { alpha: 1, beta: 0 }],
            n_constraints: NConstraints { parity: Some(ParityConstraint::Odd), forbidden_residues: vec![] },
        }
    }

    pub fn rd_n2p1() -> Self {
        FamilySpec {
            name: "rd-n2p1".into(),
            f_coeffs: vec![1, 0, 1],
            delta: DeltaParts { u_coeffs: vec![1, 1], v_coeffs: vec![1], w: 1 },
            acf: vec![AffineDigit { alpha: 2, beta: 0 }],
            n_constraints: NConstraints { parity: Some(ParityConstraint::Odd), forbidden_residues: vec![] },
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "yokoi" => Some(Self::yokoi()),
            "rd-n2p1" => Some(Self::rd_n2p1()),
            _ => None,
        }
    }

    pub fn from_json(text: &str, location: &str) -> Result<Self> {
        let spec: FamilySpec = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("{location}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        spec.validate_shape()?;
        Ok(spec)
    }

    fn validate_shape(&self) -> Result<()> {
        if self.acf.is_empty() {
            return Err(Error::Invalid(format!("family {}: acf must list at least one digit", self.name)));
        }
        if self.delta.w <= 0 {
            return Err(Error::Invalid(format!("family {}: w must be positive", self.name)));
        }
        if self.f_coeffs.is_empty() || self.delta.u_coeffs.is_empty() || self.delta.v_coeffs.is_empty() {
            return Err(Error::Invalid(format!("family {}: empty polynomial", self.name)));
        }
        if self.n_constraints.forbidden_residues.iter().any(|[m, _]| *m <= 0) {
            return Err(Error::Invalid(format!("family {}: forbidden residue moduli must be positive", self.name)));
        }
        Ok(())
    }

    /// Plus period length `s`.
    pub fn s(&self) -> usize {
        self.acf.len()
    }

    pub fn digit(&self, i: usize) -> AffineDigit {
        self.acf[i % self.acf.len()]
    }

    pub fn digits_at(&self, n: i64) -> Vec<i64> {
        self.acf.iter().map(|a| a.at(n)).collect()
    }

    pub fn satisfies_constraints(&self, n: i64) -> bool {
        let parity_ok = match self.n_constraints.parity {
            Some(ParityConstraint::Odd) => n.rem_euclid(2) == 1,
            Some(ParityConstraint::Even) => n.rem_euclid(2) == 0,
            None => true,
        };
        parity_ok
            && self
                .n_constraints
                .forbidden_residues
                .iter()
                .all(|[m, r]| n.rem_euclid(*m) != r.rem_euclid(*m))
    }

    /// `s * mu(s)`: the number of digits above 2 in one minus period.
    pub fn s_mu(&self) -> usize {
        if self.s() % 2 == 1 {
            self.s()
        } else {
            self.s() / 2
        }
    }
}

/// A built-in family name or a path to a JSON family file; the family is
/// checked on its first admissible member.
pub fn load_family_config(arg: &str) -> Result<FamilySpec> {
    let spec = match FamilySpec::builtin(arg) {
        Some(spec) => spec,
        None => {
            let path = Path::new(arg);
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
                location: arg.to_string(),
                message: e.to_string(),
            })?;
            FamilySpec::from_json(&text, arg)?
        }
    };
    for n in 1..=ADMISSIBLE_SEARCH {
        if try_instance(&spec, n)?.is_some() {
            return Ok(spec);
        }
    }
    Err(Error::Invalid(format!("family {} has no admissible n <= {ADMISSIBLE_SEARCH}", spec.name)))
}

#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub n: i64,
    pub field: FieldData,
    pub delta: QuadSurd,
    /// The integral ideal with `b^{-1} = [1, delta]`.
    pub b: IdealLattice,
    /// `a_0(n), ..., a_{s-1}(n)`.
    pub digits: Vec<i64>,
    /// Minus period of `delta` obtained from the plus digits.
    pub mcf: MinusCF,
}

impl FamilyInstance {
    pub fn min_digit(&self) -> i64 {
        *self.digits.iter().min().expect("nonempty digits")
    }

    pub fn norm_form(&self) -> Result<NormForm> {
        NormForm::new(&self.field, &self.b, &self.delta)
    }
}

pub fn family_instance(spec: &FamilySpec, n: i64) -> Result<FamilyInstance> {
    if !spec.satisfies_constraints(n) {
        return Err(Error::Invalid(format!("n = {n} violates the constraints of family {}", spec.name)));
    }
    let f = poly(&spec.f_coeffs, n);
    let d = f
        .to_u64()
        .filter(|&d| d > 1)
        .ok_or_else(|| Error::Invalid(format!("f({n}) = {f} is not an integer in (1, 2^64)")))?;
    if let Some(p) = square_factor(d) {
        return Err(Error::NotSquarefree { value: d.to_string(), prime: p });
    }
    let field = make_field(d)?;
    let delta = QuadSurd::new(
        poly(&spec.delta.u_coeffs, n),
        poly(&spec.delta.v_coeffs, n),
        spec.delta.w,
        d,
    );
    check_delta(&delta)?;
    let digits = spec.digits_at(n);
    let expected = PlusCF::purely_periodic(digits.clone());
    let actual = plus_expand(&delta.add_int(-1))?;
    let consistent = actual.is_purely_periodic()
        && digits.len().is_multiple_of(actual.period.len())
        && digits.iter().zip(actual.period.iter().cycle()).all(|(a, b)| a == b);
    if !consistent {
        return Err(Error::CfMismatch {
            n,
            expected: expected.to_string(),
            found: actual.to_string(),
        });
    }
    let lattice = IdealLattice::from_generators(&field, &[field.one(), delta.clone()])?;
    if !is_fractional_ideal(&field, &lattice) {
        return Err(Error::NotAnIdeal);
    }
    let b = ideal_inverse(&field, &lattice)?;
    let mcf = plus_to_minus(&expected)?;
    if evaluate_minus(&mcf)? != delta {
        return Err(Error::Internal(format!("converted word {mcf} does not evaluate to {delta}")));
    }
    Ok(FamilyInstance { n, field, delta, b, digits, mcf })
}

/// `Ok(None)` for members the family does not define: constraint
/// violations, non-squarefree or degenerate `f(n)`, `delta(n)` out of range.
pub fn try_instance(spec: &FamilySpec, n: i64) -> Result<Option<FamilyInstance>> {
    if !spec.satisfies_constraints(n) {
        return Ok(None);
    }
    match family_instance(spec, n) {
        Ok(inst) => Ok(Some(inst)),
        Err(Error::NotSquarefree { .. }) | Err(Error::Invalid(_)) | Err(Error::DeltaOutOfRange(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `gamma_i(r) = <a_i(r)>_q` in `[1, q]` and `tau_i(r)` with
/// `a_i(r) = q tau_i(r) + gamma_i(r)`.
pub fn gamma_tau(spec: &FamilySpec, i: usize, r: u64, q: u64) -> (u64, i64) {
    let a = spec.digit(i).at(r as i64);
    let g = residue_1q(a, q);
    (g, (a - g as i64) / q as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuSequence {
    pub q: u64,
    pub r: u64,
    pub c: u64,
    pub d: u64,
    /// `nu_{-1}, nu_0, ..., nu_{Gamma_{s mu}}`.
    pub nu: Vec<Rational>,
    /// `Gamma_0, ..., Gamma_{s mu}`.
    pub gamma_pos: Vec<usize>,
    /// `gamma_i(r)` for `i` in `0..s`.
    pub gamma: Vec<u64>,
    /// `tau_i(r)` for `i` in `0..s`.
    pub tau: Vec<i64>,
    /// `d_l` for `l` in `0..s mu`.
    pub dl: Vec<Rational>,
}

impl NuSequence {
    pub fn nu_at(&self, i: isize) -> &Rational {
        &self.nu[(i + 1) as usize]
    }

    pub fn gamma_at(&self, i: usize) -> u64 {
        self.gamma[i % self.gamma.len()]
    }

    pub fn tau_at(&self, i: usize) -> i64 {
        self.tau[i % self.tau.len()]
    }
}

pub fn nu_sequence(spec: &FamilySpec, q: u64, r: u64, c: u64, d: u64) -> NuSequence {
    assert!(r < q, "r = {r} outside [0, {q})");
    assert!((1..=q).contains(&c) && (1..=q).contains(&d), "(C, D) outside [1, q]");
    let s = spec.s();
    let (gamma, tau): (Vec<u64>, Vec<i64>) = (0..s).map(|i| gamma_tau(spec, i, r, q)).unzip();
    let g = |i: usize| gamma[i % s];
    let smu = spec.s_mu();
    let mut gamma_pos = vec![0usize];
    for j in 1..=smu {
        gamma_pos.push(gamma_pos[j - 1] + g(2 * j - 1) as usize);
    }
    let total = gamma_pos[smu];
    let mut c_digits = vec![2i64; total];
    for j in 0..smu {
        c_digits[gamma_pos[j]] = g(2 * j) as i64 + 2;
    }
    let qr = q as i64;
    let mut nu = Vec::with_capacity(total + 2);
    nu.push(rat(qr - c as i64, qr));
    nu.push(frac_pos(&rat(d as i64, qr)));
    for i in 0..total {
        let next = frac_pos(&(Rational::from_integer(c_digits[i].into()) * &nu[i + 1] - &nu[i]));
        nu.push(next);
    }
    let dl = (0..smu)
        .map(|l| frac_pos(&(&nu[gamma_pos[l] + 2] - &nu[gamma_pos[l] + 1])))
        .collect();
    NuSequence { q, r, c, d, nu, gamma_pos, gamma, tau, dl }
}

/// `6 (g d^2 + (1 - 2d) [nu + d g]_1)`.
fn block_square_sum(g: &Rational, d: &Rational, nu: &Rational) -> Rational {
    let six = Rational::from_integer(6.into());
    let fl = Rational::from_integer(floor_strict(&(nu + d * g)));
    six * (g * d * d + (Rational::one() - d * Rational::from_integer(2.into())) * fl)
}

/// `(A_CD(r), B_CD(r))` with `12 Z(C, D) = A_CD + k B_CD` for `n = qk + r`.
pub fn closed_form_cd(spec: &FamilySpec, q: u64, r: u64, c: u64, d: u64) -> Result<(Rational, Rational)> {
    let nu = nu_sequence(spec, q, r, c, d);
    let smu = spec.s_mu();
    let qr = Rational::from_integer(q.into());
    let int = |v: i64| Rational::from_integer(v.into());
    let at = |i: usize| nu.nu_at(i as isize);
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    for l in 1..=smu {
        let g = nu.gamma_pos[l];
        let dig = spec.digit(2 * l);
        a += int(-12) * b1(at(g)) * b1(nu.nu_at(g as isize - 1)) + int(6) * int(dig.at(r as i64) + 2) * b2(at(g));
        b += int(6) * &qr * int(dig.alpha) * b2(at(g));
    }
    for l in 0..smu {
        let g_l = nu.gamma_pos[l];
        let g_next = nu.gamma_pos[l + 1];
        let gp = int(nu.gamma_at(2 * l + 1) as i64);
        let dl = &nu.dl[l];
        let nu_l = at(g_l);
        let full = block_square_sum(&qr, dl, nu_l) - &qr;
        let partial = block_square_sum(&(&gp - int(1)), dl, nu_l) + int(6) * (b2(at(g_next - 1)) - b2(nu_l));
        a += partial - &gp + int(1) + int(nu.tau_at(2 * l + 1)) * &full;
        b += int(spec.digit(2 * l + 1).alpha) * &full;
    }
    let q2 = &qr * &qr;
    if !(&a * &q2).is_integer() || !(&b * &q2).is_integer() {
        return Err(Error::Internal(format!("q^2 A_CD = {}, q^2 B_CD = {} not integral", &a * &q2, &b * &q2)));
    }
    Ok((a, b))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormCell {
    pub c: u64,
    pub d: u64,
    pub a_cd: Rational,
    pub b_cd: Rational,
    pub norm_residue: u64,
    /// Exponent of `F_CD(r) = chi(norm_residue)`, `None` when it vanishes.
    pub f_exponent: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormAB {
    pub family: String,
    pub q: u64,
    pub r: u64,
    pub chi: String,
    /// Member at which `F_CD(r)` was evaluated.
    pub n_ref: i64,
    pub cells: Vec<ClosedFormCell>,
    pub a_chi: CycloElement,
    pub b_chi: CycloElement,
}

/// The first `count` admissible members `n = qk + r`, `k >= 0`.
pub fn admissible_members(spec: &FamilySpec, q: u64, r: u64, count: usize) -> Result<Vec<FamilyInstance>> {
    let mut out = Vec::new();
    for k in 0..ADMISSIBLE_SEARCH {
        let n = q as i64 * k + r as i64;
        if n < 1 {
            continue;
        }
        if let Some(inst) = try_instance(spec, n)? {
            out.push(inst);
            if out.len() == count {
                break;
            }
        }
    }
    Ok(out)
}

/// Residues `N(b(C + D delta)) mod q` in row-major `(C, D)` order.
pub fn norm_table(inst: &FamilyInstance, q: u64) -> Result<Vec<u64>> {
    let form = inst.norm_form()?;
    let mut out = Vec::with_capacity((q * q) as usize);
    for c in 1..=q {
        for d in 1..=q {
            out.push(form.residue(c as i64, d as i64, q)?);
        }
    }
    Ok(out)
}

/// True iff every instance has the same norm-residue table modulo `q`.
pub fn hypothesis_check_instances(q: u64, instances: &[FamilyInstance]) -> Result<bool> {
    let tables = instances
        .iter()
        .map(|inst| norm_table(inst, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(tables.windows(2).all(|w| w[0] == w[1]))
}

pub fn hypothesis_check_norm(spec: &FamilySpec, q: u64, r: u64, ks: &[i64]) -> Result<bool> {
    let mut instances = Vec::new();
    for &k in ks {
        if let Some(inst) = try_instance(spec, q as i64 * k + r as i64)? {
            instances.push(inst);
        }
    }
    if instances.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: instances.len() });
    }
    hypothesis_check_instances(q, &instances)
}

pub fn closed_form_chi(spec: &FamilySpec, q: u64, chi: &DirichletCharacter, r: u64) -> Result<ClosedFormAB> {
    if chi.modulus() != q {
        return Err(Error::Invalid(format!("character {} has modulus {}, expected {q}", chi.id(), chi.modulus())));
    }
    if r >= q {
        return Err(Error::Invalid(format!("r = {r} outside [0, {q})")));
    }
    let members = admissible_members(spec, q, r, 4)?;
    let reference = members.first().ok_or(Error::NoAdmissibleN { q, r })?;
    if !hypothesis_check_instances(q, &members)? {
        return Err(Error::HypothesisFailed { q, r });
    }
    let form = reference.norm_form()?;
    let cells = (1..=q)
        .into_par_iter()
        .flat_map_iter(|c| (1..=q).map(move |d| (c, d)))
        .map(|(c, d)| {
            let (a_cd, b_cd) = closed_form_cd(spec, q, r, c, d)?;
            let norm_residue = form.residue(c as i64, d as i64, q)?;
            let f_exponent = chi.exponent_u(norm_residue);
            Ok(ClosedFormCell { c, d, a_cd, b_cd, norm_residue, f_exponent })
        })
        .collect::<Result<Vec<_>>>()?;
    let o = chi.order();
    let q2 = Rational::from_integer((q * q).into());
    let mut acc_a = vec![Rational::zero(); o as usize];
    let mut acc_b = vec![Rational::zero(); o as usize];
    for cell in &cells {
        if let Some(e) = cell.f_exponent {
            acc_a[e as usize] += &cell.a_cd * &q2;
            acc_b[e as usize] += &cell.b_cd * &q2;
        }
    }
    Ok(ClosedFormAB {
        family: spec.name.clone(),
        q,
        r,
        chi: chi.id(),
        n_ref: reference.n,
        cells,
        a_chi: CycloElement::from_coeffs(o, acc_a),
        b_chi: CycloElement::from_coeffs(o, acc_b),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineFit {
    pub intercept: CycloElement,
    pub slope: CycloElement,
    pub exact: bool,
}

/// Line through the first two points, and whether the rest lie on it.
pub fn fit_affine(points: &[(i64, CycloElement)]) -> Result<AffineFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: points.len() });
    }
    let (k0, v0) = &points[0];
    let (k1, v1) = &points[1];
    if k0 == k1 {
        return Err(Error::Invalid("affine fit needs distinct abscissae".into()));
    }
    let slope = (v1 - v0).scale(&rat(1, k1 - k0));
    let intercept = v0 - &slope.scale(&Rational::from_integer((*k0).into()));
    let exact = points
        .iter()
        .all(|(k, v)| &(&intercept + &slope.scale(&Rational::from_integer((*k).into()))) == v);
    Ok(AffineFit { intercept, slope, exact })
}

/// `12 q^2 L(0, chi_n, b_n)` at one member.
pub fn direct_scaled_value(inst: &FamilyInstance, chi: &DirichletCharacter) -> Result<CycloElement> {
    let setup = prepare(&inst.field, &inst.delta, &inst.b, chi)?;
    Ok(l_value_from_setup(&setup, chi)?.1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearityReport {
    pub family: String,
    pub q: u64,
    pub chi: String,
    pub r: u64,
    /// Sampled `k` with admissible `n = qk + r` and `min a_i(n) >= q`.
    pub ks: Vec<i64>,
    /// Requested `k` that were skipped.
    pub skipped: Vec<i64>,
    /// `12 q^2 L` at each sampled `k`.
    pub direct: Vec<CycloElement>,
    pub intercept: CycloElement,
    pub slope: CycloElement,
    pub a_chi: Option<CycloElement>,
    pub b_chi: Option<CycloElement>,
    pub affine_exact: bool,
    pub closed_form_match: bool,
    pub hypothesis_ok: bool,
    pub integral: bool,
}

pub fn verify_linearity(
    spec: &FamilySpec,
    q: u64,
    chi: &DirichletCharacter,
    r: u64,
    ks: &[i64],
) -> Result<LinearityReport> {
    if chi.modulus() != q {
        return Err(Error::Invalid(format!("character {} has modulus {}, expected {q}", chi.id(), chi.modulus())));
    }
    if r >= q {
        return Err(Error::Invalid(format!("r = {r} outside [0, {q})")));
    }
    let mut sorted = ks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut sampled = Vec::new();
    let mut skipped = Vec::new();
    for &k in &sorted {
        match try_instance(spec, q as i64 * k + r as i64)? {
            Some(inst) if inst.min_digit() >= q as i64 => sampled.push((k, inst)),
            _ => skipped.push(k),
        }
    }
    if sampled.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: sampled.len() });
    }
    let direct = sampled
        .par_iter()
        .map(|(_, inst)| direct_scaled_value(inst, chi))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(i64, CycloElement)> = sampled.iter().map(|(k, _)| *k).zip(direct.iter().cloned()).collect();
    let fit = fit_affine(&points)?;
    let instances: Vec<FamilyInstance> = sampled.iter().map(|(_, inst)| inst.clone()).collect();
    let hypothesis_ok = hypothesis_check_instances(q, &instances)?;
    let (a_chi, b_chi) = match closed_form_chi(spec, q, chi, r) {
        Ok(cf) => (Some(cf.a_chi), Some(cf.b_chi)),
        Err(Error::HypothesisFailed { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    let closed_form_match = matches!((&a_chi, &b_chi), (Some(a), Some(b)) if a == &fit.intercept && b == &fit.slope);
    let integral = direct.iter().all(is_integral_cyclo);
    Ok(LinearityReport {
        family: spec.name.clone(),
        q,
        chi: chi.id(),
        r,
        ks: sampled.iter().map(|(k, _)| *k).collect(),
        skipped,
        direct,
        intercept: fit.intercept,
        slope: fit.slope,
        a_chi,
        b_chi,
        affine_exact: fit.exact,
        closed_form_match,
        hypothesis_ok,
        integral,
    })
}

/// Outcome of the per-block comparisons between the cone coordinates `x_i`
/// of a member and the residue sequence `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockReport {
    pub blocks: usize,
    /// `x_{S_j + i} = nu_{Gamma_j + i}` for `0 <= i <= gamma_{2j+1}`.
    pub bridge: bool,
    /// Squared-difference sums over the first `gamma` steps of each block.
    pub square_sums: bool,
    /// Sums of `F(x_i, x_{i-1})` over the first `gamma` steps of each block.
    pub f_sums: bool,
}

/// `F(x, y) = -B_1(x) B_1(y) + B_2(x)`.
pub fn f_xy(x: &Rational, y: &Rational) -> Rational {
    -(b1(x) * b1(y)) + b2(x)
}

pub fn block_checks(spec: &FamilySpec, inst: &FamilyInstance, q: u64, c: u64, d: u64) -> Result<BlockReport> {
    let r = inst.n.rem_euclid(q as i64) as u64;
    let conv = inst
        .mcf
        .conversion
        .as_ref()
        .ok_or_else(|| Error::Internal("member word lacks conversion data".into()))?;
    let m = inst.mcf.m();
    let seq = yamamoto_extended(q, c, d, &inst.mcf, m);
    let x = |i: usize| seq.x_at(i as isize);
    let nu = nu_sequence(spec, q, r, c, d);
    let qr = Rational::from_integer(q.into());
    let twelfth = rat(1, 12);
    let mut report = BlockReport { blocks: conv.positions.len(), bridge: true, square_sums: true, f_sums: true };
    for (j, &start) in conv.positions.iter().enumerate() {
        let a_odd = inst.digits[(2 * j + 1) % spec.s()] as usize;
        let gp = nu.gamma_at(2 * j + 1) as usize;
        let g_j = nu.gamma_pos[j];
        for i in 0..=gp.min(a_odd) {
            if x(start + i) != nu.nu_at((g_j + i) as isize) {
                report.bridge = false;
            }
        }
        let dl = &nu.dl[j];
        let nu_l = nu.nu_at(g_j as isize);
        for g in 1..=(q as usize).min(a_odd) {
            let gr = Rational::from_integer(g.into());
            let squares: Rational = (start + 1..=start + g).map(|i| (x(i) - x(i - 1)) * (x(i) - x(i - 1))).sum();
            let fl = Rational::from_integer(floor_strict(&(nu_l + dl * &gr)));
            if squares != &gr * dl * dl + (Rational::one() - dl * Rational::from_integer(2.into())) * fl {
                report.square_sums = false;
            }
            let f_sum: Rational = (start + 1..=start + g).map(|i| f_xy(x(i), x(i - 1))).sum();
            let expected = if g as u64 == q {
                &twelfth * (block_square_sum(&qr, dl, nu_l) - &qr)
            } else {
                &twelfth
                    * (block_square_sum(&gr, dl, nu_l) + Rational::from_integer(6.into()) * (b2(x(start + g)) - b2(x(start)))
                        - &gr)
            };
            if f_sum != expected {
                report.f_sums = false;
            }
        }
    }
    Ok(report)
}
