//! The acceptance suite, shared by the `acceptance` test target and the
//! `selftest` command.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::arith::{rat, CycloElement, QuadSurd, Rational};
use crate::biro::{condition_star_search, congruence_image, residue_mod_p, ResidueStatus, SIGN_CONVENTION};
use crate::cfrac::{delta_sequence, evaluate_minus, evaluate_plus, minus_expand, plus_to_minus, same_cycle, PlusCF};
use crate::characters::{gen_bernoulli_b1_chi, gen_bernoulli_b1_twisted, DirichletCharacter};
use crate::error::{Error, Result};
use crate::linearity::{
    admissible_members, block_checks, closed_form_cd, family_instance, verify_linearity, FamilySpec,
};
use crate::quadfield::{class_numbers, make_field};
use crate::shintani::{partial_hecke_L_zero, partial_zeta_zero, yamamoto_extended, yamamoto_identity_residual};

pub const BUDGET_L_VALUE: Duration = Duration::from_secs(1);
pub const BUDGET_IDENTITY: Duration = Duration::from_secs(10);
pub const BUDGET_LINEARITY: Duration = Duration::from_secs(30);
pub const RANDOM_WORDS: usize = 50;
pub const CLOSED_FORM_GRID: usize = 200;
pub const SEED: u64 = 0x5eed_1234;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {} ({:.2?}) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed,
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(u32, &str, Check); 10] = [
    (1, "exact L-value oracle", criterion_l_value),
    (2, "zero checks", criterion_zero),
    (3, "per-cell values", criterion_cells),
    (4, "yamamoto identity", criterion_identity),
    (5, "continued fractions", criterion_cf),
    (6, "closed form", criterion_closed_form),
    (7, "linearity end-to-end", criterion_linearity),
    (8, "condition star search", criterion_condition_star),
    (9, "congruence consistency", criterion_congruence),
    (10, "property suites", criterion_properties),
];

pub fn run_one(id: u32) -> Option<CriterionResult> {
    let &(id, name, check) = CRITERIA.iter().find(|(i, _, _)| *i == id)?;
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(outcome) => outcome,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CriterionResult { id, name, passed, detail, elapsed: start.elapsed() })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|(id, _, _)| run_one(*id)).collect()
}

fn quadratic3() -> DirichletCharacter {
    DirichletCharacter::parse("q=3;gens=2:1").expect("valid id")
}

fn quartic5() -> DirichletCharacter {
    DirichletCharacter::parse("q=5;gens=2:1").expect("valid id")
}

fn scalar(x: &CycloElement) -> Option<Rational> {
    x.rational_value()
}

fn criterion_l_value() -> Result<(bool, String)> {
    let chi = quadratic3();
    let mut ok = true;
    let mut detail = Vec::new();
    for (d, delta) in [(5u64, QuadSurd::new(3, 1, 2, 5)), (2, QuadSurd::new(2, 1, 1, 2))] {
        let start = Instant::now();
        let field = make_field(d)?;
        let value = partial_hecke_L_zero(&field, &delta, &field.maximal_order(), &chi)?;
        let elapsed = start.elapsed();
        let oracle = &gen_bernoulli_b1_chi(&chi) * &gen_bernoulli_b1_twisted(&chi, field.discriminant as i64)?;
        let signed = value.scale(&Rational::from_integer(SIGN_CONVENTION.into()));
        let hit = scalar(&value) == Some(rat(2, 3)) && signed == oracle && elapsed < BUDGET_L_VALUE;
        ok &= hit;
        detail.push(format!("d={d}: {value} vs {oracle} in {elapsed:.2?}"));
    }
    Ok((ok, detail.join("; ")))
}

fn criterion_zero() -> Result<(bool, String)> {
    let chi = DirichletCharacter::trivial(1);
    let mut ok = true;
    let mut detail = Vec::new();
    for d in [2u64, 5] {
        let field = make_field(d)?;
        let value = partial_hecke_L_zero(&field, &field.principal_delta(), &field.maximal_order(), &chi)?;
        ok &= value.is_zero();
        detail.push(format!("d={d}: {value}"));
    }
    Ok((ok, detail.join("; ")))
}

fn criterion_cells() -> Result<(bool, String)> {
    let z2 = partial_zeta_zero(3, 1, 1, &minus_expand(&QuadSurd::new(2, 1, 1, 2))?);
    let z5 = partial_zeta_zero(3, 1, 1, &minus_expand(&QuadSurd::new(3, 1, 2, 5))?);
    Ok((z2 == rat(2, 9) && z5 == rat(-1, 9), format!("d=2: {z2}; d=5: {z5}")))
}

fn criterion_identity() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut failures = 0usize;
    let mut cases = 0usize;
    for d in [2u64, 3, 5, 13, 15, 29] {
        let field = make_field(d)?;
        let mcf = minus_expand(&field.principal_delta())?;
        for q in [2u64, 3, 5] {
            for c in 1..=q {
                for dd in 1..=q {
                    cases += 1;
                    if !yamamoto_identity_residual(&field, &mcf, q, c, dd)?.is_zero() {
                        failures += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Ok((failures == 0 && elapsed < BUDGET_IDENTITY, format!("{cases} cases, {failures} nonzero, {elapsed:.2?}")))
}

fn criterion_cf() -> Result<(bool, String)> {
    let example = plus_to_minus(&PlusCF::purely_periodic(vec![2, 3]))?;
    let mut ok = example.period == vec![4, 2, 2];
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut mismatches = 0;
    for _ in 0..RANDOM_WORDS {
        let len = rng.gen_range(1..=6);
        let word: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=9)).collect();
        let plus = PlusCF::purely_periodic(word);
        let converted = plus_to_minus(&plus)?;
        let x = evaluate_plus(&plus)?.add_int(1);
        let direct = minus_expand(&x)?;
        let repeated: Vec<i64> = direct.period.iter().cycle().take(converted.m()).copied().collect();
        let agrees = direct.is_purely_periodic()
            && converted.m() % direct.m() == 0
            && same_cycle(&converted.period, &repeated)
            && evaluate_minus(&converted)? == x;
        if !agrees {
            mismatches += 1;
        }
    }
    ok &= mismatches == 0;
    let mut units = Vec::new();
    for d in [2u64, 3, 5, 13, 15] {
        let field = make_field(d)?;
        let unit_ok = match delta_sequence(&field, &minus_expand(&field.principal_delta())?) {
            Ok(_) => true,
            Err(Error::UnitMismatch { .. }) => false,
            Err(e) => return Err(e),
        };
        ok &= unit_ok;
        units.push(format!("{d}:{unit_ok}"));
    }
    Ok((ok, format!("[[2,3]] -> {example}; {mismatches} mismatches in {RANDOM_WORDS} words; units {}", units.join(","))))
}

fn criterion_closed_form() -> Result<(bool, String)> {
    let y = FamilySpec::yokoi();
    let (a, b) = closed_form_cd(&y, 3, 1, 1, 1)?;
    let mut ok = a == rat(-4, 3) && b == rat(-4, 1);
    let mut detail = vec![format!("(A, B) = ({a}, {b})")];
    for (n, k) in [(1i64, 0i64), (7, 2), (13, 4)] {
        let inst = family_instance(&y, n)?;
        let direct = partial_zeta_zero(3, 1, 1, &inst.mcf);
        let predicted = (&a + &b * rat(k, 1)) * rat(1, 12);
        ok &= direct == predicted;
        detail.push(format!("n={n}: {direct}"));
    }
    Ok((ok, detail.join("; ")))
}

fn criterion_linearity() -> Result<(bool, String)> {
    let start = Instant::now();
    let y = FamilySpec::yokoi();
    let chi = quartic5();
    let ks: Vec<i64> = (0..=20).collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for r in 0..5u64 {
        let rep = verify_linearity(&y, 5, &chi, r, &ks)?;
        let pass = rep.ks.len() >= 3 && rep.affine_exact && rep.closed_form_match && rep.integral;
        ok &= pass;
        detail.push(format!("r={r}: k={:?} {}", rep.ks, if pass { "ok" } else { "bad" }));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < BUDGET_LINEARITY;
    detail.push(format!("{elapsed:.2?}"));
    Ok((ok, detail.join("; ")))
}

fn criterion_condition_star() -> Result<(bool, String)> {
    let pairs = condition_star_search(7, 13)?;
    let quartic: Vec<_> = pairs.iter().filter(|p| p.q == 5 && p.p == 5 && p.chi.order() == 4).collect();
    let conjugate = quartic.len() == 2 && quartic[0].chi == quartic[1].chi.conj();
    let only_quartic = pairs.len() == quartic.len();
    let others: Vec<String> = pairs
        .iter()
        .filter(|p| !(p.q == 5 && p.p == 5 && p.chi.order() == 4))
        .map(|p| format!("(q={}, p={}, order {})", p.q, p.p, p.chi.order()))
        .collect();
    Ok((
        conjugate && only_quartic,
        format!("{} quartic (5,5) pairs; other pairs: [{}]", quartic.len(), others.join(", ")),
    ))
}

fn criterion_congruence() -> Result<(bool, String)> {
    let y = FamilySpec::yokoi();
    let pairs: Vec<_> = condition_star_search(5, 5)?;
    let mut ok = !pairs.is_empty();
    let mut detail = Vec::new();
    for n in [5i64, 7, 13, 17] {
        let d = (n * n + 4) as u64;
        let (h, h_plus) = class_numbers(d)?;
        ok &= h == 1 && h_plus == 1;
        for pair in &pairs {
            let image = congruence_image(&y, pair, n)?;
            let report = residue_mod_p(&y, pair, (n % 5) as u64)?;
            let residue_ok = report.status != ResidueStatus::Determined || report.residue == Some((n % 5) as u64);
            ok &= image == 0 && residue_ok;
            detail.push(format!("n={n} image {}: {} {:?}", pair.realization.image, image, report.residue));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn criterion_properties() -> Result<(bool, String)> {
    let y = FamilySpec::yokoi();
    let mut range_ok = true;
    let mut bridge_ok = true;
    let mut period_ok = true;
    let mut blocks = 0usize;
    for q in [3u64, 5] {
        for r in 0..q {
            let members: Vec<_> = admissible_members(&y, q, r, 8)?
                .into_iter()
                .filter(|i| i.min_digit() >= q as i64)
                .take(2)
                .collect();
            bridge_ok &= members.len() == 2;
            for inst in &members {
                for c in 1..=q {
                    for d in 1..=q {
                        let rep = block_checks(&y, inst, q, c, d)?;
                        bridge_ok &= rep.bridge;
                        blocks += rep.blocks;
                        let m = inst.mcf.m();
                        let seq = yamamoto_extended(q, c, d, &inst.mcf, 2 * m);
                        let qr = Rational::from_integer(q.into());
                        range_ok &= seq.x.iter().all(|x| {
                            x > &Rational::from_integer(0.into())
                                && x <= &Rational::from_integer(1.into())
                                && (x * &qr).is_integer()
                        });
                        for i in 0..=(2 * m - q as usize) {
                            if (i..i + q as usize).all(|j| inst.mcf.digit(j) == 2) {
                                period_ok &= seq.x_at((i + q as usize) as isize) == seq.x_at(i as isize);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(SEED);
    let families = [FamilySpec::yokoi(), FamilySpec::rd_n2p1()];
    let mut integral_ok = true;
    for case in 0..CLOSED_FORM_GRID {
        let q = rng.gen_range(1..=9u64);
        let (r, c, d) = (rng.gen_range(0..q), rng.gen_range(1..=q), rng.gen_range(1..=q));
        let (a, b) = closed_form_cd(&families[case % 2], q, r, c, d)?;
        let q2 = rat((q * q) as i64, 1);
        integral_ok &= (a * &q2).is_integer() && (b * &q2).is_integer();
    }
    Ok((
        range_ok && bridge_ok && period_ok && integral_ok,
        format!(
            "range {range_ok}; bridge {bridge_ok} over {blocks} blocks; period {period_ok}; \
             integrality {integral_ok} over {CLOSED_FORM_GRID} cases"
        ),
    ))
}
