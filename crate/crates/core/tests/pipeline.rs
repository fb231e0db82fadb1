use hecke_zero::arith::Rational;
use hecke_zero::biro::{condition_star_search, factorization_oracle_check, residue_mod_p, yokoi_intro_ab};
use hecke_zero::characters::{enumerate_characters, DirichletCharacter, Parity};
use hecke_zero::linearity::{closed_form_chi, direct_scaled_value, family_instance, try_instance, FamilySpec};
use hecke_zero::serial::{cyclo_from_json, cyclo_json, linearity_json, residue_report_json};
use hecke_zero::Error;

#[test]
fn closed_form_predicts_direct_values_for_every_character() {
    let y = FamilySpec::yokoi();
    for q in [3u64, 4, 5] {
        for chi in enumerate_characters(q).into_iter().filter(|c| !c.is_trivial()) {
            for r in 0..q {
                let cf = match closed_form_chi(&y, q, &chi, r) {
                    Ok(cf) => cf,
                    Err(Error::NoAdmissibleN { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                for k in 1..6i64 {
                    let Some(inst) = try_instance(&y, q as i64 * k + r as i64).unwrap() else { continue };
                    if inst.min_digit() < q as i64 {
                        continue;
                    }
                    let predicted = &cf.a_chi + &cf.b_chi.scale(&Rational::from_integer(k.into()));
                    assert_eq!(direct_scaled_value(&inst, &chi).unwrap(), predicted, "q={q} chi={} n={}", chi.id(), inst.n);
                }
            }
        }
    }
}

#[test]
fn oracle_on_both_families() {
    for (spec, ns) in [(FamilySpec::yokoi(), vec![1i64, 3, 5, 7]), (FamilySpec::rd_n2p1(), vec![1, 3, 5, 7, 9])] {
        for q in [3u64, 5, 7] {
            for chi in enumerate_characters(q).into_iter().filter(|c| c.is_primitive()) {
                for &n in &ns {
                    match factorization_oracle_check(&spec, n, q, &chi) {
                        Ok(check) => assert!(check.equal, "{} n={n} chi={}", spec.name, chi.id()),
                        Err(Error::NarrowClassNotOne { .. }) | Err(Error::NotSquarefree { .. }) => {}
                        Err(Error::IdealNotCoprime { .. }) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }
}

#[test]
fn sieve_pairs_are_well_formed() {
    for pair in condition_star_search(11, 23).unwrap() {
        assert!(pair.q % 2 == 1 && pair.p % 2 == 1);
        assert_eq!(pair.chi.invariants(), (Parity::Odd, pair.q));
        assert_eq!(pair.realization.order, pair.chi.order());
        assert_eq!(pair.witness, 0);
    }
}

#[test]
fn residue_reports_serialize() {
    let y = FamilySpec::yokoi();
    for pair in condition_star_search(5, 5).unwrap() {
        for r in 0..5 {
            let rep = residue_mod_p(&y, &pair, r).unwrap();
            let v = residue_report_json(&rep);
            assert_eq!(v["r"], r);
            assert_eq!(v["chi"], pair.chi.id());
        }
    }
}

#[test]
fn report_values_round_trip() {
    let chi = DirichletCharacter::parse("q=5;gens=2:1").unwrap();
    let rep = hecke_zero::linearity::verify_linearity(&FamilySpec::yokoi(), 5, &chi, 2, &[1, 3, 5]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&linearity_json(&rep).to_string()).unwrap();
    assert_eq!(cyclo_from_json(&v["slope"]).unwrap(), rep.slope);
    assert_eq!(cyclo_from_json(&v["A_chi"]).unwrap(), rep.a_chi.unwrap());
    for (value, json) in rep.direct.iter().zip(v["scaled_values"].as_array().unwrap()) {
        assert_eq!(&cyclo_from_json(json).unwrap(), value);
        assert_eq!(cyclo_json(value), *json);
    }
}

#[test]
fn intro_ratio_is_constant_in_r() {
    let chi = DirichletCharacter::parse("q=3;gens=2:1").unwrap();
    let rhos: Vec<_> = (0..3).map(|r| yokoi_intro_ab(3, &chi, r).unwrap().proportionality).collect();
    assert!(rhos.iter().all(|rho| rho.is_some() && rho == &rhos[0]), "{rhos:?}");
}

#[test]
fn members_match_their_fields() {
    let y = FamilySpec::yokoi();
    for n in [1i64, 3, 5, 7, 13] {
        let inst = family_instance(&y, n).unwrap();
        assert_eq!(inst.field.d, (n * n + 4) as u64);
        assert_eq!(inst.mcf.period[0], n + 2);
        assert_eq!(inst.mcf.m(), n as usize);
    }
}
