//! Lossless JSON encodings of the exact values and reports. Integers that fit
//! an `i64` are JSON numbers and larger ones are decimal strings; rationals are
//! `"num/den"` strings. Fields named `display` are decimal approximations and
//! carry no authority.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::arith::{decimal_approx, parse_rational, rational_to_string, CycloElement, QuadSurd, Rational};
use crate::biro::{ConditionStarPair, IntroAB, OracleCheck, ResidueReport};
use crate::cfrac::{Conversion, MinusCF, PlusCF};
use crate::error::{Error, Result};
use crate::linearity::{BlockReport, ClosedFormAB, LinearityReport};
use crate::quadfield::FieldData;
use crate::shintani::Cell;

pub const DISPLAY_DIGITS: usize = 30;

fn bad(what: &str, v: &Value) -> Error {
    Error::Parse { location: format!("json {what}"), message: format!("unexpected value {v}") }
}

pub fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad("integer", v)),
        Value::String(s) => s.parse().map_err(|_| bad("integer", v)),
        _ => Err(bad("integer", v)),
    }
}

pub fn rational_json(x: &Rational) -> Value {
    json!(rational_to_string(x))
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(_) => Ok(Rational::from_integer(int_from_json(v)?)),
        _ => Err(bad("rational", v)),
    }
}

pub fn rational_with_display(x: &Rational) -> Value {
    json!({ "value": rational_to_string(x), "display": decimal_approx(x, DISPLAY_DIGITS) })
}

/// `{"order", "coeffs"}` in the power basis modulo the cyclotomic polynomial,
/// plus `value` and `display` when the element is rational.
pub fn cyclo_json(x: &CycloElement) -> Value {
    let mut obj = Map::new();
    obj.insert("order".into(), json!(x.order()));
    obj.insert("coeffs".into(), Value::Array(x.coeffs().iter().map(rational_json).collect()));
    if let Some(r) = x.rational_value() {
        obj.insert("value".into(), rational_json(&r));
        obj.insert("display".into(), json!(decimal_approx(&r, DISPLAY_DIGITS)));
    }
    Value::Object(obj)
}

pub fn cyclo_from_json(v: &Value) -> Result<CycloElement> {
    let order = v.get("order").and_then(Value::as_u64).filter(|&o| o >= 1).ok_or_else(|| bad("cyclotomic", v))?;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("cyclotomic", v))?
        .iter()
        .map(rational_from_json)
        .collect::<Result<Vec<_>>>()?;
    Ok(CycloElement::from_coeffs(order, coeffs))
}

/// Decimal expansion of `(a + b sqrt d) / c` truncated after `digits` places.
pub fn surd_decimal(x: &QuadSurd, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let root = (x.b() * x.b() * BigInt::from(x.d()) * &scale * &scale).sqrt();
    let signed_root = if x.b().is_negative() { -root } else { root };
    let scaled_numer = x.a() * &scale + signed_root;
    let approx = Rational::new(scaled_numer, x.c() * &scale);
    decimal_approx(&approx, digits)
}

pub fn surd_json(x: &QuadSurd) -> Value {
    json!({
        "a": int_json(x.a()),
        "b": int_json(x.b()),
        "c": int_json(x.c()),
        "d": x.d(),
        "text": x.to_string(),
        "display": surd_decimal(x, DISPLAY_DIGITS),
    })
}

pub fn surd_from_json(v: &Value) -> Result<QuadSurd> {
    let get = |k: &str| v.get(k).ok_or_else(|| bad("surd", v)).and_then(int_from_json);
    let c = get("c")?;
    if c.is_zero() {
        return Err(bad("surd", v));
    }
    let d = v.get("d").and_then(Value::as_u64).filter(|&d| d > 1).ok_or_else(|| bad("surd", v))?;
    Ok(QuadSurd::new(get("a")?, get("b")?, c, d))
}

fn digits_from_json(v: Option<&Value>, whole: &Value) -> Result<Vec<i64>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| bad("digits", whole))?
        .iter()
        .map(|d| d.as_i64().ok_or_else(|| bad("digit", d)))
        .collect()
}

pub fn plus_cf_json(w: &PlusCF) -> Value {
    json!({ "preperiod": w.preperiod, "period": w.period, "text": w.to_string() })
}

pub fn plus_cf_from_json(v: &Value) -> Result<PlusCF> {
    Ok(PlusCF { preperiod: digits_from_json(v.get("preperiod"), v)?, period: digits_from_json(v.get("period"), v)? })
}

pub fn minus_cf_json(w: &MinusCF) -> Value {
    let mut obj = json!({ "preperiod": w.preperiod, "period": w.period, "text": w.to_string() });
    if let Some(conv) = &w.conversion {
        obj["conversion"] = json!({ "s": conv.s, "positions": conv.positions });
    }
    obj
}

pub fn minus_cf_from_json(v: &Value) -> Result<MinusCF> {
    let conversion = match v.get("conversion") {
        None | Some(Value::Null) => None,
        Some(c) => Some(Conversion {
            s: c.get("s").and_then(Value::as_u64).ok_or_else(|| bad("conversion", c))? as usize,
            positions: digits_from_json(c.get("positions"), c)?.into_iter().map(|p| p as usize).collect(),
        }),
    };
    Ok(MinusCF {
        preperiod: digits_from_json(v.get("preperiod"), v)?,
        period: digits_from_json(v.get("period"), v)?,
        conversion,
    })
}

pub fn field_json(f: &FieldData, class_numbers: Option<(u64, u64)>) -> Value {
    let mut obj = json!({
        "d": f.d,
        "discriminant": f.discriminant,
        "omega": surd_json(&f.omega),
        "fund_unit": surd_json(&f.fund_unit),
        "fund_unit_norm": f.fund_unit_norm,
        "tp_fund_unit": surd_json(&f.tp_fund_unit),
    });
    if let Some((h, h_plus)) = class_numbers {
        obj["h"] = json!(h);
        obj["h_plus"] = json!(h_plus);
    }
    obj
}

pub fn cell_json(cell: &Cell) -> Value {
    json!({
        "C": cell.c,
        "D": cell.d,
        "norm_residue": cell.norm_residue,
        "chi_exponent": cell.chi_exponent,
        "zeta": rational_json(&cell.zeta),
    })
}

pub fn closed_form_json(cf: &ClosedFormAB) -> Value {
    json!({
        "family": cf.family,
        "q": cf.q,
        "r": cf.r,
        "chi": cf.chi,
        "n_ref": cf.n_ref,
        "A_chi": cyclo_json(&cf.a_chi),
        "B_chi": cyclo_json(&cf.b_chi),
        "cells": cf.cells.iter().map(|c| json!({
            "C": c.c,
            "D": c.d,
            "A_CD": rational_json(&c.a_cd),
            "B_CD": rational_json(&c.b_cd),
            "norm_residue": c.norm_residue,
            "F_exponent": c.f_exponent,
        })).collect::<Vec<_>>(),
    })
}

pub fn linearity_json(rep: &LinearityReport) -> Value {
    json!({
        "family": rep.family,
        "q": rep.q,
        "chi": rep.chi,
        "r": rep.r,
        "k": rep.ks,
        "skipped_k": rep.skipped,
        "scaled_values": rep.direct.iter().map(cyclo_json).collect::<Vec<_>>(),
        "intercept": cyclo_json(&rep.intercept),
        "slope": cyclo_json(&rep.slope),
        "A_chi": rep.a_chi.as_ref().map(cyclo_json),
        "B_chi": rep.b_chi.as_ref().map(cyclo_json),
        "affine_exact": rep.affine_exact,
        "closed_form_match": rep.closed_form_match,
        "hypothesis": rep.hypothesis_ok,
        "integral": rep.integral,
    })
}

pub fn block_report_json(rep: &BlockReport) -> Value {
    json!({ "blocks": rep.blocks, "bridge": rep.bridge, "square_sums": rep.square_sums, "f_sums": rep.f_sums })
}

pub fn pair_json(pair: &ConditionStarPair) -> Value {
    json!({
        "q": pair.q,
        "p": pair.p,
        "chi": pair.chi.id(),
        "chi_order": pair.chi.order(),
        "realization": { "order": pair.realization.order, "image": pair.realization.image },
        "witness": pair.witness,
    })
}

pub fn residue_report_json(rep: &ResidueReport) -> Value {
    json!({
        "family": rep.family,
        "q": rep.q,
        "chi": rep.chi,
        "p": rep.realization.p,
        "realization": { "order": rep.realization.order, "image": rep.realization.image },
        "r": rep.r,
        "A_image": rep.a_image,
        "B_image": rep.b_image,
        "status": rep.status.as_str(),
        "residue": rep.residue,
    })
}

pub fn oracle_json(check: &OracleCheck) -> Value {
    json!({
        "n": check.n,
        "d": check.d,
        "discriminant": check.discriminant,
        "lhs": cyclo_json(&check.lhs),
        "rhs": cyclo_json(&check.rhs),
        "equal": check.equal,
    })
}

pub fn intro_json(ab: &IntroAB) -> Value {
    json!({
        "q": ab.q,
        "r": ab.r,
        "chi": ab.chi,
        "A": cyclo_json(&ab.a),
        "B": cyclo_json(&ab.b),
        "proportionality": ab.proportionality.as_ref().map(rational_json),
    })
}
