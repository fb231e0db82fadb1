//! Plus and minus continued fractions of quadratic surds, the conversion from
//! a plus period to a minus period, and the cone data `delta_i`, `A_i`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{rat, QuadSurd, Rational};
use crate::error::{Error, Result};
use crate::quadfield::FieldData;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfKind {
    Plus,
    Minus,
}

impl CfKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CfKind::Plus => "plus",
            CfKind::Minus => "minus",
        }
    }
}

/// `[a_0, a_1, ...] = a_0 + 1/(a_1 + ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlusCF {
    pub preperiod: Vec<i64>,
    pub period: Vec<i64>,
}

/// Data attached to a minus word produced from a plus period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conversion {
    /// Length of the plus period.
    pub s: usize,
    /// Positions `S_0 < S_1 < ...` of the digits exceeding 2.
    pub positions: Vec<usize>,
}

impl Conversion {
    /// `mu(s)`: 1 for odd `s`, 1/2 for even `s`.
    pub fn mu(&self) -> Rational {
        if self.s % 2 == 1 {
            rat(1, 1)
        } else {
            rat(1, 2)
        }
    }

    /// `s * mu(s)`, the number of digits above 2 per minus period.
    pub fn s_mu(&self) -> usize {
        if self.s % 2 == 1 {
            self.s
        } else {
            self.s / 2
        }
    }
}

/// `((b_0, b_1, ...)) = b_0 - 1/(b_1 - ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinusCF {
    pub preperiod: Vec<i64>,
    pub period: Vec<i64>,
    pub conversion: Option<Conversion>,
}

impl PlusCF {
    pub fn purely_periodic(period: Vec<i64>) -> Self {
        PlusCF { preperiod: Vec::new(), period }
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }
}

impl MinusCF {
    pub fn purely_periodic(period: Vec<i64>) -> Self {
        MinusCF { preperiod: Vec::new(), period, conversion: None }
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    /// Period length `m`.
    pub fn m(&self) -> usize {
        self.period.len()
    }

    /// Digit `b_i` with the index read cyclically.
    pub fn digit(&self, i: usize) -> i64 {
        self.period[i % self.period.len()]
    }

    /// Equality of periods up to rotation.
    pub fn same_cycle(&self, other: &MinusCF) -> bool {
        same_cycle(&self.period, &other.period)
    }
}

pub fn same_cycle(a: &[i64], b: &[i64]) -> bool {
    a.len() == b.len() && (0..a.len().max(1)).any(|r| (0..a.len()).all(|i| a[(i + r) % a.len()] == b[i]))
}

fn fmt_digits(f: &mut fmt::Formatter<'_>, pre: &[i64], period: &[i64], open: &str, close: &str) -> fmt::Result {
    let join = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    if pre.is_empty() {
        write!(f, "{open}{}{close}", join(period))
    } else {
        write!(f, "{};{open}{}{close}", join(pre), join(period))
    }
}

impl fmt::Display for PlusCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_digits(f, &self.preperiod, &self.period, "[[", "]]")
    }
}

impl fmt::Display for MinusCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_digits(f, &self.preperiod, &self.period, "((", "))")
    }
}

fn digit_i64(v: BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::Invalid(format!("continued-fraction digit {v} exceeds 64 bits")))
}

/// Runs `step` from `x` until a state repeats; returns (digits, index of the
/// first repeated state).
fn expand_states<F>(x: &QuadSurd, mut step: F) -> Result<(Vec<i64>, usize)>
where
    F: FnMut(&QuadSurd) -> (BigInt, QuadSurd),
{
    if x.is_rational() {
        return Err(Error::RationalInput(x.to_string()));
    }
    let mut seen: HashMap<QuadSurd, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut cur = x.clone();
    loop {
        if let Some(&start) = seen.get(&cur) {
            return Ok((digits, start));
        }
        seen.insert(cur.clone(), digits.len());
        let (digit, next) = step(&cur);
        digits.push(digit_i64(digit)?);
        cur = next;
    }
}

pub fn plus_expand(x: &QuadSurd) -> Result<PlusCF> {
    let (mut digits, start) = expand_states(x, |xk| {
        let a = xk.floor();
        let next = (xk - &QuadSurd::from_int(a.clone(), xk.d())).inv();
        (a, next)
    })?;
    let period = digits.split_off(start);
    Ok(PlusCF { preperiod: digits, period })
}

pub fn minus_expand(x: &QuadSurd) -> Result<MinusCF> {
    let (mut digits, start) = expand_states(x, |xk| {
        let b = xk.ceil();
        let next = (&QuadSurd::from_int(b.clone(), xk.d()) - xk).inv();
        (b, next)
    })?;
    let period = digits.split_off(start);
    Ok(MinusCF { preperiod: digits, period, conversion: None })
}

/// Minus period of `x + 1` computed from the plus period of `x`: `b_i =
/// a_{2j} + 2` at `i = S_j` and `b_i = 2` elsewhere, where `S_0 = 0` and
/// `S_j = S_{j-1} + a_{2j-1}`, indices of `a` taken modulo `s`.
pub fn plus_to_minus(p: &PlusCF) -> Result<MinusCF> {
    if !p.is_purely_periodic() || p.period.is_empty() {
        return Err(Error::NotPurelyPeriodic);
    }
    if let Some(bad) = p.period.iter().find(|&&a| a < 1) {
        return Err(Error::Invalid(format!("plus digit {bad} is below 1")));
    }
    let s = p.period.len();
    let a = |i: usize| p.period[i % s];
    let steps = if s.is_multiple_of(2) { s / 2 } else { s };
    let mut positions = Vec::with_capacity(steps);
    let mut pos = 0usize;
    for j in 1..=steps {
        positions.push(pos);
        pos += a(2 * j - 1) as usize;
    }
    let m = pos;
    if s % 2 == 1 {
        let m_alt: i64 = p.period.iter().sum();
        if m_alt as usize != m {
            return Err(Error::Internal(format!(
                "odd-period length forms disagree: {m} versus {m_alt}"
            )));
        }
    }
    let mut period = vec![2i64; m];
    for (j, &i) in positions.iter().enumerate() {
        period[i] = a(2 * j) + 2;
    }
    Ok(MinusCF {
        preperiod: Vec::new(),
        period,
        conversion: Some(Conversion { s, positions }),
    })
}

/// Largest root of `A x^2 + B x + C = 0` as a surd.
fn larger_root(qa: &BigInt, qb: &BigInt, qc: &BigInt, word: &str) -> Result<QuadSurd> {
    if qa.is_zero() {
        return Err(Error::DegenerateWord(word.to_string()));
    }
    let disc = qb * qb - BigInt::from(4) * qa * qc;
    if disc.is_negative() {
        return Err(Error::DegenerateWord(word.to_string()));
    }
    let (k, d) = square_part(&disc);
    if d.is_one() || d.is_zero() {
        return Err(Error::DegenerateWord(word.to_string()));
    }
    let d = d
        .to_u64()
        .ok_or_else(|| Error::Invalid(format!("radicand of {word} exceeds 64 bits")))?;
    let (num_a, den) = if qa.is_positive() {
        (-qb, BigInt::from(2) * qa)
    } else {
        (qb.clone(), BigInt::from(-2) * qa)
    };
    Ok(QuadSurd::new(num_a, k, den, d))
}

/// `n = k^2 * d` with `d` squarefree.
fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut k = BigInt::one();
    let mut rest = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            k *= &p;
        }
        if (&rest % &p).is_zero() {
            rest /= &p;
            // the remaining cofactor keeps this prime once
            let (k2, d2) = square_part(&rest);
            return (k * k2, d2 * p);
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        let r = rest.sqrt();
        if &r * &r == rest {
            return (k * r, BigInt::one());
        }
    }
    (k, rest)
}

fn fixed_point(period: &[i64], sign: i64, word: &str) -> Result<QuadSurd> {
    // x = M(x) for M the product of [[c, sign], [1, 0]] over the period
    let (mut p, mut pp, mut q, mut qq) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    for &c in period {
        let c = BigInt::from(c);
        let np = &p * &c + &pp;
        let nq = &q * &c + &qq;
        pp = &p * sign;
        qq = &q * sign;
        p = np;
        q = nq;
    }
    // x = (p x + pp) / (q x + qq)
    larger_root(&q, &(&qq - &p), &(-pp), word)
}

fn apply_preperiod(pre: &[i64], tail: QuadSurd, sign: i64) -> QuadSurd {
    pre.iter().rev().fold(tail, |y, &c| {
        let inv = y.inv();
        let c = QuadSurd::from_int(c, y.d());
        if sign > 0 {
            &c + &inv
        } else {
            &c - &inv
        }
    })
}

pub fn evaluate_plus(word: &PlusCF) -> Result<QuadSurd> {
    if word.period.is_empty() {
        return Err(Error::Invalid("empty period".into()));
    }
    let tail = fixed_point(&word.period, 1, &word.to_string())?;
    Ok(apply_preperiod(&word.preperiod, tail, 1))
}

pub fn evaluate_minus(word: &MinusCF) -> Result<QuadSurd> {
    if word.period.is_empty() {
        return Err(Error::Invalid("empty period".into()));
    }
    let tail = fixed_point(&word.period, -1, &word.to_string())?;
    Ok(apply_preperiod(&word.preperiod, tail, -1))
}

#[derive(Clone, Copy, Debug)]
pub enum CfWord<'a> {
    Plus(&'a PlusCF),
    Minus(&'a MinusCF),
}

pub fn evaluate_periodic(word: CfWord<'_>) -> Result<QuadSurd> {
    match word {
        CfWord::Plus(w) => evaluate_plus(w),
        CfWord::Minus(w) => evaluate_minus(w),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSequence {
    /// `delta_1, ..., delta_m`, with `delta_m = delta_0`.
    pub deltas: Vec<QuadSurd>,
    /// `A_0 = 1, A_i = A_{i-1} / delta_i`.
    pub a: Vec<QuadSurd>,
}

pub fn delta_sequence(field: &FieldData, mcf: &MinusCF) -> Result<DeltaSequence> {
    if !mcf.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic);
    }
    let m = mcf.m();
    let mut deltas = Vec::with_capacity(m);
    for i in 1..=m {
        let rotated: Vec<i64> = (0..m).map(|k| mcf.digit(i + k)).collect();
        deltas.push(evaluate_minus(&MinusCF::purely_periodic(rotated))?);
    }
    let mismatch = |product: String| Error::UnitMismatch {
        product,
        unit: field.tp_fund_unit.to_string(),
    };
    if deltas[0].d() != field.d {
        return Err(mismatch(format!("an element of Q(sqrt({}))", deltas[0].d())));
    }
    let mut a = Vec::with_capacity(m + 1);
    a.push(field.one());
    let mut product = field.one();
    for delta in &deltas {
        let next = a.last().unwrap() / delta;
        a.push(next);
        product = &product * delta;
    }
    if product != field.tp_fund_unit {
        return Err(mismatch(product.to_string()));
    }
    Ok(DeltaSequence { deltas, a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::make_field;
    use proptest::prelude::*;

    fn surd(a: i64, b: i64, c: i64, d: u64) -> QuadSurd {
        QuadSurd::new(a, b, c, d)
    }

    #[test]
    fn plus_examples() {
        assert_eq!(plus_expand(&surd(1, 1, 2, 5)).unwrap(), PlusCF::purely_periodic(vec![1]));
        assert_eq!(plus_expand(&surd(1, 1, 1, 2)).unwrap(), PlusCF::purely_periodic(vec![2]));
        assert_eq!(plus_expand(&surd(3, 1, 3, 15)).unwrap(), PlusCF::purely_periodic(vec![2, 3]));
        let sqrt2 = plus_expand(&QuadSurd::sqrt_d(2)).unwrap();
        assert_eq!(sqrt2.preperiod, vec![1]);
        assert_eq!(sqrt2.period, vec![2]);
        assert!(matches!(plus_expand(&QuadSurd::from_int(3, 2)), Err(Error::RationalInput(_))));
    }

    #[test]
    fn minus_examples() {
        assert_eq!(minus_expand(&surd(2, 1, 1, 2)).unwrap().period, vec![4, 2]);
        assert_eq!(minus_expand(&surd(3, 1, 2, 5)).unwrap().period, vec![3]);
        assert_eq!(minus_expand(&surd(6, 1, 3, 15)).unwrap().period, vec![4, 2, 2]);
        assert!(minus_expand(&surd(6, 1, 3, 15)).unwrap().is_purely_periodic());
    }

    #[test]
    fn conversion_examples() {
        let c = plus_to_minus(&PlusCF::purely_periodic(vec![1])).unwrap();
        assert_eq!((c.period.clone(), c.m()), (vec![3], 1));
        let c = plus_to_minus(&PlusCF::purely_periodic(vec![2])).unwrap();
        assert_eq!(c.period, vec![4, 2]);
        let c = plus_to_minus(&PlusCF::purely_periodic(vec![2, 3])).unwrap();
        assert_eq!(c.period, vec![4, 2, 2]);
        let conv = c.conversion.unwrap();
        assert_eq!((conv.s, conv.positions), (2, vec![0]));
        let not_pure = PlusCF { preperiod: vec![1], period: vec![2] };
        assert_eq!(plus_to_minus(&not_pure), Err(Error::NotPurelyPeriodic));
    }

    #[test]
    fn evaluate_examples() {
        let e = |p: Vec<i64>| evaluate_minus(&MinusCF::purely_periodic(p)).unwrap();
        assert_eq!(e(vec![3]), surd(3, 1, 2, 5));
        assert_eq!(e(vec![4, 2, 2]), surd(6, 1, 3, 15));
        assert_eq!(evaluate_plus(&PlusCF::purely_periodic(vec![2])).unwrap(), surd(1, 1, 1, 2));
        assert!(matches!(
            evaluate_minus(&MinusCF::purely_periodic(vec![2, 2])),
            Err(Error::DegenerateWord(_))
        ));
    }

    #[test]
    fn delta_sequence_examples() {
        for (d, word) in [(2u64, vec![4, 2]), (5, vec![3]), (15, vec![4, 2, 2])] {
            let f = make_field(d).unwrap();
            let mcf = MinusCF::purely_periodic(word);
            let ds = delta_sequence(&f, &mcf).unwrap();
            let m = mcf.m();
            for i in 0..m {
                // delta_i = b_i - 1/delta_{i+1}, deltas[k] holds delta_{k+1}
                let di = &ds.deltas[(i + m - 1) % m];
                let next = &ds.deltas[i % m];
                let rhs = &QuadSurd::from_int(mcf.digit(i), d) - &next.inv();
                assert_eq!(di, &rhs);
                assert!(di > &f.one());
            }
            assert_eq!(ds.a.last().unwrap(), &f.tp_fund_unit.inv());
        }
        let f = make_field(2).unwrap();
        assert!(matches!(
            delta_sequence(&f, &MinusCF::purely_periodic(vec![34])),
            Err(Error::UnitMismatch { .. })
        ));
        // the unit of the order of conductor 2 in Q(sqrt 5) is not the field unit
        let f5 = make_field(5).unwrap();
        assert!(matches!(
            delta_sequence(&f5, &MinusCF::purely_periodic(vec![3, 3])),
            Err(Error::UnitMismatch { .. })
        ));
    }

    #[test]
    fn square_part_examples() {
        assert_eq!(square_part(&BigInt::from(72)), (BigInt::from(6), BigInt::from(2)));
        assert_eq!(square_part(&BigInt::from(60)), (BigInt::from(2), BigInt::from(15)));
        assert_eq!(square_part(&BigInt::from(49)), (BigInt::from(7), BigInt::from(1)));
        assert_eq!(square_part(&BigInt::from(7 * 7 * 13)), (BigInt::from(7), BigInt::from(13)));
    }

    fn arb_plus_word() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(1i64..6, 1..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn conversion_matches_direct_expansion(word in arb_plus_word()) {
            let p = PlusCF::purely_periodic(word);
            let converted = plus_to_minus(&p).unwrap();
            let x = evaluate_plus(&p).unwrap();
            let direct = minus_expand(&x.add_int(1)).unwrap();
            prop_assert!(direct.is_purely_periodic());
            prop_assert!(direct.period.iter().all(|&b| b >= 2));
            // the converted period may be a repetition of the minimal one
            let reps = converted.m() / direct.m();
            prop_assert_eq!(reps * direct.m(), converted.m());
            let repeated: Vec<i64> = direct.period.iter().cycle().take(converted.m()).copied().collect();
            prop_assert!(same_cycle(&converted.period, &repeated));
            prop_assert_eq!(evaluate_minus(&converted).unwrap(), x.add_int(1));
            let big = converted.period.iter().filter(|&&b| b > 2).count();
            prop_assert_eq!(big, converted.conversion.as_ref().unwrap().s_mu());
        }

        #[test]
        fn plus_round_trip(word in arb_plus_word(), pre in prop::collection::vec(1i64..6, 0..3)) {
            let w = PlusCF { preperiod: pre, period: word };
            let x = evaluate_plus(&w).unwrap();
            let back = plus_expand(&x).unwrap();
            prop_assert!(back.period.iter().all(|&a| a >= 1));
            prop_assert_eq!(evaluate_plus(&back).unwrap(), x);
        }
    }
}
