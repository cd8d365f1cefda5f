//! Closed-form F-thresholds: the Thom-Sebastiani sum formula, monomials,
//! iterated diagonal folds, powers, disjoint products and jumping-number
//! candidates.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::basep::{
    carry_profile, is_p_adic, rational_to_string, CarryProfile, ExtNat, Prime, Rational,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    EqualsOne,
    PPowerDenominator,
    Generic,
}

impl Classification {
    pub fn of(value: &Rational, p: Prime) -> Classification {
        if value.is_one() {
            Classification::EqualsOne
        } else if is_p_adic(value, p) {
            Classification::PPowerDenominator
        } else {
            Classification::Generic
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::EqualsOne => "EQUALS_ONE",
            Classification::PPowerDenominator => "P_POWER_DENOMINATOR",
            Classification::Generic => "GENERIC",
        }
    }
}

/// An F-pure threshold with its classification and, when it came from the
/// sum formula, the carry profile used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FptValue {
    pub value: Rational,
    pub classification: Classification,
    pub profile: Option<CarryProfile>,
}

#[derive(Serialize)]
struct FptValueJson {
    value: String,
    classification: Classification,
    #[serde(rename = "L")]
    l: Option<ExtNat>,
    d: Option<ExtNat>,
}

impl FptValue {
    pub fn new(value: Rational, p: Prime, profile: Option<CarryProfile>) -> FptValue {
        let classification = Classification::of(&value, p);
        FptValue {
            value,
            classification,
            profile,
        }
    }

    /// `{value, classification, L, d}` with the value as "n/d".
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FptValueJson {
            value: rational_to_string(&self.value),
            classification: self.classification,
            l: self.profile.map(|pr| pr.l),
            d: self.profile.map(|pr| pr.d),
        })
        .expect("plain data serializes")
    }
}

/// Either a value or the reason a formula does not apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Value(T),
    Inapplicable(String),
}

impl<T> Outcome<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Outcome::Value(v) => Some(v),
            Outcome::Inapplicable(_) => None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        matches!(self, Outcome::Value(_))
    }
}

fn in_unit_interval(a: &Rational) -> bool {
    a.is_positive() && *a <= Rational::one()
}

/// c^m(g1 + g2) from a1 = c(g1) and a2 = c(g2):
/// a1 + a2 if the expansions never carry, else ⟨a1⟩_L + ⟨a2⟩_L + p^−L.
pub fn ts_fthreshold(a1: &Rational, a2: &Rational, p: Prime) -> Result<FptValue> {
    for a in [a1, a2] {
        if !in_unit_interval(a) {
            return Err(Error::Domain(format!(
                "component threshold {} is not in (0,1]",
                rational_to_string(a)
            )));
        }
    }
    if a1 + a2 > Rational::one() {
        return Err(Error::Inapplicable("a1+a2 > 1".into()));
    }
    let profile = carry_profile(a1, a2, p)?;
    let value = match profile.l {
        ExtNat::Infinite => a1 + a2,
        ExtNat::Finite(l) => {
            let s1 = crate::basep::expand(a1, p)?;
            let s2 = crate::basep::expand(a2, p)?;
            s1.truncate(ExtNat::Finite(l))
                + s2.truncate(ExtNat::Finite(l))
                + Rational::new(BigInt::one(), p.pow_big(l))
        }
    };
    Ok(FptValue::new(value, p, Some(profile)))
}

/// c^m(x^b) for a monomial: 1 / max(b).
pub fn fpt_monomial(exponents: &[u64]) -> Result<Rational> {
    let max = exponents
        .iter()
        .copied()
        .max()
        .ok_or_else(|| Error::Domain("monomial needs at least one exponent".into()))?;
    if exponents.contains(&0) {
        return Err(Error::Domain(
            "monomial exponents must be at least 1".into(),
        ));
    }
    Ok(Rational::new(BigInt::one(), BigInt::from(max)))
}

/// Left fold of the sum formula over x1^d1 + x2^d2 + … .
pub fn fpt_diagonal_fold(degrees: &[u64], p: Prime) -> Result<Outcome<FptValue>> {
    let (&first, rest) = degrees
        .split_first()
        .ok_or_else(|| Error::Domain("diagonal needs at least one degree".into()))?;
    if degrees.contains(&0) {
        return Err(Error::Domain("diagonal degrees must be at least 1".into()));
    }
    let mut acc = FptValue::new(Rational::new(BigInt::one(), BigInt::from(first)), p, None);
    for (k, &d) in rest.iter().enumerate() {
        let a2 = Rational::new(BigInt::one(), BigInt::from(d));
        if &acc.value + &a2 > Rational::one() {
            return Ok(Outcome::Inapplicable(format!(
                "fold {}: {} + 1/{} > 1",
                k + 1,
                rational_to_string(&acc.value),
                d
            )));
        }
        acc = ts_fthreshold(&acc.value, &a2, p)?;
    }
    Ok(Outcome::Value(acc))
}

/// c(g^n) = c(g) / n.
pub fn fpt_power(c: &Rational, n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Domain("power exponent must be at least 1".into()));
    }
    Ok(c / Rational::from_integer(BigInt::from(n)))
}

/// c(g1·g2) = min(c(g1), c(g2)) for disjoint variables.
pub fn fpt_disjoint_product(c1: &Rational, c2: &Rational) -> Rational {
    c1.min(c2).clone()
}

/// F-jumping number candidates of g1 + g2 from pairs (λ, a) where a is the
/// F-threshold of g_i with respect to τ(g_i^λ). The list is sorted and
/// deduplicated; it need not contain every jumping number.
pub fn jumping_candidates(
    a1_list: &[(Rational, Rational)],
    a2_list: &[(Rational, Rational)],
    p: Prime,
) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for (_, a1) in a1_list {
        for (_, a2) in a2_list {
            if a1 + a2 <= Rational::one() {
                out.push(ts_fthreshold(a1, a2, p)?.value);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Sum of the first e digit-truncations, for callers comparing with ν.
pub fn truncation_times_q(value: &Rational, p: Prime, e: u32) -> Result<BigInt> {
    if value.is_zero() {
        return Ok(BigInt::zero());
    }
    Ok(crate::basep::expand(value, p)?.truncation_numerator(e as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basep::ratio;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn sum_formula_examples() {
        let v = ts_fthreshold(&ratio(3, 16), &ratio(1, 8), p(97)).unwrap();
        assert_eq!(v.value, ratio(5, 16));
        assert_eq!(v.classification, Classification::Generic);
        for q in [3, 5, 7, 11, 97] {
            let v = ts_fthreshold(&ratio(1, 2), &ratio(1, 2), p(q)).unwrap();
            assert_eq!(v.value, ratio(1, 1));
            assert_eq!(v.classification, Classification::EqualsOne);
        }
        // 1/2 = 0.222…, 1/3 = 0.1313… in base 5: carry at e = 2, so L = 1
        let v = ts_fthreshold(&ratio(1, 2), &ratio(1, 3), p(5)).unwrap();
        assert_eq!(v.value, ratio(4, 5));
        assert_eq!(v.profile.unwrap().l, ExtNat::Finite(1));
        let v = ts_fthreshold(&ratio(1, 4), &ratio(1, 12), p(3)).unwrap();
        assert_eq!(v.value, ratio(1, 3));
        assert_eq!(v.classification, Classification::PPowerDenominator);
    }

    #[test]
    fn sum_formula_rejects_large_sums() {
        let err = ts_fthreshold(&ratio(2, 3), &ratio(2, 3), p(5)).unwrap_err();
        assert!(matches!(err, Error::Inapplicable(_)));
        assert_eq!(err.to_string(), "theorem inapplicable: a1+a2 > 1");
        assert!(matches!(
            ts_fthreshold(&ratio(0, 1), &ratio(1, 2), p(5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn monomial_examples() {
        assert_eq!(fpt_monomial(&[2, 3, 8]).unwrap(), ratio(1, 8));
        assert_eq!(fpt_monomial(&[3, 7]).unwrap(), ratio(1, 7));
        assert_eq!(fpt_monomial(&[1]).unwrap(), ratio(1, 1));
        assert!(fpt_monomial(&[]).is_err());
        assert!(fpt_monomial(&[0, 2]).is_err());
    }

    #[test]
    fn diagonal_examples() {
        let v = fpt_diagonal_fold(&[4, 4], p(97)).unwrap();
        assert_eq!(v.value().unwrap().value, ratio(1, 2));
        let v = fpt_diagonal_fold(&[2, 3], p(7)).unwrap();
        assert_eq!(v.value().unwrap().value, ratio(5, 6));
        // at p = 2 the first fold already carries and gives 1/2
        let v = fpt_diagonal_fold(&[2, 2, 2], p(2)).unwrap();
        assert_eq!(v.value().unwrap().value, ratio(1, 2));
        // at odd p the first fold gives 1 and the second cannot apply
        let v = fpt_diagonal_fold(&[2, 2, 2], p(3)).unwrap();
        assert!(!v.is_applicable());
        let v = fpt_diagonal_fold(&[2, 2], p(2)).unwrap();
        assert_eq!(v.value().unwrap().value, ratio(1, 2));
    }

    #[test]
    fn power_and_product() {
        let c = ratio(1, 7) + ratio(1, 11);
        assert_eq!(fpt_power(&c, 4).unwrap(), ratio(9, 154));
        assert_eq!(fpt_power(&ratio(2, 3), 1).unwrap(), ratio(2, 3));
        assert_eq!(fpt_power(&ratio(5, 6), 2).unwrap(), ratio(5, 12));
        assert!(fpt_power(&c, 0).is_err());
        assert_eq!(
            fpt_disjoint_product(&ratio(2, 3), &ratio(5, 6)),
            ratio(2, 3)
        );
        assert_eq!(
            fpt_disjoint_product(&(ratio(1, 6) + ratio(1, 2)), &ratio(5, 6)),
            ratio(2, 3)
        );
    }

    #[test]
    fn jumping_candidates_examples() {
        let one = ratio(1, 1);
        let c = jumping_candidates(
            &[(one.clone(), ratio(3, 16))],
            &[(one.clone(), ratio(1, 8))],
            p(97),
        )
        .unwrap();
        assert_eq!(c, vec![ratio(5, 16)]);
        let quarters: Vec<(Rational, Rational)> =
            (1..=4).map(|k| (ratio(k, 4), ratio(k, 4))).collect();
        let c = jumping_candidates(&quarters, &quarters, p(5)).unwrap();
        assert_eq!(c, vec![ratio(1, 2), ratio(3, 4), ratio(1, 1)]);
    }

    #[test]
    fn json_shape() {
        let v = ts_fthreshold(&ratio(3, 16), &ratio(1, 8), p(97)).unwrap();
        let j = v.to_json();
        assert_eq!(j["value"], "5/16");
        assert_eq!(j["classification"], "GENERIC");
        assert_eq!(j["L"], "infinity");
    }
}
