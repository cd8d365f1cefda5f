//! Test ideals τ(f^c): the stabilizing union of Frobenius roots, the p-power
//! exponent identity, and the three-case formula for Thom-Sebastiani sums.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::basep::{
    ceil_int, expand, is_p_adic, rational_to_string, CarryProfile, ExtNat, Prime, Rational,
};
use crate::error::{Error, Result};
use crate::ideals::{root_of_power, root_of_power_times, Ideal};
use crate::polyfp::{Polynomial, PolynomialJson, VarContext};
use crate::thresholds::{ts_fthreshold, FptValue};

pub const DEFAULT_E_MAX: u32 = 6;

/// Which branch of the sum formula produced a test ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    Unit,
    NotPAdic,
    PAdic,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Unit => "UNIT",
            CaseTag::NotPAdic => "NOT_P_ADIC",
            CaseTag::PAdic => "P_ADIC",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TestIdealResult {
    pub ideal: Ideal,
    pub exponent: Rational,
    pub stabilized_at_e: u32,
    pub case: Option<CaseTag>,
    pub profile: Option<CarryProfile>,
}

#[derive(Serialize)]
struct TestIdealJson {
    generators: Vec<PolynomialJson>,
    display: Vec<String>,
    vars: Vec<String>,
    case: Option<CaseTag>,
    fpt: String,
    #[serde(rename = "L")]
    l: Option<ExtNat>,
    d: Option<ExtNat>,
    stabilized_at_e: u32,
}

impl TestIdealResult {
    /// `{generators, display, vars, case, fpt, L, d, stabilized_at_e}` with
    /// generators as index-based polynomial JSON.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TestIdealJson {
            generators: self
                .ideal
                .generators()
                .iter()
                .map(Polynomial::to_json)
                .collect(),
            display: self
                .ideal
                .generators()
                .iter()
                .map(|g| g.to_string())
                .collect(),
            vars: self.ideal.ctx().names().to_vec(),
            case: self.case,
            fpt: rational_to_string(&self.exponent),
            l: self.profile.map(|p| p.l),
            d: self.profile.map(|p| p.d),
            stabilized_at_e: self.stabilized_at_e,
        })
        .expect("plain data serializes")
    }
}

fn exponent_u64(n: &BigInt) -> Result<u64> {
    u64::try_from(n).map_err(|_| Error::Domain(format!("exponent {n} does not fit in 64 bits")))
}

/// τ(f^{r/p^e}) = (f^r)^[1/p^e].
pub fn test_ideal_p_power(f: &Polynomial, r: u64, e: u32) -> Result<Ideal> {
    if f.prime().pow_u64(e).is_none() {
        return Err(Error::Domain(format!(
            "{}^{e} does not fit in 64 bits",
            f.prime()
        )));
    }
    Ok(Ideal::new(f.prime(), f.ctx().clone(), root_of_power(f, r, e))?.minimalized())
}

/// J_e = (f^⌈c p^e⌉)^[1/p^e].
fn chain_step(f: &Polynomial, c: &Rational, e: u32) -> Result<Ideal> {
    let q = f.prime().pow_big(e as u64);
    let n = exponent_u64(&ceil_int(&(c * Rational::from_integer(q))))?;
    test_ideal_p_power(f, n, e)
}

/// Order of p in (Z/nZ)^×, for n coprime to p.
fn multiplicative_order(p: u64, n: u64) -> u32 {
    let mut k = 1;
    let mut x = p % n;
    while x != 1 % n {
        x = (x as u128 * p as u128 % n as u128) as u64;
        k += 1;
    }
    k
}

/// τ(f^c) without a window.
///
/// Write p^s·c = m + a/(p^k − 1) with m an integer and 0 ≤ a < p^k − 1.
/// τ(f^{a/(p^k−1)}) is the smallest ideal containing f that is stable under
/// J ↦ (f^a·J)^[1/p^k], reached by ascending from (f); then
/// τ(f^c) = (f^m · τ(f^{a/(p^k−1)}))^[1/p^s].
pub fn test_ideal_fixed_point(f: &Polynomial, c: &Rational) -> Result<Ideal> {
    if !c.is_positive() {
        return Err(Error::Domain("the exponent c must be positive".into()));
    }
    if f.is_zero() {
        return Err(Error::Precondition("test ideal of f = 0".into()));
    }
    let p = f.prime();
    let pb = BigInt::from(p.as_u64());
    let mut den = c.denom().clone();
    let mut s = 0u32;
    while (&den % &pb).is_zero() {
        den /= &pb;
        s += 1;
    }
    let shifted = c * Rational::from_integer(p.pow_big(s as u64));
    let m = exponent_u64(&shifted.floor().to_integer())?;
    let frac = shifted.fract();
    let one = Polynomial::one(p, f.ctx().clone());
    let stable = if frac.is_zero() {
        vec![one]
    } else {
        let n = u64::try_from(&den)
            .map_err(|_| Error::Domain(format!("denominator {den} is too large")))?;
        let k = multiplicative_order(p.as_u64(), n);
        let qk = p
            .pow_u64(k)
            .ok_or_else(|| Error::Domain(format!("{p}^{k} does not fit in 64 bits")))?;
        let a = exponent_u64(&(frac * Rational::from_integer(BigInt::from(qk - 1))).to_integer())?;
        let mut current = Ideal::principal(f).minimalized();
        loop {
            let image = root_of_power_times(f, a, k, current.generators());
            let next = current.sum(&current.with_generators(image))?.minimalized();
            if current.contains_ideal(&next)? {
                break current.generators().to_vec();
            }
            current = next;
        }
    };
    let gens = root_of_power_times(f, m, s, &stable);
    Ok(Ideal::new(p, f.ctx().clone(), gens)?.minimalized())
}

/// τ(f^c) as the first J_e = (f^⌈c p^e⌉)^[1/p^e] with e ≤ e_max that
/// reaches [`test_ideal_fixed_point`].
///
/// Equal consecutive steps do not mean the chain has stopped growing
/// (x^2 + z^8 at p = 3, c = 5/8 has J_1 = J_2 ≠ J_3), so the fixed point
/// decides when to stop. Every step is checked to sit between its
/// predecessor and the fixed point.
pub fn test_ideal(f: &Polynomial, c: &Rational, e_max: u32) -> Result<TestIdealResult> {
    if !c.is_positive() {
        return Err(Error::Domain("the exponent c must be positive".into()));
    }
    if e_max < 1 {
        return Err(Error::Precondition("e_max must be at least 1".into()));
    }
    if f.is_zero() {
        return Err(Error::Precondition("test ideal of f = 0".into()));
    }
    let target = test_ideal_fixed_point(f, c)?;
    let mut prev: Option<Ideal> = None;
    for e in 1..=e_max {
        let step = chain_step(f, c, e)?;
        let ascends = match &prev {
            Some(j) => step.contains_ideal(j)?,
            None => true,
        };
        if !ascends {
            return Err(Error::Internal(format!(
                "ascending chain violated between e = {} and e = {e}",
                e - 1
            )));
        }
        if !target.contains_ideal(&step)? {
            return Err(Error::Internal(format!(
                "J_{e} is not inside the fixed point"
            )));
        }
        if step.contains_ideal(&target)? {
            return Ok(TestIdealResult {
                ideal: step,
                exponent: c.clone(),
                stabilized_at_e: e,
                case: None,
                profile: None,
            });
        }
        prev = Some(step);
    }
    Err(Error::NoStabilization { e_max })
}

/// Places g1 and g2 in one ring and checks their supports are disjoint.
fn joint_ring(g1: &Polynomial, g2: &Polynomial) -> Result<(Polynomial, Polynomial)> {
    if g1.prime() != g2.prime() {
        return Err(Error::Mismatch("components over different primes".into()));
    }
    let s1 = g1.support_names();
    if let Some(v) = g2.support_names().intersection(&s1).next() {
        return Err(Error::Precondition(format!(
            "g1 and g2 share the variable `{v}`"
        )));
    }
    let ctx = VarContext::union(g1.ctx(), g2.ctx());
    Ok((g1.embed(&ctx)?, g2.embed(&ctx)?))
}

/// ⌈p^d a⌉, cross-checked against p^d⟨a⟩_d + 1.
fn ceil_scaled(a: &Rational, p: Prime, d: u64) -> Result<u64> {
    let exact = ceil_int(&(a * Rational::from_integer(p.pow_big(d))));
    let via_digits = expand(a, p)?.truncation_numerator(d) + BigInt::one();
    if exact != via_digits {
        return Err(Error::Internal(format!(
            "⌈p^d a⌉ = {exact} disagrees with p^d⟨a⟩_d + 1 = {via_digits}"
        )));
    }
    exponent_u64(&exact)
}

/// τ(f^c) for f = g1 + g2 at c = c^m(f), from a1 = c^m1(g1) and
/// a2 = c^m2(g2).
pub fn ts_test_ideal(
    g1: &Polynomial,
    g2: &Polynomial,
    a1: &Rational,
    a2: &Rational,
    p: Prime,
) -> Result<TestIdealResult> {
    ts_test_ideal_with_window(g1, g2, a1, a2, p, DEFAULT_E_MAX)
}

/// As [`ts_test_ideal`], with `e_max` bounding the definitional stabilization
/// used for component test ideals.
pub fn ts_test_ideal_with_window(
    g1: &Polynomial,
    g2: &Polynomial,
    a1: &Rational,
    a2: &Rational,
    p: Prime,
    e_max: u32,
) -> Result<TestIdealResult> {
    if g1.prime() != p {
        return Err(Error::Mismatch(format!(
            "polynomials are over F_{} but p = {p}",
            g1.prime()
        )));
    }
    let (g1, g2) = joint_ring(g1, g2)?;
    let FptValue {
        value: c, profile, ..
    } = ts_fthreshold(a1, a2, p)?;
    let profile = profile.expect("the sum formula records its profile");
    let f = g1.add(&g2)?;

    if c.is_one() {
        return Ok(TestIdealResult {
            ideal: Ideal::principal(&f).minimalized(),
            exponent: c,
            stabilized_at_e: 0,
            case: Some(CaseTag::Unit),
            profile: Some(profile),
        });
    }
    if a1 + a2 == Rational::one() {
        return Err(Error::Inapplicable(
            "a1+a2 = 1 while c != 1; the Frobenius-root splitting needs a1+a2 < 1".into(),
        ));
    }

    if !is_p_adic(&c, p) {
        let t1 = test_ideal(&g1, a1, e_max)?;
        let t2 = test_ideal(&g2, a2, e_max)?;
        let ideal = t1.ideal.sum(&t2.ideal)?.minimalized();
        let settled = t1.stabilized_at_e.max(t2.stabilized_at_e);
        check_single_index(&g1, &g2, a1, a2, p, &ideal, settled, e_max)?;
        return Ok(TestIdealResult {
            ideal,
            exponent: c,
            stabilized_at_e: settled,
            case: Some(CaseTag::NotPAdic),
            profile: Some(profile),
        });
    }

    let d = profile.d.finite().ok_or_else(|| {
        Error::Internal("d = infinity for a threshold with p-power denominator".into())
    })?;
    let d32 = u32::try_from(d).map_err(|_| Error::Domain(format!("d = {d} is too large")))?;
    let r1 = ceil_scaled(a1, p, d)?;
    let r2 = ceil_scaled(a2, p, d)?;
    let ideal = test_ideal_p_power(&g1, r1, d32)?
        .sum(&test_ideal_p_power(&g2, r2, d32)?)?
        .minimalized();
    Ok(TestIdealResult {
        ideal,
        exponent: c,
        stabilized_at_e: d32,
        case: Some(CaseTag::PAdic),
        profile: Some(profile),
    })
}

/// For indices e past stabilization with digit sum ≤ p − 2, the component
/// roots at that single index must reproduce the stabilized sum.
#[allow(clippy::too_many_arguments)]
fn check_single_index(
    g1: &Polynomial,
    g2: &Polynomial,
    a1: &Rational,
    a2: &Rational,
    p: Prime,
    expected: &Ideal,
    from: u32,
    to: u32,
) -> Result<()> {
    let s1 = expand(a1, p)?;
    let s2 = expand(a2, p)?;
    for e in from.max(1)..=to {
        if s1.digit(e as u64) + s2.digit(e as u64) + 2 > p.get() {
            continue;
        }
        let split = test_ideal_p_power(g1, ceil_scaled(a1, p, e as u64)?, e)?
            .sum(&test_ideal_p_power(g2, ceil_scaled(a2, p, e as u64)?, e)?)?;
        if !split.equals(expected)? {
            return Err(Error::Internal(format!(
                "single-index roots at e = {e} disagree with the stabilized test ideals"
            )));
        }
        return Ok(());
    }
    Ok(())
}

/// Compares (f^{p^e(⟨a1⟩_e+⟨a2⟩_e)+1})^[1/p^e] with
/// (g1^⌈p^e a1⌉)^[1/p^e] + (g2^⌈p^e a2⌉)^[1/p^e], each side computed
/// independently. Requires a1 + a2 < 1, e ≤ L and digit sum ≤ p − 2 at e.
pub fn lemma53_split_check(
    g1: &Polynomial,
    g2: &Polynomial,
    a1: &Rational,
    a2: &Rational,
    e: u32,
) -> Result<bool> {
    let p = g1.prime();
    let (g1, g2) = joint_ring(g1, g2)?;
    if a1 + a2 >= Rational::one() {
        return Err(Error::Precondition("a1+a2 must be below 1".into()));
    }
    let s1 = expand(a1, p)?;
    let s2 = expand(a2, p)?;
    if e == 0 {
        return Err(Error::Precondition("e must be at least 1".into()));
    }
    for k in 1..=e as u64 {
        if s1.digit(k) + s2.digit(k) > p.get() - 1 {
            return Err(Error::Precondition(format!(
                "e = {e} exceeds L = {}",
                k - 1
            )));
        }
    }
    if s1.digit(e as u64) + s2.digit(e as u64) + 2 > p.get() {
        return Err(Error::Precondition(format!(
            "digit sum at e = {e} exceeds p - 2"
        )));
    }
    let theta = s1.truncation_numerator(e as u64) + s2.truncation_numerator(e as u64);
    let f = g1.add(&g2)?;
    let left = test_ideal_p_power(&f, exponent_u64(&(theta + BigInt::one()))?, e)?;
    let right = test_ideal_p_power(&g1, ceil_scaled(a1, p, e as u64)?, e)?
        .sum(&test_ideal_p_power(&g2, ceil_scaled(a2, p, e as u64)?, e)?)?;
    left.equals(&right)
}
