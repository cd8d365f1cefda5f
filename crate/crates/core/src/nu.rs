//! ν-invariants ν_f^J(p^e), F-threshold brackets, and the Thom-Sebastiani
//! membership test for f = g1 + g2 in disjoint variables.

use num_bigint::BigInt;
use serde::Serialize;

use crate::basep::{lucas_binomial_mod_p, rational_to_string, Prime, Rational};
use crate::error::{Error, Result};
use crate::ideals::{power_in_bracket, Ideal, IdealJson};
use crate::polyfp::{Polynomial, PolynomialJson};

pub const DEFAULT_RADICAL_CAP: u32 = 64;

/// Least M ≤ cap with f^M ∈ J.
pub fn radical_exponent(f: &Polynomial, j: &Ideal, cap: u32) -> Result<u32> {
    if cap == 0 {
        return Err(Error::Precondition("radical cap must be at least 1".into()));
    }
    let mut power = f.clone();
    for m in 1..=cap {
        if j.contains(&power)? {
            return Ok(m);
        }
        if m < cap {
            power = power.mul(f)?;
        }
    }
    Err(Error::RadicalCap { cap: cap as u64 })
}

/// ν_f^J(p^e) with the data it was computed from.
#[derive(Clone, Debug)]
pub struct NuRecord {
    pub f: Polynomial,
    pub j: Ideal,
    pub e: u32,
    pub nu: u64,
    pub truncation: Rational,
}

#[derive(Serialize)]
struct NuRecordJson {
    f: PolynomialJson,
    #[serde(rename = "J")]
    j: IdealJson,
    e: u32,
    nu: u64,
    truncation: String,
}

impl NuRecord {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(NuRecordJson {
            f: self.f.to_json(),
            j: self.j.to_json(),
            e: self.e,
            nu: self.nu,
            truncation: rational_to_string(&self.truncation),
        })
        .expect("plain data serializes")
    }
}

fn q_of(p: Prime, e: u32) -> Result<u64> {
    p.pow_u64(e)
        .ok_or_else(|| Error::Domain(format!("{p}^{e} does not fit in 64 bits")))
}

/// ν_f^J(p^e) = max{l | f^l ∉ J^[p^e]}, using the default radical cap.
pub fn nu(f: &Polynomial, j: &Ideal, e: u32) -> Result<NuRecord> {
    nu_with_cap(f, j, e, DEFAULT_RADICAL_CAP)
}

/// ν_f^J(p^e) by binary search over l ∈ [0, M·p^e], where f^M ∈ J.
pub fn nu_with_cap(f: &Polynomial, j: &Ideal, e: u32, cap: u32) -> Result<NuRecord> {
    if f.is_zero() {
        return Err(Error::Precondition("ν is undefined for f = 0".into()));
    }
    if !j.is_proper() {
        return Err(Error::Precondition("J must be a proper ideal".into()));
    }
    let m = radical_exponent(f, j, cap)?;
    let q = q_of(f.prime(), e)?;
    let (mut lo, mut hi) = (0u64, m as u64 * q);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if power_in_bracket(f, mid, j, e)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(NuRecord {
        f: f.clone(),
        j: j.clone(),
        e,
        nu: lo,
        truncation: Rational::new(BigInt::from(lo), BigInt::from(q)),
    })
}

/// (ν/p^e, (ν+1)/p^e]: the F-threshold c^J(f) lies in this interval.
pub fn fpt_bracket(f: &Polynomial, j: &Ideal, e: u32) -> Result<(Rational, Rational)> {
    let rec = nu(f, j, e)?;
    let q = BigInt::from(q_of(f.prime(), e)?);
    let upper = Rational::new(BigInt::from(rec.nu + 1), q);
    Ok((rec.truncation, upper))
}

/// Least j ≤ limit with g^j ∈ I^[p^e], or limit + 1 when there is none.
fn first_member(g: &Polynomial, i: &Ideal, e: u32, limit: u64) -> Result<u64> {
    if !power_in_bracket(g, limit, i, e)? {
        return Ok(limit + 1);
    }
    let (mut lo, mut hi) = (0u64, limit);
    if power_in_bracket(g, 0, i, e)? {
        return Ok(0);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if power_in_bracket(g, mid, i, e)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Decides (g1 + g2)^θ ∈ I1^[p^e] R + I2^[p^e] R for g1, I1 and g2, I2 in
/// disjoint sets of variables.
///
/// The power lies in the sum exactly when every term C(θ,j) g1^j g2^(θ−j)
/// with nonzero binomial has g1^j ∈ I1^[p^e] or g2^(θ−j) ∈ I2^[p^e]. Each
/// pair is examined in its own ring; membership is monotone in the exponent,
/// so each side reduces to a single threshold index.
pub fn ts_membership(
    g1: &Polynomial,
    g2: &Polynomial,
    i1: &Ideal,
    i2: &Ideal,
    theta: u64,
    e: u32,
) -> Result<bool> {
    if g1.prime() != g2.prime() {
        return Err(Error::Mismatch("components over different primes".into()));
    }
    let used1: std::collections::BTreeSet<String> = std::iter::once(g1)
        .chain(i1.generators())
        .flat_map(|g| g.support_names())
        .collect();
    let used2: std::collections::BTreeSet<String> = std::iter::once(g2)
        .chain(i2.generators())
        .flat_map(|g| g.support_names())
        .collect();
    if let Some(v) = used1.intersection(&used2).next() {
        return Err(Error::Precondition(format!(
            "variable supports overlap (both sides use `{v}`)"
        )));
    }
    let p = g1.prime();
    let t1 = first_member(g1, i1, e, theta)?;
    let t2 = first_member(g2, i2, e, theta)?;
    for j in 0..=theta {
        if lucas_binomial_mod_p(theta, j, p)? == 0 {
            continue;
        }
        if j < t1 && theta - j < t2 {
            return Ok(false);
        }
    }
    Ok(true)
}
