//! Base-p digit arithmetic for rationals in (0, 1].
//!
//! Every rational α in (0, 1] has a unique *non-terminating* expansion
//! α = Σ_{e≥1} α^(e) / p^e with infinitely many nonzero digits. For rational α
//! the expansion is eventually periodic, so a [`DigitStream`] stores it as a
//! preperiod followed by a repeating block. Everything here is exact.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision reduced fraction.
pub type Rational = BigRational;

/// Builds `num/den` as a reduced rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `num/den`, always with an explicit denominator.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("`{text}` is not a rational of the form num/den"),
    };
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse {
            pos: text.find('/').unwrap_or(0),
            msg: "zero denominator".into(),
        });
    }
    Ok(Rational::new(n, d))
}

/// Serde adapter that writes rationals as `"num/den"` strings.
pub mod ratio_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            r: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_str(&rational_to_string(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            let text: Option<String> = Option::deserialize(d)?;
            text.map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

/// Deterministic primality test by trial division (inputs are below 2^31).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime characteristic p < 2^31.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::Domain(format!("prime {p} exceeds 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_u64(self) -> u64 {
        self.0 as u64
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// p^e as a big integer.
    pub fn pow_big(self, e: u64) -> BigInt {
        num_traits::pow(self.big(), e as usize)
    }

    /// p^e, if it fits in a u64.
    pub fn pow_u64(self, e: u32) -> Option<u64> {
        (self.0 as u64).checked_pow(e)
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.as_u64()
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A natural number or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Finite(u64),
    Infinite,
}

impl ExtNat {
    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Finite(n) => Some(n),
            ExtNat::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ExtNat::Infinite
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            ExtNat::Infinite => f.write_str("infinity"),
        }
    }
}

impl Serialize for ExtNat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtNat::Finite(n) => s.serialize_u64(*n),
            ExtNat::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtNat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(u64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(n) => Ok(ExtNat::Finite(n)),
            Repr::S(s) if s == "infinity" || s == "inf" => Ok(ExtNat::Infinite),
            Repr::S(s) => Err(serde::de::Error::custom(format!(
                "bad extended natural `{s}`"
            ))),
        }
    }
}

/// The non-terminating base-p expansion of a rational in (0, 1].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DigitStreamRepr")]
pub struct DigitStream {
    prime: Prime,
    preperiod: Vec<u32>,
    period: Vec<u32>,
    #[serde(skip)]
    value: Rational,
}

#[derive(Deserialize)]
struct DigitStreamRepr {
    prime: u64,
    preperiod: Vec<u32>,
    period: Vec<u32>,
}

impl TryFrom<DigitStreamRepr> for DigitStream {
    type Error = Error;
    fn try_from(r: DigitStreamRepr) -> Result<Self> {
        DigitStream::from_digits(Prime::new(r.prime)?, r.preperiod, r.period)
    }
}

/// Computes the non-terminating expansion of `alpha` in base `p`.
///
/// The state iteration is s₀ = α, digit = ⌈p·s⌉ − 1, s' = p·s − digit, which
/// keeps every state in (0, 1] and therefore never produces a terminating tail.
pub fn expand(alpha: &Rational, p: Prime) -> Result<DigitStream> {
    if !alpha.is_positive() || alpha > &Rational::one() {
        return Err(Error::Domain(format!(
            "{} is not in (0, 1]",
            rational_to_string(alpha)
        )));
    }
    let den = alpha.denom().clone();
    let mut num = alpha.numer().clone();
    let pb = p.big();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    let mut digits: Vec<u32> = Vec::new();
    let start = loop {
        if let Some(&i) = seen.get(&num) {
            break i;
        }
        seen.insert(num.clone(), digits.len());
        let scaled = &num * &pb;
        let digit = (&scaled - 1u32).div_floor(&den);
        num = scaled - &digit * &den;
        digits.push(digit.to_u32().expect("digit below p"));
    };
    let period = digits.split_off(start);
    Ok(DigitStream {
        prime: p,
        preperiod: digits,
        period,
        value: alpha.clone(),
    })
}

impl DigitStream {
    /// Rebuilds a stream from explicit digits, validating them.
    pub fn from_digits(prime: Prime, preperiod: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        let p = prime.get();
        if period.is_empty() || period.iter().all(|&d| d == 0) {
            return Err(Error::Domain("period must contain a nonzero digit".into()));
        }
        if preperiod.iter().chain(&period).any(|&d| d >= p) {
            return Err(Error::Domain(format!("digit out of range for base {p}")));
        }
        let pb = prime.big();
        let fold = |ds: &[u32]| {
            ds.iter()
                .fold(BigInt::zero(), |acc, &d| acc * &pb + BigInt::from(d))
        };
        let k = preperiod.len() as u64;
        let m = period.len() as u64;
        let cycle = prime.pow_big(m) - 1u32;
        let num = fold(&preperiod) * &cycle + fold(&period);
        let den = prime.pow_big(k) * cycle;
        let value = Rational::new(num, den);
        // Rebuild through `expand` so the stored digits are the canonical
        // (shortest) preperiod/period split.
        expand(&value, prime)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn preperiod(&self) -> &[u32] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    /// The e-th digit α^(e), for e ≥ 1.
    pub fn digit(&self, e: u64) -> u32 {
        assert!(e >= 1, "digits are indexed from 1");
        let i = (e - 1) as usize;
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Iterator over α^(1), α^(2), … (infinite).
    pub fn digits(&self) -> impl Iterator<Item = u32> + '_ {
        self.preperiod
            .iter()
            .copied()
            .chain(self.period.iter().copied().cycle())
    }

    /// p^e · ⟨α⟩_e, an integer.
    pub fn truncation_numerator(&self, e: u64) -> BigInt {
        let pb = self.prime.big();
        self.digits()
            .take(e as usize)
            .fold(BigInt::zero(), |acc, d| acc * &pb + BigInt::from(d))
    }

    /// ⟨α⟩_e, with ⟨α⟩_0 = 0 and ⟨α⟩_∞ = α.
    pub fn truncate(&self, e: ExtNat) -> Rational {
        match e {
            ExtNat::Infinite => self.value.clone(),
            ExtNat::Finite(e) => Rational::new(self.truncation_numerator(e), self.prime.pow_big(e)),
        }
    }
}

/// Whether α₁^(e) + α₂^(e) ≤ p − 1 for every e ≥ 1.
pub fn adds_without_carrying(s1: &DigitStream, s2: &DigitStream) -> Result<bool> {
    Ok(profile_of_streams(s1, s2)?.l.is_infinite())
}

/// The carry profile (L, d) of a pair of rationals.
///
/// L is the largest N such that the digit sums at every 1 ≤ e ≤ N are at most
/// p − 1; d is the largest e ≤ L whose digit sum is at most p − 2 (0 if none).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarryProfile {
    #[serde(rename = "L")]
    pub l: ExtNat,
    pub d: ExtNat,
}

pub fn carry_profile(a1: &Rational, a2: &Rational, p: Prime) -> Result<CarryProfile> {
    let s1 = expand(a1, p)?;
    let s2 = expand(a2, p)?;
    profile_of_streams(&s1, &s2)
}

/// Carry profile from two expansions. Beyond max(preperiod lengths) the digit
/// pairs repeat with period lcm(period lengths), so scanning that far decides
/// both quantities exactly.
pub fn profile_of_streams(s1: &DigitStream, s2: &DigitStream) -> Result<CarryProfile> {
    if s1.prime != s2.prime {
        return Err(Error::Mismatch(format!(
            "expansions in bases {} and {}",
            s1.prime, s2.prime
        )));
    }
    let p = s1.prime.get();
    let offset = s1.preperiod.len().max(s2.preperiod.len()) as u64;
    let joint = (s1.period.len() as u64).lcm(&(s2.period.len() as u64));
    let horizon = offset + joint;

    let mut last_slack = 0u64;
    let mut slack_in_cycle = false;
    for e in 1..=horizon {
        let sum = s1.digit(e) + s2.digit(e);
        if sum > p - 1 {
            return Ok(CarryProfile {
                l: ExtNat::Finite(e - 1),
                d: ExtNat::Finite(last_slack),
            });
        }
        if sum + 2 <= p {
            last_slack = e;
            if e > offset {
                slack_in_cycle = true;
            }
        }
    }
    let d = if slack_in_cycle {
        ExtNat::Infinite
    } else {
        ExtNat::Finite(last_slack)
    };
    Ok(CarryProfile {
        l: ExtNat::Infinite,
        d,
    })
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// C(n, k) mod p for n, k < p.
fn small_binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    let k = k.min(n - k);
    let (mut num, mut den) = (1u64, 1u64);
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

/// C(n, k) mod p via Lucas' theorem: the product of digit-wise binomials.
/// The residue is 0 exactly when k and n − k carry when added in base p.
pub fn lucas_binomial_mod_p(n: u64, k: u64, p: Prime) -> Result<u32> {
    if k > n {
        return Err(Error::Domain(format!("binomial C({n}, {k}) with k > n")));
    }
    let p = p.as_u64();
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return Ok(0);
        }
        acc = acc * small_binomial_mod(nd, kd, p) % p;
        n /= p;
        k /= p;
    }
    Ok(acc as u32)
}

/// Big-integer variant of [`lucas_binomial_mod_p`].
pub fn lucas_binomial_mod_p_big(n: &BigUint, k: &BigUint, p: Prime) -> Result<u32> {
    if k > n {
        return Err(Error::Domain("binomial with k > n".into()));
    }
    let pb = BigUint::from(p.get());
    let (mut n, mut k) = (n.clone(), k.clone());
    let mut acc = 1u64;
    while !k.is_zero() {
        let (nq, nd) = n.div_rem(&pb);
        let (kq, kd) = k.div_rem(&pb);
        let (nd, kd) = (nd.to_u64().unwrap(), kd.to_u64().unwrap());
        if kd > nd {
            return Ok(0);
        }
        acc = acc * small_binomial_mod(nd, kd, p.as_u64()) % p.as_u64();
        n = nq;
        k = kq;
    }
    Ok(acc as u32)
}

/// ⌈r⌉ as a big integer.
pub fn ceil_int(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// ⌊r⌋ as a big integer.
pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Whether the reduced denominator of `r` is a power of `p` (including p⁰).
pub fn is_p_adic(r: &Rational, p: Prime) -> bool {
    let mut den = r.denom().clone();
    let pb = p.big();
    while den.is_multiple_of(&pb) {
        den /= &pb;
    }
    den.is_one()
}
