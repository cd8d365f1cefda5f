//! Sparse multivariate polynomials over F_p.
//!
//! Terms are kept sorted by descending grevlex order with coefficients stored
//! as least nonnegative residues, so structural equality is ring equality.

mod monomial;
mod parse;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basep::Prime;
use crate::error::{Error, Result};

pub use monomial::Monomial;
pub use parse::parse;

/// Ordered list of distinct variable names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarContext {
    names: Vec<String>,
}

pub type Ctx = Arc<VarContext>;

fn valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarContext {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Ctx> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !valid_ident(n) {
                return Err(Error::Format(format!("`{n}` is not a valid variable name")));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::Format(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Arc::new(VarContext { names }))
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Variables of `a` followed by those of `b` not already in `a`.
    pub fn union(a: &VarContext, b: &VarContext) -> Ctx {
        let mut names = a.names.clone();
        for n in &b.names {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        Arc::new(VarContext { names })
    }
}

#[inline]
pub(crate) fn fp_inv(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    let (mut b, mut e, m) = (a as u64, (p - 2) as u64, p as u64);
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u32
}

/// A polynomial in F_p[x_1, …, x_n].
#[derive(Clone, Debug)]
pub struct Polynomial {
    prime: Prime,
    ctx: Ctx,
    terms: Vec<(Monomial, u32)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && self.ctx == other.ctx && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(prime: Prime, ctx: Ctx) -> Self {
        Polynomial {
            prime,
            ctx,
            terms: Vec::new(),
        }
    }

    pub fn constant(prime: Prime, ctx: Ctx, c: u64) -> Self {
        let arity = ctx.arity();
        Self::monomial(prime, ctx, Monomial::one(arity), c)
    }

    pub fn one(prime: Prime, ctx: Ctx) -> Self {
        Self::constant(prime, ctx, 1)
    }

    pub fn var(prime: Prime, ctx: Ctx, i: usize) -> Self {
        let arity = ctx.arity();
        Self::monomial(prime, ctx, Monomial::var(arity, i), 1)
    }

    pub fn monomial(prime: Prime, ctx: Ctx, m: Monomial, c: u64) -> Self {
        assert_eq!(m.arity(), ctx.arity());
        let c = (c % prime.as_u64()) as u32;
        let terms = if c == 0 { Vec::new() } else { vec![(m, c)] };
        Polynomial { prime, ctx, terms }
    }

    /// Builds a polynomial from arbitrary (monomial, coefficient) pairs,
    /// combining duplicates and dropping zeros.
    pub fn from_terms(
        prime: Prime,
        ctx: Ctx,
        terms: impl IntoIterator<Item = (Monomial, u64)>,
    ) -> Self {
        let p = prime.as_u64();
        let mut acc: HashMap<Monomial, u64> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(
                m.arity(),
                ctx.arity(),
                "monomial arity does not match context"
            );
            let slot = acc.entry(m).or_insert(0);
            *slot = (*slot + c % p) % p;
        }
        Self::from_map(prime, ctx, acc)
    }

    fn from_map(prime: Prime, ctx: Ctx, acc: HashMap<Monomial, u64>) -> Self {
        let mut terms: Vec<(Monomial, u32)> = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(m, c)| (m, c as u32))
            .collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { prime, ctx, terms }
    }

    /// Terms already sorted descending, distinct, nonzero.
    pub(crate) fn from_sorted(prime: Prime, ctx: Ctx, terms: Vec<(Monomial, u32)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|t| t.1 != 0));
        Polynomial { prime, ctx, terms }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn arity(&self) -> usize {
        self.ctx.arity()
    }

    /// Terms in descending grevlex order.
    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    pub fn leading_term(&self) -> Option<&(Monomial, u32)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    /// Coefficient of the monomial with all exponents zero.
    pub fn constant_coeff(&self) -> u32 {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => *c,
            _ => 0,
        }
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    pub(crate) fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::Mismatch(format!(
                "polynomials over F_{} and F_{}",
                self.prime, other.prime
            )));
        }
        if self.ctx != other.ctx {
            return Err(Error::Mismatch(format!(
                "variable contexts {:?} and {:?}",
                self.ctx.names(),
                other.ctx.names()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        Ok(self.add_scaled(other, 1))
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let p = self.prime.get();
        Ok(self.add_scaled(other, p - 1))
    }

    /// self + c·other, merging the sorted term lists.
    pub(crate) fn add_scaled(&self, other: &Polynomial, c: u32) -> Polynomial {
        let p = self.prime.as_u64();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => std::cmp::Ordering::Greater,
                (None, _) => std::cmp::Ordering::Less,
            };
            match ord {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let v = (b[j].1 as u64 * c as u64 % p) as u32;
                    if v != 0 {
                        out.push((b[j].0.clone(), v));
                    }
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let v = ((a[i].1 as u64 + b[j].1 as u64 * c as u64) % p) as u32;
                    if v != 0 {
                        out.push((a[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Polynomial::from_sorted(self.prime, self.ctx.clone(), out)
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(self.prime.get() - 1)
    }

    /// c·self.
    pub fn scale(&self, c: u32) -> Polynomial {
        let p = self.prime.as_u64();
        let c = c as u64 % p;
        if c == 0 {
            return Polynomial::zero(self.prime, self.ctx.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (m.clone(), (*a as u64 * c % p) as u32))
            .collect();
        Polynomial::from_sorted(self.prime, self.ctx.clone(), terms)
    }

    /// c·m·self. Multiplying by a monomial preserves the term order.
    pub fn mul_term(&self, m: &Monomial, c: u32) -> Polynomial {
        let p = self.prime.as_u64();
        let c = c as u64 % p;
        if c == 0 {
            return Polynomial::zero(self.prime, self.ctx.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(n, a)| (n.mul(m), (*a as u64 * c % p) as u32))
            .collect();
        Polynomial::from_sorted(self.prime, self.ctx.clone(), terms)
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.prime, self.ctx.clone());
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, *c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, *c);
        }
        let p = self.prime.as_u64();
        let mut acc: HashMap<Monomial, u64> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let slot = acc.entry(ma.mul(mb)).or_insert(0);
                *slot = (*slot + *ca as u64 * *cb as u64) % p;
            }
        }
        Polynomial::from_map(self.prime, self.ctx.clone(), acc)
    }

    /// self^(q) for q a power of p: every exponent multiplied by q.
    ///
    /// Coefficients in F_p are fixed by Frobenius, so this is exactly the
    /// q-th power.
    pub fn frobenius(&self, q: u64) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.scale(q), *c)).collect();
        Polynomial::from_sorted(self.prime, self.ctx.clone(), terms)
    }

    fn pow_binary(&self, mut n: u64) -> Polynomial {
        let mut result = Polynomial::one(self.prime, self.ctx.clone());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// self^n.
    ///
    /// Writes n = p^e·k with p ∤ k, computes self^k and scales exponents by
    /// p^e. The power self^k is itself assembled from its base-p digits
    /// k = Σ k_i p^i as Π (self^(k_i))^(p^i).
    pub fn pow(&self, n: u64) -> Polynomial {
        if n == 0 {
            return Polynomial::one(self.prime, self.ctx.clone());
        }
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prime.as_u64();
        let (mut k, mut q) = (n, 1u64);
        while k % p == 0 {
            k /= p;
            q *= p;
        }
        let mut result = Polynomial::one(self.prime, self.ctx.clone());
        let mut place = 1u64;
        while k > 0 {
            let digit = k % p;
            if digit > 0 {
                let part = self.pow_binary(digit).frobenius(place);
                result = result.mul_unchecked(&part);
            }
            k /= p;
            if k > 0 {
                place *= p;
            }
        }
        result.frobenius(q)
    }

    /// Indices of variables occurring with positive exponent.
    pub fn variable_support(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (m, _) in &self.terms {
            for (i, &a) in m.exps().iter().enumerate() {
                if a > 0 {
                    out.insert(i);
                }
            }
        }
        out
    }

    /// Names of variables occurring in the polynomial.
    pub fn support_names(&self) -> BTreeSet<String> {
        self.variable_support()
            .into_iter()
            .map(|i| self.ctx.name(i).to_string())
            .collect()
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.terms.first() {
            None => self.clone(),
            Some((_, 1)) => self.clone(),
            Some((_, c)) => self.scale(fp_inv(*c, self.prime.get())),
        }
    }

    /// Re-expresses the polynomial in a context containing all of its variables.
    pub fn embed(&self, ctx: &Ctx) -> Result<Polynomial> {
        if &self.ctx == ctx {
            return Ok(self.clone());
        }
        let map: Vec<usize> = self
            .ctx
            .names()
            .iter()
            .enumerate()
            .map(|(i, name)| match ctx.index_of(name) {
                Some(j) => Ok(j),
                None if !self.variable_support().contains(&i) => Ok(usize::MAX),
                None => Err(Error::Mismatch(format!(
                    "variable `{name}` missing from target context"
                ))),
            })
            .collect::<Result<_>>()?;
        let arity = ctx.arity();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = vec![0u32; arity];
            for (i, &a) in m.exps().iter().enumerate() {
                if a > 0 {
                    exps[map[i]] = a;
                }
            }
            (Monomial::new(exps), *c as u64)
        });
        Ok(Polynomial::from_terms(self.prime, ctx.clone(), terms))
    }

    /// Splits the terms into two groups with disjoint variable supports.
    ///
    /// Terms are grouped by connected components of the graph joining terms
    /// that share a variable. The first group is the component containing the
    /// lowest-index variable (constants join it); the second is the rest.
    /// Returns `None` when the terms form a single component.
    pub fn ts_split(&self) -> Option<(Polynomial, Polynomial)> {
        let n = self.arity();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for (m, _) in &self.terms {
            let vars: Vec<usize> = (0..n).filter(|&i| m.exps()[i] > 0).collect();
            for w in vars.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let support = self.variable_support();
        let first_var = *support.iter().next()?;
        let anchor = find(&mut parent, first_var);
        let mut first = Vec::new();
        let mut rest = Vec::new();
        for t in &self.terms {
            let lead_var = (0..n).find(|&i| t.0.exps()[i] > 0);
            match lead_var {
                Some(i) if find(&mut parent, i) != anchor => rest.push(t.clone()),
                _ => first.push(t.clone()),
            }
        }
        if rest.is_empty() {
            return None;
        }
        Some((
            Polynomial::from_sorted(self.prime, self.ctx.clone(), first),
            Polynomial::from_sorted(self.prime, self.ctx.clone(), rest),
        ))
    }

    /// Restricts the context to the variables that occur (in context order).
    pub fn shrink_context(&self) -> Polynomial {
        let names: Vec<String> = self
            .variable_support()
            .into_iter()
            .map(|i| self.ctx.name(i).to_string())
            .collect();
        let ctx = VarContext::new(names).expect("subset of a valid context");
        let map: Vec<usize> = (0..self.arity())
            .map(|i| ctx.index_of(self.ctx.name(i)).unwrap_or(usize::MAX))
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![0u32; ctx.arity()];
                for (i, &a) in m.exps().iter().enumerate() {
                    if a > 0 {
                        exps[map[i]] = a;
                    }
                }
                (Monomial::new(exps), *c as u64)
            })
            .collect::<Vec<_>>();
        Polynomial::from_terms(self.prime, ctx, terms)
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            prime: self.prime.as_u64(),
            vars: self.ctx.names().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    exps: m.exps().to_vec(),
                    coeff: *c as u64,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolynomialJson) -> Result<Polynomial> {
        let prime = Prime::new(json.prime)?;
        let ctx = VarContext::new(json.vars.iter().cloned())?;
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            if t.exps.len() != ctx.arity() {
                return Err(Error::Format(format!(
                    "term has {} exponents but context has {} variables",
                    t.exps.len(),
                    ctx.arity()
                )));
            }
            terms.push((Monomial::new(t.exps.iter().copied()), t.coeff));
        }
        Ok(Polynomial::from_terms(prime, ctx, terms))
    }
}

/// JSON form: `{prime, vars:[…], terms:[{exps:[…], coeff}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub prime: u64,
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coeff: u64,
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if *c != 1 || m.is_one() {
                factors.push(c.to_string());
            }
            for (i, &a) in m.exps().iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(self.ctx.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.ctx.name(i), a)),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn freshman_dream() {
        let f = parse("x + y", p(2), None).unwrap();
        let sq = f.mul(&f).unwrap();
        assert_eq!(sq.to_string(), "x^2 + y^2");
        let f = parse("x + y", p(7), None).unwrap();
        assert_eq!(f.pow(7).to_string(), "x^7 + y^7");
    }

    #[test]
    fn pow_examples() {
        let f = parse("x^2 + y^3", p(5), None).unwrap();
        assert_eq!(f.pow(0), Polynomial::one(p(5), f.ctx().clone()));
        let direct = (0..5).fold(Polynomial::one(p(5), f.ctx().clone()), |acc, _| {
            acc.mul(&f).unwrap()
        });
        assert_eq!(f.pow(5), direct);
        assert_eq!(f.pow(5).to_string(), "y^15 + x^10");
    }

    #[test]
    fn multiply_by_zero() {
        let f = parse("3*x*y + 1", p(5), None).unwrap();
        let z = Polynomial::zero(p(5), f.ctx().clone());
        assert!(f.mul(&z).unwrap().is_zero());
    }

    #[test]
    fn support_and_split() {
        let f = parse("z^7*w^2 + z^5*w^6 + v^2*u^3*t^8", p(97), None).unwrap();
        assert_eq!(f.support_names().len(), 5);
        let (g1, g2) = f.ts_split().unwrap();
        assert_eq!(g1.to_string(), "z^5*w^6 + z^7*w^2");
        assert_eq!(g2.to_string(), "v^2*u^3*t^8");
        assert_eq!(
            parse("z^7*w^2 + z^5*w^6", p(97), None)
                .unwrap()
                .support_names(),
            ["w", "z"].iter().map(|s| s.to_string()).collect()
        );
        let xy = parse("x + y", p(3), None).unwrap();
        let (a, b) = xy.ts_split().unwrap();
        assert_eq!((a.to_string(), b.to_string()), ("x".into(), "y".into()));
        assert!(parse("x*y + y*z", p(3), None).unwrap().ts_split().is_none());
        assert!(parse("0", p(3), None)
            .unwrap()
            .variable_support()
            .is_empty());
    }

    #[test]
    fn merged_contexts_add() {
        let g1 = parse("z^7*w^2 + z^5*w^6", p(97), None).unwrap();
        let g2 = parse("v^2*u^3*t^8", p(97), None).unwrap();
        let ctx = VarContext::union(g1.ctx(), g2.ctx());
        let f = g1
            .embed(&ctx)
            .unwrap()
            .add(&g2.embed(&ctx).unwrap())
            .unwrap();
        let direct = parse("z^7*w^2 + z^5*w^6 + v^2*u^3*t^8", p(97), Some(&ctx)).unwrap();
        assert_eq!(f, direct);
        assert!(g1.add(&g2).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let f = parse("3*x^2*y + y + 2", p(5), None).unwrap();
        let back = Polynomial::from_json(&f.to_json()).unwrap();
        assert_eq!(f, back);
        let text = serde_json::to_string(&f.to_json()).unwrap();
        assert!(text.starts_with(r#"{"prime":5,"vars":["x","y"],"terms":["#));
    }

    #[test]
    fn monic_and_constant() {
        let f = parse("3*x + 2", p(5), None).unwrap();
        assert_eq!(f.monic().to_string(), "x + 4");
        assert_eq!(f.constant_coeff(), 2);
    }
}
