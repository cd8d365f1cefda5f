//! Frobenius roots of generator lists and bracket-power membership.

use std::collections::BTreeMap;

use super::Ideal;
use crate::error::{Error, Result};
use crate::polyfp::{Monomial, Polynomial};

/// Generators of (gens)^[1/q] for q = p^e: each term c·x^a with
/// a = q·b + r contributes c·x^b to the coefficient polynomial of x^r.
pub(crate) fn root_generators(gens: &[Polynomial], q: u64) -> Vec<Polynomial> {
    let mut out = Vec::new();
    for g in gens {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, u64)>> = BTreeMap::new();
        for (m, c) in g.terms() {
            let (quot, rem) = m.div_rem(q);
            groups.entry(rem).or_default().push((quot, *c as u64));
        }
        for (_, terms) in groups.into_iter().rev() {
            out.push(Polynomial::from_terms(g.prime(), g.ctx().clone(), terms));
        }
    }
    out
}

/// A basis of the F_p-span of `polys` in echelon form by leading monomial.
pub(crate) fn linear_basis(polys: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut pivots: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
    for mut f in polys {
        loop {
            let Some((lm, lc)) = f.leading_term().cloned() else {
                break;
            };
            match pivots.get(&lm) {
                Some(piv) => {
                    let p = f.prime().get();
                    f = f.add_scaled(piv, p - lc);
                }
                None => {
                    pivots.insert(lm, f.monic());
                    break;
                }
            }
        }
    }
    pivots.into_values().rev().collect()
}

/// Drops generators whose every term is divisible by a monomial generator.
fn prune(gens: Vec<Polynomial>) -> Vec<Polynomial> {
    let monos: Vec<Monomial> = gens
        .iter()
        .filter(|g| g.is_monomial())
        .map(|g| g.leading_monomial().unwrap().clone())
        .collect();
    gens.into_iter()
        .filter(|g| {
            if g.is_monomial() {
                let lm = g.leading_monomial().unwrap();
                !monos.iter().any(|m| m != lm && m.divides(lm))
            } else {
                !g.terms()
                    .iter()
                    .all(|(t, _)| monos.iter().any(|m| m.divides(t)))
            }
        })
        .collect()
}

/// Generators of (f^n)^[1/p^e], computed one base-p digit at a time
/// without expanding f^n.
///
/// With n = Σ_{i<e} n_i p^i + p^e·t, the ideal is f^t · I_{e−1} where
/// I_{−1} = (1) and I_i = (f^{n_i} · I_{i−1})^[1/p]. The generators are not
/// minimalized.
pub fn root_of_power(f: &Polynomial, n: u64, e: u32) -> Vec<Polynomial> {
    let one = Polynomial::one(f.prime(), f.ctx().clone());
    if f.is_zero() {
        return if n == 0 { vec![one] } else { vec![] };
    }
    root_of_power_times(f, n, e, &[one])
}

/// Generators of (f^n · J)^[1/p^e] for J generated by `start`, by the same
/// digit recursion as [`root_of_power`] with I_{−1} = J.
pub fn root_of_power_times(
    f: &Polynomial,
    n: u64,
    e: u32,
    start: &[Polynomial],
) -> Vec<Polynomial> {
    let p = f.prime().as_u64();
    let one = Polynomial::one(f.prime(), f.ctx().clone());
    if f.is_zero() && n > 0 {
        return vec![];
    }
    let mut gens = start.to_vec();
    let mut rest = n;
    for _ in 0..e {
        let digit = rest % p;
        rest /= p;
        let factor = f.pow(digit);
        let products: Vec<Polynomial> = gens.iter().map(|g| g.mul_unchecked(&factor)).collect();
        gens = prune(linear_basis(root_generators(&products, p)));
        if gens.iter().any(Polynomial::is_unit) {
            gens = vec![one.clone()];
        }
    }
    if rest > 0 {
        let top = f.pow(rest);
        gens = gens.iter().map(|g| g.mul_unchecked(&top)).collect();
    }
    gens
}

/// Decides f ∈ J^[p^e] as (f)^[1/p^e] ⊆ J.
pub fn bracket_membership(f: &Polynomial, j: &Ideal, e: u32) -> Result<bool> {
    power_in_bracket(f, 1, j, e)
}

/// Decides f^n ∈ J^[p^e] without expanding f^n.
pub fn power_in_bracket(f: &Polynomial, n: u64, j: &Ideal, e: u32) -> Result<bool> {
    if f.prime() != j.prime() || f.ctx() != j.ctx() {
        return Err(Error::Mismatch(
            "polynomial and ideal live in different rings".into(),
        ));
    }
    if f.is_zero() && n > 0 {
        return Ok(true);
    }
    Ok(root_of_power(f, n, e)
        .iter()
        .all(|g| j.contains_unchecked(g)))
}
