//! Ideals of F_p[x_1, …, x_n]: membership, equality, Frobenius powers and
//! Frobenius roots.

mod frobenius;
mod groebner;

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::basep::Prime;
use crate::error::{Error, Result};
use crate::polyfp::{parse, Ctx, Polynomial, PolynomialJson, VarContext};

pub use frobenius::{bracket_membership, power_in_bracket, root_of_power, root_of_power_times};
pub(crate) use frobenius::{linear_basis, root_generators};
pub(crate) use groebner::normal_form;

/// A finitely generated ideal with a lazily computed reduced Gröbner basis.
#[derive(Debug)]
pub struct Ideal {
    prime: Prime,
    ctx: Ctx,
    generators: Vec<Polynomial>,
    groebner: OnceLock<Vec<Polynomial>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let groebner = OnceLock::new();
        if let Some(gb) = self.groebner.get() {
            let _ = groebner.set(gb.clone());
        }
        Ideal {
            prime: self.prime,
            ctx: self.ctx.clone(),
            generators: self.generators.clone(),
            groebner,
        }
    }
}

impl Ideal {
    /// The ideal generated by `generators`. Zero generators are dropped.
    pub fn new(prime: Prime, ctx: Ctx, generators: Vec<Polynomial>) -> Result<Ideal> {
        for g in &generators {
            if g.prime() != prime || g.ctx() != &ctx {
                return Err(Error::Mismatch(
                    "ideal generators must share prime and variable context".into(),
                ));
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Ideal {
            prime,
            ctx,
            generators,
            groebner: OnceLock::new(),
        })
    }

    pub fn principal(f: &Polynomial) -> Ideal {
        Ideal::new(f.prime(), f.ctx().clone(), vec![f.clone()]).expect("single generator")
    }

    /// The homogeneous maximal ideal generated by every context variable.
    pub fn maximal(prime: Prime, ctx: Ctx) -> Ideal {
        let gens = (0..ctx.arity())
            .map(|i| Polynomial::var(prime, ctx.clone(), i))
            .collect();
        Ideal::new(prime, ctx, gens).expect("variables share the context")
    }

    /// The ideal generated by the variables named in `names`.
    pub fn generated_by_variables(prime: Prime, ctx: Ctx, names: &[String]) -> Result<Ideal> {
        let gens = names
            .iter()
            .map(|n| match ctx.index_of(n) {
                Some(i) => Ok(Polynomial::var(prime, ctx.clone(), i)),
                None => Err(Error::Mismatch(format!("unknown variable `{n}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(prime, ctx, gens)
    }

    /// Parses a `;`-separated generator list in the given context.
    pub fn parse(text: &str, prime: Prime, ctx: &Ctx) -> Result<Ideal> {
        let mut gens = Vec::new();
        let mut offset = 0;
        for piece in text.split(';') {
            let g = parse(piece, prime, Some(ctx)).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse {
                    pos: pos + offset,
                    msg,
                },
                other => other,
            })?;
            gens.push(g);
            offset += piece.len() + 1;
        }
        Ideal::new(prime, ctx.clone(), gens)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Reduced Gröbner basis in grevlex, computed once and cached.
    pub fn groebner(&self) -> &[Polynomial] {
        self.groebner
            .get_or_init(|| groebner::groebner_basis(&self.generators))
    }

    /// True when the ideal has a monomial generating set.
    pub fn is_monomial(&self) -> bool {
        self.generators.iter().all(Polynomial::is_monomial)
            || self
                .groebner
                .get()
                .is_some_and(|gb| gb.iter().all(Polynomial::is_monomial))
    }

    fn monomial_generators(&self) -> Option<Vec<&Polynomial>> {
        if self.generators.iter().all(Polynomial::is_monomial) {
            Some(self.generators.iter().collect())
        } else {
            let gb = self.groebner.get()?;
            gb.iter()
                .all(Polynomial::is_monomial)
                .then(|| gb.iter().collect())
        }
    }

    fn check(&self, f: &Polynomial) -> Result<()> {
        if f.prime() != self.prime || f.ctx() != &self.ctx {
            return Err(Error::Mismatch(format!(
                "polynomial over F_{} in {:?} is not compatible with an ideal over F_{} in {:?}",
                f.prime(),
                f.ctx().names(),
                self.prime,
                self.ctx.names()
            )));
        }
        Ok(())
    }

    fn check_ideal(&self, other: &Ideal) -> Result<()> {
        if other.prime != self.prime || other.ctx != self.ctx {
            return Err(Error::Mismatch("ideals live in different rings".into()));
        }
        Ok(())
    }

    /// Ideal membership. Monomial ideals are decided term by term.
    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        self.check(f)?;
        Ok(self.contains_unchecked(f))
    }

    pub(crate) fn contains_unchecked(&self, f: &Polynomial) -> bool {
        if f.is_zero() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        if let Some(mons) = self.monomial_generators() {
            return f.terms().iter().all(|(m, _)| {
                mons.iter()
                    .any(|g| g.leading_monomial().is_some_and(|lm| lm.divides(m)))
            });
        }
        normal_form(f, self.groebner()).is_zero()
    }

    /// Membership through the Gröbner basis only, bypassing the monomial path.
    pub fn contains_via_groebner(&self, f: &Polynomial) -> Result<bool> {
        self.check(f)?;
        Ok(f.is_zero() || normal_form(f, self.groebner()).is_zero())
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(Polynomial::is_unit)
            || self.groebner().iter().any(Polynomial::is_unit)
    }

    pub fn is_proper(&self) -> bool {
        !self.is_unit()
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        self.check_ideal(other)?;
        Ok(other.generators.iter().all(|g| self.contains_unchecked(g)))
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.check_ideal(other)?;
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Ideal::new(self.prime, self.ctx.clone(), gens)
    }

    pub fn equals(&self, other: &Ideal) -> Result<bool> {
        Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
    }

    /// Re-expresses the ideal in a context containing all of its variables.
    pub fn embed(&self, ctx: &Ctx) -> Result<Ideal> {
        let gens = self
            .generators
            .iter()
            .map(|g| g.embed(ctx))
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(self.prime, ctx.clone(), gens)
    }

    /// I^[p^e], generated by the p^e-th powers of the generators.
    pub fn frobenius_power(&self, e: u32) -> Result<Ideal> {
        let q = self.q(e)?;
        let gens = self.generators.iter().map(|g| g.frobenius(q)).collect();
        Ideal::new(self.prime, self.ctx.clone(), gens)
    }

    /// I^[1/p^e], the smallest ideal J with I ⊆ J^[p^e], with a minimal
    /// generating set.
    pub fn frobenius_root(&self, e: u32) -> Result<Ideal> {
        let q = self.q(e)?;
        let raw = root_generators(&self.generators, q);
        Ok(self.with_generators(minimalize(raw)))
    }

    fn q(&self, e: u32) -> Result<u64> {
        self.prime
            .pow_u64(e)
            .ok_or_else(|| Error::Domain(format!("{}^{} does not fit in 64 bits", self.prime, e)))
    }

    pub(crate) fn with_generators(&self, gens: Vec<Polynomial>) -> Ideal {
        Ideal {
            prime: self.prime,
            ctx: self.ctx.clone(),
            generators: gens,
            groebner: OnceLock::new(),
        }
    }

    /// The same ideal with a minimal generating set.
    pub fn minimalized(&self) -> Ideal {
        self.with_generators(minimalize(self.generators.clone()))
    }

    pub fn to_json(&self) -> IdealJson {
        IdealJson {
            generators: self.generators.iter().map(Polynomial::to_json).collect(),
        }
    }

    /// Rebuilds an ideal from JSON; `prime` and `ctx` are required when the
    /// generator list is empty.
    pub fn from_json(json: &IdealJson, prime: Option<Prime>, ctx: Option<&Ctx>) -> Result<Ideal> {
        let gens = json
            .generators
            .iter()
            .map(Polynomial::from_json)
            .collect::<Result<Vec<_>>>()?;
        let (prime, ctx) = match gens.first() {
            Some(g) => (g.prime(), g.ctx().clone()),
            None => match (prime, ctx) {
                (Some(p), Some(c)) => (p, c.clone()),
                _ => {
                    return Err(Error::Format(
                        "empty generator list needs an explicit ring".into(),
                    ))
                }
            },
        };
        let gens = gens
            .into_iter()
            .map(|g| {
                if g.ctx().names() == ctx.names() {
                    Ok(Polynomial::from_sorted(
                        g.prime(),
                        ctx.clone(),
                        g.terms().to_vec(),
                    ))
                } else {
                    g.embed(&ctx)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(prime, ctx, gens)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, g) in self.generators.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("]")
    }
}

/// JSON form: `{generators:[polynomial-json…]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealJson {
    pub generators: Vec<PolynomialJson>,
}

/// Drops monomial-redundant generators: every term divisible by a monomial
/// generator means the polynomial is already in their ideal.
fn prune_by_monomials(gens: Vec<Polynomial>) -> Vec<Polynomial> {
    let monos: Vec<Polynomial> = {
        let mut ms: Vec<Polynomial> = gens.iter().filter(|g| g.is_monomial()).cloned().collect();
        ms.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
        let mut kept: Vec<Polynomial> = Vec::new();
        for m in ms {
            let lm = m.leading_monomial().unwrap();
            if !kept
                .iter()
                .any(|k| k.leading_monomial().unwrap().divides(lm))
            {
                kept.push(m);
            }
        }
        kept
    };
    let mut out = monos.clone();
    for g in gens.into_iter().filter(|g| !g.is_monomial()) {
        let covered = g.terms().iter().all(|(m, _)| {
            monos
                .iter()
                .any(|k| k.leading_monomial().unwrap().divides(m))
        });
        if !covered {
            out.push(g);
        }
    }
    out
}

/// A minimal generating set: generators contained in the ideal of the
/// others are discarded. Output is monic and sorted by descending leading
/// monomial; the unit ideal becomes `[1]`.
pub(crate) fn minimalize(gens: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut gens: Vec<Polynomial> = gens
        .into_iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.monic())
        .collect();
    if let Some(u) = gens.iter().find(|g| g.is_unit()) {
        return vec![u.clone()];
    }
    gens.sort_by(|a, b| {
        a.leading_monomial()
            .cmp(&b.leading_monomial())
            .then_with(|| a.terms().len().cmp(&b.terms().len()))
            .then_with(|| format!("{a}").cmp(&format!("{b}")))
    });
    gens.dedup();
    let gens = prune_by_monomials(linear_basis(gens));

    let all_monomial = gens.iter().all(Polynomial::is_monomial);
    let mut kept: Vec<Polynomial> = Vec::new();
    if all_monomial {
        kept = gens;
    } else {
        for g in gens {
            if kept.is_empty() || !normal_form(&g, &groebner::groebner_basis(&kept)).is_zero() {
                kept.push(g);
            }
        }
        let mut i = kept.len();
        while i > 0 && kept.len() > 1 {
            i -= 1;
            let others: Vec<Polynomial> = kept
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, g)| g.clone())
                .collect();
            if normal_form(&kept[i], &groebner::groebner_basis(&others)).is_zero() {
                kept.remove(i);
            }
        }
    }
    if kept.iter().any(Polynomial::is_unit) {
        return vec![kept.into_iter().find(Polynomial::is_unit).unwrap()];
    }
    kept.sort_by(|a, b| b.leading_monomial().cmp(&a.leading_monomial()));
    kept
}

/// Convenience: parses generators, inferring one shared context from all of
/// them in first-appearance order.
pub fn parse_ideal_inferring(texts: &[&str], prime: Prime) -> Result<Ideal> {
    let mut names: Vec<String> = Vec::new();
    for t in texts {
        let p = parse(t, prime, None)?;
        for n in p.ctx().names() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    let ctx = VarContext::new(names)?;
    let gens = texts
        .iter()
        .map(|t| parse(t, prime, Some(&ctx)))
        .collect::<Result<Vec<_>>>()?;
    Ideal::new(prime, ctx, gens)
}
