//! Buchberger's algorithm over F_p in grevlex order.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::polyfp::{fp_inv, Monomial, Polynomial};

/// Full normal form of `f` modulo `basis` (every element monic and nonzero).
pub(crate) fn normal_form(f: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    if f.is_zero() || basis.is_empty() {
        return f.clone();
    }
    let p = f.prime().as_u64();
    let mut rest: BTreeMap<Monomial, u32> = f.terms().iter().cloned().collect();
    let mut out: Vec<(Monomial, u32)> = Vec::new();
    while let Some((m, c)) = rest.pop_last() {
        let divisor = basis.iter().find_map(|g| {
            let lm = g.leading_monomial()?;
            lm.quotient_of(&m).map(|q| (g, q))
        });
        match divisor {
            None => out.push((m, c)),
            Some((g, shift)) => {
                // subtract c * shift * g; g is monic so its leading term cancels m
                for (gm, gc) in &g.terms()[1..] {
                    let key = gm.mul(&shift);
                    let delta = (p - (c as u64 * *gc as u64) % p) % p;
                    let slot = rest.entry(key).or_insert(0);
                    let v = ((*slot as u64 + delta) % p) as u32;
                    if v == 0 {
                        let key = gm.mul(&shift);
                        rest.remove(&key);
                    } else {
                        *slot = v;
                    }
                }
            }
        }
    }
    Polynomial::from_sorted(f.prime(), f.ctx().clone(), out)
}

fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let lf = f.leading_monomial().unwrap();
    let lg = g.leading_monomial().unwrap();
    let l = lf.lcm(lg);
    let a = f.mul_term(&lf.quotient_of(&l).unwrap(), 1);
    let b = g.mul_term(&lg.quotient_of(&l).unwrap(), 1);
    a.add_scaled(&b, f.prime().get() - 1)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Pair {
    degree: u64,
    j: usize,
    i: usize,
}

/// Reduced Gröbner basis of the ideal generated by `gens`, sorted by
/// descending leading monomial. The zero ideal yields an empty basis.
pub(crate) fn groebner_basis(gens: &[Polynomial]) -> Vec<Polynomial> {
    let mut basis: Vec<Polynomial> = Vec::new();
    for g in gens {
        let r = normal_form(g, &basis);
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    if let Some(u) = basis.iter().find(|g| g.is_unit()) {
        return vec![u.monic()];
    }

    let mut queue: BTreeSet<Pair> = BTreeSet::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    let push_pairs = |basis: &Vec<Polynomial>,
                      j: usize,
                      queue: &mut BTreeSet<Pair>,
                      pending: &mut HashSet<(usize, usize)>| {
        let lj = basis[j].leading_monomial().unwrap().clone();
        for (i, bi) in basis.iter().enumerate().take(j) {
            let li = bi.leading_monomial().unwrap();
            queue.insert(Pair {
                degree: li.lcm(&lj).degree(),
                j,
                i,
            });
            pending.insert((i, j));
        }
    };
    for j in 0..basis.len() {
        push_pairs(&basis, j, &mut queue, &mut pending);
    }

    while let Some(pair) = queue.pop_first() {
        let (i, j) = (pair.i, pair.j);
        pending.remove(&(i, j));
        let li = basis[i].leading_monomial().unwrap();
        let lj = basis[j].leading_monomial().unwrap();
        // product criterion
        if li.coprime(lj) {
            continue;
        }
        // chain criterion
        let l = li.lcm(lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].leading_monomial().unwrap().divides(&l)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let r = normal_form(&s_polynomial(&basis[i], &basis[j]), &basis);
        if r.is_zero() {
            continue;
        }
        if r.is_unit() {
            return vec![r.monic()];
        }
        basis.push(r.monic());
        let j = basis.len() - 1;
        push_pairs(&basis, j, &mut queue, &mut pending);
    }
    reduce_basis(basis)
}

/// Turns a Gröbner basis into the reduced one.
fn reduce_basis(basis: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut minimal: Vec<Polynomial> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let lg = g.leading_monomial().unwrap();
        let redundant = basis.iter().enumerate().any(|(l, h)| {
            let lh = h.leading_monomial().unwrap();
            l != k && lh.divides(lg) && (lh != lg || l < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced: Vec<Polynomial> = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let g = &minimal[k];
        let (lm, lc) = g.leading_term().unwrap().clone();
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != k)
            .map(|(_, h)| h.clone())
            .collect();
        let tail = Polynomial::from_sorted(g.prime(), g.ctx().clone(), g.terms()[1..].to_vec());
        let tail = normal_form(&tail, &others);
        let head = Polynomial::monomial(g.prime(), g.ctx().clone(), lm, lc as u64);
        let r = head.add_scaled(&tail, 1);
        let inv = fp_inv(r.leading_term().unwrap().1, r.prime().get());
        reduced.push(r.scale(inv));
    }
    reduced.sort_by(|a, b| b.leading_monomial().cmp(&a.leading_monomial()));
    reduced
}
