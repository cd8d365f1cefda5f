use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use smallvec::SmallVec;

pub(crate) type Exps = SmallVec<[u32; 8]>;

/// An exponent vector, one entry per context variable.
///
/// Ordering is graded reverse lexicographic: higher total degree first, ties
/// broken in favour of the smaller exponent in the last differing variable.
#[derive(Clone, Debug)]
pub struct Monomial {
    exps: Exps,
    degree: u64,
}

impl Monomial {
    pub fn new(exps: impl IntoIterator<Item = u32>) -> Self {
        let exps: Exps = exps.into_iter().collect();
        let degree = exps.iter().map(|&e| e as u64).sum();
        Monomial { exps, degree }
    }

    pub fn one(arity: usize) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, arity),
            degree: 0,
        }
    }

    /// x_i, the i-th variable.
    pub fn var(arity: usize, i: usize) -> Self {
        let mut m = Monomial::one(arity);
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Monomial {
            exps,
            degree: self.degree + other.degree,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// other / self, if self divides other.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let exps = other
            .exps
            .iter()
            .zip(&self.exps)
            .map(|(a, b)| a - b)
            .collect();
        Some(Monomial {
            exps,
            degree: other.degree - self.degree,
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)))
    }

    /// True when the two monomials share no variable.
    pub fn coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Multiplies every exponent by `k`.
    pub fn scale(&self, k: u64) -> Monomial {
        let exps = self
            .exps
            .iter()
            .map(|&a| {
                u32::try_from(a as u64 * k).expect("exponent overflow while scaling by a p-power")
            })
            .collect();
        Monomial {
            exps,
            degree: self.degree * k,
        }
    }

    /// Componentwise Euclidean division by `q`: returns (quotient, remainder)
    /// with self = q·quotient + remainder.
    pub fn div_rem(&self, q: u64) -> (Monomial, Monomial) {
        let quot = Monomial::new(self.exps.iter().map(|&a| (a as u64 / q) as u32));
        let rem = Monomial::new(self.exps.iter().map(|&a| (a as u64 % q) as u32));
        (quot, rem)
    }
}

impl PartialEq for Monomial {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps
    }
}

impl Eq for Monomial {}

impl Hash for Monomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exps.hash(state);
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.exps.iter().zip(&other.exps).rev() {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_order() {
        let m = |e: &[u32]| Monomial::new(e.iter().copied());
        // degree first
        assert!(m(&[0, 0, 3]) > m(&[1, 1, 0]));
        // x*z < y^2 in grevlex (x > y > z)
        assert!(m(&[1, 0, 1]) < m(&[0, 2, 0]));
        assert!(m(&[2, 0, 0]) > m(&[1, 1, 0]));
        assert!(m(&[1, 1, 0]) > m(&[0, 2, 0]));
        assert_eq!(m(&[1, 2]).cmp(&m(&[1, 2])), Ordering::Equal);
    }

    #[test]
    fn division_helpers() {
        let m = Monomial::new([7, 2]);
        let (q, r) = m.div_rem(3);
        assert_eq!(q.exps(), &[2, 0]);
        assert_eq!(r.exps(), &[1, 2]);
        assert!(Monomial::new([1, 0]).divides(&m));
        assert_eq!(
            Monomial::new([2, 2]).quotient_of(&m).unwrap().exps(),
            &[5, 0]
        );
        assert!(Monomial::new([0, 3]).quotient_of(&m).is_none());
        assert_eq!(m.scale(5).exps(), &[35, 10]);
    }
}
