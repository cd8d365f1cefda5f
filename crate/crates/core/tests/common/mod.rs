//! Shared corpora for the oracle suites.
#![allow(dead_code)]

use fptlab::basep::ratio;
use fptlab::thresholds::{fpt_diagonal_fold, fpt_monomial, Outcome};
use fptlab::{parse, Ideal, Polynomial, Prime, Rational, VarContext};

/// A component polynomial in at most two variables with a known threshold.
#[derive(Clone, Debug)]
pub enum Shape {
    /// x^a·y^b…
    Mono(Vec<u64>),
    /// x^a + y^b + …
    Diag(Vec<u64>),
}

impl Shape {
    pub fn render(&self, vars: &[&str]) -> String {
        let pieces: Vec<String> = match self {
            Shape::Mono(e) | Shape::Diag(e) => e
                .iter()
                .zip(vars)
                .map(|(d, v)| format!("{v}^{d}"))
                .collect(),
        };
        match self {
            Shape::Mono(_) => pieces.join("*"),
            Shape::Diag(_) => pieces.join(" + "),
        }
    }

    /// The F-pure threshold at the origin, when a closed form applies.
    pub fn threshold(&self, p: Prime) -> Option<Rational> {
        match self {
            Shape::Mono(e) => Some(fpt_monomial(e).unwrap()),
            Shape::Diag(d) => match fpt_diagonal_fold(d, p).unwrap() {
                Outcome::Value(v) => Some(v.value),
                Outcome::Inapplicable(_) => None,
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct PairCase {
    pub p: Prime,
    pub g1: Polynomial,
    pub g2: Polynomial,
    pub a1: Rational,
    pub a2: Rational,
    pub label: String,
}

impl PairCase {
    /// g1 + g2 in the joint ring, with its maximal ideal.
    pub fn joint(&self) -> (Polynomial, Ideal) {
        let ctx = VarContext::union(self.g1.ctx(), self.g2.ctx());
        let f = self
            .g1
            .embed(&ctx)
            .unwrap()
            .add(&self.g2.embed(&ctx).unwrap())
            .unwrap();
        let m = Ideal::maximal(self.p, ctx);
        (f, m)
    }
}

/// Every unordered pair of shapes (with repetition) at each prime whose
/// thresholds are known and sum to at most one.
pub fn pair_corpus(shapes: &[Shape], primes: &[u64]) -> Vec<PairCase> {
    let mut out = Vec::new();
    for &p in primes {
        let prime = Prime::new(p).unwrap();
        for (i, s1) in shapes.iter().enumerate() {
            for s2 in &shapes[i..] {
                let (Some(a1), Some(a2)) = (s1.threshold(prime), s2.threshold(prime)) else {
                    continue;
                };
                if &a1 + &a2 > ratio(1, 1) {
                    continue;
                }
                let t1 = s1.render(&["x", "y"]);
                let t2 = s2.render(&["z", "w"]);
                out.push(PairCase {
                    p: prime,
                    g1: parse(&t1, prime, None).unwrap(),
                    g2: parse(&t2, prime, None).unwrap(),
                    a1,
                    a2,
                    label: format!("({t1}) + ({t2}) at p={p}"),
                });
            }
        }
    }
    out
}

/// Monomials and diagonals in at most two variables of degree at most 6.
pub fn small_shapes() -> Vec<Shape> {
    let mut shapes = Vec::new();
    for a in 2..=6 {
        shapes.push(Shape::Mono(vec![a]));
    }
    for (a, b) in [(1, 2), (2, 2), (2, 3), (1, 4), (3, 3)] {
        shapes.push(Shape::Mono(vec![a, b]));
    }
    for (a, b) in [
        (2, 3),
        (2, 4),
        (3, 3),
        (3, 4),
        (4, 4),
        (2, 6),
        (3, 6),
        (4, 6),
        (6, 6),
    ] {
        shapes.push(Shape::Diag(vec![a, b]));
    }
    shapes
}

/// Shapes for the test-ideal corpus (component degrees at most 12).
pub fn tau_shapes() -> Vec<Shape> {
    let mut shapes = Vec::new();
    for a in [2, 3, 4, 5, 6, 8, 12] {
        shapes.push(Shape::Mono(vec![a]));
    }
    for (a, b) in [(2, 3), (1, 4)] {
        shapes.push(Shape::Mono(vec![a, b]));
    }
    for (a, b) in [(2, 2), (2, 3), (4, 4), (2, 8), (8, 8), (3, 4), (4, 12)] {
        shapes.push(Shape::Diag(vec![a, b]));
    }
    shapes
}

/// Expands f^n by repeated multiplication.
pub fn naive_pow(f: &Polynomial, n: u64) -> Polynomial {
    let mut acc = Polynomial::one(f.prime(), f.ctx().clone());
    for _ in 0..n {
        acc = acc.mul(f).unwrap();
    }
    acc
}

/// Whether every term of g has some exponent at least q, i.e. g lies in
/// (x_1^q, …, x_n^q).
pub fn in_bracket_of_maximal(g: &Polynomial, q: u64) -> bool {
    g.terms()
        .iter()
        .all(|(m, _)| m.exps().iter().any(|&a| a as u64 >= q))
}

/// ν_f^m(q) by a linear scan over expanded powers.
pub fn nu_by_scan(f: &Polynomial, q: u64, limit: u64) -> u64 {
    let mut power = Polynomial::one(f.prime(), f.ctx().clone());
    for l in 0..=limit {
        if in_bracket_of_maximal(&power, q) {
            return l - 1;
        }
        power = power.mul(f).unwrap();
    }
    panic!("no member below {limit}");
}
