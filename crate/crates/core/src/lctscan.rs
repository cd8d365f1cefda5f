//! Log canonical thresholds on composition expressions, the matching
//! F-pure threshold per prime, and a congruence-filtered prime scanner.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::basep::{parse_rational, ratio_str, rational_to_string, Prime, Rational};
use crate::error::{Error, Result};
use crate::thresholds::{
    fpt_diagonal_fold, fpt_disjoint_product, fpt_monomial, fpt_power, ts_fthreshold, Outcome,
};

/// A polynomial built from monomials and diagonals by sums and products in
/// disjoint variables and by powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompositionExpr {
    Monomial(Vec<u64>),
    Diagonal(Vec<u64>),
    Sum(Box<CompositionExpr>, Box<CompositionExpr>),
    Power(Box<CompositionExpr>, u64),
    Product(Box<CompositionExpr>, Box<CompositionExpr>),
    /// A leaf with no closed form; its thresholds come from [`Imports`].
    Import(String),
}

/// A residue class r mod m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub residue: u64,
    pub modulus: u64,
}

impl Congruence {
    pub fn new(residue: u64, modulus: u64) -> Result<Congruence> {
        if modulus == 0 {
            return Err(Error::Format("congruence modulus must be positive".into()));
        }
        Ok(Congruence {
            residue: residue % modulus,
            modulus,
        })
    }

    pub fn holds(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }

    /// Accepts "r mod m" and "r:m".
    pub fn parse(text: &str) -> Result<Congruence> {
        let bad = || Error::Format(format!("`{text}` is not a congruence like `1 mod 32`"));
        let (r, m) = text
            .split_once(" mod ")
            .or_else(|| text.split_once(':'))
            .ok_or_else(bad)?;
        let r = r.trim().parse::<u64>().map_err(|_| bad())?;
        let m = m.trim().parse::<u64>().map_err(|_| bad())?;
        Congruence::new(r, m)
    }
}

impl std::fmt::Display for Congruence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Supplied thresholds for an imported leaf: its F-pure threshold `a` on the
/// primes in `primes`, and its lct (defaults to `a`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportSpec {
    #[serde(with = "ratio_str")]
    pub a: Rational,
    #[serde(
        default,
        with = "ratio_str::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub lct: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<String>,
}

impl ImportSpec {
    fn class(&self) -> Result<Option<Congruence>> {
        self.primes.as_deref().map(Congruence::parse).transpose()
    }
}

pub type Imports = BTreeMap<String, ImportSpec>;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Node {
    op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<Node>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exps: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degs: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    imports: Imports,
}

fn positive_list(list: Option<Vec<u64>>, what: &str) -> Result<Vec<u64>> {
    let list = list.ok_or_else(|| Error::Format(format!("missing `{what}`")))?;
    if list.is_empty() || list.contains(&0) {
        return Err(Error::Format(format!(
            "`{what}` must be a nonempty list of positive integers"
        )));
    }
    Ok(list)
}

fn from_node(node: Node) -> Result<CompositionExpr> {
    let binary =
        |children: Vec<Node>,
         make: fn(Box<CompositionExpr>, Box<CompositionExpr>) -> CompositionExpr| {
            if children.len() < 2 {
                return Err(Error::Format(
                    "sum and prod need at least two children".into(),
                ));
            }
            let mut it = children.into_iter();
            let mut acc = from_node(it.next().unwrap())?;
            for c in it {
                acc = make(Box::new(acc), Box::new(from_node(c)?));
            }
            Ok(acc)
        };
    match node.op.as_str() {
        "monomial" => Ok(CompositionExpr::Monomial(positive_list(node.exps, "exps")?)),
        "diagonal" => Ok(CompositionExpr::Diagonal(positive_list(node.degs, "degs")?)),
        "sum" => binary(node.children, CompositionExpr::Sum),
        "prod" => binary(node.children, CompositionExpr::Product),
        "pow" => {
            let n = node
                .n
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::Format("`pow` needs an exponent `n` ≥ 1".into()))?;
            let mut children = node.children;
            if children.len() != 1 {
                return Err(Error::Format("`pow` takes exactly one child".into()));
            }
            Ok(CompositionExpr::Power(
                Box::new(from_node(children.remove(0))?),
                n,
            ))
        }
        "import" => {
            Ok(CompositionExpr::Import(node.id.ok_or_else(|| {
                Error::Format("`import` needs an `id`".into())
            })?))
        }
        other => Err(Error::Format(format!("unknown op `{other}`"))),
    }
}

fn to_node(expr: &CompositionExpr) -> Node {
    match expr {
        CompositionExpr::Monomial(e) => Node {
            op: "monomial".into(),
            exps: Some(e.clone()),
            ..Node::default()
        },
        CompositionExpr::Diagonal(d) => Node {
            op: "diagonal".into(),
            degs: Some(d.clone()),
            ..Node::default()
        },
        CompositionExpr::Sum(l, r) => Node {
            op: "sum".into(),
            children: vec![to_node(l), to_node(r)],
            ..Node::default()
        },
        CompositionExpr::Product(l, r) => Node {
            op: "prod".into(),
            children: vec![to_node(l), to_node(r)],
            ..Node::default()
        },
        CompositionExpr::Power(g, n) => Node {
            op: "pow".into(),
            children: vec![to_node(g)],
            n: Some(*n),
            ..Node::default()
        },
        CompositionExpr::Import(id) => Node {
            op: "import".into(),
            id: Some(id.clone()),
            ..Node::default()
        },
    }
}

impl CompositionExpr {
    /// Reads `{op, children|exps|degs|n|id, imports}`; imports are taken
    /// from the root.
    pub fn from_json(text: &str) -> Result<(CompositionExpr, Imports)> {
        let node: Node = serde_json::from_str(text)
            .map_err(|e| Error::Format(format!("expression JSON: {e}")))?;
        let imports = node.imports.clone();
        for (id, spec) in &imports {
            spec.class()
                .map_err(|e| Error::Format(format!("import `{id}`: {e}")))?;
        }
        Ok((from_node(node)?, imports))
    }

    pub fn to_json(&self, imports: &Imports) -> serde_json::Value {
        let mut node = to_node(self);
        node.imports = imports.clone();
        serde_json::to_value(node).expect("plain data serializes")
    }

    /// Import ids referenced by the expression.
    pub fn import_ids(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_ids(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_ids(&self, out: &mut Vec<String>) {
        match self {
            CompositionExpr::Import(id) => out.push(id.clone()),
            CompositionExpr::Sum(l, r) | CompositionExpr::Product(l, r) => {
                l.collect_ids(out);
                r.collect_ids(out);
            }
            CompositionExpr::Power(g, _) => g.collect_ids(out),
            CompositionExpr::Monomial(_) | CompositionExpr::Diagonal(_) => {}
        }
    }
}

fn unit_fraction(d: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(d))
}

/// lct₀ by the composition rules: monomial 1/max, diagonal min(1, Σ1/d),
/// sum min(1, l + r), power lct/n, product min.
pub fn lct(expr: &CompositionExpr, imports: &Imports) -> Result<Rational> {
    let one = Rational::one();
    Ok(match expr {
        CompositionExpr::Monomial(e) => fpt_monomial(e)?,
        CompositionExpr::Diagonal(d) => {
            let s: Rational = d.iter().map(|&d| unit_fraction(d)).sum();
            s.min(one)
        }
        CompositionExpr::Sum(l, r) => (lct(l, imports)? + lct(r, imports)?).min(one),
        CompositionExpr::Power(g, n) => fpt_power(&lct(g, imports)?, *n)?,
        CompositionExpr::Product(l, r) => {
            fpt_disjoint_product(&lct(l, imports)?, &lct(r, imports)?)
        }
        CompositionExpr::Import(id) => {
            let spec = imports
                .get(id)
                .ok_or_else(|| Error::MissingImport(id.clone()))?;
            spec.lct.clone().unwrap_or_else(|| spec.a.clone())
        }
    })
}

/// The F-pure threshold at p mirroring the lct recursion, or the reason it
/// cannot be evaluated there.
pub fn fpt_of_expr(
    expr: &CompositionExpr,
    p: Prime,
    imports: &Imports,
) -> Result<Outcome<Rational>> {
    use Outcome::{Inapplicable, Value};
    Ok(match expr {
        CompositionExpr::Monomial(e) => Value(fpt_monomial(e)?),
        CompositionExpr::Diagonal(d) => match fpt_diagonal_fold(d, p)? {
            Value(v) => Value(v.value),
            Inapplicable(why) => Inapplicable(why),
        },
        CompositionExpr::Sum(l, r) => {
            let (a1, a2) = match (fpt_of_expr(l, p, imports)?, fpt_of_expr(r, p, imports)?) {
                (Value(a1), Value(a2)) => (a1, a2),
                (Inapplicable(why), _) | (_, Inapplicable(why)) => return Ok(Inapplicable(why)),
            };
            match ts_fthreshold(&a1, &a2, p) {
                Ok(v) => Value(v.value),
                Err(Error::Inapplicable(_)) => Inapplicable(format!(
                    "sum of {} and {} exceeds 1",
                    rational_to_string(&a1),
                    rational_to_string(&a2)
                )),
                Err(e) => return Err(e),
            }
        }
        CompositionExpr::Power(g, n) => match fpt_of_expr(g, p, imports)? {
            Value(c) => Value(fpt_power(&c, *n)?),
            other => other,
        },
        CompositionExpr::Product(l, r) => {
            match (fpt_of_expr(l, p, imports)?, fpt_of_expr(r, p, imports)?) {
                (Value(c1), Value(c2)) => Value(fpt_disjoint_product(&c1, &c2)),
                (Inapplicable(why), _) | (_, Inapplicable(why)) => Inapplicable(why),
            }
        }
        CompositionExpr::Import(id) => {
            let spec = imports
                .get(id)
                .ok_or_else(|| Error::MissingImport(id.clone()))?;
            match spec.class()? {
                Some(class) if !class.holds(p.as_u64()) => Inapplicable(format!(
                    "import `{id}` supplies no threshold at p = {p} (needs p ≡ {class})"
                )),
                _ => Value(spec.a.clone()),
            }
        }
    })
}

/// Primes up to `bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// One scanned prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub prime: u64,
    pub lct: Rational,
    pub fpt: Outcome<Rational>,
    pub matches: bool,
    pub congruence_notes: Vec<String>,
}

#[derive(Serialize)]
struct ScanReportJson {
    prime: u64,
    lct: String,
    fpt: String,
    #[serde(rename = "match")]
    matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    inapplicable: Option<String>,
    congruence_notes: Vec<String>,
}

impl ScanReport {
    pub fn to_json(&self) -> serde_json::Value {
        let (fpt, inapplicable) = match &self.fpt {
            Outcome::Value(v) => (rational_to_string(v), None),
            Outcome::Inapplicable(why) => ("INAPPLICABLE".to_string(), Some(why.clone())),
        };
        serde_json::to_value(ScanReportJson {
            prime: self.prime,
            lct: rational_to_string(&self.lct),
            fpt,
            matches: self.matches,
            inapplicable,
            congruence_notes: self.congruence_notes.clone(),
        })
        .expect("plain data serializes")
    }
}

/// Evaluates one prime. A threshold above the lct is an internal error.
pub fn scan_prime(
    expr: &CompositionExpr,
    imports: &Imports,
    lct_value: &Rational,
    p: u64,
    filters: &[Congruence],
) -> Result<ScanReport> {
    let prime = Prime::new(p)?;
    let fpt = fpt_of_expr(expr, prime, imports)?;
    if let Outcome::Value(v) = &fpt {
        if v > lct_value {
            return Err(Error::Internal(format!(
                "fpt {} exceeds lct {} at p = {p}",
                rational_to_string(v),
                rational_to_string(lct_value)
            )));
        }
    }
    let matches = fpt.value() == Some(lct_value);
    Ok(ScanReport {
        prime: p,
        lct: lct_value.clone(),
        fpt,
        matches,
        congruence_notes: filters.iter().map(|c| format!("p ≡ {c}")).collect(),
    })
}

/// Scans every prime up to `bound` satisfying all `filters`, sorted by prime.
pub fn mtw_scan(
    expr: &CompositionExpr,
    imports: &Imports,
    bound: u64,
    filters: &[Congruence],
) -> Result<Vec<ScanReport>> {
    let lct_value = lct(expr, imports)?;
    primes_up_to(bound)
        .into_iter()
        .filter(|&p| filters.iter().all(|c| c.holds(p)))
        .map(|p| scan_prime(expr, imports, &lct_value, p, filters))
        .collect()
}

/// Largest lct − fpt over applicable primes in each dyadic band [2^k, 2^{k+1}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrendBand {
    pub low: u64,
    pub high: u64,
    pub max_deviation: Option<Rational>,
    pub primes: usize,
}

/// Per-band maximal deviations and whether they never increase across
/// nonempty bands. Reported only; the limit statement is not checked.
pub fn dyadic_trend(reports: &[ScanReport]) -> (Vec<TrendBand>, bool) {
    let mut bands: BTreeMap<u32, TrendBand> = BTreeMap::new();
    for r in reports {
        let k = 63 - r.prime.leading_zeros();
        let band = bands.entry(k).or_insert_with(|| TrendBand {
            low: 1 << k,
            high: (1u64 << k).saturating_mul(2) - 1,
            max_deviation: None,
            primes: 0,
        });
        if let Outcome::Value(v) = &r.fpt {
            band.primes += 1;
            let dev = &r.lct - v;
            if band.max_deviation.as_ref().is_none_or(|m| &dev > m) {
                band.max_deviation = Some(dev);
            }
        }
    }
    let bands: Vec<TrendBand> = bands.into_values().collect();
    let devs: Vec<&Rational> = bands
        .iter()
        .filter_map(|b| b.max_deviation.as_ref())
        .collect();
    let non_increasing = devs.windows(2).all(|w| w[1] <= w[0]);
    (bands, non_increasing)
}

/// Parses `r:m` or `r mod m` filters.
pub fn parse_filters(texts: &[String]) -> Result<Vec<Congruence>> {
    texts.iter().map(|t| Congruence::parse(t)).collect()
}

/// Convenience for callers holding textual rationals.
pub fn import(a: &str, lct: Option<&str>, primes: Option<&str>) -> Result<ImportSpec> {
    Ok(ImportSpec {
        a: parse_rational(a)?,
        lct: lct.map(parse_rational).transpose()?,
        primes: primes.map(str::to_string),
    })
}
