//! Oracle-equivalence corpus: every case checks the sum formula for the
//! F-pure threshold against ν, and the test-ideal formula against the
//! definitional stabilization.

use std::fmt::Write as _;

use fptlab::basep::{expand, parse_rational, ratio, rational_to_string};
use fptlab::nu::nu;
use fptlab::testideals::{test_ideal, ts_test_ideal_with_window};
use fptlab::thresholds::ts_fthreshold;
use fptlab::{parse, Error, Ideal, Polynomial, Prime, Rational, Result};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_CORPUS: &str = include_str!("../corpus/default.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    #[serde(default)]
    pub cases: Vec<Case>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub prime: u64,
    pub g1: String,
    pub g2: String,
    pub a1: String,
    pub a2: String,
    /// ν checks run for e = 1..=nu_e.
    #[serde(default = "default_nu_e")]
    pub nu_e: u32,
    /// When present, the test ideal is compared with the definition using
    /// this stabilization window.
    #[serde(default)]
    pub tau_emax: Option<u32>,
    #[serde(default)]
    pub expect_fpt: Option<String>,
    #[serde(default)]
    pub expect_case: Option<String>,
}

fn default_nu_e() -> u32 {
    2
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub passed: bool,
    pub fpt: Option<String>,
    pub case: Option<String>,
    pub problems: Vec<String>,
}

pub fn load(text: &str) -> Result<Corpus> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("corpus: {e}")))
}

struct Parsed {
    p: Prime,
    g1: Polynomial,
    g2: Polynomial,
    a1: Rational,
    a2: Rational,
}

fn parse_case(case: &Case) -> Result<Parsed> {
    let p = Prime::new(case.prime)?;
    Ok(Parsed {
        p,
        g1: parse(&case.g1, p, None)?,
        g2: parse(&case.g2, p, None)?,
        a1: parse_rational(&case.a1)?,
        a2: parse_rational(&case.a2)?,
    })
}

/// p^e⟨a⟩_e as u64.
fn scaled_truncation(a: &Rational, p: Prime, e: u32) -> Result<u64> {
    let n = expand(a, p)?.truncation_numerator(e as u64);
    u64::try_from(&n).map_err(|_| Error::Domain("truncation too large".into()))
}

fn check_nu(
    g: &Polynomial,
    a: &Rational,
    p: Prime,
    e: u32,
    label: &str,
    out: &mut Vec<String>,
) -> Result<()> {
    let m = Ideal::maximal(p, g.ctx().clone());
    let got = nu(g, &m, e)?.nu;
    let want = scaled_truncation(a, p, e)?;
    if got != want {
        out.push(format!(
            "{label}: ν at e={e} is {got} but p^e⟨{}⟩_e = {want}",
            rational_to_string(a)
        ));
    }
    Ok(())
}

fn run_case(case: &Case) -> Result<CaseReport> {
    let Parsed { p, g1, g2, a1, a2 } = parse_case(case)?;
    let mut problems = Vec::new();
    for e in 1..=case.nu_e {
        check_nu(&g1, &a1, p, e, "g1", &mut problems)?;
        check_nu(&g2, &a2, p, e, "g2", &mut problems)?;
    }
    let mut fpt = None;
    let mut tag = None;
    if &a1 + &a2 <= ratio(1, 1) {
        let c = ts_fthreshold(&a1, &a2, p)?;
        fpt = Some(rational_to_string(&c.value));
        let ctx = fptlab::VarContext::union(g1.ctx(), g2.ctx());
        let f = g1.embed(&ctx)?.add(&g2.embed(&ctx)?)?;
        for e in 1..=case.nu_e {
            check_nu(&f, &c.value, p, e, "f", &mut problems)?;
        }
        if let Some(want) = &case.expect_fpt {
            let want = parse_rational(want)?;
            if want != c.value {
                problems.push(format!(
                    "fpt is {} but the corpus expects {}",
                    rational_to_string(&c.value),
                    rational_to_string(&want)
                ));
            }
        }
        if let Some(e_max) = case.tau_emax {
            let ts = ts_test_ideal_with_window(&g1, &g2, &a1, &a2, p, e_max.max(2))?;
            let tag_str = ts.case.map(|t| t.as_str().to_string());
            let def = test_ideal(&f, &c.value, e_max)?;
            if !ts.ideal.equals(&def.ideal)? {
                problems.push(format!(
                    "test ideal {} differs from the definition {}",
                    ts.ideal, def.ideal
                ));
            }
            if let Some(want) = &case.expect_case {
                if tag_str.as_deref() != Some(want.as_str()) {
                    problems.push(format!("case is {tag_str:?} but the corpus expects {want}"));
                }
            }
            tag = tag_str;
        }
    } else if case.tau_emax.is_some() || case.expect_fpt.is_some() {
        problems.push("a1+a2 > 1: the sum formula does not apply".into());
    }
    Ok(CaseReport {
        name: case.name.clone(),
        passed: problems.is_empty(),
        fpt,
        case: tag,
        problems,
    })
}

/// Runs every case; the result order follows the corpus regardless of the
/// (seeded) dispatch order.
pub fn verify(corpus: &Corpus, seed: u64) -> Vec<CaseReport> {
    let mut order: Vec<usize> = (0..corpus.cases.len()).collect();
    order.shuffle(&mut StdRng::seed_from_u64(seed));
    let mut done: Vec<(usize, CaseReport)> = order
        .par_iter()
        .map(|&i| {
            let case = &corpus.cases[i];
            let report = run_case(case).unwrap_or_else(|e| CaseReport {
                name: case.name.clone(),
                passed: false,
                fpt: None,
                case: None,
                problems: vec![e.to_string()],
            });
            (i, report)
        })
        .collect();
    done.sort_by_key(|(i, _)| *i);
    done.into_iter().map(|(_, r)| r).collect()
}

pub fn render(reports: &[CaseReport]) -> String {
    let mut out = String::new();
    if reports.is_empty() {
        out.push_str("warning: empty corpus, nothing to check\n");
    }
    for r in reports {
        let status = if r.passed { "ok" } else { "MISMATCH" };
        let _ = write!(out, "{status:8} {}", r.name);
        if let Some(fpt) = &r.fpt {
            let _ = write!(out, "  fpt={fpt}");
        }
        if let Some(c) = &r.case {
            let _ = write!(out, "  case={c}");
        }
        out.push('\n');
        for p in &r.problems {
            let _ = writeln!(out, "         - {p}");
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let _ = writeln!(
        out,
        "{} cases, {} passed, {} failed",
        reports.len(),
        reports.len() - failed,
        failed
    );
    out
}
