//! Command-line front end: argument parsing, dispatch and output rendering.
//!
//! Exit codes: 0 success, 1 corpus mismatch, 2 domain error (theorem
//! inapplicable, failed precondition), 3 input error.

pub mod corpus;

use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use fptlab::basep::{parse_rational, rational_to_string, Rational};
use fptlab::ideals::Ideal;
use fptlab::lctscan::{
    dyadic_trend, lct, parse_filters, primes_up_to, scan_prime, CompositionExpr,
};
use fptlab::nu::{nu_with_cap, DEFAULT_RADICAL_CAP};
use fptlab::testideals::{test_ideal, ts_test_ideal_with_window, DEFAULT_E_MAX};
use fptlab::thresholds::{fpt_diagonal_fold, fpt_monomial, ts_fthreshold, Outcome};
use fptlab::{parse, Error, Polynomial, Prime, VarContext};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "fptlab",
    version,
    about = "F-thresholds, Frobenius roots and test ideals over F_p"
)]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel commands.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized dispatch order; never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ν_f^J(p^e), the largest l with f^l outside J^[p^e].
    Nu {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        poly: String,
        /// Generators separated by `;` (default: all variables).
        #[arg(long)]
        ideal: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RADICAL_CAP)]
        cap: u32,
    },
    /// F-pure thresholds from closed forms.
    #[command(subcommand)]
    Fpt(FptCommand),
    /// Frobenius root I^[1/p^e].
    FrobeniusRoot {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        e: u32,
        /// Generators separated by `;`.
        #[arg(long)]
        ideal: String,
    },
    /// Test ideals.
    #[command(subcommand)]
    TestIdeal(TestIdealCommand),
    /// Compare lct and fpt over primes up to a bound.
    MtwScan {
        /// Expression JSON file.
        #[arg(long)]
        expr: String,
        #[arg(long)]
        bound: u64,
        /// Congruence filter `r:m`, repeatable.
        #[arg(long = "filter")]
        filters: Vec<String>,
    },
    /// Run the oracle-equivalence corpus.
    VerifyCorpus {
        /// Corpus JSON file (default: the shipped corpus).
        #[arg(long)]
        corpus: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum FptCommand {
    /// Threshold of g1 + g2 from component thresholds a1, a2.
    Ts(TsArgs),
    /// 1/max of the exponents.
    Monomial {
        #[arg(long, value_delimiter = ',')]
        exps: Vec<u64>,
    },
    /// Iterated sum formula for x1^d1 + x2^d2 + … .
    Diagonal {
        #[arg(long, value_delimiter = ',')]
        degs: Vec<u64>,
        #[arg(long)]
        prime: u64,
    },
}

#[derive(Args, Debug)]
struct TsArgs {
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    a1: String,
    #[arg(long)]
    a2: String,
    /// Components g1 g2 (polynomial text or polynomial JSON files) to check
    /// the claimed thresholds against ν.
    #[arg(long, num_args = 2, value_names = ["G1", "G2"])]
    verify: Option<Vec<String>>,
    #[arg(long, default_value_t = 2)]
    verify_e: u32,
}

#[derive(Subcommand, Debug)]
enum TestIdealCommand {
    /// τ(f^c) at c = fpt(g1 + g2) from the three-case formula.
    Ts {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        g1: String,
        #[arg(long)]
        g2: String,
        #[arg(long)]
        a1: String,
        #[arg(long)]
        a2: String,
        /// Also compute τ(f^c) from the definition with this window.
        #[arg(long)]
        brute_force_check: Option<u32>,
    },
    /// τ(f^c) from the definition.
    Def {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        poly: String,
        #[arg(long)]
        c: String,
        /// Stabilization window (default: FPTLAB_EMAX or 6).
        #[arg(long)]
        emax: Option<u32>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Lib(Error),
    /// A check failed; carries the report in both renderings.
    Mismatch(String, Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<(String, Value), Failure>;

fn e_max_default() -> std::result::Result<u32, Failure> {
    match std::env::var("FPTLAB_EMAX") {
        Ok(v) => v.trim().parse::<u32>().map_err(|_| {
            Failure::Lib(Error::Format(format!(
                "FPTLAB_EMAX=`{v}` is not a natural number"
            )))
        }),
        Err(_) => Ok(DEFAULT_E_MAX),
    }
}

fn prime(p: u64) -> std::result::Result<Prime, Failure> {
    Prime::new(p).map_err(|e| Failure::Lib(Error::Format(e.to_string())))
}

/// Polynomial text, or a path to polynomial JSON.
fn load_poly(spec: &str, p: Prime) -> fptlab::Result<Polynomial> {
    if spec.ends_with(".json") && Path::new(spec).exists() {
        let text =
            std::fs::read_to_string(spec).map_err(|e| Error::Format(format!("{spec}: {e}")))?;
        let json =
            serde_json::from_str(&text).map_err(|e| Error::Format(format!("{spec}: {e}")))?;
        let f = Polynomial::from_json(&json)?;
        if f.prime() != p {
            return Err(Error::Mismatch(format!(
                "{spec} is over F_{} not F_{p}",
                f.prime()
            )));
        }
        return Ok(f);
    }
    parse(spec, p, None)
}

fn ideal_json(i: &Ideal) -> Value {
    json!({
        "vars": i.ctx().names(),
        "generators": i.to_json().generators,
        "display": i.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    })
}

fn cmd_nu(p: u64, e: u32, poly: &str, ideal: Option<&str>, cap: u32) -> CmdResult {
    let p = prime(p)?;
    let f = parse(poly, p, None)?;
    let (f, j) = match ideal {
        None => {
            let j = Ideal::maximal(p, f.ctx().clone());
            (f, j)
        }
        Some(text) => {
            let mut names: Vec<String> = f.ctx().names().to_vec();
            for piece in text.split(';') {
                for n in parse(piece, p, None)?.ctx().names() {
                    if !names.contains(n) {
                        names.push(n.clone());
                    }
                }
            }
            let ctx = VarContext::new(names)?;
            (f.embed(&ctx)?, Ideal::parse(text, p, &ctx)?)
        }
    };
    let rec = nu_with_cap(&f, &j, e, cap)?;
    let human = format!(
        "nu = {}\ntruncation = {}\n",
        rec.nu,
        rational_to_string(&rec.truncation)
    );
    Ok((human, rec.to_json()))
}

fn ts_verify(args: &TsArgs, p: Prime, c: &Rational) -> std::result::Result<Vec<String>, Failure> {
    let Some(paths) = &args.verify else {
        return Ok(Vec::new());
    };
    let g1 = load_poly(&paths[0], p)?;
    let g2 = load_poly(&paths[1], p)?;
    let a1 = parse_rational(&args.a1)?;
    let a2 = parse_rational(&args.a2)?;
    let ctx = VarContext::union(g1.ctx(), g2.ctx());
    let f = g1.embed(&ctx)?.add(&g2.embed(&ctx)?)?;
    let mut lines = Vec::new();
    for e in 1..=args.verify_e {
        for (label, g, a) in [("g1", &g1, &a1), ("g2", &g2, &a2), ("f", &f, c)] {
            let m = Ideal::maximal(p, g.ctx().clone());
            let got = fptlab::nu::nu(g, &m, e)?.nu;
            let want = fptlab::basep::expand(a, p)?.truncation_numerator(e as u64);
            if u64::try_from(&want).ok() == Some(got) {
                lines.push(format!(
                    "{label}: nu at e={e} is {got}, consistent with {}",
                    rational_to_string(a)
                ));
            } else {
                return Err(Failure::Lib(Error::Precondition(format!(
                    "{label}: nu at e={e} is {got} but the claimed threshold {} predicts {want}",
                    rational_to_string(a)
                ))));
            }
        }
    }
    Ok(lines)
}

fn cmd_fpt(cmd: &FptCommand) -> CmdResult {
    match cmd {
        FptCommand::Ts(args) => {
            let p = prime(args.prime)?;
            let a1 = parse_rational(&args.a1)?;
            let a2 = parse_rational(&args.a2)?;
            let v = ts_fthreshold(&a1, &a2, p)?;
            let checks = ts_verify(args, p, &v.value)?;
            let mut human = format!(
                "fpt = {}\nclassification = {}\n",
                rational_to_string(&v.value),
                v.classification.as_str()
            );
            if let Some(pr) = v.profile {
                let _ = writeln!(human, "L = {}\nd = {}", pr.l, pr.d);
            }
            for line in &checks {
                let _ = writeln!(human, "check: {line}");
            }
            let mut j = v.to_json();
            if args.verify.is_some() {
                j["verified"] = json!(checks);
            }
            Ok((human, j))
        }
        FptCommand::Monomial { exps } => {
            let c = fpt_monomial(exps)?;
            Ok((
                format!("fpt = {}\n", rational_to_string(&c)),
                json!({ "value": rational_to_string(&c) }),
            ))
        }
        FptCommand::Diagonal { degs, prime: p } => {
            let p = prime(*p)?;
            match fpt_diagonal_fold(degs, p)? {
                Outcome::Value(v) => {
                    let human = format!(
                        "fpt = {}\nclassification = {}\n",
                        rational_to_string(&v.value),
                        v.classification.as_str()
                    );
                    Ok((human, v.to_json()))
                }
                Outcome::Inapplicable(why) => Ok((
                    format!("fpt = INAPPLICABLE ({why})\n"),
                    json!({ "value": "INAPPLICABLE", "reason": why }),
                )),
            }
        }
    }
}

fn cmd_root(p: u64, e: u32, ideal: &str) -> CmdResult {
    let p = prime(p)?;
    let mut names: Vec<String> = Vec::new();
    for piece in ideal.split(';') {
        for n in parse(piece, p, None)?.ctx().names() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    let ctx = VarContext::new(names)?;
    let i = Ideal::parse(ideal, p, &ctx)?;
    let root = i.frobenius_root(e)?;
    Ok((format!("{root}\n"), ideal_json(&root)))
}

fn cmd_test_ideal(cmd: &TestIdealCommand) -> CmdResult {
    match cmd {
        TestIdealCommand::Ts {
            prime: p,
            g1,
            g2,
            a1,
            a2,
            brute_force_check,
        } => {
            let p = prime(*p)?;
            let g1 = load_poly(g1, p)?;
            let g2 = load_poly(g2, p)?;
            let a1 = parse_rational(a1)?;
            let a2 = parse_rational(a2)?;
            let window = e_max_default()?;
            let r = ts_test_ideal_with_window(&g1, &g2, &a1, &a2, p, window)?;
            let mut human = format!(
                "tau = {}\ncase = {}\nfpt = {}\n",
                r.ideal,
                r.case.map_or("-", |c| c.as_str()),
                rational_to_string(&r.exponent)
            );
            if let Some(pr) = r.profile {
                let _ = writeln!(human, "L = {}\nd = {}", pr.l, pr.d);
            }
            let mut j = r.to_json();
            if let Some(e_max) = brute_force_check {
                let f = r.ideal.ctx().clone();
                let f = g1.embed(&f)?.add(&g2.embed(&f)?)?;
                let def = test_ideal(&f, &r.exponent, *e_max)?;
                if !def.ideal.equals(&r.ideal)? {
                    let msg = format!(
                        "definitional test ideal {} differs from {}",
                        def.ideal, r.ideal
                    );
                    let j = json!({ "error": { "kind": "mismatch", "message": msg } });
                    return Err(Failure::Mismatch(format!("{msg}\n"), j));
                }
                let _ = writeln!(
                    human,
                    "brute-force check passed (stabilized at e = {})",
                    def.stabilized_at_e
                );
                j["brute_force_check"] =
                    json!({ "passed": true, "stabilized_at_e": def.stabilized_at_e });
            }
            Ok((human, j))
        }
        TestIdealCommand::Def {
            prime: p,
            poly,
            c,
            emax,
        } => {
            let p = prime(*p)?;
            let f = load_poly(poly, p)?;
            let c = parse_rational(c)?;
            let e_max = match emax {
                Some(e) => *e,
                None => e_max_default()?,
            };
            let r = test_ideal(&f, &c, e_max)?;
            let human = format!(
                "tau = {}\nstabilized_at_e = {}\n",
                r.ideal, r.stabilized_at_e
            );
            Ok((human, r.to_json()))
        }
    }
}

fn cmd_scan(expr_path: &str, bound: u64, filters: &[String]) -> CmdResult {
    let text = std::fs::read_to_string(expr_path)
        .map_err(|e| Error::Format(format!("{expr_path}: {e}")))?;
    let (expr, imports) = CompositionExpr::from_json(&text)?;
    let filters = parse_filters(filters)?;
    let lct_value = lct(&expr, &imports)?;
    let primes: Vec<u64> = primes_up_to(bound)
        .into_iter()
        .filter(|&p| filters.iter().all(|c| c.holds(p)))
        .collect();
    let reports = primes
        .par_iter()
        .map(|&p| scan_prime(&expr, &imports, &lct_value, p, &filters))
        .collect::<fptlab::Result<Vec<_>>>()?;
    let (bands, non_increasing) = dyadic_trend(&reports);
    let matched: Vec<u64> = reports
        .iter()
        .filter(|r| r.matches)
        .map(|r| r.prime)
        .collect();
    let applicable = reports.iter().filter(|r| r.fpt.is_applicable()).count();

    let mut human = format!("lct = {}\n", rational_to_string(&lct_value));
    for r in &reports {
        let fpt = match &r.fpt {
            Outcome::Value(v) => rational_to_string(v),
            Outcome::Inapplicable(why) => format!("INAPPLICABLE ({why})"),
        };
        let mark = if r.matches { "match" } else { "-" };
        let _ = writeln!(human, "p = {:>6}  fpt = {fpt}  {mark}", r.prime);
    }
    let _ = writeln!(
        human,
        "matches found: {} of {} applicable primes ({} scanned)",
        matched.len(),
        applicable,
        reports.len()
    );
    let _ = writeln!(
        human,
        "trend: max deviation per dyadic band {}",
        if non_increasing {
            "non-increasing"
        } else {
            "not monotone"
        }
    );
    let bands_json: Vec<Value> = bands
        .iter()
        .map(|b| {
            json!({
                "low": b.low,
                "high": b.high,
                "primes": b.primes,
                "max_deviation": b.max_deviation.as_ref().map(rational_to_string),
            })
        })
        .collect();
    let j = json!({
        "lct": rational_to_string(&lct_value),
        "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "matches_found": matched,
        "applicable": applicable,
        "trend": { "bands": bands_json, "non_increasing": non_increasing },
    });
    Ok((human, j))
}

fn cmd_verify(path: Option<&str>, seed: u64) -> CmdResult {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Format(format!("{p}: {e}")))?,
        None => corpus::DEFAULT_CORPUS.to_string(),
    };
    let c = corpus::load(&text)?;
    let reports = corpus::verify(&c, seed);
    let human = corpus::render(&reports);
    let failed = reports.iter().filter(|r| !r.passed).count();
    let j = json!({
        "cases": reports,
        "failed": failed,
        "warning": reports.is_empty().then_some("empty corpus"),
    });
    if failed > 0 {
        return Err(Failure::Mismatch(human, j));
    }
    Ok((human, j))
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Nu {
            prime,
            e,
            poly,
            ideal,
            cap,
        } => cmd_nu(*prime, *e, poly, ideal.as_deref(), *cap),
        Command::Fpt(cmd) => cmd_fpt(cmd),
        Command::FrobeniusRoot { prime, e, ideal } => cmd_root(*prime, *e, ideal),
        Command::TestIdeal(cmd) => cmd_test_ideal(cmd),
        Command::MtwScan {
            expr,
            bound,
            filters,
        } => cmd_scan(expr, *bound, filters),
        Command::VerifyCorpus { corpus } => cmd_verify(corpus.as_deref(), cli.seed),
    }
}

fn render_ok(json_mode: bool, human: String, j: Value) -> String {
    if json_mode {
        let mut s = serde_json::to_string_pretty(&j).expect("json renders");
        s.push('\n');
        s
    } else {
        human
    }
}

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let work = || dispatch(&cli);
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(Failure::Lib(Error::Format(format!("--threads: {e}")))),
        },
        None => work(),
    };
    match result {
        Ok((human, j)) => Output {
            code: 0,
            stdout: render_ok(cli.json, human, j),
            stderr: String::new(),
        },
        Err(Failure::Mismatch(human, j)) => Output {
            code: 1,
            stdout: render_ok(cli.json, human, j),
            stderr: String::new(),
        },
        Err(Failure::Lib(e)) => {
            let code = if e.is_input_error() { 3 } else { 2 };
            let stdout = if cli.json {
                let j = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&j).expect("json renders")
                )
            } else {
                String::new()
            };
            Output {
                code,
                stdout,
                stderr: format!("error: {e}\n"),
            }
        }
    }
}
