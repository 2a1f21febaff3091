use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use z4ap::bounds::{compute_gamma, corollary_bound, entropy_table, finite_bound, theorem_bound};
use z4ap::cosets::{build_b_and_c, replay_proposition, rich_coset_report};
use z4ap::field::{FieldPointSet, Fp};
use z4ap::lemma::{half_degree_dimension, independence_witness, largest_vanishing_difference_set, report_from_certificate, LemmaCertificate};
use z4ap::poly::MultilinearPoly;
use z4ap::precision::{precision_digits, PRECISION_ENV};
use z4ap::search::{search, Method, DEFAULT_BUDGET};
use z4ap::setfile::{parse_field_points, read_set, write_set};
use z4ap::verify::verify_set;
use z4ap::{Epsilon, Error};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "z4ap", version, about = "Checks and searches for progression-free sets in Z_4^n")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalOpts {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format (entropy-table defaults to csv, everything else to json).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Leave the timestamp out of the output header.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Decimal digits for high-precision fallbacks.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Exhaustive,
    Bnb,
    Greedy,
    Restart,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Exhaustive => Method::Exhaustive,
            MethodArg::Bnb => Method::BranchAndBound,
            MethodArg::Greedy => Method::Greedy,
            MethodArg::Restart => Method::RandomRestart,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Maximize (H(1/2 - e) + H(2e)) / 2 over (0, 1/4).
    Gamma(GammaArgs),
    /// Size bounds for Z_4^n and, optionally, a general finite abelian group.
    Bound(BoundArgs),
    /// Sweep of the binomial-sum entropy estimate.
    EntropyTable(EntropyTableArgs),
    /// Search for a large progression-free set.
    Search(SearchArgs),
    /// Run every check on a set file.
    Verify(VerifyArgs),
    /// Rich-coset report for a set file.
    Cosets(CosetsArgs),
    /// Build the rank certificate for a polynomial and a point set.
    LemmaDemo(LemmaDemoArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GammaArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundArgs {
    #[arg(long)]
    pub n: usize,
    /// Invariant factors m_1 | m_2 | ... as a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyTableArgs {
    #[arg(long)]
    pub max_n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Node limit for exact methods, move limit for restart.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Also write the witness to this set file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub file: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CosetsArgs {
    #[arg(long)]
    pub file: PathBuf,
    /// Epsilon in (0, 1/4), as `p/q` or a decimal.
    #[arg(long)]
    pub eps: Epsilon,
    /// Include a step-by-step replay of the rich-coset argument.
    #[arg(long)]
    pub replay: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct LemmaDemoArgs {
    /// Variable count for a random polynomial.
    #[arg(long)]
    pub n: Option<usize>,
    /// Declared degree bound (defaults to min(2, n) for random polynomials,
    /// the actual degree otherwise).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Polynomial in text format instead of a random one.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    /// Points of F_p^n instead of a random sample.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Size of the random sample (defaults to 2m + 1).
    #[arg(long)]
    pub size: Option<usize>,
    /// Use the largest set whose differences are all zeros of P (p = 2, n <= 6).
    #[arg(long, conflicts_with_all = ["points", "size"])]
    pub difference_set: bool,
    /// Write the polynomial here in text format.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Write the Gram matrix here as CSV.
    #[arg(long)]
    pub gram_csv: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gamma(_) => "gamma",
            Command::Bound(_) => "bound",
            Command::EntropyTable(_) => "entropy-table",
            Command::Search(_) => "search",
            Command::Verify(_) => "verify",
            Command::Cosets(_) => "cosets",
            Command::LemmaDemo(_) => "lemma-demo",
        }
    }
}

struct Outcome {
    result: Value,
    /// Check failure: exit 1.
    failed: bool,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn fresh_seed() -> u64 {
    rand::random()
}

fn run_command(cmd: &mut Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Gamma(a) => {
            let g = compute_gamma(a.tol)?;
            let result = json!({
                "gamma": g.gamma,
                "eps_star": g.eps_star,
                "tolerance": a.tol,
                "tolerance_achieved": g.tolerance_achieved,
                "iterations": g.iterations,
            });
            Ok(Outcome { result, failed: false })
        }
        Command::Bound(a) => {
            let mut result = json!({
                "n": a.n,
                "theorem": theorem_bound(a.n),
                "finite": finite_bound(a.n),
            });
            if !a.factors.is_empty() {
                result["corollary"] = to_value(&corollary_bound(&a.factors)?);
            }
            Ok(Outcome { result, failed: false })
        }
        Command::EntropyTable(a) => {
            let rows = entropy_table(a.max_n);
            let failed = rows.iter().any(|r| !r.holds);
            Ok(Outcome { result: to_value(&rows), failed })
        }
        Command::Search(a) => {
            let method: Method = a.method.into();
            if method.is_randomized() && a.seed.is_none() {
                a.seed = Some(fresh_seed());
            }
            let budget = a.budget.unwrap_or(match method {
                Method::Greedy => 1,
                Method::RandomRestart => 10_000,
                _ => DEFAULT_BUDGET,
            });
            a.budget = Some(budget);
            let r = search(a.n, method, a.seed, budget)?;
            if let Some(path) = &a.out {
                let note = format!("{} n={} size={} exact={}", r.method, r.n, r.best_size, r.exact);
                write_set(path, &r.witness, &[note])?;
            }
            let result = to_value(&r);
            Ok(Outcome { result, failed: false })
        }
        Command::Verify(a) => {
            let r = verify_set(&read_set(&a.file)?);
            Ok(Outcome { failed: !r.ok, result: to_value(&r) })
        }
        Command::Cosets(a) => {
            let set = read_set(&a.file)?;
            let report = rich_coset_report(&set, a.eps);
            let decomp = set.coset_decompose();
            let all: Vec<usize> = (0..decomp.parts.len()).collect();
            let disjointness_ok = build_b_and_c(&decomp, &all).is_disjoint();
            let witness = set.find_progression();
            let mut result = json!({
                "n": report.n,
                "epsilon": report.epsilon,
                "progression_free": witness.is_none(),
                "threshold": report.threshold,
                "threshold_log2": report.threshold_log2,
                "rich_count": report.rich_count,
                "bound": report.bound,
                "bound_log2": report.bound_log2,
                "vacuous": report.vacuous,
                "holds": report.holds,
                "high_precision": report.high_precision,
                "disjointness_ok": disjointness_ok,
            });
            let mut failed = witness.is_some() || !report.holds || !disjointness_ok;
            if let Some(p) = &witness {
                result["witness"] = json!([p.a.to_string(), p.b.to_string(), p.c.to_string()]);
            } else if a.replay {
                let trace = replay_proposition(&set, a.eps)?;
                failed |= !trace.all_ok;
                result["trace"] = to_value(&trace);
            }
            Ok(Outcome { result, failed })
        }
        Command::LemmaDemo(a) => lemma_demo(a),
    }
}

fn random_points(field: Fp, n: usize, size: usize, rng: &mut ChaCha8Rng) -> Result<FieldPointSet, Error> {
    let p = field.modulus() as u64;
    let total = p.checked_pow(n as u32).filter(|&t| t <= 1 << 24).ok_or(Error::TooLarge {
        requested: (p as u128).saturating_pow(n as u32),
        cap: 1 << 24,
    })?;
    let size = size.min(total as usize);
    let picks = rand::seq::index::sample(rng, total as usize, size);
    let pts = picks.into_iter().map(|mut idx| {
        let mut v = vec![0u32; n];
        for c in v.iter_mut() {
            *c = (idx as u64 % p) as u32;
            idx /= p as usize;
        }
        v
    });
    FieldPointSet::new(field, n, pts)
}

fn lemma_demo(a: &mut LemmaDemoArgs) -> Result<Outcome, Error> {
    let field = Fp::new(a.p)?;
    let needs_seed = a.poly.is_none() || (a.points.is_none() && !a.difference_set);
    if needs_seed && a.seed.is_none() {
        a.seed = Some(fresh_seed());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(0));
    let poly = match &a.poly {
        Some(path) => {
            let p = MultilinearPoly::from_text(&std::fs::read_to_string(path)?)?;
            if p.field() != field {
                return Err(Error::InvalidPrime(p.field().modulus()));
            }
            if let Some(n) = a.n.filter(|&n| n != p.num_vars()) {
                return Err(Error::DimensionMismatch { expected: n, found: p.num_vars() });
            }
            p
        }
        None => {
            let n = a.n.ok_or(Error::Domain { what: "lemma-demo", value: "--n or --poly required".into() })?;
            MultilinearPoly::random(field, n, a.d.unwrap_or(2.min(n)), &mut rng)?
        }
    };
    let n = poly.num_vars();
    let d = a.d.unwrap_or(if a.poly.is_some() { poly.degree() } else { 2.min(n) });
    let two_m = usize::try_from(half_degree_dimension(n, d) * 2u32).unwrap_or(usize::MAX);
    let points = if let Some(path) = &a.points {
        parse_field_points(&std::fs::read_to_string(path)?, field)?
    } else if a.difference_set {
        FieldPointSet::from_masks(n, largest_vanishing_difference_set(&poly)?)
    } else {
        random_points(field, n, a.size.unwrap_or(two_m.saturating_add(1)), &mut rng)?
    };
    let cert = LemmaCertificate::build(&poly, &points, d)?;
    let report = report_from_certificate(&cert);
    if let Some(path) = &a.dump {
        std::fs::write(path, poly.to_text())?;
    }
    if let Some(path) = &a.gram_csv {
        std::fs::write(path, cert.gram_csv())?;
    }
    let diagonal_nonzero = (0..cert.size()).filter(|&i| cert.gram[i][i] != 0).count();
    let result = json!({
        "poly": poly.to_text(),
        "p_at_zero": cert.p_at_zero,
        "report": to_value(&report),
        "gram": {
            "size": cert.size(),
            "diagonal_nonzero": diagonal_nonzero,
            "offdiagonal_nonzero": cert.offdiagonal_nonzero_count(),
            "first_offdiagonal_nonzero": cert.first_offdiagonal_nonzero(),
        },
        "independence": independence_witness(&cert).ok().map(|w| to_value(&w)),
    });
    Ok(Outcome { result, failed: !report.consistent })
}

fn envelope(cmd: &Command, global: &GlobalOpts, format: Format, result: Value) -> Value {
    let mut config = match to_value(cmd) {
        Value::Object(mut m) => m.remove(cmd.name()).unwrap_or(Value::Null),
        other => other,
    };
    if let Value::Object(m) = &mut config {
        m.insert("format".into(), to_value(&format));
        m.insert("precision".into(), json!(precision_digits()));
    }
    let mut env = Map::new();
    env.insert("schema".into(), json!(SCHEMA_VERSION));
    env.insert("command".into(), json!(cmd.name()));
    env.insert("config".into(), config);
    if !global.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        env.insert("timestamp".into(), json!(secs));
    }
    env.insert("result".into(), result);
    Value::Object(env)
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

fn render_csv(doc: &Value) -> String {
    let mut out = String::new();
    for key in ["schema", "command", "timestamp"] {
        if let Some(v) = doc.get(key) {
            out.push_str(&format!("# {key}: {}\n", scalar_text(v)));
        }
    }
    out.push_str(&format!("# config: {}\n", doc["config"]));
    let rows: Vec<&Value> = match &doc["result"] {
        Value::Array(items) => items.iter().collect(),
        other => vec![other],
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header_done = false;
    for row in rows {
        let mut cells = Vec::new();
        flatten("", row, &mut cells);
        if !header_done {
            w.write_record(cells.iter().map(|(k, _)| k.as_str())).expect("in-memory write");
            header_done = true;
        }
        w.write_record(cells.iter().map(|(_, v)| v.as_str())).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
    out
}

fn render_text(doc: &Value) -> String {
    let mut cells = Vec::new();
    flatten("", doc, &mut cells);
    cells.into_iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}

pub fn run(cli: Cli) -> ExitCode {
    let Cli { global, mut command } = cli;
    if let Some(p) = global.precision {
        if p == 0 {
            eprintln!("error: --precision must be positive");
            return ExitCode::from(2);
        }
        // set before any worker thread exists
        std::env::set_var(PRECISION_ENV, p.to_string());
    }
    if let Some(t) = global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let format = global.format.unwrap_or(match command {
        Command::EntropyTable(_) => Format::Csv,
        _ => Format::Json,
    });
    let outcome = match run_command(&mut command) {
        Ok(o) => o,
        Err(e @ Error::NotProgressionFree(..)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = envelope(&command, &global, format, outcome.result);
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("json") + "\n",
        Format::Csv => render_csv(&doc),
        Format::Text => render_text(&doc),
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(2);
    }
    if outcome.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
