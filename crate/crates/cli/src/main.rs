//! `gkzslopes`: Gröbner bases, Newton polygons and slopes of Weyl-algebra
//! ideals, plus the GKZ monomial-curve toolbox.
//!
//! Exit status: 0 on success, 1 when a computation fails (budget exhausted,
//! hypothesis violated), 2 on a usage or input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gkz_slopes::groebner::buchberger_with_budget;
use gkz_slopes::microchar::slopes_with_preprocessing_with;
use gkz_slopes::newton::newton_polygon;
use gkz_slopes::slopes::{acg_slopes_with, Options};
use gkz_slopes::solutions::{convergent_series_basis, formal_series, is_reducible, polynomial_solution};
use gkz_slopes::{
    parse_rational, CompositeOrder, Error, GkzSystem, SlopeReport, TermOrder, WeightVector, WeylIdeal, WeylPoly, Q,
};

/// Environment variable overriding the per-computation reduction budget.
const BUDGET_ENV: &str = "GKZSLOPES_BUDGET";
const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "gkzslopes", version, about = "Slopes of D-modules along coordinate hyperplanes")]
struct Cli {
    /// Reduction steps allowed per Gröbner basis computation.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gröbner basis for a weight vector refined by a term order.
    Gb(GbArgs),
    /// Newton polygons of operators along a coordinate hyperplane.
    Newton(NewtonArgs),
    /// Algebraic and geometric slopes along `x_k = 0`.
    Slopes(SlopesArgs),
    /// Tasks on the GKZ system of a monomial curve.
    Gkz(GkzArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Tiebreak {
    Grevlex,
}

#[derive(Args, Debug)]
struct GbArgs {
    /// Ideal file: one operator per line, `#` comments.
    #[arg(long)]
    ideal: PathBuf,
    /// Weight `(u, v)` as 2n comma-separated integers.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    weight: Vec<i64>,
    /// Second weight breaking ties of the first, e.g. the `V`-filtration.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    refine: Option<Vec<i64>>,
    #[arg(long, value_enum, default_value = "grevlex")]
    tiebreak: Tiebreak,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct NewtonArgs {
    #[arg(long, conflicts_with = "op", required_unless_present = "op")]
    ideal: Option<PathBuf>,
    /// A single operator, e.g. `x1^3*Dx1+2`.
    #[arg(long)]
    op: Option<String>,
    /// Distinguished variable, e.g. `x1`.
    #[arg(long)]
    var: String,
    /// Emit an SVG drawing instead of the listing.
    #[arg(long)]
    svg: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// Exponent vector `(1, a_2, ..., a_n)`.
    #[arg(long = "A", value_delimiter = ',')]
    a: Option<Vec<u32>>,
    /// Parameter, `p` or `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
}

#[derive(Args, Debug)]
struct SlopesArgs {
    #[arg(long, conflicts_with = "a")]
    ideal: Option<PathBuf>,
    #[command(flatten)]
    system: SystemArgs,
    /// Distinguished variable; defaults to the last one.
    #[arg(long)]
    var: Option<String>,
    /// Reduce variables of GKZ input first.
    #[arg(long)]
    preprocess: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Include the per-weight trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GkzTask {
    Slopes,
    Charvar,
    Restrict,
    ClosedForm,
    Solve,
    Reducible,
}

#[derive(Args, Debug)]
struct GkzArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, value_enum)]
    task: GkzTask,
    /// Truncation order for series solutions.
    #[arg(long, default_value_t = 6)]
    order: u32,
    /// Variable deleted by `restrict` (1-based, at least 2).
    #[arg(long)]
    index: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Why a run failed; decides the exit status.
enum Failure {
    Usage(String),
    Computation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) | Error::Hypothesis(_) => Failure::Computation(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("computation failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn budget(flag: Option<u64>) -> Run<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| Failure::Usage(format!("{BUDGET_ENV} must be a nonnegative integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn run(cli: Cli) -> Run<String> {
    let budget = budget(cli.budget)?;
    match cli.command {
        Command::Gb(a) => run_gb(a, budget),
        Command::Newton(a) => run_newton(a),
        Command::Slopes(a) => run_slopes(a, budget),
        Command::Gkz(a) => run_gkz(a, budget),
    }
}

fn read_file(path: &Path) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Largest variable index mentioned in operator text, comments excluded.
fn max_index(text: &str) -> usize {
    let mut best = 0;
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i] == 'x' {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if let Ok(k) = chars[start..j].iter().collect::<String>().parse::<usize>() {
                    best = best.max(k);
                }
                i = j.max(i + 1);
            } else {
                i += 1;
            }
        }
    }
    best
}

/// `xk` to `k`.
fn parse_var(var: &str) -> Run<usize> {
    var.strip_prefix('x')
        .and_then(|k| k.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| Failure::Usage(format!("variable must look like x1, x2, ...; got {var:?}")))
}

fn check_var(k: usize, n: usize) -> Run<()> {
    if k > n {
        return Err(Failure::Usage(format!("variable x{k} outside x1..x{n}")));
    }
    Ok(())
}

fn system(args: &SystemArgs) -> Run<GkzSystem> {
    let a = args.a.clone().ok_or_else(|| Failure::Usage("--A is required".into()))?;
    let beta = args.beta.as_deref().ok_or_else(|| Failure::Usage("--beta is required".into()))?;
    let beta = parse_rational(beta)?;
    Ok(GkzSystem::new(a, beta)?)
}

fn strs(v: &[Q]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn set(v: &[Q]) -> String {
    format!("{{{}}}", strs(v).join(", "))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn run_gb(args: GbArgs, budget: u64) -> Run<String> {
    let text = read_file(&args.ideal)?;
    if !args.weight.len().is_multiple_of(2) || args.weight.is_empty() {
        return Err(Failure::Usage("--weight needs 2n integers".into()));
    }
    let n = args.weight.len() / 2;
    if max_index(&text) > n {
        return Err(Failure::Usage(format!("the ideal mentions variables beyond x{n}")));
    }
    let ideal = WeylIdeal::parse(&text, n)?;
    let w = WeightVector::from_flat(&args.weight)?;
    let tiebreak = match args.tiebreak {
        Tiebreak::Grevlex => TermOrder::weyl_default(n),
    };
    let refine = args.refine.as_deref().map(WeightVector::from_flat).transpose()?;
    let order = CompositeOrder::new(w.clone(), refine, tiebreak)?;
    let g = buchberger_with_budget(&ideal, &order, budget)?;
    let lms = g.leading_monomials();
    match args.format {
        Format::Text => {
            let mut out = String::new();
            for e in &g.elements {
                writeln!(out, "{e}").unwrap();
            }
            Ok(out)
        }
        Format::Json => {
            let mut elements = Vec::new();
            for (e, m) in g.elements.iter().zip(&lms) {
                let lm = WeylPoly::term(n, m.clone(), Q::from_integer(1.into()));
                elements.push(json!({
                    "operator": e.to_string(),
                    "leading_monomial": lm.to_string(),
                    "weight": w.weight_of(m)?,
                }));
            }
            Ok(to_json(&json!({
                "command": "gb",
                "n": n,
                "weight": args.weight,
                "refine": args.refine,
                "tiebreak": order.tiebreak.name(),
                "basis": elements,
            })))
        }
    }
}

fn run_newton(args: NewtonArgs) -> Run<String> {
    let k = parse_var(&args.var)?;
    let (text, ops): (String, Vec<String>) = match (&args.op, &args.ideal) {
        (Some(op), _) => (op.clone(), vec![op.clone()]),
        (None, Some(path)) => {
            let t = read_file(path)?;
            let ops = t
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
                .filter(|l| !l.is_empty())
                .collect();
            (t, ops)
        }
        (None, None) => return Err(Failure::Usage("give --op or --ideal".into())),
    };
    let n = max_index(&text).max(k);
    let mut polys = Vec::new();
    for op in &ops {
        let p = WeylPoly::parse(op, n)?;
        polys.push((p.to_string(), newton_polygon(&p, k)?));
    }
    if args.svg {
        let mut out = String::new();
        for (_, poly) in &polys {
            out.push_str(&poly.to_svg());
            if !out.ends_with('\n') {
                out.push('\n');
            }
        }
        return Ok(out);
    }
    match args.format {
        Format::Text => {
            let mut out = String::new();
            for (op, poly) in &polys {
                writeln!(out, "operator: {op}").unwrap();
                let vs: Vec<String> = poly.vertices.iter().map(|(f, v)| format!("({f}, {v})")).collect();
                writeln!(out, "vertices: {}", vs.join(" ")).unwrap();
                writeln!(out, "slopes: {}", set(&poly.slopes())).unwrap();
            }
            Ok(out)
        }
        Format::Json => {
            let items: Vec<Value> = polys
                .iter()
                .map(|(op, poly)| {
                    json!({
                        "operator": op,
                        "vertices": poly.vertices,
                        "slopes": strs(&poly.slopes()),
                    })
                })
                .collect();
            Ok(to_json(&json!({ "command": "newton", "along": format!("x{k}"), "polygons": items })))
        }
    }
}

fn slope_output(report: &SlopeReport, format: Format, trace: bool) -> Run<String> {
    let out = match format {
        Format::Text => {
            let mut s = report.to_string();
            if trace {
                for t in &report.trace {
                    let slope = t.slope.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-".into());
                    writeln!(
                        s,
                        "weight {:?} (p={}, q={}): basis {}, slope {slope}, algebraic {:?}, geometric {:?}",
                        t.weight, t.p, t.q, t.basis_size, t.algebraic, t.geometric
                    )
                    .unwrap();
                }
                if let Some(pre) = &report.preprocessing {
                    writeln!(s, "preprocessing: {}", pre.note).unwrap();
                }
            }
            s
        }
        Format::Json => {
            let mut v = serde_json::to_value(report).expect("reports serialize");
            let obj = v.as_object_mut().expect("report is an object");
            if !trace {
                obj.remove("trace");
                obj.remove("preprocessing");
            }
            obj.insert("command".into(), json!("slopes"));
            to_json(&v)
        }
    };
    if !report.complete {
        // the partial report still goes out; the status flags the failure
        print!("{out}");
        return Err(Failure::Computation(report.failure.clone().unwrap_or_else(|| "incomplete".into())));
    }
    Ok(out)
}

fn slopes_of(ideal: &WeylIdeal, k: usize, preprocess: bool, budget: u64) -> Run<SlopeReport> {
    let opts = Options { budget };
    Ok(if preprocess { slopes_with_preprocessing_with(ideal, k, &opts)? } else { acg_slopes_with(ideal, k, &opts)? })
}

fn run_slopes(args: SlopesArgs, budget: u64) -> Run<String> {
    let k = args.var.as_deref().map(parse_var).transpose()?;
    let ideal = match &args.ideal {
        Some(path) => {
            let text = read_file(path)?;
            let n = max_index(&text).max(k.unwrap_or(0));
            WeylIdeal::parse(&text, n)?
        }
        None => system(&args.system)?.ideal(),
    };
    let n = ideal.n();
    let k = k.unwrap_or(n);
    check_var(k, n)?;
    let report = slopes_of(&ideal, k, args.preprocess, budget)?;
    slope_output(&report, args.format, args.trace)
}

fn run_gkz(args: GkzArgs, budget: u64) -> Run<String> {
    let sys = system(&args.system)?;
    let n = sys.n();
    let base = json!({ "command": "gkz", "A": sys.a(), "beta": sys.beta().to_string() });
    let with = |task: &str, fields: Value| -> Value {
        let mut v = base.clone();
        let obj = v.as_object_mut().expect("object");
        obj.insert("task".into(), json!(task));
        for (key, val) in fields.as_object().expect("object") {
            obj.insert(key.clone(), val.clone());
        }
        v
    };
    let json_out = args.format == Format::Json;
    match args.task {
        GkzTask::Slopes => {
            let report = slopes_of(&sys.ideal(), n, false, budget)?;
            if json_out {
                return Ok(to_json(&with(
                    "slopes",
                    json!({
                        "algebraic_slopes": strs(&report.algebraic_slopes),
                        "geometric_slopes": strs(&report.geometric_slopes),
                        "complete": report.complete,
                    }),
                )));
            }
            slope_output(&report, Format::Text, false)
        }
        GkzTask::Charvar => {
            let holds = sys.characteristic_variety_check()?;
            if json_out {
                return Ok(to_json(&with("charvar", json!({ "holds": holds }))));
            }
            let mut gens: Vec<String> = (1..n).map(|i| format!("xi{i}")).collect();
            gens.push(format!("x{n}*xi{n}"));
            Ok(format!("radical of in_F(H) = <{}>: {holds}\n", gens.join(", ")))
        }
        GkzTask::Restrict => {
            let i = args.index.unwrap_or(n.saturating_sub(1).max(2));
            let r = sys.restrict(i)?;
            if json_out {
                return Ok(to_json(&with("restrict", json!({ "index": i, "restricted_A": r.a() }))));
            }
            Ok(format!("{r}\n"))
        }
        GkzTask::ClosedForm => {
            let s = sys.closed_form_slopes();
            if json_out {
                return Ok(to_json(&with("closed-form", json!({ "geometric_slopes": strs(&s) }))));
            }
            Ok(format!("{}\n", set(&s)))
        }
        GkzTask::Solve => solve(&sys, args.order, json_out, with),
        GkzTask::Reducible => {
            let r = is_reducible(&sys)?;
            if json_out {
                return Ok(to_json(&with("reducible", json!({ "reducible": r.reducible, "witness": r.witness }))));
            }
            Ok(format!("reducible: {}\n", r.reducible))
        }
    }
}

/// Polynomial solution when `beta` is natural, otherwise a truncated series
/// basis (convergent when the hypothesis holds, one formal series if not).
fn solve(sys: &GkzSystem, order: u32, json_out: bool, with: impl Fn(&str, Value) -> Value) -> Run<String> {
    if let Some(p) = polynomial_solution(sys)? {
        if json_out {
            return Ok(to_json(&with("solve", json!({ "kind": "polynomial", "solutions": [p.to_string()] }))));
        }
        return Ok(format!("{p}\n"));
    }
    let (kind, series) = match convergent_series_basis(sys, order) {
        Ok(basis) => ("convergent", basis),
        Err(Error::Hypothesis(_)) => ("formal", vec![formal_series(sys, order)]),
        Err(e) => return Err(e.into()),
    };
    if json_out {
        let items: Vec<String> = series.iter().map(|s| s.to_string()).collect();
        return Ok(to_json(&with("solve", json!({ "kind": kind, "order": order, "solutions": items }))));
    }
    let mut out = String::new();
    for s in &series {
        writeln!(out, "{s}").unwrap();
    }
    Ok(out)
}
