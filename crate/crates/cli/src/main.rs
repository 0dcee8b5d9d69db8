//! `twisted`: command-line front end for intersection numbers, chambers, contiguity
//! matrices and series checks. Every command writes a single JSON document.
//!
//! Exit codes: 0 success, 2 invalid input or violated precondition, 3 numerical
//! tolerance exceeded.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use twisted_core::arrangement::{all_tuples, Classification, CoeffMatrix, IndexTuple, SpecialMatrix};
use twisted_core::cohomology::{gram_degenerate, gram_generic, basis_degenerate, BasisKind, GramJson, Side};
use twisted_core::contiguity::{ContiguityContext, InversePath, SYMBOLIC_SIZE_LIMIT};
use twisted_core::field::{parse_rat, rat_to_f64, rat_to_text, ParamContext, Rat};
use twisted_core::homology::{
    enumerate_chambers, orth_complement, pairing_degenerate_h, vanishing_chamber, Chamber, LoadedCycle,
    PairingOracle,
};
use twisted_core::series::{bold_s, check_contiguity, random_alpha, series_s, to_f64, SeriesParams};

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "TWISTED_THREADS";

#[derive(Parser)]
#[command(name = "twisted", version, about = "Intersection numbers and contiguity relations for hyperplane arrangements")]
struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a coefficient matrix as generic, one-point degenerate, or other.
    Classify {
        /// Coefficient matrix (JSON `{k, n, rows}` or CSV).
        matrix: PathBuf,
    },
    /// Gram matrix of cohomology intersection numbers.
    Gram(GramArgs),
    /// Chambers of the real arrangement.
    Chambers {
        matrix: PathBuf,
        /// Also report the vanishing chamber and its orthogonal complement for this
        /// vanishing tuple (the matrix must be generic).
        #[arg(long, value_parser = parse_tuple)]
        jvan: Option<IndexTuple>,
    },
    /// Degenerate homology intersection number of two loaded chambers.
    Homology {
        /// Generic coefficient matrix whose chambers carry the cycles.
        matrix: PathBuf,
        /// Pairing table of the generic arrangement.
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long, value_parser = parse_tuple)]
        jvan: IndexTuple,
        /// Chamber on the + side (sign id or a name from the table).
        #[arg(long)]
        left: String,
        /// Chamber on the − side (sign id or a name from the table).
        #[arg(long)]
        right: String,
    },
    /// Contiguity matrix for the shift α ↦ α + e_l − e_{j0}.
    Contiguity(ContiguityArgs),
    /// Evaluate the series vector and check the contiguity relations numerically.
    SeriesCheck(SeriesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Symbolic,
    Evaluated,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum, default_value = "symbolic")]
    mode: Mode,
    /// Seed for a random exact-rational evaluation point.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON array of exponents α_0, …, α_{k+n+1} (or without the last one, which is
    /// then fixed by Σα = 0); entries are integers or rational strings.
    #[arg(long)]
    alpha_file: Option<PathBuf>,
}

#[derive(Args)]
struct GramArgs {
    matrix: PathBuf,
    /// Row family, e.g. `0,1,2;1,2,3` (defaults to every tuple, minus J^van).
    #[arg(long, value_parser = parse_family)]
    rows: Option<Family>,
    /// Column family (defaults to the row family).
    #[arg(long, value_parser = parse_family)]
    cols: Option<Family>,
    /// Degenerate basis as JSON, e.g. `{"kind":"four","p":4,"l":1,"l2":2}`.
    #[arg(long, conflicts_with_all = ["rows", "cols"])]
    basis: Option<String>,
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    eval: EvalArgs,
}

#[derive(Args)]
struct ContiguityArgs {
    /// One-point degenerate coefficient matrix z₀.
    matrix: PathBuf,
    #[arg(long)]
    j0: usize,
    #[arg(long)]
    q: usize,
    #[arg(long)]
    l: usize,
    #[arg(long, value_enum, default_value = "elimination")]
    path: PathArg,
    #[command(flatten)]
    eval: EvalArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Elimination,
    Closed,
}

#[derive(Args)]
struct SeriesArgs {
    /// JSON `{"x": [[x11, x12], [x21, x22]]}` with x11 = 0; entries are numbers or
    /// rational strings; an `"alpha"` array may be included.
    input: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha_file: Option<PathBuf>,
    #[arg(long, default_value_t = 24)]
    truncation: usize,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

struct Failure {
    code: u8,
    message: String,
    /// A result document still worth emitting (e.g. a failed numerical check).
    payload: Option<Value>,
}

fn bad(message: impl Display) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
        payload: None,
    }
}

type Outcome = Result<Value, Failure>;

fn parse_tuple(s: &str) -> Result<IndexTuple, String> {
    let idx = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    IndexTuple::new(idx).map_err(|e| e.to_string())
}

/// A `;`-separated list of tuples.
#[derive(Clone, Debug)]
struct Family(Vec<IndexTuple>);

fn parse_family(s: &str) -> Result<Family, String> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_tuple).collect::<Result<_, _>>().map(Family)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<CoeffMatrix, Failure> {
    let text = read(path)?;
    let m = if text.trim_start().starts_with('{') {
        CoeffMatrix::from_json(&text)
    } else {
        CoeffMatrix::from_csv(&text)
    };
    m.map_err(bad)
}

fn json_rat(v: &Value) -> Result<Rat, Failure> {
    match v {
        Value::String(s) => parse_rat(s).map_err(bad),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rat::from_integer(i.into())),
            None => parse_rat(&n.to_string()).map_err(bad),
        },
        other => Err(bad(format!("expected a rational, found {other}"))),
    }
}

fn rat_array(v: &Value) -> Result<Vec<Rat>, Failure> {
    v.as_array().ok_or_else(|| bad("expected a JSON array"))?.iter().map(json_rat).collect()
}

/// Reads α from a file, completing the last exponent when it is omitted.
fn load_alpha(path: &Path, ctx: &ParamContext) -> Result<Vec<Rat>, Failure> {
    let v: Value = serde_json::from_str(&read(path)?).map_err(bad)?;
    let a = rat_array(&v)?;
    alpha_from(a, ctx)
}

fn alpha_from(a: Vec<Rat>, ctx: &ParamContext) -> Result<Vec<Rat>, Failure> {
    let m = ctx.num_params();
    let a = if a.len() + 1 == m {
        ctx.complete_point(&a)
    } else if a.len() == m {
        a
    } else {
        return Err(bad(format!("expected {} or {} exponents, found {}", m - 1, m, a.len())));
    };
    let sum = a.iter().fold(Rat::from_integer(0.into()), |s, x| s + x);
    if sum != Rat::from_integer(0.into()) {
        return Err(bad("exponents must sum to zero"));
    }
    if a.iter().any(|x| x.is_integer()) {
        return Err(bad("exponents must not be integers"));
    }
    Ok(a)
}

/// Index sets whose exponent sums appear in denominators.
fn avoid_sets(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..k + n + 2).map(|j| vec![j]).collect();
    out.extend(all_tuples(k, n).iter().map(|t| t.as_slice().to_vec()));
    out
}

/// The evaluation point of an evaluated-mode job.
fn eval_point(e: &EvalArgs, ctx: &ParamContext) -> Result<Vec<Rat>, Failure> {
    match (&e.alpha_file, e.seed) {
        (Some(path), _) => load_alpha(path, ctx),
        (None, Some(seed)) => Ok(ctx.random_point(seed, &avoid_sets(ctx.k(), ctx.n()))),
        (None, None) => Err(bad("evaluated mode needs --seed or --alpha-file")),
    }
}

fn text_vec(a: &[Rat]) -> Vec<String> {
    a.iter().map(rat_to_text).collect()
}

fn classification_json(c: &Classification) -> Value {
    serde_json::to_value(c).expect("serializable")
}

fn cmd_classify(matrix: &Path) -> Outcome {
    let z = load_matrix(matrix)?;
    let c = z.classify();
    if let Classification::Other { .. } = c {
        return Err(Failure {
            code: 2,
            message: "the arrangement is neither generic nor one-point degenerate".into(),
            payload: Some(classification_json(&c)),
        });
    }
    Ok(classification_json(&c))
}

fn gram_output(a: &GramArgs) -> Outcome {
    let z = load_matrix(&a.matrix)?;
    let (k, n) = (z.k(), z.n());
    let class = z.classify();
    let jvan = match &class {
        Classification::Generic => None,
        Classification::OneDegenerate { jvan } => Some(jvan.clone()),
        Classification::Other { .. } => return Err(bad("the arrangement is neither generic nor one-point degenerate")),
    };
    let (rows, cols) = if let Some(spec) = &a.basis {
        let kind: BasisKind = serde_json::from_str(spec).map_err(bad)?;
        let jv = jvan.as_ref().ok_or_else(|| bad("degenerate bases need a one-point degenerate matrix"))?;
        let f = basis_degenerate(k, n, jv, kind).map_err(bad)?;
        (f.rows, f.cols)
    } else {
        let rows = a.rows.clone().map(|f| f.0).unwrap_or_else(|| {
            all_tuples(k, n)
                .into_iter()
                .filter(|t| jvan.as_ref().is_none_or(|jv| !t.same_set(jv)))
                .collect()
        });
        let cols = a.cols.clone().map_or_else(|| rows.clone(), |f| f.0);
        (rows, cols)
    };
    for t in rows.iter().chain(&cols) {
        IndexTuple::checked(t.as_slice().to_vec(), k, n).map_err(bad)?;
    }
    let ctx = ParamContext::alpha(k, n);
    let (gram, alpha): (GramJson, Option<Vec<Rat>>) = match a.eval.mode {
        Mode::Symbolic => {
            let p = ctx.params();
            let g = match &jvan {
                None => gram_generic(&p, &rows, &cols),
                Some(jv) => gram_degenerate(&p, &rows, &cols, jv),
            }
            .map_err(bad)?;
            (g.to_json(&ctx), None)
        }
        Mode::Evaluated => {
            let p = eval_point(&a.eval, &ctx)?;
            let g = match &jvan {
                None => gram_generic(&p, &rows, &cols),
                Some(jv) => gram_degenerate(&p, &rows, &cols, jv),
            }
            .map_err(bad)?;
            (g.to_json(), Some(p))
        }
    };
    let mut out = serde_json::json!({
        "classification": classification_json(&class),
        "mode": a.eval.mode,
        "gram": gram,
    });
    if let Some(p) = alpha {
        out["alpha"] = serde_json::json!(text_vec(&p));
    }
    Ok(out)
}

fn gram_csv(g: &GramJson) -> String {
    let mut s = String::new();
    let quote = |x: &str| format!("\"{}\"", x.replace('"', "\"\""));
    let header: Vec<String> = std::iter::once(quote(&format!("2πi^{}", g.two_pi_i_power)))
        .chain(g.cols.iter().map(|c| quote(&c.to_string())))
        .collect();
    s.push_str(&header.join(","));
    s.push('\n');
    for (r, row) in g.rows.iter().zip(&g.entries) {
        let line: Vec<String> = std::iter::once(quote(&r.to_string())).chain(row.iter().map(|e| quote(e))).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct ChamberOut {
    id: String,
    bounded: bool,
    walls: Vec<usize>,
}

impl From<&Chamber> for ChamberOut {
    fn from(c: &Chamber) -> Self {
        ChamberOut {
            id: c.id(),
            bounded: c.bounded,
            walls: c.walls.clone(),
        }
    }
}

fn cmd_chambers(matrix: &Path, jvan: Option<&IndexTuple>) -> Outcome {
    let z = load_matrix(matrix)?;
    let class = z.classify();
    let chambers = enumerate_chambers(&z).map_err(bad)?;
    let list: Vec<ChamberOut> = chambers.iter().map(ChamberOut::from).collect();
    let mut out = serde_json::json!({
        "classification": classification_json(&class),
        "count": chambers.len(),
        "bounded": chambers.iter().filter(|c| c.bounded).count(),
        "chambers": list,
    });
    if let Some(jv) = jvan {
        if class != Classification::Generic {
            return Err(bad("--jvan needs a generic matrix"));
        }
        IndexTuple::checked(jv.as_slice().to_vec(), z.k(), z.n()).map_err(bad)?;
        let dv = vanishing_chamber(&chambers, jv).map_err(bad)?;
        let oc = orth_complement(&z, &chambers, &dv, jv).map_err(bad)?;
        out["vanishing"] = serde_json::json!({
            "chamber": ChamberOut::from(&dv),
            "chart": oc.chart,
            "perp": oc.perp.iter().map(|c| c.id()).collect::<Vec<_>>(),
            "exceptional": oc.exceptional.id(),
        });
    }
    Ok(out)
}

fn cmd_homology(matrix: &Path, oracle: &Path, jvan: &IndexTuple, left: &str, right: &str) -> Outcome {
    let z = load_matrix(matrix)?;
    if z.classify() != Classification::Generic {
        return Err(bad("the cycles live on a generic arrangement"));
    }
    let oracle = PairingOracle::from_json(&read(oracle)?).map_err(bad)?;
    let chambers = enumerate_chambers(&z).map_err(bad)?;
    let dv = vanishing_chamber(&chambers, jvan).map_err(bad)?;
    let find = |name: &str| -> Result<Chamber, Failure> {
        let id = oracle.named(name).unwrap_or(name);
        chambers
            .iter()
            .find(|c| c.id() == id)
            .cloned()
            .ok_or_else(|| bad(format!("no chamber {name}")))
    };
    let (a, b) = (find(left)?, find(right)?);
    let v = pairing_degenerate_h(&LoadedCycle::new(a.clone(), Side::Plus), &LoadedCycle::new(b.clone(), Side::Minus), &dv, &oracle)
        .map_err(bad)?;
    Ok(serde_json::json!({
        "vanishing": dv.id(),
        "left": a.id(),
        "right": b.id(),
        "value": oracle.context().format(&v),
    }))
}

fn cmd_contiguity(a: &ContiguityArgs) -> Outcome {
    let z0 = load_matrix(&a.matrix)?;
    let ctx = ContiguityContext::new(z0, a.j0, a.q, a.l).map_err(bad)?;
    let pc = ParamContext::alpha(ctx.k(), ctx.n());
    let path = match a.path {
        PathArg::Elimination => InversePath::Elimination,
        PathArg::Closed => InversePath::Closed,
    };
    let mut out = serde_json::json!({
        "jvan": ctx.jvan(),
        "j0": ctx.j0(),
        "q": ctx.q(),
        "l": ctx.l(),
        "path": path,
        "mode": a.eval.mode,
    });
    match a.eval.mode {
        Mode::Symbolic => {
            let size = ctx.base_family().len();
            if size > SYMBOLIC_SIZE_LIMIT {
                return Err(bad(format!(
                    "symbolic contiguity is limited to size {SYMBOLIC_SIZE_LIMIT} (this basis has {size}); use --mode evaluated"
                )));
            }
            let m = ctx.conti_matrix(&pc.params(), path).map_err(bad)?;
            out["matrix"] = serde_json::to_value(m.to_json(&pc)).expect("serializable");
        }
        Mode::Evaluated => {
            let p = eval_point(&a.eval, &pc)?;
            let m = ctx.conti_matrix(&p, path).map_err(bad)?;
            out["alpha"] = serde_json::json!(text_vec(&p));
            out["matrix"] = serde_json::to_value(m.to_json()).expect("serializable");
        }
    }
    Ok(out)
}

fn cmd_series_check(a: &SeriesArgs) -> Outcome {
    let input: Value = serde_json::from_str(&read(&a.input)?).map_err(bad)?;
    let x: Vec<Vec<Rat>> = input["x"]
        .as_array()
        .ok_or_else(|| bad("input needs an \"x\" matrix"))?
        .iter()
        .map(rat_array)
        .collect::<Result<_, _>>()?;
    let ctx = ParamContext::alpha(2, 2);
    let alpha = match (&a.alpha_file, input.get("alpha"), a.seed) {
        (Some(path), _, _) => load_alpha(path, &ctx)?,
        (None, Some(v), _) => alpha_from(rat_array(v)?, &ctx)?,
        (None, None, Some(seed)) => random_alpha(2, 2, seed),
        (None, None, None) => return Err(bad("series-check needs --seed, --alpha-file or an \"alpha\" entry")),
    };
    let special = SpecialMatrix::new(x.clone()).map_err(bad)?;
    if x.len() != 2 || x.iter().any(|r| r.len() != 2) || !x[0][0].eq(&Rat::from_integer(0.into())) {
        return Err(bad("series-check supports 2×2 matrices x with x11 = 0"));
    }
    let z0 = special.coeff();
    let params = SeriesParams {
        k: 2,
        n: 2,
        alpha: to_f64(&alpha),
        x: x.iter().map(|r| to_f64(r)).collect(),
        zero_cell: Some((1, 1)),
        truncation: a.truncation,
        radius: 0.25,
    };
    let s = series_s(&params).map_err(bad)?;
    let v = bold_s(&params).map_err(bad)?;
    let mut residuals = Vec::new();
    let mut worst = 0.0f64;
    for l in 1..=5 {
        let ctx = ContiguityContext::new(z0.clone(), 0, 5, l).map_err(bad)?;
        let conti = ctx.conti_matrix(&alpha, InversePath::Elimination).map_err(bad)?;
        let c: Vec<Vec<f64>> = conti.entries.to_rows().iter().map(|r| r.iter().map(rat_to_f64).collect()).collect();
        let r = check_contiguity(&params, l, &c).map_err(bad)?;
        worst = worst.max(r);
        residuals.push(serde_json::json!({"l": l, "residual": r}));
    }
    let out = serde_json::json!({
        "alpha": text_vec(&alpha),
        "truncation": a.truncation,
        "s": s.value,
        "tail": s.tail,
        "bold_s": v,
        "residuals": residuals,
        "max_residual": worst,
        "tolerance": a.tolerance,
        "pass": worst < a.tolerance,
    });
    if worst >= a.tolerance {
        return Err(Failure {
            code: 3,
            message: format!("max residual {worst:e} exceeds the tolerance {:e}", a.tolerance),
            payload: Some(out),
        });
    }
    Ok(out)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| bad(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(bad)?;
    }
    match render(cli) {
        Ok(text) => emit(&text, cli.output.as_deref()),
        Err(mut f) => {
            if let Some(v) = f.payload.take() {
                emit(&pretty(v), cli.output.as_deref())?;
            }
            Err(f)
        }
    }
}

fn render(cli: &Cli) -> Result<String, Failure> {
    let text = match &cli.command {
        Command::Classify { matrix } => pretty(cmd_classify(matrix)?),
        Command::Gram(a) => {
            let out = gram_output(a)?;
            if a.csv {
                let g: GramJson = serde_json::from_value(out["gram"].clone()).expect("gram output");
                gram_csv(&g)
            } else {
                pretty(out)
            }
        }
        Command::Chambers { matrix, jvan } => pretty(cmd_chambers(matrix, jvan.as_ref())?),
        Command::Homology { matrix, oracle, jvan, left, right } => pretty(cmd_homology(matrix, oracle, jvan, left, right)?),
        Command::Contiguity(a) => pretty(cmd_contiguity(a)?),
        Command::SeriesCheck(a) => pretty(cmd_series_check(a)?),
    };
    Ok(text)
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
