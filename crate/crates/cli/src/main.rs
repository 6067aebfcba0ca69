use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cyclesets::classify::{
    brute_force_enumerate, classify_cyclic_prime_power, classify_pq, enumerate_specs, SearchConfig, SearchMode,
    DEFAULT_MAX_CANDIDATES,
};
use cyclesets::construct::{
    build_elementary_abelian, build_p2_level2, build_prime_power, lemma2_functions, trivial_cycle_set, CyclicBuildSpec,
    DynamicalCocycle,
};
use cyclesets::cycleset::{validate, CycleSet, Solution, TableJson, ValidationError};
use cyclesets::{arith, Permutation};

#[derive(Parser)]
#[command(name = "cyclesets", version, about = "Construct, validate and classify finite cycle sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Write output here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Human-readable output; tables are printed row by row in cycle notation.
    #[arg(long)]
    pretty: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a table and report its invariants.
    Verify {
        /// Table JSON (`{"n", "table"}` or a bare array); '-' reads standard input.
        #[arg(short, long, default_value = "-")]
        input: String,
        #[command(flatten)]
        io: Io,
    },
    /// Build a cycle set from a named family or a JSON description.
    Build {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        /// p-cycle for elementary-abelian, e.g. "(0 2 1)"; defaults to (0 1 .. p-1).
        #[arg(long)]
        alpha: Option<String>,
        /// Spec JSON for prime-power, cocycle JSON for extension.
        #[arg(short, long)]
        input: Option<String>,
        #[command(flatten)]
        io: Io,
    },
    /// Print the retraction tower.
    Retract {
        #[arg(short, long, default_value = "-")]
        input: String,
        #[command(flatten)]
        io: Io,
    },
    /// Convert a table to its solution, or a solution back with --invert.
    Solution {
        #[arg(short, long, default_value = "-")]
        input: String,
        #[arg(long)]
        invert: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Search for an isomorphism between two tables.
    Iso {
        /// Exactly two tables.
        #[arg(short, long, num_args = 1, required = true)]
        input: Vec<String>,
        #[command(flatten)]
        io: Io,
    },
    /// Classify indecomposable cycle sets of size pq (with --q) or p^k with cyclic group (with --k).
    Classify {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
        budget: u64,
        #[command(flatten)]
        io: Io,
    },
    /// Enumerate raw tables (full, regular-abelian) or constructed specs (spec).
    Enumerate {
        /// Size; for spec mode give --p and --k instead.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "regular-abelian")]
        mode: SearchMode,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
        budget: u64,
        /// Print counts only.
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        io: Io,
    },
    /// List the bijections f of Z/p with f(0) = 0 and f(i+1) + f(j) = f(i) + f(j+1).
    Lemma2 {
        #[arg(long)]
        p: usize,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Trivial,
    P2Level2,
    ElementaryAbelian,
    PrimePower,
    Extension,
}

/// How a command failed: a mathematical rejection (exit 1) or bad usage/IO (exit 2).
enum Failure {
    Rejected(Value),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn reject(v: Value) -> Failure {
    Failure::Rejected(v)
}

/// What a command prints: JSON by default, `text` under --pretty.
struct Output {
    json: Value,
    text: Option<String>,
}

impl Output {
    fn json<T: Serialize>(v: &T) -> Result<Output, Failure> {
        Ok(Output { json: serde_json::to_value(v).map_err(anyhow::Error::from)?, text: None })
    }
}

fn read_input(source: &str) -> anyhow::Result<String> {
    if source == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(source).with_context(|| format!("reading {source}"))
    }
}

/// Parses `{"n", "table"}` or a bare array of rows, without checking the axiom.
fn read_table(source: &str) -> anyhow::Result<Vec<Vec<usize>>> {
    let text = read_input(source)?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("{source}: not JSON"))?;
    if value.is_array() {
        return serde_json::from_value(value).with_context(|| format!("{source}: expected an array of rows"));
    }
    let t: TableJson = serde_json::from_value(value).with_context(|| format!("{source}: expected {{\"n\", \"table\"}}"))?;
    if t.n != t.table.len() {
        return Err(anyhow!("{source}: declared n = {} but the table has {} rows", t.n, t.table.len()));
    }
    Ok(t.table)
}

fn validation_failure(e: &ValidationError) -> Failure {
    match e {
        ValidationError::Malformed(m) => reject(json!({"valid": false, "error": m})),
        ValidationError::Violations(v) => reject(json!({"valid": false, "error": e.to_string(), "violations": v})),
    }
}

fn read_cycle_set(source: &str) -> Result<CycleSet, Failure> {
    let table = read_table(source)?;
    validate(&table).map_err(|e| validation_failure(&e))
}

fn table_text(x: &CycleSet) -> String {
    format!("cycle set of size {}\n{}", x.size(), x.to_cycle_notation())
}

fn table_output(x: &CycleSet) -> Output {
    Output { json: serde_json::to_value(x).expect("tables serialize"), text: Some(table_text(x)) }
}

fn math<E: std::fmt::Display>(e: E) -> Failure {
    reject(json!({"error": e.to_string()}))
}

fn cmd_verify(input: &str) -> Result<Output, Failure> {
    let x = read_cycle_set(input)?;
    let s = x.to_solution();
    let involutive = s.involutivity_failure();
    let braid = s.braid_failure();
    let (order, ty) = x.group_summary().map_err(math)?;
    let report = json!({
        "valid": true,
        "n": x.size(),
        "mpl": x.mpl(),
        "tower": x.retraction_tower_sizes(),
        "indecomposable": x.is_indecomposable(),
        "square_free": x.is_square_free(),
        "group_order": order,
        "group_type": ty,
        "solution": {
            "involutive": involutive.is_none(),
            "braid": braid.is_none(),
            "round_trip": CycleSet::from_solution(&s) == x,
        },
    });
    let text = format!(
        "valid cycle set of size {}\nmpl: {}\ntower: {:?}\nindecomposable: {}\npermutation group: order {order}, {ty}\nsolution: involutive {}, braid {}\n",
        x.size(),
        x.mpl().map_or("none (irretractable tower)".to_string(), |m| m.to_string()),
        x.retraction_tower_sizes(),
        x.is_indecomposable(),
        involutive.is_none(),
        braid.is_none(),
    );
    Ok(Output { json: report, text: Some(text) })
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(anyhow!("--family {family} requires {flag}")))
}

fn cmd_build(
    family: Family,
    m: Option<usize>,
    p: Option<usize>,
    t: Option<usize>,
    alpha: Option<String>,
    input: Option<String>,
) -> Result<Output, Failure> {
    let x = match family {
        Family::Trivial => trivial_cycle_set(need(m, "--m", "trivial")?).map_err(math)?,
        Family::P2Level2 => build_p2_level2(need(p, "--p", "p2-level2")?, need(t, "--t", "p2-level2")?).map_err(math)?,
        Family::ElementaryAbelian => {
            let p = need(p, "--p", "elementary-abelian")?;
            let alpha = match alpha {
                Some(a) => Permutation::parse(&a, Some(p)).map_err(|e| Failure::Usage(anyhow!("--alpha: {e}")))?,
                None => Permutation::standard_cycle(p),
            };
            build_elementary_abelian(p, &alpha).map_err(math)?
        }
        Family::PrimePower => {
            let text = read_input(&need(input, "--input", "prime-power")?)?;
            let spec: CyclicBuildSpec = serde_json::from_str(&text).context("parsing spec JSON")?;
            build_prime_power(&spec).map_err(math)?
        }
        Family::Extension => {
            let text = read_input(&need(input, "--input", "extension")?)?;
            let value: Value = serde_json::from_str(&text).context("parsing cocycle JSON")?;
            let c: DynamicalCocycle = serde_json::from_value(value).map_err(math)?;
            c.extension().map_err(math)?
        }
    };
    Ok(table_output(&x))
}

fn cmd_retract(input: &str) -> Result<Output, Failure> {
    let x = read_cycle_set(input)?;
    let tower = x.retraction_tower();
    let projections: Vec<Vec<usize>> =
        tower.windows(2).map(|w| w[0].retract().expect("tower steps retract").projection).collect();
    let mut text = String::new();
    for (i, y) in tower.iter().enumerate() {
        text.push_str(&format!("level {i}: {}", table_text(y)));
    }
    let json = json!({
        "sizes": x.retraction_tower_sizes(),
        "mpl": x.mpl(),
        "tower": tower,
        "projections": projections,
    });
    Ok(Output { json, text: Some(text) })
}

fn cmd_solution(input: &str, invert: bool) -> Result<Output, Failure> {
    if invert {
        let text = read_input(input)?;
        let value: Value = serde_json::from_str(&text).context("parsing solution JSON")?;
        let s: Solution = serde_json::from_value(value).map_err(math)?;
        return Ok(table_output(&s.to_cycle_set()));
    }
    let x = read_cycle_set(input)?;
    let s = x.to_solution();
    let mut text = String::new();
    for a in 0..s.size() {
        text.push_str(&format!("λ_{a} = {}    ρ_{a} = {}\n", s.lambda(a), s.rho(a)));
    }
    Ok(Output { json: serde_json::to_value(&s).map_err(anyhow::Error::from)?, text: Some(text) })
}

fn cmd_iso(inputs: &[String]) -> Result<Output, Failure> {
    if inputs.len() != 2 {
        return Err(Failure::Usage(anyhow!("iso takes exactly two --input tables, got {}", inputs.len())));
    }
    let a = read_cycle_set(&inputs[0])?;
    let b = read_cycle_set(&inputs[1])?;
    match a.are_isomorphic(&b) {
        Some(map) => {
            let text = format!("isomorphic: {}\n", Permutation::from_images(map.clone()).expect("isomorphisms are bijections"));
            Ok(Output { json: json!({"isomorphic": true, "map": map}), text: Some(text) })
        }
        None => Err(reject(json!({"isomorphic": false, "result": "non-isomorphic"}))),
    }
}

fn cmd_classify(p: usize, q: Option<usize>, k: Option<u32>, budget: u64) -> Result<Output, Failure> {
    let config = SearchConfig { max_candidates: budget, ..SearchConfig::default() };
    let report = match (q, k) {
        (Some(q), None) => classify_pq(p, q, &config).map_err(math)?,
        (None, Some(k)) => classify_cyclic_prime_power(p, k, &config).map_err(math)?,
        _ => return Err(Failure::Usage(anyhow!("classify needs exactly one of --q or --k"))),
    };
    let mut text = format!(
        "size {}: {} class(es), constraint {}, searched {:?}\n",
        report.size,
        report.class_count(),
        report.constraint,
        report.templates_searched
    );
    for (i, c) in report.classes.iter().enumerate() {
        text.push_str(&format!(
            "class {i}: mpl {:?}, group order {} ({}), f {:?}, raw {}\n{}",
            c.mpl,
            c.group_order,
            c.group_type,
            c.f_invariant,
            c.raw_count,
            c.witness.to_cycle_notation()
        ));
    }
    let mut out = Output::json(&report)?;
    out.text = Some(text);
    Ok(out)
}

fn cmd_enumerate(
    n: Option<usize>,
    mode: SearchMode,
    p: Option<usize>,
    k: Option<u32>,
    budget: u64,
    count: bool,
) -> Result<Output, Failure> {
    let config = SearchConfig { max_candidates: budget, mode, ..SearchConfig::default() };
    let (size, structures, specs) = match mode {
        SearchMode::Spec => {
            let (p, k) = match (p, k, n) {
                (Some(p), Some(k), _) => (p, k),
                (None, None, Some(n)) => arith::prime_power(n)
                    .map(|(p, k)| (p, k))
                    .ok_or_else(|| Failure::Usage(anyhow!("spec mode needs a prime power size, got {n}")))?,
                _ => return Err(Failure::Usage(anyhow!("spec mode needs --p and --k (or a prime power --n)"))),
            };
            let specs = enumerate_specs(p, k, None, budget).map_err(math)?;
            let built = specs.iter().map(build_prime_power).collect::<Result<Vec<_>, _>>().map_err(math)?;
            (p.pow(k), built, Some(specs))
        }
        _ => {
            let n = n.ok_or_else(|| Failure::Usage(anyhow!("enumerate --mode {mode} needs --n")))?;
            (n, brute_force_enumerate(n, &config).map_err(math)?, None)
        }
    };
    let indecomposable = structures.iter().filter(|x| x.is_indecomposable()).count();
    let text = format!("size {size}, mode {mode}: {} structure(s), {indecomposable} indecomposable\n", structures.len());
    let mut json = json!({"n": size, "mode": mode, "count": structures.len(), "indecomposable": indecomposable});
    if !count {
        json["structures"] = serde_json::to_value(&structures).map_err(anyhow::Error::from)?;
        if let Some(specs) = specs {
            json["specs"] = serde_json::to_value(&specs).map_err(anyhow::Error::from)?;
        }
    }
    Ok(Output { json, text: Some(text) })
}

fn cmd_lemma2(p: usize) -> Result<Output, Failure> {
    let fs = lemma2_functions(p).map_err(math)?;
    let text = fs.iter().enumerate().map(|(i, f)| format!("t = {}: {f:?}\n", i + 1)).collect();
    Ok(Output { json: json!(fs), text: Some(text) })
}

fn split(cmd: Command) -> (Io, Box<dyn FnOnce() -> Result<Output, Failure>>) {
    match cmd {
        Command::Verify { input, io } => (io, Box::new(move || cmd_verify(&input))),
        Command::Build { family, m, p, t, alpha, input, io } => {
            (io, Box::new(move || cmd_build(family, m, p, t, alpha, input)))
        }
        Command::Retract { input, io } => (io, Box::new(move || cmd_retract(&input))),
        Command::Solution { input, invert, io } => (io, Box::new(move || cmd_solution(&input, invert))),
        Command::Iso { input, io } => (io, Box::new(move || cmd_iso(&input))),
        Command::Classify { p, q, k, budget, io } => (io, Box::new(move || cmd_classify(p, q, k, budget))),
        Command::Enumerate { n, mode, p, k, budget, count, io } => {
            (io, Box::new(move || cmd_enumerate(n, mode, p, k, budget, count)))
        }
        Command::Lemma2 { p, io } => (io, Box::new(move || cmd_lemma2(p))),
    }
}

fn render(value: &Value, text: Option<&str>, pretty: bool) -> String {
    match (pretty, text) {
        (true, Some(t)) => t.to_string(),
        (true, None) => serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n",
        (false, _) => value.to_string() + "\n",
    }
}

fn emit(io: &Io, body: &str) -> anyhow::Result<()> {
    match &io.output {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (io, run) = split(cli.command);
    let (body, code) = match run() {
        Ok(out) => (render(&out.json, out.text.as_deref(), io.pretty), 0),
        Err(Failure::Rejected(v)) => (render(&v, None, io.pretty), 1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&io, &body) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
