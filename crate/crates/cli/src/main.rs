use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use zhps::circuits::{circuit_to_diagram, circuit_to_pathsum, parse_circuit, Circuit};
use zhps::diagram::{normalize, Diagram};
use zhps::oracle::{eval_diagram, eval_pathsum, CompareMode, DenseMatrix, OracleOptions, DEFAULT_CAP};
use zhps::pathsum::PurePathSum;
use zhps::rules::{simplify, simplify_diagram, Policy, RewriteTrace};
use zhps::selfcheck;
use zhps::translate::{pathsum_to_zh, zh_to_pathsum, TranslateOptions};
use zhps::verify::{verify_circuits, verify_pathsums, Engine, Report, VerifyOptions};

/// Exit code for usage, parse and I/O errors.
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "zhps",
    version,
    about = "Simplify and verify Toffoli+Hadamard circuits with ZH-diagrams and path-sums"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Circuit,
    Zh,
    Pathsum,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Zh,
    Pathsum,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Pathsum,
    Diagram,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Pathsum => Engine::PathSum,
            EngineArg::Diagram => Engine::Diagram,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    GlobalPhase,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MatrixFormat {
    Tsv,
    Json,
}

#[derive(clap::Args)]
struct Input {
    /// Input file; `-` reads stdin.
    #[arg(long = "in", value_name = "FILE")]
    path: PathBuf,
    /// Input format. Inferred from the extension (.qc) or the JSON keys if omitted.
    #[arg(long)]
    from: Option<Format>,
    /// Accept H-box labels that are unit complex numbers but not recognisable
    /// rational phases.
    #[arg(long)]
    inexact: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert between circuit, diagram and path-sum forms.
    Translate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        to: Target,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Also write the diagram as Graphviz dot.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Rewrite to a fixpoint.
    Simplify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "pathsum")]
        engine: EngineArg,
        /// Write the rewrite trace as JSON.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Decide whether two circuits or path-sums implement the same operator.
    Verify {
        /// Left operand (circuit or path-sum JSON).
        a: Option<PathBuf>,
        /// Right operand.
        b: Option<PathBuf>,
        /// File of `A B` pairs, one per line, paths relative to the file.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["a", "b"])]
        batch: Option<PathBuf>,
        /// Worker threads for batch mode.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value = "pathsum")]
        engine: EngineArg,
        /// Largest residue the oracle may evaluate, in Boolean variables.
        #[arg(long, env = "ZHPS_ORACLE_CAP", default_value_t = DEFAULT_CAP)]
        oracle_cap: usize,
        /// Never fall back to the oracle.
        #[arg(long)]
        rewrite_only: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the dense matrix.
    Eval {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "tsv")]
        format: MatrixFormat,
        #[arg(long, env = "ZHPS_ORACLE_CAP", default_value_t = DEFAULT_CAP)]
        oracle_cap: usize,
    },
    /// Randomized soundness suite over every rule.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Add a deliberately broken rule that must be reported as failing.
        #[arg(long)]
        negative_control: bool,
        #[arg(long)]
        json: bool,
    },
}

enum Loaded {
    Circuit(Circuit),
    Diagram(Diagram),
    PathSum(PurePathSum),
}

fn read(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        return std::io::read_to_string(std::io::stdin()).context("reading stdin");
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn infer(path: &Path, text: &str) -> anyhow::Result<Format> {
    if path.extension().is_some_and(|e| e == "qc") {
        return Ok(Format::Circuit);
    }
    let trimmed = text.trim_start();
    if !trimmed.starts_with('{') {
        return Ok(Format::Circuit);
    }
    let v: serde_json::Value =
        serde_json::from_str(text).with_context(|| format!("{}: invalid JSON", path.display()))?;
    match (v.get("spiders"), v.get("vars")) {
        (Some(_), _) => Ok(Format::Zh),
        (_, Some(_)) => Ok(Format::Pathsum),
        _ => bail!(
            "{}: cannot tell whether this is a diagram or a path-sum; pass --from",
            path.display()
        ),
    }
}

fn load(path: &Path, from: Option<Format>) -> anyhow::Result<Loaded> {
    let text = read(path)?;
    let format = match from {
        Some(f) => f,
        None => infer(path, &text)?,
    };
    let ctx = || format!("parsing {}", path.display());
    Ok(match format {
        Format::Circuit => Loaded::Circuit(parse_circuit(&text).with_context(ctx)?),
        Format::Zh => Loaded::Diagram(Diagram::from_json(&text).with_context(ctx)?),
        Format::Pathsum => Loaded::PathSum(PurePathSum::from_json(&text).with_context(ctx)?),
    })
}

fn to_pathsum(x: &Loaded, opts: TranslateOptions) -> anyhow::Result<PurePathSum> {
    Ok(match x {
        Loaded::Circuit(c) => circuit_to_pathsum(c),
        Loaded::Diagram(d) => zh_to_pathsum(d, opts)?,
        Loaded::PathSum(e) => e.clone(),
    })
}

fn to_diagram(x: &Loaded) -> Diagram {
    match x {
        Loaded::Circuit(c) => normalize(&circuit_to_diagram(c)),
        Loaded::Diagram(d) => d.clone(),
        Loaded::PathSum(e) => pathsum_to_zh(e),
    }
}

fn translate_opts(input: &Input) -> TranslateOptions {
    TranslateOptions { inexact: input.inexact }
}

fn cmd_translate(input: &Input, to: Target, out: Option<&Path>, dot: Option<&Path>) -> anyhow::Result<()> {
    let x = load(&input.path, input.from)?;
    let d = to_diagram(&x);
    let text = match to {
        Target::Zh => d.to_json(),
        Target::Pathsum => to_pathsum(&x, translate_opts(input))?.compacted().to_json(),
    };
    if let Some(p) = dot {
        write(Some(p), &d.to_dot())?;
    }
    write(out, &text)
}

fn cmd_simplify(
    input: &Input,
    engine: EngineArg,
    trace_path: Option<&Path>,
    out: Option<&Path>,
    dot: Option<&Path>,
) -> anyhow::Result<()> {
    let x = load(&input.path, input.from)?;
    let (text, before, after, trace, unit): (String, usize, usize, RewriteTrace, &str) = match engine {
        EngineArg::Pathsum => {
            let e = to_pathsum(&x, translate_opts(input))?;
            let (r, trace) = simplify(&e, &Policy::pathsum())?;
            if let Some(p) = dot {
                write(Some(p), &pathsum_to_zh(&r).to_dot())?;
            }
            (r.compacted().to_json(), e.num_vars(), r.num_vars(), trace, "variables")
        }
        EngineArg::Diagram => {
            let d = to_diagram(&x);
            let (r, trace) = simplify_diagram(&d, &Policy::diagram())?;
            if let Some(p) = dot {
                write(Some(p), &r.to_dot())?;
            }
            (r.to_json(), d.num_spiders(), r.num_spiders(), trace, "spiders")
        }
    };
    eprintln!("{unit}: {before} -> {after} in {} steps", trace.len());
    if let Some(p) = trace_path {
        write(Some(p), &trace.to_json())?;
    }
    write(out, &text)
}

fn verify_opts(mode: Mode, engine: EngineArg, cap: usize, rewrite_only: bool) -> VerifyOptions {
    VerifyOptions {
        mode: match mode {
            Mode::Exact => CompareMode::ExactScalar,
            Mode::GlobalPhase => CompareMode::UpToGlobalPhase,
        },
        engine: engine.into(),
        oracle: OracleOptions::with_cap(cap),
        rewrite_only,
        ..VerifyOptions::default()
    }
}

fn verify_pair(a: &Path, b: &Path, opts: &VerifyOptions) -> anyhow::Result<Report> {
    let (x, y) = (load(a, None)?, load(b, None)?);
    Ok(match (&x, &y) {
        (Loaded::Circuit(c), Loaded::Circuit(d)) => verify_circuits(c, d, opts)?,
        _ => verify_pathsums(
            &to_pathsum(&x, TranslateOptions::default())?,
            &to_pathsum(&y, TranslateOptions::default())?,
            opts,
        )?,
    })
}

fn describe(r: &Report) -> String {
    let mut s = format!(
        "{} (proof: {:?}, {} steps, residue {})",
        r.status,
        r.proof,
        r.trace.len(),
        r.residue_size
    );
    if let Some(ev) = &r.evidence {
        s += &format!("; entry ({}, {}) differs by {:.3e}", ev.row, ev.col, ev.max_diff);
    }
    s
}

fn batch_pairs(path: &Path) -> anyhow::Result<Vec<(PathBuf, PathBuf)>> {
    let base = path.parent().unwrap_or(Path::new("."));
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| match l.split_whitespace().collect::<Vec<_>>()[..] {
            [a, b] => Ok((base.join(a), base.join(b))),
            _ => bail!("{}:{}: expected two paths", path.display(), i + 1),
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn map_jobs<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync + Send) -> anyhow::Result<Vec<R>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn map_jobs<T: Sync, R: Send>(items: &[T], _jobs: usize, f: impl Fn(&T) -> R + Sync + Send) -> anyhow::Result<Vec<R>> {
    Ok(items.iter().map(f).collect())
}

/// Worst status decides the exit code; any error makes the batch fail.
fn cmd_verify_batch(path: &Path, jobs: usize, opts: &VerifyOptions, json: bool) -> anyhow::Result<u8> {
    let pairs = batch_pairs(path)?;
    let results = map_jobs(&pairs, jobs, |(a, b)| verify_pair(a, b, opts))?;
    let mut code = 0;
    let mut rows = Vec::new();
    for ((a, b), r) in pairs.iter().zip(results) {
        let r = r.with_context(|| format!("{} vs {}", a.display(), b.display()))?;
        code = code.max(r.status.exit_code() as u8);
        if json {
            rows.push(serde_json::json!({"a": a, "b": b, "report": r}));
        } else {
            println!("{} {}: {}", a.display(), b.display(), describe(&r));
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    }
    Ok(code)
}

fn cmd_eval(input: &Input, format: MatrixFormat, cap: usize) -> anyhow::Result<()> {
    let x = load(&input.path, input.from)?;
    let opts = OracleOptions::with_cap(cap);
    let m: DenseMatrix = match &x {
        Loaded::Diagram(d) => eval_diagram(d, opts)?,
        other => eval_pathsum(&to_pathsum(other, translate_opts(input))?, opts)?,
    };
    match format {
        MatrixFormat::Tsv => print!("{m}"),
        MatrixFormat::Json => println!("{}", m.to_json()),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Translate { input, to, out, dot } => cmd_translate(&input, to, out.as_deref(), dot.as_deref()).map(|_| 0),
        Cmd::Simplify {
            input,
            engine,
            trace,
            out,
            dot,
        } => cmd_simplify(&input, engine, trace.as_deref(), out.as_deref(), dot.as_deref()).map(|_| 0),
        Cmd::Verify {
            a,
            b,
            batch,
            jobs,
            mode,
            engine,
            oracle_cap,
            rewrite_only,
            json,
        } => {
            let opts = verify_opts(mode, engine, oracle_cap, rewrite_only);
            if let Some(batch) = batch {
                return cmd_verify_batch(&batch, jobs, &opts, json);
            }
            let (Some(a), Some(b)) = (a, b) else {
                bail!("verify needs two inputs or --batch FILE");
            };
            let r = verify_pair(&a, &b, &opts)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                println!("{}", describe(&r));
            }
            Ok(r.status.exit_code() as u8)
        }
        Cmd::Eval {
            input,
            format,
            oracle_cap,
        } => cmd_eval(&input, format, oracle_cap).map(|_| 0),
        Cmd::Selfcheck {
            seed,
            cases,
            negative_control,
            json,
        } => {
            let mut checks = selfcheck::default_checks();
            if negative_control {
                checks.push(selfcheck::corrupted_omega());
            }
            let report = selfcheck::run(&checks, seed, cases);
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{report}");
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
