mod render;
mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use torsion_atlas::arith::gaussian_binomial;
use torsion_atlas::atlasdata::{load_tables, load_tables_from_dir, Atlas, DATA_VERSION};
use torsion_atlas::fintransfer::{choose_split_q, finite_classes, finite_local_structure, FrobeniusSpec};
use torsion_atlas::weylact::DEFAULT_BUDGET;
use torsion_atlas::{build_root_datum, classify_toral_with, AtlasError, IsogenyKind, LieType, RootDatum, ToralOptions};

/// Refuse runs whose estimated class count exceeds this without `--max-rank`.
const MAX_ESTIMATED_CLASSES: u128 = 300_000;

#[derive(Parser)]
#[command(name = "torsion-atlas", version, about = "Toral elementary abelian p-subgroups of simple algebraic groups")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify toral elementary abelian p-subgroups up to conjugacy.
    Classify(ClassifyArgs),
    /// Transfer each class to the split finite group over F_q.
    Transfer(TransferArgs),
    /// Run verification suites; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Markdown report: toral classes plus tabulated non-toral classes.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct GroupArgs {
    #[arg(long = "type")]
    ty: LieType,
    #[arg(long, default_value = "sc")]
    isogeny: IsogenyKind,
    #[arg(long)]
    p: u8,
    /// Only classify subspaces up to this rank.
    #[arg(long)]
    max_rank: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Skip element distributions and the dimension cross-check.
    #[arg(long)]
    no_distributions: bool,
}

#[derive(Args)]
struct TransferArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Field size; the smallest admissible prime when omitted.
    #[arg(long)]
    q: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Tables,
    Torsion,
    Oracle,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Largest rank for the oracle suite.
    #[arg(long, default_value_t = 4)]
    max_rank: usize,
    /// Subspace budget for the brute-force oracle.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Primes for the torsion suite.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
    primes: Vec<u8>,
    /// Emit a JSON report instead of one line per check.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub enum Failure {
    Usage(String),
    Verification,
    Internal(String),
}

impl From<AtlasError> for Failure {
    fn from(e: AtlasError) -> Failure {
        match e {
            AtlasError::Internal(_) | AtlasError::CrossCheckFailure { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    }
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Verification)) => ExitCode::from(1),
        Ok(Err(Failure::Usage(m))) => {
            eprintln!("error: {}", m);
            ExitCode::from(2)
        }
        Ok(Err(Failure::Internal(m))) => {
            eprintln!("internal error: {}", m);
            ExitCode::from(3)
        }
        Err(_) => ExitCode::from(3),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Classify(a) => classify(a),
        Command::Transfer(a) => transfer(a),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
    }
}

/// Tables from `TORSION_ATLAS_DATA` when set, else the embedded copy.
pub fn atlas() -> Result<Arc<Atlas>, Failure> {
    let a = match std::env::var_os("TORSION_ATLAS_DATA") {
        Some(dir) => load_tables_from_dir(&PathBuf::from(dir))?,
        None => load_tables(DATA_VERSION)?,
    };
    Ok(Arc::new(a))
}

fn prepare(g: &GroupArgs) -> Result<RootDatum, Failure> {
    if !torsion_atlas::arith::is_prime(g.p as u64) {
        return Err(AtlasError::NonPrime(g.p as u64).into());
    }
    let rd = build_root_datum(g.ty, g.isogeny)?;
    let top = g.max_rank.unwrap_or(rd.rank).min(rd.rank);
    let subspaces: u128 = (0..=top as u32).map(|k| gaussian_binomial(rd.rank as u32, k, g.p as u64)).sum();
    let estimate = subspaces / rd.ty.weyl_order();
    if estimate > MAX_ESTIMATED_CLASSES {
        return Err(Failure::Usage(format!(
            "about {} classes expected for {} at p = {} up to rank {}; pass a smaller --max-rank",
            estimate, rd.ty, g.p, top
        )));
    }
    Ok(rd)
}

fn meta(g: &GroupArgs, q: Option<u64>) -> render::Meta {
    render::Meta {
        ty: g.ty.to_string(),
        isogeny: g.isogeny.to_string(),
        p: g.p,
        q,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        data_version: DATA_VERSION.to_string(),
    }
}

pub fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn classify(a: ClassifyArgs) -> Outcome {
    let rd = prepare(&a.group)?;
    let atlas = atlas()?;
    let opts = ToralOptions { max_rank: a.group.max_rank, atlas: Some(&atlas), distributions: !a.no_distributions };
    let c = classify_toral_with(&rd, a.group.p, opts)?;
    let text = render::classification(&meta(&a.group, None), &c, a.output.format);
    emit(&a.output.out, &text)
}

fn transfer(a: TransferArgs) -> Outcome {
    let q = a.q.unwrap_or_else(|| choose_split_q(a.group.p));
    let f = FrobeniusSpec::new(q, a.group.p)?;
    let rd = prepare(&a.group)?;
    let atlas = atlas()?;
    let opts = ToralOptions { max_rank: a.group.max_rank, atlas: Some(&atlas), distributions: false };
    let c = classify_toral_with(&rd, a.group.p, opts)?;
    let mut rows = Vec::new();
    for tc in &c.classes {
        let records = finite_classes(tc, &f)?;
        let local = records.iter().map(|r| finite_local_structure(tc, r, &f)).collect();
        rows.push(render::TransferClass::new(tc, records, local));
    }
    let text = render::transfer(&meta(&a.group, Some(q)), &rows, a.output.format);
    emit(&a.output.out, &text)
}

fn verify(a: VerifyArgs) -> Outcome {
    let mut checks = Vec::new();
    let all = a.suite == Suite::All;
    if all || a.suite == Suite::Tables {
        checks.extend(suites::tables(&*atlas()?)?);
    }
    if all || a.suite == Suite::Torsion {
        checks.extend(suites::torsion(&a.primes)?);
    }
    if all || a.suite == Suite::Oracle {
        checks.extend(suites::oracle(a.max_rank, a.budget)?);
    }
    let text = if a.json { render::checks_json(&checks) } else { render::checks_text(&checks) };
    emit(&a.out, &text)?;
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn report(a: ReportArgs) -> Outcome {
    let rd = prepare(&a.group)?;
    let atlas = atlas()?;
    let opts = ToralOptions { max_rank: a.group.max_rank, atlas: Some(&atlas), distributions: true };
    let c = classify_toral_with(&rd, a.group.p, opts)?;
    let mut text = render::classification(&meta(&a.group, None), &c, Format::Markdown);
    text.push_str(&render::nontoral_section(&atlas, &a.group.ty, a.group.isogeny, a.group.p));
    emit(&a.out, &text)
}
