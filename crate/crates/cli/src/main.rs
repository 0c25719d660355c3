use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use avlcode::codec::{self, EncodedTree};
use avlcode::corpus::{self, run_corpus, summarize};
use avlcode::gf::{self, RecursionSpec};
use avlcode::tree::{self, compute_stats, enumerate_all, CountTable, Sampler};
use avlcode::{AvlTree, Execution, TreeClass};

const DEFAULT_SEED: u64 = 2897;

#[derive(Parser)]
#[command(name = "avlcode", version, about = "Compact arithmetic-coded AVL tree shapes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a uniformly random tree.
    Gen(GenArgs),
    /// Encode a tree into an .avlc file and print its accounting.
    Encode(EncodeArgs),
    /// Decode an .avlc file.
    Decode(DecodeArgs),
    /// Print node statistics of a tree.
    Stats(StatsArgs),
    /// Exact counts of shapes by size.
    Count(CountArgs),
    /// Root sequence and growth-constant bracket as CSV.
    Alpha(AlphaArgs),
    /// Run the verification checks.
    Verify(VerifyArgs),
    /// Encode a seeded random corpus and summarize bits per node.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Class {
    Avl,
    Llavl,
}

impl From<Class> for TreeClass {
    fn from(c: Class) -> Self {
        match c {
            Class::Avl => TreeClass::Avl,
            Class::Llavl => TreeClass::Llavl,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Lob,
    Avlc,
    Csv,
    Json,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "avl")]
    class: Class,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, value_enum, default_value = "avl")]
    class: Class,
    /// Tree in parenthesis text, or `.lob` by extension.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, value_enum, default_value = "avl")]
    class: Class,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum, default_value = "avl")]
    class: Class,
    #[arg(long, default_value_t = 20)]
    max_n: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct AlphaArgs {
    #[arg(long, value_enum, default_value = "avl", conflicts_with = "spec")]
    class: Class,
    /// Recursion in the text spec format instead of a built-in class.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = gf::DEFAULT_H_MAX)]
    h_max: usize,
    #[arg(long, default_value_t = gf::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest size for the exhaustive checks.
    #[arg(long, default_value_t = 12)]
    max_n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random trees per size and class in the corpus checks.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = gf::DEFAULT_H_MAX)]
    h_max: usize,
    /// An .avlc file that must decode and re-encode to the same bytes.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "avl")]
    class: Class,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Exit status with a meaning beyond success or bad input.
#[derive(Debug)]
enum Status {
    CheckFailed,
    Unconverged,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Status::CheckFailed => f.write_str("verification failed"),
            Status::Unconverged => f.write_str("bracket did not converge"),
        }
    }
}

impl std::error::Error for Status {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Stats(a) => stats(a),
        Command::Count(a) => count(a),
        Command::Alpha(a) => alpha(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<Status>() {
            Some(Status::CheckFailed) => ExitCode::from(1),
            Some(Status::Unconverged) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(3)
            }
        },
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn read_tree(path: &Path, class: TreeClass) -> Result<AvlTree> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let tree = if path.extension().is_some_and(|e| e == "lob") {
        tree::read_lob(&bytes, class, true)?
    } else {
        let text = std::str::from_utf8(&bytes).context("tree text is not UTF-8")?;
        tree::from_text(text, class)?.validated()?
    };
    Ok(tree)
}

fn render_tree(tree: &AvlTree, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Text => Ok(format!("{}\n", tree::to_text(tree)).into_bytes()),
        Format::Lob => Ok(tree::write_lob(tree)),
        Format::Avlc => Ok(codec::encode(tree)?.to_bytes()),
        _ => bail!("trees are written as text, lob or avlc"),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn gen(a: GenArgs) -> Result<()> {
    let tree = tree::sample_uniform(a.n, a.seed, a.class.into())?;
    write_output(a.out.as_deref(), &render_tree(&tree, a.format)?)
}

fn encode(a: EncodeArgs) -> Result<()> {
    let tree = read_tree(&a.input, a.class.into())?;
    let enc = codec::encode(&tree)?;
    let out = a.out.unwrap_or_else(|| a.input.with_extension("avlc"));
    fs::write(&out, enc.to_bytes()).with_context(|| format!("writing {}", out.display()))?;
    print_json(&enc.accounting)
}

fn decode(a: DecodeArgs) -> Result<()> {
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let tree = codec::decode(&EncodedTree::from_bytes(&bytes)?)?;
    write_output(a.out.as_deref(), &render_tree(&tree, a.format)?)
}

fn stats(a: StatsArgs) -> Result<()> {
    let tree = read_tree(&a.input, a.class.into())?;
    let s = compute_stats(&tree);
    match a.format {
        Format::Json => print_json(&json!({
            "class": tree.class(),
            "stats": s,
            "alpha": s.alpha().to_string(),
            "beta": s.beta().to_string(),
            "beta2": s.beta2().map(|r| r.to_string()),
            "gamma": s.gamma().to_string(),
        })),
        Format::Text => {
            println!("n={} height={} a={} b1={} b2={} c={} d={}", s.n, s.height, s.a, s.b1, s.b2, s.c, s.d);
            Ok(())
        }
        _ => bail!("stats are printed as json or text"),
    }
}

fn count(a: CountArgs) -> Result<()> {
    let counts = gf::count_exact(a.max_n, a.class.into())?;
    match a.format {
        Format::Csv | Format::Text => {
            println!("n,count");
            for (n, c) in counts.iter().enumerate().skip(1) {
                println!("{n},{c}");
            }
            Ok(())
        }
        Format::Json => {
            let strings: Vec<String> = counts.iter().skip(1).map(|c| c.to_string()).collect();
            print_json(&json!({ "class": TreeClass::from(a.class), "counts": strings }))
        }
        _ => bail!("counts are printed as csv, text or json"),
    }
}

fn alpha(a: AlphaArgs) -> Result<()> {
    let spec = match &a.spec {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?.parse::<RecursionSpec>()?,
        None => RecursionSpec::builtin(a.class.into()),
    };
    let report = gf::growth_bracket(&spec, a.tol, a.h_max)?;
    match a.format {
        Format::Csv | Format::Text => print!("{}", report.to_csv()),
        Format::Json => print_json(&report)?,
        _ => bail!("the alpha table is printed as csv or json"),
    }
    if !report.converged {
        return Err(Status::Unconverged.into());
    }
    Ok(())
}

struct Checks {
    first_failure: Option<String>,
}

impl Checks {
    fn record(&mut self, name: &str, outcome: std::result::Result<String, String>) {
        match outcome {
            Ok(detail) => println!("CHECK {name} PASS {detail}"),
            Err(detail) => {
                println!("CHECK {name} FAIL {detail}");
                self.first_failure.get_or_insert_with(|| name.to_string());
            }
        }
    }
}

fn verify(a: VerifyArgs) -> Result<()> {
    let mut checks = Checks { first_failure: None };
    let classes = [TreeClass::Avl, TreeClass::Llavl];
    let enum_n = a.max_n.clamp(1, tree::EXHAUSTIVE_LIMIT);

    if a.max_n >= 5 {
        let got = gf::count_exact(5, TreeClass::Avl)?[5].clone();
        let outcome = if got == 6u32.into() { Ok("expected=6".to_string()) } else { Err(format!("expected=6 got={got}")) };
        checks.record("count_n5", outcome);
    }

    checks.record(
        "count_enumeration",
        (|| {
            for class in classes {
                let table = CountTable::build(enum_n, class, Execution::default()).map_err(|e| e.to_string())?;
                for n in 1..=enum_n {
                    let listed = enumerate_all(n, class).map_err(|e| e.to_string())?.count();
                    if table.total(n) != listed.into() {
                        return Err(format!("{class} n={n}: {} vs {listed}", table.total(n)));
                    }
                }
            }
            Ok(format!("n<={enum_n}"))
        })(),
    );

    let codec_n = a.max_n.clamp(1, 12);
    let roundtrip = (|| {
        let mut trees = 0;
        for class in classes {
            for n in 1..=codec_n {
                for t in enumerate_all(n, class).map_err(|e| e.to_string())? {
                    let back = codec::decode_bytes(&codec::encode(&t).map_err(|e| e.to_string())?.to_bytes())
                        .map_err(|e| format!("{class} {t}: {e}"))?;
                    if back != t {
                        return Err(format!("{class} {t} decoded as {back}"));
                    }
                    trees += 1;
                }
            }
        }
        let mut detail = format!("exhaustive n<={codec_n} trees={trees}");
        if let Some(path) = &a.input {
            let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let tree = codec::decode_bytes(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
            let again = codec::encode(&tree).map_err(|e| e.to_string())?.to_bytes();
            if again != bytes {
                return Err(format!("{}: re-encoding differs", path.display()));
            }
            detail.push_str(&format!(" file={} n={}", path.display(), tree.len()));
        }
        Ok(detail)
    })();
    checks.record("roundtrip", roundtrip);

    let lemma_n = a.max_n.min(14);
    checks.record(
        "lemmas",
        (|| {
            let mut trees = 0;
            for n in 3..=lemma_n {
                for t in enumerate_all(n, TreeClass::Avl).map_err(|e| e.to_string())? {
                    let s = compute_stats(&t);
                    let (n, a, b, b2) = (s.n as i128, s.a as i128, s.b() as i128, s.b2 as i128);
                    if 6 * b <= n || a > 3 * b {
                        return Err(format!("{t}: beta or leaf share"));
                    }
                    if 5 * a <= 2 * n && b2 * (n - a) > b * (3 * a - n) {
                        return Err(format!("{t}: beta2 cap"));
                    }
                    trees += 1;
                }
            }
            Ok(format!("n<={lemma_n} trees={trees}"))
        })(),
    );

    for class in classes {
        checks.record(
            &format!("size_bound_{class}"),
            (|| {
                let sampler = Sampler::new(class, 1000).map_err(|e| e.to_string())?;
                let mut worst: f64 = 0.0;
                for n in [100, 1000] {
                    let trials = run_corpus(&sampler, n, a.trials, a.seed, Execution::default()).map_err(|e| e.to_string())?;
                    for t in &trials {
                        if !t.round_trip || !t.within_budget(class) {
                            return Err(format!("n={n} seed={} bits={}", t.seed, t.accounting.total_bits()));
                        }
                        worst = worst.max(t.accounting.bits_per_node);
                    }
                }
                Ok(format!("trials={} max_bits_per_node={worst:.5}", a.trials))
            })(),
        );
    }

    for (class, lo, hi) in [(TreeClass::Avl, 0.5219, 0.5220), (TreeClass::Llavl, 0.67418, 0.67419)] {
        checks.record(
            &format!("growth_{class}"),
            (|| {
                let r = gf::growth_bracket(&RecursionSpec::builtin(class), 1e-12, a.h_max).map_err(|e| e.to_string())?;
                let detail = format!("bracket={:.12} bound={:.6} h={}", r.alpha, r.bits_per_node_lower_bound, r.h_reached);
                if r.converged && r.monotone && r.alpha.meets(lo, hi) {
                    Ok(detail)
                } else {
                    Err(detail)
                }
            })(),
        );
    }

    for (class, want) in [(TreeClass::Avl, 1.0 / 3.0), (TreeClass::Llavl, 0.5)] {
        checks.record(
            &format!("fixed_point_{class}"),
            match gf::fixed_point(&RecursionSpec::builtin(class)) {
                Ok(c) if (c.mid_f64() - want).abs() < 1e-12 => Ok(format!("C={:.15}", c.mid())),
                Ok(c) => Err(format!("C={c}")),
                Err(e) => Err(e.to_string()),
            },
        );
    }

    match checks.first_failure {
        None => Ok(()),
        Some(name) => {
            eprintln!("first failure: {name}");
            Err(Status::CheckFailed.into())
        }
    }
}

fn bench(a: BenchArgs) -> Result<()> {
    let class: TreeClass = a.class.into();
    let sampler = Sampler::new(class, a.n)?;
    let trials = run_corpus(&sampler, a.n, a.trials, a.seed, Execution::default())?;
    let summary = summarize(&trials).context("at least one trial is required")?;
    match a.format {
        Format::Json => print_json(&json!({ "class": class, "n": a.n, "summary": summary, "trials": trials })),
        Format::Text => {
            for t in &trials {
                println!(
                    "trial={} seed={} bits={} bits_per_node={:.5} alpha={:.4}",
                    t.index,
                    t.seed,
                    t.accounting.total_bits(),
                    t.accounting.bits_per_node,
                    t.stats.a as f64 / t.stats.n as f64
                );
            }
            println!(
                "class={class} n={} trials={} min={:.5} mean={:.5} max={:.5} budget_per_node={:.5} round_trip={}",
                a.n,
                summary.trials,
                summary.min_bits_per_node,
                summary.mean_bits_per_node,
                summary.max_bits_per_node,
                corpus::size_budget(class, a.n as u64) / a.n as f64,
                summary.all_round_trip
            );
            Ok(())
        }
        _ => bail!("bench results are printed as text or json"),
    }
}
