//! `cbq` — JSON command line for the geometry toolkit.
//!
//! Every command reads JSON from a file or stdin and writes a single
//! JSON document to stdout. Exit codes: 0 for success (or a rigid
//! verdict / passing verification), 1 for a not-rigid verdict or a
//! failed verification (the report is still emitted), 2 for input
//! errors (an `{"error": ...}` document is emitted).

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use cbq_core::gallery;
use cbq_core::{
    classify_dim1, classify_distance_d, classify_unit, is_complex_orthogonal, lemma4_chain,
    lemma5_path, probe_preserves, random_complex_orthogonal, theorem1_candidates, unit_chain,
    verify_chain, ClassifyOptions, MapSpec, Point, Verdict, WitnessChain,
};

/// Environment variable consulted when `--seed` is not given.
const SEED_ENV: &str = "CBQ_SEED";

#[derive(Parser)]
#[command(
    name = "cbq",
    version,
    about = "Distance geometry of C^n under the bilinear squared distance: witness chains, forcing solves, and map classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a map as a unit-distance preserver and decompose it
    Classify(ClassifyArgs),
    /// Classify a map preserving one nonzero complex distance d
    #[command(name = "classify-d")]
    ClassifyD(ClassifyDArgs),
    /// Construct a witness chain or path
    WitnessChain(WitnessChainArgs),
    /// Re-verify a chain's certificates from its points
    VerifyChain(VerifyChainArgs),
    /// Solve the forcing system for the admissible images of a point
    Theorem1(Theorem1Args),
    /// Probe distance preservation on random pairs
    Probe(ProbeArgs),
    /// Generate a seeded complex orthogonal matrix
    GenOrthogonal(GenOrthogonalArgs),
    /// List the builtin map gallery
    GalleryList,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Map spec JSON: a file path, or '-' for stdin
    #[arg(long)]
    map: String,
    /// Ambient dimension
    #[arg(long)]
    n: usize,
    /// Distance tolerance
    #[arg(long, default_value_t = cbq_core::DEFAULT_DISTANCE_TOL)]
    tol: f64,
    /// Orthogonality tolerance
    #[arg(long = "ortho-tol", default_value_t = cbq_core::DEFAULT_ORTHO_TOL)]
    ortho_tol: f64,
    /// Sampler seed (falls back to $CBQ_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of validation points / pairs
    #[arg(long, default_value_t = 256)]
    validation: usize,
}

#[derive(Args)]
struct ClassifyDArgs {
    #[command(flatten)]
    base: ClassifyArgs,
    /// Preserved distance as `[re,im]`
    #[arg(long)]
    d: String,
}

#[derive(Args)]
struct WitnessChainArgs {
    /// Chain kind
    #[arg(long, value_parser = ["lemma3", "lemma4", "lemma5"])]
    kind: String,
    /// Point JSON; for --kind lemma3 a pair '[S, T]' of real points
    #[arg(long)]
    point: String,
}

#[derive(Args)]
struct VerifyChainArgs {
    /// Chain JSON: a file path, or '-' for stdin (default)
    #[arg(long, default_value = "-")]
    chain: String,
    #[arg(long, default_value_t = cbq_core::DEFAULT_DISTANCE_TOL)]
    tol: f64,
}

#[derive(Args)]
struct Theorem1Args {
    /// Non-real point JSON
    #[arg(long)]
    point: String,
}

#[derive(Args)]
struct ProbeArgs {
    /// Map spec JSON: a file path, or '-' for stdin
    #[arg(long)]
    map: String,
    #[arg(long)]
    n: usize,
    /// Distance as `[re,im]`; omitted means a grid of positive distances
    #[arg(long)]
    d: Option<String>,
    #[arg(long, default_value_t = cbq_core::DEFAULT_DISTANCE_TOL)]
    tol: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Pairs sampled per distance
    #[arg(long, default_value_t = 256)]
    validation: usize,
}

#[derive(Args)]
struct GenOrthogonalArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Bound on the antisymmetric generator entries
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

enum Outcome {
    Ok(serde_json::Value),
    Failed(serde_json::Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok(doc)) => {
            emit(&doc);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Failed(doc)) => {
            emit(&doc);
            ExitCode::from(1)
        }
        Err(message) => {
            emit(&serde_json::json!({ "error": message }));
            ExitCode::from(2)
        }
    }
}

fn emit(doc: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("serializable")
    );
}

fn run(command: Command) -> Result<Outcome, String> {
    match command {
        Command::Classify(args) => cmd_classify(args),
        Command::ClassifyD(args) => cmd_classify_d(args),
        Command::WitnessChain(args) => cmd_witness_chain(args),
        Command::VerifyChain(args) => cmd_verify_chain(args),
        Command::Theorem1(args) => cmd_theorem1(args),
        Command::Probe(args) => cmd_probe(args),
        Command::GenOrthogonal(args) => cmd_gen_orthogonal(args),
        Command::GalleryList => cmd_gallery_list(),
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn load_map(path: &str, n: usize) -> Result<MapSpec, String> {
    let text = read_input(path)?;
    let spec = MapSpec::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(dim) = spec.dim() {
        if dim != n {
            return Err(format!("map has dimension {dim} but --n {n} was given"));
        }
    }
    Ok(spec)
}

fn parse_point(text: &str) -> Result<Point, String> {
    let point: Point = serde_json::from_str(text)
        .map_err(|e| format!("point must be an array of [re,im] pairs: {e}"))?;
    if point.dim() == 0 {
        return Err("point must have at least one coordinate".into());
    }
    Ok(point)
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let (re, im): (f64, f64) =
        serde_json::from_str(text).map_err(|e| format!("expected '[re,im]': {e}"))?;
    Ok(Complex64::new(re, im))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got '{text}'")),
        Err(_) => Ok(0),
    }
}

fn to_value<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("serializable")
}

fn classify_options(args: &ClassifyArgs) -> Result<ClassifyOptions, String> {
    Ok(ClassifyOptions {
        tol: args.tol,
        ortho_tol: args.ortho_tol,
        validation_count: args.validation,
        seed: resolve_seed(args.seed)?,
    })
}

fn report_outcome(report: cbq_core::ClassificationReport) -> Outcome {
    let doc = to_value(&report);
    match report.verdict {
        Verdict::Rigid { .. } => Outcome::Ok(doc),
        Verdict::NotRigid { .. } => Outcome::Failed(doc),
    }
}

fn cmd_classify(args: ClassifyArgs) -> Result<Outcome, String> {
    let spec = load_map(&args.map, args.n)?;
    let opts = classify_options(&args)?;
    let report = if args.n == 1 {
        classify_dim1(&spec, &opts)
    } else {
        classify_unit(&spec, args.n, &opts)
    }
    .map_err(|e| e.to_string())?;
    Ok(report_outcome(report))
}

fn cmd_classify_d(args: ClassifyDArgs) -> Result<Outcome, String> {
    let d = parse_complex(&args.d)?;
    let spec = load_map(&args.base.map, args.base.n)?;
    let opts = classify_options(&args.base)?;
    let report = classify_distance_d(&spec, args.base.n, d, &opts).map_err(|e| e.to_string())?;
    Ok(report_outcome(report))
}

fn cmd_witness_chain(args: WitnessChainArgs) -> Result<Outcome, String> {
    let chain = match args.kind.as_str() {
        "lemma3" => {
            let endpoints: Vec<Point> = serde_json::from_str(&args.point)
                .map_err(|e| format!("--kind lemma3 expects '[S, T]', two real points: {e}"))?;
            if endpoints.len() != 2 {
                return Err("--kind lemma3 expects exactly two points".into());
            }
            unit_chain(&endpoints[0], &endpoints[1])
        }
        "lemma4" => lemma4_chain(&parse_point(&args.point)?),
        "lemma5" => lemma5_path(&parse_point(&args.point)?),
        other => return Err(format!("unknown chain kind '{other}'")),
    }
    .map_err(|e| e.to_string())?;
    Ok(Outcome::Ok(to_value(&chain)))
}

fn cmd_verify_chain(args: VerifyChainArgs) -> Result<Outcome, String> {
    let text = read_input(&args.chain)?;
    let chain: WitnessChain =
        serde_json::from_str(&text).map_err(|e| format!("chain JSON: {e}"))?;
    let report = verify_chain(&chain, args.tol);
    let doc = to_value(&report);
    if report.pass {
        Ok(Outcome::Ok(doc))
    } else {
        Ok(Outcome::Failed(doc))
    }
}

fn cmd_theorem1(args: Theorem1Args) -> Result<Outcome, String> {
    let point = parse_point(&args.point)?;
    let pair = theorem1_candidates(&point).map_err(|e| e.to_string())?;
    let doc = serde_json::json!({
        "kind": "theorem1_candidates",
        "candidates": [to_value(&pair.original), to_value(&pair.conjugated)],
        "pivot_roots": [
            [pair.pivot_roots[0].re, pair.pivot_roots[0].im],
            [pair.pivot_roots[1].re, pair.pivot_roots[1].im],
        ],
    });
    Ok(Outcome::Ok(doc))
}

fn cmd_probe(args: ProbeArgs) -> Result<Outcome, String> {
    let spec = load_map(&args.map, args.n)?;
    let d = args.d.as_deref().map(parse_complex).transpose()?;
    let seed = resolve_seed(args.seed)?;
    let report = probe_preserves(&spec, args.n, d, args.validation, seed, args.tol)
        .map_err(|e| e.to_string())?;
    let doc = to_value(&report);
    if report.pass {
        Ok(Outcome::Ok(doc))
    } else {
        Ok(Outcome::Failed(doc))
    }
}

fn cmd_gen_orthogonal(args: GenOrthogonalArgs) -> Result<Outcome, String> {
    if args.n == 0 {
        return Err("--n must be at least 1".into());
    }
    if args.scale < 0.0 {
        return Err("--scale must be nonnegative".into());
    }
    let seed = resolve_seed(args.seed)?;
    let q = random_complex_orthogonal(args.n, seed, args.scale);
    let (_, residual) = is_complex_orthogonal(&q, cbq_core::DEFAULT_ORTHO_TOL);
    Ok(Outcome::Ok(serde_json::json!({
        "kind": "orthogonal_matrix",
        "n": args.n,
        "seed": seed,
        "scale": args.scale,
        "q": to_value(&q),
        "residual": residual,
    })))
}

fn cmd_gallery_list() -> Result<Outcome, String> {
    let entries: Vec<serde_json::Value> = gallery::entries()
        .iter()
        .map(|e| {
            serde_json::json!({
                "name": e.name,
                "dims": e.dims.to_string(),
                "params": e.params,
                "expected": e.expected,
                "summary": e.summary,
            })
        })
        .collect();
    Ok(Outcome::Ok(serde_json::json!({
        "kind": "gallery",
        "entries": entries,
    })))
}
