//! Command line front end: argument parsing, input loading, pipeline
//! dispatch, and report emission.
//!
//! Exit codes are part of the interface. 0 means success and, for
//! certifying commands, that every certificate came back positive.
//! 1 is an input problem or an exhausted search budget. 2 is a
//! certified negative: an irreducible isometry, a failed embedding
//! certification, or a failed verification check. 3 is a violated
//! decomposition hypothesis. 64 is a usage error.

use std::collections::HashSet;
use std::env;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::decompose::{
    decompose, HypothesisViolation, IrreducibilityWitness, ReducibilityCertificate,
};
use crate::io::{
    digest_inputs, parse_map_file, parse_product_file, parse_space_file, space_document, Format,
    IoError, Report, RunConfig,
};
use crate::isometry::{
    enumerate_isometries, first_isometry, Isometry, IsometryError, Space,
};
use crate::metric::find_chain;
use crate::product::{ProductPoint, ProductSpace};
use crate::quad::{
    embed_quad, find_quad_embedding, max_quad_dimension, QuadError, QuadGraph, Standardness,
};
use crate::rat::Rat;
use crate::verify::{run_criterion, CRITERIA};

#[derive(Debug, Parser)]
#[command(
    name = "prodiso",
    version,
    about = "Exact isometry analysis for sup-metric products of finite spaces"
)]
struct Cli {
    /// Report format on standard output
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Write the report to a file instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Node budget for backtracking searches
    #[arg(long = "node-cap", global = true, value_name = "N",
          value_parser = clap::value_parser!(u64).range(1..))]
    node_cap: Option<u64>,

    /// Worker threads for parallel searches
    #[arg(long, global = true, value_name = "N",
          value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a space or product file and check the metric axioms
    Validate {
        /// Space or product file
        space: PathBuf,
    },
    /// Build a sup product and report its structure
    Product {
        /// Product file
        product: PathBuf,
        /// List the two-point slices of this axis
        #[arg(long, value_name = "AXIS")]
        slices: Option<usize>,
        /// Include the induced distance matrix as a space document
        #[arg(long)]
        matrix: bool,
    },
    /// Enumerate distance-preserving bijections between two spaces
    Isometries {
        /// Domain space or product file
        domain: PathBuf,
        /// Codomain file; omitted means the domain itself
        codomain: Option<PathBuf>,
        /// Stop at the first isometry found
        #[arg(long)]
        first: bool,
    },
    /// Split product isometries into a factor permutation plus factor maps
    Decompose {
        /// Domain product file, optionally followed by the codomain
        #[arg(long, num_args = 1..=2, required = true, value_name = "FILE")]
        products: Vec<PathBuf>,
        /// Decompose the single map given in this file
        #[arg(long, value_name = "FILE")]
        map: Option<PathBuf>,
        /// Enumerate and decompose every isometry
        #[arg(long)]
        all: bool,
    },
    /// Build quadrilateral graphs and certify embeddings of them
    Quad {
        /// Number of tip pairs; defaults to the target's factor count
        #[arg(long)]
        dim: Option<usize>,
        /// Edge length of the graph
        #[arg(long, default_value = "1")]
        scale: Rat,
        /// Product file to embed into
        #[arg(long, value_name = "FILE")]
        target: Option<PathBuf>,
        /// Step used for geodesic checks; defaults to the scale
        #[arg(long)]
        resolution: Option<Rat>,
        /// Search for the largest embeddable dimension instead
        #[arg(long)]
        max_dim: bool,
    },
    /// Run the desk verification suite
    Verify {
        /// Suite to run
        #[arg(long, default_value = "desk")]
        suite: String,
        /// Comma-separated check ids; empty means all
        #[arg(long, value_delimiter = ',', value_name = "IDS")]
        criteria: Vec<usize>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 64, message: message.into() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::input(e.to_string())
    }
}

fn isometry_failure(e: IsometryError) -> Failure {
    match e {
        IsometryError::SearchBudgetExceeded { cap, found } => Failure::input(format!(
            "search budget {cap} exhausted after finding {found} isometries; raise --node-cap"
        )),
        other => Failure::input(other.to_string()),
    }
}

fn quad_failure(e: QuadError) -> Failure {
    match e {
        QuadError::Budget { cap, lower_bound } => Failure::input(format!(
            "search budget {cap} exhausted; the answer is at least {lower_bound}; raise --node-cap"
        )),
        other => Failure::input(other.to_string()),
    }
}

type CmdResult = Result<(Value, String, i32), Failure>;

/// Reads input files and remembers their bytes so the report digest
/// pins the exact inputs, in argument order.
#[derive(Default)]
struct Loader {
    chunks: Vec<Vec<u8>>,
}

impl Loader {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        self.chunks.push(bytes.clone());
        Ok(bytes)
    }

    fn digest(&self) -> String {
        let refs: Vec<&[u8]> = self.chunks.iter().map(|c| c.as_slice()).collect();
        digest_inputs(&refs)
    }
}

pub fn run() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    dispatch_to(env::args_os(), &mut out, &mut err)
}

/// The testable entry point: parses `argv`, runs the command, writes
/// the report to `out` and diagnostics to `err`, and returns the exit
/// code.
pub fn dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(argv.iter().cloned()) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    64
                }
            };
        }
    };
    let config = effective_config(&cli, err);
    if config.workers > 1 {
        // Harmless if a pool already exists; the searches then use it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build_global();
    }
    let start = Instant::now();
    let mut loader = Loader::default();
    let outcome = match &cli.command {
        Command::Validate { space } => cmd_validate(space, &mut loader),
        Command::Product { product, slices, matrix } => {
            cmd_product(product, *slices, *matrix, &mut loader)
        }
        Command::Isometries { domain, codomain, first } => {
            cmd_isometries(domain, codomain.as_deref(), *first, &config, &mut loader)
        }
        Command::Decompose { products, map, all } => {
            cmd_decompose(products, map.as_deref(), *all, &config, &mut loader)
        }
        Command::Quad { dim, scale, target, resolution, max_dim } => cmd_quad(
            *dim,
            *scale,
            target.as_deref(),
            *resolution,
            *max_dim,
            &config,
            &mut loader,
        ),
        Command::Verify { suite, criteria } => cmd_verify(suite, criteria, &config, err),
    };
    match outcome {
        Ok((results, verdict, code)) => {
            let report = Report {
                command: echo(&argv),
                inputs_digest: loader.digest(),
                verdict,
                results,
                timing_ms: start.elapsed().as_millis(),
            };
            if let Err(e) = report.emit(&config, out) {
                let _ = writeln!(err, "error: cannot write report: {e}");
                return 1;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn echo(argv: &[OsString]) -> String {
    argv.iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ")
}

fn effective_config(cli: &Cli, err: &mut dyn Write) -> RunConfig {
    let mut config = RunConfig::default();
    if let Ok(s) = env::var("PRODISO_NODE_CAP") {
        match s.parse::<u64>() {
            Ok(v) if v > 0 => config.node_cap = v,
            _ => {
                let _ = writeln!(err, "warning: ignoring invalid PRODISO_NODE_CAP '{s}'");
            }
        }
    }
    if let Some(cap) = cli.node_cap {
        config.node_cap = cap;
    }
    if let Some(w) = cli.workers {
        config.workers = w as usize;
    }
    config.format = match cli.format {
        Some(FormatArg::Text) => Format::Text,
        _ => Format::Json,
    };
    config.output = cli.output.clone();
    config
}

/// Loads a space file, probing for the product form first.
fn load_space_from(loader: &mut Loader, path: &Path) -> Result<Space, Failure> {
    let bytes = loader.read(path)?;
    let value: Value = serde_json::from_slice(&bytes).map_err(IoError::from)?;
    if value.get("factors").is_some() {
        let base = base_dir(path);
        Ok(Space::Product(parse_product_file(&bytes, &base)?))
    } else {
        Ok(Space::Metric(parse_space_file(&bytes)?))
    }
}

fn parse_product_from(loader: &mut Loader, path: &Path) -> Result<ProductSpace, Failure> {
    let bytes = loader.read(path)?;
    let base = base_dir(path);
    Ok(parse_product_file(&bytes, &base)?)
}

fn base_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn rat_value(r: Rat) -> Value {
    serde_json::to_value(r).expect("rationals serialize")
}

fn product_point_value(p: &ProductSpace, pt: &ProductPoint) -> Value {
    Value::Array(
        (0..p.factor_count())
            .map(|k| Value::String(p.factor(k).labels()[pt.coord(k)].clone()))
            .collect(),
    )
}

fn map_value(f: &Isometry) -> Value {
    Value::Object(
        f.as_label_pairs()
            .into_iter()
            .map(|(a, b)| (a, Value::String(b)))
            .collect(),
    )
}

fn cmd_validate(path: &Path, loader: &mut Loader) -> CmdResult {
    let space = load_space_from(loader, path)?;
    let mut results = json!({
        "name": space.name(),
        "points": space.len(),
    });
    if let Some(p) = space.as_product() {
        results["factors"] = json!(p.sizes());
    }
    Ok((results, "valid".into(), 0))
}

fn cmd_product(
    path: &Path,
    slices: Option<usize>,
    matrix: bool,
    loader: &mut Loader,
) -> CmdResult {
    let product = parse_product_from(loader, path)?;
    let mut results = json!({
        "name": product.name(),
        "points": product.len(),
        "factors": product.sizes(),
    });
    if let Some(axis) = slices {
        if axis >= product.factor_count() {
            return Err(Failure::input(format!(
                "axis {axis} out of range for {} factors",
                product.factor_count()
            )));
        }
        let pairs: Vec<Value> = product
            .pair_slices(axis)
            .map(|slice| {
                Value::Array(
                    slice
                        .points(&product)
                        .iter()
                        .map(|pt| product_point_value(&product, pt))
                        .collect(),
                )
            })
            .collect();
        results["slices"] = json!({
            "axis": axis,
            "count": pairs.len(),
            "pairs": pairs,
        });
    }
    if matrix {
        let induced = product
            .induced_space()
            .map_err(|e| Failure::input(e.to_string()))?;
        results["matrix"] = space_document(&induced);
    }
    Ok((results, "valid".into(), 0))
}

fn cmd_isometries(
    domain_path: &Path,
    codomain_path: Option<&Path>,
    first: bool,
    config: &RunConfig,
    loader: &mut Loader,
) -> CmdResult {
    let domain = Arc::new(load_space_from(loader, domain_path)?);
    let codomain = match codomain_path {
        Some(p) => Arc::new(load_space_from(loader, p)?),
        None => domain.clone(),
    };
    let search = config.search();
    let isos = if first {
        match first_isometry(&domain, &codomain, &search).map_err(isometry_failure)? {
            Some(f) => vec![f],
            None => Vec::new(),
        }
    } else {
        enumerate_isometries(&domain, &codomain, &search).map_err(isometry_failure)?
    };
    let maps: Vec<Value> = isos.iter().map(map_value).collect();
    let mut results = json!({
        "count": isos.len(),
        "maps": maps,
    });
    if codomain_path.is_none() && !first {
        results["group"] = group_check(&domain, &isos);
    }
    let verdict = if isos.is_empty() { "none" } else { "found" };
    Ok((results, verdict.into(), 0))
}

/// Group axioms for an endomorphism enumeration, by membership in the
/// returned set of maps.
fn group_check(space: &Arc<Space>, isos: &[Isometry]) -> Value {
    let members: HashSet<Vec<usize>> = isos.iter().map(|f| f.map().to_vec()).collect();
    let identity: Vec<usize> = (0..space.len()).collect();
    let has_identity = members.contains(&identity);
    let mut closed = true;
    let mut inverses = true;
    for f in isos {
        if !members.contains(f.invert().map()) {
            inverses = false;
        }
        for g in isos {
            let composed: Vec<usize> = g.map().iter().map(|&i| f.apply(i)).collect();
            if !members.contains(&composed) {
                closed = false;
            }
        }
    }
    json!({
        "identity": has_identity,
        "closed": closed,
        "inverses": inverses,
    })
}

fn cmd_decompose(
    products: &[PathBuf],
    map: Option<&Path>,
    all: bool,
    config: &RunConfig,
    loader: &mut Loader,
) -> CmdResult {
    if all == map.is_some() {
        return Err(Failure::usage("specify exactly one of --all or --map FILE"));
    }
    let domain = Arc::new(Space::Product(parse_product_from(loader, &products[0])?));
    let codomain = match products.get(1) {
        Some(p) => Arc::new(Space::Product(parse_product_from(loader, p)?)),
        None => domain.clone(),
    };
    let isos = if all {
        enumerate_isometries(&domain, &codomain, &config.search()).map_err(isometry_failure)?
    } else {
        let bytes = loader.read(map.expect("checked above"))?;
        let index_map = parse_map_file(&bytes, &domain, &codomain)?;
        let f = Isometry::new(domain.clone(), codomain.clone(), index_map)
            .map_err(|e| Failure::input(format!("map is not an isometry: {e}")))?;
        vec![f]
    };
    let mut certificates = Vec::with_capacity(isos.len());
    let mut irreducible = 0usize;
    let mut violations = 0usize;
    for f in &isos {
        let cert = decompose(f).map_err(|e| Failure::input(e.to_string()))?;
        match &cert {
            ReducibilityCertificate::Irreducible(_) => irreducible += 1,
            ReducibilityCertificate::HypothesisViolation(_) => violations += 1,
            ReducibilityCertificate::Reducible(_) => {}
        }
        certificates.push(certificate_value(f, &cert));
    }
    let results = json!({
        "count": isos.len(),
        "reducible": isos.len() - irreducible - violations,
        "irreducible": irreducible,
        "violations": violations,
        "certificates": certificates,
    });
    let (verdict, code) = if violations > 0 {
        ("hypothesis-violation", 3)
    } else if irreducible > 0 {
        ("irreducible-found", 2)
    } else {
        ("all-reducible", 0)
    };
    Ok((results, verdict.into(), code))
}

fn certificate_value(f: &Isometry, cert: &ReducibilityCertificate) -> Value {
    match cert {
        ReducibilityCertificate::Reducible(d) => {
            let factor_maps: Vec<Value> = d
                .factor_maps()
                .iter()
                .enumerate()
                .map(|(k, fm)| {
                    json!({
                        "axis": k,
                        "image_axis": d.perm()[k],
                        "map": map_value(fm),
                    })
                })
                .collect();
            json!({
                "verdict": "reducible",
                "map": map_value(f),
                "perm": d.perm(),
                "factor_maps": factor_maps,
            })
        }
        ReducibilityCertificate::Irreducible(w) => json!({
            "verdict": "irreducible",
            "map": map_value(f),
            "witness": witness_value(f, w),
        }),
        ReducibilityCertificate::HypothesisViolation(v) => json!({
            "verdict": "hypothesis-violation",
            "map": map_value(f),
            "violation": violation_value(v),
        }),
    }
}

fn witness_value(f: &Isometry, w: &IrreducibilityWitness) -> Value {
    let dom = f.domain().as_product();
    let cod = f.codomain().as_product();
    match w {
        IrreducibilityWitness::ImageNotSlice { axis, slice, image, image_axes } => {
            let slice_points = dom.map(|p| {
                Value::Array(
                    slice
                        .points(p)
                        .iter()
                        .map(|pt| product_point_value(p, pt))
                        .collect(),
                )
            });
            let image_points = cod.map(|q| {
                json!([product_point_value(q, &image.0), product_point_value(q, &image.1)])
            });
            json!({
                "kind": "image-not-slice",
                "axis": axis,
                "slice": slice_points.unwrap_or(Value::Null),
                "image": image_points.unwrap_or(Value::Null),
                "image_axes": image_axes,
            })
        }
        IrreducibilityWitness::AxisCollision { first_axis, second_axis, image_axis } => json!({
            "kind": "axis-collision",
            "first_axis": first_axis,
            "second_axis": second_axis,
            "image_axis": image_axis,
        }),
        IrreducibilityWitness::FactorMapInvalid { axis, image_axis, source } => json!({
            "kind": "factor-map-invalid",
            "axis": axis,
            "image_axis": image_axis,
            "reason": source.to_string(),
        }),
        IrreducibilityWitness::ReconstructMismatch { point, expected, got } => json!({
            "kind": "reconstruct-mismatch",
            "point": dom.map(|p| product_point_value(p, point)).unwrap_or(Value::Null),
            "expected": cod.map(|q| product_point_value(q, expected)).unwrap_or(Value::Null),
            "got": cod.map(|q| product_point_value(q, got)).unwrap_or(Value::Null),
        }),
    }
}

fn violation_value(v: &HypothesisViolation) -> Value {
    match v {
        HypothesisViolation::FactorCount { domain_factors, codomain_factors } => json!({
            "kind": "factor-count",
            "domain_factors": domain_factors,
            "codomain_factors": codomain_factors,
        }),
        HypothesisViolation::PointFactor { on_domain, axis } => json!({
            "kind": "one-point-factor",
            "on_domain": on_domain,
            "axis": axis,
        }),
    }
}

fn cmd_quad(
    dim: Option<usize>,
    scale: Rat,
    target: Option<&Path>,
    resolution: Option<Rat>,
    max_dim: bool,
    config: &RunConfig,
    loader: &mut Loader,
) -> CmdResult {
    let Some(target) = target else {
        if max_dim {
            return Err(Failure::usage("--max-dim requires --target"));
        }
        let dim = dim.ok_or_else(|| Failure::usage("--dim is required without --target"))?;
        let quad = QuadGraph::new(dim, scale).map_err(quad_failure)?;
        let vertices: Vec<Value> = (0..quad.vertex_count())
            .map(|v| {
                json!({
                    "label": quad.vertex_label(v),
                    "coefficients": quad.vertex(v),
                })
            })
            .collect();
        let edges: Vec<Value> = quad
            .edges()
            .iter()
            .map(|&(u, v)| json!([quad.vertex_label(u), quad.vertex_label(v)]))
            .collect();
        let results = json!({
            "dim": quad.dim(),
            "scale": rat_value(quad.scale()),
            "vertex_count": quad.vertex_count(),
            "edge_count": quad.edges().len(),
            "vertices": vertices,
            "edges": edges,
        });
        return Ok((results, "built".into(), 0));
    };

    let product = parse_product_from(loader, target)?;
    let resolution = resolution.unwrap_or(scale);
    let search = config.search();

    if max_dim {
        let k = match max_quad_dimension(&product, scale, resolution, &search) {
            Ok(k) => k,
            Err(e) => return Err(quad_failure(e)),
        };
        let embedding = if k > 0 {
            find_quad_embedding(&product, k, scale, resolution, &search).map_err(quad_failure)?
        } else {
            None
        };
        let results = json!({
            "max_dim": k,
            "scale": rat_value(scale),
            "resolution": rat_value(resolution),
            "embedding": embedding.map(|e| embedding_value(&e)).unwrap_or(Value::Null),
        });
        return Ok((results, format!("max dimension {k}"), 0));
    }

    if let Some(d) = dim {
        if d != product.factor_count() {
            return Err(Failure::usage(format!(
                "--dim {d} conflicts with the {}-factor target; chain embeddings use one axis per factor",
                product.factor_count()
            )));
        }
    }
    let chains = product
        .factors()
        .iter()
        .enumerate()
        .map(|(k, factor)| {
            find_chain(factor, scale * Rat::from(4), resolution).ok_or_else(|| {
                Failure::input(format!(
                    "factor {k} has no geodesic chain of length 4 x {scale} at step {resolution}"
                ))
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let e = embed_quad(&product, &chains, scale).map_err(quad_failure)?;
    let report = e.admissibility();
    let standard = matches!(e.standardness(), Standardness::Standard { .. });
    let multiplicities: Vec<usize> =
        (0..product.factor_count()).map(|j| e.q_statistic(j)).collect();
    let admissible = report.is_admissible();
    let failures: Vec<Value> = report
        .failures()
        .map(|((u, v), verdict)| {
            json!({
                "edge": [e.quad().vertex_label(*u), e.quad().vertex_label(*v)],
                "problem": format!("{verdict:?}"),
            })
        })
        .collect();
    let results = json!({
        "dim": product.factor_count(),
        "scale": rat_value(scale),
        "resolution": rat_value(e.resolution()),
        "embedding": embedding_value(&e),
        "isometric_on_vertices": e.is_isometric_on_vertices(),
        "admissible": admissible,
        "standard": standard,
        "tip_multiplicities": multiplicities,
        "failures": failures,
    });
    let certified = admissible && standard && e.is_isometric_on_vertices();
    let (verdict, code) = if certified { ("certified", 0) } else { ("not-certified", 2) };
    Ok((results, verdict.into(), code))
}

fn embedding_value(e: &crate::quad::QuadEmbedding) -> Value {
    let quad = e.quad();
    let target = e.target();
    Value::Object(
        (0..quad.vertex_count())
            .map(|v| (quad.vertex_label(v), product_point_value(target, &e.image(v))))
            .collect(),
    )
}

fn cmd_verify(
    suite: &str,
    criteria: &[usize],
    config: &RunConfig,
    err: &mut dyn Write,
) -> CmdResult {
    if suite != "desk" {
        return Err(Failure::usage(format!(
            "unknown suite '{suite}'; the only suite is 'desk'"
        )));
    }
    let ids: Vec<usize> = if criteria.is_empty() {
        (1..=CRITERIA.len()).collect()
    } else {
        for &id in criteria {
            if id == 0 || id > CRITERIA.len() {
                return Err(Failure::usage(format!(
                    "no check {id}; ids run from 1 to {}",
                    CRITERIA.len()
                )));
            }
        }
        criteria.to_vec()
    };
    let search = config.search();
    let mut rows = Vec::with_capacity(ids.len());
    let mut failed = 0usize;
    let _ = writeln!(err, "{:>2}  {:<26} {:>8}  result", "id", "check", "ms");
    for id in ids {
        let r = run_criterion(id, &search);
        let _ = writeln!(
            err,
            "{:>2}  {:<26} {:>8}  {}",
            r.id,
            r.name,
            r.millis,
            if r.passed { "pass" } else { "FAIL" }
        );
        if !r.passed {
            failed += 1;
            let _ = writeln!(err, "      {}", r.details);
        }
        rows.push(json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed,
            "details": r.details,
        }));
    }
    let passed = rows.len() - failed;
    let results = json!({
        "suite": "desk",
        "checks": rows,
        "passed": passed,
        "failed": failed,
    });
    if failed == 0 {
        Ok((results, "pass".into(), 0))
    } else {
        Ok((results, format!("{failed} of {} checks failed", passed + failed), 2))
    }
}
