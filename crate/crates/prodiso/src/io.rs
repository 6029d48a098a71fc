//! File formats, run configuration, and report plumbing for the CLI.
//!
//! Three document kinds cross the boundary, all JSON: metric spaces
//! (`{"name", "points", "distances"}` with integer or `"p/q"` string
//! entries), products (`{"factors": [...]}` where a factor is an inline
//! space or `{"file": path}`), and maps (`{"map": [[point, point],
//! ...]}` where a point is a label string or, for products, an array of
//! factor labels). No floating point crosses the boundary in either
//! direction; rationals travel as exact strings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::isometry::Space;
use crate::metric::{MetricError, MetricSpace};
use crate::product::{ProductError, ProductPoint, ProductSpace};
use crate::rat::Rat;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("unknown point label {label:?}")]
    UnknownLabel { label: String },
    #[error("point {0} does not fit the space")]
    BadPoint(String),
    #[error("map lists {label:?} more than once")]
    DuplicateMapEntry { label: String },
    #[error("map is missing {missing} of {total} points")]
    IncompleteMap { missing: usize, total: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        // The serde message repeats the position; keep only the reason.
        let mut message = e.to_string();
        if let Some(at) = message.rfind(" at line ") {
            message.truncate(at);
        }
        IoError::Parse { line: e.line(), column: e.column(), message }
    }
}

/// Knobs shared by every subcommand: search budget, worker count, and
/// where and how the report goes.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub node_cap: u64,
    pub workers: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            node_cap: 10_000_000,
            workers: 1,
            format: Format::Json,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn search(&self) -> crate::isometry::SearchConfig {
        crate::isometry::SearchConfig { node_cap: self.node_cap, workers: self.workers }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// What every subcommand emits: the invocation, a digest pinning the
/// exact input bytes, a one-line verdict, the payload, and timing.
/// Everything except `timing_ms` is deterministic for fixed inputs and
/// configuration; the timing field is last so consumers can strip it.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub verdict: String,
    pub results: serde_json::Value,
    pub timing_ms: u128,
}

impl Report {
    /// Renders the report in the requested format to the configured
    /// destination (standard output unless a path was given).
    pub fn emit(&self, config: &RunConfig, out: &mut dyn Write) -> std::io::Result<()> {
        let rendered = match config.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        };
        match &config.output {
            Some(path) => fs::write(path, rendered),
            None => out.write_all(rendered.as_bytes()),
        }
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("command: {}\n", self.command));
        s.push_str(&format!("inputs:  sha256 {}\n", self.inputs_digest));
        s.push_str(&format!("verdict: {}\n", self.verdict));
        render_value(&self.results, 0, &mut s);
        s.push_str(&format!("timing_ms: {}\n", self.timing_ms));
        s
    }
}

fn render_value(value: &serde_json::Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                if v.is_object() || (v.is_array() && v.as_array().unwrap().len() > 8) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_value(v, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {v}\n"));
                }
            }
        }
        serde_json::Value::Array(items) => {
            for item in items {
                if item.is_object() {
                    out.push_str(&format!("{pad}-\n"));
                    render_value(item, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {item}\n"));
                }
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}

/// Hex SHA-256 over the concatenated bytes of the inputs, in argument
/// order, so a report is pinned to the exact documents it describes.
pub fn digest_inputs(chunks: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for chunk in chunks {
        hasher.update(chunk);
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct SpaceDoc {
    name: String,
    points: Vec<String>,
    distances: Vec<Vec<Rat>>,
}

#[derive(Debug, Deserialize)]
struct ProductDoc {
    factors: Vec<FactorDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FactorDoc {
    File { file: PathBuf },
    Inline(SpaceDoc),
}

/// Parses and validates a metric-space document.
pub fn parse_space_file(bytes: &[u8]) -> Result<MetricSpace, IoError> {
    let doc: SpaceDoc = serde_json::from_slice(bytes)?;
    Ok(MetricSpace::validate(doc.name, doc.points, doc.distances)?)
}

/// Serializes a space back into document form.
pub fn space_document(space: &MetricSpace) -> serde_json::Value {
    let n = space.len();
    let distances: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| space.dist(i, j)).collect())
        .collect();
    serde_json::to_value(SpaceDoc {
        name: space.name().to_string(),
        points: space.labels().to_vec(),
        distances,
    })
    .expect("space document serializes")
}

/// Parses a product document; `{"file": path}` factors are read
/// relative to `base_dir`.
pub fn parse_product_file(bytes: &[u8], base_dir: &Path) -> Result<ProductSpace, IoError> {
    let doc: ProductDoc = serde_json::from_slice(bytes)?;
    let mut factors = Vec::with_capacity(doc.factors.len());
    for factor in doc.factors {
        match factor {
            FactorDoc::Inline(space) => {
                factors.push(MetricSpace::validate(space.name, space.points, space.distances)?);
            }
            FactorDoc::File { file } => {
                let path = if file.is_absolute() { file } else { base_dir.join(file) };
                let bytes = fs::read(&path).map_err(|source| IoError::Read { path, source })?;
                factors.push(parse_space_file(&bytes)?);
            }
        }
    }
    Ok(ProductSpace::new(factors)?)
}

/// Reads a file as either kind of space: documents with a `factors`
/// key become products, everything else must be a metric space.
pub fn load_space(path: &Path) -> Result<Space, IoError> {
    let bytes = fs::read(path).map_err(|source| IoError::Read { path: path.into(), source })?;
    let probe: serde_json::Value = serde_json::from_slice(&bytes)?;
    if probe.get("factors").is_some() {
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(Space::Product(parse_product_file(&bytes, base)?))
    } else {
        Ok(Space::Metric(parse_space_file(&bytes)?))
    }
}

/// A point as it appears in documents: a label for flat spaces, an
/// array of factor labels for products.
pub fn point_to_value(space: &Space, idx: usize) -> serde_json::Value {
    match space {
        Space::Metric(m) => serde_json::Value::String(m.label(idx).to_string()),
        Space::Product(p) => {
            let point = p.point(idx);
            let labels: Vec<serde_json::Value> = point
                .coords()
                .iter()
                .zip(p.factors())
                .map(|(&c, f)| serde_json::Value::String(f.label(c).to_string()))
                .collect();
            serde_json::Value::Array(labels)
        }
    }
}

/// Resolves a document point to an index of the space.
pub fn point_from_value(space: &Space, value: &serde_json::Value) -> Result<usize, IoError> {
    match (space, value) {
        (Space::Metric(m), serde_json::Value::String(label)) => m
            .index_of(label)
            .ok_or_else(|| IoError::UnknownLabel { label: label.clone() }),
        (Space::Product(p), serde_json::Value::Array(labels)) => {
            if labels.len() != p.factor_count() {
                return Err(IoError::BadPoint(format!(
                    "{} labels for {} factors",
                    labels.len(),
                    p.factor_count()
                )));
            }
            let mut coords = Vec::with_capacity(labels.len());
            for (axis, label) in labels.iter().enumerate() {
                let label = label.as_str().ok_or_else(|| {
                    IoError::BadPoint(format!("coordinate {axis} is not a label"))
                })?;
                let c = p.factor(axis).index_of(label).ok_or_else(|| {
                    IoError::UnknownLabel { label: label.to_string() }
                })?;
                coords.push(c);
            }
            Ok(p.index_of(&ProductPoint::new(coords))?)
        }
        (Space::Metric(_), other) => {
            Err(IoError::BadPoint(format!("expected a label string, got {other}")))
        }
        (Space::Product(_), other) => {
            Err(IoError::BadPoint(format!("expected an array of labels, got {other}")))
        }
    }
}

#[derive(Debug, Deserialize)]
struct MapDoc {
    map: Vec<(serde_json::Value, serde_json::Value)>,
}

/// Parses a map document into an index map over the given spaces. The
/// result is total and duplicate-free; whether it is an isometry is the
/// library's decision.
pub fn parse_map_file(
    bytes: &[u8],
    domain: &Space,
    codomain: &Space,
) -> Result<Vec<usize>, IoError> {
    let doc: MapDoc = serde_json::from_slice(bytes)?;
    let n = domain.len();
    let mut map = vec![usize::MAX; n];
    for (from, to) in &doc.map {
        let i = point_from_value(domain, from)?;
        let j = point_from_value(codomain, to)?;
        if map[i] != usize::MAX {
            return Err(IoError::DuplicateMapEntry { label: domain.label(i) });
        }
        map[i] = j;
    }
    let missing = map.iter().filter(|&&v| v == usize::MAX).count();
    if missing > 0 {
        return Err(IoError::IncompleteMap { missing, total: n });
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_documents_round_trip() {
        let text = br#"{
            "name": "P3",
            "points": ["0", "1", "2"],
            "distances": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
        }"#;
        let space = parse_space_file(text).unwrap();
        assert_eq!(space.len(), 3);
        assert_eq!(space.dist(0, 2), Rat::from(2));
        let doc = space_document(&space);
        let again = parse_space_file(doc.to_string().as_bytes()).unwrap();
        assert_eq!(space, again);
    }

    #[test]
    fn rational_entries_parse_and_zero_denominators_do_not() {
        let good = br#"{
            "name": "half",
            "points": ["a", "b"],
            "distances": [[0, "1/2"], ["1/2", 0]]
        }"#;
        let space = parse_space_file(good).unwrap();
        assert_eq!(space.dist(0, 1), Rat::new(1, 2).unwrap());

        let bad = br#"{
            "name": "broken",
            "points": ["a", "b"],
            "distances": [[0, "3/0"], ["3/0", 0]]
        }"#;
        let err = parse_space_file(bad).unwrap_err();
        assert!(matches!(err, IoError::Parse { .. }), "got {err:?}");

        let float = br#"{
            "name": "float",
            "points": ["a", "b"],
            "distances": [[0, 0.5], [0.5, 0]]
        }"#;
        assert!(matches!(parse_space_file(float).unwrap_err(), IoError::Parse { .. }));
    }

    #[test]
    fn axiom_violations_pass_through() {
        let asymmetric = br#"{
            "name": "skew",
            "points": ["a", "b"],
            "distances": [[0, 1], [2, 0]]
        }"#;
        let err = parse_space_file(asymmetric).unwrap_err();
        assert!(matches!(err, IoError::Metric(MetricError::Axiom { .. })));
    }

    #[test]
    fn product_documents_support_inline_and_file_factors() {
        let dir = tempfile::tempdir().unwrap();
        let p2 = br#"{"name": "P2", "points": ["0", "1"], "distances": [[0, 1], [1, 0]]}"#;
        fs::write(dir.path().join("p2.json"), p2).unwrap();
        let product = br#"{
            "factors": [
                {"file": "p2.json"},
                {"name": "P3", "points": ["0", "1", "2"],
                 "distances": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}
            ]
        }"#;
        let p = parse_product_file(product, dir.path()).unwrap();
        assert_eq!(p.sizes(), &[2, 3]);
        assert_eq!(p.factor(0).name(), "P2");
    }

    #[test]
    fn points_round_trip_between_documents_and_indices() {
        let p5 = MetricSpace::path_graph(5, Rat::one()).unwrap();
        let p3 = MetricSpace::path_graph(3, Rat::one()).unwrap();
        let space = Space::Product(ProductSpace::new(vec![p5, p3]).unwrap());
        for idx in 0..space.len() {
            let value = point_to_value(&space, idx);
            assert_eq!(point_from_value(&space, &value).unwrap(), idx);
        }
        let err = point_from_value(&space, &serde_json::json!(["9", "0"])).unwrap_err();
        assert!(matches!(err, IoError::UnknownLabel { .. }));
        let err = point_from_value(&space, &serde_json::json!("0")).unwrap_err();
        assert!(matches!(err, IoError::BadPoint(_)));
    }

    #[test]
    fn map_documents_must_be_total_and_duplicate_free() {
        let p3 = Space::Metric(MetricSpace::path_graph(3, Rat::one()).unwrap());
        let full = br#"{"map": [["0", "2"], ["1", "1"], ["2", "0"]]}"#;
        assert_eq!(parse_map_file(full, &p3, &p3).unwrap(), vec![2, 1, 0]);

        let partial = br#"{"map": [["0", "2"]]}"#;
        assert!(matches!(
            parse_map_file(partial, &p3, &p3).unwrap_err(),
            IoError::IncompleteMap { missing: 2, total: 3 }
        ));

        let doubled = br#"{"map": [["0", "2"], ["0", "1"], ["2", "0"]]}"#;
        assert!(matches!(
            parse_map_file(doubled, &p3, &p3).unwrap_err(),
            IoError::DuplicateMapEntry { .. }
        ));
    }

    #[test]
    fn digests_are_stable_and_order_sensitive() {
        let a = digest_inputs(&[b"alpha", b"beta"]);
        let b = digest_inputs(&[b"alpha", b"beta"]);
        let c = digest_inputs(&[b"beta", b"alpha"]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
    }
}
