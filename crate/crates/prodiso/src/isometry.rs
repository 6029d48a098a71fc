//! Distance-preserving bijections and their exhaustive enumeration.
//!
//! An [`Isometry`] is verified at construction: the map is checked to be
//! a bijection and to preserve every pairwise distance, so holding one
//! is holding a certificate. Enumeration is plain backtracking over
//! point assignments, pruned by per-point distance profiles and by
//! incremental pair checks against everything already assigned. No
//! canonical-form machinery: target spaces are small enough that the
//! profile pruning leaves almost nothing to explore.
//!
//! Searches carry an explicit node budget. Exceeding it is a reported
//! outcome, never a silent truncation; enumeration between spaces of
//! different cardinality returns the empty list, because "there is no
//! isometry" is an answer, not an error.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::metric::MetricSpace;
use crate::product::ProductSpace;
use crate::rat::Rat;

/// Either a flat metric space or a sup product, under one distance API.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Metric(MetricSpace),
    Product(ProductSpace),
}

impl Space {
    pub fn len(&self) -> usize {
        match self {
            Space::Metric(m) => m.len(),
            Space::Product(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> Rat {
        match self {
            Space::Metric(m) => m.dist(i, j),
            Space::Product(p) => p.dist_idx(i, j),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Space::Metric(m) => m.name().to_string(),
            Space::Product(p) => p.name(),
        }
    }

    /// Human-readable label of a point; for products, the tuple of
    /// factor labels.
    pub fn label(&self, i: usize) -> String {
        match self {
            Space::Metric(m) => m.label(i).to_string(),
            Space::Product(p) => {
                let point = p.point(i);
                let parts: Vec<&str> = point
                    .coords()
                    .iter()
                    .zip(p.factors())
                    .map(|(&c, f)| f.label(c))
                    .collect();
                format!("({})", parts.join(","))
            }
        }
    }

    /// Point index with the given label, if any.
    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        match self {
            Space::Metric(m) => m.index_of(label),
            Space::Product(_) => (0..self.len()).find(|&i| self.label(i) == label),
        }
    }

    pub fn as_product(&self) -> Option<&ProductSpace> {
        match self {
            Space::Product(p) => Some(p),
            Space::Metric(_) => None,
        }
    }
}

impl From<MetricSpace> for Space {
    fn from(m: MetricSpace) -> Self {
        Space::Metric(m)
    }
}

impl From<ProductSpace> for Space {
    fn from(p: ProductSpace) -> Self {
        Space::Product(p)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsometryError {
    #[error("domain has {domain} points but codomain has {codomain}")]
    SizeMismatch { domain: usize, codomain: usize },
    #[error("map has {got} entries for a domain of {expected} points")]
    NotTotal { expected: usize, got: usize },
    #[error("map is not a bijection: value {value} is repeated or out of range")]
    NotBijective { value: usize },
    #[error("distances disagree at the pair ({x}, {y})")]
    DistanceMismatch { x: usize, y: usize },
    #[error("composition requires the inner codomain to equal the outer domain")]
    DomainMismatch,
    #[error("search exceeded the node budget of {cap} ({found} maps found before stopping)")]
    SearchBudgetExceeded { cap: u64, found: usize },
}

/// A verified distance-preserving bijection between two spaces.
#[derive(Debug, Clone)]
pub struct Isometry {
    domain: Arc<Space>,
    codomain: Arc<Space>,
    map: Vec<usize>,
    inverse: Vec<usize>,
}

impl PartialEq for Isometry {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
            && self.domain == other.domain
            && self.codomain == other.codomain
    }
}

impl Eq for Isometry {}

impl Isometry {
    /// Verifies that `map` is a total bijection preserving all pairwise
    /// distances, and wraps it. The returned value is the certificate.
    pub fn new(
        domain: Arc<Space>,
        codomain: Arc<Space>,
        map: Vec<usize>,
    ) -> Result<Self, IsometryError> {
        let n = domain.len();
        if n != codomain.len() {
            return Err(IsometryError::SizeMismatch { domain: n, codomain: codomain.len() });
        }
        if map.len() != n {
            return Err(IsometryError::NotTotal { expected: n, got: map.len() });
        }
        let mut inverse = vec![usize::MAX; n];
        for (x, &y) in map.iter().enumerate() {
            if y >= n || inverse[y] != usize::MAX {
                return Err(IsometryError::NotBijective { value: y });
            }
            inverse[y] = x;
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if domain.dist(x, y) != codomain.dist(map[x], map[y]) {
                    return Err(IsometryError::DistanceMismatch { x, y });
                }
            }
        }
        Ok(Isometry { domain, codomain, map, inverse })
    }

    /// Wraps a map the search already verified pair-by-pair while
    /// building it. Debug builds re-verify.
    fn from_search(domain: Arc<Space>, codomain: Arc<Space>, map: Vec<usize>) -> Self {
        let mut inverse = vec![usize::MAX; map.len()];
        for (x, &y) in map.iter().enumerate() {
            inverse[y] = x;
        }
        let iso = Isometry { domain, codomain, map, inverse };
        debug_assert!(
            Isometry::new(iso.domain.clone(), iso.codomain.clone(), iso.map.clone()).is_ok()
        );
        iso
    }

    pub fn identity(space: Arc<Space>) -> Self {
        let map: Vec<usize> = (0..space.len()).collect();
        Isometry { domain: space.clone(), codomain: space, inverse: map.clone(), map }
    }

    pub fn domain(&self) -> &Arc<Space> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Space> {
        &self.codomain
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn apply_inverse(&self, y: usize) -> usize {
        self.inverse[y]
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && self.map.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// `self` after `inner`: the map `x -> self(inner(x))`.
    pub fn compose(&self, inner: &Isometry) -> Result<Isometry, IsometryError> {
        if self.domain != inner.codomain {
            return Err(IsometryError::DomainMismatch);
        }
        let map = inner.map.iter().map(|&y| self.map[y]).collect();
        let inverse = self.inverse.iter().map(|&y| inner.inverse[y]).collect();
        Ok(Isometry {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            map,
            inverse,
        })
    }

    pub fn invert(&self) -> Isometry {
        Isometry {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            map: self.inverse.clone(),
            inverse: self.map.clone(),
        }
    }

    /// The map as (domain label, codomain label) pairs in domain order.
    pub fn as_label_pairs(&self) -> Vec<(String, String)> {
        self.map
            .iter()
            .enumerate()
            .map(|(x, &y)| (self.domain.label(x), self.codomain.label(y)))
            .collect()
    }
}

/// Budget and parallelism knobs for the exhaustive searches.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Abort after this many search nodes (candidate extensions tried).
    pub node_cap: u64,
    /// Any value above 1 splits the top search level across the ambient
    /// rayon pool (the CLI sizes that pool); 1 keeps the search on the
    /// calling thread.
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { node_cap: 10_000_000, workers: 1 }
    }
}

/// Shared precomputation: distances coded as indices into one sorted
/// value table so the hot loops compare integers, plus per-point sorted
/// distance profiles (an isometry must map a point to one with an
/// identical profile).
struct SearchCtx {
    n: usize,
    dom: Vec<u32>,
    cod: Vec<u32>,
    /// candidates[x] = codomain points whose profile matches x's.
    candidates: Vec<Vec<usize>>,
}

impl SearchCtx {
    fn new(domain: &Space, codomain: &Space) -> SearchCtx {
        let n = domain.len();
        let mut values: Vec<Rat> = Vec::new();
        for s in [domain, codomain] {
            for i in 0..n {
                for j in (i + 1)..n {
                    values.push(s.dist(i, j));
                }
            }
        }
        values.sort();
        values.dedup();
        // The diagonal gets a sentinel; it never participates in checks.
        let code = |s: &Space| -> Vec<u32> {
            let mut m = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] = if i == j {
                        u32::MAX
                    } else {
                        let d = s.dist(i, j);
                        values.binary_search(&d).expect("value collected above") as u32
                    };
                }
            }
            m
        };
        let dom = code(domain);
        let cod = code(codomain);
        let profile = |m: &[u32], p: usize| -> Vec<u32> {
            let mut row: Vec<u32> = (0..n).filter(|&q| q != p).map(|q| m[p * n + q]).collect();
            row.sort_unstable();
            row
        };
        let cod_profiles: Vec<Vec<u32>> = (0..n).map(|p| profile(&cod, p)).collect();
        let candidates = (0..n)
            .map(|x| {
                let px = profile(&dom, x);
                (0..n).filter(|&y| cod_profiles[y] == px).collect()
            })
            .collect();
        SearchCtx { n, dom, cod, candidates }
    }

    #[inline]
    fn consistent(&self, map: &[usize], x: usize, y: usize) -> bool {
        let n = self.n;
        map.iter()
            .enumerate()
            .all(|(x2, &y2)| self.dom[x * n + x2] == self.cod[y * n + y2])
    }
}

struct Budget<'a> {
    nodes: &'a AtomicU64,
    cap: u64,
}

impl Budget<'_> {
    /// Counts one candidate extension; false once the budget is gone.
    #[inline]
    fn spend(&self) -> bool {
        self.nodes.fetch_add(1, Ordering::Relaxed) < self.cap
    }
}

fn extend(
    ctx: &SearchCtx,
    budget: &Budget<'_>,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    limit: Option<usize>,
    out: &mut Vec<Vec<usize>>,
) -> Result<(), ()> {
    if map.len() == ctx.n {
        out.push(map.clone());
        return Ok(());
    }
    let x = map.len();
    for &y in &ctx.candidates[x] {
        if used[y] || !ctx.consistent(map, x, y) {
            continue;
        }
        if !budget.spend() {
            return Err(());
        }
        map.push(y);
        used[y] = true;
        let r = extend(ctx, budget, map, used, limit, out);
        map.pop();
        used[y] = false;
        r?;
        if limit.is_some_and(|l| out.len() >= l) {
            return Ok(());
        }
    }
    Ok(())
}

fn search(
    domain: &Arc<Space>,
    codomain: &Arc<Space>,
    config: &SearchConfig,
    limit: Option<usize>,
) -> Result<Vec<Isometry>, IsometryError> {
    if domain.len() != codomain.len() {
        return Ok(Vec::new());
    }
    let ctx = SearchCtx::new(domain, codomain);
    let nodes = AtomicU64::new(0);
    let budget = Budget { nodes: &nodes, cap: config.node_cap };

    // On budget exhaustion the error carries how many complete maps had
    // been found, so callers can tell "cap too small" from "nothing there".
    let maps: Result<Vec<Vec<usize>>, usize> = if config.workers > 1 && limit.is_none() {
        // Split on the first point's candidates; each worker explores one
        // subtree. Concatenating in candidate order keeps the output
        // identical to the sequential enumeration.
        let first = ctx.candidates[0].clone();
        let per_branch: Vec<Result<Vec<Vec<usize>>, usize>> = first
            .par_iter()
            .map(|&y0| {
                let mut out = Vec::new();
                if !budget.spend() {
                    return Err(0);
                }
                let mut map = vec![y0];
                let mut used = vec![false; ctx.n];
                used[y0] = true;
                match extend(&ctx, &budget, &mut map, &mut used, None, &mut out) {
                    Ok(()) => Ok(out),
                    Err(()) => Err(out.len()),
                }
            })
            .collect();
        let mut acc = Vec::new();
        let mut lost = None;
        for r in per_branch {
            match r {
                Ok(v) => acc.extend(v),
                Err(n) => *lost.get_or_insert(0) += n,
            }
        }
        match lost {
            None => Ok(acc),
            Some(n) => Err(acc.len() + n),
        }
    } else {
        let mut map = Vec::with_capacity(ctx.n);
        let mut used = vec![false; ctx.n];
        let mut out = Vec::new();
        match extend(&ctx, &budget, &mut map, &mut used, limit, &mut out) {
            Ok(()) => Ok(out),
            Err(()) => Err(out.len()),
        }
    };

    match maps {
        Ok(ms) => Ok(ms
            .into_iter()
            .map(|m| Isometry::from_search(domain.clone(), codomain.clone(), m))
            .collect()),
        Err(found) => Err(IsometryError::SearchBudgetExceeded {
            cap: config.node_cap,
            found,
        }),
    }
}

/// All isometries from `domain` onto `codomain`, in lexicographic order
/// of the assignment vector. Empty when the cardinalities differ or no
/// distance-preserving bijection exists.
pub fn enumerate_isometries(
    domain: &Arc<Space>,
    codomain: &Arc<Space>,
    config: &SearchConfig,
) -> Result<Vec<Isometry>, IsometryError> {
    search(domain, codomain, config, None)
}

/// The lexicographically first isometry, if any. Stops as soon as one
/// is found, so this is the cheap existence test.
pub fn first_isometry(
    domain: &Arc<Space>,
    codomain: &Arc<Space>,
    config: &SearchConfig,
) -> Result<Option<Isometry>, IsometryError> {
    Ok(search(domain, codomain, config, Some(1))?.into_iter().next())
}

/// Verifies an explicit map, returning the certificate or the violation.
pub fn is_isometry(
    domain: &Arc<Space>,
    codomain: &Arc<Space>,
    map: Vec<usize>,
) -> Result<Isometry, IsometryError> {
    Isometry::new(domain.clone(), codomain.clone(), map)
}
