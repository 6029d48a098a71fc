//! Quadrilateral graphs and their embeddings into sup products.
//!
//! The graph `Q^m_r` lives in m coordinates: its vertices are the 2m
//! tips (one coordinate at plus or minus 2r, the rest 0) and the 2^m
//! sign vectors (every coordinate at plus or minus r); its edges join
//! vertices at sup distance exactly r, which pairs each tip with the
//! 2^{m-1} sign vectors matching its sign. The graph carries the sup
//! metric of the ambient coordinate space, so vertex distances are
//! always r, 2r, 3r, or 4r.
//!
//! An embedding assigns product points to vertices. Three grades of
//! quality matter, checked by separate certifiers: the constructor
//! only demands injectivity and correct edge lengths (so defective
//! embeddings can be built and examined); [`QuadEmbedding::is_isometric_on_vertices`]
//! checks every vertex pair; [`QuadEmbedding::admissibility`] checks
//! that each edge image is uniquely geodesic in the product.
//! [`max_quad_dimension`] searches for the largest m admitting an
//! embedding that passes all three, a quantity invariant under
//! isometries of the target.

use thiserror::Error;

use crate::isometry::{Isometry, SearchConfig};
use crate::metric::{GeodesicChain, MetricError};
use crate::product::{ProductError, ProductPoint, ProductSpace, SliceClass};
use crate::rat::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("dimension must be at least 1")]
    BadDimension,
    #[error("scale must be positive, got {scale}")]
    BadScale { scale: Rat },
    #[error("resolution {resolution} must be positive and divide the scale {scale}")]
    BadResolution { scale: Rat, resolution: Rat },
    #[error("expected {expected} chains (one per factor), got {got}")]
    WrongChainCount { expected: usize, got: usize },
    #[error("chain for axis {axis} has length {length}, need {needed}")]
    ChainTooShort { axis: usize, length: Rat, needed: Rat },
    #[error("chain for axis {axis} has no point at parameter {param}")]
    MissingParameter { axis: usize, param: Rat },
    #[error("expected {expected} vertex images, got {got}")]
    WrongVertexCount { expected: usize, got: usize },
    #[error("vertices {u} and {v} map to the same point")]
    NotInjective { u: usize, v: usize },
    #[error("edge ({u}, {v}) maps to a pair at distance {got}, expected {expected}")]
    EdgeDistance { u: usize, v: usize, expected: Rat, got: Rat },
    #[error("vertex {vertex} is not a tip outside the chosen pair")]
    BadVertex { vertex: usize },
    #[error("the isometry does not act on this embedding's target")]
    TargetMismatch,
    #[error("search exceeded the node budget of {cap} (dimension at least {lower_bound})")]
    Budget { cap: u64, lower_bound: usize },
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// The quadrilateral graph in `dim` coordinates at scale `r`. Vertices
/// are stored as small integer coefficient vectors in units of `r`
/// (entries in -2..=2); the metric is the ambient sup metric, so
/// `distance(u, v) = max_i |c_u[i] - c_v[i]| * r`.
///
/// Vertex order: tip pairs first (`+e_i` at index `2i`, `-e_i` at
/// `2i + 1`), then the sign vectors in binary order (bit `i` clear
/// means `+r` in coordinate `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadGraph {
    dim: usize,
    scale: Rat,
    vertices: Vec<Vec<i8>>,
    edges: Vec<(usize, usize)>,
}

impl QuadGraph {
    pub fn new(dim: usize, scale: Rat) -> Result<Self, QuadError> {
        if dim == 0 {
            return Err(QuadError::BadDimension);
        }
        if scale.is_zero() || scale.is_negative() {
            return Err(QuadError::BadScale { scale });
        }
        let mut vertices = Vec::with_capacity(2 * dim + (1usize << dim));
        for i in 0..dim {
            for tip in [2i8, -2] {
                let mut c = vec![0i8; dim];
                c[i] = tip;
                vertices.push(c);
            }
        }
        for s in 0..(1usize << dim) {
            let c: Vec<i8> = (0..dim)
                .map(|i| if (s >> i) & 1 == 0 { 1 } else { -1 })
                .collect();
            vertices.push(c);
        }
        let mut edges = Vec::new();
        for u in 0..vertices.len() {
            for v in (u + 1)..vertices.len() {
                if coeff_sup(&vertices[u], &vertices[v]) == 1 {
                    edges.push((u, v));
                }
            }
        }
        Ok(QuadGraph { dim, scale, vertices, edges })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> Rat {
        self.scale
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Coefficient vector of a vertex, in units of the scale.
    pub fn vertex(&self, v: usize) -> &[i8] {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Index of the positive (sign `+1`) or negative tip of pair `i`.
    pub fn tip(&self, pair: usize, positive: bool) -> usize {
        assert!(pair < self.dim, "tip pair out of range");
        2 * pair + usize::from(!positive)
    }

    pub fn is_tip(&self, v: usize) -> bool {
        v < 2 * self.dim
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        u != v && coeff_sup(&self.vertices[u], &self.vertices[v]) == 1
    }

    /// Sup distance between two vertices in the ambient coordinate
    /// space: always one of r, 2r, 3r, 4r.
    pub fn distance(&self, u: usize, v: usize) -> Rat {
        Rat::from(i64::from(coeff_sup(&self.vertices[u], &self.vertices[v]))) * self.scale
    }

    pub fn vertex_label(&self, v: usize) -> String {
        if self.is_tip(v) {
            let pair = v / 2;
            let sign = if v.is_multiple_of(2) { '+' } else { '-' };
            format!("{sign}e{pair}")
        } else {
            let parts: Vec<&str> = self.vertices[v]
                .iter()
                .map(|&c| if c > 0 { "+" } else { "-" })
                .collect();
            format!("({})", parts.join(","))
        }
    }

    /// All four-edge vertex paths from `+e_pair` to `-e_pair` passing
    /// through the given tip, which must lie outside the pair. Each
    /// path is a geodesic: its steps have length r and the endpoints
    /// are 4r apart. There are exactly `2^(2 dim - 4)` of them, so the
    /// path through a given tip is unique only in dimension 2.
    pub fn tip_geodesics_through(
        &self,
        pair: usize,
        through: usize,
    ) -> Result<Vec<[usize; 5]>, QuadError> {
        assert!(pair < self.dim, "tip pair out of range");
        if !self.is_tip(through) || through / 2 == pair {
            return Err(QuadError::BadVertex { vertex: through });
        }
        let start = self.tip(pair, true);
        let end = self.tip(pair, false);
        let signs = 2 * self.dim..self.vertex_count();
        let mut paths = Vec::new();
        for s in signs.clone() {
            if !self.is_edge(start, s) || !self.is_edge(s, through) {
                continue;
            }
            for s2 in signs.clone() {
                if self.is_edge(through, s2) && self.is_edge(s2, end) {
                    paths.push([start, s, through, s2, end]);
                }
            }
        }
        Ok(paths)
    }
}

fn coeff_sup(a: &[i8], b: &[i8]) -> i8 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap()
}

/// Why a single edge image passes or fails the uniquely-geodesic test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeVerdict {
    UniquelyGeodesic,
    /// A coordinate that realizes the sup distance branches or skips
    /// in its factor.
    CoordinateBranches { axis: usize },
    /// The product betweenness set has the wrong number of points at
    /// this multiple of the resolution.
    BetweennessCount { multiple: Rat, count: usize },
}

/// Per-edge admissibility results for a whole embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    edges: Vec<((usize, usize), EdgeVerdict)>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.edges.iter().all(|(_, v)| *v == EdgeVerdict::UniquelyGeodesic)
    }

    pub fn edges(&self) -> &[((usize, usize), EdgeVerdict)] {
        &self.edges
    }

    pub fn failures(&self) -> impl Iterator<Item = &((usize, usize), EdgeVerdict)> {
        self.edges.iter().filter(|(_, v)| *v != EdgeVerdict::UniquelyGeodesic)
    }
}

/// Verdict of the tip-slice test, with the axis assignment when it
/// holds.
#[derive(Debug, Clone, PartialEq)]
pub enum Standardness {
    /// Every tip pair's image is a slice; `axis_map[j]` is the axis of
    /// pair `j`'s image.
    Standard { axis_map: Vec<usize> },
    /// This tip pair's image varies over several axes.
    NotStandard { tip_pair: usize, image: (ProductPoint, ProductPoint), axes: Vec<usize> },
}

/// An assignment of product points to the vertices of a quadrilateral
/// graph. Construction enforces only injectivity and correct edge
/// lengths; the stronger properties (vertex-pair isometry, edge
/// admissibility) have their own certifiers, so failing embeddings can
/// be built and inspected.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadEmbedding {
    quad: QuadGraph,
    target: ProductSpace,
    vertex_map: Vec<usize>,
    resolution: Rat,
}

impl QuadEmbedding {
    /// Wraps a vertex assignment, verifying injectivity and that every
    /// edge maps to a pair at sup distance exactly the scale. The
    /// resolution must be positive and divide the scale; it sets the
    /// granularity of the admissibility certifier.
    pub fn new(
        quad: QuadGraph,
        target: ProductSpace,
        images: Vec<ProductPoint>,
        resolution: Rat,
    ) -> Result<Self, QuadError> {
        if resolution.is_zero()
            || resolution.is_negative()
            || !quad.scale().is_multiple_of(resolution)
        {
            return Err(QuadError::BadResolution { scale: quad.scale(), resolution });
        }
        if images.len() != quad.vertex_count() {
            return Err(QuadError::WrongVertexCount {
                expected: quad.vertex_count(),
                got: images.len(),
            });
        }
        let vertex_map: Vec<usize> = images
            .iter()
            .map(|p| target.index_of(p))
            .collect::<Result<_, _>>()?;
        for u in 0..vertex_map.len() {
            for v in (u + 1)..vertex_map.len() {
                if vertex_map[u] == vertex_map[v] {
                    return Err(QuadError::NotInjective { u, v });
                }
            }
        }
        for &(u, v) in quad.edges() {
            let got = target.dist_idx(vertex_map[u], vertex_map[v]);
            if got != quad.scale() {
                return Err(QuadError::EdgeDistance { u, v, expected: quad.scale(), got });
            }
        }
        Ok(QuadEmbedding { quad, target, vertex_map, resolution })
    }

    pub fn quad(&self) -> &QuadGraph {
        &self.quad
    }

    pub fn target(&self) -> &ProductSpace {
        &self.target
    }

    pub fn resolution(&self) -> Rat {
        self.resolution
    }

    /// Image of a vertex as a product point.
    pub fn image(&self, v: usize) -> ProductPoint {
        self.target.point(self.vertex_map[v])
    }

    pub fn image_idx(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    /// First vertex pair whose image distance differs from the graph
    /// distance, if any, as `(u, v, expected, got)`.
    pub fn first_distance_defect(&self) -> Option<(usize, usize, Rat, Rat)> {
        let n = self.quad.vertex_count();
        for u in 0..n {
            for v in (u + 1)..n {
                let expected = self.quad.distance(u, v);
                let got = self.target.dist_idx(self.vertex_map[u], self.vertex_map[v]);
                if got != expected {
                    return Some((u, v, expected, got));
                }
            }
        }
        None
    }

    /// Whether every vertex pair preserves distance, not just edges.
    pub fn is_isometric_on_vertices(&self) -> bool {
        self.first_distance_defect().is_none()
    }

    /// Checks each edge image for unique geodesity in the product and
    /// reports every edge's verdict.
    pub fn admissibility(&self) -> AdmissibilityReport {
        let edges = self
            .quad
            .edges()
            .iter()
            .map(|&(u, v)| {
                let verdict = edge_pair_verdict(
                    &self.target,
                    self.vertex_map[u],
                    self.vertex_map[v],
                    self.resolution,
                );
                ((u, v), verdict)
            })
            .collect();
        AdmissibilityReport { edges }
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility().is_admissible()
    }

    /// Checks that each tip pair's image is a slice and returns the
    /// axis assignment, or the first pair that spreads over several
    /// axes.
    pub fn standardness(&self) -> Standardness {
        let mut axis_map = Vec::with_capacity(self.quad.dim());
        for pair in 0..self.quad.dim() {
            let a = self.image(self.quad.tip(pair, true));
            let b = self.image(self.quad.tip(pair, false));
            match self
                .target
                .classify_slice(&[a.clone(), b.clone()])
                .expect("tip images are distinct points of the target")
            {
                SliceClass::Slice(s) => axis_map.push(s.axis()),
                SliceClass::NotASlice { witness, axes } => {
                    return Standardness::NotStandard { tip_pair: pair, image: witness, axes };
                }
            }
        }
        Standardness::Standard { axis_map }
    }

    pub fn is_standard(&self) -> bool {
        matches!(self.standardness(), Standardness::Standard { .. })
    }

    /// Number of axes whose coordinate distance realizes the sup
    /// distance between the images of tip pair `j`. Always at least 1.
    pub fn q_statistic(&self, j: usize) -> usize {
        let a = self.image(self.quad.tip(j, true));
        let b = self.image(self.quad.tip(j, false));
        let d = self.target.dist_idx(
            self.vertex_map[self.quad.tip(j, true)],
            self.vertex_map[self.quad.tip(j, false)],
        );
        (0..self.target.factor_count())
            .filter(|&l| self.target.factor(l).dist(a.coord(l), b.coord(l)) == d)
            .count()
    }

    /// The embedding followed by an isometry of the target: vertex `v`
    /// now maps to `f(image(v))`. The result is re-verified; an
    /// isometry can never break injectivity or edge lengths.
    pub fn compose_with(&self, f: &Isometry) -> Result<QuadEmbedding, QuadError> {
        let domain = f.domain().as_product().ok_or(QuadError::TargetMismatch)?;
        let codomain = f.codomain().as_product().ok_or(QuadError::TargetMismatch)?;
        if domain != &self.target {
            return Err(QuadError::TargetMismatch);
        }
        let images: Vec<ProductPoint> = self
            .vertex_map
            .iter()
            .map(|&i| codomain.point(f.apply(i)))
            .collect();
        QuadEmbedding::new(self.quad.clone(), codomain.clone(), images, self.resolution)
    }
}

/// Unique-geodesity verdict for one product pair at sup distance
/// exactly the would-be edge length. Two requirements: every coordinate
/// that realizes the sup distance is uniquely geodesic in its factor at
/// the given resolution, and the product betweenness set has exactly
/// one point at each multiple of the resolution.
fn edge_pair_verdict(product: &ProductSpace, x: usize, y: usize, resolution: Rat) -> EdgeVerdict {
    let d = product.dist_idx(x, y);
    let px = product.point(x);
    let py = product.point(y);
    for axis in 0..product.factor_count() {
        let factor = product.factor(axis);
        if factor.dist(px.coord(axis), py.coord(axis)) == d {
            let unique = factor
                .is_uniquely_geodesic_pair(px.coord(axis), py.coord(axis), resolution)
                .expect("resolution divides the edge length");
            if !unique {
                return EdgeVerdict::CoordinateBranches { axis };
            }
        }
    }
    let between = product.betweenness_idx(x, y);
    let mut t = Rat::zero();
    while t <= d {
        let count = between
            .iter()
            .filter(|&&z| product.dist_idx(x, z) == t)
            .count();
        if count != 1 {
            return EdgeVerdict::BetweennessCount { multiple: t, count };
        }
        t = t + resolution;
    }
    EdgeVerdict::UniquelyGeodesic
}

/// Builds the embedding determined by one geodesic chain per factor:
/// with chain `k` sampled at parameters `0, r, 2r, 3r, 4r`, the
/// positive tip of pair `k` takes the parameter-`4r` point in
/// coordinate `k`, the negative tip the parameter-`0` point, tips hold
/// the midpoint (parameter `2r`) elsewhere, and a sign vertex takes the
/// parameter-`3r` point where its sign is positive and the
/// parameter-`r` point where negative.
pub fn embed_quad(
    product: &ProductSpace,
    chains: &[GeodesicChain],
    r: Rat,
) -> Result<QuadEmbedding, QuadError> {
    let m = product.factor_count();
    if chains.len() != m {
        return Err(QuadError::WrongChainCount { expected: m, got: chains.len() });
    }
    let quad = QuadGraph::new(m, r)?;
    let four_r = Rat::from(4) * r;
    let mut samples = Vec::with_capacity(m);
    for (axis, chain) in chains.iter().enumerate() {
        if chain.length() < four_r {
            return Err(QuadError::ChainTooShort {
                axis,
                length: chain.length(),
                needed: four_r,
            });
        }
        let at = |mult: i64| -> Result<usize, QuadError> {
            let param = Rat::from(mult) * r;
            chain
                .point_at(param)
                .ok_or(QuadError::MissingParameter { axis, param })
        };
        // Parameters 0, r, 2r, 3r, 4r along the chain.
        samples.push([at(0)?, at(1)?, at(2)?, at(3)?, at(4)?]);
    }
    let images: Vec<ProductPoint> = (0..quad.vertex_count())
        .map(|v| {
            let coords: Vec<usize> = quad
                .vertex(v)
                .iter()
                .enumerate()
                .map(|(axis, &c)| samples[axis][(c + 2) as usize])
                .collect();
            ProductPoint::new(coords)
        })
        .collect();
    QuadEmbedding::new(quad, product.clone(), images, r)
}

/// Pairwise distance-class relations over a product's points, as one
/// bitset row per point: `rows[c][x]` holds `y` iff the pair `(x, y)`
/// is in class `c`. Classes 2, 3, 4 are plain sup distance at that
/// multiple of the scale; class 1 additionally requires the pair to
/// pass the edge verdict, since every vertex pair at distance r in a
/// quadrilateral graph is an edge.
struct Relations {
    words: usize,
    rows: [Vec<Vec<u64>>; 4],
}

impl Relations {
    fn build(product: &ProductSpace, r: Rat, resolution: Rat) -> Self {
        let n = product.len();
        let words = n.div_ceil(64);
        let mut rows: [Vec<Vec<u64>>; 4] =
            std::array::from_fn(|_| vec![vec![0u64; words]; n]);
        for x in 0..n {
            for y in (x + 1)..n {
                let d = product.dist_idx(x, y);
                for (c, row) in rows.iter_mut().enumerate() {
                    let mult = Rat::from(c as i64 + 1) * r;
                    if d != mult {
                        continue;
                    }
                    let related = c != 0
                        || edge_pair_verdict(product, x, y, resolution)
                            == EdgeVerdict::UniquelyGeodesic;
                    if related {
                        row[x][y / 64] |= 1 << (y % 64);
                        row[y][x / 64] |= 1 << (x % 64);
                    }
                }
            }
        }
        Relations { words, rows }
    }

    /// Bitset of points in class `class` (1 to 4, units of the scale)
    /// with respect to `x`.
    fn row(&self, class: i8, x: usize) -> &[u64] {
        &self.rows[(class - 1) as usize][x]
    }
}

fn bits_and(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= s;
    }
}

fn bits_clear(dst: &mut [u64], bit: usize) {
    dst[bit / 64] &= !(1 << (bit % 64));
}

/// Keeps only the bits strictly above `bit`.
fn bits_keep_above(dst: &mut [u64], bit: usize) {
    let word_idx = bit / 64;
    let offset = bit % 64;
    for (w, word) in dst.iter_mut().enumerate() {
        if w < word_idx {
            *word = 0;
        } else if w == word_idx {
            *word = if offset == 63 { 0 } else { *word & (u64::MAX << (offset + 1)) };
        }
    }
}

fn bits_is_empty(bits: &[u64]) -> bool {
    bits.iter().all(|&w| w == 0)
}

fn bits_iter(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                None
            } else {
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            }
        })
    })
}

struct QuadSearch<'a> {
    quad: QuadGraph,
    rel: &'a Relations,
    /// Required relation class between each vertex pair, in units of r.
    req: Vec<Vec<i8>>,
    spent: &'a mut u64,
    cap: u64,
}

impl QuadSearch<'_> {
    /// Depth-first assignment of vertices in index order (tip pairs
    /// first, then sign vertices) with forward checking: after each
    /// placement every later vertex's candidate set is intersected with
    /// the placed point's relation row, and the branch dies as soon as
    /// any candidate set empties. Tip placements are symmetry-reduced:
    /// within a pair the positive tip takes the smaller point index,
    /// and positive tips increase across pairs, both justified by
    /// coordinate flips and permutations of the graph.
    fn extend(
        &mut self,
        level: usize,
        assignment: &mut Vec<usize>,
        domains: &[Vec<u64>],
    ) -> Result<Option<Vec<usize>>, QuadError> {
        let total = self.quad.vertex_count();
        if level == total {
            return Ok(Some(assignment.clone()));
        }
        let candidates: Vec<usize> = bits_iter(&domains[level]).collect();
        for p in candidates {
            *self.spent += 1;
            if *self.spent > self.cap {
                return Err(QuadError::Budget { cap: self.cap, lower_bound: 0 });
            }
            let mut next: Vec<Vec<u64>> = domains.to_vec();
            let mut dead = false;
            let positive_tip = self.quad.is_tip(level) && level.is_multiple_of(2);
            for (w, domain) in next.iter_mut().enumerate().skip(level + 1) {
                bits_and(domain, self.rel.row(self.req[level][w], p));
                bits_clear(domain, p);
                // Symmetry: the negative tip of this pair and the next
                // pair's positive tip must take larger point indices.
                if positive_tip && (w == level + 1 || (w == level + 2 && self.quad.is_tip(w))) {
                    bits_keep_above(domain, p);
                }
                if bits_is_empty(domain) {
                    dead = true;
                    break;
                }
            }
            if dead {
                continue;
            }
            assignment.push(p);
            if let Some(found) = self.extend(level + 1, assignment, &next)? {
                return Ok(Some(found));
            }
            assignment.pop();
        }
        Ok(None)
    }
}

/// Searches for a vertex assignment of `Q^dim_r` into the product that
/// is isometric on all vertex pairs and whose edges are uniquely
/// geodesic at the given resolution. Returns the first embedding found
/// in search order, or `None` when none exists.
pub fn find_quad_embedding(
    product: &ProductSpace,
    dim: usize,
    r: Rat,
    resolution: Rat,
    config: &SearchConfig,
) -> Result<Option<QuadEmbedding>, QuadError> {
    check_scale(r, resolution)?;
    let rel = Relations::build(product, r, resolution);
    let mut spent = 0u64;
    search_dim(product, dim, r, resolution, &rel, &mut spent, config.node_cap)
}

fn check_scale(r: Rat, resolution: Rat) -> Result<(), QuadError> {
    if r.is_zero() || r.is_negative() {
        return Err(QuadError::BadScale { scale: r });
    }
    if resolution.is_zero() || resolution.is_negative() || !r.is_multiple_of(resolution) {
        return Err(QuadError::BadResolution { scale: r, resolution });
    }
    Ok(())
}

fn search_dim(
    product: &ProductSpace,
    dim: usize,
    r: Rat,
    resolution: Rat,
    rel: &Relations,
    spent: &mut u64,
    cap: u64,
) -> Result<Option<QuadEmbedding>, QuadError> {
    let quad = QuadGraph::new(dim, r)?;
    let total = quad.vertex_count();
    if total > product.len() {
        return Ok(None);
    }
    let req: Vec<Vec<i8>> = (0..total)
        .map(|u| {
            (0..total)
                .map(|v| if u == v { 0 } else { coeff_sup(quad.vertex(u), quad.vertex(v)) })
                .collect()
        })
        .collect();
    let n = product.len();
    let full: Vec<u64> = {
        let mut bits = vec![u64::MAX; rel.words];
        let extra = rel.words * 64 - n;
        if extra > 0 {
            *bits.last_mut().unwrap() >>= extra;
        }
        bits
    };
    let domains = vec![full; total];
    let mut search = QuadSearch { quad: quad.clone(), rel, req, spent, cap };
    let found = search.extend(0, &mut Vec::with_capacity(total), &domains)?;
    match found {
        None => Ok(None),
        Some(assignment) => {
            let images: Vec<ProductPoint> =
                assignment.iter().map(|&i| product.point(i)).collect();
            let embedding = QuadEmbedding::new(quad, product.clone(), images, resolution)?;
            debug_assert!(embedding.is_isometric_on_vertices());
            debug_assert!(embedding.is_admissible());
            Ok(Some(embedding))
        }
    }
}

/// The largest `k` such that `Q^k_r` embeds into the product
/// isometrically with uniquely geodesic edges, or 0 when not even the
/// four-vertex graph fits. The search walks `k` upward and stops at the
/// first failure, which is sound because an embedding of `Q^{k+1}`
/// restricts to one of `Q^k`: keep tip pairs 1 to k and the sign
/// vertices that are positive in the last coordinate.
///
/// This quantity is invariant under isometries of the product, since
/// composing an embedding with an isometry preserves all the defining
/// conditions.
pub fn max_quad_dimension(
    product: &ProductSpace,
    r: Rat,
    resolution: Rat,
    config: &SearchConfig,
) -> Result<usize, QuadError> {
    check_scale(r, resolution)?;
    let rel = Relations::build(product, r, resolution);
    let mut spent = 0u64;
    let mut best = 0;
    let mut k = 1;
    while 2 * k + (1usize << k) <= product.len() {
        match search_dim(product, k, r, resolution, &rel, &mut spent, config.node_cap) {
            Ok(Some(_)) => best = k,
            Ok(None) => break,
            Err(QuadError::Budget { cap, .. }) => {
                return Err(QuadError::Budget { cap, lower_bound: best });
            }
            Err(e) => return Err(e),
        }
        k += 1;
    }
    Ok(best)
}
