//! Finite metric spaces with exact distances.
//!
//! A [`MetricSpace`] is a named, ordered list of points together with a
//! dense matrix of [`Rat`] distances. Construction goes through
//! [`MetricSpace::validate`], which checks every metric axiom and reports
//! the first violation with a witness, so a value of this type is a proof
//! that the axioms hold.
//!
//! The discrete stand-ins for geodesic notions live here too:
//! [`MetricSpace::betweenness`] collects the points on metric segments,
//! [`MetricSpace::is_uniquely_geodesic_pair`] decides whether a pair has
//! exactly one discrete geodesic at a declared resolution, and
//! [`GeodesicChain`] is a verified chain of points realizing a geodesic
//! at given parameters. Sub-resolution structure is invisible to these
//! predicates by design; callers declare the grain they care about.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::Rat;

/// Which metric axiom a matrix violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomKind {
    /// `d(i, j) != d(j, i)`.
    Asymmetry,
    /// `d(i, j) < 0`.
    Negative,
    /// `d(i, j) = 0` for distinct points.
    ZeroOffDiagonal,
    /// `d(i, i) != 0`.
    NonzeroDiagonal,
    /// `d(i, j) > d(i, k) + d(k, j)`.
    Triangle,
}

impl std::fmt::Display for AxiomKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AxiomKind::Asymmetry => "asymmetry",
            AxiomKind::Negative => "negative",
            AxiomKind::ZeroOffDiagonal => "zero-off-diagonal",
            AxiomKind::NonzeroDiagonal => "nonzero-diagonal",
            AxiomKind::Triangle => "triangle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("distance matrix is {rows}x{cols} but the space has {points} points")]
    Shape { points: usize, rows: usize, cols: usize },
    #[error("point label {label:?} appears more than once")]
    DuplicateLabel { label: String },
    #[error("metric axiom violated ({kind}) at points {witness:?}")]
    Axiom { kind: AxiomKind, witness: Vec<usize> },
    #[error("space must have at least one point")]
    Empty,
    #[error("point index {index} out of range for a space of {len} points")]
    PointOutOfRange { index: usize, len: usize },
    #[error("resolution {resolution} must be positive and divide the distance {distance}")]
    ResolutionMismatch { distance: Rat, resolution: Rat },
    #[error("invalid geodesic chain: {0}")]
    Chain(#[from] ChainError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain needs at least two points")]
    TooShort,
    #[error("parameters must increase strictly from 0 (point position {0})")]
    NotIncreasing(usize),
    #[error("consecutive points at positions {0} and {1} are not at the parameter gap apart")]
    GapMismatch(usize, usize),
    #[error("point at position {0} is not between the endpoints")]
    NotBetween(usize),
}

/// A finite metric space: ordered labeled points and a dense exact
/// distance matrix known to satisfy the metric axioms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSpace {
    name: String,
    labels: Vec<String>,
    /// Row-major `n x n` matrix; `dist[i * n + j] = d(points[i], points[j])`.
    dist: Vec<Rat>,
}

impl MetricSpace {
    /// Checks every axiom on the given matrix and wraps it on success.
    /// The triangle inequality is checked exhaustively over ordered
    /// triples, so validation is cubic in the point count; spaces here
    /// are desk-sized and this is the price of a real proof.
    pub fn validate(
        name: impl Into<String>,
        labels: Vec<String>,
        matrix: Vec<Vec<Rat>>,
    ) -> Result<Self, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(MetricError::DuplicateLabel { label: l.clone() });
            }
        }
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(MetricError::Shape {
                points: n,
                rows: matrix.len(),
                cols: matrix.first().map_or(0, Vec::len),
            });
        }
        for (i, row) in matrix.iter().enumerate() {
            if !row[i].is_zero() {
                return Err(MetricError::Axiom {
                    kind: AxiomKind::NonzeroDiagonal,
                    witness: vec![i],
                });
            }
            for (j, value) in row.iter().enumerate() {
                if value.is_negative() {
                    return Err(MetricError::Axiom {
                        kind: AxiomKind::Negative,
                        witness: vec![i, j],
                    });
                }
                if *value != matrix[j][i] {
                    return Err(MetricError::Axiom {
                        kind: AxiomKind::Asymmetry,
                        witness: vec![i, j],
                    });
                }
                if i != j && value.is_zero() {
                    return Err(MetricError::Axiom {
                        kind: AxiomKind::ZeroOffDiagonal,
                        witness: vec![i, j],
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if matrix[i][j] > matrix[i][k] + matrix[k][j] {
                        return Err(MetricError::Axiom {
                            kind: AxiomKind::Triangle,
                            witness: vec![i, j, k],
                        });
                    }
                }
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for row in matrix {
            dist.extend(row);
        }
        Ok(MetricSpace { name: name.into(), labels, dist })
    }

    /// Builds a space from a closed-form distance function that is known
    /// to be a metric (generators below). Debug builds re-check.
    fn from_fn(name: String, labels: Vec<String>, d: impl Fn(usize, usize) -> Rat) -> Self {
        let n = labels.len();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(d(i, j));
            }
        }
        let space = MetricSpace { name, labels, dist };
        debug_assert!(space.recheck().is_ok());
        space
    }

    /// Re-runs full validation on the stored matrix.
    pub fn recheck(&self) -> Result<(), MetricError> {
        let n = self.len();
        let matrix: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| self.dist(i, j)).collect())
            .collect();
        MetricSpace::validate(self.name.clone(), self.labels.clone(), matrix).map(|_| ())
    }

    /// The path graph on `n` points with consecutive points `step` apart:
    /// `d(i, j) = |i - j| * step`. Uniquely geodesic at resolution `step`.
    pub fn path_graph(n: usize, step: Rat) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if step.is_negative() || step.is_zero() {
            return Err(MetricError::ResolutionMismatch { distance: Rat::zero(), resolution: step });
        }
        let name = if step == Rat::one() {
            format!("P{n}")
        } else {
            format!("P{n}(step {step})")
        };
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(Self::from_fn(name, labels, |i, j| {
            step * (i.abs_diff(j) as i64)
        }))
    }

    /// The cycle graph on `n >= 3` points with unit steps:
    /// `d(i, j) = min(|i - j|, n - |i - j|)`. Antipodal pairs on even
    /// cycles have two geodesics, which makes this the counterexample
    /// space for unique-geodesity tests.
    pub fn cycle_graph(n: usize) -> Result<Self, MetricError> {
        if n < 3 {
            return Err(MetricError::Empty);
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(Self::from_fn(format!("C{n}"), labels, move |i, j| {
            let around = i.abs_diff(j);
            Rat::from(around.min(n - around) as i64)
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dist(&self, i: usize, j: usize) -> Rat {
        self.dist[i * self.len() + j]
    }

    pub fn diameter(&self) -> Rat {
        self.dist.iter().copied().max().unwrap_or(Rat::zero())
    }

    /// All distinct distance values, sorted ascending.
    pub fn distance_values(&self) -> Vec<Rat> {
        let mut v: Vec<Rat> = self.dist.clone();
        v.sort();
        v.dedup();
        v
    }

    /// The subspace induced on a subset of points (distinct indices, in
    /// the given order). Restriction preserves every metric axiom, so no
    /// revalidation is needed; debug builds re-check anyway.
    pub fn induced(&self, subset: &[usize], name: impl Into<String>) -> Result<Self, MetricError> {
        if subset.is_empty() {
            return Err(MetricError::Empty);
        }
        for (pos, &p) in subset.iter().enumerate() {
            self.check_point(p)?;
            if subset[..pos].contains(&p) {
                return Err(MetricError::PointOutOfRange { index: p, len: self.len() });
            }
        }
        let labels = subset.iter().map(|&p| self.labels[p].clone()).collect();
        let mut dist = Vec::with_capacity(subset.len() * subset.len());
        for &i in subset {
            for &j in subset {
                dist.push(self.dist(i, j));
            }
        }
        let space = MetricSpace { name: name.into(), labels, dist };
        debug_assert!(space.recheck().is_ok());
        Ok(space)
    }

    /// The same space with points listed in a permuted order. `perm[i]`
    /// is the old index of the new point `i`.
    pub fn permute_points(&self, perm: &[usize]) -> Result<Self, MetricError> {
        let n = self.len();
        if perm.len() != n {
            return Err(MetricError::Shape { points: n, rows: perm.len(), cols: n });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(MetricError::PointOutOfRange { index: p, len: n });
            }
            seen[p] = true;
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let mut dist = Vec::with_capacity(n * n);
        for &i in perm {
            for &j in perm {
                dist.push(self.dist(i, j));
            }
        }
        Ok(MetricSpace { name: self.name.clone(), labels, dist })
    }

    fn check_point(&self, i: usize) -> Result<(), MetricError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(MetricError::PointOutOfRange { index: i, len: self.len() })
        }
    }

    /// Points on metric segments from `x` to `y`: all `z` with
    /// `d(x, z) + d(z, y) = d(x, y)`, in index order. Endpoints included.
    pub fn betweenness(&self, x: usize, y: usize) -> Result<Vec<usize>, MetricError> {
        self.check_point(x)?;
        self.check_point(y)?;
        let d = self.dist(x, y);
        Ok((0..self.len())
            .filter(|&z| self.dist(x, z) + self.dist(z, y) == d)
            .collect())
    }

    /// Whether the pair `(x, y)` has exactly one discrete geodesic at the
    /// given resolution. Two conditions, both over the betweenness set:
    ///
    /// 1. at every multiple `t` of the resolution with `0 <= t <= d(x,y)`
    ///    there is exactly one `z` with `d(x, z) = t`, and
    /// 2. any two between-points satisfy `|d(x,z) - d(x,z')| = d(z,z')`,
    ///    so the set is a single chain rather than parallel branches.
    ///
    /// The resolution must be positive and divide `d(x, y)` exactly.
    pub fn is_uniquely_geodesic_pair(
        &self,
        x: usize,
        y: usize,
        resolution: Rat,
    ) -> Result<bool, MetricError> {
        self.check_point(x)?;
        self.check_point(y)?;
        let d = self.dist(x, y);
        if resolution.is_zero() || resolution.is_negative() || !d.is_multiple_of(resolution) {
            return Err(MetricError::ResolutionMismatch { distance: d, resolution });
        }
        let between = self.betweenness(x, y)?;
        let mut t = Rat::zero();
        while t <= d {
            let hits = between
                .iter()
                .filter(|&&z| self.dist(x, z) == t)
                .count();
            if hits != 1 {
                return Ok(false);
            }
            t = t + resolution;
        }
        for (a, &z) in between.iter().enumerate() {
            for &z2 in &between[a + 1..] {
                if self.dist(x, z).abs_diff(self.dist(x, z2)) != self.dist(z, z2) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Every pair uniquely geodesic at one declared resolution. This is
    /// the admission test for factors of theorem-scale products.
    pub fn is_uniquely_geodesic_space(&self, resolution: Rat) -> Result<bool, MetricError> {
        for x in 0..self.len() {
            for y in (x + 1)..self.len() {
                if !self.dist(x, y).is_multiple_of(resolution) {
                    return Err(MetricError::ResolutionMismatch {
                        distance: self.dist(x, y),
                        resolution,
                    });
                }
                if !self.is_uniquely_geodesic_pair(x, y, resolution)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A verified discrete geodesic: points `z_0, ..., z_t` with strictly
/// increasing parameters starting at 0, where consecutive distances equal
/// the parameter gaps and every point lies between the endpoints. The
/// parameter of `z_i` is `d(z_0, z_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicChain {
    points: Vec<usize>,
    params: Vec<Rat>,
}

impl GeodesicChain {
    pub fn new(space: &MetricSpace, points: Vec<usize>) -> Result<Self, MetricError> {
        if points.len() < 2 {
            return Err(ChainError::TooShort.into());
        }
        for &p in &points {
            space.check_point(p)?;
        }
        let x = points[0];
        let y = *points.last().unwrap();
        let total = space.dist(x, y);
        let params: Vec<Rat> = points.iter().map(|&z| space.dist(x, z)).collect();
        for i in 1..points.len() {
            if params[i] <= params[i - 1] {
                return Err(ChainError::NotIncreasing(i).into());
            }
            if space.dist(points[i - 1], points[i]) != params[i] - params[i - 1] {
                return Err(ChainError::GapMismatch(i - 1, i).into());
            }
        }
        for (i, &z) in points.iter().enumerate() {
            if space.dist(x, z) + space.dist(z, y) != total {
                return Err(ChainError::NotBetween(i).into());
            }
        }
        Ok(GeodesicChain { points, params })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn params(&self) -> &[Rat] {
        &self.params
    }

    pub fn length(&self) -> Rat {
        *self.params.last().unwrap()
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.points[0], *self.points.last().unwrap())
    }

    /// The chain point at parameter `t`, if one exists.
    pub fn point_at(&self, t: Rat) -> Option<usize> {
        self.params
            .iter()
            .position(|&p| p == t)
            .map(|i| self.points[i])
    }
}

/// Searches for a geodesic chain of the given length sampled at every
/// multiple of `step`, preferring lexicographically small point choices.
/// Returns the first chain found in scan order, or `None`.
pub fn find_chain(space: &MetricSpace, length: Rat, step: Rat) -> Option<GeodesicChain> {
    if step.is_zero() || step.is_negative() || !length.is_multiple_of(step) {
        return None;
    }
    let steps = (length / step).numer() as usize;
    for x in 0..space.len() {
        'pair: for y in 0..space.len() {
            if space.dist(x, y) != length {
                continue;
            }
            let mut points = vec![x];
            for s in 1..=steps {
                let t = step * (s as i64);
                let prev = *points.last().unwrap();
                let next = (0..space.len()).find(|&z| {
                    space.dist(x, z) == t
                        && space.dist(prev, z) == step
                        && space.dist(x, z) + space.dist(z, y) == length
                });
                match next {
                    Some(z) => points.push(z),
                    None => continue 'pair,
                }
            }
            if let Ok(chain) = GeodesicChain::new(space, points) {
                return Some(chain);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn path_graph_distances() {
        let p5 = MetricSpace::path_graph(5, Rat::one()).unwrap();
        assert_eq!(p5.dist(0, 4), Rat::from(4));
        assert_eq!(p5.dist(2, 2), Rat::zero());
        assert_eq!(p5.name(), "P5");

        let p2 = MetricSpace::path_graph(2, rat("3/2")).unwrap();
        assert_eq!(p2.dist(0, 1), rat("3/2"));

        let p1 = MetricSpace::path_graph(1, Rat::one()).unwrap();
        assert_eq!(p1.len(), 1);
        assert!(p1.recheck().is_ok());
    }

    #[test]
    fn cycle_graph_distances() {
        let c6 = MetricSpace::cycle_graph(6).unwrap();
        assert_eq!(c6.dist(0, 3), Rat::from(3));
        assert_eq!(c6.dist(0, 5), Rat::one());
        assert_eq!(c6.diameter(), Rat::from(3));
        assert!(MetricSpace::cycle_graph(2).is_err());
    }

    #[test]
    fn validate_accepts_a_legal_matrix() {
        let m = vec![
            vec![Rat::zero(), Rat::one()],
            vec![Rat::one(), Rat::zero()],
        ];
        let s = MetricSpace::validate("pair", vec!["a".into(), "b".into()], m).unwrap();
        assert_eq!(s.dist(0, 1), Rat::one());
    }

    #[test]
    fn validate_reports_each_violation_with_a_witness() {
        let labels = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();

        // d(a, c) = 5 > d(a, b) + d(b, c) = 2.
        let m = vec![
            vec![Rat::zero(), Rat::one(), Rat::from(5)],
            vec![Rat::one(), Rat::zero(), Rat::one()],
            vec![Rat::from(5), Rat::one(), Rat::zero()],
        ];
        assert_eq!(
            MetricSpace::validate("t", labels(3), m),
            Err(MetricError::Axiom { kind: AxiomKind::Triangle, witness: vec![0, 2, 1] })
        );

        let m = vec![
            vec![Rat::zero(), Rat::one()],
            vec![Rat::from(2), Rat::zero()],
        ];
        assert!(matches!(
            MetricSpace::validate("t", labels(2), m),
            Err(MetricError::Axiom { kind: AxiomKind::Asymmetry, .. })
        ));

        let m = vec![
            vec![Rat::zero(), Rat::zero()],
            vec![Rat::zero(), Rat::zero()],
        ];
        assert!(matches!(
            MetricSpace::validate("t", labels(2), m),
            Err(MetricError::Axiom { kind: AxiomKind::ZeroOffDiagonal, .. })
        ));

        let m = vec![
            vec![Rat::zero(), Rat::from(-1)],
            vec![Rat::from(-1), Rat::zero()],
        ];
        assert!(matches!(
            MetricSpace::validate("t", labels(2), m),
            Err(MetricError::Axiom { kind: AxiomKind::Negative, .. })
        ));

        let m = vec![
            vec![Rat::one(), Rat::one()],
            vec![Rat::one(), Rat::zero()],
        ];
        assert!(matches!(
            MetricSpace::validate("t", labels(2), m),
            Err(MetricError::Axiom { kind: AxiomKind::NonzeroDiagonal, .. })
        ));

        let m = vec![vec![Rat::zero()]];
        assert!(matches!(
            MetricSpace::validate("t", labels(2), m),
            Err(MetricError::Shape { .. })
        ));

        assert!(matches!(
            MetricSpace::validate("t", vec!["a".into(), "a".into()], vec![]),
            Err(MetricError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn betweenness_matches_direct_enumeration() {
        let p5 = MetricSpace::path_graph(5, Rat::one()).unwrap();
        assert_eq!(p5.betweenness(0, 4).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(p5.betweenness(1, 3).unwrap(), vec![1, 2, 3]);

        // On C4 both ways around the antipodal pair are geodesics.
        let c4 = MetricSpace::cycle_graph(4).unwrap();
        let expected: Vec<usize> = (0..4)
            .filter(|&z| c4.dist(0, z) + c4.dist(z, 2) == c4.dist(0, 2))
            .collect();
        assert_eq!(expected, vec![0, 1, 2, 3]);
        assert_eq!(c4.betweenness(0, 2).unwrap(), expected);
    }

    #[test]
    fn unique_geodesity_on_paths_and_cycles() {
        let p5 = MetricSpace::path_graph(5, Rat::one()).unwrap();
        assert!(p5.is_uniquely_geodesic_space(Rat::one()).unwrap());

        let c4 = MetricSpace::cycle_graph(4).unwrap();
        assert!(!c4.is_uniquely_geodesic_pair(0, 2, Rat::one()).unwrap());
        assert!(c4.is_uniquely_geodesic_pair(0, 1, Rat::one()).unwrap());

        // Same-point pair is trivially unique at any resolution.
        assert!(p5.is_uniquely_geodesic_pair(2, 2, Rat::one()).unwrap());
    }

    #[test]
    fn coarse_resolution_still_detects_branching() {
        // At resolution 3 the multiples only see the endpoints of the
        // C6 antipodal pair; the chain condition catches the branches.
        let c6 = MetricSpace::cycle_graph(6).unwrap();
        assert!(!c6.is_uniquely_geodesic_pair(0, 3, Rat::from(3)).unwrap());
    }

    #[test]
    fn resolution_must_divide_the_distance() {
        let p5 = MetricSpace::path_graph(5, Rat::one()).unwrap();
        assert!(matches!(
            p5.is_uniquely_geodesic_pair(0, 3, Rat::from(2)),
            Err(MetricError::ResolutionMismatch { .. })
        ));
        assert!(matches!(
            p5.is_uniquely_geodesic_pair(0, 3, Rat::zero()),
            Err(MetricError::ResolutionMismatch { .. })
        ));
    }

    #[test]
    fn chains_are_verified() {
        let p5 = MetricSpace::path_graph(5, Rat::one()).unwrap();
        let chain = GeodesicChain::new(&p5, vec![0, 1, 2, 3, 4]).unwrap();
        assert_eq!(chain.length(), Rat::from(4));
        assert_eq!(chain.point_at(Rat::from(2)), Some(2));
        assert_eq!(chain.point_at(rat("1/2")), None);

        // Skipping a point is fine; the gaps still match.
        let sparse = GeodesicChain::new(&p5, vec![0, 2, 4]).unwrap();
        assert_eq!(sparse.params(), &[Rat::zero(), Rat::from(2), Rat::from(4)]);

        assert!(matches!(
            GeodesicChain::new(&p5, vec![0, 2, 1]),
            Err(MetricError::Chain(ChainError::NotIncreasing(2)))
        ));
        assert!(matches!(
            GeodesicChain::new(&p5, vec![4]),
            Err(MetricError::Chain(ChainError::TooShort))
        ));

        // 0 -> 1 -> 0 style backtracking cannot appear: params decrease.
        let c4 = MetricSpace::cycle_graph(4).unwrap();
        // 0,1,2 is a geodesic chain on C4 even though 0,3,2 also is.
        assert!(GeodesicChain::new(&c4, vec![0, 1, 2]).is_ok());
        assert!(GeodesicChain::new(&c4, vec![0, 3, 2]).is_ok());
    }

    #[test]
    fn find_chain_prefers_lexicographic_starts() {
        let p6 = MetricSpace::path_graph(6, Rat::one()).unwrap();
        let chain = find_chain(&p6, Rat::from(4), Rat::one()).unwrap();
        assert_eq!(chain.points(), &[0, 1, 2, 3, 4]);
        assert!(find_chain(&p6, Rat::from(9), Rat::one()).is_none());
    }

    #[test]
    fn induced_subspace_restricts_the_matrix() {
        let p5 = MetricSpace::path_graph(5, Rat::one()).unwrap();
        let sub = p5.induced(&[0, 2, 4], "evens").unwrap();
        assert_eq!(sub.len(), 3);
        assert_eq!(sub.dist(0, 2), Rat::from(4));
        assert_eq!(sub.label(1), "2");
        assert!(p5.induced(&[0, 0], "dup").is_err());
        assert!(p5.induced(&[], "none").is_err());
    }

    #[test]
    fn permute_points_preserves_the_metric() {
        let p3 = MetricSpace::path_graph(3, Rat::one()).unwrap();
        let rev = p3.permute_points(&[2, 1, 0]).unwrap();
        assert_eq!(rev.label(0), "2");
        assert_eq!(rev.dist(0, 2), Rat::from(2));
        assert!(rev.recheck().is_ok());
        assert!(p3.permute_points(&[0, 0, 1]).is_err());
    }
}
