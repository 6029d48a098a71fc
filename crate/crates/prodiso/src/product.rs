//! Sup-metric products of finite metric spaces and their slices.
//!
//! A [`ProductSpace`] is an ordered list of factors; its points are
//! coordinate tuples and its metric is the maximum of the factor
//! distances. Factor order is significant and never canonicalized:
//! swapping factors is an explicit isometry, not an identification.
//!
//! A [`Slice`] is a subset of the product that varies in exactly one
//! coordinate. Slices are stored intrinsically (axis, fixed off-axis
//! coordinates, and the set of axis values) rather than as raw point
//! sets, because the decomposition machinery is about axes and needs
//! the axis without re-derivation.
//!
//! Points travel in two forms: a [`ProductPoint`] is an explicit
//! coordinate tuple; a flat index in `0..len()` enumerates the same
//! points in lexicographic coordinate order (coordinate 0 most
//! significant, so index 0 is the all-zeros tuple).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MetricSpace, MetricError};
use crate::rat::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("a product needs at least one factor")]
    NoFactors,
    #[error("product has too many points to index")]
    TooManyPoints,
    #[error("coordinate {coord} out of range for factor {axis} of size {size}")]
    CoordOutOfRange { axis: usize, coord: usize, size: usize },
    #[error("point has {got} coordinates but the product has {expected} factors")]
    ArityMismatch { expected: usize, got: usize },
    #[error("axis {axis} out of range for a product of {factors} factors")]
    AxisOutOfRange { axis: usize, factors: usize },
    #[error("slice classification needs at least two distinct points")]
    TooSmall,
    #[error("points disagree in coordinate {axis}, which the chain must hold fixed")]
    AxisMismatch { axis: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A point of a product: one coordinate (a factor point index) per factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProductPoint(Vec<usize>);

impl ProductPoint {
    pub fn new(coords: Vec<usize>) -> Self {
        ProductPoint(coords)
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn coord(&self, axis: usize) -> usize {
        self.0[axis]
    }

    /// The same point with one coordinate replaced.
    pub fn with_coord(&self, axis: usize, value: usize) -> Self {
        let mut c = self.0.clone();
        c[axis] = value;
        ProductPoint(c)
    }
}

impl From<Vec<usize>> for ProductPoint {
    fn from(coords: Vec<usize>) -> Self {
        ProductPoint(coords)
    }
}

impl std::fmt::Display for ProductPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An ordered sup-metric product of finite metric spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    factors: Vec<MetricSpace>,
    sizes: Vec<usize>,
    /// `strides[i]` = product of the sizes after factor `i`, so that
    /// flat index = sum of coord * stride.
    strides: Vec<usize>,
    len: usize,
}

impl ProductSpace {
    pub fn new(factors: Vec<MetricSpace>) -> Result<Self, ProductError> {
        if factors.is_empty() {
            return Err(ProductError::NoFactors);
        }
        let sizes: Vec<usize> = factors.iter().map(MetricSpace::len).collect();
        let mut strides = vec![1usize; sizes.len()];
        let mut len = 1usize;
        for i in (0..sizes.len()).rev() {
            strides[i] = len;
            len = len.checked_mul(sizes[i]).ok_or(ProductError::TooManyPoints)?;
        }
        Ok(ProductSpace { factors, sizes, strides, len })
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[MetricSpace] {
        &self.factors
    }

    pub fn factor(&self, axis: usize) -> &MetricSpace {
        &self.factors[axis]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Total point count (product of factor sizes).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self) -> String {
        let parts: Vec<&str> = self.factors.iter().map(MetricSpace::name).collect();
        parts.join(" x ")
    }

    fn check_axis(&self, axis: usize) -> Result<(), ProductError> {
        if axis < self.factor_count() {
            Ok(())
        } else {
            Err(ProductError::AxisOutOfRange { axis, factors: self.factor_count() })
        }
    }

    pub fn check_point(&self, p: &ProductPoint) -> Result<(), ProductError> {
        if p.arity() != self.factor_count() {
            return Err(ProductError::ArityMismatch {
                expected: self.factor_count(),
                got: p.arity(),
            });
        }
        for (axis, (&c, &s)) in p.coords().iter().zip(&self.sizes).enumerate() {
            if c >= s {
                return Err(ProductError::CoordOutOfRange { axis, coord: c, size: s });
            }
        }
        Ok(())
    }

    /// Flat index of a point; inverse of [`ProductSpace::point`].
    pub fn index_of(&self, p: &ProductPoint) -> Result<usize, ProductError> {
        self.check_point(p)?;
        Ok(p.coords()
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c * s)
            .sum())
    }

    /// The point with the given flat index (`idx < len()`).
    pub fn point(&self, idx: usize) -> ProductPoint {
        assert!(idx < self.len, "point index {idx} out of range {}", self.len);
        let mut rest = idx;
        let coords = self
            .strides
            .iter()
            .map(|&s| {
                let c = rest / s;
                rest %= s;
                c
            })
            .collect();
        ProductPoint(coords)
    }

    /// All points in index (lexicographic coordinate) order.
    pub fn points(&self) -> impl Iterator<Item = ProductPoint> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    /// The sup metric: the maximum of the factor distances.
    pub fn sup_distance(&self, p: &ProductPoint, q: &ProductPoint) -> Result<Rat, ProductError> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.sup_distance_unchecked(p.coords(), q.coords()))
    }

    fn sup_distance_unchecked(&self, p: &[usize], q: &[usize]) -> Rat {
        self.factors
            .iter()
            .zip(p.iter().zip(q))
            .map(|(m, (&a, &b))| m.dist(a, b))
            .max()
            .expect("products have at least one factor")
    }

    /// Sup distance between two points given by flat index.
    pub fn dist_idx(&self, i: usize, j: usize) -> Rat {
        let mut ri = i;
        let mut rj = j;
        let mut best = Rat::zero();
        for (m, &s) in self.factors.iter().zip(&self.strides) {
            let d = m.dist(ri / s, rj / s);
            if d > best {
                best = d;
            }
            ri %= s;
            rj %= s;
        }
        best
    }

    /// Points between `i` and `j` in the sup metric, by flat index:
    /// all `z` with `d(i,z) + d(z,j) = d(i,j)`.
    pub fn betweenness_idx(&self, i: usize, j: usize) -> Vec<usize> {
        let d = self.dist_idx(i, j);
        (0..self.len)
            .filter(|&z| self.dist_idx(i, z) + self.dist_idx(z, j) == d)
            .collect()
    }

    /// The product materialized as a flat labeled metric space, with
    /// point labels formed from the factor labels. The result passes
    /// full validation; this is also how the sup-metric axioms are
    /// checked in tests.
    pub fn induced_space(&self) -> Result<MetricSpace, ProductError> {
        let labels: Vec<String> = self
            .points()
            .map(|p| {
                let parts: Vec<&str> = p
                    .coords()
                    .iter()
                    .zip(&self.factors)
                    .map(|(&c, m)| m.label(c))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let matrix: Vec<Vec<Rat>> = (0..self.len)
            .map(|i| (0..self.len).map(|j| self.dist_idx(i, j)).collect())
            .collect();
        Ok(MetricSpace::validate(self.name(), labels, matrix)?)
    }

    /// Decides whether a point set is a slice. Returns the slice (axis,
    /// fixed coordinates, axis values) when all points agree everywhere
    /// except in a single coordinate, and otherwise a witness pair that
    /// differs in at least two coordinates, along with those axes.
    pub fn classify_slice(&self, points: &[ProductPoint]) -> Result<SliceClass, ProductError> {
        for p in points {
            self.check_point(p)?;
        }
        let mut distinct: Vec<&ProductPoint> = Vec::new();
        for p in points {
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
        if distinct.len() < 2 {
            return Err(ProductError::TooSmall);
        }
        // If some pair differs in two or more axes, that pair refutes
        // sliceness. If every pair differs in at most one axis, the
        // differing axis is the same across all pairs: two pairs through
        // a common point with different axes would produce a third pair
        // differing in both.
        for (i, p) in distinct.iter().enumerate() {
            for q in &distinct[i + 1..] {
                let axes: Vec<usize> = (0..self.factor_count())
                    .filter(|&k| p.coord(k) != q.coord(k))
                    .collect();
                if axes.len() >= 2 {
                    return Ok(SliceClass::NotASlice {
                        witness: ((*p).clone(), (*q).clone()),
                        axes,
                    });
                }
            }
        }
        let base = distinct[0];
        let axis = (0..self.factor_count())
            .find(|&k| distinct.iter().any(|p| p.coord(k) != base.coord(k)))
            .expect("distinct points must differ somewhere");
        let mut axis_set: Vec<usize> = distinct.iter().map(|p| p.coord(axis)).collect();
        axis_set.sort_unstable();
        axis_set.dedup();
        let fixed = (0..self.factor_count())
            .filter(|&k| k != axis)
            .map(|k| (k, base.coord(k)))
            .collect();
        Ok(SliceClass::Slice(Slice { axis, fixed, axis_set }))
    }

    /// Walks from `a` to `b` changing one coordinate at a time, in axis
    /// order, never touching axis `k` (where `a` and `b` must already
    /// agree). Coordinates where they agree are skipped, so consecutive
    /// points always differ in exactly one axis and the chain degenerates
    /// to `[a]` when `a = b`.
    pub fn interpolation_chain(
        &self,
        a: &ProductPoint,
        b: &ProductPoint,
        k: usize,
    ) -> Result<Vec<ProductPoint>, ProductError> {
        self.check_point(a)?;
        self.check_point(b)?;
        self.check_axis(k)?;
        if a.coord(k) != b.coord(k) {
            return Err(ProductError::AxisMismatch { axis: k });
        }
        let mut chain = vec![a.clone()];
        let mut current = a.clone();
        for axis in 0..self.factor_count() {
            if axis == k || current.coord(axis) == b.coord(axis) {
                continue;
            }
            current = current.with_coord(axis, b.coord(axis));
            chain.push(current.clone());
        }
        Ok(chain)
    }

    /// All two-point slices along `axis`, each exactly once, in
    /// deterministic order: fixed coordinates ascending lexicographically,
    /// then axis pairs `(u, v)` with `u < v` ascending. Empty when the
    /// factor has fewer than two points.
    pub fn pair_slices(&self, axis: usize) -> PairSlices<'_> {
        assert!(axis < self.factor_count(), "axis {axis} out of range");
        let fixed_axes: Vec<usize> = (0..self.factor_count()).filter(|&i| i != axis).collect();
        let fixed = vec![0; fixed_axes.len()];
        let done = self.sizes[axis] < 2;
        PairSlices { product: self, axis, fixed_axes, fixed, u: 0, v: 1, done }
    }

    /// The first two-point slice along `axis` in enumeration order; its
    /// fixed coordinates are all zero, so it passes through the
    /// basepoint (index 0).
    pub fn first_pair_slice(&self, axis: usize) -> Option<Slice> {
        self.pair_slices(axis).next()
    }
}

/// Verdict of [`ProductSpace::classify_slice`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SliceClass {
    Slice(Slice),
    /// Not a slice: this pair of the input differs in `axes` (at least
    /// two of them).
    NotASlice {
        witness: (ProductPoint, ProductPoint),
        axes: Vec<usize>,
    },
}

impl SliceClass {
    pub fn slice(&self) -> Option<&Slice> {
        match self {
            SliceClass::Slice(s) => Some(s),
            SliceClass::NotASlice { .. } => None,
        }
    }

    pub fn is_slice(&self) -> bool {
        self.slice().is_some()
    }
}

/// A subset of a product varying in exactly one coordinate: the axis,
/// the coordinates held fixed on every other factor (sorted by factor
/// index), and the set of values taken on the axis (sorted, size >= 2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slice {
    axis: usize,
    fixed: Vec<(usize, usize)>,
    axis_set: Vec<usize>,
}

impl Slice {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn fixed(&self) -> &[(usize, usize)] {
        &self.fixed
    }

    pub fn axis_set(&self) -> &[usize] {
        &self.axis_set
    }

    pub fn len(&self) -> usize {
        self.axis_set.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The member points, ordered by axis value.
    pub fn points(&self, product: &ProductSpace) -> Vec<ProductPoint> {
        self.axis_set
            .iter()
            .map(|&value| {
                let mut coords = vec![0; product.factor_count()];
                coords[self.axis] = value;
                for &(k, c) in &self.fixed {
                    coords[k] = c;
                }
                ProductPoint(coords)
            })
            .collect()
    }
}

/// Iterator over all two-point slices along one axis.
pub struct PairSlices<'a> {
    product: &'a ProductSpace,
    axis: usize,
    fixed_axes: Vec<usize>,
    /// Current fixed coordinate per entry of `fixed_axes`.
    fixed: Vec<usize>,
    u: usize,
    v: usize,
    done: bool,
}

impl Iterator for PairSlices<'_> {
    type Item = Slice;

    fn next(&mut self) -> Option<Slice> {
        if self.done {
            return None;
        }
        let slice = Slice {
            axis: self.axis,
            fixed: self.fixed_axes.iter().copied().zip(self.fixed.iter().copied()).collect(),
            axis_set: vec![self.u, self.v],
        };
        // Advance: pair first, then fixed coordinates as a mixed-radix
        // counter with the last fixed axis least significant.
        let size = self.product.sizes[self.axis];
        self.v += 1;
        if self.v >= size {
            self.u += 1;
            self.v = self.u + 1;
        }
        if self.v >= size {
            self.u = 0;
            self.v = 1;
            let mut i = self.fixed_axes.len();
            loop {
                if i == 0 {
                    self.done = true;
                    break;
                }
                i -= 1;
                self.fixed[i] += 1;
                if self.fixed[i] < self.product.sizes[self.fixed_axes[i]] {
                    break;
                }
                self.fixed[i] = 0;
            }
        }
        Some(slice)
    }
}
