//! Finite generalized metric spaces.

use std::fmt;

use thiserror::Error;

use crate::extrat::ExtRat;

/// One violated axiom in a candidate distance matrix.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceViolation {
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("d({0},{0}) is not zero")]
    NonZeroDiagonal(usize),
    #[error("d({0},{1}) != d({1},{0})")]
    Asymmetric(usize, usize),
    #[error("distinct points {0} and {1} are at distance zero")]
    ZeroOffDiagonal(usize, usize),
    /// `d(i,k) > d(i,j) + d(j,k)`, reported as `(i, k, j)` with `i < k`.
    #[error("d({0},{1}) exceeds the path through {2}")]
    TriangleViolation(usize, usize, usize),
    #[error("{labels} labels for {points} points")]
    LabelCount { labels: usize, points: usize },
}

/// Every violation found in a rejected matrix, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid metric space ({} violations, first: {})", .0.len(), .0[0])]
pub struct InvalidSpace(pub Vec<SpaceViolation>);

/// A finite generalized metric space: distances may be infinite, all other
/// metric axioms hold.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Space {
    n: usize,
    dist: Vec<ExtRat>,
    labels: Option<Vec<String>>,
}

impl Space {
    /// Checks every axiom and returns either a space or the complete list of
    /// violations.
    pub fn validate(rows: Vec<Vec<ExtRat>>) -> Result<Space, InvalidSpace> {
        let n = rows.len();
        let mut violations = Vec::new();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                violations.push(SpaceViolation::NotSquare { row, len: r.len(), expected: n });
            }
        }
        if !violations.is_empty() {
            return Err(InvalidSpace(violations));
        }
        for i in 0..n {
            if !rows[i][i].is_zero() {
                violations.push(SpaceViolation::NonZeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    violations.push(SpaceViolation::Asymmetric(i, j));
                }
                if rows[i][j].is_zero() || rows[j][i].is_zero() {
                    violations.push(SpaceViolation::ZeroOffDiagonal(i, j));
                }
            }
        }
        for i in 0..n {
            for k in (i + 1)..n {
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    if rows[i][k] > &rows[i][j] + &rows[j][k] {
                        violations.push(SpaceViolation::TriangleViolation(i, k, j));
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(InvalidSpace(violations));
        }
        Ok(Space { n, dist: rows.into_iter().flatten().collect(), labels: None })
    }

    /// Like [`Space::validate`] but starting from a flat row-major matrix.
    pub fn from_flat(n: usize, dist: Vec<ExtRat>) -> Result<Space, InvalidSpace> {
        assert_eq!(dist.len(), n * n, "flat matrix has wrong length");
        let rows = dist.chunks(n.max(1)).take(n).map(|c| c.to_vec()).collect();
        Self::validate(rows)
    }

    /// Builds a space from a matrix already known to satisfy every axiom.
    pub(crate) fn from_flat_unchecked(n: usize, dist: Vec<ExtRat>) -> Space {
        debug_assert_eq!(dist.len(), n * n);
        Space { n, dist, labels: None }
    }

    pub fn empty() -> Space {
        Space { n: 0, dist: Vec::new(), labels: None }
    }

    /// The one-point space.
    pub fn point() -> Space {
        Space { n: 1, dist: vec![ExtRat::zero()], labels: None }
    }

    /// Two points at distance `eps`; for `eps = 0` this is the one-point space.
    pub fn two(eps: ExtRat) -> Space {
        if eps.is_zero() {
            return Self::point();
        }
        Space { n: 2, dist: vec![ExtRat::zero(), eps.clone(), eps, ExtRat::zero()], labels: None }
    }

    /// `n` points with every pair at the same positive distance.
    pub fn uniform(n: usize, d: ExtRat) -> Space {
        assert!(n <= 1 || !d.is_zero(), "uniform distance must be positive");
        let dist = (0..n * n).map(|k| if k / n == k % n { ExtRat::zero() } else { d.clone() }).collect();
        Space { n, dist, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Space, InvalidSpace> {
        if labels.len() != self.n {
            return Err(InvalidSpace(vec![SpaceViolation::LabelCount { labels: labels.len(), points: self.n }]));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Space {
        self.labels = None;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &ExtRat {
        &self.dist[i * self.n + j]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<ExtRat>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[ExtRat] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn flat(&self) -> &[ExtRat] {
        &self.dist
    }

    /// Equality of the metric structure, ignoring labels.
    pub fn same_metric(&self, other: &Space) -> bool {
        self.n == other.n && self.dist == other.dist
    }

    /// The subspace induced on `points` (in the given order).
    pub fn subspace(&self, points: &[usize]) -> Space {
        let m = points.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in points {
            for &j in points {
                dist.push(self.d(i, j).clone());
            }
        }
        let labels = self.labels.as_ref().map(|l| points.iter().map(|&i| l[i].clone()).collect());
        Space { n: m, dist, labels }
    }

    /// Every distinct distance value occurring in the space, sorted.
    pub fn distance_values(&self) -> Vec<ExtRat> {
        let mut v: Vec<ExtRat> = self.dist.clone();
        v.sort();
        v.dedup();
        v
    }
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({}; ", self.n)?;
        f.debug_list().entries((0..self.n).map(|i| self.row(i))).finish()?;
        write!(f, ")")
    }
}
