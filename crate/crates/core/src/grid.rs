//! Distance grids and enumeration of all finite spaces over a grid.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::canon::canonical_form;
use crate::extrat::{ExtRat, ExtRatError};
use crate::space::Space;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid has no values")]
    Empty,
    #[error("grid values must be positive")]
    NonPositive,
    #[error(transparent)]
    Value(#[from] ExtRatError),
}

/// Allowed off-diagonal distances plus a cap on space size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistanceGrid {
    values: Vec<ExtRat>,
    pub max_size: usize,
}

impl DistanceGrid {
    pub fn new(mut values: Vec<ExtRat>, max_size: usize) -> Result<DistanceGrid, GridError> {
        values.sort();
        values.dedup();
        if values.is_empty() {
            return Err(GridError::Empty);
        }
        if values[0].is_zero() {
            return Err(GridError::NonPositive);
        }
        Ok(DistanceGrid { values, max_size })
    }

    /// Parses a comma-separated list such as `1/2,1,inf`.
    pub fn parse(values: &str, max_size: usize) -> Result<DistanceGrid, GridError> {
        let parsed = values.split(',').map(str::trim).filter(|s| !s.is_empty()).map(ExtRat::from_str).collect::<Result<Vec<_>, _>>()?;
        DistanceGrid::new(parsed, max_size)
    }

    pub fn values(&self) -> &[ExtRat] {
        &self.values
    }

    pub fn contains(&self, d: &ExtRat) -> bool {
        self.values.binary_search(d).is_ok()
    }
}

impl fmt::Display for DistanceGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Every space with at most `grid.max_size` points and off-diagonal distances
/// in the grid, one canonical form per isometry class, ordered by size and
/// then by distance matrix. The empty space comes first.
pub fn enumerate_spaces(grid: &DistanceGrid, budget: &Budget) -> Result<Vec<Space>, BudgetExceeded> {
    budget.check_points(grid.max_size)?;
    let mut meter = budget.meter();
    let mut out = Vec::new();
    for n in 0..=grid.max_size {
        let mut found = BTreeSet::new();
        let mut dist = vec![ExtRat::zero(); n * n];
        let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        fill(grid, n, &pairs, 0, &mut dist, &mut found, &mut meter, budget)?;
        out.extend(found);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fill(
    grid: &DistanceGrid,
    n: usize,
    pairs: &[(usize, usize)],
    at: usize,
    dist: &mut [ExtRat],
    found: &mut BTreeSet<Space>,
    meter: &mut crate::budget::NodeMeter,
    budget: &Budget,
) -> Result<(), BudgetExceeded> {
    if at == pairs.len() {
        let space = Space::from_flat_unchecked(n, dist.to_vec());
        found.insert(canonical_form(&space, budget)?.space);
        return Ok(());
    }
    let (i, j) = pairs[at];
    for v in grid.values() {
        meter.tick()?;
        dist[i * n + j] = v.clone();
        dist[j * n + i] = v.clone();
        // pairs are filled column by column, so each triangle {k, i, j} with
        // k < i is complete exactly now
        let ok = (0..i).all(|k| {
            let (ik, kj) = (&dist[i * n + k], &dist[k * n + j]);
            v <= &(ik + kj) && ik <= &(v + kj) && kj <= &(ik + v)
        });
        if ok {
            fill(grid, n, pairs, at + 1, dist, found, meter, budget)?;
        }
    }
    Ok(())
}
