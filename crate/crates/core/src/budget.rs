use thiserror::Error;

/// Limits on the exponential searches (hom-sets, canonical labelling,
/// products). Running out is always an error, never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_points: usize,
    pub max_nodes: u64,
}

impl Budget {
    pub const DEFAULT_POINTS: usize = 64;
    pub const DEFAULT_NODES: u64 = 10_000_000;

    pub fn new(max_points: usize, max_nodes: u64) -> Self {
        Budget { max_points, max_nodes }
    }

    pub fn unlimited() -> Self {
        Budget { max_points: usize::MAX, max_nodes: u64::MAX }
    }

    pub(crate) fn check_points(&self, needed: usize) -> Result<(), BudgetExceeded> {
        if needed > self.max_points {
            Err(BudgetExceeded::Points { needed, limit: self.max_points })
        } else {
            Ok(())
        }
    }

    pub(crate) fn meter(&self) -> NodeMeter {
        NodeMeter { used: 0, limit: self.max_nodes }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_points: Self::DEFAULT_POINTS, max_nodes: Self::DEFAULT_NODES }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BudgetExceeded {
    #[error("search exceeded {limit} nodes")]
    Nodes { limit: u64 },
    #[error("{needed} points exceed the budget of {limit}")]
    Points { needed: usize, limit: usize },
    #[error("{needed} spans exceed the per-step budget of {limit}")]
    Spans { needed: usize, limit: usize },
}

#[derive(Debug)]
pub(crate) struct NodeMeter {
    used: u64,
    limit: u64,
}

impl NodeMeter {
    #[inline]
    pub(crate) fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.used += 1;
        if self.used > self.limit {
            Err(BudgetExceeded::Nodes { limit: self.limit })
        } else {
            Ok(())
        }
    }
}
