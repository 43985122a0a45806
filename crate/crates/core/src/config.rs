use std::time::Duration;

use crate::error::{Error, Result};
use crate::profile::TieRule;
use crate::series::{check_window, MIN_WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    Single,
    #[default]
    Double,
}

/// Order in which each worker walks its assigned diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalOrder {
    /// Seeded shuffle; an interrupted run has sampled the whole matrix.
    Random { seed: u64 },
    /// Ascending offsets.
    Sequential,
}

impl Default for DiagonalOrder {
    fn default() -> Self {
        DiagonalOrder::Random { seed: 0 }
    }
}

/// Limit on how much of the matrix a run explores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Total diagonals across all workers.
    Diagonals(usize),
    WallClock(Duration),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: usize,
    pub exclusion: usize,
    pub precision: Precision,
    pub workers: usize,
    pub order: DiagonalOrder,
    pub budget: Option<Budget>,
    /// Cells per batch of the diagonal inner loop.
    pub batch_width: usize,
    pub tie_rule: TieRule,
}

impl RunConfig {
    pub const DEFAULT_BATCH_WIDTH: usize = 8;

    /// Defaults: exclusion `m / 4`, double precision, one worker, random
    /// order with seed 0, no budget.
    pub fn new(m: usize) -> Self {
        Self {
            m,
            exclusion: default_exclusion(m),
            precision: Precision::Double,
            workers: 1,
            order: DiagonalOrder::default(),
            budget: None,
            batch_width: Self::DEFAULT_BATCH_WIDTH,
            tie_rule: TieRule::LowestIndex,
        }
    }

    pub fn exclusion(mut self, exclusion: usize) -> Self {
        self.exclusion = exclusion;
        self
    }

    pub fn precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn order(mut self, order: DiagonalOrder) -> Self {
        self.order = order;
        self
    }

    pub fn budget(mut self, budget: Budget) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn batch_width(mut self, batch_width: usize) -> Self {
        self.batch_width = batch_width;
        self
    }

    pub fn tie_rule(mut self, tie_rule: TieRule) -> Self {
        self.tie_rule = tie_rule;
        self
    }

    /// Checks the configuration against a series of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        check_window(n, self.m)?;
        validate_exclusion(n, self.m, self.exclusion)?;
        if self.workers == 0 {
            return Err(Error::NoWorkers);
        }
        if self.batch_width == 0 {
            return Err(Error::ZeroBatchWidth);
        }
        Ok(())
    }
}

/// `floor(m / 4)`, at least 1 for any accepted window.
pub fn default_exclusion(m: usize) -> usize {
    (m / 4).max(MIN_WINDOW / 4)
}

pub(crate) fn validate_exclusion(n: usize, m: usize, exclusion: usize) -> Result<()> {
    let limit = n.saturating_sub(m);
    if exclusion == 0 || exclusion >= limit {
        return Err(Error::InvalidExclusion { exclusion, limit });
    }
    Ok(())
}
