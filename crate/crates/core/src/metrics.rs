//! Observables computed from run records: performance ratio and the
//! empirical mutual information between actions and treasure location.

use crate::engine::RunRecord;
use crate::error::{Error, Result};
use crate::infotheory::{joint_from_counts, mutual_information};

/// Integer co-occurrence counts indexed by (action, treasure location).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointCounts {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    total: u64,
}

impl JointCounts {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            counts: vec![0; rows * cols],
            total: 0,
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut out = Self::new(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for (c, &k) in row.iter().enumerate() {
                out.counts[r * cols + c] = k;
                out.total += k;
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize) {
        self.counts[row * self.cols + col] += 1;
        self.total += 1;
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Sum of the counts where row == column.
    pub fn diagonal(&self) -> u64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn merge(&mut self, other: &JointCounts) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.counts.len(),
                found: other.counts.len(),
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }
}

/// Which agents of a run an observable is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentSelector {
    /// Every agent, pooled as if indistinguishable.
    Population,
    /// A single agent by index.
    Agent(usize),
    /// Every agent except the given one.
    Except(usize),
}

impl AgentSelector {
    pub fn indices(self, n_agents: usize) -> Vec<usize> {
        match self {
            Self::Population => (0..n_agents).collect(),
            Self::Agent(i) => (i < n_agents).then_some(i).into_iter().collect(),
            Self::Except(i) => (0..n_agents).filter(|&k| k != i).collect(),
        }
    }

    pub fn label(self) -> String {
        match self {
            Self::Population => "population".to_string(),
            Self::Agent(i) => format!("agent{i}"),
            Self::Except(i) => format!("except{i}"),
        }
    }
}

fn pooled_counts(r: &RunRecord, sel: AgentSelector) -> Result<JointCounts> {
    let idx = sel.indices(r.n_agents());
    let mut pooled = JointCounts::new(r.n_locations(), r.n_locations());
    for i in idx {
        pooled.merge(r.joint(i))?;
    }
    if pooled.total() == 0 {
        return Err(Error::EmptySelection);
    }
    Ok(pooled)
}

/// Fraction of the selected agents' actions that targeted the treasure.
pub fn performance_ratio(r: &RunRecord, sel: AgentSelector) -> Result<f64> {
    let idx = sel.indices(r.n_agents());
    let actions: u64 = idx.iter().map(|&i| r.actions(i)).sum();
    if actions == 0 {
        return Err(Error::EmptySelection);
    }
    let hits: u64 = idx.iter().map(|&i| r.hits(i)).sum();
    Ok(hits as f64 / actions as f64)
}

/// Plug-in estimate of `I(A;T)` in bits over the selected agents' actions.
pub fn mi_estimate(r: &RunRecord, sel: AgentSelector) -> Result<f64> {
    let pooled = pooled_counts(r, sel)?;
    Ok(mutual_information(&joint_from_counts(&pooled)?))
}

/// Average number of actions per completed search (reset to find).
pub fn mean_turns_to_find(r: &RunRecord, sel: AgentSelector) -> Result<f64> {
    let idx = sel.indices(r.n_agents());
    let finds: u64 = idx.iter().map(|&i| r.hits(i)).sum();
    if finds == 0 {
        return Err(Error::EmptySelection);
    }
    let turns: u64 = idx.iter().map(|&i| r.completed_search_turns(i)).sum();
    Ok(turns as f64 / finds as f64)
}

/// A measured (performance, information) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredPoint {
    pub performance: f64,
    pub information: f64,
}

pub fn tradeoff_point(r: &RunRecord, sel: AgentSelector) -> Result<MeasuredPoint> {
    Ok(MeasuredPoint {
        performance: performance_ratio(r, sel)?,
        information: mi_estimate(r, sel)?,
    })
}
