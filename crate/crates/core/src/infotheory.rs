//! Discrete information measures over finite distributions.
//!
//! All quantities are in bits. The convention `0 · log 0 = 0` applies
//! throughout, so zero-probability symbols never contribute.

use crate::error::{Error, Result};
use crate::metrics::JointCounts;

/// Tolerance on the sum-to-one check.
pub const SUM_TOLERANCE: f64 = 1e-9;

fn validate(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        if value < 0.0 {
            return Err(Error::NegativeProbability { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// `-p log2 p` with the `0 log 0 = 0` convention.
#[inline]
fn surprisal_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate(&probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDistribution);
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// A joint distribution over (row symbol, column symbol), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows * cols != probs.len() {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: probs.len(),
            });
        }
        validate(&probs)?;
        Ok(Self { rows, cols, probs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut probs = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            probs.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, probs)
    }

    /// Joint of a column-conditional `p(row | col)` with a column marginal.
    /// `cond` is row-major `rows x cols`; each column must sum to one.
    pub fn from_conditional(
        rows: usize,
        cond: &[f64],
        col_marginal: &Distribution,
    ) -> Result<Self> {
        let cols = col_marginal.len();
        if cond.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: cond.len(),
            });
        }
        let probs = cond
            .iter()
            .enumerate()
            .map(|(k, &c)| c * col_marginal.probs()[k % cols])
            .collect();
        Self::new(rows, cols, probs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.probs[row * self.cols + col]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn row_marginal(&self) -> Distribution {
        let probs = self
            .probs
            .chunks_exact(self.cols)
            .map(|row| row.iter().sum())
            .collect();
        Distribution { probs }
    }

    pub fn col_marginal(&self) -> Distribution {
        let mut probs = vec![0.0; self.cols];
        for row in self.probs.chunks_exact(self.cols) {
            for (acc, p) in probs.iter_mut().zip(row) {
                *acc += p;
            }
        }
        Distribution { probs }
    }

    pub fn transpose(&self) -> Self {
        let mut probs = vec![0.0; self.probs.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                probs[c * self.rows + r] = self.get(r, c);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            probs,
        }
    }
}

/// Shannon entropy `H(X)` in bits.
pub fn entropy(d: &Distribution) -> f64 {
    d.probs.iter().copied().map(surprisal_term).sum()
}

/// Entropy of a raw probability slice, validated first.
pub fn entropy_of(probs: &[f64]) -> Result<f64> {
    validate(probs)?;
    Ok(probs.iter().copied().map(surprisal_term).sum())
}

/// `H(row | column)` in bits. Columns with zero marginal mass contribute nothing.
pub fn conditional_entropy(j: &JointDistribution) -> f64 {
    let col = j.col_marginal();
    let mut h = 0.0;
    for (c, &pc) in col.probs.iter().enumerate() {
        if pc <= 0.0 {
            continue;
        }
        let h_given: f64 = (0..j.rows).map(|r| surprisal_term(j.get(r, c) / pc)).sum();
        h += pc * h_given;
    }
    h
}

/// `I(row; column) = H(row) - H(row | column)` in bits.
///
/// Rounding can push the difference slightly below zero; values within
/// [`SUM_TOLERANCE`] of zero are clamped.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let mi = entropy(&j.row_marginal()) - conditional_entropy(j);
    if mi < 0.0 && mi > -SUM_TOLERANCE {
        0.0
    } else {
        mi
    }
}

/// Plug-in (maximum likelihood) joint estimate from co-occurrence counts.
pub fn joint_from_counts(c: &JointCounts) -> Result<JointDistribution> {
    let total = c.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let t = total as f64;
    let probs = c.counts().iter().map(|&k| k as f64 / t).collect();
    Ok(JointDistribution {
        rows: c.rows(),
        cols: c.cols(),
        probs,
    })
}

/// Information carried by inspecting one location for a treasure placed
/// uniformly among `n` locations: the entropy of the found/empty outcome.
pub fn location_observation_information(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewLocations(n));
    }
    let nf = n as f64;
    Ok(nf.log2() - (1.0 - 1.0 / nf) * (nf - 1.0).log2())
}
