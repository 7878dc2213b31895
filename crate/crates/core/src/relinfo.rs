//! Relevant information: the least mutual information between world state
//! and action that any strategy needs to reach a given expected utility.
//!
//! [`ri_closed_form`] is the curve for the treasure task (hit = 1, miss = 0,
//! uniform treasure). [`ri_minimize`] handles an arbitrary utility matrix
//! and prior by tracing the trade-off family
//! `p(a|r) ∝ q(a) exp(β U(a,r))`, `q(a) = Σ_r p(r) p(a|r)` over the
//! multiplier β and picking the smallest β that meets the utility floor.

use crate::error::{Error, Result};
use crate::infotheory::{mutual_information, Distribution, JointDistribution};

/// Iteration cap for the alternating updates at a fixed β.
pub const MAX_ITERATIONS: usize = 10_000;

/// Pay-off `U(a, r)` per (action, world state), stored row-major by action.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityMatrix {
    actions: usize,
    states: usize,
    values: Vec<f64>,
}

impl UtilityMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let states = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || states == 0 {
            return Err(Error::EmptyDistribution);
        }
        let mut values = Vec::with_capacity(rows.len() * states);
        for row in rows {
            if row.len() != states {
                return Err(Error::DimensionMismatch {
                    expected: states,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self {
            actions: rows.len(),
            states,
            values,
        })
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn get(&self, action: usize, state: usize) -> f64 {
        self.values[action * self.states + state]
    }

    /// Best achievable expected utility under `prior`.
    pub fn max_utility(&self, prior: &Distribution) -> Result<f64> {
        self.check_prior(prior)?;
        Ok((0..self.states)
            .map(|r| {
                let best = (0..self.actions)
                    .map(|a| self.get(a, r))
                    .fold(f64::NEG_INFINITY, f64::max);
                prior.probs()[r] * best
            })
            .sum())
    }

    fn check_prior(&self, prior: &Distribution) -> Result<()> {
        if prior.len() != self.states {
            return Err(Error::DimensionMismatch {
                expected: self.states,
                found: prior.len(),
            });
        }
        Ok(())
    }
}

/// The hit/miss pay-off of the treasure task: 1 iff the action is the
/// treasure location.
pub fn utility_treasure_matrix(n: usize) -> Result<UtilityMatrix> {
    if n < 2 {
        return Err(Error::TooFewLocations(n));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|t| if a == t { 1.0 } else { 0.0 }).collect())
        .collect();
    UtilityMatrix::from_rows(&rows)
}

/// A conditional action distribution `p(a | r)`; each column (fixed `r`)
/// sums to one. Stored row-major by action.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    actions: usize,
    states: usize,
    cond: Vec<f64>,
}

impl Strategy {
    pub fn new(actions: usize, states: usize, cond: Vec<f64>) -> Result<Self> {
        if cond.len() != actions * states {
            return Err(Error::DimensionMismatch {
                expected: actions * states,
                found: cond.len(),
            });
        }
        if actions == 0 || states == 0 {
            return Err(Error::EmptyDistribution);
        }
        for r in 0..states {
            let column: Vec<f64> = (0..actions).map(|a| cond[a * states + r]).collect();
            Distribution::new(column)?;
        }
        Ok(Self {
            actions,
            states,
            cond,
        })
    }

    /// Each action with equal probability, regardless of state.
    pub fn uniform(actions: usize, states: usize) -> Result<Self> {
        Self::new(
            actions,
            states,
            vec![1.0 / actions as f64; actions * states],
        )
    }

    /// On a square alphabet: the matching action with probability `hit`,
    /// every other action with `(1 - hit) / (n - 1)`.
    pub fn symmetric(n: usize, hit: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewLocations(n));
        }
        let off = (1.0 - hit) / (n - 1) as f64;
        let cond = (0..n * n)
            .map(|k| if k / n == k % n { hit } else { off })
            .collect();
        Self::new(n, n, cond)
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn get(&self, action: usize, state: usize) -> f64 {
        self.cond[action * self.states + state]
    }

    pub fn cond(&self) -> &[f64] {
        &self.cond
    }

    fn max_abs_diff(&self, other: &Strategy) -> f64 {
        self.cond
            .iter()
            .zip(&other.cond)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A point on (or computed for) the trade-off curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub utility: f64,
    pub information: f64,
    pub beta: f64,
    pub strategy: Strategy,
}

/// Expected pay-off `Σ_a Σ_r U(a,r) p(a|r) p(r)`.
pub fn strategy_performance(s: &Strategy, u: &UtilityMatrix, prior: &Distribution) -> Result<f64> {
    u.check_prior(prior)?;
    if s.actions != u.actions || s.states != u.states {
        return Err(Error::DimensionMismatch {
            expected: u.actions * u.states,
            found: s.actions * s.states,
        });
    }
    let mut total = 0.0;
    for a in 0..s.actions {
        for r in 0..s.states {
            total += u.get(a, r) * s.get(a, r) * prior.probs()[r];
        }
    }
    Ok(total)
}

/// `I(A; R)` of the joint `p(a, r) = p(a|r) p(r)`.
pub fn strategy_information(s: &Strategy, prior: &Distribution) -> Result<f64> {
    if prior.len() != s.states {
        return Err(Error::DimensionMismatch {
            expected: s.states,
            found: prior.len(),
        });
    }
    let joint = JointDistribution::from_conditional(s.actions, &s.cond, prior)?;
    Ok(mutual_information(&joint))
}

/// Relevant information of the n-location treasure task at hit rate `u`.
/// Zero at or below chance, since random search already reaches `1/n`.
pub fn ri_closed_form(u: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewLocations(n));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfRange {
            what: "performance level",
            value: u,
        });
    }
    let nf = n as f64;
    if u <= 1.0 / nf {
        return Ok(0.0);
    }
    let hit = u * u.log2();
    let miss = if u < 1.0 {
        (1.0 - u) * ((1.0 - u) / (nf - 1.0)).log2()
    } else {
        0.0
    };
    Ok((nf.log2() + hit + miss).max(0.0))
}

/// Converged strategy of the alternating updates at a fixed β.
fn solve_at_beta(u: &UtilityMatrix, prior: &Distribution, beta: f64, tol: f64) -> Result<Strategy> {
    let (na, ns) = (u.actions, u.states);
    let mut marginal = vec![1.0 / na as f64; na];
    let mut current = Strategy::uniform(na, ns)?;
    let mut next = current.clone();
    let mut logits = vec![0.0; na];
    for _ in 0..MAX_ITERATIONS {
        for r in 0..ns {
            for (a, l) in logits.iter_mut().enumerate() {
                *l = marginal[a].ln() + beta * u.get(a, r);
            }
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for l in logits.iter_mut() {
                *l = (*l - max).exp();
                z += *l;
            }
            for (a, l) in logits.iter().enumerate() {
                next.cond[a * ns + r] = l / z;
            }
        }
        for (a, m) in marginal.iter_mut().enumerate() {
            *m = (0..ns).map(|r| prior.probs()[r] * next.get(a, r)).sum();
        }
        let delta = next.max_abs_diff(&current);
        std::mem::swap(&mut current, &mut next);
        if delta < tol {
            return Ok(current);
        }
    }
    Err(Error::NonConvergence {
        beta,
        iterations: MAX_ITERATIONS,
        last: Box::new(current),
    })
}

fn evaluate(u: &UtilityMatrix, prior: &Distribution, beta: f64, tol: f64) -> Result<TradeoffPoint> {
    let strategy = solve_at_beta(u, prior, beta, tol)?;
    Ok(TradeoffPoint {
        utility: strategy_performance(&strategy, u, prior)?,
        information: strategy_information(&strategy, prior)?,
        beta,
        strategy,
    })
}

/// Finds a least-information strategy whose expected utility reaches
/// `level` (to within `tol`).
///
/// β grows geometrically until the floor is met, then the bracket is
/// bisected down to the smallest feasible β.
pub fn ri_minimize(
    u: &UtilityMatrix,
    prior: &Distribution,
    level: f64,
    tol: f64,
) -> Result<TradeoffPoint> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::OutOfRange {
            what: "tolerance",
            value: tol,
        });
    }
    let max = u.max_utility(prior)?;
    if level > max + tol {
        return Err(Error::InfeasibleUtility {
            requested: level,
            max,
        });
    }
    let target = level.min(max);
    let meets = |p: &TradeoffPoint| p.utility >= target || p.utility >= max - tol * 1e-3;

    let base = evaluate(u, prior, 0.0, tol)?;
    if meets(&base) {
        return Ok(base);
    }

    let mut lo = 0.0;
    let mut beta = 1.0;
    let mut hi = loop {
        let p = evaluate(u, prior, beta, tol)?;
        if meets(&p) {
            break p;
        }
        lo = beta;
        beta *= 2.0;
        if beta > 1e6 {
            // Utility is flat in β from here on; accept the closest approach.
            if p.utility >= target - tol {
                return Ok(p);
            }
            return Err(Error::InfeasibleUtility {
                requested: level,
                max: p.utility,
            });
        }
    };
    while hi.beta - lo > 1e-10 * hi.beta.max(1.0) {
        let mid = 0.5 * (lo + hi.beta);
        let p = evaluate(u, prior, mid, tol)?;
        if meets(&p) {
            hi = p;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
