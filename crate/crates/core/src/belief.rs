//! An agent's internal model of where the treasure is, and the rules that
//! update it.
//!
//! A belief is either a normal probability vector or the degenerate
//! all-zero state. Only agents that assume a static world can reach the
//! degenerate state (after eliminating every location), and they fall back
//! to uniformly random search while in it.

use rand::Rng;

use crate::error::{Error, Result};
use crate::infotheory::SUM_TOLERANCE;

/// Entries within this distance of the maximum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Column-sum tolerance for likelihood matrices.
pub const LIKELIHOOD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    probs: Vec<f64>,
}

impl Belief {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewLocations(n));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    /// Accepts a normalized vector or an exactly all-zero one.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::TooFewLocations(probs.len()));
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
        if sum != 0.0 && (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { probs })
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

    pub fn is_degenerate(&self) -> bool {
        self.probs.iter().all(|&p| p == 0.0)
    }

    fn reset(&mut self) {
        let u = 1.0 / self.probs.len() as f64;
        self.probs.fill(u);
    }

    /// Locations tied for the maximum, in index order.
    pub fn argmax_set(&self) -> Vec<usize> {
        let max = self.probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| max - p <= TIE_TOLERANCE)
            .map(|(i, _)| i)
            .collect()
    }

    /// Picks the most likely location, breaking ties uniformly at random.
    /// A degenerate belief searches uniformly at random.
    pub fn select_action<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let n = self.probs.len();
        if self.is_degenerate() {
            return rng.random_range(0..n);
        }
        let max = self.probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied = self
            .probs
            .iter()
            .filter(|&&p| max - p <= TIE_TOLERANCE)
            .count();
        if tied == 1 {
            return self
                .probs
                .iter()
                .position(|&p| p == max)
                .expect("maximum is attained");
        }
        let pick = rng.random_range(0..tied);
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| max - p <= TIE_TOLERANCE)
            .nth(pick)
            .map(|(i, _)| i)
            .expect("pick is within the tie count")
    }

    /// Folds in the result of inspecting `loc`. Finding the treasure replaces
    /// the agent, so the belief restarts from uniform.
    pub fn observe_location_result(&mut self, loc: usize, contains_treasure: bool) {
        if contains_treasure {
            self.reset();
            return;
        }
        self.probs[loc] = 0.0;
        let rest: f64 = self.probs.iter().sum();
        if rest > 0.0 {
            for p in &mut self.probs {
                *p /= rest;
            }
        } else {
            self.probs.fill(0.0);
        }
    }

    /// Naive Bayesian update on another agent's observed action:
    /// `b(t) <- L(a|t) b(t) / sum`. A degenerate belief is left unchanged.
    pub fn social_update(&mut self, observed_action: usize, likelihood: &LikelihoodMatrix) {
        let row = likelihood.row(observed_action);
        let mut sum = 0.0;
        for (p, &l) in self.probs.iter_mut().zip(row) {
            *p *= l;
            sum += *p;
        }
        if sum > 0.0 {
            for p in &mut self.probs {
                *p /= sum;
            }
        }
    }

    /// Mixes in the chance that the treasure has just been relocated:
    /// `b(t) <- p_change / n + (1 - p_change) b(t)`.
    pub fn apply_uncertainty(&mut self, p_change: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p_change) {
            return Err(Error::OutOfRange {
                what: "p_change",
                value: p_change,
            });
        }
        if self.is_degenerate() {
            return Err(Error::DegenerateBelief);
        }
        let mix = p_change / self.probs.len() as f64;
        for p in &mut self.probs {
            *p = mix + (1.0 - p_change) * *p;
        }
        Ok(())
    }
}

/// Conditional distribution `P(A = a | T = t)` of an observed agent's
/// action given the treasure location, stored row-major by action.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodMatrix {
    n: usize,
    cond: Vec<f64>,
}

impl LikelihoodMatrix {
    /// Every entry must be positive and every column must sum to one.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::TooFewLocations(n));
        }
        let mut cond = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            cond.extend_from_slice(row);
        }
        for (k, &value) in cond.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::LikelihoodNotPositive {
                    action: k / n,
                    treasure: k % n,
                    value,
                });
            }
        }
        for column in 0..n {
            let sum: f64 = (0..n).map(|a| cond[a * n + column]).sum();
            if (sum - 1.0).abs() > LIKELIHOOD_TOLERANCE {
                return Err(Error::LikelihoodNotNormalized { column, sum });
            }
        }
        Ok(Self { n, cond })
    }

    /// Diagonal `hit`, off-diagonal `(1 - hit) / (n - 1)`.
    pub fn symmetric(n: usize, hit: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewLocations(n));
        }
        if !(hit > 0.0 && hit < 1.0) {
            return Err(Error::OutOfRange {
                what: "hit fraction",
                value: hit,
            });
        }
        let off = (1.0 - hit) / (n - 1) as f64;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|a| (0..n).map(|t| if a == t { hit } else { off }).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, action: usize, treasure: usize) -> f64 {
        self.cond[action * self.n + treasure]
    }

    /// `L(action | t)` for every `t`.
    pub fn row(&self, action: usize) -> &[f64] {
        &self.cond[action * self.n..(action + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.cond.chunks_exact(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory::{entropy, Distribution};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig1() -> LikelihoodMatrix {
        LikelihoodMatrix::symmetric(10, 0.18028).unwrap()
    }

    fn assert_valid(b: &Belief) {
        if !b.is_degenerate() {
            let s: f64 = b.probs().iter().sum();
            assert!((s - 1.0).abs() < 1e-9, "sum {s}");
            assert!(b.probs().iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn uniform_construction() {
        assert_eq!(Belief::uniform(10).unwrap().probs(), &[0.1; 10]);
        assert_eq!(Belief::uniform(2).unwrap().probs(), &[0.5, 0.5]);
        assert!(Belief::uniform(1).is_err());
        let h = entropy(&Distribution::new(Belief::uniform(10).unwrap().probs().to_vec()).unwrap());
        assert!((h - 10f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn from_probs_accepts_normal_and_degenerate() {
        assert!(Belief::from_probs(vec![0.0, 0.0, 0.0])
            .unwrap()
            .is_degenerate());
        assert!(Belief::from_probs(vec![0.2, 0.2]).is_err());
        assert!(Belief::from_probs(vec![-0.5, 1.5]).is_err());
    }

    #[test]
    fn action_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = Belief::from_probs(vec![0.5, 0.3, 0.2]).unwrap();
        assert!((0..100).all(|_| b.select_action(&mut rng) == 0));

        let b = Belief::from_probs(vec![0.5, 0.5, 0.0]).unwrap();
        let mut counts = [0usize; 3];
        for _ in 0..20_000 {
            counts[b.select_action(&mut rng)] += 1;
        }
        assert_eq!(counts[2], 0);
        assert!((counts[0] as f64 / 20_000.0 - 0.5).abs() < 0.02);

        let b = Belief::from_probs(vec![0.0; 10]).unwrap();
        let mut counts = [0usize; 10];
        for _ in 0..100_000 {
            counts[b.select_action(&mut rng)] += 1;
        }
        for c in counts {
            assert!((c as f64 / 100_000.0 - 0.1).abs() < 0.01);
        }
    }

    #[test]
    fn near_ties_are_ties() {
        let b = Belief::from_probs(vec![0.5, 0.5 - 1e-14, 0.0]).unwrap();
        assert_eq!(b.argmax_set(), vec![0, 1]);
    }

    #[test]
    fn inspection_results() {
        let mut b = Belief::uniform(10).unwrap();
        b.observe_location_result(3, false);
        assert_eq!(b.probs()[3], 0.0);
        for (i, &p) in b.probs().iter().enumerate() {
            if i != 3 {
                assert!((p - 1.0 / 9.0).abs() < 1e-15);
            }
        }
        b.observe_location_result(5, true);
        assert_eq!(b, Belief::uniform(10).unwrap());

        let mut b = Belief::from_probs(vec![1.0, 0.0, 0.0]).unwrap();
        b.observe_location_result(0, false);
        assert!(b.is_degenerate());
    }

    #[test]
    fn social_update_examples() {
        let l = fig1();
        let mut b = Belief::uniform(10).unwrap();
        b.social_update(3, &l);
        assert!((b.probs()[3] - 0.18028).abs() < 1e-12);
        let off = (1.0 - 0.18028) / 9.0;
        assert!((b.probs()[0] - off).abs() < 1e-12);
        assert!((off - 0.0911).abs() < 1e-4);

        let mut delta = vec![0.0; 10];
        delta[5] = 1.0;
        let mut b = Belief::from_probs(delta.clone()).unwrap();
        b.social_update(2, &l);
        b.social_update(5, &l);
        assert_eq!(b.probs(), delta.as_slice());

        // Two observations of 3 equal one update with the squared column.
        let mut twice = Belief::uniform(10).unwrap();
        twice.social_update(3, &l);
        twice.social_update(3, &l);
        let sq: Vec<f64> = l.row(3).iter().map(|x| x * x).collect();
        let s: f64 = sq.iter().sum();
        for (p, q) in twice.probs().iter().zip(&sq) {
            assert!((p - q / s).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_social_update_is_noop() {
        let mut b = Belief::from_probs(vec![0.0; 10]).unwrap();
        b.social_update(1, &fig1());
        assert!(b.is_degenerate());
    }

    #[test]
    fn uncertainty_examples() {
        let mut b = Belief::uniform(10).unwrap();
        b.apply_uncertainty(0.37).unwrap();
        for &p in b.probs() {
            assert!((p - 0.1).abs() < 1e-15);
        }
        let mut delta = vec![0.0; 10];
        delta[4] = 1.0;
        let mut b = Belief::from_probs(delta.clone()).unwrap();
        b.apply_uncertainty(0.01).unwrap();
        assert!((b.probs()[4] - 0.991).abs() < 1e-15);
        assert!((b.probs()[0] - 0.001).abs() < 1e-15);

        let mut b = Belief::from_probs(delta.clone()).unwrap();
        b.apply_uncertainty(0.0).unwrap();
        assert_eq!(b.probs(), delta.as_slice());

        let mut d = Belief::from_probs(vec![0.0; 10]).unwrap();
        assert!(matches!(
            d.apply_uncertainty(0.01),
            Err(Error::DegenerateBelief)
        ));
        assert!(Belief::uniform(3).unwrap().apply_uncertainty(1.5).is_err());
    }

    #[test]
    fn likelihood_validation() {
        assert!(LikelihoodMatrix::symmetric(10, 0.0).is_err());
        assert!(LikelihoodMatrix::from_rows(&[vec![0.5, 0.5], vec![0.6, 0.5]]).is_err());
        assert!(LikelihoodMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 0.5]]).is_err());
        let l = fig1();
        for t in 0..10 {
            let s: f64 = (0..10).map(|a| l.get(a, t)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    fn normal_belief(n: usize) -> impl proptest::strategy::Strategy<Value = Belief> {
        proptest::collection::vec(0.0f64..1.0, n).prop_map(|w| {
            let mut w = w;
            w[0] += 1e-3;
            let s: f64 = w.iter().sum();
            Belief::from_probs(w.into_iter().map(|x| x / s).collect()).unwrap()
        })
    }

    #[derive(Debug, Clone)]
    enum Step {
        Empty(usize),
        Found(usize),
        Social(usize),
        Uncertainty(f64),
    }

    fn step() -> impl proptest::strategy::Strategy<Value = Step> {
        prop_oneof![
            (0usize..10).prop_map(Step::Empty),
            (0usize..10).prop_map(Step::Found),
            (0usize..10).prop_map(Step::Social),
            (0.0f64..=1.0).prop_map(Step::Uncertainty),
        ]
    }

    proptest! {
        #[test]
        fn normalization_closure(b in normal_belief(10), steps in proptest::collection::vec(step(), 0..60)) {
            let l = fig1();
            let mut b = b;
            for s in steps {
                match s {
                    Step::Empty(i) => b.observe_location_result(i, false),
                    Step::Found(i) => b.observe_location_result(i, true),
                    Step::Social(a) => b.social_update(a, &l),
                    Step::Uncertainty(p) => {
                        if !b.is_degenerate() {
                            b.apply_uncertainty(p).unwrap();
                        }
                    }
                }
                assert_valid(&b);
            }
        }

        #[test]
        fn uncertainty_preserves_argmax(b in normal_belief(10), p in 0.0f64..0.999) {
            let before = b.argmax_set();
            let mut after = b.clone();
            after.apply_uncertainty(p).unwrap();
            prop_assert_eq!(before, after.argmax_set());
        }

        #[test]
        fn uncertainty_agents_never_degenerate(
            p in 1e-4f64..1.0,
            looks in proptest::collection::vec(0usize..10, 1..200),
        ) {
            let mut b = Belief::uniform(10).unwrap();
            for loc in looks {
                b.observe_location_result(loc, false);
                prop_assert!(!b.is_degenerate());
                b.apply_uncertainty(p).unwrap();
            }
        }

        #[test]
        fn social_updates_commute(b in normal_belief(10), a1 in 0usize..10, a2 in 0usize..10) {
            let l = fig1();
            let mut x = b.clone();
            x.social_update(a1, &l);
            x.social_update(a2, &l);
            let mut y = b;
            y.social_update(a2, &l);
            y.social_update(a1, &l);
            for (p, q) in x.probs().iter().zip(y.probs()) {
                prop_assert!((p - q).abs() < 1e-12);
            }
        }

        #[test]
        fn eliminated_locations_stay_eliminated(
            b in normal_belief(10),
            gone in 0usize..10,
            actions in proptest::collection::vec(0usize..10, 0..40),
        ) {
            let l = fig1();
            let mut b = b;
            b.observe_location_result(gone, false);
            for a in actions {
                b.social_update(a, &l);
                prop_assert_eq!(b.probs()[gone], 0.0);
            }
        }
    }
}
