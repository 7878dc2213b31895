//! Ground truth: where the treasure is and how it moves.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    n: usize,
    treasure: usize,
    p_change: f64,
}

fn check_p_change(p_change: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p_change) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "p_change",
            value: p_change,
        })
    }
}

impl WorldState {
    /// Places the treasure uniformly at random.
    pub fn new<R: Rng + ?Sized>(n: usize, p_change: f64, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewLocations(n));
        }
        check_p_change(p_change)?;
        Ok(Self {
            n,
            treasure: rng.random_range(0..n),
            p_change,
        })
    }

    pub fn with_treasure(n: usize, treasure: usize, p_change: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewLocations(n));
        }
        if treasure >= n {
            return Err(Error::LocationOutOfRange { index: treasure, n });
        }
        check_p_change(p_change)?;
        Ok(Self {
            n,
            treasure,
            p_change,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn treasure(&self) -> usize {
        self.treasure
    }

    pub fn p_change(&self) -> f64 {
        self.p_change
    }

    /// Whether `loc` holds the treasure. Finding it does not move it.
    pub fn inspect(&self, loc: usize) -> Result<bool> {
        if loc >= self.n {
            return Err(Error::LocationOutOfRange {
                index: loc,
                n: self.n,
            });
        }
        Ok(loc == self.treasure)
    }

    /// With probability `p_change`, redraws the treasure uniformly over all
    /// locations (possibly the current one). Returns whether a redraw
    /// happened. A static world consumes no randomness.
    pub fn step_relocation<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.p_change <= 0.0 {
            return false;
        }
        if rng.random_bool(self.p_change) {
            self.treasure = rng.random_range(0..self.n);
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn placement_is_uniform_and_replayable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 10];
        for _ in 0..50_000 {
            counts[WorldState::new(10, 0.0, &mut rng).unwrap().treasure()] += 1;
        }
        for c in counts {
            assert!((c as f64 / 50_000.0 - 0.1).abs() < 0.01);
        }
        let a = WorldState::new(10, 0.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = WorldState::new(10, 0.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        let w = WorldState::new(2, 0.0, &mut rng).unwrap();
        assert!(w.treasure() < 2);
        assert!(WorldState::new(1, 0.0, &mut rng).is_err());
        assert!(WorldState::new(3, 1.5, &mut rng).is_err());
    }

    #[test]
    fn inspection() {
        let w = WorldState::with_treasure(10, 4, 0.0).unwrap();
        assert!(w.inspect(4).unwrap());
        assert!(!w.inspect(3).unwrap());
        assert_eq!(w.inspect(4).unwrap(), w.inspect(4).unwrap());
        assert!(w.inspect(10).is_err());
        assert!(WorldState::with_treasure(10, 10, 0.0).is_err());
    }

    #[test]
    fn static_world_never_moves() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut w = WorldState::with_treasure(10, 7, 0.0).unwrap();
        for _ in 0..1000 {
            assert!(!w.step_relocation(&mut rng));
            assert_eq!(w.treasure(), 7);
        }
    }

    #[test]
    fn forced_relocation_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut w = WorldState::with_treasure(10, 0, 1.0).unwrap();
        let mut counts = [0usize; 10];
        for _ in 0..100_000 {
            assert!(w.step_relocation(&mut rng));
            counts[w.treasure()] += 1;
        }
        for c in counts {
            assert!((c as f64 / 100_000.0 - 0.1).abs() < 0.005);
        }
    }

    #[test]
    fn mean_interval_between_relocations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut w = WorldState::with_treasure(10, 0, 0.01).unwrap();
        let steps = 1_000_000;
        let redraws = (0..steps).filter(|_| w.step_relocation(&mut rng)).count();
        let mean = steps as f64 / redraws as f64;
        assert!((mean - 100.0).abs() < 3.0, "mean {mean}");
    }

    #[test]
    fn long_run_distribution_is_uniform() {
        // Chi-square against uniform, 9 degrees of freedom. 27.88 is the
        // 0.999 quantile; consecutive states are correlated, so thin by 500 steps.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut w = WorldState::with_treasure(10, 0, 0.01).unwrap();
        let mut counts = [0f64; 10];
        let samples = 100_000;
        for _ in 0..samples {
            for _ in 0..500 {
                w.step_relocation(&mut rng);
            }
            assert!(w.treasure() < 10);
            counts[w.treasure()] += 1.0;
        }
        let expected = samples as f64 / 10.0;
        let chi2: f64 = counts
            .iter()
            .map(|c| (c - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 27.88, "chi2 {chi2}");
    }
}
