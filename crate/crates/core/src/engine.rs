//! The turn-based simulation loop.
//!
//! Within a turn agents act one at a time in index order. When agent `i`
//! acts, its action and the treasure location at that moment are recorded,
//! then every other social agent independently notices the action with its
//! own observation probability and updates immediately. After that `i`
//! learns whether the location held the treasure, and uncertainty-model
//! agents mix in the relocation prior. The world may relocate the treasure
//! once all agents have acted.
//!
//! Every run draws from its own ChaCha stream keyed by (master seed, run
//! index), consumed strictly in event order, so a run is reproducible in
//! isolation and a batch is independent of how runs are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::belief::{Belief, LikelihoodMatrix};
use crate::error::{Error, Result};
use crate::metrics::JointCounts;
use crate::world::WorldState;

/// Smallest calibration sample accepted.
pub const MIN_CALIBRATION_SAMPLES: u64 = 10_000;

/// How an agent picks its next location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Visit the most likely location according to the belief.
    #[default]
    Greedy,
    /// Ignore the belief and visit a uniformly random location every turn.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgentConfig {
    pub social: bool,
    pub uncertainty_model: bool,
    /// Chance of noticing each action of another agent. Only consulted for
    /// social agents and only affects what this agent sees.
    pub obs_prob: f64,
    pub policy: Policy,
}

impl AgentConfig {
    pub fn non_social() -> Self {
        Self::default()
    }

    pub fn social(obs_prob: f64) -> Self {
        Self {
            social: true,
            obs_prob,
            ..Self::default()
        }
    }

    pub fn random() -> Self {
        Self {
            policy: Policy::Random,
            ..Self::default()
        }
    }

    pub fn with_uncertainty(mut self) -> Self {
        self.uncertainty_model = true;
        self
    }
}

/// When social observations are folded into beliefs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateTiming {
    /// As soon as the observed agent acts.
    #[default]
    Immediate,
    /// Queued and applied after every agent has acted in the turn.
    EndOfTurn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n_locations: usize,
    pub n_agents: usize,
    pub turns: u64,
    pub runs: u64,
    pub seed: u64,
    pub p_change: f64,
    pub agents: Vec<AgentConfig>,
    pub calibration_samples: u64,
    pub update_timing: UpdateTiming,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_locations: 10,
            n_agents: 10,
            turns: 1000,
            runs: 1000,
            seed: 0,
            p_change: 0.0,
            agents: vec![AgentConfig::non_social(); 10],
            calibration_samples: 100_000,
            update_timing: UpdateTiming::Immediate,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_locations < 2 {
            return Err(Error::TooFewLocations(self.n_locations));
        }
        if self.n_agents == 0 {
            return bad("n_agents must be at least 1".into());
        }
        if self.turns == 0 {
            return bad("turns must be at least 1".into());
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p_change) {
            return bad(format!("p_change {} must lie in [0, 1]", self.p_change));
        }
        if self.agents.len() != self.n_agents {
            return bad(format!(
                "{} agent configs for {} agents",
                self.agents.len(),
                self.n_agents
            ));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if !(0.0..=1.0).contains(&a.obs_prob) {
                return bad(format!(
                    "agent {i} obs_prob {} must lie in [0, 1]",
                    a.obs_prob
                ));
            }
        }
        Ok(())
    }
}

/// Accumulated per-agent statistics of one or more runs.
///
/// Hits and action counts are derived from the joint tables, so they can
/// never disagree with them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunRecord {
    n_locations: usize,
    joints: Vec<JointCounts>,
    search_turns: Vec<u64>,
}

impl RunRecord {
    pub fn new(n_agents: usize, n_locations: usize) -> Self {
        Self {
            n_locations,
            joints: vec![JointCounts::new(n_locations, n_locations); n_agents],
            search_turns: vec![0; n_agents],
        }
    }

    /// Builds a record from per-agent (action, treasure) tables.
    pub fn from_joints(joints: Vec<JointCounts>, search_turns: Option<Vec<u64>>) -> Self {
        let n_locations = joints.first().map_or(0, JointCounts::rows);
        let search_turns = search_turns.unwrap_or_else(|| vec![0; joints.len()]);
        Self {
            n_locations,
            joints,
            search_turns,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.joints.len()
    }

    pub fn n_locations(&self) -> usize {
        self.n_locations
    }

    pub fn joint(&self, agent: usize) -> &JointCounts {
        &self.joints[agent]
    }

    pub fn hits(&self, agent: usize) -> u64 {
        self.joints[agent].diagonal()
    }

    pub fn actions(&self, agent: usize) -> u64 {
        self.joints[agent].total()
    }

    /// Total length of the searches that ended in a find.
    pub fn completed_search_turns(&self, agent: usize) -> u64 {
        self.search_turns[agent]
    }

    pub fn total_actions(&self) -> u64 {
        self.joints.iter().map(JointCounts::total).sum()
    }

    pub fn merge(&mut self, other: &RunRecord) -> Result<()> {
        if self.joints.len() != other.joints.len() {
            return Err(Error::DimensionMismatch {
                expected: self.joints.len(),
                found: other.joints.len(),
            });
        }
        for (a, b) in self.joints.iter_mut().zip(&other.joints) {
            a.merge(b)?;
        }
        for (a, b) in self.search_turns.iter_mut().zip(&other.search_turns) {
            *a += b;
        }
        Ok(())
    }

    fn record(&mut self, agent: usize, action: usize, treasure: usize) {
        self.joints[agent].add(action, treasure);
    }
}

/// The random stream for run `run_index` of a batch seeded with `seed`.
pub fn run_rng(seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

/// The random stream reserved for likelihood calibration under `seed`.
pub fn calibration_rng(seed: u64) -> ChaCha8Rng {
    run_rng(seed, u64::MAX)
}

/// Visit counts per location of non-social agents searching a static world
/// with the treasure at location 0. An agent that finds the treasure is
/// replaced by a fresh one; the successful visit is counted.
pub fn calibrate_counts<R: Rng + ?Sized>(n: usize, samples: u64, rng: &mut R) -> Result<Vec<u64>> {
    if samples < MIN_CALIBRATION_SAMPLES {
        return Err(Error::TooFewSamples {
            requested: samples,
            floor: MIN_CALIBRATION_SAMPLES,
        });
    }
    let world = WorldState::with_treasure(n, 0, 0.0)?;
    let mut belief = Belief::uniform(n)?;
    let mut counts = vec![0u64; n];
    for _ in 0..samples {
        let action = belief.select_action(rng);
        counts[action] += 1;
        belief.observe_location_result(action, world.inspect(action)?);
    }
    Ok(counts)
}

/// Estimates `P(A|T)` from simulated non-social agents, pooled over the
/// permutation symmetry of the locations: the diagonal is the hit fraction
/// and the remaining mass is spread evenly.
pub fn calibrate_likelihood<R: Rng + ?Sized>(
    n: usize,
    samples: u64,
    rng: &mut R,
) -> Result<LikelihoodMatrix> {
    let counts = calibrate_counts(n, samples, rng)?;
    LikelihoodMatrix::symmetric(n, counts[0] as f64 / samples as f64)
}

/// One recorded action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Action {
    pub agent: usize,
    pub location: usize,
    /// Treasure location when the action was taken.
    pub treasure: usize,
}

impl Action {
    pub fn hit(&self) -> bool {
        self.location == self.treasure
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub config: AgentConfig,
    pub belief: Belief,
    search_len: u64,
}

impl Agent {
    pub fn new(config: AgentConfig, n_locations: usize) -> Result<Self> {
        Ok(Self {
            config,
            belief: Belief::uniform(n_locations)?,
            search_len: 0,
        })
    }

    fn observes(&self, rng: &mut ChaCha8Rng) -> bool {
        if !self.config.social || self.config.policy == Policy::Random {
            return false;
        }
        let p = self.config.obs_prob;
        if p >= 1.0 {
            true
        } else if p <= 0.0 {
            false
        } else {
            rng.random_bool(p)
        }
    }

    fn choose(&self, rng: &mut ChaCha8Rng) -> usize {
        match self.config.policy {
            Policy::Greedy => self.belief.select_action(rng),
            Policy::Random => rng.random_range(0..self.belief.len()),
        }
    }
}

/// State of a single run between turns.
#[derive(Debug, Clone)]
pub struct Simulation<'a> {
    world: WorldState,
    agents: Vec<Agent>,
    likelihood: &'a LikelihoodMatrix,
    rng: ChaCha8Rng,
    timing: UpdateTiming,
    record: RunRecord,
    turn_log: Vec<Action>,
    pending: Vec<(usize, usize)>,
}

impl<'a> Simulation<'a> {
    /// Sets up run `run_index` of `cfg`: fresh uniform beliefs and a
    /// treasure placed with the run's own stream.
    pub fn new(
        cfg: &ScenarioConfig,
        likelihood: &'a LikelihoodMatrix,
        run_index: u64,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut rng = run_rng(cfg.seed, run_index);
        let world = WorldState::new(cfg.n_locations, cfg.p_change, &mut rng)?;
        let agents = cfg
            .agents
            .iter()
            .map(|&a| Agent::new(a, cfg.n_locations))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(world, agents, likelihood, rng, cfg.update_timing)
    }

    pub fn from_parts(
        world: WorldState,
        agents: Vec<Agent>,
        likelihood: &'a LikelihoodMatrix,
        rng: ChaCha8Rng,
        timing: UpdateTiming,
    ) -> Result<Self> {
        let n = world.n();
        if likelihood.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: likelihood.n(),
            });
        }
        if let Some(a) = agents.iter().find(|a| a.belief.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.belief.len(),
            });
        }
        let record = RunRecord::new(agents.len(), n);
        Ok(Self {
            world,
            agents,
            likelihood,
            rng,
            timing,
            record,
            turn_log: Vec::new(),
            pending: Vec::new(),
        })
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn record(&self) -> &RunRecord {
        &self.record
    }

    pub fn into_record(self) -> RunRecord {
        self.record
    }

    /// Plays one turn and returns the actions taken, in order.
    pub fn run_turn(&mut self) -> &[Action] {
        self.turn_log.clear();
        let p_change = self.world.p_change();
        for i in 0..self.agents.len() {
            let location = self.agents[i].choose(&mut self.rng);
            let treasure = self.world.treasure();
            self.record.record(i, location, treasure);
            self.turn_log.push(Action {
                agent: i,
                location,
                treasure,
            });

            for j in 0..self.agents.len() {
                if j == i || !self.agents[j].observes(&mut self.rng) {
                    continue;
                }
                match self.timing {
                    UpdateTiming::Immediate => self.agents[j]
                        .belief
                        .social_update(location, self.likelihood),
                    UpdateTiming::EndOfTurn => self.pending.push((j, location)),
                }
            }

            let found = location == treasure;
            let agent = &mut self.agents[i];
            agent.search_len += 1;
            if found {
                self.record.search_turns[i] += agent.search_len;
                agent.search_len = 0;
            }
            if agent.config.policy == Policy::Random {
                continue;
            }
            agent.belief.observe_location_result(location, found);
            if agent.config.uncertainty_model && p_change > 0.0 {
                agent
                    .belief
                    .apply_uncertainty(p_change)
                    .expect("mixing with a positive relocation prior keeps every entry positive");
            }
        }
        for (j, location) in self.pending.drain(..) {
            self.agents[j]
                .belief
                .social_update(location, self.likelihood);
        }
        self.world.step_relocation(&mut self.rng);
        &self.turn_log
    }
}

/// Runs `cfg.turns` turns of run `run_index`.
pub fn run_simulation(
    cfg: &ScenarioConfig,
    likelihood: &LikelihoodMatrix,
    run_index: u64,
) -> Result<RunRecord> {
    let mut sim = Simulation::new(cfg, likelihood, run_index)?;
    for _ in 0..cfg.turns {
        sim.run_turn();
    }
    Ok(sim.into_record())
}

/// Runs every run of `cfg` (in parallel) and sums the records in run order.
pub fn run_batch(cfg: &ScenarioConfig, likelihood: &LikelihoodMatrix) -> Result<RunRecord> {
    cfg.validate()?;
    let records = (0..cfg.runs)
        .into_par_iter()
        .map(|run| run_simulation(cfg, likelihood, run))
        .collect::<Result<Vec<_>>>()?;
    let mut merged = RunRecord::new(cfg.n_agents, cfg.n_locations);
    for r in &records {
        merged.merge(r)?;
    }
    Ok(merged)
}
