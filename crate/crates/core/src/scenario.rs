//! Named experiment presets and observation-probability sweeps.

use std::fmt;
use std::str::FromStr;

use crate::belief::LikelihoodMatrix;
use crate::engine::{run_batch, AgentConfig, RunRecord, ScenarioConfig, UpdateTiming};
use crate::error::{Error, Result};
use crate::metrics::{tradeoff_point, AgentSelector, MeasuredPoint};

/// Relocation probability used by the changing-world presets.
pub const CHANGING_WORLD_P_CHANGE: f64 = 0.01;

/// Observation probability of the background population in the partial
/// observability presets and the focal sweep.
pub const DEFAULT_PARTIAL_OBS_PROB: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Non-social agents in a static world (each one is an independent single agent).
    Single,
    /// Agents that visit uniformly random locations; the chance baseline.
    Random,
    /// Agent 0 observes everyone; the rest are non-social. Static world.
    SingleSocial,
    /// Every agent observes every other. Static world.
    AllSocial,
    /// Non-social agents, moving treasure, no uncertainty model.
    SingleChanging,
    /// Non-social agents with the uncertainty model, moving treasure.
    SingleUncertain,
    /// Social agents with the uncertainty model, moving treasure.
    AllUncertainSocial,
    /// As above, with partial observation (30% by default).
    Partial,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Single,
        Preset::Random,
        Preset::SingleSocial,
        Preset::AllSocial,
        Preset::SingleChanging,
        Preset::SingleUncertain,
        Preset::AllUncertainSocial,
        Preset::Partial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Single => "single",
            Preset::Random => "random",
            Preset::SingleSocial => "single-social",
            Preset::AllSocial => "all-social",
            Preset::SingleChanging => "single-changing",
            Preset::SingleUncertain => "single-uncertain",
            Preset::AllUncertainSocial => "all-uncertain-social",
            Preset::Partial => "partial",
        }
    }

    pub fn default_p_change(self) -> f64 {
        match self {
            Preset::SingleChanging
            | Preset::SingleUncertain
            | Preset::AllUncertainSocial
            | Preset::Partial => CHANGING_WORLD_P_CHANGE,
            _ => 0.0,
        }
    }

    pub fn default_obs_prob(self) -> f64 {
        match self {
            Preset::Partial => DEFAULT_PARTIAL_OBS_PROB,
            Preset::SingleSocial | Preset::AllSocial | Preset::AllUncertainSocial => 1.0,
            _ => 0.0,
        }
    }

    fn agent(self, focal: bool, obs_prob: f64, focal_obs_prob: f64) -> AgentConfig {
        match self {
            Preset::Single | Preset::SingleChanging => AgentConfig::non_social(),
            Preset::Random => AgentConfig::random(),
            Preset::SingleUncertain => AgentConfig::non_social().with_uncertainty(),
            Preset::SingleSocial if focal => AgentConfig::social(focal_obs_prob),
            Preset::SingleSocial => AgentConfig::non_social(),
            Preset::AllSocial => AgentConfig::social(if focal { focal_obs_prob } else { obs_prob }),
            Preset::AllUncertainSocial | Preset::Partial => {
                AgentConfig::social(if focal { focal_obs_prob } else { obs_prob })
                    .with_uncertainty()
            }
        }
    }

    /// Selectors reported for this preset: the population, plus agent 0 and
    /// the others when agent 0 can differ from the rest.
    pub fn selectors(self, n_agents: usize) -> Vec<AgentSelector> {
        let mut out = vec![AgentSelector::Population];
        if n_agents > 1
            && matches!(
                self,
                Preset::SingleSocial
                    | Preset::AllSocial
                    | Preset::AllUncertainSocial
                    | Preset::Partial
            )
        {
            out.push(AgentSelector::Agent(0));
            out.push(AgentSelector::Except(0));
        }
        out
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown scenario '{s}'; expected one of: {}",
                    names.join(", ")
                ))
            })
    }
}

/// User-facing parameters of a scenario. Unset optional values fall back to
/// the preset's defaults. Probabilities are fractions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub n_locations: usize,
    pub n_agents: usize,
    pub turns: u64,
    pub runs: u64,
    pub seed: u64,
    pub p_change: Option<f64>,
    pub obs_prob: Option<f64>,
    pub focal_obs_prob: Option<f64>,
    pub calibration_samples: u64,
    pub update_timing: UpdateTiming,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        let d = ScenarioConfig::default();
        Self {
            n_locations: d.n_locations,
            n_agents: d.n_agents,
            turns: d.turns,
            runs: d.runs,
            seed: d.seed,
            p_change: None,
            obs_prob: None,
            focal_obs_prob: None,
            calibration_samples: d.calibration_samples,
            update_timing: UpdateTiming::Immediate,
        }
    }
}

/// A preset with every parameter resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub preset: Preset,
    pub p_change: f64,
    pub obs_prob: f64,
    pub focal_obs_prob: f64,
    pub config: ScenarioConfig,
}

impl Scenario {
    pub fn new(preset: Preset, params: &ScenarioParams) -> Result<Self> {
        let p_change = params.p_change.unwrap_or_else(|| preset.default_p_change());
        let obs_prob = params.obs_prob.unwrap_or_else(|| preset.default_obs_prob());
        let focal_obs_prob = params.focal_obs_prob.unwrap_or(obs_prob);
        let agents = (0..params.n_agents)
            .map(|i| preset.agent(i == 0, obs_prob, focal_obs_prob))
            .collect();
        let config = ScenarioConfig {
            n_locations: params.n_locations,
            n_agents: params.n_agents,
            turns: params.turns,
            runs: params.runs,
            seed: params.seed,
            p_change,
            agents,
            calibration_samples: params.calibration_samples,
            update_timing: params.update_timing,
        };
        config.validate()?;
        Ok(Self {
            preset,
            p_change,
            obs_prob,
            focal_obs_prob,
            config,
        })
    }

    pub fn run(&self, likelihood: &LikelihoodMatrix) -> Result<RunRecord> {
        run_batch(&self.config, likelihood)
    }
}

/// Which observation probability a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Every agent's.
    Population,
    /// Agent 0's only; the others keep the base value.
    Focal,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Population => "population",
            SweepParameter::Focal => "focal",
        }
    }

    pub fn selector(self) -> AgentSelector {
        match self {
            SweepParameter::Population => AgentSelector::Population,
            SweepParameter::Focal => AgentSelector::Agent(0),
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population" => Ok(SweepParameter::Population),
            "focal" => Ok(SweepParameter::Focal),
            other => Err(Error::InvalidConfig(format!(
                "unknown sweep parameter '{other}'; expected population or focal"
            ))),
        }
    }
}

/// A grid of observation probabilities, in percent, over a base scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub preset: Preset,
    pub base: ScenarioParams,
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// Swept observation probability in percent.
    pub percent: f64,
    pub scenario: Scenario,
    pub measured: MeasuredPoint,
    pub record: RunRecord,
}

impl SweepSpec {
    pub fn new(
        parameter: SweepParameter,
        start: f64,
        stop: f64,
        step: f64,
        preset: Preset,
        base: ScenarioParams,
    ) -> Result<Self> {
        let ok = start.is_finite()
            && stop.is_finite()
            && step.is_finite()
            && 0.0 <= start
            && start <= stop
            && stop <= 100.0
            && step > 0.0;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "malformed sweep grid start={start} stop={stop} step={step}; need 0 <= start <= stop <= 100 and step > 0"
            )));
        }
        Ok(Self {
            parameter,
            start,
            stop,
            step,
            preset,
            base,
        })
    }

    /// Grid points in percent, `start` up to `stop` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| {
                let x = self.start + k as f64 * self.step;
                // Keep decimal grids such as 0.1 steps free of binary noise.
                (x * 1e9).round() / 1e9
            })
            .collect()
    }

    pub fn scenario_at(&self, percent: f64) -> Result<Scenario> {
        let mut params = self.base.clone();
        let p = percent / 100.0;
        match self.parameter {
            SweepParameter::Population => {
                params.obs_prob = Some(p);
                params.focal_obs_prob = Some(p);
            }
            SweepParameter::Focal => {
                params.focal_obs_prob = Some(p);
            }
        }
        Scenario::new(self.preset, &params)
    }

    /// Evaluates every grid point. Each point is a full batch with the base
    /// seed, so a point's result does not depend on the rest of the grid.
    pub fn run(&self, likelihood: &LikelihoodMatrix) -> Result<Vec<SweepPoint>> {
        self.grid()
            .into_iter()
            .map(|percent| {
                let scenario = self.scenario_at(percent)?;
                let record = scenario.run(likelihood)?;
                let measured = tradeoff_point(&record, self.parameter.selector())?;
                Ok(SweepPoint {
                    percent,
                    scenario,
                    measured,
                    record,
                })
            })
            .collect()
    }
}
