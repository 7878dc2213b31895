//! Scenario parameters from a flat `key = value` file and command-line
//! overrides.
//!
//! Recognised keys (`-` and `_` are interchangeable):
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `locations` | number of locations | 10 |
//! | `agents` | number of agents | 10 |
//! | `turns` | turns per run | 1000 |
//! | `runs` | runs per batch | 1000 |
//! | `seed` | master seed | 0 |
//! | `p_change` | per-turn relocation probability | 0.01 for changing-world presets, else 0 |
//! | `obs_prob` | observation probability, percent | preset |
//! | `focal_obs_prob` | agent 0's observation probability, percent | `obs_prob` |
//! | `calibration_samples` | actions used to estimate the likelihood | 100000 |
//! | `update_timing` | `immediate` or `end-of-turn` | `immediate` |
//!
//! Blank lines and lines starting with `#` are ignored.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cascade_core::{ScenarioParams, UpdateTiming};

/// Parameters given explicitly, by file or flag. `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub locations: Option<usize>,
    pub agents: Option<usize>,
    pub turns: Option<u64>,
    pub runs: Option<u64>,
    pub seed: Option<u64>,
    pub p_change: Option<f64>,
    /// Percent.
    pub obs_prob: Option<f64>,
    /// Percent.
    pub focal_obs_prob: Option<f64>,
    pub calibration_samples: Option<u64>,
    pub update_timing: Option<UpdateTiming>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value '{value}' for key '{key}': {e}"))
}

pub fn parse_timing(value: &str) -> Result<UpdateTiming> {
    match value {
        "immediate" => Ok(UpdateTiming::Immediate),
        "end-of-turn" | "end_of_turn" => Ok(UpdateTiming::EndOfTurn),
        other => bail!(
            "invalid value '{other}' for key 'update_timing': expected immediate or end-of-turn"
        ),
    }
}

impl Overrides {
    /// Parses `key = value` lines.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!("line {}: expected key = value, got '{line}'", lineno + 1)
            })?;
            out.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_kv_text(&text).with_context(|| format!("in config {}", path.display()))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let canonical = key.replace('-', "_");
        match canonical.as_str() {
            "locations" => self.locations = Some(parse_value(key, value)?),
            "agents" => self.agents = Some(parse_value(key, value)?),
            "turns" => self.turns = Some(parse_value(key, value)?),
            "runs" => self.runs = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "p_change" => self.p_change = Some(parse_value(key, value)?),
            "obs_prob" => self.obs_prob = Some(parse_value(key, value)?),
            "focal_obs_prob" => self.focal_obs_prob = Some(parse_value(key, value)?),
            "calibration_samples" => self.calibration_samples = Some(parse_value(key, value)?),
            "update_timing" => self.update_timing = Some(parse_timing(value)?),
            _ => bail!("unknown key '{key}'"),
        }
        Ok(())
    }

    /// Values set in `other` win.
    pub fn overlay(mut self, other: &Overrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            locations,
            agents,
            turns,
            runs,
            seed,
            p_change,
            obs_prob,
            focal_obs_prob,
            calibration_samples,
            update_timing
        );
        self
    }

    /// Checks ranges and fills in defaults.
    pub fn resolve(&self) -> Result<ScenarioParams> {
        let d = ScenarioParams::default();
        let positive = |key: &str, v: u64| -> Result<u64> {
            if v == 0 {
                bail!("key '{key}' must be at least 1");
            }
            Ok(v)
        };
        let percent = |key: &str, v: Option<f64>| -> Result<Option<f64>> {
            match v {
                Some(p) if !(0.0..=100.0).contains(&p) => {
                    bail!("key '{key}' = {p} is outside 0..=100 percent")
                }
                Some(p) => Ok(Some(p / 100.0)),
                None => Ok(None),
            }
        };
        let locations = self.locations.unwrap_or(d.n_locations);
        if locations < 2 {
            bail!("key 'locations' must be at least 2");
        }
        if let Some(p) = self.p_change {
            if !(0.0..=1.0).contains(&p) {
                bail!("key 'p_change' = {p} is outside 0..=1");
            }
        }
        Ok(ScenarioParams {
            n_locations: locations,
            n_agents: positive("agents", self.agents.unwrap_or(d.n_agents) as u64)? as usize,
            turns: positive("turns", self.turns.unwrap_or(d.turns))?,
            runs: positive("runs", self.runs.unwrap_or(d.runs))?,
            seed: self.seed.unwrap_or(d.seed),
            p_change: self.p_change,
            obs_prob: percent("obs_prob", self.obs_prob)?,
            focal_obs_prob: percent("focal_obs_prob", self.focal_obs_prob)?,
            calibration_samples: self.calibration_samples.unwrap_or(d.calibration_samples),
            update_timing: self.update_timing.unwrap_or(d.update_timing),
        })
    }
}

/// Defaults, then the optional config file, then flags.
pub fn parse_config(file: Option<&Path>, flags: &Overrides) -> Result<ScenarioParams> {
    let base = match file {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    base.overlay(flags).resolve()
}
