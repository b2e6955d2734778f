//! Experiment configuration files.
//!
//! ```toml
//! problem = "tp1"
//! degrees = [1, 2, 3]
//! filters = ["DG", "symmetric", "RS", "SRV", "RLKV", "NP0"]
//! meshes = [20, 40, 80, 160]
//! times = { count = 50, end = 1.0 }   # or an explicit list
//! samples_per_element = 6
//! blend_rho = 2                        # 0 turns blending off
//! cfl = 0.05
//! ```
//!
//! Anything left out falls back to the standard protocol for the problem.

use std::path::Path;

use anyhow::{bail, Context};
use psiac::dg::ProblemId;
use psiac::harness::{uniform_times, FilterKind, RunConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: Option<String>,
    pub degrees: Option<Vec<usize>>,
    pub filters: Option<Vec<String>>,
    pub meshes: Option<Vec<usize>>,
    pub times: Option<Times>,
    pub samples_per_element: Option<usize>,
    pub blend_rho: Option<usize>,
    pub cfl: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Times {
    List(Vec<f64>),
    Uniform(UniformTimes),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UniformTimes {
    pub count: usize,
    pub end: f64,
}

impl Times {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Times::List(v) => v.clone(),
            Times::Uniform(u) => uniform_times(u.count, u.end),
        }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `over` win.
    pub fn merged(self, over: ConfigFile) -> ConfigFile {
        ConfigFile {
            problem: over.problem.or(self.problem),
            degrees: over.degrees.or(self.degrees),
            filters: over.filters.or(self.filters),
            meshes: over.meshes.or(self.meshes),
            times: over.times.or(self.times),
            samples_per_element: over.samples_per_element.or(self.samples_per_element),
            blend_rho: over.blend_rho.or(self.blend_rho),
            cfl: over.cfl.or(self.cfl),
        }
    }

    /// One validated run per degree.
    pub fn run_configs(&self) -> anyhow::Result<Vec<RunConfig>> {
        let Some(problem) = &self.problem else {
            bail!("no problem given (tp1, tp2 or tp3)");
        };
        let problem: ProblemId = problem.parse().map_err(anyhow::Error::msg)?;
        let filters = match &self.filters {
            Some(names) => Some(
                names
                    .iter()
                    .map(|s| s.parse::<FilterKind>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(anyhow::Error::msg)?,
            ),
            None => None,
        };
        let degrees = self.degrees.clone().unwrap_or_else(|| vec![1, 2, 3]);
        if degrees.is_empty() {
            bail!("no degrees given");
        }
        degrees
            .into_iter()
            .map(|d| {
                let mut cfg = RunConfig::standard(problem, d);
                if let Some(f) = &filters {
                    cfg.filters = f.clone();
                }
                if let Some(m) = &self.meshes {
                    cfg.meshes = m.clone();
                }
                if let Some(t) = &self.times {
                    cfg.times = t.values();
                }
                if let Some(s) = self.samples_per_element {
                    cfg.samples_per_element = s;
                }
                if let Some(rho) = self.blend_rho {
                    cfg.blend_rho = (rho > 0).then_some(rho);
                }
                if self.cfl.is_some() {
                    cfg.cfl = self.cfl;
                }
                if let Some(c) = cfg.cfl {
                    if !(c.is_finite() && c > 0.0) {
                        bail!("cfl must be positive, got {c}");
                    }
                }
                cfg.validate()?;
                Ok(cfg)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_time_forms_parse() {
        let a: ConfigFile = toml::from_str("problem = \"tp2\"\ntimes = [0.0, 0.5]").unwrap();
        assert_eq!(a.times.unwrap().values(), vec![0.0, 0.5]);
        let b: ConfigFile =
            toml::from_str("problem = \"tp2\"\ntimes = { count = 3, end = 1.0 }").unwrap();
        assert_eq!(b.times.unwrap().values(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ConfigFile>("problem = \"tp1\"\nmesh = [20]").is_err());
        assert!(
            toml::from_str::<ConfigFile>("times = { count = 3, end = 1.0, start = 0.0 }").is_err()
        );
    }

    #[test]
    fn overrides_and_defaults() {
        let file: ConfigFile =
            toml::from_str("problem = \"tp1\"\ndegrees = [1, 2]\nblend_rho = 1").unwrap();
        let over = ConfigFile {
            degrees: Some(vec![3]),
            blend_rho: Some(0),
            ..Default::default()
        };
        let cfgs = file.merged(over).run_configs().unwrap();
        assert_eq!(cfgs.len(), 1);
        assert_eq!(cfgs[0].d, 3);
        assert_eq!(cfgs[0].blend_rho, None);
        assert_eq!(cfgs[0].meshes, vec![20, 40, 80, 160]);
    }

    #[test]
    fn bad_values_fail_before_running() {
        let bad = |s: &str| {
            toml::from_str::<ConfigFile>(s)
                .unwrap()
                .run_configs()
                .is_err()
        };
        assert!(bad("problem = \"tp9\""));
        assert!(bad("problem = \"tp1\"\nfilters = [\"XYZ\"]"));
        assert!(bad("problem = \"tp1\"\nmeshes = [20, 30]"));
        assert!(bad("problem = \"tp1\"\ncfl = -1.0"));
        assert!(bad("degrees = [1]"));
    }
}
