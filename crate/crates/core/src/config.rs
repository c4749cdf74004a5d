//! JSON tower configuration.
//!
//! ```json
//! {
//!   "mode": "strict",
//!   "max_dim": 3,
//!   "k_max": 2,
//!   "tolerance": 1e-9,
//!   "levels": [
//!     { "generator": { "space": "circle", "level": 1 } },
//!     { "points_file": "level2.csv", "context": { "kind": "circle_geodesic" },
//!       "epsilon": 1.5707963267948966, "gamma": 0.7853981633974483 }
//!   ]
//! }
//! ```
//!
//! A level either names a generator or a CSV of points. An explicit
//! `epsilon` or `gamma` overrides the generator's values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::metric::{generate, read_points_csv, write_points_csv, Coverage, Generator, MetricContext, MetricSample, DEFAULT_TOLERANCE};
use crate::tower::{Schedule, ScheduleMode, Tower, TowerParams};
use crate::{Error, Exec, Result};

fn default_max_dim() -> usize {
    3
}

fn default_k_max() -> usize {
    2
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<MetricContext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Whether `gamma` is analytic rather than estimated.
    #[serde(default = "default_true")]
    pub gamma_exact: bool,
}

impl LevelConfig {
    pub fn from_generator(generator: Generator) -> Self {
        Self { generator: Some(generator), points_file: None, context: None, epsilon: None, gamma: None, gamma_exact: true }
    }

    /// Resolves the level to a sample; relative files are read from `base`.
    pub fn sample(&self, base: &Path) -> Result<MetricSample> {
        let mut sample = match (&self.generator, &self.points_file) {
            (Some(_), Some(_)) => return Err(Error::Parse("a level takes a generator or a points_file, not both".into())),
            (None, None) => return Err(Error::Parse("a level needs a generator or a points_file".into())),
            (Some(Generator::FromFile { path, context, epsilon, gamma }), None) => {
                let path = resolve(base, path);
                let generator = Generator::FromFile { path: path.display().to_string(), context: context.clone(), epsilon: *epsilon, gamma: *gamma };
                generate(&generator)?
            }
            (Some(g), None) => generate(g)?,
            (None, Some(file)) => {
                let context = self.context.clone().ok_or_else(|| Error::Parse("points_file needs a context".into()))?;
                let epsilon = self.epsilon.ok_or_else(|| Error::Parse("points_file needs an epsilon".into()))?;
                let points = read_points_csv(resolve(base, file))?;
                MetricSample::new(context, points, epsilon, None)?
            }
        };
        if let Some(e) = self.epsilon {
            sample.epsilon = e;
        }
        if let Some(g) = self.gamma {
            sample.gamma = Some(Coverage { radius: g, exact: self.gamma_exact });
        }
        MetricSample::new(sample.context, sample.points, sample.epsilon, sample.gamma)
    }
}

fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerConfig {
    #[serde(default)]
    pub mode: ScheduleMode,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub levels: Vec<LevelConfig>,
}

impl TowerConfig {
    /// Generator levels `1..=depth` of one of the example spaces.
    pub fn from_generators(mode: ScheduleMode, generators: Vec<Generator>) -> Self {
        Self {
            mode,
            max_dim: default_max_dim(),
            k_max: default_k_max(),
            tolerance: DEFAULT_TOLERANCE,
            levels: generators.into_iter().map(LevelConfig::from_generator).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Samples of every level, with relative files resolved against `base`.
    pub fn schedule(&self, base: &Path) -> Result<Schedule> {
        if self.levels.is_empty() {
            return Err(Error::Parse("config has no levels".into()));
        }
        let levels = self.levels.iter().map(|l| l.sample(base)).collect::<Result<Vec<_>>>()?;
        Ok(Schedule::new(self.mode, levels))
    }

    pub fn params(&self, exec: Exec) -> TowerParams {
        TowerParams { max_dim: self.max_dim, tolerance: self.tolerance, exec }
    }

    pub fn build(&self, base: &Path, exec: Exec) -> Result<Tower> {
        Tower::build(self.schedule(base)?, self.params(exec))
    }

    /// Writes `level<n>.csv` for each level into `dir` and returns the
    /// equivalent config that reads them back.
    pub fn materialize(&self, base: &Path, dir: &Path) -> Result<TowerConfig> {
        let schedule = self.schedule(base)?;
        let mut levels = Vec::with_capacity(schedule.depth());
        for (i, s) in schedule.levels.iter().enumerate() {
            let name = format!("level{}.csv", i + 1);
            write_points_csv(dir.join(&name), s)?;
            levels.push(LevelConfig {
                generator: None,
                points_file: Some(name),
                context: Some(s.context.clone()),
                epsilon: Some(s.epsilon),
                gamma: s.gamma.map(|g| g.radius),
                gamma_exact: s.gamma.is_none_or(|g| g.exact),
            });
        }
        Ok(TowerConfig { levels, ..self.clone() })
    }
}
