//! Run configuration: one JSON document per run.

use std::path::Path;

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use quatkmp::gmm::EmConfig;
use quatkmp::highdim::{DesiredPose, PoseLearnConfig};
use quatkmp::kmp::{KernelKind, KernelSpec, SmoothnessPenalty, DEFAULT_DELTA};
use quatkmp::orient::{DesiredQuatState, LearnConfig, DEFAULT_DELTA_T, DEFAULT_DESIRED_VAR};
use quatkmp::quat::UnitQuaternion;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Time,
    TimeAccel,
    Rhythmic,
    Highdim,
}

impl Mode {
    pub fn is_time(self) -> bool {
        self != Mode::Highdim
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemoConfig {
    /// Samples per demonstration.
    pub n: usize,
    /// Number of demonstrations.
    pub m: usize,
    pub duration: f64,
    pub noise: Option<f64>,
    pub keys: Vec<[f64; 4]>,
    pub base: [f64; 4],
    pub amplitude: [f64; 3],
    pub period: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            m: 5,
            duration: 10.0,
            noise: None,
            keys: vec![[0.8, 0.2, 0.4, 0.3], [0.45, 0.6, 0.3, 0.55]],
            base: [0.9, 0.1, 0.3, 0.2],
            amplitude: [0.4, 0.2, 0.3],
            period: 10.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RolloutConfig {
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub n: Option<usize>,
    /// Query inputs for the highdim mode.
    pub inputs: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheoremConfig {
    pub delta: [f64; 3],
    pub n: usize,
    pub dt: f64,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            delta: [0.01, 0.0, 0.0],
            n: 50,
            dt: 0.01,
        }
    }
}

/// A desired state. Time modes use `t`, `q` and `omega`; the highdim mode
/// uses `s`, `p` and `q`. Either `sigma` (isotropic) or a full `cov` may be
/// given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesiredPoint {
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub s: Option<Vec<f64>>,
    pub q: [f64; 4],
    #[serde(default)]
    pub omega: Option<[f64; 3]>,
    #[serde(default)]
    pub p: Option<[f64; 3]>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub cov: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: Mode,
    pub kernel: Option<KernelKind>,
    pub lambda: Option<f64>,
    pub lambda_a: Option<f64>,
    pub penalty: SmoothnessPenalty,
    /// Number of mixture components.
    #[serde(rename = "C")]
    pub components: usize,
    pub grid_n: Option<usize>,
    pub sample_n: Option<usize>,
    pub seed: u64,
    pub q_a: Option<[f64; 4]>,
    pub delta: f64,
    pub delta_t: f64,
    pub demos: DemoConfig,
    pub desired_points: Vec<DesiredPoint>,
    pub rollout: RolloutConfig,
    pub sweep_lambda_a: Vec<f64>,
    pub theorem: TheoremConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Time,
            kernel: None,
            lambda: None,
            lambda_a: None,
            penalty: SmoothnessPenalty::Acceleration,
            components: EmConfig::default().components,
            grid_n: None,
            sample_n: None,
            seed: 0,
            q_a: None,
            delta: DEFAULT_DELTA,
            delta_t: DEFAULT_DELTA_T,
            demos: DemoConfig::default(),
            desired_points: Vec::new(),
            rollout: RolloutConfig::default(),
            sweep_lambda_a: vec![1e1, 1e2, 1e3, 1e4, 1e5],
            theorem: TheoremConfig::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn quat(c: [f64; 4], what: &str) -> Result<UnitQuaternion, CliError> {
    UnitQuaternion::from_array(c).map_err(|e| config_err(format!("{what}: {e}")))
}

impl RunConfig {
    /// Reads and validates a config; `None` gives the defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kernel_kind(&self) -> KernelKind {
        self.kernel.unwrap_or(match self.mode {
            Mode::Time | Mode::TimeAccel => KernelKind::Gaussian { ell: 0.01 },
            Mode::Rhythmic => KernelKind::Periodic {
                ell: 0.4,
                period: self.demos.period,
            },
            Mode::Highdim => KernelKind::Gaussian { ell: 1.0 },
        })
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec, CliError> {
        KernelSpec::new(self.kernel_kind(), self.delta).map_err(|e| config_err(format!("kernel: {e}")))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(match self.mode {
            Mode::Time | Mode::TimeAccel => 1.0,
            Mode::Rhythmic => 10.0,
            Mode::Highdim => 2.0,
        })
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a.unwrap_or(if self.mode == Mode::TimeAccel { 1e3 } else { 0.0 })
    }

    pub fn noise(&self) -> f64 {
        self.demos.noise.unwrap_or(match self.mode {
            Mode::Highdim => 0.01,
            Mode::Rhythmic => 0.02,
            _ => 0.05,
        })
    }

    pub fn q_a(&self) -> Result<Option<UnitQuaternion>, CliError> {
        self.q_a.map(|c| quat(c, "q_a")).transpose()
    }

    fn em(&self) -> EmConfig {
        EmConfig {
            components: self.components,
            seed: self.seed,
            ..EmConfig::default()
        }
    }

    pub fn learn_config(&self) -> Result<LearnConfig, CliError> {
        Ok(LearnConfig {
            em: self.em(),
            kernel: self.kernel_spec()?,
            lambda: self.lambda(),
            lambda_a: self.lambda_a(),
            penalty: self.penalty,
            grid_n: self.grid_n,
            delta_t: self.delta_t,
        })
    }

    pub fn pose_config(&self) -> Result<PoseLearnConfig, CliError> {
        Ok(PoseLearnConfig {
            em: self.em(),
            kernel: self.kernel_spec()?,
            lambda: self.lambda(),
            sample_n: self.sample_n,
            sample_seed: self.seed,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        match (self.mode, self.kernel_kind()) {
            (Mode::Rhythmic, KernelKind::Gaussian { .. }) => {
                return Err(config_err("mode \"rhythmic\" requires a periodic kernel"))
            }
            (Mode::Highdim, KernelKind::Periodic { .. }) => {
                return Err(config_err("mode \"highdim\" requires a gaussian kernel"))
            }
            _ => {}
        }
        self.kernel_spec()?;
        let checks = [
            (self.lambda() > 0.0, "lambda must be positive"),
            (self.lambda_a() >= 0.0, "lambda_a must be non-negative"),
            (self.mode != Mode::TimeAccel || self.lambda_a() > 0.0, "mode \"time_accel\" requires lambda_a > 0"),
            (self.components >= 1, "C must be at least 1"),
            (self.grid_n.is_none_or(|n| n >= 2), "grid_n must be at least 2"),
            (self.sample_n.is_none_or(|n| n >= 1), "sample_n must be at least 1"),
            (self.delta_t > 0.0, "delta_t must be positive"),
            (self.demos.n >= 2 && self.demos.m >= 1, "demos need n >= 2 and m >= 1"),
            (self.demos.duration > 0.0 && self.demos.period > 0.0, "demo duration and period must be positive"),
            (self.noise() >= 0.0, "demo noise must be non-negative"),
            (self.sweep_lambda_a.iter().all(|&l| l > 0.0), "sweep_lambda_a entries must be positive"),
        ];
        if let Some((_, msg)) = checks.iter().find(|(ok, _)| !ok) {
            return Err(config_err(*msg));
        }
        self.q_a()?;
        for (i, p) in self.desired_points.iter().enumerate() {
            self.check_desired(i, p)?;
        }
        Ok(())
    }

    fn check_desired(&self, i: usize, p: &DesiredPoint) -> Result<(), CliError> {
        let at = |msg: &str| config_err(format!("desired_points[{i}]: {msg}"));
        if self.mode.is_time() {
            if p.t.is_none() || p.s.is_some() || p.p.is_some() {
                return Err(at("time modes take t, q, omega and no s or p"));
            }
        } else if p.s.is_none() || p.p.is_none() || p.t.is_some() || p.omega.is_some() {
            return Err(at("mode \"highdim\" takes s, p and q and no t or omega"));
        }
        if p.sigma.is_some() && p.cov.is_some() {
            return Err(at("give sigma or cov, not both"));
        }
        if p.sigma.is_some_and(|s| !(s > 0.0)) {
            return Err(at("sigma must be positive"));
        }
        if let Some(c) = &p.cov {
            if c.len() != 6 || c.iter().any(|r| r.len() != 6) {
                return Err(at("cov must be 6x6"));
            }
        }
        quat(p.q, &format!("desired_points[{i}].q"))?;
        Ok(())
    }

    fn cov_of(p: &DesiredPoint) -> DMatrix<f64> {
        match &p.cov {
            Some(rows) => DMatrix::from_fn(6, 6, |i, j| rows[i][j]),
            None => DMatrix::identity(6, 6) * p.sigma.unwrap_or(DEFAULT_DESIRED_VAR),
        }
    }

    pub fn desired_states(&self) -> Result<Vec<DesiredQuatState>, CliError> {
        self.desired_points
            .iter()
            .map(|p| {
                let w = p.omega.unwrap_or([0.0; 3]);
                Ok(DesiredQuatState::new(
                    p.t.expect("validated"),
                    quat(p.q, "desired q")?,
                    Vector3::from(w),
                    Self::cov_of(p),
                )?)
            })
            .collect()
    }

    pub fn desired_poses(&self) -> Result<Vec<DesiredPose>, CliError> {
        self.desired_points
            .iter()
            .map(|p| {
                Ok(DesiredPose::new(
                    p.s.clone().expect("validated"),
                    Vector3::from(p.p.expect("validated")),
                    quat(p.q, "desired q")?,
                    Self::cov_of(p),
                )?)
            })
            .collect()
    }
}
