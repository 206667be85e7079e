//! Pose learning driven by high-dimensional inputs such as a tracked hand
//! position. Outputs are `ξ = [p; log(q * q̄_a)]`; inputs are standardized
//! per dimension before the mixture and the kernel see them.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmm::{build_reference, fit_em, marginal_sample, EmConfig, GaussianMixture, RefPoint};
use crate::kmp::{adapt_reference, fit, BlockLayout, KernelKind, KernelSpec, KmpModel};
use crate::orient::{project, recover};
use crate::quat::{Tangent3, UnitQuaternion};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseDemo {
    pub inputs: Vec<Vec<f64>>,
    pub positions: Vec<Vector3<f64>>,
    pub quats: Vec<UnitQuaternion>,
}

impl PoseDemo {
    pub fn new(inputs: Vec<Vec<f64>>, positions: Vec<Vector3<f64>>, quats: Vec<UnitQuaternion>) -> Result<Self> {
        if inputs.len() != positions.len() || inputs.len() != quats.len() {
            return Err(Error::Dim(format!(
                "{} inputs, {} positions and {} quaternions",
                inputs.len(),
                positions.len(),
                quats.len()
            )));
        }
        if let Some(first) = inputs.first() {
            if first.is_empty() || inputs.iter().any(|s| s.len() != first.len()) {
                return Err(Error::Dim("inputs must share one positive dimension".into()));
            }
        }
        Ok(Self { inputs, positions, quats })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesiredPose {
    pub input: Vec<f64>,
    pub position: Vector3<f64>,
    pub quat: UnitQuaternion,
    /// 6×6 covariance over `[p; log(q * q̄_a)]`.
    pub cov: DMatrix<f64>,
}

impl DesiredPose {
    pub fn new(input: Vec<f64>, position: Vector3<f64>, quat: UnitQuaternion, cov: DMatrix<f64>) -> Result<Self> {
        if cov.shape() != (6, 6) || cov.clone().cholesky().is_none() {
            return Err(Error::InvalidInput(
                "desired pose covariance must be 6x6 symmetric positive definite".into(),
            ));
        }
        Ok(Self { input, position, quat, cov })
    }

    pub fn isotropic(input: Vec<f64>, position: Vector3<f64>, quat: UnitQuaternion, var: f64) -> Result<Self> {
        Self::new(input, position, quat, DMatrix::identity(6, 6) * var)
    }
}

/// Per-dimension z-score transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(samples: &[&[f64]]) -> Result<Self> {
        let dim = samples
            .first()
            .map(|s| s.len())
            .ok_or_else(|| Error::InvalidInput("no inputs to standardize".into()))?;
        let n = samples.len() as f64;
        let mean: Vec<f64> = (0..dim).map(|k| samples.iter().map(|s| s[k]).sum::<f64>() / n).collect();
        let std = (0..dim)
            .map(|k| {
                let v = samples.iter().map(|s| (s[k] - mean[k]).powi(2)).sum::<f64>() / n;
                // A constant input dimension is left unscaled.
                if v > 0.0 { v.sqrt() } else { 1.0 }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.mean.len() {
            return Err(Error::Dim(format!(
                "input has dimension {}, model expects {}",
                s.len(),
                self.mean.len()
            )));
        }
        Ok(s.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, sd))| (x - m) / sd)
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoseLearnConfig {
    pub em: EmConfig,
    pub kernel: KernelSpec,
    pub lambda: f64,
    /// Number of marginal samples forming the reference; defaults to the
    /// length of the first demonstration.
    pub sample_n: Option<usize>,
    pub sample_seed: u64,
}

impl Default for PoseLearnConfig {
    fn default() -> Self {
        Self {
            em: EmConfig::default(),
            kernel: KernelSpec::gaussian(1.0).expect("valid default kernel"),
            lambda: 2.0,
            sample_n: None,
            sample_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseModel {
    pub q_a: UnitQuaternion,
    pub scaler: Standardizer,
    pub gmm: GaussianMixture,
    pub kmp: KmpModel,
    /// Reference over `ξ` at standardized inputs.
    pub reference: Vec<RefPoint>,
    pub desired: Vec<DesiredPose>,
}

/// Sign-aligns one demo's quaternions: consecutive samples share a
/// hemisphere, and the sequence starts in the hemisphere of `q_a`.
fn align_to(quats: &[UnitQuaternion], q_a: &UnitQuaternion) -> Vec<UnitQuaternion> {
    let mut out: Vec<UnitQuaternion> = Vec::with_capacity(quats.len());
    for q in quats {
        let q = match out.last() {
            Some(prev) if prev.dot(q) < 0.0 => -*q,
            None if q.dot(q_a) < 0.0 => -*q,
            _ => *q,
        };
        out.push(q);
    }
    out
}

/// Joint vectors `[s; p; log(q * q̄_a)]` with raw inputs, demo by demo.
pub fn transform_pose_demos(demos: &[PoseDemo], q_a: &UnitQuaternion) -> Result<Vec<DVector<f64>>> {
    let mut out = Vec::new();
    for (m, d) in demos.iter().enumerate() {
        let quats = align_to(&d.quats, q_a);
        for ((s, p), q) in d.inputs.iter().zip(&d.positions).zip(&quats) {
            let z = project(q, q_a).map_err(|e| Error::Domain(format!("demo {m}: {e}")))?;
            out.push(DVector::from_iterator(
                s.len() + 6,
                s.iter().copied().chain(p.iter().copied()).chain(z.iter().copied()),
            ));
        }
    }
    Ok(out)
}

fn pose_layout() -> BlockLayout {
    BlockLayout::Plain { out_dim: 6 }
}

/// Learns a pose model; `q_a` defaults to the identity.
pub fn learn_pose(demos: &[PoseDemo], q_a: Option<UnitQuaternion>, cfg: &PoseLearnConfig) -> Result<PoseModel> {
    let first = demos
        .iter()
        .find(|d| !d.is_empty())
        .ok_or_else(|| Error::InvalidInput("no demonstrations".into()))?;
    let dim = first.inputs[0].len();
    if demos.iter().flat_map(|d| &d.inputs).any(|s| s.len() != dim) {
        return Err(Error::Dim("demonstration inputs differ in dimension".into()));
    }
    if matches!(cfg.kernel.kind, KernelKind::Periodic { .. }) && dim != 1 {
        return Err(Error::Layout(
            "the periodic kernel takes one-dimensional inputs".into(),
        ));
    }
    let q_a = q_a.unwrap_or_else(UnitQuaternion::identity);
    let raw: Vec<&[f64]> = demos.iter().flat_map(|d| d.inputs.iter().map(Vec::as_slice)).collect();
    let scaler = Standardizer::fit(&raw)?;
    let mut data = transform_pose_demos(demos, &q_a)?;
    for x in &mut data {
        let s = scaler.apply(&x.as_slice()[..dim])?;
        x.rows_mut(0, dim).copy_from_slice(&s);
    }
    let gmm = fit_em(&data, dim, &cfg.em)?;
    let n = cfg.sample_n.unwrap_or(first.len());
    let inputs = marginal_sample(&gmm, n, cfg.sample_seed)?;
    let reference = build_reference(&gmm, &inputs)?;
    let kmp = fit(&reference, &cfg.kernel, pose_layout(), cfg.lambda)?;
    Ok(PoseModel {
        q_a,
        scaler,
        gmm,
        kmp,
        reference,
        desired: Vec::new(),
    })
}

/// Adapts `model` to pass through `desired`, in addition to any desired
/// poses it was already adapted to.
pub fn adapt_pose(model: &PoseModel, desired: &[DesiredPose]) -> Result<PoseModel> {
    adapt_pose_with_reference(model, desired, &model.reference)
}

pub fn adapt_pose_with_reference(
    model: &PoseModel,
    desired: &[DesiredPose],
    reference: &[RefPoint],
) -> Result<PoseModel> {
    let mut all = model.desired.clone();
    all.extend_from_slice(desired);
    let euclid = all
        .iter()
        .map(|d| {
            let z = project(&d.quat, &model.q_a)?;
            let mean = DVector::from_iterator(6, d.position.iter().chain(z.iter()).copied());
            RefPoint::new(model.scaler.apply(&d.input)?, mean, d.cov.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let extended = adapt_reference(reference, &euclid)?;
    let kmp = fit(&extended, &model.kmp.kernel, pose_layout(), model.kmp.lambda)?;
    Ok(PoseModel {
        kmp,
        reference: reference.to_vec(),
        desired: all,
        ..model.clone()
    })
}

/// Predicted position and orientation at raw input `s`.
pub fn predict_pose(model: &PoseModel, s: &[f64]) -> Result<(Vector3<f64>, UnitQuaternion)> {
    let xi = model.kmp.predict(&model.scaler.apply(s)?)?;
    let p = Vector3::new(xi[0], xi[1], xi[2]);
    let q = recover(&Tangent3::new(xi[3], xi[4], xi[5]), &model.q_a)
        .map_err(|e| Error::Domain(format!("prediction at {s:?}: {e}")))?;
    Ok((p, q))
}

/// Ground-truth pose map of the synthetic handover task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandoverTask {
    pub hand_start: Vector3<f64>,
    pub robot_start: Vector3<f64>,
    pub q_start: UnitQuaternion,
    /// Tangent-space orientation change per metre of hand displacement.
    pub turn: Matrix3<f64>,
}

impl Default for HandoverTask {
    fn default() -> Self {
        Self {
            hand_start: Vector3::new(0.9, -0.3, 0.2),
            robot_start: Vector3::new(0.4, 0.0, 0.5),
            q_start: UnitQuaternion::new(0.7, 0.1, 0.7, 0.1).expect("unit norm after scaling"),
            turn: Matrix3::new(0.6, -0.2, 0.1, 0.3, 0.8, -0.2, -0.1, 0.4, 0.7),
        }
    }
}

impl HandoverTask {
    /// Robot pose matching hand position `s`.
    pub fn pose(&self, s: &Vector3<f64>) -> Result<(Vector3<f64>, UnitQuaternion)> {
        let d = s - self.hand_start;
        let bend = Vector3::new(0.1 * (PI * d.y).sin(), 0.1 * (PI * d.z).sin(), 0.05 * d.x * d.x);
        let p = self.robot_start + d * 0.8 + bend;
        let q = UnitQuaternion::exp(&(self.turn * d))?.prod(&self.q_start);
        Ok((p, q))
    }
}

/// `m` handover demonstrations of `n` samples. Each moves the hand from a
/// common start toward a random handover location with a minimum-jerk
/// profile; the robot pose follows the hand through `task`, perturbed by
/// noise of size `noise`.
pub fn gen_handover_demos(task: &HandoverTask, n: usize, m: usize, noise: f64, seed: u64) -> Result<Vec<PoseDemo>> {
    if n < 2 || m < 1 {
        return Err(Error::InvalidInput(format!("need n >= 2 and m >= 1 (n = {n}, m = {m})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut demos = Vec::with_capacity(m);
    for _ in 0..m {
        let goal = task.hand_start
            + Vector3::new(
                rng.random_range(-0.45..-0.3),
                rng.random_range(0.2..0.5),
                rng.random_range(0.1..0.3),
            );
        let jitter = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ) * noise;
        let mut inputs = Vec::with_capacity(n);
        let mut positions = Vec::with_capacity(n);
        let mut quats = Vec::with_capacity(n);
        for i in 0..n {
            let tau = i as f64 / (n - 1) as f64;
            let sm = tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
            let s = task.hand_start + (goal - task.hand_start) * sm;
            let (p, q) = task.pose(&s)?;
            let wobble = jitter * (PI * tau).sin();
            inputs.push(s.iter().copied().collect());
            positions.push(p + wobble);
            quats.push(UnitQuaternion::exp(&wobble)?.prod(&q));
        }
        demos.push(PoseDemo::new(inputs, positions, quats)?);
    }
    Ok(demos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::quat_distance;

    fn small_demos() -> Vec<PoseDemo> {
        gen_handover_demos(&HandoverTask::default(), 60, 4, 0.01, 1).unwrap()
    }

    #[test]
    fn constant_orientation_projects_to_zero() {
        let qa = UnitQuaternion::new(0.9, 0.3, 0.1, 0.0).unwrap();
        let d = PoseDemo::new(
            vec![vec![0.0, 1.0], vec![1.0, 2.0]],
            vec![Vector3::new(1.0, 2.0, 3.0), Vector3::new(-1.0, 0.5, 0.0)],
            vec![qa, -qa],
        )
        .unwrap();
        let x = transform_pose_demos(&[d], &qa).unwrap();
        assert_eq!(x[0].as_slice(), &[0.0, 1.0, 1.0, 2.0, 3.0, 0.0, 0.0, 0.0]);
        assert_eq!(x[1].as_slice(), &[1.0, 2.0, -1.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn quaternion_block_round_trips() {
        let demos = small_demos();
        let qa = UnitQuaternion::identity();
        let x = transform_pose_demos(&demos, &qa).unwrap();
        for (v, q) in x.iter().zip(demos.iter().flat_map(|d| &d.quats)) {
            let r = recover(&Tangent3::new(v[6], v[7], v[8]), &qa).unwrap();
            assert!(quat_distance(&r, q) < 1e-9);
        }
    }

    #[test]
    fn standardizer() {
        let a = [1.0, 10.0];
        let b = [3.0, 10.0];
        let s = Standardizer::fit(&[&a, &b]).unwrap();
        assert_eq!(s.apply(&[2.0, 10.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(s.apply(&[3.0, 11.0]).unwrap(), vec![1.0, 1.0]);
        assert!(s.apply(&[1.0]).is_err());
    }

    #[test]
    fn periodic_kernel_rejected_for_vector_inputs() {
        let cfg = PoseLearnConfig {
            kernel: KernelSpec::periodic(1.0, 2.0).unwrap(),
            ..Default::default()
        };
        assert!(matches!(learn_pose(&small_demos(), None, &cfg), Err(Error::Layout(_))));
    }

    #[test]
    fn constant_outputs_predict_constant() {
        let qa = UnitQuaternion::new(0.8, 0.0, 0.6, 0.0).unwrap();
        let p = Vector3::new(0.3, -0.2, 0.9);
        let demos: Vec<PoseDemo> = (0..3)
            .map(|m| {
                let inputs = (0..40).map(|i| vec![i as f64 * 0.01, m as f64 * 0.1, 0.0]).collect();
                PoseDemo::new(inputs, vec![p; 40], vec![qa; 40]).unwrap()
            })
            .collect();
        let cfg = PoseLearnConfig {
            em: EmConfig { components: 2, ..Default::default() },
            sample_n: Some(150),
            ..Default::default()
        };
        let model = learn_pose(&demos, Some(qa), &cfg).unwrap();
        for s in [[0.1, 0.1, 0.0], [0.2, 0.05, 0.0], [0.25, 0.15, 0.0]] {
            let (pp, qq) = predict_pose(&model, &s).unwrap();
            // GMR output means are exactly constant; only the ridge shrinks.
            assert!((pp - p).norm() < 0.05, "{pp} {s:?}");
            assert!(quat_distance(&qq, &qa) < 1e-12);
            assert!((qq.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn learning_is_deterministic_and_subsamples() {
        let cfg = PoseLearnConfig {
            em: EmConfig { components: 3, ..Default::default() },
            sample_n: Some(25),
            ..Default::default()
        };
        let a = learn_pose(&small_demos(), None, &cfg).unwrap();
        let b = learn_pose(&small_demos(), None, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.reference.len(), 25);
        let s = small_demos()[0].inputs[30].clone();
        assert_eq!(predict_pose(&a, &s).unwrap(), predict_pose(&a, &s).unwrap());
    }
}
