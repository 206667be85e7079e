//! Time-driven orientation learning: demonstrations are projected to
//! `η = [ζ; ζ̇]` with `ζ = log(q * q̄_a)`, summarized by GMR, learned by the
//! kernel machine, adapted to desired quaternions and angular velocities, and
//! mapped back with `q = exp(ζ) * q_a`.

use log::info;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmm::{build_reference, fit_em, EmConfig, GaussianMixture, RefPoint};
use crate::kmp::{
    adapt_reference, fit, fit_smoothness_constrained, BlockLayout, DesiredEuclid, KernelSpec,
    KmpModel, Predictor, SmoothnessPenalty,
};
use crate::quat::{
    align_hemispheres, differentiate_omega, integrate_omega, quat_distance, AngularVelocity,
    QuatDemo, Tangent3, UnitQuaternion,
};

/// Default look-ahead used to relate angular velocities and `ζ̇`.
pub const DEFAULT_DELTA_T: f64 = 1e-3;

/// Default isotropic variance of desired points.
pub const DEFAULT_DESIRED_VAR: f64 = 1e-8;

/// A quaternion and angular velocity the trajectory should pass through.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesiredQuatState {
    pub t: f64,
    pub q: UnitQuaternion,
    pub omega: AngularVelocity,
    /// 6×6 covariance over `[ζ; ζ̇]`.
    pub cov: DMatrix<f64>,
}

impl DesiredQuatState {
    pub fn new(t: f64, q: UnitQuaternion, omega: AngularVelocity, cov: DMatrix<f64>) -> Result<Self> {
        if cov.shape() != (6, 6) {
            return Err(Error::Dim(format!(
                "desired covariance must be 6x6, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if cov.clone().cholesky().is_none() {
            return Err(Error::InvalidInput(
                "desired covariance must be symmetric positive definite".into(),
            ));
        }
        Ok(Self { t, q, omega, cov })
    }

    /// Desired state with covariance `var·I`.
    pub fn isotropic(t: f64, q: UnitQuaternion, omega: AngularVelocity, var: f64) -> Result<Self> {
        Self::new(t, q, omega, DMatrix::identity(6, 6) * var)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnConfig {
    pub em: EmConfig,
    pub kernel: KernelSpec,
    pub lambda: f64,
    /// Smoothness weight; `0` fits without the penalty.
    pub lambda_a: f64,
    pub penalty: SmoothnessPenalty,
    /// Size of the regression grid; defaults to the demonstration length.
    pub grid_n: Option<usize>,
    pub delta_t: f64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            em: EmConfig::default(),
            kernel: KernelSpec::gaussian(0.01).expect("valid default kernel"),
            lambda: 1.0,
            lambda_a: 0.0,
            penalty: SmoothnessPenalty::Acceleration,
            grid_n: None,
            delta_t: DEFAULT_DELTA_T,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientationModel {
    pub q_a: UnitQuaternion,
    pub kmp: KmpModel,
    pub gmm: GaussianMixture,
    pub delta_t: f64,
    /// Reference trajectory over `[ζ; ζ̇]` regressed from the demonstrations.
    pub reference: Vec<RefPoint>,
    /// Desired states the current fit was adapted to.
    pub desired: Vec<DesiredQuatState>,
    pub lambda_a: f64,
    pub penalty: SmoothnessPenalty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientationTrajectory {
    pub times: Vec<f64>,
    pub quats: Vec<UnitQuaternion>,
    pub omegas: Vec<AngularVelocity>,
    pub zetas: Vec<Tangent3>,
}

impl OrientationTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub c_q: f64,
    pub c_omega: f64,
    pub c_omega_dot: f64,
}

/// Projects a quaternion to `log(q * q̄_a)`.
pub fn project(q: &UnitQuaternion, q_a: &UnitQuaternion) -> Result<Tangent3> {
    q.prod(&q_a.conj()).log()
}

/// Maps `ζ` back to `exp(ζ) * q_a`.
pub fn recover(zeta: &Tangent3, q_a: &UnitQuaternion) -> Result<UnitQuaternion> {
    Ok(UnitQuaternion::exp(zeta)?.prod(q_a))
}

fn forward_diff(times: &[f64], zetas: &[Tangent3]) -> Vec<Tangent3> {
    let n = zetas.len();
    let mut out: Vec<Tangent3> = (0..n.saturating_sub(1))
        .map(|i| (zetas[i + 1] - zetas[i]) / (times[i + 1] - times[i]))
        .collect();
    match out.last() {
        Some(&last) => out.push(last),
        None if n == 1 => out.push(Tangent3::zeros()),
        None => {}
    }
    out
}

/// Projects aligned demonstrations to joint vectors `[t; ζ; ζ̇]`, demo by
/// demo in sample order.
pub fn transform_demos(demos: &[QuatDemo], q_a: &UnitQuaternion) -> Result<Vec<DVector<f64>>> {
    let aligned = align_hemispheres(demos)?;
    let mut out = Vec::with_capacity(aligned.iter().map(QuatDemo::len).sum());
    for (m, d) in aligned.iter().enumerate() {
        let zetas = d
            .quats
            .iter()
            .map(|q| project(q, q_a))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Domain(format!("demo {m}: {e}")))?;
        let dz = forward_diff(&d.times, &zetas);
        for ((t, z), v) in d.times.iter().zip(&zetas).zip(&dz) {
            out.push(DVector::from_column_slice(&[*t, z.x, z.y, z.z, v.x, v.y, v.z]));
        }
    }
    Ok(out)
}

fn fit_kmp(
    reference: &[RefPoint],
    kernel: &KernelSpec,
    lambda: f64,
    lambda_a: f64,
    penalty: SmoothnessPenalty,
) -> Result<KmpModel> {
    if lambda_a > 0.0 {
        fit_smoothness_constrained(reference, kernel, lambda, lambda_a, penalty)
    } else {
        fit(reference, kernel, BlockLayout::TimeDeriv, lambda)
    }
}

/// Uniform grid of `n` points over `[t0, t1]`.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..n)
            .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Learns an orientation model. `q_a` defaults to the first demonstrated
/// quaternion.
pub fn learn(demos: &[QuatDemo], q_a: Option<UnitQuaternion>, cfg: &LearnConfig) -> Result<OrientationModel> {
    let first = demos
        .first()
        .filter(|d| !d.is_empty())
        .ok_or_else(|| Error::InvalidInput("no demonstrations".into()))?;
    let q_a = q_a.unwrap_or(first.quats[0]);
    let data = transform_demos(demos, &q_a)?;
    let gmm = fit_em(&data, 1, &cfg.em)?;
    let t0 = demos.iter().map(|d| d.times[0]).fold(f64::INFINITY, f64::min);
    let t1 = demos
        .iter()
        .map(|d| *d.times.last().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let grid_n = cfg.grid_n.unwrap_or(first.len());
    let grid: Vec<Vec<f64>> = uniform_grid(t0, t1, grid_n).into_iter().map(|t| vec![t]).collect();
    let reference = build_reference(&gmm, &grid)?;
    info!("fitting kernel machine on {} reference points", reference.len());
    let kmp = fit_kmp(&reference, &cfg.kernel, cfg.lambda, cfg.lambda_a, cfg.penalty)?;
    Ok(OrientationModel {
        q_a,
        kmp,
        gmm,
        delta_t: cfg.delta_t,
        reference,
        desired: Vec::new(),
        lambda_a: cfg.lambda_a,
        penalty: cfg.penalty,
    })
}

/// Maps desired quaternion states to desired `[ζ; ζ̇]` points.
pub fn transform_desired(
    points: &[DesiredQuatState],
    q_a: &UnitQuaternion,
    delta_t: f64,
) -> Result<Vec<DesiredEuclid>> {
    points
        .iter()
        .map(|p| {
            let zeta = project(&p.q, q_a)?;
            let ahead = integrate_omega(&p.q, &p.omega, delta_t)?;
            let zeta_dot = (project(&ahead, q_a)? - zeta) / delta_t;
            let mean = DVector::from_iterator(6, zeta.iter().chain(zeta_dot.iter()).copied());
            RefPoint::new(vec![p.t], mean, p.cov.clone())
        })
        .collect()
}

/// Refits `model` on `reference` extended by `desired`.
pub fn adapt_with_reference(
    model: &OrientationModel,
    desired: &[DesiredQuatState],
    reference: &[RefPoint],
) -> Result<OrientationModel> {
    let mut all = model.desired.clone();
    all.extend_from_slice(desired);
    let euclid = transform_desired(&all, &model.q_a, model.delta_t)?;
    let extended = adapt_reference(reference, &euclid)?;
    let kmp = fit_kmp(
        &extended,
        &model.kmp.kernel,
        model.kmp.lambda,
        model.lambda_a,
        model.penalty,
    )?;
    Ok(OrientationModel {
        kmp,
        reference: reference.to_vec(),
        desired: all,
        ..model.clone()
    })
}

/// Adapts `model` to pass through `desired`, in addition to any desired
/// states it was already adapted to.
pub fn adapt(model: &OrientationModel, desired: &[DesiredQuatState]) -> Result<OrientationModel> {
    adapt_with_reference(model, desired, &model.reference)
}

impl OrientationModel {
    /// Predicted `[ζ; ζ̇]` at `t`.
    pub fn predict_eta(&self, t: f64) -> Result<DVector<f64>> {
        Ok(self.kmp.predict(&[t])?.rows(0, 6).into_owned())
    }

    /// Refits with a different smoothness weight, keeping reference and
    /// desired states.
    pub fn with_lambda_a(&self, lambda_a: f64, penalty: SmoothnessPenalty) -> Result<Self> {
        let base = Self {
            lambda_a,
            penalty,
            desired: Vec::new(),
            ..self.clone()
        };
        adapt_with_reference(&base, &self.desired, &self.reference)
    }
}

fn zeta_of(eta: &DVector<f64>) -> Tangent3 {
    Tangent3::new(eta[0], eta[1], eta[2])
}

/// Rolls the model out at `times`. Angular velocities use the model's `δ_t`
/// look-ahead: `ω(t) = (2/δ_t) log(q(t + δ_t) * q̄(t))`.
pub fn rollout(model: &OrientationModel, times: &[f64]) -> Result<OrientationTrajectory> {
    let predictor = Predictor::new(&model.kmp)?;
    let dt = model.delta_t;
    let rows = crate::par::map(times, |&t| -> Result<(UnitQuaternion, AngularVelocity, Tangent3)> {
        let zeta = zeta_of(&predictor.predict(&[t])?);
        let ahead = zeta_of(&predictor.predict(&[t + dt])?);
        let q = recover(&zeta, &model.q_a)
            .map_err(|e| Error::Domain(format!("prediction at t = {t}: {e}")))?;
        let q_next = recover(&ahead, &model.q_a)
            .map_err(|e| Error::Domain(format!("prediction at t = {}: {e}", t + dt)))?;
        Ok((q, differentiate_omega(&q, &q_next, dt)?, zeta))
    });
    let mut traj = OrientationTrajectory {
        times: times.to_vec(),
        quats: Vec::with_capacity(times.len()),
        omegas: Vec::with_capacity(times.len()),
        zetas: Vec::with_capacity(times.len()),
    };
    for r in rows {
        let (q, w, z) = r?;
        traj.quats.push(q);
        traj.omegas.push(w);
        traj.zetas.push(z);
    }
    Ok(traj)
}

/// Smoothness costs of a trajectory: mean quaternion step, mean angular
/// velocity step, and mean squared angular acceleration by forward
/// differences.
pub fn metrics(traj: &OrientationTrajectory) -> Result<Metrics> {
    let n = traj.len();
    if n < 3 || traj.quats.len() != n || traj.omegas.len() != n {
        return Err(Error::Length(format!(
            "metrics need at least 3 samples with matching lengths, got {n}"
        )));
    }
    let nf = n as f64;
    let c_q = traj
        .quats
        .windows(2)
        .map(|w| {
            let (a, b) = (w[1].to_array(), w[0].to_array());
            let minus: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum();
            let plus: f64 = a.iter().zip(&b).map(|(x, y)| (x + y).powi(2)).sum();
            minus.min(plus).sqrt()
        })
        .sum::<f64>()
        / nf;
    let c_omega = traj
        .omegas
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .sum::<f64>()
        / nf;
    let wdot = forward_diff(&traj.times, &traj.omegas);
    let c_omega_dot = wdot.iter().map(|v| v.norm_squared()).sum::<f64>() / nf;
    Ok(Metrics { c_q, c_omega, c_omega_dot })
}

/// Per-desired-state errors of a trajectory: quaternion distance and angular
/// velocity error at the closest sample in time.
pub fn desired_errors(traj: &OrientationTrajectory, desired: &[DesiredQuatState]) -> Result<Vec<(f64, f64)>> {
    desired
        .iter()
        .map(|d| {
            let (i, _) = traj
                .times
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - d.t).abs().total_cmp(&(b.1 - d.t).abs()))
                .ok_or_else(|| Error::Length("empty trajectory".into()))?;
            Ok((quat_distance(&traj.quats[i], &d.q), (traj.omegas[i] - d.omega).norm()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    /// Angular velocities of the constant-increment trajectory.
    pub omega_const: Vec<AngularVelocity>,
    /// `max ‖ω̇‖` of the constant-increment trajectory.
    pub max_omega_dot: f64,
    /// `max ‖ω − 2Δ/δ_t‖` of the constant-increment trajectory.
    pub max_omega_dev: f64,
    /// Angular velocities of the quadratic trajectory.
    pub omega_quad: Vec<AngularVelocity>,
    /// `max ‖ω̈‖` of the quadratic trajectory.
    pub max_omega_ddot: f64,
    /// `max ‖ω(tₙ₊₁) − ω(tₙ) − 2Δ‖` of the quadratic trajectory.
    pub max_increment_dev: f64,
}

fn omegas_of(zetas: &[Tangent3], q_a: &UnitQuaternion, dt: f64) -> Result<Vec<AngularVelocity>> {
    let quats = zetas.iter().map(|z| recover(z, q_a)).collect::<Result<Vec<_>>>()?;
    quats
        .windows(2)
        .map(|w| differentiate_omega(&w[0], &w[1], dt))
        .collect()
}

/// Builds the trajectories `ζₙ = (n−1)Δ` and `ζₙ = (n−1)(n−2)δ_tΔ/2`, recovers
/// their quaternions, and measures how far their angular velocities are from
/// constant and from constant increments respectively.
pub fn verify_theorems(delta: &Tangent3, q_a: &UnitQuaternion, n: usize, dt: f64) -> Result<TheoremReport> {
    if n < 1 || !(dt > 0.0) {
        return Err(Error::Domain(format!("need n >= 1 and δ_t > 0 (n = {n}, δ_t = {dt})")));
    }
    let nf = n as f64;
    if delta.norm() * (nf + 2.0) >= std::f64::consts::PI
        || delta.norm() * (nf + 2.0) * (nf + 1.0) * dt / 2.0 >= std::f64::consts::PI
    {
        return Err(Error::Domain("trajectories leave the log-map domain".into()));
    }
    let lin: Vec<Tangent3> = (0..n + 2).map(|k| delta * k as f64).collect();
    let w1 = omegas_of(&lin, q_a, dt)?;
    let target = delta * (2.0 / dt);
    let max_omega_dev = w1.iter().map(|w| (w - target).norm()).fold(0.0, f64::max);
    let max_omega_dot = w1
        .windows(2)
        .map(|w| ((w[1] - w[0]) / dt).norm())
        .fold(0.0, f64::max);

    let quad: Vec<Tangent3> = (0..n + 3)
        .map(|k| delta * (k as f64 * (k as f64 - 1.0) * dt / 2.0))
        .collect();
    let w2 = omegas_of(&quad, q_a, dt)?;
    let max_increment_dev = w2
        .windows(2)
        .map(|w| (w[1] - w[0] - delta * 2.0).norm())
        .fold(0.0, f64::max);
    let max_omega_ddot = w2
        .windows(3)
        .map(|w| ((w[2] - w[1] * 2.0 + w[0]) / (dt * dt)).norm())
        .fold(0.0, f64::max);
    Ok(TheoremReport {
        omega_const: w1,
        max_omega_dot,
        max_omega_dev,
        omega_quad: w2,
        max_omega_ddot,
        max_increment_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qa() -> UnitQuaternion {
        UnitQuaternion::new(0.9, 0.1, -0.3, 0.2).unwrap()
    }

    fn const_traj(q: UnitQuaternion, n: usize) -> OrientationTrajectory {
        OrientationTrajectory {
            times: (0..n).map(|i| i as f64 * 0.1).collect(),
            quats: vec![q; n],
            omegas: vec![AngularVelocity::zeros(); n],
            zetas: vec![Tangent3::zeros(); n],
        }
    }

    #[test]
    fn constant_demo_projects_to_zero() {
        let q = qa();
        let d = QuatDemo::new(vec![0.0, 1.0, 2.0], vec![q, q, -q]).unwrap();
        for x in transform_demos(&[d], &q).unwrap() {
            assert!(x.rows(1, 6).amax() < 1e-15);
        }
    }

    #[test]
    fn transformed_demos_round_trip() {
        let keys = [qa(), UnitQuaternion::new(0.5, 0.5, 0.1, 0.7).unwrap()];
        let demos = crate::quat::gen_minjerk_demos(&keys, 10.0, 200, 3, 0.05, 3).unwrap();
        let data = transform_demos(&demos, &qa()).unwrap();
        for (x, q) in data.iter().zip(demos.iter().flat_map(|d| &d.quats)) {
            let r = recover(&Tangent3::new(x[1], x[2], x[3]), &qa()).unwrap();
            assert!(quat_distance(&r, q) < 1e-9);
        }
    }

    #[test]
    fn antipodal_demo_rejected() {
        let q = qa();
        let d = QuatDemo::new(vec![0.0, 1.0], vec![-q, -q]).unwrap();
        assert!(matches!(transform_demos(&[d], &q), Err(Error::Domain(_))));
    }

    #[test]
    fn desired_transform_cases() {
        let q = qa();
        let zero = transform_desired(
            &[DesiredQuatState::isotropic(1.0, q, AngularVelocity::zeros(), 1e-8).unwrap()],
            &q,
            1e-3,
        )
        .unwrap();
        assert_eq!(zero[0].mean, DVector::zeros(6));
        let w = AngularVelocity::new(0.06, -0.08, 0.0);
        let d = transform_desired(&[DesiredQuatState::isotropic(1.0, q, w, 1e-8).unwrap()], &q, 1e-3).unwrap();
        for k in 0..3 {
            assert_eq!(d[0].mean[k], 0.0);
            assert!((d[0].mean[3 + k] - w[k] / 2.0).abs() < 1e-3);
        }
        let other = UnitQuaternion::new(0.6, 0.2, 0.7, 0.1).unwrap();
        let d = transform_desired(&[DesiredQuatState::isotropic(2.0, other, AngularVelocity::zeros(), 1e-8).unwrap()], &q, 1e-3).unwrap();
        assert!(d[0].mean.rows(3, 3).amax() == 0.0);
        assert_eq!(d[0].input, vec![2.0]);
    }

    #[test]
    fn desired_covariance_validated() {
        let bad = DMatrix::from_element(6, 6, 1.0);
        assert!(DesiredQuatState::new(0.0, qa(), AngularVelocity::zeros(), bad).is_err());
        assert!(DesiredQuatState::new(0.0, qa(), AngularVelocity::zeros(), DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn metrics_of_constant_and_constant_rate() {
        let m = metrics(&const_traj(qa(), 10)).unwrap();
        assert_eq!((m.c_q, m.c_omega, m.c_omega_dot), (0.0, 0.0, 0.0));
        let delta = Tangent3::new(0.01, 0.02, 0.0);
        let dt = 0.1;
        let quats: Vec<UnitQuaternion> = (0..20).map(|n| recover(&(delta * n as f64), &qa()).unwrap()).collect();
        let omegas: Vec<AngularVelocity> = (0..20)
            .map(|n| differentiate_omega(&quats[n.min(18)], &quats[n.min(18) + 1], dt).unwrap())
            .collect();
        let traj = OrientationTrajectory {
            times: (0..20).map(|n| n as f64 * dt).collect(),
            quats,
            omegas,
            zetas: vec![Tangent3::zeros(); 20],
        };
        let m = metrics(&traj).unwrap();
        assert!(m.c_omega < 1e-12 && m.c_omega_dot < 1e-20);
        assert!(metrics(&const_traj(qa(), 2)).is_err());
    }

    #[test]
    fn metrics_three_sample_hand_case() {
        let q0 = UnitQuaternion::identity();
        let q1 = UnitQuaternion::from_array([0.6, 0.8, 0.0, 0.0]).unwrap();
        let q2 = UnitQuaternion::from_array([0.0, 1.0, 0.0, 0.0]).unwrap();
        let traj = OrientationTrajectory {
            times: vec![0.0, 0.5, 1.0],
            quats: vec![q0, q1, q2],
            omegas: vec![
                AngularVelocity::new(1.0, 0.0, 0.0),
                AngularVelocity::new(1.0, 2.0, 0.0),
                AngularVelocity::new(1.0, 2.0, 2.0),
            ],
            zetas: vec![Tangent3::zeros(); 3],
        };
        let m = metrics(&traj).unwrap();
        // Steps: |(−0.4, 0.8)| = √0.8 and |(−0.6, 0.2)| = √0.4.
        assert!((m.c_q - (0.8f64.sqrt() + 0.4f64.sqrt()) / 3.0).abs() < 1e-15);
        assert!((m.c_omega - 4.0 / 3.0).abs() < 1e-15);
        // ω̇ = (0,4,0), (0,0,4), (0,0,4) repeated.
        assert!((m.c_omega_dot - 48.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn theorem_checks() {
        let r = verify_theorems(&Tangent3::new(0.01, 0.0, 0.0), &qa(), 50, 0.01).unwrap();
        assert!(r.max_omega_dot <= 1e-8, "{}", r.max_omega_dot);
        assert!(r.max_omega_dev <= 1e-9);
        assert!(r.max_omega_ddot <= 1e-6, "{}", r.max_omega_ddot);
        assert!(r.max_increment_dev <= 1e-9);
        assert_eq!(r.omega_const.len(), 51);
        assert_eq!(r.omega_quad.len(), 52);
        assert!(verify_theorems(&Tangent3::new(0.1, 0.0, 0.0), &qa(), 50, 0.01).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn small_rate_desired_velocity(wx in -0.1..0.1f64, wy in -0.1..0.1f64, wz in -0.1..0.1f64) {
            let w = AngularVelocity::new(wx, wy, wz);
            let d = transform_desired(&[DesiredQuatState::isotropic(0.0, qa(), w, 1e-8).unwrap()], &qa(), 1e-3).unwrap();
            for k in 0..3 {
                prop_assert!((d[0].mean[3 + k] - w[k] / 2.0).abs() < 1e-3);
            }
        }
    }
}
