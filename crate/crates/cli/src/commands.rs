use std::path::Path;

use log::info;
use nalgebra::Vector3;
use serde::Serialize;

use quatkmp::highdim::{adapt_pose, gen_handover_demos, learn_pose, predict_pose, HandoverTask};
use quatkmp::orient::{
    adapt as adapt_orient, desired_errors, learn, metrics, rollout as rollout_orient, uniform_grid, verify_theorems,
    OrientationModel, TheoremReport,
};
use quatkmp::quat::{gen_minjerk_demos, gen_rhythmic_demos, quat_distance, UnitQuaternion};
use quatkmp::Error;

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::files::{emit, to_json, DemoSet, Format, ModelFile, PoseTrajectory, Table, TrajectoryFile};

/// Thresholds for the constant and linear angular velocity checks.
const MAX_OMEGA_DOT: f64 = 1e-8;
const MAX_OMEGA_DDOT: f64 = 1e-6;

fn json_only(format: Option<Format>, what: &str) -> Result<(), CliError> {
    match format {
        Some(Format::Csv) => Err(CliError::Config(format!("{what} is written as JSON only"))),
        _ => Ok(()),
    }
}

pub fn gen_demos(cfg: &RunConfig, out: Option<&Path>, format: Option<Format>) -> Result<(), CliError> {
    let d = &cfg.demos;
    let noise = cfg.noise();
    // Generation failures are numerical here, whatever their kind.
    let numeric = |e: Error| CliError::Numerical(e.to_string());
    let set = match cfg.mode {
        Mode::Time | Mode::TimeAccel => {
            let keys = d
                .keys
                .iter()
                .map(|&k| UnitQuaternion::from_array(k))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Config(format!("demos.keys: {e}")))?;
            DemoSet::Quat(gen_minjerk_demos(&keys, d.duration, d.n, d.m, noise, cfg.seed).map_err(numeric)?)
        }
        Mode::Rhythmic => {
            let base =
                UnitQuaternion::from_array(d.base).map_err(|e| CliError::Config(format!("demos.base: {e}")))?;
            let amp = Vector3::from(d.amplitude);
            DemoSet::Quat(gen_rhythmic_demos(&base, &amp, d.period, d.n, d.m, noise, cfg.seed).map_err(numeric)?)
        }
        Mode::Highdim => {
            DemoSet::Pose(gen_handover_demos(&HandoverTask::default(), d.n, d.m, noise, cfg.seed).map_err(numeric)?)
        }
    };
    let span = match cfg.mode {
        Mode::Rhythmic => d.period,
        _ => d.duration,
    };
    eprintln!("generated {} demonstrations x {} samples over {} s", d.m, d.n, span);
    emit(out, &set.encode(format.unwrap_or(Format::Json))?)
}

pub fn train(cfg: &RunConfig, demos: &Path, out: Option<&Path>, format: Option<Format>) -> Result<(), CliError> {
    json_only(format, "a model")?;
    let set = DemoSet::read(demos)?;
    let file = match (cfg.mode, set) {
        (Mode::Highdim, DemoSet::Pose(d)) => {
            info!("learning pose model from {} demonstrations", d.len());
            ModelFile::Pose {
                model: learn_pose(&d, cfg.q_a()?, &cfg.pose_config()?)?,
            }
        }
        (Mode::Highdim, DemoSet::Quat(_)) => {
            return Err(CliError::Config("mode \"highdim\" needs pose demonstrations".into()))
        }
        (_, DemoSet::Pose(_)) => {
            return Err(CliError::Config("time modes need quaternion demonstrations".into()))
        }
        (mode, DemoSet::Quat(d)) => {
            info!("learning orientation model from {} demonstrations", d.len());
            ModelFile::Orientation {
                mode,
                model: learn(&d, cfg.q_a()?, &cfg.learn_config()?)?,
            }
        }
    };
    emit(out, &to_json(&file)?)
}

pub fn adapt(cfg: &RunConfig, model: &Path, out: Option<&Path>, format: Option<Format>) -> Result<(), CliError> {
    json_only(format, "a model")?;
    let file: ModelFile = crate::files::read_json(model)?;
    let adapted = match file {
        ModelFile::Orientation { mode, model } => {
            check_mode(cfg, mode)?;
            ModelFile::Orientation {
                mode,
                model: adapt_orient(&model, &cfg.desired_states()?)?,
            }
        }
        ModelFile::Pose { model } => {
            check_mode(cfg, Mode::Highdim)?;
            ModelFile::Pose {
                model: adapt_pose(&model, &cfg.desired_poses()?)?,
            }
        }
    };
    emit(out, &to_json(&adapted)?)
}

fn check_mode(cfg: &RunConfig, model_mode: Mode) -> Result<(), CliError> {
    if cfg.mode.is_time() != model_mode.is_time() {
        return Err(CliError::Config(format!(
            "config mode {:?} does not match the model's mode {:?}",
            cfg.mode, model_mode
        )));
    }
    Ok(())
}

fn time_grid(cfg: &RunConfig, model: &OrientationModel) -> Vec<f64> {
    let first = model.reference.first().map_or(0.0, |r| r.time());
    let last = model.reference.last().map_or(first, |r| r.time());
    let r = &cfg.rollout;
    uniform_grid(r.t0.unwrap_or(first), r.t1.unwrap_or(last), r.n.unwrap_or(1000))
}

pub fn rollout(cfg: &RunConfig, model: &Path, out: Option<&Path>, format: Option<Format>) -> Result<(), CliError> {
    let file: ModelFile = crate::files::read_json(model)?;
    let traj = match file {
        ModelFile::Orientation { model, .. } => {
            let times = time_grid(cfg, &model);
            info!("rolling out {} samples", times.len());
            TrajectoryFile::Time(rollout_orient(&model, &times)?)
        }
        ModelFile::Pose { model } => {
            let inputs = cfg
                .rollout
                .inputs
                .clone()
                .ok_or_else(|| CliError::Config("rollout.inputs is required for pose models".into()))?;
            let mut tr = PoseTrajectory {
                inputs: Vec::new(),
                positions: Vec::new(),
                quats: Vec::new(),
            };
            for s in inputs {
                let (p, q) = predict_pose(&model, &s)?;
                tr.inputs.push(s);
                tr.positions.push(p);
                tr.quats.push(q);
            }
            TrajectoryFile::Pose(tr)
        }
    };
    emit(out, &traj.encode(format.unwrap_or(Format::Csv))?)
}

#[derive(Debug, Serialize)]
struct TimePointReport {
    t: f64,
    quat_distance: f64,
    omega_error: f64,
}

#[derive(Debug, Serialize)]
struct PosePointReport {
    s: Vec<f64>,
    position_error: f64,
    quat_distance: f64,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum EvalReport {
    Time {
        c_q: f64,
        c_omega: f64,
        c_omega_dot: f64,
        desired: Vec<TimePointReport>,
    },
    Pose {
        desired: Vec<PosePointReport>,
    },
}

pub fn eval(cfg: &RunConfig, trajectory: &Path, out: Option<&Path>, format: Option<Format>) -> Result<(), CliError> {
    json_only(format, "an evaluation report")?;
    let report = match TrajectoryFile::read(trajectory)? {
        TrajectoryFile::Time(tr) => {
            if !cfg.mode.is_time() {
                return Err(CliError::Config("a time trajectory needs a time-mode config".into()));
            }
            let m = metrics(&tr)?;
            let want = cfg.desired_states()?;
            let errs = desired_errors(&tr, &want)?;
            EvalReport::Time {
                c_q: m.c_q,
                c_omega: m.c_omega,
                c_omega_dot: m.c_omega_dot,
                desired: want
                    .iter()
                    .zip(errs)
                    .map(|(d, (dq, dw))| TimePointReport {
                        t: d.t,
                        quat_distance: dq,
                        omega_error: dw,
                    })
                    .collect(),
            }
        }
        TrajectoryFile::Pose(tr) => {
            if cfg.mode.is_time() {
                return Err(CliError::Config("a pose trajectory needs the highdim config".into()));
            }
            if tr.inputs.is_empty() {
                return Err(CliError::Config("empty trajectory".into()));
            }
            let desired = cfg
                .desired_poses()?
                .into_iter()
                .map(|d| {
                    let dist = |s: &Vec<f64>| s.iter().zip(&d.input).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
                    let i = (0..tr.inputs.len())
                        .min_by(|&a, &b| dist(&tr.inputs[a]).total_cmp(&dist(&tr.inputs[b])))
                        .expect("non-empty");
                    PosePointReport {
                        position_error: (tr.positions[i] - d.position).norm(),
                        quat_distance: quat_distance(&tr.quats[i], &d.quat),
                        s: d.input,
                    }
                })
                .collect();
            EvalReport::Pose { desired }
        }
    };
    emit(out, &to_json(&report)?)
}

#[derive(Debug, Serialize)]
struct TheoremOutput {
    pass: bool,
    #[serde(flatten)]
    report: TheoremReport,
}

pub fn theorems(cfg: &RunConfig, out: Option<&Path>, format: Option<Format>) -> Result<(), CliError> {
    let th = &cfg.theorem;
    let q_a = cfg.q_a()?.unwrap_or_else(UnitQuaternion::identity);
    let report = verify_theorems(&Vector3::from(th.delta), &q_a, th.n, th.dt)?;
    let pass = report.max_omega_dot <= MAX_OMEGA_DOT && report.max_omega_ddot <= MAX_OMEGA_DDOT;
    eprintln!(
        "max |omega_dot| {:.3e}, max |omega_ddot| {:.3e}: {}",
        report.max_omega_dot,
        report.max_omega_ddot,
        if pass { "pass" } else { "fail" }
    );
    let bytes = match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&TheoremOutput {
            pass,
            report: report.clone(),
        })?,
        Format::Csv => {
            let mut t = Table::new(&["k", "const_wx", "const_wy", "const_wz", "quad_wx", "quad_wy", "quad_wz"]);
            for (k, (a, b)) in report.omega_const.iter().zip(&report.omega_quad).enumerate() {
                t.rows.push(vec![k as f64, a.x, a.y, a.z, b.x, b.y, b.z]);
            }
            t.to_csv()?
        }
    };
    emit(out, &bytes)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Numerical("angular velocity checks exceeded their thresholds".into()))
    }
}

pub fn sweep(cfg: &RunConfig, model: &Path, out: Option<&Path>, format: Option<Format>) -> Result<(), CliError> {
    let file: ModelFile = crate::files::read_json(model)?;
    let ModelFile::Orientation { model, .. } = file else {
        return Err(CliError::Config("sweep-lambda-a needs an orientation model".into()));
    };
    let mut base = model.clone();
    base.desired.extend(cfg.desired_states()?);
    let times = time_grid(cfg, &model);
    let mut t = Table::new(&[
        "lambda_a",
        "c_q",
        "c_omega",
        "c_omega_dot",
        "max_quat_distance",
        "max_omega_error",
    ]);
    for &la in &cfg.sweep_lambda_a {
        info!("refitting with lambda_a = {la}");
        let m = base.with_lambda_a(la, cfg.penalty)?;
        let tr = rollout_orient(&m, &times)?;
        let c = metrics(&tr)?;
        let (dq, dw) = desired_errors(&tr, &m.desired)?
            .into_iter()
            .fold((0.0f64, 0.0f64), |(a, b), (q, w)| (a.max(q), b.max(w)));
        t.rows.push(vec![la, c.c_q, c.c_omega, c.c_omega_dot, dq, dw]);
    }
    let bytes = match format.unwrap_or(Format::Csv) {
        Format::Csv => t.to_csv()?,
        Format::Json => {
            let rows: Vec<serde_json::Map<String, serde_json::Value>> = t
                .rows
                .iter()
                .map(|r| t.header.iter().cloned().zip(r.iter().map(|&v| serde_json::json!(v))).collect())
                .collect();
            to_json(&rows)?
        }
    };
    emit(out, &bytes)
}
