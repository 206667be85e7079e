//! Demo, model and trajectory files. JSON everywhere; CSV for demos and
//! trajectories, with a header row and 17 significant digits.

use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use quatkmp::highdim::{PoseDemo, PoseModel};
use quatkmp::orient::{OrientationModel, OrientationTrajectory};
use quatkmp::quat::{QuatDemo, UnitQuaternion};

use crate::config::Mode;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "demos", rename_all = "snake_case")]
pub enum DemoSet {
    Quat(Vec<QuatDemo>),
    Pose(Vec<PoseDemo>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelFile {
    Orientation { mode: Mode, model: OrientationModel },
    Pose { model: PoseModel },
}

/// Rolled-out poses of the highdim mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseTrajectory {
    pub inputs: Vec<Vec<f64>>,
    pub positions: Vec<Vector3<f64>>,
    pub quats: Vec<UnitQuaternion>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "trajectory", rename_all = "snake_case")]
pub enum TrajectoryFile {
    Time(OrientationTrajectory),
    Pose(PoseTrajectory),
}

/// A numeric table with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        w.write_record(&self.header).map_err(fail)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:.16e}"))).map_err(fail)?;
        }
        w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))
    }

    pub fn from_csv(path: &Path, text: &str) -> Result<Self, CliError> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let bad = |msg: String| CliError::Io {
            path: path.display().to_string(),
            msg,
        };
        let header = rd
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .iter()
            .map(|s| s.trim().to_string())
            .collect::<Vec<_>>();
        let mut rows = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Numerical(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn unit_quat(path: &Path, row: usize, c: [f64; 4]) -> Result<UnitQuaternion, CliError> {
    let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-6 {
        return Err(CliError::Io {
            path: path.display().to_string(),
            msg: format!("row {row}: quaternion norm {n} is not 1"),
        });
    }
    Ok(UnitQuaternion::from_array(c)?)
}

fn input_columns(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("s{i}")).collect()
}

const QUAT_COLS: [&str; 4] = ["qw", "qx", "qy", "qz"];

impl DemoSet {
    pub fn to_table(&self) -> Table {
        match self {
            DemoSet::Quat(demos) => {
                let mut t = Table::new(&["demo", "t", "qw", "qx", "qy", "qz"]);
                for (m, d) in demos.iter().enumerate() {
                    for (time, q) in d.times.iter().zip(&d.quats) {
                        let mut row = vec![m as f64, *time];
                        row.extend(q.to_array());
                        t.rows.push(row);
                    }
                }
                t
            }
            DemoSet::Pose(demos) => {
                let k = demos.first().and_then(|d| d.inputs.first()).map_or(0, Vec::len);
                let mut header = vec!["demo".to_string()];
                header.extend(input_columns(k));
                header.extend(["px", "py", "pz"].map(String::from));
                header.extend(QUAT_COLS.map(String::from));
                let mut t = Table { header, rows: Vec::new() };
                for (m, d) in demos.iter().enumerate() {
                    for ((s, p), q) in d.inputs.iter().zip(&d.positions).zip(&d.quats) {
                        let mut row = vec![m as f64];
                        row.extend(s);
                        row.extend(p.iter());
                        row.extend(q.to_array());
                        t.rows.push(row);
                    }
                }
                t
            }
        }
    }

    pub fn from_table(path: &Path, t: &Table) -> Result<Self, CliError> {
        let bad = |msg: &str| CliError::Io {
            path: path.display().to_string(),
            msg: msg.into(),
        };
        if t.col("demo") != Some(0) {
            return Err(bad("first column must be \"demo\""));
        }
        let mut groups: Vec<Vec<&Vec<f64>>> = Vec::new();
        for r in &t.rows {
            if r.len() != t.header.len() {
                return Err(bad("row length differs from header"));
            }
            let m = r[0] as usize;
            if m > groups.len() {
                return Err(bad("demo indices must be consecutive from 0"));
            }
            if m == groups.len() {
                groups.push(Vec::new());
            }
            groups[m].push(r);
        }
        let w = t.header.len();
        if t.col("t") == Some(1) && w == 6 {
            let demos = groups
                .iter()
                .map(|g| {
                    let times = g.iter().map(|r| r[1]).collect();
                    let quats = g
                        .iter()
                        .enumerate()
                        .map(|(i, r)| unit_quat(path, i + 2, [r[2], r[3], r[4], r[5]]))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(QuatDemo::new(times, quats)?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(DemoSet::Quat(demos))
        } else if t.col("px").is_some_and(|c| c >= 2 && c + 7 == w) {
            let k = t.col("px").unwrap() - 1;
            let demos = groups
                .iter()
                .map(|g| {
                    let inputs = g.iter().map(|r| r[1..=k].to_vec()).collect();
                    let positions = g.iter().map(|r| Vector3::new(r[k + 1], r[k + 2], r[k + 3])).collect();
                    let quats = g
                        .iter()
                        .enumerate()
                        .map(|(i, r)| unit_quat(path, i + 2, [r[k + 4], r[k + 5], r[k + 6], r[k + 7]]))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(PoseDemo::new(inputs, positions, quats)?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(DemoSet::Pose(demos))
        } else {
            Err(bad("unrecognized demo columns"))
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        if looks_like_json(&text) {
            serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
        } else {
            Self::from_table(path, &Table::from_csv(path, &text)?)
        }
    }

    pub fn encode(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => self.to_table().to_csv(),
        }
    }
}

const TIME_COLS: [&str; 11] = ["t", "qw", "qx", "qy", "qz", "wx", "wy", "wz", "zx", "zy", "zz"];

impl TrajectoryFile {
    pub fn to_table(&self) -> Table {
        match self {
            TrajectoryFile::Time(tr) => {
                let mut t = Table::new(&TIME_COLS);
                for i in 0..tr.len() {
                    let mut row = vec![tr.times[i]];
                    row.extend(tr.quats[i].to_array());
                    row.extend(tr.omegas[i].iter());
                    row.extend(tr.zetas[i].iter());
                    t.rows.push(row);
                }
                t
            }
            TrajectoryFile::Pose(tr) => {
                let k = tr.inputs.first().map_or(0, Vec::len);
                let mut header = input_columns(k);
                header.extend(["px", "py", "pz"].map(String::from));
                header.extend(QUAT_COLS.map(String::from));
                let mut t = Table { header, rows: Vec::new() };
                for ((s, p), q) in tr.inputs.iter().zip(&tr.positions).zip(&tr.quats) {
                    let mut row = s.clone();
                    row.extend(p.iter());
                    row.extend(q.to_array());
                    t.rows.push(row);
                }
                t
            }
        }
    }

    pub fn from_table(path: &Path, t: &Table) -> Result<Self, CliError> {
        let bad = |msg: &str| CliError::Io {
            path: path.display().to_string(),
            msg: msg.into(),
        };
        if t.rows.iter().any(|r| r.len() != t.header.len()) {
            return Err(bad("row length differs from header"));
        }
        if t.header == TIME_COLS {
            let mut tr = OrientationTrajectory {
                times: Vec::new(),
                quats: Vec::new(),
                omegas: Vec::new(),
                zetas: Vec::new(),
            };
            for (i, r) in t.rows.iter().enumerate() {
                tr.times.push(r[0]);
                tr.quats.push(unit_quat(path, i + 2, [r[1], r[2], r[3], r[4]])?);
                tr.omegas.push(Vector3::new(r[5], r[6], r[7]));
                tr.zetas.push(Vector3::new(r[8], r[9], r[10]));
            }
            Ok(TrajectoryFile::Time(tr))
        } else if let Some(k) = t.col("px").filter(|&c| c >= 1 && c + 7 == t.header.len()) {
            let mut tr = PoseTrajectory {
                inputs: Vec::new(),
                positions: Vec::new(),
                quats: Vec::new(),
            };
            for (i, r) in t.rows.iter().enumerate() {
                tr.inputs.push(r[..k].to_vec());
                tr.positions.push(Vector3::new(r[k], r[k + 1], r[k + 2]));
                tr.quats.push(unit_quat(path, i + 2, [r[k + 3], r[k + 4], r[k + 5], r[k + 6]])?);
            }
            Ok(TrajectoryFile::Pose(tr))
        } else {
            Err(bad("unrecognized trajectory columns"))
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        if looks_like_json(&text) {
            serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
        } else {
            Self::from_table(path, &Table::from_csv(path, &text)?)
        }
    }

    pub fn encode(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => self.to_table().to_csv(),
        }
    }
}
