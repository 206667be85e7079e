use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::kernel::{BlockKernel, BlockLayout, KernelSpec};
use super::solve::solve_spd;
use crate::error::{Error, Result};
use crate::gmm::RefPoint;
use crate::par;

/// A desired output at a given input, with the precision it should be met to.
pub type DesiredEuclid = RefPoint;

/// Higher derivative penalized by a smoothness-constrained fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessPenalty {
    Acceleration,
    Jerk,
}

impl SmoothnessPenalty {
    pub fn layout(self) -> BlockLayout {
        match self {
            SmoothnessPenalty::Acceleration => BlockLayout::TimeAccel,
            SmoothnessPenalty::Jerk => BlockLayout::TimeJerk,
        }
    }
}

/// A fitted kernel machine. The dual coefficients are `(K + λΣ)⁻¹μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmpModel {
    pub train_inputs: Vec<Vec<f64>>,
    pub kernel: KernelSpec,
    pub layout: BlockLayout,
    pub lambda: f64,
    /// Smoothness weight; zero when the fit was unconstrained.
    pub lambda_a: f64,
    pub dual_coeffs: DVector<f64>,
}

fn check_reference(reference: &[RefPoint], out_dim: usize, input_dim: Option<usize>) -> Result<()> {
    if reference.is_empty() {
        return Err(Error::InvalidInput("reference trajectory is empty".into()));
    }
    let input_dim = input_dim.unwrap_or(reference[0].input.len());
    for (n, r) in reference.iter().enumerate() {
        if r.mean.len() != out_dim || r.cov.shape() != (out_dim, out_dim) {
            return Err(Error::Dim(format!(
                "reference point {n} has output dimension {}, layout needs {out_dim}",
                r.mean.len()
            )));
        }
        if r.input.len() != input_dim {
            return Err(Error::Dim(format!(
                "reference point {n} has input dimension {}, expected {input_dim}",
                r.input.len()
            )));
        }
        if r.input.iter().chain(r.mean.iter()).chain(r.cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("reference point {n} is not finite")));
        }
    }
    Ok(())
}

/// Fits the kernel machine to a reference trajectory.
pub fn fit(reference: &[RefPoint], spec: &KernelSpec, layout: BlockLayout, lambda: f64) -> Result<KmpModel> {
    fit_inner(reference, spec, layout, lambda, 0.0)
}

fn fit_inner(
    reference: &[RefPoint],
    spec: &KernelSpec,
    layout: BlockLayout,
    lambda: f64,
    lambda_a: f64,
) -> Result<KmpModel> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("λ must be positive, got {lambda}")));
    }
    let bd = layout.block_dim();
    check_reference(reference, bd, None)?;
    let bk = BlockKernel::new(*spec, layout)?;
    let n = reference.len() * bd;
    debug!("assembling Gram system of order {n}");

    // Column-major buffer; block column j holds blocks (i, j) for i >= j.
    let mut a = vec![0.0; n * n];
    let inputs: Vec<&[f64]> = reference.iter().map(|r| r.input.as_slice()).collect();
    let d = layout.base_dim();
    let orders = layout.orders().len();
    // Inputs share one dimension, so a single evaluation validates them all.
    bk.order_matrix(inputs[0], inputs[0])?;
    par::for_each_chunk_mut(&mut a, n * bd, |j, col| {
        for i in j..inputs.len() {
            let s = bk
                .order_matrix(inputs[i], inputs[j])
                .expect("inputs validated above");
            for bo in 0..orders {
                for ao in 0..orders {
                    let v = s[(ao, bo)];
                    for e in 0..d {
                        col[(bo * d + e) * n + i * bd + ao * d + e] = v;
                    }
                }
            }
            if i == j {
                let cov = &reference[i].cov;
                for c in 0..bd {
                    for r in 0..bd {
                        col[c * n + i * bd + r] += lambda * 0.5 * (cov[(r, c)] + cov[(c, r)]);
                    }
                }
            }
        }
    });
    // Mirror the lower triangle.
    for c in 0..n {
        for r in (c + 1)..n {
            a[r * n + c] = a[c * n + r];
        }
    }
    let mu: Vec<f64> = reference.iter().flat_map(|r| r.mean.iter().copied()).collect();
    let x = solve_spd(&a, n, &mu)?;
    Ok(KmpModel {
        train_inputs: reference.iter().map(|r| r.input.clone()).collect(),
        kernel: *spec,
        layout,
        lambda,
        lambda_a,
        dual_coeffs: DVector::from_vec(x),
    })
}

/// Extends a `[ζ; ζ̇]` reference with a zero-mean higher-derivative block of
/// covariance `I/λ_a`.
pub fn augment_reference(reference: &[RefPoint], lambda_a: f64) -> Result<Vec<RefPoint>> {
    if !(lambda_a > 0.0 && lambda_a.is_finite()) {
        return Err(Error::InvalidInput(format!("λ_a must be positive, got {lambda_a}")));
    }
    let bd = BlockLayout::TimeDeriv.block_dim();
    check_reference(reference, bd, Some(1))?;
    let extra = BlockLayout::TimeAccel.block_dim() - bd;
    Ok(reference
        .iter()
        .map(|r| {
            let mut mean = DVector::zeros(bd + extra);
            mean.rows_mut(0, bd).copy_from(&r.mean);
            let mut cov = DMatrix::zeros(bd + extra, bd + extra);
            cov.view_mut((0, 0), (bd, bd)).copy_from(&r.cov);
            for k in bd..bd + extra {
                cov[(k, k)] = 1.0 / lambda_a;
            }
            RefPoint { input: r.input.clone(), mean, cov }
        })
        .collect())
}

/// Fits `[ζ; ζ̇]` while penalizing the chosen higher derivative with weight
/// `λ_a`.
pub fn fit_smoothness_constrained(
    reference: &[RefPoint],
    spec: &KernelSpec,
    lambda: f64,
    lambda_a: f64,
    penalty: SmoothnessPenalty,
) -> Result<KmpModel> {
    let augmented = augment_reference(reference, lambda_a)?;
    fit_inner(&augmented, spec, penalty.layout(), lambda, lambda_a)
}

/// Fits `[ζ; ζ̇]` while penalizing `ζ̈` with weight `λ_a`.
pub fn fit_accel_constrained(
    reference: &[RefPoint],
    spec: &KernelSpec,
    lambda: f64,
    lambda_a: f64,
) -> Result<KmpModel> {
    fit_smoothness_constrained(reference, spec, lambda, lambda_a, SmoothnessPenalty::Acceleration)
}

/// Appends desired points after the reference.
pub fn adapt_reference(reference: &[RefPoint], desired: &[DesiredEuclid]) -> Result<Vec<RefPoint>> {
    if let (Some(r), Some(_)) = (reference.first(), desired.first()) {
        let o = r.mean.len();
        for (h, d) in desired.iter().enumerate() {
            if d.mean.len() != o || d.cov.shape() != (o, o) {
                return Err(Error::Dim(format!(
                    "desired point {h} has output dimension {}, reference has {o}",
                    d.mean.len()
                )));
            }
            if d.input.len() != r.input.len() {
                return Err(Error::Dim(format!(
                    "desired point {h} has input dimension {}, reference has {}",
                    d.input.len(),
                    r.input.len()
                )));
            }
        }
    }
    Ok(reference.iter().chain(desired).cloned().collect())
}

/// Reusable predictor for a fitted model.
pub struct Predictor<'a> {
    model: &'a KmpModel,
    bk: BlockKernel,
}

impl<'a> Predictor<'a> {
    pub fn new(model: &'a KmpModel) -> Result<Self> {
        Ok(Self {
            model,
            bk: BlockKernel::new(model.kernel, model.layout)?,
        })
    }

    pub fn predict(&self, query: &[f64]) -> Result<DVector<f64>> {
        let m = self.model;
        let bd = m.layout.block_dim();
        let d = m.layout.base_dim();
        let orders = m.layout.orders().len();
        if let Some(first) = m.train_inputs.first() {
            if first.len() != query.len() {
                return Err(Error::Dim(format!(
                    "query has dimension {}, model inputs have {}",
                    query.len(),
                    first.len()
                )));
            }
        }
        let mut out = DVector::zeros(bd);
        for (i, x) in m.train_inputs.iter().enumerate() {
            let s = self.bk.order_matrix(query, x)?;
            let coef = m.dual_coeffs.rows(i * bd, bd);
            for ao in 0..orders {
                for bo in 0..orders {
                    let v = s[(ao, bo)];
                    for e in 0..d {
                        out[ao * d + e] += v * coef[bo * d + e];
                    }
                }
            }
        }
        Ok(out)
    }
}

impl KmpModel {
    /// Output at `query`: `[ζ; ζ̇]`, `[ζ; ζ̇; ζ̈]`, `[ζ; ζ̇; ζ⃛]` or the plain
    /// output vector, depending on the layout.
    pub fn predict(&self, query: &[f64]) -> Result<DVector<f64>> {
        Predictor::new(self)?.predict(query)
    }

    pub fn predict_batch(&self, queries: &[Vec<f64>]) -> Result<Vec<DVector<f64>>> {
        let p = Predictor::new(self)?;
        par::map(queries, |q| p.predict(q)).into_iter().collect()
    }

    pub fn input_dim(&self) -> usize {
        self.train_inputs.first().map_or(0, Vec::len)
    }

    pub fn output_dim(&self) -> usize {
        self.layout.block_dim()
    }
}
