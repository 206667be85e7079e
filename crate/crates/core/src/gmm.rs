//! Gaussian mixture models over joint `(input, output)` vectors, Gaussian
//! mixture regression, and ancestral sampling of the input marginal.
//!
//! Every joint vector is laid out as `[input; output]`. A time-driven model
//! uses a one-dimensional input.

use std::f64::consts::PI;

use log::debug;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Components whose prior falls below this are treated as collapsed.
const MIN_PRIOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub prior: f64,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub components: Vec<GaussianComponent>,
    pub input_dim: usize,
    pub output_dim: usize,
}

/// One point of a probabilistic reference trajectory: an input together with
/// the mean and covariance of the output there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefPoint {
    pub input: Vec<f64>,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl RefPoint {
    pub fn new(input: Vec<f64>, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::Dim(format!(
                "mean has {d} entries but covariance is {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        Ok(Self { input, mean, cov })
    }

    /// Input time of a time-driven point.
    pub fn time(&self) -> f64 {
        self.input[0]
    }
}

/// EM settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmConfig {
    pub components: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Relative log-likelihood improvement below which EM stops.
    pub tol: f64,
    /// Ridge added to every covariance at each M-step.
    pub cov_reg: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            components: 5,
            seed: 0,
            max_iter: 300,
            tol: 1e-10,
            cov_reg: 1e-6,
        }
    }
}

/// Cached log-density evaluator for one Gaussian.
struct LogDensity {
    chol: Cholesky<f64, Dyn>,
    mean: DVector<f64>,
    log_norm: f64,
}

impl LogDensity {
    fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Option<Self> {
        let d = mean.len() as f64;
        let chol = Cholesky::new(cov)?;
        let log_det: f64 = chol.l_dirty().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
        if !log_det.is_finite() {
            return None;
        }
        Some(Self {
            chol,
            mean,
            log_norm: -0.5 * (d * (2.0 * PI).ln() + log_det),
        })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_iterator(
            x.len(),
            x.iter().zip(self.mean.iter()).map(|(a, b)| a - b),
        );
        let y = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&diff)
            .expect("cholesky factor is non-singular");
        self.log_norm - 0.5 * y.norm_squared()
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn sq_dist(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm_squared()
}

/// k-means++ seeding followed by one Lloyd pass. Returns cluster labels.
fn kmeans_init(data: &[DVector<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = data.len();
    let mut centers: Vec<DVector<f64>> = Vec::with_capacity(k);
    centers.push(data[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = data.iter().map(|x| sq_dist(x, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(data[idx].clone());
        let c = centers.last().unwrap();
        for (dist, x) in d2.iter_mut().zip(data) {
            *dist = dist.min(sq_dist(x, c));
        }
    }
    let nearest = |x: &DVector<f64>, centers: &[DVector<f64>]| {
        centers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, sq_dist(x, c)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
            .unwrap()
    };
    let labels: Vec<usize> = par::map(data, |x| nearest(x, &centers));
    // One Lloyd update, then reassign.
    let dim = data[0].len();
    let mut sums = vec![DVector::<f64>::zeros(dim); k];
    let mut counts = vec![0usize; k];
    for (x, &l) in data.iter().zip(&labels) {
        sums[l] += x;
        counts[l] += 1;
    }
    for c in 0..k {
        if counts[c] > 0 {
            centers[c] = &sums[c] / counts[c] as f64;
        }
    }
    par::map(data, |x| nearest(x, &centers))
}

/// Weighted mean and covariance (plus ridge) of `data` under `weights`.
fn weighted_moments(
    data: &[DVector<f64>],
    weights: &[f64],
    cov_reg: f64,
) -> (f64, DVector<f64>, DMatrix<f64>) {
    let dim = data[0].len();
    let total: f64 = weights.iter().sum();
    let mut mean = DVector::zeros(dim);
    for (x, &w) in data.iter().zip(weights) {
        mean.axpy(w, x, 1.0);
    }
    mean /= total;
    let mut cov = DMatrix::zeros(dim, dim);
    for (x, &w) in data.iter().zip(weights) {
        let d = x - &mean;
        cov.ger(w, &d, &d, 1.0);
    }
    cov /= total;
    for i in 0..dim {
        cov[(i, i)] += cov_reg;
    }
    (total, mean, cov)
}

fn validate(data: &[DVector<f64>], input_dim: usize, cfg: &EmConfig) -> Result<usize> {
    if cfg.components == 0 {
        return Err(Error::Fit("need at least one component".into()));
    }
    if data.len() < cfg.components {
        return Err(Error::Fit(format!(
            "{} data points cannot support {} components",
            data.len(),
            cfg.components
        )));
    }
    let dim = data[0].len();
    if data.iter().any(|x| x.len() != dim) {
        return Err(Error::Dim("joint vectors have inconsistent lengths".into()));
    }
    if input_dim == 0 || input_dim >= dim {
        return Err(Error::Dim(format!(
            "input dimension {input_dim} incompatible with joint dimension {dim}"
        )));
    }
    Ok(dim)
}

/// Fits a mixture by EM and also returns the log-likelihood after every
/// iteration.
pub fn fit_em_traced(
    data: &[DVector<f64>],
    input_dim: usize,
    cfg: &EmConfig,
) -> Result<(GaussianMixture, Vec<f64>)> {
    let dim = validate(data, input_dim, cfg)?;
    let k = cfg.components;
    let n = data.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let labels = kmeans_init(data, k, &mut rng);
    let (_, _, global_cov) = weighted_moments(data, &vec![1.0; n], cfg.cov_reg);
    let mut comps: Vec<GaussianComponent> = (0..k)
        .map(|c| {
            let w: Vec<f64> = labels.iter().map(|&l| if l == c { 1.0 } else { 0.0 }).collect();
            let count = w.iter().sum::<f64>();
            if count >= 2.0 {
                let (_, mean, cov) = weighted_moments(data, &w, cfg.cov_reg);
                GaussianComponent { prior: count / n as f64, mean, cov }
            } else {
                let mean = data[rng.random_range(0..n)].clone();
                GaussianComponent { prior: 1.0 / n as f64, mean, cov: global_cov.clone() }
            }
        })
        .collect();
    let s: f64 = comps.iter().map(|c| c.prior).sum();
    comps.iter_mut().for_each(|c| c.prior /= s);

    let mut history: Vec<f64> = Vec::new();
    for iter in 0..cfg.max_iter {
        let dens = comps
            .iter()
            .map(|c| {
                LogDensity::new(c.mean.clone(), c.cov.clone())
                    .ok_or_else(|| Error::Fit("covariance lost positive definiteness".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let log_priors: Vec<f64> = comps.iter().map(|c| c.prior.ln()).collect();

        // E-step: per-point normalized responsibilities and log-likelihood.
        let rows: Vec<(Vec<f64>, f64)> = par::map(data, |x| {
            let lp: Vec<f64> = dens
                .iter()
                .zip(&log_priors)
                .map(|(d, lw)| lw + d.eval(x.as_slice()))
                .collect();
            let lse = log_sum_exp(&lp);
            (lp.iter().map(|v| (v - lse).exp()).collect(), lse)
        });
        let ll: f64 = rows.iter().map(|r| r.1).sum();
        if !ll.is_finite() {
            return Err(Error::Fit("log-likelihood is not finite".into()));
        }

        // M-step.
        let next = par::map_range(k, |c| {
            let w: Vec<f64> = rows.iter().map(|r| r.0[c]).collect();
            let (total, mean, cov) = weighted_moments(data, &w, cfg.cov_reg);
            GaussianComponent { prior: total / n as f64, mean, cov }
        });
        if let Some(c) = next.iter().position(|c| !(c.prior >= MIN_PRIOR)) {
            return Err(Error::Fit(format!("component {c} collapsed")));
        }
        comps = next;

        let prev = history.last().copied();
        history.push(ll);
        if let Some(prev) = prev {
            if (ll - prev).abs() <= cfg.tol * ll.abs() {
                debug!("EM converged after {} iterations, log-likelihood {ll}", iter + 1);
                break;
            }
        }
    }
    let total: f64 = comps.iter().map(|c| c.prior).sum();
    comps.iter_mut().for_each(|c| c.prior /= total);
    for c in &comps {
        if Cholesky::new(c.cov.clone()).is_none() {
            return Err(Error::Fit("covariance is not positive definite".into()));
        }
    }
    Ok((
        GaussianMixture {
            components: comps,
            input_dim,
            output_dim: dim - input_dim,
        },
        history,
    ))
}

/// Fits a `cfg.components`-component mixture to `data` by EM.
pub fn fit_em(data: &[DVector<f64>], input_dim: usize, cfg: &EmConfig) -> Result<GaussianMixture> {
    fit_em_traced(data, input_dim, cfg).map(|(m, _)| m)
}

/// Per-component quantities needed to condition on the input block.
struct ComponentConditioner {
    log_prior: f64,
    input_density: LogDensity,
    mean_out: DVector<f64>,
    /// `Σ_oi Σ_ii⁻¹`
    gain: DMatrix<f64>,
    /// `Σ_oo - Σ_oi Σ_ii⁻¹ Σ_io`
    cond_cov: DMatrix<f64>,
}

/// A mixture prepared for repeated regression queries.
pub struct Conditioner {
    parts: Vec<ComponentConditioner>,
    input_dim: usize,
    output_dim: usize,
}

impl Conditioner {
    pub fn new(gmm: &GaussianMixture) -> Result<Self> {
        let i = gmm.input_dim;
        let o = gmm.output_dim;
        let parts = gmm
            .components
            .iter()
            .map(|c| {
                let s_ii = c.cov.view((0, 0), (i, i)).into_owned();
                let s_oi = c.cov.view((i, 0), (o, i)).into_owned();
                let s_oo = c.cov.view((i, i), (o, o)).into_owned();
                let input_density = LogDensity::new(c.mean.rows(0, i).into_owned(), s_ii)
                    .ok_or_else(|| Error::Condition("input covariance is not positive definite".into()))?;
                // gain = Σ_oi Σ_ii⁻¹  <=>  Σ_ii gainᵀ = Σ_io
                let gain_t = input_density.chol.solve(&s_oi.transpose());
                let gain = gain_t.transpose();
                let mut cond_cov = &s_oo - &gain * s_oi.transpose();
                cond_cov = (&cond_cov + cond_cov.transpose()) * 0.5;
                Ok(ComponentConditioner {
                    log_prior: c.prior.ln(),
                    input_density,
                    mean_out: c.mean.rows(i, o).into_owned(),
                    gain,
                    cond_cov,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            parts,
            input_dim: i,
            output_dim: o,
        })
    }

    /// Normalized responsibilities of each component at `input`.
    pub fn responsibilities(&self, input: &[f64]) -> Vec<f64> {
        let lw: Vec<f64> = self
            .parts
            .iter()
            .map(|p| p.log_prior + p.input_density.eval(input))
            .collect();
        let lse = log_sum_exp(&lw);
        lw.iter().map(|v| (v - lse).exp()).collect()
    }

    /// Moment-matched conditional Gaussian of the output given `input`.
    pub fn condition(&self, input: &[f64]) -> Result<RefPoint> {
        if input.len() != self.input_dim {
            return Err(Error::Dim(format!(
                "query has {} entries, mixture input has {}",
                input.len(),
                self.input_dim
            )));
        }
        let h = self.responsibilities(input);
        let means: Vec<DVector<f64>> = self
            .parts
            .iter()
            .map(|p| {
                let diff = DVector::from_iterator(
                    input.len(),
                    input.iter().zip(p.input_density.mean.iter()).map(|(a, b)| a - b),
                );
                &p.mean_out + &p.gain * diff
            })
            .collect();
        let mut mean = DVector::zeros(self.output_dim);
        for (m, &w) in means.iter().zip(&h) {
            mean.axpy(w, m, 1.0);
        }
        // Σ h (Σ̄ + μ̄μ̄ᵀ) - μ̂μ̂ᵀ, written around μ̂ to avoid cancellation.
        let mut cov = DMatrix::zeros(self.output_dim, self.output_dim);
        for ((p, m), &w) in self.parts.iter().zip(&means).zip(&h) {
            let d = m - &mean;
            cov += &p.cond_cov * w;
            cov.ger(w, &d, &d, 1.0);
        }
        cov = (&cov + cov.transpose()) * 0.5;
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Condition(format!(
                "regression at {input:?} is not finite"
            )));
        }
        Ok(RefPoint {
            input: input.to_vec(),
            mean,
            cov,
        })
    }
}

/// Gaussian mixture regression of the output at `input`.
pub fn gmr_condition(gmm: &GaussianMixture, input: &[f64]) -> Result<RefPoint> {
    Conditioner::new(gmm)?.condition(input)
}

/// Regresses the output at each input, preserving order.
pub fn build_reference(gmm: &GaussianMixture, inputs: &[Vec<f64>]) -> Result<Vec<RefPoint>> {
    if inputs.is_empty() {
        return Ok(Vec::new());
    }
    let cond = Conditioner::new(gmm)?;
    par::map(inputs, |x| cond.condition(x))
        .into_iter()
        .collect()
}

/// Draws `n` inputs from the input marginal: pick a component with its prior,
/// then sample its input block.
pub fn marginal_sample(gmm: &GaussianMixture, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let i = gmm.input_dim;
    let weights: Vec<f64> = gmm.components.iter().map(|c| c.prior).collect();
    let pick = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidInput(format!("invalid component priors: {e}")))?;
    let factors = gmm
        .components
        .iter()
        .map(|c| {
            Cholesky::new(c.cov.view((0, 0), (i, i)).into_owned())
                .map(|ch| ch.l())
                .ok_or_else(|| Error::InvalidInput("input covariance is not positive definite".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let c = pick.sample(&mut rng);
            let z = DVector::from_fn(i, |_, _| rng.sample::<f64, _>(StandardNormal));
            let x = gmm.components[c].mean.rows(0, i) + &factors[c] * z;
            x.iter().copied().collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::Normal;

    fn cloud(center: &[f64], n: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
        let nd = Normal::new(0.0, 1.0).unwrap();
        (0..n)
            .map(|_| DVector::from_iterator(center.len(), center.iter().map(|c| c + nd.sample(rng))))
            .collect()
    }

    fn component(prior: f64, mean: &[f64], cov: &[f64]) -> GaussianComponent {
        let d = mean.len();
        GaussianComponent {
            prior,
            mean: DVector::from_column_slice(mean),
            cov: DMatrix::from_row_slice(d, d, cov),
        }
    }

    #[test]
    fn single_component_is_sample_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = cloud(&[1.0, -2.0, 0.5], 400, &mut rng);
        let cfg = EmConfig { components: 1, cov_reg: 1e-3, ..Default::default() };
        let gmm = fit_em(&data, 1, &cfg).unwrap();
        // Oracle: closed-form single-Gaussian MLE.
        let n = data.len() as f64;
        let mean = data.iter().fold(DVector::zeros(3), |a, x| a + x) / n;
        let mut cov = DMatrix::<f64>::zeros(3, 3);
        for x in &data {
            cov += (x - &mean) * (x - &mean).transpose();
        }
        cov = cov / n + DMatrix::identity(3, 3) * 1e-3;
        let c = &gmm.components[0];
        assert!((c.prior - 1.0).abs() < 1e-12);
        assert!((&c.mean - mean).norm() < 1e-10);
        assert!((&c.cov - cov).norm() < 1e-10);
    }

    #[test]
    fn separated_clouds_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut data = cloud(&[-10.0, -10.0], 1000, &mut rng);
        data.extend(cloud(&[10.0, 10.0], 1000, &mut rng));
        let cfg = EmConfig { components: 2, seed: 4, ..Default::default() };
        let (gmm, ll) = fit_em_traced(&data, 1, &cfg).unwrap();
        let mut means: Vec<&DVector<f64>> = gmm.components.iter().map(|c| &c.mean).collect();
        means.sort_by(|a, b| a[0].total_cmp(&b[0]));
        for (m, t) in means.iter().zip([-10.0, 10.0]) {
            // Sample means of 1000 unit-variance points: sd ≈ 0.032 per axis.
            assert!((m[0] - t).abs() < 0.1 && (m[1] - t).abs() < 0.1, "{m}");
        }
        for w in ll.windows(2) {
            assert!(w[1] >= w[0] - 1e-9 * w[0].abs());
        }
    }

    #[test]
    fn too_many_components_rejected() {
        let data = vec![DVector::from_vec(vec![0.0, 1.0]); 3];
        let cfg = EmConfig { components: 4, ..Default::default() };
        assert!(matches!(fit_em(&data, 1, &cfg), Err(Error::Fit(_))));
    }

    #[test]
    fn em_log_likelihood_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut data = cloud(&[0.0, 0.0, 0.0], 300, &mut rng);
        data.extend(cloud(&[3.0, 1.0, -2.0], 300, &mut rng));
        data.extend(cloud(&[-2.0, 4.0, 1.0], 300, &mut rng));
        let cfg = EmConfig { components: 4, seed: 9, max_iter: 200, ..Default::default() };
        let (_, ll) = fit_em_traced(&data, 2, &cfg).unwrap();
        assert!(ll.len() > 2);
        for w in ll.windows(2) {
            assert!(w[1] >= w[0] - 1e-9 * w[0].abs(), "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn single_component_regression_is_gaussian_conditioning() {
        let gmm = GaussianMixture {
            components: vec![component(
                1.0,
                &[2.0, 1.0, -1.0],
                &[2.0, 0.6, -0.4, 0.6, 1.0, 0.2, -0.4, 0.2, 0.5],
            )],
            input_dim: 1,
            output_dim: 2,
        };
        let r = gmr_condition(&gmm, &[3.5]).unwrap();
        // μ_o + Σ_oi/Σ_ii (x - μ_i) and Σ_oo - Σ_oi Σ_io / Σ_ii, by hand.
        let expected_mean = [1.0 + 0.6 / 2.0 * 1.5, -1.0 - 0.4 / 2.0 * 1.5];
        let expected_cov = [
            1.0 - 0.36 / 2.0,
            0.2 + 0.24 / 2.0,
            0.2 + 0.24 / 2.0,
            0.5 - 0.16 / 2.0,
        ];
        for k in 0..2 {
            assert!((r.mean[k] - expected_mean[k]).abs() < 1e-14);
        }
        for (a, b) in r.cov.transpose().iter().zip(expected_cov) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn responsibilities_sum_to_one_and_far_inputs_are_finite() {
        let gmm = GaussianMixture {
            components: vec![
                component(0.3, &[0.0, 0.0], &[0.01, 0.0, 0.0, 1.0]),
                component(0.7, &[5.0, 2.0], &[0.02, 0.001, 0.001, 1.0]),
            ],
            input_dim: 1,
            output_dim: 1,
        };
        let cond = Conditioner::new(&gmm).unwrap();
        for x in [-1e3, -3.0, 0.0, 2.5, 5.0, 80.0, 1e4] {
            let h = cond.responsibilities(&[x]);
            assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let r = cond.condition(&[x]).unwrap();
            assert!(r.mean[0].is_finite() && r.cov[(0, 0)] > 0.0);
        }
        // Dominant isolated component: mean is its output mean.
        let r = cond.condition(&[5.0]).unwrap();
        assert!((r.mean[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn build_reference_matches_pointwise() {
        let gmm = GaussianMixture {
            components: vec![
                component(0.5, &[0.0, 1.0], &[1.0, 0.3, 0.3, 1.0]),
                component(0.5, &[4.0, -1.0], &[1.0, -0.2, -0.2, 0.5]),
            ],
            input_dim: 1,
            output_dim: 1,
        };
        assert!(build_reference(&gmm, &[]).unwrap().is_empty());
        let inputs: Vec<Vec<f64>> = (0..25).map(|i| vec![i as f64 * 0.2]).collect();
        let refs = build_reference(&gmm, &inputs).unwrap();
        assert_eq!(refs.len(), inputs.len());
        for (r, x) in refs.iter().zip(&inputs) {
            assert_eq!(r, &gmr_condition(&gmm, x).unwrap());
        }
    }

    #[test]
    fn marginal_sampling() {
        let gmm = GaussianMixture {
            components: vec![
                component(1.0, &[1.0, -2.0, 0.0], &[0.5, 0.1, 0.0, 0.1, 0.3, 0.0, 0.0, 0.0, 1.0]),
                component(0.0, &[100.0, 100.0, 0.0], &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
            ],
            input_dim: 2,
            output_dim: 1,
        };
        let n = 100_000;
        let s = marginal_sample(&gmm, n, 7).unwrap();
        assert!(s.iter().all(|x| x[0] < 50.0));
        let mean0 = s.iter().map(|x| x[0]).sum::<f64>() / n as f64;
        let mean1 = s.iter().map(|x| x[1]).sum::<f64>() / n as f64;
        assert!((mean0 - 1.0).abs() < 4.0 * 0.5f64.sqrt() / (n as f64).sqrt());
        assert!((mean1 + 2.0).abs() < 4.0 * 0.3f64.sqrt() / (n as f64).sqrt());
        assert_eq!(s, marginal_sample(&gmm, n, 7).unwrap());
    }

    #[test]
    fn marginal_component_frequencies_match_priors() {
        let gmm = GaussianMixture {
            components: vec![
                component(0.2, &[-50.0, 0.0], &[1.0, 0.0, 0.0, 1.0]),
                component(0.5, &[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]),
                component(0.3, &[50.0, 0.0], &[1.0, 0.0, 0.0, 1.0]),
            ],
            input_dim: 1,
            output_dim: 1,
        };
        let n = 100_000usize;
        let s = marginal_sample(&gmm, n, 21).unwrap();
        let counts = [
            s.iter().filter(|x| x[0] < -25.0).count(),
            s.iter().filter(|x| x[0].abs() <= 25.0).count(),
            s.iter().filter(|x| x[0] > 25.0).count(),
        ];
        for (c, p) in counts.iter().zip([0.2, 0.5, 0.3]) {
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((*c as f64 - n as f64 * p).abs() < 4.0 * sd);
        }
    }
}
