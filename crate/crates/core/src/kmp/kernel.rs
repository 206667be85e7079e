//! Scalar kernels and the derivative-augmented block kernels built from them.
//!
//! A time layout pairs every output with finite-difference derivatives of the
//! feature map, e.g. `φ̇(t) ≈ (φ(t+δ) − φ(t))/δ`, so each block entry is a
//! forward-difference stencil of the scalar kernel in both arguments:
//!
//! `k_pq(tᵢ,tⱼ) = δ^-(p+q) Σ_a Σ_b α_a β_b k(tᵢ+aδ, tⱼ+bδ)`
//!
//! with `α_a = (−1)^(p−a) C(p,a)` and likewise for `β_b`. Evaluated directly
//! at `δ = 1e-4` the fourth-order blocks lose every significant digit to
//! cancellation. Both kernels here are stationary, `k(tᵢ,tⱼ) = g(tᵢ − tⱼ)`,
//! so the stencil collapses onto `Σ_m c_m g(r + mδ)` and can be summed from
//! the Taylor coefficients of `g` at `r`. The result is the same stencil
//! value, free of cancellation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 1e-4;

/// Number of Taylor coefficients carried for each kernel evaluation.
const JET: usize = 24;

/// Highest derivative order any layout uses.
const MAX_ORDER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelKind {
    /// `exp(−ℓ‖a − b‖²)`
    Gaussian { ell: f64 },
    /// `exp(−ℓ sin²(π(a − b)/T))`
    Periodic { ell: f64, period: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Finite-difference step of the derivative blocks.
    pub delta: f64,
}

impl KernelSpec {
    pub fn gaussian(ell: f64) -> Result<Self> {
        Self::new(KernelKind::Gaussian { ell }, DEFAULT_DELTA)
    }

    pub fn periodic(ell: f64, period: f64) -> Result<Self> {
        Self::new(KernelKind::Periodic { ell, period }, DEFAULT_DELTA)
    }

    pub fn new(kind: KernelKind, delta: f64) -> Result<Self> {
        let spec = Self { kind, delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.kind, delta)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        let params_ok = match self.kind {
            KernelKind::Gaussian { ell } => ok(ell),
            KernelKind::Periodic { ell, period } => ok(ell) && ok(period),
        };
        if !params_ok || !ok(self.delta) {
            return Err(Error::InvalidInput(format!(
                "kernel parameters must be positive and finite: {self:?}"
            )));
        }
        Ok(())
    }

    /// Taylor coefficients of `h ↦ g(r + h)`.
    fn jet(&self, r: f64) -> [f64; JET] {
        let mut u = [0.0; JET];
        match self.kind {
            KernelKind::Gaussian { ell } => {
                u[0] = -ell * r * r;
                u[1] = -2.0 * ell * r;
                u[2] = -ell;
            }
            KernelKind::Periodic { ell, period } => {
                let w = std::f64::consts::PI / period;
                // sin is T-periodic up to sign and only its square enters.
                let r = r - period * (r / period).round();
                let phase = w * r;
                let mut s = [0.0; JET];
                let mut scale = 1.0;
                for (k, sk) in s.iter_mut().enumerate() {
                    if k > 0 {
                        scale *= w / k as f64;
                    }
                    let (sn, cs) = phase.sin_cos();
                    *sk = scale
                        * match k % 4 {
                            0 => sn,
                            1 => cs,
                            2 => -sn,
                            _ => -cs,
                        };
                }
                for k in 0..JET {
                    let sq: f64 = (0..=k).map(|j| s[j] * s[k - j]).sum();
                    u[k] = -ell * sq;
                }
            }
        }
        exp_jet(&u)
    }
}

/// Taylor coefficients of `exp(u(h))`.
fn exp_jet(u: &[f64; JET]) -> [f64; JET] {
    let mut f = [0.0; JET];
    f[0] = u[0].exp();
    for k in 1..JET {
        let s: f64 = (1..=k).map(|j| j as f64 * u[j] * f[k - j]).sum();
        f[k] = s / k as f64;
    }
    f
}

/// Scalar kernel between two inputs.
pub fn scalar_kernel(spec: &KernelSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Layout(format!(
            "kernel inputs have dimensions {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(match spec.kind {
        KernelKind::Gaussian { ell } => {
            let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            (-ell * d2).exp()
        }
        KernelKind::Periodic { ell, period } => {
            if a.len() != 1 {
                return Err(Error::Layout(
                    "the periodic kernel takes one-dimensional inputs".into(),
                ));
            }
            let s = (std::f64::consts::PI * (a[0] - b[0]) / period).sin();
            (-ell * s * s).exp()
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BlockLayout {
    /// `[ζ; ζ̇]` over a scalar time input.
    TimeDeriv,
    /// `[ζ; ζ̇; ζ̈]` over a scalar time input.
    TimeAccel,
    /// `[ζ; ζ̇; ζ⃛]` over a scalar time input.
    TimeJerk,
    /// `k(a,b)·I_D` over inputs of any dimension.
    Plain { out_dim: usize },
}

/// Width of the vector that every time-layout derivative order carries.
pub const TIME_OUT_DIM: usize = 3;

impl BlockLayout {
    /// Derivative orders stacked in each block, in output order.
    pub fn orders(&self) -> &'static [usize] {
        match self {
            BlockLayout::TimeDeriv => &[0, 1],
            BlockLayout::TimeAccel => &[0, 1, 2],
            BlockLayout::TimeJerk => &[0, 1, 3],
            BlockLayout::Plain { .. } => &[0],
        }
    }

    /// Size of the vector carried by one derivative order.
    pub fn base_dim(&self) -> usize {
        match self {
            BlockLayout::Plain { out_dim } => *out_dim,
            _ => TIME_OUT_DIM,
        }
    }

    pub fn block_dim(&self) -> usize {
        self.orders().len() * self.base_dim()
    }

    pub fn is_time(&self) -> bool {
        !matches!(self, BlockLayout::Plain { .. })
    }
}

/// Per-(p, q) weights turning a kernel jet into a stencil value:
/// `w[k] = M_k δ^(k−p−q)` with `M_k = Σ_m c_m m^k`.
#[derive(Clone, Debug)]
struct StencilWeights {
    w: [f64; JET],
    /// Index of the first nonzero weight.
    lead: usize,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Forward-difference coefficients of order `p`.
fn forward_coeffs(p: usize) -> Vec<f64> {
    (0..=p)
        .map(|a| if (p - a) % 2 == 0 { 1.0 } else { -1.0 } * binom(p, a))
        .collect()
}

/// Combined stencil `c_m` indexed by `m + q` for `m = a − b ∈ [−q, p]`.
fn combined_stencil(p: usize, q: usize) -> Vec<f64> {
    let alpha = forward_coeffs(p);
    let beta = forward_coeffs(q);
    let mut c = vec![0.0; p + q + 1];
    for (a, ca) in alpha.iter().enumerate() {
        for (b, cb) in beta.iter().enumerate() {
            c[a + q - b] += ca * cb;
        }
    }
    c
}

impl StencilWeights {
    fn new(p: usize, q: usize, delta: f64) -> Self {
        let c = combined_stencil(p, q);
        let mut w = [0.0; JET];
        let lead = p + q;
        for (k, wk) in w.iter_mut().enumerate().skip(lead) {
            let mk: f64 = c
                .iter()
                .enumerate()
                .map(|(i, cm)| cm * (i as f64 - q as f64).powi(k as i32))
                .sum();
            *wk = mk * delta.powi((k - lead) as i32);
        }
        Self { w, lead }
    }
}

/// Precomputed state for evaluating the blocks of one kernel and layout.
#[derive(Clone, Debug)]
pub struct BlockKernel {
    spec: KernelSpec,
    layout: BlockLayout,
    /// Stencil weights for every `(p, q)` in `0..=MAX_ORDER`.
    weights: Vec<StencilWeights>,
}

impl BlockKernel {
    pub fn new(spec: KernelSpec, layout: BlockLayout) -> Result<Self> {
        spec.validate()?;
        if let BlockLayout::Plain { out_dim: 0 } = layout {
            return Err(Error::Layout("plain layout needs a positive output dimension".into()));
        }
        let mut weights = Vec::with_capacity((MAX_ORDER + 1) * (MAX_ORDER + 1));
        for p in 0..=MAX_ORDER {
            for q in 0..=MAX_ORDER {
                weights.push(StencilWeights::new(p, q, spec.delta));
            }
        }
        Ok(Self { spec, layout, weights })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn layout(&self) -> BlockLayout {
        self.layout
    }

    fn check_inputs(&self, a: &[f64], b: &[f64]) -> Result<()> {
        if self.layout.is_time() && (a.len() != 1 || b.len() != 1) {
            return Err(Error::Layout(format!(
                "time layouts take scalar inputs, got dimensions {} and {}",
                a.len(),
                b.len()
            )));
        }
        Ok(())
    }

    /// Stencil value for derivative order `p` in `a` and `q` in `b`, given
    /// the kernel jet at `r = a − b`.
    fn stencil_from_jet(&self, jet: &[f64; JET], p: usize, q: usize) -> Option<f64> {
        let sw = &self.weights[p * (MAX_ORDER + 1) + q];
        let mut sum = 0.0;
        let mut mag = 0.0;
        for k in sw.lead..JET {
            let t = jet[k] * sw.w[k];
            sum += t;
            mag += t.abs();
        }
        let tail = (jet[JET - 1] * sw.w[JET - 1]).abs() + (jet[JET - 2] * sw.w[JET - 2]).abs();
        // Series not yet converged at this step size: fall back to the
        // direct stencil, which is accurate whenever δ is this large.
        (tail <= 1e-15 * mag || mag == 0.0).then_some(sum)
    }

    /// Scalar stencil matrix `S[p][q]` over the layout's orders.
    pub fn order_matrix(&self, a: &[f64], b: &[f64]) -> Result<DMatrix<f64>> {
        self.check_inputs(a, b)?;
        let orders = self.layout.orders();
        let o = orders.len();
        if !self.layout.is_time() {
            return Ok(DMatrix::from_element(1, 1, scalar_kernel(&self.spec, a, b)?));
        }
        let jet = self.spec.jet(a[0] - b[0]);
        let mut s = DMatrix::zeros(o, o);
        for (i, &p) in orders.iter().enumerate() {
            for (j, &q) in orders.iter().enumerate() {
                s[(i, j)] = match self.stencil_from_jet(&jet, p, q) {
                    Some(v) => v,
                    None => direct_stencil(&self.spec, a[0], b[0], p, q)?,
                };
            }
        }
        Ok(s)
    }

    /// Full `block_dim × block_dim` kernel block between two inputs.
    pub fn block(&self, a: &[f64], b: &[f64]) -> Result<DMatrix<f64>> {
        let s = self.order_matrix(a, b)?;
        Ok(expand(&s, self.layout.base_dim()))
    }
}

/// Kronecker product `S ⊗ I_d`.
pub(crate) fn expand(s: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    s.kronecker(&DMatrix::identity(d, d))
}

/// Block kernel between two inputs.
pub fn block_kernel(
    spec: &KernelSpec,
    layout: BlockLayout,
    a: &[f64],
    b: &[f64],
) -> Result<DMatrix<f64>> {
    BlockKernel::new(*spec, layout)?.block(a, b)
}

/// The finite-difference stencil summed term by term from kernel values.
///
/// Equal to the block entries in exact arithmetic. Loses precision for small
/// `δ` at high orders; exposed for cross-checks at moderate step sizes.
pub fn direct_stencil(spec: &KernelSpec, ti: f64, tj: f64, p: usize, q: usize) -> Result<f64> {
    let alpha = forward_coeffs(p);
    let beta = forward_coeffs(q);
    let d = spec.delta;
    let mut sum = 0.0;
    for (a, ca) in alpha.iter().enumerate() {
        for (b, cb) in beta.iter().enumerate() {
            let k = scalar_kernel(spec, &[ti + a as f64 * d], &[tj + b as f64 * d])?;
            sum += ca * cb * k;
        }
    }
    Ok(sum / d.powi((p + q) as i32))
}
