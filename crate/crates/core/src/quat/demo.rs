use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Tangent3, UnitQuaternion};
use crate::error::{Error, Result};

/// One demonstrated orientation trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuatDemo {
    pub times: Vec<f64>,
    pub quats: Vec<UnitQuaternion>,
}

impl QuatDemo {
    pub fn new(times: Vec<f64>, quats: Vec<UnitQuaternion>) -> Result<Self> {
        if times.len() != quats.len() {
            return Err(Error::Dim(format!(
                "{} times but {} quaternions",
                times.len(),
                quats.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "demonstration times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, quats })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Flips quaternion signs so that consecutive samples of each sequence have a
/// positive inner product and every sequence starts in the hemisphere of the
/// first one. Fails when sequences still disagree at some common index.
pub(crate) fn align_sequences(seqs: &mut [Vec<UnitQuaternion>]) -> Result<()> {
    let Some(first) = seqs.first() else {
        return Ok(());
    };
    let n = first.len();
    if seqs.iter().any(|s| s.len() != n) {
        return Err(Error::Alignment(
            "all demonstrations must have the same length".into(),
        ));
    }
    if n == 0 {
        return Ok(());
    }
    let anchor = seqs[0][0];
    for seq in seqs.iter_mut() {
        if seq[0].dot(&anchor) < 0.0 {
            seq[0] = -seq[0];
        }
        for i in 1..n {
            if seq[i - 1].dot(&seq[i]) < 0.0 {
                seq[i] = -seq[i];
            }
        }
        if let Some(i) = (1..n).find(|&i| seq[i - 1].dot(&seq[i]) <= 0.0) {
            return Err(Error::Alignment(format!(
                "consecutive samples {} and {i} are orthogonal",
                i - 1
            )));
        }
    }
    for step in 0..n {
        for i in 0..seqs.len() {
            for j in (i + 1)..seqs.len() {
                let d = seqs[i][step].dot(&seqs[j][step]);
                if d <= 0.0 {
                    return Err(Error::Alignment(format!(
                        "demonstrations {i} and {j} are not in a common hemisphere at step {step} (dot = {d})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Sign-aligns a set of equal-length demonstrations.
pub fn align_hemispheres(demos: &[QuatDemo]) -> Result<Vec<QuatDemo>> {
    let mut seqs: Vec<Vec<UnitQuaternion>> = demos.iter().map(|d| d.quats.clone()).collect();
    align_sequences(&mut seqs)?;
    Ok(demos
        .iter()
        .zip(seqs)
        .map(|(d, quats)| QuatDemo {
            times: d.times.clone(),
            quats,
        })
        .collect())
}

/// Quintic rest-to-rest profile `10s³ - 15s⁴ + 6s⁵` on `s ∈ [0, 1]`.
fn min_jerk(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

/// Smooth per-demo perturbation: a few low-frequency sinusoids per axis.
struct Wobble {
    terms: Vec<(Tangent3, f64, f64)>,
}

impl Wobble {
    fn sample(rng: &mut ChaCha8Rng, scale: f64, freqs: &[f64]) -> Self {
        let terms = freqs
            .iter()
            .map(|&f| {
                let amp = Tangent3::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                ) * scale;
                let phase = rng.random_range(0.0..2.0 * PI);
                (amp, f, phase)
            })
            .collect();
        Self { terms }
    }

    fn at(&self, t: f64) -> Tangent3 {
        self.terms
            .iter()
            .fold(Tangent3::zeros(), |acc, (a, f, p)| acc + a * (f * t + p).sin())
    }
}

fn sample_times(duration: f64, n: usize, closed: bool) -> Vec<f64> {
    let denom = if closed { (n - 1) as f64 } else { n as f64 };
    (0..n).map(|i| duration * i as f64 / denom).collect()
}

/// Generates `m` demonstrations of `n` samples over `[0, duration]` that move
/// through `keys` with minimum-jerk profiles in the tangent space at the first
/// key, each bent by a smooth random perturbation of size `noise_scale`.
///
/// Consecutive keys are joined by equal-duration rest-to-rest quintic
/// segments, so with two keys the motion is a single quintic.
pub fn gen_minjerk_demos(
    keys: &[UnitQuaternion],
    duration: f64,
    n: usize,
    m: usize,
    noise_scale: f64,
    seed: u64,
) -> Result<Vec<QuatDemo>> {
    if keys.len() < 2 {
        return Err(Error::InvalidInput("need at least two key orientations".into()));
    }
    if n < 2 || m < 1 || !(duration > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need n >= 2, m >= 1 and a positive duration (n = {n}, m = {m}, duration = {duration})"
        )));
    }
    let base = keys[0];
    let anchors = keys
        .iter()
        .map(|k| k.prod(&base.conj()).log())
        .collect::<Result<Vec<_>>>()?;
    if let Some(z) = anchors.iter().find(|z| z.norm() >= PI) {
        return Err(Error::Domain(format!("key too far from the first key: |z| = {}", z.norm())));
    }
    let segments = anchors.len() - 1;
    let times = sample_times(duration, n, true);
    let nominal = |t: f64| -> Tangent3 {
        let u = (t / duration * segments as f64).clamp(0.0, segments as f64);
        let seg = (u.floor() as usize).min(segments - 1);
        let s = u - seg as f64;
        anchors[seg] + (anchors[seg + 1] - anchors[seg]) * min_jerk(s)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let freqs = [PI / duration, 2.0 * PI / duration];
    let mut demos = Vec::with_capacity(m);
    for _ in 0..m {
        let wobble = Wobble::sample(&mut rng, noise_scale, &freqs);
        let quats = times
            .iter()
            .map(|&t| UnitQuaternion::exp(&(nominal(t) + wobble.at(t))).map(|e| e.prod(&base)))
            .collect::<Result<Vec<_>>>()?;
        demos.push(QuatDemo {
            times: times.clone(),
            quats,
        });
    }
    align_hemispheres(&demos)
}

/// Generates `m` rhythmic demonstrations of one period each, sampled at
/// `n` points on `[0, period)`.
///
/// The nominal tangent curve is
/// `(a.x sin ωt, a.y sin 2ωt, a.z (1 - cos ωt))` with `ω = 2π / period`,
/// mapped through `exp(·) * base`. Each demo adds a random combination of the
/// first two harmonics scaled by `noise_scale`, so every demo is periodic.
pub fn gen_rhythmic_demos(
    base: &UnitQuaternion,
    amplitude: &Tangent3,
    period: f64,
    n: usize,
    m: usize,
    noise_scale: f64,
    seed: u64,
) -> Result<Vec<QuatDemo>> {
    if n < 2 || m < 1 || !(period > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need n >= 2, m >= 1 and a positive period (n = {n}, m = {m}, period = {period})"
        )));
    }
    let omega = 2.0 * PI / period;
    let times = sample_times(period, n, false);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut demos = Vec::with_capacity(m);
    for _ in 0..m {
        let wobble = Wobble::sample(&mut rng, noise_scale, &[omega, 2.0 * omega]);
        let quats = times
            .iter()
            .map(|&t| {
                let z = Tangent3::new(
                    amplitude.x * (omega * t).sin(),
                    amplitude.y * (2.0 * omega * t).sin(),
                    amplitude.z * (1.0 - (omega * t).cos()),
                ) + wobble.at(t);
                UnitQuaternion::exp(&z).map(|e| e.prod(base))
            })
            .collect::<Result<Vec<_>>>()?;
        demos.push(QuatDemo {
            times: times.clone(),
            quats,
        });
    }
    align_hemispheres(&demos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::quat_distance;

    fn keys() -> Vec<UnitQuaternion> {
        vec![
            UnitQuaternion::new(0.8, 0.2, 0.4, 0.3).unwrap(),
            UnitQuaternion::new(0.45, 0.6, 0.3, 0.55).unwrap(),
        ]
    }

    #[test]
    fn flipped_sample_is_restored() {
        let d = gen_minjerk_demos(&keys(), 10.0, 50, 1, 0.0, 1).unwrap();
        let mut broken = d[0].clone();
        broken.quats[17] = -broken.quats[17];
        let fixed = align_hemispheres(&[broken]).unwrap();
        assert_eq!(fixed[0], d[0]);
        for w in fixed[0].quats.windows(2) {
            assert!(w[0].dot(&w[1]) > 0.0);
        }
    }

    #[test]
    fn aligned_demos_unchanged() {
        let d = gen_minjerk_demos(&keys(), 10.0, 100, 3, 0.05, 2).unwrap();
        assert_eq!(align_hemispheres(&d).unwrap(), d);
    }

    #[test]
    fn distant_demos_rejected() {
        let id = UnitQuaternion::identity();
        let t = vec![0.0, 1.0, 2.0];
        let still = QuatDemo::new(t.clone(), vec![id, id, id]).unwrap();
        // Turns 120° then 240° about x: each step is smooth, but the last
        // sample sits in the opposite hemisphere from `still`.
        let turning = QuatDemo::new(
            t,
            vec![
                id,
                UnitQuaternion::new(0.5, 0.75f64.sqrt(), 0.0, 0.0).unwrap(),
                UnitQuaternion::new(-0.5, 0.75f64.sqrt(), 0.0, 0.0).unwrap(),
            ],
        )
        .unwrap();
        assert!(align_hemispheres(&[turning.clone()]).is_ok());
        assert!(matches!(
            align_hemispheres(&[still, turning]),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn noiseless_demos_are_identical_and_hit_keys() {
        let k = keys();
        let d = gen_minjerk_demos(&k, 10.0, 200, 3, 0.0, 5).unwrap();
        assert_eq!(d[0], d[1]);
        assert_eq!(d[1], d[2]);
        assert!(quat_distance(&d[0].quats[0], &k[0]) < 1e-12);
        assert!(quat_distance(d[0].quats.last().unwrap(), &k[1]) < 1e-9);
        assert_eq!(d[0].times[0], 0.0);
        assert_eq!(*d[0].times.last().unwrap(), 10.0);
    }

    #[test]
    fn noiseless_boundary_velocity_vanishes() {
        let k = keys();
        let n = 2000;
        let d = gen_minjerk_demos(&k, 10.0, n, 1, 0.0, 0).unwrap();
        let zeta = |q: &UnitQuaternion| q.prod(&k[0].conj()).log().unwrap();
        let dt = d[0].times[1] - d[0].times[0];
        let start = (zeta(&d[0].quats[1]) - zeta(&d[0].quats[0])) / dt;
        let end = (zeta(&d[0].quats[n - 1]) - zeta(&d[0].quats[n - 2])) / dt;
        assert!(start.norm() <= 1e-6, "{}", start.norm());
        assert!(end.norm() <= 1e-6, "{}", end.norm());
    }

    #[test]
    fn noisy_endpoints_stay_near_keys() {
        let k = keys();
        let d = gen_minjerk_demos(&k, 10.0, 100, 5, 0.02, 9).unwrap();
        for demo in &d {
            // Two sinusoids per axis, three axes, gaussian amplitudes.
            assert!(quat_distance(&demo.quats[0], &k[0]) < 0.5);
            assert!(quat_distance(demo.quats.last().unwrap(), &k[1]) < 0.5);
        }
        assert_ne!(d[0], d[1]);
    }

    #[test]
    fn generation_is_seeded() {
        let a = gen_minjerk_demos(&keys(), 10.0, 64, 4, 0.05, 77).unwrap();
        let b = gen_minjerk_demos(&keys(), 10.0, 64, 4, 0.05, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_arguments() {
        let k = keys();
        assert!(gen_minjerk_demos(&k, 10.0, 1, 1, 0.0, 0).is_err());
        assert!(gen_minjerk_demos(&k, 10.0, 10, 0, 0.0, 0).is_err());
        let antipodal = vec![
            UnitQuaternion::identity(),
            UnitQuaternion::new(-1.0, 0.0, 0.0, 0.0).unwrap(),
        ];
        assert!(matches!(
            gen_minjerk_demos(&antipodal, 10.0, 10, 1, 0.0, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rhythmic_demos_are_periodic() {
        let base = UnitQuaternion::new(0.9, 0.1, -0.3, 0.2).unwrap();
        let d = gen_rhythmic_demos(&base, &Tangent3::new(0.4, 0.3, 0.2), 10.0, 100, 3, 0.02, 3)
            .unwrap();
        for demo in &d {
            assert!(*demo.times.last().unwrap() < 10.0);
            // Sample one step past the end wraps to the first one.
            let first = demo.quats[0];
            let last = *demo.quats.last().unwrap();
            assert!(quat_distance(&first, &last) < 0.1);
        }
    }
}
