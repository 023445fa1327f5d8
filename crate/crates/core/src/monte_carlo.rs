//! Seeded sampling of classical second-chaos variables, empirical moments
//! and one-dimensional Wasserstein-2 distances, and GUE random-matrix
//! estimates of free moments.
//!
//! Reproducibility contract: every randomized routine derives an independent
//! ChaCha stream per work item from `(seed, index)`, so results are a pure
//! function of the seed and the parameters regardless of how many threads
//! run the loop. There is no classical sampler for the free side; the GUE
//! estimator is the explicit, labeled approximation path.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ChaosKind, CoefficientSequence, MomentSequence};

/// A seeded batch of draws. Regenerating with the same `(seed, count,
/// sequence)` reproduces the values bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    values: Vec<f64>,
    seed: u64,
}

impl SampleBatch {
    /// Wraps externally produced values (tests, file import).
    pub fn from_values(values: Vec<f64>, seed: u64) -> Self {
        SampleBatch { values, seed }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `count` independent copies of `sum lambda_z (N_z^2 - 1)/sqrt(2)`.
/// Classical kind only; there is no sampler for Wigner chaos.
pub fn sample_classical(
    seq: &CoefficientSequence,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if seq.kind() != ChaosKind::Classical {
        return Err(Error::UnsupportedKind {
            kind: seq.kind(),
            what: "direct sampling (use the GUE estimator for the free side)",
        });
    }
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let lambdas = seq.lambdas().to_vec();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut acc = 0.0;
            for &l in &lambdas {
                let n: f64 = rng.sample(StandardNormal);
                acc += l * (n * n - 1.0);
            }
            acc * inv_sqrt2
        })
        .collect();
    Ok(SampleBatch { values, seed })
}

/// Arithmetic means of powers of the draws, orders 1..=max_order.
pub fn empirical_moments(batch: &SampleBatch, max_order: usize) -> Result<MomentSequence> {
    if max_order < 2 {
        return Err(Error::invalid("empirical moments need max order >= 2"));
    }
    let mut sums = vec![0.0f64; max_order];
    for &v in &batch.values {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            p *= v;
            *s += p;
        }
    }
    let n = batch.values.len() as f64;
    Ok(MomentSequence::new(
        ChaosKind::Classical,
        sums.into_iter().map(|s| s / n).collect(),
    ))
}

/// Exact Wasserstein-2 distance between the two equal-weight empirical
/// measures: in one dimension the optimal coupling is the monotone
/// rearrangement, so this is the root mean square difference of the sorted
/// samples. Requires equal counts to stay exact.
pub fn empirical_wasserstein2(a: &SampleBatch, b: &SampleBatch) -> Result<f64> {
    if a.count() != b.count() {
        return Err(Error::invalid(format!(
            "batch sizes differ: {} vs {}",
            a.count(),
            b.count()
        )));
    }
    if a.count() == 0 {
        return Err(Error::invalid("empty batches"));
    }
    let mut xs = a.values.clone();
    let mut ys = b.values.clone();
    xs.sort_unstable_by(f64::total_cmp);
    ys.sort_unstable_by(f64::total_cmp);
    let mean_sq: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / xs.len() as f64;
    Ok(mean_sq.sqrt())
}

/// Monte Carlo estimate of a free moment through finite random matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GueEstimate {
    pub order: usize,
    pub estimate: f64,
    pub matrix_size: usize,
    pub replicas: usize,
    pub std_error: f64,
}

/// Builds a GUE matrix (complex Gaussian entries of variance `1/n`, real
/// diagonal of variance `1/n`) in its real 2n x 2n representation
/// `[[Re, -Im], [Im, Re]]`. The embedding is multiplicative and doubles
/// traces, so normalized trace moments are unchanged.
fn gue_real_representation(n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let off = (1.0 / (2.0 * n as f64)).sqrt();
    let diag = (1.0 / n as f64).sqrt();
    let mut re = Array2::<f64>::zeros((n, n));
    let mut im = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let g: f64 = rng.sample(StandardNormal);
        re[(i, i)] = diag * g;
        for j in (i + 1)..n {
            let gr: f64 = rng.sample(StandardNormal);
            let gi: f64 = rng.sample(StandardNormal);
            re[(i, j)] = off * gr;
            re[(j, i)] = off * gr;
            im[(i, j)] = off * gi;
            im[(j, i)] = -off * gi;
        }
    }
    let mut out = Array2::<f64>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = re[(i, j)];
            out[(n + i, n + j)] = re[(i, j)];
            out[(i, n + j)] = -im[(i, j)];
            out[(n + i, j)] = im[(i, j)];
        }
    }
    out
}

fn replica_trace_moment(
    lambdas: &[f64],
    order: usize,
    matrix_size: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let dim = 2 * matrix_size;
    let mut m = Array2::<f64>::zeros((dim, dim));
    for &l in lambdas {
        let g = gue_real_representation(matrix_size, rng);
        let g2 = g.dot(&g);
        m.scaled_add(l, &g2);
        for i in 0..dim {
            m[(i, i)] -= l;
        }
    }
    // tr(M^order) = tr(P^2) with P = M^{order/2}; P is symmetric so the
    // trace is the squared Frobenius norm.
    let half = order / 2;
    let mut p = m.clone();
    for _ in 1..half {
        p = p.dot(&m);
    }
    let tr: f64 = p.iter().map(|v| v * v).sum();
    tr / dim as f64
}

/// Estimates `phi(F^order)` for a free coefficient sequence by averaging
/// normalized traces of `M^order`, `M = sum lambda_z (G_z^2 - I)` over
/// independent GUE matrices, across replica matrices.
pub fn gue_free_moment_estimate(
    seq: &CoefficientSequence,
    order: usize,
    matrix_size: usize,
    replicas: usize,
    seed: u64,
) -> Result<GueEstimate> {
    if seq.kind() != ChaosKind::Free {
        return Err(Error::UnsupportedKind {
            kind: seq.kind(),
            what: "GUE trace estimation (sample the classical side directly)",
        });
    }
    if order == 0 || !order.is_multiple_of(2) || order > 12 {
        return Err(Error::invalid("order must be even and between 2 and 12"));
    }
    if matrix_size < 64 {
        return Err(Error::invalid("matrix size must be at least 64"));
    }
    if replicas < 2 {
        return Err(Error::invalid("need at least 2 replicas for a standard error"));
    }
    let lambdas = seq.lambdas().to_vec();
    let traces: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            replica_trace_moment(&lambdas, order, matrix_size, &mut rng)
        })
        .collect();
    let mean = traces.iter().sum::<f64>() / replicas as f64;
    let var = traces.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>()
        / (replicas as f64 - 1.0);
    Ok(GueEstimate {
        order,
        estimate: mean,
        matrix_size,
        replicas,
        std_error: (var / replicas as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{canonicalize, cumulants_from_coefficients, target_coefficients};
    use crate::transforms::moments_from_cumulants_recursive;

    fn target() -> CoefficientSequence {
        target_coefficients(ChaosKind::Classical)
    }

    #[test]
    fn sampling_is_deterministic_and_thread_independent() {
        let seq = target();
        let a = sample_classical(&seq, 5000, 42).unwrap();
        let b = sample_classical(&seq, 5000, 42).unwrap();
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = single.install(|| sample_classical(&seq, 5000, 42).unwrap());
        assert_eq!(a, c);
        let d = sample_classical(&seq, 5000, 43).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn sampler_rejects_free_kind_and_zero_count() {
        let free = target_coefficients(ChaosKind::Free);
        assert!(matches!(
            sample_classical(&free, 10, 1),
            Err(Error::UnsupportedKind { .. })
        ));
        assert!(sample_classical(&target(), 0, 1).is_err());
    }

    #[test]
    fn target_sample_statistics() {
        let batch = sample_classical(&target(), 200_000, 7).unwrap();
        let m = empirical_moments(&batch, 4).unwrap();
        let n = batch.count() as f64;
        // centered within 4 sigma bands
        assert!(m.order(1).abs() < 4.0 / n.sqrt());
        assert!((m.order(2) - 1.0).abs() < 0.05);
        assert!((m.order(4) - 9.0).abs() < 0.5);
    }

    #[test]
    fn single_coefficient_fourth_moment_near_15() {
        let seq = canonicalize(ChaosKind::Classical, vec![1.0]).unwrap();
        let batch = sample_classical(&seq, 400_000, 11).unwrap();
        let m = empirical_moments(&batch, 8).unwrap();
        // band from the empirical eighth moment: Var(F^4) = mu_8 - mu_4^2
        let std_err =
            ((m.order(8) - m.order(4) * m.order(4)) / batch.count() as f64).sqrt();
        assert!(
            (m.order(4) - 15.0).abs() < 5.0 * std_err,
            "{} vs band {}",
            m.order(4),
            5.0 * std_err
        );
    }

    /// The chi-square shape's sixth moment is 265; heavy tails make the band
    /// wide even at 10^7 draws.
    #[test]
    fn impostor_sixth_moment_within_band() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let seq = canonicalize(ChaosKind::Classical, vec![h, h]).unwrap();
        let batch = sample_classical(&seq, 10_000_000, 21).unwrap();
        let m = empirical_moments(&batch, 6).unwrap();
        let err = (m.order(6) - 265.0).abs() / 265.0;
        assert!(err < 0.05, "relative error {err}");
    }

    #[test]
    fn empirical_moments_of_zero_batch() {
        let batch = SampleBatch::from_values(vec![0.0; 100], 0);
        let m = empirical_moments(&batch, 6).unwrap();
        assert!(m.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wasserstein_identity_shift_triangle() {
        let a = sample_classical(&target(), 20_000, 1).unwrap();
        assert_eq!(empirical_wasserstein2(&a, &a).unwrap(), 0.0);

        let shifted =
            SampleBatch::from_values(a.values().iter().map(|v| v + 0.75).collect(), 1);
        let d = empirical_wasserstein2(&a, &shifted).unwrap();
        assert!((d - 0.75).abs() < 1e-12);

        let b = sample_classical(&target(), 20_000, 2).unwrap();
        let c = sample_classical(&target(), 20_000, 3).unwrap();
        let dab = empirical_wasserstein2(&a, &b).unwrap();
        let dbc = empirical_wasserstein2(&b, &c).unwrap();
        let dac = empirical_wasserstein2(&a, &c).unwrap();
        assert!(dac <= dab + dbc + 1e-12);

        let short = SampleBatch::from_values(vec![0.0; 10], 0);
        assert!(empirical_wasserstein2(&a, &short).is_err());
    }

    #[test]
    fn empirical_moments_converge_with_sample_size() {
        let seq = target();
        let c = cumulants_from_coefficients(&seq, 6).unwrap();
        let exact = moments_from_cumulants_recursive(&c, 6).unwrap();
        let (small, large) = (4_000usize, 16_000usize);
        for r in 1..=6 {
            let mut err_small = 0.0;
            let mut err_large = 0.0;
            for seed in 0..20u64 {
                let bs = sample_classical(&seq, small, 100 + seed).unwrap();
                let bl = sample_classical(&seq, large, 200 + seed).unwrap();
                err_small += (empirical_moments(&bs, 6).unwrap().order(r) - exact.order(r)).abs();
                err_large += (empirical_moments(&bl, 6).unwrap().order(r) - exact.order(r)).abs();
            }
            assert!(
                err_large < err_small,
                "order {r}: {err_large} !< {err_small}"
            );
        }
    }

    /// Higher even moments pull the empirical law toward the target: along
    /// the family that converges to the target, the W2 distance decreases;
    /// the family that converges to the chi-square impostor stays far.
    #[test]
    fn moment_gaps_track_wasserstein_distance() {
        let count = 30_000;
        let reference = sample_classical(&target(), count, 999).unwrap();
        let mut previous = f64::INFINITY;
        for (i, t) in [0.6, 0.3, 0.1, 0.0].into_iter().enumerate() {
            let lam = vec![((1.0 + t) / 2.0f64).sqrt(), -((1.0 - t) / 2.0f64).sqrt()];
            let seq = canonicalize(ChaosKind::Classical, lam).unwrap();
            let mut dist = 0.0;
            for seed in 0..4u64 {
                let batch = sample_classical(&seq, count, 17 + seed).unwrap();
                dist += empirical_wasserstein2(&batch, &reference).unwrap();
            }
            dist /= 4.0;
            assert!(dist < previous, "step {i}: {dist} !< {previous}");
            previous = dist;
        }

        let impostor = canonicalize(
            ChaosKind::Classical,
            vec![std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
        )
        .unwrap();
        let batch = sample_classical(&impostor, count, 55).unwrap();
        let dist = empirical_wasserstein2(&batch, &reference).unwrap();
        assert!(dist > 0.2, "impostor W2 = {dist}");
    }

    #[test]
    fn gue_estimator_small_sanity() {
        let seq = target_coefficients(ChaosKind::Free);
        let est = gue_free_moment_estimate(&seq, 2, 64, 8, 5).unwrap();
        assert!((est.estimate - 1.0).abs() < 5.0 * est.std_error.max(0.02));
        let est4 = gue_free_moment_estimate(&seq, 4, 64, 8, 5).unwrap();
        assert!((est4.estimate - 2.5).abs() < 5.0 * est4.std_error.max(0.05));
        assert!(est4.std_error >= 0.0);
    }

    #[test]
    fn gue_single_coefficient_fourth_moment_near_3() {
        let seq = canonicalize(ChaosKind::Free, vec![1.0]).unwrap();
        let est = gue_free_moment_estimate(&seq, 4, 128, 8, 13).unwrap();
        assert!(
            (est.estimate - 3.0).abs() < 3.0 * est.std_error.max(0.02),
            "{est:?}"
        );
    }

    #[test]
    fn gue_estimator_is_deterministic() {
        let seq = target_coefficients(ChaosKind::Free);
        let a = gue_free_moment_estimate(&seq, 4, 64, 4, 9).unwrap();
        let b = gue_free_moment_estimate(&seq, 4, 64, 4, 9).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| gue_free_moment_estimate(&seq, 4, 64, 4, 9).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn gue_estimator_rejects_bad_arguments() {
        let seq = target_coefficients(ChaosKind::Free);
        assert!(gue_free_moment_estimate(&seq, 3, 64, 4, 0).is_err());
        assert!(gue_free_moment_estimate(&seq, 14, 64, 4, 0).is_err());
        assert!(gue_free_moment_estimate(&seq, 4, 32, 4, 0).is_err());
        assert!(gue_free_moment_estimate(&seq, 4, 64, 1, 0).is_err());
        let classical = target();
        assert!(matches!(
            gue_free_moment_estimate(&classical, 4, 64, 4, 0),
            Err(Error::UnsupportedKind { .. })
        ));
    }
}
