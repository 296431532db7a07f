//! Monte-Carlo realization of the ensemble picture: individual outcomes are
//! drawn one event at a time (objects are prepared consecutively, not
//! simultaneously), relative frequencies converge to the quantum
//! probabilities at the law-of-large-numbers rate.
//!
//! The generator is ChaCha12 — counter-based, seedable, and bit-identical
//! across platforms. Independent streams come from (seed, stream-index)
//! substream derivation; a stream's prefix of length n is exactly the draw
//! of the first n events.
//!
//! ```
//! use measim_core::{sample_outcomes, ProbabilityRecord};
//!
//! let probs = ProbabilityRecord::new(vec!["+".into(), "-".into()], vec![0.5, 0.5]).unwrap();
//! let counts = sample_outcomes(&probs, 10_000, 42).unwrap();
//! assert_eq!(counts.total, 10_000);
//! assert!(counts.max_abs_error(&probs) < 0.02);
//! ```

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::ProbabilityRecord;
use crate::random::rng;

/// Outcome counts N_k from an ensemble of size `total`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleCounts {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl SampleCounts {
    /// Relative frequencies N_k / N.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// max_k |N_k/N − p_k|.
    pub fn max_abs_error(&self, probs: &ProbabilityRecord) -> f64 {
        self.frequencies()
            .iter()
            .zip(probs.probabilities())
            .map(|(f, p)| (f - p).abs())
            .fold(0.0, f64::max)
    }
}

fn draw_one(rng: &mut rand_chacha::ChaCha12Rng, cumulative: &[f64]) -> usize {
    let u: f64 = rng.gen();
    // last bucket absorbs roundoff in the cumulative sum
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

fn cumulative(probs: &ProbabilityRecord) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .probabilities()
        .iter()
        .map(|&p| {
            acc += p.max(0.0);
            acc
        })
        .collect()
}

/// Draw `n` outcomes sequentially from the record, deterministic per seed.
pub fn sample_outcomes(probs: &ProbabilityRecord, n: u64, seed: u64) -> Result<SampleCounts> {
    if n == 0 {
        return Err(Error::InvalidParams("sample count must be at least 1".into()));
    }
    let cum = cumulative(probs);
    let mut generator = rng(seed, 0);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..n {
        counts[draw_one(&mut generator, &cum)] += 1;
    }
    Ok(SampleCounts {
        labels: probs.labels().to_vec(),
        counts,
        total: n,
    })
}

/// One row of a convergence study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub max_abs_error: f64,
}

/// max|freq − p| along an increasing ensemble-size schedule, plus the fitted
/// log-log slope (None when any checkpoint error is exactly zero).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub labels: Vec<String>,
    pub rows: Vec<ConvergenceRow>,
    pub fitted_slope: Option<f64>,
}

/// Draw a single stream of max(schedule) events and checkpoint the counts at
/// each scheduled n — each row is the exact prefix of the same ensemble, the
/// consecutive-preparation picture of a growing experiment.
pub fn convergence_report(
    probs: &ProbabilityRecord,
    n_schedule: &[u64],
    seed: u64,
) -> Result<ConvergenceReport> {
    if n_schedule.is_empty() {
        return Err(Error::InvalidParams("empty schedule".into()));
    }
    if n_schedule.windows(2).any(|w| w[0] >= w[1]) || n_schedule[0] == 0 {
        return Err(Error::InvalidParams(
            "schedule must be strictly increasing and positive".into(),
        ));
    }
    let cum = cumulative(probs);
    let mut generator = rng(seed, 0);
    let mut counts = vec![0u64; probs.len()];
    let mut rows = Vec::with_capacity(n_schedule.len());
    let mut drawn = 0u64;
    for &n in n_schedule {
        while drawn < n {
            counts[draw_one(&mut generator, &cum)] += 1;
            drawn += 1;
        }
        let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let err = freqs
            .iter()
            .zip(probs.probabilities())
            .map(|(f, p)| (f - p).abs())
            .fold(0.0, f64::max);
        rows.push(ConvergenceRow {
            n,
            counts: counts.clone(),
            frequencies: freqs,
            max_abs_error: err,
        });
    }
    let fitted_slope = fit_loglog_slope(&rows);
    Ok(ConvergenceReport {
        labels: probs.labels().to_vec(),
        rows,
        fitted_slope,
    })
}

fn fit_loglog_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.max_abs_error > 0.0)
        .map(|r| ((r.n as f64).ln(), r.max_abs_error.ln()))
        .collect();
    if pts.len() < 2 || pts.len() < rows.len() {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> ProbabilityRecord {
        ProbabilityRecord::new(vec!["+".into(), "-".into()], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn deterministic_counts_sum_to_n() {
        let probs = half();
        let a = sample_outcomes(&probs, 10_000, 42).unwrap();
        let b = sample_outcomes(&probs, 10_000, 42).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts.iter().sum::<u64>(), 10_000);
        let c = sample_outcomes(&probs, 10_000, 43).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn certain_outcome_never_misses() {
        let probs = ProbabilityRecord::new(vec!["a".into(), "b".into()], vec![1.0, 0.0]).unwrap();
        let counts = sample_outcomes(&probs, 100, 7).unwrap();
        assert_eq!(counts.counts, vec![100, 0]);
    }

    #[test]
    fn fixed_seed_frequency_error_within_six_sigma() {
        // 6σ binomial bound at n = 1e5: 6·√(1/4/1e5) ≈ 0.0095 ≤ 0.01
        let counts = sample_outcomes(&half(), 100_000, 2023).unwrap();
        assert!(counts.max_abs_error(&half()) <= 0.01);
    }

    #[test]
    fn convergence_checkpoints_are_stream_prefixes() {
        let probs = half();
        let report = convergence_report(&probs, &[100, 1000, 10_000], 5).unwrap();
        let direct = sample_outcomes(&probs, 100, 5).unwrap();
        let f0 = &report.rows[0].frequencies;
        let d0 = direct.frequencies();
        assert_eq!(f0, &d0);
    }

    #[test]
    fn convergence_slope_near_minus_half() {
        let schedule = [100, 1000, 10_000, 100_000, 1_000_000];
        let report = convergence_report(&half(), &schedule, 2023).unwrap();
        let slope = report.fitted_slope.expect("nonzero errors");
        assert!(
            (-0.65..=-0.35).contains(&slope),
            "law-of-large-numbers slope {slope}"
        );
    }

    #[test]
    fn certain_distribution_has_zero_errors_and_no_slope() {
        let probs = ProbabilityRecord::new(vec!["a".into(), "b".into()], vec![1.0, 0.0]).unwrap();
        let report = convergence_report(&probs, &[10, 100], 1).unwrap();
        assert!(report.rows.iter().all(|r| r.max_abs_error == 0.0));
        assert!(report.fitted_slope.is_none());
    }

    #[test]
    fn invalid_schedules_are_rejected()  {
        assert!(convergence_report(&half(), &[], 1).is_err());
        assert!(convergence_report(&half(), &[100, 100], 1).is_err());
        assert!(convergence_report(&half(), &[0, 10], 1).is_err());
    }

    #[test]
    fn unbiased_over_many_seeds() {
        // mean frequency over 200 seeds at n = 1e4 within 3·√(p(1−p)/(200·1e4))
        let probs = half();
        let mut mean = 0.0;
        let n_seeds = 200;
        for seed in 0..n_seeds {
            let counts = sample_outcomes(&probs, 10_000, seed).unwrap();
            mean += counts.frequencies()[0];
        }
        mean /= n_seeds as f64;
        let bound = 3.0 * (0.25 / (n_seeds as f64 * 10_000.0)).sqrt();
        assert!(
            (mean - 0.5).abs() <= bound,
            "mean {mean}, bound {bound}"
        );
    }
}
