//! Statistical gate for jump-path samplers: across an ensemble of
//! independently seeded paths on a common event grid, every per-event,
//! per-coordinate jump mean must sit within a few standard errors of zero.
//!
//! This is the only probabilistic check in the crate; everything else is
//! pathwise-exact. It is still deterministic: sample `i` is always drawn
//! from seed `i`, in parallel or not.

use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::processes::martingale::MartingalePath;

/// Smallest ensemble for which a standard error is meaningful here.
pub const MIN_ENSEMBLE: usize = 100;

#[derive(Debug, Clone)]
pub struct EnsembleReport {
    /// Number of sampled paths.
    pub n: usize,
    /// Shared event times of the sampler.
    pub event_times: Vec<f64>,
    /// Worst `|mean| / (sigma · std / √n)` over events and coordinates;
    /// `∞` when a zero-variance cell has nonzero mean.
    pub worst_ratio: f64,
    /// Number of (event, coordinate) cells failing the gate.
    pub failures: usize,
}

impl EnsembleReport {
    pub fn passes(&self) -> bool {
        self.failures == 0
    }
}

/// Draw `n` paths from `sampler` (seeds `0..n`, evaluated in parallel) and
/// gate every jump-mean at `sigma` standard errors. Cells with zero sample
/// variance pass only when their mean is exactly zero: a deterministic
/// drift cannot hide behind a degenerate standard error.
pub fn ensemble_martingale_check(
    sampler: impl Fn(u64) -> Result<MartingalePath> + Sync + Send,
    n: usize,
    sigma: f64,
) -> Result<EnsembleReport> {
    if n < MIN_ENSEMBLE {
        return Err(Error::EnsembleTooSmall { n, min: MIN_ENSEMBLE });
    }
    let paths = map_indexed(n, |i| sampler(i as u64));
    let mut iter = paths.into_iter();
    let first = iter.next().expect("n >= MIN_ENSEMBLE")?;
    let times = first.times().to_vec();
    let dim = first.dim();
    let mut samples = Vec::with_capacity(n);
    samples.push(first);
    for p in iter {
        let p = p?;
        if p.times() != times.as_slice() || p.dim() != dim {
            return Err(Error::invalid(
                "ensemble",
                "all sampled paths must share one event grid and dimension",
            ));
        }
        samples.push(p);
    }

    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    for k in 0..times.len() {
        for j in 0..dim {
            let xs = samples.iter().map(|p| p.jumps()[k][j]);
            let mean = xs.clone().sum::<f64>() / n as f64;
            let var =
                xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
            let std = var.sqrt();
            let ratio = if std > 0.0 {
                mean.abs() / (sigma * std / (n as f64).sqrt())
            } else if mean == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            if ratio > 1.0 {
                failures += 1;
            }
            worst = worst.max(ratio);
        }
    }
    Ok(EnsembleReport { n, event_times: times, worst_ratio: worst, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::HVector;
    use crate::tol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn gaussian_sampler(drift: f64) -> impl Fn(u64) -> Result<MartingalePath> + Sync + Send {
        move |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(drift, 1.0).expect("finite parameters");
            let jumps = (0..2)
                .map(|_| {
                    HVector::new((0..2).map(|_| normal.sample(&mut rng)).collect())
                })
                .collect::<Result<Vec<_>>>()?;
            MartingalePath::new(HVector::zeros(2), vec![0.25, 0.5], jumps)
        }
    }

    #[test]
    fn unbiased_ensemble_passes() {
        let report =
            ensemble_martingale_check(gaussian_sampler(0.0), 4096, tol::ENSEMBLE_SIGMA).unwrap();
        assert!(report.passes(), "worst ratio {}", report.worst_ratio);
    }

    #[test]
    fn one_sigma_drift_fails_loudly() {
        let report =
            ensemble_martingale_check(gaussian_sampler(1.0), 10_000, tol::ENSEMBLE_SIGMA)
                .unwrap();
        assert!(!report.passes());
        // A unit drift against a unit standard deviation sits ~√n/σ gates out.
        assert!(report.worst_ratio > 10.0);
        assert_eq!(report.failures, 4);
    }

    #[test]
    fn zero_variance_passes_only_at_exact_zero() {
        let silent = |_: u64| {
            MartingalePath::new(
                HVector::zeros(1),
                vec![1.0],
                vec![HVector::zeros(1)],
            )
        };
        let report = ensemble_martingale_check(silent, 128, tol::ENSEMBLE_SIGMA).unwrap();
        assert!(report.passes());
        assert_eq!(report.worst_ratio, 0.0);

        let biased = |_: u64| {
            MartingalePath::new(
                HVector::zeros(1),
                vec![1.0],
                vec![HVector::new(vec![0.5]).unwrap()],
            )
        };
        let report = ensemble_martingale_check(biased, 128, tol::ENSEMBLE_SIGMA).unwrap();
        assert!(!report.passes());
        assert_eq!(report.worst_ratio, f64::INFINITY);
    }

    #[test]
    fn mismatched_event_grids_are_rejected() {
        let drifting_grid = |seed: u64| {
            MartingalePath::new(
                HVector::zeros(1),
                vec![1.0 + seed as f64],
                vec![HVector::zeros(1)],
            )
        };
        assert!(ensemble_martingale_check(drifting_grid, 128, 3.0).is_err());
    }

    #[test]
    fn tiny_ensembles_are_refused() {
        let silent = |_: u64| Ok(MartingalePath::zero(1));
        assert!(matches!(
            ensemble_martingale_check(silent, 4, 3.0),
            Err(Error::EnsembleTooSmall { n: 4, min: MIN_ENSEMBLE })
        ));
    }
}
