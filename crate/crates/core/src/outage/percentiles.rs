//! Empirical quantiles and Monte Carlo estimation of the outage budgets.

use super::{generate_outage_samples, Budgets, MonthlyOutageData};
use crate::error::{Error, Result};
use crate::rng::SeedStreams;
use rayon::prelude::*;

/// Inclusive empirical quantile: the `ceil(alpha * len)`-th smallest element.
/// This is the default rule used for the outage budgets;
/// [`quantile_interpolated`] is the alternative for callers that prefer a
/// smoothed estimate.
pub fn quantile<T: PartialOrd + Copy>(values: &[T], alpha: f64) -> Result<T> {
    if values.is_empty() {
        return Err(Error::invalid("quantile of an empty list"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("quantile level {alpha} out of (0, 1]")));
    }
    let rank = ((alpha * values.len() as f64).ceil() as usize).clamp(1, values.len());
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("unordered values in quantile"));
    Ok(sorted[rank - 1])
}

/// Linearly interpolated quantile over the order statistics.
pub fn quantile_interpolated(values: &[f64], alpha: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("quantile of an empty list"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("quantile level {alpha} out of (0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("unordered values in quantile"));
    let pos = alpha * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] * (1.0 - frac) + sorted[hi] * frac)
}

/// Estimate the annual (`AOP`) and simultaneous (`MOP`) outage budgets for a
/// fleet of `n` units at confidence `alpha` from `n_trials` Monte Carlo
/// draws. Trial `k` owns the sub-stream keyed by `(n, k)` — never by
/// `alpha` — so budgets for different confidence levels are quantiles of
/// the same empirical distribution and trials can run in parallel without
/// affecting the result.
pub fn percentiles(
    n: u32,
    alpha: f64,
    n_trials: usize,
    data: &MonthlyOutageData,
    streams: &SeedStreams,
) -> Result<Budgets> {
    if n < 1 {
        return Err(Error::invalid("percentiles: fleet size must be at least 1"));
    }
    if n_trials < 1 {
        return Err(Error::invalid("percentiles: need at least one trial"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("percentiles: alpha {alpha} out of (0, 1]")));
    }
    let observations: Vec<(u64, u32)> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = streams.percentile_trial(n, trial as u64);
            let matrix = generate_outage_samples(n as usize, data, &mut rng)?;
            Ok((matrix.total_hours(), matrix.max_simultaneous()))
        })
        .collect::<Result<Vec<_>>>()?;
    let totals: Vec<u64> = observations.iter().map(|&(t, _)| t).collect();
    let maxima: Vec<u32> = observations.iter().map(|&(_, m)| m).collect();
    Ok(Budgets {
        n,
        alpha,
        aop: quantile(&totals, alpha)?,
        mop: quantile(&maxima, alpha)?,
        seed: streams.master(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::MONTH_HOURS;
    use rand::RngExt;
    use rand::SeedableRng;

    #[test]
    fn quantile_on_small_lists() {
        assert_eq!(quantile(&[5.0], 0.1).unwrap(), 5.0);
        assert_eq!(quantile(&[5.0], 1.0).unwrap(), 5.0);
        // ceil(0.5 * 4) = 2nd smallest.
        assert_eq!(quantile(&[1, 2, 3, 4], 0.5).unwrap(), 2);
        // ceil(0.99 * 4) = 4th smallest.
        assert_eq!(quantile(&[1, 2, 3, 4], 0.99).unwrap(), 4);
        assert_eq!(quantile(&[3, 1, 2], 1.0).unwrap(), 3);
    }

    #[test]
    fn quantile_rejects_bad_input() {
        assert!(quantile::<f64>(&[], 0.5).is_err());
        assert!(quantile(&[1.0], 0.0).is_err());
        assert!(quantile(&[1.0], 1.5).is_err());
    }

    #[test]
    fn quantile_matches_sort_oracle() {
        // Independent oracle: full sort, pick ceil(alpha*len)-1.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(123);
        for _ in 0..1000 {
            let len = rng.random_range(1..=50);
            let values: Vec<i64> = (0..len).map(|_| rng.random_range(-100..100)).collect();
            let alpha: f64 = rng.random_range(0.01..=1.0);
            let mut sorted = values.clone();
            sorted.sort_unstable();
            let rank = ((alpha * len as f64).ceil() as usize).clamp(1, len);
            assert_eq!(quantile(&values, alpha).unwrap(), sorted[rank - 1]);
        }
    }

    #[test]
    fn interpolated_quantile_brackets_the_data() {
        let values = [1.0, 2.0, 3.0, 4.0];
        let q = quantile_interpolated(&values, 0.5).unwrap();
        assert!((q - 2.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_distributions() {
        let streams = SeedStreams::new(5);
        let zero = MonthlyOutageData::new(vec![[0u32; 12]]).unwrap();
        let b = percentiles(1, 0.9, 50, &zero, &streams).unwrap();
        assert_eq!((b.aop, b.mop), (0, 0));

        // Every month fully out: the year is one solid outage.
        let full: [u32; 12] = std::array::from_fn(|m| MONTH_HOURS[m] as u32);
        let all = MonthlyOutageData::new(vec![full]).unwrap();
        let b = percentiles(1, 0.5, 50, &all, &streams).unwrap();
        assert_eq!((b.aop, b.mop), (8760, 1));
    }

    #[test]
    fn budgets_monotone_in_alpha() {
        let streams = SeedStreams::new(17);
        let data = MonthlyOutageData::synthetic(2, 40).unwrap();
        for n in [1u32, 3, 6] {
            let lo = percentiles(n, 0.5, 400, &data, &streams).unwrap();
            let hi = percentiles(n, 0.9, 400, &data, &streams).unwrap();
            assert!(lo.aop <= hi.aop, "AOP not monotone for n={n}");
            assert!(lo.mop <= hi.mop, "MOP not monotone for n={n}");
            assert!(hi.mop <= n);
        }
    }

    #[test]
    fn percentiles_deterministic_and_parallel_safe() {
        let streams = SeedStreams::new(21);
        let data = MonthlyOutageData::synthetic(2, 40).unwrap();
        let a = percentiles(4, 0.8, 300, &data, &streams).unwrap();
        let b = percentiles(4, 0.8, 300, &data, &streams).unwrap();
        assert_eq!(a, b);
    }
}
