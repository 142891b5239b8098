//! Hourly outage sample generation from monthly statistics.

use super::{MonthlyOutageData, OutageMatrix, OutageRow};
use crate::calendar::MONTH_HOURS;
use crate::error::Result;
use rand::{Rng, RngExt};

/// Draw `n` hourly outage rows. Each row copies one uniformly chosen
/// monthly sample; every month with a non-zero outage becomes a single
/// contiguous run of that many hours, starting uniformly at random within
/// the month so the run never crosses the month boundary.
///
/// Both draws are uniform over inclusive integer ranges. Months with zero
/// outage consume no randomness.
pub fn generate_outage_samples(
    n: usize,
    data: &MonthlyOutageData,
    rng: &mut impl Rng,
) -> Result<OutageMatrix> {
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let id = rng.random_range(0..data.n_samples());
        let sample = data.row(id);
        let mut intervals = Vec::new();
        let mut month_start = 0u32;
        for (m, &outage_hours) in sample.iter().enumerate() {
            let month_hours = MONTH_HOURS[m] as u32;
            if outage_hours > 0 {
                let offset = rng.random_range(0..=(month_hours - outage_hours));
                intervals.push((month_start + offset, outage_hours));
            }
            month_start += month_hours;
        }
        rows.push(OutageRow::new(intervals));
    }
    Ok(OutageMatrix::new(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::{month_start_hour, HOURS_PER_YEAR, MONTH_HOURS};
    use crate::rng::{SeedStreams, StreamPurpose};

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        SeedStreams::new(seed).stream(StreamPurpose::OutageSamples, 0)
    }

    #[test]
    fn zero_rows_give_empty_matrix() {
        let data = MonthlyOutageData::synthetic(1, 5).unwrap();
        let m = generate_outage_samples(0, &data, &mut rng(1)).unwrap();
        assert_eq!(m.n_rows(), 0);
        assert_eq!(m.total_hours(), 0);
    }

    #[test]
    fn all_zero_data_gives_all_zero_rows() {
        let data = MonthlyOutageData::new(vec![[0u32; 12]]).unwrap();
        let m = generate_outage_samples(10, &data, &mut rng(2)).unwrap();
        assert_eq!(m.total_hours(), 0);
        for i in 0..10 {
            assert!(m.row(i).intervals().is_empty());
        }
    }

    #[test]
    fn full_month_outage_pins_the_run() {
        let mut row = [0u32; 12];
        row[0] = MONTH_HOURS[0] as u32; // all of January
        let data = MonthlyOutageData::new(vec![row]).unwrap();
        let m = generate_outage_samples(3, &data, &mut rng(3)).unwrap();
        for i in 0..3 {
            assert_eq!(m.row(i).intervals(), &[(0, 744)]);
            assert!(m.row(i).is_out(0));
            assert!(m.row(i).is_out(743));
            assert!(!m.row(i).is_out(744));
        }
    }

    #[test]
    fn rows_respect_monthly_totals_and_contiguity() {
        let data = MonthlyOutageData::synthetic(11, 30).unwrap();
        let m = generate_outage_samples(200, &data, &mut rng(4)).unwrap();
        for row in m.rows() {
            // Runs stay inside a single month and never overlap.
            let mut prev_end = 0u32;
            for &(start, len) in row.intervals() {
                assert!(len > 0);
                assert!(start >= prev_end);
                let month = (0..12)
                    .find(|&m| {
                        let ms = month_start_hour(m) as u32;
                        start >= ms && start + len <= ms + MONTH_HOURS[m] as u32
                    })
                    .expect("run crosses a month boundary");
                let _ = month;
                prev_end = start + len;
                assert!((start + len) as usize <= HOURS_PER_YEAR);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_for_fixed_seed() {
        let data = MonthlyOutageData::synthetic(5, 25).unwrap();
        let a = generate_outage_samples(50, &data, &mut rng(9)).unwrap();
        let b = generate_outage_samples(50, &data, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }
}
