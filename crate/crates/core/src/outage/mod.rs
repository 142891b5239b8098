//! Nuclear outage sampling and uncertainty budgets.
//!
//! Monthly empirical outage hours are turned into hourly unavailability
//! profiles by placing, for every month with a non-zero outage, one
//! contiguous incident starting uniformly at random within the month
//! ([`generate_outage_samples`]). Monte Carlo over such draws yields the
//! annual (`AOP`) and simultaneous (`MOP`) outage budgets as empirical
//! quantiles ([`percentiles`]).

mod percentiles;
mod sampler;

pub use percentiles::{percentiles, quantile, quantile_interpolated};
pub use sampler::generate_outage_samples;

use crate::calendar::{HOURS_PER_YEAR, MONTH_HOURS};
use crate::error::{Error, Result};
use crate::rng::{SeedStreams, StreamPurpose};
use rand::RngExt;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Empirical unplanned outage hours per month: one row per observed
/// plant-year sample, twelve columns of hours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonthlyOutageData {
    rows: Vec<[u32; 12]>,
}

impl MonthlyOutageData {
    pub fn new(rows: Vec<[u32; 12]>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::data("monthly outage data needs at least one sample row"));
        }
        for (i, row) in rows.iter().enumerate() {
            for (m, &hours) in row.iter().enumerate() {
                if hours as usize > MONTH_HOURS[m] {
                    return Err(Error::data(format!(
                        "outage sample {i}: {hours} h exceeds month {} length {} h",
                        m + 1,
                        MONTH_HOURS[m]
                    )));
                }
            }
        }
        Ok(MonthlyOutageData { rows })
    }

    pub fn n_samples(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[u32; 12] {
        &self.rows[i]
    }

    pub fn annual_hours(&self, i: usize) -> u32 {
        self.rows[i].iter().sum()
    }

    /// Load from CSV: a header row, then one sample row of 12 hour columns.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
        let mut rows = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record
                .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
            if record.len() != 12 {
                return Err(Error::Csv {
                    path: path.display().to_string(),
                    detail: format!("row {} has {} columns, expected 12", idx + 2, record.len()),
                });
            }
            let mut row = [0u32; 12];
            for (m, field) in record.iter().enumerate() {
                row[m] = field.parse().map_err(|_| Error::Csv {
                    path: path.display().to_string(),
                    detail: format!("row {}, month {}: cannot parse '{}'", idx + 2, m + 1, field),
                })?;
            }
            rows.push(row);
        }
        MonthlyOutageData::new(rows)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut writer = csv::Writer::from_path(path)
            .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
        let header: Vec<String> = (1..=12).map(|m| format!("m{m}")).collect();
        writer
            .write_record(&header)
            .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
        for row in &self.rows {
            let record: Vec<String> = row.iter().map(|h| h.to_string()).collect();
            writer
                .write_record(&record)
                .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
        }
        writer.flush().map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        Ok(())
    }

    /// Seeded synthetic outage statistics: most plant-years see no or short
    /// incidents, a minority see multi-month failures.
    pub fn synthetic(seed: u64, n_samples: usize) -> Result<Self> {
        let streams = SeedStreams::new(seed);
        let mut rows = Vec::with_capacity(n_samples);
        for i in 0..n_samples {
            let mut rng = streams.stream(StreamPurpose::SyntheticOutageData, i as u64);
            let severity: f64 = rng.random_range(0.3..1.6);
            let mut row = [0u32; 12];
            for (m, slot) in row.iter_mut().enumerate() {
                if rng.random_range(0.0..1.0) < 0.10 * severity {
                    let cap = MONTH_HOURS[m] as f64;
                    let hours = rng.random_range(0.1..1.0) * severity * 500.0;
                    *slot = hours.min(cap) as u32;
                }
            }
            rows.push(row);
        }
        MonthlyOutageData::new(rows)
    }
}

/// One sampled year of unavailability for one plant: at most one contiguous
/// outage run per month, stored as (start hour, length) intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutageRow {
    intervals: Vec<(u32, u32)>,
}

impl OutageRow {
    pub(crate) fn new(intervals: Vec<(u32, u32)>) -> Self {
        OutageRow { intervals }
    }

    pub fn intervals(&self) -> &[(u32, u32)] {
        &self.intervals
    }

    /// Total outage hours in the year.
    pub fn total_hours(&self) -> u32 {
        self.intervals.iter().map(|&(_, len)| len).sum()
    }

    /// Whether the plant is offline at the given hour (0-based).
    pub fn is_out(&self, hour: usize) -> bool {
        let hour = hour as u32;
        self.intervals
            .iter()
            .any(|&(start, len)| hour >= start && hour < start + len)
    }

    /// Add this row's indicator into per-hour counts via interval bounds.
    pub(crate) fn accumulate_diff(&self, diff: &mut [i32]) {
        for &(start, len) in &self.intervals {
            diff[start as usize] += 1;
            diff[(start + len) as usize] -= 1;
        }
    }
}

/// N sampled plant-years of hourly unavailability indicators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutageMatrix {
    rows: Vec<OutageRow>,
}

impl OutageMatrix {
    pub(crate) fn new(rows: Vec<OutageRow>) -> Self {
        OutageMatrix { rows }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &OutageRow {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[OutageRow] {
        &self.rows
    }

    /// Total outage hours over all rows.
    pub fn total_hours(&self) -> u64 {
        self.rows.iter().map(|r| r.total_hours() as u64).sum()
    }

    /// Maximum over hours of the number of simultaneously offline rows.
    pub fn max_simultaneous(&self) -> u32 {
        let mut diff = vec![0i32; HOURS_PER_YEAR + 1];
        for row in &self.rows {
            row.accumulate_diff(&mut diff);
        }
        let mut level = 0i32;
        let mut max = 0i32;
        for d in &diff[..HOURS_PER_YEAR] {
            level += d;
            max = max.max(level);
        }
        max as u32
    }

    /// Number of offline rows among `rows` at the given hour.
    pub fn count_out_at(&self, rows: &[usize], hour: usize) -> u32 {
        rows.iter().filter(|&&i| self.rows[i].is_out(hour)).count() as u32
    }
}

/// Uncertainty budgets for a fleet of `n` units at confidence `alpha`:
/// `aop` caps annual outage hours, `mop` caps simultaneous offline units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub n: u32,
    pub alpha: f64,
    pub aop: u64,
    pub mop: u32,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monthly_data_validates_month_lengths() {
        let mut row = [0u32; 12];
        row[1] = 673; // February has 672 hours
        assert!(MonthlyOutageData::new(vec![row]).is_err());
        row[1] = 672;
        assert!(MonthlyOutageData::new(vec![row]).is_ok());
    }

    #[test]
    fn synthetic_data_is_deterministic_and_valid() {
        let a = MonthlyOutageData::synthetic(7, 40).unwrap();
        let b = MonthlyOutageData::synthetic(7, 40).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_samples(), 40);
        let any_nonzero = (0..a.n_samples()).any(|i| a.annual_hours(i) > 0);
        assert!(any_nonzero, "synthetic data should contain outages");
    }

    #[test]
    fn csv_round_trip() {
        let data = MonthlyOutageData::synthetic(3, 10).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("outages.csv");
        data.save_csv(&path).unwrap();
        let loaded = MonthlyOutageData::load_csv(&path).unwrap();
        assert_eq!(data, loaded);
    }

    #[test]
    fn row_queries_match_intervals() {
        let row = OutageRow::new(vec![(10, 5), (100, 1)]);
        assert_eq!(row.total_hours(), 6);
        assert!(!row.is_out(9));
        assert!(row.is_out(10));
        assert!(row.is_out(14));
        assert!(!row.is_out(15));
        assert!(row.is_out(100));
        assert!(!row.is_out(101));
    }
}
