//! Case file format: one TOML config plus one CSV per hourly series.
//!
//! The config holds scalars, technologies, regions, and links; each scenario
//! block names four CSV files (load, cf_wind, cf_solar, inflow) resolved
//! relative to the config file. Series CSVs carry a mandatory header row of
//! region ids, then 8760 data rows with `.` as the decimal separator.

use super::{CaseData, Link, MaxCapacity, Region, Scalars, ScenarioSeries, TechnologySet};
use crate::calendar::HOURS_PER_YEAR;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize, Deserialize)]
struct CaseConfig {
    scalars: Scalars,
    technologies: TechnologySet,
    regions: Vec<RegionConfig>,
    links: Vec<LinkConfig>,
    scenarios: Vec<ScenarioConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RegionConfig {
    id: String,
    hydro_reservoir_cap_mwh: f64,
    max_capacity_mw: MaxCapacity,
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkConfig {
    from: String,
    to: String,
    distance_km: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioConfig {
    id: String,
    probability: f64,
    load_csv: String,
    cf_wind_csv: String,
    cf_solar_csv: String,
    inflow_csv: String,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

/// Read one series CSV: header of region ids (in case order), 8760 rows.
fn read_series_csv(path: &Path, region_ids: &[String]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?
        .clone();
    let got: Vec<&str> = headers.iter().collect();
    let want: Vec<&str> = region_ids.iter().map(|s| s.as_str()).collect();
    if got != want {
        return Err(Error::Csv {
            path: path.display().to_string(),
            detail: format!("header {got:?} does not match case regions {want:?}"),
        });
    }
    let mut series = vec![Vec::with_capacity(HOURS_PER_YEAR); region_ids.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
        if record.len() != region_ids.len() {
            return Err(Error::Csv {
                path: path.display().to_string(),
                detail: format!("row {} has {} fields, expected {}", row_idx + 2, record.len(), region_ids.len()),
            });
        }
        for (r, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Csv {
                path: path.display().to_string(),
                detail: format!("row {}, column {}: cannot parse '{}'", row_idx + 2, r + 1, field),
            })?;
            series[r].push(value);
        }
    }
    for (r, col) in series.iter().enumerate() {
        if col.len() != HOURS_PER_YEAR {
            return Err(Error::Csv {
                path: path.display().to_string(),
                detail: format!("column {} has {} rows, expected {}", region_ids[r], col.len(), HOURS_PER_YEAR),
            });
        }
    }
    Ok(series)
}

fn write_series_csv(path: &Path, region_ids: &[String], series: &[Vec<f64>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    writer
        .write_record(region_ids)
        .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    for t in 0..HOURS_PER_YEAR {
        let row: Vec<String> = series.iter().map(|col| col[t].to_string()).collect();
        writer
            .write_record(&row)
            .map_err(|e| Error::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    }
    writer
        .flush()
        .map_err(|e| io_err(path, e))?;
    Ok(())
}

impl CaseData {
    /// Load a case from its TOML config; series CSV paths are resolved
    /// relative to the config file.
    pub fn load(config_path: impl AsRef<Path>) -> Result<CaseData> {
        let config_path = config_path.as_ref();
        let text = std::fs::read_to_string(config_path).map_err(|e| io_err(config_path, e))?;
        let config: CaseConfig = toml::from_str(&text).map_err(|e| Error::Toml {
            path: config_path.display().to_string(),
            detail: e.to_string(),
        })?;
        let base = config_path.parent().unwrap_or(Path::new("."));

        let regions: Vec<Region> = config
            .regions
            .iter()
            .map(|rc| Region {
                id: rc.id.clone(),
                max_capacity: rc.max_capacity_mw,
                hydro_reservoir_cap: rc.hydro_reservoir_cap_mwh,
            })
            .collect();
        let region_ids: Vec<String> = regions.iter().map(|r| r.id.clone()).collect();
        let index_of = |id: &str| -> Result<usize> {
            region_ids
                .iter()
                .position(|r| r == id)
                .ok_or_else(|| Error::data(format!("link references unknown region '{id}'")))
        };
        let mut links = Vec::with_capacity(config.links.len());
        for lc in &config.links {
            let a = index_of(&lc.from)?;
            let b = index_of(&lc.to)?;
            let (from, to) = if a < b { (a, b) } else { (b, a) };
            links.push(Link { from, to, distance_km: lc.distance_km });
        }

        let mut scenarios = Vec::with_capacity(config.scenarios.len());
        for sc in &config.scenarios {
            let resolve = |rel: &str| -> PathBuf { base.join(rel) };
            scenarios.push(ScenarioSeries {
                id: sc.id.clone(),
                probability: sc.probability,
                load: read_series_csv(&resolve(&sc.load_csv), &region_ids)?,
                cf_wind: read_series_csv(&resolve(&sc.cf_wind_csv), &region_ids)?,
                cf_solar: read_series_csv(&resolve(&sc.cf_solar_csv), &region_ids)?,
                inflow: read_series_csv(&resolve(&sc.inflow_csv), &region_ids)?,
            });
        }

        let case = CaseData {
            regions,
            links,
            technologies: config.technologies,
            scalars: config.scalars,
            scenarios,
        };
        case.validate()?;
        Ok(case)
    }

    /// Write the case as `case.toml` plus per-scenario series CSVs in `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        self.validate()?;
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let region_ids: Vec<String> = self.regions.iter().map(|r| r.id.clone()).collect();

        let mut scenario_configs = Vec::with_capacity(self.scenarios.len());
        for s in &self.scenarios {
            let files = [
                (format!("load_{}.csv", s.id), &s.load),
                (format!("cf_wind_{}.csv", s.id), &s.cf_wind),
                (format!("cf_solar_{}.csv", s.id), &s.cf_solar),
                (format!("inflow_{}.csv", s.id), &s.inflow),
            ];
            for (name, series) in &files {
                write_series_csv(&dir.join(name), &region_ids, series)?;
            }
            scenario_configs.push(ScenarioConfig {
                id: s.id.clone(),
                probability: s.probability,
                load_csv: files[0].0.clone(),
                cf_wind_csv: files[1].0.clone(),
                cf_solar_csv: files[2].0.clone(),
                inflow_csv: files[3].0.clone(),
            });
        }

        let config = CaseConfig {
            scalars: self.scalars,
            technologies: self.technologies.clone(),
            regions: self
                .regions
                .iter()
                .map(|r| RegionConfig {
                    id: r.id.clone(),
                    hydro_reservoir_cap_mwh: r.hydro_reservoir_cap,
                    max_capacity_mw: r.max_capacity,
                })
                .collect(),
            links: self
                .links
                .iter()
                .map(|l| LinkConfig {
                    from: self.regions[l.from].id.clone(),
                    to: self.regions[l.to].id.clone(),
                    distance_km: l.distance_km,
                })
                .collect(),
            scenarios: scenario_configs,
        };
        let text = toml::to_string_pretty(&config)
            .map_err(|e| Error::Toml { path: dir.display().to_string(), detail: e.to_string() })?;
        let config_path = dir.join("case.toml");
        std::fs::write(&config_path, text).map_err(|e| io_err(&config_path, e))?;
        Ok(config_path)
    }
}

#[cfg(test)]
mod tests {
    use super::super::generate_synthetic_case;
    use crate::case::CaseData;

    #[test]
    fn save_load_round_trip() {
        let case = generate_synthetic_case(5, 3, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let config = case.save(dir.path()).unwrap();
        let loaded = CaseData::load(&config).unwrap();
        assert_eq!(case.regions, loaded.regions);
        assert_eq!(case.links, loaded.links);
        assert_eq!(case.scalars, loaded.scalars);
        assert_eq!(case.technologies, loaded.technologies);
        assert_eq!(case.scenarios.len(), loaded.scenarios.len());
        for (a, b) in case.scenarios.iter().zip(&loaded.scenarios) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.load, b.load);
            assert_eq!(a.cf_wind, b.cf_wind);
        }
    }

    #[test]
    fn missing_file_is_reported_with_path() {
        let err = CaseData::load("/nonexistent/case.toml").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/case.toml"));
    }
}
