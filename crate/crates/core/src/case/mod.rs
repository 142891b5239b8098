//! Problem instances: regions, links, technologies, scalar parameters, and
//! per-scenario hourly series, plus the derived-parameter formulas and the
//! hourly-to-step aggregation everything downstream consumes.

mod io;
mod select;
mod stepped;
mod synth;

pub use select::{rank_scenarios, select_scenarios, ScenarioTriple};
pub use stepped::{aggregate_to_steps, DerivedParams, SteppedCase, SteppedScenario};
pub use synth::generate_synthetic_case;

use crate::calendar::{DAYS_PER_YEAR, HOURS_PER_YEAR};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Technologies in the system. `Battery` capacity is an energy (MWh); all
/// others are powers (MW). `Inverter` is the battery charge/discharge port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Gas,
    Solar,
    Wind,
    Hydro,
    Nuclear,
    Battery,
    Inverter,
}

pub const NUM_TECHNOLOGIES: usize = 7;

impl Technology {
    pub const ALL: [Technology; NUM_TECHNOLOGIES] = [
        Technology::Gas,
        Technology::Solar,
        Technology::Wind,
        Technology::Hydro,
        Technology::Nuclear,
        Technology::Battery,
        Technology::Inverter,
    ];

    /// Power generation plants (everything that produces electricity from a
    /// primary source; excludes battery and inverter).
    pub const GENERATORS: [Technology; 5] = [
        Technology::Gas,
        Technology::Solar,
        Technology::Wind,
        Technology::Hydro,
        Technology::Nuclear,
    ];

    pub fn index(self) -> usize {
        match self {
            Technology::Gas => 0,
            Technology::Solar => 1,
            Technology::Wind => 2,
            Technology::Hydro => 3,
            Technology::Nuclear => 4,
            Technology::Battery => 5,
            Technology::Inverter => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Technology::Gas => "gas",
            Technology::Solar => "solar",
            Technology::Wind => "wind",
            Technology::Hydro => "hydro",
            Technology::Nuclear => "nuclear",
            Technology::Battery => "battery",
            Technology::Inverter => "inverter",
        }
    }

    /// Single-letter tag used in variable names.
    pub fn letter(self) -> char {
        match self {
            Technology::Gas => 'g',
            Technology::Solar => 'p',
            Technology::Wind => 'w',
            Technology::Hydro => 'h',
            Technology::Nuclear => 'n',
            Technology::Battery => 'b',
            Technology::Inverter => 'i',
        }
    }
}

/// Cost and performance parameters of one technology. Costs are per MW
/// except for the battery, where investment is per MWh of storage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TechnologyParams {
    /// Overnight investment cost, currency/MW (battery: currency/MWh).
    pub inv_cost: f64,
    /// Fixed operation cost, currency/MW/year.
    pub fixed_cost: f64,
    /// Variable operation cost, currency/MWh generated.
    pub var_cost: f64,
    /// Fuel cost, currency/MWh of fuel input.
    pub fuel_cost: f64,
    /// Conversion efficiency, (0, 1].
    pub efficiency: f64,
    /// Economic lifetime in years.
    pub lifetime_years: f64,
    /// CO2 emission factor, tCO2/MWh of fuel input.
    pub emission_factor: f64,
}

impl TechnologyParams {
    pub fn validate(&self, tech: Technology) -> Result<()> {
        let name = tech.name();
        if self.inv_cost < 0.0 || self.fixed_cost < 0.0 || self.var_cost < 0.0 || self.fuel_cost < 0.0 {
            return Err(Error::data(format!("{name}: negative cost")));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::data(format!("{name}: efficiency must be in (0, 1]")));
        }
        if self.lifetime_years < 1.0 {
            return Err(Error::data(format!("{name}: lifetime must be at least one year")));
        }
        if self.emission_factor < 0.0 {
            return Err(Error::data(format!("{name}: negative emission factor")));
        }
        Ok(())
    }
}

/// Parameters for all technologies, indexable by [`Technology`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnologySet {
    pub gas: TechnologyParams,
    pub solar: TechnologyParams,
    pub wind: TechnologyParams,
    pub hydro: TechnologyParams,
    pub nuclear: TechnologyParams,
    pub battery: TechnologyParams,
    pub inverter: TechnologyParams,
}

impl TechnologySet {
    pub fn get(&self, tech: Technology) -> &TechnologyParams {
        match tech {
            Technology::Gas => &self.gas,
            Technology::Solar => &self.solar,
            Technology::Wind => &self.wind,
            Technology::Hydro => &self.hydro,
            Technology::Nuclear => &self.nuclear,
            Technology::Battery => &self.battery,
            Technology::Inverter => &self.inverter,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for tech in Technology::ALL {
            self.get(tech).validate(tech)?;
        }
        Ok(())
    }
}

/// Maximum installable capacity per technology in one region.
/// MW throughout, except `battery` which is MWh of storage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxCapacity {
    pub gas: f64,
    pub solar: f64,
    pub wind: f64,
    pub hydro: f64,
    pub nuclear: f64,
    pub battery: f64,
    pub inverter: f64,
}

impl MaxCapacity {
    pub fn get(&self, tech: Technology) -> f64 {
        match tech {
            Technology::Gas => self.gas,
            Technology::Solar => self.solar,
            Technology::Wind => self.wind,
            Technology::Hydro => self.hydro,
            Technology::Nuclear => self.nuclear,
            Technology::Battery => self.battery,
            Technology::Inverter => self.inverter,
        }
    }
}

/// One node of the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub max_capacity: MaxCapacity,
    /// Maximum hydro reservoir level, MWh.
    pub hydro_reservoir_cap: f64,
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        for tech in Technology::ALL {
            if self.max_capacity.get(tech) < 0.0 {
                return Err(Error::data(format!(
                    "region {}: negative max capacity for {}",
                    self.id,
                    tech.name()
                )));
            }
        }
        if self.hydro_reservoir_cap < 0.0 {
            return Err(Error::data(format!("region {}: negative reservoir capacity", self.id)));
        }
        Ok(())
    }
}

/// Candidate transmission corridor between two regions, stored with
/// `from < to` (indices into the case's region list).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub distance_km: f64,
}

/// System-wide scalar parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scalars {
    /// Hours per model time step.
    pub time_step_hours: u32,
    /// Discount rate used in capital recovery factors.
    pub discount_rate: f64,
    /// Transmission loss fraction per 1000 km.
    pub loss_per_1000km: f64,
    /// Battery full-discharge time; storage energy must cover this many
    /// hours of inverter power.
    pub battery_discharge_hours: f64,
    /// Maximum fraction of demand that may be shed per time step.
    pub max_shed_fraction: f64,
    /// Fraction of the year each nuclear plant spends in planned maintenance.
    pub planned_outage_fraction: f64,
    /// Carbon tax, currency/tCO2.
    pub carbon_tax: f64,
    /// Load shedding cost, currency/MWh.
    pub shed_cost: f64,
    /// Loss-of-load penalty used in simulation, currency/MWh.
    pub lol_penalty: f64,
    /// Capacity of one nuclear unit, MW.
    pub nuclear_unit_mw: f64,
    /// Transmission investment cost, currency/MW/km.
    pub trans_cost_per_mw_km: f64,
    /// Transmission line lifetime in years.
    pub trans_lifetime_years: f64,
}

impl Scalars {
    pub fn validate(&self) -> Result<()> {
        if self.time_step_hours < 1 || self.time_step_hours as usize > HOURS_PER_YEAR {
            return Err(Error::data("time_step_hours must be in 1..=8760"));
        }
        if !(0.0..=1.0).contains(&self.max_shed_fraction) {
            return Err(Error::data("max_shed_fraction must be in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.planned_outage_fraction) {
            return Err(Error::data("planned_outage_fraction must be in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.loss_per_1000km) {
            return Err(Error::data("loss_per_1000km must be in [0, 1)"));
        }
        if self.carbon_tax < 0.0 || self.shed_cost < 0.0 || self.lol_penalty < 0.0 {
            return Err(Error::data("costs must be non-negative"));
        }
        if self.trans_cost_per_mw_km < 0.0 {
            return Err(Error::data("trans_cost_per_mw_km must be non-negative"));
        }
        if self.nuclear_unit_mw <= 0.0 {
            return Err(Error::data("nuclear_unit_mw must be positive"));
        }
        if self.discount_rate <= 0.0 {
            return Err(Error::data("discount_rate must be positive"));
        }
        if self.battery_discharge_hours < 0.0 {
            return Err(Error::data("battery_discharge_hours must be non-negative"));
        }
        if self.trans_lifetime_years < 1.0 {
            return Err(Error::data("trans_lifetime_years must be at least one year"));
        }
        Ok(())
    }
}

/// One weather year: demand and renewable capacity factors per region at
/// hourly resolution, plus the scenario probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSeries {
    pub id: String,
    pub probability: f64,
    /// Demand, MW, `[region][hour]`, 8760 hours.
    pub load: Vec<Vec<f64>>,
    /// Wind capacity factor in [0, 1], `[region][hour]`.
    pub cf_wind: Vec<Vec<f64>>,
    /// Solar capacity factor in [0, 1], `[region][hour]`.
    pub cf_solar: Vec<Vec<f64>>,
    /// Hydro reservoir inflow, MW, `[region][hour]`.
    pub inflow: Vec<Vec<f64>>,
}

impl ScenarioSeries {
    pub fn validate(&self, n_regions: usize) -> Result<()> {
        let check_shape = |name: &str, series: &Vec<Vec<f64>>| -> Result<()> {
            if series.len() != n_regions {
                return Err(Error::data(format!(
                    "scenario {}: {} has {} region columns, case has {}",
                    self.id,
                    name,
                    series.len(),
                    n_regions
                )));
            }
            for (r, col) in series.iter().enumerate() {
                if col.len() != HOURS_PER_YEAR {
                    return Err(Error::data(format!(
                        "scenario {}: {} region {} has {} hours, expected {}",
                        self.id,
                        name,
                        r,
                        col.len(),
                        HOURS_PER_YEAR
                    )));
                }
            }
            Ok(())
        };
        check_shape("load", &self.load)?;
        check_shape("cf_wind", &self.cf_wind)?;
        check_shape("cf_solar", &self.cf_solar)?;
        check_shape("inflow", &self.inflow)?;
        if !(0.0..=1.0).contains(&self.probability) {
            return Err(Error::data(format!("scenario {}: probability out of [0, 1]", self.id)));
        }
        for (name, series, lo, hi) in [
            ("load", &self.load, 0.0, f64::INFINITY),
            ("cf_wind", &self.cf_wind, 0.0, 1.0),
            ("cf_solar", &self.cf_solar, 0.0, 1.0),
            ("inflow", &self.inflow, 0.0, f64::INFINITY),
        ] {
            for (r, col) in series.iter().enumerate() {
                for (t, &v) in col.iter().enumerate() {
                    if !v.is_finite() || v < lo || v > hi {
                        return Err(Error::data(format!(
                            "scenario {}: {name} out of range at region {r}, hour {t}: {v}",
                            self.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A full problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseData {
    pub regions: Vec<Region>,
    pub links: Vec<Link>,
    pub technologies: TechnologySet,
    pub scalars: Scalars,
    pub scenarios: Vec<ScenarioSeries>,
}

impl CaseData {
    pub fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::data("case has no regions"));
        }
        self.technologies.validate()?;
        self.scalars.validate()?;
        for region in &self.regions {
            region.validate()?;
        }
        let mut seen = std::collections::HashSet::new();
        for link in &self.links {
            if link.from >= self.regions.len() || link.to >= self.regions.len() {
                return Err(Error::data("link endpoint out of range"));
            }
            if link.from >= link.to {
                return Err(Error::data(format!(
                    "link ({}, {}) must be ordered from < to with no self-links",
                    link.from, link.to
                )));
            }
            if !(link.distance_km > 0.0) {
                return Err(Error::data("link distance must be positive"));
            }
            if !seen.insert((link.from, link.to)) {
                return Err(Error::data(format!(
                    "duplicate link between {} and {}",
                    self.regions[link.from].id, self.regions[link.to].id
                )));
            }
        }
        if self.scenarios.is_empty() {
            return Err(Error::data("case has no scenarios"));
        }
        for scenario in &self.scenarios {
            scenario.validate(self.regions.len())?;
        }
        let total_prob: f64 = self.scenarios.iter().map(|s| s.probability).sum();
        if (total_prob - 1.0).abs() > 1e-9 {
            return Err(Error::data(format!(
                "scenario probabilities sum to {total_prob}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn region_index(&self, id: &str) -> Option<usize> {
        self.regions.iter().position(|r| r.id == id)
    }

    /// A copy of this case restricted to the given scenarios, re-weighted
    /// with the supplied probabilities.
    pub fn with_scenarios(&self, picks: &[(usize, f64)]) -> Result<CaseData> {
        if picks.is_empty() {
            return Err(Error::invalid("with_scenarios: empty selection"));
        }
        let mut scenarios = Vec::with_capacity(picks.len());
        for &(idx, prob) in picks {
            let series = self
                .scenarios
                .get(idx)
                .ok_or_else(|| Error::invalid(format!("scenario index {idx} out of range")))?;
            let mut series = series.clone();
            series.probability = prob;
            scenarios.push(series);
        }
        let case = CaseData { scenarios, ..self.clone() };
        case.validate()?;
        Ok(case)
    }
}

/// Capital recovery factor `i / (1 - (1 + i)^-T)` annualizing an overnight
/// investment over lifetime `T` at discount rate `i`.
pub fn capital_recovery_factor(discount_rate: f64, lifetime_years: f64) -> Result<f64> {
    if !(discount_rate > 0.0) || !discount_rate.is_finite() {
        return Err(Error::invalid(format!(
            "capital_recovery_factor: discount rate must be positive, got {discount_rate}"
        )));
    }
    if !(lifetime_years >= 1.0) || !lifetime_years.is_finite() {
        return Err(Error::invalid(format!(
            "capital_recovery_factor: lifetime must be at least one year, got {lifetime_years}"
        )));
    }
    Ok(discount_rate / (1.0 - (1.0 + discount_rate).powf(-lifetime_years)))
}

/// Transmission efficiency `(1 - loss_rate)^(distance/1000)` for a line of
/// the given length, where `loss_rate` is the loss fraction per 1000 km.
pub fn transmission_efficiency(distance_km: f64, loss_rate: f64) -> Result<f64> {
    if !(distance_km > 0.0) || !distance_km.is_finite() {
        return Err(Error::invalid(format!(
            "transmission_efficiency: distance must be positive, got {distance_km}"
        )));
    }
    if !(0.0..1.0).contains(&loss_rate) {
        return Err(Error::invalid(format!(
            "transmission_efficiency: loss rate must be in [0, 1), got {loss_rate}"
        )));
    }
    Ok((1.0 - loss_rate).powf(distance_km / 1000.0))
}

/// Scale wind and solar capacity factors by `intensity` over a window of
/// consecutive days, leaving load and inflow untouched. Days are 1-based
/// within the 365-day year; the window covers hours
/// `[(start_day-1)*24+1, (start_day+duration-1)*24]` (1-based).
pub fn apply_dunkelflaute(
    series: &ScenarioSeries,
    start_day: u32,
    duration_days: u32,
    intensity: f64,
) -> Result<ScenarioSeries> {
    if start_day < 1 || duration_days < 1 || (start_day + duration_days - 1) as usize > DAYS_PER_YEAR {
        return Err(Error::invalid(format!(
            "dunkelflaute window day {start_day} + {duration_days} days exceeds the 365-day year"
        )));
    }
    if !(0.0..=1.0).contains(&intensity) {
        return Err(Error::invalid(format!("dunkelflaute intensity {intensity} out of [0, 1]")));
    }
    let first = (start_day as usize - 1) * 24;
    let last = (start_day as usize + duration_days as usize - 1) * 24; // exclusive
    let mut out = series.clone();
    for series in [&mut out.cf_wind, &mut out.cf_solar] {
        for col in series.iter_mut() {
            for v in &mut col[first..last] {
                *v *= intensity;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn crf_matches_formula() {
        // Independently evaluated: i / (1 - (1+i)^-T).
        assert_relative_eq!(capital_recovery_factor(0.05, 40.0).unwrap(), 0.058278, epsilon = 1e-6);
        assert_relative_eq!(capital_recovery_factor(0.05, 1.0).unwrap(), 1.05, epsilon = 1e-12);
        assert_relative_eq!(capital_recovery_factor(0.05, 80.0).unwrap(), 0.051030, epsilon = 1e-6);
    }

    #[test]
    fn crf_rejects_bad_parameters() {
        assert!(capital_recovery_factor(0.0, 40.0).is_err());
        assert!(capital_recovery_factor(-0.05, 40.0).is_err());
        assert!(capital_recovery_factor(0.05, 0.5).is_err());
    }

    #[test]
    fn crf_monotonicity() {
        // Strictly decreasing in lifetime, strictly increasing in rate.
        let rates = [0.01, 0.03, 0.05, 0.08, 0.12];
        let lives = [1.0, 5.0, 15.0, 40.0, 80.0];
        for &i in &rates {
            let mut prev = f64::INFINITY;
            for &t in &lives {
                let crf = capital_recovery_factor(i, t).unwrap();
                assert!(crf < prev, "crf not decreasing in lifetime at i={i}, T={t}");
                prev = crf;
            }
        }
        for &t in &lives {
            let mut prev = 0.0;
            for &i in &rates {
                let crf = capital_recovery_factor(i, t).unwrap();
                assert!(crf > prev, "crf not increasing in rate at i={i}, T={t}");
                prev = crf;
            }
        }
    }

    #[test]
    fn transmission_efficiency_matches_formula() {
        assert_relative_eq!(transmission_efficiency(1000.0, 0.016).unwrap(), 0.984, epsilon = 1e-12);
        assert_relative_eq!(transmission_efficiency(0.0001, 0.016).unwrap(), 1.0, epsilon = 1e-5);
        assert_relative_eq!(transmission_efficiency(2000.0, 0.016).unwrap(), 0.968256, epsilon = 1e-6);
    }

    #[test]
    fn transmission_efficiency_rejects_bad_parameters() {
        assert!(transmission_efficiency(0.0, 0.016).is_err());
        assert!(transmission_efficiency(1000.0, 1.0).is_err());
        assert!(transmission_efficiency(1000.0, -0.1).is_err());
    }

    fn tiny_series() -> ScenarioSeries {
        ScenarioSeries {
            id: "y".into(),
            probability: 1.0,
            load: vec![vec![10.0; 8760]],
            cf_wind: vec![(0..8760).map(|t| 0.2 + 0.1 * ((t % 7) as f64) / 7.0).collect()],
            cf_solar: vec![(0..8760).map(|t| if t % 24 > 6 && t % 24 < 18 { 0.5 } else { 0.0 }).collect()],
            inflow: vec![vec![1.0; 8760]],
        }
    }

    #[test]
    fn dunkelflaute_identity_and_window() {
        let base = tiny_series();
        let same = apply_dunkelflaute(&base, 10, 5, 1.0).unwrap();
        assert_eq!(base, same);

        let hit = apply_dunkelflaute(&base, 32, 14, 0.4).unwrap();
        // 1-based hour 745 is index 744: first hour inside the window.
        assert_relative_eq!(hit.cf_wind[0][744], 0.4 * base.cf_wind[0][744]);
        // 1-based hour 744 (index 743) is the last hour before the window.
        assert_eq!(hit.cf_wind[0][743], base.cf_wind[0][743]);
        // 1-based hour 1080 (index 1079) is the last hour inside.
        assert_relative_eq!(hit.cf_wind[0][1079], 0.4 * base.cf_wind[0][1079]);
        assert_eq!(hit.cf_wind[0][1080], base.cf_wind[0][1080]);
        assert_eq!(hit.load, base.load);
        assert_eq!(hit.inflow, base.inflow);
    }

    #[test]
    fn dunkelflaute_zero_intensity_annihilates() {
        let base = tiny_series();
        let out = apply_dunkelflaute(&base, 32, 14, 0.0).unwrap();
        for t in 744..1080 {
            assert_eq!(out.cf_wind[0][t], 0.0);
            assert_eq!(out.cf_solar[0][t], 0.0);
        }
    }

    #[test]
    fn dunkelflaute_composes_multiplicatively() {
        let base = tiny_series();
        let twice = apply_dunkelflaute(&apply_dunkelflaute(&base, 50, 3, 0.5).unwrap(), 50, 3, 0.5).unwrap();
        let once = apply_dunkelflaute(&base, 50, 3, 0.25).unwrap();
        for t in 0..8760 {
            assert_relative_eq!(twice.cf_wind[0][t], once.cf_wind[0][t], max_relative = 1e-12);
        }
    }

    #[test]
    fn dunkelflaute_window_bounds_checked() {
        let base = tiny_series();
        assert!(apply_dunkelflaute(&base, 0, 5, 0.5).is_err());
        assert!(apply_dunkelflaute(&base, 360, 10, 0.5).is_err());
        assert!(apply_dunkelflaute(&base, 32, 14, 1.5).is_err());
    }
}
