//! Seeded synthetic case generator.
//!
//! Produces a Northern-European-flavoured instance: winter-peaking load with
//! a diurnal profile, autocorrelated wind, daylight-bounded solar with a
//! seasonal amplitude, spring-peaked hydro inflow concentrated in the first
//! region, and a connected ring topology. Technology costs follow the
//! standard parameter table used throughout the crate. Everything is a pure
//! function of the seed.

use super::{
    CaseData, Link, MaxCapacity, Region, Scalars, ScenarioSeries, TechnologyParams, TechnologySet,
};
use crate::calendar::{DAYS_PER_YEAR, HOURS_PER_YEAR};
use crate::error::{Error, Result};
use crate::rng::{SeedStreams, StreamPurpose};
use rand::RngExt;

/// Default technology parameters (currency/MW basis; battery per MWh).
pub(crate) fn default_technologies() -> TechnologySet {
    TechnologySet {
        hydro: TechnologyParams {
            inv_cost: 0.0,
            fixed_cost: 30_000.0,
            var_cost: 0.0,
            fuel_cost: 0.0,
            efficiency: 0.9,
            lifetime_years: 80.0,
            emission_factor: 0.0,
        },
        gas: TechnologyParams {
            inv_cost: 436_000.0,
            fixed_cost: 7_893.0,
            var_cost: 4.79,
            fuel_cost: 32.0,
            efficiency: 0.43,
            lifetime_years: 25.0,
            emission_factor: 0.202,
        },
        wind: TechnologyParams {
            inv_cost: 1_090_000.0,
            fixed_cost: 15_602.0,
            var_cost: 1.85,
            fuel_cost: 0.0,
            efficiency: 1.0,
            lifetime_years: 30.0,
            emission_factor: 0.0,
        },
        solar: TechnologyParams {
            inv_cost: 290_000.0,
            fixed_cost: 9_900.0,
            var_cost: 0.0,
            fuel_cost: 0.0,
            efficiency: 1.0,
            lifetime_years: 40.0,
            emission_factor: 0.0,
        },
        battery: TechnologyParams {
            inv_cost: 65_000.0,
            fixed_cost: 0.0,
            var_cost: 0.0,
            fuel_cost: 0.0,
            efficiency: 1.0,
            lifetime_years: 15.0,
            emission_factor: 0.0,
        },
        inverter: TechnologyParams {
            inv_cost: 200_000.0,
            fixed_cost: 38_000.0,
            var_cost: 0.0,
            fuel_cost: 0.0,
            efficiency: 0.92,
            lifetime_years: 15.0,
            emission_factor: 0.0,
        },
        nuclear: TechnologyParams {
            inv_cost: 4_000_000.0,
            fixed_cost: 126_000.0,
            var_cost: 1.9,
            fuel_cost: 3.0,
            efficiency: 0.33,
            lifetime_years: 40.0,
            emission_factor: 0.0,
        },
    }
}

pub(crate) fn default_scalars() -> Scalars {
    Scalars {
        time_step_hours: 1,
        discount_rate: 0.05,
        loss_per_1000km: 0.016,
        battery_discharge_hours: 4.0,
        max_shed_fraction: 0.05,
        planned_outage_fraction: 0.15,
        carbon_tax: 150.0,
        shed_cost: 1_000.0,
        lol_penalty: 10_000.0,
        nuclear_unit_mw: 1_000.0,
        trans_cost_per_mw_km: 400.0,
        trans_lifetime_years: 40.0,
    }
}

const TAU: f64 = std::f64::consts::TAU;

fn day_of(hour: usize) -> usize {
    hour / 24
}

fn hour_of_day(hour: usize) -> f64 {
    (hour % 24) as f64
}

/// Winter-peaking seasonal factor, maximum around mid January.
fn seasonal_load(day: usize) -> f64 {
    1.0 + 0.18 * (TAU * (day as f64 - 15.0) / DAYS_PER_YEAR as f64).cos()
}

/// Double-humped working-day profile.
fn diurnal_load(h: f64) -> f64 {
    1.0 + 0.08 * (TAU * (h - 9.0) / 24.0).sin() + 0.05 * (2.0 * TAU * (h - 9.0) / 24.0).sin()
}

struct Ar1 {
    value: f64,
    rho: f64,
    sigma: f64,
}

impl Ar1 {
    fn new(rho: f64, sigma: f64) -> Self {
        Ar1 { value: 0.0, rho, sigma }
    }

    fn next(&mut self, rng: &mut impl rand::Rng) -> f64 {
        // Uniform innovations are enough here; variance matched to sigma.
        let eps: f64 = rng.random_range(-1.732..1.732);
        self.value = self.rho * self.value + self.sigma * eps;
        self.value
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Generate a deterministic synthetic case with `n_regions` regions and
/// `n_years` yearly weather scenarios of equal probability.
pub fn generate_synthetic_case(seed: u64, n_regions: usize, n_years: usize) -> Result<CaseData> {
    if n_regions < 2 {
        return Err(Error::invalid("synthetic case needs at least 2 regions"));
    }
    if n_years < 1 {
        return Err(Error::invalid("synthetic case needs at least 1 year"));
    }
    let streams = SeedStreams::new(seed);

    let mut regions = Vec::with_capacity(n_regions);
    let mut base_load = Vec::with_capacity(n_regions);
    for r in 0..n_regions {
        let mut rng = streams.stream(StreamPurpose::SyntheticCase, r as u64);
        let u: f64 = rng.random_range(0.0..1.0);
        base_load.push(2_200.0 + 600.0 * u);
        // Hydro sits in the "northern" regions: large in the first, modest in
        // the second, absent elsewhere.
        let hydro_max = match r {
            0 => 3_200.0 + 600.0 * rng.random_range(0.0..1.0),
            1 => 600.0 + 300.0 * rng.random_range(0.0..1.0),
            _ => 0.0,
        };
        regions.push(Region {
            id: format!("R{}", r + 1),
            max_capacity: MaxCapacity {
                gas: 1.0e6,
                solar: 12_000.0 + 6_000.0 * rng.random_range(0.0..1.0),
                wind: 9_000.0 + 3_000.0 * rng.random_range(0.0..1.0),
                hydro: hydro_max,
                nuclear: 4_000.0 + 1_000.0 * rng.random_range(0.0..1.0),
                battery: 1.0e6,
                inverter: 1.0e6,
            },
            hydro_reservoir_cap: hydro_max * 700.0,
        });
    }

    let mut links = Vec::new();
    {
        let mut rng = streams.stream(StreamPurpose::SyntheticCase, 1 << 20);
        for r in 0..n_regions - 1 {
            links.push(Link {
                from: r,
                to: r + 1,
                distance_km: 350.0 + 300.0 * rng.random_range(0.0..1.0),
            });
        }
        if n_regions >= 3 {
            links.push(Link {
                from: 0,
                to: n_regions - 1,
                distance_km: 500.0 + 400.0 * rng.random_range(0.0..1.0),
            });
        }
    }

    let mut scenarios = Vec::with_capacity(n_years);
    for y in 0..n_years {
        let key = |kind: u64, r: usize| (1u64 << 32) | (kind << 24) | ((y as u64) << 8) | r as u64;
        let mut load = Vec::with_capacity(n_regions);
        let mut cf_wind = Vec::with_capacity(n_regions);
        let mut cf_solar = Vec::with_capacity(n_regions);
        let mut inflow = Vec::with_capacity(n_regions);

        for (r, region) in regions.iter().enumerate() {
            // Load: seasonal x diurnal x slow AR(1) noise, year-scaled.
            let mut rng = streams.stream(StreamPurpose::SyntheticCase, key(1, r));
            let year_factor = 1.0 + 0.03 * rng.random_range(-1.0..1.0);
            let mut noise = Ar1::new(0.95, 0.008);
            let series: Vec<f64> = (0..HOURS_PER_YEAR)
                .map(|t| {
                    let v = base_load[r]
                        * year_factor
                        * seasonal_load(day_of(t))
                        * diurnal_load(hour_of_day(t))
                        * (1.0 + noise.next(&mut rng));
                    v.max(0.0)
                })
                .collect();
            load.push(series);

            // Wind: logistic-squashed AR(1) with a winter bias.
            let mut rng = streams.stream(StreamPurpose::SyntheticCase, key(2, r));
            let mut x = Ar1::new(0.97, 0.22);
            let series: Vec<f64> = (0..HOURS_PER_YEAR)
                .map(|t| {
                    let bias = -0.8 + 0.55 * (TAU * (day_of(t) as f64 - 15.0) / DAYS_PER_YEAR as f64).cos();
                    logistic(x.next(&mut rng) * 2.2 + bias).clamp(0.0, 1.0)
                })
                .collect();
            cf_wind.push(series);

            // Solar: daylight half-sine, seasonal amplitude, daily cloud factor.
            let mut rng = streams.stream(StreamPurpose::SyntheticCase, key(3, r));
            let mut cloud = 0.7;
            let mut today = usize::MAX;
            let series: Vec<f64> = (0..HOURS_PER_YEAR)
                .map(|t| {
                    let d = day_of(t);
                    if d != today {
                        today = d;
                        cloud = (0.75 * cloud + 0.25 * rng.random_range(0.2f64..1.0)).clamp(0.2, 1.0);
                    }
                    let day_len = 12.0 - 4.5 * (TAU * (d as f64 + 10.0) / DAYS_PER_YEAR as f64).cos();
                    let sunrise = 12.0 - day_len / 2.0;
                    let h = hour_of_day(t);
                    if h < sunrise || h > sunrise + day_len {
                        return 0.0;
                    }
                    let elevation = (std::f64::consts::PI * (h - sunrise) / day_len).sin();
                    let amplitude = 0.55 + 0.25 * (TAU * (d as f64 - 172.0) / DAYS_PER_YEAR as f64).cos();
                    (elevation * amplitude * cloud).clamp(0.0, 1.0)
                })
                .collect();
            cf_solar.push(series);

            // Inflow: spring melt peak, normalized so annual inflow energy is
            // about 4000 full-load hours of the hydro capacity.
            let mut rng = streams.stream(StreamPurpose::SyntheticCase, key(4, r));
            let hydro = region.max_capacity.hydro;
            let series: Vec<f64> = if hydro > 0.0 {
                let shape: Vec<f64> = (0..HOURS_PER_YEAR)
                    .map(|t| {
                        let d = day_of(t) as f64;
                        0.12 + 0.88 * (-((d - 130.0) * (d - 130.0)) / (2.0 * 35.0 * 35.0)).exp()
                    })
                    .collect();
                let total: f64 = shape.iter().sum();
                let target = hydro * 4_000.0;
                shape
                    .into_iter()
                    .map(|v| {
                        let w = 1.0 + 0.10 * rng.random_range(-1.0..1.0);
                        (v / total * target * w).max(0.0)
                    })
                    .collect()
            } else {
                vec![0.0; HOURS_PER_YEAR]
            };
            inflow.push(series);
        }

        scenarios.push(ScenarioSeries {
            id: format!("Y{}", y + 1),
            probability: 1.0 / n_years as f64,
            load,
            cf_wind,
            cf_solar,
            inflow,
        });
    }
    // Make the probabilities sum to exactly one regardless of rounding.
    let assigned: f64 = scenarios.iter().take(n_years - 1).map(|s| s.probability).sum();
    scenarios[n_years - 1].probability = 1.0 - assigned;

    let case = CaseData {
        regions,
        links,
        technologies: default_technologies(),
        scalars: default_scalars(),
        scenarios,
    };
    case.validate()?;
    Ok(case)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate_synthetic_case(1, 3, 2).unwrap();
        let b = generate_synthetic_case(1, 3, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_case_passes_validation() {
        // validate() audits cf ranges, probability sum, link shape.
        let case = generate_synthetic_case(9, 4, 3).unwrap();
        case.validate().unwrap();
        assert_eq!(case.regions.len(), 4);
        assert_eq!(case.scenarios.len(), 3);
    }

    #[test]
    fn years_are_distinct() {
        let case = generate_synthetic_case(1, 3, 41).unwrap();
        for a in 0..case.scenarios.len() {
            for b in a + 1..case.scenarios.len() {
                assert_ne!(
                    case.scenarios[a].load, case.scenarios[b].load,
                    "years {a} and {b} have identical load"
                );
                assert_ne!(case.scenarios[a].cf_wind, case.scenarios[b].cf_wind);
            }
        }
    }

    #[test]
    fn seeds_differ() {
        let a = generate_synthetic_case(1, 3, 1).unwrap();
        let b = generate_synthetic_case(2, 3, 1).unwrap();
        assert_ne!(a.scenarios[0].load, b.scenarios[0].load);
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(generate_synthetic_case(1, 1, 1).is_err());
        assert!(generate_synthetic_case(1, 3, 0).is_err());
    }
}
