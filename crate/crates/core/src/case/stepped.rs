//! Time-step aggregation of hourly cases.
//!
//! The models run on steps of `ts` hours. Each step value is the arithmetic
//! mean of the hours it covers, so energy per step is the mean rate times
//! `ts`. Trailing hours past the last full step are dropped, giving
//! `floor(8760 / ts)` uniform steps.

use super::{capital_recovery_factor, transmission_efficiency, CaseData, Link, Region, Scalars, Technology, TechnologySet, NUM_TECHNOLOGIES};
use crate::calendar::HOURS_PER_YEAR;
use crate::error::{Error, Result};

/// Per-scenario series at step resolution, `[region][step]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteppedScenario {
    pub id: String,
    pub probability: f64,
    pub load: Vec<Vec<f64>>,
    pub cf_wind: Vec<Vec<f64>>,
    pub cf_solar: Vec<Vec<f64>>,
    pub inflow: Vec<Vec<f64>>,
}

/// Parameters computed once from the case: capital recovery factors and
/// link transmission efficiencies.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    /// Capital recovery factor per technology, indexed by [`Technology::index`].
    pub crf: [f64; NUM_TECHNOLOGIES],
    /// Capital recovery factor for transmission lines.
    pub crf_trans: f64,
    /// Transmission efficiency per link, parallel to `links`.
    pub link_efficiency: Vec<f64>,
}

impl DerivedParams {
    pub fn compute(technologies: &TechnologySet, scalars: &Scalars, links: &[Link]) -> Result<Self> {
        let mut crf = [0.0; NUM_TECHNOLOGIES];
        for tech in Technology::ALL {
            crf[tech.index()] =
                capital_recovery_factor(scalars.discount_rate, technologies.get(tech).lifetime_years)?;
        }
        let crf_trans = capital_recovery_factor(scalars.discount_rate, scalars.trans_lifetime_years)?;
        let link_efficiency = links
            .iter()
            .map(|l| transmission_efficiency(l.distance_km, scalars.loss_per_1000km))
            .collect::<Result<Vec<_>>>()?;
        Ok(DerivedParams { crf, crf_trans, link_efficiency })
    }
}

/// A case aggregated to step resolution; the input everything downstream
/// consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct SteppedCase {
    pub ts: u32,
    pub n_steps: usize,
    /// First hour (0-based) covered by each step.
    pub step_first_hour: Vec<usize>,
    pub regions: Vec<Region>,
    pub links: Vec<Link>,
    pub technologies: TechnologySet,
    pub scalars: Scalars,
    pub derived: DerivedParams,
    pub scenarios: Vec<SteppedScenario>,
}

impl SteppedCase {
    pub fn n_regions(&self) -> usize {
        self.regions.len()
    }

    /// Total demand energy (MWh) of one scenario over the stepped horizon.
    pub fn total_demand(&self, scenario: usize) -> f64 {
        let ts = self.ts as f64;
        self.scenarios[scenario]
            .load
            .iter()
            .map(|col| col.iter().sum::<f64>() * ts)
            .sum()
    }

    /// Mean capacity factor over all steps for one scenario, region, and
    /// renewable technology.
    pub fn mean_cf(&self, scenario: usize, region: usize, tech: Technology) -> f64 {
        let series = match tech {
            Technology::Wind => &self.scenarios[scenario].cf_wind[region],
            Technology::Solar => &self.scenarios[scenario].cf_solar[region],
            _ => return 1.0,
        };
        series.iter().sum::<f64>() / series.len() as f64
    }

    /// A copy of this case holding only the given scenario at probability 1.
    pub fn single_scenario(&self, scenario: usize) -> SteppedCase {
        let mut one = self.scenarios[scenario].clone();
        one.probability = 1.0;
        SteppedCase { scenarios: vec![one], ..self.clone() }
    }
}

fn mean_steps(hourly: &[f64], ts: usize, n_steps: usize) -> Vec<f64> {
    (0..n_steps)
        .map(|k| hourly[k * ts..(k + 1) * ts].iter().sum::<f64>() / ts as f64)
        .collect()
}

/// Aggregate an hourly case into steps of `ts` hours.
pub fn aggregate_to_steps(case: &CaseData, ts: u32) -> Result<SteppedCase> {
    if ts < 1 || ts as usize > HOURS_PER_YEAR {
        return Err(Error::invalid(format!("time step {ts} out of 1..=8760")));
    }
    case.validate()?;
    let ts_usize = ts as usize;
    let n_steps = HOURS_PER_YEAR / ts_usize;
    let step_first_hour = (0..n_steps).map(|k| k * ts_usize).collect();
    let derived = DerivedParams::compute(&case.technologies, &case.scalars, &case.links)?;

    let scenarios = case
        .scenarios
        .iter()
        .map(|s| SteppedScenario {
            id: s.id.clone(),
            probability: s.probability,
            load: s.load.iter().map(|col| mean_steps(col, ts_usize, n_steps)).collect(),
            cf_wind: s.cf_wind.iter().map(|col| mean_steps(col, ts_usize, n_steps)).collect(),
            cf_solar: s.cf_solar.iter().map(|col| mean_steps(col, ts_usize, n_steps)).collect(),
            inflow: s.inflow.iter().map(|col| mean_steps(col, ts_usize, n_steps)).collect(),
        })
        .collect();

    let mut scalars = case.scalars;
    scalars.time_step_hours = ts;

    Ok(SteppedCase {
        ts,
        n_steps,
        step_first_hour,
        regions: case.regions.clone(),
        links: case.links.clone(),
        technologies: case.technologies.clone(),
        scalars,
        derived,
        scenarios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::generate_synthetic_case;
    use approx::assert_relative_eq;

    #[test]
    fn identity_aggregation_keeps_series() {
        let case = generate_synthetic_case(3, 2, 1).unwrap();
        let stepped = aggregate_to_steps(&case, 1).unwrap();
        assert_eq!(stepped.n_steps, 8760);
        assert_eq!(stepped.scenarios[0].load[0], case.scenarios[0].load[0]);
    }

    #[test]
    fn seven_hour_steps_drop_the_tail() {
        let case = generate_synthetic_case(3, 2, 1).unwrap();
        let stepped = aggregate_to_steps(&case, 7).unwrap();
        assert_eq!(stepped.n_steps, 1251);
        assert_eq!(*stepped.step_first_hour.last().unwrap(), 1250 * 7);
    }

    #[test]
    fn constant_series_stays_constant() {
        let mut case = generate_synthetic_case(3, 2, 1).unwrap();
        for col in case.scenarios[0].load.iter_mut() {
            col.fill(10.0);
        }
        let stepped = aggregate_to_steps(&case, 24).unwrap();
        for col in &stepped.scenarios[0].load {
            for &v in col {
                assert_relative_eq!(v, 10.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn aggregation_preserves_the_mean() {
        let case = generate_synthetic_case(7, 2, 1).unwrap();
        for ts in [1u32, 7, 24, 168] {
            let stepped = aggregate_to_steps(&case, ts).unwrap();
            let covered = stepped.n_steps * ts as usize;
            for r in 0..case.regions.len() {
                let hourly_mean =
                    case.scenarios[0].load[r][..covered].iter().sum::<f64>() / covered as f64;
                let step_mean = stepped.scenarios[0].load[r].iter().sum::<f64>()
                    / stepped.n_steps as f64;
                assert_relative_eq!(hourly_mean, step_mean, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn aggregated_cf_stays_in_unit_interval() {
        let case = generate_synthetic_case(11, 3, 2).unwrap();
        let stepped = aggregate_to_steps(&case, 24).unwrap();
        for s in &stepped.scenarios {
            for series in [&s.cf_wind, &s.cf_solar] {
                for col in series {
                    for &v in col {
                        assert!((0.0..=1.0).contains(&v));
                    }
                }
            }
        }
    }

    #[test]
    fn oversized_step_is_rejected() {
        let case = generate_synthetic_case(3, 2, 1).unwrap();
        assert!(aggregate_to_steps(&case, 8761).is_err());
        assert!(aggregate_to_steps(&case, 0).is_err());
    }
}
