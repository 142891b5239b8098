//! Evaluation of a fixed capacity mix against many weather years.
//!
//! Each year is one dispatch LP with capacities pinned to the mix, freshly
//! sampled nuclear outages forced in, and a loss-of-load slack priced at the
//! penalty cost, so the problem is always feasible. Summaries follow the
//! penalty-excluded cost convention: the reported mean cost is
//! `SC - penalty * LoL`, while each year keeps its penalty-included `SC`.

use crate::case::{aggregate_to_steps, apply_dunkelflaute, CaseData, SteppedCase};
use crate::error::{Error, Result};
use crate::lp::{SolveOptions, Solver};
use crate::outage::{generate_outage_samples, MonthlyOutageData, OutageMatrix};
use crate::rng::{SeedStreams, StreamPurpose};
use crate::wu::{solve_dispatch, CapacityMix, DispatchSpec, PlanSolution};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Years with more than this much unserved energy count as loss-of-load
/// years; absorbs solver round-off on the LoL slack.
const LOL_EPSILON_MWH: f64 = 1e-6;

/// The four evaluation environments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimulationKind {
    /// Weather variability only; no unplanned outages.
    NoOutage,
    /// Each year's own weather plus freshly drawn outages.
    Normal,
    /// The given year's weather substituted into every simulated year,
    /// plus outages.
    UnfavorableWeather { source_year: usize },
    /// Normal plus a low-wind/low-solar event scaling capacity factors by
    /// `intensity` over the window.
    Dunkelflaute { start_day: u32, duration_days: u32, intensity: f64 },
}

impl SimulationKind {
    /// The standard mid-winter event: day 32, two weeks, intensity 0.4.
    pub fn standard_dunkelflaute() -> Self {
        SimulationKind::Dunkelflaute { start_day: 32, duration_days: 14, intensity: 0.4 }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SimulationKind::NoOutage => "no-outage",
            SimulationKind::Normal => "normal",
            SimulationKind::UnfavorableWeather { .. } => "unfavorable-weather",
            SimulationKind::Dunkelflaute { .. } => "dunkelflaute",
        }
    }
}

/// Outcome of one simulated year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearResult {
    pub year: String,
    /// Total system cost including the loss-of-load penalty, currency.
    pub sc: f64,
    /// `sc` with the penalty removed.
    pub cost_excl_penalty: f64,
    pub lol_mwh: f64,
    /// Unserved energy as a fraction of the year's demand.
    pub lol_fraction: f64,
    pub shed_mwh: f64,
}

/// Aggregate over simulated years. Cost statistics are penalty-excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub kind: String,
    pub mean_cost: f64,
    pub std_cost: f64,
    pub max_cost: f64,
    pub mean_lol: f64,
    pub lol_years: usize,
    pub total_years: usize,
    pub mean_lol_fraction: f64,
    pub years: Vec<YearResult>,
}

impl SimSummary {
    pub fn lol_frequency(&self) -> f64 {
        self.lol_years as f64 / self.total_years as f64
    }

    fn from_years(kind: &SimulationKind, years: Vec<YearResult>) -> Result<SimSummary> {
        if years.is_empty() {
            return Err(Error::invalid("simulation produced no years"));
        }
        let n = years.len() as f64;
        let costs: Vec<f64> = years.iter().map(|y| y.cost_excl_penalty).collect();
        let mean_cost = costs.iter().sum::<f64>() / n;
        let var = costs.iter().map(|c| (c - mean_cost) * (c - mean_cost)).sum::<f64>() / n;
        let max_cost = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean_lol = years.iter().map(|y| y.lol_mwh).sum::<f64>() / n;
        let lol_years = years.iter().filter(|y| y.lol_mwh > LOL_EPSILON_MWH).count();
        let mean_lol_fraction = years.iter().map(|y| y.lol_fraction).sum::<f64>() / n;
        Ok(SimSummary {
            kind: kind.label().to_string(),
            mean_cost,
            std_cost: var.sqrt(),
            max_cost,
            mean_lol,
            lol_years,
            total_years: years.len(),
            mean_lol_fraction,
            years,
        })
    }
}

/// Offline-unit count at each step's first hour for the whole matrix.
pub(crate) fn outage_counts_at_steps(matrix: &OutageMatrix, step_first_hour: &[usize]) -> Vec<f64> {
    step_first_hour
        .iter()
        .map(|&h| (0..matrix.n_rows()).filter(|&i| matrix.row(i).is_out(h)).count() as f64)
        .collect()
}

/// Solve the dispatch LP for one year of `case` with the mix pinned and the
/// given per-step offline-unit counts forced in.
pub(crate) fn dispatch_year(
    case: &SteppedCase,
    year: usize,
    mix: &CapacityMix,
    outage_units: &[f64],
    solver: &dyn Solver,
    opts: &SolveOptions,
) -> Result<(YearResult, PlanSolution)> {
    let year_case = case.single_scenario(year);
    let forced = vec![outage_units.to_vec()];
    let spec = DispatchSpec {
        case: &year_case,
        name: format!("sim_{}", year_case.scenarios[0].id),
        fixed_total_nuclear_units: None,
        fixed_capacities: Some(mix),
        forced_outage_units: Some(&forced),
        loss_of_load: true,
        invest_in_objective: false,
    };
    let plan = solve_dispatch(&year_case, solver, opts, &spec, None).map_err(|e| match e {
        // The LoL slack makes this LP feasible by construction.
        Error::Solver { context, detail } => Error::Internal(format!(
            "simulation dispatch unexpectedly failed on {context}: {detail}"
        )),
        other => other,
    })?;

    let dispatch = &plan.dispatch[0];
    let lol_mwh = dispatch.total_loss_of_load();
    let shed_mwh = dispatch.total_shed();
    let sc = plan.sc;
    let demand = year_case.total_demand(0);
    let result = YearResult {
        year: year_case.scenarios[0].id.clone(),
        sc,
        cost_excl_penalty: sc - case.scalars.lol_penalty * lol_mwh,
        lol_mwh,
        lol_fraction: if demand > 0.0 { lol_mwh / demand } else { 0.0 },
        shed_mwh,
    };
    Ok((result, plan))
}

/// Simulate one year with outages drawn from `rng` per the fleet size.
pub fn simulate_year(
    case: &SteppedCase,
    year: usize,
    mix: &CapacityMix,
    n: u32,
    data: &MonthlyOutageData,
    rng: &mut impl Rng,
    solver: &dyn Solver,
    opts: &SolveOptions,
) -> Result<YearResult> {
    check_fleet_consistency(case, mix, n)?;
    let outages = generate_outage_samples(n as usize, data, rng)?;
    let counts = outage_counts_at_steps(&outages, &case.step_first_hour);
    dispatch_year(case, year, mix, &counts, solver, opts).map(|(year, _)| year)
}

fn check_fleet_consistency(case: &SteppedCase, mix: &CapacityMix, n: u32) -> Result<()> {
    let unit = case.scalars.nuclear_unit_mw;
    let nuclear = mix.nuclear_total_mw();
    if (nuclear - unit * n as f64).abs() > 1e-3 {
        return Err(Error::invalid(format!(
            "fleet size {n} x {unit} MW does not match the mix's {nuclear} MW of nuclear"
        )));
    }
    Ok(())
}

/// Evaluate `mix` against every year of `case` under the given environment.
///
/// Outage draws take the sub-stream keyed by the year index, so two runs
/// with the same master seed and fleet size see identical outages whatever
/// the kind — a Dunkelflaute of intensity 1 reproduces the Normal results
/// bit for bit.
pub fn run_simulation(
    case: &CaseData,
    ts: u32,
    mix: &CapacityMix,
    n: u32,
    kind: SimulationKind,
    data: &MonthlyOutageData,
    streams: SeedStreams,
    solver: &dyn Solver,
    opts: &SolveOptions,
) -> Result<SimSummary> {
    let working = transform_case(case, &kind)?;
    let stepped = aggregate_to_steps(&working, ts)?;
    check_fleet_consistency(&stepped, mix, n)?;

    let years: Vec<YearResult> = (0..stepped.scenarios.len())
        .into_par_iter()
        .map(|y| {
            let counts = match kind {
                SimulationKind::NoOutage => vec![0.0; stepped.n_steps],
                _ => {
                    let mut rng = streams.stream(StreamPurpose::SimulationYears, y as u64);
                    let outages = generate_outage_samples(n as usize, data, &mut rng)?;
                    outage_counts_at_steps(&outages, &stepped.step_first_hour)
                }
            };
            dispatch_year(&stepped, y, mix, &counts, solver, opts).map(|(year, _)| year)
        })
        .collect::<Result<Vec<_>>>()?;
    SimSummary::from_years(&kind, years)
}

fn transform_case(case: &CaseData, kind: &SimulationKind) -> Result<CaseData> {
    match kind {
        SimulationKind::NoOutage | SimulationKind::Normal => Ok(case.clone()),
        SimulationKind::UnfavorableWeather { source_year } => {
            let source = case
                .scenarios
                .get(*source_year)
                .ok_or_else(|| Error::invalid(format!("unfavorable source year {source_year} out of range")))?
                .clone();
            let mut out = case.clone();
            for scenario in &mut out.scenarios {
                scenario.load = source.load.clone();
                scenario.cf_wind = source.cf_wind.clone();
                scenario.cf_solar = source.cf_solar.clone();
                scenario.inflow = source.inflow.clone();
            }
            Ok(out)
        }
        SimulationKind::Dunkelflaute { start_day, duration_days, intensity } => {
            let mut out = case.clone();
            for scenario in &mut out.scenarios {
                *scenario = apply_dunkelflaute(scenario, *start_day, *duration_days, *intensity)?;
            }
            Ok(out)
        }
    }
}

/// Simulated-cost gap between the deterministic plan and the stochastic
/// plan, evaluated under the same environment and seed.
pub fn value_of_stochastic_solution(sc_deterministic: f64, sc_stochastic: f64) -> f64 {
    sc_deterministic - sc_stochastic
}

/// Cost increase of the most conservative solution over the least
/// conservative one, absolute and relative.
pub fn price_of_robustness(sc_most_conservative: f64, sc_least_conservative: f64) -> (f64, f64) {
    let absolute = sc_most_conservative - sc_least_conservative;
    let relative = if sc_least_conservative != 0.0 { absolute / sc_least_conservative } else { 0.0 };
    (absolute, relative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::generate_synthetic_case;
    use crate::lp::HighsSolver;
    use crate::wu::{LinkCapacity, RegionCapacities};

    fn flat_case(load_mw: f64, years: usize) -> CaseData {
        let mut case = generate_synthetic_case(2, 2, years).unwrap();
        for scenario in &mut case.scenarios {
            for col in &mut scenario.load {
                col.fill(load_mw);
            }
        }
        case
    }

    fn bare_mix(case: &CaseData, gas_mw: f64, nuclear_mw: f64) -> CapacityMix {
        CapacityMix {
            regions: case
                .regions
                .iter()
                .map(|r| RegionCapacities {
                    region: r.id.clone(),
                    gas: gas_mw,
                    solar: 0.0,
                    wind: 0.0,
                    hydro: 0.0,
                    nuclear: nuclear_mw,
                    battery_mwh: 0.0,
                    inverter: 0.0,
                })
                .collect(),
            links: case
                .links
                .iter()
                .map(|l| LinkCapacity {
                    from: case.regions[l.from].id.clone(),
                    to: case.regions[l.to].id.clone(),
                    mw: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn generous_gas_mix_has_no_loss_of_load() {
        let case = flat_case(900.0, 1);
        let mix = bare_mix(&case, 2_000.0, 0.0);
        let data = MonthlyOutageData::synthetic(3, 20).unwrap();
        let summary = run_simulation(
            &case,
            730,
            &mix,
            0,
            SimulationKind::Normal,
            &data,
            SeedStreams::new(11),
            &HighsSolver::default(),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(summary.lol_years, 0);
        assert!(summary.mean_lol.abs() < 1e-9);
    }

    #[test]
    fn zero_capacity_loses_all_unsheddable_demand() {
        let mut case = flat_case(500.0, 1);
        case.scalars.max_shed_fraction = 0.0;
        let mix = bare_mix(&case, 0.0, 0.0);
        let data = MonthlyOutageData::synthetic(3, 20).unwrap();
        let summary = run_simulation(
            &case,
            730,
            &mix,
            0,
            SimulationKind::Normal,
            &data,
            SeedStreams::new(11),
            &HighsSolver::default(),
            &SolveOptions::default(),
        )
        .unwrap();
        // Everything is lost: 2 regions x 500 MW x 8760 h.
        let expected = 2.0 * 500.0 * 8760.0;
        assert!((summary.mean_lol - expected).abs() < 1.0);
        assert_eq!(summary.lol_years, summary.total_years);
    }

    #[test]
    fn no_outage_is_cheaper_than_normal_on_shared_seed() {
        let case = generate_synthetic_case(31, 2, 2).unwrap();
        // A deliberately lean mix so outages actually bite.
        let mut mix = bare_mix(&case, 2_500.0, 2_000.0);
        for region in &mut mix.regions {
            region.wind = 1_000.0;
        }
        let data = MonthlyOutageData::synthetic(3, 30).unwrap();
        let solver = HighsSolver::default();
        let opts = SolveOptions::default();
        let streams = SeedStreams::new(5);
        let quiet =
            run_simulation(&case, 730, &mix, 4, SimulationKind::NoOutage, &data, streams, &solver, &opts)
                .unwrap();
        let normal =
            run_simulation(&case, 730, &mix, 4, SimulationKind::Normal, &data, streams, &solver, &opts)
                .unwrap();
        assert!(
            quiet.mean_cost <= normal.mean_cost + 1e-6 * normal.mean_cost.abs(),
            "forced outages made dispatch cheaper: {} vs {}",
            quiet.mean_cost,
            normal.mean_cost
        );
    }

    #[test]
    fn dunkelflaute_intensity_one_matches_normal() {
        let case = generate_synthetic_case(31, 2, 2).unwrap();
        let mix = bare_mix(&case, 3_000.0, 1_000.0);
        let data = MonthlyOutageData::synthetic(3, 30).unwrap();
        let solver = HighsSolver::default();
        let opts = SolveOptions::default();
        let streams = SeedStreams::new(5);
        let normal =
            run_simulation(&case, 730, &mix, 2, SimulationKind::Normal, &data, streams, &solver, &opts)
                .unwrap();
        let df = run_simulation(
            &case,
            730,
            &mix,
            2,
            SimulationKind::Dunkelflaute { start_day: 32, duration_days: 14, intensity: 1.0 },
            &data,
            streams,
            &solver,
            &opts,
        )
        .unwrap();
        assert_eq!(normal.years, df.years);
    }

    #[test]
    fn fleet_mismatch_is_rejected() {
        let case = flat_case(500.0, 1);
        let mix = bare_mix(&case, 1_000.0, 700.0); // 1400 MW nuclear != m * 1
        let data = MonthlyOutageData::synthetic(3, 20).unwrap();
        let err = run_simulation(
            &case,
            730,
            &mix,
            1,
            SimulationKind::Normal,
            &data,
            SeedStreams::new(1),
            &HighsSolver::default(),
            &SolveOptions::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("does not match"));
    }

    #[test]
    fn metric_arithmetic() {
        assert_eq!(value_of_stochastic_solution(52_301.0, 52_205.0), 96.0);
        assert_eq!(value_of_stochastic_solution(7.0, 7.0), 0.0);
        let (abs, rel) = price_of_robustness(110.0, 100.0);
        assert_eq!(abs, 10.0);
        assert!((rel - 0.10).abs() < 1e-12);
        assert_eq!(price_of_robustness(5.0, 5.0), (0.0, 0.0));
    }
}
