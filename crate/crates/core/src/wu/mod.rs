//! The scenario-based stochastic capacity-expansion model (weather
//! uncertainty). Capacities, transmission, storage levels, dispatch, load
//! shedding and planned nuclear maintenance are chosen to minimize the
//! levelized total system cost across weighted weather scenarios. The
//! deterministic model is the single-scenario special case.
//!
//! The same constraint generator also serves the robust master problem
//! (forced unplanned outages, fixed fleet size) and the simulation problem
//! (fixed capacities, loss-of-load slack); see [`wnu`](crate::wnu) and
//! [`sim`](crate::sim).

pub mod audit;
mod build;

pub use audit::{audit_plan, AuditReport};
pub(crate) use build::{build_dispatch_model, extract_plan, DispatchSpec};

use crate::case::{SteppedCase, Technology};
use crate::error::{Error, Result};
use crate::lp::{Model, SolveOptions, Solver};
use serde::{Deserialize, Serialize};

/// Installed capacity per technology in one region. MW throughout, except
/// the battery which is MWh of storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCapacities {
    pub region: String,
    pub gas: f64,
    pub solar: f64,
    pub wind: f64,
    pub hydro: f64,
    pub nuclear: f64,
    pub battery_mwh: f64,
    pub inverter: f64,
}

impl RegionCapacities {
    pub fn get(&self, tech: Technology) -> f64 {
        match tech {
            Technology::Gas => self.gas,
            Technology::Solar => self.solar,
            Technology::Wind => self.wind,
            Technology::Hydro => self.hydro,
            Technology::Nuclear => self.nuclear,
            Technology::Battery => self.battery_mwh,
            Technology::Inverter => self.inverter,
        }
    }

    pub fn set(&mut self, tech: Technology, value: f64) {
        match tech {
            Technology::Gas => self.gas = value,
            Technology::Solar => self.solar = value,
            Technology::Wind => self.wind = value,
            Technology::Hydro => self.hydro = value,
            Technology::Nuclear => self.nuclear = value,
            Technology::Battery => self.battery_mwh = value,
            Technology::Inverter => self.inverter = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkCapacity {
    pub from: String,
    pub to: String,
    pub mw: f64,
}

/// A capacity layout: generation/storage per region plus transmission per
/// link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityMix {
    pub regions: Vec<RegionCapacities>,
    pub links: Vec<LinkCapacity>,
}

impl CapacityMix {
    pub fn get(&self, region: usize, tech: Technology) -> f64 {
        self.regions[region].get(tech)
    }

    pub fn total(&self, tech: Technology) -> f64 {
        self.regions.iter().map(|r| r.get(tech)).sum()
    }

    pub fn nuclear_total_mw(&self) -> f64 {
        self.total(Technology::Nuclear)
    }

    pub fn trans_total_mw(&self) -> f64 {
        self.links.iter().map(|l| l.mw).sum()
    }
}

/// Annualized cost components of a plan, currency/year. Operational,
/// emission and shedding parts are probability-weighted scenario means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub investment: f64,
    pub fixed: f64,
    pub mean_operational: f64,
    pub mean_emission_cost: f64,
    pub mean_shed_cost: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.investment + self.fixed + self.mean_operational + self.mean_emission_cost + self.mean_shed_cost
    }
}

/// Full per-scenario operational detail. Energies in MWh per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDispatch {
    pub scenario: String,
    pub probability: f64,
    /// `[region][tech][step]`, indexed by [`Technology::index`].
    pub generation: Vec<Vec<Vec<f64>>>,
    /// `[link][direction][step]`; direction 0 flows from `link.from` to
    /// `link.to`.
    pub flow: Vec<[Vec<f64>; 2]>,
    pub reservoir_level: Vec<Vec<f64>>,
    pub battery_level: Vec<Vec<f64>>,
    pub shed: Vec<Vec<f64>>,
    pub planned_outage: Vec<Vec<f64>>,
    pub unplanned_outage: Option<Vec<Vec<f64>>>,
    pub loss_of_load: Option<Vec<Vec<f64>>>,
}

impl ScenarioDispatch {
    pub fn total_shed(&self) -> f64 {
        self.shed.iter().map(|col| col.iter().sum::<f64>()).sum()
    }

    pub fn total_loss_of_load(&self) -> f64 {
        self.loss_of_load
            .as_ref()
            .map(|series| series.iter().map(|col| col.iter().sum::<f64>()).sum())
            .unwrap_or(0.0)
    }
}

/// An optimal plan: capacities, cost breakdown and the operational detail
/// behind them. Serialization keeps the summary and drops the dispatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSolution {
    pub capacity: CapacityMix,
    /// Total nuclear capacity divided by the unit size.
    pub n_equivalent: f64,
    /// Levelized total system cost, currency/year.
    pub sc: f64,
    pub breakdown: CostBreakdown,
    #[serde(skip)]
    pub dispatch: Vec<ScenarioDispatch>,
}

/// Build the weather-uncertainty LP for the given case. With `fixed_n` the
/// total nuclear capacity is pinned to `m * fixed_n` (the fleet-size
/// sensitivity variant).
pub fn build_wu(case: &SteppedCase, fixed_n: Option<u32>) -> Result<Model> {
    let spec = DispatchSpec {
        case,
        name: match fixed_n {
            Some(n) => format!("wu_n{n}"),
            None => "wu".to_string(),
        },
        fixed_total_nuclear_units: fixed_n,
        fixed_capacities: None,
        forced_outage_units: None,
        loss_of_load: false,
        invest_in_objective: true,
    };
    Ok(build_dispatch_model(&spec)?.0)
}

/// Solve the weather-uncertainty model and return the audited plan.
pub fn solve_wu(
    case: &SteppedCase,
    solver: &dyn Solver,
    opts: &SolveOptions,
    fixed_n: Option<u32>,
) -> Result<PlanSolution> {
    let spec = DispatchSpec {
        case,
        name: match fixed_n {
            Some(n) => format!("wu_n{n}"),
            None => "wu".to_string(),
        },
        fixed_total_nuclear_units: fixed_n,
        fixed_capacities: None,
        forced_outage_units: None,
        loss_of_load: false,
        invest_in_objective: true,
    };
    solve_dispatch(case, solver, opts, &spec, None)
}

/// Build, solve, extract and audit one dispatch-family model.
pub(crate) fn solve_dispatch(
    case: &SteppedCase,
    solver: &dyn Solver,
    opts: &SolveOptions,
    spec: &DispatchSpec,
    audit_outage_units: Option<&[Vec<f64>]>,
) -> Result<PlanSolution> {
    let (model, layout) = build_dispatch_model(spec)?;
    let result = solver.solve(&model, opts)?;
    let result = result
        .expect_optimal(&diagnostic_context(&model))
        .map_err(|e| annotate_infeasible(e, spec))?;
    let plan = extract_plan(case, &layout, &result, spec)?;
    let report = audit_plan(
        case,
        &plan,
        audit_outage_units.or(spec.forced_outage_units),
        spec.fixed_capacities.is_none(),
    )?;
    let tol_mw = 1e-4;
    if !report.within(tol_mw) {
        return Err(Error::Internal(format!(
            "optimal solution of '{}' failed the residual audit: {}",
            model.name(),
            report.summary()
        )));
    }
    Ok(plan)
}

fn diagnostic_context(model: &Model) -> String {
    // Constraint-group histogram keyed by name prefix; cheap substitute for
    // an irreducible infeasible subsystem.
    let mut groups: std::collections::BTreeMap<&str, usize> = std::collections::BTreeMap::new();
    for con in model.constraints() {
        let prefix = con.name.split('_').next().unwrap_or("other");
        *groups.entry(prefix).or_insert(0) += 1;
    }
    let summary: Vec<String> = groups.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{} [constraint groups: {}]", model.name(), summary.join(", "))
}

fn annotate_infeasible(err: Error, spec: &DispatchSpec) -> Error {
    if let Error::Solver { context, detail } = err {
        let mut hints = Vec::new();
        if let Some(n) = spec.fixed_total_nuclear_units {
            hints.push(format!("fixed fleet size n={n}"));
        }
        if spec.forced_outage_units.is_some() {
            hints.push("forced unplanned outages active".to_string());
        }
        if spec.fixed_capacities.is_some() {
            hints.push("capacities fixed".to_string());
        }
        let detail = if hints.is_empty() { detail } else { format!("{detail}; {}", hints.join(", ")) };
        Error::Solver { context, detail }
    } else {
        err
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::{aggregate_to_steps, generate_synthetic_case, CaseData};
    use crate::lp::HighsSolver;

    /// One-region case with flat load and only gas allowed: the optimal plan
    /// is exactly peak-load worth of gas and no shedding.
    fn gas_only_case(load_mw: f64) -> CaseData {
        let mut case = generate_synthetic_case(1, 2, 1).unwrap();
        case.regions.truncate(1);
        case.links.clear();
        case.regions[0].max_capacity.solar = 0.0;
        case.regions[0].max_capacity.wind = 0.0;
        case.regions[0].max_capacity.hydro = 0.0;
        case.regions[0].max_capacity.nuclear = 0.0;
        case.regions[0].max_capacity.battery = 0.0;
        case.regions[0].max_capacity.inverter = 0.0;
        case.regions[0].hydro_reservoir_cap = 0.0;
        let scenario = &mut case.scenarios[0];
        scenario.load.truncate(1);
        scenario.cf_wind.truncate(1);
        scenario.cf_solar.truncate(1);
        scenario.inflow.truncate(1);
        scenario.load[0].fill(load_mw);
        scenario.inflow[0].fill(0.0);
        case
    }

    #[test]
    fn gas_only_flat_load_builds_peak_capacity() {
        let case = gas_only_case(1000.0);
        let stepped = aggregate_to_steps(&case, 168).unwrap();
        let solver = HighsSolver::default();
        let plan = solve_wu(&stepped, &solver, &SolveOptions::default(), None).unwrap();
        // Shedding at 1000/MWh is far above the full cost of gas energy, so
        // the cheapest feasible plan covers peak load exactly.
        assert!((plan.capacity.get(0, Technology::Gas) - 1000.0).abs() < 1e-3);
        let shed = plan.dispatch[0].total_shed();
        assert!(shed.abs() < 1e-6, "unexpected shedding {shed}");
        assert!((plan.sc - plan.breakdown.total()).abs() <= 1e-6 * plan.sc.abs());
    }

    #[test]
    fn zero_shed_cap_forces_zero_shedding() {
        let mut case = gas_only_case(800.0);
        case.scalars.max_shed_fraction = 0.0;
        let stepped = aggregate_to_steps(&case, 168).unwrap();
        let solver = HighsSolver::default();
        let plan = solve_wu(&stepped, &solver, &SolveOptions::default(), None).unwrap();
        assert!(plan.dispatch[0].total_shed().abs() < 1e-9);
    }

    #[test]
    fn zero_planned_outage_fraction_schedules_none() {
        let mut case = generate_synthetic_case(2, 2, 1).unwrap();
        case.scalars.planned_outage_fraction = 0.0;
        let stepped = aggregate_to_steps(&case, 168).unwrap();
        let solver = HighsSolver::default();
        let plan = solve_wu(&stepped, &solver, &SolveOptions::default(), Some(2)).unwrap();
        let planned: f64 = plan.dispatch[0]
            .planned_outage
            .iter()
            .map(|col| col.iter().sum::<f64>())
            .sum();
        assert!(planned.abs() < 1e-6);
    }

    #[test]
    fn duplicated_scenario_matches_single_scenario_solve() {
        let case = generate_synthetic_case(4, 2, 1).unwrap();
        let single = aggregate_to_steps(&case, 168).unwrap();

        let mut doubled = case.clone();
        let mut copy = doubled.scenarios[0].clone();
        copy.id = "Y1b".into();
        copy.probability = 0.5;
        doubled.scenarios[0].probability = 0.5;
        doubled.scenarios.push(copy);
        let doubled = aggregate_to_steps(&doubled, 168).unwrap();

        let solver = HighsSolver::default();
        let opts = SolveOptions::default();
        let a = solve_wu(&single, &solver, &opts, None).unwrap();
        let b = solve_wu(&doubled, &solver, &opts, None).unwrap();
        assert!(
            (a.sc - b.sc).abs() <= 1e-6 * a.sc.abs(),
            "duplicated scenario changed the objective: {} vs {}",
            a.sc,
            b.sc
        );
    }

    #[test]
    fn zero_probability_scenario_leaves_objective_unchanged() {
        // A zero-weight copy of an existing year adds only redundant rows.
        let case = generate_synthetic_case(4, 2, 2).unwrap();
        let base = aggregate_to_steps(&case.with_scenarios(&[(0, 1.0)]).unwrap(), 168).unwrap();
        let padded = aggregate_to_steps(&case.with_scenarios(&[(0, 1.0), (0, 0.0)]).unwrap(), 168).unwrap();
        let solver = HighsSolver::default();
        let opts = SolveOptions::default();
        let a = solve_wu(&base, &solver, &opts, None).unwrap();
        let b = solve_wu(&padded, &solver, &opts, None).unwrap();
        assert!((a.sc - b.sc).abs() <= 1e-5 * a.sc.abs());
    }

    #[test]
    fn fixed_n_beyond_potential_is_rejected() {
        let case = generate_synthetic_case(3, 2, 1).unwrap();
        let stepped = aggregate_to_steps(&case, 730).unwrap();
        // Regions carry at most ~5 GW of nuclear potential each.
        let err = build_wu(&stepped, Some(1000)).unwrap_err();
        assert!(err.to_string().contains("nuclear"));
    }
}
