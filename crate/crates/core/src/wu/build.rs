//! Constraint generator shared by the stochastic model, the robust master
//! problem, and the simulation problem.

use super::{CapacityMix, CostBreakdown, LinkCapacity, PlanSolution, RegionCapacities, ScenarioDispatch};
use crate::case::{SteppedCase, Technology};
use crate::error::{Error, Result};
use crate::lp::{ConstraintSense, Model, ObjectiveSense, SolveResult, VarId};

/// What to build on top of the common dispatch constraints.
pub(crate) struct DispatchSpec<'a> {
    pub case: &'a SteppedCase,
    pub name: String,
    /// Pin total nuclear capacity to `m * n` units.
    pub fixed_total_nuclear_units: Option<u32>,
    /// Fix every capacity variable to the given mix (simulation).
    pub fixed_capacities: Option<&'a CapacityMix>,
    /// Units forced offline per `[scenario][step]`; adds unplanned-outage
    /// variables distributed across regions.
    pub forced_outage_units: Option<&'a [Vec<f64>]>,
    /// Add a loss-of-load slack to the balance, priced at the penalty cost.
    pub loss_of_load: bool,
    /// Include annualized investment and fixed costs in the objective.
    pub invest_in_objective: bool,
}

/// Variable ids by role; indices are `[scenario][region][step]` unless noted.
pub(crate) struct VarLayout {
    /// `[region][tech]`.
    pub cap: Vec<[VarId; 7]>,
    /// `[link]`.
    pub capt: Vec<VarId>,
    /// `[scenario][region][tech][step]`.
    pub gen: Vec<Vec<Vec<Vec<VarId>>>>,
    pub planned: Vec<Vec<Vec<VarId>>>,
    pub unplanned: Option<Vec<Vec<Vec<VarId>>>>,
    pub reservoir: Vec<Vec<Vec<VarId>>>,
    pub battery: Vec<Vec<Vec<VarId>>>,
    pub shed: Vec<Vec<Vec<VarId>>>,
    pub lol: Option<Vec<Vec<Vec<VarId>>>>,
    /// `[scenario][link][direction][step]`; direction 0 is from->to.
    pub flow: Vec<Vec<[Vec<VarId>; 2]>>,
}

/// Fuel-plus-variable cost and carbon cost per MWh generated, by tech index.
pub(crate) fn energy_cost_rates(case: &SteppedCase) -> ([f64; 7], [f64; 7]) {
    let mut gen_cost = [0.0; 7];
    let mut carbon_cost = [0.0; 7];
    for tech in Technology::ALL {
        let p = case.technologies.get(tech);
        gen_cost[tech.index()] = p.fuel_cost / p.efficiency + p.var_cost;
        carbon_cost[tech.index()] = case.scalars.carbon_tax * p.emission_factor / p.efficiency;
    }
    // Battery charging carries no operational cost or emissions.
    gen_cost[Technology::Battery.index()] = 0.0;
    carbon_cost[Technology::Battery.index()] = 0.0;
    (gen_cost, carbon_cost)
}

/// Annualized investment-plus-fixed cost per MW (battery: per MWh), by tech.
pub(crate) fn capacity_cost_rates(case: &SteppedCase) -> [f64; 7] {
    let mut rates = [0.0; 7];
    for tech in Technology::ALL {
        let p = case.technologies.get(tech);
        rates[tech.index()] = p.inv_cost * case.derived.crf[tech.index()] + p.fixed_cost;
    }
    rates
}

pub(crate) fn build_dispatch_model(spec: &DispatchSpec) -> Result<(Model, VarLayout)> {
    let case = spec.case;
    let n_regions = case.n_regions();
    let n_steps = case.n_steps;
    let n_scenarios = case.scenarios.len();
    let ts = case.ts as f64;
    let scalars = &case.scalars;
    let unit = scalars.nuclear_unit_mw;

    if let Some(n) = spec.fixed_total_nuclear_units {
        let max_total: f64 = case.regions.iter().map(|r| r.max_capacity.nuclear).sum();
        if unit * n as f64 > max_total + 1e-9 {
            return Err(Error::ModelBuild(format!(
                "fleet of {n} units needs {} MW of nuclear but the regions allow {max_total} MW",
                unit * n as f64
            )));
        }
    }
    if let Some(forced) = spec.forced_outage_units {
        if forced.len() != n_scenarios || forced.iter().any(|row| row.len() != n_steps) {
            return Err(Error::ModelBuild(format!(
                "forced outage table must be {n_scenarios} scenarios x {n_steps} steps"
            )));
        }
    }
    if let Some(mix) = spec.fixed_capacities {
        if mix.regions.len() != n_regions || mix.links.len() != case.links.len() {
            return Err(Error::ModelBuild(
                "fixed capacity mix does not match the case's regions/links".into(),
            ));
        }
        let dt = scalars.battery_discharge_hours;
        for (r, caps) in mix.regions.iter().enumerate() {
            if dt * caps.inverter > caps.battery_mwh + 1e-6 {
                return Err(Error::ModelBuild(format!(
                    "fixed mix violates battery sizing in region {}: {} h x {} MW > {} MWh",
                    case.regions[r].id, dt, caps.inverter, caps.battery_mwh
                )));
            }
        }
    }

    let mut model = Model::new(spec.name.clone());
    model.set_objective_sense(ObjectiveSense::Minimize);
    let (gen_cost, carbon_cost) = energy_cost_rates(case);
    let cap_cost = capacity_cost_rates(case);

    // Capacity variables.
    let mut cap = Vec::with_capacity(n_regions);
    for (r, region) in case.regions.iter().enumerate() {
        let mut row = [VarId(0); 7];
        for tech in Technology::ALL {
            let (lo, hi) = match spec.fixed_capacities {
                Some(mix) => {
                    let v = mix.get(r, tech);
                    (v, v)
                }
                None => (0.0, region.max_capacity.get(tech)),
            };
            let id = model.add_continuous(format!("cap_{}_{}", region.id, tech.name()), lo, hi)?;
            if spec.invest_in_objective {
                model.add_objective_term(id, cap_cost[tech.index()]);
            }
            row[tech.index()] = id;
        }
        cap.push(row);
    }
    let mut capt = Vec::with_capacity(case.links.len());
    for (l, link) in case.links.iter().enumerate() {
        let (lo, hi) = match spec.fixed_capacities {
            Some(mix) => (mix.links[l].mw, mix.links[l].mw),
            None => (0.0, f64::INFINITY),
        };
        let id = model.add_continuous(
            format!("capt_{}_{}", case.regions[link.from].id, case.regions[link.to].id),
            lo,
            hi,
        )?;
        if spec.invest_in_objective {
            model.add_objective_term(
                id,
                scalars.trans_cost_per_mw_km * case.derived.crf_trans * link.distance_km,
            );
        }
        capt.push(id);
    }

    // Operational variables per scenario.
    let mut gen = Vec::with_capacity(n_scenarios);
    let mut planned = Vec::with_capacity(n_scenarios);
    let mut unplanned = spec.forced_outage_units.map(|_| Vec::with_capacity(n_scenarios));
    let mut reservoir = Vec::with_capacity(n_scenarios);
    let mut battery = Vec::with_capacity(n_scenarios);
    let mut shed = Vec::with_capacity(n_scenarios);
    let mut lol = spec.loss_of_load.then(|| Vec::with_capacity(n_scenarios));
    let mut flow = Vec::with_capacity(n_scenarios);

    for (s, scenario) in case.scenarios.iter().enumerate() {
        let pi = scenario.probability;
        let mut gen_s = Vec::with_capacity(n_regions);
        let mut planned_s = Vec::with_capacity(n_regions);
        let mut unplanned_s = unplanned.is_some().then(Vec::new);
        let mut reservoir_s = Vec::with_capacity(n_regions);
        let mut battery_s = Vec::with_capacity(n_regions);
        let mut shed_s = Vec::with_capacity(n_regions);
        let mut lol_s = lol.is_some().then(Vec::new);

        for (r, region) in case.regions.iter().enumerate() {
            let mut gen_r = Vec::with_capacity(7);
            for tech in Technology::ALL {
                let mut ids = Vec::with_capacity(n_steps);
                for t in 0..n_steps {
                    let id = model.add_continuous(
                        format!("g_s{s}_{}_{}_t{t}", region.id, tech.letter()),
                        0.0,
                        f64::INFINITY,
                    )?;
                    let rate = pi * (gen_cost[tech.index()] + carbon_cost[tech.index()]);
                    if rate != 0.0 {
                        model.add_objective_term(id, rate);
                    }
                    ids.push(id);
                }
                gen_r.push(ids);
            }
            gen_s.push(gen_r);

            let mut planned_r = Vec::with_capacity(n_steps);
            let mut unplanned_r = unplanned_s.is_some().then(|| Vec::with_capacity(n_steps));
            let mut reservoir_r = Vec::with_capacity(n_steps);
            let mut battery_r = Vec::with_capacity(n_steps);
            let mut shed_r = Vec::with_capacity(n_steps);
            let mut lol_r = lol_s.is_some().then(|| Vec::with_capacity(n_steps));
            for t in 0..n_steps {
                planned_r.push(model.add_continuous(
                    format!("op_s{s}_{}_t{t}", region.id),
                    0.0,
                    f64::INFINITY,
                )?);
                if let Some(vec) = unplanned_r.as_mut() {
                    vec.push(model.add_continuous(
                        format!("ou_s{s}_{}_t{t}", region.id),
                        0.0,
                        f64::INFINITY,
                    )?);
                }
                reservoir_r.push(model.add_continuous(
                    format!("rl_s{s}_{}_t{t}", region.id),
                    0.0,
                    region.hydro_reservoir_cap,
                )?);
                battery_r.push(model.add_continuous(
                    format!("bl_s{s}_{}_t{t}", region.id),
                    0.0,
                    f64::INFINITY,
                )?);
                let shed_cap = scalars.max_shed_fraction * ts * scenario.load[r][t];
                let shed_id =
                    model.add_continuous(format!("ls_s{s}_{}_t{t}", region.id), 0.0, shed_cap)?;
                if scalars.shed_cost != 0.0 {
                    model.add_objective_term(shed_id, pi * scalars.shed_cost);
                }
                shed_r.push(shed_id);
                if let Some(vec) = lol_r.as_mut() {
                    let id = model.add_continuous(
                        format!("ll_s{s}_{}_t{t}", region.id),
                        0.0,
                        f64::INFINITY,
                    )?;
                    model.add_objective_term(id, pi * scalars.lol_penalty);
                    vec.push(id);
                }
            }
            planned_s.push(planned_r);
            if let Some(vec) = unplanned_s.as_mut() {
                vec.push(unplanned_r.unwrap());
            }
            reservoir_s.push(reservoir_r);
            battery_s.push(battery_r);
            shed_s.push(shed_r);
            if let Some(vec) = lol_s.as_mut() {
                vec.push(lol_r.unwrap());
            }
        }

        let mut flow_s = Vec::with_capacity(case.links.len());
        for link in &case.links {
            let a = &case.regions[link.from].id;
            let b = &case.regions[link.to].id;
            let mut fwd = Vec::with_capacity(n_steps);
            let mut rev = Vec::with_capacity(n_steps);
            for t in 0..n_steps {
                fwd.push(model.add_continuous(format!("f_s{s}_{a}_{b}_t{t}"), 0.0, f64::INFINITY)?);
                rev.push(model.add_continuous(format!("f_s{s}_{b}_{a}_t{t}"), 0.0, f64::INFINITY)?);
            }
            flow_s.push([fwd, rev]);
        }

        gen.push(gen_s);
        planned.push(planned_s);
        if let Some(vec) = unplanned.as_mut() {
            vec.push(unplanned_s.unwrap());
        }
        reservoir.push(reservoir_s);
        battery.push(battery_s);
        shed.push(shed_s);
        if let Some(vec) = lol.as_mut() {
            vec.push(lol_s.unwrap());
        }
        flow.push(flow_s);
    }

    let layout = VarLayout { cap, capt, gen, planned, unplanned, reservoir, battery, shed, lol, flow };

    // Adjacency: links touching each region, with their orientation.
    let mut adjacent: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n_regions];
    for (l, link) in case.links.iter().enumerate() {
        adjacent[link.from].push((l, true));
        adjacent[link.to].push((l, false));
    }

    let eta_inv = case.technologies.inverter.efficiency;
    let beta = scalars.planned_outage_fraction;
    let dt = scalars.battery_discharge_hours;

    for (s, scenario) in case.scenarios.iter().enumerate() {
        for r in 0..case.n_regions() {
            // Supply balance per step.
            for t in 0..n_steps {
                let mut terms: Vec<(VarId, f64)> = Vec::with_capacity(16);
                for tech in Technology::GENERATORS {
                    terms.push((layout.gen[s][r][tech.index()][t], 1.0));
                }
                terms.push((layout.gen[s][r][Technology::Inverter.index()][t], 1.0));
                terms.push((layout.gen[s][r][Technology::Battery.index()][t], -1.0));
                for &(l, outgoing) in &adjacent[r] {
                    let eff = case.derived.link_efficiency[l];
                    let (out_dir, in_dir) = if outgoing { (0, 1) } else { (1, 0) };
                    terms.push((layout.flow[s][l][out_dir][t], -1.0));
                    terms.push((layout.flow[s][l][in_dir][t], eff));
                }
                terms.push((layout.shed[s][r][t], 1.0));
                if let Some(lol) = &layout.lol {
                    terms.push((lol[s][r][t], 1.0));
                }
                model.add_constraint(
                    format!("balance_s{s}_r{r}_t{t}"),
                    terms,
                    ConstraintSense::Ge,
                    ts * scenario.load[r][t],
                )?;
            }

            // Annual planned-outage energy requirement.
            {
                let mut terms: Vec<(VarId, f64)> = (0..n_steps).map(|t| (layout.planned[s][r][t], 1.0)).collect();
                terms.push((layout.cap[r][Technology::Nuclear.index()], -beta * n_steps as f64 * ts));
                model.add_constraint(format!("optot_s{s}_r{r}"), terms, ConstraintSense::Eq, 0.0)?;
            }

            for t in 0..n_steps {
                let prev = if t == 0 { n_steps - 1 } else { t - 1 };

                // Reservoir balance (spill allowed through the inequality).
                model.add_constraint(
                    format!("resbal_s{s}_r{r}_t{t}"),
                    vec![
                        (layout.reservoir[s][r][t], 1.0),
                        (layout.reservoir[s][r][prev], -1.0),
                        (layout.gen[s][r][Technology::Hydro.index()][t], 1.0),
                    ],
                    ConstraintSense::Le,
                    ts * scenario.inflow[r][t],
                )?;

                // Battery balance with cyclic wrap.
                model.add_constraint(
                    format!("batbal_s{s}_r{r}_t{t}"),
                    vec![
                        (layout.battery[s][r][t], 1.0),
                        (layout.battery[s][r][prev], -1.0),
                        (layout.gen[s][r][Technology::Battery.index()][t], -eta_inv),
                        (layout.gen[s][r][Technology::Inverter.index()][t], 1.0 / eta_inv),
                    ],
                    ConstraintSense::Le,
                    0.0,
                )?;

                // Battery level within installed storage.
                model.add_constraint(
                    format!("batlevel_s{s}_r{r}_t{t}"),
                    vec![
                        (layout.battery[s][r][t], 1.0),
                        (layout.cap[r][Technology::Battery.index()], -1.0),
                    ],
                    ConstraintSense::Le,
                    0.0,
                )?;

                // Nuclear availability: capacity minus planned (and forced
                // unplanned) outages.
                let mut terms = vec![
                    (layout.gen[s][r][Technology::Nuclear.index()][t], 1.0),
                    (layout.planned[s][r][t], 1.0),
                    (layout.cap[r][Technology::Nuclear.index()], -ts),
                ];
                if let Some(unplanned) = &layout.unplanned {
                    terms.push((unplanned[s][r][t], 1.0));
                }
                model.add_constraint(format!("nuccap_s{s}_r{r}_t{t}"), terms, ConstraintSense::Le, 0.0)?;

                // Renewables limited by capacity factor; gas and hydro by
                // capacity; inverter throughput shared by charge and
                // discharge.
                model.add_constraint(
                    format!("wcap_s{s}_r{r}_t{t}"),
                    vec![
                        (layout.gen[s][r][Technology::Wind.index()][t], 1.0),
                        (layout.cap[r][Technology::Wind.index()], -ts * scenario.cf_wind[r][t]),
                    ],
                    ConstraintSense::Le,
                    0.0,
                )?;
                model.add_constraint(
                    format!("pcap_s{s}_r{r}_t{t}"),
                    vec![
                        (layout.gen[s][r][Technology::Solar.index()][t], 1.0),
                        (layout.cap[r][Technology::Solar.index()], -ts * scenario.cf_solar[r][t]),
                    ],
                    ConstraintSense::Le,
                    0.0,
                )?;
                model.add_constraint(
                    format!("gcap_s{s}_r{r}_t{t}"),
                    vec![
                        (layout.gen[s][r][Technology::Gas.index()][t], 1.0),
                        (layout.cap[r][Technology::Gas.index()], -ts),
                    ],
                    ConstraintSense::Le,
                    0.0,
                )?;
                model.add_constraint(
                    format!("hcap_s{s}_r{r}_t{t}"),
                    vec![
                        (layout.gen[s][r][Technology::Hydro.index()][t], 1.0),
                        (layout.cap[r][Technology::Hydro.index()], -ts),
                    ],
                    ConstraintSense::Le,
                    0.0,
                )?;
                model.add_constraint(
                    format!("icap_s{s}_r{r}_t{t}"),
                    vec![
                        (layout.gen[s][r][Technology::Inverter.index()][t], 1.0),
                        (layout.gen[s][r][Technology::Battery.index()][t], 1.0),
                        (layout.cap[r][Technology::Inverter.index()], -ts),
                    ],
                    ConstraintSense::Le,
                    0.0,
                )?;
            }
        }

        // Transmission capacity shared by both directions.
        for (l, _) in case.links.iter().enumerate() {
            for t in 0..n_steps {
                model.add_constraint(
                    format!("trcap_s{s}_l{l}_t{t}"),
                    vec![
                        (layout.flow[s][l][0][t], 1.0),
                        (layout.flow[s][l][1][t], 1.0),
                        (layout.capt[l], -ts),
                    ],
                    ConstraintSense::Le,
                    0.0,
                )?;
            }
        }

        // Forced unplanned outages: the regional split is free, the total is
        // pinned to the selected samples at each step's first hour.
        if let (Some(unplanned), Some(forced)) = (&layout.unplanned, spec.forced_outage_units) {
            let unit_mw = scalars.nuclear_unit_mw;
            for t in 0..n_steps {
                let terms: Vec<(VarId, f64)> =
                    (0..n_regions).map(|r| (unplanned[s][r][t], 1.0)).collect();
                model.add_constraint(
                    format!("oudef_s{s}_t{t}"),
                    terms,
                    ConstraintSense::Eq,
                    unit_mw * ts * forced[s][t],
                )?;
            }
        }
    }

    // Battery energy must cover the discharge time of the inverter.
    for r in 0..n_regions {
        model.add_constraint(
            format!("batsize_r{r}"),
            vec![
                (layout.cap[r][Technology::Inverter.index()], dt),
                (layout.cap[r][Technology::Battery.index()], -1.0),
            ],
            ConstraintSense::Le,
            0.0,
        )?;
    }

    // Fleet-size pin.
    if let Some(n) = spec.fixed_total_nuclear_units {
        let terms: Vec<(VarId, f64)> = (0..n_regions)
            .map(|r| (layout.cap[r][Technology::Nuclear.index()], 1.0))
            .collect();
        model.add_constraint("nfix", terms, ConstraintSense::Eq, unit * n as f64)?;
    }

    Ok((model, layout))
}

/// Pull the primal values into a [`PlanSolution`], recomputing the cost
/// breakdown from first principles.
pub(crate) fn extract_plan(
    case: &SteppedCase,
    layout: &VarLayout,
    result: &SolveResult,
    spec: &DispatchSpec,
) -> Result<PlanSolution> {
    let objective = result
        .objective
        .ok_or_else(|| Error::Internal("extract_plan called without an objective".into()))?;
    let n_regions = case.n_regions();
    let n_steps = case.n_steps;

    let mut regions = Vec::with_capacity(n_regions);
    for (r, region) in case.regions.iter().enumerate() {
        let mut caps = RegionCapacities {
            region: region.id.clone(),
            gas: 0.0,
            solar: 0.0,
            wind: 0.0,
            hydro: 0.0,
            nuclear: 0.0,
            battery_mwh: 0.0,
            inverter: 0.0,
        };
        for tech in Technology::ALL {
            caps.set(tech, result.value(layout.cap[r][tech.index()]));
        }
        regions.push(caps);
    }
    let links = case
        .links
        .iter()
        .zip(&layout.capt)
        .map(|(link, &id)| LinkCapacity {
            from: case.regions[link.from].id.clone(),
            to: case.regions[link.to].id.clone(),
            mw: result.value(id),
        })
        .collect();
    let capacity = CapacityMix { regions, links };

    let take3 = |ids: &Vec<Vec<VarId>>| -> Vec<Vec<f64>> {
        ids.iter()
            .map(|col| col.iter().map(|&id| result.value(id)).collect())
            .collect()
    };

    let mut dispatch = Vec::with_capacity(case.scenarios.len());
    for (s, scenario) in case.scenarios.iter().enumerate() {
        let generation: Vec<Vec<Vec<f64>>> = (0..n_regions)
            .map(|r| {
                Technology::ALL
                    .iter()
                    .map(|tech| {
                        (0..n_steps)
                            .map(|t| result.value(layout.gen[s][r][tech.index()][t]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let flow = layout.flow[s]
            .iter()
            .map(|dirs| {
                [
                    dirs[0].iter().map(|&id| result.value(id)).collect(),
                    dirs[1].iter().map(|&id| result.value(id)).collect(),
                ]
            })
            .collect();
        dispatch.push(ScenarioDispatch {
            scenario: scenario.id.clone(),
            probability: scenario.probability,
            generation,
            flow,
            reservoir_level: take3(&layout.reservoir[s]),
            battery_level: take3(&layout.battery[s]),
            shed: take3(&layout.shed[s]),
            planned_outage: take3(&layout.planned[s]),
            unplanned_outage: layout.unplanned.as_ref().map(|u| take3(&u[s])),
            loss_of_load: layout.lol.as_ref().map(|l| take3(&l[s])),
        });
    }

    let breakdown = recompute_breakdown(case, &capacity, &dispatch);
    let sc = if spec.invest_in_objective {
        objective
    } else {
        breakdown.investment + breakdown.fixed + objective
    };
    let n_equivalent = capacity.nuclear_total_mw() / case.scalars.nuclear_unit_mw;

    Ok(PlanSolution { capacity, n_equivalent, sc, breakdown, dispatch })
}

/// Cost components recomputed from capacities and dispatch, independent of
/// the objective vector.
pub(crate) fn recompute_breakdown(
    case: &SteppedCase,
    capacity: &CapacityMix,
    dispatch: &[ScenarioDispatch],
) -> CostBreakdown {
    let (gen_cost, carbon_cost) = energy_cost_rates(case);

    let mut investment = 0.0;
    let mut fixed = 0.0;
    for (r, _) in case.regions.iter().enumerate() {
        for tech in Technology::ALL {
            let p = case.technologies.get(tech);
            let c = capacity.get(r, tech);
            investment += p.inv_cost * case.derived.crf[tech.index()] * c;
            fixed += p.fixed_cost * c;
        }
    }
    for (l, link) in case.links.iter().enumerate() {
        investment += case.scalars.trans_cost_per_mw_km
            * case.derived.crf_trans
            * link.distance_km
            * capacity.links[l].mw;
    }

    let mut mean_operational = 0.0;
    let mut mean_emission_cost = 0.0;
    let mut mean_shed_cost = 0.0;
    for d in dispatch {
        let mut oc = 0.0;
        let mut ec = 0.0;
        for gen_r in &d.generation {
            for tech in Technology::ALL {
                if tech == Technology::Battery {
                    continue;
                }
                let energy: f64 = gen_r[tech.index()].iter().sum();
                oc += gen_cost[tech.index()] * energy;
                ec += carbon_cost[tech.index()] * energy;
            }
        }
        mean_operational += d.probability * oc;
        mean_emission_cost += d.probability * ec;
        mean_shed_cost += d.probability * case.scalars.shed_cost * d.total_shed();
    }

    CostBreakdown { investment, fixed, mean_operational, mean_emission_cost, mean_shed_cost }
}
