//! Residual audit of solved plans, independent of the LP layer.
//!
//! Every constraint family is re-evaluated from the primal values stored in
//! the plan. Violations are reported on a MW scale (energy residuals divided
//! by the step length) so one tolerance covers all step sizes. The cost
//! identity is checked in relative terms.

use super::{PlanSolution, ScenarioDispatch};
use crate::case::{SteppedCase, Technology};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Worst residual per constraint family, MW scale unless stated.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub families: BTreeMap<&'static str, f64>,
    /// |reported SC - recomputed SC| / max(1, |SC|).
    pub cost_identity_rel: f64,
    /// Worst storage wrap-around violation relative to the storage cap.
    pub cyclicity_rel: f64,
}

impl AuditReport {
    pub fn max_violation_mw(&self) -> f64 {
        self.families.values().cloned().fold(0.0, f64::max)
    }

    /// All families within `tol_mw`, cost identity within 1e-6 relative,
    /// storage cyclicity within 1e-6 of the cap.
    pub fn within(&self, tol_mw: f64) -> bool {
        self.max_violation_mw() <= tol_mw && self.cost_identity_rel <= 1e-6 && self.cyclicity_rel <= 1e-6
    }

    pub fn summary(&self) -> String {
        let mut parts: Vec<String> = self
            .families
            .iter()
            .map(|(k, v)| format!("{k}={v:.3e}"))
            .collect();
        parts.push(format!("cost_identity_rel={:.3e}", self.cost_identity_rel));
        parts.push(format!("cyclicity_rel={:.3e}", self.cyclicity_rel));
        parts.join(", ")
    }
}

fn violation(entry: &mut f64, amount: f64) {
    if amount > *entry {
        *entry = amount;
    }
}

/// Re-evaluate every constraint family on the plan's dispatch. For plans
/// solved with forced unplanned outages, pass the per-`[scenario][step]`
/// offline-unit counts so the outage-definition rows can be checked.
/// `enforce_capacity_bounds` is false for simulation plans, where the given
/// mix replaces the per-region capacity limits.
pub fn audit_plan(
    case: &SteppedCase,
    plan: &PlanSolution,
    forced_outage_units: Option<&[Vec<f64>]>,
    enforce_capacity_bounds: bool,
) -> Result<AuditReport> {
    let ts = case.ts as f64;
    let n_steps = case.n_steps;
    let scalars = &case.scalars;
    let eta_inv = case.technologies.inverter.efficiency;

    if plan.dispatch.len() != case.scenarios.len() {
        return Err(Error::Internal(format!(
            "audit: plan has {} dispatch blocks for {} scenarios",
            plan.dispatch.len(),
            case.scenarios.len()
        )));
    }

    let mut families: BTreeMap<&'static str, f64> = BTreeMap::new();
    for key in [
        "balance",
        "shed_cap",
        "planned_total",
        "reservoir",
        "reservoir_cap",
        "battery",
        "battery_cap",
        "nuclear_cap",
        "wind_cap",
        "solar_cap",
        "gas_cap",
        "hydro_cap",
        "inverter_cap",
        "battery_size",
        "trans_cap",
        "capacity_bounds",
        "outage_def",
        "nonnegativity",
    ] {
        families.insert(key, 0.0);
    }
    let mut cyclicity_rel: f64 = 0.0;

    // Capacity bounds.
    for (r, region) in case.regions.iter().enumerate() {
        for tech in Technology::ALL {
            let c = plan.capacity.get(r, tech);
            if enforce_capacity_bounds {
                let max = region.max_capacity.get(tech);
                violation(families.get_mut("capacity_bounds").unwrap(), c - max);
            }
            violation(families.get_mut("capacity_bounds").unwrap(), -c);
        }
        let dt_violation = scalars.battery_discharge_hours * plan.capacity.get(r, Technology::Inverter)
            - plan.capacity.get(r, Technology::Battery);
        violation(families.get_mut("battery_size").unwrap(), dt_violation / ts.max(1.0));
    }

    let mut adjacent: Vec<Vec<(usize, bool)>> = vec![Vec::new(); case.n_regions()];
    for (l, link) in case.links.iter().enumerate() {
        adjacent[link.from].push((l, true));
        adjacent[link.to].push((l, false));
    }

    for (s, scenario) in case.scenarios.iter().enumerate() {
        let d: &ScenarioDispatch = &plan.dispatch[s];
        for r in 0..case.n_regions() {
            let reservoir_cap = case.regions[r].hydro_reservoir_cap;
            let battery_cap = plan.capacity.get(r, Technology::Battery);
            let mut planned_sum = 0.0;
            for t in 0..n_steps {
                let prev = if t == 0 { n_steps - 1 } else { t - 1 };
                let gen = |tech: Technology| d.generation[r][tech.index()][t];

                // Balance: supply - demand + shed (+ lol) must be >= 0.
                let mut supply = 0.0;
                for tech in Technology::GENERATORS {
                    supply += gen(tech);
                }
                supply += gen(Technology::Inverter) - gen(Technology::Battery);
                for &(l, outgoing) in &adjacent[r] {
                    let eff = case.derived.link_efficiency[l];
                    let (out_dir, in_dir) = if outgoing { (0, 1) } else { (1, 0) };
                    supply += eff * d.flow[l][in_dir][t] - d.flow[l][out_dir][t];
                }
                let shed = d.shed[r][t];
                let lol = d.loss_of_load.as_ref().map(|x| x[r][t]).unwrap_or(0.0);
                let residual = supply + shed + lol - ts * scenario.load[r][t];
                violation(families.get_mut("balance").unwrap(), -residual / ts);

                violation(
                    families.get_mut("shed_cap").unwrap(),
                    (shed - scalars.max_shed_fraction * ts * scenario.load[r][t]) / ts,
                );

                // Storage balances; the t=0 row is the cyclic wrap.
                let res_residual = d.reservoir_level[r][t]
                    - d.reservoir_level[r][prev]
                    - ts * scenario.inflow[r][t]
                    + gen(Technology::Hydro);
                violation(families.get_mut("reservoir").unwrap(), res_residual / ts);
                let bat_residual = d.battery_level[r][t]
                    - d.battery_level[r][prev]
                    - eta_inv * gen(Technology::Battery)
                    + gen(Technology::Inverter) / eta_inv;
                violation(families.get_mut("battery").unwrap(), bat_residual / ts);
                if t == 0 {
                    if reservoir_cap > 0.0 {
                        cyclicity_rel = cyclicity_rel.max(res_residual.max(0.0) / reservoir_cap);
                    }
                    if battery_cap > 0.0 {
                        cyclicity_rel = cyclicity_rel.max(bat_residual.max(0.0) / battery_cap);
                    }
                }

                violation(
                    families.get_mut("reservoir_cap").unwrap(),
                    (d.reservoir_level[r][t] - reservoir_cap) / ts,
                );
                violation(
                    families.get_mut("battery_cap").unwrap(),
                    (d.battery_level[r][t] - battery_cap) / ts,
                );

                let unplanned = d.unplanned_outage.as_ref().map(|x| x[r][t]).unwrap_or(0.0);
                violation(
                    families.get_mut("nuclear_cap").unwrap(),
                    (gen(Technology::Nuclear) + d.planned_outage[r][t] + unplanned
                        - ts * plan.capacity.get(r, Technology::Nuclear))
                        / ts,
                );
                violation(
                    families.get_mut("wind_cap").unwrap(),
                    (gen(Technology::Wind) - ts * scenario.cf_wind[r][t] * plan.capacity.get(r, Technology::Wind)) / ts,
                );
                violation(
                    families.get_mut("solar_cap").unwrap(),
                    (gen(Technology::Solar) - ts * scenario.cf_solar[r][t] * plan.capacity.get(r, Technology::Solar)) / ts,
                );
                violation(
                    families.get_mut("gas_cap").unwrap(),
                    (gen(Technology::Gas) - ts * plan.capacity.get(r, Technology::Gas)) / ts,
                );
                violation(
                    families.get_mut("hydro_cap").unwrap(),
                    (gen(Technology::Hydro) - ts * plan.capacity.get(r, Technology::Hydro)) / ts,
                );
                violation(
                    families.get_mut("inverter_cap").unwrap(),
                    (gen(Technology::Inverter) + gen(Technology::Battery)
                        - ts * plan.capacity.get(r, Technology::Inverter))
                        / ts,
                );

                for tech in Technology::ALL {
                    violation(families.get_mut("nonnegativity").unwrap(), -gen(tech) / ts);
                }
                violation(families.get_mut("nonnegativity").unwrap(), -shed / ts);
                violation(families.get_mut("nonnegativity").unwrap(), -d.planned_outage[r][t] / ts);
                violation(families.get_mut("nonnegativity").unwrap(), -lol / ts);

                planned_sum += d.planned_outage[r][t];
            }

            let planned_target =
                scalars.planned_outage_fraction * n_steps as f64 * ts * plan.capacity.get(r, Technology::Nuclear);
            violation(
                families.get_mut("planned_total").unwrap(),
                (planned_sum - planned_target).abs() / (n_steps as f64 * ts),
            );
        }

        for (l, _) in case.links.iter().enumerate() {
            for t in 0..n_steps {
                violation(
                    families.get_mut("trans_cap").unwrap(),
                    (d.flow[l][0][t] + d.flow[l][1][t] - ts * plan.capacity.links[l].mw) / ts,
                );
            }
        }

        if let Some(forced) = forced_outage_units {
            let unplanned = d.unplanned_outage.as_ref().ok_or_else(|| {
                Error::Internal("audit: forced outages given but plan has no unplanned-outage detail".into())
            })?;
            for t in 0..n_steps {
                let total: f64 = (0..case.n_regions()).map(|r| unplanned[r][t]).sum();
                let target = scalars.nuclear_unit_mw * ts * forced[s][t];
                violation(families.get_mut("outage_def").unwrap(), (total - target).abs() / ts);
            }
        }
    }

    // Cost identity against the recomputed breakdown. For simulation plans
    // the reported SC additionally carries the loss-of-load penalty.
    let mut recomputed = plan.breakdown.total();
    for d in &plan.dispatch {
        recomputed += d.probability * scalars.lol_penalty * d.total_loss_of_load();
    }
    let cost_identity_rel = (plan.sc - recomputed).abs() / plan.sc.abs().max(1.0);

    Ok(AuditReport { families, cost_identity_rel, cyclicity_rel })
}
