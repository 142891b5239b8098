//! The adjustable-robust model (weather plus nuclear-outage uncertainty),
//! solved by decomposition: a master LP with a fixed outage assignment, a
//! net-load-guided binary sub-problem that picks worst-case outage samples
//! per scenario, and a sweep over fleet sizes and confidence levels whose
//! simulated results are filtered into a Pareto front.

mod pareto;

pub use pareto::{is_mutually_non_dominated, pareto_update, ParetoEntry};

use crate::case::{SteppedCase, Technology};
use crate::error::{Error, Result};
use crate::lp::{ConstraintSense, Model, ObjectiveSense, SolveOptions, SolveStatus, Solver};
use crate::outage::{generate_outage_samples, quantile, Budgets, MonthlyOutageData, OutageMatrix};
use crate::rng::{SeedStreams, StreamPurpose};
use crate::sim::{dispatch_year, outage_counts_at_steps};
use crate::wu::{solve_dispatch, DispatchSpec, PlanSolution};
use rayon::prelude::*;

/// Chosen outage sample rows per scenario: the binary assignment of the
/// uncertainty set, materialized as `n` row indices per scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionAssignment {
    pub per_scenario: Vec<Vec<usize>>,
}

impl SelectionAssignment {
    pub fn new(per_scenario: Vec<Vec<usize>>) -> Self {
        SelectionAssignment { per_scenario }
    }

    /// Check the uncertainty-set constraints at step resolution: exactly
    /// `n` rows per scenario, step-weighted annual hours within `aop`, and
    /// at most `mop` simultaneous outages at any step.
    pub fn validate(&self, n: u32, budgets: &Budgets, view: &SteppedOutageView) -> Result<()> {
        for (s, rows) in self.per_scenario.iter().enumerate() {
            if rows.len() != n as usize {
                return Err(Error::invalid(format!(
                    "scenario {s}: {} rows selected, expected {n}",
                    rows.len()
                )));
            }
            let annual: u64 = rows
                .iter()
                .map(|&i| view.ts as u64 * view.row_steps(i).len() as u64)
                .sum();
            if annual > budgets.aop {
                return Err(Error::invalid(format!(
                    "scenario {s}: selected annual outage {annual} h exceeds AOP {}",
                    budgets.aop
                )));
            }
            let mut counts = vec![0u32; view.n_steps];
            for &i in rows {
                for &k in view.row_steps(i) {
                    counts[k as usize] += 1;
                }
            }
            if let Some((k, &c)) = counts.iter().enumerate().max_by_key(|&(_, &c)| c) {
                if c > budgets.mop {
                    return Err(Error::invalid(format!(
                        "scenario {s}: {c} simultaneous outages at step {k} exceed MOP {}",
                        budgets.mop
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outage indicators sampled at each step's first hour, precomputed per row.
#[derive(Debug, Clone)]
pub struct SteppedOutageView {
    /// Per row: ascending step indices at which the row is offline.
    steps_per_row: Vec<Vec<u32>>,
    pub n_steps: usize,
    pub ts: u32,
}

impl SteppedOutageView {
    pub fn new(matrix: &OutageMatrix, case: &SteppedCase) -> Self {
        let steps_per_row = matrix
            .rows()
            .iter()
            .map(|row| {
                case.step_first_hour
                    .iter()
                    .enumerate()
                    .filter(|&(_, &h)| row.is_out(h))
                    .map(|(k, _)| k as u32)
                    .collect()
            })
            .collect();
        SteppedOutageView { steps_per_row, n_steps: case.n_steps, ts: case.ts }
    }

    pub fn n_rows(&self) -> usize {
        self.steps_per_row.len()
    }

    pub fn row_steps(&self, row: usize) -> &[u32] {
        &self.steps_per_row[row]
    }

    /// Offline-unit count per `[scenario][step]` for a selection.
    pub fn forced_counts(&self, selection: &SelectionAssignment) -> Vec<Vec<f64>> {
        selection
            .per_scenario
            .iter()
            .map(|rows| {
                let mut counts = vec![0.0; self.n_steps];
                for &i in rows {
                    for &k in self.row_steps(i) {
                        counts[k as usize] += 1.0;
                    }
                }
                counts
            })
            .collect()
    }
}

/// Solve the master LP: the stochastic model with the fleet pinned to `n`
/// units and the selected outage samples forced in. `None` is the all-zero
/// assignment used to initialize the heuristic.
pub fn solve_master(
    case: &SteppedCase,
    solver: &dyn Solver,
    opts: &SolveOptions,
    n: u32,
    zbar: Option<&SelectionAssignment>,
    outages: &OutageMatrix,
) -> Result<PlanSolution> {
    let view = SteppedOutageView::new(outages, case);
    solve_master_with_view(case, solver, opts, n, zbar, &view)
}

pub(crate) fn solve_master_with_view(
    case: &SteppedCase,
    solver: &dyn Solver,
    opts: &SolveOptions,
    n: u32,
    zbar: Option<&SelectionAssignment>,
    view: &SteppedOutageView,
) -> Result<PlanSolution> {
    let n_scenarios = case.scenarios.len();
    let forced = match zbar {
        Some(selection) => {
            if selection.per_scenario.len() != n_scenarios {
                return Err(Error::invalid(format!(
                    "assignment covers {} scenarios, case has {n_scenarios}",
                    selection.per_scenario.len()
                )));
            }
            view.forced_counts(selection)
        }
        None => vec![vec![0.0; case.n_steps]; n_scenarios],
    };
    let spec = DispatchSpec {
        case,
        name: format!("master_n{n}"),
        fixed_total_nuclear_units: Some(n),
        fixed_capacities: None,
        forced_outage_units: Some(&forced),
        loss_of_load: false,
        invest_in_objective: true,
    };
    solve_dispatch(case, solver, opts, &spec, None)
}

/// Net residual load per step for one scenario: demand minus dispatchable
/// capacity, mean-capacity-factor renewables, and the nuclear fleet
/// surviving the simultaneous-outage budget; floored at zero and normalized
/// by `max(1, max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetLoadProfile {
    pub gamma: Vec<f64>,
    pub normalized: Vec<f64>,
}

pub fn net_load(
    case: &SteppedCase,
    scenario: usize,
    mix: &crate::wu::CapacityMix,
    n: u32,
    mop: u32,
) -> NetLoadProfile {
    let dispatchable: f64 = (0..case.n_regions())
        .map(|r| mix.get(r, Technology::Hydro) + mix.get(r, Technology::Gas))
        .sum();
    let renewable: f64 = (0..case.n_regions())
        .map(|r| {
            case.mean_cf(scenario, r, Technology::Wind) * mix.get(r, Technology::Wind)
                + case.mean_cf(scenario, r, Technology::Solar) * mix.get(r, Technology::Solar)
        })
        .sum();
    let surviving_nuclear = case.scalars.nuclear_unit_mw * (n as f64 - mop as f64);
    let gamma: Vec<f64> = (0..case.n_steps)
        .map(|t| {
            let load: f64 = (0..case.n_regions()).map(|r| case.scenarios[scenario].load[r][t]).sum();
            (load - dispatchable - renewable - surviving_nuclear).max(0.0)
        })
        .collect();
    let max = gamma.iter().cloned().fold(0.0, f64::max);
    let denom = max.max(1.0);
    let normalized = gamma.iter().map(|&g| g / denom).collect();
    NetLoadProfile { gamma, normalized }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubproblemOutcome {
    Optimal,
    /// All objective weights were zero; the lowest-index feasible set was
    /// taken greedily.
    ZeroObjective,
    /// The budgets admit no selection of `n` rows; the `n` rows with the
    /// smallest annual outage were taken instead.
    Fallback,
}

/// Pick the `n` outage rows that concentrate outage time on the highest
/// net-load steps, subject to the annual and simultaneous budgets.
pub fn solve_subproblem(
    solver: &dyn Solver,
    opts: &SolveOptions,
    n: u32,
    budgets: &Budgets,
    view: &SteppedOutageView,
    profile: &NetLoadProfile,
) -> Result<(Vec<usize>, SubproblemOutcome)> {
    let n_rows = view.n_rows();
    if (n as usize) > n_rows {
        return Err(Error::invalid(format!(
            "cannot select {n} rows out of {n_rows} outage samples"
        )));
    }
    if profile.normalized.len() != view.n_steps {
        return Err(Error::invalid("net-load profile does not match the step grid"));
    }

    let weights: Vec<f64> = (0..n_rows)
        .map(|i| view.row_steps(i).iter().map(|&k| profile.normalized[k as usize]).sum())
        .collect();

    if weights.iter().all(|&w| w == 0.0) {
        let selection = greedy_lowest_index(n, budgets, view);
        return match selection {
            Some(rows) => Ok((rows, SubproblemOutcome::ZeroObjective)),
            None => Ok((fallback_smallest_outage(n, view), SubproblemOutcome::Fallback)),
        };
    }

    let mut model = Model::new(format!("subproblem_n{n}_a{}", budgets.alpha));
    model.set_objective_sense(ObjectiveSense::Maximize);
    let mut vars = Vec::with_capacity(n_rows);
    for i in 0..n_rows {
        let id = model.add_binary(format!("z{i}"))?;
        model.add_objective_term(id, weights[i]);
        vars.push(id);
    }
    model.add_constraint(
        "pick_n",
        vars.iter().map(|&v| (v, 1.0)).collect(),
        ConstraintSense::Eq,
        n as f64,
    )?;
    let annual_terms: Vec<_> = (0..n_rows)
        .filter(|&i| !view.row_steps(i).is_empty())
        .map(|i| (vars[i], view.ts as f64 * view.row_steps(i).len() as f64))
        .collect();
    if !annual_terms.is_empty() {
        model.add_constraint("annual_budget", annual_terms, ConstraintSense::Le, budgets.aop as f64)?;
    }
    // One simultaneity row per step where more rows are active than the
    // budget allows.
    let mut active_per_step: Vec<Vec<usize>> = vec![Vec::new(); view.n_steps];
    for i in 0..n_rows {
        for &k in view.row_steps(i) {
            active_per_step[k as usize].push(i);
        }
    }
    for (k, active) in active_per_step.iter().enumerate() {
        if active.len() > budgets.mop as usize {
            model.add_constraint(
                format!("simultaneous_t{k}"),
                active.iter().map(|&i| (vars[i], 1.0)).collect(),
                ConstraintSense::Le,
                budgets.mop as f64,
            )?;
        }
    }

    let result = solver.solve(&model, opts)?;
    match result.status {
        SolveStatus::Optimal => {
            let rows: Vec<usize> = (0..n_rows).filter(|&i| result.value(vars[i]) > 0.5).collect();
            if rows.len() != n as usize {
                return Err(Error::Internal(format!(
                    "sub-problem returned {} rows instead of {n}",
                    rows.len()
                )));
            }
            Ok((rows, SubproblemOutcome::Optimal))
        }
        SolveStatus::Infeasible => Ok((fallback_smallest_outage(n, view), SubproblemOutcome::Fallback)),
        status => Err(Error::Solver {
            context: model.name().to_string(),
            detail: format!("terminal status {status:?}"),
        }),
    }
}

/// Lowest-index rows that satisfy the budgets greedily; `None` if the greedy
/// walk cannot collect `n` rows.
fn greedy_lowest_index(n: u32, budgets: &Budgets, view: &SteppedOutageView) -> Option<Vec<usize>> {
    let mut rows = Vec::with_capacity(n as usize);
    let mut annual: u64 = 0;
    let mut counts = vec![0u32; view.n_steps];
    for i in 0..view.n_rows() {
        let steps = view.row_steps(i);
        let added: u64 = view.ts as u64 * steps.len() as u64;
        if annual + added > budgets.aop {
            continue;
        }
        if steps.iter().any(|&k| counts[k as usize] + 1 > budgets.mop) {
            continue;
        }
        annual += added;
        for &k in steps {
            counts[k as usize] += 1;
        }
        rows.push(i);
        if rows.len() == n as usize {
            return Some(rows);
        }
    }
    None
}

/// The spec'd infeasibility fallback: the `n` rows with the least annual
/// outage, ties toward the lowest index. May violate the budgets; callers
/// surface a warning.
fn fallback_smallest_outage(n: u32, view: &SteppedOutageView) -> Vec<usize> {
    let mut order: Vec<usize> = (0..view.n_rows()).collect();
    order.sort_by_key(|&i| (view.row_steps(i).len(), i));
    let mut rows: Vec<usize> = order.into_iter().take(n as usize).collect();
    rows.sort_unstable();
    rows
}

/// Sweep configuration for [`solve_wnu`].
#[derive(Debug, Clone)]
pub struct WnuConfig {
    pub alphas: Vec<f64>,
    pub n_set: Vec<u32>,
    /// Shared outage samples drawn once per run (the sample pool both the
    /// master and the sub-problem select from).
    pub n_samples: usize,
    /// Monte Carlo trials behind each budget estimate.
    pub n_percentile_trials: usize,
}

#[derive(Debug, Clone)]
pub struct CellFailure {
    pub n: u32,
    pub alpha: f64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct WnuOutcome {
    pub front: Vec<ParetoEntry>,
    pub failures: Vec<CellFailure>,
    /// Sub-problem fallback notices, for the caller to surface.
    pub warnings: Vec<String>,
}

/// Run the full heuristic over the `(n, alpha)` grid.
///
/// For each cell: solve the master with the zero assignment, estimate the
/// budgets, pick worst-case samples per scenario with the sub-problem,
/// re-solve the master, then simulate the resulting mix over the years of
/// `sim_case` with fresh outage draws (penalty excluded from the recorded
/// cost). Cells are independent and run in parallel; the front is reduced
/// in grid order afterwards, so the result does not depend on scheduling.
pub fn solve_wnu(
    planning: &SteppedCase,
    sim_case: &SteppedCase,
    data: &MonthlyOutageData,
    streams: SeedStreams,
    cfg: &WnuConfig,
    solver: &dyn Solver,
    opts: &SolveOptions,
) -> Result<WnuOutcome> {
    if cfg.alphas.is_empty() || cfg.n_set.is_empty() {
        return Err(Error::invalid("solve_wnu needs at least one alpha and one fleet size"));
    }
    let max_n = *cfg.n_set.iter().max().unwrap() as usize;
    if cfg.n_samples < max_n {
        return Err(Error::invalid(format!(
            "sample pool of {} rows cannot cover fleets of {max_n} units",
            cfg.n_samples
        )));
    }

    let mut rng = streams.stream(StreamPurpose::OutageSamples, 0);
    let outages = generate_outage_samples(cfg.n_samples, data, &mut rng)?;
    let view = SteppedOutageView::new(&outages, planning);

    // Empirical outage distributions once per fleet size; every alpha takes
    // its quantiles from the same trials.
    let distributions: Vec<(u32, (Vec<u64>, Vec<u32>))> = cfg
        .n_set
        .iter()
        .map(|&n| {
            let observations: Vec<(u64, u32)> = (0..cfg.n_percentile_trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = streams.percentile_trial(n, trial as u64);
                    let matrix = generate_outage_samples(n as usize, data, &mut rng)?;
                    Ok((matrix.total_hours(), matrix.max_simultaneous()))
                })
                .collect::<Result<Vec<_>>>()?;
            let totals = observations.iter().map(|&(t, _)| t).collect();
            let maxima = observations.iter().map(|&(_, m)| m).collect();
            Ok((n, (totals, maxima)))
        })
        .collect::<Result<Vec<_>>>()?;
    let distribution_of = |n: u32| &distributions.iter().find(|(m, _)| *m == n).unwrap().1;

    let cells: Vec<(u32, f64)> = cfg
        .n_set
        .iter()
        .flat_map(|&n| cfg.alphas.iter().map(move |&a| (n, a)))
        .collect();

    let results: Vec<(u32, f64, Result<(ParetoEntry, Vec<String>)>)> = cells
        .par_iter()
        .map(|&(n, alpha)| (n, alpha, solve_cell(planning, sim_case, data, streams, solver, opts, &view, distribution_of(n), n, alpha)))
        .collect();

    let mut front = Vec::new();
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    for (n, alpha, outcome) in results {
        match outcome {
            Ok((entry, mut cell_warnings)) => {
                warnings.append(&mut cell_warnings);
                pareto_update(&mut front, entry);
            }
            Err(err) => failures.push(CellFailure { n, alpha, message: err.to_string() }),
        }
    }
    if front.is_empty() {
        let detail = failures
            .iter()
            .map(|f| format!("(n={}, alpha={}): {}", f.n, f.alpha, f.message))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Solver {
            context: "robust sweep".into(),
            detail: format!("every grid cell failed: {detail}"),
        });
    }
    Ok(WnuOutcome { front, failures, warnings })
}

#[allow(clippy::too_many_arguments)]
fn solve_cell(
    planning: &SteppedCase,
    sim_case: &SteppedCase,
    data: &MonthlyOutageData,
    streams: SeedStreams,
    solver: &dyn Solver,
    opts: &SolveOptions,
    view: &SteppedOutageView,
    distribution: &(Vec<u64>, Vec<u32>),
    n: u32,
    alpha: f64,
) -> Result<(ParetoEntry, Vec<String>)> {
    let budgets = Budgets {
        n,
        alpha,
        aop: quantile(&distribution.0, alpha)?,
        mop: quantile(&distribution.1, alpha)?,
        seed: streams.master(),
    };

    let interim = solve_master_with_view(planning, solver, opts, n, None, view)?;

    let mut warnings = Vec::new();
    let mut selection = Vec::with_capacity(planning.scenarios.len());
    for s in 0..planning.scenarios.len() {
        let profile = net_load(planning, s, &interim.capacity, n, budgets.mop);
        let (rows, outcome) = solve_subproblem(solver, opts, n, &budgets, view, &profile)?;
        if outcome == SubproblemOutcome::Fallback {
            warnings.push(format!(
                "sub-problem infeasible for n={n}, alpha={alpha}, scenario {}: using the {n} smallest-outage samples",
                planning.scenarios[s].id
            ));
        }
        selection.push(rows);
    }
    let assignment = SelectionAssignment::new(selection);

    let robust = solve_master_with_view(planning, solver, opts, n, Some(&assignment), view)?;

    // Simulation with fresh outage draws per year, penalty excluded from
    // the recorded cost.
    let mut cost_sum = 0.0;
    let mut lol_sum = 0.0;
    let sim_years = sim_case.scenarios.len();
    for y in 0..sim_years {
        let mut rng = streams.stream(StreamPurpose::SimulationYears, y as u64);
        let drawn = generate_outage_samples(n as usize, data, &mut rng)?;
        let counts = outage_counts_at_steps(&drawn, &sim_case.step_first_hour);
        let (year, _) = dispatch_year(sim_case, y, &robust.capacity, &counts, solver, opts)?;
        cost_sum += year.cost_excl_penalty;
        lol_sum += year.lol_mwh;
    }

    let entry = ParetoEntry {
        mean_cost: cost_sum / sim_years as f64,
        mean_lol: lol_sum / sim_years as f64,
        n,
        alpha,
        seed: streams.master(),
        capacity: robust.capacity,
    };
    Ok((entry, warnings))
}
