//! HiGHS-backed implementation of the [`Solver`] trait.

use super::{ConstraintSense, Model, ObjectiveSense, SolveOptions, SolveResult, SolveStatus, Solver, VarKind};
use crate::error::{Error, Result};
use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem, Sense};
use std::num::NonZeroU32;
use std::time::Instant;

#[derive(Debug, Default, Clone, Copy)]
pub struct HighsSolver;

impl Solver for HighsSolver {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn solve(&self, model: &Model, opts: &SolveOptions) -> Result<SolveResult> {
        let start = Instant::now();
        let mut problem = RowProblem::default();

        let mut cols = Vec::with_capacity(model.num_vars());
        for (var, &cost) in model.variables().iter().zip(model.objective()) {
            let col = match var.kind {
                VarKind::Continuous => problem.add_column(cost, var.lower..=var.upper),
                VarKind::Binary => problem.add_integer_column(cost, var.lower..=var.upper),
            };
            cols.push(col);
        }
        for con in model.constraints() {
            let terms: Vec<(highs::Col, f64)> =
                con.terms.iter().map(|&(v, c)| (cols[v.index()], c)).collect();
            match con.sense {
                ConstraintSense::Le => problem.add_row(..=con.rhs, &terms),
                ConstraintSense::Ge => problem.add_row(con.rhs.., &terms),
                ConstraintSense::Eq => problem.add_row(con.rhs..=con.rhs, &terms),
            }
        }

        let sense = match model.objective_sense() {
            ObjectiveSense::Minimize => Sense::Minimise,
            ObjectiveSense::Maximize => Sense::Maximise,
        };
        let mut highs_model = problem.optimise(sense);
        highs_model.make_quiet();
        highs_model.set_threads(NonZeroU32::new(opts.threads.max(1)).unwrap());
        highs_model.set_option("primal_feasibility_tolerance", opts.feasibility_tol);
        highs_model.set_option("mip_rel_gap", opts.mip_gap);
        highs_model.set_option("mip_feasibility_tolerance", opts.feasibility_tol);
        if let Some(limit) = opts.time_limit {
            highs_model.set_option("time_limit", limit);
        }

        let solved = highs_model
            .try_solve()
            .map_err(|status| Error::Solver {
                context: model.name().to_string(),
                detail: format!("backend error status {status:?}"),
            })?;
        let wall_time = start.elapsed();

        let (status, with_values) = match solved.status() {
            HighsModelStatus::Optimal => (SolveStatus::Optimal, true),
            HighsModelStatus::ModelEmpty => (SolveStatus::Optimal, true),
            HighsModelStatus::Infeasible => (SolveStatus::Infeasible, false),
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
                (SolveStatus::Unbounded, false)
            }
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget
            | HighsModelStatus::Unknown => {
                let has_incumbent = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
                (SolveStatus::Limit, has_incumbent)
            }
            other => {
                return Err(Error::Solver {
                    context: model.name().to_string(),
                    detail: format!("backend terminal status {other:?}"),
                })
            }
        };

        let (objective, values) = if with_values {
            let solution = solved.get_solution();
            (Some(solved.objective_value()), Some(solution.columns().to_vec()))
        } else {
            (None, None)
        };
        Ok(SolveResult { status, objective, values, wall_time })
    }
}
