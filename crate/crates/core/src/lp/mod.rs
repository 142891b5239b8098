//! Minimal algebraic model layer: continuous or binary variables, sparse
//! linear constraints, a linear objective, and a pluggable solver behind
//! the [`Solver`] trait so model-building code never names a backend.
//!
//! The bundled backend is HiGHS (compiled from source as part of the build,
//! so `cargo test` needs no external installs). Models can be dumped to and
//! re-read from a CPLEX-LP-style text format for debugging; see
//! [`lp_format`].

mod highs_backend;
pub mod lp_format;

pub use highs_backend::HighsSolver;

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::time::Duration;

/// Index of a variable within its [`Model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

/// An algebraic model under construction. Variables and constraints carry
/// unique names so exported models stay readable.
#[derive(Debug, Clone)]
pub struct Model {
    name: String,
    variables: Vec<Variable>,
    names: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
    objective: Vec<f64>,
    sense: ObjectiveSense,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Model {
            name: name.into(),
            variables: Vec::new(),
            names: HashMap::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            sense: ObjectiveSense::Minimize,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
    ) -> Result<VarId> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(Error::ModelBuild(format!("duplicate variable name '{name}'")));
        }
        if !(lower <= upper) {
            return Err(Error::ModelBuild(format!(
                "variable '{name}': lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(Error::ModelBuild(format!("binary variable '{name}' bounds outside [0, 1]")));
        }
        let id = VarId(self.variables.len() as u32);
        self.names.insert(name.clone(), id);
        self.variables.push(Variable { name, lower, upper, kind });
        self.objective.push(0.0);
        Ok(id)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId> {
        self.add_var(name, lower, upper, VarKind::Continuous)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId> {
        self.add_var(name, 0.0, 1.0, VarKind::Binary)
    }

    pub fn set_objective_sense(&mut self, sense: ObjectiveSense) {
        self.sense = sense;
    }

    /// Add `coef` to the objective coefficient of `var`.
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) {
        self.objective[var.index()] += coef;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<()> {
        let name = name.into();
        for &(var, _) in &terms {
            if var.index() >= self.variables.len() {
                return Err(Error::ModelBuild(format!(
                    "constraint '{name}' references unknown variable id {}",
                    var.index()
                )));
            }
        }
        self.constraints.push(Constraint { name, terms, sense, rhs });
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_sense(&self) -> ObjectiveSense {
        self.sense
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    pub fn has_integrality(&self) -> bool {
        self.variables.iter().any(|v| v.kind == VarKind::Binary)
    }
}

/// Backend knobs; defaults match the accuracy the audits expect.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Absolute feasibility tolerance on constraint violation.
    pub feasibility_tol: f64,
    /// Relative MIP gap at which branch and bound stops.
    pub mip_gap: f64,
    /// Wall-clock limit in seconds, if any.
    pub time_limit: Option<f64>,
    /// Solver threads. Keep at 1 for bit-stable reruns.
    pub threads: u32,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { feasibility_tol: 1e-7, mip_gap: 1e-6, time_limit: None, threads: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// A resource limit was hit; `values` holds the best incumbent if the
    /// backend found one.
    Limit,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: Option<Vec<f64>>,
    pub wall_time: Duration,
}

impl SolveResult {
    /// Primal value of `var`; panics unless the solve produced values.
    pub fn value(&self, var: VarId) -> f64 {
        self.values.as_ref().expect("no primal values in solve result")[var.index()]
    }

    /// Error unless the status is optimal; the message carries `context`.
    pub fn expect_optimal(self, context: &str) -> Result<SolveResult> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            status => Err(Error::Solver {
                context: context.to_string(),
                detail: format!("terminal status {status:?}"),
            }),
        }
    }
}

/// A solver backend. One model must not be solved from two threads at once;
/// distinct models may be solved concurrently.
pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, model: &Model, opts: &SolveOptions) -> Result<SolveResult>;
}

/// Select a backend by name: currently only `highs`. `None` falls back to
/// the default. The CLI feeds this from an environment variable.
pub fn solver_by_name(name: Option<&str>) -> Result<Box<dyn Solver>> {
    match name.unwrap_or("highs") {
        "highs" => Ok(Box::new(HighsSolver::default())),
        other => Err(Error::Config(format!("unknown solver backend '{other}' (available: highs)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        let mut m = Model::new("t");
        m.add_continuous("x", 0.0, 1.0).unwrap();
        assert!(m.add_continuous("x", 0.0, 2.0).is_err());
    }

    #[test]
    fn crossed_bounds_rejected() {
        let mut m = Model::new("t");
        assert!(m.add_continuous("x", 2.0, 1.0).is_err());
    }

    #[test]
    fn minimize_simple_lp() {
        // min x s.t. x >= 3, x in [0, 10]
        let mut m = Model::new("t");
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        m.add_objective_term(x, 1.0);
        m.add_constraint("c", vec![(x, 1.0)], ConstraintSense::Ge, 3.0).unwrap();
        let r = HighsSolver::default().solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.value(x) - 3.0).abs() < 1e-6);
        assert!((r.objective.unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn maximize_binary_mip() {
        // max x + y s.t. x + y <= 1, x, y binary
        let mut m = Model::new("t");
        let x = m.add_binary("x").unwrap();
        let y = m.add_binary("y").unwrap();
        m.set_objective_sense(ObjectiveSense::Maximize);
        m.add_objective_term(x, 1.0);
        m.add_objective_term(y, 1.0);
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], ConstraintSense::Le, 1.0).unwrap();
        let r = HighsSolver::default().solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_is_reported() {
        // x <= -1 with x >= 0
        let mut m = Model::new("t");
        let x = m.add_continuous("x", 0.0, f64::INFINITY).unwrap();
        m.add_objective_term(x, 1.0);
        m.add_constraint("c", vec![(x, 1.0)], ConstraintSense::Le, -1.0).unwrap();
        let r = HighsSolver::default().solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.values.is_none());
    }

    #[test]
    fn unknown_backend_is_a_config_error() {
        assert!(solver_by_name(Some("gurobi")).is_err());
        assert!(solver_by_name(None).is_ok());
    }
}
