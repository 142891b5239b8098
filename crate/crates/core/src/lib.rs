//! Capacity expansion planning for electricity systems under two coupled
//! uncertainties: weather variability (scenario-based stochastic programming)
//! and unplanned nuclear outages (data-driven adjustable robust optimization).
//!
//! The crate is organized around a small set of building blocks:
//!
//! * [`case`] — problem instances: regions, links, technologies, scalar
//!   parameters, hourly scenario series, time-step aggregation, and a seeded
//!   synthetic case generator.
//! * [`outage`] — Monte Carlo sampling of hourly nuclear-outage profiles from
//!   monthly empirical data, and quantile estimation of the annual (AOP) and
//!   simultaneous (MOP) outage budgets.
//! * [`lp`] — a minimal algebraic model layer (variables, linear constraints,
//!   linear objective) with a pluggable LP/MIP solver backend.
//! * [`wu`] — the scenario-based stochastic capacity-expansion LP (weather
//!   uncertainty); the deterministic model is its single-scenario special case.
//! * [`wnu`] — the adjustable-robust extension solved by a master/sub-problem
//!   heuristic, swept over nuclear fleet sizes and confidence levels into a
//!   Pareto front of (cost, loss-of-load) trade-offs.
//! * [`sim`] — evaluation of a fixed capacity mix against many weather years
//!   with freshly simulated outages, plus summary metrics.
//! * [`report`] — plain SVG plot emission for result inspection.
//!
//! All randomness flows through [`rng::SeedStreams`], so every result is a
//! deterministic function of the master seed regardless of thread scheduling.

pub mod calendar;
pub mod case;
pub mod error;
pub mod lp;
pub mod outage;
pub mod report;
pub mod rng;
pub mod sim;
pub mod wnu;
pub mod wu;

pub use case::{CaseData, Region, Scalars, ScenarioSeries, SteppedCase, Technology};
pub use error::{Error, Result};
pub use lp::{Model, SolveOptions, SolveResult, SolveStatus, Solver};
pub use outage::{Budgets, MonthlyOutageData, OutageMatrix};
pub use rng::SeedStreams;
pub use wu::{CapacityMix, PlanSolution};
