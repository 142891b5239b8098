//! Weather scenario selection by ranked deterministic solves.
//!
//! Each candidate year is solved as a single-scenario deterministic instance
//! (probability 1, no unplanned outages); the years are then ranked by
//! optimal system cost. The favorable scenario is the cheapest year, the
//! unfavorable one the most expensive, and the average one the year whose
//! cost is closest to the mean. Ties break toward the lowest year index.

use super::{aggregate_to_steps, CaseData, SteppedCase};
use crate::error::{Error, Result};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTriple {
    pub favorable: usize,
    pub average: usize,
    pub unfavorable: usize,
    /// Optimal system cost per candidate year, in input order.
    pub costs: Vec<f64>,
}

/// Rank pre-computed per-year system costs into the (favorable, average,
/// unfavorable) triple.
pub fn rank_scenarios(costs: &[f64]) -> Result<ScenarioTriple> {
    if costs.len() < 3 {
        return Err(Error::invalid(format!(
            "scenario selection needs at least 3 years, got {}",
            costs.len()
        )));
    }
    let mut favorable = 0;
    let mut unfavorable = 0;
    for (i, &sc) in costs.iter().enumerate() {
        if sc < costs[favorable] {
            favorable = i;
        }
        if sc > costs[unfavorable] {
            unfavorable = i;
        }
    }
    let mean = costs.iter().sum::<f64>() / costs.len() as f64;
    let mut average = 0;
    for (i, &sc) in costs.iter().enumerate() {
        if (sc - mean).abs() < (costs[average] - mean).abs() {
            average = i;
        }
    }
    Ok(ScenarioTriple { favorable, average, unfavorable, costs: costs.to_vec() })
}

/// Solve one deterministic instance per year of `case` and rank the years.
/// `solve_sc` maps a stepped single-scenario case to its optimal system
/// cost; solver failures are tagged with the offending year id.
pub fn select_scenarios<F>(case: &CaseData, ts: u32, solve_sc: F) -> Result<ScenarioTriple>
where
    F: Fn(&SteppedCase) -> Result<f64> + Sync,
{
    if case.scenarios.len() < 3 {
        return Err(Error::invalid(format!(
            "scenario selection needs at least 3 years, got {}",
            case.scenarios.len()
        )));
    }
    let costs: Vec<f64> = (0..case.scenarios.len())
        .into_par_iter()
        .map(|y| {
            let year = case.with_scenarios(&[(y, 1.0)])?;
            let stepped = aggregate_to_steps(&year, ts)?;
            solve_sc(&stepped).map_err(|e| Error::Solver {
                context: format!("deterministic solve for year {}", case.scenarios[y].id),
                detail: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rank_scenarios(&costs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_min_mean_max() {
        let triple = rank_scenarios(&[100.0, 110.0, 130.0]).unwrap();
        // Mean is 113.3; 110 is the closest.
        assert_eq!((triple.favorable, triple.average, triple.unfavorable), (0, 1, 2));
    }

    #[test]
    fn ties_break_to_lowest_index() {
        let triple = rank_scenarios(&[50.0, 50.0, 50.0, 50.0]).unwrap();
        assert_eq!((triple.favorable, triple.average, triple.unfavorable), (0, 0, 0));
    }

    #[test]
    fn distinct_costs_give_distinct_roles() {
        let triple = rank_scenarios(&[7.0, 3.0, 9.0, 5.5]).unwrap();
        assert_eq!(triple.favorable, 1);
        assert_eq!(triple.unfavorable, 2);
        // Mean 6.125; closest is 5.5 at index 3.
        assert_eq!(triple.average, 3);
        assert_ne!(triple.favorable, triple.average);
        assert_ne!(triple.average, triple.unfavorable);
    }

    #[test]
    fn too_few_years_rejected() {
        assert!(rank_scenarios(&[1.0, 2.0]).is_err());
    }
}
