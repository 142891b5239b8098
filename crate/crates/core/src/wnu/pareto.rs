//! Pareto front over (mean simulated cost, mean simulated loss of load).

use crate::wu::CapacityMix;
use serde::{Deserialize, Serialize};

/// One candidate plan with its simulated performance and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoEntry {
    /// Mean simulated cost with the loss-of-load penalty excluded,
    /// currency/year.
    pub mean_cost: f64,
    /// Mean simulated unserved energy, MWh/year.
    pub mean_lol: f64,
    pub n: u32,
    pub alpha: f64,
    pub seed: u64,
    pub capacity: CapacityMix,
}

/// Insert `candidate` unless some incumbent is at least as good on both
/// objectives (ties reject the newcomer); drop incumbents the candidate
/// weakly dominates. Returns whether the candidate entered the front.
pub fn pareto_update(front: &mut Vec<ParetoEntry>, candidate: ParetoEntry) -> bool {
    let dominated = front
        .iter()
        .any(|sol| candidate.mean_cost >= sol.mean_cost && candidate.mean_lol >= sol.mean_lol);
    if dominated {
        return false;
    }
    front.retain(|sol| !(candidate.mean_cost <= sol.mean_cost && candidate.mean_lol <= sol.mean_lol));
    front.push(candidate);
    true
}

/// Whether no entry weakly dominates another (ignoring self-comparison).
pub fn is_mutually_non_dominated(front: &[ParetoEntry]) -> bool {
    for (i, a) in front.iter().enumerate() {
        for (j, b) in front.iter().enumerate() {
            if i != j && a.mean_cost <= b.mean_cost && a.mean_lol <= b.mean_lol {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn entry(cost: f64, lol: f64) -> ParetoEntry {
        ParetoEntry {
            mean_cost: cost,
            mean_lol: lol,
            n: 0,
            alpha: 0.5,
            seed: 0,
            capacity: CapacityMix { regions: vec![], links: vec![] },
        }
    }

    #[test]
    fn empty_front_accepts_anything() {
        let mut front = Vec::new();
        assert!(pareto_update(&mut front, entry(100.0, 5.0)));
        assert_eq!(front.len(), 1);
    }

    #[test]
    fn dominated_candidate_is_rejected() {
        let mut front = vec![entry(100.0, 5.0)];
        assert!(!pareto_update(&mut front, entry(110.0, 7.0)));
        assert_eq!(front.len(), 1);
    }

    #[test]
    fn exact_tie_keeps_the_incumbent() {
        let mut front = vec![entry(100.0, 5.0)];
        assert!(!pareto_update(&mut front, entry(100.0, 5.0)));
        assert_eq!(front.len(), 1);
    }

    #[test]
    fn dominating_candidate_sweeps_the_front() {
        let mut front = vec![entry(100.0, 5.0), entry(90.0, 8.0)];
        assert!(pareto_update(&mut front, entry(90.0, 5.0)));
        assert_eq!(front.len(), 1);
        assert_eq!(front[0].mean_cost, 90.0);
        assert_eq!(front[0].mean_lol, 5.0);
    }

    #[test]
    fn incomparable_candidates_coexist() {
        let mut front = vec![entry(100.0, 5.0)];
        assert!(pareto_update(&mut front, entry(90.0, 8.0)));
        assert!(pareto_update(&mut front, entry(110.0, 2.0)));
        assert_eq!(front.len(), 3);
        assert!(is_mutually_non_dominated(&front));
    }
}
