//! Discounted-sum value iteration and policy evaluation on explicit
//! immediate-reward MDPs.
//!
//! Values are expected discounted sums `E[Σ_{i≥1} γ^i r_i]`, the first reward
//! already carrying one factor of `γ`. The backup is therefore
//! `V(x) = max_a Σ T(x, a, x') · γ · (R(a, x') + V(x'))`, which has the same
//! greedy argmax as the textbook `R + γV` form and differs from it by a
//! factor of `γ`.

use thiserror::Error;

use crate::mdp::ActionId;
use crate::product::RewardMdp;

pub const DEFAULT_GAMMA: f64 = 0.95;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const MAX_SWEEPS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("discount {0} outside (0, 1)")]
    InvalidGamma(f64),
    #[error("tolerance {0} must be positive")]
    InvalidTolerance(f64),
    #[error("model has no states")]
    EmptyModel,
    #[error("no convergence after {0} sweeps")]
    IterationLimit(usize),
    #[error("strategy has no usable action for state {0}")]
    PartialStrategy(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction(pub Vec<f64>);

impl ValueFunction {
    pub fn get(&self, state: usize) -> f64 {
        self.0[state]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Memoryless strategy over product states. States without any enabled
/// action have no choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy(pub Vec<Option<ActionId>>);

impl Strategy {
    pub fn action(&self, state: usize) -> Option<ActionId> {
        self.0.get(state).copied().flatten()
    }
}

fn check(p: &impl RewardMdp, gamma: f64, tol: f64) -> Result<(), SolverError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(SolverError::InvalidGamma(gamma));
    }
    if !(tol > 0.0) {
        return Err(SolverError::InvalidTolerance(tol));
    }
    if p.num_states() == 0 {
        return Err(SolverError::EmptyModel);
    }
    Ok(())
}

fn q_value(p: &impl RewardMdp, values: &[f64], x: usize, a: ActionId, gamma: f64) -> Option<f64> {
    p.edges(x, a).map(|row| {
        gamma
            * row
                .iter()
                .map(|e| e.probability * (e.reward + values[e.target]))
                .sum::<f64>()
    })
}

/// Relative margin by which a later action must beat the current best.
/// Keeps the lowest-index choice on ties and is invariant under positive
/// reward scaling.
fn beats(q: f64, best: f64) -> bool {
    q > best + 1e-9 * best.abs() + 1e-12
}

/// One Bellman optimality backup plus its greedy strategy.
pub fn bellman_backup(p: &impl RewardMdp, values: &[f64], gamma: f64) -> (Vec<f64>, Strategy) {
    let mut next = vec![0.0; p.num_states()];
    let mut choice = vec![None; p.num_states()];
    for x in 0..p.num_states() {
        let mut best: Option<(ActionId, f64)> = None;
        for a in (0..p.num_actions()).map(ActionId) {
            if let Some(q) = q_value(p, values, x, a, gamma) {
                match best {
                    Some((_, b)) if !beats(q, b) => {}
                    _ => best = Some((a, q)),
                }
            }
        }
        if let Some((a, q)) = best {
            next[x] = q;
            choice[x] = Some(a);
        }
    }
    (next, Strategy(choice))
}

/// Iterates the optimality operator until successive sweeps differ by less
/// than `tol` in sup-norm, which bounds the Bellman residual of the returned
/// values by `γ · tol`.
pub fn value_iteration(
    p: &impl RewardMdp,
    gamma: f64,
    tol: f64,
) -> Result<(ValueFunction, Strategy), SolverError> {
    check(p, gamma, tol)?;
    let mut values = vec![0.0; p.num_states()];
    for _ in 0..MAX_SWEEPS {
        let (next, _) = bellman_backup(p, &values, gamma);
        let delta = sup_distance(&next, &values);
        values = next;
        if delta < tol {
            let (_, strategy) = bellman_backup(p, &values, gamma);
            return Ok((ValueFunction(values), strategy));
        }
    }
    Err(SolverError::IterationLimit(MAX_SWEEPS))
}

/// `V^π` for a fixed memoryless strategy.
pub fn evaluate_policy(
    p: &impl RewardMdp,
    strategy: &Strategy,
    gamma: f64,
    tol: f64,
) -> Result<ValueFunction, SolverError> {
    check(p, gamma, tol)?;
    for x in 0..p.num_states() {
        let has_any = (0..p.num_actions()).any(|a| p.edges(x, ActionId(a)).is_some());
        let usable = strategy.action(x).is_some_and(|a| p.edges(x, a).is_some());
        if has_any && !usable {
            return Err(SolverError::PartialStrategy(x));
        }
    }
    let mut values = vec![0.0; p.num_states()];
    for _ in 0..MAX_SWEEPS {
        let next: Vec<f64> = (0..p.num_states())
            .map(|x| {
                strategy
                    .action(x)
                    .and_then(|a| q_value(p, &values, x, a, gamma))
                    .unwrap_or(0.0)
            })
            .collect();
        let delta = sup_distance(&next, &values);
        values = next;
        if delta < tol {
            return Ok(ValueFunction(values));
        }
    }
    Err(SolverError::IterationLimit(MAX_SWEEPS))
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::Edge;

    /// Hand-written explicit model for solver-only tests.
    struct Explicit {
        actions: usize,
        rows: Vec<Option<Vec<Edge>>>,
    }

    impl RewardMdp for Explicit {
        fn num_states(&self) -> usize {
            self.rows.len() / self.actions
        }
        fn num_actions(&self) -> usize {
            self.actions
        }
        fn edges(&self, state: usize, action: ActionId) -> Option<&[Edge]> {
            self.rows[state * self.actions + action.0].as_deref()
        }
    }

    fn det(target: usize, reward: f64) -> Option<Vec<Edge>> {
        Some(vec![Edge { target, probability: 1.0, reward }])
    }

    #[test]
    fn geometric_series_closed_form() {
        let m = Explicit { actions: 1, rows: vec![det(0, 1.0)] };
        let (v, s) = value_iteration(&m, 0.5, 1e-10).unwrap();
        // Σ_{i≥1} γ^i r = γ r / (1 − γ) = 1.
        assert!((v.get(0) - 1.0).abs() < 1e-8);
        assert_eq!(s.action(0), Some(ActionId(0)));
    }

    #[test]
    fn dominant_action_is_chosen() {
        let m = Explicit { actions: 2, rows: vec![det(0, 0.0), det(0, 5.0)] };
        let (_, s) = value_iteration(&m, 0.9, 1e-8).unwrap();
        assert_eq!(s.action(0), Some(ActionId(1)));
    }

    #[test]
    fn ties_go_to_the_lowest_action() {
        let m = Explicit { actions: 3, rows: vec![det(0, 2.0), det(0, 2.0), det(0, 1.0)] };
        let (_, s) = value_iteration(&m, 0.9, 1e-8).unwrap();
        assert_eq!(s.action(0), Some(ActionId(0)));
    }

    #[test]
    fn rejects_bad_parameters() {
        let m = Explicit { actions: 1, rows: vec![det(0, 1.0)] };
        assert_eq!(value_iteration(&m, 1.0, 1e-8).unwrap_err(), SolverError::InvalidGamma(1.0));
        assert_eq!(value_iteration(&m, 0.0, 1e-8).unwrap_err(), SolverError::InvalidGamma(0.0));
        let empty = Explicit { actions: 1, rows: vec![] };
        assert_eq!(value_iteration(&empty, 0.9, 1e-8).unwrap_err(), SolverError::EmptyModel);
    }

    #[test]
    fn evaluation_of_the_greedy_strategy_matches() {
        let m = Explicit {
            actions: 2,
            rows: vec![det(1, 1.0), det(0, 0.0), det(0, 3.0), det(1, -1.0)],
        };
        let tol = 1e-9;
        let (v, s) = value_iteration(&m, 0.8, tol).unwrap();
        let e = evaluate_policy(&m, &s, 0.8, tol).unwrap();
        assert!(sup_distance(v.as_slice(), e.as_slice()) <= 2.0 * tol);
    }

    #[test]
    fn zero_rewards_evaluate_to_zero() {
        let m = Explicit { actions: 1, rows: vec![det(1, 0.0), det(0, 0.0)] };
        let v = evaluate_policy(&m, &Strategy(vec![Some(ActionId(0)); 2]), 0.9, 1e-8).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn partial_strategies_are_rejected() {
        let m = Explicit { actions: 1, rows: vec![det(1, 0.0), det(0, 0.0)] };
        let s = Strategy(vec![Some(ActionId(0)), None]);
        assert_eq!(evaluate_policy(&m, &s, 0.9, 1e-8).unwrap_err(), SolverError::PartialStrategy(1));
    }

    #[test]
    fn sweeps_contract_by_gamma() {
        let m = Explicit {
            actions: 2,
            rows: vec![det(1, 1.0), det(2, 0.5), det(2, 2.0), det(0, 0.0), det(0, -1.0), det(1, 4.0)],
        };
        let gamma = 0.7;
        let mut v = vec![0.0; 3];
        let mut prev_delta = f64::INFINITY;
        for _ in 0..40 {
            let (next, _) = bellman_backup(&m, &v, gamma);
            let delta = sup_distance(&next, &v);
            assert!(delta <= gamma * prev_delta + 1e-12);
            prev_delta = delta;
            v = next;
        }
    }
}
