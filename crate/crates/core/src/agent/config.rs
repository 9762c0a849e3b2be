//! Tunables of the learning agents.

use thiserror::Error;

/// Planner used to chase an observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerKind {
    /// Monte Carlo tree search on the shaped chase reward.
    Mcts,
    /// Uniformly random enabled actions.
    Random,
}

impl PlannerKind {
    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Mcts => "mcts",
            PlannerKind::Random => "random",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "mcts" => Some(PlannerKind::Mcts),
            "random" => Some(PlannerKind::Random),
            _ => None,
        }
    }
}

/// How the unobserved part of an unanswerable membership query is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    /// `arbitrary_reward` for every missing symbol.
    Arbitrary,
    /// The previous hypothesis' prediction for the query (`arbitrary_reward`
    /// before the first hypothesis), so that guesses cannot split rows the
    /// evidence does not distinguish.
    Hypothesis,
}

impl Padding {
    pub fn name(self) -> &'static str {
        match self {
            Padding::Arbitrary => "arbitrary",
            Padding::Hypothesis => "hypothesis",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        [Padding::Arbitrary, Padding::Hypothesis]
            .into_iter()
            .find(|p| p.name() == text)
    }
}

/// Return threshold gating exploitation in the optimal learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Fixed(f64),
    /// `ρ + β·ρ̇`, where `ρ` is the best epoch return so far and `ρ̇` the
    /// difference between the two most recent best returns; `−∞` before any
    /// epoch has finished.
    Dynamic { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MctsConfig {
    /// Actions simulated per trajectory.
    pub depth: usize,
    /// Trajectories simulated for every action the agent takes.
    pub trajectories_per_action: usize,
    /// UCT exploration constant, applied to returns divided by `y`.
    pub exploration: f64,
    /// Cost of a null observation while chasing.
    pub x: f64,
    /// Penalty for a wrong observation and bonus for the pursued one.
    pub y: f64,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig {
            depth: 30,
            trajectories_per_action: 100,
            exploration: std::f64::consts::SQRT_2,
            x: 1.0,
            y: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub theta: Threshold,
    /// Discount of the optimal learner's planning objective.
    pub gamma: f64,
    /// Length of the observation sequence chased while exploiting.
    pub k: usize,
    /// Exploitation actions per trial.
    pub acts_to_ext: usize,
    /// Actions after which the optimal learner restarts an epoch whose
    /// discounted return is still below the threshold.
    pub epoch_actions: usize,
    /// Actions per membership-query attempt.
    pub mq_action_budget: usize,
    /// Attempts after which a membership query is deemed unanswerable.
    pub mq_max_attempts: usize,
    /// Reward reported for the unreachable part of a membership query.
    pub arbitrary_reward: f64,
    pub padding: Padding,
    /// Assumed bound on the hidden machine's node count.
    pub ct_bound: usize,
    /// Test queries per conformance test.
    pub ct_budget: usize,
    pub mcts: MctsConfig,
    /// Planner that answers membership and test queries.
    pub query_planner: PlannerKind,
    /// Safeguard against tables that grow without bound on noisy answers.
    pub max_table_rows: usize,
    /// Hypothesis rounds after which the optimal learner stops.
    pub max_rounds: usize,
    /// Absolute tolerance for comparing table rows.
    pub row_tolerance: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            theta: Threshold::Dynamic { beta: 0.5 },
            gamma: 0.95,
            k: 6,
            acts_to_ext: 2000,
            epoch_actions: 100,
            mq_action_budget: 1000,
            mq_max_attempts: 100,
            arbitrary_reward: 0.0,
            padding: Padding::Arbitrary,
            ct_bound: 5,
            ct_budget: 500,
            mcts: MctsConfig::default(),
            query_planner: PlannerKind::Mcts,
            max_table_rows: 200,
            max_rounds: 50,
            row_tolerance: 0.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid `{field}`: {reason}")]
pub struct InvalidConfig {
    pub field: &'static str,
    pub reason: String,
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Result<(), InvalidConfig> {
    Err(InvalidConfig {
        field,
        reason: reason.into(),
    })
}

impl LearnerConfig {
    /// Defaults tuned per shipped domain: the cookie world answers queries
    /// by random exploration, and its long random-walk counterexamples get a
    /// tighter row limit so a trial stays within seconds.
    pub fn for_domain(name: &str) -> Self {
        let mut cfg = LearnerConfig::default();
        if name == "cookie" {
            cfg.query_planner = PlannerKind::Random;
            cfg.max_table_rows = 40;
        }
        cfg
    }

    pub fn validate(&self) -> Result<(), InvalidConfig> {
        if let Threshold::Dynamic { beta } = self.theta {
            if !(0.0..=1.0).contains(&beta) {
                return invalid("beta", format!("{beta} outside [0, 1]"));
            }
        }
        if let Threshold::Fixed(t) = self.theta {
            if t.is_nan() {
                return invalid("theta", "NaN");
            }
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return invalid("gamma", format!("{} outside (0, 1)", self.gamma));
        }
        if self.k == 0 {
            return invalid("k", "must be at least 1");
        }
        if self.acts_to_ext == 0 {
            return invalid("acts_to_ext", "must be positive");
        }
        if self.epoch_actions == 0 {
            return invalid("epoch_actions", "must be positive");
        }
        if self.mq_action_budget == 0 {
            return invalid("mq_action_budget", "must be positive");
        }
        if self.mq_max_attempts == 0 {
            return invalid("mq_max_attempts", "must be positive");
        }
        if !self.arbitrary_reward.is_finite() {
            return invalid("arbitrary_reward", "must be finite");
        }
        if self.ct_bound == 0 {
            return invalid("ct_bound", "must be at least 1");
        }
        let m = &self.mcts;
        if m.depth == 0 {
            return invalid("mcts_depth", "must be positive");
        }
        if m.trajectories_per_action == 0 {
            return invalid("mcts_trajectories", "must be positive");
        }
        if !(m.exploration >= 0.0) {
            return invalid("mcts_exploration", "must be non-negative");
        }
        if !(m.x > 0.0) {
            return invalid("shaping_x", "must be positive");
        }
        if !(m.y > m.x) {
            return invalid("shaping_y", format!("{} must exceed shaping_x = {}", m.y, m.x));
        }
        if self.max_table_rows == 0 {
            return invalid("max_table_rows", "must be positive");
        }
        if self.max_rounds == 0 {
            return invalid("max_rounds", "must be positive");
        }
        if !(self.row_tolerance >= 0.0) {
            return invalid("row_tolerance", "must be non-negative");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        LearnerConfig::default().validate().unwrap();
        LearnerConfig::for_domain("cookie").validate().unwrap();
    }

    #[test]
    fn shaping_needs_y_above_x() {
        let mut cfg = LearnerConfig::default();
        cfg.mcts.y = cfg.mcts.x;
        assert_eq!(cfg.validate().unwrap_err().field, "shaping_y");
    }

    #[test]
    fn rejects_out_of_range_fields() {
        let mut cfg = LearnerConfig::default();
        cfg.k = 0;
        assert_eq!(cfg.validate().unwrap_err().field, "k");
        let mut cfg = LearnerConfig::default();
        cfg.theta = Threshold::Dynamic { beta: 1.5 };
        assert_eq!(cfg.validate().unwrap_err().field, "beta");
        let mut cfg = LearnerConfig::default();
        cfg.acts_to_ext = 0;
        assert_eq!(cfg.validate().unwrap_err().field, "acts_to_ext");
    }

    #[test]
    fn planner_names_round_trip() {
        for k in [PlannerKind::Mcts, PlannerKind::Random] {
            assert_eq!(PlannerKind::parse(k.name()), Some(k));
        }
        assert_eq!(PlannerKind::parse("greedy"), None);
    }
}
