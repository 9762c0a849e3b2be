//! Learning agents: membership queries answered by acting in the world,
//! exploitation of hypotheses, and conformance testing in place of
//! equivalence queries.

pub mod approximate;
pub mod config;
pub mod conformance;
pub mod experience;
pub mod exploit;
pub mod log;
pub mod optimal;
pub mod planner;
pub mod simulator;

use thiserror::Error;

use crate::automata::{RewardTrace, Symbol};
use crate::lstar::TableError;
use crate::product::ProductError;
use crate::solver::SolverError;
use crate::trace::InteractionTrace;

pub use approximate::run_approximate;
pub use config::{InvalidConfig, LearnerConfig, MctsConfig, Padding, PlannerKind, Threshold};
pub use conformance::conformance_test;
pub use experience::{get_experience, Answer, ExperienceMemory, ExperienceOutcome};
pub use exploit::good_observation_sequence;
pub use log::ExperimentLog;
pub use optimal::run_optimal;
pub use planner::Planner;
pub use simulator::{Simulator, Step};

/// An experienced interaction on which a hypothesis predicts the wrong
/// reward, with its non-null observations and their rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trace: InteractionTrace,
    pub word: Vec<Symbol>,
    pub rewards: RewardTrace,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error(transparent)]
    Config(#[from] InvalidConfig),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("observation table exceeded {0} prefixes")]
    TableLimit(usize),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}
