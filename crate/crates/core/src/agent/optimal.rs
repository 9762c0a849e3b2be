//! The optimal learner: every complete table yields a hypothesis whose
//! product with the MDP is solved exactly. If the optimal discounted value
//! reaches the threshold the agent exploits the optimal strategy, restarting
//! epochs that fall behind; otherwise it tries to refute the hypothesis by
//! conformance testing.

use std::time::Instant;

use rand::Rng;

use crate::automata::{MealyRewardMachine, Observation, REWARD_TOLERANCE};
use crate::env::Domain;
use crate::lstar::ObservationTable;
use crate::mdp::discounted_sum;
use crate::product::{entering_reward, product, ProductMdp, ProductState};
use crate::solver::{value_iteration, Strategy, DEFAULT_TOLERANCE};
use crate::trace::InteractionTrace;

use super::approximate::{ingest, new_table, next_hypothesis};
use super::config::{LearnerConfig, Threshold};
use super::experience::ExperienceMemory;
use super::conformance::conformance_test;
use super::log::ExperimentLog;
use super::planner::Planner;
use super::simulator::Simulator;
use super::{AgentError, Counterexample};

#[derive(Debug, Clone)]
pub struct OptimalOutcome {
    pub hypothesis: MealyRewardMachine,
    pub product: ProductMdp,
    pub strategy: Strategy,
    /// Optimal discounted value of the final hypothesis at `(s0, u0)`.
    pub value: f64,
    pub table: ObservationTable,
    pub log: ExperimentLog,
}

/// Best epoch returns seen so far, for the dynamic threshold.
#[derive(Debug, Clone, Default)]
struct ReturnTracker {
    bests: Vec<f64>,
}

impl ReturnTracker {
    fn record(&mut self, epoch_return: f64) {
        if self.bests.last().is_none_or(|&b| epoch_return > b) {
            self.bests.push(epoch_return);
        }
    }

    fn threshold(&self, theta: Threshold) -> f64 {
        match theta {
            Threshold::Fixed(t) => t,
            Threshold::Dynamic { beta } => match self.bests.as_slice() {
                [] => f64::NEG_INFINITY,
                [rho] => *rho,
                [.., prev, rho] => rho + beta * (rho - prev),
            },
        }
    }
}

/// Follows `strategy` from `(s0, u0)` until a reward contradicts the
/// hypothesis or the trial's action budget is spent. An epoch restarts once
/// it has lasted `cfg.epoch_actions` actions with a discounted return still
/// below `theta`.
#[allow(clippy::too_many_arguments)]
fn exploit_strategy<R: Rng + ?Sized>(
    domain: &Domain,
    hypothesis: &MealyRewardMachine,
    p: &ProductMdp,
    strategy: &Strategy,
    theta: f64,
    cfg: &LearnerConfig,
    budget: usize,
    tracker: &mut ReturnTracker,
    log: &mut ExperimentLog,
    rng: &mut R,
) -> Option<Counterexample> {
    let mut sim = Simulator::new(domain);
    loop {
        sim.reset();
        log.epochs += 1;
        let mut x = p.initial();
        let mut node = hypothesis.start();
        let mut trace = InteractionTrace::new(sim.state());
        let mut word = Vec::new();
        let mut rewards = Vec::new();
        let mut epoch_actions = 0;
        loop {
            if log.exploit_actions >= budget {
                tracker.record(discounted_sum(&trace.rewards, cfg.gamma));
                return None;
            }
            let Some(a) = strategy.action(x) else { break };
            let step = sim.step(a, rng);
            let (next, predicted) = entering_reward(&domain.labeling, hypothesis, node, a, step.state);
            log.exploit_actions += 1;
            log.total_return += step.reward;
            trace.push(a, step.state, step.reward);
            epoch_actions += 1;
            if let Observation::Sym(z) = step.observation {
                word.push(z);
                rewards.push(step.reward);
            }
            if (predicted - step.reward).abs() > REWARD_TOLERANCE {
                tracker.record(discounted_sum(&trace.rewards, cfg.gamma));
                return Some(Counterexample { trace, word, rewards });
            }
            node = next;
            x = p
                .index_of(ProductState {
                    state: step.state,
                    node,
                })
                .expect("the product covers every reachable pair");
            if epoch_actions >= cfg.epoch_actions && discounted_sum(&trace.rewards, cfg.gamma) < theta {
                break;
            }
        }
        tracker.record(discounted_sum(&trace.rewards, cfg.gamma));
        if epoch_actions == 0 {
            // No action is enabled at the initial state.
            return None;
        }
    }
}

/// Runs until `cfg.acts_to_ext` exploitation actions have been spent or
/// `cfg.max_rounds` hypotheses have been built.
pub fn run_optimal<R: Rng + ?Sized>(
    domain: &Domain,
    cfg: &LearnerConfig,
    rng: &mut R,
) -> Result<OptimalOutcome, AgentError> {
    cfg.validate()?;
    let planner = Planner::new(cfg.query_planner, cfg.mcts);
    let mut table = new_table(domain, cfg)?;
    let mut log = ExperimentLog::default();
    let mut tracker = ReturnTracker::default();
    let mut memory = ExperienceMemory::new();
    let mut previous: Option<MealyRewardMachine> = None;
    let mut frozen = false;
    loop {
        let t0 = Instant::now();
        let hypothesis = next_hypothesis(
            domain,
            cfg,
            &planner,
            &mut table,
            &mut memory,
            previous.take(),
            &mut frozen,
            &mut log,
            rng,
        )?;
        let p = product(&domain.mdp, &domain.labeling, &hypothesis)?;
        let (values, strategy) = value_iteration(&p, cfg.gamma, DEFAULT_TOLERANCE)?;
        let value = values.get(p.initial());
        log.learn_seconds += t0.elapsed().as_secs_f64();

        let done = |log: &ExperimentLog| log.exploit_actions >= cfg.acts_to_ext || log.hypotheses >= cfg.max_rounds;
        // A frozen learner can only exploit; conformance tests would be wasted.
        let theta = if frozen { f64::NEG_INFINITY } else { tracker.threshold(cfg.theta) };
        let counterexample = if value >= theta {
            if log.exploit_actions >= cfg.acts_to_ext {
                None
            } else {
                let t1 = Instant::now();
                let ce = exploit_strategy(
                    domain,
                    &hypothesis,
                    &p,
                    &strategy,
                    theta,
                    cfg,
                    cfg.acts_to_ext,
                    &mut tracker,
                    &mut log,
                    rng,
                );
                log.exploit_seconds += t1.elapsed().as_secs_f64();
                ce
            }
        } else {
            let t1 = Instant::now();
            log.conformance_tests += 1;
            let ce = conformance_test(domain, &hypothesis, cfg, &planner, rng);
            log.learn_seconds += t1.elapsed().as_secs_f64();
            ce
        };
        if let (Some(ce), false) = (&counterexample, frozen) {
            ingest(&mut table, &mut memory, ce, &mut log)?;
        }
        if done(&log) || (counterexample.is_none() && value >= theta) {
            return Ok(OptimalOutcome {
                hypothesis,
                product: p,
                strategy,
                value,
                table,
                log,
            });
        }
        previous = Some(hypothesis);
    }
}
