//! Exploiting a hypothesis: pick the most rewarding observation sequence and
//! chase it, or follow an optimal product strategy; either way, watch for
//! rewards the hypothesis did not predict.

use rand::Rng;

use crate::automata::{MealyRewardMachine, Node, Observation, Symbol, REWARD_TOLERANCE};
use crate::env::Domain;
use crate::mdp::{sample_categorical, StateId};
use crate::product::{entering_reward, ProductMdp};
use crate::solver::Strategy;
use crate::trace::InteractionTrace;

use super::planner::Planner;
use super::simulator::Simulator;
use super::Counterexample;

/// The length-`k` word over `Z` whose run from the start node earns the most
/// reward; among equally good words the lexicographically first in symbol
/// declaration order. Equivalent to exhaustive search over `Z^k`, computed by
/// dynamic programming over (remaining length, node).
pub fn good_observation_sequence(h: &MealyRewardMachine, k: usize) -> Vec<Symbol> {
    let n = h.num_nodes();
    // best[i][u]: maximum reward of i more symbols from node u.
    let mut best = vec![vec![0.0; n]; k + 1];
    for i in 1..=k {
        for u in 0..n {
            best[i][u] = h
                .alphabet()
                .symbols()
                .map(|z| {
                    let (v, r) = h.transition(Node(u), z);
                    r + best[i - 1][v.0]
                })
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    let mut word = Vec::with_capacity(k);
    let mut u = h.start();
    for i in (1..=k).rev() {
        let target = best[i][u.0];
        let (z, v) = h
            .alphabet()
            .symbols()
            .find_map(|z| {
                let (v, r) = h.transition(u, z);
                (r + best[i - 1][v.0] >= target - REWARD_TOLERANCE).then_some((z, v))
            })
            .expect("the maximum is attained");
        word.push(z);
        u = v;
    }
    word
}

/// Result of chasing a sequence over repeated epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploitReport {
    pub actions: usize,
    pub epochs: usize,
    pub total_return: f64,
    pub counterexample: Option<Counterexample>,
}

/// Epochs of: restart at a random state with both machines at their start
/// nodes, then chase each symbol of `sequence` in turn. Stops at the first
/// reward the hypothesis mispredicts or after `budget` actions.
pub fn chase_sequence<R: Rng + ?Sized>(
    domain: &Domain,
    hypothesis: &MealyRewardMachine,
    sequence: &[Symbol],
    planner: &Planner,
    budget: usize,
    rng: &mut R,
) -> ExploitReport {
    let mut report = ExploitReport {
        actions: 0,
        epochs: 0,
        total_return: 0.0,
        counterexample: None,
    };
    if sequence.is_empty() {
        return report;
    }
    let mut sim = Simulator::new(domain);
    while report.actions < budget {
        report.epochs += 1;
        sim.reset_to(domain.random_start(rng));
        let mut node = hypothesis.start();
        let mut trace = InteractionTrace::new(sim.state());
        let mut word = Vec::new();
        let mut rewards = Vec::new();
        'epoch: for &goal in sequence {
            loop {
                if report.actions >= budget {
                    break 'epoch;
                }
                let Some(a) = planner.choose(domain, sim.state(), goal, rng) else {
                    break 'epoch;
                };
                let step = sim.step(a, rng);
                report.actions += 1;
                report.total_return += step.reward;
                trace.push(a, step.state, step.reward);
                if let Observation::Sym(z) = step.observation {
                    let (next, predicted) = hypothesis.transition(node, z);
                    word.push(z);
                    rewards.push(step.reward);
                    if (predicted - step.reward).abs() > REWARD_TOLERANCE {
                        report.counterexample = Some(Counterexample { trace, word, rewards });
                        return report;
                    }
                    node = next;
                    if z == goal {
                        break;
                    }
                }
            }
        }
    }
    report
}

/// Follows a product strategy in the real environment for `horizon` steps
/// from `(s0, u0)`, tracking the hypothesis node the product was built
/// from. Returns the interaction with hidden-machine rewards.
pub fn run_strategy_episode<R: Rng + ?Sized>(
    domain: &Domain,
    hypothesis: &MealyRewardMachine,
    product: &ProductMdp,
    strategy: &Strategy,
    horizon: usize,
    rng: &mut R,
) -> InteractionTrace {
    let mut sim = Simulator::new(domain);
    let mut x = product.initial();
    let mut node = hypothesis.start();
    let mut trace = InteractionTrace::new(sim.state());
    for _ in 0..horizon {
        let Some(a) = strategy.action(x) else { break };
        let step = sim.step(a, rng);
        let (next, _) = entering_reward(&domain.labeling, hypothesis, node, a, step.state);
        node = next;
        trace.push(a, step.state, step.reward);
        x = product
            .index_of(crate::product::ProductState {
                state: step.state,
                node,
            })
            .expect("the product covers every reachable pair");
    }
    trace
}

/// The same episode simulated directly on the product; rewards come from
/// the product's edges.
pub fn run_product_episode<R: Rng + ?Sized>(
    product: &ProductMdp,
    strategy: &Strategy,
    horizon: usize,
    rng: &mut R,
) -> (Vec<StateId>, Vec<f64>) {
    let mut x = product.initial();
    let mut states = vec![product.state(x).state];
    let mut rewards = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let Some(a) = strategy.action(x) else { break };
        let row = crate::product::RewardMdp::edges(product, x, a).expect("strategy picks enabled actions");
        let (next, r) = sample_categorical(row, rng, |e| ((e.target, e.reward), e.probability));
        rewards.push(r);
        x = next;
        states.push(product.state(x).state);
    }
    (states, rewards)
}
