//! Conformance testing in place of equivalence queries: random test words
//! are chased in the environment and every reward received is checked
//! against the hypothesis.

use rand::Rng;

use crate::automata::{MealyRewardMachine, Observation, Symbol, REWARD_TOLERANCE};
use crate::env::Domain;
use crate::trace::InteractionTrace;

use super::config::LearnerConfig;
use super::planner::Planner;
use super::simulator::Simulator;
use super::Counterexample;

/// Runs up to `cfg.ct_budget` test queries. Each draws a word of length
/// `1..=cfg.ct_bound + |Z|` uniformly, resets the environment, and chases the
/// word symbol by symbol with at most `cfg.mq_action_budget` actions. Symbols
/// observed out of order do not abort a test: whatever is observed is
/// compared. Returns the first interaction whose rewards disagree with the
/// hypothesis.
pub fn conformance_test<R: Rng + ?Sized>(
    domain: &Domain,
    hypothesis: &MealyRewardMachine,
    cfg: &LearnerConfig,
    planner: &Planner,
    rng: &mut R,
) -> Option<Counterexample> {
    let symbols: Vec<Symbol> = domain.alphabet().symbols().collect();
    let max_len = cfg.ct_bound + symbols.len();
    let mut sim = Simulator::new(domain);
    for _ in 0..cfg.ct_budget {
        let len = rng.gen_range(1..=max_len);
        let test: Vec<Symbol> = (0..len).map(|_| symbols[rng.gen_range(0..symbols.len())]).collect();
        sim.reset();
        let mut node = hypothesis.start();
        let mut trace = InteractionTrace::new(sim.state());
        let mut word = Vec::new();
        let mut rewards = Vec::new();
        let mut actions = 0;
        'test: for &goal in &test {
            loop {
                if actions >= cfg.mq_action_budget {
                    break 'test;
                }
                let Some(a) = planner.choose(domain, sim.state(), goal, rng) else {
                    break 'test;
                };
                let step = sim.step(a, rng);
                actions += 1;
                trace.push(a, step.state, step.reward);
                if let Observation::Sym(z) = step.observation {
                    let (next, predicted) = hypothesis.transition(node, z);
                    word.push(z);
                    rewards.push(step.reward);
                    if (predicted - step.reward).abs() > REWARD_TOLERANCE {
                        return Some(Counterexample { trace, word, rewards });
                    }
                    node = next;
                    if z == goal {
                        break;
                    }
                }
            }
        }
    }
    None
}
