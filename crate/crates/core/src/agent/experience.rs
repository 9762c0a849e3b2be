//! Answering a membership query by acting: from a reset, chase each symbol of
//! the query in turn and record the reward received at each observation.

use rand::Rng;

use crate::automata::{MealyRewardMachine, Observation, RewardTrace, Symbol};
use crate::env::Domain;

use super::planner::Planner;
use super::simulator::Simulator;

#[derive(Debug, Clone, PartialEq)]
pub enum Answer {
    /// The full query was observed; one reward per symbol.
    Answered(RewardTrace),
    /// The budget ran out. `achieved` holds the rewards of the longest query
    /// prefix that was observed in some attempt.
    Unanswerable { achieved: RewardTrace },
}

impl Answer {
    /// Rewards to hand to the table: the real rewards, padded with
    /// `arbitrary` past the part of the query that could be observed.
    pub fn resolve(&self, len: usize, arbitrary: f64) -> RewardTrace {
        match self {
            Answer::Answered(r) => r.clone(),
            Answer::Unanswerable { achieved } => {
                let mut r = achieved.clone();
                r.resize(len, arbitrary);
                r
            }
        }
    }

    /// Like [`Answer::resolve`], but the missing rewards are `machine`'s
    /// predictions for the query.
    pub fn resolve_with(&self, query: &[Symbol], machine: &MealyRewardMachine) -> RewardTrace {
        match self {
            Answer::Answered(r) => r.clone(),
            Answer::Unanswerable { achieved } => {
                let predicted = machine.run_word(query).unwrap_or_else(|_| vec![0.0; query.len()]);
                let mut r = achieved.clone();
                r.extend_from_slice(&predicted[achieved.len().min(predicted.len())..]);
                r
            }
        }
    }

    pub fn is_answered(&self) -> bool {
        matches!(self, Answer::Answered(_))
    }
}

/// Every observation word experienced from the start node, with the rewards
/// received along it. A machine's output depends only on the word, so any
/// remembered episode extending a query answers it exactly.
#[derive(Debug, Clone, Default)]
pub struct ExperienceMemory {
    /// Trie over words; node 0 is the empty word. Each child edge stores the
    /// symbol, the child index and the reward received on that symbol.
    children: Vec<Vec<(Symbol, usize, f64)>>,
}

impl ExperienceMemory {
    pub fn new() -> Self {
        ExperienceMemory {
            children: vec![Vec::new()],
        }
    }

    fn child(&self, node: usize, z: Symbol) -> Option<(usize, f64)> {
        self.children[node].iter().find(|(y, _, _)| *y == z).map(|&(_, c, r)| (c, r))
    }

    /// Records one experienced word and its rewards.
    pub fn insert(&mut self, word: &[Symbol], rewards: &[f64]) {
        if self.children.is_empty() {
            self.children.push(Vec::new());
        }
        let mut node = 0;
        for (&z, &r) in word.iter().zip(rewards) {
            node = match self.child(node, z) {
                Some((c, _)) => c,
                None => {
                    let c = self.children.len();
                    self.children.push(Vec::new());
                    self.children[node].push((z, c, r));
                    c
                }
            };
        }
    }

    /// Rewards along the longest remembered prefix of `query`.
    pub fn longest_prefix(&self, query: &[Symbol]) -> RewardTrace {
        let mut rewards = Vec::new();
        let mut node = 0;
        if self.children.is_empty() {
            return rewards;
        }
        for &z in query {
            match self.child(node, z) {
                Some((c, r)) => {
                    rewards.push(r);
                    node = c;
                }
                None => break,
            }
        }
        rewards
    }

    /// Rewards of `query` if some remembered word extends it.
    pub fn lookup(&self, query: &[Symbol]) -> Option<RewardTrace> {
        let r = self.longest_prefix(query);
        (r.len() == query.len()).then_some(r)
    }

    /// Number of distinct non-empty words remembered (trie nodes).
    pub fn len(&self) -> usize {
        self.children.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperienceOutcome {
    pub answer: Answer,
    /// Episodes started (each from a reset).
    pub attempts: usize,
    pub actions: usize,
}

/// Tries to observe exactly `query` (ignoring nulls) from `(s0, u0)`. An
/// attempt fails as soon as any other symbol is observed or after `budget`
/// actions; the environment is then reset and the next attempt begins, up
/// to `max_attempts` attempts. Queries already covered by `memory` cost
/// nothing, and every attempt's observations are added to it.
pub fn get_experience<R: Rng + ?Sized>(
    sim: &mut Simulator<'_>,
    planner: &Planner,
    memory: &mut ExperienceMemory,
    query: &[Symbol],
    budget: usize,
    max_attempts: usize,
    rng: &mut R,
) -> ExperienceOutcome {
    let domain: &Domain = sim.domain();
    let mut actions = 0;
    let mut attempts = 0;
    if let Some(rewards) = memory.lookup(query) {
        return ExperienceOutcome {
            answer: Answer::Answered(rewards),
            attempts,
            actions,
        };
    }
    let mut word = Vec::with_capacity(query.len() + 1);
    let mut rewards = Vec::with_capacity(query.len() + 1);
    while attempts < max_attempts {
        sim.reset();
        attempts += 1;
        word.clear();
        rewards.clear();
        for _ in 0..budget {
            let goal = query[word.len()];
            let Some(a) = planner.choose(domain, sim.state(), goal, rng) else {
                break;
            };
            let step = sim.step(a, rng);
            actions += 1;
            if let Observation::Sym(z) = step.observation {
                word.push(z);
                rewards.push(step.reward);
                if z != goal || word.len() == query.len() {
                    break;
                }
            }
        }
        memory.insert(&word, &rewards);
        if word.len() == query.len() && word == query {
            return ExperienceOutcome {
                answer: Answer::Answered(rewards),
                attempts,
                actions,
            };
        }
    }
    ExperienceOutcome {
        answer: Answer::Unanswerable {
            achieved: memory.longest_prefix(query),
        },
        attempts,
        actions,
    }
}
