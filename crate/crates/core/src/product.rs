//! Synchronized product of a rewardless MDP with a Mealy reward machine.
//!
//! A transition `(s, u) --a--> (s', u')` carries `T(s, a, s')` when
//! `u' = δu(u, λ(a, s'))` and pays `δr(u, λ(a, s'))`: the reward is read at the
//! source node with the observation of the state being entered.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::automata::{MealyRewardMachine, Node, Observation, Symbol};
use crate::mdp::{sample_categorical, ActionId, LabelingFunction, NrMdp, StateId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProductError {
    #[error("labeling emits `{0}`, which the machine alphabet lacks")]
    AlphabetMismatch(String),
    #[error("labeling covers {lab_actions}×{lab_states} pairs but the MDP has {mdp_actions}×{mdp_states}")]
    DimensionMismatch {
        lab_actions: usize,
        lab_states: usize,
        mdp_actions: usize,
        mdp_states: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    pub state: StateId,
    pub node: Node,
}

/// One successor of an immediate-reward MDP row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub target: usize,
    pub probability: f64,
    pub reward: f64,
}

/// Explicit immediate-reward MDP over dense state indices; what the solver
/// consumes.
pub trait RewardMdp {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    /// Row `(state, action)`, or `None` if the action is not enabled there.
    fn edges(&self, state: usize, action: ActionId) -> Option<&[Edge]>;
}

/// Reachable fragment of `M ⊗_λ MR` from `(s0, u0)`. State `0` is the initial
/// product state; successors of each row keep the MDP row's order so that a
/// shared random stream samples both models identically.
#[derive(Debug, Clone)]
pub struct ProductMdp {
    states: Vec<ProductState>,
    index: HashMap<ProductState, usize>,
    num_actions: usize,
    rows: Vec<Option<Vec<Edge>>>,
    state_names: Vec<String>,
    node_count: usize,
    action_names: Vec<String>,
}

pub fn product(
    mdp: &NrMdp,
    labeling: &LabelingFunction,
    machine: &MealyRewardMachine,
) -> Result<ProductMdp, ProductError> {
    if labeling.num_actions() != mdp.num_actions() || labeling.num_states() != mdp.num_states() {
        return Err(ProductError::DimensionMismatch {
            lab_actions: labeling.num_actions(),
            lab_states: labeling.num_states(),
            mdp_actions: mdp.num_actions(),
            mdp_states: mdp.num_states(),
        });
    }
    let map = labeling.alphabet().translation_to(machine.alphabet());
    let translate = |obs: Observation| -> Result<Observation, ProductError> {
        match obs {
            Observation::Null => Ok(Observation::Null),
            Observation::Sym(z) => map[z.0].map(Observation::Sym).ok_or_else(|| {
                ProductError::AlphabetMismatch(labeling.alphabet().name(z).to_owned())
            }),
        }
    };

    let na = mdp.num_actions();
    let root = ProductState {
        state: mdp.initial(),
        node: machine.start(),
    };
    let mut states = vec![root];
    let mut index = HashMap::from([(root, 0)]);
    let mut rows: Vec<Option<Vec<Edge>>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let ProductState { state: s, node: u } = states[i];
        for a in mdp.actions() {
            let Some(dist) = mdp.distribution(s, a) else {
                rows.push(None);
                continue;
            };
            let mut row = Vec::with_capacity(dist.len());
            for &(t, p) in dist {
                let obs = translate(labeling.label(a, t))?;
                let (v, reward) = match obs {
                    Observation::Null => (u, machine.default_reward()),
                    Observation::Sym(z) => machine.transition(u, z),
                };
                let next = ProductState { state: t, node: v };
                let target = *index.entry(next).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
                row.push(Edge {
                    target,
                    probability: p,
                    reward,
                });
            }
            rows.push(Some(row));
        }
        i += 1;
    }
    debug_assert_eq!(rows.len(), states.len() * na);

    let state_names = states
        .iter()
        .map(|ps| format!("({}, u{})", mdp.state_name(ps.state), ps.node.0))
        .collect();
    Ok(ProductMdp {
        states,
        index,
        num_actions: na,
        rows,
        state_names,
        node_count: machine.num_nodes(),
        action_names: mdp.actions().map(|a| mdp.action_name(a).to_owned()).collect(),
    })
}

impl ProductMdp {
    pub fn initial(&self) -> usize {
        0
    }

    pub fn state(&self, i: usize) -> ProductState {
        self.states[i]
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn index_of(&self, ps: ProductState) -> Option<usize> {
        self.index.get(&ps).copied()
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.state_names[i]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a.0]
    }

    /// Node count of the machine the product was built from.
    pub fn machine_nodes(&self) -> usize {
        self.node_count
    }

    /// Draws a successor of `(state, action)` with one uniform draw and
    /// returns it together with the reward collected.
    pub fn sample<R: Rng + ?Sized>(&self, state: usize, action: ActionId, rng: &mut R) -> Option<(usize, f64)> {
        let row = self.edges(state, action)?;
        Some(sample_categorical(row, rng, |e| ((e.target, e.reward), e.probability)))
    }
}

impl RewardMdp for ProductMdp {
    fn num_states(&self) -> usize {
        self.states.len()
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn edges(&self, state: usize, action: ActionId) -> Option<&[Edge]> {
        self.rows
            .get(state * self.num_actions + action.0)
            .and_then(|r| r.as_deref())
    }
}

/// Reward of entering `next` from machine node `node` via `action`, i.e.
/// `δr(u, λ(a, s'))`.
pub fn entering_reward(
    labeling: &LabelingFunction,
    machine: &MealyRewardMachine,
    node: Node,
    action: ActionId,
    next: StateId,
) -> (Node, f64) {
    match labeling.label(action, next) {
        Observation::Null => (node, machine.default_reward()),
        Observation::Sym(Symbol(z)) => machine.transition(node, Symbol(z)),
    }
}

/// One `state -> action` line per product state that has a choice.
pub fn export_strategy(p: &ProductMdp, strategy: &crate::solver::Strategy) -> String {
    let mut out = String::new();
    for i in 0..p.num_states() {
        if let Some(a) = strategy.action(i) {
            let _ = writeln!(out, "{} -> {}", p.state_name(i), p.action_name(a));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Alphabet, MachineBuilder};
    use crate::env::build_treasure_map;
    use crate::mdp::NrMdpBuilder;

    #[test]
    fn single_loop_times_single_node() {
        let mut b = NrMdpBuilder::new(["s"], ["stay"]).unwrap();
        b.transition(StateId(0), ActionId(0), [(StateId(0), 1.0)]).unwrap();
        let mdp = b.build().unwrap();
        let alphabet = Alphabet::new(["z"]).unwrap();
        let mut lab = LabelingFunction::new(alphabet.clone(), 1, 1);
        lab.set_state(StateId(0), Observation::Sym(Symbol(0)));
        let rm = MachineBuilder::new(alphabet, 1)
            .edge(Node(0), Symbol(0), Node(0), 1.0)
            .unwrap()
            .build();
        let p = product(&mdp, &lab, &rm).unwrap();
        assert_eq!(p.num_states(), 1);
        let row = p.edges(0, ActionId(0)).unwrap();
        assert_eq!(row, &[Edge { target: 0, probability: 1.0, reward: 1.0 }]);
    }

    #[test]
    fn treasure_product_is_bounded_and_mass_preserving() {
        let d = build_treasure_map(0.85).unwrap();
        let p = product(&d.mdp, &d.labeling, &d.target).unwrap();
        assert!(p.num_states() <= d.mdp.num_states() * d.target.num_nodes());
        for i in 0..p.num_states() {
            let ps = p.state(i);
            for a in d.mdp.actions() {
                let row = p.edges(i, a).unwrap();
                let mass: f64 = row.iter().map(|e| e.probability).sum();
                let base: f64 = d.mdp.distribution(ps.state, a).unwrap().iter().map(|x| x.1).sum();
                assert!((mass - 1.0).abs() < 1e-9);
                assert!((mass - base).abs() < 1e-12);
                for e in row {
                    let next = p.state(e.target);
                    let (u2, r) = entering_reward(&d.labeling, &d.target, ps.node, a, next.state);
                    assert_eq!(next.node, u2);
                    assert_eq!(e.reward, r);
                }
            }
        }
    }

    #[test]
    fn labels_outside_the_machine_alphabet_are_rejected() {
        let mut b = NrMdpBuilder::new(["s"], ["stay"]).unwrap();
        b.transition(StateId(0), ActionId(0), [(StateId(0), 1.0)]).unwrap();
        let mdp = b.build().unwrap();
        let mut lab = LabelingFunction::new(Alphabet::new(["q"]).unwrap(), 1, 1);
        lab.set_state(StateId(0), Observation::Sym(Symbol(0)));
        let rm = MachineBuilder::new(Alphabet::new(["z"]).unwrap(), 1).build();
        assert_eq!(
            product(&mdp, &lab, &rm).unwrap_err(),
            ProductError::AlphabetMismatch("q".into())
        );
    }
}
