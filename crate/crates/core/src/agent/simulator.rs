//! A resettable environment instance driven by the hidden reward machine.

use rand::Rng;

use crate::automata::{Node, Observation};
use crate::env::Domain;
use crate::mdp::{sample_categorical, ActionId, MdpError, StateId};

/// What one action produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: StateId,
    pub observation: Observation,
    /// Reward paid by the hidden machine for the observation.
    pub reward: f64,
}

/// Single-owner simulator: the MDP state plus the hidden machine's node.
#[derive(Debug, Clone)]
pub struct Simulator<'d> {
    domain: &'d Domain,
    state: StateId,
    node: Node,
    steps: usize,
    resets: usize,
}

impl<'d> Simulator<'d> {
    /// Starts at `(s0, u0)`.
    pub fn new(domain: &'d Domain) -> Self {
        Simulator {
            domain,
            state: domain.mdp.initial(),
            node: domain.target.start(),
            steps: 0,
            resets: 0,
        }
    }

    pub fn domain(&self) -> &'d Domain {
        self.domain
    }

    /// Back to `(s0, u0)`.
    pub fn reset(&mut self) {
        self.reset_to(self.domain.mdp.initial());
    }

    /// Puts the agent in `state` with the hidden machine at its start node.
    pub fn reset_to(&mut self, state: StateId) {
        self.state = state;
        self.node = self.domain.target.start();
        self.resets += 1;
    }

    pub fn state(&self) -> StateId {
        self.state
    }

    pub fn node(&self) -> Node {
        self.node
    }

    /// Actions taken since construction.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn resets(&self) -> usize {
        self.resets
    }

    pub fn try_step<R: Rng + ?Sized>(&mut self, action: ActionId, rng: &mut R) -> Result<Step, MdpError> {
        let mdp = &self.domain.mdp;
        if action.0 >= mdp.num_actions() {
            return Err(MdpError::UnknownAction(action.0));
        }
        let row = mdp.distribution(self.state, action).ok_or_else(|| MdpError::UndefinedAction {
            state: mdp.state_name(self.state).to_owned(),
            action: mdp.action_name(action).to_owned(),
        })?;
        let next = sample_categorical(row, rng, |&(t, p)| (t, p));
        let observation = self.domain.labeling.label(action, next);
        let (node, reward) = match observation {
            Observation::Null => (self.node, self.domain.target.default_reward()),
            Observation::Sym(z) => self.domain.target.transition(self.node, z),
        };
        self.state = next;
        self.node = node;
        self.steps += 1;
        Ok(Step {
            state: next,
            observation,
            reward,
        })
    }

    /// Like [`Self::try_step`]; panics if `action` is not enabled, which the
    /// planners never request.
    pub fn step<R: Rng + ?Sized>(&mut self, action: ActionId, rng: &mut R) -> Step {
        self.try_step(action, rng).expect("action enabled in the current state")
    }
}
