//! Histories and interaction traces.

use crate::automata::{AutomataError, ObservationTrace, RewardTrace};
use crate::mdp::{ActionId, LabelingFunction, MdpError, StateId};

/// `s0 a0 s1 a1 … sk`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub states: Vec<StateId>,
    pub actions: Vec<ActionId>,
}

impl History {
    pub fn new(states: Vec<StateId>, actions: Vec<ActionId>) -> Self {
        History { states, actions }
    }

    pub(crate) fn check(&self) -> Result<(), AutomataError> {
        if self.states.len() == self.actions.len() + 1 {
            Ok(())
        } else {
            Err(AutomataError::MalformedHistory {
                states: self.states.len(),
                actions: self.actions.len(),
            })
        }
    }

    /// Number of action-state pairs.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// `(a_i, s_{i+1})` pairs, the arguments of the labeling function.
    pub fn steps(&self) -> impl Iterator<Item = (ActionId, StateId)> + '_ {
        self.actions
            .iter()
            .zip(self.states.iter().skip(1))
            .map(|(&a, &s)| (a, s))
    }
}

/// `s0 a0 r1 s1 a1 r2 … sk`: what the agent actually lived through, with the
/// reward received on entering each state.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTrace {
    pub states: Vec<StateId>,
    pub actions: Vec<ActionId>,
    pub rewards: Vec<f64>,
}

impl InteractionTrace {
    pub fn new(initial: StateId) -> Self {
        InteractionTrace {
            states: vec![initial],
            actions: Vec::new(),
            rewards: Vec::new(),
        }
    }

    pub fn push(&mut self, action: ActionId, state: StateId, reward: f64) {
        self.actions.push(action);
        self.states.push(state);
        self.rewards.push(reward);
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    fn check(&self) -> Result<(), MdpError> {
        let k = self.actions.len();
        if self.states.len() == k + 1 && self.rewards.len() == k {
            Ok(())
        } else {
            Err(MdpError::MalformedTrace {
                states: self.states.len(),
                actions: k,
                rewards: self.rewards.len(),
            })
        }
    }

    pub fn history(&self) -> History {
        History::new(self.states.clone(), self.actions.clone())
    }
}

/// Observation `i` is `λ(a_{i-1}, s_i)`.
pub fn extract_obs_trace(
    trace: &InteractionTrace,
    labeling: &LabelingFunction,
) -> Result<ObservationTrace, MdpError> {
    trace.check()?;
    trace
        .actions
        .iter()
        .zip(&trace.states[1..])
        .map(|(&a, &s)| {
            labeling.get(a, s).ok_or(MdpError::OutsideLabeling {
                action: a.0,
                state: s.0,
            })
        })
        .collect()
}

pub fn extract_rew_trace(trace: &InteractionTrace) -> Result<RewardTrace, MdpError> {
    trace.check()?;
    Ok(trace.rewards.clone())
}
