//! Rewardless MDPs, labeling functions and reward-trace payoffs.

use rand::Rng;
use thiserror::Error;

use crate::automata::{Alphabet, Observation};

/// Tolerance on the total mass of a transition row.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdpError {
    #[error("action `{action}` has no distribution in state `{state}`")]
    UndefinedAction { state: String, action: String },
    #[error("row ({state}, {action}) has mass {mass}, expected 1")]
    BadMass { state: String, action: String, mass: f64 },
    #[error("row ({state}, {action}) has a negative or non-finite probability")]
    BadProbability { state: String, action: String },
    #[error("state index {0} out of range")]
    UnknownState(usize),
    #[error("action index {0} out of range")]
    UnknownAction(usize),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("an MDP needs at least one state and one action")]
    Empty,
    #[error("mean payoff of an empty trace")]
    EmptyTrace,
    #[error("malformed interaction trace: {states} states, {actions} actions, {rewards} rewards")]
    MalformedTrace {
        states: usize,
        actions: usize,
        rewards: usize,
    },
    #[error("(action {action}, state {state}) is outside the labeling domain")]
    OutsideLabeling { action: usize, state: usize },
}

/// A non-rewarding MDP `⟨S, A, T, s0⟩` with sparse transition rows.
#[derive(Debug, Clone)]
pub struct NrMdp {
    states: Vec<String>,
    actions: Vec<String>,
    initial: StateId,
    rows: Vec<Option<Vec<(StateId, f64)>>>,
}

impl NrMdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.0]
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn action_index(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|n| n == name).map(ActionId)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len()).map(ActionId)
    }

    /// `T(s, a, ·)` as `(successor, probability)` pairs, if defined.
    pub fn distribution(&self, s: StateId, a: ActionId) -> Option<&[(StateId, f64)]> {
        self.rows
            .get(s.0 * self.actions.len() + a.0)
            .and_then(|row| row.as_deref())
    }

    /// Actions with a defined distribution in `s`, in declaration order.
    pub fn enabled_actions(&self, s: StateId) -> impl Iterator<Item = ActionId> + '_ {
        self.actions().filter(move |&a| self.distribution(s, a).is_some())
    }

    /// Draws `s' ~ T(s, a, ·)` with a single uniform draw from `rng`.
    pub fn sample_transition<R: Rng + ?Sized>(
        &self,
        s: StateId,
        a: ActionId,
        rng: &mut R,
    ) -> Result<StateId, MdpError> {
        if s.0 >= self.num_states() {
            return Err(MdpError::UnknownState(s.0));
        }
        if a.0 >= self.num_actions() {
            return Err(MdpError::UnknownAction(a.0));
        }
        let row = self
            .distribution(s, a)
            .ok_or_else(|| MdpError::UndefinedAction {
                state: self.state_name(s).to_owned(),
                action: self.action_name(a).to_owned(),
            })?;
        Ok(sample_categorical(row, rng, |&(t, p)| (t, p)))
    }
}

/// Inverse-CDF sampling over `(item, probability)` pairs. Falls back to the
/// last entry when rounding leaves the draw past the accumulated mass.
pub(crate) fn sample_categorical<T, I, R, F>(row: &[T], rng: &mut R, parts: F) -> I
where
    R: Rng + ?Sized,
    F: Fn(&T) -> (I, f64),
{
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for entry in row {
        let (item, p) = parts(entry);
        acc += p;
        if u < acc {
            return item;
        }
    }
    parts(row.last().expect("non-empty row")).0
}

#[derive(Debug, Clone)]
pub struct NrMdpBuilder {
    states: Vec<String>,
    actions: Vec<String>,
    initial: StateId,
    rows: Vec<Option<Vec<(StateId, f64)>>>,
}

impl NrMdpBuilder {
    pub fn new<S, A>(states: S, actions: A) -> Result<Self, MdpError>
    where
        S: IntoIterator,
        S::Item: Into<String>,
        A: IntoIterator,
        A::Item: Into<String>,
    {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        if states.is_empty() || actions.is_empty() {
            return Err(MdpError::Empty);
        }
        for names in [&states, &actions] {
            for (i, n) in names.iter().enumerate() {
                if names[..i].contains(n) {
                    return Err(MdpError::DuplicateName(n.clone()));
                }
            }
        }
        let rows = vec![None; states.len() * actions.len()];
        Ok(NrMdpBuilder {
            states,
            actions,
            initial: StateId(0),
            rows,
        })
    }

    pub fn initial(&mut self, s: StateId) -> Result<&mut Self, MdpError> {
        if s.0 >= self.states.len() {
            return Err(MdpError::UnknownState(s.0));
        }
        self.initial = s;
        Ok(self)
    }

    /// Sets `T(s, a, ·)`. Repeated successors are merged; zero-probability
    /// entries are dropped.
    pub fn transition(
        &mut self,
        s: StateId,
        a: ActionId,
        successors: impl IntoIterator<Item = (StateId, f64)>,
    ) -> Result<&mut Self, MdpError> {
        if s.0 >= self.states.len() {
            return Err(MdpError::UnknownState(s.0));
        }
        if a.0 >= self.actions.len() {
            return Err(MdpError::UnknownAction(a.0));
        }
        let mut row: Vec<(StateId, f64)> = Vec::new();
        for (t, p) in successors {
            if t.0 >= self.states.len() {
                return Err(MdpError::UnknownState(t.0));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(MdpError::BadProbability {
                    state: self.states[s.0].clone(),
                    action: self.actions[a.0].clone(),
                });
            }
            if p == 0.0 {
                continue;
            }
            match row.iter_mut().find(|(u, _)| *u == t) {
                Some(entry) => entry.1 += p,
                None => row.push((t, p)),
            }
        }
        let i = s.0 * self.actions.len() + a.0;
        self.rows[i] = Some(row);
        Ok(self)
    }

    pub fn build(self) -> Result<NrMdp, MdpError> {
        let na = self.actions.len();
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(row) = row {
                let mass: f64 = row.iter().map(|(_, p)| p).sum();
                if (mass - 1.0).abs() > MASS_TOLERANCE {
                    return Err(MdpError::BadMass {
                        state: self.states[i / na].clone(),
                        action: self.actions[i % na].clone(),
                        mass,
                    });
                }
            }
        }
        Ok(NrMdp {
            states: self.states,
            actions: self.actions,
            initial: self.initial,
            rows: self.rows,
        })
    }
}

/// `λ : A × S → Z ⊎ {null}`. Pairs never set read as null.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelingFunction {
    alphabet: Alphabet,
    num_actions: usize,
    num_states: usize,
    labels: Vec<Observation>,
}

impl LabelingFunction {
    pub fn new(alphabet: Alphabet, num_actions: usize, num_states: usize) -> Self {
        LabelingFunction {
            alphabet,
            num_actions,
            num_states,
            labels: vec![Observation::Null; num_actions * num_states],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Panics if `(a, s)` is outside the domain or `obs` outside the alphabet.
    pub fn set(&mut self, a: ActionId, s: StateId, obs: Observation) {
        assert!(a.0 < self.num_actions && s.0 < self.num_states);
        if let Observation::Sym(z) = obs {
            assert!(self.alphabet.contains(z), "symbol outside the alphabet");
        }
        self.labels[a.0 * self.num_states + s.0] = obs;
    }

    /// Labels state `s` with `obs` regardless of the action that entered it.
    pub fn set_state(&mut self, s: StateId, obs: Observation) {
        for a in 0..self.num_actions {
            self.set(ActionId(a), s, obs);
        }
    }

    pub fn get(&self, a: ActionId, s: StateId) -> Option<Observation> {
        if a.0 < self.num_actions && s.0 < self.num_states {
            Some(self.labels[a.0 * self.num_states + s.0])
        } else {
            None
        }
    }

    /// Unchecked lookup for the simulation hot paths.
    #[inline]
    pub fn label(&self, a: ActionId, s: StateId) -> Observation {
        self.labels[a.0 * self.num_states + s.0]
    }
}

/// `Σ_{i=1..k} γ^i r_i`; the first reward is already discounted once.
pub fn discounted_sum(trace: &[f64], gamma: f64) -> f64 {
    let mut weight = 1.0;
    let mut total = 0.0;
    for &r in trace {
        weight *= gamma;
        total += weight * r;
    }
    total
}

pub fn mean_payoff(trace: &[f64]) -> Result<f64, MdpError> {
    if trace.is_empty() {
        return Err(MdpError::EmptyTrace);
    }
    Ok(trace.iter().sum::<f64>() / trace.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coin(p_stay: f64) -> NrMdp {
        let mut b = NrMdpBuilder::new(["s0", "s1"], ["go", "idle"]).unwrap();
        b.transition(StateId(0), ActionId(0), [(StateId(1), 1.0 - p_stay), (StateId(0), p_stay)])
            .unwrap();
        b.transition(StateId(1), ActionId(0), [(StateId(1), 1.0)]).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn deterministic_edge_ignores_the_seed() {
        let m = coin(0.0);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(
                m.sample_transition(StateId(0), ActionId(0), &mut rng).unwrap(),
                StateId(1)
            );
        }
    }

    #[test]
    fn stuck_frequency_tracks_one_minus_apf() {
        // APF 0.75: the move fails a quarter of the time.
        let m = coin(0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 100_000;
        let stays = (0..draws)
            .filter(|_| m.sample_transition(StateId(0), ActionId(0), &mut rng).unwrap() == StateId(0))
            .count();
        let freq = stays as f64 / draws as f64;
        assert!((0.24..=0.26).contains(&freq), "stay frequency {freq}");
    }

    #[test]
    fn undefined_action_is_an_error() {
        let m = coin(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            m.sample_transition(StateId(0), ActionId(1), &mut rng),
            Err(MdpError::UndefinedAction { .. })
        ));
    }

    #[test]
    fn sampling_is_reproducible_per_seed() {
        let m = coin(0.5);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| m.sample_transition(StateId(0), ActionId(0), &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
    }

    #[test]
    fn rows_must_sum_to_one() {
        let mut b = NrMdpBuilder::new(["a", "b"], ["x"]).unwrap();
        b.transition(StateId(0), ActionId(0), [(StateId(1), 0.6), (StateId(0), 0.3)])
            .unwrap();
        assert!(matches!(b.build(), Err(MdpError::BadMass { .. })));

        let mut b = NrMdpBuilder::new(["a"], ["x"]).unwrap();
        assert!(b.transition(StateId(0), ActionId(0), [(StateId(0), -0.5)]).is_err());
    }

    #[test]
    fn payoffs_of_the_treasure_trace() {
        let trace = [10.0, 25.0, 90.0, 35.0];
        assert_eq!(discounted_sum(&trace, 1.0), 160.0);
        // 0.9·10 + 0.81·25 + 0.729·90 + 0.6561·35
        let expected: f64 = 0.9 * 10.0 + 0.81 * 25.0 + 0.729 * 90.0 + 0.6561 * 35.0;
        assert!((expected - 117.8235).abs() < 1e-9);
        assert!((discounted_sum(&trace, 0.9) - 117.8235).abs() < 1e-9);
        assert_eq!(discounted_sum(&[], 0.5), 0.0);
        assert_eq!(mean_payoff(&trace).unwrap(), 40.0);
        assert_eq!(mean_payoff(&[3.5; 7]).unwrap(), 3.5);
        assert_eq!(mean_payoff(&[]), Err(MdpError::EmptyTrace));
    }

    proptest! {
        #[test]
        fn discounted_sum_is_linear(
            a in prop::collection::vec(-50.0f64..50.0, 0..12),
            b_seed in prop::collection::vec(-50.0f64..50.0, 12),
            k in -3.0f64..3.0,
            gamma in 0.05f64..=1.0,
        ) {
            let b = &b_seed[..a.len()];
            let combo: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + k * y).collect();
            let lhs = discounted_sum(&combo, gamma);
            let rhs = discounted_sum(&a, gamma) + k * discounted_sum(b, gamma);
            prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()));
        }

        #[test]
        fn discounted_sum_is_monotone(
            a in prop::collection::vec(-50.0f64..50.0, 1..12),
            idx in 0usize..12,
            bump in 0.0f64..10.0,
            gamma in 0.05f64..=1.0,
        ) {
            let i = idx % a.len();
            let mut b = a.clone();
            b[i] += bump;
            prop_assert!(discounted_sum(&b, gamma) >= discounted_sum(&a, gamma) - 1e-12);
        }
    }
}
