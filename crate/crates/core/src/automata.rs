//! Mealy reward machines: finite transducers from observation sequences to
//! reward sequences.
//!
//! A machine is total over `U × Z`. Pairs that were never given an explicit
//! edge are zero-reward self-loops, and the distinguished [`Observation::Null`]
//! is a self-loop at every node that emits the machine's default reward.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::mdp::LabelingFunction;
use crate::trace::History;

/// Absolute tolerance used whenever two rewards are compared.
pub const REWARD_TOLERANCE: f64 = 1e-9;

/// Name reserved for the null observation in every text format.
pub const NULL_NAME: &str = "null";

/// Index of a symbol inside an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub usize);

/// A machine node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node(pub usize);

/// Either a member of the alphabet or the null observation of intermediate
/// states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observation {
    Null,
    Sym(Symbol),
}

impl Observation {
    pub fn symbol(self) -> Option<Symbol> {
        match self {
            Observation::Null => None,
            Observation::Sym(z) => Some(z),
        }
    }

    pub fn is_null(self) -> bool {
        matches!(self, Observation::Null)
    }
}

impl From<Symbol> for Observation {
    fn from(z: Symbol) -> Self {
        Observation::Sym(z)
    }
}

pub type ObservationTrace = Vec<Observation>;
pub type RewardTrace = Vec<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutomataError {
    #[error("observation {0:?} is not in the alphabet")]
    UnknownObservation(Observation),
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("labeling emits `{0}`, which the machine alphabet lacks")]
    UnmappedLabel(String),
    #[error("malformed history: {states} states for {actions} actions")]
    MalformedHistory { states: usize, actions: usize },
    #[error("(action {action}, state {state}) is outside the labeling domain")]
    OutsideLabeling { action: usize, state: usize },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
}

/// The finite observation set `Z`. Symbols are numbered in declaration order,
/// which is also the order used for every tie-break in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, AutomataError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(AutomataError::InvalidAlphabet(format!(
                    "symbol name {name:?} must be a non-empty token"
                )));
            }
            if name == NULL_NAME {
                return Err(AutomataError::InvalidAlphabet(
                    "`null` is reserved and cannot be an alphabet member".into(),
                ));
            }
            if names[..i].contains(name) {
                return Err(AutomataError::InvalidAlphabet(format!(
                    "duplicate symbol `{name}`"
                )));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(Symbol)
    }

    pub fn contains(&self, z: Symbol) -> bool {
        z.0 < self.names.len()
    }

    pub fn name(&self, z: Symbol) -> &str {
        &self.names[z.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(Symbol)
    }

    /// Parses a symbol name, accepting `null`.
    pub fn observation(&self, name: &str) -> Option<Observation> {
        if name == NULL_NAME {
            Some(Observation::Null)
        } else {
            self.lookup(name).map(Observation::Sym)
        }
    }

    pub fn display(&self, obs: Observation) -> &str {
        match obs {
            Observation::Null => NULL_NAME,
            Observation::Sym(z) => self.names.get(z.0).map_or("?", String::as_str),
        }
    }

    /// Renders a trace as `a·b·c`.
    pub fn format_trace(&self, trace: &[Observation]) -> String {
        if trace.is_empty() {
            return "ε".into();
        }
        trace
            .iter()
            .map(|&o| self.display(o))
            .collect::<Vec<_>>()
            .join("·")
    }

    pub fn format_word(&self, word: &[Symbol]) -> String {
        let trace: Vec<Observation> = word.iter().map(|&z| z.into()).collect();
        self.format_trace(&trace)
    }

    /// Maps each of our symbols to the same-named symbol of `other`.
    pub(crate) fn translation_to(&self, other: &Alphabet) -> Vec<Option<Symbol>> {
        self.names.iter().map(|n| other.lookup(n)).collect()
    }

    fn same_set(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.names.iter().all(|n| other.lookup(n).is_some())
    }
}

/// Incrementally assembles a [`MealyRewardMachine`]. Every `(node, symbol)`
/// pair starts as a zero-reward self-loop.
#[derive(Debug, Clone)]
pub struct MachineBuilder {
    machine: MealyRewardMachine,
}

impl MachineBuilder {
    pub fn new(alphabet: Alphabet, nodes: usize) -> Self {
        assert!(nodes > 0, "a machine needs at least one node");
        let width = alphabet.len();
        let successor = (0..nodes)
            .flat_map(|u| std::iter::repeat_n(Node(u), width))
            .collect();
        MachineBuilder {
            machine: MealyRewardMachine {
                alphabet,
                nodes,
                start: Node(0),
                default_reward: 0.0,
                successor,
                output: vec![0.0; nodes * width],
            },
        }
    }

    pub fn start(mut self, start: Node) -> Result<Self, AutomataError> {
        self.machine.check_node(start)?;
        self.machine.start = start;
        Ok(self)
    }

    pub fn default_reward(mut self, reward: f64) -> Self {
        self.machine.default_reward = reward;
        self
    }

    pub fn edge(
        mut self,
        from: Node,
        z: Symbol,
        to: Node,
        reward: f64,
    ) -> Result<Self, AutomataError> {
        self.set_edge(from, z, to, reward)?;
        Ok(self)
    }

    pub fn set_edge(
        &mut self,
        from: Node,
        z: Symbol,
        to: Node,
        reward: f64,
    ) -> Result<(), AutomataError> {
        let m = &mut self.machine;
        m.check_node(from)?;
        m.check_node(to)?;
        if !m.alphabet.contains(z) {
            return Err(AutomataError::UnknownObservation(z.into()));
        }
        let i = m.slot(from, z);
        m.successor[i] = to;
        m.output[i] = reward;
        Ok(())
    }

    pub fn build(self) -> MealyRewardMachine {
        self.machine
    }
}

/// A Mealy reward machine `⟨U, u0, Z, δu, δr⟩` with default reward `c` on
/// null observations.
#[derive(Debug, Clone, PartialEq)]
pub struct MealyRewardMachine {
    alphabet: Alphabet,
    nodes: usize,
    start: Node,
    default_reward: f64,
    successor: Vec<Node>,
    output: Vec<f64>,
}

impl MealyRewardMachine {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn start(&self) -> Node {
        self.start
    }

    pub fn default_reward(&self) -> f64 {
        self.default_reward
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> {
        (0..self.num_nodes()).map(Node)
    }

    fn slot(&self, u: Node, z: Symbol) -> usize {
        u.0 * self.alphabet.len() + z.0
    }

    fn check_node(&self, u: Node) -> Result<(), AutomataError> {
        if u.0 < self.num_nodes() {
            Ok(())
        } else {
            Err(AutomataError::UnknownNode(u.0))
        }
    }

    /// `(δu(u, z), δr(u, z))` for an alphabet symbol. Panics on out-of-range
    /// arguments; see [`Self::step`] for the checked form.
    #[inline]
    pub fn transition(&self, u: Node, z: Symbol) -> (Node, f64) {
        let i = self.slot(u, z);
        (self.successor[i], self.output[i])
    }

    pub fn step(&self, u: Node, obs: Observation) -> Result<(Node, f64), AutomataError> {
        self.check_node(u)?;
        match obs {
            Observation::Null => Ok((u, self.default_reward)),
            Observation::Sym(z) if self.alphabet.contains(z) => Ok(self.transition(u, z)),
            Observation::Sym(_) => Err(AutomataError::UnknownObservation(obs)),
        }
    }

    pub fn run(&self, trace: &[Observation]) -> Result<RewardTrace, AutomataError> {
        self.run_from(self.start, trace).map(|(_, rewards)| rewards)
    }

    /// Runs from an arbitrary node and also reports the node reached.
    pub fn run_from(
        &self,
        mut u: Node,
        trace: &[Observation],
    ) -> Result<(Node, RewardTrace), AutomataError> {
        let mut rewards = Vec::with_capacity(trace.len());
        for &obs in trace {
            let (next, r) = self.step(u, obs)?;
            rewards.push(r);
            u = next;
        }
        Ok((u, rewards))
    }

    /// Output on a word of alphabet symbols (no nulls).
    pub fn run_word(&self, word: &[Symbol]) -> Result<RewardTrace, AutomataError> {
        let mut u = self.start;
        let mut rewards = Vec::with_capacity(word.len());
        for &z in word {
            if !self.alphabet.contains(z) {
                return Err(AutomataError::UnknownObservation(z.into()));
            }
            let (next, r) = self.transition(u, z);
            rewards.push(r);
            u = next;
        }
        Ok(rewards)
    }

    /// `δ*_r(u0, h)`: the rewards a history earns, reading each step's
    /// observation as `λ(a_i, s_{i+1})`.
    pub fn rewards_of_history(
        &self,
        labeling: &LabelingFunction,
        history: &History,
    ) -> Result<RewardTrace, AutomataError> {
        history.check()?;
        let map = labeling.alphabet().translation_to(&self.alphabet);
        let mut trace = Vec::with_capacity(history.len());
        for (a, s) in history.steps() {
            let obs = labeling.get(a, s).ok_or(AutomataError::OutsideLabeling {
                action: a.0,
                state: s.0,
            })?;
            trace.push(match obs {
                Observation::Null => Observation::Null,
                Observation::Sym(z) => map[z.0]
                    .map(Observation::Sym)
                    .ok_or_else(|| {
                        AutomataError::UnmappedLabel(labeling.alphabet().name(z).to_owned())
                    })?,
            });
        }
        self.run(&trace)
    }

    /// Returns a shortest trace on which the two machines emit different
    /// rewards, or `None` when they agree on every input. Breadth-first over
    /// the product of both machines; alphabets must contain the same names.
    pub fn equivalent(&self, other: &MealyRewardMachine) -> Result<Option<ObservationTrace>, AutomataError> {
        if !self.alphabet.same_set(&other.alphabet) {
            return Err(AutomataError::AlphabetMismatch);
        }
        if (self.default_reward - other.default_reward).abs() > REWARD_TOLERANCE {
            return Ok(Some(vec![Observation::Null]));
        }
        let map: Vec<Symbol> = self
            .alphabet
            .translation_to(&other.alphabet)
            .into_iter()
            .map(|z| z.expect("same symbol set"))
            .collect();

        let root = (self.start, other.start);
        let mut parent: HashMap<(Node, Node), Option<((Node, Node), Symbol)>> = HashMap::new();
        parent.insert(root, None);
        let mut queue = VecDeque::from([root]);
        while let Some(pair @ (u, v)) = queue.pop_front() {
            for z in self.alphabet.symbols() {
                let (u2, r1) = self.transition(u, z);
                let (v2, r2) = other.transition(v, map[z.0]);
                if (r1 - r2).abs() > REWARD_TOLERANCE {
                    let mut word = vec![z];
                    let mut cur = pair;
                    while let Some(Some((prev, sym))) = parent.get(&cur) {
                        word.push(*sym);
                        cur = *prev;
                    }
                    word.reverse();
                    return Ok(Some(word.into_iter().map(Observation::Sym).collect()));
                }
                let next = (u2, v2);
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((pair, z)));
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    /// Nodes reachable from the start node.
    pub fn reachable_nodes(&self) -> Vec<Node> {
        let mut seen = vec![false; self.num_nodes()];
        seen[self.start.0] = true;
        let mut order = vec![self.start];
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            i += 1;
            for z in self.alphabet.symbols() {
                let (v, _) = self.transition(u, z);
                if !seen[v.0] {
                    seen[v.0] = true;
                    order.push(v);
                }
            }
        }
        order
    }

    /// Copy of this machine with one edge replaced.
    pub fn with_edge(&self, from: Node, z: Symbol, to: Node, reward: f64) -> Result<Self, AutomataError> {
        let mut builder = MachineBuilder { machine: self.clone() };
        builder.set_edge(from, z, to, reward)?;
        Ok(builder.build())
    }
}

impl fmt::Display for MealyRewardMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::io::mrm::emit_mrm(self))
    }
}
