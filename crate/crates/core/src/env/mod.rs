//! Benchmark worlds: each bundles a rewardless MDP, its labeling function and
//! the hidden reward machine an agent has to learn.

pub mod cookie;
pub mod grid;

use rand::Rng;
use thiserror::Error;

use crate::automata::{Alphabet, AutomataError, MachineBuilder, MealyRewardMachine, Node};
use crate::mdp::{LabelingFunction, MdpError, NrMdp, StateId};

pub use cookie::{build_cookie_domain, cookie_machine};
pub use grid::GridWorld;

/// The treasure map shipped with the crate.
pub const TREASURE_MAP: &str = include_str!("../../maps/treasure.map");

/// Cost of every step that observes nothing in the treasure-map experiments.
pub const TREASURE_DEFAULT_REWARD: f64 = -1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("action precision factor {0} outside (0, 1]")]
    InvalidApf(f64),
    #[error("map line {line}: {message}")]
    MapParse { line: usize, message: String },
    #[error("cell labeled `{0}` cannot be reached from the start")]
    Unreachable(String),
    #[error("labeling alphabet [{labeling}] differs from machine alphabet [{machine}]")]
    AlphabetMismatch { labeling: String, machine: String },
    #[error("labeling covers {lab_actions}×{lab_states} pairs but the MDP has {mdp_actions}×{mdp_states}")]
    DimensionMismatch {
        lab_actions: usize,
        lab_states: usize,
        mdp_actions: usize,
        mdp_states: usize,
    },
    #[error("no restart states")]
    NoStarts,
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// An environment an agent can learn in: dynamics, labels, the hidden
/// machine, and the distribution used for random restarts.
#[derive(Debug, Clone)]
pub struct Domain {
    pub name: String,
    pub mdp: NrMdp,
    pub labeling: LabelingFunction,
    pub target: MealyRewardMachine,
    starts: Vec<StateId>,
}

impl Domain {
    /// The labeling and the machine must use the same alphabet in the same
    /// order; `starts` is the support of the uniform restart distribution.
    pub fn new(
        name: impl Into<String>,
        mdp: NrMdp,
        labeling: LabelingFunction,
        target: MealyRewardMachine,
        starts: Vec<StateId>,
    ) -> Result<Self, EnvError> {
        if labeling.alphabet() != target.alphabet() {
            return Err(EnvError::AlphabetMismatch {
                labeling: labeling.alphabet().names().join(" "),
                machine: target.alphabet().names().join(" "),
            });
        }
        if labeling.num_actions() != mdp.num_actions() || labeling.num_states() != mdp.num_states() {
            return Err(EnvError::DimensionMismatch {
                lab_actions: labeling.num_actions(),
                lab_states: labeling.num_states(),
                mdp_actions: mdp.num_actions(),
                mdp_states: mdp.num_states(),
            });
        }
        if starts.is_empty() {
            return Err(EnvError::NoStarts);
        }
        if let Some(s) = starts.iter().find(|s| s.0 >= mdp.num_states()) {
            return Err(MdpError::UnknownState(s.0).into());
        }
        Ok(Domain {
            name: name.into(),
            mdp,
            labeling,
            target,
            starts,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.labeling.alphabet()
    }

    pub fn starts(&self) -> &[StateId] {
        &self.starts
    }

    /// A uniformly drawn restart state.
    pub fn random_start<R: Rng + ?Sized>(&self, rng: &mut R) -> StateId {
        self.starts[rng.gen_range(0..self.starts.len())]
    }

    /// Same world with a different hidden machine over the same alphabet.
    pub fn with_target(self, target: MealyRewardMachine) -> Result<Self, EnvError> {
        Domain::new(self.name, self.mdp, self.labeling, target, self.starts)
    }
}

/// Five nodes: picking up the map (u0→u1), hiring a guide or buying
/// equipment (u1→u2), collecting the treasure (u2→u4), and selling it to a
/// jeweller, which either ends the job (straight from u1 into the absorbing
/// u3) or restocks for another round (u4→u1).
pub fn treasure_machine(default_reward: f64) -> MealyRewardMachine {
    let alphabet = Alphabet::new(["m", "e", "g", "t", "j1", "j2"]).expect("valid alphabet");
    let z = |n: &str| alphabet.lookup(n).expect("known symbol");
    let u = Node;
    let edges = [
        (0, "m", 1, 10.0),
        (1, "e", 2, 25.0),
        (1, "g", 2, 25.0),
        (1, "j1", 3, 60.0),
        (1, "j2", 3, 60.0),
        (2, "t", 4, 90.0),
        (4, "j1", 1, 35.0),
        (4, "j2", 1, 35.0),
    ];
    let mut b = MachineBuilder::new(alphabet.clone(), 5).default_reward(default_reward);
    for (from, sym, to, r) in edges {
        b.set_edge(u(from), z(sym), u(to), r).expect("edge over the alphabet");
    }
    b.build()
}

/// The shipped treasure grid at the given action precision factor.
pub fn treasure_grid(apf: f64) -> Result<GridWorld, EnvError> {
    GridWorld::parse(TREASURE_MAP, apf)
}

/// Treasure-map world with its five-node machine and a step cost of −1.
/// Random restarts are uniform over open cells.
pub fn build_treasure_map(apf: f64) -> Result<Domain, EnvError> {
    let grid = treasure_grid(apf)?;
    let (mdp, labeling) = grid.build()?;
    Domain::new(
        "treasure",
        mdp,
        labeling,
        treasure_machine(TREASURE_DEFAULT_REWARD),
        grid.open_states(),
    )
}
