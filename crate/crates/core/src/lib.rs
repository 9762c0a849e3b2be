//! Active learning of Mealy reward machines in Markov decision processes.
//!
//! The crate is organised bottom-up:
//!
//! * [`automata`] — Mealy reward machines, their runs and equivalence.
//! * [`lstar`] — an L* observation table that learns such machines.
//! * [`mdp`], [`trace`] — rewardless MDPs, labeling functions and traces.
//! * [`product`], [`solver`] — the synchronized product with a machine and
//!   discounted value iteration over it.
//! * [`agent`] — the learning agents: membership queries answered by acting,
//!   MCTS planning, exploitation and conformance testing.
//! * [`env`] — the treasure-map grid and the cookie domain.
//! * [`io`], [`experiment`] — text formats, configuration and seeded batches.

pub mod agent;
pub mod automata;
pub mod env;
pub mod experiment;
pub mod io;
pub mod lstar;
pub mod mdp;
pub mod product;
pub mod solver;
pub mod trace;

pub use automata::{Alphabet, MachineBuilder, MealyRewardMachine, Node, Observation, Symbol};
pub use env::Domain;
pub use lstar::ObservationTable;
pub use mdp::{ActionId, LabelingFunction, NrMdp, StateId};
