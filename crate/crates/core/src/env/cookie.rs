//! The cookie domain: a yellow room with a button, a blue and a red room,
//! and hallways between them.
//!
//! ```text
//!     . . Y . .        Y = yellow room (button)
//!     . . h . .        h = hallway
//!     B h h h R        B = blue room, R = red room
//! ```
//!
//! Pressing the button in the yellow room places a fresh cookie in the blue
//! or the red room with probability ½ each and sweeps away old crumbs.
//! Eating in the room that holds the cookie removes it and leaves crumbs.
//! Everything else is deterministic; moves off the floor plan and actions
//! that do not apply leave the state unchanged.

use crate::automata::{Alphabet, MachineBuilder, MealyRewardMachine, Node, Observation};
use crate::mdp::{ActionId, LabelingFunction, NrMdp, NrMdpBuilder, StateId};

use super::{Domain, EnvError};

pub const ACTIONS: [&str; 6] = ["north", "east", "south", "west", "push_button", "eat"];
pub const SYMBOLS: [&str; 8] = [
    "blu", "blu_cook", "blu_crum", "red", "red_cook", "red_crum", "yel", "yel_bd",
];
const PUSH: usize = 4;
const EAT: usize = 5;

/// Floor cells as (x, y), yellow room first.
const CELLS: [(i32, i32); 7] = [(2, 0), (2, 1), (0, 2), (1, 2), (2, 2), (3, 2), (4, 2)];
const DELTAS: [(i32, i32); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Room {
    Yellow,
    Blue,
    Red,
    Hallway,
}

impl Room {
    fn of_cell(cell: usize) -> Room {
        match cell {
            0 => Room::Yellow,
            2 => Room::Blue,
            6 => Room::Red,
            _ => Room::Hallway,
        }
    }
}

/// Full underlying state of the cookie world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CookieState {
    /// Index into the floor plan; 0 is the yellow room.
    pub cell: usize,
    pub button_pressed: bool,
    /// `Room::Blue`, `Room::Red`, or `None` when no cookie is out.
    pub cookie: Option<Room>,
    pub crumbs_blue: bool,
    pub crumbs_red: bool,
}

impl CookieState {
    pub const COUNT: usize = CELLS.len() * 2 * 3 * 4;

    pub fn fresh(cell: usize) -> Self {
        CookieState {
            cell,
            button_pressed: false,
            cookie: None,
            crumbs_blue: false,
            crumbs_red: false,
        }
    }

    pub fn room(&self) -> Room {
        Room::of_cell(self.cell)
    }

    pub fn encode(&self) -> StateId {
        let cookie = match self.cookie {
            None => 0,
            Some(Room::Blue) => 1,
            Some(_) => 2,
        };
        let crumbs = usize::from(self.crumbs_blue) | usize::from(self.crumbs_red) << 1;
        StateId(((self.cell * 2 + usize::from(self.button_pressed)) * 3 + cookie) * 4 + crumbs)
    }

    pub fn decode(s: StateId) -> Self {
        let crumbs = s.0 % 4;
        let rest = s.0 / 4;
        let cookie = match rest % 3 {
            0 => None,
            1 => Some(Room::Blue),
            _ => Some(Room::Red),
        };
        let rest = rest / 3;
        CookieState {
            cell: rest / 2,
            button_pressed: rest % 2 == 1,
            cookie,
            crumbs_blue: crumbs & 1 == 1,
            crumbs_red: crumbs & 2 == 2,
        }
    }

    fn name(&self) -> String {
        let cookie = match self.cookie {
            None => "none",
            Some(Room::Blue) => "blue",
            Some(_) => "red",
        };
        format!(
            "c{}_b{}_{}_{}{}",
            self.cell,
            u8::from(self.button_pressed),
            cookie,
            u8::from(self.crumbs_blue),
            u8::from(self.crumbs_red)
        )
    }

    /// Successors of taking `action`, with probabilities.
    fn successors(&self, action: usize) -> Vec<(CookieState, f64)> {
        let mut next = *self;
        match action {
            0..=3 => {
                let (x, y) = CELLS[self.cell];
                let (dx, dy) = DELTAS[action];
                if let Some(c) = CELLS.iter().position(|&p| p == (x + dx, y + dy)) {
                    next.cell = c;
                }
            }
            PUSH if self.room() == Room::Yellow => {
                next.button_pressed = true;
                next.crumbs_blue = false;
                next.crumbs_red = false;
                let mut blue = next;
                blue.cookie = Some(Room::Blue);
                let mut red = next;
                red.cookie = Some(Room::Red);
                return vec![(blue, 0.5), (red, 0.5)];
            }
            EAT if self.cookie == Some(self.room()) => {
                next.cookie = None;
                next.button_pressed = false;
                match self.room() {
                    Room::Blue => next.crumbs_blue = true,
                    _ => next.crumbs_red = true,
                }
            }
            _ => {}
        }
        vec![(next, 1.0)]
    }

    /// What the agent reports on entering this state via `action`.
    fn label(&self, action: usize) -> Option<&'static str> {
        let (cook, crum, empty, room) = match self.room() {
            Room::Hallway => return None,
            Room::Yellow => return Some(if action == PUSH { "yel_bd" } else { "yel" }),
            Room::Blue => ("blu_cook", "blu_crum", "blu", Room::Blue),
            Room::Red => ("red_cook", "red_crum", "red", Room::Red),
        };
        let crumbs = if room == Room::Blue { self.crumbs_blue } else { self.crumbs_red };
        Some(if self.cookie == Some(room) {
            cook
        } else if crumbs {
            crum
        } else {
            empty
        })
    }
}

/// Two nodes: pressing the button arms the machine, and seeing crumbs right
/// after eating pays 1 and disarms it.
pub fn cookie_machine() -> MealyRewardMachine {
    let alphabet = Alphabet::new(SYMBOLS).expect("valid alphabet");
    let z = |n: &str| alphabet.lookup(n).expect("known symbol");
    let (v0, v1) = (Node(0), Node(1));
    MachineBuilder::new(alphabet.clone(), 2)
        .edge(v0, z("yel_bd"), v1, 0.0)
        .and_then(|b| b.edge(v1, z("yel_bd"), v1, 0.0))
        .and_then(|b| b.edge(v1, z("blu_crum"), v0, 1.0))
        .and_then(|b| b.edge(v1, z("red_crum"), v0, 1.0))
        .expect("edges over the cookie alphabet")
        .build()
}

pub fn build_cookie_mdp() -> Result<(NrMdp, LabelingFunction), EnvError> {
    let states: Vec<CookieState> = (0..CookieState::COUNT)
        .map(|i| CookieState::decode(StateId(i)))
        .collect();
    let mut b = NrMdpBuilder::new(states.iter().map(CookieState::name), ACTIONS)?;
    for st in &states {
        for a in 0..ACTIONS.len() {
            let row: Vec<(StateId, f64)> = st
                .successors(a)
                .into_iter()
                .map(|(t, p)| (t.encode(), p))
                .collect();
            b.transition(st.encode(), ActionId(a), row)?;
        }
    }
    b.initial(CookieState::fresh(0).encode())?;
    let mdp = b.build()?;

    let alphabet = Alphabet::new(SYMBOLS).expect("valid alphabet");
    let mut lab = LabelingFunction::new(alphabet.clone(), ACTIONS.len(), states.len());
    for st in &states {
        for a in 0..ACTIONS.len() {
            let obs = match st.label(a) {
                None => Observation::Null,
                Some(n) => Observation::Sym(alphabet.lookup(n).expect("known symbol")),
            };
            lab.set(ActionId(a), st.encode(), obs);
        }
    }
    Ok((mdp, lab))
}

/// The cookie world with its two-node reward machine. Random restarts put
/// the agent on any floor cell of an untouched world.
pub fn build_cookie_domain() -> Result<Domain, EnvError> {
    let (mdp, labeling) = build_cookie_mdp()?;
    let starts = (0..CELLS.len()).map(|c| CookieState::fresh(c).encode()).collect();
    Domain::new("cookie", mdp, labeling, cookie_machine(), starts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(d: &Domain, n: &str) -> Observation {
        Observation::Sym(d.alphabet().lookup(n).unwrap())
    }

    #[test]
    fn encoding_round_trips() {
        for i in 0..CookieState::COUNT {
            assert_eq!(CookieState::decode(StateId(i)).encode(), StateId(i));
        }
    }

    #[test]
    fn pushing_in_yellow_reports_button_down() {
        let d = build_cookie_domain().unwrap();
        let push = d.mdp.action_index("push_button").unwrap();
        let north = d.mdp.action_index("north").unwrap();
        for (t, _) in d.mdp.distribution(d.mdp.initial(), push).unwrap() {
            assert_eq!(d.labeling.label(push, *t), sym(&d, "yel_bd"));
            assert_eq!(d.labeling.label(north, *t), sym(&d, "yel"));
        }
    }

    #[test]
    fn hallways_are_null() {
        let d = build_cookie_domain().unwrap();
        for cell in [1, 3, 4, 5] {
            let s = CookieState::fresh(cell).encode();
            for a in d.mdp.actions() {
                assert_eq!(d.labeling.label(a, s), Observation::Null);
            }
        }
    }

    #[test]
    fn machine_pays_for_crumbs_after_the_button() {
        let d = build_cookie_domain().unwrap();
        let trace = [sym(&d, "yel_bd"), sym(&d, "blu_cook"), sym(&d, "blu_crum")];
        assert_eq!(d.target.run(&trace).unwrap(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn cookie_lands_in_blue_about_half_the_time() {
        let d = build_cookie_domain().unwrap();
        let push = d.mdp.action_index("push_button").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let blue = (0..n)
            .filter(|_| {
                let t = d.mdp.sample_transition(d.mdp.initial(), push, &mut rng).unwrap();
                CookieState::decode(t).cookie == Some(Room::Blue)
            })
            .count();
        let frac = blue as f64 / n as f64;
        assert!((0.48..=0.52).contains(&frac), "{frac}");
    }

    #[test]
    fn eating_leaves_crumbs_and_pays_once() {
        let d = build_cookie_domain().unwrap();
        let a = |n: &str| d.mdp.action_index(n).unwrap();
        let mut s = CookieState::fresh(0);
        s.button_pressed = true;
        s.cookie = Some(Room::Red);
        s.cell = 6;
        let row = d.mdp.distribution(s.encode(), a("eat")).unwrap();
        assert_eq!(row.len(), 1);
        let after = CookieState::decode(row[0].0);
        assert!(after.crumbs_red && after.cookie.is_none() && !after.button_pressed);
        assert_eq!(d.labeling.label(a("eat"), row[0].0), sym(&d, "red_crum"));
        // A second bite changes nothing.
        let again = d.mdp.distribution(row[0].0, a("eat")).unwrap();
        assert_eq!(again, &[(row[0].0, 1.0)]);
    }

    #[test]
    fn every_symbol_is_observable() {
        let d = build_cookie_domain().unwrap();
        let mut seen = vec![false; SYMBOLS.len()];
        for s in d.mdp.states() {
            for a in d.mdp.actions() {
                if let Observation::Sym(z) = d.labeling.label(a, s) {
                    seen[z.0] = true;
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
    }
}
