//! Grid worlds loaded from ASCII maps.
//!
//! ```text
//! ; comment
//! S...#
//! .m..t
//! legend:
//! m = map
//! t = treasure
//! ```
//!
//! One row per line: `.` is an open unlabeled cell, `#` a wall, `S` the open
//! start cell, and every other character must appear in the `legend:` block,
//! which maps it to an observation name. The legend order fixes the alphabet
//! order. Lines starting with `;` are comments.

use std::collections::VecDeque;

use crate::automata::{Alphabet, Observation, Symbol};
use crate::mdp::{ActionId, LabelingFunction, NrMdp, NrMdpBuilder, StateId};

use super::EnvError;

pub const MOVES: [&str; 4] = ["north", "east", "south", "west"];
const DELTAS: [(isize, isize); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];

#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    width: usize,
    height: usize,
    open: Vec<bool>,
    labels: Vec<Option<Symbol>>,
    alphabet: Alphabet,
    start: (usize, usize),
    apf: f64,
    /// Dense state index of each open cell, row-major.
    state_of: Vec<Option<StateId>>,
    cells: Vec<(usize, usize)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> EnvError {
    EnvError::MapParse {
        line,
        message: message.into(),
    }
}

impl GridWorld {
    /// Parses a map and fixes the action precision factor: the probability
    /// that a move into an open cell succeeds rather than leaving the agent
    /// in place.
    pub fn parse(text: &str, apf: f64) -> Result<Self, EnvError> {
        if !(apf > 0.0 && apf <= 1.0) {
            return Err(EnvError::InvalidApf(apf));
        }
        let mut rows: Vec<(usize, &str)> = Vec::new();
        let mut legend: Vec<(char, String)> = Vec::new();
        let mut in_legend = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end();
            if line.trim_start().starts_with(';') || line.trim().is_empty() {
                continue;
            }
            if line.trim() == "legend:" {
                in_legend = true;
                continue;
            }
            if in_legend {
                let (key, name) = line
                    .split_once('=')
                    .ok_or_else(|| parse_err(line_no, "legend entries look like `c = name`"))?;
                let mut chars = key.trim().chars();
                let c = match (chars.next(), chars.next()) {
                    (Some(c), None) => c,
                    _ => return Err(parse_err(line_no, "legend key must be a single character")),
                };
                if matches!(c, '.' | '#' | 'S') {
                    return Err(parse_err(line_no, format!("`{c}` is reserved")));
                }
                if legend.iter().any(|(k, _)| *k == c) {
                    return Err(parse_err(line_no, format!("`{c}` defined twice")));
                }
                legend.push((c, name.trim().to_owned()));
            } else {
                rows.push((line_no, line));
            }
        }
        if rows.is_empty() {
            return Err(parse_err(1, "map has no rows"));
        }
        let width = rows[0].1.chars().count();
        let height = rows.len();
        let alphabet = Alphabet::new(legend.iter().map(|(_, n)| n.clone()))
            .map_err(|e| parse_err(0, format!("legend: {e}")))?;

        let mut open = vec![false; width * height];
        let mut labels = vec![None; width * height];
        let mut start = None;
        for (y, &(line_no, row)) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(parse_err(line_no, format!("row width differs from {width}")));
            }
            for (x, c) in row.chars().enumerate() {
                let i = y * width + x;
                match c {
                    '#' => {}
                    '.' => open[i] = true,
                    'S' => {
                        if start.is_some() {
                            return Err(parse_err(line_no, "second start cell"));
                        }
                        start = Some((x, y));
                        open[i] = true;
                    }
                    c => {
                        let k = legend
                            .iter()
                            .position(|(k, _)| *k == c)
                            .ok_or_else(|| parse_err(line_no, format!("`{c}` is not in the legend")))?;
                        open[i] = true;
                        labels[i] = Some(Symbol(k));
                    }
                }
            }
        }
        let start = start.ok_or_else(|| parse_err(rows[0].0, "no start cell `S`"))?;

        let mut state_of = vec![None; width * height];
        let mut cells = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if open[y * width + x] {
                    state_of[y * width + x] = Some(StateId(cells.len()));
                    cells.push((x, y));
                }
            }
        }
        let grid = GridWorld {
            width,
            height,
            open,
            labels,
            alphabet,
            start,
            apf,
            state_of,
            cells,
        };
        grid.check_reachability()?;
        Ok(grid)
    }

    fn check_reachability(&self) -> Result<(), EnvError> {
        let mut seen = vec![false; self.width * self.height];
        let (sx, sy) = self.start;
        seen[sy * self.width + sx] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(cell) = queue.pop_front() {
            for d in 0..DELTAS.len() {
                if let Some((x, y)) = self.neighbour(cell, d) {
                    if !seen[y * self.width + x] {
                        seen[y * self.width + x] = true;
                        queue.push_back((x, y));
                    }
                }
            }
        }
        for (i, label) in self.labels.iter().enumerate() {
            if let (Some(z), false) = (label, seen[i]) {
                return Err(EnvError::Unreachable(self.alphabet.name(*z).to_owned()));
            }
        }
        Ok(())
    }

    /// Open cell one step in direction `d`, if any.
    fn neighbour(&self, (x, y): (usize, usize), d: usize) -> Option<(usize, usize)> {
        let (dx, dy) = DELTAS[d];
        let nx = x.checked_add_signed(dx)?;
        let ny = y.checked_add_signed(dy)?;
        (nx < self.width && ny < self.height && self.open[ny * self.width + nx]).then_some((nx, ny))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn apf(&self) -> f64 {
        self.apf
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn start(&self) -> (usize, usize) {
        self.start
    }

    /// State of the open cell at column `x`, row `y`.
    pub fn state_at(&self, x: usize, y: usize) -> Option<StateId> {
        if x < self.width && y < self.height {
            self.state_of[y * self.width + x]
        } else {
            None
        }
    }

    pub fn cell_of(&self, s: StateId) -> (usize, usize) {
        self.cells[s.0]
    }

    pub fn label_at(&self, x: usize, y: usize) -> Observation {
        match self.labels.get(y * self.width + x).copied().flatten() {
            Some(z) => Observation::Sym(z),
            None => Observation::Null,
        }
    }

    /// Every open cell as a state.
    pub fn open_states(&self) -> Vec<StateId> {
        (0..self.cells.len()).map(StateId).collect()
    }

    /// The rewardless MDP over open cells and the labeling that reports a
    /// cell's symbol whenever it is entered (including by getting stuck).
    pub fn build(&self) -> Result<(NrMdp, LabelingFunction), EnvError> {
        let names: Vec<String> = self.cells.iter().map(|(x, y)| format!("({x},{y})")).collect();
        let mut b = NrMdpBuilder::new(names, MOVES)?;
        for (i, &cell) in self.cells.iter().enumerate() {
            let s = StateId(i);
            for d in 0..MOVES.len() {
                match self.neighbour(cell, d) {
                    Some((x, y)) => {
                        let t = self.state_of[y * self.width + x].expect("open cell");
                        b.transition(s, ActionId(d), [(t, self.apf), (s, 1.0 - self.apf)])?;
                    }
                    None => {
                        b.transition(s, ActionId(d), [(s, 1.0)])?;
                    }
                };
            }
        }
        let (sx, sy) = self.start;
        b.initial(self.state_at(sx, sy).expect("start is open"))?;
        let mdp = b.build()?;
        let mut lab = LabelingFunction::new(self.alphabet.clone(), MOVES.len(), self.cells.len());
        for (i, &(x, y)) in self.cells.iter().enumerate() {
            lab.set_state(StateId(i), self.label_at(x, y));
        }
        Ok((mdp, lab))
    }
}
