//! Chasing a single observation: UCT Monte Carlo tree search on a shaped
//! reward, or uniformly random actions.
//!
//! While pursuing `z` the shaped reward of entering `s'` via `a` is `−x` when
//! `λ(a, s')` is null, `−y` when it is some other symbol and `+y` when it is
//! `z`; seeing `z` ends a simulated trajectory.

use rand::Rng;

use crate::automata::{Observation, Symbol};
use crate::env::Domain;
use crate::mdp::{sample_categorical, ActionId, StateId};

use super::config::{MctsConfig, PlannerKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Planner {
    Mcts(MctsConfig),
    Random,
}

impl Planner {
    pub fn new(kind: PlannerKind, mcts: MctsConfig) -> Self {
        match kind {
            PlannerKind::Mcts => Planner::Mcts(mcts),
            PlannerKind::Random => Planner::Random,
        }
    }

    /// Action to take in `state` while pursuing `target`, or `None` if no
    /// action is enabled there.
    pub fn choose<R: Rng + ?Sized>(
        &self,
        domain: &Domain,
        state: StateId,
        target: Symbol,
        rng: &mut R,
    ) -> Option<ActionId> {
        match self {
            Planner::Random => random_action(domain, state, rng),
            Planner::Mcts(cfg) => Mcts::new(domain, *cfg, target).plan(state, rng),
        }
    }
}

fn random_action<R: Rng + ?Sized>(domain: &Domain, state: StateId, rng: &mut R) -> Option<ActionId> {
    let mdp = &domain.mdp;
    let n = mdp.enabled_actions(state).count();
    if n == 0 {
        return None;
    }
    mdp.enabled_actions(state).nth(rng.gen_range(0..n))
}

#[derive(Debug, Clone, Default)]
struct Arm {
    enabled: bool,
    visits: u32,
    total: f64,
    /// Sampled successor states and their tree nodes.
    children: Vec<(StateId, usize)>,
}

#[derive(Debug, Clone)]
struct TreeNode {
    visits: u32,
    arms: Vec<Arm>,
}

/// Closed-loop search tree: a node is reached by an action sequence and the
/// successor states actually sampled along it.
struct Mcts<'d> {
    domain: &'d Domain,
    cfg: MctsConfig,
    target: Symbol,
    nodes: Vec<TreeNode>,
}

impl<'d> Mcts<'d> {
    fn new(domain: &'d Domain, cfg: MctsConfig, target: Symbol) -> Self {
        Mcts {
            domain,
            cfg,
            target,
            nodes: Vec::new(),
        }
    }

    fn add_node(&mut self, state: StateId) -> usize {
        let mdp = &self.domain.mdp;
        let arms = mdp
            .actions()
            .map(|a| Arm {
                enabled: mdp.distribution(state, a).is_some(),
                ..Arm::default()
            })
            .collect();
        self.nodes.push(TreeNode { visits: 0, arms });
        self.nodes.len() - 1
    }

    /// Samples a successor and its shaped reward; `true` when the target was
    /// observed.
    fn transition<R: Rng + ?Sized>(&self, s: StateId, a: ActionId, rng: &mut R) -> (StateId, f64, bool) {
        let row = self.domain.mdp.distribution(s, a).expect("enabled action");
        let next = sample_categorical(row, rng, |&(t, p)| (t, p));
        match self.domain.labeling.label(a, next) {
            Observation::Null => (next, -self.cfg.x, false),
            Observation::Sym(z) if z == self.target => (next, self.cfg.y, true),
            Observation::Sym(_) => (next, -self.cfg.y, false),
        }
    }

    fn rollout<R: Rng + ?Sized>(&self, mut s: StateId, depth: usize, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for _ in 0..depth {
            let Some(a) = random_action(self.domain, s, rng) else {
                break;
            };
            let (next, r, done) = self.transition(s, a, rng);
            total += r;
            if done {
                break;
            }
            s = next;
        }
        total
    }

    fn select(&self, node: usize) -> Option<usize> {
        let n = &self.nodes[node];
        if let Some(i) = n.arms.iter().position(|a| a.enabled && a.visits == 0) {
            return Some(i);
        }
        let log_n = f64::from(n.visits.max(1)).ln();
        let mut best: Option<(usize, f64)> = None;
        for (i, arm) in n.arms.iter().enumerate().filter(|(_, a)| a.enabled) {
            let v = f64::from(arm.visits);
            let score = arm.total / v / self.cfg.y + self.cfg.exploration * (log_n / v).sqrt();
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        best.map(|(i, _)| i)
    }

    /// One trajectory from `node` (in `state`) with `depth` actions left;
    /// returns its shaped return.
    fn simulate<R: Rng + ?Sized>(&mut self, node: usize, state: StateId, depth: usize, rng: &mut R) -> f64 {
        if depth == 0 {
            return 0.0;
        }
        let Some(i) = self.select(node) else {
            return 0.0;
        };
        let (next, r, done) = self.transition(state, ActionId(i), rng);
        let ret = if done {
            r
        } else {
            let known = self.nodes[node].arms[i]
                .children
                .iter()
                .find(|(s, _)| *s == next)
                .map(|&(_, c)| c);
            match known {
                Some(child) => r + self.simulate(child, next, depth - 1, rng),
                None => {
                    let child = self.add_node(next);
                    self.nodes[node].arms[i].children.push((next, child));
                    let tail = self.rollout(next, depth - 1, rng);
                    self.nodes[child].visits = 1;
                    r + tail
                }
            }
        };
        let n = &mut self.nodes[node];
        n.visits += 1;
        n.arms[i].visits += 1;
        n.arms[i].total += ret;
        ret
    }

    /// Root action with the best mean simulated return; ties go to the
    /// lowest action index.
    fn plan<R: Rng + ?Sized>(&mut self, state: StateId, rng: &mut R) -> Option<ActionId> {
        let root = self.add_node(state);
        if !self.nodes[root].arms.iter().any(|a| a.enabled) {
            return None;
        }
        for _ in 0..self.cfg.trajectories_per_action {
            self.simulate(root, state, self.cfg.depth, rng);
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, arm) in self.nodes[root].arms.iter().enumerate() {
            if arm.visits == 0 {
                continue;
            }
            let mean = arm.total / f64::from(arm.visits);
            if best.is_none_or(|(_, b)| mean > b) {
                best = Some((i, mean));
            }
        }
        best.map(|(i, _)| ActionId(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{build_treasure_map, treasure_grid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_step_from_the_target_takes_that_step() {
        let d = build_treasure_map(1.0).unwrap();
        let g = treasure_grid(1.0).unwrap();
        let m = d.alphabet().lookup("m").unwrap();
        let planner = Planner::Mcts(MctsConfig::default());
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = planner.choose(&d, g.state_at(1, 7).unwrap(), m, &mut rng).unwrap();
            assert_eq!(d.mdp.action_name(a), "south");
            let a = planner.choose(&d, g.state_at(2, 8).unwrap(), m, &mut rng).unwrap();
            assert_eq!(d.mdp.action_name(a), "west");
        }
    }

    #[test]
    fn same_seed_same_action() {
        let d = build_treasure_map(0.85).unwrap();
        let t = d.alphabet().lookup("t").unwrap();
        let planner = Planner::Mcts(MctsConfig::default());
        let pick = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            planner.choose(&d, d.mdp.initial(), t, &mut rng)
        };
        assert_eq!(pick(9), pick(9));
    }

    #[test]
    fn far_targets_still_yield_legal_actions() {
        let d = build_treasure_map(1.0).unwrap();
        let t = d.alphabet().lookup("t").unwrap();
        let cfg = MctsConfig {
            depth: 2,
            ..MctsConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Planner::Mcts(cfg).choose(&d, d.mdp.initial(), t, &mut rng).unwrap();
        assert!(d.mdp.distribution(d.mdp.initial(), a).is_some());
        let r = Planner::Random.choose(&d, d.mdp.initial(), t, &mut rng).unwrap();
        assert!(r.0 < d.mdp.num_actions());
    }
}
