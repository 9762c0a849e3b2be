//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use mrm_learn::automata::Observation;
use mrm_learn::mdp::NrMdpBuilder;
use mrm_learn::product::{ProductMdp, RewardMdp};
use mrm_learn::{ActionId, Alphabet, LabelingFunction, MachineBuilder, MealyRewardMachine, Node, NrMdp, StateId, Symbol};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn alphabet(size: usize) -> Alphabet {
    Alphabet::new((0..size).map(|i| format!("z{i}"))).expect("distinct names")
}

/// A machine with `nodes` nodes over `alphabet`, uniform random successors
/// and integer rewards in `0..=max_reward`. Not necessarily minimal.
pub fn random_machine<R: Rng>(rng: &mut R, alphabet: &Alphabet, nodes: usize, max_reward: u32) -> MealyRewardMachine {
    let mut b = MachineBuilder::new(alphabet.clone(), nodes);
    for u in 0..nodes {
        for z in alphabet.symbols() {
            let v = rng.gen_range(0..nodes);
            let r = f64::from(rng.gen_range(0..=max_reward));
            b.set_edge(Node(u), z, Node(v), r).expect("edge within bounds");
        }
    }
    b.build()
}

/// A random rewardless MDP in which every state has at least one enabled
/// action, with probabilities that are multiples of 1/4.
pub fn random_mdp<R: Rng>(rng: &mut R, states: usize, actions: usize) -> NrMdp {
    let mut b = NrMdpBuilder::new(
        (0..states).map(|i| format!("s{i}")),
        (0..actions).map(|i| format!("a{i}")),
    )
    .expect("non-empty model");
    for s in 0..states {
        let forced = rng.gen_range(0..actions);
        for a in 0..actions {
            if a != forced && rng.gen_bool(0.25) {
                continue;
            }
            let mut quarters = vec![0u32; states];
            for _ in 0..4 {
                quarters[rng.gen_range(0..states)] += 1;
            }
            let row: Vec<(StateId, f64)> = (0..states)
                .filter(|&t| quarters[t] > 0)
                .map(|t| (StateId(t), f64::from(quarters[t]) / 4.0))
                .collect();
            b.transition(StateId(s), ActionId(a), row).expect("valid row");
        }
    }
    b.build().expect("complete model")
}

/// Labels each (action, state) pair with a random symbol or null.
pub fn random_labeling<R: Rng>(rng: &mut R, alphabet: &Alphabet, mdp: &NrMdp) -> LabelingFunction {
    let mut lab = LabelingFunction::new(alphabet.clone(), mdp.num_actions(), mdp.num_states());
    let symbols: Vec<Symbol> = alphabet.symbols().collect();
    for a in mdp.actions() {
        for s in mdp.states() {
            if rng.gen_bool(0.7) {
                lab.set(a, s, Observation::Sym(symbols[rng.gen_range(0..symbols.len())]));
            }
        }
    }
    lab
}

/// Exact value of a memoryless strategy by solving
/// `(I − γP) V = γ P r` with a dense LU factorisation.
pub fn exact_policy_value(p: &ProductMdp, choice: &[ActionId], gamma: f64) -> Vec<f64> {
    let n = p.num_states();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for x in 0..n {
        let row = p.edges(x, choice[x]).expect("enabled action");
        for e in row {
            m[(x, e.target)] -= gamma * e.probability;
            rhs[x] += gamma * e.probability * e.reward;
        }
    }
    let v = m.lu().solve(&rhs).expect("I − γP is invertible for γ < 1");
    v.iter().copied().collect()
}

/// Optimal values by enumerating every memoryless deterministic strategy
/// and taking the state-wise maximum of their exact values.
pub fn brute_force_optimum(p: &ProductMdp, gamma: f64) -> Vec<f64> {
    let n = p.num_states();
    let enabled: Vec<Vec<ActionId>> = (0..n)
        .map(|x| {
            (0..p.num_actions())
                .map(ActionId)
                .filter(|&a| p.edges(x, a).is_some())
                .collect()
        })
        .collect();
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut digits = vec![0usize; n];
    loop {
        let choice: Vec<ActionId> = (0..n).map(|x| enabled[x][digits[x]]).collect();
        for (b, v) in best.iter_mut().zip(exact_policy_value(p, &choice, gamma)) {
            *b = b.max(v);
        }
        // Odometer over the per-state action choices.
        let mut x = 0;
        loop {
            if x == n {
                return best;
            }
            digits[x] += 1;
            if digits[x] < enabled[x].len() {
                break;
            }
            digits[x] = 0;
            x += 1;
        }
    }
}

/// Size of the minimal machine equivalent to `m`: reachable nodes split by
/// Moore partition refinement on (reward, successor class) signatures.
pub fn minimal_size(m: &MealyRewardMachine) -> usize {
    let reachable = m.reachable_nodes();
    let symbols: Vec<Symbol> = m.alphabet().symbols().collect();
    let mut class: std::collections::HashMap<Node, usize> = reachable.iter().map(|&u| (u, 0)).collect();
    let mut count = 1;
    loop {
        let mut signatures: Vec<Vec<(u64, usize)>> = Vec::new();
        let mut next = std::collections::HashMap::new();
        for &u in &reachable {
            let mut sig = vec![(0, class[&u])];
            for &z in &symbols {
                let (v, r) = m.transition(u, z);
                sig.push((r.to_bits(), class[&v]));
            }
            let id = match signatures.iter().position(|s| *s == sig) {
                Some(i) => i,
                None => {
                    signatures.push(sig);
                    signatures.len() - 1
                }
            };
            next.insert(u, id);
        }
        if signatures.len() == count {
            return count;
        }
        count = signatures.len();
        class = next;
    }
}
