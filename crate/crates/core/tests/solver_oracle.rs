//! Value iteration against exact linear solves of every memoryless strategy.

mod common;

use common::{alphabet, brute_force_optimum, exact_policy_value, random_labeling, random_machine, random_mdp};
use mrm_learn::mdp::NrMdpBuilder;
use mrm_learn::product::{product, RewardMdp};
use mrm_learn::solver::{evaluate_policy, sup_distance, value_iteration, DEFAULT_TOLERANCE};
use mrm_learn::{ActionId, LabelingFunction, MachineBuilder, Node, Observation, StateId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn geometric_series_matches_closed_form() {
    let mut b = NrMdpBuilder::new(["s"], ["loop"]).unwrap();
    b.transition(StateId(0), ActionId(0), [(StateId(0), 1.0)]).unwrap();
    let mdp = b.build().unwrap();
    let sigma = alphabet(1);
    let z = sigma.lookup("z0").unwrap();
    let mut lab = LabelingFunction::new(sigma.clone(), 1, 1);
    lab.set_state(StateId(0), Observation::Sym(z));
    let m = MachineBuilder::new(sigma, 1).edge(Node(0), z, Node(0), 1.0).unwrap().build();
    let p = product(&mdp, &lab, &m).unwrap();
    for gamma in [0.5, 0.9, 0.95] {
        let (v, _) = value_iteration(&p, gamma, DEFAULT_TOLERANCE).unwrap();
        let closed = gamma / (1.0 - gamma);
        assert!((v.get(0) - closed).abs() < 1e-8 * closed.max(1.0), "γ = {gamma}");
    }
}

#[test]
fn value_iteration_agrees_with_strategy_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let gamma = 0.9;
    for case in 0..200 {
        let states = rng.gen_range(1..=4);
        let actions = rng.gen_range(1..=2);
        let nodes = rng.gen_range(1..=3);
        let sigma = alphabet(rng.gen_range(1..=3));
        let mdp = random_mdp(&mut rng, states, actions);
        let lab = random_labeling(&mut rng, &sigma, &mdp);
        let m = random_machine(&mut rng, &sigma, nodes, 9);
        let p = product(&mdp, &lab, &m).unwrap();
        let (v, strategy) = value_iteration(&p, gamma, 1e-10).unwrap();
        let oracle = brute_force_optimum(&p, gamma);
        let gap = sup_distance(v.as_slice(), &oracle);
        assert!(gap < 1e-6, "case {case}: value iteration off by {gap}");

        // The greedy strategy is itself optimal under the exact solve.
        let choice: Vec<ActionId> = (0..p.num_states()).map(|x| strategy.action(x).unwrap()).collect();
        let greedy = exact_policy_value(&p, &choice, gamma);
        assert!(sup_distance(&greedy, &oracle) < 1e-6, "case {case}: greedy strategy is suboptimal");
        let evaluated = evaluate_policy(&p, &strategy, gamma, 1e-10).unwrap();
        assert!(sup_distance(evaluated.as_slice(), &greedy) < 1e-6, "case {case}");
    }
}
