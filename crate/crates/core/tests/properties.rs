//! Randomised invariants.

mod common;

use common::{alphabet, random_labeling, random_machine, random_mdp};
use mrm_learn::automata::Observation;
use mrm_learn::io::mrm::{emit_mrm, parse_mrm};
use mrm_learn::lstar::{learn, MachineTeacher};
use mrm_learn::mdp::{discounted_sum, mean_payoff};
use mrm_learn::product::product;
use mrm_learn::solver::value_iteration;
use mrm_learn::trace::History;
use mrm_learn::{ActionId, MachineBuilder, MealyRewardMachine, ObservationTable, StateId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scaled(m: &MealyRewardMachine, c: f64) -> MealyRewardMachine {
    let mut b = MachineBuilder::new(m.alphabet().clone(), m.num_nodes()).default_reward(m.default_reward() * c);
    for u in m.nodes() {
        for z in m.alphabet().symbols() {
            let (v, r) = m.transition(u, z);
            b.set_edge(u, z, v, r * c).unwrap();
        }
    }
    b.build()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn positive_reward_scaling_keeps_the_strategy(seed in any::<u64>(), c in 0.1f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = alphabet(rng.gen_range(1..=3));
        let mdp = { let (n, k) = (rng.gen_range(1..=4), rng.gen_range(1..=3)); random_mdp(&mut rng, n, k) };
        let lab = random_labeling(&mut rng, &sigma, &mdp);
        let m = { let n = rng.gen_range(1..=3); random_machine(&mut rng, &sigma, n, 9) };
        let (v1, s1) = value_iteration(&product(&mdp, &lab, &m).unwrap(), 0.9, 1e-10).unwrap();
        let (v2, s2) = value_iteration(&product(&mdp, &lab, &scaled(&m, c)).unwrap(), 0.9, 1e-10).unwrap();
        prop_assert_eq!(s1, s2);
        for (a, b) in v1.as_slice().iter().zip(v2.as_slice()) {
            prop_assert!((a * c - b).abs() <= 1e-6 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn history_rewards_equal_the_run_of_its_observations(seed in any::<u64>(), len in 0usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = alphabet(rng.gen_range(1..=3));
        let mdp = { let (n, k) = (rng.gen_range(1..=4), rng.gen_range(1..=2)); random_mdp(&mut rng, n, k) };
        let lab = random_labeling(&mut rng, &sigma, &mdp);
        let m = { let n = rng.gen_range(1..=3); random_machine(&mut rng, &sigma, n, 9) };
        let mut states = vec![mdp.initial()];
        let mut actions = Vec::new();
        for _ in 0..len {
            let s = *states.last().unwrap();
            let a: Vec<ActionId> = mdp.enabled_actions(s).collect();
            let a = a[rng.gen_range(0..a.len())];
            actions.push(a);
            states.push(mdp.sample_transition(s, a, &mut rng).unwrap());
        }
        let obs: Vec<Observation> = actions.iter().zip(&states[1..]).map(|(&a, &s)| lab.label(a, s)).collect();
        let history = History::new(states, actions);
        prop_assert_eq!(m.rewards_of_history(&lab, &history).unwrap(), m.run(&obs).unwrap());
    }

    #[test]
    fn discounted_sum_is_linear(xs in prop::collection::vec(-50.0f64..50.0, 0..40), c in -3.0f64..3.0, gamma in 0.01f64..1.0) {
        let ys: Vec<f64> = xs.iter().map(|x| c * x + 1.0).collect();
        let ones = vec![1.0; xs.len()];
        let lhs = discounted_sum(&ys, gamma);
        let rhs = c * discounted_sum(&xs, gamma) + discounted_sum(&ones, gamma);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        if !xs.is_empty() {
            let mp = mean_payoff(&xs).unwrap();
            prop_assert!((mp * xs.len() as f64 - xs.iter().sum::<f64>()).abs() < 1e-9);
        }
    }

    #[test]
    fn machine_files_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = alphabet(rng.gen_range(1..=4));
        let m = { let n = rng.gen_range(1..=5); random_machine(&mut rng, &sigma, n, 9) };
        let back = parse_mrm(&emit_mrm(&m)).unwrap();
        prop_assert_eq!(back.equivalent(&m).unwrap(), None);
        prop_assert_eq!(emit_mrm(&back), emit_mrm(&m));
    }

    #[test]
    fn learned_machines_reproduce_random_words(seed in any::<u64>(), words in prop::collection::vec(prop::collection::vec(0usize..4, 0..12), 1..8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = rng.gen_range(1..=4);
        let sigma = alphabet(z);
        let target = { let n = rng.gen_range(1..=5); random_machine(&mut rng, &sigma, n, 9) };
        let (h, _, _) = learn(ObservationTable::new(sigma.clone()).unwrap(), &mut MachineTeacher::new(&target)).unwrap();
        for w in words {
            let w: Vec<_> = w.into_iter().map(|i| mrm_learn::Symbol(i % z)).collect();
            prop_assert_eq!(h.run_word(&w).unwrap(), target.run_word(&w).unwrap());
        }
    }
}

#[test]
fn state_ids_are_plain_indices() {
    assert_eq!(StateId(3).0, 3);
}
