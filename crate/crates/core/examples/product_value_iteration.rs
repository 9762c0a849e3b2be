//! Builds the product of the treasure grid with its hidden machine, solves
//! it by value iteration, and checks that simulating the grid with the
//! machine earns exactly the product's rewards.
//!
//! cargo run --example product_value_iteration -- [apf]

use mrm_learn::agent::exploit::{run_product_episode, run_strategy_episode};
use mrm_learn::env::build_treasure_map;
use mrm_learn::mdp::discounted_sum;
use mrm_learn::product::{product, RewardMdp};
use mrm_learn::solver::{value_iteration, DEFAULT_GAMMA, DEFAULT_TOLERANCE};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let apf: f64 = std::env::args().nth(1).map_or(0.9, |a| a.parse().expect("apf is a number"));
    let d = build_treasure_map(apf).expect("shipped map parses");
    let p = product(&d.mdp, &d.labeling, &d.target).expect("matching alphabets");
    let (values, strategy) = value_iteration(&p, DEFAULT_GAMMA, DEFAULT_TOLERANCE).expect("solver converges");
    println!(
        "{} MDP states × {} nodes → {} reachable product states; V(s0, u0) = {:.4}",
        d.mdp.num_states(),
        d.target.num_nodes(),
        p.num_states(),
        values.get(p.initial())
    );

    let episodes = 200;
    let mut total = 0.0;
    for seed in 0..episodes {
        let trace = run_strategy_episode(&d, &d.target, &p, &strategy, 300, &mut ChaCha8Rng::seed_from_u64(seed));
        let (_, rewards) = run_product_episode(&p, &strategy, 300, &mut ChaCha8Rng::seed_from_u64(seed));
        assert_eq!(trace.rewards, rewards, "seed {seed}");
        total += discounted_sum(&rewards, DEFAULT_GAMMA);
    }
    println!("mean discounted return over {episodes} episodes: {:.4}", total / episodes as f64);
}
