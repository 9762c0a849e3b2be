//! Conformance testing as a stand-in for equivalence queries: every
//! single-edge reward mutation of the treasure machine is tested in the
//! grid until a counterexample is experienced.
//!
//! cargo run --example conformance_testing

use mrm_learn::agent::{conformance_test, LearnerConfig, Planner};
use mrm_learn::env::build_treasure_map;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let d = build_treasure_map(1.0).expect("shipped map parses");
    let cfg = LearnerConfig::default();
    let planner = Planner::new(cfg.query_planner, cfg.mcts);
    let mut refuted = 0;
    let mut total = 0;
    for u in d.target.reachable_nodes() {
        for z in d.alphabet().symbols() {
            let (v, r) = d.target.transition(u, z);
            let mutant = d.target.with_edge(u, z, v, r + 5.0).expect("edge within bounds");
            let mut rng = ChaCha8Rng::seed_from_u64(total);
            total += 1;
            match conformance_test(&d, &mutant, &cfg, &planner, &mut rng) {
                Some(ce) => {
                    refuted += 1;
                    println!("u{} {:<3} refuted by {}", u.0, d.alphabet().name(z), d.alphabet().format_word(&ce.word));
                }
                None => println!("u{} {:<3} survived", u.0, d.alphabet().name(z)),
            }
        }
    }
    println!("{refuted}/{total} mutants refuted");
}
