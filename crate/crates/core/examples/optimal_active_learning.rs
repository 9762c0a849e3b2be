//! The optimal learner: each complete table is turned into a product MDP and
//! solved exactly; the optimal strategy is exploited while its value meets
//! the threshold, and conformance testing refutes it otherwise.
//!
//! cargo run --example optimal_active_learning -- [apf] [seed]

use mrm_learn::agent::{run_optimal, LearnerConfig};
use mrm_learn::env::build_treasure_map;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let apf: f64 = args.next().map_or(0.95, |a| a.parse().expect("apf is a number"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed is an integer"));

    let domain = build_treasure_map(apf).expect("shipped map parses");
    let cfg = LearnerConfig::for_domain("treasure");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = run_optimal(&domain, &cfg, &mut rng).expect("learning runs");

    println!("{}", out.hypothesis);
    println!(
        "optimal value {:.3}; return {} in {} epochs; {} hypotheses, {} conformance tests, {} counterexamples",
        out.value, out.log.total_return, out.log.epochs, out.log.hypotheses, out.log.conformance_tests, out.log.counterexamples
    );
}
