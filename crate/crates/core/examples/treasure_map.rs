//! Approximate active learning in the treasure-map grid: membership queries
//! are answered by chasing observations with MCTS, and the hypothesis'
//! best observation sequence is exploited until a counterexample appears.
//!
//! cargo run --example treasure_map -- [apf] [seed]

use mrm_learn::agent::{run_approximate, LearnerConfig, Planner};
use mrm_learn::env::build_treasure_map;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let apf: f64 = args.next().map_or(0.95, |a| a.parse().expect("apf is a number"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed is an integer"));

    let domain = build_treasure_map(apf).expect("shipped map parses");
    let cfg = LearnerConfig::for_domain("treasure");
    let exploit = Planner::new(cfg.query_planner, cfg.mcts);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = run_approximate(&domain, &cfg, &exploit, cfg.acts_to_ext, &mut rng).expect("learning runs");

    println!("{}", out.hypothesis);
    let log = &out.log;
    println!(
        "APF {apf}: return {} over {} actions in {} epochs; {} MQ attempts for {} queries; {} counterexamples",
        log.total_return, log.exploit_actions, log.epochs, log.mq_attempts, log.membership_queries, log.counterexamples
    );
    let exact = out.hypothesis.equivalent(&domain.target).expect("same alphabet").is_none();
    println!("hidden machine recovered: {exact}");
}
