//! The cookie domain: membership queries answered by random exploration.
//! Prints the hidden machine, the learned one and the first word on which
//! they differ, if any.
//!
//! cargo run --example cookie_domain -- [seed]

use mrm_learn::agent::{run_approximate, LearnerConfig, Planner};
use mrm_learn::env::build_cookie_domain;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed: u64 = std::env::args().nth(1).map_or(0, |a| a.parse().expect("seed is an integer"));
    let domain = build_cookie_domain().expect("cookie world builds");
    let cfg = LearnerConfig::for_domain("cookie");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = run_approximate(&domain, &cfg, &Planner::Random, cfg.acts_to_ext, &mut rng).expect("learning runs");

    println!("hidden machine:\n{}", domain.target);
    println!(
        "learned {} nodes; return {}; {} MQ attempts, {} of {} queries unanswered; row limit reached: {}",
        out.hypothesis.num_nodes(),
        out.log.total_return,
        out.log.mq_attempts,
        out.log.unanswered_queries,
        out.log.membership_queries,
        out.log.table_limit_reached
    );
    match out.hypothesis.equivalent(&domain.target).expect("same alphabet") {
        None => println!("learned machine is equivalent to the hidden one"),
        Some(w) => println!("machines differ on {}", domain.alphabet().format_trace(&w)),
    }
}
