//! Seeded batch of learning trials written as CSV, as the `mrm batch`
//! command does, from an inline `key = value` configuration.
//!
//! cargo run --example batch_experiment

use mrm_learn::experiment::{run_batch, write_csv, RunConfig};

const CONFIG: &str = "\
domain = treasure
mode = learn-mcts
apf = 0.9
trials = 3
seed = 100
acts_to_ext = 1000
";

fn main() {
    let cfg = RunConfig::parse(CONFIG).expect("valid configuration");
    let rows = run_batch(&cfg).expect("trials run");
    write_csv(&rows, std::io::stdout().lock()).expect("stdout is writable");
}
