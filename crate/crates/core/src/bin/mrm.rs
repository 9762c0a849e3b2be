use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mrm_learn::agent::exploit::run_strategy_episode;
use mrm_learn::experiment::{run_batch, run_trial, write_csv, ExperimentError, RunConfig};
use mrm_learn::io::config::{Entry, COMMAND_LINE};
use mrm_learn::io::mrm::{emit_mrm, parse_mrm};
use mrm_learn::mdp::discounted_sum;
use mrm_learn::product::{export_strategy, product};
use mrm_learn::solver::{value_iteration, DEFAULT_TOLERANCE};

/// Learn Mealy reward machines by acting in labeled MDPs.
#[derive(Parser)]
#[command(name = "mrm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one learning trial and print the learned machine.
    Learn(Common),
    /// Solve the product with a machine and follow its optimal strategy.
    Exploit {
        #[command(flatten)]
        common: Common,
        /// Machine to exploit (defaults to the domain's hidden machine).
        #[arg(long)]
        machine: Option<PathBuf>,
    },
    /// Run seeded trials and write one CSV row per trial.
    Batch(Common),
    /// Run one learning trial and dump its final observation table.
    InspectTable(Common),
}

#[derive(Args)]
struct Common {
    /// treasure, cookie or custom.
    #[arg(long)]
    domain: Option<String>,
    /// learn-random, learn-mcts or optimal.
    #[arg(long)]
    mode: Option<String>,
    /// Action precision factor of the treasure grid.
    #[arg(long)]
    apf: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// `key = value` run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, ExperimentError> {
        let flags = [
            ("domain", &self.domain),
            ("mode", &self.mode),
            ("apf", &self.apf),
            ("trials", &self.trials),
            ("seed", &self.seed),
        ];
        let mut overrides: Vec<Entry> = flags
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| Entry::new(COMMAND_LINE, k, v.clone())))
            .collect();
        if let Some(out) = &self.out {
            overrides.push(Entry::new(COMMAND_LINE, "out", out.display().to_string()));
        }
        RunConfig::load(self.config.as_deref(), overrides)
    }
}

fn emit(cfg: &RunConfig, text: &[u8]) -> Result<(), ExperimentError> {
    use std::io::Write;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|source| ExperimentError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout().write_all(text).map_err(|source| ExperimentError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Learn(common) => {
            let cfg = common.load()?;
            let domain = cfg.build_domain()?;
            let outcome = run_trial(&cfg, &domain, 0)?;
            let r = &outcome.result;
            eprintln!(
                "{} {}: return {} after {} epochs, {} MQ attempts, {} counterexamples, learned_ok {}",
                domain.name,
                cfg.mode.name(),
                r.total_return,
                r.epochs,
                r.mq_attempts,
                r.counterexamples,
                u8::from(r.learned_ok)
            );
            if outcome.log.table_limit_reached {
                eprintln!("row limit reached: learning stopped and the last complete hypothesis was kept");
            }
            emit(&cfg, emit_mrm(&outcome.hypothesis).as_bytes())?;
        }
        Command::Exploit { common, machine } => {
            let cfg = common.load()?;
            let domain = cfg.build_domain()?;
            let hypothesis = match machine {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|source| ExperimentError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    parse_mrm(&text).map_err(|source| ExperimentError::Model { path, source })?
                }
                None => domain.target.clone(),
            };
            let p = product(&domain.mdp, &domain.labeling, &hypothesis)?;
            let (values, strategy) = value_iteration(&p, cfg.learner.gamma, DEFAULT_TOLERANCE)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let trace = run_strategy_episode(&domain, &hypothesis, &p, &strategy, cfg.learner.acts_to_ext, &mut rng);
            eprintln!(
                "value at start {:.6}; {} actions, return {}, discounted {:.6}",
                values.get(p.initial()),
                trace.len(),
                trace.rewards.iter().sum::<f64>(),
                discounted_sum(&trace.rewards, cfg.learner.gamma)
            );
            emit(&cfg, export_strategy(&p, &strategy).as_bytes())?;
        }
        Command::Batch(common) => {
            let cfg = common.load()?;
            let rows = run_batch(&cfg)?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            emit(&cfg, &buf)?;
        }
        Command::InspectTable(common) => {
            let cfg = common.load()?;
            let domain = cfg.build_domain()?;
            let outcome = run_trial(&cfg, &domain, 0)?;
            emit(&cfg, outcome.table.to_string().as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
