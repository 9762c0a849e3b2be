//! Seeded experiment batches: run configuration, per-trial metrics and the
//! CSV report.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::agent::{
    run_approximate, run_optimal, AgentError, ExperimentLog, LearnerConfig, Padding, Planner, PlannerKind, Threshold,
};
use crate::automata::{MachineBuilder, MealyRewardMachine};
use crate::env::{build_cookie_domain, build_treasure_map, Domain, EnvError};
use crate::io::config::{parse_entries, ConfigError, Entry};
use crate::io::explicit::{parse_labeling, parse_mdp};
use crate::io::mrm::parse_mrm;
use crate::io::ModelParseError;
use crate::lstar::ObservationTable;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Treasure,
    Cookie,
    /// A world read from an explicit MDP, its labeling and the hidden machine.
    Custom {
        mdp: PathBuf,
        labeling: PathBuf,
        machine: PathBuf,
    },
}

impl DomainSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DomainSpec::Treasure => "treasure",
            DomainSpec::Cookie => "cookie",
            DomainSpec::Custom { .. } => "custom",
        }
    }
}

/// Which learner runs and which planner chases observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Approximate learner; queries and exploitation explore at random.
    LearnRandom,
    /// Approximate learner; queries and exploitation plan with MCTS.
    LearnMcts,
    /// Optimal learner: solve every hypothesis product and exploit the
    /// optimal strategy.
    Optimal,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::LearnRandom => "learn-random",
            Mode::LearnMcts => "learn-mcts",
            Mode::Optimal => "optimal",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        [Mode::LearnRandom, Mode::LearnMcts, Mode::Optimal]
            .into_iter()
            .find(|m| m.name() == text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub mode: Mode,
    /// Action precision factor of the treasure grid.
    pub apf: f64,
    pub trials: usize,
    /// Trial `i` is seeded with `seed + i`.
    pub seed: u64,
    /// Overrides the hidden machine's reward for null observations.
    pub default_reward: Option<f64>,
    pub learner: LearnerConfig,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            domain: DomainSpec::Treasure,
            mode: Mode::LearnMcts,
            apf: 0.95,
            trials: 1,
            seed: 0,
            default_reward: None,
            learner: LearnerConfig::for_domain("treasure"),
            out: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Model {
        path: PathBuf,
        #[source]
        source: ModelParseError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("trial {trial}: {source}")]
    Agent {
        trial: usize,
        #[source]
        source: AgentError,
    },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

fn read(path: &Path) -> Result<String, ExperimentError> {
    std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_owned(),
        source,
    })
}

fn model<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, ModelParseError>) -> Result<T, ExperimentError> {
    parse(&read(path)?).map_err(|source| ExperimentError::Model {
        path: path.to_owned(),
        source,
    })
}

impl RunConfig {
    /// Reads a config file; `overrides` (e.g. command-line flags) win over
    /// the file. The learner defaults follow the configured domain.
    pub fn load(path: Option<&Path>, overrides: Vec<Entry>) -> Result<Self, ExperimentError> {
        let mut entries = match path {
            Some(p) => parse_entries(&read(p)?)?,
            None => Vec::new(),
        };
        entries.retain(|e| !overrides.iter().any(|o| o.key == e.key));
        entries.extend(overrides);
        Ok(RunConfig::from_entries(&entries)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        RunConfig::from_entries(&parse_entries(text)?)
    }

    pub fn from_entries(entries: &[Entry]) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let find = |key: &str| entries.iter().find(|e| e.key == key);
        // The domain decides the learner defaults, so it is read first.
        let model_path = |key: &str| find(key).map(|e| PathBuf::from(&e.value));
        if let Some(e) = find("domain") {
            cfg.domain = match e.value.as_str() {
                "treasure" => DomainSpec::Treasure,
                "cookie" => DomainSpec::Cookie,
                "custom" => {
                    let missing = |k: &str| e.error(format!("a custom domain needs `{k}`"));
                    DomainSpec::Custom {
                        mdp: model_path("mdp").ok_or_else(|| missing("mdp"))?,
                        labeling: model_path("labeling").ok_or_else(|| missing("labeling"))?,
                        machine: model_path("machine").ok_or_else(|| missing("machine"))?,
                    }
                }
                other => return Err(e.error(format!("unknown domain `{other}` (treasure, cookie, custom)"))),
            };
        }
        cfg.learner = LearnerConfig::for_domain(cfg.domain.name());
        if cfg.domain == DomainSpec::Cookie {
            cfg.mode = Mode::LearnRandom;
        }
        let l = &mut cfg.learner;
        for e in entries {
            match e.key.as_str() {
                "domain" | "mdp" | "labeling" | "machine" | "beta" => {}
                "mode" => {
                    cfg.mode = Mode::parse(&e.value)
                        .ok_or_else(|| e.error("expected learn-random, learn-mcts or optimal"))?
                }
                "apf" => cfg.apf = e.parse()?,
                "trials" => cfg.trials = e.parse()?,
                "seed" => cfg.seed = e.parse()?,
                "default_reward" => cfg.default_reward = Some(e.parse()?),
                "out" => cfg.out = Some(PathBuf::from(&e.value)),
                "theta" => {
                    l.theta = match e.value.as_str() {
                        "dynamic" => Threshold::Dynamic { beta: 0.5 },
                        _ => Threshold::Fixed(e.parse()?),
                    }
                }
                "gamma" => l.gamma = e.parse()?,
                "k" => l.k = e.parse()?,
                "acts_to_ext" => l.acts_to_ext = e.parse()?,
                "epoch_actions" => l.epoch_actions = e.parse()?,
                "mq_action_budget" => l.mq_action_budget = e.parse()?,
                "mq_max_attempts" => l.mq_max_attempts = e.parse()?,
                "arbitrary_reward" => l.arbitrary_reward = e.parse()?,
                "padding" => {
                    l.padding = Padding::parse(&e.value).ok_or_else(|| e.error("expected arbitrary or hypothesis"))?
                }
                "ct_bound" => l.ct_bound = e.parse()?,
                "ct_budget" => l.ct_budget = e.parse()?,
                "query_planner" => {
                    l.query_planner = PlannerKind::parse(&e.value).ok_or_else(|| e.error("expected mcts or random"))?
                }
                "max_table_rows" => l.max_table_rows = e.parse()?,
                "max_rounds" => l.max_rounds = e.parse()?,
                "row_tolerance" => l.row_tolerance = e.parse()?,
                "mcts_depth" => l.mcts.depth = e.parse()?,
                "mcts_trajectories" => l.mcts.trajectories_per_action = e.parse()?,
                "mcts_exploration" => l.mcts.exploration = e.parse()?,
                "shaping_x" => l.mcts.x = e.parse()?,
                "shaping_y" => l.mcts.y = e.parse()?,
                _ => return Err(e.error("unknown key")),
            }
        }
        // `beta` refines a dynamic threshold and is applied after `theta`.
        if let Some(e) = find("beta") {
            match cfg.learner.theta {
                Threshold::Dynamic { .. } => cfg.learner.theta = Threshold::Dynamic { beta: e.parse()? },
                Threshold::Fixed(_) => return Err(e.error("only applies to `theta = dynamic`")),
            }
        }
        cfg.validate(entries)?;
        Ok(cfg)
    }

    fn validate(&self, entries: &[Entry]) -> Result<(), ConfigError> {
        let at = |field: &str, message: String| {
            let line = entries.iter().find(|e| e.key == field).map_or(0, |e| e.line);
            ConfigError::Field {
                line,
                field: field.into(),
                message,
            }
        };
        if self.trials == 0 {
            return Err(at("trials", "must be at least 1".into()));
        }
        if !(self.apf > 0.0 && self.apf <= 1.0) {
            return Err(at("apf", format!("{} outside (0, 1]", self.apf)));
        }
        if self.default_reward.is_some_and(|c| !c.is_finite()) {
            return Err(at("default_reward", "must be finite".into()));
        }
        self.learner.validate().map_err(|e| {
            let key = match e.field {
                "beta" if !entries.iter().any(|x| x.key == "beta") => "theta",
                f => f,
            };
            at(key, e.reason)
        })
    }

    /// The world this configuration runs in.
    pub fn build_domain(&self) -> Result<Domain, ExperimentError> {
        let domain = match &self.domain {
            DomainSpec::Treasure => build_treasure_map(self.apf)?,
            DomainSpec::Cookie => build_cookie_domain()?,
            DomainSpec::Custom { mdp, labeling, machine } => {
                let target = model(machine, parse_mrm)?;
                let mdp_model = model(mdp, parse_mdp)?;
                let lab = model(labeling, |t| parse_labeling(t, &mdp_model, target.alphabet()))?;
                let start = mdp_model.initial();
                Domain::new("custom", mdp_model, lab, target, vec![start])?
            }
        };
        match self.default_reward {
            Some(c) => {
                let target = with_default_reward(&domain.target, c);
                Ok(domain.with_target(target)?)
            }
            None => Ok(domain),
        }
    }
}

fn with_default_reward(m: &MealyRewardMachine, c: f64) -> MealyRewardMachine {
    let mut b = MachineBuilder::new(m.alphabet().clone(), m.num_nodes()).default_reward(c);
    for u in m.nodes() {
        for z in m.alphabet().symbols() {
            let (v, r) = m.transition(u, z);
            b.set_edge(u, z, v, r).expect("same alphabet and nodes");
        }
    }
    b.start(m.start()).expect("same nodes").build()
}

/// Metrics of one trial, one CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub apf: f64,
    pub total_return: f64,
    pub mq_attempts: usize,
    pub counterexamples: usize,
    pub learn_seconds: f64,
    pub exploit_seconds: f64,
    pub epochs: usize,
    pub learned_ok: bool,
}

/// Everything a single trial produced.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub result: TrialResult,
    pub hypothesis: MealyRewardMachine,
    pub table: ObservationTable,
    pub log: ExperimentLog,
}

/// Runs trial `trial` of `cfg` in `domain` with its own seeded generator.
pub fn run_trial(cfg: &RunConfig, domain: &Domain, trial: usize) -> Result<TrialOutcome, ExperimentError> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut learner = cfg.learner.clone();
    let wrap = |source| ExperimentError::Agent { trial, source };
    let (hypothesis, table, log) = match cfg.mode {
        Mode::LearnRandom | Mode::LearnMcts => {
            let kind = if cfg.mode == Mode::LearnRandom {
                PlannerKind::Random
            } else {
                PlannerKind::Mcts
            };
            learner.query_planner = kind;
            let exploit = Planner::new(kind, learner.mcts);
            let out = run_approximate(domain, &learner, &exploit, learner.acts_to_ext, &mut rng).map_err(wrap)?;
            (out.hypothesis, out.table, out.log)
        }
        Mode::Optimal => {
            let out = run_optimal(domain, &learner, &mut rng).map_err(wrap)?;
            (out.hypothesis, out.table, out.log)
        }
    };
    let learned_ok = hypothesis
        .equivalent(&domain.target)
        .map_err(|e| wrap(AgentError::Table(e.into())))?
        .is_none();
    Ok(TrialOutcome {
        result: TrialResult {
            trial,
            seed,
            apf: cfg.apf,
            total_return: log.total_return,
            mq_attempts: log.mq_attempts,
            counterexamples: log.counterexamples,
            learn_seconds: log.learn_seconds,
            exploit_seconds: log.exploit_seconds,
            epochs: log.epochs,
            learned_ok,
        },
        hypothesis,
        table,
        log,
    })
}

/// Runs `cfg.trials` independent trials, in parallel, and returns their
/// metrics in trial order.
pub fn run_batch(cfg: &RunConfig) -> Result<Vec<TrialResult>, ExperimentError> {
    let domain = cfg.build_domain()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, &domain, trial).map(|o| o.result))
        .collect()
}

pub const CSV_HEADER: [&str; 10] = [
    "trial",
    "seed",
    "apf",
    "return",
    "mq_attempts",
    "counterexamples",
    "learn_seconds",
    "exploit_seconds",
    "epochs",
    "learned_ok",
];

/// Columns holding wall-clock measurements; everything else is a function
/// of the configuration and seed.
pub const TIMING_COLUMNS: [&str; 2] = ["learn_seconds", "exploit_seconds"];

/// Sample mean and standard deviation (`n − 1` denominator; 0 for one value).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn pm(xs: impl Iterator<Item = f64>) -> String {
    let xs: Vec<f64> = xs.collect();
    let (m, sd) = mean_sd(&xs);
    format!("{m:.3}±{sd:.3}")
}

/// One row per trial, then a `mean±sd` row.
pub fn write_csv<W: Write>(rows: &[TrialResult], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.apf.to_string(),
            r.total_return.to_string(),
            r.mq_attempts.to_string(),
            r.counterexamples.to_string(),
            format!("{:.6}", r.learn_seconds),
            format!("{:.6}", r.exploit_seconds),
            r.epochs.to_string(),
            u8::from(r.learned_ok).to_string(),
        ])?;
    }
    if !rows.is_empty() {
        w.write_record([
            "mean±sd".to_string(),
            String::new(),
            rows[0].apf.to_string(),
            pm(rows.iter().map(|r| r.total_return)),
            pm(rows.iter().map(|r| r.mq_attempts as f64)),
            pm(rows.iter().map(|r| r.counterexamples as f64)),
            pm(rows.iter().map(|r| r.learn_seconds)),
            pm(rows.iter().map(|r| r.exploit_seconds)),
            pm(rows.iter().map(|r| r.epochs as f64)),
            pm(rows.iter().map(|r| f64::from(u8::from(r.learned_ok)))),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Blanks the timing columns of a CSV report so reports can be compared.
pub fn strip_timing(csv_text: &str) -> String {
    let timing: Vec<usize> = CSV_HEADER
        .iter()
        .enumerate()
        .filter(|(_, h)| TIMING_COLUMNS.contains(h))
        .map(|(i, _)| i)
        .collect();
    csv_text
        .lines()
        .map(|line| {
            line.split(',')
                .enumerate()
                .map(|(i, f)| if timing.contains(&i) { "" } else { f })
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::COMMAND_LINE;

    #[test]
    fn defaults_follow_the_domain() {
        let c = RunConfig::parse("domain = cookie\n").unwrap();
        assert_eq!(c.mode, Mode::LearnRandom);
        assert_eq!(c.learner.max_table_rows, 40);
        let t = RunConfig::parse("").unwrap();
        assert_eq!((t.domain.clone(), t.mode, t.trials), (DomainSpec::Treasure, Mode::LearnMcts, 1));
    }

    #[test]
    fn zero_trials_is_a_config_error() {
        let err = RunConfig::parse("apf = 0.8\ntrials = 0\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Field {
                line: 2,
                field: "trials".into(),
                message: "must be at least 1".into()
            }
        );
    }

    #[test]
    fn learner_errors_point_at_their_key() {
        let err = RunConfig::parse("gamma = 1.5\n").unwrap_err();
        assert!(matches!(err, ConfigError::Field { line: 1, ref field, .. } if field == "gamma"), "{err}");
        let err = RunConfig::parse("theta = 3\nbeta = 0.2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Field { line: 2, .. }));
        assert!(RunConfig::parse("colour = red\n").is_err());
        assert!(RunConfig::parse("domain = custom\n").is_err());
        assert!(RunConfig::parse("apf = 0\n").is_err());
    }

    #[test]
    fn overrides_replace_file_values() {
        let dir = std::env::temp_dir().join(format!("mrm-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "trials = 4\nseed = 9\n").unwrap();
        let cfg = RunConfig::load(Some(&path), vec![Entry::new(COMMAND_LINE, "seed", "2")]).unwrap();
        assert_eq!((cfg.trials, cfg.seed), (4, 2));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn sample_statistics() {
        assert_eq!(mean_sd(&[2.0]), (2.0, 0.0));
        let (m, sd) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn csv_has_header_rows_and_summary() {
        let row = |trial: usize, ret: f64| TrialResult {
            trial,
            seed: 10 + trial as u64,
            apf: 0.5,
            total_return: ret,
            mq_attempts: 3,
            counterexamples: 1,
            learn_seconds: 0.25,
            exploit_seconds: 0.5,
            epochs: 2,
            learned_ok: trial == 0,
        };
        let mut buf = Vec::new();
        write_csv(&[row(0, 1.0), row(1, 3.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1], "0,10,0.5,1,3,1,0.250000,0.500000,2,1");
        assert_eq!(
            lines[3],
            "mean±sd,,0.5,2.000±1.414,3.000±0.000,1.000±0.000,0.250±0.000,0.500±0.000,2.000±0.000,0.500±0.707"
        );
        assert_eq!(strip_timing(&text).lines().nth(1), Some("0,10,0.5,1,3,1,,,2,1"));
    }

    #[test]
    fn custom_domains_load_from_files() {
        let dir = std::env::temp_dir().join(format!("mrm-custom-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("w.mdp"), "states: a b\nactions: go\na go b 1\nb go a 1\n").unwrap();
        std::fs::write(dir.join("w.lab"), "go b z\n").unwrap();
        std::fs::write(dir.join("w.mrm"), "alphabet: z\nstart: u0\nu0 z u0 2\n").unwrap();
        let text = format!(
            "domain = custom\nmdp = {0}/w.mdp\nlabeling = {0}/w.lab\nmachine = {0}/w.mrm\nmode = optimal\nacts_to_ext = 10\ntheta = -1e9\n",
            dir.display()
        );
        let cfg = RunConfig::parse(&text).unwrap();
        let rows = run_batch(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].learned_ok);
        assert_eq!(rows[0].total_return, 10.0);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
