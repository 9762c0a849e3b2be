//! The approximate learner: L* with membership queries answered by chasing
//! observations, and exploitation by chasing the hypothesis' most rewarding
//! length-`k` word from random restarts until a counterexample shows up.

use std::time::Instant;

use rand::Rng;

use crate::automata::MealyRewardMachine;
use crate::env::Domain;
use crate::lstar::{ObservationTable, TableError};

use super::config::{LearnerConfig, Padding};
use super::experience::{get_experience, ExperienceMemory};
use super::exploit::{chase_sequence, good_observation_sequence};
use super::log::ExperimentLog;
use super::planner::Planner;
use super::simulator::Simulator;
use super::{AgentError, Counterexample};

#[derive(Debug, Clone)]
pub struct LearningOutcome {
    pub hypothesis: MealyRewardMachine,
    pub table: ObservationTable,
    pub log: ExperimentLog,
}

/// A fresh table for `domain`. The learner knows the step cost `c` that the
/// environment charges for null observations.
pub fn new_table(domain: &Domain, cfg: &LearnerConfig) -> Result<ObservationTable, AgentError> {
    Ok(ObservationTable::new(domain.alphabet().clone())?
        .with_default_reward(domain.target.default_reward())
        .with_tolerance(cfg.row_tolerance))
}

/// Answers membership queries until the table is closed and consistent.
/// Returns `false` if `S` outgrew `cfg.max_table_rows` first.
#[allow(clippy::too_many_arguments)]
pub(crate) fn fill_table<R: Rng + ?Sized>(
    domain: &Domain,
    cfg: &LearnerConfig,
    planner: &Planner,
    table: &mut ObservationTable,
    memory: &mut ExperienceMemory,
    previous: Option<&MealyRewardMachine>,
    log: &mut ExperimentLog,
    rng: &mut R,
) -> Result<bool, AgentError> {
    let mut sim = Simulator::new(domain);
    while let Some(query) = table.get_mq() {
        if table.prefixes().len() > cfg.max_table_rows {
            return Ok(false);
        }
        let out = get_experience(&mut sim, planner, memory, &query, cfg.mq_action_budget, cfg.mq_max_attempts, rng);
        log.mq_attempts += out.attempts;
        log.membership_queries += 1;
        if !out.answer.is_answered() {
            log.unanswered_queries += 1;
        }
        let answer = match (cfg.padding, previous) {
            (Padding::Hypothesis, Some(h)) => out.answer.resolve_with(&query, h),
            _ => out.answer.resolve(query.len(), cfg.arbitrary_reward),
        };
        table.resolve_mq(&query, &answer)?;
    }
    Ok(true)
}

/// Fills the table and builds its hypothesis. Past the row limit the
/// previous hypothesis is kept and learning stops (`frozen`); without one
/// the trial fails.
#[allow(clippy::too_many_arguments)]
pub(crate) fn next_hypothesis<R: Rng + ?Sized>(
    domain: &Domain,
    cfg: &LearnerConfig,
    planner: &Planner,
    table: &mut ObservationTable,
    memory: &mut ExperienceMemory,
    previous: Option<MealyRewardMachine>,
    frozen: &mut bool,
    log: &mut ExperimentLog,
    rng: &mut R,
) -> Result<MealyRewardMachine, AgentError> {
    if !*frozen {
        if fill_table(domain, cfg, planner, table, memory, previous.as_ref(), log, rng)? {
            log.hypotheses += 1;
            return Ok(table.build_reward_machine()?);
        }
        *frozen = true;
        log.table_limit_reached = true;
    }
    previous.ok_or(AgentError::TableLimit(cfg.max_table_rows))
}

/// Feeds a counterexample to the table and remembers its word, so every
/// query it covers is answered from experience. Returns `false` if the
/// current hypothesis already explains it, which can happen when an earlier
/// unanswerable query was padded with a reward that happens to be right.
pub(crate) fn ingest(
    table: &mut ObservationTable,
    memory: &mut ExperienceMemory,
    ce: &Counterexample,
    log: &mut ExperimentLog,
) -> Result<bool, AgentError> {
    memory.insert(&ce.word, &ce.rewards);
    match table.add_counter_example(&ce.word, &ce.rewards) {
        Ok(()) => {
            log.counterexamples += 1;
            Ok(true)
        }
        Err(TableError::NotACounterexample) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// Learns until `budget` exploitation actions have been spent (experiments
/// use `cfg.acts_to_ext`). Membership queries are answered with `cfg.query_planner`; `exploit` picks
/// actions while exploiting.
pub fn run_approximate<R: Rng + ?Sized>(
    domain: &Domain,
    cfg: &LearnerConfig,
    exploit: &Planner,
    budget: usize,
    rng: &mut R,
) -> Result<LearningOutcome, AgentError> {
    cfg.validate()?;
    let query_planner = Planner::new(cfg.query_planner, cfg.mcts);
    let mut table = new_table(domain, cfg)?;
    let mut memory = ExperienceMemory::new();
    let mut log = ExperimentLog::default();
    let mut previous: Option<MealyRewardMachine> = None;
    let mut frozen = false;
    loop {
        let t0 = Instant::now();
        let hypothesis = next_hypothesis(
            domain,
            cfg,
            &query_planner,
            &mut table,
            &mut memory,
            previous.take(),
            &mut frozen,
            &mut log,
            rng,
        )?;
        log.learn_seconds += t0.elapsed().as_secs_f64();

        let remaining = budget - log.exploit_actions;
        if remaining == 0 {
            return Ok(LearningOutcome { hypothesis, table, log });
        }
        let t1 = Instant::now();
        let sequence = good_observation_sequence(&hypothesis, cfg.k);
        let report = chase_sequence(domain, &hypothesis, &sequence, exploit, remaining, rng);
        log.exploit_actions += report.actions;
        log.epochs += report.epochs;
        log.total_return += report.total_return;
        log.exploit_seconds += t1.elapsed().as_secs_f64();

        match report.counterexample {
            Some(ce) if log.exploit_actions < budget => {
                if !frozen {
                    let t2 = Instant::now();
                    ingest(&mut table, &mut memory, &ce, &mut log)?;
                    log.learn_seconds += t2.elapsed().as_secs_f64();
                }
                previous = Some(hypothesis);
            }
            _ => return Ok(LearningOutcome { hypothesis, table, log }),
        }
    }
}
