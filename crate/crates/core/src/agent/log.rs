//! Per-trial metrics.

/// Counters and timings of one learning trial. All counters only grow during
/// a trial.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentLog {
    /// Hidden-machine reward collected while exploiting.
    pub total_return: f64,
    /// Episodes started to answer membership queries.
    pub mq_attempts: usize,
    /// Distinct membership queries answered.
    pub membership_queries: usize,
    /// Membership queries that ran out of budget.
    pub unanswered_queries: usize,
    /// Counterexamples ingested by the table.
    pub counterexamples: usize,
    /// Hypotheses built.
    pub hypotheses: usize,
    /// Conformance tests run.
    pub conformance_tests: usize,
    pub learn_seconds: f64,
    pub exploit_seconds: f64,
    /// Exploitation epochs (restarts).
    pub epochs: usize,
    pub exploit_actions: usize,
    /// Learning stopped at `max_table_rows`; the last complete hypothesis
    /// was kept for the rest of the trial.
    pub table_limit_reached: bool,
}
