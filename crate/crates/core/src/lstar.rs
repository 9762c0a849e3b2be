//! L* for Mealy machines whose outputs are rewards.
//!
//! The table is indexed by a prefix-closed set `S`, its one-symbol extensions
//! `S·Z`, and a suffix set `E` that starts as every single symbol. A cell
//! `(w, e)` holds the rewards emitted while reading `e` after `w`. Answers are
//! stored per full query word so that cells sharing a concatenation share an
//! answer. Counterexamples contribute all of their suffixes to `E`, which
//! keeps the rows of `S` pairwise distinct and `|S|` bounded by the size of
//! the minimal target.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::automata::{
    Alphabet, AutomataError, MachineBuilder, MealyRewardMachine, Node, RewardTrace, Symbol,
};

pub type Word = Vec<Symbol>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error("the input alphabet is empty")]
    EmptyAlphabet,
    #[error("answer has {answer} rewards for a query of length {query}")]
    LengthMismatch { query: usize, answer: usize },
    #[error("the observation table is not closed and consistent")]
    TableIncomplete,
    #[error("the hypothesis already reproduces this trace")]
    NotACounterexample,
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

#[derive(Debug, Clone)]
pub struct ObservationTable {
    alphabet: Alphabet,
    prefixes: Vec<Word>,
    prefix_set: HashSet<Word>,
    suffixes: Vec<Word>,
    suffix_set: HashSet<Word>,
    answers: HashMap<Word, RewardTrace>,
    /// Unanswered cell words in table order; kept in step with `S`, `E` and
    /// `answers` so that fetching the next query never rescans the table.
    queue: VecDeque<Word>,
    queued: HashSet<Word>,
    default_reward: f64,
    tolerance: f64,
    longest_counterexample: usize,
}

fn concat(a: &[Symbol], b: &[Symbol]) -> Word {
    let mut w = Vec::with_capacity(a.len() + b.len());
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w
}

impl ObservationTable {
    /// `S = {ε}`, `E = Z`, no answers.
    pub fn new(alphabet: Alphabet) -> Result<Self, TableError> {
        if alphabet.is_empty() {
            return Err(TableError::EmptyAlphabet);
        }
        let suffixes: Vec<Word> = alphabet.symbols().map(|z| vec![z]).collect();
        let mut table = ObservationTable {
            prefixes: vec![Vec::new()],
            prefix_set: HashSet::from([Vec::new()]),
            suffix_set: suffixes.iter().cloned().collect(),
            suffixes,
            alphabet,
            answers: HashMap::new(),
            queue: VecDeque::new(),
            queued: HashSet::new(),
            default_reward: 0.0,
            tolerance: 0.0,
            longest_counterexample: 0,
        };
        table.enqueue_rows(&[Vec::new()]);
        Ok(table)
    }

    /// Reward the hypotheses emit on null observations.
    pub fn with_default_reward(mut self, reward: f64) -> Self {
        self.default_reward = reward;
        self
    }

    /// Absolute tolerance for row comparison; 0 means exact equality.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn prefixes(&self) -> &[Word] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[Word] {
        &self.suffixes
    }

    pub fn num_answers(&self) -> usize {
        self.answers.len()
    }

    pub fn longest_counterexample(&self) -> usize {
        self.longest_counterexample
    }

    /// Rows of `S·Z` that are not themselves in `S`, in a fixed order.
    fn boundary(&self) -> impl Iterator<Item = Word> + '_ {
        self.prefixes.iter().flat_map(move |s| {
            self.alphabet
                .symbols()
                .map(move |z| concat(s, &[z]))
                .filter(move |t| !self.prefix_set.contains(t))
        })
    }

    fn all_rows(&self) -> impl Iterator<Item = Word> + '_ {
        self.prefixes.iter().cloned().chain(self.boundary())
    }

    /// Rewards recorded for cell `(row, suffix)`, if answered.
    pub fn cell(&self, row: &[Symbol], suffix: &[Symbol]) -> Option<&[f64]> {
        let answer = self.answers.get(&concat(row, suffix))?;
        Some(&answer[row.len()..])
    }

    fn cells_equal(&self, a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= self.tolerance)
    }

    fn rows_equal(&self, w1: &[Symbol], w2: &[Symbol]) -> bool {
        self.first_difference(w1, w2).is_none()
    }

    /// First suffix on which two fully answered rows differ.
    fn first_difference(&self, w1: &[Symbol], w2: &[Symbol]) -> Option<&Word> {
        self.suffixes.iter().find(|e| {
            match (self.cell(w1, e), self.cell(w2, e)) {
                (Some(a), Some(b)) => !self.cells_equal(a, b),
                _ => true,
            }
        })
    }

    fn enqueue(&mut self, q: Word) {
        if !self.answers.contains_key(&q) && self.queued.insert(q.clone()) {
            self.queue.push_back(q);
        }
    }

    /// Queues every cell of the new prefixes and of their new extensions.
    fn enqueue_rows(&mut self, new_prefixes: &[Word]) {
        let mut rows = Vec::new();
        for s in new_prefixes {
            rows.push(s.clone());
            for z in self.alphabet.symbols() {
                let t = concat(s, &[z]);
                if !self.prefix_set.contains(&t) {
                    rows.push(t);
                }
            }
        }
        let suffixes = self.suffixes.clone();
        for w in &rows {
            for e in &suffixes {
                self.enqueue(concat(w, e));
            }
        }
    }

    fn enqueue_suffix(&mut self, e: &[Symbol]) {
        let cells: Vec<Word> = self.all_rows().map(|w| concat(&w, e)).collect();
        for q in cells {
            self.enqueue(q);
        }
    }

    fn record(&mut self, word: Word, rewards: RewardTrace) {
        if self.queued.remove(&word) {
            if self.queue.front() == Some(&word) {
                self.queue.pop_front();
            } else {
                self.queue.retain(|q| *q != word);
            }
        }
        self.answers.insert(word, rewards);
    }

    /// Unanswered cells, each once, in table order.
    pub fn pending(&self) -> impl Iterator<Item = &Word> + '_ {
        self.queue.iter()
    }

    /// Next membership query, or `None` once the table is closed and
    /// consistent.
    pub fn get_mq(&self) -> Option<Word> {
        self.queue.front().cloned()
    }

    /// Number of cells still waiting for an answer.
    pub fn pending_count(&self) -> usize {
        self.queue.len()
    }

    pub fn is_complete(&self) -> bool {
        self.get_mq().is_none()
            && self.find_inconsistency().is_none()
            && self.find_unclosed().is_none()
    }

    fn check_word(&self, word: &[Symbol]) -> Result<(), TableError> {
        match word.iter().find(|z| !self.alphabet.contains(**z)) {
            Some(&z) => Err(AutomataError::UnknownObservation(z.into()).into()),
            None => Ok(()),
        }
    }

    /// Records the answer to a membership query and repairs any closedness or
    /// consistency defect that the new information exposes.
    pub fn resolve_mq(&mut self, query: &[Symbol], answer: &[f64]) -> Result<(), TableError> {
        if query.len() != answer.len() {
            return Err(TableError::LengthMismatch {
                query: query.len(),
                answer: answer.len(),
            });
        }
        self.check_word(query)?;
        self.record(query.to_vec(), answer.to_vec());
        self.refine();
        Ok(())
    }

    /// Adds `word` and all of its prefixes to `S`.
    pub fn add_prefix(&mut self, word: &[Symbol]) -> Result<(), TableError> {
        self.check_word(word)?;
        for i in 1..=word.len() {
            self.push_prefix(word[..i].to_vec());
        }
        self.refine();
        Ok(())
    }

    fn push_prefix(&mut self, p: Word) {
        if self.prefix_set.insert(p.clone()) {
            self.prefixes.push(p.clone());
            self.enqueue_rows(&[p]);
        }
    }

    fn add_suffix(&mut self, suffix: Word) -> bool {
        if self.suffix_set.insert(suffix.clone()) {
            self.enqueue_suffix(&suffix);
            self.suffixes.push(suffix);
            true
        } else {
            false
        }
    }

    /// Two equal rows of `S` whose one-step extensions differ; returns the
    /// suffix `z·e` that separates them.
    fn find_inconsistency(&self) -> Option<Word> {
        for (i, s1) in self.prefixes.iter().enumerate() {
            for s2 in &self.prefixes[i + 1..] {
                if !self.rows_equal(s1, s2) {
                    continue;
                }
                for z in self.alphabet.symbols() {
                    let t1 = concat(s1, &[z]);
                    let t2 = concat(s2, &[z]);
                    if let Some(e) = self.first_difference(&t1, &t2) {
                        let suffix = concat(&[z], e);
                        if !self.suffix_set.contains(&suffix) {
                            return Some(suffix);
                        }
                    }
                }
            }
        }
        None
    }

    fn find_unclosed(&self) -> Option<Word> {
        self.boundary()
            .find(|t| !self.prefixes.iter().any(|s| self.rows_equal(s, t)))
    }

    fn refine(&mut self) {
        loop {
            if self.get_mq().is_some() {
                return;
            }
            if let Some(suffix) = self.find_inconsistency() {
                self.add_suffix(suffix);
                continue;
            }
            if let Some(t) = self.find_unclosed() {
                self.push_prefix(t);
                continue;
            }
            return;
        }
    }

    /// Index into `S` of the first prefix whose row equals `w`'s.
    fn class_of(&self, w: &[Symbol]) -> Option<usize> {
        self.prefixes.iter().position(|s| self.rows_equal(s, w))
    }

    /// Hypothesis whose nodes are the distinct rows of `S`.
    pub fn build_reward_machine(&self) -> Result<MealyRewardMachine, TableError> {
        if !self.is_complete() {
            return Err(TableError::TableIncomplete);
        }
        // Representative prefix index -> node id.
        let mut node_of = vec![usize::MAX; self.prefixes.len()];
        let mut reps = Vec::new();
        for (i, s) in self.prefixes.iter().enumerate() {
            let c = self.class_of(s).expect("a row equals itself");
            if c == i {
                node_of[i] = reps.len();
                reps.push(i);
            }
        }
        let mut builder =
            MachineBuilder::new(self.alphabet.clone(), reps.len()).default_reward(self.default_reward);
        for (u, &i) in reps.iter().enumerate() {
            let s = &self.prefixes[i];
            for z in self.alphabet.symbols() {
                let t = concat(s, &[z]);
                let c = self.class_of(&t).ok_or(TableError::TableIncomplete)?;
                let target = node_of[self.class_of(&self.prefixes[c]).expect("self")];
                let reward = *self
                    .cell(s, &[z])
                    .and_then(|r| r.last())
                    .ok_or(TableError::TableIncomplete)?;
                builder.set_edge(Node(u), z, Node(target), reward)?;
            }
        }
        Ok(builder.build())
    }

    /// Ingests a trace the current hypothesis mispredicts by adding all of
    /// its suffixes to `E`.
    pub fn add_counter_example(&mut self, obs: &[Symbol], rewards: &[f64]) -> Result<(), TableError> {
        if obs.len() != rewards.len() {
            return Err(TableError::LengthMismatch {
                query: obs.len(),
                answer: rewards.len(),
            });
        }
        self.check_word(obs)?;
        let hypothesis = self.build_reward_machine()?;
        let predicted = hypothesis.run_word(obs)?;
        if self.cells_equal(&predicted, rewards) {
            return Err(TableError::NotACounterexample);
        }
        self.record(obs.to_vec(), rewards.to_vec());
        for i in 0..obs.len() {
            self.add_suffix(obs[i..].to_vec());
        }
        self.longest_counterexample = self.longest_counterexample.max(obs.len());
        self.refine();
        Ok(())
    }
}

fn fmt_rewards(r: &[f64]) -> String {
    r.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join("·")
}

/// Text grid: one row per prefix, one column per suffix, `?` for pending
/// cells, with `S·Z` rows below a rule.
impl fmt::Display for ObservationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<String> = self
            .suffixes
            .iter()
            .map(|e| self.alphabet.format_word(e))
            .collect();
        let render = |w: &Word| -> Vec<String> {
            let mut row = vec![self.alphabet.format_word(w)];
            row.extend(self.suffixes.iter().map(|e| {
                self.cell(w, e).map_or_else(|| "?".to_owned(), fmt_rewards)
            }));
            row
        };
        let upper: Vec<Vec<String>> = self.prefixes.iter().map(render).collect();
        let lower: Vec<Vec<String>> = self.boundary().map(|w| render(&w)).collect();
        let mut widths = vec![0; header.len() + 1];
        for row in upper.iter().chain(&lower).chain(std::iter::once(
            &std::iter::once(String::new()).chain(header.iter().cloned()).collect::<Vec<_>>(),
        )) {
            for (i, c) in row.iter().enumerate() {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, row: &[String]| -> fmt::Result {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            writeln!(f, "{}", cells.join(" | ").trim_end())
        };
        let mut head = vec![String::new()];
        head.extend(header);
        line(f, &head)?;
        let rule: usize = widths.iter().sum::<usize>() + 3 * widths.len().saturating_sub(1);
        writeln!(f, "{}", "=".repeat(rule))?;
        for row in &upper {
            line(f, row)?;
        }
        writeln!(f, "{}", "-".repeat(rule))?;
        for row in &lower {
            line(f, row)?;
        }
        Ok(())
    }
}

/// The two queries of a minimally adequate teacher.
pub trait Teacher {
    fn membership(&mut self, word: &[Symbol]) -> RewardTrace;
    /// A word and its true rewards on which `hypothesis` is wrong, or `None`.
    fn equivalence(&mut self, hypothesis: &MealyRewardMachine) -> Option<(Word, RewardTrace)>;
}

/// Answers directly from a known machine: `run` for membership and the
/// product breadth-first search for equivalence.
#[derive(Debug, Clone, Copy)]
pub struct MachineTeacher<'a> {
    target: &'a MealyRewardMachine,
}

impl<'a> MachineTeacher<'a> {
    pub fn new(target: &'a MealyRewardMachine) -> Self {
        MachineTeacher { target }
    }
}

impl Teacher for MachineTeacher<'_> {
    fn membership(&mut self, word: &[Symbol]) -> RewardTrace {
        self.target.run_word(word).expect("word over the target alphabet")
    }

    fn equivalence(&mut self, hypothesis: &MealyRewardMachine) -> Option<(Word, RewardTrace)> {
        let witness = hypothesis.equivalent(self.target).expect("shared alphabet")?;
        let word: Word = witness.iter().filter_map(|o| o.symbol()).collect();
        let rewards = self.target.run_word(&word).expect("word over the target alphabet");
        Some((word, rewards))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LearningStats {
    pub membership_queries: usize,
    pub equivalence_queries: usize,
    pub longest_counterexample: usize,
    pub hypothesis_sizes: Vec<usize>,
}

/// Runs L* to completion against `teacher`.
pub fn learn<T: Teacher>(
    table: ObservationTable,
    teacher: &mut T,
) -> Result<(MealyRewardMachine, LearningStats, ObservationTable), TableError> {
    let mut table = table;
    let mut stats = LearningStats::default();
    loop {
        while let Some(query) = table.get_mq() {
            let answer = teacher.membership(&query);
            stats.membership_queries += 1;
            table.resolve_mq(&query, &answer)?;
        }
        let hypothesis = table.build_reward_machine()?;
        stats.equivalence_queries += 1;
        stats.hypothesis_sizes.push(hypothesis.num_nodes());
        match teacher.equivalence(&hypothesis) {
            None => {
                stats.longest_counterexample = table.longest_counterexample();
                return Ok((hypothesis, stats, table));
            }
            Some((word, rewards)) => table.add_counter_example(&word, &rewards)?,
        }
    }
}
