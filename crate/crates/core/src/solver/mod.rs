//! Word-by-word backtracking fill under a Topic-word quota.
//!
//! The search picks the most constrained slot, tries its candidates Topic-first
//! and recurses, pruning whenever even an all-Topic completion could no longer
//! reach the target rate. Episodes are cut off after `restart_interval` of wall
//! time (or `node_budget` expansions in deterministic mode) and restarted with
//! a fresh tie-breaking stream until `time_limit` is spent.

mod oracle;
mod state;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::grid::SlotSet;
use crate::lexicon::WordIndex;

pub use oracle::{
    brute_force_max_topic, brute_force_solve, brute_force_solve_capped, BruteForce, OracleError,
    DEFAULT_STEP_CAP,
};
pub use state::{choose_next_slot, quota_feasible, required_topic, FillState};

pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(300);
pub const DEFAULT_RESTART_INTERVAL: Duration = Duration::from_secs(10);
/// Increment of the target rate between rounds of [`maximize_topic_rate`].
pub const DEFAULT_RATE_STEP: u8 = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("target rate must be within 0..=100, got {0}")]
    TargetRate(u8),
    #[error("restart interval {restart:?} must be positive and no longer than the time limit {limit:?}")]
    RestartInterval { restart: Duration, limit: Duration },
    #[error("node budget must be at least 1")]
    NodeBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Minimum percentage of slots that must hold Topic answers.
    pub target_rate: u8,
    pub time_limit: Duration,
    pub restart_interval: Duration,
    /// Node expansions per episode. When set, restarts are driven by this
    /// budget instead of the clock and results are reproducible.
    pub node_budget: Option<u64>,
    pub seed: u64,
    pub forbid_duplicate_answers: bool,
    pub randomize_ties: bool,
    pub quota_pruning: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            target_rate: 0,
            time_limit: DEFAULT_TIME_LIMIT,
            restart_interval: DEFAULT_RESTART_INTERVAL,
            node_budget: None,
            seed: 0,
            forbid_duplicate_answers: true,
            randomize_ties: true,
            quota_pruning: true,
        }
    }
}

impl SolverConfig {
    /// Single unbounded episode without tie shuffling: runs to a proof.
    pub fn exhaustive(target_rate: u8) -> Self {
        SolverConfig {
            target_rate,
            time_limit: Duration::MAX,
            restart_interval: Duration::MAX,
            randomize_ties: false,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.target_rate > 100 {
            return Err(ConfigError::TargetRate(self.target_rate));
        }
        if self.restart_interval.is_zero() || self.restart_interval > self.time_limit {
            return Err(ConfigError::RestartInterval {
                restart: self.restart_interval,
                limit: self.time_limit,
            });
        }
        if self.node_budget == Some(0) {
            return Err(ConfigError::NodeBudget);
        }
        Ok(())
    }

    /// Episodes allowed in deterministic mode: `floor(time_limit / restart_interval)`.
    pub fn episode_cap(&self) -> u64 {
        let cap = self.time_limit.as_nanos() / self.restart_interval.as_nanos().max(1);
        cap.clamp(1, u64::MAX as u128) as u64
    }

    fn virtual_elapsed(&self, nodes: u64, budget: u64) -> Duration {
        let nanos = self.restart_interval.as_nanos() * nodes as u128 / budget as u128;
        Duration::from_nanos(nanos.min(u64::MAX as u128) as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FillStatus {
    Success,
    /// Time limit or episode cap reached.
    Timeout,
    /// A complete episode found no fill: the instance is unsatisfiable.
    Exhausted,
}

impl FillStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FillStatus::Success => "success",
            FillStatus::Timeout => "timeout",
            FillStatus::Exhausted => "exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillResult {
    pub status: FillStatus,
    /// Answers per slot id; complete on success, empty otherwise.
    pub assignment: BTreeMap<usize, String>,
    pub topic_count: usize,
    pub total_slots: usize,
    /// Wall time, or in deterministic mode the node count scaled so that one
    /// full node budget corresponds to one restart interval.
    pub elapsed: Duration,
    /// Episodes completed before the final one.
    pub restarts: u64,
    pub nodes_expanded: u64,
}

impl FillResult {
    pub fn is_success(&self) -> bool {
        self.status == FillStatus::Success
    }

    /// Topic share of the placed answers; 0 unless successful.
    pub fn achieved_topic_ratio(&self) -> f64 {
        if !self.is_success() {
            return 0.0;
        }
        if self.total_slots == 0 {
            return 1.0;
        }
        self.topic_count as f64 / self.total_slots as f64
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": self.status,
            "ratio": self.achieved_topic_ratio(),
            "elapsed_ms": self.elapsed.as_millis() as u64,
            "restarts": self.restarts,
            "nodes_expanded": self.nodes_expanded,
            "assignment": self.assignment,
        })
    }
}

enum Outcome {
    Found,
    Exhausted,
    Interrupted,
}

struct Limit {
    node_cap: Option<u64>,
    deadline: Option<Instant>,
}

struct Episode<'s, 'a> {
    state: &'s mut FillState<'a>,
    config: &'s SolverConfig,
    need: usize,
    limit: Limit,
    rng: ChaCha8Rng,
}

impl Episode<'_, '_> {
    fn interrupted(&self) -> bool {
        if self.limit.node_cap.is_some_and(|cap| self.state.nodes_expanded >= cap) {
            return true;
        }
        self.limit.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn descend(&mut self) -> Outcome {
        if self.interrupted() {
            return Outcome::Interrupted;
        }
        self.state.nodes_expanded += 1;
        let state = &*self.state;
        let (topic, open) = (state.topic_count(), state.unassigned_count());
        if self.config.quota_pruning && topic + open < self.need {
            return Outcome::Exhausted;
        }
        let Some(slot) = choose_next_slot(state) else {
            return if topic >= self.need {
                Outcome::Found
            } else {
                Outcome::Exhausted
            };
        };

        let mut set = BitSet::default();
        if !state.candidate_set(slot, &mut set) {
            return Outcome::Exhausted;
        }
        let bucket = state
            .index()
            .bucket(state.slots().slot(slot).len())
            .expect("candidate bucket");
        let topic_len = bucket.topic_len();
        // With the quota tight, any Filler word here would be pruned one level down.
        let topic_only = self.config.quota_pruning && topic + open == self.need;
        let mut order: Vec<usize> = set.iter().take_while(|&p| !topic_only || p < topic_len).collect();
        if self.config.randomize_ties {
            let split = order.partition_point(|&p| p < topic_len);
            let (topics, fillers) = order.split_at_mut(split);
            topics.shuffle(&mut self.rng);
            fillers.shuffle(&mut self.rng);
        }

        for pos in order {
            let entry = bucket.entry(pos);
            let placed = self.state.assign(slot, entry);
            debug_assert!(placed, "candidate must be assignable");
            match self.descend() {
                Outcome::Found => return Outcome::Found,
                Outcome::Interrupted => {
                    self.state.unassign(slot);
                    return Outcome::Interrupted;
                }
                Outcome::Exhausted => {
                    self.state.unassign(slot);
                }
            }
        }
        Outcome::Exhausted
    }
}

fn episode_seed(seed: u64, episode: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode);
    rng
}

/// Fills `slots` from `index` subject to `config`; see [`run_with_restarts`].
pub fn solve(slots: &SlotSet, index: &WordIndex, config: &SolverConfig) -> Result<FillResult, ConfigError> {
    run_with_restarts(slots, index, config)
}

/// Runs restart episodes until a fill is found, an episode exhausts the whole
/// search space, or the time limit (episode cap in deterministic mode) is hit.
pub fn run_with_restarts(
    slots: &SlotSet,
    index: &WordIndex,
    config: &SolverConfig,
) -> Result<FillResult, ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let global_deadline = start.checked_add(config.time_limit);
    let need = required_topic(slots.len(), config.target_rate);
    let mut state = FillState::new(slots, index, config.forbid_duplicate_answers);

    let mut episode = 0u64;
    let status = loop {
        let limit = match config.node_budget {
            Some(budget) => {
                if episode >= config.episode_cap() {
                    break FillStatus::Timeout;
                }
                Limit {
                    node_cap: Some(state.nodes_expanded + budget),
                    deadline: None,
                }
            }
            None => {
                let now = Instant::now();
                if episode > 0 && global_deadline.is_some_and(|d| now >= d) {
                    break FillStatus::Timeout;
                }
                let deadline = match (now.checked_add(config.restart_interval), global_deadline) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
                Limit {
                    node_cap: None,
                    deadline,
                }
            }
        };
        let outcome = Episode {
            state: &mut state,
            config,
            need,
            limit,
            rng: episode_seed(config.seed, episode),
        }
        .descend();
        match outcome {
            Outcome::Found => break FillStatus::Success,
            Outcome::Exhausted => break FillStatus::Exhausted,
            Outcome::Interrupted => {
                log::debug!("episode {episode} interrupted after {} nodes", state.nodes_expanded);
                episode += 1;
            }
        }
    };

    let nodes = state.nodes_expanded;
    let assignment = if status == FillStatus::Success {
        state
            .assignment()
            .iter()
            .enumerate()
            .map(|(slot, e)| (slot, index.answer(e.expect("complete fill")).to_string()))
            .collect()
    } else {
        BTreeMap::new()
    };
    let restarts = match status {
        FillStatus::Timeout => episode.saturating_sub(1),
        _ => episode,
    };
    Ok(FillResult {
        status,
        assignment,
        topic_count: if status == FillStatus::Success { state.topic_count() } else { 0 },
        total_slots: slots.len(),
        elapsed: match config.node_budget {
            Some(budget) => config.virtual_elapsed(nodes, budget),
            None => start.elapsed(),
        },
        restarts,
        nodes_expanded: nodes,
    })
}

/// Anytime topic maximization: solve at `config.target_rate`, then keep raising
/// the target to `ceil(achieved% ) + step` (capped at 100) until a round fails
/// or every slot is Topic. Returns the best success, or the first failure.
/// All rounds share `config.time_limit` (the episode cap in deterministic mode).
pub fn maximize_topic_rate(
    slots: &SlotSet,
    index: &WordIndex,
    config: &SolverConfig,
    step: u8,
) -> Result<FillResult, ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let mut target = config.target_rate;
    let mut best: Option<FillResult> = None;
    let mut first_failure: Option<FillResult> = None;
    let (mut nodes, mut restarts, mut episodes_used) = (0u64, 0u64, 0u64);
    let mut virtual_time = Duration::ZERO;

    loop {
        let mut round = config.clone();
        round.target_rate = target;
        match config.node_budget {
            Some(_) => {
                let left = config.episode_cap().saturating_sub(episodes_used);
                if left == 0 {
                    break;
                }
                round.time_limit = config.restart_interval.saturating_mul(left.min(u32::MAX as u64) as u32);
            }
            None => {
                let left = config.time_limit.saturating_sub(start.elapsed());
                if left.is_zero() {
                    break;
                }
                round.time_limit = left;
                round.restart_interval = config.restart_interval.min(left);
            }
        }
        let result = run_with_restarts(slots, index, &round)?;
        nodes += result.nodes_expanded;
        restarts += result.restarts;
        episodes_used += result.restarts + 1;
        virtual_time += result.elapsed;
        if !result.is_success() {
            first_failure.get_or_insert(result);
            break;
        }
        let (k, n) = (result.topic_count, result.total_slots);
        best = Some(result);
        if k >= n {
            break;
        }
        let achieved_pct = (100 * k).div_ceil(n);
        target = (achieved_pct + step.max(1) as usize).min(100) as u8;
    }

    let mut out = best.or(first_failure).expect("at least one round runs");
    out.nodes_expanded = nodes;
    out.restarts = restarts;
    out.elapsed = match config.node_budget {
        Some(_) => virtual_time,
        None => start.elapsed(),
    };
    Ok(out)
}
