//! Experiment sweeps over target rates and black-cell patterns.
//!
//! [`run_sweep`] solves every (pattern, T, trial) cell and returns one
//! [`ExperimentRecord`] per run; [`summarize`] reduces records to success
//! probabilities and time quantiles. Records travel as CSV.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{extract_slots, generate_random_patterns, GridPattern, PatternError, PatternPolicy};
use crate::lexicon::{Lexicon, NormalizationTable, Source, WordIndex};
use crate::solver::{solve, ConfigError, FillStatus, SolverConfig};

pub const CSV_HEADER: [&str; 11] = [
    "pattern_id",
    "n_black",
    "T",
    "seed",
    "trial",
    "status",
    "success",
    "time_ms",
    "restarts",
    "nodes_expanded",
    "achieved_topic_ratio",
];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] ConfigError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("csv header mismatch: found {found:?}")]
    SchemaMismatch { found: Vec<String> },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("no records to summarize")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub height: usize,
    pub width: usize,
    pub t_values: Vec<u8>,
    pub black_counts: Vec<usize>,
    pub patterns_per_count: usize,
    pub trials_per_cell: usize,
    pub seed: u64,
    /// Template for every run; `target_rate` and `seed` are overwritten per run.
    pub solver: SolverConfig,
    /// Per pattern, skip higher T values once every trial at some T failed.
    pub early_stop: bool,
    pub policy: PatternPolicy,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            height: 7,
            width: 7,
            t_values: (1..=10).map(|k| k * 10).collect(),
            black_counts: vec![9, 10, 11, 12],
            patterns_per_count: 10,
            trials_per_cell: 1,
            seed: 0,
            solver: SolverConfig::default(),
            early_stop: false,
            policy: PatternPolicy::default(),
            jobs: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.t_values.is_empty() || self.black_counts.is_empty() {
            return Err(HarnessError::Config("T values and black counts must be non-empty".into()));
        }
        if let Some(&t) = self.t_values.iter().find(|&&t| t > 100) {
            return Err(HarnessError::Solver(ConfigError::TargetRate(t)));
        }
        if self.trials_per_cell == 0 || self.patterns_per_count == 0 {
            return Err(HarnessError::Config("trials and patterns per count must be at least 1".into()));
        }
        self.solver.validate()?;
        Ok(())
    }
}

/// Where the sweep's patterns come from.
#[derive(Debug, Clone)]
pub enum PatternSource {
    /// `patterns_per_count` seeded random patterns per black count.
    Generate,
    Provided(Vec<GridPattern>),
}

impl PatternSource {
    pub fn patterns(&self, config: &SweepConfig) -> Result<Vec<GridPattern>, HarnessError> {
        match self {
            PatternSource::Provided(p) => Ok(p.clone()),
            PatternSource::Generate => {
                let mut out = Vec::new();
                for &n in &config.black_counts {
                    out.extend(generate_random_patterns(
                        config.height,
                        config.width,
                        n,
                        config.patterns_per_count,
                        &config.policy,
                        config.seed.wrapping_add(n as u64),
                    )?);
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub pattern_id: String,
    pub n_black: usize,
    #[serde(rename = "T")]
    pub target_rate: u8,
    pub seed: u64,
    pub trial: usize,
    pub status: FillStatus,
    pub success: bool,
    pub time_ms: f64,
    pub restarts: u64,
    pub nodes_expanded: u64,
    pub achieved_topic_ratio: f64,
}

/// Solver seed for one run, derived from the sweep seed and the run's coordinates.
pub fn run_seed(sweep_seed: u64, pattern: usize, target_rate: u8, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(sweep_seed);
    rng.set_stream(((pattern as u64) << 24) ^ ((target_rate as u64) << 16) ^ trial as u64);
    rng.next_u64()
}

fn sweep_pattern(
    ordinal: usize,
    pattern: &GridPattern,
    index: &WordIndex,
    config: &SweepConfig,
) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let slots = extract_slots(pattern, &config.policy);
    let mut records = Vec::new();
    for &t in &config.t_values {
        let mut any_success = false;
        for trial in 0..config.trials_per_cell {
            let seed = run_seed(config.seed, ordinal, t, trial);
            let solver = SolverConfig {
                target_rate: t,
                seed,
                ..config.solver.clone()
            };
            let result = solve(&slots, index, &solver)?;
            any_success |= result.is_success();
            records.push(ExperimentRecord {
                pattern_id: pattern.id().to_string(),
                n_black: pattern.black_count(),
                target_rate: t,
                seed,
                trial,
                status: result.status,
                success: result.is_success(),
                time_ms: result.elapsed.as_secs_f64() * 1000.0,
                restarts: result.restarts,
                nodes_expanded: result.nodes_expanded,
                achieved_topic_ratio: result.achieved_topic_ratio(),
            });
        }
        if config.early_stop && !any_success {
            log::debug!("{}: stopping after T={t}", pattern.id());
            break;
        }
    }
    Ok(records)
}

/// Runs every (pattern, T, trial) cell; patterns are processed in parallel.
/// Records come back sorted by (pattern_id, T, trial).
pub fn run_sweep(
    config: &SweepConfig,
    index: &WordIndex,
    source: &PatternSource,
) -> Result<Vec<ExperimentRecord>, HarnessError> {
    config.validate()?;
    let patterns = source.patterns(config)?;
    let work = || -> Result<Vec<Vec<ExperimentRecord>>, HarnessError> {
        patterns
            .par_iter()
            .enumerate()
            .map(|(i, p)| sweep_pattern(i, p, index, config))
            .collect()
    };
    let nested = if config.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .install(work)?
    } else {
        work()?
    };
    let mut records: Vec<ExperimentRecord> = nested.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.pattern_id.as_str(), a.target_rate, a.trial).cmp(&(b.pattern_id.as_str(), b.target_rate, b.trial))
    });
    Ok(records)
}

pub fn write_records<W: io::Write>(records: &[ExperimentRecord], writer: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_records<R: io::Read>(reader: R) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?;
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::SchemaMismatch {
            found: header.iter().map(str::to_string).collect(),
        });
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut buf = Vec::new();
    write_records(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn write_records_csv(records: &[ExperimentRecord], path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, records_to_csv(records)).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_records_csv(path: &Path) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_records(io::BufReader::new(file))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data, `p` in `[0, 1]`.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Quantiles {
    /// `None` for empty input.
    pub fn of(values: &[f64]) -> Option<Quantiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Quantiles {
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub runs: usize,
    pub successes: usize,
    pub success_probability: f64,
    /// Over successful runs only.
    pub time_ms: Option<Quantiles>,
}

impl GroupSummary {
    fn of<'a>(records: impl Iterator<Item = &'a ExperimentRecord>) -> Self {
        let (mut runs, mut times) = (0, Vec::new());
        for r in records {
            runs += 1;
            if r.success {
                times.push(r.time_ms);
            }
        }
        GroupSummary {
            runs,
            successes: times.len(),
            success_probability: times.len() as f64 / runs as f64,
            time_ms: Quantiles::of(&times),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    #[serde(rename = "T")]
    pub target_rate: u8,
    #[serde(flatten)]
    pub group: GroupSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackSummary {
    pub n_black: usize,
    #[serde(flatten)]
    pub group: GroupSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n_black: usize,
    #[serde(rename = "T")]
    pub target_rate: u8,
    #[serde(flatten)]
    pub group: GroupSummary,
}

/// Success probability pools all patterns at each T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTables {
    pub by_target: Vec<TargetSummary>,
    pub by_black: Vec<BlackSummary>,
    pub by_black_and_target: Vec<CellSummary>,
}

pub fn summarize(records: &[ExperimentRecord]) -> Result<SummaryTables, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    let mut by_t: BTreeMap<u8, Vec<&ExperimentRecord>> = BTreeMap::new();
    let mut by_b: BTreeMap<usize, Vec<&ExperimentRecord>> = BTreeMap::new();
    let mut by_bt: BTreeMap<(usize, u8), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        by_t.entry(r.target_rate).or_default().push(r);
        by_b.entry(r.n_black).or_default().push(r);
        by_bt.entry((r.n_black, r.target_rate)).or_default().push(r);
    }
    Ok(SummaryTables {
        by_target: by_t
            .into_iter()
            .map(|(target_rate, rs)| TargetSummary {
                target_rate,
                group: GroupSummary::of(rs.into_iter()),
            })
            .collect(),
        by_black: by_b
            .into_iter()
            .map(|(n_black, rs)| BlackSummary {
                n_black,
                group: GroupSummary::of(rs.into_iter()),
            })
            .collect(),
        by_black_and_target: by_bt
            .into_iter()
            .map(|((n_black, target_rate), rs)| CellSummary {
                n_black,
                target_rate,
                group: GroupSummary::of(rs.into_iter()),
            })
            .collect(),
    })
}

/// Two stacked panels against T: success probability, and min/median/max time
/// over successes.
pub fn render_svg(summary: &SummaryTables) -> String {
    const W: f64 = 480.0;
    const PANEL: f64 = 200.0;
    const PAD: f64 = 40.0;
    let ts: Vec<f64> = summary.by_target.iter().map(|s| s.target_rate as f64).collect();
    let (t_lo, t_hi) = ts.iter().fold((f64::MAX, f64::MIN), |(a, b), &t| (a.min(t), b.max(t)));
    let span = (t_hi - t_lo).max(1.0);
    let x = |t: f64| PAD + (t - t_lo) / span * (W - 2.0 * PAD);
    let max_time = summary
        .by_target
        .iter()
        .filter_map(|s| s.group.time_ms.map(|q| q.max))
        .fold(0.0f64, f64::max)
        .max(1.0);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"10\">\n",
        2.0 * PANEL + 3.0 * PAD
    );
    for (k, title) in ["success probability", "time over successes (ms)"].iter().enumerate() {
        let top = PAD + k as f64 * (PANEL + PAD);
        svg += &format!(
            "<rect x=\"{PAD}\" y=\"{top}\" width=\"{}\" height=\"{PANEL}\" fill=\"none\" stroke=\"#999\"/>\n\
             <text x=\"{PAD}\" y=\"{}\">{title}</text>\n",
            W - 2.0 * PAD,
            top - 6.0
        );
        for &t in &ts {
            svg += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{t}</text>\n", x(t), top + PANEL + 12.0);
        }
    }
    let y_prob = |p: f64| PAD + PANEL * (1.0 - p);
    let y_time = |ms: f64| 2.0 * PAD + PANEL + PANEL * (1.0 - ms / max_time);
    let points: Vec<String> = summary
        .by_target
        .iter()
        .map(|s| format!("{:.1},{:.1}", x(s.target_rate as f64), y_prob(s.group.success_probability)))
        .collect();
    svg += &format!("<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\"/>\n", points.join(" "));
    let medians: Vec<String> = summary
        .by_target
        .iter()
        .filter_map(|s| s.group.time_ms.map(|q| format!("{:.1},{:.1}", x(s.target_rate as f64), y_time(q.median))))
        .collect();
    svg += &format!("<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\"/>\n", medians.join(" "));
    for s in &summary.by_target {
        if let Some(q) = s.group.time_ms {
            let cx = x(s.target_rate as f64);
            svg += &format!(
                "<line x1=\"{cx:.1}\" y1=\"{:.1}\" x2=\"{cx:.1}\" y2=\"{:.1}\" stroke=\"#d62728\" stroke-opacity=\"0.4\"/>\n",
                y_time(q.min),
                y_time(q.max)
            );
        }
    }
    svg += &format!("<text x=\"{PAD}\" y=\"{}\">max {max_time:.0} ms</text>\n", 2.0 * PAD + PANEL - 6.0 + 12.0);
    svg += "</svg>\n";
    svg
}

/// Parameters for a random lexicon with English-like letter frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticLexiconSpec {
    pub filler: usize,
    pub topic: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

/// Relative frequencies of A..Z in English text (per mille).
const LETTER_WEIGHTS: [u32; 26] = [
    82, 15, 28, 43, 127, 22, 20, 61, 70, 2, 8, 40, 24, 67, 75, 19, 1, 60, 63, 91, 28, 10, 24, 2, 20, 1,
];

/// Distinct random words, lengths uniform in `min_len..=max_len`; the Topic
/// and Filler sets are disjoint.
pub fn synthetic_lexicon(spec: &SyntheticLexiconSpec) -> Lexicon {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let letters = WeightedIndex::new(LETTER_WEIGHTS).expect("positive weights");
    let mut seen = std::collections::HashSet::new();
    let mut words = Vec::with_capacity(spec.filler + spec.topic);
    let min_len = spec.min_len.max(2);
    let max_len = spec.max_len.max(min_len);
    while words.len() < spec.filler + spec.topic {
        let len = rng.gen_range(min_len..=max_len);
        let w: String = (0..len).map(|_| (b'A' + letters.sample(&mut rng) as u8) as char).collect();
        if seen.insert(w.clone()) {
            let source = if words.len() < spec.topic { Source::Topic } else { Source::Filler };
            words.push((w, source));
        }
    }
    Lexicon::from_words(words.iter().map(|(w, s)| (w.as_str(), *s)), &NormalizationTable::default())
}
