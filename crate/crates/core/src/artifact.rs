//! Finished puzzles: assembly from a fill, independent verification, JSON and
//! plain-text output.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{parse_pattern, render_pattern, Cell, GridPattern, Orientation, PatternError, SlotSet};
use crate::lexicon::{Lexicon, Source};
use crate::solver::{FillResult, FillStatus};

pub const GENERATOR_VERSION: &str = concat!("topicgrid ", env!("CARGO_PKG_VERSION"));

/// Clue used when an entry has none of its own.
pub fn placeholder_clue(surface: &str) -> String {
    format!("Define: {surface}")
}

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("fill did not succeed (status {0:?})")]
    NotSolved(FillStatus),
    #[error("slot {0} has no answer in the fill")]
    IncompleteFill(usize),
    #[error("answer {answer:?} for slot {slot_id} is not in the lexicon")]
    MissingEntry { slot_id: usize, answer: String },
    #[error("invalid puzzle JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid pattern in puzzle: {0}")]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleEntry {
    pub slot_id: usize,
    pub orientation: Orientation,
    pub row: usize,
    pub col: usize,
    pub answer: String,
    pub surface: String,
    pub source: Source,
    pub clue: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleMetadata {
    pub target_rate: u8,
    pub achieved_topic_ratio: f64,
    pub seed: u64,
    pub elapsed_ms: u64,
    pub restarts: u64,
    pub nodes_expanded: u64,
    pub generator_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Puzzle {
    pub pattern: GridPattern,
    /// Sorted by slot id.
    pub entries: Vec<PuzzleEntry>,
    pub metadata: PuzzleMetadata,
}

#[derive(Serialize, Deserialize)]
struct PuzzleDoc {
    pattern: String,
    entries: Vec<PuzzleEntry>,
    metadata: PuzzleMetadata,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssembleOptions {
    pub target_rate: u8,
    /// Solver seed, recorded in the metadata.
    pub seed: u64,
    pub clue_seed: u64,
}

/// Turns a successful fill into a puzzle, picking one clue per entry with a
/// generator seeded by `clue_seed` (entries are visited in slot order).
pub fn assemble(
    pattern: &GridPattern,
    slots: &SlotSet,
    result: &FillResult,
    lexicon: &Lexicon,
    options: AssembleOptions,
) -> Result<Puzzle, ArtifactError> {
    if !result.is_success() {
        return Err(ArtifactError::NotSolved(result.status));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.clue_seed);
    let mut entries = Vec::with_capacity(slots.len());
    for slot in slots.slots() {
        let answer = result.assignment.get(&slot.id).ok_or(ArtifactError::IncompleteFill(slot.id))?;
        let entry = lexicon.get(answer).ok_or_else(|| ArtifactError::MissingEntry {
            slot_id: slot.id,
            answer: answer.clone(),
        })?;
        let clue = entry
            .clues
            .choose(&mut rng)
            .cloned()
            .unwrap_or_else(|| placeholder_clue(&entry.surface));
        entries.push(PuzzleEntry {
            slot_id: slot.id,
            orientation: slot.orientation,
            row: slot.start.0,
            col: slot.start.1,
            answer: entry.answer.clone(),
            surface: entry.surface.clone(),
            source: entry.source,
            clue,
        });
    }
    Ok(Puzzle {
        pattern: pattern.clone(),
        entries,
        metadata: PuzzleMetadata {
            target_rate: options.target_rate,
            achieved_topic_ratio: result.achieved_topic_ratio(),
            seed: options.seed,
            elapsed_ms: result.elapsed.as_millis().min(u64::MAX as u128) as u64,
            restarts: result.restarts,
            nodes_expanded: result.nodes_expanded,
            generator_version: GENERATOR_VERSION.to_string(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PuzzleViolation {
    /// A slot of the pattern has no entry.
    UncoveredSlot { slot_id: usize },
    /// An entry names a slot the pattern does not have, or places it elsewhere.
    UnknownSlot { slot_id: usize },
    DuplicateSlot { slot_id: usize },
    LengthMismatch { slot_id: usize, expected: usize, found: usize },
    CrossingConflict { row: usize, col: usize },
    NotInLexicon { answer: String },
    SourceMismatch { answer: String },
    DuplicateAnswer { answer: String },
    QuotaNotMet { topic: usize, total: usize, target_rate: u8 },
}

impl fmt::Display for PuzzleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PuzzleViolation::UncoveredSlot { slot_id } => write!(f, "slot {slot_id} has no entry"),
            PuzzleViolation::UnknownSlot { slot_id } => write!(f, "entry for unknown slot {slot_id}"),
            PuzzleViolation::DuplicateSlot { slot_id } => write!(f, "slot {slot_id} filled more than once"),
            PuzzleViolation::LengthMismatch { slot_id, expected, found } => {
                write!(f, "slot {slot_id} needs {expected} letters, answer has {found}")
            }
            PuzzleViolation::CrossingConflict { row, col } => {
                write!(f, "conflicting letters at row {row}, column {col}")
            }
            PuzzleViolation::NotInLexicon { answer } => write!(f, "{answer} is not in the lexicon"),
            PuzzleViolation::SourceMismatch { answer } => {
                write!(f, "{answer} is tagged with a different source than in the lexicon")
            }
            PuzzleViolation::DuplicateAnswer { answer } => write!(f, "{answer} appears more than once"),
            PuzzleViolation::QuotaNotMet { topic, total, target_rate } => {
                write!(f, "{topic} of {total} answers are topic words, below {target_rate}%")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub violations: Vec<PuzzleViolation>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Slots found by scanning the pattern directly, in the same canonical order
/// the grid module uses: across runs row-major, then down runs row-major.
fn scan_slots(pattern: &GridPattern) -> Vec<(Orientation, (usize, usize), usize)> {
    let (h, w) = (pattern.height(), pattern.width());
    let white = |r: usize, c: usize| pattern.cells()[r * w + c] == Cell::White;
    let mut out = Vec::new();
    for r in 0..h {
        let mut c = 0;
        while c < w {
            let start = c;
            while c < w && white(r, c) {
                c += 1;
            }
            if c - start >= 2 {
                out.push((Orientation::Across, (r, start), c - start));
            }
            c += 1;
        }
    }
    let mut downs = Vec::new();
    for c in 0..w {
        let mut r = 0;
        while r < h {
            let start = r;
            while r < h && white(r, c) {
                r += 1;
            }
            if r - start >= 2 {
                downs.push((Orientation::Down, (start, c), r - start));
            }
            r += 1;
        }
    }
    downs.sort_by_key(|&(_, start, _)| start);
    out.extend(downs);
    out
}

/// [`verify_puzzle_with`] with duplicate answers forbidden.
pub fn verify_puzzle(puzzle: &Puzzle, lexicon: &Lexicon, target_rate: u8) -> VerificationReport {
    verify_puzzle_with(puzzle, lexicon, target_rate, true)
}

/// Re-checks a puzzle from its pattern and entries alone and lists every violation.
pub fn verify_puzzle_with(
    puzzle: &Puzzle,
    lexicon: &Lexicon,
    target_rate: u8,
    forbid_duplicates: bool,
) -> VerificationReport {
    let expected = scan_slots(&puzzle.pattern);
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    let mut letters: BTreeMap<(usize, usize), HashSet<char>> = BTreeMap::new();

    for e in &puzzle.entries {
        let Some(&(orientation, start, len)) = expected.get(e.slot_id) else {
            violations.push(PuzzleViolation::UnknownSlot { slot_id: e.slot_id });
            continue;
        };
        if orientation != e.orientation || start != (e.row, e.col) {
            violations.push(PuzzleViolation::UnknownSlot { slot_id: e.slot_id });
            continue;
        }
        if !seen.insert(e.slot_id) {
            violations.push(PuzzleViolation::DuplicateSlot { slot_id: e.slot_id });
            continue;
        }
        let chars: Vec<char> = e.answer.chars().collect();
        if chars.len() != len {
            violations.push(PuzzleViolation::LengthMismatch {
                slot_id: e.slot_id,
                expected: len,
                found: chars.len(),
            });
            continue;
        }
        for (i, ch) in chars.into_iter().enumerate() {
            let cell = match orientation {
                Orientation::Across => (start.0, start.1 + i),
                Orientation::Down => (start.0 + i, start.1),
            };
            letters.entry(cell).or_default().insert(ch);
        }
    }
    for slot_id in 0..expected.len() {
        if !seen.contains(&slot_id) {
            violations.push(PuzzleViolation::UncoveredSlot { slot_id });
        }
    }
    for (&(row, col), set) in &letters {
        if set.len() > 1 {
            violations.push(PuzzleViolation::CrossingConflict { row, col });
        }
    }

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for e in &puzzle.entries {
        match lexicon.get(&e.answer) {
            None => violations.push(PuzzleViolation::NotInLexicon { answer: e.answer.clone() }),
            Some(lex) if lex.source != e.source => {
                violations.push(PuzzleViolation::SourceMismatch { answer: e.answer.clone() })
            }
            Some(_) => {}
        }
        *counts.entry(e.answer.as_str()).or_default() += 1;
    }
    if forbid_duplicates {
        let mut dups: Vec<&str> = counts.iter().filter(|&(_, &n)| n > 1).map(|(&a, _)| a).collect();
        dups.sort_unstable();
        violations.extend(dups.into_iter().map(|a| PuzzleViolation::DuplicateAnswer { answer: a.to_string() }));
    }

    let total = puzzle.entries.len();
    let topic = puzzle.entries.iter().filter(|e| e.source == Source::Topic).count();
    if topic * 100 < target_rate as usize * total {
        violations.push(PuzzleViolation::QuotaNotMet { topic, total, target_rate });
    }
    VerificationReport { violations }
}

/// Pretty-printed puzzle JSON. Without the solution, `answer` and `surface`
/// are left out of every entry; such documents cannot be parsed back.
pub fn to_json(puzzle: &Puzzle, include_solution: bool) -> String {
    let doc = PuzzleDoc {
        pattern: render_pattern(&puzzle.pattern),
        entries: puzzle.entries.clone(),
        metadata: puzzle.metadata.clone(),
    };
    let mut value = serde_json::to_value(&doc).expect("puzzle serializes");
    if !include_solution {
        if let Some(entries) = value["entries"].as_array_mut() {
            for e in entries.iter_mut().filter_map(|e| e.as_object_mut()) {
                e.remove("answer");
                e.remove("surface");
            }
        }
    }
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

pub fn parse_puzzle(text: &str) -> Result<Puzzle, ArtifactError> {
    let doc: PuzzleDoc = serde_json::from_str(text)?;
    Ok(Puzzle {
        pattern: parse_pattern(&doc.pattern)?,
        entries: doc.entries,
        metadata: doc.metadata,
    })
}

/// Letter grid (`#` for black cells, `.` for blanks when the solution is
/// hidden) followed by ACROSS and DOWN clue lists numbered by slot id + 1.
pub fn render_text(puzzle: &Puzzle, show_solution: bool) -> String {
    let (h, w) = (puzzle.pattern.height(), puzzle.pattern.width());
    let mut grid: Vec<char> = puzzle
        .pattern
        .cells()
        .iter()
        .map(|c| if *c == Cell::Black { '#' } else { '.' })
        .collect();
    if show_solution {
        for e in &puzzle.entries {
            for (i, ch) in e.answer.chars().enumerate() {
                let (r, c) = match e.orientation {
                    Orientation::Across => (e.row, e.col + i),
                    Orientation::Down => (e.row + i, e.col),
                };
                if r < h && c < w {
                    grid[r * w + c] = ch;
                }
            }
        }
    }
    let mut out = String::new();
    for row in grid.chunks(w) {
        out.extend(row);
        out.push('\n');
    }
    let mut entries: Vec<&PuzzleEntry> = puzzle.entries.iter().collect();
    entries.sort_by_key(|e| e.slot_id);
    for (heading, orientation) in [("ACROSS", Orientation::Across), ("DOWN", Orientation::Down)] {
        out.push('\n');
        out.push_str(heading);
        out.push('\n');
        for e in entries.iter().filter(|e| e.orientation == orientation) {
            out.push_str(&format!("{}. {} ({})\n", e.slot_id + 1, e.clue, e.answer.chars().count()));
        }
    }
    out
}
