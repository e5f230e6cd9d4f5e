//! Crossword grids with fixed black-cell placement.
//!
//! A [`GridPattern`] is parsed from (and rendered to) a small text format where
//! `#` marks a black cell and `.` a white one. [`extract_slots`] turns a pattern
//! into the slots the solver fills, together with their crossings.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Zero-based `(row, col)`.
pub type Coord = (usize, usize);

/// Stable ordinal of a slot within a [`SlotSet`].
pub type SlotId = usize;

/// Rejection-sampling attempts before [`generate_random_patterns`] gives up.
pub const DEFAULT_ATTEMPT_CAP: usize = 200_000;

const ID_PREFIX: &str = "id:";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern text is empty")]
    EmptyInput,
    #[error("row {row} has length {found}, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("illegal character {ch:?} at row {row}, column {col}")]
    IllegalCharacter { ch: char, row: usize, col: usize },
    #[error("cell matrix has {found} cells, expected {height}x{width}")]
    DimensionMismatch {
        height: usize,
        width: usize,
        found: usize,
    },
    #[error("cannot place {n_black} black cells in a {height}x{width} grid")]
    TooManyBlack {
        height: usize,
        width: usize,
        n_black: usize,
    },
    #[error("minimum slot length must be at least 2, got {0}")]
    InvalidPolicy(usize),
    #[error("found only {found} of {requested} valid distinct patterns after {attempts} attempts")]
    ExhaustedAttempts {
        requested: usize,
        found: usize,
        attempts: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Black,
    White,
}

impl Cell {
    fn from_char(ch: char) -> Option<Cell> {
        match ch {
            '#' => Some(Cell::Black),
            '.' => Some(Cell::White),
            _ => None,
        }
    }

    fn to_char(self) -> char {
        match self {
            Cell::Black => '#',
            Cell::White => '.',
        }
    }
}

/// A `height x width` matrix of black and white cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridPattern {
    id: String,
    height: usize,
    width: usize,
    cells: Vec<Cell>,
}

impl GridPattern {
    /// Builds a pattern from row-major cells.
    pub fn from_cells(
        id: impl Into<String>,
        height: usize,
        width: usize,
        cells: Vec<Cell>,
    ) -> Result<Self, PatternError> {
        if height == 0 || width == 0 {
            return Err(PatternError::EmptyInput);
        }
        if cells.len() != height * width {
            return Err(PatternError::DimensionMismatch {
                height,
                width,
                found: cells.len(),
            });
        }
        Ok(GridPattern {
            id: id.into(),
            height,
            width,
            cells,
        })
    }

    /// All-white pattern of the given size.
    pub fn open(height: usize, width: usize) -> Result<Self, PatternError> {
        Self::from_cells("", height, width, vec![Cell::White; height * width])
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cell(&self, (row, col): Coord) -> Cell {
        self.cells[row * self.width + col]
    }

    pub fn is_white(&self, coord: Coord) -> bool {
        self.cell(coord) == Cell::White
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn black_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Black).count()
    }

    pub fn white_count(&self) -> usize {
        self.cells.len() - self.black_count()
    }
}

impl fmt::Display for GridPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_pattern(self))
    }
}

/// Parses one pattern: rows of `#`/`.` separated by newlines, optionally
/// preceded by an `id: <label>` line.
pub fn parse_pattern(text: &str) -> Result<GridPattern, PatternError> {
    let mut lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    let mut id = String::new();
    if let Some(first) = lines.first() {
        if let Some(label) = first.trim_start().strip_prefix(ID_PREFIX) {
            id = label.trim().to_string();
            lines.remove(0);
        }
    }
    let Some(first) = lines.first() else {
        return Err(PatternError::EmptyInput);
    };
    let width = first.chars().count();
    if width == 0 {
        return Err(PatternError::EmptyInput);
    }
    let mut cells = Vec::with_capacity(width * lines.len());
    for (row, line) in lines.iter().enumerate() {
        let found = line.chars().count();
        if found != width {
            return Err(PatternError::RaggedRows {
                row,
                expected: width,
                found,
            });
        }
        for (col, ch) in line.chars().enumerate() {
            cells.push(Cell::from_char(ch).ok_or(PatternError::IllegalCharacter { ch, row, col })?);
        }
    }
    GridPattern::from_cells(id, lines.len(), width, cells)
}

/// Parses a file holding several patterns separated by blank lines.
pub fn parse_pattern_file(text: &str) -> Result<Vec<GridPattern>, PatternError> {
    let mut patterns = Vec::new();
    let mut block = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !block.is_empty() {
                patterns.push(parse_pattern(&block)?);
                block.clear();
            }
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    if !block.is_empty() {
        patterns.push(parse_pattern(&block)?);
    }
    if patterns.is_empty() {
        return Err(PatternError::EmptyInput);
    }
    Ok(patterns)
}

/// Inverse of [`parse_pattern`]. The `id:` line is emitted only for labelled patterns.
pub fn render_pattern(pattern: &GridPattern) -> String {
    let mut out = String::new();
    if !pattern.id.is_empty() {
        out.push_str(ID_PREFIX);
        out.push(' ');
        out.push_str(&pattern.id);
        out.push('\n');
    }
    for (row, chunk) in pattern.cells.chunks(pattern.width).enumerate() {
        if row > 0 {
            out.push('\n');
        }
        out.extend(chunk.iter().map(|c| c.to_char()));
    }
    out
}

/// Renders several patterns in the multi-pattern file format.
pub fn render_pattern_file(patterns: &[GridPattern]) -> String {
    let mut out = patterns
        .iter()
        .map(render_pattern)
        .collect::<Vec<_>>()
        .join("\n\n");
    out.push('\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Across,
    Down,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Across => "across",
            Orientation::Down => "down",
        })
    }
}

/// A maximal run of white cells that receives one answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub id: SlotId,
    pub orientation: Orientation,
    pub start: Coord,
    pub cells: Vec<Coord>,
}

impl Slot {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// A cell shared by an across slot and a down slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub across: SlotId,
    pub across_index: usize,
    pub down: SlotId,
    pub down_index: usize,
    pub cell: Coord,
}

/// Slot memberships of a single cell: `(slot, position within slot)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CellSlots {
    pub across: Option<(SlotId, usize)>,
    pub down: Option<(SlotId, usize)>,
}

impl CellSlots {
    pub fn count(&self) -> usize {
        self.across.is_some() as usize + self.down.is_some() as usize
    }
}

/// The CSP variables of a pattern: slots ordered across-first, then down,
/// each row-major by start cell.
#[derive(Debug, Clone)]
pub struct SlotSet {
    height: usize,
    width: usize,
    slots: Vec<Slot>,
    crossings: Vec<Crossing>,
    memberships: Vec<CellSlots>,
    /// Per slot: `(position in slot, crossing slot, position in crossing slot)`.
    neighbours: Vec<Vec<(usize, SlotId, usize)>>,
}

impl SlotSet {
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, id: SlotId) -> &Slot {
        &self.slots[id]
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn slots_at(&self, (row, col): Coord) -> CellSlots {
        self.memberships[row * self.width + col]
    }

    pub fn neighbours(&self, id: SlotId) -> &[(usize, SlotId, usize)] {
        &self.neighbours[id]
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternPolicy {
    pub min_slot_length: usize,
    pub forbid_isolated_white: bool,
    pub require_connected: bool,
}

impl Default for PatternPolicy {
    fn default() -> Self {
        PatternPolicy {
            min_slot_length: 2,
            forbid_isolated_white: true,
            require_connected: false,
        }
    }
}

impl PatternPolicy {
    pub fn check(&self) -> Result<(), PatternError> {
        if self.min_slot_length < 2 {
            return Err(PatternError::InvalidPolicy(self.min_slot_length));
        }
        Ok(())
    }
}

/// Collects every maximal white run of at least `policy.min_slot_length` cells.
pub fn extract_slots(pattern: &GridPattern, policy: &PatternPolicy) -> SlotSet {
    let min_len = policy.min_slot_length.max(2);
    let (height, width) = (pattern.height, pattern.width);
    let mut slots = Vec::new();

    for orientation in [Orientation::Across, Orientation::Down] {
        let (outer, inner) = match orientation {
            Orientation::Across => (height, width),
            Orientation::Down => (width, height),
        };
        let at = |o: usize, i: usize| match orientation {
            Orientation::Across => (o, i),
            Orientation::Down => (i, o),
        };
        let mut runs = Vec::new();
        for o in 0..outer {
            let mut i = 0;
            while i < inner {
                if !pattern.is_white(at(o, i)) {
                    i += 1;
                    continue;
                }
                let begin = i;
                while i < inner && pattern.is_white(at(o, i)) {
                    i += 1;
                }
                if i - begin >= min_len {
                    runs.push((begin..i).map(|k| at(o, k)).collect::<Vec<_>>());
                }
            }
        }
        // Down runs were found column-major; canonical order is row-major by start.
        runs.sort_by_key(|cells| cells[0]);
        for cells in runs {
            slots.push(Slot {
                id: slots.len(),
                orientation,
                start: cells[0],
                cells,
            });
        }
    }

    let mut memberships = vec![CellSlots::default(); height * width];
    for slot in &slots {
        for (pos, &(r, c)) in slot.cells.iter().enumerate() {
            let m = &mut memberships[r * width + c];
            match slot.orientation {
                Orientation::Across => m.across = Some((slot.id, pos)),
                Orientation::Down => m.down = Some((slot.id, pos)),
            }
        }
    }

    let mut crossings = Vec::new();
    let mut neighbours = vec![Vec::new(); slots.len()];
    for (idx, m) in memberships.iter().enumerate() {
        if let (Some((a, ai)), Some((d, di))) = (m.across, m.down) {
            crossings.push(Crossing {
                across: a,
                across_index: ai,
                down: d,
                down_index: di,
                cell: (idx / width, idx % width),
            });
            neighbours[a].push((ai, d, di));
            neighbours[d].push((di, a, ai));
        }
    }
    crossings.sort_by_key(|c| (c.across, c.across_index));
    for list in &mut neighbours {
        list.sort_unstable();
    }

    SlotSet {
        height,
        width,
        slots,
        crossings,
        memberships,
        neighbours,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NoWhiteCells,
    /// A white cell that no slot covers.
    UncoveredCell { row: usize, col: usize },
    /// The white cells split into `regions` disconnected groups.
    Disconnected { regions: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_pattern(pattern: &GridPattern, policy: &PatternPolicy) -> ValidationReport {
    let mut violations = Vec::new();
    if pattern.white_count() == 0 {
        violations.push(Violation::NoWhiteCells);
        return ValidationReport { violations };
    }
    if policy.forbid_isolated_white {
        let slots = extract_slots(pattern, policy);
        for row in 0..pattern.height {
            for col in 0..pattern.width {
                if pattern.is_white((row, col)) && slots.slots_at((row, col)).count() == 0 {
                    violations.push(Violation::UncoveredCell { row, col });
                }
            }
        }
    }
    if policy.require_connected {
        let regions = white_regions(pattern);
        if regions > 1 {
            violations.push(Violation::Disconnected { regions });
        }
    }
    ValidationReport { violations }
}

fn white_regions(pattern: &GridPattern) -> usize {
    let (h, w) = (pattern.height, pattern.width);
    let mut seen = vec![false; h * w];
    let mut regions = 0;
    let mut queue = VecDeque::new();
    for start in 0..h * w {
        if seen[start] || pattern.cells[start] == Cell::Black {
            continue;
        }
        regions += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (r, c) = (idx / w, idx % w);
            let mut visit = |rr: usize, cc: usize| {
                let j = rr * w + cc;
                if !seen[j] && pattern.cells[j] == Cell::White {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if r > 0 {
                visit(r - 1, c);
            }
            if r + 1 < h {
                visit(r + 1, c);
            }
            if c > 0 {
                visit(r, c - 1);
            }
            if c + 1 < w {
                visit(r, c + 1);
            }
        }
    }
    regions
}

/// Samples `count` distinct valid patterns with exactly `n_black` black cells.
///
/// Black-cell subsets are drawn uniformly and rejected when
/// [`validate_pattern`] reports a violation. Output is a pure function of the
/// arguments.
pub fn generate_random_patterns(
    height: usize,
    width: usize,
    n_black: usize,
    count: usize,
    policy: &PatternPolicy,
    seed: u64,
) -> Result<Vec<GridPattern>, PatternError> {
    generate_random_patterns_capped(height, width, n_black, count, policy, seed, DEFAULT_ATTEMPT_CAP)
}

pub fn generate_random_patterns_capped(
    height: usize,
    width: usize,
    n_black: usize,
    count: usize,
    policy: &PatternPolicy,
    seed: u64,
    attempt_cap: usize,
) -> Result<Vec<GridPattern>, PatternError> {
    policy.check()?;
    let total = height * width;
    if total == 0 {
        return Err(PatternError::EmptyInput);
    }
    if n_black >= total {
        return Err(PatternError::TooManyBlack {
            height,
            width,
            n_black,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts == attempt_cap {
            return Err(PatternError::ExhaustedAttempts {
                requested: count,
                found: out.len(),
                attempts,
            });
        }
        attempts += 1;
        let mut cells = vec![Cell::White; total];
        for i in index::sample(&mut rng, total, n_black) {
            cells[i] = Cell::Black;
        }
        if seen.contains(&cells) {
            continue;
        }
        let id = format!("{height}x{width}-b{n_black:02}-{:03}", out.len());
        let pattern = GridPattern::from_cells(id, height, width, cells.clone())?;
        if validate_pattern(&pattern, policy).is_valid() {
            seen.insert(cells);
            out.push(pattern);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent run scanner: walks every cell and measures the run through it.
    fn naive_runs(p: &GridPattern, min_len: usize) -> Vec<(Orientation, Coord, usize)> {
        let mut runs = Vec::new();
        for r in 0..p.height() {
            for c in 0..p.width() {
                if !p.is_white((r, c)) {
                    continue;
                }
                if c == 0 || !p.is_white((r, c - 1)) {
                    let len = (c..p.width()).take_while(|&k| p.is_white((r, k))).count();
                    if len >= min_len {
                        runs.push((Orientation::Across, (r, c), len));
                    }
                }
                if r == 0 || !p.is_white((r - 1, c)) {
                    let len = (r..p.height()).take_while(|&k| p.is_white((k, c))).count();
                    if len >= min_len {
                        runs.push((Orientation::Down, (r, c), len));
                    }
                }
            }
        }
        runs.sort();
        runs
    }

    #[test]
    fn parses_small_patterns() {
        let p = parse_pattern("..\n..").unwrap();
        assert_eq!((p.height(), p.width(), p.black_count()), (2, 2, 0));

        let p = parse_pattern("#.\n.#").unwrap();
        assert_eq!(p.cell((0, 0)), Cell::Black);
        assert_eq!(p.cell((1, 1)), Cell::Black);
        assert_eq!(p.cell((0, 1)), Cell::White);
    }

    #[test]
    fn parses_seven_by_seven_with_eleven_black() {
        let text = "#..#...\n.#.....\n..#..#.\n...#...\n.#..#..\n.......\n...#.##";
        let p = parse_pattern(text).unwrap();
        assert_eq!((p.height(), p.width(), p.black_count()), (7, 7, 11));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_pattern(""), Err(PatternError::EmptyInput));
        assert_eq!(parse_pattern("\n\n"), Err(PatternError::EmptyInput));
        assert_eq!(parse_pattern("id: x\n"), Err(PatternError::EmptyInput));
        assert!(matches!(
            parse_pattern("..\n..."),
            Err(PatternError::RaggedRows { row: 1, expected: 2, found: 3 })
        ));
        assert!(matches!(
            parse_pattern(".x"),
            Err(PatternError::IllegalCharacter { ch: 'x', row: 0, col: 1 })
        ));
    }

    #[test]
    fn parse_accepts_id_line_and_crlf() {
        let p = parse_pattern("id: demo\r\n.#\r\n..\r\n").unwrap();
        assert_eq!(p.id(), "demo");
        assert_eq!(p.black_count(), 1);
    }

    #[test]
    fn pattern_file_round_trip() {
        let pats = generate_random_patterns(5, 5, 4, 3, &PatternPolicy::default(), 1).unwrap();
        let text = render_pattern_file(&pats);
        assert_eq!(parse_pattern_file(&text).unwrap(), pats);
    }

    #[test]
    fn renders() {
        assert_eq!(render_pattern(&parse_pattern("..\n..").unwrap()), "..\n..");
        assert_eq!(render_pattern(&parse_pattern("#.").unwrap()), "#.");
        let p = parse_pattern("#.").unwrap().with_id("x");
        assert_eq!(render_pattern(&p), "id: x\n#.");
    }

    #[test]
    fn single_row_has_one_slot() {
        let s = extract_slots(&parse_pattern(".....").unwrap(), &PatternPolicy::default());
        assert_eq!(s.len(), 1);
        assert_eq!(s.slot(0).orientation, Orientation::Across);
        assert_eq!(s.slot(0).len(), 5);
        assert!(s.crossings().is_empty());
    }

    #[test]
    fn all_black_has_no_slots() {
        let p = GridPattern::from_cells("", 7, 7, vec![Cell::Black; 49]).unwrap();
        assert!(extract_slots(&p, &PatternPolicy::default()).is_empty());
        assert_eq!(
            validate_pattern(&p, &PatternPolicy::default()).violations,
            vec![Violation::NoWhiteCells]
        );
    }

    #[test]
    fn open_two_by_two() {
        let s = extract_slots(&GridPattern::open(2, 2).unwrap(), &PatternPolicy::default());
        let across = s.slots().iter().filter(|s| s.orientation == Orientation::Across).count();
        assert_eq!((s.len(), across, s.crossings().len()), (4, 2, 4));
        assert!(s.slots().iter().all(|s| s.len() == 2));
        // Canonical ids: across rows then down columns.
        assert_eq!(s.slot(0).start, (0, 0));
        assert_eq!(s.slot(1).start, (1, 0));
        assert_eq!((s.slot(2).orientation, s.slot(2).start), (Orientation::Down, (0, 0)));
        assert_eq!(s.slot(3).start, (0, 1));
        for c in s.crossings() {
            assert_eq!(s.slot(c.across).cells[c.across_index], c.cell);
            assert_eq!(s.slot(c.down).cells[c.down_index], c.cell);
        }
        assert_eq!(naive_runs(&GridPattern::open(2, 2).unwrap(), 2).len(), 4);
    }

    #[test]
    fn isolated_centre_is_invalid() {
        let p = parse_pattern(".#.\n#.#\n.#.").unwrap();
        let report = validate_pattern(&p, &PatternPolicy::default());
        assert!(report.violations.contains(&Violation::UncoveredCell { row: 1, col: 1 }));
        assert!(!report.is_valid());
        assert!(naive_runs(&p, 2).is_empty());
    }

    #[test]
    fn minimal_strip_is_valid() {
        let p = parse_pattern("..").unwrap();
        assert!(validate_pattern(&p, &PatternPolicy::default()).is_valid());
        assert!(validate_pattern(&GridPattern::open(2, 2).unwrap(), &PatternPolicy::default()).is_valid());
    }

    #[test]
    fn connectivity_is_opt_in() {
        let p = parse_pattern("..#..\n..#..").unwrap();
        assert!(validate_pattern(&p, &PatternPolicy::default()).is_valid());
        let strict = PatternPolicy {
            require_connected: true,
            ..Default::default()
        };
        assert_eq!(
            validate_pattern(&p, &strict).violations,
            vec![Violation::Disconnected { regions: 2 }]
        );
    }

    #[test]
    fn longer_minimum_slot_length() {
        let policy = PatternPolicy {
            min_slot_length: 3,
            ..Default::default()
        };
        let p = parse_pattern("...#..").unwrap();
        assert_eq!(extract_slots(&p, &policy).len(), 1);
        assert!(!validate_pattern(&p, &policy).is_valid());
        assert_eq!(
            generate_random_patterns(3, 3, 0, 1, &PatternPolicy { min_slot_length: 1, ..policy }, 0),
            Err(PatternError::InvalidPolicy(1))
        );
    }

    #[test]
    fn random_seven_by_seven_patterns() {
        let policy = PatternPolicy::default();
        let pats = generate_random_patterns(7, 7, 9, 10, &policy, 42).unwrap();
        assert_eq!(pats.len(), 10);
        let distinct: HashSet<_> = pats.iter().map(|p| p.cells().to_vec()).collect();
        assert_eq!(distinct.len(), 10);
        for p in &pats {
            assert_eq!(p.black_count(), 9);
            assert!(validate_pattern(p, &policy).is_valid());
        }
        assert_eq!(pats, generate_random_patterns(7, 7, 9, 10, &policy, 42).unwrap());
        assert_ne!(pats, generate_random_patterns(7, 7, 9, 10, &policy, 43).unwrap());
    }

    #[test]
    fn zero_black_two_by_two() {
        let pats = generate_random_patterns(2, 2, 0, 1, &PatternPolicy::default(), 5).unwrap();
        assert_eq!(pats[0].cells(), GridPattern::open(2, 2).unwrap().cells());
    }

    #[test]
    fn sampling_gives_up() {
        // Only one all-white 2x2 pattern exists, so a second is unreachable.
        let err = generate_random_patterns_capped(2, 2, 0, 2, &PatternPolicy::default(), 5, 50);
        assert_eq!(
            err,
            Err(PatternError::ExhaustedAttempts { requested: 2, found: 1, attempts: 50 })
        );
        assert!(matches!(
            generate_random_patterns(2, 2, 4, 1, &PatternPolicy::default(), 0),
            Err(PatternError::TooManyBlack { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_pattern() -> impl Strategy<Value = GridPattern> {
            (1usize..=7, 1usize..=7).prop_flat_map(|(h, w)| {
                prop::collection::vec(prop::bool::weighted(0.25), h * w).prop_map(move |bits| {
                    let cells = bits
                        .into_iter()
                        .map(|b| if b { Cell::Black } else { Cell::White })
                        .collect();
                    GridPattern::from_cells("", h, w, cells).unwrap()
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn extraction_matches_naive_scanner(p in arb_pattern(), min_len in 2usize..4) {
                let policy = PatternPolicy { min_slot_length: min_len, ..Default::default() };
                let set = extract_slots(&p, &policy);
                let mut got: Vec<_> = set.slots().iter().map(|s| (s.orientation, s.start, s.len())).collect();
                got.sort();
                prop_assert_eq!(got, naive_runs(&p, min_len));
                for (i, s) in set.slots().iter().enumerate() {
                    prop_assert_eq!(s.id, i);
                    for w in s.cells.windows(2) {
                        let step = match s.orientation {
                            Orientation::Across => (w[0].0, w[0].1 + 1),
                            Orientation::Down => (w[0].0 + 1, w[0].1),
                        };
                        prop_assert_eq!(w[1], step);
                    }
                }
                // Each doubly-covered cell appears in exactly one crossing.
                let doubly = (0..p.height())
                    .flat_map(|r| (0..p.width()).map(move |c| (r, c)))
                    .filter(|&rc| set.slots_at(rc).count() == 2)
                    .count();
                prop_assert_eq!(doubly, set.crossings().len());
                let across_cells: usize = set.slots().iter()
                    .filter(|s| s.orientation == Orientation::Across).map(Slot::len).sum();
                let naive_across: usize = naive_runs(&p, min_len).iter()
                    .filter(|r| r.0 == Orientation::Across).map(|r| r.2).sum();
                prop_assert_eq!(across_cells, naive_across);
            }

            #[test]
            fn render_parse_round_trip(p in arb_pattern()) {
                prop_assert_eq!(parse_pattern(&render_pattern(&p)).unwrap(), p);
            }
        }
    }
}
