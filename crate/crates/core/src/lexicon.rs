//! Answer words, their normalization to the grid alphabet, and the
//! `(length, position, letter)` index the solver queries.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use unicode_normalization::char::{decompose_canonical, is_combining_mark};

use crate::bitset::BitSet;

/// Shortest answer the grid can hold.
pub const MIN_ANSWER_LEN: usize = 2;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("unmappable character {ch:?} in {surface:?}")]
    Unmappable { ch: char, surface: String },
    #[error("normalized answer {answer:?} is shorter than {MIN_ANSWER_LEN}")]
    TooShort { answer: String },
    #[error("empty surface form")]
    EmptySurface,
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("invalid normalization table: {0}")]
    Table(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Where a word came from. `Topic` sorts before `Filler`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Topic,
    Filler,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Topic => "topic",
            Source::Filler => "filler",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub answer: String,
    pub surface: String,
    pub source: Source,
    pub clues: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DropPolicy {
    Reject,
    #[default]
    Skip,
}

/// Maps surface text onto the grid alphabet.
///
/// Explicit `mappings` are applied first (longest key wins). Any other
/// character is optionally stripped of Latin diacritics and upper-cased, and
/// must then be alphabetic; anything else is unmappable and handled per
/// `drop_policy`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationTable {
    mappings: Vec<(Vec<char>, String)>,
    max_key_len: usize,
    pub fold_case: bool,
    pub strip_diacritics: bool,
    pub drop_policy: DropPolicy,
}

impl Default for NormalizationTable {
    fn default() -> Self {
        NormalizationTable {
            mappings: Vec::new(),
            max_key_len: 0,
            fold_case: true,
            strip_diacritics: true,
            drop_policy: DropPolicy::Skip,
        }
    }
}

impl NormalizationTable {
    pub fn with_mappings<I, K, V>(mappings: I, drop_policy: DropPolicy) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        let mut table = NormalizationTable {
            drop_policy,
            ..Default::default()
        };
        for (k, v) in mappings {
            let key: Vec<char> = k.as_ref().chars().collect();
            if key.is_empty() {
                return Err(LexiconError::Table("empty mapping key".into()));
            }
            table.mappings.push((key, v.into()));
        }
        // Longest keys first so the scan below finds the longest match.
        table.mappings.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        table.max_key_len = table.mappings.first().map_or(0, |m| m.0.len());
        table.check_closed()?;
        Ok(table)
    }

    /// Parses the JSON form: `{"<source>": "<replacement>", ..., "drop_policy": "skip"}`.
    /// `fold_case` and `strip_diacritics` may be given as booleans.
    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| LexiconError::Table(e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(LexiconError::Table("expected a JSON object".into()));
        };
        let mut drop_policy = DropPolicy::default();
        let mut fold_case = true;
        let mut strip_diacritics = true;
        let mut mappings = Vec::new();
        for (key, val) in map {
            match key.as_str() {
                "drop_policy" => {
                    drop_policy = serde_json::from_value(val)
                        .map_err(|e| LexiconError::Table(format!("drop_policy: {e}")))?
                }
                "fold_case" => fold_case = as_bool(&key, &val)?,
                "strip_diacritics" => strip_diacritics = as_bool(&key, &val)?,
                _ => match val {
                    Value::String(s) => mappings.push((key, s)),
                    other => {
                        return Err(LexiconError::Table(format!(
                            "mapping for {key:?} must be a string, got {other}"
                        )))
                    }
                },
            }
        }
        let mut table = Self::with_mappings(mappings, drop_policy)?;
        table.fold_case = fold_case;
        table.strip_diacritics = strip_diacritics;
        table.check_closed()?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Every replacement must already be in normal form, which makes
    /// normalization idempotent.
    fn check_closed(&self) -> Result<(), LexiconError> {
        for (key, replacement) in &self.mappings {
            let mut out = String::new();
            let ok = self.apply(replacement, DropPolicy::Reject, &mut out).is_ok();
            if !ok || out != *replacement {
                return Err(LexiconError::Table(format!(
                    "replacement {replacement:?} for {:?} is not in normal form",
                    key.iter().collect::<String>()
                )));
            }
        }
        Ok(())
    }

    fn apply(&self, surface: &str, policy: DropPolicy, out: &mut String) -> Result<(), LexiconError> {
        let chars: Vec<char> = surface.chars().collect();
        let mut i = 0;
        'outer: while i < chars.len() {
            let window = self.max_key_len.min(chars.len() - i);
            for (key, replacement) in &self.mappings {
                if key.len() <= window && chars[i..i + key.len()] == key[..] {
                    out.push_str(replacement);
                    i += key.len();
                    continue 'outer;
                }
            }
            let ch = chars[i];
            i += 1;
            let mut base = String::new();
            if self.strip_diacritics && is_latin(ch) {
                decompose_canonical(ch, |c| {
                    if !is_combining_mark(c) {
                        base.push(c);
                    }
                });
            } else {
                base.push(ch);
            }
            for c in base.chars() {
                let folded: Vec<char> = if self.fold_case {
                    c.to_uppercase().collect()
                } else {
                    vec![c]
                };
                for f in folded {
                    if f.is_alphabetic() {
                        out.push(f);
                    } else if policy == DropPolicy::Reject {
                        return Err(LexiconError::Unmappable {
                            ch,
                            surface: surface.to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn as_bool(key: &str, val: &Value) -> Result<bool, LexiconError> {
    val.as_bool()
        .ok_or_else(|| LexiconError::Table(format!("{key} must be a boolean")))
}

fn is_latin(ch: char) -> bool {
    matches!(ch, '\u{00C0}'..='\u{024F}' | '\u{1E00}'..='\u{1EFF}')
}

/// Converts a surface form to a grid answer.
pub fn normalize(surface: &str, table: &NormalizationTable) -> Result<String, LexiconError> {
    if surface.is_empty() {
        return Err(LexiconError::EmptySurface);
    }
    let mut out = String::new();
    table.apply(surface, table.drop_policy, &mut out)?;
    if out.chars().count() < MIN_ANSWER_LEN {
        return Err(LexiconError::TooShort { answer: out });
    }
    Ok(out)
}

/// One line of the JSON Lines lexicon format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconRecord {
    pub surface: String,
    pub source: Source,
    #[serde(default)]
    pub clues: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconCounts {
    pub topic: usize,
    pub filler: usize,
    /// Input words dropped because normalization failed or left fewer than two letters.
    pub skipped: usize,
}

/// Deduplicated entries sorted by answer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    counts: LexiconCounts,
}

impl Lexicon {
    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn counts(&self) -> LexiconCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, answer: &str) -> Option<&LexiconEntry> {
        self.entries
            .binary_search_by(|e| e.answer.as_str().cmp(answer))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Builds a lexicon straight from surface forms (used for synthetic data and tests).
    pub fn from_words<'a, I>(words: I, table: &NormalizationTable) -> Self
    where
        I: IntoIterator<Item = (&'a str, Source)>,
    {
        let mut builder = LexiconBuilder::new(table.clone());
        for (surface, source) in words {
            builder.add(surface, source, Vec::new());
        }
        builder.finish()
    }
}

/// Accumulates raw records, applying normalization and the Topic-wins merge rule.
#[derive(Debug)]
pub struct LexiconBuilder {
    table: NormalizationTable,
    entries: BTreeMap<String, LexiconEntry>,
    skipped: usize,
}

impl LexiconBuilder {
    pub fn new(table: NormalizationTable) -> Self {
        LexiconBuilder {
            table,
            entries: BTreeMap::new(),
            skipped: 0,
        }
    }

    /// Returns false when the surface could not be normalized.
    pub fn add(&mut self, surface: &str, source: Source, clues: Vec<String>) -> bool {
        let answer = match normalize(surface, &self.table) {
            Ok(a) => a,
            Err(e) => {
                log::debug!("skipping {surface:?}: {e}");
                self.skipped += 1;
                return false;
            }
        };
        match self.entries.get_mut(&answer) {
            Some(existing) => {
                if source == Source::Topic && existing.source == Source::Filler {
                    existing.source = Source::Topic;
                    existing.surface = surface.to_string();
                }
                for clue in clues {
                    if !existing.clues.contains(&clue) {
                        existing.clues.push(clue);
                    }
                }
            }
            None => {
                let mut unique = Vec::with_capacity(clues.len());
                for clue in clues {
                    if !unique.contains(&clue) {
                        unique.push(clue);
                    }
                }
                self.entries.insert(
                    answer.clone(),
                    LexiconEntry {
                        answer,
                        surface: surface.to_string(),
                        source,
                        clues: unique,
                    },
                );
            }
        }
        true
    }

    pub fn add_word_list(&mut self, text: &str, source: Source) {
        for line in text.lines() {
            let word = line.trim();
            if word.is_empty() || word.starts_with('#') {
                continue;
            }
            self.add(word, source, Vec::new());
        }
    }

    pub fn add_json_lines(&mut self, text: &str, file: &str) -> Result<(), LexiconError> {
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: LexiconRecord =
                serde_json::from_str(line).map_err(|e| LexiconError::Parse {
                    file: file.to_string(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
            self.add(&record.surface, record.source, record.clues);
        }
        Ok(())
    }

    pub fn finish(self) -> Lexicon {
        let entries: Vec<LexiconEntry> = self.entries.into_values().collect();
        let topic = entries.iter().filter(|e| e.source == Source::Topic).count();
        Lexicon {
            counts: LexiconCounts {
                topic,
                filler: entries.len() - topic,
                skipped: self.skipped,
            },
            entries,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconFormat {
    /// One surface form per line; all words get the given source.
    WordList(Source),
    JsonLines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconFile {
    pub path: PathBuf,
    pub format: LexiconFormat,
}

impl LexiconFile {
    /// `.jsonl`/`.ndjson` files are JSON Lines; anything else is a word list of `source`.
    pub fn detect(path: impl Into<PathBuf>, source: Source) -> Self {
        let path = path.into();
        let jsonl = matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("jsonl" | "ndjson")
        );
        LexiconFile {
            path,
            format: if jsonl {
                LexiconFormat::JsonLines
            } else {
                LexiconFormat::WordList(source)
            },
        }
    }
}

pub fn ingest_lexicon(
    sources: &[LexiconFile],
    table: &NormalizationTable,
) -> Result<Lexicon, LexiconError> {
    let mut builder = LexiconBuilder::new(table.clone());
    for file in sources {
        let text = fs::read_to_string(&file.path).map_err(|source| LexiconError::Io {
            path: file.path.clone(),
            source,
        })?;
        match file.format {
            LexiconFormat::WordList(source) => builder.add_word_list(&text, source),
            LexiconFormat::JsonLines => {
                builder.add_json_lines(&text, &file.path.display().to_string())?
            }
        }
    }
    let lexicon = builder.finish();
    if lexicon.counts.skipped > 0 {
        log::warn!("skipped {} unusable lexicon words", lexicon.counts.skipped);
    }
    Ok(lexicon)
}

/// Index into [`WordIndex`] entries (and the lexicon it was built from).
pub type EntryId = u32;

/// All entries of one answer length, ordered Topic-first then by answer.
#[derive(Debug, Clone)]
pub struct Bucket {
    entries: Vec<EntryId>,
    topic_len: usize,
    letters: Vec<char>,
    /// `by_position[i][c]` = bucket positions whose answer has letter `c` at `i`.
    by_position: Vec<HashMap<char, BitSet>>,
    empty: BitSet,
}

impl Bucket {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Bucket positions `0..topic_len()` hold the Topic entries.
    pub fn topic_len(&self) -> usize {
        self.topic_len
    }

    pub fn entry(&self, pos: usize) -> EntryId {
        self.entries[pos]
    }

    pub fn entries(&self) -> &[EntryId] {
        &self.entries
    }

    pub fn letter(&self, pos: usize, i: usize) -> char {
        self.letters[pos * self.word_len() + i]
    }

    fn word_len(&self) -> usize {
        self.by_position.len()
    }

    pub fn with_letter(&self, i: usize, c: char) -> &BitSet {
        self.by_position[i].get(&c).unwrap_or(&self.empty)
    }

    /// Writes the bucket positions matching every fixed letter into `out`.
    pub fn filter(&self, fixed: &[(usize, char)], out: &mut BitSet) {
        match fixed.split_first() {
            None => *out = BitSet::full(self.len()),
            Some((&(i, c), rest)) => {
                out.copy_from(self.with_letter(i, c));
                for &(i, c) in rest {
                    out.intersect_with(self.with_letter(i, c));
                }
            }
        }
    }
}

/// Candidate lookup by `(length, position, letter)`.
#[derive(Debug, Clone, Default)]
pub struct WordIndex {
    answers: Vec<String>,
    sources: Vec<Source>,
    buckets: HashMap<usize, Bucket>,
    /// `(length, bucket position)` of every entry.
    locations: Vec<(usize, usize)>,
}

pub fn build_index(lexicon: &Lexicon) -> WordIndex {
    let mut by_len: BTreeMap<usize, Vec<EntryId>> = BTreeMap::new();
    let mut answers = Vec::with_capacity(lexicon.len());
    let mut sources = Vec::with_capacity(lexicon.len());
    for (id, e) in lexicon.entries().iter().enumerate() {
        by_len.entry(e.answer.chars().count()).or_default().push(id as EntryId);
        answers.push(e.answer.clone());
        sources.push(e.source);
    }
    let mut locations = vec![(0, 0); answers.len()];
    let mut buckets = HashMap::new();
    for (len, mut ids) in by_len {
        // Lexicon order is already sorted by answer; a stable sort on source keeps that within groups.
        ids.sort_by_key(|&id| sources[id as usize]);
        let topic_len = ids.iter().filter(|&&id| sources[id as usize] == Source::Topic).count();
        let mut by_position = vec![HashMap::<char, BitSet>::new(); len];
        let mut letters = Vec::with_capacity(len * ids.len());
        for (pos, &id) in ids.iter().enumerate() {
            locations[id as usize] = (len, pos);
            for (i, c) in answers[id as usize].chars().enumerate() {
                letters.push(c);
                by_position[i]
                    .entry(c)
                    .or_insert_with(|| BitSet::new(ids.len()))
                    .insert(pos);
            }
        }
        let empty = BitSet::new(ids.len());
        buckets.insert(
            len,
            Bucket {
                entries: ids,
                topic_len,
                letters,
                by_position,
                empty,
            },
        );
    }
    WordIndex {
        answers,
        sources,
        buckets,
        locations,
    }
}

impl WordIndex {
    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn answer(&self, id: EntryId) -> &str {
        &self.answers[id as usize]
    }

    pub fn source(&self, id: EntryId) -> Source {
        self.sources[id as usize]
    }

    pub fn bucket(&self, len: usize) -> Option<&Bucket> {
        self.buckets.get(&len)
    }

    /// `(length, position within that length's bucket)`.
    pub fn location(&self, id: EntryId) -> (usize, usize) {
        self.locations[id as usize]
    }

    pub fn lengths(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.buckets.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// Entries of the given length in candidate order.
    pub fn by_length(&self, len: usize) -> &[EntryId] {
        self.bucket(len).map_or(&[], |b| b.entries())
    }

    /// Entries of length `len` with `letter` at `position`, in candidate order.
    pub fn matching(&self, len: usize, position: usize, letter: char) -> Vec<EntryId> {
        match self.bucket(len) {
            Some(b) if position < len => b
                .with_letter(position, letter)
                .iter()
                .map(|p| b.entry(p))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Entries of length `len` agreeing with every fixed letter and not excluded,
    /// Topic entries first, then by answer.
    pub fn candidates(
        &self,
        len: usize,
        fixed: &[(usize, char)],
        excluded: &HashSet<String>,
    ) -> Vec<EntryId> {
        let Some(bucket) = self.bucket(len) else {
            return Vec::new();
        };
        assert!(fixed.iter().all(|&(i, _)| i < len), "fixed position out of range");
        let mut set = BitSet::new(bucket.len());
        bucket.filter(fixed, &mut set);
        set.iter()
            .map(|p| bucket.entry(p))
            .filter(|&id| !excluded.contains(self.answer(id)))
            .collect()
    }
}
