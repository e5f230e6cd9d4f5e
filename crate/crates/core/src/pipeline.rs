//! Corpus to clued topic lexicon: keyword detection behind a pluggable
//! extractor, then fill-in-the-blank clues made by masking the keyword in its
//! sentence.
//!
//! All offsets are character (code point) offsets, not byte offsets.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use aho_corasick::{AhoCorasick, MatchKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{normalize, LexiconRecord, NormalizationTable, Source};

pub const DEFAULT_MASK: &str = "[Answer]";
pub const DEFAULT_MIN_CONTEXT: usize = 10;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("keyword extractor unavailable: {0}")]
    ExtractorUnavailable(String),
    #[error("document {doc_id}: keyword {surface:?} at {start}..{end} does not match the text")]
    OffsetOutOfRange {
        doc_id: String,
        surface: String,
        start: usize,
        end: usize,
    },
    #[error("document {doc_id}: sentence leaves {found} characters of context, need {min}")]
    SentenceTooShort {
        doc_id: String,
        found: usize,
        min: usize,
    },
    #[error("document {doc_id}: masked clue still contains {surface:?}")]
    SelfLeak { doc_id: String, surface: String },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// A keyword span supplied with the document (e.g. by an external NER tool).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSpan {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

/// One line of the corpus JSON Lines file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    #[serde(default, rename = "keywords", skip_serializing_if = "Option::is_none")]
    pub pre_tagged_keywords: Option<Vec<TaggedSpan>>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            doc_id: doc_id.into(),
            text: text.into(),
            pre_tagged_keywords: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordOccurrence {
    pub surface: String,
    pub doc_id: String,
    pub char_start: usize,
    pub char_end: usize,
    pub sentence_span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClueRecord {
    pub answer: String,
    pub surface: String,
    pub clue_text: String,
    pub source_doc: String,
}

/// Finds keyword spans in a document.
pub trait KeywordExtractor: Sync {
    fn spans(&self, doc: &Document) -> Result<Vec<TaggedSpan>, PipelineError>;
}

/// Passes through `doc.pre_tagged_keywords`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PreTagged;

impl KeywordExtractor for PreTagged {
    fn spans(&self, doc: &Document) -> Result<Vec<TaggedSpan>, PipelineError> {
        let Some(tags) = &doc.pre_tagged_keywords else {
            return Err(PipelineError::ExtractorUnavailable(format!(
                "document {} has no pre-tagged keywords",
                doc.doc_id
            )));
        };
        let len = doc.text.chars().count();
        for t in tags {
            let ok = t.start < t.end
                && t.end <= len
                && doc.text.chars().skip(t.start).take(t.end - t.start).eq(t.surface.chars());
            if !ok {
                return Err(PipelineError::OffsetOutOfRange {
                    doc_id: doc.doc_id.clone(),
                    surface: t.surface.clone(),
                    start: t.start,
                    end: t.end,
                });
            }
        }
        Ok(tags.clone())
    }
}

/// Leftmost-longest, non-overlapping literal matching against a term list.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    automaton: AhoCorasick,
    terms: Vec<String>,
    /// Only accept matches not flanked by alphanumeric characters.
    pub word_boundaries: bool,
}

impl Gazetteer {
    pub fn new<I, S>(terms: I) -> Result<Self, PipelineError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut terms: Vec<String> = terms
            .into_iter()
            .map(Into::into)
            .filter(|t| !t.is_empty())
            .collect();
        terms.sort();
        terms.dedup();
        if terms.is_empty() {
            return Err(PipelineError::ExtractorUnavailable("empty gazetteer".into()));
        }
        let automaton = AhoCorasick::builder()
            .match_kind(MatchKind::LeftmostLongest)
            .build(&terms)
            .map_err(|e| PipelineError::ExtractorUnavailable(e.to_string()))?;
        Ok(Gazetteer {
            automaton,
            terms,
            word_boundaries: false,
        })
    }

    /// One term per line; blank lines and `#` comments ignored.
    pub fn from_term_list(text: &str) -> Result<Self, PipelineError> {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

impl KeywordExtractor for Gazetteer {
    fn spans(&self, doc: &Document) -> Result<Vec<TaggedSpan>, PipelineError> {
        let text = &doc.text;
        let mut spans = Vec::new();
        let mut chars_before = 0;
        let mut byte_cursor = 0;
        for m in self.automaton.find_iter(text) {
            if self.word_boundaries {
                let before = text[..m.start()].chars().next_back();
                let after = text[m.end()..].chars().next();
                if before.is_some_and(char::is_alphanumeric) || after.is_some_and(char::is_alphanumeric) {
                    continue;
                }
            }
            chars_before += text[byte_cursor..m.start()].chars().count();
            let surface = &text[m.start()..m.end()];
            let len = surface.chars().count();
            spans.push(TaggedSpan {
                surface: surface.to_string(),
                start: chars_before,
                end: chars_before + len,
            });
            chars_before += len;
            byte_cursor = m.end();
        }
        Ok(spans)
    }
}

/// Rule-based sentence splitter.
///
/// A sentence ends at a terminator followed by whitespace or end of text.
/// Full-width terminators (`。！？`) always end a sentence. When
/// `abbreviation_guard` is set, a `.` does not end a sentence after a token
/// like `U.S` or a single capital initial, or before a lowercase word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmenter {
    pub terminators: Vec<char>,
    pub abbreviation_guard: bool,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter {
            terminators: vec!['.', '!', '?', '。', '！', '？'],
            abbreviation_guard: true,
        }
    }
}

const CLOSERS: &[char] = &['"', '\'', ')', ']', '”', '’', '」', '』', '）'];

fn is_full_width_terminator(c: char) -> bool {
    matches!(c, '。' | '！' | '？')
}

impl Segmenter {
    /// Character spans `[start, end)` of each sentence, whitespace-trimmed.
    pub fn sentences(&self, text: &str) -> Vec<(usize, usize)> {
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();
        let mut spans = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < n {
            let c = chars[i];
            if !self.terminators.contains(&c) {
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < n && (self.terminators.contains(&chars[j]) || CLOSERS.contains(&chars[j])) {
                j += 1;
            }
            let at_break = j == n || chars[j].is_whitespace() || is_full_width_terminator(c);
            if at_break && !(c == '.' && self.abbreviation_guard && is_abbreviation(&chars, i, j)) {
                push_trimmed(&chars, start, j, &mut spans);
                start = j;
            }
            i = j;
        }
        push_trimmed(&chars, start, n, &mut spans);
        spans
    }
}

fn push_trimmed(chars: &[char], mut start: usize, mut end: usize, out: &mut Vec<(usize, usize)>) {
    while start < end && chars[start].is_whitespace() {
        start += 1;
    }
    while end > start && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    if start < end {
        out.push((start, end));
    }
}

/// `dot` is the index of a `.`; `after` is the index past any trailing closers.
fn is_abbreviation(chars: &[char], dot: usize, after: usize) -> bool {
    let token_start = chars[..dot]
        .iter()
        .rposition(|c| c.is_whitespace())
        .map_or(0, |p| p + 1);
    let token = &chars[token_start..dot];
    if token.contains(&'.') || (token.len() == 1 && token[0].is_uppercase()) {
        return true;
    }
    chars[after..]
        .iter()
        .find(|c| !c.is_whitespace())
        .is_some_and(|c| c.is_lowercase())
}

/// Runs the extractor and attaches each occurrence's enclosing sentence.
/// Occurrences come back in document order.
pub fn extract_keywords(
    doc: &Document,
    extractor: &dyn KeywordExtractor,
    segmenter: &Segmenter,
) -> Result<Vec<KeywordOccurrence>, PipelineError> {
    let mut spans = extractor.spans(doc)?;
    spans.sort_by_key(|s| (s.start, s.end));
    let sentences = segmenter.sentences(&doc.text);
    let total = doc.text.chars().count();
    Ok(spans
        .into_iter()
        .map(|s| {
            let sentence_span = sentences
                .iter()
                .copied()
                .find(|&(a, b)| a <= s.start && s.end <= b)
                // A keyword straddling a boundary takes the whole document as context.
                .unwrap_or((0, total));
            KeywordOccurrence {
                surface: s.surface,
                doc_id: doc.doc_id.clone(),
                char_start: s.start,
                char_end: s.end,
                sentence_span,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClueOptions {
    pub mask_token: String,
    /// Minimum number of non-mask characters a clue must keep.
    pub min_context_chars: usize,
    pub segmenter: Segmenter,
}

impl Default for ClueOptions {
    fn default() -> Self {
        ClueOptions {
            mask_token: DEFAULT_MASK.to_string(),
            min_context_chars: DEFAULT_MIN_CONTEXT,
            segmenter: Segmenter::default(),
        }
    }
}

/// Masks `occ` and every other occurrence of its surface within the enclosing sentence.
pub fn generate_clue(
    doc: &Document,
    occ: &KeywordOccurrence,
    options: &ClueOptions,
    table: &NormalizationTable,
) -> Result<ClueRecord, PipelineError> {
    let chars: Vec<char> = doc.text.chars().collect();
    let (s0, s1) = occ.sentence_span;
    let surface: Vec<char> = occ.surface.chars().collect();
    let mask = options.mask_token.as_str();

    let mut clue = String::new();
    let mut context = 0;
    let mut push_masked = |segment: &[char], clue: &mut String| {
        let mut i = 0;
        while i < segment.len() {
            if !surface.is_empty() && segment[i..].starts_with(&surface) {
                clue.push_str(mask);
                i += surface.len();
            } else {
                clue.push(segment[i]);
                context += 1;
                i += 1;
            }
        }
    };
    push_masked(&chars[s0..occ.char_start], &mut clue);
    clue.push_str(mask);
    push_masked(&chars[occ.char_end..s1], &mut clue);

    if clue.contains(&occ.surface) {
        return Err(PipelineError::SelfLeak {
            doc_id: doc.doc_id.clone(),
            surface: occ.surface.clone(),
        });
    }
    if context < options.min_context_chars {
        return Err(PipelineError::SentenceTooShort {
            doc_id: doc.doc_id.clone(),
            found: context,
            min: options.min_context_chars,
        });
    }
    let answer = normalize(&occ.surface, table).unwrap_or_default();
    Ok(ClueRecord {
        answer,
        surface: occ.surface.clone(),
        clue_text: clue,
        source_doc: doc.doc_id.clone(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub documents: usize,
    pub occurrences: usize,
    /// Occurrences whose surface could not be normalized to an answer.
    pub normalization_skipped: usize,
    /// Occurrences whose sentence made an unusable clue.
    pub unusable_clues: usize,
    /// Distinct answers dropped because none of their clues were usable.
    pub keywords_without_clues: usize,
    pub records: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopicLexicon {
    pub records: Vec<LexiconRecord>,
    pub stats: PipelineStats,
}

impl TopicLexicon {
    /// JSON Lines in the lexicon file format.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

enum Outcome {
    Clue(ClueRecord),
    Unnormalizable,
    Unusable(String),
}

/// Builds one Topic record per distinct normalized keyword, with all of its
/// usable clues in `(doc_id, offset)` order. Records are sorted by answer.
pub fn build_topic_lexicon(
    corpus: &[Document],
    extractor: &dyn KeywordExtractor,
    table: &NormalizationTable,
    options: &ClueOptions,
) -> Result<TopicLexicon, PipelineError> {
    if corpus.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    let mut docs: Vec<&Document> = corpus.iter().collect();
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));

    let per_doc: Vec<Vec<Outcome>> = docs
        .par_iter()
        .map(|doc| {
            let occurrences = extract_keywords(doc, extractor, &options.segmenter)?;
            Ok(occurrences
                .iter()
                .map(|occ| match normalize(&occ.surface, table) {
                    Err(_) => Outcome::Unnormalizable,
                    Ok(answer) => match generate_clue(doc, occ, options, table) {
                        Ok(clue) => Outcome::Clue(clue),
                        Err(_) => Outcome::Unusable(answer),
                    },
                })
                .collect())
        })
        .collect::<Result<_, PipelineError>>()?;

    let mut stats = PipelineStats {
        documents: corpus.len(),
        ..Default::default()
    };
    // answer -> (first surface, clues)
    let mut grouped: BTreeMap<String, (String, Vec<String>)> = BTreeMap::new();
    let mut seen_answers = std::collections::BTreeSet::new();
    for outcome in per_doc.into_iter().flatten() {
        stats.occurrences += 1;
        match outcome {
            Outcome::Unnormalizable => stats.normalization_skipped += 1,
            Outcome::Unusable(answer) => {
                stats.unusable_clues += 1;
                seen_answers.insert(answer);
            }
            Outcome::Clue(clue) => {
                seen_answers.insert(clue.answer.clone());
                let (_, clues) = grouped
                    .entry(clue.answer)
                    .or_insert_with(|| (clue.surface, Vec::new()));
                if !clues.contains(&clue.clue_text) {
                    clues.push(clue.clue_text);
                }
            }
        }
    }
    stats.keywords_without_clues = seen_answers.len() - grouped.len();
    let records: Vec<LexiconRecord> = grouped
        .into_values()
        .map(|(surface, clues)| LexiconRecord {
            surface,
            source: Source::Topic,
            clues,
        })
        .collect();
    stats.records = records.len();
    Ok(TopicLexicon { records, stats })
}

pub fn parse_corpus(text: &str, file: &str) -> Result<Vec<Document>, PipelineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| PipelineError::Parse {
                file: file.to_string(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_corpus(path: &Path) -> Result<Vec<Document>, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts_min(min: usize) -> ClueOptions {
        ClueOptions {
            min_context_chars: min,
            ..Default::default()
        }
    }

    fn only(doc: &Document, gaz: &Gazetteer) -> KeywordOccurrence {
        let occ = extract_keywords(doc, gaz, &Segmenter::default()).unwrap();
        assert_eq!(occ.len(), 1);
        occ.into_iter().next().unwrap()
    }

    #[test]
    fn gazetteer_single_match() {
        let gaz = Gazetteer::new(["Roomba"]).unwrap();
        let occ = only(&Document::new("d", "the Roomba sold well"), &gaz);
        assert_eq!((occ.char_start, occ.char_end), (4, 10));
        assert_eq!(occ.surface, "Roomba");
    }

    #[test]
    fn gazetteer_prefers_longest() {
        let gaz = Gazetteer::new(["AB", "ABC"]).unwrap();
        let occ = only(&Document::new("d", "xABCx"), &gaz);
        assert_eq!((occ.surface.as_str(), occ.char_start, occ.char_end), ("ABC", 1, 4));
    }

    #[test]
    fn gazetteer_offsets_are_characters() {
        let gaz = Gazetteer::new(["ルンバ"]).unwrap();
        let doc = Document::new("d", "新型ルンバが売れた。ルンバ。");
        let occ = extract_keywords(&doc, &gaz, &Segmenter::default()).unwrap();
        assert_eq!(occ.len(), 2);
        assert_eq!((occ[0].char_start, occ[0].char_end), (2, 5));
        assert_eq!(occ[0].sentence_span, (0, 10));
        assert_eq!((occ[1].char_start, occ[1].sentence_span), (10, (10, 14)));
    }

    #[test]
    fn gazetteer_word_boundaries() {
        let mut gaz = Gazetteer::new(["liberal"]).unwrap();
        let doc = Document::new("d", "liberalism and liberal views");
        assert_eq!(gaz.spans(&doc).unwrap().len(), 2);
        gaz.word_boundaries = true;
        let spans = gaz.spans(&doc).unwrap();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].start, 15);
        assert!(Gazetteer::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn pre_tagged_passthrough_and_errors() {
        let mut doc = Document::new("d", "Roomba sales rose.");
        assert!(matches!(PreTagged.spans(&doc), Err(PipelineError::ExtractorUnavailable(_))));
        doc.pre_tagged_keywords = Some(vec![]);
        assert!(extract_keywords(&doc, &PreTagged, &Segmenter::default()).unwrap().is_empty());
        doc.pre_tagged_keywords = Some(vec![TaggedSpan { surface: "Roomba".into(), start: 1, end: 7 }]);
        assert!(matches!(PreTagged.spans(&doc), Err(PipelineError::OffsetOutOfRange { .. })));
        doc.pre_tagged_keywords = Some(vec![TaggedSpan { surface: "rose".into(), start: 13, end: 40 }]);
        assert!(matches!(PreTagged.spans(&doc), Err(PipelineError::OffsetOutOfRange { .. })));
    }

    #[test]
    fn segmenter_handles_abbreviations() {
        let text = "U.S. media coverage of the U.S. midterm elections was divided between liberal and conservative media. Next one!";
        let spans = Segmenter::default().sentences(text);
        assert_eq!(spans.len(), 2);
        let first: String = text.chars().take(spans[0].1).collect();
        assert!(first.ends_with("conservative media."));
        let naive = Segmenter {
            abbreviation_guard: false,
            ..Default::default()
        };
        assert_eq!(naive.sentences(text).len(), 4);
        assert_eq!(Segmenter::default().sentences("He said \"no.\" Then left."), vec![(0, 13), (14, 24)]);
    }

    #[test]
    fn masks_liberal_example() {
        let text = "U.S. media coverage of the U.S. midterm elections was divided between liberal and conservative media.";
        let doc = Document::new("n1", text);
        let gaz = Gazetteer::new(["liberal"]).unwrap();
        let occ = only(&doc, &gaz);
        let clue = generate_clue(&doc, &occ, &ClueOptions::default(), &NormalizationTable::default()).unwrap();
        assert_eq!(
            clue.clue_text,
            "U.S. media coverage of the U.S. midterm elections was divided between [Answer] and conservative media."
        );
        assert_eq!(clue.answer, "LIBERAL");
        assert_eq!(clue.source_doc, "n1");
    }

    #[test]
    fn masks_every_occurrence_in_sentence() {
        let doc = Document::new("d", "AB is AB.");
        let gaz = Gazetteer::new(["AB"]).unwrap();
        let occ = extract_keywords(&doc, &gaz, &Segmenter::default()).unwrap();
        assert_eq!(occ.len(), 2);
        let table = NormalizationTable::default();
        for o in &occ {
            let clue = generate_clue(&doc, o, &opts_min(0), &table).unwrap();
            assert_eq!(clue.clue_text, "[Answer] is [Answer].");
        }
        // Five context characters fall below the default minimum.
        assert!(matches!(
            generate_clue(&doc, &occ[0], &ClueOptions::default(), &table),
            Err(PipelineError::SentenceTooShort { found: 5, min: 10, .. })
        ));
    }

    #[test]
    fn masks_at_sentence_start() {
        let doc = Document::new("d", "Roomba sales rose.");
        let gaz = Gazetteer::new(["Roomba"]).unwrap();
        let occ = only(&doc, &gaz);
        let clue = generate_clue(&doc, &occ, &ClueOptions::default(), &NormalizationTable::default()).unwrap();
        assert_eq!(clue.clue_text, "[Answer] sales rose.");
    }

    #[test]
    fn self_overlapping_surface_is_fully_masked() {
        let doc = Document::new("d", "the values AAA and AA appear here.");
        let occ = KeywordOccurrence {
            surface: "AA".into(),
            doc_id: "d".into(),
            char_start: 12,
            char_end: 14,
            sentence_span: (0, 34),
        };
        let clue = generate_clue(&doc, &occ, &ClueOptions::default(), &NormalizationTable::default()).unwrap();
        assert_eq!(clue.clue_text, "the values A[Answer] and [Answer] appear here.");
    }

    #[test]
    fn mask_containing_surface_is_a_leak() {
        let doc = Document::new("d", "The Answer is forty two, says the book.");
        let gaz = Gazetteer::new(["Answer"]).unwrap();
        let occ = only(&doc, &gaz);
        let err = generate_clue(&doc, &occ, &ClueOptions::default(), &NormalizationTable::default());
        assert!(matches!(err, Err(PipelineError::SelfLeak { .. })));
    }

    #[test]
    fn aggregates_clues_per_keyword() {
        let doc = Document::new("d1", "The Roomba sold well this year. Critics still love the Roomba today.");
        let gaz = Gazetteer::new(["Roomba"]).unwrap();
        let out = build_topic_lexicon(&[doc], &gaz, &NormalizationTable::default(), &ClueOptions::default()).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].surface, "Roomba");
        assert_eq!(out.records[0].source, Source::Topic);
        assert_eq!(
            out.records[0].clues,
            vec![
                "The [Answer] sold well this year.".to_string(),
                "Critics still love the [Answer] today.".to_string()
            ]
        );
        assert_eq!(out.stats.occurrences, 2);
    }

    #[test]
    fn no_keywords_gives_empty_output() {
        let doc = Document::new("d1", "Nothing to see here.");
        let gaz = Gazetteer::new(["Roomba"]).unwrap();
        let out = build_topic_lexicon(&[doc], &gaz, &NormalizationTable::default(), &ClueOptions::default()).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.stats.documents, 1);
        assert_eq!(out.stats.occurrences, 0);
        assert!(matches!(
            build_topic_lexicon(&[], &gaz, &NormalizationTable::default(), &ClueOptions::default()),
            Err(PipelineError::EmptyCorpus)
        ));
    }

    #[test]
    fn skip_counters() {
        let docs = [
            Document::new("a", "X sold. Roomba!"),
            Document::new("b", "A long enough sentence mentions X here."),
        ];
        let gaz = Gazetteer::new(["X", "Roomba"]).unwrap();
        let out = build_topic_lexicon(&docs, &gaz, &NormalizationTable::default(), &ClueOptions::default()).unwrap();
        assert_eq!(out.stats.normalization_skipped, 2);
        assert_eq!(out.stats.unusable_clues, 1);
        assert_eq!(out.stats.keywords_without_clues, 1);
        assert!(out.records.is_empty());
    }

    #[test]
    fn corpus_json_lines() {
        let text = r#"{"doc_id": "a", "text": "Roomba sales rose.", "keywords": [{"surface": "Roomba", "start": 0, "end": 6}]}

{"doc_id": "b", "text": "plain"}"#;
        let docs = parse_corpus(text, "c.jsonl").unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].pre_tagged_keywords.as_ref().unwrap()[0].end, 6);
        assert!(docs[1].pre_tagged_keywords.is_none());
        assert!(matches!(parse_corpus("{", "c.jsonl"), Err(PipelineError::Parse { line: 1, .. })));
    }
}
