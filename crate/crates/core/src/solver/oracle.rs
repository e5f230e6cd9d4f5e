//! Exhaustive reference solver for small instances.
//!
//! Works on answer strings straight from the [`Lexicon`], without the word
//! index, heuristics or quota pruning, so it can check the real solver.

use std::collections::HashSet;

use thiserror::Error;

use crate::grid::SlotSet;
use crate::lexicon::{Lexicon, Source};

/// Enumeration steps (partial assignments visited) before giving up.
pub const DEFAULT_STEP_CAP: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large: more than {0} enumeration steps")]
    InstanceTooLarge(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForce {
    /// Answers in slot order.
    Satisfiable(Vec<String>),
    Unsatisfiable,
}

impl BruteForce {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, BruteForce::Satisfiable(_))
    }
}

struct Enumerator<'a> {
    slots: &'a SlotSet,
    /// Per slot: candidate answers (as chars) with a topic flag.
    lists: Vec<Vec<(Vec<char>, bool)>>,
    grid: Vec<Option<char>>,
    chosen: Vec<usize>,
    used: HashSet<Vec<char>>,
    forbid_duplicates: bool,
    steps: u64,
    cap: u64,
}

impl<'a> Enumerator<'a> {
    fn new(slots: &'a SlotSet, lexicon: &Lexicon, forbid_duplicates: bool, cap: u64) -> Self {
        let lists = slots
            .slots()
            .iter()
            .map(|s| {
                lexicon
                    .entries()
                    .iter()
                    .map(|e| (e.answer.chars().collect::<Vec<_>>(), e.source == Source::Topic))
                    .filter(|(chars, _)| chars.len() == s.len())
                    .collect()
            })
            .collect();
        Enumerator {
            slots,
            lists,
            grid: vec![None; slots.height() * slots.width()],
            chosen: Vec::new(),
            used: HashSet::new(),
            forbid_duplicates,
            steps: 0,
            cap,
        }
    }

    fn fits(&self, depth: usize, word: &[char]) -> bool {
        let w = self.slots.width();
        self.slots.slot(depth).cells.iter().zip(word).all(|(&(r, c), &ch)| {
            self.grid[r * w + c].is_none_or(|g| g == ch)
        }) && !(self.forbid_duplicates && self.used.contains(word))
    }

    /// Visits every complete consistent fill in canonical order; `visit` gets the
    /// chosen list indices and returns true to stop.
    fn walk(&mut self, depth: usize, visit: &mut dyn FnMut(&Self) -> bool) -> Result<bool, OracleError> {
        self.steps += 1;
        if self.steps > self.cap {
            return Err(OracleError::InstanceTooLarge(self.cap));
        }
        if depth == self.slots.len() {
            return Ok(visit(self));
        }
        let w = self.slots.width();
        for k in 0..self.lists[depth].len() {
            let word = self.lists[depth][k].0.clone();
            if !self.fits(depth, &word) {
                continue;
            }
            let saved: Vec<Option<char>> = self
                .slots
                .slot(depth)
                .cells
                .iter()
                .map(|&(r, c)| self.grid[r * w + c])
                .collect();
            for (&(r, c), &ch) in self.slots.slot(depth).cells.iter().zip(&word) {
                self.grid[r * w + c] = Some(ch);
            }
            self.used.insert(word.clone());
            self.chosen.push(k);
            let stop = self.walk(depth + 1, visit)?;
            self.chosen.pop();
            self.used.remove(&word);
            for (&(r, c), old) in self.slots.slot(depth).cells.iter().zip(saved) {
                self.grid[r * w + c] = old;
            }
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn topic_count(&self) -> usize {
        self.chosen
            .iter()
            .enumerate()
            .filter(|&(slot, &k)| self.lists[slot][k].1)
            .count()
    }

    fn answers(&self) -> Vec<String> {
        self.chosen
            .iter()
            .enumerate()
            .map(|(slot, &k)| self.lists[slot][k].0.iter().collect())
            .collect()
    }
}

/// First complete, consistent fill (in canonical enumeration order) whose
/// Topic share is at least `target_rate` percent.
pub fn brute_force_solve(
    slots: &SlotSet,
    lexicon: &Lexicon,
    target_rate: u8,
    forbid_duplicates: bool,
) -> Result<BruteForce, OracleError> {
    brute_force_solve_capped(slots, lexicon, target_rate, forbid_duplicates, DEFAULT_STEP_CAP)
}

pub fn brute_force_solve_capped(
    slots: &SlotSet,
    lexicon: &Lexicon,
    target_rate: u8,
    forbid_duplicates: bool,
    cap: u64,
) -> Result<BruteForce, OracleError> {
    let total = slots.len();
    let mut found = None;
    let mut e = Enumerator::new(slots, lexicon, forbid_duplicates, cap);
    e.walk(0, &mut |en: &Enumerator| {
        // topic / total >= T / 100, in integers.
        if en.topic_count() * 100 >= target_rate as usize * total {
            found = Some(en.answers());
            true
        } else {
            false
        }
    })?;
    Ok(found.map_or(BruteForce::Unsatisfiable, BruteForce::Satisfiable))
}

/// Largest Topic count over all complete fills, or `None` when no fill exists.
pub fn brute_force_max_topic(
    slots: &SlotSet,
    lexicon: &Lexicon,
    forbid_duplicates: bool,
) -> Result<Option<usize>, OracleError> {
    let mut best = None;
    let mut e = Enumerator::new(slots, lexicon, forbid_duplicates, DEFAULT_STEP_CAP);
    e.walk(0, &mut |en: &Enumerator| {
        let t = en.topic_count();
        best = Some(best.map_or(t, |b: usize| b.max(t)));
        false
    })?;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{extract_slots, GridPattern, PatternPolicy};
    use crate::lexicon::NormalizationTable;

    fn lexicon(words: &[(&str, Source)]) -> Lexicon {
        Lexicon::from_words(words.iter().copied(), &NormalizationTable::default())
    }

    #[test]
    fn two_by_two_square() {
        let slots = extract_slots(&GridPattern::open(2, 2).unwrap(), &PatternPolicy::default());
        let lex = lexicon(&[
            ("AB", Source::Filler),
            ("CD", Source::Filler),
            ("AC", Source::Filler),
            ("BD", Source::Filler),
        ]);
        assert_eq!(
            brute_force_solve(&slots, &lex, 0, true).unwrap(),
            BruteForce::Satisfiable(vec!["AB".into(), "CD".into(), "AC".into(), "BD".into()])
        );
        assert_eq!(brute_force_solve(&slots, &lex, 50, true).unwrap(), BruteForce::Unsatisfiable);
        assert_eq!(brute_force_max_topic(&slots, &lex, true).unwrap(), Some(0));
        assert!(matches!(
            brute_force_solve_capped(&slots, &lex, 50, true, 3),
            Err(OracleError::InstanceTooLarge(3))
        ));
    }

    #[test]
    fn empty_lexicon_is_unsatisfiable() {
        let slots = extract_slots(&GridPattern::open(1, 3).unwrap(), &PatternPolicy::default());
        assert_eq!(
            brute_force_solve(&slots, &Lexicon::default(), 0, true).unwrap(),
            BruteForce::Unsatisfiable
        );
        assert_eq!(brute_force_max_topic(&slots, &Lexicon::default(), true).unwrap(), None);
    }

    #[test]
    fn duplicates_rule() {
        // 2x2 with only "AA": every slot needs "AA".
        let slots = extract_slots(&GridPattern::open(2, 2).unwrap(), &PatternPolicy::default());
        let lex = lexicon(&[("AA", Source::Topic)]);
        assert!(!brute_force_solve(&slots, &lex, 0, true).unwrap().is_satisfiable());
        assert!(brute_force_solve(&slots, &lex, 100, false).unwrap().is_satisfiable());
    }
}
