use std::collections::{HashMap, HashSet};

use crate::bitset::BitSet;
use crate::grid::{SlotId, SlotSet};
use crate::lexicon::{EntryId, Source, WordIndex};

/// Number of Topic answers required among `total_slots` at target rate `target_rate` percent.
pub fn required_topic(total_slots: usize, target_rate: u8) -> usize {
    (total_slots * target_rate as usize).div_ceil(100)
}

/// True iff filling every unassigned slot with a Topic word could still meet the quota.
pub fn quota_feasible(topic_count: usize, unassigned: usize, total_slots: usize, target_rate: u8) -> bool {
    topic_count + unassigned >= required_topic(total_slots, target_rate)
}

/// Partial assignment of entries to slots plus the cell letters it implies.
#[derive(Debug, Clone)]
pub struct FillState<'a> {
    slots: &'a SlotSet,
    index: &'a WordIndex,
    forbid_duplicates: bool,
    assignment: Vec<Option<EntryId>>,
    cell_letters: Vec<Option<char>>,
    /// How many assigned slots cover each cell (0..=2).
    cell_refs: Vec<u8>,
    topic_count: usize,
    unassigned: usize,
    /// Used bucket positions per answer length.
    used: HashMap<usize, BitSet>,
    pub(crate) nodes_expanded: u64,
}

impl<'a> FillState<'a> {
    pub fn new(slots: &'a SlotSet, index: &'a WordIndex, forbid_duplicates: bool) -> Self {
        let cells = slots.height() * slots.width();
        FillState {
            slots,
            index,
            forbid_duplicates,
            assignment: vec![None; slots.len()],
            cell_letters: vec![None; cells],
            cell_refs: vec![0; cells],
            topic_count: 0,
            unassigned: slots.len(),
            used: HashMap::new(),
            nodes_expanded: 0,
        }
    }

    pub fn slots(&self) -> &'a SlotSet {
        self.slots
    }

    pub fn index(&self) -> &'a WordIndex {
        self.index
    }

    pub fn topic_count(&self) -> usize {
        self.topic_count
    }

    pub fn unassigned_count(&self) -> usize {
        self.unassigned
    }

    pub fn is_complete(&self) -> bool {
        self.unassigned == 0
    }

    pub fn nodes_expanded(&self) -> u64 {
        self.nodes_expanded
    }

    pub fn assigned(&self, slot: SlotId) -> Option<EntryId> {
        self.assignment[slot]
    }

    pub fn assignment(&self) -> &[Option<EntryId>] {
        &self.assignment
    }

    pub fn used_answers(&self) -> HashSet<&'a str> {
        self.assignment.iter().flatten().map(|&id| self.index.answer(id)).collect()
    }

    pub fn cell_letter(&self, (row, col): (usize, usize)) -> Option<char> {
        self.cell_letters[row * self.slots.width() + col]
    }

    /// Letters already fixed in `slot` by crossing assignments, as `(position, letter)`.
    pub fn fixed_letters(&self, slot: SlotId) -> Vec<(usize, char)> {
        self.slots
            .slot(slot)
            .cells
            .iter()
            .enumerate()
            .filter_map(|(i, &rc)| self.cell_letter(rc).map(|c| (i, c)))
            .collect()
    }

    /// Writes the bucket positions that may go into `slot` into `out`; returns
    /// false when no entry has the slot's length.
    pub(crate) fn candidate_set(&self, slot: SlotId, out: &mut BitSet) -> bool {
        let len = self.slots.slot(slot).len();
        let Some(bucket) = self.index.bucket(len) else {
            return false;
        };
        bucket.filter(&self.fixed_letters(slot), out);
        if self.forbid_duplicates {
            if let Some(used) = self.used.get(&len) {
                out.difference_with(used);
            }
        }
        true
    }

    pub fn candidate_count(&self, slot: SlotId) -> usize {
        let mut set = BitSet::default();
        if self.candidate_set(slot, &mut set) {
            set.count()
        } else {
            0
        }
    }

    /// Candidate entries for `slot` in Topic-first, then answer order.
    pub fn candidates(&self, slot: SlotId) -> Vec<EntryId> {
        let mut set = BitSet::default();
        if !self.candidate_set(slot, &mut set) {
            return Vec::new();
        }
        let bucket = self.index.bucket(self.slots.slot(slot).len()).expect("bucket exists");
        set.iter().map(|p| bucket.entry(p)).collect()
    }

    /// Places `entry` in `slot`. Returns false (leaving the state untouched) when
    /// the slot is taken, the length or a crossing letter disagrees, or the
    /// answer is already used and duplicates are forbidden.
    pub fn assign(&mut self, slot: SlotId, entry: EntryId) -> bool {
        if self.assignment[slot].is_some() {
            return false;
        }
        let (len, pos) = self.index.location(entry);
        let cells = &self.slots.slot(slot).cells;
        if len != cells.len() {
            return false;
        }
        if self.forbid_duplicates && self.used.get(&len).is_some_and(|u| u.contains(pos)) {
            return false;
        }
        let bucket = self.index.bucket(len).expect("entry bucket");
        let width = self.slots.width();
        let agrees = cells.iter().enumerate().all(|(i, &(r, c))| {
            self.cell_letters[r * width + c].is_none_or(|l| l == bucket.letter(pos, i))
        });
        if !agrees {
            return false;
        }
        for (i, &(r, c)) in cells.iter().enumerate() {
            let k = r * width + c;
            self.cell_letters[k] = Some(bucket.letter(pos, i));
            self.cell_refs[k] += 1;
        }
        if self.forbid_duplicates {
            self.used
                .entry(len)
                .or_insert_with(|| BitSet::new(bucket.len()))
                .insert(pos);
        }
        if self.index.source(entry) == Source::Topic {
            self.topic_count += 1;
        }
        self.assignment[slot] = Some(entry);
        self.unassigned -= 1;
        true
    }

    pub fn unassign(&mut self, slot: SlotId) -> Option<EntryId> {
        let entry = self.assignment[slot].take()?;
        let width = self.slots.width();
        for &(r, c) in &self.slots.slot(slot).cells {
            let k = r * width + c;
            self.cell_refs[k] -= 1;
            if self.cell_refs[k] == 0 {
                self.cell_letters[k] = None;
            }
        }
        let (len, pos) = self.index.location(entry);
        if let Some(used) = self.used.get_mut(&len) {
            used.remove(pos);
        }
        if self.index.source(entry) == Source::Topic {
            self.topic_count -= 1;
        }
        self.unassigned += 1;
        Some(entry)
    }

    fn unassigned_neighbours(&self, slot: SlotId) -> usize {
        self.slots
            .neighbours(slot)
            .iter()
            .filter(|&&(_, other, _)| self.assignment[other].is_none())
            .count()
    }
}

/// Most-constrained unassigned slot: fewest candidates, then most crossings
/// with unassigned slots, then lowest id. `None` when every slot is assigned.
pub fn choose_next_slot(state: &FillState<'_>) -> Option<SlotId> {
    let mut scratch = BitSet::default();
    let mut best: Option<(usize, std::cmp::Reverse<usize>, SlotId)> = None;
    for slot in 0..state.slots.len() {
        if state.assignment[slot].is_some() {
            continue;
        }
        let count = if state.candidate_set(slot, &mut scratch) {
            scratch.count()
        } else {
            0
        };
        let key = (count, std::cmp::Reverse(state.unassigned_neighbours(slot)), slot);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    best.map(|(_, _, slot)| slot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{extract_slots, parse_pattern, GridPattern, PatternPolicy};
    use crate::lexicon::{build_index, Lexicon, NormalizationTable};

    fn index(words: &[&str]) -> WordIndex {
        build_index(&Lexicon::from_words(
            words.iter().map(|w| (*w, Source::Filler)),
            &NormalizationTable::default(),
        ))
    }

    fn id_of(idx: &WordIndex, answer: &str) -> EntryId {
        (0..idx.len() as EntryId).find(|&i| idx.answer(i) == answer).unwrap()
    }

    #[test]
    fn quota_arithmetic() {
        assert!(quota_feasible(2, 3, 10, 50));
        assert!(!quota_feasible(1, 3, 10, 50));
        assert!(quota_feasible(0, 0, 10, 0));
        assert_eq!(required_topic(7, 50), 4);
        assert_eq!(required_topic(10, 100), 10);
        assert_eq!(required_topic(3, 1), 1);
    }

    #[test]
    fn prefers_fewest_candidates() {
        // Slot 0 (length 2) has 1 candidate, slot 1 (length 3) has 7.
        let pattern = parse_pattern("..#\n###\n...").unwrap();
        let slots = extract_slots(&pattern, &PatternPolicy::default());
        let idx = index(&["AB", "AAA", "AAB", "ABA", "ABB", "BAA", "BAB", "BBA"]);
        let state = FillState::new(&slots, &idx, true);
        assert_eq!(state.candidate_count(0), 1);
        assert_eq!(state.candidate_count(1), 7);
        assert_eq!(choose_next_slot(&state), Some(0));
    }

    #[test]
    fn uniform_counts_fall_back_to_lowest_id() {
        let slots = extract_slots(&GridPattern::open(2, 2).unwrap(), &PatternPolicy::default());
        let idx = index(&["AB", "CD", "AC", "BD"]);
        let state = FillState::new(&slots, &idx, true);
        assert_eq!(choose_next_slot(&state), Some(0));
    }

    #[test]
    fn dead_slot_is_chosen_first() {
        let slots = extract_slots(&GridPattern::open(2, 2).unwrap(), &PatternPolicy::default());
        let idx = index(&["AB", "CD", "AC", "BD", "XY"]);
        let mut state = FillState::new(&slots, &idx, true);
        assert!(state.assign(0, id_of(&idx, "XY")));
        // Down slot 2 now starts with X, which no other word has.
        assert_eq!(state.fixed_letters(2), vec![(0, 'X')]);
        assert_eq!(state.candidate_count(2), 0);
        assert_eq!(state.candidate_count(3), 0);
        assert_eq!(state.candidate_count(1), 4);
        assert_eq!(choose_next_slot(&state), Some(2));
    }

    #[test]
    fn assign_and_undo_restore_state() {
        let slots = extract_slots(&GridPattern::open(2, 2).unwrap(), &PatternPolicy::default());
        let idx = index(&["AB", "CD", "AC", "BD"]);
        let mut state = FillState::new(&slots, &idx, true);
        let ab = id_of(&idx, "AB");
        let ac = id_of(&idx, "AC");
        let cd = id_of(&idx, "CD");
        assert!(state.assign(0, ab));
        assert!(!state.assign(1, ab), "duplicate");
        assert!(!state.assign(2, cd), "letter clash at (0,0)");
        assert!(state.assign(2, ac));
        assert_eq!(state.cell_letter((1, 0)), Some('C'));
        state.unassign(0);
        // (0,0) still held by the down slot.
        assert_eq!(state.cell_letter((0, 0)), Some('A'));
        assert_eq!(state.cell_letter((0, 1)), None);
        assert_eq!(state.unassigned_count(), 3);
        assert!(state.assign(0, ab));
        assert_eq!(state.used_answers().len(), 2);
        assert_eq!(choose_next_slot(&state), Some(1));
        assert_eq!(state.candidates(1), vec![cd]);
    }

    #[test]
    fn duplicates_allowed_when_configured() {
        let slots = extract_slots(&parse_pattern("..\n##\n..").unwrap(), &PatternPolicy::default());
        let idx = index(&["AB"]);
        let mut state = FillState::new(&slots, &idx, false);
        assert!(state.assign(0, 0));
        assert!(state.assign(1, 0));
        assert!(state.is_complete());
    }
}
