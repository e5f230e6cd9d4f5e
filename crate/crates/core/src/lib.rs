//! Crossword generation with a guaranteed share of topic words.
//!
//! - [`grid`]: fixed black-cell patterns and their slots
//! - [`lexicon`]: topic/filler answer words and the candidate index
//! - [`pipeline`]: keywords and fill-in-the-blank clues from a corpus
//! - [`solver`]: backtracking fill with the topic quota and restarts
//! - [`artifact`]: assembled puzzles, verification, JSON and text output
//! - [`harness`]: success-rate and timing sweeps

mod bitset;

pub mod grid;
pub mod harness;
pub mod lexicon;
pub mod pipeline;
pub mod artifact;
pub mod solver;
