//! Distributed controller synthesis over Zielonka automata with causal
//! memory.

pub mod alphabet;
pub mod bounds;
pub mod broadcast;
pub mod classify;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod ordering;
pub mod shortcut;
pub mod strategy;
pub mod synth;
pub mod trace;
pub mod zgame;
pub mod zstrat;

pub use alphabet::{DependencyAlphabet, Letter, LetterSet, ProcId, ProcSet};
pub use error::Error;
pub use game::{Game, GlobalState, Play};
pub use ordering::ProcessOrdering;
pub use trace::{Trace, ViewSemantics};
pub use strategy::{Duration, Exploration, Strategy, Verdict};
