use thiserror::Error;

use crate::alphabet::AlphabetError;
use crate::broadcast::BroadcastError;
use crate::game::GameError;
use crate::ordering::OrderingError;
use crate::shortcut::ShortcutError;
use crate::strategy::StrategyError;
use crate::trace::TraceError;
use crate::zgame::ParseError;

/// Any error raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Broadcast(#[from] BroadcastError),
    #[error(transparent)]
    Shortcut(#[from] ShortcutError),
    #[error("cannot read {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}
