//! Built-in example games.

use crate::game::Game;
use crate::zgame::parse_game;

/// Two processes that synchronise once on `c`.
pub const G1: &str = include_str!("../fixtures/g1.zgame");
/// [`G1`] plus an environment action leading process 1 to a dead state.
pub const G2: &str = include_str!("../fixtures/g2.zgame");
/// One process with a self loop `a` and an exit `t`.
pub const G3: &str = include_str!("../fixtures/g3.zgame");
/// Three processes on a path of shared actions.
pub const G4: &str = include_str!("../fixtures/g4.zgame");

pub fn g1() -> Game {
    parse_game(G1).expect("fixture parses")
}

pub fn g2() -> Game {
    parse_game(G2).expect("fixture parses")
}

pub fn g3() -> Game {
    parse_game(G3).expect("fixture parses")
}

pub fn g4() -> Game {
    parse_game(G4).expect("fixture parses")
}
