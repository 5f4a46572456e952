//! The line-oriented `.zstrat` format.
//!
//! ```text
//! format 1                          # optional
//! semantics literal|causal
//! default <pid> allow <actions|->
//! decide <pid> <view letters|-> allow <actions|->
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::alphabet::{LetterSet, ProcId};
use crate::game::Game;
use crate::strategy::{Strategy, StrategyError};
use crate::trace::{Trace, ViewSemantics};
use crate::zgame::content_lines;

fn syntax(line: usize, msg: impl Into<String>) -> StrategyError {
    StrategyError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn semantic(line: usize, e: impl ToString) -> StrategyError {
    StrategyError::Semantic {
        line,
        msg: e.to_string(),
    }
}

fn parse_allow(game: &Game, line: usize, toks: &[&str]) -> Result<LetterSet, StrategyError> {
    game.alphabet()
        .parse_letter_set(&toks.join(","))
        .map_err(|e| semantic(line, e))
}

fn parse_pid(game: &Game, line: usize, tok: &str) -> Result<ProcId, StrategyError> {
    game.alphabet()
        .process(tok)
        .ok_or_else(|| semantic(line, StrategyError::UnknownProcess(tok.to_string())))
}

/// Parses a strategy for `game`, validating every entry.
pub fn parse_strategy(game: Arc<Game>, text: &str) -> Result<Strategy, StrategyError> {
    let mut semantics: Option<ViewSemantics> = None;
    let mut strategy: Option<Strategy> = None;
    let mut seen_defaults: HashSet<ProcId> = HashSet::new();
    let mut seen_keys: HashSet<(ProcId, Trace)> = HashSet::new();
    let mut pending: Vec<(usize, ProcId, Trace, LetterSet)> = Vec::new();
    let mut first = true;

    for (line, toks) in content_lines(text) {
        let was_first = std::mem::replace(&mut first, false);
        match toks[0] {
            "format" => {
                if !was_first || toks.len() != 2 {
                    return Err(syntax(line, "`format` must be the first line"));
                }
                if toks[1] != "1" {
                    return Err(syntax(line, format!("unsupported format `{}`", toks[1])));
                }
                first = true;
            }
            "semantics" => {
                if semantics.is_some() {
                    return Err(syntax(line, "duplicate `semantics`"));
                }
                if toks.len() != 2 {
                    return Err(syntax(line, "expected `semantics literal|causal`"));
                }
                let sem: ViewSemantics = toks[1]
                    .parse()
                    .map_err(|_| syntax(line, format!("unknown semantics `{}`", toks[1])))?;
                semantics = Some(sem);
                strategy = Some(Strategy::new(game.clone(), sem));
            }
            "default" => {
                let s = strategy
                    .as_mut()
                    .ok_or_else(|| syntax(line, "`semantics` must come first"))?;
                if toks.len() < 4 || toks[2] != "allow" {
                    return Err(syntax(line, "expected `default <pid> allow <actions>`"));
                }
                let p = parse_pid(&game, line, toks[1])?;
                if !seen_defaults.insert(p) {
                    return Err(semantic(line, format!("duplicate default for {}", toks[1])));
                }
                let allow = parse_allow(&game, line, &toks[3..])?;
                s.set_default(p, allow).map_err(|e| semantic(line, e))?;
            }
            "decide" => {
                if strategy.is_none() {
                    return Err(syntax(line, "`semantics` must come first"));
                }
                let at = toks
                    .iter()
                    .position(|&t| t == "allow")
                    .ok_or_else(|| syntax(line, "missing `allow`"))?;
                if at < 3 || at + 1 >= toks.len() {
                    return Err(syntax(line, "expected `decide <pid> <view> allow <actions>`"));
                }
                let p = parse_pid(&game, line, toks[1])?;
                let view = Trace::parse(game.alphabet().clone(), &toks[2..at].join(" "))
                    .map_err(|e| semantic(line, e))?;
                let allow = parse_allow(&game, line, &toks[at + 1..])?;
                if !seen_keys.insert((p, view.clone())) {
                    return Err(semantic(line, format!("duplicate decision for {} at {view}", toks[1])));
                }
                pending.push((line, p, view, allow));
            }
            other => return Err(syntax(line, format!("unknown declaration `{other}`"))),
        }
    }
    let mut s = strategy.ok_or_else(|| syntax(0, "missing `semantics` header"))?;
    // Decisions go in after every default so canonicalization sees the
    // final defaults.
    for (line, p, view, allow) in pending {
        s.set_decision(p, view, allow).map_err(|e| semantic(line, e))?;
    }
    Ok(s)
}

/// Canonical `.zstrat` text, starting with the `format 1` header.
pub fn write_strategy(s: &Strategy) -> String {
    let al = s.game().alphabet();
    let mut out = String::from("format 1\n");
    let _ = writeln!(out, "semantics {}", s.semantics());
    for p in s.game().processes() {
        let _ = writeln!(
            out,
            "default {} allow {}",
            al.process_name(p),
            al.fmt_letter_set(s.default_for(p))
        );
    }
    for ((p, view), allow) in s.decisions() {
        let _ = writeln!(
            out,
            "decide {} {} allow {}",
            al.process_name(*p),
            view,
            al.fmt_letter_set(*allow)
        );
    }
    out
}
