//! The line-oriented `.zgame` format.
//!
//! ```text
//! alphabetorder <letter>...
//! process <id> states <s>... init <s> final <s>...
//! action <name> dom <pid>... (ctrl|env)
//! trans <action> <pid>:<state>... -> <pid>:<state>...
//! order <pid> <= <pid>
//! ```
//!
//! `#` starts a comment. Processes come before actions, actions before
//! transitions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{is_reserved, DependencyAlphabet, Letter, LetterSet, ProcId};
use crate::game::{Game, StateId};
use crate::ordering::ProcessOrdering;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Semantic { line: usize, msg: String },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn semantic(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Semantic {
        line,
        msg: msg.into(),
    }
}

struct ProcDecl {
    name: String,
    states: Vec<String>,
    init: StateId,
    finals: Vec<bool>,
}

struct ActionDecl {
    name: String,
    dom: Vec<String>,
    ctrl: bool,
}

#[derive(PartialEq, PartialOrd)]
enum Section {
    Processes,
    Actions,
    Transitions,
}

/// Iterates non-empty lines with comments stripped, numbered from 1.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_process(line: usize, toks: &[&str]) -> Result<ProcDecl, ParseError> {
    // process <id> states <s>... init <s> final <s>...
    if toks.len() < 2 || toks.get(2) != Some(&"states") {
        return Err(syntax(line, "expected `process <id> states ...`"));
    }
    let name = toks[1].to_string();
    let init_at = toks
        .iter()
        .position(|&t| t == "init")
        .ok_or_else(|| syntax(line, "missing `init`"))?;
    if toks.get(init_at + 2) != Some(&"final") {
        return Err(syntax(line, "expected `init <s> final <s>...`"));
    }
    let states: Vec<String> = toks[3..init_at].iter().map(|s| s.to_string()).collect();
    if states.is_empty() {
        return Err(syntax(line, "a process needs at least one state"));
    }
    for (i, s) in states.iter().enumerate() {
        if is_reserved(s) {
            return Err(semantic(line, format!("reserved state name `{s}`")));
        }
        if states[..i].contains(s) {
            return Err(semantic(line, format!("duplicate state `{s}`")));
        }
    }
    let lookup = |s: &str| -> Result<StateId, ParseError> {
        states
            .iter()
            .position(|x| x == s)
            .map(|i| i as StateId)
            .ok_or_else(|| semantic(line, format!("unknown state `{s}` of process {name}")))
    };
    let init = lookup(toks[init_at + 1])?;
    let mut finals = vec![false; states.len()];
    for s in &toks[init_at + 3..] {
        finals[lookup(s)? as usize] = true;
    }
    Ok(ProcDecl {
        name,
        states,
        init,
        finals,
    })
}

fn parse_action(line: usize, toks: &[&str]) -> Result<ActionDecl, ParseError> {
    // action <name> dom <pid>... (ctrl|env)
    if toks.len() < 5 || toks[2] != "dom" {
        return Err(syntax(line, "expected `action <name> dom <pid>... ctrl|env`"));
    }
    let ctrl = match *toks.last().unwrap() {
        "ctrl" => true,
        "env" => false,
        other => return Err(syntax(line, format!("expected `ctrl` or `env`, got `{other}`"))),
    };
    Ok(ActionDecl {
        name: toks[1].to_string(),
        dom: toks[3..toks.len() - 1].iter().map(|s| s.to_string()).collect(),
        ctrl,
    })
}

/// Parses `<pid>:<state>` tuples, returning states in ascending process order.
fn parse_tuple(
    line: usize,
    toks: &[&str],
    alpha: &DependencyAlphabet,
    procs: &[ProcDecl],
    a: Letter,
) -> Result<Vec<StateId>, ParseError> {
    let dom = alpha.domain(a);
    let mut by_proc: BTreeMap<ProcId, StateId> = BTreeMap::new();
    for t in toks {
        let (pid, st) = t
            .split_once(':')
            .ok_or_else(|| syntax(line, format!("expected `<pid>:<state>`, got `{t}`")))?;
        let p = alpha
            .process(pid)
            .ok_or_else(|| semantic(line, format!("unknown process `{pid}`")))?;
        if !dom.contains(p) {
            return Err(semantic(
                line,
                format!(
                    "process {pid} is not in the domain of `{}`",
                    alpha.letter_name(a)
                ),
            ));
        }
        let s = procs[p.index()]
            .states
            .iter()
            .position(|x| x == st)
            .ok_or_else(|| semantic(line, format!("unknown state `{st}` of process {pid}")))?;
        if by_proc.insert(p, s as StateId).is_some() {
            return Err(semantic(line, format!("process {pid} listed twice")));
        }
    }
    if by_proc.len() != dom.len() {
        return Err(semantic(
            line,
            format!(
                "tuple must cover exactly the domain of `{}`",
                alpha.letter_name(a)
            ),
        ));
    }
    Ok(by_proc.into_values().collect())
}

/// Parses and validates a `.zgame` description.
pub fn parse_game(text: &str) -> Result<Game, ParseError> {
    let mut procs: Vec<ProcDecl> = Vec::new();
    let mut actions: Vec<ActionDecl> = Vec::new();
    let mut order_line: Option<(usize, Vec<String>)> = None;
    let mut trans_lines: Vec<(usize, Vec<&str>)> = Vec::new();
    let mut order_pairs: Vec<(usize, String, String)> = Vec::new();
    let mut section = Section::Processes;

    for (line, toks) in content_lines(text) {
        match toks[0] {
            "alphabetorder" => {
                if order_line.is_some() {
                    return Err(semantic(line, "duplicate `alphabetorder`"));
                }
                order_line = Some((line, toks[1..].iter().map(|s| s.to_string()).collect()));
            }
            "process" => {
                if section > Section::Processes {
                    return Err(syntax(line, "processes must be declared before actions"));
                }
                let decl = parse_process(line, &toks)?;
                if procs.iter().any(|p| p.name == decl.name) {
                    return Err(semantic(line, format!("duplicate process `{}`", decl.name)));
                }
                if is_reserved(&decl.name) {
                    return Err(semantic(line, format!("reserved process name `{}`", decl.name)));
                }
                procs.push(decl);
            }
            "action" => {
                if section > Section::Actions {
                    return Err(syntax(line, "actions must be declared before transitions"));
                }
                if procs.is_empty() {
                    return Err(syntax(line, "actions must follow process declarations"));
                }
                section = Section::Actions;
                let decl = parse_action(line, &toks)?;
                if actions.iter().any(|a| a.name == decl.name) {
                    return Err(semantic(line, format!("duplicate action `{}`", decl.name)));
                }
                for p in &decl.dom {
                    if !procs.iter().any(|q| &q.name == p) {
                        return Err(semantic(line, format!("unknown process `{p}`")));
                    }
                }
                actions.push(decl);
            }
            "trans" => {
                if actions.is_empty() {
                    return Err(syntax(line, "transitions must follow action declarations"));
                }
                section = Section::Transitions;
                trans_lines.push((line, toks));
            }
            "order" => {
                if toks.len() != 4 || toks[2] != "<=" {
                    return Err(syntax(line, "expected `order <pid> <= <pid>`"));
                }
                order_pairs.push((line, toks[1].to_string(), toks[3].to_string()));
            }
            other => return Err(syntax(line, format!("unknown declaration `{other}`"))),
        }
    }
    if procs.is_empty() {
        return Err(semantic(0, "no process declared"));
    }

    let proc_names: Vec<&str> = procs.iter().map(|p| p.name.as_str()).collect();
    let letter_decls: Vec<(&str, Vec<&str>)> = actions
        .iter()
        .map(|a| (a.name.as_str(), a.dom.iter().map(String::as_str).collect()))
        .collect();
    let order_refs: Option<Vec<&str>> = order_line
        .as_ref()
        .map(|(_, o)| o.iter().map(String::as_str).collect());
    let alphabet = DependencyAlphabet::new(&proc_names, &letter_decls, order_refs.as_deref())
        .map_err(|e| {
            let line = order_line.as_ref().map(|(l, _)| *l).unwrap_or(0);
            semantic(line, e.to_string())
        })?;

    let mut transitions: Vec<BTreeMap<Vec<StateId>, Vec<StateId>>> =
        vec![BTreeMap::new(); alphabet.num_letters()];
    for (line, toks) in trans_lines {
        // trans <action> <pid>:<state>... -> <pid>:<state>...
        if toks.len() < 2 {
            return Err(syntax(line, "expected `trans <action> ... -> ...`"));
        }
        let a = alphabet
            .letter(toks[1])
            .ok_or_else(|| semantic(line, format!("unknown action `{}`", toks[1])))?;
        let arrow = toks
            .iter()
            .position(|&t| t == "->")
            .ok_or_else(|| syntax(line, "missing `->`"))?;
        let pre = parse_tuple(line, &toks[2..arrow], &alphabet, &procs, a)?;
        let post = parse_tuple(line, &toks[arrow + 1..], &alphabet, &procs, a)?;
        match transitions[a.index()].get(&pre) {
            Some(existing) if *existing == post => {
                return Err(semantic(line, format!("duplicate transition for `{}`", toks[1])));
            }
            Some(_) => {
                return Err(semantic(
                    line,
                    format!("nondeterministic transitions for `{}`", toks[1]),
                ));
            }
            None => {
                transitions[a.index()].insert(pre, post);
            }
        }
    }

    let mut ordering = Vec::new();
    for (line, p, q) in order_pairs {
        let lookup = |n: &str| {
            alphabet
                .process(n)
                .ok_or_else(|| semantic(line, format!("unknown process `{n}`")))
        };
        ordering.push((lookup(&p)?, lookup(&q)?));
    }
    if !ordering.is_empty() {
        ProcessOrdering::from_pairs(alphabet.num_processes(), &ordering)
            .map_err(|e| semantic(0, e.to_string()))?;
    }

    let controllable: LetterSet = actions
        .iter()
        .enumerate()
        .filter(|(_, a)| a.ctrl)
        .map(|(i, _)| Letter(i as u8))
        .collect();
    Ok(Game {
        alphabet: Arc::new(alphabet),
        initial: procs.iter().map(|p| p.init).collect(),
        finals: procs.iter().map(|p| p.finals.clone()).collect(),
        states: procs.into_iter().map(|p| p.states).collect(),
        controllable,
        transitions,
        ordering,
    })
}

/// Canonical `.zgame` text; re-parses to an equal [`Game`].
pub fn write_game(g: &Game) -> String {
    let al = g.alphabet();
    let mut out = String::new();
    let by_rank: Vec<Letter> = al.letters_by_rank().to_vec();
    if by_rank.iter().enumerate().any(|(i, l)| l.index() != i) {
        let names: Vec<&str> = by_rank.iter().map(|&l| al.letter_name(l)).collect();
        let _ = writeln!(out, "alphabetorder {}", names.join(" "));
    }
    for p in g.processes() {
        let states = g.states_of(p);
        let finals: Vec<&str> = (0..states.len())
            .filter(|&s| g.is_final_local(p, s as StateId))
            .map(|s| states[s].as_str())
            .collect();
        let mut line = format!(
            "process {} states {} init {} final",
            al.process_name(p),
            states.join(" "),
            g.state_name(p, g.initial_state()[p.index()])
        );
        for f in finals {
            line.push(' ');
            line.push_str(f);
        }
        let _ = writeln!(out, "{line}");
    }
    for a in al.letters() {
        let dom: Vec<&str> = al.domain(a).iter().map(|p| al.process_name(p)).collect();
        let kind = if g.is_controllable(a) { "ctrl" } else { "env" };
        let _ = writeln!(
            out,
            "action {} dom {} {}",
            al.letter_name(a),
            dom.join(" "),
            kind
        );
    }
    for a in al.letters() {
        let dom: Vec<ProcId> = al.domain(a).iter().collect();
        for (pre, post) in g.transitions_of(a) {
            let fmt_tuple = |t: &[StateId]| -> String {
                dom.iter()
                    .zip(t)
                    .map(|(&p, &s)| format!("{}:{}", al.process_name(p), g.state_name(p, s)))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(
                out,
                "trans {} {} -> {}",
                al.letter_name(a),
                fmt_tuple(pre),
                fmt_tuple(post)
            );
        }
    }
    for &(p, q) in g.declared_ordering() {
        let _ = writeln!(out, "order {} <= {}", al.process_name(p), al.process_name(q));
    }
    out
}
