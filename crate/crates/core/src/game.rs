//! Zielonka automata with a controllable/environment partition, and their
//! plays.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::alphabet::{DependencyAlphabet, Letter, LetterSet, ProcId, ProcSet};
use crate::trace::{Trace, ViewSemantics};

/// Index of a local state within its process.
pub type StateId = u16;

/// `(Q_p(u))_p`, indexed by process.
pub type GlobalState = Vec<StateId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("action `{action}` is not enabled after {play}")]
    NotEnabled { action: String, play: String },
    #[error("`{0}` is not a play")]
    NotAPlay(String),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
}

/// A distributed game: a deterministic Zielonka automaton whose actions are
/// split into controllable and environment actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub(crate) alphabet: Arc<DependencyAlphabet>,
    pub(crate) states: Vec<Vec<String>>,
    pub(crate) initial: GlobalState,
    pub(crate) finals: Vec<Vec<bool>>,
    pub(crate) controllable: LetterSet,
    /// Per letter: pre-states of the domain (ascending process index) to
    /// post-states.
    pub(crate) transitions: Vec<BTreeMap<Vec<StateId>, Vec<StateId>>>,
    pub(crate) ordering: Vec<(ProcId, ProcId)>,
}

/// A play together with its cached global state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Play {
    pub trace: Trace,
    pub state: GlobalState,
}

impl PartialOrd for Play {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Play {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.trace.cmp(&other.trace)
    }
}

impl Game {
    pub fn alphabet(&self) -> &Arc<DependencyAlphabet> {
        &self.alphabet
    }

    pub fn num_processes(&self) -> usize {
        self.alphabet.num_processes()
    }

    pub fn processes(&self) -> impl Iterator<Item = ProcId> + '_ {
        self.alphabet.processes()
    }

    pub fn all_processes(&self) -> ProcSet {
        self.alphabet.all_processes()
    }

    pub fn process(&self, name: &str) -> Result<ProcId, GameError> {
        self.alphabet
            .process(name)
            .ok_or_else(|| GameError::UnknownProcess(name.to_string()))
    }

    pub fn controllable(&self) -> LetterSet {
        self.controllable
    }

    /// `A_e`.
    pub fn environment(&self) -> LetterSet {
        self.alphabet.all_letters().difference(self.controllable)
    }

    pub fn is_controllable(&self, a: Letter) -> bool {
        self.controllable.contains(a)
    }

    pub fn states_of(&self, p: ProcId) -> &[String] {
        &self.states[p.index()]
    }

    pub fn state_name(&self, p: ProcId, s: StateId) -> &str {
        &self.states[p.index()][s as usize]
    }

    pub fn initial_state(&self) -> &GlobalState {
        &self.initial
    }

    pub fn is_final_local(&self, p: ProcId, s: StateId) -> bool {
        self.finals[p.index()][s as usize]
    }

    /// `Q(u) ∈ Π_p F_p`.
    pub fn is_final(&self, state: &GlobalState) -> bool {
        state
            .iter()
            .enumerate()
            .all(|(p, &s)| self.finals[p][s as usize])
    }

    /// Declared `order` pairs `(p, q)` meaning `p ⪯ q`.
    pub fn declared_ordering(&self) -> &[(ProcId, ProcId)] {
        &self.ordering
    }

    /// `M = Π_p |Q_p|`, saturating.
    pub fn global_state_count(&self) -> usize {
        self.states
            .iter()
            .fold(1usize, |acc, s| acc.saturating_mul(s.len()))
    }

    pub fn global_state_count_big(&self) -> BigUint {
        self.states
            .iter()
            .fold(BigUint::from(1u32), |acc, s| acc * BigUint::from(s.len()))
    }

    pub fn transitions_of(&self, a: Letter) -> &BTreeMap<Vec<StateId>, Vec<StateId>> {
        &self.transitions[a.index()]
    }

    /// Post-state after `a` from `state`, if a transition matches.
    pub fn step(&self, state: &GlobalState, a: Letter) -> Option<GlobalState> {
        let dom = self.alphabet.domain(a);
        let pre: Vec<StateId> = dom.iter().map(|p| state[p.index()]).collect();
        let post = self.transitions[a.index()].get(&pre)?;
        let mut next = state.clone();
        for (p, &s) in dom.iter().zip(post) {
            next[p.index()] = s;
        }
        Some(next)
    }

    pub fn is_enabled(&self, state: &GlobalState, a: Letter) -> bool {
        let pre: Vec<StateId> = self
            .alphabet
            .domain(a)
            .iter()
            .map(|p| state[p.index()])
            .collect();
        self.transitions[a.index()].contains_key(&pre)
    }

    /// Global state reached along the normal form, if the trace is a play.
    pub fn run(&self, u: &Trace) -> Option<GlobalState> {
        let mut s = self.initial.clone();
        for &a in u.letters() {
            s = self.step(&s, a)?;
        }
        Some(s)
    }

    pub fn initial_play(&self) -> Play {
        Play {
            trace: Trace::empty(self.alphabet.clone()),
            state: self.initial.clone(),
        }
    }

    /// Validates a trace as a play.
    pub fn play(&self, u: &Trace) -> Result<Play, GameError> {
        let state = self
            .run(u)
            .ok_or_else(|| GameError::NotAPlay(u.to_string()))?;
        Ok(Play {
            trace: u.clone(),
            state,
        })
    }

    pub fn parse_play(&self, text: &str) -> Result<Play, crate::Error> {
        let u = Trace::parse(self.alphabet.clone(), text)?;
        Ok(self.play(&u)?)
    }

    /// `ua`, with `Q(ua)` updated on `dom(a)` only.
    pub fn extend_play(&self, u: &Play, a: Letter) -> Result<Play, GameError> {
        match self.step(&u.state, a) {
            Some(state) => Ok(Play {
                trace: u.trace.push(a),
                state,
            }),
            None => Err(GameError::NotEnabled {
                action: self.alphabet.letter_name(a).to_string(),
                play: u.trace.to_string(),
            }),
        }
    }

    /// All one-letter extensions of `u`, in letter order.
    pub fn successors(&self, u: &Play) -> Vec<(Letter, Play)> {
        self.alphabet
            .letters_by_rank()
            .iter()
            .filter_map(|&a| self.extend_play(u, a).ok().map(|p| (a, p)))
            .collect()
    }

    /// Plays `uv` with `|v| ≤ max_extra`, `u` itself included, in shortlex
    /// order.
    pub fn extensions(&self, u: &Play, max_extra: usize) -> Vec<Play> {
        let mut seen: HashSet<Trace> = HashSet::new();
        seen.insert(u.trace.clone());
        let mut out = vec![u.clone()];
        let mut layer = vec![u.clone()];
        for _ in 0..max_extra {
            let mut next = Vec::new();
            for p in &layer {
                for (_, q) in self.successors(p) {
                    if seen.insert(q.trace.clone()) {
                        next.push(q);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out.sort();
        out
    }

    /// All plays of length at most `max_len`, one per trace, shortlex order.
    pub fn enumerate_plays(&self, max_len: usize) -> Vec<Play> {
        self.extensions(&self.initial_play(), max_len)
    }

    /// `view_p(u)`.
    pub fn process_view(
        &self,
        u: &Trace,
        p: ProcId,
        semantics: ViewSemantics,
    ) -> Result<Trace, GameError> {
        if p.index() >= self.num_processes() {
            return Err(GameError::UnknownProcess(p.0.to_string()));
        }
        Ok(u.process_view(p, semantics))
    }
}
