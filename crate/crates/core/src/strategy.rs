//! Distributed strategies and the plays consistent with them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::alphabet::{Letter, LetterSet, ProcId};
use crate::game::{Game, Play};
use crate::trace::{Trace, ViewSemantics};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("action `{action}` is an environment action and cannot be allowed explicitly")]
    EnvironmentAction { action: String },
    #[error("action `{action}` is not an action of process {process}")]
    NotLocal { action: String, process: String },
    #[error("view `{view}` is not a play of the game")]
    ViewNotAPlay { view: String },
    #[error("`{view}` is not a {semantics} view of process {process}")]
    NotAView {
        view: String,
        process: String,
        semantics: ViewSemantics,
    },
    #[error("line {line}: {msg}")]
    Semantic { line: usize, msg: String },
}

/// Outcome of exploring the plays consistent with a strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Winning,
    /// The lexicographically least maximal play that does not end in a
    /// final global state.
    Losing(Play),
    /// The least play at the cap that can still be extended.
    BoundExceeded(Play),
}

impl Verdict {
    pub fn is_winning(&self) -> bool {
        matches!(self, Verdict::Winning)
    }
}

/// `Σ |u|` over maximal plays, when the play set is known to be finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Duration {
    Finite(u64),
    Unbounded,
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Duration::Finite(n) => write!(f, "{n}"),
            Duration::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Exploration {
    /// Every consistent play of length at most the cap, shortlex order.
    pub plays: Vec<Play>,
    /// Consistent plays without a consistent one-action extension.
    pub maximal: Vec<Play>,
    pub verdict: Verdict,
}

impl Exploration {
    pub fn duration(&self) -> Duration {
        match self.verdict {
            Verdict::BoundExceeded(_) => Duration::Unbounded,
            _ => Duration::Finite(self.maximal.iter().map(|p| p.trace.len() as u64).sum()),
        }
    }
}

/// A distributed strategy with finite support: explicit decisions per
/// `(process, view)` plus a per-process default for all other views.
///
/// Decisions only hold controllable actions; environment actions are
/// always allowed. Entries equal to their process default are dropped, so
/// structural equality is equality of the decision functions.
#[derive(Debug, Clone)]
pub struct Strategy {
    game: Arc<Game>,
    semantics: ViewSemantics,
    defaults: Vec<LetterSet>,
    decisions: BTreeMap<(ProcId, Trace), LetterSet>,
}

impl PartialEq for Strategy {
    fn eq(&self, other: &Self) -> bool {
        self.semantics == other.semantics
            && self.defaults == other.defaults
            && self.decisions == other.decisions
            && (Arc::ptr_eq(&self.game, &other.game) || *self.game == *other.game)
    }
}

impl Eq for Strategy {}

impl Strategy {
    /// The strategy allowing no controllable action anywhere.
    pub fn new(game: Arc<Game>, semantics: ViewSemantics) -> Self {
        let n = game.num_processes();
        Strategy {
            game,
            semantics,
            defaults: vec![LetterSet::EMPTY; n],
            decisions: BTreeMap::new(),
        }
    }

    pub fn game(&self) -> &Arc<Game> {
        &self.game
    }

    pub fn semantics(&self) -> ViewSemantics {
        self.semantics
    }

    pub fn default_for(&self, p: ProcId) -> LetterSet {
        self.defaults[p.index()]
    }

    pub fn defaults(&self) -> &[LetterSet] {
        &self.defaults
    }

    /// Explicit entries, ordered by process then view (shortlex).
    pub fn decisions(&self) -> &BTreeMap<(ProcId, Trace), LetterSet> {
        &self.decisions
    }

    fn check_process(&self, p: ProcId) -> Result<(), StrategyError> {
        if p.index() >= self.game.num_processes() {
            return Err(StrategyError::UnknownProcess(p.0.to_string()));
        }
        Ok(())
    }

    fn check_allowed(&self, p: ProcId, allow: LetterSet) -> Result<(), StrategyError> {
        self.check_process(p)?;
        let al = self.game.alphabet();
        for a in allow.iter() {
            if !self.game.is_controllable(a) {
                return Err(StrategyError::EnvironmentAction {
                    action: al.letter_name(a).to_string(),
                });
            }
            if !al.domain(a).contains(p) {
                return Err(StrategyError::NotLocal {
                    action: al.letter_name(a).to_string(),
                    process: al.process_name(p).to_string(),
                });
            }
        }
        Ok(())
    }

    /// Sets the default of `p`; explicit entries that now coincide with it
    /// are dropped.
    pub fn set_default(&mut self, p: ProcId, allow: LetterSet) -> Result<(), StrategyError> {
        self.check_allowed(p, allow)?;
        self.defaults[p.index()] = allow;
        self.decisions.retain(|(q, _), s| *q != p || *s != allow);
        Ok(())
    }

    /// Records `σ_p(view) = A_e ∪ allow`. `view` must be a play that is
    /// its own `p`-view.
    pub fn set_decision(
        &mut self,
        p: ProcId,
        view: Trace,
        allow: LetterSet,
    ) -> Result<(), StrategyError> {
        self.check_allowed(p, allow)?;
        self.check_key(p, &view)?;
        self.insert_unchecked(p, view, allow);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, p: ProcId, view: Trace, allow: LetterSet) {
        if allow == self.defaults[p.index()] {
            self.decisions.remove(&(p, view));
        } else {
            self.decisions.insert((p, view), allow);
        }
    }

    fn check_key(&self, p: ProcId, view: &Trace) -> Result<(), StrategyError> {
        if self.game.run(view).is_none() {
            return Err(StrategyError::ViewNotAPlay {
                view: view.to_string(),
            });
        }
        if view.process_view(p, self.semantics) != *view {
            let al = self.game.alphabet();
            return Err(StrategyError::NotAView {
                view: view.to_string(),
                process: al.process_name(p).to_string(),
                semantics: self.semantics,
            });
        }
        Ok(())
    }

    /// The controllable actions allowed by `p` at a `p`-view.
    pub fn controlled_at_view(&self, p: ProcId, view: &Trace) -> LetterSet {
        // Clone-free lookup would need a borrowed key type; views are short.
        self.decisions
            .get(&(p, view.clone()))
            .copied()
            .unwrap_or(self.defaults[p.index()])
    }

    /// `σ_p(u) = A_e ∪ decisions[(p, view_p(u))]`, or the default.
    pub fn decision(&self, p: ProcId, u: &Trace) -> Result<LetterSet, StrategyError> {
        self.check_process(p)?;
        Ok(self.decision_unchecked(p, u))
    }

    pub(crate) fn decision_unchecked(&self, p: ProcId, u: &Trace) -> LetterSet {
        let view = u.process_view(p, self.semantics);
        self.game
            .environment()
            .union(self.controlled_at_view(p, &view))
    }

    /// `a` is allowed at `u` by every process of `dom(a)`.
    pub fn allows(&self, u: &Trace, a: Letter) -> bool {
        if !self.game.is_controllable(a) {
            return true;
        }
        self.game
            .alphabet()
            .domain(a)
            .iter()
            .all(|p| self.decision_unchecked(p, u).contains(a))
    }

    /// One-action consistent extensions of a consistent play.
    pub fn successors(&self, u: &Play) -> Vec<(Letter, Play)> {
        self.game
            .successors(u)
            .into_iter()
            .filter(|(a, _)| self.allows(&u.trace, *a))
            .collect()
    }

    /// Some linearization of `u` is consistent with the strategy.
    pub fn is_sigma_play(&self, u: &Trace) -> bool {
        if self.game.run(u).is_none() {
            return false;
        }
        let mut memo = HashMap::new();
        self.sigma_rec(u, &mut memo)
    }

    fn sigma_rec(&self, u: &Trace, memo: &mut HashMap<Trace, bool>) -> bool {
        if u.is_empty() {
            return true;
        }
        if let Some(&r) = memo.get(u) {
            return r;
        }
        let r = u.maximal_positions().into_iter().any(|i| {
            let a = u.letters()[i];
            let pre = u.without_event(i);
            self.allows(&pre, a) && self.sigma_rec(&pre, memo)
        });
        memo.insert(u.clone(), r);
        r
    }

    /// Consistent plays up to length `cap` and the verdict.
    pub fn explore(&self, cap: usize) -> Exploration {
        let mut plays = vec![self.game.initial_play()];
        let mut maximal = Vec::new();
        let mut exceeded: Vec<Play> = Vec::new();
        let mut layer = plays.clone();
        let mut depth = 0;
        while !layer.is_empty() {
            let succs: Vec<Vec<Play>> = layer
                .par_iter()
                .map(|u| self.successors(u).into_iter().map(|(_, p)| p).collect())
                .collect();
            let mut next: Vec<Play> = Vec::new();
            let mut seen: HashSet<Trace> = HashSet::new();
            for (u, s) in layer.iter().zip(succs) {
                if s.is_empty() {
                    maximal.push(u.clone());
                } else if depth == cap {
                    exceeded.push(u.clone());
                } else {
                    for p in s {
                        if seen.insert(p.trace.clone()) {
                            next.push(p);
                        }
                    }
                }
            }
            if depth == cap {
                break;
            }
            next.sort();
            plays.extend(next.iter().cloned());
            layer = next;
            depth += 1;
        }
        maximal.sort();
        let verdict = if let Some(w) = exceeded.into_iter().min() {
            Verdict::BoundExceeded(w)
        } else if let Some(w) = maximal
            .iter()
            .filter(|p| !self.game.is_final(&p.state))
            .min_by(|x, y| x.trace.lex_cmp(&y.trace))
        {
            Verdict::Losing(w.clone())
        } else {
            Verdict::Winning
        };
        Exploration {
            plays,
            maximal,
            verdict,
        }
    }

    pub fn duration(&self, cap: usize) -> Duration {
        self.explore(cap).duration()
    }
}
