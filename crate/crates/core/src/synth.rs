//! Bounded synthesis: backtracking over view-indexed decisions.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::alphabet::{LetterSet, ProcId};
use crate::game::{Game, GlobalState, Play};
use crate::strategy::{Strategy, Verdict};
use crate::trace::{Trace, ViewSemantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisConfig {
    /// Every consistent play of the result has length at most `cap`.
    pub cap: usize,
    pub semantics: ViewSemantics,
}

impl SynthesisConfig {
    pub fn new(cap: usize) -> Self {
        SynthesisConfig {
            cap,
            semantics: ViewSemantics::Literal,
        }
    }
}

/// Subsets of `s` ordered by size, then lexicographically by letter rank.
pub fn ordered_subsets(game: &Game, s: LetterSet) -> Vec<LetterSet> {
    let al = game.alphabet();
    let members: Vec<_> = al.letters_by_rank().iter().copied().filter(|&l| s.contains(l)).collect();
    let mut subsets: Vec<(usize, Vec<u8>, LetterSet)> = (0u64..(1 << members.len()))
        .map(|mask| {
            let chosen: Vec<_> = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &l)| l)
                .collect();
            let ranks = chosen.iter().map(|&l| al.rank(l)).collect();
            (chosen.len(), ranks, chosen.into_iter().collect())
        })
        .collect();
    subsets.sort();
    subsets.into_iter().map(|(_, _, s)| s).collect()
}

enum Scan {
    Fail,
    Need(ProcId, Trace),
    Done,
}

struct Search<'g> {
    game: &'g Game,
    semantics: ViewSemantics,
    horizon: usize,
    local: Vec<LetterSet>,
    choices: Vec<Vec<LetterSet>>,
    assign: HashMap<(ProcId, Trace), LetterSet>,
    to_final: HashMap<GlobalState, usize>,
    doomed: RefCell<HashMap<(GlobalState, usize), bool>>,
}

/// Shortest distance to a final state for every reachable global state
/// that can reach one.
fn distances_to_final(game: &Game) -> HashMap<GlobalState, usize> {
    let init = game.initial_play().state;
    let mut states = vec![init.clone()];
    let mut index: HashMap<GlobalState, usize> = HashMap::from([(init, 0)]);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new()];
    let mut i = 0;
    while i < states.len() {
        for a in game.alphabet().letters() {
            if let Some(t) = game.step(&states[i], a) {
                let j = *index.entry(t.clone()).or_insert_with(|| {
                    states.push(t);
                    preds.push(Vec::new());
                    states.len() - 1
                });
                preds[j].push(i);
            }
        }
        i += 1;
    }
    let mut dist = vec![usize::MAX; states.len()];
    let mut queue = std::collections::VecDeque::new();
    for (k, s) in states.iter().enumerate() {
        if game.is_final(s) {
            dist[k] = 0;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        for &j in &preds[k] {
            if dist[j] == usize::MAX {
                dist[j] = dist[k] + 1;
                queue.push_back(j);
            }
        }
    }
    states
        .into_iter()
        .zip(dist)
        .filter(|&(_, d)| d != usize::MAX)
        .collect()
}

impl<'g> Search<'g> {
    fn new(game: &'g Game, semantics: ViewSemantics, horizon: usize) -> Self {
        let local: Vec<LetterSet> = game
            .processes()
            .map(|p| game.alphabet().process_letters(p).intersection(game.controllable()))
            .collect();
        let choices = local.iter().map(|&s| ordered_subsets(game, s)).collect();
        Search {
            game,
            semantics,
            horizon,
            local,
            choices,
            assign: HashMap::new(),
            to_final: distances_to_final(game),
            doomed: RefCell::new(HashMap::new()),
        }
    }

    fn enabled(&self, u: &Play) -> LetterSet {
        self.game
            .alphabet()
            .letters()
            .filter(|&a| self.game.is_enabled(&u.state, a))
            .collect()
    }

    /// Whether environment moves alone lose from `state` with `left`
    /// moves to go: they overrun the horizon or reach a non-final
    /// deadlock. Such plays lose under every strategy.
    fn env_wins(&self, state: &GlobalState, left: usize) -> bool {
        if let Some(&b) = self.doomed.borrow().get(&(state.clone(), left)) {
            return b;
        }
        let g = self.game;
        let enabled: Vec<_> = g.alphabet().letters().filter(|&a| g.is_enabled(state, a)).collect();
        let env: Vec<_> = enabled.iter().copied().filter(|&a| !g.is_controllable(a)).collect();
        let r = if enabled.is_empty() {
            !g.is_final(state)
        } else if env.is_empty() {
            false
        } else if left == 0 {
            true
        } else {
            env.iter()
                .any(|&a| self.env_wins(&g.step(state, a).expect("enabled"), left - 1))
        };
        self.doomed.borrow_mut().insert((state.clone(), left), r);
        r
    }

    /// Walks the consistent plays in shortlex order until a play fails or
    /// needs an unassigned decision.
    fn scan(&self) -> Scan {
        let g = self.game;
        let mut layer = vec![g.initial_play()];
        let mut depth = 0;
        loop {
            let mut next: Vec<Play> = Vec::new();
            let mut seen: HashSet<Trace> = HashSet::new();
            for u in &layer {
                // No consistent continuation can be winning.
                match self.to_final.get(&u.state) {
                    Some(&d) if depth + d <= self.horizon => {}
                    _ => return Scan::Fail,
                }
                if self.env_wins(&u.state, self.horizon - depth) {
                    return Scan::Fail;
                }
                let enabled = self.enabled(u);
                let mut dec = vec![LetterSet::EMPTY; g.num_processes()];
                for p in g.processes() {
                    if self.local[p.index()].intersects(enabled) {
                        let key = (p, u.trace.process_view(p, self.semantics));
                        match self.assign.get(&key) {
                            Some(&s) => dec[p.index()] = s,
                            None => return Scan::Need(key.0, key.1),
                        }
                    }
                }
                let moves: Vec<_> = enabled
                    .iter()
                    .filter(|&a| {
                        !g.is_controllable(a)
                            || g.alphabet().domain(a).iter().all(|p| dec[p.index()].contains(a))
                    })
                    .collect();
                if moves.is_empty() {
                    if !g.is_final(&u.state) {
                        return Scan::Fail;
                    }
                } else if depth == self.horizon {
                    return Scan::Fail;
                } else {
                    for a in moves {
                        let w = g.extend_play(u, a).expect("enabled");
                        if seen.insert(w.trace.clone()) {
                            next.push(w);
                        }
                    }
                }
            }
            if next.is_empty() {
                return Scan::Done;
            }
            next.sort();
            layer = next;
            depth += 1;
        }
    }

    fn dfs(&mut self) -> bool {
        match self.scan() {
            Scan::Fail => false,
            Scan::Done => true,
            Scan::Need(p, view) => {
                for i in 0..self.choices[p.index()].len() {
                    let s = self.choices[p.index()][i];
                    self.assign.insert((p, view.clone()), s);
                    if self.dfs() {
                        return true;
                    }
                }
                self.assign.remove(&(p, view));
                false
            }
        }
    }

    fn into_strategy(self, game: Arc<Game>) -> Strategy {
        let mut s = Strategy::new(game, self.semantics);
        let mut entries: Vec<_> = self.assign.into_iter().collect();
        entries.sort();
        for ((p, view), allow) in entries {
            s.insert_unchecked(p, view, allow);
        }
        s
    }
}

/// The first winning strategy in enumeration order whose consistent plays
/// all have length at most `cfg.cap`, or `None` if there is none.
///
/// Horizons are tried in increasing order, so shorter strategies win.
/// Within a horizon, decisions are chosen at the first consistent play (in
/// shortlex order) that needs one, processes in index order, allowed sets
/// by size then letter order. Defaults are empty.
pub fn synthesize(game: Arc<Game>, cfg: SynthesisConfig) -> Option<Strategy> {
    for horizon in 0..=cfg.cap {
        let mut search = Search::new(&game, cfg.semantics, horizon);
        if search.dfs() {
            return Some(search.into_strategy(game.clone()));
        }
    }
    None
}

/// Independent check of a strategy through exploration.
pub fn certify(s: &Strategy, cap: usize) -> Verdict {
    s.explore(cap).verdict
}
