//! Broadcasts and the broadcast-game decision procedure.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use thiserror::Error;

use crate::alphabet::{LetterSet, ProcSet};
use crate::game::{Game, Play};
use crate::ordering::{check_process_ordering, OrderingError, ProcessOrdering};
use crate::trace::{Trace, ViewSemantics};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BroadcastError {
    #[error("`{0}` is not a prime play")]
    NotPrime(String),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}

/// Default bound on broadcast extensions: `3·Π_p |Q_p|`.
pub fn default_vcap(g: &Game) -> usize {
    g.global_state_count().saturating_mul(3)
}

fn require_prime(u: &Play) -> Result<(), BroadcastError> {
    if u.trace.is_prime() {
        Ok(())
    } else {
        Err(BroadcastError::NotPrime(u.trace.to_string()))
    }
}

fn crosses(dom: ProcSet, q: ProcSet) -> bool {
    dom.intersects(q) && !dom.is_subset(q)
}

/// The least extension `v` (shortlex, `|v| ≤ v_cap`) with `v` prime that
/// violates "`uv` prime, or `dom(v) ∩ Q = ∅`, or `dom(v) ⊆ Q`".
pub fn broadcast_witness(
    g: &Game,
    u: &Play,
    q: ProcSet,
    v_cap: usize,
) -> Result<Option<Trace>, BroadcastError> {
    require_prime(u)?;
    for w in g.extensions(u, v_cap) {
        let v = u.trace.residual_unchecked(&w.trace).expect("extension");
        if v.is_prime() && !w.trace.is_prime() && crosses(v.domain(), q) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Whether the prime play `u` is a `Q`-broadcast, checked on extensions
/// of length at most `v_cap` through the prime-extension criterion.
pub fn is_broadcast(g: &Game, u: &Play, q: ProcSet, v_cap: usize) -> Result<bool, BroadcastError> {
    Ok(broadcast_witness(g, u, q, v_cap)?.is_none())
}

/// The same predicate through the defining condition: for every play `uv`
/// and maximal action `a` of `uv` whose domain crosses `Q`,
/// `u ⊑ view_a(uv)`.
pub fn is_broadcast_by_definition(
    g: &Game,
    u: &Play,
    q: ProcSet,
    v_cap: usize,
) -> Result<bool, BroadcastError> {
    require_prime(u)?;
    let al = g.alphabet();
    for w in g.extensions(u, v_cap) {
        for a in w.trace.maximal_letters().iter() {
            if crosses(al.domain(a), q) {
                let view = w.trace.view(LetterSet::singleton(a), ViewSemantics::Literal);
                if !u.trace.is_prefix_of(&view) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `Q = Q_⪯`, `u` is a `Q`-broadcast and the ⪯-maximum of `dom(u)` takes
/// part in the last action of `u`.
pub fn is_well_ordered_broadcast(
    g: &Game,
    u: &Play,
    q: ProcSet,
    ord: &ProcessOrdering,
    v_cap: usize,
) -> Result<bool, BroadcastError> {
    require_prime(u)?;
    if ord.closure(q) != q || !last_action_has_max(g, &u.trace, ord) {
        return Ok(false);
    }
    is_broadcast(g, u, q, v_cap)
}

fn last_action_has_max(g: &Game, u: &Trace, ord: &ProcessOrdering) -> bool {
    match (ord.maximum(u.domain()), u.last_letter()) {
        (Some(m), Some(b)) => g.alphabet().domain(b).contains(m),
        _ => false,
    }
}

/// Search bounds for the broadcast-game decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BroadcastCaps {
    pub u_cap: usize,
    pub v_cap: usize,
    pub witness_cap: usize,
}

impl BroadcastCaps {
    /// `(M, M·|P|, 3M)` with `M = Π_p |Q_p|`.
    pub fn defaults(g: &Game) -> Self {
        let m = g.global_state_count();
        BroadcastCaps {
            u_cap: m,
            v_cap: m.saturating_mul(g.num_processes()),
            witness_cap: m.saturating_mul(3),
        }
    }
}

/// A pair `(u, v)` without a well-ordered broadcast prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastFailure {
    pub u: Trace,
    pub v: Trace,
    /// `min_{q ∈ dom(v)} |v|_q`: any `N` above this excludes the pair.
    pub min_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastGameReport {
    /// Least `N` within the caps, or `None` if it would exceed `M`.
    pub n: Option<usize>,
    pub caps: BroadcastCaps,
    /// The failing pair with the largest `min_count` (least such pair).
    pub hardest: Option<BroadcastFailure>,
    pub pairs_checked: usize,
}

/// Caches `Q`-broadcast answers for one game and extension bound.
pub struct BroadcastCache<'g> {
    game: &'g Game,
    v_cap: usize,
    memo: Mutex<HashMap<(Trace, ProcSet), bool>>,
}

impl<'g> BroadcastCache<'g> {
    pub fn new(game: &'g Game, v_cap: usize) -> Self {
        BroadcastCache {
            game,
            v_cap,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn is_broadcast(&self, u: &Play, q: ProcSet) -> bool {
        let key = (u.trace.clone(), q);
        if let Some(&r) = self.memo.lock().unwrap().get(&key) {
            return r;
        }
        let r = is_broadcast(self.game, u, q, self.v_cap).unwrap_or(false);
        self.memo.lock().unwrap().insert(key, r);
        r
    }

    pub fn is_well_ordered(&self, u: &Play, q: ProcSet, ord: &ProcessOrdering) -> bool {
        u.trace.is_prime()
            && ord.closure(q) == q
            && last_action_has_max(self.game, &u.trace, ord)
            && self.is_broadcast(u, q)
    }
}

/// Some prefix `v' ⊑ v` makes `uv'` a well-ordered `dom(v)_⪯`-broadcast.
fn has_broadcast_prefix(
    g: &Game,
    u: &Trace,
    v: &Trace,
    ord: &ProcessOrdering,
    cache: &BroadcastCache<'_>,
) -> bool {
    let pool = ord.closure(v.domain());
    v.prefixes().into_iter().any(|vp| {
        let w = u.concat(&vp).expect("same alphabet");
        match g.play(&w) {
            Ok(play) => cache.is_well_ordered(&play, pool, ord),
            Err(_) => false,
        }
    })
}

/// Least `N ≤ M` such that every prime play `uv` within the caps with
/// `v ≠ ε` and `|v|_q ≥ N` for all `q ∈ dom(v)` has a prefix `v' ⊑ v`
/// making `uv'` a well-ordered `dom(v)_⪯`-broadcast.
pub fn decide_broadcast_game(
    g: &Game,
    ord: &ProcessOrdering,
    caps: BroadcastCaps,
) -> Result<BroadcastGameReport, BroadcastError> {
    if !check_process_ordering(g, ord)? {
        return Err(OrderingError::InvalidOrdering(ord.render(g.alphabet())).into());
    }
    let cache = BroadcastCache::new(g, caps.witness_cap);
    let us = g.enumerate_plays(caps.u_cap);
    let per_u: Vec<(usize, Option<BroadcastFailure>)> = us
        .par_iter()
        .map(|u| {
            let mut checked = 0;
            let mut worst: Option<BroadcastFailure> = None;
            for w in g.extensions(u, caps.v_cap) {
                if w.trace.len() == u.trace.len() || !w.trace.is_prime() {
                    continue;
                }
                checked += 1;
                let v = u.trace.residual_unchecked(&w.trace).expect("extension");
                let min_count = v
                    .domain()
                    .iter()
                    .map(|q| v.count_unchecked(q))
                    .min()
                    .unwrap_or(0);
                if worst.as_ref().is_some_and(|f| f.min_count >= min_count) {
                    continue;
                }
                if !has_broadcast_prefix(g, &u.trace, &v, ord, &cache) {
                    worst = Some(BroadcastFailure {
                        u: u.trace.clone(),
                        v,
                        min_count,
                    });
                }
            }
            (checked, worst)
        })
        .collect();
    let pairs_checked = per_u.iter().map(|(c, _)| c).sum();
    // First failing pair in enumeration order among those with the
    // largest count.
    let mut hardest: Option<BroadcastFailure> = None;
    for f in per_u.into_iter().filter_map(|(_, f)| f) {
        if hardest.as_ref().is_none_or(|h| f.min_count > h.min_count) {
            hardest = Some(f);
        }
    }
    let needed = hardest.as_ref().map_or(1, |f| f.min_count + 1).max(1);
    let n = (needed <= g.global_state_count()).then_some(needed);
    Ok(BroadcastGameReport {
        n,
        caps,
        hardest,
        pairs_checked,
    })
}
