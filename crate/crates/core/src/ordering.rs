//! Process orderings and the checks built on them.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::alphabet::{DependencyAlphabet, ProcId, ProcSet};
use crate::game::Game;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderingError {
    #[error("order relation is cyclic between processes {0} and {1}")]
    Cyclic(u8, u8),
    #[error("ordering covers {got} processes but the game has {want}")]
    IncompleteOrder { got: usize, want: usize },
    #[error("process index {0} out of range")]
    OutOfRange(u8),
    #[error("not a process ordering for this game: {0}")]
    InvalidOrdering(String),
}

/// A partial order on processes, stored as its reflexive-transitive
/// closure: `below[q]` is `{p : p ⪯ q}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProcessOrdering {
    below: Vec<ProcSet>,
}

impl ProcessOrdering {
    /// Only the reflexive pairs.
    pub fn discrete(n: usize) -> Self {
        ProcessOrdering {
            below: (0..n).map(|q| ProcSet::singleton(ProcId(q as u8))).collect(),
        }
    }

    /// The chain `order[0] ⪯ order[1] ⪯ ...`.
    pub fn total(order: &[ProcId]) -> Self {
        let pairs: Vec<(ProcId, ProcId)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        Self::from_pairs(order.len(), &pairs).expect("a chain is acyclic")
    }

    /// Closes `pairs` (`(p, q)` meaning `p ⪯ q`) reflexively and
    /// transitively; fails if the result is not antisymmetric.
    pub fn from_pairs(n: usize, pairs: &[(ProcId, ProcId)]) -> Result<Self, OrderingError> {
        let mut below: Vec<ProcSet> = Self::discrete(n).below;
        for &(p, q) in pairs {
            for r in [p, q] {
                if r.index() >= n {
                    return Err(OrderingError::OutOfRange(r.0));
                }
            }
            below[q.index()].insert(p);
        }
        // Warshall on bitsets.
        for k in 0..n {
            let bk = below[k];
            for b in below.iter_mut() {
                if b.contains(ProcId(k as u8)) {
                    *b = b.union(bk);
                }
            }
        }
        for q in 0..n {
            for p in below[q].iter() {
                if p.index() != q && below[p.index()].contains(ProcId(q as u8)) {
                    return Err(OrderingError::Cyclic(p.0, q as u8));
                }
            }
        }
        Ok(ProcessOrdering { below })
    }

    pub fn num_processes(&self) -> usize {
        self.below.len()
    }

    /// `p ⪯ q`.
    pub fn leq(&self, p: ProcId, q: ProcId) -> bool {
        self.below[q.index()].contains(p)
    }

    /// The ⪯-maximum of `s`, if it has one.
    pub fn maximum(&self, s: ProcSet) -> Option<ProcId> {
        s.iter().find(|&q| s.is_subset(self.below[q.index()]))
    }

    /// `Q_⪯ = {p : p ⪯ q for some q ∈ Q}`.
    pub fn closure(&self, q: ProcSet) -> ProcSet {
        q.iter()
            .fold(ProcSet::EMPTY, |acc, r| acc.union(self.below[r.index()]))
    }

    /// Strict covering pairs `(p, q)`, sorted.
    pub fn covering_pairs(&self) -> Vec<(ProcId, ProcId)> {
        let n = self.below.len();
        let mut out = Vec::new();
        for q in 0..n {
            let q = ProcId(q as u8);
            for p in self.below[q.index()].iter().filter(|&p| p != q) {
                let between = self.below[q.index()]
                    .iter()
                    .any(|r| r != p && r != q && self.leq(p, r));
                if !between {
                    out.push((p, q));
                }
            }
        }
        out.sort_by_key(|&(p, q)| (p, q));
        out
    }

    /// `1<=2,3<=2`, or `-` for the discrete order.
    pub fn render(&self, alpha: &DependencyAlphabet) -> String {
        let pairs = self.covering_pairs();
        if pairs.is_empty() {
            return "-".to_string();
        }
        pairs
            .iter()
            .map(|&(p, q)| format!("{}<={}", alpha.process_name(p), alpha.process_name(q)))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Every partial order on `n` processes, in a fixed order (by the
    /// bitmask of strict pairs, ascending).
    pub fn enumerate_all(n: usize) -> Vec<ProcessOrdering> {
        let strict: Vec<(ProcId, ProcId)> = (0..n)
            .flat_map(|p| (0..n).map(move |q| (p, q)))
            .filter(|(p, q)| p != q)
            .map(|(p, q)| (ProcId(p as u8), ProcId(q as u8)))
            .collect();
        assert!(strict.len() < 32, "too many processes to enumerate orders");
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for mask in 0u32..(1 << strict.len()) {
            let pairs: Vec<(ProcId, ProcId)> = strict
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &pq)| pq)
                .collect();
            if let Ok(o) = Self::from_pairs(n, &pairs) {
                // Only closed masks, so each order appears once.
                let closed = pairs.len()
                    == o.below.iter().map(|b| b.len()).sum::<usize>() - n;
                if closed && seen.insert(o.below.iter().map(|b| b.0).collect::<Vec<_>>()) {
                    out.push(o);
                }
            }
        }
        out
    }
}

/// Process sets `dom(B)` for every dependency-connected nonempty letter
/// set `B`; these are exactly the domains of prime traces.
pub fn connected_domains(alpha: &DependencyAlphabet) -> BTreeSet<ProcSet> {
    let doms: Vec<ProcSet> = alpha.letters().map(|a| alpha.domain(a)).collect();
    let mut seen: BTreeSet<ProcSet> = doms.iter().copied().collect();
    let mut stack: Vec<ProcSet> = seen.iter().copied().collect();
    while let Some(s) = stack.pop() {
        for &d in &doms {
            if d.intersects(s) {
                let t = s.union(d);
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
    }
    seen
}

fn check_covers(g: &Game, ord: &ProcessOrdering) -> Result<(), OrderingError> {
    if ord.num_processes() != g.num_processes() {
        return Err(OrderingError::IncompleteOrder {
            got: ord.num_processes(),
            want: g.num_processes(),
        });
    }
    Ok(())
}

/// Every prime trace's domain has a ⪯-maximum.
pub fn check_process_ordering(g: &Game, ord: &ProcessOrdering) -> Result<bool, OrderingError> {
    check_covers(g, ord)?;
    Ok(connected_domains(g.alphabet())
        .into_iter()
        .all(|d| ord.maximum(d).is_some()))
}

/// Downward closure of `q` under `ord`.
pub fn process_closure(q: ProcSet, ord: &ProcessOrdering) -> ProcSet {
    ord.closure(q)
}

/// The declared ordering of a game, or `None` if it declares none.
pub fn declared(g: &Game) -> Option<ProcessOrdering> {
    if g.declared_ordering().is_empty() {
        return None;
    }
    ProcessOrdering::from_pairs(g.num_processes(), g.declared_ordering()).ok()
}

/// The DAG condition: for every action `a`, `p0, p1 ∈ dom(a)` and
/// process `p2`, `p0 ⪯ p2` implies `p1 ⪯ p2` or `p2 ∈ dom(a)`.
pub fn check_dag_condition(g: &Game, ord: &ProcessOrdering) -> Result<bool, OrderingError> {
    check_covers(g, ord)?;
    let al = g.alphabet();
    for a in al.letters() {
        let dom = al.domain(a);
        for p0 in dom.iter() {
            for p1 in dom.iter() {
                for p2 in g.processes() {
                    if ord.leq(p0, p2) && !(ord.leq(p1, p2) || dom.contains(p2)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
