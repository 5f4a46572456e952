//! Static game classes: series-parallel alphabets, connectedly
//! communicating games and triangulated architectures.

use std::fmt;

use crate::alphabet::{DependencyAlphabet, Letter, LetterSet, ProcId, ProcSet};
use crate::game::Game;
use crate::trace::Trace;

/// Binary decomposition of a cograph dependence alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpTree {
    Leaf(Letter),
    /// `D = D_0 ∪ D_1`.
    Parallel(Box<SpTree>, Box<SpTree>),
    /// `D = D_0 ∪ D_1 ∪ A_0×A_1 ∪ A_1×A_0`.
    Synchronized(Box<SpTree>, Box<SpTree>),
}

impl SpTree {
    pub fn letters(&self) -> LetterSet {
        match self {
            SpTree::Leaf(a) => LetterSet::singleton(*a),
            SpTree::Parallel(l, r) | SpTree::Synchronized(l, r) => l.letters().union(r.letters()),
        }
    }

    /// The dependence relation the tree describes, as `dep[a]` sets
    /// (reflexive).
    pub fn dependence(&self, n: usize) -> Vec<LetterSet> {
        let mut dep = vec![LetterSet::EMPTY; n];
        self.fill(&mut dep);
        dep
    }

    fn fill(&self, dep: &mut [LetterSet]) {
        match self {
            SpTree::Leaf(a) => dep[a.index()].insert(*a),
            SpTree::Parallel(l, r) => {
                l.fill(dep);
                r.fill(dep);
            }
            SpTree::Synchronized(l, r) => {
                l.fill(dep);
                r.fill(dep);
                let (la, ra) = (l.letters(), r.letters());
                for a in la.iter() {
                    dep[a.index()] = dep[a.index()].union(ra);
                }
                for a in ra.iter() {
                    dep[a.index()] = dep[a.index()].union(la);
                }
            }
        }
    }

    pub fn display<'a>(&'a self, alpha: &'a DependencyAlphabet) -> SpDisplay<'a> {
        SpDisplay(self, alpha)
    }
}

pub struct SpDisplay<'a>(&'a SpTree, &'a DependencyAlphabet);

impl fmt::Display for SpDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            SpTree::Leaf(a) => f.write_str(self.1.letter_name(*a)),
            SpTree::Parallel(l, r) => write!(f, "par({},{})", l.display(self.1), r.display(self.1)),
            SpTree::Synchronized(l, r) => {
                write!(f, "sync({},{})", l.display(self.1), r.display(self.1))
            }
        }
    }
}

/// Connected components of `within` under `adj`, each listed from its
/// least-ranked letter, components ordered by that letter.
fn components(
    alpha: &DependencyAlphabet,
    within: LetterSet,
    adj: impl Fn(Letter) -> LetterSet,
) -> Vec<LetterSet> {
    let mut rest = within;
    let mut out = Vec::new();
    while let Some(start) = alpha
        .letters_by_rank()
        .iter()
        .copied()
        .find(|&l| rest.contains(l))
    {
        let mut comp = LetterSet::singleton(start);
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for b in adj(a).intersection(within).difference(comp).iter() {
                comp.insert(b);
                stack.push(b);
            }
        }
        rest = rest.difference(comp);
        out.push(comp);
    }
    out
}

fn decompose(alpha: &DependencyAlphabet, s: LetterSet) -> Option<SpTree> {
    if s.len() == 1 {
        return s.first().map(SpTree::Leaf);
    }
    let dep = |a: Letter| alpha.dependents(a);
    let comps = components(alpha, s, dep);
    if comps.len() > 1 {
        let (first, rest) = (comps[0], s.difference(comps[0]));
        return Some(SpTree::Parallel(
            Box::new(decompose(alpha, first)?),
            Box::new(decompose(alpha, rest)?),
        ));
    }
    let indep = |a: Letter| alpha.all_letters().difference(alpha.dependents(a));
    let co = components(alpha, s, indep);
    if co.len() > 1 {
        let (first, rest) = (co[0], s.difference(co[0]));
        return Some(SpTree::Synchronized(
            Box::new(decompose(alpha, first)?),
            Box::new(decompose(alpha, rest)?),
        ));
    }
    None
}

/// A decomposition tree if the dependence graph is a cograph.
pub fn classify_series_parallel(alpha: &DependencyAlphabet) -> Option<SpTree> {
    let all = alpha.all_letters();
    if all.is_empty() {
        return None;
    }
    decompose(alpha, all)
}

/// A violation of the k-communication implication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCounterexample {
    pub u: Trace,
    pub v: Trace,
    pub w: Trace,
    pub p: ProcId,
    pub q: ProcId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KVerdict {
    HoldsWithinCap,
    Counterexample(KCounterexample),
}

/// Checks `|v|_p ≥ k ∧ |v|_q = 0 ∧ w prime ⟹ |w|_p = 0 ∨ |w|_q = 0` over
/// all plays `uvw` with `|uvw| ≤ cap`. The least violation is ordered by
/// `(|uvw|, uvw, u, v, p, q)`, traces in shortlex order.
pub fn check_k_communicating(g: &Game, k: usize, cap: usize) -> KVerdict {
    let k = k.max(1);
    for t in g.enumerate_plays(cap) {
        if t.trace.len() < k + 1 {
            continue;
        }
        for u in t.trace.prefixes() {
            let r = u.residual_unchecked(&t.trace).expect("prefix");
            for v in r.prefixes() {
                if v.len() < k {
                    continue;
                }
                let w = v.residual_unchecked(&r).expect("prefix");
                if !w.is_prime() {
                    continue;
                }
                for p in g.processes() {
                    if v.count_unchecked(p) < k || w.count_unchecked(p) == 0 {
                        continue;
                    }
                    for q in g.processes() {
                        if q != p && v.count_unchecked(q) == 0 && w.count_unchecked(q) > 0 {
                            return KVerdict::Counterexample(KCounterexample {
                                u: u.clone(),
                                v: v.clone(),
                                w,
                                p,
                                q,
                            });
                        }
                    }
                }
            }
        }
    }
    KVerdict::HoldsWithinCap
}

/// Edges `{p, q}` (with `p < q`) between processes sharing an action.
pub fn communication_graph(g: &Game) -> Vec<(ProcId, ProcId)> {
    let al = g.alphabet();
    let mut edges = Vec::new();
    for p in g.processes() {
        for q in g.processes().filter(|&q| q > p) {
            if al.letters().any(|a| {
                let d = al.domain(a);
                d.contains(p) && d.contains(q)
            }) {
                edges.push((p, q));
            }
        }
    }
    edges
}

fn adjacency(n: usize, edges: &[(ProcId, ProcId)]) -> Vec<ProcSet> {
    let mut adj = vec![ProcSet::EMPTY; n];
    for &(p, q) in edges {
        if p != q {
            adj[p.index()].insert(q);
            adj[q.index()].insert(p);
        }
    }
    adj
}

/// Length of the longest simple cycle, `0` if the graph is a forest.
pub fn longest_simple_cycle(n: usize, edges: &[(ProcId, ProcId)]) -> usize {
    let adj = adjacency(n, edges);
    let mut best = 0;
    // Each cycle is found from its least vertex.
    fn dfs(adj: &[ProcSet], start: usize, at: usize, visited: ProcSet, len: usize, best: &mut usize) {
        for nb in adj[at].iter() {
            let j = nb.index();
            if j == start && len >= 3 {
                *best = (*best).max(len);
            } else if j > start && !visited.contains(nb) {
                dfs(adj, start, j, visited.with(nb), len + 1, best);
            }
        }
    }
    for s in 0..n {
        dfs(&adj, s, s, ProcSet::singleton(ProcId(s as u8)), 1, &mut best);
    }
    best
}

fn connected_in(adj: &[ProcSet], set: ProcSet) -> bool {
    let Some(start) = set.first() else {
        return true;
    };
    let mut seen = ProcSet::singleton(start);
    let mut stack = vec![start];
    while let Some(p) = stack.pop() {
        for q in adj[p.index()].intersection(set).difference(seen).iter() {
            seen.insert(q);
            stack.push(q);
        }
    }
    seen == set
}

/// Every simple cycle of `edges` has length 3 and every action domain
/// induces a connected subgraph.
pub fn check_triangulated(g: &Game, edges: &[(ProcId, ProcId)]) -> bool {
    let n = g.num_processes();
    if longest_simple_cycle(n, edges) > 3 {
        return false;
    }
    let adj = adjacency(n, edges);
    let al = g.alphabet();
    al.letters().all(|a| connected_in(&adj, al.domain(a)))
}
