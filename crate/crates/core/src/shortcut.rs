//! Useless threads and the shortcut reduction loop.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::alphabet::{Letter, LetterSet, ProcId, ProcSet};
use crate::broadcast::{default_vcap, BroadcastCache};
use crate::game::{Game, Play};
use crate::ordering::declared;
use crate::strategy::{Duration, Strategy, Verdict};
use crate::trace::Trace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShortcutError {
    #[error("strategy exceeds the play-length cap {0}")]
    BoundExceeded(usize),
    #[error("strategy is not winning within cap {cap}: {verdict}")]
    NotWinning { cap: usize, verdict: String },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
}

/// A useless thread `(x, y)` with its pool `Q`, anchor `b` and the bounds
/// under which the conditions were checked.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThreadCertificate {
    pub x: Trace,
    pub y: Trace,
    pub pool: ProcSet,
    pub anchor: Letter,
    /// Extension bound for the broadcast checks.
    pub v_cap: usize,
    /// Play-length bound for the decision comparison.
    pub cap: usize,
}

impl ThreadCertificate {
    /// `(|y| descending, x, y, Q, b)`.
    fn sort_key(&self) -> (std::cmp::Reverse<usize>, Trace, Trace, ProcSet, Letter) {
        (
            std::cmp::Reverse(self.y.len()),
            self.x.clone(),
            self.y.clone(),
            self.pool,
            self.anchor,
        )
    }
}

/// Which pools to try for a thread `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoolSearch {
    /// `dom(y)`, its closure under the declared ordering, and `P`.
    #[default]
    Closures,
    /// Every superset of `dom(y)`.
    Exhaustive,
}

#[derive(Debug, Clone, Copy)]
pub struct ThreadSearch {
    pub cap: usize,
    /// Defaults to `3·Π_p |Q_p|`.
    pub v_cap: Option<usize>,
    pub pools: PoolSearch,
}

impl ThreadSearch {
    pub fn new(cap: usize) -> Self {
        ThreadSearch {
            cap,
            v_cap: None,
            pools: PoolSearch::Closures,
        }
    }
}

fn candidate_pools(g: &Game, dom_y: ProcSet, mode: PoolSearch) -> Vec<ProcSet> {
    let all = g.all_processes();
    let mut out: BTreeSet<ProcSet> = BTreeSet::new();
    match mode {
        PoolSearch::Closures => {
            out.insert(dom_y);
            if let Some(ord) = declared(g) {
                out.insert(ord.closure(dom_y));
            }
            out.insert(all);
        }
        PoolSearch::Exhaustive => {
            // Enumerate subsets of the complement and add them to dom(y).
            let rest = all.difference(dom_y).0;
            let mut sub = rest;
            loop {
                out.insert(ProcSet(dom_y.0 | sub));
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
    }
    out.into_iter().collect()
}

/// All decisions `(σ_p(u))_p`.
fn decisions_at(s: &Strategy, u: &Trace) -> Vec<LetterSet> {
    s.game()
        .processes()
        .map(|p| s.decision_unchecked(p, u))
        .collect()
}

/// Decisions after `xv` and `xyv` coincide on plays `xv` with `dom(v) ⊆ Q`, `v I b`, `|v| ≤ cap`.
fn decisions_coincide(s: &Strategy, x: &Play, y: &Trace, q: ProcSet, b: Letter, cap: usize) -> bool {
    let g = s.game();
    let al = g.alphabet();
    let dom_b = al.domain(b);
    let letters: LetterSet = al
        .letters()
        .filter(|&a| al.domain(a).is_subset(q) && !al.domain(a).intersects(dom_b))
        .collect();
    let xy = x.trace.concat(y).expect("same alphabet");
    let mut seen: HashSet<Trace> = HashSet::new();
    let mut layer = vec![x.clone()];
    seen.insert(x.trace.clone());
    for depth in 0..=cap {
        let mut next = Vec::new();
        for xv in &layer {
            let v = x.trace.residual_unchecked(&xv.trace).expect("extension");
            let xyv = xy.concat(&v).expect("same alphabet");
            if decisions_at(s, &xv.trace) != decisions_at(s, &xyv) {
                return false;
            }
            if depth < cap {
                for (a, w) in g.successors(xv) {
                    if letters.contains(a) && seen.insert(w.trace.clone()) {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    true
}

/// Whether one candidate is a useless thread.
fn check_certificate(
    s: &Strategy,
    c: &ThreadCertificate,
    cache: &BroadcastCache<'_>,
) -> Result<(), String> {
    let g = s.game();
    if c.y.is_empty() {
        return Err("y is empty".into());
    }
    let xy = c.x.concat(&c.y).map_err(|e| e.to_string())?;
    if !s.is_sigma_play(&xy) {
        return Err(format!("{} is not a consistent play", xy));
    }
    if !c.y.domain().is_subset(c.pool) {
        return Err("dom(y) is not inside the pool".into());
    }
    let bset = LetterSet::singleton(c.anchor);
    if !(c.x.is_prime_for(bset) && xy.is_prime_for(bset)) {
        return Err("x and xy are not both prime for the anchor".into());
    }
    let px = g.play(&c.x).map_err(|e| e.to_string())?;
    let pxy = g.play(&xy).map_err(|e| e.to_string())?;
    if px.state != pxy.state {
        return Err("global states differ".into());
    }
    if !(cache.is_broadcast(&px, c.pool) && cache.is_broadcast(&pxy, c.pool)) {
        return Err("not a broadcast for the pool".into());
    }
    if !decisions_coincide(s, &px, &c.y, c.pool, c.anchor, c.cap) {
        return Err("decisions differ after x and xy".into());
    }
    Ok(())
}

/// All useless threads of `s` among its consistent plays up to `cap`,
/// sorted by `(|y| descending, x, y, Q, b)`.
pub fn find_useless_threads(
    s: &Strategy,
    opts: ThreadSearch,
) -> Result<Vec<ThreadCertificate>, ShortcutError> {
    let g = s.game();
    let x = s.explore(opts.cap);
    if let Verdict::BoundExceeded(_) = x.verdict {
        return Err(ShortcutError::BoundExceeded(opts.cap));
    }
    let v_cap = opts.v_cap.unwrap_or_else(|| default_vcap(g));
    let cache = BroadcastCache::new(g, v_cap);
    let mut found: Vec<ThreadCertificate> = x
        .plays
        .par_iter()
        .flat_map_iter(|w| {
            let mut out = Vec::new();
            let Some(b) = w.trace.last_letter() else {
                return out;
            };
            for xt in w.trace.prefixes() {
                if xt.len() == w.trace.len() || xt.last_letter() != Some(b) {
                    continue;
                }
                let y = xt.residual_unchecked(&w.trace).expect("prefix");
                if g.run(&xt).as_ref() != Some(&w.state) {
                    continue;
                }
                for pool in candidate_pools(g, y.domain(), opts.pools) {
                    let c = ThreadCertificate {
                        x: xt.clone(),
                        y: y.clone(),
                        pool,
                        anchor: b,
                        v_cap,
                        cap: opts.cap,
                    };
                    if check_certificate(s, &c, &cache).is_ok() {
                        out.push(c);
                    }
                }
            }
            out
        })
        .collect();
    found.sort_by_key(ThreadCertificate::sort_key);
    Ok(found)
}

/// `φ_{x,y}(u)`: `xyv` if `u = xv`, else `u`.
pub fn phi(x: &Trace, y: &Trace, u: &Trace) -> Trace {
    match x.residual_unchecked(u) {
        Some(v) => x.concat(y).and_then(|xy| xy.concat(&v)).expect("same alphabet"),
        None => u.clone(),
    }
}

/// `σ_{x,y} = σ ∘ φ_{x,y}`, realized as a finite strategy on the plays it
/// reaches within `c.cap`. Fails if the certificate does not re-validate or
/// the shortcut is not measurable on those plays.
pub fn take_shortcut(s: &Strategy, c: &ThreadCertificate) -> Result<Strategy, ShortcutError> {
    let g = s.game();
    let cache = BroadcastCache::new(g, c.v_cap);
    check_certificate(s, c, &cache).map_err(ShortcutError::InvalidCertificate)?;

    let sem = s.semantics();
    let mut table: HashMap<(ProcId, Trace), LetterSet> = HashMap::new();
    let mut seen: HashSet<Trace> = HashSet::new();
    let mut layer = vec![g.initial_play()];
    seen.insert(layer[0].trace.clone());
    for depth in 0..=c.cap {
        let mut next = Vec::new();
        for u in &layer {
            let image = phi(&c.x, &c.y, &u.trace);
            let mut dec = Vec::with_capacity(g.num_processes());
            for p in g.processes() {
                let allow = s.controlled_at_view(p, &image.process_view(p, sem));
                let key = (p, u.trace.process_view(p, sem));
                match table.get(&key) {
                    Some(&prev) if prev != allow => {
                        return Err(ShortcutError::InvalidCertificate(format!(
                            "shortcut is not measurable: process {} disagrees at view {}",
                            g.alphabet().process_name(p),
                            key.1
                        )));
                    }
                    _ => {
                        table.insert(key, allow);
                    }
                }
                dec.push(allow);
            }
            if depth == c.cap {
                continue;
            }
            for (a, w) in g.successors(u) {
                let ok = !g.is_controllable(a)
                    || g.alphabet().domain(a).iter().all(|p| dec[p.index()].contains(a));
                if ok && seen.insert(w.trace.clone()) {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    let mut t = Strategy::new(g.clone(), sem);
    for p in g.processes() {
        t.set_default(p, s.default_for(p)).expect("defaults of a valid strategy");
    }
    let mut entries: Vec<_> = table.into_iter().collect();
    entries.sort();
    for ((p, view), allow) in entries {
        t.insert_unchecked(p, view, allow);
    }
    Ok(t)
}

/// `σ_p(φ(u)) = σ_p(φ(view_p(u)))` for every play `u` with `|u| ≤ cap`.
pub fn shortcut_is_distributed(s: &Strategy, x: &Trace, y: &Trace, cap: usize) -> bool {
    let g = s.game();
    let sem = s.semantics();
    g.enumerate_plays(cap).par_iter().all(|u| {
        let image = phi(x, y, &u.trace);
        g.processes().all(|p| {
            let view = u.trace.process_view(p, sem);
            s.decision_unchecked(p, &image) == s.decision_unchecked(p, &phi(x, y, &view))
        })
    })
}

/// `xv` is a `τ`-play iff `xyv` is a `σ`-play, for `|v| ≤ k`.
pub fn plays_correspond(s: &Strategy, t: &Strategy, x: &Trace, y: &Trace, k: usize) -> bool {
    let xy = x.concat(y).expect("same alphabet");
    let cap = xy.len() + k;
    let from = |st: &Strategy, base: &Trace| -> BTreeSet<Trace> {
        st.explore(cap)
            .plays
            .into_iter()
            .filter_map(|p| base.residual_unchecked(&p.trace))
            .filter(|v| v.len() <= k)
            .collect()
    };
    from(t, x) == from(s, &xy)
}

/// One applied shortcut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub index: usize,
    pub certificate: ThreadCertificate,
    pub before: u64,
    pub after: u64,
}

/// A reduction log line; needs the game for names.
pub struct StepDisplay<'a>(pub &'a ReductionStep, pub &'a Game);

impl fmt::Display for StepDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, al) = (self.0, self.1.alphabet());
        let c = &s.certificate;
        write!(
            f,
            "step {} x={} y={} Q={} b={} dur {}->{}",
            s.index,
            c.x.compact(),
            c.y.compact(),
            al.fmt_process_set(c.pool),
            al.letter_name(c.anchor),
            s.before,
            s.after
        )
    }
}

fn winning_duration(s: &Strategy, cap: usize) -> Result<u64, ShortcutError> {
    let x = s.explore(cap);
    match (&x.verdict, x.duration()) {
        (Verdict::Winning, Duration::Finite(d)) => Ok(d),
        (v, _) => Err(ShortcutError::NotWinning {
            cap,
            verdict: match v {
                Verdict::Winning => "winning".into(),
                Verdict::Losing(w) => format!("losing at {}", w.trace),
                Verdict::BoundExceeded(w) => format!("bound exceeded at {}", w.trace),
            },
        }),
    }
}

/// Applies shortcuts until no useless thread remains. Each step is
/// re-verified: the result must be winning with a smaller duration,
/// otherwise the next certificate is tried.
pub fn reduce(s: &Strategy, opts: ThreadSearch) -> Result<(Strategy, Vec<ReductionStep>), ShortcutError> {
    let mut cur = s.clone();
    let mut dur = winning_duration(&cur, opts.cap)?;
    let mut log = Vec::new();
    'outer: loop {
        for c in find_useless_threads(&cur, opts)? {
            let Ok(t) = take_shortcut(&cur, &c) else {
                continue;
            };
            match winning_duration(&t, opts.cap) {
                Ok(d) if d < dur => {
                    log.push(ReductionStep {
                        index: log.len() + 1,
                        certificate: c,
                        before: dur,
                        after: d,
                    });
                    cur = t;
                    dur = d;
                    continue 'outer;
                }
                _ => continue,
            }
        }
        return Ok((cur, log));
    }
}
